//! Helpers shared by the integration-test targets.

use std::collections::HashMap;

use oseq_core::combinatorics::count_opnkd_oracle;
use oseq_core::BigCount;

/// Memoized brute-force oracle: the raw oracle re-enumerates per call, which
/// nested cross-check sums would repeat thousands of times.
pub struct Memo(HashMap<(i64, i64, i64, i64), BigCount>);

impl Memo {
    pub fn new() -> Self {
        Memo(HashMap::new())
    }

    pub fn get(&mut self, p: i64, n: i64, k: i64, d: i64) -> BigCount {
        self.0
            .entry((p, n, k, d))
            .or_insert_with(|| count_opnkd_oracle(p, n, k, d).unwrap())
            .clone()
    }
}

impl Default for Memo {
    fn default() -> Self {
        Self::new()
    }
}
