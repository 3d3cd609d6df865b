//! Closed quadruple sums for `O_d` and `A_d` over the constrained counts,
//! evaluated through the enumeration oracle. Deliberately independent of the
//! layered iteration — the two paths share no code past the oracle, so their
//! agreement is a meaningful cross-check, not a tautology.

use std::collections::HashMap;

use crate::combinatorics::count_opnkd_oracle;
use crate::error::{Error, Result};
use crate::BigCount;

/// Past this the oracle enumerations behind the sum get slow; the closed
/// forms exist to cross-check small multiplicities, not to scale.
const CLOSED_SUM_CAP: u32 = 12;

/// `O_d` by the closed quadruple sum, `3 ≤ d ≤ 12`.
pub fn od_via_closed_sums(d: u32) -> Result<BigCount> {
    closed_sum(d, 1)
}

/// `A_d = O_d − O_{d−1}` by the closed quadruple sum, `3 ≤ d ≤ 12`.
pub fn ad_via_closed_sums(d: u32) -> Result<BigCount> {
    closed_sum(d, 2)
}

/// `1 + Σ_{ℓ=1}^{d−2} Σ_{k=1}^{d−2} Σ_{i=k}^{d−2} Σ_{j=j_start}^{d−2}
///  O(d−ℓ−1, d−1, i, d−j) · O(d−ℓ, i−1, k−1, j)`.
fn closed_sum(d: u32, j_start: i64) -> Result<BigCount> {
    if d < 3 {
        return Err(Error::Domain(format!(
            "the closed sums are stated for multiplicity at least 3, got {d}"
        )));
    }
    if d > CLOSED_SUM_CAP {
        return Err(Error::Budget {
            what: "closed-sum multiplicity",
            requested: d as u64,
            cap: CLOSED_SUM_CAP as u64,
        });
    }
    let d = d as i64;
    let mut memo: HashMap<(i64, i64, i64, i64), BigCount> = HashMap::new();
    let mut oracle = |p: i64, n: i64, k: i64, dd: i64| -> Result<BigCount> {
        if let Some(v) = memo.get(&(p, n, k, dd)) {
            return Ok(v.clone());
        }
        let v = count_opnkd_oracle(p, n, k, dd)?;
        memo.insert((p, n, k, dd), v.clone());
        Ok(v)
    };
    let mut total = BigCount::from(1u32);
    for l in 1..=d - 2 {
        for k in 1..=d - 2 {
            for i in k..=d - 2 {
                for j in j_start..=d - 2 {
                    let left = oracle(d - l - 1, d - 1, i, d - j)?;
                    if left == BigCount::ZERO {
                        continue;
                    }
                    let right = oracle(d - l, i - 1, k - 1, j)?;
                    total += left * right;
                }
            }
        }
    }
    Ok(total)
}
