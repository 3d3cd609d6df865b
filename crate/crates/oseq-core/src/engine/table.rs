//! The result table: `O_d` and its first differences `A_d`.

use crate::calibrate::log_of_bigcount;
use crate::error::{Error, Result};
use crate::BigCount;

/// Counts `O_1..=O_D` with the derived differences `A_d = O_d − O_{d−1}`
/// (`A_1 = 0`). Both are indexed 1-based through the accessors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    o: Vec<BigCount>,
    a: Vec<BigCount>,
}

impl CountTable {
    /// Builds the table from `O_1, O_2, …` in order, validating the two
    /// structural facts every genuine count sequence has: `O_1 = 1` and
    /// monotone non-decreasing values.
    pub fn from_o_values(o: Vec<BigCount>) -> Result<Self> {
        if o.is_empty() {
            return Err(Error::Domain("a count table needs at least one value".into()));
        }
        if o[0] != BigCount::from(1u32) {
            return Err(Error::Domain(format!(
                "the multiplicity-1 count must be 1, got {}",
                o[0]
            )));
        }
        if let Some(d) = (1..o.len()).find(|&i| o[i] < o[i - 1]) {
            return Err(Error::Domain(format!(
                "counts must be non-decreasing, but the value at multiplicity {} drops",
                d + 1
            )));
        }
        let mut a = Vec::with_capacity(o.len());
        a.push(BigCount::ZERO);
        for i in 1..o.len() {
            a.push(&o[i] - &o[i - 1]);
        }
        Ok(CountTable { o, a })
    }

    /// Largest multiplicity in the table.
    pub fn d_cap(&self) -> u32 {
        self.o.len() as u32
    }

    /// `O_d`, `1 ≤ d ≤ d_cap`.
    pub fn o(&self, d: u32) -> &BigCount {
        assert!(d >= 1 && d <= self.d_cap(), "multiplicity {d} out of 1..={}", self.d_cap());
        &self.o[(d - 1) as usize]
    }

    /// `A_d = O_d − O_{d−1}` (zero at `d = 1`), `1 ≤ d ≤ d_cap`.
    pub fn a(&self, d: u32) -> &BigCount {
        assert!(d >= 1 && d <= self.d_cap(), "multiplicity {d} out of 1..={}", self.d_cap());
        &self.a[(d - 1) as usize]
    }

    /// All of `O_1..=O_D`, index `d − 1`.
    pub fn o_values(&self) -> &[BigCount] {
        &self.o
    }

    /// All of `A_1..=A_D`, index `d − 1`.
    pub fn a_values(&self) -> &[BigCount] {
        &self.a
    }

    /// `ln O_d` for `d = 1..=D`, index `d − 1`.
    pub fn log_o(&self) -> Result<Vec<f64>> {
        self.o.iter().map(log_of_bigcount).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(values: &[u32]) -> Vec<BigCount> {
        values.iter().copied().map(BigCount::from).collect()
    }

    #[test]
    fn differences_and_accessors() {
        let table = CountTable::from_o_values(big(&[1, 1, 2, 3, 5, 8])).unwrap();
        assert_eq!(table.d_cap(), 6);
        assert_eq!(table.o(6), &BigCount::from(8u32));
        assert_eq!(table.a_values(), &big(&[0, 0, 1, 1, 2, 3])[..]);
        assert_eq!(table.a(4), &BigCount::from(1u32));
    }

    #[test]
    fn rejects_malformed_inputs() {
        assert!(CountTable::from_o_values(vec![]).is_err());
        assert!(CountTable::from_o_values(big(&[2, 3])).is_err());
        assert!(CountTable::from_o_values(big(&[1, 2, 1])).is_err());
    }
}
