//! Definitions and brute-force oracles.
//!
//! Everything here favours being obviously correct over being fast: the
//! enumeration and the constrained count `O(p,n,k,d)` exist to validate the
//! layered engine on small instances, and the growth-bound arithmetic is the
//! ground truth the enumeration itself is built on.

use crate::error::{Error, Result};
use crate::BigCount;
use num_traits::One;

/// Default cap on the multiplicity accepted by the exhaustive routines.
/// The search space grows roughly like the Fibonacci numbers, so anything
/// much beyond this is better served by the engine.
pub const DEFAULT_ENUMERATION_CAP: u32 = 20;

/// `C(n, m)` in `u128`, panicking on overflow (callers stay far below that).
pub fn binomial(n: u64, m: u64) -> u128 {
    if m > n {
        return 0;
    }
    let m = m.min(n - m);
    let mut acc: u128 = 1;
    for i in 0..m {
        // Multiply before dividing; the running product of i+1 consecutive
        // binomial prefixes is always divisible by i+1.
        acc = acc
            .checked_mul((n - i) as u128)
            .expect("binomial overflow in u128");
        acc /= (i + 1) as u128;
    }
    acc
}

/// `C(n, m)` with signed arguments and the conventions `C(n, m) = 0` for
/// `n < m` or `m < 0`, and `C(n, 0) = 1` for every `n` (including negatives).
pub fn binomial_signed(n: i64, m: i64) -> u128 {
    if m < 0 {
        return 0;
    }
    if m == 0 {
        return 1;
    }
    if n < m {
        return 0;
    }
    binomial(n as u64, m as u64)
}

/// `min(C(n, m), cap)` without overflowing, for pruning tests against a cap.
pub fn binomial_capped(n: u64, m: u64, cap: u64) -> u64 {
    if m > n {
        return 0;
    }
    let m = m.min(n - m);
    let mut acc: u128 = 1;
    for i in 0..m {
        acc = acc.saturating_mul((n - i) as u128);
        acc /= (i + 1) as u128;
        if acc >= cap as u128 {
            return cap;
        }
    }
    acc as u64
}

/// The binomial expansion of `a` in base `t`:
/// `a = C(k_t, t) + C(k_{t-1}, t-1) + … + C(k_j, j)` with
/// `k_t > k_{t-1} > … > k_j ≥ j ≥ 1`. Unique for given `(a, t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinomialExpansion {
    pub base: u32,
    /// Pairs `(k_i, i)` with `i` descending from `t` down to some `j ≥ 1`.
    pub terms: Vec<(u64, u32)>,
}

impl BinomialExpansion {
    /// Sums the expansion back; equals the expanded integer.
    pub fn reconstruct(&self) -> u64 {
        self.terms
            .iter()
            .map(|&(k, i)| binomial(k, i as u64) as u64)
            .sum()
    }
}

/// Greedy (and therefore canonical) binomial expansion of `a ≥ 1` in base `t ≥ 1`.
pub fn binomial_expansion(a: u64, t: u32) -> Result<BinomialExpansion> {
    if a == 0 || t == 0 {
        return Err(Error::Domain(format!(
            "binomial expansion needs a ≥ 1 and t ≥ 1, got a = {a}, t = {t}"
        )));
    }
    let mut rem = a;
    let mut terms = Vec::new();
    let mut i = t;
    while rem > 0 {
        // Largest k with C(k, i) ≤ rem. C(i, i) = 1 ≤ rem, so k exists.
        let mut k = i as u64;
        while binomial(k + 1, i as u64) <= rem as u128 {
            k += 1;
        }
        rem -= binomial(k, i as u64) as u64;
        terms.push((k, i));
        debug_assert!(i >= 1);
        if rem == 0 {
            break;
        }
        i -= 1;
    }
    // Canonical-form invariants: strictly decreasing upper indices, k_j ≥ j.
    debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
    debug_assert!(terms.iter().all(|&(k, i)| k >= i as u64 && i >= 1));
    Ok(BinomialExpansion { base: t, terms })
}

/// The Macaulay bound `a^{⟨t⟩} = Σ C(k_i + 1, i + 1)` over the expansion of
/// `a` in base `t`: the maximal admissible next value after `h_t = a`.
pub fn macaulay_bound(a: u64, t: u32) -> Result<u64> {
    let exp = binomial_expansion(a, t)?;
    let sum: u128 = exp
        .terms
        .iter()
        .map(|&(k, i)| binomial(k + 1, (i + 1) as u64))
        .sum();
    u64::try_from(sum).map_err(|_| Error::Domain(format!("macaulay_bound({a}, {t}) exceeds u64")))
}

/// A finite O-sequence `(h_0, …, h_s)`: positive entries, `h_0 = 1`, and
/// `h_{t+1} ≤ h_t^{⟨t⟩}` for every `1 ≤ t < s`. The step `h_0 → h_1` is
/// unconstrained (the number of variables is free).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OSequence {
    values: Vec<u32>,
}

impl OSequence {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        let as_u64: Vec<u64> = values.iter().map(|&v| v as u64).collect();
        if !is_o_sequence(&as_u64) {
            return Err(Error::Domain(format!(
                "not an O-sequence: {values:?} violates the growth condition"
            )));
        }
        Ok(OSequence { values })
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Sum of the entries.
    pub fn multiplicity(&self) -> u64 {
        self.values.iter().map(|&v| v as u64).sum()
    }

    /// Index of the last entry.
    pub fn socle_degree(&self) -> usize {
        self.values.len() - 1
    }

    pub fn last(&self) -> u32 {
        *self.values.last().expect("values are non-empty")
    }
}

/// Validity predicate. Malformed input (empty, zero entries, `h_0 ≠ 1`)
/// returns `false` rather than erroring.
pub fn is_o_sequence(values: &[u64]) -> bool {
    if values.is_empty() || values[0] != 1 || values.contains(&0) {
        return false;
    }
    for t in 1..values.len().saturating_sub(1) {
        match macaulay_bound(values[t], t as u32) {
            Ok(bound) => {
                if values[t + 1] > bound {
                    return false;
                }
            }
            Err(_) => return false,
        }
    }
    true
}

/// All O-sequences of multiplicity exactly `d`, in lexicographic order,
/// under the default enumeration cap.
pub fn enumerate_o_sequences(d: u32) -> Result<Vec<OSequence>> {
    enumerate_o_sequences_with_cap(d, DEFAULT_ENUMERATION_CAP)
}

/// As [`enumerate_o_sequences`] with an explicit cap.
pub fn enumerate_o_sequences_with_cap(d: u32, cap: u32) -> Result<Vec<OSequence>> {
    if d == 0 {
        return Err(Error::Domain("multiplicity must be ≥ 1".into()));
    }
    if d > cap {
        return Err(Error::Budget {
            what: "enumeration multiplicity",
            requested: d as u64,
            cap: cap as u64,
        });
    }
    let mut out = Vec::new();
    let mut prefix = vec![1u32];
    extend(&mut prefix, 1, d, &mut out);
    debug_assert!(out.windows(2).all(|w| w[0] < w[1]), "lexicographic order");
    Ok(out)
}

/// Depth-first extension. `sum` is the multiplicity of `prefix`; children are
/// visited in increasing `h`, which makes the emission order lexicographic.
fn extend(prefix: &mut Vec<u32>, sum: u32, d: u32, out: &mut Vec<OSequence>) {
    if sum == d {
        out.push(OSequence {
            values: prefix.clone(),
        });
        return;
    }
    let t = prefix.len() - 1;
    // h_1 is bounded only by the remaining budget; later steps by Macaulay.
    let grow_cap = if t == 0 {
        u64::MAX
    } else {
        macaulay_bound(prefix[t] as u64, t as u32).expect("small values cannot overflow")
    };
    let budget = (d - sum) as u64;
    let hi = grow_cap.min(budget) as u32;
    for h in 1..=hi {
        prefix.push(h);
        extend(prefix, sum + h, d, out);
        prefix.pop();
    }
}

/// The constrained count `O(p,n,k,d)`: O-sequences of multiplicity `d`,
/// socle degree at most `n`, whose entries match the `p`-variable polynomial
/// ring exactly through degree `k` (`h_i = C(p-1+i, i)` for `i ≤ k`, with
/// `h_i` read as 0 beyond the socle) and fall strictly below it afterwards
/// (`h_i < C(p-1+i, i)` for `k < i ≤ s`).
///
/// Boundary conventions follow from the definition with
/// `C(n, 0) = 1` and `C(n, m) = 0` for `n < m`: any negative parameter or
/// `d ≤ 0` gives 0, and `O(0, n, 0, 1) = 1`.
pub fn count_opnkd_oracle(p: i64, n: i64, k: i64, d: i64) -> Result<BigCount> {
    count_opnkd_oracle_with_cap(p, n, k, d, DEFAULT_ENUMERATION_CAP)
}

/// As [`count_opnkd_oracle`] with an explicit enumeration cap.
pub fn count_opnkd_oracle_with_cap(p: i64, n: i64, k: i64, d: i64, cap: u32) -> Result<BigCount> {
    if p < 0 || n < 0 || k < 0 || d <= 0 {
        return Ok(BigCount::ZERO);
    }
    if p == 0 {
        // Zero variables: only the empty ring's unit survives.
        let hit = k == 0 && d == 1;
        return Ok(if hit { BigCount::one() } else { BigCount::ZERO });
    }
    let seqs = enumerate_o_sequences_with_cap(d as u32, cap)?;
    let count = seqs
        .iter()
        .filter(|seq| in_constrained_set(seq, p, n, k))
        .count();
    Ok(BigCount::from(count))
}

fn in_constrained_set(seq: &OSequence, p: i64, n: i64, k: i64) -> bool {
    let s = seq.socle_degree() as i64;
    if s > n {
        return false;
    }
    // Equality through degree k; a sequence shorter than k has implicit
    // zeros there and fails unless the required value is itself 0.
    for i in 0..=k {
        let required = binomial_signed(p - 1 + i, i);
        let actual = if i <= s {
            seq.values()[i as usize] as u128
        } else {
            0
        };
        if actual != required {
            return false;
        }
    }
    // Strictly below the polynomial-ring values afterwards.
    for i in (k + 1)..=s {
        let ceiling = binomial_signed(p - 1 + i, i);
        if (seq.values()[i as usize] as u128) >= ceiling {
            return false;
        }
    }
    true
}

/// Exact partition numbers `p(0..=m)` by the pentagonal-number recurrence:
/// `p(m) = Σ_j (-1)^{j+1} [p(m - g_j) + p(m - g_{-j})]` with
/// `g_j = j(3j-1)/2`.
pub fn partition_numbers_up_to(m: u64) -> Vec<BigCount> {
    let m = m as usize;
    let mut table: Vec<BigCount> = Vec::with_capacity(m + 1);
    table.push(BigCount::one()); // p(0) = 1
    for target in 1..=m {
        let mut acc = BigCount::ZERO;
        let mut sub = BigCount::ZERO;
        let mut j = 1usize;
        loop {
            let g1 = j * (3 * j - 1) / 2;
            if g1 > target {
                break;
            }
            let g2 = j * (3 * j + 1) / 2;
            let positive = j % 2 == 1;
            for g in [g1, g2] {
                if g <= target {
                    if positive {
                        acc += &table[target - g];
                    } else {
                        sub += &table[target - g];
                    }
                }
            }
            j += 1;
        }
        // The recurrence never goes negative: p is the alternating sum of
        // strictly smaller partial sums, positive terms dominating.
        table.push(acc - sub);
    }
    table
}

/// The integer partition function `p(m)`, exact; `p(0) = 1`.
pub fn partition_number(m: u64) -> BigCount {
    partition_numbers_up_to(m).pop().expect("non-empty table")
}
