//! Checkers for the proven structural claims about the count sequences.
//!
//! Every check returns a [`PropertyVerdict`] whose witnesses pin down the
//! exact multiplicities where a claim fails; `holds` is true exactly when the
//! witness list is empty.  Integer comparisons are exact — floats appear only
//! where a claim is itself stated in logarithms.

use crate::calibrate::{least_squares, log_of_bigcount};
use crate::combinatorics::partition_numbers_up_to;
use crate::error::{Error, Result};
use crate::BigCount;

/// Default first multiplicity from which the ratio monotonicity claim holds.
pub const DEFAULT_RATIO_START: u32 = 12;

/// How a claim fails at a witnessed index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum WitnessKind {
    /// The claimed inequality or identity is violated outright.
    Violation,
    /// A strict inequality holds only with equality.
    Tie,
    /// The input is structurally unusable at this index (bad anchor value, or
    /// a difference that would be negative).
    Malformed,
}

impl std::fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WitnessKind::Violation => "violation",
            WitnessKind::Tie => "tie",
            WitnessKind::Malformed => "malformed",
        })
    }
}

/// A counterexample: the multiplicity `d` at which a check fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Witness {
    pub d: u32,
    pub kind: WitnessKind,
}

/// Outcome of one property check over an inclusive range of multiplicities.
///
/// `holds` is true exactly when `witnesses` is empty; witnesses are sorted by
/// multiplicity and deduplicated, so failures are reproducible byte for byte.
#[derive(Clone, Debug)]
pub struct PropertyVerdict {
    pub name: String,
    pub holds: bool,
    pub witnesses: Vec<Witness>,
    pub range_checked: (u32, u32),
}

impl PropertyVerdict {
    fn new(name: &str, range_checked: (u32, u32), mut witnesses: Vec<Witness>) -> Self {
        witnesses.sort();
        witnesses.dedup();
        PropertyVerdict {
            name: name.to_owned(),
            holds: witnesses.is_empty(),
            witnesses,
            range_checked,
        }
    }
}

/// Witnesses against `x` being sub-Fibonacci, with positions shifted by
/// `d_offset` so callers can report in their own indexing.
fn sub_fibonacci_witnesses(x: &[BigCount], d_offset: u32) -> Vec<Witness> {
    let one = BigCount::from(1u8);
    let mut w = Vec::new();
    for (k, anchor) in [(1u32, &x[0]), (2, &x[1])] {
        if *anchor != one {
            w.push(Witness {
                d: k + d_offset,
                kind: WitnessKind::Malformed,
            });
        }
    }
    for k in 2..=x.len() {
        if x[k - 1] < x[k - 2] {
            w.push(Witness {
                d: k as u32 + d_offset,
                kind: WitnessKind::Violation,
            });
        }
    }
    for k in 3..=x.len() {
        if x[k - 1] > &x[k - 2] + &x[k - 3] {
            w.push(Witness {
                d: k as u32 + d_offset,
                kind: WitnessKind::Violation,
            });
        }
    }
    w
}

/// Checks that a sequence is sub-Fibonacci: it starts `1, 1`, is
/// non-decreasing, and each later term is at most the sum of the previous two.
///
/// `x` is 1-based in spirit: `x[0]` is the first term, and witnesses report
/// the 1-based position of the offending term.
pub fn is_sub_fibonacci(x: &[BigCount]) -> PropertyVerdict {
    assert!(x.len() >= 3, "need at least three terms");
    PropertyVerdict::new(
        "sub_fibonacci",
        (1, x.len() as u32),
        sub_fibonacci_witnesses(x, 0),
    )
}

/// Checks the proven claims about the increment sequence: `A_d ≤ A_{d+1}` for
/// every `d > 2`, and `(A_3, A_4, …)` is sub-Fibonacci.
///
/// `a` is 1-based in `d`: `a[0]` holds `A_1`.  The sub-Fibonacci check's
/// non-decreasing component over the shifted sequence is exactly the
/// monotonicity claim, so one pass covers both; witnesses report `d` itself.
pub fn check_a_subfibonacci(a: &[BigCount]) -> PropertyVerdict {
    assert!(a.len() >= 6, "need increments up to d = 6 at least");
    let d_cap = a.len() as u32;
    PropertyVerdict::new(
        "a_monotone_sub_fibonacci",
        (3, d_cap),
        sub_fibonacci_witnesses(&a[2..], 2),
    )
}

/// Checks that consecutive ratios `O_d / O_{d−1}` strictly decrease for
/// `start ≤ d ≤ D`, via the exact cross-multiplied comparison
/// `O_d · O_{d−2} < O_{d−1}²` for every `start < d ≤ D` — no floating-point
/// division is involved.  Equality is reported as a [`WitnessKind::Tie`].
pub fn check_ratio_decreasing(o: &[BigCount], start: u32) -> PropertyVerdict {
    assert!(start >= 2, "ratios are defined from d = 2");
    let d_cap = o.len() as u32;
    assert!(d_cap > start, "need at least one comparison past start");
    let mut w = Vec::new();
    for d in (start + 1)..=d_cap {
        let lhs = &o[(d - 1) as usize] * &o[(d - 3) as usize];
        let rhs = &o[(d - 2) as usize] * &o[(d - 2) as usize];
        if lhs > rhs {
            w.push(Witness {
                d,
                kind: WitnessKind::Violation,
            });
        } else if lhs == rhs {
            w.push(Witness {
                d,
                kind: WitnessKind::Tie,
            });
        }
    }
    PropertyVerdict::new("ratio_strictly_decreasing", (start, d_cap), w)
}

/// Checks the partition-function sandwich on the counts for every `d ≥ 3`:
/// `p(d−1) ≤ O_d` with exact integers, and in logarithms
/// `ln O_d ≤ ½·ln(2d) + ln p(d) + √(2d)·ln d` with additive tolerance `1e-9`,
/// where `ln p(d)` comes from the exact partition numbers.
pub fn check_sz_sandwich(o: &[BigCount]) -> PropertyVerdict {
    const LOG_TOL: f64 = 1e-9;
    assert!(o.len() >= 3, "the sandwich is stated for d ≥ 3");
    let d_cap = o.len() as u32;
    let parts = partition_numbers_up_to(u64::from(d_cap));
    let mut w = Vec::new();
    for d in 3..=d_cap {
        let od = &o[(d - 1) as usize];
        if parts[(d - 1) as usize] > *od {
            w.push(Witness {
                d,
                kind: WitnessKind::Violation,
            });
            continue; // a count this small (possibly zero) has no usable logarithm
        }
        let lno = log_of_bigcount(od).expect("count is positive here");
        let lnp = log_of_bigcount(&parts[d as usize]).expect("partition numbers are positive");
        let df = f64::from(d);
        let rhs = 0.5 * (2.0 * df).ln() + lnp + (2.0 * df).sqrt() * df.ln();
        if lno > rhs + LOG_TOL {
            w.push(Witness {
                d,
                kind: WitnessKind::Violation,
            });
        }
    }
    PropertyVerdict::new("sz_sandwich", (3, d_cap), w)
}

/// Trend diagnostic for `ln(O_d)/d`.
#[derive(Clone, Debug)]
pub struct RobertsDiagnostic {
    /// `(d, ln(O_d)/d)` for every computed multiplicity.
    pub series: Vec<(u32, f64)>,
    /// `(d, (½·ln(2d) + ln p(d) + √(2d)·ln d)/d)` for `d ≥ 3` — the proven
    /// dominating curve for the series.
    pub envelope: Vec<(u32, f64)>,
    /// Smallest `C` with `envelope(d) ≤ C·ln(d)/√d` over the emitted range;
    /// the envelope, and with it the series, decays at least this fast.
    pub envelope_constant: f64,
    /// Least-squares slope of the series over the trailing quarter of the
    /// range — the sign summarizes the finite-data trend.
    pub trailing_slope: f64,
    pub trailing_d_lo: u32,
    pub trailing_d_hi: u32,
}

/// Emits `ln(O_d)/d` together with its trailing trend and dominating
/// envelope.  This is a finite-data diagnostic only: a negative trailing
/// slope is consistent with the series tending to zero but proves nothing
/// beyond the data.
pub fn roberts_diagnostic(o: &[BigCount]) -> RobertsDiagnostic {
    assert!(o.len() >= 4, "need at least four counts for a trailing trend");
    assert!(
        o.iter().all(|x| *x != BigCount::ZERO),
        "counts must be positive"
    );
    let d_cap = o.len() as u32;
    let series: Vec<(u32, f64)> = (1..=d_cap)
        .map(|d| {
            let lno = log_of_bigcount(&o[(d - 1) as usize]).expect("count is positive here");
            (d, lno / f64::from(d))
        })
        .collect();
    let parts = partition_numbers_up_to(u64::from(d_cap));
    let mut envelope = Vec::with_capacity(o.len() - 2);
    let mut envelope_constant = 0.0f64;
    for d in 3..=d_cap {
        let df = f64::from(d);
        let lnp = log_of_bigcount(&parts[d as usize]).expect("partition numbers are positive");
        let env = (0.5 * (2.0 * df).ln() + lnp + (2.0 * df).sqrt() * df.ln()) / df;
        envelope.push((d, env));
        envelope_constant = envelope_constant.max(env * df.sqrt() / df.ln());
    }
    let t_lo = (3 * d_cap / 4 + 1).min(d_cap - 1);
    let fit = least_squares(t_lo, d_cap, |d| series[(d - 1) as usize].1)
        .expect("trailing window always has two or more points");
    RobertsDiagnostic {
        series,
        envelope,
        envelope_constant,
        trailing_slope: fit.beta1,
        trailing_d_lo: t_lo,
        trailing_d_hi: d_cap,
    }
}

/// Runs every checker over a count table given as raw values: `o[i]` is
/// `O_{i+1}` and, when provided, `a[i]` is `A_{i+1}` (with `A_1 = 0` by
/// convention).  When `a` is absent the increments are derived from `o`, so
/// the difference-identity verdict can only fail through a decreasing `o`;
/// either way the increment checks are meaningful only when the identity
/// verdict holds.  Checks run sequentially in fixed order with ascending
/// witness indices, so reports are deterministic.
pub fn run_property_suite(
    o: &[BigCount],
    a: Option<&[BigCount]>,
    ratio_start: u32,
) -> Result<Vec<PropertyVerdict>> {
    let d_cap = o.len() as u32;
    let needed = ratio_start.max(5) + 1;
    if d_cap < needed {
        return Err(Error::Domain(format!(
            "property suite needs counts up to d = {needed}, got {d_cap}"
        )));
    }
    if let Some(a) = a {
        if a.len() != o.len() {
            return Err(Error::Domain(format!(
                "increment column has {} entries but counts have {}",
                a.len(),
                o.len()
            )));
        }
    }

    let mut identity_w = Vec::new();
    let owned_a: Vec<BigCount>;
    let a_vals: &[BigCount] = match a {
        Some(a) => {
            if a[0] != BigCount::ZERO {
                identity_w.push(Witness {
                    d: 1,
                    kind: WitnessKind::Malformed,
                });
            }
            for d in 2..=d_cap {
                let (i, j) = ((d - 1) as usize, (d - 2) as usize);
                if o[i] != &o[j] + &a[i] {
                    identity_w.push(Witness {
                        d,
                        kind: WitnessKind::Violation,
                    });
                }
            }
            a
        }
        None => {
            let mut acc = Vec::with_capacity(o.len());
            acc.push(BigCount::ZERO);
            for d in 2..=d_cap {
                let (i, j) = ((d - 1) as usize, (d - 2) as usize);
                if o[i] >= o[j] {
                    acc.push(&o[i] - &o[j]);
                } else {
                    identity_w.push(Witness {
                        d,
                        kind: WitnessKind::Malformed,
                    });
                    acc.push(BigCount::ZERO);
                }
            }
            owned_a = acc;
            &owned_a
        }
    };

    let mut o_subfib = is_sub_fibonacci(o);
    o_subfib.name = "o_sub_fibonacci".to_owned();
    Ok(vec![
        PropertyVerdict::new("o_a_difference_identity", (1, d_cap), identity_w),
        o_subfib,
        check_a_subfibonacci(a_vals),
        check_sz_sandwich(o),
        check_ratio_decreasing(o, ratio_start),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_iterative, CountTable, EngineOptions};

    fn counts(max_d: u32) -> CountTable {
        run_iterative(max_d, &EngineOptions::default()).unwrap()
    }

    fn big(v: &[u32]) -> Vec<BigCount> {
        v.iter().map(|&x| BigCount::from(x)).collect()
    }

    #[test]
    fn sub_fibonacci_edges() {
        assert!(is_sub_fibonacci(&big(&[1, 1, 2, 3, 5, 8])).holds);
        let v = is_sub_fibonacci(&big(&[1, 1, 3]));
        assert!(!v.holds);
        assert_eq!(
            v.witnesses,
            vec![Witness {
                d: 3,
                kind: WitnessKind::Violation
            }]
        );
        let v = is_sub_fibonacci(&big(&[2, 1, 1]));
        assert!(v
            .witnesses
            .iter()
            .any(|w| w.d == 1 && w.kind == WitnessKind::Malformed));
    }

    #[test]
    fn engine_counts_satisfy_every_claim() {
        let t = counts(40);
        let verdicts =
            run_property_suite(t.o_values(), Some(t.a_values()), DEFAULT_RATIO_START).unwrap();
        assert_eq!(verdicts.len(), 5);
        for v in &verdicts {
            assert!(v.holds, "{} fails with witnesses {:?}", v.name, v.witnesses);
        }
    }

    #[test]
    fn early_ratios_violate_and_tie() {
        let t = counts(14);
        let v = check_ratio_decreasing(t.o_values(), 2);
        assert!(!v.holds);
        let has = |d, kind| v.witnesses.contains(&Witness { d, kind });
        assert!(has(3, WitnessKind::Violation));
        assert!(has(5, WitnessKind::Violation));
        assert!(has(8, WitnessKind::Tie));
        assert!(has(9, WitnessKind::Tie));
        assert!(check_ratio_decreasing(t.o_values(), DEFAULT_RATIO_START).holds);
    }

    #[test]
    fn sandwich_flags_tampered_counts() {
        let t = counts(12);
        assert!(check_sz_sandwich(t.o_values()).holds);
        let mut o = t.o_values().to_vec();
        o[4] = BigCount::from(1u8); // five partitions of 4, so the left side fails
        let v = check_sz_sandwich(&o);
        assert!(!v.holds);
        assert!(v.witnesses.contains(&Witness {
            d: 5,
            kind: WitnessKind::Violation
        }));
        o[4] = BigCount::ZERO;
        assert!(!check_sz_sandwich(&o).holds);
    }

    #[test]
    fn single_increments_are_caught() {
        let t = counts(60);
        let clean =
            run_property_suite(t.o_values(), Some(t.a_values()), DEFAULT_RATIO_START).unwrap();
        assert!(clean.iter().all(|v| v.holds));
        for &d in &[2u32, 3, 5, 8, 13, 21, 34, 40, 47, 60] {
            let mut o = t.o_values().to_vec();
            o[(d - 1) as usize] += 1u32;
            let verdicts =
                run_property_suite(&o, Some(t.a_values()), DEFAULT_RATIO_START).unwrap();
            assert!(
                verdicts.iter().any(|v| !v.holds),
                "mutation at d = {d} went unnoticed"
            );
        }
    }

    #[test]
    fn growth_diagnostic_shape() {
        let t = counts(60);
        let diag = roberts_diagnostic(t.o_values());
        assert_eq!(diag.series[0], (1, 0.0));
        for &(d, env) in &diag.envelope {
            let s = diag.series[(d - 1) as usize].1;
            assert!(s <= env + 1e-12, "series above envelope at d = {d}");
            let df = f64::from(d);
            assert!(env <= diag.envelope_constant * df.ln() / df.sqrt() + 1e-12);
        }
        assert!(diag.trailing_slope < 0.0);
        assert_eq!((diag.trailing_d_lo, diag.trailing_d_hi), (46, 60));
    }
}
