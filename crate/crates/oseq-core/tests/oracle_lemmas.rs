//! Exhaustive small-range checks of the counting identities, run directly on
//! the brute-force oracle.  These pin down the combinatorial facts the engine
//! relies on, independently of the engine itself.

mod common;

use common::Memo;
use oseq_core::combinatorics::{
    binomial_expansion, count_opnkd_oracle, enumerate_o_sequences, macaulay_bound,
};
use oseq_core::BigCount;

#[test]
fn expansion_round_trip() {
    for a in 1..=500u64 {
        for t in 1..=12u32 {
            let e = binomial_expansion(a, t).unwrap();
            assert_eq!(e.reconstruct(), a, "a = {a}, t = {t}");
            for w in e.terms.windows(2) {
                assert!(w[0].0 > w[1].0, "upper indices must strictly decrease");
                assert!(w[0].1 > w[1].1, "lower indices must strictly decrease");
            }
            let (kj, j) = *e.terms.last().unwrap();
            assert!(j >= 1 && kj >= u64::from(j), "tail term must satisfy k(j) ≥ j ≥ 1");
        }
    }
}

#[test]
fn macaulay_bound_is_monotone() {
    for t in 1..=10u32 {
        for a in 1..200u64 {
            assert!(
                macaulay_bound(a, t).unwrap() <= macaulay_bound(a + 1, t).unwrap(),
                "a = {a}, t = {t}"
            );
        }
    }
}

#[test]
fn increment_counts_match_tail_filter() {
    // O_d − O_{d−1} must equal the number of multiplicity-d sequences whose
    // last entry is at least 2.
    for d in 2..=14u32 {
        let cur = enumerate_o_sequences(d).unwrap();
        let prev = enumerate_o_sequences(d - 1).unwrap();
        let ending_high = cur.iter().filter(|s| s.last() >= 2).count();
        assert_eq!(cur.len() - prev.len(), ending_high, "d = {d}");
    }
}

#[test]
fn counts_grow_with_multiplicity_on_stable_rows() {
    let mut memo = Memo::new();
    for p in 2..=5i64 {
        for d in 3..=12i64 {
            for n in (d - 1)..=10 {
                for k in 1..=10i64 {
                    assert!(
                        memo.get(p, n, k, d) >= memo.get(p, n, k, d - 1),
                        "p={p} n={n} k={k} d={d}"
                    );
                }
            }
        }
    }
}

#[test]
fn counts_grow_with_socle_bound() {
    let mut memo = Memo::new();
    for p in 0..=5i64 {
        for n in 0..=10i64 {
            for k in 0..=10i64 {
                for d in 1..=12i64 {
                    assert!(
                        memo.get(p, n, k, d) >= memo.get(p, n - 1, k, d),
                        "p={p} n={n} k={k} d={d}"
                    );
                }
            }
        }
    }
}

#[test]
fn full_prefix_at_top_degree_is_impossible() {
    let mut memo = Memo::new();
    for p in 2..=5i64 {
        for n in 0..=10i64 {
            for d in 2..=12i64 {
                assert_eq!(
                    memo.get(p, n, d - 1, d),
                    BigCount::ZERO,
                    "p={p} n={n} d={d}"
                );
            }
        }
    }
    // The spelled-out instance: three variables, multiplicity ten.
    assert_eq!(count_opnkd_oracle(3, 9, 9, 10).unwrap(), BigCount::ZERO);
}

#[test]
fn counts_vanish_beyond_prefix_window() {
    let mut memo = Memo::new();
    for p in 0..=5i64 {
        for n in 0..=10i64 {
            for k in 0..=10i64 {
                for d in 1..=12i64 {
                    if k > n.min(d - 1) {
                        assert_eq!(memo.get(p, n, k, d), BigCount::ZERO, "p={p} n={n} k={k} d={d}");
                    }
                }
            }
        }
    }
}

#[test]
fn rows_stabilize_at_multiplicity() {
    let mut memo = Memo::new();
    for p in 0..=5i64 {
        for d in 1..=12i64 {
            for n in (d - 1).max(0)..=10 {
                for k in 0..=10i64 {
                    assert_eq!(
                        memo.get(p, n, k, d),
                        memo.get(p, d - 1, k, d),
                        "p={p} n={n} k={k} d={d}"
                    );
                }
            }
        }
    }
}

#[test]
fn row_zero_aggregates_previous_layer() {
    let mut memo = Memo::new();
    for p in 2..=5i64 {
        for n in 0..=10i64 {
            for d in 1..=12i64 {
                let mut sum = BigCount::ZERO;
                for k in 0..=(d - 1) {
                    sum += memo.get(p - 1, n, k, d);
                }
                assert_eq!(memo.get(p, n, 0, d), sum, "p={p} n={n} d={d}");
            }
        }
    }
}

#[test]
fn recursion_matches_oracle() {
    // From the second layer up; the first layer is the closed-form base case.
    let mut memo = Memo::new();
    for p in 2..=4i64 {
        for n in 1..=8i64 {
            for k in 1..=n {
                for d in 1..=10i64 {
                    let mut sum = BigCount::ZERO;
                    for i in k..=n {
                        for j in 1..=(d - 1) {
                            let left = memo.get(p - 1, n, i, d - j);
                            if left == BigCount::ZERO {
                                continue;
                            }
                            sum += left * memo.get(p, i - 1, k - 1, j);
                        }
                    }
                    assert_eq!(memo.get(p, n, k, d), sum, "p={p} n={n} k={k} d={d}");
                }
            }
        }
    }
}
