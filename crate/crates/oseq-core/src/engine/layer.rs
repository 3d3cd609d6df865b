//! Layers of truncated generating functions and the single-step recursion.
//!
//! Layer `p` holds one truncated series per pair `(n, k)` with
//! `0 ≤ k ≤ n < degree_cap`: its degree-`d` coefficient counts the
//! constrained sequences of multiplicity `d` whose socle degree is at most
//! `n`, whose first `k + 1` entries are maximal, and whose later entries are
//! strictly below maximal. Layer 1 is closed-form (`t^{k+1}` everywhere);
//! layer `p` is assembled from layer `p − 1` row by row with `n` ascending,
//! entries within a row being mutually independent.
//!
//! Two provable support bounds shape the storage: entry `(n, k)` of layer
//! `p` is zero below degree `C(p + k, k)` and above `C(p + n, n)`. Columns
//! whose floor exceeds the cap are dropped entirely, and the remaining
//! entries are banded to their window. All coefficients are non-negative,
//! so no cancellation can widen a window after the fact.

use rayon::prelude::*;

use super::coeff::Coeff;
use super::poly::{add_window, mul_acc_window, Band, TruncPoly};
use crate::combinatorics::binomial_capped;
use crate::error::{Error, Result};
use crate::BigCount;

/// One layer of the iteration: the triangle of entries `(n, k)`,
/// `0 ≤ k ≤ n < degree_cap`, as dense truncated polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layer {
    p: u32,
    degree_cap: u32,
    rows: Vec<Vec<TruncPoly>>,
}

impl Layer {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    /// Number of rows, equal to the degree cap (rows are `n = 0..cap`).
    pub fn num_rows(&self) -> u32 {
        self.rows.len() as u32
    }

    /// The series at `(n, k)`, or `None` outside the triangle.
    pub fn entry(&self, n: u32, k: u32) -> Option<&TruncPoly> {
        self.rows.get(n as usize)?.get(k as usize)
    }

    /// Coefficient of `t^d` in entry `(n, k)`; zero outside the triangle or
    /// beyond the cap.
    pub fn coeff(&self, n: u32, k: u32, d: u32) -> BigCount {
        self.entry(n, k)
            .and_then(|poly| poly.get(d))
            .cloned()
            .unwrap_or(BigCount::ZERO)
    }

    pub(crate) fn from_rows(p: u32, degree_cap: u32, rows: Vec<Vec<TruncPoly>>) -> Result<Layer> {
        if degree_cap == 0 {
            return Err(Error::Domain("degree cap must be at least 1".into()));
        }
        if rows.len() != degree_cap as usize {
            return Err(Error::Domain(format!(
                "layer with cap {} needs {} rows, got {}",
                degree_cap,
                degree_cap,
                rows.len()
            )));
        }
        for (n, row) in rows.iter().enumerate() {
            if row.len() != n + 1 {
                return Err(Error::Domain(format!(
                    "row {} needs {} entries, got {}",
                    n,
                    n + 1,
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|poly| poly.degree_cap() != degree_cap) {
                return Err(Error::Domain(format!(
                    "row {} holds an entry with cap {} in a layer with cap {}",
                    n,
                    bad.degree_cap(),
                    degree_cap
                )));
            }
        }
        Ok(Layer { p, degree_cap, rows })
    }
}

/// The first layer: entry `(n, k)` is `t^{k+1}` (truncation never bites,
/// since `k < degree_cap` inside the triangle).
pub fn init_layer_p1(degree_cap: u32) -> Result<Layer> {
    if degree_cap == 0 {
        return Err(Error::Domain("degree cap must be at least 1".into()));
    }
    let rows = (0..degree_cap)
        .map(|n| (0..=n).map(|k| TruncPoly::monomial(k + 1, degree_cap)).collect())
        .collect();
    Layer::from_rows(1, degree_cap, rows)
}

/// Advances the iteration by one layer: from the layer for `p` to the layer
/// for `p + 1`, at the same degree cap.
pub fn next_layer(prev: &Layer) -> Result<Layer> {
    let internal = LayerG::<BigCount>::from_public(prev);
    Ok(internal.step().to_public())
}

/// Largest `k < degree_cap` whose column floor `C(p + k, k)` still fits
/// under the cap; columns above it are identically zero after truncation.
pub(crate) fn kmax_for(p: u32, degree_cap: u32) -> u32 {
    let mut k = 0u32;
    while k + 1 < degree_cap && col_lo(p, k + 1, degree_cap).is_some() {
        k += 1;
    }
    k
}

/// Column floor `C(p + k, k)` as a degree, or `None` when it exceeds the cap.
pub(crate) fn col_lo(p: u32, k: u32, degree_cap: u32) -> Option<u32> {
    let cap = degree_cap as u64;
    let lo = binomial_capped((p + k) as u64, k as u64, cap + 1);
    (lo <= cap).then_some(lo as u32)
}

/// Row ceiling: `min(degree_cap, C(p + n, n))`.
pub(crate) fn row_hi(p: u32, n: u32, degree_cap: u32) -> u32 {
    let cap = degree_cap as u64;
    binomial_capped((p + n) as u64, n as u64, cap).min(cap) as u32
}

/// Internal banded layer, generic over the coefficient backend.
pub(crate) struct LayerG<C> {
    pub p: u32,
    pub degree_cap: u32,
    /// `rows[n][k]` for `k ≤ min(n, kmax of this layer)`.
    pub rows: Vec<Vec<Band<C>>>,
}

impl<C: Coeff> LayerG<C> {
    pub fn init_p1(degree_cap: u32) -> Result<Self> {
        if degree_cap == 0 {
            return Err(Error::Domain("degree cap must be at least 1".into()));
        }
        let one = C::from_big(&BigCount::from(1u32));
        let rows = (0..degree_cap)
            .map(|n| {
                (0..=n)
                    .map(|k| Band { lo: k + 1, c: vec![one.clone()] })
                    .collect()
            })
            .collect();
        Ok(LayerG { p: 1, degree_cap, rows })
    }

    /// Builds the layer for `p + 1`. Rows are filled with `n` ascending —
    /// entry `(n, k)` consumes same-layer rows below `n` — and the entries
    /// of a row are computed in parallel; the combination is associativity-
    /// free (exact integers, fixed summation order), so thread count cannot
    /// affect any coefficient.
    pub fn step(&self) -> LayerG<C> {
        let cap = self.degree_cap;
        let p_new = self.p + 1;
        let kmax_new = kmax_for(p_new, cap);
        let mut rows: Vec<Vec<Band<C>>> = Vec::with_capacity(cap as usize);
        for n in 0..cap {
            let hi = row_hi(p_new, n, cap);
            let kcap = n.min(kmax_new);
            let prev_row = &self.rows[n as usize];
            let new_row: Vec<Band<C>> = (0..kcap + 1)
                .into_par_iter()
                .map(|k| {
                    if k == 0 {
                        let mut acc = Band::with_window(1, hi);
                        for band in prev_row {
                            add_window(&mut acc, band.seg(), 1, hi);
                        }
                        acc.trim();
                        return acc;
                    }
                    let Some(lo) = col_lo(p_new, k, cap) else {
                        return Band::empty();
                    };
                    if lo > hi {
                        return Band::empty();
                    }
                    let mut acc = Band::with_window(lo, hi);
                    for i in k..=n {
                        let Some(a) = prev_row.get(i as usize) else {
                            break; // column pruned in the source layer, and so are all later ones
                        };
                        let b = &rows[(i - 1) as usize][(k - 1) as usize];
                        mul_acc_window(&mut acc, a.seg(), b.seg(), lo, hi);
                    }
                    acc.trim();
                    acc
                })
                .collect();
            rows.push(new_row);
        }
        LayerG { p: p_new, degree_cap: cap, rows }
    }

    /// Coefficient of `t^d` at `(n, k)` as a [`BigCount`]; zero when absent.
    pub fn coeff_big(&self, n: u32, k: u32, d: u32) -> BigCount {
        self.rows
            .get(n as usize)
            .and_then(|row| row.get(k as usize))
            .and_then(|band| band.coeff(d))
            .map(Coeff::to_big)
            .unwrap_or(BigCount::ZERO)
    }

    pub fn to_public(&self) -> Layer {
        let cap = self.degree_cap;
        let rows = (0..cap)
            .map(|n| {
                (0..=n)
                    .map(|k| {
                        let mut poly = TruncPoly::zero(cap);
                        if let Some(band) = self.rows[n as usize].get(k as usize) {
                            for (i, c) in band.c.iter().enumerate() {
                                if !c.is_zero() {
                                    poly.coeffs_mut()[band.lo as usize + i] = c.to_big();
                                }
                            }
                        }
                        poly
                    })
                    .collect()
            })
            .collect();
        Layer::from_rows(self.p, cap, rows).expect("internal layer has a valid triangle shape")
    }

    pub fn from_public(layer: &Layer) -> LayerG<C> {
        let rows = layer
            .rows
            .iter()
            .map(|row| row.iter().map(band_from_poly).collect())
            .collect();
        LayerG {
            p: layer.p,
            degree_cap: layer.degree_cap,
            rows,
        }
    }
}

fn band_from_poly<C: Coeff>(poly: &TruncPoly) -> Band<C> {
    let coeffs = poly.coeffs();
    let Some(first) = coeffs.iter().position(|c| c != &BigCount::ZERO) else {
        return Band::empty();
    };
    let last = coeffs.iter().rposition(|c| c != &BigCount::ZERO).unwrap();
    Band {
        lo: first as u32,
        c: coeffs[first..=last].iter().map(C::from_big).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_and_pruning() {
        // Floors against a cap of 10: C(2+k, k) = 1, 3, 6, 10, 15, …
        assert_eq!(col_lo(2, 0, 10), Some(1));
        assert_eq!(col_lo(2, 1, 10), Some(3));
        assert_eq!(col_lo(2, 3, 10), Some(10));
        assert_eq!(col_lo(2, 4, 10), None);
        assert_eq!(kmax_for(2, 10), 3);
        assert_eq!(kmax_for(1, 10), 9);
        // Ceilings: C(2+n, n) capped at 10.
        assert_eq!(row_hi(2, 0, 10), 1);
        assert_eq!(row_hi(2, 1, 10), 3);
        assert_eq!(row_hi(2, 3, 10), 10);
    }

    #[test]
    fn first_layer_shape() {
        let layer = init_layer_p1(5).unwrap();
        assert_eq!(layer.p(), 1);
        assert_eq!(layer.num_rows(), 5);
        for n in 0..5 {
            for k in 0..=n {
                let poly = layer.entry(n, k).unwrap();
                assert_eq!(poly, &TruncPoly::monomial(k + 1, 5));
            }
        }
        assert!(layer.entry(2, 3).is_none());
        assert_eq!(layer.coeff(3, 2, 3), BigCount::from(1u32));
        assert_eq!(layer.coeff(3, 2, 4), BigCount::ZERO);
    }

    #[test]
    fn second_layer_small_coefficients() {
        // Entry (n, 0) of layer 2 counts, by multiplicity, the sequences
        // (1, h_1, …) with socle degree ≤ n and every entry below the
        // maximal profile 1, 2, 3, …; hand-checkable for tiny n.
        let layer2 = next_layer(&init_layer_p1(6).unwrap()).unwrap();
        assert_eq!(layer2.p(), 2);
        // n = 0: only (1).
        assert_eq!(layer2.coeff(0, 0, 1), BigCount::from(1u32));
        assert_eq!(layer2.coeff(0, 0, 2), BigCount::ZERO);
        // n = 1, k = 0: (1) and (1,1); multiplicities 1 and 2.
        assert_eq!(layer2.coeff(1, 0, 1), BigCount::from(1u32));
        assert_eq!(layer2.coeff(1, 0, 2), BigCount::from(1u32));
        assert_eq!(layer2.coeff(1, 0, 3), BigCount::ZERO);
        // n = 1, k = 1: (1, 2) and longer prefixes stay below max afterwards;
        // within cap 6: (1,2) d=3, (1,2,…) forbidden since s ≤ 1.
        assert_eq!(layer2.coeff(1, 1, 3), BigCount::from(1u32));
        assert_eq!(layer2.coeff(1, 1, 4), BigCount::ZERO);
    }

    #[test]
    fn step_matches_public_roundtrip() {
        let l1 = init_layer_p1(8).unwrap();
        let l2 = next_layer(&l1).unwrap();
        let l3 = next_layer(&l2).unwrap();
        let internal = LayerG::<BigCount>::init_p1(8).unwrap().step().step();
        assert_eq!(internal.to_public(), l3);
    }
}
