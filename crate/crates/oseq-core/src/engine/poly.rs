//! Truncated polynomials and the exact convolution kernel.
//!
//! The public [`TruncPoly`] is a dense coefficient vector over [`BigCount`],
//! indexed by degree `0..=degree_cap`. Internally the engine stores the same
//! polynomials banded — a window `[lo, lo+len)` of coefficients with implicit
//! zeros outside — because layer entries have provably empty heads and tails
//! and dense zero-padding would dominate memory at large caps. The banding is
//! pure storage layout: coefficient semantics are identical.

use super::coeff::Coeff;
use crate::error::{Error, Result};
use crate::BigCount;

/// Dense truncated polynomial: `coeffs[d]` is the coefficient of `t^d`,
/// `0 ≤ d ≤ degree_cap`. Exact big-integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncPoly {
    coeffs: Vec<BigCount>,
}

impl TruncPoly {
    /// The zero polynomial truncated at `degree_cap`.
    pub fn zero(degree_cap: u32) -> Self {
        TruncPoly {
            coeffs: vec![BigCount::ZERO; degree_cap as usize + 1],
        }
    }

    /// `t^degree`, or the zero polynomial when `degree > degree_cap`.
    pub fn monomial(degree: u32, degree_cap: u32) -> Self {
        let mut poly = TruncPoly::zero(degree_cap);
        if degree <= degree_cap {
            poly.coeffs[degree as usize] = BigCount::from(1u32);
        }
        poly
    }

    /// Wraps an explicit coefficient vector; the cap is `len - 1`.
    pub fn from_coeffs(coeffs: Vec<BigCount>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("a truncated polynomial needs at least the degree-0 coefficient".into()));
        }
        Ok(TruncPoly { coeffs })
    }

    pub fn degree_cap(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    /// Coefficient of `t^d`; panics beyond the cap (see [`TruncPoly::get`]).
    pub fn coeff(&self, d: u32) -> &BigCount {
        &self.coeffs[d as usize]
    }

    /// Coefficient of `t^d`, `None` beyond the cap.
    pub fn get(&self, d: u32) -> Option<&BigCount> {
        self.coeffs.get(d as usize)
    }

    pub fn coeffs(&self) -> &[BigCount] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [BigCount] {
        &mut self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c == &BigCount::ZERO)
    }
}

/// Truncated product: coefficient `m` of the result is
/// `Σ_{i+j=m} a_i b_j` for every `m ≤ degree_cap`; higher degrees are
/// discarded. Zero coefficients of either factor are skipped. Errors if the
/// inputs are not truncated at `degree_cap`.
pub fn poly_mul_trunc(a: &TruncPoly, b: &TruncPoly, degree_cap: u32) -> Result<TruncPoly> {
    if a.degree_cap() != degree_cap || b.degree_cap() != degree_cap {
        return Err(Error::Domain(format!(
            "mismatched degree caps: {} and {} with target {}",
            a.degree_cap(),
            b.degree_cap(),
            degree_cap
        )));
    }
    let mut acc = Band::<BigCount>::with_window(0, degree_cap);
    mul_acc_window(
        &mut acc,
        Seg { lo: 0, c: a.coeffs() },
        Seg { lo: 0, c: b.coeffs() },
        0,
        degree_cap,
    );
    Ok(TruncPoly { coeffs: acc.c })
}

/// Banded coefficient storage: `c[i]` is the coefficient of `t^(lo+i)`,
/// implicit zeros elsewhere. An empty `c` is the zero polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Band<C> {
    pub lo: u32,
    pub c: Vec<C>,
}

impl<C: Coeff> Band<C> {
    pub fn empty() -> Self {
        Band { lo: 0, c: Vec::new() }
    }

    /// Zero-filled window `lo..=hi`.
    pub fn with_window(lo: u32, hi: u32) -> Self {
        debug_assert!(lo <= hi);
        Band {
            lo,
            c: vec![C::zero(); (hi - lo + 1) as usize],
        }
    }

    pub fn coeff(&self, d: u32) -> Option<&C> {
        if d < self.lo {
            return None;
        }
        self.c.get((d - self.lo) as usize)
    }

    pub fn seg(&self) -> Seg<'_, C> {
        Seg { lo: self.lo, c: &self.c }
    }

    /// Drops trailing zeros (and the whole allocation if everything is zero).
    pub fn trim(&mut self) {
        while self.c.last().map(Coeff::is_zero).unwrap_or(false) {
            self.c.pop();
        }
        if self.c.is_empty() {
            self.lo = 0;
            self.c = Vec::new();
        } else {
            self.c.shrink_to_fit();
        }
    }

    /// Splits off the coefficients of degree ≥ `at` into their own band,
    /// leaving `self` with degrees < `at`. Both sides are trimmed.
    pub fn split_off(&mut self, at: u32) -> Band<C> {
        let mut tail = if at <= self.lo {
            std::mem::replace(self, Band::empty())
        } else {
            let idx = (at - self.lo) as usize;
            if idx >= self.c.len() {
                Band::empty()
            } else {
                Band { lo: at, c: self.c.split_off(idx) }
            }
        };
        self.trim();
        tail.trim();
        tail
    }
}

/// Borrowed view of a coefficient run starting at degree `lo`.
pub(crate) struct Seg<'a, C> {
    pub lo: u32,
    pub c: &'a [C],
}

// Derives would demand `C: Copy`; the fields are a `u32` and a shared
// reference, so the view itself is always copyable.
impl<C> Clone for Seg<'_, C> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<C> Copy for Seg<'_, C> {}

impl<'a, C> Seg<'a, C> {
    fn hi(&self) -> Option<u32> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.lo + (self.c.len() - 1) as u32)
        }
    }
}

/// `acc[d] += a[d]` for every `d` in `win_lo..=win_hi` (intersected with
/// `a`'s stored run). The window must lie inside `acc`'s allocation.
pub(crate) fn add_window<C: Coeff>(acc: &mut Band<C>, a: Seg<'_, C>, win_lo: u32, win_hi: u32) {
    let Some(a_hi) = a.hi() else { return };
    let lo = win_lo.max(a.lo);
    let hi = win_hi.min(a_hi);
    if lo > hi {
        return;
    }
    let src = &a.c[(lo - a.lo) as usize..=(hi - a.lo) as usize];
    let dst = &mut acc.c[(lo - acc.lo) as usize..];
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            d.add_assign_ref(s);
        }
    }
}

/// `acc[e+f] += a_e * b_f` over all pairs with `win_lo ≤ e+f ≤ win_hi`,
/// skipping zero coefficients of `a` (outer) and `b` (inner). Pairs outside
/// the window are not accumulated: callers choose windows that provably
/// contain every needed product (coefficients are non-negative, so omitted
/// degrees must be either genuinely zero or intentionally excluded).
pub(crate) fn mul_acc_window<C: Coeff>(
    acc: &mut Band<C>,
    a: Seg<'_, C>,
    b: Seg<'_, C>,
    win_lo: u32,
    win_hi: u32,
) {
    let Some(b_hi) = b.hi() else { return };
    if a.c.is_empty() {
        return;
    }
    debug_assert!(acc.lo <= win_lo);
    debug_assert!(win_lo > win_hi || ((win_hi - acc.lo) as usize) < acc.c.len());
    for (ei, av) in a.c.iter().enumerate() {
        if av.is_zero() {
            continue;
        }
        let e = a.lo + ei as u32;
        if e > win_hi {
            break;
        }
        let f_lo = win_lo.saturating_sub(e).max(b.lo);
        let f_hi = (win_hi - e).min(b_hi);
        if f_lo > f_hi {
            continue;
        }
        let bs = &b.c[(f_lo - b.lo) as usize..=(f_hi - b.lo) as usize];
        let off = (e + f_lo - acc.lo) as usize;
        let dst = &mut acc.c[off..off + bs.len()];
        for (d, bv) in dst.iter_mut().zip(bs) {
            if !bv.is_zero() {
                d.add_mul(av, bv);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(coeffs: &[u64], cap: u32) -> TruncPoly {
        let mut p = TruncPoly::zero(cap);
        for (d, &v) in coeffs.iter().enumerate() {
            p.coeffs_mut()[d] = BigCount::from(v);
        }
        p
    }

    #[test]
    fn monomial_times_monomial() {
        let t = TruncPoly::monomial(1, 4);
        let sq = poly_mul_trunc(&t, &t, 4).unwrap();
        assert_eq!(sq, TruncPoly::monomial(2, 4));
    }

    #[test]
    fn truncation_drops_high_degrees() {
        // (t + t^2)^2 = t^2 + 2t^3 + t^4, truncated at 3.
        let p = poly(&[0, 1, 1], 3);
        let sq = poly_mul_trunc(&p, &p, 3).unwrap();
        assert_eq!(sq, poly(&[0, 0, 1, 2], 3));
    }

    #[test]
    fn zero_annihilates() {
        let z = TruncPoly::zero(5);
        let p = poly(&[3, 1, 4, 1, 5, 9], 5);
        assert_eq!(poly_mul_trunc(&z, &p, 5).unwrap(), z);
        assert_eq!(poly_mul_trunc(&p, &z, 5).unwrap(), z);
    }

    #[test]
    fn cap_mismatch_rejected() {
        let a = TruncPoly::zero(3);
        let b = TruncPoly::zero(4);
        assert!(poly_mul_trunc(&a, &b, 3).is_err());
        assert!(poly_mul_trunc(&a, &a, 4).is_err());
    }

    #[test]
    fn band_split() {
        let mut b = Band::<BigCount> {
            lo: 3,
            c: (0u32..5).map(BigCount::from).collect(), // degrees 3..=7: 0,1,2,3,4
        };
        let tail = b.split_off(5);
        assert_eq!(b.lo, 3);
        assert_eq!(b.c, vec![BigCount::ZERO, BigCount::from(1u32)]);
        assert_eq!(tail.lo, 5);
        assert_eq!(tail.c.len(), 3);
    }

    /// Reference full product followed by truncation.
    fn naive_mul(a: &[BigCount], b: &[BigCount], cap: usize) -> Vec<BigCount> {
        let mut out = vec![BigCount::ZERO; cap + 1];
        for (i, av) in a.iter().enumerate() {
            for (j, bv) in b.iter().enumerate() {
                if i + j <= cap {
                    out[i + j] += av * bv;
                }
            }
        }
        out
    }

    proptest! {
        #[test]
        fn matches_naive_product(
            cap in 0u32..=64,
            a in proptest::collection::vec(proptest::arbitrary::any::<u128>(), 1..=65),
            b in proptest::collection::vec(proptest::arbitrary::any::<u128>(), 1..=65),
        ) {
            let clip = |v: Vec<u128>| -> Vec<BigCount> {
                let mut c: Vec<BigCount> = v.into_iter().map(BigCount::from).collect();
                c.truncate(cap as usize + 1);
                c.resize(cap as usize + 1, BigCount::ZERO);
                c
            };
            let (a, b) = (clip(a), clip(b));
            let pa = TruncPoly::from_coeffs(a.clone()).unwrap();
            let pb = TruncPoly::from_coeffs(b.clone()).unwrap();
            let got = poly_mul_trunc(&pa, &pb, cap).unwrap();
            prop_assert_eq!(got.coeffs(), &naive_mul(&a, &b, cap as usize)[..]);
        }
    }
}
