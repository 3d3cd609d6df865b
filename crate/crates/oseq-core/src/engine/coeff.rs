//! Coefficient abstraction for the convolution kernels.
//!
//! The engine is generic over the big-integer representation: the public API
//! speaks [`BigCount`] (`num_bigint::BigUint`), while the hot loop can run on
//! GMP integers (`rug::Integer`, feature `gmp`, default) whose fused
//! multiply-add avoids per-product allocations. Both backends are exact, so
//! they produce bit-identical counts; tests assert that.

use crate::BigCount;
use num_traits::Zero;

pub trait Coeff: Clone + PartialEq + Eq + Send + Sync + 'static {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    /// `self += rhs`
    fn add_assign_ref(&mut self, rhs: &Self);
    /// `self += a * b`
    fn add_mul(&mut self, a: &Self, b: &Self);
    fn from_big(x: &BigCount) -> Self;
    fn to_big(&self) -> BigCount;
}

impl Coeff for BigCount {
    fn zero() -> Self {
        BigCount::ZERO
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }

    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    fn from_big(x: &BigCount) -> Self {
        x.clone()
    }

    fn to_big(&self) -> BigCount {
        self.clone()
    }
}

#[cfg(feature = "gmp")]
impl Coeff for rug::Integer {
    fn zero() -> Self {
        rug::Integer::new()
    }

    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }

    fn add_mul(&mut self, a: &Self, b: &Self) {
        // Incomplete-computation form; lowers to mpz_addmul (no temporary).
        *self += a * b;
    }

    fn from_big(x: &BigCount) -> Self {
        rug::Integer::from_digits(&x.to_u64_digits(), rug::integer::Order::Lsf)
    }

    fn to_big(&self) -> BigCount {
        BigCount::new(self.to_digits::<u32>(rug::integer::Order::Lsf))
    }
}

/// Backend used by `run_iterative`. With the `gmp` feature this is GMP;
/// otherwise the portable pure-Rust representation.
#[cfg(feature = "gmp")]
pub(crate) type EngineCoeff = rug::Integer;
#[cfg(not(feature = "gmp"))]
pub(crate) type EngineCoeff = BigCount;

#[cfg(test)]
mod tests {
    use super::*;

    fn exercise<C: Coeff>() {
        let two = C::from_big(&BigCount::from(2u32));
        let three = C::from_big(&BigCount::from(3u32));
        let mut acc = C::zero();
        assert!(acc.is_zero());
        acc.add_mul(&two, &three);
        acc.add_assign_ref(&two);
        assert_eq!(acc.to_big(), BigCount::from(8u32));
        // Round-trip a value beyond one limb.
        let big = BigCount::from(u64::MAX) * BigCount::from(u64::MAX) + 7u32;
        assert_eq!(C::from_big(&big).to_big(), big);
    }

    #[test]
    fn biguint_backend() {
        exercise::<BigCount>();
    }

    #[cfg(feature = "gmp")]
    #[test]
    fn gmp_backend() {
        exercise::<rug::Integer>();
    }
}
