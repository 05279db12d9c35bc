//! Numeric abstraction shared by weights, scale factors and estimates.
//!
//! Everything that multiplies a triangle count (sparsification scales, tuple
//! weights, the accumulator, query budgets) is generic over [`Scalar`], so the
//! same code runs on `f32`, `f64` or an exact rational such as
//! [`BigRational`](num_rational::BigRational).

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, ToPrimitive};

/// A number type usable as a weight or estimate.
pub trait Scalar:
    Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Converts a count. Panics only if the type cannot hold the value.
    fn from_count(c: u64) -> Self {
        Self::from_u64(c).expect("count not representable in scalar type")
    }

    /// `num / den` computed in the scalar type (exact for rationals).
    fn ratio(num: u64, den: u64) -> Self {
        Self::from_count(num) / Self::from_count(den)
    }

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("value not representable in scalar type")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `self^e` by repeated multiplication.
    fn powu(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl<T> Scalar for T where
    T: Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
}

/// `max(1, ⌈log₂ n⌉)`. Every logarithm in the estimators goes through this.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 2 {
        1
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::{BigRational, Ratio};

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 1);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(64), 6);
        assert_eq!(ceil_log2(65), 7);
        assert_eq!(ceil_log2(2048), 11);
    }

    #[test]
    fn ratio_is_exact_for_rationals() {
        let half: BigRational = Scalar::ratio(9, 2);
        assert_eq!(half, BigRational::new(9.into(), 2.into()));
        let r: Ratio<i64> = Scalar::ratio(9, 2);
        assert_eq!(r * Ratio::from_integer(2), Ratio::from_integer(9));
        assert_eq!(<f64 as Scalar>::ratio(9, 2), 4.5);
        assert_eq!(<f32 as Scalar>::ratio(9, 2), 4.5);
    }

    #[test]
    fn powu_matches_repeated_product() {
        assert_eq!(<f64 as Scalar>::from_count(9).powu(3), 729.0);
        let r: BigRational = Scalar::ratio(3, 2);
        assert_eq!(r.powu(2), BigRational::new(9.into(), 4.into()));
    }
}
