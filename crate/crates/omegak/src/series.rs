//! Exact arithmetic on degree-truncated Poincaré series.
//!
//! A series records the graded dimension of an algebra over the two-element
//! field in each degree up to a working degree `N`. Coefficients are
//! arbitrary-precision integers so partition-like counts can never overflow.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::pattern::DegreePattern;
use crate::presentation::AlgebraKind;
use crate::{Error, Result};

/// Graded dimensions in degrees `0..=N`; `coeffs[d]` is the dimension in
/// degree `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoincareSeries {
    coeffs: Vec<BigUint>,
}

impl PoincareSeries {
    /// The series of the ground field: 1 in degree 0.
    pub fn unit(n: u64) -> Self {
        let mut coeffs = vec![BigUint::zero(); n as usize + 1];
        coeffs[0] = BigUint::one();
        PoincareSeries { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<BigUint>) -> Self {
        assert!(!coeffs.is_empty());
        PoincareSeries { coeffs }
    }

    pub fn truncation(&self) -> u64 {
        (self.coeffs.len() - 1) as u64
    }

    pub fn coeff(&self, d: u64) -> &BigUint {
        &self.coeffs[d as usize]
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    /// First degree where the two series differ, if any.
    pub fn first_difference(&self, other: &Self) -> Option<u64> {
        let n = self.coeffs.len().min(other.coeffs.len());
        (0..n).find(|&d| self.coeffs[d] != other.coeffs[d]).map(|d| d as u64)
    }

    /// Cauchy product truncated at the common working degree.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.coeffs.len() != other.coeffs.len() {
            return Err(Error::Series(format!(
                "mismatched truncation degrees {} and {}",
                self.truncation(),
                other.truncation()
            )));
        }
        let n = self.coeffs.len();
        let mut out = vec![BigUint::zero(); n];
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                let prod = &self.coeffs[i] * &other.coeffs[j];
                out[i + j] += prod;
            }
        }
        Ok(PoincareSeries { coeffs: out })
    }

    /// Multiply in place by `1 + t^d + t^{2d} + … + t^{(h-1)·d}`; `h = 0`
    /// means the full geometric series `1/(1 - t^d)`.
    fn mul_cyclotomic_like(&mut self, d: u64, h: u64) {
        let n = self.coeffs.len() as u64;
        debug_assert!(d >= 1);
        if d >= n {
            // The factor only contributes its constant term 1 below the
            // truncation degree.
            return;
        }
        if h == 0 {
            // Geometric: new[k] = old[k] + new[k - d].
            for k in d..n {
                let prev = self.coeffs[(k - d) as usize].clone();
                self.coeffs[k as usize] += prev;
            }
        } else {
            // Finite: new[k] = sum_{j < h, j*d <= k} old[k - j*d], computed
            // back to front so reads see old values.
            for k in (0..n).rev() {
                let mut acc = self.coeffs[k as usize].clone();
                let mut j = 1;
                while j < h && j * d <= k {
                    acc += self.coeffs[(k - j * d) as usize].clone();
                    j += 1;
                }
                self.coeffs[k as usize] = acc;
            }
        }
    }

    /// Long division: the series `q` with `q·b = a` through the working
    /// degree, or an error naming the first degree where the division
    /// produces a negative coefficient.
    pub fn exact_divide(&self, b: &Self) -> Result<Self> {
        if self.coeffs.len() != b.coeffs.len() {
            return Err(Error::Series(format!(
                "mismatched truncation degrees {} and {}",
                self.truncation(),
                b.truncation()
            )));
        }
        if !b.coeffs[0].is_one() {
            return Err(Error::Series(
                "division requires the divisor's degree-0 coefficient to be 1".into(),
            ));
        }
        let n = self.coeffs.len();
        let mut q = vec![BigUint::zero(); n];
        for k in 0..n {
            // q[k] = a[k] - sum_{j=1..=k} b[j] * q[k-j]
            let mut sub = BigUint::zero();
            for j in 1..=k {
                if !b.coeffs[j].is_zero() {
                    sub += &b.coeffs[j] * &q[k - j];
                }
            }
            if sub > self.coeffs[k] {
                return Err(Error::Series(format!(
                    "division fails at degree {k}: coefficient would be negative"
                )));
            }
            q[k] = &self.coeffs[k] - sub;
        }
        Ok(PoincareSeries { coeffs: q })
    }

    /// First degree where `self` has a strictly larger coefficient than
    /// `other`, regardless of how the series compare elsewhere.
    pub fn first_coeff_above(&self, other: &Self) -> Option<u64> {
        let n = self.coeffs.len().min(other.coeffs.len());
        (0..n).find(|&d| self.coeffs[d] > other.coeffs[d]).map(|d| d as u64)
    }

    /// Degreewise `self >= other`, with strict inequality somewhere; returns
    /// the first strict degree, or None if the series are equal or ever
    /// fall below.
    pub fn first_strict_excess(&self, other: &Self) -> Option<u64> {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut strict = None;
        for d in 0..n {
            if self.coeffs[d] < other.coeffs[d] {
                return None;
            }
            if strict.is_none() && self.coeffs[d] > other.coeffs[d] {
                strict = Some(d as u64);
            }
        }
        strict
    }
}

/// Series of one Borel factor family: the product over member degrees
/// `d <= N` of the single-generator factor for `kind`.
pub fn family_series(kind: AlgebraKind, pattern: &DegreePattern, n: u64) -> Result<PoincareSeries> {
    pattern.validate()?;
    let mut s = PoincareSeries::unit(n);
    for d in pattern.members_up_to(n) {
        match kind {
            AlgebraKind::Polynomial => s.mul_cyclotomic_like(d, 0),
            AlgebraKind::Exterior => s.mul_cyclotomic_like(d, 2),
            AlgebraKind::Truncated(h) => s.mul_cyclotomic_like(d, h as u64),
            AlgebraKind::DividedPower => {
                // Exterior on the divided-power basis elements at d * 2^j.
                let mut dd = d;
                while dd <= n {
                    s.mul_cyclotomic_like(dd, 2);
                    match dd.checked_mul(2) {
                        Some(next) => dd = next,
                        None => break,
                    }
                }
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::DegreePattern;

    fn nums(s: &PoincareSeries) -> Vec<u64> {
        s.coeffs().iter().map(|c| u64::try_from(c).unwrap()).collect()
    }

    fn rc(m: u64, r: u64) -> DegreePattern {
        DegreePattern::residue_class(m, r).unwrap()
    }

    #[test]
    fn binomial_square() {
        let e = family_series(AlgebraKind::Exterior, &DegreePattern::Single(1), 2).unwrap();
        let sq = e.mul(&e).unwrap();
        assert_eq!(nums(&sq), vec![1, 2, 1]);
    }

    #[test]
    fn unit_is_identity() {
        let p = family_series(AlgebraKind::Polynomial, &rc(1, 1), 6).unwrap();
        assert_eq!(p.mul(&PoincareSeries::unit(6)).unwrap(), p);
    }

    #[test]
    fn exterior_times_polynomial_all_ones() {
        // E(x_1) x P(x_2): basis x_1^e x_2^k, one element in every degree.
        let e = family_series(AlgebraKind::Exterior, &DegreePattern::Single(1), 8).unwrap();
        let p = family_series(AlgebraKind::Polynomial, &DegreePattern::Single(2), 8).unwrap();
        assert_eq!(nums(&e.mul(&p).unwrap()), vec![1; 9]);
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = family_series(AlgebraKind::Polynomial, &rc(2, 1), 12).unwrap();
        let b = family_series(AlgebraKind::Exterior, &rc(3, 2), 12).unwrap();
        let prod = a.mul(&b).unwrap();
        assert_eq!(prod.exact_divide(&b).unwrap(), a);
        assert_eq!(prod.exact_divide(&a).unwrap(), b);
    }

    #[test]
    fn division_failure_is_detected() {
        // (1 + t^2) / (1 + t) goes negative in degree 2.
        let a = family_series(AlgebraKind::Exterior, &DegreePattern::Single(2), 4).unwrap();
        let b = family_series(AlgebraKind::Exterior, &DegreePattern::Single(1), 4).unwrap();
        assert!(a.exact_divide(&b).is_err());
    }

    #[test]
    fn polynomial_on_single_generator_splits_off_exterior() {
        // P(x) = E(x) x P(x^2) at the level of graded dimensions.
        let p1 = family_series(AlgebraKind::Polynomial, &DegreePattern::Single(1), 10).unwrap();
        let e1 = family_series(AlgebraKind::Exterior, &DegreePattern::Single(1), 10).unwrap();
        let p2 = family_series(AlgebraKind::Polynomial, &DegreePattern::Single(2), 10).unwrap();
        assert_eq!(p1.exact_divide(&e1).unwrap(), p2);
    }

    #[test]
    fn truncated_height_four_basis() {
        let t = family_series(AlgebraKind::Truncated(4), &DegreePattern::Single(1), 5).unwrap();
        assert_eq!(nums(&t), vec![1, 1, 1, 1, 0, 0]);
    }

    #[test]
    fn polynomial_on_all_degrees_counts_partitions() {
        let p = family_series(AlgebraKind::Polynomial, &rc(1, 1), 4).unwrap();
        assert_eq!(nums(&p), vec![1, 1, 2, 3, 5]);
    }

    #[test]
    fn divided_power_single_degree_two() {
        let g = family_series(AlgebraKind::DividedPower, &DegreePattern::Single(2), 8).unwrap();
        assert_eq!(nums(&g), vec![1, 0, 1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn divided_power_matches_exterior_on_doubling_ladder() {
        let g = family_series(AlgebraKind::DividedPower, &DegreePattern::Single(3), 30).unwrap();
        let mut e = PoincareSeries::unit(30);
        for d in [3u64, 6, 12, 24] {
            let f = family_series(AlgebraKind::Exterior, &DegreePattern::Single(d), 30).unwrap();
            e = e.mul(&f).unwrap();
        }
        assert_eq!(g, e);
    }

    #[test]
    fn truncated_equals_exterior_ladder() {
        // TP_4(x_d) = E(x_d) x E(x_2d) at series level.
        for d in 1..=4u64 {
            let t =
                family_series(AlgebraKind::Truncated(4), &DegreePattern::Single(d), 16).unwrap();
            let e1 = family_series(AlgebraKind::Exterior, &DegreePattern::Single(d), 16).unwrap();
            let e2 =
                family_series(AlgebraKind::Exterior, &DegreePattern::Single(2 * d), 16).unwrap();
            assert_eq!(t, e1.mul(&e2).unwrap());
        }
    }

    #[test]
    fn mismatched_truncations_are_usage_errors() {
        let a = PoincareSeries::unit(4);
        let b = PoincareSeries::unit(5);
        assert!(a.mul(&b).is_err());
        assert!(a.exact_divide(&b).is_err());
    }
}
