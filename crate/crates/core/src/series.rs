//! Truncated power series arithmetic over complex coefficients.
//!
//! A [`TruncatedSeries`] represents `w^lead · (c0 + c1 w + … + cN w^N)`,
//! exact modulo `O(w^{lead+N+1})`. The fractional lead exponent supports
//! exactly one level: shapes like `w^α · Σ aₙ wⁿ` are representable, nested
//! fractional powers are rejected. No coefficient is ever flushed to zero;
//! tolerances belong to comparisons, not to the algebra.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("lead exponents differ: {0} vs {1}")]
    LeadMismatch(f64, f64),
    #[error("constant term must vanish")]
    NonzeroConstant,
    #[error("constant term must be nonzero")]
    ZeroConstant,
    #[error("fractional lead exponent not allowed here")]
    FractionalLead,
    #[error("linear coefficient must be nonzero: series is not locally invertible")]
    NotInvertible,
    #[error("Laurent index {0} outside window [{1}, {2}]")]
    LaurentIndex(i64, i64, i64),
}

/// `w^lead · Σ_{n=0..N} coeffs[n] · w^n`, truncated at order `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    pub lead: f64,
    #[serde(with = "crate::cplx::vec")]
    pub coeffs: Vec<Complex64>,
}

impl TruncatedSeries {
    pub fn new(lead: f64, coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        TruncatedSeries { lead, coeffs }
    }

    pub fn from_reals(lead: f64, coeffs: &[f64]) -> Self {
        Self::new(lead, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self::new(0.0, vec![Complex64::new(0.0, 0.0); order + 1])
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Complex64::new(1.0, 0.0);
        s
    }

    /// The identity series `w`.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        s
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs[n]
    }

    fn check_orders(&self, other: &Self) -> Result<(), SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch(self.order(), other.order()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_orders(other)?;
        if self.lead != other.lead {
            return Err(SeriesError::LeadMismatch(self.lead, other.lead));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::new(self.lead, coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.lead, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.lead, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Cauchy product truncated at the shared order; lead exponents add.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_orders(other)?;
        let n = self.order();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        for i in 0..=n {
            for j in 0..=(n - i) {
                coeffs[i + j] += self.coeffs[i] * other.coeffs[j];
            }
        }
        Ok(Self::new(self.lead + other.lead, coeffs))
    }

    /// `exp` of a series with zero constant term, by the recurrence
    /// `(exp a)' = a' · exp a`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if self.lead != 0.0 {
            return Err(SeriesError::FractionalLead);
        }
        if self.coeffs[0].norm() != 0.0 {
            return Err(SeriesError::NonzeroConstant);
        }
        let n = self.order();
        let mut b = vec![Complex64::new(0.0, 0.0); n + 1];
        b[0] = Complex64::new(1.0, 0.0);
        for m in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=m {
                acc += (j as f64) * self.coeffs[j] * b[m - j];
            }
            b[m] = acc / (m as f64);
        }
        Ok(Self::new(0.0, b))
    }

    /// Principal-branch `log` of a series with nonzero constant term.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if self.lead != 0.0 {
            return Err(SeriesError::FractionalLead);
        }
        let a0 = self.coeffs[0];
        if a0.norm() == 0.0 {
            return Err(SeriesError::ZeroConstant);
        }
        let n = self.order();
        let mut b = vec![Complex64::new(0.0, 0.0); n + 1];
        b[0] = a0.ln();
        for m in 1..=n {
            let mut acc = (m as f64) * self.coeffs[m];
            for j in 1..m {
                acc -= (j as f64) * b[j] * self.coeffs[m - j];
            }
            b[m] = acc / ((m as f64) * a0);
        }
        Ok(Self::new(0.0, b))
    }

    /// `a^p` for real `p`, principal branch of `c0^p`; the lead exponent is
    /// multiplied by `p`.
    pub fn pow(&self, p: f64) -> Result<Self, SeriesError> {
        let a0 = self.coeffs[0];
        if a0.norm() == 0.0 {
            return Err(SeriesError::ZeroConstant);
        }
        let n = self.order();
        let mut b = vec![Complex64::new(0.0, 0.0); n + 1];
        b[0] = a0.powf(p);
        for m in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..m {
                let w = p * ((m - j) as f64) - (j as f64);
                acc += w * self.coeffs[m - j] * b[j];
            }
            b[m] = acc / ((m as f64) * a0);
        }
        Ok(Self::new(self.lead * p, b))
    }

    /// `outer ∘ inner`, with `inner(0) = 0`, by Horner evaluation in the
    /// series algebra.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        self.check_orders(inner)?;
        if self.lead != 0.0 || inner.lead != 0.0 {
            return Err(SeriesError::FractionalLead);
        }
        if inner.coeffs[0].norm() != 0.0 {
            return Err(SeriesError::NonzeroConstant);
        }
        let n = self.order();
        let mut acc = Self::constant(self.coeffs[n], n);
        for m in (0..n).rev() {
            acc = acc.mul(inner)?;
            acc.coeffs[0] += self.coeffs[m];
        }
        Ok(acc)
    }

    /// Compositional inverse: returns `b` with `self ∘ b = w` to order `N`.
    /// Requires `c0 = 0` and `c1 ≠ 0`.
    pub fn reversion(&self) -> Result<Self, SeriesError> {
        if self.lead != 0.0 {
            return Err(SeriesError::FractionalLead);
        }
        if self.coeffs[0].norm() != 0.0 {
            return Err(SeriesError::NonzeroConstant);
        }
        let c1 = self.coeffs[1];
        if c1.norm() == 0.0 {
            return Err(SeriesError::NotInvertible);
        }
        let n = self.order();
        let mut b = Self::zero(n);
        b.coeffs[1] = Complex64::new(1.0, 0.0) / c1;
        // Determine b_m from the coefficient of w^m in self∘b, one order at
        // a time: that coefficient is linear in b_m with slope c1.
        for m in 2..=n {
            let trial = self.compose(&b)?;
            b.coeffs[m] = -trial.coeffs[m] / c1;
        }
        Ok(b)
    }

    /// Termwise derivative. For `lead = 0` the coefficients shift down (the
    /// top coefficient of the result is unknown and set to zero); otherwise
    /// the lead exponent drops by one.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        if self.lead == 0.0 {
            let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
            for m in 1..=n {
                coeffs[m - 1] = (m as f64) * self.coeffs[m];
            }
            Self::new(0.0, coeffs)
        } else {
            let coeffs = self
                .coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| (self.lead + m as f64) * c)
                .collect();
            Self::new(self.lead - 1.0, coeffs)
        }
    }

    /// Evaluate at `w` (principal branch for a fractional lead).
    pub fn eval(&self, w: Complex64) -> Complex64 {
        if w.norm() == 0.0 {
            return if self.lead == 0.0 {
                self.coeffs[0]
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        self.eval_with_log(w.ln())
    }

    /// Evaluate given a continuous logarithm of the argument, so callers can
    /// track branches across the cut.
    pub fn eval_with_log(&self, logw: Complex64) -> Complex64 {
        let w = logw.exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * w + c;
        }
        if self.lead == 0.0 {
            acc
        } else {
            (self.lead * logw).exp() * acc
        }
    }

    /// Index of the first coefficient with `|c_n| > tol · max|c|`, if any.
    pub fn first_significant(&self, rel_tol: f64) -> Option<usize> {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return None;
        }
        self.coeffs.iter().position(|c| c.norm() > rel_tol * max)
    }

    /// Largest coefficientwise distance to `other` (same lead and order).
    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn truncated(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(order + 1);
        coeffs.resize(order + 1, Complex64::new(0.0, 0.0));
        Self::new(self.lead, coeffs)
    }
}

/// Laurent coefficients over a fixed index window `[-2, N]`. Out-of-range
/// access is an error, not zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentWindow {
    min_index: i64,
    #[serde(with = "crate::cplx::vec")]
    coeffs: Vec<Complex64>,
}

impl LaurentWindow {
    /// Window `[-2, -2 + coeffs.len() - 1]`.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(coeffs.len() >= 3, "window must cover indices -2..=0");
        LaurentWindow { min_index: -2, coeffs }
    }

    pub fn min_index(&self) -> i64 {
        self.min_index
    }

    pub fn max_index(&self) -> i64 {
        self.min_index + self.coeffs.len() as i64 - 1
    }

    pub fn get(&self, index: i64) -> Result<Complex64, SeriesError> {
        if index < self.min_index || index > self.max_index() {
            return Err(SeriesError::LaurentIndex(index, self.min_index, self.max_index()));
        }
        Ok(self.coeffs[(index - self.min_index) as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: &TruncatedSeries, b: &TruncatedSeries, tol: f64) {
        assert!(
            (a.lead - b.lead).abs() < 1e-14,
            "lead mismatch: {} vs {}",
            a.lead,
            b.lead
        );
        let d = a.max_coeff_distance(b);
        assert!(d <= tol, "coefficient distance {d} > {tol}\n{a:?}\n{b:?}");
    }

    #[test]
    fn mul_difference_of_squares() {
        let a = TruncatedSeries::from_reals(0.0, &[1.0, 1.0, 0.0, 0.0, 0.0]);
        let b = TruncatedSeries::from_reals(0.0, &[1.0, -1.0, 0.0, 0.0, 0.0]);
        let expect = TruncatedSeries::from_reals(0.0, &[1.0, 0.0, -1.0, 0.0, 0.0]);
        assert_close(&a.mul(&b).unwrap(), &expect, 0.0);
    }

    #[test]
    fn mul_adds_fractional_leads() {
        let a = TruncatedSeries::from_reals(0.5, &[1.0]);
        let p = a.mul(&a).unwrap();
        assert_eq!(p.lead, 1.0);
        assert_eq!(p.coeffs[0], c(1.0, 0.0));
    }

    #[test]
    fn mul_hand_convolution() {
        // (1 + 2w + 3w²)·(4 + 5w) = 4 + 13w + 22w² + O(w³)
        let a = TruncatedSeries::from_reals(0.0, &[1.0, 2.0, 3.0]);
        let b = TruncatedSeries::from_reals(0.0, &[4.0, 5.0, 0.0]);
        let expect = TruncatedSeries::from_reals(0.0, &[4.0, 13.0, 22.0]);
        assert_close(&a.mul(&b).unwrap(), &expect, 0.0);
    }

    #[test]
    fn mul_order_mismatch_errors() {
        let a = TruncatedSeries::zero(3);
        let b = TruncatedSeries::zero(4);
        assert_eq!(a.mul(&b), Err(SeriesError::OrderMismatch(3, 4)));
    }

    #[test]
    fn exp_of_zero_is_one() {
        let z = TruncatedSeries::zero(5);
        assert_close(&z.exp().unwrap(), &TruncatedSeries::one(5), 0.0);
    }

    #[test]
    fn exp_taylor() {
        let a = TruncatedSeries::identity(3);
        let e = a.exp().unwrap();
        let expect = TruncatedSeries::from_reals(0.0, &[1.0, 1.0, 0.5, 1.0 / 6.0]);
        assert_close(&e, &expect, 1e-15);
    }

    #[test]
    fn exp_imaginary_argument() {
        // exp(i·w) = 1 + i·w − w²/2 + O(w³)
        let a = TruncatedSeries::new(0.0, vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let e = a.exp().unwrap();
        let expect = TruncatedSeries::new(0.0, vec![c(1.0, 0.0), c(0.0, 1.0), c(-0.5, 0.0)]);
        assert_close(&e, &expect, 1e-15);
    }

    #[test]
    fn exp_rejects_constant_term() {
        let a = TruncatedSeries::one(3);
        assert_eq!(a.exp(), Err(SeriesError::NonzeroConstant));
    }

    #[test]
    fn exp_rejects_fractional_lead() {
        let a = TruncatedSeries::from_reals(0.5, &[0.0, 1.0]);
        assert_eq!(a.exp(), Err(SeriesError::FractionalLead));
    }

    #[test]
    fn pow_identity_and_sqrt() {
        let one = TruncatedSeries::one(3);
        assert_close(&one.pow(7.0).unwrap(), &one, 0.0);
        let four = TruncatedSeries::constant(c(4.0, 0.0), 3);
        let two = TruncatedSeries::constant(c(2.0, 0.0), 3);
        assert_close(&four.pow(0.5).unwrap(), &two, 1e-15);
    }

    #[test]
    fn pow_binomial() {
        // (1 + w)^{1/2} = 1 + w/2 − w²/8 + O(w³)
        let a = TruncatedSeries::from_reals(0.0, &[1.0, 1.0, 0.0]);
        let expect = TruncatedSeries::from_reals(0.0, &[1.0, 0.5, -0.125]);
        assert_close(&a.pow(0.5).unwrap(), &expect, 1e-15);
    }

    #[test]
    fn pow_rejects_zero_constant() {
        let a = TruncatedSeries::identity(3);
        assert_eq!(a.pow(0.5), Err(SeriesError::ZeroConstant));
    }

    #[test]
    fn compose_identity_outer() {
        let outer = TruncatedSeries::identity(3);
        let inner = TruncatedSeries::from_reals(0.0, &[0.0, 2.0, -1.0, 0.5]);
        assert_close(&outer.compose(&inner).unwrap(), &inner, 0.0);
    }

    #[test]
    fn compose_square_of_quadratic() {
        // (w + w²)² = w² + 2w³ + O(w⁴)
        let outer = TruncatedSeries::from_reals(0.0, &[0.0, 0.0, 1.0, 0.0]);
        let inner = TruncatedSeries::from_reals(0.0, &[0.0, 1.0, 1.0, 0.0]);
        let expect = TruncatedSeries::from_reals(0.0, &[0.0, 0.0, 1.0, 2.0]);
        assert_close(&outer.compose(&inner).unwrap(), &expect, 1e-15);
    }

    #[test]
    fn compose_affine() {
        let outer = TruncatedSeries::from_reals(0.0, &[1.0, 1.0]);
        let inner = TruncatedSeries::from_reals(0.0, &[0.0, 2.0]);
        let expect = TruncatedSeries::from_reals(0.0, &[1.0, 2.0]);
        assert_close(&outer.compose(&inner).unwrap(), &expect, 0.0);
    }

    #[test]
    fn compose_rejects_inner_constant() {
        let outer = TruncatedSeries::identity(3);
        let inner = TruncatedSeries::one(3);
        assert_eq!(outer.compose(&inner), Err(SeriesError::NonzeroConstant));
    }

    #[test]
    fn reversion_linear() {
        let a = TruncatedSeries::identity(3);
        assert_close(&a.reversion().unwrap(), &a, 0.0);
        let b = TruncatedSeries::from_reals(0.0, &[0.0, 2.0, 0.0, 0.0]);
        let expect = TruncatedSeries::from_reals(0.0, &[0.0, 0.5, 0.0, 0.0]);
        assert_close(&b.reversion().unwrap(), &expect, 0.0);
    }

    #[test]
    fn reversion_quadratic() {
        // inverse of w + w² is w − w² + 2w³ + O(w⁴)
        let a = TruncatedSeries::from_reals(0.0, &[0.0, 1.0, 1.0, 0.0]);
        let b = a.reversion().unwrap();
        let expect = TruncatedSeries::from_reals(0.0, &[0.0, 1.0, -1.0, 2.0]);
        assert_close(&b, &expect, 1e-14);
        let id = a.compose(&b).unwrap();
        assert_close(&id, &TruncatedSeries::identity(3), 1e-14);
    }

    #[test]
    fn reversion_rejects_vanishing_linear_term() {
        let a = TruncatedSeries::from_reals(0.0, &[0.0, 0.0, 1.0]);
        assert_eq!(a.reversion(), Err(SeriesError::NotInvertible));
    }

    #[test]
    fn log_inverts_exp() {
        let a = TruncatedSeries::new(
            0.0,
            vec![c(0.0, 0.0), c(0.3, -0.2), c(-0.1, 0.05), c(0.02, 0.0)],
        );
        let back = a.exp().unwrap().log().unwrap();
        assert_close(&back, &a, 1e-14);
    }

    #[test]
    fn laurent_window_bounds() {
        let w = LaurentWindow::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(w.get(-2).unwrap(), c(1.0, 0.0));
        assert_eq!(w.get(0).unwrap(), c(3.0, 0.0));
        assert!(matches!(w.get(1), Err(SeriesError::LaurentIndex(1, -2, 0))));
        assert!(matches!(w.get(-3), Err(SeriesError::LaurentIndex(-3, -2, 0))));
    }

    #[test]
    fn eval_matches_horner() {
        let a = TruncatedSeries::from_reals(0.0, &[1.0, 2.0, 3.0]);
        let w = c(0.5, 0.25);
        let expect = c(1.0, 0.0) + c(2.0, 0.0) * w + c(3.0, 0.0) * w * w;
        assert!((a.eval(w) - expect).norm() < 1e-15);
    }
}
