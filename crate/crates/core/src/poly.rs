//! Dense univariate polynomials with real-root isolation.
//!
//! Roots are isolated recursively: the real roots of `p'` split the line
//! into intervals on which `p` is monotone, so each interval holds at most
//! one simple root, found by safeguarded Newton. Multiple roots show up as
//! critical points where `p` itself vanishes.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VfpError};
use crate::roots::newton_bisect;

/// Polynomial `Σ c_k x^k`, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial, dropping trailing zero coefficients.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    /// Coefficient of `x^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// True when every odd-power coefficient is exactly zero.
    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Value and first derivative in one Horner pass.
    #[inline]
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Polynomial {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..len).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Quotient of `p(x) - p(a)` by `(x - a)^2`, dropping the remainder.
    ///
    /// Exact when `p'(a) = 0`.
    pub fn deflate_double(&self, a: f64) -> Polynomial {
        let shifted = self.add(&Polynomial::new(vec![-self.eval(a)]));
        shifted.deflate(a).deflate(a)
    }

    /// Synthetic division by `(x - a)`, dropping the remainder.
    fn deflate(&self, a: f64) -> Polynomial {
        let n = self.coeffs.len();
        if n <= 1 {
            return Polynomial::zero();
        }
        let mut q = vec![0.0; n - 1];
        let mut carry = 0.0;
        for k in (1..n).rev() {
            carry = carry * a + self.coeffs[k];
            q[k - 1] = carry;
        }
        Polynomial::new(q)
    }

    /// Sum of |c_k| |x|^k, the natural scale of rounding error in `eval(x)`.
    fn magnitude(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    /// Cauchy bound: every real root lies in `[-B, B]`.
    pub fn root_bound(&self) -> f64 {
        let lead = self.leading().abs();
        let n = self.coeffs.len();
        1.0 + self.coeffs[..n.saturating_sub(1)]
            .iter()
            .map(|c| c.abs() / lead)
            .fold(0.0, f64::max)
    }

    /// All distinct real roots in ascending order.
    pub fn real_roots(&self) -> Result<Vec<f64>> {
        if !self.is_finite() {
            return Err(VfpError::RootFindingFailure(
                "non-finite polynomial coefficient".into(),
            ));
        }
        match self.degree() {
            None => Err(VfpError::RootFindingFailure(
                "the zero polynomial has no isolated roots".into(),
            )),
            Some(0) => Ok(Vec::new()),
            Some(1) => Ok(vec![-self.coeffs[0] / self.coeffs[1]]),
            Some(_) => self.roots_from_critical(),
        }
    }

    fn roots_from_critical(&self) -> Result<Vec<f64>> {
        let bound = self.root_bound();
        let crit = self.derivative().real_roots()?;
        let mut knots = Vec::with_capacity(crit.len() + 2);
        knots.push(-bound);
        knots.extend(crit.iter().copied().filter(|c| c.abs() < bound));
        knots.push(bound);

        let eps = f64::EPSILON;
        let mut roots = Vec::new();
        for &c in &crit {
            if self.eval(c).abs() <= 64.0 * eps * self.magnitude(c) {
                roots.push(c);
            }
        }
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a), self.eval(b));
            if fa.signum() != fb.signum() && fa != 0.0 && fb != 0.0 {
                let r = newton_bisect(|x| Ok(self.eval_with_derivative(x)), a, b, 4.0 * eps)?;
                roots.push(r);
            }
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-10 * (1.0 + a.abs()));
        Ok(roots)
    }

    /// Global minimizer and minimum value, or `None` if unbounded below.
    pub fn global_min(&self) -> Result<Option<(f64, f64)>> {
        match self.degree() {
            None => Ok(Some((0.0, 0.0))),
            Some(0) => Ok(Some((0.0, self.coeffs[0]))),
            Some(d) if d % 2 == 1 || self.leading() < 0.0 => Ok(None),
            Some(_) => {
                let crit = self.derivative().real_roots()?;
                Ok(crit
                    .into_iter()
                    .map(|x| (x, self.eval(x)))
                    .min_by(|a, b| a.1.total_cmp(&b.1)))
            }
        }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trims_and_evaluates() {
        let p = Polynomial::new(vec![1.0, -2.0, 0.0, 3.0, 0.0]);
        assert_eq!(p.degree(), Some(3));
        assert_eq!(p.eval(2.0), 1.0 - 4.0 + 24.0);
        let (v, dv) = p.eval_with_derivative(2.0);
        assert_eq!(v, 21.0);
        assert_eq!(dv, -2.0 + 36.0);
    }

    #[test]
    fn cubic_roots() {
        // x^3 - x
        let p = Polynomial::new(vec![0.0, -1.0, 0.0, 1.0]);
        let r = p.real_roots().unwrap();
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn multiple_root_is_found() {
        // x^3 has a triple root; (x-1)^2 (x+2) a double root at 1
        let r = Polynomial::new(vec![0.0, 0.0, 0.0, 1.0])
            .real_roots()
            .unwrap();
        assert_eq!(r, vec![0.0]);
        let p = Polynomial::new(vec![2.0, -3.0, 0.0, 1.0]);
        let r = p.real_roots().unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] + 2.0).abs() < 1e-12 && (r[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn no_real_roots() {
        assert!(Polynomial::new(vec![1.0, 0.0, 1.0])
            .real_roots()
            .unwrap()
            .is_empty());
    }

    #[test]
    fn deflation_of_double_well() {
        // (V(x) - V(1)) / (x-1)^2 = (x+1)^2 / 4 for V = x^4/4 - x^2/2
        let v = Polynomial::new(vec![0.0, 0.0, -0.5, 0.0, 0.25]);
        let q = v.deflate_double(1.0);
        for &x in &[-3.0, -1.0, 0.0, 0.5, 2.0] {
            assert!((q.eval(x) - (x + 1.0f64).powi(2) / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn global_min_of_double_well() {
        let v = Polynomial::new(vec![0.0, 0.0, -0.5, 0.0, 0.25]);
        let (x, val) = v.global_min().unwrap().unwrap();
        assert!((x.abs() - 1.0).abs() < 1e-14);
        assert!((val + 0.25).abs() < 1e-15);
        assert!(Polynomial::new(vec![0.0, 0.0, 0.0, 1.0])
            .global_min()
            .unwrap()
            .is_none());
    }

    proptest! {
        #[test]
        fn roots_of_products_of_linear_factors(
            mut rs in proptest::collection::vec(-5.0f64..5.0, 1..6)
        ) {
            rs.sort_by(f64::total_cmp);
            rs.dedup_by(|a, b| (*a - *b).abs() < 1e-2);
            let mut p = Polynomial::new(vec![1.0]);
            for &r in &rs {
                let mut c = vec![0.0; p.coeffs().len() + 1];
                for (k, &a) in p.coeffs().iter().enumerate() {
                    c[k] -= a * r;
                    c[k + 1] += a;
                }
                p = Polynomial::new(c);
            }
            let found = p.real_roots().unwrap();
            prop_assert_eq!(found.len(), rs.len());
            for (f, r) in found.iter().zip(&rs) {
                prop_assert!((f - r).abs() < 1e-6, "{} vs {}", f, r);
            }
        }
    }
}
