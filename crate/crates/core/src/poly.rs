//! Dense bivariate polynomials and straight-line forms.
//!
//! Coefficients are stored in graded-lexicographic order over monomials
//! `x^i y^j` with `i + j ≤ n`: `1, x, y, x², xy, y², x³, …`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("degree {degree} needs {expected} coefficients, got {found}")]
    CoefficientCount { degree: usize, expected: usize, found: usize },
    #[error("degenerate line: α = β = 0")]
    DegenerateLine,
}

/// Number of monomials of total degree at most `n`.
pub fn monomial_count(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// Position of `x^i y^j` in graded-lex order.
pub fn monomial_index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

/// Exponents `(i, j)` of the monomial at `index`.
pub fn monomial_exponents(index: usize) -> (usize, usize) {
    let mut d = 0;
    while monomial_count(d) <= index {
        d += 1;
    }
    let j = index - d * (d + 1) / 2;
    (d - j, j)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivariatePolynomial {
    degree: usize,
    coeffs: Vec<f64>,
}

impl BivariatePolynomial {
    pub fn zero(degree: usize) -> Self {
        Self { degree, coeffs: vec![0.0; monomial_count(degree)] }
    }

    pub fn constant(c: f64) -> Self {
        Self { degree: 0, coeffs: vec![c] }
    }

    pub fn monomial(i: usize, j: usize, c: f64) -> Self {
        let mut p = Self::zero(i + j);
        p.coeffs[monomial_index(i, j)] = c;
        p
    }

    /// `a·x + b·y + c`.
    pub fn linear(a: f64, b: f64, c: f64) -> Self {
        Self { degree: 1, coeffs: vec![c, a, b] }
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<f64>) -> Result<Self, PolyError> {
        let expected = monomial_count(degree);
        if coeffs.len() != expected {
            return Err(PolyError::CoefficientCount { degree, expected, found: coeffs.len() });
        }
        Ok(Self { degree, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.degree {
            0.0
        } else {
            self.coeffs[monomial_index(i, j)]
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.coeffs.iter().enumerate().map(|(k, &c)| (monomial_exponents(k), c))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, c| a.max(c.abs()))
    }

    /// Same polynomial stored at degree `n ≥ self.degree()`.
    pub fn with_degree(&self, n: usize) -> Self {
        assert!(n >= self.degree, "cannot lower degree from {} to {n}", self.degree);
        let mut out = Self::zero(n);
        for ((i, j), c) in self.terms() {
            out.coeffs[monomial_index(i, j)] = c;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { degree: self.degree, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Nested Horner evaluation: `Σ_i x^i (Σ_j c_ij y^j)`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let n = self.degree;
        let mut acc = 0.0;
        for i in (0..=n).rev() {
            let mut inner = 0.0;
            for j in (0..=(n - i)).rev() {
                inner = inner * y + self.coeffs[monomial_index(i, j)];
            }
            acc = acc * x + inner;
        }
        acc
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::constant(1.0);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes `x ↦ fx`, `y ↦ fy`.
    pub fn compose(&self, fx: &BivariatePolynomial, fy: &BivariatePolynomial) -> Self {
        let n = self.degree;
        let xp: Vec<Self> = (0..=n).scan(Self::constant(1.0), |acc, _| {
            let cur = acc.clone();
            *acc = &*acc * fx;
            Some(cur)
        }).collect();
        let yp: Vec<Self> = (0..=n).scan(Self::constant(1.0), |acc, _| {
            let cur = acc.clone();
            *acc = &*acc * fy;
            Some(cur)
        }).collect();
        let mut out = Self::zero(0);
        for ((i, j), c) in self.terms() {
            if c != 0.0 {
                out = &out + &(&xp[i] * &yp[j]).scale(c);
            }
        }
        out.with_degree(n * fx.degree.max(fy.degree))
    }

    /// `p(x, y) ↦ p(x + dx, y + dy)`.
    pub fn translate(&self, dx: f64, dy: f64) -> Self {
        let r = self.compose(&Self::linear(1.0, 0.0, dx), &Self::linear(0.0, 1.0, dy));
        r.truncate(self.degree)
    }

    /// Drops all terms above degree `n`.
    pub fn truncate(&self, n: usize) -> Self {
        let mut out = Self::zero(n);
        for ((i, j), c) in self.terms() {
            if i + j <= n {
                out.coeffs[monomial_index(i, j)] = c;
            }
        }
        out
    }
}

impl Add for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn add(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let n = self.degree.max(rhs.degree);
        let mut out = self.with_degree(n);
        for ((i, j), c) in rhs.terms() {
            out.coeffs[monomial_index(i, j)] += c;
        }
        out
    }
}

impl Sub for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn sub(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        self + &(-rhs)
    }
}

impl Neg for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn neg(self) -> BivariatePolynomial {
        self.scale(-1.0)
    }
}

impl Mul for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn mul(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = BivariatePolynomial::zero(self.degree + rhs.degree);
        for ((i1, j1), a) in self.terms() {
            if a == 0.0 {
                continue;
            }
            for ((i2, j2), b) in rhs.terms() {
                out.coeffs[monomial_index(i1 + i2, j1 + j2)] += a * b;
            }
        }
        out
    }
}

/// A straight line `α·x + β·y + γ = 0` with `α² + β² = 1` and the first
/// nonzero of `(α, β)` positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineForm {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl LineForm {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, PolyError> {
        let n = alpha.hypot(beta);
        if n == 0.0 || !n.is_finite() {
            return Err(PolyError::DegenerateLine);
        }
        let (mut a, mut b, mut c) = (alpha / n, beta / n, gamma / n);
        if a < 0.0 || (a == 0.0 && b < 0.0) {
            (a, b, c) = (-a, -b, -c);
        }
        Ok(Self { alpha: a, beta: b, gamma: c })
    }

    pub fn through(p: [f64; 2], q: [f64; 2]) -> Result<Self, PolyError> {
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        let (a, b) = (-dy, dx);
        Self::new(a, b, -(a * p[0] + b * p[1]))
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.alpha * x + self.beta * y + self.gamma
    }

    pub fn as_poly(&self) -> BivariatePolynomial {
        BivariatePolynomial::linear(self.alpha, self.beta, self.gamma)
    }

    /// `(x(x̃, ỹ), y(x̃, ỹ))` for the frame `x̃ = αx + βy + γ`, `ỹ = −βx + αy`,
    /// in which the line is `x̃ = 0`.
    pub fn frame_inverse(&self) -> (BivariatePolynomial, BivariatePolynomial) {
        let (a, b, c) = (self.alpha, self.beta, self.gamma);
        (
            BivariatePolynomial::linear(a, -b, -a * c),
            BivariatePolynomial::linear(b, a, -b * c),
        )
    }

    /// `(x̃(x, y), ỹ(x, y))`.
    pub fn frame(&self) -> (BivariatePolynomial, BivariatePolynomial) {
        (self.as_poly(), BivariatePolynomial::linear(-self.beta, self.alpha, 0.0))
    }

    /// `p` rewritten in the line's frame.
    pub fn to_frame(&self, p: &BivariatePolynomial) -> BivariatePolynomial {
        let (fx, fy) = self.frame_inverse();
        p.compose(&fx, &fy).truncate(p.degree())
    }

    /// Inverse of [`LineForm::to_frame`].
    pub fn from_frame(&self, p: &BivariatePolynomial) -> BivariatePolynomial {
        let (fx, fy) = self.frame();
        p.compose(&fx, &fy).truncate(p.degree())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_eval(p: &BivariatePolynomial, x: f64, y: f64) -> f64 {
        p.terms().map(|((i, j), c)| c * x.powi(i as i32) * y.powi(j as i32)).sum()
    }

    #[test]
    fn ordering_is_graded_lex() {
        let order: Vec<(usize, usize)> = (0..6).map(monomial_exponents).collect();
        assert_eq!(order, vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
        for k in 0..monomial_count(7) {
            let (i, j) = monomial_exponents(k);
            assert_eq!(monomial_index(i, j), k);
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(BivariatePolynomial::constant(1.0).eval(3.0, -2.0), 1.0);
        let p = &BivariatePolynomial::monomial(2, 0, 1.0) - &BivariatePolynomial::monomial(0, 1, 1.0);
        assert_eq!(p.eval(2.0, 1.0), 3.0);
    }

    #[test]
    fn coefficient_count_is_checked() {
        assert!(BivariatePolynomial::from_coeffs(2, vec![0.0; 5]).is_err());
        assert!(BivariatePolynomial::from_coeffs(2, vec![0.0; 6]).is_ok());
    }

    #[test]
    fn line_normalization() {
        let l = LineForm::new(-3.0, 4.0, 10.0).unwrap();
        assert!((l.alpha - 0.6).abs() < 1e-15 && (l.beta + 0.8).abs() < 1e-15 && (l.gamma + 2.0).abs() < 1e-15);
        let l = LineForm::new(0.0, -2.0, 1.0).unwrap();
        assert!(l.beta == 1.0 && l.gamma == -0.5);
        assert_eq!(LineForm::new(0.0, 0.0, 1.0), Err(PolyError::DegenerateLine));
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = BivariatePolynomial> {
        prop::collection::vec(-2.0f64..2.0, monomial_count(n))
            .prop_map(move |c| BivariatePolynomial::from_coeffs(n, c).unwrap())
    }

    proptest! {
        #[test]
        fn horner_matches_naive(p in arb_poly(4), x in -1.0f64..1.0, y in -1.0f64..1.0) {
            prop_assert!((p.eval(x, y) - naive_eval(&p, x, y)).abs() < 1e-12);
        }

        #[test]
        fn frame_round_trip(p in arb_poly(3), t in 0.0f64..std::f64::consts::TAU, g in -1.0f64..1.0, x in -1.0f64..1.0, y in -1.0f64..1.0) {
            let l = LineForm::new(t.cos(), t.sin(), g).unwrap();
            let q = l.to_frame(&p);
            let (xt, yt) = (l.eval(x, y), -l.beta * x + l.alpha * y);
            prop_assert!((q.eval(xt, yt) - p.eval(x, y)).abs() < 1e-11);
            let back = l.from_frame(&q);
            prop_assert!((back.eval(x, y) - p.eval(x, y)).abs() < 1e-11);
        }

        #[test]
        fn product_evaluates_pointwise(p in arb_poly(2), q in arb_poly(3), x in -1.0f64..1.0, y in -1.0f64..1.0) {
            prop_assert!(((&p * &q).eval(x, y) - p.eval(x, y) * q.eval(x, y)).abs() < 1e-11);
        }
    }
}
