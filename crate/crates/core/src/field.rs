//! Exact arithmetic in the quartic field `Q(β)` with `β = √(1 + √2)`.
//!
//! Elements are stored as `c0 + c1·β + c2·β² + c3·β³` with arbitrary
//! precision rational coefficients, always reduced modulo the minimal
//! polynomial `β⁴ − 2β² − 1`. Because the representation is canonical,
//! equality and hashing are purely syntactic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Numerical value of `β = √(1 + √2)`.
pub const BETA: f64 = 1.553_773_974_030_037_4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero in Q(β)")]
    DivisionByZero,
    #[error("cannot parse rational coefficient {0:?}")]
    Parse(String),
}

/// An element of `Q(β)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlgebraicNumber {
    coeffs: [BigRational; 4],
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl AlgebraicNumber {
    pub fn new(coeffs: [BigRational; 4]) -> Self {
        // Ratio keeps itself in lowest terms with a positive denominator.
        Self { coeffs }
    }

    pub fn from_ints(c: [i64; 4]) -> Self {
        Self::new([rat(c[0]), rat(c[1]), rat(c[2]), rat(c[3])])
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::new([q, BigRational::zero(), BigRational::zero(), BigRational::zero()])
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_ints([n, 0, 0, 0])
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn beta() -> Self {
        Self::from_ints([0, 1, 0, 0])
    }

    /// `√2 = β² − 1`.
    pub fn sqrt2() -> Self {
        Self::from_ints([-1, 0, 1, 0])
    }

    pub fn coeffs(&self) -> &[BigRational; 4] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Numerical value at `β ≈ 1.5537739740300374`.
    pub fn to_f64(&self) -> f64 {
        let c: Vec<f64> = self
            .coeffs
            .iter()
            .map(|q| q.to_f64().unwrap_or(f64::NAN))
            .collect();
        ((c[3] * BETA + c[2]) * BETA + c[1]) * BETA + c[0]
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self::new(std::array::from_fn(|i| &self.coeffs[i] * q))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in `Q[t]`
    /// against the minimal polynomial.
    pub fn inverse(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let modulus = QPoly(vec![rat(-1), rat(0), rat(-2), rat(0), rat(1)]);
        let a = QPoly(self.coeffs.to_vec()).trimmed();
        // Invariant: s_i * a ≡ r_i (mod modulus).
        let (mut r0, mut r1) = (modulus.clone(), a);
        let (mut s0, mut s1) = (QPoly::zero(), QPoly::constant(rat(1)));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        // The minimal polynomial is irreducible, so gcd is a nonzero constant.
        debug_assert_eq!(r0.degree(), Some(0));
        let lead = r0.0[0].clone();
        let s = s0.div_rem(&modulus).1;
        let mut out: [BigRational; 4] = std::array::from_fn(|_| BigRational::zero());
        for (i, c) in s.0.into_iter().enumerate() {
            out[i] = c / &lead;
        }
        Ok(Self::new(out))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, FieldError> {
        Ok(self * &rhs.inverse()?)
    }

    /// Sign of the real value. Exact for zero; otherwise decided numerically,
    /// which is safe for the moderate magnitudes used in this crate.
    pub fn signum(&self) -> i8 {
        if self.is_zero() {
            0
        } else if self.to_f64() > 0.0 {
            1
        } else {
            -1
        }
    }

    fn mul_raw(a: &[BigRational; 4], b: &[BigRational; 4]) -> [BigRational; 4] {
        let mut prod: [BigRational; 7] = std::array::from_fn(|_| BigRational::zero());
        for i in 0..4 {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                if b[j].is_zero() {
                    continue;
                }
                prod[i + j] += &a[i] * &b[j];
            }
        }
        // β⁶ = 2β⁴ + β², β⁵ = 2β³ + β, β⁴ = 2β² + 1.
        for k in (4..7).rev() {
            let c = std::mem::replace(&mut prod[k], BigRational::zero());
            if c.is_zero() {
                continue;
            }
            prod[k - 2] += &c * rat(2);
            prod[k - 4] += c;
        }
        let [c0, c1, c2, c3, ..] = prod;
        [c0, c1, c2, c3]
    }
}

impl Default for AlgebraicNumber {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if wrote {
                write!(f, "{}", if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let mag = c.abs();
            match i {
                0 => write!(f, "{mag}")?,
                1 if mag.is_one() => write!(f, "β")?,
                1 => write!(f, "{mag}β")?,
                _ if mag.is_one() => write!(f, "β^{i}")?,
                _ => write!(f, "{mag}β^{i}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<AlgebraicNumber> for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $method(self, rhs: AlgebraicNumber) -> AlgebraicNumber {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&AlgebraicNumber> for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $method(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
                (&self).$method(rhs)
            }
        }
        impl $tr<AlgebraicNumber> for &AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $method(self, rhs: AlgebraicNumber) -> AlgebraicNumber {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&AlgebraicNumber> for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn add(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        AlgebraicNumber::new(std::array::from_fn(|i| &self.coeffs[i] + &rhs.coeffs[i]))
    }
}

impl Sub<&AlgebraicNumber> for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn sub(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        AlgebraicNumber::new(std::array::from_fn(|i| &self.coeffs[i] - &rhs.coeffs[i]))
    }
}

impl Mul<&AlgebraicNumber> for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn mul(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        AlgebraicNumber::new(AlgebraicNumber::mul_raw(&self.coeffs, &rhs.coeffs))
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        AlgebraicNumber::new(std::array::from_fn(|i| -&self.coeffs[i]))
    }
}

impl Neg for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        -&self
    }
}

fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational, FieldError> {
    let bad = || FieldError::Parse(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Serialized as a 4-tuple of `"num/den"` strings.
impl Serialize for AlgebraicNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let parts: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        parts.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AlgebraicNumber {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let parts: [String; 4] = Deserialize::deserialize(deserializer)?;
        let mut coeffs: [BigRational; 4] = std::array::from_fn(|_| BigRational::zero());
        for (slot, s) in coeffs.iter_mut().zip(parts.iter()) {
            *slot = parse_rational(s).map_err(D::Error::custom)?;
        }
        Ok(Self::new(coeffs))
    }
}

/// Dense univariate polynomial over `Q`, lowest degree first. Only used for
/// the inverse computation.
#[derive(Clone, Debug)]
struct QPoly(Vec<BigRational>);

impl QPoly {
    fn zero() -> Self {
        QPoly(Vec::new())
    }

    fn constant(c: BigRational) -> Self {
        QPoly(vec![c]).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn sub(&self, rhs: &QPoly) -> QPoly {
        let n = self.0.len().max(rhs.0.len());
        let out = (0..n)
            .map(|i| {
                let a = self.0.get(i).cloned().unwrap_or_else(BigRational::zero);
                let b = rhs.0.get(i).cloned().unwrap_or_else(BigRational::zero);
                a - b
            })
            .collect();
        QPoly(out).trimmed()
    }

    fn mul(&self, rhs: &QPoly) -> QPoly {
        if self.is_zero() || rhs.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly(out).trimmed()
    }

    fn div_rem(&self, divisor: &QPoly) -> (QPoly, QPoly) {
        let dd = divisor.degree().expect("nonzero divisor");
        let lead = divisor.0[dd].clone();
        let mut rem = self.0.clone();
        let mut quot = vec![BigRational::zero(); self.0.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = &rem[top] / &lead;
            let shift = top - dd;
            for (k, dc) in divisor.0.iter().enumerate() {
                rem[shift + k] -= &c * dc;
            }
            quot[shift] = c;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (QPoly(quot).trimmed(), QPoly(rem).trimmed())
    }
}

/// Exact complex number `re + i·im` over `Q(β)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FieldComplex {
    pub re: AlgebraicNumber,
    pub im: AlgebraicNumber,
}

impl FieldComplex {
    pub fn new(re: AlgebraicNumber, im: AlgebraicNumber) -> Self {
        Self { re, im }
    }

    pub fn real(re: AlgebraicNumber) -> Self {
        Self { re, im: AlgebraicNumber::zero() }
    }

    pub fn zero() -> Self {
        Self::real(AlgebraicNumber::zero())
    }

    pub fn one() -> Self {
        Self::real(AlgebraicNumber::one())
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sqr(&self) -> AlgebraicNumber {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }

    pub fn neg(&self) -> Self {
        Self { re: -&self.re, im: -&self.im }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_number() -> impl Strategy<Value = AlgebraicNumber> {
        prop::array::uniform4((-20i64..20, 1i64..6)).prop_map(|parts| {
            AlgebraicNumber::new(parts.map(|(n, d)| BigRational::new(n.into(), d.into())))
        })
    }

    #[test]
    fn beta_squared_squared_reduces() {
        let b2 = AlgebraicNumber::beta().pow(2);
        assert_eq!(&b2 * &b2, AlgebraicNumber::from_ints([1, 0, 2, 0]));
    }

    #[test]
    fn sqrt2_squares_to_two() {
        let s = AlgebraicNumber::sqrt2();
        assert_eq!(&s * &s, AlgebraicNumber::from_int(2));
    }

    #[test]
    fn to_f64_values() {
        assert_eq!(AlgebraicNumber::beta().to_f64(), 1.553_773_974_030_037_4);
        let beta_root = (1.0 + 2f64.sqrt()).sqrt();
        assert!((AlgebraicNumber::beta().to_f64() - beta_root).abs() < 1e-15);
        assert_eq!(AlgebraicNumber::zero().to_f64(), 0.0);
        // 3 + 2√2 = 3 + 2(β² − 1) = 1 + 2β²
        let three_plus = AlgebraicNumber::from_int(3) + AlgebraicNumber::from_int(2) * AlgebraicNumber::sqrt2();
        assert_eq!(three_plus, AlgebraicNumber::from_ints([1, 0, 2, 0]));
        assert!((three_plus.to_f64() - 5.828_427_124_746_19).abs() < 1e-13);
    }

    #[test]
    fn bolza_determinant_is_one() {
        // β⁴ − 2β² = 1
        let b = AlgebraicNumber::beta();
        let det = b.pow(4) - AlgebraicNumber::from_int(2) * b.pow(2);
        assert!(det.is_one());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let err = AlgebraicNumber::one().checked_div(&AlgebraicNumber::zero());
        assert_eq!(err, Err(FieldError::DivisionByZero));
    }

    #[test]
    fn inverse_of_beta() {
        // β(β³ − 2β) = β⁴ − 2β² = 1
        let inv = AlgebraicNumber::beta().inverse().unwrap();
        assert_eq!(inv, AlgebraicNumber::from_ints([0, -2, 0, 1]));
    }

    #[test]
    fn serde_uses_num_den_strings() {
        let x = AlgebraicNumber::new([
            BigRational::new(1.into(), 2.into()),
            rat(0),
            rat(-3),
            rat(7),
        ]);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"["1/2","0/1","-3/1","7/1"]"#);
        let back: AlgebraicNumber = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
        let short: AlgebraicNumber = serde_json::from_str(r#"["2","0","1","0"]"#).unwrap();
        assert_eq!(short, AlgebraicNumber::from_ints([2, 0, 1, 0]));
        assert!(serde_json::from_str::<AlgebraicNumber>(r#"["1/0","0","0","0"]"#).is_err());
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(AlgebraicNumber::sqrt2().to_string(), "-1 + β^2");
        assert_eq!(AlgebraicNumber::zero().to_string(), "0");
    }

    proptest! {
        #[test]
        fn multiplicative_identity(x in arb_number()) {
            prop_assert_eq!(&x * &AlgebraicNumber::one(), x);
        }

        #[test]
        fn field_axioms(a in arb_number(), b in arb_number(), c in arb_number()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &a * &b + &a * &c);
            prop_assert_eq!(&a + &b, &b + &a);
            if !a.is_zero() {
                prop_assert!((&a * &a.inverse().unwrap()).is_one());
            }
        }

        #[test]
        fn float_shadow_is_a_ring_map(a in arb_number(), b in arb_number()) {
            let lhs = (&a * &b).to_f64();
            let rhs = a.to_f64() * b.to_f64();
            prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + rhs.abs()));
        }
    }
}
