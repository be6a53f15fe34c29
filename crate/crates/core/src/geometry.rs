//! Points, geodesics and isometries of the Poincaré and Klein disk models.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{AlgebraicNumber, FieldComplex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("expected a {expected} point, got a {found} point")]
    WrongModel { expected: Model, found: Model },
    #[error("point ({0}, {1}) is not inside the open unit disk")]
    NotInterior(f64, f64),
    #[error("geodesic endpoints coincide")]
    CoincidentPoints,
    #[error("cannot invert the center of the inversion circle")]
    InversionCenter,
    #[error("point is a pole of the Möbius map")]
    MobiusPole,
    #[error("invalid Möbius parameters: {0}")]
    InvalidMobius(&'static str),
    #[error("degenerate chord: sin θ = 0")]
    DegenerateChord,
    #[error("chord offset {0} is not in [0, 1)")]
    ChordOutOfRange(f64),
    #[error("|a|² − |b|² = {0}, expected 1")]
    DeterminantCondition(f64),
    #[error("point maps to the line at infinity")]
    PointAtInfinity,
    #[error("singular projective matrix")]
    SingularMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Poincare,
    Klein,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Poincare => "poincare",
            Model::Klein => "klein",
        })
    }
}

/// Complex number as a pair of reals.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };
    pub const ONE: Complex = Complex { re: 1.0, im: 0.0 };
    pub const I: Complex = Complex { re: 0.0, im: 1.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn arg(self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.re * s, self.im * s)
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, o: Complex) -> Complex {
        Complex::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Div for Complex {
    type Output = Complex;
    fn div(self, o: Complex) -> Complex {
        let d = o.norm_sqr();
        Complex::new(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}

/// A point of the unit disk tagged with the model it lives in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub x: f64,
    pub y: f64,
    pub model: Model,
}

impl DiskPoint {
    pub fn new(x: f64, y: f64, model: Model) -> Self {
        Self { x, y, model }
    }

    pub fn klein(x: f64, y: f64) -> Self {
        Self::new(x, y, Model::Klein)
    }

    pub fn poincare(x: f64, y: f64) -> Self {
        Self::new(x, y, Model::Poincare)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_interior(&self) -> bool {
        self.norm_sqr() < 1.0
    }

    pub fn xy(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn as_complex(&self) -> Complex {
        Complex::new(self.x, self.y)
    }

    pub fn distance(&self, other: &DiskPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn expect_model(&self, model: Model) -> Result<(), GeometryError> {
        if self.model == model {
            Ok(())
        } else {
            Err(GeometryError::WrongModel { expected: model, found: self.model })
        }
    }

    fn expect_interior(&self) -> Result<(), GeometryError> {
        if self.is_interior() {
            Ok(())
        } else {
            Err(GeometryError::NotInterior(self.x, self.y))
        }
    }
}

/// Maps a Poincaré point to the Klein point on the same ray at radius
/// `s = 2u / (1 + u²)`.
pub fn poincare_to_klein(p: &DiskPoint) -> Result<DiskPoint, GeometryError> {
    p.expect_model(Model::Poincare)?;
    p.expect_interior()?;
    let f = 2.0 / (1.0 + p.norm_sqr());
    Ok(DiskPoint::klein(p.x * f, p.y * f))
}

/// Inverse of [`poincare_to_klein`]: `u = s / (1 + √(1 − s²))`.
pub fn klein_to_poincare(p: &DiskPoint) -> Result<DiskPoint, GeometryError> {
    p.expect_model(Model::Klein)?;
    p.expect_interior()?;
    let f = 1.0 / (1.0 + (1.0 - p.norm_sqr()).sqrt());
    Ok(DiskPoint::poincare(p.x * f, p.y * f))
}

/// A Klein geodesic `u·x + v·y = r` with `u² + v² = 1` and `0 ≤ r < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KleinChord {
    pub u: f64,
    pub v: f64,
    pub r: f64,
}

impl KleinChord {
    /// Normalizes `(u, v)` to unit length and flips signs so that `r ≥ 0`.
    pub fn new(u: f64, v: f64, r: f64) -> Result<Self, GeometryError> {
        let n = u.hypot(v);
        if n == 0.0 || !n.is_finite() {
            return Err(GeometryError::DegenerateChord);
        }
        let (mut u, mut v, mut r) = (u / n, v / n, r / n);
        if r < 0.0 {
            (u, v, r) = (-u, -v, -r);
        }
        if r >= 1.0 {
            return Err(GeometryError::ChordOutOfRange(r));
        }
        Ok(Self { u, v, r })
    }

    /// The chord through two distinct points.
    pub fn through(p: [f64; 2], q: [f64; 2]) -> Result<Self, GeometryError> {
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        if dx == 0.0 && dy == 0.0 {
            return Err(GeometryError::CoincidentPoints);
        }
        let (u, v) = (-dy, dx);
        Self::new(u, v, u * p[0] + v * p[1])
    }

    /// `r − (u·x + v·y)`: positive on the origin's side.
    pub fn signed_distance(&self, x: f64, y: f64) -> f64 {
        self.r - (self.u * x + self.v * y)
    }

    /// Intersection points with the unit circle.
    pub fn endpoints(&self) -> ([f64; 2], [f64; 2]) {
        let h = (1.0 - self.r * self.r).sqrt();
        let (cx, cy) = (self.u * self.r, self.v * self.r);
        ([cx - self.v * h, cy + self.u * h], [cx + self.v * h, cy - self.u * h])
    }
}

/// A Poincaré geodesic: either a circle `x² + y² + d·x + e·y + 1 = 0`
/// orthogonal to the unit circle, or a diameter with the given unit direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PoincareGeodesic {
    Circle { d: f64, e: f64 },
    Diameter { dx: f64, dy: f64 },
}

impl PoincareGeodesic {
    pub fn center(&self) -> Option<[f64; 2]> {
        match *self {
            PoincareGeodesic::Circle { d, e } => Some([-d / 2.0, -e / 2.0]),
            PoincareGeodesic::Diameter { .. } => None,
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match *self {
            PoincareGeodesic::Circle { d, e } => Some((d * d / 4.0 + e * e / 4.0 - 1.0).sqrt()),
            PoincareGeodesic::Diameter { .. } => None,
        }
    }

    /// Residual of the geodesic equation at a point.
    pub fn residual(&self, x: f64, y: f64) -> f64 {
        match *self {
            PoincareGeodesic::Circle { d, e } => x * x + y * y + d * x + e * y + 1.0,
            PoincareGeodesic::Diameter { dx, dy } => dx * y - dy * x,
        }
    }
}

/// The geodesic through two Poincaré points.
pub fn poincare_geodesic(u: &DiskPoint, v: &DiskPoint) -> Result<PoincareGeodesic, GeometryError> {
    u.expect_model(Model::Poincare)?;
    v.expect_model(Model::Poincare)?;
    u.expect_interior()?;
    v.expect_interior()?;
    if u.distance(v) <= 1e-15 {
        return Err(GeometryError::CoincidentPoints);
    }
    let (u1, u2, v1, v2) = (u.x, u.y, v.x, v.y);
    let cross = u1 * v2 - u2 * v1;
    let scale = u.radius() * v.radius();
    if cross.abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) || scale == 0.0 {
        let (x, y) = if u.norm_sqr() >= v.norm_sqr() { (u1, u2) } else { (v1, v2) };
        let n = x.hypot(y);
        let (mut dx, mut dy) = (x / n, y / n);
        if dx < 0.0 || (dx == 0.0 && dy < 0.0) {
            (dx, dy) = (-dx, -dy);
        }
        return Ok(PoincareGeodesic::Diameter { dx, dy });
    }
    let nu = u1 * u1 + u2 * u2;
    let nv = v1 * v1 + v2 * v2;
    let d = (u2 * nv - v2 * nu + u2 - v2) / cross;
    let e = (v1 * nu - u1 * nv + v1 - u1) / cross;
    Ok(PoincareGeodesic::Circle { d, e })
}

/// Inversion of `p` in the circle with the given center and radius.
pub fn invert_in_circle(p: [f64; 2], center: [f64; 2], r: f64) -> Result<[f64; 2], GeometryError> {
    let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
    let d2 = dx * dx + dy * dy;
    if d2 == 0.0 {
        return Err(GeometryError::InversionCenter);
    }
    let f = r * r / d2;
    Ok([center[0] + dx * f, center[1] + dy * f])
}

/// Orientation-preserving disk automorphism `T(z) = λ(z − a)/(āz − 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub lambda: Complex,
    pub a: Complex,
}

impl MobiusMap {
    pub fn new(lambda: Complex, a: Complex) -> Result<Self, GeometryError> {
        if (lambda.abs() - 1.0).abs() > 1e-12 {
            return Err(GeometryError::InvalidMobius("|λ| must be 1"));
        }
        if a.abs() >= 1.0 {
            return Err(GeometryError::InvalidMobius("|a| must be < 1"));
        }
        Ok(Self { lambda, a })
    }

    pub fn apply(&self, z: Complex) -> Result<Complex, GeometryError> {
        let den = self.a.conj() * z - Complex::ONE;
        if den.abs() <= 1e-300 {
            return Err(GeometryError::MobiusPole);
        }
        Ok(self.lambda * (z - self.a) / den)
    }

    /// The same map written as `(αz + β)/(β̄z + ᾱ)` with `|α|² − |β|² = 1`.
    pub fn to_su11(&self) -> (Complex, Complex) {
        // Scaling the coefficient matrix [[λ, −λa], [ā, −1]] by μ = i·s·λ^{−1/2}
        // with s = 1/√(1 − |a|²) lands in SU(1,1).
        let s = 1.0 / (1.0 - self.a.norm_sqr()).sqrt();
        let mu = Complex::I * Complex::from_polar(s, -self.lambda.arg() / 2.0);
        let alpha = mu * self.lambda;
        let beta = -(mu * self.lambda * self.a);
        (alpha, beta)
    }
}

/// Applies `(az + b)/(b̄z + ā)`.
pub fn su11_apply(a: Complex, b: Complex, z: Complex) -> Result<Complex, GeometryError> {
    let den = b.conj() * z + a.conj();
    if den.abs() <= 1e-300 {
        return Err(GeometryError::MobiusPole);
    }
    Ok((a * z + b) / den)
}

pub type Mat3 = [[f64; 3]; 3];
pub type ExactMat3 = [[AlgebraicNumber; 3]; 3];

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

fn exact_mat3_mul(a: &ExactMat3, b: &ExactMat3) -> ExactMat3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = AlgebraicNumber::zero();
            for k in 0..3 {
                if !a[i][k].is_zero() && !b[k][j].is_zero() {
                    acc = acc + &a[i][k] * &b[k][j];
                }
            }
            acc
        })
    })
}

fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn exact_det3(m: &ExactMat3) -> AlgebraicNumber {
    let minor = |a: usize, b: usize, c: usize, d: usize| &m[1][a] * &m[2][b] - &m[1][c] * &m[2][d];
    &m[0][0] * minor(1, 2, 2, 1) - &m[0][1] * minor(0, 2, 2, 0) + &m[0][2] * minor(0, 1, 1, 0)
}

fn adjugate<T, F>(get: F) -> [[T; 3]; 3]
where
    F: Fn(usize, usize, usize, usize) -> T,
{
    // adj[i][j] = cofactor of entry (j, i)
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let (r0, r1) = match j {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let (c0, c1) = match i {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            // sign (−1)^(i+j) is folded into the argument order
            if (i + j) % 2 == 0 {
                get(r0, c0, r1, c1)
            } else {
                get(r0, c1, r1, c0)
            }
        })
    })
}

/// A projective map of the plane, `X ↦ M·X` on homogeneous coordinates.
/// Carries an exact matrix when built from field data, and always a float
/// shadow of it.
#[derive(Clone, PartialEq)]
pub struct Collineation {
    exact: Option<Box<ExactMat3>>,
    m: Mat3,
}

impl fmt::Debug for Collineation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Collineation")
            .field("m", &self.m)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl Collineation {
    pub fn from_f64(m: Mat3) -> Result<Self, GeometryError> {
        let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        if scale == 0.0 || !scale.is_finite() || det3(&m).abs() <= 1e-14 * scale.powi(3) {
            return Err(GeometryError::SingularMatrix);
        }
        Ok(Self { exact: None, m })
    }

    pub fn from_exact(m: ExactMat3) -> Result<Self, GeometryError> {
        if exact_det3(&m).is_zero() {
            return Err(GeometryError::SingularMatrix);
        }
        let shadow = std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].to_f64()));
        Ok(Self { exact: Some(Box::new(m)), m: shadow })
    }

    pub fn identity() -> Self {
        let one = AlgebraicNumber::one;
        let zero = AlgebraicNumber::zero;
        Self::from_exact([[one(), zero(), zero()], [zero(), one(), zero()], [zero(), zero(), one()]])
            .expect("identity is nonsingular")
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    pub fn exact(&self) -> Option<&ExactMat3> {
        self.exact.as_deref()
    }

    /// Drops the exact matrix, keeping only the float shadow.
    pub fn to_float(&self) -> Self {
        Self { exact: None, m: self.m }
    }

    /// Applies the map to a point of the Klein disk.
    pub fn apply(&self, p: &DiskPoint) -> Result<DiskPoint, GeometryError> {
        p.expect_model(Model::Klein)?;
        let [x, y] = self.apply_xy([p.x, p.y])?;
        Ok(DiskPoint::klein(x, y))
    }

    /// The fractional linear map on plane coordinates.
    pub fn apply_xy(&self, p: [f64; 2]) -> Result<[f64; 2], GeometryError> {
        let m = &self.m;
        let w = m[2][0] * p[0] + m[2][1] * p[1] + m[2][2];
        let scale = m[2][0].abs() + m[2][1].abs() + m[2][2].abs();
        if w.abs() <= 1e-14 * scale {
            return Err(GeometryError::PointAtInfinity);
        }
        Ok([
            (m[0][0] * p[0] + m[0][1] * p[1] + m[0][2]) / w,
            (m[1][0] * p[0] + m[1][1] * p[1] + m[1][2]) / w,
        ])
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Collineation) -> Collineation {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => {
                Collineation::from_exact(exact_mat3_mul(a, b)).expect("product of nonsingular maps")
            }
            _ => Collineation { exact: None, m: mat3_mul(&self.m, &other.m) },
        }
    }

    /// Inverse map (the adjugate, which equals the inverse up to scale).
    pub fn inverse(&self) -> Collineation {
        match &self.exact {
            Some(e) => {
                let adj = adjugate(|r0, c0, r1, c1| &e[r0][c0] * &e[r1][c1] - &e[r0][c1] * &e[r1][c0]);
                // Divide by the determinant so that inverses of unimodular
                // matrices stay unimodular.
                let det_inv = exact_det3(e).inverse().expect("nonsingular");
                let m = adj.map(|row| row.map(|v| &v * &det_inv));
                Collineation::from_exact(m).expect("inverse is nonsingular")
            }
            None => {
                let m = &self.m;
                let adj = adjugate(|r0, c0, r1, c1| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]);
                let d = det3(m);
                Collineation { exact: None, m: adj.map(|row| row.map(|v| v / d)) }
            }
        }
    }

    /// Float matrix scaled so that its largest-magnitude entry is `+1`.
    pub fn normalized_f64(&self) -> Mat3 {
        let mut best = 0.0f64;
        for v in self.m.iter().flatten() {
            if v.abs() > best.abs() {
                best = *v;
            }
        }
        self.m.map(|row| row.map(|v| v / best))
    }

    /// Exact matrix divided by its first nonzero entry in row-major order,
    /// a canonical representative of the projective class.
    pub fn exact_projective_key(&self) -> Option<ExactMat3> {
        let e = self.exact.as_deref()?;
        let pivot = e.iter().flatten().find(|v| !v.is_zero())?;
        let inv = pivot.inverse().ok()?;
        Some(e.clone().map(|row| row.map(|v| &v * &inv)))
    }

    /// Equality up to a nonzero scalar. Exact when both sides carry exact
    /// matrices, otherwise compares normalized float matrices.
    pub fn projectively_eq(&self, other: &Collineation, tol: f64) -> bool {
        if let (Some(a), Some(b)) = (self.exact.as_deref(), other.exact.as_deref()) {
            let Some((pi, pj)) = (0..9).map(|k| (k / 3, k % 3)).find(|&(i, j)| !a[i][j].is_zero()) else {
                return false;
            };
            let (ap, bp) = (&a[pi][pj], &b[pi][pj]);
            if bp.is_zero() {
                return false;
            }
            return (0..3).all(|i| (0..3).all(|j| &a[i][j] * bp == &b[i][j] * ap));
        }
        let (a, b) = (self.normalized_f64(), other.normalized_f64());
        a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).abs() <= tol)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.projectively_eq(&Collineation::identity(), tol)
    }
}

#[derive(Serialize, Deserialize)]
struct CollineationDoc {
    matrix: Mat3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact: Option<ExactMat3>,
}

impl Serialize for Collineation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CollineationDoc { matrix: self.m, exact: self.exact.as_deref().cloned() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Collineation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let doc = CollineationDoc::deserialize(d)?;
        match doc.exact {
            Some(e) => Collineation::from_exact(e).map_err(D::Error::custom),
            None => Collineation::from_f64(doc.matrix).map_err(D::Error::custom),
        }
    }
}

fn rotation(phi: f64) -> Mat3 {
    let (s, c) = phi.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

/// Reflection of the Klein disk in the chord `x = cos θ`.
pub fn klein_reflection_vertical(theta: f64) -> Result<Collineation, GeometryError> {
    let (s, c) = theta.sin_cos();
    if s.abs() <= 1e-12 {
        return Err(GeometryError::DegenerateChord);
    }
    Collineation::from_f64([
        [1.0 + c * c, 0.0, -2.0 * c],
        [0.0, -s * s, 0.0],
        [2.0 * c, 0.0, -1.0 - c * c],
    ])
}

/// Reflection in an arbitrary chord, conjugating the vertical case by the
/// rotation that takes the chord normal to the x-axis.
pub fn klein_reflection(chord: &KleinChord) -> Result<Collineation, GeometryError> {
    if !(0.0..1.0).contains(&chord.r) {
        return Err(GeometryError::ChordOutOfRange(chord.r));
    }
    let phi = chord.v.atan2(chord.u);
    let a = klein_reflection_vertical(chord.r.acos())?;
    let m = mat3_mul(&mat3_mul(&rotation(phi), a.matrix()), &rotation(-phi));
    Collineation::from_f64(m)
}

/// Klein collineation of the Poincaré automorphism `(az + b)/(b̄z + ā)`.
pub fn su11_to_klein(a: Complex, b: Complex) -> Result<Collineation, GeometryError> {
    let det = a.norm_sqr() - b.norm_sqr();
    if (det - 1.0).abs() > 1e-10 {
        return Err(GeometryError::DeterminantCondition(det));
    }
    let (a1, a2, b1, b2) = (a.re, a.im, b.re, b.im);
    Collineation::from_f64([
        [a1 * a1 - a2 * a2 + b1 * b1 - b2 * b2, 2.0 * b1 * b2 - 2.0 * a1 * a2, 2.0 * a1 * b1 - 2.0 * a2 * b2],
        [2.0 * a1 * a2 + 2.0 * b1 * b2, a1 * a1 - a2 * a2 - b1 * b1 + b2 * b2, 2.0 * a1 * b2 + 2.0 * a2 * b1],
        [2.0 * a1 * b1 + 2.0 * a2 * b2, 2.0 * a1 * b2 - 2.0 * a2 * b1, a1 * a1 + a2 * a2 + b1 * b1 + b2 * b2],
    ])
}

/// Exact version of [`su11_to_klein`] over `Q(β)(i)`.
pub fn su11_to_klein_exact(a: &FieldComplex, b: &FieldComplex) -> Result<Collineation, GeometryError> {
    let det = a.norm_sqr() - b.norm_sqr();
    if !det.is_one() {
        return Err(GeometryError::DeterminantCondition(det.to_f64()));
    }
    let (a1, a2, b1, b2) = (&a.re, &a.im, &b.re, &b.im);
    let two = AlgebraicNumber::from_int(2);
    let sq = |x: &AlgebraicNumber| x * x;
    let tw = |x: &AlgebraicNumber, y: &AlgebraicNumber| &two * &(x * y);
    Collineation::from_exact([
        [sq(a1) - sq(a2) + sq(b1) - sq(b2), tw(b1, b2) - tw(a1, a2), tw(a1, b1) - tw(a2, b2)],
        [tw(a1, a2) + tw(b1, b2), sq(a1) - sq(a2) - sq(b1) + sq(b2), tw(a1, b2) + tw(a2, b1)],
        [tw(a1, b1) + tw(a2, b2), tw(a1, b2) - tw(a2, b1), sq(a1) + sq(a2) + sq(b1) + sq(b2)],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn close(a: [f64; 2], b: [f64; 2], tol: f64) -> bool {
        (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol
    }

    #[test]
    fn poincare_to_klein_examples() {
        let o = poincare_to_klein(&DiskPoint::poincare(0.0, 0.0)).unwrap();
        assert_eq!(o.xy(), [0.0, 0.0]);
        let r = 2f64.powf(-0.25);
        let k = poincare_to_klein(&DiskPoint::poincare(r, 0.0)).unwrap();
        let expected = (2.0 * 2f64.sqrt() - 2.0) * 2f64.powf(0.25);
        assert!((k.x - expected).abs() < 1e-14);
        assert!((k.x - 0.985_171_4).abs() < 1e-7);
        let h = poincare_to_klein(&DiskPoint::poincare(0.5, 0.0)).unwrap();
        assert!((h.x - 0.8).abs() < 1e-15);
        assert_eq!(h.model, Model::Klein);
    }

    #[test]
    fn klein_to_poincare_examples() {
        let s = (2.0 * 2f64.sqrt() - 2.0) * 2f64.powf(0.25);
        assert!(((1.0 - s * s).sqrt() - 0.171_572_9).abs() < 1e-7);
        let p = klein_to_poincare(&DiskPoint::klein(s, 0.0)).unwrap();
        assert!((p.x - 2f64.powf(-0.25)).abs() < 1e-14);
        let q = klein_to_poincare(&DiskPoint::klein(0.8, 0.0)).unwrap();
        assert!((q.x - 0.5).abs() < 1e-15);
        assert_eq!(klein_to_poincare(&DiskPoint::klein(0.0, 0.0)).unwrap().xy(), [0.0, 0.0]);
    }

    #[test]
    fn model_tags_are_enforced() {
        let err = poincare_to_klein(&DiskPoint::klein(0.1, 0.1)).unwrap_err();
        assert_eq!(err, GeometryError::WrongModel { expected: Model::Poincare, found: Model::Klein });
        assert!(klein_to_poincare(&DiskPoint::poincare(0.1, 0.1)).is_err());
        assert!(Collineation::identity().apply(&DiskPoint::poincare(0.1, 0.1)).is_err());
    }

    #[test]
    fn geodesic_through_two_points() {
        let u = DiskPoint::poincare(0.5, 0.0);
        let v = DiskPoint::poincare(0.0, 0.5);
        let g = poincare_geodesic(&u, &v).unwrap();
        let PoincareGeodesic::Circle { d, e } = g else { panic!("expected circle") };
        assert!((d + 2.5).abs() < 1e-14 && (e + 2.5).abs() < 1e-14);
        assert!(g.residual(0.5, 0.0).abs() < 1e-12);
        assert!(g.residual(0.0, 0.5).abs() < 1e-12);
        let c = g.center().unwrap();
        let r = g.radius().unwrap();
        let c2 = c[0] * c[0] + c[1] * c[1];
        assert!((c2 - 3.125).abs() < 1e-12);
        assert!((c2 - (1.0 + r * r)).abs() < 1e-12);
    }

    #[test]
    fn geodesic_through_origin_is_a_diameter() {
        let g = poincare_geodesic(&DiskPoint::poincare(0.3, 0.0), &DiskPoint::poincare(0.6, 0.0)).unwrap();
        assert_eq!(g, PoincareGeodesic::Diameter { dx: 1.0, dy: 0.0 });
        let same = DiskPoint::poincare(0.3, 0.2);
        assert_eq!(poincare_geodesic(&same, &same), Err(GeometryError::CoincidentPoints));
    }

    #[test]
    fn circle_inversion_examples() {
        assert_eq!(invert_in_circle([0.5, 0.0], [0.0, 0.0], 1.0).unwrap(), [2.0, 0.0]);
        assert_eq!(invert_in_circle([1.0, 0.0], [0.0, 0.0], 1.0).unwrap(), [1.0, 0.0]);
        assert_eq!(invert_in_circle([2.0, 0.0], [1.0, 0.0], 2.0).unwrap(), [5.0, 0.0]);
        assert_eq!(invert_in_circle([1.0, 0.0], [1.0, 0.0], 2.0), Err(GeometryError::InversionCenter));
    }

    #[test]
    fn mobius_examples() {
        let t = MobiusMap::new(Complex::ONE, Complex::ZERO).unwrap();
        let w = t.apply(Complex::new(0.3, 0.0)).unwrap();
        assert!((w.re + 0.3).abs() < 1e-15 && w.im == 0.0);
        let t = MobiusMap::new(Complex::ONE, Complex::new(0.5, 0.0)).unwrap();
        assert!(t.apply(Complex::new(0.5, 0.0)).unwrap().abs() < 1e-15);
        let w = t.apply(Complex::from_polar(1.0, PI / 3.0)).unwrap();
        assert!((w.abs() - 1.0).abs() < 1e-12);
        assert_eq!(t.apply(Complex::new(2.0, 0.0)), Err(GeometryError::MobiusPole));
        assert!(MobiusMap::new(Complex::new(2.0, 0.0), Complex::ZERO).is_err());
    }

    #[test]
    fn mobius_su11_form_agrees() {
        let t = MobiusMap::new(Complex::from_polar(1.0, 0.7), Complex::new(0.2, -0.4)).unwrap();
        let (a, b) = t.to_su11();
        assert!((a.norm_sqr() - b.norm_sqr() - 1.0).abs() < 1e-12);
        for z in [Complex::new(0.1, 0.2), Complex::new(-0.5, 0.3), Complex::ZERO] {
            let w1 = t.apply(z).unwrap();
            let w2 = su11_apply(a, b, z).unwrap();
            assert!((w1 - w2).abs() < 1e-12);
        }
    }

    #[test]
    fn vertical_reflection_examples() {
        let a = klein_reflection_vertical(PI / 2.0).unwrap();
        let expected = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]];
        for (row, erow) in a.matrix().iter().zip(expected.iter()) {
            for (v, e) in row.iter().zip(erow.iter()) {
                assert!((v - e).abs() < 1e-15);
            }
        }
        let p = a.apply(&DiskPoint::klein(0.3, 0.4)).unwrap();
        assert!(close(p.xy(), [-0.3, 0.4], 1e-15));

        let theta = PI / 3.0;
        let a = klein_reflection_vertical(theta).unwrap();
        let m = a.matrix();
        for t in [-0.5, 0.0, 0.3, 0.8] {
            let x = [theta.cos(), t, 1.0];
            let ax: Vec<f64> = (0..3).map(|i| (0..3).map(|j| m[i][j] * x[j]).sum()).collect();
            let s2 = theta.sin().powi(2);
            for i in 0..3 {
                assert!((ax[i] + s2 * x[i]).abs() < 1e-12);
            }
        }
        assert!(a.compose(&a).is_identity(1e-12));
        assert_eq!(klein_reflection_vertical(0.0).unwrap_err(), GeometryError::DegenerateChord);
    }

    #[test]
    fn general_reflection_examples() {
        let mirror_x = klein_reflection(&KleinChord::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        assert!(close(mirror_x.apply_xy([0.3, 0.4]).unwrap(), [-0.3, 0.4], 1e-15));
        let mirror_y = klein_reflection(&KleinChord::new(0.0, 1.0, 0.0).unwrap()).unwrap();
        assert!(close(mirror_y.apply_xy([0.3, 0.4]).unwrap(), [0.3, -0.4], 1e-15));
        let half = klein_reflection(&KleinChord::new(1.0, 0.0, 0.5).unwrap()).unwrap();
        assert!(close(half.apply_xy([0.5, 0.2]).unwrap(), [0.5, 0.2], 1e-15));
        assert!(KleinChord::new(1.0, 0.0, 1.0).is_err());
        let bad = KleinChord { u: 1.0, v: 0.0, r: 1.5 };
        assert_eq!(klein_reflection(&bad).unwrap_err(), GeometryError::ChordOutOfRange(1.5));
    }

    #[test]
    fn collineation_apply_examples() {
        let id = Collineation::identity();
        assert_eq!(id.apply(&DiskPoint::klein(0.2, -0.7)).unwrap().xy(), [0.2, -0.7]);
        let flip = Collineation::from_f64([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]).unwrap();
        assert!(close(flip.apply_xy([0.3, 0.4]).unwrap(), [-0.3, 0.4], 1e-15));
        let proj = Collineation::from_f64([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 0.0, 1.0]]).unwrap();
        assert_eq!(proj.apply_xy([-1.0, 0.5]), Err(GeometryError::PointAtInfinity));
        assert_eq!(Collineation::from_f64([[0.0; 3]; 3]).unwrap_err(), GeometryError::SingularMatrix);
    }

    #[test]
    fn su11_conversion_examples() {
        let id = su11_to_klein(Complex::ONE, Complex::ZERO).unwrap();
        assert!(id.is_identity(0.0));
        let rot = su11_to_klein(Complex::I, Complex::ZERO).unwrap();
        assert_eq!(*rot.matrix(), [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(close(rot.apply_xy([0.3, 0.1]).unwrap(), [-0.3, -0.1], 1e-15));
        assert!(matches!(
            su11_to_klein(Complex::new(2.0, 0.0), Complex::ZERO),
            Err(GeometryError::DeterminantCondition(_))
        ));
    }

    #[test]
    fn exact_inverse_and_key() {
        let b = AlgebraicNumber::beta();
        let a = FieldComplex::real(b.pow(2));
        let bb = FieldComplex::real(&AlgebraicNumber::sqrt2() * &b);
        let g = su11_to_klein_exact(&a, &bb).unwrap();
        assert!(g.compose(&g.inverse()).exact_projective_key().unwrap() == Collineation::identity().exact().unwrap().clone());
        let f = g.to_float();
        assert!(f.compose(&f.inverse()).is_identity(1e-9));
    }

    #[test]
    fn serde_shapes() {
        let p = DiskPoint::klein(0.25, -0.5);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"x":0.25,"y":-0.5,"model":"klein"}"#);
        let c = KleinChord::new(1.0, 0.0, 0.5).unwrap();
        let back: KleinChord = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        let id = Collineation::identity();
        let json = serde_json::to_string(&id).unwrap();
        assert!(json.starts_with(r#"{"matrix":[[1.0,0.0,0.0]"#));
        let back: Collineation = serde_json::from_str(&json).unwrap();
        assert_eq!(back, id);
    }

    fn arb_disk_point() -> impl Strategy<Value = (f64, f64)> {
        (0.0f64..0.999, 0.0f64..(2.0 * PI)).prop_map(|(r, t)| (r * t.cos(), r * t.sin()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn model_round_trip((x, y) in arb_disk_point()) {
            let p = DiskPoint::poincare(x, y);
            let q = klein_to_poincare(&poincare_to_klein(&p).unwrap()).unwrap();
            prop_assert!(close(q.xy(), p.xy(), 1e-12));
            let k = DiskPoint::klein(x, y);
            let k2 = poincare_to_klein(&klein_to_poincare(&k).unwrap()).unwrap();
            prop_assert!(close(k2.xy(), k.xy(), 1e-12));
        }
    }

    proptest! {
        #[test]
        fn geodesic_is_orthogonal(u in arb_disk_point(), v in arb_disk_point()) {
            let pu = DiskPoint::poincare(u.0, u.1);
            let pv = DiskPoint::poincare(v.0, v.1);
            prop_assume!(pu.distance(&pv) > 1e-6);
            let g = poincare_geodesic(&pu, &pv).unwrap();
            if let (Some(c), Some(r)) = (g.center(), g.radius()) {
                let c2 = c[0] * c[0] + c[1] * c[1];
                prop_assert!((c2 - 1.0 - r * r).abs() <= 1e-10 * c2.max(1.0));
                let scale = c2.max(1.0);
                prop_assert!(g.residual(u.0, u.1).abs() <= 1e-10 * scale);
                prop_assert!(g.residual(v.0, v.1).abs() <= 1e-10 * scale);
            }
        }

        #[test]
        fn mobius_preserves_boundary(a in arb_disk_point(), phase in 0.0f64..std::f64::consts::TAU, phi in 0.0f64..std::f64::consts::TAU) {
            let t = MobiusMap::new(Complex::from_polar(1.0, phase), Complex::new(a.0 * 0.9, a.1 * 0.9)).unwrap();
            let w = t.apply(Complex::from_polar(1.0, phi)).unwrap();
            prop_assert!((w.abs() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn reflections_fix_their_chord(phi in 0.0f64..std::f64::consts::TAU, r in 0.0f64..0.95) {
            let chord = KleinChord::new(phi.cos(), phi.sin(), r).unwrap();
            let refl = klein_reflection(&chord).unwrap();
            let (e0, e1) = chord.endpoints();
            for i in 1..=10 {
                let t = i as f64 / 11.0;
                let p = [e0[0] + t * (e1[0] - e0[0]), e0[1] + t * (e1[1] - e0[1])];
                let q = refl.apply_xy(p).unwrap();
                prop_assert!(close(p, q, 1e-10));
            }
            prop_assert!(refl.compose(&refl).is_identity(1e-10));
        }

        #[test]
        fn su11_commutes_with_model_change(a in arb_disk_point(), phase in 0.0f64..std::f64::consts::TAU, z in arb_disk_point()) {
            let t = MobiusMap::new(Complex::from_polar(1.0, phase), Complex::new(a.0 * 0.8, a.1 * 0.8)).unwrap();
            let (alpha, beta) = t.to_su11();
            let g = su11_to_klein(alpha, beta).unwrap();
            let zp = DiskPoint::poincare(z.0 * 0.95, z.1 * 0.95);
            let w = su11_apply(alpha, beta, zp.as_complex()).unwrap();
            let lhs = poincare_to_klein(&DiskPoint::poincare(w.re, w.im)).unwrap();
            let rhs = g.apply(&poincare_to_klein(&zp).unwrap()).unwrap();
            prop_assert!(close(lhs.xy(), rhs.xy(), 1e-10));
        }
    }
}
