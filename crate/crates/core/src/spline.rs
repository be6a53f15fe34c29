//! Piecewise polynomial splines on a partition of the octagon that are
//! invariant under the Bolza group.
//!
//! Smoothness across an edge with line `l` is the divisibility of the
//! difference of the neighbouring pieces by `l^{r+1}`. It is tested by
//! rewriting the difference in the frame where `l` is `x̃ = 0` and zeroing
//! the coefficients of `x̃^0 … x̃^r`. Across a paired boundary edge the
//! outside piece is the pullback of the partner cell by the generator.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Collineation, DiskPoint, GeometryError};
use crate::group::{BolzaGroup, GroupError, Location};
use crate::linalg::{nullspace, Nullspace};
use crate::partition::{Partition, PartitionDoc, PartitionError};
use crate::poly::{monomial_count, monomial_exponents, monomial_index, BivariatePolynomial, LineForm, PolyError};

pub const DIVISIBILITY_TOLERANCE: f64 = 1e-10;
pub const CONCURRENCY_TOLERANCE: f64 = 1e-10;
/// Relative singular-value cutoff of the monomial conformality oracle.
pub const ORACLE_TOLERANCE: f64 = 1e-8;
/// Default relative singular-value cutoff for spline bases.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Largest admissible per-row residual of a basis spline.
pub const RESIDUAL_BOUND: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SplineError {
    #[error("smoothness must be at least -1, got {0}")]
    InvalidSmoothness(i64),
    #[error("at least two lines are required, got {0}")]
    TooFewLines(usize),
    #[error("lines are not concurrent (residual {0:e})")]
    NotConcurrent(f64),
    #[error("partition has no cells")]
    EmptyPartition,
    #[error("edge {0} is not an interior edge")]
    NotInteriorEdge(usize),
    #[error("boundary pair {0} is malformed")]
    MalformedPair(usize),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("basis has {found} coefficients for cell {cell}, expected {expected}")]
    CoefficientMismatch { cell: usize, expected: usize, found: usize },
    #[error("invalid basis document: {0}")]
    Schema(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `q` with `pi − pj = l^{r+1}·q`, or `None` when the difference is not
/// divisible. Coefficients count as zero below `1e−10` times the size of the
/// difference (at least 1).
pub fn cofactor_check(
    pi: &BivariatePolynomial,
    pj: &BivariatePolynomial,
    l: &LineForm,
    r: usize,
) -> Option<BivariatePolynomial> {
    let n = pi.degree().max(pj.degree());
    let diff = &pi.with_degree(n) - &pj.with_degree(n);
    let tol = DIVISIBILITY_TOLERANCE * diff.max_abs().max(1.0);
    let rotated = l.to_frame(&diff);
    for ((s, _), c) in rotated.terms() {
        if s <= r && c.abs() > tol {
            return None;
        }
    }
    if n < r + 1 {
        return Some(BivariatePolynomial::zero(0));
    }
    let qd = n - r - 1;
    let mut coeffs = vec![0.0; monomial_count(qd)];
    for ((s, t), c) in rotated.terms() {
        if s > r {
            coeffs[monomial_index(s - r - 1, t)] = c;
        }
    }
    let q = BivariatePolynomial::from_coeffs(qd, coeffs).expect("sized to degree");
    Some(l.from_frame(&q))
}

/// Dimension of the solution space of `Σ_i (α_i x + β_i y)^{r+1} q_i ≡ 0`
/// over `N` pairwise non-proportional lines and cofactors of degree
/// `n − r − 1`.
pub fn conformality_dim_formula(lines: usize, degree: usize, smoothness: usize) -> Result<usize, SplineError> {
    if lines < 2 {
        return Err(SplineError::TooFewLines(lines));
    }
    let (nn, n, r) = (lines as i64, degree as i64, smoothness as i64);
    let f = (r + 1) / (nn - 1);
    let first = n - r - f;
    if first <= 0 {
        return Ok(0);
    }
    let second = (nn - 1) * n - (nn + 1) * r + (nn - 3) + (nn - 1) * f;
    Ok((first * second / 2).max(0) as usize)
}

/// Numerical solution space of the conformality equation at a vertex.
#[derive(Debug, Clone)]
pub struct ConformalitySolution {
    /// Common point of the lines.
    pub center: [f64; 2],
    /// Degree of each cofactor, `None` when `n < r + 1`.
    pub cofactor_degree: Option<usize>,
    /// Each entry is one tuple `(q_1, …, q_N)` in the original coordinates.
    pub basis: Vec<Vec<BivariatePolynomial>>,
    pub nullspace: Nullspace,
}

impl ConformalitySolution {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Common point of `lines`, checked to `1e−10`.
pub fn common_point(lines: &[LineForm]) -> Result<[f64; 2], SplineError> {
    if lines.len() < 2 {
        return Err(SplineError::TooFewLines(lines.len()));
    }
    let l0 = lines[0];
    let center = lines[1..]
        .iter()
        .find_map(|l| {
            let det = l0.alpha * l.beta - l0.beta * l.alpha;
            (det.abs() > 1e-12).then(|| {
                [(-l0.gamma * l.beta + l.gamma * l0.beta) / det, (-l0.alpha * l.gamma + l.alpha * l0.gamma) / det]
            })
        })
        .ok_or(SplineError::NotConcurrent(f64::INFINITY))?;
    let residual = lines.iter().map(|l| l.eval(center[0], center[1]).abs()).fold(0.0, f64::max);
    if residual.is_nan() || residual > CONCURRENCY_TOLERANCE {
        return Err(SplineError::NotConcurrent(residual));
    }
    Ok(center)
}

/// Brute-force solution of `Σ_i l_i^{r+1} q_i ≡ 0` for concurrent lines,
/// from the monomial coefficients of every product `l_i^{r+1}·x^a y^b`.
pub fn conformality_nullspace(lines: &[LineForm], degree: usize, smoothness: usize) -> Result<ConformalitySolution, SplineError> {
    conformality_nullspace_with_tol(lines, degree, smoothness, ORACLE_TOLERANCE)
}

/// [`conformality_nullspace`] with an explicit relative singular-value cutoff.
pub fn conformality_nullspace_with_tol(
    lines: &[LineForm],
    degree: usize,
    smoothness: usize,
    tol: f64,
) -> Result<ConformalitySolution, SplineError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(SplineError::InvalidTolerance(tol));
    }
    let center = common_point(lines)?;
    if degree < smoothness + 1 {
        return Ok(ConformalitySolution {
            center,
            cofactor_degree: None,
            basis: Vec::new(),
            nullspace: nullspace(&DMatrix::zeros(monomial_count(degree), 0), tol),
        });
    }
    let qd = degree - smoothness - 1;
    let per = monomial_count(qd);
    let rows = monomial_count(degree);
    let mut a = DMatrix::zeros(rows, lines.len() * per);
    for (i, l) in lines.iter().enumerate() {
        let power = BivariatePolynomial::linear(l.alpha, l.beta, 0.0).pow(smoothness + 1);
        for k in 0..per {
            let (ei, ej) = monomial_exponents(k);
            let prod = (&power * &BivariatePolynomial::monomial(ei, ej, 1.0)).with_degree(degree);
            for (row, c) in prod.coeffs().iter().enumerate() {
                a[(row, i * per + k)] = *c;
            }
        }
    }
    let ns = nullspace(&a, tol);
    let basis = ns
        .basis
        .iter()
        .map(|v| {
            (0..lines.len())
                .map(|i| {
                    let q = BivariatePolynomial::from_coeffs(qd, v[i * per..(i + 1) * per].to_vec()).expect("sized");
                    q.translate(-center[0], -center[1])
                })
                .collect()
        })
        .collect();
    Ok(ConformalitySolution { center, cofactor_degree: Some(qd), basis, nullspace: ns })
}

/// `(u, v)` with `p(g(x, y)) = u(x, y) / v(x, y)`: `u` is the degree-`n`
/// homogenization of `p` evaluated on the rows of `g`, and `v` is the `n`th
/// power of the third row.
pub fn pullback(p: &BivariatePolynomial, g: &Collineation) -> (BivariatePolynomial, BivariatePolynomial) {
    let m = g.matrix();
    let rows: Vec<BivariatePolynomial> =
        m.iter().map(|row| BivariatePolynomial::linear(row[0], row[1], row[2])).collect();
    let n = p.degree();
    let px: Vec<BivariatePolynomial> = (0..=n).map(|e| rows[0].pow(e)).collect();
    let py: Vec<BivariatePolynomial> = (0..=n).map(|e| rows[1].pow(e)).collect();
    let pw: Vec<BivariatePolynomial> = (0..=n).map(|e| rows[2].pow(e)).collect();
    let mut u = BivariatePolynomial::zero(n);
    for ((i, j), c) in p.terms() {
        if c != 0.0 {
            let term = &(&px[i] * &py[j]) * &pw[n - i - j];
            u = &u + &term.scale(c).with_degree(n);
        }
    }
    (u, pw[n].with_degree(n))
}

/// What a constraint row enforces: the coefficient of `x̃^order ỹ^power` in
/// the frame of the edge line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RowOrigin {
    InteriorEdge { edge: usize, order: usize, power: usize },
    BoundaryPair { pair: usize, generator: u8, order: usize, power: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintRow {
    /// `(column, value)` with distinct, increasing columns.
    pub entries: Vec<(usize, f64)>,
    pub origin: RowOrigin,
}

impl ConstraintRow {
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.entries.iter().map(|&(c, v)| v * x[c]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }
}

/// Sparse linear constraints over the concatenated per-cell coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem {
    pub cols: usize,
    pub rows: Vec<ConstraintRow>,
}

impl ConstraintSystem {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.rows.len(), self.cols);
        for (i, row) in self.rows.iter().enumerate() {
            for &(c, v) in &row.entries {
                a[(i, c)] = v;
            }
        }
        a
    }

    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.dot(x)).collect()
    }

    /// Copy with row `i` multiplied by `factors[i]`.
    pub fn scaled(&self, factors: &[f64]) -> ConstraintSystem {
        let rows = self
            .rows
            .iter()
            .zip(factors)
            .map(|(r, &f)| ConstraintRow {
                entries: r.entries.iter().map(|&(c, v)| (c, v * f)).collect(),
                origin: r.origin,
            })
            .collect();
        ConstraintSystem { cols: self.cols, rows }
    }

    pub fn interior_row_count(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r.origin, RowOrigin::InteriorEdge { .. })).count()
    }

    pub fn periodic_row_count(&self) -> usize {
        self.nrows() - self.interior_row_count()
    }
}

/// Dense accumulator for one block of rows before sparsification.
struct RowBlock {
    rows: Vec<(RowOrigin, Vec<(usize, f64)>)>,
}

impl RowBlock {
    fn finish(self) -> Vec<ConstraintRow> {
        let scale = self
            .rows
            .iter()
            .map(|(_, e)| e.iter().map(|(_, v)| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let scale = if scale > 0.0 { 1.0 / scale } else { 1.0 };
        self.rows
            .into_iter()
            .map(|(origin, mut entries)| {
                entries.sort_by_key(|&(c, _)| c);
                let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
                for (c, v) in entries {
                    match merged.last_mut() {
                        Some((lc, lv)) if *lc == c => *lv += v,
                        _ => merged.push((c, v)),
                    }
                }
                let entries = merged.into_iter().filter(|&(_, v)| v != 0.0).map(|(c, v)| (c, v * scale)).collect();
                ConstraintRow { entries, origin }
            })
            .collect()
    }
}

/// `S_n^r` periodic splines on a validated partition.
#[derive(Debug, Clone)]
pub struct SplineSpace {
    group: BolzaGroup,
    partition: Partition,
    degree: usize,
    smoothness: i64,
}

impl SplineSpace {
    pub fn new(group: BolzaGroup, partition: Partition, degree: usize, smoothness: i64) -> Result<Self, SplineError> {
        if smoothness < -1 {
            return Err(SplineError::InvalidSmoothness(smoothness));
        }
        if partition.cells().is_empty() {
            return Err(SplineError::EmptyPartition);
        }
        Ok(Self { group, partition, degree, smoothness })
    }

    pub fn group(&self) -> &BolzaGroup {
        &self.group
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn smoothness(&self) -> i64 {
        self.smoothness
    }

    /// Coefficients per cell.
    pub fn monomials(&self) -> usize {
        monomial_count(self.degree)
    }

    pub fn cols(&self) -> usize {
        self.partition.cells().len() * self.monomials()
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.smoothness >= self.degree as i64 {
            out.push(format!(
                "smoothness {} is not below degree {}; only constants are expected",
                self.smoothness, self.degree
            ));
        }
        out
    }

    fn highest_order(&self) -> Option<usize> {
        usize::try_from(self.smoothness).ok()
    }

    /// Rows zeroing the coefficients of `x̃^0 … x̃^r` of `p_i − p_j` across
    /// an interior edge.
    pub fn interior_constraint_rows(&self, edge: usize) -> Result<Vec<ConstraintRow>, SplineError> {
        let e = self.partition.edges().get(edge).ok_or(SplineError::NotInteriorEdge(edge))?;
        if !e.is_interior() {
            return Err(SplineError::NotInteriorEdge(edge));
        }
        let Some(r) = self.highest_order() else { return Ok(Vec::new()) };
        let n = self.degree;
        let m = self.monomials();
        let (ci, cj) = (e.cells[0], e.cells[1]);
        let rotated: Vec<BivariatePolynomial> = (0..m)
            .map(|k| {
                let (a, b) = monomial_exponents(k);
                e.line.to_frame(&BivariatePolynomial::monomial(a, b, 1.0).with_degree(n))
            })
            .collect();
        let mut block = RowBlock { rows: Vec::new() };
        for s in 0..=r.min(n) {
            for t in 0..=(n - s) {
                let mut entries = Vec::with_capacity(2 * m);
                for (k, p) in rotated.iter().enumerate() {
                    let c = p.coeff(s, t);
                    entries.push((ci * m + k, c));
                    entries.push((cj * m + k, -c));
                }
                block.rows.push((RowOrigin::InteriorEdge { edge, order: s, power: t }, entries));
            }
        }
        Ok(block.finish())
    }

    /// Rows for a boundary pair whose generator `g` carries the edge (cell
    /// `i`) onto its partner (cell `j`). Across the partner the outside piece
    /// is `p_i ∘ g⁻¹ = u / v`, and `p_j·v − u` must be divisible by
    /// `l^{r+1}` for the partner line `l`.
    pub fn periodic_constraint_rows(&self, pair: usize) -> Result<Vec<ConstraintRow>, SplineError> {
        let bp = self.partition.boundary_pairs().get(pair).ok_or(SplineError::MalformedPair(pair))?;
        let edges = self.partition.edges();
        let partner = edges.get(bp.partner).ok_or(SplineError::MalformedPair(pair))?;
        let ncells = self.partition.cells().len();
        if bp.edge_cell >= ncells || bp.partner_cell >= ncells {
            return Err(SplineError::MalformedPair(pair));
        }
        let Some(r) = self.highest_order() else { return Ok(Vec::new()) };
        let h = self.group.generator(bp.generator)?.klein().inverse().to_float();
        let n = self.degree;
        let m = self.monomials();
        let line = partner.line;
        let mut outside = Vec::with_capacity(m);
        let mut inside = Vec::with_capacity(m);
        let mut v = None;
        for k in 0..m {
            let (a, b) = monomial_exponents(k);
            let mono = BivariatePolynomial::monomial(a, b, 1.0).with_degree(n);
            let (u, vk) = pullback(&mono, &h);
            outside.push(line.to_frame(&u.with_degree(2 * n)));
            let v = v.get_or_insert(vk);
            inside.push(line.to_frame(&(&mono * v).with_degree(2 * n)));
        }
        let (ci, cj) = (bp.edge_cell, bp.partner_cell);
        let mut block = RowBlock { rows: Vec::new() };
        for s in 0..=r.min(2 * n) {
            for t in 0..=(2 * n - s) {
                let mut entries = Vec::with_capacity(2 * m);
                for k in 0..m {
                    entries.push((cj * m + k, inside[k].coeff(s, t)));
                    entries.push((ci * m + k, -outside[k].coeff(s, t)));
                }
                block
                    .rows
                    .push((RowOrigin::BoundaryPair { pair, generator: bp.generator, order: s, power: t }, entries));
            }
        }
        Ok(block.finish())
    }

    /// All interior and periodic rows. Columns run over cells in index
    /// order, graded-lex monomials within each cell.
    pub fn assemble(&self) -> Result<ConstraintSystem, SplineError> {
        let interior: Vec<usize> =
            (0..self.partition.edges().len()).filter(|&e| self.partition.edges()[e].is_interior()).collect();
        let blocks: Vec<Vec<ConstraintRow>> =
            interior.par_iter().map(|&e| self.interior_constraint_rows(e)).collect::<Result<_, _>>()?;
        let pairs: Vec<Vec<ConstraintRow>> = (0..self.partition.boundary_pairs().len())
            .into_par_iter()
            .map(|p| self.periodic_constraint_rows(p))
            .collect::<Result<_, _>>()?;
        let rows = blocks.into_iter().chain(pairs).flatten().collect();
        Ok(ConstraintSystem { cols: self.cols(), rows })
    }

    pub fn constant_spline(&self, c: f64) -> PeriodicSpline {
        PeriodicSpline {
            pieces: (0..self.partition.cells().len())
                .map(|_| BivariatePolynomial::constant(c).with_degree(self.degree))
                .collect(),
        }
    }

    pub fn spline_from_vector(&self, x: &[f64]) -> PeriodicSpline {
        let m = self.monomials();
        PeriodicSpline {
            pieces: x
                .chunks(m)
                .map(|c| BivariatePolynomial::from_coeffs(self.degree, c.to_vec()).expect("chunk sized to degree"))
                .collect(),
        }
    }

    /// Orthonormal nullspace basis of `system`, with rank decided by the
    /// relative singular-value cutoff `tol`.
    pub fn solve_basis(&self, system: &ConstraintSystem, tol: f64) -> Result<SplineBasis, SplineError> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(SplineError::InvalidTolerance(tol));
        }
        if self.partition.cells().is_empty() || system.cols == 0 {
            return Err(SplineError::EmptyPartition);
        }
        let ns = nullspace(&system.dense(), tol);
        let mut vectors = ns.basis.clone();
        for v in &mut vectors {
            let lead = v.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
            if lead < 0.0 {
                v.iter_mut().for_each(|c| *c = -*c);
            }
        }
        let max_residual = vectors
            .iter()
            .flat_map(|v| system.residuals(v))
            .map(f64::abs)
            .fold(0.0, f64::max);
        let splines: Vec<PeriodicSpline> = vectors.iter().map(|v| self.spline_from_vector(v)).collect();
        let corner_spread = splines.iter().map(|s| self.corner_spread(s)).fold(0.0, f64::max);
        let diagnostics = BasisDiagnostics {
            rows: system.nrows(),
            interior_rows: system.interior_row_count(),
            periodic_rows: system.periodic_row_count(),
            cols: system.cols,
            rank: ns.rank,
            sigma_max: ns.sigma_max,
            cutoff: ns.cutoff,
            max_residual,
            residual_bound: RESIDUAL_BOUND,
            corner_spread,
            warnings: self.warnings(),
        };
        Ok(SplineBasis { space: self.clone(), tolerance: tol, splines, diagnostics })
    }

    /// Largest difference between the values that the pieces meeting at the
    /// octagon corners take there. All corners are one point of the surface.
    pub fn corner_spread(&self, spline: &PeriodicSpline) -> f64 {
        let octagon = self.group.octagon();
        let adjacency = self.partition.adjacency();
        let mut values = Vec::new();
        for (vi, p) in self.partition.vertices().iter().enumerate() {
            if let Location::OnCorner(_) = octagon.contains(&DiskPoint::klein(p[0], p[1])) {
                for &c in &adjacency.vertex_cells[vi] {
                    values.push(spline.pieces[c].eval(p[0], p[1]));
                }
            }
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if values.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }

    /// Piece of the cell containing `q`, which must lie in the closed
    /// octagon. No group action is applied.
    pub fn eval_in_domain(&self, spline: &PeriodicSpline, q: &DiskPoint) -> Result<f64, SplineError> {
        let loc = self.partition.locate_cell(&self.group, q)?;
        Ok(spline.pieces[loc.cell].eval(q.x, q.y))
    }

    /// Value at any interior Klein point, through its canonical
    /// representative in the fundamental domain.
    pub fn eval(&self, spline: &PeriodicSpline, p: &DiskPoint) -> Result<f64, SplineError> {
        Ok(self.eval_many(std::slice::from_ref(spline), p)?[0])
    }

    pub fn eval_many(&self, splines: &[PeriodicSpline], p: &DiskPoint) -> Result<Vec<f64>, SplineError> {
        let canonical = self.group.canonicalize(p)?;
        let q = canonical.point;
        let loc = self.partition.locate_cell(&self.group, &q)?;
        Ok(splines.iter().map(|s| s.pieces[loc.cell].eval(q.x, q.y)).collect())
    }
}

/// One polynomial per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSpline {
    pub pieces: Vec<BivariatePolynomial>,
}

impl PeriodicSpline {
    pub fn coefficients(&self) -> Vec<f64> {
        self.pieces.iter().flat_map(|p| p.coeffs().iter().copied()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisDiagnostics {
    pub rows: usize,
    pub interior_rows: usize,
    pub periodic_rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub sigma_max: f64,
    pub cutoff: f64,
    pub max_residual: f64,
    pub residual_bound: f64,
    pub corner_spread: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SplineBasis {
    pub space: SplineSpace,
    pub tolerance: f64,
    pub splines: Vec<PeriodicSpline>,
    pub diagnostics: BasisDiagnostics,
}

/// On-disk form of a spline basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplineBasisDoc {
    pub degree: usize,
    pub smoothness: i64,
    pub tolerance: f64,
    pub partition: PartitionDoc,
    pub dimension: usize,
    /// `splines[s][c]` is the coefficient vector of spline `s` on cell `c`.
    pub splines: Vec<Vec<Vec<f64>>>,
    pub diagnostics: BasisDiagnostics,
}

impl SplineBasis {
    pub fn dimension(&self) -> usize {
        self.splines.len()
    }

    pub fn residual_ok(&self) -> bool {
        self.diagnostics.max_residual < RESIDUAL_BOUND
    }

    pub fn eval(&self, p: &DiskPoint) -> Result<Vec<f64>, SplineError> {
        self.space.eval_many(&self.splines, p)
    }

    pub fn to_doc(&self) -> SplineBasisDoc {
        SplineBasisDoc {
            degree: self.space.degree,
            smoothness: self.space.smoothness,
            tolerance: self.tolerance,
            partition: self.space.partition.to_doc(),
            dimension: self.dimension(),
            splines: self
                .splines
                .iter()
                .map(|s| s.pieces.iter().map(|p| p.coeffs().to_vec()).collect())
                .collect(),
            diagnostics: self.diagnostics.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("basis serializes")
    }

    pub fn from_doc(doc: SplineBasisDoc, group: BolzaGroup) -> Result<Self, SplineError> {
        let partition = Partition::from_doc(&doc.partition, &group)?;
        let space = SplineSpace::new(group, partition, doc.degree, doc.smoothness)?;
        if doc.dimension != doc.splines.len() {
            return Err(SplineError::Schema(format!(
                "dimension {} but {} splines",
                doc.dimension,
                doc.splines.len()
            )));
        }
        let m = space.monomials();
        let ncells = space.partition.cells().len();
        let mut splines = Vec::with_capacity(doc.splines.len());
        for s in doc.splines {
            if s.len() != ncells {
                return Err(SplineError::Schema(format!("spline has {} cells, partition has {ncells}", s.len())));
            }
            let pieces = s
                .into_iter()
                .enumerate()
                .map(|(cell, c)| {
                    if c.len() != m {
                        return Err(SplineError::CoefficientMismatch { cell, expected: m, found: c.len() });
                    }
                    Ok(BivariatePolynomial::from_coeffs(space.degree, c)?)
                })
                .collect::<Result<_, SplineError>>()?;
            splines.push(PeriodicSpline { pieces });
        }
        Ok(Self { space, tolerance: doc.tolerance, splines, diagnostics: doc.diagnostics })
    }

    pub fn from_json(json: &str, group: BolzaGroup) -> Result<Self, SplineError> {
        let doc: SplineBasisDoc = serde_json::from_str(json).map_err(|e| SplineError::Schema(e.to_string()))?;
        Self::from_doc(doc, group)
    }
}
