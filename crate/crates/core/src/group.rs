//! The Fuchsian group of the Bolza surface.
//!
//! Generators `g_0, …, g_7 = a, b̄, c, d̄, ā, b, c̄, d` are hyperbolic
//! translations pairing opposite sides of the regular octagon with interior
//! angles `π/4`; `g_k⁻¹ = g_{k+4}`. Matrices are exact over `Q(β)` in both
//! the Poincaré (SU(1,1)) and Klein (projective) models.

use std::collections::{HashMap, HashSet, VecDeque};
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::field::{AlgebraicNumber, FieldComplex};
use crate::geometry::{
    klein_to_poincare, mat3_mul, su11_to_klein_exact, Collineation, DiskPoint, ExactMat3,
    GeometryError, KleinChord, Mat3, Model,
};

/// Tolerance used when classifying points against octagon sides.
pub const SIDE_TOLERANCE: f64 = 1e-10;

/// Number of generators (four translations and their inverses).
pub const GENERATOR_COUNT: u8 = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("generator index {0} out of range 0..8")]
    BadGenerator(u8),
    #[error("canonicalization did not terminate after {iterations} steps at ({x}, {y})")]
    NoConvergence { iterations: usize, x: f64, y: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type Word = Vec<u8>;

pub fn inverse_generator(k: u8) -> u8 {
    (k + 4) % GENERATOR_COUNT
}

pub fn inverse_word(word: &[u8]) -> Word {
    word.iter().rev().map(|&k| inverse_generator(k)).collect()
}

/// Concatenates two words, cancelling adjacent inverse pairs.
pub fn reduce_concat(a: &[u8], b: &[u8]) -> Word {
    let mut out: Word = a.to_vec();
    for &k in b {
        if out.last() == Some(&inverse_generator(k)) {
            out.pop();
        } else {
            out.push(k);
        }
    }
    out
}

pub type PoincareMatrix = [[FieldComplex; 2]; 2];

fn half() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(2))
}

/// `cos(kπ/4)` as an exact field element.
pub fn cos_eighth_turn(k: i64) -> AlgebraicNumber {
    let r = AlgebraicNumber::sqrt2().scale(&half());
    match k.rem_euclid(8) {
        0 => AlgebraicNumber::one(),
        1 | 7 => r,
        2 | 6 => AlgebraicNumber::zero(),
        3 | 5 => -r,
        _ => AlgebraicNumber::from_int(-1),
    }
}

/// `sin(kπ/4)` as an exact field element.
pub fn sin_eighth_turn(k: i64) -> AlgebraicNumber {
    cos_eighth_turn(k - 2)
}

/// Poincaré matrix `[[β², e^{ikπ/4}√2β], [e^{−ikπ/4}√2β, β²]]` of `g_k`.
pub fn bolza_poincare_matrix(k: u8) -> Result<PoincareMatrix, GroupError> {
    if k >= GENERATOR_COUNT {
        return Err(GroupError::BadGenerator(k));
    }
    let beta = AlgebraicNumber::beta();
    let a = FieldComplex::real(beta.pow(2));
    let s2b = &AlgebraicNumber::sqrt2() * &beta;
    let b = FieldComplex::new(&s2b * &cos_eighth_turn(k.into()), &s2b * &sin_eighth_turn(k.into()));
    Ok([[a.clone(), b.clone()], [b.conj(), a.conj()]])
}

/// Klein matrix of `g_k` in closed form:
/// entries `3+2√2 ± (2+2√2)cos(kπ/2)`, `(2+2√2)sin(kπ/2)`,
/// `(2+2√2)^{3/2}(cos, sin)(kπ/4)` and `5+4√2`.
pub fn bolza_klein_matrix(k: u8) -> Result<ExactMat3, GroupError> {
    if k >= GENERATOR_COUNT {
        return Err(GroupError::BadGenerator(k));
    }
    let k = i64::from(k);
    let s2 = AlgebraicNumber::sqrt2();
    let int = AlgebraicNumber::from_int;
    let p = int(3) + int(2) * &s2;
    let q = int(2) + int(2) * &s2;
    // (2 + 2√2)^{3/2} = 2√2·β³
    let r = int(2) * &s2 * AlgebraicNumber::beta().pow(3);
    let s = int(5) + int(4) * &s2;
    let (c2, sn2) = (cos_eighth_turn(2 * k), sin_eighth_turn(2 * k));
    let (c1, s1) = (cos_eighth_turn(k), sin_eighth_turn(k));
    Ok([
        [&p + &q * &c2, &q * &sn2, &r * &c1],
        [&q * &sn2, &p - &q * &c2, &r * &s1],
        [&r * &c1, &r * &s1, s],
    ])
}

fn poincare_mul(a: &PoincareMatrix, b: &PoincareMatrix) -> PoincareMatrix {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0].mul(&b[0][j]).add(&a[i][1].mul(&b[1][j]))))
}

pub fn poincare_det(m: &PoincareMatrix) -> FieldComplex {
    m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0]))
}

fn poincare_identity() -> PoincareMatrix {
    [[FieldComplex::one(), FieldComplex::zero()], [FieldComplex::zero(), FieldComplex::one()]]
}

/// `Mᵀ·J·M` with `J = diag(1, 1, −1)`.
pub fn lorentz_form(m: &ExactMat3) -> ExactMat3 {
    let sign = [1i64, 1, -1];
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = AlgebraicNumber::zero();
            for (k, &s) in sign.iter().enumerate() {
                let t = &m[k][i] * &m[k][j];
                acc = if s > 0 { acc + t } else { acc - t };
            }
            acc
        })
    })
}

/// An element of the group with a witnessing word and exact matrices in
/// both models.
#[derive(Clone, PartialEq)]
pub struct GroupElement {
    word: Word,
    poincare: PoincareMatrix,
    klein: Collineation,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupElement").field("word", &self.word).finish_non_exhaustive()
    }
}

impl GroupElement {
    pub fn identity() -> Self {
        Self { word: Word::new(), poincare: poincare_identity(), klein: Collineation::identity() }
    }

    pub fn generator(k: u8) -> Result<Self, GroupError> {
        let klein = Collineation::from_exact(bolza_klein_matrix(k)?)?;
        Ok(Self { word: vec![k], poincare: bolza_poincare_matrix(k)?, klein })
    }

    pub fn from_word(word: &[u8]) -> Result<Self, GroupError> {
        word.iter().try_fold(Self::identity(), |acc, &k| Ok(acc.mul(&Self::generator(k)?)))
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn poincare(&self) -> &PoincareMatrix {
        &self.poincare
    }

    pub fn klein(&self) -> &Collineation {
        &self.klein
    }

    /// `self ∘ other`.
    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            word: reduce_concat(&self.word, &other.word),
            poincare: poincare_mul(&self.poincare, &other.poincare),
            klein: self.klein.compose(&other.klein),
        }
    }

    pub fn inv(&self) -> GroupElement {
        let [[a, b], [c, d]] = &self.poincare;
        GroupElement {
            word: inverse_word(&self.word),
            poincare: [[d.clone(), b.neg()], [c.neg(), a.clone()]],
            klein: self.klein.inverse(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.klein.exact().is_some_and(|m| {
            Collineation::identity().exact().is_some_and(|id| id == m)
        })
    }

    /// Klein matrix of the Poincaré part, via the SU(1,1) conversion.
    pub fn klein_from_poincare(&self) -> Result<Collineation, GeometryError> {
        su11_to_klein_exact(&self.poincare[0][0], &self.poincare[0][1])
    }

    pub fn apply(&self, p: &DiskPoint) -> Result<DiskPoint, GeometryError> {
        self.klein.apply(p)
    }
}

/// Identification of one octagon side with another by a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SidePairing {
    pub generator: u8,
    pub from_side: usize,
    pub to_side: usize,
    /// `false` when `g(corner from_side) = corner to_side`, `true` when the
    /// endpoints are swapped.
    pub flip: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum Location {
    Inside,
    OnSide(usize),
    OnCorner(usize),
    Outside,
}

/// Radius of the Klein octagon corners, `(2√2 − 2)·2^{1/4}`.
pub fn klein_corner_radius() -> f64 {
    (2.0 * 2f64.sqrt() - 2.0) * 2f64.powf(0.25)
}

/// Radius of the Poincaré octagon corners, `2^{−1/4}`.
pub fn poincare_corner_radius() -> f64 {
    2f64.powf(-0.25)
}

pub fn corner_angle(k: usize) -> f64 {
    PI / 8.0 + k as f64 * PI / 4.0
}

/// The regular octagon in the Klein disk. Side `k` joins corner `k` to
/// corner `k + 1 (mod 8)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalOctagon {
    corners: [DiskPoint; 8],
    sides: [KleinChord; 8],
}

impl Default for FundamentalOctagon {
    fn default() -> Self {
        Self::new()
    }
}

impl FundamentalOctagon {
    pub fn new() -> Self {
        let rho = klein_corner_radius();
        let corners: [DiskPoint; 8] = std::array::from_fn(|k| {
            let t = corner_angle(k);
            DiskPoint::klein(rho * t.cos(), rho * t.sin())
        });
        let sides = std::array::from_fn(|k| {
            KleinChord::through(corners[k].xy(), corners[(k + 1) % 8].xy()).expect("distinct corners")
        });
        Self { corners, sides }
    }

    pub fn corners(&self) -> &[DiskPoint; 8] {
        &self.corners
    }

    pub fn sides(&self) -> &[KleinChord; 8] {
        &self.sides
    }

    pub fn side_endpoints(&self, k: usize) -> (DiskPoint, DiskPoint) {
        (self.corners[k % 8], self.corners[(k + 1) % 8])
    }

    /// Euclidean area of the octagon.
    pub fn area(&self) -> f64 {
        let rho = klein_corner_radius();
        // eight isosceles triangles with apex angle π/4
        8.0 * 0.5 * rho * rho * (PI / 4.0).sin()
    }

    pub fn contains(&self, p: &DiskPoint) -> Location {
        self.contains_with_tol(p, SIDE_TOLERANCE)
    }

    pub fn contains_with_tol(&self, p: &DiskPoint, tol: f64) -> Location {
        let mut on = [false; 8];
        for (k, side) in self.sides.iter().enumerate() {
            let d = side.signed_distance(p.x, p.y);
            if d < -tol {
                return Location::Outside;
            }
            on[k] = d.abs() <= tol;
        }
        let on_sides: Vec<usize> = (0..8).filter(|&k| on[k]).collect();
        match on_sides.as_slice() {
            [] => Location::Inside,
            [k] => Location::OnSide(*k),
            // Adjacent sides k−1 and k meet at corner k.
            [0, 7] => Location::OnCorner(0),
            [a, _] => Location::OnCorner(a + 1),
            // Only possible for absurd tolerances; pick the nearest corner.
            _ => {
                let k = (0..8)
                    .min_by(|&a, &b| {
                        p.distance(&self.corners[a]).total_cmp(&p.distance(&self.corners[b]))
                    })
                    .unwrap_or(0);
                Location::OnCorner(k)
            }
        }
    }

    /// Half-open membership: sides 0..=3 and corner 0 belong to the domain.
    pub fn in_domain(location: Location) -> bool {
        matches!(
            location,
            Location::Inside | Location::OnCorner(0) | Location::OnSide(0..=3)
        )
    }
}

/// Result of transporting a point into the fundamental domain.
#[derive(Debug, Clone)]
pub struct Canonical {
    /// Word of the map `g` with `g(p) = point`.
    pub word: Word,
    /// Float matrix of `g`.
    pub map: Collineation,
    pub point: DiskPoint,
    pub location: Location,
}

impl Canonical {
    /// Exact group element for the applied map.
    pub fn element(&self) -> Result<GroupElement, GroupError> {
        GroupElement::from_word(&self.word)
    }
}

/// One image of the fundamental octagon.
#[derive(Debug, Clone)]
pub struct Tile {
    pub element: GroupElement,
    pub corners: Vec<DiskPoint>,
}

impl Tile {
    pub fn poincare_corners(&self) -> Result<Vec<DiskPoint>, GeometryError> {
        self.corners.iter().map(klein_to_poincare).collect()
    }
}

/// The Bolza group together with its fundamental domain and the side and
/// corner identifications computed from the generator matrices.
#[derive(Debug, Clone)]
pub struct BolzaGroup {
    generators: Vec<GroupElement>,
    float_generators: Vec<Collineation>,
    octagon: FundamentalOctagon,
    pairings: Vec<SidePairing>,
    corner_maps: Vec<(Word, Collineation)>,
}

impl Default for BolzaGroup {
    fn default() -> Self {
        Self::new()
    }
}

fn points_match(a: &DiskPoint, b: &DiskPoint, tol: f64) -> bool {
    a.distance(b) <= tol
}

impl BolzaGroup {
    pub fn new() -> Self {
        let generators: Vec<GroupElement> = (0..GENERATOR_COUNT)
            .map(|k| GroupElement::generator(k).expect("valid generator"))
            .collect();
        let float_generators: Vec<Collineation> = generators.iter().map(|g| g.klein().to_float()).collect();
        let octagon = FundamentalOctagon::new();

        let mut pairings = Vec::new();
        for (k, g) in float_generators.iter().enumerate() {
            let mut found = None;
            for from in 0..8 {
                let (a, b) = octagon.side_endpoints(from);
                let (ga, gb) = (g.apply(&a).expect("interior"), g.apply(&b).expect("interior"));
                for to in 0..8 {
                    let (c, d) = octagon.side_endpoints(to);
                    if points_match(&ga, &c, 1e-9) && points_match(&gb, &d, 1e-9) {
                        found = Some(SidePairing { generator: k as u8, from_side: from, to_side: to, flip: false });
                    } else if points_match(&ga, &d, 1e-9) && points_match(&gb, &c, 1e-9) {
                        found = Some(SidePairing { generator: k as u8, from_side: from, to_side: to, flip: true });
                    }
                }
            }
            pairings.push(found.expect("every Bolza generator pairs two octagon sides"));
        }

        // Corner identifications by breadth-first search towards corner 0.
        let mut corner_maps: Vec<Option<(Word, Collineation)>> = vec![None; 8];
        corner_maps[0] = Some((Word::new(), Collineation::identity().to_float()));
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            let (wc, mc) = corner_maps[c].clone().expect("visited");
            for (k, g) in float_generators.iter().enumerate() {
                for (src, corner) in octagon.corners.iter().enumerate() {
                    if corner_maps[src].is_some() {
                        continue;
                    }
                    let img = g.apply(corner).expect("interior");
                    if points_match(&img, &octagon.corners[c], 1e-9) {
                        let word = reduce_concat(&wc, &[k as u8]);
                        corner_maps[src] = Some((word, mc.compose(g)));
                        queue.push_back(src);
                    }
                }
            }
        }
        let corner_maps = corner_maps
            .into_iter()
            .map(|m| m.expect("all octagon corners form one orbit"))
            .collect();

        Self { generators, float_generators, octagon, pairings, corner_maps }
    }

    pub fn generator(&self, k: u8) -> Result<&GroupElement, GroupError> {
        self.generators.get(usize::from(k)).ok_or(GroupError::BadGenerator(k))
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn float_generator(&self, k: u8) -> Result<&Collineation, GroupError> {
        self.float_generators.get(usize::from(k)).ok_or(GroupError::BadGenerator(k))
    }

    pub fn octagon(&self) -> &FundamentalOctagon {
        &self.octagon
    }

    /// Side pairing of each generator, indexed by generator.
    pub fn side_pairings(&self) -> &[SidePairing] {
        &self.pairings
    }

    /// The generator taking side `side` onto another side.
    pub fn pairing_from_side(&self, side: usize) -> Option<&SidePairing> {
        self.pairings.iter().find(|p| p.from_side == side)
    }

    /// Word and matrix sending corner `k` to corner 0.
    pub fn corner_map(&self, k: usize) -> &(Word, Collineation) {
        &self.corner_maps[k % 8]
    }

    /// Every distinct element with a word of length at most `max_len`,
    /// deduplicated by exact projective equality. Breadth-first, so each
    /// element keeps a shortest word.
    pub fn enumerate_elements(&self, max_len: usize) -> Vec<GroupElement> {
        self.enumerate_with_relations(max_len).0
    }

    fn enumerate_with_relations(&self, max_len: usize) -> (Vec<GroupElement>, Vec<Word>) {
        let identity = GroupElement::identity();
        let mut seen: HashMap<ExactMat3, usize> = HashMap::new();
        seen.insert(identity.klein().exact_projective_key().expect("exact"), 0);
        let mut elements = vec![identity];
        let mut relations = Vec::new();
        let mut frontier = vec![0usize];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for &idx in &frontier {
                for k in 0..GENERATOR_COUNT {
                    if elements[idx].word().last() == Some(&inverse_generator(k)) {
                        continue;
                    }
                    let cand = elements[idx].mul(&self.generators[usize::from(k)]);
                    let key = cand.klein().exact_projective_key().expect("exact");
                    match seen.get(&key) {
                        Some(&other) => {
                            let rel = reduce_concat(cand.word(), &inverse_word(elements[other].word()));
                            if !rel.is_empty() {
                                relations.push(rel);
                            }
                        }
                        None => {
                            seen.insert(key, elements.len());
                            next.push(elements.len());
                            elements.push(cand);
                        }
                    }
                }
            }
            frontier = next;
        }
        (elements, relations)
    }

    /// Short relators found as coincidences during enumeration. Each returned
    /// word is nontrivial, freely reduced, and evaluates to the identity.
    pub fn find_relations(&self, max_len: usize) -> Vec<Word> {
        let (_, relations) = self.enumerate_with_relations(max_len.div_ceil(2));
        let mut uniq: Vec<Word> = Vec::new();
        let mut seen = HashSet::new();
        for r in relations {
            if r.len() <= max_len && seen.insert(r.clone()) {
                uniq.push(r);
            }
        }
        uniq
    }

    /// Images of the fundamental octagon under all elements of word length at
    /// most `depth`.
    pub fn tile(&self, depth: usize) -> Result<Vec<Tile>, GroupError> {
        let corners = self.octagon.corners();
        self.enumerate_elements(depth)
            .into_iter()
            .map(|element| {
                let g = element.klein().to_float();
                let corners = corners.iter().map(|c| g.apply(c)).collect::<Result<Vec<_>, _>>()?;
                Ok(Tile { element, corners })
            })
            .collect()
    }

    /// Moves a Klein point into the fundamental octagon (half-open
    /// boundary convention) by greedy descent towards the origin.
    pub fn canonicalize(&self, p: &DiskPoint) -> Result<Canonical, GroupError> {
        p.expect_model(Model::Klein)?;
        if !p.is_interior() {
            return Err(GeometryError::NotInterior(p.x, p.y).into());
        }
        let inradius = (klein_corner_radius() * (PI / 8.0).cos()).atanh();
        let estimate = (p.radius().atanh() / inradius).ceil() as usize + 1;
        let cap = 10 * estimate.max(1);

        let mut word = Word::new();
        let mut map = Collineation::identity().to_float();
        let mut q = *p;

        for _ in 0..cap {
            let location = self.octagon.contains(&q);
            match location {
                Location::Outside => {
                    let (best, image) = self
                        .float_generators
                        .iter()
                        .enumerate()
                        .filter_map(|(k, g)| g.apply(&q).ok().map(|img| (k, img)))
                        .min_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
                        .expect("eight generators");
                    if image.norm_sqr() >= q.norm_sqr() {
                        return Err(GroupError::NoConvergence { iterations: 0, x: p.x, y: p.y });
                    }
                    let g = self.float_generators[best].clone();
                    apply_front(&[best as u8], &g, &mut q, &mut map, &mut word)?;
                }
                Location::OnSide(k) if k >= 4 => {
                    let pairing = *self.pairing_from_side(k).expect("each side is paired");
                    let g = self.float_generators[usize::from(pairing.generator)].clone();
                    apply_front(&[pairing.generator], &g, &mut q, &mut map, &mut word)?;
                    let loc = self.octagon.contains(&q);
                    return Ok(Canonical { word, map, point: q, location: loc });
                }
                Location::OnCorner(k) if k != 0 => {
                    let (w, g) = self.corner_map(k).clone();
                    apply_front(&w, &g, &mut q, &mut map, &mut word)?;
                    let loc = self.octagon.contains(&q);
                    return Ok(Canonical { word, map, point: q, location: loc });
                }
                _ => return Ok(Canonical { word, map, point: q, location }),
            }
        }
        Err(GroupError::NoConvergence { iterations: cap, x: p.x, y: p.y })
    }
}

fn apply_front(
    k_word: &[u8],
    g: &Collineation,
    q: &mut DiskPoint,
    map: &mut Collineation,
    word: &mut Word,
) -> Result<(), GroupError> {
    *q = g.apply(q)?;
    *map = g.compose(map);
    *word = reduce_concat(k_word, word);
    Ok(())
}

/// Float-only enumeration, deduplicated by hashing normalized matrices
/// rounded to `1e−9`. Independent of the exact path; used to cross-check it.
pub fn enumerate_elements_float(max_len: usize) -> Vec<(Word, Mat3)> {
    let gens: Vec<Mat3> = (0..GENERATOR_COUNT)
        .map(|k| {
            let m = bolza_klein_matrix(k).expect("valid");
            m.map(|row| row.map(|v| v.to_f64()))
        })
        .collect();
    let key = |m: &Mat3| -> [i64; 9] {
        let c = Collineation::from_f64(*m).expect("nonsingular").normalized_f64();
        let flat: Vec<i64> = c.iter().flatten().map(|v| (v / 1e-9).round() as i64).collect();
        flat.try_into().expect("nine entries")
    };
    let id: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut seen = HashSet::from([key(&id)]);
    let mut elements = vec![(Word::new(), id)];
    let mut frontier = vec![0usize];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for &idx in &frontier {
            for k in 0..GENERATOR_COUNT {
                let (w, m) = elements[idx].clone();
                if w.last() == Some(&inverse_generator(k)) {
                    continue;
                }
                let prod = mat3_mul(&m, &gens[usize::from(k)]);
                if seen.insert(key(&prod)) {
                    let mut w2 = w;
                    w2.push(k);
                    next.push(elements.len());
                    elements.push((w2, prod));
                }
            }
        }
        frontier = next;
    }
    elements
}
