//! Multiply periodic partitions of the fundamental octagon: convex cells
//! bounded by straight chords, plus the side pairings that glue boundary
//! edges across the group action.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Collineation, DiskPoint};
use crate::group::{BolzaGroup, Location, GENERATOR_COUNT};
use crate::poly::LineForm;

/// Vertices may sit this far outside the octagon and still count as on it.
const VERTEX_TOLERANCE: f64 = 1e-9;
/// Maximum endpoint mismatch for a boundary pair.
const PAIR_TOLERANCE: f64 = 1e-8;
const AREA_EPS: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionError {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("partition has no cells")]
    Empty,
    #[error("vertex {0} lies outside the closed octagon")]
    VertexOutside(usize),
    #[error("{what} index {index} out of range")]
    BadIndex { what: &'static str, index: usize },
    #[error("edge {0} has coincident endpoints")]
    DegenerateEdge(usize),
    #[error("edges {0} and {1} join the same vertices")]
    DuplicateEdge(usize, usize),
    #[error("cell {0} has fewer than three vertices or zero area")]
    DegenerateCell(usize),
    #[error("cell {0} is not convex")]
    NonConvexCell(usize),
    #[error("cell {cell} uses vertices {a}-{b}, which are not joined by an edge")]
    MissingEdge { cell: usize, a: usize, b: usize },
    #[error("edge {0} does not bound any cell")]
    DanglingEdge(usize),
    #[error("edge {0} bounds more than two cells")]
    OverusedEdge(usize),
    #[error("edge {0} bounds one cell but does not lie on an octagon side")]
    BoundaryEdgeOffSide(usize),
    #[error("boundary pair {0} references a non-boundary edge")]
    NotBoundaryEdge(usize),
    #[error("boundary pair {pair}: generator does not map the edge onto its partner (mismatch {mismatch:e})")]
    BrokenBoundaryPair { pair: usize, mismatch: f64 },
    #[error("boundary edge {0} appears in {1} boundary pairs, expected exactly one")]
    PairCount(usize, usize),
    #[error("generator {0} out of range")]
    BadGenerator(u8),
    #[error("vertex {0}: incident cells do not close up around it")]
    OpenFan(usize),
    #[error("cell areas sum to {found}, octagon area is {expected}")]
    AreaMismatch { found: f64, expected: f64 },
    #[error("cell {0} is not a triangle")]
    NonTriangular(usize),
    #[error("point ({0}, {1}) is outside the octagon")]
    PointOutside(f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub v: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPairDoc {
    pub edge: usize,
    pub partner: usize,
    pub generator: u8,
    pub flip: bool,
}

/// On-disk form of a partition. Line coefficients are never stored; they
/// are recomputed from the vertices on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionDoc {
    pub vertices: Vec<[f64; 2]>,
    pub edges: Vec<EdgeDoc>,
    pub cells: Vec<Vec<usize>>,
    pub boundary_pairs: Vec<BoundaryPairDoc>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub v: [usize; 2],
    pub line: LineForm,
    /// One cell for boundary edges, two for interior edges (ascending).
    pub cells: Vec<usize>,
    /// Octagon side the edge lies on, for boundary edges.
    pub side: Option<usize>,
}

impl Edge {
    pub fn is_interior(&self) -> bool {
        self.cells.len() == 2
    }
}

/// Gluing of boundary edge `edge` onto `partner` by a generator:
/// `g(v0) = partner.v0` unless `flip`, in which case `g(v0) = partner.v1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPair {
    pub edge: usize,
    pub partner: usize,
    pub generator: u8,
    pub flip: bool,
    pub edge_cell: usize,
    pub partner_cell: usize,
}

/// Edge-to-cell incidence and the cyclic star of every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct CellAdjacency {
    /// `(edge, lower cell, higher cell)` for every interior edge.
    pub interior_edges: Vec<(usize, usize, usize)>,
    /// For each vertex, its incident edges sorted counterclockwise by angle.
    pub vertex_edges: Vec<Vec<usize>>,
    /// For each vertex, its incident cells in the same angular order.
    pub vertex_cells: Vec<Vec<usize>>,
    /// Vertices strictly inside the octagon.
    pub interior_vertices: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellLocation {
    pub cell: usize,
    pub edge: Option<usize>,
    pub vertex: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    vertices: Vec<[f64; 2]>,
    edges: Vec<Edge>,
    cells: Vec<Vec<usize>>,
    boundary_pairs: Vec<BoundaryPair>,
    adjacency: CellAdjacency,
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn polygon_area(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        / 2.0
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Mismatch of a generator mapping `edge` onto `partner` with the given
/// endpoint orientation.
fn pair_mismatch(g: &Collineation, e: [[f64; 2]; 2], p: [[f64; 2]; 2], flip: bool) -> f64 {
    let (t0, t1) = if flip { (p[1], p[0]) } else { (p[0], p[1]) };
    match (g.apply_xy(e[0]), g.apply_xy(e[1])) {
        (Ok(a), Ok(b)) => dist(a, t0).max(dist(b, t1)),
        _ => f64::INFINITY,
    }
}

impl Partition {
    /// Validates a document against the octagon of `group`.
    pub fn from_doc(doc: &PartitionDoc, group: &BolzaGroup) -> Result<Self, PartitionError> {
        let octagon = group.octagon();
        let nv = doc.vertices.len();
        if doc.cells.is_empty() {
            return Err(PartitionError::Empty);
        }
        for (i, v) in doc.vertices.iter().enumerate() {
            if !v.iter().all(|c| c.is_finite())
                || octagon.contains_with_tol(&DiskPoint::klein(v[0], v[1]), VERTEX_TOLERANCE) == Location::Outside
            {
                return Err(PartitionError::VertexOutside(i));
            }
        }

        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::with_capacity(doc.edges.len());
        for (ei, e) in doc.edges.iter().enumerate() {
            for &v in &e.v {
                if v >= nv {
                    return Err(PartitionError::BadIndex { what: "vertex", index: v });
                }
            }
            let (a, b) = (doc.vertices[e.v[0]], doc.vertices[e.v[1]]);
            if e.v[0] == e.v[1] || dist(a, b) <= AREA_EPS {
                return Err(PartitionError::DegenerateEdge(ei));
            }
            if let Some(&other) = edge_index.get(&edge_key(e.v[0], e.v[1])) {
                return Err(PartitionError::DuplicateEdge(other, ei));
            }
            edge_index.insert(edge_key(e.v[0], e.v[1]), ei);
            let line = LineForm::through(a, b).map_err(|_| PartitionError::DegenerateEdge(ei))?;
            edges.push(Edge { v: e.v, line, cells: Vec::new(), side: None });
        }

        let mut cells = Vec::with_capacity(doc.cells.len());
        for (ci, cell) in doc.cells.iter().enumerate() {
            if cell.len() < 3 {
                return Err(PartitionError::DegenerateCell(ci));
            }
            for &v in cell {
                if v >= nv {
                    return Err(PartitionError::BadIndex { what: "vertex", index: v });
                }
            }
            let pts: Vec<[f64; 2]> = cell.iter().map(|&v| doc.vertices[v]).collect();
            let area = polygon_area(&pts);
            if area.abs() <= AREA_EPS {
                return Err(PartitionError::DegenerateCell(ci));
            }
            let mut cell = cell.clone();
            if area < 0.0 {
                cell[1..].reverse();
            }
            let n = cell.len();
            let pts: Vec<[f64; 2]> = cell.iter().map(|&v| doc.vertices[v]).collect();
            for k in 0..n {
                let turn = cross(pts[k], pts[(k + 1) % n], pts[(k + 2) % n]);
                let scale = dist(pts[k], pts[(k + 1) % n]) * dist(pts[(k + 1) % n], pts[(k + 2) % n]);
                if turn < -1e-12 * scale {
                    return Err(PartitionError::NonConvexCell(ci));
                }
            }
            for k in 0..n {
                let (a, b) = (cell[k], cell[(k + 1) % n]);
                let ei = *edge_index
                    .get(&edge_key(a, b))
                    .ok_or(PartitionError::MissingEdge { cell: ci, a, b })?;
                edges[ei].cells.push(ci);
            }
            cells.push(cell);
        }

        for (ei, edge) in edges.iter_mut().enumerate() {
            edge.cells.sort_unstable();
            match edge.cells.len() {
                0 => return Err(PartitionError::DanglingEdge(ei)),
                1 => {
                    let (a, b) = (doc.vertices[edge.v[0]], doc.vertices[edge.v[1]]);
                    let side = octagon.sides().iter().position(|s| {
                        s.signed_distance(a[0], a[1]).abs() <= VERTEX_TOLERANCE
                            && s.signed_distance(b[0], b[1]).abs() <= VERTEX_TOLERANCE
                    });
                    edge.side = Some(side.ok_or(PartitionError::BoundaryEdgeOffSide(ei))?);
                }
                2 => {}
                _ => return Err(PartitionError::OverusedEdge(ei)),
            }
        }

        let mut uses = vec![0usize; edges.len()];
        let mut boundary_pairs = Vec::with_capacity(doc.boundary_pairs.len());
        for (pi, bp) in doc.boundary_pairs.iter().enumerate() {
            for idx in [bp.edge, bp.partner] {
                let e = edges.get(idx).ok_or(PartitionError::BadIndex { what: "edge", index: idx })?;
                if e.is_interior() {
                    return Err(PartitionError::NotBoundaryEdge(pi));
                }
                uses[idx] += 1;
            }
            if bp.generator >= GENERATOR_COUNT {
                return Err(PartitionError::BadGenerator(bp.generator));
            }
            let g = group.float_generator(bp.generator).map_err(|_| PartitionError::BadGenerator(bp.generator))?;
            let ends = |e: &Edge| [doc.vertices[e.v[0]], doc.vertices[e.v[1]]];
            let mismatch = pair_mismatch(g, ends(&edges[bp.edge]), ends(&edges[bp.partner]), bp.flip);
            if mismatch.is_nan() || mismatch > PAIR_TOLERANCE {
                return Err(PartitionError::BrokenBoundaryPair { pair: pi, mismatch });
            }
            boundary_pairs.push(BoundaryPair {
                edge: bp.edge,
                partner: bp.partner,
                generator: bp.generator,
                flip: bp.flip,
                edge_cell: edges[bp.edge].cells[0],
                partner_cell: edges[bp.partner].cells[0],
            });
        }
        for (ei, e) in edges.iter().enumerate() {
            let expected = usize::from(!e.is_interior());
            if uses[ei] != expected {
                return Err(PartitionError::PairCount(ei, uses[ei]));
            }
        }

        let total: f64 = cells
            .iter()
            .map(|c| polygon_area(&c.iter().map(|&v| doc.vertices[v]).collect::<Vec<_>>()))
            .sum();
        let expected = octagon.area();
        if ((total - expected) / expected).abs() > 1e-9 {
            return Err(PartitionError::AreaMismatch { found: total, expected });
        }

        let adjacency = build_adjacency(&doc.vertices, &edges, &cells, group)?;
        Ok(Self { vertices: doc.vertices.clone(), edges, cells, boundary_pairs, adjacency })
    }

    pub fn from_json(json: &str, group: &BolzaGroup) -> Result<Self, PartitionError> {
        let doc: PartitionDoc = serde_json::from_str(json).map_err(|e| PartitionError::Schema(e.to_string()))?;
        Self::from_doc(&doc, group)
    }

    pub fn to_doc(&self) -> PartitionDoc {
        PartitionDoc {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().map(|e| EdgeDoc { v: e.v }).collect(),
            cells: self.cells.clone(),
            boundary_pairs: self
                .boundary_pairs
                .iter()
                .map(|p| BoundaryPairDoc { edge: p.edge, partner: p.partner, generator: p.generator, flip: p.flip })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("partition documents always serialize")
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn boundary_pairs(&self) -> &[BoundaryPair] {
        &self.boundary_pairs
    }

    pub fn adjacency(&self) -> &CellAdjacency {
        &self.adjacency
    }

    pub fn cell_points(&self, cell: usize) -> Vec<[f64; 2]> {
        self.cells[cell].iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn cell_area(&self, cell: usize) -> f64 {
        polygon_area(&self.cell_points(cell))
    }

    pub fn edge_points(&self, edge: usize) -> [[f64; 2]; 2] {
        let e = &self.edges[edge];
        [self.vertices[e.v[0]], self.vertices[e.v[1]]]
    }

    /// Smallest signed distance from `p` to the cell's edges (positive inside).
    fn cell_margin(&self, cell: usize, p: [f64; 2]) -> f64 {
        let pts = self.cell_points(cell);
        let n = pts.len();
        (0..n)
            .map(|k| {
                let (a, b) = (pts[k], pts[(k + 1) % n]);
                cross(a, b, p) / dist(a, b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// The cell containing `p`. Ties on shared edges and vertices go to the
    /// lowest cell index.
    pub fn locate_cell(&self, group: &BolzaGroup, p: &DiskPoint) -> Result<CellLocation, PartitionError> {
        if group.octagon().contains(p) == Location::Outside {
            return Err(PartitionError::PointOutside(p.x, p.y));
        }
        let xy = p.xy();
        let tol = 1e-12;
        let cell = (0..self.cells.len())
            .find(|&c| self.cell_margin(c, xy) >= -tol)
            .or_else(|| {
                (0..self.cells.len()).max_by(|&a, &b| self.cell_margin(a, xy).total_cmp(&self.cell_margin(b, xy)))
            })
            .ok_or(PartitionError::Empty)?;
        let on_tol = 1e-10;
        let vertex = self.cells[cell].iter().copied().find(|&v| dist(self.vertices[v], xy) <= on_tol);
        let n = self.cells[cell].len();
        let edge = (0..n).find_map(|k| {
            let (a, b) = (self.cells[cell][k], self.cells[cell][(k + 1) % n]);
            let (pa, pb) = (self.vertices[a], self.vertices[b]);
            (cross(pa, pb, xy).abs() / dist(pa, pb) <= on_tol).then(|| edge_key(a, b))
        });
        let edge = edge.and_then(|key| self.edges.iter().position(|e| edge_key(e.v[0], e.v[1]) == key));
        Ok(CellLocation { cell, edge, vertex })
    }

    /// Splits every triangle into four at edge points. Interior edges are
    /// split at their midpoints; for each boundary pair the edge is split at
    /// its midpoint and the partner at the generator's image of it.
    pub fn refine(&self, group: &BolzaGroup) -> Result<Partition, PartitionError> {
        if let Some(c) = self.cells.iter().position(|c| c.len() != 3) {
            return Err(PartitionError::NonTriangular(c));
        }
        let mut vertices = self.vertices.clone();
        let mut split: HashMap<usize, usize> = HashMap::new();
        let mid = |a: [f64; 2], b: [f64; 2]| [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
        for pair in &self.boundary_pairs {
            let [a, b] = self.edge_points(pair.edge);
            let m = mid(a, b);
            let g = group.float_generator(pair.generator).map_err(|_| PartitionError::BadGenerator(pair.generator))?;
            let gm = g.apply_xy(m).map_err(|_| PartitionError::BrokenBoundaryPair { pair: 0, mismatch: f64::INFINITY })?;
            split.insert(pair.edge, vertices.len());
            vertices.push(m);
            split.insert(pair.partner, vertices.len());
            vertices.push(gm);
        }
        for (ei, e) in self.edges.iter().enumerate() {
            if let std::collections::hash_map::Entry::Vacant(slot) = split.entry(ei) {
                slot.insert(vertices.len());
                vertices.push(mid(self.vertices[e.v[0]], self.vertices[e.v[1]]));
            }
        }
        let index: HashMap<(usize, usize), usize> =
            self.edges.iter().enumerate().map(|(i, e)| (edge_key(e.v[0], e.v[1]), i)).collect();
        let m = |a: usize, b: usize| split[&index[&edge_key(a, b)]];

        let mut cells = Vec::with_capacity(4 * self.cells.len());
        for c in &self.cells {
            let (a, b, cc) = (c[0], c[1], c[2]);
            let (mab, mbc, mca) = (m(a, b), m(b, cc), m(cc, a));
            cells.push(vec![a, mab, mca]);
            cells.push(vec![mab, b, mbc]);
            cells.push(vec![mca, mbc, cc]);
            cells.push(vec![mab, mbc, mca]);
        }

        let mut edge_set: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for c in &cells {
            for k in 0..3 {
                let key = edge_key(c[k], c[(k + 1) % 3]);
                let next = edge_set.len();
                edge_set.entry(key).or_insert(next);
            }
        }
        let mut edges = vec![EdgeDoc { v: [0, 0] }; edge_set.len()];
        for (&(a, b), &i) in &edge_set {
            edges[i] = EdgeDoc { v: [a, b] };
        }

        let mut boundary_pairs = Vec::new();
        for pair in &self.boundary_pairs {
            let g = group.float_generator(pair.generator).map_err(|_| PartitionError::BadGenerator(pair.generator))?;
            let e = &self.edges[pair.edge];
            let p = &self.edges[pair.partner];
            let (me, mp) = (split[&pair.edge], split[&pair.partner]);
            let children = |ed: &Edge, mv: usize| [edge_set[&edge_key(ed.v[0], mv)], edge_set[&edge_key(mv, ed.v[1])]];
            for child in children(e, me) {
                let ce = edges[child].v.map(|v| vertices[v]);
                let best = children(p, mp)
                    .into_iter()
                    .flat_map(|pc| [false, true].map(|flip| (pc, flip)))
                    .map(|(pc, flip)| {
                        let cp = edges[pc].v.map(|v| vertices[v]);
                        (pc, flip, pair_mismatch(g, ce, cp, flip))
                    })
                    .min_by(|a, b| a.2.total_cmp(&b.2))
                    .expect("two children");
                boundary_pairs.push(BoundaryPairDoc { edge: child, partner: best.0, generator: pair.generator, flip: best.1 });
            }
        }

        Partition::from_doc(&PartitionDoc { vertices, edges, cells, boundary_pairs }, group)
    }
}

fn build_adjacency(
    vertices: &[[f64; 2]],
    edges: &[Edge],
    cells: &[Vec<usize>],
    group: &BolzaGroup,
) -> Result<CellAdjacency, PartitionError> {
    let nv = vertices.len();
    let interior_edges = edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.is_interior())
        .map(|(i, e)| (i, e.cells[0], e.cells[1]))
        .collect();

    let mut vertex_edges: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (i, e) in edges.iter().enumerate() {
        vertex_edges[e.v[0]].push(i);
        vertex_edges[e.v[1]].push(i);
    }
    let angle_of = |v: usize, p: [f64; 2]| (p[1] - vertices[v][1]).atan2(p[0] - vertices[v][0]);
    let centroid = |c: &Vec<usize>| {
        let n = c.len() as f64;
        let (sx, sy) = c.iter().fold((0.0, 0.0), |(x, y), &v| (x + vertices[v][0], y + vertices[v][1]));
        [sx / n, sy / n]
    };
    let mut vertex_cells: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (ci, c) in cells.iter().enumerate() {
        for &v in c {
            vertex_cells[v].push(ci);
        }
    }
    for v in 0..nv {
        vertex_edges[v].sort_by(|&a, &b| {
            let other = |e: usize| {
                let ed = &edges[e];
                vertices[if ed.v[0] == v { ed.v[1] } else { ed.v[0] }]
            };
            angle_of(v, other(a)).total_cmp(&angle_of(v, other(b)))
        });
        vertex_cells[v].sort_by(|&a, &b| angle_of(v, centroid(&cells[a])).total_cmp(&angle_of(v, centroid(&cells[b]))));
    }

    let octagon = group.octagon();
    let interior_vertices: Vec<usize> = (0..nv)
        .filter(|&v| {
            octagon.contains_with_tol(&DiskPoint::klein(vertices[v][0], vertices[v][1]), VERTEX_TOLERANCE)
                == Location::Inside
        })
        .collect();
    for &v in &interior_vertices {
        let es = &vertex_edges[v];
        if es.len() != vertex_cells[v].len() || es.len() < 3 {
            return Err(PartitionError::OpenFan(v));
        }
        // consecutive edges of the star must bound a common cell
        for k in 0..es.len() {
            let (a, b) = (&edges[es[k]], &edges[es[(k + 1) % es.len()]]);
            if !a.cells.iter().any(|c| b.cells.contains(c)) {
                return Err(PartitionError::OpenFan(v));
            }
        }
    }
    Ok(CellAdjacency { interior_edges, vertex_edges, vertex_cells, interior_vertices })
}

/// The star triangulation: eight triangles fanning from the center to
/// consecutive corners. Vertex 0 is the center, vertex `k + 1` is corner `k`;
/// edges 0..8 are spokes, edges 8..16 are the sides; cell `k` is
/// `(center, corner k, corner k+1)`.
pub fn default_triangulation(group: &BolzaGroup) -> Partition {
    let mut vertices = vec![[0.0, 0.0]];
    vertices.extend(group.octagon().corners().iter().map(|c| c.xy()));
    let corner = |k: usize| k % 8 + 1;
    let mut edges: Vec<EdgeDoc> = (0..8).map(|k| EdgeDoc { v: [0, corner(k)] }).collect();
    edges.extend((0..8).map(|k| EdgeDoc { v: [corner(k), corner(k + 1)] }));
    let cells = (0..8).map(|k| vec![0, corner(k), corner(k + 1)]).collect();
    let boundary_pairs = (0..4)
        .map(|side| {
            let p = group.pairing_from_side(side).expect("every side is paired");
            BoundaryPairDoc { edge: 8 + side, partner: 8 + p.to_side, generator: p.generator, flip: p.flip }
        })
        .collect();
    Partition::from_doc(&PartitionDoc { vertices, edges, cells, boundary_pairs }, group)
        .expect("the star triangulation is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (BolzaGroup, Partition) {
        let g = BolzaGroup::new();
        let p = default_triangulation(&g);
        (g, p)
    }

    #[test]
    fn star_triangulation_shape() {
        let (_, p) = setup();
        assert_eq!(p.cells().len(), 8);
        assert_eq!(p.edges().len(), 16);
        assert_eq!(p.adjacency().interior_vertices, vec![0]);
        assert_eq!(p.adjacency().interior_edges.len(), 8);
        for e in &p.edges()[..8] {
            assert!(e.is_interior());
            assert!(e.line.gamma.abs() < 1e-15);
        }
        assert_eq!(p.boundary_pairs().len(), 4);
    }

    #[test]
    fn star_boundary_pairs_match() {
        let (g, p) = setup();
        for bp in p.boundary_pairs() {
            let gen = g.float_generator(bp.generator).unwrap();
            let mm = pair_mismatch(gen, p.edge_points(bp.edge), p.edge_points(bp.partner), bp.flip);
            assert!(mm < 1e-10, "mismatch {mm}");
        }
    }

    #[test]
    fn vertex_fan_closes() {
        let (_, p) = setup();
        let adj = p.adjacency();
        assert_eq!(adj.vertex_edges[0].len(), 8);
        assert_eq!(adj.vertex_cells[0].len(), 8);
    }

    #[test]
    fn json_round_trip() {
        let (g, p) = setup();
        let back = Partition::from_json(&p.to_json(), &g).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn clockwise_cells_are_normalized() {
        let (g, p) = setup();
        let mut doc = p.to_doc();
        doc.cells[2] = vec![0, 4, 3];
        let q = Partition::from_doc(&doc, &g).unwrap();
        assert_eq!(q.cells()[2], vec![0, 3, 4]);
        assert!(q.cell_area(2) > 0.0);
    }

    #[test]
    fn invalid_documents_are_rejected() {
        let (g, p) = setup();
        let mut doc = p.to_doc();
        doc.boundary_pairs[0].edge = 0;
        assert_eq!(Partition::from_doc(&doc, &g), Err(PartitionError::NotBoundaryEdge(0)));

        let mut doc = p.to_doc();
        doc.boundary_pairs[1].flip = !doc.boundary_pairs[1].flip;
        assert!(matches!(Partition::from_doc(&doc, &g), Err(PartitionError::BrokenBoundaryPair { pair: 1, .. })));

        let mut doc = p.to_doc();
        doc.vertices[0] = [0.0, 0.999];
        assert_eq!(Partition::from_doc(&doc, &g), Err(PartitionError::VertexOutside(0)));

        let mut doc = p.to_doc();
        doc.edges.push(EdgeDoc { v: [1, 3] });
        assert_eq!(Partition::from_doc(&doc, &g), Err(PartitionError::DanglingEdge(16)));

        let mut doc = p.to_doc();
        doc.boundary_pairs.pop();
        assert!(matches!(Partition::from_doc(&doc, &g), Err(PartitionError::PairCount(_, 0))));

        let mut doc = p.to_doc();
        doc.cells.pop();
        assert!(Partition::from_doc(&doc, &g).is_err());

        assert!(matches!(Partition::from_json("{\"vertices\": 3}", &g), Err(PartitionError::Schema(_))));
    }

    #[test]
    fn non_convex_cell_is_rejected() {
        let (g, p) = setup();
        // Merge cells 0..=4 into one polygon with a reflex angle at the center.
        let mut doc = p.to_doc();
        let removed = [[0, 2], [0, 3], [0, 4], [0, 5]];
        let remap: Vec<Option<usize>> = {
            let mut next = 0;
            doc.edges
                .iter()
                .map(|e| {
                    if removed.contains(&e.v) {
                        None
                    } else {
                        next += 1;
                        Some(next - 1)
                    }
                })
                .collect()
        };
        doc.edges.retain(|e| !removed.contains(&e.v));
        for bp in &mut doc.boundary_pairs {
            bp.edge = remap[bp.edge].unwrap();
            bp.partner = remap[bp.partner].unwrap();
        }
        doc.cells.drain(0..5);
        doc.cells.insert(0, vec![0, 1, 2, 3, 4, 5, 6]);
        assert_eq!(Partition::from_doc(&doc, &g), Err(PartitionError::NonConvexCell(0)));
    }

    #[test]
    fn locate_cell_tie_breaks() {
        let (g, p) = setup();
        let origin = p.locate_cell(&g, &DiskPoint::klein(0.0, 0.0)).unwrap();
        assert_eq!(origin.cell, 0);
        assert_eq!(origin.vertex, Some(0));
        let c = g.octagon().corners();
        let sector = DiskPoint::klein((c[0].x + c[1].x) / 3.0, (c[0].y + c[1].y) / 3.0);
        assert_eq!(p.locate_cell(&g, &sector).unwrap().cell, 0);
        let spoke = DiskPoint::klein(c[3].x * 0.5, c[3].y * 0.5);
        let loc = p.locate_cell(&g, &spoke).unwrap();
        assert_eq!(loc.cell, 2);
        assert_eq!(loc.edge, Some(3));
        assert!(p.locate_cell(&g, &DiskPoint::klein(0.99, 0.0)).is_err());
    }

    #[test]
    fn locate_cell_partitions_the_octagon() {
        let (g, p) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut hits = 0;
        while hits < 10_000 {
            let (x, y) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let pt = DiskPoint::klein(x, y);
            if g.octagon().contains(&pt) != Location::Inside {
                continue;
            }
            hits += 1;
            let claims = (0..p.cells().len()).filter(|&c| p.cell_margin(c, pt.xy()) > 0.0).count();
            assert_eq!(claims, 1, "point ({x}, {y})");
        }
    }

    #[test]
    fn refinement() {
        let (g, p) = setup();
        let r = p.refine(&g).unwrap();
        assert_eq!(r.cells().len(), 32);
        assert_eq!(r.boundary_pairs().len(), 8);
        for bp in r.boundary_pairs() {
            let gen = g.float_generator(bp.generator).unwrap();
            assert!(pair_mismatch(gen, r.edge_points(bp.edge), r.edge_points(bp.partner), bp.flip) < 1e-9);
        }
        let rr = r.refine(&g).unwrap();
        assert_eq!(rr.cells().len(), 128);
    }
}
