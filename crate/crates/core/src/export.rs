//! Tiling output as JSON and SVG.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::geometry::{poincare_geodesic, DiskPoint, GeometryError, Mat3, Model, PoincareGeodesic};
use crate::group::{BolzaGroup, GroupError, Tile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TileDoc {
    pub word: Vec<u8>,
    /// Klein collineation, scaled so its largest entry is `+1`.
    pub matrix: Mat3,
    /// Corners in the document's model.
    pub corners: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TilingDoc {
    pub model: Model,
    pub depth: usize,
    pub tiles: Vec<TileDoc>,
}

fn tile_doc(tile: &Tile, model: Model) -> Result<TileDoc, GeometryError> {
    let corners = match model {
        Model::Klein => tile.corners.iter().map(DiskPoint::xy).collect(),
        Model::Poincare => tile.poincare_corners()?.iter().map(DiskPoint::xy).collect(),
    };
    Ok(TileDoc { word: tile.element.word().to_vec(), matrix: tile.element.klein().normalized_f64(), corners })
}

pub fn tiling_doc(group: &BolzaGroup, depth: usize, model: Model) -> Result<TilingDoc, GroupError> {
    let tiles = group
        .tile(depth)?
        .iter()
        .map(|t| tile_doc(t, model))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TilingDoc { model, depth, tiles })
}

const PALETTE: [&str; 8] = ["#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#c9b200", "#a65628", "#f781bf"];

fn fill(tile: &TileDoc, color: bool) -> &'static str {
    match tile.word.first() {
        Some(&k) if color => PALETTE[usize::from(k) % PALETTE.len()],
        None if color => "#dddddd",
        _ => "none",
    }
}

/// SVG path of one tile. The SVG y axis points down, so every `y` is negated.
fn tile_path(tile: &TileDoc, model: Model) -> String {
    let n = tile.corners.len();
    let mut d = String::new();
    let c0 = tile.corners[0];
    let _ = write!(d, "M {:.9} {:.9}", c0[0], -c0[1]);
    for k in 0..n {
        let (u, v) = (tile.corners[k], tile.corners[(k + 1) % n]);
        let arc = match model {
            Model::Klein => None,
            Model::Poincare => poincare_geodesic(&DiskPoint::poincare(u[0], u[1]), &DiskPoint::poincare(v[0], v[1])).ok(),
        };
        match arc {
            Some(g @ PoincareGeodesic::Circle { .. }) => {
                let c = g.center().expect("circle");
                let r = g.radius().expect("circle");
                // screen coordinates: (x, −y)
                let (ux, uy, vx, vy, cx, cy) = (u[0], -u[1], v[0], -v[1], c[0], -c[1]);
                let cross = (ux - cx) * (vy - cy) - (uy - cy) * (vx - cx);
                let sweep = u8::from(cross > 0.0);
                let _ = write!(d, " A {r:.9} {r:.9} 0 0 {sweep} {vx:.9} {vy:.9}");
            }
            _ => {
                let _ = write!(d, " L {:.9} {:.9}", v[0], -v[1]);
            }
        }
    }
    d.push_str(" Z");
    d
}

/// Standalone SVG with the unit circle and one closed path per tile,
/// optionally filled by the first generator of each tile's word.
pub fn tiling_svg(doc: &TilingDoc, color: bool) -> String {
    let mut s = String::new();
    s.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.05 -1.05 2.1 2.1\">\n");
    s.push_str("  <circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"black\" stroke-width=\"0.004\"/>\n");
    for tile in &doc.tiles {
        let word: Vec<String> = tile.word.iter().map(u8::to_string).collect();
        let _ = writeln!(
            s,
            "  <path class=\"tile\" data-word=\"{}\" d=\"{}\" fill=\"{}\" fill-opacity=\"0.35\" stroke=\"black\" stroke-width=\"0.002\"/>",
            word.join(" "),
            tile_path(tile, doc.model),
            fill(tile, color)
        );
    }
    s.push_str("</svg>\n");
    s
}
