//! Generators for the named wheel-graph families.
//!
//! Edge orderings follow the reference figures: wheels interleave spokes and
//! rim edges, spoke `i` carrying label `2i-1` and the rim edge into rim vertex
//! `i` carrying label `2i`. Rim vertices are indexed `0..j-1`, the hub (when
//! aerial) is vertex `j`.

use super::{Graph, GraphError, Species};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The named graph families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WheelKind {
    /// Aerial wheel with spokes pointing inwards (rim to hub); no ground
    /// vertices. The first wheel family of the Duflo characteristic function.
    DufloI,
    /// Aerial cycle whose spokes land on two ground vertices: one spoke on the
    /// second ground vertex, the remaining `j-1` on the first.
    DufloII,
    /// Aerial wheel with spokes pointing outwards (hub to rim); the wheel of
    /// the curvature characteristic function.
    CurvIII,
    /// `CurvIII` drawn in the disk, with a single boundary slot carrying the
    /// chain factor (shoikhet species).
    ChainWheel,
    /// Aerial cycle with all spokes landing on a single ground vertex; the
    /// unique homotopy-side wheel.
    HomotopyBase,
    /// `HomotopyBase` together with an isolated distinguished ground vertex
    /// (brane species).
    BraneWheel,
    /// Undirected hub-plus-cycle wheel (gc2 species).
    Gc2Wheel,
    /// `ChainWheel` with one extra aerial vertex at the disk center carrying a
    /// single edge to the hub; the target graph of the module relation.
    ModuleTarget,
    /// The complete graph on four vertices (gc2 species).
    Tetrahedron,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WheelError {
    #[error("wheel families need j >= 2, got {0}")]
    TooSmall(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Builds the named family member with its reference edge ordering.
/// `j` is the number of rim vertices (ignored for the tetrahedron).
pub fn wheel_family(kind: WheelKind, j: usize) -> Result<Graph, WheelError> {
    if kind != WheelKind::Tetrahedron && j < 2 {
        return Err(WheelError::TooSmall(j));
    }
    let g = match kind {
        WheelKind::DufloI => {
            // Spokes rim -> hub; rim cycle oriented rim_{i+1} -> rim_i.
            let hub = j;
            let mut edges = Vec::with_capacity(2 * j);
            for i in 1..=j {
                edges.push((i - 1, hub));
                edges.push((i % j, i - 1));
            }
            Graph::new(Species::Kontsevich, j + 1, 0, None, edges)?
        }
        WheelKind::DufloII => {
            // As DufloI with the hub replaced by ground vertex j; the first
            // spoke lands on the second ground vertex j+1 instead.
            let mut edges = Vec::with_capacity(2 * j);
            for i in 1..=j {
                let target = if i == 1 { j + 1 } else { j };
                edges.push((i - 1, target));
                edges.push((i % j, i - 1));
            }
            Graph::new(Species::Kontsevich, j, 2, None, edges)?
        }
        WheelKind::CurvIII => {
            Graph::new(Species::Kontsevich, j + 1, 0, None, spokes_out_edges(j))?
        }
        WheelKind::ChainWheel => {
            Graph::new(Species::Shoikhet, j + 1, 1, None, spokes_out_edges(j))?
        }
        WheelKind::HomotopyBase => {
            let ground = j;
            let mut edges = Vec::with_capacity(2 * j);
            for i in 1..=j {
                edges.push((i - 1, ground));
                edges.push((i % j, i - 1));
            }
            Graph::new(Species::Kontsevich, j, 1, None, edges)?
        }
        WheelKind::BraneWheel => {
            let ground = j;
            let mut edges = Vec::with_capacity(2 * j);
            for i in 1..=j {
                edges.push((i - 1, ground));
                edges.push((i % j, i - 1));
            }
            Graph::new(Species::Brane, j, 2, Some(j + 1), edges)?
        }
        WheelKind::Gc2Wheel => {
            let hub = j;
            let mut edges = Vec::with_capacity(2 * j);
            for i in 1..=j {
                edges.push((i - 1, hub));
                edges.push((i - 1, i % j));
            }
            Graph::new(Species::Gc2, j + 1, 0, None, edges)?
        }
        WheelKind::ModuleTarget => {
            // ChainWheel plus the center vertex j+1 with one edge to the hub.
            let mut edges = spokes_out_edges(j);
            edges.push((j + 1, j));
            // Boundary slot index shifts past the extra aerial vertex.
            Graph::new(Species::Shoikhet, j + 2, 1, None, edges)?
        }
        WheelKind::Tetrahedron => Graph::new(
            Species::Gc2,
            4,
            0,
            None,
            vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        )?,
    };
    Ok(g)
}

/// Spokes hub -> rim, rim cycle rim_i -> rim_{i+1}; spoke `i` has label
/// `2i-1`, the rim edge out of rim vertex `i` label `2i`.
fn spokes_out_edges(j: usize) -> Vec<(usize, usize)> {
    let hub = j;
    let mut edges = Vec::with_capacity(2 * j);
    for i in 1..=j {
        edges.push((hub, i - 1));
        edges.push((i - 1, i % j));
    }
    edges
}
