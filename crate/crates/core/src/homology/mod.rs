//! Persistence diagrams of 2D scalar fields under the superlevel filtration.
//!
//! Pixels are the vertices of a full cubical complex on the grid; a cell
//! appears once all of its pixels are above the level. Diagrams are returned
//! in canonical negated coordinates (see [`Orientation::SuperlevelNegated`]).
//! The surviving component of the grid never dies: it is reported once,
//! flagged essential, with its death placed at the global minimum.

mod cubical;
mod oracle;
mod reduce;
mod tile;

pub use cubical::{CellKind, CubicalComplex};
pub use oracle::betti_at_level;
pub use reduce::{pair_fast, pair_matrix, CellPair};
pub use tile::{tile_field, Tiling};

use crate::error::{Error, Result};
use crate::types::{DiagramPoint, Orientation, PersistenceDiagram, ScalarField};

/// Which pairing route to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Algorithm {
    /// Union-find for `H0`, square-column reduction for `H1`.
    #[default]
    Fast,
    /// Full boundary-matrix reduction with clearing.
    Matrix,
}

/// Superlevel persistence diagram of `field` up to homology dimension `max_dim`.
pub fn superlevel_diagram(field: &ScalarField, max_dim: usize) -> Result<PersistenceDiagram> {
    superlevel_diagram_with(field, max_dim, Algorithm::Fast)
}

pub fn superlevel_diagram_with(
    field: &ScalarField,
    max_dim: usize,
    algorithm: Algorithm,
) -> Result<PersistenceDiagram> {
    if field.is_empty() {
        return Err(Error::EmptyField);
    }
    if max_dim > 1 {
        return Err(Error::BadMaxDim(max_dim));
    }
    let cx = CubicalComplex::superlevel(field);
    let mut pairs = match algorithm {
        Algorithm::Fast => pair_fast(&cx, max_dim),
        Algorithm::Matrix => pair_matrix(&cx),
    };
    pairs.retain(|p| p.dim <= max_dim);
    // finite pairs of each dimension before its essential classes
    pairs.sort_by_key(|p| (p.dim, p.death.is_none(), p.death.map(|d| cx.position(d)), cx.position(p.birth)));

    let floor = 0.0 - (field.min_value() + 0.0);
    let points = pairs
        .iter()
        .map(|p| {
            let birth = cx.value(p.birth);
            match p.death {
                Some(d) => DiagramPoint::new(p.dim, birth, cx.value(d)),
                None => DiagramPoint {
                    dim: p.dim,
                    birth,
                    death: floor,
                    essential: true,
                },
            }
        })
        .collect();
    Ok(PersistenceDiagram {
        points,
        orientation: Orientation::SuperlevelNegated,
        source: format!("superlevel {}x{}", field.rows(), field.cols()),
    })
}

/// Number of points of `dim` alive at raw level `level`: born at or above it
/// and dying strictly below it, counting essential classes as never dying.
pub fn alive_at_level(diagram: &PersistenceDiagram, dim: usize, level: f64) -> usize {
    let o = diagram.orientation;
    diagram
        .points
        .iter()
        .filter(|p| p.dim == dim)
        .filter(|p| o.raw_level(p.birth) >= level && (p.essential || o.raw_level(p.death) < level))
        .count()
}
