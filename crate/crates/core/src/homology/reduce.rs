//! Persistence pairing on a [`CubicalComplex`].
//!
//! Two routes produce the same pairs:
//! * [`pair_fast`]: union-find with the elder rule for `H0`, then column
//!   reduction of the square boundaries for `H1`.
//! * [`pair_matrix`]: the standard boundary-matrix reduction with the twist
//!   (clearing) step, reducing squares before edges.
//!
//! Columns are sorted lists of filtration positions; adding columns is a
//! symmetric difference.

use super::cubical::{CellKind, CubicalComplex};

/// A birth cell paired with the cell that kills it, or `None` if essential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CellPair {
    pub dim: usize,
    pub birth: usize,
    pub death: Option<usize>,
}

const NONE: u32 = u32::MAX;

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

/// Symmetric difference of two sorted columns, written into `out`.
fn add_columns(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// `H0` pairs by union-find: when an edge joins two components the one whose
/// birth vertex comes later in the filtration dies. Returns the finite pairs
/// in death order followed by the essential class of each component.
pub fn union_find_h0(cx: &CubicalComplex) -> Vec<CellPair> {
    let nv = cx.n_vertices();
    let mut parent: Vec<u32> = (0..nv as u32).collect();
    // filtration position of the oldest vertex of each root
    let mut oldest: Vec<u32> = vec![NONE; nv];
    let mut pairs = Vec::with_capacity(nv);
    for &cell in cx.order() {
        let cell = cell as usize;
        match cx.kind(cell) {
            CellKind::Vertex => oldest[cell] = cx.position(cell) as u32,
            CellKind::Edge => {
                let (a, b) = cx.edge_vertices(cell);
                let ra = find(&mut parent, a as u32);
                let rb = find(&mut parent, b as u32);
                if ra == rb {
                    continue;
                }
                let (elder, younger) = if oldest[ra as usize] < oldest[rb as usize] {
                    (ra, rb)
                } else {
                    (rb, ra)
                };
                pairs.push(CellPair {
                    dim: 0,
                    birth: cx.order()[oldest[younger as usize] as usize] as usize,
                    death: Some(cell),
                });
                parent[younger as usize] = elder;
            }
            CellKind::Square => {}
        }
    }
    let mut roots: Vec<u32> = (0..nv as u32)
        .filter(|&v| find(&mut parent, v) == v)
        .map(|v| oldest[v as usize])
        .collect();
    roots.sort_unstable();
    pairs.extend(roots.into_iter().map(|p| CellPair {
        dim: 0,
        birth: cx.order()[p as usize] as usize,
        death: None,
    }));
    pairs
}

/// Reduces columns of the given cells (in filtration order); returns the
/// `(pivot position, column cell)` pairs in column order.
fn reduce_columns(
    cx: &CubicalComplex,
    columns: impl Iterator<Item = usize>,
    pivot_owner: &mut [u32],
) -> Vec<(usize, usize)> {
    let mut reduced: Vec<Vec<u32>> = Vec::new();
    let mut scratch = Vec::new();
    let mut pairs = Vec::new();
    for cell in columns {
        let mut col: Vec<u32> = cx
            .boundary(cell)
            .into_iter()
            .map(|f| cx.position(f) as u32)
            .collect();
        col.sort_unstable();
        while let Some(&low) = col.last() {
            let owner = pivot_owner[low as usize];
            if owner == NONE {
                break;
            }
            add_columns(&col, &reduced[owner as usize], &mut scratch);
            std::mem::swap(&mut col, &mut scratch);
        }
        if let Some(&low) = col.last() {
            pivot_owner[low as usize] = reduced.len() as u32;
            pairs.push((low as usize, cell));
            reduced.push(col);
        }
    }
    pairs
}

fn cells_of(cx: &CubicalComplex, kind: CellKind) -> impl Iterator<Item = usize> + '_ {
    cx.order()
        .iter()
        .map(|&c| c as usize)
        .filter(move |&c| cx.kind(c) == kind)
}

/// `H1` pairs `(edge, square)` from reducing the square boundary columns.
pub fn reduce_squares(cx: &CubicalComplex) -> Vec<CellPair> {
    let mut pivot_owner = vec![NONE; cx.len()];
    let mut pairs: Vec<CellPair> = reduce_columns(cx, cells_of(cx, CellKind::Square), &mut pivot_owner)
        .into_iter()
        .map(|(low, sq)| CellPair {
            dim: 1,
            birth: cx.order()[low] as usize,
            death: Some(sq),
        })
        .collect();
    pairs.sort_by_key(|p| p.death.map(|d| cx.position(d)));
    pairs
}

/// Union-find for `H0` plus square reduction for `H1` (if `max_dim >= 1`).
pub fn pair_fast(cx: &CubicalComplex, max_dim: usize) -> Vec<CellPair> {
    let mut pairs = union_find_h0(cx);
    if max_dim >= 1 {
        pairs.extend(reduce_squares(cx));
    }
    pairs
}

/// Full boundary-matrix reduction with clearing. Every positive cell that is
/// never paired is reported as essential.
pub fn pair_matrix(cx: &CubicalComplex) -> Vec<CellPair> {
    let total = cx.len();
    let mut pivot_owner = vec![NONE; total];
    let mut paired = vec![false; total];
    let mut pairs = Vec::new();

    let sq = reduce_columns(cx, cells_of(cx, CellKind::Square), &mut pivot_owner);
    for &(low, cell) in &sq {
        let edge = cx.order()[low] as usize;
        paired[edge] = true;
        paired[cell] = true;
        pairs.push(CellPair {
            dim: 1,
            birth: edge,
            death: Some(cell),
        });
    }
    // Twist: edges already used as pivots have zero reduced columns.
    let edge_cols: Vec<usize> = cells_of(cx, CellKind::Edge).filter(|&e| !paired[e]).collect();
    let mut owner0 = vec![NONE; total];
    let ed = reduce_columns(cx, edge_cols.into_iter(), &mut owner0);
    for &(low, cell) in &ed {
        let v = cx.order()[low] as usize;
        paired[v] = true;
        paired[cell] = true;
        pairs.push(CellPair {
            dim: 0,
            birth: v,
            death: Some(cell),
        });
    }
    for &c in cx.order() {
        let c = c as usize;
        if !paired[c] {
            // an unpaired square would have a nonzero reduced column
            let dim = cx.kind(c).dim();
            debug_assert!(dim < 2);
            pairs.push(CellPair {
                dim,
                birth: c,
                death: None,
            });
        }
    }
    pairs
}
