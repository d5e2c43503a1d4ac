//! Cubical complex of a pixel grid with pixels as vertices.
//!
//! Cells are numbered vertices first (`i * cols + j`), then horizontal edges
//! `(i, j)-(i, j+1)`, vertical edges `(i, j)-(i+1, j)`, and finally the unit
//! squares with top-left corner `(i, j)`. A cell enters the superlevel
//! filtration once all of its pixels do, i.e. at the minimum pixel value; in
//! canonical (negated) coordinates that is the maximum of the negated values,
//! which makes the filtration a lower-star filtration.

use crate::types::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Vertex,
    Edge,
    Square,
}

impl CellKind {
    pub fn dim(self) -> usize {
        match self {
            CellKind::Vertex => 0,
            CellKind::Edge => 1,
            CellKind::Square => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CubicalComplex {
    rows: usize,
    cols: usize,
    h_edges: usize,
    v_edges: usize,
    squares: usize,
    /// Canonical filtration value of each cell.
    values: Vec<f64>,
    /// Cells sorted by (value, dim, index).
    order: Vec<u32>,
    /// Inverse of `order`.
    position: Vec<u32>,
}

impl CubicalComplex {
    pub fn superlevel(field: &ScalarField) -> Self {
        let rows = field.rows();
        let cols = field.cols();
        // +0.0 folds -0.0 into 0.0 so that `min` and the total order agree
        let px: Vec<f64> = field.values().iter().map(|v| v + 0.0).collect();
        let n_vert = rows * cols;
        let h_edges = rows * (cols - 1);
        let v_edges = (rows - 1) * cols;
        let squares = (rows - 1) * (cols - 1);
        let total = n_vert + h_edges + v_edges + squares;

        let mut values = Vec::with_capacity(total);
        values.extend(px.iter().map(|v| 0.0 - v));
        for i in 0..rows {
            for j in 0..cols - 1 {
                values.push(0.0 - px[i * cols + j].min(px[i * cols + j + 1]));
            }
        }
        for i in 0..rows - 1 {
            for j in 0..cols {
                values.push(0.0 - px[i * cols + j].min(px[(i + 1) * cols + j]));
            }
        }
        for i in 0..rows - 1 {
            for j in 0..cols - 1 {
                let a = px[i * cols + j].min(px[i * cols + j + 1]);
                let b = px[(i + 1) * cols + j].min(px[(i + 1) * cols + j + 1]);
                values.push(0.0 - a.min(b));
            }
        }

        let mut cx = CubicalComplex {
            rows,
            cols,
            h_edges,
            v_edges,
            squares,
            values,
            order: Vec::new(),
            position: Vec::new(),
        };
        let mut order: Vec<u32> = (0..total as u32).collect();
        order.sort_unstable_by(|&a, &b| {
            let (a, b) = (a as usize, b as usize);
            cx.values[a]
                .total_cmp(&cx.values[b])
                .then(cx.kind(a).dim().cmp(&cx.kind(b).dim()))
                .then(a.cmp(&b))
        });
        let mut position = vec![0u32; total];
        for (p, &c) in order.iter().enumerate() {
            position[c as usize] = p as u32;
        }
        cx.order = order;
        cx.position = position;
        cx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n_vertices(&self) -> usize {
        self.rows * self.cols
    }

    pub fn n_edges(&self) -> usize {
        self.h_edges + self.v_edges
    }

    pub fn n_squares(&self) -> usize {
        self.squares
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn kind(&self, cell: usize) -> CellKind {
        let nv = self.n_vertices();
        if cell < nv {
            CellKind::Vertex
        } else if cell < nv + self.h_edges + self.v_edges {
            CellKind::Edge
        } else {
            CellKind::Square
        }
    }

    #[inline]
    pub fn value(&self, cell: usize) -> f64 {
        self.values[cell]
    }

    /// Cells in filtration order.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    #[inline]
    pub fn position(&self, cell: usize) -> usize {
        self.position[cell] as usize
    }

    /// Endpoints of an edge cell.
    #[inline]
    pub fn edge_vertices(&self, cell: usize) -> (usize, usize) {
        let nv = self.n_vertices();
        let c = self.cols;
        let e = cell - nv;
        if e < self.h_edges {
            let (i, j) = (e / (c - 1), e % (c - 1));
            (i * c + j, i * c + j + 1)
        } else {
            let e = e - self.h_edges;
            let (i, j) = (e / c, e % c);
            (i * c + j, (i + 1) * c + j)
        }
    }

    /// The four edges bounding a square cell: top, bottom, left, right.
    #[inline]
    pub fn square_edges(&self, cell: usize) -> [usize; 4] {
        let nv = self.n_vertices();
        let c = self.cols;
        let s = cell - nv - self.h_edges - self.v_edges;
        let (i, j) = (s / (c - 1), s % (c - 1));
        let h = |i: usize, j: usize| nv + i * (c - 1) + j;
        let v = |i: usize, j: usize| nv + self.h_edges + i * c + j;
        [h(i, j), h(i + 1, j), v(i, j), v(i, j + 1)]
    }

    /// Boundary of a cell (mod 2) as cell indices.
    pub fn boundary(&self, cell: usize) -> Vec<usize> {
        match self.kind(cell) {
            CellKind::Vertex => Vec::new(),
            CellKind::Edge => {
                let (a, b) = self.edge_vertices(cell);
                vec![a, b]
            }
            CellKind::Square => self.square_edges(cell).to_vec(),
        }
    }
}
