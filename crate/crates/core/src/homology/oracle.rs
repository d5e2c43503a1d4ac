//! Betti numbers of a thresholded field, computed without any pairing.
//!
//! The superlevel set `{f >= level}` is the cubical subcomplex holding every
//! pixel, edge and square whose pixels all pass the threshold. `beta0` comes
//! from union-find on 4-adjacent pixels (exactly the edges of that complex);
//! a planar complex has no `beta2`, so `beta1 = beta0 - chi`.

use crate::error::{Error, Result};
use crate::types::ScalarField;

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// `(beta0, beta1)` of the superlevel set at `level`.
pub fn betti_at_level(field: &ScalarField, level: f64) -> Result<(usize, usize)> {
    if field.is_empty() {
        return Err(Error::EmptyField);
    }
    let (rows, cols) = (field.rows(), field.cols());
    let on = |i: usize, j: usize| field.get(i, j) >= level;
    let mut parent: Vec<usize> = (0..rows * cols).collect();
    let (mut v, mut e, mut f) = (0i64, 0i64, 0i64);
    for i in 0..rows {
        for j in 0..cols {
            if !on(i, j) {
                continue;
            }
            v += 1;
            if j + 1 < cols && on(i, j + 1) {
                e += 1;
                let (a, b) = (find(&mut parent, i * cols + j), find(&mut parent, i * cols + j + 1));
                parent[a] = b;
            }
            if i + 1 < rows && on(i + 1, j) {
                e += 1;
                let (a, b) = (find(&mut parent, i * cols + j), find(&mut parent, (i + 1) * cols + j));
                parent[a] = b;
            }
            if i + 1 < rows && j + 1 < cols && on(i, j + 1) && on(i + 1, j) && on(i + 1, j + 1) {
                f += 1;
            }
        }
    }
    let mut beta0 = 0usize;
    for i in 0..rows {
        for j in 0..cols {
            if on(i, j) && find(&mut parent, i * cols + j) == i * cols + j {
                beta0 += 1;
            }
        }
    }
    let chi = v - e + f;
    let beta1 = beta0 as i64 - chi;
    debug_assert!(beta1 >= 0);
    Ok((beta0, beta1 as usize))
}
