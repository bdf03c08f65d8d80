//! Dense exact Gauss-Jordan elimination over the rationals.

use num::Zero;

use crate::scalar::Q;

/// Reduced row echelon form in place. Returns the pivot columns.
pub fn rref(rows: &mut Vec<Vec<Q>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Q::from_integer(1.into()) / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r.max(0));
    rows.retain(|row| row.iter().any(|x| !x.is_zero()));
    pivots
}

pub fn rank(rows: &[Vec<Q>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Solves `A x = b` where `a` is given column-wise: `a[j]` is the image of the
/// `j`-th unknown, a vector of length `nrows`. Free variables are set to zero,
/// so the solution is supported on the leftmost independent columns.
pub fn solve_columns(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let nrows = b.len();
    let ncols = a.len();
    let mut aug: Vec<Vec<Q>> = (0..nrows)
        .map(|i| {
            let mut row: Vec<Q> = a.iter().map(|col| col[i].clone()).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Q::zero(); ncols];
    for (row, &c) in aug.iter().zip(&pivots) {
        x[c] = row[ncols].clone();
    }
    Some(x)
}

/// Basis of the kernel of the map whose columns are `a` (each of length `nrows`).
pub fn kernel_columns(a: &[Vec<Q>], nrows: usize) -> Vec<Vec<Q>> {
    let ncols = a.len();
    let mut m: Vec<Vec<Q>> = (0..nrows)
        .map(|i| a.iter().map(|col| col[i].clone()).collect())
        .collect();
    let pivots = rref(&mut m, ncols);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); ncols];
        v[free] = Q::from_integer(1.into());
        for (row, &p) in m.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        out.push(v);
    }
    out
}
