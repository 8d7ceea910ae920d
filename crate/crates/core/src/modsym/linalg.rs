//! Exact nullspaces of integer matrices by fraction-free elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

fn content(row: &[BigInt]) -> BigInt {
    row.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

fn make_primitive(row: &mut [BigInt]) {
    let g = content(row);
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// Reduced row echelon form over `Z`: each pivot row is primitive and every
/// other row has a zero in its pivot column. Returns pivot columns.
pub fn row_reduce(rows: &mut Vec<Vec<BigInt>>, width: usize) -> Vec<usize> {
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..width {
        let Some(found) = (top..rows.len())
            .filter(|&i| !rows[i][col].is_zero())
            .min_by_key(|&i| rows[i][col].abs())
        else {
            continue;
        };
        rows.swap(top, found);
        make_primitive(&mut rows[top]);
        let pivot_row = rows[top].clone();
        let pv = pivot_row[col].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == top || row[col].is_zero() {
                continue;
            }
            // row <- pv * row - row[col] * pivot_row, then strip the content.
            let factor = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = &pv * &*x - &factor * y;
            }
            make_primitive(row);
        }
        pivots.push(col);
        top += 1;
        if top == rows.len() {
            break;
        }
    }
    rows.truncate(top);
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    pivots
}

/// A basis of `{x in Q^width : M x = 0}`, each vector scaled to a primitive integer vector.
pub fn nullspace(rows: &[Vec<BigInt>], width: usize) -> Vec<Vec<BigInt>> {
    let mut m = rows.to_vec();
    let pivots = row_reduce(&mut m, width);
    let free: Vec<usize> = (0..width).filter(|c| !pivots.contains(c)).collect();
    let lcm = pivots
        .iter()
        .zip(&m)
        .fold(BigInt::one(), |l, (&c, row)| l.lcm(&row[c]));
    free.iter()
        .map(|&f| {
            let mut v = vec![BigInt::zero(); width];
            v[f] = lcm.clone();
            for (&c, row) in pivots.iter().zip(&m) {
                // row[c] x_c + row[f] x_f = 0 (other free variables are zero).
                v[c] = -(&row[f] * &lcm) / &row[c];
            }
            make_primitive(&mut v);
            v
        })
        .collect()
}

pub fn rank(rows: &[Vec<BigInt>], width: usize) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m, width).len()
}
