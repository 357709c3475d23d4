use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::Rational;

/// Solves `A c = b` exactly, `A` given by its columns. Free variables are set
/// to zero. Returns `None` when the system is inconsistent.
pub fn solve_columns(columns: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let rows = rhs.len();
    let cols = columns.len();
    // Augmented row-major matrix.
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            let mut r: Vec<Rational> = columns.iter().map(|c| c[i].clone()).collect();
            r.push(rhs[i].clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].clone();
        for x in m[row].iter_mut() {
            *x /= &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=cols {
                    let t = &f * &m[row][c];
                    m[r][c] -= t;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    if m[row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    let mut out = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        out[c] = m[r][cols].clone();
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::int;

    #[test]
    fn small_systems() {
        let cols = vec![
            vec![int(1), int(1)],
            vec![int(1), int(-1)],
            vec![int(2), int(2)],
        ];
        let c = solve_columns(&cols, &[int(3), int(1)]).unwrap();
        assert_eq!(c, vec![int(2), int(1), int(0)]);
        let cols = vec![vec![int(1), int(2)]];
        assert!(solve_columns(&cols, &[int(1), int(1)]).is_none());
    }
}
