//! Dense complex Gaussian elimination with partial pivoting, sized for the
//! small `k × k` systems of the Laplace-transform solver.

use alloc::vec::Vec;

use crate::poly::{cabs, Complex64};
use crate::{Error, Result};

/// Solves `A x = b` for a square row-major `A`.
pub fn solve(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::Numerical("matrix and right-hand side dimensions differ".into()));
    }
    let scale = a
        .iter()
        .flat_map(|row| row.iter().map(|&v| cabs(v)))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Singular { column: 0, pivot: 0.0 });
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| cabs(a[i][col]).total_cmp(&cabs(a[j][col])))
            .unwrap_or(col);
        let pivot = cabs(a[pivot_row][col]);
        if pivot <= 1e-14 * scale {
            return Err(Error::Singular { column: col, pivot });
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in col..n {
                let v = a[col][c];
                a[row][c] -= factor * v;
            }
            let v = b[col];
            b[row] -= factor * v;
        }
    }
    let mut x = alloc::vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn small_complex_system() {
        // Needs a row swap: the (0, 0) entry is zero.
        let a = vec![
            vec![c(0.0, 0.0), c(1.0, 1.0), c(2.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, -1.0), c(1.0, 0.0)],
            vec![c(3.0, 2.0), c(1.0, 0.0), c(0.0, 1.0)],
        ];
        let x = vec![c(1.0, -1.0), c(0.5, 2.0), c(-3.0, 0.25)];
        let b: Vec<Complex64> = a
            .iter()
            .map(|row| row.iter().zip(&x).map(|(&m, &v)| m * v).sum())
            .collect();
        let solved = solve(a, b).unwrap();
        for (s, e) in solved.iter().zip(&x) {
            assert!(cabs(s - e) < 1e-13);
        }
    }

    #[test]
    fn singular_is_reported() {
        let a = vec![vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]];
        assert!(matches!(solve(a, vec![c(1.0, 0.0); 2]), Err(Error::Singular { .. })));
        assert!(solve(vec![vec![c(1.0, 0.0)]], vec![]).is_err());
    }
}
