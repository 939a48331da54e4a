//! Dense simplex method for `max <c, y>` subject to `<a_i, y> <= 1`.
//!
//! The origin is always feasible, so no phase one is needed. Bland's rule
//! prevents cycling on the degenerate vertices typical of polytopes.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 10_000;

/// Support function of `{y : <a_i, y> <= 1}` in direction `c`; errors if unbounded.
pub fn max_over_halfspaces(normals: &[Vec<f64>], c: &[f64]) -> Result<f64> {
    let n = c.len();
    let m = normals.len();
    if normals.iter().any(|a| a.len() != n) {
        return Err(Error::Arg("normal dimension does not match the objective".into()));
    }
    // Columns: y+ (n), y- (n), slacks (m), rhs.
    let cols = 2 * n + m + 1;
    let rhs = cols - 1;
    let mut t = vec![vec![0.0; cols]; m + 1];
    for (i, a) in normals.iter().enumerate() {
        for j in 0..n {
            t[i][j] = a[j];
            t[i][n + j] = -a[j];
        }
        t[i][2 * n + i] = 1.0;
        t[i][rhs] = 1.0;
    }
    for j in 0..n {
        t[m][j] = -c[j];
        t[m][n + j] = c[j];
    }
    let mut basis: Vec<usize> = (0..m).map(|i| 2 * n + i).collect();
    for _ in 0..MAX_PIVOTS {
        let Some(enter) = (0..rhs).find(|&j| t[m][j] < -PIVOT_EPS) else {
            return Ok(t[m][rhs]);
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > PIVOT_EPS {
                let ratio = t[i][rhs] / t[i][enter];
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best - 1e-15 || (ratio <= best + 1e-15 && basis[i] < basis[l]),
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            return Err(Error::Unbounded("half-space intersection is unbounded in the given direction".into()));
        };
        let piv = t[r][enter];
        for v in t[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r {
                let factor = row[enter];
                if factor != 0.0 {
                    for (v, p) in row.iter_mut().zip(&pivot_row) {
                        *v -= factor * p;
                    }
                }
            }
        }
        basis[r] = enter;
    }
    Err(Error::Convergence("simplex pivot budget exhausted".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Vec<f64>> {
        vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]
    }

    #[test]
    fn support_of_square() {
        let v = max_over_halfspaces(&square(), &[1.0, 1.0]).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let v = max_over_halfspaces(&square(), &[-0.3, 0.2]).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unbounded_direction() {
        let half = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        assert!(matches!(max_over_halfspaces(&half, &[-1.0, 0.0]), Err(Error::Unbounded(_))));
    }

    #[test]
    fn degenerate_octahedron() {
        let mut normals = Vec::new();
        for sx in [-1.0, 1.0] {
            for sy in [-1.0, 1.0] {
                for sz in [-1.0, 1.0] {
                    normals.push(vec![sx, sy, sz]);
                }
            }
        }
        let v = max_over_halfspaces(&normals, &[0.2, 0.5, -0.1]).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }
}
