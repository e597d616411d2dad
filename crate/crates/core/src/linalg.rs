//! Small dense linear systems solved by LU factorization with scaled partial
//! pivoting.

use crate::error::{AocError, Result};

/// A pivot whose magnitude relative to its row scale falls below this is
/// treated as zero.
pub const SINGULAR_PIVOT_TOL: f64 = 1e-12;
/// Accepted residual max-norm, relative to `max(1, |rhs|_inf)`.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Square matrix (row-major) with a right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSystem {
    n: usize,
    matrix: Vec<f64>,
    rhs: Vec<f64>,
}

impl DenseSystem {
    pub fn new(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(AocError::DimensionMismatch("empty matrix".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(AocError::DimensionMismatch("matrix is not square".into()));
        }
        if rhs.len() != n {
            return Err(AocError::DimensionMismatch(format!(
                "matrix is {n}x{n} but rhs has {} entries",
                rhs.len()
            )));
        }
        Ok(Self {
            n,
            matrix: rows.into_iter().flatten().collect(),
            rhs,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }
}

/// `PA = LU` factors of a square matrix, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    original: Vec<f64>,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn factor(n: usize, matrix: &[f64]) -> Result<Self> {
        if matrix.len() != n * n || n == 0 {
            return Err(AocError::DimensionMismatch(format!(
                "expected {n}x{n} entries, got {}",
                matrix.len()
            )));
        }
        let mut lu = matrix.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut scale: Vec<f64> = (0..n)
            .map(|i| lu[i * n..(i + 1) * n].iter().fold(0.0_f64, |m, v| m.max(v.abs())))
            .collect();
        if scale.iter().any(|&s| s == 0.0 || !s.is_finite()) {
            return Err(AocError::SingularSystem);
        }

        for k in 0..n {
            let (pivot_row, pivot_ratio) = (k..n)
                .map(|i| (i, lu[i * n + k].abs() / scale[i]))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_ratio < SINGULAR_PIVOT_TOL {
                return Err(AocError::SingularSystem);
            }
            if pivot_row != k {
                for j in 0..n {
                    lu.swap(k * n + j, pivot_row * n + j);
                }
                perm.swap(k, pivot_row);
                scale.swap(k, pivot_row);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                if factor != 0.0 {
                    for j in k + 1..n {
                        lu[i * n + j] -= factor * lu[k * n + j];
                    }
                }
            }
        }
        Ok(Self {
            n,
            original: matrix.to_vec(),
            lu,
            perm,
        })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if rhs.len() != n {
            return Err(AocError::DimensionMismatch(format!(
                "rhs has {} entries, expected {n}",
                rhs.len()
            )));
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&i| rhs[i]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }

        let rhs_norm = rhs.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        if residual_max_norm(n, &self.original, &x, rhs) > RESIDUAL_TOL * rhs_norm {
            return Err(AocError::SingularSystem);
        }
        Ok(x)
    }
}

/// Max-norm of `A x - b` for a row-major `n x n` matrix.
pub fn residual_max_norm(n: usize, matrix: &[f64], x: &[f64], rhs: &[f64]) -> f64 {
    (0..n)
        .map(|i| {
            let ax: f64 = (0..n).map(|j| matrix[i * n + j] * x[j]).sum();
            (ax - rhs[i]).abs()
        })
        .fold(0.0, f64::max)
}

pub fn solve_dense(system: &DenseSystem) -> Result<Vec<f64>> {
    LuFactors::factor(system.n, &system.matrix)?.solve(&system.rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Vec<f64>> {
        solve_dense(&DenseSystem::new(rows, rhs).unwrap())
    }

    #[test]
    fn identity() {
        let x = solve(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![3.0, 7.0]).unwrap();
        assert_eq!(x, vec![3.0, 7.0]);
    }

    #[test]
    fn diagonal() {
        let x = solve(vec![vec![2.0, 0.0], vec![0.0, 4.0]], vec![2.0, 8.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0]);
    }

    #[test]
    fn two_device_first_moment_system() {
        let rows = vec![vec![0.5, -0.5], vec![-0.5, 1.0]];
        let x = solve(rows.clone(), vec![1.0, 1.0]).unwrap();
        // substitution: 0.5*6 - 0.5*4 = 1, -0.5*6 + 4 = 1
        assert!((x[0] - 6.0).abs() < 1e-12 && (x[1] - 4.0).abs() < 1e-12);
        assert!((rows[0][0] * x[0] + rows[0][1] * x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let x = solve(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![5.0, 9.0]).unwrap();
        assert_eq!(x, vec![9.0, 5.0]);
    }

    #[test]
    fn singular_matrix_rejected() {
        let err = solve(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 2.0]).unwrap_err();
        assert_eq!(err, AocError::SingularSystem);
        assert_eq!(err.to_string(), "singular system");
        assert!(solve(vec![vec![0.0, 0.0], vec![1.0, 1.0]], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn shape_errors() {
        assert!(DenseSystem::new(vec![vec![1.0, 2.0]], vec![1.0]).is_err());
        assert!(DenseSystem::new(vec![vec![1.0]], vec![1.0, 2.0]).is_err());
        assert!(DenseSystem::new(vec![], vec![]).is_err());
    }

    #[test]
    fn factors_reused_across_rhs() {
        let m = [4.0, 1.0, 2.0, 3.0];
        let lu = LuFactors::factor(2, &m).unwrap();
        for rhs in [[1.0, 0.0], [0.0, 1.0], [5.0, -2.0]] {
            let x = lu.solve(&rhs).unwrap();
            assert!(residual_max_norm(2, &m, &x, &rhs) < 1e-12);
        }
    }
}
