//! Tridiagonal linear systems, solved by the Thomas algorithm.
//!
//! No pivoting: every system assembled in this crate is strictly
//! diagonally dominant, so elimination is stable as is.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct TridiagonalSystem {
    /// Sub-diagonal, length n-1 (entry i multiplies x_i in row i+1).
    pub sub: Vec<f64>,
    /// Main diagonal, length n.
    pub diag: Vec<f64>,
    /// Super-diagonal, length n-1 (entry i multiplies x_{i+1} in row i).
    pub sup: Vec<f64>,
    /// Right-hand side, length n.
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>, rhs: Vec<f64>) -> Self {
        let n = diag.len();
        assert!(n >= 1);
        assert_eq!(sub.len(), n - 1);
        assert_eq!(sup.len(), n - 1);
        assert_eq!(rhs.len(), n);
        TridiagonalSystem {
            sub,
            diag,
            sup,
            rhs,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Strict row dominance `|diag| > |sub| + |sup|` everywhere.
    pub fn is_diagonally_dominant(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            let lower = if i > 0 { self.sub[i - 1].abs() } else { 0.0 };
            let upper = if i + 1 < n { self.sup[i].abs() } else { 0.0 };
            self.diag[i].abs() > lower + upper
        })
    }

    pub fn solve(&self) -> Result<Vec<f64>> {
        let n = self.len();
        let scale = self.diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let tiny = scale.max(f64::MIN_POSITIVE) * 1e-300f64.max(f64::EPSILON * 1e-2);
        let mut diag = self.diag.clone();
        let mut rhs = self.rhs.clone();
        for i in 1..n {
            if diag[i - 1].abs() <= tiny {
                return Err(Error::SingularSystem { row: i });
            }
            let m = self.sub[i - 1] / diag[i - 1];
            diag[i] -= m * self.sup[i - 1];
            rhs[i] -= m * rhs[i - 1];
        }
        if diag[n - 1].abs() <= tiny {
            return Err(Error::SingularSystem { row: n });
        }
        let mut x = vec![0.0; n];
        x[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (rhs[i] - self.sup[i] * x[i + 1]) / diag[i];
        }
        Ok(x)
    }

    /// Max-norm residual of a candidate solution, relative when the rhs is
    /// nonzero.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        let mut rhs_norm: f64 = 0.0;
        for i in 0..n {
            let mut ax = self.diag[i] * x[i];
            if i > 0 {
                ax += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                ax += self.sup[i] * x[i + 1];
            }
            worst = worst.max((ax - self.rhs[i]).abs());
            rhs_norm = rhs_norm.max(self.rhs[i].abs());
        }
        if rhs_norm > 0.0 {
            worst / rhs_norm
        } else {
            worst
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_unit_vectors() {
        for k in 0..4 {
            let mut rhs = vec![0.0; 4];
            rhs[k] = 1.0;
            let sys = TridiagonalSystem::new(vec![0.0; 3], vec![1.0; 4], vec![0.0; 3], rhs.clone());
            assert_eq!(sys.solve().unwrap(), rhs);
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let sys = TridiagonalSystem::new(
            vec![1.0, -0.5],
            vec![4.0, 5.0, 4.0],
            vec![0.5, 1.0],
            vec![0.0; 3],
        );
        assert_eq!(sys.solve().unwrap(), vec![0.0; 3]);
        assert_eq!(sys.residual(&[0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn zero_pivot_is_singular() {
        let sys = TridiagonalSystem::new(vec![1.0], vec![0.0, 1.0], vec![1.0], vec![1.0, 1.0]);
        assert!(matches!(sys.solve(), Err(Error::SingularSystem { row: 1 })));
    }

    #[test]
    fn dominant_system_solves_to_tight_residual() {
        let sys = TridiagonalSystem::new(
            vec![1.2, -0.7, 0.3, 2.0, -1.1],
            vec![5.0, 6.0, -4.5, 7.0, 6.5, 5.5],
            vec![-0.8, 1.5, 0.9, -2.2, 1.0],
            vec![1.0, -2.0, 3.0, -4.0, 5.0, -6.0],
        );
        assert!(sys.is_diagonally_dominant());
        let x = sys.solve().unwrap();
        assert!(sys.residual(&x) <= 1e-12);
    }
}
