//! Sparse symmetric positive definite solves: direct (faer Cholesky) and
//! Jacobi-preconditioned conjugate gradients.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LinearSolver {
    /// Sparse Cholesky factorization.
    Cholesky,
    /// Conjugate gradients with diagonal preconditioning, stopped at the
    /// given relative residual.
    Pcg { rel_tol: f64, max_iter: usize },
}

impl Default for LinearSolver {
    fn default() -> Self {
        LinearSolver::Cholesky
    }
}

impl LinearSolver {
    pub fn pcg() -> Self {
        LinearSolver::Pcg { rel_tol: 1e-10, max_iter: 100_000 }
    }
}

/// `A u = b` with `A` given by its diagonal and strictly upper entries.
#[derive(Debug, Clone, Default)]
pub(crate) struct SymSystem {
    pub diag: Vec<f64>,
    pub off: Vec<(u32, u32, f64)>,
    pub rhs: Vec<f64>,
}

impl SymSystem {
    pub fn new(n: usize) -> Self {
        SymSystem { diag: vec![0.0; n], off: Vec::new(), rhs: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn solve(&self, solver: LinearSolver) -> Result<Vec<f64>> {
        if self.len() == 0 {
            return Err(Error::SingularSystem("no unknowns".into()));
        }
        match solver {
            LinearSolver::Cholesky => self.cholesky(),
            LinearSolver::Pcg { rel_tol, max_iter } => self.pcg(rel_tol, max_iter),
        }
    }

    fn cholesky(&self) -> Result<Vec<f64>> {
        let n = self.len();
        let mut t = Vec::with_capacity(n + 2 * self.off.len());
        for (i, &d) in self.diag.iter().enumerate() {
            t.push(Triplet::new(i, i, d));
        }
        for &(i, j, g) in &self.off {
            t.push(Triplet::new(i as usize, j as usize, g));
            t.push(Triplet::new(j as usize, i as usize, g));
        }
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &t)
            .map_err(|e| Error::SingularSystem(format!("matrix assembly: {e:?}")))?;
        let llt = a.sp_cholesky(Side::Lower).map_err(|e| Error::SingularSystem(format!("cholesky: {e:?}")))?;
        let b = Mat::<f64>::from_fn(n, 1, |i, _| self.rhs[i]);
        let x = llt.solve(&b);
        let u: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem("non-finite solution".into()));
        }
        Ok(u)
    }

    fn pcg(&self, rel_tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        let n = self.len();
        // compressed rows of the off-diagonal part
        let mut count = vec![0usize; n + 1];
        for &(i, j, _) in &self.off {
            count[i as usize + 1] += 1;
            count[j as usize + 1] += 1;
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let mut fill = count.clone();
        let mut cols = vec![0u32; count[n]];
        let mut vals = vec![0.0; count[n]];
        for &(i, j, g) in &self.off {
            let (i, j) = (i as usize, j as usize);
            cols[fill[i]] = j as u32;
            vals[fill[i]] = g;
            fill[i] += 1;
            cols[fill[j]] = i as u32;
            vals[fill[j]] = g;
            fill[j] += 1;
        }
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                let mut s = self.diag[i] * x[i];
                for k in count[i]..count[i + 1] {
                    s += vals[k] * x[cols[k] as usize];
                }
                y[i] = s;
            }
        };
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let mut x = vec![0.0; n];
        let mut r = self.rhs.clone();
        let b_norm = dot(&r, &r).sqrt();
        if b_norm == 0.0 {
            return Ok(x);
        }
        let mut z: Vec<f64> = r.iter().zip(&self.diag).map(|(r, d)| r / d).collect();
        let mut p = z.clone();
        let mut q = vec![0.0; n];
        let mut rz = dot(&r, &z);
        for it in 0..max_iter {
            apply(&p, &mut q);
            let alpha = rz / dot(&p, &q);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            let res = dot(&r, &r).sqrt() / b_norm;
            if res <= rel_tol {
                return Ok(x);
            }
            if !res.is_finite() {
                return Err(Error::SolverNonConvergence { iterations: it + 1, residual: res });
            }
            for i in 0..n {
                z[i] = r[i] / self.diag[i];
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::SolverNonConvergence { iterations: max_iter, residual: dot(&r, &r).sqrt() / b_norm })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // 1D Dirichlet chain: u'' = 0, u(0) = 0, u(n+1) = 1
    fn chain(n: usize) -> SymSystem {
        let mut s = SymSystem::new(n);
        for i in 0..n {
            s.diag[i] = 2.0;
            if i + 1 < n {
                s.off.push((i as u32, i as u32 + 1, -1.0));
            }
        }
        s.rhs[n - 1] = 1.0;
        s
    }

    #[test]
    fn direct_and_iterative_agree() {
        let s = chain(50);
        let a = s.solve(LinearSolver::Cholesky).unwrap();
        let b = s.solve(LinearSolver::pcg()).unwrap();
        for i in 0..50 {
            let exact = (i + 1) as f64 / 51.0;
            assert!((a[i] - exact).abs() < 1e-12);
            assert!((b[i] - exact).abs() < 1e-8);
        }
    }

    #[test]
    fn iteration_limit_is_reported() {
        let s = chain(200);
        let e = s.solve(LinearSolver::Pcg { rel_tol: 1e-14, max_iter: 3 }).unwrap_err();
        assert!(matches!(e, Error::SolverNonConvergence { iterations: 3, .. }));
    }
}
