//! Sparse direct solves with an enforced residual contract.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};

use super::Scalar;
use crate::error::{Error, Result};

/// Relative residual every accepted solve must reach.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Square sparse matrix in coordinate form; duplicate entries are summed.
#[derive(Clone, Debug, Default)]
pub struct SparseMatrix<T> {
    pub n: usize,
    pub entries: Vec<(usize, usize, T)>,
}

impl<T: Scalar> SparseMatrix<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            entries: (0..n).map(|i| (i, i, T::one())).collect(),
        }
    }

    #[inline]
    pub fn push(&mut self, i: usize, j: usize, v: T) {
        self.entries.push((i, j, v));
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        for &(i, j, v) in &self.entries {
            y[i] += v * x[j];
        }
        y
    }

    /// Dense value of entry (i, j); linear time, meant for tests.
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries
            .iter()
            .filter(|e| e.0 == i && e.1 == j)
            .fold(T::zero(), |acc, e| acc + e.2)
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, T>> {
        let trip: Vec<Triplet<usize, usize, T>> = self
            .entries
            .iter()
            .map(|&(i, j, v)| Triplet::new(i, j, v))
            .collect();
        SparseColMat::try_new_from_triplets(self.n, self.n, &trip)
            .map_err(|e| Error::Solver(format!("matrix construction failed: {e:?}")))
    }
}

/// Assembled linear system `matrix * x = rhs`.
#[derive(Clone, Debug)]
pub struct SparseSystem<T> {
    pub matrix: SparseMatrix<T>,
    pub rhs: Vec<T>,
}

fn norm<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|x| x.modulus().powi(2)).sum::<f64>().sqrt()
}

/// Relative residual `|A x - b| / |b|` (absolute when `b = 0`).
pub fn relative_residual<T: Scalar>(a: &SparseMatrix<T>, x: &[T], b: &[T]) -> f64 {
    let ax = a.matvec(x);
    let r: Vec<T> = ax.iter().zip(b).map(|(&p, &q)| p - q).collect();
    let nb = norm(b);
    let nr = norm(&r);
    if nb > 0.0 {
        nr / nb
    } else {
        nr
    }
}

/// LU factorization that can be reused for several right-hand sides.
pub struct Factorization<T: Scalar> {
    matrix: SparseMatrix<T>,
    lu: faer::sparse::linalg::solvers::Lu<usize, T>,
}

impl<T: Scalar> Factorization<T> {
    pub fn new(matrix: SparseMatrix<T>) -> Result<Self> {
        let lu = matrix
            .to_faer()?
            .sp_lu()
            .map_err(|e| Error::Solver(format!("LU factorization failed: {e:?}")))?;
        Ok(Self { matrix, lu })
    }

    pub fn matrix(&self) -> &SparseMatrix<T> {
        &self.matrix
    }

    fn raw_solve(&self, rhs: &[T]) -> Vec<T> {
        let b = Mat::<T>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        let x = self.lu.solve(&b);
        (0..rhs.len()).map(|i| x[(i, 0)]).collect()
    }

    /// Solves with one step of iterative refinement if needed. Fails when the
    /// result is not finite or the residual stays above [`RESIDUAL_TOL`], which
    /// is how a singular matrix shows up.
    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        if rhs.len() != self.matrix.n {
            return Err(Error::Argument(format!(
                "right-hand side has length {}, matrix has order {}",
                rhs.len(),
                self.matrix.n
            )));
        }
        let mut x = self.raw_solve(rhs);
        let mut res = residual_or_inf(&self.matrix, &x, rhs);
        if res > RESIDUAL_TOL {
            let ax = self.matrix.matvec(&x);
            let r: Vec<T> = rhs.iter().zip(&ax).map(|(&b, &y)| b - y).collect();
            let dx = self.raw_solve(&r);
            let refined: Vec<T> = x.iter().zip(&dx).map(|(&a, &b)| a + b).collect();
            let res2 = residual_or_inf(&self.matrix, &refined, rhs);
            if res2 < res {
                x = refined;
                res = res2;
            }
        }
        if res > RESIDUAL_TOL {
            return Err(Error::Solver(format!(
                "relative residual {res:e} exceeds {RESIDUAL_TOL:e} (matrix is singular or ill-conditioned)"
            )));
        }
        Ok(x)
    }
}

fn residual_or_inf<T: Scalar>(a: &SparseMatrix<T>, x: &[T], b: &[T]) -> f64 {
    if x.iter().any(|v| !v.finite()) {
        return f64::INFINITY;
    }
    let r = relative_residual(a, x, b);
    if r.is_finite() {
        r
    } else {
        f64::INFINITY
    }
}

/// Factorizes and solves once.
pub fn solve_sparse<T: Scalar>(system: &SparseSystem<T>) -> Result<Vec<T>> {
    Factorization::new(system.matrix.clone())?.solve(&system.rhs)
}

/// Solves a symmetric positive definite system by sparse Cholesky.
pub fn solve_spd(matrix: &SparseMatrix<f64>, rhs: &[f64]) -> Result<Vec<f64>> {
    let llt = matrix
        .to_faer()?
        .sp_cholesky(Side::Lower)
        .map_err(|e| Error::Solver(format!("Cholesky factorization failed: {e:?}")))?;
    let b = Mat::<f64>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
    let x = llt.solve(&b);
    let x: Vec<f64> = (0..rhs.len()).map(|i| x[(i, 0)]).collect();
    let res = residual_or_inf(matrix, &x, rhs);
    if res > RESIDUAL_TOL {
        return Err(Error::Solver(format!("SPD solve residual {res:e}")));
    }
    Ok(x)
}
