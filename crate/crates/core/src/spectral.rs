//! Symmetric eigendecomposition (cyclic Jacobi) and spectral matrix
//! functions.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Sweep cap for the Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;
/// Convergence threshold on `||offdiag||_F / ||M||_F`.
pub const JACOBI_TOL: f64 = 1e-12;
/// Eigenvalues with magnitude below this (times `max(1, rho)`) are treated
/// as exact zeros of a Laplacian kernel.
pub const KERNEL_TOL: f64 = 1e-10;
/// Eigenvalues below `-NEGATIVE_TOL * max(1, rho)` are rejected.
pub const NEGATIVE_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Ascending eigenvalues.
    pub eigenvalues: DVector<f64>,
    /// Orthonormal eigenvectors, one per column, in eigenvalue order.
    pub eigenvectors: DMatrix<f64>,
    /// `||U diag(lambda) U^T - M||_F`.
    pub residual: f64,
    pub sweeps: usize,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(f(lambda)) U^T`, symmetrized.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mut scaled = self.eigenvectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.eigenvalues[k]);
        }
        let m = &scaled * self.eigenvectors.transpose();
        (&m + m.transpose()) * 0.5
    }
}

/// Decomposes a symmetric matrix with cyclic Jacobi rotations.
pub fn sym_eig(matrix: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::NotSquare { rows: n, cols: matrix.ncols() });
    }
    let scale = matrix.amax();
    for i in 0..n {
        for j in (i + 1)..n {
            if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-10 * scale {
                return Err(Error::NotSymmetric { i, j });
            }
        }
    }
    let sym = (matrix + matrix.transpose()) * 0.5;
    let norm = sym.norm();

    // column-major working copies: a[i + j * n]
    let mut a: Vec<f64> = sym.as_slice().to_vec();
    let mut v: Vec<f64> = DMatrix::<f64>::identity(n, n).as_slice().to_vec();

    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for j in 0..n {
            for i in 0..n {
                if i != j {
                    s += a[i + j * n] * a[i + j * n];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&a) > JACOBI_TOL * norm {
        if sweeps == MAX_SWEEPS {
            return Err(Error::ConvergenceFailure { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p + q * n];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p + p * n];
                let aqq = a[q + q * n];
                let theta = (aqq - app) / (2.0 * apq);
                let t =
                    if theta.is_finite() { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) } else { 0.0 };
                if t == 0.0 {
                    continue;
                }
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, n, p, q, c, s);
                a[p + p * n] = app - t * apq;
                a[q + q * n] = aqq + t * apq;
                a[p + q * n] = 0.0;
                a[q + p * n] = 0.0;
                for k in 0..n {
                    let vkp = v[k + p * n];
                    let vkq = v[k + q * n];
                    v[k + p * n] = c * vkp - s * vkq;
                    v[k + q * n] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x + x * n].total_cmp(&a[y + y * n]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| a[k + k * n]));
    let vm = DMatrix::from_column_slice(n, n, &v);
    let eigenvectors = DMatrix::from_fn(n, n, |i, k| vm[(i, order[k])]);

    let mut decomp = SpectralDecomposition { eigenvalues, eigenvectors, residual: 0.0, sweeps };
    let lambdas = decomp.eigenvalues.clone();
    let mut scaled = decomp.eigenvectors.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= lambdas[k];
    }
    decomp.residual = (&scaled * decomp.eigenvectors.transpose() - &sym).norm();
    Ok(decomp)
}

/// Applies the rotation `(c, s)` to rows/columns `p`, `q` of the symmetric
/// working matrix, except the 2x2 block at their intersection.
fn rotate(a: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k + p * n];
        let akq = a[k + q * n];
        let new_p = c * akp - s * akq;
        let new_q = s * akp + c * akq;
        a[k + p * n] = new_p;
        a[k + q * n] = new_q;
        a[p + k * n] = new_p;
        a[q + k * n] = new_q;
    }
}

pub fn spectral_radius(decomp: &SpectralDecomposition) -> f64 {
    decomp.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
}

/// `U diag(lambda^alpha) U^T` for a positive semidefinite decomposition.
///
/// Numerical zeros of the spectrum (`|lambda| <= KERNEL_TOL * max(1, rho)`)
/// map to exactly zero so the constant vector stays in the kernel.
pub fn fractional_power(decomp: &SpectralDecomposition, alpha: f64) -> Result<DMatrix<f64>> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let scale = spectral_radius(decomp).max(1.0);
    let min = decomp.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -NEGATIVE_TOL * scale {
        return Err(Error::NegativeEigenvalue(min));
    }
    Ok(decomp.apply(|l| if l <= KERNEL_TOL * scale { 0.0 } else { l.powf(alpha) }))
}

/// `exp(-t M)` for `M` similar to a symmetric matrix via `D^{1/2}`, with `D`
/// the diagonal of `degrees` (e.g. `M = I - D^{-1} A`).
pub fn matrix_exp_action(m: &DMatrix<f64>, degrees: &[f64], t: f64) -> Result<DMatrix<f64>> {
    Ok(SimilarDecomposition::new(m, degrees)?.exp_neg(t))
}

/// Decomposition of `D^{1/2} M D^{-1/2}`, reusable across times.
#[derive(Debug, Clone)]
pub struct SimilarDecomposition {
    pub sym: SpectralDecomposition,
    sqrt_deg: Vec<f64>,
}

impl SimilarDecomposition {
    pub fn new(m: &DMatrix<f64>, degrees: &[f64]) -> Result<Self> {
        let n = m.nrows();
        if degrees.len() != n {
            return Err(Error::SizeMismatch { base: n, sup: degrees.len() });
        }
        if let Some((node, &degree)) = degrees.iter().enumerate().find(|(_, d)| !(**d > 0.0)) {
            return Err(Error::NonSimilarizable { node, degree });
        }
        let sqrt_deg: Vec<f64> = degrees.iter().map(|d| d.sqrt()).collect();
        let s = DMatrix::from_fn(n, n, |i, j| sqrt_deg[i] * m[(i, j)] / sqrt_deg[j]);
        // the similarity is symmetric only up to rounding
        let s = (&s + s.transpose()) * 0.5;
        Ok(Self { sym: sym_eig(&s)?, sqrt_deg })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.sym.eigenvalues
    }

    /// `D^{-1/2} V exp(-t Lambda) V^T D^{1/2}`.
    pub fn exp_neg(&self, t: f64) -> DMatrix<f64> {
        let core = self.sym.apply(|l| (-t * l).exp());
        let n = core.nrows();
        DMatrix::from_fn(n, n, |i, j| core[(i, j)] * self.sqrt_deg[j] / self.sqrt_deg[i])
    }
}
