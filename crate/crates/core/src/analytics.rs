//! Walk analytics: stationary distribution, mean first passage times,
//! average trapping times, and the distance-decay audit of non-local weights.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::transition_matrix;
use crate::error::{Error, Result};
use crate::graph::{degree, laplacian, symmetric_normalized_laplacian, Graph};
use crate::metrics::DistanceTables;
use crate::spectral::{spectral_radius, sym_eig};

/// Default decay constant `1 + pi^2 / 2`.
pub const DECAY_CONSTANT: f64 = 1.0 + PI * PI / 2.0;

/// `pi_i = deg(i) / sum_k deg(k)`.
pub fn stationary_distribution(graph: &Graph) -> Vec<f64> {
    let deg = degree(graph);
    let total: f64 = deg.iter().sum();
    deg.iter().map(|d| d / total).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PassageMethod {
    Spectral,
    LinearSolve,
}

#[derive(Debug, Clone)]
pub struct PassageTimes {
    /// `F[(i, j)]`: expected steps from `i` to first reach `j`.
    pub mfpt: DMatrix<f64>,
    /// Average trapping time per target.
    pub trapping: Vec<f64>,
    pub method: PassageMethod,
}

/// `Fbar_j = 1 / (1 - pi_j) * sum_i pi_i F_{i,j}`.
pub fn trapping_times(mfpt: &DMatrix<f64>, pi: &[f64]) -> Vec<f64> {
    let n = mfpt.nrows();
    (0..n)
        .map(|j| {
            let s: f64 = (0..n).map(|i| pi[i] * mfpt[(i, j)]).sum();
            s / (1.0 - pi[j])
        })
        .collect()
}

/// Spectral mean first passage times from the eigenpairs `(1 - lambda_k, psi_k)`
/// of `I - D^{-1/2} A D^{-1/2}`:
///
/// `F_ij = (1/pi_j) sum_{k>=2} (psi_kj^2 - psi_ki psi_kj sqrt(d_j/d_i)) / (1 - lambda_k)`.
pub fn mfpt_spectral(graph: &Graph) -> Result<PassageTimes> {
    let n = graph.n();
    let deg = degree(graph);
    let pi = stationary_distribution(graph);
    let decomp = sym_eig(&symmetric_normalized_laplacian(graph))?;
    let zeros = decomp.eigenvalues.iter().filter(|&&m| m.abs() <= 1e-9).count();
    if zeros != 1 {
        return Err(Error::DegenerateEigenvalueOne(zeros));
    }
    // Green's function sum_{k>=2} psi_k psi_k^T / mu_k; the first pair is the kernel.
    let inv = DVector::from_iterator(
        n,
        decomp.eigenvalues.iter().enumerate().map(|(k, &m)| if k == 0 { 0.0 } else { 1.0 / m }),
    );
    let mut scaled = decomp.eigenvectors.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= inv[k];
    }
    let green = &scaled * decomp.eigenvectors.transpose();
    let sqrt_deg: Vec<f64> = deg.iter().map(|d| d.sqrt()).collect();
    let mfpt = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            (green[(j, j)] - green[(i, j)] * sqrt_deg[j] / sqrt_deg[i]) / pi[j]
        }
    });
    let trapping = trapping_times(&mfpt, &pi);
    Ok(PassageTimes { mfpt, trapping, method: PassageMethod::Spectral })
}

/// Mean first passage times by first-step analysis: for each target `j`
/// solve `(I - P_{-j}) f = 1` over the non-target nodes.
pub fn mfpt_solve(graph: &Graph) -> Result<PassageTimes> {
    let n = graph.n();
    let p = transition_matrix(graph);
    let columns: Vec<Result<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|target| {
            let idx: Vec<usize> = (0..n).filter(|&i| i != target).collect();
            let m = n - 1;
            let a = DMatrix::from_fn(m, m, |r, c| {
                let (i, k) = (idx[r], idx[c]);
                (if i == k { 1.0 } else { 0.0 }) - p[(i, k)]
            });
            let f = a.lu().solve(&DVector::from_element(m, 1.0)).ok_or(Error::SingularSystem { target })?;
            let mut col = vec![0.0; n];
            for (r, &i) in idx.iter().enumerate() {
                col[i] = f[r];
            }
            Ok(col)
        })
        .collect();
    let mut mfpt = DMatrix::zeros(n, n);
    for (j, col) in columns.into_iter().enumerate() {
        let col = col?;
        for i in 0..n {
            mfpt[(i, j)] = col[i];
        }
    }
    let trapping = trapping_times(&mfpt, &stationary_distribution(graph));
    Ok(PassageTimes { mfpt, trapping, method: PassageMethod::LinearSolve })
}

/// Largest violation of `F_ij = 1 + sum_{k != j} P_ik F_kj` over `i != j`.
pub fn first_step_residual(graph: &Graph, mfpt: &DMatrix<f64>) -> f64 {
    let n = graph.n();
    let p = transition_matrix(graph);
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            if i == j {
                continue;
            }
            let rhs: f64 = 1.0 + (0..n).filter(|&k| k != j).map(|k| p[(i, k)] * mfpt[(k, j)]).sum::<f64>();
            worst = worst.max((mfpt[(i, j)] - rhs).abs());
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayViolation {
    pub i: usize,
    pub j: usize,
    pub hops: u32,
    pub weight: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayAudit {
    pub alpha: f64,
    pub constant: f64,
    /// Spectral radius of the base Laplacian.
    pub rho: f64,
    pub pairs_checked: usize,
    /// Largest `|w| / (c (rho / (2(delta-1)))^alpha)`.
    pub max_ratio: f64,
    pub violations: Vec<DecayViolation>,
    /// Largest ratio against the tighter `c (rho / (2 delta - 1))^alpha`.
    pub max_ratio_tight: f64,
    pub violations_tight: usize,
}

/// Checks `|w(i,j)| <= c (rho(Delta) / (2 (delta(i,j) - 1)))^alpha` for all
/// pairs at hop distance at least 2 in `base`.
pub fn decay_audit(base: &Graph, weights: &Graph, alpha: f64, constant: f64) -> Result<DecayAudit> {
    let n = base.n();
    if weights.n() != n {
        return Err(Error::SizeMismatch { base: n, sup: weights.n() });
    }
    let rho = spectral_radius(&sym_eig(&laplacian(base).entries)?);
    let hops = DistanceTables::new(base).combinatorial;
    let mut audit = DecayAudit {
        alpha,
        constant,
        rho,
        pairs_checked: 0,
        max_ratio: 0.0,
        violations: Vec::new(),
        max_ratio_tight: 0.0,
        violations_tight: 0,
    };
    for i in 0..n {
        for j in (i + 1)..n {
            let d = hops[(i, j)];
            if d < 2 {
                continue;
            }
            let w = weights.weight(i, j).abs();
            let bound = constant * (rho / (2.0 * (d as f64 - 1.0))).powf(alpha);
            let tight = constant * (rho / (2.0 * d as f64 - 1.0)).powf(alpha);
            audit.pairs_checked += 1;
            audit.max_ratio = audit.max_ratio.max(w / bound);
            audit.max_ratio_tight = audit.max_ratio_tight.max(w / tight);
            if w > bound {
                audit.violations.push(DecayViolation { i, j, hops: d, weight: w, bound });
            }
            if w > tight {
                audit.violations_tight += 1;
            }
        }
    }
    Ok(audit)
}

/// For each hop distance `d >= 2` in `base`, the largest weight of `sup`
/// between pairs at that distance, divided by the largest weight of `sup`.
pub fn decay_profile(base: &Graph, sup: &Graph) -> Vec<(u32, f64)> {
    let hops = DistanceTables::new(base);
    let global = sup.weights().amax();
    let mut per = vec![0.0f64; hops.diameter as usize + 1];
    let n = base.n();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = hops.hops(i, j) as usize;
            per[d] = per[d].max(sup.weight(i, j));
        }
    }
    (2..per.len()).map(|d| (d as u32, per[d] / global)).collect()
}
