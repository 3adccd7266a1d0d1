//! Random walks: transition matrices, seeded Monte Carlo ensembles and the
//! spectral average return probability of the continuous-time walk.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{degree, symmetric_normalized_laplacian, Graph};
use crate::spectral::{sym_eig, SpectralDecomposition};

/// `P = D^{-1} A`.
pub fn transition_matrix(graph: &Graph) -> DMatrix<f64> {
    let deg = degree(graph);
    let n = graph.n();
    DMatrix::from_fn(n, n, |i, j| graph.weight(i, j) / deg[i])
}

/// Point mass at `node` on `n` nodes.
pub fn point_mass(n: usize, node: usize) -> Vec<f64> {
    let mut nu = vec![0.0; n];
    nu[node] = 1.0;
    nu
}

pub fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkEnsemble {
    /// One node sequence of length `steps + 1` per walk.
    pub trajectories: Vec<Vec<usize>>,
    pub seed: u64,
    pub steps: usize,
    pub start_distribution: Vec<f64>,
    pub visit_histogram: Vec<u64>,
}

impl WalkEnsemble {
    /// Visit counts normalized to a probability vector.
    pub fn visit_frequencies(&self) -> Vec<f64> {
        let total: u64 = self.visit_histogram.iter().sum();
        self.visit_histogram.iter().map(|&c| c as f64 / total as f64).collect()
    }
}

fn check_distribution(v: &[f64], what: &str) -> Result<()> {
    if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidDistribution(format!("{what} has negative or non-finite entries")));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("{what} sums to {s}")));
    }
    Ok(())
}

/// Inverse-CDF draw from cumulative sums; never returns a zero-mass index.
fn draw(cdf: &[f64], u: f64) -> usize {
    let k = cdf.partition_point(|&c| c <= u);
    if k < cdf.len() {
        return k;
    }
    // u beyond the rounded total: fall back to the last index with mass
    let mut k = cdf.len() - 1;
    while k > 0 && cdf[k] == cdf[k - 1] {
        k -= 1;
    }
    k
}

fn cumulative(row: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    row.map(|p| {
        acc += p;
        acc
    })
    .collect()
}

/// Samples `walks` trajectories of `steps` transitions from start
/// distribution `nu`.
///
/// Walk `k` draws from a ChaCha8 stream keyed by `(seed, k)`, so the
/// ensemble is identical regardless of how walks are scheduled on threads.
pub fn simulate(p: &DMatrix<f64>, nu: &[f64], walks: usize, steps: usize, seed: u64) -> Result<WalkEnsemble> {
    let n = p.nrows();
    if p.ncols() != n {
        return Err(Error::NotSquare { rows: n, cols: p.ncols() });
    }
    if nu.len() != n {
        return Err(Error::InvalidDistribution(format!("start distribution has {} entries for {n} nodes", nu.len())));
    }
    check_distribution(nu, "start distribution")?;
    for i in 0..n {
        let row: Vec<f64> = p.row(i).iter().copied().collect();
        check_distribution(&row, &format!("row {i} of the transition matrix"))?;
    }
    let start_cdf = cumulative(nu.iter().copied());
    let row_cdfs: Vec<Vec<f64>> = (0..n).map(|i| cumulative(p.row(i).iter().copied())).collect();

    let trajectories: Vec<Vec<usize>> = (0..walks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut node = draw(&start_cdf, rng.gen::<f64>());
            let mut traj = Vec::with_capacity(steps + 1);
            traj.push(node);
            for _ in 0..steps {
                node = draw(&row_cdfs[node], rng.gen::<f64>());
                traj.push(node);
            }
            traj
        })
        .collect();

    let mut visit_histogram = vec![0u64; n];
    for traj in &trajectories {
        for &v in traj {
            visit_histogram[v] += 1;
        }
    }
    Ok(WalkEnsemble { trajectories, seed, steps, start_distribution: nu.to_vec(), visit_histogram })
}

/// Total-variation distance `0.5 * sum |p - q|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Row-normalized counts of observed transitions `i -> j`.
pub fn empirical_transitions(ensemble: &WalkEnsemble, n: usize) -> DMatrix<f64> {
    let mut counts = DMatrix::<f64>::zeros(n, n);
    for traj in &ensemble.trajectories {
        for w in traj.windows(2) {
            counts[(w[0], w[1])] += 1.0;
        }
    }
    for i in 0..n {
        let s: f64 = counts.row(i).sum();
        if s > 0.0 {
            counts.row_mut(i).iter_mut().for_each(|x| *x /= s);
        }
    }
    counts
}

/// Spectrum of the normalized Laplacian `I - D^{-1} A`, computed through its
/// symmetric similarity `I - D^{-1/2} A D^{-1/2}`.
pub fn normalized_spectrum(graph: &Graph) -> Result<SpectralDecomposition> {
    sym_eig(&symmetric_normalized_laplacian(graph))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnProbabilityCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub source: String,
}

/// `p_0(t) = (1/N) sum_m exp(-lambda_m t)` over a normalized-Laplacian
/// spectrum; the kernel eigenvalue is pinned to exactly zero.
pub fn return_probability(spectrum: &SpectralDecomposition, times: &[f64], source: &str) -> ReturnProbabilityCurve {
    let n = spectrum.n() as f64;
    let lambdas: Vec<f64> = spectrum.eigenvalues.iter().map(|&l| if l.abs() <= 1e-9 { 0.0 } else { l }).collect();
    let values = times.iter().map(|&t| lambdas.iter().map(|l| (-l * t).exp()).sum::<f64>() / n).collect();
    ReturnProbabilityCurve { times: times.to_vec(), values, source: source.to_string() }
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..count).map(|k| 10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64)).collect()
}
