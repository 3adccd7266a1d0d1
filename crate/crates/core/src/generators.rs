//! Deterministic test graphs and weighted Barabási–Albert networks.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Measure};

#[derive(Debug, Clone, PartialEq)]
pub enum EdgeWeights {
    Uniform(f64),
    /// Weight of edge `{k, k+1 mod n}` at position `k`.
    PerEdge(Vec<f64>),
}

/// Cycle `0 ~ 1 ~ ... ~ n-1 ~ 0`.
pub fn gen_cycle(n: usize, weights: EdgeWeights) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidConfig(format!("cycle needs n >= 3, got {n}")));
    }
    let ws = match weights {
        EdgeWeights::Uniform(w) => vec![w; n],
        EdgeWeights::PerEdge(ws) if ws.len() == n => ws,
        EdgeWeights::PerEdge(ws) => return Err(Error::BadWeightCount { expected: n, got: ws.len() }),
    };
    if let Some(w) = ws.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::InvalidConfig(format!("cycle weights must be positive, got {w}")));
    }
    let edges: Vec<_> = (0..n).map(|k| (k, (k + 1) % n, ws[k])).collect();
    Graph::from_edges(n, &edges)
}

/// Unweighted path `0 ~ 1 ~ ... ~ n-1`.
pub fn gen_path(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::TooFewNodes(n));
    }
    let edges: Vec<_> = (0..n - 1).map(|k| (k, k + 1, 1.0)).collect();
    Graph::from_edges(n, &edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BAConfig {
    pub n: usize,
    /// Size of the seed clique.
    pub n0: usize,
    /// Edges added per arriving node.
    pub m: usize,
    /// Weight exponent: `w(i,j) = (deg_i deg_j)^theta`.
    pub theta: f64,
    pub seed: u64,
}

impl BAConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.n > self.n0 && self.n0 >= self.m && self.m >= 1 && self.n0 >= 2) {
            return Err(Error::InvalidConfig(format!(
                "need n > n0 >= m >= 1 and n0 >= 2, got n={}, n0={}, m={}",
                self.n, self.n0, self.m
            )));
        }
        if !(0.0..1.0).contains(&self.theta) {
            return Err(Error::InvalidConfig(format!("theta must lie in [0, 1), got {}", self.theta)));
        }
        Ok(())
    }
}

/// Preferential attachment grown from an `n0`-clique; each arriving node
/// links to `m` distinct existing nodes drawn with probability proportional
/// to their current degree. Weights use the final unweighted degrees.
pub fn gen_barabasi_albert(config: &BAConfig) -> Result<Graph> {
    config.validate()?;
    let BAConfig { n, n0, m, theta, seed } = *config;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj = vec![vec![false; n]; n];
    // every edge endpoint once: uniform draws from it are degree-proportional
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * (n0 * n0 + n * m));
    for i in 0..n0 {
        for j in (i + 1)..n0 {
            adj[i][j] = true;
            adj[j][i] = true;
            endpoints.extend([i, j]);
        }
    }
    let mut chosen = Vec::with_capacity(m);
    for v in n0..n {
        chosen.clear();
        while chosen.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            adj[v][t] = true;
            adj[t][v] = true;
            endpoints.extend([v, t]);
        }
    }
    let deg: Vec<f64> = adj.iter().map(|r| r.iter().filter(|&&b| b).count() as f64).collect();
    let weights = DMatrix::from_fn(n, n, |i, j| if adj[i][j] { (deg[i] * deg[j]).powf(theta) } else { 0.0 });
    Graph::new(weights, Measure::Counting)
}
