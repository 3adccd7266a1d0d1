//! Weighted undirected graphs and their Laplacians.
//!
//! A [`Graph`] is the triple `(X, w, mu)`: nodes `0..n`, a dense symmetric
//! nonnegative weight matrix with zero diagonal, and a node measure. Every
//! graph is validated on construction (symmetric, loop-free, nonnegative,
//! connected).

use std::collections::VecDeque;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Relative tolerance under which `w(i,j)` and `w(j,i)` are considered equal.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Node measure of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    /// `mu = 1` on every node.
    Counting,
    /// `mu = deg`.
    Degree,
}

/// Content hash of a graph's weights and measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphId(pub u64);

impl fmt::Display for GraphId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    weights: DMatrix<f64>,
    measure: Measure,
    labels: Option<Vec<String>>,
    id: GraphId,
}

impl Graph {
    /// Validates `weights` and builds a graph with the given measure.
    ///
    /// Entries that differ from their transpose by at most
    /// `SYMMETRY_TOL * max|w|` are replaced by their average.
    pub fn new(mut weights: DMatrix<f64>, measure: Measure) -> Result<Self> {
        let (rows, cols) = weights.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        let n = rows;
        if n < 2 {
            return Err(Error::TooFewNodes(n));
        }
        let mut max_abs = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let w = weights[(i, j)];
                if !w.is_finite() {
                    return Err(Error::NonFinite { i, j });
                }
                max_abs = max_abs.max(w.abs());
            }
        }
        for i in 0..n {
            if weights[(i, i)] != 0.0 {
                return Err(Error::SelfLoop { node: i, line: None });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if weights[(i, j)] < 0.0 {
                    return Err(Error::NegativeWeight { i, j, weight: weights[(i, j)] });
                }
            }
        }
        let tol = SYMMETRY_TOL * max_abs;
        for i in 0..n {
            for j in (i + 1)..n {
                let (wij, wji) = (weights[(i, j)], weights[(j, i)]);
                if wij != wji {
                    if (wij - wji).abs() > tol {
                        return Err(Error::AsymmetricWeights { i, j, wij, wji });
                    }
                    let avg = 0.5 * (wij + wji);
                    weights[(i, j)] = avg;
                    weights[(j, i)] = avg;
                }
            }
        }
        let unreachable = unreachable_from_zero(n, |i, j| weights[(i, j)] > 0.0);
        if !unreachable.is_empty() {
            return Err(Error::Disconnected { unreachable });
        }
        let id = hash_weights(&weights, measure);
        Ok(Self { weights, measure, labels: None, id })
    }

    /// Builds a graph from an undirected edge list `(i, j, w)`.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut weights = DMatrix::zeros(n, n);
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidConfig(format!("edge ({i},{j}) out of range for n={n}")));
            }
            weights[(i, j)] = w;
            weights[(j, i)] = w;
        }
        Self::new(weights, Measure::Counting)
    }

    pub fn with_measure(mut self, measure: Measure) -> Self {
        self.measure = measure;
        self.id = hash_weights(&self.weights, measure);
        self
    }

    /// Attaches cosmetic node labels; they do not affect identity.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::InvalidConfig(format!("{} labels for {} nodes", labels.len(), self.n())));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn id(&self) -> GraphId {
        self.id
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.weights[(i, j)] > 0.0
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&j| self.weights[(i, j)] > 0.0)
    }

    /// Undirected edges `{i, j}` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.weights[(i, j)] > 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count() == self.n() * (self.n() - 1) / 2
    }

    pub fn degree(&self) -> Vec<f64> {
        degree(self)
    }

    /// Value of the node measure at every node.
    pub fn measure_values(&self) -> Vec<f64> {
        match self.measure {
            Measure::Counting => vec![1.0; self.n()],
            Measure::Degree => self.degree(),
        }
    }
}

/// Validates a raw weight matrix as a counting-measure graph.
pub fn validate_graph(raw: DMatrix<f64>) -> Result<Graph> {
    Graph::new(raw, Measure::Counting)
}

/// `deg(x_i) = sum_j w(x_i, x_j)`.
pub fn degree(graph: &Graph) -> Vec<f64> {
    graph.weights.row_iter().map(|r| r.sum()).collect()
}

/// Nodes not reachable from node 0 through pairs where `adjacent(i, j)` holds.
pub(crate) fn unreachable_from_zero(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            if !seen[j] && adjacent(i, j) {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    (0..n).filter(|&i| !seen[i]).collect()
}

fn hash_weights(weights: &DMatrix<f64>, measure: Measure) -> GraphId {
    let mut hasher = Sha256::new();
    hasher.update((weights.nrows() as u64).to_le_bytes());
    hasher.update([measure as u8]);
    for w in weights.iter() {
        hasher.update(w.to_bits().to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    GraphId(u64::from_le_bytes(bytes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LaplacianKind {
    /// `D - A`
    Unnormalized,
    /// `I - D^{-1} A`
    Normalized,
}

/// How a Laplacian's graph was derived from its base graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Transform {
    None,
    Fractional { alpha: f64 },
    Path { kernel: String, alpha: f64 },
    Regularized { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub base: GraphId,
    pub transform: Transform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    pub entries: DMatrix<f64>,
    pub kind: LaplacianKind,
    pub provenance: Provenance,
}

impl LaplacianMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    /// Largest absolute row sum.
    pub fn max_row_sum(&self) -> f64 {
        self.entries.row_iter().map(|r| r.sum().abs()).fold(0.0, f64::max)
    }

    pub fn with_transform(mut self, base: GraphId, transform: Transform) -> Self {
        self.provenance = Provenance { base, transform };
        self
    }
}

/// Unnormalized Laplacian `D - A`.
pub fn laplacian(graph: &Graph) -> LaplacianMatrix {
    let deg = degree(graph);
    let mut entries = -graph.weights.clone();
    for (i, d) in deg.iter().enumerate() {
        entries[(i, i)] = *d;
    }
    LaplacianMatrix {
        entries,
        kind: LaplacianKind::Unnormalized,
        provenance: Provenance { base: graph.id, transform: Transform::None },
    }
}

/// Normalized (random-walk) Laplacian `I - D^{-1} A`.
pub fn normalized_laplacian(graph: &Graph) -> LaplacianMatrix {
    let n = graph.n();
    let deg = degree(graph);
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            entries[(i, j)] = if i == j { 1.0 } else { -graph.weights[(i, j)] / deg[i] };
        }
    }
    LaplacianMatrix {
        entries,
        kind: LaplacianKind::Normalized,
        provenance: Provenance { base: graph.id, transform: Transform::None },
    }
}

/// Symmetric normalized Laplacian `I - D^{-1/2} A D^{-1/2}`, similar to
/// [`normalized_laplacian`] through `D^{1/2}`.
pub fn symmetric_normalized_laplacian(graph: &Graph) -> DMatrix<f64> {
    let n = graph.n();
    let inv_sqrt: Vec<f64> = degree(graph).iter().map(|d| 1.0 / d.sqrt()).collect();
    DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { -graph.weights[(i, j)] * inv_sqrt[i] * inv_sqrt[j] })
}
