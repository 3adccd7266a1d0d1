//! Compatibility of a supergraph with the random-walk dynamics of a base graph.
//!
//! A supergraph `S` on the same node set is compatible with `G` when the
//! walk on `S` conditioned to move along edges of `G` is the walk on `G`.
//! This holds exactly when, at every node, the ratios between the weights
//! of any two base edges are the same in `G` and in `S`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{unreachable_from_zero, Graph};
use crate::metrics::DistanceTables;
use crate::nonlocal::{path_graph, KernelSpec};

/// Tolerance for supergraphs built exactly from the base weights.
pub const EXACT_TOL: f64 = 1e-9;
/// Tolerance for supergraphs carrying eigensolver noise.
pub const SPECTRAL_TOL: f64 = 1e-6;

/// A triple `(i; j, k)` of a node and two of its base neighbours whose
/// weight ratios disagree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub node: usize,
    pub j: usize,
    /// Anchor neighbour the ratio is taken against.
    pub k: usize,
    /// `w(i,j) / w(i,k)`
    pub base_ratio: f64,
    /// `w'(phi i, phi j) / w'(phi i, phi k)`
    pub super_ratio: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatReport {
    pub compatible: bool,
    pub worst_ratio_deviation: f64,
    pub witnesses: Vec<Witness>,
    pub tolerance: f64,
    /// Number of `(i; j, k)` ratios compared.
    pub triples_checked: usize,
}

fn check_mapping(n: usize, mapping: Option<&[usize]>) -> Result<Vec<usize>> {
    let Some(map) = mapping else {
        return Ok((0..n).collect());
    };
    if map.len() != n {
        return Err(Error::InvalidMapping(format!("mapping has {} entries for {n} nodes", map.len())));
    }
    let mut hit = vec![false; n];
    for (i, &m) in map.iter().enumerate() {
        if m >= n || hit[m] {
            return Err(Error::InvalidMapping(format!("node {i} maps to {m}, not a bijection")));
        }
        hit[m] = true;
    }
    Ok(map.to_vec())
}

/// Ratio test between `base` and `sup` under `mapping` (identity when `None`).
///
/// For each node the weight of every base neighbour is compared against the
/// first base neighbour; equality of these anchored ratios is equivalent to
/// equality over all neighbour pairs.
pub fn check_compatibility(
    base: &Graph,
    sup: &Graph,
    mapping: Option<&[usize]>,
    tolerance: f64,
) -> Result<CompatReport> {
    let n = base.n();
    if sup.n() != n {
        return Err(Error::SizeMismatch { base: n, sup: sup.n() });
    }
    let phi = check_mapping(n, mapping)?;
    for (i, j) in base.edges() {
        if !(sup.weight(phi[i], phi[j]) > 0.0) {
            return Err(Error::EdgeNotPreserved { i, j });
        }
    }

    let per_node: Vec<(f64, usize, Vec<Witness>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let nbrs: Vec<usize> = base.neighbors(i).collect();
            let mut worst = 0.0f64;
            let mut witnesses = Vec::new();
            let Some((&k, rest)) = nbrs.split_first() else {
                return (worst, 0, witnesses);
            };
            for &j in rest {
                let base_ratio = base.weight(i, j) / base.weight(i, k);
                let super_ratio = sup.weight(phi[i], phi[j]) / sup.weight(phi[i], phi[k]);
                let deviation = if base_ratio == super_ratio {
                    0.0
                } else {
                    (base_ratio - super_ratio).abs() / base_ratio.max(super_ratio)
                };
                worst = worst.max(deviation);
                if deviation > tolerance {
                    witnesses.push(Witness { node: i, j, k, base_ratio, super_ratio, deviation });
                }
            }
            (worst, rest.len(), witnesses)
        })
        .collect();

    let mut worst = 0.0f64;
    let mut triples = 0;
    let mut witnesses = Vec::new();
    for (w, count, mut wit) in per_node {
        worst = worst.max(w);
        triples += count;
        witnesses.append(&mut wit);
    }
    Ok(CompatReport {
        compatible: witnesses.is_empty(),
        worst_ratio_deviation: worst,
        witnesses,
        tolerance,
        triples_checked: triples,
    })
}

/// Ratio test against the path graph generated by `kernel`: compares
/// `h(d(i,j)) / h(d(i,k))` with `w(i,j) / w(i,k)` over base neighbours.
pub fn check_path_compatibility(
    base: &Graph,
    kernel: &KernelSpec,
    distances: &DistanceTables,
    tolerance: f64,
) -> Result<CompatReport> {
    let sup = path_graph(base, kernel, distances)?;
    check_compatibility(base, &sup.graph, None, tolerance)
}

/// A set of undirected edges on `n` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMask {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl EdgeMask {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidConfig(format!("mask edge ({i},{j}) out of range for n={n}")));
            }
            if i == j {
                return Err(Error::SelfLoop { node: i, line: None });
            }
            out.push((i.min(j), i.max(j)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(Self { n, edges: out })
    }

    /// The edge set `E` of a graph.
    pub fn of(graph: &Graph) -> Self {
        Self { n: graph.n(), edges: graph.edges() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// Transition matrix of the walk on `sup` conditioned to move only along
/// `mask`: weights off the mask are dropped and each row is renormalized by
/// its masked degree.
pub fn conditioned_transition(sup: &Graph, mask: &EdgeMask) -> Result<DMatrix<f64>> {
    let n = sup.n();
    if mask.n() != n {
        return Err(Error::SizeMismatch { base: mask.n(), sup: n });
    }
    let mut w = DMatrix::zeros(n, n);
    for &(i, j) in mask.edges() {
        let x = sup.weight(i, j);
        if !(x > 0.0) {
            return Err(Error::EdgeNotPreserved { i, j });
        }
        w[(i, j)] = x;
        w[(j, i)] = x;
    }
    for i in 0..n {
        if w.row(i).iter().all(|&x| x == 0.0) {
            return Err(Error::EmptyRow(i));
        }
    }
    let unreachable = unreachable_from_zero(n, |i, j| w[(i, j)] > 0.0);
    if !unreachable.is_empty() {
        return Err(Error::MaskDisconnects { unreachable });
    }
    for i in 0..n {
        let deg: f64 = w.row(i).sum();
        w.row_mut(i).iter_mut().for_each(|x| *x /= deg);
    }
    Ok(w)
}

/// Whether two graphs have entrywise-equal transition matrices under
/// `mapping` (identity when `None`), within an absolute tolerance.
pub fn stochastically_equivalent(g: &Graph, h: &Graph, mapping: Option<&[usize]>, tolerance: f64) -> Result<bool> {
    let n = g.n();
    if h.n() != n {
        return Err(Error::SizeMismatch { base: n, sup: h.n() });
    }
    let phi = check_mapping(n, mapping)?;
    let (dg, dh) = (g.degree(), h.degree());
    for i in 0..n {
        for j in 0..n {
            let p = g.weight(i, j) / dg[i];
            let q = h.weight(phi[i], phi[j]) / dh[phi[i]];
            if (p - q).abs() > tolerance {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
