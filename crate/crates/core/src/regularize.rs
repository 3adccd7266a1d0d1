//! Regularized supergraphs: base-edge weights copied verbatim from the base
//! graph, every other pair `beta` times the non-local weight.

use log::warn;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{laplacian, Graph, GraphId, LaplacianMatrix, Measure, Transform};
use crate::nonlocal::NonlocalGraph;

#[derive(Debug, Clone)]
pub struct RegularizedGraph {
    pub graph: Graph,
    pub beta: f64,
    pub origin: GraphId,
    pub alpha: f64,
}

impl RegularizedGraph {
    pub fn laplacian(&self) -> LaplacianMatrix {
        laplacian(&self.graph)
            .with_transform(self.origin, Transform::Regularized { alpha: self.alpha, beta: self.beta })
    }
}

/// `rw(i,j) = w(i,j)` on base edges and `beta * w_nl(i,j)` elsewhere.
pub fn regularize(base: &Graph, nonlocal: &NonlocalGraph, beta: f64) -> Result<RegularizedGraph> {
    if nonlocal.origin != base.id() {
        return Err(Error::OriginMismatch { expected: base.id().to_string(), found: nonlocal.origin.to_string() });
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidBeta(beta));
    }
    if beta < 1.0 {
        warn!("regularization parameter beta = {beta} < 1 shrinks the non-local weights");
    }
    let n = base.n();
    let nl = &nonlocal.graph;
    let weights = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else if base.has_edge(i, j) {
            base.weight(i, j)
        } else {
            beta * nl.weight(i, j)
        }
    });
    let graph = Graph::new(weights, Measure::Counting)?;
    Ok(RegularizedGraph { graph, beta, origin: base.id(), alpha: nonlocal.alpha() })
}

/// `beta = min_{E} w / max_{not E} w_nl`: the scaling that lifts the largest
/// off-edge weight up to the smallest base weight.
pub fn beta_heuristic(base: &Graph, nonlocal: &NonlocalGraph) -> Result<f64> {
    if nonlocal.origin != base.id() {
        return Err(Error::OriginMismatch { expected: base.id().to_string(), found: nonlocal.origin.to_string() });
    }
    let n = base.n();
    let mut min_on = f64::INFINITY;
    let mut max_off = f64::NEG_INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            if base.has_edge(i, j) {
                min_on = min_on.min(base.weight(i, j));
            } else {
                max_off = max_off.max(nonlocal.graph.weight(i, j));
            }
        }
    }
    if max_off == f64::NEG_INFINITY {
        return Err(Error::BaseComplete);
    }
    if !(max_off > 0.0) {
        return Err(Error::ZeroOffEdgeWeight);
    }
    Ok(min_on / max_off)
}
