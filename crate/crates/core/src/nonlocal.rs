//! Non-local supergraphs of a base graph: the fractional graph `G^alpha`
//! (negated off-diagonal of `Delta^alpha`) and the path graph `G_alpha`
//! (a kernel `h_alpha` applied to pairwise distances).

use std::fmt;

use log::warn;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{laplacian, Graph, GraphId, LaplacianMatrix, Measure, Transform};
use crate::metrics::DistanceTables;
use crate::spectral::{fractional_power, spectral_radius, sym_eig};

/// Off-diagonal entries of `-Delta^alpha` below `-FRACTIONAL_NEG_TOL` are
/// reported as solver failures; smaller negatives are clamped to zero.
pub const FRACTIONAL_NEG_TOL: f64 = 1e-10;

/// Piecewise-linear kernel `h(t)` through sorted sample points, constant
/// beyond the first and last sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedKernel {
    points: Vec<(f64, f64)>,
}

impl TabulatedKernel {
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidKernel("tabulated kernel needs at least one point".into()));
        }
        if points.iter().any(|&(t, h)| !t.is_finite() || !h.is_finite() || h <= 0.0) {
            return Err(Error::InvalidKernel("tabulated values must be finite and positive".into()));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidKernel("duplicate abscissa in tabulated kernel".into()));
        }
        Ok(Self { points })
    }

    /// The constant kernel `h = c`.
    pub fn constant(c: f64) -> Result<Self> {
        Self::new(vec![(0.0, c)])
    }

    pub fn eval(&self, t: f64) -> f64 {
        let pts = &self.points;
        let k = pts.partition_point(|&(x, _)| x <= t);
        if k == 0 {
            return pts[0].1;
        }
        if k == pts.len() {
            return pts[k - 1].1;
        }
        let (x0, y0) = pts[k - 1];
        let (x1, y1) = pts[k];
        y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelFamily {
    /// `h(t) = t^{-alpha}`
    Mellin,
    /// `h(t) = exp(-alpha t)`
    Laplace,
    Custom(TabulatedKernel),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistanceKind {
    Combinatorial,
    WeightedShortestPath,
    /// Caller-supplied distances; checked only for symmetry, zero diagonal
    /// and positive off-diagonal.
    Custom(DMatrix<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub alpha: f64,
    pub distance: DistanceKind,
}

impl KernelSpec {
    pub fn mellin(alpha: f64, distance: DistanceKind) -> Self {
        Self { family: KernelFamily::Mellin, alpha, distance }
    }

    pub fn laplace(alpha: f64, distance: DistanceKind) -> Self {
        Self { family: KernelFamily::Laplace, alpha, distance }
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            KernelFamily::Mellin | KernelFamily::Laplace => {
                if !(self.alpha.is_finite() && self.alpha > 0.0) {
                    return Err(Error::InvalidKernel(format!(
                        "{} kernel needs alpha > 0, got {}",
                        self.name(),
                        self.alpha
                    )));
                }
            }
            KernelFamily::Custom(_) => {
                if !(self.alpha.is_finite() && self.alpha >= 0.0) {
                    return Err(Error::InvalidKernel(format!("alpha must be >= 0, got {}", self.alpha)));
                }
            }
        }
        Ok(())
    }

    /// `h_alpha(t)`.
    pub fn h(&self, t: f64) -> f64 {
        match &self.family {
            KernelFamily::Mellin => t.powf(-self.alpha),
            KernelFamily::Laplace => (-self.alpha * t).exp(),
            KernelFamily::Custom(table) => table.eval(t),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            KernelFamily::Mellin => "mellin",
            KernelFamily::Laplace => "laplace",
            KernelFamily::Custom(_) => "custom",
        }
    }

    /// The distance matrix this kernel is evaluated on.
    pub fn distance_matrix(&self, distances: &DistanceTables) -> Result<DMatrix<f64>> {
        let n = distances.n();
        match &self.distance {
            DistanceKind::Combinatorial => Ok(distances.combinatorial.map(|h| h as f64)),
            DistanceKind::WeightedShortestPath => Ok(distances.weighted.clone()),
            DistanceKind::Custom(d) => {
                if d.shape() != (n, n) {
                    return Err(Error::SizeMismatch { base: n, sup: d.nrows() });
                }
                for i in 0..n {
                    if d[(i, i)] != 0.0 {
                        return Err(Error::InvalidKernel(format!("custom distance d({i},{i}) != 0")));
                    }
                    for j in (i + 1)..n {
                        if d[(i, j)] != d[(j, i)] {
                            return Err(Error::NotSymmetric { i, j });
                        }
                    }
                }
                Ok(d.clone())
            }
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dist = match self.distance {
            DistanceKind::Combinatorial => "comb",
            DistanceKind::WeightedShortestPath => "sp",
            DistanceKind::Custom(_) => "custom",
        };
        write!(f, "{}(alpha={}, distance={})", self.name(), self.alpha, dist)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Construction {
    Fractional { alpha: f64 },
    Path(KernelSpec),
}

/// A complete supergraph on the node set of its base graph.
#[derive(Debug, Clone)]
pub struct NonlocalGraph {
    pub graph: Graph,
    pub origin: GraphId,
    pub construction: Construction,
    /// Number of tiny negative fractional weights clamped to zero.
    pub clamped: usize,
}

impl NonlocalGraph {
    pub fn alpha(&self) -> f64 {
        match &self.construction {
            Construction::Fractional { alpha } => *alpha,
            Construction::Path(k) => k.alpha,
        }
    }

    pub fn transform(&self) -> Transform {
        match &self.construction {
            Construction::Fractional { alpha } => Transform::Fractional { alpha: *alpha },
            Construction::Path(k) => Transform::Path { kernel: k.name().to_string(), alpha: k.alpha },
        }
    }

    /// Laplacian of the supergraph, tagged with its provenance.
    pub fn laplacian(&self) -> LaplacianMatrix {
        laplacian(&self.graph).with_transform(self.origin, self.transform())
    }
}

/// Builds `G^alpha` with `w^alpha(i,j) = -(Delta^alpha)_{ij}` for `alpha` in `(0, 1]`.
pub fn fractional_graph(graph: &Graph, alpha: f64) -> Result<NonlocalGraph> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let n = graph.n();
    let construction = Construction::Fractional { alpha };
    if alpha == 1.0 {
        let g = Graph::new(graph.weights().clone(), Measure::Counting)?;
        return Ok(NonlocalGraph { graph: g, origin: graph.id(), construction, clamped: 0 });
    }
    let decomp = sym_eig(&laplacian(graph).entries)?;
    let power = fractional_power(&decomp, alpha)?;
    let tol = FRACTIONAL_NEG_TOL * spectral_radius(&decomp).powf(alpha).max(1.0);
    let mut weights = DMatrix::zeros(n, n);
    let mut clamped = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let w = -power[(i, j)];
            let w = if w > 0.0 {
                w
            } else if w >= -tol {
                clamped += 1;
                0.0
            } else {
                return Err(Error::NonPositiveFractionalWeight { i, j, weight: w });
            };
            weights[(i, j)] = w;
            weights[(j, i)] = w;
        }
    }
    if clamped > 0 {
        warn!("fractional graph (alpha={alpha}): clamped {clamped} non-positive weights to zero");
    }
    let g = Graph::new(weights, Measure::Counting)?;
    Ok(NonlocalGraph { graph: g, origin: graph.id(), construction, clamped })
}

/// Builds `G_alpha` with `w_alpha(i,j) = h_alpha(d(i,j))` for every pair.
pub fn path_graph(graph: &Graph, kernel: &KernelSpec, distances: &DistanceTables) -> Result<NonlocalGraph> {
    kernel.validate()?;
    let n = graph.n();
    if distances.n() != n {
        return Err(Error::SizeMismatch { base: n, sup: distances.n() });
    }
    let d = kernel.distance_matrix(distances)?;
    let mut weights = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            if !(d[(i, j)] > 0.0) {
                return Err(Error::ZeroDistance { i, j });
            }
            let w = kernel.h(d[(i, j)]);
            weights[(i, j)] = w;
            weights[(j, i)] = w;
        }
    }
    let g = Graph::new(weights, Measure::Counting)?;
    Ok(NonlocalGraph { graph: g, origin: graph.id(), construction: Construction::Path(kernel.clone()), clamped: 0 })
}

/// The per-distance operators `Delta_{alpha,n}` for `n = 1..=diameter`,
/// each built only from pairs at hop distance exactly `n`. Their sum is the
/// Laplacian of [`path_graph`].
pub fn path_laplacian_layers(kernel: &KernelSpec, distances: &DistanceTables) -> Result<Vec<DMatrix<f64>>> {
    kernel.validate()?;
    let n = distances.n();
    let d = kernel.distance_matrix(distances)?;
    let mut layers = vec![DMatrix::zeros(n, n); distances.diameter as usize];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let hop = distances.hops(i, j) as usize;
            if !(d[(i, j)] > 0.0) {
                return Err(Error::ZeroDistance { i, j });
            }
            let kappa = kernel.h(d[(i, j)]);
            let layer = &mut layers[hop - 1];
            layer[(i, j)] -= kappa;
            layer[(i, i)] += kappa;
        }
    }
    Ok(layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cycle(weights: &[f64]) -> Graph {
        let n = weights.len();
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, weights[i])).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn half_cycle_fractional_weight() {
        let g = fractional_graph(&cycle(&[0.5; 4]), 0.5).unwrap();
        let expected = 2f64.sqrt() / 4.0;
        assert!((g.graph.weight(0, 1) - expected).abs() < 1e-12);
        assert!((g.graph.weight(0, 1) - 0.353553).abs() < 1e-6);
        assert!(g.graph.is_complete());
        assert_eq!(g.origin, cycle(&[0.5; 4]).id());
    }

    #[test]
    fn unit_alpha_is_identity() {
        let base = cycle(&[1.0, 2.0, 0.5, 3.0, 1.5]);
        let g = fractional_graph(&base, 1.0).unwrap();
        assert_eq!(g.graph.weights(), base.weights());
    }

    #[test]
    fn path_cosine_closed_form() {
        let alpha = 0.5;
        let g = fractional_graph(&path(4), alpha).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                let entry: f64 = (1..=3)
                    .map(|k| {
                        let k = k as f64;
                        (4.0 * (PI * k / 8.0).sin().powi(2)).powf(alpha)
                            * (PI * k * (2 * i + 1) as f64 / 8.0).cos()
                            * (PI * k * (2 * j + 1) as f64 / 8.0).cos()
                    })
                    .sum::<f64>()
                    / 2.0;
                assert!((g.graph.weight(i, j) + entry).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn rejects_alpha_out_of_range() {
        assert!(matches!(fractional_graph(&path(3), 0.0), Err(Error::InvalidAlpha(_))));
        assert!(matches!(fractional_graph(&path(3), 1.5), Err(Error::InvalidAlpha(_))));
    }

    #[test]
    fn three_node_path_mellin() {
        let base = path(3);
        let t = DistanceTables::new(&base);
        let g = path_graph(&base, &KernelSpec::mellin(1.0, DistanceKind::Combinatorial), &t).unwrap();
        assert_eq!(g.graph.weight(0, 2), 0.5);
        assert_eq!(g.graph.weight(0, 1), 1.0);
        assert_eq!(g.graph.weight(1, 2), 1.0);
    }

    #[test]
    fn constant_custom_kernel_gives_complete_unweighted() {
        let base = cycle(&[1.0, 0.2, 3.0, 0.7, 1.1]);
        let t = DistanceTables::new(&base);
        let kernel = KernelSpec {
            family: KernelFamily::Custom(TabulatedKernel::constant(1.0).unwrap()),
            alpha: 0.0,
            distance: DistanceKind::WeightedShortestPath,
        };
        let g = path_graph(&base, &kernel, &t).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(g.graph.weight(i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
    }

    #[test]
    fn mellin_shortest_path_ratio() {
        let base = cycle(&[1.0, 0.1, 0.1, 0.1]);
        let t = DistanceTables::new(&base);
        for alpha in [1.0, 2.0, 3.0] {
            let g = path_graph(&base, &KernelSpec::mellin(alpha, DistanceKind::WeightedShortestPath), &t).unwrap();
            let ratio = g.graph.weight(0, 1) / g.graph.weight(0, 3);
            assert!((ratio - 3f64.powf(-alpha)).abs() < 1e-12);
        }
    }

    #[test]
    fn layers_sum_to_path_laplacian() {
        let base =
            Graph::from_edges(6, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 5, 1.0), (1, 4, 1.0)])
                .unwrap();
        let t = DistanceTables::new(&base);
        for kernel in [
            KernelSpec::mellin(1.5, DistanceKind::Combinatorial),
            KernelSpec::laplace(0.7, DistanceKind::Combinatorial),
        ] {
            let g = path_graph(&base, &kernel, &t).unwrap();
            let layers = path_laplacian_layers(&kernel, &t).unwrap();
            assert_eq!(layers.len(), t.diameter as usize);
            let sum = layers.iter().fold(DMatrix::zeros(6, 6), |acc, l| acc + l);
            assert!((sum - g.laplacian().entries).amax() < 1e-14);
            // neighbour weights are all h(1)
            for (i, j) in base.edges() {
                assert_eq!(g.graph.weight(i, j), kernel.h(1.0));
            }
        }
    }

    #[test]
    fn tabulated_interpolation() {
        let k = TabulatedKernel::new(vec![(2.0, 1.0), (0.0, 3.0)]).unwrap();
        assert_eq!(k.eval(-1.0), 3.0);
        assert_eq!(k.eval(1.0), 2.0);
        assert_eq!(k.eval(5.0), 1.0);
        assert!(TabulatedKernel::new(vec![(0.0, 0.0)]).is_err());
    }

    #[test]
    fn custom_distance_validated() {
        let base = path(3);
        let t = DistanceTables::new(&base);
        let mut d = DMatrix::from_element(3, 3, 2.0);
        d.fill_diagonal(0.0);
        d[(0, 1)] = 0.0;
        d[(1, 0)] = 0.0;
        let k = KernelSpec::laplace(1.0, DistanceKind::Custom(d));
        assert!(matches!(path_graph(&base, &k, &t), Err(Error::ZeroDistance { i: 0, j: 1 })));
    }
}
