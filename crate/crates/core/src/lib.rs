//! Non-local dynamics on weighted graphs: fractional and path Laplacians,
//! compatibility of supergraphs with a base walk, regularization, random
//! walks, and spectral analytics.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analytics;
pub mod compat;
pub mod dynamics;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod nonlocal;
pub mod regularize;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{degree, laplacian, normalized_laplacian, validate_graph, Graph, GraphId, LaplacianMatrix, Measure};
pub use metrics::DistanceTables;
pub use nonlocal::{fractional_graph, path_graph, KernelSpec, NonlocalGraph};
pub use regularize::{beta_heuristic, regularize, RegularizedGraph};
