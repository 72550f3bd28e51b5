//! Lower bounds on the density of planar sets avoiding unit distances,
//! obtained from independent sets in grid graphs on flat tori.
//!
//! The pipeline: pick a [`FlatTorus`] that passes
//! [`FlatTorus::is_perfectly_periodic`], discretise it with a [`GridSpec`],
//! build the [`TorusGraph`], find an [`IndependentSet`] with
//! [`mis::solve`], and read off the density bound with
//! [`mis::certified_bound`].

pub mod cli;
pub mod croft;
pub mod error;
pub mod grid_graph;
pub mod mis;
pub mod render;
pub mod sweep;
pub mod torus;

pub use croft::{croft_density, croft_optimum, CroftParams};
pub use error::{Error, Result};
pub use grid_graph::{AdjacencyGraph, Graph, GridSpec, TorusGraph, VertexId};
pub use mis::{IndependentSet, SolverConfig};
pub use render::RenderStyle;
pub use sweep::{DatasetSpec, RefinementStep, SweepRecord};
pub use torus::{FlatTorus, TorusPoint};
