//! Simulation and verification toolkit for the Aldous-Broder chain on regular
//! graphs, its ghost-index skeleton approximation, and the root growth with
//! re-grafting (RGRG) limit dynamics.
//!
//! The crate is organized around desk-scale exactness: dense kernels and
//! exhaustive enumeration below hard guards, seeded Monte Carlo with recorded
//! streams everywhere else.

pub mod abchain;
pub mod erasure;
pub mod estimators;
pub mod graph;
pub mod metric;
pub mod rgrg;
pub mod skeleton;
pub mod stats;
pub mod stream;
pub mod walk;

pub use abchain::{AbMoveKind, RootedTreeGraph};
pub use graph::{DenseKernel, GraphKind, RegularGraph};
pub use metric::{Correspondence, FiniteRootedMetricSpace};
pub use rgrg::{PointCloud, RgrgState};
pub use stream::StreamId;
pub use walk::{Interval, Path};
