//! Unit-disk graphs, distributed coloring in a simulated LOCAL model, and
//! the numerics behind their degree and clique bounds.
//!
//! - [`geometry`]: points, disks, rectangles.
//! - [`udg`]: graph construction, exact clique numbers, degree inequalities.
//! - [`localsim`]: lock-step message-passing simulator.
//! - [`coloring`]: the coloring algorithms and validators.
//! - [`lpbounds`]: the two-vertex degree linear programs.
//! - [`fourier`]: Bessel numerics and the sinusoidal construction.

pub mod coloring;
pub mod fourier;
pub mod geometry;
pub mod instances;
pub mod io;
pub mod localsim;
pub mod lpbounds;
pub mod udg;

pub use geometry::Point;
pub use udg::{UnitDiskGraph, WeightedPoint, WeightedPointSet};
