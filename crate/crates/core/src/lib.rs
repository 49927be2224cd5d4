//! Hausdorff dimension of the boundary of the Lévy dragon.
//!
//! The pipeline has four layers:
//!
//! * [`lattice`]: exact right-isosceles triangulations and the ordered
//!   15-triangle star of a triangle.
//! * [`dragon`]: the dragon as iterated exterior replacement of triangles,
//!   geometric neighborhood types, and the brute-force type census.
//! * [`typedyn`]: the same census evolved symbolically through the child-type
//!   map, the stable type set and its classification.
//! * [`spectral`]: the transition matrix, its block structure, and certified
//!   bounds on the Perron root of the core block.
//!
//! The geometric layer is slow but independent of the symbolic one; the
//! [`verify`] module cross-checks them.

pub mod dragon;
pub mod error;
pub mod graph;
pub mod lattice;
pub mod spectral;
pub mod typedyn;
pub mod verify;

pub use dragon::{Limits, OccupancySet, TypeCode};
pub use error::{Error, Result};
pub use lattice::{Dyadic, DyadicPoint, LatticeTriangle, Star};
pub use spectral::{SpectralReport, TransitionMatrix};
pub use typedyn::{TypeCensus, TypeClassification};
