//! Dimension-independent Helly bounds for k-flat transversals: bounds,
//! the projection-reduction pipeline, counterexample constructions and
//! brute-force oracles.

pub mod bodies;
pub mod cli;
pub mod constructions;
pub mod distance;
pub mod error;
pub mod geom;
pub mod helly;
pub mod kflat;
pub mod oracle;
mod qp;

pub use bodies::{AnyFamily, ConvexBody, Family, GeneratedFamily};
pub use distance::SolverConfig;
pub use error::{Error, Result};
pub use geom::{AffineFlat, Direction, Vector};
