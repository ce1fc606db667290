pub mod analysis;
pub mod cli;
pub mod cones;
pub mod conjugate;
pub mod error;
pub mod faces;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod point;
pub mod rng;
pub mod value;

pub use cones::Cone;
pub use conjugate::{AffineMinorant, ConjugateReport, GridFn};
pub use error::{Error, Result};
pub use grid::{build_grid, Grid};
pub use point::{inner, Point};
pub use rng::RngSeed;
pub use value::ExtReal;
