//! Calculus of λ-pairings between divergence-measure fields and scalar
//! functions: an exact one-dimensional engine for measures and pairings, an
//! N-dimensional catalog of fields with perimeter and Gauss–Green checkers,
//! a coarea-formula verifier, and a discrete degenerate-TV minimizer.

pub mod error;
pub mod extreal;
pub mod poly;
pub mod quad;
pub mod piece;
pub mod func1d;
pub mod measure1d;
pub mod lambda;
pub mod bv1d;
pub mod boxset;
pub mod fields_nd;
pub mod pairing_nd;
pub mod coarea;
pub mod tvmin;
pub mod descriptor;

pub use error::{Error, Result};
pub use extreal::ExtReal;
pub use func1d::{Interval1D, PiecewiseFunction1D};
pub use lambda::LambdaSelector;
pub use measure1d::{BorelSet1D, DensitySegment, Measure1D};
