//! Learning real distributions from samples with piecewise polynomials.

pub mod bench;
pub mod check;
pub mod error;
pub mod estimator;
pub mod fit;
pub mod interval;
pub mod measure;
pub mod model;
pub mod partition;
pub mod poly;
pub mod quad;
pub mod select;
pub mod split;

pub use error::{Error, Result};
pub use interval::{Interval, Partition};
pub use measure::{EmpiricalMeasure, SampleSet};
pub use poly::{l1_pp, PiecewisePolynomial, Polynomial};
