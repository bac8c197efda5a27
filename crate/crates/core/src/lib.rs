//! Exact algebra for linear two-point boundary problems whose operator has a
//! regular singular point at the left endpoint.
//!
//! The modules build on each other in order: [`series`] provides the function
//! field, [`fuchsian`] the local analysis of the operator, [`opring`] the
//! integro-differential operators and their normal forms, [`boundary`] the
//! boundary conditions, [`spaces`] the projectors and the Green's operator,
//! and [`pipeline`] the end-to-end problem handling.

pub mod arith;
pub mod boundary;
pub mod closed;
mod error;
pub mod expr;
pub mod fuchsian;
pub mod linalg;
pub mod opring;
pub mod pipeline;
pub mod poly;
pub mod quad;
pub mod ratfunc;
pub mod series;
pub mod spaces;

pub use arith::{falling_factorial, Q};
pub use closed::ClosedForm;
pub use error::{Error, Result};
pub use poly::Poly;
pub use ratfunc::RationalFunction;
pub use series::{GenLaurentElement, GenLaurentPoly, GenLaurentSeries, Radius, TailBound};
pub use boundary::{BoundaryFunctional, BoundarySpace, Outcome};
pub use fuchsian::{FuchsianOperator, FundamentalSystem, Solution};
pub use opring::{Functional, GreensFunction, IntDiffOperator, Mode};
pub use pipeline::{Condition, KirchhoffConfig, Prepared, ProblemSpec, StepError};
pub use spaces::{ExceptionalSpace, GeneralizedProblem, ProjectorP, ProjectorQ};
