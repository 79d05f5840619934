//! Numerical laboratory for Hardy-inequality constants of the Dirichlet
//! Laplacian on intervals and planar polygonal domains, with the companion
//! experiments: Barta-type certificates, boundary-decay bounds, heat-trace
//! estimates and eigenvalue convergence under domain shrinking.

pub mod config;
pub mod converge;
pub mod decay;
pub mod discretize;
pub mod error;
pub mod eigensolve;
pub mod fit;
pub mod geometry;
pub mod hardy;
pub mod linalg;
pub mod report;
pub mod runner;
pub mod trace;

pub use error::{Error, Result};
