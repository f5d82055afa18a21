//! Sparse estimation of heavy-tailed vector autoregressions.
//!
//! Simulation of VAR / VAR-X processes driven by Subweibull innovations,
//! dependence diagnostics, structured penalties and proximal solvers, and
//! the experiment drivers behind the `swvar` binary.

pub mod dependence;
pub mod error;
pub mod experiments;
pub mod io;
pub mod linalg;
pub mod model;
pub mod penalties;
pub mod pipeline;
pub mod simulate;
pub mod solvers;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use model::{RegressionData, Trajectory, VarModel, VarxModel};
