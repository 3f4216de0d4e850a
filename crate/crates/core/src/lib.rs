//! Exact computations with (a,b)-modules: free modules of finite rank over
//! formal power series in `b`, with an operator `a` satisfying `ab - ba = b²`.

pub mod catalog;
pub mod error;
pub mod functors;
pub mod invariants;
pub mod lattice;
pub mod linalg;
pub mod module;
pub mod poly;
pub mod scalar;
pub mod series;
pub mod truncation;

pub use error::{AbError, Result};
pub use scalar::Scalar;
pub use series::{Series, Valuation};
