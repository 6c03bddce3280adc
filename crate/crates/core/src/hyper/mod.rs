//! Numeric continuation of the hypergeometric factors and connection matrices.

pub mod cmat;
pub mod connection;
pub mod jfun;
pub mod real;
pub mod report;

pub use real::{precision, with_precision, Cx, Mp, Real};
pub use report::{ode_oracle, parse_complex, run_continuation, ContinuationReport, NumericConfig, OracleReport, ZReport};
