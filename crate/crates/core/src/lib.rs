//! Wall-crossing machinery for the Grassmannian flop: exact I-functions on both sides,
//! abelianization through the Weyl anti-invariants, numeric analytic continuation of the
//! hypergeometric factors, and a small Lagrangian-cone lab for the point.

pub mod error;
pub mod chow;
pub mod cone;
pub mod exact;
pub mod hyper;
pub mod ifactory;
pub mod pipeline;

pub use error::{FlopError, Result};
