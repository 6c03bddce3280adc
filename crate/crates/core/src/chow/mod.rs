//! Equivariant Chow rings of the torus and Grassmannian quotients.

pub mod abelian;
pub mod nonabelian;
pub mod params;
pub mod weyl;

pub use abelian::{AbelianRing, ChamberSpec, ChowClass, FixedPointTable, HPoly, RingRef};
pub use nonabelian::{GrClass, NonabelianModule, Side};
pub use params::{Equiv, EquivRef, Layout, Params};
pub use weyl::{Perm, RootData};
