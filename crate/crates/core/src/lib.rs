//! Exact-arithmetic models of wreath-product symplectic reflection algebras.
//!
//! The crate builds finite subgroups of SL2 with their representation theory,
//! the associated extended Dynkin quiver data and parameter vectors, a PBW
//! normal form for the symplectic reflection algebra of the wreath product,
//! Dunkl-operator realizations, a pointwise radial-part solver on the slice
//! of the quiver representation space, reflection functors for deformed
//! preprojective algebras, and a CLI that re-derives the identities tying all
//! of these together over cyclotomic number fields.

pub mod exact;
pub mod gamma;
pub mod mckay;
pub mod slice;
pub mod sra;
pub mod qmod;
pub mod dunkl;
pub mod radial;
pub mod report;
