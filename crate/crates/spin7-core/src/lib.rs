//! Bryant-Salamon Spin(7) geometry on the negative spinor bundle of S^4.
//!
//! The crate realizes the 1-parameter family of torsion-free Spin(7)
//! structures Phi_c in two explicit coordinate charts, provides the
//! Karigiannis--Min-Oo Cayley 4-plane test, and integrates and classifies
//! the two nontrivial SU(2)-invariant Cayley fibrations together with
//! their conserved quantities, multi-moment maps and asymptotic cones.
//!
//! Everything is pure and immutable after construction; parameter sweeps
//! can fan out across threads freely.

pub mod cayley;
pub mod error;
pub mod fibration;
pub mod form;
pub mod geometry;
pub mod linalg;
pub mod numeric;
pub mod ode;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
pub use form::{
    flat, hodge_star, interior_product, numeric_exterior_derivative, sharp, IndexSet, KForm,
    MetricAtPoint, TangentVector, DIM,
};
pub use geometry::{
    build_so3_pack, build_sp1_pack, multi_moment_fibre, self_duality_residual, verify_torsion_free,
    ChartKind, ChartPointSO3, ChartPointSp1, So3Basis, StructurePack,
};
