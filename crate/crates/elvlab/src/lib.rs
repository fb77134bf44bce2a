//! A numerical laboratory for an elliptic Z/nZ-symmetric vertex model, its
//! face-model counterpart and the free-boson operator calculus that links
//! them.
//!
//! The crate evaluates every object in the correspondence — theta functions
//! and elliptic brackets, vertex and face Boltzmann weights, intertwining
//! vectors, tail operators, and normal-ordered boson operator products — and
//! verifies the closed-form identities relating them at machine precision.
//!
//! See the guide chapters under `book/` (rendered with mdbook and compiled
//! as doc-tests by the companion `elvlab-guide` crate) for a walk-through.

pub mod elliptic;
pub mod fock;
pub mod lattice;
pub mod tail;
pub mod vertex_face;
pub mod weights;
pub mod error;
pub mod params;

pub use error::{Error, Result};
pub use params::{Level, ModelParams, SpectralPoint, C};
