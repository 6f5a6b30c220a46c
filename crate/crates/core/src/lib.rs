//! Truth-preserving partial functions over finite bottom-lifted state spaces.
//!
//! The crate models programs over finite integer state spaces as explicit
//! tables, computes per-element truth-preservation orders by orbit analysis,
//! checks condition strengthening and weakening laws, denotes a small
//! while-language, and searches for order-preserving isomorphism arrows
//! between programs.

pub mod arrows;
pub mod calculus;
pub mod condition;
pub mod condlab;
pub mod error;
pub mod orbit;
pub mod pfn;
pub mod space;

pub use condition::Condition;
pub use error::{Error, Result};
pub use orbit::{ExtOrder, NfProfile, OrbitReport, StopReason};
pub use pfn::PartialFn;
pub use space::{Domain, Lifted, Space, StateId, StateSpace, Var};
