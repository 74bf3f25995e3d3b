//! Sublattices of ℤ^d counted by cotype: q-combinatorics of the local zeta
//! factors, exact enumeration, corank densities, finite abelian p-groups,
//! and random cokernel statistics.

pub mod arith;
pub mod error;
pub mod euler;
pub mod finite;
pub mod groups;
pub mod lattice;
pub mod poly;
pub mod qcomb;
pub mod serde_util;
pub mod sim;
pub mod verify;
pub mod zeta;

pub use error::{Error, Result};
