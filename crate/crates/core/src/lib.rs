//! Exact computer algebra for the constrained KP hierarchy: jet ring,
//! pseudo-differential operators, Lax flows, the two Poisson brackets,
//! central invariants and the associated Frobenius manifold.

pub mod numkit;
pub mod jetring;
pub mod pdo;
pub mod hierarchy;
pub mod brackets;
pub mod centralinv;
pub mod par;
pub mod frobenius;
