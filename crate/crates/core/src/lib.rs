//! Symbolic and numeric tools for the Riccati chain, projective vector
//! fields, Painlevé II and the KdV/PII hierarchies.

pub mod diffpoly;
pub mod riccati_chain;
pub mod numerics;
pub mod superposition;
pub mod projective;
pub mod painleve;
pub mod hierarchy;
