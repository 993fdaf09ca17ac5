//! Cluster pictures and odd conductor exponents for the Frey hyperelliptic family
//! y² = (−z)^((r−1)/2)·x·h(2 − x²/z) + s, over Q and over Q(ζ_r + ζ_r⁻¹).

pub mod arith;
pub mod error;
pub mod oracle;
pub mod poly;

pub use error::{Error, Result};
pub mod classify;
pub mod cluster;
pub mod conductor;
pub mod signatures;
pub mod verify;
