//! Exact construction, verification and exploration of cusped hyperbolic
//! 4-manifolds glued from the ideal right-angled 24-cell.
//!
//! Every computation is carried out in exact integer or rational
//! arithmetic. The crate is organised bottom-up:
//!
//! * [`exact`]: rationals, 5×5 Lorentz matrices, integer matrices, Smith
//!   normal form and integer lattice solving.
//! * [`polytope`]: the ideal 24-cell, its face lattice, vertex-link cubes
//!   and its symmetry group.
//! * [`pairing`]: side pairings, the `pairing-v1` file format, pairing
//!   isometries and the Poincaré polytope checks.
//! * [`group`]: fundamental group presentations and homomorphisms to Z.
//! * [`cellular`]: oriented polyhedral cell complexes and their quotients.
//! * [`cusps`]: vertex cycles, cusp cube complexes and flat 3-manifold types.
//! * [`homology`]: integral homology of truncated quotients.
//! * [`covers`]: abelian covers, cusp census, signature and geography.
//! * [`search`]: backtracking search over side pairings.

pub mod cellular;
pub mod covers;
pub mod cusps;
mod error;
pub mod exact;
pub mod group;
pub mod homology;
pub mod pairing;
pub mod polytope;
pub mod search;

pub use error::{Error, Result};

/// Encoding of the bundled side pairing: a cusped manifold with two 3-torus
/// cusps and one quarter-twist cusp.
pub const BUNDLED_PAIRING: &str = include_str!("../../../data/m_paper.pairing");
