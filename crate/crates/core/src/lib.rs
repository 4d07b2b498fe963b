//! Convergence machinery and verification tools for cluster expansions of
//! classical continuum gases in the canonical ensemble.
//!
//! The crate is organised around one physical setup: `N` particles in a
//! periodic box interacting through a stable, tempered, finite-range pair
//! potential.  The grand objects of interest are
//!
//! * the variational functions `F(u)`, `G(u) = 1/F(u)` and `g(x)` that govern
//!   how large the normalisation constant `K` of the polymer measure may be
//!   while the expansion still converges ([`bounds`]),
//! * labelled connected / 2-connected graph enumeration and the
//!   alternating-sign tree-truncation weights built from them ([`graphs`]),
//! * irreducible Mayer coefficients `beta_m` estimated by Monte Carlo over
//!   2-connected graphs, with exact one-dimensional hard-rod references
//!   ([`mayer`]),
//! * small-`N` polymer/cluster identities verified by brute force against
//!   tensor-grid quadrature ([`cluster`]).
//!
//! Everything is deterministic: Monte Carlo draws come from a counter-based
//! generator ([`rng`]) and all parallel reductions merge in a fixed order, so
//! a given seed produces bit-identical results at any thread count.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod cluster;
pub mod graphs;
pub mod mayer;
pub mod potentials;
pub mod rng;

pub(crate) mod util;
