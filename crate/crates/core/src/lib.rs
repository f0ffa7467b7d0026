//! Exact solution of the one-dimensional anisotropic XY chain in a transverse
//! field, aimed at two-spin entanglement near the quantum critical point.
//!
//! The crate computes ground-state spin correlators for finite odd rings
//! (momentum sums over the ground parity sector) and for the infinite chain
//! (adaptive quadrature), assembles the symmetry-constrained two-site reduced
//! density matrix, and evaluates the Wootters concurrence together with the
//! finite-size-scaling machinery built on top of it (numerical derivatives,
//! minimum tracking, log/power-law fits, data collapse).
//!
//! A brute-force exact-diagonalization module ([`oracle`]) provides an
//! independent reference for every sign convention on small rings; the
//! free-fermion solver is validated against it entry by entry.
//!
//! The crate is `no_std` (with `alloc`); all transcendental math goes through
//! `libm` so results are bit-identical with or without the `std` feature.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod entangle;
pub mod fermion;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod scaling;
