//! Numerical core for integral inequalities that mix a regular memory term
//! with a weakly singular Abel kernel, and for the stochastic dynamics they
//! control.
//!
//! The crate provides:
//!
//! - [`specialfn`]: gamma, binomial and Mittag-Leffler evaluation, the
//!   special functions every bound formula is built from.
//! - [`singquad`]: product-integration quadrature for Abel kernels
//!   `(t - s)^(alpha - 1)` and a time-marching solver for second-kind
//!   Volterra equations with mixed regular/singular memory. The solver is
//!   the extremal witness against which every bound is checked.
//! - [`gronwall`]: evaluators for the classical exponential bound, the
//!   Mittag-Leffler bound, and the mixed double-series bound with a
//!   certified truncation remainder.
//! - [`sdesim`]: seeded Monte Carlo simulation of the scalar SDE
//!   `dx = b dt + sigma1 dt^alpha + sigma2 dB` through its integral form,
//!   plus fixed-point (successive substitution) solves of the same
//!   equation on a frozen noise stream.
//! - [`fpk`]: a one-dimensional forward density solver for the associated
//!   Fokker-Planck equation with an additional Abel-kernel channel.
//! - [`verify`]: a batch harness binding the Volterra oracle to the bound
//!   evaluators over parameter lattices, emitting machine-readable
//!   verdicts.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the command
//! line front end live in the companion `fracsde-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod fpk;
pub mod grid;
pub mod gronwall;
pub mod sdesim;
pub mod singquad;
pub mod specialfn;
pub mod verify;

pub use grid::{AlphaOrder, GridError, SampledFn, TimeGrid};
