//! Modulus-consensus dynamics over gain graphs.
//!
//! A *gain graph* is a directed graph whose arcs carry m-th roots of unity,
//! represented exactly as integer exponents modulo a group order `m`. The
//! crate decides structural m-balance, builds the mn-dimensional lifted
//! system of a gain graph, classifies its strongly connected components,
//! inspects time-varying graph sequences, and simulates the associated
//! complex-valued averaging dynamics. The `m = 2` case is the classic
//! signed-graph (Altafini) model.
//!
//! Balance decisions are exact: gains stay integer exponents end to end and
//! matrix weights are rationals; floating point appears only in [`dynamics`].
//!
//! The crate is `no_std` (with `alloc`); file formats, CSV export and the
//! command-line front end live in the companion `gainflock-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod balance;
pub mod dynamics;
pub mod generate;
pub mod graph;
pub mod group;
pub mod lift;
pub mod sequence;

mod scc;

pub use num_complex::Complex64;
pub use num_rational::Rational64;
