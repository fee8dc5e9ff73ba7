//! Trace maps of two-letter substitution rules.
//!
//! A substitution rule on the free group of two generators induces a
//! polynomial self-map of ℂ³ on half-traces of unimodular matrix pairs.
//! This crate derives those maps exactly over ℤ[x,y,z], studies the Fricke
//! character and further invariants of the generalized Fibonacci family,
//! and applies the machinery to gap labeling of tight-binding spectra,
//! aperiodic Ising chains, and kicked two-level systems.

pub mod fibfamily;
pub mod gaplabel;
pub mod ising;
pub mod kicked;
pub mod mat2;
pub mod poly;
pub mod spectra;
pub mod tracemap;
pub mod word;

pub use poly::{chebyshev_u, divide_by_monic_in_z, IntPoly3, Var};
pub use tracemap::{classify, compose_maps, derive, fricke, transformation_polynomial, TraceMap};
pub use word::{Gen, Substitution, Word};
