//! Non-Hermitian orthogonal polynomials on the cross `[-a,a] ∪ [-ib,ib]`.
//!
//! The crate has two independent halves. [`direct`] computes the monic
//! minimal-degree orthogonal polynomials, their remainders and Padé
//! approximants from moments in arbitrary precision. [`surface`], [`szego`]
//! and [`asym`] evaluate the genus-one strong-asymptotic formulas built from
//! the branch `w`, the conformal factor `Φ`, theta functions and the Szegő
//! function. [`harness`] compares the two.

pub mod asym;
pub mod classic;
pub mod cli;
pub mod direct;
pub mod error;
pub mod gamma;
pub mod geometry;
pub mod harness;
pub mod identities;
pub mod quad;
pub mod surface;
pub mod szego;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
