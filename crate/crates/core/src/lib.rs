//! p-adic Gauss sums, Gamma values, L-function derivatives and Stickelberger
//! elements, computed exactly at finite precision and cross-checked against
//! independent oracles.

pub mod arith;
pub mod config;
pub mod cyclotomic;
pub mod dirichlet;
pub mod eisenstein;
pub mod error;
pub mod gamma;
pub mod gauss;
pub mod group_ring;
pub mod lattice;
pub mod local;
pub mod padic;
pub mod qq;
pub mod quadratic;
pub mod verify;

pub use error::{Error, Result};
pub use padic::PadicNumber;
