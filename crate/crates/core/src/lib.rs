//! Curvature of left-invariant Lorentzian metrics on almost abelian Lie
//! groups.
//!
//! An almost abelian Lie algebra of dimension `n` is fixed by a single
//! `(n-1)×(n-1)` matrix `A` (the action of `ad X_n` on the abelian ideal).
//! Together with one of the three inner-product classes in [`metric::MetricCase`]
//! this determines the Levi-Civita connection, the curvature operators and the
//! Ricci tensor, all of which live in [`curvature`].
//!
//! On top of that the crate provides
//! - the Ricci-flat non-flat classification and the finite isotropy groups
//!   ([`classify`]),
//! - the generalized Petrov family of Ricci-flat metrics ([`petrov`]),
//! - Arnold–Euler geodesic integration and the closed timelike curve witness
//!   ([`dynamics`]),
//! - an independent finite-difference Ricci oracle ([`oracle`]),
//! - the `aalg` command-line surface ([`cli`]).

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod classify;
pub mod cli;
pub mod curvature;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod metric;
pub mod oracle;
pub mod petrov;

pub use algebra::{AlmostAbelianAlgebra, Decomposition};
pub use error::{Error, Result};
pub use metric::{LorentzianStructure, MetricCase};
pub use petrov::PetrovSolution;

/// Zero threshold used by every predicate unless the caller overrides it.
pub const DEFAULT_TOL: f64 = 1e-10;
