//! Lipschitz spaces over finite pointed metric spaces.
//!
//! For a finite pointed metric space `M`, `Lip0(M)` is the space of functions
//! vanishing at the base point, normed by their best Lipschitz constant, and
//! the Lipschitz-free space `F(M)` is its dual. This crate computes both norms,
//! materializes the De Leeuw embedding `f -> ((f(x) - f(y)) / d(x, y))` into
//! functions on the off-diagonal pair set, computes operator norms
//! `Lip0(M) -> Lip0(N)`, and synthesizes *liftings*: matrices `L` acting on
//! functions over pairs with `L * Phi_M = Phi_N * S` and
//! `||L|| = ||S||`.
//!
//! Everything is generic over [`Scalar`]: `f64` for speed, [`Rational`] for
//! exact equalities.

#![no_std]
#![warn(rust_2018_idioms)]

extern crate alloc;

pub mod error;
pub mod free_space;
pub mod lifting;
pub mod lipschitz;
pub mod lp;
pub mod matrix;
pub mod metric_space;
pub mod scalar;

pub use error::{Error, LpError, MetricError, Result};
pub use free_space::{FreeNorm, FreeVector, MoleculeDecomposition};
pub use lifting::{
    build_lifting, composition_lifting, continuity_modulus_check, lifting_norm, verify_commutation,
    Commutation, LiftingMatrix, LipOperator, NormCertificate,
};
pub use lipschitz::{
    apply_de_leeuw, composition_function_map, DeLeeuwMatrix, LipschitzFunction, PointMap, SpaceRef,
};
pub use lp::{max_linear, min_l1, solve_lp, LinearProgram, LpOptions, LpSolution, LpStatus, Sense};
pub use matrix::Matrix;
pub use metric_space::{PairSet, PointedMetricSpace};
pub use scalar::{Rational, Scalar};
