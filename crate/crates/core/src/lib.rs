//! Tractor calculus for projective differential geometry.
//!
//! A chart with a torsion-free affine connection goes in; out come the
//! projective invariants (rho, Weyl, Cotton-York), the rank-(n+1) tractor
//! connection, numerical estimates of its holonomy algebra and the geometric
//! structures (Einstein, contact, complex, Ricci-flat foliation) that a
//! reduction of that holonomy forces on the base.
//!
//! Modules, bottom-up:
//!
//! - [`expr`]: expression parsing, evaluation, symbolic and Taylor-mode
//!   differentiation of connection coefficients.
//! - [`affine`]: charts, curvature, Ricci, covariant derivatives, projective
//!   change, geodesics.
//! - [`projective`]: rho, Weyl and Cotton-York tensors.
//! - [`tractor`]: tractor connection, algebra bracket, splittings, curvature,
//!   parallel transport and loop holonomy.
//! - [`holonomy`]: holonomy algebra estimation and invariant fiber structures.
//! - [`structures`]: geometric verification of holonomy reductions.
//! - [`cli`]: manifests, commands and JSON reports.

pub mod affine;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod expr;
pub mod holonomy;
pub mod linalg;
pub mod ode;
pub mod projective;
pub mod structures;
pub mod tractor;

pub use error::{Error, Result};
