//! Block structure of the tractor holonomy when T[μ] is invariant.

use nalgebra::DMatrix;
use serde::Serialize;

use super::Check;
use crate::affine::ChartModel;
use crate::holonomy::{invariant_subspaces, Estimator, HolonomyAlgebra, RANK_TOL};
use crate::tractor::{AlgebraElement, JetConnection};
use crate::Result;

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    /// max |T*-row| over generators, relative to the largest generator.
    pub t_star_row: Check,
    pub tractor_rank: usize,
    pub gl_rank: usize,
    pub affine_rank: usize,
    /// max distance of a gl-block basis element from the affine holonomy span.
    pub gl_in_affine: Check,
    pub affine_in_gl: Check,
    /// max |T-column| over the tractor basis.
    pub t_column: f64,
    /// The T-column part vanishes (the cone alternative).
    pub cone_case: bool,
    pub irreducible: bool,
    pub note: Option<String>,
}

/// Compare the tractor holonomy at `p` with the affine holonomy of the chart's
/// connection, assuming the chart splitting has T[μ] invariant.
pub fn holonomy_decomposition_check(
    c: &ChartModel,
    p: &[f64],
    alg: &HolonomyAlgebra,
    tol_scale: f64,
) -> Result<DecompositionReport> {
    let n = c.dim();
    let scale = alg
        .generators
        .iter()
        .map(|g| g.amax())
        .fold(0.0, f64::max)
        .max(1e-300);
    let t_star = alg
        .generators
        .iter()
        .chain(&alg.basis)
        .map(|g| g.view((n, 0), (1, n)).amax() / g.amax().max(scale))
        .fold(0.0, f64::max);
    let t_star_row = Check::at_most(t_star, 1e-9 * tol_scale);

    let gl: Vec<DMatrix<f64>> = alg
        .basis
        .iter()
        .map(|b| AlgebraElement::from_matrix(b).psi)
        .collect();
    let gl_alg = HolonomyAlgebra::from_generators(n, gl, RANK_TOL, Estimator::Synthetic);
    let order = 2;
    let affine_gens: Vec<DMatrix<f64>> = JetConnection::affine(c, p, order + 1)?
        .curvature_derivatives(order)
        .into_iter()
        .flatten()
        .collect();
    let affine = HolonomyAlgebra::from_generators(n, affine_gens, RANK_TOL, Estimator::Infinitesimal);
    let inside = |a: &HolonomyAlgebra, b: &HolonomyAlgebra| {
        a.basis
            .iter()
            .map(|m| b.membership_residual(m))
            .fold(0.0, f64::max)
    };
    let gl_in_affine = Check::at_most(inside(&gl_alg, &affine), 1e-7 * tol_scale);
    let affine_in_gl = Check::at_most(inside(&affine, &gl_alg), 1e-7 * tol_scale);
    let t_column = alg
        .basis
        .iter()
        .map(|b| b.view((0, n), (n, 1)).amax())
        .fold(0.0, f64::max);
    let irreducible = !gl_alg.is_trivial() && (1..n).all(|k| invariant_subspaces(&gl_alg, k).is_empty());
    let note = if !t_star_row.pass {
        Some("T[μ] is not invariant in this splitting; the block comparison does not apply".into())
    } else if !irreducible {
        Some("gl-block acts reducibly; the two-case description of the algebra is not asserted".into())
    } else {
        None
    };
    Ok(DecompositionReport {
        t_star_row,
        tractor_rank: alg.rank(),
        gl_rank: gl_alg.rank(),
        affine_rank: affine.rank(),
        gl_in_affine,
        affine_in_gl,
        t_column,
        cone_case: t_column <= 1e-9,
        irreducible,
        note,
    })
}
