//! The transverse field R and the complex structure on its annihilator,
//! from a parallel complex structure on the tractor bundle.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::{base_algebra, Check, FiberStructure, Options, Spread, DEGENERATE_BUDGET};
use crate::affine::ChartModel;
use crate::linalg::{max_abs, null_space, row_major, RankTol};
use crate::ode::rk4;
use crate::tractor::coordinate_matrices;
use crate::{Error, Result};

/// Flow time step for the Lie-derivative difference quotient.
pub const LIE_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct ComplexReport {
    pub accepted: bool,
    pub inconclusive: bool,
    pub base: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub r_field: Vec<Vec<f64>>,
    /// Per point, an n×(n−1) row-major basis of H ⊂ T* (covectors killing R).
    pub h_basis: Vec<Vec<f64>>,
    /// Per point, J_H in that basis, row-major (n−1)×(n−1).
    pub j_h: Vec<Vec<f64>>,
    pub degenerate_points: Vec<usize>,
    pub invariance: Check,
    pub path_residual: Check,
    pub preserves_h: Check,
    pub square_residual: Check,
    pub lie_invariance_residual: Check,
    /// Nijenhuis tensor of the induced structure on T/R, paired with H.
    pub nijenhuis_residual: Check,
}

/// ∂_a J = J M_a − M_a J for a parallel endomorphism.
fn dj(j: &DMatrix<f64>, ms: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
    ms.iter().map(|m| j * m - m * j).collect()
}

/// Flow of R carrying J and the Jacobian of the flow, over time `t`.
fn flow(c: &ChartModel, x: &[f64], j: &DMatrix<f64>, t: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = c.dim();
    let nn = n + 1;
    let mut y0 = x.to_vec();
    y0.extend_from_slice(j.as_slice());
    y0.extend_from_slice(DMatrix::<f64>::identity(n, n).as_slice());
    let rhs = |_: f64, y: &[f64]| -> Result<Vec<f64>> {
        let x = &y[..n];
        let j = DMatrix::from_column_slice(nn, nn, &y[n..n + nn * nn]);
        let phi = DMatrix::from_column_slice(n, n, &y[n + nn * nn..]);
        let ms = coordinate_matrices(&c.local_first(x)?);
        let r: Vec<f64> = (0..n).map(|k| j[(k, n)]).collect();
        let djs = dj(&j, &ms);
        let mut jdot = DMatrix::zeros(nn, nn);
        let mut dr = DMatrix::zeros(n, n);
        for (a, d) in djs.iter().enumerate() {
            jdot += d * r[a];
            for k in 0..n {
                dr[(k, a)] = d[(k, n)];
            }
        }
        let mut out = r;
        out.extend_from_slice(jdot.as_slice());
        out.extend_from_slice((dr * phi).as_slice());
        Ok(out)
    };
    let y = rk4(&rhs, 0.0, t, &y0, 4)?;
    let jt = DMatrix::from_column_slice(nn, nn, &y[n..n + nn * nn]);
    let phi = DMatrix::from_column_slice(n, n, &y[n + nn * nn..]);
    Ok((jt, phi))
}

struct PointData {
    r: DVector<f64>,
    h: DMatrix<f64>,
    j_h: DMatrix<f64>,
    preserve: f64,
    square: f64,
    lie: f64,
    nijenhuis: f64,
}

fn at_point(c: &ChartModel, p: &[f64], j: &DMatrix<f64>) -> Result<Option<PointData>> {
    let n = c.dim();
    let r = DVector::from_fn(n, |k, _| j[(k, n)]);
    if r.amax() <= 1e-9 * max_abs(j) {
        return Ok(None);
    }
    let h = null_space(&DMatrix::from_row_slice(1, n, r.as_slice()), RankTol::new(1e-9, 1e-14));
    let jt = j.view((0, 0), (n, n)).into_owned();
    let img = jt.transpose() * &h;
    let j_h = h.transpose() * &img;
    let preserve = max_abs(&(&img - &h * &j_h));
    let square = max_abs(&(&j_h * &j_h + DMatrix::identity(n - 1, n - 1)));

    // pull back J_H along the flow of R and difference
    let pulled = |t: f64| -> Result<DMatrix<f64>> {
        let (jt_t, phi) = flow(c, p, j, t)?;
        let phi_inv = phi
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Domain("flow Jacobian is singular".into()))?;
        let jhat = jt_t.view((0, 0), (n, n)).into_owned();
        // rows: (ξ Φ⁻¹) Ĵ(t) Φ for each basis covector ξ
        Ok(h.transpose() * phi_inv * jhat * phi)
    };
    let lie = max_abs(&((pulled(LIE_STEP)? - pulled(-LIE_STEP)?) / (2.0 * LIE_STEP)));

    let ms = coordinate_matrices(&c.local_first(p)?);
    let dhat: Vec<DMatrix<f64>> = dj(j, &ms)
        .iter()
        .map(|d| d.view((0, 0), (n, n)).into_owned())
        .collect();
    let mut nijenhuis = 0.0f64;
    for i in 0..n {
        for k in 0..n {
            if i == k {
                continue;
            }
            let mut v = DVector::zeros(n);
            for a in 0..n {
                v += dhat[a].column(k) * jt[(a, i)] - dhat[a].column(i) * jt[(a, k)];
            }
            v += &jt * dhat[k].column(i) - &jt * dhat[i].column(k);
            nijenhuis = nijenhuis.max((h.transpose() * v).amax());
        }
    }
    Ok(Some(PointData {
        r,
        h,
        j_h,
        preserve,
        square,
        lie,
        nijenhuis,
    }))
}

/// R = s⁻¹π¹J(s), the annihilator H of R and J_H, from a parallel fiber
/// complex structure `j_base` given at the domain center.
pub fn complex_reduction(c: &ChartModel, j_base: &DMatrix<f64>, opts: &Options) -> Result<ComplexReport> {
    let n = c.dim();
    let nn = n + 1;
    if n.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "a tractor complex structure needs odd n, chart has n = {n}"
        )));
    }
    if j_base.nrows() != nn || j_base.ncols() != nn {
        return Err(Error::Dimension(format!("J must be {nn}×{nn}")));
    }
    let sq = max_abs(&(j_base * j_base + DMatrix::identity(nn, nn)));
    if sq > 1e-9 {
        return Err(Error::Precondition(format!("J² + I is {sq:.3e}, not zero")));
    }
    let base = c.domain().center();
    let s = FiberStructure::Complex(j_base.clone());
    let alg = base_algebra(c, &base)?;
    let invariance = opts.at_most(s.invariance_residual(&alg), 1e-8);
    if !invariance.pass {
        return Err(Error::Precondition(format!(
            "J is not holonomy invariant (residual {:.3e})",
            invariance.value
        )));
    }
    let spread = Spread::new(c, &base, opts.sampling.points(c), opts.sampling.seed, opts.transport)?;
    let path_residual = opts.at_most(spread.path_residual(&s), 1e-6);
    let js = spread.structures(&s);
    let data = spread
        .points
        .par_iter()
        .zip(js.par_iter())
        .map(|(p, j)| at_point(c, p, j.matrix()))
        .collect::<Result<Vec<_>>>()?;
    let degenerate_points: Vec<usize> = data
        .iter()
        .enumerate()
        .filter(|(_, d)| d.is_none())
        .map(|(i, _)| i)
        .collect();
    let good: Vec<&PointData> = data.iter().flatten().collect();
    let worst = |f: fn(&PointData) -> f64| good.iter().map(|d| f(d)).fold(0.0, f64::max);
    let inconclusive = degenerate_points.len() as f64 > DEGENERATE_BUDGET * data.len() as f64;
    let preserves_h = opts.at_most(worst(|d| d.preserve), 1e-9);
    let square_residual = opts.at_most(worst(|d| d.square), 1e-7);
    let lie_invariance_residual = opts.at_most(worst(|d| d.lie), 1e-4);
    let nijenhuis_residual = opts.at_most(worst(|d| d.nijenhuis), 1e-6);
    let accepted = !inconclusive
        && [
            path_residual,
            preserves_h,
            square_residual,
            lie_invariance_residual,
            nijenhuis_residual,
        ]
        .iter()
        .all(|c| c.pass);
    let pick = |f: fn(&PointData) -> Vec<f64>| -> Vec<Vec<f64>> {
        data.iter().map(|d| d.as_ref().map(f).unwrap_or_default()).collect()
    };
    Ok(ComplexReport {
        accepted,
        inconclusive,
        base,
        r_field: pick(|d| d.r.as_slice().to_vec()),
        h_basis: pick(|d| row_major(&d.h)),
        j_h: pick(|d| row_major(&d.j_h)),
        points: spread.points,
        degenerate_points,
        invariance,
        path_residual,
        preserves_h,
        square_residual,
        lie_invariance_residual,
        nijenhuis_residual,
    })
}
