//! Contact data from a parallel symplectic form on the tractor bundle.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::{base_algebra, Check, FiberStructure, Options, Spread};
use crate::affine::ChartModel;
use crate::linalg::{max_abs, null_space, pinv, row_major, RankTol};
use crate::projective::weyl_from;
use crate::tractor::coordinate_matrices;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct ContactReport {
    pub accepted: bool,
    pub base: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    /// Per point, an n×(n−1) row-major basis of H = ker θ.
    pub h_basis: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
    pub reeb: Vec<Vec<f64>>,
    pub v_theta: Vec<f64>,
    pub invariance: Check,
    pub path_residual: Check,
    pub theta_on_h: Check,
    pub theta_of_reeb: Check,
    pub dtheta_vs_omega: Check,
    pub dtheta_reeb: Check,
    pub vtheta_min: f64,
    pub vtheta_max: f64,
    /// min |v_θ| / max |v_θ|, required positive.
    pub vtheta_ratio: Check,
    pub weyl_in_h: Check,
}

struct PointData {
    h: DMatrix<f64>,
    theta: DVector<f64>,
    reeb: DVector<f64>,
    v: f64,
    theta_h: f64,
    theta_r: f64,
    dtheta_omega: f64,
    dtheta_r: f64,
    weyl: f64,
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

fn at_point(c: &ChartModel, p: &[f64], omega: &DMatrix<f64>) -> Result<PointData> {
    let n = c.dim();
    let l = c.local_first(p)?;
    let ms = coordinate_matrices(&l);
    let theta = DVector::from_fn(n, |k, _| omega[(n, k)]);
    // ∂_a θ_k from the parallel condition ∂_a ω = M_aᵀ ω + ω M_a
    let mut d = DMatrix::zeros(n, n);
    for (a, m) in ms.iter().enumerate() {
        let dw = m.transpose() * omega + omega * m;
        for k in 0..n {
            d[(a, k)] = dw[(n, k)];
        }
    }
    let dtheta = (&d - d.transpose()) * 0.5;
    let w_tt = omega.view((0, 0), (n, n)).into_owned();

    let h = null_space(&DMatrix::from_row_slice(1, n, theta.as_slice()), RankTol::new(1e-9, 1e-14));
    let theta_h = (theta.transpose() * &h).amax();
    let dtheta_omega = max_abs(&(h.transpose() * (&dtheta - &w_tt) * &h)) / (1.0 + max_abs(&w_tt));

    let mut a = DMatrix::zeros(n + 1, n);
    a.view_mut((0, 0), (n, n)).copy_from(&dtheta);
    a.view_mut((n, 0), (1, n)).copy_from(&theta.transpose());
    let mut rhs = DVector::zeros(n + 1);
    rhs[n] = 1.0;
    let reeb = pinv(&a, RankTol::new(1e-12, 1e-14)) * rhs;
    let dtheta_r = (dtheta.transpose() * &reeb).amax();
    let theta_r = (theta.dot(&reeb) - 1.0).abs();

    let mut b = DMatrix::zeros(n + 1, n + 1);
    b.view_mut((0, 0), (n, n)).copy_from(&dtheta);
    for k in 0..n {
        b[(k, n)] = theta[k];
        b[(n, k)] = -theta[k];
    }
    let v = factorial((n - 1) / 2) * b.determinant().abs().sqrt();

    let w = weyl_from(n, &l.riemann(), &l.rho());
    let mut weyl = 0.0f64;
    for hh in 0..n {
        for j in 0..n {
            for ll in 0..n {
                let s: f64 = (0..n).map(|k| theta[k] * w[((hh * n + j) * n + k) * n + ll]).sum();
                weyl = weyl.max(s.abs());
            }
        }
    }
    let weyl = weyl / theta.amax().max(1e-300);
    Ok(PointData {
        h,
        theta,
        reeb,
        v,
        theta_h,
        theta_r,
        dtheta_omega,
        dtheta_r,
        weyl,
    })
}

/// Contact distribution, contact form and Reeb field induced by a parallel fiber
/// symplectic form `omega_base` given at the domain center in the chart's splitting.
/// Work happens in the volume-normalized connection of the projective class.
pub fn contact_from_symplectic(
    c: &ChartModel,
    omega_base: &DMatrix<f64>,
    opts: &Options,
) -> Result<ContactReport> {
    let n = c.dim();
    if n.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "contact structures need odd dimension, chart has n = {n}"
        )));
    }
    if omega_base.nrows() != n + 1 || omega_base.ncols() != n + 1 {
        return Err(Error::Dimension(format!("omega must be {0}×{0}", n + 1)));
    }
    let scale = max_abs(omega_base);
    let sv = omega_base.singular_values();
    if scale == 0.0
        || max_abs(&(omega_base + omega_base.transpose())) > 1e-12 * scale
        || sv.min() <= 1e-8 * sv.max()
    {
        return Err(Error::Precondition("omega is not a nondegenerate alternating form".into()));
    }
    let base = c.domain().center();
    let (cn, ups) = c.normalize_volume();
    let s = FiberStructure::Symplectic(omega_base.clone()).change_splitting(&ups.eval(&base)?);
    let alg = base_algebra(&cn, &base)?;
    let invariance = opts.at_most(s.invariance_residual(&alg), 1e-8);
    if !invariance.pass {
        return Err(Error::Precondition(format!(
            "omega is not holonomy invariant (residual {:.3e})",
            invariance.value
        )));
    }
    let spread = Spread::new(&cn, &base, opts.sampling.points(c), opts.sampling.seed, opts.transport)?;
    let path_residual = opts.at_most(spread.path_residual(&s), 1e-6);
    let omegas = spread.structures(&s);
    let data = spread
        .points
        .par_iter()
        .zip(omegas.par_iter())
        .map(|(p, w)| at_point(&cn, p, w.matrix()))
        .collect::<Result<Vec<_>>>()?;

    let worst = |f: fn(&PointData) -> f64| data.iter().map(f).fold(0.0, f64::max);
    let vtheta_min = data.iter().map(|d| d.v).fold(f64::INFINITY, f64::min);
    let vtheta_max = worst(|d| d.v);
    let theta_on_h = opts.at_most(worst(|d| d.theta_h), 1e-9);
    let theta_of_reeb = opts.at_most(worst(|d| d.theta_r), 1e-9);
    let dtheta_vs_omega = opts.at_most(worst(|d| d.dtheta_omega), 1e-6);
    let dtheta_reeb = opts.at_most(worst(|d| d.dtheta_r), 1e-6);
    let vtheta_ratio = Check::above(if vtheta_max > 0.0 { vtheta_min / vtheta_max } else { 0.0 }, 0.0);
    let weyl_in_h = opts.at_most(worst(|d| d.weyl), 1e-7);
    let accepted = [
        path_residual,
        theta_on_h,
        theta_of_reeb,
        dtheta_vs_omega,
        dtheta_reeb,
        vtheta_ratio,
        weyl_in_h,
    ]
    .iter()
    .all(|c| c.pass);
    Ok(ContactReport {
        accepted,
        base,
        h_basis: data.iter().map(|d| row_major(&d.h)).collect(),
        theta: data.iter().map(|d| d.theta.as_slice().to_vec()).collect(),
        reeb: data.iter().map(|d| d.reeb.as_slice().to_vec()).collect(),
        v_theta: data.iter().map(|d| d.v).collect(),
        points: spread.points,
        invariance,
        path_residual,
        theta_on_h,
        theta_of_reeb,
        dtheta_vs_omega,
        dtheta_reeb,
        vtheta_min,
        vtheta_max,
        vtheta_ratio,
        weyl_in_h,
    })
}
