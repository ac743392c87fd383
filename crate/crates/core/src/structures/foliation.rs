//! Foliations from a parallel subbundle K̃ of the tractor bundle.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::{base_algebra, orthonormal, Check, FiberStructure, Options, Spread, DEGENERATE_BUDGET};
use crate::affine::ChartModel;
use crate::linalg::row_major;
use crate::projective::weyl_from;
use crate::tractor::coordinate_matrices;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CovolumeStatus {
    /// max |ω(X)|/|X| over X ∈ K, where ∇'τ = ω ⊗ τ for τ built from the transported frame.
    pub omega_on_k: f64,
    /// max |tr(W(X, Y)|_K)| over X, Y ∈ K; zero iff the leaves carry a parallel co-volume.
    pub leaf_trace: Check,
    /// max |tr(A|K̃)| over the holonomy basis at the base point.
    pub tractor_trace: f64,
    /// The tractor connection preserves a co-volume form on K̃.
    pub preserved: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FoliationReport {
    pub accepted: bool,
    pub inconclusive: bool,
    pub k: usize,
    pub base: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    /// Per point, an n×k row-major orthonormal basis of K.
    pub k_basis: Vec<Vec<f64>>,
    pub degenerate_fraction: f64,
    pub invariance: Check,
    pub path_residual: Check,
    /// max |Υ| of the splitting change that puts K̃ inside T[μ].
    pub adapting_change: f64,
    pub integrability_residual: Check,
    pub geodesy_residual: Check,
    pub preserves_k: Check,
    pub rho_residual: Check,
    pub ricci_on_k: Check,
    pub covolume: CovolumeStatus,
}

struct PointData {
    q: DMatrix<f64>,
    ups: f64,
    integrability: f64,
    geodesy: f64,
    preserve: f64,
    rho: f64,
    ricci: f64,
    omega_k: f64,
    leaf_trace: f64,
}

fn at_point(c: &ChartModel, p: &[f64], f: &DMatrix<f64>) -> Result<Option<PointData>> {
    let n = c.dim();
    let k = f.ncols();
    let y = f.rows(0, n).into_owned();
    let a = f.rows(n, 1).into_owned();
    let sv = y.singular_values();
    // within 1e-4 of meeting the line, the adapting Υ is too ill-conditioned to judge
    if sv.min() <= 1e-4 * f.norm() {
        return Ok(None);
    }
    let ms = coordinate_matrices(&c.local_first(p)?);
    let gram_inv = (y.transpose() * &y)
        .try_inverse()
        .ok_or_else(|| Error::Domain("K frame is singular".into()))?;
    let ypinv = &gram_inv * y.transpose();
    let ups = &a * &ypinv;

    // splitting change Υ with Υ(Y_j) = a_j, and its derivatives along the parallel frame
    let gauge = |u: &DMatrix<f64>, sign: f64| {
        let mut g = DMatrix::identity(n + 1, n + 1);
        for i in 0..n {
            g[(n, i)] = sign * u[(0, i)];
        }
        g
    };
    let g = gauge(&ups, -1.0);
    let ginv = gauge(&ups, 1.0);
    let mut dy = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    let mut rho = DMatrix::zeros(n, n);
    let mut worst_soldering = 0.0f64;
    for (idx, m) in ms.iter().enumerate() {
        let df = -(m * f);
        let dy_a = df.rows(0, n).into_owned();
        let da_a = df.rows(n, 1).into_owned();
        let dypinv = -&gram_inv * (dy_a.transpose() * &y + y.transpose() * &dy_a) * &ypinv
            + &gram_inv * dy_a.transpose();
        let dups = &da_a * &ypinv + &a * dypinv;
        let mut dg = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            dg[(n, i)] = -dups[(0, i)];
        }
        let mp = &g * m * &ginv - dg * &ginv;
        let w = mp[(n, n)];
        let mut gam = mp.view((0, 0), (n, n)).into_owned();
        for i in 0..n {
            gam[(i, i)] -= w;
            rho[(idx, i)] = mp[(n, i)];
            let e = if i == idx { 1.0 } else { 0.0 };
            worst_soldering = worst_soldering.max((mp[(i, n)] - e).abs());
        }
        dy.push(dy_a);
        gamma.push(gam);
    }
    debug_assert!(worst_soldering < 1e-8);

    let q = orthonormal(&y);
    let comp = DMatrix::<f64>::identity(n, n) - &q * q.transpose();
    let norms: Vec<f64> = (0..k).map(|j| y.column(j).norm()).collect();
    let mut integrability = 0.0f64;
    let mut geodesy = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let mut nab = nalgebra::DVector::zeros(n);
            let mut br = nalgebra::DVector::zeros(n);
            for aa in 0..n {
                nab += (dy[aa].column(j) + &gamma[aa] * y.column(j)) * y[(aa, i)];
                br += dy[aa].column(j) * y[(aa, i)] - dy[aa].column(i) * y[(aa, j)];
            }
            let s = norms[i] * norms[j];
            geodesy = geodesy.max((&comp * nab).amax() / s);
            integrability = integrability.max((&comp * br).amax() / s);
        }
    }
    let mut preserve = 0.0f64;
    let mut cs = Vec::with_capacity(n);
    for aa in 0..n {
        let nab = &dy[aa] + &gamma[aa] * &y;
        for j in 0..k {
            preserve = preserve.max((&comp * nab.column(j)).amax() / norms[j]);
        }
        cs.push(&ypinv * nab);
    }
    let mut rho_res = 0.0f64;
    for j in 0..k {
        rho_res = rho_res.max((&rho * y.column(j)).amax() / norms[j]);
    }
    let nf = n as f64;
    let sym = (&rho + rho.transpose()) * 0.5;
    let anti = (&rho - rho.transpose()) * 0.5;
    let ric = sym * (-(nf - 1.0)) - anti * (nf + 1.0);
    let mut ricci = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let v = (y.column(i).transpose() * &ric * y.column(j))[(0, 0)];
            ricci = ricci.max(v.abs() / (norms[i] * norms[j]));
        }
    }
    let omega: Vec<f64> = cs.iter().map(|c| c.trace()).collect();
    let omega_row = DMatrix::from_row_slice(1, n, &omega);
    let mut omega_k = 0.0f64;
    for j in 0..k {
        omega_k = omega_k.max((&omega_row * y.column(j))[(0, 0)].abs() / norms[j]);
    }
    // obstruction to a leafwise parallel co-volume: tr(W(X_i, X_j)|_K)
    let l = c.local_first(p)?;
    let w = weyl_from(n, &l.riemann(), &l.rho());
    let mut leaf_trace = 0.0f64;
    for i in 0..k {
        for j in (i + 1)..k {
            let mut e = DMatrix::zeros(n, n);
            for h in 0..n {
                for b in 0..n {
                    let coef = y[(h, i)] * y[(b, j)];
                    if coef == 0.0 {
                        continue;
                    }
                    for kk in 0..n {
                        for ll in 0..n {
                            e[(kk, ll)] += coef * w[((h * n + b) * n + kk) * n + ll];
                        }
                    }
                }
            }
            let t = (&ypinv * e * &y).trace();
            leaf_trace = leaf_trace.max(t.abs() / (norms[i] * norms[j]));
        }
    }
    // Γ' carries Υ linearly and P' quadratically; judge residuals at that scale
    let s1 = 1.0 + ups.amax();
    let s2 = s1 * s1;
    Ok(Some(PointData {
        q,
        ups: ups.amax(),
        integrability,
        geodesy: geodesy / s1,
        preserve: preserve / s1,
        rho: rho_res / s2,
        ricci: ricci / s2,
        omega_k,
        leaf_trace,
    }))
}

/// Check the foliation K = π¹(K̃) for a parallel subbundle with basis `k_base`
/// (columns, chart splitting) at the domain center.
pub fn foliation_analysis(c: &ChartModel, k_base: &DMatrix<f64>, opts: &Options) -> Result<FoliationReport> {
    let n = c.dim();
    let k = k_base.ncols();
    if k_base.nrows() != n + 1 || k == 0 || k > n {
        return Err(Error::Dimension(format!(
            "K̃ must be given by 1..={n} columns of length {}",
            n + 1
        )));
    }
    let kq = orthonormal(k_base);
    if kq.ncols() != k {
        return Err(Error::Precondition("K̃ basis columns are dependent".into()));
    }
    let base = c.domain().center();
    let s = FiberStructure::Subspace(kq.clone());
    let alg = base_algebra(c, &base)?;
    let invariance = opts.at_most(s.invariance_residual(&alg), 1e-7);
    if !invariance.pass {
        return Err(Error::Precondition(format!(
            "K̃ is not holonomy invariant (residual {:.3e})",
            invariance.value
        )));
    }
    let spread = Spread::new(c, &base, opts.sampling.points(c), opts.sampling.seed, opts.transport)?;
    let path_residual = opts.at_most(spread.path_residual(&s), 1e-6);
    let frames: Vec<DMatrix<f64>> = spread.frames.iter().map(|u| u * &kq).collect();
    let data = spread
        .points
        .par_iter()
        .zip(frames.par_iter())
        .map(|(p, f)| at_point(c, p, f))
        .collect::<Result<Vec<_>>>()?;
    let degenerate = data.iter().filter(|d| d.is_none()).count();
    let degenerate_fraction = degenerate as f64 / data.len().max(1) as f64;
    let inconclusive = degenerate_fraction > DEGENERATE_BUDGET;
    let good: Vec<&PointData> = data.iter().flatten().collect();
    let worst = |f: fn(&PointData) -> f64| good.iter().map(|d| f(d)).fold(0.0, f64::max);

    let tractor_trace = alg
        .basis
        .iter()
        .map(|b| (kq.transpose() * b * &kq).trace().abs())
        .fold(0.0, f64::max);
    let covolume = CovolumeStatus {
        omega_on_k: worst(|d| d.omega_k),
        leaf_trace: opts.at_most(worst(|d| d.leaf_trace), 1e-7),
        tractor_trace,
        preserved: tractor_trace <= 1e-8,
    };
    let integrability_residual = opts.at_most(worst(|d| d.integrability), 1e-6);
    let geodesy_residual = opts.at_most(worst(|d| d.geodesy), 1e-6);
    let preserves_k = opts.at_most(worst(|d| d.preserve), 1e-7);
    let rho_residual = opts.at_most(worst(|d| d.rho), 1e-7);
    let ricci_on_k = opts.at_most(worst(|d| d.ricci), 1e-7);
    let accepted = !inconclusive
        && [
            path_residual,
            integrability_residual,
            geodesy_residual,
            preserves_k,
            rho_residual,
            ricci_on_k,
            covolume.leaf_trace,
        ]
        .iter()
        .all(|c| c.pass);
    Ok(FoliationReport {
        accepted,
        inconclusive,
        k,
        base,
        k_basis: data
            .iter()
            .map(|d| d.as_ref().map(|d| row_major(&d.q)).unwrap_or_default())
            .collect(),
        points: spread.points,
        degenerate_fraction,
        invariance,
        path_residual,
        adapting_change: worst(|d| d.ups),
        integrability_residual,
        geodesy_residual,
        preserves_k,
        rho_residual,
        ricci_on_k,
        covolume,
    })
}
