//! The tractor bundle in the chart trivialization.
//!
//! Fiber vectors are `(Y, a)` with `Y` in the tangent part and `a` in the line
//! part; matrices act on column vectors `[Y; a]` of length `n + 1`. The
//! connection is `∇⃗ = d + M` with, in direction `X`,
//!
//! ```text
//! M(X) = [ Γ_X + w_X I   X   ]      w_X = −tr(Γ_X) / (n + 1)
//!        [ P(X, ·)       w_X ]
//! ```
//!
//! so that `tr M(X) = 0` and transport solves `v' = −M(ẋ) v`.

mod algebra;
mod jets;

pub use algebra::AlgebraElement;
pub use jets::JetConnection;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::affine::{contract_direction, ChartModel, Local, Path, Piece};
use crate::ode::{rk4_refined, Refinement};
use crate::projective::Invariants;
use crate::{Error, Result};

/// Element of the tractor fiber in a named splitting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TractorVec {
    pub top: Vec<f64>,
    pub bottom: f64,
    pub splitting: String,
}

impl TractorVec {
    pub fn new(top: Vec<f64>, bottom: f64, splitting: &str) -> TractorVec {
        TractorVec {
            top,
            bottom,
            splitting: splitting.to_string(),
        }
    }

    pub fn to_vector(&self) -> DVector<f64> {
        let mut v: Vec<f64> = self.top.clone();
        v.push(self.bottom);
        DVector::from_vec(v)
    }

    pub fn from_vector(v: &DVector<f64>, splitting: &str) -> TractorVec {
        let n = v.len() - 1;
        TractorVec::new(v.rows(0, n).iter().copied().collect(), v[n], splitting)
    }
}

/// Connection matrix in direction `x` from pointwise Γ and P.
pub fn connection_matrix_from(n: usize, gamma: &[f64], rho: &[f64], x: &[f64]) -> DMatrix<f64> {
    let gx = contract_direction(n, gamma, x);
    let tr: f64 = (0..n).map(|k| gx[k * n + k]).sum();
    let w = -tr / (n as f64 + 1.0);
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for k in 0..n {
        for j in 0..n {
            m[(k, j)] = gx[k * n + j];
        }
        m[(k, k)] += w;
        m[(k, n)] = x[k];
        m[(n, k)] = (0..n).map(|a| x[a] * rho[a * n + k]).sum();
    }
    m[(n, n)] = w;
    m
}

/// Coordinate connection matrices `M_a = M(∂_a)`.
pub fn coordinate_matrices(l: &Local) -> Vec<DMatrix<f64>> {
    let n = l.n;
    let rho = l.rho();
    (0..n)
        .map(|a| {
            let mut e = vec![0.0; n];
            e[a] = 1.0;
            connection_matrix_from(n, &l.gamma, &rho, &e)
        })
        .collect()
}

pub fn connection_matrix(c: &ChartModel, p: &[f64], x: &[f64]) -> Result<DMatrix<f64>> {
    let l = c.local_first(p)?;
    Ok(connection_matrix_from(c.dim(), &l.gamma, &l.rho(), x))
}

/// Matrix of the dual connection, acting on `(v, b)` rows written as columns.
pub fn dual_connection_matrix(c: &ChartModel, p: &[f64], x: &[f64]) -> Result<DMatrix<f64>> {
    Ok(-connection_matrix(c, p, x)?.transpose())
}

/// Gauge matrix taking the splitting of Γ to that of Γ + Υ: `(Y, a) ↦ (Y, a − Υ(Y))`.
pub fn splitting_gauge(ups: &[f64]) -> DMatrix<f64> {
    let n = ups.len();
    let mut g = DMatrix::identity(n + 1, n + 1);
    for (j, u) in ups.iter().enumerate() {
        g[(n, j)] = -u;
    }
    g
}

/// Re-express a tractor in the splitting of `project_change(Γ, Υ)`, with `ups` = Υ at the point.
pub fn change_splitting(v: &TractorVec, ups: &[f64], new_splitting: &str) -> TractorVec {
    let uy: f64 = ups.iter().zip(&v.top).map(|(u, y)| u * y).sum();
    TractorVec::new(v.top.clone(), v.bottom - uy, new_splitting)
}

/// Tractor curvature Ω_{hj} assembled from W and CY: `[[W_{hj}, 0], [CY_{hj·}, 0]]`.
pub fn assembled_curvature(inv: &Invariants, h: usize, j: usize) -> DMatrix<f64> {
    let n = inv.point.len();
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for k in 0..n {
        for l in 0..n {
            m[(k, l)] = inv.weyl[((h * n + j) * n + k) * n + l];
        }
    }
    for l in 0..n {
        m[(n, l)] = inv.cotton_york[(h * n + j) * n + l];
    }
    m
}

/// Settings for frame transport.
#[derive(Debug, Clone, Copy)]
pub struct TransportConfig {
    pub refinement: Refinement,
}

impl Default for TransportConfig {
    fn default() -> Self {
        TransportConfig {
            refinement: Refinement::with_tol(1e-10),
        }
    }
}

/// Result of transporting the identity frame.
#[derive(Debug, Clone)]
pub struct Transport {
    pub matrix: DMatrix<f64>,
    pub max_steps: usize,
    pub converged: bool,
}

fn frame_rhs<'a>(
    c: &'a ChartModel,
    piece: &'a Piece,
    dual: bool,
) -> impl Fn(f64, &[f64]) -> Result<Vec<f64>> + 'a {
    let n = c.dim();
    let nn = n + 1;
    move |t: f64, y: &[f64]| {
        let x = piece.position(t)?;
        if !c.domain().contains(&x) {
            return Err(Error::LeftDomain { t });
        }
        let v = piece.velocity(t)?;
        let l = c.local_first(&x)?;
        let mut m = connection_matrix_from(n, &l.gamma, &l.rho(), &v);
        if dual {
            m = -m.transpose();
        }
        let u = DMatrix::from_column_slice(nn, nn, y);
        let du = -(m * u);
        Ok(du.as_slice().to_vec())
    }
}

/// Transport of the identity frame along `path`; columns are transported basis vectors.
pub fn transport_frame(c: &ChartModel, path: &Path, cfg: TransportConfig) -> Result<Transport> {
    transport_frame_impl(c, path, cfg, false)
}

/// Frame transport for the dual connection.
pub fn transport_dual_frame(c: &ChartModel, path: &Path, cfg: TransportConfig) -> Result<Transport> {
    transport_frame_impl(c, path, cfg, true)
}

fn transport_frame_impl(
    c: &ChartModel,
    path: &Path,
    cfg: TransportConfig,
    dual: bool,
) -> Result<Transport> {
    let nn = c.dim() + 1;
    let mut total = DMatrix::identity(nn, nn);
    let mut max_steps = 0;
    let mut converged = true;
    for piece in &path.pieces {
        let (t0, t1) = piece.range();
        let f = frame_rhs(c, piece, dual);
        let id = DMatrix::<f64>::identity(nn, nn);
        let r = rk4_refined(&f, t0, t1, id.as_slice(), cfg.refinement)?;
        max_steps = max_steps.max(r.steps);
        converged &= r.converged;
        total = DMatrix::from_column_slice(nn, nn, &r.state) * total;
    }
    Ok(Transport {
        matrix: total,
        max_steps,
        converged,
    })
}

pub fn parallel_transport(
    c: &ChartModel,
    path: &Path,
    v0: &TractorVec,
    cfg: TransportConfig,
) -> Result<TractorVec> {
    if v0.top.len() != c.dim() {
        return Err(Error::Dimension("tractor has wrong length".into()));
    }
    let t = transport_frame(c, path, cfg)?;
    Ok(TractorVec::from_vector(&(t.matrix * v0.to_vector()), &v0.splitting))
}

/// Holonomy of a closed path (endpoint gap ≤ 1e−12).
pub fn loop_holonomy(c: &ChartModel, path: &Path, cfg: TransportConfig) -> Result<Transport> {
    path.require_closed(1e-12)?;
    transport_frame(c, path, cfg)
}

#[cfg(test)]
mod tests;
