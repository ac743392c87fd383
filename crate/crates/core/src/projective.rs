//! Projective invariants: rho, Weyl and Cotton-York tensors.
//!
//! Layouts follow [`crate::affine::curvature`]; Cotton-York is stored as
//! `cy[(h*n + j)*n + l]` = CY_{hjl} = ∇_h P_{jl} − ∇_j P_{hl}.

use serde::Serialize;

use crate::affine::{curvature, nabla_two_form, ChartModel, Local, OneFormField, Slot, TensorValue};
use crate::{Error, Result};

fn require_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Dimension("rho needs n ≥ 2 (n² − 1 = 0)".into()));
    }
    Ok(())
}

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// P_{hl}δ^k_j + P_{hj}δ^k_l − P_{jl}δ^k_h − P_{jh}δ^k_l.
pub fn rho_terms(n: usize, p: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(n.pow(4));
    for h in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    out.push(
                        p[h * n + l] * delta(k, j) + p[h * n + j] * delta(k, l)
                            - p[j * n + l] * delta(k, h)
                            - p[j * n + h] * delta(k, l),
                    );
                }
            }
        }
    }
    out
}

pub fn weyl_from(n: usize, riemann: &[f64], p: &[f64]) -> Vec<f64> {
    riemann
        .iter()
        .zip(rho_terms(n, p))
        .map(|(r, t)| r - t)
        .collect()
}

/// Max-abs of the three single contractions of W (k with h, j, l).
pub fn weyl_traces(n: usize, w: &[f64]) -> [f64; 3] {
    let at = |h: usize, j: usize, k: usize, l: usize| w[((h * n + j) * n + k) * n + l];
    let mut out = [0.0f64; 3];
    for a in 0..n {
        for b in 0..n {
            let th: f64 = (0..n).map(|k| at(k, a, k, b)).sum();
            let tj: f64 = (0..n).map(|k| at(a, k, k, b)).sum();
            let tl: f64 = (0..n).map(|k| at(a, b, k, k)).sum();
            out[0] = out[0].max(th.abs());
            out[1] = out[1].max(tj.abs());
            out[2] = out[2].max(tl.abs());
        }
    }
    out
}

/// All projective invariants at one point.
#[derive(Debug, Clone, Serialize)]
pub struct Invariants {
    pub point: Vec<f64>,
    pub riemann: Vec<f64>,
    pub ricci: Vec<f64>,
    pub rho: Vec<f64>,
    pub weyl: Vec<f64>,
    pub cotton_york: Vec<f64>,
}

impl Invariants {
    pub fn at(c: &ChartModel, p: &[f64]) -> Result<Invariants> {
        require_dim(c.dim())?;
        Self::from_local(&c.local(p)?)
    }

    pub fn from_local(l: &Local) -> Result<Invariants> {
        let n = l.n;
        require_dim(n)?;
        let riemann = l.riemann();
        let ricci = curvature::ricci(n, &riemann);
        let rho = curvature::rho(n, &ricci);
        let weyl = weyl_from(n, &riemann, &rho);
        let cotton_york = cotton_york_from(l, &rho);
        Ok(Invariants {
            point: l.point.clone(),
            riemann,
            ricci,
            rho,
            weyl,
            cotton_york,
        })
    }
}

/// ∂_a P_{hj} at `[(a*n + h)*n + j]`.
pub fn d_rho(l: &Local) -> Vec<f64> {
    let n = l.n;
    let dric = l.d_ricci();
    let nf = n as f64;
    let c = -1.0 / (nf * nf - 1.0);
    let mut out = vec![0.0; n * n * n];
    for a in 0..n {
        for h in 0..n {
            for j in 0..n {
                out[(a * n + h) * n + j] =
                    c * (nf * dric[(a * n + h) * n + j] + dric[(a * n + j) * n + h]);
            }
        }
    }
    out
}

fn cotton_york_from(l: &Local, p: &[f64]) -> Vec<f64> {
    let n = l.n;
    let nabla = nabla_two_form(n, &l.gamma, p, &d_rho(l));
    let mut out = vec![0.0; n * n * n];
    for h in 0..n {
        for j in (h + 1)..n {
            for k in 0..n {
                let v = nabla[(h * n + j) * n + k] - nabla[(j * n + h) * n + k];
                out[(h * n + j) * n + k] = v;
                out[(j * n + h) * n + k] = -v;
            }
        }
    }
    out
}

pub fn rho(c: &ChartModel, p: &[f64]) -> Result<TensorValue> {
    let inv = Invariants::at(c, p)?;
    Ok(TensorValue::new(p, vec![Slot::Down, Slot::Down], inv.rho))
}

pub fn weyl(c: &ChartModel, p: &[f64]) -> Result<TensorValue> {
    let inv = Invariants::at(c, p)?;
    Ok(TensorValue::new(
        p,
        vec![Slot::Down, Slot::Down, Slot::Up, Slot::Down],
        inv.weyl,
    ))
}

pub fn cotton_york(c: &ChartModel, p: &[f64]) -> Result<TensorValue> {
    let inv = Invariants::at(c, p)?;
    Ok(TensorValue::new(
        p,
        vec![Slot::Down, Slot::Down, Slot::Down],
        inv.cotton_york,
    ))
}

/// Υ-invariance of W over a point set.
#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    /// max over points of ‖W(Γ') − W(Γ)‖ / (1 + ‖W(Γ)‖)
    pub max_relative: f64,
    pub worst_point: Option<Vec<f64>>,
    pub points: usize,
}

pub fn weyl_invariance_test(
    c: &ChartModel,
    ups: &OneFormField,
    points: &[Vec<f64>],
) -> Result<InvarianceReport> {
    let changed = c.project_change(ups);
    let mut report = InvarianceReport {
        max_relative: 0.0,
        worst_point: None,
        points: points.len(),
    };
    for p in points {
        let w = Invariants::at(c, p)?.weyl;
        let w2 = Invariants::at(&changed, p)?.weyl;
        let diff = w.iter().zip(&w2).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let rel = diff / (1.0 + crate::linalg::max_abs_slice(&w));
        if rel > report.max_relative || report.worst_point.is_none() {
            report.max_relative = report.max_relative.max(rel);
            report.worst_point = Some(p.clone());
        }
    }
    Ok(report)
}
