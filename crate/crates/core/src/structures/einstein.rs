//! Einstein connections and parallel tractor metrics.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{base_algebra, push_form, Check, FiberStructure, Options, Spread, DEGENERATE_BUDGET};
use crate::affine::{ChartModel, Path};
use crate::linalg::{max_abs, row_major, signature, RankTol};
use crate::ode::gauss_legendre_unit;
use crate::projective::d_rho;
use crate::tractor::{coordinate_matrices, transport_frame};
use crate::{Error, Result};

const SIG_TOL: RankTol = RankTol::new(1e-8, 1e-12);

#[derive(Debug, Clone, Serialize)]
pub struct EinsteinReport {
    pub accepted: bool,
    pub samples: usize,
    pub nabla_ric_norm: Check,
    pub ric_antisymmetry: Check,
    /// min over samples of σ_min/σ_max for the symmetric part of Ric.
    pub ric_conditioning: Check,
    pub ric_signature: Option<(usize, usize)>,
    pub note: Option<String>,
}

/// Accept iff ∇Ric vanishes and Ric is symmetric and nondegenerate on every sample.
pub fn einstein_check(c: &ChartModel, opts: &Options) -> Result<EinsteinReport> {
    let n = c.dim();
    let points = opts.sampling.points(c);
    let per_point = points
        .par_iter()
        .map(|p| {
            let l = c.local(p)?;
            let ric = l.ricci();
            let nabla = l.nabla_ricci();
            let m = DMatrix::from_row_slice(n, n, &ric);
            let sym = (&m + m.transpose()) * 0.5;
            let anti = max_abs(&((&m - m.transpose()) * 0.5));
            let sv = sym.singular_values();
            let cond = if sv.max() > 1e-9 { sv.min() / sv.max() } else { 0.0 };
            let (pos, neg, zero) = signature(&sym, SIG_TOL);
            let nabla_max = nabla.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            Ok((nabla_max, anti, cond, (pos, neg, zero)))
        })
        .collect::<Result<Vec<_>>>()?;
    let nabla = per_point.iter().map(|r| r.0).fold(0.0, f64::max);
    let anti = per_point.iter().map(|r| r.1).fold(0.0, f64::max);
    let cond = per_point.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let sigs: Vec<_> = per_point.iter().map(|r| r.3).collect();
    let constant = sigs.windows(2).all(|w| w[0] == w[1]);
    let ric_signature = match sigs.first() {
        Some(&(p, q, 0)) if constant => Some((p, q)),
        _ => None,
    };
    let nabla_ric_norm = opts.at_most(nabla, 1e-8);
    let ric_antisymmetry = opts.at_most(anti, 1e-8);
    let ric_conditioning = Check::above(cond, 1e-6);
    let accepted = nabla_ric_norm.pass && ric_antisymmetry.pass && ric_conditioning.pass;
    let note = if ric_conditioning.value == 0.0 {
        Some("Ricci tensor vanishes or is degenerate".into())
    } else if !constant {
        Some("Ricci signature changes across samples".into())
    } else {
        None
    };
    Ok(EinsteinReport {
        accepted,
        samples: points.len(),
        nabla_ric_norm,
        ric_antisymmetry,
        ric_conditioning,
        ric_signature,
        note,
    })
}

/// ∫₀¹ tr Γ(base + s(p − base))·(p − base) ds, on four Gauss-Legendre panels.
fn trace_potential(c: &ChartModel, base: &[f64], p: &[f64]) -> Result<f64> {
    let d: Vec<f64> = p.iter().zip(base).map(|(a, b)| a - b).collect();
    let mut acc = 0.0;
    let panels = 4;
    for k in 0..panels {
        for (x, w) in gauss_legendre_unit() {
            let s = (k as f64 + x) / panels as f64;
            let q: Vec<f64> = base.iter().zip(&d).map(|(b, v)| b + s * v).collect();
            let t = c.local_first(&q)?.trace();
            acc += w / panels as f64 * t.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>();
        }
    }
    Ok(acc)
}

/// The parallel tractor metric `f·[[−P, 0], [0, 1]]`, with weight factor
/// `f = exp(−2φ/(n+1))`, `dφ = tr Γ`, normalized by `f(base) = 1`.
pub fn tractor_metric_at(c: &ChartModel, base: &[f64], p: &[f64]) -> Result<DMatrix<f64>> {
    let n = c.dim();
    let phi = trace_potential(c, base, p)?;
    let f = (-2.0 * phi / (n as f64 + 1.0)).exp();
    let rho = c.local_first(p)?.rho();
    let mut h = DMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = -f * rho[i * n + j];
        }
    }
    h[(n, n)] = f;
    Ok(h)
}

/// Blocks of ∂_a h − (M_aᵀ h + h M_a): metric block, mixed block, line entry.
fn identity_residuals(c: &ChartModel, base: &[f64], p: &[f64]) -> Result<[f64; 3]> {
    let n = c.dim();
    let nf = n as f64;
    let l = c.local(p)?;
    let h = tractor_metric_at(c, base, p)?;
    let f = h[(n, n)];
    let t = l.trace();
    let dp = d_rho(&l);
    let rho = l.rho();
    let ms = coordinate_matrices(&l);
    let mut out = [0.0f64; 3];
    for a in 0..n {
        let df = -2.0 / (nf + 1.0) * t[a] * f;
        let mut dh = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                dh[(i, j)] = -df * rho[i * n + j] - f * dp[(a * n + i) * n + j];
            }
        }
        dh[(n, n)] = df;
        let d = dh - (ms[a].transpose() * &h + &h * &ms[a]);
        let scale = 1.0 + max_abs(&h);
        let tt = max_abs(&d.view((0, 0), (n, n)).into_owned()) / scale;
        let mixed = d.view((0, n), (n, 1)).amax().max(d.view((n, 0), (1, n)).amax()) / scale;
        out[0] = out[0].max(tt);
        out[1] = out[1].max(mixed);
        out[2] = out[2].max(d[(n, n)].abs() / scale);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub accepted: bool,
    pub base: Vec<f64>,
    /// h at the base point, row-major (n+1)×(n+1).
    pub h_base: Vec<f64>,
    pub signature: (usize, usize),
    pub expected_signature: (usize, usize),
    /// Which branch of the signature rule applied: "(p+1,q)" or "(q+1,p)".
    pub rule: String,
    pub signature_matches: bool,
    pub metric_block: Check,
    pub mixed_block: Check,
    pub line_entry: Check,
    pub curves: usize,
    pub parallel_residual: Check,
}

/// Build h for an Einstein chart and check it is parallel, at samples and along 20 seeded segments.
pub fn einstein_to_tractor_metric(c: &ChartModel, opts: &Options) -> Result<MetricReport> {
    let check = einstein_check(c, opts)?;
    if !check.accepted {
        return Err(Error::Precondition(format!(
            "{} is not Einstein (max |∇Ric| = {:.3e}, Ric conditioning {:.3e})",
            c.name(),
            check.nabla_ric_norm.value,
            check.ric_conditioning.value
        )));
    }
    let n = c.dim();
    let base = c.domain().center();
    let h_base = tractor_metric_at(c, &base, &base)?;
    let (pos, neg, _) = signature(&h_base, SIG_TOL);

    let (expected_signature, rule) = expected_signature(c, &base)?;

    let points = opts.sampling.points(c);
    let ids = points
        .par_iter()
        .map(|p| identity_residuals(c, &base, p))
        .collect::<Result<Vec<_>>>()?;
    let worst = |k: usize| ids.iter().map(|r| r[k]).fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.sampling.seed ^ 0xe157);
    let mut pick = || -> Vec<f64> {
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        c.domain().map_unit(&u, 0.02)
    };
    let segments: Vec<(Vec<f64>, Vec<f64>)> = (0..20).map(|_| (pick(), pick())).collect();
    let parallel = segments
        .par_iter()
        .map(|(a, b)| {
            let u = transport_frame(c, &Path::polyline(&[a.clone(), b.clone()]), opts.transport)?;
            let ha = tractor_metric_at(c, &base, a)?;
            let hb = tractor_metric_at(c, &base, b)?;
            Ok(max_abs(&(push_form(&u.matrix, &ha) - &hb)) / (1.0 + max_abs(&hb)))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let metric_block = opts.at_most(worst(0), 1e-9);
    let mixed_block = opts.at_most(worst(1), 1e-9);
    let line_entry = opts.at_most(worst(2), 1e-9);
    let parallel_residual = opts.at_most(parallel, 1e-6);
    let signature_matches = (pos, neg) == expected_signature;
    Ok(MetricReport {
        accepted: signature_matches
            && metric_block.pass
            && mixed_block.pass
            && line_entry.pass
            && parallel_residual.pass,
        base,
        h_base: row_major(&h_base),
        signature: (pos, neg),
        expected_signature,
        rule,
        signature_matches,
        metric_block,
        mixed_block,
        line_entry,
        curves: segments.len(),
        parallel_residual,
    })
}

/// With Ric = λg and sig g = (p,q): (p+1,q) for λ > 0, (q+1,p) for λ < 0.
/// Without a metric, g is taken to be Ric itself (λ = 1).
fn expected_signature(c: &ChartModel, p: &[f64]) -> Result<((usize, usize), String)> {
    let n = c.dim();
    let ric = c.local_first(p)?.ricci();
    let ric = DMatrix::from_row_slice(n, n, &ric);
    let g = match c.metric_at(p)? {
        Some(g) => DMatrix::from_row_slice(n, n, &g),
        None => ric.clone(),
    };
    let lambda = ric.dot(&g) / g.dot(&g);
    let (gp, gq, _) = signature(&g, SIG_TOL);
    Ok(if lambda > 0.0 {
        ((gp + 1, gq), "(p+1,q)".into())
    } else {
        ((gq + 1, gp), "(q+1,p)".into())
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConverseReport {
    pub accepted: bool,
    pub inconclusive: bool,
    pub invariance: Check,
    pub path_residual: Check,
    /// Fraction of samples where h(s, s) ≈ 0 for the line generator s.
    pub degenerate_fraction: f64,
    /// max |h/h(s,s) − [[−P,0],[0,1]]| when the chart is the matching gauge.
    pub consistency: Option<Check>,
    pub samples: usize,
}

/// Spread a fiber metric from the domain center and check it can come from an Einstein scale.
pub fn tractor_metric_to_einstein_verify(
    c: &ChartModel,
    h_base: &DMatrix<f64>,
    matching_gauge: bool,
    opts: &Options,
) -> Result<ConverseReport> {
    let n = c.dim();
    if h_base.nrows() != n + 1 || h_base.ncols() != n + 1 {
        return Err(Error::Dimension(format!("h must be {0}×{0}", n + 1)));
    }
    let base = c.domain().center();
    let s = FiberStructure::Metric(h_base.clone());
    let alg = base_algebra(c, &base)?;
    let invariance = opts.at_most(s.invariance_residual(&alg), 1e-8);
    if !invariance.pass {
        return Err(Error::Precondition(format!(
            "h is not holonomy invariant (residual {:.3e})",
            invariance.value
        )));
    }
    let spread = Spread::new(c, &base, opts.sampling.points(c), opts.sampling.seed, opts.transport)?;
    let path_residual = opts.at_most(spread.path_residual(&s), 1e-6);
    let hs = spread.structures(&s);
    let scale = max_abs(h_base);
    let mut degenerate = 0usize;
    let mut consistency = 0.0f64;
    for (p, h) in spread.points.iter().zip(&hs) {
        let h = h.matrix();
        let line = h[(n, n)];
        if line.abs() <= 1e-6 * scale {
            degenerate += 1;
            continue;
        }
        if matching_gauge {
            let rho = c.local_first(p)?.rho();
            let mut expect = DMatrix::zeros(n + 1, n + 1);
            for i in 0..n {
                for j in 0..n {
                    expect[(i, j)] = -rho[i * n + j];
                }
            }
            expect[(n, n)] = 1.0;
            let r = max_abs(&(h / line - &expect)) / (1.0 + max_abs(&expect));
            consistency = consistency.max(r);
        }
    }
    let total = spread.points.len().max(1);
    let degenerate_fraction = degenerate as f64 / total as f64;
    let inconclusive = degenerate_fraction > DEGENERATE_BUDGET;
    let consistency = matching_gauge.then(|| opts.at_most(consistency, 1e-8));
    let accepted = !inconclusive
        && path_residual.pass
        && consistency.map(|c| c.pass).unwrap_or(true);
    Ok(ConverseReport {
        accepted,
        inconclusive,
        invariance,
        path_residual,
        degenerate_fraction,
        consistency,
        samples: spread.points.len(),
    })
}
