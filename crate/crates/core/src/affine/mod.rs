//! Affine connections on a single chart.

pub mod curvature;
mod geodesic;

pub use geodesic::{geodesic_acceleration, integrate_geodesic, Curve, Geodesic, Path, Piece};

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::expr::{Expr, Jet, JetBasis};
use crate::{Error, Result};

/// Coordinate box in which every chart function is smooth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Domain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Domain> {
        if lo.len() != hi.len() {
            return Err(Error::Dimension("domain bounds differ in length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::Dimension("domain box is empty".into()));
        }
        Ok(Domain { lo, hi })
    }

    pub fn cube(n: usize, half: f64) -> Domain {
        Domain {
            lo: vec![-half; n],
            hi: vec![half; n],
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.lo.len()
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (a, b))| x.is_finite() && *a <= *x && *x <= *b)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Map `u ∈ [0,1]^n` into the box, shrunk by `margin` (fraction of the width) on each side.
    pub fn map_unit(&self, u: &[f64], margin: f64) -> Vec<f64> {
        u.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(t, (a, b))| {
                let w = b - a;
                a + margin * w + t * (1.0 - 2.0 * margin) * w
            })
            .collect()
    }

    /// Halton points followed by seeded uniform points.
    pub fn sample(&self, grid: usize, random: usize, seed: u64) -> Vec<Vec<f64>> {
        let n = self.lo.len();
        let mut out = Vec::with_capacity(grid + random);
        for idx in 1..=grid {
            let u: Vec<f64> = (0..n).map(|d| halton(idx, PRIMES[d % PRIMES.len()])).collect();
            out.push(self.map_unit(&u, 0.02));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..random {
            let u: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            out.push(self.map_unit(&u, 0.02));
        }
        out
    }
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `index` in `base`.
pub fn halton(index: usize, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index as u64;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Slot type of a tensor index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Up,
    Down,
}

/// Dense tensor at a point, row-major over its slots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorValue {
    pub point: Vec<f64>,
    pub variance: Vec<Slot>,
    pub data: Vec<f64>,
}

impl TensorValue {
    pub fn new(point: &[f64], variance: Vec<Slot>, data: Vec<f64>) -> TensorValue {
        let n = point.len();
        debug_assert_eq!(data.len(), n.pow(variance.len() as u32));
        TensorValue {
            point: point.to_vec(),
            variance,
            data,
        }
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        let n = self.dim();
        self.data[idx.iter().fold(0, |acc, &i| acc * n + i)]
    }

    pub fn max_abs(&self) -> f64 {
        crate::linalg::max_abs_slice(&self.data)
    }
}

/// Tensor field given by one expression per component, row-major over the slots.
#[derive(Debug, Clone)]
pub struct TensorField {
    pub variance: Vec<Slot>,
    pub components: Vec<Expr>,
}

/// A one-form Υ = Υ_i dx^i.
#[derive(Debug, Clone, PartialEq)]
pub struct OneFormField {
    pub components: Vec<Expr>,
}

impl OneFormField {
    pub fn zero(n: usize) -> Self {
        OneFormField {
            components: vec![Expr::zero(); n],
        }
    }

    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|e| e.eval(p)).collect()
    }

    pub fn neg(&self) -> Self {
        OneFormField {
            components: self.components.iter().map(Expr::neg).collect(),
        }
    }

    pub fn add(&self, other: &OneFormField) -> Self {
        OneFormField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    /// Matrix ∂_a Υ_i at `[a*n + i]`.
    pub fn jacobian(&self, p: &[f64]) -> Result<Vec<f64>> {
        let n = self.components.len();
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n {
            for c in &self.components {
                out.push(c.diff(a).eval(p)?);
            }
        }
        Ok(out)
    }
}

/// A torsion-free connection on a coordinate chart.
#[derive(Debug, Clone)]
pub struct ChartModel {
    name: String,
    n: usize,
    coords: Vec<String>,
    gamma: Vec<Expr>,
    dgamma: Vec<Expr>,
    ddgamma: Vec<Expr>,
    domain: Domain,
    metric: Option<Vec<Expr>>,
}

/// Γ, ∂Γ and ∂∂Γ evaluated at one point, with the curvature quantities built on them.
#[derive(Debug, Clone)]
pub struct Local {
    pub n: usize,
    pub point: Vec<f64>,
    pub gamma: Vec<f64>,
    pub dgamma: Vec<f64>,
    pub ddgamma: Vec<f64>,
}

const TORSION_TOL: f64 = 1e-12;

impl ChartModel {
    /// Build a chart, rejecting connections whose coefficients are not symmetric
    /// in the lower indices at the domain sample points.
    pub fn new(
        name: &str,
        coords: Vec<String>,
        gamma: Vec<Expr>,
        domain: Domain,
        metric: Option<Vec<Expr>>,
    ) -> Result<ChartModel> {
        let n = coords.len();
        if n == 0 {
            return Err(Error::Dimension("chart needs at least one coordinate".into()));
        }
        if gamma.len() != n * n * n {
            return Err(Error::Dimension(format!(
                "expected {} connection coefficients, got {}",
                n * n * n,
                gamma.len()
            )));
        }
        if domain.lo.len() != n {
            return Err(Error::Dimension("domain dimension differs from chart".into()));
        }
        if let Some(m) = &metric {
            if m.len() != n * n {
                return Err(Error::Dimension("metric must have n*n entries".into()));
            }
        }
        for e in gamma.iter().chain(metric.iter().flatten()) {
            if e.max_var().is_some_and(|v| v >= n) {
                return Err(Error::Dimension("expression uses an undeclared coordinate".into()));
            }
        }
        let probe = domain.sample(16, 8, 0);
        for k in 0..n {
            for i in 0..n {
                for j in (i + 1)..n {
                    let a = &gamma[(k * n + i) * n + j];
                    let b = &gamma[(k * n + j) * n + i];
                    if a == b {
                        continue;
                    }
                    for p in &probe {
                        let (x, y) = (a.eval(p)?, b.eval(p)?);
                        if (x - y).abs() > TORSION_TOL * (1.0 + x.abs().max(y.abs())) {
                            return Err(Error::Torsion(format!(
                                "Γ^{k1}_{{{i1}{j1}}} ≠ Γ^{k1}_{{{j1}{i1}}} at {p:?}; \
                                 a torsion-free connection is required (enable symmetrize)",
                                k1 = k + 1,
                                i1 = i + 1,
                                j1 = j + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self::build(name, coords, gamma, domain, metric))
    }

    /// Torsion-free part ∇ = ∇' − ½τ of an arbitrary connection.
    pub fn symmetrize(
        name: &str,
        coords: Vec<String>,
        gamma_raw: Vec<Expr>,
        domain: Domain,
        metric: Option<Vec<Expr>>,
    ) -> Result<ChartModel> {
        let n = coords.len();
        if gamma_raw.len() != n * n * n {
            return Err(Error::Dimension("wrong number of connection coefficients".into()));
        }
        let mut gamma = gamma_raw.clone();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let a = &gamma_raw[(k * n + i) * n + j];
                    let b = &gamma_raw[(k * n + j) * n + i];
                    if a != b {
                        gamma[(k * n + i) * n + j] = a.add(b).scale(0.5);
                    }
                }
            }
        }
        ChartModel::new(name, coords, gamma, domain, metric)
    }

    fn build(
        name: &str,
        coords: Vec<String>,
        gamma: Vec<Expr>,
        domain: Domain,
        metric: Option<Vec<Expr>>,
    ) -> ChartModel {
        let n = coords.len();
        let mut dgamma = Vec::with_capacity(n.pow(4));
        for a in 0..n {
            for g in &gamma {
                dgamma.push(g.diff(a));
            }
        }
        let mut ddgamma = Vec::with_capacity(n.pow(5));
        for a in 0..n {
            for dg in &dgamma {
                ddgamma.push(dg.diff(a));
            }
        }
        ChartModel {
            name: name.to_string(),
            n,
            coords,
            gamma,
            dgamma,
            ddgamma,
            domain,
            metric,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn gamma_exprs(&self) -> &[Expr] {
        &self.gamma
    }

    pub fn metric_exprs(&self) -> Option<&[Expr]> {
        self.metric.as_deref()
    }

    pub fn with_name(mut self, name: &str) -> ChartModel {
        self.name = name.to_string();
        self
    }

    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.n {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, chart has {}",
                p.len(),
                self.n
            )));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("point has non-finite coordinates".into()));
        }
        Ok(())
    }

    pub fn gamma_at(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_point(p)?;
        self.gamma.iter().map(|e| e.eval(p)).collect()
    }

    /// Γ^k_{ij} X^i as an n×n matrix `[k*n + j]`.
    pub fn gamma_dir(&self, p: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        let g = self.gamma_at(p)?;
        Ok(contract_direction(self.n, &g, x))
    }

    pub fn local(&self, p: &[f64]) -> Result<Local> {
        self.check_point(p)?;
        let ev = |v: &[Expr]| v.iter().map(|e| e.eval(p)).collect::<Result<Vec<f64>>>();
        Ok(Local {
            n: self.n,
            point: p.to_vec(),
            gamma: ev(&self.gamma)?,
            dgamma: ev(&self.dgamma)?,
            ddgamma: ev(&self.ddgamma)?,
        })
    }

    /// Like [`ChartModel::local`] but without second derivatives of Γ; enough for
    /// curvature, Ricci and rho, not for their derivatives.
    pub fn local_first(&self, p: &[f64]) -> Result<Local> {
        self.check_point(p)?;
        let ev = |v: &[Expr]| v.iter().map(|e| e.eval(p)).collect::<Result<Vec<f64>>>();
        Ok(Local {
            n: self.n,
            point: p.to_vec(),
            gamma: ev(&self.gamma)?,
            dgamma: ev(&self.dgamma)?,
            ddgamma: Vec::new(),
        })
    }

    /// Taylor jets of every Γ^k_{ij} at `p` up to `order`.
    pub fn gamma_jets(&self, p: &[f64], order: usize) -> Result<(Arc<JetBasis>, Vec<Jet>)> {
        self.check_point(p)?;
        let basis = JetBasis::new(self.n, order);
        let vars = basis.variables(p);
        let jets = self
            .gamma
            .iter()
            .map(|e| e.eval_jet(&vars))
            .collect::<Result<Vec<Jet>>>()?;
        Ok((basis, jets))
    }

    pub fn metric_at(&self, p: &[f64]) -> Result<Option<Vec<f64>>> {
        match &self.metric {
            None => Ok(None),
            Some(m) => Ok(Some(m.iter().map(|e| e.eval(p)).collect::<Result<_>>()?)),
        }
    }

    pub fn curvature(&self, p: &[f64]) -> Result<TensorValue> {
        let l = self.local(p)?;
        Ok(TensorValue::new(
            p,
            vec![Slot::Down, Slot::Down, Slot::Up, Slot::Down],
            l.riemann(),
        ))
    }

    pub fn ricci(&self, p: &[f64]) -> Result<TensorValue> {
        let l = self.local(p)?;
        Ok(TensorValue::new(p, vec![Slot::Down, Slot::Down], l.ricci()))
    }

    /// Γ' = Γ + Υ_i δ^k_j + Υ_j δ^k_i.
    pub fn project_change(&self, ups: &OneFormField) -> ChartModel {
        let n = self.n;
        let mut gamma = self.gamma.clone();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut e = gamma[(k * n + i) * n + j].clone();
                    if k == j {
                        e = e.add(&ups.components[i]);
                    }
                    if k == i {
                        e = e.add(&ups.components[j]);
                    }
                    gamma[(k * n + i) * n + j] = e;
                }
            }
        }
        Self::build(
            &format!("{}+ups", self.name),
            self.coords.clone(),
            gamma,
            self.domain.clone(),
            self.metric.clone(),
        )
    }

    /// Christoffel trace t_i = Σ_k Γ^k_{ik} as expressions.
    pub fn trace_form(&self) -> OneFormField {
        let n = self.n;
        let components = (0..n)
            .map(|i| {
                (0..n).fold(Expr::zero(), |acc, k| acc.add(&self.gamma[(k * n + i) * n + k]))
            })
            .collect();
        OneFormField { components }
    }

    /// Change to the connection preserving the coordinate volume form.
    pub fn normalize_volume(&self) -> (ChartModel, OneFormField) {
        let t = self.trace_form();
        let scale = -1.0 / (self.n as f64 + 1.0);
        let ups = OneFormField {
            components: t.components.iter().map(|e| e.scale(scale)).collect(),
        };
        if ups.components.iter().all(Expr::is_zero) {
            return (self.clone(), ups);
        }
        let mut c = self.project_change(&ups);
        c.name = format!("{}+normalized", self.name);
        (c, ups)
    }

    /// ∇_a T with the derivative slot first.
    pub fn covariant_derivative(&self, field: &TensorField, p: &[f64]) -> Result<TensorValue> {
        let n = self.n;
        let r = field.variance.len();
        if field.components.len() != n.pow(r as u32) {
            return Err(Error::Dimension("tensor field has wrong component count".into()));
        }
        let g = self.gamma_at(p)?;
        let values: Vec<f64> = field
            .components
            .iter()
            .map(|e| e.eval(p))
            .collect::<Result<_>>()?;
        let size = n.pow(r as u32);
        let mut out = Vec::with_capacity(n * size);
        for a in 0..n {
            for idx in 0..size {
                let mut v = field.components[idx].diff(a).eval(p)?;
                let digits = index_digits(idx, n, r);
                for (s, slot) in field.variance.iter().enumerate() {
                    for m in 0..n {
                        let mut d = digits.clone();
                        d[s] = m;
                        let other = values[digits_index(&d, n)];
                        match slot {
                            Slot::Up => v += g[(digits[s] * n + a) * n + m] * other,
                            Slot::Down => v -= g[(m * n + a) * n + digits[s]] * other,
                        }
                    }
                }
                out.push(v);
            }
        }
        let mut variance = vec![Slot::Down];
        variance.extend(&field.variance);
        Ok(TensorValue::new(p, variance, out))
    }
}

pub(crate) fn index_digits(mut idx: usize, n: usize, r: usize) -> Vec<usize> {
    let mut d = vec![0; r];
    for s in (0..r).rev() {
        d[s] = idx % n;
        idx /= n;
    }
    d
}

pub(crate) fn digits_index(d: &[usize], n: usize) -> usize {
    d.iter().fold(0, |acc, &i| acc * n + i)
}

/// Γ_X as the matrix `[k*n + j]` = Γ^k_{ij} X^i.
pub fn contract_direction(n: usize, gamma: &[f64], x: &[f64]) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for k in 0..n {
        for j in 0..n {
            m[k * n + j] = (0..n).map(|i| gamma[(k * n + i) * n + j] * x[i]).sum();
        }
    }
    m
}

impl Local {
    pub fn riemann(&self) -> Vec<f64> {
        curvature::riemann(self.n, &self.gamma, &self.dgamma)
    }

    pub fn ricci(&self) -> Vec<f64> {
        curvature::ricci(self.n, &self.riemann())
    }

    pub fn rho(&self) -> Vec<f64> {
        curvature::rho(self.n, &self.ricci())
    }

    pub fn d_riemann(&self) -> Vec<f64> {
        assert!(!self.ddgamma.is_empty(), "second derivatives were not evaluated");
        curvature::d_riemann(self.n, &self.gamma, &self.dgamma, &self.ddgamma)
    }

    /// ∂_a Ric_{jl} at `[(a*n + j)*n + l]`.
    pub fn d_ricci(&self) -> Vec<f64> {
        let n = self.n;
        let dr = self.d_riemann();
        let mut out = vec![0.0; n * n * n];
        for a in 0..n {
            for j in 0..n {
                for l in 0..n {
                    out[(a * n + j) * n + l] = (0..n)
                        .map(|k| dr[(((a * n + k) * n + j) * n + k) * n + l])
                        .sum();
                }
            }
        }
        out
    }

    /// ∇_a Ric_{jl} at `[(a*n + j)*n + l]`.
    pub fn nabla_ricci(&self) -> Vec<f64> {
        let n = self.n;
        let ric = self.ricci();
        let d = self.d_ricci();
        nabla_two_form(n, &self.gamma, &ric, &d)
    }

    pub fn trace(&self) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|k| self.gamma[(k * n + i) * n + k]).sum())
            .collect()
    }
}

/// ∇_a T_{jl} = ∂_a T_{jl} − Γ^m_{aj} T_{ml} − Γ^m_{al} T_{jm}.
pub fn nabla_two_form(n: usize, gamma: &[f64], t: &[f64], dt: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n * n];
    for a in 0..n {
        for j in 0..n {
            for l in 0..n {
                let mut v = dt[(a * n + j) * n + l];
                for m in 0..n {
                    v -= gamma[(m * n + a) * n + j] * t[m * n + l];
                    v -= gamma[(m * n + a) * n + l] * t[j * n + m];
                }
                out[(a * n + j) * n + l] = v;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;
