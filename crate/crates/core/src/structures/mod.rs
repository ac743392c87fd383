//! Geometric structures on the base read off from parallel fiber structures.
//!
//! A fiber structure is given at one base point in the chart's splitting and
//! spread to sample points by tractor transport along straight segments from
//! the base (a star spanning tree). Path independence is re-checked on ten
//! seeded two-segment detours.

mod complex;
mod contact;
mod decomposition;
mod einstein;
mod foliation;

pub use complex::{complex_reduction, ComplexReport};
pub use contact::{contact_from_symplectic, ContactReport};
pub use decomposition::{holonomy_decomposition_check, DecompositionReport};
pub use einstein::{
    einstein_check, einstein_to_tractor_metric, tractor_metric_at, tractor_metric_to_einstein_verify,
    ConverseReport, EinsteinReport, MetricReport,
};
pub use foliation::{foliation_analysis, CovolumeStatus, FoliationReport};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::affine::{ChartModel, Path};
use crate::holonomy::{
    commutator_residual, form_residual, infinitesimal_algebra, subspace_residual, HolonomyAlgebra,
    RANK_TOL,
};
use crate::linalg::{max_abs, orthonormal_span, RankTol};
use crate::tractor::{splitting_gauge, transport_frame, TransportConfig};
use crate::Result;

/// Fraction of degenerate samples tolerated before a report is inconclusive.
pub const DEGENERATE_BUDGET: f64 = 0.2;

/// Where to evaluate: `grid` Halton points followed by `random` seeded uniform points.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Sampling {
    pub grid: usize,
    pub random: usize,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            grid: 16,
            random: 8,
            seed: 0,
        }
    }
}

impl Sampling {
    pub fn points(&self, c: &ChartModel) -> Vec<Vec<f64>> {
        c.domain().sample(self.grid, self.random, self.seed)
    }
}

/// Evaluation settings shared by every structure report.
#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub sampling: Sampling,
    pub transport: TransportConfig,
    /// Multiplies every acceptance tolerance.
    pub tol_scale: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            sampling: Sampling::default(),
            transport: TransportConfig::default(),
            tol_scale: 1.0,
        }
    }
}

impl Options {
    pub fn at_most(&self, value: f64, tol: f64) -> Check {
        Check::at_most(value, tol * self.tol_scale)
    }
}

/// How a [`Check`] compares its value with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    Above,
}

/// A residual with the tolerance it was judged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    pub value: f64,
    pub tol: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn at_most(value: f64, tol: f64) -> Check {
        Check {
            value,
            tol,
            relation: Relation::AtMost,
            pass: value <= tol,
        }
    }

    /// Passes when `value` exceeds `bound`; `tol` records the bound.
    pub fn above(value: f64, bound: f64) -> Check {
        Check {
            value,
            tol: bound,
            relation: Relation::Above,
            pass: value > bound,
        }
    }

    /// The same value judged against another tolerance.
    pub fn with_tol(self, tol: f64) -> Check {
        match self.relation {
            Relation::AtMost => Check::at_most(self.value, tol),
            Relation::Above => Check::above(self.value, tol),
        }
    }
}

/// A fiber structure at a point, in the chart's splitting.
#[derive(Debug, Clone, PartialEq)]
pub enum FiberStructure {
    Metric(DMatrix<f64>),
    Symplectic(DMatrix<f64>),
    Complex(DMatrix<f64>),
    /// Basis columns of a subspace.
    Subspace(DMatrix<f64>),
}

impl FiberStructure {
    pub fn matrix(&self) -> &DMatrix<f64> {
        match self {
            FiberStructure::Metric(m)
            | FiberStructure::Symplectic(m)
            | FiberStructure::Complex(m)
            | FiberStructure::Subspace(m) => m,
        }
    }

    /// Image under a fiber map `u` acting on tractors: forms go to u⁻ᵀ B u⁻¹.
    pub fn push(&self, u: &DMatrix<f64>) -> FiberStructure {
        match self {
            FiberStructure::Metric(h) => FiberStructure::Metric(push_form(u, h)),
            FiberStructure::Symplectic(w) => FiberStructure::Symplectic(push_form(u, w)),
            FiberStructure::Complex(j) => FiberStructure::Complex(push_endo(u, j)),
            FiberStructure::Subspace(k) => FiberStructure::Subspace(u * k),
        }
    }

    /// The same structure seen in the splitting changed by `ups` at this point.
    pub fn change_splitting(&self, ups: &[f64]) -> FiberStructure {
        self.push(&splitting_gauge(ups))
    }

    /// Distance between two instances; subspaces compare projectors.
    pub fn distance(&self, other: &FiberStructure) -> f64 {
        match (self, other) {
            (FiberStructure::Subspace(a), FiberStructure::Subspace(b)) => {
                max_abs(&(projector(a) - projector(b)))
            }
            _ => max_abs(&(self.matrix() - other.matrix())),
        }
    }

    /// Residual of invariance under the algebra (scale-free).
    pub fn invariance_residual(&self, alg: &HolonomyAlgebra) -> f64 {
        let scale = max_abs(self.matrix()).max(1e-300);
        match self {
            FiberStructure::Metric(m) | FiberStructure::Symplectic(m) => form_residual(alg, m) / scale,
            FiberStructure::Complex(j) => commutator_residual(alg, j) / scale,
            FiberStructure::Subspace(k) => subspace_residual(alg, &orthonormal(k)),
        }
    }
}

pub(crate) fn push_form(u: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let inv = u.clone().try_inverse().expect("transport matrices are invertible");
    inv.transpose() * b * inv
}

pub(crate) fn push_endo(u: &DMatrix<f64>, j: &DMatrix<f64>) -> DMatrix<f64> {
    let inv = u.clone().try_inverse().expect("transport matrices are invertible");
    u * j * inv
}

pub(crate) fn orthonormal(k: &DMatrix<f64>) -> DMatrix<f64> {
    let cols: Vec<_> = k.column_iter().map(|c| c.into_owned()).collect();
    orthonormal_span(&cols, k.nrows(), RankTol::new(1e-10, 1e-14))
}

fn projector(k: &DMatrix<f64>) -> DMatrix<f64> {
    let q = orthonormal(k);
    &q * q.transpose()
}

/// Transport frames from a base point to sample points.
#[derive(Debug, Clone)]
pub struct Spread {
    pub base: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    /// `frames[i]` maps tractors at the base to tractors at `points[i]`.
    pub frames: Vec<DMatrix<f64>>,
    /// (point index, frame along a detour through a random midpoint).
    pub detours: Vec<(usize, DMatrix<f64>)>,
}

impl Spread {
    pub fn new(
        c: &ChartModel,
        base: &[f64],
        points: Vec<Vec<f64>>,
        seed: u64,
        cfg: TransportConfig,
    ) -> Result<Spread> {
        c.check_point(base)?;
        let frames = points
            .par_iter()
            .map(|p| {
                let path = Path::polyline(&[base.to_vec(), p.clone()]);
                transport_frame(c, &path, cfg).map(|t| t.matrix)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xde70);
        let plans: Vec<(usize, Vec<f64>)> = if points.is_empty() {
            Vec::new()
        } else {
            (0..10)
                .map(|_| {
                    let i = rng.gen_range(0..points.len());
                    let u: Vec<f64> = (0..c.dim()).map(|_| rng.gen_range(0.0..1.0)).collect();
                    (i, c.domain().map_unit(&u, 0.02))
                })
                .collect()
        };
        let detours = plans
            .par_iter()
            .map(|(i, mid)| {
                let path = Path::polyline(&[base.to_vec(), mid.clone(), points[*i].clone()]);
                transport_frame(c, &path, cfg).map(|t| (*i, t.matrix))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Spread {
            base: base.to_vec(),
            points,
            frames,
            detours,
        })
    }

    pub fn structures(&self, s: &FiberStructure) -> Vec<FiberStructure> {
        self.frames.iter().map(|u| s.push(u)).collect()
    }

    /// Largest discrepancy between the tree and detour images of `s`, relative to its size.
    pub fn path_residual(&self, s: &FiberStructure) -> f64 {
        self.detours
            .iter()
            .map(|(i, u)| {
                let a = s.push(&self.frames[*i]);
                let b = s.push(u);
                let scale = match s {
                    FiberStructure::Subspace(_) => 1.0,
                    _ => 1.0 + max_abs(a.matrix()),
                };
                a.distance(&b) / scale
            })
            .fold(0.0, f64::max)
    }
}

/// Infinitesimal holonomy at `p` from the curvature and two covariant derivatives.
pub(crate) fn base_algebra(c: &ChartModel, p: &[f64]) -> Result<HolonomyAlgebra> {
    infinitesimal_algebra(c, p, 2, RANK_TOL)
}

#[cfg(test)]
mod tests;
