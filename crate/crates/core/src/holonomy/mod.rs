//! Holonomy algebra estimation and invariant fiber structures.

mod classify;
mod invariants;

pub use classify::{classify, Classification, Label, TableMatch};
pub use invariants::{
    commutator_residual, form_residual, invariant_complex, invariant_metric, invariant_subspaces,
    invariant_symplectic, subspace_residual, StructureCandidate, StructureKind,
};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::affine::{ChartModel, Path};
use crate::linalg::{frob, logm_near_identity, orthonormal_span, svd_right, RankTol};
use crate::tractor::{loop_holonomy, JetConnection, TransportConfig};
use crate::{Error, Result};

/// Default singular-value cutoff for algebra ranks.
pub const RANK_TOL: RankTol = RankTol::new(1e-7, 1e-9);

/// Which estimator produced an algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Infinitesimal,
    Loops,
    Synthetic,
}

/// A matrix Lie algebra given by generators and a Frobenius-orthonormal basis.
#[derive(Debug, Clone)]
pub struct HolonomyAlgebra {
    pub size: usize,
    pub generators: Vec<DMatrix<f64>>,
    pub basis: Vec<DMatrix<f64>>,
    pub tol: RankTol,
    pub estimator: Estimator,
    /// Rank of the generator span before bracket closure.
    pub span_rank: usize,
    /// False when the span rank moves under a ×10 change of the cutoff.
    pub rank_stable: bool,
    pub closure_residual: f64,
    pub max_trace: f64,
}

fn vectorize(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

fn devectorize(v: &DVector<f64>, size: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(size, size, v.as_slice())
}

fn project_out(m: &DMatrix<f64>, basis: &[DMatrix<f64>]) -> DMatrix<f64> {
    let mut r = m.clone();
    for b in basis {
        r -= b * frob(b, m);
    }
    r
}

impl HolonomyAlgebra {
    pub fn from_generators(
        size: usize,
        generators: Vec<DMatrix<f64>>,
        tol: RankTol,
        estimator: Estimator,
    ) -> HolonomyAlgebra {
        let vecs: Vec<DVector<f64>> = generators.iter().map(vectorize).collect();
        let (span_rank, rank_stable) = if vecs.is_empty() {
            (0, true)
        } else {
            let a = DMatrix::from_columns(&vecs);
            let (sigma, _) = svd_right(&a.transpose());
            let r = crate::linalg::rank_of(&sigma, tol);
            let lo = crate::linalg::rank_of(&sigma, tol.scaled(0.1));
            let hi = crate::linalg::rank_of(&sigma, tol.scaled(10.0));
            (r, lo == r && hi == r)
        };
        let span = orthonormal_span(&vecs, size * size, tol);
        let mut basis: Vec<DMatrix<f64>> =
            span.column_iter().map(|c| devectorize(&c.into_owned(), size)).collect();
        let limit = size * size;
        loop {
            let mut added = false;
            let current = basis.clone();
            'outer: for i in 0..current.len() {
                for j in (i + 1)..current.len() {
                    let c = &current[i] * &current[j] - &current[j] * &current[i];
                    let r = project_out(&c, &basis);
                    let norm = r.norm();
                    if norm > tol.cutoff(1.0) {
                        // re-orthogonalize once more for stability
                        let r = project_out(&r, &basis);
                        let nr = r.norm();
                        if nr > tol.cutoff(1.0) {
                            basis.push(r / nr);
                            added = true;
                            if basis.len() >= limit {
                                break 'outer;
                            }
                        }
                    }
                }
            }
            if !added || basis.len() >= limit {
                break;
            }
        }
        let mut alg = HolonomyAlgebra {
            size,
            generators,
            basis,
            tol,
            estimator,
            span_rank,
            rank_stable,
            closure_residual: 0.0,
            max_trace: 0.0,
        };
        alg.closure_residual = alg.bracket_residual();
        alg.max_trace = alg.basis.iter().map(|b| b.trace().abs()).fold(0.0, f64::max);
        alg
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    /// Max Frobenius norm of the part of [b_i, b_j] outside the span.
    pub fn bracket_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.basis.len() {
            for j in (i + 1)..self.basis.len() {
                let c = &self.basis[i] * &self.basis[j] - &self.basis[j] * &self.basis[i];
                worst = worst.max(project_out(&c, &self.basis).norm());
            }
        }
        worst
    }

    /// Distance of `m` from the span, relative to `‖m‖`.
    pub fn membership_residual(&self, m: &DMatrix<f64>) -> f64 {
        let norm = m.norm();
        if norm == 0.0 {
            return 0.0;
        }
        project_out(m, &self.basis).norm() / norm
    }

    /// Deterministic generic element `Σ r_i b_i`.
    pub fn generic_element(&self, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = DMatrix::zeros(self.size, self.size);
        for b in &self.basis {
            m += b * rng.gen_range(-1.0..1.0);
        }
        m
    }

    pub fn merged(&self, other: &HolonomyAlgebra, estimator: Estimator) -> HolonomyAlgebra {
        let mut gens = self.basis.clone();
        gens.extend(other.basis.iter().cloned());
        HolonomyAlgebra::from_generators(self.size, gens, self.tol, estimator)
    }
}

/// Span of the tractor curvature and its covariant derivatives up to `max_order` at `p`.
pub fn infinitesimal_algebra(
    c: &ChartModel,
    p: &[f64],
    max_order: usize,
    tol: RankTol,
) -> Result<HolonomyAlgebra> {
    if max_order > 3 {
        return Err(Error::Precondition("max_order must be at most 3".into()));
    }
    let jc = JetConnection::new(c, p, max_order + 1)?;
    let gens: Vec<DMatrix<f64>> = jc
        .curvature_derivatives(max_order)
        .into_iter()
        .flatten()
        .collect();
    Ok(HolonomyAlgebra::from_generators(
        c.dim() + 1,
        gens,
        tol,
        Estimator::Infinitesimal,
    ))
}

/// Parallelogram loops at `base` with sides `eps·u`, `eps·v` for seeded unit directions.
pub fn loop_family(base: &[f64], eps: f64, count: usize, seed: u64) -> Vec<Path> {
    let n = base.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut planes = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            planes.push((i, j));
        }
    }
    for idx in 0..count {
        let (u, v) = if idx < planes.len() {
            let (i, j) = planes[idx];
            let mut u = vec![0.0; n];
            let mut v = vec![0.0; n];
            u[i] = 1.0;
            v[j] = 1.0;
            (u, v)
        } else {
            let mut r = || -> Vec<f64> {
                let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
                w.iter().map(|x| x / norm).collect()
            };
            (r(), r())
        };
        out.push(parallelogram(base, &u, &v, eps));
    }
    out
}

pub fn parallelogram(base: &[f64], u: &[f64], v: &[f64], eps: f64) -> Path {
    let at = |a: f64, b: f64| -> Vec<f64> {
        base.iter()
            .enumerate()
            .map(|(k, x)| x + eps * (a * u[k] + b * v[k]))
            .collect()
    };
    Path::polyline(&[at(0.0, 0.0), at(1.0, 0.0), at(1.0, 1.0), at(0.0, 1.0), at(0.0, 0.0)])
}

/// Shrink a loop towards its start point.
pub fn shrink(path: &Path, factor: f64) -> Result<Path> {
    let Some(base) = path.start()? else {
        return Ok(path.clone());
    };
    if path.pieces.iter().any(|p| matches!(p, crate::affine::Piece::Curve(_))) {
        return Err(Error::Precondition("only polygonal loops can be shrunk".into()));
    }
    let mut pts = vec![base.clone()];
    for piece in &path.pieces {
        let end = piece.position(piece.range().1)?;
        pts.push(
            base.iter()
                .zip(&end)
                .map(|(b, e)| b + factor * (e - b))
                .collect(),
        );
    }
    Ok(Path::polyline(&pts))
}

/// Loop-sampled algebra, before and after merging with the infinitesimal one.
#[derive(Debug, Clone)]
pub struct LoopAlgebra {
    pub loops_only: HolonomyAlgebra,
    pub merged: HolonomyAlgebra,
    pub shrinks: Vec<usize>,
}

/// Principal logs of loop holonomies; each loop is halved up to 5 times until the log converges.
pub fn loop_algebra(
    c: &ChartModel,
    loops: &[Path],
    infinitesimal: &HolonomyAlgebra,
    cfg: TransportConfig,
) -> Result<LoopAlgebra> {
    let size = c.dim() + 1;
    let mut logs = Vec::with_capacity(loops.len());
    let mut shrinks = Vec::with_capacity(loops.len());
    for l in loops {
        let mut path = l.clone();
        let mut tries = 0;
        loop {
            let h = loop_holonomy(c, &path, cfg)?.matrix;
            if let Some(log) = logm_near_identity(&h) {
                logs.push(log);
                shrinks.push(tries);
                break;
            }
            if tries == 5 {
                return Err(Error::Precondition(
                    "loop holonomy stayed outside the logarithm's range after 5 shrinks".into(),
                ));
            }
            tries += 1;
            path = shrink(&path, 0.5)?;
        }
    }
    let loops_only = HolonomyAlgebra::from_generators(size, logs, infinitesimal.tol, Estimator::Loops);
    let merged = loops_only.merged(infinitesimal, Estimator::Loops);
    Ok(LoopAlgebra {
        loops_only,
        merged,
        shrinks,
    })
}
