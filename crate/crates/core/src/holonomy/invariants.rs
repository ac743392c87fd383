//! Fiber structures preserved by a holonomy algebra.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::HolonomyAlgebra;
use crate::linalg::{fix_signs, max_abs, null_space, orthonormal_span, row_major, signature, RankTol};

const NULL_TOL: RankTol = RankTol::new(1e-7, 1e-10);
const SPAN_TOL: RankTol = RankTol::new(1e-8, 1e-10);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureKind {
    Metric,
    Symplectic,
    Complex,
    Subspace,
}

/// A fiber structure with its invariance residual over the algebra.
#[derive(Debug, Clone, Serialize)]
pub struct StructureCandidate {
    pub kind: StructureKind,
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries (a subspace is given by orthonormal basis columns).
    pub data: Vec<f64>,
    pub residual: f64,
    pub signature: Option<(usize, usize)>,
    /// Dimension of the solution space the candidate was picked from.
    pub nullity: usize,
    pub trivial: bool,
    pub note: Option<String>,
}

impl StructureCandidate {
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

fn elements(alg: &HolonomyAlgebra) -> Vec<DMatrix<f64>> {
    let mut all = alg.basis.clone();
    for g in &alg.generators {
        let norm = g.norm();
        // below the absolute floor a generator is rounding noise, not a direction
        if norm > alg.tol.absolute {
            all.push(g / norm);
        }
    }
    all
}

/// max ‖Aᵀ B + B A‖ over unit-norm algebra elements.
pub fn form_residual(alg: &HolonomyAlgebra, b: &DMatrix<f64>) -> f64 {
    elements(alg)
        .iter()
        .map(|a| max_abs(&(a.transpose() * b + b * a)))
        .fold(0.0, f64::max)
}

/// max ‖[A, J]‖ over unit-norm algebra elements.
pub fn commutator_residual(alg: &HolonomyAlgebra, j: &DMatrix<f64>) -> f64 {
    elements(alg)
        .iter()
        .map(|a| max_abs(&(a * j - j * a)))
        .fold(0.0, f64::max)
}

/// max ‖(I − Π) A Π‖ for the orthonormal basis `q`.
pub fn subspace_residual(alg: &HolonomyAlgebra, q: &DMatrix<f64>) -> f64 {
    let n = q.nrows();
    let pi = q * q.transpose();
    let comp = DMatrix::identity(n, n) - &pi;
    elements(alg)
        .iter()
        .map(|a| max_abs(&(&comp * a * &pi)))
        .fold(0.0, f64::max)
}

fn form_basis(n: usize, symmetric: bool) -> Vec<DMatrix<f64>> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a..n {
            if a == b && !symmetric {
                continue;
            }
            let mut m = DMatrix::zeros(n, n);
            m[(a, b)] = 1.0;
            if symmetric {
                m[(b, a)] = 1.0;
            } else {
                m[(b, a)] = -1.0;
            }
            out.push(m);
        }
    }
    out
}

/// Solutions `B` in the span of `params` of `Aᵀ B + B A = 0`.
fn invariant_forms(alg: &HolonomyAlgebra, params: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
    let n = alg.size;
    let rows = n * n * alg.basis.len();
    let mut l = DMatrix::zeros(rows, params.len());
    for (c, s) in params.iter().enumerate() {
        for (bi, a) in alg.basis.iter().enumerate() {
            let img = a.transpose() * s + s * a;
            for (r, v) in img.iter().enumerate() {
                l[(bi * n * n + r, c)] = *v;
            }
        }
    }
    let ns = null_space(&l, NULL_TOL);
    ns.column_iter()
        .map(|col| {
            let mut m = DMatrix::zeros(n, n);
            for (c, s) in params.iter().enumerate() {
                m += s * col[c];
            }
            m
        })
        .collect()
}

fn generic_combination(sols: &[DMatrix<f64>], seed: u64) -> DMatrix<f64> {
    if sols.len() == 1 {
        return sols[0].clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::zeros(sols[0].nrows(), sols[0].ncols());
    for s in sols {
        m += s * rng.gen_range(-1.0..1.0);
    }
    m
}

fn candidate(kind: StructureKind, m: &DMatrix<f64>) -> StructureCandidate {
    StructureCandidate {
        kind,
        rows: m.nrows(),
        cols: m.ncols(),
        data: row_major(m),
        residual: 0.0,
        signature: None,
        nullity: 0,
        trivial: false,
        note: None,
    }
}

const TRIVIAL_NOTE: &str = "trivial holonomy, not informative";

fn standard_symplectic(n: usize) -> DMatrix<f64> {
    let m = n / 2;
    let mut w = DMatrix::zeros(n, n);
    for i in 0..m {
        w[(i, m + i)] = 1.0;
        w[(m + i, i)] = -1.0;
    }
    w
}

/// Invariant nondegenerate symmetric form, normalized to max entry 1 with positive line entry.
pub fn invariant_metric(alg: &HolonomyAlgebra) -> Option<StructureCandidate> {
    let n = alg.size;
    let sig_tol = RankTol::new(1e-9, 1e-12);
    if alg.is_trivial() {
        let mut c = candidate(StructureKind::Metric, &DMatrix::identity(n, n));
        c.signature = Some((n, 0));
        c.nullity = n * (n + 1) / 2;
        c.trivial = true;
        c.note = Some(TRIVIAL_NOTE.into());
        return Some(c);
    }
    let sols = invariant_forms(alg, &form_basis(n, true));
    if sols.is_empty() {
        return None;
    }
    for seed in 0..8u64 {
        let mut h = generic_combination(&sols, 0x5eed + seed);
        let (p, q, z) = signature(&h, sig_tol);
        if z > 0 {
            if sols.len() == 1 {
                break;
            }
            continue;
        }
        h /= max_abs(&h);
        let line = h[(n - 1, n - 1)];
        let flip = if line.abs() > 1e-9 { line < 0.0 } else { p < q };
        let (p, q) = if flip {
            h = -h;
            (q, p)
        } else {
            (p, q)
        };
        let mut c = candidate(StructureKind::Metric, &h);
        c.residual = form_residual(alg, &h);
        c.signature = Some((p, q));
        c.nullity = sols.len();
        return Some(c);
    }
    None
}

/// Invariant nondegenerate alternating form (fiber dimension must be even).
pub fn invariant_symplectic(alg: &HolonomyAlgebra) -> Option<StructureCandidate> {
    let n = alg.size;
    if n % 2 == 1 {
        return None;
    }
    if alg.is_trivial() {
        let mut c = candidate(StructureKind::Symplectic, &standard_symplectic(n));
        c.nullity = n * (n - 1) / 2;
        c.trivial = true;
        c.note = Some(TRIVIAL_NOTE.into());
        return Some(c);
    }
    let sols = invariant_forms(alg, &form_basis(n, false));
    if sols.is_empty() {
        return None;
    }
    for seed in 0..8u64 {
        let mut w = generic_combination(&sols, 0x5eed + seed);
        let sv = w.singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        if smin <= 1e-8 * smax {
            if sols.len() == 1 {
                break;
            }
            continue;
        }
        w /= max_abs(&w);
        let first = (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .map(|(a, b)| w[(a, b)])
            .find(|x| x.abs() > 1e-9)
            .unwrap_or(1.0);
        if first < 0.0 {
            w = -w;
        }
        let mut c = candidate(StructureKind::Symplectic, &w);
        c.residual = form_residual(alg, &w);
        c.nullity = sols.len();
        return Some(c);
    }
    None
}

/// Newton iteration J ← (J − J⁻¹)/2 towards a square root of −I.
fn sign_iteration(c: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = c.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let scale = max_abs(c).max(1e-300);
    let mut j = c / scale;
    for _ in 0..200 {
        let inv = j.clone().try_inverse()?;
        let next = (&j - &inv) * 0.5;
        let done = max_abs(&(&next - &j)) <= 1e-14 * (1.0 + max_abs(&next));
        j = next;
        if done {
            break;
        }
    }
    if max_abs(&(&j * &j + &id)) <= 1e-9 {
        Some(j)
    } else {
        None
    }
}

/// Invariant complex structure from the commutant of the algebra.
pub fn invariant_complex(alg: &HolonomyAlgebra) -> Option<StructureCandidate> {
    let n = alg.size;
    if n % 2 == 1 {
        return None;
    }
    if alg.is_trivial() {
        let j = standard_symplectic(n);
        let mut c = candidate(StructureKind::Complex, &j);
        c.nullity = n * n;
        c.trivial = true;
        c.note = Some(TRIVIAL_NOTE.into());
        return Some(c);
    }
    let rows = n * n * alg.basis.len();
    let mut l = DMatrix::zeros(rows, n * n);
    for idx in 0..n * n {
        let mut e = DMatrix::zeros(n, n);
        e[(idx / n, idx % n)] = 1.0;
        for (bi, a) in alg.basis.iter().enumerate() {
            let img = a * &e - &e * a;
            for (r, v) in img.iter().enumerate() {
                l[(bi * n * n + r, idx)] = *v;
            }
        }
    }
    let ns = null_space(&l, NULL_TOL);
    let comm: Vec<DMatrix<f64>> = ns
        .column_iter()
        .map(|col| DMatrix::from_row_slice(n, n, col.as_slice()))
        .collect();
    if comm.len() < 2 {
        return None;
    }
    for seed in [0xc0ffee_u64, 0xbeef] {
        let c = generic_combination(&comm, seed);
        if let Some(j) = sign_iteration(&c) {
            let mut cand = candidate(StructureKind::Complex, &j);
            cand.residual = commutator_residual(alg, &j);
            cand.nullity = comm.len();
            cand.note = Some(format!(
                "square residual {:.3e}",
                max_abs(&(&j * &j + DMatrix::identity(n, n)))
            ));
            return Some(cand);
        }
    }
    None
}

fn spin(seed: &[DVector<f64>], ops: &[DMatrix<f64>], n: usize) -> DMatrix<f64> {
    let mut q = orthonormal_span(seed, n, SPAN_TOL);
    loop {
        let mut vecs: Vec<DVector<f64>> = q.column_iter().map(|c| c.into_owned()).collect();
        for a in ops {
            for c in q.column_iter() {
                vecs.push(a * c);
            }
        }
        let next = orthonormal_span(&vecs, n, SPAN_TOL);
        if next.ncols() == q.ncols() || next.ncols() == n {
            return next;
        }
        q = next;
    }
}

fn columns(m: &DMatrix<f64>) -> Vec<DVector<f64>> {
    m.column_iter().map(|c| c.into_owned()).collect()
}

/// Eigen-seed subspaces of one operator: real eigenspaces and real parts of complex pairs.
fn eigen_seeds(a: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
    let n = a.nrows();
    let scale = max_abs(a).max(1e-300);
    let id = DMatrix::<f64>::identity(n, n);
    let tol = RankTol::new(1e-6, 1e-10 * scale);
    let mut out = Vec::new();
    let mut seen: Vec<nalgebra::Complex<f64>> = Vec::new();
    for l in a.complex_eigenvalues().iter() {
        if l.im < -1e-9 * scale || seen.iter().any(|s| (s - l).norm() <= 1e-7 * scale) {
            continue;
        }
        seen.push(*l);
        let m = if l.im.abs() <= 1e-9 * scale {
            a - &id * l.re
        } else {
            let s = a - &id * l.re;
            &s * &s + &id * (l.im * l.im)
        };
        let ns = null_space(&m, tol);
        if ns.ncols() > 0 {
            out.push(ns);
        }
    }
    out
}

fn dedupe_push(list: &mut Vec<DMatrix<f64>>, q: DMatrix<f64>) {
    let n = q.nrows();
    if q.ncols() == 0 || q.ncols() == n {
        return;
    }
    let pi = &q * q.transpose();
    if list
        .iter()
        .any(|o| o.ncols() == q.ncols() && max_abs(&(o * o.transpose() - &pi)) <= 1e-6)
    {
        return;
    }
    list.push(q);
}

/// Invariant subspaces of dimension `k` found by spinning eigen-seeds.
pub fn invariant_subspaces(alg: &HolonomyAlgebra, k: usize) -> Vec<StructureCandidate> {
    let n = alg.size;
    if k == 0 || k >= n {
        return Vec::new();
    }
    if alg.is_trivial() {
        let mut q = DMatrix::zeros(n, k);
        for i in 0..k {
            q[(i, i)] = 1.0;
        }
        let mut c = candidate(StructureKind::Subspace, &q);
        c.trivial = true;
        c.note = Some(format!("{TRIVIAL_NOTE}: every subspace is invariant"));
        return vec![c];
    }
    let ops = alg.basis.clone();
    let ops_t: Vec<DMatrix<f64>> = ops.iter().map(|a| a.transpose()).collect();
    let mut seeds: Vec<DMatrix<f64>> = Vec::new();
    let mut seeds_t: Vec<DMatrix<f64>> = Vec::new();
    for seed in 0..3u64 {
        let a = alg.generic_element(0xa11 + seed);
        seeds.extend(eigen_seeds(&a));
        seeds_t.extend(eigen_seeds(&a.transpose()));
    }
    let stack = |ops: &[DMatrix<f64>]| {
        let mut s = DMatrix::zeros(n * ops.len(), n);
        for (i, a) in ops.iter().enumerate() {
            s.view_mut((i * n, 0), (n, n)).copy_from(a);
        }
        s
    };
    seeds.push(null_space(&stack(&ops), SPAN_TOL));
    seeds_t.push(null_space(&stack(&ops_t), SPAN_TOL));
    let image = |ops: &[DMatrix<f64>]| {
        let cols: Vec<DVector<f64>> = ops.iter().flat_map(columns).collect();
        orthonormal_span(&cols, n, SPAN_TOL)
    };
    seeds.push(image(&ops));
    seeds_t.push(image(&ops_t));

    let mut found: Vec<DMatrix<f64>> = Vec::new();
    for s in &seeds {
        dedupe_push(&mut found, spin(&columns(s), &ops, n));
        for v in columns(s) {
            dedupe_push(&mut found, spin(&[v], &ops, n));
        }
    }
    for s in &seeds_t {
        let mut dual: Vec<DMatrix<f64>> = Vec::new();
        dedupe_push(&mut dual, spin(&columns(s), &ops_t, n));
        for v in columns(s) {
            dedupe_push(&mut dual, spin(&[v], &ops_t, n));
        }
        for u in dual {
            // annihilator of an Aᵀ-invariant subspace is A-invariant
            let ann = null_space(&u.transpose(), SPAN_TOL);
            dedupe_push(&mut found, ann);
        }
    }
    let base = found.clone();
    for i in 0..base.len() {
        for j in (i + 1)..base.len() {
            let mut cols = columns(&base[i]);
            cols.extend(columns(&base[j]));
            dedupe_push(&mut found, orthonormal_span(&cols, n, SPAN_TOL));
        }
    }
    let mut out: Vec<StructureCandidate> = found
        .into_iter()
        .filter(|q| q.ncols() == k)
        .filter_map(|q| {
            let q = canonical_basis(&q);
            let residual = subspace_residual(alg, &q);
            if residual > 1e-7 {
                return None;
            }
            let mut c = candidate(StructureKind::Subspace, &q);
            c.residual = residual;
            Some(c)
        })
        .collect();
    out.sort_by(|a, b| {
        a.data
            .iter()
            .zip(&b.data)
            .map(|(x, y)| y.abs().total_cmp(&x.abs()))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

/// Deterministic orthonormal basis of span(q): reduced echelon form, then Gram-Schmidt.
fn canonical_basis(q: &DMatrix<f64>) -> DMatrix<f64> {
    let n = q.nrows();
    let pi = q * q.transpose();
    // columns of the projector in order, greedily independent
    let mut picked: Vec<DVector<f64>> = Vec::new();
    for c in 0..n {
        let mut v = pi.column(c).into_owned();
        for p in &picked {
            v -= p * p.dot(&v);
        }
        let norm = v.norm();
        if norm > 1e-6 {
            picked.push(v / norm);
        }
        if picked.len() == q.ncols() {
            break;
        }
    }
    fix_signs(DMatrix::from_columns(&picked))
}
