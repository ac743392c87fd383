//! JSON manifests: a chart, where to sample it, curves and fiber structures.

use std::collections::BTreeMap;
use std::path::Path as FsPath;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::affine::{ChartModel, Curve, Domain, Path};
use crate::catalog::ChartSpec;
use crate::expr::{parse, Expr};
use crate::structures::Sampling;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub schema_version: u32,
    pub name: String,
    pub dimension: usize,
    pub coordinates: Vec<String>,
    /// Sparse Γ^k_{ij}: key "k,i,j" with 1-based indices, value an expression.
    #[serde(default)]
    pub gamma: BTreeMap<String, String>,
    /// Sparse g_{ij}, key "i,j"; a missing mirror entry is filled by symmetry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<BTreeMap<String, String>>,
    /// Replace Γ by its torsion-free part instead of rejecting it.
    #[serde(default)]
    pub symmetrize: bool,
    pub domain: DomainSpec,
    #[serde(default)]
    pub sampling: SamplingSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<CurveSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub loops: Vec<CurveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structures: Option<StructuresSpec>,
    #[serde(default)]
    pub holonomy: HolonomySpec,
    #[serde(default)]
    pub invariance: InvarianceSpec,
    /// Replacement tolerances keyed by verdict name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expect>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingSpec {
    /// Halton points.
    pub grid: usize,
    /// Seeded uniform points.
    pub random: usize,
    pub seed: u64,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        let s = Sampling::default();
        SamplingSpec {
            grid: s.grid,
            random: s.random,
            seed: s.seed,
        }
    }
}

/// Either `x` (expressions in `t` over `t`-range `t`) or a `points` polyline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
}

/// Parallel fiber structures at `base`, as (n+1)×(n+1) matrices in the chart splitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructuresSpec {
    pub base: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<Vec<f64>>>,
    /// The chart's splitting is the Einstein scale of `h`.
    #[serde(default)]
    pub matching_gauge: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<Vec<Vec<f64>>>,
    /// Basis vectors (each of length n+1) of a parallel subbundle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HolonomySpec {
    /// Highest covariant derivative of curvature in the infinitesimal estimate (0..=3).
    pub max_order: usize,
    /// Seeded parallelogram loops at the base point.
    pub loops: usize,
    pub loop_size: f64,
}

impl Default for HolonomySpec {
    fn default() -> Self {
        HolonomySpec {
            max_order: 2,
            loops: 6,
            loop_size: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InvarianceSpec {
    /// Number of seeded random Υ.
    pub changes: usize,
    /// Sample points per change (a prefix of the sampling set).
    pub points: usize,
    /// Size of the Υ coefficients.
    pub amplitude: f64,
}

impl Default for InvarianceSpec {
    fn default() -> Self {
        InvarianceSpec {
            changes: 5,
            points: 10,
            amplitude: 0.3,
        }
    }
}

/// Assertions checked by `detect` and `verify`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projectively_flat: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub einstein: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holonomy_rank: Option<usize>,
    /// Geometric-structure labels that must be reported.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

/// A manifest with its chart built and its curves and structures parsed.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub manifest: Manifest,
    pub chart: ChartModel,
    pub curves: Vec<(String, Path)>,
    pub loops: Vec<(String, Path)>,
    pub structures: Option<Structures>,
}

#[derive(Debug, Clone)]
pub struct Structures {
    pub base: Vec<f64>,
    pub h: Option<DMatrix<f64>>,
    pub matching_gauge: bool,
    pub omega: Option<DMatrix<f64>>,
    pub j: Option<DMatrix<f64>>,
    /// Basis vectors as columns.
    pub k: Option<DMatrix<f64>>,
}

impl Loaded {
    pub fn sampling(&self, seed: Option<u64>) -> Sampling {
        let s = self.manifest.sampling;
        Sampling {
            grid: s.grid,
            random: s.random,
            seed: seed.unwrap_or(s.seed),
        }
    }
}

/// Read, parse and validate a manifest file.
pub fn load(path: &FsPath) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_str(&text)
}

pub fn load_str(text: &str) -> Result<Loaded> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let manifest: Manifest = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::manifest(if path == "." { String::new() } else { path }, e.into_inner().to_string())
    })?;
    validate(manifest)
}

fn expr(s: &str, vars: &[String], field: &str) -> Result<Expr> {
    parse(s, vars).map_err(|e| Error::manifest(field, e.to_string()))
}

fn indices(key: &str, count: usize, n: usize, field: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    if parts.len() != count {
        return Err(Error::manifest(field, format!("expected {count} comma-separated indices")));
    }
    parts
        .iter()
        .map(|p| match p.parse::<usize>() {
            Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
            _ => Err(Error::manifest(field, format!("index `{p}` is not in 1..={n}"))),
        })
        .collect()
}

fn finite(v: &[f64], field: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::manifest(field, "entries must be finite"))
    }
}

fn square(rows: &[Vec<f64>], size: usize, field: &str) -> Result<DMatrix<f64>> {
    if rows.len() != size || rows.iter().any(|r| r.len() != size) {
        return Err(Error::manifest(field, format!("expected a {size}×{size} matrix")));
    }
    let flat: Vec<f64> = rows.concat();
    finite(&flat, field)?;
    Ok(DMatrix::from_row_slice(size, size, &flat))
}

fn curve(spec: &CurveSpec, n: usize, domain: &Domain, field: &str) -> Result<Path> {
    let path = match (&spec.x, &spec.points) {
        (Some(x), None) => {
            if x.len() != n {
                return Err(Error::manifest(format!("{field}.x"), format!("expected {n} expressions")));
            }
            let [t0, t1] = spec.t.unwrap_or([0.0, 1.0]);
            if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
                return Err(Error::manifest(format!("{field}.t"), "need t0 < t1"));
            }
            let t = vec!["t".to_string()];
            let xs = x
                .iter()
                .enumerate()
                .map(|(i, s)| expr(s, &t, &format!("{field}.x[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Path::curve(Curve::new(xs, t0, t1))
        }
        (None, Some(pts)) => {
            if spec.t.is_some() {
                return Err(Error::manifest(format!("{field}.t"), "only curves given by `x` take a range"));
            }
            if pts.len() < 2 {
                return Err(Error::manifest(format!("{field}.points"), "need at least two points"));
            }
            for (i, p) in pts.iter().enumerate() {
                let f = format!("{field}.points[{i}]");
                if p.len() != n {
                    return Err(Error::manifest(f, format!("expected {n} coordinates")));
                }
                finite(p, &f)?;
                if !domain.contains(p) {
                    return Err(Error::manifest(f, "point lies outside the domain"));
                }
            }
            Path::polyline(pts)
        }
        _ => {
            return Err(Error::manifest(field, "give exactly one of `x` or `points`"));
        }
    };
    if let Some(start) = path.start()? {
        if !domain.contains(&start) {
            return Err(Error::manifest(field, "curve starts outside the domain"));
        }
    }
    Ok(path)
}

fn validate(m: Manifest) -> Result<Loaded> {
    if m.schema_version != SCHEMA_VERSION {
        return Err(Error::manifest(
            "schema_version",
            format!("unsupported version {}, expected {SCHEMA_VERSION}", m.schema_version),
        ));
    }
    let n = m.dimension;
    if !(2..=4).contains(&n) {
        return Err(Error::manifest("dimension", "supported dimensions are 2 to 4"));
    }
    if m.coordinates.len() != n {
        return Err(Error::manifest("coordinates", format!("expected {n} names")));
    }
    for (i, c) in m.coordinates.iter().enumerate() {
        let ok = c.chars().next().is_some_and(|ch| ch.is_alphabetic() || ch == '_')
            && c.chars().all(|ch| ch.is_alphanumeric() || ch == '_');
        if !ok || m.coordinates[..i].contains(c) {
            return Err(Error::manifest(format!("coordinates[{i}]"), "names must be distinct identifiers"));
        }
    }
    let f = |field: &str, v: &[f64]| -> Result<()> {
        if v.len() != n {
            return Err(Error::manifest(field, format!("expected {n} entries")));
        }
        finite(v, field)
    };
    f("domain.lo", &m.domain.lo)?;
    f("domain.hi", &m.domain.hi)?;
    let domain = Domain::new(m.domain.lo.clone(), m.domain.hi.clone())
        .map_err(|e| Error::manifest("domain", e.to_string()))?;
    if m.sampling.grid + m.sampling.random == 0 {
        return Err(Error::manifest("sampling", "need at least one sample point"));
    }
    if m.holonomy.max_order > 3 {
        return Err(Error::manifest("holonomy.max_order", "must be at most 3"));
    }
    if !(m.holonomy.loop_size > 0.0 && m.holonomy.loop_size.is_finite()) {
        return Err(Error::manifest("holonomy.loop_size", "must be positive"));
    }
    if !(m.invariance.amplitude >= 0.0 && m.invariance.amplitude.is_finite()) {
        return Err(Error::manifest("invariance.amplitude", "must be nonnegative"));
    }
    for (name, v) in &m.tolerances {
        let field = format!("tolerances.{name}");
        if !super::report::has_tolerance(name) {
            return Err(Error::manifest(field, "unknown verdict name"));
        }
        if !(v.is_finite() && *v >= 0.0) {
            return Err(Error::manifest(field, "must be a nonnegative number"));
        }
    }

    let mut gamma = vec![Expr::zero(); n * n * n];
    for (key, s) in &m.gamma {
        let field = format!("gamma.{key}");
        let ix = indices(key, 3, n, &field)?;
        gamma[(ix[0] * n + ix[1]) * n + ix[2]] = expr(s, &m.coordinates, &field)?;
    }
    let metric = match &m.metric {
        None => None,
        Some(entries) => {
            let mut g: Vec<Option<(Expr, String)>> = vec![None; n * n];
            for (key, s) in entries {
                let field = format!("metric.{key}");
                let ix = indices(key, 2, n, &field)?;
                g[ix[0] * n + ix[1]] = Some((expr(s, &m.coordinates, &field)?, key.clone()));
            }
            let mut out = vec![Expr::zero(); n * n];
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] = match (&g[i * n + j], &g[j * n + i]) {
                        (Some((a, key)), Some((b, _))) => {
                            if a != b {
                                return Err(Error::manifest(
                                    format!("metric.{key}"),
                                    "metric entries must be symmetric",
                                ));
                            }
                            a.clone()
                        }
                        (Some((a, _)), None) | (None, Some((a, _))) => a.clone(),
                        (None, None) => Expr::zero(),
                    };
                }
            }
            Some(out)
        }
    };
    let chart = if m.symmetrize {
        ChartModel::symmetrize(&m.name, m.coordinates.clone(), gamma, domain.clone(), metric)
    } else {
        ChartModel::new(&m.name, m.coordinates.clone(), gamma, domain.clone(), metric)
    }
    .map_err(|e| match e {
        Error::Torsion(msg) => Error::manifest("gamma", format!("connection has torsion: {msg}")),
        e => Error::manifest("gamma", e.to_string()),
    })?;
    // evaluation errors at the samples (poles, log of negatives) are input errors
    for p in domain.sample(m.sampling.grid, m.sampling.random, m.sampling.seed) {
        if let Err(e) = chart.local(&p) {
            return Err(Error::manifest("gamma", format!("at {p:?}: {e}")));
        }
    }

    let mut curves = Vec::new();
    for (i, c) in m.curves.iter().enumerate() {
        curves.push((c.name.clone(), curve(c, n, &domain, &format!("curves[{i}]"))?));
    }
    let mut loops = Vec::new();
    for (i, c) in m.loops.iter().enumerate() {
        let field = format!("loops[{i}]");
        let path = curve(c, n, &domain, &field)?;
        let gap = path.closure_gap()?;
        if gap > 1e-12 {
            return Err(Error::manifest(field, format!("loop is not closed (gap {gap:e})")));
        }
        loops.push((c.name.clone(), path));
    }

    let structures = match &m.structures {
        None => None,
        Some(s) => {
            f("structures.base", &s.base)?;
            if !domain.contains(&s.base) {
                return Err(Error::manifest("structures.base", "base point lies outside the domain"));
            }
            let nn = n + 1;
            let opt = |rows: &Option<Vec<Vec<f64>>>, field: &str| rows.as_ref().map(|r| square(r, nn, field)).transpose();
            let k = match &s.k {
                None => None,
                Some(vs) => {
                    if vs.is_empty() || vs.len() > n || vs.iter().any(|v| v.len() != nn) {
                        return Err(Error::manifest("structures.k", format!("expected 1 to {n} vectors of length {nn}")));
                    }
                    let flat: Vec<f64> = vs.concat();
                    finite(&flat, "structures.k")?;
                    Some(DMatrix::from_column_slice(nn, vs.len(), &flat))
                }
            };
            Some(Structures {
                base: s.base.clone(),
                h: opt(&s.h, "structures.h")?,
                matching_gauge: s.matching_gauge,
                omega: opt(&s.omega, "structures.omega")?,
                j: opt(&s.j, "structures.j")?,
                k,
            })
        }
    };
    Ok(Loaded {
        manifest: m,
        chart,
        curves,
        loops,
        structures,
    })
}

impl Manifest {
    /// A manifest for a built-in chart with default settings.
    pub fn from_chart_spec(spec: &ChartSpec) -> Manifest {
        let key = |ix: &[usize]| ix.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
        Manifest {
            schema_version: SCHEMA_VERSION,
            name: spec.name.clone(),
            dimension: spec.dim(),
            coordinates: spec.coords.clone(),
            gamma: spec.gamma.iter().map(|(&(k, i, j), s)| (key(&[k, i, j]), s.clone())).collect(),
            metric: spec
                .metric
                .as_ref()
                .map(|m| m.iter().map(|(&(i, j), s)| (key(&[i, j]), s.clone())).collect()),
            symmetrize: false,
            domain: DomainSpec {
                lo: spec.domain.lo.clone(),
                hi: spec.domain.hi.clone(),
            },
            sampling: SamplingSpec::default(),
            curves: Vec::new(),
            loops: Vec::new(),
            structures: None,
            holonomy: HolonomySpec::default(),
            invariance: InvarianceSpec::default(),
            tolerances: BTreeMap::new(),
            expect: None,
        }
    }
}
