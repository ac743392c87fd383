//! Command stages. Each stage appends a section, verdicts and skip notes to a [`Run`].

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use super::manifest::Loaded;
use super::report::{Matrix, Skipped, Tensor, Tolerances, Verdict};
use crate::affine::{OneFormField, Path};
use crate::expr::parse;
use crate::holonomy::{
    classify, infinitesimal_algebra, invariant_complex, invariant_metric, invariant_subspaces,
    invariant_symplectic, loop_algebra, loop_family, Classification, HolonomyAlgebra, StructureCandidate,
    StructureKind, RANK_TOL,
};
use crate::linalg::{max_abs, max_abs_slice};
use crate::projective::{rho_terms, weyl_traces, Invariants};
use crate::structures::{
    complex_reduction, contact_from_symplectic, einstein_check, einstein_to_tractor_metric, foliation_analysis,
    holonomy_decomposition_check, tractor_metric_to_einstein_verify, FiberStructure, Options, Sampling,
};
use crate::tractor::{
    assembled_curvature, coordinate_matrices, loop_holonomy, splitting_gauge, transport_frame, JetConnection,
    TransportConfig,
};
use crate::{Error, Result};

/// Loops used when a manifest declares none.
const DEFAULT_LOOPS: usize = 2;

/// State shared by the stages of one command on one manifest.
pub struct Run<'a> {
    pub loaded: &'a Loaded,
    pub seed: u64,
    pub sampling: Sampling,
    pub tol: Tolerances,
    pub opts: Options,
    pub sections: BTreeMap<String, Value>,
    pub verdicts: Vec<Verdict>,
    pub skipped: Vec<Skipped>,
    holonomy: Option<HolonomyResult>,
}

struct HolonomyResult {
    algebra: HolonomyAlgebra,
    candidates: Vec<StructureCandidate>,
    classification: Classification,
}

fn section<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report sections serialize")
}

impl<'a> Run<'a> {
    pub fn new(loaded: &'a Loaded, seed: Option<u64>, tol_scale: f64) -> Run<'a> {
        let sampling = loaded.sampling(seed);
        Run {
            loaded,
            seed: sampling.seed,
            sampling,
            tol: Tolerances::new(loaded.manifest.tolerances.clone(), tol_scale),
            opts: Options {
                sampling,
                transport: TransportConfig::default(),
                tol_scale,
            },
            sections: BTreeMap::new(),
            verdicts: Vec::new(),
            skipped: Vec::new(),
            holonomy: None,
        }
    }

    fn skip(&mut self, subject: &str, reason: impl Into<String>) {
        self.skipped.push(Skipped {
            subject: subject.into(),
            reason: reason.into(),
        });
    }

    fn failed_precondition(&mut self, subject: &str, e: &Error) {
        self.verdicts
            .push(Verdict::holds("precondition", subject, false, e.to_string()));
    }

    fn base(&self) -> Vec<f64> {
        self.loaded.chart.domain().center()
    }

    fn points(&self) -> Vec<Vec<f64>> {
        self.sampling.points(&self.loaded.chart)
    }

    /// Declared loops, or a seeded parallelogram family at the base point.
    fn loops(&self) -> Vec<(String, Path)> {
        if !self.loaded.loops.is_empty() {
            return self.loaded.loops.clone();
        }
        let h = self.loaded.manifest.holonomy;
        loop_family(&self.base(), h.loop_size, DEFAULT_LOOPS, self.seed)
            .into_iter()
            .enumerate()
            .map(|(i, p)| (format!("parallelogram{i}"), p))
            .collect()
    }

    /// Ric, P, W and CY at the sample points; identity checks; flatness expectation.
    pub fn compute(&mut self, with_tensors: bool) -> Result<()> {
        #[derive(Serialize)]
        struct PointOut {
            point: Vec<f64>,
            riemann: Tensor,
            ricci: Tensor,
            rho: Tensor,
            weyl: Tensor,
            cotton_york: Tensor,
        }
        #[derive(Serialize)]
        struct ComputeOut {
            points: usize,
            max_weyl: f64,
            max_cotton_york: f64,
            #[serde(skip_serializing_if = "Vec::is_empty")]
            tensors: Vec<PointOut>,
        }
        let loaded = self.loaded;
        let c = &loaded.chart;
        let n = c.dim();
        let invs = self
            .points()
            .par_iter()
            .map(|p| Invariants::at(c, p))
            .collect::<Result<Vec<_>>>()?;
        let mut decomposition = 0.0f64;
        let mut trace = 0.0f64;
        let (mut max_w, mut max_cy) = (0.0f64, 0.0f64);
        for inv in &invs {
            let scale = 1.0 + max_abs_slice(&inv.riemann);
            let rebuilt = inv.weyl.iter().zip(rho_terms(n, &inv.rho)).map(|(w, t)| w + t);
            let d = rebuilt
                .zip(&inv.riemann)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            decomposition = decomposition.max(d / scale);
            let t = weyl_traces(n, &inv.weyl);
            trace = trace.max(t.iter().fold(0.0f64, |m, x| m.max(*x)) / scale);
            max_w = max_w.max(max_abs_slice(&inv.weyl));
            max_cy = max_cy.max(max_abs_slice(&inv.cotton_york));
        }
        let subject = "sample points";
        self.verdicts.push(self.tol.at_most("decomposition", subject, decomposition));
        self.verdicts.push(self.tol.at_most("weyl_trace", subject, trace));
        if let Some(flat) = self.loaded.manifest.expect.as_ref().and_then(|e| e.projectively_flat) {
            let v = max_w.max(max_cy);
            let mut verdict = self.tol.at_most("projectively_flat", subject, v);
            if !flat {
                verdict = Verdict::judged(
                    "projectively_flat",
                    "expected curved",
                    crate::structures::Check::above(v, self.tol.get("projectively_flat")),
                );
            }
            self.verdicts.push(verdict);
        }
        let tensors = if with_tensors {
            invs.into_iter()
                .map(|inv| PointOut {
                    point: inv.point,
                    riemann: Tensor::new(n, 4, inv.riemann),
                    ricci: Tensor::new(n, 2, inv.ricci),
                    rho: Tensor::new(n, 2, inv.rho),
                    weyl: Tensor::new(n, 4, inv.weyl),
                    cotton_york: Tensor::new(n, 3, inv.cotton_york),
                })
                .collect()
        } else {
            Vec::new()
        };
        let out = ComputeOut {
            points: self.sampling.grid + self.sampling.random,
            max_weyl: max_w,
            max_cotton_york: max_cy,
            tensors,
        };
        self.sections.insert("compute".into(), section(&out));
        Ok(())
    }

    /// Seeded random Υ with constant, linear and quadratic terms.
    fn random_change(&self, index: usize) -> Result<OneFormField> {
        let loaded = self.loaded;
        let c = &loaded.chart;
        let n = c.dim();
        let amp = self.loaded.manifest.invariance.amplitude;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9).wrapping_add(index as u64));
        let coords = c.coords();
        let mut draw = || if amp > 0.0 { rng.gen_range(-amp..amp) } else { 0.0 };
        let mut components = Vec::with_capacity(n);
        for _ in 0..n {
            let mut terms = vec![format!("{:e}", draw())];
            for i in 0..n {
                terms.push(format!("{:e}*{}", draw(), coords[i]));
                for j in i..n {
                    terms.push(format!("{:e}*{}*{}", draw(), coords[i], coords[j]));
                }
            }
            components.push(parse(&terms.join(" + "), coords)?);
        }
        Ok(OneFormField { components })
    }

    /// W and tractor transport under seeded projective changes.
    pub fn invariance(&mut self) -> Result<()> {
        #[derive(Serialize)]
        struct ChangeOut {
            index: usize,
            weyl_relative: f64,
            transport: f64,
        }
        let loaded = self.loaded;
        let c = &loaded.chart;
        let spec = self.loaded.manifest.invariance;
        let points: Vec<Vec<f64>> = self.points().into_iter().take(spec.points.max(1)).collect();
        let mut paths = self.loops();
        paths.extend(self.loaded.curves.iter().cloned());
        let cfg = self.opts.transport;
        let before = paths
            .par_iter()
            .map(|(_, p)| transport_frame(c, p, cfg).map(|t| t.matrix))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Vec::new();
        for index in 0..spec.changes {
            let ups = self.random_change(index)?;
            let changed = c.project_change(&ups);
            let mut weyl = 0.0f64;
            for p in &points {
                let w = Invariants::at(c, p)?.weyl;
                let w2 = Invariants::at(&changed, p)?.weyl;
                let d = w.iter().zip(&w2).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                weyl = weyl.max(d / (1.0 + max_abs_slice(&w)));
            }
            let residuals = paths
                .par_iter()
                .zip(before.par_iter())
                .map(|((_, path), u)| -> Result<f64> {
                    let up = transport_frame(&changed, path, cfg)?.matrix;
                    let a = path.start()?.expect("paths are nonempty");
                    let b = path.end()?.expect("paths are nonempty");
                    let ga = splitting_gauge(&ups.eval(&a)?);
                    let gb = splitting_gauge(&ups.eval(&b)?);
                    Ok(max_abs(&(up * ga - gb * u)))
                })
                .collect::<Result<Vec<_>>>()?;
            let transport = residuals.iter().fold(0.0f64, |m, x| m.max(*x));
            let subject = format!("change {index}");
            self.verdicts.push(self.tol.at_most("weyl_invariance", &subject, weyl));
            self.verdicts
                .push(self.tol.at_most("transport_invariance", &subject, transport));
            out.push(ChangeOut {
                index,
                weyl_relative: weyl,
                transport,
            });
        }
        self.sections.insert("invariance".into(), section(&out));
        Ok(())
    }

    /// Frame transport along declared curves and loops.
    pub fn transport(&mut self) -> Result<()> {
        #[derive(Serialize)]
        struct PathOut {
            name: String,
            closed: bool,
            matrix: Matrix,
            det: f64,
            deviation_from_identity: f64,
            steps: usize,
            converged: bool,
        }
        let loaded = self.loaded;
        let c = &loaded.chart;
        let cfg = self.opts.transport;
        let nn = c.dim() + 1;
        let mut jobs: Vec<(String, Path, bool)> = self
            .loaded
            .curves
            .iter()
            .map(|(n, p)| (n.clone(), p.clone(), false))
            .collect();
        jobs.extend(self.loops().into_iter().map(|(n, p)| (n, p, true)));
        let results: Vec<(String, bool, Result<crate::tractor::Transport>)> = jobs
            .par_iter()
            .map(|(name, p, closed)| {
                let t = if *closed {
                    loop_holonomy(c, p, cfg)
                } else {
                    transport_frame(c, p, cfg)
                };
                (name.clone(), *closed, t)
            })
            .collect();
        let flat = self.loaded.manifest.expect.as_ref().and_then(|e| e.projectively_flat) == Some(true);
        let mut out = Vec::new();
        for (name, closed, t) in results {
            let t = match t {
                Ok(t) => t,
                Err(e) => {
                    self.failed_precondition(&name, &e);
                    continue;
                }
            };
            let det = t.matrix.determinant();
            let dev = max_abs(&(&t.matrix - DMatrix::identity(nn, nn)));
            self.verdicts
                .push(self.tol.at_most("transport_det", &name, (det - 1.0).abs()));
            if closed && flat {
                self.verdicts.push(self.tol.at_most("flat_holonomy", &name, dev));
            }
            out.push(PathOut {
                name,
                closed,
                matrix: Matrix::from(&t.matrix),
                det,
                deviation_from_identity: dev,
                steps: t.max_steps,
                converged: t.converged,
            });
        }
        self.sections.insert("transport".into(), section(&out));
        Ok(())
    }

    /// Holonomy algebra at the base point, candidate structures and labels.
    pub fn holonomy(&mut self) -> Result<()> {
        #[derive(Serialize)]
        struct HolonomyOut<'h> {
            base: Vec<f64>,
            estimator: crate::holonomy::Estimator,
            infinitesimal_rank: usize,
            loop_rank: usize,
            rank: usize,
            rank_stable: bool,
            closure_residual: f64,
            loop_shrinks: Vec<usize>,
            basis: Vec<Matrix>,
            candidates: &'h [StructureCandidate],
            classification: &'h Classification,
        }
        let loaded = self.loaded;
        let c = &loaded.chart;
        let spec = self.loaded.manifest.holonomy;
        let base = self.base();
        let inf = infinitesimal_algebra(c, &base, spec.max_order, RANK_TOL)?;
        let loops = loop_family(&base, spec.loop_size, spec.loops, self.seed);
        let la = loop_algebra(c, &loops, &inf, self.opts.transport)?;
        let alg = la.merged;
        let nn = alg.size;
        let mut candidates = Vec::new();
        candidates.extend(invariant_metric(&alg));
        if nn % 2 == 0 {
            candidates.extend(invariant_symplectic(&alg));
            candidates.extend(invariant_complex(&alg));
        }
        for k in 1..nn {
            candidates.extend(invariant_subspaces(&alg, k));
        }
        let classification = classify(&alg, &candidates);
        let closure = alg.bracket_residual();
        self.verdicts.push(self.tol.at_most("bracket_closure", "holonomy", closure));
        if let Some(rank) = self.loaded.manifest.expect.as_ref().and_then(|e| e.holonomy_rank) {
            self.verdicts.push(Verdict::holds(
                "expect.holonomy_rank",
                "holonomy",
                alg.rank() == rank,
                format!("expected {rank}, estimated {}", alg.rank()),
            ));
        }
        let out = HolonomyOut {
            base,
            estimator: alg.estimator,
            infinitesimal_rank: inf.rank(),
            loop_rank: la.loops_only.rank(),
            rank: alg.rank(),
            rank_stable: alg.rank_stable && inf.rank_stable,
            closure_residual: closure,
            loop_shrinks: la.shrinks,
            basis: alg.basis.iter().map(Matrix::from).collect(),
            candidates: &candidates,
            classification: &classification,
        };
        self.sections.insert("holonomy".into(), section(&out));
        self.holonomy = Some(HolonomyResult {
            algebra: alg,
            candidates,
            classification,
        });
        Ok(())
    }

    /// Geometric reports for detected and declared fiber structures.
    pub fn detect(&mut self) -> Result<()> {
        if self.holonomy.is_none() {
            self.holonomy()?;
        }
        let hol = self.holonomy.take().expect("holonomy computed");
        let mut out = BTreeMap::new();
        self.einstein_chain(&hol, &mut out)?;

        if hol.algebra.is_trivial() {
            self.skip(
                "candidates",
                "trivial holonomy: every fiber structure is parallel, so none is checked unless declared",
            );
        } else {
            for (i, cand) in hol.candidates.iter().enumerate() {
                let subject = format!("candidate {i} ({})", kind_name(cand.kind));
                let s = fiber(cand.kind, cand.matrix());
                self.structure_report(&subject, &s, false, false, &mut out)?;
            }
            self.decomposition(&hol.algebra, &mut out)?;
        }

        if let Some(st) = self.loaded.structures.clone() {
            let loaded = self.loaded;
            let c = &loaded.chart;
            let center = self.base();
            let u = if st.base == center {
                DMatrix::identity(c.dim() + 1, c.dim() + 1)
            } else {
                transport_frame(c, &Path::polyline(&[st.base.clone(), center]), self.opts.transport)?.matrix
            };
            let declared = [
                ("h", st.h.map(FiberStructure::Metric)),
                ("omega", st.omega.map(FiberStructure::Symplectic)),
                ("j", st.j.map(FiberStructure::Complex)),
                ("k", st.k.map(FiberStructure::Subspace)),
            ];
            for (name, s) in declared {
                if let Some(s) = s {
                    let subject = format!("declared {name}");
                    self.structure_report(&subject, &s.push(&u), true, st.matching_gauge, &mut out)?;
                }
            }
        }

        if let Some(expect) = self.loaded.manifest.expect.clone() {
            for label in &expect.labels {
                let found = hol
                    .classification
                    .labels
                    .iter()
                    .any(|l| &l.geometric_structure == label);
                self.verdicts.push(Verdict::holds(
                    "expect.label",
                    "detect",
                    found,
                    format!("label `{label}` {}", if found { "reported" } else { "missing" }),
                ));
            }
        }
        self.sections.insert("detect".into(), Value::Object(out.into_iter().collect()));
        self.holonomy = Some(hol);
        Ok(())
    }

    fn einstein_chain(&mut self, hol: &HolonomyResult, out: &mut BTreeMap<String, Value>) -> Result<()> {
        let loaded = self.loaded;
        let c = &loaded.chart;
        let check = einstein_check(c, &self.opts)?;
        out.insert("einstein_check".into(), section(&check));
        if let Some(expected) = self.loaded.manifest.expect.as_ref().and_then(|e| e.einstein) {
            self.verdicts.push(Verdict::holds(
                "expect.einstein",
                "einstein",
                check.accepted == expected,
                format!("expected {expected}, found {}", check.accepted),
            ));
        }
        if !check.accepted {
            self.skip("einstein chain", "Ric is not parallel, symmetric and nondegenerate on the samples");
            return Ok(());
        }
        self.verdicts
            .push(self.tol.rejudge("einstein.nabla_ric", "einstein", check.nabla_ric_norm));
        let m = einstein_to_tractor_metric(c, &self.opts)?;
        let subject = "tractor metric";
        self.verdicts.push(self.tol.rejudge("einstein.parallel", subject, m.parallel_residual));
        self.verdicts.push(self.tol.rejudge("einstein.metric_block", subject, m.metric_block));
        self.verdicts.push(self.tol.rejudge("einstein.mixed_block", subject, m.mixed_block));
        self.verdicts.push(self.tol.rejudge("einstein.line_entry", subject, m.line_entry));
        self.verdicts.push(Verdict::holds(
            "einstein.signature",
            subject,
            m.signature_matches,
            format!(
                "signature {:?}, rule {} gives {:?}",
                m.signature, m.rule, m.expected_signature
            ),
        ));
        if !hol.algebra.is_trivial() {
            if let Some(cand) = hol.candidates.iter().find(|c| c.kind == StructureKind::Metric) {
                let nn = c.dim() + 1;
                let h = DMatrix::from_row_slice(nn, nn, &m.h_base);
                let a = &h / max_abs(&h);
                let b = cand.matrix() / max_abs(&cand.matrix());
                let d = max_abs(&(&a - &b)).min(max_abs(&(&a + &b)));
                self.verdicts.push(self.tol.at_most("einstein.candidate", subject, d));
            }
        }
        out.insert("tractor_metric".into(), section(&m));
        Ok(())
    }

    /// Run the geometric report for one fiber structure at the base point.
    /// Precondition failures fail declared structures and skip detected ones.
    fn structure_report(
        &mut self,
        subject: &str,
        s: &FiberStructure,
        declared: bool,
        matching_gauge: bool,
        out: &mut BTreeMap<String, Value>,
    ) -> Result<()> {
        let loaded = self.loaded;
        let c = &loaded.chart;
        let opts = self.opts;
        let n = c.dim();
        let result: Result<(Value, Vec<Verdict>, bool)> = match s {
            FiberStructure::Metric(h) => tractor_metric_to_einstein_verify(c, h, matching_gauge, &opts).map(|r| {
                let mut v = vec![
                    self.tol.rejudge("converse.invariance", subject, r.invariance),
                    self.tol.rejudge("converse.path", subject, r.path_residual),
                ];
                v.extend(r.consistency.map(|k| self.tol.rejudge("converse.consistency", subject, k)));
                (section(&r), v, r.inconclusive)
            }),
            FiberStructure::Symplectic(w) if n % 2 == 1 => contact_from_symplectic(c, w, &opts).map(|r| {
                let v = vec![
                    self.tol.rejudge("contact.path", subject, r.path_residual),
                    self.tol.rejudge("contact.theta_on_h", subject, r.theta_on_h),
                    self.tol.rejudge("contact.theta_of_reeb", subject, r.theta_of_reeb),
                    self.tol.rejudge("contact.dtheta_vs_omega", subject, r.dtheta_vs_omega),
                    self.tol.rejudge("contact.dtheta_reeb", subject, r.dtheta_reeb),
                    self.tol.rejudge("contact.vtheta_ratio", subject, r.vtheta_ratio),
                    self.tol.rejudge("contact.weyl_in_h", subject, r.weyl_in_h),
                ];
                (section(&r), v, false)
            }),
            FiberStructure::Complex(j) if n % 2 == 1 => complex_reduction(c, j, &opts).map(|r| {
                let v = vec![
                    self.tol.rejudge("complex.path", subject, r.path_residual),
                    self.tol.rejudge("complex.preserves_h", subject, r.preserves_h),
                    self.tol.rejudge("complex.square", subject, r.square_residual),
                    self.tol.rejudge("complex.lie_invariance", subject, r.lie_invariance_residual),
                    self.tol.rejudge("complex.nijenhuis", subject, r.nijenhuis_residual),
                ];
                (section(&r), v, r.inconclusive)
            }),
            FiberStructure::Subspace(k) => foliation_analysis(c, k, &opts).map(|r| {
                let v = vec![
                    self.tol.rejudge("foliation.path", subject, r.path_residual),
                    self.tol.rejudge("foliation.integrability", subject, r.integrability_residual),
                    self.tol.rejudge("foliation.geodesy", subject, r.geodesy_residual),
                    self.tol.rejudge("foliation.preserves_k", subject, r.preserves_k),
                    self.tol.rejudge("foliation.rho", subject, r.rho_residual),
                    self.tol.rejudge("foliation.ricci_on_k", subject, r.ricci_on_k),
                    self.tol.rejudge("foliation.leaf_trace", subject, r.covolume.leaf_trace),
                ];
                (section(&r), v, r.inconclusive)
            }),
            _ => Err(Error::Precondition(format!(
                "symplectic and complex tractor structures need odd n, chart has n = {n}"
            ))),
        };
        match result {
            Ok((value, verdicts, inconclusive)) => {
                out.insert(subject.into(), value);
                if inconclusive {
                    self.skip(subject, "degenerate set exceeds the sampling budget; report kept, verdicts not applied");
                } else {
                    self.verdicts.extend(verdicts);
                }
            }
            Err(e @ (Error::Precondition(_) | Error::Dimension(_))) if !declared => {
                self.skip(subject, e.to_string());
            }
            Err(e) => self.failed_precondition(subject, &e),
        }
        Ok(())
    }

    fn decomposition(&mut self, alg: &HolonomyAlgebra, out: &mut BTreeMap<String, Value>) -> Result<()> {
        let loaded = self.loaded;
        let c = &loaded.chart;
        let r = holonomy_decomposition_check(c, &self.base(), alg, self.tol.scale)?;
        let row = self.tol.rejudge("decomposition.t_star_row", "decomposition", r.t_star_row);
        if row.pass {
            self.verdicts.push(row);
            self.verdicts
                .push(self.tol.rejudge("decomposition.gl_in_affine", "decomposition", r.gl_in_affine));
        } else {
            self.skip("decomposition", "T[μ] is not holonomy invariant in the chart splitting");
        }
        out.insert("decomposition".into(), section(&r));
        Ok(())
    }

    /// Tractor curvature from jets against the assembled (0, W, CY) form.
    pub fn tractor_curvature(&mut self) -> Result<()> {
        #[derive(Serialize)]
        struct CurvatureOut {
            points: usize,
            max_difference: f64,
            max_t_part: f64,
            max_connection_trace: f64,
        }
        let loaded = self.loaded;
        let c = &loaded.chart;
        let n = c.dim();
        let per_point = self
            .points()
            .par_iter()
            .map(|p| -> Result<[f64; 3]> {
                let inv = Invariants::at(c, p)?;
                let jc = JetConnection::new(c, p, 1)?;
                let mut r = [0.0f64; 3];
                for ((a, b), omega) in jc.curvature() {
                    let assembled = assembled_curvature(&inv, a, b);
                    let scale = 1.0 + max_abs(&assembled);
                    r[0] = r[0].max(max_abs(&(&omega - &assembled)) / scale);
                    r[1] = r[1].max(omega.view((0, n), (n, 1)).amax() / scale);
                }
                for m in coordinate_matrices(&c.local_first(p)?) {
                    r[2] = r[2].max(m.trace().abs());
                }
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?;
        let worst = |i: usize| per_point.iter().fold(0.0f64, |m, r| m.max(r[i]));
        let subject = "sample points";
        self.verdicts.push(self.tol.at_most("tractor_curvature", subject, worst(0)));
        self.verdicts.push(self.tol.at_most("tractor_t_part", subject, worst(1)));
        self.verdicts.push(self.tol.at_most("connection_trace", subject, worst(2)));
        let out = CurvatureOut {
            points: per_point.len(),
            max_difference: worst(0),
            max_t_part: worst(1),
            max_connection_trace: worst(2),
        };
        self.sections.insert("tractor_curvature".into(), section(&out));
        Ok(())
    }
}

fn fiber(kind: StructureKind, m: DMatrix<f64>) -> FiberStructure {
    match kind {
        StructureKind::Metric => FiberStructure::Metric(m),
        StructureKind::Symplectic => FiberStructure::Symplectic(m),
        StructureKind::Complex => FiberStructure::Complex(m),
        StructureKind::Subspace => FiberStructure::Subspace(m),
    }
}

fn kind_name(kind: StructureKind) -> &'static str {
    match kind {
        StructureKind::Metric => "metric",
        StructureKind::Symplectic => "symplectic",
        StructureKind::Complex => "complex",
        StructureKind::Subspace => "subspace",
    }
}
