//! Labels for detected structures and dimension matches against known holonomy lists.

use serde::Serialize;

use super::{Estimator, HolonomyAlgebra, StructureCandidate, StructureKind};

/// One detected invariant structure and the geometry it corresponds to.
#[derive(Debug, Clone, Serialize)]
pub struct Label {
    pub structure: String,
    pub geometric_structure: String,
    /// True when the correspondence runs both ways.
    pub equivalence: bool,
    /// Number of candidates of this kind.
    pub count: usize,
    /// Smallest invariance residual among them.
    pub residual: f64,
    pub note: Option<String>,
}

/// A listed algebra whose dimension agrees with the estimated rank.
#[derive(Debug, Clone, Serialize)]
pub struct TableMatch {
    pub algebra: String,
    pub representation: String,
    pub dimension: usize,
    pub einstein: bool,
    pub geometric_structure: Option<String>,
    /// The structures the listed algebra preserves were all detected.
    pub structures_detected: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub estimator: Estimator,
    pub rank: usize,
    pub fiber_dim: usize,
    pub trivial: bool,
    pub labels: Vec<Label>,
    pub table_matches: Vec<TableMatch>,
    pub caveat: String,
}

const CAVEAT: &str = "Labels record which invariant structures were found numerically. \
Table matches compare dimensions only; a match is a necessary condition and does not \
identify the algebra.";

fn label_for(kind: StructureKind) -> (&'static str, &'static str, bool) {
    match kind {
        StructureKind::Metric => ("metric", "Einstein manifold", true),
        StructureKind::Symplectic => ("alternating form", "Contact manifold", false),
        StructureKind::Complex => (
            "complex structure",
            "U(1)-bundle over a complex manifold",
            false,
        ),
        StructureKind::Subspace => ("subbundle", "Foliation by Ricci flat leaves", false),
    }
}

#[derive(Clone, Copy)]
struct Needs {
    metric: bool,
    symplectic: bool,
    complex: bool,
}

const NONE: Needs = Needs {
    metric: false,
    symplectic: false,
    complex: false,
};

/// Entries of the Einstein and non-Einstein lists realizable on a fiber of dimension `big_n`.
fn table_entries(
    big_n: usize,
    sig: Option<(usize, usize)>,
) -> Vec<(String, String, usize, bool, Option<&'static str>, Needs)> {
    let n = big_n;
    let mut out = Vec::new();
    let metric = Needs {
        metric: true,
        ..NONE
    };
    let rep = |field: &str| match sig {
        Some((p, q)) => format!("{field}^({p},{q})"),
        None => format!("{field}^{n}"),
    };
    if n >= 5 {
        let (p, q) = sig.unwrap_or((n, 0));
        out.push((format!("so({p},{q})"), rep("R"), n * (n - 1) / 2, true, None, metric));
    }
    if n.is_multiple_of(2) {
        let m = n / 2;
        if m >= 5 {
            out.push((
                format!("so({m},C)"),
                format!("C^{m}"),
                m * (m - 1),
                true,
                None,
                Needs {
                    metric: true,
                    complex: true,
                    ..NONE
                },
            ));
        }
        if m >= 3 {
            out.push((
                format!("su(p,q), p+q={m}"),
                format!("C^{m}"),
                m * m - 1,
                true,
                None,
                Needs {
                    metric: true,
                    complex: true,
                    symplectic: true,
                },
            ));
            out.push((
                format!("sl({m},C)"),
                format!("C^{m}"),
                2 * (m * m - 1),
                false,
                Some("U(1)-bundle over a complex manifold"),
                Needs {
                    complex: true,
                    ..NONE
                },
            ));
        }
        if m >= 2 {
            out.push((
                format!("sp({n},R)"),
                format!("R^{n}"),
                m * (2 * m + 1),
                false,
                Some("Contact manifold"),
                Needs {
                    symplectic: true,
                    ..NONE
                },
            ));
        }
    }
    if n.is_multiple_of(4) {
        let m = n / 4;
        if m >= 2 {
            out.push((
                format!("sp(p,q), p+q={m}"),
                format!("H^{m}"),
                m * (2 * m + 1),
                true,
                None,
                Needs {
                    metric: true,
                    symplectic: true,
                    complex: true,
                },
            ));
            out.push((
                format!("sp({},C)", 2 * m),
                format!("C^{}", 2 * m),
                2 * m * (2 * m + 1),
                false,
                Some("Contact manifold over a complex manifold"),
                Needs {
                    symplectic: true,
                    complex: true,
                    ..NONE
                },
            ));
        }
        if m >= 2 {
            out.push((
                format!("sl({m},H)"),
                format!("H^{m}"),
                4 * m * m - 1,
                false,
                Some("Sp(1,H)-bundle over a quaternionic manifold"),
                Needs {
                    complex: true,
                    ..NONE
                },
            ));
        }
    }
    match n {
        7 => {
            let split = matches!(sig, Some((4, 3)) | Some((3, 4)));
            let name = if split { "g2 (split)" } else { "g2" };
            out.push((name.into(), rep("R"), 14, true, None, metric));
        }
        8 => {
            let split = matches!(sig, Some((4, 4)));
            let name = if split { "spin(4,3)" } else { "spin(7)" };
            out.push((name.into(), rep("R"), 21, true, None, metric));
        }
        14 => out.push((
            "g2(C)".into(),
            "C^7".into(),
            28,
            true,
            None,
            Needs {
                metric: true,
                complex: true,
                ..NONE
            },
        )),
        16 => out.push((
            "spin(7,C)".into(),
            "C^8".into(),
            42,
            true,
            None,
            Needs {
                metric: true,
                complex: true,
                ..NONE
            },
        )),
        _ => {}
    }
    if n >= 3 {
        out.push((
            format!("sl({n},R)"),
            format!("R^{n}"),
            n * n - 1,
            false,
            Some("Generic"),
            NONE,
        ));
    }
    out
}

/// One geometric label per detected structure kind, and dimension matches.
pub fn classify(alg: &HolonomyAlgebra, candidates: &[StructureCandidate]) -> Classification {
    let informative: Vec<&StructureCandidate> = candidates.iter().filter(|c| !c.trivial).collect();
    let mut labels: Vec<Label> = Vec::new();
    for c in candidates {
        let (structure, geo, eq) = label_for(c.kind);
        match labels.iter_mut().find(|l| l.structure == structure) {
            Some(l) => {
                l.count += 1;
                l.residual = l.residual.min(c.residual);
            }
            None => labels.push(Label {
                structure: structure.into(),
                geometric_structure: geo.into(),
                equivalence: eq,
                count: 1,
                residual: c.residual,
                note: c.trivial.then(|| "trivial holonomy, not informative".into()),
            }),
        }
    }
    let has = |k: StructureKind| informative.iter().any(|c| c.kind == k);
    let sig = informative
        .iter()
        .find(|c| c.kind == StructureKind::Metric)
        .and_then(|c| c.signature);
    let table_matches = table_entries(alg.size, sig)
        .into_iter()
        .filter(|e| e.2 == alg.rank())
        .map(|(algebra, representation, dimension, einstein, geo, needs)| TableMatch {
            algebra,
            representation,
            dimension,
            einstein,
            geometric_structure: geo.map(String::from),
            structures_detected: (!needs.metric || has(StructureKind::Metric))
                && (!needs.symplectic || has(StructureKind::Symplectic))
                && (!needs.complex || has(StructureKind::Complex)),
        })
        .collect();
    Classification {
        estimator: alg.estimator,
        rank: alg.rank(),
        fiber_dim: alg.size,
        trivial: alg.is_trivial(),
        labels,
        table_matches,
        caveat: CAVEAT.into(),
    }
}
