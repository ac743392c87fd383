//! Built-in example charts, as expression strings.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::affine::{ChartModel, Domain};
use crate::expr::{parse, Expr};
use crate::Result;

/// Connection data in source form; indices are zero-based `(k, i, j)` for Γ^k_{ij}.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub name: String,
    pub coords: Vec<String>,
    pub gamma: BTreeMap<(usize, usize, usize), String>,
    pub metric: Option<BTreeMap<(usize, usize), String>>,
    pub domain: Domain,
}

impl ChartSpec {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn gamma_exprs(&self) -> Result<Vec<Expr>> {
        let n = self.dim();
        let mut out = vec![Expr::zero(); n * n * n];
        for (&(k, i, j), s) in &self.gamma {
            out[(k * n + i) * n + j] = parse(s, &self.coords)?;
        }
        Ok(out)
    }

    pub fn metric_exprs(&self) -> Result<Option<Vec<Expr>>> {
        let n = self.dim();
        match &self.metric {
            None => Ok(None),
            Some(m) => {
                let mut out = vec![Expr::zero(); n * n];
                for (&(i, j), s) in m {
                    out[i * n + j] = parse(s, &self.coords)?;
                }
                Ok(Some(out))
            }
        }
    }

    pub fn build(&self) -> Result<ChartModel> {
        ChartModel::new(
            &self.name,
            self.coords.clone(),
            self.gamma_exprs()?,
            self.domain.clone(),
            self.metric_exprs()?,
        )
    }
}

fn coords(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

pub fn flat(n: usize) -> ChartSpec {
    ChartSpec {
        name: format!("flat{n}"),
        coords: coords(n),
        gamma: BTreeMap::new(),
        metric: Some((0..n).map(|i| ((i, i), "1".to_string())).collect()),
        domain: Domain::cube(n, 1.0),
    }
}

/// Levi-Civita connection of `4/(1 + s r²)² δ`; s = +1 sphere, s = −1 hyperbolic ball.
fn conformal(n: usize, s: f64, name: &str, half: f64) -> ChartSpec {
    let c = coords(n);
    let r2 = c.iter().map(|x| format!("{x}^2")).collect::<Vec<_>>().join(" + ");
    let (sign, op) = if s > 0.0 { ("-", "+") } else { ("", "-") };
    let factor = format!("{sign}2/(1 {op} ({r2}))");
    let mut gamma = BTreeMap::new();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                // factor * (δ^k_i x_j + δ^k_j x_i − δ_ij x_k)
                let mut terms: Vec<String> = Vec::new();
                let mut coeff: BTreeMap<usize, i32> = BTreeMap::new();
                if k == i {
                    *coeff.entry(j).or_default() += 1;
                }
                if k == j {
                    *coeff.entry(i).or_default() += 1;
                }
                if i == j {
                    *coeff.entry(k).or_default() -= 1;
                }
                for (&v, &a) in &coeff {
                    match a {
                        0 => {}
                        1 => terms.push(c[v].clone()),
                        -1 => terms.push(format!("(-{})", c[v])),
                        a => terms.push(format!("{a}*{}", c[v])),
                    }
                }
                if !terms.is_empty() {
                    gamma.insert((k, i, j), format!("({factor})*({})", terms.join(" + ")));
                }
            }
        }
    }
    let metric = (0..n)
        .map(|i| ((i, i), format!("4/(1 {op} ({r2}))^2")))
        .collect();
    ChartSpec {
        name: name.to_string(),
        coords: c,
        gamma,
        metric: Some(metric),
        domain: Domain::cube(n, half),
    }
}

pub fn sphere(n: usize) -> ChartSpec {
    conformal(n, 1.0, &format!("sphere{n}"), 0.8)
}

pub fn hyperbolic(n: usize) -> ChartSpec {
    conformal(n, -1.0, &format!("hyperbolic{n}"), 0.45)
}

/// Ricci-flat, non-flat, trace-free connection on ℝ³: only Γ^3_{11} = x2.
pub fn ricci_flat3() -> ChartSpec {
    let mut gamma = BTreeMap::new();
    gamma.insert((2, 0, 0), "x2".to_string());
    ChartSpec {
        name: "ricciflat3".into(),
        coords: coords(3),
        gamma,
        metric: None,
        domain: Domain::cube(3, 1.0),
    }
}

/// Symmetric Γ with seeded random polynomial coefficients of degree ≤ `degree`.
pub fn random_polynomial(n: usize, seed: u64, degree: usize) -> ChartSpec {
    let c = coords(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // nondecreasing variable lists, one per monomial of degree ≤ `degree`
    let mut monomials: Vec<Vec<usize>> = vec![vec![]];
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..degree {
        let mut next = Vec::new();
        for m in &layer {
            for v in m.last().copied().unwrap_or(0)..n {
                let mut m2 = m.clone();
                m2.push(v);
                next.push(m2);
            }
        }
        monomials.extend(next.iter().cloned());
        layer = next;
    }
    let mut gamma = BTreeMap::new();
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let terms: Vec<String> = monomials
                    .iter()
                    .map(|m| {
                        let a: f64 = rng.gen_range(-0.5..0.5);
                        let a = (a * 1000.0).round() / 1000.0;
                        let mut t = format!("{a:.3}");
                        for &v in m {
                            t.push('*');
                            t.push_str(&c[v]);
                        }
                        t
                    })
                    .collect();
                let s = terms.join(" + ").replace("+ -", "- ");
                gamma.insert((k, i, j), s.clone());
                if i != j {
                    gamma.insert((k, j, i), s);
                }
            }
        }
    }
    ChartSpec {
        name: format!("random{n}_{seed}"),
        coords: c,
        gamma,
        metric: None,
        domain: Domain::cube(n, 1.0),
    }
}
