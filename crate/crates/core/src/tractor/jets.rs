//! Tractor connection matrices as Taylor jets, for curvature and its covariant
//! derivatives without finite differences.

use nalgebra::DMatrix;

use crate::affine::{curvature, ChartModel};
use crate::expr::Jet;
use crate::Result;

/// Square matrix of jets, row-major.
#[derive(Debug, Clone)]
struct JetMatrix {
    size: usize,
    e: Vec<Jet>,
}

impl JetMatrix {
    fn value(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.size, self.size, |r, c| self.e[r * self.size + c].value())
    }

    fn derivative(&self, var: usize) -> JetMatrix {
        JetMatrix {
            size: self.size,
            e: self.e.iter().map(|j| j.derivative(var)).collect(),
        }
    }

    fn add(&self, o: &JetMatrix) -> JetMatrix {
        JetMatrix {
            size: self.size,
            e: self.e.iter().zip(&o.e).map(|(a, b)| a + b).collect(),
        }
    }

    fn sub(&self, o: &JetMatrix) -> JetMatrix {
        JetMatrix {
            size: self.size,
            e: self.e.iter().zip(&o.e).map(|(a, b)| a - b).collect(),
        }
    }

    fn mul(&self, o: &JetMatrix) -> JetMatrix {
        let s = self.size;
        let mut e = Vec::with_capacity(s * s);
        for r in 0..s {
            for c in 0..s {
                let mut acc = &self.e[r * s] * &o.e[c];
                for k in 1..s {
                    acc = &acc + &(&self.e[r * s + k] * &o.e[k * s + c]);
                }
                e.push(acc);
            }
        }
        JetMatrix { size: s, e }
    }

    fn commutator(&self, o: &JetMatrix) -> JetMatrix {
        self.mul(o).sub(&o.mul(self))
    }
}

/// Coordinate connection matrices `M_a` as jets at a base point.
#[derive(Debug, Clone)]
pub struct JetConnection {
    n: usize,
    order: usize,
    m: Vec<JetMatrix>,
}

impl JetConnection {
    /// Jets of the `M_a` valid to `order` derivatives (Γ is expanded to `order + 1`).
    pub fn new(c: &ChartModel, p: &[f64], order: usize) -> Result<JetConnection> {
        let n = c.dim();
        let (_, gamma) = c.gamma_jets(p, order + 1)?;
        let mut dgamma = Vec::with_capacity(n.pow(4));
        for a in 0..n {
            for g in &gamma {
                dgamma.push(g.derivative(a));
            }
        }
        let riemann = curvature::riemann(n, &gamma, &dgamma);
        let ricci = curvature::ricci(n, &riemann);
        let rho = curvature::rho(n, &ricci);
        let basis = gamma[0].basis().clone();
        let nn = n + 1;
        let zero = Jet::zero(&basis);
        let one = Jet::constant(&basis, 1.0);
        let mut m = Vec::with_capacity(n);
        for a in 0..n {
            let mut e = vec![zero.clone(); nn * nn];
            let mut tr = zero.clone();
            for k in 0..n {
                tr = &tr + &gamma[(k * n + a) * n + k];
            }
            let w = tr.scale(-1.0 / nn as f64);
            for k in 0..n {
                for j in 0..n {
                    e[k * nn + j] = gamma[(k * n + a) * n + j].clone();
                }
                e[k * nn + k] = &e[k * nn + k] + &w;
                e[n * nn + k] = rho[a * n + k].clone();
            }
            e[a * nn + n] = one.clone();
            e[n * nn + n] = w;
            m.push(JetMatrix { size: nn, e });
        }
        Ok(JetConnection { n, order, m })
    }

    /// Jets of the affine connection matrices `(Γ_a)^k_j = Γ^k_{aj}` themselves.
    pub fn affine(c: &ChartModel, p: &[f64], order: usize) -> Result<JetConnection> {
        let n = c.dim();
        let (_, gamma) = c.gamma_jets(p, order + 1)?;
        let m = (0..n)
            .map(|a| {
                let mut e = Vec::with_capacity(n * n);
                for k in 0..n {
                    for j in 0..n {
                        e.push(gamma[(k * n + a) * n + j].clone());
                    }
                }
                JetMatrix { size: n, e }
            })
            .collect();
        Ok(JetConnection { n, order, m })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn matrix(&self, a: usize) -> DMatrix<f64> {
        self.m[a].value()
    }

    fn curvature_jets(&self) -> Vec<((usize, usize), JetMatrix)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                let f = self.m[b]
                    .derivative(a)
                    .sub(&self.m[a].derivative(b))
                    .add(&self.m[a].commutator(&self.m[b]));
                out.push(((a, b), f));
            }
        }
        out
    }

    /// Ω_{ab} = ∂_a M_b − ∂_b M_a + [M_a, M_b] at the base point, for a < b.
    pub fn curvature(&self) -> Vec<((usize, usize), DMatrix<f64>)> {
        self.curvature_jets()
            .into_iter()
            .map(|(ij, f)| (ij, f.value()))
            .collect()
    }

    /// Curvature and iterated covariant derivatives ∇_{c_1} … ∇_{c_m} Ω_{ab}, m ≤ `max_order`,
    /// grouped by derivative order.
    pub fn curvature_derivatives(&self, max_order: usize) -> Vec<Vec<DMatrix<f64>>> {
        assert!(
            max_order < self.order,
            "jets were expanded to order {}, need {}",
            self.order,
            max_order + 1
        );
        let mut layer: Vec<JetMatrix> = self.curvature_jets().into_iter().map(|(_, f)| f).collect();
        let mut out = vec![layer.iter().map(JetMatrix::value).collect::<Vec<_>>()];
        for _ in 0..max_order {
            let mut next = Vec::with_capacity(layer.len() * self.n);
            for f in &layer {
                for c in 0..self.n {
                    next.push(f.derivative(c).add(&self.m[c].commutator(f)));
                }
            }
            out.push(next.iter().map(JetMatrix::value).collect());
            layer = next;
        }
        out
    }
}
