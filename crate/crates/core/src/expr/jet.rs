//! Truncated multivariate Taylor series ("jets").
//!
//! A jet of order `K` in `m` variables stores the coefficients `c_α` of
//! `Σ c_α h^α` for all multi-indices with `|α| <= K`. Products truncate,
//! partial derivatives shift coefficients down and lose one order. Evaluating
//! an [`Expr`](super::Expr) on variable jets yields derivatives of every order
//! up to `K` at once, exact up to rounding.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::Func;
use crate::{Error, Result};

#[derive(Debug)]
pub struct JetBasis {
    nvars: usize,
    order: usize,
    monomials: Vec<Vec<u8>>,
    degree: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    // (lhs, rhs, product) index triples with total degree <= order
    products: Vec<(u32, u32, u32)>,
    // per variable: (source, destination, factor) for d/dx_var
    derivatives: Vec<Vec<(u32, u32, f64)>>,
}

impl JetBasis {
    pub fn new(nvars: usize, order: usize) -> Arc<JetBasis> {
        let mut monomials: Vec<Vec<u8>> = Vec::new();
        for deg in 0..=order {
            let mut current = vec![0u8; nvars];
            enumerate(&mut monomials, &mut current, 0, deg);
        }
        let degree: Vec<usize> = monomials
            .iter()
            .map(|m| m.iter().map(|&e| e as usize).sum())
            .collect();
        let index: HashMap<Vec<u8>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let mut products = Vec::new();
        for (i, a) in monomials.iter().enumerate() {
            for (j, b) in monomials.iter().enumerate() {
                if degree[i] + degree[j] > order {
                    continue;
                }
                let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                products.push((i as u32, j as u32, index[&sum] as u32));
            }
        }
        let mut derivatives = vec![Vec::new(); nvars];
        for (src, m) in monomials.iter().enumerate() {
            for (var, table) in derivatives.iter_mut().enumerate() {
                if m[var] == 0 {
                    continue;
                }
                let mut lowered = m.clone();
                lowered[var] -= 1;
                table.push((src as u32, index[&lowered] as u32, m[var] as f64));
            }
        }
        Arc::new(JetBasis {
            nvars,
            order,
            monomials,
            degree,
            index,
            products,
            derivatives,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn index_of(&self, exponents: &[u8]) -> Option<usize> {
        self.index.get(exponents).copied()
    }

    /// Jets `p_i + h_i` for every coordinate of `point`.
    pub fn variables(self: &Arc<Self>, point: &[f64]) -> Vec<Jet> {
        (0..self.nvars)
            .map(|i| Jet::variable(self, i, point[i]))
            .collect()
    }
}

fn enumerate(out: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, slot: usize, remaining: usize) {
    if slot + 1 == current.len() {
        current[slot] = remaining as u8;
        out.push(current.clone());
        current[slot] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[slot] = e as u8;
        enumerate(out, current, slot + 1, remaining - e);
    }
    current[slot] = 0;
}

#[derive(Debug, Clone)]
pub struct Jet {
    basis: Arc<JetBasis>,
    coeffs: Vec<f64>,
    order: usize,
}

impl Jet {
    pub fn constant(basis: &Arc<JetBasis>, value: f64) -> Jet {
        let mut coeffs = vec![0.0; basis.len()];
        coeffs[0] = value;
        Jet {
            basis: basis.clone(),
            coeffs,
            order: basis.order,
        }
    }

    pub fn zero(basis: &Arc<JetBasis>) -> Jet {
        Jet::constant(basis, 0.0)
    }

    pub fn variable(basis: &Arc<JetBasis>, var: usize, value: f64) -> Jet {
        let mut j = Jet::constant(basis, value);
        if basis.order > 0 {
            let mut e = vec![0u8; basis.nvars];
            e[var] = 1;
            j.coeffs[basis.index[&e]] = 1.0;
        }
        j
    }

    pub fn basis(&self) -> &Arc<JetBasis> {
        &self.basis
    }

    /// Number of derivative orders this jet still carries exactly.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor coefficient for the multi-index `exponents` (derivative / α!).
    pub fn coefficient(&self, exponents: &[u8]) -> Option<f64> {
        let deg: usize = exponents.iter().map(|&e| e as usize).sum();
        if deg > self.order {
            return None;
        }
        self.basis.index_of(exponents).map(|i| self.coeffs[i])
    }

    /// Partial derivative of the given multi-index order, evaluated at the base point.
    pub fn partial(&self, exponents: &[u8]) -> Option<f64> {
        let factorial: f64 = exponents
            .iter()
            .map(|&e| (1..=e as u64).product::<u64>() as f64)
            .product();
        self.coefficient(exponents).map(|c| c * factorial)
    }

    pub fn derivative(&self, var: usize) -> Jet {
        assert!(self.order > 0, "jet has no derivative order left");
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for &(src, dst, f) in &self.basis.derivatives[var] {
            coeffs[dst as usize] += f * self.coeffs[src as usize];
        }
        let order = self.order - 1;
        self.truncated(coeffs, order)
    }

    fn truncated(&self, mut coeffs: Vec<f64>, order: usize) -> Jet {
        for (c, &d) in coeffs.iter_mut().zip(&self.basis.degree) {
            if d > order {
                *c = 0.0;
            }
        }
        Jet {
            basis: self.basis.clone(),
            coeffs,
            order,
        }
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            order: self.order,
        }
    }

    pub fn add_const(&self, c: f64) -> Jet {
        let mut j = self.clone();
        j.coeffs[0] += c;
        j
    }

    pub fn recip(&self) -> Result<Jet> {
        let u0 = self.value();
        if u0 == 0.0 {
            return Err(Error::Domain("division by zero".into()));
        }
        let seq: Vec<f64> = (0..=self.order)
            .map(|m| {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * factorial(m) / u0.powi(m as i32 + 1)
            })
            .collect();
        Ok(self.compose(&seq))
    }

    pub fn powi(&self, k: i32) -> Result<Jet> {
        if k < 0 {
            return self.recip()?.powi(-k);
        }
        let mut result = Jet::constant(&self.basis, 1.0);
        result.order = self.order;
        let mut base = self.clone();
        let mut e = k as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    pub fn apply(&self, f: Func) -> Result<Jet> {
        let u0 = self.value();
        let k = self.order;
        let seq: Vec<f64> = match f {
            Func::Exp => vec![u0.exp(); k + 1],
            Func::Sin | Func::Cos => {
                let (s, c) = u0.sin_cos();
                let cycle = [s, c, -s, -c];
                let start = if f == Func::Sin { 0 } else { 1 };
                (0..=k).map(|m| cycle[(start + m) % 4]).collect()
            }
            Func::Log => {
                if u0 <= 0.0 {
                    return Err(Error::Domain(format!("log of non-positive value {u0}")));
                }
                (0..=k)
                    .map(|m| {
                        if m == 0 {
                            u0.ln()
                        } else {
                            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
                            sign * factorial(m - 1) / u0.powi(m as i32)
                        }
                    })
                    .collect()
            }
            Func::Sqrt => {
                if u0 < 0.0 || (u0 == 0.0 && k > 0) {
                    return Err(Error::Domain(format!("sqrt at non-smooth value {u0}")));
                }
                let mut c = 1.0;
                (0..=k)
                    .map(|m| {
                        if m > 0 {
                            c *= 0.5 - (m as f64 - 1.0);
                        }
                        c * u0.powf(0.5 - m as f64)
                    })
                    .collect()
            }
            Func::Tan => {
                if u0.cos().abs() < 1e-300 {
                    return Err(Error::Domain(format!("tan pole at {u0}")));
                }
                let t = u0.tan();
                // d^m tan = P_m(tan), P_0 = t, P_{m+1} = P_m' (1 + t^2)
                let mut poly = vec![0.0, 1.0];
                let mut out = Vec::with_capacity(k + 1);
                for _ in 0..=k {
                    out.push(poly_eval(&poly, t));
                    poly = poly_mul_one_plus_sq(&poly_deriv(&poly));
                }
                out
            }
            Func::Atan => {
                // d^m atan = R_m(x) / (1+x^2)^m, R_1 = 1,
                // R_{m+1} = R_m' (1+x^2) - 2 m x R_m
                let q = 1.0 + u0 * u0;
                let mut out = vec![u0.atan()];
                let mut poly = vec![1.0];
                for m in 1..=k {
                    out.push(poly_eval(&poly, u0) / q.powi(m as i32));
                    let a = poly_mul_one_plus_sq(&poly_deriv(&poly));
                    let mut b = vec![0.0; poly.len() + 1];
                    for (i, c) in poly.iter().enumerate() {
                        b[i + 1] = 2.0 * m as f64 * c;
                    }
                    poly = poly_sub(&a, &b);
                }
                out
            }
        };
        if !seq[0].is_finite() {
            return Err(Error::Domain(format!("{} is not finite at {u0}", f.name())));
        }
        Ok(self.compose(&seq))
    }

    /// `Σ seq[m]/m! (u - u0)^m` for the univariate derivative sequence `seq`.
    fn compose(&self, seq: &[f64]) -> Jet {
        let delta = self.add_const(-self.value());
        let mut result = Jet::constant(&self.basis, seq[0]);
        result.order = self.order;
        let mut power = Jet::constant(&self.basis, 1.0);
        power.order = self.order;
        for (m, d) in seq.iter().enumerate().skip(1) {
            power = &power * &delta;
            result = &result + &power.scale(d / factorial(m));
        }
        result
    }
}

fn factorial(m: usize) -> f64 {
    (1..=m as u64).map(|x| x as f64).product()
}

fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn poly_deriv(p: &[f64]) -> Vec<f64> {
    if p.len() <= 1 {
        return vec![0.0];
    }
    p.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect()
}

fn poly_mul_one_plus_sq(p: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + 2];
    for (i, c) in p.iter().enumerate() {
        out[i] += c;
        out[i + 2] += c;
    }
    out
}

fn poly_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    out
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        self.truncated(coeffs, order)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        self.truncated(coeffs, order)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut coeffs = vec![0.0; self.coeffs.len()];
        let degree = &self.basis.degree;
        for &(i, j, k) in &self.basis.products {
            let (i, j, k) = (i as usize, j as usize, k as usize);
            if degree[k] > order {
                continue;
            }
            let a = self.coeffs[i];
            if a == 0.0 {
                continue;
            }
            coeffs[k] += a * rhs.coeffs[j];
        }
        Jet {
            basis: self.basis.clone(),
            coeffs,
            order,
        }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}
