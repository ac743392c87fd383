//! Curvature formulas shared between plain values and jets.
//!
//! Index layouts (row-major, `n` = dimension):
//! - `gamma[(k*n + i)*n + j]` = Γ^k_{ij}
//! - `dgamma[((a*n + k)*n + i)*n + j]` = ∂_a Γ^k_{ij}
//! - `riemann[((h*n + j)*n + k)*n + l]` = R_{hj}{}^k{}_l
//! - `ricci[j*n + l]` = Ric_{jl}

use crate::expr::Jet;

/// The ring operations the curvature formulas need.
pub trait Field: Clone {
    fn zero_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, c: f64) -> Self;
}

impl Field for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
}

impl Field for Jet {
    fn zero_like(&self) -> Self {
        Jet::zero(self.basis())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: f64) -> Self {
        Jet::scale(self, c)
    }
}

/// R_{hj}^k_l = ∂_h Γ^k_{jl} − ∂_j Γ^k_{hl} + Γ^k_{hm} Γ^m_{jl} − Γ^k_{jm} Γ^m_{hl}.
pub fn riemann<T: Field>(n: usize, gamma: &[T], dgamma: &[T]) -> Vec<T> {
    let g = |k: usize, i: usize, j: usize| &gamma[(k * n + i) * n + j];
    let dg = |a: usize, k: usize, i: usize, j: usize| &dgamma[((a * n + k) * n + i) * n + j];
    let zero = gamma[0].zero_like();
    let mut out = vec![zero.clone(); n * n * n * n];
    // only h < j is computed; the (h, j) antisymmetry is then exact
    for h in 0..n {
        for j in (h + 1)..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = dg(h, k, j, l).sub(dg(j, k, h, l));
                    for m in 0..n {
                        v = v
                            .add(&g(k, h, m).mul(g(m, j, l)))
                            .sub(&g(k, j, m).mul(g(m, h, l)));
                    }
                    out[((j * n + h) * n + k) * n + l] = v.scale(-1.0);
                    out[((h * n + j) * n + k) * n + l] = v;
                }
            }
        }
    }
    out
}

/// Ric_{jl} = R_{kj}^k_l.
pub fn ricci<T: Field>(n: usize, riemann: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for l in 0..n {
            let mut v = riemann[0].zero_like();
            for k in 0..n {
                v = v.add(&riemann[((k * n + j) * n + k) * n + l]);
            }
            out.push(v);
        }
    }
    out
}

/// P_{hj} = −(n Ric_{hj} + Ric_{jh}) / (n² − 1).
pub fn rho<T: Field>(n: usize, ricci: &[T]) -> Vec<T> {
    let nf = n as f64;
    let c = -1.0 / (nf * nf - 1.0);
    let mut out = Vec::with_capacity(n * n);
    for h in 0..n {
        for j in 0..n {
            out.push(
                ricci[h * n + j]
                    .scale(nf)
                    .add(&ricci[j * n + h])
                    .scale(c),
            );
        }
    }
    out
}

/// ∂_a R_{hj}^k_l at `[(((a*n + h)*n + j)*n + k)*n + l]`, from Γ, ∂Γ and ∂∂Γ.
///
/// `ddgamma[(((a*n + b)*n + k)*n + i)*n + j]` = ∂_a ∂_b Γ^k_{ij}.
pub fn d_riemann(n: usize, gamma: &[f64], dgamma: &[f64], ddgamma: &[f64]) -> Vec<f64> {
    let g = |k: usize, i: usize, j: usize| gamma[(k * n + i) * n + j];
    let dg = |a: usize, k: usize, i: usize, j: usize| dgamma[((a * n + k) * n + i) * n + j];
    let ddg = |a: usize, b: usize, k: usize, i: usize, j: usize| {
        ddgamma[(((a * n + b) * n + k) * n + i) * n + j]
    };
    let mut out = vec![0.0; n.pow(5)];
    for a in 0..n {
        for h in 0..n {
            for j in (h + 1)..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut v = ddg(a, h, k, j, l) - ddg(a, j, k, h, l);
                        for m in 0..n {
                            v += dg(a, k, h, m) * g(m, j, l) + g(k, h, m) * dg(a, m, j, l)
                                - dg(a, k, j, m) * g(m, h, l)
                                - g(k, j, m) * dg(a, m, h, l);
                        }
                        out[(((a * n + h) * n + j) * n + k) * n + l] = v;
                        out[(((a * n + j) * n + h) * n + k) * n + l] = -v;
                    }
                }
            }
        }
    }
    out
}
