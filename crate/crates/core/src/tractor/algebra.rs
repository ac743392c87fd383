//! The algebra bundle of trace-free tractor endomorphisms, split as T ⊕ gl(n) ⊕ T*.

use nalgebra::{DMatrix, DVector, RowDVector};

/// `X + Ψ + ν` with `X ∈ T`, `Ψ ∈ gl(n)`, `ν ∈ T*`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub x: DVector<f64>,
    pub psi: DMatrix<f64>,
    pub nu: RowDVector<f64>,
}

impl AlgebraElement {
    pub fn zero(n: usize) -> Self {
        AlgebraElement {
            x: DVector::zeros(n),
            psi: DMatrix::zeros(n, n),
            nu: RowDVector::zeros(n),
        }
    }

    pub fn vector(x: DVector<f64>) -> Self {
        let n = x.len();
        AlgebraElement {
            x,
            ..Self::zero(n)
        }
    }

    pub fn covector(nu: RowDVector<f64>) -> Self {
        let n = nu.len();
        AlgebraElement {
            nu,
            ..Self::zero(n)
        }
    }

    pub fn endo(psi: DMatrix<f64>) -> Self {
        let n = psi.nrows();
        AlgebraElement {
            psi,
            ..Self::zero(n)
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Trace-free `(n+1)×(n+1)` realization; Ψ acts with weight −trΨ/(n+1) on the line.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        let s = self.psi.trace() / (n as f64 + 1.0);
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&self.psi);
        for k in 0..n {
            m[(k, k)] -= s;
            m[(k, n)] = self.x[k];
            m[(n, k)] = self.nu[k];
        }
        m[(n, n)] = -s;
        m
    }

    /// Inverse of [`AlgebraElement::to_matrix`] on trace-free matrices.
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let n = m.nrows() - 1;
        let d = m[(n, n)];
        let mut psi = m.view((0, 0), (n, n)).into_owned();
        for k in 0..n {
            psi[(k, k)] -= d;
        }
        AlgebraElement {
            x: m.view((0, n), (n, 1)).column(0).into_owned(),
            psi,
            nu: m.view((n, 0), (1, n)).row(0).into_owned(),
        }
    }

    /// Bracket from the rules {Ψ,Π} = ΨΠ − ΠΨ, {Ψ,X} = Ψ(X), {Ψ,ν} = −ν∘Ψ,
    /// {X,ν} = X⊗ν + ν(X) Id, and [T,T] = [T*,T*] = 0.
    pub fn bracket(&self, o: &AlgebraElement) -> AlgebraElement {
        let n = self.dim();
        let id = DMatrix::<f64>::identity(n, n);
        let xn = |x: &DVector<f64>, nu: &RowDVector<f64>| x * nu + id.clone() * (nu * x)[(0, 0)];
        let psi = &self.psi * &o.psi - &o.psi * &self.psi + xn(&self.x, &o.nu) - xn(&o.x, &self.nu);
        let x = &self.psi * &o.x - &o.psi * &self.x;
        let nu = -(&o.nu * &self.psi) + &self.nu * &o.psi;
        AlgebraElement { x, psi, nu }
    }

    pub fn max_abs(&self) -> f64 {
        self.x
            .iter()
            .chain(self.psi.iter())
            .chain(self.nu.iter())
            .fold(0.0, |a, &v| a.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, n: usize) -> AlgebraElement {
        AlgebraElement {
            x: DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0)),
            psi: DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0)),
            nu: RowDVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0)),
        }
    }

    fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        a * b - b * a
    }

    #[test]
    fn vector_covector_bracket() {
        let n = 3;
        let mut e1 = DVector::zeros(n);
        e1[0] = 1.0;
        let mut dx1 = RowDVector::zeros(n);
        dx1[0] = 1.0;
        let b = AlgebraElement::vector(e1.clone()).bracket(&AlgebraElement::covector(dx1.clone()));
        let expect = &e1 * &dx1 + DMatrix::identity(n, n);
        assert_eq!(b.psi, expect);
        assert_eq!(b.x, DVector::zeros(n));
        assert_eq!(b.nu, RowDVector::zeros(n));
    }

    #[test]
    fn abelian_parts() {
        let x = AlgebraElement::vector(DVector::from_vec(vec![1.0, 2.0]));
        let y = AlgebraElement::vector(DVector::from_vec(vec![-3.0, 0.5]));
        assert_eq!(x.bracket(&y).max_abs(), 0.0);
        let a = AlgebraElement::covector(RowDVector::from_vec(vec![1.0, 2.0]));
        let b = AlgebraElement::covector(RowDVector::from_vec(vec![0.0, 7.0]));
        assert_eq!(a.bracket(&b).max_abs(), 0.0);
    }

    #[test]
    fn bracket_matches_matrix_commutator() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..=4 {
            for _ in 0..50 {
                let a = random(&mut rng, n);
                let b = random(&mut rng, n);
                let lhs = a.bracket(&b).to_matrix();
                let rhs = commutator(&a.to_matrix(), &b.to_matrix());
                assert!(max_abs(&(lhs - rhs)) < 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let (a, b, c) = (random(&mut rng, 3), random(&mut rng, 3), random(&mut rng, 3));
            let j = a.bracket(&b.bracket(&c)).to_matrix()
                + b.bracket(&c.bracket(&a)).to_matrix()
                + c.bracket(&a.bracket(&b)).to_matrix();
            assert!(max_abs(&j) < 1e-10);
        }
    }

    #[test]
    fn matrix_round_trip_is_trace_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random(&mut rng, 3);
        let m = a.to_matrix();
        assert!(m.trace().abs() < 1e-15);
        let back = AlgebraElement::from_matrix(&m);
        assert!(max_abs(&(back.psi - &a.psi)) < 1e-14);
        assert_eq!(back.x, a.x);
        assert_eq!(back.nu, a.nu);
    }
}
