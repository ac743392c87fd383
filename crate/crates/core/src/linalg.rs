//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Relative and absolute thresholds for "numerically zero" singular values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankTol {
    pub relative: f64,
    pub absolute: f64,
}

impl RankTol {
    pub const fn new(relative: f64, absolute: f64) -> Self {
        RankTol { relative, absolute }
    }

    pub fn cutoff(&self, sigma_max: f64) -> f64 {
        (self.relative * sigma_max).max(self.absolute)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        RankTol {
            relative: self.relative * factor,
            absolute: self.absolute * factor,
        }
    }
}

/// Singular values (descending) and the matching right singular vectors as columns.
pub fn svd_right(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let (m, k) = a.shape();
    if k == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let padded = if m < k {
        let mut p = DMatrix::zeros(k, k);
        p.view_mut((0, 0), (m, k)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut v = DMatrix::zeros(k, order.len());
    for (col, &i) in order.iter().enumerate() {
        v.set_column(col, &vt.row(i).transpose());
    }
    (sigma, v)
}

/// Orthonormal basis (columns) of the null space of `a`.
pub fn null_space(a: &DMatrix<f64>, tol: RankTol) -> DMatrix<f64> {
    let k = a.ncols();
    if a.nrows() == 0 {
        return DMatrix::identity(k, k);
    }
    let (sigma, v) = svd_right(a);
    let cutoff = tol.cutoff(sigma.first().copied().unwrap_or(0.0));
    let rank = sigma.iter().filter(|&&s| s > cutoff).count();
    v.columns(rank, k - rank).into_owned()
}

/// Numerical rank of a list of singular values.
pub fn rank_of(sigma: &[f64], tol: RankTol) -> usize {
    let cutoff = tol.cutoff(sigma.iter().copied().fold(0.0, f64::max));
    sigma.iter().filter(|&&s| s > cutoff).count()
}

/// Orthonormal basis of the span of the given vectors (columns of the result).
pub fn orthonormal_span(vectors: &[DVector<f64>], dim: usize, tol: RankTol) -> DMatrix<f64> {
    if vectors.is_empty() {
        return DMatrix::zeros(dim, 0);
    }
    let a = DMatrix::from_columns(vectors);
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = tol.cutoff(sigma_max);
    let mut idx: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cutoff)
        .collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let cols: Vec<DVector<f64>> = idx.iter().map(|&i| u.column(i).into_owned()).collect();
    if cols.is_empty() {
        DMatrix::zeros(dim, 0)
    } else {
        fix_signs(DMatrix::from_columns(&cols))
    }
}

/// Flip column signs so that each column's largest-magnitude entry is positive.
pub fn fix_signs(mut m: DMatrix<f64>) -> DMatrix<f64> {
    for mut col in m.column_iter_mut() {
        let mut best = 0.0f64;
        for &x in col.iter() {
            if x.abs() > best.abs() + 1e-12 {
                best = x;
            }
        }
        if best < 0.0 {
            col.neg_mut();
        }
    }
    m
}

/// Moore-Penrose pseudo-inverse with the given singular-value cutoff.
pub fn pinv(a: &DMatrix<f64>, tol: RankTol) -> DMatrix<f64> {
    let (m, k) = a.shape();
    if m == 0 || k == 0 {
        return DMatrix::zeros(k, m);
    }
    let svd = a.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = tol.cutoff(sigma_max);
    svd.pseudo_inverse(cutoff.max(f64::MIN_POSITIVE))
        .expect("cutoff is non-negative")
}

/// Componentwise max-abs norm.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, &x| a.max(x.abs()))
}

pub fn max_abs_slice(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &x| a.max(x.abs()))
}

/// (positive, negative, zero) eigenvalue counts of a symmetric matrix.
pub fn signature(h: &DMatrix<f64>, tol: RankTol) -> (usize, usize, usize) {
    let sym = (h + h.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let cutoff = tol.cutoff(scale);
    let mut p = 0;
    let mut q = 0;
    let mut z = 0;
    for &l in eig.eigenvalues.iter() {
        if l > cutoff {
            p += 1;
        } else if l < -cutoff {
            q += 1;
        } else {
            z += 1;
        }
    }
    (p, q, z)
}

/// Flatten a square matrix row-major.
pub fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(rows, cols, data)
}

/// Frobenius inner product.
pub fn frob(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.iter().map(|x| x.abs()).sum::<f64>().max(1e-300);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a / 2f64.powi(s);
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..=20 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Principal logarithm by the Mercator series; `None` when `‖H − I‖` is too large.
pub fn logm_near_identity(h: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = h.nrows();
    let x = h - DMatrix::identity(n, n);
    let norm = x.norm();
    if norm >= 0.5 {
        return None;
    }
    let mut power = x.clone();
    let mut sum = x.clone();
    let mut k = 1;
    while power.norm() / (k as f64) > 1e-17 && k < 200 {
        k += 1;
        power = &power * &x;
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        sum += &power * (sign / k as f64);
    }
    Some(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: RankTol = RankTol::new(1e-10, 1e-12);

    #[test]
    fn null_space_of_wide_matrix() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = null_space(&a, TOL);
        assert_eq!(ns.ncols(), 2);
        assert!(max_abs(&(&a * &ns)) < 1e-12);
    }

    #[test]
    fn span_and_rank() {
        let v = vec![
            DVector::from_vec(vec![1.0, 0.0, 0.0]),
            DVector::from_vec(vec![2.0, 0.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0, 0.0]),
        ];
        assert_eq!(orthonormal_span(&v, 3, TOL).ncols(), 2);
        assert_eq!(rank_of(&[3.0, 1.0, 1e-14], TOL), 2);
    }

    #[test]
    fn signature_counts() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, -1.0, 0.0, 3.0]));
        assert_eq!(signature(&h, TOL), (2, 1, 1));
    }

    #[test]
    fn log_inverts_exp() {
        let a = DMatrix::from_row_slice(2, 2, &[0.01, 0.2, -0.1, 0.03]);
        let l = logm_near_identity(&expm(&a)).unwrap();
        assert!(max_abs(&(l - a)) < 1e-14);
    }

    #[test]
    fn pinv_solves_least_squares() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let p = pinv(&a, TOL);
        assert!(max_abs(&(&p * &a - DMatrix::identity(2, 2))) < 1e-12);
    }
}
