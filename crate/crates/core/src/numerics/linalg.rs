//! Dense complex linear algebra on top of nalgebra (double precision only).

use nalgebra::{DMatrix, DVector};

use crate::error::{QkzError, Result};
use crate::{CMat, CVec, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `m` acting on the legs `leg, leg+1, ...` (0-based) of `(C^2)^{(x) n}`;
/// `m` must be `2^k x 2^k`.
pub fn embed(n: usize, leg: usize, m: &CMat) -> CMat {
    let k = m.nrows().trailing_zeros() as usize;
    assert!(leg + k <= n, "operator does not fit on the requested legs");
    let left = identity(1 << leg);
    let right = identity(1 << (n - leg - k));
    kron(&kron(&left, m), &right)
}

pub fn from_rows(rows: &[&[C64]]) -> CMat {
    let r = rows.len();
    let cols = rows.first().map_or(0, |x| x.len());
    CMat::from_fn(r, cols, |i, j| rows[i][j])
}

/// Largest absolute entry.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_vec(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a - b))
}

/// Singular values in decreasing order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// 2-norm condition number; infinite for a rank-deficient matrix.
pub fn cond(a: &CMat) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Solves the square system `a x = b` by LU.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| QkzError::Singular(format!("LU solve failed (cond {:.3e})", cond(a))))
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    a.clone()
        .try_inverse()
        .ok_or_else(|| QkzError::Singular(format!("matrix not invertible (cond {:.3e})", cond(a))))
}

/// Least-squares solution of an overdetermined system together with the
/// relative consistency residual `|a x - b|_max / max(1, |b|_max)`.
pub fn lstsq(a: &CMat, b: &CVec) -> Result<(CVec, f64)> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = smax * 1e-13 * a.nrows().max(a.ncols()) as f64;
    if svd.singular_values.iter().any(|&s| s <= eps) {
        return Err(QkzError::Singular(format!("rank-deficient least squares (cond {:.3e})", cond(a))));
    }
    let x = svd.solve(b, eps).map_err(|e| QkzError::Singular(e.to_string()))?;
    let r = max_abs_vec(&(a * &x - b)) / max_abs_vec(b).max(1.0);
    Ok((x, r))
}

/// Orthonormal basis of the numerical kernel: right singular vectors whose
/// singular value is below `rel_tol * s_max`.
pub fn nullspace(a: &CMat, rel_tol: f64) -> Vec<CVec> {
    let ncols = a.ncols();
    // pad to a tall matrix so the thin SVD returns a full set of right vectors
    let tall = if a.nrows() < ncols {
        let mut t = CMat::zeros(ncols, ncols);
        t.view_mut((0, 0), (a.nrows(), ncols)).copy_from(a);
        t
    } else {
        a.clone()
    };
    let svd = tall.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= rel_tol * smax.max(1e-300))
        .map(|(k, _)| v_t.row(k).adjoint())
        .collect()
}

/// The right singular vector of the smallest singular value, with the ratio
/// `s_min / s_next` measuring how cleanly one-dimensional the kernel is.
pub fn smallest_singular_vector(a: &CMat) -> (CVec, f64) {
    let ncols = a.ncols();
    let tall = if a.nrows() < ncols {
        let mut t = CMat::zeros(ncols, ncols);
        t.view_mut((0, 0), (a.nrows(), ncols)).copy_from(a);
        t
    } else {
        a.clone()
    };
    let svd = tall.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let lo = svd.singular_values[order[0]];
    let next = order.get(1).map_or(f64::INFINITY, |&k| svd.singular_values[k]);
    (v_t.row(order[0]).adjoint(), lo / next)
}

pub fn vstack(blocks: &[CMat]) -> CMat {
    let cols = blocks[0].ncols();
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), (b.nrows(), cols)).copy_from(b);
        r += b.nrows();
    }
    out
}

pub fn vcat(blocks: &[CVec]) -> CVec {
    let data: Vec<C64> = blocks.iter().flat_map(|b| b.iter().copied()).collect();
    DVector::from_vec(data)
}

pub fn column_stack(cols: &[CVec]) -> CMat {
    let n = cols[0].len();
    DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_places_operator_on_requested_leg() {
        let x = from_rows(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]]);
        let m = embed(3, 1, &x);
        // flipping the middle bit maps |000> to |010>
        assert_eq!(m[(2, 0)], c(1.0, 0.0));
        assert_eq!(m.nrows(), 8);
    }

    #[test]
    fn lstsq_consistent_system() {
        let a = from_rows(&[&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(2.0, 0.0)], &[c(1.0, 0.0), c(1.0, 0.0)]]);
        let b = DVector::from_vec(vec![c(1.0, 0.0), c(4.0, 0.0), c(3.0, 0.0)]);
        let (x, r) = lstsq(&a, &b).unwrap();
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-12 && (x[1] - c(2.0, 0.0)).norm() < 1e-12);
        assert!(r < 1e-12);
    }

    #[test]
    fn kernel_of_rank_one() {
        let a = from_rows(&[&[c(1.0, 0.0), c(1.0, 0.0)], &[c(2.0, 0.0), c(2.0, 0.0)]]);
        let k = nullspace(&a, 1e-10);
        assert_eq!(k.len(), 1);
        assert!(max_abs_vec(&(&a * &k[0])) < 1e-12);
        let (v, ratio) = smallest_singular_vector(&a);
        assert!(max_abs_vec(&(&a * &v)) < 1e-12 && ratio < 1e-12);
    }
}
