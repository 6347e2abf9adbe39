//! The connection cocycle of the spin-space qKZ system: theta-function
//! building blocks, the dynamical matrices `R_cm`, `K_cm`, the cocycle they
//! generate, and numeric extraction of connection matrices from the series
//! basis.
//!
//! Dynamical shifts `S(xi + a h_i)` act column by column: the column of the
//! basis state `v_eps` is taken from `S(xi + a eps_i)`. Backward shifts
//! `S(xi + a h_i)` with the projection after evaluation act row by row.

use crate::error::{QkzError, Result};
use crate::numerics::linalg::{self, c, embed, identity};
use crate::numerics::theta;
use crate::qkz_series::SolutionBasis;
use crate::spin_rep::ParameterSet;
use crate::trig_cocycle::{embed_pair, flip};
use crate::weylc::{eps_from_index, eps_index, minimal_coset_reps, w_epsilon, Root, WeylElement};
use crate::{CMat, C64};

fn one() -> C64 {
    c(1.0, 0.0)
}

fn th(p: &ParameterSet, x: C64) -> Result<C64> {
    theta(x, p.q)
}

fn th2(base: f64, xs: &[C64]) -> Result<C64> {
    xs.iter().try_fold(one(), |acc, &x| Ok(acc * theta(x, base)?))
}

fn nonzero(x: C64, what: &str) -> Result<C64> {
    if x.norm() < 1e-300 {
        Err(QkzError::Pole(what.to_string()))
    } else {
        Ok(x)
    }
}

/// `C(z, xi)`; `C~` is obtained by passing `p.dual()`.
pub fn c_fn(p: &ParameterSet, z: C64, xi: C64) -> Result<C64> {
    let [_, _, _, d] = p.abcd();
    let [at, bt, ct, _] = p.dual().abcd();
    let num = th(p, at * p.qp(xi))? * th(p, bt * p.qp(xi))? * th(p, ct * p.qp(xi))? * th(p, d * p.qp(xi - z) / at)?;
    let den = nonzero(th(p, p.qp(2.0 * xi))? * th(p, d * p.qp(-z))?, "C(z, xi) denominator")?;
    Ok(num / den * p.qp(-(p.zeta + p.upsilon - z) * (p.zeta + p.zeta_p - xi)))
}

pub fn c_dual_fn(p: &ParameterSet, z: C64, xi: C64) -> Result<C64> {
    c_fn(&p.dual(), z, xi)
}

pub fn a_cm(p: &ParameterSet, z: C64, xi: C64) -> Result<C64> {
    let k = p.kappa;
    let num = th(p, p.qp(2.0 * k - xi))? * th(p, p.qp(-z))?;
    let den = nonzero(th(p, p.qp(2.0 * k - z))? * th(p, p.qp(-xi))?, "A_cm denominator")?;
    Ok(num / den * p.qp(2.0 * k * (z - xi)))
}

pub fn b_cm(p: &ParameterSet, z: C64, xi: C64) -> Result<C64> {
    let k = p.kappa;
    let num = th(p, p.qp(2.0 * k))? * th(p, p.qp(-z - xi))?;
    let den = nonzero(th(p, p.qp(-xi))? * th(p, p.qp(2.0 * k - z))?, "B_cm denominator")?;
    Ok(num / den * p.qp((2.0 * k + xi) * z))
}

pub fn alpha_cm(p: &ParameterSet, z: C64, xi: C64) -> Result<C64> {
    let den = nonzero(c_dual_fn(p, xi, -z)?, "alpha_cm denominator")?;
    Ok((c_fn(p, z, xi)? - c_dual_fn(p, xi, z)?) / den)
}

pub fn beta_cm(p: &ParameterSet, z: C64, xi: C64) -> Result<C64> {
    let den = nonzero(c_dual_fn(p, -xi, -z)?, "beta_cm denominator")?;
    Ok(c_fn(p, z, xi)? / den)
}

/// Ice-rule 4x4 matrix with middle block `[[a(xi), b(xi)], [b(-xi), a(-xi)]]`.
pub fn ice_matrix(a: C64, b: C64, b_m: C64, a_m: C64) -> CMat {
    let (o, z) = (one(), c(0.0, 0.0));
    linalg::from_rows(&[&[o, z, z, z], &[z, a, b, z], &[z, b_m, a_m, z], &[z, z, z, o]])
}

pub fn r_cm(p: &ParameterSet, z: C64, xi: C64) -> Result<CMat> {
    Ok(ice_matrix(a_cm(p, z, xi)?, b_cm(p, z, xi)?, b_cm(p, z, -xi)?, a_cm(p, z, -xi)?))
}

pub fn k_cm(p: &ParameterSet, z: C64, xi: C64) -> Result<CMat> {
    Ok(linalg::from_rows(&[
        &[alpha_cm(p, z, xi)?, beta_cm(p, z, xi)?],
        &[beta_cm(p, z, -xi)?, alpha_cm(p, z, -xi)?],
    ]))
}

/// Operator on `(C^2)^{(x) n}` whose column for `v_eps` is the same column of
/// `f(xi + shift(eps))`.
pub fn column_shifted<F, S>(n: usize, xi: C64, shift: S, f: F) -> Result<CMat>
where
    F: Fn(C64) -> Result<CMat>,
    S: Fn(&[i8]) -> C64,
{
    let dim = 1usize << n;
    let mut out = CMat::zeros(dim, dim);
    for col in 0..dim {
        let m = f(xi + shift(&eps_from_index(n, col)))?;
        out.set_column(col, &m.column(col));
    }
    Ok(out)
}

/// Backward shift: the row for `v_eps` is taken from `f(xi + shift(eps))`.
pub fn row_shifted<F, S>(n: usize, xi: C64, shift: S, f: F) -> Result<CMat>
where
    F: Fn(C64) -> Result<CMat>,
    S: Fn(&[i8]) -> C64,
{
    let dim = 1usize << n;
    let mut out = CMat::zeros(dim, dim);
    for row in 0..dim {
        let m = f(xi + shift(&eps_from_index(n, row)))?;
        out.set_row(row, &m.row(row));
    }
    Ok(out)
}

fn weight_sum(eps: &[i8], legs: std::ops::Range<usize>) -> f64 {
    legs.map(|j| eps[j] as f64).sum()
}

/// Residual of the dynamical quantum Yang-Baxter equation on `V^{(x) 3}`.
pub fn dynamical_ybe_residual<R>(r: &R, kappa: C64, z: [C64; 3], xi: C64) -> Result<f64>
where
    R: Fn(C64, C64) -> Result<CMat>,
{
    let op = |a: usize, b: usize, x: C64, leg: Option<usize>, step: C64| -> Result<CMat> {
        column_shifted(3, xi, |e| leg.map_or(c(0.0, 0.0), |l| step * e[l] as f64), |s| Ok(embed_pair(3, a, b, &r(x, s)?)))
    };
    let m2k = -2.0 * kappa;
    let lhs = op(0, 1, z[0] - z[1], Some(2), m2k)? * op(0, 2, z[0] - z[2], None, m2k)? * op(1, 2, z[1] - z[2], Some(0), m2k)?;
    let rhs = op(1, 2, z[1] - z[2], None, m2k)? * op(0, 2, z[0] - z[2], Some(1), m2k)? * op(0, 1, z[0] - z[1], None, m2k)?;
    Ok(linalg::max_abs_diff(&lhs, &rhs) / linalg::max_abs(&lhs).max(1.0))
}

/// `R_21(z, xi) R(-z, xi) - Id`.
pub fn dynamical_unitarity_residual<R>(r: &R, z: C64, xi: C64) -> Result<f64>
where
    R: Fn(C64, C64) -> Result<CMat>,
{
    let f = flip();
    let m = &f * r(z, xi)? * &f * r(-z, xi)?;
    Ok(linalg::max_abs_diff(&m, &identity(4)))
}

/// `K(z, xi) K(-z, xi) - Id`.
pub fn k_unitarity_residual<K>(k: &K, z: C64, xi: C64) -> Result<f64>
where
    K: Fn(C64, C64) -> Result<CMat>,
{
    Ok(linalg::max_abs_diff(&(k(z, xi)? * k(-z, xi)?), &identity(2)))
}

/// `[R, h_1 + h_2]`, zero exactly when the ice rule holds.
pub fn ice_rule_residual(r: &CMat) -> f64 {
    let d = CMat::from_diagonal(&crate::CVec::from_vec(vec![c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0)]));
    linalg::max_abs(&(r * &d - &d * r))
}

/// Residual of the right dynamical reflection equation.
pub fn right_reflection_residual<R, K>(r: &R, k: &K, kappa: C64, z1: C64, z2: C64, xi: C64) -> Result<f64>
where
    R: Fn(C64, C64) -> Result<CMat>,
    K: Fn(C64, C64) -> Result<CMat>,
{
    let f = flip();
    let r12 = |x: C64| r(x, 2.0 * xi);
    let r21 = |x: C64| -> Result<CMat> { Ok(&f * r(x, 2.0 * xi)? * &f) };
    let k1 = column_shifted(2, xi, |e| -kappa * e[1] as f64, |s| Ok(embed(2, 0, &k(z1, s)?)))?;
    let k2 = column_shifted(2, xi, |e| -kappa * e[0] as f64, |s| Ok(embed(2, 1, &k(z2, s)?)))?;
    let lhs = r21(z1 - z2)? * &k1 * r12(z1 + z2)? * &k2;
    let rhs = &k2 * r21(z1 + z2)? * &k1 * r12(z1 - z2)?;
    Ok(linalg::max_abs_diff(&lhs, &rhs) / linalg::max_abs(&lhs).max(1.0))
}

/// Residual of the left dynamical reflection equation.
pub fn left_reflection_residual<R, K>(r: &R, kl: &K, kappa: C64, z1: C64, z2: C64, xi: C64) -> Result<f64>
where
    R: Fn(C64, C64) -> Result<CMat>,
    K: Fn(C64, C64) -> Result<CMat>,
{
    let f = flip();
    let delta = |e: &[i8]| 2.0 * kappa * (e[0] as f64 + e[1] as f64);
    let rr = |x: C64| column_shifted(2, 2.0 * xi, delta, |s| r(x, s));
    let rr21 = |x: C64| column_shifted(2, 2.0 * xi, delta, |s| Ok(&f * r(x, s)? * &f));
    let k1 = column_shifted(2, xi, |e| kappa * e[1] as f64, |s| Ok(embed(2, 0, &kl(z1, s)?)))?;
    let k2 = column_shifted(2, xi, |e| kappa * e[0] as f64, |s| Ok(embed(2, 1, &kl(z2, s)?)))?;
    let lhs = rr(z1 - z2)? * &k1 * rr21(z1 + z2)? * &k2;
    let rhs = &k2 * rr(z1 + z2)? * &k1 * rr21(z1 - z2)?;
    Ok(linalg::max_abs_diff(&lhs, &rhs) / linalg::max_abs(&lhs).max(1.0))
}

/// Generators `M^{s_i}(z, xi)`: `P R(z_i - z_{i+1}, 2 xi - 2k(h_1 + ... + h_{i-1}))`
/// on legs `(i, i+1)` and `K(z_n, xi - k(h_1 + ... + h_{n-1}))` on leg `n`.
pub fn m_generator<R, K>(r: &R, k: &K, kappa: C64, n: usize, i: usize, z: &[C64], xi: C64) -> Result<CMat>
where
    R: Fn(C64, C64) -> Result<CMat>,
    K: Fn(C64, C64) -> Result<CMat>,
{
    if i < n {
        let x = z[i - 1] - z[i];
        column_shifted(n, 2.0 * xi, |e| -2.0 * kappa * weight_sum(e, 0..i - 1), |s| {
            Ok(embed(n, i - 1, &(flip() * r(x, s)?)))
        })
    } else {
        column_shifted(n, xi, |e| -kappa * weight_sum(e, 0..n - 1), |s| Ok(embed(n, n - 1, &k(z[n - 1], s)?)))
    }
}

/// `M^v(z, xi)` along a reduced word via the cocycle law.
pub fn m_cocycle<R, K>(r: &R, k: &K, kappa: C64, v: &WeylElement, z: &[C64], xi: C64) -> Result<CMat>
where
    R: Fn(C64, C64) -> Result<CMat>,
    K: Fn(C64, C64) -> Result<CMat>,
{
    m_cocycle_word(r, k, kappa, v.rank(), &v.reduced_word(), z, xi)
}

pub fn m_cocycle_word<R, K>(r: &R, k: &K, kappa: C64, n: usize, word: &[usize], z: &[C64], xi: C64) -> Result<CMat>
where
    R: Fn(C64, C64) -> Result<CMat>,
    K: Fn(C64, C64) -> Result<CMat>,
{
    let mut out = identity(1 << n);
    let mut prefix = WeylElement::identity(n);
    for &j in word {
        out *= m_generator(r, k, kappa, n, j, &prefix.inverse().act(z), xi)?;
        prefix = prefix.mul(&WeylElement::simple(n, j));
    }
    Ok(out)
}

/// The connection cocycle `M_cm^v(z, xi)` of the spin representation.
pub fn m_cm(p: &ParameterSet, v: &WeylElement, z: &[C64]) -> Result<CMat> {
    m_cocycle(&|x, s| r_cm(p, x, s), &|x, s| k_cm(p, x, s), p.kappa, v, z, p.xi)
}

pub fn m_cm_word(p: &ParameterSet, word: &[usize], z: &[C64]) -> Result<CMat> {
    m_cocycle_word(&|x, s| r_cm(p, x, s), &|x, s| k_cm(p, x, s), p.kappa, p.n, word, z, p.xi)
}

/// A numerically extracted connection matrix with the condition number of
/// the basis matrix it was obtained from.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub matrix: CMat,
    pub cond: f64,
}

/// `Phi(z)^{-1} C^v(z) Phi(v^{-1} z)` in the `{Phi_eps}` basis; entry
/// `(eps, eps')` is the coefficient of `Phi_eps` in `nabla(v) Phi_eps'`, the
/// same indexing as `M_cm^v`.
pub fn extract_connection(basis: &SolutionBasis, v: &WeylElement, z: &[C64], target: &[f64]) -> Result<Extraction> {
    let phi = basis.matrix(z, target)?;
    let cond = linalg::cond(&phi);
    if !cond.is_finite() || cond > 1e12 {
        return Err(QkzError::Singular(format!("basis matrix is ill-conditioned (cond {cond:.3e})")));
    }
    let moved = v.inverse().act(z);
    let rhs = basis.cocycle.value(&v.to_affine(), z)? * basis.matrix(&moved, target)?;
    Ok(Extraction { matrix: linalg::solve(&phi, &rhs)?, cond })
}

/// Distance of the spectral point `gamma` from the resonances
/// `q^{2(beta, gamma)} in q_beta^{2Z}`, measured on the exponent: `(beta, gamma)`
/// against `Z` for long roots and `2(beta, gamma)` against `Z` for short roots.
pub fn resonance_margin(p: &ParameterSet) -> f64 {
    let g = p.gamma();
    crate::weylc::positive_roots(p.n)
        .iter()
        .map(|beta| {
            let x = beta.pair(&g) * if beta.is_long() { 1.0 } else { 2.0 };
            (x - x.re.round()).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Root-dependent data entering `e_alpha` and `p_alpha`.
struct RootData {
    base: f64,
    inv_mu: f64,
    k_a: C64,
    k_2a: C64,
    k_a1: C64,
    abcd: [C64; 4],
    abcd_dual: [C64; 4],
}

fn root_data(p: &ParameterSet, alpha: &Root) -> RootData {
    if alpha.is_long() {
        let k = p.kappa;
        let ps = [p.qp(2.0 * k), c(-1.0, 0.0), p.qp(one() + 2.0 * k), c(-p.q, 0.0)];
        RootData { base: p.q * p.q, inv_mu: 1.0, k_a: k, k_2a: k, k_a1: k, abcd: ps, abcd_dual: ps }
    } else {
        RootData {
            base: p.q,
            inv_mu: 2.0,
            k_a: p.zeta,
            k_2a: p.upsilon,
            k_a1: p.zeta_p,
            abcd: p.abcd(),
            abcd_dual: p.dual().abcd(),
        }
    }
}

fn e_generic(p: &ParameterSet, rd: &RootData, dual: bool, x: C64, y: C64) -> Result<C64> {
    let (first, second, d_own, ps) = if dual {
        (rd.k_a + rd.k_a1, rd.k_a + rd.k_2a, rd.abcd_dual[3], rd.abcd)
    } else {
        (rd.k_a + rd.k_2a, rd.k_a + rd.k_a1, rd.abcd[3], rd.abcd_dual)
    };
    let qy = p.qp(y);
    let num = th2(rd.base, &[ps[0] * qy, ps[1] * qy, ps[2] * qy, d_own * p.qp(y - x) / ps[0]])?;
    let den = nonzero(th2(rd.base, &[p.qp(2.0 * y), d_own * p.qp(-x)])?, "e_alpha denominator")?;
    Ok(p.qp(-0.5 * rd.inv_mu * (first - x) * (second - y)) * num / den)
}

/// `e_alpha(x, y)`.
pub fn e_fn(p: &ParameterSet, alpha: &Root, x: C64, y: C64) -> Result<C64> {
    e_generic(p, &root_data(p, alpha), false, x, y)
}

/// The dual `e~_alpha(x, y)`.
pub fn e_dual_fn(p: &ParameterSet, alpha: &Root, x: C64, y: C64) -> Result<C64> {
    e_generic(p, &root_data(p, alpha), true, x, y)
}

fn p_generic(p: &ParameterSet, rd: &RootData, dual: bool, x: C64) -> Result<C64> {
    let (ps, k1) = if dual { (rd.abcd_dual, rd.k_2a) } else { (rd.abcd, rd.k_a1) };
    let qx = p.qp(x);
    let num = th2(rd.base, &[ps[0] * qx, ps[1] * qx, ps[2] * qx, ps[3] * qx])?;
    let den = nonzero(th2(rd.base, &[p.qp(2.0 * x)])?, "p_alpha denominator")?;
    Ok(num / den * p.qp(rd.inv_mu * (rd.k_a + k1) * x))
}

/// `p_alpha(x)`.
pub fn p_fn(p: &ParameterSet, alpha: &Root, x: C64) -> Result<C64> {
    p_generic(p, &root_data(p, alpha), false, x)
}

/// The dual `p~_alpha(x)`; its exponent uses `kappa~_alpha + kappa~_{alpha^(1)}`,
/// where the dual of `zeta'` is `upsilon`.
pub fn p_dual_fn(p: &ParameterSet, alpha: &Root, x: C64) -> Result<C64> {
    p_generic(p, &root_data(p, alpha), true, x)
}

/// Diagonal and off-diagonal connection coefficients `n^{s_i}` at a generic
/// pairing `y = (alpha_i, tau_2 xi)`.
pub fn n_coeffs(p: &ParameterSet, i: usize, x: C64, y: C64) -> Result<(C64, C64)> {
    let a = Root::simple(p.n, i);
    let den = nonzero(e_dual_fn(p, &a, y, -x)?, "connection coefficient denominator")?;
    let diag = (e_fn(p, &a, x, y)? - e_dual_fn(p, &a, y, x)?) / den;
    let off = e_fn(p, &a, x, -y)? / den;
    Ok((diag, off))
}

/// `(m_{tau2,tau2}, m_{s_i tau2, tau2})` for `tau2` a minimal coset
/// representative of `W_0 / S_n`; `(1, 0)` when `s_i tau2` is not one.
pub fn connection_coeffs_general(p: &ParameterSet, i: usize, tau2: &WeylElement, z: &[C64]) -> Result<(C64, C64)> {
    let n = p.n;
    let reps = minimal_coset_reps(n, &(1..n).collect::<Vec<_>>());
    let moved = WeylElement::simple(n, i).mul(tau2);
    if !reps.contains(&moved) {
        return Ok((one(), c(0.0, 0.0)));
    }
    let a = Root::simple(n, i);
    n_coeffs(p, i, a.pair(z), a.pair(&tau2.act(&p.gamma())))
}

/// `M_cm^{s_i}` assembled column by column from the general coefficients.
pub fn m_cm_from_coefficients(p: &ParameterSet, i: usize, z: &[C64]) -> Result<CMat> {
    let n = p.n;
    let dim = 1usize << n;
    let mut out = CMat::zeros(dim, dim);
    let reps: Vec<(Vec<i8>, WeylElement)> = crate::weylc::all_eps(n).into_iter().map(|e| {
        let w = w_epsilon(&e);
        (e, w)
    }).collect();
    for (eps, w) in &reps {
        let col = eps_index(eps);
        let (d, o) = connection_coeffs_general(p, i, w, z)?;
        out[(col, col)] = d;
        let moved = WeylElement::simple(n, i).mul(w);
        if let Some((e2, _)) = reps.iter().find(|(_, w2)| *w2 == moved) {
            out[(eps_index(e2), col)] = o;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> ParameterSet {
        ParameterSet::default_point(2)
    }

    #[test]
    fn trivial_values() {
        let p = p();
        let z = c(0.31, 0.12);
        assert!((a_cm(&p, z, z).unwrap() - one()).norm() < 1e-13);
        assert!(b_cm(&p, z, -z).unwrap().norm() < 1e-13);
    }

    #[test]
    fn c_fn_is_one_periodic() {
        let p = p();
        let (z, xi) = (c(0.23, 0.17), c(0.41, -0.08));
        let v = c_fn(&p, z, xi).unwrap();
        assert!((c_fn(&p, z + 1.0, xi).unwrap() - v).norm() < 1e-11 * v.norm());
        assert!((c_fn(&p, z, xi + 1.0).unwrap() - v).norm() < 1e-11 * v.norm());
    }

    #[test]
    fn e_alpha_n_is_c_fn() {
        let p = p();
        let (x, y) = (c(0.23, 0.17), c(0.41, -0.08));
        let a = Root::simple(2, 2);
        assert!((e_fn(&p, &a, x, y).unwrap() - c_fn(&p, x, y).unwrap()).norm() < 1e-12);
        assert!((e_dual_fn(&p, &a, x, y).unwrap() - c_dual_fn(&p, x, y).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn long_root_coefficients_are_a_and_b() {
        let p = p();
        let (x, y) = (c(0.23, 0.17), c(0.41, -0.08));
        let (d, o) = n_coeffs(&p, 1, x, y).unwrap();
        assert!((d - b_cm(&p, x, -y).unwrap()).norm() < 1e-11);
        assert!((o - a_cm(&p, x, y).unwrap()).norm() < 1e-11);
    }

    #[test]
    fn unitarity_and_ice() {
        let p = p();
        let (z, xi) = (c(0.23, 0.17), c(0.41, -0.08));
        let r = |x, s| r_cm(&p, x, s);
        let k = |x, s| k_cm(&p, x, s);
        assert!(dynamical_unitarity_residual(&r, z, xi).unwrap() < 1e-11);
        assert!(k_unitarity_residual(&k, z, xi).unwrap() < 1e-11);
        assert_eq!(ice_rule_residual(&r_cm(&p, z, xi).unwrap()), 0.0);
    }

    #[test]
    fn coefficients_assemble_into_m_cm() {
        for n in [2, 3] {
            let p = ParameterSet::default_point(n);
            let z: Vec<C64> = (0..n).map(|k| c(0.17 + 0.29 * k as f64, 0.11 - 0.07 * k as f64)).collect();
            for i in 1..=n {
                let a = m_cm_from_coefficients(&p, i, &z).unwrap();
                let b = m_cm(&p, &WeylElement::simple(n, i), &z).unwrap();
                assert!(linalg::max_abs_diff(&a, &b) < 1e-10, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn dynamical_ybe_and_reflection() {
        let p = p();
        let r = |x, s| r_cm(&p, x, s);
        let k = |x, s| k_cm(&p, x, s);
        let z = [c(0.23, 0.17), c(-0.31, 0.05), c(0.12, -0.22)];
        let xi = c(0.41, -0.08);
        assert!(dynamical_ybe_residual(&r, p.kappa, z, xi).unwrap() < 1e-11);
        assert!(right_reflection_residual(&r, &k, p.kappa, z[0], z[1], xi).unwrap() < 1e-11);
    }

    #[test]
    fn cocycle_law_and_word_independence() {
        let p = ParameterSet::default_point(2);
        let z = [c(0.23, 0.17), c(-0.31, 0.05)];
        let a = m_cm_word(&p, &[1, 2, 1, 2], &z).unwrap();
        let b = m_cm_word(&p, &[2, 1, 2, 1], &z).unwrap();
        assert!(linalg::max_abs_diff(&a, &b) < 1e-10);
        let u = WeylElement::from_word(2, &[1, 2]);
        let v = WeylElement::from_word(2, &[1]);
        let uv = m_cm(&p, &u.mul(&v), &z).unwrap();
        let law = m_cm(&p, &u, &z).unwrap() * m_cm(&p, &v, &u.inverse().act(&z)).unwrap();
        assert!(linalg::max_abs_diff(&uv, &law) < 1e-10);
        assert!(linalg::max_abs_diff(&m_cm(&p, &WeylElement::identity(2), &z).unwrap(), &identity(4)) == 0.0);
    }

    #[test]
    fn extraction_matches_theta_formulas() {
        let p = ParameterSet::default_point(2).with_q(0.25);
        let basis = SolutionBasis::build(&p, 8).unwrap();
        let target = [-8.0, -4.0];
        let z = [c(-7.863, 0.21), c(-4.093, -0.17)];
        for i in 1..=2 {
            let v = WeylElement::simple(2, i);
            let e = extract_connection(&basis, &v, &z, &target).unwrap();
            let m = m_cm(&p, &v, &z).unwrap();
            assert!(linalg::max_abs_diff(&e.matrix, &m) < 1e-5, "i={i}");
        }
        let e = extract_connection(&basis, &WeylElement::identity(2), &z, &target).unwrap();
        assert!(linalg::max_abs_diff(&e.matrix, &identity(4)) < 1e-8);
    }

    #[test]
    fn extracted_entries_are_periodic() {
        let p = ParameterSet::default_point(2).with_q(0.25);
        let basis = SolutionBasis::build(&p, 8).unwrap();
        let target = [-8.0, -4.0];
        let z = [c(-7.91, 0.13), c(-4.05, -0.22)];
        let v = WeylElement::simple(2, 1);
        let base = extract_connection(&basis, &v, &z, &target).unwrap().matrix;
        for k in 0..2 {
            let mut zs = z;
            zs[k] += 1.0;
            let moved = extract_connection(&basis, &v, &zs, &target).unwrap().matrix;
            assert!(linalg::max_abs_diff(&base, &moved) < 1e-5, "k={k}");
        }
    }

    #[test]
    fn reference_point_is_off_resonance() {
        let p = ParameterSet::default_point(2);
        assert!((resonance_margin(&p) - 0.1).abs() < 1e-12);
        let mut q = p.clone();
        q.xi = c(0.5, 0.0);
        assert!(resonance_margin(&q) < 1e-12);
    }

    #[test]
    fn off_diagonal_coefficient_decouples() {
        let p = ParameterSet::default_point(2);
        for i in 1..=2 {
            let a = Root::simple(2, i);
            for (x, y) in [(c(0.23, 0.17), c(0.41, -0.08)), (c(-0.31, 0.05), c(0.12, 0.21))] {
                let (_, off) = n_coeffs(&p, i, x, y).unwrap();
                let want = p_dual_fn(&p, &a, -y).unwrap() / p_fn(&p, &a, -x).unwrap();
                assert!((off - want).norm() < 1e-11 * want.norm().max(1.0), "i={i}: {off} vs {want}");
            }
        }
    }

    #[test]
    fn diagonal_coefficient_is_one_at_parabolic_point() {
        // The dual pair (kappa~_a, kappa~_{2a}) is (zeta, zeta') for short roots.
        let p = ParameterSet::default_point(2);
        for (i, y0) in [(1usize, 2.0 * p.kappa), (2, p.zeta + p.zeta_p)] {
            for x in [c(0.23, 0.17), c(-0.37, 0.09), c(0.11, -0.26)] {
                let (diag, _) = n_coeffs(&p, i, x, y0).unwrap();
                assert!((diag - one()).norm() < 1e-11, "i={i}: {diag}");
            }
        }
    }
}
