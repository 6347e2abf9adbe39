//! The minimal principal series `M(gamma)` of the affine Hecke algebra of
//! type `C^vee C_n`, its intertwiners and the parabolic projection onto the
//! spin space, together with the power-series solutions built on it.
//!
//! Vectors are dense over the basis `{v_sigma}`, `sigma` running through
//! `W_0` in the order of [`finite_group`].

use std::collections::HashMap;

use crate::error::{QkzError, Result};
use crate::numerics::linalg::{self, c, identity};
use crate::numerics::qpoch;
use crate::qkz_series::{solve_coefficients, SeriesSolution};
use crate::spin_rep::ParameterSet;
use crate::trig_cocycle::{baxterized_generator, HeckeModule};
use crate::weylc::{all_eps, eps_index, finite_group, positive_roots, w0_word, w_epsilon, Root, WeylElement};
use crate::{CMat, CVec, C64};

fn one() -> C64 {
    c(1.0, 0.0)
}

/// `W_0` with a fixed enumeration.
#[derive(Clone, Debug)]
pub struct W0Basis {
    pub n: usize,
    pub elements: Vec<WeylElement>,
    index: HashMap<WeylElement, usize>,
}

impl W0Basis {
    pub fn new(n: usize) -> Self {
        let elements = finite_group(n);
        let index = elements.iter().cloned().enumerate().map(|(k, w)| (w, k)).collect();
        W0Basis { n, elements, index }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, w: &WeylElement) -> usize {
        self.index[w]
    }

    pub fn unit(&self, w: &WeylElement) -> CVec {
        let mut v = CVec::zeros(self.len());
        v[self.position(w)] = one();
        v
    }
}

/// Sign change of the first coordinate, the finite part of `s_0`.
pub fn first_sign_flip(n: usize) -> WeylElement {
    let mut signs = vec![1i8; n];
    signs[0] = -1;
    WeylElement::new((0..n).collect(), signs)
}

/// `M(gamma)` with its generators precomputed.
#[derive(Clone, Debug)]
pub struct PrincipalSeries {
    pub params: ParameterSet,
    pub gamma: Vec<C64>,
    pub basis: W0Basis,
    t: Vec<CMat>,
    t_inv: Vec<CMat>,
}

impl PrincipalSeries {
    pub fn new(params: ParameterSet, gamma: Vec<C64>) -> Result<Self> {
        params.validate()?;
        let n = params.n;
        if n > 3 {
            return Err(QkzError::InvalidInput(format!("principal series is capped at n = 3, got {n}")));
        }
        let basis = W0Basis::new(n);
        let dim = basis.len();
        let flip0 = first_sign_flip(n);
        let mut t = Vec::with_capacity(n + 1);
        let mut t_inv = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let k = params.kappa_j(j);
            let diag = params.qp(-k) - params.qp(k);
            let mut m = CMat::zeros(dim, dim);
            for (col, sigma) in basis.elements.iter().enumerate() {
                let sinv = sigma.inverse();
                if j == 0 {
                    let target = flip0.mul(sigma);
                    m[(basis.position(&target), col)] += params.qp(sigma.act(&gamma)[0]);
                    if sinv.act_root(&Root::short(n, 0)).is_positive() {
                        m[(col, col)] += diag;
                    }
                } else {
                    let target = WeylElement::simple(n, j).mul(sigma);
                    m[(basis.position(&target), col)] += one();
                    if !sinv.act_root(&Root::simple(n, j)).is_positive() {
                        m[(col, col)] += diag;
                    }
                }
            }
            let (a, b) = (params.qp(-k), params.qp(k));
            t_inv.push((&m + identity(dim) * (b - a)) / (a * b));
            t.push(m);
        }
        Ok(PrincipalSeries { params, gamma, basis, t, t_inv })
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn t_inv(&self, j: usize) -> &CMat {
        &self.t_inv[j]
    }

    /// `Y_i`, by the same word as on the spin space.
    pub fn y_op(&self, i: usize) -> CMat {
        let n = self.n();
        let mut m = identity(self.basis.len());
        for j in (1..i).rev() {
            m *= &self.t_inv[j];
        }
        for j in std::iter::once(0).chain(1..n).chain(std::iter::once(n)).chain((i..n).rev()) {
            m *= &self.t[j];
        }
        m
    }

    /// `C^{s_j}` on `M(gamma)` through the printed two-term formulas.
    pub fn cocycle_printed(&self, j: usize, z: &[C64]) -> Result<CMat> {
        let p = &self.params;
        let n = self.n();
        let cj = crate::trig_cocycle::c_fn(p, j, p.qp(crate::trig_cocycle::simple_affine_root(n, j, z)))?;
        let k = p.kappa_j(j);
        let dim = self.basis.len();
        let mut m = CMat::zeros(dim, dim);
        for (col, sigma) in self.basis.elements.iter().enumerate() {
            let sinv = sigma.inverse();
            let (target, coef, chi) = if j == 0 {
                let chi = !sinv.act_root(&Root::short(n, 0)).is_positive();
                (first_sign_flip(n).mul(sigma), p.qp(sigma.act(&self.gamma)[0]), chi)
            } else {
                let chi = !sinv.act_root(&Root::simple(n, j).neg()).is_positive();
                (WeylElement::simple(n, j).mul(sigma), one(), chi)
            };
            m[(self.basis.position(&target), col)] += coef / (p.qp(k) * cj);
            let e = if chi { p.qp(-2.0 * k) } else { one() };
            m[(col, col)] += (cj - e) / cj;
        }
        Ok(m)
    }

    /// `C^{s_j}` via the Baxterization of `T_j`.
    pub fn cocycle(&self, j: usize, z: &[C64]) -> Result<CMat> {
        baxterized_generator(self, j, z)
    }
}

impl HeckeModule for PrincipalSeries {
    fn params(&self) -> &ParameterSet {
        &self.params
    }
    fn dim(&self) -> usize {
        self.basis.len()
    }
    fn t(&self, j: usize) -> &CMat {
        &self.t[j]
    }
}

/// Dual multiplicity `kappa~_alpha` and `kappa~_{2 alpha}` for a root.
fn dual_kappas(p: &ParameterSet, alpha: &Root) -> (C64, C64) {
    if alpha.is_long() {
        (p.kappa, p.kappa)
    } else {
        (p.zeta, p.zeta_p)
    }
}

/// `D_alpha(gamma) = (1 - a~^{-1} q^{(alpha, gamma)})(1 - b~^{-1} q^{(alpha, gamma)})`.
pub fn d_alpha(p: &ParameterSet, alpha: &Root, gamma: &[C64]) -> C64 {
    let (k1, k2) = dual_kappas(p, alpha);
    let x = alpha.pair(gamma);
    (one() - p.qp(x - k1 - k2)) * (one() + p.qp(x - k1 + k2))
}

/// `D_sigma(gamma)`: product over positive roots sent to negative roots by `sigma^{-1}`.
pub fn d_sigma(p: &ParameterSet, sigma: &WeylElement, gamma: &[C64]) -> C64 {
    sigma.inverse().inversion_set().iter().map(|a| d_alpha(p, a, gamma)).product()
}

/// `A^unn_{s_i}(gamma): M(s_i gamma) -> M(gamma)`.
pub fn a_unn_simple(p: &ParameterSet, basis: &W0Basis, i: usize, gamma: &[C64]) -> CMat {
    let n = basis.n;
    let a = Root::simple(n, i);
    let (k, _) = dual_kappas(p, &a);
    let x = a.pair(gamma);
    let f = one() - p.qp(2.0 * x);
    let d = d_alpha(p, &a, gamma);
    let si = WeylElement::simple(n, i);
    let dim = basis.len();
    let mut m = CMat::zeros(dim, dim);
    for (col, sigma) in basis.elements.iter().enumerate() {
        m[(basis.position(&sigma.mul(&si)), col)] += p.qp(-k) * f;
        let chi = sigma.act_root(&a).is_positive();
        let e = if chi { p.qp(-2.0 * k) } else { one() };
        m[(col, col)] += d - e * f;
    }
    m
}

/// `A^unn_sigma(gamma): M(sigma^{-1} gamma) -> M(gamma)` along a word of `sigma`.
pub fn a_unn_word(p: &ParameterSet, basis: &W0Basis, word: &[usize], gamma: &[C64]) -> CMat {
    let n = basis.n;
    let mut out = identity(basis.len());
    let mut g = gamma.to_vec();
    for &j in word {
        out *= a_unn_simple(p, basis, j, &g);
        g = WeylElement::simple(n, j).act(&g);
    }
    out
}

pub fn a_unn(p: &ParameterSet, basis: &W0Basis, sigma: &WeylElement, gamma: &[C64]) -> CMat {
    a_unn_word(p, basis, &sigma.reduced_word(), gamma)
}

/// Normalised intertwiner `A_sigma(gamma) = A^unn_sigma(gamma) / D_sigma(gamma)`.
pub fn a_normalized(p: &ParameterSet, basis: &W0Basis, sigma: &WeylElement, gamma: &[C64]) -> Result<CMat> {
    let d = d_sigma(p, sigma, gamma);
    if d.norm() < 1e-14 {
        return Err(QkzError::NonGeneric(format!("D_sigma vanishes for sigma word {:?}", sigma.reduced_word())));
    }
    Ok(a_unn(p, basis, sigma, gamma) / d)
}

/// Whether `gamma` lies in `E^kappa_{C,I}` for `I = {1, ..., n-1}`.
pub fn in_parabolic_locus(p: &ParameterSet, gamma: &[C64]) -> bool {
    (1..p.n).all(|i| (Root::simple(p.n, i).pair(gamma) - 2.0 * p.kappa).norm() < 1e-10)
}

/// Decomposition `w = w_eps v` with `v` in `S_n`.
fn coset_decomposition(w: &WeylElement) -> (Vec<i8>, WeylElement) {
    let n = w.rank();
    for eps in all_eps(n) {
        let v = w_epsilon(&eps).inverse().mul(w);
        if v.signs().iter().all(|&s| s > 0) {
            return (eps, v);
        }
    }
    unreachable!("every element has a minimal coset representative")
}

/// `phi_I: v_w -> q^{-kappa l(v)} v_eps` for `w = w_eps v`, `v` in `S_n`.
pub fn phi_matrix(p: &ParameterSet, basis: &W0Basis) -> CMat {
    let mut m = CMat::zeros(1 << p.n, basis.len());
    for (col, w) in basis.elements.iter().enumerate() {
        let (eps, v) = coset_decomposition(w);
        m[(eps_index(&eps), col)] = p.qp(-p.kappa * v.length() as f64);
    }
    m
}

pub fn phi_i(p: &ParameterSet, basis: &W0Basis, gamma: &[C64], v: &CVec) -> Result<CVec> {
    if !in_parabolic_locus(p, gamma) {
        return Err(QkzError::InvalidInput("gamma is not in the parabolic locus".into()));
    }
    Ok(phi_matrix(p, basis) * v)
}

/// `b^I_{sigma^{-1}}(gamma) = phi_I(A_{sigma^{-1}}(gamma) v_e(sigma gamma))`.
pub fn b_i(p: &ParameterSet, basis: &W0Basis, sigma: &WeylElement) -> Result<CVec> {
    let g = p.gamma();
    let a = a_normalized(p, basis, &sigma.inverse(), &g)?;
    phi_i(p, basis, &g, &(a * basis.unit(&WeylElement::identity(p.n))))
}

/// Unnormalised `b^{unn,I}_{sigma^{-1}}`, defined for every `sigma`.
pub fn b_i_unn(p: &ParameterSet, basis: &W0Basis, sigma: &WeylElement) -> Result<CVec> {
    let g = p.gamma();
    let a = a_unn(p, basis, &sigma.inverse(), &g);
    phi_i(p, basis, &g, &(a * basis.unit(&WeylElement::identity(p.n))))
}

fn all_roots(n: usize) -> Vec<Root> {
    positive_roots(n).into_iter().flat_map(|a| [a.neg(), a]).collect()
}

fn in_parabolic_span(parabolic: &[usize], alpha: &Root) -> bool {
    let coords = alpha.simple_coords();
    coords.iter().enumerate().all(|(k, &m)| m == 0 || parabolic.contains(&(k + 1)))
}

fn dual_abcd(p: &ParameterSet, alpha: &Root) -> [C64; 4] {
    if alpha.is_long() {
        [p.qp(2.0 * p.kappa), c(-1.0, 0.0), p.qp(one() + 2.0 * p.kappa), c(-p.q, 0.0)]
    } else {
        p.dual().abcd()
    }
}

fn q_alpha2(p: &ParameterSet, alpha: &Root) -> f64 {
    if alpha.is_long() {
        p.q * p.q
    } else {
        p.q
    }
}

/// Genericity of `gamma` for the parabolic subset `I`, with the integer
/// resonance conditions tested for exponents up to `height`.
pub fn genericity(p: &ParameterSet, gamma: &[C64], parabolic: &[usize], height: usize) -> bool {
    let tol = 1e-10;
    let close = |a: C64, b: C64| (a - b).norm() < tol * (1.0 + b.norm());
    let n = p.n;
    for alpha in all_roots(n) {
        let x = alpha.pair(gamma);
        let qx = p.qp(x);
        let qa2 = q_alpha2(p, &alpha);
        let abcd = dual_abcd(p, &alpha);
        let in_i = in_parabolic_span(parabolic, &alpha);
        if alpha.is_positive() && !in_i
            && (close(qx * qx, one()) || abcd[..2].iter().any(|&t| close(qx, t))) {
                return false;
            }
        let in_i_minus = in_i && !alpha.is_positive();
        for m in 1..=height as i32 {
            let step = c(qa2.powi(m), 0.0);
            if !in_i_minus && (close(qx * qx, step) || abcd.iter().any(|&t| close(qx, step / t))) {
                return false;
            }
        }
        for m in -(height as i32)..=height as i32 {
            if close(qx * qx, c(qa2.powi(m), 0.0)) {
                return false;
            }
        }
    }
    true
}

/// `S(z)` or, with `dual`, `S~(z)`: per-root products of four q-Pochhammer
/// symbols in base `q_alpha^2`.
pub fn s_general(p: &ParameterSet, z: &[C64], dual: bool) -> C64 {
    let mut acc = one();
    for alpha in positive_roots(p.n) {
        let base = q_alpha2(p, &alpha);
        let ps = if alpha.is_long() {
            dual_abcd(p, &alpha)
        } else if dual {
            p.dual().abcd()
        } else {
            p.abcd()
        };
        let x = p.qp(-alpha.pair(z));
        for t in ps {
            acc *= qpoch(x * base / t, base);
        }
    }
    acc
}

/// `prod_{alpha > 0} (q_alpha^2 q^{-2(alpha, gamma)}; q_alpha^2)`.
pub fn leading_factor(p: &ParameterSet, gamma: &[C64]) -> C64 {
    positive_roots(p.n)
        .iter()
        .map(|a| {
            let base = q_alpha2(p, a);
            qpoch(p.qp(-2.0 * a.pair(gamma)) * base, base)
        })
        .product()
}

/// The power-series solution `Phi(z, gamma')` on `M(gamma')`.
pub fn solve_principal(p: &ParameterSet, gamma: &[C64], height: usize) -> Result<(PrincipalSeries, SeriesSolution)> {
    let module = PrincipalSeries::new(p.clone(), gamma.to_vec())?;
    let w0 = WeylElement::from_word(p.n, &w0_word(p.n));
    let gamma0 = module.basis.unit(&w0) * leading_factor(p, gamma);
    let (set, gammas, residuals) = solve_coefficients(&module, gamma, &gamma0, height)?;
    let s = s_general(p, gamma, true);
    if s.norm() < 1e-300 {
        return Err(QkzError::NonGeneric("S~ vanishes at the spectral point".into()));
    }
    let sol = SeriesSolution {
        params: p.clone(),
        epsilon: None,
        spectral: gamma.to_vec(),
        norm: one() / s,
        set,
        gammas,
        residuals,
    };
    Ok((module, sol))
}

/// Spin-space solution by the intertwiner route:
/// `phi_I(A_{sigma^{-1}}(gamma) Phi(z, sigma gamma))` with `sigma = w_eps`.
#[derive(Clone, Debug)]
pub struct IntertwinerSolution {
    pub module: PrincipalSeries,
    pub solution: SeriesSolution,
    pub projection: CMat,
}

impl IntertwinerSolution {
    pub fn build(p: &ParameterSet, eps: &[i8], height: usize) -> Result<Self> {
        let sigma = w_epsilon(eps);
        let g = p.gamma();
        let moved = sigma.act(&g);
        let (module, solution) = solve_principal(p, &moved, height)?;
        let a = a_normalized(p, &module.basis, &sigma.inverse(), &g)?;
        let projection = phi_matrix(p, &module.basis) * a;
        Ok(IntertwinerSolution { module, solution, projection })
    }

    pub fn eval(&self, z: &[C64]) -> Result<CVec> {
        Ok(&self.projection * self.solution.eval(z)?)
    }
}

/// Ratio `u = lambda v` in the least-squares sense, with the relative misfit.
pub fn proportionality(u: &CVec, v: &CVec) -> (C64, f64) {
    let lambda = v.dotc(u) / v.dotc(v);
    let misfit = linalg::max_abs_vec(&(u - v * lambda)) / linalg::max_abs_vec(u).max(1e-300);
    (lambda, misfit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkz_series::{s_sp, solve_gamma};
    use crate::spin_rep::SpinRep;
    use crate::weylc::minimal_coset_reps;

    fn p2() -> ParameterSet {
        ParameterSet::default_point(2)
    }

    fn generic_gamma(n: usize) -> Vec<C64> {
        (0..n).map(|k| c(0.37 + 0.53 * k as f64, 0.11 + 0.07 * k as f64)).collect()
    }

    fn commutator(a: &CMat, b: &CMat) -> f64 {
        linalg::max_abs(&(a * b - b * a))
    }

    #[test]
    fn hecke_relations() {
        for n in [2, 3] {
            let p = ParameterSet::default_point(n);
            let m = PrincipalSeries::new(p.clone(), generic_gamma(n)).unwrap();
            let id = identity(m.basis.len());
            for j in 0..=n {
                let (a, b) = (p.qp(-p.kappa_j(j)), p.qp(p.kappa_j(j)));
                let t = HeckeModule::t(&m, j);
                let quad = (t - &id * a) * (t + &id * b);
                assert!(linalg::max_abs(&quad) < 1e-11, "quadratic j={j}");
            }
            for j in 0..n {
                let (x, y) = (HeckeModule::t(&m, j), HeckeModule::t(&m, j + 1));
                let braid = if j == 0 || j + 1 == n { x * y * x * y - y * x * y * x } else { x * y * x - y * x * y };
                assert!(linalg::max_abs(&braid) < 1e-10, "braid n={n} j={j}");
            }
        }
    }

    #[test]
    fn y_operators_commute_and_act_on_v_e() {
        let p = p2();
        let g = generic_gamma(2);
        let m = PrincipalSeries::new(p.clone(), g.clone()).unwrap();
        let (y1, y2) = (m.y_op(1), m.y_op(2));
        assert!(commutator(&y1, &y2) < 1e-10);
        let e = m.basis.unit(&WeylElement::identity(2));
        for (i, y) in [y1, y2].iter().enumerate() {
            let r = y * &e - &e * p.qp(-g[i]);
            assert!(linalg::max_abs_vec(&r) < 1e-11, "i={i}");
        }
    }

    /// `Y^nu` for an integer weight.
    fn y_power(m: &PrincipalSeries, nu: &[i64]) -> CMat {
        let mut out = identity(m.basis.len());
        for (i, &k) in nu.iter().enumerate() {
            let y = m.y_op(i + 1);
            let base = if k >= 0 { y } else { linalg::inverse(&y).unwrap() };
            for _ in 0..k.unsigned_abs() {
                out *= &base;
            }
        }
        out
    }

    #[test]
    fn bernstein_relation() {
        for n in [2, 3] {
            let p = ParameterSet::default_point(n);
            let m = PrincipalSeries::new(p.clone(), generic_gamma(n)).unwrap();
            let id = identity(m.basis.len());
            for i in 1..=n {
                let alpha = Root::simple(n, i);
                let (k, k2) = dual_kappas(&p, &alpha);
                let ya = y_power(&m, &alpha.neg().0);
                let num = (&id - &ya * p.qp(-k - k2)) * (&id + &ya * p.qp(-k + k2));
                let den = linalg::inverse(&(&id - &ya * &ya)).unwrap();
                let f = num * den * p.qp(k) - &id * p.qp(-k);
                let t = HeckeModule::t(&m, i);
                for e in 0..n {
                    let nu: Vec<i64> = (0..n).map(|r| (r == e) as i64).collect();
                    let snu = WeylElement::simple(n, i).act_int(&nu);
                    let (y, ys) = (y_power(&m, &nu), y_power(&m, &snu));
                    let lhs = &y * t - t * &ys;
                    let rhs = &f * (&ys - &y);
                    let r = linalg::max_abs_diff(&lhs, &rhs);
                    assert!(r < 1e-9, "n={n} i={i} nu=e_{e} {r:e}");
                }
            }
        }
    }

    #[test]
    fn cocycle_matches_baxterization() {
        let p = p2();
        let m = PrincipalSeries::new(p.clone(), generic_gamma(2)).unwrap();
        let z = [c(0.21, 0.13), c(-0.34, 0.05)];
        for j in 0..=2 {
            let a = m.cocycle(j, &z).unwrap();
            let b = m.cocycle_printed(j, &z).unwrap();
            assert!(linalg::max_abs_diff(&a, &b) < 1e-12, "j={j}");
        }
    }

    #[test]
    fn intertwiners() {
        let p = p2();
        let g = generic_gamma(2);
        let basis = W0Basis::new(2);
        for i in 1..=2 {
            let sg = WeylElement::simple(2, i).act(&g);
            let (src, dst) = (PrincipalSeries::new(p.clone(), sg).unwrap(), PrincipalSeries::new(p.clone(), g.clone()).unwrap());
            let a = a_unn_simple(&p, &basis, i, &g);
            for j in 0..=2 {
                let r = linalg::max_abs_diff(&(&a * HeckeModule::t(&src, j)), &(HeckeModule::t(&dst, j) * &a));
                assert!(r < 1e-11, "i={i} j={j}");
            }
        }
        let w0 = WeylElement::from_word(2, &w0_word(2));
        let words = [[1usize, 2, 1, 2], [2, 1, 2, 1]];
        let a = a_unn_word(&p, &basis, &words[0], &g);
        let b = a_unn_word(&p, &basis, &words[1], &g);
        assert!(linalg::max_abs_diff(&a, &b) < 1e-11);
        let s = WeylElement::from_word(2, &[1, 2]);
        let comp = a_unn(&p, &basis, &s, &g) * a_unn(&p, &basis, &s.inverse(), &s.inverse().act(&g));
        let scalar = d_sigma(&p, &s, &g) * d_sigma(&p, &s.inverse(), &s.inverse().act(&g));
        assert!(linalg::max_abs_diff(&comp, &(identity(8) * scalar)) < 1e-11);
        assert!(linalg::max_abs_diff(&a_unn(&p, &basis, &WeylElement::identity(2), &g), &identity(8)) == 0.0);
        assert!(a_normalized(&p, &basis, &w0, &g).is_ok());
    }

    #[test]
    fn d_alpha_zeros() {
        let p = p2();
        let a = Root::simple(2, 2);
        let g = [c(0.0, 0.0), p.zeta + p.zeta_p];
        assert!(d_alpha(&p, &a, &g).norm() < 1e-14);
    }

    #[test]
    fn phi_and_b_basis() {
        let p = p2();
        let basis = W0Basis::new(2);
        let g = p.gamma();
        let plus = crate::spin_rep::basis_vector(2, &[1, 1]);
        let e = phi_i(&p, &basis, &g, &basis.unit(&WeylElement::identity(2))).unwrap();
        assert!(linalg::max_abs_vec(&(e - &plus)) == 0.0);
        let s1 = phi_i(&p, &basis, &g, &basis.unit(&WeylElement::simple(2, 1))).unwrap();
        assert!(linalg::max_abs_vec(&(s1 - &plus * p.qp(-p.kappa))) < 1e-15);
        assert!(phi_i(&p, &basis, &generic_gamma(2), &basis.unit(&WeylElement::identity(2))).is_err());

        let rep = SpinRep::new(p.clone()).unwrap();
        for eps in all_eps(2) {
            let b = b_i(&p, &basis, &w_epsilon(&eps)).unwrap();
            let r = linalg::max_abs_vec(&(&b - rep.b_basis(&eps).unwrap()));
            assert!(r < 1e-10, "eps={eps:?} {r:e}");
        }
        let reps = minimal_coset_reps(2, &[1]);
        for s in finite_group(2).iter().filter(|s| !reps.contains(s)) {
            assert!(linalg::max_abs_vec(&b_i_unn(&p, &basis, s).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn phi_intertwines() {
        let p = p2();
        let g = p.gamma();
        let m = PrincipalSeries::new(p.clone(), g).unwrap();
        let rep = SpinRep::new(p.clone()).unwrap();
        let phi = phi_matrix(&p, &m.basis);
        for j in 0..=2 {
            let r = linalg::max_abs_diff(&(&phi * HeckeModule::t(&m, j)), &(rep.pi_t(j) * &phi));
            assert!(r < 1e-12, "j={j}");
        }
    }

    #[test]
    fn s_general_is_s_sp() {
        let p = ParameterSet::default_point(3);
        let z = [c(0.21, 0.13), c(-0.34, 0.05), c(0.71, -0.2)];
        let (a, b) = (s_general(&p, &z, false), s_sp(&p, &z));
        assert!((a - b).norm() < 1e-12 * b.norm());
    }

    #[test]
    fn genericity_checks() {
        let p = p2();
        assert!(genericity(&p, &p.gamma(), &[1], 8));
        assert!(genericity(&p, &generic_gamma(2), &[], 8));
        assert!(!genericity(&p, &[c(0.4, 0.1), c(0.4, 0.1)], &[], 8));
        let mut r = p.clone();
        r.kappa = c(0.5, 0.0);
        assert!(!genericity(&r, &r.gamma(), &[1], 8));
    }

    #[test]
    fn cross_route_ratio_is_constant() {
        let p = p2().with_q(0.3);
        let rep = SpinRep::new(p.clone()).unwrap();
        for eps in all_eps(2) {
            let spin = solve_gamma(&rep, &eps, 8).unwrap();
            let other = IntertwinerSolution::build(&p, &eps, 8).unwrap();
            let mut ratios = Vec::new();
            for k in 0..4 {
                let z = [c(-8.0 + 0.05 * k as f64, 0.1 * k as f64), c(-4.0 - 0.07 * k as f64, 0.03)];
                let (lam, misfit) = proportionality(&other.eval(&z).unwrap(), &spin.eval(&z).unwrap());
                assert!(misfit < 1e-8, "eps={eps:?} misfit {misfit:e}");
                ratios.push(lam);
            }
            for l in &ratios {
                assert!((l - ratios[0]).norm() < 1e-8 * ratios[0].norm(), "eps={eps:?} {ratios:?}");
            }
            eprintln!("{eps:?} ratio {}", ratios[0]);
        }
    }
}
