//! Power-series solutions of the boundary qKZ equations.
//!
//! A solution attached to the spectral point `w` has the form
//! `norm * W(z, w) / S_sp(z) * sum_mu Gamma_mu x^mu` with `x_k = q^{-(alpha_k, z)}`.
//! Substituting into the transport equations `C^{tau(e_i)}(z) Phi(z - e_i) = Phi(z)`
//! and expanding every transport operator around `x = 0` gives, height by
//! height, an overdetermined linear system for the coefficients. The solver
//! only needs the matrices of `T_0, ..., T_n`, so the same code serves the spin
//! space and the principal series modules.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{QkzError, Result};
use crate::numerics::linalg::{self, c, identity};
use crate::numerics::{qpoch, MultiIndexSet};
use crate::spin_rep::{ParameterSet, SpinRep};
use crate::trig_cocycle::{baxterized_word_value, HeckeModule, TrigCocycle};
use crate::weylc::{all_eps, simple_coords, tau_word, w0_word, AffineElement};
use crate::{CMat, CVec, Series64, C64};

/// Matrix-valued truncated power series.
#[derive(Clone, Debug)]
pub struct MatSeries {
    set: Arc<MultiIndexSet>,
    coeffs: Vec<CMat>,
}

impl MatSeries {
    pub fn identity(set: &Arc<MultiIndexSet>, dim: usize) -> Self {
        let mut coeffs = vec![CMat::zeros(dim, dim); set.len()];
        coeffs[0] = identity(dim);
        MatSeries { set: set.clone(), coeffs }
    }

    pub fn coeff(&self, k: usize) -> &CMat {
        &self.coeffs[k]
    }

    pub fn set(&self) -> &Arc<MultiIndexSet> {
        &self.set
    }

    /// Product with a scalar series.
    pub fn mul_scalar_series(&self, s: &Series64) -> Self {
        let dim = self.coeffs[0].nrows();
        let mut out = vec![CMat::zeros(dim, dim); self.set.len()];
        let sc = s.coeffs();
        for (a, ma) in self.coeffs.iter().enumerate() {
            if linalg::max_abs(ma) == 0.0 {
                continue;
            }
            for (b, &cb) in sc.iter().enumerate() {
                if cb == c(0.0, 0.0) {
                    continue;
                }
                if let Some(k) = self.set.sum(a, b) {
                    out[k] += ma * cb;
                }
            }
        }
        MatSeries { set: self.set.clone(), coeffs: out }
    }

    /// `self * (I + g m)` for a scalar series `g` and a constant matrix `m`.
    fn mul_generator(&self, g: &Series64, m: &CMat) -> Self {
        let mut out = self.clone();
        let tmp = self.mul_scalar_series(g);
        for (o, t) in out.coeffs.iter_mut().zip(&tmp.coeffs) {
            *o += t * m;
        }
        out
    }

    /// Numeric value at the point `x`.
    pub fn eval(&self, x: &[C64]) -> CMat {
        let dim = self.coeffs[0].nrows();
        let mut out = CMat::zeros(dim, dim);
        for (k, m) in self.coeffs.iter().enumerate() {
            out += m * crate::numerics::series::monomial_value(self.set.index(k), x);
        }
        out
    }
}

/// `x_k = q^{-(alpha_k, z)}`.
pub fn x_coords(p: &ParameterSet, z: &[C64]) -> Vec<C64> {
    let n = z.len();
    (0..n).map(|k| if k + 1 < n { p.qp(z[k + 1] - z[k]) } else { p.qp(-z[k]) }).collect()
}

fn to_u16(m: &[i64]) -> Vec<u16> {
    m.iter().map(|&v| v as u16).collect()
}

/// Affine simple root `a_j(z) = c0 + (alpha, z)` as `(c0, alpha)`.
fn affine_simple_root(n: usize, j: usize) -> (f64, Vec<i64>) {
    let mut a = vec![0i64; n];
    if j == 0 {
        a[0] = -1;
        (0.5, a)
    } else if j == n {
        a[n - 1] = 1;
        (0.0, a)
    } else {
        a[j - 1] = 1;
        a[j] = -1;
        (0.0, a)
    }
}

/// Scalar series `g` with `C^{s_j}(el z) = I + g (q^{-k} T_j - q^{-2k})`.
///
/// With `a_j(el z) = const + (beta, z)` the variable `t = q^{a_j}` is a monomial
/// `q^{const} x^{-m}`, `m` the simple-root coordinates of `beta`; for positive
/// `beta` the expansion runs in `u = 1/t` instead.
fn generator_scalar_series(p: &ParameterSet, j: usize, el: &AffineElement, set: &Arc<MultiIndexSet>) -> Result<Series64> {
    let n = p.n;
    let (c0, alpha) = affine_simple_root(n, j);
    let shift: i64 = alpha.iter().zip(&el.translation).map(|(a, b)| a * b).sum();
    let cst = c(c0 + shift as f64, 0.0);
    let beta = el.finite.inverse().act_int(&alpha);
    let m = simple_coords(&beta);
    let k = p.qp(p.kappa_j(j));
    let k2 = p.qp(p.kappa2_j(j));
    let (a, b) = (1.0 / (k * k2), k2 / k);
    let one = Series64::one(set);
    if m.iter().all(|&v| v >= 0) {
        let u = Series64::monomial(set, p.qp(-cst), &to_u16(&m));
        let num = u.mul(&u).sub(&one);
        let den = u.sub(&Series64::constant(set, a)).mul(&u.add(&Series64::constant(set, b)));
        Ok(num.mul(&den.inv()?))
    } else {
        let neg: Vec<i64> = m.iter().map(|v| -v).collect();
        let t = Series64::monomial(set, p.qp(cst), &to_u16(&neg));
        let num = one.sub(&t.mul(&t));
        let den = one.sub(&t.scale(a)).mul(&one.add(&t.scale(b)));
        Ok(num.mul(&den.inv()?))
    }
}

/// Expansion of the Baxterized cocycle along `word` around `x = 0`.
pub fn cocycle_series<M: HeckeModule>(module: &M, word: &[usize], set: &Arc<MultiIndexSet>) -> Result<MatSeries> {
    let p = module.params();
    let n = p.n;
    let mut res = MatSeries::identity(set, module.dim());
    let mut prefix = AffineElement::identity(n);
    for &j in word {
        let g = generator_scalar_series(p, j, &prefix.inverse(), set)?;
        let km = p.qp(-p.kappa_j(j));
        let mat = module.t(j) * km - identity(module.dim()) * (km * km);
        res = res.mul_generator(&g, &mat);
        prefix = prefix.mul(&AffineElement::simple(n, j));
    }
    Ok(res)
}

/// Factors `(c, beta)` of `S_sp(z) = prod (c q^{-(beta, z)}; q)`.
pub fn s_sp_factors(p: &ParameterSet) -> Vec<(C64, Vec<i64>)> {
    let n = p.n;
    let mut f = Vec::new();
    let unit = |i: usize| -> Vec<i64> { (0..n).map(|k| (k == i) as i64).collect() };
    for i in 0..n {
        for a in p.abcd() {
            f.push((c(p.q, 0.0) / a, unit(i)));
        }
    }
    for r in 0..n {
        for s in r + 1..n {
            for sign in [-1i64, 1] {
                let mut beta = unit(r);
                beta[s] = sign;
                f.push((p.qp(c(1.0, 0.0) - 2.0 * p.kappa), beta.clone()));
                f.push((c(-p.q, 0.0), beta));
            }
        }
    }
    f
}

fn pair(beta: &[i64], z: &[C64]) -> C64 {
    beta.iter().zip(z).map(|(&b, &x)| x * b as f64).sum()
}

/// `S_sp(z)`.
pub fn s_sp(p: &ParameterSet, z: &[C64]) -> C64 {
    s_sp_factors(p).iter().map(|(cc, beta)| qpoch(cc * p.qp(-pair(beta, z)), p.q)).product()
}

/// `U(z)` in its first printed form: `S_sp` over `(q^{1-2z_i}; q)` and
/// `(q^{2-2z_r+-2z_s}; q^2)`.
pub fn u_fn(p: &ParameterSet, z: &[C64]) -> Result<C64> {
    let n = p.n;
    let one = c(1.0, 0.0);
    let mut den = c(1.0, 0.0);
    for i in 0..n {
        den *= qpoch(p.qp(one - 2.0 * z[i]), p.q);
    }
    for r in 0..n {
        for s in r + 1..n {
            den *= qpoch(p.qp(2.0 * one - 2.0 * z[r] + 2.0 * z[s]), p.q * p.q);
            den *= qpoch(p.qp(2.0 * one - 2.0 * z[r] - 2.0 * z[s]), p.q * p.q);
        }
    }
    if den.norm() < 1e-300 {
        return Err(QkzError::Pole(format!("U has a pole at z = {z:?}")));
    }
    Ok(s_sp(p, z) / den)
}

/// `U(z)` in its second printed form, as a product of per-root ratios.
pub fn u_fn_factored(p: &ParameterSet, z: &[C64]) -> Result<C64> {
    let n = p.n;
    let one = c(1.0, 0.0);
    let mut acc = c(1.0, 0.0);
    for i in 0..n {
        let num: C64 = p.abcd().iter().map(|a| qpoch(p.qp(one - z[i]) / a, p.q)).product();
        acc *= num / qpoch(p.qp(one - 2.0 * z[i]), p.q);
    }
    for r in 0..n {
        for s in r + 1..n {
            for y in [z[r] - z[s], z[r] + z[s]] {
                let den = qpoch(p.qp(one - y), p.q);
                if den.norm() < 1e-300 {
                    return Err(QkzError::Pole(format!("U has a pole at z = {z:?}")));
                }
                acc *= qpoch(p.qp(one - 2.0 * p.kappa - y), p.q) / den;
            }
        }
    }
    Ok(acc)
}

/// `U~(w)`: `U` with the dual Askey-Wilson parameters.
pub fn u_dual(p: &ParameterSet, w: &[C64]) -> Result<C64> {
    u_fn(&p.dual(), w)
}

/// Plane wave `W(z, w) = q^{(rho - w, rho~ - z)}` (`w_0 = -1`).
pub fn plane_wave(p: &ParameterSet, z: &[C64], w: &[C64]) -> C64 {
    let rho = p.rho();
    let rho_d = p.rho_dual();
    let e: C64 = (0..p.n).map(|i| (rho[i] - w[i]) * (rho_d[i] - z[i])).sum();
    p.qp(e)
}

/// Expansion of `S_sp(z) / S_sp(z - e_i)` (0-based `i`).
fn s_sp_ratio_series(p: &ParameterSet, i: usize, set: &Arc<MultiIndexSet>) -> Result<Series64> {
    let mut r = Series64::one(set);
    for (cc, beta) in s_sp_factors(p) {
        let m = to_u16(&simple_coords(&beta));
        match beta[i] {
            1 => r = r.mul(&Series64::one(set).sub(&Series64::monomial(set, cc, &m))),
            -1 => r = r.mul(&Series64::inv_one_minus(set, cc / p.q, &m)?),
            _ => {}
        }
    }
    Ok(r)
}

/// `q^{(nu, e_i)}` exponent of the shift `x(z - e_i) = q^{(., e_i)} x(z)` on `x^nu`.
fn shift_exponent(nu: &[u16], i: usize) -> i32 {
    nu[i] as i32 - if i > 0 { nu[i - 1] as i32 } else { 0 }
}

/// Expansions `L_i` of `q^{(rho - w)_i} S_sp(z)/S_sp(z - e_i) C^{tau(e_i)}(z)`.
fn transport_series<M: HeckeModule>(module: &M, w: &[C64], set: &Arc<MultiIndexSet>) -> Result<Vec<MatSeries>> {
    let p = module.params();
    let rho = p.rho();
    (0..p.n)
        .map(|i| {
            let cs = cocycle_series(module, &tau_word(p.n, i + 1), set)?;
            let r = s_sp_ratio_series(p, i, set)?.scale(p.qp(rho[i] - w[i]));
            Ok(cs.mul_scalar_series(&r))
        })
        .collect()
}

/// Coefficients of the series part with `Gamma_0` prescribed; returns the
/// coefficients and the worst consistency residual at each height.
pub fn solve_coefficients<M: HeckeModule>(
    module: &M,
    w: &[C64],
    gamma0: &CVec,
    height: usize,
) -> Result<(Arc<MultiIndexSet>, Vec<CVec>, Vec<f64>)> {
    let p = module.params();
    let n = p.n;
    let dim = module.dim();
    let set = MultiIndexSet::new(n, height);
    let ls = transport_series(module, w, &set)?;
    let scale = linalg::max_abs_vec(gamma0).max(1e-300);
    let res0 = ls
        .iter()
        .map(|l| linalg::max_abs_vec(&(l.coeff(0) * gamma0 - gamma0)) / scale)
        .fold(0.0, f64::max);
    let mut gammas = vec![CVec::zeros(dim); set.len()];
    gammas[0] = gamma0.clone();
    let mut residuals = vec![res0];
    let id = identity(dim);
    for h in 1..=height {
        let mut worst = 0.0f64;
        for mu in set.level(h) {
            let mut rows = Vec::with_capacity(n);
            let mut rhs = Vec::with_capacity(n);
            for (i, l) in ls.iter().enumerate() {
                let qs = p.q.powi(shift_exponent(set.index(mu), i));
                rows.push(l.coeff(0) * c(qs, 0.0) - &id);
                let mut acc = CVec::zeros(dim);
                for nu in 0..set.level(h).start {
                    if let Some(d) = set.difference(mu, nu) {
                        let qn = p.q.powi(shift_exponent(set.index(nu), i));
                        acc -= l.coeff(d) * &gammas[nu] * c(qn, 0.0);
                    }
                }
                rhs.push(acc);
            }
            let (x, r) = linalg::lstsq(&linalg::vstack(&rows), &linalg::vcat(&rhs)).map_err(|e| {
                QkzError::NonGeneric(format!("height {h} system for mu = {:?} is singular: {e}", set.index(mu)))
            })?;
            worst = worst.max(r);
            gammas[mu] = x;
        }
        residuals.push(worst);
    }
    Ok((set, gammas, residuals))
}

/// A truncated power-series solution.
#[derive(Clone, Debug)]
pub struct SeriesSolution {
    pub params: ParameterSet,
    /// Label `eps` for spin-space solutions.
    pub epsilon: Option<Vec<i8>>,
    /// Spectral point `w` of the plane wave.
    pub spectral: Vec<C64>,
    /// z-independent factor in front of `W(z, w) / S_sp(z)`.
    pub norm: C64,
    pub(crate) set: Arc<MultiIndexSet>,
    pub gammas: Vec<CVec>,
    /// Worst consistency residual of the linear solve at each height.
    pub residuals: Vec<f64>,
}

impl SeriesSolution {
    pub fn height(&self) -> usize {
        self.set.height_cap()
    }

    pub fn coefficient(&self, mu: &[u16]) -> Option<&CVec> {
        self.set.position(mu).map(|k| &self.gammas[k])
    }

    pub fn leading(&self) -> &CVec {
        &self.gammas[0]
    }

    /// `sum_mu Gamma_mu x(z)^mu`.
    pub fn series_value(&self, z: &[C64]) -> CVec {
        let x = x_coords(&self.params, z);
        let mut out = CVec::zeros(self.gammas[0].len());
        for (k, g) in self.gammas.iter().enumerate() {
            out += g * crate::numerics::series::monomial_value(self.set.index(k), &x);
        }
        out
    }

    /// `S_sp(z) Phi(z)`, holomorphic in `z`.
    pub fn eval_regular(&self, z: &[C64]) -> CVec {
        self.series_value(z) * (self.norm * plane_wave(&self.params, z, &self.spectral))
    }

    /// `Phi(z)` from the truncated series; accurate deep in the negative chamber.
    pub fn eval(&self, z: &[C64]) -> Result<CVec> {
        let s = s_sp(&self.params, z);
        if s.norm() < 1e-300 {
            return Err(QkzError::Pole(format!("S_sp vanishes at z = {z:?}")));
        }
        Ok(self.eval_regular(z) / s)
    }

    /// `Phi(y)` via `C^{tau(lambda)}(y) Phi(y - lambda)`, with `lambda` chosen so
    /// that `Re(y - lambda)` is as close as possible to `target`.
    pub fn eval_transported<M: HeckeModule>(&self, module: &M, y: &[C64], target: &[f64]) -> Result<CVec> {
        let lambda: Vec<i64> = y.iter().zip(target).map(|(a, t)| (a.re - t).round() as i64).collect();
        let deep: Vec<C64> = y.iter().zip(&lambda).map(|(a, &l)| a - l as f64).collect();
        let word = crate::weylc::translation_word(&lambda);
        Ok(baxterized_word_value(module, &word, y)? * self.eval(&deep)?)
    }

    pub fn to_doc(&self) -> CoefficientDoc {
        CoefficientDoc {
            n: self.params.n,
            height: self.height(),
            epsilon: self.epsilon.clone(),
            params: self.params.clone(),
            spectral: self.spectral.iter().map(|z| [z.re, z.im]).collect(),
            norm: [self.norm.re, self.norm.im],
            residuals: self.residuals.clone(),
            coefficients: self
                .gammas
                .iter()
                .enumerate()
                .map(|(k, g)| CoefficientEntry {
                    mu: self.set.index(k).to_vec(),
                    re: g.iter().map(|z| z.re).collect(),
                    im: g.iter().map(|z| z.im).collect(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &CoefficientDoc) -> Result<Self> {
        let set = MultiIndexSet::new(doc.n, doc.height);
        let dim = doc.coefficients.first().map_or(0, |e| e.re.len());
        let mut gammas = vec![CVec::zeros(dim); set.len()];
        for e in &doc.coefficients {
            let k = set
                .position(&e.mu)
                .ok_or_else(|| QkzError::Config(format!("multi-index {:?} exceeds height {}", e.mu, doc.height)))?;
            if e.re.len() != dim || e.im.len() != dim {
                return Err(QkzError::Config(format!("coefficient {:?} has the wrong length", e.mu)));
            }
            gammas[k] = CVec::from_iterator(dim, e.re.iter().zip(&e.im).map(|(&a, &b)| c(a, b)));
        }
        Ok(SeriesSolution {
            params: doc.params.clone(),
            epsilon: doc.epsilon.clone(),
            spectral: doc.spectral.iter().map(|v| c(v[0], v[1])).collect(),
            norm: c(doc.norm[0], doc.norm[1]),
            set,
            gammas,
            residuals: doc.residuals.clone(),
        })
    }
}

/// JSON form of a solution: `{n, H, epsilon, params, coefficients: [{mu, re, im}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientDoc {
    pub n: usize,
    #[serde(rename = "H")]
    pub height: usize,
    pub epsilon: Option<Vec<i8>>,
    pub params: ParameterSet,
    pub spectral: Vec<[f64; 2]>,
    pub norm: [f64; 2],
    pub residuals: Vec<f64>,
    pub coefficients: Vec<CoefficientEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub mu: Vec<u16>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// The spin-space solution `Phi_eps` with `Gamma_0 = T_{w_0} b_eps` and
/// normalisation `W(z, w_eps gamma) / (S_sp(z) U~(w_eps gamma))`.
pub fn solve_gamma(rep: &SpinRep, eps: &[i8], height: usize) -> Result<SeriesSolution> {
    let p = &rep.params;
    let w = rep.spectral_point(eps);
    let gamma0 = rep.pi_word(&w0_word(p.n)) * rep.b_basis(eps)?;
    let (set, gammas, residuals) = solve_coefficients(rep, &w, &gamma0, height)?;
    let norm = c(1.0, 0.0) / u_dual(p, &w)?;
    Ok(SeriesSolution { params: p.clone(), epsilon: Some(eps.to_vec()), spectral: w, norm, set, gammas, residuals })
}

/// The full basis `{Phi_eps}` on the spin space.
#[derive(Clone, Debug)]
pub struct SolutionBasis {
    pub cocycle: TrigCocycle,
    pub solutions: Vec<SeriesSolution>,
}

impl SolutionBasis {
    pub fn build(params: &ParameterSet, height: usize) -> Result<Self> {
        let cocycle = TrigCocycle::new(params.clone())?;
        let solutions = all_eps(params.n)
            .iter()
            .map(|e| solve_gamma(&cocycle.rep, e, height))
            .collect::<Result<Vec<_>>>()?;
        Ok(SolutionBasis { cocycle, solutions })
    }

    pub fn worst_residual(&self) -> f64 {
        self.solutions.iter().flat_map(|s| s.residuals.iter().copied()).fold(0.0, f64::max)
    }

    /// Columns `Phi_eps(y)` in basis order, each evaluated by transport from
    /// the region around `target`.
    pub fn matrix(&self, y: &[C64], target: &[f64]) -> Result<CMat> {
        let cols = self
            .solutions
            .iter()
            .map(|s| s.eval_transported(&self.cocycle.rep, y, target))
            .collect::<Result<Vec<_>>>()?;
        Ok(linalg::column_stack(&cols))
    }
}

/// Low-order oracle for the coefficients: fits `sum_mu Gamma_mu x^mu` with
/// `Gamma_0 = T_{w_0} b_eps` to the transport equations evaluated numerically
/// at the points `zs`, by least squares over all heights up to `fit_height`.
/// Only the lowest heights are trustworthy; the top ones absorb truncation.
pub fn collocation_coefficients(rep: &SpinRep, eps: &[i8], fit_height: usize, zs: &[Vec<C64>]) -> Result<Vec<CVec>> {
    let p = &rep.params;
    let n = p.n;
    let dim = rep.dim();
    let set = MultiIndexSet::new(n, fit_height);
    let w = rep.spectral_point(eps);
    let rho = p.rho();
    let gamma0 = rep.pi_word(&w0_word(n)) * rep.b_basis(eps)?;
    let cyc = TrigCocycle { rep: rep.clone() };
    let unknowns = set.len() - 1;
    let mut blocks = Vec::new();
    let mut rhs = Vec::new();
    for z in zs {
        let xz = x_coords(p, z);
        for i in 0..n {
            let mut zm = z.clone();
            zm[i] -= 1.0;
            let xm = x_coords(p, &zm);
            let ratio = s_sp(p, z) / s_sp(p, &zm);
            let a = cyc.transport_e(i + 1, z)? * (p.qp(rho[i] - w[i]) * ratio);
            let mut row = CMat::zeros(dim, dim * unknowns);
            for k in 1..set.len() {
                let mu = set.index(k);
                let block = &a * crate::numerics::series::monomial_value(mu, &xm)
                    - identity(dim) * crate::numerics::series::monomial_value(mu, &xz);
                row.view_mut((0, (k - 1) * dim), (dim, dim)).copy_from(&block);
            }
            blocks.push(row);
            rhs.push(&gamma0 - &a * &gamma0);
        }
    }
    let mut m = linalg::vstack(&blocks);
    // Columns of high monomials are tiny; equilibrate before solving.
    let scales: Vec<f64> = (0..m.ncols()).map(|j| m.column(j).norm().max(1e-300)).collect();
    for (j, s) in scales.iter().enumerate() {
        m.column_mut(j).unscale_mut(*s);
    }
    let (x, _) = linalg::lstsq(&m, &linalg::vcat(&rhs))?;
    let mut out = vec![gamma0];
    for k in 0..unknowns {
        out.push(CVec::from_fn(dim, |r, _| x[k * dim + r] / scales[k * dim + r]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(n: usize) -> SpinRep {
        SpinRep::new(ParameterSet::default_point(n)).unwrap()
    }

    #[test]
    fn cocycle_series_matches_numeric_value_deep_in_chamber() {
        let r = rep(2);
        let set = MultiIndexSet::new(2, 10);
        let word = tau_word(2, 1);
        let s = cocycle_series(&r, &word, &set).unwrap();
        let z = [c(-6.3, 0.1), c(-3.2, -0.2)];
        let direct = baxterized_word_value(&r, &word, &z).unwrap();
        let approx = s.eval(&x_coords(&r.params, &z));
        assert!(linalg::max_abs_diff(&direct, &approx) < 1e-8);
    }

    #[test]
    fn low_order_coefficients_match_collocation() {
        let r = rep(2);
        let eps = [-1i8, 1];
        let sol = solve_gamma(&r, &eps, 6).unwrap();
        // Re(alpha_i, z) in [-4, -3]: shallow enough for a well-conditioned
        // fit, deep enough for the height-8 fit to absorb the truncation.
        let zs: Vec<Vec<C64>> = (0..40)
            .map(|k| {
                let t = k as f64;
                let a2 = -3.0 - (t * 0.37).fract();
                let a1 = -3.0 - (t * 0.61).fract();
                vec![c(a1 + a2, 0.3 * (t * 0.53).sin()), c(a2, 0.3 * (t * 0.71).cos())]
            })
            .collect();
        let fit = collocation_coefficients(&r, &eps, 8, &zs).unwrap();
        let set = MultiIndexSet::new(2, 8);
        let scale = linalg::max_abs_vec(sol.leading());
        for (h, tol) in [(1, 1e-9), (2, 1e-7)] {
            for k in set.level(h) {
                let mu = set.index(k);
                let d = linalg::max_abs_vec(&(&fit[k] - sol.coefficient(mu).unwrap())) / scale;
                assert!(d < tol, "mu = {mu:?}: {d:e}");
            }
        }
    }

    #[test]
    fn two_forms_of_u_agree() {
        let p = ParameterSet::default_point(3);
        let z = [c(0.31, 0.2), c(-0.47, 0.05), c(0.12, -0.3)];
        let a = u_fn(&p, &z).unwrap();
        let b = u_fn_factored(&p, &z).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn plane_wave_shift_ratio() {
        let p = ParameterSet::default_point(2);
        let w = p.gamma();
        let z = [c(0.3, 0.1), c(-0.2, 0.4)];
        assert!((plane_wave(&p, &z, &p.rho()) - c(1.0, 0.0)).norm() < 1e-14);
        let zs = [z[0] - 2.0, z[1] + 1.0];
        let ratio = plane_wave(&p, &zs, &w) / plane_wave(&p, &z, &w);
        let rho = p.rho();
        let expect = p.qp((rho[0] - w[0]) * 2.0 - (rho[1] - w[1]));
        assert!((ratio - expect).norm() < 1e-12);
    }

    #[test]
    fn leading_coefficient_and_consistency() {
        let r = rep(2);
        for eps in all_eps(2) {
            let s = solve_gamma(&r, &eps, 4).unwrap();
            let expect = r.pi_word(&w0_word(2)) * r.b_basis(&eps).unwrap();
            assert!(linalg::max_abs_vec(&(s.leading() - expect)) < 1e-12);
            assert!(s.residuals.iter().all(|&x| x < 1e-9), "{:?}", s.residuals);
        }
    }

    #[test]
    fn transport_residual_decays_with_height() {
        // at q = 0.3 the H = 6 residual already sits at rounding level
        let r = SpinRep::new(ParameterSet::default_point(2).with_q(0.45)).unwrap();
        let eps = [1i8, -1];
        let z = [c(-8.0, 0.13), c(-4.0, -0.21)];
        let res = |h: usize| {
            let s = solve_gamma(&r, &eps, h).unwrap();
            let lhs = baxterized_word_value(&r, &tau_word(2, 1), &z).unwrap() * s.eval(&[z[0] - 1.0, z[1]]).unwrap();
            let rhs = s.eval(&z).unwrap();
            linalg::max_abs_vec(&(lhs - &rhs)) / linalg::max_abs_vec(&rhs)
        };
        let (r6, r8) = (res(6), res(8));
        assert!(r6 < 1e-7 && r8 * 10.0 < r6, "{r6:e} {r8:e}");
    }

    #[test]
    fn json_round_trip() {
        let s = solve_gamma(&rep(2), &[-1, 1], 2).unwrap();
        let doc = s.to_doc();
        let text = serde_json::to_string(&doc).unwrap();
        let back: CoefficientDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        let s2 = SeriesSolution::from_doc(&back).unwrap();
        assert_eq!(s2.gammas, s.gammas);
    }
}
