//! The spin representation of the affine Hecke algebra of type C_n on
//! `(C^2)^{(x) n}`, its commuting Y-operators and the bases `v_eps`, `b_eps`.
//!
//! Basis order: the state index has `eps_1` as its most significant bit and a
//! set bit means `v_-`, so leg 1 is the outermost Kronecker factor.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QkzError, Result};
use crate::numerics::linalg::{self, c, embed, from_rows, identity, vstack};
use crate::weylc::{self, eps_index, positive_roots, w_epsilon, AffineElement, Root};
use crate::{CMat, CVec, C64};

/// Coupling constants of the boundary qKZ system together with the
/// representation parameter `xi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub n: usize,
    pub q: f64,
    pub kappa: C64,
    pub zeta: C64,
    pub zeta_p: C64,
    pub upsilon: C64,
    pub upsilon_p: C64,
    pub xi: C64,
}

impl ParameterSet {
    /// Reference point used throughout the checks.
    pub fn default_point(n: usize) -> Self {
        ParameterSet {
            n,
            q: 0.3,
            kappa: c(0.35, 0.0),
            zeta: c(0.2, 0.1),
            zeta_p: c(-0.15, 0.0),
            upsilon: c(0.4, 0.0),
            upsilon_p: c(0.0, 0.25),
            xi: c(0.55, 0.0),
        }
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(QkzError::Config(format!("rank n = {} must be at least 2", self.n)));
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(QkzError::Config(format!("q = {} must lie in (0, 1)", self.q)));
        }
        Ok(())
    }

    /// Random point near the reference point, with `q` in `[0.2, 0.5]`.
    pub fn random_near_default<R: Rng>(n: usize, rng: &mut R) -> Self {
        let d = Self::default_point(n);
        let mut jitter = |z: C64, w: f64| z + c(rng.gen_range(-w..w), rng.gen_range(-w..w));
        ParameterSet {
            n,
            q: 0.0,
            kappa: jitter(d.kappa, 0.08),
            zeta: jitter(d.zeta, 0.08),
            zeta_p: jitter(d.zeta_p, 0.08),
            upsilon: jitter(d.upsilon, 0.08),
            upsilon_p: jitter(d.upsilon_p, 0.08),
            xi: jitter(d.xi, 0.08),
        }
        .with_q(rng.gen_range(0.2..0.5))
    }

    /// `q^x`.
    pub fn qp(&self, x: C64) -> C64 {
        (x * self.q.ln()).exp()
    }

    /// Multiplicity `kappa_j` of the simple reflection `s_j`.
    pub fn kappa_j(&self, j: usize) -> C64 {
        if j == 0 {
            self.zeta_p
        } else if j == self.n {
            self.zeta
        } else {
            self.kappa
        }
    }

    /// Second multiplicity attached to `s_j` in the Baxterization.
    pub fn kappa2_j(&self, j: usize) -> C64 {
        if j == 0 {
            self.upsilon_p
        } else if j == self.n {
            self.upsilon
        } else {
            self.kappa
        }
    }

    /// Askey-Wilson parameters `{a, b, c, d}`.
    pub fn abcd(&self) -> [C64; 4] {
        let one = c(1.0, 0.0);
        [
            self.qp(self.zeta + self.upsilon),
            -self.qp(self.zeta - self.upsilon),
            self.qp(0.5 * one + self.zeta_p + self.upsilon_p),
            -self.qp(0.5 * one + self.zeta_p - self.upsilon_p),
        ]
    }

    /// Dual parameters: `upsilon` and `zeta'` interchanged.
    pub fn dual(&self) -> Self {
        let mut d = self.clone();
        std::mem::swap(&mut d.upsilon, &mut d.zeta_p);
        d
    }

    /// `gamma_i = xi + (n + 1 - 2i) kappa`.
    pub fn gamma(&self) -> Vec<C64> {
        (1..=self.n).map(|i| self.xi + self.kappa * (self.n as f64 + 1.0 - 2.0 * i as f64)).collect()
    }

    /// `rho_i = zeta + zeta' + 2 (n - i) kappa`.
    pub fn rho(&self) -> Vec<C64> {
        (1..=self.n).map(|i| self.zeta + self.zeta_p + self.kappa * (2.0 * (self.n - i) as f64)).collect()
    }

    pub fn rho_dual(&self) -> Vec<C64> {
        self.dual().rho()
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }
}

pub fn basis_vector(n: usize, eps: &[i8]) -> CVec {
    let mut v = CVec::zeros(1 << n);
    v[eps_index(eps)] = c(1.0, 0.0);
    v
}

/// Local 4x4 block of `T_i`, `1 <= i < n`.
pub fn t_bulk_block(p: &ParameterSet) -> CMat {
    let (a, b) = (p.qp(-p.kappa), p.qp(p.kappa));
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    from_rows(&[&[a, z, z, z], &[z, z, o, z], &[z, o, a - b, z], &[z, z, z, a]])
}

/// Local block of `T_0` on leg 1; the representation parameter `xi` sits here.
pub fn t0_block(p: &ParameterSet) -> CMat {
    let k = p.zeta_p;
    from_rows(&[&[p.qp(-k) - p.qp(k), p.qp(-p.xi)], &[p.qp(p.xi), c(0.0, 0.0)]])
}

/// Local block of `T_n` on leg n.
pub fn tn_block(p: &ParameterSet) -> CMat {
    let k = p.zeta;
    from_rows(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), p.qp(-k) - p.qp(k)]])
}

/// The spin representation with its generators precomputed.
#[derive(Clone, Debug)]
pub struct SpinRep {
    pub params: ParameterSet,
    t: Vec<CMat>,
    t_inv: Vec<CMat>,
}

impl SpinRep {
    pub fn new(params: ParameterSet) -> Result<Self> {
        params.validate()?;
        let n = params.n;
        let t: Vec<CMat> = (0..=n)
            .map(|j| match j {
                0 => embed(n, 0, &t0_block(&params)),
                j if j == n => embed(n, n - 1, &tn_block(&params)),
                j => embed(n, j - 1, &t_bulk_block(&params)),
            })
            .collect();
        let mut t_inv = Vec::with_capacity(n + 1);
        for (j, tj) in t.iter().enumerate() {
            let k = params.kappa_j(j);
            let (a, b) = (params.qp(-k), params.qp(k));
            // (T - a)(T + b) = 0 gives T^{-1} = (T + b - a) / (a b)
            let ab = a * b;
            if ab.norm() < 1e-300 || (a + b).norm() < 1e-14 {
                return Err(QkzError::NonGeneric(format!("T_{j} is not invertible")));
            }
            t_inv.push((tj + identity(tj.nrows()) * (b - a)) / ab);
        }
        Ok(SpinRep { params, t, t_inv })
    }

    pub fn n(&self) -> usize {
        self.params.n
    }
    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn pi_t(&self, j: usize) -> &CMat {
        &self.t[j]
    }

    pub fn pi_t_inv(&self, j: usize) -> &CMat {
        &self.t_inv[j]
    }

    /// Product of generators along a word (no reducedness check).
    pub fn pi_word(&self, word: &[usize]) -> CMat {
        word.iter().fold(identity(self.dim()), |acc, &j| acc * &self.t[j])
    }

    /// `T_w` through a reduced word of `w`.
    pub fn pi_tw(&self, w: &AffineElement) -> CMat {
        self.pi_word(&w.reduced_word())
    }

    /// `Y_i = T_{i-1}^{-1} ... T_1^{-1} T_0 T_1 ... T_{n-1} T_n T_{n-1} ... T_i`.
    pub fn y_op(&self, i: usize) -> CMat {
        let n = self.n();
        let mut m = identity(self.dim());
        for j in (1..i).rev() {
            m *= &self.t_inv[j];
        }
        let rest: Vec<usize> = std::iter::once(0).chain(1..n).chain(std::iter::once(n)).chain((i..n).rev()).collect();
        for j in rest {
            m *= &self.t[j];
        }
        m
    }

    /// `N_alpha(z)`; long and short roots use their respective printed branches.
    pub fn n_alpha(&self, alpha: &Root, z: &[C64]) -> Result<C64> {
        let p = &self.params;
        let x = alpha.pair(z);
        let one = c(1.0, 0.0);
        let (num, den) = if alpha.is_long() {
            (one - p.qp(x), p.qp(p.kappa) * (one - p.qp(-2.0 * p.kappa + x)))
        } else {
            (
                one - p.qp(2.0 * x),
                p.qp(p.zeta) * (one - p.qp(-p.zeta - p.zeta_p + x)) * (one + p.qp(-p.zeta + p.zeta_p + x)),
            )
        };
        if den.norm() < 1e-14 {
            return Err(QkzError::Pole(format!("N_alpha for alpha = {:?}", alpha.0)));
        }
        Ok(num / den)
    }

    /// `N_eps`: product of `N_alpha(gamma)` over the inversion set of `w_eps`.
    pub fn n_eps(&self, eps: &[i8]) -> Result<C64> {
        let g = self.params.gamma();
        let mut acc = c(1.0, 0.0);
        for a in w_epsilon(eps).inversion_set() {
            acc *= self.n_alpha(&a, &g)?;
        }
        Ok(acc)
    }

    /// `w_eps gamma`, whose entries give the Y-eigenvalues `q^{-(w_eps gamma)_i}` of `b_eps`.
    pub fn spectral_point(&self, eps: &[i8]) -> Vec<C64> {
        w_epsilon(eps).act(&self.params.gamma())
    }

    /// Common Y-eigenvector normalised so its `v_eps` coefficient equals `N_eps`.
    pub fn b_basis(&self, eps: &[i8]) -> Result<CVec> {
        let n = self.n();
        let w = self.spectral_point(eps);
        let blocks: Vec<CMat> = (1..=n)
            .map(|i| self.y_op(i) - identity(self.dim()) * self.params.qp(-w[i - 1]))
            .collect();
        let stacked = vstack(&blocks);
        let (v, gap) = linalg::smallest_singular_vector(&stacked);
        if gap > 1e-7 {
            return Err(QkzError::NonGeneric(format!("eigenspace for eps = {eps:?} is not one-dimensional (gap {gap:.2e})")));
        }
        let lead = v[eps_index(eps)];
        if lead.norm() < 1e-12 {
            return Err(QkzError::NonGeneric(format!("b_eps has vanishing leading coefficient for eps = {eps:?}")));
        }
        Ok(v * (self.n_eps(eps)? / lead))
    }

    /// Matrix whose columns are `b_eps` in basis order.
    pub fn b_matrix(&self) -> Result<CMat> {
        let cols: Result<Vec<CVec>> = weylc::all_eps(self.n()).iter().map(|e| self.b_basis(e)).collect();
        Ok(linalg::column_stack(&cols?))
    }

    pub fn positive_roots(&self) -> Vec<Root> {
        positive_roots(self.n())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::max_abs;
    use crate::weylc::{all_eps, bruhat_leq_finite, WeylElement};

    fn rep(n: usize) -> SpinRep {
        SpinRep::new(ParameterSet::default_point(n)).unwrap()
    }

    #[test]
    fn hecke_relations() {
        let s = rep(3);
        for j in 0..=3 {
            let k = s.params.kappa_j(j);
            let t = s.pi_t(j);
            let id = identity(8);
            let r = (t - &id * s.params.qp(-k)) * (t + &id * s.params.qp(k));
            assert!(max_abs(&r) < 1e-13, "Hecke relation for T_{j}");
            assert!(max_abs(&(t * s.pi_t_inv(j) - &id)) < 1e-13);
        }
    }

    #[test]
    fn t0_off_diagonal_carries_xi() {
        let s = rep(2);
        let p = &s.params;
        let v = s.pi_t(0) * basis_vector(2, &[-1, 1]);
        assert!((v[eps_index(&[1, 1])] - p.qp(-p.xi)).norm() < 1e-15);
    }

    #[test]
    fn y_commute_and_vacuum_eigenvalue() {
        let s = rep(3);
        let ys: Vec<CMat> = (1..=3).map(|i| s.y_op(i)).collect();
        for a in &ys {
            for b in &ys {
                assert!(max_abs(&(a * b - b * a)) < 1e-12);
            }
        }
        let vac = basis_vector(3, &[1, 1, 1]);
        let g = s.params.gamma();
        assert!(linalg::max_abs_vec(&(&ys[0] * &vac - &vac * s.params.qp(-g[0]))) < 1e-13);
    }

    #[test]
    fn v_eps_from_t_w_eps() {
        let s = rep(3);
        let vac = basis_vector(3, &[1, 1, 1]);
        for eps in all_eps(3) {
            let v = s.pi_word(&weylc::w_epsilon_word(&eps)) * &vac;
            assert!(linalg::max_abs_vec(&(v - basis_vector(3, &eps))) < 1e-14);
        }
    }

    #[test]
    fn b_basis_properties() {
        let s = rep(2);
        let vac = basis_vector(2, &[1, 1]);
        assert!(linalg::max_abs_vec(&(s.b_basis(&[1, 1]).unwrap() - vac)) < 1e-12);
        for eps in all_eps(2) {
            let b = s.b_basis(&eps).unwrap();
            let w = s.spectral_point(&eps);
            for i in 1..=2 {
                let r = s.y_op(i) * &b - &b * s.params.qp(-w[i - 1]);
                assert!(linalg::max_abs_vec(&r) < 1e-11);
            }
            let we = w_epsilon(&eps);
            for other in all_eps(2) {
                if !bruhat_leq_finite(&w_epsilon(&other), &we) {
                    assert!(b[eps_index(&other)].norm() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn n_alpha_vanishes_on_wall() {
        let s = rep(2);
        let z = vec![c(0.3, 0.0), c(0.3, 0.0)];
        assert!(s.n_alpha(&Root::diff(2, 0, 1), &z).unwrap().norm() < 1e-15);
        let z0 = vec![c(0.0, 0.0), c(0.0, 0.0)];
        assert!(s.n_alpha(&Root::short(2, 0), &z0).unwrap().norm() < 1e-15);
        let _ = WeylElement::identity(2);
    }
}
