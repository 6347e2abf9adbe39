//! Trigonometric R- and K-matrices and the W-cocycle they generate on the
//! spin space, together with the boundary qKZ transport operators.

use crate::error::{QkzError, Result};
use crate::numerics::linalg::{c, embed, from_rows, identity};
use crate::spin_rep::{ParameterSet, SpinRep};
use crate::weylc::{tau_word, translation_word, AffineElement};
use crate::{CMat, CVec, C64};

const POLE_EPS: f64 = 1e-13;

fn zero() -> C64 {
    c(0.0, 0.0)
}
fn one() -> C64 {
    c(1.0, 0.0)
}

/// The flip `P` on `C^2 (x) C^2`.
pub fn flip() -> CMat {
    let (o, z) = (one(), zero());
    from_rows(&[&[o, z, z, z], &[z, z, o, z], &[z, o, z, z], &[z, z, z, o]])
}

/// The R-matrix in the orientation that drives the cocycle.
///
/// This is the displayed R-matrix conjugated by the flip. With the displayed
/// off-diagonal placement the two reflection equations fail as written; in
/// this orientation they hold and `P R` reproduces the Baxterization of `T_i`.
pub fn r_trig(p: &ParameterSet, z: C64) -> Result<CMat> {
    let f = flip();
    Ok(&f * r_printed(p, z)? * &f)
}

/// The R-matrix exactly as displayed, with off-diagonal `(1 - q^{-2k})` above
/// and `(1 - q^{-2k}) q^z` below the diagonal.
pub fn r_printed(p: &ParameterSet, z: C64) -> Result<CMat> {
    let k = p.kappa;
    let t = p.qp(z);
    let a = one() - p.qp(-2.0 * k) * t;
    if a.norm() < POLE_EPS {
        return Err(QkzError::Pole(format!("R-matrix at z = {z}")));
    }
    let d = p.qp(-k) * (one() - t);
    let u = one() - p.qp(-2.0 * k);
    let zz = zero();
    let m = from_rows(&[&[a, zz, zz, zz], &[zz, d, u, zz], &[zz, u * t, d, zz], &[zz, zz, zz, a]]);
    Ok(m / a)
}

fn k_scalar(p: &ParameterSet, zeta: C64, ups: C64, z: C64) -> Result<C64> {
    let t = p.qp(z);
    let den = (one() - p.qp(-zeta - ups) * t) * (one() + p.qp(-zeta + ups) * t);
    if den.norm() < POLE_EPS {
        return Err(QkzError::Pole(format!("K-matrix scalar at z = {z}")));
    }
    Ok(p.qp(-zeta) / den)
}

/// Right K-matrix `K(z)` (parameters `zeta`, `upsilon`).
pub fn k_right(p: &ParameterSet, z: C64) -> Result<CMat> {
    let (ze, u) = (p.zeta, p.upsilon);
    let t = p.qp(z);
    let dz = p.qp(ze) - p.qp(-ze);
    let du = p.qp(u) - p.qp(-u);
    let off = one() - t * t;
    let m = from_rows(&[&[dz + du * t, off], &[off, dz * t * t + du * t]]);
    Ok(m * k_scalar(p, ze, u, z)?)
}

/// Left K-matrix (parameters `zeta'`, `upsilon'`, `xi`).
pub fn k_left(p: &ParameterSet, z: C64) -> Result<CMat> {
    let (ze, u) = (p.zeta_p, p.upsilon_p);
    let t = p.qp(z);
    let dz = p.qp(ze) - p.qp(-ze);
    let du = p.qp(u) - p.qp(-u);
    let off = one() - t * t;
    let m = from_rows(&[&[dz * t * t + du * t, p.qp(-p.xi) * off], &[p.qp(p.xi) * off, dz + du * t]]);
    Ok(m * k_scalar(p, ze, u, z)?)
}

/// Two-leg operator `m` placed on legs `(a, b)` (0-based, any order), the
/// first tensor factor of `m` acting on leg `a`.
pub fn embed_pair(n: usize, a: usize, b: usize, m: &CMat) -> CMat {
    assert!(a != b && a < n && b < n);
    let dim = 1usize << n;
    let bit = |state: usize, leg: usize| (state >> (n - 1 - leg)) & 1;
    let mut out = CMat::zeros(dim, dim);
    for col in 0..dim {
        let local_in = 2 * bit(col, a) + bit(col, b);
        for local_out in 0..4 {
            let v = m[(local_out, local_in)];
            if v == zero() {
                continue;
            }
            let mut row = col;
            row &= !(1 << (n - 1 - a));
            row &= !(1 << (n - 1 - b));
            row |= (local_out >> 1) << (n - 1 - a);
            row |= (local_out & 1) << (n - 1 - b);
            out[(row, col)] += v;
        }
    }
    out
}

/// Affine root value `a_j(z)` of the simple reflection `s_j`.
pub fn simple_affine_root(n: usize, j: usize, z: &[C64]) -> C64 {
    if j == 0 {
        c(0.5, 0.0) - z[0]
    } else if j == n {
        z[n - 1]
    } else {
        z[j - 1] - z[j]
    }
}

/// A finite-dimensional module of the affine Hecke algebra given by the
/// matrices of its generators `T_0, ..., T_n`.
pub trait HeckeModule {
    fn params(&self) -> &ParameterSet;
    fn dim(&self) -> usize;
    fn t(&self, j: usize) -> &CMat;
}

impl HeckeModule for SpinRep {
    fn params(&self) -> &ParameterSet {
        &self.params
    }
    fn dim(&self) -> usize {
        SpinRep::dim(self)
    }
    fn t(&self, j: usize) -> &CMat {
        self.pi_t(j)
    }
}

/// `c_j = (1 - t/(k k2))(1 + t k2/k)/(1 - t^2)` at `t = q^{a_j(z)}`, with
/// `k = q^{kappa_j}`, `k2 = q^{kappa2_j}`.
pub fn c_fn(p: &ParameterSet, j: usize, t: C64) -> Result<C64> {
    let k = p.qp(p.kappa_j(j));
    let k2 = p.qp(p.kappa2_j(j));
    let den = one() - t * t;
    if den.norm() < POLE_EPS {
        return Err(QkzError::Pole(format!("c_{j} has a pole")));
    }
    Ok((one() - t / (k * k2)) * (one() + t * k2 / k) / den)
}

/// `C^{s_j}(z) = (q^{-k} T_j + (c_j - q^{-2k})) / c_j` on any Hecke module.
pub fn baxterized_generator<M: HeckeModule>(m: &M, j: usize, z: &[C64]) -> Result<CMat> {
    let p = m.params();
    let cj = c_fn(p, j, p.qp(simple_affine_root(p.n, j, z)))?;
    if cj.norm() < POLE_EPS {
        return Err(QkzError::Pole(format!("c_{j} vanishes")));
    }
    let km = p.qp(-p.kappa_j(j));
    Ok((m.t(j) * km + identity(m.dim()) * (cj - km * km)) / cj)
}

/// Baxterized cocycle along a word, each letter evaluated at the point moved
/// back by the preceding prefix.
pub fn baxterized_word_value<M: HeckeModule>(m: &M, word: &[usize], z: &[C64]) -> Result<CMat> {
    let n = m.params().n;
    let mut out = identity(m.dim());
    let mut prefix = AffineElement::identity(n);
    for &j in word {
        out *= baxterized_generator(m, j, &prefix.inverse().act(z))?;
        prefix = prefix.mul(&AffineElement::simple(n, j));
    }
    Ok(out)
}

/// The boundary qKZ cocycle on the spin space.
#[derive(Clone, Debug)]
pub struct TrigCocycle {
    pub rep: SpinRep,
}

impl TrigCocycle {
    pub fn new(params: ParameterSet) -> Result<Self> {
        Ok(TrigCocycle { rep: SpinRep::new(params)? })
    }

    pub fn params(&self) -> &ParameterSet {
        &self.rep.params
    }
    pub fn n(&self) -> usize {
        self.rep.n()
    }

    /// `C^{s_j}(z)` from the R- and K-matrices.
    pub fn generator(&self, j: usize, z: &[C64]) -> Result<CMat> {
        let p = self.params();
        let n = self.n();
        let m = if j == 0 {
            embed(n, 0, &k_left(p, c(0.5, 0.0) - z[0])?)
        } else if j == n {
            embed(n, n - 1, &k_right(p, z[n - 1])?)
        } else {
            embed(n, j - 1, &(flip() * r_trig(p, z[j - 1] - z[j])?))
        };
        Ok(m)
    }

    /// `C^{s_j}(z)` by Baxterization of the Hecke generator `T_j`.
    pub fn generator_baxterized(&self, j: usize, z: &[C64]) -> Result<CMat> {
        baxterized_generator(&self.rep, j, z)
    }

    /// `C^{s_{j_1} ... s_{j_r}}(z)` along the given word, each letter evaluated
    /// at the point moved back by the preceding prefix.
    pub fn word_value(&self, word: &[usize], z: &[C64]) -> Result<CMat> {
        let n = self.n();
        let mut m = identity(self.rep.dim());
        let mut prefix = AffineElement::identity(n);
        for &j in word {
            let arg = prefix.inverse().act(z);
            let g = self.generator(j, &arg).map_err(|e| match e {
                QkzError::Pole(s) => QkzError::Pole(format!("{s} (letter s_{j})")),
                other => other,
            })?;
            m *= g;
            prefix = prefix.mul(&AffineElement::simple(n, j));
        }
        Ok(m)
    }

    /// `C^u(z)` along a reduced word of `u`.
    pub fn value(&self, u: &AffineElement, z: &[C64]) -> Result<CMat> {
        self.word_value(&u.reduced_word(), z)
    }

    /// Transport operator `C^{tau(lambda)}(z)`.
    pub fn transport(&self, lambda: &[i64], z: &[C64]) -> Result<CMat> {
        self.word_value(&translation_word(lambda), z)
    }

    /// `C^{tau(e_i)}(z)` along the standard word (1-based `i`).
    pub fn transport_e(&self, i: usize, z: &[C64]) -> Result<CMat> {
        self.word_value(&tau_word(self.n(), i), z)
    }

    /// `C^{tau(-e_i)}(z)` as the explicit ordered product of R- and K-matrices.
    pub fn transport_minus_e_explicit(&self, i: usize, z: &[C64]) -> Result<CMat> {
        let p = self.params();
        let n = self.n();
        let r = |a: usize, b: usize, x: C64| -> Result<CMat> { Ok(embed_pair(n, a - 1, b - 1, &r_trig(p, x)?)) };
        let zi = z[i - 1];
        let zz = |k: usize| z[k - 1];
        let mut m = identity(1 << n);
        for k in i + 1..=n {
            m *= r(k, i, zi - zz(k))?;
        }
        m *= embed(n, i - 1, &k_right(p, zi)?);
        for k in (i + 1..=n).rev() {
            m *= r(i, k, zi + zz(k))?;
        }
        for k in (1..i).rev() {
            m *= r(i, k, zz(k) + zi)?;
        }
        m *= embed(n, i - 1, &k_left(p, c(0.5, 0.0) + zi)?);
        for k in 1..i {
            m *= r(k, i, one() - zz(k) + zi)?;
        }
        Ok(m)
    }

    /// `(nabla(v) f)(z) = C^v(z) f(v^{-1} z)`.
    pub fn nabla<F>(&self, v: &AffineElement, f: F, z: &[C64]) -> Result<CVec>
    where
        F: Fn(&[C64]) -> Result<CVec>,
    {
        let arg = v.inverse().act(z);
        Ok(self.value(v, z)? * f(&arg)?)
    }
}

/// Residual of `R_12(z1-z2) R_13(z1-z3) R_23(z2-z3) = R_23 R_13 R_12`.
pub fn ybe_residual(p: &ParameterSet, z: [C64; 3]) -> Result<f64> {
    let r = |a, b, x| -> Result<CMat> { Ok(embed_pair(3, a, b, &r_trig(p, x)?)) };
    let lhs = r(0, 1, z[0] - z[1])? * r(0, 2, z[0] - z[2])? * r(1, 2, z[1] - z[2])?;
    let rhs = r(1, 2, z[1] - z[2])? * r(0, 2, z[0] - z[2])? * r(0, 1, z[0] - z[1])?;
    Ok(crate::numerics::linalg::max_abs_diff(&lhs, &rhs))
}

/// Residual of `R_21(z) R(-z) = Id`.
pub fn unitarity_residual(p: &ParameterSet, z: C64) -> Result<f64> {
    let f = flip();
    let r21 = &f * r_trig(p, z)? * &f;
    Ok(crate::numerics::linalg::max_abs_diff(&(r21 * r_trig(p, -z)?), &identity(4)))
}

/// Residuals of `K(z) K(-z) = Id` for the right and left K-matrices.
pub fn k_unitarity_residuals(p: &ParameterSet, z: C64) -> Result<(f64, f64)> {
    let id = identity(2);
    let r = crate::numerics::linalg::max_abs_diff(&(k_right(p, z)? * k_right(p, -z)?), &id);
    let l = crate::numerics::linalg::max_abs_diff(&(k_left(p, z)? * k_left(p, -z)?), &id);
    Ok((r, l))
}

/// Residuals of the left and right reflection equations on `C^2 (x) C^2`.
pub fn reflection_residuals(p: &ParameterSet, z1: C64, z2: C64) -> Result<(f64, f64)> {
    let f = flip();
    let r = |x| r_trig(p, x);
    let r21 = |x| -> Result<CMat> { Ok(&f * r_trig(p, x)? * &f) };
    let l1 = embed(2, 0, &k_left(p, z1)?);
    let l2 = embed(2, 1, &k_left(p, z2)?);
    let k1 = embed(2, 0, &k_right(p, z1)?);
    let k2 = embed(2, 1, &k_right(p, z2)?);
    let left_lhs = r(z1 - z2)? * &l1 * r21(z1 + z2)? * &l2;
    let left_rhs = &l2 * r(z1 + z2)? * &l1 * r21(z1 - z2)?;
    let right_lhs = r21(z1 - z2)? * &k1 * r(z1 + z2)? * &k2;
    let right_rhs = &k2 * r21(z1 + z2)? * &k1 * r(z1 - z2)?;
    use crate::numerics::linalg::max_abs_diff;
    Ok((max_abs_diff(&left_lhs, &left_rhs), max_abs_diff(&right_lhs, &right_rhs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::{max_abs, max_abs_diff};

    fn z3() -> [C64; 3] {
        [c(0.31, 0.12), c(-0.47, 0.05), c(0.18, -0.22)]
    }

    #[test]
    fn r_at_zero_is_flip() {
        let p = ParameterSet::default_point(2);
        assert!(max_abs_diff(&r_trig(&p, zero()).unwrap(), &flip()) < 1e-15);
    }

    #[test]
    fn r_and_k_identities() {
        let p = ParameterSet::default_point(3);
        let z = z3();
        assert!(ybe_residual(&p, z).unwrap() < 1e-12);
        assert!(unitarity_residual(&p, z[0]).unwrap() < 1e-13);
        let (r, l) = k_unitarity_residuals(&p, z[1]).unwrap();
        assert!(r < 1e-13 && l < 1e-13);
        let (l, r) = reflection_residuals(&p, z[0], z[2]).unwrap();
        assert!(l < 1e-12, "left reflection residual {l}");
        assert!(r < 1e-12, "right reflection residual {r}");
    }

    #[test]
    fn generators_match_baxterization() {
        let cyc = TrigCocycle::new(ParameterSet::default_point(3)).unwrap();
        let z = z3();
        for j in 0..=3 {
            let a = cyc.generator(j, &z).unwrap();
            let b = cyc.generator_baxterized(j, &z).unwrap();
            assert!(max_abs_diff(&a, &b) < 1e-12, "generator s_{j}");
        }
    }

    #[test]
    fn explicit_transport_matches_word() {
        let cyc = TrigCocycle::new(ParameterSet::default_point(3)).unwrap();
        let z = z3();
        for i in 1..=3 {
            let mut lam = vec![0; 3];
            lam[i - 1] = -1;
            let a = cyc.transport(&lam, &z).unwrap();
            let b = cyc.transport_minus_e_explicit(i, &z).unwrap();
            assert!(max_abs_diff(&a, &b) < 1e-11 * max_abs(&a).max(1.0), "i = {i}");
        }
    }

    #[test]
    fn embed_pair_reversed_legs() {
        let m = r_trig(&ParameterSet::default_point(2), c(0.3, 0.1)).unwrap();
        let f = flip();
        assert!(max_abs_diff(&embed_pair(2, 1, 0, &m), &(&f * &m * &f)) < 1e-15);
        assert!(max_abs_diff(&embed_pair(2, 0, 1, &m), &m) < 1e-15);
    }
}
