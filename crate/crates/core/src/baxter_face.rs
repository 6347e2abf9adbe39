//! Gauges from the connection matrices to Baxter's dynamical R-matrix and
//! its elliptic K-matrices, their symmetries, and the face-model
//! reformulation on integer heights.

use std::sync::Arc;

use crate::elliptic_connection::{alpha_cm, beta_cm, column_shifted, ice_matrix, row_shifted};
use crate::error::{QkzError, Result};
use crate::numerics::linalg::{self, c, from_rows};
use crate::numerics::theta;
use crate::spin_rep::ParameterSet;
use crate::{CMat, C64};

type Coef = Arc<dyn Fn(C64, C64) -> Result<C64> + Send + Sync>;
type Scalar1 = Arc<dyn Fn(C64) -> Result<C64> + Send + Sync>;

fn one() -> C64 {
    c(1.0, 0.0)
}

fn th(p: &ParameterSet, x: C64) -> Result<C64> {
    theta(p.qp(x), p.q)
}

fn ratio(num: C64, den: C64, what: &str) -> Result<C64> {
    if den.norm() < 1e-300 {
        Err(QkzError::Pole(what.to_string()))
    } else {
        Ok(num / den)
    }
}

pub fn a_ba(p: &ParameterSet, z: C64, xi: C64) -> Result<C64> {
    let k2 = 2.0 * p.kappa;
    ratio(th(p, -z)? * th(p, k2 + xi)?, th(p, k2 - z)? * th(p, xi)?, "A_Ba denominator")
}

pub fn b_ba(p: &ParameterSet, z: C64, xi: C64) -> Result<C64> {
    let k2 = 2.0 * p.kappa;
    ratio(th(p, -z - xi)? * th(p, k2)?, th(p, k2 - z)? * th(p, -xi)?, "B_Ba denominator")
}

pub fn alpha_ba(p: &ParameterSet, z: C64, xi: C64) -> Result<C64> {
    Ok(alpha_cm(p, z, xi)? * p.qp(2.0 * z * xi))
}

pub fn beta_ba(p: &ParameterSet, z: C64, xi: C64) -> Result<C64> {
    beta_cm(p, z, xi)
}

pub fn r_ba(p: &ParameterSet, z: C64, xi: C64) -> Result<CMat> {
    Ok(ice_matrix(a_ba(p, z, xi)?, b_ba(p, z, xi)?, b_ba(p, z, -xi)?, a_ba(p, z, -xi)?))
}

pub fn k_ba(p: &ParameterSet, z: C64, xi: C64) -> Result<CMat> {
    Ok(from_rows(&[&[alpha_ba(p, z, xi)?, beta_ba(p, z, xi)?], &[beta_ba(p, z, -xi)?, alpha_ba(p, z, -xi)?]]))
}

/// A ice-rule R-matrix with its K-matrix, both given by their four
/// coefficient functions `A, B, alpha, beta` of `(z, xi)`.
#[derive(Clone)]
pub struct IcePair {
    pub a: Coef,
    pub b: Coef,
    pub alpha: Coef,
    pub beta: Coef,
}

impl IcePair {
    pub fn connection(p: &ParameterSet) -> Self {
        let (p1, p2, p3, p4) = (p.clone(), p.clone(), p.clone(), p.clone());
        IcePair {
            a: Arc::new(move |z, x| crate::elliptic_connection::a_cm(&p1, z, x)),
            b: Arc::new(move |z, x| crate::elliptic_connection::b_cm(&p2, z, x)),
            alpha: Arc::new(move |z, x| alpha_cm(&p3, z, x)),
            beta: Arc::new(move |z, x| beta_cm(&p4, z, x)),
        }
    }

    pub fn baxter(p: &ParameterSet) -> Self {
        let (p1, p2, p3, p4) = (p.clone(), p.clone(), p.clone(), p.clone());
        IcePair {
            a: Arc::new(move |z, x| a_ba(&p1, z, x)),
            b: Arc::new(move |z, x| b_ba(&p2, z, x)),
            alpha: Arc::new(move |z, x| alpha_ba(&p3, z, x)),
            beta: Arc::new(move |z, x| beta_ba(&p4, z, x)),
        }
    }

    pub fn r(&self, z: C64, xi: C64) -> Result<CMat> {
        Ok(ice_matrix((self.a)(z, xi)?, (self.b)(z, xi)?, (self.b)(z, -xi)?, (self.a)(z, -xi)?))
    }

    pub fn k(&self, z: C64, xi: C64) -> Result<CMat> {
        Ok(from_rows(&[&[(self.alpha)(z, xi)?, (self.beta)(z, xi)?], &[(self.beta)(z, -xi)?, (self.alpha)(z, -xi)?]]))
    }

    /// Gauge (i): `A -> u(xi) A`. `u` is rejected unless `u(xi) u(-xi) = 1`
    /// at the supplied probe points.
    pub fn gauge_i(&self, u: Scalar1, probes: &[C64]) -> Result<Self> {
        for &x in probes {
            let prod = u(x)? * u(-x)?;
            if (prod - one()).norm() > 1e-10 {
                return Err(QkzError::InvalidInput(format!("u(xi) u(-xi) = {prod} at xi = {x}")));
            }
        }
        let a = self.a.clone();
        Ok(IcePair { a: Arc::new(move |z, x| Ok(u(x)? * a(z, x)?)), ..self.clone() })
    }

    /// Gauge (ii): `A -> q^{2k(xi - z)} A`, `B -> q^{-z(2k + xi)} B`, `alpha -> q^{2 z xi} alpha`.
    pub fn gauge_ii(&self, p: &ParameterSet) -> Self {
        let (a, b, al) = (self.a.clone(), self.b.clone(), self.alpha.clone());
        let (p1, p2, p3) = (p.clone(), p.clone(), p.clone());
        IcePair {
            a: Arc::new(move |z, x| Ok(p1.qp(2.0 * p1.kappa * (x - z)) * a(z, x)?)),
            b: Arc::new(move |z, x| Ok(p2.qp(-z * (2.0 * p2.kappa + x)) * b(z, x)?)),
            alpha: Arc::new(move |z, x| Ok(p3.qp(2.0 * z * x) * al(z, x)?)),
            beta: self.beta.clone(),
        }
    }
}

/// The gauge-(i) factor taking `R_cm` towards `R_Ba`.
pub fn u_cm_to_ba(p: &ParameterSet, xi: C64) -> Result<C64> {
    let k2 = 2.0 * p.kappa;
    ratio(th(p, k2 + xi)? * th(p, -xi)?, th(p, k2 - xi)? * th(p, xi)?, "gauge factor denominator")
}

fn sigma_y() -> CMat {
    from_rows(&[&[c(0.0, 0.0), c(0.0, -1.0)], &[c(0.0, 1.0), c(0.0, 0.0)]])
}

/// Partial transpose in the first tensor leg of a 4x4 matrix.
pub fn partial_transpose_first(m: &CMat) -> CMat {
    let mut out = CMat::zeros(4, 4);
    for (r1, r2, c1, c2) in itertools_product() {
        out[(2 * c1 + r2, 2 * r1 + c2)] = m[(2 * r1 + r2, 2 * c1 + c2)];
    }
    out
}

fn itertools_product() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..16).map(|k| (k >> 3 & 1, k >> 2 & 1, k >> 1 & 1, k & 1))
}

fn sign_of(bit: usize) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Crossing symmetry in operator form, with the backward weight shift on
/// the right-hand side.
pub fn crossing_residual(p: &ParameterSet, z: C64, xi: C64) -> Result<f64> {
    let sy = linalg::embed(2, 1, &sigma_y());
    let lhs = &sy * partial_transpose_first(&r_ba(p, z, xi)?) * &sy;
    let k = p.kappa;
    let shifted = row_shifted(2, xi, |e| 2.0 * k * e[1] as f64, |s| r_ba(p, 2.0 * k - z, s))?;
    let mut pref = CMat::zeros(4, 4);
    for idx in 0..4 {
        let e2 = sign_of(idx & 1);
        let num = th(p, xi + 2.0 * k * e2)? * th(p, z)?;
        let den = th(p, xi)? * th(p, z - 2.0 * k)?;
        pref[(idx, idx)] = p.qp(-k * (1.0 + e2)) * ratio(num, den, "crossing prefactor")?;
    }
    let rhs = pref * shifted;
    Ok(linalg::max_abs_diff(&lhs, &rhs) / linalg::max_abs(&lhs).max(1.0))
}

/// Coefficient `R^{e1 e2}_{d1 d2}`: component of `v_e1 (x) v_e2` in `R(v_d1 (x) v_d2)`.
pub fn r_coeff(m: &CMat, e1: i8, e2: i8, d1: i8, d2: i8) -> C64 {
    let idx = |a: i8, b: i8| 2 * (a < 0) as usize + (b < 0) as usize;
    m[(idx(e1, e2), idx(d1, d2))]
}

/// Crossing symmetry in the componentwise form.
pub fn crossing_residual_coordinates(p: &ParameterSet, z: C64, xi: C64) -> Result<f64> {
    let k = p.kappa;
    let r = r_ba(p, z, xi)?;
    let mut worst = 0.0f64;
    for (d1, d2, e1, e2) in signs4() {
        let lhs = r_coeff(&r, d1, -e2, e1, -d2) * (d2 * e2) as f64;
        let e2f = e2 as f64;
        let pref = p.qp(-k * (1.0 + e2f))
            * ratio(th(p, xi + 2.0 * k * e2f)? * th(p, z)?, th(p, xi)? * th(p, z - 2.0 * k)?, "crossing prefactor")?;
        let rhs = pref * r_coeff(&r_ba(p, 2.0 * k - z, xi + 2.0 * k * e2f)?, e1, e2, d1, d2);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

fn signs4() -> impl Iterator<Item = (i8, i8, i8, i8)> {
    itertools_product().map(|(a, b, c, d)| (1 - 2 * a as i8, 1 - 2 * b as i8, 1 - 2 * c as i8, 1 - 2 * d as i8))
}

/// `S K_Ba(z, xi) S^{-1} - K_Ba(z, -xi)` with `S` the spin reversal.
pub fn spin_reversal_residual(p: &ParameterSet, z: C64, xi: C64) -> Result<f64> {
    let s = from_rows(&[&[c(0.0, 0.0), one()], &[one(), c(0.0, 0.0)]]);
    Ok(linalg::max_abs_diff(&(&s * k_ba(p, z, xi)? * &s), &k_ba(p, z, -xi)?))
}

/// `R_Ba,21(z, xi) - R_Ba(z, -xi + 2k(h_1 + h_2))`.
pub fn p_symmetry_residual(p: &ParameterSet, z: C64, xi: C64) -> Result<f64> {
    let f = crate::trig_cocycle::flip();
    let lhs = &f * r_ba(p, z, xi)? * &f;
    let rhs = column_shifted(2, -xi, |e| 2.0 * p.kappa * (e[0] + e[1]) as f64, |s| r_ba(p, z, s))?;
    Ok(linalg::max_abs_diff(&lhs, &rhs))
}

/// `mu(z)`; the dual `mu~` is `mu` with `upsilon` and `zeta'` interchanged.
pub fn mu_fn(p: &ParameterSet, z: C64) -> Result<C64> {
    let qz = p.qp(z);
    let num = p.abcd().iter().try_fold(one(), |acc, &t| Ok::<_, QkzError>(acc * theta(t * qz, p.q)?))?;
    Ok(ratio(num, th(p, 2.0 * z)?, "mu denominator")? * p.qp(2.0 * (p.zeta + p.zeta_p) * z))
}

/// `beta_Ba(z, xi) - mu~(xi) / mu(-z)`.
pub fn beta_decoupling_residual(p: &ParameterSet, z: C64, xi: C64) -> Result<f64> {
    let b = beta_ba(p, z, xi)?;
    let d = ratio(mu_fn(&p.dual(), xi)?, mu_fn(p, -z)?, "mu(-z) vanishes")?;
    Ok((b - d).norm() / b.norm().max(1.0))
}

/// Whether `K_Ba` is anti-diagonal at `(z, xi)`, i.e. `C(z, xi) = C~(xi, z)`.
pub fn is_antidiagonal(p: &ParameterSet, z: C64, xi: C64) -> Result<bool> {
    let a = crate::elliptic_connection::c_fn(p, z, xi)?;
    let b = crate::elliptic_connection::c_dual_fn(p, xi, z)?;
    Ok((a - b).norm() < 1e-12 * a.norm().max(1.0))
}

/// `A_ab`: heights `a, b` are adjacent iff `|a - b| = 1`.
pub fn adjacent(a: i64, b: i64) -> bool {
    (a - b).abs() == 1
}

fn spin(d: i64) -> Option<i8> {
    match d {
        1 => Some(1),
        -1 => Some(-1),
        _ => None,
    }
}

/// `W(a b; c d | z, xi) = R^{d-c, c-a}_{b-a, d-b}(z, xi - 2k a)` for any
/// ice-rule R.
pub fn face_weight<R>(r: &R, kappa: C64, h: [i64; 4], z: C64, xi: C64) -> Result<C64>
where
    R: Fn(C64, C64) -> Result<CMat>,
{
    let [a, b, cc, d] = h;
    match (spin(d - cc), spin(cc - a), spin(b - a), spin(d - b)) {
        (Some(e1), Some(e2), Some(d1), Some(d2)) => Ok(r_coeff(&r(z, xi - 2.0 * kappa * a as f64)?, e1, e2, d1, d2)),
        _ => Ok(c(0.0, 0.0)),
    }
}

/// `B(b; c, a | z, xi) = K^{a-b}_{c-b}(z, xi/2 - k b)`.
pub fn boundary_face_weight<K>(k: &K, kappa: C64, b: i64, cc: i64, a: i64, z: C64, xi: C64) -> Result<C64>
where
    K: Fn(C64, C64) -> Result<CMat>,
{
    match (spin(a - b), spin(cc - b)) {
        (Some(out), Some(inp)) => {
            let m = k(z, 0.5 * xi - kappa * b as f64)?;
            Ok(m[((out < 0) as usize, (inp < 0) as usize)])
        }
        _ => Ok(c(0.0, 0.0)),
    }
}

/// `u(xi) = q^{-k} (theta(q^{2k - xi}) / theta(q^{-2k - xi}))^{1/2}`, principal branch.
pub fn u_sos(p: &ParameterSet, xi: C64) -> Result<C64> {
    let k2 = 2.0 * p.kappa;
    Ok(p.qp(-p.kappa) * ratio(th(p, k2 - xi)?, th(p, -k2 - xi)?, "u denominator")?.sqrt())
}

/// Face weights of the eight-vertex SOS model and its boundary weights.
#[derive(Clone, Debug)]
pub struct FaceWeightTable {
    pub params: ParameterSet,
}

impl FaceWeightTable {
    pub fn new(params: ParameterSet) -> Self {
        FaceWeightTable { params }
    }

    /// Explicit `W_8vSOS(a b; c d | z, xi)`; zero off the admissible configurations.
    pub fn w(&self, h: [i64; 4], z: C64, xi: C64) -> Result<C64> {
        let p = &self.params;
        let k = p.kappa;
        let [a, b, cc, d] = h;
        if !(adjacent(a, b) && adjacent(a, cc) && adjacent(b, d) && adjacent(cc, d)) {
            return Ok(c(0.0, 0.0));
        }
        let x = |m: i64| -xi + 2.0 * k * m as f64;
        if b == cc {
            // W(a, a+-1; a+-1, a)  or  W(a+-1, a; a, a-+1)
            if a == d {
                let s = (b - a) as f64;
                return ratio(p.qp(-s * z / 2.0) * th(p, s * z + x(a))?, th(p, x(a))?, "W_8vSOS denominator");
            }
            return ratio(p.qp(z / 2.0) * th(p, 2.0 * k - z)?, th(p, 2.0 * k)?, "W_8vSOS denominator");
        }
        // W(a, a+-1; a-+1, a)
        let rad = ratio(th(p, x(a - 1))? * th(p, x(a + 1))?, th(p, x(a))?.powi(2), "W_8vSOS denominator")?;
        ratio(p.qp(k) * rad.sqrt() * p.qp(z / 2.0) * th(p, -z)?, th(p, 2.0 * k)?, "W_8vSOS denominator")
    }

    /// Explicit `B_8vSOS(b; c, a | z, xi)`.
    pub fn b(&self, b: i64, cc: i64, a: i64, z: C64, xi: C64) -> Result<C64> {
        let p = &self.params;
        if !(adjacent(b, a) && adjacent(b, cc)) {
            return Ok(c(0.0, 0.0));
        }
        let s = (a - b) as f64;
        let arg = s * (0.5 * xi - p.kappa * b as f64);
        if a == cc {
            alpha_ba(p, z, arg)
        } else {
            beta_ba(p, z, arg)
        }
    }

    /// The gauged matrix `R_8vSOS(z, xi)` with the principal-branch `u`.
    pub fn r_8vsos(&self, z: C64, xi: C64) -> Result<CMat> {
        let p = &self.params;
        let pref = ratio(p.qp(z / 2.0) * th(p, 2.0 * p.kappa - z)?, th(p, 2.0 * p.kappa)?, "R_8vSOS prefactor")?;
        let m = ice_matrix(
            u_sos(p, xi)? * a_ba(p, z, xi)?,
            b_ba(p, z, xi)?,
            b_ba(p, z, -xi)?,
            u_sos(p, -xi)? * a_ba(p, z, -xi)?,
        );
        Ok(m * pref)
    }
}

/// Star-triangle residual for heights `[a, b, c, d, e, f]`.
pub fn star_triangle_residual<W>(w: &W, h: [i64; 6], z: [C64; 3]) -> Result<f64>
where
    W: Fn([i64; 4], C64) -> Result<C64>,
{
    let [a, b, cc, d, e, f] = h;
    let mut lhs = c(0.0, 0.0);
    for g in [f - 1, f + 1] {
        lhs += w([f, g, a, b], z[0] - z[1])? * w([g, d, b, cc], z[0] - z[2])? * w([f, e, g, d], z[1] - z[2])?;
    }
    let mut rhs = c(0.0, 0.0);
    for g in [a - 1, a + 1] {
        rhs += w([a, g, b, cc], z[1] - z[2])? * w([f, e, a, g], z[0] - z[2])? * w([e, d, g, cc], z[0] - z[1])?;
    }
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1.0))
}

/// Boundary Yang-Baxter residual for heights `[a, b, c, d, e]`.
pub fn boundary_ybe_residual<W, B>(w: &W, bw: &B, h: [i64; 5], z1: C64, z2: C64) -> Result<f64>
where
    W: Fn([i64; 4], C64) -> Result<C64>,
    B: Fn(i64, i64, i64, C64) -> Result<C64>,
{
    let [a, b, cc, d, e] = h;
    let mut lhs = c(0.0, 0.0);
    for f in [cc - 1, cc + 1] {
        for g in [f - 1, f + 1] {
            lhs += w([cc, f, d, e], z1 - z2)? * bw(f, g, e, z1)? * w([cc, b, f, g], z1 + z2)? * bw(b, a, g, z2)?;
        }
    }
    let mut rhs = c(0.0, 0.0);
    for g in [d - 1, d + 1] {
        for f in [cc - 1, cc + 1] {
            rhs += bw(d, g, e, z2)? * w([cc, f, d, g], z1 + z2)? * bw(f, a, g, z1)? * w([cc, b, f, a], z1 - z2)?;
        }
    }
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1.0))
}

/// Bulk inversion `sum_e W(d e; a b | z) W(d c; e b | -z) - delta_ac`.
pub fn inversion_residual<W>(w: &W, a: i64, b: i64, cc: i64, d: i64, z: C64) -> Result<f64>
where
    W: Fn([i64; 4], C64) -> Result<C64>,
{
    let mut s = c(0.0, 0.0);
    for e in [d - 1, d + 1] {
        s += w([d, e, a, b], z)? * w([d, cc, e, b], -z)?;
    }
    Ok((s - if a == cc { one() } else { c(0.0, 0.0) }).norm())
}

/// Boundary inversion `sum_d B(b; d, c | z) B(b; a, d | -z) - delta_ac`.
pub fn boundary_inversion_residual<B>(bw: &B, a: i64, b: i64, cc: i64, z: C64) -> Result<f64>
where
    B: Fn(i64, i64, i64, C64) -> Result<C64>,
{
    let mut s = c(0.0, 0.0);
    for d in [b - 1, b + 1] {
        s += bw(b, d, cc, z)? * bw(b, a, d, -z)?;
    }
    Ok((s - if a == cc { one() } else { c(0.0, 0.0) }).norm())
}

fn closed_walks(len: usize, window: std::ops::RangeInclusive<i64>, closed: bool) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = window.clone().map(|a| vec![a]).collect();
    for _ in 1..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                let last = *w.last().unwrap();
                [last - 1, last + 1].into_iter().filter(|h| window.contains(h)).map(move |h| {
                    let mut v = w.clone();
                    v.push(h);
                    v
                })
            })
            .collect();
    }
    if closed {
        out.retain(|w| adjacent(*w.last().unwrap(), w[0]));
    }
    out
}

/// Height tuples `[a..f]` with `A_ab A_bc A_dc A_ed A_fe A_fa = 1` inside `window`.
pub fn star_triangle_tuples(window: std::ops::RangeInclusive<i64>) -> Vec<[i64; 6]> {
    closed_walks(6, window, true).into_iter().map(|w| [w[0], w[1], w[2], w[3], w[4], w[5]]).collect()
}

/// Height tuples `[a..e]` with `A_ab A_bc A_cd A_de = 1` inside `window`.
pub fn boundary_tuples(window: std::ops::RangeInclusive<i64>) -> Vec<[i64; 5]> {
    closed_walks(5, window, false).into_iter().map(|w| [w[0], w[1], w[2], w[3], w[4]]).collect()
}
