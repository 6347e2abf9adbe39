//! Boundary quantum KZB equations: difference operators in the dynamical
//! variable, the affine Weyl group cocycle generated by a dynamical R-matrix
//! with a left and a right K-matrix, and the nine coupling instance built
//! from Baxter's matrices.
//!
//! Difference operators are extensional: an operator is its action on
//! functions `xi -> V^{(x) n}`, with the spectral point `z` fixed when the
//! operator is built.

use std::sync::Arc;

use rand::Rng;

use crate::baxter_face::{k_ba, r_ba};
use crate::elliptic_connection::{column_shifted, k_unitarity_residual, left_reflection_residual, m_generator};
use crate::error::{QkzError, Result};
use crate::numerics::linalg::{self, c, embed};
use crate::spin_rep::ParameterSet;
use crate::trig_cocycle::embed_pair;
use crate::weylc::AffineElement;
use crate::{CMat, CVec, C64};

/// A function of the dynamical variable with values in `V^{(x) n}`.
pub type XiFn = Arc<dyn Fn(C64) -> Result<CVec> + Send + Sync>;
/// A function of `(z, xi)` with values in `V^{(x) n}`.
pub type ZXiFn = Arc<dyn Fn(&[C64], C64) -> Result<CVec> + Send + Sync>;
/// An operator-valued function of `(z, xi)`.
pub type MatFn = Arc<dyn Fn(C64, C64) -> Result<CMat> + Send + Sync>;

/// `(T_{alpha h_i} f)(xi) = sum_mu f_mu(xi + alpha mu_i)`, leg `i` 0-based.
pub fn weight_shift(n: usize, alpha: C64, leg: usize, f: XiFn) -> XiFn {
    if alpha == c(0.0, 0.0) {
        return f;
    }
    let bit = 1usize << (n - 1 - leg);
    Arc::new(move |xi| {
        let plus = f(xi + alpha)?;
        let minus = f(xi - alpha)?;
        Ok(CVec::from_fn(1 << n, |s, _| if s & bit == 0 { plus[s] } else { minus[s] }))
    })
}

/// A linear difference operator in `xi` on `V^{(x) n}`-valued functions.
#[derive(Clone)]
pub struct DifferenceOperator {
    n: usize,
    action: Arc<dyn Fn(XiFn) -> XiFn + Send + Sync>,
}

impl DifferenceOperator {
    pub fn identity(n: usize) -> Self {
        DifferenceOperator { n, action: Arc::new(|f| f) }
    }

    /// Pointwise multiplication by `m(xi)`.
    pub fn multiplication(n: usize, m: Arc<dyn Fn(C64) -> Result<CMat> + Send + Sync>) -> Self {
        DifferenceOperator {
            n,
            action: Arc::new(move |f: XiFn| {
                let m = m.clone();
                Arc::new(move |xi| Ok(m(xi)? * f(xi)?))
            }),
        }
    }

    /// `T_{alpha h_i}`.
    pub fn weight_shift(n: usize, alpha: C64, leg: usize) -> Self {
        DifferenceOperator { n, action: Arc::new(move |f| weight_shift(n, alpha, leg, f)) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `self o other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let (a, b) = (self.action.clone(), other.action.clone());
        DifferenceOperator { n: self.n, action: Arc::new(move |f| a(b(f))) }
    }

    pub fn apply(&self, f: XiFn) -> XiFn {
        (self.action)(f)
    }
}

/// The four boundary couplings `(zeta, zeta', upsilon, upsilon')` of a K-matrix.
pub type BoundaryPack = [C64; 4];

/// The nine couplings of the elliptic boundary qKZB system.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BaxterCouplings {
    pub q: f64,
    pub kappa: C64,
    pub right: BoundaryPack,
    pub left: BoundaryPack,
}

impl BaxterCouplings {
    /// Right pack from the reference point, left pack a fixed nearby point.
    pub fn default_point() -> Self {
        let p = ParameterSet::default_point(2);
        BaxterCouplings {
            q: p.q,
            kappa: p.kappa,
            right: [p.zeta, p.zeta_p, p.upsilon, p.upsilon_p],
            left: [c(0.1, -0.05), c(0.3, 0.0), c(-0.2, 0.1), c(0.15, 0.2)],
        }
    }

    fn params(&self, n: usize, pack: &BoundaryPack) -> ParameterSet {
        ParameterSet {
            n,
            q: self.q,
            kappa: self.kappa,
            zeta: pack[0],
            zeta_p: pack[1],
            upsilon: pack[2],
            upsilon_p: pack[3],
            xi: c(0.0, 0.0),
        }
    }
}

/// A dynamical R-matrix with right and left dynamical K-matrices on `V = C^2`.
#[derive(Clone)]
pub struct QKZBSystem {
    pub n: usize,
    pub kappa: C64,
    pub couplings: Option<BaxterCouplings>,
    r: MatFn,
    k_right: MatFn,
    k_left: MatFn,
}

impl QKZBSystem {
    pub fn new(n: usize, kappa: C64, r: MatFn, k_right: MatFn, k_left: MatFn) -> Self {
        QKZBSystem { n, kappa, couplings: None, r, k_right, k_left }
    }

    pub fn r(&self, z: C64, xi: C64) -> Result<CMat> {
        (self.r)(z, xi)
    }

    pub fn k_right(&self, z: C64, xi: C64) -> Result<CMat> {
        (self.k_right)(z, xi)
    }

    pub fn k_left(&self, z: C64, xi: C64) -> Result<CMat> {
        (self.k_left)(z, xi)
    }

    pub fn with_k_right(&self, k: MatFn) -> Self {
        QKZBSystem { k_right: k, couplings: None, ..self.clone() }
    }

    pub fn with_k_left(&self, k: MatFn) -> Self {
        QKZBSystem { k_left: k, couplings: None, ..self.clone() }
    }

    /// Whether `[K_left(z, xi), h] = 0` at the given points.
    pub fn left_is_diagonal(&self, points: &[(C64, C64)]) -> Result<bool> {
        for &(z, xi) in points {
            let k = self.k_left(z, xi)?;
            let scale = linalg::max_abs(&k).max(1.0);
            if k[(0, 1)].norm() > 1e-14 * scale || k[(1, 0)].norm() > 1e-14 * scale {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `M^{s_j}(z)` for `0 <= j <= n`.
    pub fn generator(&self, j: usize, z: &[C64]) -> DifferenceOperator {
        if j == 0 {
            return m_s0(z, self);
        }
        let (sys, z) = (self.clone(), z.to_vec());
        DifferenceOperator::multiplication(
            self.n,
            Arc::new(move |xi| {
                m_generator(&|x, s| sys.r(x, s), &|x, s| sys.k_right(x, s), sys.kappa, sys.n, j, &z, xi)
            }),
        )
    }

    /// `M^w(z)` along a word via `M^{uv}(z) = M^u(z) M^v(u^{-1} z)`.
    pub fn cocycle_word(&self, word: &[usize], z: &[C64]) -> DifferenceOperator {
        let mut out = DifferenceOperator::identity(self.n);
        let mut prefix = AffineElement::identity(self.n);
        for &j in word {
            out = out.compose(&self.generator(j, &prefix.inverse().act(z)));
            prefix = prefix.mul(&AffineElement::simple(self.n, j));
        }
        out
    }
}

/// `M^{s_0}(z) = T_{-k h_1} K_left_1(1/2 - z_1, .) T_{k h_1}`.
pub fn m_s0(z: &[C64], sys: &QKZBSystem) -> DifferenceOperator {
    let n = sys.n;
    let x = c(0.5, 0.0) - z[0];
    let kl = sys.k_left.clone();
    let k = DifferenceOperator::multiplication(n, Arc::new(move |xi| Ok(embed(n, 0, &kl(x, xi)?))));
    DifferenceOperator::weight_shift(n, -sys.kappa, 0)
        .compose(&k)
        .compose(&DifferenceOperator::weight_shift(n, sys.kappa, 0))
}

/// The multiplication operator `K_left_1(1/2 - z_1, xi - k h_1)`, which equals
/// `M^{s_0}(z)` when the left K-matrix commutes with `h`.
pub fn m_s0_diagonal(z: &[C64], sys: &QKZBSystem, xi: C64) -> Result<CMat> {
    let x = c(0.5, 0.0) - z[0];
    column_shifted(sys.n, xi, |e| -sys.kappa * e[0] as f64, |s| Ok(embed(sys.n, 0, &sys.k_left(x, s)?)))
}

/// `M^v(z)` along the reduced word of `v` found by descent stripping.
pub fn qkzb_cocycle(v: &AffineElement, z: &[C64], sys: &QKZBSystem) -> DifferenceOperator {
    sys.cocycle_word(&v.reduced_word(), z)
}

/// The left hand side of the first qKZB equation, `M^{tau(-e_1)}(z) f(z + e_1, .)`,
/// assembled from the explicit product of R- and K-matrices.
pub fn transport_e1(z: &[C64], sys: &QKZBSystem, f: &ZXiFn) -> XiFn {
    let n = sys.n;
    let zs = z.to_vec();
    let mut shifted = zs.clone();
    shifted[0] += 1.0;
    let f = f.clone();
    let g: XiFn = Arc::new(move |xi| f(&shifted, xi));
    let kl = sys.k_left.clone();
    let x = c(0.5, 0.0) + zs[0];
    let lower = DifferenceOperator::weight_shift(n, -sys.kappa, 0)
        .compose(&DifferenceOperator::multiplication(n, Arc::new(move |xi| Ok(embed(n, 0, &kl(x, xi)?)))))
        .compose(&DifferenceOperator::weight_shift(n, sys.kappa, 0))
        .apply(g);
    let sys = sys.clone();
    Arc::new(move |xi| Ok(transport_e1_matrix(&zs, &sys, xi)? * lower(xi)?))
}

/// The `R ... R K_1 R ... R` factor of the first transport operator at `xi`.
fn transport_e1_matrix(z: &[C64], sys: &QKZBSystem, xi: C64) -> Result<CMat> {
    let n = sys.n;
    let kappa = sys.kappa;
    let middle = |e: &[i8], upto: usize| (1..upto).map(|j| e[j] as f64).sum::<f64>();
    let mut out = linalg::identity(1 << n);
    // R_{k1}(z_1 - z_k, 2 xi - 2k(h_2 + ... + h_{k-1})) for k = 2..n.
    for k in 1..n {
        let x = z[0] - z[k];
        out *= column_shifted(n, 2.0 * xi, |e| -2.0 * kappa * middle(e, k), |s| Ok(embed_pair(n, k, 0, &sys.r(x, s)?)))?;
    }
    out *= column_shifted(n, xi, |e| -kappa * middle(e, n), |s| Ok(embed(n, 0, &sys.k_right(z[0], s)?)))?;
    // R_{1k}(z_1 + z_k, 2 xi - 2k(h_2 + ... + h_{k-1})) for k = n..2.
    for k in (1..n).rev() {
        let x = z[0] + z[k];
        out *= column_shifted(n, 2.0 * xi, |e| -2.0 * kappa * middle(e, k), |s| Ok(embed_pair(n, 0, k, &sys.r(x, s)?)))?;
    }
    Ok(out)
}

/// The nine coupling system with `R = R_Ba`, `K_right = K_Ba(.; right pack)`
/// and `K_left(z, xi) = K_Ba(z, -xi; left pack)`.
pub fn baxter_system(couplings: &BaxterCouplings, n: usize) -> Result<QKZBSystem> {
    if n == 0 {
        return Err(QkzError::InvalidInput("rank must be positive".into()));
    }
    let base = couplings.params(n, &couplings.right);
    base.validate().or_else(|e| if n == 1 { Ok(()) } else { Err(e) })?;
    let right = couplings.params(n, &couplings.right);
    let left = couplings.params(n, &couplings.left);
    for (name, p) in [("right", &right), ("left", &left)] {
        check_pack(name, p)?;
    }
    let rp = base.clone();
    let mut sys = QKZBSystem::new(
        n,
        couplings.kappa,
        Arc::new(move |z, xi| r_ba(&rp, z, xi)),
        Arc::new(move |z, xi| k_ba(&right, z, xi)),
        Arc::new(move |z, xi| k_ba(&left, z, -xi)),
    );
    sys.couplings = Some(couplings.clone());
    Ok(sys)
}

/// A pack is degenerate when its K-matrix is not finite and invertible at
/// a generic probe point.
fn check_pack(name: &str, p: &ParameterSet) -> Result<()> {
    let pack = [p.zeta, p.zeta_p, p.upsilon, p.upsilon_p];
    if pack.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(QkzError::Config(format!("{name} boundary pack has non-finite couplings")));
    }
    let (z, xi) = (c(0.137, 0.071), c(0.291, -0.043));
    let k = k_ba(p, z, xi).map_err(|e| QkzError::NonGeneric(format!("{name} boundary pack: {e}")))?;
    let det = k[(0, 0)] * k[(1, 1)] - k[(0, 1)] * k[(1, 0)];
    if !det.norm().is_finite() || det.norm() < 1e-10 * linalg::max_abs(&k).powi(2) {
        return Err(QkzError::NonGeneric(format!("{name} boundary pack gives a singular K-matrix")));
    }
    Ok(())
}

/// Left reflection and unitarity residual of the left K-matrix of `sys`.
pub fn left_k_residual(sys: &QKZBSystem, z1: C64, z2: C64, xi: C64) -> Result<f64> {
    let refl = left_reflection_residual(&|x, s| sys.r(x, s), &|x, s| sys.k_left(x, s), sys.kappa, z1, z2, xi)?;
    Ok(refl.max(k_unitarity_residual(&|x, s| sys.k_left(x, s), z1, xi)?))
}

/// Probe function `sum_eps a_eps q^{c_eps . z + d_eps xi} v_eps`.
#[derive(Clone, Debug)]
pub struct ProbeFunction {
    pub q: f64,
    pub coeffs: Vec<C64>,
    pub z_rates: Vec<Vec<f64>>,
    pub xi_rates: Vec<f64>,
}

impl ProbeFunction {
    pub fn random<R: Rng>(n: usize, q: f64, rng: &mut R) -> Self {
        let dim = 1usize << n;
        ProbeFunction {
            q,
            coeffs: (0..dim).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
            z_rates: (0..dim).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect(),
            xi_rates: (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }

    pub fn eval(&self, z: &[C64], xi: C64) -> CVec {
        let lq = self.q.ln();
        CVec::from_fn(self.coeffs.len(), |s, _| {
            let e: C64 = self.z_rates[s].iter().zip(z).map(|(r, x)| *r * x).sum::<C64>() + self.xi_rates[s] * xi;
            self.coeffs[s] * (e * lq).exp()
        })
    }

    pub fn as_fn(&self) -> ZXiFn {
        let me = self.clone();
        Arc::new(move |z, xi| Ok(me.eval(z, xi)))
    }

    /// `xi -> f(z, xi)`.
    pub fn at(&self, z: &[C64]) -> XiFn {
        let (me, z) = (self.clone(), z.to_vec());
        Arc::new(move |xi| Ok(me.eval(&z, xi)))
    }
}

/// A relation between two words of the affine Weyl group.
#[derive(Clone, Debug)]
pub struct WordRelation {
    pub name: String,
    pub lhs: Vec<usize>,
    pub rhs: Vec<usize>,
}

/// Quadratic and braid relations of the affine Weyl group of type C_n,
/// `n >= 2`, as pairs of words.
pub fn affine_relations(n: usize) -> Vec<WordRelation> {
    let mut out: Vec<WordRelation> =
        (0..=n).map(|j| WordRelation { name: format!("s{j}^2"), lhs: vec![j, j], rhs: vec![] }).collect();
    for i in 0..=n {
        for j in i + 1..=n {
            let m = if j - i >= 2 {
                2
            } else if i == 0 || j == n {
                4
            } else {
                3
            };
            let alt = |a: usize, b: usize| (0..m).map(|k| if k % 2 == 0 { a } else { b }).collect::<Vec<_>>();
            out.push(WordRelation { name: format!("braid(s{i},s{j})"), lhs: alt(i, j), rhs: alt(j, i) });
        }
    }
    out
}

/// Relative residual of two operators applied to `f` and evaluated at `xi`.
pub fn operator_residual(a: &DifferenceOperator, b: &DifferenceOperator, f: &XiFn, xi: C64) -> Result<f64> {
    let u = a.apply(f.clone())(xi)?;
    let v = b.apply(f.clone())(xi)?;
    let scale = linalg::max_abs_vec(&u).max(linalg::max_abs_vec(&v)).max(1.0);
    Ok(linalg::max_abs_vec(&(u - v)) / scale)
}

/// Largest residual of `rel` over the probes at the point `(z, xi)`.
pub fn relation_residual(sys: &QKZBSystem, rel: &WordRelation, z: &[C64], xi: C64, probes: &[ProbeFunction]) -> Result<f64> {
    let a = sys.cocycle_word(&rel.lhs, z);
    let b = sys.cocycle_word(&rel.rhs, z);
    probes.iter().try_fold(0.0f64, |acc, p| Ok(acc.max(operator_residual(&a, &b, &p.at(z), xi)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weylc::{eps_from_index, tau_word, translation_word};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sys(n: usize) -> QKZBSystem {
        baxter_system(&BaxterCouplings::default_point(), n).unwrap()
    }

    fn zpt(n: usize) -> Vec<C64> {
        [c(0.13, 0.04), c(-0.21, 0.07), c(0.32, -0.05)][..n].to_vec()
    }

    fn probes(n: usize, count: usize, seed: u64) -> Vec<ProbeFunction> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| ProbeFunction::random(n, 0.3, &mut rng)).collect()
    }

    fn vec_diff(a: &CVec, b: &CVec) -> f64 {
        linalg::max_abs_vec(&(a - b))
    }

    #[test]
    fn weight_shift_basics() {
        let p = probes(2, 1, 1).remove(0);
        let f = p.at(&zpt(2));
        let xi = c(0.41, 0.02);
        let zero = weight_shift(2, c(0.0, 0.0), 1, f.clone());
        assert_eq!(zero(xi).unwrap(), f(xi).unwrap());
        let a = c(0.23, -0.1);
        let back = weight_shift(2, -a, 0, weight_shift(2, a, 0, f.clone()));
        assert!(vec_diff(&back(xi).unwrap(), &f(xi).unwrap()) < 1e-15);
        // On a component of weight +1 on leg 2 the shift is by +alpha.
        let shifted = weight_shift(2, a, 1, f.clone())(xi).unwrap();
        assert!((shifted[0] - f(xi + a).unwrap()[0]).norm() < 1e-15);
        assert!((shifted[1] - f(xi - a).unwrap()[1]).norm() < 1e-15);
    }

    #[test]
    fn s0_matrix_elements() {
        let s = sys(2);
        let z = zpt(2);
        let f = probes(2, 1, 2).remove(0).at(&z);
        let xi = c(0.37, 0.05);
        let got = m_s0(&z, &s).apply(f.clone())(xi).unwrap();
        let x = c(0.5, 0.0) - z[0];
        let mut want = CVec::zeros(4);
        let kappa = s.kappa;
        for row in 0..4 {
            let nu = eps_from_index(2, row)[0] as f64;
            for mu_bit in 0..2usize {
                let mu = if mu_bit == 0 { 1.0 } else { -1.0 };
                let k = s.k_left(x, xi - kappa * nu).unwrap();
                let col = (row & 1) | (mu_bit << 1);
                let fv = f(xi + kappa * (mu - nu)).unwrap();
                want[row] += k[(row >> 1, mu_bit)] * fv[col];
            }
        }
        assert!(vec_diff(&got, &want) < 1e-13);
    }

    #[test]
    fn s0_diagonal_left_k_is_multiplication() {
        let base = sys(2);
        let kl = base.k_left.clone();
        let diag = base.with_k_left(Arc::new(move |z, xi| {
            let k = kl(z, xi)?;
            Ok(CMat::from_diagonal(&k.diagonal()))
        }));
        assert!(diag.left_is_diagonal(&[(c(0.1, 0.0), c(0.3, 0.0))]).unwrap());
        assert!(!base.left_is_diagonal(&[(c(0.1, 0.0), c(0.3, 0.0))]).unwrap());
        let z = zpt(2);
        let f = probes(2, 1, 3).remove(0).at(&z);
        let xi = c(0.44, -0.03);
        let got = m_s0(&z, &diag).apply(f.clone())(xi).unwrap();
        let want = m_s0_diagonal(&z, &diag, xi).unwrap() * f(xi).unwrap();
        assert!(vec_diff(&got, &want) < 1e-13);
    }

    #[test]
    fn identity_left_k_gives_identity() {
        let s = sys(2).with_k_left(Arc::new(|_, _| Ok(linalg::identity(2))));
        let z = zpt(2);
        let f = probes(2, 1, 4).remove(0).at(&z);
        let xi = c(0.3, 0.1);
        assert!(vec_diff(&m_s0(&z, &s).apply(f.clone())(xi).unwrap(), &f(xi).unwrap()) < 1e-15);
    }

    #[test]
    fn left_pack_equal_right_pack() {
        let mut cp = BaxterCouplings::default_point();
        cp.left = cp.right;
        let s = baxter_system(&cp, 2).unwrap();
        let (z, xi) = (c(0.2, 0.1), c(0.35, -0.02));
        assert!(linalg::max_abs_diff(&s.k_left(z, xi).unwrap(), &s.k_right(z, -xi).unwrap()) < 1e-15);
    }

    #[test]
    fn left_k_solves_left_reflection() {
        let s = sys(2);
        let r = left_k_residual(&s, c(0.17, 0.05), c(-0.29, 0.08), c(0.33, 0.02)).unwrap();
        assert!(r < 1e-11, "{r}");
    }

    #[test]
    fn degenerate_pack_flagged() {
        let mut cp = BaxterCouplings::default_point();
        cp.left[0] = c(f64::NAN, 0.0);
        assert!(baxter_system(&cp, 2).is_err());
    }

    #[test]
    fn affine_braid_relations_hold() {
        for n in [2usize, 3] {
            let s = sys(n);
            let z = zpt(n);
            let ps = probes(n, 4, 10 + n as u64);
            for rel in affine_relations(n) {
                let r = relation_residual(&s, &rel, &z, c(0.37, 0.04), &ps).unwrap();
                assert!(r < 1e-10, "n={n} {}: {r}", rel.name);
            }
        }
    }

    #[test]
    fn perturbed_right_k_breaks_a_relation() {
        let s = sys(2);
        let k = s.k_right.clone();
        let bad = s.with_k_right(Arc::new(move |z, xi| {
            let mut m = k(z, xi)?;
            m[(0, 1)] += c(1e-3, 0.0);
            Ok(m)
        }));
        let z = zpt(2);
        let ps = probes(2, 3, 5);
        let worst = affine_relations(2)
            .iter()
            .map(|rel| relation_residual(&bad, rel, &z, c(0.37, 0.04), &ps).unwrap())
            .fold(0.0, f64::max);
        assert!(worst >= 1e-4, "{worst}");
    }

    #[test]
    fn transport_two_routes() {
        for n in [1usize, 2, 3] {
            let s = sys(n);
            let z = zpt(n);
            let p = probes(n, 1, 20 + n as u64).remove(0);
            let mut z1 = z.clone();
            z1[0] += 1.0;
            let mut lambda = vec![0i64; n];
            lambda[0] = -1;
            let cocycle = if n == 1 {
                s.cocycle_word(&[1, 0], &z)
            } else {
                qkzb_cocycle(&AffineElement::translation(&lambda), &z, &s)
            };
            let xi = c(0.29, 0.06);
            let a = cocycle.apply(p.at(&z1))(xi).unwrap();
            let b = transport_e1(&z, &s, &p.as_fn())(xi).unwrap();
            assert!(vec_diff(&a, &b) / linalg::max_abs_vec(&a).max(1.0) < 1e-11, "n={n}");
        }
    }

    #[test]
    fn rank_one_transport_is_k_times_left_k() {
        let s = sys(1);
        let z = [c(0.21, 0.03)];
        let p = probes(1, 1, 7).remove(0);
        let xi = c(0.31, 0.0);
        let got = transport_e1(&z, &s, &p.as_fn())(xi).unwrap();
        let lower = m_s0(&[-z[0]], &s).apply(p.at(&[z[0] + 1.0]))(xi).unwrap();
        let want = s.k_right(z[0], xi).unwrap() * lower;
        assert!(vec_diff(&got, &want) < 1e-14);
    }

    #[test]
    fn translation_words_agree() {
        let s = sys(2);
        let z = zpt(2);
        let ps = probes(2, 3, 8);
        let tau = AffineElement::from_word(2, &tau_word(2, 1));
        assert_eq!(tau, AffineElement::translation(&[1, 0]));
        let a = s.cocycle_word(&tau_word(2, 1), &z);
        let b = qkzb_cocycle(&tau, &z, &s);
        // A non-reduced word for the same element.
        let c_ = s.cocycle_word(&[0, 1, 2, 2, 2, 1], &z);
        for p in &ps {
            let f = p.at(&z);
            assert!(operator_residual(&a, &b, &f, c(0.3, 0.0)).unwrap() < 1e-10);
            assert!(operator_residual(&a, &c_, &f, c(0.3, 0.0)).unwrap() < 1e-10);
        }
    }

    #[test]
    fn transport_compatibility() {
        // M^{tau(e_1)}(z) M^{tau(e_2)}(z - e_1) = M^{tau(e_1 + e_2)}(z).
        let s = sys(2);
        let z = zpt(2);
        let zm = vec![z[0] - 1.0, z[1]];
        let lhs = s.cocycle_word(&tau_word(2, 1), &z).compose(&s.cocycle_word(&tau_word(2, 2), &zm));
        let rhs = s.cocycle_word(&translation_word(&[1, 1]), &z);
        for p in probes(2, 3, 9) {
            let r = operator_residual(&lhs, &rhs, &p.at(&z), c(0.33, 0.02)).unwrap();
            assert!(r < 1e-10, "{r}");
        }
    }

    #[test]
    fn identity_element_is_identity() {
        let s = sys(2);
        let z = zpt(2);
        let f = probes(2, 1, 11).remove(0).at(&z);
        let op = qkzb_cocycle(&AffineElement::identity(2), &z, &s);
        let xi = c(0.2, 0.0);
        assert_eq!(op.apply(f.clone())(xi).unwrap(), f(xi).unwrap());
    }
}
