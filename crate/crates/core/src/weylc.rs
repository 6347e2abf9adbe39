//! Finite and affine Weyl groups of type C_n as signed permutations with
//! integer translations.
//!
//! Simple reflections are indexed `0..=n`: `s_0 z = (1 - z_1, z_2, ...)`,
//! `s_i` swaps `z_i, z_{i+1}` and `s_n` negates `z_n`. Lengths are counted as
//! separating reflection hyperplanes `z_i = k/2` and `z_i +- z_j = k`.

use std::collections::HashSet;

use num_complex::Complex;

use crate::numerics::Scalar;

/// Signed permutation: `w e_j = signs[j] e_{perm[j]}` (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylElement {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl WeylElement {
    pub fn identity(n: usize) -> Self {
        WeylElement { perm: (0..n).collect(), signs: vec![1; n] }
    }

    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Self {
        assert_eq!(perm.len(), signs.len());
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            assert!(!seen[p], "not a permutation");
            seen[p] = true;
        }
        WeylElement { perm, signs }
    }

    /// Finite simple reflection `s_j`, `1 <= j <= n`.
    pub fn simple(n: usize, j: usize) -> Self {
        assert!((1..=n).contains(&j), "finite simple reflections are s_1..s_n");
        let mut w = Self::identity(n);
        if j == n {
            w.signs[n - 1] = -1;
        } else {
            w.perm.swap(j - 1, j);
        }
        w
    }

    pub fn from_word(n: usize, word: &[usize]) -> Self {
        word.iter().fold(Self::identity(n), |acc, &j| acc.mul(&Self::simple(n, j)))
    }

    pub fn rank(&self) -> usize {
        self.perm.len()
    }
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }
    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.signs.iter().all(|&s| s == 1)
    }

    /// Product `self * other` (apply `other` first).
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.rank();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for j in 0..n {
            let k = other.perm[j];
            perm[j] = self.perm[k];
            signs[j] = other.signs[j] * self.signs[k];
        }
        WeylElement { perm, signs }
    }

    pub fn inverse(&self) -> Self {
        let n = self.rank();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for j in 0..n {
            perm[self.perm[j]] = j;
            signs[self.perm[j]] = self.signs[j];
        }
        WeylElement { perm, signs }
    }

    pub fn act<T: Scalar>(&self, z: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); z.len()];
        for j in 0..z.len() {
            out[self.perm[j]] = if self.signs[j] > 0 { z[j] } else { -z[j] };
        }
        out
    }

    pub fn act_int(&self, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0; v.len()];
        for j in 0..v.len() {
            out[self.perm[j]] = self.signs[j] as i64 * v[j];
        }
        out
    }

    pub fn act_root(&self, r: &Root) -> Root {
        Root(self.act_int(&r.0))
    }

    /// `#{alpha > 0 : w alpha < 0}`.
    pub fn length(&self) -> usize {
        positive_roots(self.rank()).iter().filter(|a| !self.act_root(a).is_positive()).count()
    }

    /// Positive roots sent to negative roots.
    pub fn inversion_set(&self) -> Vec<Root> {
        positive_roots(self.rank()).into_iter().filter(|a| !self.act_root(a).is_positive()).collect()
    }

    pub fn to_affine(&self) -> AffineElement {
        AffineElement { finite: self.clone(), translation: vec![0; self.rank()] }
    }

    pub fn reduced_word(&self) -> Vec<usize> {
        self.to_affine().reduced_word()
    }
}

/// `z -> w z + lambda`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineElement {
    pub finite: WeylElement,
    pub translation: Vec<i64>,
}

impl AffineElement {
    pub fn identity(n: usize) -> Self {
        WeylElement::identity(n).to_affine()
    }

    /// Simple reflection `s_j`, `0 <= j <= n`.
    pub fn simple(n: usize, j: usize) -> Self {
        if j == 0 {
            let mut finite = WeylElement::identity(n);
            finite.signs[0] = -1;
            let mut translation = vec![0; n];
            translation[0] = 1;
            AffineElement { finite, translation }
        } else {
            WeylElement::simple(n, j).to_affine()
        }
    }

    pub fn translation(lambda: &[i64]) -> Self {
        AffineElement { finite: WeylElement::identity(lambda.len()), translation: lambda.to_vec() }
    }

    pub fn from_word(n: usize, word: &[usize]) -> Self {
        word.iter().fold(Self::identity(n), |acc, &j| acc.mul(&Self::simple(n, j)))
    }

    pub fn rank(&self) -> usize {
        self.finite.rank()
    }

    pub fn is_identity(&self) -> bool {
        self.finite.is_identity() && self.translation.iter().all(|&t| t == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let moved = self.finite.act_int(&other.translation);
        let translation = moved.iter().zip(&self.translation).map(|(a, b)| a + b).collect();
        AffineElement { finite: self.finite.mul(&other.finite), translation }
    }

    pub fn inverse(&self) -> Self {
        let finite = self.finite.inverse();
        let translation = finite.act_int(&self.translation).into_iter().map(|t| -t).collect();
        AffineElement { finite, translation }
    }

    pub fn act<T: Scalar>(&self, z: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = self.finite.act(z);
        for (o, &t) in out.iter_mut().zip(&self.translation) {
            *o += T::from_i64(t).unwrap();
        }
        out
    }

    fn act_real(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; z.len()];
        for j in 0..z.len() {
            out[self.finite.perm[j]] = self.finite.signs[j] as f64 * z[j];
        }
        out.iter_mut().zip(&self.translation).for_each(|(o, &t)| *o += t as f64);
        out
    }

    /// Number of reflection hyperplanes separating the fundamental alcove from its image.
    pub fn length(&self) -> usize {
        let a = alcove_point(self.rank());
        let b = self.act_real(&a);
        let n = a.len();
        let mut count = 0usize;
        let cross = |x: f64, y: f64, scale: f64| ((x * scale).floor() - (y * scale).floor()).abs() as usize;
        for i in 0..n {
            count += cross(a[i], b[i], 2.0);
            for j in i + 1..n {
                count += cross(a[i] - a[j], b[i] - b[j], 1.0);
                count += cross(a[i] + a[j], b[i] + b[j], 1.0);
            }
        }
        count
    }

    /// Reduced expression found by repeatedly stripping the smallest left descent.
    pub fn reduced_word(&self) -> Vec<usize> {
        let n = self.rank();
        let mut w = self.clone();
        let mut len = w.length();
        let mut word = Vec::with_capacity(len);
        while len > 0 {
            let (j, next, l) = (0..=n)
                .map(|j| {
                    let v = AffineElement::simple(n, j).mul(&w);
                    let l = v.length();
                    (j, v, l)
                })
                .find(|(_, _, l)| *l < len)
                .expect("a nontrivial element has a left descent");
            word.push(j);
            w = next;
            len = l;
        }
        word
    }
}

/// A point in the open fundamental alcove `1/2 > z_1 > ... > z_n > 0` off all walls.
fn alcove_point(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (n - i) as f64 / (2.0 * n as f64 + 3.0) + 1e-3 * std::f64::consts::SQRT_2 * (i + 1) as f64 / (n as f64 + 1.0))
        .collect()
}

/// Element of `R_0 = {+-e_i +- e_j} u {+-e_i}` as an integer coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Root(pub Vec<i64>);

impl Root {
    pub fn short(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Root(v)
    }
    /// `e_i - e_j` (0-based).
    pub fn diff(n: usize, i: usize, j: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        v[j] = -1;
        Root(v)
    }
    /// `e_i + e_j` (0-based).
    pub fn sum(n: usize, i: usize, j: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        v[j] = 1;
        Root(v)
    }
    /// Simple root `alpha_i`, `1 <= i <= n`.
    pub fn simple(n: usize, i: usize) -> Self {
        if i == n {
            Self::short(n, n - 1)
        } else {
            Self::diff(n, i - 1, i)
        }
    }
    pub fn is_long(&self) -> bool {
        self.norm2() == 2
    }
    pub fn norm2(&self) -> i64 {
        self.0.iter().map(|x| x * x).sum()
    }
    pub fn is_positive(&self) -> bool {
        self.0.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
    }
    pub fn neg(&self) -> Self {
        Root(self.0.iter().map(|x| -x).collect())
    }
    pub fn pair<T: Scalar>(&self, z: &[Complex<T>]) -> Complex<T> {
        self.0
            .iter()
            .zip(z)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (&c, &x)| acc + x * T::from_i64(c).unwrap())
    }
    /// Coordinates `m` in the simple-root basis, `m_k = sum_{j <= k} beta_j`.
    pub fn simple_coords(&self) -> Vec<i64> {
        simple_coords(&self.0)
    }
}

pub fn simple_coords(beta: &[i64]) -> Vec<i64> {
    beta.iter()
        .scan(0i64, |acc, &b| {
            *acc += b;
            Some(*acc)
        })
        .collect()
}

/// Positive roots: `e_i` first, then `e_r - e_s, e_r + e_s` for `r < s`.
pub fn positive_roots(n: usize) -> Vec<Root> {
    let mut out: Vec<Root> = (0..n).map(|i| Root::short(n, i)).collect();
    for r in 0..n {
        for s in r + 1..n {
            out.push(Root::diff(n, r, s));
            out.push(Root::sum(n, r, s));
        }
    }
    out
}

/// Word of `w_eps = (s_{i_k} ... s_n) ... (s_{i_1} ... s_n)` for the positions
/// `i_1 < ... < i_k` where `eps_i = -1`.
pub fn w_epsilon_word(eps: &[i8]) -> Vec<usize> {
    let n = eps.len();
    let mut word = Vec::new();
    for i in (1..=n).rev().filter(|&i| eps[i - 1] == -1) {
        word.extend(i..=n);
    }
    word
}

pub fn w_epsilon(eps: &[i8]) -> WeylElement {
    WeylElement::from_word(eps.len(), &w_epsilon_word(eps))
}

/// `tau(e_i) = s_{i-1} ... s_1 s_0 s_1 ... s_{n-1} s_n s_{n-1} ... s_i`.
pub fn tau_word(n: usize, i: usize) -> Vec<usize> {
    let mut w: Vec<usize> = (1..i).rev().collect();
    w.push(0);
    w.extend(1..n);
    w.push(n);
    w.extend((i..n).rev());
    w
}

/// Word for `tau(lambda)`, concatenating `tau(+-e_i)` blocks.
pub fn translation_word(lambda: &[i64]) -> Vec<usize> {
    let n = lambda.len();
    let mut w = Vec::new();
    for (i, &l) in lambda.iter().enumerate() {
        let base = tau_word(n, i + 1);
        let block: Vec<usize> = if l >= 0 { base } else { base.into_iter().rev().collect() };
        for _ in 0..l.unsigned_abs() {
            w.extend(&block);
        }
    }
    w
}

/// Longest element of `S_n`.
pub fn longest_sn_word(n: usize) -> Vec<usize> {
    let mut w = Vec::new();
    for k in (1..n).rev() {
        w.extend(1..=k);
    }
    w
}

/// Reduced word of `w_0 = -1`.
pub fn w0_word(n: usize) -> Vec<usize> {
    let mut w = w_epsilon_word(&vec![-1; n]);
    w.extend(longest_sn_word(n));
    w
}

/// All sign vectors in basis order: index bit `n-1-k` set iff `eps_k = -1`.
pub fn all_eps(n: usize) -> Vec<Vec<i8>> {
    (0..1usize << n).map(|idx| eps_from_index(n, idx)).collect()
}

pub fn eps_from_index(n: usize, idx: usize) -> Vec<i8> {
    (0..n).map(|k| if idx >> (n - 1 - k) & 1 == 1 { -1 } else { 1 }).collect()
}

pub fn eps_index(eps: &[i8]) -> usize {
    let n = eps.len();
    eps.iter().enumerate().filter(|(_, &e)| e == -1).map(|(k, _)| 1 << (n - 1 - k)).sum()
}

/// All of `W_0`, in breadth-first order from the identity.
pub fn finite_group(n: usize) -> Vec<WeylElement> {
    let mut seen = HashSet::new();
    let mut out = vec![WeylElement::identity(n)];
    seen.insert(out[0].clone());
    let mut k = 0;
    while k < out.len() {
        for j in 1..=n {
            let v = out[k].mul(&WeylElement::simple(n, j));
            if seen.insert(v.clone()) {
                out.push(v);
            }
        }
        k += 1;
    }
    out
}

/// `u <= v` in Bruhat order: `u` is the product of some subword of a fixed
/// reduced word of `v`.
pub fn bruhat_leq(u: &AffineElement, v: &AffineElement) -> bool {
    let n = v.rank();
    let mut reachable: HashSet<AffineElement> = HashSet::from([AffineElement::identity(n)]);
    for j in v.reduced_word() {
        let s = AffineElement::simple(n, j);
        let extended: Vec<_> = reachable.iter().map(|x| x.mul(&s)).collect();
        reachable.extend(extended);
    }
    reachable.contains(u)
}

pub fn bruhat_leq_finite(u: &WeylElement, v: &WeylElement) -> bool {
    bruhat_leq(&u.to_affine(), &v.to_affine())
}

/// `sigma` with `sigma(alpha_i) > 0` for all `i` in `parabolic` (1-based indices).
pub fn minimal_coset_reps(n: usize, parabolic: &[usize]) -> Vec<WeylElement> {
    finite_group(n)
        .into_iter()
        .filter(|s| parabolic.iter().all(|&i| s.act_root(&Root::simple(n, i)).is_positive()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    fn z2(a: f64, b: f64) -> Vec<C64> {
        vec![C64::new(a, 0.0), C64::new(b, 0.0)]
    }

    #[test]
    fn generator_actions() {
        let z = z2(0.3, 0.7);
        assert_eq!(AffineElement::simple(2, 2).act(&z), z2(0.3, -0.7));
        assert_eq!(AffineElement::simple(2, 0).act(&z), z2(0.7, 0.7));
        assert_eq!(AffineElement::simple(2, 1).act(&z), z2(0.7, 0.3));
        assert_eq!(AffineElement::identity(2).act(&z), z);
    }

    #[test]
    fn tau_e1_reduced_word() {
        let t = AffineElement::translation(&[1, 0]);
        assert_eq!(t.reduced_word(), vec![0, 1, 2, 1]);
        assert!(AffineElement::identity(2).reduced_word().is_empty());
        assert_eq!(AffineElement::from_word(2, &tau_word(2, 1)), t);
    }

    #[test]
    fn w_epsilon_examples() {
        assert!(w_epsilon(&[1, 1]).is_identity());
        assert_eq!(w_epsilon(&[1, -1]), WeylElement::simple(2, 2));
        for eps in all_eps(3) {
            let ones: Vec<C64> = vec![C64::new(1.0, 0.0); 3];
            let img: Vec<C64> = eps.iter().map(|&e| C64::new(e as f64, 0.0)).collect();
            assert_eq!(w_epsilon(&eps).act(&ones), img);
        }
    }

    #[test]
    fn minimal_coset_reps_match_w_eps() {
        let reps = minimal_coset_reps(2, &[1]);
        assert_eq!(reps.len(), 4);
        for eps in all_eps(2) {
            assert!(reps.contains(&w_epsilon(&eps)));
        }
        assert_eq!(minimal_coset_reps(3, &[]).len(), 48);
        assert_eq!(minimal_coset_reps(3, &[1, 2]).len(), 8);
    }

    #[test]
    fn longest_element_is_minus_one() {
        for n in 2..=4 {
            let w0 = WeylElement::from_word(n, &w0_word(n));
            assert!(w0.perm().iter().enumerate().all(|(i, &p)| i == p));
            assert!(w0.signs().iter().all(|&s| s == -1));
            assert_eq!(w0.length(), n * n);
            assert_eq!(w0_word(n).len(), n * n);
        }
    }

    #[test]
    fn finite_and_affine_length_agree() {
        for w in finite_group(3) {
            assert_eq!(w.length(), w.to_affine().length());
        }
    }

    #[test]
    fn bruhat_examples() {
        let s1 = WeylElement::simple(2, 1);
        let v = WeylElement::from_word(2, &[1, 2, 1]);
        assert!(bruhat_leq_finite(&WeylElement::identity(2), &v));
        assert!(bruhat_leq_finite(&v, &v));
        assert!(bruhat_leq_finite(&s1, &v));
        assert!(!bruhat_leq_finite(&v, &s1));
    }

    #[test]
    fn eps_indexing_roundtrip() {
        for idx in 0..8 {
            assert_eq!(eps_index(&eps_from_index(3, idx)), idx);
        }
        assert_eq!(eps_index(&[-1, 1, 1]), 4);
    }
}
