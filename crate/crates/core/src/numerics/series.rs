//! Truncated multivariate power series in `x_1, ..., x_n`, graded by total degree.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex;

use super::Scalar;
use crate::error::{QkzError, Result};

/// All multi-indices of height at most `H`, stored height by height.
#[derive(Debug)]
pub struct MultiIndexSet {
    n: usize,
    cap: usize,
    indices: Vec<Vec<u16>>,
    height_start: Vec<usize>,
    lookup: HashMap<Vec<u16>, usize>,
    sum_table: Vec<Vec<u32>>,
}

const NONE: u32 = u32::MAX;

impl MultiIndexSet {
    pub fn new(n: usize, cap: usize) -> Arc<Self> {
        let mut indices = Vec::new();
        let mut height_start = Vec::with_capacity(cap + 2);
        for h in 0..=cap {
            height_start.push(indices.len());
            let mut level = Vec::new();
            compositions(n, h, &mut vec![0; n], 0, &mut level);
            level.sort();
            indices.extend(level);
        }
        height_start.push(indices.len());
        let lookup: HashMap<_, _> = indices.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let sum_table = indices
            .iter()
            .map(|a| {
                indices
                    .iter()
                    .map(|b| {
                        let s: Vec<u16> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                        lookup.get(&s).map_or(NONE, |&k| k as u32)
                    })
                    .collect()
            })
            .collect();
        Arc::new(MultiIndexSet { n, cap, indices, height_start, lookup, sum_table })
    }

    pub fn rank(&self) -> usize {
        self.n
    }
    pub fn height_cap(&self) -> usize {
        self.cap
    }
    pub fn len(&self) -> usize {
        self.indices.len()
    }
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
    pub fn index(&self, k: usize) -> &[u16] {
        &self.indices[k]
    }
    pub fn position(&self, mu: &[u16]) -> Option<usize> {
        self.lookup.get(mu).copied()
    }
    /// Positions of all indices of height exactly `h`.
    pub fn level(&self, h: usize) -> std::ops::Range<usize> {
        self.height_start[h]..self.height_start[h + 1]
    }
    /// Position of `index(a) + index(b)`, if its height is within the cap.
    #[inline]
    pub fn sum(&self, a: usize, b: usize) -> Option<usize> {
        let k = self.sum_table[a][b];
        (k != NONE).then_some(k as usize)
    }
    /// Position of `index(a) - index(b)` when it is a valid multi-index.
    pub fn difference(&self, a: usize, b: usize) -> Option<usize> {
        let d: Option<Vec<u16>> = self.indices[a]
            .iter()
            .zip(&self.indices[b])
            .map(|(x, y)| x.checked_sub(*y))
            .collect();
        d.and_then(|d| self.position(&d))
    }
}

fn compositions(n: usize, h: usize, cur: &mut Vec<u16>, pos: usize, out: &mut Vec<Vec<u16>>) {
    if pos == n - 1 {
        cur[pos] = h as u16;
        out.push(cur.clone());
        return;
    }
    for k in 0..=h {
        cur[pos] = k as u16;
        compositions(n, h - k, cur, pos + 1, out);
    }
}

/// A scalar power series truncated above total degree `H`.
#[derive(Clone, Debug)]
pub struct TruncatedSeries<T: Scalar> {
    set: Arc<MultiIndexSet>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> TruncatedSeries<T> {
    pub fn zero(set: &Arc<MultiIndexSet>) -> Self {
        TruncatedSeries { set: set.clone(), coeffs: vec![Complex::new(T::zero(), T::zero()); set.len()] }
    }

    pub fn constant(set: &Arc<MultiIndexSet>, c: Complex<T>) -> Self {
        let mut s = Self::zero(set);
        s.coeffs[0] = c;
        s
    }

    pub fn one(set: &Arc<MultiIndexSet>) -> Self {
        Self::constant(set, Complex::new(T::one(), T::zero()))
    }

    /// `c x^mu`, or zero if `mu` lies above the cap.
    pub fn monomial(set: &Arc<MultiIndexSet>, c: Complex<T>, mu: &[u16]) -> Self {
        let mut s = Self::zero(set);
        if let Some(k) = set.position(mu) {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn set(&self) -> &Arc<MultiIndexSet> {
        &self.set
    }
    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }
    pub fn coeff(&self, mu: &[u16]) -> Complex<T> {
        self.set.position(mu).map_or(Complex::new(T::zero(), T::zero()), |k| self.coeffs[k])
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        TruncatedSeries { set: self.set.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        TruncatedSeries { set: self.set.clone(), coeffs }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        TruncatedSeries { set: self.set.clone(), coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.set);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.norm_sqr() == T::zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if let Some(k) = self.set.sum(i, j) {
                    out.coeffs[k] += a * b;
                }
            }
        }
        out
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inv(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0.norm() == T::zero() {
            return Err(QkzError::Singular("series inverse with zero constant term".into()));
        }
        let mut out = Self::zero(&self.set);
        out.coeffs[0] = Complex::new(T::one(), T::zero()) / c0;
        for k in 1..self.set.len() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for j in 1..self.set.len() {
                if self.coeffs[j].norm_sqr() == T::zero() {
                    continue;
                }
                if let Some(d) = self.set.difference(k, j) {
                    acc += self.coeffs[j] * out.coeffs[d];
                }
            }
            out.coeffs[k] = -acc / c0;
        }
        Ok(out)
    }

    /// Geometric expansion of `1 / (1 - c x^mu)`.
    pub fn inv_one_minus(set: &Arc<MultiIndexSet>, c: Complex<T>, mu: &[u16]) -> Result<Self> {
        let one = Complex::new(T::one(), T::zero());
        if mu.iter().all(|&m| m == 0) {
            if (one - c).norm() == T::zero() {
                return Err(QkzError::Singular("1/(1-c) with c = 1".into()));
            }
            return Ok(Self::constant(set, one / (one - c)));
        }
        let h: usize = mu.iter().map(|&m| m as usize).sum();
        let mut out = Self::zero(set);
        let mut pow = one;
        let mut k = 0usize;
        while k * h <= set.height_cap() {
            let m: Vec<u16> = mu.iter().map(|&x| x * k as u16).collect();
            out.coeffs[set.position(&m).unwrap()] = pow;
            pow *= c;
            k += 1;
        }
        Ok(out)
    }

    /// Numeric value at the point `x`.
    pub fn eval(&self, x: &[Complex<T>]) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            acc += c * monomial_value(self.set.index(k), x);
        }
        acc
    }
}

/// `x^mu` evaluated numerically.
pub fn monomial_value<T: Scalar>(mu: &[u16], x: &[Complex<T>]) -> Complex<T> {
    mu.iter()
        .zip(x)
        .fold(Complex::new(T::one(), T::zero()), |acc, (&m, &xi)| acc * xi.powi(m as i32))
}
