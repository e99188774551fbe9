//! Symmetric functions as polynomials in normalized power sums.
//!
//! Normalization: `p_k` is the classical power sum divided by `k`, so that
//! `H(x) = Σ h_k x^k = exp(Σ p_k x^k)` and `E(x) = Σ (-1)^k e_k x^k =
//! exp(-Σ p_k x^k)`. Under this normalization the adjoint of multiplication
//! by `f = φ(p_1, 2p_2, 3p_3, …)` is `D_f = φ(∂_{p_1}, ∂_{p_2}, …)`.
//!
//! Coefficients are exact rationals. Every polynomial carries a truncation
//! degree `D` (with `deg p_k = k`); products that would exceed it are
//! rejected rather than truncated.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::combinatorics::{straighten, ChargedPartition, Partition, SignedPartition};
use crate::error::{Error, Result};
use crate::fermion::{psi_minus, psi_plus, BosonVector};
use crate::report::{Residual, ResidualReport};
use crate::scalar::Scalar;

/// Exponents `(m_1, m_2, …)` of `p_1^{m_1} p_2^{m_2} ⋯`, trailing zeros
/// trimmed.
pub type Monomial = Vec<u32>;

fn monomial_degree(m: &[u32]) -> usize {
    m.iter().enumerate().map(|(j, &e)| (j + 1) * e as usize).sum()
}

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn binomial(n: u32, k: u32) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PPoly {
    max_degree: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl PPoly {
    pub fn zero(max_degree: usize) -> Self {
        Self {
            max_degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: BigRational, max_degree: usize) -> Self {
        let mut p = Self::zero(max_degree);
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one(max_degree: usize) -> Self {
        Self::constant(BigRational::one(), max_degree)
    }

    /// The generator `p_k`.
    pub fn power_sum(k: usize, max_degree: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::OutOfRange("power sums start at p_1"));
        }
        check_degree(k, max_degree)?;
        let mut m = vec![0; k];
        m[k - 1] = 1;
        let mut p = Self::zero(max_degree);
        p.add_term(m, BigRational::one());
        Ok(p)
    }

    pub fn from_terms(
        max_degree: usize,
        terms: impl IntoIterator<Item = (Monomial, BigRational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(max_degree);
        for (m, c) in terms {
            check_degree(monomial_degree(&m), max_degree)?;
            p.add_term(trim(m), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest degree of a term, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| monomial_degree(m)).max()
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coefficient(&self, m: &[u32]) -> BigRational {
        self.terms
            .get(&trim(m.to_vec()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Same polynomial with another truncation degree.
    pub fn with_max_degree(&self, max_degree: usize) -> Result<Self> {
        if let Some(d) = self.degree() {
            check_degree(d, max_degree)?;
        }
        Ok(Self {
            max_degree,
            terms: self.terms.clone(),
        })
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.max_degree = self.max_degree.max(rhs.max_degree);
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.max_degree);
        }
        Self {
            max_degree: self.max_degree,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// Product, failing if a term would exceed the truncation degree.
    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let max_degree = self.max_degree.max(rhs.max_degree);
        let mut out = Self::zero(max_degree);
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let len = a.len().max(b.len());
                let m: Monomial = (0..len)
                    .map(|j| a.get(j).copied().unwrap_or(0) + b.get(j).copied().unwrap_or(0))
                    .collect();
                check_degree(monomial_degree(&m), max_degree)?;
                out.add_term(m, x * y);
            }
        }
        Ok(out)
    }

    /// `∂/∂p_j`.
    pub fn derivative(&self, j: usize) -> Self {
        let mut out = Self::zero(self.max_degree);
        for (m, c) in &self.terms {
            let e = m.get(j - 1).copied().unwrap_or(0);
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm[j - 1] -= 1;
            out.add_term(trim(dm), c * int(e as i64));
        }
        out
    }

    /// Specialization `p_k = (Σ_i y_i^k) / k`.
    pub fn eval_at<S: Scalar>(&self, y: &[S]) -> S {
        let top = self.terms.keys().map(Vec::len).max().unwrap_or(0);
        let mut pk = Vec::with_capacity(top);
        let mut powers: Vec<S> = y.to_vec();
        for k in 1..=top {
            let sum = powers.iter().fold(S::zero(), |acc, v| acc + v.clone());
            pk.push(sum / S::from_int(k as i64));
            for (p, v) in powers.iter_mut().zip(y) {
                *p = p.clone() * v.clone();
            }
        }
        self.eval_power_sums(&pk)
    }

    /// Value at given normalized power sums `pk[j-1] = p_j`; for a matrix
    /// `g` these are `tr(g^j) / j`.
    pub fn eval_power_sums<S: Scalar>(&self, pk: &[S]) -> S {
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut term = S::from_rational(c);
            for (j, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    term = term * pk[j].clone();
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// Largest coefficient modulus, for residual reporting.
    pub fn max_abs(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

fn check_degree(needed: usize, max: usize) -> Result<()> {
    if needed > max {
        return Err(Error::DegreeOverflow {
            needed: needed as i64,
            max: max as i64,
        });
    }
    Ok(())
}

fn multiplicity_monomial(mu: &Partition) -> (Monomial, BigInt) {
    let mut m = vec![0u32; mu.part(1)];
    for &p in mu.parts() {
        m[p - 1] += 1;
    }
    let denom = m.iter().fold(BigInt::one(), |acc, &e| acc * factorial(e));
    (m, denom)
}

/// Complete homogeneous `h_k = Σ_{μ ⊢ k} Π_j p_j^{m_j} / m_j!`.
pub fn h_poly(k: usize, max_degree: usize) -> Result<PPoly> {
    check_degree(k, max_degree)?;
    let mut out = PPoly::zero(max_degree);
    for mu in Partition::all_of_weight(k) {
        let (m, denom) = multiplicity_monomial(&mu);
        out.add_term(trim(m), BigRational::new(BigInt::one(), denom));
    }
    Ok(out)
}

/// Elementary `e_k`, the coefficient of `(-x)^k` in `E(x)`.
pub fn e_poly(k: usize, max_degree: usize) -> Result<PPoly> {
    check_degree(k, max_degree)?;
    let mut out = PPoly::zero(max_degree);
    for mu in Partition::all_of_weight(k) {
        let (m, denom) = multiplicity_monomial(&mu);
        let sign = if (k + mu.len()).is_multiple_of(2) { 1 } else { -1 };
        out.add_term(trim(m), BigRational::new(BigInt::from(sign), denom));
    }
    Ok(out)
}

/// `det[h_{α_i − i + j}]` for an integer vector `α` (Jacobi–Trudi).
pub fn jacobi_trudi(alpha: &[i64], max_degree: usize) -> Result<PPoly> {
    let l = alpha.len();
    // every surviving product has degree Σα ≤ D, so entries above D only
    // occur next to a vanishing one and are never built
    let mut hs: BTreeMap<i64, PPoly> = BTreeMap::new();
    let mut out = PPoly::zero(max_degree);
    for (perm, odd) in signed_permutations(l) {
        let idx: Vec<i64> = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| alpha[i] - i as i64 + j as i64)
            .collect();
        if idx.iter().any(|&k| k < 0) {
            continue;
        }
        let mut term = PPoly::one(max_degree);
        for &k in &idx {
            if let alloc::collections::btree_map::Entry::Vacant(e) = hs.entry(k) {
                e.insert(h_poly(k as usize, max_degree)?);
            }
            term = term.checked_mul(&hs[&k])?;
        }
        out = if odd { out.sub(&term) } else { out.add(&term) };
    }
    Ok(out)
}

pub(crate) fn signed_permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    if n == 0 {
        return vec![(Vec::new(), false)];
    }
    let mut out = Vec::new();
    for (p, odd) in signed_permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            // inserting the largest element at `pos` adds n-1-pos inversions
            out.push((q, odd ^ ((n - 1 - pos) % 2 == 1)));
        }
    }
    out
}

/// Schur function `s_λ`.
pub fn schur_poly(lambda: &Partition, max_degree: usize) -> Result<PPoly> {
    check_degree(lambda.weight(), max_degree)?;
    jacobi_trudi(&lambda.to_vector(lambda.len()), max_degree)
}

/// `D_f g`: each monomial `c Π p_j^{m_j}` of `f` acts as
/// `c Π (1/j)^{m_j} ∂_{p_j}^{m_j}`.
pub fn adjoint_apply(f: &PPoly, g: &PPoly) -> PPoly {
    let mut out = PPoly::zero(g.max_degree);
    for (m, c) in f.terms() {
        let mut term = g.clone();
        let mut weight = c.clone();
        for (j, &e) in m.iter().enumerate() {
            for _ in 0..e {
                term = term.derivative(j + 1);
                weight /= int(j as i64 + 1);
            }
        }
        out = out.add(&term.scale(&weight));
    }
    out
}

/// Coefficients in `t` of `g(p_j + sign · t^j / j)`.
///
/// With `t = x^{-1}` this is `DH(x) g` for `sign = +1` and `DE(x) g` for
/// `sign = -1`.
pub fn taylor_shift(g: &PPoly, sign: i64) -> BTreeMap<usize, PPoly> {
    let mut out: BTreeMap<usize, PPoly> = BTreeMap::new();
    for (m, c) in g.terms() {
        // expand Π_j (p_j + s t^j/j)^{m_j} one generator at a time
        let mut partial: Vec<(usize, Monomial, BigRational)> = vec![(0, Vec::new(), c.clone())];
        for (j, &e) in m.iter().enumerate() {
            let jj = j as i64 + 1;
            let mut next = Vec::new();
            for (tdeg, mono, coeff) in &partial {
                for r in 0..=e {
                    let mut nm = mono.clone();
                    nm.resize(j + 1, 0);
                    nm[j] = e - r;
                    let factor = BigRational::new(
                        binomial(e, r) * BigInt::from(sign).pow(r),
                        BigInt::from(jj).pow(r),
                    );
                    next.push((tdeg + (j + 1) * r as usize, nm, coeff * factor));
                }
            }
            partial = next;
        }
        for (tdeg, mono, coeff) in partial {
            out.entry(tdeg)
                .or_insert_with(|| PPoly::zero(g.max_degree))
                .add_term(trim(mono), coeff);
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

/// Largest mismatch between `D_{h_b} g` (resp. `(-1)^b D_{e_b} g`) and the
/// `x^{-b}` coefficient of the closed forms of `DH(x) g` (resp. `DE(x) g`).
pub fn closed_form_residual(g: &PPoly) -> Result<f64> {
    let top = g.degree().unwrap_or(0);
    let dh = taylor_shift(g, 1);
    let de = taylor_shift(g, -1);
    let mut worst: f64 = 0.0;
    for b in 0..=top {
        let zero = PPoly::zero(g.max_degree);
        let via_h = adjoint_apply(&h_poly(b, top.max(b))?, g);
        worst = worst.max(via_h.sub(dh.get(&b).unwrap_or(&zero)).max_abs());
        let via_e = adjoint_apply(&e_poly(b, top.max(b))?, g);
        let via_e = if b % 2 == 1 { via_e.neg() } else { via_e };
        worst = worst.max(via_e.sub(de.get(&b).unwrap_or(&zero)).max_abs());
    }
    Ok(worst)
}

/// Laurent monomials `x^β` with `|β| ≤ D` of
/// `Π_{i<j}(1 − x_j/x_i) Π_i H(x_i)`, each compared with the straightened
/// `s_β`. Entries of `β` range over `[-(l-1), D + l - 1]`.
pub fn fsym_check(l: usize, max_degree: usize) -> Result<ResidualReport> {
    if l == 0 {
        return Err(Error::OutOfRange("fsym needs at least one variable"));
    }
    let d = max_degree as i64;
    let spread = l as i64 - 1;
    // Π_{i<j}(1 − x_j/x_i) = Σ_σ sgn σ Π_i x_i^{i − σ(i)}
    let mut prefactor: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
    for (perm, odd) in signed_permutations(l) {
        let e: Vec<i64> = perm.iter().enumerate().map(|(i, &s)| i as i64 - s as i64).collect();
        *prefactor.entry(e).or_insert(0) += if odd { -1 } else { 1 };
    }
    prefactor.retain(|_, c| *c != 0);
    let hs: Vec<PPoly> = (0..=max_degree).map(|k| h_poly(k, max_degree)).collect::<Result<_>>()?;

    let mut worst = Residual::ZERO;
    let mut partition_terms = 0i64;
    let mut beta = vec![-spread; l];
    loop {
        let total: i64 = beta.iter().sum();
        if (0..=d).contains(&total) {
            let mut lhs = PPoly::zero(max_degree);
            for (e, c) in &prefactor {
                let idx: Vec<i64> = beta.iter().zip(e).map(|(b, e)| b - e).collect();
                if idx.iter().any(|&k| k < 0) {
                    continue;
                }
                let mut term = PPoly::constant(int(*c), max_degree);
                for &k in &idx {
                    term = term.checked_mul(&hs[k as usize])?;
                }
                lhs = lhs.add(&term);
            }
            let rhs = match straighten(&beta) {
                SignedPartition::Zero => PPoly::zero(max_degree),
                SignedPartition::Term { negative, partition } => {
                    let s = schur_poly(&partition, max_degree)?;
                    if negative {
                        s.neg()
                    } else {
                        s
                    }
                }
            };
            if beta.windows(2).all(|w| w[0] >= w[1]) && beta.iter().all(|&b| b >= 0) {
                partition_terms += 1;
            }
            let diff = lhs.sub(&rhs).max_abs();
            let scale = lhs.max_abs().max(rhs.max_abs());
            worst.absorb(Residual::new(diff, if scale == 0.0 { diff } else { diff / scale }));
        }
        if !advance(&mut beta, -spread, d + spread) {
            break;
        }
    }
    Ok(ResidualReport::new("fsym", worst, 0.0)
        .param("l", l)
        .param("D", max_degree)
        .param("partition_terms", partition_terms))
}

/// Odometer over `[lo, hi]^len`; returns `false` after the last vector.
pub(crate) fn advance(v: &mut [i64], lo: i64, hi: i64) -> bool {
    for x in v.iter_mut().rev() {
        if *x < hi {
            *x += 1;
            return true;
        }
        *x = lo;
    }
    false
}

fn signed_schur(v: &BosonVector<BigRational>, charge: i64, max_degree: usize) -> Result<PPoly> {
    let mut out = PPoly::zero(max_degree);
    for (label, c) in v.iter() {
        if label.charge != charge {
            return Err(Error::MixedCharge);
        }
        out = out.add(&schur_poly(&label.partition, max_degree)?.scale(c));
    }
    Ok(out)
}

/// `x^k` coefficient of `x^{m+1} H(x) DE(x) s_λ`:
/// `Σ_{a − b = k − m − 1} (−1)^b h_a D_{e_b} s_λ`.
pub fn vertex_plus_coefficient(m: i64, lambda: &Partition, k: i64, max_degree: usize) -> Result<PPoly> {
    let s = schur_poly(lambda, max_degree)?;
    let mut out = PPoly::zero(max_degree);
    for b in 0..=lambda.weight() as i64 {
        let a = b + k - m - 1;
        if a < 0 {
            continue;
        }
        let de = adjoint_apply(&e_poly(b as usize, max_degree)?, &s);
        let term = h_poly(a as usize, max_degree)?.checked_mul(&de)?;
        out = if b % 2 == 1 { out.sub(&term) } else { out.add(&term) };
    }
    Ok(out)
}

/// `x^{-k}` coefficient of `x^{-m} E(x) DH(x) s_λ`:
/// `Σ_{a − b = m − k} (−1)^a e_a D_{h_b} s_λ`.
pub fn vertex_minus_coefficient(m: i64, lambda: &Partition, k: i64, max_degree: usize) -> Result<PPoly> {
    let s = schur_poly(lambda, max_degree)?;
    let mut out = PPoly::zero(max_degree);
    for b in 0..=lambda.weight() as i64 {
        let a = b + m - k;
        if a < 0 {
            continue;
        }
        let dh = adjoint_apply(&h_poly(b as usize, max_degree)?, &s);
        let term = e_poly(a as usize, max_degree)?.checked_mul(&dh)?;
        out = if a % 2 == 1 { out.sub(&term) } else { out.add(&term) };
    }
    Ok(out)
}

/// Bosonized `ψ^±_k` on `z^m s_λ` against the combinatorial rules, for every
/// `k` in `ks`. Also checks the closed forms of `DH`, `DE` on `s_λ`.
pub fn vertex_check(
    plus: bool,
    m: i64,
    lambda: &Partition,
    ks: core::ops::RangeInclusive<i64>,
    max_degree: usize,
) -> Result<ResidualReport> {
    let basis = BosonVector::basis(ChargedPartition::new(m, lambda.clone()));
    let mut worst = Residual::ZERO;
    for k in ks.clone() {
        let (bosonic, combinatorial) = if plus {
            (
                vertex_plus_coefficient(m, lambda, k, max_degree)?,
                signed_schur(&psi_plus(k, &basis), m + 1, max_degree)?,
            )
        } else {
            (
                vertex_minus_coefficient(m, lambda, k, max_degree)?,
                signed_schur(&psi_minus(k, &basis), m - 1, max_degree)?,
            )
        };
        let diff = bosonic.sub(&combinatorial).max_abs();
        worst.absorb(Residual::new(diff, diff));
    }
    let closed = closed_form_residual(&schur_poly(lambda, max_degree)?)?;
    worst.absorb(Residual::new(closed, closed));
    Ok(ResidualReport::new(if plus { "vertex-plus" } else { "vertex-minus" }, worst, 0.0)
        .param("m", m)
        .param("lambda", lambda.to_vector(lambda.len()))
        .param("k_min", *ks.start())
        .param("k_max", *ks.end())
        .param("D", max_degree))
}

/// Output degree of the vertex checks: `|λ| + k − m − 1` for `ψ^+_k`,
/// `|λ| − k + m` for `ψ^-_k`.
pub fn vertex_degree(plus: bool, m: i64, lambda: &Partition, k: i64) -> i64 {
    let w = lambda.weight() as i64;
    if plus {
        w + k - m - 1
    } else {
        w - k + m
    }
}
