//! Clifford algebra action on the boson space spanned by `z^m s_λ`.
//!
//! ```text
//! ψ⁺_k (z^m s_λ) = z^{m+1} s_{(k−m−1, λ)}                       (straightened)
//! ψ⁻_k (z^m s_λ) = z^{m−1} (−1)^{t−1} s_{(λ_1+1, …, λ_{t−1}+1, λ_{t+1}, …)}
//!                  where t is the unique index with λ_t − t = k − m − 1
//! ```
//!
//! (`λ` padded with zeros). In the Maya encoding `d_i = m − i + 1 + λ_i`
//! these are wedging with and contracting against the index `k`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::combinatorics::{from_maya, straighten, to_maya, ChargedPartition, Partition, SignedPartition};
use crate::error::{Error, Result};
use crate::report::{Residual, ResidualReport};
use crate::scalar::Scalar;

/// Finitely supported combination of basis vectors `z^m s_λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct BosonVector<S> {
    terms: BTreeMap<ChargedPartition, S>,
}

impl<S: Scalar> Default for BosonVector<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> BosonVector<S> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(label: ChargedPartition) -> Self {
        let mut v = Self::zero();
        v.add_term(label, S::one());
        v
    }

    /// `z^0 s_∅`.
    pub fn vacuum() -> Self {
        Self::basis(ChargedPartition::vacuum(0))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (ChargedPartition, S)>) -> Self {
        let mut v = Self::zero();
        for (label, c) in terms {
            v.add_term(label, c);
        }
        v
    }

    pub fn add_term(&mut self, label: ChargedPartition, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&label) {
            Some(x) => {
                *x = x.clone() + c;
                if x.is_zero() {
                    self.terms.remove(&label);
                }
            }
            None => {
                self.terms.insert(label, c);
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ChargedPartition, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, label: &ChargedPartition) -> S {
        self.terms.get(label).cloned().unwrap_or_else(S::zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (label, c) in &rhs.terms {
            out.add_term(label.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_terms(self.terms.iter().map(|(l, x)| (l.clone(), x.clone() * c.clone())))
    }

    pub fn charges(&self) -> BTreeSet<i64> {
        self.terms.keys().map(|l| l.charge).collect()
    }

    /// The common charge, `None` for the zero vector.
    pub fn charge(&self) -> Result<Option<i64>> {
        let charges = self.charges();
        match charges.len() {
            0 => Ok(None),
            1 => Ok(charges.first().copied()),
            _ => Err(Error::MixedCharge),
        }
    }

    /// Component of charge `m`.
    pub fn component(&self, m: i64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(l, _)| l.charge == m)
                .map(|(l, c)| (l.clone(), c.clone())),
        )
    }

    /// Largest `|λ|` in the support.
    pub fn max_weight(&self) -> usize {
        self.terms.keys().map(|l| l.partition.weight()).max().unwrap_or(0)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Scalar::modulus).fold(0.0, f64::max)
    }

    /// Same labels, coefficients mapped into another field.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> BosonVector<T> {
        BosonVector::from_terms(self.terms.iter().map(|(l, c)| (l.clone(), f(c))))
    }
}

fn signed_label(charge: i64, sp: SignedPartition) -> Option<(bool, ChargedPartition)> {
    match sp {
        SignedPartition::Zero => None,
        SignedPartition::Term { negative, partition } => Some((negative, ChargedPartition::new(charge, partition))),
    }
}

/// `ψ⁺_k` on one basis vector: the sign (`true` for −1) and the image label.
pub fn psi_plus_basis(k: i64, label: &ChargedPartition) -> Option<(bool, ChargedPartition)> {
    let m = label.charge;
    let mut alpha = Vec::with_capacity(label.partition.len() + 1);
    alpha.push(k - m - 1);
    alpha.extend(label.partition.parts().iter().map(|&p| p as i64));
    signed_label(m + 1, straighten(&alpha))
}

/// `ψ⁻_k` on one basis vector.
pub fn psi_minus_basis(k: i64, label: &ChargedPartition) -> Option<(bool, ChargedPartition)> {
    let m = label.charge;
    let target = k - m - 1;
    let parts = label.partition.parts();
    let l = parts.len() as i64;
    // λ_t − t is strictly decreasing in t; past the last row it equals −t
    let t = match (1..=l).find(|&t| parts[(t - 1) as usize] as i64 - t == target) {
        Some(t) => t,
        None if -target > l => -target,
        None => return None,
    };
    let mut out = Vec::with_capacity(parts.len());
    for i in 1..t {
        out.push(parts.get((i - 1) as usize).copied().unwrap_or(0) + 1);
    }
    out.extend(parts.iter().skip(t as usize).copied());
    let partition = Partition::new(out).expect("removing a row keeps the shape");
    Some((t % 2 == 0, ChargedPartition::new(m - 1, partition)))
}

fn act<S: Scalar>(
    v: &BosonVector<S>,
    rule: impl Fn(&ChargedPartition) -> Option<(bool, ChargedPartition)>,
) -> BosonVector<S> {
    let mut out = BosonVector::zero();
    for (label, c) in v.iter() {
        if let Some((negative, image)) = rule(label) {
            out.add_term(image, c.clone().signed(negative));
        }
    }
    out
}

pub fn psi_plus<S: Scalar>(k: i64, v: &BosonVector<S>) -> BosonVector<S> {
    act(v, |l| psi_plus_basis(k, l))
}

pub fn psi_minus<S: Scalar>(k: i64, v: &BosonVector<S>) -> BosonVector<S> {
    act(v, |l| psi_minus_basis(k, l))
}

/// `ψ^±_k` with the sign as a flag (`true` for `ψ⁺`).
pub fn psi<S: Scalar>(plus: bool, k: i64, v: &BosonVector<S>) -> BosonVector<S> {
    if plus {
        psi_plus(k, v)
    } else {
        psi_minus(k, v)
    }
}

/// `ψ⁺_k` through the Maya diagram: wedge with `v_k`.
pub fn psi_plus_maya(k: i64, label: &ChargedPartition) -> Option<(bool, ChargedPartition)> {
    to_maya(label).wedge(k).map(|(neg, d)| (neg, from_maya(&d)))
}

/// `ψ⁻_k` through the Maya diagram: contract against `v_k`.
pub fn psi_minus_maya(k: i64, label: &ChargedPartition) -> Option<(bool, ChargedPartition)> {
    to_maya(label).contract(k).map(|(neg, d)| (neg, from_maya(&d)))
}

/// Applies `ops[0] ops[1] ⋯ ops[r-1]` to `v` (rightmost first). Each entry
/// is `(plus, k)`.
pub fn apply_string<S: Scalar>(ops: &[(bool, i64)], v: &BosonVector<S>) -> BosonVector<S> {
    ops.iter().rev().fold(v.clone(), |acc, &(plus, k)| psi(plus, k, &acc))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pairing {
    /// `ψ⁺_k ψ⁻_l + ψ⁻_l ψ⁺_k − δ_{kl}`
    Mixed,
    /// `ψ⁺_k ψ⁺_l + ψ⁺_l ψ⁺_k`
    PlusPlus,
    /// `ψ⁻_k ψ⁻_l + ψ⁻_l ψ⁻_k`
    MinusMinus,
}

pub fn anticommutator_residual<S: Scalar>(k: i64, l: i64, pairing: Pairing, v: &BosonVector<S>) -> BosonVector<S> {
    match pairing {
        Pairing::Mixed => {
            let a = psi_plus(k, &psi_minus(l, v));
            let b = psi_minus(l, &psi_plus(k, v));
            let sum = a.add(&b);
            if k == l {
                sum.sub(v)
            } else {
                sum
            }
        }
        Pairing::PlusPlus => psi_plus(k, &psi_plus(l, v)).add(&psi_plus(l, &psi_plus(k, v))),
        Pairing::MinusMinus => psi_minus(k, &psi_minus(l, v)).add(&psi_minus(l, &psi_minus(k, v))),
    }
}

/// Every Clifford relation for `k, l ∈ ks` on every basis vector with
/// `|λ| ≤ max_weight` and `|m| ≤ max_charge`, in exact arithmetic.
pub fn clifford_check(ks: RangeInclusive<i64>, max_weight: usize, max_charge: i64) -> ResidualReport {
    use num_rational::BigRational;
    let mut worst = Residual::ZERO;
    let mut failures = 0usize;
    for m in -max_charge..=max_charge {
        for lambda in Partition::all_up_to(max_weight, max_weight) {
            let v = BosonVector::<BigRational>::basis(ChargedPartition::new(m, lambda));
            for k in ks.clone() {
                for l in ks.clone() {
                    for pairing in [Pairing::Mixed, Pairing::PlusPlus, Pairing::MinusMinus] {
                        let r = anticommutator_residual(k, l, pairing, &v).max_abs();
                        if r != 0.0 {
                            failures += 1;
                        }
                        worst.absorb(Residual::new(r, r));
                    }
                }
            }
        }
    }
    ResidualReport::new("clifford", worst, 0.0)
        .param("k_min", *ks.start())
        .param("k_max", *ks.end())
        .param("max_weight", max_weight)
        .param("max_charge", max_charge)
        .param("failures", failures)
}

/// `ψ^±_k v` computed from the partition rules and from the Maya encoding.
pub fn maya_action_crosscheck<S: Scalar>(k: i64, v: &BosonVector<S>) -> ResidualReport {
    let plus = psi_plus(k, v).sub(&act(v, |l| psi_plus_maya(k, l)));
    let minus = psi_minus(k, v).sub(&act(v, |l| psi_minus_maya(k, l)));
    let r = plus.max_abs().max(minus.max_abs());
    ResidualReport::new("maya", Residual::new(r, r), 0.0).param("k", k)
}

/// Coefficients of `Ψ^±(x, m) v` for the exponents of `x` in `window`:
/// `x^k ↦ ψ⁺_k v`, `x^{-k} ↦ ψ⁻_k v`.
pub fn psi_gen_apply<S: Scalar>(
    plus: bool,
    m: i64,
    v: &BosonVector<S>,
    window: RangeInclusive<i64>,
) -> Result<BTreeMap<i64, BosonVector<S>>> {
    if let Some(c) = v.charge()? {
        if c != m {
            return Err(Error::MixedCharge);
        }
    }
    let mut out = BTreeMap::new();
    for e in window {
        let image = if plus { psi_plus(e, v) } else { psi_minus(-e, v) };
        if !image.is_zero() {
            out.insert(e, image);
        }
    }
    Ok(out)
}

/// One output pair of the bilinear identity.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearTerm<S> {
    /// `Σ_k [ψ⁺_k τ : μ] [ψ⁻_k τ : ν]`.
    pub coefficient: S,
    /// `Σ_k |[ψ⁺_k τ : μ]| |[ψ⁻_k τ : ν]|`, the scale it cancels against.
    pub magnitude: f64,
}

pub type PairKey = (ChargedPartition, ChargedPartition);

/// `Σ_k ψ⁺_k τ ⊗ ψ⁻_k τ`, all pairs `(μ, ν)`, cancelled ones included.
///
/// Only `k ∈ [m + 1 − W, W + m]` can contribute (`W` the largest `|λ|` in
/// the support), so the sum is finite. A pair collects contributions from
/// `λ, λ'` with `|λ| + |λ'| = |μ| + |ν| + 1`; when `τ` is the truncation of
/// an infinite series to `|λ| ≤ Δ`, pass `bound = Some(Δ)` to keep only the
/// pairs with `|μ| + |ν| + 1 ≤ Δ`, whose coefficients are complete.
pub fn bilinear_pairs<S: Scalar>(
    tau: &BosonVector<S>,
    bound: Option<usize>,
) -> Result<BTreeMap<PairKey, BilinearTerm<S>>> {
    let mut out: BTreeMap<PairKey, BilinearTerm<S>> = BTreeMap::new();
    let Some(m) = tau.charge()? else {
        return Ok(out);
    };
    let w = tau.max_weight() as i64;
    for k in (m + 1 - w)..=(w + m) {
        let plus = psi_plus(k, tau);
        let minus = psi_minus(k, tau);
        for (mu, a) in plus.iter() {
            for (nu, b) in minus.iter() {
                if let Some(delta) = bound {
                    if mu.partition.weight() + nu.partition.weight() + 1 > delta {
                        continue;
                    }
                }
                let entry = out.entry((mu.clone(), nu.clone())).or_insert_with(|| BilinearTerm {
                    coefficient: S::zero(),
                    magnitude: 0.0,
                });
                entry.coefficient = entry.coefficient.clone() + a.clone() * b.clone();
                entry.magnitude += a.modulus() * b.modulus();
            }
        }
    }
    Ok(out)
}

/// Pairs of [`bilinear_pairs`] whose coefficient is not exactly zero.
pub fn bilinear_residual<S: Scalar>(tau: &BosonVector<S>, bound: Option<usize>) -> Result<BTreeMap<PairKey, S>> {
    Ok(bilinear_pairs(tau, bound)?
        .into_iter()
        .filter(|(_, t)| !t.coefficient.is_zero())
        .map(|(k, t)| (k, t.coefficient))
        .collect())
}

/// Worst pair coefficient, absolute and relative to the largest magnitude.
pub fn bilinear_size<S: Scalar>(pairs: &BTreeMap<PairKey, BilinearTerm<S>>) -> Residual {
    let abs = pairs.values().map(|t| t.coefficient.modulus()).fold(0.0, f64::max);
    let scale = pairs.values().map(|t| t.magnitude).fold(0.0, f64::max);
    Residual::new(abs, if scale == 0.0 { abs } else { abs / scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    type Q = BosonVector<BigRational>;

    fn cp(m: i64, parts: &[usize]) -> ChargedPartition {
        ChargedPartition::new(m, Partition::new(parts.to_vec()).unwrap())
    }

    fn single(m: i64, parts: &[usize], c: i64) -> Q {
        Q::from_terms([(cp(m, parts), ratio(c, 1))])
    }

    #[test]
    fn plus_examples() {
        assert_eq!(psi_plus(1, &single(0, &[], 1)), single(1, &[], 1));
        assert_eq!(psi_plus(3, &single(0, &[1], 1)), single(1, &[2, 1], 1));
        assert_eq!(psi_plus(0, &single(0, &[2], 1)), single(1, &[1], -1));
    }

    #[test]
    fn minus_examples() {
        assert_eq!(psi_minus(0, &single(0, &[], 1)), single(-1, &[], 1));
        assert_eq!(psi_minus(2, &single(0, &[2], 1)), single(-1, &[], 1));
        assert_eq!(psi_minus(-1, &single(0, &[1], 1)), single(-1, &[2], -1));
        assert!(psi_minus(1, &single(0, &[], 1)).is_zero());
    }

    #[test]
    fn charge_moves_by_one() {
        for lambda in Partition::all_up_to(4, 4) {
            for m in -2..=2 {
                let label = ChargedPartition::new(m, lambda.clone());
                for k in -6..=6 {
                    if let Some((_, out)) = psi_plus_basis(k, &label) {
                        assert_eq!(out.charge, m + 1);
                    }
                    if let Some((_, out)) = psi_minus_basis(k, &label) {
                        assert_eq!(out.charge, m - 1);
                    }
                }
            }
        }
    }

    #[test]
    fn small_anticommutators() {
        let vac = single(0, &[], 1);
        assert!(anticommutator_residual(0, 0, Pairing::Mixed, &vac).is_zero());
        let v = single(1, &[3, 1], 2).add(&single(1, &[1], -1));
        for k in -4..=4 {
            assert!(psi_plus(k, &psi_plus(k, &v)).is_zero());
        }
    }

    #[test]
    fn clifford_relations_on_a_small_window() {
        let report = clifford_check(-3..=3, 3, 1);
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn maya_route_agrees() {
        assert!(maya_action_crosscheck(1, &single(0, &[], 1)).pass);
        assert_eq!(psi_plus_maya(0, &cp(0, &[2])), Some((true, cp(1, &[1]))));
        for m in -2..=2 {
            for lambda in Partition::all_up_to(4, 4) {
                let v = Q::basis(ChargedPartition::new(m, lambda));
                for k in -5..=5 {
                    assert!(maya_action_crosscheck(k, &v).pass);
                }
            }
        }
    }

    #[test]
    fn generating_function_on_vacuum() {
        let coeffs = psi_gen_apply(true, 0, &Q::vacuum(), -3..=5).unwrap();
        for k in 1..=5 {
            assert_eq!(coeffs[&k], Q::basis(ChargedPartition::new(1, Partition::row(k as usize - 1))));
        }
        assert!(!coeffs.contains_key(&0));
        let minus = psi_gen_apply(false, 0, &Q::vacuum(), -2..=4).unwrap();
        for e in 0..=4 {
            let expected = Q::basis(ChargedPartition::new(-1, Partition::column(e as usize)));
            let expected = if e % 2 == 1 { expected.scale(&ratio(-1, 1)) } else { expected };
            assert_eq!(minus[&e], expected);
        }
        assert!(psi_gen_apply(true, 1, &Q::vacuum(), 0..=1).is_err());
    }

    #[test]
    fn iterated_plus_on_vacuum() {
        // coefficient of x_1^{λ_1 + l} ⋯ x_l^{λ_l + 1} is z^l s_λ
        for lambda in Partition::all_up_to(4, 3) {
            let l = lambda.len();
            let ops: Vec<(bool, i64)> = (1..=l).map(|i| (true, (lambda.part(i) + l - i + 1) as i64)).collect();
            assert_eq!(apply_string(&ops, &Q::vacuum()), Q::basis(ChargedPartition::new(l as i64, lambda.clone())));
        }
    }

    #[test]
    fn bilinear_on_basis_vectors_vanishes() {
        assert!(bilinear_residual(&Q::vacuum(), None).unwrap().is_empty());
        for lambda in Partition::all_up_to(4, 4) {
            for m in -1..=1 {
                let tau = Q::basis(ChargedPartition::new(m, lambda.clone()));
                assert!(bilinear_residual(&tau, None).unwrap().is_empty(), "{lambda}");
            }
        }
    }

    #[test]
    fn two_term_combinations() {
        // 1 + s_λ is a tau function for hooks, and violates the Plücker
        // relation c_∅ c_(2,2) − c_(1) c_(2,1) + c_(2) c_(1,1) = 0 for (2,2)
        let hook = single(0, &[2], 1).add(&single(0, &[], 1));
        assert!(bilinear_residual(&hook, None).unwrap().is_empty());
        let square = single(0, &[2, 2], 1).add(&single(0, &[], 1));
        let residual = bilinear_residual(&square, None).unwrap();
        assert!(!residual.is_empty());
        let pairs = bilinear_pairs(&square, None).unwrap();
        assert!(bilinear_size(&pairs).relative > 0.1);
    }
}
