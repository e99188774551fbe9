//! Sequences of transfer operators as a Clifford module.
//!
//! A symbol `z^m t_λ` stands for the sequence `(T^N_λ(u))_{N ≥ 1}`, with
//! `T^N_λ = 0` for `l(λ) > N`. The symbols obey the same straightening rule
//! as Schur functions, so the Clifford action on them is the action on the
//! boson space with `s` renamed to `t`. Only evaluation needs a finite range
//! of `N`; an [`Evaluator`] holds one [`TransferFamily`] per rank.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::combinatorics::{ChargedPartition, Partition};
use crate::error::{Error, Result};
use crate::fermion::{apply_string, bilinear_pairs, psi, BilinearTerm, BosonVector, PairKey};
use crate::genfun::{multivariate, single_series, GenKind, SeriesPoly};
use crate::identities::transfer_via_dual;
use crate::matrix::{distance, Operator};
use crate::report::{Residual, ResidualReport};
use crate::scalar::Scalar;
use crate::transfer::{ChainContext, TransferFamily};

/// Finite combination of symbols `z^m t_λ`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TildeVector<S: Scalar>(pub BosonVector<S>);

impl<S: Scalar> TildeVector<S> {
    pub fn vacuum() -> Self {
        Self(BosonVector::vacuum())
    }

    pub fn basis(label: ChargedPartition) -> Self {
        Self(BosonVector::basis(label))
    }

    pub fn symbols(&self) -> &BosonVector<S> {
        &self.0
    }
}

/// `z^m s_λ ↦ z^m t_λ`.
pub fn phi<S: Scalar>(v: &BosonVector<S>) -> TildeVector<S> {
    TildeVector(v.clone())
}

pub fn psi_tilde<S: Scalar>(plus: bool, k: i64, v: &TildeVector<S>) -> TildeVector<S> {
    TildeVector(psi(plus, k, &v.0))
}

/// One transfer family per rank `N = 1..=N_max`, with memoized `T^N_λ`.
#[derive(Clone, Debug)]
pub struct Evaluator<S: Scalar> {
    families: Vec<TransferFamily<S>>,
    cache: BTreeMap<(usize, Partition), Operator<S>>,
}

impl<S: Scalar> Evaluator<S> {
    /// `families[N-1]` must have rank `N`.
    pub fn new(families: Vec<TransferFamily<S>>) -> Result<Self> {
        for (i, f) in families.iter().enumerate() {
            if f.context().rank() != i + 1 {
                return Err(Error::SizeMismatch("evaluator family ranks must be 1, 2, …"));
            }
        }
        Ok(Self {
            families,
            cache: BTreeMap::new(),
        })
    }

    /// Principal truncations of `ctx` for every `N` up to its rank.
    pub fn principal(ctx: &ChainContext<S>, u0: S) -> Result<Self> {
        let families = (1..=ctx.rank())
            .map(|n| Ok(TransferFamily::new(ctx.principal_truncation(n)?, u0.clone())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(families)
    }

    /// Same contexts at another base point.
    pub fn at(&self, u0: S) -> Self {
        Self {
            families: self
                .families
                .iter()
                .map(|f| TransferFamily::new(f.context().clone(), u0.clone()))
                .collect(),
            cache: BTreeMap::new(),
        }
    }

    pub fn n_max(&self) -> usize {
        self.families.len()
    }

    pub fn family(&mut self, n: usize) -> &mut TransferFamily<S> {
        &mut self.families[n - 1]
    }

    /// `T^N_λ(u0)`.
    pub fn transfer(&mut self, n: usize, lambda: &Partition) -> Result<Operator<S>> {
        if let Some(op) = self.cache.get(&(n, lambda.clone())) {
            return Ok(op.clone());
        }
        let op = transfer_via_dual(&mut self.families[n - 1], lambda, 0)?;
        self.cache.insert((n, lambda.clone()), op.clone());
        Ok(op)
    }

    /// The charge-`m` part of `v` at rank `N`.
    pub fn evaluate_at(&mut self, v: &TildeVector<S>, m: i64, n: usize) -> Result<Operator<S>> {
        let mut acc = self.families[n - 1].zero();
        for (label, c) in v.0.iter() {
            if label.charge == m {
                acc.axpy(c, &self.transfer(n, &label.partition)?);
            }
        }
        Ok(acc)
    }

    /// The charge-`m` part of `v` for `N = 1..=N_max`.
    pub fn evaluate(&mut self, v: &TildeVector<S>, m: i64) -> Result<Vec<Operator<S>>> {
        (1..=self.n_max()).map(|n| self.evaluate_at(v, m, n)).collect()
    }
}

fn tuple_distance<S: Scalar>(a: &[Operator<S>], b: &[Operator<S>]) -> Residual {
    let mut r = Residual::ZERO;
    for (x, y) in a.iter().zip(b) {
        let (abs, rel) = distance(x, y);
        r.absorb(Residual::new(abs, rel));
    }
    r
}

/// Operators `ψ^±_k` as `(plus, k)`, applied rightmost first.
pub type FermionString = Vec<(bool, i64)>;

/// `ψ⁺` and `ψ⁻` strings that build `t_λ` from the vacuum, leftmost first.
pub fn vacuum_strings(lambda: &Partition) -> (FermionString, FermionString) {
    let l = lambda.len() as i64;
    let parts = lambda.to_vector(lambda.len());
    let plus = parts
        .iter()
        .enumerate()
        .map(|(i, &p)| (true, p + l - i as i64))
        .collect();
    let minus = parts
        .iter()
        .enumerate()
        .map(|(i, &p)| (false, i as i64 + 1 - p - l))
        .collect();
    (plus, minus)
}

/// `ψ⁺_{λ_1+l} ⋯ ψ⁺_{λ_l+1}(1) = z^l t_λ` and
/// `ψ⁻_{−λ_1−l+1} ⋯ ψ⁻_{−λ_l}(1) = (−1)^{|λ|} z^{−l} t_{λ'}`, as exact symbol
/// identities and after evaluation.
pub fn vacuum_strings_check<S: Scalar>(
    lambda: &Partition,
    ev: &mut Evaluator<S>,
    tolerance: f64,
) -> Result<ResidualReport> {
    let l = lambda.len() as i64;
    let (plus, minus) = vacuum_strings(lambda);
    let vac = TildeVector::<S>::vacuum();
    let got_plus = TildeVector(apply_string(&plus, &vac.0));
    let want_plus = TildeVector::basis(ChargedPartition::new(l, lambda.clone()));
    let got_minus = TildeVector(apply_string(&minus, &vac.0));
    let sign = S::one().signed(lambda.weight() % 2 == 1);
    let want_minus = TildeVector(BosonVector::from_terms([(
        ChargedPartition::new(-l, lambda.conjugate()),
        sign,
    )]));
    let symbolic = got_plus.0.sub(&want_plus.0).max_abs().max(got_minus.0.sub(&want_minus.0).max_abs());
    let mut r = Residual::new(symbolic, symbolic);
    let a = ev.evaluate(&got_plus, l)?;
    let b = ev.evaluate(&want_plus, l)?;
    r.absorb(tuple_distance(&a, &b));
    let a = ev.evaluate(&got_minus, -l)?;
    let b = ev.evaluate(&want_minus, -l)?;
    r.absorb(tuple_distance(&a, &b));
    Ok(ResidualReport::new("vacuum-strings", r, tolerance).param("lambda", lambda.to_vector(lambda.len())))
}

/// `Σ_{μν} d_{μν} T^N_μ(u) ⊗ T^N_ν(v)` for the pair coefficients of the
/// boson-side bilinear identity, per `N`. The relative residual divides by
/// `Σ |d|_max ‖T_μ(u)‖ ‖T_ν(v)‖`, the magnitudes the sum cancels against.
pub fn bilinear_matrix_residual<S: Scalar>(
    tau: &BosonVector<S>,
    ev_u: &mut Evaluator<S>,
    ev_v: &mut Evaluator<S>,
    bound: Option<usize>,
    tolerance: f64,
) -> Result<ResidualReport> {
    let pairs = bilinear_pairs(tau, bound)?;
    let mut report = bilinear_matrix_from_pairs(&pairs, ev_u, ev_v, tolerance)?;
    if let Some(d) = bound {
        report = report.param("delta", d);
    }
    Ok(report)
}

/// As [`bilinear_matrix_residual`], from pair coefficients computed
/// elsewhere (e.g. exactly, for rational `τ`).
pub fn bilinear_matrix_from_pairs<S: Scalar>(
    pairs: &BTreeMap<PairKey, BilinearTerm<S>>,
    ev_u: &mut Evaluator<S>,
    ev_v: &mut Evaluator<S>,
    tolerance: f64,
) -> Result<ResidualReport> {
    let mut r = Residual::ZERO;
    for n in 1..=ev_u.n_max().min(ev_v.n_max()) {
        let mut acc: Option<Operator<S>> = None;
        let mut scale = 0.0;
        for ((mu, nu), term) in pairs {
            let a = ev_u.transfer(n, &mu.partition)?;
            let b = ev_v.transfer(n, &nu.partition)?;
            scale += term.magnitude * a.frobenius_norm() * b.frobenius_norm();
            if term.coefficient.is_zero() {
                continue;
            }
            let k = a.kron(&b).scale(&term.coefficient);
            acc = Some(match acc {
                Some(m) => m.add(&k),
                None => k,
            });
        }
        let abs = acc.map_or(0.0, |m| m.frobenius_norm());
        r.absorb(Residual::new(abs, if scale == 0.0 { abs } else { abs / scale }));
    }
    Ok(ResidualReport::new("bilinear-matrix", r, tolerance).param("pairs", pairs.len()))
}

/// Subsets of `0..l` of size `k`, as bit masks.
fn subsets(l: usize, k: usize) -> impl Iterator<Item = usize> {
    (0usize..1 << l).filter(move |m| m.count_ones() as usize == k)
}

/// Right side of the vertex decomposition in the variables `(x, x_1..x_l)`:
///
/// `H`: `Σ_k (−x)^{k−l} H(x|u−l+k) DE_k H(x_1..x_l|u)`,
/// `E`: `Σ_k (−1)^k x^{k−l} E(x|u+l−k) DH_k E(x_1..x_l|u)`,
///
/// where `DE_k` (`DH_k`) sums over `k`-subsets `S` the product of `x_i^{−1}`
/// and the shift `u_i → u_i − 1` (`+ 1`) for `i ∈ S`.
pub fn vertex_decomposition_rhs<S: Scalar>(
    family: &mut TransferFamily<S>,
    kind: GenKind,
    l: usize,
    max_degree: usize,
) -> Result<SeriesPoly<S>> {
    let d = max_degree as i64;
    let total = l + 1;
    let li = l as i64;
    let step = if kind == GenKind::H { -1 } else { 1 };
    let mut out = SeriesPoly::zero(total, d, family.dim());
    for k in 0..=li {
        let (offset, negate) = match kind {
            GenKind::H => (k - li, (li - k) % 2 == 1),
            GenKind::E => (li - k, k % 2 == 1),
        };
        let upto = d + li - k;
        let mut head = single_series(family, kind, total, 0, offset, upto, upto)?.shift(0, k - li).truncate(d);
        if negate {
            head = head.neg();
        }
        for mask in subsets(l, k as usize) {
            let offsets: Vec<i64> = (0..l).map(|i| if mask >> i & 1 == 1 { step } else { 0 }).collect();
            let mut tail = multivariate(family, kind, &offsets, max_degree + 1)?.embed(total, 1);
            for i in 0..l {
                if mask >> i & 1 == 1 {
                    tail = tail.shift(i + 1, -1);
                }
            }
            out = out.add(&head.mul(&tail.truncate(d)));
        }
    }
    Ok(out)
}

/// Multivariate series in `l + 1` variables against its vertex
/// decomposition.
pub fn vertex_decomposition_check<S: Scalar>(
    family: &mut TransferFamily<S>,
    kind: GenKind,
    l: usize,
    max_degree: usize,
    tolerance: f64,
) -> Result<ResidualReport> {
    let lhs = multivariate(family, kind, &vec![0; l + 1], max_degree)?;
    let rhs = vertex_decomposition_rhs(family, kind, l, max_degree)?;
    let side = if kind == GenKind::H { "H" } else { "E" };
    Ok(ResidualReport::new("vertex-decomposition", lhs.distance(&rhs), tolerance)
        .param("side", side)
        .param("l", l)
        .param("D", max_degree))
}

/// All integer vectors in `lo..=hi` of length `l`.
fn grid(l: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..l {
        out = out
            .into_iter()
            .flat_map(|v| {
                (lo..=hi).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Products of vertex operators on the vacuum against multivariate series:
///
/// `Ψ⁺(x_1, l−1) ⋯ Ψ⁺(x_l, 0)(1) = z^l (x_1⋯x_l)^l H(x_1..x_l|u)`,
/// `Ψ⁻(x_1, 1−l) ⋯ Ψ⁻(x_l, 0)(1) = (−1)^{l(l−1)/2} z^{−l} (x_1⋯x_l)^{l−1} E(x_1..x_l|u)`,
///
/// with `Ψ⁺(x) = Σ ψ⁺_k x^k` and `Ψ⁻(x) = Σ ψ⁻_k x^{−k}`. Every coefficient
/// with exponents in `[−1, D + l]` is compared at every rank, relative to
/// the largest coefficient at that rank: many coefficients vanish only
/// because the shifted operators commute.
pub fn gen_vacuum_check<S: Scalar>(
    ev: &mut Evaluator<S>,
    plus: bool,
    l: usize,
    max_degree: usize,
    tolerance: f64,
) -> Result<ResidualReport> {
    let li = l as i64;
    let d = max_degree as i64;
    let (kind, charge, lift) = if plus {
        (GenKind::H, li, li)
    } else {
        (GenKind::E, -li, li - 1)
    };
    let sign_flip = !plus && (l * l.saturating_sub(1) / 2) % 2 == 1;
    let vac = BosonVector::<S>::vacuum();
    let mut r = Residual::ZERO;
    for n in 1..=ev.n_max() {
        let series = multivariate(ev.family(n), kind, &vec![0; l], max_degree)?;
        let zero = ev.family(n).zero();
        let mut abs: f64 = 0.0;
        let mut scale = series.max_norm();
        for exps in grid(l, -1, d + lift) {
            let ops: Vec<(bool, i64)> = exps.iter().map(|&e| (plus, if plus { e } else { -e })).collect();
            let lhs = TildeVector(apply_string(&ops, &vac));
            let got = ev.evaluate_at(&lhs, charge, n)?;
            let key: Vec<i64> = exps.iter().map(|e| e - lift).collect();
            let mut want = series.coefficient(&key).cloned().unwrap_or_else(|| zero.clone());
            if sign_flip {
                want = want.neg();
            }
            abs = abs.max(got.sub(&want).frobenius_norm());
            scale = scale.max(got.frobenius_norm());
        }
        r.absorb(Residual::new(abs, if scale == 0.0 { abs } else { abs / scale }));
    }
    Ok(ResidualReport::new("gen-vacuum", r, tolerance)
        .param("sign", if plus { "+" } else { "-" })
        .param("l", l)
        .param("D", max_degree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::{bilinear_residual, psi_minus, psi_plus};
    use crate::symfun::schur_poly;
    use num_complex::Complex64;

    type C = Complex64;

    fn cp(m: i64, parts: &[usize]) -> ChargedPartition {
        ChargedPartition::new(m, Partition::new(parts.to_vec()).unwrap())
    }

    fn evaluator(n_max: usize, sites: usize, seed: u64) -> Evaluator<C> {
        let ctx = ChainContext::random(n_max, sites, seed).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed ^ 0xb1);
        let u = ctx.sample_point(&mut rng);
        Evaluator::principal(&ctx, u).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let mut ev = evaluator(2, 1, 1);
        let v = TildeVector::<C>::basis(cp(0, &[1, 1, 1]));
        for op in ev.evaluate(&v, 0).unwrap() {
            assert!(op.is_zero());
        }
        let vac = ev.evaluate(&TildeVector::vacuum(), 0).unwrap();
        assert_eq!(vac[0], ev.family(1).identity());
        assert_eq!(vac[1], ev.family(2).identity());
    }

    #[test]
    fn character_at_no_sites() {
        let g = [C::new(0.9, 0.3), C::new(-1.1, 0.4)];
        let ctx = ChainContext::diagonal(g.to_vec(), Vec::new()).unwrap();
        let mut ev = Evaluator::principal(&ctx, C::new(0.3, 0.7)).unwrap();
        let t = ev.evaluate(&TildeVector::basis(cp(0, &[2])), 0).unwrap();
        let want = g[0] * g[0] + g[0] * g[1] + g[1] * g[1];
        assert!((t[1][(0, 0)] - want).norm() < 1e-12);
        let s = schur_poly(&Partition::new(vec![2, 1]).unwrap(), 3).unwrap().eval_at(&g);
        let t = ev.evaluate(&TildeVector::basis(cp(0, &[2, 1])), 0).unwrap();
        assert!((t[1][(0, 0)] - s).norm() < 1e-12);
        assert!(t[0].is_zero());
    }

    #[test]
    fn intertwining_on_basis() {
        for m in -1..=1 {
            for lam in Partition::all_up_to(3, 3) {
                let v = BosonVector::<C>::basis(ChargedPartition::new(m, lam));
                for k in -4..=4 {
                    assert_eq!(phi(&psi_plus(k, &v)), psi_tilde(true, k, &phi(&v)));
                    assert_eq!(phi(&psi_minus(k, &v)), psi_tilde(false, k, &phi(&v)));
                }
            }
        }
    }

    #[test]
    fn vacuum_strings_examples() {
        let (plus, _) = vacuum_strings(&Partition::new(vec![2, 1]).unwrap());
        assert_eq!(plus, vec![(true, 4), (true, 2)]);
        let (_, minus) = vacuum_strings(&Partition::new(vec![2]).unwrap());
        assert_eq!(minus, vec![(false, -2)]);
        let (_, minus) = vacuum_strings(&Partition::new(vec![2, 1]).unwrap());
        assert_eq!(minus, vec![(false, -3), (false, -1)]);
        let mut ev = evaluator(3, 1, 2);
        for lam in Partition::all_up_to(4, 3) {
            assert!(vacuum_strings_check(&lam, &mut ev, 1e-12).unwrap().pass, "{lam}");
        }
    }

    fn cauchy(y: &[C], max_weight: usize) -> BosonVector<C> {
        let mut tau = BosonVector::zero();
        for lam in Partition::all_up_to(max_weight, max_weight) {
            let c = schur_poly(&lam, max_weight).unwrap().eval_at(y);
            tau.add_term(ChargedPartition::new(0, lam), c);
        }
        tau
    }

    #[test]
    fn bilinear_matrix_cases() {
        let mut ev_u = evaluator(2, 1, 3);
        let mut ev_v = ev_u.at(C::new(0.4, -0.6125));
        let vac = BosonVector::<C>::vacuum();
        let r = bilinear_matrix_residual(&vac, &mut ev_u, &mut ev_v, None, 1e-8).unwrap();
        assert_eq!(r.absolute, 0.0);
        let single = BosonVector::<C>::basis(cp(0, &[2, 1]));
        assert!(bilinear_residual(&single, None).unwrap().is_empty());
        assert!(bilinear_matrix_residual(&single, &mut ev_u, &mut ev_v, None, 1e-8).unwrap().pass);

        let delta = 5;
        let tau = cauchy(&[C::new(0.7, 0.0), C::new(-0.3, 0.0)], delta);
        let r = bilinear_matrix_residual(&tau, &mut ev_u, &mut ev_v, Some(delta), 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
        let mut bad = tau.clone();
        bad.add_term(cp(0, &[1]), C::new(0.1, 0.0));
        let r = bilinear_matrix_residual(&bad, &mut ev_u, &mut ev_v, Some(delta), 1e-8).unwrap();
        assert!(r.relative > 1e-4, "{r:?}");
    }

    #[test]
    fn vertex_decomposition_small() {
        let mut ev = evaluator(2, 1, 4);
        for kind in [GenKind::H, GenKind::E] {
            for l in 0..=2 {
                let r = vertex_decomposition_check(ev.family(2), kind, l, 4, 1e-10).unwrap();
                assert!(r.pass, "{kind:?} {l} {r:?}");
            }
        }
    }

    #[test]
    fn gen_vacuum_small() {
        let mut ev = evaluator(2, 1, 5);
        for plus in [true, false] {
            for l in 1..=2 {
                let r = gen_vacuum_check(&mut ev, plus, l, 3, 1e-10).unwrap();
                assert!(r.pass, "{plus} {l} {r:?}");
            }
        }
    }
}
