//! Generating functions of transfer operators.
//!
//! ```text
//! H(x|u) = Σ_k h_k(u) x^k            E(x|u) = Σ_k (−1)^k e_k(u) x^k
//! H(x_1..x_l|u) = det[x_i^{−j} H(x_i|u − j)]
//! E(x_1..x_l|u) = det[(−x_i)^{−j} E(x_i|u + j)]        (0-based j)
//! ```
//!
//! The coefficient of `x_1^{e_1} ⋯ x_l^{e_l}`, `e_i = α_i − i` (0-based `i`),
//! is `T_α(u)` on the `H` side and `(−1)^{Σe} dual_det(α)` on the `E` side.
//!
//! Series are truncated per variable: every stored exponent satisfies
//! `e_i ≤ D`. Products drop exponents above `D`, which is exact as long as
//! no factor carries negative exponents in a variable that another factor
//! carries beyond `D`. Callers build such factors with headroom.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::det::{row_ordered_det, RingElement};
use crate::error::{Error, Result};
use crate::identities::{cbr_det, dual_det};
use crate::matrix::{Matrix, Operator};
use crate::report::{Residual, ResidualReport};
use crate::scalar::Scalar;
use crate::transfer::TransferFamily;

/// Truncated Laurent series in `vars` commuting variables with operator
/// coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesPoly<S: Scalar> {
    vars: usize,
    max_degree: i64,
    dim: usize,
    terms: BTreeMap<Vec<i64>, Operator<S>>,
}

impl<S: Scalar> SeriesPoly<S> {
    pub fn zero(vars: usize, max_degree: i64, dim: usize) -> Self {
        Self {
            vars,
            max_degree,
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, max_degree: i64, op: Operator<S>) -> Self {
        let mut out = Self::zero(vars, max_degree, op.rows());
        out.insert(vec![0; vars], op);
        out
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn max_degree(&self) -> i64 {
        self.max_degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, Operator<S>> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `op · x^exponents`; exponents above the truncation are dropped.
    pub fn insert(&mut self, exponents: Vec<i64>, op: Operator<S>) {
        assert_eq!(exponents.len(), self.vars, "exponent vector length");
        if exponents.iter().any(|&e| e > self.max_degree) {
            return;
        }
        match self.terms.get_mut(&exponents) {
            Some(c) => *c = c.add(&op),
            None => {
                self.terms.insert(exponents, op);
            }
        }
    }

    pub fn coefficient(&self, exponents: &[i64]) -> Option<&Operator<S>> {
        self.terms.get(exponents)
    }

    /// Coefficient, zero when absent. Fails for exponents above the
    /// truncation, where the series carries no information.
    pub fn coefficient_checked(&self, exponents: &[i64]) -> Result<Operator<S>> {
        if exponents.len() != self.vars {
            return Err(Error::SizeMismatch("exponent vector length"));
        }
        if exponents.iter().any(|&e| e > self.max_degree) {
            return Err(Error::OutOfRange("exponent above the truncation degree"));
        }
        Ok(self
            .terms
            .get(exponents)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.dim, self.dim)))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.max_degree = self.max_degree.min(rhs.max_degree);
        out.terms.retain(|k, _| k.iter().all(|&e| e <= out.max_degree));
        for (k, v) in &rhs.terms {
            out.insert(k.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coefficients(|c| c.neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map_coefficients(|op| op.scale(c))
    }

    fn map_coefficients(&self, f: impl Fn(&Operator<S>) -> Operator<S>) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), f(v))).collect(),
            ..self.clone()
        }
    }

    /// Product with the left factor's coefficients on the left.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.vars, rhs.vars, "variable count");
        let mut out = Self::zero(self.vars, self.max_degree.min(rhs.max_degree), self.dim);
        for (ka, a) in &self.terms {
            for (kb, b) in &rhs.terms {
                let k: Vec<i64> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
                if k.iter().all(|&e| e <= out.max_degree) {
                    out.insert(k, a.matmul(b));
                }
            }
        }
        out
    }

    /// Multiplies by `x_var^by`.
    pub fn shift(&self, var: usize, by: i64) -> Self {
        let mut out = Self::zero(self.vars, self.max_degree, self.dim);
        for (k, v) in &self.terms {
            let mut k = k.clone();
            k[var] += by;
            out.insert(k, v.clone());
        }
        out
    }

    /// Drops every exponent above `max_degree`.
    pub fn truncate(&self, max_degree: i64) -> Self {
        let mut out = Self::zero(self.vars, max_degree.min(self.max_degree), self.dim);
        for (k, v) in &self.terms {
            out.insert(k.clone(), v.clone());
        }
        out
    }

    /// The same series seen in `total` variables, its own placed at
    /// positions `first..first + vars`.
    pub fn embed(&self, total: usize, first: usize) -> Self {
        assert!(first + self.vars <= total, "embedding out of range");
        let mut out = Self::zero(total, self.max_degree, self.dim);
        for (k, v) in &self.terms {
            let mut e = vec![0; total];
            e[first..first + self.vars].copy_from_slice(k);
            out.insert(e, v.clone());
        }
        out
    }

    /// Largest coefficient norm.
    pub fn max_norm(&self) -> f64 {
        self.terms.values().map(|c| c.frobenius_norm()).fold(0.0, f64::max)
    }

    /// Worst coefficient mismatch with `rhs` over the common truncation,
    /// relative to the largest coefficient norm on either side.
    pub fn distance(&self, rhs: &Self) -> Residual {
        let d = self.max_degree.min(rhs.max_degree);
        let (a, b) = (self.truncate(d), rhs.truncate(d));
        let diff = a.sub(&b);
        let abs = diff.max_norm();
        let scale = a.max_norm().max(b.max_norm());
        Residual::new(abs, if scale == 0.0 { abs } else { abs / scale })
    }
}

impl<S: Scalar> RingElement for SeriesPoly<S> {
    fn ring_add(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }

    fn ring_sub(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }

    fn ring_mul(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
}

/// Which generating function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GenKind {
    H,
    E,
}

/// `H(x_var|u0 + s)` or `E(x_var|u0 + s)` up to `x_var^upto`, as a series in
/// `vars` variables truncated at `max_degree`.
pub fn single_series<S: Scalar>(
    family: &mut TransferFamily<S>,
    kind: GenKind,
    vars: usize,
    var: usize,
    s: i64,
    upto: i64,
    max_degree: i64,
) -> Result<SeriesPoly<S>> {
    let mut out = SeriesPoly::zero(vars, max_degree, family.dim());
    for k in 0..=upto {
        let mut e = vec![0; vars];
        e[var] = k;
        match kind {
            GenKind::H => {
                if let Some(op) = family.h_entry(k, s)? {
                    out.insert(e, op);
                }
            }
            GenKind::E => {
                if let Some(op) = family.e_entry(k, s)? {
                    out.insert(e, if k % 2 == 1 { op.neg() } else { op });
                }
            }
        }
    }
    Ok(out)
}

/// `Σ_{k ≤ D} h_k(u0 + s) x^k`.
pub fn h_series<S: Scalar>(family: &mut TransferFamily<S>, s: i64, max_degree: usize) -> Result<SeriesPoly<S>> {
    let d = max_degree as i64;
    single_series(family, GenKind::H, 1, 0, s, d, d)
}

/// `Σ_{k ≤ D} (−1)^k e_k(u0 + s) x^k`.
pub fn e_series<S: Scalar>(family: &mut TransferFamily<S>, s: i64, max_degree: usize) -> Result<SeriesPoly<S>> {
    let d = max_degree as i64;
    single_series(family, GenKind::E, 1, 0, s, d, d)
}

/// `x_var^{−j}` times the series at offset `s ∓ j`, the `(·, j)` entry of
/// the determinant.
fn determinant_entry<S: Scalar>(
    family: &mut TransferFamily<S>,
    kind: GenKind,
    vars: usize,
    var: usize,
    s: i64,
    j: i64,
    max_degree: i64,
) -> Result<SeriesPoly<S>> {
    let (offset, negate) = match kind {
        GenKind::H => (s - j, false),
        GenKind::E => (s + j, j % 2 == 1),
    };
    let series = single_series(family, kind, vars, var, offset, max_degree + j, max_degree + j)?.shift(var, -j);
    let series = series.truncate(max_degree);
    Ok(if negate { series.neg() } else { series })
}

/// Multivariate determinant with independent offsets: variable `i` sits at
/// `u0 + offsets[i]`.
pub fn multivariate<S: Scalar>(
    family: &mut TransferFamily<S>,
    kind: GenKind,
    offsets: &[i64],
    max_degree: usize,
) -> Result<SeriesPoly<S>> {
    let l = offsets.len();
    let d = max_degree as i64;
    let mut table = Vec::with_capacity(l);
    for (i, &s) in offsets.iter().enumerate() {
        let mut row = Vec::with_capacity(l);
        for j in 0..l {
            row.push(Some(determinant_entry(family, kind, l, i, s, j as i64, d)?));
        }
        table.push(row);
    }
    let one = SeriesPoly::constant(l, d, family.identity());
    Ok(row_ordered_det(&table, &one).unwrap_or_else(|| SeriesPoly::zero(l, d, family.dim())))
}

pub fn h_multivariate<S: Scalar>(family: &mut TransferFamily<S>, l: usize, max_degree: usize) -> Result<SeriesPoly<S>> {
    multivariate(family, GenKind::H, &vec![0; l], max_degree)
}

pub fn e_multivariate<S: Scalar>(family: &mut TransferFamily<S>, l: usize, max_degree: usize) -> Result<SeriesPoly<S>> {
    multivariate(family, GenKind::E, &vec![0; l], max_degree)
}

/// Exponents of the coefficient that carries `T_α`.
pub fn exponents_for(alpha: &[i64]) -> Vec<i64> {
    alpha.iter().enumerate().map(|(i, &a)| a - i as i64).collect()
}

/// `Π_{i<j} (y_j − y_i)` expanded: exponent vector of `y` to coefficient.
pub fn vandermonde_expansion(l: usize) -> BTreeMap<Vec<usize>, i64> {
    let mut poly: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
    poly.insert(vec![0; l], 1);
    for j in 0..l {
        for i in 0..j {
            let mut next: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
            for (k, c) in &poly {
                for (var, sign) in [(j, 1), (i, -1)] {
                    let mut k = k.clone();
                    k[var] += 1;
                    *next.entry(k).or_insert(0) += sign * c;
                }
            }
            next.retain(|_, c| *c != 0);
            poly = next;
        }
    }
    poly
}

/// The shift-operator product form of the multivariate generating function,
/// expanded with each variable at its own offset and the offsets then set
/// equal:
///
/// `H`: `Π_{i<j} (S_j/x_j − S_i/x_i) Π_i H(x_i|u_i)`, `S` lowering `u` by one;
/// `E`: `Π_{i<j} (S_i/x_i − S_j/x_j) Π_i E(x_i|u_i)`, `S` raising `u` by one.
pub fn shift_product_form<S: Scalar>(
    family: &mut TransferFamily<S>,
    kind: GenKind,
    l: usize,
    max_degree: usize,
) -> Result<SeriesPoly<S>> {
    let d = max_degree as i64;
    let mut out = SeriesPoly::zero(l, d, family.dim());
    for (powers, c) in vandermonde_expansion(l) {
        // for E the product is the reversed Vandermonde
        let sign = if kind == GenKind::E && (l * l.saturating_sub(1) / 2) % 2 == 1 { -c } else { c };
        let mut term = SeriesPoly::constant(l, d, family.identity());
        for (i, &p) in powers.iter().enumerate() {
            let p = p as i64;
            let offset = if kind == GenKind::H { -p } else { p };
            let factor = single_series(family, kind, l, i, offset, d + p, d + p)?.shift(i, -p).truncate(d);
            term = term.mul(&factor);
        }
        out = out.add(&term.scale(&S::from_int(sign)));
    }
    Ok(out)
}

/// Both multivariate series for one `(l, D)`, built once and queried for
/// many `α`.
#[derive(Clone, Debug)]
pub struct GenfunBox<S: Scalar> {
    pub l: usize,
    pub max_degree: usize,
    pub h: SeriesPoly<S>,
    pub e: SeriesPoly<S>,
}

impl<S: Scalar> GenfunBox<S> {
    pub fn new(family: &mut TransferFamily<S>, l: usize, max_degree: usize) -> Result<Self> {
        Ok(Self {
            l,
            max_degree,
            h: h_multivariate(family, l, max_degree)?,
            e: e_multivariate(family, l, max_degree)?,
        })
    }
}

/// Extracted coefficients against `cbr_det(α)` and `(−1)^{Σe} dual_det(α)`,
/// relative to the largest coefficient of the series (zero cases are zero
/// only up to commutators of shifted operators).
pub fn coefficient_vs_t<S: Scalar>(
    family: &mut TransferFamily<S>,
    gen: &GenfunBox<S>,
    alpha: &[i64],
    tolerance: f64,
) -> Result<ResidualReport> {
    if alpha.len() != gen.l {
        return Err(Error::SizeMismatch("α length differs from the variable count"));
    }
    let exps = exponents_for(alpha);
    let h = gen.h.coefficient_checked(&exps)?;
    let e = gen.e.coefficient_checked(&exps)?;
    let t = cbr_det(family, alpha, 0)?;
    let dual = dual_det(family, alpha, 0)?;
    let dual = if exps.iter().sum::<i64>().rem_euclid(2) == 1 { dual.neg() } else { dual };
    let a1 = h.sub(&t).frobenius_norm();
    let a2 = e.sub(&dual).frobenius_norm();
    let s1 = gen.h.max_norm().max(t.frobenius_norm());
    let s2 = gen.e.max_norm().max(dual.frobenius_norm());
    let rel = |a: f64, s: f64| if s == 0.0 { a } else { a / s };
    let r = Residual::new(a1, rel(a1, s1)).max(Residual::new(a2, rel(a2, s2)));
    Ok(ResidualReport::new("genfun", r, tolerance)
        .param("alpha", alpha.to_vec())
        .param("D", gen.max_degree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::distance;
    use crate::transfer::ChainContext;
    use num_complex::Complex64;

    fn family(n: usize, sites: usize, seed: u64) -> TransferFamily<Complex64> {
        let ctx = ChainContext::random(n, sites, seed).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed ^ 0x5eed);
        let u = ctx.sample_point(&mut rng);
        TransferFamily::new(ctx, u)
    }

    #[test]
    fn univariate_coefficients() {
        let mut f = family(2, 1, 1);
        let h = h_series(&mut f, 0, 4).unwrap();
        assert_eq!(h.coefficient(&[0]).unwrap(), &f.identity());
        assert_eq!(h.coefficient(&[1]).unwrap(), &f.h_op(1, 0).unwrap());
        let e = e_series(&mut f, 0, 4).unwrap();
        assert_eq!(e.coefficient(&[1]).unwrap(), &f.e_direct(1, 0).unwrap().neg());
        assert_eq!(e.coefficient(&[2]).unwrap(), &f.e_direct(2, 0).unwrap());
        assert!(e.coefficient(&[3]).is_none());
        assert_eq!(h_multivariate(&mut f, 1, 4).unwrap(), h);
    }

    #[test]
    fn two_variable_examples() {
        let mut f = family(2, 2, 2);
        let g = GenfunBox::new(&mut f, 2, 4).unwrap();
        let c = g.h.coefficient_checked(&[1, 0]).unwrap();
        let t = cbr_det(&mut f, &[1, 1], 0).unwrap();
        assert!(distance(&c, &t).1 < 1e-10);
        assert!(g.h.coefficient_checked(&[0, 0]).unwrap().max_abs() < 1e-12);
        for alpha in [[2, 1], [1, 2], [1, 1], [3, 0], [0, 3]] {
            assert!(coefficient_vs_t(&mut f, &g, &alpha, 1e-8).unwrap().pass, "{alpha:?}");
        }
        assert!(g.e.coefficient_checked(&[5, 0]).is_err());
    }

    #[test]
    fn vandermonde_small() {
        let v = vandermonde_expansion(2);
        assert_eq!(v.len(), 2);
        assert_eq!(v[&vec![0, 1]], 1);
        assert_eq!(v[&vec![1, 0]], -1);
        let v3 = vandermonde_expansion(3);
        assert_eq!(v3.len(), 6);
        assert_eq!(v3[&vec![0, 1, 2]], 1);
    }

    #[test]
    fn product_form_matches_determinant() {
        let mut f = family(2, 1, 3);
        for kind in [GenKind::H, GenKind::E] {
            let det = multivariate(&mut f, kind, &[0, 0], 4).unwrap();
            let prod = shift_product_form(&mut f, kind, 2, 4).unwrap();
            assert!(det.distance(&prod).relative < 1e-10, "{kind:?}");
        }
    }
}
