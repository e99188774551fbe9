//! Determinant and recursion identities between transfer operators.
//!
//! With `h_k(u) = T_{(k)}(u)`, `e_k(u) = T_{(1^k)}(u)` and integer shifts
//! relative to the family's base point:
//!
//! ```text
//! cbr_det(α, s)  = det_{i,j} h_{α_i − i + j}(u + s − j + 1)
//! dual_det(α, s) = det_{i,j} e_{α_i − i + j}(u + s + j − 1)
//! Σ_p (−1)^{a−p} h_{b+p}(u − p) e_{−p−a}(u − p − 1) = δ_{ab}
//! ```
//!
//! Determinants of operators multiply entries in row order.

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::combinatorics::{straighten, Partition, SignedPartition};
use crate::det::row_ordered_det;
use crate::error::Result;
use crate::matrix::Operator;
use crate::report::{Residual, ResidualReport};
use crate::scalar::Scalar;
use crate::transfer::TransferFamily;

/// `T_α(u0 + s)` as the CBR determinant of shifted `h`'s.
pub fn cbr_det<S: Scalar>(family: &mut TransferFamily<S>, alpha: &[i64], s: i64) -> Result<Operator<S>> {
    let l = alpha.len();
    let mut table = Vec::with_capacity(l);
    for (i, &a) in alpha.iter().enumerate() {
        let mut row = Vec::with_capacity(l);
        for j in 0..l {
            row.push(family.h_entry(a - i as i64 + j as i64, s - j as i64)?);
        }
        table.push(row);
    }
    let one = family.identity();
    Ok(row_ordered_det(&table, &one).unwrap_or_else(|| family.zero()))
}

/// Dual determinant in the `e`'s; for a partition `λ` the value at `λ'`
/// equals `T_λ`.
pub fn dual_det<S: Scalar>(family: &mut TransferFamily<S>, alpha: &[i64], s: i64) -> Result<Operator<S>> {
    let l = alpha.len();
    let mut table = Vec::with_capacity(l);
    for (i, &a) in alpha.iter().enumerate() {
        let mut row = Vec::with_capacity(l);
        for j in 0..l {
            row.push(family.e_entry(a - i as i64 + j as i64, s + j as i64)?);
        }
        table.push(row);
    }
    let one = family.identity();
    Ok(row_ordered_det(&table, &one).unwrap_or_else(|| family.zero()))
}

/// `T_λ` through the dual determinant of `λ'`. Exactly zero for `l(λ) > N`
/// because the first row then only holds `e_k` with `k > N`.
pub fn transfer_via_dual<S: Scalar>(family: &mut TransferFamily<S>, lambda: &Partition, s: i64) -> Result<Operator<S>> {
    let conj = lambda.conjugate();
    if conj.is_empty() {
        return Ok(family.identity());
    }
    dual_det(family, &conj.to_vector(conj.len()), s)
}

/// `Σ_p (−1)^{a−p} h_{b+p}(u − p) e_{−p−a}(u − p − 1) − δ_{ab} Id` at the
/// base point.
pub fn newton_residual<S: Scalar>(family: &mut TransferFamily<S>, a: i64, b: i64) -> Result<Operator<S>> {
    let mut acc = if a == b { family.identity().neg() } else { family.zero() };
    for p in -b..=-a {
        let (Some(h), Some(e)) = (family.h_entry(b + p, -p)?, family.e_entry(-p - a, -p - 1)?) else {
            continue;
        };
        let term = h.matmul(&e);
        acc = if (a - p).rem_euclid(2) == 1 { acc.sub(&term) } else { acc.add(&term) };
    }
    Ok(acc)
}

/// Largest entry modulus among the operators in the Newton sum, used to
/// scale its residual.
pub fn newton_scale<S: Scalar>(family: &mut TransferFamily<S>, a: i64, b: i64) -> Result<f64> {
    let mut scale: f64 = if a == b { 1.0 } else { 0.0 };
    for p in -b..=-a {
        if let Some(h) = family.h_entry(b + p, -p)? {
            scale = scale.max(h.max_abs());
        }
        if let Some(e) = family.e_entry(-p - a, -p - 1)? {
            scale = scale.max(e.max_abs());
        }
    }
    Ok(scale)
}

fn signed_op<S: Scalar>(op: Operator<S>, negative: bool) -> Operator<S> {
    if negative {
        op.neg()
    } else {
        op
    }
}

/// `Π_i Σ_j ‖M_ij‖`, a bound on every term of the determinant expansion.
/// Determinants that vanish by cancellation are small relative to it.
pub fn determinant_bound<S: Scalar>(family: &mut TransferFamily<S>, alpha: &[i64], s: i64, dual: bool) -> Result<f64> {
    let mut bound = 1.0;
    for (i, &a) in alpha.iter().enumerate() {
        let mut row = 0.0;
        for j in 0..alpha.len() {
            let k = a - i as i64 + j as i64;
            let entry = if dual {
                family.e_entry(k, s + j as i64)?
            } else {
                family.h_entry(k, s - j as i64)?
            };
            row += entry.map_or(0.0, |op| op.frobenius_norm());
        }
        bound *= row;
    }
    Ok(bound)
}

/// `T_α = ±T_λ` (or zero) as dictated by straightening, for both the CBR
/// and the dual determinant. Relative residuals divide by
/// [`determinant_bound`], since the zero cases vanish only up to rounding.
pub fn straightening_check<S: Scalar>(
    family: &mut TransferFamily<S>,
    alpha: &[i64],
    s: i64,
    tolerance: f64,
) -> Result<ResidualReport> {
    let direct = cbr_det(family, alpha, s)?;
    let dual = dual_det(family, alpha, s)?;
    let (expected, expected_dual) = match straighten(alpha) {
        SignedPartition::Zero => (family.zero(), family.zero()),
        SignedPartition::Term { negative, partition } => {
            let lam = partition.to_vector(alpha.len());
            (
                signed_op(cbr_det(family, &lam, s)?, negative),
                signed_op(dual_det(family, &lam, s)?, negative),
            )
        }
    };
    let a1 = direct.sub(&expected).frobenius_norm();
    let a2 = dual.sub(&expected_dual).frobenius_norm();
    let s1 = determinant_bound(family, alpha, s, false)?.max(expected.frobenius_norm());
    let s2 = determinant_bound(family, alpha, s, true)?.max(expected_dual.frobenius_norm());
    let rel = |a: f64, b: f64| if b == 0.0 { a } else { a / b };
    let r = Residual::new(a1.max(a2), rel(a1, s1).max(rel(a2, s2)));
    Ok(ResidualReport::new("straighten", r, tolerance)
        .param("alpha", alpha.to_vec())
        .param("s", s))
}

/// Nonzero pattern of `T_{(α_1, α_2)}` over a box, next to the pattern
/// predicted by straightening.
#[derive(Clone, Debug, PartialEq)]
pub struct Fig1Grid {
    pub a1: RangeInclusive<i64>,
    pub a2: RangeInclusive<i64>,
    /// `norms[i][j]` for `α = (a1.start + i, a2.start + j)`.
    pub norms: Vec<Vec<f64>>,
    pub threshold: f64,
    pub computed: Vec<Vec<bool>>,
    pub predicted: Vec<Vec<bool>>,
}

impl Fig1Grid {
    pub fn mismatches(&self) -> usize {
        self.computed
            .iter()
            .flatten()
            .zip(self.predicted.iter().flatten())
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Character grid with `α_2` increasing upwards and `α_1` to the right;
    /// `#` nonzero, `.` zero.
    pub fn render(&self) -> String {
        use core::fmt::Write;
        let mut out = String::new();
        let a1: Vec<i64> = self.a1.clone().collect();
        for (j, y) in self.a2.clone().enumerate().collect::<Vec<_>>().into_iter().rev() {
            let _ = write!(out, "{y:>3} |");
            for i in 0..a1.len() {
                out.push_str("  ");
                out.push(if self.computed[i][j] { '#' } else { '.' });
            }
            out.push('\n');
        }
        out.push_str("    +");
        for _ in &a1 {
            out.push_str("---");
        }
        out.push('\n');
        out.push_str("     ");
        for x in &a1 {
            let _ = write!(out, "{x:>3}");
        }
        out.push('\n');
        out
    }
}

/// Whether `T_α` should be nonzero for rank `n`.
pub fn predicted_nonzero(alpha: &[i64], n: usize) -> bool {
    match straighten(alpha) {
        SignedPartition::Zero => false,
        SignedPartition::Term { partition, .. } => partition.len() <= n,
    }
}

/// Evaluates `cbr_det((α_1, α_2))` over the box. An entry counts as nonzero
/// when its norm exceeds `1e-6` times the median of the norms that are
/// not negligible (above `1e-9` of the largest one).
pub fn fig1_pattern<S: Scalar>(
    family: &mut TransferFamily<S>,
    a1: RangeInclusive<i64>,
    a2: RangeInclusive<i64>,
) -> Result<Fig1Grid> {
    let n = family.context().rank();
    let mut norms = Vec::new();
    let mut predicted = Vec::new();
    for x in a1.clone() {
        let mut col = Vec::new();
        let mut pred = Vec::new();
        for y in a2.clone() {
            col.push(cbr_det(family, &[x, y], 0)?.frobenius_norm());
            pred.push(predicted_nonzero(&[x, y], n));
        }
        norms.push(col);
        predicted.push(pred);
    }
    let largest = norms.iter().flatten().copied().fold(0.0, f64::max);
    let mut significant: Vec<f64> = norms
        .iter()
        .flatten()
        .copied()
        .filter(|&v| v > 1e-9 * largest)
        .collect();
    significant.sort_by(f64::total_cmp);
    let median = significant.get(significant.len() / 2).copied().unwrap_or(0.0);
    let threshold = 1e-6 * median;
    let computed = norms
        .iter()
        .map(|col| col.iter().map(|&v| v > threshold).collect())
        .collect();
    Ok(Fig1Grid {
        a1,
        a2,
        norms,
        threshold,
        computed,
        predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{distance, Matrix};
    use crate::transfer::ChainContext;
    use alloc::vec;
    use num_complex::Complex64;

    fn family(n: usize, sites: usize, seed: u64) -> TransferFamily<Complex64> {
        let ctx = ChainContext::random(n, sites, seed).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed + 1000);
        let u = ctx.sample_point(&mut rng);
        TransferFamily::new(ctx, u)
    }

    fn close(a: &Operator<Complex64>, b: &Operator<Complex64>, tol: f64) -> bool {
        distance(a, b).1 <= tol
    }

    #[test]
    fn one_by_one_is_h() {
        let mut f = family(2, 2, 1);
        let h1 = f.h_op(1, 0).unwrap();
        assert_eq!(cbr_det(&mut f, &[1], 0).unwrap(), h1);
        assert!(close(&dual_det(&mut f, &[1], 0).unwrap(), &h1, 1e-14));
    }

    #[test]
    fn e2_from_h_determinant() {
        let mut f = family(3, 2, 2);
        let det = cbr_det(&mut f, &[1, 1], 0).unwrap();
        let e2 = f.e_direct(2, 0).unwrap();
        assert!(close(&det, &e2, 1e-10));
    }

    #[test]
    fn cbr_matches_young_for_two_one() {
        let mut f = family(3, 2, 3);
        let lam = Partition::new(vec![2, 1]).unwrap();
        let det = cbr_det(&mut f, &[2, 1], 0).unwrap();
        assert!(close(&det, &f.young(&lam, 0).unwrap(), 1e-8));
        let dual = dual_det(&mut f, &[2, 1], 0).unwrap();
        assert!(close(&dual, &det, 1e-8));
        let dual2 = dual_det(&mut f, &[1, 1], 0).unwrap();
        assert!(close(&dual2, &cbr_det(&mut f, &[2], 0).unwrap(), 1e-8));
    }

    #[test]
    fn newton_small_cases() {
        let mut f = family(3, 2, 4);
        assert!(newton_residual(&mut f, 0, 0).unwrap().is_zero());
        assert!(newton_residual(&mut f, 0, 1).unwrap().max_abs() < 1e-12);
        let r = newton_residual(&mut f, 0, 3).unwrap().max_abs();
        assert!(r <= 1e-8 * newton_scale(&mut f, 0, 3).unwrap());
        assert!(newton_residual(&mut f, 2, 1).unwrap().is_zero());
    }

    #[test]
    fn straightening_examples() {
        let mut f = family(2, 1, 5);
        assert!(straightening_check(&mut f, &[1, 3], 0, 1e-10).unwrap().pass);
        for alpha in [[1, 2], [0, 1], [-1, 0], [3, 4], [2, 5]] {
            assert!(straightening_check(&mut f, &alpha, 0, 1e-10).unwrap().pass, "{alpha:?}");
        }
        let zero = cbr_det(&mut f, &[1, 2], 0).unwrap();
        assert!(zero.max_abs() < 1e-12);
        assert_eq!(cbr_det(&mut f, &[0, 0, 0], 0).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn fig1_examples() {
        let mut f = family(2, 1, 6);
        let grid = fig1_pattern(&mut f, -3..=5, -3..=5).unwrap();
        assert_eq!(grid.mismatches(), 0);
        let at = |x: i64, y: i64| grid.computed[(x + 3) as usize][(y + 3) as usize];
        assert!(at(2, 1));
        assert!(!at(1, 2));
        assert!(!at(-1, 0));
        assert!(at(2, 2));
        for x in -3..=5 {
            assert_eq!(at(x, 0), x >= 0);
        }
        assert!(grid.render().contains('#'));
    }
}
