//! Determinants with entries in a ring whose products are taken in row order.
//!
//! `det M = Σ_σ sgn σ · M[0][σ(0)] · M[1][σ(1)] ⋯ M[l-1][σ(l-1)]` with the
//! factors multiplied left to right in row order. For commuting entries this
//! is the ordinary determinant; for operator entries it fixes the order.
//! Evaluated by dynamic programming over column subsets (`O(2^l · l)` ring
//! products) instead of the `l!` permutation sum; both give the same
//! row-ordered expansion.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub trait RingElement: Clone {
    fn ring_add(&self, rhs: &Self) -> Self;
    fn ring_sub(&self, rhs: &Self) -> Self;
    fn ring_mul(&self, rhs: &Self) -> Self;
}

impl<S: Scalar> RingElement for Matrix<S> {
    fn ring_add(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }

    fn ring_sub(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }

    fn ring_mul(&self, rhs: &Self) -> Self {
        self.matmul(rhs)
    }
}

/// Row-ordered determinant of a square array of optional entries, where
/// `None` stands for zero. Returns `None` if every term vanishes
/// structurally. `one` is the empty product (used for the `0×0` case and as
/// the seed of every product).
pub fn row_ordered_det<T: RingElement>(entries: &[Vec<Option<T>>], one: &T) -> Option<T> {
    let l = entries.len();
    assert!(entries.iter().all(|r| r.len() == l), "determinant needs a square array");
    if l == 0 {
        return Some(one.clone());
    }
    // partial[mask] = signed sum of products over rows 0..popcount(mask)
    // with the used columns equal to `mask`.
    let mut partial: Vec<Option<T>> = vec![None; 1 << l];
    partial[0] = Some(one.clone());
    for mask in 1usize..(1 << l) {
        let row = mask.count_ones() as usize - 1;
        let mut acc: Option<T> = None;
        for col in 0..l {
            if mask & (1 << col) == 0 {
                continue;
            }
            let rest = mask & !(1 << col);
            let (Some(prev), Some(entry)) = (&partial[rest], &entries[row][col]) else {
                continue;
            };
            let term = prev.ring_mul(entry);
            // placing `col` after the columns already used creates one
            // inversion per used column to its right
            let negative = (rest >> (col + 1)).count_ones() % 2 == 1;
            acc = Some(match (acc, negative) {
                (None, false) => term,
                (None, true) => one.ring_sub(one).ring_sub(&term),
                (Some(a), false) => a.ring_add(&term),
                (Some(a), true) => a.ring_sub(&term),
            });
        }
        partial[mask] = acc;
    }
    partial[(1 << l) - 1].take()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    type Q = Matrix<BigRational>;

    fn scalar(n: i64) -> Q {
        Matrix::from_row_major(1, 1, vec![ratio(n, 1)])
    }

    /// Leibniz formula over all permutations, as an oracle.
    fn leibniz(m: &[Vec<i64>]) -> i64 {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..n {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let n = m.len();
        perms(n)
            .into_iter()
            .map(|p| {
                let inv = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| p[i] > p[j])
                    .count();
                let prod: i64 = (0..n).map(|i| m[i][p[i]]).product();
                if inv % 2 == 0 {
                    prod
                } else {
                    -prod
                }
            })
            .sum()
    }

    #[test]
    fn matches_leibniz_on_integer_matrices() {
        let m = vec![
            vec![2, -1, 0, 3],
            vec![1, 4, -2, 0],
            vec![0, 5, 1, -1],
            vec![3, 0, 2, 2],
        ];
        let entries: Vec<Vec<Option<Q>>> = m
            .iter()
            .map(|r| r.iter().map(|&x| Some(scalar(x))).collect())
            .collect();
        let det = row_ordered_det(&entries, &scalar(1)).unwrap();
        assert_eq!(det, scalar(leibniz(&m)));
    }

    #[test]
    fn structural_zero_and_empty() {
        let one = scalar(1);
        assert_eq!(row_ordered_det::<Q>(&[], &one), Some(one.clone()));
        let entries = vec![vec![Some(scalar(1)), None], vec![Some(scalar(2)), None]];
        assert_eq!(row_ordered_det(&entries, &one), None);
    }

    #[test]
    fn products_follow_row_order() {
        // 1x1 blocks of non-commuting 2x2 matrices: det of a diagonal array
        // must be M00 · M11 in that order.
        let a = Matrix::from_row_major(2, 2, vec![ratio(0, 1), ratio(1, 1), ratio(0, 1), ratio(0, 1)]);
        let b = a.transpose();
        let entries = vec![vec![Some(a.clone()), None], vec![None, Some(b.clone())]];
        let det = row_ordered_det(&entries, &Matrix::identity(2)).unwrap();
        assert_eq!(det, a.matmul(&b));
    }
}
