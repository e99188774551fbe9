//! Partitions, integer vectors, straightening and Maya diagrams.

use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;

/// A weakly decreasing sequence of positive integers. Zero parts are dropped
/// on construction, so `(2, 1, 0)` and `(2, 1)` are the same partition.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self, Error> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::NotAPartition(parts.iter().map(|&p| p as i64).collect()));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Self(parts))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Single row `(k)`; empty for `k = 0`.
    pub fn row(k: usize) -> Self {
        if k == 0 {
            Self::empty()
        } else {
            Self(alloc::vec![k])
        }
    }

    /// Single column `(1^k)`.
    pub fn column(k: usize) -> Self {
        Self(alloc::vec![1; k])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    /// Part `i` (1-based), zero past the end.
    pub fn part(&self, i: usize) -> usize {
        self.0.get(i.wrapping_sub(1)).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Self {
        let width = self.0.first().copied().unwrap_or(0);
        Self((1..=width).map(|j| self.0.iter().filter(|&&p| p >= j).count()).collect())
    }

    /// Parts as an integer vector padded with zeros to length `len`.
    pub fn to_vector(&self, len: usize) -> Vec<i64> {
        (1..=len.max(self.len())).map(|i| self.part(i) as i64).collect()
    }

    /// All partitions of `weight`, in reverse lexicographic order.
    pub fn all_of_weight(weight: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        fill(weight, weight, &mut current, &mut out);
        out
    }

    /// All partitions of weight at most `max_weight` with at most `max_len`
    /// parts, ordered by weight.
    pub fn all_up_to(max_weight: usize, max_len: usize) -> Vec<Partition> {
        (0..=max_weight)
            .flat_map(Self::all_of_weight)
            .filter(|p| p.len() <= max_len)
            .collect()
    }

    /// Dimension of the irreducible `gl(N)` module with this highest weight,
    /// by the hook-content formula; zero when the partition has more than
    /// `n` rows.
    pub fn gl_dimension(&self, n: usize) -> usize {
        if self.len() > n {
            return 0;
        }
        let conj = self.conjugate();
        let mut num: u128 = 1;
        let mut den: u128 = 1;
        for (i, &row) in self.0.iter().enumerate() {
            for j in 0..row {
                let content = n as i64 + j as i64 - i as i64;
                let hook = (row - j) + (conj.0[j] - i) - 1;
                num *= content as u128;
                den *= hook as u128;
            }
        }
        (num / den) as usize
    }
}

fn fill(remaining: usize, max_part: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition(current.clone()));
        return;
    }
    for p in (1..=remaining.min(max_part)).rev() {
        current.push(p);
        fill(remaining - p, p, current, out);
        current.pop();
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

/// Result of straightening an integer vector: zero, or a signed partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SignedPartition {
    Zero,
    Term { negative: bool, partition: Partition },
}

impl SignedPartition {
    pub fn positive(partition: Partition) -> Self {
        Self::Term {
            negative: false,
            partition,
        }
    }

    /// `+1`, `-1` or `0`.
    pub fn sign(&self) -> i64 {
        match self {
            Self::Zero => 0,
            Self::Term { negative: false, .. } => 1,
            Self::Term { negative: true, .. } => -1,
        }
    }

    pub fn partition(&self) -> Option<&Partition> {
        match self {
            Self::Zero => None,
            Self::Term { partition, .. } => Some(partition),
        }
    }

    pub fn negated(self) -> Self {
        match self {
            Self::Zero => Self::Zero,
            Self::Term { negative, partition } => Self::Term {
                negative: !negative,
                partition,
            },
        }
    }
}

/// Reduce an integer vector `α` to `±λ` or zero via `α − ρ = σ(λ − ρ)`,
/// `ρ = (0, 1, …, l−1)`.
///
/// The vector length matters: trailing zeros of `α` are kept. The result is
/// zero when two entries of `α_i − i` coincide or when the sorted vector has
/// a negative part.
pub fn straighten(alpha: &[i64]) -> SignedPartition {
    let mut shifted: Vec<i64> = alpha
        .iter()
        .enumerate()
        .map(|(i, &a)| a - (i as i64 + 1))
        .collect();
    // insertion sort into strictly decreasing order, counting transpositions
    let mut swaps = 0usize;
    for i in 1..shifted.len() {
        let mut j = i;
        while j > 0 && shifted[j - 1] < shifted[j] {
            shifted.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
        if j > 0 && shifted[j - 1] == shifted[j] {
            return SignedPartition::Zero;
        }
    }
    let mut parts = Vec::with_capacity(shifted.len());
    for (i, g) in shifted.iter().enumerate() {
        let part = g + i as i64 + 1;
        if part < 0 {
            return SignedPartition::Zero;
        }
        parts.push(part as usize);
    }
    let partition = Partition::new(parts).expect("sorted shifted vector gives a partition");
    SignedPartition::Term {
        negative: swaps % 2 == 1,
        partition,
    }
}

/// Basis label `z^m s_λ` of the charge-`m` component of the boson space.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChargedPartition {
    pub charge: i64,
    pub partition: Partition,
}

impl ChargedPartition {
    pub fn new(charge: i64, partition: Partition) -> Self {
        Self { charge, partition }
    }

    pub fn vacuum(charge: i64) -> Self {
        Self::new(charge, Partition::empty())
    }
}

impl fmt::Display for ChargedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z^{} {}", self.charge, self.partition)
    }
}

/// Semi-infinite strictly decreasing index sequence `d_1 > d_2 > …` with
/// `d_i = m − i + 1` for all large `i`.
///
/// Stored as the finite head plus the charge; entries past the head follow
/// the tail rule. The head never ends with a tail entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MayaDiagram {
    charge: i64,
    head: Vec<i64>,
}

impl MayaDiagram {
    /// Build from a strictly decreasing head. Entries past the head are
    /// `charge − i + 1`; the head must end above that tail.
    pub fn new(charge: i64, mut head: Vec<i64>) -> Result<Self, Error> {
        let decreasing = head.windows(2).all(|w| w[0] > w[1]);
        let above_tail = head
            .last()
            .is_none_or(|&last| last > charge - head.len() as i64);
        if !decreasing || !above_tail {
            return Err(Error::NotAMayaDiagram);
        }
        while let Some(&last) = head.last() {
            if last == charge - head.len() as i64 + 1 {
                head.pop();
            } else {
                break;
            }
        }
        Ok(Self { charge, head })
    }

    pub fn charge(&self) -> i64 {
        self.charge
    }

    pub fn head(&self) -> &[i64] {
        &self.head
    }

    /// Entry `i` (1-based).
    pub fn entry(&self, i: usize) -> i64 {
        match self.head.get(i - 1) {
            Some(&d) => d,
            None => self.charge - i as i64 + 1,
        }
    }

    /// First entry past the head.
    fn tail_start(&self) -> i64 {
        self.charge - self.head.len() as i64
    }

    /// All entries `≥ cutoff`, in decreasing order.
    pub fn entries_down_to(&self, cutoff: i64) -> Vec<i64> {
        let mut out = Vec::new();
        let mut i = 1;
        loop {
            let d = self.entry(i);
            if d < cutoff {
                return out;
            }
            out.push(d);
            i += 1;
        }
    }

    pub fn contains(&self, index: i64) -> bool {
        self.entries_down_to(index).last() == Some(&index)
    }

    /// `v_k ∧ (·)`: the new diagram and whether the sign is negative, or
    /// `None` when `k` is already occupied.
    pub fn wedge(&self, k: i64) -> Option<(bool, MayaDiagram)> {
        let mut entries = self.entries_down_to(k.min(self.tail_start()));
        if entries.contains(&k) {
            return None;
        }
        let position = entries.iter().filter(|&&d| d > k).count();
        entries.insert(position, k);
        let diagram = MayaDiagram::new(self.charge + 1, entries).expect("wedge keeps ordering");
        Some((position % 2 == 1, diagram))
    }

    /// Contraction removing `v_k`, or `None` when `k` is unoccupied.
    pub fn contract(&self, k: i64) -> Option<(bool, MayaDiagram)> {
        let mut entries = self.entries_down_to(k.min(self.tail_start()));
        let position = entries.iter().position(|&d| d == k)?;
        entries.remove(position);
        // the remainder of the old tail becomes the new tail at charge m−1
        let diagram = MayaDiagram::new(self.charge - 1, entries).expect("contraction keeps ordering");
        Some((position % 2 == 1, diagram))
    }
}

/// `d_i = m − i + 1 + λ_i`.
pub fn to_maya(c: &ChargedPartition) -> MayaDiagram {
    let head = (1..=c.partition.len())
        .map(|i| c.charge - i as i64 + 1 + c.partition.part(i) as i64)
        .collect();
    MayaDiagram::new(c.charge, head).expect("partition gives a Maya diagram")
}

/// Inverse of [`to_maya`]: `λ_i = d_i − m + i − 1`.
pub fn from_maya(d: &MayaDiagram) -> ChargedPartition {
    let parts = d
        .head
        .iter()
        .enumerate()
        .map(|(i, &di)| (di - d.charge + i as i64) as usize)
        .collect();
    ChargedPartition::new(
        d.charge,
        Partition::new(parts).expect("Maya diagram gives a partition"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn straighten_examples() {
        assert_eq!(straighten(&[2, 1]), SignedPartition::positive(p(&[2, 1])));
        assert_eq!(
            straighten(&[1, 3]),
            SignedPartition::Term {
                negative: true,
                partition: p(&[2, 2])
            }
        );
        assert_eq!(straighten(&[1, 2]), SignedPartition::Zero);
        assert_eq!(straighten(&[-1, 0]), SignedPartition::Zero);
        assert_eq!(straighten(&[0, 0, 0]), SignedPartition::positive(Partition::empty()));
        assert_eq!(straighten(&[]), SignedPartition::positive(Partition::empty()));
    }

    #[test]
    fn straighten_prepending_negative_part() {
        // (−1, 2): γ = (−2, 0) → one swap → (1)
        assert_eq!(straighten(&[-1, 2]), SignedPartition::positive(p(&[1])).negated());
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(Partition::empty().conjugate(), Partition::empty());
        assert_eq!(p(&[2, 1]).conjugate(), p(&[2, 1]));
        assert_eq!(p(&[3, 1]).conjugate(), p(&[2, 1, 1]));
    }

    #[test]
    fn partition_rejects_increasing() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert_eq!(Partition::new(vec![2, 0, 0]).unwrap(), p(&[2]));
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..8).map(|w| Partition::all_of_weight(w).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15]);
    }

    #[test]
    fn hook_content_dimensions() {
        assert_eq!(p(&[2, 1]).gl_dimension(2), 2);
        assert_eq!(p(&[2, 1]).gl_dimension(3), 8);
        assert_eq!(p(&[3]).gl_dimension(3), 10);
        assert_eq!(p(&[1, 1, 1]).gl_dimension(3), 1);
        assert_eq!(p(&[1, 1, 1]).gl_dimension(2), 0);
        assert_eq!(p(&[2, 2]).gl_dimension(4), 20);
    }

    #[test]
    fn maya_examples() {
        let vac = to_maya(&ChargedPartition::vacuum(0));
        assert_eq!(vac.entries_down_to(-2), vec![0, -1, -2]);
        let two = to_maya(&ChargedPartition::new(0, p(&[2])));
        assert_eq!(two.entries_down_to(-2), vec![2, -1, -2]);
        let c = to_maya(&ChargedPartition::new(1, p(&[1, 1])));
        assert_eq!(c.entries_down_to(-2), vec![2, 1, -1, -2]);
    }

    #[test]
    fn maya_wedge_and_contract() {
        let vac = to_maya(&ChargedPartition::vacuum(0));
        let (neg, d) = vac.wedge(1).unwrap();
        assert!(!neg);
        assert_eq!(from_maya(&d), ChargedPartition::vacuum(1));
        assert!(vac.wedge(-3).is_none());
        let (neg, d) = vac.contract(-1).unwrap();
        assert!(neg);
        assert_eq!(from_maya(&d), ChargedPartition::new(-1, p(&[1])));
        assert!(vac.contract(1).is_none());
    }

    #[test]
    fn maya_wedge_above_a_gap_keeps_the_head() {
        // z^0 s_(4,2): entries 4, 1, -2, -3, ...
        let d = to_maya(&ChargedPartition::new(0, p(&[4, 2])));
        let (neg, w) = d.wedge(3).unwrap();
        assert!(neg);
        assert_eq!(w.entries_down_to(-3), vec![4, 3, 1, -2, -3]);
        let (neg, c) = d.contract(1).unwrap();
        assert!(neg);
        assert_eq!(c.entries_down_to(-3), vec![4, -2, -3]);
    }
}
