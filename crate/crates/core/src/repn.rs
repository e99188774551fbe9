//! Finite-dimensional `gl(N)` representations given by explicit matrices.
//!
//! Three constructions are provided:
//!
//! * [`sym_rep`]: `Sym^k C^N`, basis of monomials `x^μ` listed as weakly
//!   increasing index tuples in lexicographic order;
//! * [`wedge_rep`]: `Λ^k C^N`, basis of strictly increasing index tuples in
//!   lexicographic order;
//! * [`young_rep`]: the image of a Young symmetrizer inside `(C^N)^{⊗d}`, for
//!   an arbitrary partition. This one is slow and only meant as an
//!   independent reference for small shapes.
//!
//! Generator matrices are exact (integer for Sym/Λ, rational for the Young
//! construction). Group elements are computed in whatever [`Scalar`] field
//! the twist matrix lives in.
//!
//! Indices `i, j` of `gen(i, j)` are 0-based here: `gen(0, 1)` is `e_{12}`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::combinatorics::Partition;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Largest `|λ|` accepted by [`young_rep`] by default.
pub const YOUNG_MAX_WEIGHT: usize = 4;
/// Largest `N` accepted by [`young_rep`].
pub const YOUNG_MAX_N: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub enum RepKind {
    Symmetric(usize),
    Exterior(usize),
    Young(Partition),
}

/// Basis vectors of a Young-symmetrizer image, in reduced echelon form over
/// the word basis of `(C^N)^{⊗d}`.
#[derive(Clone, Debug)]
struct YoungBasis {
    degree: usize,
    /// `columns[c]` is basis vector `c`, sparse over word indices.
    columns: Vec<BTreeMap<usize, BigRational>>,
    /// `pivots[c]` is the word index where column `c` has its leading 1 and
    /// every other column vanishes.
    pivots: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct RepSpace {
    n: usize,
    kind: RepKind,
    /// Index tuples for Sym/Λ, pivot words for the Young construction.
    basis_labels: Vec<Vec<usize>>,
    gens: Vec<Matrix<BigRational>>,
    young: Option<YoungBasis>,
}

impl RepSpace {
    /// Rank `N` of the acting `gl(N)`.
    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn kind(&self) -> &RepKind {
        &self.kind
    }

    pub fn basis_labels(&self) -> &[Vec<usize>] {
        &self.basis_labels
    }

    /// Exact matrix of `e_{ij}` (0-based indices).
    pub fn gen(&self, i: usize, j: usize) -> &Matrix<BigRational> {
        &self.gens[i * self.n + j]
    }

    /// `e_{ij}` converted into the scalar field `S`.
    pub fn gen_as<S: Scalar>(&self, i: usize, j: usize) -> Matrix<S> {
        self.gen(i, j).map(S::from_rational)
    }

    /// Matrix of the group element `g` (an invertible `N×N` matrix).
    pub fn group<S: Scalar>(&self, g: &Matrix<S>) -> Result<Matrix<S>> {
        if g.rows() != self.n || g.cols() != self.n {
            return Err(Error::SizeMismatch("twist matrix must be N×N"));
        }
        Ok(match &self.kind {
            RepKind::Symmetric(_) => self.sym_group(g),
            RepKind::Exterior(_) => self.wedge_group(g),
            RepKind::Young(_) => self.young_group(g),
        })
    }

    fn sym_group<S: Scalar>(&self, g: &Matrix<S>) -> Matrix<S> {
        let index: BTreeMap<Vec<usize>, usize> = self
            .basis_labels
            .iter()
            .enumerate()
            .map(|(i, t)| (multiplicities(t, self.n), i))
            .collect();
        let dim = self.dim();
        let mut out = Matrix::zeros(dim, dim);
        for (col, tuple) in self.basis_labels.iter().enumerate() {
            // x_q ↦ Σ_p g_pq x_p applied to Π x_q over the tuple
            let mut poly: BTreeMap<Vec<usize>, S> = BTreeMap::new();
            poly.insert(vec![0; self.n], S::one());
            for &q in tuple {
                let mut next: BTreeMap<Vec<usize>, S> = BTreeMap::new();
                for (mono, c) in &poly {
                    for p in 0..self.n {
                        let gpq = &g[(p, q)];
                        if gpq.is_zero() {
                            continue;
                        }
                        let mut m = mono.clone();
                        m[p] += 1;
                        let entry = next.entry(m).or_insert_with(S::zero);
                        *entry = entry.clone() + c.clone() * gpq.clone();
                    }
                }
                poly = next;
            }
            for (mono, c) in poly {
                out[(index[&mono], col)] = c;
            }
        }
        out
    }

    fn wedge_group<S: Scalar>(&self, g: &Matrix<S>) -> Matrix<S> {
        let dim = self.dim();
        Matrix::from_fn(dim, dim, |r, c| {
            minor_det(g, &self.basis_labels[r], &self.basis_labels[c])
        })
    }

    fn young_group<S: Scalar>(&self, g: &Matrix<S>) -> Matrix<S> {
        let basis = self.young.as_ref().expect("Young representation carries its basis");
        let d = basis.degree;
        let dim = self.dim();
        let mut out = Matrix::zeros(dim, dim);
        for (c, column) in basis.columns.iter().enumerate() {
            for (r, &pivot) in basis.pivots.iter().enumerate() {
                let pivot_word = word_digits(pivot, self.n, d);
                let mut acc = S::zero();
                for (&w, coeff) in column {
                    let digits = word_digits(w, self.n, d);
                    let mut prod = S::from_rational(coeff);
                    for s in 0..d {
                        prod = prod * g[(pivot_word[s], digits[s])].clone();
                        if prod.is_zero() {
                            break;
                        }
                    }
                    acc = acc + prod;
                }
                out[(r, c)] = acc;
            }
        }
        out
    }
}

fn multiplicities(tuple: &[usize], n: usize) -> Vec<usize> {
    let mut m = vec![0; n];
    for &i in tuple {
        m[i] += 1;
    }
    m
}

/// `det g[rows, cols]` by cofactor expansion along the first row.
fn minor_det<S: Scalar>(g: &Matrix<S>, rows: &[usize], cols: &[usize]) -> S {
    match rows.len() {
        0 => S::one(),
        1 => g[(rows[0], cols[0])].clone(),
        _ => {
            let mut acc = S::zero();
            for (k, &c) in cols.iter().enumerate() {
                let entry = &g[(rows[0], c)];
                if entry.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let term = entry.clone() * minor_det(g, &rows[1..], &rest);
                acc = if k % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

/// All weakly (`strict = false`) or strictly increasing `k`-tuples over
/// `0..n`, in lexicographic order.
fn increasing_tuples(n: usize, k: usize, strict: bool) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, start: usize, strict: bool, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(n, k, if strict { i + 1 } else { i }, strict, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, k, 0, strict, &mut Vec::new(), &mut out);
    out
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `Sym^k C^N`; `e_{ij}` acts as `x_i ∂/∂x_j`.
pub fn sym_rep(n: usize, k: usize) -> Result<RepSpace> {
    if n == 0 {
        return Err(Error::InvalidRepresentation("N must be positive"));
    }
    let basis = increasing_tuples(n, k, false);
    let index: BTreeMap<Vec<usize>, usize> = basis
        .iter()
        .enumerate()
        .map(|(i, t)| (multiplicities(t, n), i))
        .collect();
    let dim = basis.len();
    let mut gens = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut m = Matrix::zeros(dim, dim);
            for (col, tuple) in basis.iter().enumerate() {
                let mut mu = multiplicities(tuple, n);
                let mj = mu[j];
                if mj == 0 {
                    continue;
                }
                mu[j] -= 1;
                mu[i] += 1;
                m[(index[&mu], col)] = int(mj as i64);
            }
            gens.push(m);
        }
    }
    Ok(RepSpace {
        n,
        kind: RepKind::Symmetric(k),
        basis_labels: basis,
        gens,
        young: None,
    })
}

/// `Λ^k C^N`; `e_{ij}` replaces `j` by `i` in a wedge monomial, with the
/// reordering sign.
pub fn wedge_rep(n: usize, k: usize) -> Result<RepSpace> {
    if n == 0 {
        return Err(Error::InvalidRepresentation("N must be positive"));
    }
    if k > n {
        return Err(Error::InvalidRepresentation("exterior power above N"));
    }
    let basis = increasing_tuples(n, k, true);
    let index: BTreeMap<Vec<usize>, usize> =
        basis.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    let dim = basis.len();
    let mut gens = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut m = Matrix::zeros(dim, dim);
            for (col, tuple) in basis.iter().enumerate() {
                let Some(pos) = tuple.iter().position(|&t| t == j) else {
                    continue;
                };
                if i != j && tuple.contains(&i) {
                    continue;
                }
                let mut replaced = tuple.clone();
                replaced[pos] = i;
                // bubble the new entry into place; each swap flips the sign
                let mut p = pos;
                let mut negative = false;
                while p > 0 && replaced[p - 1] > replaced[p] {
                    replaced.swap(p - 1, p);
                    p -= 1;
                    negative = !negative;
                }
                while p + 1 < replaced.len() && replaced[p] > replaced[p + 1] {
                    replaced.swap(p, p + 1);
                    p += 1;
                    negative = !negative;
                }
                m[(index[&replaced], col)] = int(if negative { -1 } else { 1 });
            }
            gens.push(m);
        }
    }
    Ok(RepSpace {
        n,
        kind: RepKind::Exterior(k),
        basis_labels: basis,
        gens,
        young: None,
    })
}

fn word_digits(w: usize, n: usize, d: usize) -> Vec<usize> {
    let mut digits = vec![0; d];
    let mut rest = w;
    for s in (0..d).rev() {
        digits[s] = rest % n;
        rest /= n;
    }
    digits
}

fn word_index(digits: &[usize], n: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * n + x)
}

/// All permutations of `cells`, as maps slot → slot on `0..d`, with signs.
fn block_permutations(blocks: &[Vec<usize>], d: usize) -> Vec<(Vec<usize>, bool)> {
    let mut out: Vec<(Vec<usize>, bool)> = vec![((0..d).collect(), false)];
    for block in blocks {
        let mut next = Vec::new();
        for perm in permutations(block.len()) {
            let odd = parity(&perm);
            for (base, sign) in &out {
                let mut map = base.clone();
                for (a, &b) in perm.iter().enumerate() {
                    map[block[a]] = block[b];
                }
                next.push((map, sign ^ odd));
            }
        }
        out = next;
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn parity(perm: &[usize]) -> bool {
    let mut odd = false;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                odd = !odd;
            }
        }
    }
    odd
}

/// Reduced echelon basis, built one vector at a time.
struct EchelonBasis {
    columns: Vec<BTreeMap<usize, BigRational>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    fn insert(&mut self, mut v: BTreeMap<usize, BigRational>) {
        for (col, &pivot) in self.columns.iter().zip(&self.pivots) {
            if let Some(c) = v.get(&pivot).cloned() {
                axpy_sparse(&mut v, &-c, col);
            }
        }
        let Some((&pivot, lead)) = v.iter().next() else {
            return;
        };
        let inv = BigRational::one() / lead.clone();
        for x in v.values_mut() {
            *x = x.clone() * inv.clone();
        }
        for col in &mut self.columns {
            if let Some(c) = col.get(&pivot).cloned() {
                axpy_sparse(col, &-c, &v);
            }
        }
        self.columns.push(v);
        self.pivots.push(pivot);
    }
}

fn axpy_sparse(v: &mut BTreeMap<usize, BigRational>, c: &BigRational, w: &BTreeMap<usize, BigRational>) {
    for (&k, x) in w {
        let entry = v.entry(k).or_insert_with(BigRational::zero);
        *entry = entry.clone() + c.clone() * x.clone();
        if entry.is_zero() {
            v.remove(&k);
        }
    }
}

/// Irreducible representation with highest weight `λ` realized inside
/// `(C^N)^{⊗|λ|}` as the image of the Young symmetrizer `P·Q` of the
/// row-reading tableau (`P` symmetrizes rows, `Q` antisymmetrizes columns).
///
/// The image is computed exactly over the rationals; its dimension is
/// compared against the hook-content formula and a mismatch is an error.
pub fn young_rep(n: usize, lambda: &Partition) -> Result<RepSpace> {
    young_rep_bounded(n, lambda, YOUNG_MAX_WEIGHT)
}

/// [`young_rep`] with an explicit cap on `|λ|`.
pub fn young_rep_bounded(n: usize, lambda: &Partition, max_weight: usize) -> Result<RepSpace> {
    if n == 0 || n > YOUNG_MAX_N {
        return Err(Error::InvalidRepresentation("Young construction needs 1 ≤ N ≤ 4"));
    }
    if lambda.weight() > max_weight {
        return Err(Error::InvalidRepresentation("partition too large for the Young construction"));
    }
    if lambda.len() > n {
        return Err(Error::InvalidRepresentation("partition has more than N rows"));
    }
    let d = lambda.weight();
    // row-by-row filling with slots 0..d
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut next = 0;
    for &len in lambda.parts() {
        rows.push((next..next + len).collect());
        next += len;
    }
    let columns: Vec<Vec<usize>> = (0..lambda.part(1))
        .map(|j| rows.iter().filter(|r| r.len() > j).map(|r| r[j]).collect())
        .collect();
    let row_perms = block_permutations(&rows, d);
    let col_perms = block_permutations(&columns, d);

    let words = n.pow(d as u32);
    let mut echelon = EchelonBasis {
        columns: Vec::new(),
        pivots: Vec::new(),
    };
    for w in 0..words {
        let digits = word_digits(w, n, d);
        let mut image: BTreeMap<usize, i64> = BTreeMap::new();
        for (cmap, odd) in &col_perms {
            let mut after_q = vec![0; d];
            for s in 0..d {
                after_q[cmap[s]] = digits[s];
            }
            for (rmap, _) in &row_perms {
                let mut after_p = vec![0; d];
                for s in 0..d {
                    after_p[rmap[s]] = after_q[s];
                }
                *image.entry(word_index(&after_p, n)).or_insert(0) += if *odd { -1 } else { 1 };
            }
        }
        let v: BTreeMap<usize, BigRational> = image
            .into_iter()
            .filter(|&(_, c)| c != 0)
            .map(|(k, c)| (k, int(c)))
            .collect();
        if !v.is_empty() {
            echelon.insert(v);
        }
    }

    let expected = lambda.gl_dimension(n);
    if echelon.columns.len() != expected {
        return Err(Error::RankMismatch {
            computed: echelon.columns.len(),
            expected,
        });
    }
    // order basis by pivot word for reproducibility
    let mut order: Vec<usize> = (0..echelon.pivots.len()).collect();
    order.sort_by_key(|&c| echelon.pivots[c]);
    let basis = YoungBasis {
        degree: d,
        columns: order.iter().map(|&c| echelon.columns[c].clone()).collect(),
        pivots: order.iter().map(|&c| echelon.pivots[c]).collect(),
    };
    let dim = basis.columns.len();
    let mut gens = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut m = Matrix::zeros(dim, dim);
            for (c, column) in basis.columns.iter().enumerate() {
                let mut image: BTreeMap<usize, BigRational> = BTreeMap::new();
                for (&w, coeff) in column {
                    let digits = word_digits(w, n, d);
                    for s in 0..d {
                        if digits[s] != j {
                            continue;
                        }
                        let mut moved = digits.clone();
                        moved[s] = i;
                        let entry = image.entry(word_index(&moved, n)).or_insert_with(BigRational::zero);
                        *entry = entry.clone() + coeff.clone();
                    }
                }
                for (r, pivot) in basis.pivots.iter().enumerate() {
                    if let Some(x) = image.get(pivot) {
                        m[(r, c)] = x.clone();
                    }
                }
            }
            gens.push(m);
        }
    }
    let labels = basis.pivots.iter().map(|&p| word_digits(p, n, d)).collect();
    Ok(RepSpace {
        n,
        kind: RepKind::Young(lambda.clone()),
        basis_labels: labels,
        gens,
        young: Some(basis),
    })
}

/// Largest entry of `[e_ij, e_kl] − (δ_jk e_il − δ_li e_kj)` over all index
/// quadruples.
pub fn commutation_residual(rep: &RepSpace) -> f64 {
    let n = rep.rank();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let lhs = rep.gen(i, j).commutator(rep.gen(k, l));
                    let mut rhs = Matrix::zeros(rep.dim(), rep.dim());
                    if j == k {
                        rhs = rhs.add(rep.gen(i, l));
                    }
                    if l == i {
                        rhs = rhs.sub(rep.gen(k, j));
                    }
                    worst = worst.max(lhs.sub(&rhs).max_abs());
                }
            }
        }
    }
    worst
}
