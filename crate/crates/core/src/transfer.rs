//! Transfer operators `T_λ(u)` on `(C^N)^{⊗n}`.
//!
//! The R-matrix acting on auxiliary space `V` and site `i` is
//! `R_{0i}(u - a_i) = Id + (u - a_i)^{-1} Σ_{p,q} gen(q,p) ⊗ E_{pq}`; the
//! monodromy multiplies these in site order `1..n` (site 1 leftmost), then
//! the twist `group(g) ⊗ Id` on the right, and the trace is over `V`.
//!
//! Writing `A^{(i)}_{pq} = δ_{pq} Id + (u - a_i)^{-1} gen(q,p)` for the block
//! of `R_{0i}` that maps basis vector `q` of site `i` to `p`, the matrix entry
//! is
//!
//! ```text
//! T[(p_1..p_n),(q_1..q_n)] = tr( A^{(1)}_{p_1 q_1} ⋯ A^{(n)}_{p_n q_n} · group(g) )
//! ```
//!
//! which [`transfer_direct`] evaluates with shared prefix products.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::Partition;
use crate::error::{Error, Result};
use crate::matrix::{Matrix, Operator};
use crate::repn::{sym_rep, wedge_rep, young_rep, RepSpace};
use crate::scalar::{GaussianRational, Scalar};

/// Closest allowed approach of the spectral parameter to an inhomogeneity.
pub const POLE_GUARD: f64 = 1e-10;

/// Integer shifts of the base point that randomly drawn points keep clear of.
pub const SHIFT_WINDOW: i64 = 12;

/// Margin kept between `u0 + s` and every `a_i` for `|s| ≤ SHIFT_WINDOW`.
pub const POLE_MARGIN: f64 = 0.05;

#[derive(Clone, Debug)]
pub struct ChainContext<S> {
    n_dim: usize,
    inhomogeneities: Vec<S>,
    twist: Matrix<S>,
    eigenvalues: Option<Vec<S>>,
    seed: Option<u64>,
}

impl<S: Scalar> ChainContext<S> {
    pub fn new(twist: Matrix<S>, inhomogeneities: Vec<S>) -> Result<Self> {
        if twist.rows() == 0 || !twist.is_square() {
            return Err(Error::InvalidTwist);
        }
        if twist.determinant().modulus() <= 1e-12 {
            return Err(Error::InvalidTwist);
        }
        Ok(Self {
            n_dim: twist.rows(),
            inhomogeneities,
            twist,
            eigenvalues: None,
            seed: None,
        })
    }

    pub fn diagonal(eigenvalues: Vec<S>, inhomogeneities: Vec<S>) -> Result<Self> {
        let mut ctx = Self::new(Matrix::from_diagonal(&eigenvalues), inhomogeneities)?;
        ctx.eigenvalues = Some(eigenvalues);
        Ok(ctx)
    }

    /// Same chain with the twist restricted to its leading `n×n` block.
    /// Only meaningful for diagonal twists.
    pub fn principal_truncation(&self, n: usize) -> Result<Self> {
        let eig = self
            .eigenvalues
            .as_ref()
            .ok_or(Error::InvalidTwist)?;
        if n == 0 || n > eig.len() {
            return Err(Error::OutOfRange("truncation rank"));
        }
        let mut ctx = Self::diagonal(eig[..n].to_vec(), self.inhomogeneities.clone())?;
        ctx.seed = self.seed;
        Ok(ctx)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// `N`.
    pub fn rank(&self) -> usize {
        self.n_dim
    }

    /// Number of sites `n`.
    pub fn sites(&self) -> usize {
        self.inhomogeneities.len()
    }

    pub fn inhomogeneities(&self) -> &[S] {
        &self.inhomogeneities
    }

    pub fn twist(&self) -> &Matrix<S> {
        &self.twist
    }

    pub fn eigenvalues(&self) -> Option<&[S]> {
        self.eigenvalues.as_deref()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `N^n`.
    pub fn quantum_dim(&self) -> usize {
        self.n_dim.pow(self.sites() as u32)
    }
}

/// Uniform angle, radius uniform in `[r_min, r_max]`.
pub fn sample_annulus<R: Rng>(rng: &mut R, r_min: f64, r_max: f64) -> Complex64 {
    let r = rng.random_range(r_min..=r_max);
    let t = rng.random_range(0.0..TAU);
    Complex64::from_polar(r, t)
}

impl ChainContext<Complex64> {
    /// Inhomogeneities in `1 ≤ |a| ≤ 3`, diagonal twist with eigenvalues in
    /// `0.5 ≤ |g| ≤ 2`, all from a ChaCha stream keyed by `seed`.
    pub fn random(n_dim: usize, sites: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = (0..sites).map(|_| sample_annulus(&mut rng, 1.0, 3.0)).collect();
        let g = (0..n_dim).map(|_| sample_annulus(&mut rng, 0.5, 2.0)).collect();
        Ok(Self::diagonal(g, a)?.with_seed(seed))
    }

    /// Like [`ChainContext::random`] but with a dense twist `P·diag·P^{-1}`
    /// hidden behind a random unipotent change of basis.
    pub fn random_dense(n_dim: usize, sites: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = (0..sites).map(|_| sample_annulus(&mut rng, 1.0, 3.0)).collect();
        let g: Vec<Complex64> = (0..n_dim).map(|_| sample_annulus(&mut rng, 0.5, 2.0)).collect();
        let mut upper = Matrix::<Complex64>::identity(n_dim);
        for i in 0..n_dim {
            for j in i + 1..n_dim {
                upper[(i, j)] = sample_annulus(&mut rng, 0.0, 1.0);
            }
        }
        let inv = unit_upper_inverse(&upper);
        let twist = upper.matmul(&Matrix::from_diagonal(&g)).matmul(&inv);
        let mut ctx = Self::new(twist, a)?.with_seed(seed);
        ctx.eigenvalues = None;
        Ok(ctx)
    }

    /// A spectral point in `1 ≤ |u| ≤ 3` such that `u + s` stays at least
    /// [`POLE_MARGIN`] away from every inhomogeneity for `|s| ≤ SHIFT_WINDOW`.
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> Complex64 {
        loop {
            let u = sample_annulus(rng, 1.0, 3.0);
            if self.clear_of_poles(u, SHIFT_WINDOW, POLE_MARGIN) {
                return u;
            }
        }
    }

    pub fn clear_of_poles(&self, u: Complex64, window: i64, margin: f64) -> bool {
        (-window..=window).all(|s| {
            self.inhomogeneities
                .iter()
                .all(|a| (u + Complex64::new(s as f64, 0.0) - a).norm() >= margin)
        })
    }
}

fn unit_upper_inverse(m: &Matrix<Complex64>) -> Matrix<Complex64> {
    let n = m.rows();
    let mut inv = Matrix::<Complex64>::identity(n);
    for col in 0..n {
        for row in (0..col).rev() {
            let mut acc = Complex64::zero();
            for k in row + 1..=col {
                acc += m[(row, k)] * inv[(k, col)];
            }
            inv[(row, col)] = -acc;
        }
    }
    inv
}

impl ChainContext<GaussianRational> {
    /// Exact context with quarter-integer Gaussian inhomogeneities and
    /// diagonal twist. Real parts are multiples of 1/4 and imaginary parts
    /// odd multiples of 1/4, so [`exact_point`] never hits a pole.
    pub fn random_exact(n_dim: usize, sites: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let quarter = |rng: &mut ChaCha8Rng, lo: i64, hi: i64, odd: bool| loop {
            let k = rng.random_range(lo..=hi);
            if !odd || k % 2 != 0 {
                return k;
            }
        };
        let mut a = Vec::with_capacity(sites);
        while a.len() < sites {
            let re = quarter(&mut rng, -12, 12, false);
            let im = quarter(&mut rng, -12, 12, true);
            let r2 = re * re + im * im;
            if (16..=144).contains(&r2) {
                a.push(crate::scalar::gaussian(re, im, 4));
            }
        }
        let mut g = Vec::with_capacity(n_dim);
        while g.len() < n_dim {
            let re = quarter(&mut rng, -8, 8, false);
            let im = quarter(&mut rng, -8, 8, false);
            let r2 = re * re + im * im;
            if (4..=64).contains(&r2) {
                g.push(crate::scalar::gaussian(re, im, 4));
            }
        }
        Ok(Self::diagonal(g, a)?.with_seed(seed))
    }

    /// Exact spectral point with imaginary part an odd multiple of 1/8;
    /// shifting by integers never meets an inhomogeneity of
    /// [`ChainContext::random_exact`].
    pub fn exact_point(&self, seed: u64) -> GaussianRational {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let re = rng.random_range(-16i64..=16);
        let im = 2 * rng.random_range(-8i64..=7) + 1;
        crate::scalar::gaussian(re, im, 8)
    }
}

/// `T(u)` for auxiliary representation `rep`, as an `N^n × N^n` matrix.
pub fn transfer_direct<S: Scalar>(rep: &RepSpace, ctx: &ChainContext<S>, u: &S) -> Result<Operator<S>> {
    if rep.rank() != ctx.rank() {
        return Err(Error::SizeMismatch("representation rank differs from N"));
    }
    let group = rep.group(ctx.twist())?;
    transfer_with_group(rep, ctx, u, &group)
}

fn transfer_with_group<S: Scalar>(
    rep: &RepSpace,
    ctx: &ChainContext<S>,
    u: &S,
    group: &Matrix<S>,
) -> Result<Operator<S>> {
    let n = ctx.rank();
    let sites = ctx.sites();
    if sites == 0 {
        return Ok(Matrix::from_diagonal(&[group.trace()]));
    }
    let mut inverses = Vec::with_capacity(sites);
    for (site, a) in ctx.inhomogeneities().iter().enumerate() {
        let d = u.clone() - a.clone();
        let distance = d.modulus();
        if distance < POLE_GUARD {
            return Err(Error::Pole { site: site + 1, distance });
        }
        inverses.push(S::one() / d);
    }
    let gens: Vec<Matrix<S>> = (0..n * n).map(|k| rep.gen_as::<S>(k / n, k % n)).collect();
    let id = Matrix::<S>::identity(rep.dim());
    // blocks[i][p*n+q] = A^{(i)}_{pq}
    let blocks: Vec<Vec<Matrix<S>>> = inverses
        .iter()
        .map(|inv| {
            (0..n * n)
                .map(|k| {
                    let (p, q) = (k / n, k % n);
                    let mut m = gens[q * n + p].scale(inv);
                    if p == q {
                        m = m.add(&id);
                    }
                    m
                })
                .collect()
        })
        .collect();
    let last: Vec<Matrix<S>> = blocks[sites - 1].iter().map(|b| b.matmul(group)).collect();

    let qdim = ctx.quantum_dim();
    let mut out = Matrix::zeros(qdim, qdim);
    fill(&blocks, &last, n, 0, 0, 0, None, &mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn fill<S: Scalar>(
    blocks: &[Vec<Matrix<S>>],
    last: &[Matrix<S>],
    n: usize,
    level: usize,
    row: usize,
    col: usize,
    prefix: Option<&Matrix<S>>,
    out: &mut Matrix<S>,
) {
    let sites = blocks.len();
    for p in 0..n {
        for q in 0..n {
            let r = row * n + p;
            let c = col * n + q;
            if level + 1 == sites {
                let b = &last[p * n + q];
                out[(r, c)] = match prefix {
                    None => b.trace(),
                    Some(m) => trace_of_product(m, b),
                };
            } else {
                let a = &blocks[level][p * n + q];
                let next = match prefix {
                    None => a.clone(),
                    Some(m) => m.matmul(a),
                };
                fill(blocks, last, n, level + 1, r, c, Some(&next), out);
            }
        }
    }
}

fn trace_of_product<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> S {
    let mut acc = S::zero();
    for i in 0..a.rows() {
        for k in 0..a.cols() {
            let x = &a[(i, k)];
            if x.is_zero() {
                continue;
            }
            let y = &b[(k, i)];
            if !y.is_zero() {
                acc = acc + x.clone() * y.clone();
            }
        }
    }
    acc
}

/// `T_λ(u)` through the Young-symmetrizer representation; zero if
/// `l(λ) > N`.
pub fn transfer_young<S: Scalar>(lambda: &Partition, ctx: &ChainContext<S>, u: &S) -> Result<Operator<S>> {
    let dim = ctx.quantum_dim();
    if lambda.len() > ctx.rank() {
        return Ok(Matrix::zeros(dim, dim));
    }
    transfer_direct(&young_rep(ctx.rank(), lambda)?, ctx, u)
}

/// Evaluation of transfer operators at `u0 + s` for integer shifts `s`, with
/// memoized `h_k` and `e_k`.
///
/// Filling the cache needs `&mut self`; callers that share a family across
/// threads run [`TransferFamily::prefill`] first and then use the `cached_*`
/// accessors through `&self`.
#[derive(Clone, Debug)]
pub struct TransferFamily<S: Scalar> {
    ctx: ChainContext<S>,
    u0: S,
    reps: BTreeMap<(bool, usize), (RepSpace, Matrix<S>)>,
    h: BTreeMap<(i64, i64), Operator<S>>,
    e: BTreeMap<(i64, i64), Operator<S>>,
}

impl<S: Scalar> TransferFamily<S> {
    pub fn new(ctx: ChainContext<S>, u0: S) -> Self {
        Self {
            ctx,
            u0,
            reps: BTreeMap::new(),
            h: BTreeMap::new(),
            e: BTreeMap::new(),
        }
    }

    pub fn context(&self) -> &ChainContext<S> {
        &self.ctx
    }

    pub fn base_point(&self) -> &S {
        &self.u0
    }

    /// `u0 + s`.
    pub fn point(&self, s: i64) -> S {
        self.u0.clone() + S::from_int(s)
    }

    pub fn dim(&self) -> usize {
        self.ctx.quantum_dim()
    }

    pub fn identity(&self) -> Operator<S> {
        Matrix::identity(self.dim())
    }

    pub fn zero(&self) -> Operator<S> {
        Matrix::zeros(self.dim(), self.dim())
    }

    fn rep(&mut self, exterior: bool, k: usize) -> Result<&(RepSpace, Matrix<S>)> {
        if !self.reps.contains_key(&(exterior, k)) {
            let n = self.ctx.rank();
            let rep = if exterior { wedge_rep(n, k)? } else { sym_rep(n, k)? };
            let group = rep.group(self.ctx.twist())?;
            self.reps.insert((exterior, k), (rep, group));
        }
        Ok(&self.reps[&(exterior, k)])
    }

    /// `h_k(u0 + s)`, or `None` when it vanishes by convention (`k < 0`).
    pub fn h_entry(&mut self, k: i64, s: i64) -> Result<Option<Operator<S>>> {
        if k < 0 {
            return Ok(None);
        }
        if k == 0 {
            return Ok(Some(self.identity()));
        }
        if let Some(op) = self.h.get(&(k, s)) {
            return Ok(Some(op.clone()));
        }
        let u = self.point(s);
        let ctx = self.ctx.clone();
        let (rep, group) = self.rep(false, k as usize)?;
        let op = transfer_with_group(rep, &ctx, &u, group)?;
        self.h.insert((k, s), op.clone());
        Ok(Some(op))
    }

    /// `e_k(u0 + s)`, or `None` when it vanishes (`k < 0` or `k > N`).
    pub fn e_entry(&mut self, k: i64, s: i64) -> Result<Option<Operator<S>>> {
        if k < 0 || k as usize > self.ctx.rank() {
            return Ok(None);
        }
        if k == 0 {
            return Ok(Some(self.identity()));
        }
        if let Some(op) = self.e.get(&(k, s)) {
            return Ok(Some(op.clone()));
        }
        let u = self.point(s);
        let ctx = self.ctx.clone();
        let (rep, group) = self.rep(true, k as usize)?;
        let op = transfer_with_group(rep, &ctx, &u, group)?;
        self.e.insert((k, s), op.clone());
        Ok(Some(op))
    }

    /// `h_k(u0 + s)` as an operator (zero for `k < 0`).
    pub fn h_op(&mut self, k: i64, s: i64) -> Result<Operator<S>> {
        Ok(self.h_entry(k, s)?.unwrap_or_else(|| self.zero()))
    }

    /// `e_k(u0 + s)` computed directly from `Λ^k C^N`.
    pub fn e_direct(&mut self, k: i64, s: i64) -> Result<Operator<S>> {
        Ok(self.e_entry(k, s)?.unwrap_or_else(|| self.zero()))
    }

    /// Fills the caches for `0 ≤ k ≤ k_max` and `s_min ≤ s ≤ s_max`.
    pub fn prefill(&mut self, k_max: i64, s_min: i64, s_max: i64) -> Result<()> {
        for s in s_min..=s_max {
            for k in 1..=k_max {
                self.h_entry(k, s)?;
                self.e_entry(k, s)?;
            }
        }
        Ok(())
    }

    pub fn cached_h(&self, k: i64, s: i64) -> Option<&Operator<S>> {
        self.h.get(&(k, s))
    }

    pub fn cached_e(&self, k: i64, s: i64) -> Option<&Operator<S>> {
        self.e.get(&(k, s))
    }

    /// `T_λ(u0 + s)` through the Young construction.
    pub fn young(&self, lambda: &Partition, s: i64) -> Result<Operator<S>> {
        transfer_young(lambda, &self.ctx, &self.point(s))
    }
}

/// Relative commutator size `‖[A,B]‖ / (‖A‖ ‖B‖)` (zero if either vanishes).
pub fn commutator_residual<S: Scalar>(a: &Operator<S>, b: &Operator<S>) -> (f64, f64) {
    let abs = a.commutator(b).frobenius_norm();
    let scale = a.frobenius_norm() * b.frobenius_norm();
    (abs, if scale == 0.0 { abs } else { abs / scale })
}

/// Exact rational inhomogeneities and twist eigenvalues, for tests that pin
/// values by hand.
pub fn rational_context(eigenvalues: &[(i64, i64)], inhomogeneities: &[(i64, i64)]) -> Result<ChainContext<BigRational>> {
    let q = |&(n, d): &(i64, i64)| BigRational::new(n.into(), d.into());
    ChainContext::diagonal(eigenvalues.iter().map(q).collect(), inhomogeneities.iter().map(q).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gaussian, ratio};
    use alloc::vec;
    use num_traits::One;
    use crate::symfun::schur_poly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn no_sites_gives_the_character() {
        let ctx = ChainContext::diagonal(vec![c(0.5, 1.0), c(-1.5, 0.25)], vec![]).unwrap();
        let t = transfer_direct(&young_rep(2, &Partition::row(1)).unwrap(), &ctx, &c(2.0, 0.0)).unwrap();
        assert_eq!(t.rows(), 1);
        assert!((t[(0, 0)] - c(-1.0, 1.25)).norm() < 1e-14);
    }

    #[test]
    fn trivial_auxiliary_space_gives_identity() {
        let ctx = ChainContext::random(3, 2, 7).unwrap();
        let t = transfer_direct(&sym_rep(3, 0).unwrap(), &ctx, &c(0.3, 0.1)).unwrap();
        assert_eq!(t, Matrix::identity(9));
    }

    /// Brute-force `tr_0(R_01(u - a)(g ⊗ Id))` for `N = 2`, `n = 1`, with the
    /// permutation-operator R-matrix written out as a 4×4 matrix.
    #[test]
    fn one_site_matches_explicit_four_by_four() {
        let (g1, g2, a, u) = (ratio(3, 1), ratio(-1, 2), ratio(1, 3), ratio(5, 2));
        let ctx = ChainContext::diagonal(vec![g1.clone(), g2.clone()], vec![a.clone()]).unwrap();
        let t = transfer_direct(&sym_rep(2, 1).unwrap(), &ctx, &u).unwrap();

        let x = BigRational::one() / (u - a);
        // index (aux, site) with aux most significant; R = Id + x P
        let r = Matrix::from_fn(4, 4, |i, j| {
            let (a0, s0) = (i / 2, i % 2);
            let (a1, s1) = (j / 2, j % 2);
            let mut v = if i == j { BigRational::one() } else { BigRational::zero() };
            if a0 == s1 && s0 == a1 {
                v += x.clone();
            }
            v
        });
        let twist = Matrix::from_diagonal(&[g1, g2]).kron(&Matrix::identity(2));
        let m = r.matmul(&twist);
        let expected = Matrix::from_fn(2, 2, |i, j| m[(i, j)].clone() + m[(2 + i, 2 + j)].clone());
        assert_eq!(t, expected);
    }

    #[test]
    fn h_and_e_conventions() {
        let ctx = ChainContext::random(2, 2, 11).unwrap();
        let mut fam = TransferFamily::new(ctx, c(0.2, 0.7));
        assert!(fam.h_op(-2, 0).unwrap().is_zero());
        assert_eq!(fam.h_op(0, 3).unwrap(), Matrix::identity(4));
        assert_eq!(fam.e_direct(0, 1).unwrap(), Matrix::identity(4));
        assert!(fam.e_direct(3, 0).unwrap().is_zero());
        let h1 = fam.h_op(1, 2).unwrap();
        let e1 = fam.e_direct(1, 2).unwrap();
        assert!(h1.sub(&e1).max_abs() < 1e-14);
        assert!(fam.cached_h(1, 2).is_some());
    }

    #[test]
    fn pole_is_rejected() {
        let ctx = ChainContext::diagonal(vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(0.5, 0.5)]).unwrap();
        let err = transfer_direct(&sym_rep(2, 1).unwrap(), &ctx, &c(0.5, 0.5)).unwrap_err();
        assert!(matches!(err, Error::Pole { site: 1, .. }));
    }

    #[test]
    fn singular_twist_is_rejected() {
        let g = Matrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        assert!(matches!(ChainContext::new(g, vec![]), Err(Error::InvalidTwist)));
    }

    #[test]
    fn sym_and_wedge_agree_with_young() {
        let ctx = ChainContext::random(3, 2, 5).unwrap();
        let mut fam = TransferFamily::new(ctx, c(0.4, -0.9));
        for k in 1..=4 {
            let young = fam.young(&Partition::row(k), 1).unwrap();
            let (abs, _) = crate::matrix::distance(&young, &fam.h_op(k as i64, 1).unwrap());
            assert!(abs < 1e-9 * young.frobenius_norm(), "h_{k}");
        }
        for k in 1..=3 {
            let young = fam.young(&Partition::column(k), -2).unwrap();
            let (abs, _) = crate::matrix::distance(&young, &fam.e_direct(k as i64, -2).unwrap());
            assert!(abs < 1e-9 * young.frobenius_norm(), "e_{k}");
        }
        assert!(fam.young(&Partition::column(4), 0).unwrap().is_zero());
    }

    #[test]
    fn transfer_operators_commute() {
        let ctx = ChainContext::random_dense(3, 2, 99).unwrap();
        let shapes = [Partition::row(2), Partition::new(vec![2, 1]).unwrap(), Partition::column(3)];
        let (u, v) = (c(0.3, 1.1), c(-0.8, 0.4));
        for l in &shapes {
            for m in &shapes {
                let a = transfer_young(l, &ctx, &u).unwrap();
                let b = transfer_young(m, &ctx, &v).unwrap();
                assert!(commutator_residual(&a, &b).1 < 1e-12, "{l} {m}");
            }
        }
    }

    #[test]
    fn large_argument_limit_is_the_character() {
        let ctx = ChainContext::random(2, 2, 3).unwrap();
        let lambda = Partition::new(vec![2, 1]).unwrap();
        let eig = ctx.eigenvalues().unwrap().to_vec();
        let s = schur_poly(&lambda, 3).unwrap().eval_at(&eig);
        let target = Matrix::identity(4).scale(&s);
        let dist = |u: Complex64| transfer_young(&lambda, &ctx, &u).unwrap().sub(&target).frobenius_norm();
        let ratio = dist(c(30.0, 40.0)) / dist(c(300.0, 400.0));
        assert!((5.0..=20.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn exact_context_avoids_poles() {
        let ctx = ChainContext::random_exact(2, 2, 1).unwrap();
        let u = ctx.exact_point(2);
        let mut fam = TransferFamily::new(ctx, u);
        for s in -12..=12 {
            fam.h_op(2, s).unwrap();
        }
        assert_eq!(fam.point(1) - fam.point(0), gaussian(1, 0, 1));
    }
}
