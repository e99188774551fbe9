use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qtransfer_core::bridge::{Evaluator, TildeVector};
use qtransfer_core::transfer::ChainContext;
use qtransfer_core::{ChargedPartition, Partition};

/// Smallest singular value of the Gram matrix of the unit-normalized
/// tuples `(T^1_λ, T^2_λ, T^3_λ)`, `|λ| ≤ 3`, on two sites.
fn smallest_gram_singular_value(seed: u64) -> f64 {
    let ctx = ChainContext::random(3, 2, seed).unwrap();
    let u = ctx.sample_point(&mut ChaCha8Rng::seed_from_u64(seed + 1));
    let mut ev = Evaluator::principal(&ctx, u).unwrap();
    let labels = Partition::all_up_to(3, 3);
    let columns: Vec<Vec<Complex64>> = labels
        .iter()
        .map(|lam| {
            let v = TildeVector::<Complex64>::basis(ChargedPartition::new(0, lam.clone()));
            let flat: Vec<Complex64> = ev
                .evaluate(&v, 0)
                .unwrap()
                .iter()
                .flat_map(|op| op.as_slice().to_vec())
                .collect();
            let norm = flat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            flat.iter().map(|z| z / norm).collect()
        })
        .collect();
    let rows = columns[0].len();
    let m = DMatrix::from_fn(rows, columns.len(), |i, j| columns[j][i]);
    let gram = m.adjoint() * &m;
    gram.singular_values().min()
}

#[test]
fn evaluated_sequences_are_independent() {
    for seed in [11, 12, 13] {
        let s = smallest_gram_singular_value(seed);
        assert!(s > 1e-6, "seed {seed}: smallest singular value {s:e}");
    }
}

#[test]
fn labels_longer_than_rank_evaluate_to_zero() {
    let ctx = ChainContext::random(3, 1, 5).unwrap();
    let u = ctx.sample_point(&mut ChaCha8Rng::seed_from_u64(6));
    let mut ev = Evaluator::principal(&ctx, u).unwrap();
    let v = TildeVector::<Complex64>::basis(ChargedPartition::new(0, Partition::new(vec![1, 1, 1]).unwrap()));
    let tuple = ev.evaluate(&v, 0).unwrap();
    assert!(tuple[0].is_zero() && tuple[1].is_zero());
    assert!(tuple[2].frobenius_norm() > 1e-3);
}

#[test]
fn top_wedge_is_scalar_at_a_single_rank() {
    // why independence is only asked of the whole tuple
    let ctx = ChainContext::random(3, 2, 9).unwrap();
    let u = ctx.sample_point(&mut ChaCha8Rng::seed_from_u64(10));
    let mut ev = Evaluator::principal(&ctx, u).unwrap();
    let v = TildeVector::<Complex64>::basis(ChargedPartition::new(0, Partition::new(vec![1, 1, 1]).unwrap()));
    let top = ev.evaluate_at(&v, 0, 3).unwrap();
    let c = top[(0, 0)];
    let id = ev.family(3).identity();
    assert!(top.sub(&id.scale(&c)).frobenius_norm() < 1e-10 * top.frobenius_norm());
}
