//! Chain contexts drawn from named streams, with explicit config values
//! taking precedence over the draws.

use anyhow::bail;
use num_complex::Complex64;
use serde::Serialize;

use qtransfer_core::transfer::{ChainContext, POLE_MARGIN, SHIFT_WINDOW};
use qtransfer_core::{Matrix, Scalar};

use crate::config::{to_c64, Config, Pair, TwistSpec};
use crate::seeds::{derive, stream};

/// Everything needed to replay one context in isolation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContextRecord {
    pub label: String,
    pub seed: u64,
    pub exact: bool,
    pub rank: usize,
    pub sites: usize,
    pub a: Vec<Pair>,
    /// Twist, row-major.
    pub g: Vec<Vec<Pair>>,
    pub u: Pair,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<Pair>,
}

fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

pub fn record<S: Scalar>(label: &str, seed: u64, ctx: &ChainContext<S>, u: &S) -> ContextRecord {
    let g = ctx.twist();
    ContextRecord {
        label: label.to_string(),
        seed,
        exact: S::EXACT,
        rank: ctx.rank(),
        sites: ctx.sites(),
        a: ctx.inhomogeneities().iter().map(|a| pair(a.to_c64())).collect(),
        g: (0..g.rows()).map(|i| (0..g.cols()).map(|j| pair(g[(i, j)].to_c64())).collect()).collect(),
        u: pair(u.to_c64()),
        v: None,
    }
}

/// Context of rank `rank` on `sites` sites: random unless the config fixes
/// the inhomogeneities or the twist.
pub fn chain(cfg: &Config, seed: u64, rank: usize, sites: usize) -> anyhow::Result<ChainContext<Complex64>> {
    let random = ChainContext::random(rank, sites, seed)?;
    let a: Vec<Complex64> = match &cfg.inhomogeneities {
        Some(a) => a.iter().take(sites).map(to_c64).collect(),
        None => random.inhomogeneities().to_vec(),
    };
    let ctx = match &cfg.twist {
        None => ChainContext::diagonal(random.eigenvalues().unwrap_or_default().to_vec(), a)?,
        Some(TwistSpec::Diagonal(g)) => ChainContext::diagonal(g.iter().take(rank).map(to_c64).collect(), a)?,
        Some(TwistSpec::Matrix(rows)) => {
            let block = Matrix::from_fn(rank, rank, |i, j| to_c64(&rows[i][j]));
            ChainContext::new(block, a)?
        }
    };
    Ok(ctx.with_seed(seed))
}

/// A spectral point for `ctx`: `explicit` if given (and clear of poles),
/// otherwise drawn from the stream `name`.
pub fn point(
    cfg: &Config,
    ctx: &ChainContext<Complex64>,
    explicit: Option<Pair>,
    name: &str,
) -> anyhow::Result<Complex64> {
    match explicit {
        Some(p) => {
            let u = to_c64(&p);
            if !ctx.clear_of_poles(u, SHIFT_WINDOW, POLE_MARGIN) {
                bail!(
                    "spectral point {u} comes within {POLE_MARGIN} of an inhomogeneity shifted by at most {SHIFT_WINDOW}"
                );
            }
            Ok(u)
        }
        None => Ok(ctx.sample_point(&mut stream(cfg.seed, name))),
    }
}

/// A context and its base point `u`, both keyed by `label`.
pub fn draw(cfg: &Config, label: &str, rank: usize, sites: usize) -> anyhow::Result<(ChainContext<Complex64>, Complex64, ContextRecord)> {
    let seed = derive(cfg.seed, label);
    let ctx = chain(cfg, seed, rank, sites)?;
    let u = point(cfg, &ctx, cfg.u, &format!("{label}/u"))?;
    let rec = record(label, seed, &ctx, &u);
    Ok((ctx, u, rec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible() {
        let cfg = Config::default();
        let (_, u1, r1) = draw(&cfg, "x/2/1/0", 2, 1).unwrap();
        let (_, u2, r2) = draw(&cfg, "x/2/1/0", 2, 1).unwrap();
        assert_eq!(u1, u2);
        assert_eq!(r1, r2);
        let (_, u3, _) = draw(&cfg, "x/2/1/1", 2, 1).unwrap();
        assert_ne!(u1, u3);
    }

    #[test]
    fn explicit_values_win() {
        let cfg = Config {
            inhomogeneities: Some(vec![[1.5, 0.25], [-2.0, 0.5]]),
            twist: Some(TwistSpec::Matrix(vec![
                vec![[1.0, 0.0], [0.5, 0.0], [0.0, 0.0]],
                vec![[0.0, 0.0], [2.0, 0.0], [0.0, 0.0]],
                vec![[0.0, 0.0], [0.0, 0.0], [0.7, 0.1]],
            ])),
            u: Some([0.3, 0.6]),
            ..Config::default()
        };
        let (ctx, u, rec) = draw(&cfg, "x", 2, 1).unwrap();
        assert_eq!(u, Complex64::new(0.3, 0.6));
        assert_eq!(ctx.inhomogeneities(), &[Complex64::new(1.5, 0.25)]);
        assert_eq!(rec.g, vec![vec![[1.0, 0.0], [0.5, 0.0]], vec![[0.0, 0.0], [2.0, 0.0]]]);
    }

    #[test]
    fn explicit_point_on_a_pole_is_rejected() {
        let cfg = Config {
            inhomogeneities: Some(vec![[1.5, 0.25]]),
            u: Some([-1.5, 0.25]),
            ..Config::default()
        };
        assert!(draw(&cfg, "x", 2, 1).is_err());
    }
}
