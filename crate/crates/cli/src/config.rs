//! Run configuration, read from one JSON file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Every check the runner knows, in report order.
pub const CHECKS: [&str; 15] = [
    "cbr",
    "dual",
    "newton",
    "commute",
    "limit",
    "straighten",
    "fig1",
    "genfun",
    "clifford",
    "vertex",
    "fsym",
    "bilinear",
    "bilinear-matrix",
    "vertex-decomposition",
    "gen-vacuum",
];

/// A complex number as `[re, im]`.
pub type Pair = [f64; 2];

pub fn to_c64(p: &Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwistSpec {
    /// Eigenvalues of a diagonal twist; rank `N` uses the first `N`.
    Diagonal(Vec<Pair>),
    /// Full matrix, rows of `[re, im]`; rank `N` uses the leading `N × N` block.
    Matrix(Vec<Vec<Pair>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    /// Largest rank evaluated by the sequence checks.
    pub n_max: usize,
    /// Ranks of the determinant grid.
    pub ranks: Vec<usize>,
    /// Chain lengths of the determinant grid.
    pub sites: Vec<usize>,
    /// Random contexts per `(N, n)` cell.
    pub contexts: usize,
    /// Explicit inhomogeneities; chains of length `n` use the first `n`.
    pub inhomogeneities: Option<Vec<Pair>>,
    pub twist: Option<TwistSpec>,
    pub u: Option<Pair>,
    pub v: Option<Pair>,
    /// Replaces every tolerance of every check.
    pub tolerance: Option<f64>,
    /// Per-check tolerance, applied after `tolerance`.
    pub tolerances: BTreeMap<String, f64>,
    /// Checks to run; all of them when absent.
    pub checks: Option<Vec<String>>,
    /// Largest `|λ|` in the determinant grids.
    pub max_weight: usize,
    /// Largest `|λ|` of the basis vectors in the Clifford check.
    pub clifford_weight: usize,
    /// Truncation `Δ` of tau functions.
    pub delta: usize,
    /// Truncation degree of the multivariate generating functions.
    pub genfun_degree: usize,
    /// `α ∈ [lo, hi]²` for the coefficient extraction check.
    pub genfun_box: [i64; 2],
    /// Truncation degree of the vertex operator checks.
    pub vertex_degree: usize,
    pub fig1_box: [i64; 4],
    /// Variables of the Cauchy tau function `c_λ = s_λ(y)`.
    pub cauchy: Vec<Pair>,
    /// Extra tau function, a JSON file of partition to `[re, im]`.
    pub tau_file: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 42,
            n_max: 3,
            ranks: vec![2, 3],
            sites: vec![0, 1, 2],
            contexts: 3,
            inhomogeneities: None,
            twist: None,
            u: None,
            v: None,
            tolerance: None,
            tolerances: BTreeMap::new(),
            checks: None,
            max_weight: 4,
            clifford_weight: 5,
            delta: 5,
            genfun_degree: 5,
            genfun_box: [-2, 4],
            vertex_degree: 6,
            fig1_box: [-3, 5, -3, 5],
            cauchy: vec![[0.7, 0.0], [-0.3, 0.0]],
            tau_file: None,
            output: None,
        }
    }
}

impl Config {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: Config = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(cfg)
    }

    /// Desk-scale caps and internal consistency.
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.n_max == 0 || self.n_max > 4 {
            bail!("n_max must be in 1..=4");
        }
        if self.ranks.iter().any(|&n| n == 0 || n > 4) {
            bail!("ranks must be in 1..=4");
        }
        if self.sites.iter().any(|&n| n > 4) {
            bail!("chain lengths must be at most 4");
        }
        if self.max_weight > 4 {
            bail!("max_weight must be at most 4");
        }
        if self.clifford_weight > 5 {
            bail!("clifford_weight must be at most 5");
        }
        if self.genfun_degree > 6 || self.vertex_degree > 6 {
            bail!("truncation degrees must be at most 6");
        }
        if self.delta > 6 {
            bail!("delta must be at most 6");
        }
        if self.contexts == 0 {
            bail!("contexts must be positive");
        }
        if self.genfun_box[0] > self.genfun_box[1] {
            bail!("genfun_box must be [lo, hi]");
        }
        let b = self.fig1_box;
        if b[0] > b[1] || b[2] > b[3] {
            bail!("fig1_box must be [a1min, a1max, a2min, a2max]");
        }
        if self.genfun_box[1] > self.genfun_degree as i64 {
            bail!("genfun_box reaches past the truncation degree");
        }
        if let Some(tol) = self.tolerance {
            if !(tol >= 0.0) {
                bail!("tolerance must be a nonnegative number");
            }
        }
        if let Some(list) = &self.checks {
            for c in list {
                if !CHECKS.contains(&c.as_str()) {
                    bail!("unknown check {c:?}; known: {}", CHECKS.join(", "));
                }
            }
        }
        for key in self.tolerances.keys() {
            if !CHECKS.contains(&key.as_str()) {
                bail!("tolerance for unknown check {key:?}");
            }
        }
        let needed_sites = self.sites.iter().copied().max().unwrap_or(0);
        if let Some(a) = &self.inhomogeneities {
            if a.len() < needed_sites {
                bail!("{} inhomogeneities given, chains need {needed_sites}", a.len());
            }
        }
        let needed_rank = self.ranks.iter().copied().chain([self.n_max, 2]).max().unwrap_or(0);
        match &self.twist {
            Some(TwistSpec::Diagonal(g)) if g.len() < needed_rank => {
                bail!("twist has {} eigenvalues, ranks need {needed_rank}", g.len())
            }
            Some(TwistSpec::Matrix(rows))
                if (rows.len() < needed_rank || rows.iter().any(|r| r.len() != rows.len())) => {
                    bail!("twist matrix must be square of size at least {needed_rank}");
                }
            _ => {}
        }
        Ok(())
    }

    pub fn selected(&self) -> Vec<&'static str> {
        match &self.checks {
            None => CHECKS.to_vec(),
            Some(list) => CHECKS.iter().copied().filter(|c| list.iter().any(|x| x == c)).collect(),
        }
    }

    /// Tolerance for `check`, given its built-in default.
    pub fn tolerance_for(&self, check: &str, default: f64) -> f64 {
        self.tolerances
            .get(check)
            .copied()
            .or(self.tolerance)
            .unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        Config::default().validate().unwrap();
    }

    #[test]
    fn partial_file_fills_defaults() {
        let cfg: Config = serde_json::from_str(r#"{"seed": 7, "checks": ["fig1"]}"#).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.n_max, 3);
        assert_eq!(cfg.selected(), vec!["fig1"]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(serde_json::from_str::<Config>(r#"{"sede": 7}"#).is_err());
        let cfg = Config {
            checks: Some(vec!["nope".into()]),
            ..Config::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = Config {
            n_max: 9,
            ..Config::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn tolerance_precedence() {
        let mut cfg = Config {
            tolerance: Some(1e-3),
            ..Config::default()
        };
        cfg.tolerances.insert("cbr".into(), 1e-5);
        assert_eq!(cfg.tolerance_for("cbr", 1e-8), 1e-5);
        assert_eq!(cfg.tolerance_for("dual", 1e-8), 1e-3);
        assert_eq!(Config::default().tolerance_for("dual", 1e-8), 1e-8);
    }
}
