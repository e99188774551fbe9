use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use serde_json::json;

use qtransfer::checks::grid_json;
use qtransfer::contexts;
use qtransfer::{run, Config, Options};
use qtransfer_core::identities::{fig1_pattern, transfer_via_dual};
use qtransfer_core::transfer::TransferFamily;
use qtransfer_core::Partition;

#[derive(Parser)]
#[command(name = "qtransfer", version, about = "Verify transfer-operator identities and write JSON reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the selected checks and write a report.
    Verify {
        /// JSON configuration; defaults apply to missing fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated subset of checks.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<String>>,
        #[arg(long)]
        seed: Option<u64>,
        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Tolerance for every check, overriding the config.
        #[arg(long, env = "QTRANSFER_TOL")]
        tolerance: Option<f64>,
        /// Record wall times (the report is then no longer reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Nonzero pattern of T_(a1,a2) over a box.
    Pattern {
        /// a1min,a1max,a2min,a2max
        #[arg(long = "box", value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-3, 5, -3, 5])]
        bounds: Vec<i64>,
        #[arg(long, default_value_t = 2)]
        n_dim: usize,
        #[arg(long, default_value_t = 1)]
        sites: usize,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Print the grid as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Dump T_λ(u) as a flat row-major list of [re, im] pairs.
    Operator {
        /// Parts of λ, comma-separated; empty for the trivial label.
        #[arg(long, default_value = "1")]
        lambda: String,
        #[arg(long, default_value_t = 2)]
        n_dim: usize,
        #[arg(long, default_value_t = 1)]
        sites: usize,
        /// Integer shift of the spectral point.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        shift: i64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(config: &Option<PathBuf>, seed: Option<u64>) -> anyhow::Result<Config> {
    let mut cfg = match config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn check_rank(n_dim: usize, sites: usize) -> anyhow::Result<()> {
    if n_dim == 0 || n_dim > 4 || sites > 4 {
        bail!("rank must be in 1..=4 and sites at most 4");
    }
    Ok(())
}

/// Exit code for a finished run: 0 all pass, 1 any failure.
fn verify(cfg: Config, out: Option<PathBuf>, timings: bool) -> anyhow::Result<u8> {
    let report = run(&cfg, Options { timings });
    for check in &report.checks {
        let status = if check.pass { "PASS" } else { "FAIL" };
        eprintln!("{status} {}", check.name);
    }
    for (check, r) in report.failures() {
        match (r, &check.error) {
            (Some(r), _) => eprintln!(
                "  {}: {} relative {:e} vs tolerance {:e} (expect {})",
                check.name, r.name, r.relative, r.tolerance, r.expect
            ),
            (None, Some(e)) => eprintln!("  {}: error: {e}", check.name),
            (None, None) => eprintln!("  {}: no reports", check.name),
        }
    }
    let json = report.to_json();
    match out.or(cfg.output.clone()) {
        Some(path) => std::fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{json}"),
    }
    Ok(if report.pass { 0 } else { 1 })
}

fn pattern(cfg: &Config, bounds: &[i64], n_dim: usize, sites: usize, as_json: bool) -> anyhow::Result<()> {
    check_rank(n_dim, sites)?;
    let [x0, x1, y0, y1] = <[i64; 4]>::try_from(bounds).map_err(|_| anyhow::anyhow!("--box takes four integers"))?;
    if x0 > x1 || y0 > y1 {
        bail!("--box must be a1min,a1max,a2min,a2max");
    }
    let (ctx, u, rec) = contexts::draw(cfg, &format!("pattern/{n_dim}/{sites}"), n_dim, sites)?;
    let grid = fig1_pattern(&mut TransferFamily::new(ctx, u), x0..=x1, y0..=y1)?;
    if as_json {
        let out = json!({"context": rec, "grid": grid_json(&grid)});
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        print!("{}", grid.render());
        if grid.mismatches() > 0 {
            eprintln!("{} entries differ from the straightening prediction", grid.mismatches());
        }
    }
    Ok(())
}

fn operator(cfg: &Config, lambda: &str, n_dim: usize, sites: usize, shift: i64) -> anyhow::Result<()> {
    check_rank(n_dim, sites)?;
    let parts = lambda
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().with_context(|| format!("bad part {s:?}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let lam = Partition::new(parts)?;
    let (ctx, u, rec) = contexts::draw(cfg, &format!("operator/{n_dim}/{sites}"), n_dim, sites)?;
    let t = transfer_via_dual(&mut TransferFamily::new(ctx, u), &lam, shift)?;
    let entries: Vec<[f64; 2]> = t.as_slice().iter().map(|z| [z.re, z.im]).collect();
    let out = json!({
        "lambda": lam.parts(),
        "shift": shift,
        "dim": t.rows(),
        "context": rec,
        "entries": entries,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify {
            config,
            only,
            seed,
            out,
            tolerance,
            timings,
        } => load(&config, seed).and_then(|mut cfg| {
            if let Some(only) = only {
                cfg.checks = Some(only);
            }
            if tolerance.is_some() {
                cfg.tolerance = tolerance;
            }
            cfg.validate()?;
            verify(cfg, out, timings)
        }),
        Command::Pattern {
            bounds,
            n_dim,
            sites,
            config,
            seed,
            json,
        } => load(&config, seed)
            .and_then(|cfg| pattern(&cfg, &bounds, n_dim, sites, json))
            .map(|()| 0),
        Command::Operator {
            lambda,
            n_dim,
            sites,
            shift,
            config,
            seed,
        } => load(&config, seed)
            .and_then(|cfg| operator(&cfg, &lambda, n_dim, sites, shift))
            .map(|()| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
