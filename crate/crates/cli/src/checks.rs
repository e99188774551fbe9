//! The individual checks. Each one draws its own contexts from named
//! streams and pushes one or more residual reports.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use qtransfer_core::bridge::{
    bilinear_matrix_from_pairs, gen_vacuum_check, vacuum_strings_check, vertex_decomposition_check, Evaluator,
};
use qtransfer_core::fermion::{
    bilinear_pairs, bilinear_residual, bilinear_size, clifford_check, maya_action_crosscheck, BilinearTerm,
    BosonVector, PairKey,
};
use qtransfer_core::genfun::{coefficient_vs_t, shift_product_form, GenKind, GenfunBox};
use qtransfer_core::identities::{
    cbr_det, dual_det, fig1_pattern, newton_residual, newton_scale, straightening_check, transfer_via_dual,
};
use qtransfer_core::matrix::distance;
use qtransfer_core::report::{Expectation, ParamValue, Residual, ResidualReport};
use qtransfer_core::symfun::{fsym_check, schur_poly, vertex_check, vertex_degree};
use qtransfer_core::transfer::{commutator_residual, ChainContext, TransferFamily};
use qtransfer_core::{ChargedPartition, GaussianRational, Matrix, Operator, Partition, Scalar};

use crate::config::{to_c64, Config};
use crate::contexts::{self, ContextRecord};
use crate::seeds::{derive, stream};

type C = Complex64;

/// Residual a negative control has to exceed.
pub const CONTROL_THRESHOLD: f64 = 1e-4;

/// Working state of one check attempt.
pub struct Run<'a> {
    pub cfg: &'a Config,
    pub check: &'static str,
    pub attempt: u32,
    timings: bool,
    clock: Instant,
    pub reports: Vec<ResidualReport>,
    pub contexts: Vec<ContextRecord>,
    pub artifact: Option<Value>,
}

impl<'a> Run<'a> {
    pub fn new(cfg: &'a Config, check: &'static str, attempt: u32, timings: bool) -> Self {
        Self {
            cfg,
            check,
            attempt,
            timings,
            clock: Instant::now(),
            reports: Vec::new(),
            contexts: Vec::new(),
            artifact: None,
        }
    }

    /// Stream name for `base`; a re-seeded attempt gets fresh streams.
    fn label(&self, base: &str) -> String {
        if self.attempt == 0 {
            base.to_string()
        } else {
            format!("{base}/reseed{}", self.attempt)
        }
    }

    fn draw(&mut self, base: &str, rank: usize, sites: usize) -> anyhow::Result<(ChainContext<C>, C)> {
        let label = self.label(base);
        let (ctx, u, rec) = contexts::draw(self.cfg, &label, rank, sites)?;
        self.contexts.push(rec);
        Ok((ctx, u))
    }

    /// Second point `v` for the most recently drawn context.
    fn second_point(&mut self, ctx: &ChainContext<C>) -> anyhow::Result<C> {
        let rec = self.contexts.last_mut().expect("a context was drawn");
        let v = contexts::point(self.cfg, ctx, self.cfg.v, &format!("{}/v", rec.label))?;
        rec.v = Some([v.re, v.im]);
        Ok(v)
    }

    fn tol(&self, default: f64) -> f64 {
        self.cfg.tolerance_for(self.check, default)
    }

    fn push(&mut self, mut report: ResidualReport) {
        if self.timings {
            report.elapsed = Some(self.clock.elapsed());
        }
        self.clock = Instant::now();
        self.reports.push(report);
    }
}

pub fn dispatch(run: &mut Run) -> anyhow::Result<()> {
    match run.check {
        "cbr" => cbr(run),
        "dual" => dual(run),
        "newton" => newton(run),
        "commute" => commute(run),
        "limit" => limit(run),
        "straighten" => straighten(run),
        "fig1" => fig1(run),
        "genfun" => genfun(run),
        "clifford" => clifford(run),
        "vertex" => vertex(run),
        "fsym" => fsym(run),
        "bilinear" => bilinear(run),
        "bilinear-matrix" => bilinear_matrix(run),
        "vertex-decomposition" => vertex_decomposition(run),
        "gen-vacuum" => gen_vacuum(run),
        other => bail!("unknown check {other:?}"),
    }
}

/// Worst residual over many cases, remembering where it occurred.
#[derive(Default)]
struct Worst {
    residual: Residual,
    cases: usize,
    at: Option<String>,
}

impl Worst {
    fn add(&mut self, r: Residual, at: impl FnOnce() -> String) {
        let worse = self.at.is_none()
            || r.relative > self.residual.relative
            || (r.relative.is_nan() && !self.residual.relative.is_nan());
        if worse {
            self.at = Some(at());
        }
        self.residual.absorb(r);
        self.cases += 1;
    }

    fn add_report(&mut self, r: &ResidualReport) {
        self.add(Residual::new(r.absolute, r.relative), || describe(&r.parameters));
    }

    fn report(self, name: &str, tolerance: f64) -> ResidualReport {
        let mut out = ResidualReport::new(name, self.residual, tolerance).param("cases", self.cases);
        if let Some(at) = self.at {
            out = out.param("worst", at);
        }
        out
    }
}

fn describe(params: &[(String, ParamValue)]) -> String {
    params
        .iter()
        .map(|(k, v)| {
            let v = match v {
                ParamValue::Int(i) => i.to_string(),
                ParamValue::Real(x) => x.to_string(),
                ParamValue::Complex(re, im) => format!("{re}{im:+}i"),
                ParamValue::Ints(v) => format!("({})", v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")),
                ParamValue::Text(s) => s.clone(),
            };
            format!("{k}={v}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn show(p: &Partition) -> String {
    format!("({})", p.parts().iter().map(usize::to_string).collect::<Vec<_>>().join(","))
}

fn show_alpha(a: &[i64]) -> String {
    format!("({})", a.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
}

fn dist<S: Scalar>(a: &Operator<S>, b: &Operator<S>) -> Residual {
    let (abs, rel) = distance(a, b);
    Residual::new(abs, rel)
}

/// Same report under another tolerance.
fn retolerate(r: ResidualReport, tolerance: f64) -> ResidualReport {
    let mut out = ResidualReport::with_expectation(r.name, Residual::new(r.absolute, r.relative), tolerance, r.expect);
    out.parameters = r.parameters;
    out
}

fn control(name: &str, r: Residual) -> ResidualReport {
    ResidualReport::with_expectation(name, r, CONTROL_THRESHOLD, Expectation::Exceed)
}

fn lambda_vec(p: &Partition) -> Vec<i64> {
    p.to_vector(p.len())
}

/// `(N, n, context index)` for the determinant grid.
fn grid_cells(cfg: &Config) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for &nn in &cfg.ranks {
        for &n in &cfg.sites {
            for idx in 0..cfg.contexts {
                out.push((nn, n, idx));
            }
        }
    }
    out
}

fn cbr(run: &mut Run) -> anyhow::Result<()> {
    let tol = run.tol(1e-8);
    for (nn, n, idx) in grid_cells(run.cfg) {
        let (ctx, u) = run.draw(&format!("grid/{nn}/{n}/{idx}"), nn, n)?;
        let mut f = TransferFamily::new(ctx, u);
        let mut w = Worst::default();
        for lam in Partition::all_up_to(run.cfg.max_weight, nn) {
            let t = cbr_det(&mut f, &lambda_vec(&lam), 0)?;
            let y = f.young(&lam, 0)?;
            w.add(dist(&t, &y), || show(&lam));
        }
        run.push(w.report("cbr", tol).param("N", nn).param("n", n).param("context", idx));
    }
    Ok(())
}

fn dual(run: &mut Run) -> anyhow::Result<()> {
    let tol = run.tol(1e-8);
    for (nn, n, idx) in grid_cells(run.cfg) {
        let (ctx, u) = run.draw(&format!("grid/{nn}/{n}/{idx}"), nn, n)?;
        let mut f = TransferFamily::new(ctx, u);
        let mut w = Worst::default();
        for lam in Partition::all_up_to(run.cfg.max_weight, nn) {
            let t = cbr_det(&mut f, &lambda_vec(&lam), 0)?;
            let d = dual_det(&mut f, &lambda_vec(&lam.conjugate()), 0)?;
            w.add(dist(&d, &t), || show(&lam));
        }
        for k in 1..=nn {
            let e = f.e_direct(k as i64, 0)?;
            let t = cbr_det(&mut f, &vec![1; k], 0)?;
            w.add(dist(&e, &t), || format!("e_{k}"));
        }
        run.push(w.report("dual", tol).param("N", nn).param("n", n).param("context", idx));
    }
    let tol = run.tol(0.0);
    for n in 0..=2 {
        let label = run.label(&format!("dual-exact/{n}"));
        let seed = derive(run.cfg.seed, &label);
        let ctx = ChainContext::random_exact(2, n, seed)?;
        let u = ctx.exact_point(derive(run.cfg.seed, &format!("{label}/u")));
        run.contexts.push(contexts::record(&label, seed, &ctx, &u));
        let mut f = TransferFamily::new(ctx, u);
        let mut w = Worst::default();
        for lam in Partition::all_up_to(3, 2) {
            let t = cbr_det(&mut f, &lambda_vec(&lam), 0)?;
            let d = dual_det(&mut f, &lambda_vec(&lam.conjugate()), 0)?;
            let y = f.young(&lam, 0)?;
            w.add(exact_gap(&d, &t).max(exact_gap(&t, &y)), || show(&lam));
        }
        for k in 1..=2 {
            let e = f.e_direct(k, 0)?;
            let t = cbr_det(&mut f, &vec![1; k as usize], 0)?;
            w.add(exact_gap(&e, &t), || format!("e_{k}"));
        }
        run.push(w.report("dual-exact", tol).param("N", 2usize).param("n", n));
    }
    Ok(())
}

/// Largest entry of `a − b`; zero exactly when the operators agree.
fn exact_gap(a: &Operator<GaussianRational>, b: &Operator<GaussianRational>) -> Residual {
    let gap = a.sub(b).max_abs();
    Residual::new(gap, gap)
}

fn newton(run: &mut Run) -> anyhow::Result<()> {
    let tol = run.tol(1e-8);
    for (nn, n, idx) in grid_cells(run.cfg) {
        let (ctx, u) = run.draw(&format!("grid/{nn}/{n}/{idx}"), nn, n)?;
        let mut f = TransferFamily::new(ctx, u);
        let mut w = Worst::default();
        let mut empty = 0.0f64;
        for a in -3..=5 {
            for b in -3..=5 {
                let res = newton_residual(&mut f, a, b)?.frobenius_norm();
                if a <= b {
                    let scale = newton_scale(&mut f, a, b)?;
                    let rel = if scale == 0.0 { res } else { res / scale };
                    w.add(Residual::new(res, rel), || format!("a={a} b={b}"));
                } else {
                    empty = empty.max(res);
                }
            }
        }
        run.push(w.report("newton", tol).param("N", nn).param("n", n).param("context", idx));
        run.push(
            ResidualReport::new("newton-empty", Residual::new(empty, empty), 0.0)
                .param("N", nn)
                .param("n", n)
                .param("context", idx),
        );
    }
    Ok(())
}

fn commute(run: &mut Run) -> anyhow::Result<()> {
    let tol = run.tol(1e-8);
    let mut rng = stream(run.cfg.seed, &run.label("commute"));
    let mut sites: Vec<usize> = run.cfg.sites.iter().copied().filter(|&n| n > 0).collect();
    if sites.is_empty() {
        sites.push(1);
    }
    for i in 0..20 {
        let nn = run.cfg.ranks[rng.random_range(0..run.cfg.ranks.len())];
        let n = sites[rng.random_range(0..sites.len())];
        let labels = Partition::all_up_to(run.cfg.max_weight, nn);
        let lam = labels[rng.random_range(0..labels.len())].clone();
        let mu = labels[rng.random_range(0..labels.len())].clone();
        let (ctx, u) = run.draw(&format!("commute/{i}"), nn, n)?;
        let v = run.second_point(&ctx)?;
        let a = transfer_via_dual(&mut TransferFamily::new(ctx.clone(), u), &lam, 0)?;
        let b = transfer_via_dual(&mut TransferFamily::new(ctx, v), &mu, 0)?;
        let (abs, rel) = commutator_residual(&a, &b);
        run.push(
            ResidualReport::new("commute", Residual::new(abs, rel), tol)
                .param("draw", i as usize)
                .param("N", nn)
                .param("n", n)
                .param("lambda", lambda_vec(&lam))
                .param("mu", lambda_vec(&mu)),
        );
    }
    Ok(())
}

/// `s_λ(g)` through `p_j = tr(g^j) / j`, valid for any twist matrix.
fn character(lam: &Partition, g: &Matrix<C>) -> anyhow::Result<C> {
    let w = lam.weight();
    let mut pk = Vec::with_capacity(w);
    let mut power = g.clone();
    for j in 1..=w {
        pk.push(power.trace() / j as f64);
        power = power.matmul(g);
    }
    Ok(schur_poly(lam, w)?.eval_power_sums(&pk))
}

fn limit(run: &mut Run) -> anyhow::Result<()> {
    let tol = run.tol(1e-10);
    for nn in run.cfg.ranks.clone() {
        let (ctx, u) = run.draw(&format!("limit/{nn}"), nn, 0)?;
        let g = ctx.twist().clone();
        let mut f = TransferFamily::new(ctx, u);
        let mut w = Worst::default();
        for lam in Partition::all_up_to(run.cfg.max_weight, nn) {
            let t = transfer_via_dual(&mut f, &lam, 0)?;
            let chi = Matrix::from_diagonal(&[character(&lam, &g)?]);
            w.add(dist(&t, &chi), || show(&lam));
        }
        run.push(w.report("limit-character", tol).param("N", nn));
    }
    // residual ~ 1/|u|: a tenfold |u| should shrink it about tenfold
    let tol = run.tol(std::f64::consts::LOG10_2);
    for nn in run.cfg.ranks.clone() {
        let (ctx, u) = run.draw(&format!("limit-growth/{nn}"), nn, 2)?;
        let near = u / u.norm() * 30.0;
        let far = near * 10.0;
        let rec = run.contexts.last_mut().expect("drawn");
        rec.u = [near.re, near.im];
        rec.v = Some([far.re, far.im]);
        let g = ctx.twist().clone();
        for parts in [vec![1], vec![2], vec![1, 1], vec![2, 1]] {
            let lam = Partition::new(parts)?;
            if lam.len() > nn {
                continue;
            }
            let chi = character(&lam, &g)?;
            let id = Matrix::<C>::identity(ctx.quantum_dim()).scale(&chi);
            let r1 = transfer_via_dual(&mut TransferFamily::new(ctx.clone(), near), &lam, 0)?.sub(&id).frobenius_norm();
            let r2 = transfer_via_dual(&mut TransferFamily::new(ctx.clone(), far), &lam, 0)?.sub(&id).frobenius_norm();
            let ratio = r1 / r2;
            let off = (ratio.log10() - 1.0).abs();
            run.push(
                ResidualReport::new("limit-growth", Residual::new(off, off), tol)
                    .param("N", nn)
                    .param("n", 2usize)
                    .param("lambda", lambda_vec(&lam))
                    .param("ratio", ratio),
            );
        }
    }
    Ok(())
}

fn straighten(run: &mut Run) -> anyhow::Result<()> {
    let tol = run.tol(1e-10);
    for nn in run.cfg.ranks.clone() {
        let (ctx, u) = run.draw(&format!("straighten/{nn}"), nn, 1)?;
        let mut f = TransferFamily::new(ctx, u);
        let mut w = Worst::default();
        let mut labels: Vec<Vec<i64>> = Vec::new();
        for a in -2..=4 {
            for b in -2..=4 {
                labels.push(vec![a, b]);
            }
        }
        for a in -1..=3 {
            for b in -1..=3 {
                for c in -1..=3 {
                    labels.push(vec![a, b, c]);
                }
            }
        }
        for alpha in labels {
            let r = straightening_check(&mut f, &alpha, 0, tol)?;
            w.add(Residual::new(r.absolute, r.relative), || show_alpha(&alpha));
        }
        run.push(w.report("straighten", tol).param("N", nn));
    }
    Ok(())
}

fn fig1(run: &mut Run) -> anyhow::Result<()> {
    let tol = run.tol(0.0);
    let [x0, x1, y0, y1] = run.cfg.fig1_box;
    let mut grids = serde_json::Map::new();
    for nn in run.cfg.ranks.clone() {
        let (ctx, u) = run.draw(&format!("fig1/{nn}"), nn, 1)?;
        let mut f = TransferFamily::new(ctx, u);
        let grid = fig1_pattern(&mut f, x0..=x1, y0..=y1)?;
        let bad = grid.mismatches() as f64;
        run.push(
            ResidualReport::new("fig1", Residual::new(bad, bad), tol)
                .param("N", nn)
                .param("box", run.cfg.fig1_box.to_vec()),
        );
        grids.insert(format!("N={nn}"), grid_json(&grid));
    }
    run.artifact = Some(Value::Object(grids));
    Ok(())
}

pub fn grid_json(grid: &qtransfer_core::identities::Fig1Grid) -> Value {
    json!({
        "a1": [grid.a1.start(), grid.a1.end()],
        "a2": [grid.a2.start(), grid.a2.end()],
        "threshold": grid.threshold,
        "computed": grid.computed,
        "predicted": grid.predicted,
        "mismatches": grid.mismatches(),
        "render": grid.render(),
    })
}

fn genfun(run: &mut Run) -> anyhow::Result<()> {
    let tol = run.tol(1e-8);
    let product_tol = run.tol(1e-10);
    let d = run.cfg.genfun_degree;
    let [lo, hi] = run.cfg.genfun_box;
    for nn in run.cfg.ranks.clone() {
        let (ctx, u) = run.draw(&format!("genfun/{nn}"), nn, 1)?;
        let mut f = TransferFamily::new(ctx, u);
        let gen = GenfunBox::new(&mut f, 2, d)?;
        let mut w = Worst::default();
        for a in lo..=hi {
            for b in lo..=hi {
                w.add_report(&coefficient_vs_t(&mut f, &gen, &[a, b], tol)?);
            }
        }
        run.push(w.report("genfun", tol).param("N", nn).param("D", d).param("box", vec![lo, hi]));
        for (kind, series, side) in [(GenKind::H, &gen.h, "H"), (GenKind::E, &gen.e, "E")] {
            let product = shift_product_form(&mut f, kind, 2, d)?;
            run.push(
                ResidualReport::new("genfun-product", product.distance(series), product_tol)
                    .param("N", nn)
                    .param("side", side)
                    .param("l", 2usize)
                    .param("D", d),
            );
        }
    }
    Ok(())
}

fn clifford(run: &mut Run) -> anyhow::Result<()> {
    let tol = run.tol(0.0);
    let weight = run.cfg.clifford_weight;
    run.push(retolerate(clifford_check(-4..=4, weight, 2), tol));
    let mut w = Worst::default();
    for m in -2..=2 {
        for lam in Partition::all_up_to(weight, weight) {
            let v = BosonVector::<BigRational>::basis(ChargedPartition::new(m, lam.clone()));
            for k in -4..=4 {
                w.add_report(&maya_action_crosscheck(k, &v).param("m", m).param("lambda", lambda_vec(&lam)));
            }
        }
    }
    run.push(w.report("maya", tol).param("max_weight", weight));
    Ok(())
}

fn vertex(run: &mut Run) -> anyhow::Result<()> {
    let tol = run.tol(0.0);
    for plus in [true, false] {
        for m in -1..=1 {
            let mut w = Worst::default();
            let mut top = 0;
            for lam in Partition::all_up_to(4, 4) {
                let needed = (-5..=5)
                    .map(|k| vertex_degree(plus, m, &lam, k))
                    .chain([lam.weight() as i64])
                    .max()
                    .unwrap_or(0) as usize;
                let d = run.cfg.vertex_degree.max(needed);
                top = top.max(d);
                w.add_report(&vertex_check(plus, m, &lam, -5..=5, d)?);
            }
            let name = if plus { "vertex-plus" } else { "vertex-minus" };
            run.push(w.report(name, tol).param("m", m).param("D", run.cfg.vertex_degree).param("D_max", top));
        }
    }
    Ok(())
}

fn fsym(run: &mut Run) -> anyhow::Result<()> {
    let tol = run.tol(0.0);
    for l in 1..=2 {
        for d in 1..=run.cfg.vertex_degree {
            run.push(retolerate(fsym_check(l, d)?, tol));
        }
    }
    Ok(())
}

fn cp(m: i64, p: Partition) -> ChargedPartition {
    ChargedPartition::new(m, p)
}

/// `Σ_{|λ| ≤ Δ} s_λ(y) z^0 s_λ`.
fn cauchy<S: Scalar>(y: &[S], delta: usize) -> anyhow::Result<BosonVector<S>> {
    let mut terms = Vec::new();
    for lam in Partition::all_up_to(delta, delta) {
        let c = schur_poly(&lam, delta)?.eval_at(y);
        terms.push((cp(0, lam), c));
    }
    Ok(BosonVector::from_terms(terms))
}

/// The Cauchy variables as exact rationals, when they are all real.
fn rational_cauchy(cfg: &Config) -> Option<Vec<BigRational>> {
    cfg.cauchy
        .iter()
        .map(|p| if p[1] == 0.0 { BigRational::from_float(p[0]) } else { None })
        .collect()
}

/// Documented negative control: `c_(1)` moved by `0.1`.
fn perturbed<S: Scalar>(tau: &BosonVector<S>, bump: S) -> BosonVector<S> {
    let mut out = tau.clone();
    out.add_term(cp(0, Partition::row(1)), bump);
    out
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TauFile {
    /// `{"2,1": [re, im], "": [1, 0]}`.
    Map(BTreeMap<String, [f64; 2]>),
    /// `[[[2, 1], [re, im]], ...]`.
    List(Vec<(Vec<usize>, [f64; 2])>),
}

/// A charge-zero tau function from a JSON file of partition to `[re, im]`.
pub fn load_tau(path: &Path) -> anyhow::Result<BosonVector<C>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: TauFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let entries: Vec<(Vec<usize>, [f64; 2])> = match file {
        TauFile::List(v) => v,
        TauFile::Map(m) => m
            .into_iter()
            .map(|(k, v)| {
                let parts = k
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<usize>().with_context(|| format!("bad partition key {k:?}")))
                    .collect::<anyhow::Result<Vec<_>>>()?;
                Ok((parts, v))
            })
            .collect::<anyhow::Result<_>>()?,
    };
    let mut terms = Vec::with_capacity(entries.len());
    for (parts, c) in entries {
        terms.push((cp(0, Partition::new(parts)?), to_c64(&c)));
    }
    Ok(BosonVector::from_terms(terms))
}

fn bilinear(run: &mut Run) -> anyhow::Result<()> {
    let cfg = run.cfg;
    let exact_tol = run.tol(0.0);
    let mut nonempty = 0usize;
    let mut cases = 0usize;
    for m in -1..=1 {
        for lam in Partition::all_up_to(4, 4) {
            let tau = BosonVector::<BigRational>::basis(cp(m, lam));
            cases += 1;
            if !bilinear_residual(&tau, None)?.is_empty() {
                nonempty += 1;
            }
        }
    }
    let bad = nonempty as f64;
    run.push(ResidualReport::new("bilinear-single", Residual::new(bad, bad), exact_tol).param("labels", cases));

    let tol = run.tol(1e-9);
    let y: Vec<C> = cfg.cauchy.iter().map(to_c64).collect();
    let tau = cauchy(&y, cfg.delta)?;
    let pairs = bilinear_pairs(&tau, Some(cfg.delta))?;
    run.push(
        ResidualReport::new("bilinear-cauchy", bilinear_size(&pairs), tol)
            .param("delta", cfg.delta)
            .param("pairs", pairs.len()),
    );
    if let Some(yq) = rational_cauchy(cfg) {
        let tau = cauchy(&yq, cfg.delta)?;
        let left = bilinear_residual(&tau, Some(cfg.delta))?.len() as f64;
        run.push(ResidualReport::new("bilinear-cauchy-exact", Residual::new(left, left), exact_tol).param("delta", cfg.delta));
    }
    let bad = perturbed(&tau, C::new(0.1, 0.0));
    let pairs = bilinear_pairs(&bad, Some(cfg.delta))?;
    run.push(control("bilinear-perturbed", bilinear_size(&pairs)).param("delta", cfg.delta));
    if let Some(path) = &cfg.tau_file {
        let tau = load_tau(path)?;
        run.push(
            ResidualReport::new("bilinear-file", bilinear_size(&bilinear_pairs(&tau, None)?), tol)
                .param("file", path.display().to_string()),
        );
    }
    Ok(())
}

/// One family per rank `1..=N`, each on the leading block of the twist.
pub fn evaluator(ctx: &ChainContext<C>, u: C) -> anyhow::Result<Evaluator<C>> {
    if ctx.eigenvalues().is_some() {
        return Ok(Evaluator::principal(ctx, u)?);
    }
    let g = ctx.twist();
    let mut families = Vec::with_capacity(ctx.rank());
    for n in 1..=ctx.rank() {
        let block = Matrix::from_fn(n, n, |i, j| g[(i, j)]);
        families.push(TransferFamily::new(ChainContext::new(block, ctx.inhomogeneities().to_vec())?, u));
    }
    Ok(Evaluator::new(families)?)
}

fn to_complex_pairs(pairs: BTreeMap<PairKey, BilinearTerm<BigRational>>) -> BTreeMap<PairKey, BilinearTerm<C>> {
    pairs
        .into_iter()
        .map(|(k, t)| {
            (k, BilinearTerm {
                coefficient: t.coefficient.to_c64(),
                magnitude: t.magnitude,
            })
        })
        .collect()
}

fn bilinear_matrix(run: &mut Run) -> anyhow::Result<()> {
    let cfg = run.cfg;
    let tol = run.tol(1e-8);
    let (ctx, u) = run.draw("bilinear-matrix", cfg.n_max.max(2), 1)?;
    let v = run.second_point(&ctx)?;
    let mut ev_u = evaluator(&ctx, u)?;
    let mut ev_v = ev_u.at(v);
    // rational τ gets exact pair coefficients
    let (pairs, perturbed_pairs, exact) = match rational_cauchy(cfg) {
        Some(y) => {
            let tau = cauchy(&y, cfg.delta)?;
            let bump = BigRational::from_float(0.1).expect("finite");
            (
                to_complex_pairs(bilinear_pairs(&tau, Some(cfg.delta))?),
                to_complex_pairs(bilinear_pairs(&perturbed(&tau, bump), Some(cfg.delta))?),
                true,
            )
        }
        None => {
            let y: Vec<C> = cfg.cauchy.iter().map(to_c64).collect();
            let tau = cauchy(&y, cfg.delta)?;
            (
                bilinear_pairs(&tau, Some(cfg.delta))?,
                bilinear_pairs(&perturbed(&tau, C::new(0.1, 0.0)), Some(cfg.delta))?,
                false,
            )
        }
    };
    let exact = if exact { "rational" } else { "complex" };
    let r = bilinear_matrix_from_pairs(&pairs, &mut ev_u, &mut ev_v, tol)?;
    run.push(r.param("delta", cfg.delta).param("coefficients", exact));
    let r = bilinear_matrix_from_pairs(&perturbed_pairs, &mut ev_u, &mut ev_v, tol)?;
    let mut c = control("bilinear-matrix-perturbed", Residual::new(r.absolute, r.relative));
    c.parameters = r.parameters;
    run.push(c.param("delta", cfg.delta).param("coefficients", exact));
    Ok(())
}

fn vertex_decomposition(run: &mut Run) -> anyhow::Result<()> {
    let tol = run.tol(1e-10);
    let d = run.cfg.genfun_degree.min(5);
    let (ctx, u) = run.draw("vertex-decomposition", 2, 1)?;
    let mut f = TransferFamily::new(ctx, u);
    for kind in [GenKind::H, GenKind::E] {
        for l in 0..=2 {
            run.push(vertex_decomposition_check(&mut f, kind, l, d, tol)?);
        }
    }
    Ok(())
}

fn gen_vacuum(run: &mut Run) -> anyhow::Result<()> {
    let tol = run.tol(1e-10);
    let d = run.cfg.genfun_degree;
    let (ctx, u) = run.draw("gen-vacuum", run.cfg.n_max, 1)?;
    let mut ev = evaluator(&ctx, u)?;
    for plus in [true, false] {
        for l in 1..=2 {
            run.push(gen_vacuum_check(&mut ev, plus, l, d, tol)?);
        }
    }
    let mut w = Worst::default();
    for lam in Partition::all_up_to(4, 4) {
        w.add_report(&vacuum_strings_check(&lam, &mut ev, tol)?);
    }
    run.push(w.report("vacuum-strings", tol));
    Ok(())
}
