//! Command implementations. Every parameter is read from the merged
//! [`Config`], so a run is fully described by its config and can be replayed
//! from a JSON report.

use std::fs;

use serde_json::{json, Map, Value};

use voltail::carrlee::{
    recover_clock_laplace, replication_weights, subexponential_feasibility, EigenContract, NumericPayoff,
    TerminalLaw,
};
use voltail::cev::{
    cev_absorption_closed_form, cev_absorption_prob, cev_log_density, cev_survival_mass, cev_tail_asymptote,
    cev_wing_asymptote, cev_wing_psi_composed, locvol_wing_asymptote, CevParams,
};
use voltail::energy::{
    energy_curve, ns_bounds_check, solve_euler_lagrange, CurveOptions, EnergyProblem, NsBounds,
};
use voltail::expr::{Expression, Vars};
use voltail::geodesic::{
    doss_sandwich_log_tail, geodesic_distance, inverse_geodesic, norm_sf, DossBounds,
};
use voltail::montecarlo::{
    compose_time_change, mean_estimate, simulate_cev, simulate_cir_and_integral, simulate_log_stock, tail_prob,
    CevScheme, McConfig, McEstimate,
};
use voltail::timechange::{critical_lambda, CirParams};
use voltail::volmodel::{vol_from_pairs, Drift, DriftSpec, VolKind, VolModel};

use crate::config::{parse_grid, Config};
use crate::format::{g12, read_samples, Table};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Io(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

fn cfg_err(m: String) -> CliError {
    CliError::Config(m)
}

fn num_err(e: voltail::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

/// Parameter errors raised while building inputs count as config errors.
fn param_err(e: voltail::Error) -> CliError {
    CliError::Config(e.to_string())
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub table: Option<Table>,
    /// Single-column sample file: header and values.
    pub samples: Option<(String, Vec<f64>)>,
    pub outputs: Map<String, Value>,
    pub tolerances: Map<String, Value>,
    pub notes: Vec<String>,
    /// Set when output was produced but some part of the run failed.
    pub failure: Option<String>,
}

impl Outcome {
    fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.outputs.insert(key.to_string(), v.into());
    }

    fn num(&mut self, key: &str, v: f64) {
        self.put(key, g12(v));
    }

    fn tol(&mut self, key: &str, v: f64) {
        self.tolerances.insert(key.to_string(), Value::from(g12(v)));
    }

    fn finish_table(&mut self, t: Table) {
        self.put("columns", t.header.clone());
        self.put("rows", t.rows.clone());
        self.table = Some(t);
    }
}

pub fn run(command: &str, cfg: &Config) -> Result<Outcome, CliError> {
    match command {
        "geodesic" => cmd_geodesic(cfg),
        "energy" => cmd_energy(cfg, false),
        "fig2" => cmd_energy(cfg, true),
        "cev-tail" => cmd_cev_tail(cfg),
        "wing" => cmd_wing(cfg),
        "critical-lambda" => cmd_critical_lambda(cfg),
        "carrlee" => cmd_carrlee(cfg),
        "replicate" => cmd_replicate(cfg),
        "mc-log-stock" => cmd_mc_log_stock(cfg),
        "mc-cev" => cmd_mc_cev(cfg),
        "mc-cir" => cmd_mc_cir(cfg),
        "mc-compose" => cmd_mc_compose(cfg),
        "doss-check" => cmd_doss_check(cfg),
        other => Err(CliError::Config(format!("unknown command '{other}'"))),
    }
}

/// Seed recorded in reports, if the command uses one.
pub fn seed_of(command: &str, cfg: &Config) -> Option<u64> {
    if command.starts_with("mc-") || command == "doss-check" {
        cfg.value::<u64>("mc", "seed").ok().flatten().or(Some(DEFAULT_SEED))
    } else {
        None
    }
}

pub const DEFAULT_SEED: u64 = 20_240_601;

fn model(cfg: &Config) -> Result<VolModel<f64>, CliError> {
    vol_from_pairs(cfg.section("vol")).map_err(cfg_err)
}

fn drift(cfg: &Config) -> Result<DriftSpec<f64>, CliError> {
    match cfg.get("drift", "kind").unwrap_or("driftless") {
        "driftless" | "log-stock" => Ok(DriftSpec::DriftlessLogStock),
        "zero" => Ok(DriftSpec::zero()),
        "constant" => Ok(DriftSpec::Explicit(Drift::Constant(
            cfg.require("drift", "mu").map_err(cfg_err)?,
        ))),
        "expr" => {
            let src: String = cfg.require("drift", "expr").map_err(cfg_err)?;
            let e = Expression::parse(&src).map_err(|e| cfg_err(format!("[drift] expr: {e}")))?;
            Ok(DriftSpec::Explicit(Drift::Expression(e)))
        }
        other => Err(cfg_err(format!("[drift] unknown kind '{other}'"))),
    }
}

fn grid(cfg: &Config, section: &str, key: &str, default: Option<&str>) -> Result<Vec<f64>, CliError> {
    let spec = match cfg.get(section, key).or(default) {
        Some(s) => s.to_string(),
        None => return Err(cfg_err(format!("[{section}] {key} is required"))),
    };
    parse_grid(&spec).map_err(|e| cfg_err(format!("[{section}] {key}: {e}")))
}

fn cev_params(cfg: &Config) -> Result<CevParams<f64>, CliError> {
    let get = |k: &str, d: f64| cfg.value_or("cev", k, d).map_err(cfg_err);
    CevParams::new(get("delta", 0.2)?, get("beta", -0.5)?, get("x0", 1.0)?, get("T", 1.0)?).map_err(param_err)
}

fn cir_params(cfg: &Config) -> Result<(CirParams<f64>, f64), CliError> {
    let get = |k: &str, d: f64| cfg.value_or("cir", k, d).map_err(cfg_err);
    let p = CirParams::new(get("kappa", 2.0)?, get("theta", 0.04)?, get("sigma_v", 0.5)?, get("v0", 0.04)?)
        .map_err(param_err)?;
    let t = get("T", 1.0)?;
    if !(t > 0.0) {
        return Err(cfg_err("[cir] T must be positive".into()));
    }
    Ok((p, t))
}

fn mc_config(cfg: &Config, default_paths: usize, default_steps: usize) -> Result<McConfig, CliError> {
    let paths = cfg.value_or("mc", "paths", default_paths).map_err(cfg_err)?;
    let steps = cfg.value_or("mc", "steps", default_steps).map_err(cfg_err)?;
    let seed = cfg.value_or("mc", "seed", DEFAULT_SEED).map_err(cfg_err)?;
    let scheme = match cfg.get("mc", "scheme").unwrap_or("euler") {
        "euler" => CevScheme::Euler,
        "exact" => CevScheme::Exact,
        other => return Err(cfg_err(format!("[mc] unknown scheme '{other}'"))),
    };
    Ok(McConfig::new(paths, steps, seed).map_err(param_err)?.with_scheme(scheme))
}

fn read_file(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))
}

fn estimate_json(e: &McEstimate) -> Value {
    json!({
        "value": g12(e.value),
        "half_width_95": g12(e.half_width_95),
        "n_effective": e.n_effective,
        "heavy_tail_flag": e.heavy_tail_flag,
    })
}

/// FNV-1a over the sample bits; lets a replay confirm bitwise-identical output.
fn checksum(values: &[f64]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in values {
        for b in v.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

fn cmd_geodesic(cfg: &Config) -> Result<Outcome, CliError> {
    let m = model(cfg)?;
    let y: f64 = cfg.value_or("geodesic", "from", 0.0).map_err(cfg_err)?;
    let mut out = Outcome::default();
    if let Some(d) = cfg.value::<f64>("geodesic", "distance").map_err(cfg_err)? {
        let u = inverse_geodesic(&m, y, d).map_err(num_err)?;
        let mut t = Table::new(&["y", "d", "u"]);
        t.push(vec![g12(y), g12(d), g12(u)]);
        out.finish_table(t);
        return Ok(out);
    }
    let targets = if cfg.get("geodesic", "to_grid").is_some() {
        grid(cfg, "geodesic", "to_grid", None)?
    } else {
        vec![cfg.require::<f64>("geodesic", "to").map_err(cfg_err)?]
    };
    let mut t = Table::new(&["y", "u", "d"]);
    for u in targets {
        let d = geodesic_distance(&m, y, u).map_err(num_err)?;
        t.push(vec![g12(y), g12(u), g12(d)]);
    }
    out.tol("quadrature_abs", 1e-11);
    out.finish_table(t);
    Ok(out)
}

fn cmd_energy(cfg: &Config, fig2: bool) -> Result<Outcome, CliError> {
    let m = model(cfg)?;
    let dr = drift(cfg)?;
    let get = |k: &str, d: f64| cfg.value_or("energy", k, d).map_err(cfg_err);
    let (x, t, u) = (get("x", 0.0)?, get("t", 0.0)?, get("u", 1.0)?);
    let ys = grid(cfg, "energy", "y_grid", if fig2 { Some("-3:3:0.05") } else { None })?;
    let defaults = CurveOptions::default();
    let opts = CurveOptions {
        n_grid: cfg.value_or("energy", "n_grid", defaults.n_grid).map_err(cfg_err)?,
        multistarts: cfg.value_or("energy", "multistarts", defaults.multistarts).map_err(cfg_err)?,
        cross_check: match cfg.get("energy", "cross_check") {
            None => true,
            Some(_) => cfg.flag("energy", "cross_check").map_err(cfg_err)?,
        },
        direct_iterations: cfg
            .value_or("energy", "direct_iterations", defaults.direct_iterations)
            .map_err(cfg_err)?,
    };
    if opts.n_grid < 3 {
        return Err(cfg_err("[energy] n_grid must be at least 3".into()));
    }
    let bounds = NsBounds::from_model(&m, &dr, &[t, u]).map_err(num_err)?;
    let rows = energy_curve(&m, &dr, t, u, x, &ys, &opts);

    let header: &[&str] = if fig2 {
        &["y", "E", "half_d2"]
    } else {
        &["y", "E", "half_d2", "method", "residual"]
    };
    let mut table = Table::new(header);
    let mut failures = Vec::new();
    let mut max_gap: f64 = 0.0;
    let mut ns_outside = Vec::new();
    let mut shooting = 0usize;
    let mut ns_lower = Vec::new();
    let mut ns_upper = Vec::new();
    for r in &rows {
        let mut line = vec![g12(r.y), g12(r.energy), g12(r.half_d2)];
        if !fig2 {
            let method = if r.error.is_some() { "failed" } else { r.method.as_str() };
            line.push(method.to_string());
            line.push(g12(r.residual));
        }
        table.push(line);
        if let Some(e) = &r.error {
            failures.push(format!("y={}: {e}", g12(r.y)));
            continue;
        }
        if r.method.as_str() == "shooting" {
            shooting += 1;
        }
        if let Some(gap) = r.cross_gap() {
            max_gap = max_gap.max(gap);
        }
        let p = EnergyProblem::new(&m, &dr, t, u, x, r.y).map_err(num_err)?;
        let chk = ns_bounds_check(&p, &bounds, r.energy);
        ns_lower.push(g12(chk.lower));
        ns_upper.push(g12(chk.upper));
        if !chk.inside {
            ns_outside.push(g12(r.y));
        }
    }
    let mut out = Outcome::default();
    out.put("n_rows", rows.len());
    out.put("shooting_rows", shooting);
    out.num("max_cross_gap", max_gap);
    out.put("ns_lambda", g12(bounds.lambda_cap));
    out.put("ns_big_lambda", g12(bounds.big_lambda_cap));
    out.put("ns_all_inside", ns_outside.is_empty() && failures.is_empty());
    out.put("ns_outside", ns_outside.clone());
    out.put("ns_lower", ns_lower);
    out.put("ns_upper", ns_upper);
    out.put("failures", failures.clone());
    out.tol("cross_gap_rel", 1e-4);
    out.finish_table(table);
    if opts.cross_check && max_gap > 1e-4 {
        out.notes.push(format!("shooting and direct energies differ by up to {}", g12(max_gap)));
    }
    if !ns_outside.is_empty() {
        out.notes.push(format!("energy outside the Norris-Stroock bounds at y = {}", ns_outside.join(", ")));
    }
    if !failures.is_empty() {
        for f in &failures {
            out.notes.push(format!("solver failure at {f}"));
        }
        out.failure = Some(format!("{} of {} rows failed", failures.len(), rows.len()));
    }
    Ok(out)
}

fn cmd_cev_tail(cfg: &Config) -> Result<Outcome, CliError> {
    let p = cev_params(cfg)?;
    let xs = grid(cfg, "cev-tail", "x_grid", None)?;
    let mut t = Table::new(&["x", "log_density", "asymptote", "ratio"]);
    for x in xs {
        let ld = cev_log_density(&p, x).map_err(num_err)?;
        let a = cev_tail_asymptote(&p, x).map_err(num_err)?;
        t.push(vec![g12(x), g12(ld), g12(a), g12(-ld / a)]);
    }
    let mut out = Outcome::default();
    let absorbed = cev_absorption_prob(&p).map_err(num_err)?;
    let mass = cev_survival_mass(&p).map_err(num_err)?;
    out.num("absorption_prob", absorbed);
    out.num("absorption_closed_form", cev_absorption_closed_form(&p));
    out.num("survival_mass", mass);
    out.num("mass_balance_error", (mass + absorbed - 1.0).abs());
    out.tol("mass_balance", 1e-6);
    out.finish_table(t);
    Ok(out)
}

fn cmd_wing(cfg: &Config) -> Result<Outcome, CliError> {
    let ks = grid(cfg, "wing", "k_grid", None)?;
    if ks.iter().any(|k| !(*k > 0.0)) {
        return Err(cfg_err("[wing] k_grid must be positive".into()));
    }
    let mut out = Outcome::default();
    let mut t = Table::new(&["k", "i2_over_k"]);
    match cfg.get("wing", "kind").unwrap_or("cev") {
        "cev" => {
            let p = cev_params(cfg)?;
            let mut composed = Vec::new();
            for &k in &ks {
                t.push(vec![g12(k), g12(cev_wing_asymptote(&p, k).ratio)]);
                composed.push(g12(cev_wing_psi_composed(&p, k).ratio));
            }
            out.put("psi_composed", composed);
        }
        "locvol" => {
            let m = model(cfg)?;
            let dr = drift(cfg)?;
            let x0: f64 = cfg.value_or("wing", "x0", 0.0).map_err(cfg_err)?;
            let maturity: f64 = cfg.value_or("wing", "T", 1.0).map_err(cfg_err)?;
            let n_grid = cfg.value_or("energy", "n_grid", 1001usize).map_err(cfg_err)?;
            for &k in &ks {
                let p = EnergyProblem::new(&m, &dr, 0.0, maturity, x0, x0 + k).map_err(param_err)?;
                let e = solve_euler_lagrange(&p, n_grid, 6).map_err(num_err)?.energy;
                t.push(vec![g12(k), g12(locvol_wing_asymptote(k, e).ratio)]);
            }
        }
        other => return Err(cfg_err(format!("[wing] unknown kind '{other}'"))),
    }
    out.finish_table(t);
    Ok(out)
}

fn cmd_critical_lambda(cfg: &Config) -> Result<Outcome, CliError> {
    let (p, maturity) = cir_params(cfg)?;
    let cm = critical_lambda(&p, maturity).map_err(num_err)?;
    let slope = (2.0 * cm.lambda_star).sqrt();
    let verdict = subexponential_feasibility(cm.lambda_star);
    let mut t = Table::new(&["lambda_star", "bracket_lo", "bracket_hi", "slope", "feasible"]);
    t.push(vec![
        g12(cm.lambda_star),
        g12(cm.bracket.0),
        g12(cm.bracket.1),
        g12(slope),
        verdict.is_feasible().to_string(),
    ]);
    let mut out = Outcome::default();
    out.num("lambda_star", cm.lambda_star);
    out.num("sqrt_2_lambda_star", slope);
    out.put("bracket", vec![g12(cm.bracket.0), g12(cm.bracket.1)]);
    out.put("feasible", verdict.is_feasible());
    if let voltail::carrlee::Feasibility::Infeasible { note } = &verdict {
        out.put("feasibility_note", note.clone());
    }
    out.tol("bisection_rel_width", 1e-7);
    out.finish_table(t);
    Ok(out)
}

fn cmd_carrlee(cfg: &Config) -> Result<Outcome, CliError> {
    let lambda: f64 = cfg.require("carrlee", "lambda").map_err(cfg_err)?;
    let path: String = cfg.require("carrlee", "samples").map_err(cfg_err)?;
    let samples = read_samples(&read_file(&path)?).map_err(|e| cfg_err(format!("{path}: {e}")))?;
    let (contract, default_s0) = match cfg.get("carrlee", "kind").unwrap_or("brownian") {
        "brownian" => {
            let anchor = cfg.value_or("carrlee", "anchor", 1.0).map_err(cfg_err)?;
            (
                EigenContract::new(lambda, voltail::carrlee::EigenKind::Brownian { anchor }).map_err(param_err)?,
                anchor,
            )
        }
        "cev" => {
            let p = cev_params(cfg)?;
            (EigenContract::cev(lambda, p).map_err(param_err)?, p.x0)
        }
        other => return Err(cfg_err(format!("[carrlee] unknown kind '{other}'"))),
    };
    let s0 = cfg.value_or("carrlee", "s0", default_s0).map_err(cfg_err)?;
    let est = recover_clock_laplace(&contract, s0, TerminalLaw::Samples(&samples)).map_err(num_err)?;
    let mut t = Table::new(&["estimate", "half_width_95", "n", "heavy_tail_flag"]);
    t.push(vec![
        g12(est.value),
        g12(est.half_width_95),
        est.n_effective.to_string(),
        est.heavy_tail_flag.to_string(),
    ]);
    let mut out = Outcome::default();
    if est.heavy_tail_flag {
        out.notes.push("heavy-tail flag set: lambda may exceed the clock's critical moment".into());
    }
    out.finish_table(t);
    Ok(out)
}

fn cmd_replicate(cfg: &Config) -> Result<Outcome, CliError> {
    let src: String = cfg.require("replicate", "payoff").map_err(cfg_err)?;
    let e = Expression::parse(&src).map_err(|e| cfg_err(format!("[replicate] payoff: {e}")))?;
    let f = cfg.require::<f64>("replicate", "forward").map_err(cfg_err)?;
    let strikes = grid(cfg, "replicate", "grid", None)?;
    let tol = cfg.value_or("replicate", "tolerance", 1e-6).map_err(cfg_err)?;
    let payoff = NumericPayoff {
        f: move |s: f64| e.eval(Vars { x: s, t: 0.0, s }),
    };
    let w = replication_weights(&payoff, f, &strikes).map_err(param_err)?;
    let mut t = Table::new(&["kind", "strike", "weight"]);
    t.push(vec!["cash".into(), g12(f), g12(w.cash)]);
    t.push(vec!["forward".into(), g12(f), g12(w.forward)]);
    for (k, x) in w.put_strikes.iter().zip(&w.put_weights) {
        t.push(vec!["put".into(), g12(*k), g12(*x)]);
    }
    for (k, x) in w.call_strikes.iter().zip(&w.call_weights) {
        t.push(vec!["call".into(), g12(*k), g12(*x)]);
    }
    let mut out = Outcome::default();
    let interior: Vec<f64> = strikes[1..strikes.len() - 1].to_vec();
    let err = w.max_error(&payoff, &interior);
    out.num("max_error", err);
    out.tol("tolerance", tol);
    out.finish_table(t);
    if let Err(e) = w.verify(&payoff, tol) {
        out.failure = Some(e.to_string());
    }
    Ok(out)
}

fn mc_summary(out: &mut Outcome, cfg: &McConfig, values: &[f64]) {
    out.put("n_paths", cfg.n_paths);
    out.put("n_steps", cfg.n_steps);
    out.put("checksum", checksum(values));
    out.put("mean", estimate_json(&mean_estimate(values)));
}

fn cmd_mc_log_stock(cfg: &Config) -> Result<Outcome, CliError> {
    let m = model(cfg)?;
    let dr = drift(cfg)?;
    let mc = mc_config(cfg, 100_000, 100)?;
    let x0 = cfg.value_or("mc", "x0", 0.0).map_err(cfg_err)?;
    let t = cfg.value_or("mc", "T", 1.0).map_err(cfg_err)?;
    let xs = simulate_log_stock(&m, &dr, x0, t, &mc).map_err(param_err)?;
    let mut out = Outcome::default();
    mc_summary(&mut out, &mc, &xs);
    let growth: Vec<f64> = xs.iter().map(|x| (x - x0).exp()).collect();
    out.put("martingale_mean", estimate_json(&mean_estimate(&growth)));
    out.samples = Some(("x".into(), xs));
    Ok(out)
}

fn cmd_mc_cev(cfg: &Config) -> Result<Outcome, CliError> {
    let p = cev_params(cfg)?;
    let mc = mc_config(cfg, 100_000, 1000)?;
    let s = simulate_cev(&p, &mc);
    let mut out = Outcome::default();
    mc_summary(&mut out, &mc, &s.values);
    out.put("absorbed", estimate_json(&s.absorption_estimate()));
    out.num("absorption_prob", cev_absorption_prob(&p).map_err(num_err)?);
    out.samples = Some(("s".into(), s.values));
    Ok(out)
}

fn cmd_mc_cir(cfg: &Config) -> Result<Outcome, CliError> {
    let (p, maturity) = cir_params(cfg)?;
    let mc = mc_config(cfg, 100_000, 400)?;
    let pairs = simulate_cir_and_integral(&p, maturity, &mc);
    let vt: Vec<f64> = pairs.iter().map(|x| x.0).collect();
    let tau: Vec<f64> = pairs.iter().map(|x| x.1).collect();
    let mut out = Outcome::default();
    mc_summary(&mut out, &mc, &tau);
    out.put("mean_v_T", estimate_json(&mean_estimate(&vt)));
    out.num("mean_v_T_exact", p.mean_v(maturity));
    out.num("mean_integral_exact", p.mean_integral(maturity));
    out.samples = Some(("tau".into(), tau));
    Ok(out)
}

fn cmd_mc_compose(cfg: &Config) -> Result<Outcome, CliError> {
    let p = cev_params(cfg)?;
    let mc = mc_config(cfg, 1, 1000)?;
    let path: String = cfg.require("mc", "clock").map_err(cfg_err)?;
    let clock = read_samples(&read_file(&path)?).map_err(|e| cfg_err(format!("{path}: {e}")))?;
    let s = compose_time_change(&p, &clock, &mc).map_err(param_err)?;
    let mut out = Outcome::default();
    mc_summary(&mut out, &mc, &s.values);
    out.put("n_paths", clock.len());
    out.put("absorbed", estimate_json(&s.absorption_estimate()));
    out.samples = Some(("s".into(), s.values));
    Ok(out)
}

fn cmd_doss_check(cfg: &Config) -> Result<Outcome, CliError> {
    let m = model(cfg)?;
    let x0: f64 = cfg.value_or("doss", "x0", 0.0).map_err(cfg_err)?;
    let t: f64 = cfg.value_or("doss", "t", 1.0).map_err(cfg_err)?;
    let points = grid(cfg, "doss", "points", Some("1,1.25,1.5"))?;
    let mc = mc_config(cfg, 1_000_000, 100)?;
    let xs = simulate_log_stock(&m, &DriftSpec::DriftlessLogStock, x0, t, &mc).map_err(param_err)?;
    let band = DossBounds::from_model(&m).map_err(num_err)?;
    let exact = |x: f64| match m.kind() {
        VolKind::Constant { sigma0 } => norm_sf((x - x0 + 0.5 * sigma0 * sigma0 * t) / (sigma0 * t.sqrt())),
        _ => f64::NAN,
    };
    let mut table = Table::new(&[
        "x",
        "tail_prob",
        "half_width_95",
        "neg_log_tail",
        "half_d2",
        "ratio",
        "sandwich_lower",
        "sandwich_upper",
        "exact_tail",
    ]);
    let mut ratios = Vec::new();
    for &x in &points {
        let est = tail_prob(&xs, x).map_err(num_err)?;
        let d = geodesic_distance(&m, x0, x).map_err(num_err)?;
        let half_d2 = d * d / (2.0 * t);
        let nlt = -est.value.ln();
        let (lo, hi) = doss_sandwich_log_tail(&m, band, x0, x, t).map_err(num_err)?;
        ratios.push(nlt / half_d2);
        table.push(vec![
            g12(x),
            g12(est.value),
            g12(est.half_width_95),
            g12(nlt),
            g12(half_d2),
            g12(nlt / half_d2),
            g12(lo.exp()),
            g12(hi.exp()),
            g12(exact(x)),
        ]);
    }
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    let last = *ratios.last().unwrap_or(&f64::NAN);
    let mut out = Outcome::default();
    out.put("n_paths", mc.n_paths);
    out.put("n_steps", mc.n_steps);
    out.put("checksum", checksum(&xs));
    out.put("doss_c1", g12(band.c1));
    out.put("doss_c2", g12(band.c2));
    out.put("ratios", ratios.iter().map(|r| g12(*r)).collect::<Vec<_>>());
    out.put("ratio_increasing", increasing);
    out.num("ratio_at_largest_x", last);
    out.put("ratio_exceeds_0_8", last > 0.8);
    out.tol("ratio_floor", 0.8);
    out.notes.push(format!(
        "ratio -log P(X_t > x)/(d^2/2t): increasing = {increasing}, last = {}",
        g12(last)
    ));
    out.finish_table(table);
    Ok(out)
}
