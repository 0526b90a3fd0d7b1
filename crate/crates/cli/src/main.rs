//! `voltail` command-line front end.

mod commands;
mod config;
mod format;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;
use config::Config;

#[derive(Parser, Debug)]
#[command(name = "voltail", version, about = "Tail asymptotics for local-volatility, CEV and time-changed CEV models")]
struct Cli {
    /// Plain-text config of `[section]` blocks with `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Also write a JSON run report to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Geodesic distance d(y, u), a curve over u, or the inverse for a distance.
    Geodesic {
        #[command(flatten)]
        vol: VolArgs,
        #[arg(long = "from", allow_hyphen_values = true)]
        from: Option<f64>,
        #[arg(long = "to", allow_hyphen_values = true)]
        to: Option<f64>,
        /// Grid of end points `a:b:step`.
        #[arg(long, allow_hyphen_values = true)]
        to_grid: Option<String>,
        /// Solve d(from, u) = distance for u instead.
        #[arg(long, allow_hyphen_values = true)]
        distance: Option<f64>,
    },
    /// Energy E(t, x; u, y) over a grid of y.
    Energy {
        #[command(flatten)]
        vol: VolArgs,
        #[command(flatten)]
        drift: DriftArgs,
        #[command(flatten)]
        energy: EnergyArgs,
    },
    /// Figure-2 table: E(0, 0; 1, y) and d²(0, y)/2 over y in [−3, 3].
    Fig2 {
        #[command(flatten)]
        vol: VolArgs,
        #[command(flatten)]
        drift: DriftArgs,
        #[command(flatten)]
        energy: EnergyArgs,
        /// Use μ ≡ 0 instead of the driftless log-stock drift.
        #[arg(long)]
        zero_drift: bool,
    },
    /// CEV log-density against its tail asymptote.
    CevTail {
        #[command(flatten)]
        cev: CevArgs,
        #[arg(long, allow_hyphen_values = true)]
        x_grid: Option<String>,
    },
    /// Right-wing asymptote of I²(k)/k.
    Wing {
        #[arg(long, value_parser = ["cev", "locvol"])]
        kind: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        k_grid: Option<String>,
        #[command(flatten)]
        cev: CevArgs,
        #[command(flatten)]
        vol: VolArgs,
        #[command(flatten)]
        drift: DriftArgs,
        /// Spot log-price for the local-volatility wing.
        #[arg(long = "spot", allow_hyphen_values = true)]
        spot: Option<f64>,
    },
    /// Critical exponential moment λ* of the integrated CIR clock.
    CriticalLambda {
        #[command(flatten)]
        cir: CirArgs,
    },
    /// Laplace transform of the clock from terminal samples.
    Carrlee {
        #[arg(long, value_parser = ["brownian", "cev"])]
        kind: Option<String>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Single-column CSV of terminal levels.
        #[arg(long)]
        samples: Option<PathBuf>,
        #[arg(long)]
        s0: Option<f64>,
        #[arg(long)]
        anchor: Option<f64>,
        #[command(flatten)]
        cev: CevArgs,
    },
    /// Static replication weights of a payoff expression in `s`.
    Replicate {
        #[arg(long, allow_hyphen_values = true)]
        payoff: Option<String>,
        #[arg(long)]
        forward: Option<f64>,
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Monte Carlo simulations; samples are written as single-column CSV.
    Mc {
        #[command(subcommand)]
        process: McProcess,
    },
    /// Monte Carlo tail frequencies against the geodesic rate d²/2t.
    DossCheck {
        #[command(flatten)]
        vol: VolArgs,
        #[command(flatten)]
        mc: McArgs,
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        /// Test points, `a:b:step` or a comma list.
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
    },
    /// Re-run the command recorded in a JSON report and compare outputs.
    Report {
        path: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum McProcess {
    LogStock {
        #[command(flatten)]
        vol: VolArgs,
        #[command(flatten)]
        drift: DriftArgs,
        #[command(flatten)]
        mc: McArgs,
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<f64>,
        #[arg(long = "T")]
        maturity: Option<f64>,
    },
    Cev {
        #[command(flatten)]
        cev: CevArgs,
        #[command(flatten)]
        mc: McArgs,
    },
    Cir {
        #[command(flatten)]
        cir: CirArgs,
        #[command(flatten)]
        mc: McArgs,
    },
    Compose {
        #[command(flatten)]
        cev: CevArgs,
        #[command(flatten)]
        mc: McArgs,
        /// Single-column CSV of clock draws τ(T).
        #[arg(long)]
        clock: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Default)]
struct VolArgs {
    /// constant, figure1, cev-local or expr.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    sigma0: Option<f64>,
    #[arg(long)]
    vol_delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    vol_beta: Option<f64>,
    /// σ(x) or σ(t, x) as an expression.
    #[arg(long, allow_hyphen_values = true)]
    expr: Option<String>,
    #[arg(long)]
    sigma_lo: Option<f64>,
    #[arg(long)]
    sigma_hi: Option<f64>,
    /// Accept sampled bounds for an expression model.
    #[arg(long)]
    confirm_bounds: bool,
    /// analytic or central.
    #[arg(long)]
    derivative: Option<String>,
}

#[derive(Args, Debug, Default)]
struct DriftArgs {
    /// driftless, zero, constant or expr.
    #[arg(long)]
    drift: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    drift_expr: Option<String>,
}

#[derive(Args, Debug, Default)]
struct EnergyArgs {
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    u: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y_grid: Option<String>,
    #[arg(long)]
    n_grid: Option<usize>,
    #[arg(long)]
    multistarts: Option<usize>,
    /// Skip the direct-minimisation cross-check.
    #[arg(long)]
    no_cross_check: bool,
}

#[derive(Args, Debug, Default)]
struct CevArgs {
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long = "cev-x0")]
    cev_x0: Option<f64>,
    #[arg(long = "cev-T")]
    cev_maturity: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct CirArgs {
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    sigma_v: Option<f64>,
    #[arg(long)]
    v0: Option<f64>,
    #[arg(long = "cir-T")]
    cir_maturity: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct McArgs {
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// euler or exact (CEV only).
    #[arg(long)]
    scheme: Option<String>,
}

fn set<T: ToString>(cfg: &mut Config, section: &str, key: &str, v: &Option<T>) {
    if let Some(v) = v {
        cfg.set(section, key, v.to_string());
    }
}

impl VolArgs {
    fn apply(&self, cfg: &mut Config) {
        set(cfg, "vol", "kind", &self.model);
        if self.sigma0.is_some() && self.model.is_none() {
            cfg.set("vol", "kind", "constant");
        }
        if self.expr.is_some() && self.model.is_none() {
            cfg.set("vol", "kind", "expr");
        }
        set(cfg, "vol", "sigma0", &self.sigma0);
        set(cfg, "vol", "delta", &self.vol_delta);
        set(cfg, "vol", "beta", &self.vol_beta);
        set(cfg, "vol", "expr", &self.expr);
        set(cfg, "vol", "sigma_lo", &self.sigma_lo);
        set(cfg, "vol", "sigma_hi", &self.sigma_hi);
        set(cfg, "vol", "derivative", &self.derivative);
        if self.confirm_bounds {
            cfg.set("vol", "confirm_bounds", "true");
        }
    }
}

impl DriftArgs {
    fn apply(&self, cfg: &mut Config) {
        set(cfg, "drift", "kind", &self.drift);
        if self.drift.is_none() {
            if self.mu.is_some() {
                cfg.set("drift", "kind", "constant");
            } else if self.drift_expr.is_some() {
                cfg.set("drift", "kind", "expr");
            }
        }
        set(cfg, "drift", "mu", &self.mu);
        set(cfg, "drift", "expr", &self.drift_expr);
    }
}

impl EnergyArgs {
    fn apply(&self, cfg: &mut Config) {
        set(cfg, "energy", "x", &self.x);
        set(cfg, "energy", "t", &self.t);
        set(cfg, "energy", "u", &self.u);
        set(cfg, "energy", "y_grid", &self.y_grid);
        set(cfg, "energy", "n_grid", &self.n_grid);
        set(cfg, "energy", "multistarts", &self.multistarts);
        if self.no_cross_check {
            cfg.set("energy", "cross_check", "false");
        }
    }
}

impl CevArgs {
    fn apply(&self, cfg: &mut Config) {
        set(cfg, "cev", "delta", &self.delta);
        set(cfg, "cev", "beta", &self.beta);
        set(cfg, "cev", "x0", &self.cev_x0);
        set(cfg, "cev", "T", &self.cev_maturity);
    }
}

impl CirArgs {
    fn apply(&self, cfg: &mut Config) {
        set(cfg, "cir", "kappa", &self.kappa);
        set(cfg, "cir", "theta", &self.theta);
        set(cfg, "cir", "sigma_v", &self.sigma_v);
        set(cfg, "cir", "v0", &self.v0);
        set(cfg, "cir", "T", &self.cir_maturity);
    }
}

impl McArgs {
    fn apply(&self, cfg: &mut Config) {
        set(cfg, "mc", "paths", &self.paths);
        set(cfg, "mc", "steps", &self.steps);
        set(cfg, "mc", "seed", &self.seed);
        set(cfg, "mc", "scheme", &self.scheme);
    }
}

fn path_str(p: &Option<PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

/// Command name and the config with flags applied on top.
fn resolve(command: &Command, cfg: &mut Config) -> &'static str {
    match command {
        Command::Geodesic {
            vol,
            from,
            to,
            to_grid,
            distance,
        } => {
            vol.apply(cfg);
            set(cfg, "geodesic", "from", from);
            set(cfg, "geodesic", "to", to);
            set(cfg, "geodesic", "to_grid", to_grid);
            set(cfg, "geodesic", "distance", distance);
            "geodesic"
        }
        Command::Energy { vol, drift, energy } => {
            vol.apply(cfg);
            drift.apply(cfg);
            energy.apply(cfg);
            "energy"
        }
        Command::Fig2 {
            vol,
            drift,
            energy,
            zero_drift,
        } => {
            vol.apply(cfg);
            drift.apply(cfg);
            energy.apply(cfg);
            if *zero_drift {
                cfg.set("drift", "kind", "zero");
            }
            "fig2"
        }
        Command::CevTail { cev, x_grid } => {
            cev.apply(cfg);
            set(cfg, "cev-tail", "x_grid", x_grid);
            "cev-tail"
        }
        Command::Wing {
            kind,
            k_grid,
            cev,
            vol,
            drift,
            spot,
        } => {
            cev.apply(cfg);
            vol.apply(cfg);
            drift.apply(cfg);
            set(cfg, "wing", "kind", kind);
            set(cfg, "wing", "k_grid", k_grid);
            set(cfg, "wing", "x0", spot);
            "wing"
        }
        Command::CriticalLambda { cir } => {
            cir.apply(cfg);
            "critical-lambda"
        }
        Command::Carrlee {
            kind,
            lambda,
            samples,
            s0,
            anchor,
            cev,
        } => {
            cev.apply(cfg);
            set(cfg, "carrlee", "kind", kind);
            set(cfg, "carrlee", "lambda", lambda);
            set(cfg, "carrlee", "samples", &path_str(samples));
            set(cfg, "carrlee", "s0", s0);
            set(cfg, "carrlee", "anchor", anchor);
            "carrlee"
        }
        Command::Replicate {
            payoff,
            forward,
            grid,
            tolerance,
        } => {
            set(cfg, "replicate", "payoff", payoff);
            set(cfg, "replicate", "forward", forward);
            set(cfg, "replicate", "grid", grid);
            set(cfg, "replicate", "tolerance", tolerance);
            "replicate"
        }
        Command::Mc { process } => match process {
            McProcess::LogStock {
                vol,
                drift,
                mc,
                x0,
                maturity,
            } => {
                vol.apply(cfg);
                drift.apply(cfg);
                mc.apply(cfg);
                set(cfg, "mc", "x0", x0);
                set(cfg, "mc", "T", maturity);
                "mc-log-stock"
            }
            McProcess::Cev { cev, mc } => {
                cev.apply(cfg);
                mc.apply(cfg);
                "mc-cev"
            }
            McProcess::Cir { cir, mc } => {
                cir.apply(cfg);
                mc.apply(cfg);
                "mc-cir"
            }
            McProcess::Compose { cev, mc, clock } => {
                cev.apply(cfg);
                mc.apply(cfg);
                set(cfg, "mc", "clock", &path_str(clock));
                "mc-compose"
            }
        },
        Command::DossCheck {
            vol,
            mc,
            x0,
            t,
            points,
        } => {
            vol.apply(cfg);
            mc.apply(cfg);
            set(cfg, "doss", "x0", x0);
            set(cfg, "doss", "t", t);
            set(cfg, "doss", "points", points);
            "doss-check"
        }
        Command::Report { .. } => "report",
    }
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    if let Command::Report { path } = &cli.command {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let summary = report::replay(&text)?;
        return write_out(&cli.out, &summary);
    }
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Config::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => Config::default(),
    };
    let name = resolve(&cli.command, &mut cfg);
    let started = std::time::Instant::now();
    let outcome = commands::run(name, &cfg)?;
    let elapsed = started.elapsed().as_secs_f64();
    for n in &outcome.notes {
        eprintln!("{n}");
    }
    let rep = report::build(name, &cfg, &outcome, elapsed);
    let json = serde_json::to_string_pretty(&rep).expect("report serializes") + "\n";
    match cli.format.unwrap_or(Format::Csv) {
        Format::Json => write_out(&cli.out, &json)?,
        Format::Csv => {
            if let Some((header, values)) = &outcome.samples {
                write_out(&cli.out, &format::write_samples(header, values))?;
                eprintln!("{}", serde_json::to_string(&outcome.outputs).expect("outputs serialize"));
            } else if let Some(t) = &outcome.table {
                write_out(&cli.out, &t.to_csv())?;
            }
        }
    }
    if let Some(p) = &cli.report {
        fs::write(p, &json).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    }
    match outcome.failure {
        Some(f) => Err(CliError::Numerical(f)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("voltail: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
