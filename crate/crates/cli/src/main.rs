//! `picone`: command-line front end for the Picone inequality numerics.
//!
//! Exit codes: 0 on success, 1 when a violation was found, 2 on invalid
//! input or any other error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use picone::export::{to_json_string, write_json, write_region_csv};
use picone::inequality::fuzz::{fuzz, InequalityKind, Regime, SamplerConfig};
use picone::pqsolve::{default_mu_grid, mu_sweep_with, thresholds, PqProblem};
use picone::region::{self, AxisRange};
use picone::spectrum::{first_eigenpair_with, EigenOptions, EigenSummary, Geometry};
use picone::ExponentPair;
use serde_json::json;

#[derive(Parser)]
#[command(name = "picone", version, about = "Generalized Picone inequalities and the (p,q)-Laplacian")]
struct Cli {
    /// Directory for output files when no explicit path is given.
    #[arg(long, global = true, env = "PICONE_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fuzz one inequality at random points; exits 1 if any violation is found.
    Verify(VerifyArgs),
    /// Exponent-region computations.
    #[command(subcommand)]
    Region(RegionCommand),
    /// First eigenpair of the r-Laplacian on an interval or ball.
    Spectrum(SpectrumArgs),
    /// μ-sweep of positive solutions of the (p,q)-Laplacian problem.
    Solve(SolveArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: classic, bf, ilyas, general, radial-pair, tirani, tirani-q,
    /// tirani-q-power, tirani-q-young, bm.
    #[arg(long = "ineq", value_parser = parse_kind)]
    inequality: InequalityKind,
    #[arg(long)]
    p: f64,
    /// Defaults to `p`.
    #[arg(long)]
    q: Option<f64>,
    #[arg(long = "n", default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// aligned, anti or random.
    #[arg(long, default_value = "random", value_parser = parse_regime)]
    regime: Regime,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long)]
    atol: Option<f64>,
    #[arg(long)]
    rtol: Option<f64>,
    /// JSON summary path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum RegionCommand {
    /// Region map CSV over `(pmin, pmax] × (qmin, qmax]`.
    Grid {
        #[arg(long, default_value_t = 1.0)]
        pmin: f64,
        #[arg(long, default_value_t = 4.0)]
        pmax: f64,
        #[arg(long, default_value_t = 1.0)]
        qmin: f64,
        #[arg(long, default_value_t = 3.0)]
        qmax: f64,
        #[arg(long, default_value_t = 200)]
        res: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Upper end `p̃(q)` of the region.
    Ptilde {
        #[arg(long)]
        q: f64,
    },
    /// Threshold `q̃` below which the region has a gap.
    Qtilde,
    /// Gap `(p_low, p_high)` inside `(q, 2)`, if any.
    Gap {
        #[arg(long)]
        q: f64,
    },
    /// Explicit violating point for an exponent pair outside the region.
    Counterexample {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GeometryArgs {
    /// Ball of this dimension (default 2 when no geometry is given).
    #[arg(long, conflicts_with = "interval")]
    ball: Option<usize>,
    /// Interval of this length, taken as `(-L/2, L/2)`.
    #[arg(long)]
    interval: Option<f64>,
    /// Ball radius.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
}

impl GeometryArgs {
    fn geometry(&self) -> picone::Result<Geometry> {
        match (self.ball, self.interval) {
            (_, Some(len)) => Geometry::interval(len),
            (dim, None) => Geometry::ball(dim.unwrap_or(2), self.radius),
        }
    }
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long = "r")]
    r_exp: f64,
    #[command(flatten)]
    geometry: GeometryArgs,
    #[arg(long, default_value_t = 4096)]
    nodes: usize,
    /// Eigendata JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Profile CSV path (`r,u,du`).
    #[arg(long)]
    profile: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    #[command(flatten)]
    geometry: GeometryArgs,
    #[arg(long, default_value_t = 60)]
    mu_steps: usize,
    /// Defaults to `0.8 λ₁(q)`.
    #[arg(long)]
    mu_min: Option<f64>,
    /// Defaults to `1.3 β₊`.
    #[arg(long)]
    mu_max: Option<f64>,
    /// ExistenceMap JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sweep CSV path (`mu,found,a,grad_p_norm,residual`).
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn parse_kind(s: &str) -> std::result::Result<InequalityKind, String> {
    s.parse().map_err(|e: picone::Error| e.to_string())
}

fn parse_regime(s: &str) -> std::result::Result<Regime, String> {
    s.parse().map_err(|e: picone::Error| e.to_string())
}

/// Explicit path, else `dir/default_name` if an output directory is set.
fn target(explicit: &Option<PathBuf>, dir: &Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
    explicit.clone().or_else(|| dir.as_ref().map(|d| d.join(default_name)))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn emit_json<T: serde::Serialize>(value: &T, path: Option<PathBuf>) -> Result<()> {
    let text = to_json_string(value)?;
    print!("{text}");
    if let Some(path) = path {
        create(&path)?.write_all(text.as_bytes())?;
    }
    Ok(())
}

fn verify(args: &VerifyArgs, dir: &Option<PathBuf>) -> Result<ExitCode> {
    let pq = ExponentPair::new(args.p, args.q.unwrap_or(args.p))?;
    let mut cfg = SamplerConfig::new(args.inequality, pq, args.samples)
        .with_regime(args.regime)
        .with_dim(args.dim);
    if let Some(atol) = args.atol {
        cfg.tol.atol = atol;
    }
    if let Some(rtol) = args.rtol {
        cfg.tol.rtol = rtol;
    }
    let summary = fuzz(&cfg, args.seed)?;
    emit_json(&summary, target(&args.out, dir, &format!("verify-{}.json", args.inequality)))?;
    Ok(if summary.violations > 0 { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn region_cmd(cmd: &RegionCommand, dir: &Option<PathBuf>) -> Result<ExitCode> {
    match cmd {
        RegionCommand::Grid {
            pmin,
            pmax,
            qmin,
            qmax,
            res,
            out,
        } => {
            let cells = region::region_grid(AxisRange::new(*pmin, *pmax), AxisRange::new(*qmin, *qmax), *res)?;
            match target(out, dir, "region_grid.csv") {
                Some(path) => write_region_csv(create(&path)?, &cells)?,
                None => write_region_csv(io::stdout().lock(), &cells)?,
            }
        }
        RegionCommand::Ptilde { q } => {
            picone::inequality::ExponentPair::new(*q, *q)?;
            println!("{}", picone::export::fmt_f64(region::p_tilde(*q)));
        }
        RegionCommand::Qtilde => println!("{}", picone::export::fmt_f64(region::q_tilde())),
        RegionCommand::Gap { q } => {
            picone::inequality::ExponentPair::new(*q, *q)?;
            let report = region::gap_report(*q);
            emit_json(
                &json!({
                    "q": report.q,
                    "p_tilde": report.p_tilde,
                    "gap": report.gap,
                    "gap_components": region::gap_components(*q),
                }),
                None,
            )?;
        }
        RegionCommand::Counterexample { p, q, dim, out } => {
            let c = region::counterexample(*p, *q, *dim)?;
            emit_json(&c, target(out, dir, "counterexample.json"))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn spectrum_cmd(args: &SpectrumArgs, dir: &Option<PathBuf>) -> Result<ExitCode> {
    let geom = args.geometry.geometry()?;
    let opts = EigenOptions {
        nodes: args.nodes,
        ..EigenOptions::default()
    };
    let phi = first_eigenpair_with(args.r_exp, geom, &opts)?;
    let summary = EigenSummary::from_profile(&phi).context("eigenpair without eigenvalue")?;
    emit_json(&summary, target(&args.out, dir, "eigendata.json"))?;
    if let Some(path) = target(&args.profile, dir, "profile.csv") {
        phi.write_csv(create(&path)?)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn solve_cmd(args: &SolveArgs, dir: &Option<PathBuf>) -> Result<ExitCode> {
    let geom = args.geometry.geometry()?;
    let pq = ExponentPair::new(args.p, args.q)?;
    let problem = PqProblem::new(pq, geom)?;
    let (_, l1q, beta, _) = thresholds(pq, geom)?;
    let mut grid = default_mu_grid(l1q, beta, args.mu_steps);
    if args.mu_min.is_some() || args.mu_max.is_some() {
        let lo = args.mu_min.unwrap_or(grid[0]);
        let hi = args.mu_max.unwrap_or(grid[grid.len() - 1]);
        if !(lo < hi) {
            return Err(picone::Error::BadRange(format!("mu range [{lo}, {hi}] is empty")).into());
        }
        let n = args.mu_steps.max(2);
        grid = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    }
    let map = mu_sweep_with(&problem, &grid)?;
    let text = to_json_string(&map)?;
    print!("{text}");
    if let Some(path) = target(&args.out, dir, "existence.json") {
        write_json(create(&path)?, &map)?;
    }
    if let Some(path) = target(&args.csv, dir, "existence.csv") {
        map.write_csv(create(&path)?)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Verify(args) => verify(args, &cli.out_dir),
        Command::Region(cmd) => region_cmd(cmd, &cli.out_dir),
        Command::Spectrum(args) => spectrum_cmd(args, &cli.out_dir),
        Command::Solve(args) => solve_cmd(args, &cli.out_dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
