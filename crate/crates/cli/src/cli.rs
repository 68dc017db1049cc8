//! Command-line front end. [`run`] is the whole program minus process exit,
//! so it can be driven in-process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use sumentropy_core::dist::{mc_entropy, DiscreteDist, DEFAULT_MAX_SUPPORT};
use sumentropy_core::exactnum::format_rat;
use sumentropy_core::partition::{
    compute_rank, falsify_incommensurability, is_incommensurable, lemma5_prepartition, Collection, Prepartition,
    DEFAULT_FALSIFY_BUDGET, DEFAULT_RANK_BUDGET,
};

use crate::cells::parse_cells;
use crate::convergence::{
    dyadic_grid, gap_magnitude_decreasing, linear_grid, resolve_bounds, run_convergence, BoundRequest, Caps,
    ConvergenceRow, EntropyMode,
};
use crate::error::{AppError, AppResult};
use crate::fit::{default_window, fit_scaling};
use crate::output::{certificate_json, fmt_num, fmt_opt, prepartition_json, report_json, witness_json};
use crate::specfile::parse_spec;

/// Exit status when `verify` finds a fitted slope below `r/2 − tolerance`.
pub const EXIT_SLOPE_CHECK: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "sumentropy", version, about = "Exact entropy of iid sums and incommensurability rank")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Abort exact convolution beyond this many support atoms
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_SUPPORT)]
    max_support: usize,

    /// Unit of printed entropies and bounds
    #[arg(long, global = true, value_enum, default_value_t = LogBase::E)]
    log_base: LogBase,

    /// Write output to this file instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Significant bits kept when rounding probabilities (64..=106)
    #[arg(long, global = true, default_value_t = 106, value_parser = clap::value_parser!(u32).range(64..=106))]
    precision: u32,

    /// Allowed shortfall of the fitted slope below r/2 in `verify`
    #[arg(long, global = true, default_value_t = 0.15)]
    tolerance: f64,

    /// Cap on states visited by the rank search
    #[arg(long, global = true, default_value_t = DEFAULT_RANK_BUDGET)]
    rank_budget: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LogBase {
    #[value(name = "e")]
    E,
    #[value(name = "2")]
    Two,
}

impl LogBase {
    fn scale(self) -> f64 {
        match self {
            LogBase::E => 1.0,
            LogBase::Two => std::f64::consts::LOG2_E,
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            LogBase::E => "",
            LogBase::Two => "_bits",
        }
    }
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct GridArgs {
    /// A single N
    #[arg(long)]
    n: Option<u64>,
    /// Linear grid a,b,step
    #[arg(long)]
    grid: Option<String>,
    /// Powers-of-two grid lo,hi
    #[arg(long)]
    dyadic: Option<String>,
}

#[derive(Args, Debug)]
struct McArgs {
    /// Estimate entropy from this many samples instead of exactly
    #[arg(long)]
    mc_samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank, certificate and all applicable bound constants (JSON)
    Analyze { spec: PathBuf },
    /// Incommensurability rank with its certificate (JSON)
    Rank { spec: PathBuf },
    /// Exact entropy of the N-fold sum (CSV)
    Entropy {
        spec: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Entropy next to selected bounds, with a slope fit (CSV)
    Verify {
        spec: PathBuf,
        /// Comma-separated: thm1, thm2, thm4, thm7, cor9
        #[arg(long, value_delimiter = ',', required = true)]
        bounds: Vec<String>,
        #[command(flatten)]
        grid: GridArgs,
        /// Fit window lo,hi (default: top half of the grid)
        #[arg(long)]
        fit_window: Option<String>,
        /// Prepartition for thm4/thm7 (default: the rank certificate)
        #[arg(long)]
        cells: Option<String>,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Decide incommensurability of a cell list (JSON)
    Check {
        spec: PathBuf,
        #[arg(long)]
        cells: String,
    },
    /// Exhaustive search for a commensurability witness (JSON)
    Falsify {
        spec: PathBuf,
        #[arg(long)]
        cells: String,
        #[arg(long, default_value_t = 8)]
        n_max: u64,
        /// Cap on enumerated count vectors
        #[arg(long, default_value_t = DEFAULT_FALSIFY_BUDGET)]
        budget: u64,
    },
    /// Monte Carlo entropy estimate (CSV)
    Mc {
        spec: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
    },
}

/// Output text and exit status of a successful command.
struct Outcome {
    text: String,
    status: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, status: 0 }
    }
}

fn load(path: &Path) -> AppResult<DiscreteDist> {
    let text = std::fs::read_to_string(path).map_err(|source| AppError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_spec(&text)?.1)
}

fn parse_list(text: &str, expected: usize, what: &str) -> AppResult<Vec<u64>> {
    let parts: Vec<u64> = text
        .split(',')
        .map(|p| p.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|_| AppError::Usage(format!("{what}: expected {expected} comma-separated integers, got {text:?}")))?;
    if parts.len() != expected {
        return Err(AppError::Usage(format!(
            "{what}: expected {expected} comma-separated integers, got {text:?}"
        )));
    }
    Ok(parts)
}

fn grid_of(g: &GridArgs) -> AppResult<Vec<u64>> {
    if let Some(n) = g.n {
        if n == 0 {
            return Err(AppError::Usage("--n must be at least 1".into()));
        }
        return Ok(vec![n]);
    }
    if let Some(text) = &g.grid {
        let p = parse_list(text, 3, "--grid")?;
        return linear_grid(p[0], p[1], p[2]);
    }
    let text = g.dyadic.as_deref().expect("clap enforces one grid flag");
    let p = parse_list(text, 2, "--dyadic")?;
    dyadic_grid(p[0], p[1])
}

fn mode_of(mc: &McArgs) -> AppResult<EntropyMode> {
    match mc.mc_samples {
        None => Ok(EntropyMode::Exact),
        Some(0) => Err(AppError::Usage("--mc-samples must be at least 1".into())),
        Some(samples) => Ok(EntropyMode::MonteCarlo { samples, seed: mc.seed }),
    }
}

fn collection_of(d: &DiscreteDist, cells: &str) -> AppResult<Collection> {
    let groups = parse_cells(cells, d.basis())?;
    Ok(Collection::from_groups(d.support(), groups)?)
}

fn h_label(mode: EntropyMode) -> &'static str {
    match mode {
        EntropyMode::Exact => "H_exact",
        EntropyMode::MonteCarlo { .. } => "H_mc",
    }
}

fn notes(rows: &[ConvergenceRow], out: &mut String) {
    for r in rows {
        if let Some(note) = &r.note {
            let _ = writeln!(out, "# N={}: {note}", r.n);
        }
    }
}

fn cmd_entropy(cli: &Cli, spec: &Path, grid: &GridArgs, mc: &McArgs) -> AppResult<Outcome> {
    let d = load(spec)?;
    let grid = grid_of(grid)?;
    let mode = mode_of(mc)?;
    let caps = Caps {
        max_support: cli.max_support,
        precision: cli.precision,
    };
    let rows = run_convergence(&d, &grid, &[], mode, caps)?;
    let scale = cli.log_base.scale();
    let mut out = String::new();
    let support = match mode {
        EntropyMode::Exact => "support_size",
        EntropyMode::MonteCarlo { .. } => "observed_support",
    };
    let _ = writeln!(out, "N,{}{},error_bound,{support}", h_label(mode), cli.log_base.suffix());
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.n,
            fmt_opt(r.h().map(|h| h * scale)),
            fmt_opt(r.entropy.map(|e| e.error_bound * scale)),
            r.support_size.map(|s| s.to_string()).unwrap_or_default()
        );
    }
    notes(&rows, &mut out);
    Ok(Outcome::ok(out))
}

fn cmd_verify(
    cli: &Cli,
    spec: &Path,
    bounds: &[String],
    grid: &GridArgs,
    fit_window: Option<&str>,
    cells: Option<&str>,
    mc: &McArgs,
) -> AppResult<Outcome> {
    let d = load(spec)?;
    let grid = grid_of(grid)?;
    let mode = mode_of(mc)?;
    let requests = bounds.iter().map(|b| b.parse()).collect::<AppResult<Vec<BoundRequest>>>()?;
    let pp = match cells {
        Some(text) => {
            let groups = parse_cells(text, d.basis())?;
            Some(Prepartition::from_groups(d.support(), groups)?)
        }
        None => None,
    };
    let resolved = resolve_bounds(&d, &requests, pp.as_ref(), cli.rank_budget)?;
    let rank = match &resolved.rank {
        Some(r) => r.rank,
        None => compute_rank(d.support(), cli.rank_budget)?.rank,
    };
    let caps = Caps {
        max_support: cli.max_support,
        precision: cli.precision,
    };
    let rows = run_convergence(&d, &grid, &resolved.columns, mode, caps)?;
    let window = match fit_window {
        Some(text) => {
            let p = parse_list(text, 2, "--fit-window")?;
            (p[0], p[1])
        }
        None => default_window(&grid).expect("nonempty grid"),
    };
    let points: Vec<(u64, f64)> = rows.iter().filter_map(|r| r.h().map(|h| (r.n, h))).collect();
    let fit = fit_scaling(&points, window)?;

    let scale = cli.log_base.scale();
    let suffix = cli.log_base.suffix();
    let labels: Vec<&str> = resolved.columns.iter().map(|c| c.label.as_str()).collect();
    let gap_labels: Vec<String> = if labels.len() == 1 {
        vec!["gap".into()]
    } else {
        labels.iter().map(|l| format!("gap_{l}")).collect()
    };
    let mut out = String::new();
    let mut header = vec!["N".to_string(), format!("{}{suffix}", h_label(mode))];
    header.extend(labels.iter().map(|l| l.to_string()));
    header.extend(gap_labels.iter().cloned());
    let _ = writeln!(out, "{}", header.join(","));
    for r in &rows {
        let mut fields = vec![r.n.to_string(), fmt_opt(r.h().map(|h| h * scale))];
        fields.extend(r.bounds.iter().map(|b| fmt_num(b * scale)));
        fields.extend(r.gaps().iter().map(|g| fmt_opt(g.map(|g| g * scale))));
        let _ = writeln!(out, "{}", fields.join(","));
    }
    notes(&rows, &mut out);

    let expected = rank as f64 / 2.0;
    let pass = fit.slope >= expected - cli.tolerance;
    let _ = writeln!(out, "# unit: {}", if suffix.is_empty() { "nats" } else { "bits" });
    let _ = writeln!(out, "# fit_window: {},{}", fit.window.0, fit.window.1);
    let _ = writeln!(out, "# fit_points: {}", fit.points);
    let _ = writeln!(out, "# slope: {}", fmt_num(fit.slope * scale));
    let _ = writeln!(out, "# intercept: {}", fmt_num(fit.intercept * scale));
    let _ = writeln!(out, "# max_residual: {}", fmt_num(fit.max_residual * scale));
    let _ = writeln!(out, "# rank: {rank}");
    let _ = writeln!(out, "# expected_slope: {} (tolerance {})", fmt_num(expected * scale), fmt_num(cli.tolerance * scale));
    let _ = writeln!(out, "# slope_check: {}", if pass { "pass" } else { "fail" });
    for (j, c) in resolved.columns.iter().enumerate() {
        let decreasing = gap_magnitude_decreasing(&rows, j, window);
        let negative = rows
            .iter()
            .filter(|r| (window.0..=window.1).contains(&r.n))
            .any(|r| r.gaps()[j].is_some_and(|g| g < 0.0));
        let trend = match (decreasing, negative) {
            (true, _) => "|gap| decreasing",
            (false, true) => "asymptotic regime not reached",
            (false, false) => "|gap| not decreasing",
        };
        let _ = writeln!(
            out,
            "# trend {}: {trend} ({}, coeff {}, asymptotic)",
            c.label,
            c.report.direction.as_str(),
            format_rat(&c.report.coeff)
        );
    }
    for (label, reason) in &resolved.skipped {
        let _ = writeln!(out, "# skipped {label}: {reason}");
    }
    Ok(Outcome {
        text: out,
        status: if pass { 0 } else { EXIT_SLOPE_CHECK },
    })
}

fn cmd_analyze(cli: &Cli, spec: &Path) -> AppResult<Outcome> {
    let d = load(spec)?;
    let all = [BoundRequest::Thm1, BoundRequest::Thm2, BoundRequest::Thm4, BoundRequest::Thm7, BoundRequest::Cor9];
    let resolved = resolve_bounds(&d, &all, None, cli.rank_budget)?;
    let rank = resolved.rank.as_ref().expect("cor9 needs the rank");
    let lattice = d.support().detect_lattice().map(|l| {
        json!({
            "offset": l.offset.expr(d.basis()),
            "direction": l.direction.expr(d.basis()),
            "var_over_h2": d.var_over_h2().ok().map(|v| format_rat(&v)),
        })
    });
    let doc = json!({
        "support_size": d.len(),
        "basis": d.basis().symbols().iter().map(|s| json!({"symbol": s.name, "approx": s.approx})).collect::<Vec<_>>(),
        "lattice": lattice,
        "rank": rank.rank,
        "states_visited": rank.states_visited,
        "certificate": rank.certificate.as_ref().map(prepartition_json),
        "lemma5": prepartition_json(&lemma5_prepartition(d.support())?),
        "bounds": resolved.columns.iter().map(|c| {
            let mut v = report_json(&c.report);
            v["label"] = json!(c.label);
            v
        }).collect::<Vec<_>>(),
        "skipped": resolved.skipped.iter().map(|(b, r)| json!({"bound": b, "reason": r})).collect::<Vec<_>>(),
        "entropy_unit": "nats",
    });
    Ok(Outcome::ok(pretty(&doc)))
}

fn cmd_rank(cli: &Cli, spec: &Path) -> AppResult<Outcome> {
    let d = load(spec)?;
    let r = compute_rank(d.support(), cli.rank_budget)?;
    let doc = json!({
        "rank": r.rank,
        "states_visited": r.states_visited,
        "certificate": r.certificate.as_ref().map(prepartition_json),
    });
    Ok(Outcome::ok(pretty(&doc)))
}

fn cmd_check(spec: &Path, cells: &str) -> AppResult<Outcome> {
    let d = load(spec)?;
    let c = collection_of(&d, cells)?;
    let cert = is_incommensurable(&c);
    let mut doc = certificate_json(&cert, d.basis());
    doc["verdict"] = json!(cert.verdict());
    Ok(Outcome::ok(pretty(&doc)))
}

fn cmd_falsify(spec: &Path, cells: &str, n_max: u64, budget: u64) -> AppResult<Outcome> {
    let d = load(spec)?;
    let c = collection_of(&d, cells)?;
    let w = falsify_incommensurability(&c, n_max, budget)?;
    let doc = json!({
        "n_max": n_max,
        "found": w.is_some(),
        "witness": w.as_ref().map(|w| witness_json(w, d.basis())),
    });
    Ok(Outcome::ok(pretty(&doc)))
}

fn cmd_mc(cli: &Cli, spec: &Path, n: u64, samples: u64, seed: u64) -> AppResult<Outcome> {
    let d = load(spec)?;
    let mc = mc_entropy(&d, n, samples, seed)?;
    let scale = cli.log_base.scale();
    let text = format!(
        "N,samples,seed,H_mc{},observed_support\n{n},{samples},{seed},{},{}\n",
        cli.log_base.suffix(),
        fmt_num(mc.estimate.to_f64() * scale),
        mc.observed_support
    );
    Ok(Outcome::ok(text))
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn dispatch(cli: &Cli) -> AppResult<Outcome> {
    match &cli.command {
        Command::Analyze { spec } => cmd_analyze(cli, spec),
        Command::Rank { spec } => cmd_rank(cli, spec),
        Command::Entropy { spec, grid, mc } => cmd_entropy(cli, spec, grid, mc),
        Command::Verify {
            spec,
            bounds,
            grid,
            fit_window,
            cells,
            mc,
        } => cmd_verify(cli, spec, bounds, grid, fit_window.as_deref(), cells.as_deref(), mc),
        Command::Check { spec, cells } => cmd_check(spec, cells),
        Command::Falsify {
            spec,
            cells,
            n_max,
            budget,
        } => cmd_falsify(spec, cells, *n_max, *budget),
        Command::Mc { spec, n, samples, seed } => cmd_mc(cli, spec, *n, *samples, *seed),
    }
}

/// Runs the program on `args` (including the program name) and returns the
/// exit status: 0 success, 1 computational error, 2 usage error,
/// [`EXIT_SLOPE_CHECK`] failed slope check.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = dispatch(&cli).and_then(|outcome| {
        match &cli.out {
            Some(path) => std::fs::write(path, &outcome.text).map_err(|source| AppError::Io {
                path: path.display().to_string(),
                source,
            })?,
            None => {
                let _ = stdout.write_all(outcome.text.as_bytes());
            }
        }
        Ok(outcome.status)
    });
    match result {
        Ok(status) => status,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.to_json());
            e.exit_code()
        }
    }
}
