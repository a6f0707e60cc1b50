//! Command-line surface. Exit codes: 0 success, 1 domain error, 2 usage or
//! configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::engine::{
    run_scenario, write_month_csv, EngineError, MarketModel, Scenario, ScenarioConfig, ScenarioReport,
};
use crate::lightning::{find_route, ChannelGraph, ExcludedHops, LightningError, NodeId};
use crate::market::{correlate, inner_join, load_price_csv, CorrelationBasis, StressKind};
use crate::treasury::load_holdings_csv;
use crate::units::MSAT_PER_SAT;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Treasury survival simulator for a BTC-to-sats payments rail.
#[derive(Debug, Parser)]
#[command(name = "satrail", version)]
pub struct Cli {
    /// Directory used to resolve relative --config paths, and to find
    /// scenario.json when --config is omitted.
    #[arg(long, global = true, env = "SATRAIL_CONFIG_DIR")]
    pub config_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a Monte Carlo scenario and write the JSON report.
    Simulate(SimulateArgs),
    /// Run a single deterministic stress path (default: -70% linear over 24 months).
    Stress(StressArgs),
    /// Print mNAV and BTC per share for a holdings CSV at a given BTC price.
    Mnav(MnavArgs),
    /// Find the cheapest route for a payment on a channel graph.
    Route(RouteArgs),
    /// Pearson correlation of two dated price series.
    Corr(CorrArgs),
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Scenario config (JSON). Defaults to scenario.json in the config dir.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the full JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a per-month CSV time series here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub report: ReportArgs,
    /// Override monte_carlo.master_seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override monte_carlo.num_paths (at least 1).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub paths: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Shape {
    Linear,
    Exponential,
}

#[derive(Debug, Args)]
pub struct StressArgs {
    #[command(flatten)]
    pub report: ReportArgs,
    /// Total peak-to-trough drawdown, in [0, 1).
    #[arg(long, default_value_t = 0.70, value_parser = parse_drawdown)]
    pub drawdown: f64,
    /// Stress horizon in months; replaces treasury.horizon_months.
    #[arg(long, default_value_t = 24, value_parser = clap::value_parser!(u64).range(1..))]
    pub months: u64,
    /// Path shape.
    #[arg(long, value_enum, default_value_t = Shape::Linear)]
    pub shape: Shape,
}

#[derive(Debug, Args)]
pub struct MnavArgs {
    /// Holdings CSV: ticker,btc_held,mkt_cap_usd,shares_outstanding.
    #[arg(long)]
    pub holdings: PathBuf,
    /// BTC price in USD.
    #[arg(long, value_parser = parse_positive)]
    pub price: f64,
    /// Also write the table as CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RouteArgs {
    /// Channel graph (JSON).
    #[arg(long)]
    pub graph: PathBuf,
    /// Sending node id
    #[arg(long)]
    pub from: String,
    /// Receiving node id
    #[arg(long)]
    pub to: String,
    /// Amount to deliver, in sats.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub amount_sats: u64,
    /// Reject routes whose total fee exceeds this many sats.
    #[arg(long)]
    pub max_fee_sats: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CorrArgs {
    /// First date,price CSV.
    #[arg(long)]
    pub a: PathBuf,
    /// Second date,price CSV.
    #[arg(long)]
    pub b: PathBuf,
    /// Correlate simple returns instead of levels.
    #[arg(long)]
    pub returns: bool,
}

fn parse_drawdown(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("drawdown must lie in [0, 1), got {v}"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        if e.is_config() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

type Outcome = Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    let dir = cli.config_dir.as_deref();
    let result = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a, dir, out),
        Command::Stress(a) => cmd_stress(a, dir, out),
        Command::Mnav(a) => cmd_mnav(a, out),
        Command::Route(a) => cmd_route(a, out),
        Command::Corr(a) => cmd_corr(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Domain(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_DOMAIN
        }
    }
}

fn config_path(report: &ReportArgs, dir: Option<&Path>) -> Result<PathBuf, Failure> {
    match (&report.config, dir) {
        (Some(p), Some(d)) if p.is_relative() => Ok(d.join(p)),
        (Some(p), _) => Ok(p.clone()),
        (None, Some(d)) => Ok(d.join("scenario.json")),
        (None, None) => Err(Failure::Usage("--config is required when SATRAIL_CONFIG_DIR is unset".into())),
    }
}

fn load_config(report: &ReportArgs, dir: Option<&Path>) -> Result<(ScenarioConfig, PathBuf), Failure> {
    let path = config_path(report, dir)?;
    let config = ScenarioConfig::load(&path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((config, base))
}

fn emit(report: &ScenarioReport, args: &ReportArgs, out: &mut dyn Write) -> Outcome {
    if let Some(path) = &args.out {
        std::fs::write(path, report.to_json() + "\n")
            .map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = &args.csv {
        let file = std::fs::File::create(path).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
        write_month_csv(report, file)?;
    }
    let _ = writeln!(
        out,
        "survival_probability={:.6} surviving={}/{} mean_coverage={} hash={}",
        report.survival_probability,
        report.surviving_paths,
        report.num_paths,
        report.coverage_label(),
        report.reconciliation_hash
    );
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs, dir: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let (mut config, base) = load_config(&args.report, dir)?;
    if let Some(seed) = args.seed {
        config.monte_carlo.master_seed = seed;
    }
    if let Some(paths) = args.paths {
        config.monte_carlo.num_paths = paths as usize;
    }
    let scenario = config.resolve(&base)?;
    let report = run_scenario(&scenario)?;
    emit(&report, &args.report, out)
}

fn cmd_stress(args: &StressArgs, dir: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let (mut config, base) = load_config(&args.report, dir)?;
    config.market.model = MarketModel::Stress {
        kind: match args.shape {
            Shape::Linear => StressKind::Linear,
            Shape::Exponential => StressKind::Exponential,
        },
        total_drawdown: args.drawdown,
    };
    config.treasury.horizon_months = args.months as usize;
    config.monte_carlo.num_paths = 1;
    let scenario: Scenario = config.resolve(&base)?;
    let report = run_scenario(&scenario)?;
    emit(&report, &args.report, out)
}

fn cmd_mnav(args: &MnavArgs, out: &mut dyn Write) -> Outcome {
    let mut rows = load_holdings_csv(&args.holdings).map_err(|e| Failure::Domain(e.to_string()))?;
    let price_cents = (args.price * 100.0).round() as i64;
    rows.sort_by(|a, b| b.btc_held.total_cmp(&a.btc_held).then_with(|| a.ticker.cmp(&b.ticker)));

    let mut table = Vec::with_capacity(rows.len());
    for r in &rows {
        let mnav = r.mnav(price_cents).map_err(|e| Failure::Domain(format!("{}: {e}", r.ticker)))?;
        let per_share = r.btc_per_share().transpose().map_err(|e| Failure::Domain(format!("{}: {e}", r.ticker)))?;
        table.push((r, mnav, per_share));
    }
    let _ = writeln!(
        out,
        "{:<8} {:>12} {:>16} {:>12} {:>14}",
        "ticker", "btc_held", "mkt_cap_usd_m", "mnav", "btc_per_share"
    );
    for (r, mnav, per_share) in &table {
        let _ = writeln!(
            out,
            "{:<8} {:>12} {:>16.0} {:>12.3} {:>14}",
            r.ticker,
            r.btc_held,
            r.mkt_cap_cents as f64 / 100.0 / 1e6,
            mnav,
            per_share.map_or_else(|| "-".to_string(), |v| format!("{v:.8}"))
        );
    }
    if let Some(path) = &args.csv {
        let io = |e: csv::Error| Failure::Domain(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(["ticker", "btc_held", "mkt_cap_usd", "mnav", "btc_per_share"]).map_err(io)?;
        for (r, mnav, per_share) in &table {
            w.write_record([
                r.ticker.clone(),
                r.btc_held.to_string(),
                format!("{}.{:02}", r.mkt_cap_cents / 100, r.mkt_cap_cents % 100),
                format!("{mnav:.6}"),
                per_share.map_or_else(String::new, |v| format!("{v:.8}")),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Failure::Domain(e.to_string()))?;
    }
    let _ = writeln!(out, "{} rows at ${:.2}/BTC", table.len(), args.price);
    Ok(())
}

fn cmd_route(args: &RouteArgs, out: &mut dyn Write) -> Outcome {
    let text =
        std::fs::read_to_string(&args.graph).map_err(|e| Failure::Usage(format!("{}: {e}", args.graph.display())))?;
    let graph = ChannelGraph::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", args.graph.display())))?;
    let (src, dst) = (NodeId::from(args.from.as_str()), NodeId::from(args.to.as_str()));
    for n in [&src, &dst] {
        if !graph.contains_node(n) {
            return Err(Failure::Usage(format!("unknown node `{n}`")));
        }
    }
    let amount = args
        .amount_sats
        .checked_mul(MSAT_PER_SAT)
        .ok_or_else(|| Failure::Usage("--amount-sats is too large".into()))?;
    let cap = match args.max_fee_sats {
        Some(s) => {
            Some(s.checked_mul(MSAT_PER_SAT).ok_or_else(|| Failure::Usage("--max-fee-sats is too large".into()))?)
        }
        None => None,
    };
    match find_route(&graph, &src, &dst, amount, cap, &ExcludedHops::new()) {
        Ok(route) => {
            for (i, hop) in route.hops.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  {} -> {} via {} carrying {} msat, fee {} msat",
                    hop.from, hop.to, hop.channel, route.amounts_msat[i], route.fees_msat[i]
                );
            }
            let n = route.hops.len();
            let _ = writeln!(out, "{n} hop{}, fee {} msat", if n == 1 { "" } else { "s" }, route.total_fee_msat);
            Ok(())
        }
        Err(LightningError::NoRoute) => {
            let _ = writeln!(out, "no route");
            Err(Failure::Domain("no route".into()))
        }
        Err(e @ LightningError::FeeCapExceeded { .. }) => {
            let _ = writeln!(out, "no route");
            Err(Failure::Domain(e.to_string()))
        }
        Err(e @ (LightningError::SameEndpoints | LightningError::UnknownNode(_))) => Err(Failure::Usage(e.to_string())),
        Err(e) => Err(Failure::Domain(e.to_string())),
    }
}

fn cmd_corr(args: &CorrArgs, out: &mut dyn Write) -> Outcome {
    let a = load_price_csv::<f64>(&args.a).map_err(|e| Failure::Domain(format!("{}: {e}", args.a.display())))?;
    let b = load_price_csv::<f64>(&args.b).map_err(|e| Failure::Domain(format!("{}: {e}", args.b.display())))?;
    let (dates, xs, ys) = inner_join(&a, &b);
    if dates.is_empty() {
        return Err(Failure::Domain("the two series share no dates".into()));
    }
    let basis = if args.returns { CorrelationBasis::Returns } else { CorrelationBasis::Levels };
    let r = correlate(&xs, &ys, basis).map_err(|e| Failure::Domain(e.to_string()))?;
    let _ = writeln!(out, "{r:.5}");
    Ok(())
}
