use clap::{Args, Parser, Subcommand};
use d2d_underlay::config::{preset, QuantityName, RunConfig, PRESETS};
use d2d_underlay::emit::{emit, Format};
use d2d_underlay::error::Error;
use d2d_underlay::mode_selection::linear_to_db;
use d2d_underlay::outage::{solve_xi_for_qos, QosSolution};
use d2d_underlay::simulator::dump_realizations;
use d2d_underlay::sweep::{resolve_point, run_point, run_sweep, Columns, MetricRecord};
use std::path::PathBuf;
use std::process::ExitCode;

/// Outage, throughput and spectrum reuse of underlay D2D links in a
/// single uplink cell.
#[derive(Parser)]
#[command(name = "d2d-underlay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML file with dotted keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Start from a built-in configuration (fig2a, fig2b, fig3, fig4, fig5).
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Override one key, e.g. `--set pathloss.alpha_c=3.5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    #[arg(long, default_value = "csv", global = true)]
    format: String,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo realizations.
    #[arg(long = "mc-runs", global = true)]
    mc_runs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate metrics at one parameter point.
    Eval {
        /// Metric to report; all of them when absent. Repeatable.
        #[arg(long = "quantity")]
        quantities: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the configured sweep.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Find the largest xi meeting a BS outage target.
    SolveXi {
        /// Target BS outage; defaults to `qos.target`.
        #[arg(long)]
        target: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo estimates over the configured sweep.
    Simulate {
        /// Also write the realizations of the configured point as JSON lines.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long = "dump-count", default_value_t = 10)]
        dump_count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Compare analytic and Monte Carlo values over the configured sweep.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// List the built-in configurations.
    Presets,
}

enum Failure {
    Usage(String),
    Model(Error),
    NoValues,
    Validation(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) | Error::Io(_) => Failure::Usage(e.to_string()),
            e => Failure::Model(e),
        }
    }
}

fn load(c: &Common) -> Result<(RunConfig, Format), Failure> {
    let mut run = match &c.preset {
        Some(name) => preset(name)?,
        None => RunConfig::default(),
    };
    if let Some(path) = &c.config {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        run.merge_toml(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    for s in &c.set {
        run.set_str(s)?;
    }
    if let Some(seed) = c.seed {
        run.mc_seed = seed;
    }
    if let Some(n) = c.mc_runs {
        run.mc_runs = n;
    }
    run.network()?;
    Ok((run, c.format.parse()?))
}

/// Emit `records`, failing when none of them carries a value.
fn finish(records: &[MetricRecord], format: Format, out: Option<&std::path::Path>) -> Result<(), Failure> {
    emit(records, format, out)?;
    if records.iter().all(|r| r.analytic.is_none() && r.mc_mean.is_none()) {
        return Err(Failure::NoValues);
    }
    Ok(())
}

fn parse_quantities(names: &[String]) -> Result<Vec<QuantityName>, Failure> {
    if names.is_empty() {
        return Ok(QuantityName::ALL.to_vec());
    }
    Ok(names.iter().map(|n| n.parse()).collect::<Result<_, _>>()?)
}

/// Allowed gap between analytic and simulated values.
fn tolerance(quantity: &str, analytic: f64) -> f64 {
    match quantity {
        "outage_bs" | "p_d2d" => 0.005,
        "outage_drx" => 0.01,
        "m_bar_d2d" => 0.01 * analytic.abs(),
        _ => 0.03 * analytic.abs(),
    }
}

fn validate(records: &[MetricRecord]) -> usize {
    let mut failed = 0;
    for r in records {
        let verdict = match (r.analytic, r.mc_mean) {
            (Some(a), Some(m)) => {
                let tol = tolerance(&r.quantity, a);
                let ok = (a - m).abs() <= tol;
                eprintln!(
                    "{} {} {}={} analytic {a:.6e} mc {m:.6e} tol {tol:.3e}",
                    if ok { "PASS" } else { "FAIL" },
                    r.quantity,
                    r.parameter,
                    r.value
                );
                ok
            }
            _ => {
                eprintln!("FAIL {} {}={}: {}", r.quantity, r.parameter, r.value, r.error.as_deref().unwrap_or("missing value"));
                false
            }
        };
        failed += usize::from(!verdict);
    }
    failed
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Presets => {
            for (name, text) in PRESETS {
                let summary: Vec<&str> = text
                    .lines()
                    .map_while(|l| l.strip_prefix("# "))
                    .take_while(|l| !l.starts_with("Variants"))
                    .collect();
                println!("{name:6} {}", summary.join(" "));
            }
            Ok(())
        }
        Command::Eval { quantities, common } => {
            let (run, format) = load(&common)?;
            let records = run_point(&run, &parse_quantities(&quantities)?, Columns::Both)?;
            finish(&records, format, common.out.as_deref())
        }
        Command::Sweep { common } => {
            let (run, format) = load(&common)?;
            let records = run_sweep(&run.sweep_spec(), &run, Columns::Both)?;
            finish(&records, format, common.out.as_deref())
        }
        Command::SolveXi { target, common } => {
            let (mut run, format) = load(&common)?;
            let target = target
                .or(run.qos_target)
                .ok_or_else(|| Failure::Usage("no target: pass --target or set qos.target".into()))?;
            let network = run.network()?;
            match solve_xi_for_qos(target, run.gamma(), &network, &run.fading())? {
                QosSolution::Solved { xi, outage, iterations } => eprintln!(
                    "solved: xi = {xi:.8e} W ({:.6} dB above rho_d), outage {outage:.8e} after {iterations} steps",
                    linear_to_db(xi / network.mode.rho_d)
                ),
                QosSolution::Saturated { outage_at_max } => {
                    eprintln!("saturated: outage {outage_at_max:.8e} stays below the target with every user admitted")
                }
            }
            run.qos_target = Some(target);
            let records = run_point(&run, &[QuantityName::OutageBs], Columns::AnalyticOnly)?;
            Ok(emit(&records, format, common.out.as_deref())?)
        }
        Command::Simulate { dump, dump_count, common } => {
            let (run, format) = load(&common)?;
            if run.mc_runs == 0 {
                return Err(Failure::Usage("simulate needs --mc-runs or mc.runs".into()));
            }
            if let Some(path) = dump {
                let point = resolve_point(&run, run.qos_target)?;
                let file = std::fs::File::create(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                let mut out = std::io::BufWriter::new(file);
                dump_realizations(&mut out, &point.network, &run.sim_options(), dump_count, run.mc_seed)?;
            }
            let records = run_sweep(&run.sweep_spec(), &run, Columns::MonteCarloOnly)?;
            finish(&records, format, common.out.as_deref())
        }
        Command::Validate { common } => {
            let (mut run, format) = load(&common)?;
            if run.mc_runs == 0 {
                run.mc_runs = 10_000;
            }
            let records = run_sweep(&run.sweep_spec(), &run, Columns::Both)?;
            emit(&records, format, common.out.as_deref())?;
            match validate(&records) {
                0 => Ok(()),
                n => Err(Failure::Validation(n)),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Model(e)) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(2)
        }
        Err(Failure::NoValues) => {
            eprintln!("numerical failure: every requested value failed");
            ExitCode::from(2)
        }
        Err(Failure::Validation(n)) => {
            eprintln!("{n} comparison(s) outside tolerance");
            ExitCode::from(3)
        }
    }
}
