//! `spaghetti`: builds the fractal sample space, audits it, evaluates the
//! closed forms, runs Monte Carlo estimates and renders SVG figures.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use spaghetti_core::fractal::DEFAULT_LEVEL_CAP;
use spaghetti_core::montecarlo::estimate_probability;
use spaghetti_core::probability::{classical_probability, delta_table_csv, probability_report};
use spaghetti_core::{
    render_svg, FractalApprox, Mode, PolicyRegistry, Predicate, RenderStyle, SamplerRegistry,
};

#[derive(Parser, Debug)]
#[command(
    name = "spaghetti",
    version,
    about = "Exact and simulated answers to the broken-stick triangle problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit the level-n approximation: kept pieces, residual and policy choices.
    Build {
        #[command(flatten)]
        common: Common,
        /// Output format.
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
    },
    /// Emit the conservation and limit audit of the approximation.
    Audit {
        #[command(flatten)]
        common: Common,
        /// Output format.
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
    },
    /// Emit the probability closed forms with the delta table.
    Prob {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        table: TableArgs,
        /// Output format; csv emits the delta table only.
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
    },
    /// Estimate the probability of an event by sampling.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Sampler name: physical or fractal.
        #[arg(long, default_value = "physical", value_parser = parse_sampler)]
        sampler: String,
        /// Event: triangle, delta=<p/q> or band=<p/q>,<p/q>.
        #[arg(long, default_value = "triangle", value_parser = parse_predicate)]
        predicate: Predicate,
        /// Number of samples.
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; the result depends on this and the seed only.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=256))]
        threads: u64,
    },
    /// Emit the delta table as CSV.
    Delta {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Draw the approximation as SVG.
    Render {
        #[command(flatten)]
        common: Common,
        /// Also draw the residual triangle.
        #[arg(long)]
        show_residual: bool,
        /// Label each piece with its level.
        #[arg(long)]
        show_labels: bool,
        /// Image width in pixels.
        #[arg(long, default_value_t = 800, value_parser = clap::value_parser!(u32).range(64..))]
        width: u32,
        /// Image height in pixels.
        #[arg(long, default_value_t = 720, value_parser = clap::value_parser!(u32).range(64..))]
        height: u32,
        /// Comma-separated fill colours, cycled by level.
        #[arg(long, value_delimiter = ',')]
        palette: Vec<String>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Construction depth n.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(0..=DEFAULT_LEVEL_CAP as i64))]
    level: u32,
    /// Deletion policy, `name` or `name:args` (default, mirror, rotate, pattern:<apexes>/<halves>).
    #[arg(long, default_value = "default", value_parser = parse_policy)]
    policy: String,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// Which closed forms to evaluate.
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    mode: ModeArg,
    /// Rows of the delta table; defaults to the level.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=DEFAULT_LEVEL_CAP as i64))]
    depth: Option<u32>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Paper,
    Measured,
    Both,
}

impl ModeArg {
    fn modes(self) -> &'static [Mode] {
        match self {
            ModeArg::Paper => &[Mode::Paper],
            ModeArg::Measured => &[Mode::Measured],
            ModeArg::Both => &Mode::ALL,
        }
    }
}

fn parse_policy(s: &str) -> Result<String, String> {
    PolicyRegistry::builtin()
        .resolve(s)
        .map(|_| s.to_string())
        .map_err(|e| e.to_string())
}

fn parse_sampler(s: &str) -> Result<String, String> {
    let reg = SamplerRegistry::builtin();
    if reg.names().any(|n| n == s) {
        Ok(s.to_string())
    } else {
        let known: Vec<_> = reg.names().collect();
        Err(format!(
            "unknown sampler {s:?}; known: {}",
            known.join(", ")
        ))
    }
}

fn parse_predicate(s: &str) -> Result<Predicate, String> {
    s.parse().map_err(|e: spaghetti_core::Error| e.to_string())
}

fn build(level: u32, policy: &str) -> anyhow::Result<FractalApprox> {
    let policy = PolicyRegistry::builtin().resolve(policy)?;
    Ok(FractalApprox::build(level, policy)?)
}

fn pretty(v: &Value) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn probability_json(approx: &FractalApprox, table: &TableArgs) -> anyhow::Result<(Value, String)> {
    let depth = table.depth.unwrap_or(approx.level()).max(1);
    let reports = table
        .mode
        .modes()
        .iter()
        .map(|&m| probability_report(m, depth, approx))
        .collect::<Result<Vec<_>, _>>()?;
    let doc = json!({
        "classical_probability": classical_probability(),
        "reports": reports.iter().map(|r| r.to_json_value()).collect::<Vec<_>>(),
    });
    Ok((doc, delta_table_csv(&reports)?))
}

/// The approximation deep enough for a delta table of the requested depth.
fn table_approx(common: &Common, table: &TableArgs) -> anyhow::Result<FractalApprox> {
    let level = common.level.max(table.depth.unwrap_or(1));
    build(level, &common.policy)
}

fn run(cli: Cli) -> anyhow::Result<(String, Option<PathBuf>)> {
    Ok(match cli.command {
        Command::Build { common, format } => {
            let a = build(common.level, &common.policy)?;
            let text = match format {
                TableFormat::Json => pretty(&a.to_json_value())?,
                TableFormat::Csv => a.to_csv()?,
            };
            (text, common.out)
        }
        Command::Audit { common, format } => {
            let report = build(common.level, &common.policy)?.audit()?;
            let text = match format {
                TableFormat::Json => pretty(&report.to_json_value())?,
                TableFormat::Csv => report.to_csv()?,
            };
            (text, common.out)
        }
        Command::Prob {
            common,
            table,
            format,
        } => {
            let a = table_approx(&common, &table)?;
            let (doc, csv) = probability_json(&a, &table)?;
            let text = match format {
                TableFormat::Json => pretty(&doc)?,
                TableFormat::Csv => csv,
            };
            (text, common.out)
        }
        Command::Delta { common, table } => {
            let a = table_approx(&common, &table)?;
            (probability_json(&a, &table)?.1, common.out)
        }
        Command::Simulate {
            common,
            sampler,
            predicate,
            n,
            seed,
            threads,
        } => {
            let approx = match sampler.as_str() {
                "physical" => None,
                _ => Some(build(common.level, &common.policy)?),
            };
            let s = SamplerRegistry::builtin().create(&sampler, approx.as_ref())?;
            let estimate = estimate_probability(s.as_ref(), &predicate, n, seed, threads as usize)?;
            (pretty(&estimate.to_json_value())?, common.out)
        }
        Command::Render {
            common,
            show_residual,
            show_labels,
            width,
            height,
            palette,
        } => {
            let a = build(common.level, &common.policy)?;
            let style = RenderStyle {
                width_px: width,
                height_px: height,
                palette,
                show_residual,
                show_labels,
            };
            (render_svg(&a, &style)?, common.out)
        }
    })
}

fn emit(text: &str, out: Option<PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 0 for --help and 2 for usage errors
    let cli = Cli::parse();
    match run(cli).and_then(|(text, out)| emit(&text, out)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
