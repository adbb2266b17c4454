//! `hsp`: JSON front end to the library.
//!
//! Exit codes: 0 success, 1 domain error, 2 internal theory violation,
//! 64 malformed arguments.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use semidirect_hsp::decomposition;
use semidirect_hsp::experiments;
use semidirect_hsp::oracle::{self, HidingFunction};
use semidirect_hsp::qsim;
use semidirect_hsp::subgroups::{self, SubgroupDesc};
use semidirect_hsp::{Element, Error, GroupSpec, Result};

const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "hsp", version, about = "Hidden subgroups of Z_N x| Z_p")]
struct Cli {
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long = "N")]
    n: u64,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    phi11: u64,
}

impl SpecArgs {
    fn spec(&self) -> Result<GroupSpec> {
        GroupSpec::new(self.n, self.p, self.phi11)
    }
}

#[derive(Args)]
struct RunArgs {
    /// `C(t,s)`, `T(t,s,h)`, `Y(t)`, `E{(a,b),...}` or generators `<(a,b),...>`.
    #[arg(long)]
    hidden: String,
    /// Sampling rounds per batch.
    #[arg(long, default_value_t = qsim::DEFAULT_ROUNDS as u32)]
    k: u32,
    #[arg(long, env = "HSP_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// List every subgroup of Z_{2^t0 p^r} x| Z_p with the canonical twist.
    EnumerateSubgroups {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        t0: u32,
    },
    /// Hide a subgroup behind an oracle and recover it.
    SolveHsp {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Check f against f(e) on the recovered generators.
        #[arg(long)]
        verify: bool,
        /// Scramble oracle labels with this key.
        #[arg(long)]
        permute_labels: Option<u64>,
    },
    /// Repeat the solver and compare its success rate with the bound.
    EstimateSuccess {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = experiments::DEFAULT_TRIALS)]
        trials: u64,
        /// Record wall-clock time (makes output run-dependent).
        #[arg(long)]
        timing: bool,
        /// Emit a CSV header and row instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Split Z_N x| Z_p into Z_M0 x (Z_{p^r} x| Z_p).
    Decompose {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Exact law of one sampling round as [c, d, probability] triples.
    Distribution {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        t0: u32,
        #[arg(long)]
        t: u32,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        hidden: String,
    },
}

fn parse_hidden(text: &str, spec: &GroupSpec) -> Result<SubgroupDesc> {
    let text = text.trim();
    let desc = if let Some(body) = text.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        let gens = body
            .split_terminator("),")
            .map(|g| {
                let g = g.trim();
                let g = if g.ends_with(')') { g.to_string() } else { format!("{g})") };
                g.parse::<Element>()
            })
            .collect::<Result<Vec<_>>>()?;
        for &g in &gens {
            spec.element(g.a, g.b)?;
        }
        SubgroupDesc::ExplicitSet(subgroups::closure(&gens, spec)?)
    } else {
        text.parse::<SubgroupDesc>()?
    };
    desc.validate(spec)?;
    Ok(desc)
}

fn emit<T: Serialize>(value: &T, pretty: bool) -> Result<()> {
    let out = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .map_err(|e| Error::Parse(e.to_string()))?;
    println!("{out}");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let pretty = cli.pretty;
    match cli.command {
        Command::EnumerateSubgroups { p, r, t0 } => {
            let spec = GroupSpec::canonical(p, r, t0)?;
            let list = subgroups::enumerate_subgroups(&spec)?;
            let rows = list
                .iter()
                .map(|d| Ok(json!({ "desc": d, "order": d.order(&spec)? })))
                .collect::<Result<Vec<_>>>()?;
            emit(&json!({ "spec": spec, "count": list.len(), "subgroups": rows }), pretty)
        }
        Command::SolveHsp {
            spec,
            run,
            verify,
            permute_labels,
        } => {
            let spec = spec.spec()?;
            let hidden = parse_hidden(&run.hidden, &spec)?;
            let oracle: Box<dyn HidingFunction> = match permute_labels {
                Some(key) => Box::new(oracle::make_permuted_oracle(&spec, &hidden, key)?),
                None => Box::new(oracle::make_oracle(&spec, &hidden)?),
            };
            let mut rng = qsim::derive_rng(run.seed, 0);
            let solution = qsim::solve_general(&spec, oracle.as_ref(), run.k as usize, &mut rng, verify)?;
            let found = solution.elements(&spec)?;
            let truth: BTreeSet<Element> = hidden.elements(&spec)?.into_iter().collect();
            let recovered = subgroups::classify(&found, &spec);
            emit(
                &json!({
                    "spec": spec,
                    "hidden": hidden,
                    "k": run.k,
                    "seed": run.seed,
                    "solution": solution,
                    "recovered": recovered,
                    "order": found.len(),
                    "correct": found == truth,
                    "queries": oracle.query_count(),
                }),
                pretty,
            )
        }
        Command::EstimateSuccess {
            spec,
            run,
            trials,
            timing,
            csv,
        } => {
            let spec = spec.spec()?;
            let hidden = parse_hidden(&run.hidden, &spec)?;
            let start = Instant::now();
            let mut report = experiments::estimate_success(&spec, &hidden, run.k, trials, run.seed)?;
            if timing {
                report.wall_clock_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            if csv {
                println!("{}\n{}", experiments::ExperimentReport::CSV_HEADER, report.csv_row());
                Ok(())
            } else {
                emit(&report, pretty)
            }
        }
        Command::Decompose { spec } => {
            let spec = spec.spec()?;
            emit(&decomposition::decompose(&spec)?, pretty)
        }
        Command::Distribution {
            p,
            r,
            t0,
            t,
            s,
            hidden,
        } => {
            let spec = GroupSpec::canonical(p, r, t0)?;
            let hidden = parse_hidden(&hidden, &spec)?;
            emit(&qsim::post_collapse_distribution(&spec, t, s, &hidden)?, pretty)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
