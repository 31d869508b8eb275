mod config;
mod geo;

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use arcplan::baseline::{build_fullstate, query_fullstate};
use arcplan::lsc::build_library;
use arcplan::map::{map_to_string, EnvKind};
use arcplan::planner::{
    load_plan, plan, save_plan, stats_csv_header, stats_csv_row, verify_plan_report, PlanMode, PlanRequest, PlanResult,
};
use arcplan::srs::{build_srs, load_srs, save_srs, ShapeRoadmap};
use arcplan::{ChainParams, OccupancyMap};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::config::ScenarioConfig;

#[derive(Parser)]
#[command(name = "arcplan", version, about = "Motion planning for chains of linked flying units")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// Scenario TOML file; built-in defaults when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an environment and write it as an ARCMAP file.
    GenMap {
        #[command(flatten)]
        config: ConfigArg,
        /// Generator to use instead of the scenario's.
        #[arg(long)]
        env: Option<EnvKind>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Sample the random-shape roadmap and write it as an ARCSRS file.
    SrsBuild {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        n_srs: Option<usize>,
        #[arg(long)]
        r_s: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Plan one query and write an ARCPLAN file.
    Plan {
        #[command(flatten)]
        config: ConfigArg,
        /// Roadmap seed; defaults to the first scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// both, lsc_only, srs_only or fullstate.
        #[arg(long)]
        mode: Option<String>,
        /// ARCSRS file, required by modes that use random shapes.
        #[arg(long)]
        srs: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
        /// Append the stats row to this CSV file.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Replay a plan against exact collision tests; exits 1 on any collision.
    Verify {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(short, long)]
        plan: PathBuf,
    },
    /// Run every (chain size, seed, mode) cell and write one stats CSV.
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        /// Comma-separated modes.
        #[arg(long)]
        modes: Option<String>,
        /// Seeds as a list or range, e.g. `1,2,5` or `1-10`.
        #[arg(long)]
        seeds: Option<String>,
        /// Comma-separated chain sizes.
        #[arg(long)]
        units: Option<String>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Write chain poses along a plan as OBJ polylines.
    ExportGeo {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(short, long)]
        plan: PathBuf,
        /// Interpolated poses between consecutive waypoints.
        #[arg(long, default_value_t = 0)]
        steps: usize,
        #[arg(short, long)]
        out: PathBuf,
    },
}

/// A problem with the invocation rather than with the run.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match configure_threads().and_then(|_| run(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

/// Caps the worker pool at `ARCPLAN_THREADS` when set.
fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("ARCPLAN_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("ARCPLAN_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

fn load_config(arg: &ConfigArg) -> Result<ScenarioConfig> {
    ScenarioConfig::load_or_default(arg.config.as_deref()).map_err(|e| usage(format!("{e:#}")))
}

fn parse_mode(s: &str) -> Result<PlanMode> {
    s.parse().map_err(|e| usage(format!("{e}")))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| usage(format!("bad {what} `{t}`"))))
        .collect()
}

fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = s.split_once('-') {
        let a: u64 = a.trim().parse().map_err(|_| usage(format!("bad seed range `{s}`")))?;
        let b: u64 = b.trim().parse().map_err(|_| usage(format!("bad seed range `{s}`")))?;
        if a > b {
            return Err(usage(format!("empty seed range `{s}`")));
        }
        return Ok((a..=b).collect());
    }
    parse_list(s, "seed")
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::GenMap { config, env, out } => {
            let mut cfg = load_config(&config)?;
            if let Some(kind) = env {
                cfg.map.file = None;
                cfg.map.generator = kind;
            }
            let map = cfg.load_map()?;
            write(&out, &map_to_string(&map, &cfg.echo()))?;
            log::info!("wrote {} ({} occupied voxels)", out.display(), map.occupied_count());
        }
        Command::SrsBuild { config, n_srs, r_s, seed, out } => {
            let mut cfg = load_config(&config)?;
            cfg.planner.n_srs = n_srs.unwrap_or(cfg.planner.n_srs);
            cfg.planner.r_s = r_s.unwrap_or(cfg.planner.r_s);
            cfg.planner.srs_seed = seed.unwrap_or(cfg.planner.srs_seed);
            let srs = build_srs(&cfg.chain, cfg.planner.n_srs, cfg.planner.r_s, cfg.planner.srs_seed)?;
            save_srs(&srs, &out, &cfg.echo())?;
            log::info!("wrote {} ({} shapes, {} edges)", out.display(), srs.len(), srs.graph.edge_count());
        }
        Command::Plan {
            config,
            seed,
            mode,
            srs,
            out,
            stats,
        } => {
            let mut cfg = load_config(&config)?;
            let mode = match mode {
                Some(m) => parse_mode(&m)?,
                None => cfg.mode()?,
            };
            cfg.planner.mode = mode.to_string();
            let seed = seed.or(cfg.run.seeds.first().copied()).unwrap_or(1);
            if srs.is_some() {
                cfg.planner.srs_file = srs;
            }
            let roadmap = match (&cfg.planner.srs_file, mode) {
                (Some(f), PlanMode::Both | PlanMode::SrsOnly) => Some(load_srs(f, cfg.chain.n_units)?),
                (None, PlanMode::Both | PlanMode::SrsOnly) => {
                    return Err(usage(format!(
                        "mode {mode} needs a shape roadmap: pass --srs FILE or set planner.srs_file"
                    )))
                }
                _ => None,
            };
            let map = cfg.load_map()?;
            let result = run_cell(&cfg, &map, &cfg.chain, mode, seed, roadmap.as_ref())?;
            let mut comments = cfg.echo();
            comments.push(format!("seed = {seed}"));
            save_plan(&result, &out, &comments)?;
            let row = stats_csv_row(seed, mode, cfg.chain.n_units, budget(&cfg, mode), srs_size(roadmap.as_ref(), mode), &result.stats);
            println!("{}\n{row}", stats_csv_header());
            if let Some(path) = stats {
                append_row(&path, &cfg, &row)?;
            }
            if !result.stats.success {
                log::warn!("no plan found");
            }
        }
        Command::Verify { config, plan } => {
            let cfg = load_config(&config)?;
            let result = load_plan(&plan)?;
            let map = cfg.load_map()?;
            let params = params_for(&cfg, &result)?;
            return Ok(match verify_plan_report(&result, &map, &params) {
                Ok(()) => {
                    println!("ok: {} waypoints verified", result.waypoints.len());
                    ExitCode::SUCCESS
                }
                Err(why) => {
                    println!("fail: {why}");
                    ExitCode::FAILURE
                }
            });
        }
        Command::Sweep {
            config,
            modes,
            seeds,
            units,
            out,
        } => {
            let cfg = load_config(&config)?;
            let modes: Vec<PlanMode> = match modes {
                Some(m) => m.split(',').map(|s| parse_mode(s.trim())).collect::<Result<_>>()?,
                None => cfg.run.modes.iter().map(|s| parse_mode(s)).collect::<Result<_>>()?,
            };
            let seeds = match seeds {
                Some(s) => parse_seeds(&s)?,
                None => cfg.run.seeds.clone(),
            };
            let units: Vec<usize> = match units {
                Some(u) => parse_list(&u, "chain size")?,
                None if cfg.run.units.is_empty() => vec![cfg.chain.n_units],
                None => cfg.run.units.clone(),
            };
            let text = sweep(&cfg, &modes, &seeds, &units)?;
            write(&out, &text)?;
            print!("{}", text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect::<String>());
        }
        Command::ExportGeo { config, plan, steps, out } => {
            let cfg = load_config(&config)?;
            let result = load_plan(&plan)?;
            let params = params_for(&cfg, &result)?;
            write(&out, &geo::plan_to_obj(&result, &params, steps, &cfg.echo())?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Chain parameters of the scenario, checked against the plan's chain size.
fn params_for(cfg: &ScenarioConfig, result: &PlanResult) -> Result<ChainParams> {
    let n = result.waypoints.first().map_or(cfg.chain.n_units, |w| w.config.shape.n_units());
    if n != cfg.chain.n_units {
        return Err(usage(format!(
            "plan has {n} units but the scenario chain has {}",
            cfg.chain.n_units
        )));
    }
    Ok(cfg.chain.clone())
}

fn budget(cfg: &ScenarioConfig, mode: PlanMode) -> usize {
    if mode == PlanMode::FullState {
        cfg.baseline.m_f
    } else {
        cfg.planner.m_v
    }
}

fn srs_size(srs: Option<&ShapeRoadmap>, mode: PlanMode) -> usize {
    match mode {
        PlanMode::Both | PlanMode::SrsOnly => srs.map_or(0, ShapeRoadmap::len),
        _ => 0,
    }
}

fn run_cell(
    cfg: &ScenarioConfig,
    map: &OccupancyMap,
    params: &ChainParams,
    mode: PlanMode,
    seed: u64,
    srs: Option<&ShapeRoadmap>,
) -> Result<PlanResult> {
    let start = cfg.start(params);
    if mode == PlanMode::FullState {
        let mut rm = build_fullstate(map, params, &cfg.fullstate_config(seed))?;
        return Ok(query_fullstate(&mut rm, map, params, &start, &cfg.goal(), cfg.task.goal_radius)?);
    }
    let library = build_library(params);
    Ok(plan(PlanRequest {
        map,
        params: params.clone(),
        start,
        goal: cfg.goal(),
        goal_radius: cfg.task.goal_radius,
        config: cfg.planner_config(mode, seed),
        library: &library,
        srs,
        roadmap: None,
    })?)
}

fn sweep(cfg: &ScenarioConfig, modes: &[PlanMode], seeds: &[u64], units: &[usize]) -> Result<String> {
    let map = cfg.load_map()?;
    let mut out = String::new();
    for line in cfg.echo() {
        out.push_str(&format!("# {line}\n"));
    }
    out.push_str(stats_csv_header());
    out.push('\n');
    for &n in units {
        let params = ChainParams {
            n_units: n,
            ..cfg.chain.clone()
        };
        params.validate()?;
        let needs_srs = modes.iter().any(|m| matches!(m, PlanMode::Both | PlanMode::SrsOnly));
        let srs = if !needs_srs {
            None
        } else {
            match &cfg.planner.srs_file {
                Some(f) if n == cfg.chain.n_units => Some(load_srs(f, n)?),
                _ => Some(build_srs(&params, cfg.planner.n_srs, cfg.planner.r_s, cfg.planner.srs_seed)?),
            }
        };
        let cells: Vec<(u64, PlanMode)> = seeds.iter().flat_map(|&s| modes.iter().map(move |&m| (s, m))).collect();
        let rows: Vec<String> = cells
            .par_iter()
            .map(|&(seed, mode)| {
                let r = run_cell(cfg, &map, &params, mode, seed, srs.as_ref())?;
                Ok(stats_csv_row(seed, mode, n, budget(cfg, mode), srs_size(srs.as_ref(), mode), &r.stats))
            })
            .collect::<Result<_>>()?;
        for row in rows {
            out.push_str(&row);
            out.push('\n');
        }
    }
    Ok(out)
}

fn append_row(path: &Path, cfg: &ScenarioConfig, row: &str) -> Result<()> {
    let fresh = !path.exists();
    let mut f = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    if fresh {
        for line in cfg.echo() {
            writeln!(f, "# {line}")?;
        }
        writeln!(f, "{}", stats_csv_header())?;
    }
    writeln!(f, "{row}")?;
    Ok(())
}
