use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use telic_core::barriers::{
    cardinality_gap, check_reduction_family, check_semiconjugacy, check_small_preimage, fixedpoint_report,
    level1_witness, perturb_witness, search_reduction_level, EtaTable, Level, Phi, ReductionSetup,
};
use telic_core::bssvm::{doubling_program, precision_checker_program, run, BssProgram};
use telic_core::dynamics::{periodic_points, preimages, MapSpec, PeriodicPoints};
use telic_core::exact::{Dyadic, Quad};
use telic_core::solvers::{solve_all, solve_brute, solve_count, solve_order};
use telic_core::telic::{verify_certificate, BoundedParams, Mode, TelicInstance};
use telic_core::{Budget, Error};

mod emit;

use emit::Format;

#[derive(Parser, Debug)]
#[command(name = "telic", version, about = "Exact telic problems over interval dynamical systems")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    emit: Format,
    /// Largest grid exponent any enumeration may touch.
    #[arg(long, env = "TELIC_MAX_GRID_BITS", default_value_t = 22, global = true)]
    max_grid_bits: u32,
    /// Worker threads for enumerations (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide or search an instance.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "brute")]
        solver: Solver,
    },
    /// Check one certificate against an instance.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        certificate: String,
    },
    /// List every witness of an instance.
    Enumerate {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Exhaustive checks of the preimage and perturbation lemmas.
    Lemma(LemmaArgs),
    /// Cardinality gaps, level-1 witnesses and semiconjugacy checks.
    Barrier(BarrierArgs),
    /// Per-n facts about the bounded rotation problem.
    Fixedpoint {
        #[arg(long, default_value_t = 10)]
        n_max: u32,
        /// Rotation number; defaults to √2 − 1.
        #[arg(long, allow_hyphen_values = true)]
        kappa: Option<Quad>,
    },
    /// Exact periodic points of a map.
    Periodic {
        #[arg(long, value_parser = parse_map)]
        map: MapSpec,
        #[arg(long)]
        n: u32,
    },
    /// Check a reduction table at a level, or search for feasible entries.
    ReductionCheck(ReductionArgs),
    /// Run a BSS program.
    BssRun {
        /// A program JSON file, or `builtin:doubling` / `builtin:precision-checker`.
        #[arg(long)]
        program: String,
        /// Input registers, in order.
        #[arg(long = "input", allow_hyphen_values = true)]
        inputs: Vec<Quad>,
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Solver {
    Brute,
    Order,
    Count,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LemmaName {
    SmallPreimage,
    Perturb,
    Preimages,
}

#[derive(Args, Debug)]
struct LemmaArgs {
    #[arg(long, value_enum)]
    name: LemmaName,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value_t = 2)]
    m: u32,
    /// Base point for `perturb`.
    #[arg(long, default_value = "0")]
    s: Dyadic,
    /// Target point for `preimages`.
    #[arg(long, allow_hyphen_values = true)]
    y: Option<Quad>,
    #[arg(long, value_parser = parse_map, default_value = "alpha")]
    homeo: MapSpec,
    /// Map for `preimages`.
    #[arg(long, value_parser = parse_map, default_value = "doubling")]
    map: MapSpec,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BarrierName {
    CardinalityGap,
    Level1Witness,
    Semiconjugacy,
}

#[derive(Args, Debug)]
struct BarrierArgs {
    #[arg(long, value_enum)]
    name: BarrierName,
    #[arg(long, value_parser = parse_map)]
    from: MapSpec,
    #[arg(long, value_parser = parse_map)]
    to: MapSpec,
    #[arg(long, value_parser = parse_map, default_value = "identity")]
    from_homeo: MapSpec,
    #[arg(long, value_parser = parse_map, default_value = "identity")]
    to_homeo: MapSpec,
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// Finest grid for `level1-witness`.
    #[arg(long, default_value_t = 4)]
    r: u32,
    /// Semiconjugacy candidate JSON.
    #[arg(long)]
    phi: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    periods: Vec<u32>,
}

#[derive(Args, Debug)]
struct ReductionArgs {
    /// Reduction table JSON; not needed with `--search`.
    #[arg(long)]
    eta: Option<PathBuf>,
    #[arg(long)]
    level: Level,
    #[arg(long)]
    n: u32,
    /// Use the bounded rotation setup instead of `--from`/`--to`.
    #[arg(long)]
    bounded: bool,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<Quad>,
    #[arg(long, value_parser = parse_map, default_value = "identity")]
    from: MapSpec,
    #[arg(long, value_parser = parse_map, default_value = "identity")]
    from_homeo: MapSpec,
    #[arg(long, value_parser = parse_map, default_value = "identity")]
    to: MapSpec,
    #[arg(long, value_parser = parse_map, default_value = "identity")]
    to_homeo: MapSpec,
    /// Search every candidate on this grid instead of checking a table.
    #[arg(long)]
    search: Option<u32>,
}

/// A map by name (`tent`, `rotation`, `rotation:<kappa>`, ...) or `@file.json`.
fn parse_map(s: &str) -> Result<MapSpec, String> {
    if let Some(path) = s.strip_prefix('@') {
        return read_json(Path::new(path)).map_err(|e| e.message);
    }
    if let Some(kappa) = s.strip_prefix("rotation:") {
        return kappa
            .parse::<Quad>()
            .map(MapSpec::rotation)
            .map_err(|e| format!("kappa: {e}"));
    }
    MapSpec::from_name(s).ok_or_else(|| format!("unknown map `{s}`"))
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_resource() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(report: &T) -> Value {
    serde_json::to_value(report).expect("reports serialize")
}

/// The report and whether it carries a "no" decision.
fn execute(cli: &Cli) -> Result<(Value, bool), Failure> {
    let budget = Budget::new(cli.max_grid_bits);
    let report = match &cli.command {
        Command::Solve { instance, solver } => {
            let inst: TelicInstance = read_json(instance)?;
            let rep = match solver {
                Solver::Brute => solve_brute(&inst, &budget)?,
                Solver::Order => solve_order(&inst)?,
                Solver::Count => solve_count(&inst, &budget)?,
            };
            let no = inst.mode == Mode::Decision && !rep.decision;
            return Ok((to_value(&rep), no));
        }
        Command::Verify { instance, certificate } => {
            let inst: TelicInstance = read_json(instance)?;
            let s: Quad = certificate.parse().map_err(|e| usage(format!("certificate: {e}")))?;
            json!({"certificate": s, "valid": verify_certificate(&inst, &s)})
        }
        Command::Enumerate { instance } => {
            let inst: TelicInstance = read_json(instance)?;
            let all = solve_all(&inst, &budget)?;
            json!({"count": all.len(), "witnesses": all})
        }
        Command::Lemma(a) => lemma(a, &budget)?,
        Command::Barrier(a) => barrier(a, &budget)?,
        Command::Fixedpoint { n_max, kappa } => {
            let params = match kappa {
                Some(k) => BoundedParams::new(k.clone())?,
                None => BoundedParams::default(),
            };
            to_value(&fixedpoint_report(*n_max, &params))
        }
        Command::Periodic { map, n } => match periodic_points(map, *n)? {
            PeriodicPoints::All => json!({"map": map.to_string(), "n": n, "all": true, "points": []}),
            PeriodicPoints::Finite(pts) => {
                json!({"map": map.to_string(), "n": n, "all": false, "count": pts.len(), "points": pts})
            }
        },
        Command::ReductionCheck(a) => reduction(a, &budget)?,
        Command::BssRun { program, inputs, fuel } => {
            let prog: BssProgram = match program.as_str() {
                "builtin:doubling" => doubling_program(),
                "builtin:precision-checker" => precision_checker_program(),
                path => read_json(Path::new(path))?,
            };
            to_value(&run(&prog, inputs, *fuel)?)
        }
    };
    Ok((report, false))
}

fn lemma(a: &LemmaArgs, budget: &Budget) -> Result<Value, Failure> {
    Ok(match a.name {
        LemmaName::SmallPreimage => to_value(&check_small_preimage(a.n, a.k, &a.homeo, budget)?),
        LemmaName::Perturb => to_value(&perturb_witness(a.n, a.m, &a.s, &a.homeo, budget)?),
        LemmaName::Preimages => {
            let y = a.y.as_ref().ok_or_else(|| usage("preimages needs --y"))?;
            let xs = preimages(&a.map, y, a.n)?;
            json!({"map": a.map.to_string(), "y": y, "n": a.n, "count": xs.len(), "preimages": xs})
        }
    })
}

fn barrier(a: &BarrierArgs, budget: &Budget) -> Result<Value, Failure> {
    Ok(match a.name {
        BarrierName::CardinalityGap => to_value(&cardinality_gap(
            (&a.from, &a.from_homeo),
            (&a.to, &a.to_homeo),
            a.n,
            budget,
        )?),
        BarrierName::Level1Witness => {
            let w = level1_witness(&a.from, &a.to, a.r, budget)?;
            json!({"from": a.from.to_string(), "to": a.to.to_string(), "r": a.r, "witness": w})
        }
        BarrierName::Semiconjugacy => {
            let path = a.phi.as_ref().ok_or_else(|| usage("semiconjugacy needs --phi"))?;
            let phi: Phi = read_json(path)?;
            to_value(&check_semiconjugacy(&phi, &a.from, &a.to, &a.periods)?)
        }
    })
}

fn reduction(a: &ReductionArgs, budget: &Budget) -> Result<Value, Failure> {
    let setup = if a.bounded {
        let params = match &a.kappa {
            Some(k) => BoundedParams::new(k.clone())?,
            None => BoundedParams::default(),
        };
        ReductionSetup::bounded(a.n, &params)?
    } else {
        ReductionSetup::new(
            (a.from.clone(), a.from_homeo.clone()),
            (a.to.clone(), a.to_homeo.clone()),
            a.n,
        )?
    };
    if let Some(precision) = a.search {
        return Ok(to_value(&search_reduction_level(a.level, &setup, precision, budget)?));
    }
    let path = a.eta.as_ref().ok_or_else(|| usage("reduction-check needs --eta or --search"))?;
    let eta: EtaTable = read_json(path)?;
    Ok(to_value(&check_reduction_family(&eta, a.level, &setup, budget)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("telic: workers: {e}");
            return ExitCode::from(2);
        }
    }
    let (report, no) = match execute(&cli) {
        Ok(r) => r,
        Err(f) => {
            eprintln!("telic: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let text = emit::render(&report, cli.emit);
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("telic: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if no {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
