use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use polyest::error_model::{reduce, GateErrorModel, Sector};
use polyest::estimator::{estimate, interpolate, solve_distance, Warning};
use polyest::ratedb::{generate, Axis, GenerateOptions, GridSpec, Ladder, RateDatabase, DISTANCES};
use polyest::surface_sim::frame::SimRates;
use polyest::surface_sim::Experiment;
use polyest::{Error, Execution};

/// Surface code logical error rates from per-gate error models.
#[derive(Parser)]
#[command(name = "polyest", version)]
struct Cli {
    /// Run single-threaded.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the reduced rates p0, p1, p2 of each error type.
    Reduce {
        /// Gate error model (JSON).
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Logical X and Z error rates per round at one distance.
    Estimate {
        /// Rate database (CSV).
        #[arg(long, env = "POLYEST_DB")]
        db: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        distance: u32,
        /// Print the estimate with fit details as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Smallest distance whose logical rates per round are at most the target.
    Solve {
        #[arg(long, env = "POLYEST_DB")]
        db: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        target: f64,
    },
    /// Build a rate database by simulation.
    Generate {
        /// Grid specification (JSON); the built-in desk grid when omitted.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Overrides the grid's failure target per point.
        #[arg(long)]
        target_fails: Option<u64>,
        /// Overrides the grid's shot cap per point.
        #[arg(long)]
        shot_cap: Option<u64>,
    },
    /// Monte Carlo run at one distance, printed as a CSV line.
    Simulate {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p0x: f64,
        #[arg(long)]
        p0z: f64,
        #[arg(long)]
        p1x: f64,
        #[arg(long)]
        p1z: f64,
        #[arg(long)]
        p2: f64,
        #[arg(long)]
        shots: u64,
        /// Rounds per shot; chosen from a pilot run when omitted.
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Print the column header first.
        #[arg(long)]
        header: bool,
        /// Write the decoding graph as CSV edges.
        #[arg(long)]
        dump_graph: Option<PathBuf>,
        /// Sector of the dumped graph.
        #[arg(long, value_enum, default_value_t = SectorArg::X)]
        dump_sector: SectorArg,
    },
    /// Database rates against p2 at fixed ratios, one row per stored distance
    /// and p2.
    Curve {
        #[arg(long, env = "POLYEST_DB")]
        db: PathBuf,
        #[arg(long)]
        r0: f64,
        #[arg(long)]
        r1: f64,
        /// Comma separated p2 values; every p2 stored at (r0, r1) when omitted.
        #[arg(long)]
        p2: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SectorArg {
    X,
    Z,
}

impl From<SectorArg> for Sector {
    fn from(s: SectorArg) -> Self {
        match s {
            SectorArg::X => Sector::X,
            SectorArg::Z => Sector::Z,
        }
    }
}

fn warn(warnings: &BTreeSet<Warning>) {
    for w in warnings {
        eprintln!("warning: {}", w.name());
    }
}

fn load_db(path: &Path) -> Result<RateDatabase, Error> {
    RateDatabase::load(path)
}

fn run(cli: Cli, out: &mut impl Write) -> Result<(), Error> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let io = |e: std::io::Error| Error::Io {
        path: "<stdout>".into(),
        source: e,
    };
    match cli.command {
        Command::Reduce { model, json } => {
            let r = reduce(&GateErrorModel::from_json_file(&model)?);
            if r.asymmetry_warning {
                eprintln!("warning: {}", Warning::AsymmetricCnot.name());
            }
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&r)?).map_err(io)?;
            } else {
                for (name, v) in [
                    ("p0X", r.p0x),
                    ("p0Z", r.p0z),
                    ("p1X", r.p1x),
                    ("p1Z", r.p1z),
                    ("p2X", r.p2x),
                    ("p2Z", r.p2z),
                ] {
                    writeln!(out, "{name}={v:e}").map_err(io)?;
                }
            }
        }
        Command::Estimate {
            db,
            model,
            distance,
            json,
        } => {
            let model = GateErrorModel::from_json_file(&model)?;
            let e = estimate(&load_db(&db)?, &model, distance)?;
            warn(&e.warnings);
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&e)?).map_err(io)?;
            } else {
                writeln!(out, "pXL={:e}\npZL={:e}", e.p_xl, e.p_zl).map_err(io)?;
            }
        }
        Command::Solve { db, model, target } => {
            let model = GateErrorModel::from_json_file(&model)?;
            let d = solve_distance(&load_db(&db)?, &model, target)?;
            writeln!(out, "{d}").map_err(io)?;
        }
        Command::Generate {
            grid,
            out: path,
            seed,
            target_fails,
            shot_cap,
        } => {
            let mut spec = match grid {
                Some(g) => GridSpec::from_json_file(g)?,
                None => GridSpec::desk_default(),
            };
            if let Some(t) = target_fails {
                spec.target_fails = t;
            }
            if let Some(c) = shot_cap {
                spec.shot_cap = c;
            }
            let opts = GenerateOptions {
                exec,
                ..GenerateOptions::new(seed)
            };
            let db = generate(&spec, &opts, |k, e, done, total| {
                eprintln!(
                    "[{done}/{total}] {k}: p_xl={:e} p_zl={:e} shots={} rounds={}{}",
                    e.p_xl,
                    e.p_zl,
                    e.shots,
                    e.rounds,
                    if e.low_confidence { " (low confidence)" } else { "" }
                );
            })?;
            db.save(&path)?;
        }
        Command::Simulate {
            d,
            p0x,
            p0z,
            p1x,
            p1z,
            p2,
            shots,
            rounds,
            seed,
            header,
            dump_graph,
            dump_sector,
        } => {
            let rates = SimRates::new(p0x, p0z, p1x, p1z, p2)?;
            let exp = match rounds {
                Some(r) => Experiment::new(d, rates, r)?,
                None => Experiment::auto_rounds(d, rates, shots.clamp(1, 1000), seed, exec)?,
            };
            if let Some(path) = dump_graph {
                let f = File::create(&path).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
                exp.graph(dump_sector.into()).write_csv(BufWriter::new(f))?;
            }
            let r = exp.run(shots, seed, exec)?;
            if header {
                writeln!(
                    out,
                    "d,p0x,p0z,p1x,p1z,p2,shots,rounds,fails_x,fails_z,p_xl,p_zl,stderr_x,stderr_z"
                )
                .map_err(io)?;
            }
            writeln!(
                out,
                "{d},{p0x:e},{p0z:e},{p1x:e},{p1z:e},{p2:e},{},{},{},{},{:e},{:e},{:e},{:e}",
                r.shots, r.rounds, r.fails_x, r.fails_z, r.p_xl, r.p_zl, r.stderr_x, r.stderr_z
            )
            .map_err(io)?;
            if r.low_confidence {
                eprintln!("warning: {}", Warning::LowConfidence.name());
            }
        }
        Command::Curve { db, r0, r1, p2 } => {
            let db = load_db(&db)?;
            let sweep: Vec<f64> = match p2 {
                Some(list) => list
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse()
                            .map_err(|_| Error::InvalidArgument(format!("--p2: cannot parse '{s}'")))
                    })
                    .collect::<Result<_, _>>()?,
                None => stored_p2(&db, r0, r1),
            };
            let mut warnings = BTreeSet::new();
            let mut rows = Vec::new();
            let present: BTreeSet<u32> = db.entries().map(|(k, _)| k.d).collect();
            for d in present {
                for &p in &sweep {
                    let x = interpolate(&db, d, r0, r1, p, Sector::X)?;
                    let z = interpolate(&db, d, r0, r1, p, Sector::Z)?;
                    warnings.extend(x.warnings);
                    warnings.extend(z.warnings);
                    rows.push(format!("{d},{r0:e},{r1:e},{p:e},{:e},{:e}", x.value, z.value));
                }
            }
            warn(&warnings);
            writeln!(out, "d,r0,r1,p2,p_xl,p_zl").map_err(io)?;
            for row in rows {
                writeln!(out, "{row}").map_err(io)?;
            }
        }
    }
    Ok(())
}

/// p2 values present at (r0, r1) for every database distance that has any.
fn stored_p2(db: &RateDatabase, r0: f64, r1: f64) -> Vec<f64> {
    let (Some(r0), Some(r1)) = (Ladder::exact(r0), Ladder::exact(r1)) else {
        return Vec::new();
    };
    let at = |d| -> BTreeSet<Ladder> {
        db.entries()
            .filter(|(k, _)| k.d == d && k.r0 == r0 && k.r1 == r1)
            .map(|(k, _)| k.p2)
            .collect()
    };
    let sets: Vec<BTreeSet<Ladder>> = DISTANCES.iter().map(|&d| at(d)).filter(|s| !s.is_empty()).collect();
    let Some(first) = sets.first() else {
        return Vec::new();
    };
    first
        .iter()
        .filter(|p| Axis::P2.contains(**p) && sets.iter().all(|s| s.contains(p)))
        .map(|p| p.value())
        .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
