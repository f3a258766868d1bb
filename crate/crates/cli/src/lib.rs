//! Command-line front end. [`run`] executes a parsed command and writes its
//! textual output; the binary only maps errors to exit codes.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use intpoints::curve::{self, CurveError};
use intpoints::fibre::{self, FibreError, SquareDivisorProfile};
use intpoints::mordell::{self, IntegralPoint, MordellError, WeierstrassCurve};
use intpoints::store::{self, StoreError, SweepJob, SweepReport};
use intpoints::sweep::{self, Congruence, FamilyKind, FamilySpec, SignFilter, Smoothness, SweepError, SweepParams};
use intpoints::BinaryQuartic;

/// Environment variable holding the default shard count.
pub const SHARDS_ENV: &str = "INTPOINTS_SHARDS";
const DEFAULT_SHARDS: usize = 16;

#[derive(Debug, Parser)]
#[command(name = "intpoints", version, about = "Integral points on elliptic curves via flattened binary quartics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// I, J and the discriminant of a binary quartic.
    Invariants {
        #[arg(long)]
        quartic: BinaryQuartic,
    },
    /// Point-to-quartic map and its inverse.
    Bijection(BijectionArgs),
    /// Transforms from a flattened quartic to flattened quartics.
    Fibre {
        #[arg(long)]
        quartic: BinaryQuartic,
        #[arg(long = "box", default_value_t = 100)]
        bound: u64,
        #[arg(long)]
        refined: bool,
    },
    /// Integral points in a window, optionally grouped into classes.
    Points {
        #[arg(long)]
        curve: WeierstrassCurve,
        #[arg(long, default_value_t = 10_000)]
        window: i64,
        /// Group points by quartic class within this box.
        #[arg(long = "box")]
        bound: Option<u64>,
    },
    /// Family sweep with per-curve records.
    Sweep(SweepArgs),
    /// Exact point-count and discriminant moments.
    Moments(MomentArgs),
    /// Counts of discriminants divisible by given moduli.
    Census(CensusArgs),
    /// Loads a rank table and checks class counts against 4 * 2^rank.
    Ranks {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        window: i64,
        #[arg(long = "box", default_value_t = 1000)]
        bound: u64,
    },
}

#[derive(Debug, Args)]
pub struct BijectionArgs {
    #[arg(long, requires = "point", conflicts_with = "quartic")]
    pub curve: Option<WeierstrassCurve>,
    #[arg(long)]
    pub point: Option<IntegralPoint>,
    /// An integer-matrix quartic; flattened along `--rep` unless already flattened.
    #[arg(long)]
    pub quartic: Option<BinaryQuartic>,
    /// A coprime `p,q` with `f(p, q) = 1`.
    #[arg(long, value_parser = parse_pair)]
    pub rep: Option<(i64, i64)>,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long, default_value = "univ")]
    pub family: FamilyKind,
    /// `m:a/b,a/b,...`; repeatable.
    #[arg(long)]
    pub congruence: Vec<Congruence>,
    #[arg(long, default_value = "any")]
    pub sign: SignFilter,
    #[arg(long)]
    pub shards: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl FamilyArgs {
    fn spec(&self) -> FamilySpec {
        FamilySpec { kind: self.family, congruences: self.congruence.clone(), sign: self.sign }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub height_max: u64,
    #[arg(long, default_value_t = 10_000)]
    pub window: i64,
    #[arg(long)]
    pub no_points: bool,
    /// Box for class counts; omitted means no class column.
    #[arg(long = "box")]
    pub bound: Option<u64>,
    #[arg(long, default_value = "1/12")]
    pub delta: Smoothness,
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Print discriminant statistics only, without records.
    #[arg(long)]
    pub stats_only: bool,
}

#[derive(Debug, Args)]
pub struct MomentArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub heights: Vec<u64>,
    #[arg(long = "s", value_delimiter = ',', default_value = "1")]
    pub s: Vec<u32>,
    #[arg(long = "t", value_delimiter = ',', default_value = "1")]
    pub t: Vec<u32>,
    #[arg(long, default_value_t = 10_000)]
    pub window: i64,
    #[arg(long)]
    pub ranks: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub height_max: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub moduli: Vec<u64>,
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected p,q, got {s:?}"))?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Io(e) => CliError::Io(e.to_string()),
            StoreError::Sweep(e) => e.into(),
            e @ StoreError::ConfigMismatch { .. } => CliError::Config(e.to_string()),
            other => CliError::Io(other.to_string()),
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<MordellError> for CliError {
    fn from(e: MordellError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<FibreError> for CliError {
    fn from(e: FibreError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn shard_count(explicit: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = explicit {
        return if n == 0 { Err(CliError::Config("--shards must be positive".into())) } else { Ok(n) };
    }
    match std::env::var(SHARDS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("{SHARDS_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_SHARDS),
    }
}

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => store::write_atomic(p, text).map_err(CliError::from),
        None => out.write_all(text.as_bytes()).map_err(CliError::from),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string(v).map_err(|e| CliError::Config(e.to_string()))
}

/// Executes one command, writing human-readable output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Invariants { quartic } => {
            let inv = quartic.invariants();
            writeln!(out, "I={} J={} Delta={}", inv.i, inv.j, inv.disc)?;
        }
        Command::Bijection(args) => bijection(args, out)?,
        Command::Fibre { quartic, bound, refined } => {
            for t in fibre::flattening_transforms(&quartic, bound)? {
                let (a, b) = t.top_row;
                let disc = quartic.invariants().disc.to_integer();
                let value = quartic.eval_int(a, b);
                let ok = num_integer::gcd(a, b) == 1
                    && value.is_integer()
                    && value.to_integer() == t.det_sq
                    && (&disc % &t.det_sq) == 0.into();
                if !ok {
                    return Err(CliError::Invariant(format!("transform with first row ({a}, {b})")));
                }
                writeln!(out, "{a},{b};{};{}", t.gamma.det(), t.image)?;
            }
            let profile = SquareDivisorProfile::new(&quartic.invariants().disc.to_integer())?;
            writeln!(out, "bound={}", fibre::fibre_bound(&profile, refined))?;
        }
        Command::Points { curve: c, window, bound } => {
            let points = curve::search_integral_points(&c, -window, window)?;
            match bound {
                None => {
                    for p in &points {
                        writeln!(out, "{p}")?;
                    }
                }
                Some(b) => {
                    for (i, class) in curve::psi_classes(&c, &points, b)?.iter().enumerate() {
                        for p in class {
                            writeln!(out, "{p};class={i}")?;
                        }
                    }
                }
            }
        }
        Command::Sweep(args) => sweep_command(args, out)?,
        Command::Moments(args) => {
            let shards = shard_count(args.family.shards)?;
            let ranks = match &args.ranks {
                Some(p) => Some(curve::load_rank_table(BufReader::new(File::open(p)?))?),
                None => None,
            };
            let params = sweep::MomentParams {
                family: args.family.spec(),
                heights: args.heights.clone(),
                s_list: args.s.clone(),
                t_list: args.t.clone(),
                window: args.window,
            };
            let rows = sweep::moment_report(&params, ranks.as_ref(), shards)?;
            #[derive(Serialize)]
            struct Config<'a> {
                command: &'static str,
                #[serde(flatten)]
                params: &'a sweep::MomentParams,
                ranks: Option<String>,
                shards: usize,
            }
            let config = to_json(&Config {
                command: "moments",
                params: &params,
                ranks: args.ranks.as_ref().map(|p| p.display().to_string()),
                shards,
            })?;
            let rows: Vec<String> = rows.iter().map(ToString::to_string).collect();
            emit(out, args.family.output.as_ref(), &store::render_table(&config, sweep::MOMENT_HEADER, &rows))?;
        }
        Command::Census(args) => {
            let shards = shard_count(args.family.shards)?;
            let spec = args.family.spec();
            let rows = sweep::divisibility_census(&spec, args.height_max, &args.moduli, shards)?;
            if let Some((m, m2)) = sweep::census_monotonicity_violation(&rows) {
                return Err(CliError::Invariant(format!("count({m}) < count({m2}) although {m} | {m2}")));
            }
            #[derive(Serialize)]
            struct Config<'a> {
                command: &'static str,
                family: &'a FamilySpec,
                height_max: u64,
                moduli: &'a [u64],
                shards: usize,
            }
            let config = to_json(&Config {
                command: "census",
                family: &spec,
                height_max: args.height_max,
                moduli: &args.moduli,
                shards,
            })?;
            let rows: Vec<String> = rows.iter().map(ToString::to_string).collect();
            emit(out, args.family.output.as_ref(), &store::render_table(&config, sweep::CENSUS_HEADER, &rows))?;
        }
        Command::Ranks { table, window, bound } => {
            let table = curve::load_rank_table(BufReader::new(File::open(&table)?))?;
            writeln!(out, "A,B,rank,points,classes,bound")?;
            for rec in table.values() {
                let c = WeierstrassCurve::new(rec.a, rec.b)?;
                let points = curve::search_integral_points(&c, -window, window)?;
                let classes = curve::psi_classes(&c, &points, bound)?.len() as u64;
                let limit = 4u64 << rec.rank;
                writeln!(out, "{},{},{},{},{},{}", rec.a, rec.b, rec.rank, points.len(), classes, limit)?;
                if classes > limit {
                    return Err(CliError::Invariant(format!("({}, {}) has {classes} classes > {limit}", rec.a, rec.b)));
                }
            }
        }
    }
    Ok(())
}

fn bijection(args: BijectionArgs, out: &mut dyn Write) -> Result<(), CliError> {
    match (args.curve, args.point, args.quartic) {
        (Some(c), Some(p), None) => {
            let f = mordell::point_to_quartic(&c, p)?;
            let (c2, p2) = mordell::quartic_to_point(&f)?;
            writeln!(out, "quartic={f}")?;
            writeln!(out, "curve={c2} point={p2}")?;
            if (c2, p2) != (c, p) {
                return Err(CliError::Invariant(format!("round trip gave curve {c2}, point {p2}")));
            }
        }
        (None, None, Some(f)) => {
            let flat = match args.rep {
                Some((p, q)) => mordell::flatten_triple(&f, p, q)?,
                None if f.is_flattened() => f,
                None => return Err(CliError::Config("--rep is required for a quartic that is not flattened".into())),
            };
            let (c, p) = mordell::quartic_to_point(&flat)?;
            writeln!(out, "quartic={flat}")?;
            writeln!(out, "curve={c} point={p}")?;
            let back = mordell::point_to_quartic(&c, p)?;
            if back != flat {
                return Err(CliError::Invariant(format!("round trip gave quartic {back}")));
            }
        }
        _ => return Err(CliError::Config("give either --curve and --point, or --quartic".into())),
    }
    Ok(())
}

fn sweep_command(args: SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let shards = shard_count(args.family.shards)?;
    let spec = args.family.spec();
    if args.window < 0 {
        return Err(CliError::Config("--window must be nonnegative".into()));
    }
    if args.stats_only {
        let summary = sweep::discriminant_statistics(&spec, args.height_max, args.delta, shards)?;
        writeln!(out, "# summary: {}", to_json(&summary)?)?;
        return Ok(());
    }
    let params = SweepParams {
        family: spec,
        height_max: args.height_max,
        window: (!args.no_points).then_some(args.window),
        class_box: if args.no_points { None } else { args.bound },
        delta: args.delta,
    };
    let job = SweepJob::new(params, shards);
    let report = store::run_cached_sweep(&job, args.cache.as_deref(), None)?;
    let text = report.render()?;
    debug_assert_eq!(SweepReport::parse(&text).map(|r| r.rows.len()).ok(), Some(report.rows.len()));
    emit(out, args.family.output.as_ref(), &text)?;
    let s = report.summary;
    if s.tau_violations > 0 || s.oversized_factors > 0 {
        return Err(CliError::Invariant(format!(
            "{} tau-bound violations, {} decompositions outside the window",
            s.tau_violations, s.oversized_factors
        )));
    }
    Ok(())
}
