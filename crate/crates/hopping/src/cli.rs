//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgAction, Args, Parser, Subcommand};
use hopping_core::model::{self, HoppingSpec, SignSeq};
use hopping_core::numrange;
use hopping_core::pseudospectra::{self, eps_n, CertifyOutcome, GridBox, GridSpec, Membership, DEFAULT_CHUNK};
use hopping_core::spectra::{self, default_alpha_count, SpectraError, DEFAULT_PI_MAX_POINTS, DEFAULT_SIGMA_CAP};
use hopping_core::C64;
use log::info;

use crate::driver::{self, DriverError, SnConfig};
use crate::formats::{self, fmt17, write_atomic, Json};
use crate::manifest::{OutputFile, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NOT_CERTIFIED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_RESOURCE: i32 = 65;
pub const EXIT_CHECKPOINT: i32 = 66;
pub const EXIT_INTERRUPTED: i32 = 75;

/// Sweeps whose worst-case count of singular-value solves exceeds this need `--force`.
pub const SWEEP_WORK_CAP: u64 = 1 << 34;

#[derive(Debug, Parser)]
#[command(name = "hopping", version, about = "Spectra and pseudospectra of random sign hopping matrices")]
struct Cli {
    /// Worker threads (defaults to the number of available cores).
    #[arg(long, global = true, env = "HOPPING_THREADS")]
    threads: Option<usize>,
    /// Log more (repeat for debug output).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print eps_n.
    Eps { n: usize },
    /// Union of spectra of all order-n matrices.
    Sigma {
        n: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SIGMA_CAP)]
        cap: usize,
    },
    /// Union of spectra of the periodized operators with period n.
    Pi {
        n: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        alpha_count: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_PI_MAX_POINTS)]
        max_points: u64,
    },
    /// Minimum smallest singular value S_n(lambda).
    Smin(PointArgs),
    /// Decide whether lambda lies in the eps-neighbourhood used for S_n.
    Member {
        #[command(flatten)]
        point: PointArgs,
        /// Threshold; defaults to eps_n.
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<f64>,
    },
    /// Certify that a disc around lambda misses the spectrum.
    Certify {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Adaptive grid classification of a box.
    Sweep(SweepArgs),
    /// Level curve {S_n = eps} on a uniform grid.
    Boundary {
        n: usize,
        #[arg(long = "box", value_parser = parse_box, allow_hyphen_values = true)]
        bbox: GridBox,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Support function and boundary of the numerical range.
    Numrange(NumrangeArgs),
}

#[derive(Debug, Args)]
struct PointArgs {
    /// Order of the matrices.
    n: usize,
    /// Point in the plane, as `a+bi` or `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    lambda: C64,
    #[arg(long, default_value_t = DEFAULT_CHUNK)]
    chunk: u64,
    /// Resume from and write progress to this file.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long, hide = true)]
    stop_after_chunks: Option<u64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    n: usize,
    /// `re_min,re_max,im_min,im_max`.
    #[arg(long = "box", value_parser = parse_box, allow_hyphen_values = true)]
    bbox: GridBox,
    /// Defaults to eps_n.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 64)]
    resolution: usize,
    #[arg(long, default_value_t = 3)]
    depth: u32,
    #[arg(long)]
    pgm: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = pseudospectra::DEFAULT_EVALUATION_CAP)]
    max_evals: u64,
    /// Run even when the estimated work exceeds the safety cap.
    #[arg(long)]
    force: bool,
    #[arg(long)]
    no_symmetry: bool,
}

#[derive(Debug, Args)]
struct NumrangeArgs {
    /// Sign sequence of the sub-diagonal, e.g. `+-+`.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["mask", "seed"])]
    b: Option<String>,
    /// Sign bitmask (bit j set means sign j+1 is negative); needs --n.
    #[arg(long, requires = "n", conflicts_with = "seed")]
    mask: Option<u64>,
    /// Draw the signs at random; needs --n.
    #[arg(long, requires = "n")]
    seed: Option<u64>,
    /// Matrix order.
    #[arg(long)]
    n: Option<usize>,
    /// Probability of a `+` sign when sampling.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = numrange::DEFAULT_ANGLE_COUNT)]
    angles: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some((a, b)) = t.split_once(',') {
        let re = a.parse::<f64>().map_err(|e| format!("{s:?}: {e}"))?;
        let im = b.parse::<f64>().map_err(|e| format!("{s:?}: {e}"))?;
        return Ok(C64::new(re, im));
    }
    t.parse::<C64>().map_err(|_| format!("{s:?} is not a complex number (use a+bi or re,im)"))
}

fn parse_box(s: &str) -> Result<GridBox, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != 4 {
        return Err("expected re_min,re_max,im_min,im_max".into());
    }
    GridBox::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

#[derive(Debug)]
struct Failure {
    code: i32,
    msg: String,
}

impl Failure {
    fn new(code: i32, msg: impl ToString) -> Self {
        Failure { code, msg: msg.to_string() }
    }
}

impl From<DriverError> for Failure {
    fn from(e: DriverError) -> Self {
        let code = match &e {
            DriverError::Checkpoint(_) => EXIT_CHECKPOINT,
            DriverError::Interrupted { .. } => EXIT_INTERRUPTED,
            DriverError::Spectra(SpectraError::CapExceeded { .. } | SpectraError::TooManyPoints { .. }) => EXIT_RESOURCE,
            DriverError::Pool(_) => EXIT_FAILURE,
            DriverError::Pseudo(_) | DriverError::Spectra(_) => EXIT_USAGE,
        };
        Failure::new(code, e)
    }
}

impl From<pseudospectra::PseudoError> for Failure {
    fn from(e: pseudospectra::PseudoError) -> Self {
        Failure::new(EXIT_USAGE, e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_FAILURE, e)
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
    let threads = cli
        .threads
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    match dispatch(cli.command, threads) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("hopping: {}", f.msg);
            f.code
        }
    }
}

struct Ctx {
    command: &'static str,
    threads: usize,
    started: Instant,
    params: Vec<(String, Json)>,
    seeds: Vec<u64>,
}

impl Ctx {
    fn new(command: &'static str, threads: usize) -> Self {
        Ctx {
            command,
            threads,
            started: Instant::now(),
            params: Vec::new(),
            seeds: Vec::new(),
        }
    }

    fn param(&mut self, k: &str, v: Json) -> &mut Self {
        self.params.push((k.to_string(), v));
        self
    }

    /// Writes every output atomically, then one manifest next to the first.
    fn finish(&self, outputs: &[(&Path, Vec<u8>)], complete: bool) -> Result<(), Failure> {
        let mut described = Vec::new();
        for (path, bytes) in outputs {
            write_atomic(path, bytes)?;
            described.push(OutputFile::describe(path, bytes));
            info!("wrote {}", path.display());
        }
        let manifest = RunManifest {
            command: self.command.to_string(),
            params: self.params.clone(),
            seeds: self.seeds.clone(),
            kernel_tolerances: formats::kernel_tolerances(),
            threads: self.threads,
            wall_time: self.started.elapsed(),
            complete,
            outputs: described,
        };
        if let Some((first, _)) = outputs.first() {
            manifest.write_next_to(first)?;
        }
        Ok(())
    }
}

fn int(x: impl TryInto<i128>) -> Json {
    Json::Int(x.try_into().unwrap_or(i128::MAX))
}

fn sn_config(p: &PointArgs, threads: usize) -> SnConfig {
    SnConfig {
        chunk: p.chunk.max(1),
        threads,
        checkpoint: p.checkpoint.clone(),
        stop_after_chunks: p.stop_after_chunks,
        ..SnConfig::default()
    }
}

fn signs_of(mask: u64, n: usize) -> String {
    if n < 2 {
        return String::new();
    }
    SignSeq::from_bitmask(mask, n - 1).map(String::from).unwrap_or_default()
}

fn dispatch(command: Command, threads: usize) -> Result<i32, Failure> {
    match command {
        Command::Eps { n } => {
            println!("{}", fmt17(eps_n(n)?));
            Ok(EXIT_OK)
        }
        Command::Sigma { n, out, cap } => {
            let mut ctx = Ctx::new("sigma", threads);
            ctx.param("n", int(n)).param("cap", int(cap));
            let cloud = driver::sigma_n(n, cap, threads)?;
            println!("{} eigenvalues", cloud.len());
            ctx.finish(&[(&out, formats::points_csv(&cloud.points).into_bytes())], true)?;
            Ok(EXIT_OK)
        }
        Command::Pi {
            n,
            out,
            alpha_count,
            max_points,
        } => {
            let k = alpha_count.unwrap_or_else(|| default_alpha_count(n));
            let mut ctx = Ctx::new("pi", threads);
            ctx.param("n", int(n))
                .param("alpha_count", int(k))
                .param("max_points", int(max_points))
                .param("alpha_resolution", Json::Num(spectra::alpha_resolution(k)));
            let cloud = driver::pi_n(n, k, max_points, threads)?;
            println!("{} eigenvalues", cloud.len());
            ctx.finish(&[(&out, formats::points_csv(&cloud.points).into_bytes())], true)?;
            Ok(EXIT_OK)
        }
        Command::Smin(p) => {
            let r = driver::s_n(p.lambda, p.n, &sn_config(&p, threads))?;
            println!("S_{}({}) = {}", p.n, fmt_c(p.lambda), fmt17(r.value));
            println!("argmin mask {} ({})", r.argmin_bitmask, signs_of(r.argmin_bitmask, p.n));
            println!("matrices evaluated {}", r.matrices_evaluated);
            Ok(EXIT_OK)
        }
        Command::Member { point, eta } => {
            let eta = match eta {
                Some(e) => e,
                None => eps_n(point.n)?,
            };
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(Failure::new(EXIT_USAGE, format!("eta must be positive and finite, got {eta}")));
            }
            let mut cfg = sn_config(&point, threads);
            cfg.early_cutoff = Some(eta);
            let r = driver::s_n(point.lambda, point.n, &cfg)?;
            let m = pseudospectra::classify_membership(r, eta);
            let verdict = match m.verdict {
                Membership::In => "in",
                Membership::Out => "out",
            };
            println!("{verdict} (S_n {} eta {}, margin {})", fmt17(m.smin.value), fmt17(eta), fmt17(m.margin));
            Ok(EXIT_OK)
        }
        Command::Certify { point, out } => {
            let mut ctx = Ctx::new("certify", threads);
            ctx.param("n", int(point.n))
                .param("lambda", Json::complex(point.lambda))
                .param("chunk", int(point.chunk));
            let (smin, outcome) = driver::certify(point.lambda, point.n, &sn_config(&point, threads))?;
            let json = formats::certificate_json(&outcome);
            if let Some(out) = &out {
                ctx.finish(&[(out, json.into_bytes())], true)?;
            } else {
                print!("{json}");
            }
            match outcome {
                CertifyOutcome::Certified(c) => {
                    println!(
                        "certified: S_{} = {} exceeds eps_n = {} by {}, radius {}",
                        c.n,
                        fmt17(c.s_value),
                        fmt17(c.eps_n),
                        fmt17(c.eta),
                        fmt17(c.radius)
                    );
                    Ok(EXIT_OK)
                }
                CertifyOutcome::Failed { deficit, eps_n, .. } => {
                    println!(
                        "not certified: S_{} = {} is below eps_n = {} by {}",
                        point.n,
                        fmt17(smin.value),
                        fmt17(eps_n),
                        fmt17(deficit)
                    );
                    Ok(EXIT_NOT_CERTIFIED)
                }
            }
        }
        Command::Sweep(a) => sweep(a, threads),
        Command::Boundary {
            n,
            bbox,
            eps,
            resolution,
            out,
        } => {
            let eps = match eps {
                Some(e) => e,
                None => eps_n(n)?,
            };
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(Failure::new(EXIT_USAGE, format!("eps must be positive and finite, got {eps}")));
            }
            if resolution < 2 {
                return Err(Failure::new(EXIT_USAGE, "resolution must be at least 2"));
            }
            let mut ctx = Ctx::new("boundary", threads);
            ctx.param("n", int(n))
                .param("box", Json::Arr(vec![
                    Json::Num(bbox.re_min),
                    Json::Num(bbox.re_max),
                    Json::Num(bbox.im_min),
                    Json::Num(bbox.im_max),
                ]))
                .param("eps", Json::Num(eps))
                .param("resolution", int(resolution));
            let field = driver::sample_field(n, &bbox, resolution, threads)?;
            let b = pseudospectra::boundary_from_field(&field, eps);
            if b.degenerate {
                eprintln!(
                    "hopping: eps {} lies outside the sampled range [{}, {}]; no level curve",
                    fmt17(eps),
                    fmt17(b.field_min),
                    fmt17(b.field_max)
                );
            }
            println!("{} polylines", b.polylines.len());
            ctx.finish(&[(&out, formats::polylines_csv(&b.polylines).into_bytes())], true)?;
            Ok(EXIT_OK)
        }
        Command::Numrange(a) => numrange_cmd(a, threads),
    }
}

fn fmt_c(z: C64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn sweep(a: SweepArgs, threads: usize) -> Result<i32, Failure> {
    let eps = match a.eps {
        Some(e) => e,
        None => eps_n(a.n)?,
    };
    let mut spec = GridSpec::new(a.bbox, a.n, eps, a.resolution, a.depth)?;
    spec.evaluation_cap = a.max_evals.max(1);
    spec.use_symmetry = !a.no_symmetry;
    let per_eval = model::reversal_class_count(a.n.saturating_sub(1)).max(1);
    let work = spec.worst_case_evaluations().min(spec.evaluation_cap).saturating_mul(per_eval);
    if work > SWEEP_WORK_CAP && !a.force {
        return Err(Failure::new(
            EXIT_RESOURCE,
            format!("estimated {work} singular-value solves exceed the cap {SWEEP_WORK_CAP}; rerun with --force"),
        ));
    }
    if a.pgm.is_none() && a.csv.is_none() {
        return Err(Failure::new(EXIT_USAGE, "give --pgm and/or --csv"));
    }
    let mut ctx = Ctx::new("sweep", threads);
    ctx.param("n", int(a.n))
        .param("box", Json::Arr(vec![
            Json::Num(a.bbox.re_min),
            Json::Num(a.bbox.re_max),
            Json::Num(a.bbox.im_min),
            Json::Num(a.bbox.im_max),
        ]))
        .param("eps", Json::Num(eps))
        .param("resolution", int(a.resolution))
        .param("depth", int(a.depth))
        .param("max_evals", int(a.max_evals))
        .param("symmetry", Json::Bool(!a.no_symmetry));
    let region = driver::grid_sweep(spec, threads)?;
    let mut outputs: Vec<(&Path, Vec<u8>)> = Vec::new();
    if let Some(p) = &a.pgm {
        let (w, h, px) = pseudospectra::raster(&region);
        outputs.push((p, formats::pgm(w, h, &px)));
    }
    if let Some(p) = &a.csv {
        outputs.push((p, formats::cells_csv(&region).into_bytes()));
    }
    ctx.param("evaluations", int(region.evaluations));
    ctx.finish(&outputs, region.complete)?;
    println!(
        "{} cells: {} excluded, {} included, {} unknown; {} evaluations{}",
        region.cells.len(),
        region.count(pseudospectra::CellClass::Excluded),
        region.count(pseudospectra::CellClass::IncludedLower),
        region.count(pseudospectra::CellClass::Unknown),
        region.evaluations,
        if region.complete { "" } else { " (evaluation cap reached)" }
    );
    Ok(EXIT_OK)
}

fn numrange_cmd(a: NumrangeArgs, threads: usize) -> Result<i32, Failure> {
    let usage = |e: &dyn std::fmt::Display| Failure::new(EXIT_USAGE, e.to_string());
    let mut ctx = Ctx::new("numrange", threads);
    let seq = if let Some(b) = &a.b {
        let s: SignSeq = b.parse().map_err(|e| usage(&e))?;
        if let Some(n) = a.n {
            if n != s.len() + 1 {
                return Err(usage(&format!("--n {n} does not match a sequence of {} signs", s.len())));
            }
        }
        s
    } else {
        let n = a.n.ok_or_else(|| usage(&"give --b, --mask with --n, or --seed with --n"))?;
        if n == 0 {
            return Err(usage(&"order must be at least 1"));
        }
        if let Some(mask) = a.mask {
            SignSeq::from_bitmask(mask, n - 1).map_err(|e| usage(&e))?
        } else if let Some(seed) = a.seed {
            ctx.seeds.push(seed);
            ctx.param("p", Json::Num(a.p));
            model::sample_iid(n - 1, a.p, seed).map_err(|e| usage(&e))?
        } else {
            return Err(usage(&"give --b, --mask with --n, or --seed with --n"));
        }
    };
    let spec = HoppingSpec::single(seq.clone());
    let t = model::assemble(&spec, C64::new(0.0, 0.0));
    let curve = numrange::nr_boundary_tridiag(&t, a.angles).map_err(|e| usage(&e))?;
    let gap = numrange::delta_gap(&curve);
    ctx.param("n", int(spec.order()))
        .param("signs", Json::Str(String::from(seq)))
        .param("angles", int(a.angles));
    println!("order {}, area {}, delta gap {}", spec.order(), fmt17(curve.area), fmt17(gap));
    if curve.degenerate {
        println!("degenerate numerical range (segment or point)");
    }
    if let Some(out) = &a.out {
        ctx.finish(&[(out, formats::support_csv(&curve).into_bytes())], true)?;
    }
    Ok(EXIT_OK)
}
