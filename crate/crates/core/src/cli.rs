//! Command-line front end. [`run`] parses arguments, executes one
//! subcommand and returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | `check` answered false |
//! | 2 | a hypothesis of the construction is violated |
//! | 3 | I/O or parse failure |
//! | 4 | bad flags or parameters |
//! | 5 | a bound above the published ceiling (construction bug) |

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::croft;
use crate::error::{Error, Result};
use crate::grid_graph::{GridSpec, TorusGraph};
use crate::mis::{self, SolverConfig};
use crate::render::{self, RenderStyle};
use crate::sweep::{self, fmt_g17, DatasetSpec, RecordStore};
use crate::torus::{FlatTorus, TorusPoint};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "TORUSMIS_OUT_DIR";

/// Instances with at most this many vertices are solved exactly.
pub const EXACT_LIMIT: usize = 100;

#[derive(Debug, Parser)]
#[command(
    name = "torusmis",
    version,
    about = "Unit-distance-avoiding sets on flat tori"
)]
pub struct CliConfig {
    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Directory for written artifacts (default: $TORUSMIS_OUT_DIR, else `.`).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Torus distance between two points given in affine coordinates.
    #[command(allow_negative_numbers = true)]
    Metric {
        l1: f64,
        l2: f64,
        alpha_deg: f64,
        x1: f64,
        y1: f64,
        x2: f64,
        y2: f64,
    },
    /// Tests the perfect-periodicity condition; exit code 1 when it fails.
    Check { l1: f64, l2: f64, alpha_deg: f64 },
    /// Builds the grid graph, finds a large independent set and writes the
    /// solution, the graph and a picture.
    Solve {
        l1: f64,
        l2: f64,
        alpha_deg: f64,
        n: usize,
        m: usize,
        #[command(flatten)]
        solver: SolverArgs,
        /// File name prefix of the artifacts inside the output directory.
        #[arg(long, default_value = "solution")]
        out: String,
    },
    /// Solves every torus of a dataset grid into a resumable CSV store.
    Sweep(SweepArgs),
    /// Optimal hexagon height of the tortoise construction and its density.
    Croft,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Explicit move budget; overrides --time-limit.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Nominal time limit in seconds, converted to a move budget.
    #[arg(long, default_value_t = SolverConfig::default().time_limit)]
    pub time_limit: f64,
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            seed: self.seed,
            time_limit: self.time_limit,
            restarts: self.restarts,
            budget: self.budget,
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Preset dataset number (1 to 4).
    #[arg(long, conflicts_with_all = ["l_min", "l_max", "l_step", "alpha_min", "alpha_max", "alpha_step"])]
    pub dataset: Option<usize>,
    #[arg(long, requires_all = ["l_max", "l_step", "alpha_min", "alpha_max", "alpha_step"])]
    pub l_min: Option<f64>,
    #[arg(long)]
    pub l_max: Option<f64>,
    #[arg(long)]
    pub l_step: Option<f64>,
    /// Angle grid in degrees.
    #[arg(long)]
    pub alpha_min: Option<f64>,
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub alpha_step: Option<f64>,
    /// Grid size along the first side (preset default: 100).
    #[arg(long)]
    pub n: Option<usize>,
    /// Grid size along the second side (preset default: 100).
    #[arg(long)]
    pub m: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Record store, relative to the output directory.
    #[arg(long, default_value = "sweep.csv")]
    pub store: PathBuf,
    /// Only count the dataset.
    #[arg(long)]
    pub dry_run: bool,
}

impl SweepArgs {
    fn dataset(&self) -> Result<DatasetSpec> {
        let mut ds = match (self.dataset, self.l_min) {
            (Some(k), _) => sweep::preset(k)
                .ok_or_else(|| Error::InvalidDataset(format!("no preset dataset {k}")))?,
            (None, Some(l_min)) => DatasetSpec::from_degrees(
                (
                    l_min,
                    self.l_max.unwrap_or(l_min),
                    self.l_step.unwrap_or(0.0),
                ),
                (
                    self.alpha_min.unwrap_or(0.0),
                    self.alpha_max.unwrap_or(0.0),
                    self.alpha_step.unwrap_or(0.0),
                ),
                100,
                100,
            ),
            (None, None) => {
                return Err(Error::InvalidDataset(
                    "give --dataset or the explicit grid flags".into(),
                ))
            }
        };
        ds.n = self.n.unwrap_or(ds.n);
        ds.m = self.m.unwrap_or(ds.m);
        ds.check()?;
        Ok(ds)
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return 4;
        }
    };
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    // commands print little, so output is buffered and the worker pool
    // never touches the caller's (possibly non-Send) streams
    let mut buf = Vec::new();
    let result = pool.install(|| execute(&cli, &out_dir, &mut buf));
    if out.write_all(&buf).and_then(|_| out.flush()).is_err() {
        return 3;
    }
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotPerfectlyPeriodic { .. } | Error::CircumradiusHypothesis { .. } => 2,
        Error::Io(_) | Error::Parse { .. } => 3,
        Error::UpperBoundViolation { .. } => 5,
        _ => 4,
    }
}

fn execute(cli: &CliConfig, out_dir: &Path, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Metric {
            l1,
            l2,
            alpha_deg,
            x1,
            y1,
            x2,
            y2,
        } => {
            writeln!(
                out,
                "# metric l1={} l2={} alpha_deg={} p1=({}, {}) p2=({}, {})",
                g(*l1),
                g(*l2),
                g(*alpha_deg),
                g(*x1),
                g(*y1),
                g(*x2),
                g(*y2)
            )?;
            let t = FlatTorus::from_degrees(*l1, *l2, *alpha_deg)?;
            let d = t.metric(TorusPoint::new(*x1, *y1), TorusPoint::new(*x2, *y2));
            writeln!(out, "{}", g(d))?;
            Ok(0)
        }
        Command::Check { l1, l2, alpha_deg } => {
            writeln!(
                out,
                "# check l1={} l2={} alpha_deg={}",
                g(*l1),
                g(*l2),
                g(*alpha_deg)
            )?;
            let ok = FlatTorus::from_degrees(*l1, *l2, *alpha_deg)?.is_perfectly_periodic();
            writeln!(out, "perfectly-periodic: {ok}")?;
            Ok(if ok { 0 } else { 1 })
        }
        Command::Solve {
            l1,
            l2,
            alpha_deg,
            n,
            m,
            solver,
            out: prefix,
        } => cmd_solve(
            (*l1, *l2, *alpha_deg),
            (*n, *m),
            solver,
            prefix,
            out_dir,
            out,
        ),
        Command::Sweep(args) => cmd_sweep(args, out_dir, out),
        Command::Croft => {
            writeln!(out, "# croft")?;
            let (x, d) = croft::croft_optimum();
            writeln!(out, "x_star={}", g(x))?;
            writeln!(out, "density_star={}", g(d))?;
            Ok(0)
        }
    }
}

fn g(v: f64) -> String {
    fmt_g17(v)
}

fn cmd_solve(
    (l1, l2, alpha_deg): (f64, f64, f64),
    (n, m): (usize, usize),
    solver: &SolverArgs,
    prefix: &str,
    out_dir: &Path,
    out: &mut dyn Write,
) -> Result<i32> {
    let cfg = solver.config();
    writeln!(
        out,
        "# solve l1={} l2={} alpha_deg={} n={n} m={m} seed={} move_budget={} restarts={} threads={}",
        g(l1),
        g(l2),
        g(alpha_deg),
        cfg.seed,
        cfg.move_budget(),
        cfg.restarts,
        rayon::current_num_threads()
    )?;
    let spec = GridSpec::new(FlatTorus::from_degrees(l1, l2, alpha_deg)?, n, m)?;
    let graph = TorusGraph::build(spec)?;
    let (set, method) = if spec.vertex_count() <= EXACT_LIMIT {
        (mis::exact_mis(&graph)?, "exact")
    } else {
        (mis::solve(&graph, &cfg)?, "local-search")
    };
    let bound = mis::certified_bound(&graph, &set)?;

    std::fs::create_dir_all(out_dir)?;
    let base = out_dir.join(prefix);
    write_atomic(&with_ext(&base, "sol"), |w| set.write_solution(n, m, w))?;
    write_atomic(&with_ext(&base, "dimacs"), |w| graph.export_dimacs(w))?;
    write_atomic(&with_ext(&base, "svg"), |w| {
        render::render_solution(&spec, &set, &RenderStyle::default(), w)
    })?;

    writeln!(out, "method={method}")?;
    writeln!(out, "degree={}", graph.regular_degree())?;
    writeln!(out, "size={}", set.size())?;
    writeln!(out, "bound={}", g(bound))?;
    Ok(0)
}

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut s = base.as_os_str().to_os_string();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut std::io::BufWriter<&mut std::fs::File>) -> Result<()>,
{
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = std::io::BufWriter::new(tmp.as_file_mut());
        body(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn cmd_sweep(args: &SweepArgs, out_dir: &Path, out: &mut dyn Write) -> Result<i32> {
    let ds = args.dataset()?;
    let cfg = args.solver.config();
    writeln!(
        out,
        "# sweep l=[{}, {}] step {} alpha_deg=[{}, {}] step {} n={} m={} seed={} move_budget={} threads={} dry_run={}",
        g(ds.l_min),
        g(ds.l_max),
        g(ds.l_step),
        g(ds.alpha_min.to_degrees()),
        g(ds.alpha_max.to_degrees()),
        g(ds.alpha_step.to_degrees()),
        ds.n,
        ds.m,
        cfg.seed,
        cfg.move_budget(),
        rayon::current_num_threads(),
        args.dry_run
    )?;
    let triples = sweep::generate_dataset(&ds)?;
    if args.dry_run {
        writeln!(out, "count={}", triples.len())?;
        return Ok(0);
    }
    std::fs::create_dir_all(out_dir)?;
    let mut store = RecordStore::open(out_dir.join(&args.store))?;
    let summary = sweep::run_sweep(&triples, ds.n, ds.m, &cfg, &mut store)?;
    writeln!(out, "count={}", summary.count)?;
    writeln!(out, "mean_mis_size={}", g(summary.mean_mis_size))?;
    match &summary.best {
        Some(b) => writeln!(
            out,
            "best l1={} l2={} alpha_deg={} mis_size={} bound={}",
            g(b.l1),
            g(b.l2),
            g(b.alpha_deg),
            b.mis_size,
            g(b.bound)
        )?,
        None => writeln!(out, "best none")?,
    }
    writeln!(out, "store={}", store.path().display())?;
    Ok(0)
}
