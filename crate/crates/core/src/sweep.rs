//! Parameter sweeps over families of tori.
//!
//! A [`DatasetSpec`] describes a grid of `(l1, l2, alpha)` values. Grid
//! points are always `min + i * step` for an integer index `i`, and the
//! surviving triples (`l1 <= l2`, perfectly periodic) are solved one by one
//! into a CSV record store that can be resumed after an interruption.

use std::collections::HashSet;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid_graph::{GridSpec, TorusGraph};
use crate::mis::{self, SolverConfig};
use crate::torus::FlatTorus;

/// Grid of side lengths (shared by `l1` and `l2`) and angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetSpec {
    pub l_min: f64,
    pub l_max: f64,
    pub l_step: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_step: f64,
    pub n: usize,
    pub m: usize,
}

/// The four preset datasets of increasing resolution, numbered from 1,
/// all at `n = m = 100`.
pub fn preset(k: usize) -> Option<DatasetSpec> {
    let (l, a) = match k {
        1 => ((2.0, 6.0, 0.2), (20.0, 90.0, 5.0)),
        2 => ((3.2, 3.6, 0.02), (55.0, 65.0, 2.5)),
        3 => ((3.32, 3.36, 0.004), (57.5, 62.5, 0.5)),
        4 => ((3.328, 3.340, 0.001), (59.5, 60.5, 0.25)),
        _ => return None,
    };
    Some(DatasetSpec::from_degrees(l, a, 100, 100))
}

impl DatasetSpec {
    /// Builds a spec from `(min, max, step)` for lengths and for angles in
    /// degrees.
    pub fn from_degrees(
        l: (f64, f64, f64),
        alpha_deg: (f64, f64, f64),
        n: usize,
        m: usize,
    ) -> Self {
        DatasetSpec {
            l_min: l.0,
            l_max: l.1,
            l_step: l.2,
            alpha_min: alpha_deg.0.to_radians(),
            alpha_max: alpha_deg.1.to_radians(),
            alpha_step: alpha_deg.2.to_radians(),
            n,
            m,
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidDataset(msg.to_string()));
        let all = [
            self.l_min,
            self.l_max,
            self.l_step,
            self.alpha_min,
            self.alpha_max,
            self.alpha_step,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("grid bounds must be finite");
        }
        if !(self.l_step > 0.0 && self.alpha_step > 0.0) {
            return bad("steps must be positive");
        }
        if self.l_min > self.l_max || self.alpha_min > self.alpha_max {
            return bad("ranges must satisfy min <= max");
        }
        if self.n == 0 || self.m == 0 {
            return bad("grid sizes must be positive");
        }
        Ok(())
    }

    /// Side-length grid values.
    pub fn lengths(&self) -> Vec<f64> {
        index_grid(self.l_min, self.l_max, self.l_step)
    }

    /// Angle grid values in radians. Values overshooting `pi/2` by rounding
    /// are pulled back onto it.
    pub fn angles(&self) -> Vec<f64> {
        index_grid(self.alpha_min, self.alpha_max, self.alpha_step)
            .into_iter()
            .map(|a| {
                if a > FRAC_PI_2 && a - FRAC_PI_2 < 1e-9 {
                    FRAC_PI_2
                } else {
                    a
                }
            })
            .collect()
    }
}

fn index_grid(min: f64, max: f64, step: f64) -> Vec<f64> {
    let count = ((max - min) / step).round() as usize + 1;
    (0..count).map(|i| min + i as f64 * step).collect()
}

/// One dataset entry with its grid indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple {
    pub l1: f64,
    pub l2: f64,
    pub alpha: f64,
    pub index: (usize, usize, usize),
}

/// All grid triples with `l1 <= l2` on a perfectly periodic torus, in
/// lexicographic order.
pub fn generate_dataset(ds: &DatasetSpec) -> Result<Vec<Triple>> {
    ds.check()?;
    let ls = ds.lengths();
    let angles = ds.angles();
    let mut out = Vec::new();
    for (i1, &l1) in ls.iter().enumerate() {
        for (i2, &l2) in ls.iter().enumerate().skip(i1) {
            if l1 > l2 {
                continue;
            }
            for (ia, &alpha) in angles.iter().enumerate() {
                let periodic = FlatTorus::new(l1, l2, alpha)
                    .map(|t| t.is_perfectly_periodic())
                    .unwrap_or(false);
                if periodic {
                    out.push(Triple {
                        l1,
                        l2,
                        alpha,
                        index: (i1, i2, ia),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// How to derive the next, finer dataset from the best triple of the
/// previous one. Each divisor applies to the corresponding quantity of the
/// previous spec; ranges shrink to `width / range_div` around the centre and
/// steps to `step / step_div`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementStep {
    /// `(l1, l2, alpha)` with `alpha` in radians.
    pub center: (f64, f64, f64),
    pub l_range_div: f64,
    pub l_step_div: f64,
    pub alpha_range_div: f64,
    pub alpha_step_div: f64,
}

impl RefinementStep {
    /// Divisors that take the first preset dataset to the second.
    pub fn towards_second_preset(center: (f64, f64, f64)) -> Self {
        RefinementStep {
            center,
            l_range_div: 10.0,
            l_step_div: 10.0,
            alpha_range_div: 7.0,
            alpha_step_div: 2.0,
        }
    }
}

/// Finer dataset centred on `step.center`. Both side lengths share one grid
/// centred on the mean of `l1` and `l2`.
pub fn refine(prev: &DatasetSpec, step: &RefinementStep) -> Result<DatasetSpec> {
    prev.check()?;
    let divs = [
        step.l_range_div,
        step.l_step_div,
        step.alpha_range_div,
        step.alpha_step_div,
    ];
    if divs.iter().any(|d| !(d.is_finite() && *d >= 1.0))
        || step.l_step_div < 2.0
        || step.alpha_step_div < 2.0
    {
        return Err(Error::InvalidDataset(
            "range divisors must be >= 1 and step divisors >= 2".into(),
        ));
    }
    let (l1, l2, alpha) = step.center;
    let lc = (l1 + l2) / 2.0;
    let l_step = prev.l_step / step.l_step_div;
    let alpha_step = prev.alpha_step / step.alpha_step_div;
    // half-widths are whole multiples of the step so the centre is a grid point
    let l_half = snap((prev.l_max - prev.l_min) / step.l_range_div / 2.0, l_step);
    let a_half = snap(
        (prev.alpha_max - prev.alpha_min) / step.alpha_range_div / 2.0,
        alpha_step,
    );
    let spec = DatasetSpec {
        l_min: lc - l_half,
        l_max: lc + l_half,
        l_step,
        alpha_min: alpha - a_half,
        alpha_max: (alpha + a_half).min(FRAC_PI_2),
        alpha_step,
        n: prev.n,
        m: prev.m,
    };
    spec.check()?;
    Ok(spec)
}

fn snap(half: f64, step: f64) -> f64 {
    (half / step).round() * step
}

/// Outcome of one sweep instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Ok,
    /// The instance violates a hypothesis and was not solved.
    Skipped(String),
    /// Solving failed for another reason.
    Failed(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // reasons must not contain the field separator
        match self {
            Status::Ok => write!(f, "ok"),
            Status::Skipped(r) => write!(f, "skipped: {}", r.replace(',', ";")),
            Status::Failed(r) => write!(f, "failed: {}", r.replace(',', ";")),
        }
    }
}

impl Status {
    fn parse(s: &str) -> Option<Status> {
        if s == "ok" {
            Some(Status::Ok)
        } else if let Some(r) = s.strip_prefix("skipped: ") {
            Some(Status::Skipped(r.to_string()))
        } else {
            s.strip_prefix("failed: ")
                .map(|r| Status::Failed(r.to_string()))
        }
    }
}

/// One solved (or skipped) instance. The angle is kept in degrees because
/// that is what the store holds; `bound` is always `mis_size / (n m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub l1: f64,
    pub l2: f64,
    pub alpha_deg: f64,
    pub n: usize,
    pub m: usize,
    pub degree: usize,
    pub mis_size: usize,
    pub bound: f64,
    pub seed: u64,
    pub move_budget: u64,
    pub status: Status,
}

pub const STORE_HEADER: &str = "l1,l2,alpha_deg,n,m,degree,mis_size,bound,seed,move_budget,status";

impl SweepRecord {
    pub fn alpha(&self) -> f64 {
        self.alpha_deg.to_radians()
    }

    fn key(&self) -> (u64, u64, u64, usize, usize) {
        (
            self.l1.to_bits(),
            self.l2.to_bits(),
            self.alpha_deg.to_bits(),
            self.n,
            self.m,
        )
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_g17(self.l1),
            fmt_g17(self.l2),
            fmt_g17(self.alpha_deg),
            self.n,
            self.m,
            self.degree,
            self.mis_size,
            fmt_g17(self.bound),
            self.seed,
            self.move_budget,
            self.status
        )
    }

    pub fn from_csv(line: &str, line_no: usize) -> Result<Self> {
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let fields: Vec<&str> = line.splitn(11, ',').collect();
        if fields.len() != 11 {
            return Err(err(format!("expected 11 fields, found {}", fields.len())));
        }
        let float = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .map_err(|_| err(format!("bad number {:?}", fields[i])))
        };
        let int = |i: usize| -> Result<u64> {
            fields[i]
                .parse()
                .map_err(|_| err(format!("bad integer {:?}", fields[i])))
        };
        Ok(SweepRecord {
            l1: float(0)?,
            l2: float(1)?,
            alpha_deg: float(2)?,
            n: int(3)? as usize,
            m: int(4)? as usize,
            degree: int(5)? as usize,
            mis_size: int(6)? as usize,
            bound: float(7)?,
            seed: int(8)?,
            move_budget: int(9)?,
            status: Status::parse(fields[10])
                .ok_or_else(|| err(format!("bad status {:?}", fields[10])))?,
        })
    }

    fn sort_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.l1
            .total_cmp(&other.l1)
            .then(self.l2.total_cmp(&other.l2))
            .then(self.alpha_deg.total_cmp(&other.alpha_deg))
            .then(self.n.cmp(&other.n))
            .then(self.m.cmp(&other.m))
    }
}

/// Shortest decimal with at most 17 significant digits, C `%.17g` style:
/// `1`, `0.21929999999999999`, `1e-05`.
pub fn fmt_g17(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, v);
        trim_zeros(&s)
    } else {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// CSV record store on disk. Records are appended as instances finish and
/// the file is rewritten in sorted order when a sweep completes.
#[derive(Debug)]
pub struct RecordStore {
    path: PathBuf,
    records: Vec<SweepRecord>,
}

impl RecordStore {
    /// Opens `path`, loading any records already present.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut records = Vec::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                if i == 0 {
                    if line != STORE_HEADER {
                        return Err(Error::Parse {
                            line: 1,
                            msg: "unexpected header".into(),
                        });
                    }
                    continue;
                }
                if line.trim().is_empty() {
                    continue;
                }
                records.push(SweepRecord::from_csv(&line, i + 1)?);
            }
        }
        Ok(RecordStore { path, records })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn records(&self) -> &[SweepRecord] {
        &self.records
    }

    fn appender(&self) -> Result<BufWriter<File>> {
        let fresh = !self.path.exists() || std::fs::metadata(&self.path)?.len() == 0;
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        let mut w = BufWriter::new(file);
        if fresh {
            writeln!(w, "{STORE_HEADER}")?;
            w.flush()?;
        }
        Ok(w)
    }

    /// Sorts the records and replaces the file atomically.
    fn rewrite_sorted(&mut self) -> Result<()> {
        self.records.sort_by(|a, b| a.sort_cmp(b));
        let dir = match self.path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        {
            let mut w = BufWriter::new(tmp.as_file_mut());
            writeln!(w, "{STORE_HEADER}")?;
            for r in &self.records {
                writeln!(w, "{}", r.to_csv())?;
            }
            w.flush()?;
        }
        tmp.persist(&self.path).map_err(|e| Error::Io(e.error))?;
        Ok(())
    }
}

/// Aggregate over all records of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub count: usize,
    /// Record with the largest bound among solved instances; the first in
    /// sorted order wins ties.
    pub best: Option<SweepRecord>,
    /// Mean set size over solved instances, 0 if there are none.
    pub mean_mis_size: f64,
}

impl SweepSummary {
    pub fn from_records(records: &[SweepRecord]) -> Self {
        let solved: Vec<&SweepRecord> = records.iter().filter(|r| r.status == Status::Ok).collect();
        let mut best: Option<&SweepRecord> = None;
        for r in &solved {
            if best.is_none_or(|b| r.bound > b.bound) {
                best = Some(r);
            }
        }
        let mean = if solved.is_empty() {
            0.0
        } else {
            solved.iter().map(|r| r.mis_size as f64).sum::<f64>() / solved.len() as f64
        };
        SweepSummary {
            count: records.len(),
            best: best.cloned(),
            mean_mis_size: mean,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Solver seed for one instance: the global seed mixed with the grid indices.
pub fn instance_seed(global: u64, index: (usize, usize, usize)) -> u64 {
    let h = splitmix64(index.0 as u64);
    let h = splitmix64(h ^ index.1 as u64);
    let h = splitmix64(h ^ index.2 as u64);
    global ^ h
}

/// Solves one instance into a record. Hypothesis violations are recorded as
/// skipped; a bound above the published ceiling is a hard error.
pub fn solve_instance(t: &Triple, n: usize, m: usize, cfg: &SolverConfig) -> Result<SweepRecord> {
    let seed = instance_seed(cfg.seed, t.index);
    let mut rec = SweepRecord {
        l1: t.l1,
        l2: t.l2,
        alpha_deg: t.alpha.to_degrees(),
        n,
        m,
        degree: 0,
        mis_size: 0,
        bound: 0.0,
        seed,
        move_budget: cfg.move_budget(),
        status: Status::Ok,
    };
    let graph = FlatTorus::new(t.l1, t.l2, t.alpha)
        .and_then(|torus| GridSpec::new(torus, n, m))
        .and_then(TorusGraph::build);
    let graph = match graph {
        Ok(g) => g,
        Err(e) => {
            rec.status = Status::Skipped(e.to_string());
            return Ok(rec);
        }
    };
    rec.degree = graph.regular_degree();
    let inst_cfg = SolverConfig {
        seed,
        ..cfg.clone()
    };
    let set = match mis::solve(&graph, &inst_cfg) {
        Ok(s) => s,
        Err(e) => {
            rec.status = Status::Failed(e.to_string());
            return Ok(rec);
        }
    };
    rec.bound = mis::certified_bound(&graph, &set)?;
    rec.mis_size = set.size();
    Ok(rec)
}

/// Solves every triple not already in `store`, appending records as they
/// finish, then rewrites the store sorted and summarises it.
pub fn run_sweep(
    triples: &[Triple],
    n: usize,
    m: usize,
    cfg: &SolverConfig,
    store: &mut RecordStore,
) -> Result<SweepSummary> {
    let done: HashSet<_> = store.records.iter().map(SweepRecord::key).collect();
    let pending: Vec<&Triple> = triples
        .iter()
        .filter(|t| {
            let key = (
                t.l1.to_bits(),
                t.l2.to_bits(),
                t.alpha.to_degrees().to_bits(),
                n,
                m,
            );
            !done.contains(&key)
        })
        .collect();

    let appender = Mutex::new(store.appender()?);
    let fresh: Vec<SweepRecord> = pending
        .par_iter()
        .map(|t| -> Result<SweepRecord> {
            let rec = solve_instance(t, n, m, cfg)?;
            let mut w = appender.lock().expect("appender poisoned");
            writeln!(w, "{}", rec.to_csv())?;
            w.flush()?;
            Ok(rec)
        })
        .collect::<Result<_>>()?;
    drop(appender);

    store.records.extend(fresh);
    store.rewrite_sorted()?;
    Ok(SweepSummary::from_records(&store.records))
}
