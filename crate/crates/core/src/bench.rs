//! Benchmark harness: prepopulate a structure with `1..=K`, then time `R`
//! lookups or `R` insert-then-backtrack cycles. Setup is excluded from the
//! timing. Every row also carries the number of nodes inspected, which is
//! the hardware-independent cost used by [`trend_check`].

use std::fs::OpenOptions;
use std::hint::black_box;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::History;
use crate::list::OpenList;
use crate::tree::{Config, OpenTree};

pub const CSV_HEADER: &str =
    "structure,start_depth,compact_leaves,depth_annotated,prepopulate,op,reps,elapsed_ns,visits";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    Tree,
    List,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchOp {
    Insert,
    Lookup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchSpec {
    pub structure: Structure,
    pub start_depth: u32,
    pub compact_leaves: bool,
    pub depth_annotated: bool,
    pub prepopulate: u64,
    pub reps: u64,
    pub op: BenchOp,
    /// Seeds the payloads inserted by the insert loop.
    pub seed: u64,
}

impl BenchSpec {
    pub fn new(structure: Structure, prepopulate: u64, reps: u64, op: BenchOp) -> Self {
        BenchSpec {
            structure,
            start_depth: 1,
            compact_leaves: false,
            depth_annotated: false,
            prepopulate,
            reps,
            op,
            seed: 0,
        }
    }

    pub fn config(&self) -> Config {
        Config::with_start_depth(self.start_depth)
            .depth_annotated(self.depth_annotated)
            .compact_leaves(self.compact_leaves)
    }

    pub fn check(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(Error::BadConfig("reps must be at least 1".into()));
        }
        self.config().check()
    }
}

mod flag {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            n => Err(D::Error::custom(format!("flag must be 0 or 1, got {n}"))),
        }
    }
}

/// One CSV line. Field order is the column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRow {
    pub structure: Structure,
    pub start_depth: u32,
    #[serde(with = "flag")]
    pub compact_leaves: bool,
    #[serde(with = "flag")]
    pub depth_annotated: bool,
    pub prepopulate: u64,
    pub op: BenchOp,
    pub reps: u64,
    pub elapsed_ns: u64,
    pub visits: u64,
}

impl BenchRow {
    pub fn visits_per_rep(&self) -> f64 {
        self.visits as f64 / self.reps as f64
    }

    pub fn ns_per_rep(&self) -> f64 {
        self.elapsed_ns as f64 / self.reps as f64
    }
}

fn prepopulated<S: History<u64>>(mut s: S, k: u64) -> S {
    for v in 1..=k {
        s.insert(v);
    }
    s
}

/// Times the loop and returns `(elapsed_ns, visits)`.
fn time_loop<S: History<u64>>(s: &mut S, spec: &BenchSpec) -> (u64, u64) {
    let before = s.visits().total;
    let start = Instant::now();
    match spec.op {
        BenchOp::Lookup => {
            for _ in 0..spec.reps {
                let _ = black_box(black_box(&*s).lookup());
            }
        }
        BenchOp::Insert => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let payloads: Vec<u64> = (0..spec.reps.min(1024)).map(|_| rng.gen()).collect();
            for i in 0..spec.reps {
                let m = s.mark();
                s.insert(black_box(payloads[(i % payloads.len() as u64) as usize]));
                s.undo_to(&m).expect("fresh mark");
                s.release(&m).expect("fresh mark");
            }
        }
    }
    let elapsed = start.elapsed().as_nanos() as u64;
    (elapsed, s.visits().total - before)
}

fn row(spec: &BenchSpec, elapsed_ns: u64, visits: u64) -> BenchRow {
    BenchRow {
        structure: spec.structure,
        start_depth: spec.start_depth,
        compact_leaves: spec.compact_leaves,
        depth_annotated: spec.depth_annotated,
        prepopulate: spec.prepopulate,
        op: spec.op,
        reps: spec.reps,
        elapsed_ns,
        visits,
    }
}

pub fn run_bench(spec: &BenchSpec) -> Result<BenchRow> {
    Ok(run_bench_with(spec)?.0)
}

/// Like [`run_bench`], also returning the structure's contents after the
/// loop (prepopulated values in order).
pub fn run_bench_with(spec: &BenchSpec) -> Result<(BenchRow, Vec<u64>)> {
    spec.check()?;
    let (elapsed, visits, after) = match spec.structure {
        Structure::Tree => {
            let mut t = prepopulated(OpenTree::new(spec.config())?, spec.prepopulate);
            let (e, v) = time_loop(&mut t, spec);
            (e, v, t.flatten())
        }
        Structure::List => {
            let mut l = prepopulated(OpenList::new(), spec.prepopulate);
            let (e, v) = time_loop(&mut l, spec);
            (e, v, l.flatten())
        }
    };
    Ok((row(spec, elapsed, visits), after))
}

pub fn write_csv(mut out: impl Write, rows: &[BenchRow]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    append_rows(out, rows)
}

fn append_rows(out: impl Write, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, rows: &[BenchRow]) -> Result<()> {
    write_csv(std::fs::File::create(path)?, rows)
}

/// Appends rows, writing the header first if the file is new or empty.
pub fn append_csv_file(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    if f.metadata()?.len() == 0 {
        writeln!(f, "{CSV_HEADER}")?;
    }
    append_rows(f, rows)
}

pub fn read_csv(input: impl std::io::Read) -> Result<Vec<BenchRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<&str> = r.headers()?.iter().collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::BadConfig(format!(
            "unexpected CSV header `{}`",
            header.join(",")
        )));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| Error::BadConfig(format!("bad CSV row: {e}"))))
        .collect()
}

pub fn read_csv_file(path: &Path) -> Result<Vec<BenchRow>> {
    read_csv(std::fs::File::open(path)?)
}

/// Growth of list visits over the ×100 prepopulation jump must lie in this
/// range.
pub const LIST_VISIT_RATIO: (f64, f64) = (99.0, 101.0);
/// Tree visits may grow by at most the ratio of the tree depths at 10000
/// and 100 updates, plus slack.
pub const TREE_VISIT_RATIO_MAX: f64 = 26.0 / 12.0 + 0.1;
pub const LIST_TIME_RATIO_MIN: f64 = 20.0;
pub const TREE_TIME_RATIO_MAX: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TrendCheck {
    pub name: String,
    pub value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendReport {
    pub checks: Vec<TrendCheck>,
}

impl TrendReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn lookup_row(rows: &[BenchRow], structure: Structure, k: u64) -> Result<&BenchRow> {
    rows.iter()
        .find(|r| {
            r.structure == structure
                && r.op == BenchOp::Lookup
                && r.prepopulate == k
                && (structure == Structure::List
                    || (r.start_depth == 1 && !r.compact_leaves && !r.depth_annotated))
        })
        .ok_or_else(|| {
            Error::BadConfig(format!(
                "no {structure:?} lookup row with prepopulate {k} (tree rows must use start depth 1, no variants)"
            ))
        })
}

/// Checks that list lookups scale linearly and tree lookups logarithmically
/// between 100 and 10000 prepopulated values. Visit ratios always decide;
/// wall-time ratios are included only when `with_time` is set.
pub fn trend_check(rows: &[BenchRow], with_time: bool) -> Result<TrendReport> {
    let per = |s: Structure| -> Result<[&BenchRow; 3]> {
        Ok([
            lookup_row(rows, s, 100)?,
            lookup_row(rows, s, 1000)?,
            lookup_row(rows, s, 10000)?,
        ])
    };
    let [l100, l1000, l10000] = per(Structure::List)?;
    let [t100, t1000, t10000] = per(Structure::Tree)?;

    let mut checks = Vec::new();
    let mut push = |name: &str, value: f64, pass: bool| {
        checks.push(TrendCheck {
            name: name.to_string(),
            value,
            pass,
        })
    };
    let lv = l10000.visits_per_rep() / l100.visits_per_rep();
    push(
        "list lookup visits x100",
        lv,
        (LIST_VISIT_RATIO.0..=LIST_VISIT_RATIO.1).contains(&lv),
    );
    let tv = t10000.visits_per_rep() / t100.visits_per_rep();
    push("tree lookup visits x100", tv, tv <= TREE_VISIT_RATIO_MAX);
    let mono = |a: &BenchRow, b: &BenchRow, c: &BenchRow| {
        a.visits_per_rep() <= b.visits_per_rep() && b.visits_per_rep() <= c.visits_per_rep()
    };
    push("list visits non-decreasing in K", 0.0, mono(l100, l1000, l10000));
    push("tree visits non-decreasing in K", 0.0, mono(t100, t1000, t10000));
    if with_time {
        let lt = l10000.ns_per_rep() / l100.ns_per_rep();
        push("list lookup time x100", lt, lt >= LIST_TIME_RATIO_MIN);
        let tt = t10000.ns_per_rep() / t100.ns_per_rep();
        push("tree lookup time x100", tt, tt <= TREE_TIME_RATIO_MAX);
    }
    Ok(TrendReport { checks })
}

/// Renders after each of the inserts 1..=10 into a fresh default tree, one
/// per line.
pub fn demo() -> String {
    let mut t = OpenTree::new(Config::default()).expect("default config is valid");
    let mut out = String::new();
    for v in 1..=10u32 {
        t.insert(v);
        out.push_str(&t.render());
        out.push('\n');
    }
    out
}
