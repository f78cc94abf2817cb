//! Reference model and differential fuzzer.
//!
//! [`OracleModel`] is a plain vector with a checkpoint stack. The fuzzer
//! drives it, an [`OpenList`] and one [`OpenTree`] per configuration with the
//! same pseudo-random operation stream and reports every disagreement.
//!
//! Operation streams come from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded
//! with `seed_from_u64(seed)`; a stream is fully determined by the seed and
//! the plan's weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complexity;
use crate::error::{Error, Result};
use crate::journal::Mark;
use crate::list::OpenList;
use crate::tree::{Config, OpenTree};

pub const GENERATOR: &str = "ChaCha8Rng::seed_from_u64 (rand_chacha 0.3)";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleModel<V> {
    log: Vec<V>,
    checkpoints: Vec<usize>,
}

impl<V> OracleModel<V> {
    pub fn new() -> Self {
        OracleModel {
            log: Vec::new(),
            checkpoints: Vec::new(),
        }
    }

    pub fn insert(&mut self, value: V) {
        self.log.push(value);
    }

    pub fn lookup(&self) -> Result<&V> {
        self.log.last().ok_or(Error::EmptyTree)
    }

    pub fn mark(&mut self) {
        self.checkpoints.push(self.log.len());
    }

    /// Pops the newest checkpoint and truncates the log to it.
    pub fn undo(&mut self) -> Result<()> {
        let len = self.checkpoints.pop().ok_or(Error::StaleMark)?;
        self.log.truncate(len);
        Ok(())
    }

    /// Pops the newest checkpoint, keeping the log.
    pub fn commit(&mut self) -> Result<()> {
        self.checkpoints.pop().map(drop).ok_or(Error::StaleMark)
    }

    pub fn log(&self) -> &[V] {
        &self.log
    }

    pub fn checkpoints(&self) -> usize {
        self.checkpoints.len()
    }
}

/// Relative frequencies of the fuzzed operations.
///
/// An undo keeps its target mark live, so histories shrink back towards the
/// oldest mark; commits drop marks and let the floor rise. The defaults keep
/// a 50000-op run around a few hundred values, peaking past 1000.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpWeights {
    pub insert: u32,
    pub lookup: u32,
    pub mark: u32,
    pub undo: u32,
    pub commit: u32,
}

impl OpWeights {
    fn total(&self) -> u32 {
        self.insert + self.lookup + self.mark + self.undo + self.commit
    }
}

impl Default for OpWeights {
    fn default() -> Self {
        OpWeights {
            insert: 45,
            lookup: 25,
            mark: 15,
            undo: 13,
            commit: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzPlan {
    pub seed: u64,
    pub op_count: u64,
    pub weights: OpWeights,
    pub grid: Vec<Config>,
}

impl FuzzPlan {
    /// Default weights over every variant combination at start depths
    /// 1, 2, 3 and 10.
    pub fn full_grid(seed: u64, op_count: u64) -> Self {
        FuzzPlan {
            seed,
            op_count,
            weights: OpWeights::default(),
            grid: Config::grid(&[1, 2, 3, 10]),
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.op_count < 1 {
            return Err(Error::BadConfig("op count must be at least 1".into()));
        }
        let w = self.weights;
        if w.total() == 0 {
            return Err(Error::BadConfig("all operation weights are zero".into()));
        }
        for c in &self.grid {
            c.check()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Insert(u64),
    Lookup,
    Mark,
    /// Backtrack to the live mark at this stack index; the mark stays live,
    /// younger ones are dropped.
    Undo(usize),
    /// Backtrack with no live mark; must fail with `StaleMark` everywhere.
    StaleUndo,
    /// Drop the newest mark without backtracking.
    Commit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub seed: u64,
    pub op_index: u64,
    pub op: Op,
    /// Offending tree configuration, `None` for the list.
    pub config: Option<Config>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzReport {
    pub seed: u64,
    pub generator: &'static str,
    pub ops_executed: u64,
    pub divergences: Vec<Divergence>,
    /// Longest history reached during the run.
    pub max_len: usize,
}

impl FuzzReport {
    pub fn is_clean(&self) -> bool {
        self.divergences.is_empty()
    }
}

/// Deterministic operation stream for a plan. `live_marks` is the number of
/// currently valid marks, which determines what an undo may target.
pub struct OpStream {
    rng: ChaCha8Rng,
    weights: OpWeights,
    next_value: u64,
}

impl OpStream {
    pub fn new(seed: u64, weights: OpWeights) -> Self {
        OpStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            weights,
            next_value: 0,
        }
    }

    pub fn next_op(&mut self, live_marks: usize) -> Op {
        let w = self.weights;
        let mut pick = self.rng.gen_range(0..w.total());
        if pick < w.insert {
            self.next_value += 1;
            return Op::Insert(self.next_value);
        }
        pick -= w.insert;
        if pick < w.lookup {
            return Op::Lookup;
        }
        pick -= w.lookup;
        if pick < w.mark {
            return Op::Mark;
        }
        pick -= w.mark;
        if live_marks == 0 {
            Op::StaleUndo
        } else if pick < w.undo {
            Op::Undo(self.rng.gen_range(0..live_marks))
        } else {
            Op::Commit
        }
    }
}

struct Subjects {
    oracle: OracleModel<u64>,
    list: OpenList<u64>,
    trees: Vec<OpenTree<u64>>,
    // one entry per live mark: the list's mark, then each tree's
    marks: Vec<(Mark, Vec<Mark>)>,
    stale: Option<(Mark, Vec<Mark>)>,
}

// error kinds are compared modulo which structure reported them
fn normalized<'a, T>(r: &Result<&'a T>) -> Result<&'a T> {
    match r {
        Ok(v) => Ok(*v),
        Err(Error::EmptyList) => Err(Error::EmptyTree),
        Err(e) => Err(e.clone()),
    }
}

fn same<T: PartialEq + std::fmt::Debug>(a: &Result<&T>, b: &Result<&T>) -> Option<String> {
    (normalized(a) != normalized(b)).then(|| format!("oracle {:?}, subject {:?}", a, b))
}

/// Runs the plan and reports divergences between the oracle, the list and
/// every tree configuration.
pub fn differential_run(plan: &FuzzPlan) -> Result<FuzzReport> {
    plan.check()?;
    let mut s = Subjects {
        oracle: OracleModel::new(),
        list: OpenList::new(),
        trees: plan
            .grid
            .iter()
            .map(|&c| OpenTree::new(c))
            .collect::<Result<_>>()?,
        marks: Vec::new(),
        stale: None,
    };
    let mut report = FuzzReport {
        seed: plan.seed,
        generator: GENERATOR,
        ops_executed: 0,
        divergences: Vec::new(),
        max_len: 0,
    };
    let mut stream = OpStream::new(plan.seed, plan.weights);
    for op_index in 0..plan.op_count {
        let op = stream.next_op(s.marks.len());
        let mut diverged = |config: Option<Config>, detail: String| {
            report.divergences.push(Divergence {
                seed: plan.seed,
                op_index,
                op,
                config,
                detail,
            })
        };
        let mutated = apply(&mut s, op, &mut diverged);
        check(&s, mutated, &mut diverged);
        report.ops_executed += 1;
        report.max_len = report.max_len.max(s.oracle.log().len());
    }
    Ok(report)
}

fn apply(s: &mut Subjects, op: Op, diverged: &mut impl FnMut(Option<Config>, String)) -> bool {
    match op {
        Op::Insert(v) => {
            s.oracle.insert(v);
            s.list.insert(v);
            let m = s.oracle.log().len() as u64;
            for t in &mut s.trees {
                t.insert(v);
                let bound = complexity::visit_bound(m, t.config().start_depth).unwrap_or(u64::MAX);
                if t.visits().last > bound {
                    diverged(
                        Some(t.config()),
                        format!("insert visited {} nodes, bound {bound}", t.visits().last),
                    );
                }
            }
            true
        }
        Op::Lookup => false,
        Op::Mark => {
            s.oracle.mark();
            let lm = s.list.mark();
            let tm = s.trees.iter_mut().map(|t| t.mark()).collect();
            s.marks.push((lm, tm));
            false
        }
        Op::Undo(i) => {
            while s.oracle.checkpoints() > i {
                s.oracle.undo().expect("checkpoint available");
            }
            s.oracle.mark();
            let (lm, tms) = &s.marks[i];
            if let Err(e) = s.list.undo_to(lm) {
                diverged(None, format!("undo failed: {e}"));
            }
            for (t, m) in s.trees.iter_mut().zip(tms) {
                if let Err(e) = t.undo_to(m) {
                    diverged(Some(t.config()), format!("undo failed: {e}"));
                }
            }
            if let Some(dropped) = s.marks.get(i + 1).cloned() {
                s.stale = Some(dropped);
            }
            s.marks.truncate(i + 1);
            true
        }
        Op::Commit => {
            s.oracle.commit().expect("checkpoint available");
            let target = s.marks.pop().expect("live mark");
            let (lm, tms) = &target;
            if let Err(e) = s.list.release(lm) {
                diverged(None, format!("commit failed: {e}"));
            }
            for (t, m) in s.trees.iter_mut().zip(tms) {
                if let Err(e) = t.release(m) {
                    diverged(Some(t.config()), format!("commit failed: {e}"));
                }
            }
            s.stale = Some(target);
            false
        }
        Op::StaleUndo => {
            let expected = s.oracle.undo();
            if expected != Err(Error::StaleMark) {
                diverged(None, format!("oracle undo with no checkpoint gave {expected:?}"));
            }
            if let Some((lm, tms)) = &s.stale {
                let got = s.list.undo_to(lm);
                if got != expected {
                    diverged(None, format!("stale undo gave {got:?}"));
                }
                for (t, m) in s.trees.iter_mut().zip(tms) {
                    let got = t.undo_to(m);
                    if got != expected {
                        diverged(Some(t.config()), format!("stale undo gave {got:?}"));
                    }
                }
            }
            false
        }
    }
}

fn check(s: &Subjects, mutated: bool, diverged: &mut impl FnMut(Option<Config>, String)) {
    let expected = s.oracle.lookup();
    let log = s.oracle.log();
    if let Some(d) = same(&expected, &s.list.lookup()) {
        diverged(None, format!("lookup: {d}"));
    }
    if !s.list.values().eq(log) {
        diverged(None, "flatten differs from oracle log".into());
    }
    for t in &s.trees {
        let c = Some(t.config());
        if let Some(d) = same(&expected, &t.lookup()) {
            diverged(c, format!("lookup: {d}"));
        }
        if !log.is_empty() {
            let bound = complexity::visit_bound(log.len() as u64, t.config().start_depth)
                .unwrap_or(u64::MAX);
            if t.visits().last > bound {
                diverged(c, format!("lookup visited {} nodes, bound {bound}", t.visits().last));
            }
        }
        if !t.values().eq(log) {
            diverged(c, "flatten differs from oracle log".into());
        }
        if mutated {
            if let Err(v) = t.validate() {
                diverged(c, format!("validate: {v}"));
            }
        }
    }
}
