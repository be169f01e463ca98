//! Adaptive subdivision prover for `f <= -margin` (or `<`) over a box.
//!
//! Cells are processed depth first in fixed-size batches. Each batch is
//! evaluated in parallel and merged in order, so the report does not depend
//! on the number of worker threads.

use rayon::prelude::*;
use thiserror::Error;

use crate::expr::{CompileError, Evaluator, Expr};
use crate::interval::Interval;
use crate::taylor::{combined_upper_bound, partial_signs, upper_bound, IntervalBox, Sign};

const BATCH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    /// Certify `f < -margin`.
    Strict,
    /// Certify `f <= -margin`.
    NonStrict,
}

impl Strictness {
    fn certifies(self, upper: f64, margin: f64) -> bool {
        match self {
            Strictness::Strict => upper < -margin,
            Strictness::NonStrict => upper <= -margin,
        }
    }

    /// True when a point with value enclosure `v` certainly violates the claim.
    fn refutes(self, v: Interval, margin: f64) -> bool {
        match self {
            Strictness::Strict => v.lo() >= -margin,
            Strictness::NonStrict => v.lo() > -margin,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Strictness::Strict => "strict",
            Strictness::NonStrict => "non-strict",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProofTask {
    pub expr: Expr,
    pub domain: IntervalBox,
    pub margin: f64,
    pub strictness: Strictness,
    /// Side conditions `φ >= 0`; the claim is only required where all hold.
    pub constraints: Vec<Expr>,
}

impl ProofTask {
    pub fn new(expr: Expr, domain: IntervalBox) -> Self {
        Self {
            expr,
            domain,
            margin: 0.0,
            strictness: Strictness::Strict,
            constraints: Vec::new(),
        }
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    pub fn with_strictness(mut self, s: Strictness) -> Self {
        self.strictness = s;
        self
    }

    pub fn with_constraints(mut self, cs: Vec<Expr>) -> Self {
        self.constraints = cs;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitRule {
    /// Bisect the widest non-degenerate component, ties to the lowest index.
    Widest,
}

#[derive(Debug, Clone)]
pub struct ProverConfig {
    pub max_cells: usize,
    pub max_depth: usize,
    pub min_width: f64,
    pub split_rule: SplitRule,
    /// Worker threads; 0 uses the global pool, 1 runs inline.
    pub threads: usize,
    pub record_leaves: bool,
    pub stop_on_counterexample: bool,
}

impl Default for ProverConfig {
    fn default() -> Self {
        Self {
            max_cells: 200_000,
            max_depth: 60,
            min_width: 1e-9,
            split_rule: SplitRule::Widest,
            threads: 0,
            record_leaves: false,
            stop_on_counterexample: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProverError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProofStatus {
    Proven,
    Undecided,
    EvaluationFailure,
}

impl ProofStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ProofStatus::Proven => "proven",
            ProofStatus::Undecided => "undecided",
            ProofStatus::EvaluationFailure => "evaluation-failure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafVerdict {
    Certified,
    /// Some side condition is certainly violated on the whole cell.
    Infeasible,
    Undecided,
    Failed,
}

/// A processed leaf: `region` is the part of the domain it accounts for,
/// `cell` the (possibly collapsed) box that was actually bounded.
#[derive(Debug, Clone, PartialEq)]
pub struct Leaf {
    pub region: IntervalBox,
    pub cell: IntervalBox,
    pub depth: usize,
    pub verdict: LeafVerdict,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub point: Vec<f64>,
    pub value: Interval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProofReport {
    pub status: ProofStatus,
    pub undecided: Vec<IntervalBox>,
    pub failed: Vec<IntervalBox>,
    pub cells_processed: usize,
    pub max_depth_reached: usize,
    /// Largest upper bound over all leaves; `+inf` when some leaf had none.
    pub best_upper_bound_seen: f64,
    pub counterexample: Option<Counterexample>,
    pub leaves: Option<Vec<Leaf>>,
}

impl ProofReport {
    pub fn is_proven(&self) -> bool {
        self.status == ProofStatus::Proven
    }
}

struct Compiled {
    f: Evaluator,
    constraints: Vec<Evaluator>,
}

#[derive(Clone)]
struct WorkItem {
    region: IntervalBox,
    cell: IntervalBox,
    depth: usize,
}

enum Outcome {
    Leaf(Leaf, Option<Counterexample>),
    Split(Box<(WorkItem, WorkItem)>, Option<Counterexample>),
}

/// Collapses every component whose partial derivative has a certified sign
/// to the endpoint where `f` is larger. The supremum over the result equals
/// the supremum over `cell`.
pub fn reduce_cell(ev: &Evaluator, cell: &IntervalBox) -> IntervalBox {
    let signs = partial_signs(ev, cell);
    let mut out = cell.clone();
    for (i, s) in signs.into_iter().enumerate() {
        let d = cell.dims()[i];
        match s {
            Sign::StrictlyPositive => out = out.with_dim(i, Interval::point(d.hi())),
            Sign::StrictlyNegative => out = out.with_dim(i, Interval::point(d.lo())),
            Sign::Unknown => {}
        }
    }
    out
}

fn process(task: &ProofTask, cfg: &ProverConfig, c: &Compiled, item: WorkItem) -> Outcome {
    let leaf = |cell: IntervalBox, verdict, upper| Leaf {
        region: item.region.clone(),
        cell,
        depth: item.depth,
        verdict,
        upper,
    };
    // Side conditions: a cell where some φ < 0 everywhere needs no proof.
    for phi in &c.constraints {
        if let Ok(v) = phi.value(item.cell.dims()) {
            if v.hi() < 0.0 {
                return Outcome::Leaf(leaf(item.cell.clone(), LeafVerdict::Infeasible, f64::NEG_INFINITY), None);
            }
        }
    }
    let cell = if c.constraints.is_empty() {
        reduce_cell(&c.f, &item.cell)
    } else {
        item.cell.clone()
    };
    let bound = upper_bound(&c.f, &cell);
    let upper = bound.clone().unwrap_or(f64::INFINITY);
    if let Ok(u) = bound {
        if task.strictness.certifies(u, task.margin) {
            return Outcome::Leaf(leaf(cell, LeafVerdict::Certified, u), None);
        }
    }
    if let Some(u) = lagrangian_bound(task, c, &cell) {
        return Outcome::Leaf(leaf(cell, LeafVerdict::Certified, u), None);
    }
    let counterexample = find_counterexample(task, c, &cell);
    let splittable = cell
        .widest_dim()
        .filter(|&i| cell.dims()[i].width() >= cfg.min_width && item.depth < cfg.max_depth);
    match splittable {
        Some(i) => {
            let (l, r) = cell.bisect(i);
            let (rl, rr) = item.region.bisect(i);
            let children = (
                WorkItem {
                    region: rl,
                    cell: l,
                    depth: item.depth + 1,
                },
                WorkItem {
                    region: rr,
                    cell: r,
                    depth: item.depth + 1,
                },
            );
            Outcome::Split(Box::new(children), counterexample)
        }
        None => {
            let verdict = if bound.is_err() {
                LeafVerdict::Failed
            } else {
                LeafVerdict::Undecided
            };
            Outcome::Leaf(leaf(cell, verdict, upper), counterexample)
        }
    }
}

/// Tries `f + λφ` for each side condition, with `λ >= 0` chosen to cancel the
/// gradients at the center. On the feasible part `λφ >= 0`, so a bound on
/// the sum bounds `f` there.
fn lagrangian_bound(task: &ProofTask, c: &Compiled, cell: &IntervalBox) -> Option<f64> {
    if c.constraints.is_empty() {
        return None;
    }
    let center = cell.center_box();
    let gf = c.f.germ(&center).ok()?.df;
    for phi in &c.constraints {
        let Ok(gp) = phi.germ(&center) else { continue };
        let dot: f64 = gf.iter().zip(&gp.df).map(|(a, b)| a.mid() * b.mid()).sum();
        let norm: f64 = gp.df.iter().map(|b| b.mid() * b.mid()).sum();
        let lambda = -dot / norm;
        if !(lambda.is_finite() && lambda > 0.0) {
            continue;
        }
        if let Ok(u) = combined_upper_bound(&[(&c.f, 1.0), (phi, lambda)], cell) {
            if task.strictness.certifies(u, task.margin) {
                return Some(u);
            }
        }
    }
    None
}

fn find_counterexample(task: &ProofTask, c: &Compiled, cell: &IntervalBox) -> Option<Counterexample> {
    let point = cell.center();
    let pbox = cell.center_box();
    let value = c.f.value(&pbox).ok()?;
    if !task.strictness.refutes(value, task.margin) {
        return None;
    }
    for phi in &c.constraints {
        if phi.value(&pbox).ok()?.lo() < 0.0 {
            return None;
        }
    }
    Some(Counterexample { point, value })
}

/// Attempts to certify `f <= -margin` (or `<`) on the task domain.
pub fn prove_negative(task: &ProofTask, cfg: &ProverConfig) -> Result<ProofReport, ProverError> {
    let n = task.domain.len();
    if !(task.margin >= 0.0 && task.margin.is_finite()) {
        return Err(ProverError::InvalidTask(format!("margin {} must be finite and >= 0", task.margin)));
    }
    if cfg.max_cells == 0 || !(cfg.min_width > 0.0) {
        return Err(ProverError::InvalidConfig("max_cells >= 1 and min_width > 0 required".into()));
    }
    let compiled = Compiled {
        f: Evaluator::compile(&task.expr, n)?,
        constraints: task
            .constraints
            .iter()
            .map(|e| Evaluator::compile(e, n))
            .collect::<Result<_, _>>()?,
    };
    let run = || run_prover(task, cfg, &compiled);
    if cfg.threads <= 1 {
        Ok(run())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| ProverError::InvalidConfig(e.to_string()))?;
        Ok(pool.install(run))
    }
}

fn run_prover(task: &ProofTask, cfg: &ProverConfig, c: &Compiled) -> ProofReport {
    let mut stack = vec![WorkItem {
        region: task.domain.clone(),
        cell: task.domain.clone(),
        depth: 0,
    }];
    let mut report = ProofReport {
        status: ProofStatus::Proven,
        undecided: Vec::new(),
        failed: Vec::new(),
        cells_processed: 0,
        max_depth_reached: 0,
        best_upper_bound_seen: f64::NEG_INFINITY,
        counterexample: None,
        leaves: cfg.record_leaves.then(Vec::new),
    };
    let mut stopped = false;
    while !stack.is_empty() && !stopped {
        let room = cfg.max_cells - report.cells_processed;
        if room == 0 {
            break;
        }
        let take = BATCH.min(room).min(stack.len());
        // Top of the stack first, so the batch is processed in DFS order.
        let batch: Vec<WorkItem> = (0..take).map(|_| stack.pop().expect("nonempty")).collect();
        let outcomes: Vec<Outcome> = if cfg.threads == 1 {
            batch.iter().cloned().map(|w| process(task, cfg, c, w)).collect()
        } else {
            batch.par_iter().cloned().map(|w| process(task, cfg, c, w)).collect()
        };
        let mut pushed: Vec<WorkItem> = Vec::new();
        let mut unmerged: Vec<WorkItem> = Vec::new();
        for (item, outcome) in batch.into_iter().zip(outcomes) {
            if stopped {
                unmerged.push(item);
                continue;
            }
            report.cells_processed += 1;
            report.max_depth_reached = report.max_depth_reached.max(item.depth);
            let cex = match outcome {
                Outcome::Leaf(leaf, cex) => {
                    report.best_upper_bound_seen = report.best_upper_bound_seen.max(leaf.upper);
                    match leaf.verdict {
                        LeafVerdict::Undecided => report.undecided.push(leaf.cell.clone()),
                        LeafVerdict::Failed => report.failed.push(leaf.cell.clone()),
                        LeafVerdict::Certified | LeafVerdict::Infeasible => {}
                    }
                    if let Some(leaves) = report.leaves.as_mut() {
                        leaves.push(leaf);
                    }
                    cex
                }
                Outcome::Split(children, cex) => {
                    let (l, r) = *children;
                    // Right child below left so the left is popped first.
                    pushed.push(r);
                    pushed.push(l);
                    cex
                }
            };
            if let Some(cex) = cex {
                if report.counterexample.is_none() {
                    report.counterexample = Some(cex);
                }
                if cfg.stop_on_counterexample {
                    stopped = true;
                }
            }
        }
        // Children of later batch items must be popped after earlier ones:
        // push pairs in reverse batch order.
        for pair in pushed.chunks(2).rev() {
            stack.extend(pair.iter().cloned());
        }
        for item in unmerged.into_iter().rev() {
            stack.push(item);
        }
    }
    // Whatever is left unprocessed is reported as undecided frontier.
    for item in stack.into_iter().rev() {
        report.best_upper_bound_seen = f64::INFINITY;
        report.undecided.push(item.cell);
    }
    report.status = if !report.failed.is_empty() {
        ProofStatus::EvaluationFailure
    } else if !report.undecided.is_empty() || report.counterexample.is_some() {
        ProofStatus::Undecided
    } else {
        ProofStatus::Proven
    };
    report
}
