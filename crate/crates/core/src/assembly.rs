//! Linear assembly problems: local nonlinear domains joined by linear rows.
//!
//! A certificate `(M, x*, r, w, t0)` proves `sup c·x <= M` once, for every
//! domain `D`, the function
//!
//! ```text
//! E_D(x) = Σ_j (c_j - (wA)_j)(x_j - x*_j) + Σ_φ r_φ φ(x) + t0
//! ```
//!
//! is certified `<= 0` on the domain and
//! `M + d·t0 - c·x* - w·(b - A x*) >= 0` holds, where `d` is the number of
//! domains. Summing the domain inequalities over a feasible `x` telescopes to
//! `c·x <= M`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::expr::{Constant, Evaluator, Expr};
use crate::interval::{add_up, div_up, exact_decimal, Interval, IntervalError};
use crate::lp::{self, LpError, LpProblem};
use crate::prover::{prove_negative, ProofReport, ProofTask, ProverConfig, ProverError, Strictness};
use crate::taylor::IntervalBox;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalDomain {
    pub id: String,
    pub vars: Vec<String>,
    pub bounds: IntervalBox,
    /// Each `φ` means `φ(x) >= 0`, over the local variables `x0..`.
    pub constraints: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssemblyProblem {
    pub domains: Vec<LocalDomain>,
    /// Global variable `i` lives in `mapping[i] = (domain, slot)`.
    pub mapping: Vec<(usize, usize)>,
    pub a: Vec<Vec<Interval>>,
    pub b: Vec<Interval>,
    pub c: Vec<Interval>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssemblyError {
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("cut `{id}` rejected: prover status {status}")]
    CutRejected { id: String, status: String, report: Box<ProofReport> },
    #[error("no candidate certificate: {0}")]
    NoCandidate(String),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("cannot branch: {0}")]
    Branch(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Prover(#[from] ProverError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

impl AssemblyProblem {
    pub fn num_vars(&self) -> usize {
        self.mapping.len()
    }

    pub fn validate(&self) -> Result<(), AssemblyError> {
        let n = self.num_vars();
        let mut seen: Vec<Vec<bool>> = self.domains.iter().map(|d| vec![false; d.vars.len()]).collect();
        for (i, &(d, s)) in self.mapping.iter().enumerate() {
            let slot = seen
                .get_mut(d)
                .and_then(|v| v.get_mut(s))
                .ok_or_else(|| AssemblyError::Invalid(format!("variable {i} maps to missing slot ({d}, {s})")))?;
            if *slot {
                return Err(AssemblyError::Invalid(format!("slot ({d}, {s}) mapped twice")));
            }
            *slot = true;
        }
        if let Some((d, _)) = seen.iter().enumerate().find(|(_, v)| v.iter().any(|x| !x)) {
            return Err(AssemblyError::Invalid(format!("domain {d} has an unmapped slot")));
        }
        for (k, dom) in self.domains.iter().enumerate() {
            if dom.bounds.len() != dom.vars.len() {
                return Err(AssemblyError::Invalid(format!("domain {k} box has wrong dimension")));
            }
            if let Some(phi) = dom.constraints.iter().find(|e| e.min_arity() > dom.vars.len()) {
                return Err(AssemblyError::Invalid(format!("constraint `{phi}` uses undeclared variables")));
            }
        }
        if self.c.len() != n || self.a.len() != self.b.len() || self.a.iter().any(|r| r.len() != n) {
            return Err(AssemblyError::Invalid("A, b, c dimensions are inconsistent".into()));
        }
        Ok(())
    }

    /// Global index of `(domain, slot)`.
    pub fn global_index(&self, d: usize, s: usize) -> Option<usize> {
        self.mapping.iter().position(|&m| m == (d, s))
    }

    /// Global variables of domain `d`, in slot order.
    pub fn domain_globals(&self, d: usize) -> Vec<usize> {
        let k = self.domains[d].vars.len();
        (0..k).map(|s| self.global_index(d, s).expect("validated mapping")).collect()
    }

    pub fn global_bounds(&self) -> Vec<Interval> {
        self.mapping.iter().map(|&(d, s)| self.domains[d].bounds.dims()[s]).collect()
    }

    /// Splits a global point into per-domain local points.
    pub fn localize(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = self.domains.iter().map(|d| vec![0.0; d.vars.len()]).collect();
        for (i, &(d, s)) in self.mapping.iter().enumerate() {
            out[d][s] = x[i];
        }
        out
    }
}

/// A linear cut `coeffs · x_D <= offset` on one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub id: String,
    pub domain: usize,
    pub coeffs: Vec<f64>,
    pub offset: f64,
}

fn linear_expr(coeffs: &[f64], offset: f64) -> Expr {
    let terms = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &a)| a != 0.0)
        .map(|(j, &a)| Expr::mul(Expr::constant(exact_decimal(a)), Expr::var(j)));
    Expr::sub(Expr::sum(terms), Expr::constant(exact_decimal(offset)))
}

/// Replaces the nonlinear constraints by certified linear cuts. The result
/// has the domain boxes as variable bounds, `A x <= b` plus the cuts as rows.
pub fn relax_linear(p: &AssemblyProblem, cuts: &[Cut], cfg: &ProverConfig) -> Result<LpProblem, AssemblyError> {
    p.validate()?;
    let n = p.num_vars();
    let mut aineq = p.a.clone();
    let mut bineq = p.b.clone();
    for cut in cuts {
        let dom = p
            .domains
            .get(cut.domain)
            .ok_or_else(|| AssemblyError::Invalid(format!("cut `{}` names missing domain", cut.id)))?;
        if cut.coeffs.len() != dom.vars.len() {
            return Err(AssemblyError::Invalid(format!("cut `{}` has wrong length", cut.id)));
        }
        let task = ProofTask::new(linear_expr(&cut.coeffs, cut.offset), dom.bounds.clone())
            .with_strictness(Strictness::NonStrict)
            .with_constraints(dom.constraints.clone());
        let report = prove_negative(&task, cfg)?;
        if !report.is_proven() {
            return Err(AssemblyError::CutRejected {
                id: cut.id.clone(),
                status: report.status.as_str().to_string(),
                report: Box::new(report),
            });
        }
        let mut row = vec![Interval::ZERO; n];
        for (s, g) in p.domain_globals(cut.domain).into_iter().enumerate() {
            row[g] = Interval::point(cut.coeffs[s]);
        }
        aineq.push(row);
        bineq.push(Interval::point(cut.offset));
    }
    let lp = LpProblem {
        aeq: Vec::new(),
        beq: Vec::new(),
        aineq,
        bineq,
        c: p.c.clone(),
        var_bounds: p.global_bounds(),
    };
    lp.validate()?;
    Ok(lp)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualityCertificate {
    pub m: f64,
    pub x_star: Vec<f64>,
    /// `r[d][k]` multiplies constraint `k` of domain `d`.
    pub r: Vec<Vec<f64>>,
    /// Multipliers for the retained rows, in the order of `retained`.
    pub w: Vec<f64>,
    pub retained: Vec<usize>,
    pub t0: f64,
    pub seed: u64,
    pub binding_tolerance: f64,
}

/// Relative tolerance for calling a row binding at `x*`.
pub const BINDING_TOLERANCE: f64 = 1e-8;

fn row_slack(row: &[Interval], b: Interval, x: &[f64]) -> f64 {
    b.mid() - row.iter().zip(x).map(|(a, v)| a.mid() * v).sum::<f64>()
}

/// Rows with `|A_k x* - b_k| <= tol (1 + |b_k|)`.
pub fn binding_rows(p: &AssemblyProblem, x_star: &[f64], tol: f64) -> Vec<usize> {
    (0..p.a.len())
        .filter(|&k| row_slack(&p.a[k], p.b[k], x_star).abs() <= tol * (1.0 + p.b[k].mag()))
        .collect()
}

/// Box corners (all of them up to 10 dimensions), the center, and `count`
/// seeded uniform points for each domain.
pub fn default_test_points(p: &AssemblyProblem, count: usize, seed: u64) -> Vec<Vec<Vec<f64>>> {
    p.domains
        .iter()
        .enumerate()
        .map(|(d, dom)| {
            let dims = dom.bounds.dims();
            let k = dims.len();
            let mut pts = Vec::new();
            if k <= 10 {
                for mask in 0u32..(1 << k) {
                    pts.push(
                        dims.iter()
                            .enumerate()
                            .map(|(i, iv)| if mask >> i & 1 == 1 { iv.hi() } else { iv.lo() })
                            .collect(),
                    );
                }
            }
            pts.push(dom.bounds.center());
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (d as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            for _ in 0..count {
                pts.push(
                    dims.iter()
                        .map(|iv| if iv.is_point() { iv.lo() } else { rng.gen_range(iv.lo()..=iv.hi()) })
                        .collect(),
                );
            }
            pts
        })
        .collect()
}

/// `t0` rounded up so that the global inequality holds by construction.
fn compute_t0(p: &AssemblyProblem, cert: &DualityCertificate) -> Result<f64, AssemblyError> {
    let s = objective_side(p, &cert.x_star, &cert.w, &cert.retained)?;
    let d = p.domains.len() as f64;
    Ok(div_up(add_up(s.hi(), -cert.m), d))
}

/// Enclosure of `c·x* + w·(b - A x*)`.
fn objective_side(p: &AssemblyProblem, x: &[f64], w: &[f64], rows: &[usize]) -> Result<Interval, AssemblyError> {
    let mut s = Interval::ZERO;
    for (cj, &xj) in p.c.iter().zip(x) {
        s = s.add(&cj.mul(&Interval::point(xj))?)?;
    }
    for (&k, &wk) in rows.iter().zip(w) {
        let mut slack = p.b[k];
        for (a, &xj) in p.a[k].iter().zip(x) {
            slack = slack.sub(&a.mul(&Interval::point(xj))?)?;
        }
        s = s.add(&slack.mul(&Interval::point(wk))?)?;
    }
    Ok(s)
}

/// Maximizes the uniform slack `t` of the domain inequalities over the test
/// points, then sets `t0` from `M`. No rigor is claimed.
pub fn fit_dual(
    p: &AssemblyProblem,
    x_star: &[f64],
    m: f64,
    test_points: &[Vec<Vec<f64>>],
    seed: u64,
) -> Result<DualityCertificate, AssemblyError> {
    p.validate()?;
    if x_star.len() != p.num_vars() {
        return Err(AssemblyError::Invalid("x* has the wrong length".into()));
    }
    if test_points.len() != p.domains.len() || test_points.iter().all(Vec::is_empty) {
        return Err(AssemblyError::NoCandidate("no test points".into()));
    }
    let retained = binding_rows(p, x_star, BINDING_TOLERANCE);
    let nr: usize = p.domains.iter().map(|d| d.constraints.len()).sum();
    let nw = retained.len();
    // LP variables: t, r (flattened), w.
    let nvar = 1 + nr + nw;
    let c_mid: Vec<f64> = p.c.iter().map(Interval::mid).collect();
    let local_star = p.localize(x_star);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut r_offset = 1;
    for (d, dom) in p.domains.iter().enumerate() {
        let globals = p.domain_globals(d);
        let evals: Vec<&Expr> = dom.constraints.iter().collect();
        for x in &test_points[d] {
            let mut row = vec![0.0; nvar];
            row[0] = 1.0;
            for (k, phi) in evals.iter().enumerate() {
                let v = phi.eval_f64(x);
                if !v.is_finite() {
                    continue;
                }
                row[r_offset + k] = v;
            }
            for (q, &k) in retained.iter().enumerate() {
                row[1 + nr + q] = globals
                    .iter()
                    .enumerate()
                    .map(|(s, &g)| p.a[k][g].mid() * (local_star[d][s] - x[s]))
                    .sum();
            }
            let lin: f64 = globals.iter().enumerate().map(|(s, &g)| c_mid[g] * (x[s] - local_star[d][s])).sum();
            if row.iter().all(|v| v.is_finite()) && lin.is_finite() {
                rows.push(row);
                rhs.push(-lin);
            }
        }
        r_offset += dom.constraints.len();
    }
    let scale = 1.0 + m.abs() + c_mid.iter().map(|v| v.abs()).sum::<f64>();
    let mut bounds = vec![(-1e3 * scale, 1e3 * scale)];
    bounds.extend(std::iter::repeat_n((0.0, 1e4), nr + nw));
    let mut obj = vec![0.0; nvar];
    obj[0] = 1.0;
    let lp_problem = LpProblem::from_f64(&[], &[], &rows, &rhs, &obj, &bounds)?;
    let sol = lp::solve_approx(&lp_problem).map_err(|e| AssemblyError::NoCandidate(e.to_string()))?;
    let clean = |v: f64| if v > 1e-12 { v } else { 0.0 };
    let mut r = Vec::new();
    let mut off = 1;
    for dom in &p.domains {
        r.push(sol.x[off..off + dom.constraints.len()].iter().map(|&v| clean(v)).collect());
        off += dom.constraints.len();
    }
    let w = sol.x[1 + nr..].iter().map(|&v| clean(v)).collect();
    let mut cert = DualityCertificate {
        m,
        x_star: x_star.to_vec(),
        r,
        w,
        retained,
        t0: 0.0,
        seed,
        binding_tolerance: BINDING_TOLERANCE,
    };
    cert.t0 = compute_t0(p, &cert)?;
    Ok(cert)
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub prover: ProverConfig,
    pub strictness: Strictness,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            prover: ProverConfig {
                stop_on_counterexample: true,
                ..ProverConfig::default()
            },
            strictness: Strictness::NonStrict,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DualityVerdict {
    Certified { m: f64 },
    Refuted { domain: String, report: Box<ProofReport> },
    /// The global inequality `M + d t0 - c·x* - w(b - Ax*) >= 0` failed.
    GlobalCheckFailed { lower: f64 },
}

impl DualityVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, DualityVerdict::Certified { .. })
    }
}

/// The expression `E_D` whose nonpositivity on domain `d` is required.
pub fn domain_expression(p: &AssemblyProblem, cert: &DualityCertificate, d: usize) -> Result<Expr, AssemblyError> {
    let globals = p.domain_globals(d);
    let mut terms = Vec::new();
    for (s, &g) in globals.iter().enumerate() {
        let mut coef = p.c[g];
        for (&k, &wk) in cert.retained.iter().zip(&cert.w) {
            coef = coef.sub(&p.a[k][g].mul(&Interval::point(wk))?)?;
        }
        if coef == Interval::ZERO {
            continue;
        }
        let shifted = Expr::sub(Expr::var(s), Expr::constant(exact_decimal(cert.x_star[g])));
        terms.push(Expr::mul(Expr::Const(Constant::enclosure(coef)), shifted));
    }
    for (phi, &rk) in p.domains[d].constraints.iter().zip(&cert.r[d]) {
        if rk != 0.0 {
            terms.push(Expr::mul(Expr::constant(exact_decimal(rk)), phi.clone()));
        }
    }
    terms.push(Expr::constant(exact_decimal(cert.t0)));
    Ok(Expr::sum(terms))
}

fn check_certificate(p: &AssemblyProblem, cert: &DualityCertificate) -> Result<(), AssemblyError> {
    let bad = |m: &str| Err(AssemblyError::InvalidCertificate(m.to_string()));
    if cert.x_star.len() != p.num_vars() {
        return bad("x* has the wrong length");
    }
    if cert.r.len() != p.domains.len() || cert.r.iter().zip(&p.domains).any(|(r, d)| r.len() != d.constraints.len()) {
        return bad("r does not match the domain constraints");
    }
    if cert.w.len() != cert.retained.len() || cert.retained.iter().any(|&k| k >= p.a.len()) {
        return bad("w does not match the retained rows");
    }
    let all = cert.r.iter().flatten().chain(&cert.w);
    if all.clone().any(|&v| !(v >= 0.0 && v.is_finite())) {
        return bad("multipliers must be finite and nonnegative");
    }
    if !cert.m.is_finite() || !cert.t0.is_finite() || cert.x_star.iter().any(|v| !v.is_finite()) {
        return bad("non-finite scalar");
    }
    for &k in &cert.retained {
        let s = row_slack(&p.a[k], p.b[k], &cert.x_star);
        if s.abs() > cert.binding_tolerance * (1.0 + p.b[k].mag()) {
            return Err(AssemblyError::InvalidCertificate(format!("retained row {k} is not binding at x* (slack {s:e})")));
        }
    }
    Ok(())
}

/// Checks a certificate rigorously.
pub fn verify_duality(
    p: &AssemblyProblem,
    cert: &DualityCertificate,
    cfg: &VerifyConfig,
) -> Result<DualityVerdict, AssemblyError> {
    p.validate()?;
    check_certificate(p, cert)?;
    let s = objective_side(p, &cert.x_star, &cert.w, &cert.retained)?;
    let d = Interval::point(p.domains.len() as f64);
    let global = Interval::point(cert.m).add(&d.mul(&Interval::point(cert.t0))?)?.sub(&s)?;
    if global.lo() < 0.0 {
        return Ok(DualityVerdict::GlobalCheckFailed { lower: global.lo() });
    }
    let exprs = (0..p.domains.len())
        .map(|k| domain_expression(p, cert, k))
        .collect::<Result<Vec<_>, _>>()?;
    let results: Vec<Result<ProofReport, ProverError>> = exprs
        .par_iter()
        .enumerate()
        .map(|(k, e)| verify_domain(&p.domains[k], e, cfg))
        .collect();
    for (k, r) in results.into_iter().enumerate() {
        let report = r?;
        if !report.is_proven() {
            return Ok(DualityVerdict::Refuted {
                domain: p.domains[k].id.clone(),
                report: Box::new(report),
            });
        }
    }
    Ok(DualityVerdict::Certified { m: cert.m })
}

/// First over the whole box (monotonicity reduction available). Only an
/// inconclusive run without a sampled violation is retried on the constraint
/// set; a violation, even at an infeasible point, means the multipliers need
/// refitting.
fn verify_domain(dom: &LocalDomain, e: &Expr, cfg: &VerifyConfig) -> Result<ProofReport, ProverError> {
    let task = ProofTask::new(e.clone(), dom.bounds.clone()).with_strictness(cfg.strictness);
    let report = prove_negative(&task, &cfg.prover)?;
    if report.is_proven() || report.counterexample.is_some() || dom.constraints.is_empty() {
        return Ok(report);
    }
    let task = task.with_constraints(dom.constraints.clone());
    prove_negative(&task, &cfg.prover)
}

/// Bisects one box component of one domain.
pub fn branch(p: &AssemblyProblem, domain: usize, slot: usize) -> Result<(AssemblyProblem, AssemblyProblem), AssemblyError> {
    let dom = p
        .domains
        .get(domain)
        .ok_or_else(|| AssemblyError::Branch(format!("no domain {domain}")))?;
    let comp = *dom
        .bounds
        .dims()
        .get(slot)
        .ok_or_else(|| AssemblyError::Branch(format!("no slot {slot} in domain {}", dom.id)))?;
    if comp.is_point() {
        return Err(AssemblyError::Branch(format!("component {slot} of {} is degenerate", dom.id)));
    }
    let (l, r) = dom.bounds.bisect(slot);
    let mut a = p.clone();
    let mut b = p.clone();
    a.domains[domain].bounds = l;
    b.domains[domain].bounds = r;
    Ok((a, b))
}

/// Widest box component over all domains, ties to the first.
pub fn branch_choice(p: &AssemblyProblem) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), f64)> = None;
    for (d, dom) in p.domains.iter().enumerate() {
        for (s, iv) in dom.bounds.dims().iter().enumerate() {
            let w = iv.width();
            if w > 0.0 && best.is_none_or(|(_, bw)| w > bw) {
                best = Some(((d, s), w));
            }
        }
    }
    best.map(|(k, _)| k)
}

#[derive(Debug, Clone)]
pub struct BranchConfig {
    pub max_depth: usize,
    pub test_points: usize,
    pub seed: u64,
    pub verify: VerifyConfig,
}

impl Default for BranchConfig {
    fn default() -> Self {
        Self {
            max_depth: 6,
            test_points: 32,
            seed: 1,
            verify: VerifyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome {
    pub certified: bool,
    pub leaves: usize,
    pub failed_leaves: usize,
}

/// Fits and verifies; on failure bisects the widest component and recurses.
/// `x*` is projected into each child box.
pub fn certify_with_branching(
    p: &AssemblyProblem,
    x_star: &[f64],
    m: f64,
    cfg: &BranchConfig,
) -> Result<BranchOutcome, AssemblyError> {
    fn rec(
        p: &AssemblyProblem,
        x_star: &[f64],
        m: f64,
        cfg: &BranchConfig,
        depth: usize,
    ) -> Result<BranchOutcome, AssemblyError> {
        let bounds = p.global_bounds();
        let x: Vec<f64> = x_star
            .iter()
            .zip(&bounds)
            .map(|(v, b)| v.clamp(b.lo(), b.hi()))
            .collect();
        let pts = default_test_points(p, cfg.test_points, cfg.seed);
        let ok = match fit_dual(p, &x, m, &pts, cfg.seed) {
            Ok(cert) => verify_duality(p, &cert, &cfg.verify)?.is_certified(),
            Err(AssemblyError::NoCandidate(_)) => false,
            Err(e) => return Err(e),
        };
        if ok {
            return Ok(BranchOutcome {
                certified: true,
                leaves: 1,
                failed_leaves: 0,
            });
        }
        let choice = branch_choice(p);
        if depth >= cfg.max_depth || choice.is_none() {
            return Ok(BranchOutcome {
                certified: false,
                leaves: 1,
                failed_leaves: 1,
            });
        }
        let (d, s) = choice.expect("checked");
        let (a, b) = branch(p, d, s)?;
        let ra = rec(&a, &x, m, cfg, depth + 1)?;
        let rb = rec(&b, &x, m, cfg, depth + 1)?;
        Ok(BranchOutcome {
            certified: ra.certified && rb.certified,
            leaves: ra.leaves + rb.leaves,
            failed_leaves: ra.failed_leaves + rb.failed_leaves,
        })
    }
    p.validate()?;
    rec(p, x_star, m, cfg, 0)
}

/// Compiles all domain constraints, for sampling feasibility.
pub fn compile_constraints(p: &AssemblyProblem) -> Result<Vec<Vec<Evaluator>>, AssemblyError> {
    p.domains
        .iter()
        .map(|d| {
            d.constraints
                .iter()
                .map(|e| Evaluator::compile(e, d.vars.len()).map_err(|e| AssemblyError::Invalid(e.to_string())))
                .collect()
        })
        .collect()
}

/// Disk radius of the truncated-sector model.
pub const SECTOR_RADIUS: f64 = 1.1;

const TWO_PI: &str = "6.28318530717958647692528676655900576839433879875";

fn segment_half(y: &str) -> String {
    // Half of the disk segment cut off by the bisector at distance y/2.
    let h = format!("sqrt(1.21 - pow({y}, 2)/4)");
    format!("0.5*(1.21*atan({h}, {y}/2) - {y}/2*{h})")
}

/// Truncated area of one sector: slots `A, ya, yb, alpha`.
pub fn sector_area_expr() -> Expr {
    let text = format!("0.605*x3 - {} - {}", segment_half("x1"), segment_half("x2"));
    Expr::parse(&text, 4).expect("well-formed sector area")
}

/// `n` sectors around one center: minimize the total truncated area subject
/// to the angles summing to `2π` and neighbouring distances agreeing. The
/// objective is `max -Σ A_i`.
pub fn sector_problem(n: usize) -> AssemblyProblem {
    let area = sector_area_expr();
    let a = Expr::var(0);
    let pi3 = Interval::parse_literal("1.0471975511965976..1.0471975511965979").expect("literal");
    let domains = (0..n)
        .map(|i| LocalDomain {
            id: format!("sector{i}"),
            vars: vec![format!("A{i}"), format!("ya{i}"), format!("yb{i}"), format!("alpha{i}")],
            bounds: IntervalBox::new(vec![
                Interval::new(0.5, 1.3).expect("bounds"),
                Interval::new(2.0, 2.1).expect("bounds"),
                Interval::new(2.0, 2.1).expect("bounds"),
                Interval::new(pi3.lo(), pi3.scale(2.0).expect("finite").hi()).expect("bounds"),
            ])
            .expect("finite box"),
            constraints: vec![Expr::sub(a.clone(), area.clone()), Expr::sub(area.clone(), a.clone())],
        })
        .collect();
    let nv = 4 * n;
    let mapping = (0..nv).map(|g| (g / 4, g % 4)).collect();
    let two_pi = Interval::from_decimal_string(TWO_PI).expect("2π");
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut sum = vec![Interval::ZERO; nv];
    for i in 0..n {
        sum[4 * i + 3] = Interval::ONE;
    }
    rows.push(sum.clone());
    rhs.push(two_pi);
    rows.push(sum.iter().map(|v| -*v).collect());
    rhs.push(-two_pi);
    for i in 0..n {
        // yb of sector i equals ya of sector i+1.
        let j = (i + 1) % n;
        let mut row = vec![Interval::ZERO; nv];
        row[4 * i + 2] = Interval::ONE;
        row[4 * j + 1] = -Interval::ONE;
        rows.push(row.clone());
        rhs.push(Interval::ZERO);
        rows.push(row.iter().map(|v| -*v).collect());
        rhs.push(Interval::ZERO);
    }
    let c = (0..nv).map(|g| if g % 4 == 0 { -Interval::ONE } else { Interval::ZERO }).collect();
    AssemblyProblem {
        domains,
        mapping,
        a: rows,
        b: rhs,
        c,
    }
}

/// The symmetric configuration (all distances 2, equal angles) and its
/// objective value `-Σ A_i`.
pub fn sector_reference(n: usize) -> (Vec<f64>, f64) {
    let alpha = std::f64::consts::TAU / n as f64;
    let area = sector_area_expr().eval_f64(&[0.0, 2.0, 2.0, alpha]);
    let x: Vec<f64> = (0..n).flat_map(|_| [area, 2.0, 2.0, alpha]).collect();
    (x, -area * n as f64)
}
