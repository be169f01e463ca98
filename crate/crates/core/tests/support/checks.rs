//! One function per acceptance criterion, parameterized by sample counts so
//! the integration tests can run reduced versions.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rigor::assembly::*;
use rigor::expr::{Evaluator, Expr};
use rigor::geom::{check_simplex_interior_point, Verdict};
use rigor::graphgen::*;
use rigor::interval::{Interval, IntervalError};
use rigor::lp::{augment_with_t, certify_upper_bound, clamp_dual, solve_approx};
use rigor::prover::{prove_negative, ProofStatus, ProofTask, ProverConfig};
use rigor::taylor::IntervalBox;
use rigor_oracles::atan::atan_f64;
use rigor_oracles::planar::{cuboctahedron, enumerate_sphere_graphs, FaceGraph};
use rigor_oracles::rational::{encloses, encloses_sqrt, from_f64, to_f64_approx};
use rigor_oracles::simplex::{solve, ExactOutcome};
use rigor_oracles::BigRational;

use super::*;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
    /// Deterministic summary of everything computed, for byte comparison.
    pub report: String,
}

impl Outcome {
    fn new(passed: bool, detail: String, report: String) -> Self {
        Self { passed, detail, report }
    }
}

// 1. Interval containment ----------------------------------------------------

fn random_double<R: Rng>(rng: &mut R) -> f64 {
    let sign = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
    match rng.gen_range(0..20) {
        0 => 0.0,
        1 => sign * rng.gen_range(0..8) as f64,
        2 => sign * rng.gen_range(1.0..2.0) * 2f64.powi(rng.gen_range(-1000..1000)),
        _ => sign * rng.gen_range(1.0..2.0) * 2f64.powi(rng.gen_range(-40..40)),
    }
}

fn random_interval<R: Rng>(rng: &mut R) -> Interval {
    let a = random_double(rng);
    if rng.gen_bool(0.2) {
        return Interval::point(a);
    }
    let b = if rng.gen_bool(0.5) {
        random_double(rng)
    } else {
        a + rng.gen_range(0.0..1.0) * a.abs().max(1e-300)
    };
    Interval::new(a.min(b), a.max(b)).expect("ordered")
}

fn random_member<R: Rng>(rng: &mut R, x: &Interval) -> f64 {
    match rng.gen_range(0..4) {
        0 => x.lo(),
        1 => x.hi(),
        _ => {
            let t = x.lo() + rng.gen_range(0.0..1.0) * (x.hi() - x.lo());
            if t.is_finite() {
                t.clamp(x.lo(), x.hi())
            } else {
                x.mid()
            }
        }
    }
}

const OPS: [&str; 12] = ["add", "sub", "mul", "div", "recip", "sqr", "powi", "sqrt", "atan", "neg", "abs", "scale"];

/// Returns `Ok(true)` when contained, `Ok(false)` on a violation, and
/// `Err(())` when the operation legitimately refused its operands.
fn containment_sample<R: Rng>(rng: &mut R, op: usize) -> Result<bool, ()> {
    let a = random_interval(rng);
    let b = random_interval(rng);
    let x = random_member(rng, &a);
    let y = random_member(rng, &b);
    let (qx, qy) = (from_f64(x), from_f64(y));
    let check = |r: Result<Interval, IntervalError>, exact: Option<BigRational>, legit_err: bool| match r {
        Ok(r) => Ok(exact.is_none_or(|v| encloses(r.lo(), r.hi(), &v))),
        Err(_) if legit_err => Err(()),
        Err(_) => Ok(false),
    };
    use num_traits::Zero;
    match OPS[op] {
        "add" => check(a.add(&b), Some(&qx + &qy), false),
        "sub" => check(a.sub(&b), Some(&qx - &qy), false),
        "mul" => check(a.mul(&b), Some(&qx * &qy), false),
        "div" => check(a.div(&b), (!qy.is_zero()).then(|| &qx / &qy), b.contains_zero()),
        "recip" => check(a.recip(), (!qx.is_zero()).then(|| qx.recip()), a.contains_zero()),
        "sqr" => check(a.sqr(), Some(&qx * &qx), false),
        "powi" => {
            let k = rng.gen_range(-3..=5);
            let exact = (k >= 0 || !qx.is_zero()).then(|| num_traits::pow::Pow::pow(&qx, k));
            check(a.powi(k), exact, k < 0 && a.contains_zero())
        }
        "sqrt" => {
            let a = a.abs();
            let x = random_member(rng, &a);
            match a.sqrt() {
                Ok(r) => Ok(encloses_sqrt(r.lo(), r.hi(), &from_f64(x))),
                Err(_) => Ok(false),
            }
        }
        "atan" => match a.atan() {
            Ok(r) => Ok(atan_f64(x).contains_in(r.lo(), r.hi())),
            Err(_) => Ok(false),
        },
        "neg" => check(Ok(a.neg()), Some(-qx), false),
        "abs" => check(Ok(a.abs()), Some(if x < 0.0 { -qx } else { qx }), false),
        _ => {
            let k = random_double(rng);
            check(a.scale(k), Some(&qx * from_f64(k)), false)
        }
    }
}

pub fn interval_containment(samples: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = vec![0usize; OPS.len()];
    let mut refused = 0;
    for i in 0..samples {
        let op = i % OPS.len();
        match containment_sample(&mut rng, op) {
            Ok(true) => {}
            Ok(false) => violations[op] += 1,
            Err(()) => refused += 1,
        }
    }
    let total: usize = violations.iter().sum();
    let bad: Vec<String> = OPS
        .iter()
        .zip(&violations)
        .filter(|(_, &v)| v > 0)
        .map(|(o, v)| format!("{o}:{v}"))
        .collect();
    Outcome::new(
        total == 0,
        format!("{samples} samples, {total} violations {bad:?}, {refused} refused (zero divisors)"),
        String::new(),
    )
}

// 2. Derivative enclosures ---------------------------------------------------

fn central(f: &Fast, x: &[f64], i: usize, h: f64) -> f64 {
    let mut p = x.to_vec();
    let mut m = x.to_vec();
    p[i] += h;
    m[i] -= h;
    (f.eval(&p) - f.eval(&m)) / (2.0 * h)
}

fn second(f: &Fast, x: &[f64], i: usize, j: usize, h: f64) -> f64 {
    let at = |si: f64, sj: f64| {
        let mut p = x.to_vec();
        p[i] += si * h;
        p[j] += sj * h;
        f.eval(&p)
    };
    if i == j {
        (at(1.0, 1.0) - 2.0 * f.eval(x) + at(-1.0, -1.0)) / (4.0 * h * h)
    } else {
        (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * h * h)
    }
}

/// Largest |f| over the stencil, for the rounding part of the tolerance.
fn stencil_mag(f: &Fast, x: &[f64], h: f64) -> f64 {
    let mut m = f.eval(x).abs();
    for i in 0..x.len() {
        for s in [-2.0, -1.0, 1.0, 2.0] {
            let mut p = x.to_vec();
            p[i] += s * h;
            m = m.max(f.eval(&p).abs());
            for j in 0..x.len() {
                let mut q = p.clone();
                q[j] += h;
                m = m.max(f.eval(&q).abs());
                q[j] -= 2.0 * h;
                m = m.max(f.eval(&q).abs());
            }
        }
    }
    m
}

fn within(v: f64, enc: &Interval, tol: f64) -> bool {
    v >= enc.lo() - tol && v <= enc.hi() + tol
}

/// Richardson-extrapolated central differences against the gradient and
/// Hessian enclosures at a point. Tolerances are `1e-6` and `1e-4` relative,
/// plus the floating-point rounding error of the difference quotients.
pub fn derivative_soundness(count: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    let mut checked = 0;
    let mut skipped = 0;
    for k in 0..count {
        let arity = rng.gen_range(1..=6);
        let depth = rng.gen_range(1..=6);
        let e = random_expr(&mut rng, depth, arity);
        let x: Vec<f64> = (0..arity).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = Fast::new(&e);
        let h = 1e-3;
        let mag = stencil_mag(&f, &x, 2.0 * h);
        if !mag.is_finite() || mag > 1e12 {
            skipped += 1;
            continue;
        }
        checked += 1;
        let ev = Evaluator::compile(&e, arity).expect("compiles");
        let pt: Vec<Interval> = x.iter().map(|&v| Interval::point(v)).collect();
        let (Ok(g), Ok(hs)) = (ev.gradient(&pt), ev.hessian(&pt)) else {
            bad.push(format!("#{k}: evaluation failed for {e}"));
            continue;
        };
        let eps = f64::EPSILON;
        for i in 0..arity {
            let d = (4.0 * central(&f, &x, i, h / 2.0) - central(&f, &x, i, h)) / 3.0;
            let tol = 1e-6 * (1.0 + d.abs()) + 16.0 * eps * mag / h;
            if !within(d, &g[i], tol) {
                bad.push(format!("#{k}: d/dx{i} {d} outside {} for {e}", g[i]));
            }
            for j in 0..arity {
                let d2 = (4.0 * second(&f, &x, i, j, h / 2.0) - second(&f, &x, i, j, h)) / 3.0;
                let tol = 1e-4 * (1.0 + d2.abs()) + 64.0 * eps * mag / (h * h);
                if !within(d2, &hs[i][j], tol) {
                    bad.push(format!("#{k}: d2/dx{i}dx{j} {d2} outside {} for {e}", hs[i][j]));
                }
            }
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!(
            "{checked} expressions checked, {skipped} skipped (|f| > 1e12), {} mismatches{}",
            bad.len(),
            bad.first().map(|s| format!(", first: {s}")).unwrap_or_default()
        ),
        String::new(),
    )
}

// 3. Prover soundness --------------------------------------------------------

pub struct PolyTask {
    pub expr: Expr,
    pub domain: IntervalBox,
}

pub fn random_poly_task<R: Rng>(rng: &mut R) -> PolyTask {
    let arity = rng.gen_range(1..=3);
    let (terms, degree) = (rng.gen_range(2..=5), rng.gen_range(2..=4));
    let p = random_poly(rng, arity, terms, degree);
    let domain = IntervalBox::from_pairs(
        &(0..arity)
            .map(|_| {
                let lo = rng.gen_range(-4..=2) as f64 / 2.0;
                (lo, lo + [0.5, 1.0, 2.0][rng.gen_range(0..3)])
            })
            .collect::<Vec<_>>(),
    );
    let f = Fast::new(&p);
    let m = (0..2000)
        .map(|_| {
            let x: Vec<f64> = domain.dims().iter().map(|d| rng.gen_range(d.lo()..=d.hi())).collect();
            f.eval(&x)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    // Offsets straddle the sampled maximum: some tasks are false.
    let delta = rng.gen_range(-2..=6) as f64 / 20.0 * (1.0 + m.abs());
    let s = ((m + delta) * 1024.0).round() / 1024.0;
    PolyTask {
        expr: Expr::sub(p, Expr::constant(format!("{s}"))),
        domain,
    }
}

/// Counts grid points where the polynomial is `>= 0`.
pub fn grid_violations(e: &Expr, domain: &IntervalBox, points: usize) -> usize {
    let per_dim = (points as f64).powf(1.0 / domain.len() as f64).round() as usize;
    let f = Fast::new(e);
    grid(domain, per_dim)
        .par_iter()
        .filter(|x| certainly_nonnegative_or_exact(&f, e, x))
        .count()
}

pub fn prover_soundness(tasks: usize, grid_points: usize, seed: u64, threads: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = ProverConfig {
        max_cells: 20_000,
        threads,
        ..ProverConfig::default()
    };
    let mut report = String::new();
    let mut proven = 0;
    let mut unsound = Vec::new();
    for k in 0..tasks {
        let t = random_poly_task(&mut rng);
        let r = prove_negative(&ProofTask::new(t.expr.clone(), t.domain.clone()), &cfg).expect("valid task");
        writeln!(
            report,
            "{k} {} {} cells={} depth={} best={:e} cex={:?}",
            t.expr,
            r.status.as_str(),
            r.cells_processed,
            r.max_depth_reached,
            r.best_upper_bound_seen,
            r.counterexample.as_ref().map(|c| c.point.clone())
        )
        .unwrap();
        if r.status == ProofStatus::Proven {
            proven += 1;
            let v = grid_violations(&t.expr, &t.domain, grid_points);
            if v > 0 {
                unsound.push(format!("task {k} `{}` on {}: {v} grid points >= 0", t.expr, t.domain));
            }
        }
    }
    Outcome::new(
        unsound.is_empty(),
        format!(
            "{tasks} tasks, {proven} proven and grid-confirmed with {grid_points} points each, {} unsound{}",
            unsound.len(),
            unsound.first().map(|s| format!(": {s}")).unwrap_or_default()
        ),
        report,
    )
}

// 4. Prover capability -------------------------------------------------------

pub fn prover_capability() -> Outcome {
    let cfg = ProverConfig::default();
    let run = |text: &str, arity: usize, pairs: &[(f64, f64)]| {
        let e = Expr::parse(text, arity).expect("parses");
        prove_negative(&ProofTask::new(e, IntervalBox::from_pairs(pairs)), &cfg).expect("valid task")
    };
    let six = run(
        "pow(x0,2) + pow(x1,2) + pow(x2,2) + pow(x3,2) + pow(x4,2) + pow(x5,2) - 7",
        6,
        &[(0.0, 1.0); 6],
    );
    let one = run("pow(x0,2) - 2", 1, &[(-1.0, 1.0)]);
    let diag = run("pow(x0,2) - 2*x0*x1 + pow(x1,2)", 2, &[(0.0, 1.0); 2]);
    let ok = six.is_proven() && one.is_proven() && diag.status == ProofStatus::Undecided;
    Outcome::new(
        ok,
        format!(
            "sum of squares: {} ({} cells); x^2-2: {} ({} cells); (x-y)^2: {} ({} cells)",
            six.status.as_str(),
            six.cells_processed,
            one.status.as_str(),
            one.cells_processed,
            diag.status.as_str(),
            diag.cells_processed
        ),
        String::new(),
    )
}

// 5. LP certificates ---------------------------------------------------------

fn exact_optimum(e: &rigor_oracles::simplex::ExactLp) -> BigRational {
    match solve(e) {
        ExactOutcome::Optimal { value, .. } => value,
        other => panic!("generated LP is not optimal: {other:?}"),
    }
}

pub fn lp_certificates(count: usize, fuzz: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut below = Vec::new();
    let mut gaps = Vec::new();
    let mut fuzzed = 0;
    for k in 0..count {
        let n = rng.gen_range(1..=20);
        let m_eq = rng.gen_range(0..=3.min(n - 1));
        let m_ineq = rng.gen_range(1..=20 - m_eq);
        let (p, e) = random_lp(&mut rng, n, m_ineq, m_eq);
        let opt = exact_optimum(&e);
        let opt_f = to_f64_approx(&opt);
        let Ok(sol) = solve_approx(&p) else {
            gaps.push(f64::INFINITY);
            continue;
        };
        let d = clamp_dual(&p, &sol.y, &sol.z).expect("dimensions");
        let cert = certify_upper_bound(&p, &d).expect("certifies");
        if !(cert.bound == f64::INFINITY || from_f64(cert.bound) >= opt) {
            below.push(format!("LP {k}: bound {} < optimum {opt_f}", cert.bound));
        }
        gaps.push((cert.bound - opt_f) / (1.0 + opt_f.abs()));
        for _ in 0..fuzz {
            let mut noisy = |v: &[f64]| v.iter().map(|x| x + rng.gen_range(-0.1..0.1) * (1.0 + x.abs())).collect::<Vec<_>>();
            let y = noisy(&sol.y);
            let z = noisy(&sol.z);
            let d = clamp_dual(&p, &y, &z).expect("dimensions");
            let cert = certify_upper_bound(&p, &d).expect("certifies");
            fuzzed += 1;
            if !(cert.bound == f64::INFINITY || from_f64(cert.bound) >= opt) {
                below.push(format!("LP {k} fuzzed: bound {} < optimum {opt_f}", cert.bound));
            }
        }
    }
    gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = gaps[gaps.len() / 2];
    Outcome::new(
        below.is_empty() && median <= 1e-6,
        format!(
            "{count} LPs, {fuzzed} fuzzed duals, {} bounds below the exact optimum, median relative gap {median:e}, max {:e}{}",
            below.len(),
            gaps.last().unwrap(),
            below.first().map(|s| format!(": {s}")).unwrap_or_default()
        ),
        String::new(),
    )
}

// 6. Augmentation ------------------------------------------------------------

pub fn augmentation_lemma(count: usize, seed: u64) -> Outcome {
    use num_traits::Zero;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    for k in 0..count {
        let n = rng.gen_range(1..=10);
        let m_eq = rng.gen_range(0..=2.min(n - 1));
        let m_ineq = rng.gen_range(1..=10);
        let (p, e) = random_lp(&mut rng, n, m_ineq, m_eq);
        let m = exact_optimum(&e);
        let kk = to_f64_approx(&m).floor() - rng.gen_range(0..=8) as f64 / 4.0 - 0.25;
        assert!(from_f64(kk) < m);
        let aug = augment_with_t(&p, kk).expect("bounds contain 0");
        match solve(&exact_of(&aug)) {
            ExactOutcome::Optimal { value, x } => {
                if value != m || !x[n].is_zero() {
                    bad.push(format!("LP {k}: augmented optimum {} with t = {}", to_f64_approx(&value), to_f64_approx(&x[n])));
                }
            }
            other => bad.push(format!("LP {k}: augmented problem {other:?}")),
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!(
            "{count} LPs, {} mismatches{}",
            bad.len(),
            bad.first().map(|s| format!(": {s}")).unwrap_or_default()
        ),
        String::new(),
    )
}

// 7. Nonlinear duality -------------------------------------------------------

pub fn toy_assembly() -> AssemblyProblem {
    AssemblyProblem {
        domains: vec![LocalDomain {
            id: "D".into(),
            vars: vec!["x".into()],
            bounds: IntervalBox::from_pairs(&[(0.0, 1.0)]),
            constraints: vec![Expr::parse("x0 - x0*x0", 1).expect("parses")],
        }],
        mapping: vec![(0, 0)],
        a: vec![vec![Interval::ONE]],
        b: vec![Interval::ONE],
        c: vec![Interval::ONE],
    }
}

fn verify_cfg(threads: usize) -> VerifyConfig {
    let mut cfg = VerifyConfig::default();
    cfg.prover.max_cells = 20_000;
    cfg.prover.threads = threads;
    cfg
}

fn verdict_text(v: &DualityVerdict) -> String {
    match v {
        DualityVerdict::Certified { m } => format!("certified {m:e}"),
        DualityVerdict::Refuted { domain, report } => format!(
            "refuted {domain} {} cells={} cex={:?}",
            report.status.as_str(),
            report.cells_processed,
            report.counterexample.as_ref().map(|c| c.point.clone())
        ),
        DualityVerdict::GlobalCheckFailed { lower } => format!("global-check-failed {lower:e}"),
    }
}

/// Feasible points of one domain on a grid, as local coordinates, keeping
/// only points where every constraint certainly holds.
fn feasible_grid(dom: &LocalDomain, points: usize) -> Vec<Vec<f64>> {
    let per_dim = ((points as f64).powf(1.0 / dom.vars.len() as f64).round() as usize).max(2);
    let fs: Vec<Fast> = dom.constraints.iter().map(Fast::new).collect();
    grid(&dom.bounds, per_dim)
        .into_par_iter()
        .filter(|x| {
            fs.iter().zip(&dom.constraints).all(|(f, e)| {
                let v = f.eval(x);
                let err = 1e-12 * (1.0 + f.magnitude(x));
                v - err >= 0.0 || (v + err >= 0.0 && certainly_nonnegative_or_exact(f, e, x))
            })
        })
        .collect()
}

/// Number of feasible joint grid points with objective above `m`, over
/// roughly `points` joint points.
pub fn assembly_brute_force(p: &AssemblyProblem, m: f64, points: usize) -> (usize, usize) {
    let per_domain = (points as f64).powf(1.0 / p.domains.len() as f64).round() as usize;
    let grids: Vec<Vec<Vec<f64>>> = p.domains.iter().map(|d| feasible_grid(d, per_domain)).collect();
    let mid = |v: &Interval| v.mid();
    let c: Vec<f64> = p.c.iter().map(mid).collect();
    let a: Vec<Vec<f64>> = p.a.iter().map(|r| r.iter().map(mid).collect()).collect();
    let b: Vec<f64> = p.b.iter().map(mid).collect();
    // Per-domain partial sums of the objective and of each row.
    let partial: Vec<Vec<(f64, Vec<f64>)>> = grids
        .iter()
        .enumerate()
        .map(|(d, g)| {
            let globals = p.domain_globals(d);
            g.iter()
                .map(|x| {
                    let obj = globals.iter().zip(x).map(|(&j, v)| c[j] * v).sum();
                    let rows = a.iter().map(|r| globals.iter().zip(x).map(|(&j, v)| r[j] * v).sum()).collect();
                    (obj, rows)
                })
                .collect()
        })
        .collect();
    let mut acc: Vec<(f64, Vec<f64>)> = vec![(0.0, vec![0.0; b.len()])];
    for part in &partial {
        acc = acc
            .iter()
            .flat_map(|(o, r)| {
                part.iter().map(move |(o2, r2)| (o + o2, r.iter().zip(r2).map(|(u, v)| u + v).collect::<Vec<f64>>()))
            })
            .collect();
    }
    let tol = 1e-9 * (1.0 + m.abs());
    let feasible: Vec<&(f64, Vec<f64>)> = acc.iter().filter(|(_, r)| r.iter().zip(&b).all(|(u, v)| u <= v)).collect();
    let beaten = feasible.iter().filter(|(o, _)| *o > m + tol).count();
    (feasible.len(), beaten)
}

/// Best objective over random feasible samples, seeded with the box center.
fn sampled_optimum<R: Rng>(rng: &mut R, p: &AssemblyProblem, samples: usize) -> (Vec<f64>, f64) {
    let fs: Vec<Vec<Fast>> = p.domains.iter().map(|d| d.constraints.iter().map(Fast::new).collect()).collect();
    let bounds = p.global_bounds();
    let mid = |v: &Interval| v.mid();
    let feasible = |x: &[f64]| {
        let local = p.localize(x);
        fs.iter().zip(&local).all(|(f, l)| f.iter().all(|f| f.eval(l) >= 0.0))
            && p.a.iter().zip(&p.b).all(|(r, b)| r.iter().zip(x).map(|(a, v)| a.mid() * v).sum::<f64>() <= b.mid())
    };
    let obj = |x: &[f64]| p.c.iter().zip(x).map(|(c, v)| c.mid() * v).sum::<f64>();
    let mut best_x: Vec<f64> = bounds.iter().map(mid).collect();
    let mut best = obj(&best_x);
    for _ in 0..samples {
        let x: Vec<f64> = bounds.iter().map(|b| rng.gen_range(b.lo()..=b.hi())).collect();
        if feasible(&x) && obj(&x) > best {
            best = obj(&x);
            best_x = x;
        }
    }
    (best_x, best)
}

pub fn nonlinear_duality(count: usize, brute_points: usize, seed: u64, threads: usize) -> Outcome {
    let mut report = String::new();
    let toy = toy_assembly();
    let pts = default_test_points(&toy, 8, seed);
    let cfg = verify_cfg(threads);
    let run = |p: &AssemblyProblem, x: &[f64], m: f64, pts: &[Vec<Vec<f64>>]| {
        fit_dual(p, x, m, pts, seed).and_then(|c| verify_duality(p, &c, &cfg))
    };
    let one = run(&toy, &[1.0], 1.0, &pts);
    let nine = run(&toy, &[1.0], 0.9, &pts);
    let toy_ok = matches!(one, Ok(DualityVerdict::Certified { .. })) && matches!(nine, Ok(DualityVerdict::Refuted { .. }));
    writeln!(report, "toy M=1: {one:?}\ntoy M=0.9: {}", nine.as_ref().map(verdict_text).unwrap_or_else(|e| e.to_string())).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut certified = 0;
    let mut beaten_total = Vec::new();
    let mut checked_points = 0;
    for k in 0..count {
        let p = random_assembly(&mut rng);
        let (x_star, est) = sampled_optimum(&mut rng, &p, 4000);
        let slack = [-0.05, 0.01, 0.1, 0.5][rng.gen_range(0..4)];
        let m = est + slack * (1.0 + est.abs());
        let pts = default_test_points(&p, 64, seed.wrapping_add(k as u64));
        let v = run(&p, &x_star, m, &pts);
        let text = match &v {
            Ok(v) => verdict_text(v),
            Err(e) => format!("error {e}"),
        };
        writeln!(report, "{k} M={m:e} {text}").unwrap();
        if matches!(v, Ok(DualityVerdict::Certified { .. })) {
            certified += 1;
            let (feasible, beaten) = assembly_brute_force(&p, m, brute_points);
            checked_points += feasible;
            if beaten > 0 {
                beaten_total.push(format!("problem {k}: {beaten} feasible points above M = {m}"));
            }
        }
    }
    Outcome::new(
        toy_ok && beaten_total.is_empty(),
        format!(
            "toy: M=1 {}, M=0.9 {}; {count} random problems, {certified} certified, {checked_points} feasible brute-force points, {} beaten{}",
            one.as_ref().map(verdict_text).unwrap_or_else(|e| e.to_string()),
            nine.as_ref().map(verdict_text).unwrap_or_else(|e| e.to_string()).split(' ').next().unwrap_or(""),
            beaten_total.len(),
            beaten_total.first().map(|s| format!(": {s}")).unwrap_or_default()
        ),
        report,
    )
}

// 8. Sector assemblies ------------------------------------------------------

/// Grid over the shared distances and the angles of `n` sectors around one
/// center. Returns (feasible assemblies, those with `-Σ A > m`).
pub fn sector_grid_soundness(n: usize, m: f64, y_steps: usize, angle_steps: usize) -> (usize, usize) {
    let area = Fast::new(&sector_area_expr());
    let third = std::f64::consts::PI / 3.0;
    let ys: Vec<f64> = (0..y_steps).map(|i| 2.0 + 0.1 * i as f64 / (y_steps - 1) as f64).collect();
    let alphas: Vec<f64> = (0..angle_steps).map(|i| third + third * i as f64 / (angle_steps - 1) as f64).collect();
    let tau = std::f64::consts::TAU;
    let mut y_tuples = vec![Vec::new()];
    for _ in 0..n {
        y_tuples = y_tuples.into_iter().flat_map(|t: Vec<usize>| (0..y_steps).map(move |i| [t.clone(), vec![i]].concat())).collect();
    }
    let mut a_tuples = vec![Vec::new()];
    for _ in 0..n - 1 {
        a_tuples = a_tuples.into_iter().flat_map(|t: Vec<usize>| (0..angle_steps).map(move |i| [t.clone(), vec![i]].concat())).collect();
    }
    let tol = 1e-9;
    y_tuples
        .par_iter()
        .map(|ys_idx| {
            let mut feasible = 0;
            let mut above = 0;
            for a_idx in &a_tuples {
                let mut angles: Vec<f64> = a_idx.iter().map(|&i| alphas[i]).collect();
                let last = tau - angles.iter().sum::<f64>();
                if last < third || last > 2.0 * third {
                    continue;
                }
                angles.push(last);
                let mut total = 0.0;
                let mut ok = true;
                for i in 0..n {
                    let a = area.eval(&[0.0, ys[ys_idx[i]], ys[ys_idx[(i + 1) % n]], angles[i]]);
                    ok &= (0.5..=1.3).contains(&a);
                    total += a;
                }
                if ok {
                    feasible += 1;
                    if -total > m + tol {
                        above += 1;
                    }
                }
            }
            (feasible, above)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Certifies the five-sector problem at the symmetric value and checks the
/// bound against the grid.
pub fn sector_example(p: &AssemblyProblem, m: f64, cert: &DualityCertificate) -> Outcome {
    let v = verify_duality(p, cert, &VerifyConfig::default());
    let verified = matches!(v, Ok(DualityVerdict::Certified { .. }));
    let (feasible, above) = sector_grid_soundness(p.domains.len(), m, 4, 9);
    Outcome::new(
        verified && above == 0 && feasible > 0,
        format!(
            "certificate {}; {feasible} feasible grid assemblies, {above} above M = {m}",
            v.as_ref().map(verdict_text).unwrap_or_else(|e| e.to_string())
        ),
        String::new(),
    )
}

// 9. Graph enumeration -------------------------------------------------------

fn face_graph(g: &DecoratedGraph) -> FaceGraph {
    FaceGraph {
        n: g.vertex_count(),
        faces: g.faces().to_vec(),
    }
}

/// The required step count of the scripted derivation.
pub const REQUIRED_SCRIPT_STEPS: usize = 11;

pub fn graph_enumeration() -> Outcome {
    let mut report = String::new();
    let mut parts = Vec::new();
    let mut ok = true;

    let three = generate(&GeneratorConfig::new(3)).expect("runs");
    let p1 = three.complete && three.terminals.len() == 1;
    parts.push(format!("N=3: {} class(es)", three.terminals.len()));

    let mut cfg = GeneratorConfig::new(4);
    cfg.prune = "all-triangles".parse().expect("prune spec");
    let four = generate(&cfg).expect("runs");
    let tetra = FaceGraph {
        n: 4,
        faces: vec![vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 1], vec![1, 3, 2]],
    };
    let p2 = four.complete && four.terminals.len() == 1 && face_graph(&four.terminals[0].1).isomorphic(&tetra);
    parts.push(format!("N=4 all-triangles: {} class(es), tetrahedron {}", four.terminals.len(), p2));

    let mut p3 = true;
    for n in 3..=5 {
        let out = generate(&GeneratorConfig::new(n)).expect("runs");
        for (code, g) in &out.terminals {
            writeln!(report, "N={n} {code} path={}", g.path().iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" / ")).unwrap();
        }
        let ours: std::collections::BTreeSet<_> = out.terminals.iter().map(|(_, g)| face_graph(g).brute_canonical()).collect();
        let oracle: std::collections::BTreeSet<_> = (3..=n).flat_map(enumerate_sphere_graphs).collect();
        let same = out.complete && ours.len() == out.terminals.len() && ours == oracle;
        p3 &= same;
        parts.push(format!("N={n}: {} classes vs oracle {}", out.terminals.len(), oracle.len()));
    }

    let steps = parse_script(CUBOCTAHEDRON_SCRIPT).expect("script parses");
    let target = DecoratedGraph::replay(4, &steps);
    let p4 = target.as_ref().is_ok_and(|g| g.is_terminal() && face_graph(g).isomorphic(&cuboctahedron()));
    writeln!(report, "script {}", target.as_ref().map(|g| g.canonical_form()).unwrap_or_default()).unwrap();
    let p5 = steps.len() == REQUIRED_SCRIPT_STEPS;
    parts.push(format!(
        "square seed script reaches the cuboctahedron: {p4}, in {} steps (required {REQUIRED_SCRIPT_STEPS}; each step fixes one face, so 14 faces need 13)",
        steps.len()
    ));
    ok &= p1 && p2 && p3 && p4 && p5;
    Outcome::new(ok, parts.join("; "), report)
}

// 10. Geometry ---------------------------------------------------------------

pub fn simplex_example() -> Outcome {
    let e = Interval::point(8.0).sqrt().expect("sqrt");
    let v = check_simplex_interior_point([e; 6], Interval::point(2.0)).expect("valid input");
    let target = 2.0 / 3f64.sqrt();
    let ok = match &v {
        Verdict::NoSuchConfiguration { witness: Some(w), .. } => {
            let four_thirds = BigRational::new(4.into(), 3.into());
            encloses_sqrt(w.lo(), w.hi(), &four_thirds) && w.width() <= 1e-10
        }
        _ => false,
    };
    Outcome::new(ok, format!("{v:?}, 2/sqrt(3) = {target}"), String::new())
}
