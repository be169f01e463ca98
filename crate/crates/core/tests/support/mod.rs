//! Random instance generators shared by the integration tests and the
//! acceptance harness.
#![allow(dead_code)]

pub mod checks;

use rigor_oracles::BigRational;
use rand::Rng;
use rigor::assembly::{AssemblyProblem, LocalDomain};
use rigor::expr::Expr;
use rigor::interval::Interval;
use rigor::lp::LpProblem;
use rigor::taylor::IntervalBox;
use rigor_oracles::rational::from_f64;
use rigor_oracles::simplex::ExactLp;

/// Random expression with finite derivatives everywhere: divisions and
/// square roots only see arguments bounded away from zero.
pub fn random_expr<R: Rng>(rng: &mut R, depth: usize, arity: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.7) {
            Expr::var(rng.gen_range(0..arity))
        } else {
            let k = rng.gen_range(-4..=4);
            if rng.gen_bool(0.5) {
                Expr::int(k)
            } else {
                Expr::constant(format!("{}.{}", k, rng.gen_range(1..100)))
            }
        };
    }
    let sub = |rng: &mut R| random_expr(rng, depth - 1, arity);
    match rng.gen_range(0..9) {
        0 => Expr::add(sub(rng), sub(rng)),
        1 => Expr::sub(sub(rng), sub(rng)),
        2 | 3 => Expr::mul(sub(rng), sub(rng)),
        4 => Expr::div(sub(rng), Expr::add(Expr::int(1), Expr::pow(sub(rng), 2))),
        5 => Expr::pow(sub(rng), rng.gen_range(2..=3)),
        6 => Expr::sqrt(Expr::add(Expr::int(1), Expr::pow(sub(rng), 2))),
        7 => Expr::atan(sub(rng), Expr::add(Expr::int(2), Expr::pow(sub(rng), 2))),
        _ => Expr::neg(sub(rng)),
    }
}

/// Polynomial with small dyadic coefficients and total degree <= `degree`.
pub fn random_poly<R: Rng>(rng: &mut R, arity: usize, terms: usize, degree: u32) -> Expr {
    let monomials = (0..terms).map(|_| {
        let coef = rng.gen_range(-16..=16) as f64 / 8.0;
        let mut m = Expr::constant(format!("{coef}"));
        let mut left = rng.gen_range(0..=degree);
        while left > 0 {
            let k = rng.gen_range(1..=left);
            m = Expr::mul(m, Expr::pow(Expr::var(rng.gen_range(0..arity)), k as i32));
            left -= k;
        }
        m
    });
    Expr::sum(monomials)
}

/// Grid with `per_dim` points per axis, endpoints included.
pub fn grid(b: &IntervalBox, per_dim: usize) -> Vec<Vec<f64>> {
    let mut pts = vec![Vec::new()];
    for iv in b.dims() {
        let vals: Vec<f64> = (0..per_dim)
            .map(|i| {
                if per_dim == 1 {
                    iv.mid()
                } else {
                    iv.lo() + (iv.hi() - iv.lo()) * i as f64 / (per_dim - 1) as f64
                }
            })
            .collect();
        pts = pts
            .into_iter()
            .flat_map(|p| {
                vals.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    pts
}

fn small<R: Rng>(rng: &mut R, span: i32) -> f64 {
    rng.gen_range(-span..=span) as f64 / 4.0
}

/// Bounded LP with dyadic data, feasible at a random interior point so the
/// optimum exists. Returns the interval problem and its exact twin.
pub fn random_lp<R: Rng>(rng: &mut R, n: usize, m_ineq: usize, m_eq: usize) -> (LpProblem, ExactLp) {
    // Bounds always contain 0, as the augmentation requires.
    let lower: Vec<f64> = (0..n).map(|_| rng.gen_range(-8..=0) as f64 / 2.0).collect();
    let upper: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=8) as f64 / 2.0).collect();
    let x0: Vec<f64> = lower.iter().zip(&upper).map(|(l, u)| (l + u) / 2.0).collect();
    let row = |rng: &mut R| (0..n).map(|_| if rng.gen_bool(0.6) { small(rng, 12) } else { 0.0 }).collect::<Vec<f64>>();
    let dotp = |a: &[f64], x: &[f64]| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>();
    let aineq: Vec<Vec<f64>> = (0..m_ineq).map(|_| row(rng)).collect();
    let bineq: Vec<f64> = aineq.iter().map(|a| dotp(a, &x0) + rng.gen_range(0..=8) as f64 / 4.0).collect();
    let aeq: Vec<Vec<f64>> = (0..m_eq).map(|_| row(rng)).collect();
    let beq: Vec<f64> = aeq.iter().map(|a| dotp(a, &x0)).collect();
    let c: Vec<f64> = (0..n).map(|_| small(rng, 12)).collect();
    let bounds: Vec<(f64, f64)> = lower.iter().copied().zip(upper.iter().copied()).collect();
    let p = LpProblem::from_f64(&aeq, &beq, &aineq, &bineq, &c, &bounds).expect("valid LP");
    let q = |v: &[f64]| v.iter().map(|&x| from_f64(x)).collect::<Vec<BigRational>>();
    let e = ExactLp {
        aeq: aeq.iter().map(|r| q(r)).collect(),
        beq: q(&beq),
        aineq: aineq.iter().map(|r| q(r)).collect(),
        bineq: q(&bineq),
        c: q(&c),
        lower: q(&lower),
        upper: q(&upper),
    };
    (p, e)
}

/// Exact twin of an interval LP whose data are all points.
pub fn exact_of(p: &LpProblem) -> ExactLp {
    let q = |v: &[Interval]| {
        v.iter()
            .map(|x| {
                assert!(x.is_point());
                from_f64(x.lo())
            })
            .collect::<Vec<_>>()
    };
    ExactLp {
        aeq: p.aeq.iter().map(|r| q(r)).collect(),
        beq: q(&p.beq),
        aineq: p.aineq.iter().map(|r| q(r)).collect(),
        bineq: q(&p.bineq),
        c: q(&p.c),
        lower: p.var_bounds.iter().map(|b| from_f64(b.lo())).collect(),
        upper: p.var_bounds.iter().map(|b| from_f64(b.hi())).collect(),
    }
}

/// One or two domains on unit boxes with up to three variables each,
/// polynomial constraints, random linking rows and objective.
pub fn random_assembly<R: Rng>(rng: &mut R) -> AssemblyProblem {
    let d = rng.gen_range(1..=2);
    let mut domains = Vec::new();
    let mut mapping = Vec::new();
    for k in 0..d {
        let nv = rng.gen_range(1..=3);
        let constraints = (0..rng.gen_range(0..=2))
            .map(|_| {
                // Keep the center feasible: φ(x) = s - p(x) with s >= p(center).
                let p = random_poly(rng, nv, 3, 2);
                let c = vec![0.5; nv];
                let s = p.eval_f64(&c) + rng.gen_range(0..=4) as f64 / 4.0;
                Expr::sub(Expr::constant(format!("{s}")), p)
            })
            .collect();
        domains.push(LocalDomain {
            id: format!("D{k}"),
            vars: (0..nv).map(|i| format!("u{k}_{i}")).collect(),
            bounds: IntervalBox::from_pairs(&vec![(0.0, 1.0); nv]),
            constraints,
        });
        mapping.extend((0..nv).map(|s| (k, s)));
    }
    let n = mapping.len();
    let rows = rng.gen_range(0..=2);
    let a: Vec<Vec<Interval>> = (0..rows)
        .map(|_| (0..n).map(|_| Interval::point(small(rng, 4))).collect())
        .collect();
    // Feasible at the box centers.
    let b = a
        .iter()
        .map(|r| {
            let v: f64 = r.iter().map(|x| x.lo() * 0.5).sum();
            Interval::point(v + rng.gen_range(0..=4) as f64 / 4.0)
        })
        .collect();
    let c = (0..n).map(|_| Interval::point(small(rng, 8))).collect();
    AssemblyProblem { domains, mapping, a, b, c }
}

/// Expression with pre-parsed constants for plain f64 sampling. Independent
/// of the library evaluators.
pub enum Fast {
    C(f64),
    V(usize),
    Neg(Box<Fast>),
    Add(Box<Fast>, Box<Fast>),
    Sub(Box<Fast>, Box<Fast>),
    Mul(Box<Fast>, Box<Fast>),
    Div(Box<Fast>, Box<Fast>),
    Pow(Box<Fast>, i32),
    Sqrt(Box<Fast>),
    Atan(Box<Fast>, Box<Fast>),
}

impl Fast {
    pub fn new(e: &Expr) -> Fast {
        let b = |e: &Expr| Box::new(Fast::new(e));
        match e {
            Expr::Const(c) => Fast::C(rigor_oracles::rational::to_f64_approx(&exact_constant(&c.0))),
            Expr::Var(i) => Fast::V(*i),
            Expr::Neg(a) => Fast::Neg(b(a)),
            Expr::Add(x, y) => Fast::Add(b(x), b(y)),
            Expr::Sub(x, y) => Fast::Sub(b(x), b(y)),
            Expr::Mul(x, y) => Fast::Mul(b(x), b(y)),
            Expr::Div(x, y) => Fast::Div(b(x), b(y)),
            Expr::Pow(x, k) => Fast::Pow(b(x), *k),
            Expr::Sqrt(x) => Fast::Sqrt(b(x)),
            Expr::Atan(x, y) => Fast::Atan(b(x), b(y)),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Fast::C(c) => *c,
            Fast::V(i) => x[*i],
            Fast::Neg(a) => -a.eval(x),
            Fast::Add(a, b) => a.eval(x) + b.eval(x),
            Fast::Sub(a, b) => a.eval(x) - b.eval(x),
            Fast::Mul(a, b) => a.eval(x) * b.eval(x),
            Fast::Div(a, b) => a.eval(x) / b.eval(x),
            Fast::Pow(a, k) => a.eval(x).powi(*k),
            Fast::Sqrt(a) => a.eval(x).sqrt(),
            Fast::Atan(a, b) => (a.eval(x) / b.eval(x)).atan(),
        }
    }

    /// Evaluation with every constant and variable replaced by its absolute
    /// value and subtraction by addition; bounds the rounding error of
    /// [`Fast::eval`] for polynomials.
    pub fn magnitude(&self, x: &[f64]) -> f64 {
        match self {
            Fast::C(c) => c.abs(),
            Fast::V(i) => x[*i].abs(),
            Fast::Neg(a) => a.magnitude(x),
            Fast::Add(a, b) | Fast::Sub(a, b) => a.magnitude(x) + b.magnitude(x),
            Fast::Mul(a, b) => a.magnitude(x) * b.magnitude(x),
            Fast::Pow(a, k) => a.magnitude(x).powi(*k),
            _ => f64::INFINITY,
        }
    }
}

/// Exact value of a decimal constant, including `[lo..hi]` only when
/// it is a point.
pub fn exact_constant(text: &str) -> BigRational {
    rigor_oracles::rational::from_decimal(text).unwrap_or_else(|| panic!("non-decimal constant `{text}`"))
}

/// Exact rational value of a rational expression; `None` on sqrt, atan or
/// division by zero.
pub fn exact_eval(e: &Expr, x: &[BigRational]) -> Option<BigRational> {
    use num_traits::Zero;
    Some(match e {
        Expr::Const(c) => exact_constant(&c.0),
        Expr::Var(i) => x[*i].clone(),
        Expr::Neg(a) => -exact_eval(a, x)?,
        Expr::Add(a, b) => exact_eval(a, x)? + exact_eval(b, x)?,
        Expr::Sub(a, b) => exact_eval(a, x)? - exact_eval(b, x)?,
        Expr::Mul(a, b) => exact_eval(a, x)? * exact_eval(b, x)?,
        Expr::Div(a, b) => {
            let d = exact_eval(b, x)?;
            if d.is_zero() {
                return None;
            }
            exact_eval(a, x)? / d
        }
        Expr::Pow(a, k) => {
            let v = exact_eval(a, x)?;
            if *k < 0 && v.is_zero() {
                return None;
            }
            num_traits::pow::Pow::pow(&v, *k)
        }
        Expr::Sqrt(_) | Expr::Atan(..) => return None,
    })
}

/// True when the exact value of the polynomial `f` at `x` is `>= 0`, using
/// f64 with an error bound and falling back to rationals near zero.
pub fn certainly_nonnegative_or_exact(f: &Fast, e: &Expr, x: &[f64]) -> bool {
    let v = f.eval(x);
    let err = 1e-12 * (1.0 + f.magnitude(x));
    if v - err >= 0.0 {
        return true;
    }
    if v + err < 0.0 {
        return false;
    }
    let q: Vec<BigRational> = x.iter().map(|&t| from_f64(t)).collect();
    use num_traits::Signed;
    !exact_eval(e, &q).expect("rational expression").is_negative()
}
