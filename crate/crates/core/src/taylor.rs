//! Boxes, second-order Taylor upper bounds and certified derivative signs.

use std::fmt;

use thiserror::Error;

use crate::expr::Evaluator;
use crate::interval::{add_up, mul_up, Interval, IntervalError};

/// Axis-aligned box with finite interval components.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalBox {
    dims: Vec<Interval>,
}

impl IntervalBox {
    pub fn new(dims: Vec<Interval>) -> Result<Self, IntervalError> {
        if let Some(d) = dims.iter().find(|d| !d.is_bounded()) {
            return Err(IntervalError::Unbounded(*d));
        }
        Ok(Self { dims })
    }

    /// Box from `(lo, hi)` pairs.
    ///
    /// # Panics
    /// Panics on invalid or infinite endpoints.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        let dims = pairs
            .iter()
            .map(|&(lo, hi)| Interval::new(lo, hi).expect("valid box component"))
            .collect();
        Self::new(dims).expect("finite box")
    }

    pub fn dims(&self) -> &[Interval] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn center(&self) -> Vec<f64> {
        self.dims.iter().map(Interval::mid).collect()
    }

    /// Degenerate box at the center.
    pub fn center_box(&self) -> Vec<Interval> {
        self.center().into_iter().map(Interval::point).collect()
    }

    /// Upper bounds on the distance from the center to either face.
    pub fn half_widths_up(&self) -> Vec<f64> {
        self.dims
            .iter()
            .map(|d| {
                let c = d.mid();
                add_up(d.hi(), -c).max(add_up(c, -d.lo()))
            })
            .collect()
    }

    pub fn max_width(&self) -> f64 {
        self.dims.iter().map(Interval::width).fold(0.0, f64::max)
    }

    /// Widest non-degenerate component, ties to the lowest index.
    pub fn widest_dim(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, d) in self.dims.iter().enumerate() {
            let w = d.width();
            if w > 0.0 && best.is_none_or(|(_, bw)| w > bw) {
                best = Some((i, w));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Halves component `i` at its midpoint.
    pub fn bisect(&self, i: usize) -> (IntervalBox, IntervalBox) {
        let d = self.dims[i];
        let m = d.mid();
        let mut left = self.clone();
        let mut right = self.clone();
        left.dims[i] = Interval::new(d.lo(), m).expect("ordered");
        right.dims[i] = Interval::new(m, d.hi()).expect("ordered");
        (left, right)
    }

    pub fn with_dim(&self, i: usize, v: Interval) -> IntervalBox {
        let mut b = self.clone();
        b.dims[i] = v;
        b
    }

    /// Volume in floating point (accounting only, not rigorous).
    pub fn volume(&self) -> f64 {
        self.dims.iter().map(Interval::width).product()
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.len() == self.dims.len() && self.dims.iter().zip(x).all(|(d, &v)| d.contains(v))
    }

    pub fn encloses(&self, other: &IntervalBox) -> bool {
        self.dims.len() == other.dims.len()
            && self.dims.iter().zip(&other.dims).all(|(a, b)| a.encloses(b))
    }
}

impl fmt::Display for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorBound {
    pub upper: f64,
    pub center_value: Interval,
    pub gradient_at_center: Vec<Interval>,
    /// Largest `sup |H_ij|` over the box.
    pub hessian_norm_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("bound unavailable: {0}")]
pub struct BoundUnavailable(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    StrictlyPositive,
    StrictlyNegative,
    Unknown,
}

fn check_arity(ev: &Evaluator, b: &IntervalBox) -> Result<(), BoundUnavailable> {
    if ev.arity() != b.len() {
        return Err(BoundUnavailable(format!(
            "box dimension {} does not match arity {}",
            b.len(),
            ev.arity()
        )));
    }
    Ok(())
}

/// Upper bound `f(c) + Σ|∂ᵢf(c)|wᵢ + ½Σ|∂ᵢⱼf(B)|wᵢwⱼ` over the box.
pub fn taylor_upper_bound(ev: &Evaluator, b: &IntervalBox) -> Result<TaylorBound, BoundUnavailable> {
    check_arity(ev, b)?;
    let unavailable = |e: crate::expr::EvalError| BoundUnavailable(e.0);
    let germ = ev.germ(&b.center_box()).map_err(unavailable)?;
    let hess = ev.hessian(b.dims()).map_err(unavailable)?;
    let w = b.half_widths_up();
    let mut linear = 0.0;
    for (g, &wi) in germ.df.iter().zip(&w) {
        linear = add_up(linear, mul_up(g.mag(), wi));
    }
    let mut quad = 0.0;
    let mut hnorm: f64 = 0.0;
    for (i, row) in hess.iter().enumerate() {
        for (j, h) in row.iter().enumerate() {
            hnorm = hnorm.max(h.mag());
            quad = add_up(quad, mul_up(mul_up(h.mag(), w[i]), w[j]));
        }
    }
    let upper = add_up(add_up(germ.f.hi(), linear), mul_up(0.5, quad));
    if upper.is_nan() {
        return Err(BoundUnavailable("non-finite bound".into()));
    }
    Ok(TaylorBound {
        upper,
        center_value: germ.f,
        gradient_at_center: germ.df,
        hessian_norm_bound: hnorm,
    })
}

/// Best available upper bound: the smaller of the Taylor and natural bounds.
pub fn upper_bound(ev: &Evaluator, b: &IntervalBox) -> Result<f64, BoundUnavailable> {
    let natural = ev.value(b.dims()).map(|v| v.hi());
    let taylor = taylor_upper_bound(ev, b).map(|t| t.upper);
    match (natural, taylor) {
        (Ok(a), Ok(t)) => Ok(a.min(t)),
        (Ok(a), Err(_)) => Ok(a),
        (Err(_), Ok(t)) => Ok(t),
        (Err(e), Err(_)) => Err(BoundUnavailable(e.0)),
    }
}

/// Upper bound of `Σ λₖ fₖ` over the box for exact weights `λₖ >= 0`,
/// combining the Taylor forms of the individual functions.
pub fn combined_upper_bound(terms: &[(&Evaluator, f64)], b: &IntervalBox) -> Result<f64, BoundUnavailable> {
    let unavailable = |e: crate::expr::EvalError| BoundUnavailable(e.0);
    let iv_err = |e: IntervalError| BoundUnavailable(e.to_string());
    let n = b.len();
    let mut fc = Interval::ZERO;
    let mut grad = vec![Interval::ZERO; n];
    let mut hess = vec![vec![Interval::ZERO; n]; n];
    let mut natural = Interval::ZERO;
    let mut natural_ok = true;
    for &(ev, lambda) in terms {
        check_arity(ev, b)?;
        let l = Interval::point(lambda);
        let germ = ev.germ(&b.center_box()).map_err(unavailable)?;
        fc = fc.add(&germ.f.mul(&l).map_err(iv_err)?).map_err(iv_err)?;
        for (g, d) in grad.iter_mut().zip(&germ.df) {
            *g = g.add(&d.mul(&l).map_err(iv_err)?).map_err(iv_err)?;
        }
        let h = ev.hessian(b.dims()).map_err(unavailable)?;
        for (row, hrow) in hess.iter_mut().zip(&h) {
            for (x, y) in row.iter_mut().zip(hrow) {
                *x = x.add(&y.mul(&l).map_err(iv_err)?).map_err(iv_err)?;
            }
        }
        match ev.value(b.dims()) {
            Ok(v) if natural_ok => natural = natural.add(&v.mul(&l).map_err(iv_err)?).map_err(iv_err)?,
            _ => natural_ok = false,
        }
    }
    let w = b.half_widths_up();
    let mut acc = fc.hi();
    for (g, &wi) in grad.iter().zip(&w) {
        acc = add_up(acc, mul_up(g.mag(), wi));
    }
    let mut quad = 0.0;
    for (i, row) in hess.iter().enumerate() {
        for (j, h) in row.iter().enumerate() {
            quad = add_up(quad, mul_up(mul_up(h.mag(), w[i]), w[j]));
        }
    }
    let taylor = add_up(acc, mul_up(0.5, quad));
    Ok(if natural_ok { taylor.min(natural.hi()) } else { taylor })
}

/// Certified sign of `∂ᵢf` over the whole box.
pub fn partial_sign(ev: &Evaluator, b: &IntervalBox, i: usize) -> Sign {
    if check_arity(ev, b).is_err() || i >= b.len() {
        return Sign::Unknown;
    }
    match ev.germ(b.dims()) {
        Ok(g) => sign_of(g.df[i]),
        Err(_) => Sign::Unknown,
    }
}

/// Certified signs of all partials from one forward pass.
pub fn partial_signs(ev: &Evaluator, b: &IntervalBox) -> Vec<Sign> {
    match ev.germ(b.dims()) {
        Ok(g) if g.df.len() == b.len() => g.df.into_iter().map(sign_of).collect(),
        _ => vec![Sign::Unknown; b.len()],
    }
}

fn sign_of(d: Interval) -> Sign {
    if d.lo() > 0.0 {
        Sign::StrictlyPositive
    } else if d.hi() < 0.0 {
        Sign::StrictlyNegative
    } else {
        Sign::Unknown
    }
}
