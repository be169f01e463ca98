//! Point configurations in space: pivots, coordinate realization, and
//! nonexistence checks for extremal configurations.
//!
//! Verdicts concern the extremal configuration reached by pivoting. The
//! deformation argument that reduces a general configuration to that one
//! is the caller's responsibility; anything short of a certified violation
//! is reported `Inconclusive`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::interval::{Interval, IntervalError};

pub type V3 = [Interval; 3];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("pivot target unreachable on the circle")]
    PivotInfeasible,
    #[error("pivot axis is degenerate or the moving point is on it")]
    DegenerateAxis,
    #[error("invalid specification: {0}")]
    Invalid(String),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

type R<T> = Result<T, GeomError>;

fn iv(x: f64) -> Interval {
    Interval::point(x)
}

fn sub3(a: &V3, b: &V3) -> R<V3> {
    Ok([a[0].sub(&b[0])?, a[1].sub(&b[1])?, a[2].sub(&b[2])?])
}

fn add3(a: &V3, b: &V3) -> R<V3> {
    Ok([a[0].add(&b[0])?, a[1].add(&b[1])?, a[2].add(&b[2])?])
}

fn mul3(a: &V3, s: &Interval) -> R<V3> {
    Ok([a[0].mul(s)?, a[1].mul(s)?, a[2].mul(s)?])
}

fn dot(a: &V3, b: &V3) -> R<Interval> {
    Ok(a[0].mul(&b[0])?.add(&a[1].mul(&b[1])?)?.add(&a[2].mul(&b[2])?)?)
}

fn cross(a: &V3, b: &V3) -> R<V3> {
    Ok([
        a[1].mul(&b[2])?.sub(&a[2].mul(&b[1])?)?,
        a[2].mul(&b[0])?.sub(&a[0].mul(&b[2])?)?,
        a[0].mul(&b[1])?.sub(&a[1].mul(&b[0])?)?,
    ])
}

fn norm_sq(a: &V3) -> R<Interval> {
    Ok(a[0].sqr()?.add(&a[1].sqr()?)?.add(&a[2].sqr()?)?)
}

/// Square root of the nonnegative part, or `None` if certainly negative.
fn sqrt_nonneg(x: &Interval) -> R<Option<Interval>> {
    if x.hi() < 0.0 {
        return Ok(None);
    }
    Ok(Some(x.sqrt()?))
}

pub fn distance(a: &V3, b: &V3) -> R<Interval> {
    Ok(norm_sq(&sub3(a, b)?)?.sqrt()?)
}

/// `det(b - a, c - a, d - a)`: six times the signed volume.
pub fn orientation(a: &V3, b: &V3, c: &V3, d: &V3) -> R<Interval> {
    dot(&sub3(b, a)?, &cross(&sub3(c, a)?, &sub3(d, a)?)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    pub labels: Vec<String>,
    pub coords: Vec<V3>,
}

impl PointConfig {
    pub fn from_f64(points: &[[f64; 3]]) -> Self {
        PointConfig {
            labels: (0..points.len()).map(|i| format!("p{i}")).collect(),
            coords: points.iter().map(|p| [iv(p[0]), iv(p[1]), iv(p[2])]).collect(),
        }
    }

    pub fn distance(&self, i: usize, j: usize) -> R<Interval> {
        distance(&self.coords[i], &self.coords[j])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotBranch {
    Plus,
    Minus,
}

/// Moves `q` on its circle about the axis `(p1, p2)` until its distance to
/// `third` is `target`. The two solutions are mirror images in the plane
/// through the axis and `third`; `branch` picks one.
pub fn pivot(
    config: &PointConfig,
    axis: (usize, usize),
    q: usize,
    third: usize,
    target: Interval,
    branch: PivotBranch,
) -> R<PointConfig> {
    let (p1, p2) = (&config.coords[axis.0], &config.coords[axis.1]);
    let a = sub3(p2, p1)?;
    let alen2 = norm_sq(&a)?;
    if alen2.lo() <= 0.0 {
        return Err(GeomError::DegenerateAxis);
    }
    // Circle center c, radius rho, in the plane normal to a.
    let qp = sub3(&config.coords[q], p1)?;
    let along = dot(&qp, &a)?.div(&alen2)?;
    let c = add3(p1, &mul3(&a, &along)?)?;
    let radial = sub3(&config.coords[q], &c)?;
    let rho2 = norm_sq(&radial)?;
    if rho2.lo() <= 0.0 {
        return Err(GeomError::DegenerateAxis);
    }
    let rho = rho2.sqrt()?;
    // Orthonormal frame (e1, e2) of the circle plane.
    let e1 = mul3(&radial, &rho.recip()?)?;
    let e2 = mul3(&cross(&a, &e1)?, &alen2.sqrt()?.recip()?)?;
    // |X - s|^2 = |d|^2 + rho^2 + 2 rho (d·e1 cos + d·e2 sin), d = c - s.
    let d = sub3(&c, &config.coords[third])?;
    let (d1, d2) = (dot(&d, &e1)?, dot(&d, &e2)?);
    let big_r2 = d1.sqr()?.add(&d2.sqr()?)?;
    if big_r2.lo() <= 0.0 {
        // `third` is on the axis: every circle point is equidistant.
        return Err(GeomError::DegenerateAxis);
    }
    let big_r = big_r2.sqrt()?;
    let k = norm_sq(&d)?.add(&rho2)?;
    let two_rho_r = rho.mul(&big_r)?.scale(2.0)?;
    let gamma = target.sqr()?.sub(&k)?.div(&two_rho_r)?;
    // Clip to the feasible range; an empty clip means unreachable.
    let gamma = gamma
        .intersect(&Interval::new(-1.0, 1.0)?)
        .map_err(|_| GeomError::PivotInfeasible)?;
    let s = Interval::ONE.sub(&gamma.sqr()?)?;
    let s = sqrt_nonneg(&s)?.ok_or(GeomError::PivotInfeasible)?;
    let s = if branch == PivotBranch::Plus { s } else { -s };
    // Direction (d1, d2)/R in the plane and its perpendicular.
    let g1 = add3(&mul3(&e1, &d1)?, &mul3(&e2, &d2)?)?;
    let g2 = add3(&mul3(&e1, &(-d2))?, &mul3(&e2, &d1)?)?;
    let dir = add3(&mul3(&g1, &gamma)?, &mul3(&g2, &s)?)?;
    let pos = add3(&c, &mul3(&dir, &rho.div(&big_r)?)?)?;
    let mut out = config.clone();
    out.coords[q] = pos;
    Ok(out)
}

/// Determinant by cofactor expansion; fine for the 5x5 matrices used here.
fn det(m: &[Vec<Interval>]) -> R<Interval> {
    let n = m.len();
    if n == 1 {
        return Ok(m[0][0]);
    }
    let mut total = Interval::ZERO;
    for j in 0..n {
        if m[0][j] == Interval::ZERO {
            continue;
        }
        let minor: Vec<Vec<Interval>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, v)| *v).collect())
            .collect();
        let term = m[0][j].mul(&det(&minor)?)?;
        total = if j % 2 == 0 { total.add(&term)? } else { total.sub(&term)? };
    }
    Ok(total)
}

/// Cayley–Menger determinant of `k` points from their distance matrix,
/// multiplied by `(-1)^k` so that nondegenerate realizable simplices give a
/// positive value.
pub fn cayley_menger(d: &[Vec<Interval>]) -> R<Interval> {
    let k = d.len();
    let mut m = vec![vec![Interval::ONE; k + 1]; k + 1];
    m[0][0] = Interval::ZERO;
    for i in 0..k {
        for j in 0..k {
            m[i + 1][j + 1] = if i == j { Interval::ZERO } else { d[i][j].sqr()? };
        }
    }
    let v = det(&m)?;
    Ok(if k.is_multiple_of(2) { v } else { -v })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
    Unknown,
}

fn sign_of(x: &Interval) -> Sign {
    if x.lo() > 0.0 {
        Sign::Positive
    } else if x.hi() < 0.0 {
        Sign::Negative
    } else {
        Sign::Unknown
    }
}

/// Point at distances `r = (r0, r1, r2)` from three points in the standard
/// frame: `a` at the origin, `b` on the first axis, `c` in the first
/// coordinate plane with positive second coordinate. `None` if certainly
/// not realizable.
fn trilaterate(b: &V3, c: &V3, r: [Interval; 3], up: bool) -> R<Option<V3>> {
    let bx = b[0];
    let (cx, cy) = (c[0], c[1]);
    let r0s = r[0].sqr()?;
    let x = r0s.add(&bx.sqr()?)?.sub(&r[1].sqr()?)?.div(&bx.scale(2.0)?)?;
    let c2 = cx.sqr()?.add(&cy.sqr()?)?;
    let y = r0s
        .add(&c2)?
        .sub(&r[2].sqr()?)?
        .sub(&x.mul(&cx)?.scale(2.0)?)?
        .div(&cy.scale(2.0)?)?;
    let z2 = r0s.sub(&x.sqr()?)?.sub(&y.sqr()?)?;
    let Some(z) = sqrt_nonneg(&z2)? else {
        return Ok(None);
    };
    Ok(Some([x, y, if up { z } else { -z }]))
}

/// Standard frame for three points from their pairwise distances.
fn frame3(d01: Interval, d02: Interval, d12: Interval) -> R<Option<[V3; 3]>> {
    if d01.lo() <= 0.0 {
        return Ok(None);
    }
    let z = Interval::ZERO;
    let x = d01.sqr()?.add(&d02.sqr()?)?.sub(&d12.sqr()?)?.div(&d01.scale(2.0)?)?;
    let Some(y) = sqrt_nonneg(&d02.sqr()?.sub(&x.sqr()?)?)? else {
        return Ok(None);
    };
    Ok(Some([[z, z, z], [d01, z, z], [x, y, z]]))
}

/// Coordinates for points `0..n` from the distances to the first three
/// points: point 0 at the origin, point 1 on the first axis, point 2 in
/// the upper half plane, point `k >= 3` on the side `up[k - 3]`.
/// Requires `d[i][j]` for `i < 3`. `None` if certainly unrealizable.
pub fn rigid_realization(d: &[Vec<Interval>], up: &[bool]) -> R<Option<PointConfig>> {
    let n = d.len();
    if n < 3 || up.len() + 3 < n {
        return Err(GeomError::Invalid("need at least 3 points and a side per extra point".into()));
    }
    let Some([a, b, c]) = frame3(d[0][1], d[0][2], d[1][2])? else {
        return Ok(None);
    };
    if c[1].lo() <= 0.0 {
        return Ok(None);
    }
    let mut coords = vec![a, b, c];
    for k in 3..n {
        match trilaterate(&b, &c, [d[0][k], d[1][k], d[2][k]], up[k - 3])? {
            Some(p) => coords.push(p),
            None => return Ok(None),
        }
    }
    Ok(Some(PointConfig {
        labels: (0..n).map(|i| format!("p{i}")).collect(),
        coords,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    DistanceTooSmall,
    DistanceTooLarge,
    Unrealizable,
    TriangleInequality,
    NotLinked,
    SegmentTooLong,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    NoSuchConfiguration { reason: Reason, witness: Option<Interval> },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::NoSuchConfiguration { .. })
    }

    fn inconclusive(s: impl Into<String>) -> Self {
        Verdict::Inconclusive { reason: s.into() }
    }
}

/// Edge order for a simplex `v0..v3`: 01, 02, 03, 12, 13, 23.
pub const SIMPLEX_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn check_positive(xs: &[Interval], r: &Interval) -> Option<Verdict> {
    if xs.iter().any(|e| e.lo() <= 0.0) {
        return Some(Verdict::inconclusive("edge bounds must be positive"));
    }
    if r.lo() <= 0.0 {
        return Some(Verdict::inconclusive("every point is at distance >= 0"));
    }
    None
}

/// Simplex with edges at their caps (each interval encloses a cap), an
/// interior point pivoted to distance `r` from vertices 0, 1, 2; refuted
/// when the distance to vertex 3 is certainly below `r`.
pub fn check_simplex_interior_point(edges: [Interval; 6], r: Interval) -> R<Verdict> {
    if let Some(v) = check_positive(&edges, &r) {
        return Ok(v);
    }
    let mut d = vec![vec![Interval::ZERO; 4]; 4];
    for (&(i, j), e) in SIMPLEX_EDGES.iter().zip(&edges) {
        d[i][j] = *e;
        d[j][i] = *e;
    }
    match sign_of(&cayley_menger(&d)?) {
        Sign::Negative => {
            return Ok(Verdict::NoSuchConfiguration {
                reason: Reason::Unrealizable,
                witness: None,
            })
        }
        Sign::Unknown => return Ok(Verdict::inconclusive("simplex realizability undecided")),
        Sign::Positive => {}
    }
    let Some(simplex) = rigid_realization(&d, &[true])? else {
        return Ok(Verdict::inconclusive("simplex coordinates unavailable"));
    };
    let (b, c) = (simplex.coords[1], simplex.coords[2]);
    let Some(p) = trilaterate(&b, &c, [r, r, r], true)? else {
        return Ok(Verdict::inconclusive("no point at distance r from three vertices"));
    };
    let to_fourth = distance(&p, &simplex.coords[3])?;
    if to_fourth.hi() < r.lo() {
        Ok(Verdict::NoSuchConfiguration {
            reason: Reason::DistanceTooSmall,
            witness: Some(to_fourth),
        })
    } else {
        Ok(Verdict::inconclusive(format!("fourth distance {to_fourth} not below r")))
    }
}

/// Planar analog: triangle edges 01, 02, 12 at their caps, a point in the
/// plane at distance `r` from vertices 0 and 1 on the side of vertex 2.
pub fn check_face_escape(edges: [Interval; 3], r: Interval) -> R<Verdict> {
    if let Some(v) = check_positive(&edges, &r) {
        return Ok(v);
    }
    let d = vec![
        vec![Interval::ZERO, edges[0], edges[1]],
        vec![edges[0], Interval::ZERO, edges[2]],
        vec![edges[1], edges[2], Interval::ZERO],
    ];
    match sign_of(&cayley_menger(&d)?) {
        Sign::Negative => {
            return Ok(Verdict::NoSuchConfiguration {
                reason: Reason::Unrealizable,
                witness: None,
            })
        }
        Sign::Unknown => return Ok(Verdict::inconclusive("triangle realizability undecided")),
        Sign::Positive => {}
    }
    let Some([_, b, c]) = frame3(edges[0], edges[1], edges[2])? else {
        return Ok(Verdict::inconclusive("triangle coordinates unavailable"));
    };
    let x = b[0].scale(0.5)?;
    let Some(y) = sqrt_nonneg(&r.sqr()?.sub(&x.sqr()?)?)? else {
        return Ok(Verdict::inconclusive("no point at distance r from two vertices"));
    };
    let p = [x, y, Interval::ZERO];
    let to_third = distance(&p, &c)?;
    if to_third.hi() < r.lo() {
        Ok(Verdict::NoSuchConfiguration {
            reason: Reason::DistanceTooSmall,
            witness: Some(to_third),
        })
    } else {
        Ok(Verdict::inconclusive(format!("third distance {to_third} not below r")))
    }
}

/// Shortest segment through a triangle of circumradius at most `r1` whose
/// endpoints keep distance `r3` from every vertex: `2 sqrt(r3^2 - r1^2)`,
/// attained by the equilateral triangle and the segment along its axis.
/// Each endpoint lies outside the ball of radius `r3` about the vertex
/// nearest to the crossing point, which is within `r1` of it.
pub fn min_segment_length(r1: Interval, r3: Interval) -> R<Option<Interval>> {
    let s = r3.sqr()?.sub(&r1.sqr()?)?;
    if s.lo() <= 0.0 {
        return Ok(None);
    }
    Ok(Some(s.sqrt()?.scale(2.0)?))
}

pub fn check_segment_through_triangle(r1: Interval, r2: Interval, r3: Interval) -> R<Verdict> {
    if r1.lo() <= 0.0 || r2.lo() <= 0.0 || r3.lo() <= 0.0 {
        return Ok(Verdict::inconclusive("parameters must be positive"));
    }
    match min_segment_length(r1, r3)? {
        Some(len) if len.lo() > r2.hi() => Ok(Verdict::NoSuchConfiguration {
            reason: Reason::SegmentTooLong,
            witness: Some(len),
        }),
        Some(len) => Ok(Verdict::inconclusive(format!("minimal length {len} fits within r2"))),
        None => Ok(Verdict::inconclusive("endpoints can sit inside the circumdisk region")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linking {
    Linked,
    NotLinked,
    Unknown,
}

/// Whether the line through `o` and `q` passes through the interior of
/// triangle `p1 p2 p3`: the three orientations `det(q - o, pi - o, pj - o)`
/// must share a strict sign.
pub fn linking(o: &V3, q: &V3, p: [&V3; 3]) -> R<Linking> {
    let signs: Vec<Sign> = (0..3)
        .map(|i| orientation(o, q, p[i], p[(i + 1) % 3]).map(|v| sign_of(&v)))
        .collect::<R<_>>()?;
    if signs.iter().all(|&s| s == Sign::Positive) || signs.iter().all(|&s| s == Sign::Negative) {
        return Ok(Linking::Linked);
    }
    let has = |s: Sign| signs.contains(&s);
    if has(Sign::Positive) && has(Sign::Negative) {
        return Ok(Linking::NotLinked);
    }
    Ok(Linking::Unknown)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSpec {
    pub labels: Vec<String>,
    pub dmin: Vec<Vec<Interval>>,
    /// Upper bounds; `+inf` is written as `[f64::MAX, inf]`.
    pub dmax: Vec<Vec<Interval>>,
}

impl DistanceSpec {
    /// Unconstrained spec: all lower bounds 0, no upper bounds.
    pub fn free(labels: Vec<String>) -> Self {
        let n = labels.len();
        let inf = Interval::parse_bound("inf").expect("literal");
        DistanceSpec {
            labels,
            dmin: vec![vec![Interval::ZERO; n]; n],
            dmax: vec![vec![inf; n]; n],
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn set(&mut self, i: usize, j: usize, lo: Interval, hi: Interval) {
        self.dmin[i][j] = lo;
        self.dmin[j][i] = lo;
        self.dmax[i][j] = hi;
        self.dmax[j][i] = hi;
    }

    pub fn validate(&self) -> R<()> {
        let n = self.len();
        if self.dmin.len() != n || self.dmax.len() != n || self.dmin.iter().chain(&self.dmax).any(|r| r.len() != n) {
            return Err(GeomError::Invalid("distance tables must be n x n".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                if self.dmin[i][j] != self.dmin[j][i] || self.dmax[i][j] != self.dmax[j][i] {
                    return Err(GeomError::Invalid(format!("tables not symmetric at ({i}, {j})")));
                }
                if self.dmax[i][j].is_bounded() && self.dmin[i][j].lo() > self.dmax[i][j].hi() {
                    return Err(GeomError::Invalid(format!("dmin > dmax at ({i}, {j})")));
                }
            }
        }
        Ok(())
    }

    /// Certified upper bounds on every distance: shortest paths over the
    /// finite caps, rounded upward.
    pub fn path_upper_bounds(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut u: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            0.0
                        } else if self.dmax[i][j].is_bounded() {
                            self.dmax[i][j].hi()
                        } else {
                            f64::INFINITY
                        }
                    })
                    .collect()
            })
            .collect();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = u[i][k] + u[k][j];
                    let via = if via.is_finite() { via.next_up() } else { via };
                    if via < u[i][j] {
                        u[i][j] = via;
                    }
                }
            }
        }
        u
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    Cable,
    Strut,
    Unmarked,
}

/// Edge marks of a model configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Model {
    pub marks: BTreeMap<(usize, usize), Mark>,
}

impl Model {
    pub fn mark(&self, i: usize, j: usize) -> Mark {
        let k = if i < j { (i, j) } else { (j, i) };
        self.marks.get(&k).copied().unwrap_or(Mark::Unmarked)
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub max_cells: usize,
    pub min_width: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            max_cells: 4096,
            min_width: 1e-9,
        }
    }
}

/// Point order `0, p1, p2, p3, q`. The pairs fixing the extremal
/// configuration: the six among `0, p1, p2, p3`, then `q` to `0, p1, p2`.
pub const LINKED_PLAN: [(usize, usize); 9] = [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3), (0, 4), (1, 4), (2, 4)];

enum CellOutcome {
    Violated,
    Feasible,
    Unknown,
}

/// Problem with five points: the line through points 0 and 4 must pass
/// through triangle 1 2 3. First, caps are propagated along paths; with a
/// model, the marked plan pairs are fixed at their bounds (cable at dmax,
/// strut at dmin), at most one plan pair may stay free and is swept.
pub fn check_linked_line(spec: &DistanceSpec, model: Option<&Model>, cfg: &SweepConfig) -> R<Verdict> {
    spec.validate()?;
    if spec.len() != 5 {
        return Err(GeomError::Invalid("linked-line problems have 5 points".into()));
    }
    let u = spec.path_upper_bounds();
    for i in 0..5 {
        for j in i + 1..5 {
            if spec.dmin[i][j].lo() > u[i][j] {
                return Ok(Verdict::NoSuchConfiguration {
                    reason: Reason::TriangleInequality,
                    witness: Interval::new(0.0, u[i][j]).ok(),
                });
            }
        }
    }
    let Some(model) = model else {
        return Ok(Verdict::inconclusive("bounds consistent; no model for pivoting"));
    };
    let mut fixed: Vec<Option<Interval>> = Vec::new();
    let mut free = None;
    for (k, &(i, j)) in LINKED_PLAN.iter().enumerate() {
        match model.mark(i, j) {
            Mark::Cable if spec.dmax[i][j].is_bounded() => fixed.push(Some(spec.dmax[i][j])),
            Mark::Strut => fixed.push(Some(spec.dmin[i][j])),
            Mark::Cable => return Err(GeomError::Invalid(format!("cable on ({i}, {j}) without a cap"))),
            Mark::Unmarked => {
                if free.is_some() {
                    return Ok(Verdict::inconclusive("model leaves more than one plan pair free"));
                }
                free = Some(k);
                fixed.push(None);
            }
        }
    }
    let initial = match free {
        None => Interval::ZERO,
        Some(k) => {
            let (i, j) = LINKED_PLAN[k];
            let hi = u[i][j];
            if !hi.is_finite() {
                return Ok(Verdict::inconclusive("free plan pair has no finite cap"));
            }
            Interval::new(spec.dmin[i][j].lo(), hi)?
        }
    };
    let mut stack = vec![initial];
    let mut cells = 0;
    while let Some(cell) = stack.pop() {
        cells += 1;
        if cells > cfg.max_cells {
            return Ok(Verdict::inconclusive("sweep budget exhausted"));
        }
        let mut all_violated = true;
        let mut any_unknown = false;
        for up in [true, false] {
            match linked_cell(spec, &fixed, free, cell, up)? {
                CellOutcome::Violated => {}
                CellOutcome::Feasible => {
                    return Ok(Verdict::inconclusive(format!("extremal configuration exists near {cell}")));
                }
                CellOutcome::Unknown => {
                    all_violated = false;
                    any_unknown = true;
                }
            }
        }
        if all_violated {
            continue;
        }
        if any_unknown {
            if free.is_none() || cell.width() <= cfg.min_width {
                return Ok(Verdict::inconclusive(format!("undecided near {cell}")));
            }
            let m = cell.mid();
            stack.push(Interval::new(m, cell.hi())?);
            stack.push(Interval::new(cell.lo(), m)?);
        }
    }
    Ok(Verdict::NoSuchConfiguration {
        reason: Reason::DistanceTooSmall,
        witness: None,
    })
}

fn linked_cell(spec: &DistanceSpec, fixed: &[Option<Interval>], free: Option<usize>, cell: Interval, up: bool) -> R<CellOutcome> {
    let mut d = vec![vec![Interval::ZERO; 5]; 5];
    for (k, &(i, j)) in LINKED_PLAN.iter().enumerate() {
        let v = if Some(k) == free { cell } else { fixed[k].expect("fixed pair") };
        d[i][j] = v;
        d[j][i] = v;
    }
    let Some(cfg) = rigid_realization(&d, &[true, up])? else {
        return Ok(CellOutcome::Violated);
    };
    let mut unknown = false;
    for i in 0..5 {
        for j in i + 1..5 {
            let dist = cfg.distance(i, j)?;
            if dist.hi() < spec.dmin[i][j].lo() || (spec.dmax[i][j].is_bounded() && dist.lo() > spec.dmax[i][j].hi()) {
                return Ok(CellOutcome::Violated);
            }
            let inside = dist.lo() >= spec.dmin[i][j].hi() && (!spec.dmax[i][j].is_bounded() || dist.hi() <= spec.dmax[i][j].lo());
            unknown |= !inside;
        }
    }
    let c = &cfg.coords;
    match linking(&c[0], &c[4], [&c[1], &c[2], &c[3]])? {
        Linking::NotLinked => return Ok(CellOutcome::Violated),
        Linking::Unknown => unknown = true,
        Linking::Linked => {}
    }
    Ok(if unknown { CellOutcome::Unknown } else { CellOutcome::Feasible })
}
