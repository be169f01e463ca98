//! Rigorous upper bounds for linear programs from approximate duals.
//!
//! For `max c·x` subject to `A'x = b'`, `Ax <= b`, `l <= x <= u`, any `y` and
//! any `z >= 0` give `c·x = δ·x + y·A'x + z·Ax <= D + y·b' + z·b` where
//! `δ = c - yA' - zA` and `D >= sup δ·x` over the variable box. Everything
//! on the right is evaluated in interval arithmetic.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::interval::{format_f64, Interval, IntervalError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("variable {0} has an unbounded range")]
    UnboundedVariable(usize),
    #[error("augmentation precondition failed: {0}")]
    Augmentation(String),
    #[error("solver made no progress: {0}")]
    NoProgress(String),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// `max c·x` s.t. `aeq x = beq`, `aineq x <= bineq`, `x ∈ var_bounds`.
///
/// Variable bounds are kept apart from the inequality rows; the certificate
/// accounts for them through the residual term `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub aeq: Vec<Vec<Interval>>,
    pub beq: Vec<Interval>,
    pub aineq: Vec<Vec<Interval>>,
    pub bineq: Vec<Interval>,
    pub c: Vec<Interval>,
    pub var_bounds: Vec<Interval>,
}

impl LpProblem {
    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    /// Problem with point data from floats.
    pub fn from_f64(
        aeq: &[Vec<f64>],
        beq: &[f64],
        aineq: &[Vec<f64>],
        bineq: &[f64],
        c: &[f64],
        bounds: &[(f64, f64)],
    ) -> Result<Self, LpError> {
        let pv = |v: &[f64]| v.iter().map(|&x| Interval::point(x)).collect::<Vec<_>>();
        let p = LpProblem {
            aeq: aeq.iter().map(|r| pv(r)).collect(),
            beq: pv(beq),
            aineq: aineq.iter().map(|r| pv(r)).collect(),
            bineq: pv(bineq),
            c: pv(c),
            var_bounds: bounds
                .iter()
                .map(|&(l, u)| Interval::new(l, u))
                .collect::<Result<_, _>>()?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.c.len();
        if self.var_bounds.len() != n {
            return Err(LpError::DimensionMismatch(format!(
                "{} variable bounds for {n} variables",
                self.var_bounds.len()
            )));
        }
        if self.aeq.len() != self.beq.len() || self.aineq.len() != self.bineq.len() {
            return Err(LpError::DimensionMismatch("row count differs from right-hand side".into()));
        }
        for (k, row) in self.aeq.iter().chain(&self.aineq).enumerate() {
            if row.len() != n {
                return Err(LpError::DimensionMismatch(format!("row {k} has {} entries, expected {n}", row.len())));
            }
        }
        if let Some(j) = self.var_bounds.iter().position(|b| !b.is_bounded()) {
            return Err(LpError::UnboundedVariable(j));
        }
        Ok(())
    }

    /// Canonical text used for digests.
    pub fn canonical_text(&self) -> String {
        let mut s = String::new();
        let row = |s: &mut String, tag: &str, v: &[Interval]| {
            let _ = write!(s, "{tag}");
            for x in v {
                let _ = write!(s, " {x}");
            }
            s.push('\n');
        };
        let _ = writeln!(s, "n {}", self.num_vars());
        for (r, b) in self.aeq.iter().zip(&self.beq) {
            row(&mut s, "eq", r);
            row(&mut s, "beq", std::slice::from_ref(b));
        }
        for (r, b) in self.aineq.iter().zip(&self.bineq) {
            row(&mut s, "le", r);
            row(&mut s, "ble", std::slice::from_ref(b));
        }
        row(&mut s, "c", &self.c);
        row(&mut s, "bounds", &self.var_bounds);
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub clamped: bool,
}

/// Zeroes negative inequality multipliers; `y` is left untouched.
pub fn clamp_dual(p: &LpProblem, y: &[f64], z: &[f64]) -> Result<DualSolution, LpError> {
    if y.len() != p.aeq.len() || z.len() != p.aineq.len() {
        return Err(LpError::DimensionMismatch(format!(
            "dual has |y|={} |z|={}, problem has {} equality and {} inequality rows",
            y.len(),
            z.len(),
            p.aeq.len(),
            p.aineq.len()
        )));
    }
    if let Some(v) = y.iter().chain(z).find(|v| !v.is_finite()) {
        return Err(LpError::DimensionMismatch(format!("non-finite dual entry {v}")));
    }
    let mut clamped = false;
    let z = z
        .iter()
        .map(|&v| {
            if v < 0.0 {
                clamped = true;
                0.0
            } else {
                v + 0.0
            }
        })
        .collect();
    Ok(DualSolution {
        y: y.to_vec(),
        z,
        clamped,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCertificate {
    pub bound: f64,
    /// Upper bound on `δ·x` over the variable box.
    pub delta_bound: f64,
    /// Enclosure of `δ = c - yA' - zA`.
    pub residual: Vec<Interval>,
    /// SHA-256 of the problem and dual, hex encoded.
    pub digest: String,
}

impl BoundCertificate {
    pub fn residual_max_norm(&self) -> f64 {
        self.residual.iter().map(Interval::mag).fold(0.0, f64::max)
    }
}

pub fn digest(p: &LpProblem, d: &DualSolution) -> String {
    let mut h = Sha256::new();
    h.update(p.canonical_text().as_bytes());
    let mut s = String::from("y");
    for v in &d.y {
        let _ = write!(s, " {}", format_f64(*v));
    }
    s.push_str("\nz");
    for v in &d.z {
        let _ = write!(s, " {}", format_f64(*v));
    }
    h.update(s.as_bytes());
    hex::encode(h.finalize())
}

/// Rigorous upper bound on the LP maximum from any dual with `z >= 0`.
pub fn certify_upper_bound(p: &LpProblem, d: &DualSolution) -> Result<BoundCertificate, LpError> {
    p.validate()?;
    if d.y.len() != p.aeq.len() || d.z.len() != p.aineq.len() {
        return Err(LpError::DimensionMismatch("dual length differs from row count".into()));
    }
    if d.z.iter().any(|&v| !(v >= 0.0)) {
        return Err(LpError::DimensionMismatch("z must be nonnegative; clamp first".into()));
    }
    let n = p.num_vars();
    let mut delta = p.c.clone();
    for (row, &yi) in p.aeq.iter().zip(&d.y) {
        let yv = Interval::point(yi);
        for j in 0..n {
            delta[j] = delta[j].sub(&row[j].mul(&yv)?)?;
        }
    }
    for (row, &zi) in p.aineq.iter().zip(&d.z) {
        let zv = Interval::point(zi);
        for j in 0..n {
            delta[j] = delta[j].sub(&row[j].mul(&zv)?)?;
        }
    }
    let sums = || -> Result<(Interval, Interval), IntervalError> {
        let mut dsum = Interval::ZERO;
        for (dj, bj) in delta.iter().zip(&p.var_bounds) {
            dsum = dsum.add(&dj.mul(bj)?)?;
        }
        let mut total = dsum;
        for (b, &yi) in p.beq.iter().zip(&d.y) {
            total = total.add(&b.mul(&Interval::point(yi))?)?;
        }
        for (b, &zi) in p.bineq.iter().zip(&d.z) {
            total = total.add(&b.mul(&Interval::point(zi))?)?;
        }
        Ok((dsum, total))
    };
    // Overflow leaves only the trivial bound.
    let (delta_bound, bound) = match sums() {
        Ok((dsum, total)) => (dsum.hi(), total.hi()),
        Err(IntervalError::Unbounded(_)) => (f64::INFINITY, f64::INFINITY),
        Err(e) => return Err(e.into()),
    };
    Ok(BoundCertificate {
        bound,
        delta_bound,
        residual: delta,
        digest: digest(p, d),
    })
}

/// Adds a variable `t ∈ [0,1]` with objective weight `k`:
/// `A'x + b't = b'`, `Ax + bt <= b`, `l(1-t) <= x <= u(1-t)`, `0 <= t <= 1`.
/// The result is feasible at `(x, t) = (0, 1)`; when `k` is below the optimum
/// of the original problem every optimum of the new one has `t = 0`.
pub fn augment_with_t(p: &LpProblem, k: f64) -> Result<LpProblem, LpError> {
    p.validate()?;
    if !k.is_finite() {
        return Err(LpError::Augmentation(format!("K = {k} is not finite")));
    }
    if let Some(j) = p.var_bounds.iter().position(|b| !b.contains_zero()) {
        return Err(LpError::Augmentation(format!(
            "variable {j} has bounds {} not containing 0; translate the problem first",
            p.var_bounds[j]
        )));
    }
    let n = p.num_vars();
    let zero = Interval::ZERO;
    let ext = |row: &[Interval], t: Interval| row.iter().copied().chain(std::iter::once(t)).collect::<Vec<_>>();
    let aeq = p.aeq.iter().zip(&p.beq).map(|(r, b)| ext(r, *b)).collect();
    let mut aineq: Vec<Vec<Interval>> = p.aineq.iter().zip(&p.bineq).map(|(r, b)| ext(r, *b)).collect();
    let mut bineq = p.bineq.clone();
    for (j, b) in p.var_bounds.iter().enumerate() {
        let u = Interval::point(b.hi());
        let l = Interval::point(b.lo());
        let mut up = vec![zero; n + 1];
        up[j] = Interval::ONE;
        up[n] = u;
        aineq.push(up);
        bineq.push(u);
        let mut down = vec![zero; n + 1];
        down[j] = -Interval::ONE;
        down[n] = -l;
        aineq.push(down);
        bineq.push(-l);
    }
    let mut t_le = vec![zero; n + 1];
    t_le[n] = Interval::ONE;
    aineq.push(t_le);
    bineq.push(Interval::ONE);
    let mut t_ge = vec![zero; n + 1];
    t_ge[n] = -Interval::ONE;
    aineq.push(t_ge);
    bineq.push(zero);
    let mut c = p.c.clone();
    c.push(Interval::point(k));
    let mut var_bounds = p.var_bounds.clone();
    var_bounds.push(Interval::new(0.0, 1.0)?);
    Ok(LpProblem {
        aeq,
        beq: p.beq.clone(),
        aineq,
        bineq,
        c,
        var_bounds,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxSolution {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub objective: f64,
}

const EPS: f64 = 1e-9;

/// Dense two-phase simplex on the midpoint data. No rigor: the output is
/// meant to be fed to [`certify_upper_bound`].
pub fn solve_approx(p: &LpProblem) -> Result<ApproxSolution, LpError> {
    p.validate()?;
    let n = p.num_vars();
    let mid = |v: &[Interval]| v.iter().map(Interval::mid).collect::<Vec<f64>>();
    let lower: Vec<f64> = p.var_bounds.iter().map(Interval::lo).collect();
    let upper: Vec<f64> = p.var_bounds.iter().map(Interval::hi).collect();
    let c = mid(&p.c);
    let shift = |row: &[f64], b: f64| b - row.iter().zip(&lower).map(|(a, l)| a * l).sum::<f64>();

    // Rows: inequality rows, then bound rows, then equalities.
    let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    for (r, b) in p.aineq.iter().zip(&p.bineq) {
        let r = mid(r);
        let rhs = shift(&r, b.mid());
        rows.push((r, rhs, false));
    }
    for j in 0..n {
        let mut r = vec![0.0; n];
        r[j] = 1.0;
        rows.push((r, upper[j] - lower[j], false));
    }
    for (r, b) in p.aeq.iter().zip(&p.beq) {
        let r = mid(r);
        let rhs = shift(&r, b.mid());
        rows.push((r, rhs, true));
    }
    let m = rows.len();
    let n_le = m - p.aeq.len();
    // Columns: x' (n), slacks (n_le), artificials (m, one per row; used as
    // the identity block even when not needed for feasibility).
    let ncols = n + n_le + m;
    let mut t = vec![vec![0.0; ncols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut sign = vec![1.0; m];
    let mut needs_art = vec![false; m];
    for (i, (r, rhs, is_eq)) in rows.iter().enumerate() {
        let s = if *rhs < 0.0 { -1.0 } else { 1.0 };
        sign[i] = s;
        for j in 0..n {
            t[i][j] = s * r[j];
        }
        if !is_eq {
            t[i][n + i] = s;
        }
        t[i][n + n_le + i] = 1.0;
        t[i][ncols] = s * rhs;
        needs_art[i] = *is_eq || s < 0.0;
        basis[i] = if needs_art[i] { n + n_le + i } else { n + i };
    }
    let max_iter = 50 * (m + ncols) + 1000;
    let art_allowed: Vec<bool> = (0..ncols).map(|j| j < n + n_le || needs_art[j - n - n_le]).collect();
    if needs_art.iter().any(|&a| a) {
        let cost: Vec<f64> = (0..ncols)
            .map(|j| if j >= n + n_le && needs_art[j - n - n_le] { -1.0 } else { 0.0 })
            .collect();
        simplex_iterate(&mut t, &mut basis, &cost, &art_allowed, max_iter)?;
        let infeas: f64 = (0..m).filter(|&i| basis[i] >= n + n_le).map(|i| t[i][ncols]).sum();
        if infeas > 1e-7 * (1.0 + rows.iter().map(|r| r.1.abs()).fold(0.0, f64::max)) {
            return Err(LpError::NoProgress(format!("phase one ended with infeasibility {infeas:e}")));
        }
        for i in 0..m {
            if basis[i] >= n + n_le {
                let best = (0..n + n_le)
                    .filter(|j| !basis.contains(j))
                    .max_by(|&a, &b| t[i][a].abs().partial_cmp(&t[i][b].abs()).unwrap());
                if let Some(j) = best {
                    if t[i][j].abs() > EPS {
                        pivot(&mut t, &mut basis, i, j);
                    }
                }
            }
        }
    }
    let cost: Vec<f64> = (0..ncols).map(|j| if j < n { c[j] } else { 0.0 }).collect();
    let allowed: Vec<bool> = (0..ncols).map(|j| j < n + n_le).collect();
    simplex_iterate(&mut t, &mut basis, &cost, &allowed, max_iter)?;

    let mut x = lower.clone();
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = lower[basis[i]] + t[i][ncols];
        }
    }
    for j in 0..n {
        x[j] = x[j].clamp(lower[j], upper[j]);
    }
    // Row duals π_i = c_B · B⁻¹e_i, read from the identity block.
    let pi: Vec<f64> = (0..m)
        .map(|r| {
            let col = n + n_le + r;
            let v: f64 = (0..m).map(|i| cost[basis[i]] * t[i][col]).sum();
            v * sign[r]
        })
        .collect();
    let z = pi[..p.aineq.len()].to_vec();
    let y = pi[n_le..].to_vec();
    let objective = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    Ok(ApproxSolution { x, y, z, objective })
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, col: usize) {
    let p = t[r][col];
    for v in t[r].iter_mut() {
        *v /= p;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r {
            let f = row[col];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                row[col] = 0.0;
            }
        }
    }
    basis[r] = col;
}

fn simplex_iterate(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    allowed: &[bool],
    max_iter: usize,
) -> Result<(), LpError> {
    let m = t.len();
    let ncols = cost.len();
    let mut degenerate_run = 0usize;
    for _ in 0..max_iter {
        let mut in_basis = vec![false; ncols];
        for &b in basis.iter() {
            in_basis[b] = true;
        }
        // Reduced costs.
        let mut entering = None;
        let mut best = EPS;
        for j in 0..ncols {
            if !allowed[j] || in_basis[j] {
                continue;
            }
            let r = cost[j] - (0..m).map(|i| cost[basis[i]] * t[i][j]).sum::<f64>();
            if degenerate_run > 50 {
                // Bland's rule once progress stalls.
                if r > EPS {
                    entering = Some(j);
                    break;
                }
            } else if r > best {
                best = r;
                entering = Some(j);
            }
        }
        let Some(j) = entering else { return Ok(()) };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = t[i][j];
            if a > EPS {
                let ratio = t[i][ncols].max(0.0) / a;
                let better = match leave {
                    None => true,
                    Some((li, lr)) => ratio < lr - 1e-12 || (ratio <= lr + 1e-12 && basis[i] < basis[li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((i, ratio)) = leave else {
            return Err(LpError::NoProgress("objective unbounded along a ray".into()));
        };
        degenerate_run = if ratio <= 1e-12 { degenerate_run + 1 } else { 0 };
        pivot(t, basis, i, j);
    }
    Err(LpError::NoProgress(format!("iteration limit {max_iter} reached")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_var(k_bound: f64) -> LpProblem {
        LpProblem::from_f64(&[], &[], &[vec![1.0]], &[k_bound], &[1.0], &[(0.0, 2.0)]).unwrap()
    }

    #[test]
    fn clamp_examples() {
        let p = LpProblem::from_f64(&[], &[], &[vec![1.0], vec![1.0]], &[1.0, 1.0], &[1.0], &[(0.0, 1.0)]).unwrap();
        let d = clamp_dual(&p, &[], &[0.5, -1e-9]).unwrap();
        assert_eq!(d.z, vec![0.5, 0.0]);
        assert!(d.clamped);
        let d = clamp_dual(&p, &[], &[0.0, 0.0]).unwrap();
        assert!(!d.clamped);
        assert!(clamp_dual(&p, &[1.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn certify_examples() {
        let p = one_var(1.0);
        let c = certify_upper_bound(&p, &clamp_dual(&p, &[], &[1.0]).unwrap()).unwrap();
        assert_eq!(c.bound, 1.0);
        let c = certify_upper_bound(&p, &clamp_dual(&p, &[], &[0.999]).unwrap()).unwrap();
        assert!(c.delta_bound <= 0.002 + 1e-15);
        assert!(c.bound >= 1.0 && c.bound <= 1.001 + 1e-15);
        let p2 = LpProblem::from_f64(
            &[],
            &[],
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            &[1.0, 1.0],
            &[1.0, 1.0],
            &[(0.0, 2.0), (0.0, 2.0)],
        )
        .unwrap();
        let c = certify_upper_bound(&p2, &clamp_dual(&p2, &[], &[1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(c.bound, 2.0);
        assert_eq!(c.digest.len(), 64);
    }

    #[test]
    fn bad_dual_is_still_sound() {
        let p = one_var(1.0);
        let c = certify_upper_bound(&p, &clamp_dual(&p, &[], &[0.0]).unwrap()).unwrap();
        assert_eq!(c.bound, 2.0);
    }

    #[test]
    fn solver_examples() {
        let s = solve_approx(&one_var(1.0)).unwrap();
        assert!((s.x[0] - 1.0).abs() < 1e-9);
        assert!((s.z[0] - 1.0).abs() < 1e-9);
        let p = LpProblem::from_f64(&[], &[], &[vec![1.0, 1.0]], &[1.0], &[1.0, 1.0], &[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        assert!((solve_approx(&p).unwrap().objective - 1.0).abs() < 1e-9);
        let eq = LpProblem::from_f64(
            &[vec![1.0, -1.0]],
            &[0.0],
            &[vec![1.0, 2.0]],
            &[3.0],
            &[2.0, 1.0],
            &[(-5.0, 5.0), (-5.0, 5.0)],
        )
        .unwrap();
        let s = solve_approx(&eq).unwrap();
        assert!((s.objective - 3.0).abs() < 1e-9);
        let c = certify_upper_bound(&eq, &clamp_dual(&eq, &s.y, &s.z).unwrap()).unwrap();
        assert!(c.bound >= 3.0 && c.bound < 3.0 + 1e-9, "{}", c.bound);
    }

    #[test]
    fn contradictory_rows_report_no_progress() {
        let p = LpProblem::from_f64(&[], &[], &[vec![1.0], vec![-1.0]], &[0.2, -0.5], &[1.0], &[(0.0, 1.0)]).unwrap();
        assert!(matches!(solve_approx(&p), Err(LpError::NoProgress(_))));
    }

    #[test]
    fn augmentation_examples() {
        let p = one_var(1.0);
        let a = augment_with_t(&p, 0.5).unwrap();
        assert_eq!(a.num_vars(), 2);
        let s = solve_approx(&a).unwrap();
        assert!((s.objective - 1.0).abs() < 1e-9 && s.x[1].abs() < 1e-9);
        let a5 = augment_with_t(&p, 5.0).unwrap();
        let s = solve_approx(&a5).unwrap();
        assert!((s.objective - 5.0).abs() < 1e-9 && (s.x[1] - 1.0).abs() < 1e-9);
        // Rows t <= 1 and -t <= 0 are the last two.
        let k = a.aineq.len();
        assert_eq!(a.aineq[k - 2][1], Interval::ONE);
        assert_eq!(a.bineq[k - 2], Interval::ONE);
        assert_eq!(a.aineq[k - 1][1], -Interval::ONE);
        let shifted = LpProblem::from_f64(&[], &[], &[vec![1.0]], &[3.0], &[1.0], &[(1.0, 4.0)]).unwrap();
        assert!(matches!(augment_with_t(&shifted, 0.0), Err(LpError::Augmentation(_))));
    }
}
