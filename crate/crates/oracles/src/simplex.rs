//! Exact two-phase simplex over big rationals with Bland's rule.
//!
//! Solves `max c·x` subject to `Aeq x = beq`, `Aineq x <= bineq` and finite
//! bounds `l <= x <= u`. Slow, but exact: the reference answer for LP tests.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

#[derive(Debug, Clone)]
pub struct ExactLp {
    pub aeq: Vec<Vec<Q>>,
    pub beq: Vec<Q>,
    pub aineq: Vec<Vec<Q>>,
    pub bineq: Vec<Q>,
    pub c: Vec<Q>,
    pub lower: Vec<Q>,
    pub upper: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExactOutcome {
    Optimal { value: Q, x: Vec<Q> },
    Infeasible,
    Unbounded,
}

impl ExactOutcome {
    pub fn value(&self) -> Option<&Q> {
        match self {
            ExactOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Q {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = &*v - &f * pv;
                }
            }
        }
        self.basis[r] = col;
    }

    /// Maximizes `cost · vars` over allowed columns. Returns false if unbounded.
    fn optimize(&mut self, cost: &[Q], allowed: &[bool]) -> bool {
        loop {
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                        r -= &cost[b] * &self.rows[i][j];
                    }
                }
                if r.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else { return true };
            let mut leave: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if a.is_positive() {
                    let ratio = self.rhs(i) / a;
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                None => return false,
                Some((i, _)) => self.pivot(i, j),
            }
        }
    }
}

fn dot(a: &[Q], x: &[Q]) -> Q {
    a.iter().zip(x).fold(Q::zero(), |acc, (ai, xi)| acc + ai * xi)
}

/// Solves the LP exactly.
pub fn solve(lp: &ExactLp) -> ExactOutcome {
    let n = lp.c.len();
    assert_eq!(lp.lower.len(), n);
    assert_eq!(lp.upper.len(), n);
    if lp.lower.iter().zip(&lp.upper).any(|(l, u)| l > u) {
        return ExactOutcome::Infeasible;
    }
    // Shift x = l + x', x' >= 0.
    let mut le_rows: Vec<(Vec<Q>, Q)> = Vec::new();
    for (row, b) in lp.aineq.iter().zip(&lp.bineq) {
        le_rows.push((row.clone(), b - dot(row, &lp.lower)));
    }
    for j in 0..n {
        let mut row = vec![Q::zero(); n];
        row[j] = Q::one();
        le_rows.push((row, &lp.upper[j] - &lp.lower[j]));
    }
    let eq_rows: Vec<(Vec<Q>, Q)> = lp
        .aeq
        .iter()
        .zip(&lp.beq)
        .map(|(row, b)| (row.clone(), b - dot(row, &lp.lower)))
        .collect();

    let ns = le_rows.len();
    let m = ns + eq_rows.len();
    // Every row with a negative right side (after sign normalization) or an
    // equality row gets an artificial column.
    let needs_art: Vec<bool> = le_rows
        .iter()
        .map(|(_, b)| b.is_negative())
        .chain(eq_rows.iter().map(|_| true))
        .collect();
    let na = needs_art.iter().filter(|&&x| x).count();
    let ncols = n + ns + na;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art = n + ns;
    for (i, (a, b)) in le_rows.iter().chain(eq_rows.iter()).enumerate() {
        let mut row = vec![Q::zero(); ncols + 1];
        let sign = if b.is_negative() { -Q::one() } else { Q::one() };
        for j in 0..n {
            row[j] = &a[j] * &sign;
        }
        if i < ns {
            row[n + i] = sign.clone();
        }
        row[ncols] = b * &sign;
        if needs_art[i] {
            row[art] = Q::one();
            basis.push(art);
            art += 1;
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, basis, ncols };

    if na > 0 {
        let mut cost = vec![Q::zero(); ncols];
        for c in cost.iter_mut().skip(n + ns) {
            *c = -Q::one();
        }
        let allowed = vec![true; ncols];
        t.optimize(&cost, &allowed);
        let infeas: Q = (0..t.rows.len())
            .filter(|&i| t.basis[i] >= n + ns)
            .map(|i| t.rhs(i).clone())
            .fold(Q::zero(), |a, b| a + b);
        if infeas.is_positive() {
            return ExactOutcome::Infeasible;
        }
        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= n + ns {
                match (0..n + ns).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let mut cost = vec![Q::zero(); ncols];
    cost[..n].clone_from_slice(&lp.c);
    let allowed: Vec<bool> = (0..ncols).map(|j| j < n + ns).collect();
    if !t.optimize(&cost, &allowed) {
        return ExactOutcome::Unbounded;
    }
    let mut x = lp.lower.clone();
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = &lp.lower[b] + t.rhs(i);
        }
    }
    let value = dot(&lp.c, &x);
    ExactOutcome::Optimal { value, x }
}
