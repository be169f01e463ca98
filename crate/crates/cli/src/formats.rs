//! Text formats read and written by the command-line tool.
//!
//! All files are line oriented; `#` starts a comment. Numeric data go
//! through [`Interval::parse_literal`]: a bare decimal is a tight enclosure,
//! `lo..hi` an explicit interval.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use rigor::assembly::{AssemblyProblem, DualityCertificate, LocalDomain};
use rigor::expr::Expr;
use rigor::geom::{DistanceSpec, Mark, Model};
use rigor::interval::{exact_decimal, format_f64, Interval};
use rigor::lp::LpProblem;
use rigor::prover::{ProofTask, Strictness};
use rigor::taylor::IntervalBox;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError {
    /// 1-based line, or 0 for problems with the file as a whole.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for FormatError {}

type R<T> = Result<T, FormatError>;

fn err<T>(line: usize, message: impl Into<String>) -> R<T> {
    Err(FormatError {
        line,
        message: message.into(),
    })
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn literal(line: usize, s: &str) -> R<Interval> {
    Interval::parse_literal(s).or_else(|e| err(line, e.to_string()))
}

fn bound(line: usize, s: &str) -> R<Interval> {
    Interval::parse_bound(s).or_else(|e| err(line, e.to_string()))
}

fn index(line: usize, s: &str, what: &str, limit: usize) -> R<usize> {
    match s.parse::<usize>() {
        Ok(i) if i < limit => Ok(i),
        Ok(i) => err(line, format!("{what} index {i} out of range (have {limit})")),
        Err(_) => err(line, format!("expected a {what} index, found `{s}`")),
    }
}

fn count(line: usize, s: Option<&str>, what: &str) -> R<usize> {
    s.and_then(|s| s.parse().ok())
        .map_or_else(|| err(line, format!("`{what}` needs a nonnegative integer")), Ok)
}

fn expr(line: usize, text: &str, arity: usize) -> R<Expr> {
    Expr::parse(text, arity).or_else(|e| err(line, e.to_string()))
}

/// Text for one endpoint that reads back as exactly `x`: the shortest form
/// when that decimal is representable, else the full binary expansion.
fn exact_endpoint(x: f64) -> String {
    if !x.is_finite() {
        return format_f64(x);
    }
    let short = format_f64(x);
    match Interval::from_decimal_string(&short) {
        Ok(v) if v.is_point() => short,
        _ => exact_decimal(x),
    }
}

/// Writes an interval so that [`literal`] reads it back exactly.
fn write_literal(v: &Interval) -> String {
    if v.is_point() {
        return exact_endpoint(v.lo());
    }
    // A tight enclosure of a short decimal is written as that decimal.
    if v.is_bounded() {
        for digits in 0..17 {
            let text = format!("{:.digits$e}", v.mid());
            if Interval::from_decimal_string(&text).is_ok_and(|e| e == *v) {
                return format_f64(text.parse().unwrap_or(v.mid()));
            }
        }
    }
    {
        format!("{}..{}", exact_endpoint(v.lo()), exact_endpoint(v.hi()))
    }
}

// Inequality tasks ------------------------------------------------------------

/// ```text
/// arity 2
/// expr pow(x0,2) - 2*x0*x1 + pow(x1,2)
/// domain 0..1 0..1
/// margin 0
/// strictness strict
/// constraint 1 - x0 - x1
/// ```
pub fn parse_task(text: &str) -> R<ProofTask> {
    let mut arity = None;
    let mut body: Option<(usize, String)> = None;
    let mut domain = None;
    let mut margin = 0.0;
    let mut strictness = Strictness::Strict;
    let mut constraints = Vec::new();
    for (n, l) in lines(text) {
        let (key, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let rest = rest.trim();
        match key {
            "arity" => arity = Some(count(n, Some(rest), "arity")?),
            "expr" => body = Some((n, rest.to_string())),
            "domain" => {
                let dims = rest.split_whitespace().map(|t| literal(n, t)).collect::<R<Vec<_>>>()?;
                let b = IntervalBox::new(dims).or_else(|e| err(n, e.to_string()))?;
                domain = Some((n, b));
            }
            "margin" => {
                margin = rest.parse::<f64>().or_else(|_| err(n, format!("bad margin `{rest}`")))?;
                if !(margin >= 0.0 && margin.is_finite()) {
                    return err(n, "margin must be finite and nonnegative");
                }
            }
            "strictness" => {
                strictness = match rest {
                    "strict" => Strictness::Strict,
                    "non-strict" => Strictness::NonStrict,
                    _ => return err(n, format!("strictness is `strict` or `non-strict`, not `{rest}`")),
                }
            }
            "constraint" => constraints.push((n, rest.to_string())),
            _ => return err(n, format!("unknown key `{key}`")),
        }
    }
    let Some(arity) = arity else { return err(0, "missing `arity`") };
    let Some((en, body)) = body else { return err(0, "missing `expr`") };
    let Some((dn, domain)) = domain else { return err(0, "missing `domain`") };
    if domain.len() != arity {
        return err(dn, format!("domain has {} components, arity is {arity}", domain.len()));
    }
    let e = expr(en, &body, arity)?;
    let cs = constraints.iter().map(|(n, c)| expr(*n, c, arity)).collect::<R<Vec<_>>>()?;
    Ok(ProofTask::new(e, domain)
        .with_margin(margin)
        .with_strictness(strictness)
        .with_constraints(cs))
}

pub fn write_task(t: &ProofTask) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "arity {}", t.domain.len());
    let _ = writeln!(s, "expr {}", t.expr);
    let dims: Vec<String> = t.domain.dims().iter().map(write_literal).collect();
    let _ = writeln!(s, "domain {}", dims.join(" "));
    let _ = writeln!(s, "margin {}", format_f64(t.margin));
    let _ = writeln!(s, "strictness {}", t.strictness.as_str());
    for c in &t.constraints {
        let _ = writeln!(s, "constraint {c}");
    }
    s
}

// Linear programs -------------------------------------------------------------

/// Sparse LP: counts first, then sections of triplets.
///
/// ```text
/// VARS 2
/// EQ_ROWS 0
/// INEQ_ROWS 1
/// OBJ
/// 0 1
/// INEQ
/// 0 0 1
/// 0 1 1
/// INEQ_RHS
/// 0 1
/// BOUNDS
/// 0 0..1
/// 1 0..1
/// ```
pub fn parse_lp(text: &str) -> R<LpProblem> {
    let (mut n, mut meq, mut mineq) = (None, None, None);
    let mut section: Option<&str> = None;
    let mut p: Option<LpProblem> = None;
    let mut seen = BTreeMap::new();
    let mut bounded = Vec::new();
    for (ln, l) in lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks[0] {
            "VARS" => n = Some(count(ln, toks.get(1).copied(), "VARS")?),
            "EQ_ROWS" => meq = Some(count(ln, toks.get(1).copied(), "EQ_ROWS")?),
            "INEQ_ROWS" => mineq = Some(count(ln, toks.get(1).copied(), "INEQ_ROWS")?),
            s @ ("OBJ" | "EQ" | "EQ_RHS" | "INEQ" | "INEQ_RHS" | "BOUNDS") => {
                if toks.len() != 1 {
                    return err(ln, format!("section header `{s}` takes no arguments"));
                }
                section = Some(s);
            }
            _ => {
                let Some(sec) = section else {
                    return err(ln, format!("unexpected `{}` before any section", toks[0]));
                };
                let (Some(n), Some(meq), Some(mineq)) = (n, meq, mineq) else {
                    return err(ln, "VARS, EQ_ROWS and INEQ_ROWS must precede the sections");
                };
                let p = p.get_or_insert_with(|| {
                    bounded = vec![false; n];
                    LpProblem {
                        aeq: vec![vec![Interval::ZERO; n]; meq],
                        beq: vec![Interval::ZERO; meq],
                        aineq: vec![vec![Interval::ZERO; n]; mineq],
                        bineq: vec![Interval::ZERO; mineq],
                        c: vec![Interval::ZERO; n],
                        var_bounds: vec![Interval::ZERO; n],
                    }
                });
                let want = if matches!(sec, "EQ" | "INEQ") { 3 } else { 2 };
                if toks.len() != want {
                    return err(ln, format!("{sec} entries have {want} fields, found {}", toks.len()));
                }
                let key = (sec, toks[0].to_string(), if want == 3 { toks[1].to_string() } else { String::new() });
                if let Some(prev) = seen.insert(key, ln) {
                    return err(ln, format!("duplicate {sec} entry (first on line {prev})"));
                }
                match sec {
                    "OBJ" => p.c[index(ln, toks[0], "variable", n)?] = literal(ln, toks[1])?,
                    "EQ" => {
                        let (i, j) = (index(ln, toks[0], "row", meq)?, index(ln, toks[1], "variable", n)?);
                        p.aeq[i][j] = literal(ln, toks[2])?;
                    }
                    "INEQ" => {
                        let (i, j) = (index(ln, toks[0], "row", mineq)?, index(ln, toks[1], "variable", n)?);
                        p.aineq[i][j] = literal(ln, toks[2])?;
                    }
                    "EQ_RHS" => p.beq[index(ln, toks[0], "row", meq)?] = literal(ln, toks[1])?,
                    "INEQ_RHS" => p.bineq[index(ln, toks[0], "row", mineq)?] = literal(ln, toks[1])?,
                    _ => {
                        let j = index(ln, toks[0], "variable", n)?;
                        p.var_bounds[j] = literal(ln, toks[1])?;
                        bounded[j] = true;
                    }
                }
            }
        }
    }
    let (Some(n), Some(meq), Some(mineq)) = (n, meq, mineq) else {
        return err(0, "missing VARS, EQ_ROWS or INEQ_ROWS");
    };
    let p = p.unwrap_or_else(|| {
        bounded = vec![false; n];
        LpProblem {
            aeq: vec![vec![Interval::ZERO; n]; meq],
            beq: vec![Interval::ZERO; meq],
            aineq: vec![vec![Interval::ZERO; n]; mineq],
            bineq: vec![Interval::ZERO; mineq],
            c: vec![Interval::ZERO; n],
            var_bounds: vec![Interval::ZERO; n],
        }
    });
    if let Some(j) = bounded.iter().position(|b| !b) {
        return err(0, format!("variable {j} has no BOUNDS entry"));
    }
    p.validate().or_else(|e| err(0, e.to_string()))?;
    Ok(p)
}

pub fn write_lp(p: &LpProblem) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "VARS {}\nEQ_ROWS {}\nINEQ_ROWS {}", p.num_vars(), p.aeq.len(), p.aineq.len());
    let vector = |s: &mut String, name: &str, v: &[Interval]| {
        let _ = writeln!(s, "{name}");
        for (j, x) in v.iter().enumerate().filter(|(_, x)| **x != Interval::ZERO) {
            let _ = writeln!(s, "{j} {}", write_literal(x));
        }
    };
    let matrix = |s: &mut String, name: &str, m: &[Vec<Interval>]| {
        let _ = writeln!(s, "{name}");
        for (i, row) in m.iter().enumerate() {
            for (j, x) in row.iter().enumerate().filter(|(_, x)| **x != Interval::ZERO) {
                let _ = writeln!(s, "{i} {j} {}", write_literal(x));
            }
        }
    };
    vector(&mut s, "OBJ", &p.c);
    matrix(&mut s, "EQ", &p.aeq);
    vector(&mut s, "EQ_RHS", &p.beq);
    matrix(&mut s, "INEQ", &p.aineq);
    vector(&mut s, "INEQ_RHS", &p.bineq);
    let _ = writeln!(s, "BOUNDS");
    for (j, b) in p.var_bounds.iter().enumerate() {
        let _ = writeln!(s, "{j} {}", write_literal(b));
    }
    s
}

/// `y v1 v2 ...` and `z v1 v2 ...`; either line may list no values.
pub fn parse_dual(text: &str) -> R<(Vec<f64>, Vec<f64>)> {
    let (mut y, mut z) = (None, None);
    for (ln, l) in lines(text) {
        let mut toks = l.split_whitespace();
        let key = toks.next().unwrap_or("");
        let vals = toks
            .map(|t| t.parse::<f64>().ok().filter(|v| v.is_finite()).map_or_else(|| err(ln, format!("bad dual entry `{t}`")), Ok))
            .collect::<R<Vec<f64>>>()?;
        let slot = match key {
            "y" => &mut y,
            "z" => &mut z,
            _ => return err(ln, format!("dual lines start with `y` or `z`, not `{key}`")),
        };
        if slot.replace(vals).is_some() {
            return err(ln, format!("`{key}` given twice"));
        }
    }
    Ok((y.unwrap_or_default(), z.unwrap_or_default()))
}

pub fn write_dual(y: &[f64], z: &[f64]) -> String {
    let join = |v: &[f64]| v.iter().map(|x| format!(" {}", format_f64(*x))).collect::<String>();
    format!("y{}\nz{}\n", join(y), join(z))
}

// Assembly problems -----------------------------------------------------------

/// ```text
/// domain D
/// vars x
/// box 0..1
/// phi x0 - x0*x0
/// end
/// variables D.x
/// objective 0:1
/// row 1 0:1
/// ```
/// `variables` fixes the global order; rows read `A_k x <= b_k` as
/// `row b_k j:a_kj ...`.
pub fn parse_asm(text: &str) -> R<AssemblyProblem> {
    let mut domains: Vec<LocalDomain> = Vec::new();
    let mut open: Option<(usize, LocalDomain, bool)> = None;
    let mut mapping = None;
    let mut objective: Option<(usize, Vec<(usize, Interval)>)> = None;
    let mut rows: Vec<(usize, Interval, Vec<(usize, Interval)>)> = Vec::new();
    let sparse = |ln: usize, toks: &[&str]| {
        toks.iter()
            .map(|t| {
                let (j, a) = t.split_once(':').map_or_else(|| err(ln, format!("expected `index:coefficient`, found `{t}`")), Ok)?;
                let j = j.parse::<usize>().or_else(|_| err(ln, format!("bad variable index `{j}`")))?;
                Ok((j, literal(ln, a)?))
            })
            .collect::<R<Vec<_>>>()
    };
    for (ln, l) in lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let rest = l[toks[0].len()..].trim();
        if let Some((start, dom, has_box)) = open.as_mut() {
            match toks[0] {
                "vars" => dom.vars = toks[1..].iter().map(|s| s.to_string()).collect(),
                "box" => {
                    let dims = toks[1..].iter().map(|t| literal(ln, t)).collect::<R<Vec<_>>>()?;
                    dom.bounds = IntervalBox::new(dims).or_else(|e| err(ln, e.to_string()))?;
                    *has_box = true;
                }
                "phi" => dom.constraints.push(expr(ln, rest, dom.vars.len())?),
                "end" => {
                    if !*has_box || dom.bounds.len() != dom.vars.len() {
                        return err(ln, format!("domain `{}` (line {start}) needs a box with one interval per variable", dom.id));
                    }
                    domains.push(open.take().expect("open domain").1);
                }
                k => return err(ln, format!("unexpected `{k}` inside a domain block")),
            }
            continue;
        }
        match toks[0] {
            "domain" => {
                let Some(id) = toks.get(1) else { return err(ln, "domain needs a name") };
                if domains.iter().any(|d| d.id == *id) {
                    return err(ln, format!("duplicate domain `{id}`"));
                }
                let dom = LocalDomain {
                    id: id.to_string(),
                    vars: Vec::new(),
                    bounds: IntervalBox::from_pairs(&[]),
                    constraints: Vec::new(),
                };
                open = Some((ln, dom, false));
            }
            "variables" => {
                let m = toks[1..]
                    .iter()
                    .map(|t| {
                        let (d, v) = t.split_once('.').map_or_else(|| err(ln, format!("expected `domain.var`, found `{t}`")), Ok)?;
                        let di = domains.iter().position(|x| x.id == d).map_or_else(|| err(ln, format!("unknown domain `{d}`")), Ok)?;
                        let si = domains[di].vars.iter().position(|x| x == v).map_or_else(|| err(ln, format!("unknown variable `{t}`")), Ok)?;
                        Ok((di, si))
                    })
                    .collect::<R<Vec<_>>>()?;
                mapping = Some((ln, m));
            }
            "objective" => objective = Some((ln, sparse(ln, &toks[1..])?)),
            "row" => {
                let Some(b) = toks.get(1) else { return err(ln, "row needs a right-hand side") };
                rows.push((ln, literal(ln, b)?, sparse(ln, &toks[2..])?));
            }
            k => return err(ln, format!("unknown key `{k}`")),
        }
    }
    if let Some((start, dom, _)) = open {
        return err(start, format!("domain `{}` is not closed with `end`", dom.id));
    }
    let Some((mln, mapping)) = mapping else { return err(0, "missing `variables`") };
    let n = mapping.len();
    let dense = |ln: usize, entries: &[(usize, Interval)]| {
        let mut v = vec![Interval::ZERO; n];
        for &(j, a) in entries {
            if j >= n {
                return err(ln, format!("variable index {j} out of range (have {n})"));
            }
            v[j] = a;
        }
        Ok(v)
    };
    let c = match &objective {
        Some((ln, e)) => dense(*ln, e)?,
        None => return err(0, "missing `objective`"),
    };
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (ln, bk, e) in &rows {
        a.push(dense(*ln, e)?);
        b.push(*bk);
    }
    let p = AssemblyProblem { domains, mapping, a, b, c };
    p.validate().or_else(|e| err(mln, e.to_string()))?;
    Ok(p)
}

pub fn write_asm(p: &AssemblyProblem) -> String {
    let mut s = String::new();
    for d in &p.domains {
        let _ = writeln!(s, "domain {}", d.id);
        let _ = writeln!(s, "vars {}", d.vars.join(" "));
        let dims: Vec<String> = d.bounds.dims().iter().map(write_literal).collect();
        let _ = writeln!(s, "box {}", dims.join(" "));
        for phi in &d.constraints {
            let _ = writeln!(s, "phi {phi}");
        }
        let _ = writeln!(s, "end");
    }
    let names: Vec<String> = p.mapping.iter().map(|&(d, k)| format!("{}.{}", p.domains[d].id, p.domains[d].vars[k])).collect();
    let _ = writeln!(s, "variables {}", names.join(" "));
    let sparse = |v: &[Interval]| {
        v.iter()
            .enumerate()
            .filter(|(_, x)| **x != Interval::ZERO)
            .map(|(j, x)| format!(" {j}:{}", write_literal(x)))
            .collect::<String>()
    };
    let _ = writeln!(s, "objective{}", sparse(&p.c));
    for (row, b) in p.a.iter().zip(&p.b) {
        let _ = writeln!(s, "row {}{}", write_literal(b), sparse(row));
    }
    s
}

// Duality certificates --------------------------------------------------------

pub const CERTIFICATE_SCHEMA: &str = "rigor-duality-certificate/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub schema: String,
    /// SHA-256 of the problem file the certificate was fitted to.
    pub problem_digest: String,
    pub m: f64,
    pub x_star: Vec<f64>,
    pub r: Vec<Vec<f64>>,
    pub w: Vec<f64>,
    pub retained: Vec<usize>,
    pub t0: f64,
    pub seed: u64,
    pub binding_tolerance: f64,
}

impl CertificateFile {
    pub fn new(c: &DualityCertificate, problem_digest: String) -> Self {
        Self {
            schema: CERTIFICATE_SCHEMA.into(),
            problem_digest,
            m: c.m,
            x_star: c.x_star.clone(),
            r: c.r.clone(),
            w: c.w.clone(),
            retained: c.retained.clone(),
            t0: c.t0,
            seed: c.seed,
            binding_tolerance: c.binding_tolerance,
        }
    }

    pub fn certificate(&self) -> DualityCertificate {
        DualityCertificate {
            m: self.m,
            x_star: self.x_star.clone(),
            r: self.r.clone(),
            w: self.w.clone(),
            retained: self.retained.clone(),
            t0: self.t0,
            seed: self.seed,
            binding_tolerance: self.binding_tolerance,
        }
    }
}

pub fn parse_certificate(text: &str) -> R<CertificateFile> {
    let c: CertificateFile = serde_json::from_str(text).map_err(|e| FormatError {
        line: e.line(),
        message: e.to_string(),
    })?;
    if c.schema != CERTIFICATE_SCHEMA {
        return err(0, format!("unsupported certificate schema `{}`", c.schema));
    }
    Ok(c)
}

pub fn write_certificate(c: &CertificateFile) -> String {
    let mut s = serde_json::to_string_pretty(c).expect("serializable");
    s.push('\n');
    s
}

// Distance specifications -----------------------------------------------------

/// ```text
/// points o p1 p2 p3 q
/// dmin
/// o  0 1 1 1 2
/// ...
/// dmax
/// o  0 inf inf inf inf
/// ...
/// model
/// o p1 strut
/// ```
/// Tables are labeled by row; `dmax` defaults to no caps and `model` is
/// optional.
pub fn parse_dspec(text: &str) -> R<(DistanceSpec, Option<Model>)> {
    let mut spec: Option<DistanceSpec> = None;
    let mut section = "";
    let mut model: Option<Model> = None;
    let mut filled: BTreeMap<(&str, usize), usize> = BTreeMap::new();
    for (ln, l) in lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks[0] {
            "points" => {
                if spec.is_some() {
                    return err(ln, "`points` given twice");
                }
                let labels: Vec<String> = toks[1..].iter().map(|s| s.to_string()).collect();
                spec = Some(DistanceSpec::free(labels));
            }
            s @ ("dmin" | "dmax" | "model") if toks.len() == 1 => {
                section = s;
                if s == "model" {
                    model.get_or_insert_with(Model::default);
                }
            }
            _ => {
                let Some(sp) = spec.as_mut() else { return err(ln, "`points` must come first") };
                let pos = |t: &str| sp.labels.iter().position(|x| x == t).map_or_else(|| err(ln, format!("unknown point `{t}`")), Ok);
                match section {
                    "dmin" | "dmax" => {
                        let i = pos(toks[0])?;
                        let n = sp.labels.len();
                        if toks.len() != n + 1 {
                            return err(ln, format!("row `{}` needs {n} entries", toks[0]));
                        }
                        if let Some(prev) = filled.insert((section, i), ln) {
                            return err(ln, format!("row `{}` repeated (first on line {prev})", toks[0]));
                        }
                        for (j, t) in toks[1..].iter().enumerate() {
                            let v = if section == "dmin" { literal(ln, t)? } else { bound(ln, t)? };
                            if section == "dmin" {
                                sp.dmin[i][j] = v;
                            } else {
                                sp.dmax[i][j] = v;
                            }
                        }
                    }
                    "model" => {
                        if toks.len() != 3 {
                            return err(ln, "model lines read `a b cable|strut`");
                        }
                        let (i, j) = (pos(toks[0])?, pos(toks[1])?);
                        let mark = match toks[2] {
                            "cable" => Mark::Cable,
                            "strut" => Mark::Strut,
                            m => return err(ln, format!("unknown mark `{m}`")),
                        };
                        let key = if i < j { (i, j) } else { (j, i) };
                        model.get_or_insert_with(Model::default).marks.insert(key, mark);
                    }
                    _ => return err(ln, format!("unexpected `{}` outside a section", toks[0])),
                }
            }
        }
    }
    let Some(spec) = spec else { return err(0, "missing `points`") };
    spec.validate().or_else(|e| err(0, e.to_string()))?;
    Ok((spec, model))
}

pub fn write_dspec(spec: &DistanceSpec, model: Option<&Model>) -> String {
    let mut s = format!("points {}\n", spec.labels.join(" "));
    for (name, table) in [("dmin", &spec.dmin), ("dmax", &spec.dmax)] {
        let _ = writeln!(s, "{name}");
        for (i, row) in table.iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .map(|v| if v.hi() == f64::INFINITY { "inf".to_string() } else { write_literal(v) })
                .collect();
            let _ = writeln!(s, "{} {}", spec.labels[i], cells.join(" "));
        }
    }
    if let Some(m) = model {
        let _ = writeln!(s, "model");
        for (&(i, j), mark) in &m.marks {
            let name = match mark {
                Mark::Cable => "cable",
                Mark::Strut => "strut",
                Mark::Unmarked => continue,
            };
            let _ = writeln!(s, "{} {} {name}", spec.labels[i], spec.labels[j]);
        }
    }
    s
}

// Graph classes ---------------------------------------------------------------

/// One terminal class per file.
///
/// ```text
/// vertices 4
/// seed 3
/// faces 0 1 2 | 0 2 3 | 0 3 1 | 1 3 2
/// rotation 1 3 2 | 0 2 3 | 0 3 1 | 0 1 2
/// canonical n4:...
/// path 0:1 / ...
/// ```
pub fn write_graph(g: &rigor::graphgen::DecoratedGraph) -> String {
    let cycles = |v: &[Vec<usize>]| {
        v.iter()
            .map(|f| f.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join(" | ")
    };
    let path: Vec<String> = g.path().iter().map(|s| s.to_string()).collect();
    format!(
        "vertices {}\nseed {}\nfaces {}\nrotation {}\ncanonical {}\npath {}\n",
        g.vertex_count(),
        g.seed_size(),
        cycles(g.faces()),
        cycles(&g.rotation_system()),
        g.canonical_form(),
        path.join(" / ")
    )
}

/// Reads a class file back by replaying its derivation path, and checks the
/// stated vertex count and canonical form against the replayed graph.
pub fn parse_graph(text: &str) -> R<rigor::graphgen::DecoratedGraph> {
    let mut fields: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (ln, l) in lines(text) {
        let (k, v) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        fields.insert(k, (ln, v.trim()));
    }
    let get = |k: &str| fields.get(k).copied().map_or_else(|| err(0, format!("missing `{k}`")), Ok);
    let (sl, seed) = get("seed")?;
    let seed = count(sl, Some(seed), "seed")?;
    let (pl, path) = get("path")?;
    let steps = if path.is_empty() {
        Vec::new()
    } else {
        path.split('/')
            .map(|s| s.trim().parse().or_else(|e: rigor::graphgen::GraphError| err(pl, e.to_string())))
            .collect::<R<Vec<_>>>()?
    };
    let g = rigor::graphgen::DecoratedGraph::replay(seed, &steps).or_else(|e| err(pl, e.to_string()))?;
    let (vl, n) = get("vertices")?;
    if count(vl, Some(n), "vertices")? != g.vertex_count() {
        return err(vl, "vertex count disagrees with the derivation path");
    }
    let (cl, code) = get("canonical")?;
    if code != g.canonical_form() {
        return err(cl, "canonical form disagrees with the derivation path");
    }
    Ok(g)
}
