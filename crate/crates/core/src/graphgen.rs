//! Decorated sphere graphs and their enumeration by admissible refinement.
//!
//! A graph is stored as its oriented face cycles: every directed edge
//! `u -> v` lies on exactly one face, which is to its left. New vertices
//! are labelled `n, n+1, ...` in order of appearance.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaceAttr {
    Modifiable,
    Unmodifiable,
}

impl FaceAttr {
    fn code(self) -> u32 {
        match self {
            FaceAttr::Modifiable => 0,
            FaceAttr::Unmodifiable => 1,
        }
    }
}

/// One refinement: inside face `face`, the polygon `q` starting with the
/// directed edge `q[0] -> q[1]` of that face.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub face: usize,
    pub q: Vec<usize>,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q: Vec<String> = self.q.iter().map(usize::to_string).collect();
        write!(f, "{}:{}", self.face, q.join(","))
    }
}

impl FromStr for Step {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GraphError::Parse(format!("bad step `{s}`"));
        let (face, q) = s.trim().split_once(':').ok_or_else(bad)?;
        Ok(Step {
            face: face.trim().parse().map_err(|_| bad())?,
            q: q.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("not an admissible refinement: {0}")]
    Inadmissible(String),
    #[error("graph has no modifiable face")]
    NoModifiableFace,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("max vertex count must be at least 3, got {0}")]
    InvalidConfig(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoratedGraph {
    n: usize,
    faces: Vec<Vec<usize>>,
    attrs: Vec<FaceAttr>,
    seed_size: usize,
    path: Vec<Step>,
}

/// The seed polygon `0..k` with its inside modifiable.
pub fn seed(k: usize) -> DecoratedGraph {
    assert!(k >= 3, "polygon needs at least 3 vertices");
    DecoratedGraph {
        n: k,
        faces: vec![(0..k).collect(), (0..k).rev().collect()],
        attrs: vec![FaceAttr::Modifiable, FaceAttr::Unmodifiable],
        seed_size: k,
        path: Vec::new(),
    }
}

/// One seed per polygon size `3..=max_vertices`.
pub fn seed_graphs(max_vertices: usize) -> Vec<DecoratedGraph> {
    (3..=max_vertices).map(seed).collect()
}

impl DecoratedGraph {
    /// Graph from oriented faces; rejects anything not well formed. The
    /// seed size is taken as the largest face.
    pub fn from_faces(n: usize, faces: Vec<Vec<usize>>, attrs: Vec<FaceAttr>) -> Result<Self, GraphError> {
        let g = DecoratedGraph {
            n,
            seed_size: faces.iter().map(Vec::len).max().unwrap_or(0),
            faces,
            attrs,
            path: Vec::new(),
        };
        if g.is_well_formed() {
            Ok(g)
        } else {
            Err(GraphError::Parse("faces do not form a simple sphere graph".into()))
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn attrs(&self) -> &[FaceAttr] {
        &self.attrs
    }

    pub fn seed_size(&self) -> usize {
        self.seed_size
    }

    pub fn path(&self) -> &[Step] {
        &self.path
    }

    pub fn edge_count(&self) -> usize {
        self.faces.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn euler_ok(&self) -> bool {
        self.n as i64 - self.edge_count() as i64 + self.faces.len() as i64 == 2
    }

    pub fn is_terminal(&self) -> bool {
        self.attrs.iter().all(|&a| a == FaceAttr::Unmodifiable)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for f in &self.faces {
            for &v in f {
                d[v] += 1;
            }
        }
        d
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.faces.iter().any(|f| {
            let k = f.len();
            (0..k).any(|i| f[i] == a && f[(i + 1) % k] == b)
        })
    }

    /// Checks the structural invariants: simple faces, each directed edge
    /// on exactly one face with its reverse on another, no multiple edges,
    /// Euler relation.
    pub fn is_well_formed(&self) -> bool {
        let mut darts = HashSet::new();
        for f in &self.faces {
            let k = f.len();
            let distinct: BTreeSet<_> = f.iter().collect();
            if k < 3 || distinct.len() != k || f.iter().any(|&v| v >= self.n) {
                return false;
            }
            for i in 0..k {
                if !darts.insert((f[i], f[(i + 1) % k])) {
                    return false;
                }
            }
        }
        darts.iter().all(|&(a, b)| darts.contains(&(b, a)))
            && self.faces.len() == self.attrs.len()
            && self.euler_ok()
    }

    /// Cyclic neighbour order at each vertex: `u` is followed by the next
    /// vertex of the face in which `u -> v` precedes `v -> w`.
    pub fn rotation_system(&self) -> Vec<Vec<usize>> {
        let succ = self.corner_map(false);
        (0..self.n)
            .map(|v| {
                let Some(&start) = succ[v].keys().next() else {
                    return Vec::new();
                };
                let mut out = vec![start];
                let mut cur = succ[v][&start];
                while cur != start {
                    out.push(cur);
                    cur = succ[v][&cur];
                }
                out
            })
            .collect()
    }

    /// Per vertex `v`: predecessor `a` ↦ successor `b` over corners
    /// `a -> v -> b`; with `mirror` the inverse map.
    fn corner_map(&self, mirror: bool) -> Vec<BTreeMap<usize, usize>> {
        let mut m = vec![BTreeMap::new(); self.n];
        for f in &self.faces {
            let k = f.len();
            for i in 0..k {
                let (a, v, b) = (f[i], f[(i + 1) % k], f[(i + 2) % k]);
                if mirror {
                    m[v].insert(b, a);
                } else {
                    m[v].insert(a, b);
                }
            }
        }
        m
    }

    /// Encoding rooted at dart `u0 -> v0`.
    fn rooted_code(&self, rot: &[BTreeMap<usize, usize>], mirror: bool, u0: usize, v0: usize) -> Vec<u32> {
        const SEP: u32 = u32::MAX;
        let mut label = vec![u32::MAX; self.n];
        let mut reference = vec![usize::MAX; self.n];
        let mut order = Vec::with_capacity(self.n);
        label[u0] = 0;
        reference[u0] = v0;
        order.push(u0);
        let mut code = Vec::new();
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            head += 1;
            let r = reference[x];
            let mut y = r;
            loop {
                if label[y] == u32::MAX {
                    label[y] = order.len() as u32;
                    reference[y] = x;
                    order.push(y);
                }
                code.push(label[y]);
                y = rot[x][&y];
                if y == r {
                    break;
                }
            }
            code.push(SEP);
        }
        let mut fs: Vec<Vec<u32>> = self
            .faces
            .iter()
            .zip(&self.attrs)
            .map(|(f, a)| {
                let mut c: Vec<u32> = f.iter().map(|&v| label[v]).collect();
                if mirror {
                    c.reverse();
                }
                let p = (0..c.len()).min_by_key(|&i| c[i]).unwrap_or(0);
                c.rotate_left(p);
                c.insert(0, f.len() as u32);
                c.push(a.code());
                c
            })
            .collect();
        fs.sort();
        code.push(SEP);
        for f in fs {
            code.extend(f);
        }
        code
    }

    /// Minimal rooted code over the darts accepted by `root_ok`, with the
    /// root dart in the original orientation.
    fn min_code<F: Fn(usize, usize) -> bool>(&self, root_ok: F) -> Option<(Vec<u32>, (usize, usize))> {
        let fwd = self.corner_map(false);
        let rev = self.corner_map(true);
        let mut best: Option<(Vec<u32>, (usize, usize))> = None;
        for f in &self.faces {
            let k = f.len();
            for i in 0..k {
                let (u, v) = (f[i], f[(i + 1) % k]);
                if !root_ok(u, v) {
                    continue;
                }
                // In the mirror image the same face lies left of `v -> u`.
                for c in [self.rooted_code(&fwd, false, u, v), self.rooted_code(&rev, true, v, u)] {
                    if best.as_ref().is_none_or(|(b, _)| c < *b) {
                        best = Some((c, (u, v)));
                    }
                }
            }
        }
        best
    }

    /// Label invariant under isomorphism, reflections included, and under
    /// attribute-preserving relabelling.
    pub fn canonical_form(&self) -> String {
        let (code, _) = self.min_code(|_, _| true).unwrap_or_default();
        let body: Vec<String> = code
            .iter()
            .map(|&c| if c == u32::MAX { "|".to_string() } else { c.to_string() })
            .collect();
        format!("n{}:{}", self.n, body.join(" "))
    }

    /// The fixed modifiable face and edge position used for refinement.
    pub fn refinement_site(&self) -> Option<(usize, usize)> {
        let mut owner = BTreeMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            let k = f.len();
            for i in 0..k {
                owner.insert((f[i], f[(i + 1) % k]), (fi, i));
            }
        }
        let modifiable = |u: usize, v: usize| self.attrs[owner[&(u, v)].0] == FaceAttr::Modifiable;
        self.min_code(modifiable).map(|(_, d)| owner[&d])
    }

    /// Applies one step. `q` must start with an edge of the face; its other
    /// vertices are vertices of the face in boundary order or fresh labels.
    pub fn refine(&self, step: &Step) -> Result<DecoratedGraph, GraphError> {
        let bad = |m: String| Err(GraphError::Inadmissible(m));
        let Some(p) = self.faces.get(step.face) else {
            return bad(format!("no face {}", step.face));
        };
        if self.attrs[step.face] != FaceAttr::Modifiable {
            return bad(format!("face {} is unmodifiable", step.face));
        }
        let q = &step.q;
        let m = p.len();
        if q.len() < 3 {
            return bad("polygon needs at least 3 vertices".into());
        }
        let Some(i) = (0..m).find(|&i| p[i] == q[0] && p[(i + 1) % m] == q[1]) else {
            return bad("polygon does not start with an edge of the face".into());
        };
        // Boundary walk from p[i+1] forward to p[i].
        let walk: Vec<usize> = (1..=m).map(|s| p[(i + s) % m]).collect();
        let pos = |v: usize| walk.iter().position(|&w| w == v);
        let mut chosen = vec![0usize];
        let mut news: Vec<Vec<usize>> = vec![Vec::new()];
        let mut next_label = self.n;
        for &v in &q[2..] {
            if v >= self.n {
                if v != next_label {
                    return bad(format!("new vertex {v} should be labelled {next_label}"));
                }
                next_label += 1;
                news.last_mut().expect("nonempty").push(v);
            } else {
                match pos(v) {
                    Some(s) if s > *chosen.last().expect("nonempty") && s < m - 1 => {
                        chosen.push(s);
                        news.push(Vec::new());
                    }
                    _ => return bad(format!("vertex {v} is out of boundary order")),
                }
            }
        }
        chosen.push(m - 1);
        let k = chosen.len() - 1;
        let mut regions = Vec::new();
        for g in 0..k {
            let (a, b) = (chosen[g], chosen[g + 1]);
            let path = &news[g];
            if path.is_empty() {
                if b == a + 1 {
                    continue;
                }
                if self.has_edge(walk[a], walk[b]) {
                    return bad(format!("chord {}-{} duplicates an edge", walk[a], walk[b]));
                }
            }
            let mut r: Vec<usize> = walk[a..=b].to_vec();
            r.extend(path.iter().rev());
            regions.push(r);
        }
        let mut g = self.clone();
        g.path.push(step.clone());
        if regions.is_empty() {
            g.attrs[step.face] = FaceAttr::Unmodifiable;
            return Ok(g);
        }
        g.n = next_label;
        g.faces[step.face] = q.clone();
        g.attrs[step.face] = FaceAttr::Unmodifiable;
        for r in regions {
            g.faces.push(r);
            g.attrs.push(FaceAttr::Modifiable);
        }
        Ok(g)
    }

    /// Every admissible refinement through the fixed site, within the
    /// vertex budget. Q larger than the seed polygon is skipped.
    pub fn admissible_refinements(&self, max_vertices: usize, prune: &Prune) -> Result<Vec<DecoratedGraph>, GraphError> {
        let (fi, i) = self.refinement_site().ok_or(GraphError::NoModifiableFace)?;
        let p = &self.faces[fi];
        let m = p.len();
        let walk: Vec<usize> = (1..=m).map(|s| p[(i + s) % m]).collect();
        let budget = max_vertices.saturating_sub(self.n);
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << (m - 2)) {
            let mut chosen = vec![0];
            chosen.extend((1..m - 1).filter(|s| mask >> (s - 1) & 1 == 1));
            chosen.push(m - 1);
            let gaps = chosen.len() - 1;
            let mut counts = vec![0usize; gaps];
            loop {
                let total: usize = counts.iter().sum();
                let q_len = chosen.len() + total;
                if q_len <= self.seed_size {
                    let mut q = vec![p[i], walk[0]];
                    let mut label = self.n;
                    for g in 0..gaps {
                        for _ in 0..counts[g] {
                            q.push(label);
                            label += 1;
                        }
                        if g + 1 < gaps {
                            q.push(walk[chosen[g + 1]]);
                        }
                    }
                    if q.len() >= 3 {
                        if let Ok(child) = self.refine(&Step { face: fi, q }) {
                            if prune.admits(&child) {
                                out.push(child);
                            }
                        }
                    }
                }
                // Next composition with total <= budget.
                let mut g = 0;
                loop {
                    if g == gaps {
                        break;
                    }
                    counts[g] += 1;
                    if counts.iter().sum::<usize>() <= budget {
                        break;
                    }
                    counts[g] = 0;
                    g += 1;
                }
                if g == gaps {
                    break;
                }
            }
        }
        Ok(out)
    }

    /// Rebuilds the graph from its seed size and derivation path.
    pub fn replay(seed_size: usize, path: &[Step]) -> Result<DecoratedGraph, GraphError> {
        path.iter().try_fold(seed(seed_size), |g, s| g.refine(s))
    }
}

/// Pruning predicate. Face-size caps apply to unmodifiable faces,
/// minimum degree only to terminal graphs; the other caps are monotone
/// along refinement and apply everywhere.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Prune {
    pub max_face: Option<usize>,
    pub max_degree: Option<usize>,
    pub max_faces: Option<usize>,
    pub min_degree: Option<usize>,
}

impl Prune {
    pub fn admits(&self, g: &DecoratedGraph) -> bool {
        if let Some(k) = self.max_face {
            let too_big = g
                .faces
                .iter()
                .zip(&g.attrs)
                .any(|(f, &a)| a == FaceAttr::Unmodifiable && f.len() > k);
            if too_big {
                return false;
            }
        }
        if let Some(k) = self.max_faces {
            if g.faces.len() > k {
                return false;
            }
        }
        let deg = g.degrees();
        if let Some(k) = self.max_degree {
            if deg.iter().any(|&d| d > k) {
                return false;
            }
        }
        if let Some(k) = self.min_degree {
            if g.is_terminal() && deg.iter().any(|&d| d < k) {
                return false;
            }
        }
        true
    }
}

impl FromStr for Prune {
    type Err = GraphError;

    /// Comma-separated terms: `all-triangles`, `max-face=K`,
    /// `max-degree=K`, `max-faces=K`, `min-degree=K`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Prune::default();
        for term in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if term == "all-triangles" {
                p.max_face = Some(3);
                p.min_degree = Some(3);
                continue;
            }
            let (key, val) = term
                .split_once('=')
                .ok_or_else(|| GraphError::Parse(format!("prune term `{term}` needs a value")))?;
            let k: usize = val
                .trim()
                .parse()
                .map_err(|_| GraphError::Parse(format!("bad number in `{term}`")))?;
            match key.trim() {
                "max-face" => p.max_face = Some(k),
                "max-degree" => p.max_degree = Some(k),
                "max-faces" => p.max_faces = Some(k),
                "min-degree" => p.min_degree = Some(k),
                other => return Err(GraphError::Parse(format!("unknown prune term `{other}`"))),
            }
        }
        Ok(p)
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub max_vertices: usize,
    pub prune: Prune,
    /// Upper limit on graphs enqueued over the whole run.
    pub max_graphs: usize,
}

impl GeneratorConfig {
    pub fn new(max_vertices: usize) -> Self {
        Self {
            max_vertices,
            prune: Prune::default(),
            max_graphs: 5_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    /// Terminal classes sorted by canonical form.
    pub terminals: Vec<(String, DecoratedGraph)>,
    pub complete: bool,
    pub enqueued: usize,
}

/// Breadth-first over refinement levels with per-level deduplication.
pub fn generate(cfg: &GeneratorConfig) -> Result<Generated, GraphError> {
    if cfg.max_vertices < 3 {
        return Err(GraphError::InvalidConfig(cfg.max_vertices));
    }
    let mut frontier: Vec<DecoratedGraph> = seed_graphs(cfg.max_vertices)
        .into_iter()
        .filter(|g| cfg.prune.admits(g))
        .collect();
    let mut terminals: BTreeMap<String, DecoratedGraph> = BTreeMap::new();
    let mut enqueued = frontier.len();
    let mut complete = true;
    while !frontier.is_empty() {
        let children: Vec<Vec<DecoratedGraph>> = frontier
            .par_iter()
            .map(|g| g.admissible_refinements(cfg.max_vertices, &cfg.prune))
            .collect::<Result<_, _>>()?;
        let mut level: BTreeMap<(usize, String), DecoratedGraph> = BTreeMap::new();
        for child in children.into_iter().flatten() {
            debug_assert!(child.euler_ok());
            if child.is_terminal() {
                let max_face = child.faces.iter().map(Vec::len).max().unwrap_or(0);
                if max_face <= child.seed_size {
                    terminals.entry(child.canonical_form()).or_insert(child);
                }
                continue;
            }
            level.entry((child.seed_size, child.canonical_form())).or_insert(child);
        }
        enqueued += level.len();
        if enqueued > cfg.max_graphs {
            complete = false;
            break;
        }
        frontier = level.into_values().collect();
    }
    Ok(Generated {
        terminals: terminals.into_iter().collect(),
        complete,
        enqueued,
    })
}

/// A derivation of the cuboctahedron (8 triangles, 6 squares) from the
/// square seed, one face per step.
pub const CUBOCTAHEDRON_SCRIPT: &str = "\
0:1,2,4
2:4,2,5,6
3:1,4,7,8
4:5,2,3
5:5,3,9,10
6:0,1,8
7:0,8,11,9
9:3,0,9
8:4,6,7
10:7,6,10,11
11:10,6,5
13:7,11,8
12:9,11,10";

pub fn parse_script(text: &str) -> Result<Vec<Step>, GraphError> {
    text.lines().filter(|l| !l.trim().is_empty()).map(str::parse).collect()
}
