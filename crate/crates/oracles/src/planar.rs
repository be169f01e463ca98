//! Brute-force plane graphs: enumeration from rotation systems and
//! isomorphism of face lists.

use std::collections::{BTreeSet, HashMap, VecDeque};

/// A sphere embedding given by its oriented face cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceGraph {
    pub n: usize,
    pub faces: Vec<Vec<usize>>,
}

fn rotate_min(face: &[usize]) -> Vec<usize> {
    let k = face.len();
    (0..k)
        .map(|s| (0..k).map(|i| face[(s + i) % k]).collect::<Vec<_>>())
        .min()
        .unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

impl FaceGraph {
    pub fn edge_count(&self) -> usize {
        self.faces.iter().map(|f| f.len()).sum::<usize>() / 2
    }

    pub fn euler_ok(&self) -> bool {
        self.n as i64 - self.edge_count() as i64 + self.faces.len() as i64 == 2
    }

    /// Orientation-reversed copy.
    pub fn mirror(&self) -> FaceGraph {
        FaceGraph {
            n: self.n,
            faces: self
                .faces
                .iter()
                .map(|f| f.iter().rev().copied().collect())
                .collect(),
        }
    }

    /// Isomorphism-invariant key by trying every vertex relabelling and both
    /// orientations. Only usable for small `n`.
    pub fn brute_canonical(&self) -> Vec<Vec<usize>> {
        assert!(self.n <= 8, "brute-force canonical form limited to 8 vertices");
        let mut best: Option<Vec<Vec<usize>>> = None;
        for perm in permutations(self.n) {
            for g in [self.clone(), self.mirror()] {
                let mut key: Vec<Vec<usize>> = g
                    .faces
                    .iter()
                    .map(|f| rotate_min(&f.iter().map(|&v| perm[v]).collect::<Vec<_>>()))
                    .collect();
                key.sort();
                if best.as_ref().is_none_or(|b| key < *b) {
                    best = Some(key);
                }
            }
        }
        best.unwrap_or_default()
    }

    /// Darts `(u, v)` mapped to the next dart along the same face.
    fn face_successor(&self) -> HashMap<(usize, usize), (usize, usize)> {
        let mut next = HashMap::new();
        for f in &self.faces {
            let k = f.len();
            for i in 0..k {
                let d = (f[i], f[(i + 1) % k]);
                let e = (f[(i + 1) % k], f[(i + 2) % k]);
                next.insert(d, e);
            }
        }
        next
    }

    /// Isomorphism test (reflections allowed) by propagating a dart map.
    pub fn isomorphic(&self, other: &FaceGraph) -> bool {
        if self.n != other.n || self.faces.len() != other.faces.len() {
            return false;
        }
        let mut a_sizes: Vec<usize> = self.faces.iter().map(Vec::len).collect();
        let mut b_sizes: Vec<usize> = other.faces.iter().map(Vec::len).collect();
        a_sizes.sort_unstable();
        b_sizes.sort_unstable();
        if a_sizes != b_sizes {
            return false;
        }
        let na = self.face_successor();
        let Some(&d0) = na.keys().min() else {
            return self.n == other.n;
        };
        for b in [other.clone(), other.mirror()] {
            let nb = b.face_successor();
            for &target in nb.keys() {
                if extend_dart_map(&na, &nb, d0, target) {
                    return true;
                }
            }
        }
        false
    }
}

fn extend_dart_map(
    na: &HashMap<(usize, usize), (usize, usize)>,
    nb: &HashMap<(usize, usize), (usize, usize)>,
    d0: (usize, usize),
    t0: (usize, usize),
) -> bool {
    let mut map: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut vmap: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::from([(d0, t0)]);
    while let Some((d, t)) = queue.pop_front() {
        if let Some(&prev) = map.get(&d) {
            if prev != t {
                return false;
            }
            continue;
        }
        if !nb.contains_key(&t) || used.contains(&t) {
            return false;
        }
        for (x, y) in [(d.0, t.0), (d.1, t.1)] {
            if *vmap.entry(x).or_insert(y) != y {
                return false;
            }
        }
        map.insert(d, t);
        used.insert(t);
        queue.push_back((na[&d], nb[&t]));
        queue.push_back(((d.1, d.0), (t.1, t.0)));
    }
    map.len() == na.len()
}

/// All plane graphs with exactly `n` vertices whose faces are simple cycles,
/// one representative per isomorphism class, as brute-force canonical keys.
pub fn enumerate_sphere_graphs(n: usize) -> BTreeSet<Vec<Vec<usize>>> {
    assert!((3..=6).contains(&n));
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut classes = BTreeSet::new();
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        if adj.iter().any(|a| a.len() < 2) || !connected(&adj) {
            continue;
        }
        for rot in rotation_systems(&adj) {
            if let Some(g) = trace_faces(n, &rot) {
                if g.euler_ok() {
                    classes.insert(g.brute_canonical());
                }
            }
        }
    }
    classes
}

fn connected(adj: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Every choice of cyclic neighbour order at every vertex.
fn rotation_systems(adj: &[Vec<usize>]) -> Vec<Vec<Vec<usize>>> {
    let per_vertex: Vec<Vec<Vec<usize>>> = adj
        .iter()
        .map(|nbrs| {
            let (first, rest) = nbrs.split_first().unwrap();
            permutations(rest.len())
                .into_iter()
                .map(|p| {
                    std::iter::once(*first)
                        .chain(p.iter().map(|&i| rest[i]))
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for choices in per_vertex {
        let mut next = Vec::new();
        for partial in &out {
            for c in &choices {
                let mut p: Vec<Vec<usize>> = partial.clone();
                p.push(c.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Faces of a rotation system; `None` if some face repeats a vertex.
fn trace_faces(n: usize, rot: &[Vec<usize>]) -> Option<FaceGraph> {
    let mut seen = BTreeSet::new();
    let mut faces = Vec::new();
    for u in 0..n {
        for &v in &rot[u] {
            if seen.contains(&(u, v)) {
                continue;
            }
            let mut face = Vec::new();
            let (mut a, mut b) = (u, v);
            while seen.insert((a, b)) {
                face.push(a);
                let r = &rot[b];
                let pos = r.iter().position(|&x| x == a).unwrap();
                let c = r[(pos + 1) % r.len()];
                a = b;
                b = c;
            }
            let distinct: BTreeSet<_> = face.iter().collect();
            if distinct.len() != face.len() {
                return None;
            }
            faces.push(face);
        }
    }
    Some(FaceGraph { n, faces })
}

/// The cuboctahedron: 12 vertices, 8 triangles, 6 squares.
pub fn cuboctahedron() -> FaceGraph {
    // Vertices are the edge midpoints of a cube; built from coordinates.
    let pts: Vec<[i32; 3]> = vec![
        [1, 1, 0],
        [1, -1, 0],
        [-1, 1, 0],
        [-1, -1, 0],
        [1, 0, 1],
        [1, 0, -1],
        [-1, 0, 1],
        [-1, 0, -1],
        [0, 1, 1],
        [0, 1, -1],
        [0, -1, 1],
        [0, -1, -1],
    ];
    let mut faces = Vec::new();
    // Square faces: one per coordinate direction ±.
    for axis in 0..3 {
        for s in [1, -1] {
            let mut vs: Vec<usize> = (0..12).filter(|&i| pts[i][axis] == s).collect();
            order_ccw(&pts, &mut vs, axis, s);
            faces.push(vs);
        }
    }
    // Triangle faces: one per octant.
    for sx in [1, -1] {
        for sy in [1, -1] {
            for sz in [1, -1] {
                let sg = [sx, sy, sz];
                let mut vs: Vec<usize> = (0..12)
                    .filter(|&i| (0..3).all(|k| pts[i][k] == 0 || pts[i][k] == sg[k]))
                    .collect();
                assert_eq!(vs.len(), 3);
                let normal = [sx as f64, sy as f64, sz as f64];
                orient(&pts, &mut vs, normal);
                faces.push(vs);
            }
        }
    }
    FaceGraph { n: 12, faces }
}

fn order_ccw(pts: &[[i32; 3]], vs: &mut Vec<usize>, axis: usize, s: i32) {
    let mut normal = [0.0; 3];
    normal[axis] = s as f64;
    orient(pts, vs, normal);
}

/// Sorts vertices counter-clockwise as seen from outside along `normal`.
fn orient(pts: &[[i32; 3]], vs: &mut [usize], normal: [f64; 3]) {
    let c: [f64; 3] = std::array::from_fn(|k| {
        vs.iter().map(|&i| pts[i][k] as f64).sum::<f64>() / vs.len() as f64
    });
    // Basis (e1, e2) in the face plane with e1 × e2 = normal.
    let p0: [f64; 3] = std::array::from_fn(|k| pts[vs[0]][k] as f64 - c[k]);
    let e1 = p0;
    let e2 = cross(normal, e1);
    vs.sort_by(|&a, &b| {
        let ang = |i: usize| {
            let d: [f64; 3] = std::array::from_fn(|k| pts[i][k] as f64 - c[k]);
            dotf(d, e2).atan2(dotf(d, e1))
        };
        ang(a).partial_cmp(&ang(b)).unwrap()
    });
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dotf(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
