//! Canonical forms of small pointed colored graphs.
//!
//! Vertices start in cells ordered by (distance from the center, colors,
//! degree). The ordered partition is refined by sorted neighbor cells until
//! stable; ties are broken by individualizing each vertex of the first
//! non-singleton cell in turn. The canonical form is the least leaf encoding.
//! Automorphisms found at leaves prune siblings in the same orbit and cut off
//! subtrees that mirror an explored one.

use std::collections::VecDeque;

use crate::graph::{Labels, PointedBall};

/// Unreachable vertices get this distance.
pub const FAR: u32 = u32::MAX;

/// A pointed colored graph on local ids `0..n`; vertex 0 is the center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallGraph {
    pub adj: Vec<Vec<u32>>,
    pub labels: Vec<Labels>,
    pub dist: Vec<u32>,
}

impl SmallGraph {
    /// Builds from an edge list; distances are computed from vertex 0.
    pub fn new(n: usize, edges: &[(u32, u32)], labels: Vec<Labels>) -> Self {
        assert!(n > 0 && labels.len() == n);
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let mut dist = vec![FAR; n];
        dist[0] = 0;
        let mut q = VecDeque::from([0u32]);
        while let Some(u) = q.pop_front() {
            for &w in &adj[u as usize] {
                if dist[w as usize] == FAR {
                    dist[w as usize] = dist[u as usize] + 1;
                    q.push_back(w);
                }
            }
        }
        SmallGraph { adj, labels, dist }
    }

    /// Local copy of a ball; local id `i` is `ball.members[i]`.
    pub fn from_ball(ball: &PointedBall) -> Self {
        let index: rustc_hash::FxHashMap<_, u32> =
            ball.members.iter().enumerate().map(|(i, &(v, _))| (v, i as u32)).collect();
        let n = ball.members.len();
        let mut adj = vec![Vec::new(); n];
        for (u, v) in &ball.edges {
            let (a, b) = (index[u], index[v]);
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let dist = ball.members.iter().map(|&(_, d)| d as u32).collect();
        SmallGraph { adj, labels: ball.labels.clone(), dist }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    /// Relabels so that old vertex `order[p]` becomes `p`.
    pub fn permuted(&self, order: &[u32]) -> SmallGraph {
        let mut pos = vec![0u32; order.len()];
        for (p, &v) in order.iter().enumerate() {
            pos[v as usize] = p as u32;
        }
        let adj = order
            .iter()
            .map(|&v| {
                let mut a: Vec<u32> = self.adj[v as usize].iter().map(|&w| pos[w as usize]).collect();
                a.sort_unstable();
                a
            })
            .collect();
        SmallGraph {
            adj,
            labels: order.iter().map(|&v| self.labels[v as usize].clone()).collect(),
            dist: order.iter().map(|&v| self.dist[v as usize]).collect(),
        }
    }

    /// Inverse of [`encode`].
    pub fn decode(key: &[u32]) -> SmallGraph {
        let n = key[0] as usize;
        let mut it = key[1..].iter().copied();
        let mut g = SmallGraph { adj: Vec::with_capacity(n), labels: Vec::with_capacity(n), dist: Vec::with_capacity(n) };
        for _ in 0..n {
            g.dist.push(it.next().expect("well-formed key"));
            let c = it.next().expect("well-formed key") as usize;
            g.labels.push(it.by_ref().take(c).collect());
            let d = it.next().expect("well-formed key") as usize;
            g.adj.push(it.by_ref().take(d).collect());
        }
        g
    }
}

/// `[n, then per position: dist, #colors, colors, degree, neighbor positions]`.
fn encode(g: &SmallGraph, pos: &[u32], order: &[u32]) -> Vec<u32> {
    let mut key = Vec::with_capacity(1 + 4 * g.len());
    key.push(g.len() as u32);
    let mut nbrs = Vec::new();
    for &v in order {
        let v = v as usize;
        key.push(g.dist[v]);
        key.push(g.labels[v].len() as u32);
        key.extend(g.labels[v].iter().copied());
        key.push(g.adj[v].len() as u32);
        nbrs.clear();
        nbrs.extend(g.adj[v].iter().map(|&w| pos[w as usize]));
        nbrs.sort_unstable();
        key.extend_from_slice(&nbrs);
    }
    key
}

/// Densifies `colors` by rank of `sig` in sorted order.
fn rank_by<T: Ord + Clone>(sig: &[T]) -> (Vec<u32>, usize) {
    let mut idx: Vec<usize> = (0..sig.len()).collect();
    idx.sort_by(|&a, &b| sig[a].cmp(&sig[b]));
    let mut out = vec![0u32; sig.len()];
    let mut rank = 0u32;
    for w in 0..idx.len() {
        if w > 0 && sig[idx[w]] != sig[idx[w - 1]] {
            rank += 1;
        }
        out[idx[w]] = rank;
    }
    (out, if sig.is_empty() { 0 } else { rank as usize + 1 })
}

fn refine(g: &SmallGraph, colors: &mut Vec<u32>) {
    let (dense, mut cells) = rank_by(colors);
    *colors = dense;
    loop {
        if cells == g.len() {
            return;
        }
        let sig: Vec<(u32, Vec<u32>)> = (0..g.len())
            .map(|v| {
                let mut n: Vec<u32> = g.adj[v].iter().map(|&w| colors[w as usize]).collect();
                n.sort_unstable();
                (colors[v], n)
            })
            .collect();
        let (next, count) = rank_by(&sig);
        *colors = next;
        if count == cells {
            return;
        }
        cells = count;
    }
}

fn individualize(colors: &[u32], v: usize) -> Vec<u32> {
    let c = colors[v];
    colors
        .iter()
        .enumerate()
        .map(|(w, &x)| {
            if x != c {
                2 * x
            } else if w == v {
                2 * c
            } else {
                2 * c + 1
            }
        })
        .collect()
}

struct Leaf {
    path: Vec<u32>,
    key: Vec<u32>,
    /// Position of each vertex.
    pos: Vec<u32>,
}

struct Search<'a> {
    g: &'a SmallGraph,
    first: Option<Leaf>,
    best: Option<Leaf>,
    /// Automorphisms as vertex maps.
    gens: Vec<Vec<u32>>,
}

fn common_prefix(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl Search<'_> {
    /// Returns the depth to resume at when an automorphism shows that the
    /// rest of the current subtree mirrors an explored one.
    fn run(&mut self, mut colors: Vec<u32>, path: &mut Vec<u32>) -> Option<usize> {
        refine(self.g, &mut colors);
        let n = self.g.len();
        let mut counts = vec![0usize; n];
        for &c in &colors {
            counts[c as usize] += 1;
        }
        let Some(target) = (0..n).find(|&c| counts[c] > 1) else {
            return self.leaf(colors, path);
        };
        let cell: Vec<u32> = (0..n as u32).filter(|&v| colors[v as usize] == target as u32).collect();
        let mut explored: Vec<u32> = Vec::new();
        for &w in &cell {
            if !explored.is_empty() && self.same_orbit(path, w, &explored) {
                continue;
            }
            explored.push(w);
            path.push(w);
            let jump = self.run(individualize(&colors, w as usize), path);
            path.pop();
            if let Some(level) = jump {
                if level < path.len() {
                    return Some(level);
                }
            }
        }
        None
    }

    fn leaf(&mut self, pos: Vec<u32>, path: &[u32]) -> Option<usize> {
        let mut order = vec![0u32; pos.len()];
        for (v, &p) in pos.iter().enumerate() {
            order[p as usize] = v as u32;
        }
        let key = encode(self.g, &pos, &order);
        let leaf = Leaf { path: path.to_vec(), key, pos };
        let Some(first) = &self.first else {
            self.best = Some(Leaf { path: leaf.path.clone(), key: leaf.key.clone(), pos: leaf.pos.clone() });
            self.first = Some(leaf);
            return None;
        };
        for reference in [first, self.best.as_ref().expect("set with first")] {
            if reference.key == leaf.key {
                // Vertex at position p here maps to the vertex at p there.
                let mut inv = vec![0u32; reference.pos.len()];
                for (v, &p) in reference.pos.iter().enumerate() {
                    inv[p as usize] = v as u32;
                }
                let gamma: Vec<u32> = leaf.pos.iter().map(|&p| inv[p as usize]).collect();
                let level = common_prefix(&reference.path, path);
                self.gens.push(gamma);
                return Some(level);
            }
        }
        if leaf.key < self.best.as_ref().expect("set with first").key {
            self.best = Some(leaf);
        }
        None
    }

    /// Whether `w` shares an orbit with an explored vertex under the known
    /// automorphisms that fix `path` pointwise.
    fn same_orbit(&self, path: &[u32], w: u32, explored: &[u32]) -> bool {
        let n = self.g.len();
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(p: &mut [u32], x: u32) -> u32 {
            let mut r = x;
            while p[r as usize] != r {
                r = p[r as usize];
            }
            let mut c = x;
            while p[c as usize] != r {
                let next = p[c as usize];
                p[c as usize] = r;
                c = next;
            }
            r
        }
        let mut any = false;
        for gamma in &self.gens {
            if path.iter().all(|&v| gamma[v as usize] == v) {
                any = true;
                for v in 0..n as u32 {
                    let (a, b) = (find(&mut parent, v), find(&mut parent, gamma[v as usize]));
                    if a != b {
                        parent[a as usize] = b;
                    }
                }
            }
        }
        if !any {
            return false;
        }
        let root = find(&mut parent, w);
        explored.iter().any(|&e| find(&mut parent, e) == root)
    }
}

/// Canonical key and canonical order: `order[p]` is the local vertex placed
/// at position `p`. Position 0 is always the center.
pub fn canonize(g: &SmallGraph) -> (Vec<u32>, Vec<u32>) {
    let sig: Vec<(u32, &Labels, usize)> = (0..g.len()).map(|v| (g.dist[v], &g.labels[v], g.adj[v].len())).collect();
    let (colors, _) = rank_by(&sig);
    let mut search = Search { g, first: None, best: None, gens: Vec::new() };
    search.run(colors, &mut Vec::new());
    let best = search.best.expect("at least one leaf");
    let mut order = vec![0u32; best.pos.len()];
    for (v, &p) in best.pos.iter().enumerate() {
        order[p as usize] = v as u32;
    }
    (best.key, order)
}
