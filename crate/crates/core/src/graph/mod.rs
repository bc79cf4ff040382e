//! Mutable undirected colored graphs with degree-policy enforcement.
//!
//! Vertices carry a set of colors (unary predicates). Color names are interned
//! per graph into [`ColorId`]s so that neighborhood canonization and formula
//! evaluation compare integers rather than strings.

pub mod text;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rustc_hash::{FxHashMap, FxHashSet};
use smallvec::SmallVec;
use thiserror::Error;

pub use text::{parse_graph, parse_updates, write_graph, FormatError};

/// Vertex identifier. The numeric order is the linear order on vertices used
/// for lexicographic tuple order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

/// Interned color name.
pub type ColorId = u32;

/// Sorted, duplicate-free interned colors of one vertex.
pub type Labels = SmallVec<[ColorId; 2]>;

/// A duplicate-free set of color names.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorSet(BTreeSet<String>);

impl ColorSet {
    pub fn new() -> Self {
        ColorSet(BTreeSet::new())
    }

    pub fn insert(&mut self, name: impl Into<String>) -> bool {
        self.0.insert(name.into())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for ColorSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        ColorSet(iter.into_iter().map(Into::into).collect())
    }
}

impl fmt::Display for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in &self.0 {
            if !first {
                f.write_str(",")?;
            }
            f.write_str(c)?;
            first = false;
        }
        Ok(())
    }
}

/// Upper bound on the degree as a function of the vertex count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegreePolicy {
    /// Degree at most `d` at all times.
    Bounded(u32),
    /// Degree at most `ceil(c * n^eps)`; graphs with at most one vertex use `ceil(c)`.
    LowDegree { c: f64, eps: f64 },
}

impl DegreePolicy {
    pub fn cap(&self, n: usize) -> usize {
        match *self {
            DegreePolicy::Bounded(d) => d as usize,
            DegreePolicy::LowDegree { c, eps } => {
                if n <= 1 {
                    c.ceil() as usize
                } else {
                    (c * (n as f64).powf(eps)).ceil() as usize
                }
            }
        }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        match *self {
            DegreePolicy::Bounded(0) => Err(GraphError::InvalidPolicy("d must be positive".into())),
            DegreePolicy::LowDegree { c, eps } if !(c > 0.0 && eps > 0.0 && c.is_finite() && eps.is_finite()) => {
                Err(GraphError::InvalidPolicy(format!("C={c} and eps={eps} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

/// A local update.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UpdateOp {
    AddVertex(VertexId, ColorSet),
    /// Removing a vertex with incident edges expands into the edge removals
    /// followed by the removal of the then isolated vertex.
    RemoveVertex(VertexId),
    AddEdge(VertexId, VertexId),
    RemoveEdge(VertexId, VertexId),
    Relabel(VertexId, ColorSet),
}

impl UpdateOp {
    /// Vertices (and edge endpoints) the operation touches directly.
    pub fn touched(&self) -> SmallVec<[VertexId; 2]> {
        match self {
            UpdateOp::AddVertex(v, _) | UpdateOp::RemoveVertex(v) | UpdateOp::Relabel(v, _) => {
                smallvec::smallvec![*v]
            }
            UpdateOp::AddEdge(u, v) | UpdateOp::RemoveEdge(u, v) => smallvec::smallvec![*u, *v],
        }
    }
}

impl fmt::Display for UpdateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpdateOp::AddVertex(v, c) if c.is_empty() => write!(f, "+v {v}"),
            UpdateOp::AddVertex(v, c) => write!(f, "+v {v} {c}"),
            UpdateOp::RemoveVertex(v) => write!(f, "-v {v}"),
            UpdateOp::AddEdge(u, v) => write!(f, "+e {u} {v}"),
            UpdateOp::RemoveEdge(u, v) => write!(f, "-e {u} {v}"),
            UpdateOp::Relabel(v, c) if c.is_empty() => write!(f, "!v {v}"),
            UpdateOp::Relabel(v, c) => write!(f, "!v {v} {c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {0} does not exist")]
    MissingVertex(VertexId),
    #[error("vertex {0} already exists")]
    DuplicateVertex(VertexId),
    #[error("edge {0}-{1} already exists")]
    DuplicateEdge(VertexId, VertexId),
    #[error("edge {0}-{1} does not exist")]
    MissingEdge(VertexId, VertexId),
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("degree {degree} would exceed the cap {cap}")]
    DegreeExceeded { degree: usize, cap: usize },
    #[error("vertex {0} still has incident edges")]
    NotIsolated(VertexId),
    #[error("invalid degree policy: {0}")]
    InvalidPolicy(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Palette {
    names: Vec<String>,
    index: FxHashMap<String, ColorId>,
}

impl Palette {
    fn intern(&mut self, name: &str) -> ColorId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as ColorId;
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    labels: Labels,
    adj: Vec<VertexId>,
}

/// Ball of radius `radius` around `center`, members ordered by (distance, id).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedBall {
    pub center: VertexId,
    pub radius: usize,
    pub members: Vec<(VertexId, usize)>,
    /// Induced edges, each as `(min, max)`, sorted.
    pub edges: Vec<(VertexId, VertexId)>,
    /// Colors of each member, parallel to `members`.
    pub labels: Vec<Labels>,
}

impl PointedBall {
    pub fn contains(&self, v: VertexId) -> bool {
        self.members.iter().any(|&(m, _)| m == v)
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.members.iter().map(|&(m, _)| m)
    }
}

/// Undirected simple colored graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicGraph {
    nodes: FxHashMap<VertexId, Node>,
    palette: Palette,
    policy: DegreePolicy,
    edges: usize,
    degree_hist: Vec<usize>,
    max_degree: usize,
    next_fresh: u32,
}

impl DynamicGraph {
    pub fn new(policy: DegreePolicy) -> Result<Self, GraphError> {
        policy.validate()?;
        Ok(DynamicGraph {
            nodes: FxHashMap::default(),
            palette: Palette::default(),
            policy,
            edges: 0,
            degree_hist: vec![0],
            max_degree: 0,
            next_fresh: 0,
        })
    }

    /// An empty graph with the same policy and color ids.
    pub fn empty_like(&self) -> Self {
        DynamicGraph { palette: self.palette.clone(), ..DynamicGraph::new(self.policy).expect("valid policy") }
    }

    pub fn policy(&self) -> DegreePolicy {
        self.policy
    }

    pub fn vertex_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Current degree cap.
    pub fn cap(&self) -> usize {
        self.policy.cap(self.nodes.len())
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.nodes.contains_key(&v)
    }

    /// A vertex id that was never used by this graph. Monotone.
    pub fn fresh_id(&self) -> VertexId {
        VertexId(self.next_fresh)
    }

    pub fn neighbors(&self, v: VertexId) -> Result<&[VertexId], GraphError> {
        self.node(v).map(|n| n.adj.as_slice())
    }

    pub fn degree(&self, v: VertexId) -> Result<usize, GraphError> {
        self.node(v).map(|n| n.adj.len())
    }

    pub fn labels(&self, v: VertexId) -> Result<&Labels, GraphError> {
        self.node(v).map(|n| &n.labels)
    }

    pub fn colors(&self, v: VertexId) -> Result<ColorSet, GraphError> {
        let node = self.node(v)?;
        Ok(node.labels.iter().map(|&c| self.palette.names[c as usize].clone()).collect())
    }

    pub fn has_color(&self, v: VertexId, color: ColorId) -> bool {
        self.nodes.get(&v).is_some_and(|n| n.labels.binary_search(&color).is_ok())
    }

    pub fn adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.nodes.get(&u).is_some_and(|n| n.adj.binary_search(&v).is_ok())
    }

    pub fn color_id(&self, name: &str) -> Option<ColorId> {
        self.palette.index.get(name).copied()
    }

    pub fn color_name(&self, id: ColorId) -> Option<&str> {
        self.palette.names.get(id as usize).map(String::as_str)
    }

    /// Registers a color name so it can be referenced by id, even if no
    /// vertex carries it yet.
    pub fn intern_color(&mut self, name: &str) -> ColorId {
        self.palette.intern(name)
    }

    /// Live vertices in unspecified order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn sorted_vertices(&self) -> Vec<VertexId> {
        let mut v: Vec<_> = self.nodes.keys().copied().collect();
        v.sort_unstable();
        v
    }

    /// All edges as sorted `(min, max)` pairs.
    pub fn sorted_edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.edges);
        for (&u, n) in &self.nodes {
            out.extend(n.adj.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out.sort_unstable();
        out
    }

    fn node(&self, v: VertexId) -> Result<&Node, GraphError> {
        self.nodes.get(&v).ok_or(GraphError::MissingVertex(v))
    }

    fn intern_set(&mut self, colors: &ColorSet) -> Labels {
        let mut labels: Labels = colors.iter().map(|c| self.palette.intern(c)).collect();
        labels.sort_unstable();
        labels
    }

    /// Expands an update into primitive updates after checking that the whole
    /// sequence is valid. No state is modified.
    pub fn expand(&self, op: &UpdateOp) -> Result<Vec<UpdateOp>, GraphError> {
        match op {
            UpdateOp::RemoveVertex(v) => {
                let node = self.node(*v)?;
                let cap = self.policy.cap(self.nodes.len() - 1);
                let after = self.max_degree_after_removal(*v, &node.adj);
                if after > cap {
                    return Err(GraphError::DegreeExceeded { degree: after, cap });
                }
                let mut ops: Vec<_> = node.adj.iter().map(|&u| UpdateOp::RemoveEdge(*v, u)).collect();
                ops.push(UpdateOp::RemoveVertex(*v));
                Ok(ops)
            }
            other => {
                self.validate(other)?;
                Ok(vec![other.clone()])
            }
        }
    }

    /// Checks a primitive update (a vertex removal must target an isolated vertex).
    pub fn validate(&self, op: &UpdateOp) -> Result<(), GraphError> {
        match op {
            UpdateOp::AddVertex(v, _) => {
                if self.nodes.contains_key(v) {
                    return Err(GraphError::DuplicateVertex(*v));
                }
                let cap = self.policy.cap(self.nodes.len() + 1);
                if self.max_degree > cap {
                    return Err(GraphError::DegreeExceeded { degree: self.max_degree, cap });
                }
                Ok(())
            }
            UpdateOp::RemoveVertex(v) => {
                let node = self.node(*v)?;
                if !node.adj.is_empty() {
                    // Composite removals go through `expand`.
                    return Err(GraphError::NotIsolated(*v));
                }
                let cap = self.policy.cap(self.nodes.len() - 1);
                let after = self.max_degree_after_removal(*v, &[]);
                if after > cap {
                    return Err(GraphError::DegreeExceeded { degree: after, cap });
                }
                Ok(())
            }
            UpdateOp::AddEdge(u, v) => {
                if u == v {
                    self.node(*u)?;
                    return Err(GraphError::SelfLoop(*u));
                }
                let nu = self.node(*u)?;
                let nv = self.node(*v)?;
                if nu.adj.binary_search(v).is_ok() {
                    return Err(GraphError::DuplicateEdge(*u, *v));
                }
                let cap = self.cap();
                let degree = nu.adj.len().max(nv.adj.len()) + 1;
                if degree > cap {
                    return Err(GraphError::DegreeExceeded { degree, cap });
                }
                Ok(())
            }
            UpdateOp::RemoveEdge(u, v) => {
                if u == v {
                    self.node(*u)?;
                    return Err(GraphError::SelfLoop(*u));
                }
                let nu = self.node(*u)?;
                self.node(*v)?;
                if nu.adj.binary_search(v).is_err() {
                    return Err(GraphError::MissingEdge(*u, *v));
                }
                Ok(())
            }
            UpdateOp::Relabel(v, _) => self.node(*v).map(|_| ()),
        }
    }

    fn max_degree_after_removal(&self, v: VertexId, adj: &[VertexId]) -> usize {
        let mut delta: FxHashMap<usize, isize> = FxHashMap::default();
        *delta.entry(adj.len()).or_default() -= 1;
        for u in adj {
            let d = self.nodes[u].adj.len();
            *delta.entry(d).or_default() -= 1;
            *delta.entry(d - 1).or_default() += 1;
        }
        debug_assert_eq!(adj.len(), self.nodes[&v].adj.len());
        let mut m = self.max_degree;
        loop {
            let c = self.degree_hist[m] as isize + delta.get(&m).copied().unwrap_or(0);
            if c > 0 || m == 0 {
                return m;
            }
            m -= 1;
        }
    }

    /// Applies an update. Rejected updates leave the graph unchanged.
    pub fn apply(&mut self, op: &UpdateOp) -> Result<(), GraphError> {
        let ops = self.expand(op)?;
        for p in &ops {
            self.apply_primitive_unchecked(p);
        }
        self.debug_check();
        Ok(())
    }

    /// Applies a single primitive update after validating it.
    pub fn apply_primitive(&mut self, op: &UpdateOp) -> Result<(), GraphError> {
        self.validate(op)?;
        self.apply_primitive_unchecked(op);
        self.debug_check();
        Ok(())
    }

    fn apply_primitive_unchecked(&mut self, op: &UpdateOp) {
        match op {
            UpdateOp::AddVertex(v, colors) => {
                let labels = self.intern_set(colors);
                self.nodes.insert(*v, Node { labels, adj: Vec::new() });
                self.degree_hist[0] += 1;
                self.next_fresh = self.next_fresh.max(v.0.saturating_add(1));
            }
            UpdateOp::RemoveVertex(v) => {
                self.nodes.remove(v);
                self.degree_hist[0] -= 1;
                self.settle_max();
            }
            UpdateOp::AddEdge(u, v) => {
                for (a, b) in [(*u, *v), (*v, *u)] {
                    let node = self.nodes.get_mut(&a).expect("validated");
                    let pos = node.adj.binary_search(&b).unwrap_err();
                    node.adj.insert(pos, b);
                    let d = node.adj.len();
                    self.degree_hist[d - 1] -= 1;
                    if self.degree_hist.len() <= d {
                        self.degree_hist.resize(d + 1, 0);
                    }
                    self.degree_hist[d] += 1;
                    self.max_degree = self.max_degree.max(d);
                }
                self.edges += 1;
            }
            UpdateOp::RemoveEdge(u, v) => {
                for (a, b) in [(*u, *v), (*v, *u)] {
                    let node = self.nodes.get_mut(&a).expect("validated");
                    let pos = node.adj.binary_search(&b).expect("validated");
                    node.adj.remove(pos);
                    let d = node.adj.len();
                    self.degree_hist[d + 1] -= 1;
                    self.degree_hist[d] += 1;
                }
                self.edges -= 1;
                self.settle_max();
            }
            UpdateOp::Relabel(v, colors) => {
                let labels = self.intern_set(colors);
                self.nodes.get_mut(v).expect("validated").labels = labels;
            }
        }
    }

    fn settle_max(&mut self) {
        while self.max_degree > 0 && self.degree_hist[self.max_degree] == 0 {
            self.max_degree -= 1;
        }
    }

    fn debug_check(&self) {
        #[cfg(debug_assertions)]
        if self.nodes.len() <= 256 {
            self.check_invariants().expect("graph invariants");
        }
    }

    /// Full invariant check: symmetry, no loops, live endpoints, degree cap,
    /// and bookkeeping consistency.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut edges = 0;
        let mut max = 0;
        let mut hist = vec![0usize; self.degree_hist.len().max(1)];
        for (&u, n) in &self.nodes {
            if n.adj.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("adjacency of {u} not strictly sorted"));
            }
            for &v in &n.adj {
                if v == u {
                    return Err(format!("self-loop at {u}"));
                }
                let Some(nv) = self.nodes.get(&v) else {
                    return Err(format!("dangling edge {u}-{v}"));
                };
                if nv.adj.binary_search(&u).is_err() {
                    return Err(format!("asymmetric edge {u}-{v}"));
                }
            }
            edges += n.adj.len();
            max = max.max(n.adj.len());
            if n.adj.len() >= hist.len() {
                return Err("degree histogram too short".into());
            }
            hist[n.adj.len()] += 1;
        }
        if edges != 2 * self.edges {
            return Err("edge count out of sync".into());
        }
        if max != self.max_degree || hist != self.degree_hist {
            return Err("degree bookkeeping out of sync".into());
        }
        if max > self.cap() {
            return Err(format!("max degree {max} exceeds cap {}", self.cap()));
        }
        Ok(())
    }

    /// Vertices within distance `r` of `a` with their distance, in BFS order.
    pub fn bfs(&self, a: VertexId, r: usize) -> Result<Vec<(VertexId, usize)>, GraphError> {
        self.node(a)?;
        Ok(self.bfs_from(&[a], r))
    }

    /// Multi-source BFS up to radius `r`. Unknown sources are ignored.
    pub fn bfs_from(&self, sources: &[VertexId], r: usize) -> Vec<(VertexId, usize)> {
        let mut seen: FxHashSet<VertexId> = FxHashSet::default();
        let mut order = Vec::new();
        for &s in sources {
            if self.nodes.contains_key(&s) && seen.insert(s) {
                order.push((s, 0));
            }
        }
        let mut head = 0;
        while head < order.len() {
            let (u, d) = order[head];
            head += 1;
            if d == r {
                continue;
            }
            for &w in &self.nodes[&u].adj {
                if seen.insert(w) {
                    order.push((w, d + 1));
                }
            }
        }
        order
    }

    /// Sorted vertices within distance `r` of any of `sources`.
    pub fn neighborhood(&self, sources: &[VertexId], r: usize) -> Vec<VertexId> {
        let mut v: Vec<_> = self.bfs_from(sources, r).into_iter().map(|(v, _)| v).collect();
        v.sort_unstable();
        v
    }

    /// The substructure induced by the `r`-neighborhood of `a`.
    pub fn ball(&self, a: VertexId, r: usize) -> Result<PointedBall, GraphError> {
        let mut members = self.bfs(a, r)?;
        members.sort_unstable_by_key(|&(v, d)| (d, v));
        let mut edges = Vec::new();
        let inside: FxHashSet<VertexId> = members.iter().map(|&(v, _)| v).collect();
        for &(u, _) in &members {
            for &w in &self.nodes[&u].adj {
                if u < w && inside.contains(&w) {
                    edges.push((u, w));
                }
            }
        }
        edges.sort_unstable();
        let labels = members.iter().map(|(v, _)| self.nodes[v].labels.clone()).collect();
        Ok(PointedBall { center: a, radius: r, members, edges, labels })
    }

    /// Exact distance between `a` and `b` if it is at most `max`, computed by
    /// bidirectional BFS.
    pub fn distance_upto(&self, a: VertexId, b: VertexId, max: usize) -> Result<Option<usize>, GraphError> {
        self.node(a)?;
        self.node(b)?;
        if a == b {
            return Ok(Some(0));
        }
        let mut dist_a: FxHashMap<VertexId, usize> = FxHashMap::default();
        let mut dist_b: FxHashMap<VertexId, usize> = FxHashMap::default();
        dist_a.insert(a, 0);
        dist_b.insert(b, 0);
        let mut front_a = vec![a];
        let mut front_b = vec![b];
        let (mut ra, mut rb) = (0usize, 0usize);
        let mut best: Option<usize> = None;
        while ra + rb < max && !front_a.is_empty() && !front_b.is_empty() {
            let expand_a = front_a.len() <= front_b.len();
            let (front, dist, other, radius) = if expand_a {
                (&mut front_a, &mut dist_a, &dist_b, &mut ra)
            } else {
                (&mut front_b, &mut dist_b, &dist_a, &mut rb)
            };
            *radius += 1;
            let mut next = Vec::new();
            for &u in front.iter() {
                for &w in &self.nodes[&u].adj {
                    if dist.contains_key(&w) {
                        continue;
                    }
                    dist.insert(w, *radius);
                    if let Some(&o) = other.get(&w) {
                        let total = *radius + o;
                        best = Some(best.map_or(total, |b| b.min(total)));
                    }
                    next.push(w);
                }
            }
            *front = next;
            if best.is_some() {
                break;
            }
        }
        Ok(best.filter(|&d| d <= max))
    }

    /// Whether `dist(a, b) <= r`.
    pub fn distance_leq(&self, a: VertexId, b: VertexId, r: usize) -> Result<bool, GraphError> {
        Ok(self.distance_upto(a, b, r)?.is_some())
    }

    /// Every vertex within distance `r` of a vertex touched by `op`, computed
    /// on the graph before the update (the neighborhood of the touched set is
    /// the same before and after an edge insertion, and can only shrink under
    /// deletions). Inserted vertices are included. Sorted.
    pub fn impacted(&self, op: &UpdateOp, r: usize) -> Result<Vec<VertexId>, GraphError> {
        let ops = self.expand(op)?;
        let mut touched: Vec<VertexId> = Vec::new();
        for p in &ops {
            touched.extend(p.touched());
        }
        let mut out = self.neighborhood(&touched, r);
        if let UpdateOp::AddVertex(v, _) = op {
            if out.binary_search(v).is_err() {
                out.push(*v);
                out.sort_unstable();
            }
        }
        Ok(out)
    }
}

/// `sum_{i=0..r} d^i`, saturating.
pub fn ballsize(d: usize, r: usize) -> usize {
    let mut total: usize = 0;
    let mut term: usize = 1;
    for _ in 0..=r {
        total = total.saturating_add(term);
        term = term.saturating_mul(d);
    }
    total
}

/// Plain BFS distance over the whole graph (no bound), used in tests.
pub fn bfs_distance(g: &DynamicGraph, a: VertexId, b: VertexId) -> Option<usize> {
    let mut seen = FxHashSet::default();
    let mut q = VecDeque::new();
    seen.insert(a);
    q.push_back((a, 0));
    while let Some((u, d)) = q.pop_front() {
        if u == b {
            return Some(d);
        }
        for &w in g.neighbors(u).ok()? {
            if seen.insert(w) {
                q.push_back((w, d + 1));
            }
        }
    }
    None
}
