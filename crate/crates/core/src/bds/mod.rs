//! Catalog of realized neighborhood types for bounded-degree graphs.
//!
//! Every live vertex `a` is assigned the canonical form of its pointed ball of
//! radius `rho` (its type) together with the embedding that places the ball
//! onto the type graph. Registered centered queries are solved once per type
//! on the type graph; counts and solution lists on the host graph follow by
//! summing over type classes and mapping local solutions back through the
//! embeddings. A table of exact distances up to `delta_radius` answers
//! threshold distance checks by lookup.

pub mod canon;

use std::collections::BTreeSet;

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::centered::{CenteredQuery, CompiledCentered};
use crate::graph::{ColorId, DynamicGraph, GraphError, Labels, VertexId};
use crate::structure::{Structure, Tuple};
use canon::{canonize, SmallGraph};

pub type TypeId = usize;
pub type LeafId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BdsError {
    #[error("query radius {radius} exceeds the type radius {rho}")]
    RadiusTooLarge { radius: u32, rho: u32 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A canonical pointed colored graph; local vertex `i` is `VertexId(i)` and
/// the center is `VertexId(0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeGraph {
    key: Box<[u32]>,
    adj: Vec<Vec<VertexId>>,
    labels: Vec<Labels>,
    dist: Vec<u32>,
}

impl TypeGraph {
    fn from_key(key: Vec<u32>) -> Self {
        let g = SmallGraph::decode(&key);
        TypeGraph {
            key: key.into_boxed_slice(),
            adj: g.adj.into_iter().map(|a| a.into_iter().map(VertexId).collect()).collect(),
            labels: g.labels,
            dist: g.dist,
        }
    }

    pub fn key(&self) -> &[u32] {
        &self.key
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn labels(&self, v: usize) -> &Labels {
        &self.labels[v]
    }

    pub fn dist(&self, v: usize) -> u32 {
        self.dist[v]
    }

    pub fn local_neighbors(&self, v: usize) -> &[VertexId] {
        &self.adj[v]
    }
}

impl Structure for TypeGraph {
    fn neighbors(&self, v: VertexId) -> &[VertexId] {
        self.adj.get(v.0 as usize).map_or(&[], |a| a.as_slice())
    }

    fn has_color(&self, v: VertexId, c: ColorId) -> bool {
        self.labels.get(v.0 as usize).is_some_and(|l| l.binary_search(&c).is_ok())
    }
}

/// Solutions of one centered query on one type graph, anchored at the center.
#[derive(Debug, Clone, Default)]
struct SolTable {
    sorted: Vec<Tuple>,
    set: FxHashSet<Tuple>,
}

impl SolTable {
    fn new(ty: &TypeGraph, q: &CompiledCentered) -> Self {
        let sorted = q.solutions_at(ty, VertexId(0));
        let set = sorted.iter().cloned().collect();
        SolTable { sorted, set }
    }
}

#[derive(Debug, Clone)]
struct Assigned {
    ty: TypeId,
    /// Host vertex at each canonical position.
    embedding: Box<[VertexId]>,
}

impl Assigned {
    fn local(&self, v: VertexId) -> Option<VertexId> {
        self.embedding.iter().position(|&w| w == v).map(|p| VertexId(p as u32))
    }
}

#[derive(Debug, Clone)]
struct Leaf {
    compiled: CompiledCentered,
    /// Indexed by type.
    sol: Vec<SolTable>,
    count: u64,
}

#[derive(Debug, Clone)]
pub struct Bds {
    d: usize,
    rho: u32,
    delta_radius: u32,
    types: Vec<TypeGraph>,
    by_key: FxHashMap<Box<[u32]>, TypeId>,
    chi: FxHashMap<VertexId, Assigned>,
    lists: Vec<BTreeSet<VertexId>>,
    /// Per vertex, every other vertex within `delta_radius` with its
    /// distance, sorted by vertex.
    delta: FxHashMap<VertexId, Vec<(VertexId, u32)>>,
    leaves: Vec<Leaf>,
}

impl Bds {
    pub fn build(g: &DynamicGraph, d: usize, rho: u32, delta_radius: u32) -> Result<Self, BdsError> {
        if g.max_degree() > d {
            return Err(GraphError::DegreeExceeded { degree: g.max_degree(), cap: d }.into());
        }
        let mut bds = Bds {
            d,
            rho,
            delta_radius,
            types: Vec::new(),
            by_key: FxHashMap::default(),
            chi: FxHashMap::default(),
            lists: Vec::new(),
            delta: FxHashMap::default(),
            leaves: Vec::new(),
        };
        let vs = g.sorted_vertices();
        bds.refresh(g, &vs, &vs)?;
        Ok(bds)
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn rho(&self) -> u32 {
        self.rho
    }

    pub fn delta_radius(&self) -> u32 {
        self.delta_radius
    }

    /// Realized types, including those whose class is currently empty.
    pub fn types(&self) -> &[TypeGraph] {
        &self.types
    }

    pub fn type_of(&self, v: VertexId) -> Option<TypeId> {
        self.chi.get(&v).map(|a| a.ty)
    }

    /// Host vertex at each position of `v`'s type graph.
    pub fn embedding(&self, v: VertexId) -> Option<&[VertexId]> {
        self.chi.get(&v).map(|a| &*a.embedding)
    }

    pub fn class(&self, ty: TypeId) -> &BTreeSet<VertexId> {
        &self.lists[ty]
    }

    pub fn count_l(&self, ty: TypeId) -> usize {
        self.lists[ty].len()
    }

    /// Realized types with a nonempty class.
    pub fn live_types(&self) -> usize {
        self.lists.iter().filter(|l| !l.is_empty()).count()
    }

    /// Updates after `g` changed. `anchors` must contain every vertex within
    /// `rho` of the update and `delta_anchors` every vertex within
    /// `delta_radius`, both measured before the update, plus inserted
    /// vertices.
    pub fn on_update(&mut self, g: &DynamicGraph, anchors: &[VertexId], delta_anchors: &[VertexId]) -> Result<(), BdsError> {
        if g.max_degree() > self.d {
            return Err(GraphError::DegreeExceeded { degree: g.max_degree(), cap: self.d }.into());
        }
        self.refresh(g, anchors, delta_anchors)
    }

    fn refresh(&mut self, g: &DynamicGraph, anchors: &[VertexId], delta_anchors: &[VertexId]) -> Result<(), BdsError> {
        for &a in anchors {
            if let Some(old) = self.chi.remove(&a) {
                self.lists[old.ty].remove(&a);
                for leaf in &mut self.leaves {
                    leaf.count -= leaf.sol[old.ty].sorted.len() as u64;
                }
            }
            if !g.contains(a) {
                continue;
            }
            let ball = g.ball(a, self.rho as usize)?;
            let (key, order) = canonize(&SmallGraph::from_ball(&ball));
            let ty = self.intern(key);
            let embedding = order.iter().map(|&i| ball.members[i as usize].0).collect();
            self.chi.insert(a, Assigned { ty, embedding });
            self.lists[ty].insert(a);
            for leaf in &mut self.leaves {
                leaf.count += leaf.sol[ty].sorted.len() as u64;
            }
        }
        for &a in delta_anchors {
            self.delta.remove(&a);
            if g.contains(a) {
                let mut row: Vec<(VertexId, u32)> =
                    g.bfs(a, self.delta_radius as usize)?.into_iter().skip(1).map(|(v, d)| (v, d as u32)).collect();
                row.sort_unstable();
                self.delta.insert(a, row);
            }
        }
        Ok(())
    }

    fn intern(&mut self, key: Vec<u32>) -> TypeId {
        if let Some(&ty) = self.by_key.get(key.as_slice()) {
            return ty;
        }
        let ty = self.types.len();
        let graph = TypeGraph::from_key(key);
        for leaf in &mut self.leaves {
            leaf.sol.push(SolTable::new(&graph, &leaf.compiled));
        }
        self.by_key.insert(graph.key.clone(), ty);
        self.types.push(graph);
        self.lists.push(BTreeSet::new());
        ty
    }

    /// Registers a centered query, solving it on every realized type.
    pub fn register(&mut self, q: &CenteredQuery, compiled: CompiledCentered) -> Result<LeafId, BdsError> {
        if q.radius() > self.rho {
            return Err(BdsError::RadiusTooLarge { radius: q.radius(), rho: self.rho });
        }
        let sol: Vec<SolTable> = self.types.iter().map(|t| SolTable::new(t, &compiled)).collect();
        let count = sol.iter().zip(&self.lists).map(|(s, l)| (s.sorted.len() * l.len()) as u64).sum();
        self.leaves.push(Leaf { compiled, sol, count });
        Ok(self.leaves.len() - 1)
    }

    /// Number of solutions of a registered query on the host graph.
    pub fn alpha_count(&self, leaf: LeafId) -> u64 {
        self.leaves[leaf].count
    }

    /// Solutions of a registered query anchored at `a`, sorted.
    pub fn tuples_at(&self, leaf: LeafId, a: VertexId) -> Vec<Tuple> {
        let Some(assigned) = self.chi.get(&a) else {
            return Vec::new();
        };
        let mut out: Vec<Tuple> = self.leaves[leaf].sol[assigned.ty]
            .sorted
            .iter()
            .map(|t| t.iter().map(|v| assigned.embedding[v.0 as usize]).collect())
            .collect();
        out.sort_unstable();
        out
    }

    /// All solutions of a registered query, in lexicographic order.
    pub fn alpha_list(&self, leaf: LeafId) -> impl Iterator<Item = Tuple> + '_ {
        let satisfying: Vec<TypeId> = (0..self.types.len()).filter(|&t| !self.leaves[leaf].sol[t].sorted.is_empty()).collect();
        let mut anchors: Vec<VertexId> = satisfying.iter().flat_map(|&t| self.lists[t].iter().copied()).collect();
        anchors.sort_unstable();
        anchors.into_iter().flat_map(move |a| self.tuples_at(leaf, a))
    }

    /// Whether `t` is a solution of a registered query, decided in the type
    /// of its first element.
    pub fn holds(&self, leaf: LeafId, t: &[VertexId]) -> bool {
        let Some(assigned) = t.first().and_then(|a| self.chi.get(a)) else {
            return false;
        };
        let local: Option<Tuple> = t.iter().map(|&v| assigned.local(v)).collect();
        local.is_some_and(|l| self.leaves[leaf].sol[assigned.ty].set.contains(&l))
    }

    /// Exact distance between live `a` and `b` if it is at most
    /// `delta_radius`.
    pub fn delta_lookup(&self, a: VertexId, b: VertexId) -> Result<Option<u32>, GraphError> {
        let row = self.delta.get(&a).ok_or(GraphError::MissingVertex(a))?;
        if !self.delta.contains_key(&b) {
            return Err(GraphError::MissingVertex(b));
        }
        if a == b {
            return Ok(Some(0));
        }
        Ok(row.binary_search_by_key(&b, |&(v, _)| v).ok().map(|i| row[i].1))
    }

    /// Structural self-check against the host graph: the partition, the
    /// embeddings, the leaf counts and the distance table.
    pub fn check_invariants(&self, g: &DynamicGraph) -> Result<(), String> {
        let total: usize = self.lists.iter().map(|l| l.len()).sum();
        if total != g.vertex_count() || self.chi.len() != g.vertex_count() {
            return Err(format!("classes hold {total} vertices, graph has {}", g.vertex_count()));
        }
        for (&a, assigned) in &self.chi {
            if !self.lists[assigned.ty].contains(&a) {
                return Err(format!("{a} missing from its class"));
            }
            let ball = g.ball(a, self.rho as usize).map_err(|e| e.to_string())?;
            let local = SmallGraph::from_ball(&ball);
            let index: FxHashMap<VertexId, u32> = ball.vertex_ids().enumerate().map(|(i, v)| (v, i as u32)).collect();
            let order: Option<Vec<u32>> = assigned.embedding.iter().map(|v| index.get(v).copied()).collect();
            let order = order.ok_or_else(|| format!("embedding of {a} leaves its ball"))?;
            if order.len() != local.len() || order[0] != 0 {
                return Err(format!("embedding of {a} is not a pointed bijection"));
            }
            let ty = &self.types[assigned.ty];
            let mapped = local.permuted(&order);
            let stored = SmallGraph {
                adj: ty.adj.iter().map(|a| a.iter().map(|v| v.0).collect()).collect(),
                labels: ty.labels.clone(),
                dist: ty.dist.clone(),
            };
            if mapped != stored {
                return Err(format!("embedding of {a} is not an isomorphism onto its type"));
            }
        }
        for (i, leaf) in self.leaves.iter().enumerate() {
            let count: u64 = leaf.sol.iter().zip(&self.lists).map(|(s, l)| (s.sorted.len() * l.len()) as u64).sum();
            if count != leaf.count {
                return Err(format!("leaf {i} count {} but classes give {count}", leaf.count));
            }
        }
        if self.delta.len() != g.vertex_count() {
            return Err("distance table rows out of sync".into());
        }
        for (&a, row) in &self.delta {
            let mut expect: Vec<(VertexId, u32)> = g
                .bfs(a, self.delta_radius as usize)
                .map_err(|e| e.to_string())?
                .into_iter()
                .skip(1)
                .map(|(v, d)| (v, d as u32))
                .collect();
            expect.sort_unstable();
            if *row != expect {
                return Err(format!("distance row of {a} is stale"));
            }
        }
        Ok(())
    }
}
