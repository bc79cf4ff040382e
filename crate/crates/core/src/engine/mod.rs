//! Dynamic query answering: preprocessing, updates, and the check, count,
//! test and enumerate modes, over either per-query solution indexes
//! (low degree) or the type catalog (bounded degree).
//!
//! Every distinct centered query (clause group, decomposition leaf, sentence
//! formula) is one source. All cases are maintained at all times, so a flip
//! of a sentence only re-selects the active case.

mod cursor;

use std::ops::Range;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::bds::{Bds, BdsError, LeafId};
use crate::centered::{CenteredQuery, CompiledCentered, ListDelta};
use crate::decomp::{decompose, DecompError, Decomposition};
use crate::graph::{ballsize, ColorId, DegreePolicy, DynamicGraph, GraphError, UpdateOp, VertexId};
use crate::query::{DistanceType, Local, NormalizedQuery};
use crate::skiplist::{CenteredTupleList, SkipIndex};
use crate::structure::{Structure, Tuple};

pub use cursor::Cursor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineMode {
    LowDegree,
    BoundedDegree,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("query radius {radius} exceeds the type radius {rho}")]
    RadiusTooLarge { radius: u32, rho: u32 },
    #[error("expected a tuple of {expected} vertices, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("cursor opened at version {opened}, engine is at version {current}")]
    StaleCursor { opened: u64, current: u64 },
    #[error("unknown sentence `{0}`")]
    UnknownSentence(String),
    #[error("bounded-degree mode needs a bounded degree policy")]
    ModeMismatch,
    #[error(transparent)]
    Decomp(#[from] DecompError),
}

impl From<BdsError> for EngineError {
    fn from(e: BdsError) -> Self {
        match e {
            BdsError::RadiusTooLarge { radius, rho } => EngineError::RadiusTooLarge { radius, rho },
            BdsError::Graph(g) => EngineError::Graph(g),
        }
    }
}

/// Distances answered from the type catalog's table when it covers the
/// threshold, by bounded search otherwise.
pub(crate) struct View<'a> {
    g: &'a DynamicGraph,
    bds: Option<&'a Bds>,
}

impl Structure for View<'_> {
    fn neighbors(&self, v: VertexId) -> &[VertexId] {
        Structure::neighbors(self.g, v)
    }

    fn has_color(&self, v: VertexId, c: ColorId) -> bool {
        self.g.has_color(v, c)
    }

    fn adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.g.adjacent(u, v)
    }

    fn within(&self, u: VertexId, v: VertexId, n: u32) -> bool {
        match self.bds {
            Some(b) if n <= b.delta_radius() => b.delta_lookup(u, v).ok().flatten().is_some_and(|d| d <= n),
            _ => Structure::within(self.g, u, v, n),
        }
    }
}

#[derive(Debug, Clone)]
struct Source {
    query: CenteredQuery,
    compiled: CompiledCentered,
    /// Always present in low-degree mode; for group sources otherwise.
    list: Option<CenteredTupleList>,
    leaf: Option<LeafId>,
}

#[derive(Debug, Clone)]
struct SkipSlot {
    source: usize,
    index: SkipIndex,
}

#[derive(Debug, Clone)]
struct GroupPlan {
    source: usize,
    /// Absent for the first group, which has no forbidden prefix.
    skip: Option<usize>,
    range: Range<usize>,
}

#[derive(Debug, Clone)]
struct ClausePlan {
    r: u32,
    tau: DistanceType,
    groups: Vec<GroupPlan>,
    decomp: Decomposition,
    leaves: Vec<usize>,
}

#[derive(Debug, Clone)]
struct SentencePlan {
    name: String,
    s: u32,
    r: u32,
    source: usize,
}

#[derive(Debug, Clone)]
pub struct Engine {
    mode: EngineMode,
    graph: DynamicGraph,
    query: NormalizedQuery,
    bds: Option<Bds>,
    sources: Vec<Source>,
    source_index: FxHashMap<CenteredQuery, usize>,
    skips: Vec<SkipSlot>,
    cases: Vec<Vec<ClausePlan>>,
    sentences: Vec<SentencePlan>,
    truth: Vec<bool>,
    active: usize,
    version: u64,
    /// Largest distance from an update at which any structure may change.
    impact: u32,
}

fn color_names(f: &Local, out: &mut Vec<String>) {
    f.visit(&mut |g| {
        if let Local::Color(c, _) = g {
            out.push(c.clone());
        }
    });
}

impl Engine {
    pub fn preprocess(mut graph: DynamicGraph, query: NormalizedQuery, mode: EngineMode) -> Result<Self, EngineError> {
        let bounded = match (mode, graph.policy()) {
            (EngineMode::BoundedDegree, DegreePolicy::Bounded(d)) => Some(d as usize),
            (EngineMode::BoundedDegree, _) => return Err(EngineError::ModeMismatch),
            (EngineMode::LowDegree, _) => None,
        };
        let q = query.query();
        let mut names = Vec::new();
        for s in &q.sentences {
            color_names(&s.alpha, &mut names);
        }
        for case in &q.cases {
            for clause in &case.clauses {
                for g in &clause.groups {
                    color_names(&g.formula, &mut names);
                }
            }
        }
        for n in &names {
            graph.intern_color(n);
        }
        let bds = match bounded {
            Some(d) => Some(Bds::build(&graph, d, query.rho(), query.delta_radius())?),
            None => None,
        };
        let mut e = Engine {
            mode,
            graph,
            query: query.clone(),
            bds,
            sources: Vec::new(),
            source_index: FxHashMap::default(),
            skips: Vec::new(),
            cases: Vec::new(),
            sentences: Vec::new(),
            truth: Vec::new(),
            active: 0,
            version: 0,
            impact: query.rho().max(query.delta_radius()),
        };
        let mut skip_index: FxHashMap<(usize, usize, u32), usize> = FxHashMap::default();
        for (ci, case) in query.query().cases.iter().enumerate() {
            let mut plans = Vec::new();
            for (li, clause) in case.clauses.iter().enumerate() {
                let info = query.info(ci, li);
                let mut groups = Vec::new();
                for g in 0..clause.groups.len() {
                    let range = info.group_range(g);
                    let source = e.source(CenteredQuery::from_group(clause, g, range.start), true)?;
                    let skip = if range.start == 0 {
                        None
                    } else {
                        let key = (source, range.start, 2 * clause.r);
                        let slot = match skip_index.get(&key) {
                            Some(&s) => s,
                            None => {
                                let view = View { g: &e.graph, bds: e.bds.as_ref() };
                                let list = e.sources[source].list.as_ref().expect("group sources are listed");
                                let index = SkipIndex::build(&view, list, range.start, 2 * clause.r);
                                e.skips.push(SkipSlot { source, index });
                                skip_index.insert(key, e.skips.len() - 1);
                                e.skips.len() - 1
                            }
                        };
                        let spread = e.sources[source].query.spread();
                        e.impact = e.impact.max(2 * clause.r + spread);
                        Some(slot)
                    };
                    groups.push(GroupPlan { source, skip, range });
                }
                let decomp = decompose(clause)?;
                let leaves = decomp.leaves.iter().map(|l| e.source(l.clone(), false)).collect::<Result<_, _>>()?;
                plans.push(ClausePlan { r: clause.r, tau: clause.tau.clone(), groups, decomp, leaves });
            }
            e.cases.push(plans);
        }
        for s in &query.query().sentences {
            let source = e.source(CenteredQuery::from_sentence(s), false)?;
            e.sentences.push(SentencePlan { name: s.name.clone(), s: s.s, r: s.r, source });
        }
        e.impact = e.sources.iter().map(|s| s.query.radius()).fold(e.impact, u32::max);
        e.refresh_truth();
        Ok(e)
    }

    /// Registers (or finds) the source of a centered query.
    fn source(&mut self, q: CenteredQuery, listed: bool) -> Result<usize, EngineError> {
        let q = q.normalized();
        let id = match self.source_index.get(&q) {
            Some(&id) => id,
            None => {
                let compiled = q.compile(&|n| self.graph.color_id(n));
                let leaf = match &mut self.bds {
                    Some(b) => Some(b.register(&q, compiled.clone())?),
                    None => None,
                };
                self.sources.push(Source { query: q.clone(), compiled, list: None, leaf });
                self.source_index.insert(q, self.sources.len() - 1);
                self.sources.len() - 1
            }
        };
        if (listed || self.bds.is_none()) && self.sources[id].list.is_none() {
            let mut list = CenteredTupleList::new();
            for v in self.graph.sorted_vertices() {
                for t in self.solutions_at(id, v) {
                    list.insert(t);
                }
            }
            self.sources[id].list = Some(list);
        }
        Ok(id)
    }

    fn solutions_at(&self, source: usize, a: VertexId) -> Vec<Tuple> {
        let s = &self.sources[source];
        match (&self.bds, s.leaf) {
            (Some(b), Some(leaf)) => b.tuples_at(leaf, a),
            _ if self.graph.contains(a) => s.compiled.solutions_at(&self.graph, a),
            _ => Vec::new(),
        }
    }

    pub(crate) fn view(&self) -> View<'_> {
        View { g: &self.graph, bds: self.bds.as_ref() }
    }

    pub fn mode(&self) -> EngineMode {
        self.mode
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.graph
    }

    pub fn query(&self) -> &NormalizedQuery {
        &self.query
    }

    pub fn bds(&self) -> Option<&Bds> {
        self.bds.as_ref()
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn active_case(&self) -> usize {
        self.active
    }

    /// Degree used in size bounds: the policy bound in bounded mode, the
    /// current maximum degree otherwise.
    fn degree(&self) -> usize {
        match &self.bds {
            Some(b) => b.degree(),
            None => self.graph.max_degree(),
        }
    }

    fn source_count(&self, source: usize) -> u64 {
        let s = &self.sources[source];
        match (&s.list, s.leaf, &self.bds) {
            (Some(l), _, _) => l.len() as u64,
            (None, Some(leaf), Some(b)) => b.alpha_count(leaf),
            _ => unreachable!("every source is listed or counted"),
        }
    }

    fn source_vertices(&self, source: usize) -> Vec<VertexId> {
        let s = &self.sources[source];
        match (&s.list, s.leaf, &self.bds) {
            (Some(l), _, _) => l.iter().map(|t| t[0]).collect(),
            (None, Some(leaf), Some(b)) => b.alpha_list(leaf).map(|t| t[0]).collect(),
            _ => unreachable!("every source is listed or counted"),
        }
    }

    /// Sizes of the solution lists of the groups of a clause.
    fn group_list(&self, g: &GroupPlan) -> &CenteredTupleList {
        self.sources[g.source].list.as_ref().expect("group sources are listed")
    }

    /// Applies one update. A rejected update changes nothing.
    pub fn update(&mut self, op: &UpdateOp) -> Result<(), EngineError> {
        let prims = self.graph.expand(op)?;
        let mut touched: Vec<VertexId> = Vec::new();
        let mut edges_change = false;
        for p in &prims {
            touched.extend(p.touched());
            edges_change |= matches!(p, UpdateOp::AddEdge(..) | UpdateOp::RemoveEdge(..));
        }
        let mut reach: Vec<(VertexId, u32)> =
            self.graph.bfs_from(&touched, self.impact as usize).into_iter().map(|(v, d)| (v, d as u32)).collect();
        if let UpdateOp::AddVertex(v, _) = op {
            reach.push((*v, 0));
        }
        reach.sort_unstable();
        let within = |r: u32| -> Vec<VertexId> { reach.iter().filter(|&&(_, d)| d <= r).map(|&(v, _)| v).collect() };

        // Tuples whose distances may change, for the skip pointers.
        let mut seeds: Vec<Vec<Tuple>> = vec![Vec::new(); self.skips.len()];
        if edges_change {
            for (slot, seed) in self.skips.iter().zip(&mut seeds) {
                let src = &self.sources[slot.source];
                let list = src.list.as_ref().expect("group sources are listed");
                let near: Vec<Tuple> = within(slot.index.radius() + src.query.spread())
                    .into_iter()
                    .flat_map(|a| list.anchored_at(a).cloned().collect::<Vec<_>>())
                    .collect();
                *seed = slot.index.seeds(list, &near);
            }
        }

        self.graph.apply(op)?;
        if let Some(b) = &mut self.bds {
            b.on_update(&self.graph, &within(b.rho()), &within(b.delta_radius()))?;
        }
        let mut deltas: Vec<ListDelta> = vec![ListDelta::default(); self.sources.len()];
        for (i, delta) in deltas.iter_mut().enumerate() {
            if self.sources[i].list.is_none() {
                continue;
            }
            let fresh: Vec<(VertexId, Vec<Tuple>)> =
                within(self.sources[i].query.radius()).into_iter().map(|a| (a, self.solutions_at(i, a))).collect();
            let list = self.sources[i].list.as_mut().expect("checked");
            for (a, new) in fresh {
                let old: Vec<Tuple> = list.anchored_at(a).cloned().collect();
                delta.removed.extend(old.iter().filter(|t| new.binary_search(t).is_err()).cloned());
                delta.inserted.extend(new.into_iter().filter(|t| old.binary_search(t).is_err()));
            }
            for t in &delta.removed {
                list.remove(t);
            }
            for t in &delta.inserted {
                list.insert(t.clone());
            }
        }
        let view = View { g: &self.graph, bds: self.bds.as_ref() };
        for (slot, seed) in self.skips.iter_mut().zip(seeds) {
            let d = &deltas[slot.source];
            if d.is_empty() && seed.is_empty() {
                continue;
            }
            let list = self.sources[slot.source].list.as_ref().expect("group sources are listed");
            slot.index.repair(&view, list, &d.removed, &d.inserted, seed);
        }
        self.refresh_truth();
        self.version += 1;
        Ok(())
    }

    fn refresh_truth(&mut self) {
        self.truth = (0..self.sentences.len()).map(|i| self.sentence_fast(i)).collect();
        let truth: FxHashMap<&str, bool> =
            self.sentences.iter().zip(&self.truth).map(|(s, &t)| (s.name.as_str(), t)).collect();
        self.active = self.query.query().active_case(|n| truth[n]).expect("validated queries end with else");
    }

    fn sentence_plan(&self, name: &str) -> Result<usize, EngineError> {
        self.sentences.iter().position(|s| s.name == name).ok_or_else(|| EngineError::UnknownSentence(name.into()))
    }

    /// Threshold shortcut, then a search over the few candidates.
    fn sentence_fast(&self, i: usize) -> bool {
        let sp = &self.sentences[i];
        if sp.s == 0 {
            return true;
        }
        let bound = (sp.s as u64).saturating_mul(ballsize(self.degree(), 2 * sp.r as usize) as u64);
        self.source_count(sp.source) > bound || self.sentence_search(i)
    }

    /// Whether `s` candidates lie pairwise farther than `2r` apart, by search.
    fn sentence_search(&self, i: usize) -> bool {
        let sp = &self.sentences[i];
        let cands = self.source_vertices(sp.source);
        let view = self.view();
        fn go(view: &View, cands: &[VertexId], from: usize, chosen: &mut Vec<VertexId>, s: usize, r2: u32) -> bool {
            if chosen.len() == s {
                return true;
            }
            for i in from..cands.len() {
                if chosen.iter().all(|&c| !view.within(c, cands[i], r2)) {
                    chosen.push(cands[i]);
                    if go(view, cands, i + 1, chosen, s, r2) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        go(&view, &cands, 0, &mut Vec::new(), sp.s as usize, 2 * sp.r)
    }

    /// Truth of a sentence.
    pub fn check_sentence(&self, name: &str) -> Result<bool, EngineError> {
        Ok(self.truth[self.sentence_plan(name)?])
    }

    /// Truth of a sentence by search alone, without the count shortcut.
    pub fn check_sentence_by_search(&self, name: &str) -> Result<bool, EngineError> {
        let i = self.sentence_plan(name)?;
        Ok(self.sentences[i].s == 0 || self.sentence_search(i))
    }

    /// Whether the query has an answer (for sentences: whether it holds).
    pub fn check(&self) -> bool {
        self.count() > 0
    }

    pub fn count(&self) -> u64 {
        self.cases[self.active]
            .iter()
            .map(|c| {
                let counts: Vec<u64> = c.leaves.iter().map(|&s| self.source_count(s)).collect();
                let n = c.decomp.evaluate(&counts).expect("every leaf has a source");
                u64::try_from(n).expect("clause counts are non-negative")
            })
            .sum()
    }

    pub fn test(&self, t: &[VertexId]) -> Result<bool, EngineError> {
        if t.len() != self.query.arity() {
            return Err(EngineError::ArityMismatch { expected: self.query.arity(), got: t.len() });
        }
        if let Some(&v) = t.iter().find(|&&v| !self.graph.contains(v)) {
            return Err(GraphError::MissingVertex(v).into());
        }
        let plans = &self.cases[self.active];
        let Some(r) = plans.first().map(|c| c.r) else {
            return Ok(false);
        };
        let view = self.view();
        let mut tau = DistanceType::new(t.len());
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                if view.within(t[i], t[j], 2 * r) {
                    tau.connect(i, j);
                }
            }
        }
        let Some(plan) = plans.iter().find(|c| c.tau == tau) else {
            return Ok(false);
        };
        Ok(plan.groups.iter().all(|g| {
            let part = &t[g.range.clone()];
            let s = &self.sources[g.source];
            match (&self.bds, s.leaf) {
                (Some(b), Some(leaf)) => b.holds(leaf, part),
                _ => self.group_list(g).contains(part),
            }
        }))
    }

    /// All answers in lexicographic order.
    pub fn answers(&self) -> Vec<Tuple> {
        let mut c = self.open_cursor();
        let mut out = Vec::new();
        while let Some(t) = self.next(&mut c).expect("fresh cursor") {
            out.push(t);
        }
        out
    }

    /// Cross-checks every maintained structure against a rebuild.
    pub fn check_invariants(&self) -> Result<(), String> {
        self.graph.check_invariants()?;
        if let Some(b) = &self.bds {
            b.check_invariants(&self.graph)?;
        }
        let fresh =
            Engine::preprocess(self.graph.clone(), self.query.clone(), self.mode).map_err(|e| e.to_string())?;
        for (i, (a, b)) in self.sources.iter().zip(&fresh.sources).enumerate() {
            let la: Option<Vec<&Tuple>> = a.list.as_ref().map(|l| l.iter().collect());
            let lb: Option<Vec<&Tuple>> = b.list.as_ref().map(|l| l.iter().collect());
            if la != lb {
                return Err(format!("solution list of source {i} is stale"));
            }
            if self.source_count(i) != fresh.source_count(i) {
                return Err(format!("count of source {i} is stale"));
            }
        }
        for (i, (a, b)) in self.skips.iter().zip(&fresh.skips).enumerate() {
            if a.index != b.index {
                return Err(format!("skip index {i} is stale"));
            }
        }
        if self.truth != fresh.truth || self.active != fresh.active {
            return Err("sentence truth values are stale".into());
        }
        Ok(())
    }
}
