//! Centered queries and their incrementally maintained solution lists.
//!
//! A centered query conjoins one or more group formulas over consecutive
//! blocks of its variables with a connected exact distance type at threshold
//! `2r`. All elements of a solution therefore lie within `2r(m-1)` of its
//! first element, and membership of a tuple is decided inside the ball of
//! radius [`CenteredQuery::radius`] around that element.

use std::collections::HashMap;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::graph::{ColorId, DynamicGraph, UpdateOp, VertexId};
use crate::query::{Clause, DistanceType, Local, ScatteredSentence, Var};
use crate::skiplist::CenteredTupleList;
use crate::structure::{Compiled, Structure, Tuple};

/// One group formula over a block of the query's variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Part {
    pub vars: Vec<Var>,
    pub formula: Local,
    pub radius: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CenteredQuery {
    pub parts: Vec<Part>,
    /// Connected exact distance type over the concatenated part variables.
    pub tau: DistanceType,
    pub r: u32,
}

impl CenteredQuery {
    /// The single-group query of group `g` of a clause.
    pub fn from_group(clause: &Clause, g: usize, offset: usize) -> Self {
        let group = &clause.groups[g];
        let positions: Vec<usize> = (offset..offset + group.vars.len()).collect();
        CenteredQuery {
            parts: vec![Part { vars: group.vars.clone(), formula: group.formula.clone(), radius: clause.group_radius(g) }],
            tau: clause.tau.restrict(&positions),
            r: clause.r,
        }
    }

    /// The unary query of a scattered sentence's formula.
    pub fn from_sentence(s: &ScatteredSentence) -> Self {
        CenteredQuery {
            parts: vec![Part { vars: vec![s.var()], formula: s.alpha.clone(), radius: s.r }],
            tau: DistanceType::new(1),
            r: s.r,
        }
    }

    pub fn arity(&self) -> usize {
        self.tau.k
    }

    /// Renames each part's variables to `$0, $1, ...`, so that queries equal
    /// up to variable names compare equal.
    pub fn normalized(mut self) -> Self {
        for part in &mut self.parts {
            let names: Vec<Var> = (0..part.vars.len()).map(|i| format!("${i}")).collect();
            let map: HashMap<Var, Var> = part.vars.iter().cloned().zip(names.iter().cloned()).collect();
            part.formula = part.formula.rename_free(&map);
            part.vars = names;
        }
        self
    }

    /// Bound on the distance from the first element to any other.
    pub fn spread(&self) -> u32 {
        2 * self.r * (self.arity().saturating_sub(1) as u32)
    }

    /// Radius around the first element that decides membership.
    pub fn radius(&self) -> u32 {
        let local = self.parts.iter().map(|p| p.radius).max().unwrap_or(0);
        let tau = if self.arity() > 1 { 2 * self.r } else { 0 };
        self.spread() + local.max(tau)
    }

    pub fn compile(&self, color: &impl Fn(&str) -> Option<ColorId>) -> CompiledCentered {
        let mut offset = 0;
        let parts = self
            .parts
            .iter()
            .map(|p| {
                let c = (offset, p.vars.len(), Compiled::new(&p.formula, &p.vars, color));
                offset += p.vars.len();
                c
            })
            .collect();
        // For each position, an earlier position it must be close to.
        let link = (0..self.arity()).map(|j| (0..j).find(|&i| self.tau.contains(i, j))).collect();
        CompiledCentered { parts, tau: self.tau.clone(), r: self.r, spread: self.spread(), link }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledCentered {
    parts: Vec<(usize, usize, Compiled)>,
    tau: DistanceType,
    r: u32,
    spread: u32,
    link: Vec<Option<usize>>,
}

impl CompiledCentered {
    pub fn arity(&self) -> usize {
        self.tau.k
    }

    /// Whether `t` is a solution.
    pub fn holds<S: Structure + ?Sized>(&self, s: &S, t: &[VertexId]) -> bool {
        debug_assert_eq!(t.len(), self.arity());
        let k = t.len();
        let types_ok =
            (0..k).all(|i| (i + 1..k).all(|j| s.within(t[i], t[j], 2 * self.r) == self.tau.contains(i, j)));
        types_ok && self.parts.iter().all(|(off, len, f)| f.eval(s, &t[*off..off + len]))
    }

    /// All solutions whose first element is `a`, sorted.
    pub fn solutions_at<S: Structure + ?Sized>(&self, s: &S, a: VertexId) -> Vec<Tuple> {
        let mut out = Vec::new();
        let k = self.arity();
        if k == 1 {
            if self.parts.iter().all(|(_, _, f)| f.eval(s, &[a])) {
                out.push(SmallVec::from_slice(&[a]));
            }
            return out;
        }
        let mut region = s.ball(a, self.spread);
        region.sort_unstable();
        let mut close: FxHashMap<VertexId, Vec<VertexId>> = FxHashMap::default();
        let mut t: Tuple = SmallVec::from_slice(&[a]);
        self.extend(s, &region, &mut close, &mut t, &mut out);
        out
    }

    fn extend<S: Structure + ?Sized>(
        &self,
        s: &S,
        region: &[VertexId],
        close: &mut FxHashMap<VertexId, Vec<VertexId>>,
        t: &mut Tuple,
        out: &mut Vec<Tuple>,
    ) {
        let j = t.len();
        if j == self.arity() {
            if self.parts.iter().all(|(off, len, f)| f.eval(s, &t[*off..off + len])) {
                out.push(t.clone());
            }
            return;
        }
        let ball2r = |v: VertexId| {
            let mut b = s.ball(v, 2 * self.r);
            b.sort_unstable();
            b
        };
        for &v in t.iter() {
            close.entry(v).or_insert_with(|| ball2r(v));
        }
        let candidates = match self.link[j] {
            Some(i) => close[&t[i]].clone(),
            None => region.to_vec(),
        };
        for c in candidates {
            let ok = (0..j).all(|i| close[&t[i]].binary_search(&c).is_ok() == self.tau.contains(i, j));
            if !ok {
                continue;
            }
            t.push(c);
            // Prune as soon as a part is complete.
            let part_ok = self.parts.iter().all(|(off, len, f)| off + len != j + 1 || f.eval(s, &t[*off..off + len]));
            if part_ok {
                self.extend(s, region, close, t, out);
            }
            t.pop();
        }
    }
}

/// The sorted solution list of one centered query on the host graph.
#[derive(Debug, Clone)]
pub struct CenteredIndex {
    query: CenteredQuery,
    compiled: CompiledCentered,
    list: CenteredTupleList,
}

/// Tuples that left and entered a solution list in one update.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ListDelta {
    pub removed: Vec<Tuple>,
    pub inserted: Vec<Tuple>,
}

impl ListDelta {
    pub fn is_empty(&self) -> bool {
        self.removed.is_empty() && self.inserted.is_empty()
    }
}

impl CenteredIndex {
    fn empty(q: &CenteredQuery, g: &DynamicGraph) -> Self {
        CenteredIndex { query: q.clone(), compiled: q.compile(&|n| g.color_id(n)), list: CenteredTupleList::new() }
    }

    /// Builds by replaying `g` from the empty graph: vertices first, then
    /// edges, each step going through [`CenteredIndex::on_update`]. Colors
    /// the query names must already be interned in `g`.
    pub fn build(g: &DynamicGraph, q: &CenteredQuery) -> Self {
        let mut replay = g.empty_like();
        let mut idx = Self::empty(q, g);
        let step = |op: UpdateOp, replay: &mut DynamicGraph, idx: &mut Self| {
            let anchors = replay.impacted(&op, idx.query.radius() as usize).expect("replayed op is valid");
            replay.apply(&op).expect("replayed op is valid");
            idx.on_update(replay, &anchors);
        };
        for v in g.sorted_vertices() {
            step(UpdateOp::AddVertex(v, g.colors(v).expect("live")), &mut replay, &mut idx);
        }
        for (u, v) in g.sorted_edges() {
            step(UpdateOp::AddEdge(u, v), &mut replay, &mut idx);
        }
        idx
    }

    /// Builds by evaluating at every vertex.
    pub fn build_direct(g: &DynamicGraph, q: &CenteredQuery) -> Self {
        let mut idx = Self::empty(q, g);
        for v in g.vertices() {
            for t in idx.compiled.solutions_at(g, v) {
                idx.list.insert(t);
            }
        }
        idx
    }

    pub fn query(&self) -> &CenteredQuery {
        &self.query
    }

    pub fn compiled(&self) -> &CompiledCentered {
        &self.compiled
    }

    pub fn list(&self) -> &CenteredTupleList {
        &self.list
    }

    pub fn count(&self) -> usize {
        self.list.len()
    }

    /// Re-derives the solutions anchored at `anchors` on the updated graph
    /// `g`. `anchors` must cover every vertex within [`CenteredQuery::radius`]
    /// of the update.
    pub fn on_update(&mut self, g: &DynamicGraph, anchors: &[VertexId]) -> ListDelta {
        let mut delta = ListDelta::default();
        for &a in anchors {
            let old: Vec<Tuple> = self.list.anchored_at(a).cloned().collect();
            let new = if g.contains(a) { self.compiled.solutions_at(g, a) } else { Vec::new() };
            for t in &old {
                if new.binary_search(t).is_err() {
                    delta.removed.push(t.clone());
                }
            }
            for t in new {
                if old.binary_search(&t).is_err() {
                    delta.inserted.push(t);
                }
            }
        }
        for t in &delta.removed {
            self.list.remove(t);
        }
        for t in &delta.inserted {
            self.list.insert(t.clone());
        }
        delta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::text::parse_graph;
    use crate::graph::{ColorSet, DegreePolicy};
    use crate::query::parse_query;

    fn p4() -> DynamicGraph {
        parse_graph("v 1 Red\nv 2 Blue\nv 3\nv 4 Red\ne 1 2\ne 2 3\ne 3 4\n", DegreePolicy::Bounded(3)).unwrap()
    }

    fn group(text: &str) -> CenteredQuery {
        let q = parse_query(text).unwrap();
        CenteredQuery::from_group(&q.cases[0].clauses[0], 0, 0)
    }

    fn ids(list: &CenteredTupleList) -> Vec<Vec<u32>> {
        list.iter().map(|t| t.iter().map(|v| v.0).collect()).collect()
    }

    fn apply(idx: &mut CenteredIndex, g: &mut DynamicGraph, op: UpdateOp) -> ListDelta {
        let anchors = g.impacted(&op, idx.query().radius() as usize).unwrap();
        g.apply(&op).unwrap();
        idx.on_update(g, &anchors)
    }

    #[test]
    fn unary_red() {
        let mut g = p4();
        let q = group("(query (vars x) (case else (clause 1 (group (x) (color Red x)) (tau))))");
        let mut idx = CenteredIndex::build(&g, &q);
        assert_eq!(ids(idx.list()), vec![vec![1], vec![4]]);
        assert_eq!(idx.count(), 2);
        let delta = apply(&mut idx, &mut g, UpdateOp::Relabel(VertexId(2), ["Red", "Blue"].into_iter().collect()));
        assert_eq!(delta.inserted.len(), 1);
        assert_eq!(ids(idx.list()), vec![vec![1], vec![2], vec![4]]);
        g.apply(&UpdateOp::AddVertex(VertexId(9), ColorSet::new())).unwrap();
        let delta = apply(&mut idx, &mut g, UpdateOp::RemoveVertex(VertexId(9)));
        assert!(delta.is_empty());
        let empty = DynamicGraph::new(DegreePolicy::Bounded(3)).unwrap();
        assert_eq!(CenteredIndex::build(&empty, &q).count(), 0);
    }

    #[test]
    fn binary_edges() {
        let mut g = p4();
        let q = group("(query (vars x y) (case else (clause 1 (group (x y) (edge x y)) (tau (1 2)))))");
        let mut idx = CenteredIndex::build(&g, &q);
        let want = vec![vec![1, 2], vec![2, 1], vec![2, 3], vec![3, 2], vec![3, 4], vec![4, 3]];
        assert_eq!(ids(idx.list()), want);
        assert_eq!(ids(CenteredIndex::build_direct(&g, &q).list()), want);
        apply(&mut idx, &mut g, UpdateOp::RemoveEdge(VertexId(2), VertexId(3)));
        assert_eq!(ids(idx.list()), vec![vec![1, 2], vec![2, 1], vec![3, 4], vec![4, 3]]);
        assert_eq!(idx.count(), 4);
    }
}
