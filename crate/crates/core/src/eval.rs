//! Reference semantics by brute force.
//!
//! Nothing here shares code with the engine beyond the query AST and graph
//! accessors: distances come from fresh BFS and every answer is found by
//! exhaustive search.

use std::collections::{HashMap, VecDeque};

use rustc_hash::{FxHashMap, FxHashSet};

use crate::graph::{DynamicGraph, GraphError, VertexId};
use crate::query::{DistanceType, Local, NormalizedQuery, ScatteredSentence, Var};

/// Total map from a formula's free variables to vertices.
pub type Assignment = HashMap<Var, VertexId>;

/// Source of exact bounded distances.
pub trait Distances {
    fn graph(&self) -> &DynamicGraph;
    /// Whether `dist(a, b) <= n`.
    fn within(&self, a: VertexId, b: VertexId, n: u32) -> bool;
    /// Vertices within distance `n` of `a`.
    fn ball(&self, a: VertexId, n: u32) -> Vec<VertexId>;
}

fn bfs(g: &DynamicGraph, a: VertexId, limit: Option<u32>) -> FxHashMap<VertexId, u32> {
    let mut dist = FxHashMap::default();
    dist.insert(a, 0);
    let mut queue = VecDeque::from([a]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        if limit.is_some_and(|l| d >= l) {
            continue;
        }
        for &w in g.neighbors(u).unwrap_or_default() {
            dist.entry(w).or_insert_with(|| {
                queue.push_back(w);
                d + 1
            });
        }
    }
    dist
}

/// Runs a bounded BFS for every question.
pub struct FreshBfs<'g>(pub &'g DynamicGraph);

impl Distances for FreshBfs<'_> {
    fn graph(&self) -> &DynamicGraph {
        self.0
    }

    fn within(&self, a: VertexId, b: VertexId, n: u32) -> bool {
        bfs(self.0, a, Some(n)).contains_key(&b)
    }

    fn ball(&self, a: VertexId, n: u32) -> Vec<VertexId> {
        bfs(self.0, a, Some(n)).into_keys().collect()
    }
}

/// All-pairs distances of one graph snapshot, from one BFS per vertex.
pub struct AllPairs<'g> {
    g: &'g DynamicGraph,
    dist: FxHashMap<VertexId, FxHashMap<VertexId, u32>>,
}

impl<'g> AllPairs<'g> {
    pub fn new(g: &'g DynamicGraph) -> Self {
        let dist = g.vertices().map(|v| (v, bfs(g, v, None))).collect();
        AllPairs { g, dist }
    }

    pub fn distance(&self, a: VertexId, b: VertexId) -> Option<u32> {
        self.dist.get(&a)?.get(&b).copied()
    }
}

impl Distances for AllPairs<'_> {
    fn graph(&self) -> &DynamicGraph {
        self.g
    }

    fn within(&self, a: VertexId, b: VertexId, n: u32) -> bool {
        self.distance(a, b).is_some_and(|d| d <= n)
    }

    fn ball(&self, a: VertexId, n: u32) -> Vec<VertexId> {
        self.dist.get(&a).map(|m| m.iter().filter(|(_, &d)| d <= n).map(|(&v, _)| v).collect()).unwrap_or_default()
    }
}

/// Relativized evaluation. Quantifier domains are additionally cut down to
/// the `radius`-ball around the assigned values, which changes nothing when
/// the formula's reach is at most `radius`.
pub fn eval_local(g: &DynamicGraph, phi: &Local, sigma: &Assignment, radius: u32) -> Result<bool, GraphError> {
    eval_local_with(&FreshBfs(g), phi, sigma, Some(radius))
}

pub fn eval_local_with(
    dist: &impl Distances,
    phi: &Local,
    sigma: &Assignment,
    radius: Option<u32>,
) -> Result<bool, GraphError> {
    for v in phi.free_vars() {
        match sigma.get(&v) {
            Some(&a) if dist.graph().contains(a) => {}
            Some(&a) => return Err(GraphError::MissingVertex(a)),
            None => panic!("assignment misses free variable `{v}`"),
        }
    }
    let region: Option<FxHashSet<VertexId>> =
        radius.map(|r| sigma.values().flat_map(|&a| dist.ball(a, r)).collect());
    let mut env: Vec<(&str, VertexId)> = sigma.iter().map(|(k, &v)| (k.as_str(), v)).collect();
    Ok(eval(dist, phi, &mut env, region.as_ref()))
}

fn lookup(env: &[(&str, VertexId)], v: &str) -> VertexId {
    env.iter().rev().find(|(k, _)| *k == v).map(|&(_, a)| a).expect("scoped variable")
}

fn eval<'a>(
    dist: &impl Distances,
    phi: &'a Local,
    env: &mut Vec<(&'a str, VertexId)>,
    region: Option<&FxHashSet<VertexId>>,
) -> bool {
    let g = dist.graph();
    match phi {
        Local::Eq(a, b) => lookup(env, a) == lookup(env, b),
        Local::Edge(a, b) => g.neighbors(lookup(env, a)).is_ok_and(|n| n.contains(&lookup(env, b))),
        Local::Color(c, a) => g.color_id(c).is_some_and(|id| g.has_color(lookup(env, a), id)),
        Local::DistLe(n, a, b) => dist.within(lookup(env, a), lookup(env, b), *n),
        Local::Not(f) => !eval(dist, f, env, region),
        Local::And(fs) => fs.iter().all(|f| eval(dist, f, env, region)),
        Local::Or(fs) => fs.iter().any(|f| eval(dist, f, env, region)),
        Local::Exists(q) | Local::Forall(q) => {
            let mut domain: Vec<VertexId> =
                q.anchors.iter().flat_map(|a| dist.ball(lookup(env, a), q.radius)).collect();
            domain.sort_unstable();
            domain.dedup();
            if let Some(region) = region {
                domain.retain(|v| region.contains(v));
            }
            let exists = matches!(phi, Local::Exists(_));
            let mut found = false;
            for w in domain {
                env.push((q.var.as_str(), w));
                let holds = eval(dist, &q.body, env, region);
                env.pop();
                if holds == exists {
                    found = true;
                    break;
                }
            }
            if exists {
                found
            } else {
                !found
            }
        }
    }
}

/// Whether the tuple has exactly the distance type `tau` at threshold `2r`.
pub fn eval_delta(g: &DynamicGraph, tau: &DistanceType, r: u32, tuple: &[VertexId]) -> Result<bool, GraphError> {
    if let Some(&a) = tuple.iter().find(|&&a| !g.contains(a)) {
        return Err(GraphError::MissingVertex(a));
    }
    Ok(delta_with(&FreshBfs(g), tau, r, tuple))
}

fn delta_with(dist: &impl Distances, tau: &DistanceType, r: u32, tuple: &[VertexId]) -> bool {
    assert_eq!(tuple.len(), tau.k, "tuple arity differs from the distance type");
    (0..tuple.len())
        .all(|i| (i + 1..tuple.len()).all(|j| dist.within(tuple[i], tuple[j], 2 * r) == tau.contains(i, j)))
}

/// Whether `s` vertices satisfying the sentence's formula lie pairwise at
/// distance more than `2r`.
pub fn oracle_sentence(dist: &impl Distances, s: &ScatteredSentence) -> bool {
    let var = s.var();
    let mut sat: Vec<VertexId> = dist
        .graph()
        .vertices()
        .filter(|&a| {
            let sigma = Assignment::from([(var.clone(), a)]);
            eval_local_with(dist, &s.alpha, &sigma, None).expect("live vertex")
        })
        .collect();
    sat.sort_unstable();
    fn search(dist: &impl Distances, cand: &[VertexId], chosen: &mut Vec<VertexId>, need: usize, r: u32) -> bool {
        if chosen.len() == need {
            return true;
        }
        for (i, &a) in cand.iter().enumerate() {
            if chosen.iter().all(|&b| !dist.within(a, b, 2 * r)) {
                chosen.push(a);
                if search(dist, &cand[i + 1..], chosen, need, r) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    search(dist, &sat, &mut Vec::new(), s.s as usize, s.r)
}

/// Index of the case selected by the sentences' truth values.
pub fn oracle_case(dist: &impl Distances, q: &NormalizedQuery) -> usize {
    let truth: HashMap<&str, bool> =
        q.query().sentences.iter().map(|s| (s.name.as_str(), oracle_sentence(dist, s))).collect();
    q.query().active_case(|n| truth[n]).expect("validated queries end with else")
}

/// Whether the tuple satisfies the given clause of the given case.
pub fn oracle_clause_holds(dist: &impl Distances, q: &NormalizedQuery, case: usize, clause: usize, t: &[VertexId]) -> bool {
    let cl = &q.query().cases[case].clauses[clause];
    if !delta_with(dist, &cl.tau, cl.r, t) {
        return false;
    }
    cl.groups.iter().enumerate().all(|(gi, g)| {
        let range = q.info(case, clause).group_range(gi);
        let sigma: Assignment = g.vars.iter().cloned().zip(t[range].iter().copied()).collect();
        eval_local_with(dist, &g.formula, &sigma, Some(cl.group_radius(gi))).expect("live tuple")
    })
}

/// Every tuple over `vertices` of length `k`, in lexicographic order.
pub fn all_tuples(vertices: &[VertexId], k: usize) -> Vec<Vec<VertexId>> {
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                sorted.iter().map(move |&v| {
                    let mut t2 = t.clone();
                    t2.push(v);
                    t2
                })
            })
            .collect();
    }
    out
}

/// Sorted, duplicate-free answer set of the query.
pub fn oracle_answers(g: &DynamicGraph, q: &NormalizedQuery) -> Vec<Vec<VertexId>> {
    oracle_answers_with(&AllPairs::new(g), q)
}

pub fn oracle_answers_with(dist: &impl Distances, q: &NormalizedQuery) -> Vec<Vec<VertexId>> {
    let case = oracle_case(dist, q);
    let vertices: Vec<VertexId> = dist.graph().vertices().collect();
    let n_clauses = q.query().cases[case].clauses.len();
    all_tuples(&vertices, q.arity())
        .into_iter()
        .filter(|t| (0..n_clauses).any(|c| oracle_clause_holds(dist, q, case, c, t)))
        .collect()
}
