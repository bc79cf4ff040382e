//! Read access shared by the host graph and the small canonical type graphs,
//! and local formulas compiled against it.

use rustc_hash::FxHashSet;
use smallvec::SmallVec;

use crate::graph::{ColorId, DynamicGraph, VertexId};
use crate::query::{Local, Var};

/// A tuple of vertices.
pub type Tuple = SmallVec<[VertexId; 4]>;

pub trait Structure {
    /// Neighbors of `v`; empty for unknown vertices.
    fn neighbors(&self, v: VertexId) -> &[VertexId];

    fn has_color(&self, v: VertexId, c: ColorId) -> bool;

    fn adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).contains(&v)
    }

    /// Vertices within distance `n` of `v`, in BFS order with `v` first.
    fn ball(&self, v: VertexId, n: u32) -> Vec<VertexId> {
        let mut seen = FxHashSet::default();
        seen.insert(v);
        let mut layer = vec![v];
        let mut out = vec![v];
        for _ in 0..n {
            let mut next = Vec::new();
            for &u in &layer {
                for &w in self.neighbors(u) {
                    if seen.insert(w) {
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.extend_from_slice(&next);
            layer = next;
        }
        out
    }

    /// Whether `dist(u, v) <= n`.
    fn within(&self, u: VertexId, v: VertexId, n: u32) -> bool {
        u == v || self.ball(u, n).contains(&v)
    }
}

impl Structure for DynamicGraph {
    fn neighbors(&self, v: VertexId) -> &[VertexId] {
        DynamicGraph::neighbors(self, v).unwrap_or_default()
    }

    fn has_color(&self, v: VertexId, c: ColorId) -> bool {
        DynamicGraph::has_color(self, v, c)
    }

    fn adjacent(&self, u: VertexId, v: VertexId) -> bool {
        DynamicGraph::adjacent(self, u, v)
    }

    fn within(&self, u: VertexId, v: VertexId, n: u32) -> bool {
        self.distance_leq(u, v, n as usize).unwrap_or(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Op {
    False,
    Eq(usize, usize),
    Edge(usize, usize),
    Color(ColorId, usize),
    DistLe(u32, usize, usize),
    Not(Box<Op>),
    And(Vec<Op>),
    Or(Vec<Op>),
    Quant { exists: bool, slot: usize, radius: u32, anchors: Vec<usize>, body: Box<Op> },
}

/// A local formula with variables resolved to slots and colors to ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Compiled {
    op: Op,
    slots: usize,
}

impl Compiled {
    /// `free` fixes the slot order of the free variables. Colors unknown to
    /// `color` compile to false.
    pub fn new(f: &Local, free: &[Var], color: &impl Fn(&str) -> Option<ColorId>) -> Compiled {
        let mut scope: Vec<&str> = free.iter().map(String::as_str).collect();
        let mut slots = scope.len();
        let op = compile(f, &mut scope, &mut slots, color);
        Compiled { op, slots }
    }

    /// Evaluates with `free` assigned to the free-variable slots in order.
    pub fn eval<S: Structure + ?Sized>(&self, s: &S, free: &[VertexId]) -> bool {
        let mut env: SmallVec<[VertexId; 8]> = SmallVec::from_elem(VertexId(0), self.slots);
        env[..free.len()].copy_from_slice(free);
        run(&self.op, s, &mut env)
    }
}

fn compile<'a>(
    f: &'a Local,
    scope: &mut Vec<&'a str>,
    slots: &mut usize,
    color: &impl Fn(&str) -> Option<ColorId>,
) -> Op {
    let slot = |scope: &Vec<&str>, v: &str| scope.iter().rposition(|s| *s == v).expect("validated scope");
    match f {
        Local::Eq(a, b) => Op::Eq(slot(scope, a), slot(scope, b)),
        Local::Edge(a, b) => Op::Edge(slot(scope, a), slot(scope, b)),
        Local::Color(c, a) => match color(c) {
            Some(id) => Op::Color(id, slot(scope, a)),
            None => Op::False,
        },
        Local::DistLe(n, a, b) => Op::DistLe(*n, slot(scope, a), slot(scope, b)),
        Local::Not(g) => Op::Not(Box::new(compile(g, scope, slots, color))),
        Local::And(gs) => Op::And(gs.iter().map(|g| compile(g, scope, slots, color)).collect()),
        Local::Or(gs) => Op::Or(gs.iter().map(|g| compile(g, scope, slots, color)).collect()),
        Local::Exists(q) | Local::Forall(q) => {
            let anchors = q.anchors.iter().map(|a| slot(scope, a)).collect();
            // Slots are positions in `scope`; a quantifier's slot is its depth.
            scope.push(&q.var);
            let own = scope.len() - 1;
            *slots = (*slots).max(scope.len());
            let body = compile(&q.body, scope, slots, color);
            scope.pop();
            Op::Quant { exists: matches!(f, Local::Exists(_)), slot: own, radius: q.radius, anchors, body: Box::new(body) }
        }
    }
}

fn run<S: Structure + ?Sized>(op: &Op, s: &S, env: &mut SmallVec<[VertexId; 8]>) -> bool {
    match op {
        Op::False => false,
        Op::Eq(a, b) => env[*a] == env[*b],
        Op::Edge(a, b) => s.adjacent(env[*a], env[*b]),
        Op::Color(c, a) => s.has_color(env[*a], *c),
        Op::DistLe(n, a, b) => s.within(env[*a], env[*b], *n),
        Op::Not(g) => !run(g, s, env),
        Op::And(gs) => gs.iter().all(|g| run(g, s, env)),
        Op::Or(gs) => gs.iter().any(|g| run(g, s, env)),
        Op::Quant { exists, slot, radius, anchors, body } => {
            let domain: Vec<VertexId> = if anchors.len() == 1 {
                s.ball(env[anchors[0]], *radius)
            } else {
                let mut seen = FxHashSet::default();
                anchors.iter().flat_map(|&a| s.ball(env[a], *radius)).filter(|v| seen.insert(*v)).collect()
            };
            for w in domain {
                env[*slot] = w;
                if run(body, s, env) == *exists {
                    return *exists;
                }
            }
            !*exists
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{eval_local, Assignment};
    use crate::graph::text::parse_graph;
    use crate::graph::DegreePolicy;
    use crate::query::parse_query;

    #[test]
    fn compiled_agrees_with_reference() {
        let g = parse_graph("v 1 Red\nv 2 Blue\nv 3\nv 4 Red\nv 5\ne 1 2\ne 2 3\ne 3 4\ne 4 5\n", DegreePolicy::Bounded(3))
            .unwrap();
        let formulas = [
            "(exists (z 1 (anchors x)) (and (edge x z) (color Red z)))",
            "(forall (z 2 (anchors x y)) (or (color Red z) (not (distle 1 z y))))",
            "(exists (z 1 (anchors x)) (exists (w 1 (anchors z)) (and (color Blue w) (not (= w y)))))",
            "(and (color Green x) (= x y))",
            "(distle 2 x y)",
        ];
        for text in formulas {
            let q = parse_query(&format!("(query (vars x y) (case else (clause 9 (group (x y) {text}) (tau (1 2)))))"))
                .unwrap();
            let f = &q.cases[0].clauses[0].groups[0].formula;
            let c = Compiled::new(f, &q.vars, &|n| g.color_id(n));
            for x in g.vertices() {
                for y in g.vertices() {
                    let sigma = Assignment::from([("x".to_string(), x), ("y".to_string(), y)]);
                    assert_eq!(c.eval(&g, &[x, y]), eval_local(&g, f, &sigma, 9).unwrap(), "{text} at {x},{y}");
                }
            }
        }
    }
}
