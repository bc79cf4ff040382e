//! Seeded generators for graphs, update streams and queries.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::graph::{ColorSet, DegreePolicy, DynamicGraph, UpdateOp, VertexId};
use crate::query::*;

pub const PALETTE: [&str; 3] = ["Red", "Blue", "Green"];

fn random_colors(rng: &mut impl Rng, palette: &[&str], p: f64) -> ColorSet {
    palette.iter().filter(|_| rng.random_bool(p)).copied().collect()
}

/// Degree-bounded random graph from the configuration model: every vertex
/// draws up to `d` stubs, stubs are paired uniformly, and the whole pairing is
/// redrawn until it has no loop and no parallel edge. Vertices are `0..n`.
pub fn configuration_model(rng: &mut impl Rng, n: usize, d: u32, palette: &[&str], p_color: f64) -> DynamicGraph {
    let mut g = DynamicGraph::new(DegreePolicy::Bounded(d)).expect("positive degree");
    for v in 0..n {
        g.apply(&UpdateOp::AddVertex(VertexId(v as u32), random_colors(rng, palette, p_color))).expect("fresh id");
    }
    let degrees: Vec<u32> = (0..n).map(|_| rng.random_range(0..=d)).collect();
    let mut stubs: Vec<u32> = Vec::new();
    for (v, &k) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(v as u32, k as usize));
    }
    if stubs.len() % 2 == 1 {
        stubs.pop();
    }
    let mut seen = rustc_hash::FxHashSet::default();
    let pairs = loop {
        stubs.shuffle(rng);
        seen.clear();
        let simple = stubs.chunks(2).all(|c| c[0] != c[1] && seen.insert((c[0].min(c[1]), c[0].max(c[1]))));
        if simple {
            break stubs.chunks(2).map(|c| (c[0], c[1])).collect::<Vec<_>>();
        }
    };
    for (u, v) in pairs {
        g.apply(&UpdateOp::AddEdge(VertexId(u), VertexId(v))).expect("simple pairing within the cap");
    }
    g
}

/// Small random graph: `n` vertices, then random edge attempts, keeping those
/// the policy allows.
pub fn random_graph(rng: &mut impl Rng, n: usize, attempts: usize, policy: DegreePolicy) -> DynamicGraph {
    let mut g = DynamicGraph::new(policy).expect("valid policy");
    for v in 0..n {
        g.apply(&UpdateOp::AddVertex(VertexId(v as u32), random_colors(rng, &PALETTE, 0.4))).expect("fresh id");
    }
    if n >= 2 {
        for _ in 0..attempts {
            let u = rng.random_range(0..n as u32);
            let v = rng.random_range(0..n as u32);
            let _ = g.apply(&UpdateOp::AddEdge(VertexId(u), VertexId(v)));
        }
    }
    g
}

/// A random operation valid on `g` (ignoring the degree policy), or `None`
/// if the draw was impossible (e.g. an edge operation on a tiny graph).
pub fn random_op(rng: &mut impl Rng, g: &DynamicGraph, max_vertices: usize) -> Option<UpdateOp> {
    let vs = g.sorted_vertices();
    let pick = |rng: &mut dyn rand::RngCore| vs.choose(rng).copied();
    match rng.random_range(0..10) {
        0 if vs.len() < max_vertices => Some(UpdateOp::AddVertex(g.fresh_id(), random_colors(rng, &PALETTE, 0.4))),
        1 if vs.len() > 1 => pick(rng).map(UpdateOp::RemoveVertex),
        2 | 3 => pick(rng).map(|v| UpdateOp::Relabel(v, random_colors(rng, &PALETTE, 0.4))),
        4..=6 => {
            let (u, v) = (pick(rng)?, pick(rng)?);
            (u != v && !g.adjacent(u, v)).then_some(UpdateOp::AddEdge(u, v))
        }
        _ => {
            let edges = g.sorted_edges();
            edges.choose(rng).map(|&(u, v)| UpdateOp::RemoveEdge(u, v))
        }
    }
}

/// `steps` operations, each valid under the graph's policy when applied in
/// order starting from `g`.
pub fn random_stream(rng: &mut impl Rng, g: &DynamicGraph, steps: usize, max_vertices: usize) -> Vec<UpdateOp> {
    let mut shadow = g.clone();
    let mut out = Vec::with_capacity(steps);
    while out.len() < steps {
        if let Some(op) = random_op(rng, &shadow, max_vertices) {
            if shadow.apply(&op).is_ok() {
                out.push(op);
            }
        }
    }
    out
}

/// Shape limits for [`random_query`].
#[derive(Debug, Clone, Copy)]
pub struct QueryShape {
    pub k: usize,
    pub max_groups: usize,
    pub max_r: u32,
    pub sentences: usize,
    /// Quantifier nesting depth of generated formulas.
    pub depth: u32,
}

fn random_formula(rng: &mut impl Rng, scope: &mut Vec<String>, depth: u32, fresh: &mut usize) -> Local {
    let var = |rng: &mut dyn rand::RngCore, scope: &Vec<String>| scope.choose(rng).expect("nonempty scope").clone();
    let roll = if depth == 0 { rng.random_range(0..4) } else { rng.random_range(0..9) };
    match roll {
        0 => Local::Color(PALETTE.choose(rng).unwrap().to_string(), var(rng, scope)),
        1 => Local::Edge(var(rng, scope), var(rng, scope)),
        2 => Local::Eq(var(rng, scope), var(rng, scope)),
        3 => Local::DistLe(rng.random_range(0..=2), var(rng, scope), var(rng, scope)),
        4 => Local::Not(Box::new(random_formula(rng, scope, depth - 1, fresh))),
        5 | 6 => {
            let n = rng.random_range(2..=3);
            let fs = (0..n).map(|_| random_formula(rng, scope, depth - 1, fresh)).collect();
            if roll == 5 {
                Local::And(fs)
            } else {
                Local::Or(fs)
            }
        }
        _ => {
            *fresh += 1;
            let name = format!("q{fresh}");
            let count = rng.random_range(1..=2);
            let mut anchors: Vec<String> = scope.choose_multiple(rng, count).cloned().collect();
            anchors.sort();
            scope.push(name.clone());
            let body = random_formula(rng, scope, depth - 1, fresh);
            scope.pop();
            let q = Quant { var: name, radius: rng.random_range(0..=1), anchors, body: Box::new(body) };
            if roll == 7 {
                Local::Exists(q)
            } else {
                Local::Forall(q)
            }
        }
    }
}

/// A random connected distance type over `k` positions.
pub fn random_connected_type(rng: &mut impl Rng, k: usize) -> DistanceType {
    let mut t = DistanceType::new(k);
    for j in 1..k {
        t.connect(rng.random_range(0..j), j);
    }
    for i in 0..k {
        for j in i + 1..k {
            if rng.random_bool(0.3) {
                t.connect(i, j);
            }
        }
    }
    t
}

fn random_clause(rng: &mut impl Rng, vars: &[Var], r: u32, shape: &QueryShape, fresh: &mut usize) -> Clause {
    let k = vars.len();
    // Random composition of k into at most max_groups parts.
    let mut cuts: Vec<usize> = (1..k).filter(|_| rng.random_bool(0.5)).collect();
    cuts.shuffle(rng);
    cuts.truncate(shape.max_groups.saturating_sub(1));
    cuts.sort_unstable();
    let mut bounds = vec![0];
    bounds.extend(cuts);
    bounds.push(k);
    let mut tau = DistanceType::new(k);
    let mut groups = Vec::new();
    for w in bounds.windows(2).filter(|w| w[1] > w[0]) {
        let gvars: Vec<Var> = vars[w[0]..w[1]].to_vec();
        let local = random_connected_type(rng, gvars.len());
        for &(i, j) in &local.edges {
            tau.connect(w[0] + i, w[0] + j);
        }
        let mut scope = gvars.clone();
        let formula = random_formula(rng, &mut scope, shape.depth, fresh);
        let reach = formula.reach();
        let radius = if reach <= r && rng.random_bool(0.5) { None } else { Some(reach + rng.random_range(0..=1)) };
        groups.push(Group { vars: gvars, formula, radius });
    }
    Clause { r, groups, tau }
}

/// A random query that passes validation.
pub fn random_query(rng: &mut impl Rng, shape: &QueryShape) -> NormalizedQuery {
    let vars: Vec<Var> = (1..=shape.k).map(|i| format!("x{i}")).collect();
    let mut fresh = 0;
    let mut sentences = Vec::new();
    for i in 0..shape.sentences {
        let mut scope = vec!["z".to_string()];
        let alpha = random_formula(rng, &mut scope, shape.depth.min(1), &mut fresh);
        let r = alpha.reach().max(rng.random_range(0..=shape.max_r));
        let alpha = if alpha.free_vars().len() == 1 { alpha } else { Local::Color("Red".into(), "z".into()) };
        sentences.push(ScatteredSentence { name: format!("S{i}"), s: rng.random_range(0..=3), r, alpha });
    }
    let names: Vec<String> = sentences.iter().map(|s| s.name.clone()).collect();
    let n_cases = if names.is_empty() { 1 } else { rng.random_range(1..=2) };
    let mut cases = Vec::new();
    for c in 0..n_cases {
        let guard = (c + 1 < n_cases).then(|| {
            let a = Guard::Name(names.choose(rng).unwrap().clone());
            match rng.random_range(0..3) {
                0 => a,
                1 => Guard::Not(Box::new(a)),
                _ => Guard::Or(vec![a, Guard::Name(names.choose(rng).unwrap().clone())]),
            }
        });
        let r = rng.random_range(0..=shape.max_r);
        let mut clauses: Vec<Clause> = Vec::new();
        let n_clauses = if shape.k == 0 { rng.random_range(0..=1) } else { rng.random_range(1..=2) };
        for _ in 0..n_clauses {
            let cl = random_clause(rng, &vars, r, shape, &mut fresh);
            if !clauses.iter().any(|o| o.tau == cl.tau) {
                clauses.push(cl);
            }
        }
        cases.push(Case { guard, clauses });
    }
    validate(Query { vars, sentences, cases }).expect("generated queries are valid")
}
