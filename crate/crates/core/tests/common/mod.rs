//! Brute-force counters and the random-instance harness shared by the
//! integration suites: both engine modes run the same update stream and are
//! compared against brute force after every update.

#![allow(dead_code)]

pub mod canon;
pub mod skip;

use dyncade_core::centered::CenteredQuery;
use dyncade_core::engine::{Engine, EngineMode};
use dyncade_core::eval::{
    all_tuples, eval_local_with, oracle_answers_with, oracle_clause_holds, oracle_sentence, AllPairs, Assignment,
    Distances,
};
use dyncade_core::gen::{random_graph, random_query, random_stream, QueryShape};
use dyncade_core::graph::{ballsize, DegreePolicy, DynamicGraph, VertexId};
use dyncade_core::query::NormalizedQuery;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEGREE: u32 = 3;

/// Sorted solutions of a centered query, by evaluating every tuple with the
/// reference evaluator.
pub fn oracle_leaf_list(dist: &AllPairs, q: &CenteredQuery) -> Vec<Vec<VertexId>> {
    let mut vs: Vec<VertexId> = dist.graph().vertices().collect();
    vs.sort_unstable();
    let k = q.arity();
    all_tuples(&vs, k)
        .into_iter()
        .filter(|t| {
            let typed = (0..k).all(|i| (i + 1..k).all(|j| dist.within(t[i], t[j], 2 * q.r) == q.tau.contains(i, j)));
            let mut off = 0;
            typed
                && q.parts.iter().all(|p| {
                    let sigma: Assignment = p.vars.iter().cloned().zip(t[off..off + p.vars.len()].iter().copied()).collect();
                    off += p.vars.len();
                    eval_local_with(dist, &p.formula, &sigma, Some(p.radius)).unwrap()
                })
        })
        .collect()
}

pub fn oracle_leaf(dist: &AllPairs, q: &CenteredQuery) -> u64 {
    oracle_leaf_list(dist, q).len() as u64
}

pub fn oracle_clause(dist: &AllPairs, q: &NormalizedQuery, case: usize, clause: usize) -> u64 {
    let vs: Vec<VertexId> = dist.graph().vertices().collect();
    all_tuples(&vs, q.arity()).into_iter().filter(|t| oracle_clause_holds(dist, q, case, clause, t)).count() as u64
}

#[derive(Debug, Default, Clone)]
pub struct Tally {
    pub instances: usize,
    pub updates: usize,
    pub tuples_tested: usize,
    pub answers_seen: usize,
    /// Sentence evaluations where the count exceeded `s * ballsize(d, 2r)`.
    pub pigeonhole_hits: usize,
    /// Instances with at least one such evaluation.
    pub pigeonhole_instances: usize,
    /// Steps at which the type classes were checked to partition the vertices.
    pub partition_checks: usize,
}

impl Tally {
    pub fn add(&mut self, o: &Tally) {
        self.instances += o.instances;
        self.updates += o.updates;
        self.tuples_tested += o.tuples_tested;
        self.answers_seen += o.answers_seen;
        self.pigeonhole_hits += o.pigeonhole_hits;
        self.pigeonhole_instances += o.pigeonhole_instances;
        self.partition_checks += o.partition_checks;
    }
}

/// A random instance: query shape and graph size are drawn from the seed.
/// All-tuple testing costs `n^k` per step, so ternary queries get at most 16
/// vertices.
pub fn instance(seed: u64) -> (DynamicGraph, NormalizedQuery, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = [0, 1, 1, 2, 2, 2, 3, 3][rng.random_range(0..8)];
    let shape = QueryShape {
        k,
        max_groups: 3,
        max_r: 2,
        sentences: rng.random_range(1..=2),
        depth: rng.random_range(1..=2),
    };
    let q = random_query(&mut rng, &shape);
    let cap = if k == 3 { 16 } else { 40 };
    let n = rng.random_range(4..=cap);
    let g = random_graph(&mut rng, n, n + n / 2, DegreePolicy::Bounded(DEGREE));
    (g, q, cap)
}

fn fail(seed: u64, step: usize, q: &NormalizedQuery, what: String) -> String {
    format!("seed {seed}, step {step}: {what}\nquery: {}", q.query())
}

/// Compares one engine with the brute-force answers on the current graph.
fn compare(
    e: &Engine,
    dist: &AllPairs,
    oracle: &[Vec<VertexId>],
    vertices: &[VertexId],
    tally: &mut Tally,
) -> Result<(), String> {
    let mode = e.mode();
    let q = e.query();
    if e.count() != oracle.len() as u64 {
        return Err(format!("{mode:?} count {} != oracle {}", e.count(), oracle.len()));
    }
    if e.check() != !oracle.is_empty() {
        return Err(format!("{mode:?} check {}", e.check()));
    }
    let got = e.answers();
    if got.len() != oracle.len() || got.iter().zip(oracle).any(|(a, b)| a.as_slice() != b.as_slice()) {
        return Err(format!("{mode:?} enumeration {got:?} != oracle {oracle:?}"));
    }
    for t in all_tuples(vertices, q.arity()) {
        let want = oracle.binary_search(&t).is_ok();
        if e.test(&t).map_err(|err| err.to_string())? != want {
            return Err(format!("{mode:?} test {t:?} should be {want}"));
        }
        tally.tuples_tested += 1;
    }
    for s in &q.query().sentences {
        let want = oracle_sentence(dist, s);
        if e.check_sentence(&s.name).map_err(|err| err.to_string())? != want {
            return Err(format!("{mode:?} sentence {} should be {want}", s.name));
        }
    }
    if let Some(b) = e.bds() {
        let total: usize = (0..b.types().len()).map(|t| b.count_l(t)).sum();
        if total != e.graph().vertex_count() {
            return Err(format!("type classes cover {total} of {} vertices", e.graph().vertex_count()));
        }
        tally.partition_checks += 1;
    }
    Ok(())
}

/// Sentences whose satisfying-vertex count passes the threshold must hold,
/// and the search alone must agree.
pub fn pigeonhole(e: &Engine, dist: &AllPairs, tally: &mut Tally) -> Result<bool, String> {
    let mut hit = false;
    for s in &e.query().query().sentences {
        let var = s.var();
        let count = e
            .graph()
            .vertices()
            .filter(|&a| eval_local_with(dist, &s.alpha, &Assignment::from([(var.clone(), a)]), None).unwrap())
            .count();
        if s.s > 0 && count > s.s as usize * ballsize(DEGREE as usize, 2 * s.r as usize) {
            hit = true;
            tally.pigeonhole_hits += 1;
            if !oracle_sentence(dist, s) || !e.check_sentence_by_search(&s.name).unwrap() {
                return Err(format!("sentence {} over the threshold with {count} vertices is false", s.name));
            }
        }
    }
    Ok(hit)
}

/// Runs `steps` random updates on both engines, comparing after each one.
/// Rebuild comparisons run every `invariant_every` steps.
pub fn run_instance(seed: u64, steps: usize, invariant_every: usize) -> Result<Tally, String> {
    let (g, q, cap) = instance(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let stream = random_stream(&mut rng, &g, steps, cap);
    let mut engines: Vec<Engine> = [EngineMode::LowDegree, EngineMode::BoundedDegree]
        .into_iter()
        .map(|m| Engine::preprocess(g.clone(), q.clone(), m))
        .collect::<Result<_, _>>()
        .map_err(|e| fail(seed, 0, &q, format!("preprocess: {e}")))?;
    let mut tally = Tally { instances: 1, ..Tally::default() };
    let mut any_hit = false;
    for step in 0..=steps {
        if step > 0 {
            for e in &mut engines {
                e.update(&stream[step - 1]).map_err(|err| fail(seed, step, &q, format!("update: {err}")))?;
            }
            tally.updates += 1;
        }
        let g = engines[0].graph();
        let dist = AllPairs::new(g);
        let oracle = oracle_answers_with(&dist, &q);
        let vertices = g.sorted_vertices();
        tally.answers_seen += oracle.len();
        for e in &engines {
            compare(e, &dist, &oracle, &vertices, &mut tally).map_err(|m| fail(seed, step, &q, m))?;
            if invariant_every > 0 && step % invariant_every == 0 {
                e.check_invariants().map_err(|m| fail(seed, step, &q, m))?;
            }
        }
        any_hit |= pigeonhole(&engines[1], &dist, &mut tally).map_err(|m| fail(seed, step, &q, m))?;
    }
    tally.pigeonhole_instances += usize::from(any_hit);
    Ok(tally)
}
