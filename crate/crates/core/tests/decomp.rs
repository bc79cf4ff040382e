//! Decomposed clause counts against brute-force counts.

mod common;

use common::{oracle_clause, oracle_leaf};
use dyncade_core::decomp::{decompose, leaf_bound};
use dyncade_core::eval::AllPairs;
use dyncade_core::gen::{random_graph, random_query, QueryShape};
use dyncade_core::graph::DegreePolicy;
use dyncade_core::query::NormalizedQuery;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Returns how many multi-group clauses had a nonzero count.
fn check(q: &NormalizedQuery, dist: &AllPairs) -> usize {
    let mut nontrivial = 0;
    for (ci, case) in q.query().cases.iter().enumerate() {
        for (li, clause) in case.clauses.iter().enumerate() {
            let d = decompose(clause).unwrap();
            assert!(d.leaves.iter().all(|l| l.tau.is_connected()));
            assert!((d.leaves.len() as u128) <= leaf_bound(q.arity(), clause.groups.len()));
            assert_eq!(decompose(clause).unwrap(), d, "decompose is deterministic");
            let counts: Vec<u64> = d.leaves.iter().map(|l| oracle_leaf(dist, l)).collect();
            let got = d.evaluate(&counts).unwrap();
            assert_eq!(got, oracle_clause(dist, q, ci, li) as i128, "query {}", q.query());
            nontrivial += usize::from(clause.groups.len() > 1 && got > 0);
        }
    }
    nontrivial
}

#[test]
fn three_uncolored_singletons() {
    let q = NormalizedQuery::parse(
        "(query (vars x y z) (case else (clause 1 (group (x) (= x x)) (group (y) (= y y)) (group (z) (= z z)) (tau))))",
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        let g = random_graph(&mut rng, 10, 12, DegreePolicy::Bounded(3));
        assert_eq!(check(&q, &AllPairs::new(&g)), 1);
    }
}

#[test]
fn random_clauses_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut nontrivial = 0;
    for k in 1..=3 {
        let shape = QueryShape { k, max_groups: 3, max_r: 1, sentences: 0, depth: 1 };
        for _ in 0..12 {
            let q = random_query(&mut rng, &shape);
            let n = if k == 3 { 14 } else { 30 };
            let g = random_graph(&mut rng, n, n + n / 2, DegreePolicy::Bounded(3));
            nontrivial += check(&q, &AllPairs::new(&g));
        }
    }
    assert!(nontrivial >= 5, "only {nontrivial} multi-group clauses with answers");
}
