//! Exhaustive skip-pointer comparison against linear scans on small graphs
//! under interleaved list and graph changes.

use dyncade_core::gen::random_graph;
use dyncade_core::graph::{ballsize, DegreePolicy, DynamicGraph, UpdateOp, VertexId};
use dyncade_core::skiplist::{skip_by_scan, CenteredTupleList, SkipIndex};
use dyncade_core::structure::Tuple;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every forbidden set of at most two vertices, the empty set included.
fn small_sets(vs: &[VertexId]) -> Vec<Vec<VertexId>> {
    let mut out = vec![Vec::new()];
    for (i, &a) in vs.iter().enumerate() {
        out.push(vec![a]);
        for &b in &vs[i + 1..] {
            out.push(vec![a, b]);
        }
    }
    out
}

/// Compares `skip` and `first` with the scan for every listed tuple and every
/// small set, and the maintained index with a rebuild. Returns the number of
/// skip queries compared.
fn compare(g: &DynamicGraph, list: &CenteredTupleList, idx: &SkipIndex) -> Result<usize, String> {
    let radius = idx.radius();
    if let Some(b) = list.first() {
        // Sets of size j number at most (m * ballsize)^j.
        let per = b.len() * ballsize(3, radius as usize);
        let bound: usize = (1..=idx.k() as u32).map(|j| per.pow(j)).sum();
        if idx.max_stored() > bound {
            return Err(format!("{} stored sets exceed the bound {bound}", idx.max_stored()));
        }
    }
    if *idx != SkipIndex::build(g, list, idx.k(), radius) {
        return Err("maintained index differs from a rebuild".into());
    }
    let sets = small_sets(&g.sorted_vertices());
    let mut n = 0;
    for set in &sets {
        let first = list.iter().find(|t| t.iter().all(|&x| set.iter().all(|&a| !g.distance_leq(x, a, radius as usize).unwrap())));
        if idx.first(g, list, set) != first {
            return Err(format!("first({set:?}) differs from the scan"));
        }
        for b in list.iter() {
            let got = idx.skip(g, list, b, set).map_err(|e| e.to_string())?;
            if got != skip_by_scan(g, list, radius, b, set) {
                return Err(format!("skip({b:?}, {set:?}) = {got:?} differs from the scan"));
            }
            n += 1;
        }
    }
    Ok(n)
}

fn random_tuple(rng: &mut impl Rng, g: &DynamicGraph, arity: usize) -> Tuple {
    let vs = g.sorted_vertices();
    let a = *vs.choose(rng).unwrap();
    let mut t: Tuple = Tuple::from_slice(&[a]);
    if arity == 2 {
        // A second element near the first, as in centered lists.
        let near = g.neighborhood(&[a], 2);
        t.push(*near.choose(rng).unwrap());
    }
    t
}

/// One seeded run: a graph of at most 15 vertices, a list of unary or binary
/// tuples, and a sequence of insertions, removals and edge changes, with the
/// exhaustive comparison after each. Returns the number of comparisons.
pub fn run(seed: u64, changes: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(3..=15);
    let mut g = random_graph(&mut rng, n, n + n / 2, DegreePolicy::Bounded(3));
    let arity = rng.random_range(1..=2);
    let radius = rng.random_range(0..=2);
    let mut list = CenteredTupleList::new();
    for _ in 0..rng.random_range(0..=2 * n) {
        list.insert(random_tuple(&mut rng, &g, arity));
    }
    let mut idx = SkipIndex::build(&g, &list, 2, radius);
    let mut total = compare(&g, &list, &idx).map_err(|m| format!("seed {seed}, initial: {m}"))?;
    for step in 0..changes {
        match rng.random_range(0..3) {
            0 => {
                let t = random_tuple(&mut rng, &g, arity);
                if !list.contains(&t) {
                    idx.insert(&g, &mut list, t).map_err(|e| e.to_string())?;
                }
            }
            1 => {
                let listed: Vec<Tuple> = list.iter().cloned().collect();
                if let Some(t) = listed.choose(&mut rng) {
                    idx.remove(&g, &mut list, t).map_err(|e| e.to_string())?;
                }
            }
            _ => {
                let vs = g.sorted_vertices();
                let (u, v) = (*vs.choose(&mut rng).unwrap(), *vs.choose(&mut rng).unwrap());
                let op = if g.adjacent(u, v) { UpdateOp::RemoveEdge(u, v) } else { UpdateOp::AddEdge(u, v) };
                if g.validate(&op).is_ok() {
                    // Elements whose distances up to the radius can change lie
                    // within the radius of an endpoint before the change.
                    let around = g.neighborhood(&[u, v], radius as usize);
                    let near: Vec<Tuple> =
                        list.iter().filter(|t| t.iter().any(|x| around.contains(x))).cloned().collect();
                    let seeds = idx.seeds(&list, &near);
                    g.apply(&op).unwrap();
                    idx.repair(&g, &list, &[], &[], seeds);
                }
            }
        }
        total += compare(&g, &list, &idx).map_err(|m| format!("seed {seed}, step {step}: {m}"))?;
    }
    Ok(total)
}
