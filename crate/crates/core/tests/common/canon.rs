//! Exhaustive canonization check by group generators.
//!
//! Equal keys imply isomorphic graphs because every graph is checked to be
//! isomorphic to the graph decoded from its key. The converse needs the key
//! to be invariant under every relabeling fixing the center; over a family
//! closed under relabeling it suffices to check the two generators of the
//! symmetric group on `1..n`, a transposition and a full cycle.

use dyncade_core::bds::canon::{canonize, SmallGraph};
use dyncade_core::graph::Labels;

type Visit<'a> = dyn FnMut(&[(u32, u32)]) -> Result<(), String> + 'a;

/// Checks every graph on `n` vertices with degree at most `d`, under every
/// coloring drawn from `palette`. Returns the number of graphs checked.
pub fn check_all(n: usize, d: usize, palette: &[Labels]) -> Result<usize, String> {
    let pairs: Vec<(u32, u32)> = (0..n as u32).flat_map(|i| (i + 1..n as u32).map(move |j| (i, j))).collect();
    let swap: Vec<u32> = (0..n as u32).map(|p| if n > 2 && p == 1 { 2 } else if n > 2 && p == 2 { 1 } else { p }).collect();
    let cycle: Vec<u32> = (0..n as u32).map(|p| if p == 0 { 0 } else { p % (n as u32 - 1) + 1 }).collect();
    let colorings = palette.len().pow(n as u32);
    let mut checked = 0;
    let mut edges = Vec::new();
    let mut deg = vec![0usize; n];
    let mut visit = |edges: &[(u32, u32)]| -> Result<(), String> {
        for c in 0..colorings {
            let labels = (0..n).map(|i| palette[c / palette.len().pow(i as u32) % palette.len()].clone()).collect();
            let g = SmallGraph::new(n, edges, labels);
            let (key, order) = canonize(&g);
            if order[0] != 0 || SmallGraph::decode(&key) != g.permuted(&order) {
                return Err(format!("bad witness for {edges:?}"));
            }
            for gen in [&swap, &cycle] {
                if canonize(&g.permuted(gen)).0 != key {
                    return Err(format!("key not invariant under {gen:?} for {edges:?}"));
                }
            }
            checked += 1;
        }
        Ok(())
    };
    fn go(
        i: usize,
        pairs: &[(u32, u32)],
        d: usize,
        edges: &mut Vec<(u32, u32)>,
        deg: &mut [usize],
        visit: &mut Visit,
    ) -> Result<(), String> {
        if i == pairs.len() {
            return visit(edges);
        }
        go(i + 1, pairs, d, edges, deg, visit)?;
        let (u, v) = pairs[i];
        if deg[u as usize] < d && deg[v as usize] < d {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
            edges.push((u, v));
            go(i + 1, pairs, d, edges, deg, visit)?;
            edges.pop();
            deg[u as usize] -= 1;
            deg[v as usize] -= 1;
        }
        Ok(())
    }
    go(0, &pairs, d, &mut edges, &mut deg, &mut visit)?;
    Ok(checked)
}
