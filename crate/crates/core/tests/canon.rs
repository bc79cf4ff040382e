//! Canonical keys against brute-force isomorphism search on small pointed
//! colored graphs.

mod common;

use std::collections::HashMap;

use dyncade_core::bds::canon::{canonize, SmallGraph};
use dyncade_core::graph::Labels;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type ColoredGraph = (Vec<(u32, u32)>, Vec<Labels>);

/// All orderings of `1..n` prefixed by the fixed center 0.
fn pointed_perms(n: usize) -> Vec<Vec<u32>> {
    fn go(rest: &mut Vec<u32>, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            cur.push(v);
            go(rest, cur, out);
            cur.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    go(&mut (1..n as u32).collect(), &mut vec![0], &mut out);
    out
}

fn pairs(n: usize) -> Vec<(u32, u32)> {
    let mut p = Vec::new();
    for i in 0..n as u32 {
        for j in i + 1..n as u32 {
            p.push((i, j));
        }
    }
    p
}

/// Color sets as bitmasks; test colors are 0 and 1.
fn mask(l: &Labels) -> u64 {
    l.iter().fold(0, |m, &c| m | 1 << c)
}

/// Least (colors, adjacency bits) over all relabelings fixing the center.
fn brute_form(n: usize, edges: &[(u32, u32)], labels: &[Labels], perms: &[Vec<u32>]) -> (u64, u64) {
    let mut bit = [[0u32; 8]; 8];
    for (b, (i, j)) in pairs(n).into_iter().enumerate() {
        bit[i as usize][j as usize] = b as u32;
        bit[j as usize][i as usize] = b as u32;
    }
    let masks: Vec<u64> = labels.iter().map(mask).collect();
    let mut best = (u64::MAX, u64::MAX);
    let mut pos = [0usize; 8];
    for order in perms {
        // order[p] is the old vertex placed at position p.
        let mut ls = 0u64;
        for (p, &v) in order.iter().enumerate() {
            pos[v as usize] = p;
            ls |= masks[v as usize] << (2 * (n - 1 - p));
        }
        if ls > best.0 {
            continue;
        }
        let mut bits = 0u64;
        for &(u, v) in edges {
            bits |= 1 << (63 - bit[pos[u as usize]][pos[v as usize]]);
        }
        best = best.min((ls, u64::MAX - bits));
    }
    best
}

struct Classes {
    key_to_form: HashMap<Vec<u32>, (u64, u64)>,
    form_to_key: HashMap<(u64, u64), Vec<u32>>,
    checked: usize,
}

impl Classes {
    fn new() -> Self {
        Classes { key_to_form: HashMap::new(), form_to_key: HashMap::new(), checked: 0 }
    }

    /// Records one graph; fails if keys and brute-force forms disagree on
    /// any pair seen so far, or if the witness order is not an isomorphism.
    fn add(&mut self, n: usize, edges: &[(u32, u32)], labels: Vec<Labels>, perms: &[Vec<u32>]) {
        let g = SmallGraph::new(n, edges, labels.clone());
        let (key, order) = canonize(&g);
        assert_eq!(order[0], 0);
        assert_eq!(SmallGraph::decode(&key), g.permuted(&order), "witness for {edges:?}");
        let form = brute_form(n, edges, &labels, perms);
        if let Some(f) = self.key_to_form.get(&key) {
            assert_eq!(*f, form, "equal keys for non-isomorphic graphs: {edges:?}");
        }
        if let Some(k) = self.form_to_key.get(&form) {
            assert_eq!(*k, key, "different keys for isomorphic graphs: {edges:?}");
        }
        self.key_to_form.insert(key.clone(), form);
        self.form_to_key.insert(form, key);
        self.checked += 1;
    }
}

fn degree_ok(n: usize, edges: &[(u32, u32)], d: usize) -> bool {
    let mut deg = vec![0usize; n];
    for &(u, v) in edges {
        deg[u as usize] += 1;
        deg[v as usize] += 1;
    }
    deg.iter().all(|&x| x <= d)
}

fn edges_of(all: &[(u32, u32)], mask: u64) -> Vec<(u32, u32)> {
    all.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e).collect()
}

#[test]
fn exhaustive_uncolored_up_to_seven() {
    for n in 1..=7usize {
        let perms = pointed_perms(n);
        let all = pairs(n);
        let mut classes = Classes::new();
        for mask in 0..1u64 << all.len() {
            let edges = edges_of(&all, mask);
            if degree_ok(n, &edges, 3) {
                classes.add(n, &edges, vec![Labels::new(); n], &perms);
            }
        }
        assert!(classes.checked > 0);
    }
}

#[test]
fn exhaustive_colored_up_to_five() {
    let palette: [Labels; 3] = [Labels::new(), Labels::from_slice(&[0]), Labels::from_slice(&[0, 1])];
    for n in 1..=5usize {
        let perms = pointed_perms(n);
        let all = pairs(n);
        let mut classes = Classes::new();
        for mask in 0..1u64 << all.len() {
            let edges = edges_of(&all, mask);
            if !degree_ok(n, &edges, 3) {
                continue;
            }
            for coloring in 0..3usize.pow(n as u32) {
                let labels = (0..n).map(|i| palette[coloring / 3usize.pow(i as u32) % 3].clone()).collect();
                classes.add(n, &edges, labels, &perms);
            }
        }
    }
}

#[test]
fn sampled_colored_eight() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 8;
    let perms = pointed_perms(n);
    let all = pairs(n);
    let mut classes = Classes::new();
    let mut graphs: Vec<ColoredGraph> = Vec::new();
    while graphs.len() < 300 {
        let mut edges: Vec<(u32, u32)> = Vec::new();
        let mut shuffled = all.clone();
        shuffled.shuffle(&mut rng);
        let target = rng.random_range(0..=12);
        for e in shuffled {
            edges.push(e);
            if !degree_ok(n, &edges, 3) {
                edges.pop();
            }
            if edges.len() == target {
                break;
            }
        }
        let labels: Vec<Labels> =
            (0..n).map(|_| if rng.random_bool(0.2) { Labels::from_slice(&[0]) } else { Labels::new() }).collect();
        graphs.push((edges, labels));
    }
    // Every sample also appears under three random relabelings.
    let cube = vec![(0, 1), (0, 2), (0, 4), (1, 3), (1, 5), (2, 3), (2, 6), (3, 7), (4, 5), (4, 6), (5, 7), (6, 7)];
    graphs.push((cube, vec![Labels::new(); n]));
    let base = graphs.clone();
    for (edges, labels) in base {
        for _ in 0..3 {
            let order = perms[rng.random_range(0..perms.len())].clone();
            let mut pos = vec![0u32; n];
            for (p, &v) in order.iter().enumerate() {
                pos[v as usize] = p as u32;
            }
            let moved: Vec<(u32, u32)> = edges.iter().map(|&(u, v)| (pos[u as usize], pos[v as usize])).collect();
            let ls = order.iter().map(|&v| labels[v as usize].clone()).collect();
            graphs.push((moved, ls));
        }
    }
    for (edges, labels) in graphs {
        classes.add(n, &edges, labels, &perms);
    }
}


#[test]
fn generator_invariance_small() {
    for n in 1..=7 {
        assert!(common::canon::check_all(n, 3, &[Labels::new()]).unwrap() > 0);
    }
    for n in 1..=6 {
        assert!(common::canon::check_all(n, 3, &[Labels::new(), Labels::from_slice(&[0])]).unwrap() > 0);
    }
}
