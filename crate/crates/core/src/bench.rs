//! Scaling measurements: preprocessing time, update time and enumeration
//! delay on seeded random graphs of growing size.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{Engine, EngineError, EngineMode};
use crate::gen::{configuration_model, PALETTE};
use crate::graph::{ColorSet, DegreePolicy, DynamicGraph, UpdateOp, VertexId};
use crate::query::NormalizedQuery;

/// Red `x` and blue `y` at distance more than 2.
pub const DEFAULT_QUERY: &str =
    "(query (vars x y) (case else (clause 1 (group (x) (color Red x)) (group (y) (color Blue y)) (tau))))";

pub const CSV_HEADER: &str = "n,preprocess_ns,median_update_ns,max_delay_ns,count";

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub mode: EngineMode,
    pub policy: DegreePolicy,
    pub seed: u64,
    /// Timed preprocessing runs per size; the median is reported.
    pub repeats: usize,
    /// Timed updates per size; the median is reported.
    pub updates: usize,
    /// Answers enumerated per delay pass.
    pub delay_answers: usize,
    /// Enumeration passes; each gap keeps its fastest pass before the maximum
    /// is taken, which filters scheduler noise.
    pub delay_passes: usize,
    /// Probability of each palette color per vertex.
    pub p_color: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            mode: EngineMode::BoundedDegree,
            policy: DegreePolicy::Bounded(3),
            seed: 0,
            repeats: 3,
            updates: 1000,
            delay_answers: 20_000,
            delay_passes: 5,
            p_color: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    pub n: usize,
    pub preprocess_ns: u128,
    pub median_update_ns: u128,
    pub max_delay_ns: u128,
    /// Answer count after preprocessing.
    pub count: u64,
}

impl BenchRow {
    pub fn csv(&self) -> String {
        format!("{},{},{},{},{}", self.n, self.preprocess_ns, self.median_update_ns, self.max_delay_ns, self.count)
    }
}

fn median(mut xs: Vec<u128>) -> u128 {
    xs.sort_unstable();
    xs.get(xs.len() / 2).copied().unwrap_or(0)
}

/// Configuration-model graph on `0..n` under `policy`; low-degree policies
/// draw stubs up to the cap at `n`.
pub fn bench_graph(rng: &mut impl Rng, n: usize, policy: DegreePolicy, p_color: f64) -> DynamicGraph {
    let d = policy.cap(n).min(u32::MAX as usize) as u32;
    let g = configuration_model(rng, n, d, &PALETTE, p_color);
    if let DegreePolicy::Bounded(_) = policy {
        return g;
    }
    let mut out = DynamicGraph::new(policy).expect("validated policy");
    for v in g.sorted_vertices() {
        out.apply(&UpdateOp::AddVertex(v, g.colors(v).expect("live"))).expect("fresh id");
    }
    for (u, v) in g.sorted_edges() {
        out.apply(&UpdateOp::AddEdge(u, v)).expect("within the cap");
    }
    out
}

/// Relabels and edge changes on a fixed vertex set `0..n`, each valid in
/// order; vertex counts stay fixed so every update sees the same `n`.
pub fn bench_stream(rng: &mut impl Rng, g: &DynamicGraph, steps: usize) -> Vec<UpdateOp> {
    let mut shadow = g.clone();
    let n = shadow.vertex_count() as u32;
    let mut out = Vec::with_capacity(steps);
    if n < 2 {
        return out;
    }
    while out.len() < steps {
        let u = VertexId(rng.random_range(0..n));
        let op = match rng.random_range(0..3) {
            0 => UpdateOp::Relabel(u, PALETTE.iter().filter(|_| rng.random_bool(0.3)).copied().collect::<ColorSet>()),
            1 => {
                let v = VertexId(rng.random_range(0..n));
                if u == v || shadow.adjacent(u, v) {
                    continue;
                }
                UpdateOp::AddEdge(u, v)
            }
            _ => {
                let nbrs = shadow.neighbors(u).expect("fixed vertex set");
                if nbrs.is_empty() {
                    continue;
                }
                UpdateOp::RemoveEdge(u, nbrs[rng.random_range(0..nbrs.len())])
            }
        };
        if shadow.apply(&op).is_ok() {
            out.push(op);
        }
    }
    out
}

/// Measures one graph size.
pub fn run_size(cfg: &BenchConfig, query: &NormalizedQuery, n: usize) -> Result<BenchRow, EngineError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ n as u64);
    let g = bench_graph(&mut rng, n, cfg.policy, cfg.p_color);
    let stream = bench_stream(&mut rng, &g, cfg.updates);

    let mut pre = Vec::new();
    let mut engine = None;
    for _ in 0..cfg.repeats.max(1) {
        let input = g.clone();
        let t = Instant::now();
        let e = Engine::preprocess(input, query.clone(), cfg.mode)?;
        pre.push(t.elapsed().as_nanos());
        // Drop the previous engine outside the timed region.
        engine = Some(e);
    }
    let mut engine = engine.expect("at least one run");
    let count = engine.count();

    let mut upd = Vec::with_capacity(stream.len());
    for op in &stream {
        let t = Instant::now();
        engine.update(op)?;
        upd.push(t.elapsed().as_nanos());
    }

    let mut best: Vec<Duration> = Vec::new();
    for _ in 0..cfg.delay_passes.max(1) {
        // Gaps between consecutive answers; the setup before the first
        // answer is not an inter-answer delay.
        let mut c = engine.open_cursor();
        if engine.next(&mut c)?.is_none() {
            break;
        }
        let mut last = Instant::now();
        for i in 1..cfg.delay_answers {
            if engine.next(&mut c)?.is_none() {
                break;
            }
            let now = Instant::now();
            let gap = now - last;
            last = now;
            match best.get_mut(i - 1) {
                Some(b) => *b = (*b).min(gap),
                None => best.push(gap),
            }
        }
    }
    let max_delay_ns = best.iter().max().map_or(0, Duration::as_nanos);

    Ok(BenchRow { n, preprocess_ns: median(pre), median_update_ns: median(upd), max_delay_ns, count })
}
