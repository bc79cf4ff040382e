//! Inclusion-exclusion rewriting of clause counts into counts of centered
//! queries.
//!
//! Tuples of a clause with groups `B1, ..., Bq` (pairwise far) are counted as
//! `#B1 * #(B2, ..., Bq)` minus the tuples in that product where `B1` comes
//! close to some groups. Those are split by the set `S` of groups it comes
//! close to and the exact pattern of close pairs between `B1` and `S`; each
//! part is a clause whose first group merges `B1` with `S` and has fewer
//! groups, so the recursion ends in single-group (centered) leaves. Exact
//! patterns keep the parts disjoint.

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::centered::CenteredQuery;
use crate::query::{Clause, DistanceType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error("decomposition needs {leaves} leaves, over the bound {bound}")]
    TooManyLeaves { leaves: usize, bound: u128 },
    #[error("no count for leaf {0}")]
    MissingLeafCount(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CountExpr {
    /// Only for clauses without groups, which have the empty tuple as their
    /// single solution.
    One,
    Leaf(usize),
    Sum(Vec<CountExpr>),
    Product(Box<CountExpr>, Box<CountExpr>),
    Difference(Box<CountExpr>, Box<CountExpr>),
}

impl CountExpr {
    fn eval(&self, counts: &[u64]) -> Result<i128, DecompError> {
        Ok(match self {
            CountExpr::One => 1,
            CountExpr::Leaf(i) => *counts.get(*i).ok_or(DecompError::MissingLeafCount(*i))? as i128,
            CountExpr::Sum(es) => es.iter().map(|e| e.eval(counts)).sum::<Result<i128, _>>()?,
            CountExpr::Product(a, b) => a.eval(counts)? * b.eval(counts)?,
            CountExpr::Difference(a, b) => a.eval(counts)? - b.eval(counts)?,
        })
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            CountExpr::One | CountExpr::Leaf(_) => 1,
            CountExpr::Sum(es) => 1 + es.iter().map(|e| e.size()).sum::<usize>(),
            CountExpr::Product(a, b) | CountExpr::Difference(a, b) => 1 + a.size() + b.size(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub leaves: Vec<CenteredQuery>,
    pub expr: CountExpr,
}

impl Decomposition {
    /// Folds the expression over leaf counts indexed like `leaves`.
    pub fn evaluate(&self, counts: &[u64]) -> Result<i128, DecompError> {
        self.expr.eval(counts)
    }
}

struct Builder {
    leaves: Vec<CenteredQuery>,
    index: FxHashMap<CenteredQuery, usize>,
}

impl Builder {
    fn leaf(&mut self, q: CenteredQuery) -> CountExpr {
        let next = self.leaves.len();
        let id = *self.index.entry(q.clone()).or_insert(next);
        if id == next {
            self.leaves.push(q);
        }
        CountExpr::Leaf(id)
    }

    /// Count of tuples over `blocks` with each block's own exact type and all
    /// blocks pairwise far.
    fn far(&mut self, blocks: &[CenteredQuery]) -> CountExpr {
        match blocks {
            [] => CountExpr::One,
            [b] => self.leaf(b.clone()),
            [first, rest @ ..] => {
                let lead = self.leaf(first.clone());
                let tail = self.far(rest);
                let mut overlaps = Vec::new();
                for s in 1u32..1 << rest.len() {
                    let chosen: Vec<usize> = (0..rest.len()).filter(|j| s >> j & 1 == 1).collect();
                    let kept: Vec<CenteredQuery> =
                        (0..rest.len()).filter(|j| s >> j & 1 == 0).map(|j| rest[j].clone()).collect();
                    for merged in merges(first, &chosen.iter().map(|&j| &rest[j]).collect::<Vec<_>>()) {
                        let mut next = vec![merged];
                        next.extend(kept.iter().cloned());
                        overlaps.push(self.far(&next));
                    }
                }
                CountExpr::Difference(
                    Box::new(CountExpr::Product(Box::new(lead), Box::new(tail))),
                    Box::new(CountExpr::Sum(overlaps)),
                )
            }
        }
    }
}

/// Every block made of `first` followed by `chosen`, with a cross pattern of
/// close pairs in which each chosen block is close to `first` and chosen
/// blocks stay far from each other.
fn merges(first: &CenteredQuery, chosen: &[&CenteredQuery]) -> Vec<CenteredQuery> {
    let a = first.arity();
    let mut offsets = Vec::with_capacity(chosen.len());
    let mut total = a;
    for b in chosen {
        offsets.push(total);
        total += b.arity();
    }
    let mut base = DistanceType::new(total);
    let mut parts = first.parts.clone();
    for &(i, j) in &first.tau.edges {
        base.connect(i, j);
    }
    for (b, &off) in chosen.iter().zip(&offsets) {
        for &(i, j) in &b.tau.edges {
            base.connect(off + i, off + j);
        }
        parts.extend(b.parts.iter().cloned());
    }
    // Per chosen block, the nonempty sets of close pairs with `first`.
    let choices: Vec<Vec<Vec<(usize, usize)>>> = chosen
        .iter()
        .zip(&offsets)
        .map(|(b, &off)| {
            let cross: Vec<(usize, usize)> =
                (0..a).flat_map(|i| (0..b.arity()).map(move |j| (i, off + j))).collect();
            (1u64..1 << cross.len())
                .map(|m| (0..cross.len()).filter(|c| m >> c & 1 == 1).map(|c| cross[c]).collect())
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; choices.len()];
    loop {
        let mut tau = base.clone();
        for (c, &p) in choices.iter().zip(&pick) {
            for &(i, j) in &c[p] {
                tau.connect(i, j);
            }
        }
        out.push(CenteredQuery { parts: parts.clone(), tau, r: first.r });
        // Odometer over the per-block choices.
        let mut i = 0;
        loop {
            if i == pick.len() {
                return out;
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// Safety bound `2^(k*p) * k!` on the number of leaves.
pub fn leaf_bound(k: usize, p: usize) -> u128 {
    let fact: u128 = (1..=k as u128).product();
    1u128.checked_shl((k * p) as u32).unwrap_or(u128::MAX).saturating_mul(fact)
}

pub fn decompose(c: &Clause) -> Result<Decomposition, DecompError> {
    let mut blocks = Vec::with_capacity(c.groups.len());
    let mut offset = 0;
    for g in 0..c.groups.len() {
        blocks.push(CenteredQuery::from_group(c, g, offset).normalized());
        offset += c.groups[g].vars.len();
    }
    let mut b = Builder { leaves: Vec::new(), index: FxHashMap::default() };
    let expr = b.far(&blocks);
    let bound = leaf_bound(offset, c.groups.len());
    if b.leaves.len() as u128 > bound {
        return Err(DecompError::TooManyLeaves { leaves: b.leaves.len(), bound });
    }
    Ok(Decomposition { leaves: b.leaves, expr })
}
