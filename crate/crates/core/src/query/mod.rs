//! Query language: guarded cases over scattered sentences and clauses of
//! centered groups with an exact distance type.

mod ast;
mod parse;

use thiserror::Error;

pub use ast::*;
pub use parse::parse_query;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("line {line}, col {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}, col {col}: unbound variable `{name}`")]
    UnboundVariable { name: String, line: usize, col: usize },
    #[error("line {line}, col {col}: duplicate name `{name}`")]
    DuplicateName { name: String, line: usize, col: usize },
    #[error("line {line}, col {col}: unknown sentence `{name}`")]
    UnknownSentence { name: String, line: usize, col: usize },
    #[error("sentence `{name}` must have exactly one free variable, found {found}")]
    SentenceArity { name: String, found: usize },
    #[error("case {case}, clause {clause}: tau components differ from the groups")]
    ComponentMismatch { case: usize, clause: usize },
    #[error("{place}: reach {reach} exceeds radius {radius}")]
    RadiusExceeded { place: String, reach: u32, radius: u32 },
    #[error("case {case}: clauses {first} and {second} share a distance type")]
    TauClash { case: usize, first: usize, second: usize },
    #[error("case {case}, clause {clause}: groups are not contiguous blocks of the query variables")]
    NonContiguousGroups { case: usize, clause: usize },
    #[error("case {case}: clauses use different radii")]
    MixedRadius { case: usize },
    #[error("the last case must be `else`, and only the last")]
    MissingElse,
}

/// Derived quantities of one clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseInfo {
    /// First variable index of each group, plus `k` at the end.
    pub offsets: Vec<usize>,
    /// Declared group radii.
    pub group_radii: Vec<u32>,
    /// `2·r·|group| + r_g` per group.
    pub eval_radii: Vec<u32>,
}

impl ClauseInfo {
    pub fn p(&self) -> usize {
        self.group_radii.len()
    }

    pub fn group_range(&self, g: usize) -> std::ops::Range<usize> {
        self.offsets[g]..self.offsets[g + 1]
    }
}

/// A validated query with its derived radii.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedQuery {
    query: Query,
    info: Vec<Vec<ClauseInfo>>,
    rho: u32,
    delta_radius: u32,
}

impl NormalizedQuery {
    /// Parses and validates.
    pub fn parse(text: &str) -> Result<Self, QueryError> {
        validate(parse_query(text)?)
    }

    pub fn query(&self) -> &Query {
        &self.query
    }

    pub fn arity(&self) -> usize {
        self.query.vars.len()
    }

    pub fn info(&self, case: usize, clause: usize) -> &ClauseInfo {
        &self.info[case][clause]
    }

    /// Radius of the neighborhoods any engine structure depends on: covers
    /// every clause evaluated as a single merged group and every sentence.
    pub fn rho(&self) -> u32 {
        self.rho
    }

    /// Largest distance threshold `2r` used by a clause or a sentence.
    pub fn delta_radius(&self) -> u32 {
        self.delta_radius
    }

    pub fn sentence_radii(&self) -> impl Iterator<Item = (&str, u32)> + '_ {
        self.query.sentences.iter().map(|s| (s.name.as_str(), s.r))
    }
}

/// Checks the normal-form invariants and computes the radii.
pub fn validate(q: Query) -> Result<NormalizedQuery, QueryError> {
    let last = q.cases.len().saturating_sub(1);
    for (i, c) in q.cases.iter().enumerate() {
        if c.guard.is_none() != (i == last) {
            return Err(QueryError::MissingElse);
        }
    }
    let k = q.vars.len();
    let mut rho = 0;
    let mut delta_radius = 0;
    for s in &q.sentences {
        let reach = s.alpha.reach();
        if reach > s.r {
            return Err(QueryError::RadiusExceeded { place: format!("sentence `{}`", s.name), reach, radius: s.r });
        }
        rho = rho.max(s.r);
        delta_radius = delta_radius.max(2 * s.r);
    }
    let mut info = Vec::with_capacity(q.cases.len());
    for (ci, case) in q.cases.iter().enumerate() {
        if case.clauses.windows(2).any(|w| w[0].r != w[1].r) {
            return Err(QueryError::MixedRadius { case: ci });
        }
        let mut case_info = Vec::with_capacity(case.clauses.len());
        for (li, cl) in case.clauses.iter().enumerate() {
            let flat: Vec<&Var> = cl.groups.iter().flat_map(|g| &g.vars).collect();
            if flat.len() != k || flat.iter().zip(&q.vars).any(|(a, b)| *a != b) {
                return Err(QueryError::NonContiguousGroups { case: ci, clause: li });
            }
            let mut offsets = vec![0];
            for g in &cl.groups {
                offsets.push(offsets.last().unwrap() + g.vars.len());
            }
            let blocks: Vec<Vec<usize>> = offsets.windows(2).map(|w| (w[0]..w[1]).collect()).collect();
            if cl.tau.components() != blocks {
                return Err(QueryError::ComponentMismatch { case: ci, clause: li });
            }
            let mut group_radii = Vec::new();
            let mut eval_radii = Vec::new();
            for (gi, g) in cl.groups.iter().enumerate() {
                let rg = cl.group_radius(gi);
                let reach = g.formula.reach();
                if reach > rg {
                    return Err(QueryError::RadiusExceeded {
                        place: format!("case {ci}, clause {li}, group {gi}"),
                        reach,
                        radius: rg,
                    });
                }
                group_radii.push(rg);
                eval_radii.push(2 * cl.r * g.vars.len() as u32 + rg);
            }
            let max_rg = group_radii.iter().copied().max().unwrap_or(0);
            rho = rho.max(2 * cl.r * k as u32 + max_rg);
            delta_radius = delta_radius.max(2 * cl.r);
            if let Some(prev) = case.clauses[..li].iter().position(|o| o.tau == cl.tau) {
                return Err(QueryError::TauClash { case: ci, first: prev, second: li });
            }
            case_info.push(ClauseInfo { offsets, group_radii, eval_radii });
        }
        info.push(case_info);
    }
    Ok(NormalizedQuery { query: q, info, rho, delta_radius })
}
