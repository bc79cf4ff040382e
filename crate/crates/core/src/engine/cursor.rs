//! Enumeration: per clause, the groups are chosen in variable order, each
//! from its sorted list through skip pointers that avoid the neighborhoods of
//! the elements already chosen. A candidate is taken only if the remaining
//! groups can still be completed; clause streams are merged by least head.

use super::{ClausePlan, Engine, EngineError};
use crate::graph::{ballsize, VertexId};
use crate::structure::{Structure, Tuple};

#[derive(Debug, Clone)]
struct ClauseState {
    stack: Vec<Tuple>,
    head: Option<Tuple>,
}

/// Enumeration state bound to one engine version.
#[derive(Debug, Clone)]
pub struct Cursor {
    version: u64,
    case: usize,
    clauses: Option<Vec<ClauseState>>,
}

fn flatten(stack: &[Tuple]) -> Vec<VertexId> {
    stack.iter().flat_map(|t| t.iter().copied()).collect()
}

impl Engine {
    pub fn open_cursor(&self) -> Cursor {
        Cursor { version: self.version, case: self.active, clauses: None }
    }

    /// The next answer, or `None` once exhausted.
    pub fn next(&self, cur: &mut Cursor) -> Result<Option<Tuple>, EngineError> {
        if cur.version != self.version {
            return Err(EngineError::StaleCursor { opened: cur.version, current: self.version });
        }
        let plans = &self.cases[cur.case];
        let states = cur.clauses.get_or_insert_with(|| {
            plans
                .iter()
                .map(|p| {
                    let mut stack = Vec::new();
                    let head = self.fill(p, &mut stack).then(|| stack.iter().flatten().copied().collect());
                    ClauseState { stack, head }
                })
                .collect()
        });
        let Some(best) = (0..states.len()).filter(|&i| states[i].head.is_some()).min_by(|&a, &b| {
            states[a].head.cmp(&states[b].head)
        }) else {
            return Ok(None);
        };
        let out = states[best].head.take();
        let st = &mut states[best];
        if self.advance(&plans[best], &mut st.stack) {
            st.head = Some(st.stack.iter().flatten().copied().collect());
        }
        Ok(out)
    }

    fn candidate_first(&self, plan: &ClausePlan, level: usize, prefix: &[VertexId]) -> Option<Tuple> {
        let g = &plan.groups[level];
        let list = self.group_list(g);
        match g.skip {
            None => list.first().cloned(),
            Some(s) => self.skips[s].index.first(&self.view(), list, prefix).cloned(),
        }
    }

    fn candidate_after(&self, plan: &ClausePlan, level: usize, b: &Tuple, prefix: &[VertexId]) -> Option<Tuple> {
        let g = &plan.groups[level];
        let list = self.group_list(g);
        match g.skip {
            None => list.next_after(b).cloned(),
            Some(s) => self.skips[s].index.skip(&self.view(), list, b, prefix).expect("current tuple is listed").cloned(),
        }
    }

    /// Extends `stack` to a full answer with the least completable choice at
    /// every remaining level.
    fn fill(&self, plan: &ClausePlan, stack: &mut Vec<Tuple>) -> bool {
        while stack.len() < plan.groups.len() {
            let level = stack.len();
            let prefix = flatten(stack);
            let mut cand = self.candidate_first(plan, level, &prefix);
            loop {
                let Some(t) = cand else {
                    debug_assert_eq!(level, 0, "a completable prefix always extends");
                    return false;
                };
                let mut chosen = prefix.clone();
                chosen.extend(t.iter().copied());
                if self.completable(plan, level + 1, &mut chosen) {
                    stack.push(t);
                    break;
                }
                cand = self.candidate_after(plan, level, &t, &prefix);
            }
        }
        true
    }

    /// Moves `stack` to the next answer in lexicographic order.
    fn advance(&self, plan: &ClausePlan, stack: &mut Vec<Tuple>) -> bool {
        while let Some(t) = stack.pop() {
            let level = stack.len();
            let prefix = flatten(stack);
            let mut cand = self.candidate_after(plan, level, &t, &prefix);
            while let Some(c) = cand {
                let mut chosen = prefix.clone();
                chosen.extend(c.iter().copied());
                if self.completable(plan, level + 1, &mut chosen) {
                    stack.push(c);
                    let filled = self.fill(plan, stack);
                    debug_assert!(filled);
                    return true;
                }
                cand = self.candidate_after(plan, level, &c, &prefix);
            }
        }
        false
    }

    /// Whether groups `from..` can be chosen far from `chosen` and from each
    /// other. A group whose list exceeds the number of its tuples that can
    /// meet the neighborhood of the other `k - k_j` elements always has a
    /// free tuple, so only the small lists are searched.
    fn completable(&self, plan: &ClausePlan, from: usize, chosen: &mut Vec<VertexId>) -> bool {
        let k: usize = plan.groups.iter().map(|g| g.range.len()).sum();
        let d = self.degree();
        let r2 = 2 * plan.r as usize;
        let small: Vec<usize> = (from..plan.groups.len())
            .filter(|&j| {
                let kj = plan.groups[j].range.len();
                let bound = ballsize(d, r2 + r2 * kj)
                    .saturating_mul(ballsize(d, r2 * kj).saturating_pow(kj as u32 - 1))
                    .saturating_mul(k - kj);
                self.group_list(&plan.groups[j]).len() <= bound
            })
            .collect();
        self.search(plan, &small, chosen)
    }

    fn search(&self, plan: &ClausePlan, small: &[usize], chosen: &mut Vec<VertexId>) -> bool {
        let Some((&j, rest)) = small.split_first() else {
            return true;
        };
        let view = self.view();
        let r2 = 2 * plan.r;
        for t in self.group_list(&plan.groups[j]).iter() {
            if t.iter().all(|&x| chosen.iter().all(|&a| !view.within(x, a, r2))) {
                let before = chosen.len();
                chosen.extend(t.iter().copied());
                if self.search(plan, rest, chosen) {
                    chosen.truncate(before);
                    return true;
                }
                chosen.truncate(before);
            }
        }
        false
    }
}
