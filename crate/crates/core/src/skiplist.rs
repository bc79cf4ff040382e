//! Sorted tuple lists with skip pointers.
//!
//! `sk(b, I)` is the least tuple strictly after `b` with no element within
//! distance `radius` of `I`. Pointers are stored only for the sets `I` in
//! `SC(b)`: singletons near `b`, closed under extending `I` by any vertex near
//! `sk(b, I)` while `|I| < k`. Every other query reduces to a stored pointer of
//! the successor of `b`.

use std::collections::BTreeSet;
use std::ops::Bound;

use rustc_hash::{FxHashMap, FxHashSet};
use smallvec::SmallVec;
use thiserror::Error;

use crate::graph::VertexId;
use crate::structure::{Structure, Tuple};

/// Sorted vertex set of size at most `k`.
pub type VSet = SmallVec<[VertexId; 3]>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkipError {
    #[error("tuple {0:?} is not in the list")]
    TupleNotInList(Tuple),
    #[error("tuple {0:?} is already in the list")]
    DuplicateTuple(Tuple),
}

/// Lexicographically ordered, duplicate-free list of tuples of one arity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CenteredTupleList {
    order: BTreeSet<Tuple>,
    index: FxHashSet<Tuple>,
}

impl CenteredTupleList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn contains(&self, t: &[VertexId]) -> bool {
        self.index.contains(t)
    }

    pub fn insert(&mut self, t: Tuple) -> bool {
        if self.index.insert(t.clone()) {
            self.order.insert(t);
            true
        } else {
            false
        }
    }

    pub fn remove(&mut self, t: &[VertexId]) -> bool {
        if self.index.remove(t) {
            self.order.remove(t);
            true
        } else {
            false
        }
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &Tuple> + '_ {
        self.order.iter()
    }

    pub fn first(&self) -> Option<&Tuple> {
        self.order.first()
    }

    /// Least tuple strictly greater than `t` (which need not be listed).
    pub fn next_after(&self, t: &[VertexId]) -> Option<&Tuple> {
        self.order.range::<[VertexId], _>((Bound::Excluded(t), Bound::Unbounded)).next()
    }

    /// Greatest tuple strictly smaller than `t` (which need not be listed).
    pub fn prev_before(&self, t: &[VertexId]) -> Option<&Tuple> {
        self.order.range::<[VertexId], _>((Bound::Unbounded, Bound::Excluded(t))).next_back()
    }

    /// Tuples whose first element is `a`.
    pub fn anchored_at(&self, a: VertexId) -> impl Iterator<Item = &Tuple> + '_ {
        let lo: Tuple = SmallVec::from_slice(&[a]);
        self.order.range(lo..).take_while(move |t| t[0] == a)
    }
}

type Entry = Vec<(VSet, Option<Tuple>)>;

fn lookup<'e>(entry: &'e Entry, set: &[VertexId]) -> Option<&'e Option<Tuple>> {
    entry.binary_search_by(|(s, _)| s.as_slice().cmp(set)).ok().map(|i| &entry[i].1)
}

/// Skip pointers over a [`CenteredTupleList`] owned elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkipIndex {
    k: usize,
    radius: u32,
    entries: FxHashMap<Tuple, Entry>,
}

/// Vertices within `radius` of some element of `t`.
fn near_set<S: Structure + ?Sized>(s: &S, t: &[VertexId], radius: u32) -> FxHashSet<VertexId> {
    t.iter().flat_map(|&x| s.ball(x, radius)).collect()
}

/// Nonempty subsets of the sorted set `set`, largest first.
fn subsets_desc(set: &[VertexId]) -> Vec<VSet> {
    let n = set.len();
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
    masks.into_iter().map(|m| (0..n).filter(|i| m & (1 << i) != 0).map(|i| set[i]).collect()).collect()
}

impl SkipIndex {
    /// An index with no tuples. `k` bounds the forbidden-set size.
    pub fn new(k: usize, radius: u32) -> Self {
        SkipIndex { k, radius, entries: FxHashMap::default() }
    }

    /// Computes every pointer by a backward pass over the list.
    pub fn build<S: Structure + ?Sized>(s: &S, list: &CenteredTupleList, k: usize, radius: u32) -> Self {
        let mut idx = SkipIndex::new(k, radius);
        for b in list.iter().rev() {
            let e = idx.compute(s, list, b);
            idx.entries.insert(b.clone(), e);
        }
        idx
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Stored sets of `b` with their pointers.
    pub fn stored(&self, b: &[VertexId]) -> Option<&[(VSet, Option<Tuple>)]> {
        self.entries.get(b).map(Vec::as_slice)
    }

    /// Whether no element of `t` lies within the radius of `set`.
    pub fn disjoint<S: Structure + ?Sized>(&self, s: &S, t: &[VertexId], set: &[VertexId]) -> bool {
        t.iter().all(|&x| set.iter().all(|&a| !s.within(x, a, self.radius)))
    }

    /// `sk(b, I)` for any set of at most `k` vertices.
    pub fn skip<'l, S: Structure + ?Sized>(
        &self,
        s: &S,
        list: &'l CenteredTupleList,
        b: &[VertexId],
        set: &[VertexId],
    ) -> Result<Option<&'l Tuple>, SkipError> {
        if !list.contains(b) {
            return Err(SkipError::TupleNotInList(b.iter().copied().collect()));
        }
        let mut set: VSet = set.iter().copied().collect();
        set.sort_unstable();
        set.dedup();
        assert!(set.len() <= self.k, "forbidden set larger than k");
        let Some(next) = list.next_after(b) else {
            return Ok(None);
        };
        if self.disjoint(s, next, &set) {
            return Ok(Some(next));
        }
        let entry = &self.entries[next.as_slice()];
        for j in subsets_desc(&set) {
            if let Some(ptr) = lookup(entry, &j) {
                // The list owns an equal tuple; return its reference.
                return Ok(ptr.as_ref().map(|t| list.order.get(t).expect("pointer into list")));
            }
        }
        unreachable!("an element of the forbidden set is near the successor, so its singleton is stored")
    }

    /// First listed tuple disjoint from the neighborhood of `set`.
    pub fn first<'l, S: Structure + ?Sized>(
        &self,
        s: &S,
        list: &'l CenteredTupleList,
        set: &[VertexId],
    ) -> Option<&'l Tuple> {
        let head = list.first()?;
        if self.disjoint(s, head, set) {
            Some(head)
        } else {
            self.skip(s, list, head, set).expect("listed")
        }
    }

    /// Entry of `b` from the (already final) entry of its successor.
    fn compute<S: Structure + ?Sized>(&self, s: &S, list: &CenteredTupleList, b: &[VertexId]) -> Entry {
        let next = list.next_after(b);
        let next_entry = next.map(|n| &self.entries[n.as_slice()]);
        let near_next = next.map(|n| near_set(s, n, self.radius));
        let sk = |set: &VSet| -> Option<Tuple> {
            let n = next?;
            if set.iter().all(|a| !near_next.as_ref().unwrap().contains(a)) {
                return Some(n.clone());
            }
            let e = next_entry.unwrap();
            subsets_desc(set).iter().find_map(|j| lookup(e, j)).cloned().expect("nonempty maximal subset")
        };
        let mut out: FxHashMap<VSet, Option<Tuple>> = FxHashMap::default();
        let mut frontier: Vec<VSet> = Vec::new();
        for a in near_set(s, b, self.radius) {
            let set: VSet = SmallVec::from_slice(&[a]);
            out.insert(set.clone(), sk(&set));
            frontier.push(set);
        }
        let mut balls: FxHashMap<Tuple, Vec<VertexId>> = FxHashMap::default();
        while let Some(set) = frontier.pop() {
            if set.len() >= self.k {
                continue;
            }
            let Some(t) = out[&set].clone() else { continue };
            let near: &Vec<VertexId> = balls.entry(t.clone()).or_insert_with(|| {
                let mut v: Vec<VertexId> = near_set(s, &t, self.radius).into_iter().collect();
                v.sort_unstable();
                v
            });
            for &a in near.iter() {
                if set.contains(&a) {
                    continue;
                }
                let mut bigger = set.clone();
                bigger.push(a);
                bigger.sort_unstable();
                if !out.contains_key(&bigger) {
                    let p = sk(&bigger);
                    out.insert(bigger.clone(), p);
                    frontier.push(bigger);
                }
            }
        }
        let mut entry: Entry = out.into_iter().collect();
        entry.sort_unstable_by(|x, y| x.0.cmp(&y.0));
        entry
    }

    /// Before the list changes: the listed tuples whose pointers may depend
    /// on distances around `near` (tuples with an element whose neighborhood
    /// is about to change), found by walking back from each of them while the
    /// predecessor still points at it.
    pub fn seeds(&self, list: &CenteredTupleList, near: &[Tuple]) -> Vec<Tuple> {
        let mut out = Vec::new();
        for u in near {
            if !list.contains(u) {
                continue;
            }
            out.push(u.clone());
            let mut cur = u.as_slice();
            while let Some(p) = list.prev_before(cur) {
                out.push(p.clone());
                let points = self.entries[p.as_slice()].iter().any(|(_, t)| t.as_ref() == Some(u));
                if !points {
                    break;
                }
                cur = p.as_slice();
            }
        }
        out
    }

    /// After the list changed by `removed`/`inserted` and the graph settled:
    /// recomputes the dirty entries from last to first, propagating to the
    /// predecessor whenever an entry changes.
    pub fn repair<S: Structure + ?Sized>(
        &mut self,
        s: &S,
        list: &CenteredTupleList,
        removed: &[Tuple],
        inserted: &[Tuple],
        seeds: Vec<Tuple>,
    ) {
        for t in removed {
            self.entries.remove(t);
        }
        let mut dirty: BTreeSet<Tuple> = BTreeSet::new();
        for t in removed.iter().chain(inserted).chain(&seeds) {
            if list.contains(t) {
                dirty.insert(t.clone());
            }
            if let Some(p) = list.prev_before(t) {
                dirty.insert(p.clone());
            }
        }
        while let Some(b) = dirty.pop_last() {
            let e = self.compute(s, list, &b);
            let changed = self.entries.get(&b) != Some(&e);
            if changed {
                if let Some(p) = list.prev_before(&b) {
                    dirty.insert(p.clone());
                }
                self.entries.insert(b, e);
            }
        }
    }

    /// Inserts one tuple into the list and patches the index.
    pub fn insert<S: Structure + ?Sized>(
        &mut self,
        s: &S,
        list: &mut CenteredTupleList,
        t: Tuple,
    ) -> Result<(), SkipError> {
        if list.contains(&t) {
            return Err(SkipError::DuplicateTuple(t));
        }
        list.insert(t.clone());
        self.repair(s, list, &[], &[t], Vec::new());
        Ok(())
    }

    /// Removes one tuple from the list and patches the index.
    pub fn remove<S: Structure + ?Sized>(
        &mut self,
        s: &S,
        list: &mut CenteredTupleList,
        t: &[VertexId],
    ) -> Result<(), SkipError> {
        if !list.remove(t) {
            return Err(SkipError::TupleNotInList(t.iter().copied().collect()));
        }
        self.repair(s, list, &[t.iter().copied().collect()], &[], Vec::new());
        Ok(())
    }

    /// Largest number of stored sets of any tuple.
    pub fn max_stored(&self) -> usize {
        self.entries.values().map(Vec::len).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `sk(b, I)` by linear scan.
pub fn skip_by_scan<'l, S: Structure + ?Sized>(
    s: &S,
    list: &'l CenteredTupleList,
    radius: u32,
    b: &[VertexId],
    set: &[VertexId],
) -> Option<&'l Tuple> {
    list.order
        .range::<[VertexId], _>((Bound::Excluded(b), Bound::Unbounded))
        .find(|t| t.iter().all(|&x| set.iter().all(|&a| !s.within(x, a, radius))))
}
