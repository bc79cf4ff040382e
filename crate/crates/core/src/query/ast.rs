use std::collections::{BTreeSet, HashMap};
use std::fmt;

/// Variable name.
pub type Var = String;

/// Relativized quantifier: the bound variable ranges over vertices within
/// distance `radius` of at least one anchor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quant {
    pub var: Var,
    pub radius: u32,
    pub anchors: Vec<Var>,
    pub body: Box<Local>,
}

/// Local formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Local {
    Eq(Var, Var),
    Edge(Var, Var),
    Color(String, Var),
    DistLe(u32, Var, Var),
    Not(Box<Local>),
    And(Vec<Local>),
    Or(Vec<Local>),
    Exists(Quant),
    Forall(Quant),
}

impl Local {
    /// Free variables.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<Var>) {
        let mut see = |v: &'a Var, bound: &Vec<&'a str>| {
            if !bound.contains(&v.as_str()) {
                out.insert(v.clone());
            }
        };
        match self {
            Local::Eq(a, b) | Local::Edge(a, b) | Local::DistLe(_, a, b) => {
                see(a, bound);
                see(b, bound);
            }
            Local::Color(_, a) => see(a, bound),
            Local::Not(f) => f.collect_free(bound, out),
            Local::And(fs) | Local::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Local::Exists(q) | Local::Forall(q) => {
                for a in &q.anchors {
                    see(a, bound);
                }
                bound.push(&q.var);
                q.body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Names bound by some quantifier.
    pub fn bound_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Local::Exists(q) | Local::Forall(q) = f {
                out.insert(q.var.clone());
            }
        });
        out
    }

    /// Replaces free occurrences of the mapped variables. Targets must not be
    /// bound anywhere in the formula.
    pub fn rename_free(&self, map: &HashMap<Var, Var>) -> Local {
        let m = |v: &Var| map.get(v).unwrap_or(v).clone();
        match self {
            Local::Eq(a, b) => Local::Eq(m(a), m(b)),
            Local::Edge(a, b) => Local::Edge(m(a), m(b)),
            Local::Color(c, a) => Local::Color(c.clone(), m(a)),
            Local::DistLe(n, a, b) => Local::DistLe(*n, m(a), m(b)),
            Local::Not(f) => Local::Not(Box::new(f.rename_free(map))),
            Local::And(fs) => Local::And(fs.iter().map(|f| f.rename_free(map)).collect()),
            Local::Or(fs) => Local::Or(fs.iter().map(|f| f.rename_free(map)).collect()),
            Local::Exists(q) | Local::Forall(q) => {
                let mut inner = map.clone();
                inner.remove(&q.var);
                let q2 = Quant {
                    var: q.var.clone(),
                    radius: q.radius,
                    anchors: q.anchors.iter().map(m).collect(),
                    body: Box::new(q.body.rename_free(&inner)),
                };
                if matches!(self, Local::Exists(_)) {
                    Local::Exists(q2)
                } else {
                    Local::Forall(q2)
                }
            }
        }
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Local)) {
        f(self);
        match self {
            Local::Not(g) => g.visit(f),
            Local::And(gs) | Local::Or(gs) => gs.iter().for_each(|g| g.visit(f)),
            Local::Exists(q) | Local::Forall(q) => q.body.visit(f),
            _ => {}
        }
    }

    /// Quantifier reach: how far from the free variables evaluation may look.
    /// A quantified variable sits at most `radius + max(anchor bounds)` away
    /// from the free variables; `distle n u v` looks `n` past the closer of its
    /// arguments.
    pub fn reach(&self) -> u32 {
        let mut bounds: HashMap<&str, u32> = HashMap::new();
        self.reach_in(&mut bounds)
    }

    fn reach_in<'a>(&'a self, bounds: &mut HashMap<&'a str, u32>) -> u32 {
        let b = |v: &str, bounds: &HashMap<&str, u32>| bounds.get(v).copied().unwrap_or(0);
        match self {
            Local::Eq(..) | Local::Edge(..) | Local::Color(..) => 0,
            Local::DistLe(n, u, v) => n + b(u, bounds).min(b(v, bounds)),
            Local::Not(f) => f.reach_in(bounds),
            Local::And(fs) | Local::Or(fs) => fs.iter().map(|f| f.reach_in(bounds)).max().unwrap_or(0),
            Local::Exists(q) | Local::Forall(q) => {
                let own = q.radius + q.anchors.iter().map(|a| b(a, bounds)).max().unwrap_or(0);
                let saved = bounds.insert(&q.var, own);
                let inner = q.body.reach_in(bounds);
                match saved {
                    Some(s) => bounds.insert(&q.var, s),
                    None => bounds.remove(q.var.as_str()),
                };
                own.max(inner)
            }
        }
    }
}

/// A centered block of consecutive query variables with its local formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Group {
    pub vars: Vec<Var>,
    pub formula: Local,
    /// Declared locality radius; the clause radius when absent.
    pub radius: Option<u32>,
}

/// Distance type over `k` positions: the pairs `(i, j)`, `i < j`, 0-based,
/// whose elements lie within the distance threshold.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DistanceType {
    pub k: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl DistanceType {
    pub fn new(k: usize) -> Self {
        DistanceType { k, edges: BTreeSet::new() }
    }

    /// Adds the unordered pair `{i, j}` (0-based). Loops are ignored.
    pub fn connect(&mut self, i: usize, j: usize) {
        assert!(i < self.k && j < self.k, "index out of range");
        if i != j {
            self.edges.insert((i.min(j), i.max(j)));
        }
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    /// Restriction to the given positions, renumbered in the given order.
    pub fn restrict(&self, positions: &[usize]) -> DistanceType {
        let mut out = DistanceType::new(positions.len());
        for (a, &i) in positions.iter().enumerate() {
            for (b, &j) in positions.iter().enumerate().skip(a + 1) {
                if self.contains(i, j) {
                    out.connect(a, b);
                }
            }
        }
        out
    }

    /// Connected components as sorted index lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.k).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let n = p[c];
                p[c] = r;
                c = n;
            }
            r
        }
        for &(i, j) in &self.edges {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; self.k];
        for i in 0..self.k {
            let root = find(&mut parent, i);
            if slot[root] == usize::MAX {
                slot[root] = comps.len();
                comps.push(Vec::new());
            }
            comps[slot[root]].push(i);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.k <= 1 || self.components().len() == 1
    }
}

/// `(clause r group+ (tau pair*))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub r: u32,
    pub groups: Vec<Group>,
    pub tau: DistanceType,
}

impl Clause {
    pub fn group_radius(&self, g: usize) -> u32 {
        self.groups[g].radius.unwrap_or(self.r)
    }
}

/// There are `s` vertices, pairwise at distance more than `2r`, each satisfying `alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScatteredSentence {
    pub name: String,
    pub s: u32,
    pub r: u32,
    pub alpha: Local,
}

impl ScatteredSentence {
    /// The single free variable of `alpha`.
    pub fn var(&self) -> Var {
        self.alpha.free_vars().into_iter().next().expect("validated sentence")
    }
}

/// Boolean combination of sentence names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Guard {
    Name(String),
    Not(Box<Guard>),
    And(Vec<Guard>),
    Or(Vec<Guard>),
}

impl Guard {
    pub fn eval(&self, truth: &impl Fn(&str) -> bool) -> bool {
        match self {
            Guard::Name(n) => truth(n),
            Guard::Not(g) => !g.eval(truth),
            Guard::And(gs) => gs.iter().all(|g| g.eval(truth)),
            Guard::Or(gs) => gs.iter().any(|g| g.eval(truth)),
        }
    }
}

/// `(case guard clause*)`; a `None` guard is `else`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Case {
    pub guard: Option<Guard>,
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    pub vars: Vec<Var>,
    pub sentences: Vec<ScatteredSentence>,
    pub cases: Vec<Case>,
}

impl Query {
    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn sentence(&self, name: &str) -> Option<&ScatteredSentence> {
        self.sentences.iter().find(|s| s.name == name)
    }

    /// Index of the first case whose guard holds.
    pub fn active_case(&self, truth: impl Fn(&str) -> bool) -> Option<usize> {
        self.cases.iter().position(|c| c.guard.as_ref().is_none_or(|g| g.eval(&truth)))
    }
}

// Printing, in the grammar accepted by the parser.

fn write_vars(f: &mut fmt::Formatter<'_>, vars: &[Var]) -> fmt::Result {
    for (i, v) in vars.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        f.write_str(v)?;
    }
    Ok(())
}

impl fmt::Display for Local {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, fs: &[Local]| {
            write!(f, "({head}")?;
            for g in fs {
                write!(f, " {g}")?;
            }
            f.write_str(")")
        };
        match self {
            Local::Eq(a, b) => write!(f, "(= {a} {b})"),
            Local::Edge(a, b) => write!(f, "(edge {a} {b})"),
            Local::Color(c, a) => write!(f, "(color {c} {a})"),
            Local::DistLe(n, a, b) => write!(f, "(distle {n} {a} {b})"),
            Local::Not(g) => write!(f, "(not {g})"),
            Local::And(gs) => list(f, "and", gs),
            Local::Or(gs) => list(f, "or", gs),
            Local::Exists(q) | Local::Forall(q) => {
                let head = if matches!(self, Local::Exists(_)) { "exists" } else { "forall" };
                write!(f, "({head} ({} {} (anchors ", q.var, q.radius)?;
                write_vars(f, &q.anchors)?;
                write!(f, ")) {})", q.body)
            }
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, gs: &[Guard]| {
            write!(f, "({head}")?;
            for g in gs {
                write!(f, " {g}")?;
            }
            f.write_str(")")
        };
        match self {
            Guard::Name(n) => f.write_str(n),
            Guard::Not(g) => write!(f, "(not {g})"),
            Guard::And(gs) => list(f, "and", gs),
            Guard::Or(gs) => list(f, "or", gs),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(clause {}", self.r)?;
        for g in &self.groups {
            f.write_str(" (group (")?;
            write_vars(f, &g.vars)?;
            write!(f, ") {}", g.formula)?;
            if let Some(r) = g.radius {
                write!(f, " {r}")?;
            }
            f.write_str(")")?;
        }
        f.write_str(" (tau")?;
        for &(i, j) in &self.tau.edges {
            write!(f, " ({} {})", i + 1, j + 1)?;
        }
        f.write_str("))")
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(query (vars")?;
        for v in &self.vars {
            write!(f, " {v}")?;
        }
        f.write_str(")")?;
        for s in &self.sentences {
            write!(f, "\n  (sentence {} {} {} {})", s.name, s.s, s.r, s.alpha)?;
        }
        for c in &self.cases {
            match &c.guard {
                Some(g) => write!(f, "\n  (case {g}")?,
                None => f.write_str("\n  (case else")?,
            }
            for cl in &c.clauses {
                write!(f, "\n    {cl}")?;
            }
            f.write_str(")")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(var: &str, radius: u32, anchors: &[&str], body: Local) -> Quant {
        Quant { var: var.into(), radius, anchors: anchors.iter().map(|s| s.to_string()).collect(), body: Box::new(body) }
    }

    #[test]
    fn reach_accumulates_along_anchor_chains() {
        // y within 1 of x, z within 2 of y: z may sit 3 away.
        let f = Local::Exists(q(
            "y",
            1,
            &["x"],
            Local::Exists(q("z", 2, &["y"], Local::DistLe(1, "z".into(), "x".into()))),
        ));
        assert_eq!(f.reach(), 3);
        assert_eq!(Local::DistLe(4, "x".into(), "y".into()).reach(), 4);
        assert_eq!(Local::Color("Red".into(), "x".into()).reach(), 0);
    }

    #[test]
    fn free_and_bound_vars() {
        let f = Local::And(vec![
            Local::Exists(q("y", 1, &["x"], Local::Edge("x".into(), "y".into()))),
            Local::Color("Red".into(), "w".into()),
        ]);
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec!["w".to_string(), "x".to_string()]);
        assert_eq!(f.bound_vars().len(), 1);
    }

    #[test]
    fn distance_type_components() {
        let mut t = DistanceType::new(4);
        t.connect(0, 2);
        t.connect(3, 1);
        assert_eq!(t.components(), vec![vec![0, 2], vec![1, 3]]);
        assert!(!t.is_connected());
        assert!(t.restrict(&[0, 2]).is_connected());
        assert_eq!(t.restrict(&[1, 0]).edges.len(), 0);
    }
}
