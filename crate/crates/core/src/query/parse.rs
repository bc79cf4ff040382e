//! S-expression reader and query parser.
//!
//! Scope rules are enforced while the tree is converted: group formulas see
//! the group's variables, quantifiers may not shadow, and guards may only name
//! sentences defined earlier. `;` starts a comment.

use std::collections::BTreeSet;

use super::ast::*;
use super::QueryError;

#[derive(Debug, Clone)]
enum SExpr {
    Atom { text: String, line: usize, col: usize },
    List { items: Vec<SExpr>, line: usize, col: usize },
}

impl SExpr {
    fn pos(&self) -> (usize, usize) {
        match self {
            SExpr::Atom { line, col, .. } | SExpr::List { line, col, .. } => (*line, *col),
        }
    }

    fn atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom { text, .. } => Some(text),
            SExpr::List { .. } => None,
        }
    }

    fn list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List { items, .. } => Some(items),
            SExpr::Atom { .. } => None,
        }
    }

    fn err(&self, msg: impl Into<String>) -> QueryError {
        let (line, col) = self.pos();
        QueryError::Syntax { line, col, msg: msg.into() }
    }

    /// The items of a list headed by `head`.
    fn headed(&self, head: &str) -> Result<&[SExpr], QueryError> {
        match self.list() {
            Some([h, rest @ ..]) if h.atom() == Some(head) => Ok(rest),
            _ => Err(self.err(format!("expected `({head} ...)`"))),
        }
    }

    fn int(&self) -> Result<u32, QueryError> {
        self.atom().and_then(|t| t.parse().ok()).ok_or_else(|| self.err("expected a non-negative integer"))
    }

    fn name(&self) -> Result<&str, QueryError> {
        match self.atom() {
            Some(t) if is_name(t) => Ok(t),
            _ => Err(self.err("expected a name")),
        }
    }
}

fn is_name(t: &str) -> bool {
    let mut chars = t.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '\'')
}

fn read(text: &str) -> Result<SExpr, QueryError> {
    let mut stack: Vec<(usize, usize, Vec<SExpr>)> = Vec::new();
    let mut top: Option<SExpr> = None;
    let mut push = |stack: &mut Vec<(usize, usize, Vec<SExpr>)>, e: SExpr| -> Result<(), QueryError> {
        match stack.last_mut() {
            Some((_, _, items)) => items.push(e),
            None if top.is_none() => top = Some(e),
            None => {
                let (line, col) = e.pos();
                return Err(QueryError::Syntax { line, col, msg: "trailing input after query".into() });
            }
        }
        Ok(())
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split(';').next().unwrap_or("");
        let mut chars = body.char_indices().peekable();
        while let Some((pos, ch)) = chars.next() {
            let col = body[..pos].chars().count() + 1;
            match ch {
                '(' => stack.push((line, col, Vec::new())),
                ')' => {
                    let (l, c, items) = stack
                        .pop()
                        .ok_or(QueryError::Syntax { line, col, msg: "unbalanced `)`".into() })?;
                    push(&mut stack, SExpr::List { items, line: l, col: c })?;
                }
                c if c.is_whitespace() => {}
                _ => {
                    let mut end = pos + ch.len_utf8();
                    while let Some(&(p, c)) = chars.peek() {
                        if c.is_whitespace() || c == '(' || c == ')' {
                            break;
                        }
                        end = p + c.len_utf8();
                        chars.next();
                    }
                    push(&mut stack, SExpr::Atom { text: body[pos..end].to_string(), line, col })?;
                }
            }
        }
    }
    if let Some((line, col, _)) = stack.pop() {
        return Err(QueryError::Syntax { line, col, msg: "unbalanced `(`".into() });
    }
    top.ok_or(QueryError::Syntax { line: 1, col: 1, msg: "empty input".into() })
}

/// Variable scope during formula conversion. In open mode (sentence bodies)
/// unknown names become free variables.
struct Scope<'a> {
    names: Vec<&'a str>,
    open: Option<BTreeSet<String>>,
}

impl<'a> Scope<'a> {
    fn var(&mut self, e: &'a SExpr) -> Result<Var, QueryError> {
        let n = e.name()?;
        if !self.names.contains(&n) {
            match &mut self.open {
                Some(free) => {
                    free.insert(n.to_string());
                }
                None => {
                    let (line, col) = e.pos();
                    return Err(QueryError::UnboundVariable { name: n.into(), line, col });
                }
            }
        }
        Ok(n.to_string())
    }
}

fn local<'a>(e: &'a SExpr, scope: &mut Scope<'a>) -> Result<Local, QueryError> {
    let items = e.list().ok_or_else(|| e.err("expected a formula"))?;
    let (head, args) = items.split_first().ok_or_else(|| e.err("empty formula"))?;
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(e.err(format!("`{}` takes {n} arguments", head.atom().unwrap_or("?"))))
        }
    };
    let nonempty = || if args.is_empty() { Err(e.err("expected at least one subformula")) } else { Ok(()) };
    Ok(match head.atom() {
        Some("=") => {
            arity(2)?;
            Local::Eq(scope.var(&args[0])?, scope.var(&args[1])?)
        }
        Some("edge") => {
            arity(2)?;
            Local::Edge(scope.var(&args[0])?, scope.var(&args[1])?)
        }
        Some("color") => {
            arity(2)?;
            Local::Color(args[0].name()?.to_string(), scope.var(&args[1])?)
        }
        Some("distle") => {
            arity(3)?;
            Local::DistLe(args[0].int()?, scope.var(&args[1])?, scope.var(&args[2])?)
        }
        Some("not") => {
            arity(1)?;
            Local::Not(Box::new(local(&args[0], scope)?))
        }
        Some("and") => {
            nonempty()?;
            Local::And(args.iter().map(|a| local(a, scope)).collect::<Result<_, _>>()?)
        }
        Some("or") => {
            nonempty()?;
            Local::Or(args.iter().map(|a| local(a, scope)).collect::<Result<_, _>>()?)
        }
        Some(h @ ("exists" | "forall")) => {
            arity(2)?;
            let binder = match args[0].list() {
                Some([v, n, anchors]) => (v, n, anchors),
                _ => return Err(args[0].err("expected `(VAR INT (anchors VAR+))`")),
            };
            let (v, n, anchors) = binder;
            let name = v.name()?;
            let anchor_items = anchors.headed("anchors")?;
            if anchor_items.is_empty() {
                return Err(anchors.err("expected at least one anchor"));
            }
            let anchors = anchor_items.iter().map(|a| scope.var(a)).collect::<Result<Vec<_>, _>>()?;
            let clash = scope.names.contains(&name) || scope.open.as_ref().is_some_and(|f| f.contains(name));
            if clash {
                let (line, col) = v.pos();
                return Err(QueryError::DuplicateName { name: name.into(), line, col });
            }
            scope.names.push(name);
            let body = local(&args[1], scope);
            scope.names.pop();
            let q = Quant { var: name.to_string(), radius: n.int()?, anchors, body: Box::new(body?) };
            if h == "exists" {
                Local::Exists(q)
            } else {
                Local::Forall(q)
            }
        }
        _ => return Err(head.err("unknown formula head")),
    })
}

fn guard(e: &SExpr, sentences: &[ScatteredSentence]) -> Result<Guard, QueryError> {
    if let Some(n) = e.atom() {
        if !sentences.iter().any(|s| s.name == n) {
            let (line, col) = e.pos();
            return Err(QueryError::UnknownSentence { name: n.into(), line, col });
        }
        return Ok(Guard::Name(n.into()));
    }
    let items = e.list().unwrap_or_default();
    let (head, args) = items.split_first().ok_or_else(|| e.err("empty guard"))?;
    let subs = || args.iter().map(|a| guard(a, sentences)).collect::<Result<Vec<_>, _>>();
    match head.atom() {
        Some("not") if args.len() == 1 => Ok(Guard::Not(Box::new(guard(&args[0], sentences)?))),
        Some("and") if !args.is_empty() => Ok(Guard::And(subs()?)),
        Some("or") if !args.is_empty() => Ok(Guard::Or(subs()?)),
        _ => Err(e.err("malformed guard")),
    }
}

fn sentence(e: &SExpr, rest: &[SExpr], known: &[ScatteredSentence]) -> Result<ScatteredSentence, QueryError> {
    let [name, s, r, alpha] = rest else {
        return Err(e.err("expected `(sentence NAME INT INT FORMULA)`"));
    };
    let n = name.name()?;
    if n == "else" {
        return Err(name.err("`else` is reserved"));
    }
    if known.iter().any(|k| k.name == n) {
        let (line, col) = name.pos();
        return Err(QueryError::DuplicateName { name: n.into(), line, col });
    }
    let mut scope = Scope { names: Vec::new(), open: Some(BTreeSet::new()) };
    let alpha_ast = local(alpha, &mut scope)?;
    let free = scope.open.unwrap_or_default();
    if let Some(b) = alpha_ast.bound_vars().intersection(&free).next() {
        let (line, col) = alpha.pos();
        return Err(QueryError::DuplicateName { name: b.clone(), line, col });
    }
    if free.len() != 1 {
        return Err(QueryError::SentenceArity { name: n.into(), found: free.len() });
    }
    Ok(ScatteredSentence { name: n.into(), s: s.int()?, r: r.int()?, alpha: alpha_ast })
}

fn clause(e: &SExpr, vars: &[Var]) -> Result<Clause, QueryError> {
    let rest = e.headed("clause")?;
    let (r, rest) = rest.split_first().ok_or_else(|| e.err("expected clause radius"))?;
    let (tau_e, groups_e) = rest.split_last().ok_or_else(|| e.err("expected `(tau ...)`"))?;
    let mut groups = Vec::new();
    let mut seen: Vec<&str> = Vec::new();
    for g in groups_e {
        let items = g.headed("group")?;
        let (gvars, formula, radius) = match items {
            [v, f] => (v, f, None),
            [v, f, r] => (v, f, Some(r.int()?)),
            _ => return Err(g.err("expected `(group (VAR+) FORMULA [INT])`")),
        };
        let gv = gvars.list().filter(|l| !l.is_empty()).ok_or_else(|| gvars.err("expected `(VAR+)`"))?;
        let mut names = Vec::new();
        for v in gv {
            let n = v.name()?;
            let (line, col) = v.pos();
            if !vars.iter().any(|x| x == n) {
                return Err(QueryError::UnboundVariable { name: n.into(), line, col });
            }
            if seen.contains(&n) {
                return Err(QueryError::DuplicateName { name: n.into(), line, col });
            }
            seen.push(n);
            names.push(n);
        }
        let mut scope = Scope { names: names.clone(), open: None };
        let f = local(formula, &mut scope)?;
        groups.push(Group { vars: names.into_iter().map(String::from).collect(), formula: f, radius });
    }
    let k = seen.len();
    let mut tau = DistanceType::new(k);
    for pair in tau_e.headed("tau")? {
        let (i, j) = match pair.list() {
            Some([i, j]) => (i.int()? as usize, j.int()? as usize),
            _ => return Err(pair.err("expected `(INDEX INDEX)`")),
        };
        if i == 0 || j == 0 || i > k || j > k || i == j {
            return Err(pair.err(format!("pair must be two distinct indices in 1..={k}")));
        }
        tau.connect(i - 1, j - 1);
    }
    Ok(Clause { r: r.int()?, groups, tau })
}

/// Parses a query. Only scoping is checked here; see [`super::validate`].
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let top = read(text)?;
    let items = top.headed("query")?;
    let (vars_e, rest) = items.split_first().ok_or_else(|| top.err("expected `(vars ...)`"))?;
    let mut vars: Vec<Var> = Vec::new();
    for v in vars_e.headed("vars")? {
        let n = v.name()?;
        if vars.iter().any(|x| x == n) {
            let (line, col) = v.pos();
            return Err(QueryError::DuplicateName { name: n.into(), line, col });
        }
        vars.push(n.into());
    }
    let mut sentences = Vec::new();
    let mut cases = Vec::new();
    for e in rest {
        match e.list().and_then(|l| l.first()).and_then(SExpr::atom) {
            Some("sentence") if cases.is_empty() => {
                let s = sentence(e, &e.list().unwrap_or_default()[1..], &sentences)?;
                sentences.push(s);
            }
            Some("case") => {
                let body = &e.list().unwrap_or_default()[1..];
                let (g, clauses) = body.split_first().ok_or_else(|| e.err("expected a guard"))?;
                let guard = if g.atom() == Some("else") { None } else { Some(guard(g, &sentences)?) };
                let clauses = clauses.iter().map(|c| clause(c, &vars)).collect::<Result<_, _>>()?;
                cases.push(Case { guard, clauses });
            }
            _ => return Err(e.err("expected `(sentence ...)` or `(case ...)`")),
        }
    }
    if cases.is_empty() {
        return Err(top.err("expected at least one case"));
    }
    Ok(Query { vars, sentences, cases })
}
