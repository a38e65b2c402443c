//! First-order terms, substitutions and unification.
//!
//! Everything the engine reasons about (propositions, attitudes, actions)
//! is a [`Term`]. The canonical text syntax is `functor(arg1, arg2)` with
//! lowercase atoms and `?name` (or anonymous `?`) variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Atom(String),
    Compound(String, Vec<Term>),
    /// Stored without the leading `?`.
    Var(String),
}

impl Term {
    pub fn atom(name: impl AsRef<str>) -> Term {
        let name = name.as_ref().to_lowercase();
        debug_assert!(!name.is_empty() && !name.starts_with('?'));
        Term::Atom(name)
    }

    /// Builds `functor(args..)`. A nullary compound collapses to an atom.
    pub fn compound(functor: impl AsRef<str>, args: Vec<Term>) -> Term {
        if args.is_empty() {
            return Term::atom(functor);
        }
        let functor = functor.as_ref().to_lowercase();
        debug_assert!(!functor.is_empty() && !functor.starts_with('?'));
        Term::Compound(functor, args)
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    /// `not(t)`
    pub fn not(t: Term) -> Term {
        Term::Compound("not".into(), vec![t])
    }

    /// Functor name for compounds, the name itself for atoms.
    pub fn functor(&self) -> Option<&str> {
        match self {
            Term::Atom(a) => Some(a),
            Term::Compound(f, _) => Some(f),
            Term::Var(_) => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound(_, args) => args,
            _ => &[],
        }
    }

    pub fn arity(&self) -> usize {
        self.args().len()
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Atom(_) => true,
            Term::Var(_) => false,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// If this is `not(x)`, returns `x`.
    pub fn negated(&self) -> Option<&Term> {
        match self {
            Term::Compound(f, args) if f == "not" && args.len() == 1 => Some(&args[0]),
            _ => None,
        }
    }

    /// The negation of this term, collapsing a double negation.
    pub fn negation(&self) -> Term {
        match self.negated() {
            Some(inner) => inner.clone(),
            None => Term::not(self.clone()),
        }
    }

    pub fn occurs(&self, var: &str) -> bool {
        match self {
            Term::Var(v) => v == var,
            Term::Atom(_) => false,
            Term::Compound(_, args) => args.iter().any(|a| a.occurs(var)),
        }
    }

    /// Variable names in first-occurrence order, without duplicates.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.iter().any(|o| o == v) {
                    out.push(v.clone());
                }
            }
            Term::Atom(_) => {}
            Term::Compound(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Renames variables in-place via `f`.
    pub fn map_vars(&self, f: &mut impl FnMut(&str) -> Term) -> Term {
        match self {
            Term::Var(v) => f(v),
            Term::Atom(_) => self.clone(),
            Term::Compound(name, args) => {
                Term::Compound(name.clone(), args.iter().map(|a| a.map_vars(f)).collect())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Atom(a) => f.write_str(a),
            Term::Var(v) => write!(f, "?{v}"),
            Term::Compound(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for Term {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_term(s)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_term(&s).map_err(serde::de::Error::custom)
    }
}

/// Variable bindings. Kept idempotent: no bound variable appears in any
/// binding's value after [`Substitution::unify`] returns.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.bindings.iter()
    }

    /// Adds a binding without any checks. Callers that build substitutions
    /// by hand are responsible for the occurs-check.
    pub fn insert(&mut self, var: impl Into<String>, t: Term) {
        self.bindings.insert(var.into(), t);
    }

    /// Applies the substitution, chasing chains of bindings to a fixpoint.
    pub fn apply(&self, t: &Term) -> Term {
        if self.bindings.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => match self.bindings.get(v) {
                Some(bound) if bound != t => self.apply(bound),
                _ => t.clone(),
            },
            Term::Atom(_) => t.clone(),
            Term::Compound(f, args) => {
                Term::Compound(f.clone(), args.iter().map(|a| self.apply(a)).collect())
            }
        }
    }

    fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.bindings.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    fn bind(&mut self, var: &str, t: Term) -> bool {
        let t = self.apply(&t);
        if t.occurs(var) {
            return false;
        }
        // keep every stored value fully resolved
        let single = Substitution {
            bindings: BTreeMap::from([(var.to_string(), t.clone())]),
        };
        for value in self.bindings.values_mut() {
            if value.occurs(var) {
                *value = single.apply(value);
            }
        }
        self.bindings.insert(var.to_string(), t);
        true
    }

    /// Most general unifier of `a` and `b` extending `self`, or `None`.
    pub fn unify(&self, a: &Term, b: &Term) -> Option<Substitution> {
        let mut s = self.clone();
        if s.unify_in_place(a, b) {
            Some(s)
        } else {
            None
        }
    }

    fn unify_in_place(&mut self, a: &Term, b: &Term) -> bool {
        let a = self.walk(a).clone();
        let b = self.walk(b).clone();
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), _) => self.bind(x, b.clone()),
            (_, Term::Var(y)) => self.bind(y, a.clone()),
            (Term::Atom(x), Term::Atom(y)) => x == y,
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                f == g
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| self.unify_in_place(x, y))
            }
            _ => false,
        }
    }
}

/// Convenience wrapper: `unify(a, b, s)`.
pub fn unify(a: &Term, b: &Term, s: &Substitution) -> Option<Substitution> {
    s.unify(a, b)
}

pub fn unifiable(a: &Term, b: &Term) -> bool {
    Substitution::new().unify(a, b).is_some()
}

/// Renames every variable of `t` to `?v<counter>`, `?v<counter+1>`, ... in
/// first-occurrence order. Returns the renamed term and the next free counter.
pub fn rename_apart(t: &Term, counter: usize) -> (Term, usize) {
    let mut names: BTreeMap<String, usize> = BTreeMap::new();
    let mut next = counter;
    let renamed = t.map_vars(&mut |v| {
        let n = *names.entry(v.to_string()).or_insert_with(|| {
            next += 1;
            next - 1
        });
        Term::Var(format!("v{n}"))
    });
    (renamed, next)
}

/// Renames a group of terms consistently (shared variables stay shared).
pub fn rename_apart_all(ts: &[Term], counter: usize) -> (Vec<Term>, usize) {
    let wrapper = Term::Compound("group".into(), ts.to_vec());
    let (renamed, next) = rename_apart(&wrapper, counter);
    match renamed {
        Term::Compound(_, args) => (args, next),
        _ => (Vec::new(), next),
    }
}

pub type TermSet = BTreeSet<Term>;

/// A character cursor with line/column tracking, shared by the term parser
/// and the scenario reader.
pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
    anon: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0, line: 1, col: 1, anon: 0 }
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    pub(crate) fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    pub(crate) fn position(&self) -> (usize, usize) {
        (self.line, self.col)
    }

    pub(crate) fn mark(&self) -> (usize, usize, usize) {
        (self.pos, self.line, self.col)
    }

    pub(crate) fn reset(&mut self, mark: (usize, usize, usize)) {
        (self.pos, self.line, self.col) = mark;
    }

    /// Reads a bare symbol, which unlike an identifier may contain `-`.
    pub(crate) fn symbol(&mut self) -> Option<String> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if is_ident_char(c) || c == '-') {
            self.bump();
        }
        (self.pos > start).then(|| self.src[start..self.pos].to_lowercase())
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    /// Skips whitespace and `;` line comments.
    pub(crate) fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.col, message: message.into() }
    }

    pub(crate) fn ident(&mut self) -> Option<String> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if is_ident_char(c)) {
            self.bump();
        }
        (self.pos > start).then(|| self.src[start..self.pos].to_string())
    }

    /// Parses one term. When `spaced_functor` is false, a `(` only opens an
    /// argument list if it directly follows the functor.
    pub(crate) fn term(&mut self, spaced_functor: bool) -> Result<Term, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('?') => {
                self.bump();
                match self.ident() {
                    Some(name) => Ok(Term::Var(name)),
                    None => {
                        self.anon += 1;
                        Ok(Term::Var(format!("_{}", self.anon - 1)))
                    }
                }
            }
            Some(c) if is_ident_char(c) => {
                let name = self.ident().unwrap_or_default();
                let save = (self.pos, self.line, self.col);
                if spaced_functor {
                    self.skip_ws();
                }
                if self.peek() == Some('(') {
                    self.bump();
                    let mut args = vec![self.term(spaced_functor)?];
                    loop {
                        self.skip_ws();
                        match self.peek() {
                            Some(',') => {
                                self.bump();
                                args.push(self.term(spaced_functor)?);
                            }
                            Some(')') => {
                                self.bump();
                                break;
                            }
                            Some(c) => {
                                return Err(self.error(format!("expected ',' or ')', found '{c}'")))
                            }
                            None => return Err(self.error("unterminated argument list")),
                        }
                    }
                    Ok(Term::compound(name, args))
                } else {
                    (self.pos, self.line, self.col) = save;
                    Ok(Term::atom(name))
                }
            }
            Some(c) => Err(self.error(format!("unexpected character '{c}'"))),
            None => Err(self.error("expected a term, found end of input")),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Parses a single term in canonical syntax. Whitespace between tokens is
/// ignored, including between a functor and its `(`.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut cur = Cursor::new(src);
    let t = cur.term(true)?;
    cur.skip_ws();
    if !cur.at_end() {
        return Err(cur.error("trailing input after term"));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn unify_binds_variable() {
        let s = unify(&t("switch(?a, computer_off)"), &t("switch(system, computer_off)"), &Substitution::new()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.get("a"), Some(&t("system")));
    }

    #[test]
    fn unify_identical_ground_terms_is_empty() {
        let s = unify(&t("damage(hard_drive)"), &t("damage(hard_drive)"), &Substitution::new()).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn occurs_check_fails() {
        assert!(unify(&t("?x"), &t("cause(?x, p)"), &Substitution::new()).is_none());
    }

    #[test]
    fn clash_fails() {
        assert!(unify(&t("f(a)"), &t("g(a)"), &Substitution::new()).is_none());
        assert!(unify(&t("f(a)"), &t("f(a, b)"), &Substitution::new()).is_none());
    }

    #[test]
    fn apply_examples() {
        let mut s = Substitution::new();
        s.insert("a", t("system"));
        assert_eq!(s.apply(&t("switch(?a, computer_off)")), t("switch(system, computer_off)"));
        let p = t("bel(?h, p)");
        assert_eq!(Substitution::new().apply(&p), p);
        let mut chain = Substitution::new();
        chain.insert("x", t("?y"));
        chain.insert("y", t("b"));
        assert_eq!(chain.apply(&t("f(?x)")), t("f(b)"));
    }

    #[test]
    fn rename_examples() {
        assert_eq!(rename_apart(&t("bel(?h, ?p)"), 0), (t("bel(?v0, ?v1)"), 2));
        assert_eq!(rename_apart(&t("atom_only"), 5), (t("atom_only"), 5));
        assert_eq!(rename_apart(&t("f(?x, ?x)"), 0), (t("f(?v0, ?v0)"), 1));
    }

    #[test]
    fn parse_normalizes_case_and_anonymous_vars() {
        let e = t("goal(Expert, bel(?, cause(switch(?, Computer_off), damage(hard_drive))))");
        assert_eq!(e.to_string(), "goal(expert, bel(?_0, cause(switch(?_1, computer_off), damage(hard_drive))))");
        assert_eq!(t("f ( a ,b )"), t("f(a, b)"));
        assert!(parse_term("f(a,").is_err());
        assert!(parse_term("f(a) b").is_err());
        assert!(parse_term("").is_err());
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            prop::sample::select(vec!["a", "b", "c"]).prop_map(Term::atom),
            prop::sample::select(vec!["x", "y", "z"]).prop_map(Term::var),
        ];
        leaf.prop_recursive(3, 16, 3, |inner| {
            (prop::sample::select(vec!["f", "g"]), prop::collection::vec(inner, 1..3))
                .prop_map(|(f, args)| Term::compound(f, args))
        })
    }

    proptest! {
        #[test]
        fn unifier_equates_both_sides(a in arb_term(), b in arb_term()) {
            let ab = unify(&a, &b, &Substitution::new());
            let ba = unify(&b, &a, &Substitution::new());
            prop_assert_eq!(ab.is_some(), ba.is_some());
            if let Some(s) = ab {
                prop_assert_eq!(s.apply(&a), s.apply(&b));
                // idempotent
                let once = s.apply(&a);
                prop_assert_eq!(s.apply(&once), once.clone());
            }
        }

        #[test]
        fn display_parse_round_trip(a in arb_term()) {
            prop_assert_eq!(parse_term(&a.to_string()).unwrap(), a);
        }

        #[test]
        fn renamed_terms_do_not_share_vars(a in arb_term(), b in arb_term()) {
            let (ra, next) = rename_apart(&a, 0);
            let (rb, _) = rename_apart(&b, next);
            for v in rb.vars() {
                prop_assert!(!ra.occurs(&v));
            }
            prop_assert_eq!(ra.vars().len(), a.vars().len());
        }
    }
}
