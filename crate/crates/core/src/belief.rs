//! Nested belief environments.
//!
//! A [`BeliefStore`] maps viewpoint paths to sets of attitudes. The path
//! `[system, expert]` is the system's view of the expert; an attitude stored
//! there omits its agent (the last element of the path supplies it). Terms
//! such as `bel(system, bel(expert, p))` are normalized into this form on the
//! way in and re-rendered on the way out.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::BeliefError;
use crate::term::{rename_apart, Substitution, Term};

/// Deepest nesting a path may reach.
pub const MAX_DEPTH: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ViewpointPath(Vec<String>);

impl ViewpointPath {
    pub fn new<I, S>(agents: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        ViewpointPath(agents.into_iter().map(|a| a.as_ref().to_lowercase()).collect())
    }

    pub fn agents(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<&str> {
        self.0.last().map(String::as_str)
    }

    pub fn child(&self, agent: &str) -> ViewpointPath {
        let mut v = self.0.clone();
        v.push(agent.to_string());
        ViewpointPath(v)
    }

    pub fn starts_with(&self, prefix: &ViewpointPath) -> bool {
        self.0.starts_with(&prefix.0)
    }
}

impl fmt::Display for ViewpointPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttitudeKind {
    Bel,
    Goal,
    Int,
}

impl AttitudeKind {
    pub fn name(self) -> &'static str {
        match self {
            AttitudeKind::Bel => "bel",
            AttitudeKind::Goal => "goal",
            AttitudeKind::Int => "int",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "bel" => Some(AttitudeKind::Bel),
            "goal" => Some(AttitudeKind::Goal),
            "int" => Some(AttitudeKind::Int),
            _ => None,
        }
    }
}

/// An attitude as stored: the agent is implied by the path.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Attitude {
    pub kind: AttitudeKind,
    pub content: Term,
}

impl Attitude {
    pub fn new(kind: AttitudeKind, content: Term) -> Self {
        Attitude { kind, content }
    }

    pub fn bel(content: Term) -> Self {
        Self::new(AttitudeKind::Bel, content)
    }

    pub fn goal(content: Term) -> Self {
        Self::new(AttitudeKind::Goal, content)
    }

    pub fn int(content: Term) -> Self {
        Self::new(AttitudeKind::Int, content)
    }

    /// The agent-less form, `bel(p)`.
    pub fn to_term(&self) -> Term {
        Term::compound(self.kind.name(), vec![self.content.clone()])
    }

    /// The agent-bearing form, `bel(agent, p)`.
    pub fn with_agent(&self, agent: &str) -> Term {
        Term::compound(self.kind.name(), vec![Term::atom(agent), self.content.clone()])
    }

    /// Reads the agent-less form `kind(content)`.
    pub fn from_term(t: &Term) -> Option<Attitude> {
        match t {
            Term::Compound(f, args) if args.len() == 1 => {
                AttitudeKind::from_name(f).map(|k| Attitude::new(k, args[0].clone()))
            }
            _ => None,
        }
    }
}

impl fmt::Display for Attitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

impl Serialize for Attitude {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_term().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Attitude {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let t = Term::deserialize(d)?;
        Attitude::from_term(&t).ok_or_else(|| serde::de::Error::custom(format!("not an attitude: {t}")))
    }
}

/// Splits an agent-bearing attitude term `kind(agent, content)`.
pub fn split_attitude(t: &Term) -> Option<(AttitudeKind, &str, &Term)> {
    match t {
        Term::Compound(f, args) if args.len() == 2 => {
            let kind = AttitudeKind::from_name(f)?;
            match &args[0] {
                Term::Atom(agent) => Some((kind, agent.as_str(), &args[1])),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Canonical location of an attitude: beliefs about another agent's attitudes
/// move one level inward, and an agent's beliefs about its own attitudes
/// collapse.
pub fn normalize(path: &ViewpointPath, attitude: &Attitude) -> (ViewpointPath, Attitude) {
    let mut path = path.clone();
    let mut attitude = attitude.clone();
    while attitude.kind == AttitudeKind::Bel {
        let Some((kind, agent, content)) = split_attitude(&attitude.content) else {
            break;
        };
        let (kind, content) = (kind, content.clone());
        if path.last() != Some(agent) {
            path = path.child(agent);
        }
        attitude = Attitude::new(kind, content);
    }
    (path, attitude)
}

/// Places an agent-bearing attitude term, e.g. `goal(expert, p)`, relative
/// to the environment at `path`.
pub fn place(path: &ViewpointPath, term: &Term) -> Result<(ViewpointPath, Attitude), BeliefError> {
    if split_attitude(term).is_none() {
        return Err(BeliefError::NotAnAttitude(term.clone()));
    }
    Ok(normalize(path, &Attitude::bel(term.clone())))
}

/// Inverse of [`place`]: renders an attitude stored at `root ++ rest` as a
/// term relative to the environment at `root`.
pub fn render(root: &ViewpointPath, path: &ViewpointPath, attitude: &Attitude) -> Option<Term> {
    if !path.starts_with(root) {
        return None;
    }
    let rest = &path.agents()[root.len()..];
    let Some((last, outer)) = rest.split_last() else {
        return Some(attitude.with_agent(root.last()?));
    };
    let mut t = attitude.with_agent(last);
    for agent in outer.iter().rev() {
        t = Term::compound("bel", vec![Term::atom(agent), t]);
    }
    Some(t)
}

/// A question awaiting its answer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Expectation {
    pub asker: String,
    pub asked: String,
    pub content: Term,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StoreEventKind {
    Assert,
    Block,
}

/// Record of one store mutation (or refused mutation) and the rule behind it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreEvent {
    pub kind: StoreEventKind,
    pub path: ViewpointPath,
    pub attitude: Attitude,
    pub anchor: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cause: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ascription {
    Ascribed(BeliefStore),
    Blocked,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "on", content = "name", rename_all = "kebab-case")]
pub enum Trigger {
    /// The agent belongs to the stereotype's class.
    Member(String),
    /// Performing this act kind triggers the stereotype for the speaker.
    Act(String),
}

/// Stereotypical attitudes. Templates may mention `?self`, bound to the
/// agent the stereotype is applied to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stereotype {
    pub name: String,
    pub triggers: Vec<Trigger>,
    pub attitudes: Vec<Attitude>,
    pub goal_library: Vec<Term>,
}

impl Stereotype {
    pub const SELF_VAR: &'static str = "self";

    pub fn has_member(&self, agent: &str) -> bool {
        self.triggers.iter().any(|t| matches!(t, Trigger::Member(m) if m == agent))
    }

    pub fn triggered_by_act(&self, act: &str) -> bool {
        self.triggers.iter().any(|t| matches!(t, Trigger::Act(a) if a == act))
    }

    pub fn bindings_for(agent: &str) -> Substitution {
        let mut s = Substitution::new();
        s.insert(Self::SELF_VAR, Term::atom(agent));
        s
    }

    /// Goal templates instantiated for `agent`.
    pub fn goals_for(&self, agent: &str) -> Vec<Term> {
        let s = Self::bindings_for(agent);
        self.goal_library.iter().map(|g| s.apply(g)).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BeliefStore {
    spaces: BTreeMap<ViewpointPath, BTreeSet<Attitude>>,
    expectations: BTreeSet<Expectation>,
    reliable: BTreeSet<(String, String)>,
    actions: BTreeSet<String>,
}

fn unify_apart(a: &Term, b: &Term) -> bool {
    let (a, next) = rename_apart(a, 0);
    let (b, _) = rename_apart(b, next);
    Substitution::new().unify(&a, &b).is_some()
}

impl BeliefStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn spaces(&self) -> &BTreeMap<ViewpointPath, BTreeSet<Attitude>> {
        &self.spaces
    }

    pub fn attitudes_at(&self, path: &ViewpointPath) -> impl Iterator<Item = &Attitude> {
        self.spaces.get(path).into_iter().flatten()
    }

    pub fn expectations(&self) -> &BTreeSet<Expectation> {
        &self.expectations
    }

    pub fn with_expectation(&self, e: Expectation) -> BeliefStore {
        let mut next = self.clone();
        next.expectations.insert(e);
        next
    }

    /// Declares `agent` a reliable source on propositions whose topic is
    /// `topic` (see [`topic_of`]).
    pub fn with_reliable(&self, agent: &str, topic: &str) -> BeliefStore {
        let mut next = self.clone();
        next.reliable.insert((agent.to_lowercase(), topic.to_lowercase()));
        next
    }

    pub fn reliable(&self) -> &BTreeSet<(String, String)> {
        &self.reliable
    }

    pub fn is_reliable(&self, agent: &str, content: &Term) -> bool {
        topic_of(content).is_some_and(|t| self.reliable.contains(&(agent.to_string(), t.to_string())))
    }

    pub fn with_action(&self, name: &str) -> BeliefStore {
        let mut next = self.clone();
        next.actions.insert(name.to_lowercase());
        next
    }

    pub fn actions(&self) -> &BTreeSet<String> {
        &self.actions
    }

    fn check_path(path: &ViewpointPath) -> Result<(), BeliefError> {
        if path.is_empty() {
            return Err(BeliefError::EmptyPath);
        }
        if path.len() > MAX_DEPTH {
            return Err(BeliefError::TooDeep(path.clone()));
        }
        Ok(())
    }

    fn check_intention(&self, a: &Attitude) -> Result<(), BeliefError> {
        if a.kind != AttitudeKind::Int {
            return Ok(());
        }
        let action = a.content.negated().unwrap_or(&a.content);
        match action.functor() {
            Some(f) if self.actions.contains(f) => Ok(()),
            _ => Err(BeliefError::UnknownAction(a.content.clone())),
        }
    }

    /// Adds an attitude. Fails if it contradicts a belief already held at the
    /// same (normalized) path.
    pub fn assert_attitude(&self, path: &ViewpointPath, a: &Attitude) -> Result<BeliefStore, BeliefError> {
        let (path, a) = normalize(path, a);
        Self::check_path(&path)?;
        self.check_intention(&a)?;
        if self.spaces.get(&path).is_some_and(|s| s.contains(&a)) {
            return Ok(self.clone());
        }
        if a.kind == AttitudeKind::Bel && self.contrary_at(&path, &a.content) {
            return Err(BeliefError::Contradiction { path, attitude: a.to_string() });
        }
        let mut next = self.clone();
        next.spaces.entry(path).or_default().insert(a);
        Ok(next)
    }

    /// Places an agent-bearing term relative to `path` and asserts it.
    pub fn assert_term(&self, path: &ViewpointPath, term: &Term) -> Result<BeliefStore, BeliefError> {
        let (p, a) = place(path, term)?;
        self.assert_attitude(&p, &a)
    }

    pub fn holds(&self, path: &ViewpointPath, a: &Attitude) -> bool {
        let (path, a) = normalize(path, a);
        self.attitudes_at(&path).any(|s| s.kind == a.kind && (s.content == a.content || unify_apart(&s.content, &a.content)))
    }

    pub fn holds_term(&self, path: &ViewpointPath, term: &Term) -> bool {
        place(path, term).is_ok_and(|(p, a)| self.holds(&p, &a))
    }

    fn contrary_at(&self, path: &ViewpointPath, content: &Term) -> bool {
        let negation = content.negation();
        self.attitudes_at(path)
            .any(|s| s.kind == AttitudeKind::Bel && unify_apart(&s.content, &negation))
    }

    /// True when the environment at `path` believes the negation of `content`.
    pub fn contrary_evidence(&self, path: &ViewpointPath, content: &Term) -> bool {
        let (path, a) = normalize(path, &Attitude::bel(content.clone()));
        self.contrary_at(&path, &a.content)
    }

    /// Default ascription one level inward, unless there is contrary evidence
    /// in the target environment.
    pub fn default_ascribe(&self, from: &ViewpointPath, to: &ViewpointPath, a: &Attitude) -> Result<Ascription, BeliefError> {
        if to.len() != from.len() + 1 || !to.starts_with(from) {
            return Err(BeliefError::NotNested { from: from.clone(), to: to.clone() });
        }
        if self.contrary_evidence(to, &a.content) {
            return Ok(Ascription::Blocked);
        }
        self.assert_attitude(to, a).map(Ascription::Ascribed)
    }

    /// Applies every template of `st` at `path`. Blocked templates are
    /// skipped and reported.
    pub fn stereotype_ascribe(&self, path: &ViewpointPath, st: &Stereotype, bindings: &Substitution) -> (BeliefStore, Vec<StoreEvent>) {
        let mut store = self.clone();
        let mut events = Vec::new();
        let anchor = format!("stereotype:{}", st.name);
        for template in &st.attitudes {
            let a = Attitude::new(template.kind, bindings.apply(&template.content));
            let (p, a) = normalize(path, &a);
            let outcome = if store.contrary_evidence(&p, &a.content) {
                Err("contrary evidence".to_string())
            } else {
                store.assert_attitude(&p, &a).map_err(|e| e.to_string())
            };
            match outcome {
                Ok(next) => {
                    events.push(StoreEvent { kind: StoreEventKind::Assert, path: p, attitude: a, anchor: anchor.clone(), cause: None });
                    store = next;
                }
                Err(cause) => events.push(StoreEvent { kind: StoreEventKind::Block, path: p, attitude: a, anchor: anchor.clone(), cause: Some(cause) }),
            }
        }
        (store, events)
    }

    /// Ground attitudes at or below `root`, rendered relative to it.
    pub fn facts_under(&self, root: &ViewpointPath) -> BTreeSet<Term> {
        self.spaces
            .iter()
            .filter(|(p, _)| p.starts_with(root))
            .flat_map(|(p, set)| set.iter().filter_map(move |a| render(root, p, a)))
            .filter(Term::is_ground)
            .collect()
    }

    /// Applies an assert event verbatim; used for trace replay.
    pub fn replay(&self, e: &StoreEvent) -> Result<BeliefStore, BeliefError> {
        match e.kind {
            StoreEventKind::Assert => {
                let mut next = self.clone();
                next.spaces.entry(e.path.clone()).or_default().insert(e.attitude.clone());
                Ok(next)
            }
            StoreEventKind::Block => Ok(self.clone()),
        }
    }
}

/// The functor that names a proposition's topic, looking through `not`.
pub fn topic_of(content: &Term) -> Option<&str> {
    content.negated().unwrap_or(content).functor()
}
