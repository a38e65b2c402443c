//! Partial-order causal-link planning over sets of ground terms.
//!
//! States are sets of ground terms. Operators are schemas whose variables
//! are bound by matching preconditions against reachable facts
//! ([`ground`]); the search itself ([`plan`]) works on ground instances and
//! deepens on step count, so the first plan found has minimal cost.

mod complete;
mod ground;
mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::PlanError;
use crate::term::{Substitution, Term};

pub use complete::{complete_from, Completion};
pub use ground::{ground, guard_holds};
pub use search::{plan, plan_through, search, SearchOutcome, SearchRequest, DEFAULT_NODE_LIMIT};

/// Default step bound for searches.
pub const DEFAULT_BOUND: usize = 8;

/// A static side condition checked against the initial facts when an
/// operator is instantiated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Guard {
    /// `reliable(source, topic)` must be an initial fact, where topic is the
    /// content's functor (looking through `not`).
    Reliable { source: Term, content: Term },
    /// No initial fact `bel(holder, ¬content)`.
    NoContrary { holder: Term, content: Term },
    /// No initial fact `expects(asker, asked, q)` where `content` is `q` or
    /// its negation.
    Unasked { asker: Term, asked: Term, content: Term },
}

impl Guard {
    fn apply(&self, s: &Substitution) -> Guard {
        match self {
            Guard::Reliable { source, content } => Guard::Reliable { source: s.apply(source), content: s.apply(content) },
            Guard::NoContrary { holder, content } => Guard::NoContrary { holder: s.apply(holder), content: s.apply(content) },
            Guard::Unasked { asker, asked, content } => {
                Guard::Unasked { asker: s.apply(asker), asked: s.apply(asked), content: s.apply(content) }
            }
        }
    }

    pub fn to_term(&self) -> Term {
        match self {
            Guard::Reliable { source, content } => Term::compound("reliable", vec![source.clone(), content.clone()]),
            Guard::NoContrary { holder, content } => Term::compound("no_contrary", vec![holder.clone(), content.clone()]),
            Guard::Unasked { asker, asked, content } => {
                Term::compound("unasked", vec![asker.clone(), asked.clone(), content.clone()])
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Operator {
    pub name: String,
    pub params: Vec<Term>,
    /// Agent performing the action.
    pub actor: Term,
    pub pre: Vec<Term>,
    pub add: Vec<Term>,
    pub del: Vec<Term>,
    pub guards: Vec<Guard>,
}

impl Operator {
    /// Builds an operator whose parameters are the precondition variables in
    /// order of first occurrence.
    pub fn new(name: impl AsRef<str>, actor: Term, pre: Vec<Term>, add: Vec<Term>, del: Vec<Term>) -> Operator {
        let mut params: Vec<Term> = Vec::new();
        for v in pre.iter().flat_map(Term::vars) {
            let v = Term::Var(v);
            if !params.contains(&v) {
                params.push(v);
            }
        }
        Operator { name: name.as_ref().to_lowercase(), params, actor, pre, add, del, guards: Vec::new() }
    }

    pub fn with_guard(mut self, g: Guard) -> Operator {
        self.guards.push(g);
        self
    }

    /// `name(params..)`, the operator's identity once instantiated.
    pub fn head(&self) -> Term {
        Term::compound(&self.name, self.params.clone())
    }

    pub fn instantiate(&self, s: &Substitution) -> Operator {
        let ap = |ts: &[Term]| ts.iter().map(|t| s.apply(t)).collect::<Vec<_>>();
        Operator {
            name: self.name.clone(),
            params: ap(&self.params),
            actor: s.apply(&self.actor),
            pre: ap(&self.pre),
            add: ap(&self.add),
            del: ap(&self.del),
            guards: self.guards.iter().map(|g| g.apply(s)).collect(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.params.iter().all(Term::is_ground)
            && self.actor.is_ground()
            && self.pre.iter().chain(&self.add).chain(&self.del).all(Term::is_ground)
    }

    /// Every variable in the effects, actor and guards must be bound by a
    /// precondition.
    pub fn validate(&self) -> Result<(), PlanError> {
        let bound: BTreeSet<String> = self.pre.iter().flat_map(Term::vars).collect();
        let guard_terms = self.guards.iter().map(Guard::to_term);
        for t in self.add.iter().chain(&self.del).cloned().chain(std::iter::once(self.actor.clone())).chain(guard_terms) {
            for v in t.vars() {
                if !bound.contains(&v) {
                    return Err(PlanError::UnboundEffectVar(self.name.clone(), v));
                }
            }
        }
        Ok(())
    }

    fn apply_to(&self, state: &BTreeSet<Term>) -> BTreeSet<Term> {
        let mut next = state.clone();
        for d in &self.del {
            next.remove(d);
        }
        next.extend(self.add.iter().cloned());
        next
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepId {
    Init,
    Step(u32),
    Goal,
}

impl fmt::Display for StepId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepId::Init => f.write_str("init"),
            StepId::Step(n) => write!(f, "s{n}"),
            StepId::Goal => f.write_str("goal"),
        }
    }
}

impl Serialize for StepId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StepId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "init" => Ok(StepId::Init),
            "goal" => Ok(StepId::Goal),
            _ => s
                .strip_prefix('s')
                .and_then(|n| n.parse().ok())
                .map(StepId::Step)
                .ok_or_else(|| serde::de::Error::custom(format!("bad step id {s}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CausalLink {
    pub producer: StepId,
    pub condition: Term,
    pub consumer: StepId,
}

/// A partial-order plan. `init` precedes and `goal` follows every step
/// implicitly; `ordering` holds the remaining constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    pub initial: BTreeSet<Term>,
    pub goals: Vec<Term>,
    pub steps: BTreeMap<StepId, Operator>,
    pub ordering: BTreeSet<(StepId, StepId)>,
    pub links: Vec<CausalLink>,
    pub open: Vec<(StepId, Term)>,
}

impl Plan {
    pub fn empty(initial: BTreeSet<Term>, goals: Vec<Term>) -> Plan {
        Plan { initial, goals, steps: BTreeMap::new(), ordering: BTreeSet::new(), links: Vec::new(), open: Vec::new() }
    }

    pub fn is_complete(&self) -> bool {
        self.open.is_empty()
    }

    /// Number of steps, excluding the init and goal pseudo-steps.
    pub fn cost(&self) -> Result<usize, PlanError> {
        if !self.is_complete() {
            return Err(PlanError::Incomplete(self.open.len()));
        }
        Ok(self.steps.len())
    }

    /// A total order consistent with the ordering constraints, breaking ties
    /// by the smallest step id.
    pub fn linearize(&self) -> Result<Vec<StepId>, PlanError> {
        if !self.is_complete() {
            return Err(PlanError::Incomplete(self.open.len()));
        }
        let edges: Vec<(StepId, StepId)> = self
            .ordering
            .iter()
            .copied()
            .chain(self.links.iter().map(|l| (l.producer, l.consumer)))
            .filter(|(a, b)| matches!(a, StepId::Step(_)) && matches!(b, StepId::Step(_)))
            .collect();
        let mut indegree: BTreeMap<StepId, usize> = self.steps.keys().map(|k| (*k, 0)).collect();
        for (_, b) in &edges {
            *indegree.entry(*b).or_default() += 1;
        }
        let mut ready: BTreeSet<StepId> = indegree.iter().filter(|(_, d)| **d == 0).map(|(k, _)| *k).collect();
        let mut out = Vec::with_capacity(self.steps.len());
        while let Some(next) = ready.pop_first() {
            out.push(next);
            for (a, b) in &edges {
                if *a == next {
                    let d = indegree.get_mut(b).expect("edge to unknown step");
                    *d -= 1;
                    if *d == 0 {
                        ready.insert(*b);
                    }
                }
            }
        }
        if out.len() != self.steps.len() {
            return Err(PlanError::Cycle);
        }
        Ok(out)
    }

    /// The plan's actions in linearized order.
    pub fn actions(&self) -> Result<Vec<Operator>, PlanError> {
        Ok(self.linearize()?.iter().map(|id| self.steps[id].clone()).collect())
    }

    /// Initial facts plus every step's add effects, each with the step that
    /// first asserts it, in execution order.
    pub fn asserted_states(&self) -> Result<Vec<(StepId, Term)>, PlanError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for f in &self.initial {
            if seen.insert(f.clone()) {
                out.push((StepId::Init, f.clone()));
            }
        }
        for id in self.linearize()? {
            for a in &self.steps[&id].add {
                if seen.insert(a.clone()) {
                    out.push((id, a.clone()));
                }
            }
        }
        Ok(out)
    }

    pub fn step_ids_of(&self, name: &str) -> Vec<StepId> {
        self.steps.iter().filter(|(_, op)| op.name == name).map(|(id, _)| *id).collect()
    }

    /// Whether `from` reaches the goal pseudo-step through causal links.
    pub fn supports_goal(&self, from: StepId) -> bool {
        let mut frontier = vec![from];
        let mut seen = BTreeSet::new();
        while let Some(s) = frontier.pop() {
            if s == StepId::Goal {
                return true;
            }
            if seen.insert(s) {
                frontier.extend(self.links.iter().filter(|l| l.producer == s).map(|l| l.consumer));
            }
        }
        false
    }
}

/// Executes `seq` from `initial`, failing at the first unmet precondition.
pub fn simulate(initial: &BTreeSet<Term>, seq: &[Operator]) -> Result<BTreeSet<Term>, PlanError> {
    let mut state = initial.clone();
    for (index, op) in seq.iter().enumerate() {
        if let Some(missing) = op.pre.iter().find(|p| !state.contains(*p)) {
            return Err(PlanError::PreconditionFailed { index, action: op.head(), missing: missing.clone() });
        }
        state = op.apply_to(&state);
    }
    Ok(state)
}

/// True when every goal unifies with some fact, under one shared binding.
pub fn satisfies(state: &BTreeSet<Term>, goals: &[Term]) -> bool {
    fn go(state: &BTreeSet<Term>, goals: &[Term], s: &Substitution) -> bool {
        let Some((first, rest)) = goals.split_first() else { return true };
        state.iter().any(|f| s.unify(first, f).is_some_and(|s2| go(state, rest, &s2)))
    }
    go(state, goals, &Substitution::new())
}

/// States asserted by `a` that unify with no state asserted by `b`, in the
/// order `a` asserts them.
pub fn exclusive_states(a: &Plan, b: &Plan) -> Result<Vec<(StepId, Term)>, PlanError> {
    let theirs: Vec<Term> = b.asserted_states()?.into_iter().map(|(_, t)| t).collect();
    Ok(a.asserted_states()?
        .into_iter()
        .filter(|(_, s)| !theirs.iter().any(|o| crate::term::unifiable(s, o)))
        .collect())
}
