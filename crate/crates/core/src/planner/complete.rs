use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{ground, Operator};
use crate::term::{Substitution, Term};

/// A short ordered sub-plan grafted onto a plan from one of its states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub actions: Vec<Operator>,
    /// The state the first action relies on.
    pub entry_state: Term,
    /// The goal as instantiated by the state that satisfies it.
    pub achieved_goal: Term,
}

impl Completion {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn heads(&self) -> Vec<Term> {
        self.actions.iter().map(Operator::head).collect()
    }

    pub fn actors(&self) -> Vec<Term> {
        self.actions.iter().map(|a| a.actor.clone()).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct CompletionRepr {
    actions: Vec<Term>,
    actors: Vec<Term>,
    entry_state: Term,
    achieved_goal: Term,
}

impl Serialize for Completion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CompletionRepr {
            actions: self.heads(),
            actors: self.actors(),
            entry_state: self.entry_state.clone(),
            achieved_goal: self.achieved_goal.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Completion {
    /// Only the heads and actors survive serialization; preconditions and
    /// effects come back empty.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = CompletionRepr::deserialize(d)?;
        let actions = r
            .actions
            .into_iter()
            .zip(r.actors)
            .map(|(head, actor)| Operator {
                name: head.functor().unwrap_or_default().to_string(),
                params: head.args().to_vec(),
                actor,
                pre: Vec::new(),
                add: Vec::new(),
                del: Vec::new(),
                guards: Vec::new(),
            })
            .collect();
        Ok(Completion { actions, entry_state: r.entry_state, achieved_goal: r.achieved_goal })
    }
}

fn goal_match(state: &BTreeSet<Term>, goal: &Term) -> Option<Term> {
    state.iter().find_map(|f| Substitution::new().unify(goal, f).map(|s| s.apply(goal)))
}

/// Shortest nonempty action sequence executable from `context` whose first
/// action has `entry` among its preconditions and after which some state
/// satisfies `goal`. Operators rejected by `allowed` are never used.
///
/// Returns `None` when `goal` already holds in `context`; that case is the
/// caller's to handle.
pub fn complete_from(
    context: &BTreeSet<Term>,
    entry: &Term,
    goal: &Term,
    ops: &[Operator],
    bound: usize,
    allowed: impl Fn(&Operator) -> bool,
) -> Option<Completion> {
    if bound == 0 || goal_match(context, goal).is_some() || !context.contains(entry) {
        return None;
    }
    let actions: Vec<Operator> = ground(ops, context, bound).into_iter().filter(|a| allowed(a)).collect();
    let mut queue: VecDeque<(BTreeSet<Term>, Vec<usize>)> = VecDeque::new();
    let mut seen: BTreeSet<BTreeSet<Term>> = BTreeSet::new();
    for (i, a) in actions.iter().enumerate() {
        if a.pre.contains(entry) && a.pre.iter().all(|p| context.contains(p)) {
            let next = a.apply_to(context);
            if seen.insert(next.clone()) {
                queue.push_back((next, vec![i]));
            }
        }
    }
    while let Some((state, seq)) = queue.pop_front() {
        if let Some(achieved) = goal_match(&state, goal) {
            return Some(Completion {
                actions: seq.iter().map(|&i| actions[i].clone()).collect(),
                entry_state: entry.clone(),
                achieved_goal: achieved,
            });
        }
        if seq.len() >= bound {
            continue;
        }
        for (i, a) in actions.iter().enumerate() {
            if a.pre.iter().all(|p| state.contains(p)) {
                let next = a.apply_to(&state);
                if seen.insert(next.clone()) {
                    let mut s = seq.clone();
                    s.push(i);
                    queue.push_back((next, s));
                }
            }
        }
    }
    None
}
