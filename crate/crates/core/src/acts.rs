//! Speech acts, their belief-update rules, and the dialogue planning
//! operators built from them.
//!
//! An act is defined by its conventional preconditions. Performing it
//! updates both parties:
//!
//! * speaker: for every precondition `C`, the speaker's view of the hearer
//!   gains `bel(C)`;
//! * hearer: for every precondition `C`, the hearer's view of the speaker
//!   gains `C`, and the schema's effects land in the hearer's environment.

use std::collections::BTreeSet;

use crate::belief::{place, AttitudeKind, BeliefStore, Expectation, StoreEvent, StoreEventKind, ViewpointPath};
use crate::error::{ActError, BeliefError};
use crate::planner::{Guard, Operator};
use crate::term::{Substitution, Term};

pub const SPEAKER: &str = "speaker";
pub const HEARER: &str = "hearer";
pub const CONTENT: &str = "p";

pub const INFORM: &str = "inform";
pub const QUESTION: &str = "question";
pub const YES_ANSWER: &str = "yes_answer";
pub const NO_ANSWER: &str = "no_answer";
pub const ACCEPT_BELIEF: &str = "accept_belief";
pub const ASCRIBE: &str = "ascribe";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActSchema {
    pub name: String,
    /// Agent-bearing templates over `?speaker`, `?hearer` and `?p`.
    pub preconditions: Vec<Term>,
    /// Hearer-side updates, same template variables.
    pub effects: Vec<Term>,
}

fn v(name: &str) -> Term {
    Term::var(name)
}

fn c(f: &str, args: Vec<Term>) -> Term {
    Term::compound(f, args)
}

fn bel(agent: Term, t: Term) -> Term {
    c("bel", vec![agent, t])
}

fn goal(agent: Term, t: Term) -> Term {
    c("goal", vec![agent, t])
}

/// Inform-shaped schema: the speaker wants the hearer to believe `content`
/// and believes it.
fn assertive(name: &str, content: Term) -> ActSchema {
    let (s, h) = (v(SPEAKER), v(HEARER));
    ActSchema {
        name: name.into(),
        preconditions: vec![goal(s.clone(), bel(h.clone(), content.clone())), bel(s.clone(), content.clone())],
        effects: vec![
            bel(h.clone(), bel(s.clone(), content.clone())),
            bel(h.clone(), goal(s, bel(h, content))),
        ],
    }
}

/// Yes-no content as a true/false disjunction.
pub fn whether(p: Term) -> Term {
    c("or", vec![p.clone(), Term::not(p)])
}

/// The four built-in speech acts.
pub fn builtin_schemas() -> Vec<ActSchema> {
    let (s, h, p) = (v(SPEAKER), v(HEARER), v(CONTENT));
    let question_pre = vec![
        goal(s.clone(), bel(s.clone(), whether(p.clone()))),
        bel(s.clone(), bel(h.clone(), whether(p.clone()))),
    ];
    let question = ActSchema {
        name: QUESTION.into(),
        effects: question_pre.iter().map(|pre| bel(h.clone(), pre.clone())).collect(),
        preconditions: question_pre,
    };
    vec![
        assertive(INFORM, p.clone()),
        question,
        assertive(YES_ANSWER, p.clone()),
        assertive(NO_ANSWER, Term::not(p)),
    ]
}

pub fn schema(name: &str) -> Option<ActSchema> {
    builtin_schemas().into_iter().find(|s| s.name == name)
}

pub fn is_answer(name: &str) -> bool {
    name == YES_ANSWER || name == NO_ANSWER
}

/// A performed act: `name(speaker, hearer, content)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActInstance {
    pub schema: String,
    pub speaker: String,
    pub hearer: String,
    pub content: Term,
}

impl ActInstance {
    pub fn new(schema: &str, speaker: &str, hearer: &str, content: Term) -> Self {
        ActInstance { schema: schema.into(), speaker: speaker.into(), hearer: hearer.into(), content }
    }

    pub fn from_term(t: &Term) -> Result<ActInstance, ActError> {
        match t {
            Term::Compound(name, args) if args.len() == 3 => match (&args[0], &args[1]) {
                (Term::Atom(s), Term::Atom(h)) => {
                    if s == h {
                        return Err(ActError::SelfAddressed(t.clone()));
                    }
                    Ok(ActInstance::new(name, s, h, args[2].clone()))
                }
                _ => Err(ActError::Malformed(t.clone())),
            },
            _ => Err(ActError::Malformed(t.clone())),
        }
    }

    pub fn to_term(&self) -> Term {
        Term::compound(&self.schema, vec![Term::atom(&self.speaker), Term::atom(&self.hearer), self.content.clone()])
    }

    fn bindings(&self) -> Substitution {
        let mut s = Substitution::new();
        s.insert(SPEAKER, Term::atom(&self.speaker));
        s.insert(HEARER, Term::atom(&self.hearer));
        s.insert(CONTENT, self.content.clone());
        s
    }

    fn schema_def(&self) -> Result<ActSchema, ActError> {
        schema(&self.schema).ok_or_else(|| ActError::UnknownSchema(self.schema.clone()))
    }

    pub fn preconditions(&self) -> Result<Vec<Term>, ActError> {
        let s = self.bindings();
        Ok(self.schema_def()?.preconditions.iter().map(|t| s.apply(t)).collect())
    }

    pub fn effects(&self) -> Result<Vec<Term>, ActError> {
        let s = self.bindings();
        Ok(self.schema_def()?.effects.iter().map(|t| s.apply(t)).collect())
    }

    /// The question this act answers, if it is an answer.
    pub fn answered(&self) -> Option<Expectation> {
        is_answer(&self.schema).then(|| Expectation {
            asker: self.hearer.clone(),
            asked: self.speaker.clone(),
            content: self.content.clone(),
        })
    }

    /// The act as a ground planning step.
    pub fn operator(&self) -> Result<Operator, ActError> {
        Ok(act_operator(&self.schema_def()?).instantiate(&self.bindings()))
    }

    fn check(&self, store: &BeliefStore) -> Result<ActSchema, ActError> {
        let schema = self.schema_def()?;
        if self.speaker == self.hearer {
            return Err(ActError::SelfAddressed(self.to_term()));
        }
        if let Some(e) = self.answered() {
            if !store.expectations().contains(&e) {
                return Err(ActError::MissingExpectation(self.to_term()));
            }
        }
        Ok(schema)
    }
}

/// Ascribes `term` relative to `path`, blocking on contrary evidence.
pub(crate) fn ascribe_into(
    store: BeliefStore,
    path: &ViewpointPath,
    term: &Term,
    anchor: &str,
    events: &mut Vec<StoreEvent>,
) -> Result<BeliefStore, BeliefError> {
    let (p, a) = place(path, term)?;
    let blocked = if a.kind == AttitudeKind::Bel && store.contrary_evidence(&p, &a.content) {
        Some("contrary evidence".to_string())
    } else {
        None
    };
    let outcome = match blocked {
        Some(cause) => Err(cause),
        None => store.assert_attitude(&p, &a).map_err(|e| e.to_string()),
    };
    match outcome {
        Ok(next) => {
            events.push(StoreEvent { kind: StoreEventKind::Assert, path: p, attitude: a, anchor: anchor.into(), cause: None });
            Ok(next)
        }
        Err(cause) => {
            events.push(StoreEvent { kind: StoreEventKind::Block, path: p, attitude: a, anchor: anchor.into(), cause: Some(cause) });
            Ok(store)
        }
    }
}

/// Speaker-side update. The speaker holds the act's preconditions and its
/// view of the hearer gains `bel(C)` for each precondition `C`.
pub fn apply_speaker_update(store: &BeliefStore, act: &ActInstance) -> Result<(BeliefStore, Vec<StoreEvent>), ActError> {
    act.check(store)?;
    let mut events = Vec::new();
    let mut next = store.clone();
    let own = ViewpointPath::new([&act.speaker]);
    let view = own.child(&act.hearer);
    for pre in act.preconditions()? {
        next = ascribe_into(next, &own, &pre, &format!("{}:precondition", act.schema), &mut events)?;
        let believed = bel(Term::atom(&act.hearer), pre);
        next = ascribe_into(next, &view, &believed, "update:speaker", &mut events)?;
    }
    Ok((next, events))
}

/// Hearer-side update. The hearer's view of the speaker gains each
/// precondition, the schema's effects land in the hearer's environment, and
/// a question registers a discourse expectation.
pub fn apply_hearer_update(store: &BeliefStore, act: &ActInstance) -> Result<(BeliefStore, Vec<StoreEvent>), ActError> {
    act.check(store)?;
    let mut events = Vec::new();
    let mut next = store.clone();
    let own = ViewpointPath::new([&act.hearer]);
    let view = own.child(&act.speaker);
    for pre in act.preconditions()? {
        next = ascribe_into(next, &view, &pre, "update:hearer", &mut events)?;
    }
    for effect in act.effects()? {
        next = ascribe_into(next, &own, &effect, &format!("{}:effect", act.schema), &mut events)?;
    }
    if act.schema == QUESTION {
        next = next.with_expectation(Expectation {
            asker: act.speaker.clone(),
            asked: act.hearer.clone(),
            content: act.content.clone(),
        });
    }
    Ok((next, events))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Refusal {
    /// The hearer does not believe the speaker believes the proposition.
    NoEvidence,
    ContraryEvidence,
    UnreliableSource,
}

impl Refusal {
    pub fn as_str(self) -> &'static str {
        match self {
            Refusal::NoEvidence => "no_evidence",
            Refusal::ContraryEvidence => "contrary_evidence",
            Refusal::UnreliableSource => "unreliable_source",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Acceptance {
    Accepted(BeliefStore),
    Refused(Refusal),
}

/// The hearer adopts the speaker's belief `p` when it has no contrary
/// evidence and the speaker is a reliable source on `p`'s topic.
pub fn accept_belief(store: &BeliefStore, hearer: &str, speaker: &str, p: &Term) -> Result<Acceptance, BeliefError> {
    let own = ViewpointPath::new([hearer]);
    if !store.holds_term(&own.child(speaker), &bel(Term::atom(speaker), p.clone())) {
        return Ok(Acceptance::Refused(Refusal::NoEvidence));
    }
    if store.contrary_evidence(&own, p) {
        return Ok(Acceptance::Refused(Refusal::ContraryEvidence));
    }
    if !store.is_reliable(speaker, p) {
        return Ok(Acceptance::Refused(Refusal::UnreliableSource));
    }
    store.assert_attitude(&own, &crate::belief::Attitude::bel(p.clone())).map(Acceptance::Accepted)
}

/// Planning operator for a speech act. Answers also need the question
/// they answer to be pending: `expects(asker, asked, content)`. Informs
/// are only planned for contents nobody is waiting on an answer about.
pub fn act_operator(schema: &ActSchema) -> Operator {
    let (s, h, p) = (v(SPEAKER), v(HEARER), v(CONTENT));
    let mut pre = schema.preconditions.clone();
    if is_answer(&schema.name) {
        pre.push(c("expects", vec![h.clone(), s.clone(), p.clone()]));
    }
    let mut op = Operator::new(&schema.name, s.clone(), pre, schema.effects.clone(), Vec::new());
    if schema.name == INFORM {
        // while a question about p is pending, saying p or not(p) is an answer
        op = op.with_guard(Guard::Unasked { asker: h.clone(), asked: s.clone(), content: p.clone() });
    }
    op.params = vec![s, h, p];
    op
}

/// `accept_belief(H, S, P)`: H comes to believe P because it believes S
/// believes it.
pub fn accept_belief_operator() -> Operator {
    let (h, s, p) = (v("h"), v("s"), v("p"));
    let mut op = Operator::new(
        ACCEPT_BELIEF,
        h.clone(),
        vec![bel(h.clone(), bel(s.clone(), p.clone()))],
        vec![bel(h.clone(), p.clone())],
        Vec::new(),
    )
    .with_guard(Guard::Reliable { source: s.clone(), content: p.clone() })
    .with_guard(Guard::NoContrary { holder: h.clone(), content: p.clone() });
    op.params = vec![h, s, p];
    op
}

/// `ascribe(H, goal(S, not(Harm)))`: once H knows S believes an action
/// causes a harm S wants to avoid, H ascribes that avoidance goal to S, the
/// intention that the action is not done, and S's belief that H lacks
/// permission to do it.
pub fn ascribe_operator() -> Operator {
    let (h, s, act, harm) = (v("h"), v("s"), v("act"), v("harm"));
    let avoid = goal(s.clone(), Term::not(harm.clone()));
    let mut op = Operator::new(
        ASCRIBE,
        h.clone(),
        vec![bel(h.clone(), bel(s.clone(), c("cause", vec![act.clone(), harm.clone()]))), avoid.clone()],
        vec![
            bel(h.clone(), avoid.clone()),
            bel(h.clone(), c("int", vec![s.clone(), Term::not(act.clone())])),
            bel(h.clone(), bel(s.clone(), Term::not(c("permission", vec![h.clone(), act.clone()])))),
        ],
        Vec::new(),
    );
    op.params = vec![h, avoid, act];
    op
}

/// Every built-in planning operator, speech acts first.
pub fn builtin_operators() -> Vec<Operator> {
    let mut ops: Vec<Operator> = builtin_schemas().iter().map(act_operator).collect();
    ops.push(accept_belief_operator());
    ops.push(ascribe_operator());
    ops
}

/// Names every built-in operator, for intention validation.
pub fn builtin_action_names() -> BTreeSet<String> {
    builtin_operators().into_iter().map(|o| o.name).collect()
}
