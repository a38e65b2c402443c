//! Plan recognition, the efficiency audit, and goal ascription for
//! inefficient plans.
//!
//! The hearer explains an utterance by finding the cheapest plan that uses
//! it to reach a candidate goal of the speaker (Pr). It then re-plans for the
//! same goal without the utterance (Po). When Po is strictly cheaper, the
//! speaker is assumed to be pursuing something more: a conjunctive goal
//! reachable from a state only Pr produces, or an avoidance goal reachable
//! from a state only Po produces without the speaker's help.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::acts::{accept_belief, ascribe_into, apply_hearer_update, apply_speaker_update, Acceptance, ActInstance};
use crate::belief::{Attitude, BeliefStore, Stereotype, StoreEvent, StoreEventKind, ViewpointPath};
use crate::error::ActError;
use crate::planner::{complete_from, exclusive_states, satisfies, search, simulate, Completion, Operator, Plan, SearchRequest, DEFAULT_BOUND, DEFAULT_NODE_LIMIT};
use crate::term::Term;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AscriptionOrder {
    #[default]
    ConjunctiveFirst,
    AvoidanceFirst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InferConfig {
    pub bound: usize,
    pub order: AscriptionOrder,
    pub node_limit: usize,
}

impl Default for InferConfig {
    fn default() -> Self {
        InferConfig { bound: DEFAULT_BOUND, order: AscriptionOrder::default(), node_limit: DEFAULT_NODE_LIMIT }
    }
}

/// Where candidate and extra goals come from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Library {
    pub stereotypes: Vec<Stereotype>,
    /// Declared goals, keyed by the agent holding them.
    pub goals: Vec<(String, Term)>,
    /// Declared avoidance states, keyed by the agent avoiding them.
    pub avoid: Vec<(String, Term)>,
}

impl Library {
    /// Stereotype goals of every stereotype `speaker` belongs to, then
    /// declared goals.
    pub fn goals_for(&self, speaker: &str) -> Vec<Term> {
        let mut out: Vec<Term> = Vec::new();
        let stereo = self.stereotypes.iter().filter(|s| s.has_member(speaker)).flat_map(|s| s.goals_for(speaker));
        let declared = self.goals.iter().filter(|(a, _)| a == speaker).map(|(_, g)| g.clone());
        for g in stereo.chain(declared) {
            if !out.contains(&g) {
                out.push(g);
            }
        }
        out
    }

    pub fn avoid_for(&self, speaker: &str) -> Vec<Term> {
        self.avoid.iter().filter(|(a, _)| a == speaker).map(|(_, g)| g.clone()).collect()
    }
}

/// Ordered goal hypotheses for `speaker`'s last utterance: answers to any
/// question `hearer` asked `speaker` first (yes, then no), then library goals
/// aimed at the hearer.
pub fn candidate_goals(store: &BeliefStore, library: &Library, hearer: &str, speaker: &str) -> Vec<Term> {
    let goal = |content: Term| Term::compound("goal", vec![Term::atom(speaker), Term::compound("bel", vec![Term::atom(hearer), content])]);
    let mut out: Vec<Term> = Vec::new();
    for e in store.expectations().iter().filter(|e| e.asker == hearer && e.asked == speaker) {
        out.push(goal(e.content.clone()));
        out.push(goal(Term::not(e.content.clone())));
    }
    for g in library.goals_for(speaker) {
        let g = aim_at(&g, hearer);
        if !out.contains(&g) {
            out.push(g);
        }
    }
    out
}

/// The state a goal attitude `goal(agent, X)` asks for.
pub fn target_of(goal: &Term) -> Option<&Term> {
    match goal {
        Term::Compound(f, args) if f == "goal" && args.len() == 2 => Some(&args[1]),
        _ => None,
    }
}

/// Facts a hypothesized goal brings into the planning state: the goal
/// itself and, for `goal(S, bel(H, Y))`, the speaker's belief `Y`. Only
/// ground hypotheses are added.
pub fn hypothesis(goal: &Term) -> Vec<Term> {
    if !goal.is_ground() {
        return Vec::new();
    }
    let mut out = vec![goal.clone()];
    if let (Some(Term::Compound(f, args)), Some(speaker)) = (target_of(goal), goal.args().first()) {
        if f == "bel" && args.len() == 2 {
            out.push(Term::compound("bel", vec![speaker.clone(), args[1].clone()]));
        }
    }
    out
}

/// The hearer's model of the speaker as a set of planning facts, plus
/// pending questions and reliability declarations.
pub fn planning_state(store: &BeliefStore, hearer: &str, speaker: &str) -> BTreeSet<Term> {
    let mut facts = store.facts_under(&ViewpointPath::new([hearer, speaker]));
    for e in store.expectations() {
        facts.insert(Term::compound("expects", vec![Term::atom(&e.asker), Term::atom(&e.asked), e.content.clone()]));
    }
    for (agent, topic) in store.reliable() {
        facts.insert(Term::compound("reliable", vec![Term::atom(agent), Term::atom(topic)]));
    }
    facts
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecognitionResult {
    pub utterance: ActInstance,
    /// G1, a `goal(speaker, X)` attitude term.
    pub ascribed_goal: Term,
    pub plan_r: Plan,
    pub candidate_rank: usize,
}

impl RecognitionResult {
    pub fn target(&self) -> &Term {
        target_of(&self.ascribed_goal).expect("recognized goals are goal attitudes")
    }

    pub fn cost_r(&self) -> usize {
        self.plan_r.cost().expect("recognized plans are complete")
    }
}

fn search_plan(initial: &BTreeSet<Term>, goals: &[Term], ops: &[Operator], required: Option<&Operator>, cfg: &InferConfig) -> Option<Plan> {
    let mut req = SearchRequest::new(initial, goals, ops, cfg.bound);
    req.required = required;
    req.node_limit = cfg.node_limit;
    search(&req).plan
}

/// Tries each candidate in order and returns the first one with a plan that
/// routes the utterance to it.
pub fn recognize(
    store: &BeliefStore,
    utterance: &ActInstance,
    candidates: &[Term],
    ops: &[Operator],
    cfg: &InferConfig,
) -> Result<Option<RecognitionResult>, ActError> {
    let step = utterance.operator()?;
    let base = planning_state(store, &utterance.hearer, &utterance.speaker);
    for (rank, goal) in candidates.iter().enumerate() {
        let Some(target) = target_of(goal) else { continue };
        let mut initial = base.clone();
        initial.extend(hypothesis(goal));
        if let Some(plan_r) = search_plan(&initial, std::slice::from_ref(target), ops, Some(&step), cfg) {
            // an open goal is ascribed as the plan instantiated it
            let ascribed_goal = match plan_r.goals.as_slice() {
                [reached] if !goal.is_ground() => Term::compound("goal", vec![goal.args()[0].clone(), reached.clone()]),
                _ => goal.clone(),
            };
            return Ok(Some(RecognitionResult {
                utterance: utterance.clone(),
                ascribed_goal,
                plan_r,
                candidate_rank: rank,
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EfficiencyVerdict {
    Optimal { cost_r: usize, cost_o: Option<usize> },
    Inefficient { plan_o: Plan, cost_r: usize, cost_o: usize },
}

impl EfficiencyVerdict {
    pub fn is_inefficient(&self) -> bool {
        matches!(self, EfficiencyVerdict::Inefficient { .. })
    }

    pub fn costs(&self) -> (usize, Option<usize>) {
        match self {
            EfficiencyVerdict::Optimal { cost_r, cost_o } => (*cost_r, *cost_o),
            EfficiencyVerdict::Inefficient { cost_r, cost_o, .. } => (*cost_r, Some(*cost_o)),
        }
    }
}

/// The audit's decision rule on costs alone.
pub fn is_inefficient(cost_r: usize, cost_o: Option<usize>) -> bool {
    cost_o.is_some_and(|o| o < cost_r)
}

/// Re-plans for G1 from the same state with no obligation to use the
/// utterance.
pub fn efficiency_audit(r: &RecognitionResult, ops: &[Operator], cfg: &InferConfig) -> EfficiencyVerdict {
    let cost_r = r.cost_r();
    let plan_o = search_plan(&r.plan_r.initial, std::slice::from_ref(r.target()), ops, None, cfg);
    let cost_o = plan_o.as_ref().map(|p| p.cost().expect("search returns complete plans"));
    match plan_o {
        Some(plan_o) if is_inefficient(cost_r, cost_o) => EfficiencyVerdict::Inefficient { plan_o, cost_r, cost_o: cost_o.unwrap() },
        _ => EfficiencyVerdict::Optimal { cost_r, cost_o },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportKind {
    Conjunctive,
    Avoidance,
    None,
}

/// Outcome of each side condition; `None` when not evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conditions {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exclusiveness: Option<bool>,
    /// Joint plan for both goals is no cheaper than Pr plus the completion.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub efficiency: Option<bool>,
    /// Pr followed by the completion executes and reaches both goals.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub efficiency_prefix: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub causality: Option<bool>,
}

/// An (exclusive state, goal) pair that was examined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub state: Term,
    pub goal: Term,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AscriptionReport {
    pub kind: ReportKind,
    /// `goal(speaker, G2)` or `goal(speaker, not(AG))`.
    pub goal: Option<Term>,
    /// `int(speaker, action)` for every completion action.
    pub intentions: Vec<Term>,
    pub exclusive_state: Option<Term>,
    pub completion: Option<Completion>,
    pub conditions: Conditions,
    pub joint_cost: Option<usize>,
    pub skipped: Vec<Candidate>,
    /// Further pairs that passed every condition but were not ascribed.
    pub alternatives: Vec<Candidate>,
}

impl AscriptionReport {
    fn none() -> Self {
        AscriptionReport {
            kind: ReportKind::None,
            goal: None,
            intentions: Vec::new(),
            exclusive_state: None,
            completion: None,
            conditions: Conditions::default(),
            joint_cost: None,
            skipped: Vec::new(),
            alternatives: Vec::new(),
        }
    }

    fn merge_skips(mut self, earlier: &AscriptionReport) -> Self {
        let mut skipped = earlier.skipped.clone();
        skipped.append(&mut self.skipped);
        self.skipped = skipped;
        self
    }
}

/// A library goal `goal(S, bel(?x, X))` leaves the believer open; in a
/// dialogue it is aimed at the hearer.
pub fn aim_at(goal: &Term, hearer: &str) -> Term {
    match target_of(goal) {
        Some(Term::Compound(f, args)) if f == "bel" && args.len() == 2 => match &args[0] {
            Term::Var(v) => {
                let mut s = crate::term::Substitution::new();
                s.insert(v.clone(), Term::atom(hearer));
                s.apply(goal)
            }
            _ => goal.clone(),
        },
        _ => goal.clone(),
    }
}

fn skip(state: &Term, goal: &Term, reason: &str) -> Candidate {
    Candidate { state: state.clone(), goal: goal.clone(), reason: Some(reason.into()) }
}

fn terminal(plan: &Plan) -> BTreeSet<Term> {
    let actions = plan.actions().expect("complete plan");
    simulate(&plan.initial, &actions).expect("plans returned by search execute")
}

struct Passed {
    state: Term,
    goal: Term,
    completion: Completion,
    conditions: Conditions,
    joint_cost: Option<usize>,
}

fn finish(kind: ReportKind, speaker: &Term, mut passed: Vec<Passed>, skipped: Vec<Candidate>) -> AscriptionReport {
    if passed.is_empty() {
        return AscriptionReport { skipped, ..AscriptionReport::none() };
    }
    let first = passed.remove(0);
    let intentions = match kind {
        ReportKind::Conjunctive => first
            .completion
            .heads()
            .into_iter()
            .map(|h| Term::compound("int", vec![speaker.clone(), h]))
            .collect(),
        _ => Vec::new(),
    };
    AscriptionReport {
        kind,
        goal: Some(first.goal),
        intentions,
        exclusive_state: Some(first.state),
        completion: Some(first.completion),
        conditions: first.conditions,
        joint_cost: first.joint_cost,
        skipped,
        alternatives: passed.into_iter().map(|p| Candidate { state: p.state, goal: p.goal, reason: None }).collect(),
    }
}

/// Looks for a state only Pr asserts from which a short completion reaches a
/// library goal, with Pr plus that completion still optimal for both goals.
pub fn ascribe_conjunctive(
    r: &RecognitionResult,
    verdict: &EfficiencyVerdict,
    goal_library: &[Term],
    ops: &[Operator],
    cfg: &InferConfig,
) -> AscriptionReport {
    let EfficiencyVerdict::Inefficient { plan_o, cost_r, .. } = verdict else {
        return AscriptionReport::none();
    };
    let speaker = Term::atom(&r.utterance.speaker);
    let exclusive = exclusive_states(&r.plan_r, plan_o).expect("complete plans");
    let context = terminal(&r.plan_r);
    let pr_actions = r.plan_r.actions().expect("complete plan");
    let mut passed = Vec::new();
    let mut skipped = Vec::new();
    for (_, state) in &exclusive {
        for g2 in goal_library {
            let aimed = aim_at(g2, &r.utterance.hearer);
            let Some(target) = target_of(&aimed).filter(|_| g2.args().first() == Some(&speaker)) else {
                skipped.push(skip(state, g2, "not-a-speaker-goal"));
                continue;
            };
            if satisfies(&context, std::slice::from_ref(target)) {
                skipped.push(skip(state, g2, "already-satisfied"));
                continue;
            }
            let Some(completion) = complete_from(&context, state, target, ops, cfg.bound, |_| true) else {
                skipped.push(skip(state, g2, "no-completion"));
                continue;
            };
            let goal = Term::compound("goal", vec![speaker.clone(), completion.achieved_goal.clone()]);
            let expected = cost_r + completion.len();
            let mut initial = r.plan_r.initial.clone();
            initial.extend(hypothesis(&goal));
            let goals = [r.target().clone(), completion.achieved_goal.clone()];
            let joint = search_plan(&initial, &goals, ops, None, cfg).map(|p| p.cost().expect("complete"));
            let mut seq = pr_actions.clone();
            seq.extend(completion.actions.iter().cloned());
            let prefix = simulate(&r.plan_r.initial, &seq).is_ok_and(|end| satisfies(&end, &goals));
            let conditions = Conditions {
                exclusiveness: Some(true),
                efficiency: Some(joint == Some(expected)),
                efficiency_prefix: Some(prefix),
                causality: None,
            };
            if conditions.efficiency == Some(true) {
                passed.push(Passed { state: state.clone(), goal, completion, conditions, joint_cost: joint });
            } else {
                skipped.push(skip(state, g2, "efficiency"));
            }
        }
    }
    finish(ReportKind::Conjunctive, &speaker, passed, skipped)
}

/// Looks for a state only Po asserts from which someone other than the
/// speaker can bring about a state the speaker wants to avoid.
pub fn ascribe_avoidance(
    r: &RecognitionResult,
    verdict: &EfficiencyVerdict,
    avoid_library: &[Term],
    ops: &[Operator],
    cfg: &InferConfig,
) -> AscriptionReport {
    let EfficiencyVerdict::Inefficient { plan_o, .. } = verdict else {
        return AscriptionReport::none();
    };
    let speaker = Term::atom(&r.utterance.speaker);
    let exclusive = exclusive_states(plan_o, &r.plan_r).expect("complete plans");
    let context = terminal(plan_o);
    let mut passed = Vec::new();
    let mut skipped = Vec::new();
    for (_, state) in &exclusive {
        for ag in avoid_library {
            if satisfies(&context, std::slice::from_ref(ag)) {
                skipped.push(skip(state, ag, "already-satisfied"));
                continue;
            }
            let free = complete_from(&context, state, ag, ops, cfg.bound, |a| a.actor != speaker);
            match free {
                Some(completion) => {
                    let goal = Term::compound("goal", vec![speaker.clone(), Term::not(completion.achieved_goal.clone())]);
                    let conditions = Conditions { exclusiveness: Some(true), causality: Some(true), ..Conditions::default() };
                    passed.push(Passed { state: state.clone(), goal, completion, conditions, joint_cost: None });
                }
                None => {
                    let any = complete_from(&context, state, ag, ops, cfg.bound, |_| true);
                    skipped.push(skip(state, ag, if any.is_some() { "causality" } else { "no-completion" }));
                }
            }
        }
    }
    finish(ReportKind::Avoidance, &speaker, passed, skipped)
}

/// Everything one utterance produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inference {
    pub store: BeliefStore,
    /// Store events of the speaker and hearer updates.
    pub update_events: Vec<StoreEvent>,
    pub candidates: Vec<Term>,
    pub recognition: Option<RecognitionResult>,
    pub verdict: Option<EfficiencyVerdict>,
    pub report: Option<AscriptionReport>,
    /// Store events from ascribing the recognized and extra goals.
    pub ascription_events: Vec<StoreEvent>,
}

impl Inference {
    /// Candidates existed but none could be reached.
    pub fn recognition_failed(&self) -> bool {
        !self.candidates.is_empty() && self.recognition.is_none()
    }
}

fn ascribe_all(mut store: BeliefStore, view: &ViewpointPath, terms: &[Term], anchor: &str, events: &mut Vec<StoreEvent>) -> BeliefStore {
    for t in terms {
        // terms here are always attitudes, so placement cannot fail
        store = ascribe_into(store.clone(), view, t, anchor, events).unwrap_or(store);
    }
    store
}

/// Runs the act updates, recognition, the audit and, if the recognized plan
/// is inefficient, the ascription rules in the configured order.
pub fn infer(
    store: &BeliefStore,
    utterance: &ActInstance,
    library: &Library,
    ops: &[Operator],
    cfg: &InferConfig,
) -> Result<Inference, ActError> {
    let (store, mut update_events) = apply_speaker_update(store, utterance)?;
    let (store, hearer_events) = apply_hearer_update(&store, utterance)?;
    update_events.extend(hearer_events);
    let (hearer, speaker) = (&utterance.hearer, &utterance.speaker);
    let candidates = candidate_goals(&store, library, hearer, speaker);
    let mut out = Inference {
        store,
        update_events,
        candidates,
        recognition: None,
        verdict: None,
        report: None,
        ascription_events: Vec::new(),
    };
    let Some(r) = recognize(&out.store, utterance, &out.candidates, ops, cfg)? else {
        return Ok(out);
    };
    let view = ViewpointPath::new([hearer.as_str(), speaker.as_str()]);
    let mut events = Vec::new();
    let mut store = ascribe_all(out.store.clone(), &view, std::slice::from_ref(&r.ascribed_goal), "recognition", &mut events);
    store = adopt(store, &r, &mut events);

    let verdict = efficiency_audit(&r, ops, cfg);
    if verdict.is_inefficient() {
        let conj = || ascribe_conjunctive(&r, &verdict, &library.goals_for(speaker), ops, cfg);
        let avoid = || ascribe_avoidance(&r, &verdict, &library.avoid_for(speaker), ops, cfg);
        let (first, second): (&dyn Fn() -> AscriptionReport, &dyn Fn() -> AscriptionReport) = match cfg.order {
            AscriptionOrder::ConjunctiveFirst => (&conj, &avoid),
            AscriptionOrder::AvoidanceFirst => (&avoid, &conj),
        };
        let a = first();
        let report = if a.kind == ReportKind::None { second().merge_skips(&a) } else { a };
        if let Some(goal) = &report.goal {
            let anchor = match report.kind {
                ReportKind::Conjunctive => "ascription:conjunctive",
                _ => "ascription:avoidance",
            };
            let mut terms = vec![goal.clone()];
            terms.extend(report.intentions.iter().cloned());
            for int in &report.intentions {
                if let Some(action) = int.args().get(1).and_then(Term::functor) {
                    store = store.with_action(action);
                }
            }
            store = ascribe_all(store, &view, &terms, anchor, &mut events);
        }
        out.report = Some(report);
    } else {
        out.report = Some(AscriptionReport::none());
    }
    out.store = store;
    out.ascription_events = events;
    out.verdict = Some(verdict);
    out.recognition = Some(r);
    Ok(out)
}

/// When G1 is for the hearer to believe `X`, the hearer ascribes `X` to the
/// speaker and accepts it if the speaker is a reliable source.
fn adopt(store: BeliefStore, r: &RecognitionResult, events: &mut Vec<StoreEvent>) -> BeliefStore {
    let (hearer, speaker) = (&r.utterance.hearer, &r.utterance.speaker);
    let Some(Term::Compound(f, args)) = Some(r.target()) else { return store };
    if f != "bel" || args.len() != 2 || args[0] != Term::atom(hearer) || !args[1].is_ground() {
        return store;
    }
    let content = args[1].clone();
    let view = ViewpointPath::new([hearer.as_str(), speaker.as_str()]);
    let said = Term::compound("bel", vec![Term::atom(speaker), content.clone()]);
    let store = ascribe_all(store, &view, &[said], "recognition:sincerity", events);
    match accept_belief(&store, hearer, speaker, &content) {
        Ok(Acceptance::Accepted(next)) => {
            if next != store {
                events.push(StoreEvent {
                    kind: StoreEventKind::Assert,
                    path: ViewpointPath::new([hearer.as_str()]),
                    attitude: Attitude::bel(content),
                    anchor: "accept_belief".into(),
                    cause: None,
                });
            }
            next
        }
        Ok(Acceptance::Refused(why)) => {
            events.push(StoreEvent {
                kind: StoreEventKind::Block,
                path: ViewpointPath::new([hearer.as_str()]),
                attitude: Attitude::bel(content),
                anchor: "accept_belief".into(),
                cause: Some(why.as_str().into()),
            });
            store
        }
        Err(_) => store,
    }
}
