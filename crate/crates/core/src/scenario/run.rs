use std::collections::BTreeSet;

use super::Scenario;
use crate::acts::ActInstance;
use crate::belief::{normalize, BeliefStore, Stereotype, StoreEvent, StoreEventKind, Trigger, ViewpointPath};
use crate::dot::emit_dot;
use crate::error::{ActError, ScenarioError};
use crate::implicature::{infer, EfficiencyVerdict, Inference, Library, ReportKind};
use crate::planner::Operator;
use crate::trace::{AuditStatus, Event, Module, PlanRole, Trace};

/// A dialogue in progress: the hearer-side store plus the trace so far.
#[derive(Clone, Debug)]
pub struct Session {
    scenario: Scenario,
    library: Library,
    ops: Vec<Operator>,
    store: BeliefStore,
    trace: Trace,
    turn: usize,
    /// Agents whose stereotypes were already applied, by stereotype name.
    applied: BTreeSet<(String, String)>,
    last: Option<Inference>,
    halted: bool,
}

impl Session {
    pub fn new(scenario: Scenario) -> Result<Session, ScenarioError> {
        let mut s = Session {
            library: scenario.library(),
            ops: scenario.all_operators(),
            store: BeliefStore::new(),
            trace: Trace::new(),
            turn: 0,
            applied: BTreeSet::new(),
            last: None,
            halted: false,
            scenario,
        };
        for name in s.scenario.action_names() {
            s.store = s.store.with_action(&name);
        }
        for (agent, topic) in &s.scenario.reliable {
            s.store = s.store.with_reliable(agent, topic);
        }
        let mut events = Vec::new();
        for (path, a) in &s.scenario.beliefs {
            let (p, a) = normalize(path, a);
            s.store = s.store.assert_attitude(&p, &a)?;
            events.push(StoreEvent { kind: StoreEventKind::Assert, path: p, attitude: a, anchor: "scenario:believes".into(), cause: None });
        }
        s.trace.extend_store(Module::Scenario, None, &events);
        let members: Vec<(Stereotype, String)> = s
            .scenario
            .stereotypes
            .iter()
            .flat_map(|st| {
                st.triggers.iter().filter_map(move |t| match t {
                    Trigger::Member(m) => Some((st.clone(), m.clone())),
                    Trigger::Act(_) => None,
                })
            })
            .collect();
        for (st, m) in members {
            s.apply_stereotype(&st, &m, None);
        }
        Ok(s)
    }

    /// Every other agent, and the member itself, comes to hold the
    /// stereotype's attitudes about the member.
    fn apply_stereotype(&mut self, st: &Stereotype, member: &str, turn: Option<usize>) {
        if !self.applied.insert((st.name.clone(), member.to_string())) {
            return;
        }
        let bindings = Stereotype::bindings_for(member);
        let mut paths: Vec<ViewpointPath> = self
            .scenario
            .agents
            .iter()
            .filter(|a| a.as_str() != member)
            .map(|a| ViewpointPath::new([a.as_str(), member]))
            .collect();
        paths.push(ViewpointPath::new([member]));
        for path in paths {
            let (next, events) = self.store.stereotype_ascribe(&path, st, &bindings);
            self.store = next;
            self.trace.extend_store(Module::BeliefSpaces, turn, &events);
        }
    }

    pub fn store(&self) -> &BeliefStore {
        &self.store
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn last(&self) -> Option<&Inference> {
        self.last.as_ref()
    }

    pub fn halted(&self) -> bool {
        self.halted
    }

    /// Processes one utterance. Errors are traced before being returned and
    /// leave the store unchanged.
    pub fn step(&mut self, act: &ActInstance) -> Result<&Inference, ActError> {
        self.turn += 1;
        let turn = Some(self.turn);
        self.trace.push(Module::DialogueActs, turn, Event::Act { act: act.to_term() });
        let triggered: Vec<Stereotype> =
            self.scenario.stereotypes.iter().filter(|st| st.triggered_by_act(&act.schema)).cloned().collect();
        for st in triggered {
            self.apply_stereotype(&st, &act.speaker, turn);
        }
        let cfg = self.scenario.config.infer_config();
        let out = match infer(&self.store, act, &self.library, &self.ops, &cfg) {
            Ok(out) => out,
            Err(e) => {
                self.trace.push(Module::DialogueActs, turn, Event::Error { message: e.to_string() });
                return Err(e);
            }
        };
        self.trace.extend_store(Module::DialogueActs, turn, &out.update_events);
        if let Some(r) = &out.recognition {
            self.trace.push(Module::Planner, turn, Event::plan_found(PlanRole::Recognized, &r.plan_r));
        }
        if let Some(EfficiencyVerdict::Inefficient { plan_o, .. }) = &out.verdict {
            self.trace.push(Module::Planner, turn, Event::plan_found(PlanRole::Optimal, plan_o));
        }
        let status = match (&out.recognition, &out.verdict) {
            (_, Some(v)) if v.is_inefficient() => AuditStatus::Inefficient,
            (Some(_), _) => AuditStatus::Optimal,
            (None, _) if out.candidates.is_empty() => AuditStatus::NoCandidates,
            (None, _) => AuditStatus::RecognitionFailed,
        };
        let (cost_r, cost_o) = match &out.verdict {
            Some(v) => (Some(v.costs().0), v.costs().1),
            None => (None, None),
        };
        self.trace.push(
            Module::Implicature,
            turn,
            Event::Audit {
                status,
                candidates: out.candidates.clone(),
                goal: out.recognition.as_ref().map(|r| r.ascribed_goal.clone()),
                candidate_rank: out.recognition.as_ref().map(|r| r.candidate_rank),
                cost_r,
                cost_o,
            },
        );
        self.trace.extend_store(Module::Implicature, turn, &out.ascription_events);
        if let Some(report) = &out.report {
            self.trace.push(Module::Implicature, turn, Event::AscriptionReport { report: report.into() });
        }
        if out.recognition_failed() && self.scenario.config.strict {
            self.halted = true;
        }
        self.store = out.store.clone();
        Ok(self.last.insert(out))
    }

    /// The last recognized plan as DOT, with the completion of any
    /// ascribed goal overlaid.
    pub fn dot(&self) -> Option<String> {
        let out = self.last.as_ref()?;
        let r = out.recognition.as_ref()?;
        let completion = out.report.as_ref().and_then(|rep| rep.completion.as_ref());
        Some(emit_dot(&r.plan_r, completion))
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub trace: Trace,
    pub store: BeliefStore,
    /// One summary line per processed turn.
    pub summaries: Vec<String>,
    pub dot: Option<String>,
    pub halted: bool,
}

/// Runs every turn. Act errors are traced and skipped unless the scenario
/// is strict, in which case they halt the run like a failed recognition.
pub fn run(scenario: &Scenario) -> Result<RunOutcome, ScenarioError> {
    let mut session = Session::new(scenario.clone())?;
    let mut summaries = Vec::new();
    for act in &scenario.turns {
        match session.step(act) {
            Ok(out) => summaries.push(summary(out)),
            Err(e) => {
                summaries.push(format!("error: {e}"));
                if scenario.config.strict {
                    session.halted = true;
                }
            }
        }
        if session.halted {
            break;
        }
    }
    Ok(RunOutcome {
        dot: session.dot(),
        halted: session.halted,
        trace: session.trace,
        store: session.store,
        summaries,
    })
}

/// One line describing what the hearer concluded.
pub fn summary(out: &Inference) -> String {
    let Some(r) = &out.recognition else {
        return if out.candidates.is_empty() {
            "no candidate goals".to_string()
        } else {
            format!("recognition failed: none of {} candidate goals explains the utterance", out.candidates.len())
        };
    };
    match &out.verdict {
        Some(EfficiencyVerdict::Inefficient { cost_r, cost_o, .. }) => {
            let tail = match out.report.as_ref().filter(|rep| rep.kind != ReportKind::None) {
                Some(rep) => {
                    let kind = if rep.kind == ReportKind::Conjunctive { "conjunctive" } else { "avoidance" };
                    format!("{kind} goal ascribed: {}", rep.goal.as_ref().map(ToString::to_string).unwrap_or_default())
                }
                None => "no extra goal ascribed".to_string(),
            };
            format!("inefficient ({cost_r} vs {cost_o}): {tail}")
        }
        _ => format!("optimal (cost {}): {}", r.cost_r(), r.ascribed_goal),
    }
}
