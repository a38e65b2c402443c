//! Run traces: an ordered event log with a canonical JSON form.

use serde::{Deserialize, Serialize};

use crate::acts::{ActInstance, QUESTION};
use crate::belief::{Attitude, BeliefStore, Expectation, StoreEvent, StoreEventKind, ViewpointPath};
use crate::implicature::{AscriptionReport, Candidate, Conditions, ReportKind};
use crate::planner::{CausalLink, Plan};
use crate::term::Term;

pub const SCHEMA: &str = "vgtrace/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Module {
    Scenario,
    BeliefSpaces,
    DialogueActs,
    Planner,
    Implicature,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanRole {
    /// Pr, through the utterance.
    Recognized,
    /// Po, bypassing it.
    Optimal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditStatus {
    Optimal,
    Inefficient,
    NoCandidates,
    RecognitionFailed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionRecord {
    pub actions: Vec<Term>,
    pub actors: Vec<Term>,
    pub entry_state: Term,
    pub achieved_goal: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub kind: ReportKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub goal: Option<Term>,
    pub intentions: Vec<Term>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exclusive_state: Option<Term>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub completion: Option<CompletionRecord>,
    pub conditions: Conditions,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub joint_cost: Option<usize>,
    pub skipped: Vec<Candidate>,
    pub alternatives: Vec<Candidate>,
}

impl From<&AscriptionReport> for ReportRecord {
    fn from(r: &AscriptionReport) -> Self {
        ReportRecord {
            kind: r.kind,
            goal: r.goal.clone(),
            intentions: r.intentions.clone(),
            exclusive_state: r.exclusive_state.clone(),
            completion: r.completion.as_ref().map(|c| CompletionRecord {
                actions: c.heads(),
                actors: c.actors(),
                entry_state: c.entry_state.clone(),
                achieved_goal: c.achieved_goal.clone(),
            }),
            conditions: r.conditions,
            joint_cost: r.joint_cost,
            skipped: r.skipped.clone(),
            alternatives: r.alternatives.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Event {
    Act {
        act: Term,
    },
    Ascribe {
        path: ViewpointPath,
        attitude: Attitude,
        anchor: String,
    },
    Block {
        path: ViewpointPath,
        attitude: Attitude,
        anchor: String,
        cause: String,
    },
    PlanFound {
        role: PlanRole,
        goal: Term,
        /// Steps in execution order.
        steps: Vec<Term>,
        links: Vec<CausalLink>,
        cost: usize,
    },
    Audit {
        status: AuditStatus,
        candidates: Vec<Term>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        goal: Option<Term>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        candidate_rank: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        cost_r: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        cost_o: Option<usize>,
    },
    AscriptionReport {
        report: ReportRecord,
    },
    Error {
        message: String,
    },
}

impl Event {
    pub fn from_store_event(e: &StoreEvent) -> Event {
        match e.kind {
            StoreEventKind::Assert => Event::Ascribe { path: e.path.clone(), attitude: e.attitude.clone(), anchor: e.anchor.clone() },
            StoreEventKind::Block => Event::Block {
                path: e.path.clone(),
                attitude: e.attitude.clone(),
                anchor: e.anchor.clone(),
                cause: e.cause.clone().unwrap_or_default(),
            },
        }
    }

    pub fn plan_found(role: PlanRole, plan: &Plan) -> Event {
        let steps = plan.actions().map(|a| a.iter().map(|o| o.head()).collect()).unwrap_or_default();
        Event::PlanFound {
            role,
            goal: conjunction(&plan.goals),
            steps,
            links: plan.links.clone(),
            cost: plan.cost().unwrap_or(0),
        }
    }
}

fn conjunction(goals: &[Term]) -> Term {
    match goals {
        [one] => one.clone(),
        many => Term::compound("and", many.to_vec()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub index: usize,
    pub module: Module,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub turn: Option<usize>,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub schema: String,
    pub events: Vec<Record>,
}

impl Default for Trace {
    fn default() -> Self {
        Trace { schema: SCHEMA.into(), events: Vec::new() }
    }
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, module: Module, turn: Option<usize>, event: Event) {
        let index = self.events.len();
        self.events.push(Record { index, module, turn, event });
    }

    pub fn extend_store(&mut self, module: Module, turn: Option<usize>, events: &[StoreEvent]) {
        for e in events {
            self.push(module, turn, Event::from_store_event(e));
        }
    }

    /// Rebuilds belief spaces and discourse expectations from the events.
    /// Reliability and action registrations are not traced.
    pub fn replay(&self) -> BeliefStore {
        let mut store = BeliefStore::new();
        for r in &self.events {
            match &r.event {
                Event::Ascribe { path, attitude, anchor } => {
                    let e = StoreEvent {
                        kind: StoreEventKind::Assert,
                        path: path.clone(),
                        attitude: attitude.clone(),
                        anchor: anchor.clone(),
                        cause: None,
                    };
                    store = store.replay(&e).expect("assert events replay");
                }
                Event::Act { act } => {
                    if let Ok(a) = ActInstance::from_term(act) {
                        if a.schema == QUESTION {
                            store = store.with_expectation(Expectation { asker: a.speaker, asked: a.hearer, content: a.content });
                        }
                    }
                }
                _ => {}
            }
        }
        store
    }
}

/// Canonical JSON: keys sorted, two-space indentation, trailing newline.
pub fn emit_json(trace: &Trace) -> String {
    let value = serde_json::to_value(trace).expect("traces serialize");
    let mut out = serde_json::to_string_pretty(&value).expect("values serialize");
    out.push('\n');
    out
}

pub fn parse_json(text: &str) -> Result<Trace, serde_json::Error> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn empty_trace() {
        let json = emit_json(&Trace::new());
        assert_eq!(json, "{\n  \"events\": [],\n  \"schema\": \"vgtrace/1\"\n}\n");
        assert_eq!(parse_json(&json).unwrap(), Trace::new());
    }

    #[test]
    fn round_trip_and_sorted_keys() {
        let mut tr = Trace::new();
        tr.push(Module::DialogueActs, Some(0), Event::Act { act: t("question(a, b, p)") });
        tr.push(
            Module::BeliefSpaces,
            Some(0),
            Event::Ascribe { path: ViewpointPath::new(["a", "b"]), attitude: Attitude::bel(t("p")), anchor: "update:hearer".into() },
        );
        tr.push(
            Module::Implicature,
            None,
            Event::Audit { status: AuditStatus::NoCandidates, candidates: vec![], goal: None, candidate_rank: None, cost_r: None, cost_o: None },
        );
        tr.push(Module::Scenario, None, Event::Error { message: "x".into() });
        let json = emit_json(&tr);
        assert_eq!(parse_json(&json).unwrap(), tr);
        let first = json.find("\"anchor\"").unwrap();
        assert!(first < json.find("\"attitude\"").unwrap());
        let replayed = tr.replay();
        assert!(replayed.holds(&ViewpointPath::new(["a", "b"]), &Attitude::bel(t("p"))));
        assert_eq!(replayed.expectations().len(), 1);
    }
}
