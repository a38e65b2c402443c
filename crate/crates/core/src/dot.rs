//! Graphviz export of plans.
//!
//! Causal links are solid edges labelled with their condition. Ordering
//! constraints not implied by a link are dotted. An optional completion is
//! drawn dashed, hanging off the step that produced its entry state.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::planner::{Completion, Plan, StepId};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn node(id: StepId) -> String {
    id.to_string()
}

pub fn emit_dot(plan: &Plan, overlay: Option<&Completion>) -> String {
    let mut out = String::from("digraph plan {\n  rankdir=LR;\n  node [shape=box];\n");
    let _ = writeln!(out, "  init [label=\"init\", shape=ellipse];");
    let _ = writeln!(out, "  goal [label=\"goal\", shape=ellipse];");
    for (id, op) in &plan.steps {
        let _ = writeln!(out, "  {} [label={}];", node(*id), quote(&op.head().to_string()));
    }
    let linked: BTreeSet<(StepId, StepId)> = plan.links.iter().map(|l| (l.producer, l.consumer)).collect();
    for l in &plan.links {
        let _ = writeln!(out, "  {} -> {} [label={}];", node(l.producer), node(l.consumer), quote(&l.condition.to_string()));
    }
    for (a, b) in &plan.ordering {
        if *a == StepId::Init || *b == StepId::Goal || linked.contains(&(*a, *b)) {
            continue;
        }
        let _ = writeln!(out, "  {} -> {} [style=dotted];", node(*a), node(*b));
    }
    if let Some(c) = overlay {
        let producer = plan
            .linearize()
            .ok()
            .and_then(|order| order.into_iter().find(|id| plan.steps[id].add.contains(&c.entry_state)))
            .unwrap_or(StepId::Init);
        let mut prev = node(producer);
        let mut label = c.entry_state.to_string();
        for (i, a) in c.actions.iter().enumerate() {
            let id = format!("c{}", i + 1);
            let _ = writeln!(out, "  {id} [label={}, style=dashed];", quote(&a.head().to_string()));
            let _ = writeln!(out, "  {prev} -> {id} [label={}, style=dashed];", quote(&label));
            label = a.add.first().map(ToString::to_string).unwrap_or_default();
            prev = id;
        }
        let _ = writeln!(out, "  extra [label={}, shape=ellipse, style=dashed];", quote(&c.achieved_goal.to_string()));
        let _ = writeln!(out, "  {prev} -> extra [style=dashed];");
    }
    out.push_str("}\n");
    out
}
