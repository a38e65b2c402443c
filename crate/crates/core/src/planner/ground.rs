use std::collections::BTreeSet;

use super::{Guard, Operator};
use crate::belief::topic_of;
use crate::term::{rename_apart_all, Substitution, Term};

/// Cap on instances produced by one grounding pass.
const MAX_INSTANCES: usize = 4096;

/// Checks a ground guard against the initial facts.
pub fn guard_holds(g: &Guard, initial: &BTreeSet<Term>) -> bool {
    match g {
        Guard::Reliable { source, content } => match topic_of(content) {
            Some(topic) => initial.contains(&Term::compound("reliable", vec![source.clone(), Term::atom(topic)])),
            None => false,
        },
        Guard::NoContrary { holder, content } => {
            !initial.contains(&Term::compound("bel", vec![holder.clone(), content.negation()]))
        }
        Guard::Unasked { asker, asked, content } => [content.clone(), content.negation()]
            .into_iter()
            .all(|q| !initial.contains(&Term::compound("expects", vec![asker.clone(), asked.clone(), q]))),
    }
}

/// Ground instances of `ops` reachable from `initial` within `rounds` layers
/// of forward (delete-relaxed) expansion. Already ground operators pass
/// through when their preconditions are reachable. Output order is
/// deterministic: by discovery layer, then operator order, then facts order.
pub fn ground(ops: &[Operator], initial: &BTreeSet<Term>, rounds: usize) -> Vec<Operator> {
    let mut reachable = initial.clone();
    let mut seen: BTreeSet<Operator> = BTreeSet::new();
    let mut out: Vec<Operator> = Vec::new();
    for _ in 0..rounds.max(1) {
        let mut fresh = Vec::new();
        for op in ops {
            for s in matches(&op.pre, &reachable) {
                let inst = op.instantiate(&s);
                if !inst.is_ground() || seen.contains(&inst) {
                    continue;
                }
                if inst.add.iter().any(|a| inst.del.contains(a)) {
                    continue;
                }
                if !inst.guards.iter().all(|g| guard_holds(g, initial)) {
                    continue;
                }
                seen.insert(inst.clone());
                fresh.push(inst);
            }
        }
        if fresh.is_empty() {
            break;
        }
        for inst in &fresh {
            reachable.extend(inst.add.iter().cloned());
        }
        out.extend(fresh);
        if out.len() >= MAX_INSTANCES {
            out.truncate(MAX_INSTANCES);
            break;
        }
    }
    out
}

/// All substitutions making every precondition a member of `facts`.
fn matches(pre: &[Term], facts: &BTreeSet<Term>) -> Vec<Substitution> {
    // rename so schema variables cannot collide with anything in the facts
    let (renamed, _) = rename_apart_all(pre, 0);
    let mut original: Vec<String> = Vec::new();
    for v in pre.iter().flat_map(Term::vars) {
        if !original.contains(&v) {
            original.push(v);
        }
    }
    let mut partial = vec![Substitution::new()];
    for p in &renamed {
        let mut next = Vec::new();
        for s in &partial {
            let p = s.apply(p);
            if p.is_ground() {
                if facts.contains(&p) {
                    next.push(s.clone());
                }
                continue;
            }
            next.extend(facts.iter().filter_map(|f| s.unify(&p, f)));
        }
        partial = next;
        if partial.is_empty() {
            return partial;
        }
    }
    partial
        .into_iter()
        .map(|s| {
            let mut back = Substitution::new();
            for (i, o) in original.iter().enumerate() {
                back.insert(o.clone(), s.apply(&Term::Var(format!("v{i}"))));
            }
            back
        })
        .collect()
}
