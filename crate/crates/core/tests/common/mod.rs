//! Test-only oracles, independent of the planner's search.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use vgimp_core::planner::Operator;
use vgimp_core::term::Term;

/// A randomized ground STRIPS domain.
#[derive(Clone, Debug)]
pub struct Domain {
    pub initial: BTreeSet<Term>,
    pub goals: Vec<Term>,
    pub ops: Vec<Operator>,
}

pub fn random_domain(rng: &mut impl Rng) -> Domain {
    let n_atoms = rng.gen_range(3..=8);
    let atoms: Vec<Term> = (0..n_atoms).map(|i| Term::atom(format!("p{i}"))).collect();
    let sample = |rng: &mut dyn rand::RngCore, from: &[Term], lo: usize, hi: usize| -> Vec<Term> {
        let k = rng.gen_range(lo..=hi).min(from.len());
        let mut v: Vec<Term> = from.choose_multiple(rng, k).cloned().collect();
        v.sort();
        v
    };
    let initial: BTreeSet<Term> = sample(rng, &atoms, 1, 2).into_iter().collect();
    // preconditions mostly come from atoms that are already obtainable, so
    // chains of dependent operators are common
    let mut obtainable: Vec<Term> = initial.iter().cloned().collect();
    let n_ops = rng.gen_range(2..=6);
    let mut ops = Vec::new();
    for i in 0..n_ops {
        let pool = if rng.gen_bool(0.85) { obtainable.clone() } else { atoms.clone() };
        let pre = sample(rng, &pool, 1, 2);
        let add = sample(rng, &atoms, 1, 2);
        let del: Vec<Term> = sample(rng, &atoms, 0, 2).into_iter().filter(|d| !add.contains(d)).collect();
        for a in &add {
            if !obtainable.contains(a) {
                obtainable.push(a.clone());
            }
        }
        let name = format!("op{}", (b'a' + i as u8) as char);
        ops.push(Operator::new(name, Term::atom("agent"), pre, add, del));
    }
    let outside: Vec<Term> = atoms.iter().filter(|a| !initial.contains(*a)).cloned().collect();
    let goals = sample(rng, &outside, 1, 3);
    Domain { initial, goals, ops }
}

fn applicable(op: &Operator, s: &BTreeSet<Term>) -> bool {
    op.pre.iter().all(|p| s.contains(p))
}

fn apply(op: &Operator, s: &BTreeSet<Term>) -> BTreeSet<Term> {
    let mut n = s.clone();
    for d in &op.del {
        n.remove(d);
    }
    n.extend(op.add.iter().cloned());
    n
}

/// Length of the shortest ground action sequence reaching all goals, by
/// breadth-first search over states.
pub fn bfs_min_length(initial: &BTreeSet<Term>, goals: &[Term], ops: &[Operator], bound: usize) -> Option<usize> {
    let done = |s: &BTreeSet<Term>| goals.iter().all(|g| s.contains(g));
    let mut seen = BTreeSet::from([initial.clone()]);
    let mut queue = VecDeque::from([(initial.clone(), 0usize)]);
    while let Some((s, d)) = queue.pop_front() {
        if done(&s) {
            return Some(d);
        }
        if d == bound {
            continue;
        }
        for op in ops {
            if applicable(op, &s) {
                let n = apply(op, &s);
                if seen.insert(n.clone()) {
                    queue.push_back((n, d + 1));
                }
            }
        }
    }
    None
}

/// Shortest sequence length over ground actions whose goals may contain
/// variables: a goal holds when it unifies with some fact.
pub fn bfs_min_length_unifying(initial: &BTreeSet<Term>, goals: &[Term], ops: &[Operator], bound: usize) -> Option<usize> {
    let done = |s: &BTreeSet<Term>| vgimp_core::planner::satisfies(s, goals);
    let mut seen = BTreeSet::from([initial.clone()]);
    let mut queue = VecDeque::from([(initial.clone(), 0usize)]);
    while let Some((s, d)) = queue.pop_front() {
        if done(&s) {
            return Some(d);
        }
        if d == bound {
            continue;
        }
        for op in ops {
            if applicable(op, &s) {
                let n = apply(op, &s);
                if seen.insert(n.clone()) {
                    queue.push_back((n, d + 1));
                }
            }
        }
    }
    None
}

/// Exhaustive enumeration of ground action sequences (no state merging):
/// minimum length of a sequence that contains `required`, reaches the
/// goals, and in which every action is executable.
pub fn enumerate_min_with(initial: &BTreeSet<Term>, goals: &[Term], ops: &[Operator], required: &Operator, bound: usize) -> Option<usize> {
    fn go(s: &BTreeSet<Term>, used: bool, depth: usize, goals: &[Term], ops: &[Operator], req: &Operator, bound: usize) -> Option<usize> {
        if used && vgimp_core::planner::satisfies(s, goals) {
            return Some(depth);
        }
        if depth == bound {
            return None;
        }
        let mut best: Option<usize> = None;
        for op in ops.iter().chain(std::iter::once(req)) {
            if applicable(op, s) {
                let hit = used || op.head() == req.head();
                if let Some(d) = go(&apply(op, s), hit, depth + 1, goals, ops, req, bound) {
                    best = Some(best.map_or(d, |b: usize| b.min(d)));
                }
            }
        }
        best
    }
    go(initial, false, 0, goals, ops, required, bound)
}
