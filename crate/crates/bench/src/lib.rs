//! Fixtures shared by the benchmarks in `benches/`.

use std::collections::BTreeSet;

use vgimp_core::planner::Operator;
use vgimp_core::scenario::{load_scenario, Scenario};
use vgimp_core::term::Term;

pub const COMPUTER_OFF: &str = include_str!("../../../scenarios/computer_off.vgs");

pub fn computer_off() -> Scenario {
    load_scenario(COMPUTER_OFF).expect("bundled scenario loads")
}

/// A ground chain `s0 -> s1 -> ... -> s{n}` with a distracting side
/// operator at each link.
pub fn chain(n: usize) -> (BTreeSet<Term>, Vec<Term>, Vec<Operator>) {
    let s = |i: usize| Term::atom(format!("s{i}"));
    let mut ops = Vec::new();
    for i in 0..n {
        ops.push(Operator::new(format!("step{i}"), Term::atom("a"), vec![s(i)], vec![s(i + 1)], vec![]));
        ops.push(Operator::new(format!("side{i}"), Term::atom("b"), vec![s(i)], vec![Term::atom(format!("x{i}"))], vec![]));
    }
    ([s(0)].into(), vec![s(n)], ops)
}
