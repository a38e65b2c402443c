use std::collections::{BTreeMap, BTreeSet};

use super::{ground, CausalLink, Operator, Plan, StepId};
use crate::term::{Substitution, Term};

const INIT: usize = 0;
const GOAL: usize = 1;

/// Default cap on search nodes per call.
pub const DEFAULT_NODE_LIMIT: usize = 2_000_000;

#[derive(Clone, Debug)]
pub struct SearchRequest<'a> {
    pub initial: &'a BTreeSet<Term>,
    pub goals: &'a [Term],
    /// Schemas or ground operators; instantiated against `initial` first.
    pub operators: &'a [Operator],
    pub bound: usize,
    /// A ground step every returned plan must contain and use (through
    /// causal links) to reach the goal.
    pub required: Option<&'a Operator>,
    pub node_limit: usize,
}

impl<'a> SearchRequest<'a> {
    pub fn new(initial: &'a BTreeSet<Term>, goals: &'a [Term], operators: &'a [Operator], bound: usize) -> Self {
        SearchRequest { initial, goals, operators, bound, required: None, node_limit: DEFAULT_NODE_LIMIT }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub plan: Option<Plan>,
    pub nodes: usize,
    /// The node limit cut the search short; a `None` plan is then not proof
    /// that no plan exists within the bound.
    pub node_limit_hit: bool,
}

/// Minimal-cost complete plan with at most `bound` steps.
pub fn plan(initial: &BTreeSet<Term>, goals: &[Term], ops: &[Operator], bound: usize) -> Option<Plan> {
    search(&SearchRequest::new(initial, goals, ops, bound)).plan
}

/// Minimal-cost plan that contains `required` and routes its effects to the
/// goal.
pub fn plan_through(initial: &BTreeSet<Term>, goals: &[Term], ops: &[Operator], required: &Operator, bound: usize) -> Option<Plan> {
    let mut req = SearchRequest::new(initial, goals, ops, bound);
    req.required = Some(required);
    search(&req).plan
}

pub fn search(req: &SearchRequest<'_>) -> SearchOutcome {
    let mut reach = req.initial.clone();
    if let Some(r) = req.required {
        reach.extend(r.add.iter().cloned());
    }
    let mut actions = ground(req.operators, &reach, req.bound);
    let required = req.required.map(|r| match actions.iter().position(|a| a == r) {
        Some(i) => i,
        None => {
            actions.push(r.clone());
            actions.len() - 1
        }
    });
    let mut searcher = Searcher {
        initial: req.initial,
        goals: req.goals,
        actions: &actions,
        required,
        nodes: 0,
        limit: req.node_limit,
        best: None,
    };
    let min_steps = usize::from(required.is_some());
    for max_steps in min_steps..=req.bound {
        searcher.dfs(searcher.root(), max_steps);
        if searcher.best.is_some() || searcher.nodes >= searcher.limit {
            break;
        }
    }
    let plan = searcher.best.take().map(|(_, node)| searcher.to_plan(&node));
    SearchOutcome { plan, nodes: searcher.nodes, node_limit_hit: searcher.nodes >= searcher.limit }
}

#[derive(Clone)]
struct Node {
    /// `None` for the init and goal pseudo-steps.
    steps: Vec<Option<usize>>,
    /// Transitive closure of the ordering.
    before: Vec<Vec<bool>>,
    edges: Vec<(usize, usize)>,
    links: Vec<(usize, Term, usize)>,
    open: Vec<(usize, Term)>,
    subst: Substitution,
}

impl Node {
    fn add_step(&mut self, action: usize) -> usize {
        let id = self.steps.len();
        self.steps.push(Some(action));
        for row in &mut self.before {
            row.push(false);
        }
        self.before.push(vec![false; id + 1]);
        self.order(INIT, id);
        self.order(id, GOAL);
        id
    }

    fn order(&mut self, a: usize, b: usize) -> bool {
        if a == b || self.before[b][a] {
            return false;
        }
        if self.before[a][b] {
            return true;
        }
        self.edges.push((a, b));
        let n = self.steps.len();
        let sources: Vec<usize> = (0..n).filter(|&x| x == a || self.before[x][a]).collect();
        let sinks: Vec<usize> = (0..n).filter(|&y| y == b || self.before[b][y]).collect();
        for &x in &sources {
            for &y in &sinks {
                self.before[x][y] = true;
            }
        }
        true
    }

    fn real_steps(&self) -> usize {
        self.steps.len() - 2
    }
}

type Key = (Vec<String>, Vec<String>);

struct Searcher<'a> {
    initial: &'a BTreeSet<Term>,
    goals: &'a [Term],
    actions: &'a [Operator],
    required: Option<usize>,
    nodes: usize,
    limit: usize,
    best: Option<(Key, Node)>,
}

impl<'a> Searcher<'a> {
    fn root(&self) -> Node {
        let mut node = Node {
            steps: vec![None, None],
            before: vec![vec![false, true], vec![false, false]],
            edges: Vec::new(),
            links: Vec::new(),
            open: self.goals.iter().rev().map(|g| (GOAL, g.clone())).collect(),
            subst: Substitution::new(),
        };
        if let Some(r) = self.required {
            let id = node.add_step(r);
            node.open.extend(self.actions[r].pre.iter().rev().map(|p| (id, p.clone())));
        }
        node
    }

    fn adds(&self, node: &Node, step: usize) -> Vec<&'a Term> {
        match node.steps[step] {
            Some(a) => self.actions[a].add.iter().collect(),
            None if step == INIT => self.initial.iter().collect(),
            None => Vec::new(),
        }
    }

    fn dels(&self, node: &Node, step: usize) -> &'a [Term] {
        match node.steps[step] {
            Some(a) => &self.actions[a].del,
            None => &[],
        }
    }

    fn find_threat(&self, node: &Node) -> Option<(usize, usize, usize)> {
        for (p, c, q) in &node.links {
            let c = node.subst.apply(c);
            for t in 2..node.steps.len() {
                if t == *p || t == *q {
                    continue;
                }
                if self.dels(node, t).contains(&c) && !node.before[t][*p] && !node.before[*q][t] {
                    return Some((*p, t, *q));
                }
            }
        }
        None
    }

    fn dfs(&mut self, node: Node, max_steps: usize) {
        if self.nodes >= self.limit {
            return;
        }
        self.nodes += 1;

        if let Some((p, t, q)) = self.find_threat(&node) {
            if p != INIT {
                let mut demoted = node.clone();
                if demoted.order(t, p) {
                    self.dfs(demoted, max_steps);
                }
            }
            if q != GOAL {
                let mut promoted = node;
                if promoted.order(q, t) {
                    self.dfs(promoted, max_steps);
                }
            }
            return;
        }

        let mut node = node;
        let Some((consumer, cond)) = node.open.pop() else {
            self.record(node);
            return;
        };
        let cond = node.subst.apply(&cond);

        // reuse an existing step
        for s in 0..node.steps.len() {
            if s == GOAL || s == consumer || node.before[consumer][s] {
                continue;
            }
            for e in self.adds(&node, s) {
                if let Some(s2) = node.subst.unify(&cond, e) {
                    let mut child = node.clone();
                    child.subst = s2;
                    child.order(s, consumer);
                    child.links.push((s, cond.clone(), consumer));
                    self.dfs(child, max_steps);
                }
            }
        }

        // add a new step
        if node.real_steps() >= max_steps {
            return;
        }
        for (a, action) in self.actions.iter().enumerate() {
            for e in &action.add {
                if let Some(s2) = node.subst.unify(&cond, e) {
                    let mut child = node.clone();
                    child.subst = s2;
                    let id = child.add_step(a);
                    child.order(id, consumer);
                    child.links.push((id, cond.clone(), consumer));
                    child.open.extend(action.pre.iter().rev().map(|p| (id, p.clone())));
                    self.dfs(child, max_steps);
                }
            }
        }
    }

    fn record(&mut self, node: Node) {
        if self.required.is_some() && !self.reaches_goal(&node, 2) {
            return;
        }
        let order = self.linear(&node);
        let key: Key = (
            order.iter().map(|&s| self.actions[node.steps[s].unwrap_or_default()].name.clone()).collect(),
            order.iter().map(|&s| self.actions[node.steps[s].unwrap_or_default()].head().to_string()).collect(),
        );
        if self.best.as_ref().is_none_or(|(k, _)| key < *k) {
            self.best = Some((key, node));
        }
    }

    fn reaches_goal(&self, node: &Node, from: usize) -> bool {
        let mut frontier = vec![from];
        let mut seen = BTreeSet::new();
        while let Some(s) = frontier.pop() {
            if s == GOAL {
                return true;
            }
            if seen.insert(s) {
                frontier.extend(node.links.iter().filter(|(p, _, _)| *p == s).map(|(_, _, q)| *q));
            }
        }
        false
    }

    /// Real steps in a total order, smallest internal index first among
    /// the ready ones.
    fn linear(&self, node: &Node) -> Vec<usize> {
        let mut remaining: BTreeSet<usize> = (2..node.steps.len()).collect();
        let mut out = Vec::new();
        while let Some(&next) = remaining.iter().find(|&&s| remaining.iter().all(|&o| !node.before[o][s])) {
            remaining.remove(&next);
            out.push(next);
        }
        out
    }

    fn to_plan(&self, node: &Node) -> Plan {
        let order = self.linear(node);
        let mut ids: BTreeMap<usize, StepId> = BTreeMap::from([(INIT, StepId::Init), (GOAL, StepId::Goal)]);
        for (i, s) in order.iter().enumerate() {
            ids.insert(*s, StepId::Step(i as u32 + 1));
        }
        let steps = order
            .iter()
            .map(|s| (ids[s], self.actions[node.steps[*s].expect("real step")].clone()))
            .collect();
        let links: Vec<CausalLink> = node
            .links
            .iter()
            .map(|(p, c, q)| CausalLink { producer: ids[p], condition: node.subst.apply(c), consumer: ids[q] })
            .collect();
        let ordering = node
            .edges
            .iter()
            .filter(|(a, b)| *a >= 2 && *b >= 2)
            .filter(|(a, b)| !node.links.iter().any(|(p, _, q)| p == a && q == b))
            .map(|(a, b)| (ids[a], ids[b]))
            .collect();
        let mut links = links;
        links.sort();
        Plan {
            initial: self.initial.clone(),
            goals: self.goals.iter().map(|g| node.subst.apply(g)).collect(),
            steps,
            ordering,
            links,
            open: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{satisfies, simulate};
    use super::*;
    use crate::term::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn op(name: &str, pre: &[&str], add: &[&str], del: &[&str]) -> Operator {
        let v = |xs: &[&str]| xs.iter().map(|s| t(s)).collect();
        Operator::new(name, t("agent"), v(pre), v(add), v(del))
    }

    #[test]
    fn resolves_threats() {
        // b deletes p, which a needs; b must come after a
        let init: BTreeSet<Term> = [t("p")].into();
        let ops = [op("a", &["p"], &["x"], &[]), op("b", &[], &["y"], &["p"])];
        let plan = plan(&init, &[t("x"), t("y")], &ops, 3).unwrap();
        assert_eq!(plan.cost().unwrap(), 2);
        let seq = plan.actions().unwrap();
        assert_eq!(seq[0].name, "a");
        let end = simulate(&init, &seq).unwrap();
        assert!(satisfies(&end, &plan.goals));
    }

    #[test]
    fn unreachable_goal_returns_none() {
        let init: BTreeSet<Term> = [t("p")].into();
        assert!(plan(&init, &[t("z")], &[op("a", &["p"], &["x"], &[])], 4).is_none());
    }

    #[test]
    fn binds_goal_variables() {
        let init: BTreeSet<Term> = [t("p")].into();
        let plan = plan(&init, &[t("q(?who)")], &[op("a", &["p"], &["q(me)"], &[])], 2).unwrap();
        assert_eq!(plan.goals, vec![t("q(me)")]);
    }

    #[test]
    fn required_step_must_contribute() {
        let init: BTreeSet<Term> = [t("p")].into();
        let ops = [op("a", &["p"], &["g"], &[]), op("u", &["p"], &["h"], &[]), op("b", &["h"], &["g"], &[])];
        let plain = plan(&init, &[t("g")], &ops, 4).unwrap();
        assert_eq!(plain.cost().unwrap(), 1);
        let through = plan_through(&init, &[t("g")], &ops, &ops[1], 4).unwrap();
        let names: Vec<String> = through.actions().unwrap().into_iter().map(|o| o.name).collect();
        assert_eq!(names, vec!["u", "b"]);
        // a required step that cannot contribute yields nothing
        let dead = op("d", &["p"], &["junk"], &[]);
        assert!(plan_through(&init, &[t("g")], &ops, &dead, 4).is_none());
    }

    #[test]
    fn ties_break_on_operator_names() {
        let init: BTreeSet<Term> = [t("p")].into();
        let ops = [op("zeta", &["p"], &["g"], &[]), op("alpha", &["p"], &["g"], &[])];
        let plan = plan(&init, &[t("g")], &ops, 2).unwrap();
        assert_eq!(plan.actions().unwrap()[0].name, "alpha");
    }
}
