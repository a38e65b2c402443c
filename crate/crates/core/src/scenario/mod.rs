//! Scenario files: an S-expression format declaring agents, beliefs,
//! stereotypes, extra operators and the dialogue turns.
//!
//! ```text
//! (agents system expert)
//! (stereotype computer_expert
//!   (member expert)
//!   (attitude goal(not(damage(hard_drive))))
//!   (goal-template goal(?self, bel(?, cause(switch(?, computer_off), damage(hard_drive))))))
//! (believes (system expert) bel(p))
//! (reliable expert cause)
//! (operator blame (actor ?h) (pre bel(?h, p)) (add blamed(?h)))
//! (goal expert goal(expert, q))
//! (avoid-goal kid blamed(kid))
//! (turn question(system, expert, p))
//! (config bound 8)
//! ```
//!
//! Terms use the canonical syntax; inside a term's argument list whitespace
//! is free, but a functor must touch its `(`.

mod run;
mod sexpr;

use std::collections::BTreeSet;
use std::fmt::Write;

pub use run::{run, summary, RunOutcome, Session};

use crate::acts::{builtin_action_names, ActInstance};
use crate::belief::{Attitude, Stereotype, Trigger, ViewpointPath};
use crate::error::{ParseError, ScenarioError};
use crate::implicature::{AscriptionOrder, InferConfig, Library};
use crate::planner::{Guard, Operator, DEFAULT_BOUND, DEFAULT_NODE_LIMIT};
use crate::term::Term;
use sexpr::{read_all, Node, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub bound: usize,
    /// Halt at the first turn whose utterance cannot be explained.
    pub strict: bool,
    pub order: AscriptionOrder,
    /// Reject two consecutive turns by the same speaker.
    pub alternate_speakers: bool,
    pub node_limit: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            bound: DEFAULT_BOUND,
            strict: false,
            order: AscriptionOrder::ConjunctiveFirst,
            alternate_speakers: true,
            node_limit: DEFAULT_NODE_LIMIT,
        }
    }
}

impl Config {
    pub fn infer_config(&self) -> InferConfig {
        InferConfig { bound: self.bound, order: self.order, node_limit: self.node_limit }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Scenario {
    pub agents: Vec<String>,
    /// Extra action names intentions may refer to.
    pub actions: Vec<String>,
    pub stereotypes: Vec<Stereotype>,
    pub beliefs: Vec<(ViewpointPath, Attitude)>,
    pub reliable: Vec<(String, String)>,
    pub operators: Vec<Operator>,
    pub goals: Vec<(String, Term)>,
    pub avoid: Vec<(String, Term)>,
    pub turns: Vec<ActInstance>,
    pub config: Config,
}

impl Scenario {
    pub fn library(&self) -> Library {
        Library { stereotypes: self.stereotypes.clone(), goals: self.goals.clone(), avoid: self.avoid.clone() }
    }

    /// Builtin operators followed by the scenario's own.
    pub fn all_operators(&self) -> Vec<Operator> {
        let mut ops = crate::acts::builtin_operators();
        ops.extend(self.operators.iter().cloned());
        ops
    }

    /// Every action name intentions may mention.
    pub fn action_names(&self) -> BTreeSet<String> {
        let mut names = builtin_action_names();
        names.extend(self.operators.iter().map(|o| o.name.clone()));
        names.extend(self.actions.iter().cloned());
        names
    }
}

fn expect_term(n: &Node) -> Result<Term, ParseError> {
    match n {
        Node::Term(t, _) => Ok(t.clone()),
        other => Err(other.pos().error("expected a term")),
    }
}

fn expect_word(n: &Node) -> Result<String, ParseError> {
    n.word().map(str::to_string).ok_or_else(|| n.pos().error("expected a name"))
}

fn expect_attitude(n: &Node) -> Result<Attitude, ScenarioError> {
    let t = expect_term(n)?;
    Attitude::from_term(&t).ok_or_else(|| ScenarioError::MalformedTerm(format!("{}:{}: {t} is not bel(..), goal(..) or int(..)", n.pos().line, n.pos().column)))
}

fn arity(items: &[Node], at: Pos, n: usize, what: &str) -> Result<(), ParseError> {
    if items.len() != n {
        return Err(at.error(format!("{what} takes {} argument(s), found {}", n - 1, items.len() - 1)));
    }
    Ok(())
}

fn clauses(items: &[Node]) -> Result<Vec<(String, &[Node], Pos)>, ParseError> {
    items
        .iter()
        .map(|n| match n {
            Node::List(inner, at) if !inner.is_empty() => Ok((expect_word(&inner[0])?, &inner[1..], *at)),
            other => Err(other.pos().error("expected a (keyword ...) clause")),
        })
        .collect()
}

fn stereotype(items: &[Node]) -> Result<Stereotype, ScenarioError> {
    let name = expect_word(items.first().ok_or_else(|| ParseError { line: 0, column: 0, message: "stereotype needs a name".into() })?)?;
    let mut st = Stereotype { name, triggers: Vec::new(), attitudes: Vec::new(), goal_library: Vec::new() };
    for (key, args, at) in clauses(&items[1..])? {
        match key.as_str() {
            "member" => st.triggers.extend(args.iter().map(|a| expect_word(a).map(Trigger::Member)).collect::<Result<Vec<_>, _>>()?),
            "trigger-act" => st.triggers.extend(args.iter().map(|a| expect_word(a).map(Trigger::Act)).collect::<Result<Vec<_>, _>>()?),
            "attitude" => {
                for a in args {
                    st.attitudes.push(expect_attitude(a)?);
                }
            }
            "goal-template" => {
                for a in args {
                    st.goal_library.push(expect_term(a)?);
                }
            }
            other => return Err(at.error(format!("unknown stereotype clause `{other}`")).into()),
        }
    }
    Ok(st)
}

fn operator(items: &[Node], at: Pos) -> Result<Operator, ScenarioError> {
    let name = expect_word(items.first().ok_or_else(|| at.error("operator needs a name"))?)?;
    let terms = |args: &[Node]| args.iter().map(expect_term).collect::<Result<Vec<_>, _>>();
    let (mut actor, mut params, mut pre, mut add, mut del, mut guards) = (None, None, Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (key, args, at) in clauses(&items[1..])? {
        let ts = terms(args)?;
        match key.as_str() {
            "actor" => {
                if ts.len() != 1 {
                    return Err(at.error("actor takes 1 argument").into());
                }
                actor = ts.into_iter().next();
            }
            "params" => params = Some(ts),
            "pre" => pre.extend(ts),
            "add" => add.extend(ts),
            "del" => del.extend(ts),
            "reliable" | "no-contrary" if ts.len() == 2 => {
                let (a, b) = (ts[0].clone(), ts[1].clone());
                guards.push(if key == "reliable" {
                    Guard::Reliable { source: a, content: b }
                } else {
                    Guard::NoContrary { holder: a, content: b }
                });
            }
            "unasked" if ts.len() == 3 => {
                guards.push(Guard::Unasked { asker: ts[0].clone(), asked: ts[1].clone(), content: ts[2].clone() })
            }
            other => return Err(at.error(format!("unknown or malformed operator clause `{other}`")).into()),
        }
    }
    let actor = actor.ok_or_else(|| at.error(format!("operator {name} needs an (actor ..) clause")))?;
    let mut op = Operator::new(&name, actor, pre, add, del);
    op.guards = guards;
    if let Some(p) = params {
        op.params = p;
    }
    op.validate()?;
    Ok(op)
}

fn config(cfg: &mut Config, args: &[Node], at: Pos) -> Result<(), ParseError> {
    if args.len() != 2 {
        return Err(at.error("config takes a key and a value"));
    }
    let key = expect_word(&args[0])?;
    let value = expect_word(&args[1])?;
    let bad = || at.error(format!("bad value `{value}` for config {key}"));
    let flag = || match value.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(bad()),
    };
    match key.as_str() {
        "bound" => cfg.bound = value.parse().map_err(|_| bad())?,
        "node-limit" => cfg.node_limit = value.parse().map_err(|_| bad())?,
        "strict" => cfg.strict = flag()?,
        "alternate-speakers" => cfg.alternate_speakers = flag()?,
        "order" => {
            cfg.order = match value.as_str() {
                "conjunctive-first" => AscriptionOrder::ConjunctiveFirst,
                "avoidance-first" => AscriptionOrder::AvoidanceFirst,
                _ => return Err(bad()),
            }
        }
        other => return Err(at.error(format!("unknown config key `{other}`"))),
    }
    Ok(())
}

/// Parses and validates a scenario.
pub fn load_scenario(src: &str) -> Result<Scenario, ScenarioError> {
    let nodes = read_all(src)?;
    let mut s = Scenario::default();
    let mut saw_agents = false;
    for node in &nodes {
        let Node::List(items, at) = node else {
            return Err(node.pos().error("expected a (section ...)").into());
        };
        let at = *at;
        let Some(head) = items.first() else {
            return Err(at.error("empty section").into());
        };
        let key = expect_word(head)?;
        let args = &items[1..];
        match key.as_str() {
            "agents" => {
                saw_agents = true;
                for a in args {
                    s.agents.push(expect_word(a)?);
                }
            }
            "action" => {
                for a in args {
                    s.actions.push(expect_word(a)?);
                }
            }
            "stereotype" => s.stereotypes.push(stereotype(args)?),
            "believes" => {
                arity(items, at, 3, "believes")?;
                let Node::List(path, _) = &args[0] else {
                    return Err(args[0].pos().error("expected a viewpoint path like (system expert)").into());
                };
                let agents = path.iter().map(expect_word).collect::<Result<Vec<_>, _>>()?;
                s.beliefs.push((ViewpointPath::new(agents), expect_attitude(&args[1])?));
            }
            "reliable" => {
                arity(items, at, 3, "reliable")?;
                s.reliable.push((expect_word(&args[0])?, expect_word(&args[1])?));
            }
            "operator" => s.operators.push(operator(args, at)?),
            "goal" | "avoid-goal" => {
                arity(items, at, 3, &key)?;
                let entry = (expect_word(&args[0])?, expect_term(&args[1])?);
                if key == "goal" {
                    s.goals.push(entry);
                } else {
                    s.avoid.push(entry);
                }
            }
            "turn" => {
                arity(items, at, 2, "turn")?;
                s.turns.push(ActInstance::from_term(&expect_term(&args[0])?)?);
            }
            "config" => config(&mut s.config, args, at)?,
            other => return Err(at.error(format!("unknown section `{other}`")).into()),
        }
    }
    if !saw_agents {
        return Err(ParseError { line: 1, column: 1, message: "missing agents section".into() }.into());
    }
    validate(&s)?;
    Ok(s)
}

fn validate(s: &Scenario) -> Result<(), ScenarioError> {
    let known = |a: &str| -> Result<(), ScenarioError> {
        if s.agents.iter().any(|x| x == a) {
            Ok(())
        } else {
            Err(ScenarioError::UndeclaredAgent(a.to_string()))
        }
    };
    for st in &s.stereotypes {
        for t in &st.triggers {
            if let Trigger::Member(m) = t {
                known(m)?;
            }
        }
    }
    for (path, _) in &s.beliefs {
        for a in path.agents() {
            known(a)?;
        }
    }
    let owners = s.reliable.iter().map(|(a, _)| a).chain(s.goals.iter().chain(&s.avoid).map(|(a, _)| a));
    for a in owners {
        known(a)?;
    }
    let mut last: Option<&str> = None;
    for (i, t) in s.turns.iter().enumerate() {
        known(&t.speaker)?;
        known(&t.hearer)?;
        if s.config.alternate_speakers && last == Some(t.speaker.as_str()) {
            return Err(ScenarioError::TurnOrder { turn: i + 1, speaker: t.speaker.clone() });
        }
        last = Some(&t.speaker);
    }
    Ok(())
}

fn list(out: &mut String, key: &str, items: impl IntoIterator<Item = String>) {
    let _ = write!(out, "({key}");
    for i in items {
        let _ = write!(out, " {i}");
    }
    out.push_str(")\n");
}

/// Scenario text that loads back to an equal scenario.
pub fn render(s: &Scenario) -> String {
    let mut out = String::new();
    list(&mut out, "agents", s.agents.iter().cloned());
    if !s.actions.is_empty() {
        list(&mut out, "action", s.actions.iter().cloned());
    }
    for st in &s.stereotypes {
        let _ = writeln!(out, "(stereotype {}", st.name);
        for t in &st.triggers {
            match t {
                Trigger::Member(m) => { let _ = writeln!(out, "  (member {m})"); }
                Trigger::Act(a) => { let _ = writeln!(out, "  (trigger-act {a})"); }
            }
        }
        for a in &st.attitudes {
            let _ = writeln!(out, "  (attitude {a})");
        }
        for g in &st.goal_library {
            let _ = writeln!(out, "  (goal-template {g})");
        }
        out.push_str(")\n");
    }
    for (path, a) in &s.beliefs {
        let _ = writeln!(out, "(believes ({}) {a})", path.agents().join(" "));
    }
    for (a, topic) in &s.reliable {
        let _ = writeln!(out, "(reliable {a} {topic})");
    }
    for op in &s.operators {
        let _ = writeln!(out, "(operator {}", op.name);
        let _ = writeln!(out, "  (actor {})", op.actor);
        let join = |ts: &[Term]| ts.iter().map(|t| format!(" {t}")).collect::<String>();
        let _ = writeln!(out, "  (params{})", join(&op.params));
        for (key, ts) in [("pre", &op.pre), ("add", &op.add), ("del", &op.del)] {
            if !ts.is_empty() {
                let _ = writeln!(out, "  ({key}{})", join(ts));
            }
        }
        for g in &op.guards {
            let (key, args) = match g {
                Guard::Reliable { source, content } => ("reliable", vec![source.clone(), content.clone()]),
                Guard::NoContrary { holder, content } => ("no-contrary", vec![holder.clone(), content.clone()]),
                Guard::Unasked { asker, asked, content } => ("unasked", vec![asker.clone(), asked.clone(), content.clone()]),
            };
            let _ = writeln!(out, "  ({key}{})", join(&args));
        }
        out.push_str(")\n");
    }
    for (a, g) in &s.goals {
        let _ = writeln!(out, "(goal {a} {g})");
    }
    for (a, g) in &s.avoid {
        let _ = writeln!(out, "(avoid-goal {a} {g})");
    }
    for t in &s.turns {
        let _ = writeln!(out, "(turn {})", t.to_term());
    }
    let c = &s.config;
    let order = match c.order {
        AscriptionOrder::ConjunctiveFirst => "conjunctive-first",
        AscriptionOrder::AvoidanceFirst => "avoidance-first",
    };
    let _ = writeln!(out, "(config bound {})", c.bound);
    let _ = writeln!(out, "(config node-limit {})", c.node_limit);
    let _ = writeln!(out, "(config strict {})", c.strict);
    let _ = writeln!(out, "(config order {order})");
    let _ = writeln!(out, "(config alternate-speakers {})", c.alternate_speakers);
    out
}
