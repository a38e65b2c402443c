//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vgimp_core::acts::{apply_hearer_update, apply_speaker_update, ActInstance, INFORM, NO_ANSWER, QUESTION, YES_ANSWER};
use vgimp_core::belief::{Attitude, BeliefStore, Expectation, ViewpointPath};
use vgimp_core::implicature::{hypothesis, EfficiencyVerdict, ReportKind};
use vgimp_core::planner::{ground, plan, satisfies, simulate, Operator};
use vgimp_core::scenario::{load_scenario, run, Scenario, Session};
use vgimp_core::term::{parse_term, unifiable, Term};
use vgimp_core::trace::emit_json;

use common::{bfs_min_length, bfs_min_length_unifying, enumerate_min_with, random_domain};

type Outcome = Result<String, String>;

fn t(s: &str) -> Term {
    parse_term(s).unwrap()
}

fn scenario_text(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name);
    std::fs::read_to_string(path).unwrap()
}

fn ensure(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

/// Runs every turn and keeps the inference of the last one.
fn run_session(s: &Scenario) -> Session {
    let mut session = Session::new(s.clone()).unwrap();
    for act in &s.turns {
        let _ = session.step(act);
    }
    session
}

const P: &str = "permission(system, switch(system, computer_off))";
const CAUSE: &str = "cause(switch(system, computer_off), damage(hard_drive))";

fn worked_example() -> Outcome {
    let scenario = load_scenario(&scenario_text("computer_off.vgs")).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let session = run_session(&scenario);
    let elapsed = start.elapsed();
    let out = session.last().ok_or("no inference")?;
    let r = out.recognition.as_ref().ok_or("no recognition")?;

    // (a)
    ensure(unifiable(&r.ascribed_goal, &t(&format!("goal(expert, bel(system, not({P})))"))), format!("recognized {}", r.ascribed_goal))?;
    let pr = r.plan_r.actions().map_err(|e| e.to_string())?;
    ensure(pr.iter().any(|a| a.name == INFORM), "Pr has no inform step")?;

    // (b) costs against the oracles, over the same ground actions
    let EfficiencyVerdict::Inefficient { plan_o, cost_r, cost_o } = out.verdict.as_ref().ok_or("no verdict")? else {
        return Err("verdict is not inefficient".into());
    };
    ensure(plan_o.actions().unwrap().iter().any(|a| a.name == NO_ANSWER), "Po does not use no_answer")?;
    let bound = scenario.config.bound;
    let ops = ground(&scenario.all_operators(), &r.plan_r.initial, bound);
    let goal = [r.target().clone()];
    let oracle_o = bfs_min_length_unifying(&r.plan_r.initial, &goal, &ops, bound);
    let oracle_r = enumerate_min_with(&r.plan_r.initial, &goal, &ops, &r.utterance.operator().unwrap(), *cost_r);
    ensure(oracle_o == Some(*cost_o) && oracle_r == Some(*cost_r), format!("costs {cost_r} vs {cost_o}, oracle {oracle_r:?} vs {oracle_o:?}"))?;
    ensure((*cost_r, *cost_o) == (3, 2), format!("expected 3 vs 2, got {cost_r} vs {cost_o}"))?;

    // (c)
    let report = out.report.as_ref().ok_or("no report")?;
    ensure(report.kind == ReportKind::Conjunctive, format!("report kind {:?}", report.kind))?;
    let educate = t("goal(expert, bel(?a, cause(switch(?b, computer_off), damage(hard_drive))))");
    ensure(report.goal.as_ref().is_some_and(|g| unifiable(g, &educate)), "ascribed goal does not unify with the educate goal")?;
    let completion = report.completion.as_ref().ok_or("no completion")?;
    ensure(completion.heads() == [t(&format!("accept_belief(system, expert, {CAUSE})"))], format!("completion {:?}", completion.heads()))?;

    // (d)
    let view = ViewpointPath::new(["system", "expert"]);
    ensure(out.store.holds(&view, &Attitude::goal(t(&format!("bel(system, {CAUSE})")))), "educate goal missing from [system, expert]")?;
    ensure(
        out.store.holds(&view, &Attitude::int(t(&format!("accept_belief(system, expert, {CAUSE})")))),
        "completion intention missing from [system, expert]",
    )?;
    ensure(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok(format!("costs 3 vs 2 confirmed by oracle, conjunctive goal ascribed, {} ms", elapsed.as_millis()))
}

/// The optimality and soundness suites share the same 100 domains.
fn planner_suite() -> (Outcome, Outcome) {
    let (mut optimal, mut solved, mut unsound) = (0, 0, Vec::new());
    let mut mismatches = Vec::new();
    for seed in 0..100u64 {
        let d = random_domain(&mut ChaCha8Rng::seed_from_u64(seed));
        let want = bfs_min_length(&d.initial, &d.goals, &d.ops, 6);
        let got = plan(&d.initial, &d.goals, &d.ops, 6);
        if got.as_ref().map(|p| p.cost().unwrap()) == want {
            optimal += 1;
        } else {
            mismatches.push(seed);
        }
        if let Some(p) = got {
            solved += 1;
            let sound = p.actions().ok().and_then(|seq| simulate(&d.initial, &seq).ok()).is_some_and(|end| satisfies(&end, &d.goals));
            if !sound {
                unsound.push(seed);
            }
        }
    }
    let opt = if mismatches.is_empty() {
        Ok(format!("{optimal}/100 match the BFS minimum ({solved} solvable)"))
    } else {
        Err(format!("{optimal}/100, mismatching seeds {mismatches:?}"))
    };
    let sound = if unsound.is_empty() {
        Ok(format!("{solved} plans simulate to the goal, 0 failures"))
    } else {
        Err(format!("unsound plans for seeds {unsound:?}"))
    };
    (opt, sound)
}

fn pick<'a>(rng: &mut impl Rng, xs: &[&'a str]) -> &'a str {
    xs[rng.gen_range(0..xs.len())]
}

/// Variations on the permission-question dialogue.
fn conjunctive_family(rng: &mut impl Rng) -> String {
    let asker = pick(rng, &["system", "ann", "user"]);
    let expert = pick(rng, &["expert", "bob", "guru"]);
    let verb = pick(rng, &["switch", "press", "move"]);
    let obj = pick(rng, &["computer_off", "reset", "lever"]);
    let harm = pick(rng, &["damage(hard_drive)", "loss(data)", "fire(lab)"]);
    let cause = format!("cause({verb}({asker}, {obj}), {harm})");
    let matching = if rng.gen_bool(0.5) {
        format!("goal(?self, bel(?, cause({verb}(?, {obj}), {harm})))")
    } else {
        format!("goal(?self, bel({asker}, {cause}))")
    };
    let unrelated = "goal(?self, bel(?, weather(rainy)))".to_string();
    let templates = match rng.gen_range(0..4) {
        0 => vec![matching],
        1 => vec![unrelated],
        2 => vec![unrelated, matching],
        _ => vec![matching, unrelated],
    };
    let mut s = format!("(agents {asker} {expert})\n(stereotype st (member {expert}) (attitude goal(not({harm})))");
    for g in templates {
        s += &format!(" (goal-template {g})");
    }
    s += ")\n";
    if rng.gen_bool(0.8) {
        s += &format!("(reliable {expert} permission)\n");
    }
    if rng.gen_bool(0.8) {
        s += &format!("(reliable {expert} cause)\n");
    }
    if rng.gen_bool(0.3) {
        s += &format!("(avoid-goal {expert} {harm})\n");
    }
    if rng.gen_bool(0.3) {
        s += "(operator gossip (actor ?h) (pre bel(?h, bel(?s, ?x))) (add told(?h, ?x)))\n";
    }
    s += &format!("(turn question({asker}, {expert}, permission({asker}, {verb}({asker}, {obj}))))\n");
    s += &format!("(turn inform({expert}, {asker}, {cause}))\n");
    s += &format!("(config bound {})\n", rng.gen_range(3..=8));
    if rng.gen_bool(0.5) {
        s += "(config order avoidance-first)\n";
    }
    s
}

/// Variations on the burnt-cakes dialogue.
fn avoidance_family(rng: &mut impl Rng) -> String {
    let mum = pick(rng, &["mum", "dad", "teacher"]);
    let kid = pick(rng, &["kid", "tom", "pupil"]);
    let thing = pick(rng, &["cakes", "soup", "bread"]);
    let busy = pick(rng, &["water", "tv", "game"]);
    let blamer = match rng.gen_range(0..3) {
        0 => "?h",
        1 => "?s",
        _ => "third",
    };
    let mut s = format!("(agents {mum} {kid} third)\n");
    s += &format!(
        "(operator infer_busy (actor ?h) (pre bel(?h, bel(?s, watching(?s, {busy})))) (add bel(?h, bel(?s, not(checked(?s, {thing}))))))\n"
    );
    s += &format!(
        "(operator blame (actor {blamer}) (pre bel(?h, goal(?s, bel(?h, not(checked(?s, ?thing))))) bel(?s, burnt(?thing))) (add blamed(?s)))\n"
    );
    if rng.gen_bool(0.8) {
        s += &format!("(believes ({mum} {kid}) bel(burnt({thing})))\n");
    }
    if rng.gen_bool(0.8) {
        s += &format!("(reliable {kid} checked)\n");
    }
    s += &format!("(avoid-goal {kid} {})\n", if rng.gen_bool(0.8) { format!("blamed({kid})") } else { format!("grounded({kid})") });
    if rng.gen_bool(0.3) {
        s += &format!("(goal {kid} goal({kid}, bel({mum}, watching({kid}, {busy}))))\n");
    }
    s += &format!("(turn question({mum}, {kid}, checked({kid}, {thing})))\n");
    s += &format!("(turn inform({kid}, {mum}, watching({kid}, {busy})))\n");
    s += &format!("(config bound {})\n", rng.gen_range(3..=8));
    if rng.gen_bool(0.5) {
        s += "(config order avoidance-first)\n";
    }
    s
}

fn added_states(p: &vgimp_core::planner::Plan) -> BTreeSet<Term> {
    p.actions().unwrap().into_iter().flat_map(|a| a.add).collect()
}

fn ascription_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut instances, mut conj, mut avoid, mut violations) = (0, 0, 0, Vec::new());
    for i in 0..240 {
        let text = if i % 2 == 0 { conjunctive_family(&mut rng) } else { avoidance_family(&mut rng) };
        let scenario = load_scenario(&text).map_err(|e| format!("generated scenario {i}: {e}\n{text}"))?;
        let session = run_session(&scenario);
        instances += 1;
        let Some(out) = session.last() else { continue };
        let (Some(r), Some(EfficiencyVerdict::Inefficient { plan_o, cost_r, .. }), Some(report)) = (&out.recognition, &out.verdict, &out.report)
        else {
            continue;
        };
        let bound = scenario.config.bound;
        match report.kind {
            ReportKind::Conjunctive => {
                conj += 1;
                let state = report.exclusive_state.as_ref().unwrap();
                if added_states(plan_o).contains(state) || !added_states(&r.plan_r).contains(state) {
                    violations.push(format!("instance {i}: {state} is not exclusive to Pr"));
                }
                let completion = report.completion.as_ref().unwrap();
                let mut initial = r.plan_r.initial.clone();
                initial.extend(hypothesis(report.goal.as_ref().unwrap()));
                let goals = [r.target().clone(), completion.achieved_goal.clone()];
                let ops: Vec<Operator> = ground(&scenario.all_operators(), &initial, bound);
                let best = bfs_min_length_unifying(&initial, &goals, &ops, bound);
                if best != Some(cost_r + completion.len()) {
                    violations.push(format!("instance {i}: joint optimum {best:?}, Pr plus completion {}", cost_r + completion.len()));
                }
            }
            ReportKind::Avoidance => {
                avoid += 1;
                let state = report.exclusive_state.as_ref().unwrap();
                if added_states(&r.plan_r).contains(state) || !added_states(plan_o).contains(state) {
                    violations.push(format!("instance {i}: {state} is not exclusive to Po"));
                }
                let speaker = Term::atom(&r.utterance.speaker);
                if report.completion.as_ref().unwrap().actions.iter().any(|a| a.actor == speaker) {
                    violations.push(format!("instance {i}: speaker acts in the completion"));
                }
            }
            ReportKind::None => {}
        }
    }
    if !violations.is_empty() {
        return Err(format!("{} violations: {}", violations.len(), violations.join("; ")));
    }
    ensure(conj >= 20 && avoid >= 20, format!("too few reports to be meaningful: {conj} conjunctive, {avoid} avoidance"))?;
    Ok(format!("{instances} instances, {conj} conjunctive and {avoid} avoidance reports, 0 violations"))
}

fn content() -> impl Strategy<Value = Term> {
    let leaf = prop::sample::select(vec!["p", "q", "rain", "door_open"]).prop_map(Term::atom);
    leaf.prop_recursive(2, 6, 2, |inner| {
        (prop::sample::select(vec!["f", "at", "cause", "not"]), prop::collection::vec(inner, 1..=2))
            .prop_map(|(f, args)| if f == "not" { Term::not(args[0].clone()) } else { Term::compound(f, args) })
    })
}

/// Where each builtin act's attitudes should land, written out by hand:
/// (path, attitude) for the speaker update and for the hearer update.
fn expected_landing(schema: &str, s: &str, h: &str, p: &Term) -> (BTreeSet<(ViewpointPath, Attitude)>, BTreeSet<(ViewpointPath, Attitude)>) {
    let path = |agents: &[&str]| ViewpointPath::new(agents.iter().copied());
    let bel = |who: &str, x: Term| Term::compound("bel", vec![Term::atom(who), x]);
    if schema == QUESTION {
        let w = Term::compound("or", vec![p.clone(), Term::not(p.clone())]);
        let wants = Attitude::goal(bel(s, w.clone()));
        let speaker = [
            (path(&[s]), wants.clone()),
            (path(&[s, h]), Attitude::bel(w.clone())),
            (path(&[s, h, s]), wants.clone()),
            (path(&[s, h, s, h]), Attitude::bel(w.clone())),
        ];
        let hearer = [(path(&[h, s]), wants), (path(&[h, s, h]), Attitude::bel(w))];
        return (speaker.into(), hearer.into());
    }
    let c = if schema == NO_ANSWER { Term::not(p.clone()) } else { p.clone() };
    let wants = Attitude::goal(bel(h, c.clone()));
    let speaker = [
        (path(&[s]), wants.clone()),
        (path(&[s]), Attitude::bel(c.clone())),
        (path(&[s, h, s]), wants.clone()),
        (path(&[s, h, s]), Attitude::bel(c.clone())),
    ];
    let hearer = [(path(&[h, s]), wants), (path(&[h, s]), Attitude::bel(c))];
    (speaker.into(), hearer.into())
}

fn landed(before: &BeliefStore, after: &BeliefStore) -> BTreeSet<(ViewpointPath, Attitude)> {
    after
        .spaces()
        .iter()
        .flat_map(|(p, atts)| atts.iter().map(move |a| (p.clone(), a.clone())))
        .filter(|(p, a)| !before.spaces().get(p).is_some_and(|s| s.contains(a)))
        .collect()
}

fn update_rules() -> Outcome {
    let mut runner = TestRunner::new_with_rng(PropConfig::with_cases(128), proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha));
    let strategy = (prop::sample::select(vec![INFORM, QUESTION, YES_ANSWER, NO_ANSWER]), prop::sample::select(vec![("a", "b"), ("b", "a"), ("ann", "bob")]), content());
    let cases = std::cell::Cell::new(0);
    let result = runner.run(&strategy, |(schema, (s, h), p)| {
        cases.set(cases.get() + 1);
        let act = ActInstance::new(schema, s, h, p.clone());
        let mut store = BeliefStore::new();
        if let Some(e) = act.answered() {
            store = store.with_expectation(e);
        }
        let (want_s, want_h) = expected_landing(schema, s, h, &p);
        let (after_s, _) = apply_speaker_update(&store, &act).unwrap();
        prop_assert_eq!(landed(&store, &after_s), want_s);
        let (after_h, _) = apply_hearer_update(&store, &act).unwrap();
        prop_assert_eq!(landed(&store, &after_h), want_h);
        prop_assert_eq!(&apply_speaker_update(&after_s, &act).unwrap().0, &after_s);
        prop_assert_eq!(&apply_hearer_update(&after_h, &act).unwrap().0, &after_h);
        if schema == QUESTION {
            let e = Expectation { asker: s.into(), asked: h.into(), content: p.clone() };
            prop_assert!(after_h.expectations().contains(&e));
        }
        Ok(())
    });
    match result {
        Ok(()) => Ok(format!("{} cases over 4 schemas, exact landing and idempotent", cases.get())),
        Err(e) => Err(e.to_string()),
    }
}

fn determinism() -> Outcome {
    let names = ["computer_off.vgs", "swim_waves.vgs", "burnt_cakes.vgs"];
    for name in names {
        let s = load_scenario(&scenario_text(name)).map_err(|e| e.to_string())?;
        let a = emit_json(&run(&s).map_err(|e| e.to_string())?.trace);
        let b = emit_json(&run(&s).map_err(|e| e.to_string())?.trace);
        ensure(a == b, format!("{name}: traces differ"))?;
    }
    Ok(format!("{} scenarios, byte-identical traces", names.len()))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    })
}

fn main() {
    let (optimality, soundness) = guarded_pair(planner_suite);
    let results = [
        ("worked example end to end", guarded(worked_example)),
        ("planner optimality", optimality),
        ("planner soundness", soundness),
        ("ascription side-conditions", guarded(ascription_suite)),
        ("act update rules", guarded(update_rules)),
        ("determinism", guarded(determinism)),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn guarded_pair(f: impl FnOnce() -> (Outcome, Outcome)) -> (Outcome, Outcome) {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| (Err("panicked".into()), Err("panicked".into())))
}
