//! Acceptance suite. Runs as a plain binary (`harness = false`) and prints
//! one PASS/FAIL line per criterion; exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use bridging_drt::drs::{
    free_markers, is_proper, isomorphic, merge, rename_fresh, substitute, Condition, Drs, Marker, QualiaRole,
};
use bridging_drt::grammar::{
    build_sentence_drs, default_config, parse_sentence, process_discourse, split_sentences, tokenize, Policy,
};
use bridging_drt::lexicon::builtin_fragment;
use bridging_drt::model::{consistent, verify, Model};
use bridging_drt::resolution::{
    bridge, link, pending_alphas, resolve_all, resolve_one, resolve_step, Mechanism, Reading, ResolutionConfig,
    ResolutionOrder,
};
use bridging_drt::syntax::parse_drs;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const CELEBRITY: &str = "When I invite a celebrity, the celebrity never comes.";
const BARKEEPER: &str = "When I go to a bar, the barkeeper always throws me out.";
const PLAYGROUND: &str = "When I go to a playground, the barkeeper always throws me out.";
const KING: &str = "When I give a party, the king of France always attends it.";

fn sentence_drs(sentence: &str) -> Result<Drs, String> {
    let lex = builtin_fragment();
    let ds = parse_sentence(&tokenize(sentence), &lex).map_err(|e| e.to_string())?;
    ensure!(ds.len() == 1, "{sentence}: expected one derivation, got {}", ds.len());
    build_sentence_drs(&ds[0]).map_err(|e| e.to_string())
}

fn readings_with(sentence: &str, config: &ResolutionConfig) -> Result<Vec<Reading>, String> {
    resolve_all(&sentence_drs(sentence)?, config).map_err(|e| e.to_string())
}

fn readings(sentence: &str) -> Result<Vec<Reading>, String> {
    readings_with(sentence, &default_config(&builtin_fragment()))
}

fn check_iso(got: &Drs, expected: &str) -> Result<(), String> {
    let expected = parse_drs(expected).map_err(|e| e.to_string())?;
    ensure!(isomorphic(got, &expected), "got {got}, expected {expected}");
    Ok(())
}

const CELEBRITY_RESOLVED: &str = "drs([],[impl(drs([x:1],[pred(celebrity,[x:1]), pred(I-invite,[x:1])]), \
    drs([x:2],[pred(celebrity,[x:2]), eq(x:2,x:1), pred(never-comes,[x:2])]))])";

const BARKEEPER_RESOLVED: &str = "drs([],[impl(drs([x:1,x:3],[pred(bar,[x:1]), \
    qualia(constitutive, drs([x:3],[pred(barkeeper,[x:3]), pred(of,[x:3,x:1])])), pred(I-go-to,[x:1]), \
    pred(barkeeper,[x:3]), pred(of,[x:3,x:1])]), \
    drs([x:2],[pred(barkeeper,[x:2]), eq(x:2,x:3), pred(always-throws-me-out,[x:2])]))])";

const KING_RESOLVED: &str = "drs([x:2],[pred(king-of-france,[x:2]), \
    impl(drs([x:1],[pred(party,[x:1]), pred(I-give,[x:1])]), \
         drs([x:3],[eq(x:3,x:1), pred(always-attends,[x:2,x:3])]))])";

fn linking_golden() -> Outcome {
    let rs = readings(CELEBRITY)?;
    ensure!(rs.len() == 1, "expected one reading, got {}", rs.len());
    ensure!(rs[0].mechanisms() == [Mechanism::Link], "mechanisms {:?}", rs[0].mechanisms());
    check_iso(&rs[0].resolved, CELEBRITY_RESOLVED)?;
    Ok("one reading, Link, y=x present".into())
}

fn bridging_golden() -> Outcome {
    let k = sentence_drs(BARKEEPER)?;
    let alpha = k.alpha_paths().into_iter().next().ok_or("no alpha condition")?;
    let linked = link(&alpha, &k).map_err(|e| e.to_string())?;
    ensure!(linked.is_empty(), "link produced {} candidates", linked.len());
    let rs = readings(BARKEEPER)?;
    ensure!(rs.len() == 1, "expected one reading, got {}", rs.len());
    ensure!(rs[0].mechanisms() == [Mechanism::Bridge], "mechanisms {:?}", rs[0].mechanisms());
    check_iso(&rs[0].resolved, BARKEEPER_RESOLVED)?;
    Ok("link: 0 candidates; one reading, Bridge, y=z present".into())
}

fn accommodation_golden() -> Outcome {
    let lex = builtin_fragment();
    for order in [ResolutionOrder::PronounsLast, ResolutionOrder::PronounsFirst, ResolutionOrder::Textual] {
        let config = ResolutionConfig { order, ..default_config(&lex) };
        let rs = readings_with(KING, &config)?;
        ensure!(rs.len() == 1, "{order:?}: expected one reading, got {}", rs.len());
        let r = &rs[0];
        ensure!(
            r.mechanisms() == [Mechanism::Link, Mechanism::Accommodate],
            "{order:?}: mechanisms {:?}",
            r.mechanisms()
        );
        ensure!(r.steps[0].anaphor.conditions().is_empty(), "{order:?}: first step is not the pronoun");
        ensure!(r.steps[1].site.steps().is_empty(), "{order:?}: accommodation site {} is not global", r.steps[1].site);
        check_iso(&r.resolved, KING_RESOLVED)?;
    }
    Ok("[Link, Accommodate] under all three resolution orders".into())
}

fn felicity_contrast() -> Outcome {
    let rs = readings(PLAYGROUND)?;
    ensure!(rs.len() == 1, "playground: expected one reading, got {}", rs.len());
    ensure!(rs[0].mechanisms() == [Mechanism::Accommodate], "playground mechanisms {:?}", rs[0].mechanisms());
    ensure!(rs[0].steps[0].site.steps().is_empty(), "playground: accommodation is not global");
    ensure!(!rs[0].felicity_notes.is_empty(), "playground: no felicity warning");
    let rs = readings(BARKEEPER)?;
    ensure!(rs.iter().all(|r| r.felicity_notes.is_empty()), "barkeeper carries a felicity warning");
    Ok("playground warned, barkeeper silent".into())
}

fn coercion_cardinality() -> Outcome {
    let lex = builtin_fragment();
    let ds = parse_sentence(&tokenize("John begins a book"), &lex).map_err(|e| e.to_string())?;
    ensure!(ds.len() == 2, "expected 2 derivations, got {}", ds.len());
    let qualia = "qualia(formal, drs([],[pred(info_cont,[x:2])])), \
        qualia(constitutive, drs([x:5],[pred(sections,[x:5]), pred(has,[x:2,x:5])])), \
        qualia(agentive, drs([x:6,x:7,e:8],[pred(write,[e:8]), pred(agent,[e:8,x:7]), pred(theme,[e:8,x:6])])), \
        qualia(telic, drs([x:9,x:10,e:11],[pred(read,[e:11]), pred(agent,[e:11,x:10]), pred(theme,[e:11,x:9])]))";
    let mut seen = BTreeSet::new();
    for d in &ds {
        let k = build_sentence_drs(d).map_err(|e| e.to_string())?;
        let top_level_write =
            k.conditions().iter().any(|c| matches!(c, Condition::Pred { name, .. } if name == "write"));
        let event = if top_level_write { "write" } else { "read" };
        seen.insert(event);
        let expected = format!(
            "drs([e:1,x:2],[alpha(drs([x:3],[pred(john,[x:3])])), pred(now,[e:1]), pred(begin,[e:1]), \
             pred({event},[e:1]), pred(agent,[e:1,x:3]), pred(theme,[e:1,x:2]), pred(book,[x:2]), {qualia}])"
        );
        check_iso(&k, &expected)?;
    }
    ensure!(seen.len() == 2, "both derivations use the same event: {seen:?}");
    Ok("2 sentence DRSs (write, read) with begin/agent/theme/book and the qualia residue".into())
}

// ---------------------------------------------------------------------------
// random configurations with α-conditions

const NOUNS: [&str; 4] = ["a", "b", "c", "d"];

fn x(n: u32) -> Marker {
    Marker::entity(n)
}

fn pred1(name: &str, m: Marker) -> Condition {
    Condition::pred(name, [m])
}

#[derive(Debug, Clone)]
struct Scenario {
    root: Vec<usize>,
    antecedent: Vec<usize>,
    quale: Option<(usize, usize)>,
    nested: bool,
    anaphors: Vec<Option<usize>>,
}

fn arb_config() -> impl Strategy<Value = Scenario> {
    (
        prop::collection::vec(0..4usize, 0..3),
        prop::collection::vec(0..4usize, 0..3),
        prop::option::of((0..4usize, 0..4usize)),
        any::<bool>(),
        prop::collection::vec(prop::option::of(0..4usize), 1..3),
    )
        .prop_map(|(root, antecedent, quale, nested, anaphors)| Scenario {
            root,
            antecedent,
            quale,
            nested,
            anaphors,
        })
}

/// Root markers x1.., antecedent markers x11.., quale marker x21,
/// anaphors x31.. (`None` = pronoun).
fn build_config(c: &Scenario) -> Drs {
    let roles = QualiaRole::ALL;
    let root_markers: Vec<Marker> = (0..c.root.len() as u32).map(|i| x(1 + i)).collect();
    let ante_markers: Vec<Marker> = (0..c.antecedent.len() as u32).map(|i| x(11 + i)).collect();
    let mut ante = Drs::new(
        ante_markers.iter().copied(),
        ante_markers.iter().zip(&c.antecedent).map(|(m, n)| pred1(NOUNS[*n], *m)),
    );
    if let (Some((noun, role)), Some(owner)) = (c.quale, ante_markers.first()) {
        let z = x(21);
        ante.push(Condition::Qualia(
            roles[role],
            Drs::new([z], [pred1(NOUNS[noun], z), Condition::pred("of", [z, *owner])]),
        ));
    }
    let mut cons = Drs::empty();
    for (i, a) in c.anaphors.iter().enumerate() {
        let y = x(31 + i as u32);
        let payload = match a {
            Some(n) => Drs::new([y], [pred1(NOUNS[*n], y)]),
            None => Drs::new([y], []),
        };
        cons.push(Condition::Alpha(payload));
        cons.push(pred1(&format!("v{i}"), y));
    }
    let mut root =
        Drs::new(root_markers.iter().copied(), root_markers.iter().zip(&c.root).map(|(m, n)| pred1(NOUNS[*n], *m)));
    if c.nested {
        root.push(Condition::Impl(ante, cons));
    } else {
        for m in ante.universe().iter().chain(cons.universe()) {
            root.declare(*m);
        }
        for cond in ante.conditions().iter().chain(cons.conditions()) {
            root.push(cond.clone());
        }
    }
    root
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

/// Draw values until `accept` has taken `wanted` of them.
fn sample<S: Strategy>(
    strategy: S,
    wanted: usize,
    mut accept: impl FnMut(S::Value) -> Result<bool, String>,
) -> Result<usize, String> {
    let mut r = runner(wanted as u32);
    let mut taken = 0;
    let mut drawn = 0;
    while taken < wanted {
        drawn += 1;
        ensure!(drawn < wanted * 50, "only {taken} of {wanted} usable samples after {drawn} draws");
        let v = strategy.new_tree(&mut r).map_err(|e| e.to_string())?.current();
        if accept(v)? {
            taken += 1;
        }
    }
    Ok(drawn)
}

fn gating() -> Outcome {
    let config = ResolutionConfig { domain_bound: 3, ..ResolutionConfig::default() };
    let mut checked_alphas = 0;
    let mut with_link = 0;
    let drawn = sample(arb_config(), 200, |c| {
        let k = build_config(&c);
        if resolve_all(&k, &config).is_err() {
            return Ok(false);
        }
        for alpha in pending_alphas(&k, config.order) {
            checked_alphas += 1;
            let linked = link(&alpha, &k).map_err(|e| e.to_string())?;
            let outcome = resolve_one(&alpha, &k, &config);
            if !linked.is_empty() {
                with_link += 1;
                let (mech, cands) = outcome.map_err(|e| format!("{k}: {e}"))?;
                ensure!(mech == Mechanism::Link, "{k}: link nonempty but {mech} surfaced");
                ensure!(
                    cands.iter().map(|c| &c.result).eq(linked.iter().map(|c| &c.result)),
                    "{k}: output differs from link output"
                );
            } else if let Ok((mech, _)) = outcome {
                let bridged = bridge(&alpha, &k).map_err(|e| e.to_string())?;
                ensure!(bridged.is_empty() || mech == Mechanism::Bridge, "{k}: bridge nonempty but {mech} surfaced");
            }
        }
        if let Some((_, mech, _)) = resolve_step(&k, &config).map_err(|e| e.to_string())? {
            let any_link = pending_alphas(&k, config.order).iter().any(|a| !link(a, &k).unwrap().is_empty());
            ensure!(!any_link || mech == Mechanism::Link, "{k}: a link exists but the step used {mech}");
        }
        Ok(true)
    })?;
    Ok(format!(
        "200 resolvable configurations ({drawn} drawn), {checked_alphas} alphas, {with_link} linkable, 0 violations"
    ))
}

// ---------------------------------------------------------------------------
// algebra

fn arb_marker() -> impl Strategy<Value = Marker> {
    prop_oneof![4 => (1..5u32).prop_map(Marker::entity), 1 => Just(Marker::event(5))]
}

fn arb_drs(alpha: bool) -> impl Strategy<Value = Drs> {
    let atom = prop_oneof![
        (0..2usize, arb_marker()).prop_map(|(p, m)| Condition::pred(["p", "r"][p], [m])),
        (arb_marker(), arb_marker()).prop_map(|(a, b)| Condition::pred("q", [a, b])),
        (arb_marker(), arb_marker()).prop_map(|(a, b)| Condition::Eq(a, b)),
    ];
    let flat = (prop::collection::btree_set(arb_marker(), 0..3), prop::collection::vec(atom.clone(), 0..3))
        .prop_map(|(u, cs)| Drs::new(u, cs));
    flat.prop_recursive(3, 24, 3, move |inner| {
        let complex = prop_oneof![
            inner.clone().prop_map(Condition::Neg),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Condition::Impl(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Condition::Disj(a, b)),
            (0..4usize, inner.clone()).prop_map(|(r, k)| Condition::Qualia(QualiaRole::ALL[r], k)),
            inner.clone().prop_map(move |k| if alpha { Condition::Alpha(k) } else { Condition::Neg(k) }),
        ];
        let cond = prop_oneof![2 => atom.clone(), 1 => complex];
        (prop::collection::btree_set(arb_marker(), 0..3), prop::collection::vec(cond, 0..4))
            .prop_map(|(u, cs)| Drs::new(u, cs))
    })
}

/// Close `k` by declaring every marker at the top.
fn closed(k: Drs) -> Drs {
    let mut out = k.clone();
    for m in k.markers() {
        out.declare(m);
    }
    out
}

fn declared_once(k: &Drs) -> bool {
    let mut seen = BTreeSet::new();
    k.all_paths().iter().all(|p| k.at(p).unwrap().universe().iter().all(|m| seen.insert(*m)))
}

fn same_set(a: &Drs, b: &Drs) -> bool {
    let ca: BTreeSet<&Condition> = a.conditions().iter().collect();
    let cb: BTreeSet<&Condition> = b.conditions().iter().collect();
    a.universe() == b.universe() && ca == cb
}

fn run_property<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn algebra() -> Outcome {
    const CASES: u32 = 500;
    run_property(CASES, arb_drs(true), |k| {
        prop_assert_eq!(merge(&k, &Drs::empty()), k.clone());
        prop_assert!(same_set(&merge(&Drs::empty(), &k), &k));
        Ok(())
    })
    .map_err(|e| format!("merge identity: {e}"))?;
    run_property(CASES, (arb_drs(true), arb_drs(true), arb_drs(true)), |(a, b, c)| {
        prop_assert_eq!(merge(&merge(&a, &b), &c), merge(&a, &merge(&b, &c)));
        Ok(())
    })
    .map_err(|e| format!("merge associativity: {e}"))?;
    run_property(CASES, (arb_drs(true), arb_drs(true)), |(a, b)| {
        prop_assert!(same_set(&merge(&a, &b), &merge(&b, &a)));
        Ok(())
    })
    .map_err(|e| format!("merge commutativity: {e}"))?;
    run_property(CASES, (arb_drs(true), arb_drs(true), any::<prop::sample::Index>()), |(k, r, i)| {
        let paths = k.all_paths();
        let p = &paths[i.index(paths.len())];
        let original = k.at(p).unwrap().clone();
        let replaced = substitute(&k, p, r.clone()).unwrap();
        prop_assert_eq!(replaced.at(p).unwrap(), &r);
        prop_assert_eq!(substitute(&replaced, p, original).unwrap(), k);
        Ok(())
    })
    .map_err(|e| format!("substitution round-trip: {e}"))?;
    run_property(
        CASES,
        (arb_drs(false).prop_map(closed), prop::collection::btree_set(arb_marker(), 0..4)),
        |(k, avoid)| {
            prop_assert!(is_proper(&k));
            let r = rename_fresh(&k, &avoid);
            prop_assert!(is_proper(&r), "{} became improper: {}", k, r);
            // shadowing declarations get distinct markers, so only DRSs that
            // declare each marker once are renamings of the original
            if declared_once(&k) {
                prop_assert!(isomorphic(&k, &r), "{} vs {}", k, r);
            }
            prop_assert!(r.universe().is_disjoint(&avoid));
            Ok(())
        },
    )
    .map_err(|e| format!("rename_fresh properness: {e}"))?;
    let config = ResolutionConfig { domain_bound: 2, ..ResolutionConfig::default() };
    let counter = std::cell::Cell::new(0usize);
    run_property(CASES, arb_config(), |c| {
        let k = build_config(&c);
        if let Ok(Some((_, _, candidates))) = resolve_step(&k, &config) {
            for cand in candidates {
                counter.set(counter.get() + 1);
                prop_assert!(cand.result.alpha_count() < k.alpha_count(), "{} -> {}", k, cand.result);
            }
        }
        Ok(())
    })
    .map_err(|e| format!("alpha-count decrease: {e}"))?;
    Ok(format!("6 suites x {CASES} cases, {} resolution steps checked", counter.get()))
}

// ---------------------------------------------------------------------------
// model checking against a naive recursion

fn extensions(universe: &BTreeSet<Marker>, g: &BTreeMap<Marker, usize>, n: usize) -> Vec<BTreeMap<Marker, usize>> {
    let mut out = vec![g.clone()];
    for m in universe {
        out = out
            .into_iter()
            .flat_map(|h| {
                (0..n).map(move |d| {
                    let mut h = h.clone();
                    h.insert(*m, d);
                    h
                })
            })
            .collect();
    }
    out
}

fn naive_holds(c: &Condition, m: &Model, g: &BTreeMap<Marker, usize>) -> bool {
    match c {
        Condition::Pred { name, args } => m.holds(name, &args.iter().map(|a| g[a]).collect::<Vec<_>>()),
        Condition::Eq(a, b) => g[a] == g[b],
        Condition::Neg(k) => !naive_box(k, m, g),
        Condition::Disj(a, b) => naive_box(a, m, g) || naive_box(b, m, g),
        Condition::Impl(a, b) => extensions(a.universe(), g, m.size())
            .iter()
            .filter(|h| a.conditions().iter().all(|c| naive_holds(c, m, h)))
            .all(|h| naive_box(b, m, h)),
        Condition::Qualia(..) => true,
        Condition::Alpha(_) => panic!("alpha in a proper DRS"),
    }
}

fn naive_box(k: &Drs, m: &Model, g: &BTreeMap<Marker, usize>) -> bool {
    extensions(k.universe(), g, m.size()).iter().any(|h| k.conditions().iter().all(|c| naive_holds(c, m, h)))
}

fn subsets<T: Clone>(items: &[T], max: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for (i, it) in items.iter().enumerate() {
        for mut s in subsets(&items[i + 1..], max.saturating_sub(1)) {
            if max > 0 {
                s.insert(0, it.clone());
                out.push(s);
            }
        }
    }
    out
}

/// Every DRS of depth at most 2 built from predicates p/1 and q/1 over
/// markers x1, x2 (flat boxes: up to two atoms; one complex condition at
/// the top over single-atom boxes).
fn small_drss() -> Vec<Drs> {
    let (a, b) = (x(1), x(2));
    let atoms = vec![pred1("p", a), pred1("p", b), pred1("q", a), pred1("q", b), Condition::Eq(a, b)];
    let universes: Vec<Vec<Marker>> = vec![vec![], vec![a], vec![b], vec![a, b]];
    let inner: Vec<Drs> = [vec![], vec![b]]
        .iter()
        .flat_map(|u| subsets(&atoms, 1).into_iter().map(move |cs| Drs::new(u.clone(), cs)))
        .collect();
    let mut complex: Vec<Option<Condition>> = vec![None];
    for k in &inner {
        complex.push(Some(Condition::Neg(k.clone())));
        for l in &inner {
            complex.push(Some(Condition::Impl(k.clone(), l.clone())));
            complex.push(Some(Condition::Disj(k.clone(), l.clone())));
        }
    }
    let mut out = Vec::new();
    for u in &universes {
        for cs in subsets(&atoms, 2) {
            out.push(Drs::new(u.clone(), cs));
        }
        for top in subsets(&atoms, 1) {
            for c in complex.iter().flatten() {
                let mut conds = top.clone();
                conds.push(c.clone());
                out.push(Drs::new(u.clone(), conds));
            }
        }
    }
    out
}

fn all_small_models() -> Vec<Model> {
    let mut out = Vec::new();
    for p in 0..8u32 {
        for q in 0..8u32 {
            let mut m = Model::new(["d1", "d2", "d3"]);
            for (name, bits) in [("p", p), ("q", q)] {
                for d in 0..3 {
                    if bits >> d & 1 == 1 {
                        m.add(name, vec![d]);
                    }
                }
            }
            out.push(m);
        }
    }
    out
}

fn model_oracle() -> Outcome {
    let models = all_small_models();
    let mut compared = 0usize;
    let mut drss = 0usize;
    for k in small_drss() {
        if !free_markers(&k).is_empty() {
            continue;
        }
        drss += 1;
        for m in &models {
            let fast = verify(&k, m).map_err(|e| e.to_string())?;
            let slow = naive_box(&k, m, &BTreeMap::new());
            ensure!(fast == slow, "disagreement on {k}: verify={fast}, naive={slow}");
            compared += 1;
        }
    }
    for (name, sentence) in [("king", KING), ("celebrity", CELEBRITY), ("barkeeper", BARKEEPER)] {
        let rs = readings(sentence)?;
        for r in &rs {
            ensure!(consistent(&r.resolved, 4).map_err(|e| e.to_string())?, "{name} reading inconsistent at bound 4");
        }
    }
    Ok(format!(
        "{drss} proper DRSs x {} models = {compared} comparisons, 0 disagreements; examples consistent at N=4",
        models.len()
    ))
}

fn inter_sentential() -> Outcome {
    let lex = builtin_fragment();
    let states =
        process_discourse(&split_sentences("I invited a celebrity. The celebrity came."), &lex, Policy::BestFirst)
            .map_err(|e| e.to_string())?;
    ensure!(states.len() == 1, "expected one state");
    let s = &states[0];
    let second = &s.history[1].1;
    ensure!(second.mechanisms() == [Mechanism::Link], "second sentence used {:?}", second.mechanisms());
    let first_marker =
        s.history[0].1.resolved.universe().iter().next().copied().ok_or("first sentence has no marker")?;
    let linked = second.resolved.conditions().iter().any(|c| matches!(c, Condition::Eq(_, b) if *b == first_marker));
    ensure!(linked, "no equation to {first_marker} in {}", second.resolved);
    Ok(format!("second definite linked to {first_marker}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("linking golden", linking_golden),
        ("bridging golden", bridging_golden),
        ("accommodation golden", accommodation_golden),
        ("felicity contrast", felicity_contrast),
        ("coercion cardinality", coercion_cardinality),
        ("cascade gating", gating),
        ("algebra properties", algebra),
        ("model oracle", model_oracle),
        ("inter-sentential link", inter_sentential),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let ms = t.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{ms} ms]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why}) [{ms} ms]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed in {} ms", criteria.len() - failed, start.elapsed().as_millis());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
