use bridging_drt::drs::{isomorphic, MarkerSupply, QualiaRole};
use bridging_drt::lexicon::{builtin_fragment, Category, Lexicon};
use bridging_drt::syntax::{parse_drs, parse_term};
use bridging_drt::term::{
    beta_reduce, compose, functional_composition, normalize, qualia_access, type_coercion, type_of, SemType, Term,
};

fn sem(lex: &Lexicon, form: &str, cat: Category, supply: &mut MarkerSupply) -> Term {
    lex.lookup_category(form, cat).unwrap().instantiate(supply)
}

fn a_book(lex: &Lexicon, supply: &mut MarkerSupply) -> Term {
    let a = sem(lex, "a", Category::Det, supply);
    let book = sem(lex, "book", Category::Noun, supply);
    let mut out = functional_composition(&a, &book, supply).unwrap();
    assert_eq!(out.len(), 1);
    out.remove(0)
}

fn preds(t: &Term) -> Vec<String> {
    let mut out: Vec<String> =
        t.to_string().split("pred(").skip(1).map(|s| s.split(',').next().unwrap().to_string()).collect();
    out.sort();
    out.dedup();
    out
}

#[test]
fn lexical_types() {
    let lex = builtin_fragment();
    let mut s = MarkerSupply::new();
    assert_eq!(type_of(&sem(&lex, "book", Category::Noun, &mut s)).unwrap(), SemType::property());
    let e = || SemType::E;
    assert_eq!(
        type_of(&sem(&lex, "write", Category::VTrans, &mut s)).unwrap(),
        SemType::curried([e(), e(), e()], SemType::T)
    );
    assert_eq!(type_of(&Term::from_drs(&parse_drs("drs([x:1],[pred(p,[x:1])])").unwrap())).unwrap(), SemType::T);
}

#[test]
fn determiner_carries_qualia() {
    let lex = builtin_fragment();
    let mut s = MarkerSupply::new();
    let np = a_book(&lex, &mut s);
    assert_eq!(type_of(&np).unwrap(), SemType::fun(SemType::property(), SemType::T));
    let roles: Vec<QualiaRole> = qualia_access(&np).into_iter().map(|(r, _)| r).collect();
    assert_eq!(roles, vec![QualiaRole::Agentive, QualiaRole::Telic, QualiaRole::Formal, QualiaRole::Constitutive]);
}

#[test]
fn every_book_exposes_embedded_qualia() {
    let lex = builtin_fragment();
    let mut s = MarkerSupply::new();
    let every = sem(&lex, "every", Category::Det, &mut s);
    let book = sem(&lex, "book", Category::Noun, &mut s);
    let np = functional_composition(&every, &book, &mut s).unwrap().remove(0);
    let found: Vec<Vec<String>> = qualia_access(&np).iter().map(|(_, t)| preds(t)).collect();
    assert!(found.iter().any(|p| p.contains(&"write".to_string())));
    assert!(found.iter().any(|p| p.contains(&"read".to_string())));
}

#[test]
fn proper_name_has_no_qualia() {
    let lex = builtin_fragment();
    let mut s = MarkerSupply::new();
    let john = sem(&lex, "john", Category::ProperName, &mut s);
    let applied = normalize(&Term::app(john.clone(), parse_term("lam(x:90:e, drs([],[]))").unwrap()));
    assert!(qualia_access(&applied).is_empty());
    assert!(type_coercion(&john, &mut s).is_empty());
}

#[test]
fn begin_a_book_coerces_twice() {
    let lex = builtin_fragment();
    let mut s = MarkerSupply::new();
    let np = a_book(&lex, &mut s);
    let begin = sem(&lex, "begin", Category::VAsp, &mut s);
    let results = compose(&begin, &np, &mut s).unwrap();
    assert_eq!(results.len(), 2);
    let roles: Vec<QualiaRole> = results.iter().map(|r| r.coercion.as_ref().unwrap().role).collect();
    assert_eq!(roles, vec![QualiaRole::Agentive, QualiaRole::Telic]);
    for (r, event) in results.iter().zip(["write", "read"]) {
        assert_eq!(type_of(&r.term).unwrap(), SemType::curried([SemType::E, SemType::E], SemType::T));
        // the event predicate appears outside the qualia as well
        let text = r.term.to_string();
        let outside = text.matches(&format!("pred({event},")).count();
        assert_eq!(outside, 2, "{text}");
        for p in ["begin", "agent", "theme", "book"] {
            assert!(text.contains(&format!("pred({p},")));
        }
    }
}

#[test]
fn coercion_results_are_event_types() {
    let lex = builtin_fragment();
    let mut s = MarkerSupply::new();
    let np = a_book(&lex, &mut s);
    let tc = type_coercion(&np, &mut s);
    assert_eq!(tc.len(), 2);
    for k in &tc {
        assert_eq!(type_of(k).unwrap(), SemType::curried([SemType::E, SemType::E], SemType::T));
    }
    let plain = parse_term("lam(P:e->t, oplus(drs([x:1],[pred(party,[x:1])]), app(P,x:1)))").unwrap();
    assert!(type_coercion(&plain, &mut s).is_empty());
}

#[test]
fn non_function_functor_is_an_error() {
    let mut s = MarkerSupply::new();
    let t = parse_term("drs([],[])").unwrap();
    assert!(compose(&t, &t, &mut s).is_err());
}

#[test]
fn direct_application_is_beta() {
    let mut s = MarkerSupply::above([].iter());
    let f = parse_term("lam(x:1:e, drs([],[pred(p,[x:1])]))").unwrap();
    let a = parse_term("x:7").unwrap();
    let out = functional_composition(&f, &a, &mut s).unwrap();
    assert_eq!(out, vec![parse_term("drs([],[pred(p,[x:7])])").unwrap()]);
    let once = beta_reduce(&Term::app(f, a), &mut s);
    assert_eq!(normalize(&once), once);
}

#[test]
fn john_begins_a_book_full_spine() {
    let lex = builtin_fragment();
    let mut s = MarkerSupply::new();
    let np = a_book(&lex, &mut s);
    let begin = sem(&lex, "begin", Category::VAsp, &mut s);
    let john = sem(&lex, "john", Category::ProperName, &mut s);
    let pres = sem(&lex, "pres", Category::Tense, &mut s);
    let qualia = "qualia(formal, drs([],[pred(info_cont,[x:2])])), \
                  qualia(constitutive, drs([x:5],[pred(sections,[x:5]), pred(has,[x:2,x:5])])), \
                  qualia(agentive, drs([x:6,x:7,e:8],[pred(write,[e:8]), pred(agent,[e:8,x:7]), pred(theme,[e:8,x:6])])), \
                  qualia(telic, drs([x:9,x:10,e:11],[pred(read,[e:11]), pred(agent,[e:11,x:10]), pred(theme,[e:11,x:9])]))";
    let mut got = Vec::new();
    for vp in functional_composition(&begin, &np, &mut s).unwrap() {
        let clause = functional_composition(&john, &vp, &mut s).unwrap();
        assert_eq!(clause.len(), 1);
        let sentence = functional_composition(&pres, &clause[0], &mut s).unwrap();
        assert_eq!(sentence.len(), 1);
        assert_eq!(type_of(&sentence[0]).unwrap(), SemType::T);
        got.push(sentence[0].to_drs().unwrap());
    }
    assert_eq!(got.len(), 2);
    for (k, event) in got.iter().zip(["write", "read"]) {
        let expected = parse_drs(&format!(
            "drs([e:1,x:2],[alpha(drs([x:3],[pred(john,[x:3])])), pred(now,[e:1]), pred(begin,[e:1]), \
             pred({event},[e:1]), pred(agent,[e:1,x:3]), pred(theme,[e:1,x:2]), pred(book,[x:2]), {qualia}])"
        ))
        .unwrap();
        assert!(isomorphic(k, &expected), "{k}\nvs\n{expected}");
    }
}
