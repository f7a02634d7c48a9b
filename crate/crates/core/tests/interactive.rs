mod common;

use std::sync::Arc;
use std::time::Instant;

use coomforge_core::interactive::{
    incremental_solve, minimal_unsat_subset, BoundsError, Direction, IncrementalBounds, InteractiveError,
    SessionState,
};
use coomforge_core::solver::{SolveOptions, Solver};
use coomforge_core::space::{load_explanations, ExplanationMap};
use coomforge_core::{check_model, enumerate, parse_model, parse_user_input, Assumption, Value};

fn travel_session() -> SessionState {
    let space = Arc::new(common::space("travel-bike.coom", 1));
    let (expl, unknown) = load_explanations(&space, &common::fixture("travel-bike.explanations.json")).unwrap();
    assert!(unknown.is_empty(), "{unknown:?}");
    SessionState::new(space, expl)
}

fn attr<'v>(view: &'v coomforge_core::interactive::SessionView, id: &str) -> &'v coomforge_core::interactive::AttributeView {
    view.attributes.iter().find(|a| a.id == id).unwrap_or_else(|| panic!("no attribute {id}"))
}

#[test]
fn red_implies_front_wheel_w20() {
    let mut s = travel_session();
    s.fix("root.color[0]", Value::sym("Red")).unwrap();
    let start = Instant::now();
    let view = s.view().clone();
    println!("view in {:?}", start.elapsed());
    assert!(view.satisfiable);
    assert_eq!(attr(&view, "root.frontWheel[0]").inferred, Some(Value::sym("W20")));
    assert_eq!(attr(&view, "root.frontWheel[0].size[0]").inferred, Some(Value::Int(20)));
    assert_eq!(attr(&view, "root.color[0]").selected, Some(Value::sym("Red")));
    assert_eq!(attr(&view, "root.color[0]").inferred, None);
}

#[test]
fn bag_attributes_hidden_without_assumptions() {
    let mut s = travel_session();
    let view = s.view().clone();
    assert!(attr(&view, "root.color[0]").shown);
    let bag_attrs: Vec<_> = view.attributes.iter().filter(|a| a.id.contains(".bag[")).collect();
    assert!(!bag_attrs.is_empty());
    assert!(bag_attrs.iter().all(|a| !a.shown));
    let bag = view.parts.iter().find(|p| p.id == "root.carrier[0].bag[0]").unwrap();
    assert!(bag.addable && !bag.forced && !bag.removable);
}

#[test]
fn including_a_bag_shows_its_attributes() {
    let mut s = travel_session();
    s.set_included("root.carrier[0].bag[0]", true).unwrap();
    let view = s.view().clone();
    assert!(attr(&view, "root.carrier[0].bag[0].capacity[0]").shown);
    let bag = view.parts.iter().find(|p| p.id == "root.carrier[0].bag[0]").unwrap();
    assert!(bag.forced && bag.removable && !bag.addable);
}

#[test]
fn conflicting_wheel_gives_mus_with_explanation() {
    let mut s = travel_session();
    let red = s.fix("root.color[0]", Value::sym("Red")).unwrap();
    let w16 = s.fix("root.frontWheel[0]", Value::sym("W16")).unwrap();
    let view = s.view().clone();
    assert!(!view.satisfiable);
    let mus = view.mus.expect("mus");
    assert_eq!(mus.assumption_ids, vec![w16, red]);
    assert_eq!(mus.constraint_ids, vec!["c0".to_string()]);
    assert_eq!(
        mus.messages,
        vec!["If the color is red, then the size of the front wheel should be 20.".to_string()]
    );
    // Retracting the wheel restores satisfiability.
    s.retract(w16).unwrap();
    assert!(s.view().satisfiable);
}

#[test]
fn mus_leaves_out_unrelated_assumptions() {
    let space = common::space("travel-bike.coom", 1);
    let v = |id: &str| space.var(id).unwrap();
    let assumptions = vec![
        (1, Assumption::Fix(v("root.color[0]"), Value::sym("Red"))),
        (2, Assumption::Fix(v("root.frontWheel[0]"), Value::sym("W16"))),
        (3, Assumption::Fix(v("root.requestedVolume[0]"), Value::Int(0))),
    ];
    let guarded = space.boolean_constraint_ids();
    let mus = minimal_unsat_subset(&space, &assumptions, &guarded, &ExplanationMap::default()).unwrap();
    assert_eq!(mus.assumption_ids, vec![2, 1]);
    assert_eq!(mus.constraint_ids, vec!["c0"]);
    // Fallback message is the behavior as written.
    assert!(mus.messages[0].contains("color"), "{:?}", mus.messages);

    // Minimality: every one-removed subset is satisfiable.
    let keep: Vec<(u64, Assumption)> = assumptions[..2].to_vec();
    for skip in 0..3 {
        let active: Vec<Assumption> = keep
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, (_, a))| a.clone())
            .collect();
        let mut disabled: std::collections::HashSet<String> = guarded.iter().cloned().collect();
        if skip != 2 {
            disabled.remove("c0");
        }
        assert!(Solver::new(&space, &SolveOptions { disabled }).is_sat(&active));
    }
}

#[test]
fn direct_clash_gives_pair() {
    let space = common::space("kids-bike.coom", 1);
    let c = space.var("root.color[0]").unwrap();
    let pairs = vec![
        (1, Assumption::Fix(c, Value::sym("Red"))),
        (2, Assumption::Fix(c, Value::sym("Green"))),
    ];
    let mus = minimal_unsat_subset(&space, &pairs, &space.boolean_constraint_ids(), &ExplanationMap::default())
        .unwrap();
    assert_eq!(mus.assumption_ids, vec![2, 1]);
    assert!(mus.constraint_ids.is_empty());
}

#[test]
fn mus_on_satisfiable_input_is_an_error() {
    let space = common::space("kids-bike.coom", 1);
    let r = minimal_unsat_subset(&space, &[], &space.boolean_constraint_ids(), &ExplanationMap::default());
    assert_eq!(r, Err(InteractiveError::Satisfiable));
}

#[test]
fn unknown_target_is_rejected() {
    let mut s = travel_session();
    assert!(matches!(
        s.fix("root.paint[0]", Value::sym("Red")),
        Err(InteractiveError::UnknownTarget(_))
    ));
    assert!(matches!(
        s.fix("root.color[0]", Value::sym("Pink")),
        Err(InteractiveError::ValueOutOfDomain { .. })
    ));
}

#[test]
fn view_agrees_with_solver() {
    let space = Arc::new(common::space("kids-bike.coom", 1));
    let mut s = SessionState::new(space.clone(), ExplanationMap::default());
    s.fix("root.color[0]", Value::sym("Yellow")).unwrap();
    let view = s.view().clone();
    let base: Vec<Assumption> = s.assumptions().iter().map(|e| e.assumption.clone()).collect();
    let models = enumerate(&space, &base, 0);
    for a in view.attributes.iter().filter(|a| a.shown) {
        let v = space.var(&a.id).unwrap();
        for d in &a.valid {
            assert!(models.iter().any(|m| m.values[v].as_ref() == Some(d)), "{} {d}", a.id);
        }
        for d in &a.invalid {
            assert!(models.iter().all(|m| m.values[v].as_ref() != Some(d)), "{} {d}", a.id);
        }
        if let Some(d) = &a.inferred {
            assert!(models.iter().all(|m| m.values[v].as_ref() == Some(d)));
        }
    }
}

#[test]
fn browse_walks_all_models_then_exhausts() {
    let src = "product { Color color }\nenumeration Color { Red Green Blue }\n";
    let space = Arc::new(coomforge_core::instantiate(&parse_model(src).unwrap(), 1).unwrap());
    let mut s = SessionState::new(space.clone(), ExplanationMap::default());
    let first = s.browse(Direction::Next).unwrap();
    assert_eq!(Some(first.clone()), coomforge_core::solve(&space, &[]).model());
    let second = s.browse(Direction::Next).unwrap();
    let third = s.browse(Direction::Next).unwrap();
    assert_eq!(s.browse(Direction::Next), Err(InteractiveError::Exhausted));
    let mut all = vec![first.clone(), second, third];
    all.sort();
    all.dedup();
    assert_eq!(all.len(), 3);
    assert_eq!(s.browse(Direction::Reset).unwrap(), first);
    // A new assumption restarts browsing.
    s.browse(Direction::Next).unwrap();
    s.fix("root.color[0]", Value::sym("Blue")).unwrap();
    let m = s.browse(Direction::Next).unwrap();
    assert_eq!(m.values[1], Some(Value::sym("Blue")));
    assert_eq!(s.browse(Direction::Next), Err(InteractiveError::Exhausted));
}

#[test]
fn browse_is_deterministic() {
    let space = Arc::new(common::space("kids-bike.coom", 1));
    let run = || {
        let mut s = SessionState::new(space.clone(), ExplanationMap::default());
        let mut out = Vec::new();
        while let Ok(m) = s.browse(Direction::Next) {
            assert!(check_model(&space, &m).is_empty());
            out.push(m);
        }
        out
    };
    let a = run();
    assert_eq!(a.len(), enumerate(&space, &[], 0).len());
    assert_eq!(a, run());
}

#[test]
fn solution_text_round_trips() {
    let space = Arc::new(common::space("travel-bike.coom", 1));
    let mut s = SessionState::new(space.clone(), ExplanationMap::default());
    s.set_included("root.frame[0].bag[0]", true).unwrap();
    let model = s.browse(Direction::Next).unwrap();
    let text = s.solution_text().unwrap();
    let again = SessionState::with_user_input(space.clone(), ExplanationMap::default(), &parse_user_input(&text).unwrap());
    assert!(again.warnings().is_empty(), "{:?}", again.warnings());
    assert_eq!(again.current_model().unwrap(), model);
}

#[test]
fn cargo_bike_needs_bound_three() {
    let ast = parse_model(&common::fixture("cargo-bike.coom")).unwrap();
    let input = parse_user_input("set requestedVolume[0] = 60\n").unwrap();
    let mut tried = Vec::new();
    let start = Instant::now();
    let r = IncrementalBounds::default()
        .solve(&ast, Some(&input), |b, sat| tried.push((b, sat)))
        .unwrap();
    assert!(start.elapsed().as_secs() < 10);
    assert_eq!(tried, vec![(1, false), (2, false), (3, true)]);
    assert_eq!(r.bound, 3);
    let bags = (0..3)
        .filter(|i| r.model.included[r.space.var(&format!("root.bags[{i}]")).unwrap()])
        .count();
    assert_eq!(bags, 3);
}

#[test]
fn cargo_bike_without_request_stops_at_first_bound() {
    let ast = parse_model(&common::fixture("cargo-bike.coom")).unwrap();
    let input = parse_user_input("set requestedVolume[0] = 0\n").unwrap();
    let r = incremental_solve(&ast, Some(&input), IncrementalBounds::default()).unwrap();
    assert_eq!(r.bound, 1);
}

#[test]
fn bounded_model_does_not_iterate() {
    let ast = parse_model(&common::fixture("kids-bike.coom")).unwrap();
    let input = parse_user_input("set color[0] = Yellow\nset frontWheel[0] = W14\n").unwrap();
    let mut tried = Vec::new();
    let r = IncrementalBounds::default().solve(&ast, Some(&input), |b, _| tried.push(b));
    assert!(matches!(r, Err(BoundsError::UnsatBounded)));
    assert_eq!(tried, vec![1]);
}

#[test]
fn cap_is_reported() {
    let ast = parse_model(&common::fixture("cargo-bike.coom")).unwrap();
    let input = parse_user_input("set requestedVolume[0] = 200\n").unwrap();
    let params = IncrementalBounds { start: 1, step: 2, cap: 7 };
    let r = incremental_solve(&ast, Some(&input), params);
    assert!(matches!(r, Err(BoundsError::BoundCapExceeded { cap: 7 })));
}
