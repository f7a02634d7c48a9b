mod common;

use coomforge_core::space::{
    load_explanations, serialize_facts_with, solution_to_coom, space_to_json, SpaceError, WarningKind, JSON_GROUPS,
};
use coomforge_core::{
    apply_user_input, enumerate, instantiate, parse_model, parse_user_input, serialize_facts, solve, Value,
};

#[test]
fn kids_bike_tree() {
    let space = common::space("kids-bike.coom", 1);
    let ids: Vec<_> = space.variables.iter().map(|v| v.id.as_str()).collect();
    assert_eq!(
        ids,
        [
            "root",
            "root.color[0]",
            "root.frontWheel[0]",
            "root.frontWheel[0].size[0]",
            "root.frontWheel[0].price[0]",
            "root.rearWheel[0]",
            "root.rearWheel[0].size[0]",
            "root.rearWheel[0].price[0]",
            "root.wheelSupport[0]",
        ]
    );
    let size = space.var("root.frontWheel[0].size[0]").unwrap();
    assert!(space.variables[size].derived);
    assert_eq!(space.boolean_constraint_ids(), ["c0", "c2"]);
}

#[test]
fn w16_carries_size_16_and_price_60() {
    let facts = serialize_facts(&common::space("kids-bike.coom", 1));
    let t = "\"t_root.frontWheel[0]\"";
    assert!(facts.contains(&format!("column({t},1,\"root.frontWheel[0].size[0]\").")));
    assert!(facts.contains(&format!("column({t},2,\"root.frontWheel[0].price[0]\").")));
    let row = (0..4)
        .find(|r| facts.contains(&format!("allow({t},({r},0),\"W16\").")))
        .expect("a row for W16");
    assert!(facts.contains(&format!("allow({t},({row},1),16).")));
    assert!(facts.contains(&format!("allow({t},({row},2),60).")));
}

#[test]
fn kids_bike_facts_match_golden_file() {
    let golden = common::fixture("kids-bike.facts");
    assert_eq!(serialize_facts(&common::space("kids-bike.coom", 1)), golden);
}

#[test]
fn facts_are_stable_across_runs() {
    for (name, bound) in common::MODEL_FIXTURES {
        let a = serialize_facts(&common::space(name, *bound));
        let b = serialize_facts(&common::space(name, *bound));
        assert_eq!(a, b, "{name}");
        let lines: Vec<_> = a.lines().collect();
        let mut sorted = lines.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(lines, sorted, "{name}: facts are not sorted and unique");
    }
}

#[test]
fn empty_product_has_root_facts_only() {
    let space = instantiate(&parse_model("product {\n}\n").unwrap(), 1).unwrap();
    assert_eq!(
        serialize_facts(&space),
        "part(\"product\").\ntype(\"root\",\"product\").\nindex(\"root\",0).\nvariable(\"root\").\n"
            .lines()
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .map(|l| format!("{l}\n"))
            .collect::<String>()
    );
}

#[test]
fn json_has_every_group() {
    let space = common::space("travel-bike.coom", 1);
    let json = space_to_json(&space, None);
    let obj = json.as_object().unwrap();
    let keys: Vec<_> = obj.keys().map(String::as_str).collect();
    assert_eq!(keys, JSON_GROUPS);
    assert!(!obj["lowerbound"].as_array().unwrap().is_empty());
}

#[test]
fn explanations_enter_the_facts() {
    let space = common::space("travel-bike.coom", 1);
    let (expl, warnings) = load_explanations(&space, &common::fixture("travel-bike.explanations.json")).unwrap();
    assert!(warnings.is_empty());
    let facts = serialize_facts_with(&space, Some(&expl));
    assert!(facts.contains(
        "configuration_explanation(\"c0\",\"If the color is red, then the size of the front wheel should be 20.\")."
    ));
    // Structure-scoped behaviors fall back to the behavior's own text.
    assert_eq!(
        expl.get("c7@root.carrier[0].bag[1]"),
        Some("Leather bags are only available in small and medium.")
    );
}

#[test]
fn explanation_sidecar_problems() {
    let space = common::space("kids-bike.coom", 1);
    let (map, warnings) = load_explanations(&space, r#"{"c0": "yellow needs big wheels", "c9": "nope"}"#).unwrap();
    assert_eq!(map.len(), 1);
    assert_eq!(warnings.len(), 1);
    assert!(load_explanations(&space, "[1, 2]").is_err());
}

#[test]
fn open_cardinality_expands_to_bound() {
    let space = common::space("cargo-bike.coom", 3);
    for i in 0..3 {
        assert!(space.var(&format!("root.bags[{i}]")).is_some());
    }
    assert!(space.var("root.bags[3]").is_none());
    let ast = parse_model(&common::fixture("cargo-bike.coom")).unwrap();
    assert_eq!(instantiate(&ast, 0).unwrap_err(), SpaceError::ZeroBound);
}

#[test]
fn lower_bound_above_max_bound_is_rejected() {
    let ast = parse_model("product {\n  Bag bags 2..*\n}\nenumeration Bag {\n  Small\n}\n").unwrap();
    assert!(matches!(instantiate(&ast, 1), Err(SpaceError::BoundBelowLower { lo: 2, .. })));
    assert!(instantiate(&ast, 2).is_ok());
}

#[test]
fn warning_unknown_variable() {
    let space = common::space("travel-bike-simplified.coom", 1);
    let user = apply_user_input(&space, &parse_user_input("set color[0] = Yellow\n").unwrap());
    assert_eq!(user.warnings.len(), 1);
    assert_eq!(user.warnings[0].kind, WarningKind::UnknownVariable);
    assert!(user.values.is_empty());
}

#[test]
fn warning_not_an_attribute() {
    let space = common::space("travel-bike-simplified.coom", 1);
    let user = apply_user_input(&space, &parse_user_input("set carrier[0] = 3\n").unwrap());
    assert_eq!(user.warnings.len(), 1);
    assert_eq!(user.warnings[0].kind, WarningKind::NotAnAttribute);
}

#[test]
fn warning_value_out_of_domain() {
    let space = common::space("travel-bike-simplified.coom", 1);
    let input = parse_user_input("set totalVolume[0] = 500\nset carrier[0].bag[0] = Huge\nadd frame[0].bag[1]\n").unwrap();
    let user = apply_user_input(&space, &input);
    let kinds: Vec<_> = user.warnings.iter().map(|w| w.kind).collect();
    assert_eq!(kinds, [WarningKind::ValueOutOfDomain, WarningKind::ValueOutOfDomain]);
    assert_eq!(user.includes, [space.var("root.frame[0].bag[1]").unwrap()]);
    assert!(user.warnings[0].to_string().starts_with("warning: set root.totalVolume[0] = 500"));
}

#[test]
fn solutions_round_trip_through_user_input() {
    for (name, bound) in common::MODEL_FIXTURES {
        let space = common::space(name, *bound);
        for model in enumerate(&space, &[], 25) {
            let text = solution_to_coom(&space, &model).unwrap();
            assert!(text.starts_with("add root\n"));
            let input = parse_user_input(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
            let user = apply_user_input(&space, &input);
            assert!(user.warnings.is_empty(), "{name}: {:?}", user.warnings);
            let assumptions = coomforge_core::solver::user_assumptions(&user);
            // Parts not mentioned are tried excluded first, so the first
            // model is the original one.
            let again = solve(&space, &assumptions).model();
            assert_eq!(again.as_ref(), Some(&model), "{name}:\n{text}");
        }
    }
}

#[test]
fn solution_of_empty_product() {
    let space = instantiate(&parse_model("product {\n}\n").unwrap(), 1).unwrap();
    let model = solve(&space, &[]).model().unwrap();
    assert_eq!(solution_to_coom(&space, &model).unwrap(), "add root\n");
}

#[test]
fn invalid_model_is_not_rendered() {
    let space = common::space("kids-bike.coom", 1);
    let mut model = solve(&space, &[]).model().unwrap();
    let rear = space.var("root.rearWheel[0]").unwrap();
    let size = space.var("root.rearWheel[0].size[0]").unwrap();
    model.values[rear] = Some(Value::sym("W20"));
    model.values[size] = Some(Value::Int(20));
    assert!(solution_to_coom(&space, &model).is_err());
}
