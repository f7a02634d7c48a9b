mod common;

use coomforge_core::parser::{pretty_print, ParseErrorKind, SemanticErrorKind};
use coomforge_core::{parse_model, parse_user_input, validate_ast};
use proptest::prelude::*;

#[test]
fn fixtures_parse_and_validate() {
    for (name, _) in common::MODEL_FIXTURES {
        let ast = parse_model(&common::fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(validate_ast(&ast), vec![], "{name}");
    }
}

#[test]
fn print_then_parse_gives_the_same_ast() {
    for (name, _) in common::MODEL_FIXTURES {
        let ast = parse_model(&common::fixture(name)).unwrap();
        let printed = pretty_print(&ast);
        let again = parse_model(&printed).unwrap_or_else(|e| panic!("{name}: {e}\n{printed}"));
        assert_eq!(again, ast, "{name}");
        assert_eq!(pretty_print(&again), printed, "{name}: printing is not idempotent");
    }
}

#[test]
fn kids_bike_shape() {
    let ast = parse_model(&common::fixture("kids-bike.coom")).unwrap();
    let names: Vec<_> = ast.product.features.iter().map(|f| f.name.as_str()).collect();
    assert_eq!(names, ["color", "frontWheel", "rearWheel", "wheelSupport"]);
    let wheel = ast.enumeration("Wheel").unwrap();
    assert_eq!(wheel.options.len(), 4);
    assert_eq!(ast.behaviors.len(), 3);
    assert!(!ast.has_unbounded());
    assert!(parse_model(&common::fixture("cargo-bike.coom")).unwrap().has_unbounded());
}

#[test]
fn garbage_reports_positions() {
    let errs = parse_model("product {\n    Color color\n    ??\n}\n").unwrap_err();
    let first = &errs.0[0];
    assert_eq!((first.line, first.col), (3, 5));
    assert_eq!(first.kind, ParseErrorKind::Lexical);
}

#[test]
fn unknown_type_is_a_semantic_error() {
    let ast = parse_model("product {\n  Colour color\n}\n").unwrap();
    let errs = validate_ast(&ast);
    assert_eq!(errs.len(), 1);
    assert_eq!(errs[0].kind, SemanticErrorKind::UnresolvedType);
    assert_eq!((errs[0].line, errs[0].col), (2, 3));
}

#[test]
fn user_input_paths_get_root_prefix() {
    let input = parse_user_input("add carrier[0].bag[1]\nset color[0] = Yellow\nset root.totalVolume[0] = 20\n").unwrap();
    let ids: Vec<_> = input.directives.iter().map(|d| d.target().variable_id()).collect();
    assert_eq!(ids, ["root.carrier[0].bag[1]", "root.color[0]", "root.totalVolume[0]"]);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, ..ProptestConfig::default() })]

    #[test]
    fn random_models_round_trip(bytes in prop::collection::vec(any::<u8>(), 64)) {
        let src = common::gen::random_model(&bytes);
        let ast = parse_model(&src).unwrap();
        let again = parse_model(&pretty_print(&ast)).unwrap();
        prop_assert_eq!(again, ast);
    }
}
