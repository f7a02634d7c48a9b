mod common;

use std::time::Instant;

use coomforge_core::solver::{brute_force_enumerate, raw_candidate_count, CapExceeded, SolveOptions, Solver};
use coomforge_core::{check_model, enumerate, solve, Assumption, ConfigurationSpace, Model, Value};

fn int(space: &ConfigurationSpace, m: &Model, id: &str) -> i64 {
    m.value(space.var(id).unwrap()).and_then(Value::as_int).unwrap()
}

#[test]
fn yellow_kids_bike_has_big_equal_wheels() {
    let start = Instant::now();
    let space = common::space("kids-bike.coom", 1);
    let color = space.var("root.color[0]").unwrap();
    let models = enumerate(&space, &[Assumption::Fix(color, Value::sym("Yellow"))], 0);
    assert!(!models.is_empty());
    for m in &models {
        let front = int(&space, m, "root.frontWheel[0].size[0]");
        let rear = int(&space, m, "root.rearWheel[0].size[0]");
        assert!(front > 16);
        assert_eq!(front, rear);
    }
    // W18 and W20, each with the only compatible support setting.
    assert_eq!(models.len(), 2);
    assert!(start.elapsed().as_secs() < 5);
}

#[test]
fn travel_bike_bags_and_volume() {
    let space = common::space("travel-bike-simplified.coom", 1);
    let bags: Vec<_> = space
        .variables
        .iter()
        .enumerate()
        .filter(|(_, v)| v.feature == "bag")
        .map(|(i, _)| i)
        .collect();
    assert_eq!(bags.len(), 5);
    let models = enumerate(&space, &[], 0);
    assert!(!models.is_empty());
    let mut max_bags = 0;
    for m in &models {
        let count = bags.iter().filter(|&&b| m.included[b]).count();
        max_bags = max_bags.max(count);
        let volume: i64 = bags
            .iter()
            .filter(|&&b| m.included[b])
            .map(|&b| {
                let child = space.children(b)[0];
                m.value(child).and_then(Value::as_int).unwrap()
            })
            .sum();
        assert_eq!(int(&space, m, "root.totalVolume[0]"), volume);
        assert!(int(&space, m, "root.requestedVolume[0]") <= volume);
    }
    assert_eq!(max_bags, 4);
}

#[test]
fn full_travel_bike_never_carries_five_bags() {
    let space = common::space("travel-bike.coom", 1);
    let bags: Vec<_> = (0..space.variables.len())
        .filter(|&v| space.variables[v].feature == "bag")
        .collect();
    let all: Vec<Assumption> = bags.iter().map(|&b| Assumption::Include(b)).collect();
    assert!(!Solver::new(&space, &SolveOptions::default()).is_sat(&all));
    assert!(Solver::new(&space, &SolveOptions::default()).is_sat(&all[..4]));
}

#[test]
fn assumption_kinds() {
    let space = common::space("kids-bike-optional.coom", 1);
    let v = |id: &str| space.var(id).unwrap();
    let rear = v("root.rearWheel[0]");
    let support = v("root.wheelSupport[0]");
    let color = v("root.color[0]");

    let m = solve(&space, &[Assumption::Exclude(rear)]).model().unwrap();
    assert!(!m.included[rear]);
    assert_eq!(m.value(color), Some(&Value::sym("Red")));

    let m = solve(&space, &[Assumption::Include(support)]).model().unwrap();
    assert!(m.included[support]);

    let m = solve(&space, &[Assumption::ExcludeValue(color, Value::sym("Red"))]).model().unwrap();
    assert_eq!(m.value(color), Some(&Value::sym("Yellow")));

    // A value outside the domain cannot be fixed.
    assert!(!solve(&space, &[Assumption::Fix(color, Value::sym("Blue"))]).is_sat());
    // The root's mandatory attributes cannot be excluded.
    assert!(!solve(&space, &[Assumption::Exclude(color)]).is_sat());
}

#[test]
fn table_is_vacuous_when_a_column_is_excluded() {
    let space = common::space("kids-bike-optional.coom", 1);
    let support = space.var("root.wheelSupport[0]").unwrap();
    let front = space.var("root.frontWheel[0]").unwrap();
    let models = enumerate(&space, &[Assumption::Exclude(support), Assumption::Fix(front, Value::sym("W20"))], 0);
    assert!(!models.is_empty());
    assert!(models.iter().all(|m| !m.included[support]));
}

#[test]
fn disabled_constraints_are_ignored() {
    let space = common::space("kids-bike.coom", 1);
    let color = space.var("root.color[0]").unwrap();
    let front = space.var("root.frontWheel[0]").unwrap();
    let clash = [
        Assumption::Fix(color, Value::sym("Yellow")),
        Assumption::Fix(front, Value::sym("W14")),
    ];
    assert!(!solve(&space, &clash).is_sat());
    let opts = SolveOptions {
        disabled: ["c0".to_string()].into(),
    };
    assert!(Solver::new(&space, &opts).is_sat(&clash));
}

#[test]
fn checker_reports_violations() {
    let space = common::space("kids-bike.coom", 1);
    let mut m = solve(&space, &[]).model().unwrap();
    assert!(check_model(&space, &m).is_empty());
    let color = space.var("root.color[0]").unwrap();
    m.values[color] = Some(Value::sym("Purple"));
    assert!(!check_model(&space, &m).is_empty());
    m.values[color] = Some(Value::sym("Red"));
    m.included[color] = false;
    assert!(!check_model(&space, &m).is_empty());
}

#[test]
fn enumeration_has_no_duplicates() {
    for (name, bound) in common::MODEL_FIXTURES {
        let space = common::space(name, *bound);
        let mut models = enumerate(&space, &[], 2000);
        let n = models.len();
        models.sort();
        models.dedup();
        assert_eq!(models.len(), n, "{name}");
    }
}

#[test]
fn oracle_refuses_large_spaces() {
    let space = common::space("travel-bike.coom", 1);
    let n = raw_candidate_count(&space);
    assert!(n > 1_000_000);
    assert_eq!(
        brute_force_enumerate(&space, 1_000_000).unwrap_err(),
        CapExceeded {
            candidates: n,
            cap: 1_000_000
        }
    );
}
