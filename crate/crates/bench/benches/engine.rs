use std::hint::black_box;
use std::sync::Arc;

use coomforge_bench::{fixture, space};
use coomforge_core::interactive::{IncrementalBounds, SessionState};
use coomforge_core::{enumerate, instantiate, parse_model, parse_user_input, serialize_facts, Value};
use criterion::{criterion_group, criterion_main, Criterion};

fn front_end(c: &mut Criterion) {
    let travel = fixture("travel-bike.coom");
    c.bench_function("parse travel-bike", |b| b.iter(|| parse_model(black_box(&travel)).unwrap()));
    let ast = parse_model(&travel).unwrap();
    c.bench_function("instantiate travel-bike", |b| b.iter(|| instantiate(black_box(&ast), 1).unwrap()));
    let space = space("travel-bike.coom", 1);
    c.bench_function("facts travel-bike", |b| b.iter(|| serialize_facts(black_box(&space))));
}

fn solving(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate all");
    for (name, bound) in [("kids-bike.coom", 1), ("restaurant.coom", 1), ("nested-shelf.coom", 1)] {
        let space = space(name, bound);
        g.bench_function(name, |b| b.iter(|| enumerate(black_box(&space), &[], 0)));
    }
    g.finish();

    let ast = parse_model(&fixture("cargo-bike.coom")).unwrap();
    let input = parse_user_input("set requestedVolume[0] = 60\n").unwrap();
    c.bench_function("incremental bounds cargo-bike 60", |b| {
        b.iter(|| IncrementalBounds::default().solve(&ast, Some(&input), |_, _| {}).unwrap())
    });
}

fn interactive(c: &mut Criterion) {
    let space = Arc::new(space("travel-bike.coom", 1));
    c.bench_function("view travel-bike", |b| {
        b.iter(|| SessionState::new(space.clone(), Default::default()).view().satisfiable)
    });
    c.bench_function("view travel-bike red", |b| {
        b.iter(|| {
            let mut s = SessionState::new(space.clone(), Default::default());
            s.fix("root.color[0]", Value::sym("Red")).unwrap();
            s.view().satisfiable
        })
    });
    c.bench_function("view travel-bike conflict", |b| {
        b.iter(|| {
            let mut s = SessionState::new(space.clone(), Default::default());
            s.fix("root.color[0]", Value::sym("Red")).unwrap();
            s.fix("root.frontWheel[0]", Value::sym("W16")).unwrap();
            s.view().mus.is_some()
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = front_end, solving, interactive
}
criterion_main!(benches);
