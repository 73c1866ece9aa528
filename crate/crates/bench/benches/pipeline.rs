//! Throughput of the three hot paths: story generation, oracle belief
//! computation, and full strategy evaluation with the symbolic reasoner.

use criterion::{criterion_group, criterion_main, Criterion};
use decompose_tom::model::QuestionRecord;
use decompose_tom::oracle::{belief_oracle, generate_story, GenSpec};
use decompose_tom::symbolic::SymbolicReasoner;
use decompose_tom::{evaluate, RunConfig, Strategy};

fn deep_record() -> QuestionRecord {
    let spec = GenSpec {
        order: 4,
        seed: 11,
        ..GenSpec::default()
    };
    generate_story("bench-0000", &spec).expect("default shape is feasible")
}

fn generation(c: &mut Criterion) {
    let spec = GenSpec {
        order: 4,
        seed: 11,
        ..GenSpec::default()
    };
    c.bench_function("generate_story", |b| {
        b.iter(|| generate_story("bench-0000", &spec).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let record = deep_record();
    c.bench_function("belief_oracle", |b| b.iter(|| belief_oracle(&record.story, 4)));
}

fn evaluation(c: &mut Criterion) {
    let record = deep_record();
    let reasoner = SymbolicReasoner::new();
    for strategy in Strategy::ALL {
        c.bench_function(&format!("evaluate/{strategy}"), |b| {
            b.iter(|| evaluate(&record, &reasoner, &RunConfig::new(strategy)).unwrap())
        });
    }
}

criterion_group!(benches, generation, oracle, evaluation);
criterion_main!(benches);
