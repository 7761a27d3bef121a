use criterion::{black_box, criterion_group, criterion_main, Criterion};

use nsa_core::corpus::{self, Category};
use nsa_core::pipeline::Strategy;

fn normal_forms(c: &mut Criterion) {
    let strategy = Strategy::default();
    for fx in corpus::embedded() {
        c.bench_function(&format!("normalform/{}", fx.name), |b| {
            b.iter(|| black_box(fx.transcript(&strategy).unwrap()))
        });
    }
}

fn interpretation(c: &mut Criterion) {
    let cases: Vec<_> = corpus::golden_cases().into_iter().filter(|g| g.category == Category::Ust).collect();
    c.bench_function("ust/corpus", |b| {
        b.iter(|| {
            for case in &cases {
                black_box(corpus::ust_transcript(&case.source).unwrap());
            }
        })
    });
}

criterion_group!(benches, normal_forms, interpretation);
criterion_main!(benches);
