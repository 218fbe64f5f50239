use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use idta::ltl::tltl_eval;
use idta::operators::NoResolver;
use idta::recursive::{ridta_membership, rtltl_eval, Session};
use idta::symbolic::{canonical_word, complement_idta, timed_membership};
use idta::testkit::fixtures;
use idta::Config;
use idta_bench::Workload;

fn membership(c: &mut Criterion) {
    let w = Workload::new(1, 16);
    let cfg = Config::default();
    c.bench_function("idta_membership", |b| {
        b.iter(|| {
            for (a, word) in w.automata.iter().zip(&w.words) {
                black_box(timed_membership(a, word, &NoResolver, &cfg).ok());
            }
        })
    });
    let ex = fixtures::example_ridta();
    let sigma = fixtures::sigma2();
    c.bench_function("ridta_membership", |b| {
        b.iter(|| black_box(ridta_membership(&ex, &sigma, &cfg).ok()))
    });
}

fn complementation(c: &mut Criterion) {
    let w = Workload::new(2, 8);
    let cfg = Config::default();
    c.bench_function("complement_idta", |b| {
        b.iter(|| {
            for a in &w.automata {
                black_box(complement_idta(a, &cfg).ok());
            }
        })
    });
}

fn canonical(c: &mut Criterion) {
    let w = Workload::new(3, 16);
    let cfg = Config::default();
    c.bench_function("canonical_word", |b| {
        b.iter(|| {
            for (p, word) in w.proper.iter().zip(&w.words) {
                black_box(canonical_word(&p.alphabet, word, &NoResolver, &cfg).ok());
            }
        })
    });
}

fn evaluation(c: &mut Criterion) {
    let w = Workload::new(4, 16);
    let cfg = Config::default();
    c.bench_function("tltl_eval", |b| {
        b.iter(|| {
            for (f, word) in w.formulas.iter().zip(&w.words) {
                black_box(tltl_eval(f, word, 0, &NoResolver, &cfg).ok());
            }
        })
    });
    let ex = fixtures::example_ridta();
    let theta = fixtures::example_formula();
    let sigma = fixtures::sigma1();
    c.bench_function("rtltl_eval", |b| {
        b.iter(|| {
            let session = Session::new(&ex.registry, &cfg);
            black_box(rtltl_eval(&theta, &sigma, 0, &session).ok())
        })
    });
}

criterion_group!(benches, membership, complementation, canonical, evaluation);
criterion_main!(benches);
