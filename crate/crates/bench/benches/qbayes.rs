use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;

use qbayes::bayesnet::random_net;
use qbayes::compiler::{compile_qsample, GroverOperators};
use qbayes::inference::{batch_sample, chain_family, ScheduleConfig, ScheduleMode};
use qbayes::{Assignment, MczMode, Statevector};

fn compile(c: &mut Criterion) {
    let mut rng = seeded_rng(5);
    let mut group = c.benchmark_group("compile_qsample");
    for n in [6usize, 10, 14] {
        let net = random_net(&mut rng, n, 3);
        group.bench_with_input(BenchmarkId::from_parameter(n), &net, |b, net| {
            b.iter(|| compile_qsample(black_box(net)))
        });
    }
    group.finish();
}

fn grover_iterate(c: &mut Criterion) {
    let mut rng = seeded_rng(6);
    let mut group = c.benchmark_group("grover_iterate");
    for n in [8usize, 12, 16] {
        let net = random_net(&mut rng, n, 2);
        let evidence = Assignment::new().with(n - 1, true).with(n - 2, false);
        let ops = GroverOperators::compile(&net, &evidence).unwrap();
        for mode in [MczMode::Primitive, MczMode::Compiled] {
            let id = BenchmarkId::new(format!("{mode:?}").to_lowercase(), n);
            group.bench_with_input(id, &ops, |b, ops| {
                let mut psi = Statevector::zero(n).unwrap();
                psi.apply(&ops.prep, mode).unwrap();
                b.iter(|| psi.apply(black_box(&ops.iterate), mode).unwrap())
            });
        }
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("batch_sample_chain");
    group.sample_size(20);
    for k in [2usize, 4, 6] {
        let point = chain_family(k);
        let schedule = ScheduleConfig::evidence_bounded(ScheduleMode::Randomized, k);
        group.bench_with_input(BenchmarkId::from_parameter(k), &point, |b, p| {
            b.iter(|| batch_sample(&p.net, &p.query, &p.evidence, 200, schedule, 1).unwrap())
        });
    }
    group.finish();
}

fn seeded_rng(seed: u64) -> rand::rngs::StdRng {
    rand::rngs::StdRng::seed_from_u64(seed)
}

criterion_group!(benches, compile, grover_iterate, sampling);
criterion_main!(benches);
