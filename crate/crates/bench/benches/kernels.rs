use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qpurify::harness::rng_for;
use qpurify::purify::DelayedMeasurement;
use qpurify::qcore::{haar_unitary, qft_zm};
use qpurify::septest::*;
use qpurify::sim::{OracleRegistry, Simulator};

fn registry(inst: &OracleInstance) -> OracleRegistry {
    OracleRegistry::from([(ORACLE.to_string(), build_oracle(inst).unwrap())])
}

fn simulate(c: &mut Criterion) {
    let sim = Simulator::default();
    let mut group = c.benchmark_group("measurement-algorithm");
    for t in [1usize, 3, 7] {
        let alg = build_measurement_algorithm(2, t).unwrap();
        let purified = DelayedMeasurement::default().purify(&alg).unwrap().circuit;
        let reg = registry(&OracleInstance::random(2, t, true, &mut rng_for(1, t as u64)));
        group.bench_with_input(BenchmarkId::new("low-rank", t), &t, |b, _| {
            b.iter(|| sim.run_distribution(black_box(&alg), &[], &reg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("banked", t), &t, |b, _| {
            b.iter(|| sim.run_distribution_banked(black_box(&alg), &[], &reg).unwrap())
        });
        // 35 qubits at t = 7, past any statevector budget
        if t <= 3 {
            group.bench_with_input(BenchmarkId::new("purified-pure", t), &t, |b, _| {
                b.iter(|| sim.run_pure(black_box(&purified), &[], &reg).unwrap())
            });
        }
    }
    let small = build_measurement_algorithm(1, 2).unwrap();
    let reg = registry(&OracleInstance::random(1, 2, true, &mut rng_for(2, 0)));
    group.bench_function("dense/n=1,t=2", |b| {
        b.iter(|| sim.run_distribution_dense(black_box(&small), &[], &reg).unwrap())
    });
    group.finish();
}

fn compile(c: &mut Criterion) {
    let alg = build_measurement_algorithm(3, 7).unwrap();
    let pass = DelayedMeasurement::default();
    c.bench_function("purify/n=3,t=7", |b| b.iter(|| pass.purify(black_box(&alg)).unwrap()));
    let inst = OracleInstance::random(3, 3, false, &mut rng_for(3, 0));
    c.bench_function("build-oracle/n=3,t=3", |b| {
        b.iter(|| build_oracle(black_box(&inst)).unwrap())
    });
}

fn worlds(c: &mut Criterion) {
    let mut rng = rng_for(4, 0);
    let inst = OracleInstance::random(2, 2, true, &mut rng);
    let adv = Adversary::haar(2, 2, 0, 2, &mut rng);
    let mut group = c.benchmark_group("copy-world");
    for l in [4usize, 16] {
        for (name, mode) in [("exact", CopyMode::Exact), ("symmetric", CopyMode::Symmetric)] {
            group.bench_with_input(BenchmarkId::new(name, l), &l, |b, &l| {
                b.iter(|| {
                    let mut w = CopyWorld::new(&inst, &adv, l, 2, mode).unwrap();
                    run_adversary(&adv, &mut w).unwrap();
                    w
                })
            });
        }
    }
    group.finish();
    c.bench_function("counting-world/n=2,t=2", |b| {
        b.iter(|| {
            let mut w = CountingWorld::new(&inst, &adv, 2).unwrap();
            run_adversary(&adv, &mut w).unwrap();
            w
        })
    });
    let honest = Adversary::honest(2, 2).unwrap();
    c.bench_function("honest-ledger/l=4", |b| {
        b.iter(|| {
            let mut w = CopyWorld::new(&inst, &honest, 4, honest.queries(), CopyMode::Exact).unwrap();
            run_adversary(&honest, &mut w).unwrap();
            CountLedger::from_copy_world(&w).success_weight()
        })
    });
}

fn linalg(c: &mut Criterion) {
    c.bench_function("haar-unitary/64", |b| {
        let mut rng = rng_for(5, 0);
        b.iter(|| haar_unitary(64, &mut rng))
    });
    c.bench_function("qft/M=8", |b| b.iter(|| qft_zm(black_box(8)).unwrap()));
}

criterion_group!(benches, simulate, compile, worlds, linalg);
criterion_main!(benches);
