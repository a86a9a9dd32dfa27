use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use reachgame::io::sweep::{random_config, sweep, SweepParams};
use reachgame::{escape_margin_supremum, Analysis, Exec, OracleParams};

const POLICIES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn oracle(c: &mut Criterion) {
    let cfg = random_config(7, 6..=6);
    let evader = cfg.evader.unwrap();
    let mut group = c.benchmark_group("oracle_supremum");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        let params = OracleParams {
            exec,
            ..OracleParams::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &params, |b, p| {
            b.iter(|| escape_margin_supremum(black_box(evader), &cfg.pursuers, p).unwrap())
        });
    }
    group.finish();
}

fn coalitions(c: &mut Criterion) {
    let cfg = random_config(11, 40..=40);
    let mut group = c.benchmark_group("coalition_analysis");
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| Analysis::with_exec(black_box(&cfg.pursuers), exec))
        });
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep_16_configs");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        let params = SweepParams {
            n_configs: 16,
            pursuers: 1..=8,
            trials: 10,
            exec,
            ..SweepParams::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &params, |b, p| {
            b.iter(|| sweep(p).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, oracle, coalitions, sweeps);
criterion_main!(benches);
