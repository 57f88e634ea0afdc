use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use irvs_sim::beamforming::{alternating_optimize, AoOptions};
use irvs_sim::runner::{drop_channels, run_drops, run_drops_serial};
use irvs_sim::{Scheme, SystemConfig};

fn config(n_users: usize, n_surfaces: usize, n_drops: u64) -> SystemConfig {
    let mut cfg = SystemConfig {
        n_users,
        n_drops,
        ..SystemConfig::default()
    };
    cfg.set_surfaces(n_surfaces, Some(200));
    cfg
}

fn serial_vs_parallel(c: &mut Criterion) {
    let schemes = Scheme::reference_set();
    let mut group = c.benchmark_group("drops");
    group.sample_size(10);
    for (k, s) in [(2, 2), (20, 5)] {
        let cfg = config(k, s, 64);
        let label = format!("K{k}_S{s}");
        group.bench_with_input(BenchmarkId::new("serial", &label), &cfg, |b, cfg| {
            b.iter(|| run_drops_serial(cfg, &schemes).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parallel", &label), &cfg, |b, cfg| {
            b.iter(|| run_drops(cfg, &schemes, None).unwrap())
        });
    }
    group.finish();
}

fn single_user_ao(c: &mut Criterion) {
    let cfg = config(1, 5, 1);
    let ch = drop_channels(&cfg, 0);
    c.bench_function("ao_1000_elements", |b| {
        b.iter(|| alternating_optimize(&ch.stacked_g[0], &ch.stacked_h, &ch.direct[0], &AoOptions::default()))
    });
}

criterion_group!(benches, serial_vs_parallel, single_user_ao);
criterion_main!(benches);
