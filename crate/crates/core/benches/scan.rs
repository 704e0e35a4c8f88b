use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pullback_core::boundary::{attractor_scan, plot_rows, BoundaryMap, DEFAULT_ORBIT_CAP};
use pullback_core::par::Exec;
use pullback_core::wreath::Recursion;

fn scans(c: &mut Criterion) {
    let mut g = c.benchmark_group("attractor_scan");
    g.sample_size(10);
    let map = BoundaryMap::untwisted();
    for height in [100u64, 300] {
        for exec in [Exec::Sequential, Exec::Parallel] {
            g.bench_with_input(
                BenchmarkId::new(format!("{exec:?}"), height),
                &height,
                |b, &h| b.iter(|| attractor_scan(&map, h, DEFAULT_ORBIT_CAP, exec)),
            );
        }
    }
    g.finish();

    let mut g = c.benchmark_group("plot_rows");
    g.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        g.bench_function(BenchmarkId::new(format!("{exec:?}"), 200), |b| {
            b.iter(|| plot_rows(&map, 200, exec))
        });
    }
    g.finish();
}

fn levels(c: &mut Criterion) {
    let r = Recursion::builtin("phi-f").unwrap();
    let w = r.word("abcab").unwrap();
    let mut g = c.benchmark_group("act_level");
    g.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        g.bench_function(BenchmarkId::new(format!("{exec:?}"), 9), |b| {
            b.iter(|| r.act_level(&w, 9, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, scans, levels);
criterion_main!(benches);
