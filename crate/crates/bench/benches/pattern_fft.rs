use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use homlat::{PatternFft, PatternMatrix};
use homlat_bench::signal;

fn transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("pattern_fft");
    for (name, rows) in [
        ("diag64", [[64, 0], [0, 64]]),
        ("diag128", [[128, 0], [0, 128]]),
        ("shear", [[4, -2], [4, 14]]),
        ("skew4096", [[64, 16], [-32, 56]]),
    ] {
        let m = PatternMatrix::from_rows(&rows).unwrap();
        let plan = PatternFft::new(&m);
        let data = signal(m.det_abs());
        group.bench_with_input(BenchmarkId::new("forward", name), &data, |b, data| {
            b.iter_batched_ref(
                || data.clone(),
                |buf| plan.forward(buf).unwrap(),
                criterion::BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, transforms);
criterion_main!(benches);
