//! Compares the rayon-partitioned oracle enumeration against the
//! sequential fallback on identical instances.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use screening::beliefs::Belief;
use screening::model::{TypeSpace, ValueFunction};
use screening::oracle::{brute_force_optimal_seq, OracleCaps};
use screening::rat;

#[cfg(feature = "parallel")]
use screening::oracle::brute_force_optimal_par;

fn instance(b: u64) -> (ValueFunction, TypeSpace, Belief) {
    let v = ValueFunction::from_quadratic(&rat(13, 4), &rat(-1, 8), b).unwrap();
    let ts = TypeSpace::new(2, 20, b).unwrap();
    let p = Belief::new(vec![rat(1, 2), rat(1, 2)]).unwrap();
    (v, ts, p)
}

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_force_optimal");
    group.sample_size(10);
    for b in [8u64, 10, 12] {
        let (v, ts, p) = instance(b);
        let caps = OracleCaps::default();
        group.bench_with_input(BenchmarkId::new("seq", b), &b, |bench, _| {
            bench.iter(|| brute_force_optimal_seq(&v, &ts, &p, caps.clone()).unwrap())
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("par", b), &b, |bench, _| {
            bench.iter(|| brute_force_optimal_par(&v, &ts, &p, caps.clone()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_oracle);
criterion_main!(benches);
