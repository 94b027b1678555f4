//! Engine workloads for weighing the rayon map against the sequential
//! fallback.  The switch is the compile-time `parallel` feature, so the
//! comparison is two runs against saved baselines:
//!
//! ```text
//! cargo bench -p symseq -- --save-baseline parallel
//! cargo bench -p symseq --no-default-features -- --save-baseline sequential
//! cargo bench -p symseq -- --load-baseline sequential --baseline parallel
//! ```

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use symseq::arithprod::{boxtimes, interchange_tau, ThetaMode};
use symseq::compose::kleisli_compose;
use symseq::species::{positive_part, species_e, species_l};

fn engine(c: &mut Criterion) {
    let e3 = species_e(3);
    let e4 = species_e(4);
    let l4 = species_l(4);
    let e12 = positive_part(&species_e(2));

    let mut group = c.benchmark_group("engine");
    group.sample_size(10);
    // substitution with an arity-9 tail: the largest presentation space is
    // one head choice against the full degree-9 relabelling group
    group.bench_function("compose_e3_into_e3", |b| {
        b.iter(|| kleisli_compose(black_box(&e3), black_box(&e3), None).unwrap())
    });
    // free factors make the product side wide: a few million presentations
    group.bench_function("boxtimes_l4_l4_arity8", |b| {
        b.iter(|| boxtimes(black_box(&l4), black_box(&l4), Some(8)).unwrap())
    });
    group.bench_function("boxtimes_e4_l4_arity8", |b| {
        b.iter(|| boxtimes(black_box(&e4), black_box(&l4), Some(8)).unwrap())
    });
    // the full interchange construction: two composites, two products, one
    // certified componentwise map
    group.bench_function("tau_e12_arity4", |b| {
        b.iter(|| {
            interchange_tau(
                black_box(&e12),
                black_box(&e12),
                black_box(&e12),
                black_box(&e12),
                Some(4),
                ThetaMode::Exchange,
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(engine_benches, engine);
criterion_main!(engine_benches);
