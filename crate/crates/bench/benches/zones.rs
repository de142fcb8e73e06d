//! Micro-benchmarks for the zone and federation algebra.

use criterion::{criterion_group, criterion_main, Criterion};

use pesmc_core::bound::Bound;
use pesmc_core::{Federation, Zone};

/// A deterministic spread of boxes with mixed overlaps, as subtraction and
/// reduction see them in the checker.
fn box_grid(dim: usize, count: usize) -> Vec<Zone> {
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mut z = Zone::universe(dim);
        for c in 1..dim {
            let lo = ((k * (c + 3)) % 7) as i64;
            let hi = lo + 2 + ((k + c) % 3) as i64;
            z = z
                .with_constraint(c, 0, Bound::le(hi))
                .unwrap()
                .with_constraint(0, c, Bound::le(-lo))
                .unwrap();
        }
        out.push(z);
    }
    out
}

fn bench_zone_ops(c: &mut Criterion) {
    let boxes = box_grid(4, 16);
    c.bench_function("zone-intersect", |b| {
        b.iter(|| {
            for a in &boxes {
                for z in &boxes {
                    criterion::black_box(a.intersect(z));
                }
            }
        })
    });
    c.bench_function("zone-subtract", |b| {
        b.iter(|| {
            for a in &boxes {
                for z in &boxes {
                    criterion::black_box(a.subtract(z));
                }
            }
        })
    });
    c.bench_function("zone-up-down", |b| {
        b.iter(|| {
            for a in &boxes {
                criterion::black_box(a.up());
                criterion::black_box(a.down());
            }
        })
    });
}

fn bench_federation_ops(c: &mut Criterion) {
    let boxes = box_grid(4, 24);
    let half = Federation::from_zones(4, boxes[..12].to_vec());
    let rest = Federation::from_zones(4, boxes[12..].to_vec());
    c.bench_function("federation-union", |b| {
        b.iter(|| criterion::black_box(half.union(&rest)))
    });
    c.bench_function("federation-subtract", |b| {
        b.iter(|| criterion::black_box(half.subtract(&rest)))
    });
    c.bench_function("federation-include", |b| {
        b.iter(|| criterion::black_box(half.includes(&rest)))
    });
}

criterion_group!(benches, bench_zone_ops, bench_federation_ops);
criterion_main!(benches);
