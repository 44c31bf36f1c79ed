use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use toric_bench::{field, matrix, square};
use toric_core::codes::primal_code_of;
use toric_core::stats::{mode, ModeConfig};
use toric_core::{dmin_primal_bruteforce, exceptional_simplex, lawrence_prism};

fn field_ops(c: &mut Criterion) {
    for q in [256u64, 243, 4096] {
        let f = field(q);
        let elems: Vec<_> = f.elements().collect();
        c.bench_function(&format!("gf{q}_mul_add_sweep"), |b| {
            b.iter(|| {
                let mut acc = f.one();
                for &x in &elems {
                    acc = f.add(f.mul(acc, x), x);
                }
                black_box(acc)
            })
        });
        c.bench_function(&format!("gf{q}_inv_sweep"), |b| {
            b.iter(|| {
                elems
                    .iter()
                    .filter_map(|&x| f.inv(x))
                    .fold(f.zero(), |a, y| f.add(a, y))
            })
        });
    }
}

fn rref(c: &mut Criterion) {
    let a = matrix(&square(4), 16);
    c.bench_function("rref_225x25_gf16", |b| b.iter(|| black_box(a.matrix().rref().rank)));
    let a = matrix(&exceptional_simplex(), 64);
    c.bench_function("rank_3969x6_gf64", |b| b.iter(|| black_box(a.rank())));
}

fn primal_bruteforce(c: &mut Criterion) {
    let mut group = c.benchmark_group("primal_bruteforce");
    group.sample_size(10);
    let code = primal_code_of(&matrix(&lawrence_prism(&[1, 2]).unwrap(), 5));
    group.bench_function("L(1,2)_gf5", |b| {
        b.iter(|| dmin_primal_bruteforce(&code, u64::MAX).unwrap().dmin)
    });
    let code = primal_code_of(&matrix(&exceptional_simplex(), 7));
    group.bench_function("Delta2_gf7", |b| {
        b.iter(|| dmin_primal_bruteforce(&code, u64::MAX).unwrap().dmin)
    });
    group.finish();
}

fn mode_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("mode");
    group.sample_size(10);
    let a = matrix(&square(2), 7);
    let cfg = ModeConfig {
        exhaustive_threshold: 0,
        samples: 200,
        seed: 0,
        max_extension: 3,
    };
    group.bench_function("square2_gf7_s7_200", |b| b.iter(|| mode(&a, 7, &cfg).unwrap().mode));
    let a = matrix(&exceptional_simplex(), 11);
    group.bench_function("Delta2_gf11_s4_200", |b| b.iter(|| mode(&a, 4, &cfg).unwrap().mode));
    group.finish();
}

criterion_group!(benches, field_ops, rref, primal_bruteforce, mode_sampling);
criterion_main!(benches);
