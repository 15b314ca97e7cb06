use std::hint::black_box;

use casimir_core::dfs::DEFAULT_CLUSTER_TOL;
use casimir_core::invariants::{all_invariants, collective_j2, completeness_probe};
use casimir_core::{
    build_basis, collective_set, compute_structure_tensors, decompose, exchange_gate, verify_identities,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn structure(c: &mut Criterion) {
    let mut g = c.benchmark_group("structure_tensors");
    for d in [3, 4, 6] {
        let basis = build_basis(d).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(d), &basis, |b, basis| {
            b.iter(|| compute_structure_tensors(black_box(basis)))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("verify_identities");
    g.sample_size(10);
    for d in [3, 5] {
        let basis = build_basis(d).unwrap();
        let tensors = compute_structure_tensors(&basis);
        g.bench_function(BenchmarkId::from_parameter(d), |b| {
            b.iter(|| verify_identities(black_box(&tensors), &basis, 1e-10).unwrap())
        });
    }
    g.finish();
}

fn many_body(c: &mut Criterion) {
    let mut g = c.benchmark_group("collective");
    for (d, n) in [(2, 8), (3, 5)] {
        let basis = build_basis(d).unwrap();
        g.bench_function(format!("set_d{d}_n{n}"), |b| {
            b.iter(|| collective_set(&basis, black_box(n)).unwrap())
        });
        let set = collective_set(&basis, n).unwrap();
        g.bench_function(format!("j2_d{d}_n{n}"), |b| {
            b.iter(|| collective_j2(black_box(&set)).unwrap())
        });
    }
    let basis = build_basis(3).unwrap();
    let tensors = compute_structure_tensors(&basis);
    g.bench_function("invariants_d3_n3", |b| {
        b.iter(|| all_invariants(&basis, &tensors, black_box(3)).unwrap())
    });
    g.bench_function("exchange_gate_d4_n3", |b| {
        let basis = build_basis(4).unwrap();
        b.iter(|| exchange_gate(&basis, 0, 1, black_box(3)).unwrap())
    });
    g.finish();
}

fn decomposition(c: &mut Criterion) {
    let mut g = c.benchmark_group("decompose");
    g.sample_size(10);
    for (d, n) in [(2, 6), (3, 3), (4, 3)] {
        let set = collective_set(&build_basis(d).unwrap(), n).unwrap();
        g.bench_function(format!("d{d}_n{n}"), |b| {
            b.iter(|| decompose(black_box(&set), DEFAULT_CLUSTER_TOL).unwrap())
        });
    }
    g.finish();

    let basis = build_basis(3).unwrap();
    let tensors = compute_structure_tensors(&basis);
    c.bench_function("completeness_d3", |b| {
        b.iter(|| completeness_probe(&basis, &tensors, black_box(0)).unwrap())
    });
}

criterion_group!(benches, structure, many_body, decomposition);
criterion_main!(benches);
