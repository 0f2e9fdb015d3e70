use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use ciequil_core::equations::equation_system;
use ciequil_core::equilibria::{
    fixture, newton_solve, solve_one_edge_exact, solve_one_edge_f64, verify_ci_equilibrium, NewtonOptions, DEFAULT_TOL,
};
use ciequil_core::Graph;

fn two_stage(c: &mut Criterion) {
    let fx = fixture("beats-nash-4-2-2").unwrap();
    let mut group = c.benchmark_group("two_stage_4x2x2");
    group.bench_function("rational", |b| {
        b.iter(|| solve_one_edge_exact(black_box(&fx.game), (1, 2), DEFAULT_TOL).unwrap())
    });
    group
        .bench_function("double", |b| b.iter(|| solve_one_edge_f64(black_box(&fx.game), (1, 2), DEFAULT_TOL).unwrap()));
    group.finish();
}

fn newton(c: &mut Criterion) {
    let fx = fixture("pareto-2-2-2").unwrap();
    let sys = equation_system(&fx.game, &Graph::from_edges_1based(3, &[(2, 3)]).unwrap()).unwrap();
    let opts = NewtonOptions { starts: 16, ..NewtonOptions::default() };
    let mut group = c.benchmark_group("newton");
    group.sample_size(20);
    group.bench_function("pareto_16_starts", |b| b.iter(|| newton_solve(black_box(&sys), &opts).unwrap()));
    group.finish();
}

fn verification(c: &mut Criterion) {
    let fx = fixture("el-farol-3/4").unwrap();
    let fam = fx.family("G3").unwrap();
    let x = fam.samples(1).remove(0);
    let p = fam.eval_exact(&fx.game.format, &x).unwrap();
    let pf = p.map(ciequil_core::Scalar::to_f64);
    let gf = fx.game.to_f64();
    let mut group = c.benchmark_group("verify_complete_graph");
    group.bench_function("rational", |b| {
        b.iter(|| verify_ci_equilibrium(&fx.game, &fam.graph, black_box(&p), DEFAULT_TOL).unwrap())
    });
    group.bench_function("double", |b| {
        b.iter(|| verify_ci_equilibrium(&gf, &fam.graph, black_box(&pf), DEFAULT_TOL).unwrap())
    });
    group.finish();
}

criterion_group!(benches, two_stage, newton, verification);
criterion_main!(benches);
