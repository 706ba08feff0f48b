use ccbm_bench::{circle_data, circle_mesh};
use ccbm_core::fem::StokesOperators;
use ccbm_core::inverse::{descent_field, evaluate_shape, solve_state};
use criterion::{criterion_group, criterion_main, Criterion};

fn mesher(c: &mut Criterion) {
    c.bench_function("annulus mesh 100/70", |b| {
        b.iter(|| circle_mesh(0.3).unwrap())
    });
}

fn fem(c: &mut Criterion) {
    let mesh = circle_mesh(0.3).unwrap();
    let data = circle_data().unwrap();
    let ops = StokesOperators::new(&mesh);
    c.bench_function("operator assembly", |b| {
        b.iter(|| StokesOperators::new(&mesh))
    });
    c.bench_function("state assemble + LU", |b| {
        b.iter(|| solve_state(&mesh, &ops, 1.0, &data, &data.g).unwrap())
    });
    c.bench_function("cost + adjoint + gradient", |b| {
        b.iter(|| evaluate_shape(&mesh, 1.0, &data, &data.g).unwrap())
    });
    let ev = evaluate_shape(&mesh, 1.0, &data, &data.g).unwrap();
    c.bench_function("descent field", |b| {
        b.iter(|| descent_field(&mesh, &ev.gradient, 0.5).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = mesher, fem
}
criterion_main!(benches);
