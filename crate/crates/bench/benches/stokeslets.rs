use std::f64::consts::TAU;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rbfstokes::stokeslets::{evaluate_field, ForceSample};
use rbfstokes::{simulate, BlobModel, Simulation};

fn field_sum(c: &mut Criterion) {
    let mut group = c.benchmark_group("regularized_field");
    let blob = BlobModel::new(0.05, 1.0).unwrap();
    let markers: Vec<[f64; 2]> = (0..100).map(|i| [0.4 + 0.014 * i as f64, 0.2]).collect();
    for n in [50, 400, 1600] {
        let h = TAU / n as f64;
        let positions = (0..n).map(|j| [(j as f64 * h).cos(), (j as f64 * h).sin()]).collect();
        let densities = (0..n).map(|j| [-(j as f64 * h).sin(), (j as f64 * h).cos()]).collect();
        let forces = ForceSample::new(positions, densities, h).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| evaluate_field(black_box(&forces), &blob, &markers).unwrap())
        });
    }
    group.finish();
}

fn euler_step(c: &mut Criterion) {
    let closed = Simulation::new(&simulate::closed_relaxation_config()).unwrap();
    let circle = simulate::initial_closed(0.3, 3, closed.data_nodes()).unwrap();
    c.bench_function("closed_relaxation_step", |b| b.iter(|| closed.step(black_box(&circle)).unwrap()));

    let open = Simulation::new(&simulate::open_filament_config(0.01, -TAU)).unwrap();
    let filament = simulate::initial_open(0.01, open.data_nodes()).unwrap();
    c.bench_function("open_filament_step", |b| b.iter(|| open.step(black_box(&filament)).unwrap()));
}

criterion_group!(benches, field_sum, euler_step);
criterion_main!(benches);
