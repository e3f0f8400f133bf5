use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mixed_mops::cd::kernel_grid;
use mixed_mops::factorization::{build_moment_matrix, build_moment_matrix_with, gauss_borel, MomentTable};
use mixed_mops::fixtures;
use mixed_mops::jacobi::jacobi_operator;
use mixed_mops::polynomials::LinearForms;
use mixed_mops::{Exec, Float, Rational};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn moments(c: &mut Criterion) {
    let f = fixtures::exp_pair();
    let mut group = c.benchmark_group("moments_quadrature");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, 10), |b| {
            b.iter(|| build_moment_matrix::<Float>(&f.setup, 10, 128, exec).unwrap())
        });
    }
    group.finish();
}

fn factorization(c: &mut Criterion) {
    let f = fixtures::staircase_rational();
    let g = build_moment_matrix::<Rational>(&f.setup, 24, (), Exec::Parallel).unwrap();
    let mut group = c.benchmark_group("gauss_borel_rational");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, 24), |b| b.iter(|| gauss_borel(&g.g, exec).unwrap()));
    }
    group.finish();

    let fp = gauss_borel(&g.g, Exec::Parallel).unwrap();
    let mut group = c.benchmark_group("jacobi_two_routes");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, 24), |b| {
            b.iter(|| jacobi_operator(&fp, &f.setup.comp1, &f.setup.comp2, exec))
        });
    }
    group.finish();
}

fn kernel(c: &mut Criterion) {
    let f = fixtures::hilbert();
    let table = MomentTable::<Rational>::new(&f.setup, ());
    let g = build_moment_matrix_with(&table, 12, Exec::Parallel).unwrap();
    let fp = gauss_borel(&g.g, Exec::Parallel).unwrap();
    let (_, _, band) = jacobi_operator(&fp, &f.setup.comp1, &f.setup.comp2, Exec::Parallel);
    let forms = LinearForms::new(&f.setup, &fp);
    let scales = fixtures::grid_scales(1, band.splitting_limit());
    let pairs = fixtures::grid_pairs(&f.setup);
    let mut group = c.benchmark_group("kernel_grid_rational");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, pairs.len() * scales.len()), |b| {
            b.iter(|| kernel_grid(&table, &band, &forms, &scales, &pairs, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, moments, factorization, kernel);
criterion_main!(benches);
