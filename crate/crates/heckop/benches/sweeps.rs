//! Parallel vs sequential for the two sweeps that dominate a report run.
//! On a single core the two should be close; the gap shows rayon overhead.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use heckop::catalog::lookup;
use heckop::hypergeom::{verify_estimate, EstimateGrid};
use heckop::par;
use heckop::quadrature::TorusGrid;
use heckop::transform::{forward_transform, make_bump};
use heckop::weights::enumerate_lambda_l;

const MODES: [(&str, bool); 2] = [("parallel", false), ("sequential", true)];

fn estimate(c: &mut Criterion) {
    let rd = lookup("AIII:p=1,q=2").unwrap().root_datum().unwrap();
    let grid = EstimateGrid { points: 40, ..EstimateGrid::default() };
    let mut g = c.benchmark_group("verify_estimate");
    g.sample_size(10);
    for (name, seq) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            par::set_sequential(seq);
            b.iter(|| verify_estimate(&rd, &rd.mult, &grid, 0.3));
        });
    }
    par::set_sequential(false);
    g.finish();
}

fn transform(c: &mut Criterion) {
    let rd = lookup("CI:j=2").unwrap().root_datum().unwrap();
    let grid = Arc::new(TorusGrid::with_resolution(2, 64, false).unwrap());
    let f = make_bump(&rd, 1, 0.6, grid).unwrap();
    let mus = enumerate_lambda_l(&rd, 1, 8);
    let mut g = c.benchmark_group("forward_transform");
    g.sample_size(10);
    for (name, seq) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            par::set_sequential(seq);
            b.iter(|| forward_transform(&rd, &f, &mus).unwrap());
        });
    }
    par::set_sequential(false);
    g.finish();
}

criterion_group!(benches, estimate, transform);
criterion_main!(benches);
