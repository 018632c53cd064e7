//! Each kernel runs once on a single-thread rayon pool and once on the global
//! pool. Built with `--no-default-features` both rows are sequential.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPool;
use wulffkit::caustic::{caustic, symmetry_set};
use wulffkit::convexity::build_dual_body;
use wulffkit::perturbation::{perturb, shared};
use wulffkit::sphere_fn::critical_points;
use wulffkit::stability::StabilityConfig;
use wulffkit::{corpus, SolverConfig};

fn pools() -> Vec<(&'static str, ThreadPool)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("sequential", one), ("parallel", all)]
}

fn run<F: Fn() + Sync>(c: &mut Criterion, group: &str, f: F) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| pool.install(&f)));
    }
    g.finish();
}

fn hull(c: &mut Criterion) {
    let s1 = corpus::ellipse_dual(2.0, 1.0);
    let s2 = corpus::ellipsoid_dual(3.0, 2.0, 1.0);
    run(c, "hull_s1_20000", || {
        black_box(build_dual_body(&s1, 20_000).unwrap());
    });
    run(c, "hull_s2_4000", || {
        black_box(build_dual_body(&s2, 4000).unwrap());
    });
}

fn census(c: &mut Criterion) {
    let f = corpus::ellipsoid_dual(3.0, 2.0, 1.0);
    let cfg = SolverConfig::default();
    run(c, "critical_points_s2", || {
        black_box(critical_points(&f, &cfg).unwrap());
    });
}

fn geometry(c: &mut Criterion) {
    let f = corpus::ellipse_dual(2.0, 1.0);
    run(c, "caustic_s1_2000", || {
        black_box(caustic(&f, 2000));
    });
    run(c, "symmetry_set_s1_1000", || {
        black_box(symmetry_set(&f, 1000, 1e-8).unwrap());
    });
}

fn perturbation(c: &mut Criterion) {
    let gamma = shared(corpus::ellipsoid_dual(3.0, 2.0, 1.0));
    let cfg = StabilityConfig::default();
    run(c, "perturb_s2", || {
        black_box(perturb(gamma.clone(), &[0.1, -0.05, 0.02], 2000, &cfg).unwrap());
    });
}

criterion_group!(benches, hull, census, geometry, perturbation);
criterion_main!(benches);
