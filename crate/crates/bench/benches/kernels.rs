use borelsum_bench::euler_coeffs;
use borelsum_core::borel::{borel_pade_sum, borel_transform, pade_approximant};
use borelsum_core::harrydym::{hd_outer_coeffs, solve_hierarchy};
use borelsum_core::ilt::{laplace_convolve, picard_solve, GridFunction, NonlinearTerm, NonlinearitySpec};
use borelsum_core::p1::p1_formal_series;
use borelsum_core::singularities::{eta_singularities, StokesConstant};
use borelsum_core::SolverConfig;
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64 as C;

fn exact_series(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact");
    for n in [3usize, 6, 10] {
        g.bench_with_input(BenchmarkId::new("p1_formal_series", n), &n, |b, &n| {
            b.iter(|| p1_formal_series(black_box(n)).unwrap())
        });
    }
    for n in [2usize, 4, 6] {
        g.bench_with_input(BenchmarkId::new("hd_outer_coeffs", n), &n, |b, &n| {
            b.iter(|| hd_outer_coeffs(black_box(n)).unwrap())
        });
    }
    g.finish();
}

fn borel(c: &mut Criterion) {
    let cfg = SolverConfig::default();
    let a = euler_coeffs(20);
    let bt = borel_transform(&a);
    c.bench_function("pade 9/10", |b| b.iter(|| pade_approximant(black_box(&bt), 9, 10).unwrap()));
    c.bench_function("borel_pade_sum euler t=0.1", |b| {
        b.iter(|| borel_pade_sum(black_box(&a), C::new(0.1, 0.0), 0, 1, &cfg).unwrap())
    });
}

fn convolution(c: &mut Criterion) {
    let mut g = c.benchmark_group("laplace_convolve");
    for m in [100usize, 400, 1600] {
        let f = GridFunction::from_fn(4.0, m, |p| C::new((-p).exp(), 0.0));
        let h = GridFunction::from_fn(4.0, m, |p| C::new(p.cos(), p.sin()));
        g.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, _| {
            b.iter(|| laplace_convolve(black_box(&f), black_box(&h)).unwrap())
        });
    }
    g.finish();
}

fn picard(c: &mut Criterion) {
    let cfg = SolverConfig::default();
    let m = 200;
    let fi = GridFunction::from_fn(4.0, m, |p| C::new((-p).exp(), 0.0));
    let spec = NonlinearitySpec {
        terms: vec![NonlinearTerm {
            j: 0,
            k: 1,
            kernel: GridFunction::constant(4.0, m, C::new(0.1, 0.0)),
        }],
        forcing: None,
    };
    c.bench_function("picard quadratic m=200", |b| {
        b.iter(|| picard_solve(&fi, &spec, 0.1, 20, 1e-12, &cfg).unwrap())
    });
}

fn inner(c: &mut Criterion) {
    let cfg = SolverConfig::default();
    let mut g = c.benchmark_group("inner");
    g.sample_size(10);
    g.bench_function("hierarchy K=4 [2,50]", |b| {
        b.iter(|| solve_hierarchy(0.0, cfg.eta_max, cfg.eta_min, 4, &cfg).unwrap())
    });
    let k = StokesConstant::user(C::new(-2.44, -2.41)).unwrap();
    g.bench_function("eta_s n=1..40", |b| b.iter(|| eta_singularities(1..=40, &k, &cfg)));
    g.finish();
}

criterion_group!(benches, exact_series, borel, convolution, picard, inner);
criterion_main!(benches);
