use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use stokesfem::assembly::{restrict_square, restrict_vector, Discretization, Form, Target};
use stokesfem::elements::{ElementConfig, SpaceKind};
use stokesfem::polyalg::{monomials_upto, poincare2, qi, Poly, VecPoly};
use stokesfem::problems::{pcg, solve_stokes, QuadCurlForcing, SeparableField, SolverOptions, StokesProblem};

fn cfg(r: usize, k: usize) -> ElementConfig {
    ElementConfig::new(r, k).unwrap()
}

fn dense_poly(deg: usize) -> Poly {
    let mut p = Poly::zero();
    for (i, e) in monomials_upto(deg).into_iter().enumerate() {
        p.add_term(e, qi(i as i64 % 7 - 3));
    }
    p
}

fn poincare(c: &mut Criterion) {
    let u = VecPoly::new(dense_poly(5), dense_poly(4), dense_poly(5));
    let w = [qi(1), qi(0), qi(-1)];
    c.bench_function("poincare2 degree 5", |b| b.iter(|| poincare2(black_box(&u), &w)));
}

fn assembly(c: &mut Criterion) {
    let mut g = c.benchmark_group("assembly");
    g.sample_size(10);
    g.bench_function("discretization N=2 (1,1)", |b| {
        b.iter(|| Discretization::structured(2, cfg(1, 1)).unwrap())
    });
    let d = Discretization::structured(4, cfg(1, 1)).unwrap();
    g.bench_function("grad-curl matrix N=4 (1,1)", |b| b.iter(|| d.assemble(Form::GradCurl)));
    let u = SeparableField::quadcurl_solution();
    g.bench_function("V interpolation N=4 (1,1)", |b| {
        b.iter(|| d.interpolate(SpaceKind::V, Target::Vector(&u)))
    });
    g.finish();
}

fn solvers(c: &mut Criterion) {
    let mut g = c.benchmark_group("solvers");
    g.sample_size(10);
    let d = Discretization::structured(4, cfg(1, 1)).unwrap();
    let map = d.map(SpaceKind::V);
    let a = restrict_square(&d.assemble(Form::GradCurl), map);
    let u = SeparableField::quadcurl_solution();
    let rhs = restrict_vector(&d.load(SpaceKind::V, Target::Vector(&QuadCurlForcing(&u))), map);
    let opts = SolverOptions::default();
    g.bench_function("quad-curl PCG N=4 (1,1)", |b| b.iter(|| pcg(&a, &rhs, &opts).unwrap()));
    let problem = StokesProblem {
        n: 2,
        k: 1,
        viscosity: 1.0,
        solver: opts,
        quadrature: None,
    };
    g.bench_function("Stokes N=2 k=1", |b| b.iter(|| solve_stokes(&problem).unwrap()));
    g.finish();
}

criterion_group!(benches, poincare, assembly, solvers);
criterion_main!(benches);
