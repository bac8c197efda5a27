use criterion::{black_box, criterion_group, criterion_main, Criterion};
use singbvp::pipeline::{parse_forcing, prepare, quad_solution, CompiledKernel, PAPER_FORCING};
use singbvp::quad::QuadOptions;
use singbvp::ClosedForm;
use singbvp_bench::{ivp_two_point, kirchhoff, simple};

fn construction(c: &mut Criterion) {
    let mut g = c.benchmark_group("prepare");
    for (name, spec) in [("simple", simple()), ("ivp-two-point", ivp_two_point()), ("kirchhoff", kirchhoff())] {
        g.bench_function(name, |b| b.iter(|| prepare(black_box(&spec)).unwrap()));
    }
    g.finish();
}

fn exact_solution(c: &mut Criterion) {
    let p = prepare(&simple()).unwrap();
    let f = singbvp::expr::parse_expr("1 + 2*x - x^5").unwrap();
    c.bench_function("green/simple/closed", |b| b.iter(|| p.problem.solve_closed(black_box(&f)).unwrap()));
}

fn quadrature(c: &mut Criterion) {
    let opts = QuadOptions::default();
    let p = prepare(&simple()).unwrap();
    let k = CompiledKernel::new(&p.kernel, 0);
    let one = ClosedForm::one();
    c.bench_function("quad/simple/x=0.5", |b| b.iter(|| quad_solution(&p, &k, &one, black_box(0.5), opts).unwrap()));

    let p = prepare(&kirchhoff()).unwrap();
    let k = CompiledKernel::new(&p.kernel, 0);
    let f = parse_forcing(PAPER_FORCING).unwrap();
    c.bench_function("quad/kirchhoff/rho=0.45", |b| b.iter(|| quad_solution(&p, &k, &f, black_box(0.45), opts).unwrap()));
}

criterion_group!(benches, construction, exact_solution, quadrature);
criterion_main!(benches);
