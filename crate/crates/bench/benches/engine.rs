use criterion::{criterion_group, criterion_main, Criterion};
use hopfdeform_core::demos::{EXAMPLE4_PSI, LOOPSPACE_ALGEBRA};
use hopfdeform_core::gs::tridegrees_up_to;
use hopfdeform_core::transfer::parse_pins;
use hopfdeform_core::{
    bar_basis, d_squared_check, decide_triviality, example4_report, parse_cochain, parse_presentation, transfer, Pin,
    Pipeline,
};

fn bar_construction(c: &mut Criterion) {
    let algebra = parse_presentation(LOOPSPACE_ALGEBRA).unwrap();
    c.bench_function("bar basis, loop space, cap 8", |b| b.iter(|| bar_basis(&algebra, 8).unwrap()));
    c.bench_function("homology pipeline, loop space, cap 8", |b| b.iter(|| Pipeline::loopspace(8).unwrap()));
}

fn cohomology(c: &mut Criterion) {
    let p = Pipeline::example4(8).unwrap();
    let psi = parse_cochain(EXAMPLE4_PSI, &p.host).unwrap();
    let omega = hopfdeform_core::total_d(&p.host, &psi, 8).unwrap();
    c.bench_function("total differential of psi, cap 8", |b| {
        b.iter(|| hopfdeform_core::total_d(&p.host, &psi, 8).unwrap())
    });
    c.bench_function("triviality decision, example4", |b| b.iter(|| decide_triviality(&p.host, &omega, 8).unwrap()));
    let mut group = c.benchmark_group("slow");
    group.sample_size(10);
    group.bench_function("D squared, 10 cochains, window 5", |b| {
        b.iter(|| d_squared_check(&p.host, &tridegrees_up_to(4, -2..=0), 5, 10, 0))
    });
    group.bench_function("example4 demo", |b| b.iter(|| example4_report(8, false)));
    group.finish();
}

fn transfer_order4(c: &mut Criterion) {
    let p = Pipeline::loopspace(8).unwrap();
    let pins: Vec<Pin> = parse_pins("pin g 2 1 : beta beta -> [a2|a3]\n", &p).unwrap();
    let mut group = c.benchmark_group("slow");
    group.sample_size(10);
    group.bench_function("order-4 transfer, loop space, cap 8", |b| {
        b.iter(|| transfer(&p, pins.clone()).unwrap().omega_cochain().unwrap())
    });
    group.finish();
}

criterion_group!(benches, bar_construction, cohomology, transfer_order4);
criterion_main!(benches);
