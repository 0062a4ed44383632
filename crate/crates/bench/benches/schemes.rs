use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sharpshock::glimm::{Glimm, GlimmConfig};
use sharpshock::presets::Preset;
use sharpshock::schemes::{init_average, step, SchemeConfig, SchemeKind};
use sharpshock::{FluxSpec, KineticFunction, RiemannSolver};

fn riemann(c: &mut Criterion) {
    let fs = FluxSpec::cubic_plus();
    let kf = KineticFunction::linear(0.75).unwrap();
    let solver = RiemannSolver::nonclassical(&fs, &kf).unwrap();
    let mut g = c.benchmark_group("riemann");
    for (name, ul, ur) in [("shock", 4.0, 3.0), ("rarefaction-shock", 4.0, -2.0), ("nonclassical", 4.0, -5.0)] {
        g.bench_function(name, |b| b.iter(|| solver.solve(black_box(ul), black_box(ur)).unwrap()));
    }
    g.finish();
}

fn fv_step(c: &mut Criterion) {
    let spec = Preset::TestE.spec();
    let kinetics = spec.kinetics().unwrap();
    let mut g = c.benchmark_group("step");
    for cells in [100, 1000] {
        let gs = init_average(&spec.initial, spec.domain, cells, spec.boundary).unwrap();
        for kind in [SchemeKind::Upwind, SchemeKind::Reconstruction] {
            let cfg = SchemeConfig::new(kind, spec.flux.clone(), kinetics.clone());
            g.bench_with_input(BenchmarkId::new(format!("{kind:?}"), cells), &gs, |b, gs| {
                b.iter(|| step(&cfg, black_box(gs)).unwrap())
            });
        }
        let mut glimm = Glimm::new(GlimmConfig::new(spec.flux.clone(), kinetics.clone())).unwrap();
        g.bench_with_input(BenchmarkId::new("Glimm", cells), &gs, |b, gs| {
            b.iter(|| glimm.step(black_box(gs), 1, f64::INFINITY).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, riemann, fv_step);
criterion_main!(benches);
