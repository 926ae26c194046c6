use std::f64::consts::{PI, TAU};

use aqst::protocol::{derived_correction, sample_successes_with, PartyRoles};
use aqst::qcore::StateVector;
use aqst::sweep::{fidelity_curve, linspace, secular_sweep, CurveSpec};
use aqst::Execution;
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn modes() -> Vec<(&'static str, Execution)> {
    let mut modes = vec![("sequential", Execution::Sequential)];
    if cfg!(feature = "parallel") {
        modes.push(("parallel", Execution::Parallel));
    }
    modes
}

fn bench_fidelity_curve(c: &mut Criterion) {
    let spec = CurveSpec {
        roles: PartyRoles::alice_to_bob(),
        gammas: [0.01; 3],
        k1: 0,
        correction: derived_correction(0),
        thetas: linspace(0.0, TAU, 32),
        taus: linspace(0.0, PI, 33),
    };
    let mut group = c.benchmark_group("fidelity_curve_32x33");
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| fidelity_curve(exec, black_box(&spec)).unwrap())
        });
    }
    group.finish();
}

fn bench_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_successes_1e6");
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sample_successes_with(exec, black_box(0.5), 1_000_000, 7))
        });
    }
    group.finish();
}

fn bench_secular_sweep(c: &mut Criterion) {
    let psi = StateVector::basis_state("egg").unwrap();
    let ratios = [0.1, 0.03, 0.01, 0.003];
    let mut group = c.benchmark_group("secular_sweep");
    group.sample_size(20);
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| secular_sweep(exec, 1.0, black_box(&ratios), 201, &psi).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_fidelity_curve, bench_sampling, bench_secular_sweep);
criterion_main!(benches);
