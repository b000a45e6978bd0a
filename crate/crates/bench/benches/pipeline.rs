use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use emergence_core::{
    build_vacuum, integrate_trajectory, kg_residual, lattice_shell_sum, shell_average, state_norm,
    BerezinConvention, BoostVariant, BoostedFrame, Branch, Complex64, CovarianceMatrix, FieldProfile,
    Grid, ModeBasis, ProfileModel, ProfileVariant, ResidualRegion, ShellSpec, SignConvention,
};

fn covariance(n: usize) -> CovarianceMatrix {
    CovarianceMatrix::from_fn(n, |i, j| {
        let k = (i * n + j) as f64;
        Complex64::new((0.7 * k + 0.3).sin(), (1.3 * k).cos() * 0.5)
    })
}

fn grassmann(c: &mut Criterion) {
    let mut g = c.benchmark_group("grassmann");
    for n in 1..=4 {
        let omega = covariance(n);
        g.bench_with_input(BenchmarkId::new("state_norm", n), &omega, |b, omega| {
            b.iter(|| state_norm(black_box(omega), BerezinConvention::Paired).unwrap())
        });
    }
    let basis = ModeBasis::new(60.0, 1.0)
        .unwrap()
        .with_mode([0, 0, 0], Branch::particle(0))
        .unwrap()
        .with_mode([1, -1, 2], Branch::antiparticle(1))
        .unwrap()
        .with_mode([0, 1, 0], Branch::particle(0))
        .unwrap();
    let omega = basis.covariance(SignConvention::EnergyConsistent);
    g.bench_function("build_vacuum/3", |b| b.iter(|| build_vacuum(black_box(&basis), &omega).unwrap()));
    g.finish();
}

fn dynamics(c: &mut Criterion) {
    let omega = 2f64.sqrt();
    c.bench_function("integrate_trajectory/10_periods", |b| {
        b.iter(|| integrate_trajectory(Complex64::new(0.6, 0.0), omega, 20.0 * PI / omega, 1e-3).unwrap())
    });
}

fn synth(c: &mut Criterion) {
    let mut g = c.benchmark_group("synth");
    for order in [16, 32] {
        g.bench_with_input(BenchmarkId::new("shell_average", order), &order, |b, &order| {
            b.iter(|| shell_average(1.0, black_box([0.3, -0.8, 1.7]), order).unwrap())
        });
    }
    g.sample_size(10);
    g.bench_function("lattice_shell_sum/L=30", |b| {
        b.iter(|| lattice_shell_sum(1.0, 0.1, 30.0, black_box([0.3, -0.8, 1.7])).unwrap())
    });

    let spec = ShellSpec::new(1.0, 60.0).unwrap();
    let frame = BoostedFrame::new(0.6, BoostVariant::Substitution).unwrap();
    let boosted = ProfileModel::boosted(spec, ProfileVariant::UnitRatio, frame);
    let region = ResidualRegion::standard();
    g.bench_function("kg_residual/boosted", |b| {
        b.iter(|| kg_residual(black_box(&boosted), 1.0, 0.05, &region).unwrap())
    });
    let grid: Grid = "-2:2:21,-2:2:21,-2:2:21,1.5".parse().unwrap();
    g.bench_function("boost_profile/21^3", |b| {
        b.iter(|| FieldProfile::sample(boosted, grid.points()))
    });
    g.finish();
}

criterion_group!(benches, grassmann, dynamics, synth);
criterion_main!(benches);
