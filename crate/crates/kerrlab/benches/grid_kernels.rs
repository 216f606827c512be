//! Parallel against sequential on the two shapes of grid work the
//! certification does: an argmin over (r, Ξ) and a per-direction map.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use kerrlab::kerr_geometry::{new_params, BlackHoleParams, ModFunctions};
use kerrlab::multiplier_builder::{build_multipliers, CertGrid, Constants, MultiplierSet, Quadratic, Regime};
use kerrlab::par;
use kerrlab::phase_space::{partition_of_unity, FrequencyTriplet};

struct Fixture {
    p: BlackHoleParams,
    c: Constants,
    radii: Vec<f64>,
    dirs: Vec<FrequencyTriplet>,
    sets: Vec<Vec<(f64, MultiplierSet)>>,
}

fn sets_for(p: &BlackHoleParams, mods: &ModFunctions, c: &Constants, xi: &FrequencyTriplet) -> Vec<(f64, MultiplierSet)> {
    let chi = partition_of_unity(p, &xi.scaled(4.0 / xi.norm()), c.delta_f).unwrap();
    Regime::ALL
        .iter()
        .filter(|r| chi[r.index()] > 0.0)
        .filter_map(|&r| build_multipliers(p, mods, r, xi, c).ok().map(|s| (chi[r.index()], s)))
        .collect()
}

fn fixture(n_r: usize, n_dir: usize) -> Fixture {
    let p = new_params(0.9, 1.0).unwrap();
    let mods = ModFunctions::defaults(&p).unwrap();
    let c = Constants::hint(&p, 0.01);
    let grid = CertGrid::new(n_r, n_dir, n_dir);
    let radii = grid.radii(&p, &c);
    let dirs = grid.directions(&p);
    let sets = dirs.iter().map(|xi| sets_for(&p, &mods, &c, xi)).collect();
    Fixture { p, c, radii, dirs, sets }
}

/// Square-completion remainder at one (direction, radius) cell.
fn remainder(f: &Fixture, k: usize, i: usize) -> f64 {
    let mut q = Quadratic::ZERO;
    for (w, s) in &f.sets[k] {
        q.add_scaled(w * w, &s.quadratic(&f.p, f.radii[i]));
    }
    if q.d > 0.0 {
        q.remainder()
    } else {
        f64::NEG_INFINITY
    }
}

fn argmin_kernel(cr: &mut Criterion) {
    let mut g = cr.benchmark_group("argmin_remainder");
    for (n_r, n_dir) in [(100, 12), (400, 24)] {
        let f = fixture(n_r, n_dir);
        let n = f.radii.len() * f.dirs.len();
        let cell = |j: usize| remainder(&f, j / f.radii.len(), j % f.radii.len());
        g.bench_with_input(BenchmarkId::new("seq", n), &n, |b, &n| b.iter(|| black_box(par::argmin_seq(n, cell))));
        #[cfg(feature = "parallel")]
        g.bench_with_input(BenchmarkId::new("par", n), &n, |b, &n| b.iter(|| black_box(par::argmin_par(n, cell))));
    }
    g.finish();
}

fn map_kernel(cr: &mut Criterion) {
    let mut g = cr.benchmark_group("build_sets");
    for n_dir in [12, 24] {
        let f = fixture(10, n_dir);
        let mods = ModFunctions::defaults(&f.p).unwrap();
        let n = f.dirs.len();
        let build = |k: usize| sets_for(&f.p, &mods, &f.c, &f.dirs[k]).len();
        g.bench_with_input(BenchmarkId::new("seq", n), &n, |b, &n| b.iter(|| black_box(par::map_seq(n, build))));
        #[cfg(feature = "parallel")]
        g.bench_with_input(BenchmarkId::new("par", n), &n, |b, &n| b.iter(|| black_box(par::map_par(n, build))));
    }
    g.finish();
}

criterion_group!(benches, argmin_kernel, map_kernel);
criterion_main!(benches);
