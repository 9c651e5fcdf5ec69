//! Compares the rayon-parallel grid map against the always-sequential
//! baseline on the two hot loops: self-energy sweeps over an ω-grid and
//! Bloch-band diagonalization over a k-grid.
//!
//! Run with `cargo bench -p gla-core`. Building with
//! `--no-default-features` makes `map_grid` itself sequential, so the two
//! series collapse — the comparison is meaningful in the default build.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use gla_core::bath::{build_chain, BlochSpec, Boundary};
use gla_core::emitters::GiantAtom;
use gla_core::greens::{richardson, ResolventEngine};
use gla_core::linalg;
use gla_core::par::{map_grid, map_grid_seq};

fn self_energy_sweep(c: &mut Criterion) {
    let bath = build_chain(1201, 1.0, 0.0, Boundary::Open).unwrap();
    let eng = ResolventEngine::new(&bath).unwrap();
    let atom = GiantAtom::uniform(0.0, 0.1, &[600, 602]).unwrap();
    let cchi = eng.project(&atom.chi_sparse());
    let eps = eng.default_epsilon();
    let grid: Vec<f64> = (0..512).map(|i| -1.9 + 3.8 * i as f64 / 511.0).collect();
    let eval = |w: &f64| richardson(|e| eng.self_energy_kernel(*w, e, &cchi), eps);

    let mut group = c.benchmark_group("self_energy_sweep");
    group.bench_with_input(BenchmarkId::new("parallel", grid.len()), &grid, |b, g| {
        b.iter(|| map_grid(g, eval))
    });
    group.bench_with_input(BenchmarkId::new("sequential", grid.len()), &grid, |b, g| {
        b.iter(|| map_grid_seq(g, eval))
    });
    group.finish();
}

fn bloch_grid(c: &mut Criterion) {
    let spec = BlochSpec::lieb_nnn(1.0);
    let nk = 48usize;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut ks: Vec<[f64; 2]> = Vec::with_capacity(nk * nk);
    for a in 0..nk {
        for b in 0..nk {
            ks.push([two_pi * a as f64 / nk as f64, two_pi * b as f64 / nk as f64]);
        }
    }
    let eval = |k: &[f64; 2]| -> f64 {
        let h = spec.h_k(*k);
        linalg::eigh_complex(&h).unwrap().0[0]
    };

    let mut group = c.benchmark_group("bloch_grid");
    group.bench_with_input(BenchmarkId::new("parallel", ks.len()), &ks, |b, g| {
        b.iter(|| map_grid(g, eval).iter().sum::<f64>())
    });
    group.bench_with_input(BenchmarkId::new("sequential", ks.len()), &ks, |b, g| {
        b.iter(|| map_grid_seq(g, eval).iter().sum::<f64>())
    });
    group.finish();
}

fn quench_ensemble(c: &mut Criterion) {
    // batch of independent short quenches (per-configuration parallelism)
    let configs: Vec<usize> = (0..8).map(|i| 2 + i).collect();
    let eval = |&d: &usize| -> f64 {
        let bath = build_chain(401, 1.0, 0.0, Boundary::Open).unwrap();
        let atom = GiantAtom::uniform(0.0, 0.1, &[200, 200 + d]).unwrap();
        let ens = gla_core::emitters::EmitterEnsemble::new(bath, vec![atom]).unwrap();
        let r = gla_core::dynamics::exact_1ex_evolve(
            &ens,
            &[Complex64::new(1.0, 0.0)],
            10.0,
            11,
        )
        .unwrap();
        r.atom_populations[[10, 0]]
    };
    let mut group = c.benchmark_group("quench_batch");
    group.sample_size(10);
    group.bench_with_input(BenchmarkId::new("parallel", configs.len()), &configs, |b, g| {
        b.iter(|| map_grid(g, eval).iter().sum::<f64>())
    });
    group.bench_with_input(BenchmarkId::new("sequential", configs.len()), &configs, |b, g| {
        b.iter(|| map_grid_seq(g, eval).iter().sum::<f64>())
    });
    group.finish();
}

criterion_group!(benches, self_energy_sweep, bloch_grid, quench_ensemble);
criterion_main!(benches);
