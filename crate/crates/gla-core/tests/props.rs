//! Property-based invariants: randomized inputs, structural guarantees.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use proptest::prelude::*;

use gla_core::bath::{build_chain, Boundary};
use gla_core::boundstates::{find_ingap_bs, pole_function};
use gla_core::dynamics::lindblad_evolve;
use gla_core::emitters::{EmitterEnsemble, GiantAtom};
use gla_core::greens::ResolventEngine;
use gla_core::linalg::{eigh_real, invert_complex};

fn symmetric(entries: Vec<f64>, n: usize) -> Array2<f64> {
    let mut a = Array2::zeros((n, n));
    let mut it = entries.into_iter();
    for i in 0..n {
        for j in i..n {
            let v = it.next().unwrap_or(0.0);
            a[[i, j]] = v;
            a[[j, i]] = v;
        }
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Real symmetric eigendecomposition: orthonormal basis, exact reconstruction.
    #[test]
    fn eigh_real_orthonormal_and_decomposes(
        n in 2usize..10,
        entries in prop::collection::vec(-1.0f64..1.0, 55),
    ) {
        let a = symmetric(entries, n);
        let (lam, v) = eigh_real(&a).unwrap();
        // VᵀV = I
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|r| v[[r, i]] * v[[r, j]]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - expect).abs() < 1e-10, "gram[{i},{j}] = {dot}");
            }
        }
        // A v_i = λ_i v_i
        for i in 0..n {
            for r in 0..n {
                let av: f64 = (0..n).map(|c| a[[r, c]] * v[[c, i]]).sum();
                prop_assert!((av - lam[i] * v[[r, i]]).abs() < 1e-9);
            }
        }
        // eigenvalues ascending
        for i in 1..n {
            prop_assert!(lam[i] >= lam[i - 1]);
        }
    }

    // The assembled emitter+bath resolvent equals the dense inverse of z − H.
    #[test]
    fn resolvent_matches_dense_inverse(
        length in 12usize..40,
        s1 in 0usize..12,
        g in 0.05f64..0.5,
        omega0 in -1.5f64..1.5,
        z_re in -3.0f64..3.0,
        z_im in 0.1f64..1.5,
    ) {
        let bath = build_chain(length, 1.0, 0.0, Boundary::Open).unwrap();
        let engine = ResolventEngine::new(&bath).unwrap();
        let atom = GiantAtom::uniform(omega0, g, &[s1 % length, (s1 + 5) % length]).unwrap();
        let z = Complex64::new(z_re, z_im);
        let assembled = engine.total_green(&atom, z).unwrap().assembled(&engine);
        let ens = EmitterEnsemble::new(bath, vec![atom]).unwrap();
        let h = ens.total_hamiltonian_1ex();
        let mut zmh = h.mapv(|x| -x);
        for i in 0..zmh.nrows() {
            zmh[[i, i]] += z;
        }
        let inv = invert_complex(&zmh).unwrap();
        let err = assembled
            .iter()
            .zip(inv.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        prop_assert!(err < 1e-10, "max deviation {err}");
    }

    // Outside the band the pole function is strictly increasing, so any
    // in-gap bound state is unique; when the scan brackets a sign change the
    // root solver must deliver it with a small eigen-residual.
    #[test]
    fn pole_function_monotone_above_band(
        g in 0.02f64..0.8,
        margin in 0.05f64..1.5,
        site in 10usize..50,
    ) {
        let bath = build_chain(61, 1.0, 0.0, Boundary::Open).unwrap();
        let engine = ResolventEngine::new(&bath).unwrap();
        let omega0 = 2.0 + margin;
        let atom = GiantAtom::uniform(omega0, g, &[site]).unwrap();
        let lo = 2.0 + 1e-4;
        let hi = omega0 + 3.0 * g;
        let mut prev = f64::NEG_INFINITY;
        for i in 0..50 {
            let w = lo + (hi - lo) * i as f64 / 49.0;
            let f = pole_function(&engine, &atom, w).unwrap();
            prop_assert!(f > prev, "F not increasing at ω = {w}");
            prev = f;
        }
        let bs = find_ingap_bs(&engine, &bath, &atom, lo, hi).unwrap();
        let bs = bs.expect("single emitter above the band always binds");
        prop_assert!(bs.residual < 1e-7, "residual {}", bs.residual);
        prop_assert!(bs.energy > 2.0);
    }

    // Master equation with γ = 0 is unitary in the emitter subspace: the
    // total population is conserved for any Hermitian coupling matrix.
    #[test]
    fn lindblad_preserves_trace_without_decay(
        k01_re in -0.5f64..0.5,
        k01_im in -0.5f64..0.5,
        k00 in -0.5f64..0.5,
        k11 in -0.5f64..0.5,
        c0 in 0.1f64..1.0,
    ) {
        let mut k: Array2<Complex64> = Array2::zeros((2, 2));
        k[[0, 0]] = Complex64::new(k00, 0.0);
        k[[1, 1]] = Complex64::new(k11, 0.0);
        k[[0, 1]] = Complex64::new(k01_re, k01_im);
        k[[1, 0]] = k[[0, 1]].conj();
        let gamma: Array2<Complex64> = Array2::zeros((2, 2));
        let norm = (c0 * c0 + (1.0 - c0) * (1.0 - c0)).sqrt();
        let psi0 = Array1::from_vec(vec![
            Complex64::new(c0 / norm, 0.0),
            Complex64::new((1.0 - c0) / norm, 0.0),
        ]);
        let res = lindblad_evolve(&k, &gamma, &psi0, 20.0, 101).unwrap();
        prop_assert!(res.trace_drift < 1e-8, "trace drift {}", res.trace_drift);
    }

    // Collective coupling normalization: ḡ² = Σ|g_ℓ|² and |χ| = 1.
    #[test]
    fn atom_profile_is_normalized(
        gs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6),
    ) {
        let couplings: Vec<(usize, Complex64)> = gs
            .iter()
            .enumerate()
            .map(|(i, &(re, im))| (2 * i, Complex64::new(re, im)))
            .collect();
        let sum_sq: f64 = gs.iter().map(|&(re, im)| re * re + im * im).sum();
        prop_assume!(sum_sq > 1e-12);
        let atom = GiantAtom::new(0.0, couplings).unwrap();
        prop_assert!((atom.g_bar() * atom.g_bar() - sum_sq).abs() < 1e-12 * sum_sq.max(1.0));
        let chi_norm: f64 = atom
            .chi_sparse()
            .iter()
            .map(|(_, c)| c.norm_sqr())
            .sum::<f64>()
            .sqrt();
        prop_assert!((chi_norm - 1.0).abs() < 1e-12);
    }
}
