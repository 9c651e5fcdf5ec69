//! Regression battery: each row re-derives one pinned physical result and
//! compares it against its closed-form value. The battery doubles as the
//! release gate (`gla regress`) and as the acceptance integration test.

use std::time::Instant;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use gla_core::bath::{
    band_structure, build_chain, build_graphene, build_lieb_nnn, build_square, BathGraph,
    BlochSpec, Boundary, SiteLabel,
};
use gla_core::boundstates::{
    find_inband_bs, find_ingap_bs, pole_function, vds_dressed_state, vds_search,
};
use gla_core::dynamics::{
    dfh_check, lindblad_evolve, rates_green, rates_infinite_chain, rates_spectral,
    two_point_gamma12_closed, two_point_gamma_closed, two_point_k12_closed,
};
use gla_core::emitters::{EmitterEnsemble, GiantAtom};
use gla_core::error::Result;
use gla_core::greens::{BlochProfile, ResolventEngine};
use gla_core::linalg::invert_complex;

use crate::config::{Config, ScenarioName};
use crate::scenario::{build_scenario, k_eff_of, lieb_site, validate_lieb_length};

#[derive(Clone, Debug, Serialize)]
pub struct RegressRow {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

/// Run the full battery. Failures are data, not errors: rows that hit an
/// internal error report it in `detail` with `pass = false`.
pub fn run_all() -> Vec<RegressRow> {
    let rows: Vec<(usize, &'static str, fn() -> Result<(bool, String)>)> = vec![
        (1, "honeycomb 3-point vacancy state", row1),
        (2, "honeycomb 4-point pair coupling", row2),
        (3, "chain braided pair rates", row3),
        (4, "chain serial/nested null coupling", row4),
        (5, "square braided/nested pair", row5),
        (6, "Lieb string pair", row6),
        (7, "Lieb string length family", row7),
        (8, "two-point decay-rate surface", row8),
        (9, "resolvent identity vs dense inverse", row9),
        (10, "in-gap root uniqueness", row10),
        (11, "single-point emitter in-band null", row11),
        (12, "rate-route consistency", row12),
        (13, "master-equation sanity", row13),
        (14, "vacancy-state pinning and fractional decay", row14),
    ];
    rows.into_iter()
        .map(|(id, name, f)| {
            let t0 = Instant::now();
            let (pass, detail) = match f() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            RegressRow { id, name, pass, detail, seconds: t0.elapsed().as_secs_f64() }
        })
        .collect()
}

pub fn print_table(rows: &[RegressRow]) {
    for r in rows {
        println!(
            "[{}] {:>2}  {:<45} {:>6.2}s  {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.name,
            r.seconds,
            r.detail
        );
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    println!(
        "{} rows, {} passed, {} failed",
        rows.len(),
        rows.len() - failed,
        failed
    );
}

fn cell(i: i64, j: i64, sub: u8) -> SiteLabel {
    SiteLabel::Cell { cell: [i as i32, j as i32], sub }
}

fn site(bath: &BathGraph, label: SiteLabel) -> usize {
    bath.index_of(&label).expect("site on lattice")
}

/// |⟨a|b⟩|² for normalized vectors.
fn fidelity(a: &Array1<Complex64>, b: &Array1<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr()
}

// Row 1: three-point emitter on the honeycomb lattice seeds a vacancy state
// at the band-touching energy, photonically localized on the enclosed cavity.
fn row1() -> Result<(bool, String)> {
    let cfg = Config::for_scenario(ScenarioName::Graphene3);
    let built = build_scenario(&cfg)?;
    let atom = &built.atoms[0];
    let vds = match vds_search(&built.bath, atom)? {
        Some(v) => v,
        None => return Ok((false, "no vacancy state found".into())),
    };
    let dressed = vds_dressed_state(&built.bath, atom, &vds);
    let center = site(&built.bath, cell(15, 15, 0));
    let mut theory: Array1<Complex64> = Array1::zeros(built.bath.n_sites());
    theory[center] = Complex64::new(1.0, 0.0);
    let fid = fidelity(&theory, &vds.state);
    let pass = vds.energy.abs() <= 1e-12
        && dressed.residual <= 1e-8 * built.j
        && fid >= 1.0 - 1e-8;
    Ok((pass, format!(
        "energy {:.2e}, residual {:.2e}, center fidelity 1-{:.2e}",
        vds.energy,
        dressed.residual,
        1.0 - fid
    )))
}

// Row 2: four-point emitter at ω₀ = ω_c + J; the vacancy state is the
// symmetric dimer combination with coupling √2·J, and the shifted pair gives
// an effective coupling of exactly g²/J.
fn row2() -> Result<(bool, String)> {
    let cfg = Config::for_scenario(ScenarioName::Graphene4);
    let built = build_scenario(&cfg)?;
    let atom = &built.atoms[0];
    let vds = match vds_search(&built.bath, atom)? {
        Some(v) => v,
        None => return Ok((false, "no vacancy state found".into())),
    };
    let c_err = (vds.c.norm() - 2.0f64.sqrt() * built.j).abs();
    // symmetric dimer state on the enclosed A/B pair of cell (15, 15)
    let mut theory: Array1<Complex64> = Array1::zeros(built.bath.n_sites());
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    theory[site(&built.bath, cell(15, 15, 0))] = amp;
    theory[site(&built.bath, cell(15, 15, 1))] = amp;
    let fid = fidelity(&theory, &vds.state);
    let engine = ResolventEngine::new(&built.bath)?;
    let k_eff = k_eff_of(&built, &engine)?;
    let k_expect = built.g * built.g / built.j;
    let k_err = (k_eff[[0, 1]].norm() - k_expect).abs() / k_expect;
    let pass = c_err <= 1e-10 && fid >= 1.0 - 1e-8 && k_err <= 1e-6;
    Ok((pass, format!(
        "|c|-√2J = {c_err:.2e}, dimer fidelity 1-{:.2e}, K12 rel err {k_err:.2e}",
        1.0 - fid
    )))
}

// Row 3: braided two-point pair at band center (k₀d = π): γ eigenvalues below
// the decoherence threshold and K₁₂ = (2g²/v)·sin k₀x₂₁ on both backends.
fn row3() -> Result<(bool, String)> {
    let cfg = Config::for_scenario(ScenarioName::WaveguideBraided);
    let built = build_scenario(&cfg)?;
    let engine = ResolventEngine::new(&built.bath)?;
    let rates = rates_green(&engine, &built.atoms)?;
    let geig = rates.gamma_eigenvalues()?;
    let gb2 = built.atoms[0].g_bar().powi(2);
    let dfh_tol = 1e-3 * gb2 * 8.0 / engine.dec.span();
    let gmax = geig.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    // k₀ = π/2, v = 2J: K₁₂ = g²·sin(π/2) = g²
    let k_expect = built.g * built.g;
    let k_fin = rates.k[[0, 1]].re;
    let positions = built.chain_positions.clone().expect("waveguide positions");
    let rm_inf = rates_infinite_chain(built.j, 0.0, &built.atoms, &positions)?;
    let k_inf = rm_inf.k[[0, 1]].re;
    let pass = gmax <= dfh_tol
        && (k_fin - k_expect).abs() / k_expect <= 0.02
        && (k_inf - k_expect).abs() <= 1e-10;
    Ok((pass, format!(
        "γ_max {gmax:.2e} (tol {dfh_tol:.2e}), K12 finite rel err {:.2e}, analytic err {:.2e}",
        (k_fin - k_expect).abs() / k_expect,
        (k_inf - k_expect).abs()
    )))
}

// Row 4: serial and nested pairs are decoherence-free with zero coupling;
// the nested zero comes from an explicit interference cancellation.
fn row4() -> Result<(bool, String)> {
    let mut detail = String::new();
    let mut pass = true;
    for name in [ScenarioName::WaveguideSerial, ScenarioName::WaveguideNested] {
        let mut cfg = Config::for_scenario(name);
        cfg.params.cells = Some(401);
        let built = build_scenario(&cfg)?;
        let engine = ResolventEngine::new(&built.bath)?;
        let dfh = dfh_check(&built.bath, &engine, &built.atoms)?;
        let k12 = dfh.k_eff[[0, 1]].norm();
        let tol = 1e-6 * built.g * built.g / built.j;
        pass &= dfh.is_dfh && k12 <= tol;
        detail.push_str(&format!("{}: dfh {}, |K12| {:.2e}; ", name.as_str(), dfh.is_dfh, k12));
        if name == ScenarioName::WaveguideNested {
            // cancellation: the outer emitter's vacancy state has equal
            // amplitudes on the inner emitter's two coupling points, so the
            // antisymmetric profile ⟨χ₂|ψ₁⟩ vanishes identically.
            let vds = vds_search(&built.bath, &built.atoms[0])?
                .ok_or_else(|| gla_core::error::Error::Internal("nested seed missing".into()))?;
            let overlap: Complex64 = built.atoms[1]
                .chi_sparse()
                .iter()
                .map(|&(s, a)| a.conj() * vds.state[s])
                .sum();
            pass &= overlap.norm() <= 1e-10;
            detail.push_str(&format!("cancellation ⟨χ₂|ψ₁⟩ = {:.2e}", overlap.norm()));
        }
    }
    Ok((pass, detail))
}

// Row 5: square-lattice cross pairs at band center: braided K₁₂ = g²/J on the
// Green's-function backend, nested K₁₂ = 0 exactly on the bound-state route.
fn row5() -> Result<(bool, String)> {
    let cfg = Config::for_scenario(ScenarioName::SquareBraided);
    let built = build_scenario(&cfg)?;
    let engine = ResolventEngine::new(&built.bath)?;
    let rates = rates_green(&engine, &built.atoms)?;
    let k_expect = built.g * built.g / built.j;
    let k_err = (rates.k[[0, 1]].re.abs() - k_expect).abs() / k_expect;

    let cfg2 = Config::for_scenario(ScenarioName::SquareNested);
    let built2 = build_scenario(&cfg2)?;
    let engine2 = ResolventEngine::new(&built2.bath)?;
    let k_eff2 = k_eff_of(&built2, &engine2)?;
    let k12_nested = k_eff2[[0, 1]].norm();
    let tol = 1e-6 * k_expect;
    let pass = k_err <= 0.02 && k12_nested <= tol;
    Ok((pass, format!(
        "braided K12 rel err {k_err:.2e}, nested |K12| {k12_nested:.2e} (tol {tol:.2e})"
    )))
}

// Row 6: Lieb string pair: vacancy state at −J with the alternating ±1/2
// amplitude pattern, parallel pair |K₁₂| = g²/J, perpendicular pair zero.
fn row6() -> Result<(bool, String)> {
    let cfg = Config::for_scenario(ScenarioName::LiebPair);
    let built = build_scenario(&cfg)?;
    let atom = &built.atoms[0];
    let vds = match vds_search(&built.bath, atom)? {
        Some(v) => v,
        None => return Ok((false, "no vacancy state found".into())),
    };
    // string runs x = 5..=11 at y = 8; interior pattern (1, −1, 0, 1, −1)/2
    let mut theory: Array1<Complex64> = Array1::zeros(built.bath.n_sites());
    for (x, s) in [(6i64, 1.0), (7, -1.0), (9, 1.0), (10, -1.0)] {
        theory[lieb_site(&built.bath, x, 8)?] = Complex64::new(0.5 * s, 0.0);
    }
    let fid = fidelity(&theory, &vds.state);
    let engine = ResolventEngine::new(&built.bath)?;
    let k_eff = k_eff_of(&built, &engine)?;
    let k_expect = built.g * built.g / built.j;
    let k_err = (k_eff[[0, 1]].norm() - k_expect).abs() / k_expect;

    let cfg2 = Config::for_scenario(ScenarioName::LiebMismatched);
    let built2 = build_scenario(&cfg2)?;
    let engine2 = ResolventEngine::new(&built2.bath)?;
    let k_eff2 = k_eff_of(&built2, &engine2)?;
    let k12_mm = k_eff2[[0, 1]].norm();

    let pass = (vds.energy + built.j).abs() <= 1e-10
        && fid >= 1.0 - 1e-8
        && k_err <= 0.02
        && k12_mm <= 1e-6 * k_expect;
    Ok((pass, format!(
        "energy {:.6}, pattern fidelity 1-{:.2e}, K12 rel err {k_err:.2e}, mismatched |K12| {k12_mm:.2e}",
        vds.energy,
        1.0 - fid
    )))
}

// Row 7: the Lieb string supports a vacancy state only for interior lengths
// 5 + 6ν; off-family lengths are rejected at validation time.
fn row7() -> Result<(bool, String)> {
    let mut detail = String::new();
    let mut pass = true;
    for len in [5usize, 11, 17] {
        let mut cfg = Config::for_scenario(ScenarioName::LiebPair);
        cfg.params.length = Some(len);
        let built = build_scenario(&cfg)?;
        let found = vds_search(&built.bath, &built.atoms[0])?
            .map(|v| (v.energy + built.j).abs() <= 1e-10)
            .unwrap_or(false);
        pass &= found;
        detail.push_str(&format!("len {len}: vds {found}; "));
    }
    for len in [7usize, 9] {
        let rejected = validate_lieb_length(len).is_err();
        pass &= rejected;
        detail.push_str(&format!("len {len}: rejected {rejected}; "));
    }
    Ok((pass, detail))
}

// Row 8: single two-point emitter decay surface γ(θ, k₀d) against the closed
// form (2ḡ²/v)(1 + sin 2θ · cos k₀d), plus quadratic flatness at the
// stationary point (θ = π/4, k₀d = π).
fn row8() -> Result<(bool, String)> {
    use std::f64::consts::PI;
    let j = 1.0;
    let gbar = 0.05;
    let bath = build_chain(2001, j, 0.0, Boundary::Open)?;
    let engine = ResolventEngine::new(&bath)?;
    let x0 = 998usize;
    let scale = 2.0 * gbar * gbar / (2.0 * j); // max of the surface / 2
    let mut max_fin = 0.0f64;
    let mut max_inf = 0.0f64;
    // ω₀ = 0 fixes k₀ = π/2, so k₀d ∈ {π/2, π, 3π/2} ↔ d ∈ {1, 2, 3}
    for &theta in &[0.0, PI / 8.0, PI / 4.0, 3.0 * PI / 8.0, PI / 2.0] {
        for d in [1i64, 2, 3] {
            let (g1, g2) = (gbar * theta.cos(), gbar * theta.sin());
            let atom = GiantAtom::new(
                0.0,
                vec![
                    (x0, Complex64::new(g1, 0.0)),
                    (x0 + d as usize, Complex64::new(g2, 0.0)),
                ],
            )?;
            let expect = gbar * gbar * two_point_gamma_closed(j, PI / 2.0, theta, d);
            let rm = rates_green(&engine, std::slice::from_ref(&atom))?;
            max_fin = max_fin.max((rm.gamma[[0, 0]].re - expect).abs() / scale);
            let pos = vec![vec![
                (0i64, Complex64::new(theta.cos(), 0.0)),
                (d, Complex64::new(theta.sin(), 0.0)),
            ]];
            let rm_inf = rates_infinite_chain(j, 0.0, std::slice::from_ref(&atom), &pos)?;
            max_inf = max_inf.max((rm_inf.gamma[[0, 0]].re - expect).abs() / scale);
        }
    }
    // quadratic robustness at (θ, k₀) = (π/4, π/2) with d = 2: both first
    // differences vanish, both second differences are positive
    let gamma_at = |theta: f64, k0: f64| -> Result<f64> {
        let omega0 = -2.0 * j * k0.cos();
        let atom = GiantAtom::new(
            omega0,
            vec![
                (x0, Complex64::new(gbar * theta.cos(), 0.0)),
                (x0 + 2, Complex64::new(gbar * theta.sin(), 0.0)),
            ],
        )?;
        let pos = vec![vec![
            (0i64, Complex64::new(theta.cos(), 0.0)),
            (2, Complex64::new(theta.sin(), 0.0)),
        ]];
        Ok(rates_infinite_chain(j, 0.0, std::slice::from_ref(&atom), &pos)?.gamma[[0, 0]].re)
    };
    let h = 1e-3;
    let f0 = gamma_at(PI / 4.0, PI / 2.0)?;
    let (ft_p, ft_m) = (gamma_at(PI / 4.0 + h, PI / 2.0)?, gamma_at(PI / 4.0 - h, PI / 2.0)?);
    let (fk_p, fk_m) = (gamma_at(PI / 4.0, PI / 2.0 + h)?, gamma_at(PI / 4.0, PI / 2.0 - h)?);
    let d1_theta = (ft_p - ft_m) / (2.0 * h) / scale;
    let d1_k = (fk_p - fk_m) / (2.0 * h) / scale;
    let d2_theta = (ft_p - 2.0 * f0 + ft_m) / (h * h) / scale;
    let d2_k = (fk_p - 2.0 * f0 + fk_m) / (h * h) / scale;
    let pass = max_fin <= 0.02
        && max_inf <= 1e-10
        && d1_theta.abs() <= 1e-4
        && d1_k.abs() <= 1e-4
        && d2_theta > 0.0
        && d2_k > 0.0;
    Ok((pass, format!(
        "finite max err {max_fin:.2e}, analytic max err {max_inf:.2e}, \
         stationary d1 ({d1_theta:.1e}, {d1_k:.1e}), d2 ({d2_theta:.2}, {d2_k:.2})"
    )))
}

// Row 9: the rank-one resolvent assembly reproduces the dense inverse
// (z − H)⁻¹ at random complex z to max-entry 1e-10.
fn row9() -> Result<(bool, String)> {
    let bath = build_chain(101, 1.0, 0.0, Boundary::Open)?;
    let engine = ResolventEngine::new(&bath)?;
    let atom = GiantAtom::new(
        0.3,
        vec![
            (30, Complex64::new(0.2, 0.0)),
            (50, Complex64::new(0.15, 0.1)),
            (71, Complex64::new(-0.1, 0.05)),
        ],
    )?;
    let ens = EmitterEnsemble::new(bath.clone(), vec![atom.clone()])?;
    let h = ens.total_hamiltonian_1ex();
    let dim = h.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut max_err = 0.0f64;
    for _ in 0..10 {
        let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..1.5));
        let assembled = engine.total_green(&atom, z)?.assembled(&engine);
        let mut zmh = h.mapv(|x| -x);
        for i in 0..dim {
            zmh[[i, i]] += z;
        }
        let inv = invert_complex(&zmh)?;
        let err = assembled
            .iter()
            .zip(inv.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        max_err = max_err.max(err);
    }
    Ok((max_err <= 1e-10, format!("max entry deviation {max_err:.2e} over 10 random z")))
}

// Row 10: the pole function F is strictly increasing outside the spectrum, so
// each gap holds at most one root; verified on randomized emitters on all
// four lattices.
fn row10() -> Result<(bool, String)> {
    let baths = vec![
        ("chain", build_chain(64, 1.0, 0.0, Boundary::Open)?),
        ("honeycomb", build_graphene(6, 6, 1.0, 0.0, Boundary::Open)?),
        ("square", build_square(7, 7, 1.0, 0.0, Boundary::Open)?),
        ("lieb", build_lieb_nnn(5, 5, 1.0, Boundary::Open)?),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut detail = String::new();
    let mut pass = true;
    for (name, bath) in &baths {
        let engine = ResolventEngine::new(bath)?;
        let n = bath.n_sites();
        let lam_min = engine.dec.eigenvalues[0];
        let lam_max = engine.dec.eigenvalues[engine.n() - 1];
        let span = engine.dec.span();
        let mut roots_found = 0usize;
        for _ in 0..50 {
            let n_pts = rng.gen_range(2..=4usize);
            let mut sites = std::collections::BTreeSet::new();
            while sites.len() < n_pts {
                sites.insert(rng.gen_range(0..n));
            }
            let couplings: Vec<(usize, Complex64)> = sites
                .into_iter()
                .map(|s| (s, Complex64::new(0.05 * rng.gen_range(0.2..1.0), 0.0)))
                .collect();
            let below = rng.gen_bool(0.5);
            let u = rng.gen_range(0.05..1.5);
            let w0 = if below { lam_min - u } else { lam_max + u };
            let atom = GiantAtom::new(w0, couplings)?;
            let gb = atom.g_bar();
            // keep the scan grid a safe margin away from the band edge; the
            // root finder itself nudges its endpoints off-spectrum
            let (lo, hi) = if below {
                (w0 - 2.0 * gb - span, lam_min - 1e-5 * span)
            } else {
                (lam_max + 1e-5 * span, w0 + 2.0 * gb + span)
            };
            // F strictly increasing on the gap grid, at most one sign change
            let mut prev: Option<f64> = None;
            let mut sign_changes = 0usize;
            let mut monotone = true;
            for i in 0..100 {
                let w = lo + (hi - lo) * i as f64 / 99.0;
                let f = pole_function(&engine, &atom, w)?;
                if let Some(p) = prev {
                    if f <= p {
                        monotone = false;
                    }
                    if (f > 0.0) != (p > 0.0) {
                        sign_changes += 1;
                    }
                }
                prev = Some(f);
            }
            let root = find_ingap_bs(&engine, bath, &atom, lo, hi)?;
            let ok = monotone && sign_changes <= 1 && root.is_some();
            if let Some(bs) = &root {
                roots_found += 1;
                if bs.residual > 1e-7 {
                    pass = false;
                }
            }
            pass &= ok;
        }
        detail.push_str(&format!("{name}: 50 configs, {roots_found} single roots; "));
    }
    Ok((pass, detail))
}

// Row 11: a single-point emitter can never bind inside the band — the
// in-band scan comes back empty for randomized chain configurations.
fn row11() -> Result<(bool, String)> {
    let bath = build_chain(201, 1.0, 0.0, Boundary::Open)?;
    let engine = ResolventEngine::new(&bath)?;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut pass = true;
    for _ in 0..20 {
        let s = rng.gen_range(20..180usize);
        let g = rng.gen_range(0.01..0.1);
        let w0 = rng.gen_range(-1.9..1.9);
        let atom = GiantAtom::new(w0, vec![(s, Complex64::new(g, 0.0))])?;
        let found = find_inband_bs(&engine, &atom, -1.8, 1.8, 400)?;
        pass &= found.iter().all(|c| !c.bound);
    }
    Ok((pass, "20 randomized single-point emitters, no in-band bound state".into()))
}

// Row 12: the three rate backends (finite lattice + extrapolation, infinite
// chain, Bloch spectral) agree mutually and with the closed forms at a
// generic in-band point.
fn row12() -> Result<(bool, String)> {
    use std::f64::consts::PI;
    let (j, g) = (1.0, 0.05);
    let gbar = 2.0f64.sqrt() * g;
    let w0 = -1.0; // k₀ = π/3, v = √3·J
    let k0 = PI / 3.0;
    let (d, x21) = (2i64, 1i64);
    let c = 998usize;
    let bath = build_chain(2001, j, 0.0, Boundary::Open)?;
    let engine = ResolventEngine::new(&bath)?;
    let a1 = GiantAtom::uniform(w0, g, &[c, c + d as usize])?;
    let a2 = GiantAtom::uniform(w0, g, &[c + x21 as usize, c + (x21 + d) as usize])?;
    let atoms = [a1.clone(), a2.clone()];
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let pos = vec![
        vec![(0i64, amp), (d, amp)],
        vec![(x21, amp), (x21 + d, amp)],
    ];
    let rm_fin = rates_green(&engine, &atoms)?;
    let rm_inf = rates_infinite_chain(j, 0.0, &atoms, &pos)?;
    let bands = band_structure(&BlochSpec::chain(j, 0.0), 4001)?;
    let profiles = [BlochProfile::chain(&pos[0]), BlochProfile::chain(&pos[1])];
    let rm_sp = rates_spectral(&bands, &profiles, &[gbar, gbar], w0)?;
    let gb2 = gbar * gbar;
    let expect = [
        gb2 * two_point_gamma_closed(j, k0, PI / 4.0, d),
        gb2 * two_point_gamma12_closed(j, k0, PI / 4.0, d, x21),
        gb2 * two_point_k12_closed(j, k0, PI / 4.0, d, x21),
    ];
    let scale = expect.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut max_err = 0.0f64;
    let mut per_backend = String::new();
    for (name, rm) in [("finite", &rm_fin), ("analytic", &rm_inf), ("spectral", &rm_sp)] {
        let got = [rm.gamma[[0, 0]].re, rm.gamma[[0, 1]].re, rm.k[[0, 1]].re];
        let mut backend_err = 0.0f64;
        for (g_i, e_i) in got.iter().zip(expect.iter()) {
            backend_err = backend_err.max((g_i - e_i).abs() / scale);
        }
        per_backend.push_str(&format!("{name} {backend_err:.2e} "));
        max_err = max_err.max(backend_err);
    }
    Ok((max_err <= 0.02, format!("deviation of scale per backend: {per_backend}")))
}

// Row 13: master-equation sanity — exponential decay for a dissipative
// emitter, trace preservation, and undamped coherent exchange for a
// decoherence-free pair.
fn row13() -> Result<(bool, String)> {
    // (a) single-point emitter at band center: γ = 2g²/v
    let (j, g) = (1.0, 0.1);
    let bath = build_chain(2001, j, 0.0, Boundary::Open)?;
    let engine = ResolventEngine::new(&bath)?;
    let atom = GiantAtom::new(0.0, vec![(1000, Complex64::new(g, 0.0))])?;
    let rm = rates_green(&engine, std::slice::from_ref(&atom))?;
    let gamma_cl = 2.0 * g * g / (2.0 * j);
    let t_max = 5.0 / gamma_cl;
    let psi0 = Array1::from_vec(vec![Complex64::new(1.0, 0.0)]);
    let k1 = Array2::from_elem((1, 1), rm.k[[0, 0]]);
    let lr = lindblad_evolve(&k1, &rm.gamma, &psi0, t_max, 201)?;
    let mut max_rel = 0.0f64;
    for (it, &t) in lr.times.iter().enumerate() {
        let expect = (-gamma_cl * t).exp();
        max_rel = max_rel.max((lr.populations[[it, 0]] - expect).abs() / expect);
    }
    let drift_rate = lr.trace_drift / t_max;

    // (b) decoherence-free pair: population exchange cos²(K₁₂t), no damping
    let k12 = g * g;
    let mut k2: Array2<Complex64> = Array2::zeros((2, 2));
    k2[[0, 1]] = Complex64::new(k12, 0.0);
    k2[[1, 0]] = Complex64::new(k12, 0.0);
    let gamma2: Array2<Complex64> = Array2::zeros((2, 2));
    let mut psi2 = Array1::zeros(2);
    psi2[0] = Complex64::new(1.0, 0.0);
    let t2 = 4.0 * std::f64::consts::PI / k12;
    let lr2 = lindblad_evolve(&k2, &gamma2, &psi2, t2, 401)?;
    let mut max_dev = 0.0f64;
    let mut max_loss = 0.0f64;
    for (it, &t) in lr2.times.iter().enumerate() {
        let expect = (k12 * t).cos().powi(2);
        max_dev = max_dev.max((lr2.populations[[it, 0]] - expect).abs());
        let total = lr2.populations[[it, 0]] + lr2.populations[[it, 1]];
        max_loss = max_loss.max((1.0 - total).abs());
    }
    let pass = max_rel <= 0.02 && drift_rate <= 1e-8 && max_dev <= 1e-6 && max_loss <= 1e-6;
    Ok((pass, format!(
        "decay rel err {max_rel:.2e}, trace drift {drift_rate:.2e}/t, \
         exchange dev {max_dev:.2e}, amplitude loss {max_loss:.2e}"
    )))
}

// Row 14: vacancy states stay exact eigenstates at every coupling strength,
// and the strong-coupling quench plateaus at the state's atomic weight⁴.
fn row14() -> Result<(bool, String)> {
    let mut detail = String::new();
    let mut pass = true;
    // exactness across coupling strengths, on all three vacancy families
    for gv in [0.05f64, 0.5, 1.0] {
        // chain, two-point, d = 2
        let bath = build_chain(401, 1.0, 0.0, Boundary::Open)?;
        let atom = GiantAtom::uniform(0.0, gv, &[199, 201])?;
        pass &= vds_residual_ok(&bath, &atom)?;
        // honeycomb, three-point
        let bg = build_graphene(15, 15, 1.0, 0.0, Boundary::Open)?;
        let ga = GiantAtom::uniform(
            0.0,
            gv,
            &[
                site(&bg, cell(7, 7, 1)),
                site(&bg, cell(6, 7, 1)),
                site(&bg, cell(7, 6, 1)),
            ],
        )?;
        pass &= vds_residual_ok(&bg, &ga)?;
        // Lieb string, length 5
        let bl = build_lieb_nnn(9, 9, 1.0, Boundary::Open)?;
        let la = GiantAtom::new(
            -1.0,
            vec![
                (lieb_site(&bl, 5, 8)?, Complex64::new(gv, 0.0)),
                (lieb_site(&bl, 11, 8)?, Complex64::new(-gv, 0.0)),
            ],
        )?;
        pass &= vds_residual_ok(&bl, &la)?;
    }
    detail.push_str(&format!("exact at g ∈ {{0.05, 0.5, 1.0}}: {pass}; "));
    // Strong-coupling fractional decay on the Lieb string (the one geometry
    // here with no extra out-of-band bound states at g = J): the quench
    // plateau sits at the dressed state's atomic weight⁴ = cos⁴θ.
    // Target weight comes from the vacancy search on a small lattice; the
    // quench runs on a large one so the emitted wave never returns.
    let gq = 1.0;
    let bl = build_lieb_nnn(9, 9, 1.0, Boundary::Open)?;
    let la = GiantAtom::new(
        -1.0,
        vec![
            (lieb_site(&bl, 5, 8)?, Complex64::new(gq, 0.0)),
            (lieb_site(&bl, 11, 8)?, Complex64::new(-gq, 0.0)),
        ],
    )?;
    let vds = vds_search(&bl, &la)?
        .ok_or_else(|| {
            gla_core::error::Error::Internal("vacancy state not found on Lieb string".into())
        })?;
    let target = vds_dressed_state(&bl, &la, &vds).atom_amplitude.norm().powi(4);
    let bq = build_lieb_nnn(61, 61, 1.0, Boundary::Open)?;
    let aq = GiantAtom::new(
        -1.0,
        vec![
            (lieb_site(&bq, 57, 60)?, Complex64::new(gq, 0.0)),
            (lieb_site(&bq, 63, 60)?, Complex64::new(-gq, 0.0)),
        ],
    )?;
    let ens = EmitterEnsemble::new(bq, vec![aq])?;
    let qr = gla_core::dynamics::exact_1ex_evolve(&ens, &[Complex64::new(1.0, 0.0)], 120.0, 241)?;
    let late: Vec<f64> = qr
        .times
        .iter()
        .zip(0..)
        .filter(|(&t, _)| t >= 60.0)
        .map(|(_, it)| qr.atom_populations[[it, 0]])
        .collect();
    let plateau = late.iter().sum::<f64>() / late.len() as f64;
    let plateau_err = (plateau - target).abs() / target;
    pass &= plateau_err <= 0.03;
    detail.push_str(&format!(
        "quench plateau {plateau:.4} vs weight⁴ {target:.4} (rel err {plateau_err:.2e})"
    ));
    Ok((pass, detail))
}

fn vds_residual_ok(bath: &BathGraph, atom: &GiantAtom) -> Result<bool> {
    let vds = match vds_search(bath, atom)? {
        Some(v) => v,
        None => return Ok(false),
    };
    let dressed = vds_dressed_state(bath, atom, &vds);
    Ok(dressed.residual <= 1e-8)
}
