//! Bound states of one emitter in a structured bath: poles in spectral gaps,
//! bound states inside the continuum, and the vacancy-like dressed states
//! that underlie them.
//!
//! The central objects are the pole function
//! F(ω) = ω − ω₀ − ḡ²⟨χ|G_B(ω)|χ⟩, whose real roots in a gap are bound-state
//! energies, and the χ-projected bath H_{B_χ} = Q H_B Q (Q projecting out the
//! coupling profile χ): a normalizable eigenstate of H_{B_χ} at ω₀ with
//! nonzero c = ⟨χ|H_B|ψ⟩ yields an *exact* dressed eigenstate
//! cosθ|e⟩ + e^{iφ}sinθ|ψ⟩ at every coupling strength, with
//! tanθ·e^{iφ} = −ḡ/c.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::bath::BathGraph;
use crate::emitters::GiantAtom;
use crate::error::{Error, Result};
use crate::greens::{richardson, ResolventEngine};
use crate::linalg::{self, Reflector};

/// Energy window for collecting the degenerate H_{B_χ} subspace at ω₀.
pub const E_TOL: f64 = 1e-8;
/// Minimum |⟨χ|H_B|ψ⟩| for a state to count as coupled.
pub const C_TOL: f64 = 1e-8;
/// Maximum probability weight on the lattice boundary for a state to count
/// as localized (finite-size proxy for normalizability).
pub const LOCALIZATION_TOL: f64 = 1e-6;

/// Single-excitation dressed state: emitter amplitude plus bath amplitudes.
#[derive(Clone, Debug)]
pub struct BoundState {
    pub energy: f64,
    pub atom_amplitude: Complex64,
    pub bath_amplitudes: Array1<Complex64>,
    /// ‖(H − E)ψ‖ for the full single-excitation Hamiltonian.
    pub residual: f64,
}

/// ‖(H − E)ψ‖ evaluated sparsely from the bath adjacency.
pub fn residual_1ex(
    bath: &BathGraph,
    atom: &GiantAtom,
    energy: f64,
    atom_amp: Complex64,
    bath_amps: &Array1<Complex64>,
) -> f64 {
    let n = bath.n_sites();
    let adj = bath.adjacency();
    // emitter row: (ω₀ − E)·a_e + Σ_ℓ conj(g_ℓ)·ψ(x_ℓ)
    let mut r_e = (atom.omega0 - energy) * atom_amp;
    for &(s, g) in &atom.couplings {
        r_e += g.conj() * bath_amps[s];
    }
    let mut sq = r_e.norm_sqr();
    // site rows: (ω_s − E)ψ_s + Σ_neighbors J ψ + g_s·a_e
    let mut drive: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
    for &(s, g) in &atom.couplings {
        drive[s] = g * atom_amp;
    }
    for s in 0..n {
        let mut r = (bath.frequencies[s] - energy) * bath_amps[s] + drive[s];
        for &(t, j) in &adj[s] {
            r += j * bath_amps[t];
        }
        sq += r.norm_sqr();
    }
    sq.sqrt()
}

// ---------------------------------------------------------------------------
// Gap bound states
// ---------------------------------------------------------------------------

/// F(ω) = ω − ω₀ − ḡ²⟨χ|G_B(ω)|χ⟩, defined for real ω away from the bath
/// spectrum. Real and strictly increasing between consecutive eigenvalues.
pub fn pole_function(engine: &ResolventEngine, atom: &GiantAtom, omega: f64) -> Result<f64> {
    let cchi = engine.project(&atom.chi_sparse());
    let g = engine.green_gap(omega, &cchi, &cchi)?;
    let gb = atom.g_bar();
    Ok(omega - atom.omega0 - gb * gb * g.re)
}

/// dF/dω = 1 + ḡ²Σ_m |c_m|²/(ω − λ_m)² ≥ 1 (positivity ⇒ at most one root
/// per gap).
pub fn pole_function_derivative(
    engine: &ResolventEngine,
    atom: &GiantAtom,
    omega: f64,
) -> Result<f64> {
    let cchi = engine.project(&atom.chi_sparse());
    let guard = 1e-9 * engine.dec.span().max(f64::MIN_POSITIVE);
    if engine.dec.distance_to_spectrum(omega) < guard {
        return Err(Error::PoleProximity(format!("ω = {omega} too close to the spectrum")));
    }
    let gb2 = atom.g_bar().powi(2);
    let mut d = 1.0;
    for m in 0..engine.n() {
        let dm = omega - engine.dec.eigenvalues[m];
        d += gb2 * cchi[m].norm_sqr() / (dm * dm);
    }
    Ok(d)
}

/// Locate the (unique, if any) root of F in the open interval (lo, hi), which
/// must not contain bath eigenvalues. Returns the normalized dressed state.
pub fn find_ingap_bs(
    engine: &ResolventEngine,
    bath: &BathGraph,
    atom: &GiantAtom,
    lo: f64,
    hi: f64,
) -> Result<Option<BoundState>> {
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("empty bracket [{lo}, {hi}]")));
    }
    // Nudge the endpoints inward until the evaluation is safely off-spectrum.
    let step = (hi - lo) * 1e-6;
    let eval_in = |mut w: f64, dir: f64| -> Result<(f64, f64)> {
        for _ in 0..40 {
            match pole_function(engine, atom, w) {
                Ok(f) => return Ok((w, f)),
                Err(Error::PoleProximity(_)) => w += dir * step,
                Err(e) => return Err(e),
            }
        }
        Err(Error::PoleProximity(format!("no clean evaluation point near {w}")))
    };
    let (mut a, fa) = eval_in(lo, 1.0)?;
    let (mut b, fb) = eval_in(hi, -1.0)?;
    if fa == 0.0 {
        return Ok(Some(bs_wavefunction(engine, bath, atom, a)?));
    }
    if fb == 0.0 {
        return Ok(Some(bs_wavefunction(engine, bath, atom, b)?));
    }
    if fa.signum() == fb.signum() {
        return Ok(None);
    }
    let (mut fa, _fb) = (fa, fb);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (b - a).abs() < 1e-14 * mid.abs().max(1.0) {
            break;
        }
        let fm = pole_function(engine, atom, mid)?;
        if fm == 0.0 {
            a = mid;
            break;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let root = 0.5 * (a + b);
    Ok(Some(bs_wavefunction(engine, bath, atom, root)?))
}

/// Normalized bound-state wavefunction at a pole energy E:
/// ψ ∝ |e⟩ + ḡ G_B(E)|χ⟩.
pub fn bs_wavefunction(
    engine: &ResolventEngine,
    bath: &BathGraph,
    atom: &GiantAtom,
    energy: f64,
) -> Result<BoundState> {
    let cchi = engine.project(&atom.chi_sparse());
    let guard = 1e-9 * engine.dec.span().max(f64::MIN_POSITIVE);
    if engine.dec.distance_to_spectrum(energy) < guard {
        return Err(Error::PoleProximity(format!(
            "bound-state energy {energy} collides with a bath eigenvalue"
        )));
    }
    let z = Complex64::new(energy, 0.0);
    let gchi = engine.apply_green_dense(z, &cchi);
    let gb = atom.g_bar();
    let mut bath_amps = gchi.mapv(|x| gb * x);
    let mut norm_sq = 1.0 + bath_amps.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let norm = norm_sq.sqrt();
    let atom_amp = Complex64::new(1.0 / norm, 0.0);
    bath_amps.mapv_inplace(|c| c / norm);
    norm_sq = atom_amp.norm_sqr() + bath_amps.iter().map(|c| c.norm_sqr()).sum::<f64>();
    debug_assert!((norm_sq - 1.0).abs() < 1e-12);
    let residual = residual_1ex(bath, atom, energy, atom_amp, &bath_amps);
    Ok(BoundState { energy, atom_amplitude: atom_amp, bath_amplitudes: bath_amps, residual })
}

// ---------------------------------------------------------------------------
// Vacancy-like dressed states (bound states in the continuum)
// ---------------------------------------------------------------------------

/// Normalizable eigenstate of the χ-projected bath at the emitter frequency.
#[derive(Clone, Debug)]
pub struct Vds {
    pub energy: f64,
    /// Bath-space state, normalized, with ⟨χ|ψ⟩ = 0.
    pub state: Array1<Complex64>,
    /// c = ⟨χ|H_B|ψ⟩ — the only matrix element connecting ψ to the emitter.
    pub c: Complex64,
    pub boundary_weight: f64,
    /// Dimension of the degenerate H_{B_χ} subspace the state was drawn from.
    pub degeneracy: usize,
}

/// Sites on the lattice boundary: coordination number below the maximum of
/// their own sublattice class (boundary weight of a state is summed there).
pub fn boundary_sites(bath: &BathGraph) -> Vec<usize> {
    use crate::bath::SiteLabel;
    let adj = bath.adjacency();
    let class = |l: &SiteLabel| -> i64 {
        match l {
            SiteLabel::Linear(_) => -1,
            SiteLabel::Cell { sub, .. } => *sub as i64,
        }
    };
    let mut max_coord: std::collections::BTreeMap<i64, usize> = std::collections::BTreeMap::new();
    for (i, l) in bath.site_labels.iter().enumerate() {
        let e = max_coord.entry(class(l)).or_insert(0);
        *e = (*e).max(adj[i].len());
    }
    (0..bath.n_sites())
        .filter(|&i| adj[i].len() < max_coord[&class(&bath.site_labels[i])])
        .collect()
}

/// χ-projected bath Hamiltonian: the (n−1)×(n−1) block of H_w H_B H_w on the
/// complement of χ, together with the reflector for lifting states back.
pub fn projected_bath_block(
    bath: &BathGraph,
    chi: &Array1<Complex64>,
) -> Result<(Reflector, Array2<Complex64>)> {
    let r = Reflector::new(chi)?;
    let hb = bath.hamiltonian();
    let hp = r.transform(&hb);
    let n = bath.n_sites();
    let block = Array2::from_shape_fn((n - 1, n - 1), |(i, j)| hp[[i + 1, j + 1]]);
    Ok((r, block))
}

/// Search for a vacancy-like dressed state of `atom` in `bath`.
///
/// Diagonalizes H_{B_χ}, collects the eigenstates within [`E_TOL`] of ω₀,
/// and — when the subspace is degenerate — extracts the localized direction
/// by diagonalizing the boundary-weight Gram matrix. Among the localized
/// combinations the resolvent limit selects ψ ∝ Σ_i c_i* ψ_i, which is the
/// one returned (with its c, boundary weight, and degeneracy).
pub fn vds_search(bath: &BathGraph, atom: &GiantAtom) -> Result<Option<Vds>> {
    let n = bath.n_sites();
    if n > crate::bath::DENSE_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "projected-bath diagonalization needs a dense solve; {n} sites exceeds {}",
            crate::bath::DENSE_LIMIT
        )));
    }
    let chi = atom.chi_dense(n)?;
    let (refl, block) = projected_bath_block(bath, &chi)?;
    // Real-symmetric fast path (holds whenever bath and couplings are real).
    let (lam, vecs) = if block.iter().all(|z| z.im.abs() < 1e-14) {
        let rb = block.mapv(|z| z.re);
        let (l, v) = linalg::eigh_real(&rb)?;
        (l, v.mapv(|x| Complex64::new(x, 0.0)))
    } else {
        linalg::eigh_complex(&block)?
    };
    let w0 = atom.omega0;
    let sel: Vec<usize> = (0..n - 1).filter(|&m| (lam[m] - w0).abs() <= E_TOL).collect();
    if sel.is_empty() {
        return Ok(None);
    }
    let degeneracy = sel.len();
    // Lift the degenerate states to the site basis.
    let lifted: Vec<Array1<Complex64>> = sel
        .iter()
        .map(|&m| {
            let col: Vec<Complex64> = (0..n - 1).map(|i| vecs[[i, m]]).collect();
            refl.lift(&col)
        })
        .collect();
    let boundary = boundary_sites(bath);
    // Boundary-weight Gram matrix over the degenerate subspace.
    let k = lifted.len();
    let gram = Array2::from_shape_fn((k, k), |(i, j)| {
        boundary
            .iter()
            .map(|&s| lifted[i][s].conj() * lifted[j][s])
            .sum::<Complex64>()
    });
    let (gev, gvec) = linalg::eigh_complex(&gram)?;
    // Localized directions: Gram eigenvalue (= boundary weight) below tol.
    let loc: Vec<usize> = (0..k).filter(|&i| gev[i] < LOCALIZATION_TOL).collect();
    if loc.is_empty() {
        return Ok(None);
    }
    let adj = bath.adjacency();
    let chi_sparse = atom.chi_sparse();
    let c_of = |psi: &Array1<Complex64>| -> Complex64 {
        // ⟨χ|H_B|ψ⟩ with H_B applied sparsely
        let mut c = Complex64::new(0.0, 0.0);
        for &(s, a) in &chi_sparse {
            let mut h_psi = Complex64::new(bath.frequencies[s], 0.0) * psi[s];
            for &(t, j) in &adj[s] {
                h_psi += j * psi[t];
            }
            c += a.conj() * h_psi;
        }
        c
    };
    // Localized basis states and their couplings.
    let loc_states: Vec<Array1<Complex64>> = loc
        .iter()
        .map(|&q| {
            let mut psi = Array1::zeros(n);
            for (i, l) in lifted.iter().enumerate() {
                let w = gvec[[i, q]];
                for s in 0..n {
                    psi[s] += w * l[s];
                }
            }
            psi
        })
        .collect();
    let cs: Vec<Complex64> = loc_states.iter().map(c_of).collect();
    // Resolvent-selected combination ψ ∝ Σ c_i* ψ_i.
    let weight_norm: f64 = cs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if weight_norm < C_TOL {
        return Ok(None); // localized but dark: no dressed state is seeded
    }
    let mut psi: Array1<Complex64> = Array1::zeros(n);
    for (c, st) in cs.iter().zip(loc_states.iter()) {
        let w = c.conj() / weight_norm;
        for s in 0..n {
            psi[s] += w * st[s];
        }
    }
    let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Ok(None);
    }
    psi.mapv_inplace(|c| c / norm);
    let c = c_of(&psi);
    if c.norm() < C_TOL {
        return Ok(None);
    }
    let bw: f64 = boundary.iter().map(|&s| psi[s].norm_sqr()).sum();
    if bw > LOCALIZATION_TOL {
        return Ok(None);
    }
    Ok(Some(Vds { energy: w0, state: psi, c, boundary_weight: bw, degeneracy }))
}

/// Exact dressed eigenstate built from a vacancy-like state:
/// Ψ = cosθ|e⟩ + e^{iφ}sinθ|ψ⟩ with tanθ·e^{iφ} = η = −ḡ/c. An eigenstate of
/// the full Hamiltonian at ω₀ for *every* coupling strength.
pub fn vds_dressed_state(bath: &BathGraph, atom: &GiantAtom, vds: &Vds) -> BoundState {
    let eta = -Complex64::new(atom.g_bar(), 0.0) / vds.c;
    let theta = eta.norm().atan();
    let phase = Complex64::new(0.0, eta.arg()).exp();
    let atom_amp = Complex64::new(theta.cos(), 0.0);
    let bath_amps = vds.state.mapv(|x| phase * theta.sin() * x);
    let residual = residual_1ex(bath, atom, vds.energy, atom_amp, &bath_amps);
    BoundState { energy: vds.energy, atom_amplitude: atom_amp, bath_amplitudes: bath_amps, residual }
}

// ---------------------------------------------------------------------------
// In-band pole scan
// ---------------------------------------------------------------------------

/// Candidate from the in-band scan of |F(ω + i0)|.
#[derive(Clone, Debug)]
pub struct InBandCandidate {
    pub energy: f64,
    /// |F| at the refined minimum (Richardson-extrapolated broadening).
    pub f_abs: f64,
    /// |Im ⟨χ|G_B(ω⁺)|χ⟩| at the minimum (decay kernel, no ḡ²).
    pub im_sigma_kernel: f64,
    /// True bound state: both the decay kernel and |F| vanish within
    /// tolerance. False entries are quasi-bound resonances, reported for
    /// diagnostics.
    pub bound: bool,
}

/// Scan (lo, hi) inside the band for roots of F(ω + i0). A candidate counts
/// as bound only if the extrapolated decay kernel vanishes
/// (|Im Σ| < max(1e-8, ε)) *and* |F| < 1e-6 on the same scale as the scan
/// window; minima with small |F| but finite decay are reported as
/// quasi-bound.
pub fn find_inband_bs(
    engine: &ResolventEngine,
    atom: &GiantAtom,
    lo: f64,
    hi: f64,
    n_grid: usize,
) -> Result<Vec<InBandCandidate>> {
    if !(lo < hi) || n_grid < 8 {
        return Err(Error::InvalidArgument("bad in-band scan window".into()));
    }
    let cchi = engine.project(&atom.chi_sparse());
    let eps = engine.default_epsilon();
    let gb2 = atom.g_bar().powi(2);
    let f_at = |w: f64| -> Complex64 {
        let sig = richardson(|e| engine.self_energy_kernel(w, e, &cchi), eps);
        Complex64::new(w - atom.omega0, 0.0) - gb2 * sig
    };
    let grid: Vec<f64> = (0..n_grid)
        .map(|i| lo + (hi - lo) * i as f64 / (n_grid - 1) as f64)
        .collect();
    let fabs: Vec<f64> = crate::par::map_grid(&grid, |&w| f_at(w).norm());
    let im_tol = 1e-8f64.max(eps);
    let scale = (hi - lo).max(1.0);
    let mut out = Vec::new();
    for i in 1..n_grid - 1 {
        if fabs[i] <= fabs[i - 1] && fabs[i] <= fabs[i + 1] && fabs[i] < 1e-3 * scale {
            // golden-section refine on [grid[i−1], grid[i+1]]
            let (mut a, mut b) = (grid[i - 1], grid[i + 1]);
            for _ in 0..60 {
                let m1 = a + (b - a) / 3.0;
                let m2 = b - (b - a) / 3.0;
                if f_at(m1).norm() < f_at(m2).norm() {
                    b = m2;
                } else {
                    a = m1;
                }
            }
            let w = 0.5 * (a + b);
            let sig = richardson(|e| engine.self_energy_kernel(w, e, &cchi), eps);
            let f = (Complex64::new(w - atom.omega0, 0.0) - gb2 * sig).norm();
            let im = sig.im.abs();
            let bound = im < im_tol && f < 1e-6 * scale;
            out.push(InBandCandidate { energy: w, f_abs: f, im_sigma_kernel: im, bound });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Combined seeding decision
// ---------------------------------------------------------------------------

/// Does this emitter seed a bound state in the weak-coupling limit?
#[derive(Clone, Debug)]
pub enum SeedBoundState {
    /// ω₀ lies outside the band: the pole below/above the spectrum.
    Gap(BoundState),
    /// ω₀ lies in the band and a vacancy-like state exists: exact dressed
    /// state at ω₀.
    InBand { vds: Vds, dressed: BoundState },
    /// No bound state: the extrapolated decay kernel at ω₀ is reported.
    Absent { im_sigma_kernel: f64 },
}

impl SeedBoundState {
    pub fn is_bound(&self) -> bool {
        !matches!(self, SeedBoundState::Absent { .. })
    }
}

/// Decide whether `atom` seeds a bound state: outside the spectrum a pole
/// search, inside the band a vacancy-like-state search.
pub fn seed_bound_state(
    bath: &BathGraph,
    engine: &ResolventEngine,
    atom: &GiantAtom,
) -> Result<SeedBoundState> {
    let lam_min = engine.dec.eigenvalues[0];
    let lam_max = engine.dec.eigenvalues[engine.n() - 1];
    let span = engine.dec.span();
    let w0 = atom.omega0;
    if w0 < lam_min || w0 > lam_max {
        // bracket: the root lies strictly between ω₀ shifted outward and the
        // band edge (F(ω₀±) has the sign of the self-energy pull).
        let gb = atom.g_bar();
        let (lo, hi) = if w0 < lam_min {
            (w0 - 2.0 * gb - span, lam_min - 1e-12 * span.max(1.0))
        } else {
            (lam_max + 1e-12 * span.max(1.0), w0 + 2.0 * gb + span)
        };
        let bs = find_ingap_bs(engine, bath, atom, lo, hi)?.ok_or_else(|| {
            Error::Internal("gap pole search found no root outside the spectrum".into())
        })?;
        return Ok(SeedBoundState::Gap(bs));
    }
    match vds_search(bath, atom)? {
        Some(vds) => {
            let dressed = vds_dressed_state(bath, atom, &vds);
            Ok(SeedBoundState::InBand { vds, dressed })
        }
        None => {
            let cchi = engine.project(&atom.chi_sparse());
            let sig = engine.self_energy_retarded(w0, &cchi);
            Ok(SeedBoundState::Absent { im_sigma_kernel: sig.im.abs() })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{build_chain, Boundary};
    use approx::assert_abs_diff_eq;

    #[test]
    fn gap_bs_matches_infinite_chain_closed_form() {
        // Small-atom BS above the chain band: E solves E − ω₀ = g²·G∞(E)
        // with G∞(E) = sign·e^{−κ·0}/(2J sinh κ) ⇒ E − ω₀ = g²/√(E²−4J²).
        let bath = build_chain(1501, 1.0, 0.0, Boundary::Open).unwrap();
        let eng = ResolventEngine::new(&bath).unwrap();
        let atom = GiantAtom::uniform(2.3, 0.4, &[750]).unwrap();
        let bs = find_ingap_bs(&eng, &bath, &atom, 2.0 + 1e-6, 4.0).unwrap().unwrap();
        // closed-form root by bisection on the infinite-chain equation
        let f = |e: f64| e - 2.3 - 0.16 / (e * e - 4.0).sqrt();
        let (mut a, mut b) = (2.0001, 4.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(m) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        assert_abs_diff_eq!(bs.energy, 0.5 * (a + b), epsilon = 1e-6);
        assert!(bs.residual < 1e-10, "residual {}", bs.residual);
    }

    #[test]
    fn pole_function_increasing_in_gap() {
        let bath = build_chain(101, 1.0, 0.0, Boundary::Open).unwrap();
        let eng = ResolventEngine::new(&bath).unwrap();
        let atom = GiantAtom::uniform(2.5, 0.3, &[40, 43]).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..50 {
            let w = 2.05 + i as f64 * 0.04;
            let f = pole_function(&eng, &atom, w).unwrap();
            assert!(f > prev);
            assert!(pole_function_derivative(&eng, &atom, w).unwrap() >= 1.0);
            prev = f;
        }
    }

    #[test]
    fn chain_vds_two_point_atom() {
        // Two-point atom at ω₀ = ω_c (band center), spacing d = 2 = (2ν+1)·π/k₀
        // with k₀ = π/2: the single-cavity state between the coupling points
        // is vacancy-like.
        let bath = build_chain(401, 1.0, 0.0, Boundary::Open).unwrap();
        let atom = GiantAtom::uniform(0.0, 0.1, &[199, 201]).unwrap();
        let vds = vds_search(&bath, &atom).unwrap().expect("vds exists");
        // state concentrated between the legs
        assert!(vds.state[200].norm() > 0.99, "mid amplitude {}", vds.state[200].norm());
        // c = ⟨χ|H_B|ψ⟩ = 2·(−J)·ψ(200)/√2 = −√2·J·ψ(200)
        assert_abs_diff_eq!(vds.c.norm(), (2.0f64).sqrt(), epsilon = 1e-6);
        let dressed = vds_dressed_state(&bath, &atom, &vds);
        assert!(dressed.residual < 1e-9, "residual {}", dressed.residual);
        // exact at strong coupling too
        let strong = GiantAtom::uniform(0.0, 1.0, &[199, 201]).unwrap();
        let vds2 = vds_search(&bath, &strong).unwrap().unwrap();
        let d2 = vds_dressed_state(&bath, &strong, &vds2);
        assert!(d2.residual < 1e-9);
    }

    #[test]
    fn chain_vds_absent_when_condition_broken() {
        // d = 3 at band center: k₀d = 3π/2 is not an odd multiple of π ⇒ no
        // vacancy-like state, the atom decays.
        let bath = build_chain(401, 1.0, 0.0, Boundary::Open).unwrap();
        let atom = GiantAtom::uniform(0.0, 0.1, &[199, 202]).unwrap();
        assert!(vds_search(&bath, &atom).unwrap().is_none());
    }

    #[test]
    fn inband_scan_empty_for_normal_atom() {
        let bath = build_chain(801, 1.0, 0.0, Boundary::Open).unwrap();
        let eng = ResolventEngine::new(&bath).unwrap();
        let atom = GiantAtom::uniform(-0.4, 0.05, &[400]).unwrap();
        let cands = find_inband_bs(&eng, &atom, -1.8, 1.8, 181).unwrap();
        assert!(cands.iter().all(|c| !c.bound), "unexpected bound candidate: {cands:?}");
    }

    #[test]
    fn seed_decision_routes() {
        let bath = build_chain(401, 1.0, 0.0, Boundary::Open).unwrap();
        let eng = ResolventEngine::new(&bath).unwrap();
        // gap
        let gap_atom = GiantAtom::uniform(-2.7, 0.2, &[200]).unwrap();
        assert!(matches!(
            seed_bound_state(&bath, &eng, &gap_atom).unwrap(),
            SeedBoundState::Gap(_)
        ));
        // in-band with vacancy-like state
        let vds_atom = GiantAtom::uniform(0.0, 0.2, &[199, 201]).unwrap();
        assert!(matches!(
            seed_bound_state(&bath, &eng, &vds_atom).unwrap(),
            SeedBoundState::InBand { .. }
        ));
        // in-band normal atom
        let plain = GiantAtom::uniform(0.3, 0.2, &[200]).unwrap();
        match seed_bound_state(&bath, &eng, &plain).unwrap() {
            SeedBoundState::Absent { im_sigma_kernel } => {
                assert!(im_sigma_kernel > 0.1);
            }
            other => panic!("expected Absent, got {other:?}"),
        }
    }
}
