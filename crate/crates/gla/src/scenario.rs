//! Named scenario geometries and the run pipeline: build bath + emitters,
//! compute bound states / rates / decoherence-free certification, emit
//! deterministic CSV artifacts and a JSON report.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use gla_core::bath::{
    build_chain, build_graphene, build_lieb_nnn, build_square, BathGraph, Boundary, SiteLabel,
};
use gla_core::boundstates::SeedBoundState;
use gla_core::dynamics::{dfh_check, heff_from_bs, lindblad_evolve, rates_green, DfhReport};
use gla_core::emitters::{EmitterEnsemble, GiantAtom};
use gla_core::error::{Error, Result};
use gla_core::export::csv_from_columns;
use gla_core::greens::ResolventEngine;

use crate::config::{
    Artifact, AtomSpec, Config, LatticeKind, Params, ScenarioName, SiteRef, Sweep,
};

pub const DEFAULT_G: f64 = 0.05;
pub const DEFAULT_J: f64 = 1.0;
pub const DEFAULT_CHAIN_LENGTH: usize = 2001;
pub const DEFAULT_GRAPHENE_CELLS: usize = 31;
pub const DEFAULT_SQUARE_SIDE: usize = 41;
pub const DEFAULT_LIEB_STRING: usize = 5;

/// Fully built scenario: bath, emitters, and (for waveguide scenarios) the
/// emitter profiles as positions on the infinite chain for the analytic
/// rate route.
pub struct Built {
    pub bath: BathGraph,
    pub atoms: Vec<GiantAtom>,
    pub j: f64,
    pub g: f64,
    pub chain_positions: Option<Vec<Vec<(i64, Complex64)>>>,
    pub description: String,
}

fn site(bath: &BathGraph, label: SiteLabel) -> Result<usize> {
    bath.index_of(&label)
        .ok_or_else(|| Error::InvalidGeometry(format!("site {label:?} not on the lattice")))
}

fn cell(i: i64, j: i64, sub: u8) -> SiteLabel {
    SiteLabel::Cell { cell: [i as i32, j as i32], sub }
}

/// Lieb site by raw (x, y) coordinates (A even/even, B odd/even, C even/odd).
pub(crate) fn lieb_site(bath: &BathGraph, x: i64, y: i64) -> Result<usize> {
    let sub = match (x.rem_euclid(2), y.rem_euclid(2)) {
        (0, 0) => 0u8,
        (1, 0) => 1,
        (0, 1) => 2,
        _ => {
            return Err(Error::InvalidGeometry(format!(
                "({x}, {y}) is not a Lieb lattice site"
            )))
        }
    };
    site(bath, cell(x.div_euclid(2), y.div_euclid(2), sub))
}

/// Validate a Lieb string length against the 5 + 6ν family.
pub fn validate_lieb_length(len: usize) -> Result<()> {
    if len >= 5 && (len - 5) % 6 == 0 {
        Ok(())
    } else {
        Err(Error::InvalidGeometry(format!(
            "Lieb string length {len} is not in the admissible family 5 + 6ν (5, 11, 17, …)"
        )))
    }
}

/// Four-point emitter of the honeycomb scheme, centered on the A/B dimer of
/// cell (ci, cj): couples to the two outer B neighbors of A and the two outer
/// A neighbors of B.
fn graphene4_atom(bath: &BathGraph, ci: i64, cj: i64, g: f64, j: f64) -> Result<GiantAtom> {
    let pts = [
        site(bath, cell(ci - 1, cj, 1))?,
        site(bath, cell(ci, cj - 1, 1))?,
        site(bath, cell(ci + 1, cj, 0))?,
        site(bath, cell(ci, cj + 1, 0))?,
    ];
    GiantAtom::uniform(j, g, &pts) // ω₀ = ω_c + J
}

/// Lieb string emitter: couplings +g / −g at the ends of a straight run of
/// `len + 2` consecutive sites starting at (x0, y0); `horizontal` picks the
/// direction. The run must start on a B (horizontal) or C (vertical) site.
fn lieb_string_atom(
    bath: &BathGraph,
    x0: i64,
    y0: i64,
    len: usize,
    horizontal: bool,
    g: f64,
    j: f64,
) -> Result<GiantAtom> {
    validate_lieb_length(len)?;
    let l = len as i64;
    let (xe, ye) = if horizontal { (x0 + l + 1, y0) } else { (x0, y0 + l + 1) };
    let s0 = lieb_site(bath, x0, y0)?;
    let s1 = lieb_site(bath, xe, ye)?;
    GiantAtom::new(
        -j, // ω₀ = −J
        vec![(s0, Complex64::new(g, 0.0)), (s1, Complex64::new(-g, 0.0))],
    )
}

pub fn build_scenario(cfg: &Config) -> Result<Built> {
    let p = &cfg.params;
    let g = p.g.unwrap_or(DEFAULT_G);
    let j = p.j.unwrap_or(DEFAULT_J);
    if g <= 0.0 || j <= 0.0 {
        return Err(Error::InvalidArgument("g and J must be positive".into()));
    }
    match cfg.scenario {
        ScenarioName::WaveguideBraided
        | ScenarioName::WaveguideSerial
        | ScenarioName::WaveguideNested => build_waveguide(cfg.scenario, p, g, j),
        ScenarioName::Graphene3 => {
            let cells = p.cells.unwrap_or(DEFAULT_GRAPHENE_CELLS);
            let bath = build_graphene(cells, cells, j, 0.0, Boundary::Open)?;
            let (ci, cj) = ((cells / 2) as i64, (cells / 2) as i64);
            let omega0 = p.omega0.unwrap_or(0.0);
            // atom 1 centered on A(ci,cj): its three B neighbors
            let a1 = GiantAtom::uniform(
                omega0,
                g,
                &[
                    site(&bath, cell(ci, cj, 1))?,
                    site(&bath, cell(ci - 1, cj, 1))?,
                    site(&bath, cell(ci, cj - 1, 1))?,
                ],
            )?;
            // atom 2 centered on the adjacent B(ci,cj): its three A neighbors
            let a2 = GiantAtom::uniform(
                omega0,
                g,
                &[
                    site(&bath, cell(ci, cj, 0))?,
                    site(&bath, cell(ci + 1, cj, 0))?,
                    site(&bath, cell(ci, cj + 1, 0))?,
                ],
            )?;
            Ok(Built {
                bath,
                atoms: vec![a1, a2],
                j,
                g,
                chain_positions: None,
                description: format!(
                    "honeycomb {cells}×{cells}, two three-point emitters on adjacent vacancies"
                ),
            })
        }
        ScenarioName::Graphene4 => {
            let cells = p.cells.unwrap_or(DEFAULT_GRAPHENE_CELLS);
            let bath = build_graphene(cells, cells, j, 0.0, Boundary::Open)?;
            let (ci, cj) = ((cells / 2) as i64, (cells / 2) as i64);
            let a1 = graphene4_atom(&bath, ci, cj, g, j)?;
            let a2 = graphene4_atom(&bath, ci + 1, cj, g, j)?;
            Ok(Built {
                bath,
                atoms: vec![a1, a2],
                j,
                g,
                chain_positions: None,
                description: format!(
                    "honeycomb {cells}×{cells}, two four-point emitters at ω₀ = ω_c + J, \
                     centers one cell apart"
                ),
            })
        }
        ScenarioName::GrapheneChain => {
            let cells = p.cells.unwrap_or(DEFAULT_GRAPHENE_CELLS);
            let bath = build_graphene(cells, cells, j, 0.0, Boundary::Open)?;
            let (ci, cj) = ((cells / 2) as i64, (cells / 2) as i64);
            let atoms = vec![
                graphene4_atom(&bath, ci - 1, cj, g, j)?,
                graphene4_atom(&bath, ci, cj, g, j)?,
                graphene4_atom(&bath, ci + 1, cj, g, j)?,
            ];
            Ok(Built {
                bath,
                atoms,
                j,
                g,
                chain_positions: None,
                description: format!(
                    "honeycomb {cells}×{cells}, three four-point emitters in a row \
                     (nearest-neighbor effective spin chain)"
                ),
            })
        }
        ScenarioName::SquareBraided | ScenarioName::SquareNested => {
            let side = p.cells.unwrap_or(DEFAULT_SQUARE_SIDE);
            let bath = build_square(side, side, j, 0.0, Boundary::Open)?;
            let (cx, cy) = ((side / 2) as i64, (side / 2) as i64);
            let omega0 = p.omega0.unwrap_or(0.0);
            let cross = |x: i64, y: i64, r: i64| -> Result<GiantAtom> {
                GiantAtom::uniform(
                    omega0,
                    g,
                    &[
                        site(&bath, cell(x + r, y, 0))?,
                        site(&bath, cell(x - r, y, 0))?,
                        site(&bath, cell(x, y + r, 0))?,
                        site(&bath, cell(x, y - r, 0))?,
                    ],
                )
            };
            let a1 = cross(cx, cy, 3)?;
            let (a2, desc) = if cfg.scenario == ScenarioName::SquareBraided {
                (cross(cx + 5, cy, 3)?, "partner center shifted by (5, 0)")
            } else {
                (cross(cx, cy, 1)?, "inner partner sharing the center")
            };
            Ok(Built {
                bath,
                atoms: vec![a1, a2],
                j,
                g,
                chain_positions: None,
                description: format!(
                    "square {side}×{side}, four-point cross emitters at ω₀ = 0; {desc}"
                ),
            })
        }
        ScenarioName::LiebPair | ScenarioName::LiebMismatched => {
            let len = p.length.unwrap_or(DEFAULT_LIEB_STRING);
            validate_lieb_length(len)?;
            // lattice must hold the string interior away from the boundary
            let needed = ((7 + len as i64 + 2) / 2 + 1) as usize;
            let cells = p.cells.unwrap_or(9).max(needed);
            let bath = build_lieb_nnn(cells, cells, j, Boundary::Open)?;
            let (x0, y0) = (5i64, 8i64);
            let a1 = lieb_string_atom(&bath, x0, y0, len, true, g, j)?;
            let (a2, desc) = if cfg.scenario == ScenarioName::LiebPair {
                (
                    lieb_string_atom(&bath, x0 + 2, y0, len, true, g, j)?,
                    "parallel partner shifted by two sites",
                )
            } else {
                (
                    lieb_string_atom(&bath, 8, 5, len, false, g, j)?,
                    "perpendicular partner (mismatched orientation)",
                )
            };
            Ok(Built {
                bath,
                atoms: vec![a1, a2],
                j,
                g,
                chain_positions: None,
                description: format!(
                    "Lieb {cells}×{cells} cells, string emitters of interior length {len}; {desc}"
                ),
            })
        }
        ScenarioName::Custom => build_custom(p, g, j),
    }
}

fn build_waveguide(name: ScenarioName, p: &Params, g: f64, j: f64) -> Result<Built> {
    let l = p.cells.unwrap_or(DEFAULT_CHAIN_LENGTH);
    let omega0 = p.omega0.unwrap_or(0.0);
    let d = p.d.unwrap_or(2);
    let x21 = p.x21.unwrap_or(1);
    let c = l / 2 - 4; // leave room for the second atom's legs
    let bath = build_chain(l, j, 0.0, Boundary::Open)?;
    let (a1_legs, a2_legs, desc): ([i64; 2], [i64; 2], &str) = match name {
        ScenarioName::WaveguideBraided => {
            if !(0 < x21 && x21 < d) {
                return Err(Error::InvalidGeometry(format!(
                    "braided arrangement requires 0 < x₂₁ < d (got x₂₁ = {x21}, d = {d})"
                )));
            }
            ([0, d], [x21, x21 + d], "braided pair")
        }
        ScenarioName::WaveguideSerial => {
            let x21 = p.x21.unwrap_or(d + 2);
            if x21 < d {
                return Err(Error::InvalidGeometry(format!(
                    "serial arrangement requires x₂₁ ≥ d (got x₂₁ = {x21}, d = {d})"
                )));
            }
            ([0, d], [x21, x21 + d], "serial pair")
        }
        ScenarioName::WaveguideNested => {
            // outer atom spans 3d so the inner legs at (x21, 3·x21) cancel
            let outer = 3 * d;
            if !(0 < x21 && 3 * x21 < outer) {
                return Err(Error::InvalidGeometry(format!(
                    "nested arrangement requires 0 < x₂₁ and 3·x₂₁ < 3d (got x₂₁ = {x21}, d = {d})"
                )));
            }
            ([0, outer], [x21, 3 * x21], "nested pair (outer span 3d)")
        }
        _ => unreachable!(),
    };
    let a1 = GiantAtom::uniform(
        omega0,
        g,
        &[c + a1_legs[0] as usize, c + a1_legs[1] as usize],
    )?;
    let a2 = GiantAtom::uniform(
        omega0,
        g,
        &[c + a2_legs[0] as usize, c + a2_legs[1] as usize],
    )?;
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let chain_positions = Some(vec![
        vec![(a1_legs[0], amp), (a1_legs[1], amp)],
        vec![(a2_legs[0], amp), (a2_legs[1], amp)],
    ]);
    Ok(Built {
        bath,
        atoms: vec![a1, a2],
        j,
        g,
        chain_positions,
        description: format!("waveguide L = {l}, two-point emitters, {desc}"),
    })
}

fn build_custom(p: &Params, g: f64, j: f64) -> Result<Built> {
    let lattice = p
        .lattice
        .ok_or_else(|| Error::InvalidArgument("custom scenario requires params.lattice".into()))?;
    let atoms_spec = p
        .atoms
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("custom scenario requires params.atoms".into()))?;
    let cells = p.cells.unwrap_or(21);
    let bath = match lattice {
        LatticeKind::Chain => build_chain(p.cells.unwrap_or(401), j, 0.0, Boundary::Open)?,
        LatticeKind::Graphene => build_graphene(cells, cells, j, 0.0, Boundary::Open)?,
        LatticeKind::Square => build_square(cells, cells, j, 0.0, Boundary::Open)?,
        LatticeKind::Lieb => build_lieb_nnn(cells, cells, j, Boundary::Open)?,
    };
    let atoms = atoms_spec
        .iter()
        .map(|spec| atom_from_spec(&bath, spec))
        .collect::<Result<Vec<_>>>()?;
    Ok(Built {
        bath,
        atoms,
        j,
        g,
        chain_positions: None,
        description: format!("custom scenario on {lattice:?}"),
    })
}

fn atom_from_spec(bath: &BathGraph, spec: &AtomSpec) -> Result<GiantAtom> {
    let couplings = spec
        .couplings
        .iter()
        .map(|c| {
            let idx = match &c.site {
                SiteRef::Index(i) => {
                    if *i >= bath.n_sites() {
                        return Err(Error::IndexError(format!(
                            "site {} out of range (bath has {})",
                            i,
                            bath.n_sites()
                        )));
                    }
                    *i
                }
                SiteRef::Cell(v) => {
                    if v.len() != 3 {
                        return Err(Error::InvalidArgument(
                            "cell site reference must be [cell_a, cell_b, sublattice]".into(),
                        ));
                    }
                    site(bath, cell(v[0], v[1], v[2] as u8))?
                }
            };
            Ok((idx, Complex64::new(c.g_re, c.g_im)))
        })
        .collect::<Result<Vec<_>>>()?;
    GiantAtom::new(spec.omega0, couplings)
}

// ---------------------------------------------------------------------------
// Run pipeline
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    /// Reference value when one exists for this scenario.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    /// "expected" = compared against an embedded reference;
    /// "computed" = reported without a reference.
    pub provenance: &'static str,
}

impl Check {
    fn expected(name: &str, expected: f64, value: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            expected: Some(expected),
            value,
            tolerance: Some(tol),
            pass: Some((value - expected).abs() <= tol),
            provenance: "expected",
        }
    }

    fn computed(name: &str, value: f64) -> Self {
        Check { name: name.into(), expected: None, value, tolerance: None, pass: None, provenance: "computed" }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub config: Config,
    pub description: String,
    pub n_sites: usize,
    pub n_atoms: usize,
    /// Bound-state energy per emitter (NaN where no bound state exists).
    pub bs_energies: Vec<f64>,
    pub per_atom_bound: Vec<bool>,
    pub is_dfh: bool,
    pub gamma_eigenvalues: Vec<f64>,
    pub dfh_tol: f64,
    /// |K_jj'| from the bound-state route (zeros when not decoherence-free).
    pub k_abs: Vec<Vec<f64>>,
    pub zero_interaction_pairs: Vec<(usize, usize)>,
    pub checks: Vec<Check>,
    pub artifacts: Vec<(String, PathBuf)>,
}

impl RunReport {
    pub fn all_expected_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass.unwrap_or(true))
    }
}

fn matrix_csv(m: &ndarray::Array2<Complex64>) -> Result<String> {
    // coordinate list: row, col, re, im
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    let mut res = Vec::new();
    let mut ims = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            rows.push(i as f64);
            cols.push(j as f64);
            res.push(m[[i, j]].re);
            ims.push(m[[i, j]].im);
        }
    }
    csv_from_columns(&["row", "col", "re", "im"], &[rows, cols, res, ims])
}

fn write_artifact(
    out_dir: Option<&Path>,
    artifacts: &mut Vec<(String, PathBuf)>,
    name: &str,
    body: &str,
) -> Result<()> {
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::InvalidArgument(format!("cannot create {}: {e}", dir.display())))?;
        let path = dir.join(name);
        std::fs::write(&path, body)
            .map_err(|e| Error::Internal(format!("write {}: {e}", path.display())))?;
        // Record the path relative to the run directory so the report is
        // byte-identical no matter where the run lands.
        artifacts.push((name.to_string(), PathBuf::from(name)));
    }
    Ok(())
}

/// Scenario-specific reference checks against the embedded closed-form
/// expectations (|K₁₂| in units of g²/J throughout).
fn reference_checks(
    name: ScenarioName,
    built: &Built,
    dfh: &DfhReport,
    rates_k12: Option<f64>,
    seeds: &[SeedBoundState],
) -> Vec<Check> {
    let g2 = built.g * built.g / built.j;
    let k12_bs = if dfh.k_eff.nrows() > 1 { dfh.k_eff[[0, 1]].norm() } else { 0.0 };
    let mut checks = Vec::new();
    match name {
        ScenarioName::WaveguideBraided => {
            // K₁₂ = (2g²/v)·sin k₀x₂₁ at k₀ = π/2, v = 2J with defaults
            if let Some(k12) = rates_k12 {
                checks.push(Check::expected("k12_abs_green", g2, k12.abs(), 0.02 * g2));
            }
            checks.push(Check::expected("k12_abs_bs", g2, k12_bs, 1e-6 * g2));
            let gmax = dfh.gamma_eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            checks.push(Check::expected("gamma_eig_max", 0.0, gmax, dfh.dfh_tol));
        }
        ScenarioName::WaveguideSerial | ScenarioName::WaveguideNested => {
            checks.push(Check::expected("k12_abs_bs", 0.0, k12_bs, 1e-6 * g2));
        }
        ScenarioName::Graphene3 => {
            checks.push(Check::expected("k12_abs_bs", g2, k12_bs, 1e-6 * g2));
            if let Some(SeedBoundState::InBand { vds, .. }) = seeds.first() {
                checks.push(Check::expected(
                    "vds_coupling_abs",
                    3.0f64.sqrt() * built.j,
                    vds.c.norm(),
                    1e-10,
                ));
            }
        }
        ScenarioName::Graphene4 => {
            checks.push(Check::expected("k12_abs_bs", g2, k12_bs, 1e-6 * g2));
            if let Some(SeedBoundState::InBand { vds, .. }) = seeds.first() {
                checks.push(Check::expected(
                    "vds_coupling_abs",
                    2.0f64.sqrt() * built.j,
                    vds.c.norm(),
                    1e-10,
                ));
            }
        }
        ScenarioName::GrapheneChain => {
            let n = dfh.k_eff.nrows();
            if n == 3 {
                checks.push(Check::expected("k12_abs_bs", g2, dfh.k_eff[[0, 1]].norm(), 1e-6 * g2));
                checks.push(Check::expected("k23_abs_bs", g2, dfh.k_eff[[1, 2]].norm(), 1e-6 * g2));
                checks.push(Check::expected("k13_abs_bs", 0.0, dfh.k_eff[[0, 2]].norm(), 1e-6 * g2));
            }
        }
        ScenarioName::SquareBraided => {
            if let Some(k12) = rates_k12 {
                checks.push(Check::expected("k12_abs_green", g2, k12.abs(), 0.02 * g2));
            }
            checks.push(Check::expected("k12_abs_bs", g2, k12_bs, 1e-6 * g2));
        }
        ScenarioName::SquareNested => {
            checks.push(Check::expected("k12_abs_bs", 0.0, k12_bs, 1e-6 * g2));
        }
        ScenarioName::LiebPair => {
            checks.push(Check::expected("k12_abs_bs", g2, k12_bs, 0.02 * g2));
            if let Some(SeedBoundState::InBand { vds, .. }) = seeds.first() {
                checks.push(Check::expected(
                    "vds_coupling_abs",
                    built.j / 2.0f64.sqrt(),
                    vds.c.norm(),
                    1e-10,
                ));
            }
        }
        ScenarioName::LiebMismatched => {
            checks.push(Check::expected("k12_abs_bs", 0.0, k12_bs, 1e-6 * g2));
        }
        ScenarioName::Custom => {}
    }
    checks
}

/// Execute one scenario (no sweep). Writes artifacts when `out_dir` is given.
pub fn run_scenario(cfg: &Config, out_dir: Option<&Path>) -> Result<RunReport> {
    let built = build_scenario(cfg)?;
    let engine = ResolventEngine::new(&built.bath)?;
    let dfh = dfh_check(&built.bath, &engine, &built.atoms)?;
    let rates = rates_green(&engine, &built.atoms)?;
    rates.psd_check().ok(); // PSD violation is reported, not fatal
    let seeds: Vec<SeedBoundState> = built
        .atoms
        .iter()
        .map(|a| gla_core::boundstates::seed_bound_state(&built.bath, &engine, a))
        .collect::<Result<_>>()?;
    let bs_energies: Vec<f64> = seeds
        .iter()
        .map(|s| match s {
            SeedBoundState::Gap(bs) => bs.energy,
            SeedBoundState::InBand { dressed, .. } => dressed.energy,
            SeedBoundState::Absent { .. } => f64::NAN,
        })
        .collect();
    let rates_k12 = if built.atoms.len() > 1 { Some(rates.k[[0, 1]].re) } else { None };
    let mut checks = reference_checks(cfg.scenario, &built, &dfh, rates_k12, &seeds);
    checks.push(Check::computed(
        "gamma_eig_max_extrapolated",
        dfh.gamma_eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs())),
    ));
    let zero_pairs = gla_core::dynamics::zero_interaction_pairs(
        &dfh.k_eff,
        1e-9 * built.g * built.g / built.j,
    );
    let n = built.atoms.len();
    let k_abs: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| dfh.k_eff[[i, j]].norm()).collect())
        .collect();

    let mut artifacts = Vec::new();
    write_artifact(out_dir, &mut artifacts, "rates_k.csv", &matrix_csv(&rates.k)?)?;
    write_artifact(out_dir, &mut artifacts, "rates_gamma.csv", &matrix_csv(&rates.gamma)?)?;
    write_artifact(out_dir, &mut artifacts, "k_eff.csv", &matrix_csv(&dfh.k_eff)?)?;
    // bound-state summary
    {
        let atom_idx: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let energies = bs_energies.clone();
        let residuals: Vec<f64> = seeds
            .iter()
            .map(|s| match s {
                SeedBoundState::Gap(bs) => bs.residual,
                SeedBoundState::InBand { dressed, .. } => dressed.residual,
                SeedBoundState::Absent { im_sigma_kernel } => *im_sigma_kernel,
            })
            .collect();
        let bound: Vec<f64> = dfh.per_atom_bound.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        write_artifact(
            out_dir,
            &mut artifacts,
            "bound_states.csv",
            &csv_from_columns(
                &["atom", "energy", "residual_or_decay", "bound"],
                &[atom_idx, energies, residuals, bound],
            )?,
        )?;
    }
    // requested extras
    if let Some(outputs) = &cfg.outputs {
        if outputs.contains(&Artifact::Vds) {
            let mut atom_col = Vec::new();
            let mut site_col = Vec::new();
            let mut re_col = Vec::new();
            let mut im_col = Vec::new();
            for (ai, s) in seeds.iter().enumerate() {
                if let SeedBoundState::InBand { vds, .. } = s {
                    for (si, amp) in vds.state.iter().enumerate() {
                        if amp.norm() > 1e-12 {
                            atom_col.push(ai as f64);
                            site_col.push(si as f64);
                            re_col.push(amp.re);
                            im_col.push(amp.im);
                        }
                    }
                }
            }
            write_artifact(
                out_dir,
                &mut artifacts,
                "vds.csv",
                &csv_from_columns(
                    &["atom", "site", "re", "im"],
                    &[atom_col, site_col, re_col, im_col],
                )?,
            )?;
        }
        if outputs.contains(&Artifact::SelfEnergy) {
            let lo = engine.dec.eigenvalues[0];
            let hi = engine.dec.eigenvalues[engine.n() - 1];
            let grid: Vec<f64> = (0..201)
                .map(|i| lo + (hi - lo) * i as f64 / 200.0)
                .collect();
            let cchi = engine.project(&built.atoms[0].chi_sparse());
            let sig = gla_core::par::map_grid(&grid, |&w| engine.self_energy_retarded(w, &cchi));
            write_artifact(
                out_dir,
                &mut artifacts,
                "self_energy.csv",
                &csv_from_columns(
                    &["omega", "re", "im"],
                    &[
                        grid.clone(),
                        sig.iter().map(|s| s.re).collect(),
                        sig.iter().map(|s| s.im).collect(),
                    ],
                )?,
            )?;
        }
        if outputs.contains(&Artifact::Lindblad) {
            let t_max = cfg.params.t_max.unwrap_or(100.0);
            let mut psi0 = ndarray::Array1::zeros(n);
            psi0[0] = Complex64::new(1.0, 0.0);
            let lr = lindblad_evolve(&dfh.k_eff, &rates.gamma, &psi0, t_max, 201)?;
            let mut cols = vec![lr.times.clone()];
            let mut headers = vec!["t".to_string()];
            for jj in 0..n {
                headers.push(format!("p{jj}"));
                cols.push((0..lr.times.len()).map(|it| lr.populations[[it, jj]]).collect());
            }
            let hdr: Vec<&str> = headers.iter().map(|s| s.as_str()).collect();
            write_artifact(
                out_dir,
                &mut artifacts,
                "lindblad.csv",
                &csv_from_columns(&hdr, &cols)?,
            )?;
        }
        if outputs.contains(&Artifact::ExactEvolution) {
            let t_max = cfg.params.t_max.unwrap_or(50.0);
            let ens = EmitterEnsemble::new(built.bath.clone(), built.atoms.clone())?;
            let mut psi0 = vec![Complex64::new(0.0, 0.0); n];
            psi0[0] = Complex64::new(1.0, 0.0);
            let qr = gla_core::dynamics::exact_1ex_evolve(&ens, &psi0, t_max, 201)?;
            let mut cols = vec![qr.times.clone()];
            let mut headers = vec!["t".to_string()];
            for jj in 0..n {
                headers.push(format!("p{jj}"));
                cols.push((0..qr.times.len()).map(|it| qr.atom_populations[[it, jj]]).collect());
            }
            let hdr: Vec<&str> = headers.iter().map(|s| s.as_str()).collect();
            write_artifact(
                out_dir,
                &mut artifacts,
                "exact_evolution.csv",
                &csv_from_columns(&hdr, &cols)?,
            )?;
        }
    }

    let report = RunReport {
        config: cfg.clone(),
        description: built.description.clone(),
        n_sites: built.bath.n_sites(),
        n_atoms: n,
        bs_energies,
        per_atom_bound: dfh.per_atom_bound.clone(),
        is_dfh: dfh.is_dfh,
        gamma_eigenvalues: dfh.gamma_eigenvalues.clone(),
        dfh_tol: dfh.dfh_tol,
        k_abs,
        zero_interaction_pairs: zero_pairs,
        checks,
        artifacts,
    };
    if let Some(dir) = out_dir {
        let path = dir.join("report.json");
        std::fs::write(&path, serde_json::to_string_pretty(&report).expect("report serializes"))
            .map_err(|e| Error::Internal(format!("write {}: {e}", path.display())))?;
    }
    Ok(report)
}

/// Run a sweep: one sub-directory per parameter value plus a summary CSV.
pub fn run_sweep(cfg: &Config, sweep: &Sweep, out_dir: Option<&Path>) -> Result<Vec<RunReport>> {
    let configs: Vec<Config> = sweep
        .values
        .iter()
        .map(|&v| {
            let mut c = cfg.clone();
            c.sweep = None;
            c.apply_set(&format!("{}={}", sweep.parameter, v))?;
            Ok(c)
        })
        .collect::<Result<_>>()?;
    let results: Vec<Result<RunReport>> = gla_core::par::map_grid(&configs, |c| {
        // per-point directory, contention-free
        let sub = out_dir.map(|d| d.join(format!("point_{}", config_point_tag(c))));
        run_scenario(c, sub.as_deref())
    });
    let mut reports = Vec::new();
    for r in results {
        reports.push(r?);
    }
    if let Some(dir) = out_dir {
        let vals = sweep.values.clone();
        let k12: Vec<f64> = reports
            .iter()
            .map(|r| if r.k_abs.len() > 1 { r.k_abs[0][1] } else { 0.0 })
            .collect();
        let gmax: Vec<f64> = reports
            .iter()
            .map(|r| r.gamma_eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs())))
            .collect();
        let dfh: Vec<f64> = reports.iter().map(|r| if r.is_dfh { 1.0 } else { 0.0 }).collect();
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::InvalidArgument(format!("cannot create {}: {e}", dir.display())))?;
        std::fs::write(
            dir.join("sweep.csv"),
            csv_from_columns(
                &[sweep.parameter.as_str(), "k12_abs", "gamma_eig_max", "is_dfh"],
                &[vals, k12, gmax, dfh],
            )?,
        )
        .map_err(|e| Error::Internal(format!("write sweep.csv: {e}")))?;
    }
    Ok(reports)
}

fn config_point_tag(c: &Config) -> String {
    // stable tag from the parameter set
    serde_json::to_string(&c.params).map(|s| format!("{:016x}", fxhash(&s))).unwrap_or_default()
}

fn fxhash(s: &str) -> u64 {
    // small stable string hash for directory names
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Effective couplings from the bound-state route for an already-built
/// scenario (used by the regression battery).
pub fn k_eff_of(built: &Built, engine: &ResolventEngine) -> Result<ndarray::Array2<Complex64>> {
    let seeds: Vec<SeedBoundState> = built
        .atoms
        .iter()
        .map(|a| gla_core::boundstates::seed_bound_state(&built.bath, engine, a))
        .collect::<Result<_>>()?;
    heff_from_bs(&built.atoms, &seeds)
}
