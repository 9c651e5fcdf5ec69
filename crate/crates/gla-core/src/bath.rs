//! Photonic bath construction: finite cavity networks, lattice builders,
//! Bloch band structures and spectral decompositions.
//!
//! All energies are in units of the hopping rate J. Sign conventions follow
//! the shipped scenarios: the chain and square builders use −J matrix
//! elements, the honeycomb and Lieb builders use +J. Site ordering is
//! row-major over cells with the sublattice index minor, so assembled
//! matrices are bit-reproducible across runs.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Hard cap for dense eigendecompositions (O(n³) wall).
pub const DENSE_LIMIT: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Lattice coordinate of a cavity: plain integer for 1D, (cell, sublattice)
/// for the 2D builders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SiteLabel {
    Linear(i64),
    Cell { cell: [i32; 2], sub: u8 },
}

/// Finite cavity network: per-cavity frequency plus a Hermitian-closed
/// hopping list. Only one direction of each hopping is stored; the matrix
/// element (x', x) = conj(J_xx') is implied.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BathGraph {
    pub site_labels: Vec<SiteLabel>,
    pub frequencies: Vec<f64>,
    pub hoppings: Vec<(usize, usize, Complex64)>,
    pub boundary: Boundary,
    #[serde(skip)]
    index: BTreeMap<SiteLabel, usize>,
}

impl BathGraph {
    pub fn new(
        site_labels: Vec<SiteLabel>,
        frequencies: Vec<f64>,
        hoppings: Vec<(usize, usize, Complex64)>,
        boundary: Boundary,
    ) -> Result<Self> {
        let n = site_labels.len();
        if frequencies.len() != n {
            return Err(Error::InvalidGeometry(format!(
                "{} frequencies for {} sites",
                frequencies.len(),
                n
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for &(a, b, _) in &hoppings {
            if a >= n || b >= n {
                return Err(Error::IndexError(format!("hopping ({a},{b}) out of range (n={n})")));
            }
            if a == b {
                return Err(Error::InvalidGeometry(format!("self-hopping on site {a}")));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(Error::InvalidGeometry(format!("duplicate hopping ({a},{b})")));
            }
        }
        let mut index = BTreeMap::new();
        for (i, l) in site_labels.iter().enumerate() {
            if index.insert(*l, i).is_some() {
                return Err(Error::InvalidGeometry(format!("duplicate site label {l:?}")));
            }
        }
        Ok(BathGraph { site_labels, frequencies, hoppings, boundary, index })
    }

    pub fn n_sites(&self) -> usize {
        self.site_labels.len()
    }

    pub fn index_of(&self, label: &SiteLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Rebuild the label index (needed after deserialization).
    pub fn reindex(&mut self) {
        self.index = self
            .site_labels
            .iter()
            .enumerate()
            .map(|(i, l)| (*l, i))
            .collect();
    }

    /// Dense single-excitation Hamiltonian: diagonal = frequencies,
    /// off-diagonal = hoppings (Hermitian by construction).
    pub fn hamiltonian(&self) -> Array2<Complex64> {
        let n = self.n_sites();
        let mut h = Array2::zeros((n, n));
        for i in 0..n {
            h[[i, i]] = Complex64::new(self.frequencies[i], 0.0);
        }
        for &(a, b, j) in &self.hoppings {
            h[[a, b]] = j;
            h[[b, a]] = j.conj();
        }
        h
    }

    pub fn is_real(&self) -> bool {
        self.hoppings.iter().all(|&(_, _, j)| j.im == 0.0)
    }

    /// Adjacency rows (site → neighbors with amplitudes), used by the sparse
    /// propagator and the localization shells.
    pub fn adjacency(&self) -> Vec<Vec<(usize, Complex64)>> {
        let mut adj = vec![Vec::new(); self.n_sites()];
        for &(a, b, j) in &self.hoppings {
            adj[a].push((b, j));
            adj[b].push((a, j.conj()));
        }
        adj
    }

    /// Remove a site and all its hoppings (a vacancy).
    pub fn apply_vacancy(&self, site: usize) -> Result<BathGraph> {
        let n = self.n_sites();
        if site >= n {
            return Err(Error::IndexError(format!("vacancy site {site} out of range (n={n})")));
        }
        let remap = |x: usize| if x > site { x - 1 } else { x };
        let mut labels = self.site_labels.clone();
        labels.remove(site);
        let mut freqs = self.frequencies.clone();
        freqs.remove(site);
        let hoppings = self
            .hoppings
            .iter()
            .filter(|&&(a, b, _)| a != site && b != site)
            .map(|&(a, b, j)| (remap(a), remap(b), j))
            .collect();
        BathGraph::new(labels, freqs, hoppings, self.boundary)
    }

    /// Full Hermitian eigendecomposition. The uniform open chain is detected
    /// and solved with its exact sine eigenbasis; everything else goes to
    /// LAPACK (real path when possible). Sizes above [`DENSE_LIMIT`] are
    /// rejected — use the Bloch path or the analytic chain formulas instead.
    pub fn diagonalize(&self) -> Result<SpectralDecomposition> {
        let n = self.n_sites();
        if n > DENSE_LIMIT {
            return Err(Error::ResourceLimit(format!(
                "{n} sites exceeds the dense eigensolver limit {DENSE_LIMIT}; \
                 use the Bloch band path"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidGeometry("empty bath".into()));
        }
        if let Some(dec) = self.try_chain_analytic() {
            return Ok(dec);
        }
        if self.is_real() {
            let h = Array2::from_shape_fn((n, n), |(i, j)| {
                if i == j {
                    self.frequencies[i]
                } else {
                    0.0
                }
            });
            let mut h = h;
            for &(a, b, j) in &self.hoppings {
                h[[a, b]] = j.re;
                h[[b, a]] = j.re;
            }
            let (w, v) = linalg::eigh_real(&h)?;
            let vc = v.mapv(|x| Complex64::new(x, 0.0));
            Ok(SpectralDecomposition::new(w, vc))
        } else {
            let (w, v) = linalg::eigh_complex(&self.hamiltonian())?;
            Ok(SpectralDecomposition::new(w, v))
        }
    }

    /// Exact eigenbasis for the uniform open chain:
    /// λ_m = ω_c − 2J cos(k_m), v_m(x) = √(2/(L+1)) sin(k_m (x+1)),
    /// k_m = mπ/(L+1).
    fn try_chain_analytic(&self) -> Option<SpectralDecomposition> {
        let n = self.n_sites();
        if n < 2 || self.boundary != Boundary::Open {
            return None;
        }
        let wc = self.frequencies[0];
        if self.frequencies.iter().any(|&f| f != wc) {
            return None;
        }
        if !self
            .site_labels
            .iter()
            .enumerate()
            .all(|(i, l)| matches!(l, SiteLabel::Linear(x) if *x == i as i64))
        {
            return None;
        }
        if self.hoppings.len() != n - 1 {
            return None;
        }
        let j0 = self.hoppings[0].2;
        if j0.im != 0.0 || j0.re >= 0.0 {
            return None;
        }
        let mut pairs: Vec<(usize, usize)> =
            self.hoppings.iter().map(|&(a, b, _)| (a.min(b), a.max(b))).collect();
        pairs.sort_unstable();
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if a != i || b != i + 1 {
                return None;
            }
        }
        if self.hoppings.iter().any(|&(_, _, j)| j != j0) {
            return None;
        }
        let jmag = -j0.re;
        let lp1 = (n + 1) as f64;
        let norm = (2.0 / lp1).sqrt();
        let mut w = Array1::zeros(n);
        let mut v = Array2::zeros((n, n));
        for m in 1..=n {
            let k = std::f64::consts::PI * m as f64 / lp1;
            w[m - 1] = wc - 2.0 * jmag * k.cos();
            for x in 0..n {
                v[[x, m - 1]] = Complex64::new(norm * (k * (x as f64 + 1.0)).sin(), 0.0);
            }
        }
        Some(SpectralDecomposition::new(w, v))
    }
}

/// Eigenpairs of a finite bath: ascending eigenvalues, orthonormal
/// eigenvector columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: Array2<Complex64>,
}

impl SpectralDecomposition {
    pub fn new(eigenvalues: Array1<f64>, eigenvectors: Array2<Complex64>) -> Self {
        SpectralDecomposition { eigenvalues, eigenvectors }
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn span(&self) -> f64 {
        let n = self.n();
        if n == 0 {
            0.0
        } else {
            self.eigenvalues[n - 1] - self.eigenvalues[0]
        }
    }

    /// Mean level spacing (span / n).
    pub fn level_spacing(&self) -> f64 {
        self.span() / self.n().max(1) as f64
    }

    /// Distance from ω to the nearest eigenvalue (binary search).
    pub fn distance_to_spectrum(&self, omega: f64) -> f64 {
        let evs = self.eigenvalues.as_slice().expect("contiguous");
        match evs.binary_search_by(|x| x.partial_cmp(&omega).unwrap()) {
            Ok(_) => 0.0,
            Err(pos) => {
                let mut d = f64::INFINITY;
                if pos < evs.len() {
                    d = d.min((evs[pos] - omega).abs());
                }
                if pos > 0 {
                    d = d.min((omega - evs[pos - 1]).abs());
                }
                d
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// Homogeneous coupled-cavity array with nearest-neighbor hopping −J.
pub fn build_chain(length: usize, j: f64, omega_c: f64, boundary: Boundary) -> Result<BathGraph> {
    if length < 2 {
        return Err(Error::InvalidGeometry(format!("chain length {length} < 2")));
    }
    if j <= 0.0 {
        return Err(Error::InvalidGeometry("chain requires J > 0".into()));
    }
    let labels: Vec<SiteLabel> = (0..length as i64).map(SiteLabel::Linear).collect();
    let mut hoppings: Vec<(usize, usize, Complex64)> = (0..length - 1)
        .map(|i| (i, i + 1, Complex64::new(-j, 0.0)))
        .collect();
    if boundary == Boundary::Periodic && length > 2 {
        hoppings.push((length - 1, 0, Complex64::new(-j, 0.0)));
    }
    BathGraph::new(labels, vec![omega_c; length], hoppings, boundary)
}

/// Honeycomb lattice ("photonic graphene"), two sublattices A/B, hopping +J.
///
/// Cell (i, j) holds A = sub 0 and B = sub 1; A(i,j) is adjacent to B(i,j),
/// B(i−1,j) and B(i,j−1).
pub fn build_graphene(
    cells_a: usize,
    cells_b: usize,
    j: f64,
    omega_c: f64,
    boundary: Boundary,
) -> Result<BathGraph> {
    if cells_a < 2 || cells_b < 2 {
        return Err(Error::InvalidGeometry(format!(
            "graphene needs ≥ 2×2 cells, got {cells_a}×{cells_b}"
        )));
    }
    let (ca, cb) = (cells_a as i32, cells_b as i32);
    let n = 2 * cells_a * cells_b;
    let mut labels = Vec::with_capacity(n);
    for i in 0..ca {
        for jj in 0..cb {
            labels.push(SiteLabel::Cell { cell: [i, jj], sub: 0 });
            labels.push(SiteLabel::Cell { cell: [i, jj], sub: 1 });
        }
    }
    let idx = |i: i32, jj: i32, s: u8| -> Option<usize> {
        let (i, jj) = match boundary {
            Boundary::Open => {
                if i < 0 || i >= ca || jj < 0 || jj >= cb {
                    return None;
                }
                (i, jj)
            }
            Boundary::Periodic => (i.rem_euclid(ca), jj.rem_euclid(cb)),
        };
        Some(2 * (i as usize * cells_b + jj as usize) + s as usize)
    };
    let mut hoppings = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for i in 0..ca {
        for jj in 0..cb {
            let a = idx(i, jj, 0).unwrap();
            for (bi, bj) in [(i, jj), (i - 1, jj), (i, jj - 1)] {
                if let Some(b) = idx(bi, bj, 1) {
                    let key = (a.min(b), a.max(b));
                    if seen.insert(key) {
                        hoppings.push((a, b, Complex64::new(j, 0.0)));
                    }
                }
            }
        }
    }
    BathGraph::new(labels, vec![omega_c; n], hoppings, boundary)
}

/// Square lattice, nearest-neighbor hopping −J, single band of width 8J.
pub fn build_square(
    side_a: usize,
    side_b: usize,
    j: f64,
    omega_c: f64,
    boundary: Boundary,
) -> Result<BathGraph> {
    if side_a < 2 || side_b < 2 {
        return Err(Error::InvalidGeometry(format!(
            "square lattice needs ≥ 2×2 sites, got {side_a}×{side_b}"
        )));
    }
    let (sa, sb) = (side_a as i32, side_b as i32);
    let n = side_a * side_b;
    let mut labels = Vec::with_capacity(n);
    for x in 0..sa {
        for y in 0..sb {
            labels.push(SiteLabel::Cell { cell: [x, y], sub: 0 });
        }
    }
    let idx = |x: i32, y: i32| -> Option<usize> {
        let (x, y) = match boundary {
            Boundary::Open => {
                if x < 0 || x >= sa || y < 0 || y >= sb {
                    return None;
                }
                (x, y)
            }
            Boundary::Periodic => (x.rem_euclid(sa), y.rem_euclid(sb)),
        };
        Some(x as usize * side_b + y as usize)
    };
    let mut hoppings = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for x in 0..sa {
        for y in 0..sb {
            let a = idx(x, y).unwrap();
            for (nx, ny) in [(x + 1, y), (x, y + 1)] {
                if let Some(b) = idx(nx, ny) {
                    let key = (a.min(b), a.max(b));
                    if a != b && seen.insert(key) {
                        hoppings.push((a, b, Complex64::new(-j, 0.0)));
                    }
                }
            }
        }
    }
    BathGraph::new(labels, vec![omega_c; n], hoppings, boundary)
}

/// Lieb lattice with equal nearest- and next-nearest-neighbor hoppings +J and
/// zero onsite frequency.
///
/// Cell (i, j) holds A = (2i, 2j), B = (2i+1, 2j), C = (2i, 2j+1) in site
/// coordinates. NN bonds connect A–B and A–C; NNN bonds are the B–C diagonals.
pub fn build_lieb_nnn(cells_a: usize, cells_b: usize, j: f64, boundary: Boundary) -> Result<BathGraph> {
    if cells_a < 2 || cells_b < 2 {
        return Err(Error::InvalidGeometry(format!(
            "Lieb lattice needs ≥ 2×2 cells, got {cells_a}×{cells_b}"
        )));
    }
    let (ca, cb) = (cells_a as i32, cells_b as i32);
    // Sublattice from site parity: A (even,even) = 0, B (odd,even) = 1, C (even,odd) = 2.
    let sub_of = |x: i32, y: i32| -> Option<u8> {
        match (x.rem_euclid(2), y.rem_euclid(2)) {
            (0, 0) => Some(0),
            (1, 0) => Some(1),
            (0, 1) => Some(2),
            _ => None,
        }
    };
    let mut labels = Vec::new();
    for i in 0..ca {
        for jj in 0..cb {
            for (dx, dy, s) in [(0, 0, 0u8), (1, 0, 1u8), (0, 1, 2u8)] {
                let _ = (dx, dy);
                labels.push(SiteLabel::Cell { cell: [i, jj], sub: s });
            }
        }
    }
    // site coordinates → index
    let idx = |x: i32, y: i32| -> Option<usize> {
        let (xx, yy) = match boundary {
            Boundary::Open => {
                if x < 0 || x >= 2 * ca || y < 0 || y >= 2 * cb {
                    return None;
                }
                (x, y)
            }
            Boundary::Periodic => (x.rem_euclid(2 * ca), y.rem_euclid(2 * cb)),
        };
        let s = sub_of(xx, yy)?;
        let (i, jj) = (xx / 2, yy / 2);
        Some(3 * (i as usize * cells_b + jj as usize) + s as usize)
    };
    let coords = |lbl: &SiteLabel| -> (i32, i32) {
        match lbl {
            SiteLabel::Cell { cell, sub } => {
                let (dx, dy) = match sub {
                    0 => (0, 0),
                    1 => (1, 0),
                    _ => (0, 1),
                };
                (2 * cell[0] + dx, 2 * cell[1] + dy)
            }
            SiteLabel::Linear(_) => unreachable!(),
        }
    };
    let mut hoppings = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for lbl in &labels {
        let (x, y) = coords(lbl);
        let a = idx(x, y).unwrap();
        // nearest neighbors
        for (nx, ny) in [(x + 1, y), (x, y + 1)] {
            if let Some(b) = idx(nx, ny) {
                let key = (a.min(b), a.max(b));
                if a != b && seen.insert(key) {
                    hoppings.push((a, b, Complex64::new(j, 0.0)));
                }
            }
        }
        // next-nearest B–C diagonals (no A involvement)
        let s = sub_of(x.rem_euclid(2), y.rem_euclid(2)).unwrap();
        if s != 0 {
            for (nx, ny) in [(x + 1, y + 1), (x - 1, y + 1)] {
                if let Some(b) = idx(nx, ny) {
                    let (bx, by) = coords(&labels[b]);
                    let bs = sub_of(bx.rem_euclid(2), by.rem_euclid(2)).unwrap();
                    if bs != 0 {
                        let key = (a.min(b), a.max(b));
                        if a != b && seen.insert(key) {
                            hoppings.push((a, b, Complex64::new(j, 0.0)));
                        }
                    }
                }
            }
        }
    }
    BathGraph::new(labels, vec![0.0; 3 * cells_a * cells_b], hoppings, boundary)
}

// ---------------------------------------------------------------------------
// Bloch band structure
// ---------------------------------------------------------------------------

/// Unit-cell description for the translationally invariant lattices. An entry
/// `(from, to, offset, t)` contributes ⟨to, c+offset|H|from, c⟩ = t; the
/// Hermitian partner is implied (list each bond once).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlochSpec {
    pub dimension: usize,
    pub sublattice_count: usize,
    pub onsite: Vec<f64>,
    pub hoppings: Vec<(usize, usize, [i64; 2], Complex64)>,
}

impl BlochSpec {
    pub fn chain(j: f64, omega_c: f64) -> Self {
        BlochSpec {
            dimension: 1,
            sublattice_count: 1,
            onsite: vec![omega_c],
            hoppings: vec![(0, 0, [1, 0], Complex64::new(-j, 0.0))],
        }
    }

    pub fn square(j: f64, omega_c: f64) -> Self {
        BlochSpec {
            dimension: 2,
            sublattice_count: 1,
            onsite: vec![omega_c],
            hoppings: vec![
                (0, 0, [1, 0], Complex64::new(-j, 0.0)),
                (0, 0, [0, 1], Complex64::new(-j, 0.0)),
            ],
        }
    }

    pub fn graphene(j: f64, omega_c: f64) -> Self {
        BlochSpec {
            dimension: 2,
            sublattice_count: 2,
            onsite: vec![omega_c; 2],
            hoppings: vec![
                (0, 1, [0, 0], Complex64::new(j, 0.0)),
                (0, 1, [-1, 0], Complex64::new(j, 0.0)),
                (0, 1, [0, -1], Complex64::new(j, 0.0)),
            ],
        }
    }

    pub fn lieb_nnn(j: f64) -> Self {
        let t = Complex64::new(j, 0.0);
        BlochSpec {
            dimension: 2,
            sublattice_count: 3,
            onsite: vec![0.0; 3],
            hoppings: vec![
                // A–B along x
                (0, 1, [0, 0], t),
                (1, 0, [1, 0], t),
                // A–C along y
                (0, 2, [0, 0], t),
                (2, 0, [0, 1], t),
                // B–C diagonals
                (1, 2, [0, 0], t),
                (1, 2, [1, 0], t),
                (1, 2, [0, -1], t),
                (1, 2, [1, -1], t),
            ],
        }
    }

    /// Bloch Hamiltonian h(k).
    pub fn h_k(&self, k: [f64; 2]) -> Array2<Complex64> {
        let ns = self.sublattice_count;
        let mut h = Array2::zeros((ns, ns));
        for (s, &e) in self.onsite.iter().enumerate() {
            h[[s, s]] += Complex64::new(e, 0.0);
        }
        for &(from, to, off, t) in &self.hoppings {
            let phase = Complex64::new(0.0, k[0] * off[0] as f64 + k[1] * off[1] as f64).exp();
            h[[to, from]] += t * phase;
            h[[from, to]] += (t * phase).conj();
        }
        h
    }

    /// Largest Hermiticity residual of h(k) on a coarse sample grid.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..7 {
            for b in 0..7 {
                let k = [a as f64 * 0.9, b as f64 * 0.9];
                let h = self.h_k(k);
                for i in 0..self.sublattice_count {
                    for j in 0..self.sublattice_count {
                        worst = worst.max((h[[i, j]] - h[[j, i]].conj()).norm());
                    }
                }
            }
        }
        worst
    }
}

/// Band energies and Bloch vectors on a uniform Brillouin-zone grid.
#[derive(Clone, Debug)]
pub struct BandStructure {
    pub k_grid: Vec<[f64; 2]>,
    /// energies[(ik, band)] sorted ascending per k.
    pub energies: Array2<f64>,
    /// Per k: (sublattice × band) matrix of Bloch vector components.
    pub bloch_vectors: Vec<Array2<Complex64>>,
    pub dimension: usize,
}

impl BandStructure {
    pub fn n_bands(&self) -> usize {
        self.energies.ncols()
    }

    pub fn min_energy(&self) -> f64 {
        self.energies.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_energy(&self) -> f64 {
        self.energies.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest nearest-sample spacing of the sorted energy samples; sets the
    /// LDOS kernel scale.
    pub fn max_energy_spacing(&self) -> f64 {
        let mut evs: Vec<f64> = self.energies.iter().copied().collect();
        evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        evs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

/// Diagonalize h(k) on a uniform grid with `k_resolution` points per
/// dimension (k ∈ [0, 2π), matching the discrete momenta of a periodic
/// lattice with that many cells).
pub fn band_structure(spec: &BlochSpec, k_resolution: usize) -> Result<BandStructure> {
    if k_resolution < 2 {
        return Err(Error::InvalidArgument("k_resolution must be ≥ 2".into()));
    }
    let res = spec.hermiticity_residual();
    if res > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "Bloch spec produces non-Hermitian h(k): residual {res:.2e}"
        )));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut k_grid = Vec::new();
    match spec.dimension {
        1 => {
            for m in 0..k_resolution {
                k_grid.push([two_pi * m as f64 / k_resolution as f64, 0.0]);
            }
        }
        2 => {
            for a in 0..k_resolution {
                for b in 0..k_resolution {
                    k_grid.push([
                        two_pi * a as f64 / k_resolution as f64,
                        two_pi * b as f64 / k_resolution as f64,
                    ]);
                }
            }
        }
        d => return Err(Error::InvalidArgument(format!("unsupported dimension {d}"))),
    }
    let ns = spec.sublattice_count;
    let results = crate::par::map_grid(&k_grid, |&k| {
        let h = spec.h_k(k);
        linalg::eigh_complex(&h)
    });
    let nk = k_grid.len();
    let mut energies = Array2::zeros((nk, ns));
    let mut bloch_vectors = Vec::with_capacity(nk);
    for (ik, r) in results.into_iter().enumerate() {
        let (w, v) = r?;
        for b in 0..ns {
            energies[[ik, b]] = w[b];
        }
        bloch_vectors.push(v);
    }
    Ok(BandStructure { k_grid, energies, bloch_vectors, dimension: spec.dimension })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn chain_examples() {
        let b = build_chain(3, 1.0, 0.0, Boundary::Open).unwrap();
        let d = b.diagonalize().unwrap();
        assert_abs_diff_eq!(d.eigenvalues[0], -(2.0f64).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(d.eigenvalues[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.eigenvalues[2], (2.0f64).sqrt(), epsilon = 1e-12);

        let b2 = build_chain(2, 1.0, 5.0, Boundary::Open).unwrap();
        let d2 = b2.diagonalize().unwrap();
        assert_abs_diff_eq!(d2.eigenvalues[0], 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d2.eigenvalues[1], 6.0, epsilon = 1e-12);
    }

    #[test]
    fn chain_analytic_path_matches_lapack() {
        // Break the fast-path detection by using a periodic chain, then
        // compare against the open chain solved analytically.
        let open = build_chain(12, 1.0, 0.3, Boundary::Open).unwrap();
        let d = open.diagonalize().unwrap();
        // brute-force via complex LAPACK on the same Hamiltonian
        let (w, _) = linalg::eigh_complex(&open.hamiltonian()).unwrap();
        for m in 0..12 {
            assert_abs_diff_eq!(d.eigenvalues[m], w[m], epsilon = 1e-10);
        }
    }

    #[test]
    fn vacancy_splits_chain() {
        let b = build_chain(3, 1.0, 0.7, Boundary::Open).unwrap();
        let v = b.apply_vacancy(1).unwrap();
        assert_eq!(v.n_sites(), 2);
        let d = v.diagonalize().unwrap();
        assert_abs_diff_eq!(d.eigenvalues[0], 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(d.eigenvalues[1], 0.7, epsilon = 1e-12);
    }

    #[test]
    fn graphene_coordination() {
        let g = build_graphene(4, 4, 1.0, 0.0, Boundary::Periodic).unwrap();
        let adj = g.adjacency();
        for row in adj {
            assert_eq!(row.len(), 3);
        }
    }

    #[test]
    fn square_band_edges() {
        let s = build_square(8, 8, 1.0, 0.0, Boundary::Periodic).unwrap();
        let d = s.diagonalize().unwrap();
        assert_abs_diff_eq!(d.eigenvalues[0], -4.0, epsilon = 1e-10);
        assert_abs_diff_eq!(d.eigenvalues[d.n() - 1], 4.0, epsilon = 1e-10);
    }

    #[test]
    fn lieb_every_hopping_is_j() {
        let l = build_lieb_nnn(3, 3, 1.0, Boundary::Open).unwrap();
        for &(_, _, t) in &l.hoppings {
            assert_abs_diff_eq!(t.norm(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn periodic_spectra_match_bloch() {
        // chain
        let n = 10;
        let b = build_chain(n, 1.0, 0.2, Boundary::Periodic).unwrap();
        let mut finite: Vec<f64> = b.diagonalize().unwrap().eigenvalues.to_vec();
        let bands = band_structure(&BlochSpec::chain(1.0, 0.2), n).unwrap();
        let mut bloch: Vec<f64> = bands.energies.iter().copied().collect();
        finite.sort_by(|a, b| a.partial_cmp(b).unwrap());
        bloch.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (f, bl) in finite.iter().zip(bloch.iter()) {
            assert_abs_diff_eq!(f, bl, epsilon = 1e-10);
        }
        // graphene, square, lieb at small sizes
        for (bath, spec, cells) in [
            (build_graphene(4, 4, 1.0, 0.1, Boundary::Periodic).unwrap(), BlochSpec::graphene(1.0, 0.1), 4usize),
            (build_square(5, 5, 1.0, 0.0, Boundary::Periodic).unwrap(), BlochSpec::square(1.0, 0.0), 5),
            (build_lieb_nnn(4, 4, 1.0, Boundary::Periodic).unwrap(), BlochSpec::lieb_nnn(1.0), 4),
        ] {
            let mut finite: Vec<f64> = bath.diagonalize().unwrap().eigenvalues.to_vec();
            let bands = band_structure(&spec, cells).unwrap();
            let mut bloch: Vec<f64> = bands.energies.iter().copied().collect();
            finite.sort_by(|a, b| a.partial_cmp(b).unwrap());
            bloch.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(finite.len(), bloch.len());
            for (f, bl) in finite.iter().zip(bloch.iter()) {
                assert_abs_diff_eq!(f, bl, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn chain_band_edge_convergence() {
        // edges approach ±2J with O(1/L²) error
        let mut prev = f64::INFINITY;
        for l in [50usize, 100, 200] {
            let d = build_chain(l, 1.0, 0.0, Boundary::Open).unwrap().diagonalize().unwrap();
            let err = (d.eigenvalues[l - 1] - 2.0).abs();
            assert!(err < prev);
            assert!(err < 40.0 / (l as f64 * l as f64));
            prev = err;
        }
    }

    #[test]
    fn lieb_bands_touch_at_zone_corner() {
        let spec = BlochSpec::lieb_nnn(1.0);
        let pi = std::f64::consts::PI;
        let h = spec.h_k([pi, pi]);
        let (w, _) = linalg::eigh_complex(&h).unwrap();
        // all three bands meet at the corner
        assert_abs_diff_eq!(w[0], w[1], epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], w[2], epsilon = 1e-12);
    }

    #[test]
    fn graphene_dirac_degeneracy() {
        let spec = BlochSpec::graphene(1.0, 0.4);
        // Dirac point of this gauge: 1 + e^{ik1} + e^{ik2} = 0 at k = (2π/3, -2π/3)
        let k = [2.0 * std::f64::consts::PI / 3.0, -2.0 * std::f64::consts::PI / 3.0];
        let (w, _) = linalg::eigh_complex(&spec.h_k(k)).unwrap();
        assert_abs_diff_eq!(w[0], 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 0.4, epsilon = 1e-12);
    }

    #[test]
    fn invalid_geometries_rejected() {
        assert!(build_chain(1, 1.0, 0.0, Boundary::Open).is_err());
        assert!(build_graphene(1, 5, 1.0, 0.0, Boundary::Open).is_err());
        assert!(build_square(5, 1, 1.0, 0.0, Boundary::Open).is_err());
        assert!(build_lieb_nnn(1, 1, 1.0, Boundary::Open).is_err());
        // self-hopping
        let labels = vec![SiteLabel::Linear(0), SiteLabel::Linear(1)];
        assert!(BathGraph::new(
            labels,
            vec![0.0; 2],
            vec![(0, 0, Complex64::new(1.0, 0.0))],
            Boundary::Open
        )
        .is_err());
    }
}
