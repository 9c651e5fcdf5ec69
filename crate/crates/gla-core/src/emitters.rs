//! Emitters with multi-point bath couplings and the combined
//! single-excitation Hamiltonian.
//!
//! An emitter couples to a set of bath sites with complex amplitudes g_ℓ. Its
//! whole interaction is carried by one normalized bath mode
//! χ = Σ_ℓ (g_ℓ/ḡ)|x_ℓ⟩ with ḡ = √(Σ_ℓ |g_ℓ|²), so every downstream quantity
//! (self-energy, rates, bound states) reduces to matrix elements between χ
//! profiles.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::BathGraph;
use crate::error::{Error, Result};

/// Two-level emitter attached to the bath at one or more sites.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GiantAtom {
    /// Transition frequency (same units and zero as the bath).
    pub omega0: f64,
    /// (bath site index, coupling amplitude g_ℓ); sites must be distinct.
    pub couplings: Vec<(usize, Complex64)>,
}

impl GiantAtom {
    pub fn new(omega0: f64, couplings: Vec<(usize, Complex64)>) -> Result<Self> {
        if couplings.is_empty() {
            return Err(Error::InvalidArgument("emitter has no coupling points".into()));
        }
        let mut sites: Vec<usize> = couplings.iter().map(|&(s, _)| s).collect();
        sites.sort_unstable();
        sites.dedup();
        if sites.len() != couplings.len() {
            return Err(Error::InvalidArgument(
                "emitter couples twice to the same site; merge the amplitudes".into(),
            ));
        }
        let atom = GiantAtom { omega0, couplings };
        if atom.g_bar() == 0.0 {
            return Err(Error::InvalidArgument("emitter has zero total coupling".into()));
        }
        Ok(atom)
    }

    /// Uniform-amplitude convenience constructor.
    pub fn uniform(omega0: f64, g: f64, sites: &[usize]) -> Result<Self> {
        GiantAtom::new(
            omega0,
            sites.iter().map(|&s| (s, Complex64::new(g, 0.0))).collect(),
        )
    }

    /// Collective coupling strength ḡ = √(Σ_ℓ |g_ℓ|²).
    pub fn g_bar(&self) -> f64 {
        self.couplings.iter().map(|(_, g)| g.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Normalized coupling profile as a sparse list (site, g_ℓ/ḡ).
    pub fn chi_sparse(&self) -> Vec<(usize, Complex64)> {
        let gb = self.g_bar();
        self.couplings.iter().map(|&(s, g)| (s, g / gb)).collect()
    }

    /// Normalized coupling profile as a dense bath-space vector.
    pub fn chi_dense(&self, n_sites: usize) -> Result<Array1<Complex64>> {
        let mut chi = Array1::zeros(n_sites);
        let gb = self.g_bar();
        for &(s, g) in &self.couplings {
            if s >= n_sites {
                return Err(Error::IndexError(format!(
                    "coupling site {s} out of range (bath has {n_sites} sites)"
                )));
            }
            chi[s] = g / gb;
        }
        Ok(chi)
    }

    pub fn validate_against(&self, bath: &BathGraph) -> Result<()> {
        let n = bath.n_sites();
        for &(s, _) in &self.couplings {
            if s >= n {
                return Err(Error::IndexError(format!(
                    "coupling site {s} out of range (bath has {n} sites)"
                )));
            }
        }
        Ok(())
    }
}

/// Overlap ⟨χ_j|χ_j'⟩ of two sparse profiles.
pub fn chi_overlap(a: &[(usize, Complex64)], b: &[(usize, Complex64)]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for &(sa, ca) in a {
        for &(sb, cb) in b {
            if sa == sb {
                s += ca.conj() * cb;
            }
        }
    }
    s
}

/// A bath plus a set of emitters, sharing one single-excitation sector.
#[derive(Clone, Debug)]
pub struct EmitterEnsemble {
    pub bath: BathGraph,
    pub atoms: Vec<GiantAtom>,
}

impl EmitterEnsemble {
    pub fn new(bath: BathGraph, atoms: Vec<GiantAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidArgument("ensemble has no emitters".into()));
        }
        for a in &atoms {
            a.validate_against(&bath)?;
        }
        Ok(EmitterEnsemble { bath, atoms })
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    /// Total dimension of the single-excitation sector: emitters first, then
    /// bath sites in bath order.
    pub fn dim(&self) -> usize {
        self.atoms.len() + self.bath.n_sites()
    }

    /// Dense single-excitation Hamiltonian with basis
    /// {|e_1⟩, …, |e_N⟩, |x_0⟩, …, |x_{n−1}⟩}.
    pub fn total_hamiltonian_1ex(&self) -> Array2<Complex64> {
        let na = self.atoms.len();
        let n = self.bath.n_sites();
        let dim = na + n;
        let mut h = Array2::zeros((dim, dim));
        for (j, atom) in self.atoms.iter().enumerate() {
            h[[j, j]] = Complex64::new(atom.omega0, 0.0);
            for &(s, g) in &atom.couplings {
                // ⟨x_s|H|e_j⟩ = g_ℓ
                h[[na + s, j]] = g;
                h[[j, na + s]] = g.conj();
            }
        }
        let hb = self.bath.hamiltonian();
        for i in 0..n {
            for k in 0..n {
                h[[na + i, na + k]] = hb[[i, k]];
            }
        }
        h
    }

    /// Gram matrix of the normalized coupling profiles.
    pub fn chi_gram(&self) -> Array2<Complex64> {
        let na = self.atoms.len();
        let chis: Vec<_> = self.atoms.iter().map(|a| a.chi_sparse()).collect();
        Array2::from_shape_fn((na, na), |(i, j)| chi_overlap(&chis[i], &chis[j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{build_chain, Boundary};
    use approx::assert_abs_diff_eq;

    #[test]
    fn gbar_and_chi() {
        let a = GiantAtom::new(
            0.0,
            vec![(2, Complex64::new(0.3, 0.0)), (5, Complex64::new(0.0, 0.4))],
        )
        .unwrap();
        assert_abs_diff_eq!(a.g_bar(), 0.5, epsilon = 1e-15);
        let chi = a.chi_dense(8).unwrap();
        let norm: f64 = chi.iter().map(|c| c.norm_sqr()).sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(chi[2].re, 0.6, epsilon = 1e-14);
        assert_abs_diff_eq!(chi[5].im, 0.8, epsilon = 1e-14);
    }

    #[test]
    fn duplicate_or_empty_rejected() {
        assert!(GiantAtom::new(0.0, vec![]).is_err());
        assert!(GiantAtom::new(
            0.0,
            vec![(1, Complex64::new(1.0, 0.0)), (1, Complex64::new(1.0, 0.0))]
        )
        .is_err());
        assert!(GiantAtom::uniform(0.0, 0.0, &[1, 2]).is_err());
    }

    #[test]
    fn total_hamiltonian_is_hermitian_and_indexed_correctly() {
        let bath = build_chain(6, 1.0, 0.0, Boundary::Open).unwrap();
        let atom = GiantAtom::uniform(0.2, 0.1, &[1, 3]).unwrap();
        let ens = EmitterEnsemble::new(bath, vec![atom]).unwrap();
        let h = ens.total_hamiltonian_1ex();
        assert_eq!(h.nrows(), 7);
        for i in 0..7 {
            for j in 0..7 {
                assert!((h[[i, j]] - h[[j, i]].conj()).norm() < 1e-15);
            }
        }
        assert_abs_diff_eq!(h[[0, 0]].re, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(h[[2, 0]].re, 0.1, epsilon = 1e-15); // site 1 ↦ row 2
        assert_abs_diff_eq!(h[[4, 0]].re, 0.1, epsilon = 1e-15); // site 3 ↦ row 4
        assert_abs_diff_eq!(h[[2, 3]].re, -1.0, epsilon = 1e-15); // bath hopping
    }

    #[test]
    fn chi_gram_braided_pair() {
        let bath = build_chain(10, 1.0, 0.0, Boundary::Open).unwrap();
        let a1 = GiantAtom::uniform(0.0, 0.1, &[0, 2]).unwrap();
        let a2 = GiantAtom::uniform(0.0, 0.1, &[1, 3]).unwrap();
        let ens = EmitterEnsemble::new(bath, vec![a1, a2]).unwrap();
        let s = ens.chi_gram();
        assert_abs_diff_eq!(s[[0, 0]].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s[[0, 1]].norm(), 0.0, epsilon = 1e-14); // disjoint points
    }
}
