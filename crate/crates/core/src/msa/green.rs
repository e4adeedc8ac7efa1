use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::fermi::{Domain, FermiConfig};
use crate::hamiltonian::{FiniteHamiltonian, Spectrum};
use crate::{Error, Result};

/// `(H − E)^(-1)` together with the distance from `E` to the spectrum.
#[derive(Clone, Debug)]
pub struct Resolvent {
    pub energy: f64,
    pub margin: f64,
    pub matrix: DMatrix<f64>,
}

fn shifted(h: &FiniteHamiltonian, energy: f64) -> DMatrix<f64> {
    let n = h.len();
    &h.matrix - DMatrix::identity(n, n) * energy
}

/// Dense resolvent. Refuses energies within `1e-12·‖H‖` of the spectrum.
pub fn resolvent(h: &FiniteHamiltonian, spectrum: Option<&Spectrum>, energy: f64) -> Result<Resolvent> {
    if h.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let margin = match spectrum {
        Some(s) => s.distance_to(energy),
        None => h.matrix.clone().symmetric_eigenvalues().iter().map(|e| (e - energy).abs()).fold(f64::INFINITY, f64::min),
    };
    if margin <= 1e-12 * h.matrix.norm().max(1.0) {
        return Err(Error::Resonant { energy, margin });
    }
    let matrix = shifted(h, energy).lu().try_inverse().ok_or(Error::Resonant { energy, margin })?;
    Ok(Resolvent { energy, margin, matrix })
}

#[derive(Clone, Debug, Serialize)]
pub struct GreenData {
    pub energy: f64,
    pub margin: f64,
    pub values: Vec<(FermiConfig, FermiConfig, f64)>,
    /// `max |(H − E)G − I|`.
    pub residual: f64,
    /// `max |G − Gᵀ|`.
    pub asymmetry: f64,
}

pub fn green(h: &FiniteHamiltonian, energy: f64, pairs: &[(FermiConfig, FermiConfig)]) -> Result<GreenData> {
    let r = resolvent(h, None, energy)?;
    let n = h.len();
    let residual = (shifted(h, energy) * &r.matrix - DMatrix::identity(n, n)).amax();
    let asymmetry = (&r.matrix - r.matrix.transpose()).amax();
    let values = pairs
        .iter()
        .map(|(x, y)| {
            let i = h.domain.index_of(x).ok_or_else(|| Error::InvalidConfig(format!("{x:?} outside domain")))?;
            let j = h.domain.index_of(y).ok_or_else(|| Error::InvalidConfig(format!("{y:?} outside domain")))?;
            Ok((x.clone(), y.clone(), r.matrix[(i, j)]))
        })
        .collect::<Result<_>>()?;
    Ok(GreenData { energy, margin: r.margin, values, residual, asymmetry })
}

/// Two sides of a resolvent identity and their mismatch.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GreDefect {
    pub lhs: f64,
    pub rhs: f64,
    pub defect: f64,
    /// Sum of the magnitudes of all terms entering the identity.
    pub scale: f64,
}

impl GreDefect {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.defect
        } else {
            self.defect / self.scale
        }
    }
}

/// Precomputed data for the geometric resolvent identity on `Λ ⊂ Λ'`:
/// `G'(x,y) = 1_Λ(y)·G(x,y) − Σ_{(z,z') ∈ ∂Λ} G(x,z) H(z,z') G'(z',y)`,
/// where the sum runs over couplings between `Λ` and `Λ' \ Λ`.
pub struct Gre<'a> {
    outer: &'a FiniteHamiltonian,
    inner: Domain,
    inner_green: Resolvent,
    outer_green: Option<Resolvent>,
    /// `(z in inner indexing, z' in outer indexing, H(z,z'))`.
    boundary: Vec<(usize, usize, f64)>,
}

impl<'a> Gre<'a> {
    pub fn new(outer: &'a FiniteHamiltonian, inner: &Domain, energy: f64, with_outer: bool) -> Result<Self> {
        if !inner.is_subset_of(&outer.domain) {
            return Err(Error::InvalidParameter("inner domain must lie inside the outer one".into()));
        }
        let inner_h = outer.restrict(inner)?;
        let inner_green = resolvent(&inner_h, None, energy)?;
        let outer_green = if with_outer { Some(resolvent(outer, None, energy)?) } else { None };
        let mut boundary = Vec::new();
        for (zi, z) in inner.members().iter().enumerate() {
            let zo = outer.domain.index_of(z).expect("subset");
            for (wo, w) in outer.domain.members().iter().enumerate() {
                let hop = outer.matrix[(zo, wo)];
                if hop != 0.0 && !inner.contains(w) {
                    boundary.push((zi, wo, hop));
                }
            }
        }
        Ok(Self { outer, inner: inner.clone(), inner_green, outer_green, boundary })
    }

    pub fn boundary_len(&self) -> usize {
        self.boundary.len()
    }

    fn inner_index(&self, x: &FermiConfig) -> Result<usize> {
        self.inner.index_of(x).ok_or_else(|| Error::InvalidConfig(format!("{x:?} is not in the inner domain")))
    }

    pub fn green_defect(&self, x: &FermiConfig, y: &FermiConfig) -> Result<GreDefect> {
        let gp = self.outer_green.as_ref().ok_or(Error::InvalidParameter("outer resolvent was not computed".into()))?;
        let xi = self.inner_index(x)?;
        let yo = self.outer.domain.index_of(y).ok_or_else(|| Error::InvalidConfig(format!("{y:?} outside outer domain")))?;
        let g = &self.inner_green.matrix;
        let lhs = gp.matrix[(xi_outer(self, x), yo)];
        let mut rhs = 0.0;
        let mut scale = lhs.abs();
        if let Some(yi) = self.inner.index_of(y) {
            rhs += g[(xi, yi)];
            scale += g[(xi, yi)].abs();
        }
        for &(zi, wo, hop) in &self.boundary {
            let t = -g[(xi, zi)] * hop * gp.matrix[(wo, yo)];
            rhs += t;
            scale += t.abs();
        }
        Ok(GreDefect { lhs, rhs, defect: (lhs - rhs).abs(), scale })
    }

    /// `ψ(x) = −Σ G(x,z) H(z,z') ψ(z')` for `x ∈ Λ`, with `ψ` indexed by the outer domain.
    pub fn eigenfunction_defect(&self, psi: &DVector<f64>, x: &FermiConfig) -> Result<GreDefect> {
        let xi = self.inner_index(x)?;
        let lhs = psi[xi_outer(self, x)];
        let g = &self.inner_green.matrix;
        let (mut rhs, mut scale) = (0.0, lhs.abs());
        for &(zi, wo, hop) in &self.boundary {
            let t = -g[(xi, zi)] * hop * psi[wo];
            rhs += t;
            scale += t.abs();
        }
        Ok(GreDefect { lhs, rhs, defect: (lhs - rhs).abs(), scale })
    }
}

fn xi_outer(gre: &Gre<'_>, x: &FermiConfig) -> usize {
    gre.outer.domain.index_of(x).expect("inner member lies in outer domain")
}

pub fn gre_defect(outer: &FiniteHamiltonian, inner: &Domain, energy: f64, x: &FermiConfig, y: &FermiConfig) -> Result<GreDefect> {
    Gre::new(outer, inner, energy, true)?.green_defect(x, y)
}

/// Eigenfunction identity for eigenvector `k` of the outer Hamiltonian.
pub fn gre_eigenfunction_defect(outer: &FiniteHamiltonian, spectrum: &Spectrum, k: usize, inner: &Domain, x: &FermiConfig) -> Result<GreDefect> {
    let psi = spectrum.vectors.column(k).into_owned();
    Gre::new(outer, inner, spectrum.values[k], false)?.eigenfunction_defect(&psi, x)
}
