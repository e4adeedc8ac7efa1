use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{diagonalize, Interaction};
use crate::fermi::{ball, Domain, FermiConfig, Lattice};
use crate::haarsh::{log2_coeff_a, HaarshHull};
use crate::torus::{ShiftSystem, TorusPoint};
use crate::{Error, Result};

/// Kinetic term: the negative graph Laplacian (coordination number on the
/// diagonal, `-1` on edges) or the plain adjacency operator (`+1` on edges).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kinetic {
    #[default]
    Laplacian,
    Adjacency,
}

/// Single-particle potential; configurations carry the sum over their sites.
pub trait SitePotential: Sync {
    fn site_value(&self, site: &[i64]) -> Result<f64>;
}

impl<F: Fn(&[i64]) -> f64 + Sync> SitePotential for F {
    fn site_value(&self, site: &[i64]) -> Result<f64> {
        Ok(self(site))
    }
}

/// `x ↦ v_N(T^x ω)`.
#[derive(Clone, Copy, Debug)]
pub struct HullPotential<'a> {
    pub hull: &'a HaarshHull,
    pub system: &'a ShiftSystem,
    pub omega: &'a TorusPoint,
    pub truncation: u32,
}

impl SitePotential for HullPotential<'_> {
    fn site_value(&self, site: &[i64]) -> Result<f64> {
        Ok(self.hull.value(&self.system.translate(self.omega, site), self.truncation)?.value)
    }
}

#[derive(Clone, Debug)]
pub struct FiniteHamiltonian {
    pub domain: Domain,
    pub g: f64,
    pub kinetic: Kinetic,
    pub matrix: DMatrix<f64>,
}

impl FiniteHamiltonian {
    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    /// Matrix element between two members, zero if either is outside.
    pub fn entry(&self, x: &FermiConfig, y: &FermiConfig) -> f64 {
        match (self.domain.index_of(x), self.domain.index_of(y)) {
            (Some(i), Some(j)) => self.matrix[(i, j)],
            _ => 0.0,
        }
    }

    /// Restriction to a subdomain (Dirichlet truncation).
    pub fn restrict(&self, sub: &Domain) -> Result<FiniteHamiltonian> {
        if sub.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let idx: Vec<usize> = sub
            .members()
            .iter()
            .map(|m| self.domain.index_of(m).ok_or_else(|| Error::InvalidConfig(format!("{m:?} is outside the domain"))))
            .collect::<Result<_>>()?;
        let matrix = DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.matrix[(idx[a], idx[b])]);
        Ok(FiniteHamiltonian { domain: sub.clone(), g: self.g, kinetic: self.kinetic, matrix })
    }
}

/// Builds `H_Λ` on `domain`, with hopping along configuration-graph edges of
/// `lattice` that stay inside the domain.
pub fn assemble(
    domain: &Domain,
    lattice: &Lattice,
    potential: &dyn SitePotential,
    g: f64,
    interaction: Option<&Interaction>,
    kinetic: Kinetic,
) -> Result<FiniteHamiltonian> {
    if domain.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let sites: BTreeSet<&[i64]> = domain.members().iter().flat_map(|m| m.sites()).collect();
    let site_values: HashMap<&[i64], f64> = sites
        .into_par_iter()
        .map(|s| potential.site_value(s).map(|v| (s, v)))
        .collect::<Result<_>>()?;
    let rows: Vec<(f64, Vec<usize>)> = domain
        .members()
        .par_iter()
        .map(|x| {
            let mut diag = g * x.sites().map(|s| site_values[s]).sum::<f64>();
            if let Some(u) = interaction {
                diag += u.energy(x);
            }
            if kinetic == Kinetic::Laplacian {
                diag += lattice.degree(x) as f64;
            }
            let links = lattice.neighbors(x).iter().filter_map(|y| domain.index_of(y)).collect();
            (diag, links)
        })
        .collect();
    let hop = match kinetic {
        Kinetic::Laplacian => -1.0,
        Kinetic::Adjacency => 1.0,
    };
    let n = domain.len();
    let mut matrix = DMatrix::zeros(n, n);
    for (i, (diag, links)) in rows.into_iter().enumerate() {
        matrix[(i, i)] = diag;
        for j in links {
            matrix[(i, j)] = hop;
        }
    }
    Ok(FiniteHamiltonian { domain: domain.clone(), g, kinetic, matrix })
}

/// Everything needed to build `H(ω; θ)` on any domain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Model {
    pub lattice: Lattice,
    pub system: ShiftSystem,
    pub hull: HaarshHull,
    /// Hull generation used for the potential.
    pub truncation: u32,
    pub g: f64,
    pub interaction: Option<Interaction>,
    pub kinetic: Kinetic,
}

/// A Hamiltonian with truncated hull and interaction, and a bound on its
/// operator-norm distance to the reference model.
#[derive(Clone, Debug)]
pub struct TruncatedHamiltonian {
    pub hamiltonian: FiniteHamiltonian,
    pub norm_bound: f64,
}

impl Model {
    pub fn potential<'a>(&'a self, omega: &'a TorusPoint) -> HullPotential<'a> {
        HullPotential { hull: &self.hull, system: &self.system, omega, truncation: self.truncation }
    }

    pub fn assemble(&self, domain: &Domain, omega: &TorusPoint) -> Result<FiniteHamiltonian> {
        assemble(domain, &self.lattice, &self.potential(omega), self.g, self.interaction.as_ref(), self.kinetic)
    }

    pub fn with_theta(&self, theta: crate::haarsh::ThetaField) -> Model {
        let mut m = self.clone();
        m.hull.theta = theta;
        m
    }

    /// Uses hull generations `≤ truncation` and interaction pairs within `cutoff`.
    /// The difference to the reference operator is diagonal, so its norm is
    /// bounded by the largest discarded diagonal contribution.
    pub fn truncated(&self, domain: &Domain, omega: &TorusPoint, truncation: u32, cutoff: Option<u64>) -> Result<TruncatedHamiltonian> {
        if truncation > self.truncation {
            return Err(Error::InvalidParameter(format!("truncation {truncation} is deeper than the model's {}", self.truncation)));
        }
        let interaction = self.interaction.map(|u| {
            let eff = match (cutoff, u.cutoff) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            u.with_cutoff(eff)
        });
        let potential = HullPotential { hull: &self.hull, system: &self.system, omega, truncation };
        let hamiltonian = assemble(domain, &self.lattice, &potential, self.g, interaction.as_ref(), self.kinetic)?;
        let hull_gap: f64 = (truncation + 1..=self.truncation).map(|n| log2_coeff_a(n, self.hull.b).exp2()).sum();
        let particles = domain.get(0).particle_count() as f64;
        let pair_gap = match (interaction, self.interaction) {
            (Some(cut), Some(full)) => domain
                .members()
                .iter()
                .map(|x| (full.energy(x) - cut.energy(x)).abs())
                .fold(0.0, f64::max),
            _ => 0.0,
        };
        Ok(TruncatedHamiltonian { hamiltonian, norm_bound: self.g.abs() * particles * hull_gap + pair_gap })
    }
}

/// Largest eigenvalue deviation between `H` on the ball around `base + shift`
/// at `ω` and `H` on the ball around `base` at `T^shift ω`. Both must agree
/// for a translation-covariant model on the full lattice.
pub fn covariance_check(model: &Model, base: &FermiConfig, shift: &[i64], radius: usize, omega: &TorusPoint) -> Result<f64> {
    if !matches!(model.lattice, Lattice::Full { .. }) {
        return Err(Error::InvalidParameter("covariance needs the full lattice".into()));
    }
    let moved = ball(&base.translate(shift), radius, &model.lattice)?;
    let origin = ball(base, radius, &model.lattice)?;
    let a = diagonalize(&model.assemble(&moved.domain, omega)?)?;
    let b = diagonalize(&model.assemble(&origin.domain, &model.system.translate(omega, shift))?)?;
    Ok(a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}
