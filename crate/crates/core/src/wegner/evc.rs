use serde::Serialize;

use crate::fermi::{ball, weakly_separated, Cube, FermiConfig, Witness};
use crate::hamiltonian::{assemble, diagonalize, Model, SitePotential};
use crate::torus::TorusPoint;
use crate::{Error, Result};

/// The model potential plus a constant on the sites of a cube.
struct Raised<'a, P> {
    base: P,
    cube: &'a Cube,
    constant: f64,
}

impl<P: SitePotential> SitePotential for Raised<'_, P> {
    fn site_value(&self, site: &[i64]) -> Result<f64> {
        let v = self.base.site_value(site)?;
        Ok(if self.cube.contains(site) { v + self.constant } else { v })
    }
}

/// Eigenvalue response of one ball to raising the potential on the cube.
#[derive(Clone, Debug, Serialize)]
pub struct BallShift {
    pub center: FermiConfig,
    /// `(λ_k(c) − λ_k(0)) / (g c)` in eigenvalue order.
    pub ratios: Vec<f64>,
    /// Occupation of the cube averaged in each unperturbed eigenvector.
    pub first_order: Vec<f64>,
    pub min_count: usize,
    pub max_count: usize,
}

impl BallShift {
    pub fn min_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EvcReport {
    pub constant: f64,
    pub witness: Witness,
    /// The ball whose center has more particles in the cube.
    pub dominant: BallShift,
    pub other: BallShift,
}

impl EvcReport {
    /// Every eigenvalue of the dominant ball moves strictly faster than every
    /// eigenvalue of the other one.
    pub fn separated(&self) -> bool {
        self.dominant.min_ratio() > self.other.max_ratio()
    }
}

fn ball_shift(model: &Model, center: &FermiConfig, radius: usize, omega: &TorusPoint, cube: &Cube, constant: f64) -> Result<BallShift> {
    let b = ball(center, radius, &model.lattice)?;
    let before = diagonalize(&model.assemble(&b.domain, omega)?)?;
    let raised = Raised { base: model.potential(omega), cube, constant };
    let after = diagonalize(&assemble(&b.domain, &model.lattice, &raised, model.g, model.interaction.as_ref(), model.kinetic)?)?;
    let counts: Vec<usize> = b.domain.members().iter().map(|x| cube.count(x)).collect();
    let scale = model.g * constant;
    let ratios = if scale == 0.0 {
        vec![0.0; before.values.len()]
    } else {
        before.values.iter().zip(&after.values).map(|(a, b)| (b - a) / scale).collect()
    };
    let first_order = before
        .vectors
        .column_iter()
        .map(|v| v.iter().zip(&counts).map(|(a, &n)| a * a * n as f64).sum())
        .collect();
    Ok(BallShift {
        center: center.clone(),
        ratios,
        first_order,
        min_count: counts.iter().copied().min().unwrap_or(0),
        max_count: counts.iter().copied().max().unwrap_or(0),
    })
}

/// Raises the potential by `constant` on the weak-separation cube of the
/// pair and records how both ball spectra respond.
pub fn evc_pair_bound_check(model: &Model, first: &FermiConfig, second: &FermiConfig, radius: usize, omega: &TorusPoint, constant: f64) -> Result<EvcReport> {
    let witness = weakly_separated(first, second, radius)?.ok_or(Error::NotSeparated)?;
    let (more, less) = if witness.first_dominates { (first, second) } else { (second, first) };
    let dominant = ball_shift(model, more, radius, omega, &witness.cube, constant)?;
    let other = ball_shift(model, less, radius, omega, &witness.cube, constant)?;
    Ok(EvcReport { constant, witness, dominant, other })
}
