use rayon::prelude::*;
use serde::Serialize;

use std::collections::HashSet;

use super::classify::singular_on_boundary;
use super::classify_resonant;
use crate::fermi::{ball, boundaries, distances_from, Domain, FermiBall, FermiConfig};
use crate::hamiltonian::{diagonalize, Model, Spectrum};
use crate::torus::TorusPoint;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    Singular,
    Resonant,
}

/// Two distant balls that are simultaneously bad at one energy.
#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub energy: f64,
    pub kind: ViolationKind,
    pub first: FermiConfig,
    pub second: FermiConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct SparsenessReport {
    pub window_size: usize,
    pub balls: usize,
    pub energies: usize,
    /// Largest number of singular balls found at any single energy.
    pub max_singular: usize,
    pub violations: Vec<Violation>,
}

struct Cell {
    ball: FermiBall,
    spectrum: Spectrum,
    inner: Vec<usize>,
    /// Centres within graph distance `3NL` of this one.
    near: HashSet<FermiConfig>,
}

/// For every energy in the grid (all ball eigenvalues plus midpoints),
/// looks for pairs of `3NL`-distant radius-`L` balls inside `window` that
/// are both singular, or both resonant at `resonance_threshold`.
pub fn sparseness_scan(model: &Model, omega: &TorusPoint, window: &Domain, radius: usize, m: f64, resonance_threshold: f64, budget: usize) -> Result<SparsenessReport> {
    if window.len() > budget {
        return Err(Error::BudgetExceeded { what: "sparseness window", budget });
    }
    if window.is_empty() {
        return Ok(SparsenessReport { window_size: 0, balls: 0, energies: 0, max_singular: 0, violations: Vec::new() });
    }
    let gap = 3 * window.get(0).particle_count() * radius;
    let cells: Vec<Cell> = window
        .members()
        .par_iter()
        .filter_map(|x| {
            let b = match ball(x, radius, &model.lattice) {
                Ok(b) => b,
                Err(e) => return Some(Err(e)),
            };
            if !b.domain.is_subset_of(window) {
                return None;
            }
            let inner = boundaries(&b.domain, &model.lattice).inner.iter().map(|y| b.domain.index_of(y).expect("boundary member")).collect();
            let near = distances_from(x, gap, &model.lattice).into_keys().collect();
            Some(model.assemble(&b.domain, omega).and_then(|h| diagonalize(&h)).map(|spectrum| Cell { ball: b, spectrum, inner, near }))
        })
        .collect::<Result<_>>()?;
    let mut levels: Vec<f64> = cells.iter().flat_map(|c| c.spectrum.values.iter().copied()).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut energies = levels.clone();
    energies.extend(levels.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    energies.sort_by(f64::total_cmp);

    let per_energy: Vec<(usize, Vec<Violation>)> = energies
        .par_iter()
        .map(|&e| {
            let mut singular = Vec::new();
            let mut resonant = Vec::new();
            for c in &cells {
                if !singular_on_boundary(&c.ball, &c.spectrum, &c.inner, e, m).nonsingular {
                    singular.push(c);
                }
                if !classify_resonant(&c.spectrum.values, e, resonance_threshold).nonresonant {
                    resonant.push(c);
                }
            }
            let mut found = Vec::new();
            for (kind, list) in [(ViolationKind::Singular, &singular), (ViolationKind::Resonant, &resonant)] {
                for i in 0..list.len() {
                    for j in i + 1..list.len() {
                        let (a, b) = (&list[i].ball.center, &list[j].ball.center);
                        if !list[i].near.contains(b) {
                            found.push(Violation { energy: e, kind, first: a.clone(), second: b.clone() });
                        }
                    }
                }
            }
            (singular.len(), found)
        })
        .collect();
    Ok(SparsenessReport {
        window_size: window.len(),
        balls: cells.len(),
        energies: energies.len(),
        max_singular: per_energy.iter().map(|p| p.0).max().unwrap_or(0),
        violations: per_energy.into_iter().flat_map(|p| p.1).collect(),
    })
}
