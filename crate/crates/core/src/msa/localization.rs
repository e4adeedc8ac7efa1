use std::collections::{HashMap, HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::fermi::{Domain, FermiConfig, Lattice};
use crate::hamiltonian::Spectrum;
use crate::stats::{fit_line, LineFit};
use crate::{Error, Result};

const VISIT_BUDGET: usize = 2_000_000;

/// Graph distances from `source` to every member of `domain`, measured in
/// the configuration graph of the whole lattice.
fn distance_row(source: &FermiConfig, domain: &Domain, lattice: &Lattice) -> Result<Vec<usize>> {
    let mut row = vec![usize::MAX; domain.len()];
    let mut remaining = domain.len();
    let mut seen = HashSet::from([source.clone()]);
    let mut queue = VecDeque::from([(source.clone(), 0usize)]);
    while let Some((x, d)) = queue.pop_front() {
        if let Some(i) = domain.index_of(&x) {
            row[i] = d;
            remaining -= 1;
            if remaining == 0 {
                return Ok(row);
            }
        }
        for y in lattice.neighbors(&x) {
            if seen.insert(y.clone()) {
                if seen.len() > VISIT_BUDGET {
                    return Err(Error::BudgetExceeded { what: "distance search", budget: VISIT_BUDGET });
                }
                queue.push_back((y, d + 1));
            }
        }
    }
    Err(Error::InvalidParameter("domain is not connected to the source".into()))
}

/// All-pairs graph distances between domain members.
pub fn distance_table(domain: &Domain, lattice: &Lattice) -> Result<Vec<Vec<usize>>> {
    domain.members().par_iter().map(|x| distance_row(x, domain, lattice)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenLocalization {
    pub energy: f64,
    /// Indices where `|ψ|` attains its maximum (relative tolerance 1e-12).
    pub centers: Vec<usize>,
    pub peak_mass: f64,
    /// Fit of `−ln|ψ(y)|` against the distance to the first centre; the slope is the decay rate.
    pub decay: Option<LineFit>,
    pub unimodal: bool,
}

impl EigenLocalization {
    pub fn decay_rate(&self) -> Option<f64> {
        self.decay.map(|f| f.slope)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalizationReport {
    pub states: Vec<EigenLocalization>,
    /// Every state has a single centre and the centres are pairwise distinct,
    /// hence in bijection with the domain.
    pub bijection: bool,
}

impl LocalizationReport {
    pub fn all_unimodal(&self) -> bool {
        self.states.iter().all(|s| s.unimodal)
    }

    /// Mean fitted decay rate over states that admit a fit.
    pub fn mean_decay_rate(&self) -> Option<f64> {
        let rates: Vec<f64> = self.states.iter().filter_map(EigenLocalization::decay_rate).collect();
        (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64)
    }
}

const NOISE_FLOOR: f64 = 1e-14;

pub fn localization_report(spectrum: &Spectrum, domain: &Domain, lattice: &Lattice) -> Result<LocalizationReport> {
    if spectrum.vectors.nrows() != domain.len() {
        return Err(Error::Mismatch("spectrum and domain sizes differ".into()));
    }
    let mut rows: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut states = Vec::with_capacity(spectrum.len());
    for k in 0..spectrum.len() {
        let psi = spectrum.vectors.column(k);
        let peak = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let centers: Vec<usize> = (0..psi.len()).filter(|&i| psi[i].abs() >= peak * (1.0 - 1e-12)).collect();
        let c = centers[0];
        if let std::collections::hash_map::Entry::Vacant(slot) = rows.entry(c) {
            slot.insert(distance_row(domain.get(c), domain, lattice)?);
        }
        let dist = &rows[&c];
        let points: Vec<(f64, f64)> = (0..psi.len())
            .filter(|&i| psi[i].abs() >= NOISE_FLOOR)
            .map(|i| (dist[i] as f64, -psi[i].abs().ln()))
            .collect();
        let peak_mass = peak * peak;
        states.push(EigenLocalization {
            energy: spectrum.values[k],
            unimodal: peak_mass > 0.5 && centers.len() == 1,
            centers,
            peak_mass,
            decay: fit_line(&points),
        });
    }
    let mut used = HashSet::new();
    let bijection = states.len() == domain.len() && states.iter().all(|s| s.centers.len() == 1 && used.insert(s.centers[0]));
    Ok(LocalizationReport { states, bijection })
}
