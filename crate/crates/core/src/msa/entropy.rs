use std::collections::HashSet;

use serde::Serialize;

use crate::fermi::Domain;
use crate::haarsh::tail_bound;
use crate::hamiltonian::Model;
use crate::torus::TorusPoint;
use crate::Result;

/// `2^ν · L^(4A + 4A')`.
pub fn entropy_bound(length: u64, a: u32, a_div: u32, nu: usize) -> f64 {
    (nu as f64).exp2() * (length as f64).powi(4 * (a + a_div) as i32)
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyCount {
    pub grid_points: usize,
    pub distinct: usize,
    pub bound: f64,
    pub resolution: f64,
    pub within_bound: bool,
    /// Every grid point gave a new operator, so the grid is too coarse to count.
    pub saturated: bool,
}

/// Counts distinct truncated operators over a set of phase points. Entries
/// are quantized at the hull tail of the truncation generation before
/// comparison.
pub fn equivalence_entropy_check(model: &Model, domain: &Domain, truncation: u32, omegas: &[TorusPoint], bound: f64) -> Result<EntropyCount> {
    let resolution = (model.g.abs() * tail_bound(truncation, model.hull.b)).max(f64::MIN_POSITIVE);
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    for omega in omegas {
        let h = model.truncated(domain, omega, truncation, None)?.hamiltonian;
        // adding 0.0 folds -0.0 into 0.0 so equal values share a key
        seen.insert(h.matrix.iter().map(|v| ((v / resolution).round() + 0.0).to_bits()).collect());
    }
    let distinct = seen.len();
    Ok(EntropyCount {
        grid_points: omegas.len(),
        distinct,
        bound,
        resolution,
        within_bound: distinct as f64 <= bound,
        saturated: distinct == omegas.len() && omegas.len() > 1,
    })
}
