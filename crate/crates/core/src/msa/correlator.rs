use std::collections::BTreeMap;

use serde::Serialize;

use crate::hamiltonian::Spectrum;
use crate::stats::{fit_line, LineFit};

/// `Σ_z |ψ_z(x) ψ_z(y)|`, which dominates every `|⟨1_x|φ(H)|1_y⟩|` with `‖φ‖_∞ ≤ 1`.
pub fn envelope(spectrum: &Spectrum, x: usize, y: usize) -> f64 {
    let v = &spectrum.vectors;
    (0..spectrum.len()).map(|z| (v[(x, z)] * v[(y, z)]).abs()).sum()
}

/// `⟨1_x|φ(H)|1_y⟩ = Σ_z ψ_z(x) φ(λ_z) ψ_z(y)`.
pub fn functional(spectrum: &Spectrum, x: usize, y: usize, phi: impl Fn(f64) -> f64) -> f64 {
    let v = &spectrum.vectors;
    (0..spectrum.len()).map(|z| v[(x, z)] * phi(spectrum.values[z]) * v[(y, z)]).sum()
}

/// `|⟨1_x|e^(−itH)|1_y⟩|`.
pub fn propagator(spectrum: &Spectrum, x: usize, y: usize, t: f64) -> f64 {
    let v = &spectrum.vectors;
    let (mut re, mut im) = (0.0, 0.0);
    for z in 0..spectrum.len() {
        let w = v[(x, z)] * v[(y, z)];
        let phase = t * spectrum.values[z];
        re += w * phase.cos();
        im -= w * phase.sin();
    }
    re.hypot(im)
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrelatorReport {
    pub pairs: usize,
    /// Fit of `ln(max envelope at distance ρ)` against `ρ`.
    pub fit: Option<LineFit>,
    /// `m'` in `C·e^(−m'ρ)`.
    pub decay_rate: Option<f64>,
    pub prefactor: Option<f64>,
    /// Largest `|propagator| − envelope` over all pairs and sampled times, floored at 0.
    pub max_excess: f64,
}

/// Envelope decay over all pairs of a domain given its distance table. The
/// fit uses the largest envelope at each distance, since the claim is an
/// upper bound.
pub fn correlator_report(spectrum: &Spectrum, distances: &[Vec<usize>], times: &[f64]) -> CorrelatorReport {
    let n = spectrum.len();
    let mut upper: BTreeMap<usize, f64> = BTreeMap::new();
    let mut max_excess = 0.0f64;
    for (x, row) in distances.iter().enumerate().take(n) {
        for (y, &rho) in row.iter().enumerate().take(n).skip(x) {
            let env = envelope(spectrum, x, y);
            let slot = upper.entry(rho).or_insert(0.0);
            *slot = slot.max(env);
            for &t in times {
                max_excess = max_excess.max(propagator(spectrum, x, y, t) - env);
            }
        }
    }
    let points: Vec<(f64, f64)> = upper.iter().filter(|(_, &e)| e > 0.0).map(|(&d, &e)| (d as f64, e.ln())).collect();
    let fit = fit_line(&points);
    CorrelatorReport {
        pairs: n * (n + 1) / 2,
        decay_rate: fit.map(|f| -f.slope),
        prefactor: fit.map(|f| f.intercept.exp()),
        fit,
        max_excess,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::diagonalize_matrix;
    use nalgebra::DMatrix;

    fn chain(n: usize) -> Spectrum {
        let m = DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { -1.0 } else if i == j { (i as f64).cos() } else { 0.0 });
        diagonalize_matrix(&m).unwrap()
    }

    #[test]
    fn parseval_and_time_zero() {
        let s = chain(7);
        for x in 0..7 {
            assert!((functional(&s, x, x, |_| 1.0) - 1.0).abs() < 1e-13);
            for y in 0..7 {
                let expected = if x == y { 1.0 } else { 0.0 };
                assert!((propagator(&s, x, y, 0.0) - expected).abs() < 1e-13);
                assert!(propagator(&s, x, y, 3.7) <= envelope(&s, x, y) + 1e-12);
            }
        }
    }
}
