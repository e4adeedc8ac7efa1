use serde::Serialize;

use super::gamma;
use crate::fermi::{boundaries, FermiBall, FermiConfig, Lattice};
use crate::hamiltonian::Spectrum;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResonanceClass {
    pub nonresonant: bool,
    /// Distance from the energy to the spectrum.
    pub margin: f64,
    pub threshold: f64,
}

/// Non-resonant iff `dist(Σ, E) ≥ threshold`; the boundary case counts as non-resonant.
pub fn classify_resonant(eigenvalues: &[f64], energy: f64, threshold: f64) -> ResonanceClass {
    let margin = eigenvalues.iter().map(|e| (e - energy).abs()).fold(f64::INFINITY, f64::min);
    ResonanceClass { nonresonant: margin >= threshold, margin, threshold }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularityClass {
    pub nonsingular: bool,
    pub threshold: f64,
    /// Largest `|G(centre, y; E)|` over the inner boundary.
    pub max_green: f64,
    /// Boundary configuration attaining `max_green`, if the ball is singular.
    pub witness: Option<FermiConfig>,
}

/// Decay threshold for a radius-`radius` ball of `particles` particles in `Z^dim`.
pub fn singular_threshold(radius: u64, particles: usize, dim: usize, m: f64) -> f64 {
    let nd = (particles * dim) as i32;
    if radius == 0 {
        (-gamma(m, 0)).exp() / f64::from(2 * nd)
    } else {
        (3.0 * radius as f64).powi(-nd) * (-gamma(m, radius)).exp()
    }
}

/// `(E, m)`-non-singular iff `|G(centre, y; E)|` stays below the threshold on
/// the whole inner boundary; an energy in the spectrum is always singular.
/// Green values come from the spectral representation `Σ_k ψ_k(c)ψ_k(y)/(λ_k − E)`.
pub fn classify_singular(ball: &FermiBall, spectrum: &Spectrum, lattice: &Lattice, energy: f64, m: f64) -> Result<SingularityClass> {
    let inner: Vec<usize> = boundaries(&ball.domain, lattice)
        .inner
        .iter()
        .map(|y| ball.domain.index_of(y).expect("boundary member"))
        .collect();
    Ok(singular_on_boundary(ball, spectrum, &inner, energy, m))
}

/// [`classify_singular`] with the inner boundary given as domain indices.
pub(crate) fn singular_on_boundary(ball: &FermiBall, spectrum: &Spectrum, inner: &[usize], energy: f64, m: f64) -> SingularityClass {
    let threshold = singular_threshold(ball.radius as u64, ball.center.particle_count(), ball.center.dim(), m);
    let scale = spectrum.values.iter().fold(1.0f64, |a, e| a.max(e.abs()));
    if spectrum.distance_to(energy) <= 1e-12 * scale {
        return SingularityClass { nonsingular: false, threshold, max_green: f64::INFINITY, witness: Some(ball.center.clone()) };
    }
    let c = ball.domain.index_of(&ball.center).expect("centre belongs to its ball");
    let weights: Vec<f64> = (0..spectrum.len()).map(|k| spectrum.vectors[(c, k)] / (spectrum.values[k] - energy)).collect();
    // a ball filling a finite world has no boundary and is trivially non-singular
    let (mut max_green, mut arg) = (0.0f64, None);
    for &j in inner {
        let v = weights.iter().enumerate().map(|(k, w)| w * spectrum.vectors[(j, k)]).sum::<f64>().abs();
        if arg.is_none() || v > max_green {
            max_green = v;
            arg = Some(j);
        }
    }
    let nonsingular = max_green <= threshold;
    SingularityClass {
        nonsingular,
        threshold,
        max_green,
        witness: if nonsingular { None } else { arg.map(|j| ball.domain.get(j).clone()) },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermi::ball;
    use crate::hamiltonian::{assemble, diagonalize, Kinetic};

    #[test]
    fn resonance_examples() {
        let ev = [1.0, 2.0];
        let gd = 0.01;
        assert!(classify_resonant(&ev, 1.0 - 10.0 * gd, gd).nonresonant);
        assert!(!classify_resonant(&ev, 2.0, gd).nonresonant);
        let edge = classify_resonant(&[0.0], 0.25, 0.25);
        assert!(edge.nonresonant);
    }

    #[test]
    fn single_site_ball_threshold() {
        let lattice = Lattice::full(1);
        let x = FermiConfig::from_1d(&[0, 5]).unwrap();
        let b = ball(&x, 0, &lattice).unwrap();
        let m: f64 = 1.0;
        let w = 2.0 * 2.0 * (2.0 * m).exp();
        let h = assemble(&b.domain, &lattice, &|s: &[i64]| if s[0] == 0 { w } else { 0.0 }, 1.0, None, Kinetic::Adjacency).unwrap();
        let s = diagonalize(&h).unwrap();
        assert!(classify_singular(&b, &s, &lattice, 0.0, m).unwrap().nonsingular);
        assert!(!classify_singular(&b, &s, &lattice, 0.5, m).unwrap().nonsingular);
        let at = classify_singular(&b, &s, &lattice, w, m).unwrap();
        assert!(!at.nonsingular && at.max_green.is_infinite());
    }
}
