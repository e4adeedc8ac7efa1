#![allow(dead_code)]

use nparticle::fermi::{FermiConfig, Lattice};
use nparticle::haarsh::{HaarshHull, ThetaField};
use nparticle::hamiltonian::{Interaction, Kinetic, Model};
use nparticle::torus::{FrequencySpec, ShiftSystem};

pub fn c(xs: &[i64]) -> FermiConfig {
    FermiConfig::from_1d(xs).unwrap()
}

pub fn golden_system(dim: usize, nu: usize) -> ShiftSystem {
    ShiftSystem::new(FrequencySpec::default().resolve(dim, nu).unwrap(), 1, 3.0, 1).unwrap()
}

/// Full-lattice model with a keyed hull of depth `depth`.
pub fn model(dim: usize, lattice: Lattice, g: f64, seed: u64, depth: u32, interaction: Option<Interaction>, kinetic: Kinetic) -> Model {
    Model {
        lattice,
        system: golden_system(dim, 1),
        hull: HaarshHull::new(0.5, 1, depth, ThetaField::keyed(seed)).unwrap(),
        truncation: depth,
        g,
        interaction,
        kinetic,
    }
}

pub fn line_model(g: f64, seed: u64) -> Model {
    model(1, Lattice::full(1), g, seed, 8, Some(Interaction::new(1.0)), Kinetic::Laplacian)
}

use nparticle::fermi::Domain;
use nparticle::haarsh::separation;
use nparticle::torus::TorusPoint;

/// `Σ_sites V` for every member of the domain, without the coupling `g`.
pub fn config_potentials(model: &Model, domain: &Domain, omega: &TorusPoint) -> Vec<f64> {
    let p = model.potential(omega);
    domain
        .members()
        .iter()
        .map(|x| x.sites().map(|s| nparticle::hamiltonian::SitePotential::site_value(&p, s).unwrap()).sum())
        .collect()
}

/// Two fermions on `sites` consecutive sites with open ends, and a coupling
/// making `g·Sep(V) = factor · 16Nd·e^(4m)` at `omega`.
pub fn strong_window(sites: i64, seed: u64, omega: &TorusPoint, m: f64, factor: f64) -> (Model, Domain) {
    let world = Lattice::segment(0, sites - 1);
    let domain = Domain::new(world.configurations(2).unwrap()).unwrap();
    let mut m0 = model(1, world, 1.0, seed, 10, None, Kinetic::Laplacian);
    let sep = separation(&config_potentials(&m0, &domain, omega)).unwrap();
    m0.g = factor * 16.0 * 2.0 * (4.0 * m).exp() / sep;
    (m0, domain)
}

use nparticle::wegner::{McPlan, OmegaRule, Scenario};

/// Two fermions on Z over a golden rotation, at lacunarity 0.5.
pub fn scenario(g: f64) -> Scenario {
    Scenario {
        particles: 2,
        dim: 1,
        nu: 1,
        b: 0.5,
        upa_exponent: 1,
        upa_constant: 3.0,
        div_exponent: 1,
        c: 3.0,
        g,
        kinetic: Kinetic::Laplacian,
        interaction: None,
        frequencies: FrequencySpec::default(),
        generations: 20,
        initial_scale: 2,
        omega: OmegaRule { grid_per_axis: 3, random: 2 },
    }
}

pub fn plan(trials: usize, seed: u64, g: f64) -> McPlan {
    McPlan { trials, base_seed: seed, scenario: scenario(g), s_grid: (0..10).map(|i| 10f64.powf(-4.0 + 0.5 * i as f64)).collect() }
}
