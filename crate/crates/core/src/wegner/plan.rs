use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fermi::{FermiConfig, Lattice};
use crate::haarsh::{mix64, HaarshHull, ScaleArithmetic, ThetaField};
use crate::hamiltonian::{Interaction, Kinetic, Model};
use crate::torus::{entropy_covers, FrequencySpec, ShiftSystem, TorusPoint};
use crate::Result;

/// How phase points are chosen: centres of fine entropy-cover cubes spread
/// over the torus, plus uniform samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaRule {
    /// Grid points per torus axis.
    pub grid_per_axis: usize,
    pub random: usize,
}

impl Default for OmegaRule {
    fn default() -> Self {
        Self { grid_per_axis: 4, random: 4 }
    }
}

/// Model parameters shared by every trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub particles: usize,
    pub dim: usize,
    pub nu: usize,
    pub b: f64,
    pub upa_exponent: u32,
    pub upa_constant: f64,
    pub div_exponent: u32,
    /// Constant in the generation count; usually equal to `upa_constant`.
    pub c: f64,
    pub g: f64,
    pub kinetic: Kinetic,
    pub interaction: Option<Interaction>,
    pub frequencies: FrequencySpec,
    /// Hull generations used for evaluation.
    pub generations: u32,
    pub initial_scale: u64,
    pub omega: OmegaRule,
}

impl Scenario {
    pub fn arithmetic(&self) -> ScaleArithmetic {
        ScaleArithmetic { a: self.upa_exponent, c: self.c, b: self.b }
    }

    pub fn system(&self) -> Result<ShiftSystem> {
        ShiftSystem::new(self.frequencies.resolve(self.dim, self.nu)?, self.upa_exponent, self.upa_constant, self.div_exponent)
    }

    pub fn model(&self, theta: ThetaField) -> Result<Model> {
        Ok(Model {
            lattice: Lattice::full(self.dim),
            system: self.system()?,
            hull: HaarshHull::new(self.b, self.nu, self.generations, theta)?,
            truncation: self.generations,
            g: self.g,
            interaction: self.interaction,
            kinetic: self.kinetic,
        })
    }

    /// `N` particles on consecutive sites of the first axis.
    pub fn origin_config(&self) -> FermiConfig {
        FermiConfig::new((0..self.particles as i64).map(|i| {
            let mut s = vec![0; self.dim];
            s[0] = i;
            s
        }))
        .expect("distinct sites")
    }
}

/// A reproducible Monte-Carlo plan: trial `t` depends only on `(base_seed, t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McPlan {
    pub trials: usize,
    pub base_seed: u64,
    pub scenario: Scenario,
    #[serde(default)]
    pub s_grid: Vec<f64>,
}

impl McPlan {
    pub fn trial_seed(&self, trial: usize) -> u64 {
        mix64(self.base_seed ^ mix64(trial as u64 + 1))
    }

    /// Phase points used to approximate the infimum over the torus at length scale `length`.
    pub fn omegas(&self, length: u64) -> Result<Vec<TorusPoint>> {
        let s = &self.scenario;
        let fine = entropy_covers(length.max(2), s.upa_exponent, s.div_exponent, s.nu)?.fine_radius;
        let cells = (1.0 / fine).floor() as u64;
        let k = s.omega.grid_per_axis.max(1) as u64;
        let axis: Vec<f64> = (0..k).map(|i| ((i * cells / k) as f64 + 0.5) * fine).collect();
        let mut points = vec![Vec::new()];
        for _ in 0..s.nu {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(self.base_seed ^ 0x006f_6d65_6761));
        points.extend((0..s.omega.random).map(|_| (0..s.nu).map(|_| rng.random::<f64>()).collect()));
        Ok(points.into_iter().map(TorusPoint::new).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "estimator", rename_all = "snake_case")]
pub enum TrialKind {
    Wegner { first: FermiConfig, second: FermiConfig, radius: usize },
    SepL0 { window_radius: usize },
    BadMeasure { level: i32, window_radius: usize },
}

/// Everything needed to recompute a failed trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub kind: TrialKind,
    pub trial: usize,
    pub seed: u64,
    pub omega: Vec<f64>,
    pub statistic: f64,
    pub threshold: f64,
}
