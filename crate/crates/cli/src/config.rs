//! Experiment configuration: a JSON document merged over built-in defaults,
//! then patched by `--set key.path=value` overrides.

use anyhow::{bail, Context, Result};
use nparticle::fermi::{ball, Domain, FermiConfig, Lattice};
use nparticle::hamiltonian::{Kinetic, Model};
use nparticle::haarsh::ThetaField;
use nparticle::torus::{FrequencySpec, TorusPoint};
use nparticle::wegner::{McPlan, OmegaRule, RcmConfig, Scenario};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    /// Base seed; every random draw of a run descends from it.
    pub seed: u64,
    /// Worker threads; 0 lets the pool pick.
    pub workers: usize,
    /// Phase point for single-instance commands.
    pub omega: Vec<f64>,
    pub domain: DomainSpec,
    /// Cut the interaction at the ball radius when it has no cutoff of its own.
    pub cutoff_at_radius: bool,
    pub graph: GraphSection,
    pub localize: LocalizeSection,
    pub msa: MsaSection,
    pub wegner: WegnerSection,
    pub entropy: EntropySection,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    /// Graph ball on the full lattice.
    Ball { center: FermiConfig, radius: usize },
    /// Every configuration of a finite box with open ends.
    Window { lo: Vec<i64>, hi: Vec<i64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub center: Option<FermiConfig>,
    pub radii: Vec<usize>,
    pub class_threshold: u64,
    pub budget: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizeSection {
    pub times: Vec<f64>,
    /// Tolerance on `|propagator| − envelope`.
    pub excess_tolerance: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MsaSection {
    pub m: f64,
    pub radius: usize,
    pub resonance_threshold: f64,
    pub j_max: u32,
    pub budget: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WegnerSection {
    pub trials: usize,
    pub s_grid: Vec<f64>,
    pub first: FermiConfig,
    pub second: FermiConfig,
    pub radius: usize,
    /// Also estimate the initial-scale separation measure in this window radius.
    pub sep_window: Option<usize>,
    /// Replaces the default `4gδ₀` separation threshold.
    pub sep_threshold: Option<f64>,
    pub bad_measure: Option<BadMeasureSection>,
    pub rcm: Option<RcmConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BadMeasureSection {
    pub level: i32,
    pub window_radius: usize,
    /// Replaces the default `4gδ_j` threshold.
    #[serde(default)]
    pub threshold: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropySection {
    pub truncation: u32,
    /// Grid points per torus axis.
    pub grid: usize,
    /// Scale `L` in the bound; defaults to the ball radius.
    pub length: Option<u64>,
}

fn c1(xs: &[i64]) -> FermiConfig {
    FermiConfig::from_1d(xs).expect("distinct sites")
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario {
                particles: 2,
                dim: 1,
                nu: 1,
                b: 0.5,
                upa_exponent: 1,
                upa_constant: 3.0,
                div_exponent: 1,
                c: 3.0,
                g: 1.0,
                kinetic: Kinetic::Laplacian,
                interaction: None,
                frequencies: FrequencySpec::default(),
                generations: 20,
                initial_scale: 2,
                omega: OmegaRule::default(),
            },
            seed: 0,
            workers: 0,
            omega: vec![0.3],
            domain: DomainSpec::Ball { center: c1(&[0, 1]), radius: 2 },
            cutoff_at_radius: true,
            graph: GraphSection { center: None, radii: vec![0, 1, 2, 3], class_threshold: 3, budget: 1_000_000 },
            localize: LocalizeSection { times: vec![0.0, 0.1, 1.0, 10.0, 100.0], excess_tolerance: 1e-10 },
            msa: MsaSection { m: 1.0, radius: 1, resonance_threshold: 0.0, j_max: 2, budget: 100_000 },
            wegner: WegnerSection {
                trials: 200,
                s_grid: (0..10).map(|i| 10f64.powf(-4.0 + 0.5 * f64::from(i))).collect(),
                first: c1(&[0, 1]),
                second: c1(&[8, 9]),
                radius: 2,
                sep_window: None,
                sep_threshold: None,
                bad_measure: None,
                rcm: None,
            },
            entropy: EntropySection { truncation: 2, grid: 10_000, length: None },
        }
    }
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Applies `a.b.c=value`; the value is read as JSON, or as a string if that fails.
fn apply_override(doc: &mut Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment.split_once('=').with_context(|| format!("override `{assignment}` is not key=value"))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut slot = doc;
    for key in path.split('.') {
        if key.is_empty() {
            bail!("empty key in override `{assignment}`");
        }
        if !slot.is_object() {
            *slot = Value::Object(Default::default());
        }
        slot = slot.as_object_mut().expect("object").entry(key).or_insert(Value::Null);
    }
    *slot = value;
    Ok(())
}

impl ExperimentConfig {
    /// Defaults, then the optional JSON document, then the overrides.
    pub fn load(document: Option<&str>, overrides: &[String]) -> Result<(Self, Vec<String>)> {
        let mut doc = serde_json::to_value(Self::default())?;
        if let Some(text) = document {
            let patch: Value = serde_json::from_str(text).context("config is not valid JSON")?;
            if !patch.is_object() {
                bail!("config must be a JSON object");
            }
            merge(&mut doc, patch);
        }
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let config: Self = serde_json::from_value(doc).context("config does not match the schema")?;
        let warnings = config.validate()?;
        Ok((config, warnings))
    }

    /// Hard errors for unusable values; warnings for legal but unusual ones.
    fn validate(&self) -> Result<Vec<String>> {
        let s = &self.scenario;
        if s.particles == 0 || s.dim == 0 || s.nu == 0 || s.generations == 0 {
            bail!("particles, dim, nu and generations must be positive");
        }
        if !s.b.is_finite() || s.b <= 0.0 {
            bail!("b must be positive");
        }
        if self.omega.len() != s.nu || !self.omega.iter().all(|w| (0.0..1.0).contains(w)) {
            bail!("omega must have nu = {} coordinates in [0, 1)", s.nu);
        }
        if self.graph.budget == 0 || self.msa.budget == 0 {
            bail!("budgets must be positive");
        }
        if self.entropy.grid == 0 {
            bail!("entropy grid must be positive");
        }
        let mut warnings = Vec::new();
        let threshold = 2.0 * (s.particles * s.dim) as f64;
        if s.b <= threshold {
            warnings.push(format!("b = {} is at most 2Nd = {threshold}; the measure estimates assume larger b", s.b));
        }
        Ok(warnings)
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical_json().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn omega(&self) -> TorusPoint {
        TorusPoint::new(self.omega.iter().copied())
    }

    pub fn plan(&self) -> McPlan {
        McPlan { trials: self.wegner.trials, base_seed: self.seed, scenario: self.scenario.clone(), s_grid: self.wegner.s_grid.clone() }
    }

    /// The model for single-instance commands with its domain.
    pub fn instance(&self) -> Result<(Model, Domain)> {
        let mut model = self.scenario.model(ThetaField::keyed(self.seed))?;
        let domain = match &self.domain {
            DomainSpec::Ball { center, radius } => {
                if self.cutoff_at_radius {
                    model.interaction = model.interaction.map(|u| if u.cutoff.is_none() { u.with_cutoff(Some(*radius as u64)) } else { u });
                }
                ball(center, *radius, &model.lattice)?.domain
            }
            DomainSpec::Window { lo, hi } => {
                if lo.len() != self.scenario.dim || hi.len() != self.scenario.dim {
                    bail!("window corners need {} coordinates", self.scenario.dim);
                }
                model.lattice = Lattice::Box { lo: lo.clone(), hi: hi.clone() };
                let all = model.lattice.configurations(self.scenario.particles).context("window is unbounded")?;
                if all.is_empty() {
                    bail!("window holds fewer sites than particles");
                }
                Domain::new(all)?
            }
        };
        Ok((model, domain))
    }

    /// The radius of a ball domain, or the largest box side of a window.
    pub fn domain_scale(&self) -> u64 {
        match &self.domain {
            DomainSpec::Ball { radius, .. } => *radius as u64,
            DomainSpec::Window { lo, hi } => lo.iter().zip(hi).map(|(l, h)| (h - l).unsigned_abs()).max().unwrap_or(0),
        }
    }
}
