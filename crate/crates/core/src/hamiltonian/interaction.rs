use serde::{Deserialize, Serialize};

use crate::fermi::{FermiConfig, SiteNorm};
use crate::{Error, Result};

/// Pair interaction `U(r) = r^(-2B ln r) = exp(-2B ln² r)`, optionally cut
/// off beyond a radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub decay: f64,
    /// `None` keeps every pair of the domain.
    pub cutoff: Option<u64>,
    #[serde(default)]
    pub norm: SiteNorm,
}

impl Interaction {
    pub fn new(decay: f64) -> Self {
        Self { decay, cutoff: None, norm: SiteNorm::L1 }
    }

    pub fn with_cutoff(mut self, cutoff: Option<u64>) -> Self {
        self.cutoff = cutoff;
        self
    }

    fn raw(&self, r: u64) -> f64 {
        let l = (r as f64).ln();
        (-2.0 * self.decay * l * l).exp()
    }

    pub fn value(&self, r: u64) -> Result<f64> {
        if r == 0 {
            return Err(Error::InvalidParameter("interaction queried at distance 0".into()));
        }
        Ok(match self.cutoff {
            Some(c) if r > c => 0.0,
            _ => self.raw(r),
        })
    }

    fn pair_distances(&self, x: &FermiConfig) -> Vec<u64> {
        let n = x.particle_count();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.norm.distance(x.site(i), x.site(j)))
            .collect()
    }

    /// Sum of `U` over unordered particle pairs.
    pub fn energy(&self, x: &FermiConfig) -> f64 {
        self.pair_distances(x).into_iter().map(|r| self.value(r).expect("distinct sites")).sum()
    }

    /// Interaction energy discarded by the cutoff.
    pub fn cutoff_tail(&self, x: &FermiConfig) -> f64 {
        match self.cutoff {
            None => 0.0,
            Some(c) => self.pair_distances(x).into_iter().filter(|&r| r > c).map(|r| self.raw(r)).sum(),
        }
    }
}
