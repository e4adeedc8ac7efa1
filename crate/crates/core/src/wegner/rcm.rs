use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Independent `Unif[lower_x, lower_x + length]` values on `sites` sites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RcmConfig {
    pub sites: usize,
    pub length: f64,
    pub samples: usize,
    pub seed: u64,
    pub t_grid: Vec<f64>,
    pub eps_grid: Vec<f64>,
}

impl RcmConfig {
    fn validate(&self) -> Result<()> {
        if self.sites == 0 {
            return Err(Error::InvalidParameter("the site set must be nonempty".into()));
        }
        if !self.length.is_finite() || self.length <= 0.0 {
            return Err(Error::InvalidParameter("interval length must be positive".into()));
        }
        if self.t_grid.iter().chain(&self.eps_grid).any(|&v| v.is_nan() || v <= 0.0) {
            return Err(Error::InvalidParameter("t and ε grids must be positive".into()));
        }
        Ok(())
    }

    /// Sample `i` as `(values, lower ends)`; a pure function of `(seed, i)`.
    fn sample(&self, i: usize) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i as u64);
        let lowers: Vec<f64> = (0..self.sites).map(|_| rng.random_range(-1.0..1.0)).collect();
        let values = lowers.iter().map(|l| l + self.length * rng.random::<f64>()).collect();
        (values, lowers)
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Width of the interval on which the sample mean is uniformly distributed
/// once the fluctuations `V_x − ξ` are fixed.
fn conditional_width(values: &[f64], lowers: &[f64], length: f64) -> f64 {
    let xi = mean(values);
    let (lo, hi) = values.iter().zip(lowers).fold((f64::NEG_INFINITY, f64::INFINITY), |(lo, hi), (v, l)| {
        let shift = l - (v - xi);
        (lo.max(shift), hi.min(shift + length))
    });
    (hi - lo).max(0.0)
}

/// `sup_r P{ξ_Q ∈ [r, r + t] | fluctuations}` for one realisation.
///
/// Given the fluctuations, `ξ_Q` is uniform on an interval whose width is
/// `length` minus the spread of the standardized values, so the supremum is
/// `min(1, t / width)`.
pub fn conditional_concentration(values: &[f64], lowers: &[f64], length: f64, t: f64) -> Result<f64> {
    if values.is_empty() || values.len() != lowers.len() {
        return Err(Error::Mismatch(format!("{} values against {} intervals", values.len(), lowers.len())));
    }
    let width = conditional_width(values, lowers, length);
    Ok(if t >= width { 1.0 } else { t / width })
}

#[derive(Clone, Debug, Serialize)]
pub struct RcmCell {
    pub t: f64,
    pub eps: f64,
    pub exceedance: f64,
    /// Two standard errors of the exceedance estimate.
    pub half_width: f64,
    /// `|Q|² ε²`.
    pub bound: f64,
    pub within: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RcmReport {
    pub config: RcmConfig,
    pub cells: Vec<RcmCell>,
}

impl RcmReport {
    pub fn all_within(&self) -> bool {
        self.cells.iter().all(|c| c.within)
    }
}

/// Estimates `P{ν_Q(t) > t/(ℓε)}` over the `(t, ε)` grid using the exact
/// conditional law of the sample mean.
pub fn rcm_check(config: &RcmConfig) -> Result<RcmReport> {
    config.validate()?;
    let widths: Vec<f64> = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let (v, l) = config.sample(i);
            conditional_width(&v, &l, config.length)
        })
        .collect();
    let n = widths.len() as f64;
    let q = config.sites as f64;
    let mut cells = Vec::new();
    for &t in &config.t_grid {
        for &eps in &config.eps_grid {
            let level = t / (config.length * eps);
            let hits = widths.iter().filter(|&&w| (if t >= w { 1.0 } else { t / w }) > level).count();
            let p = if n == 0.0 { 0.0 } else { hits as f64 / n };
            let half_width = if n == 0.0 { 0.0 } else { 2.0 * (p * (1.0 - p) / n).sqrt() };
            let bound = q * q * eps * eps;
            cells.push(RcmCell { t, eps, exceedance: p, half_width, bound, within: p - half_width <= bound });
        }
    }
    Ok(RcmReport { config: config.clone(), cells })
}

/// Comparison of a histogram estimate of `ν_Q(t)`, conditioning by binning
/// the fluctuation vector, with the exact conditional value.
#[derive(Clone, Debug, Serialize)]
pub struct BinningCheck {
    pub bin_width: f64,
    pub t: f64,
    pub bins_used: usize,
    pub max_abs_error: f64,
    pub mean_abs_error: f64,
}

/// Bins samples by their fluctuation vector (all intervals `[0, ℓ]`), then
/// in every bin with at least `min_count` samples compares the largest
/// fraction of sample means inside a window of length `t` with the average
/// exact `ν_Q(t)` of the bin.
pub fn binning_check(config: &RcmConfig, t: f64, bin_width: f64, min_count: usize) -> Result<BinningCheck> {
    config.validate()?;
    if bin_width.is_nan() || bin_width <= 0.0 || min_count == 0 {
        return Err(Error::InvalidParameter("bin width and minimum count must be positive".into()));
    }
    let zeros = vec![0.0; config.sites];
    let mut bins: HashMap<Vec<i64>, Vec<(f64, f64)>> = HashMap::new();
    for i in 0..config.samples {
        let (mut v, l) = config.sample(i);
        for (x, lo) in v.iter_mut().zip(&l) {
            *x -= lo;
        }
        let xi = mean(&v);
        let key = v[..config.sites - 1].iter().map(|x| ((x - xi) / bin_width).floor() as i64).collect();
        let nu = conditional_concentration(&v, &zeros, config.length, t)?;
        bins.entry(key).or_default().push((xi, nu));
    }
    let mut errors = Vec::new();
    for mut members in bins.into_values().filter(|m| m.len() >= min_count) {
        members.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut best = 0;
        let mut lo = 0;
        for hi in 0..members.len() {
            while members[hi].0 - members[lo].0 > t {
                lo += 1;
            }
            best = best.max(hi + 1 - lo);
        }
        let empirical = best as f64 / members.len() as f64;
        let exact = members.iter().map(|m| m.1).sum::<f64>() / members.len() as f64;
        errors.push((empirical - exact).abs());
    }
    Ok(BinningCheck {
        bin_width,
        t,
        bins_used: errors.len(),
        max_abs_error: errors.iter().copied().fold(0.0, f64::max),
        mean_abs_error: if errors.is_empty() { 0.0 } else { mean(&errors) },
    })
}
