use rayon::prelude::*;
use serde::Serialize;

use super::{McPlan, TrialFailure, TrialKind};
use crate::fermi::{ball, weakly_separated, FermiConfig, Witness};
use crate::haarsh::{separation, tail_bound, ThetaField};
use crate::hamiltonian::{diagonalize, spectral_distance, Model};
use crate::msa::{ScaleLevel, ScaleSequence};
use crate::torus::{trajectory_separation, TorusPoint};
use crate::{Error, Result};

fn ball_spectrum(model: &Model, center: &FermiConfig, radius: usize, omega: &TorusPoint) -> Result<Vec<f64>> {
    let b = ball(center, radius, &model.lattice)?;
    Ok(diagonalize(&model.assemble(&b.domain, omega)?)?.values)
}

fn wilson_free_half_width(p: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        1.96 * (p * (1.0 - p) / n as f64).sqrt()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WegnerPoint {
    pub s: f64,
    pub empirical: f64,
    pub half_width: f64,
    /// Natural logarithm of `C5 · L^((2N+4)d + B ln L) · s^(2/3)`.
    pub log_bound: f64,
    pub within: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WegnerReport {
    pub plan: McPlan,
    pub first: FermiConfig,
    pub second: FermiConfig,
    pub radius: usize,
    pub witness: Witness,
    pub omega: Vec<f64>,
    pub points: Vec<WegnerPoint>,
    /// `ln C5` with `C5 = 3^(Nd) + 3^(2d)`.
    pub log_c5: f64,
    /// Smallest `ln C5` consistent with every grid point.
    pub log_c5_fitted: Option<f64>,
    pub violations: usize,
    pub failures: Vec<TrialFailure>,
    pub warnings: Vec<String>,
}

fn wegner_statistic(plan: &McPlan, first: &FermiConfig, second: &FermiConfig, radius: usize, seed: u64, omega: &TorusPoint) -> Result<f64> {
    let model = plan.scenario.model(ThetaField::keyed(seed))?;
    spectral_distance(&ball_spectrum(&model, first, radius, omega)?, &ball_spectrum(&model, second, radius, omega)?)
}

/// Empirical `P{dist(Σ_x, Σ_y) ≤ g s}` over θ at the first phase point of
/// the plan, compared with the Wegner-type bound at every `s` of the grid.
pub fn wegner_estimate(plan: &McPlan, first: &FermiConfig, second: &FermiConfig, radius: usize) -> Result<WegnerReport> {
    let witness = weakly_separated(first, second, radius)?.ok_or(Error::NotSeparated)?;
    let sc = &plan.scenario;
    let omega = plan.omegas(radius as u64)?.swap_remove(0);
    let mut warnings = Vec::new();
    if plan.trials == 0 {
        warnings.push("no trials requested; report is empty".to_string());
    }
    let stats: Vec<f64> = (0..plan.trials)
        .into_par_iter()
        .map(|t| wegner_statistic(plan, first, second, radius, plan.trial_seed(t), &omega))
        .collect::<Result<_>>()?;
    let (n, d) = (sc.particles as f64, sc.dim as f64);
    let l = (radius.max(1)) as f64;
    let log_c5 = (3f64.powf(n * d) + 3f64.powf(2.0 * d)).ln();
    let log_scale = ((2.0 * n + 4.0) * d + sc.arithmetic().big_b() * l.ln()) * l.ln();
    let mut points = Vec::new();
    let mut failures = Vec::new();
    let mut fitted: Option<f64> = None;
    for &s in &plan.s_grid {
        let hits: Vec<usize> = (0..stats.len()).filter(|&t| stats[t] <= sc.g * s).collect();
        let empirical = if stats.is_empty() { 0.0 } else { hits.len() as f64 / stats.len() as f64 };
        let log_bound = log_c5 + log_scale + (2.0 / 3.0) * s.ln();
        let within = empirical == 0.0 || empirical.ln() <= log_bound;
        if empirical > 0.0 {
            let need = empirical.ln() - log_scale - (2.0 / 3.0) * s.ln();
            fitted = Some(fitted.map_or(need, |f: f64| f.max(need)));
        }
        if !within {
            failures.extend(hits.iter().map(|&t| TrialFailure {
                kind: TrialKind::Wegner { first: first.clone(), second: second.clone(), radius },
                trial: t,
                seed: plan.trial_seed(t),
                omega: omega.coords().to_vec(),
                statistic: stats[t],
                threshold: sc.g * s,
            }));
        }
        points.push(WegnerPoint { s, empirical, half_width: wilson_free_half_width(empirical, stats.len()), log_bound, within });
    }
    Ok(WegnerReport {
        plan: plan.clone(),
        first: first.clone(),
        second: second.clone(),
        radius,
        witness,
        omega: omega.coords().to_vec(),
        violations: points.iter().filter(|p| !p.within).count(),
        points,
        log_c5,
        log_c5_fitted: fitted,
        failures,
        warnings,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SepL0Report {
    pub plan: McPlan,
    pub window_radius: usize,
    pub window_size: usize,
    pub level: ScaleLevel,
    pub threshold: f64,
    pub bad_trials: usize,
    pub bad_fraction: f64,
    /// Trials where truncated `Sep ≥ 5gδ` but full `Sep < 4gδ`.
    pub implication_violations: usize,
    /// Phase points where `|Sep_full − Sep_trunc|` exceeded `2N·g·tail`.
    pub tail_violations: usize,
    /// Phase points whose orbit over the window failed to separate at generation Ñ.
    pub trajectory_collisions: usize,
    /// Per trial, minimum over phase points of the truncated separation.
    pub truncated_sep: Vec<f64>,
    pub full_sep: Vec<f64>,
    pub failures: Vec<TrialFailure>,
}

struct SepSample {
    truncated: f64,
    full: f64,
    omega: usize,
    implication: bool,
    tail: usize,
}

fn sep_statistic(plan: &McPlan, model: &Model, window: &[FermiConfig], generation: u32, omegas: &[TorusPoint], level_delta: f64) -> Result<SepSample> {
    let g = model.g;
    let tail = 2.0 * plan.scenario.particles as f64 * g.abs() * tail_bound(generation, model.hull.b);
    let mut best = SepSample { truncated: f64::INFINITY, full: f64::INFINITY, omega: 0, implication: false, tail: 0 };
    for (w, omega) in omegas.iter().enumerate() {
        let eval = |depth: u32| -> Result<f64> {
            let values = window
                .iter()
                .map(|x| x.sites().map(|s| Ok(model.hull.value(&model.system.translate(omega, s), depth)?.value)).sum::<Result<f64>>().map(|v| g * v))
                .collect::<Result<Vec<f64>>>()?;
            separation(&values)
        };
        let truncated = eval(generation)?;
        let full = eval(model.truncation)?;
        if truncated >= 5.0 * g * level_delta && full < 4.0 * g * level_delta {
            best.implication = true;
        }
        if (full - truncated).abs() > tail {
            best.tail += 1;
        }
        if truncated < best.truncated {
            best.truncated = truncated;
            best.omega = w;
        }
        best.full = best.full.min(full);
    }
    Ok(best)
}

fn window_configs(plan: &McPlan, model: &Model, window_radius: usize) -> Result<Vec<FermiConfig>> {
    Ok(ball(&plan.scenario.origin_config(), window_radius, &model.lattice)?.domain.members().to_vec())
}

/// Measure of θ for which the truncated multi-particle potential on the
/// window fails to separate by `4gδ_0` at some sampled phase point.
pub fn sep_l0_estimate(plan: &McPlan, window_radius: usize, threshold_override: Option<f64>) -> Result<SepL0Report> {
    let sc = &plan.scenario;
    let seq = ScaleSequence::new(sc.initial_scale, 0, sc.arithmetic())?;
    let level = seq.level(0).expect("level 0").clone();
    let generation = level.tilde_big_n;
    if generation >= sc.generations {
        return Err(Error::InvalidParameter(format!("hull depth {} must exceed the truncation generation {generation}", sc.generations)));
    }
    let model0 = sc.model(ThetaField::keyed(0))?;
    let window = window_configs(plan, &model0, window_radius)?;
    let omegas = plan.omegas(sc.initial_scale)?;
    let delta = level.delta();
    let threshold = threshold_override.unwrap_or(4.0 * sc.g * delta);
    let reach = window.iter().flat_map(|x| x.sites()).flat_map(|s| s.iter().map(|c| c.unsigned_abs())).max().unwrap_or(0);
    let mut trajectory_collisions = 0;
    for omega in &omegas {
        if !trajectory_separation(&model0.system, omega, reach, generation)?.distinct() {
            trajectory_collisions += 1;
        }
    }
    let samples: Vec<SepSample> = (0..plan.trials)
        .into_par_iter()
        .map(|t| sep_statistic(plan, &sc.model(ThetaField::keyed(plan.trial_seed(t)))?, &window, generation, &omegas, delta))
        .collect::<Result<_>>()?;
    let failures: Vec<TrialFailure> = samples
        .iter()
        .enumerate()
        .filter(|(_, s)| s.truncated < threshold)
        .map(|(t, s)| TrialFailure {
            kind: TrialKind::SepL0 { window_radius },
            trial: t,
            seed: plan.trial_seed(t),
            omega: omegas[s.omega].coords().to_vec(),
            statistic: s.truncated,
            threshold,
        })
        .collect();
    Ok(SepL0Report {
        plan: plan.clone(),
        window_radius,
        window_size: window.len(),
        level,
        threshold,
        bad_trials: failures.len(),
        bad_fraction: if samples.is_empty() { 0.0 } else { failures.len() as f64 / samples.len() as f64 },
        implication_violations: samples.iter().filter(|s| s.implication).count(),
        tail_violations: samples.iter().map(|s| s.tail).sum(),
        trajectory_collisions,
        truncated_sep: samples.iter().map(|s| s.truncated).collect(),
        full_sep: samples.iter().map(|s| s.full).collect(),
        failures,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BadMeasureReport {
    pub plan: McPlan,
    pub level: ScaleLevel,
    pub radius: usize,
    pub window_radius: usize,
    pub window_size: usize,
    pub pairs: usize,
    pub threshold: f64,
    pub bad_trials: usize,
    pub bad_fraction: f64,
    pub half_width: f64,
    /// `L_j^(−bA)`.
    pub reference: f64,
    /// `bad_fraction − 2σ ≤ reference`.
    pub within: bool,
    pub min_statistics: Vec<f64>,
    pub failures: Vec<TrialFailure>,
}

fn separated_pairs(model: &Model, window: &[FermiConfig], radius: usize) -> Result<Vec<(FermiConfig, FermiConfig)>> {
    let inside: std::collections::HashSet<&FermiConfig> = window.iter().collect();
    let mut centers = Vec::new();
    for x in window {
        if ball(x, radius, &model.lattice)?.domain.members().iter().all(|m| inside.contains(m)) {
            centers.push(x.clone());
        }
    }
    let mut pairs = Vec::new();
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            if weakly_separated(&centers[i], &centers[j], radius)?.is_some() {
                pairs.push((centers[i].clone(), centers[j].clone()));
            }
        }
    }
    Ok(pairs)
}

/// `min_ω min_pairs D` for one θ; returns the value and the phase index.
fn bad_statistic(model: &Model, pairs: &[(FermiConfig, FermiConfig)], radius: usize, omegas: &[TorusPoint]) -> Result<(f64, usize)> {
    let mut centers: Vec<&FermiConfig> = pairs.iter().flat_map(|(a, b)| [a, b]).collect();
    centers.sort_unstable();
    centers.dedup();
    let mut best = (f64::INFINITY, 0);
    for (w, omega) in omegas.iter().enumerate() {
        let spectra: std::collections::HashMap<&FermiConfig, Vec<f64>> =
            centers.iter().map(|&c| ball_spectrum(model, c, radius, omega).map(|s| (c, s))).collect::<Result<_>>()?;
        for (a, b) in pairs {
            let d = spectral_distance(&spectra[a], &spectra[b])?;
            if d < best.0 {
                best = (d, w);
            }
        }
    }
    Ok(best)
}

/// Fraction of θ for which some weakly separated pair of radius-`L_j` balls
/// in the window has spectra closer than `4gδ_j` at a sampled phase point.
pub fn theta_bad_measure(plan: &McPlan, level: i32, window_radius: usize, threshold_override: Option<f64>) -> Result<BadMeasureReport> {
    let sc = &plan.scenario;
    let seq = ScaleSequence::new(sc.initial_scale, level.max(0) as u32, sc.arithmetic())?;
    let lvl = seq.level(level).ok_or_else(|| Error::InvalidParameter(format!("no level {level}")))?.clone();
    let radius = lvl.length.ok_or_else(|| Error::InvalidParameter("scale too large".into()))? as usize;
    let model0 = sc.model(ThetaField::keyed(0))?;
    let window = window_configs(plan, &model0, window_radius)?;
    let pairs = separated_pairs(&model0, &window, radius)?;
    let omegas = plan.omegas(radius.max(2) as u64)?;
    let threshold = threshold_override.unwrap_or(4.0 * sc.g * lvl.delta());
    let stats: Vec<(f64, usize)> = (0..plan.trials)
        .into_par_iter()
        .map(|t| bad_statistic(&sc.model(ThetaField::keyed(plan.trial_seed(t)))?, &pairs, radius, &omegas))
        .collect::<Result<_>>()?;
    let failures: Vec<TrialFailure> = stats
        .iter()
        .enumerate()
        .filter(|(_, s)| s.0 < threshold)
        .map(|(t, s)| TrialFailure {
            kind: TrialKind::BadMeasure { level, window_radius },
            trial: t,
            seed: plan.trial_seed(t),
            omega: omegas[s.1].coords().to_vec(),
            statistic: s.0,
            threshold,
        })
        .collect();
    let n = stats.len();
    let bad_fraction = if n == 0 { 0.0 } else { failures.len() as f64 / n as f64 };
    let sigma = if n == 0 { 0.0 } else { (bad_fraction * (1.0 - bad_fraction) / n as f64).sqrt() };
    let reference = (radius.max(1) as f64).powf(-sc.b * f64::from(sc.upa_exponent));
    Ok(BadMeasureReport {
        plan: plan.clone(),
        level: lvl,
        radius,
        window_radius,
        window_size: window.len(),
        pairs: pairs.len(),
        threshold,
        bad_trials: failures.len(),
        bad_fraction,
        half_width: 2.0 * sigma,
        reference,
        within: bad_fraction - 2.0 * sigma <= reference,
        min_statistics: stats.iter().map(|s| s.0).collect(),
        failures,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplayOutcome {
    pub statistic: f64,
    /// The recomputed statistic has the same bit pattern as the recorded one.
    pub bit_exact: bool,
    pub still_fails: bool,
}

/// Recomputes a recorded failure from its seed and phase point alone.
pub fn replay(plan: &McPlan, failure: &TrialFailure) -> Result<ReplayOutcome> {
    let sc = &plan.scenario;
    let omega = TorusPoint::new(failure.omega.iter().copied());
    let model = sc.model(ThetaField::keyed(failure.seed))?;
    let (statistic, fails) = match &failure.kind {
        TrialKind::Wegner { first, second, radius } => {
            let d = wegner_statistic(plan, first, second, *radius, failure.seed, &omega)?;
            (d, d <= failure.threshold)
        }
        TrialKind::SepL0 { window_radius } => {
            let seq = ScaleSequence::new(sc.initial_scale, 0, sc.arithmetic())?;
            let level = seq.level(0).expect("level 0");
            let window = window_configs(plan, &model, *window_radius)?;
            let s = sep_statistic(plan, &model, &window, level.tilde_big_n, std::slice::from_ref(&omega), level.delta())?;
            (s.truncated, s.truncated < failure.threshold)
        }
        TrialKind::BadMeasure { level, window_radius } => {
            let seq = ScaleSequence::new(sc.initial_scale, (*level).max(0) as u32, sc.arithmetic())?;
            let radius = seq.level(*level).and_then(|l| l.length).ok_or_else(|| Error::InvalidParameter("bad level".into()))? as usize;
            let window = window_configs(plan, &model, *window_radius)?;
            let pairs = separated_pairs(&model, &window, radius)?;
            let (d, _) = bad_statistic(&model, &pairs, radius, std::slice::from_ref(&omega))?;
            (d, d < failure.threshold)
        }
    };
    Ok(ReplayOutcome { statistic, bit_exact: statistic.to_bits() == failure.statistic.to_bits(), still_fails: fails })
}
