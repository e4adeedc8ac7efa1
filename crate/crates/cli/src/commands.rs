use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use nparticle::fermi::{ball, boundaries, shift_equivalence_classes, Domain, Lattice};
use nparticle::hamiltonian::{diagonalize, write_binary, write_spectrum_csv, Spectrum};
use nparticle::msa::{
    correlator_report, distance_table, entropy_bound, equivalence_entropy_check, localization_report, refine_localized, sparseness_scan,
    ScaleSequence, ViolationKind,
};
use nparticle::torus::TorusPoint;
use nparticle::wegner::{rcm_check, replay, sep_l0_estimate, theta_bad_measure, wegner_estimate, TrialFailure};
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::run::{read_report, RunDir};

/// Named one-sided checks and warnings produced by a command.
#[derive(Default)]
pub struct Outcome {
    pub checks: BTreeMap<String, bool>,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn check(&mut self, name: &str, ok: bool) {
        self.checks.insert(name.to_string(), ok);
    }
}

pub fn graph(cfg: &ExperimentConfig, run: &mut RunDir) -> Result<Outcome> {
    let lattice = Lattice::full(cfg.scenario.dim);
    let center = cfg.graph.center.clone().unwrap_or_else(|| cfg.scenario.origin_config());
    let mut rows = Vec::new();
    let mut balls = Vec::new();
    let mut nested = true;
    let mut previous: Option<Domain> = None;
    for &r in &cfg.graph.radii {
        let b = ball(&center, r, &lattice)?;
        if b.len() > cfg.graph.budget {
            bail!("ball of radius {r} has {} configurations, budget {}", b.len(), cfg.graph.budget);
        }
        let bd = boundaries(&b.domain, &lattice);
        if let Some(p) = &previous {
            nested &= p.len() > b.len() || p.is_subset_of(&b.domain);
        }
        rows.push(format!("{r},{},{},{},{}", b.len(), bd.inner.len(), bd.outer.len(), bd.edges.len()));
        balls.push(json!({ "radius": r, "size": b.len(), "inner_boundary": bd.inner.len(), "outer_boundary": bd.outer.len(), "boundary_edges": bd.edges.len() }));
        previous = Some(b.domain);
    }
    let classes = shift_equivalence_classes(cfg.scenario.particles, cfg.scenario.dim, cfg.graph.class_threshold, cfg.graph.budget)?;
    run.json("graph.json", &json!({ "center": center, "balls": balls, "class_threshold": cfg.graph.class_threshold, "classes": classes.len() }))?;
    run.csv("balls.csv", "radius,size,inner_boundary,outer_boundary,boundary_edges", rows)?;
    let mut out = Outcome::default();
    out.check("balls_nested", nested);
    Ok(out)
}

fn solve(cfg: &ExperimentConfig) -> Result<(nparticle::hamiltonian::Model, Domain, nparticle::hamiltonian::FiniteHamiltonian, Spectrum)> {
    let (model, domain) = cfg.instance()?;
    let h = model.assemble(&domain, &cfg.omega())?;
    let s = diagonalize(&h)?;
    Ok((model, domain, h, s))
}

pub fn spectrum(cfg: &ExperimentConfig, run: &mut RunDir) -> Result<Outcome> {
    let (_, domain, h, s) = solve(cfg)?;
    let scale = h.matrix.norm().max(1.0);
    let residual = s.residual(&h.matrix);
    let orthonormality = s.orthonormality_error();
    run.json("spectrum.json", &json!({ "size": domain.len(), "eigenvalues": s.values, "residual": residual, "orthonormality_error": orthonormality }))?;
    let mut csv = format!("# config_sha256={} seed={}\n", cfg.hash(), cfg.seed).into_bytes();
    write_spectrum_csv(&s, &mut csv)?;
    run.write("spectrum.csv", &csv)?;
    let mut bin = Vec::new();
    write_binary(&h, &json!({ "config_sha256": cfg.hash(), "seed": cfg.seed, "omega": cfg.omega }), &mut bin)?;
    run.write("hamiltonian.bin", &bin)?;
    let mut out = Outcome::default();
    out.check("residual", residual <= 1e-10 * scale);
    out.check("orthonormality", orthonormality <= 1e-10);
    Ok(out)
}

pub fn localize(cfg: &ExperimentConfig, run: &mut RunDir) -> Result<Outcome> {
    let (model, domain, h, s) = solve(cfg)?;
    let report = localization_report(&s, &domain, &model.lattice)?;
    let mut out = Outcome::default();
    // strongly localized states have tails below what the dense vectors resolve
    let (basis, refined) = match refine_localized(&h.matrix, &s) {
        Ok(r) => (r, true),
        Err(e) => {
            out.warnings.push(format!("envelope uses unrefined eigenvectors: {e}"));
            (s.clone(), false)
        }
    };
    let correlator = correlator_report(&basis, &distance_table(&domain, &model.lattice)?, &cfg.localize.times);
    let rows = report.states.iter().map(|st| {
        let rate = st.decay_rate().map_or(String::new(), |r| r.to_string());
        format!("{:.17e},{},{:.17e},{}", st.energy, st.centers[0], st.peak_mass, rate)
    });
    run.csv("states.csv", "energy,center,peak_mass,decay_rate", rows.collect::<Vec<_>>())?;
    run.json(
        "localize.json",
        &json!({
            "bijection": report.bijection,
            "all_unimodal": report.all_unimodal(),
            "mean_decay_rate": report.mean_decay_rate(),
            "refined": refined,
            "correlator": correlator,
        }),
    )?;
    out.check("propagator_below_envelope", correlator.max_excess <= cfg.localize.excess_tolerance);
    Ok(out)
}

pub fn msa(cfg: &ExperimentConfig, run: &mut RunDir) -> Result<Outcome> {
    let (model, domain) = cfg.instance()?;
    let scales = ScaleSequence::new(cfg.scenario.initial_scale, cfg.msa.j_max, cfg.scenario.arithmetic())?;
    let m = &cfg.msa;
    let scan = sparseness_scan(&model, &cfg.omega(), &domain, m.radius, m.m, m.resonance_threshold, m.budget)?;
    let singular = scan.violations.iter().filter(|v| v.kind == ViolationKind::Singular).count();
    let resonant = scan.violations.len() - singular;
    run.json("scales.json", &scales)?;
    run.json("sparseness.json", &scan)?;
    let mut out = Outcome::default();
    out.check("no_distant_singular_pair", singular == 0);
    out.check("no_distant_resonant_pair", resonant == 0);
    Ok(out)
}

pub fn wegner(cfg: &ExperimentConfig, run: &mut RunDir) -> Result<Outcome> {
    let plan = cfg.plan();
    let w = &cfg.wegner;
    let mut out = Outcome::default();
    let report = wegner_estimate(&plan, &w.first, &w.second, w.radius)?;
    out.warnings.extend(report.warnings.iter().cloned());
    let rows = report.points.iter().map(|p| format!("{:e},{:e},{:e},{},{}", p.s, p.empirical, p.half_width, p.log_bound, p.within));
    run.csv("wegner.csv", "s,empirical,half_width,log_bound,within", rows.collect::<Vec<_>>())?;
    out.check("wegner_bound", report.violations == 0);
    let mut failures: Vec<TrialFailure> = report.failures.clone();
    run.json("wegner.json", &report)?;
    if let Some(window) = w.sep_window {
        let sep = sep_l0_estimate(&plan, window, w.sep_threshold)?;
        out.check("separation_implication", sep.implication_violations == 0 && sep.tail_violations == 0);
        out.check("trajectory_separation", sep.trajectory_collisions == 0);
        failures.extend(sep.failures.iter().cloned());
        run.json("separation.json", &sep)?;
    }
    if let Some(b) = &w.bad_measure {
        let bad = theta_bad_measure(&plan, b.level, b.window_radius, b.threshold)?;
        out.check("bad_measure", bad.within);
        failures.extend(bad.failures.iter().cloned());
        run.json("bad_measure.json", &bad)?;
    }
    if let Some(r) = &w.rcm {
        let rcm = rcm_check(r)?;
        out.check("rcm_concentration", rcm.all_within());
        run.json("rcm.json", &rcm)?;
    }
    run.json("failures.json", &failures)?;
    Ok(out)
}

pub fn entropy(cfg: &ExperimentConfig, run: &mut RunDir) -> Result<Outcome> {
    let (model, domain) = cfg.instance()?;
    let nu = cfg.scenario.nu;
    let k = cfg.entropy.grid;
    let mut grid: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..nu {
        grid = grid.into_iter().flat_map(|p| (0..k).map(move |i| [p.as_slice(), &[(i as f64 + 0.5) / k as f64]].concat())).collect();
    }
    let omegas: Vec<TorusPoint> = grid.into_iter().map(TorusPoint::new).collect();
    let length = cfg.entropy.length.unwrap_or_else(|| cfg.domain_scale()).max(1);
    let s = &cfg.scenario;
    let bound = entropy_bound(length, s.upa_exponent, s.div_exponent, nu);
    let count = equivalence_entropy_check(&model, &domain, cfg.entropy.truncation, &omegas, bound)?;
    let mut out = Outcome::default();
    if count.saturated {
        out.warnings.push("every grid point gave a distinct operator; refine the grid".into());
    }
    run.json("entropy.json", &json!({ "length": length, "count": count }))?;
    out.check("entropy_bound", count.within_bound);
    Ok(out)
}

/// Recomputes the failures recorded in a previous run directory.
pub fn replay_run(source: &Path, only: Option<usize>, run: &mut RunDir) -> Result<Outcome> {
    let cfg: ExperimentConfig = read_report(&source.join("config.json")).context("source run has no readable config")?;
    let failures: Vec<TrialFailure> = read_report(&source.join("failures.json")).context("source run has no failure list")?;
    let plan = cfg.plan();
    let mut rows = Vec::new();
    let mut results = Vec::new();
    let mut all_exact = true;
    for f in failures.iter().filter(|f| only.is_none_or(|t| f.trial == t)) {
        let r = replay(&plan, f)?;
        all_exact &= r.bit_exact && r.still_fails;
        rows.push(format!("{},{},{:e},{:e},{},{}", f.trial, f.seed, f.statistic, r.statistic, r.bit_exact, r.still_fails));
        results.push(json!({ "failure": f, "outcome": r }));
    }
    run.json("replay.json", &json!({ "source": source, "replayed": results }))?;
    run.csv("replay.csv", "trial,seed,recorded,recomputed,bit_exact,still_fails", rows)?;
    let mut out = Outcome::default();
    if results.is_empty() {
        out.warnings.push("no recorded failures to replay".into());
    }
    out.check("bit_exact_replay", all_exact);
    Ok(out)
}

