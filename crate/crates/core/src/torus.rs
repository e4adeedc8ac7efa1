//! Quasi-periodic shifts on the torus `[0,1)^ν` and their dyadic partitions.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest dyadic generation whose cube indices fit the `u128` encoding.
pub const MAX_GENERATION: u32 = 127;

fn wrap(v: f64) -> f64 {
    let r = v.rem_euclid(1.0);
    // rem_euclid can round up to exactly 1.0 for tiny negative inputs
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint(Vec<f64>);

impl TorusPoint {
    pub fn new(coords: impl IntoIterator<Item = f64>) -> Self {
        Self(coords.into_iter().map(wrap).collect())
    }

    pub fn origin(nu: usize) -> Self {
        Self(vec![0.0; nu])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn nu(&self) -> usize {
        self.0.len()
    }
}

/// Max over coordinates of the wraparound distance on the circle.
pub fn torus_distance(a: &TorusPoint, b: &TorusPoint) -> f64 {
    a.0.iter()
        .zip(&b.0)
        .map(|(x, y)| {
            let t = (x - y).abs();
            t.min(1.0 - t)
        })
        .fold(0.0, f64::max)
}

/// Frequency vectors given by name (`"golden"`, `"sqrt2"`) or as explicit
/// decimal strings, one row of ν entries per lattice direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrequencySpec {
    Named(String),
    Explicit(Vec<Vec<String>>),
}

impl Default for FrequencySpec {
    fn default() -> Self {
        FrequencySpec::Named("golden".into())
    }
}

const PRIMES: [u32; 16] = [2, 3, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59];

impl FrequencySpec {
    pub fn resolve(&self, dim: usize, nu: usize) -> Result<Vec<Vec<f64>>> {
        let table = match self {
            FrequencySpec::Named(name) => {
                let first = match name.as_str() {
                    "golden" => (5f64.sqrt() - 1.0) / 2.0,
                    "sqrt2" => 2f64.sqrt() - 1.0,
                    other => return Err(Error::InvalidParameter(format!("unknown frequency preset {other:?}"))),
                };
                if dim * nu > PRIMES.len() + 1 {
                    return Err(Error::InvalidParameter("too many frequency components for a preset".into()));
                }
                // further components are fractional parts of square roots of
                // distinct primes, rationally independent of the first
                let mut extra = PRIMES.iter().filter(|&&p| !(name == "sqrt2" && p == 2)).map(|&p| f64::from(p).sqrt().fract());
                (0..dim)
                    .map(|j| (0..nu).map(|i| if j == 0 && i == 0 { first } else { extra.next().unwrap() }).collect())
                    .collect()
            }
            FrequencySpec::Explicit(rows) => rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::InvalidParameter(format!("frequency {s:?}: {e}"))))
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<Vec<_>>>()?,
        };
        if table.len() != dim || table.iter().any(|r| r.len() != nu) {
            return Err(Error::InvalidParameter(format!("expected {dim} frequency vectors of length {nu}")));
        }
        Ok(table)
    }
}

/// The `Z^d` action `ω ↦ ω + Σ x_j α_j (mod 1)` with its aperiodicity and
/// divergence constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftSystem {
    pub frequencies: Vec<Vec<f64>>,
    pub upa_exponent: u32,
    pub upa_constant: f64,
    pub div_exponent: u32,
    pub div_constant: f64,
}

impl ShiftSystem {
    pub fn new(frequencies: Vec<Vec<f64>>, upa_exponent: u32, upa_constant: f64, div_exponent: u32) -> Result<Self> {
        let nu = frequencies.first().map_or(0, Vec::len);
        if nu == 0 || frequencies.iter().any(|r| r.len() != nu) {
            return Err(Error::InvalidParameter("frequency table must be a non-empty d×ν array".into()));
        }
        Ok(Self { frequencies, upa_exponent, upa_constant, div_exponent, div_constant: 1.0 })
    }

    pub fn dim(&self) -> usize {
        self.frequencies.len()
    }

    pub fn nu(&self) -> usize {
        self.frequencies[0].len()
    }

    pub fn translate(&self, omega: &TorusPoint, x: &[i64]) -> TorusPoint {
        assert_eq!(x.len(), self.dim(), "lattice dimension");
        TorusPoint::new((0..self.nu()).map(|i| {
            omega.0[i] + x.iter().zip(&self.frequencies).map(|(&xj, a)| (xj as f64 * a[i]).fract()).sum::<f64>()
        }))
    }
}

/// Generation-`n` dyadic cube with lower corner `lower · 2^-n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicCube {
    pub generation: u32,
    pub lower: Vec<u128>,
}

impl DyadicCube {
    pub fn side(&self) -> f64 {
        (-f64::from(self.generation)).exp2()
    }

    pub fn lower_corner(&self) -> Vec<f64> {
        let s = self.side();
        self.lower.iter().map(|&l| l as f64 * s).collect()
    }

    /// Half-open membership `l·2^-n ≤ ω < (l+1)·2^-n`.
    /// Compared on integer corners, so it stays exact beyond 53 generations.
    pub fn contains(&self, omega: &TorusPoint) -> bool {
        let scale = f64::from(self.generation).exp2();
        omega.0.len() == self.lower.len() && omega.0.iter().zip(&self.lower).all(|(&w, &l)| (w * scale).floor() as u128 == l)
    }

    pub fn parent(&self) -> Option<DyadicCube> {
        (self.generation > 0).then(|| DyadicCube { generation: self.generation - 1, lower: self.lower.iter().map(|l| l >> 1).collect() })
    }

    /// Index in `1..=2^(νn)`, when it fits.
    pub fn linear_index(&self) -> Option<u128> {
        let bits = self.generation.checked_mul(self.lower.len() as u32)?;
        if bits > 127 {
            return None;
        }
        Some(1 + self.lower.iter().rev().fold(0u128, |acc, &l| (acc << self.generation) | l))
    }
}

pub fn cube_index(omega: &TorusPoint, generation: u32) -> Result<DyadicCube> {
    if generation > MAX_GENERATION {
        return Err(Error::InvalidParameter(format!("dyadic generation {generation} exceeds {MAX_GENERATION}")));
    }
    let scale = f64::from(generation).exp2();
    // multiplying by a power of two is exact, so the floor is exact too
    let lower = omega.0.iter().map(|&w| (w * scale).floor() as u128).collect();
    Ok(DyadicCube { generation, lower })
}

#[derive(Clone, Debug, Serialize)]
pub struct UpaReport {
    pub range: u64,
    /// min over `0 < |z| ≤ range` of `dist(T^z ω, ω) · C_A · |z|^A`.
    pub min_margin: f64,
    pub argmin: Vec<i64>,
    pub holds: bool,
    /// Smallest integer constant making the margin at least one on this range.
    pub suggested_constant: f64,
}

fn max_norm(z: &[i64]) -> u64 {
    z.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
}

/// Lattice vectors with max-norm in `1..=range` having a positive leading
/// non-zero coordinate (one of each `±z` pair).
fn half_ball(dim: usize, range: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * range + 1) as u64;
    let total = side.pow(dim as u32);
    (0..total).filter_map(move |mut code| {
        let mut z = Vec::with_capacity(dim);
        for _ in 0..dim {
            z.push((code % side) as i64 - range);
            code /= side;
        }
        z.reverse();
        let positive = z.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0);
        positive.then_some(z)
    })
}

/// Scans all shifts up to `range`; for a rotation the orbit distance does
/// not depend on the base point, so ω = 0 suffices.
pub fn verify_upa(system: &ShiftSystem, range: u64) -> Result<UpaReport> {
    if range == 0 {
        return Err(Error::InvalidParameter("range must be at least 1".into()));
    }
    let origin = TorusPoint::origin(system.nu());
    let mut best = (f64::INFINITY, Vec::new());
    for z in half_ball(system.dim(), range as i64) {
        let scaled = torus_distance(&system.translate(&origin, &z), &origin) * (max_norm(&z) as f64).powi(system.upa_exponent as i32);
        if scaled < best.0 {
            best = (scaled, z);
        }
    }
    let min_margin = best.0 * system.upa_constant;
    Ok(UpaReport {
        range,
        min_margin,
        argmin: best.1,
        holds: min_margin >= 1.0,
        suggested_constant: if best.0 > 0.0 { (1.0 / best.0).ceil() } else { f64::INFINITY },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DivReport {
    pub max_ratio: f64,
    pub evaluated: usize,
    pub skipped: usize,
}

/// `dist(T^x ω, T^x ω') / (|x|^A' dist(ω, ω'))`, or `None` for the 0/0 cases.
pub fn div_ratio(system: &ShiftSystem, a: &TorusPoint, b: &TorusPoint, x: &[i64]) -> Option<f64> {
    let base = torus_distance(a, b);
    let norm = max_norm(x);
    if base == 0.0 || norm == 0 {
        return None;
    }
    let moved = torus_distance(&system.translate(a, x), &system.translate(b, x));
    Some(moved / ((norm as f64).powi(system.div_exponent as i32) * base))
}

pub fn verify_div(system: &ShiftSystem, samples: usize, range: u64, seed: u64) -> DivReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = range as i64;
    let mut report = DivReport { max_ratio: 0.0, evaluated: 0, skipped: 0 };
    for _ in 0..samples {
        let a = TorusPoint::new((0..system.nu()).map(|_| rng.random::<f64>()));
        let b = TorusPoint::new((0..system.nu()).map(|_| rng.random::<f64>()));
        let x: Vec<i64> = (0..system.dim()).map(|_| rng.random_range(-r..=r)).collect();
        match div_ratio(system, &a, &b, &x) {
            Some(q) => {
                report.evaluated += 1;
                report.max_ratio = report.max_ratio.max(q);
            }
            None => report.skipped += 1,
        }
    }
    report
}

/// Radii and dyadic generation of the ω-space covers used at length scale `L`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyCover {
    pub coarse_radius: f64,
    pub fine_radius: f64,
    /// `coarse_radius^-ν`.
    pub cover_count: f64,
    /// `n` with `2^(-n-2) ≤ 6·coarse_radius < 2^(-n-1)`.
    pub generation: u32,
}

pub fn entropy_covers(length: u64, a: u32, a_div: u32, nu: usize) -> Result<EntropyCover> {
    if length < 2 {
        return Err(Error::InvalidParameter("length scale must be at least 2".into()));
    }
    let l = length as f64;
    let coarse = 1.0 / (6.0 * l.powi(4 * a as i32));
    let fine = 1.0 / (6.0 * l.powi(4 * (a + a_div) as i32));
    let e = 4.0 * f64::from(a) * l.log2();
    let er = e.round();
    let e = if (e - er).abs() < 1e-9 { er } else { e };
    let generation = (e.ceil() - 2.0).max(0.0) as u32;
    Ok(EntropyCover { coarse_radius: coarse, fine_radius: fine, cover_count: coarse.powi(-(nu as i32)), generation })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverSplitReport {
    pub samples: usize,
    /// Largest number of generation-n cubes met by one shifted fine cube.
    pub max_pieces: usize,
    /// Sampled interior points that fell outside the predicted pieces.
    pub stray_points: usize,
}

/// Samples fine cubes and shifts `z` with `|z| ≤ reach`, counting how many
/// generation-`n` cubes the image of each fine cube meets.
pub fn cover_split_check(system: &ShiftSystem, reach: u64, fine_radius: f64, generation: u32, samples: usize, seed: u64) -> Result<CoverSplitReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nu = system.nu();
    let r = reach as i64;
    let mut report = CoverSplitReport { samples, max_pieces: 0, stray_points: 0 };
    for _ in 0..samples {
        let corner: Vec<f64> = (0..nu).map(|_| rng.random::<f64>()).collect();
        let z: Vec<i64> = (0..system.dim()).map(|_| rng.random_range(-r..=r)).collect();
        let low = system.translate(&TorusPoint::new(corner.iter().copied()), &z);
        let high = TorusPoint::new(low.0.iter().map(|c| c + fine_radius));
        let lo_cube = cube_index(&low, generation)?;
        let hi_cube = cube_index(&high, generation)?;
        let pieces: usize = lo_cube.lower.iter().zip(&hi_cube.lower).map(|(a, b)| if a == b { 1 } else { 2 }).product();
        report.max_pieces = report.max_pieces.max(pieces);
        for _ in 0..4 {
            let p = TorusPoint::new(low.0.iter().map(|c| c + rng.random::<f64>() * fine_radius));
            let cube = cube_index(&p, generation)?;
            let inside = cube.lower.iter().enumerate().all(|(k, l)| *l == lo_cube.lower[k] || *l == hi_cube.lower[k]);
            if !inside {
                report.stray_points += 1;
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryCheck {
    pub points: usize,
    pub generation: u32,
    pub collision: Option<(Vec<i64>, Vec<i64>)>,
}

impl TrajectoryCheck {
    pub fn distinct(&self) -> bool {
        self.collision.is_none()
    }
}

/// Checks that the orbit points `T^x ω`, `|x| ≤ reach`, occupy pairwise
/// distinct generation-`n` cubes.
pub fn trajectory_separation(system: &ShiftSystem, omega: &TorusPoint, reach: u64, generation: u32) -> Result<TrajectoryCheck> {
    let r = reach as i64;
    let side = (2 * r + 1) as u64;
    let total = side.pow(system.dim() as u32);
    let mut seen: HashMap<DyadicCube, Vec<i64>> = HashMap::with_capacity(total as usize);
    for mut code in 0..total {
        let mut x = Vec::with_capacity(system.dim());
        for _ in 0..system.dim() {
            x.push((code % side) as i64 - r);
            code /= side;
        }
        let cube = cube_index(&system.translate(omega, &x), generation)?;
        if let Some(prev) = seen.insert(cube, x.clone()) {
            return Ok(TrajectoryCheck { points: total as usize, generation, collision: Some((prev, x)) });
        }
    }
    Ok(TrajectoryCheck { points: total as usize, generation, collision: None })
}
