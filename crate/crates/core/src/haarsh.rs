//! Lacunary Haar expansion `v(ω; θ) = Σ_n a_n Σ_k θ_{n,k} 1_{C_{n,k}}(ω)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::torus::{cube_index, DyadicCube, ShiftSystem, TorusPoint, MAX_GENERATION};
use crate::{Error, Result};

/// SplitMix64 finalizer.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaMode {
    /// Keyed uniform values in `[0, 1)`.
    Keyed,
    /// The same value for every `(n, k)`.
    Constant(f64),
}

/// Lazily addressable amplitudes `θ_{n,k}`: a keyed hash of the seed, the
/// generation and the cube corner, so nothing is ever stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaField {
    pub seed: u64,
    pub mode: ThetaMode,
    /// Replacement seeds for single generations, used to resample one
    /// generation while freezing all others.
    #[serde(default)]
    pub generation_seeds: BTreeMap<u32, u64>,
}

impl ThetaField {
    pub fn keyed(seed: u64) -> Self {
        Self { seed, mode: ThetaMode::Keyed, generation_seeds: BTreeMap::new() }
    }

    pub fn constant(value: f64) -> Self {
        Self { seed: 0, mode: ThetaMode::Constant(value), generation_seeds: BTreeMap::new() }
    }

    pub fn with_generation_seed(mut self, generation: u32, seed: u64) -> Self {
        self.generation_seeds.insert(generation, seed);
        self
    }

    pub fn value(&self, cube: &DyadicCube) -> f64 {
        match self.mode {
            ThetaMode::Constant(c) => c,
            ThetaMode::Keyed => {
                let seed = self.generation_seeds.get(&cube.generation).copied().unwrap_or(self.seed);
                let mut h = mix64(seed ^ mix64(u64::from(cube.generation)));
                for &l in &cube.lower {
                    h = mix64(h ^ (l as u64));
                    h = mix64(h ^ ((l >> 64) as u64));
                }
                (h >> 11) as f64 * (-53f64).exp2()
            }
        }
    }
}

/// `log2 a_n = -2 b n²`.
pub fn log2_coeff_a(n: u32, b: f64) -> f64 {
    -2.0 * b * f64::from(n) * f64::from(n)
}

pub fn coeff_a(n: u32, b: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("generations start at 1".into()));
    }
    if b <= 0.0 {
        return Err(Error::InvalidParameter("lacunarity exponent must be positive".into()));
    }
    Ok(log2_coeff_a(n, b).exp2())
}

/// `Σ_{n > N} a_n`, summed until the terms underflow.
pub fn tail_sum(n: u32, b: f64) -> f64 {
    let mut total = 0.0;
    for k in n + 1.. {
        let t = log2_coeff_a(k, b).exp2();
        if t == 0.0 || t < total * f64::EPSILON {
            break;
        }
        total += t;
    }
    total
}

/// Sup-norm bound on `v - v_N`: `½·2^(-2bN)·a_N` when `b ≥ 2`, where that
/// closed form is valid, otherwise the summed tail.
pub fn tail_bound(n: u32, b: f64) -> f64 {
    if b >= 2.0 {
        (-1.0 - 2.0 * b * f64::from(n) + log2_coeff_a(n, b)).exp2()
    } else {
        tail_sum(n, b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaarshHull {
    pub b: f64,
    pub nu: usize,
    /// Deepest generation available for evaluation.
    pub generations: u32,
    pub theta: ThetaField,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HullValue {
    pub value: f64,
    pub tail_bound: f64,
}

impl HaarshHull {
    pub fn new(b: f64, nu: usize, generations: u32, theta: ThetaField) -> Result<Self> {
        if b <= 0.0 || nu == 0 {
            return Err(Error::InvalidParameter("need b > 0 and ν ≥ 1".into()));
        }
        if generations == 0 || generations > MAX_GENERATION {
            return Err(Error::InvalidParameter(format!("generations must lie in 1..={MAX_GENERATION}")));
        }
        Ok(Self { b, nu, generations, theta })
    }

    /// `v_N(ω) = Σ_{n ≤ N} a_n θ_{n, k(ω)}` with one active cube per generation.
    pub fn value(&self, omega: &TorusPoint, truncation: u32) -> Result<HullValue> {
        if truncation == 0 || truncation > self.generations {
            return Err(Error::InvalidParameter(format!("truncation {truncation} outside 1..={}", self.generations)));
        }
        let mut value = 0.0;
        for n in 1..=truncation {
            let a = log2_coeff_a(n, self.b).exp2();
            if a == 0.0 {
                break;
            }
            value += a * self.theta.value(&cube_index(omega, n)?);
        }
        Ok(HullValue { value, tail_bound: tail_bound(truncation, self.b) })
    }
}

/// `v_N(T^x ω)`.
pub fn site_potential(hull: &HaarshHull, system: &ShiftSystem, omega: &TorusPoint, x: &[i64], truncation: u32) -> Result<f64> {
    Ok(hull.value(&system.translate(omega, x), truncation)?.value)
}

/// Smallest gap between values at distinct positions.
pub fn separation(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::TooFewValues(values.len()));
    }
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    Ok(v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min))
}

/// Integer scale functions derived from the aperiodicity constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleArithmetic {
    pub a: u32,
    pub c: f64,
    pub b: f64,
}

impl ScaleArithmetic {
    /// `1 + floor((4A ln L - ln(C/2)) / ln 2)` from `log2 L`.
    pub fn tilde_n_log2(&self, log2_length: f64) -> Result<u32> {
        if self.c <= 0.0 || log2_length <= 0.0 {
            return Err(Error::InvalidParameter("need C > 0 and L > 1".into()));
        }
        let t = 4.0 * f64::from(self.a) * log2_length - (self.c / 2.0).log2();
        // keep exact integers exact despite log rounding
        let r = t.round();
        let t = if (t - r).abs() < 1e-9 { r } else { t };
        let v = 1.0 + t.floor();
        if v < 1.0 {
            return Err(Error::InvalidParameter("scale too small for the given C".into()));
        }
        Ok(v as u32)
    }

    pub fn tilde_n(&self, length: u64) -> Result<u32> {
        if length < 2 {
            return Err(Error::InvalidParameter("length must be at least 2".into()));
        }
        self.tilde_n_log2((length as f64).log2())
    }

    /// `ñ(L^4)`.
    pub fn tilde_big_n(&self, length: u64) -> Result<u32> {
        if length < 2 {
            return Err(Error::InvalidParameter("length must be at least 2".into()));
        }
        self.tilde_n_log2(4.0 * (length as f64).log2())
    }

    /// Exponent constant `B = 800·b·A²/ln 2` of the density bound.
    pub fn big_b(&self) -> f64 {
        800.0 * self.b * f64::from(self.a * self.a) / std::f64::consts::LN_2
    }

    pub fn lvb_density_bound(&self, length: u64) -> Result<LvbReport> {
        let n = self.tilde_big_n(length)?;
        let l = length as f64;
        let log2_inverse_coeff = -log2_coeff_a(n, self.b);
        let log2_bound = self.big_b() * l.ln() * l.log2();
        Ok(LvbReport { length, generation: n, log2_inverse_coeff, log2_bound, holds: log2_inverse_coeff <= log2_bound })
    }
}

/// `a_Ñ(L)^-1` against `L^(B ln L)`, both as base-2 logarithms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LvbReport {
    pub length: u64,
    pub generation: u32,
    pub log2_inverse_coeff: f64,
    pub log2_bound: f64,
    pub holds: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn coefficient_examples() {
        assert_eq!(coeff_a(1, 5.0).unwrap(), 0.0009765625);
        assert!(coeff_a(0, 2.0).is_err());
    }

    #[test]
    fn tilde_examples() {
        let s = ScaleArithmetic { a: 1, c: 2.0, b: 2.0 };
        assert_eq!(s.tilde_n(16).unwrap(), 17);
        assert_eq!(s.tilde_big_n(16).unwrap(), 65);
        assert_eq!(s.tilde_n(65536).unwrap(), 65);
    }

    #[test]
    fn density_bound_example() {
        let s = ScaleArithmetic { a: 1, c: 2.0, b: 2.0 };
        assert_relative_eq!(s.big_b(), 1600.0 / std::f64::consts::LN_2, max_relative = 1e-15);
        let r = s.lvb_density_bound(16).unwrap();
        assert_eq!(r.generation, 65);
        assert_eq!(r.log2_inverse_coeff, 16900.0);
        assert_relative_eq!(r.log2_bound, 25600.0, max_relative = 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn constant_theta_sums_coefficients() {
        let w = TorusPoint::new([0.37]);
        let zero = HaarshHull::new(2.0, 1, 6, ThetaField::constant(0.0)).unwrap();
        assert_eq!(zero.value(&w, 6).unwrap().value, 0.0);
        let one = HaarshHull::new(0.5, 1, 6, ThetaField::constant(1.0)).unwrap();
        let expected: f64 = (1..=6).map(|n| coeff_a(n, 0.5).unwrap()).sum();
        assert_eq!(one.value(&w, 6).unwrap().value, expected);
        assert!(one.value(&w, 7).is_err());
    }

    #[test]
    fn theta_is_deterministic_and_keyed() {
        let t = ThetaField::keyed(9);
        let c = cube_index(&TorusPoint::new([0.3]), 4).unwrap();
        assert_eq!(t.value(&c), ThetaField::keyed(9).value(&c));
        assert_ne!(t.value(&c), ThetaField::keyed(10).value(&c));
        let frozen = t.clone().with_generation_seed(5, 77);
        assert_eq!(frozen.value(&c), t.value(&c));
    }

    #[test]
    fn separation_examples() {
        assert_eq!(separation(&[0.0, 0.5, 1.2]).unwrap(), 0.5);
        assert_eq!(separation(&[1.0, 1.0]).unwrap(), 0.0);
        assert!(separation(&[1.0]).is_err());
    }
}
