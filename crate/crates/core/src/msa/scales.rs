use serde::Serialize;

use crate::haarsh::{log2_coeff_a, ScaleArithmetic};
use crate::{Error, Result};

/// `m(1 + L^(-1/8))L` for `L ≥ 1` and `2m` for `L = 0`.
pub fn gamma(m: f64, length: u64) -> f64 {
    if length == 0 {
        2.0 * m
    } else {
        let l = length as f64;
        m * (1.0 + l.powf(-0.125)) * l
    }
}

/// One level of the scale sequence. Thresholds are kept as base-2
/// logarithms because they underflow double precision almost immediately.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleLevel {
    pub j: i32,
    /// `L_j`, or `None` if it does not fit in 64 bits.
    pub length: Option<u64>,
    /// `log2 L_j`; `None` for the level `L_{-1} = 0`.
    pub log2_length: Option<f64>,
    pub tilde_big_n: u32,
    pub log2_beta: f64,
    pub log2_delta: f64,
}

impl ScaleLevel {
    pub fn delta(&self) -> f64 {
        self.log2_delta.exp2()
    }
}

/// `L_j = L_0^(2^j)` for `j = -1..=j_max` with `L_{-1} = 0`; the level
/// `j = -1` reuses the generation of `L_0`.
#[derive(Clone, Debug, Serialize)]
pub struct ScaleSequence {
    pub initial: u64,
    pub levels: Vec<ScaleLevel>,
}

impl ScaleSequence {
    pub fn new(initial: u64, j_max: u32, arith: ScaleArithmetic) -> Result<Self> {
        if initial < 2 {
            return Err(Error::InvalidParameter("initial scale must be at least 2".into()));
        }
        let log2_l0 = (initial as f64).log2();
        let level = |j: i32, log2_length: Option<f64>| -> Result<ScaleLevel> {
            let lj = log2_length.unwrap_or(log2_l0);
            let n = arith.tilde_n_log2(4.0 * lj)?;
            let log2_beta = -2.0 * arith.b * f64::from(n);
            let length = match log2_length {
                None => Some(0),
                Some(l) if l < 63.0 => Some(initial.pow(1u32 << j)),
                Some(_) => None,
            };
            Ok(ScaleLevel { j, length, log2_length, tilde_big_n: n, log2_beta, log2_delta: log2_beta + log2_coeff_a(n, arith.b) })
        };
        let mut levels = vec![level(-1, None)?];
        for j in 0..=j_max as i32 {
            levels.push(level(j, Some(log2_l0 * (j as f64).exp2()))?);
        }
        Ok(Self { initial, levels })
    }

    pub fn level(&self, j: i32) -> Option<&ScaleLevel> {
        self.levels.iter().find(|l| l.j == j)
    }
}
