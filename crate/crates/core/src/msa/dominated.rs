use std::collections::HashMap;

use rand::Rng;
use serde::Serialize;

use crate::fermi::{distances_from, FermiConfig, Lattice};
use crate::{Error, Result};

/// `q^floor((L+1)/(ℓ+1)) · M`.
pub fn dominated_bound(radius: u64, ell: u64, q: f64, max_value: f64) -> f64 {
    q.powi(((radius + 1) / (ell + 1)) as i32) * max_value
}

#[derive(Clone, Debug, Serialize)]
pub struct DominationCheck {
    pub dominated: bool,
    /// Number of configurations whose `ℓ`-ball fits in the `2L`-ball.
    pub checked: usize,
    /// Largest `|f(x)| / (q · max_sphere |f|)` and where it occurs.
    pub worst: Option<(FermiConfig, f64)>,
}

/// Configurations `x` with `ball_ℓ(x) ⊂ ball_{2L}(u)` and the spheres of radius `ℓ+1` around them.
fn eligible(center: &FermiConfig, radius: u64, ell: u64, lattice: &Lattice) -> Vec<(FermiConfig, Vec<FermiConfig>)> {
    let outer = distances_from(center, 2 * radius as usize, lattice);
    let mut out: Vec<_> = outer
        .keys()
        .filter_map(|x| {
            let local = distances_from(x, ell as usize + 1, lattice);
            let inside = local.iter().filter(|(_, &d)| d as u64 <= ell).all(|(y, _)| outer.contains_key(y));
            inside.then(|| {
                let mut sphere: Vec<FermiConfig> = local.into_iter().filter(|(_, d)| *d as u64 == ell + 1).map(|(y, _)| y).collect();
                sphere.sort_unstable();
                (x.clone(), sphere)
            })
        })
        .collect();
    out.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    out
}

fn lookup(f: &HashMap<FermiConfig, f64>, x: &FermiConfig) -> Result<f64> {
    f.get(x).map(|v| v.abs()).ok_or_else(|| Error::InvalidParameter(format!("function undefined at {x:?}")))
}

/// Checks `|f(x)| ≤ q · max_{ρ(x,y) = ℓ+1} |f(y)|` for every `x` whose
/// `ℓ`-ball lies in `ball_{2L}(u)`.
pub fn dominated_check(f: &HashMap<FermiConfig, f64>, center: &FermiConfig, radius: u64, ell: u64, q: f64, lattice: &Lattice) -> Result<DominationCheck> {
    if ell > radius || !(0.0..1.0).contains(&q) || q == 0.0 {
        return Err(Error::InvalidParameter("need ℓ ≤ L and 0 < q < 1".into()));
    }
    let cells = eligible(center, radius, ell, lattice);
    let mut dominated = true;
    let mut worst: Option<(FermiConfig, f64)> = None;
    for (x, sphere) in &cells {
        let fx = lookup(f, x)?;
        let m = sphere.iter().map(|y| lookup(f, y)).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
        if fx > q * m {
            dominated = false;
        }
        let ratio = if fx == 0.0 { 0.0 } else { fx / (q * m) };
        if worst.as_ref().is_none_or(|w| ratio > w.1) {
            worst = Some((x.clone(), ratio));
        }
    }
    Ok(DominationCheck { dominated, checked: cells.len(), worst })
}

/// Random `(ℓ, q)`-dominated candidate on `ball_{max(3L, 2L+1)}(u)`:
/// uniform values lowered to `q · max_sphere` until nothing changes. The
/// result should still be confirmed with [`dominated_check`].
pub fn random_dominated(center: &FermiConfig, radius: u64, ell: u64, q: f64, lattice: &Lattice, rng: &mut impl Rng) -> HashMap<FermiConfig, f64> {
    let reach = (3 * radius).max(2 * radius + 1) as usize;
    let mut keys: Vec<FermiConfig> = distances_from(center, reach, lattice).into_keys().collect();
    keys.sort_unstable();
    let mut f: HashMap<FermiConfig, f64> = keys.into_iter().map(|k| (k, rng.random::<f64>())).collect();
    let cells = eligible(center, radius, ell, lattice);
    for _ in 0..10_000 {
        let mut changed = false;
        for (x, sphere) in &cells {
            let cap = q * sphere.iter().map(|y| f[y]).fold(0.0, f64::max);
            if f[x] > cap {
                f.insert(x.clone(), cap);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    f
}
