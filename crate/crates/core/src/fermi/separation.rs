use serde::Serialize;

use super::{r_clusters, FermiConfig};
use crate::Result;

/// Closed lattice cube `lo ≤ s ≤ lo + side` with max-norm diameter `side`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cube {
    pub lo: Vec<i64>,
    pub side: i64,
}

impl Cube {
    pub fn contains(&self, site: &[i64]) -> bool {
        site.iter().zip(&self.lo).all(|(&s, &l)| l <= s && s <= l + self.side)
    }

    /// Number of particles of `x` inside the cube.
    pub fn count(&self, x: &FermiConfig) -> usize {
        x.sites().filter(|s| self.contains(s)).count()
    }

    pub fn diameter(&self) -> i64 {
        self.side
    }

    /// Smallest cube containing the coordinate box `[lo, hi]`; among the
    /// admissible placements the lexicographically smallest corner is chosen.
    pub fn enclosing(lo: &[i64], hi: &[i64]) -> Self {
        let side = lo.iter().zip(hi).map(|(l, h)| h - l).max().unwrap_or(0);
        Cube { lo: hi.iter().map(|h| h - side).collect(), side }
    }
}

/// A cube holding strictly more particles of one configuration than of the other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub cube: Cube,
    /// True when the first argument has the larger occupation.
    pub first_dominates: bool,
    pub n_more: usize,
    pub n_less: usize,
}

fn directed(x: &FermiConfig, y: &FermiConfig, radius: usize) -> Option<(Cube, usize, usize)> {
    let r = radius as i64;
    r_clusters(x, 2 * radius as u64).clusters.into_iter().find_map(|cluster| {
        let d = cluster[0].len();
        let lo: Vec<i64> = (0..d).map(|k| cluster.iter().map(|s| s[k]).min().unwrap() - r).collect();
        let hi: Vec<i64> = (0..d).map(|k| cluster.iter().map(|s| s[k]).max().unwrap() + r).collect();
        let cube = Cube::enclosing(&lo, &hi);
        let (nx, ny) = (cube.count(x), cube.count(y));
        (nx > ny).then_some((cube, nx, ny))
    })
}

/// Searches for a weak-separation witness between the radius-`radius` balls
/// around `x` and `y`, built from the `2·radius`-clusters of either
/// configuration. `Ok(None)` means no witness was found.
pub fn weakly_separated(x: &FermiConfig, y: &FermiConfig, radius: usize) -> Result<Option<Witness>> {
    x.check_compatible(y)?;
    if let Some((cube, n_more, n_less)) = directed(x, y, radius) {
        return Ok(Some(Witness { cube, first_dominates: true, n_more, n_less }));
    }
    Ok(directed(y, x, radius).map(|(cube, n_more, n_less)| Witness { cube, first_dominates: false, n_more, n_less }))
}
