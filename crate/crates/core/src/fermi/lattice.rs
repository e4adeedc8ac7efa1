use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::FermiConfig;
use crate::{Error, Result};

/// Norm used for distances between single sites.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SiteNorm {
    #[default]
    L1,
    Max,
}

impl SiteNorm {
    pub fn distance(self, a: &[i64], b: &[i64]) -> u64 {
        let diffs = a.iter().zip(b).map(|(x, y)| x.abs_diff(*y));
        match self {
            SiteNorm::L1 => diffs.sum(),
            SiteNorm::Max => diffs.max().unwrap_or(0),
        }
    }
}

/// The single-particle world: all of `Z^d`, or a finite box `lo ≤ s ≤ hi`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lattice {
    Full { dim: usize },
    Box { lo: Vec<i64>, hi: Vec<i64> },
}

impl Lattice {
    pub fn full(dim: usize) -> Self {
        Lattice::Full { dim }
    }

    /// The 1D window `{lo, ..., hi}`.
    pub fn segment(lo: i64, hi: i64) -> Self {
        Lattice::Box { lo: vec![lo], hi: vec![hi] }
    }

    pub fn dim(&self) -> usize {
        match self {
            Lattice::Full { dim } => *dim,
            Lattice::Box { lo, .. } => lo.len(),
        }
    }

    pub fn contains(&self, site: &[i64]) -> bool {
        match self {
            Lattice::Full { .. } => true,
            Lattice::Box { lo, hi } => site.iter().zip(lo.iter().zip(hi)).all(|(s, (l, h))| l <= s && s <= h),
        }
    }

    /// Sites of a box world in lexicographic order; `None` for the full lattice.
    pub fn sites(&self) -> Option<Vec<Vec<i64>>> {
        let Lattice::Box { lo, hi } = self else { return None };
        let mut out = vec![Vec::new()];
        for (l, h) in lo.iter().zip(hi) {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (*l..=*h).map(move |c| {
                        let mut p = prefix.clone();
                        p.push(c);
                        p
                    })
                })
                .collect();
        }
        Some(out)
    }

    /// Every N-particle configuration of a box world, sorted.
    pub fn configurations(&self, particles: usize) -> Option<Vec<FermiConfig>> {
        let sites = self.sites()?;
        let mut out = Vec::new();
        let mut chosen = Vec::with_capacity(particles);
        fn rec(sites: &[Vec<i64>], start: usize, k: usize, chosen: &mut Vec<usize>, out: &mut Vec<FermiConfig>) {
            if chosen.len() == k {
                let coords = chosen.iter().flat_map(|&i| sites[i].iter().copied()).collect();
                out.push(FermiConfig::from_sorted_unchecked(sites[0].len(), coords));
                return;
            }
            for i in start..sites.len() {
                chosen.push(i);
                rec(sites, i + 1, k, chosen, out);
                chosen.pop();
            }
        }
        if particles > 0 && !sites.is_empty() {
            rec(&sites, 0, particles, &mut chosen, &mut out);
        }
        Some(out)
    }

    /// Nearest neighbours of a site inside the world.
    pub fn site_neighbors(&self, site: &[i64]) -> Vec<Vec<i64>> {
        let mut out = Vec::with_capacity(2 * site.len());
        for axis in 0..site.len() {
            for step in [-1, 1] {
                let mut s = site.to_vec();
                s[axis] += step;
                if self.contains(&s) {
                    out.push(s);
                }
            }
        }
        out
    }

    /// Configurations reachable by moving exactly one particle to a vacant
    /// nearest-neighbour site, sorted.
    pub fn neighbors(&self, x: &FermiConfig) -> Vec<FermiConfig> {
        let mut out: Vec<FermiConfig> = (0..x.particle_count())
            .flat_map(|i| {
                self.site_neighbors(x.site(i))
                    .into_iter()
                    .filter_map(move |s| x.with_moved(i, &s))
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Coordination number of `x` in the configuration graph.
    pub fn degree(&self, x: &FermiConfig) -> usize {
        (0..x.particle_count())
            .map(|i| {
                self.site_neighbors(x.site(i))
                    .iter()
                    .filter(|s| x.occupation(s) == 0)
                    .count()
            })
            .sum()
    }
}

/// Breadth-first distances from `source` to every configuration within `cap`.
pub fn distances_from(source: &FermiConfig, cap: usize, lattice: &Lattice) -> HashMap<FermiConfig, usize> {
    let mut dist = HashMap::from([(source.clone(), 0)]);
    let mut queue = VecDeque::from([source.clone()]);
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        if d == cap {
            continue;
        }
        for y in lattice.neighbors(&x) {
            if !dist.contains_key(&y) {
                dist.insert(y.clone(), d + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Graph distance by breadth-first search; `Ok(None)` when it exceeds `cap`.
pub fn graph_distance(x: &FermiConfig, y: &FermiConfig, cap: usize, lattice: &Lattice) -> Result<Option<usize>> {
    x.check_compatible(y)?;
    if x.dim() != lattice.dim() {
        return Err(Error::Mismatch(format!("config dimension {} on a {}-dimensional lattice", x.dim(), lattice.dim())));
    }
    if x == y {
        return Ok(Some(0));
    }
    let mut dist = HashMap::from([(x.clone(), 0usize)]);
    let mut queue = VecDeque::from([x.clone()]);
    while let Some(z) = queue.pop_front() {
        let d = dist[&z];
        if d == cap {
            continue;
        }
        for w in lattice.neighbors(&z) {
            if w == *y {
                return Ok(Some(d + 1));
            }
            if !dist.contains_key(&w) {
                dist.insert(w.clone(), d + 1);
                queue.push_back(w);
            }
        }
    }
    Ok(None)
}
