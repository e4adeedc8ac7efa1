use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{distances_from, FermiConfig, Lattice};
use crate::{Error, Result};

/// A finite, index-ordered set of configurations.
#[derive(Clone, Debug, Serialize)]
pub struct Domain {
    members: Vec<FermiConfig>,
    #[serde(skip)]
    index: HashMap<FermiConfig, usize>,
}

impl Domain {
    /// Collects, deduplicates and sorts the members.
    pub fn new(members: impl IntoIterator<Item = FermiConfig>) -> Result<Self> {
        let set: BTreeSet<FermiConfig> = members.into_iter().collect();
        let members: Vec<FermiConfig> = set.into_iter().collect();
        if let Some(first) = members.first() {
            if let Some(bad) = members.iter().find(|m| m.check_compatible(first).is_err()) {
                return Err(Error::Mismatch(format!("{bad:?} vs {first:?}")));
            }
        }
        let index = members.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        Ok(Self { members, index })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[FermiConfig] {
        &self.members
    }

    pub fn get(&self, i: usize) -> &FermiConfig {
        &self.members[i]
    }

    pub fn index_of(&self, x: &FermiConfig) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn contains(&self, x: &FermiConfig) -> bool {
        self.index.contains_key(x)
    }

    pub fn is_subset_of(&self, other: &Domain) -> bool {
        self.members.iter().all(|m| other.contains(m))
    }
}

/// All configurations within graph distance `radius` of `center`.
#[derive(Clone, Debug, Serialize)]
pub struct FermiBall {
    pub center: FermiConfig,
    pub radius: usize,
    pub domain: Domain,
}

impl FermiBall {
    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    /// True if every member lies in the coordinate box of the centre inflated by `radius`.
    pub fn within_bounding_box(&self) -> bool {
        let r = self.radius as i64;
        let (lo, hi) = bounding_box(&self.center);
        self.domain
            .members()
            .iter()
            .flat_map(|m| m.sites())
            .all(|s| s.iter().enumerate().all(|(k, &c)| lo[k] - r <= c && c <= hi[k] + r))
    }
}

pub(crate) fn bounding_box(x: &FermiConfig) -> (Vec<i64>, Vec<i64>) {
    let d = x.dim();
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for s in x.sites() {
        for k in 0..d {
            lo[k] = lo[k].min(s[k]);
            hi[k] = hi[k].max(s[k]);
        }
    }
    (lo, hi)
}

pub fn ball(center: &FermiConfig, radius: usize, lattice: &Lattice) -> Result<FermiBall> {
    if center.dim() != lattice.dim() || !center.sites().all(|s| lattice.contains(s)) {
        return Err(Error::InvalidConfig(format!("{center:?} is not a configuration of the lattice")));
    }
    let members = distances_from(center, radius, lattice).into_keys();
    Ok(FermiBall { center: center.clone(), radius, domain: Domain::new(members)? })
}

/// Inner vertex boundary, outer vertex boundary and crossing edges `(inside, outside)`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Boundaries {
    pub inner: Vec<FermiConfig>,
    pub outer: Vec<FermiConfig>,
    pub edges: Vec<(FermiConfig, FermiConfig)>,
}

pub fn boundaries(domain: &Domain, lattice: &Lattice) -> Boundaries {
    let mut inner = BTreeSet::new();
    let mut outer = BTreeSet::new();
    let mut edges = Vec::new();
    for x in domain.members() {
        for y in lattice.neighbors(x) {
            if !domain.contains(&y) {
                inner.insert(x.clone());
                outer.insert(y.clone());
                edges.push((x.clone(), y));
            }
        }
    }
    edges.sort_unstable();
    Boundaries { inner: inner.into_iter().collect(), outer: outer.into_iter().collect(), edges }
}
