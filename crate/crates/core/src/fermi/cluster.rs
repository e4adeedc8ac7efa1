use serde::Serialize;

use super::{FermiConfig, Site, SiteNorm};

/// Partition of a configuration into maximal groups whose members are chained
/// by site distances `≤ threshold` (max-norm).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClusterDecomposition {
    pub threshold: u64,
    /// Each cluster sorted; clusters ordered by their smallest site.
    pub clusters: Vec<Vec<Site>>,
}

impl ClusterDecomposition {
    /// Cluster cardinalities in decreasing order.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.clusters.iter().map(Vec::len).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    pub fn diameters(&self) -> Vec<u64> {
        self.clusters
            .iter()
            .map(|c| {
                c.iter()
                    .flat_map(|a| c.iter().map(move |b| SiteNorm::Max.distance(a, b)))
                    .max()
                    .unwrap_or(0)
            })
            .collect()
    }

    pub fn is_monocluster(&self) -> bool {
        self.clusters.len() == 1
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

pub fn r_clusters(x: &FermiConfig, threshold: u64) -> ClusterDecomposition {
    let n = x.particle_count();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if SiteNorm::Max.distance(x.site(i), x.site(j)) <= threshold {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<Site>> = vec![Vec::new(); n];
    for i in 0..n {
        let root = find(&mut parent, i);
        groups[root].push(x.site(i).to_vec());
    }
    // sites are visited in sorted order, so each group is already sorted
    let mut clusters: Vec<Vec<Site>> = groups.into_iter().filter(|g| !g.is_empty()).collect();
    clusters.sort_unstable();
    ClusterDecomposition { threshold, clusters }
}
