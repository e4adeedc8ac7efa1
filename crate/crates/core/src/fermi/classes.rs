use std::collections::BTreeSet;

use super::{r_clusters, FermiConfig, Site};
use crate::{Error, Result};

/// Canonical form of a configuration up to independent translation of its
/// clusters: each cluster shifted so its smallest site is the origin, then
/// the clusters sorted.
pub type ClassKey = Vec<Vec<Site>>;

fn normalize(cluster: &[Site]) -> Vec<Site> {
    let base = &cluster[0];
    cluster.iter().map(|s| s.iter().zip(base).map(|(a, b)| a - b).collect()).collect()
}

pub fn equivalence_key(x: &FermiConfig, threshold: u64) -> ClassKey {
    let mut key: ClassKey = r_clusters(x, threshold).clusters.iter().map(|c| normalize(c)).collect();
    key.sort_unstable();
    key
}

/// All normalized `threshold`-connected shapes of `size` sites in `Z^dim`.
pub fn monocluster_shapes(size: usize, dim: usize, threshold: u64, budget: usize) -> Result<Vec<Vec<Site>>> {
    let origin = vec![0i64; dim];
    let r = threshold as i64;
    let mut level: BTreeSet<Vec<Site>> = BTreeSet::from([vec![origin.clone()]]);
    for _ in 1..size {
        let mut next = BTreeSet::new();
        for shape in &level {
            for member in shape {
                for offset in cube_offsets(dim, r) {
                    let cand: Site = member.iter().zip(&offset).map(|(a, b)| a + b).collect();
                    if cand <= origin || shape.contains(&cand) {
                        continue;
                    }
                    let mut grown = shape.clone();
                    grown.push(cand);
                    grown.sort_unstable();
                    next.insert(grown);
                    if next.len() > budget {
                        return Err(Error::BudgetExceeded { what: "cluster shape enumeration", budget });
                    }
                }
            }
        }
        level = next;
    }
    Ok(level.into_iter().collect())
}

fn cube_offsets(dim: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-r..=r).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

/// One representative per equivalence class of `particles`-particle
/// configurations in `Z^dim`, with clusters taken at `threshold`.
pub fn shift_equivalence_classes(particles: usize, dim: usize, threshold: u64, budget: usize) -> Result<Vec<FermiConfig>> {
    if particles == 0 || dim == 0 {
        return Err(Error::InvalidParameter("need at least one particle and one dimension".into()));
    }
    let mut shapes: Vec<Vec<Site>> = Vec::new();
    for size in 1..=particles {
        shapes.extend(monocluster_shapes(size, dim, threshold, budget)?);
    }
    let mut reps = Vec::new();
    let mut chosen = Vec::new();
    choose(&shapes, 0, particles, &mut chosen, &mut |pick| {
        reps.push(place(pick.iter().map(|&i| &shapes[i]), threshold));
    });
    if reps.len() > budget {
        return Err(Error::BudgetExceeded { what: "equivalence classes", budget });
    }
    Ok(reps)
}

fn choose(shapes: &[Vec<Site>], start: usize, remaining: usize, chosen: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    if remaining == 0 {
        emit(chosen);
        return;
    }
    for i in start..shapes.len() {
        if shapes[i].len() <= remaining {
            chosen.push(i);
            choose(shapes, i, remaining - shapes[i].len(), chosen, emit);
            chosen.pop();
        }
    }
}

/// Lays the shapes out along the first axis with gaps wider than `threshold`.
fn place<'a>(shapes: impl Iterator<Item = &'a Vec<Site>>, threshold: u64) -> FermiConfig {
    let mut sites = Vec::new();
    let mut offset = 0i64;
    for shape in shapes {
        let reach = shape.iter().map(|s| s[0]).max().unwrap_or(0);
        sites.extend(shape.iter().map(|s| {
            let mut t = s.clone();
            t[0] += offset;
            t
        }));
        offset += reach + threshold as i64 + 1;
    }
    FermiConfig::new(sites).expect("placed shapes are disjoint")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_particles_on_a_line() {
        let reps = shift_equivalence_classes(2, 1, 3, 1000).unwrap();
        let keys: BTreeSet<ClassKey> = reps.iter().map(|r| equivalence_key(r, 3)).collect();
        assert_eq!(keys.len(), 4);
        for pair in [[0, 1], [0, 2], [0, 3]] {
            let x = FermiConfig::from_1d(&pair).unwrap();
            assert!(keys.contains(&equivalence_key(&x, 3)));
        }
    }

    #[test]
    fn single_particle_has_one_class() {
        for r in 0..5 {
            assert_eq!(shift_equivalence_classes(1, 2, r, 100).unwrap().len(), 1);
        }
    }

    #[test]
    fn key_is_translation_invariant_per_cluster() {
        let a = FermiConfig::from_1d(&[0, 1, 20]).unwrap();
        let b = FermiConfig::from_1d(&[-50, 7, 8]).unwrap();
        assert_eq!(equivalence_key(&a, 3), equivalence_key(&b, 3));
    }

    #[test]
    fn budget_is_enforced() {
        assert!(monocluster_shapes(4, 2, 3, 10).is_err());
    }
}
