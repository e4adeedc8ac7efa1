use std::collections::{BTreeSet, HashSet};

use nparticle::fermi::*;
use proptest::prelude::*;

fn c(xs: &[i64]) -> FermiConfig {
    FermiConfig::from_1d(xs).unwrap()
}

/// Minimal ℓ1 transport cost between two sorted 1D configurations.
fn sorted_matching(x: &FermiConfig, y: &FermiConfig) -> usize {
    x.sites().zip(y.sites()).map(|(a, b)| (a[0] - b[0]).unsigned_abs() as usize).sum()
}

/// All configurations whose sites lie in `[lo, hi]`.
fn window(n: usize, lo: i64, hi: i64) -> Vec<FermiConfig> {
    Lattice::segment(lo, hi).configurations(n).unwrap()
}

/// `y` is a neighbour of `x` iff exactly one site differs and the two
/// differing sites are lattice neighbours.
fn brute_adjacent(x: &FermiConfig, y: &FermiConfig) -> bool {
    let xs: BTreeSet<&[i64]> = x.sites().collect();
    let ys: BTreeSet<&[i64]> = y.sites().collect();
    let gone: Vec<_> = xs.difference(&ys).collect();
    let came: Vec<_> = ys.difference(&xs).collect();
    gone.len() == 1 && came.len() == 1 && gone[0].iter().zip(came[0].iter()).map(|(a, b)| (a - b).abs()).sum::<i64>() == 1
}

#[test]
fn neighbor_examples() {
    let z = Lattice::full(1);
    assert_eq!(z.neighbors(&c(&[0, 1])), vec![c(&[-1, 1]), c(&[0, 2])]);
    assert_eq!(z.neighbors(&c(&[0])), vec![c(&[-1]), c(&[1])]);
    let mut got = z.neighbors(&c(&[0, 2]));
    got.sort();
    let mut want = vec![c(&[-1, 2]), c(&[1, 2]), c(&[0, 1]), c(&[0, 3])];
    want.sort();
    assert_eq!(got, want);
}

#[test]
fn distance_examples() {
    let z = Lattice::full(1);
    assert_eq!(graph_distance(&c(&[0, 1]), &c(&[0, 1]), 10, &z).unwrap(), Some(0));
    assert_eq!(graph_distance(&c(&[0, 1]), &c(&[2, 3]), 10, &z).unwrap(), Some(4));
    assert_eq!(graph_distance(&c(&[0, 1]), &c(&[2, 3]), 3, &z).unwrap(), None);
    assert!(graph_distance(&c(&[0, 1]), &c(&[0]), 3, &z).is_err());
}

#[test]
fn bfs_matches_sorted_matching_on_random_pairs() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let z = Lattice::full(1);
    for _ in 0..50 {
        let pick = |rng: &mut rand_chacha::ChaCha8Rng| loop {
            let a = rng.random_range(-6..6);
            let b = rng.random_range(-6..6);
            if a != b {
                break c(&[a, b]);
            }
        };
        let (x, y) = (pick(&mut rng), pick(&mut rng));
        assert_eq!(graph_distance(&x, &y, 64, &z).unwrap(), Some(sorted_matching(&x, &y)), "{x:?} {y:?}");
    }
}

#[test]
fn ball_examples_and_box_filter() {
    let z = Lattice::full(1);
    let center = c(&[0, 1]);
    assert_eq!(ball(&center, 0, &z).unwrap().domain.members(), std::slice::from_ref(&center));
    let b1: HashSet<_> = ball(&center, 1, &z).unwrap().domain.members().iter().cloned().collect();
    assert_eq!(b1, [c(&[0, 1]), c(&[-1, 1]), c(&[0, 2])].into_iter().collect());
    let b2 = ball(&center, 2, &z).unwrap();
    let filtered: Vec<_> = window(2, -2, 3).into_iter().filter(|y| sorted_matching(&center, y) <= 2).collect();
    assert_eq!(b2.domain.members(), filtered.as_slice());
    assert!(b2.within_bounding_box());
}

#[test]
fn single_particle_balls_are_diamonds() {
    for d in 1..=2usize {
        let origin = FermiConfig::new([vec![0i64; d]]).unwrap();
        for l in 0..4usize {
            let size = ball(&origin, l, &Lattice::full(d)).unwrap().len();
            // ℓ1 ball of radius l in Z^d
            let want = if d == 1 { 2 * l + 1 } else { 2 * l * l + 2 * l + 1 };
            assert_eq!(size, want);
        }
    }
}

#[test]
fn boundary_examples() {
    let z = Lattice::full(1);
    let x = c(&[0, 1]);
    let single = Domain::new([x.clone()]).unwrap();
    let b = boundaries(&single, &z);
    assert_eq!(b.inner, vec![x.clone()]);
    assert_eq!(b.outer, z.neighbors(&x));
    assert_eq!(b.edges.len(), z.neighbors(&x).len());

    let lam = ball(&x, 1, &z).unwrap().domain;
    let b = boundaries(&lam, &z);
    // outer boundary recomputed from the complement inside a bounding box
    let from_complement: Vec<_> = window(2, -4, 5)
        .into_iter()
        .filter(|y| !lam.contains(y) && lam.members().iter().any(|m| brute_adjacent(m, y)))
        .collect();
    assert_eq!(b.outer, from_complement);
    let mut scanned = Vec::new();
    for m in lam.members() {
        for y in window(2, -4, 5) {
            if !lam.contains(&y) && brute_adjacent(m, &y) {
                scanned.push((m.clone(), y));
            }
        }
    }
    scanned.sort();
    assert_eq!(b.edges, scanned);
}

#[test]
fn cluster_examples() {
    let x = c(&[0, 1, 10]);
    let d = r_clusters(&x, 3);
    assert_eq!(d.sizes(), vec![2, 1]);
    assert_eq!(d.clusters, vec![vec![vec![0], vec![1]], vec![vec![10]]]);
    assert!(r_clusters(&x, 10).is_monocluster());
    assert!(r_clusters(&c(&[5]), 0).is_monocluster());
}

#[test]
fn weak_separation_examples() {
    let w = weakly_separated(&c(&[0, 10]), &c(&[0, 20]), 1).unwrap().unwrap();
    assert!(w.cube.contains(&[10]) && !w.cube.contains(&[0]) && !w.cube.contains(&[20]));
    assert_eq!((w.n_more, w.n_less), (1, 0));
    assert!(weakly_separated(&c(&[0, 10]), &c(&[0, 10]), 1).unwrap().is_none());
}

/// Exhaustive search over every interval of diameter ≤ 2NL near the
/// configurations: is there one whose occupations differ?
fn exists_separating_interval(x: &FermiConfig, y: &FermiConfig, radius: usize) -> bool {
    let n = x.particle_count() as i64;
    let diam = 2 * n * radius as i64;
    let all: Vec<i64> = x.sites().chain(y.sites()).map(|s| s[0]).collect();
    let (lo, hi) = (*all.iter().min().unwrap(), *all.iter().max().unwrap());
    (lo - diam..=hi).any(|a| {
        (0..=diam).any(|s| {
            let q = Cube { lo: vec![a], side: s };
            q.count(x) != q.count(y)
        })
    })
}

#[test]
fn witnesses_are_valid_and_agree_with_exhaustive_search() {
    let configs = window(2, 0, 11);
    for radius in 0..=2usize {
        for x in &configs {
            for y in &configs {
                match weakly_separated(x, y, radius).unwrap() {
                    Some(w) => {
                        assert!(w.cube.diameter() <= 4 * radius as i64);
                        let (more, less) = if w.first_dominates { (x, y) } else { (y, x) };
                        assert_eq!(w.cube.count(more), w.n_more);
                        assert_eq!(w.cube.count(less), w.n_less);
                        assert!(w.n_more > w.n_less);
                    }
                    None => assert!(x == y || !exists_separating_interval(x, y, radius) || sorted_matching(x, y) <= 6 * radius),
                }
            }
        }
    }
}

#[test]
fn distinct_single_configurations_are_always_separated() {
    let configs = window(2, -3, 3);
    for x in &configs {
        for y in &configs {
            assert_eq!(weakly_separated(x, y, 0).unwrap().is_some(), x != y);
        }
    }
}

#[test]
fn equivalence_classes_match_canonicalization() {
    for r in 1..=6u64 {
        let reps = shift_equivalence_classes(2, 1, r, 10_000).unwrap();
        let keys: HashSet<_> = window(2, 0, 3 * r as i64 + 3).iter().map(|x| equivalence_key(x, r)).collect();
        let rep_keys: HashSet<_> = reps.iter().map(|x| equivalence_key(x, r)).collect();
        assert_eq!(rep_keys, keys, "R={r}");
        assert_eq!(reps.len(), r as usize + 1, "R monocluster shapes plus the split class");
    }
    for r in [0, 3, 9] {
        assert_eq!(shift_equivalence_classes(1, 2, r, 100).unwrap().len(), 1);
    }
}

#[test]
fn monocluster_count_respects_power_bound_in_one_dimension() {
    for n in 1..=3usize {
        for r in 1..=4u64 {
            let count = monocluster_shapes(n, 1, r, 1_000_000).unwrap().len() as u64;
            assert!(count <= (3 * n as u64 * r).pow(n as u32), "N={n} R={r}: {count}");
        }
    }
}

#[test]
fn window_graph_is_connected() {
    let w = Lattice::segment(0, 5);
    let all = w.configurations(2).unwrap();
    let reached = distances_from(&all[0], usize::MAX, &w);
    assert_eq!(reached.len(), all.len());
}

fn config_strategy(n: usize, span: i64) -> impl Strategy<Value = FermiConfig> {
    proptest::collection::btree_set(-span..span, n).prop_map(|s| c(&s.into_iter().collect::<Vec<_>>()))
}

proptest! {
    #[test]
    fn adjacency_is_symmetric_and_irreflexive(x in config_strategy(3, 8)) {
        let z = Lattice::full(1);
        for y in z.neighbors(&x) {
            prop_assert!(y != x);
            prop_assert!(z.neighbors(&y).contains(&x));
            prop_assert!(brute_adjacent(&x, &y));
        }
        prop_assert_eq!(z.degree(&x), z.neighbors(&x).len());
    }

    #[test]
    fn balls_grow_with_radius(x in config_strategy(2, 6), l in 0usize..4) {
        let z = Lattice::full(1);
        let small = ball(&x, l, &z).unwrap().domain;
        let big = ball(&x, l + 1, &z).unwrap().domain;
        prop_assert!(small.is_subset_of(&big));
        prop_assert!(big.len() <= 9 * (l + 1).pow(2) + 1);
    }

    #[test]
    fn clusters_ignore_input_order(mut sites in proptest::collection::btree_set(-20i64..20, 1..6).prop_map(|s| s.into_iter().collect::<Vec<_>>()), r in 0u64..6, seed in any::<u64>()) {
        let a = r_clusters(&c(&sites), r);
        let k = sites.len();
        sites.rotate_left((seed % k as u64) as usize);
        sites.reverse();
        let b = r_clusters(&FermiConfig::new(sites.iter().map(|&s| vec![s])).unwrap(), r);
        prop_assert_eq!(&a.clusters, &b.clusters);
        for d in a.diameters() {
            prop_assert!(d <= 2 * (k as u64 - 1) * r);
        }
    }

    #[test]
    fn far_pairs_are_weakly_separated_in_two_dimensions(
        x in proptest::collection::btree_set((-4i64..4, -4i64..4), 2),
        y in proptest::collection::btree_set((-4i64..4, -4i64..4), 2),
        l in 0usize..2,
    ) {
        let x = FermiConfig::new(x.into_iter().map(|(a, b)| vec![a, b])).unwrap();
        let y = FermiConfig::new(y.into_iter().map(|(a, b)| vec![a, b])).unwrap();
        if let Some(w) = weakly_separated(&x, &y, l).unwrap() {
            let (more, less) = if w.first_dominates { (&x, &y) } else { (&y, &x) };
            prop_assert!(w.cube.count(more) > w.cube.count(less));
            prop_assert!(w.cube.diameter() <= 4 * l as i64);
        }
    }
}
