use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A single lattice site.
pub type Site = Vec<i64>;

/// An unordered set of N distinct sites, stored lexicographically sorted so
/// that equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FermiConfig {
    dim: usize,
    coords: Box<[i64]>,
}

impl FermiConfig {
    pub fn new<I, S>(sites: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[i64]>,
    {
        let mut list: Vec<Vec<i64>> = sites.into_iter().map(|s| s.as_ref().to_vec()).collect();
        let dim = match list.first() {
            Some(s) => s.len(),
            None => return Err(Error::InvalidConfig("no particles".into())),
        };
        if dim == 0 {
            return Err(Error::InvalidConfig("zero-dimensional site".into()));
        }
        if list.iter().any(|s| s.len() != dim) {
            return Err(Error::InvalidConfig("sites of differing dimension".into()));
        }
        list.sort_unstable();
        if list.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig("two particles share a site".into()));
        }
        Ok(Self { dim, coords: list.concat().into_boxed_slice() })
    }

    /// One-dimensional shorthand: `from_1d(&[0, 1])` is `{0, 1}` in `Z`.
    pub fn from_1d(xs: &[i64]) -> Result<Self> {
        Self::new(xs.iter().map(|&x| [x]))
    }

    /// Builds from already sorted, distinct sites. Callers guarantee the invariant.
    pub(crate) fn from_sorted_unchecked(dim: usize, coords: Vec<i64>) -> Self {
        debug_assert!(coords.chunks(dim).collect::<Vec<_>>().windows(2).all(|w| w[0] < w[1]));
        Self { dim, coords: coords.into_boxed_slice() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn particle_count(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn sites(&self) -> impl ExactSizeIterator<Item = &[i64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn site(&self, i: usize) -> &[i64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_sites(&self) -> Vec<Site> {
        self.sites().map(<[i64]>::to_vec).collect()
    }

    /// Occupation number of a site, 0 or 1.
    pub fn occupation(&self, site: &[i64]) -> u8 {
        u8::from(self.sites().any(|s| s == site))
    }

    pub fn translate(&self, shift: &[i64]) -> Self {
        assert_eq!(shift.len(), self.dim, "shift dimension");
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, &c)| c + shift[i % self.dim])
            .collect::<Vec<_>>();
        // a rigid translation preserves the lexicographic order
        Self::from_sorted_unchecked(self.dim, coords)
    }

    /// Replaces particle `i` by `site`, returning `None` on collision.
    pub fn with_moved(&self, i: usize, site: &[i64]) -> Option<Self> {
        if self.sites().any(|s| s == site) {
            return None;
        }
        let mut list: Vec<&[i64]> = self.sites().collect();
        list[i] = site;
        list.sort_unstable();
        Some(Self::from_sorted_unchecked(self.dim, list.concat()))
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.coords.len() != other.coords.len() {
            return Err(Error::Mismatch(format!(
                "N={}, d={} vs N={}, d={}",
                self.particle_count(),
                self.dim,
                other.particle_count(),
                other.dim
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for FermiConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.sites().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if self.dim == 1 {
                write!(f, "{}", s[0])?;
            } else {
                write!(f, "{s:?}")?;
            }
        }
        write!(f, "}}")
    }
}

impl Serialize for FermiConfig {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_sites().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FermiConfig {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let sites = Vec::<Vec<i64>>::deserialize(deserializer)?;
        FermiConfig::new(sites).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_makes_equality_structural() {
        let a = FermiConfig::from_1d(&[3, -1, 7]).unwrap();
        let b = FermiConfig::from_1d(&[7, 3, -1]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.site(0), &[-1]);
    }

    #[test]
    fn rejects_collisions_and_mixed_dimensions() {
        assert!(FermiConfig::from_1d(&[1, 1]).is_err());
        assert!(FermiConfig::new([vec![0, 0], vec![1]]).is_err());
        assert!(FermiConfig::new(Vec::<Vec<i64>>::new()).is_err());
    }

    #[test]
    fn occupation_numbers_sum_to_n() {
        let x = FermiConfig::new([[0, 0], [1, 0], [0, 2]]).unwrap();
        let total: u32 = (-1..3)
            .flat_map(|a| (-1..3).map(move |b| [a, b]))
            .map(|s| u32::from(x.occupation(&s)))
            .sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn json_round_trip() {
        let x = FermiConfig::new([[2, 0], [0, 1]]).unwrap();
        let text = serde_json::to_string(&x).unwrap();
        assert_eq!(text, "[[0,1],[2,0]]");
        let back: FermiConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<FermiConfig>("[[0],[0]]").is_err());
    }

    #[test]
    fn moving_onto_an_occupied_site_fails() {
        let x = FermiConfig::from_1d(&[0, 1]).unwrap();
        assert!(x.with_moved(0, &[1]).is_none());
        assert_eq!(x.with_moved(1, &[-3]).unwrap(), FermiConfig::from_1d(&[-3, 0]).unwrap());
    }
}
