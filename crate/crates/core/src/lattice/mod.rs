//! Central arrangements, their intersection lattices, Möbius functions and
//! characteristic polynomials, together with localization, restriction,
//! essentialization and coning.

mod build;
mod cache;
mod charpoly;
mod ops;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::exactla::{Echelon, ExactError, Flat, Hyperplane};

pub use build::{
    build_lattice, char_poly, char_poly_whitney, AtomSet, IntersectionLattice, LatticeFlat,
};
pub use cache::LatticeCache;
pub use charpoly::CharPoly;
pub use ops::{
    cone, essential_part, localization, restriction, restriction_to_flat, QuotientMap, Restriction,
};

/// Largest arrangement accepted by the subset-expansion oracle.
pub const WHITNEY_MAX: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("hyperplane {0} appears more than once")]
    DuplicateHyperplane(Hyperplane),
    #[error("hyperplane index {index} out of range for an arrangement of {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("flat {0} is not an element of the intersection lattice")]
    FlatNotInLattice(Flat),
    #[error("arrangement of {0} hyperplanes is too large for subset enumeration")]
    TooLarge(usize),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

/// A finite set of distinct linear hyperplanes in `K^ℓ`, kept in insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrangement {
    ambient_dim: usize,
    hyperplanes: Vec<Hyperplane>,
    rank: usize,
}

/// Order-independent identity of an arrangement: ambient dimension plus the
/// sorted canonical normals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrangementKey {
    pub ambient_dim: usize,
    pub normals: Vec<Hyperplane>,
}

impl Arrangement {
    pub fn new(ambient_dim: usize, hyperplanes: Vec<Hyperplane>) -> Result<Self, LatticeError> {
        let mut seen = std::collections::HashSet::new();
        for h in &hyperplanes {
            if h.ambient_dim() != ambient_dim {
                return Err(ExactError::DimensionMismatch {
                    expected: ambient_dim,
                    found: h.ambient_dim(),
                }
                .into());
            }
            if !seen.insert(h) {
                return Err(LatticeError::DuplicateHyperplane(h.clone()));
            }
        }
        let rank =
            Echelon::from_rows(ambient_dim, hyperplanes.iter().map(|h| h.normal().to_vec())).rank();
        Ok(Arrangement {
            ambient_dim,
            hyperplanes,
            rank,
        })
    }

    /// Builds an arrangement from canonicalizable forms, silently merging
    /// duplicates (first occurrence wins).
    pub fn from_hyperplanes_dedup(
        ambient_dim: usize,
        hyperplanes: impl IntoIterator<Item = Hyperplane>,
    ) -> Result<Self, LatticeError> {
        let mut seen = std::collections::HashSet::new();
        let hs: Vec<Hyperplane> = hyperplanes
            .into_iter()
            .filter(|h| seen.insert(h.clone()))
            .collect();
        Self::new(ambient_dim, hs)
    }

    pub fn from_i64(ambient_dim: usize, normals: &[&[i64]]) -> Result<Self, LatticeError> {
        let hs = normals
            .iter()
            .map(|n| Hyperplane::from_i64(n))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ambient_dim, hs)
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Arrangement {
            ambient_dim,
            hyperplanes: Vec::new(),
            rank: 0,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn is_essential(&self) -> bool {
        self.rank == self.ambient_dim
    }

    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    pub fn hyperplane(&self, i: usize) -> Result<&Hyperplane, LatticeError> {
        self.hyperplanes
            .get(i)
            .ok_or(LatticeError::IndexOutOfRange {
                index: i,
                len: self.len(),
            })
    }

    pub fn index_of(&self, h: &Hyperplane) -> Option<usize> {
        self.hyperplanes.iter().position(|x| x == h)
    }

    pub fn contains(&self, h: &Hyperplane) -> bool {
        self.index_of(h).is_some()
    }

    /// `A ∖ {H_i}`.
    pub fn deletion(&self, i: usize) -> Result<Self, LatticeError> {
        self.hyperplane(i)?;
        let hs = self
            .hyperplanes
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, h)| h.clone())
            .collect();
        Self::new(self.ambient_dim, hs)
    }

    /// `A ∪ {H}`, appended at the end.
    pub fn with(&self, h: Hyperplane) -> Result<Self, LatticeError> {
        let mut hs = self.hyperplanes.clone();
        hs.push(h);
        Self::new(self.ambient_dim, hs)
    }

    /// Sub-arrangement on the given indices, in the given order.
    pub fn subarrangement(&self, indices: &[usize]) -> Result<Self, LatticeError> {
        let hs = indices
            .iter()
            .map(|&i| self.hyperplane(i).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.ambient_dim, hs)
    }

    pub fn key(&self) -> ArrangementKey {
        let mut normals = self.hyperplanes.clone();
        normals.sort();
        ArrangementKey {
            ambient_dim: self.ambient_dim,
            normals,
        }
    }

    /// Copy with hyperplanes sorted by canonical normal.
    pub fn sorted(&self) -> Self {
        let key = self.key();
        Arrangement {
            ambient_dim: self.ambient_dim,
            hyperplanes: key.normals,
            rank: self.rank,
        }
    }

    /// Hex SHA-256 of the sorted canonical normals; independent of file order.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(format!("arrangement {}\n", self.ambient_dim));
        for h in self.key().normals {
            let row: Vec<String> = h.normal().iter().map(BigInt::to_string).collect();
            hasher.update(row.join(" "));
            hasher.update("\n");
        }
        hex::encode(hasher.finalize())
    }

    /// Intersection of all hyperplanes.
    pub fn center(&self) -> Flat {
        Flat::from_rows(
            self.ambient_dim,
            self.hyperplanes.iter().map(|h| h.normal().to_vec()),
        )
        .expect("dimensions checked at construction")
    }

    /// Indices of the hyperplanes containing `x`.
    pub fn atoms_of(&self, x: &Flat) -> Vec<usize> {
        let e = x.echelon();
        self.hyperplanes
            .iter()
            .enumerate()
            .filter(|(_, h)| e.contains(h.normal()))
            .map(|(i, _)| i)
            .collect()
    }

    /// True iff `x` is an intersection of hyperplanes of the arrangement.
    pub fn has_flat(&self, x: &Flat) -> bool {
        if x.ambient_dim() != self.ambient_dim {
            return false;
        }
        let atoms = self.atoms_of(x);
        let closure = Flat::from_rows(
            self.ambient_dim,
            atoms.iter().map(|&i| self.hyperplanes[i].normal().to_vec()),
        )
        .expect("dimensions checked at construction");
        &closure == x
    }

    /// Hyperplanes by canonical normal to index.
    pub fn index_map(&self) -> HashMap<&Hyperplane, usize> {
        self.hyperplanes
            .iter()
            .enumerate()
            .map(|(i, h)| (h, i))
            .collect()
    }
}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "arrangement in dim {} with {} hyperplanes:",
            self.ambient_dim,
            self.len()
        )?;
        for h in &self.hyperplanes {
            write!(f, " {h}")?;
        }
        Ok(())
    }
}

/// Serialized form: ambient dimension and normals as integer strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrangementRecord {
    pub ambient_dim: usize,
    pub normals: Vec<Vec<String>>,
}

impl From<&Arrangement> for ArrangementRecord {
    fn from(a: &Arrangement) -> Self {
        ArrangementRecord {
            ambient_dim: a.ambient_dim,
            normals: a
                .hyperplanes
                .iter()
                .map(|h| h.normal().iter().map(BigInt::to_string).collect())
                .collect(),
        }
    }
}

impl TryFrom<&ArrangementRecord> for Arrangement {
    type Error = LatticeError;

    fn try_from(r: &ArrangementRecord) -> Result<Self, LatticeError> {
        let mut hs = Vec::with_capacity(r.normals.len());
        for n in &r.normals {
            let ints = n
                .iter()
                .map(|s| {
                    s.parse::<BigInt>().map_err(|e| {
                        LatticeError::InvariantViolation(format!("bad integer {s:?}: {e}"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let h = Hyperplane::from_integers(ints)?;
            hs.push(h);
        }
        Arrangement::new(r.ambient_dim, hs)
    }
}

impl Serialize for Arrangement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ArrangementRecord::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Arrangement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = ArrangementRecord::deserialize(d)?;
        Arrangement::try_from(&r).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_checks() {
        let a = Arrangement::from_i64(2, &[&[1, 0], &[0, 1]]).unwrap();
        assert_eq!(a.rank(), 2);
        assert!(matches!(
            Arrangement::from_i64(2, &[&[1, 0], &[2, 0]]),
            Err(LatticeError::DuplicateHyperplane(_))
        ));
        let b = Arrangement::from_i64(3, &[&[1, -1, 0], &[0, 1, -1], &[1, 0, -1]]).unwrap();
        assert_eq!(b.rank(), 2);
        assert!(!b.is_essential());
        assert_eq!(
            b.deletion(5),
            Err(LatticeError::IndexOutOfRange { index: 5, len: 3 })
        );
    }

    #[test]
    fn digest_ignores_order() {
        let a = Arrangement::from_i64(2, &[&[1, 0], &[0, 1]]).unwrap();
        let b = Arrangement::from_i64(2, &[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_eq!(a.key(), b.key());
        assert_ne!(a, b);
    }

    #[test]
    fn serde_round_trip() {
        let a = Arrangement::from_i64(3, &[&[1, -1, 0], &[0, 1, -1]]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<Arrangement>(&s).unwrap(), a);
    }
}
