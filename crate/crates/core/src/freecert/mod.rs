//! Combinatorial freeness: divisionality along a hyperplane, the addition,
//! deletion and division steps as certifiers, searches for additional
//! filtrations, divisional flags and inductive chains, stair certificate
//! replay, and a probe for the open addition conjectures.

mod certificate;
mod probe;
mod search;
mod stair;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{Flat, Hyperplane};
use crate::lattice::{restriction, Arrangement, CharPoly, LatticeCache, LatticeError};

pub use certificate::{
    apply_addition, apply_deletion, apply_division, CertificateKind, FreenessCertificate,
    StepOutcome,
};
pub use probe::{
    conjecture_probe, OracleVerdict, PartReport, ProbeEvidence, ProbeResult, ProbeStatus,
};
pub use search::{
    search_additional_filtration, search_divisional_flag, search_inductively_free, SearchOutcome,
    DEFAULT_BUDGET,
};
pub use stair::{
    stair_from_flag, verify_stair_certificate, StairDiagnostics, StairLevel, StairLevelReport,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeCertError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("no certificate supplied for the smaller arrangement")]
    MissingCertificate,
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("certificate does not verify: {0}")]
    InvalidCertificate(String),
    #[error("arrangement of rank {rank} in dimension {ambient_dim} is not essential")]
    NotEssential { rank: usize, ambient_dim: usize },
    #[error("the freeness oracle returned unknown for {0}")]
    OracleUndecided(String),
    #[error("arrangement of {0} hyperplanes exceeds the search limit")]
    TooLarge(usize),
}

/// Sorted multiset of nonnegative integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Exponents(Vec<u64>);

impl Exponents {
    pub fn new(mut v: Vec<u64>) -> Self {
        v.sort_unstable();
        Exponents(v)
    }

    pub fn zeros(n: usize) -> Self {
        Exponents(vec![0; n])
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Replaces one copy of `old` by `new`, if present.
    pub fn replace_one(&self, old: u64, new: u64) -> Option<Self> {
        let i = self.0.iter().position(|&x| x == old)?;
        let mut v = self.0.clone();
        v[i] = new;
        Some(Self::new(v))
    }

    /// Adds one element.
    pub fn with(&self, x: u64) -> Self {
        let mut v = self.0.clone();
        v.push(x);
        Self::new(v)
    }

    /// Multiset inclusion.
    pub fn is_submultiset_of(&self, other: &Self) -> bool {
        let mut rest = other.0.clone();
        for x in &self.0 {
            match rest.iter().position(|y| y == x) {
                Some(i) => {
                    rest.swap_remove(i);
                }
                None => return false,
            }
        }
        true
    }

    /// `{1, n-1, 0, …}` padded to `ell` entries: the exponents of any
    /// arrangement of rank at most two with `n` hyperplanes.
    pub fn rank_two(ell: usize, rank: usize, n: usize) -> Self {
        let mut v = vec![0; ell];
        match rank {
            0 => {}
            1 => v[0] = 1,
            _ => {
                v[0] = 1;
                v[1] = n as u64 - 1;
            }
        }
        Self::new(v)
    }
}

impl fmt::Display for Exponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("characteristic polynomial does not factor over the nonnegative integers")]
pub struct NotIntegerRooted;

/// Roots of `χ` with multiplicity, when they are all nonnegative integers.
pub fn exponents_from_charpoly(p: &CharPoly) -> Result<Exponents, NotIntegerRooted> {
    if !p.is_monic() {
        return Err(NotIntegerRooted);
    }
    let roots = p.integer_roots().ok_or(NotIntegerRooted)?;
    if roots.iter().any(|&r| r < 0) {
        return Err(NotIntegerRooted);
    }
    Ok(Exponents::new(
        roots.into_iter().map(|r| r as u64).collect(),
    ))
}

/// One flat of the restriction with both polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatDivisibility {
    /// `X` in the coordinates of `A^H`.
    pub flat: Flat,
    /// `X` as a flat of `V`.
    pub ambient_flat: Flat,
    /// `χ(A_X; t)`.
    pub chi_localization: CharPoly,
    /// `χ(A_X^H; t)`.
    pub chi_restriction: CharPoly,
    pub divides: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisionalityReport {
    pub h: usize,
    pub hyperplane: Hyperplane,
    pub restriction_size: usize,
    pub per_flat: Vec<FlatDivisibility>,
    pub is_divisional: bool,
    pub is_locally_divisional: bool,
    pub is_globally_divisional: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Tests `χ(A_X^H) | χ(A_X)` for every `X ∈ L(A^H)`.
pub fn divisionality(a: &Arrangement, h: usize) -> Result<DivisionalityReport, FreeCertError> {
    let hyperplane = a.hyperplane(h)?.clone();
    let (ah, r) = restriction(a, h)?;
    let cache = LatticeCache::global();
    let la = cache.lattice(a);
    let lh = cache.lattice(&ah);
    let mut per_flat = Vec::with_capacity(lh.len());
    for id in 0..lh.len() {
        let y = &lh.flat(id).flat;
        let x = r.pull_back(y);
        let xid = la.find(&x).ok_or_else(|| {
            LatticeError::InvariantViolation(format!("pulled-back flat {x} missing from L(A)"))
        })?;
        let chi_localization = la.char_poly_of_localization(xid);
        let chi_restriction = lh.char_poly_of_localization(id);
        let divides = chi_localization.divisible_by(&chi_restriction);
        per_flat.push(FlatDivisibility {
            flat: y.clone(),
            ambient_flat: x,
            chi_localization,
            chi_restriction,
            divides,
        });
    }
    let top = lh.top();
    let is_globally_divisional = per_flat[top].divides;
    let is_locally_divisional = per_flat[..top].iter().all(|f| f.divides);
    let mut notes = Vec::new();
    if ah.is_empty() {
        notes.push("A^H is empty: local divisionality holds vacuously".to_string());
    }
    Ok(DivisionalityReport {
        h,
        hyperplane,
        restriction_size: ah.len(),
        per_flat,
        is_divisional: is_globally_divisional && is_locally_divisional,
        is_locally_divisional,
        is_globally_divisional,
        notes,
    })
}

/// Only the top-flat condition `χ(A^H) | χ(A)`.
pub fn globally_divisional(a: &Arrangement, h: usize) -> Result<bool, FreeCertError> {
    let (ah, _) = restriction(a, h)?;
    let cache = LatticeCache::global();
    Ok(cache.char_poly(a).divisible_by(&cache.char_poly(&ah)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_examples() {
        assert_eq!(
            exponents_from_charpoly(&CharPoly::from_i64(&[0, 2, -3, 1])),
            Ok(Exponents::new(vec![0, 1, 2]))
        );
        assert_eq!(
            exponents_from_charpoly(&CharPoly::monomial(2)),
            Ok(Exponents::zeros(2))
        );
        assert_eq!(
            exponents_from_charpoly(&CharPoly::from_i64(&[-3, 6, -4, 1])),
            Err(NotIntegerRooted)
        );
        assert_eq!(
            exponents_from_charpoly(&CharPoly::from_i64(&[1, 1])),
            Err(NotIntegerRooted)
        );
    }

    #[test]
    fn multiset_ops() {
        let e = Exponents::new(vec![2, 1, 1]);
        assert_eq!(e.replace_one(1, 3), Some(Exponents::new(vec![1, 2, 3])));
        assert_eq!(e.replace_one(5, 3), None);
        assert!(Exponents::new(vec![1, 1]).is_submultiset_of(&e));
        assert!(!Exponents::new(vec![2, 2]).is_submultiset_of(&e));
        assert_eq!(e.to_string(), "{1,1,2}");
    }

    #[test]
    fn divisionality_examples() {
        let b2 = Arrangement::from_i64(2, &[&[1, 0], &[0, 1]]).unwrap();
        let r = divisionality(&b2, 0).unwrap();
        assert!(r.is_divisional && r.per_flat.len() == 2);

        let single = Arrangement::from_i64(3, &[&[0, 0, 1]]).unwrap();
        let r = divisionality(&single, 0).unwrap();
        assert!(r.is_divisional && !r.notes.is_empty());

        let g4 =
            Arrangement::from_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]]).unwrap();
        for h in 0..4 {
            let r = divisionality(&g4, h).unwrap();
            assert!(!r.is_globally_divisional && !r.is_divisional);
            let top = r.per_flat.last().unwrap();
            assert_eq!(top.chi_restriction, CharPoly::from_roots([1, 2]));
        }
        assert!(matches!(
            divisionality(&g4, 4),
            Err(FreeCertError::Lattice(LatticeError::IndexOutOfRange { .. }))
        ));
    }
}
