use serde::{Deserialize, Serialize};

use super::{divisionality, Exponents, FreeCertError};
use crate::exactla::{Flat, Hyperplane};
use crate::lattice::{restriction, Arrangement, LatticeCache, Restriction};

/// One level of a stair: hyperplanes deleted from the current arrangement,
/// then the hyperplane restricted onto. Both are given in the coordinates of
/// the current arrangement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StairLevel {
    pub deletions: Vec<Hyperplane>,
    pub restrict: Hyperplane,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StairLevelReport {
    /// Index `i` of the arrangement `A_i` produced by this level.
    pub level: usize,
    /// Whether the k-th deletion step is divisional along the deleted
    /// hyperplane.
    pub deletion_steps: Vec<bool>,
    /// `χ(A_i) | χ(A_{i+1} ∖ deletions)`.
    pub division_holds: bool,
    /// Every referenced hyperplane pulls back to a flat of `L_{ℓ-i}(A)`.
    pub in_lattice_level: bool,
    pub size_before: usize,
    pub size_after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StairDiagnostics {
    pub levels: Vec<StairLevelReport>,
    pub valid: bool,
    pub exponents: Option<Exponents>,
    pub notes: Vec<String>,
}

fn malformed(msg: String) -> FreeCertError {
    FreeCertError::MalformedCertificate(msg)
}

fn pull_back_chain(chain: &[Restriction], mut x: Flat) -> Flat {
    for r in chain.iter().rev() {
        x = r.pull_back(&x);
    }
    x
}

/// Replays the stair conditions level by level for `i = ℓ-1, …, 2`: every
/// intermediate deletion divisional along the hyperplane it removes, and the
/// restriction's `χ` dividing that of the deleted arrangement. The final
/// arrangement lives in a plane and is free.
pub fn verify_stair_certificate(
    a: &Arrangement,
    levels: &[StairLevel],
) -> Result<StairDiagnostics, FreeCertError> {
    let ell = a.ambient_dim();
    let expected = ell.saturating_sub(2);
    if levels.len() != expected {
        return Err(malformed(format!(
            "{} levels supplied, expected {expected}",
            levels.len()
        )));
    }
    let cache = LatticeCache::global();
    let lattice = cache.lattice(a);
    let mut notes = Vec::new();
    if ell >= 3 {
        notes.push(
            "levels run over i = ℓ-1, …, 2; the final level restricts to a plane arrangement, which is free".to_string(),
        );
    }
    let mut cur = a.clone();
    let mut chain: Vec<Restriction> = Vec::new();
    let mut reports = Vec::new();
    // per level: (sizes of the deletion prefixes, restriction sizes per step)
    let mut bookkeeping: Vec<(Vec<usize>, Vec<usize>, usize, usize)> = Vec::new();
    for (step, lvl) in levels.iter().enumerate() {
        let i = ell - 1 - step;
        for hp in lvl.deletions.iter().chain([&lvl.restrict]) {
            if !cur.contains(hp) {
                return Err(malformed(format!(
                    "level {i}: hyperplane {hp} is not in A_{}",
                    i + 1
                )));
            }
        }
        if lvl.deletions.contains(&lvl.restrict) {
            return Err(malformed(format!(
                "level {i}: the restriction hyperplane is also deleted"
            )));
        }
        let in_lattice_level = lvl.deletions.iter().chain([&lvl.restrict]).all(|hp| {
            let x = pull_back_chain(&chain, hp.to_flat());
            lattice
                .find(&x)
                .is_some_and(|id| lattice.codim_of(id) == ell - i)
        });
        let mut work = cur.clone();
        let mut deletion_steps = Vec::new();
        let mut sizes = Vec::new();
        let mut rsizes = Vec::new();
        for hp in &lvl.deletions {
            let k = work
                .index_of(hp)
                .ok_or_else(|| malformed(format!("level {i}: {hp} listed twice")))?;
            let report = divisionality(&work, k)?;
            deletion_steps.push(report.is_divisional);
            sizes.push(work.len());
            rsizes.push(report.restriction_size);
            work = work.deletion(k)?;
        }
        let k = work.index_of(&lvl.restrict).expect("checked above");
        let (next, r) = restriction(&work, k)?;
        let division_holds = cache.char_poly(&work).divisible_by(&cache.char_poly(&next));
        reports.push(StairLevelReport {
            level: i,
            deletion_steps,
            division_holds,
            in_lattice_level,
            size_before: cur.len(),
            size_after: next.len(),
        });
        bookkeeping.push((sizes, rsizes, work.len(), next.len()));
        cur = next;
        chain.push(r);
    }
    let valid = reports
        .iter()
        .all(|r| r.division_holds && r.deletion_steps.iter().all(|&b| b));
    let exponents = valid.then(|| {
        let mut e = Exponents::rank_two(cur.ambient_dim(), cur.rank(), cur.len());
        for (sizes, rsizes, work_len, next_len) in bookkeeping.iter().rev() {
            e = e.with((work_len - next_len) as u64);
            for (&n, &rs) in sizes.iter().zip(rsizes).rev() {
                let (n, rs) = (n as u64, rs as u64);
                e = e.replace_one(n - 1 - rs, n - rs)?;
            }
        }
        Some(e)
    });
    let exponents = exponents.flatten();
    if valid && exponents.is_none() {
        notes.push("exponent bookkeeping failed although every condition holds".to_string());
    }
    Ok(StairDiagnostics {
        levels: reports,
        valid: valid && exponents.is_some(),
        exponents,
        notes,
    })
}

/// Stair with empty deletion lists following a divisional flag.
pub fn stair_from_flag(a: &Arrangement, flag: &[Flat]) -> Result<Vec<StairLevel>, FreeCertError> {
    let mut cur = a.clone();
    let mut chain: Vec<Restriction> = Vec::new();
    let mut levels = Vec::new();
    for (i, x) in flag.iter().enumerate() {
        let k = (0..cur.len())
            .find(|&k| pull_back_chain(&chain, cur.hyperplanes()[k].to_flat()) == *x)
            .ok_or_else(|| {
                malformed(format!(
                    "flag entry {} is not a hyperplane of the previous restriction",
                    i + 1
                ))
            })?;
        levels.push(StairLevel {
            deletions: Vec::new(),
            restrict: cur.hyperplanes()[k].clone(),
        });
        let (next, r) = restriction(&cur, k)?;
        cur = next;
        chain.push(r);
    }
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecert::{search_divisional_flag, CertificateKind, FreenessCertificate};

    #[test]
    fn flag_as_stair() {
        let b3 = Arrangement::from_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        let found = search_divisional_flag(&b3).unwrap();
        let CertificateKind::DivisionalFlag { flag } = &found.certificate().unwrap().kind else {
            panic!()
        };
        let levels = stair_from_flag(&b3, flag).unwrap();
        let d = verify_stair_certificate(&b3, &levels).unwrap();
        assert!(d.valid);
        assert_eq!(d.exponents, Some(Exponents::new(vec![1, 1, 1])));
        let cert = FreenessCertificate {
            kind: CertificateKind::Stair { levels },
            exponents: Exponents::new(vec![1, 1, 1]),
        };
        cert.verify(&b3).unwrap();
    }

    #[test]
    fn absent_hyperplane_is_malformed() {
        let b3 = Arrangement::from_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        let levels = vec![StairLevel {
            deletions: vec![Hyperplane::from_i64(&[1, 1, 1]).unwrap()],
            restrict: Hyperplane::from_i64(&[1, 0, 0]).unwrap(),
        }];
        assert!(matches!(
            verify_stair_certificate(&b3, &levels),
            Err(FreeCertError::MalformedCertificate(_))
        ));
        assert!(matches!(
            verify_stair_certificate(&b3, &[]),
            Err(FreeCertError::MalformedCertificate(_))
        ));
    }
}
