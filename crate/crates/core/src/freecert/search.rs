use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::certificate::restriction_poly;
use super::{
    divisionality, exponents_from_charpoly, CertificateKind, Exponents, FreeCertError,
    FreenessCertificate,
};
use crate::exactla::Flat;
use crate::lattice::{restriction, Arrangement, ArrangementKey, LatticeCache};

/// Default node limit for the backtracking searches.
pub const DEFAULT_BUDGET: u64 = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum SearchOutcome {
    Found {
        certificate: FreenessCertificate,
    },
    /// The whole search space was explored without success.
    Exhausted {
        explored: u64,
    },
    NotFoundWithinBudget {
        explored: u64,
    },
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&FreenessCertificate> {
        match self {
            SearchOutcome::Found { certificate } => Some(certificate),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        self.certificate().is_some()
    }
}

struct OutOfBudget;

enum Stop {
    Budget,
    Err(FreeCertError),
}

impl From<FreeCertError> for Stop {
    fn from(e: FreeCertError) -> Self {
        Stop::Err(e)
    }
}

impl From<crate::lattice::LatticeError> for Stop {
    fn from(e: crate::lattice::LatticeError) -> Self {
        Stop::Err(e.into())
    }
}

impl From<OutOfBudget> for Stop {
    fn from(_: OutOfBudget) -> Self {
        Stop::Budget
    }
}

struct Counter {
    explored: u64,
    budget: u64,
}

impl Counter {
    fn tick(&mut self) -> Result<(), OutOfBudget> {
        if self.explored >= self.budget {
            return Err(OutOfBudget);
        }
        self.explored += 1;
        Ok(())
    }
}

fn is_integer_rooted(a: &Arrangement) -> bool {
    exponents_from_charpoly(&LatticeCache::global().char_poly(a)).is_ok()
}

fn mask_indices(mask: u128, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Candidate last hyperplanes of `sub` ordered by `|A| - |A^H|`, then by
/// position.
fn candidates(sub: &Arrangement) -> Result<Vec<(usize, usize)>, FreeCertError> {
    let mut c = Vec::with_capacity(sub.len());
    for k in 0..sub.len() {
        let (ah, _) = restriction(sub, k)?;
        c.push((sub.len() - ah.len(), k));
    }
    c.sort_unstable();
    Ok(c)
}

/// Backtracking search for an additional filtration. Hyperplanes are removed
/// from the full arrangement one at a time (the last step of the filtration
/// first); failed subsets are memoized.
pub fn search_additional_filtration(
    a: &Arrangement,
    budget: u64,
) -> Result<SearchOutcome, FreeCertError> {
    let n = a.len();
    if n > 128 {
        return Err(FreeCertError::TooLarge(n));
    }
    struct Ctx<'a> {
        a: &'a Arrangement,
        failed: HashSet<u128>,
        counter: Counter,
    }
    fn dfs(ctx: &mut Ctx, mask: u128) -> Result<Option<Vec<usize>>, Stop> {
        if mask == 0 {
            return Ok(Some(Vec::new()));
        }
        if ctx.failed.contains(&mask) {
            return Ok(None);
        }
        let idx = mask_indices(mask, ctx.a.len());
        let sub = ctx.a.subarrangement(&idx)?;
        if is_integer_rooted(&sub) {
            let chi = LatticeCache::global().char_poly(&sub);
            for (_, k) in candidates(&sub)? {
                ctx.counter.tick()?;
                let (ah, _) = restriction(&sub, k)?;
                if !chi.divisible_by(&LatticeCache::global().char_poly(&ah)) {
                    continue;
                }
                if !divisionality(&sub, k)?.is_divisional {
                    continue;
                }
                if let Some(mut order) = dfs(ctx, mask & !(1u128 << idx[k]))? {
                    order.push(idx[k]);
                    return Ok(Some(order));
                }
            }
        }
        ctx.failed.insert(mask);
        Ok(None)
    }
    let mut ctx = Ctx {
        a,
        failed: HashSet::new(),
        counter: Counter {
            explored: 0,
            budget,
        },
    };
    let full = if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    };
    match dfs(&mut ctx, full) {
        Ok(Some(order)) => {
            let order = order
                .into_iter()
                .map(|i| a.hyperplanes()[i].clone())
                .collect();
            Ok(SearchOutcome::Found {
                certificate: FreenessCertificate::from_filtration(a, order)?,
            })
        }
        Ok(None) => Ok(SearchOutcome::Exhausted {
            explored: ctx.counter.explored,
        }),
        Err(Stop::Budget) => Ok(SearchOutcome::NotFoundWithinBudget {
            explored: ctx.counter.explored,
        }),
        Err(Stop::Err(e)) => Err(e),
    }
}

/// Depth-first search for a divisional flag of an essential arrangement.
pub fn search_divisional_flag(a: &Arrangement) -> Result<SearchOutcome, FreeCertError> {
    let ell = a.ambient_dim();
    if !a.is_essential() {
        return Err(FreeCertError::NotEssential {
            rank: a.rank(),
            ambient_dim: ell,
        });
    }
    if ell <= 2 {
        return Ok(SearchOutcome::Found {
            certificate: FreenessCertificate::from_flag(a, Vec::new())?,
        });
    }
    let lattice = LatticeCache::global().lattice(a);
    struct Ctx<'a> {
        a: &'a Arrangement,
        lattice: &'a crate::lattice::IntersectionLattice,
        failed: HashSet<usize>,
        explored: u64,
        target: usize,
    }
    fn dfs(
        ctx: &mut Ctx,
        depth: usize,
        parent: Option<usize>,
        parent_poly: &crate::lattice::CharPoly,
    ) -> Result<Option<Vec<usize>>, FreeCertError> {
        if depth > ctx.target {
            return Ok(Some(Vec::new()));
        }
        for id in ctx.lattice.level_ids(depth) {
            let y = ctx.lattice.flat(id);
            if let Some(p) = parent {
                if !ctx.lattice.flat(p).atoms.is_subset(&y.atoms) {
                    continue;
                }
            }
            if ctx.failed.contains(&id) {
                continue;
            }
            ctx.explored += 1;
            let poly = restriction_poly(ctx.a, &y.flat)?;
            let Some(q) = parent_poly.exact_div(&poly) else {
                continue;
            };
            if exponents_from_charpoly(&q).is_err() {
                continue;
            }
            if let Some(mut rest) = dfs(ctx, depth + 1, Some(id), &poly)? {
                rest.insert(0, id);
                return Ok(Some(rest));
            }
            ctx.failed.insert(id);
        }
        Ok(None)
    }
    let mut ctx = Ctx {
        a,
        lattice: &lattice,
        failed: HashSet::new(),
        explored: 0,
        target: ell - 2,
    };
    let chi = LatticeCache::global().char_poly(a);
    match dfs(&mut ctx, 1, None, &chi)? {
        Some(ids) => {
            let flag: Vec<Flat> = ids
                .into_iter()
                .map(|id| lattice.flat(id).flat.clone())
                .collect();
            Ok(SearchOutcome::Found {
                certificate: FreenessCertificate::from_flag(a, flag)?,
            })
        }
        None => Ok(SearchOutcome::Exhausted {
            explored: ctx.explored,
        }),
    }
}

/// Recursive search for an inductive chain: some `H` with `A ∖ {H}` and
/// `A^H` inductively free and `exp(A^H) ⊆ exp(A ∖ {H})`.
pub fn search_inductively_free(
    a: &Arrangement,
    budget: u64,
) -> Result<SearchOutcome, FreeCertError> {
    struct Ctx {
        memo: HashMap<ArrangementKey, Option<FreenessCertificate>>,
        counter: Counter,
    }
    fn exps_of(a: &Arrangement) -> Option<Exponents> {
        exponents_from_charpoly(&LatticeCache::global().char_poly(a)).ok()
    }
    fn rec(ctx: &mut Ctx, a: &Arrangement) -> Result<Option<FreenessCertificate>, Stop> {
        if a.is_empty() {
            return Ok(Some(FreenessCertificate {
                kind: CertificateKind::Inductive {
                    order: Vec::new(),
                    restrictions: Vec::new(),
                },
                exponents: Exponents::zeros(a.ambient_dim()),
            }));
        }
        let key = a.key();
        if let Some(hit) = ctx.memo.get(&key) {
            return Ok(hit.clone());
        }
        let mut found = None;
        if let Some(ea) = exps_of(a) {
            for (_, k) in candidates(a)? {
                ctx.counter.tick()?;
                let smaller = a.deletion(k)?;
                let (ah, _) = restriction(a, k)?;
                let (Some(ed), Some(eh)) = (exps_of(&smaller), exps_of(&ah)) else {
                    continue;
                };
                if !eh.is_submultiset_of(&ed) || eh.with((a.len() - ah.len()) as u64) != ea {
                    continue;
                }
                let Some(ch) = rec(ctx, &ah)? else { continue };
                let Some(cd) = rec(ctx, &smaller)? else {
                    continue;
                };
                let CertificateKind::Inductive {
                    mut order,
                    mut restrictions,
                } = cd.kind
                else {
                    unreachable!("inductive search only builds inductive certificates")
                };
                order.push(a.hyperplanes()[k].clone());
                restrictions.push(ch);
                found = Some(FreenessCertificate {
                    kind: CertificateKind::Inductive {
                        order,
                        restrictions,
                    },
                    exponents: ea,
                });
                break;
            }
        }
        ctx.memo.insert(key, found.clone());
        Ok(found)
    }
    let mut ctx = Ctx {
        memo: HashMap::new(),
        counter: Counter {
            explored: 0,
            budget,
        },
    };
    match rec(&mut ctx, a) {
        Ok(Some(certificate)) => Ok(SearchOutcome::Found { certificate }),
        Ok(None) => Ok(SearchOutcome::Exhausted {
            explored: ctx.counter.explored,
        }),
        Err(Stop::Budget) => Ok(SearchOutcome::NotFoundWithinBudget {
            explored: ctx.counter.explored,
        }),
        Err(Stop::Err(e)) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boolean3() -> Arrangement {
        Arrangement::from_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap()
    }

    fn generic4() -> Arrangement {
        Arrangement::from_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]]).unwrap()
    }

    fn braid(ell: usize) -> Arrangement {
        let mut rows = Vec::new();
        for i in 0..ell {
            for j in i + 1..ell {
                let mut v = vec![0i64; ell];
                v[i] = 1;
                v[j] = -1;
                rows.push(v);
            }
        }
        let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        Arrangement::from_i64(ell, &refs).unwrap()
    }

    #[test]
    fn filtration_examples() {
        let a = boolean3();
        let c = search_additional_filtration(&a, DEFAULT_BUDGET).unwrap();
        assert_eq!(
            c.certificate().unwrap().exponents,
            Exponents::new(vec![1, 1, 1])
        );
        assert!(matches!(
            search_additional_filtration(&generic4(), DEFAULT_BUDGET).unwrap(),
            SearchOutcome::Exhausted { .. }
        ));
        assert!(matches!(
            search_additional_filtration(&braid(4), 0).unwrap(),
            SearchOutcome::NotFoundWithinBudget { explored: 0 }
        ));
    }

    #[test]
    fn flag_examples() {
        let c = search_divisional_flag(&boolean3()).unwrap();
        let cert = c.certificate().unwrap();
        assert_eq!(cert.exponents, Exponents::new(vec![1, 1, 1]));
        cert.verify(&boolean3()).unwrap();
        let pencil = Arrangement::from_i64(2, &[&[1, 0], &[0, 1], &[1, 1], &[1, 2]]).unwrap();
        let c = search_divisional_flag(&pencil).unwrap();
        assert_eq!(
            c.certificate().unwrap().exponents,
            Exponents::new(vec![1, 3])
        );
        assert!(matches!(
            search_divisional_flag(&generic4()).unwrap(),
            SearchOutcome::Exhausted { .. }
        ));
        assert!(matches!(
            search_divisional_flag(&braid(3)),
            Err(FreeCertError::NotEssential { .. })
        ));
    }

    #[test]
    fn inductive_examples() {
        let c = search_inductively_free(&boolean3(), DEFAULT_BUDGET).unwrap();
        c.certificate().unwrap().verify(&boolean3()).unwrap();
        let b4 = braid(4);
        let c = search_inductively_free(&b4, DEFAULT_BUDGET).unwrap();
        let cert = c.certificate().unwrap();
        assert_eq!(cert.verify(&b4).unwrap(), Exponents::new(vec![0, 1, 2, 3]));
        let af = cert.to_addition_filtration(&b4).unwrap();
        assert_eq!(af.verify(&b4).unwrap(), cert.exponents);
        assert!(!search_inductively_free(&generic4(), DEFAULT_BUDGET)
            .unwrap()
            .is_found());
    }
}
