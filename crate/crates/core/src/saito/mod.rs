//! Logarithmic derivation modules by exact linear algebra, and Saito's
//! criterion as an independent freeness oracle.

mod fast;
mod poly;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::Rat;
use crate::freecert::{exponents_from_charpoly, Exponents};
use crate::lattice::{Arrangement, LatticeCache, LatticeError};

pub use fast::HybridEchelon;
pub use poly::{dim_s, monomials, Derivation, Monomial, MultiPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SaitoError {
    #[error("derivation degrees sum to {found}, expected |A| = {expected}")]
    DegreeSumMismatch { expected: usize, found: usize },
    #[error("expected {expected} derivations, got {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("the arrangement is empty")]
    EmptyArrangement,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum NotFreeReason {
    ChiNotIntegerRooted,
    GradedDimensionDeficit {
        degree: usize,
        found: usize,
        required: usize,
    },
}

impl fmt::Display for NotFreeReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotFreeReason::ChiNotIntegerRooted => write!(f, "chi-not-integer-rooted"),
            NotFreeReason::GradedDimensionDeficit {
                degree,
                found,
                required,
            } => {
                write!(
                    f,
                    "graded-dimension-deficit({degree}): dim D(A)_{degree} = {found} < {required}"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SaitoVerdict {
    Free {
        exponents: Exponents,
        basis: Vec<Derivation>,
    },
    NotFree {
        reason: NotFreeReason,
    },
    Unknown {
        degree_bound: usize,
    },
}

impl SaitoVerdict {
    pub fn is_free(&self) -> bool {
        matches!(self, SaitoVerdict::Free { .. })
    }

    pub fn is_not_free(&self) -> bool {
        matches!(self, SaitoVerdict::NotFree { .. })
    }

    pub fn label(&self) -> String {
        match self {
            SaitoVerdict::Free { exponents, .. } => format!("Free({exponents})"),
            SaitoVerdict::NotFree { reason } => format!("NotFree({reason})"),
            SaitoVerdict::Unknown { degree_bound } => {
                format!("Unknown(degree bound {degree_bound})")
            }
        }
    }
}

/// Integer linear conditions on the coefficients of `(f_1..f_ℓ) ∈ (S_d)^ℓ`
/// cutting out `D(A)_d`. Unknown `(i, m)` sits at `i·|M_d| + index(m)`.
fn condition_rows(a: &Arrangement, d: usize, mons: &[Monomial]) -> Vec<Vec<BigInt>> {
    let ell = a.ambient_dim();
    let nm = mons.len();
    let index: HashMap<&Monomial, usize> = mons.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut rows = Vec::new();
    for h in a.hyperplanes() {
        let alpha = h.normal();
        let p = h.last_pivot();
        // (-Σ_{j≠p} α_j x_j)^e for e = 0..d, integer coefficients
        let mut powers: Vec<HashMap<Monomial, BigInt>> =
            vec![HashMap::from([(vec![0; ell], BigInt::one())])];
        for _ in 0..d {
            let prev = powers.last().unwrap();
            let mut next: HashMap<Monomial, BigInt> = HashMap::new();
            for (m, c) in prev {
                for (j, aj) in alpha.iter().enumerate() {
                    if j == p || aj.is_zero() {
                        continue;
                    }
                    let mut mm = m.clone();
                    mm[j] += 1;
                    *next.entry(mm).or_insert_with(BigInt::zero) -= c * aj;
                }
            }
            next.retain(|_, c| !c.is_zero());
            powers.push(next);
        }
        let ap_pows: Vec<BigInt> = (0..=d)
            .map(|k| num_traits::pow(alpha[p].clone(), k))
            .collect();
        let mut by_target: HashMap<usize, Vec<BigInt>> = HashMap::new();
        for (mi, m) in mons.iter().enumerate() {
            let e = m[p] as usize;
            let mut rest = m.clone();
            rest[p] = 0;
            for (k, c) in &powers[e] {
                let n: Monomial = rest.iter().zip(k).map(|(x, y)| x + y).collect();
                let w = c * &ap_pows[d - e];
                let row = by_target
                    .entry(index[&n])
                    .or_insert_with(|| vec![BigInt::zero(); ell * nm]);
                for (i, ai) in alpha.iter().enumerate() {
                    if !ai.is_zero() {
                        row[i * nm + mi] += &w * ai;
                    }
                }
            }
        }
        let mut targets: Vec<usize> = by_target.keys().copied().collect();
        targets.sort_unstable();
        for t in targets {
            let row = by_target.remove(&t).unwrap();
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }
    rows
}

fn vector_to_derivation(v: &[BigInt], ell: usize, d: usize, mons: &[Monomial]) -> Derivation {
    let nm = mons.len();
    let components = (0..ell)
        .map(|i| {
            let mut f = MultiPoly::zero(ell);
            for (mi, m) in mons.iter().enumerate() {
                f.add_term(m.clone(), Rat::from_integer(v[i * nm + mi].clone()));
            }
            f
        })
        .collect();
    Derivation::new(components, d)
}

/// Graded piece `D(A)_d` as explicit coefficient vectors: a basis in which
/// the coordinates of any element are its entries at `free_cols`.
#[derive(Debug, Clone)]
struct GradedPiece {
    mons: Vec<Monomial>,
    basis: Vec<Vec<BigInt>>,
    free_cols: Vec<usize>,
}

fn solve_degree(a: &Arrangement, d: usize) -> GradedPiece {
    let ell = a.ambient_dim();
    let mons = monomials(ell, d);
    let cols = ell * mons.len();
    let mut e = HybridEchelon::new(cols);
    for r in condition_rows(a, d, &mons) {
        e.insert(r);
    }
    let pivots = e.pivots();
    let free_cols = (0..cols).filter(|c| !pivots.contains(c)).collect();
    GradedPiece {
        basis: e.kernel(),
        mons,
        free_cols,
    }
}

/// `dim D(A)_d` together with a basis of homogeneous derivations.
pub fn graded_dim(a: &Arrangement, d: usize) -> (usize, Vec<Derivation>) {
    let piece = solve_degree(a, d);
    let basis: Vec<Derivation> = piece
        .basis
        .iter()
        .map(|v| vector_to_derivation(v, a.ambient_dim(), d, &piece.mons))
        .collect();
    (basis.len(), basis)
}

/// `x_j · v` for a coefficient vector `v` of degree `d`, as a vector of
/// degree `d + 1`.
fn shift_vector(
    v: &[BigInt],
    j: usize,
    ell: usize,
    from: &[Monomial],
    to_index: &HashMap<&Monomial, usize>,
    to_len: usize,
) -> Vec<BigInt> {
    let nm = from.len();
    let mut out = vec![BigInt::zero(); ell * to_len];
    for i in 0..ell {
        for (mi, m) in from.iter().enumerate() {
            let c = &v[i * nm + mi];
            if c.is_zero() {
                continue;
            }
            let mut mm = m.clone();
            mm[j] += 1;
            out[i * to_len + to_index[&mm]] = c.clone();
        }
    }
    out
}

/// Minimal homogeneous generators of `D(A)` of degree at most `bound`,
/// stopping after the first degree at which at least `stop_at` have been
/// found.
pub fn minimal_generators(a: &Arrangement, bound: usize, stop_at: usize) -> Vec<Derivation> {
    let ell = a.ambient_dim();
    let mut gens = Vec::new();
    let mut prev: Option<GradedPiece> = None;
    for d in 0..=bound {
        let piece = solve_degree(a, d);
        let index: HashMap<&Monomial, usize> =
            piece.mons.iter().enumerate().map(|(i, m)| (m, i)).collect();
        // work in coordinates with respect to the kernel basis of this degree
        let mut span = HybridEchelon::new(piece.basis.len());
        if let Some(p) = &prev {
            for v in &p.basis {
                for j in 0..ell {
                    let w = shift_vector(v, j, ell, &p.mons, &index, piece.mons.len());
                    let coords: Vec<BigInt> =
                        piece.free_cols.iter().map(|&c| w[c].clone()).collect();
                    span.insert(coords);
                    if span.rank() == piece.basis.len() {
                        break;
                    }
                }
            }
        }
        for (k, v) in piece.basis.iter().enumerate() {
            let mut unit = vec![BigInt::zero(); piece.basis.len()];
            unit[k] = BigInt::one();
            if span.insert(unit) {
                gens.push(vector_to_derivation(v, ell, d, &piece.mons));
            }
        }
        prev = Some(piece);
        if gens.len() >= stop_at {
            break;
        }
    }
    gens
}

/// Searches for `ℓ` homogeneous derivations forming a basis of `D(A)`.
pub fn find_saito_basis(a: &Arrangement, degree_bound: usize) -> Option<Vec<Derivation>> {
    let ell = a.ambient_dim();
    if ell == 0 {
        return Some(Vec::new());
    }
    let gens = minimal_generators(a, degree_bound, ell);
    if gens.len() < ell {
        return None;
    }
    let chosen: Vec<Derivation> = gens.into_iter().take(ell).collect();
    match saito_check(a, &chosen) {
        Ok(true) => Some(chosen),
        _ => None,
    }
}

fn determinant(m: &[Vec<MultiPoly>], n: usize) -> MultiPoly {
    fn rec(
        m: &[Vec<MultiPoly>],
        row: usize,
        mask: u32,
        n: usize,
        memo: &mut HashMap<u32, MultiPoly>,
    ) -> MultiPoly {
        if row == m.len() {
            return MultiPoly::constant(n, Rat::one());
        }
        if let Some(p) = memo.get(&mask) {
            return p.clone();
        }
        let mut acc = MultiPoly::zero(n);
        let mut sign = true;
        for c in 0..m.len() {
            if mask & (1 << c) != 0 {
                continue;
            }
            if !m[row][c].is_zero() {
                let minor = rec(m, row + 1, mask | (1 << c), n, memo);
                let term = m[row][c].mul(&minor);
                acc = if sign { acc.add(&term) } else { acc.sub(&term) };
            }
            sign = !sign;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    rec(m, 0, 0, n, &mut HashMap::new())
}

/// `Q(A) = ∏ α_H`.
pub fn defining_polynomial(a: &Arrangement) -> MultiPoly {
    a.hyperplanes().iter().fold(
        MultiPoly::constant(a.ambient_dim(), Rat::one()),
        |acc, h| acc.mul(&MultiPoly::from_linear(h.normal())),
    )
}

/// True iff `θ(α_H) ∈ α_H S` for every `H`.
pub fn is_logarithmic(a: &Arrangement, theta: &Derivation) -> bool {
    a.hyperplanes().iter().all(|h| {
        theta
            .apply(h.normal())
            .reduce_mod_linear(h.normal())
            .is_zero()
    })
}

/// Saito's criterion: the candidates lie in `D(A)` and their coefficient
/// determinant is a nonzero multiple of `Q(A)`.
pub fn saito_check(a: &Arrangement, candidate: &[Derivation]) -> Result<bool, SaitoError> {
    let ell = a.ambient_dim();
    if candidate.len() != ell {
        return Err(SaitoError::WrongCount {
            expected: ell,
            found: candidate.len(),
        });
    }
    let sum: usize = candidate.iter().map(|t| t.degree).sum();
    if sum != a.len() {
        return Err(SaitoError::DegreeSumMismatch {
            expected: a.len(),
            found: sum,
        });
    }
    if candidate
        .iter()
        .any(|t| t.num_vars() != ell || !t.is_homogeneous() || !is_logarithmic(a, t))
    {
        return Ok(false);
    }
    let m: Vec<Vec<MultiPoly>> = candidate.iter().map(|t| t.components.clone()).collect();
    let det = determinant(&m, ell);
    let q = defining_polynomial(a);
    let Some((mono, qc)) = q.terms().iter().next() else {
        return Ok(false);
    };
    let c = det.coeff(mono) / qc;
    Ok(!c.is_zero() && det == q.scale(&c))
}

/// `dim` of the free graded module `⊕ S(-e_i)` in degree `d`.
pub fn free_hilbert(ell: usize, exponents: &[u64], d: usize) -> usize {
    exponents
        .iter()
        .map(|&e| dim_s(ell, d as i64 - e as i64))
        .sum()
}

/// Decision procedure: integer roots of `χ`, graded dimensions against the
/// free Hilbert function, then an explicit basis search. Negative verdicts
/// come only from the first two rules.
pub fn freeness_verdict(a: &Arrangement, degree_bound: usize) -> SaitoVerdict {
    let ell = a.ambient_dim();
    let chi = LatticeCache::global().char_poly(a);
    let Ok(exps) = exponents_from_charpoly(&chi) else {
        return SaitoVerdict::NotFree {
            reason: NotFreeReason::ChiNotIntegerRooted,
        };
    };
    let max_e = exps.as_slice().iter().copied().max().unwrap_or(0) as usize;
    for d in 0..=max_e.min(degree_bound) {
        let found = solve_degree(a, d).basis.len();
        let required = free_hilbert(ell, exps.as_slice(), d);
        if found < required {
            return SaitoVerdict::NotFree {
                reason: NotFreeReason::GradedDimensionDeficit {
                    degree: d,
                    found,
                    required,
                },
            };
        }
    }
    match find_saito_basis(a, degree_bound) {
        Some(basis) => {
            let found = Exponents::new(basis.iter().map(|t| t.degree as u64).collect());
            debug_assert_eq!(found, exps);
            SaitoVerdict::Free {
                exponents: found,
                basis,
            }
        }
        None => SaitoVerdict::Unknown { degree_bound },
    }
}

/// Verdict with the default bound `|A|`.
pub fn freeness_verdict_default(a: &Arrangement) -> SaitoVerdict {
    freeness_verdict(a, a.len())
}

/// Checks `dim D(A)_d = dim S_{d-1} + dim D_H(A)_d` for `d ≤ d_max`, where
/// `D_H(A)_d` is the kernel of `θ ↦ θ(α_H)` on `D(A)_d`.
pub fn dh_decomposition_check(a: &Arrangement, h: usize, d_max: usize) -> Result<bool, SaitoError> {
    if a.is_empty() {
        return Err(SaitoError::EmptyArrangement);
    }
    let alpha = a.hyperplane(h)?.normal().to_vec();
    let ell = a.ambient_dim();
    for d in 0..=d_max {
        let (dim, basis) = graded_dim(a, d);
        let image_mons = monomials(ell, d);
        let mut image = HybridEchelon::new(image_mons.len());
        for theta in &basis {
            let p = theta.apply(&alpha);
            let lcm = p.terms().values().fold(BigInt::one(), |acc, c| {
                num_integer::lcm(acc, c.denom().clone())
            });
            let row = image_mons
                .iter()
                .map(|m| (p.coeff(m) * Rat::from_integer(lcm.clone())).to_integer())
                .collect();
            image.insert(row);
        }
        let dh = dim - image.rank();
        if dim != dim_s(ell, d as i64 - 1) + dh {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boolean2() -> Arrangement {
        Arrangement::from_i64(2, &[&[1, 0], &[0, 1]]).unwrap()
    }

    fn braid3() -> Arrangement {
        Arrangement::from_i64(3, &[&[1, -1, 0], &[1, 0, -1], &[0, 1, -1]]).unwrap()
    }

    fn generic4() -> Arrangement {
        Arrangement::from_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]]).unwrap()
    }

    #[test]
    fn graded_dims() {
        assert_eq!(graded_dim(&boolean2(), 1).0, 2);
        assert_eq!(graded_dim(&boolean2(), 0).0, 0);
        let (n, basis) = graded_dim(&braid3(), 0);
        assert_eq!(n, 1);
        let c: Vec<Rat> = basis[0]
            .components
            .iter()
            .map(|f| f.coeff(&[0, 0, 0]))
            .collect();
        assert!(c[0] == c[1] && c[1] == c[2] && !c[0].is_zero());
    }

    #[test]
    fn euler_is_logarithmic() {
        for a in [boolean2(), braid3(), generic4()] {
            assert!(is_logarithmic(&a, &Derivation::euler(a.ambient_dim())));
        }
    }

    #[test]
    fn saito_bases() {
        let b = find_saito_basis(&boolean2(), 2).unwrap();
        assert_eq!(b.iter().map(|t| t.degree).collect::<Vec<_>>(), vec![1, 1]);
        let b = find_saito_basis(&braid3(), 3).unwrap();
        assert_eq!(
            b.iter().map(|t| t.degree).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
        assert!(find_saito_basis(&generic4(), 4).is_none());
    }

    #[test]
    fn saito_check_examples() {
        let a = boolean2();
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let z = MultiPoly::zero(2);
        let good = vec![
            Derivation::new(vec![x.clone(), z.clone()], 1),
            Derivation::new(vec![z.clone(), y], 1),
        ];
        assert_eq!(saito_check(&a, &good), Ok(true));
        let bad = vec![
            Derivation::new(vec![x.clone(), z.clone()], 1),
            Derivation::new(vec![z, x], 1),
        ];
        assert_eq!(saito_check(&a, &bad), Ok(false));
        assert_eq!(
            saito_check(
                &a,
                &good[..1]
                    .iter()
                    .cloned()
                    .chain([Derivation::euler(2)])
                    .chain([Derivation::euler(2)])
                    .collect::<Vec<_>>()
            ),
            Err(SaitoError::WrongCount {
                expected: 2,
                found: 3
            })
        );
        let wrong_deg = vec![
            Derivation::euler(2),
            Derivation::new(vec![MultiPoly::zero(2), MultiPoly::zero(2)], 0),
        ];
        assert_eq!(
            saito_check(&a, &wrong_deg),
            Err(SaitoError::DegreeSumMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn braid_determinant_is_q() {
        let a = braid3();
        let b = find_saito_basis(&a, 3).unwrap();
        let m: Vec<Vec<MultiPoly>> = b.iter().map(|t| t.components.clone()).collect();
        let det = determinant(&m, 3);
        let q = defining_polynomial(&a);
        assert!(!det.is_zero());
        let (mono, qc) = q.terms().iter().next().unwrap();
        assert_eq!(det, q.scale(&(det.coeff(mono) / qc)));
    }

    #[test]
    fn verdicts() {
        match freeness_verdict_default(&braid3()) {
            SaitoVerdict::Free { exponents, .. } => assert_eq!(exponents.as_slice(), &[0, 1, 2]),
            v => panic!("{v:?}"),
        }
        assert_eq!(
            freeness_verdict_default(&generic4()),
            SaitoVerdict::NotFree {
                reason: NotFreeReason::ChiNotIntegerRooted
            }
        );
        assert_eq!(
            freeness_verdict(&boolean2(), 0),
            SaitoVerdict::Unknown { degree_bound: 0 }
        );
    }

    #[test]
    fn dh_examples() {
        assert_eq!(dh_decomposition_check(&boolean2(), 0, 1), Ok(true));
        let single = Arrangement::from_i64(3, &[&[1, 2, 0]]).unwrap();
        assert_eq!(dh_decomposition_check(&single, 0, 0), Ok(true));
        assert_eq!(dh_decomposition_check(&braid3(), 0, 3), Ok(true));
        assert_eq!(
            dh_decomposition_check(&Arrangement::empty(2), 0, 1),
            Err(SaitoError::EmptyArrangement)
        );
    }

    #[test]
    fn hilbert_function() {
        assert_eq!(free_hilbert(3, &[0, 1, 2], 0), 1);
        assert_eq!(free_hilbert(3, &[0, 1, 2], 1), 3 + 1);
        assert_eq!(free_hilbert(2, &[1, 1], 0), 0);
    }
}
