use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{
    divisionality, exponents_from_charpoly, DivisionalityReport, Exponents, FreeCertError,
    StairLevel,
};
use crate::exactla::{Flat, Hyperplane};
use crate::lattice::{restriction, restriction_to_flat, Arrangement, LatticeCache};
use crate::saito::{saito_check, Derivation};

/// Replayable evidence that an arrangement is free, with its exponents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessCertificate {
    pub kind: CertificateKind,
    pub exponents: Exponents,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CertificateKind {
    /// `H_1, …, H_n` with each `{H_1..H_i}` divisional along `H_i`;
    /// `steps[i]` are the exponents after adding `H_{i+1}`.
    AdditionFiltration {
        order: Vec<Hyperplane>,
        steps: Vec<Exponents>,
    },
    /// Addition order whose every restriction is itself inductively free.
    Inductive {
        order: Vec<Hyperplane>,
        restrictions: Vec<FreenessCertificate>,
    },
    /// `X_1 ⊃ … ⊃ X_{ℓ-2}` with `X_i` of codimension `i`.
    DivisionalFlag {
        flag: Vec<Flat>,
    },
    Stair {
        levels: Vec<StairLevel>,
    },
    SaitoBasis {
        derivations: Vec<Derivation>,
    },
    /// Rank at most two.
    LowRank,
    /// `base` certifies `A ∖ {H}`; `A` is divisional along `H`.
    Addition {
        base: Box<FreenessCertificate>,
        hyperplane: Hyperplane,
    },
    /// `base` certifies `A ∪ {H}`, which is divisional along `H`.
    Deletion {
        base: Box<FreenessCertificate>,
        hyperplane: Hyperplane,
    },
    /// `restriction` certifies `A^H` and `χ(A^H) | χ(A)`.
    Division {
        hyperplane: Hyperplane,
        restriction: Box<FreenessCertificate>,
    },
}

impl CertificateKind {
    pub fn name(&self) -> &'static str {
        match self {
            CertificateKind::AdditionFiltration { .. } => "addition-filtration",
            CertificateKind::Inductive { .. } => "inductive",
            CertificateKind::DivisionalFlag { .. } => "divisional-flag",
            CertificateKind::Stair { .. } => "stair",
            CertificateKind::SaitoBasis { .. } => "saito-basis",
            CertificateKind::LowRank => "low-rank",
            CertificateKind::Addition { .. } => "addition",
            CertificateKind::Deletion { .. } => "deletion",
            CertificateKind::Division { .. } => "division",
        }
    }
}

fn invalid(msg: impl Into<String>) -> FreeCertError {
    FreeCertError::InvalidCertificate(msg.into())
}

fn index_in(a: &Arrangement, h: &Hyperplane) -> Result<usize, FreeCertError> {
    a.index_of(h).ok_or_else(|| {
        FreeCertError::MalformedCertificate(format!("hyperplane {h} is not in the arrangement"))
    })
}

fn check_permutation(a: &Arrangement, order: &[Hyperplane]) -> Result<(), FreeCertError> {
    let set: HashSet<&Hyperplane> = order.iter().collect();
    if order.len() != a.len() || set.len() != order.len() || !order.iter().all(|h| a.contains(h)) {
        return Err(FreeCertError::MalformedCertificate(
            "order is not a permutation of the arrangement".into(),
        ));
    }
    Ok(())
}

/// Exponents after adding `A ∖ {H} → A`, given the report for `(A, H)`.
fn added(
    prev: &Exponents,
    a_len: usize,
    report: &DivisionalityReport,
) -> Result<Exponents, FreeCertError> {
    let rs = report.restriction_size as u64;
    let n = a_len as u64;
    prev.replace_one(n - 1 - rs, n - rs).ok_or_else(|| {
        invalid(format!(
            "exponents {prev} lack |A'| - |A^H| = {}",
            n - 1 - rs
        ))
    })
}

/// Replays an addition order from the empty arrangement, returning the
/// exponents after each step.
pub(crate) fn replay_filtration(
    ambient_dim: usize,
    order: &[Hyperplane],
) -> Result<Vec<Exponents>, FreeCertError> {
    let mut cur = Arrangement::empty(ambient_dim);
    let mut exps = Exponents::zeros(ambient_dim);
    let mut steps = Vec::with_capacity(order.len());
    for (i, h) in order.iter().enumerate() {
        cur = cur.with(h.clone())?;
        let report = divisionality(&cur, cur.len() - 1)?;
        if !report.is_divisional {
            return Err(invalid(format!(
                "step {} is not divisional along {h}",
                i + 1
            )));
        }
        exps = added(&exps, cur.len(), &report)?;
        steps.push(exps.clone());
    }
    Ok(steps)
}

/// `χ(A^X)` for a flat `X` of `L(A)`.
pub(crate) fn restriction_poly(
    a: &Arrangement,
    x: &Flat,
) -> Result<crate::lattice::CharPoly, FreeCertError> {
    let (ax, _) = restriction_to_flat(a, x)?;
    Ok(LatticeCache::global().char_poly(&ax))
}

/// Exponents read off a divisional flag, or the reason it fails.
pub(crate) fn replay_flag(a: &Arrangement, flag: &[Flat]) -> Result<Exponents, FreeCertError> {
    let ell = a.ambient_dim();
    if !a.is_essential() {
        return Err(FreeCertError::NotEssential {
            rank: a.rank(),
            ambient_dim: ell,
        });
    }
    if flag.len() != ell.saturating_sub(2) {
        return Err(FreeCertError::MalformedCertificate(format!(
            "flag has {} flats, expected {}",
            flag.len(),
            ell.saturating_sub(2)
        )));
    }
    let mut prev_flat = Flat::ambient(ell);
    let mut prev_poly = LatticeCache::global().char_poly(a);
    let mut roots = Vec::new();
    for (i, x) in flag.iter().enumerate() {
        if x.ambient_dim() != ell
            || x.codim() != i + 1
            || !a.has_flat(x)
            || !x.is_subspace_of(&prev_flat)
        {
            return Err(FreeCertError::MalformedCertificate(format!(
                "flag entry {} is not a codimension-{} flat below the previous one",
                i + 1,
                i + 1
            )));
        }
        let poly = restriction_poly(a, x)?;
        let q = prev_poly.exact_div(&poly).ok_or_else(|| {
            invalid(format!(
                "χ at flag entry {} does not divide the previous one",
                i + 1
            ))
        })?;
        let root = exponents_from_charpoly(&q)
            .map_err(|_| invalid("flag quotient has no nonnegative integer root"))?;
        roots.extend_from_slice(root.as_slice());
        prev_flat = x.clone();
        prev_poly = poly;
    }
    let (last, _) = restriction_to_flat(a, &prev_flat)?;
    let base = Exponents::rank_two(last.ambient_dim(), last.rank(), last.len());
    let mut all = base.as_slice().to_vec();
    all.extend(roots);
    Ok(Exponents::new(all))
}

impl FreenessCertificate {
    pub fn low_rank(a: &Arrangement) -> Option<Self> {
        (a.rank() <= 2).then(|| FreenessCertificate {
            kind: CertificateKind::LowRank,
            exponents: Exponents::rank_two(a.ambient_dim(), a.rank(), a.len()),
        })
    }

    /// Additional-filtration certificate for a given order, if it is one.
    pub fn from_filtration(a: &Arrangement, order: Vec<Hyperplane>) -> Result<Self, FreeCertError> {
        check_permutation(a, &order)?;
        let steps = replay_filtration(a.ambient_dim(), &order)?;
        let exponents = steps
            .last()
            .cloned()
            .unwrap_or_else(|| Exponents::zeros(a.ambient_dim()));
        Ok(FreenessCertificate {
            kind: CertificateKind::AdditionFiltration { order, steps },
            exponents,
        })
    }

    pub fn from_flag(a: &Arrangement, flag: Vec<Flat>) -> Result<Self, FreeCertError> {
        let exponents = replay_flag(a, &flag)?;
        Ok(FreenessCertificate {
            kind: CertificateKind::DivisionalFlag { flag },
            exponents,
        })
    }

    /// The addition order of an inductive or filtration certificate as an
    /// additional filtration.
    pub fn to_addition_filtration(&self, a: &Arrangement) -> Result<Self, FreeCertError> {
        match &self.kind {
            CertificateKind::AdditionFiltration { .. } => Ok(self.clone()),
            CertificateKind::Inductive { order, .. } => Self::from_filtration(a, order.clone()),
            other => Err(FreeCertError::MalformedCertificate(format!(
                "a {} certificate carries no addition order",
                other.name()
            ))),
        }
    }

    /// Recomputes the exponents from scratch; fails unless every step holds.
    pub fn replay(&self, a: &Arrangement) -> Result<Exponents, FreeCertError> {
        let ell = a.ambient_dim();
        match &self.kind {
            CertificateKind::AdditionFiltration { order, steps } => {
                check_permutation(a, order)?;
                let replayed = replay_filtration(ell, order)?;
                if &replayed != steps {
                    return Err(invalid("recorded step exponents differ from the replay"));
                }
                Ok(replayed
                    .last()
                    .cloned()
                    .unwrap_or_else(|| Exponents::zeros(ell)))
            }
            CertificateKind::Inductive {
                order,
                restrictions,
            } => {
                check_permutation(a, order)?;
                if restrictions.len() != order.len() {
                    return Err(FreeCertError::MalformedCertificate(
                        "one restriction certificate per step required".into(),
                    ));
                }
                let mut cur = Arrangement::empty(ell);
                let mut exps = Exponents::zeros(ell);
                for (i, (h, rc)) in order.iter().zip(restrictions).enumerate() {
                    cur = cur.with(h.clone())?;
                    let (ah, _) = restriction(&cur, cur.len() - 1)?;
                    if !matches!(rc.kind, CertificateKind::Inductive { .. }) {
                        return Err(invalid(format!(
                            "restriction at step {} is not certified inductively",
                            i + 1
                        )));
                    }
                    let eh = rc.verify(&ah)?;
                    if !eh.is_submultiset_of(&exps) {
                        return Err(invalid(format!(
                            "step {}: exp(A^H) = {eh} is not contained in {exps}",
                            i + 1
                        )));
                    }
                    exps = eh.with((cur.len() - ah.len()) as u64);
                }
                Ok(exps)
            }
            CertificateKind::DivisionalFlag { flag } => replay_flag(a, flag),
            CertificateKind::Stair { levels } => {
                let diag = super::verify_stair_certificate(a, levels)?;
                match (diag.valid, diag.exponents) {
                    (true, Some(e)) => Ok(e),
                    _ => Err(invalid("stair conditions fail")),
                }
            }
            CertificateKind::SaitoBasis { derivations } => match saito_check(a, derivations) {
                Ok(true) => Ok(Exponents::new(
                    derivations.iter().map(|t| t.degree as u64).collect(),
                )),
                Ok(false) => Err(invalid("Saito determinant check fails")),
                Err(e) => Err(invalid(e.to_string())),
            },
            CertificateKind::LowRank => {
                if a.rank() > 2 {
                    return Err(invalid(format!("rank {} exceeds two", a.rank())));
                }
                Ok(Exponents::rank_two(ell, a.rank(), a.len()))
            }
            CertificateKind::Addition { base, hyperplane } => {
                let k = index_in(a, hyperplane)?;
                let smaller = a.deletion(k)?;
                let prev = base.verify(&smaller)?;
                let report = divisionality(a, k)?;
                if !report.is_divisional {
                    return Err(invalid(format!("not divisional along {hyperplane}")));
                }
                added(&prev, a.len(), &report)
            }
            CertificateKind::Deletion { base, hyperplane } => {
                if a.contains(hyperplane) {
                    return Err(FreeCertError::MalformedCertificate(format!(
                        "{hyperplane} was not deleted"
                    )));
                }
                let bigger = a.with(hyperplane.clone())?;
                let e = base.verify(&bigger)?;
                let report = divisionality(&bigger, bigger.len() - 1)?;
                if !report.is_divisional {
                    return Err(invalid(format!("not divisional along {hyperplane}")));
                }
                let rs = report.restriction_size as u64;
                let n = bigger.len() as u64;
                e.replace_one(n - rs, n - 1 - rs)
                    .ok_or_else(|| invalid(format!("exponents {e} lack |A| - |A^H| = {}", n - rs)))
            }
            CertificateKind::Division {
                hyperplane,
                restriction: rc,
            } => {
                let k = index_in(a, hyperplane)?;
                let (ah, _) = restriction(a, k)?;
                let eh = rc.verify(&ah)?;
                let cache = LatticeCache::global();
                if !cache.char_poly(a).divisible_by(&cache.char_poly(&ah)) {
                    return Err(invalid("χ(A^H) does not divide χ(A)"));
                }
                Ok(eh.with((a.len() - ah.len()) as u64))
            }
        }
    }

    /// Full check: replay, recorded exponents, `Σ = |A|`, `1 ∈ exp` for
    /// nonempty `A`, and agreement with the roots of `χ(A)`.
    pub fn verify(&self, a: &Arrangement) -> Result<Exponents, FreeCertError> {
        let e = self.replay(a)?;
        if e != self.exponents {
            return Err(invalid(format!(
                "recorded exponents {} differ from replayed {e}",
                self.exponents
            )));
        }
        if e.len() != a.ambient_dim() || e.sum() != a.len() as u64 {
            return Err(invalid(format!(
                "exponents {e} do not sum to |A| = {}",
                a.len()
            )));
        }
        if !a.is_empty() && !e.as_slice().contains(&1) {
            return Err(invalid(
                "exponents of a nonempty arrangement must contain 1",
            ));
        }
        let chi = LatticeCache::global().char_poly(a);
        match exponents_from_charpoly(&chi) {
            Ok(roots) if roots == e => Ok(e),
            _ => Err(invalid(format!(
                "exponents {e} are not the roots of χ = {chi}"
            ))),
        }
    }
}

/// Result of one addition, deletion or division step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum StepOutcome {
    Certified {
        certificate: FreenessCertificate,
        report: Option<DivisionalityReport>,
    },
    /// With a free neighbour, this certifies non-freeness.
    NotDivisional { report: DivisionalityReport },
    /// Division gives no conclusion here.
    NotApplicable { reason: String },
}

/// `A = A' ∪ {H}` from a certified `A'`: free iff divisional along `H`.
pub fn apply_addition(
    a_minus: &Arrangement,
    cert: Option<&FreenessCertificate>,
    h: Hyperplane,
) -> Result<(Arrangement, StepOutcome), FreeCertError> {
    let cert = cert.ok_or(FreeCertError::MissingCertificate)?;
    cert.verify(a_minus)?;
    let a = a_minus.with(h.clone())?;
    let report = divisionality(&a, a.len() - 1)?;
    if !report.is_divisional {
        return Ok((a, StepOutcome::NotDivisional { report }));
    }
    let exponents = added(&cert.exponents, a.len(), &report)?;
    let kind = match &cert.kind {
        CertificateKind::AdditionFiltration { order, steps } => {
            let mut order = order.clone();
            let mut steps = steps.clone();
            order.push(h);
            steps.push(exponents.clone());
            CertificateKind::AdditionFiltration { order, steps }
        }
        _ => CertificateKind::Addition {
            base: Box::new(cert.clone()),
            hyperplane: h,
        },
    };
    Ok((
        a,
        StepOutcome::Certified {
            certificate: FreenessCertificate { kind, exponents },
            report: Some(report),
        },
    ))
}

/// `A' = A ∖ {H}` from a certified `A`: free iff `A` is divisional along `H`.
pub fn apply_deletion(
    a: &Arrangement,
    cert: Option<&FreenessCertificate>,
    h: usize,
) -> Result<(Arrangement, StepOutcome), FreeCertError> {
    let cert = cert.ok_or(FreeCertError::MissingCertificate)?;
    let hyperplane = a.hyperplane(h)?.clone();
    cert.verify(a)?;
    let smaller = a.deletion(h)?;
    let report = divisionality(a, h)?;
    if !report.is_divisional {
        return Ok((smaller, StepOutcome::NotDivisional { report }));
    }
    let rs = report.restriction_size as u64;
    let n = a.len() as u64;
    let exponents = cert
        .exponents
        .replace_one(n - rs, n - 1 - rs)
        .ok_or_else(|| invalid("exponent bookkeeping failed"))?;
    let kind = match &cert.kind {
        CertificateKind::AdditionFiltration { order, steps }
            if order.last() == Some(&hyperplane) =>
        {
            CertificateKind::AdditionFiltration {
                order: order[..order.len() - 1].to_vec(),
                steps: steps[..steps.len() - 1].to_vec(),
            }
        }
        _ => CertificateKind::Deletion {
            base: Box::new(cert.clone()),
            hyperplane,
        },
    };
    Ok((
        smaller,
        StepOutcome::Certified {
            certificate: FreenessCertificate { kind, exponents },
            report: Some(report),
        },
    ))
}

/// Division: a certified `A^H` with `χ(A^H) | χ(A)` makes `A` free.
pub fn apply_division(
    a: &Arrangement,
    h: usize,
    restriction_cert: &FreenessCertificate,
) -> Result<StepOutcome, FreeCertError> {
    let hyperplane = a.hyperplane(h)?.clone();
    let (ah, _) = restriction(a, h)?;
    let eh = restriction_cert.verify(&ah)?;
    let cache = LatticeCache::global();
    let chi = cache.char_poly(a);
    let chi_h = cache.char_poly(&ah);
    if !chi.divisible_by(&chi_h) {
        return Ok(StepOutcome::NotApplicable {
            reason: format!("χ(A^H) = {chi_h} does not divide χ(A) = {chi}"),
        });
    }
    Ok(StepOutcome::Certified {
        certificate: FreenessCertificate {
            kind: CertificateKind::Division {
                hyperplane,
                restriction: Box::new(restriction_cert.clone()),
            },
            exponents: eh.with((a.len() - ah.len()) as u64),
        },
        report: None,
    })
}
