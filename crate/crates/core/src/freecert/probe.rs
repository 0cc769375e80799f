use serde::{Deserialize, Serialize};

use super::{divisionality, DivisionalityReport, FreeCertError};
use crate::exactla::Hyperplane;
use crate::lattice::{char_poly, Arrangement, CharPoly};
use crate::saito::SaitoVerdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleVerdict {
    Free,
    NotFree,
    Unknown,
}

impl From<&SaitoVerdict> for OracleVerdict {
    fn from(v: &SaitoVerdict) -> Self {
        match v {
            SaitoVerdict::Free { .. } => OracleVerdict::Free,
            SaitoVerdict::NotFree { .. } => OracleVerdict::NotFree,
            SaitoVerdict::Unknown { .. } => OracleVerdict::Unknown,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeStatus {
    Consistent,
    Counterexample,
    HypothesisNotMet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartReport {
    pub part: u8,
    pub hypothesis_met: bool,
    pub conclusion_holds: Option<bool>,
    pub status: ProbeStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeEvidence {
    pub arrangement: Arrangement,
    pub hyperplane: Hyperplane,
    pub chi: CharPoly,
    pub chi_deletion: CharPoly,
    pub divisionality: DivisionalityReport,
    pub verdict: OracleVerdict,
    pub verdict_deletion: OracleVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub h: usize,
    pub parts: Vec<PartReport>,
    pub evidence: Option<ProbeEvidence>,
}

struct Lazy<'a> {
    oracle: &'a dyn Fn(&Arrangement) -> OracleVerdict,
    target: &'a Arrangement,
    value: Option<OracleVerdict>,
}

impl Lazy<'_> {
    fn get(&mut self) -> OracleVerdict {
        *self.value.get_or_insert_with(|| (self.oracle)(self.target))
    }

    fn decided(&mut self, what: &str) -> Result<bool, FreeCertError> {
        match self.get() {
            OracleVerdict::Unknown => Err(FreeCertError::OracleUndecided(what.to_string())),
            v => Ok(v == OracleVerdict::Free),
        }
    }
}

/// Whether the roots match `χ₀(A) = (t-d_2-1)∏(t-d_i)` and
/// `χ₀(A') = (t-d_2)∏(t-d_i)` for some integers `d_i`.
fn root_pattern(chi0: &CharPoly, chi0_del: &CharPoly) -> bool {
    let (Some(r), Some(rd)) = (chi0.integer_roots(), chi0_del.integer_roots()) else {
        return false;
    };
    rd.iter().any(|&d2| {
        let mut shifted = rd.clone();
        let i = shifted.iter().position(|&x| x == d2).unwrap();
        shifted[i] = d2 + 1;
        shifted.sort_unstable();
        shifted == r
    })
}

/// Evidence for the two addition conjectures at `(A, H)`: (1) `A'` free and
/// `A` globally divisional along `H` imply `A` free; (2) the shifted-root
/// pattern of `χ₀` implies both `A` and `A'` free.
pub fn conjecture_probe(
    a: &Arrangement,
    h: usize,
    oracle: &dyn Fn(&Arrangement) -> OracleVerdict,
) -> Result<ProbeResult, FreeCertError> {
    let hyperplane = a.hyperplane(h)?.clone();
    let deletion = a.deletion(h)?;
    let report = divisionality(a, h)?;
    let mut full = Lazy {
        oracle,
        target: a,
        value: None,
    };
    let mut del = Lazy {
        oracle,
        target: &deletion,
        value: None,
    };
    let mut parts = Vec::new();

    let part1 = if !report.is_globally_divisional {
        PartReport {
            part: 1,
            hypothesis_met: false,
            conclusion_holds: None,
            status: ProbeStatus::HypothesisNotMet,
            detail: "not globally divisional along H".into(),
        }
    } else if !del.decided("A ∖ {H}")? {
        PartReport {
            part: 1,
            hypothesis_met: false,
            conclusion_holds: None,
            status: ProbeStatus::HypothesisNotMet,
            detail: "A ∖ {H} is not free".into(),
        }
    } else {
        let holds = full.decided("A")?;
        PartReport {
            part: 1,
            hypothesis_met: true,
            conclusion_holds: Some(holds),
            status: if holds {
                ProbeStatus::Consistent
            } else {
                ProbeStatus::Counterexample
            },
            detail: if holds {
                "A is free".into()
            } else {
                "A is not free".into()
            },
        }
    };
    parts.push(part1);

    let (chi, chi0) = char_poly(a)?;
    let (chi_del, chi0_del) = char_poly(&deletion)?;
    let part2 = match (chi0, chi0_del) {
        (Some(c0), Some(c0d)) if root_pattern(&c0, &c0d) => {
            let holds = full.decided("A")? && del.decided("A ∖ {H}")?;
            PartReport {
                part: 2,
                hypothesis_met: true,
                conclusion_holds: Some(holds),
                status: if holds {
                    ProbeStatus::Consistent
                } else {
                    ProbeStatus::Counterexample
                },
                detail: format!("χ₀(A) = {c0}, χ₀(A') = {c0d}"),
            }
        }
        (_, None) => PartReport {
            part: 2,
            hypothesis_met: false,
            conclusion_holds: None,
            status: ProbeStatus::HypothesisNotMet,
            detail: "A ∖ {H} is empty, so χ₀(A') is undefined".into(),
        },
        _ => PartReport {
            part: 2,
            hypothesis_met: false,
            conclusion_holds: None,
            status: ProbeStatus::HypothesisNotMet,
            detail: "χ₀ roots do not follow the shifted pattern".into(),
        },
    };
    parts.push(part2);

    let evidence = parts
        .iter()
        .any(|p| p.status == ProbeStatus::Counterexample)
        .then(|| ProbeEvidence {
            arrangement: a.clone(),
            hyperplane,
            chi,
            chi_deletion: chi_del,
            divisionality: report,
            verdict: full.get(),
            verdict_deletion: del.get(),
        });
    Ok(ProbeResult { h, parts, evidence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::saito::freeness_verdict_default;

    fn saito(a: &Arrangement) -> OracleVerdict {
        (&freeness_verdict_default(a)).into()
    }

    #[test]
    fn probe_examples() {
        let b2 = Arrangement::from_i64(2, &[&[1, 0], &[0, 1]]).unwrap();
        let r = conjecture_probe(&b2, 1, &saito).unwrap();
        assert_eq!(r.parts[0].status, ProbeStatus::Consistent);
        assert!(r.evidence.is_none());

        let g4 =
            Arrangement::from_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]]).unwrap();
        let r = conjecture_probe(&g4, 3, &saito).unwrap();
        assert_eq!(r.parts[0].status, ProbeStatus::HypothesisNotMet);

        let single = Arrangement::from_i64(3, &[&[1, 0, 0]]).unwrap();
        let r = conjecture_probe(&single, 0, &saito).unwrap();
        assert_eq!(r.parts[0].status, ProbeStatus::Consistent);
        assert_eq!(r.parts[1].status, ProbeStatus::HypothesisNotMet);
    }

    #[test]
    fn undecided_oracle() {
        let b2 = Arrangement::from_i64(2, &[&[1, 0], &[0, 1]]).unwrap();
        let unknown = |_: &Arrangement| OracleVerdict::Unknown;
        assert!(matches!(
            conjecture_probe(&b2, 1, &unknown),
            Err(FreeCertError::OracleUndecided(_))
        ));
    }

    #[test]
    fn fake_oracle_yields_counterexample_with_evidence() {
        let b2 = Arrangement::from_i64(2, &[&[1, 0], &[0, 1]]).unwrap();
        let liar = |a: &Arrangement| {
            if a.len() == 2 {
                OracleVerdict::NotFree
            } else {
                OracleVerdict::Free
            }
        };
        let r = conjecture_probe(&b2, 1, &liar).unwrap();
        assert_eq!(r.parts[0].status, ProbeStatus::Counterexample);
        assert!(r.evidence.is_some());
    }
}
