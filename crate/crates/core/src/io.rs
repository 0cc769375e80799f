//! The plain-text arrangement file format and the JSON report.
//!
//! ```text
//! # comments start with '#'
//! arrangement 3
//! 1 -1 0
//! 0 1/2 -1/2
//! ```
//!
//! With `arrangement <ℓ> affine` each line carries `ℓ + 1` entries; the last
//! one is the constant `k` of the affine hyperplane `α(x) = k`. Affine files
//! are coned (new last coordinate `z`) before any lattice operation.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{canonical_hyperplane, clear_denominators, Flat, Hyperplane, Rat};
use crate::freecert::{
    CertificateKind, DivisionalityReport, FreeCertError, FreenessCertificate, ProbeResult,
    SearchOutcome,
};
use crate::lattice::{cone, Arrangement, CharPoly, LatticeError};
use crate::saito::SaitoVerdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("line {second} repeats the hyperplane of line {first}")]
    DuplicateHyperplane { first: usize, second: usize },
    #[error("line {line}: the normal vector is zero")]
    ZeroNormal { line: usize },
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A parsed file. For affine input, `arrangement` is the cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedArrangement {
    pub arrangement: Arrangement,
    pub affine: Option<Vec<(Vec<Rat>, Rat)>>,
    /// Source line of each hyperplane, in file order.
    pub lines: Vec<usize>,
}

impl ParsedArrangement {
    pub fn is_affine(&self) -> bool {
        self.affine.is_some()
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::ParseError {
        line,
        message: message.into(),
    }
}

pub fn parse_arrangement_str(text: &str) -> Result<ParsedArrangement, IoError> {
    let mut header: Option<(usize, bool)> = None;
    let mut rows: Vec<(usize, Vec<Rat>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((dim, affine)) = header else {
            if tokens[0] != "arrangement" {
                return Err(parse_err(
                    line,
                    "expected header `arrangement <dim> [affine]`",
                ));
            }
            let dim: usize = tokens
                .get(1)
                .ok_or_else(|| parse_err(line, "missing dimension"))?
                .parse()
                .map_err(|_| parse_err(line, "dimension must be a nonnegative integer"))?;
            let affine = match tokens.get(2) {
                None => false,
                Some(&"affine") => true,
                Some(t) => return Err(parse_err(line, format!("unexpected header token {t:?}"))),
            };
            if tokens.len() > 3 {
                return Err(parse_err(line, "trailing tokens after header"));
            }
            header = Some((dim, affine));
            continue;
        };
        let want = dim + usize::from(affine);
        if tokens.len() != want {
            return Err(parse_err(
                line,
                format!("expected {want} entries, found {}", tokens.len()),
            ));
        }
        let vals = tokens
            .iter()
            .map(|t| {
                t.parse::<Rat>()
                    .map_err(|_| parse_err(line, format!("not a rational number: {t:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((line, vals));
    }
    let (dim, affine) =
        header.ok_or_else(|| parse_err(text.lines().count().max(1), "missing header"))?;
    let mut seen: HashMap<Hyperplane, usize> = HashMap::new();
    let mut hyperplanes = Vec::with_capacity(rows.len());
    let mut layers = Vec::new();
    for (line, vals) in &rows {
        let normal = &vals[..dim];
        if normal.iter().all(Zero::is_zero) {
            return Err(IoError::ZeroNormal { line: *line });
        }
        let key = if affine {
            let full: Vec<Rat> = normal.iter().cloned().chain([-vals[dim].clone()]).collect();
            canonical_hyperplane(&full).map_err(|_| IoError::ZeroNormal { line: *line })?
        } else {
            canonical_hyperplane(normal).map_err(|_| IoError::ZeroNormal { line: *line })?
        };
        if let Some(&first) = seen.get(&key) {
            return Err(IoError::DuplicateHyperplane {
                first,
                second: *line,
            });
        }
        seen.insert(key.clone(), *line);
        if affine {
            layers.push((normal.to_vec(), vals[dim].clone()));
        } else {
            hyperplanes.push(key);
        }
    }
    let lines = rows.iter().map(|(l, _)| *l).collect();
    if affine {
        let arrangement = cone(&layers, dim)?;
        Ok(ParsedArrangement {
            arrangement,
            affine: Some(layers),
            lines,
        })
    } else {
        Ok(ParsedArrangement {
            arrangement: Arrangement::new(dim, hyperplanes)?,
            affine: None,
            lines,
        })
    }
}

pub fn parse_arrangement_file(path: &Path) -> Result<ParsedArrangement, IoError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| IoError::Io(format!("{}: {e}", path.display())))?;
    parse_arrangement_str(&text)
}

/// Central arrangement file, one canonical integer normal per line.
pub fn write_arrangement(a: &Arrangement, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "arrangement {}", a.ambient_dim());
    for h in a.hyperplanes() {
        let row: Vec<String> = h.normal().iter().map(BigInt::to_string).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Affine file with integer entries per line.
pub fn write_affine(layers: &[(Vec<Rat>, Rat)], dim: usize) -> String {
    let mut out = format!("arrangement {dim} affine\n");
    for (n, k) in layers {
        let mut full = n.clone();
        full.push(k.clone());
        let row: Vec<String> = clear_denominators(&full)
            .iter()
            .map(BigInt::to_string)
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Essentialization applied before analysis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EssentialRecord {
    /// Span of the normals; coordinates of the essential part refer to its
    /// row basis.
    pub quotient_basis: Flat,
    pub arrangement: Arrangement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateAttempt {
    pub method: String,
    /// The search ran on the essential part rather than the input.
    #[serde(default)]
    pub on_essential_part: bool,
    pub outcome: SearchOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub agree: bool,
    pub certified: Option<String>,
    pub saito: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conflicts: Vec<String>,
}

/// Structured output of one CLI run.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub digest: String,
    pub arrangement: Option<Arrangement>,
    /// Analysis ran on the essential part instead of the input.
    #[serde(default)]
    pub essentialize: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub essentialized: Option<EssentialRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<CharPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi0: Option<CharPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub divisionality: Vec<DivisionalityReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<CertificateAttempt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saito: Option<SaitoVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<OracleComparison>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub timing_us: u64,
}

impl Report {
    pub fn new(command: &str, a: &Arrangement) -> Self {
        Report {
            command: command.to_string(),
            digest: a.digest(),
            arrangement: Some(a.clone()),
            ..Default::default()
        }
    }

    /// The arrangement analysed: the essential part when one was recorded.
    pub fn target(&self) -> Option<&Arrangement> {
        if self.essentialize {
            self.essentialized.as_ref().map(|e| &e.arrangement)
        } else {
            self.arrangement.as_ref()
        }
    }

    pub fn found_certificates(&self) -> impl Iterator<Item = &FreenessCertificate> {
        self.certificates
            .iter()
            .filter_map(|c| c.outcome.certificate())
    }

    /// Re-verifies every certificate in the report (including a Saito
    /// basis) against the arrangement it refers to.
    pub fn replay(&self) -> Result<usize, FreeCertError> {
        let mut n = 0;
        for c in &self.certificates {
            let Some(cert) = c.outcome.certificate() else {
                continue;
            };
            let a = if c.on_essential_part {
                self.essentialized.as_ref().map(|e| &e.arrangement)
            } else {
                self.arrangement.as_ref()
            };
            let a = a.ok_or_else(|| {
                FreeCertError::MalformedCertificate("report has no arrangement".into())
            })?;
            cert.verify(a)?;
            n += 1;
        }
        if let (Some(SaitoVerdict::Free { exponents, basis }), Some(a)) =
            (&self.saito, self.target())
        {
            let c = FreenessCertificate {
                kind: CertificateKind::SaitoBasis {
                    derivations: basis.clone(),
                },
                exponents: exponents.clone(),
            };
            c.verify(a)?;
            n += 1;
        }
        Ok(n)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}
