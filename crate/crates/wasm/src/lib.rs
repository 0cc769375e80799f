//! Browser bindings. Every export takes plain strings and returns JSON text.

use arrangefree::freecert::{
    divisionality, search_additional_filtration, search_divisional_flag, search_inductively_free,
    DEFAULT_BUDGET,
};
use arrangefree::io::{parse_arrangement_str, write_arrangement};
use arrangefree::lattice::{char_poly, essential_part, Arrangement, LatticeCache};
use arrangefree::rootsys::{
    build_family as build, ideal_shi, positive_roots, weyl_arrangement, Family, IdealSign,
    LowerIdeal, RootType,
};
use arrangefree::saito::{freeness_verdict_default, SaitoVerdict};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_HYPERPLANES: usize = 24;

fn err(e: impl std::fmt::Display) -> String {
    json!({ "error": e.to_string() }).to_string()
}

fn parse(text: &str) -> Result<Arrangement, String> {
    let a = parse_arrangement_str(text)
        .map_err(|e| e.to_string())?
        .arrangement;
    if a.len() > MAX_HYPERPLANES {
        return Err(format!(
            "the demo handles at most {MAX_HYPERPLANES} hyperplanes"
        ));
    }
    Ok(a)
}

fn analyze_inner(text: &str) -> Result<Value, String> {
    let a = parse(text)?;
    let (chi, chi0) = char_poly(&a).map_err(|e| e.to_string())?;
    let levels = LatticeCache::global().lattice(&a).level_sizes();
    let divisional: Vec<bool> = (0..a.len())
        .map(|h| divisionality(&a, h).map(|r| r.is_divisional))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let saito = freeness_verdict_default(&a);
    Ok(json!({
        "hyperplanes": a.len(),
        "rank": a.rank(),
        "chi": chi.to_string(),
        "chi0": chi0.map(|c| c.to_string()),
        "level_sizes": levels,
        "divisional": divisional,
        "saito": match &saito {
            SaitoVerdict::Free { .. } => "free",
            SaitoVerdict::NotFree { .. } => "not-free",
            SaitoVerdict::Unknown { .. } => "unknown",
        },
        "saito_detail": saito.label(),
        "exponents": match &saito {
            SaitoVerdict::Free { exponents, .. } => Some(exponents.to_string()),
            _ => None,
        },
    }))
}

/// Characteristic polynomial, lattice levels, divisionality along each
/// hyperplane and the Saito verdict.
#[wasm_bindgen]
pub fn analyze(text: &str) -> String {
    analyze_inner(text).map_or_else(err, |v| v.to_string())
}

fn certify_inner(text: &str, method: &str) -> Result<Value, String> {
    let mut a = parse(text)?;
    let outcome = match method {
        "addition" => search_additional_filtration(&a, DEFAULT_BUDGET),
        "inductive" => search_inductively_free(&a, DEFAULT_BUDGET),
        "division-flag" => {
            a = essential_part(&a).map_err(|e| e.to_string())?.0;
            search_divisional_flag(&a)
        }
        m => return Err(format!("unknown method {m:?}")),
    }
    .map_err(|e| e.to_string())?;
    let verified = outcome.certificate().map(|c| c.verify(&a).is_ok());
    Ok(json!({ "outcome": outcome, "verified": verified }))
}

/// Runs one certificate search and re-verifies what it finds.
#[wasm_bindgen]
pub fn certify(text: &str, method: &str) -> String {
    certify_inner(text, method).map_or_else(err, |v| v.to_string())
}

fn family_inner(
    family: &str,
    type_label: &str,
    rank: usize,
    m: i64,
    essentialize: bool,
) -> Result<String, String> {
    let t = RootType::parse_with_rank(type_label, rank).map_err(|e| e.to_string())?;
    let rs = positive_roots(t, rank).map_err(|e| e.to_string())?;
    let a =
        match family {
            "weyl" => weyl_arrangement(&rs),
            "shi" => build(&rs, Family::Shi, m).map_err(|e| e.to_string())?,
            "catalan" => build(&rs, Family::Catalan, m).map_err(|e| e.to_string())?,
            "ideal-shi-plus" => ideal_shi(&rs, m, &LowerIdeal::all(&rs), IdealSign::Plus)
                .map_err(|e| e.to_string())?,
            "ideal-shi-minus" => ideal_shi(&rs, m, &LowerIdeal::all(&rs), IdealSign::Minus)
                .map_err(|e| e.to_string())?,
            f => return Err(format!("unknown family {f:?}")),
        };
    let a = if essentialize {
        essential_part(&a).map_err(|e| e.to_string())?.0
    } else {
        a
    };
    Ok(write_arrangement(
        &a,
        &[format!("{family} {type_label}{rank} m={m}")],
    ))
}

/// Arrangement file text for a root-system family, or a JSON error.
#[wasm_bindgen]
pub fn build_family(
    family: &str,
    type_label: &str,
    rank: usize,
    m: i64,
    essentialize: bool,
) -> String {
    family_inner(family, type_label, rank, m, essentialize).unwrap_or_else(err)
}
