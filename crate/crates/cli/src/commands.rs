use std::collections::HashMap;
use std::error::Error;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use arrangefree::freecert::{
    conjecture_probe, divisionality, exponents_from_charpoly, search_additional_filtration,
    search_divisional_flag, search_inductively_free, stair_from_flag, verify_stair_certificate,
    CertificateKind, FreenessCertificate, OracleVerdict, ProbeStatus, SearchOutcome,
};
use arrangefree::io::{
    parse_arrangement_file, write_arrangement, CertificateAttempt, EssentialRecord,
    OracleComparison, Report,
};
use arrangefree::lattice::{char_poly, essential_part, Arrangement, ArrangementKey, LatticeCache};
use arrangefree::rootsys::{
    build_family, enumerate_lower_ideals, ideal_shi, positive_roots, weyl_arrangement, Family,
    IdealSign, LowerIdeal, RootType,
};
use arrangefree::saito::{freeness_verdict, freeness_verdict_default, SaitoVerdict};
use rayon::prelude::*;
use serde_json::json;

use crate::{FamilyArg, Method};

pub type Outcome = Result<Status, Box<dyn Error + Send + Sync>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Negative = 1,
    Failure = 2,
}

pub struct Context {
    pub max_hyperplanes: usize,
}

fn essential_record(a: &Arrangement) -> Result<EssentialRecord, Box<dyn Error + Send + Sync>> {
    let (arrangement, q) = essential_part(a)?;
    Ok(EssentialRecord {
        quotient_basis: q.basis().clone(),
        arrangement,
    })
}

fn emit(report: &mut Report, start: Instant) {
    report.timing_us = start.elapsed().as_micros() as u64;
    println!("{}", report.to_json());
}

impl Context {
    fn guard(&self, a: &Arrangement) -> Result<(), Box<dyn Error + Send + Sync>> {
        if a.len() > self.max_hyperplanes {
            return Err(format!(
                "{} hyperplanes exceed the limit of {} (raise it with --max-hyperplanes)",
                a.len(),
                self.max_hyperplanes
            )
            .into());
        }
        Ok(())
    }

    /// Parses `file` and starts a report; the returned arrangement is the
    /// one to analyse.
    fn load(
        &self,
        command: &str,
        file: &Path,
        essentialize: bool,
    ) -> Result<(Report, Arrangement), Box<dyn Error + Send + Sync>> {
        let parsed = parse_arrangement_file(file)?;
        let a = parsed.arrangement;
        self.guard(&a)?;
        let mut report = Report::new(command, &a);
        if parsed.affine.is_some() {
            report
                .notes
                .push("affine input was coned; the cone coordinate is last".into());
        }
        if essentialize {
            let rec = essential_record(&a)?;
            let target = rec.arrangement.clone();
            report.essentialize = true;
            report.essentialized = Some(rec);
            return Ok((report, target));
        }
        Ok((report, a))
    }

    pub fn chi(&self, file: &Path, essentialize: bool) -> Outcome {
        let start = Instant::now();
        let (mut report, a) = self.load("chi", file, essentialize)?;
        let (chi, chi0) = char_poly(&a)?;
        if chi0.is_none() {
            report
                .notes
                .push("empty arrangement: the reduced polynomial is undefined".into());
        }
        report.chi = Some(chi);
        report.chi0 = chi0;
        emit(&mut report, start);
        Ok(Status::Success)
    }

    pub fn lattice(&self, file: &Path, essentialize: bool) -> Outcome {
        let start = Instant::now();
        let (mut report, a) = self.load("lattice", file, essentialize)?;
        let l = LatticeCache::global().lattice(&a);
        report.level_sizes = Some(l.level_sizes());
        report.chi = Some(l.char_poly());
        emit(&mut report, start);
        Ok(Status::Success)
    }

    pub fn divisional(&self, file: &Path, h: Option<usize>, essentialize: bool) -> Outcome {
        let start = Instant::now();
        let (mut report, a) = self.load("divisional", file, essentialize)?;
        let hs: Vec<usize> = match h {
            Some(h) => vec![h],
            None => (0..a.len()).collect(),
        };
        for h in hs {
            report.divisionality.push(divisionality(&a, h)?);
        }
        let all = report.divisionality.iter().all(|r| r.is_divisional);
        emit(&mut report, start);
        Ok(if all {
            Status::Success
        } else {
            Status::Negative
        })
    }

    pub fn certify(&self, file: &Path, method: Method, budget: u64, essentialize: bool) -> Outcome {
        let start = Instant::now();
        let (mut report, a) = self.load("certify", file, essentialize)?;
        let single = [method];
        let methods: &[Method] = match method {
            Method::Auto => &[
                Method::Addition,
                Method::DivisionFlag,
                Method::Inductive,
                Method::Stair,
            ],
            _ => &single,
        };
        run_methods(&mut report, &a, methods, budget)?;
        let found = report.found_certificates().next().is_some();
        let status = if found {
            Status::Success
        } else if exponents_from_charpoly(&LatticeCache::global().char_poly(&a)).is_err() {
            report
                .notes
                .push("χ is not integer-rooted, so the arrangement is not free".into());
            Status::Negative
        } else {
            report
                .notes
                .push("no certificate found; this alone does not show non-freeness".into());
            Status::Success
        };
        emit(&mut report, start);
        Ok(status)
    }

    pub fn saito(&self, file: &Path, bound: Option<usize>, essentialize: bool) -> Outcome {
        let start = Instant::now();
        let (mut report, a) = self.load("saito", file, essentialize)?;
        let v = freeness_verdict(&a, bound.unwrap_or(a.len()));
        let status = if v.is_not_free() {
            Status::Negative
        } else {
            Status::Success
        };
        report.saito = Some(v);
        emit(&mut report, start);
        Ok(status)
    }

    pub fn probe(&self, file: &Path, h: usize, essentialize: bool) -> Outcome {
        let start = Instant::now();
        let (mut report, a) = self.load("probe-conjecture", file, essentialize)?;
        let oracle = |x: &Arrangement| OracleVerdict::from(&freeness_verdict_default(x));
        let result = conjecture_probe(&a, h, &oracle)?;
        let counter = result
            .parts
            .iter()
            .any(|p| p.status == ProbeStatus::Counterexample);
        report.probe = Some(result);
        emit(&mut report, start);
        Ok(if counter {
            Status::Negative
        } else {
            Status::Success
        })
    }

    pub fn oracle_compare(&self, file: &Path, budget: u64) -> Outcome {
        let start = Instant::now();
        let (mut report, a) = self.load("oracle-compare", file, false)?;
        compare(&mut report, &a, budget)?;
        let agree = report.comparison.as_ref().is_some_and(|c| c.agree);
        emit(&mut report, start);
        Ok(if agree {
            Status::Success
        } else {
            Status::Negative
        })
    }

    pub fn oracle_compare_dir(&self, dir: &Path, out: Option<&Path>, budget: u64) -> Outcome {
        let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "arr"))
            .collect();
        files.sort();
        if let Some(out) = out {
            std::fs::create_dir_all(out)?;
        }
        let results: Vec<(String, Result<Report, String>)> = files
            .par_iter()
            .map(|f| {
                let name = f.file_name().unwrap().to_string_lossy().into_owned();
                let start = Instant::now();
                let r = self
                    .load("oracle-compare", f, false)
                    .and_then(|(mut report, a)| {
                        compare(&mut report, &a, budget)?;
                        report.timing_us = start.elapsed().as_micros() as u64;
                        Ok(report)
                    })
                    .map_err(|e| e.to_string());
                if let (Some(out), Ok(report)) = (out, &r) {
                    if let Err(e) =
                        write_atomic(&out.join(format!("{name}.json")), &report.to_json())
                    {
                        return (name, Err(e.to_string()));
                    }
                }
                (name, r)
            })
            .collect();
        let mut status = Status::Success;
        let summary: Vec<_> = results
            .iter()
            .map(|(name, r)| match r {
                Ok(report) => {
                    let c = report.comparison.as_ref().expect("compare fills the comparison");
                    if !c.agree && status == Status::Success {
                        status = Status::Negative;
                    }
                    json!({ "file": name, "agree": c.agree, "certified": c.certified, "saito": c.saito, "conflicts": c.conflicts })
                }
                Err(e) => {
                    status = Status::Failure;
                    json!({ "file": name, "error": e })
                }
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({ "files": summary }))?
        );
        Ok(status)
    }
}

fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Addition => "addition",
        Method::DivisionFlag => "division-flag",
        Method::Inductive => "inductive",
        Method::Stair => "stair",
        Method::Auto => "auto",
    }
}

/// Runs each method in order until one finds a certificate. Flag-based
/// methods run on the essential part.
fn run_methods(
    report: &mut Report,
    a: &Arrangement,
    methods: &[Method],
    budget: u64,
) -> Result<(), Box<dyn Error + Send + Sync>> {
    for &m in methods {
        let (target, on_essential) = match m {
            Method::DivisionFlag | Method::Stair if !a.is_essential() => {
                if report.essentialized.is_none() {
                    report.essentialized = Some(essential_record(a)?);
                    report.notes.push(format!(
                        "{} ran on the essential part of the input",
                        method_name(m)
                    ));
                }
                (
                    report.essentialized.as_ref().unwrap().arrangement.clone(),
                    true,
                )
            }
            _ => (a.clone(), report.essentialize),
        };
        let outcome = match m {
            Method::Addition => search_additional_filtration(&target, budget)?,
            Method::Inductive => search_inductively_free(&target, budget)?,
            Method::DivisionFlag => search_divisional_flag(&target)?,
            Method::Stair => stair(&target, report)?,
            Method::Auto => unreachable!("auto expands to concrete methods"),
        };
        let found = outcome.is_found();
        report.certificates.push(CertificateAttempt {
            method: method_name(m).into(),
            on_essential_part: on_essential,
            outcome,
        });
        if found {
            break;
        }
    }
    Ok(())
}

fn stair(
    a: &Arrangement,
    report: &mut Report,
) -> Result<SearchOutcome, Box<dyn Error + Send + Sync>> {
    let outcome = search_divisional_flag(a)?;
    let Some(FreenessCertificate {
        kind: CertificateKind::DivisionalFlag { flag },
        ..
    }) = outcome.certificate()
    else {
        return Ok(outcome);
    };
    let levels = stair_from_flag(a, flag)?;
    let diag = verify_stair_certificate(a, &levels)?;
    report.notes.extend(diag.notes.iter().cloned());
    match (diag.valid, diag.exponents) {
        (true, Some(exponents)) => Ok(SearchOutcome::Found {
            certificate: FreenessCertificate {
                kind: CertificateKind::Stair { levels },
                exponents,
            },
        }),
        _ => Err("stair built from a divisional flag failed verification".into()),
    }
}

/// Certificate searches against the Saito oracle, plus the addition and
/// deletion equivalences along every hyperplane.
fn compare(
    report: &mut Report,
    a: &Arrangement,
    budget: u64,
) -> Result<(), Box<dyn Error + Send + Sync>> {
    run_methods(
        report,
        a,
        &[Method::Addition, Method::DivisionFlag, Method::Inductive],
        budget,
    )?;
    let mut verdicts: HashMap<ArrangementKey, SaitoVerdict> = HashMap::new();
    let mut verdict = |x: &Arrangement| {
        verdicts
            .entry(x.key())
            .or_insert_with(|| freeness_verdict_default(x))
            .clone()
    };
    let v = verdict(a);
    let mut conflicts = Vec::new();
    let certified = report.certificates.iter().find_map(|c| {
        c.outcome
            .certificate()
            .map(|cert| (c.method.clone(), cert.clone()))
    });
    if let Some((method, cert)) = &certified {
        match &v {
            SaitoVerdict::Free { exponents, .. } => {
                let mut e = exponents.as_slice().to_vec();
                if report
                    .certificates
                    .iter()
                    .any(|c| c.on_essential_part && c.outcome.is_found())
                {
                    e.retain(|&x| x != 0);
                }
                if e != cert.exponents.as_slice() {
                    conflicts.push(format!(
                        "{method} exponents {} differ from Saito {exponents}",
                        cert.exponents
                    ));
                }
            }
            other => conflicts.push(format!(
                "{method} certificate but Saito verdict {}",
                other.label()
            )),
        }
    }
    let free = v.is_free();
    for h in 0..a.len() {
        let div = divisionality(a, h)?.is_divisional;
        let del = verdict(&a.deletion(h)?);
        if del.is_free() && free != div {
            conflicts.push(format!(
                "H{h}: deletion free, A free = {free}, divisional = {div}"
            ));
        }
        if free && del.is_free() != div {
            conflicts.push(format!(
                "H{h}: A free, deletion free = {}, divisional = {div}",
                del.is_free()
            ));
        }
    }
    report.comparison = Some(OracleComparison {
        agree: conflicts.is_empty(),
        certified: certified.map(|(m, _)| m),
        saito: v.label(),
        conflicts,
    });
    report.saito = Some(v);
    Ok(())
}

fn parse_ideal(
    rs: &arrangefree::rootsys::RootSystem,
    spec: &str,
) -> Result<LowerIdeal, Box<dyn Error + Send + Sync>> {
    Ok(match spec {
        "all" => LowerIdeal::all(rs),
        "empty" | "" => LowerIdeal::empty(),
        list => {
            let idx = list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| format!("bad root index {s:?} in --ideal"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            LowerIdeal::new(rs, idx)?
        }
    })
}

#[allow(clippy::too_many_arguments)]
pub fn build(
    family: FamilyArg,
    type_label: &str,
    rank: usize,
    m: i64,
    ideal: &str,
    sign: &str,
    essentialize: bool,
    output: Option<&Path>,
) -> Outcome {
    let t = RootType::parse_with_rank(type_label, rank)?;
    let rs = positive_roots(t, rank)?;
    let (a, desc) = match family {
        FamilyArg::Weyl => (
            weyl_arrangement(&rs),
            format!("Weyl arrangement of {t:?}{rank}"),
        ),
        FamilyArg::Shi => (
            build_family(&rs, Family::Shi, m)?,
            format!("coned Shi^{m} of {t:?}{rank}"),
        ),
        FamilyArg::Catalan => (
            build_family(&rs, Family::Catalan, m)?,
            format!("coned Catalan^{m} of {t:?}{rank}"),
        ),
        FamilyArg::IdealShi => {
            let ideal = parse_ideal(&rs, ideal)?;
            let s = if sign == "-" {
                IdealSign::Minus
            } else {
                IdealSign::Plus
            };
            (
                ideal_shi(&rs, m, &ideal, s)?,
                format!(
                    "coned ideal-Shi^{m} of {t:?}{rank}, sign {sign}, ideal {:?}",
                    ideal.roots()
                ),
            )
        }
    };
    let mut comments = vec![desc];
    let a = if essentialize {
        let (e, q) = essential_part(&a)?;
        comments.push(format!(
            "essential part; quotient basis rows {:?}",
            q.basis().rows()
        ));
        e
    } else {
        a
    };
    let text = write_arrangement(&a, &comments);
    match output {
        Some(p) => write_atomic(p, &text)?,
        None => print!("{text}"),
    }
    Ok(Status::Success)
}

pub fn ideals(type_label: &str, rank: usize) -> Outcome {
    let t = RootType::parse_with_rank(type_label, rank)?;
    let rs = positive_roots(t, rank)?;
    let ideals = enumerate_lower_ideals(&rs)?;
    let list: Vec<&[usize]> = ideals.iter().map(|i| i.roots()).collect();
    let out = json!({
        "type": format!("{t:?}"),
        "rank": rank,
        "positive_roots": rs.positive_roots,
        "simple_coords": rs.simple_coords,
        "count": list.len(),
        "ideals": list,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(Status::Success)
}
