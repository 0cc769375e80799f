//! End-to-end acceptance checks. Each test prints one status line.

use std::collections::HashMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use arrangefree::corpus::{boolean, braid, generic4, standard_corpus};
use arrangefree::freecert::{
    divisionality, exponents_from_charpoly, search_additional_filtration, search_divisional_flag,
    search_inductively_free, CertificateKind, Exponents, FreenessCertificate, DEFAULT_BUDGET,
};
use arrangefree::lattice::{
    char_poly, char_poly_whitney, essential_part, restriction, Arrangement, ArrangementKey,
    CharPoly,
};
use arrangefree::rootsys::{
    build_family, enumerate_lower_ideals, ideal_shi, positive_roots, Family, IdealSign, RootType,
};
use arrangefree::saito::{
    dh_decomposition_check, freeness_verdict_default, NotFreeReason, SaitoVerdict,
};

const CORPUS_BUDGET: Duration = Duration::from_secs(60);
const BRAID_BUDGET: Duration = Duration::from_secs(120);
const FAMILY_BUDGET: Duration = Duration::from_secs(300);
const IDEAL_BUDGET: Duration = Duration::from_secs(900);

fn report(id: u8, what: &str, ok: bool, detail: String) {
    println!(
        "[{id:02} {}] {what}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
}

fn verdicts() -> &'static HashMap<ArrangementKey, SaitoVerdict> {
    static V: OnceLock<HashMap<ArrangementKey, SaitoVerdict>> = OnceLock::new();
    V.get_or_init(|| {
        let mut out = HashMap::new();
        for a in standard_corpus() {
            let mut todo = vec![a.clone()];
            todo.extend((0..a.len()).map(|h| a.deletion(h).unwrap()));
            for x in todo {
                out.entry(x.key())
                    .or_insert_with(|| freeness_verdict_default(&x));
            }
        }
        out
    })
}

fn verdict(a: &Arrangement) -> &'static SaitoVerdict {
    &verdicts()[&a.key()]
}

#[test]
fn chi_agrees_with_whitney_oracle() {
    let start = Instant::now();
    let corpus = standard_corpus();
    let mismatches = corpus
        .iter()
        .filter(|a| char_poly(a).unwrap().0 != char_poly_whitney(a).unwrap())
        .count();
    let t = start.elapsed();
    let ok = mismatches == 0 && t < CORPUS_BUDGET;
    report(
        1,
        "chi equals Whitney oracle on 200 random arrangements",
        ok,
        format!("{mismatches} mismatches, {t:.2?} (< 60 s)"),
    );
    assert!(ok);
}

#[test]
fn deletion_restriction_identity() {
    let mut pairs = 0;
    let mut bad = 0;
    for a in standard_corpus() {
        let chi = char_poly(&a).unwrap().0;
        for h in 0..a.len() {
            let del = char_poly(&a.deletion(h).unwrap()).unwrap().0;
            let res = char_poly(&restriction(&a, h).unwrap().0).unwrap().0;
            pairs += 1;
            if chi != del.sub(&res) {
                bad += 1;
            }
        }
    }
    report(
        2,
        "deletion-restriction identity",
        bad == 0,
        format!("{pairs} pairs, {bad} failures"),
    );
    assert_eq!(bad, 0);
}

struct BraidRun {
    certificates: Vec<(Arrangement, FreenessCertificate)>,
    failures: Vec<String>,
    elapsed: Duration,
}

fn braid_run() -> &'static BraidRun {
    static R: OnceLock<BraidRun> = OnceLock::new();
    R.get_or_init(|| {
        let start = Instant::now();
        let mut failures = Vec::new();
        let mut certificates = Vec::new();
        for ell in 3..=5 {
            let a = braid(ell);
            let expected = CharPoly::from_roots(0..ell as i64);
            let chi = char_poly(&a).unwrap().0;
            if chi != expected {
                failures.push(format!("braid{ell}: chi = {chi}"));
            }
            if ell <= 4 {
                if char_poly_whitney(&a).unwrap() != expected {
                    failures.push(format!("braid{ell}: Whitney oracle disagrees"));
                }
                match freeness_verdict_default(&a) {
                    SaitoVerdict::Free { exponents, basis } => {
                        if exponents != Exponents::new((0..ell as u64).collect()) {
                            failures.push(format!("braid{ell}: exponents {exponents}"));
                        }
                        certificates.push((
                            a.clone(),
                            FreenessCertificate {
                                kind: CertificateKind::SaitoBasis { derivations: basis },
                                exponents,
                            },
                        ));
                    }
                    v => failures.push(format!("braid{ell}: verdict {}", v.label())),
                }
            }
            if let Some(c) = search_additional_filtration(&a, DEFAULT_BUDGET)
                .unwrap()
                .certificate()
            {
                certificates.push((a.clone(), c.clone()));
            }
        }
        BraidRun {
            certificates,
            failures,
            elapsed: start.elapsed(),
        }
    })
}

#[test]
fn braid_arrangements() {
    let r = braid_run();
    let ok = r.failures.is_empty() && r.elapsed < BRAID_BUDGET;
    report(
        3,
        "braid chi and Saito exponents for l = 3, 4, 5",
        ok,
        format!("{:?}, {:.2?} (< 120 s)", r.failures, r.elapsed),
    );
    assert!(ok);
}

#[test]
fn generic_negative_control() {
    let a = generic4();
    let mut failures = Vec::new();
    let chi = char_poly(&a).unwrap().0;
    if chi != CharPoly::from_i64(&[-3, 6, -4, 1]) || char_poly_whitney(&a).unwrap() != chi {
        failures.push(format!("chi = {chi}"));
    }
    if freeness_verdict_default(&a)
        != (SaitoVerdict::NotFree {
            reason: NotFreeReason::ChiNotIntegerRooted,
        })
    {
        failures.push("verdict".into());
    }
    for h in 0..a.len() {
        if divisionality(&a, h).unwrap().is_divisional {
            failures.push(format!("divisional along {h}"));
        }
    }
    if search_additional_filtration(&a, DEFAULT_BUDGET)
        .unwrap()
        .is_found()
        || search_divisional_flag(&a).unwrap().is_found()
        || search_inductively_free(&a, DEFAULT_BUDGET)
            .unwrap()
            .is_found()
    {
        failures.push("a search succeeded".into());
    }
    report(
        4,
        "generic 4 planes are rejected everywhere",
        failures.is_empty(),
        format!("{failures:?}"),
    );
    assert!(failures.is_empty());
}

#[test]
fn addition_equivalence_on_corpus() {
    let mut checked = 0;
    let mut exceptions = Vec::new();
    for a in standard_corpus() {
        for h in 0..a.len() {
            let del = a.deletion(h).unwrap();
            if !verdict(&del).is_free() {
                continue;
            }
            checked += 1;
            let free = verdict(&a).is_free();
            let div = divisionality(&a, h).unwrap().is_divisional;
            if free != div {
                exceptions.push(format!(
                    "{} along {h}: free={free} divisional={div}",
                    a.digest()
                ));
            }
        }
    }
    report(
        5,
        "free deletion implies (free iff divisional)",
        exceptions.is_empty() && checked > 0,
        format!(
            "{checked} pairs, {} exceptions {exceptions:?}",
            exceptions.len()
        ),
    );
    assert!(exceptions.is_empty() && checked > 0);
}

#[test]
fn deletion_equivalence_on_corpus() {
    let mut checked = 0;
    let mut exceptions = Vec::new();
    for a in standard_corpus() {
        if !verdict(&a).is_free() {
            continue;
        }
        for h in 0..a.len() {
            checked += 1;
            let del_free = verdict(&a.deletion(h).unwrap()).is_free();
            let div = divisionality(&a, h).unwrap().is_divisional;
            if del_free != div {
                exceptions.push(format!(
                    "{} along {h}: deletion free={del_free} divisional={div}",
                    a.digest()
                ));
            }
        }
    }
    report(
        6,
        "free A gives (deletion free iff divisional)",
        exceptions.is_empty() && checked > 0,
        format!(
            "{checked} pairs, {} exceptions {exceptions:?}",
            exceptions.len()
        ),
    );
    assert!(exceptions.is_empty() && checked > 0);
}

#[test]
fn exponents_are_chi_roots() {
    let mut free = 0;
    let mut unknown = 0;
    let mut bad = 0;
    let mut arrs: Vec<Arrangement> = Vec::new();
    for a in standard_corpus() {
        arrs.extend((0..a.len()).map(|h| a.deletion(h).unwrap()));
        arrs.push(a);
    }
    for a in &arrs {
        match verdict(a) {
            SaitoVerdict::Free { exponents, .. } => {
                free += 1;
                let roots = exponents_from_charpoly(&char_poly(a).unwrap().0).ok();
                if roots.as_ref() != Some(exponents) {
                    bad += 1;
                }
            }
            SaitoVerdict::Unknown { .. } => unknown += 1,
            SaitoVerdict::NotFree { .. } => {}
        }
    }
    report(
        7,
        "Free exponents equal the roots of chi",
        bad == 0,
        format!("{free} free verdicts, {bad} mismatches, {unknown} unknown"),
    );
    assert_eq!(bad, 0);
}

struct FamilyRun {
    name: &'static str,
    arrangement: Arrangement,
    certificate: Option<FreenessCertificate>,
    saito: Option<Exponents>,
    elapsed: Duration,
}

fn families() -> &'static Vec<FamilyRun> {
    static R: OnceLock<Vec<FamilyRun>> = OnceLock::new();
    R.get_or_init(|| {
        let cases = [
            ("Shi(A2)", RootType::A, 2, Family::Shi),
            ("Catalan(A2)", RootType::A, 2, Family::Catalan),
            ("Shi(B2)", RootType::B, 2, Family::Shi),
        ];
        cases
            .into_iter()
            .map(|(name, t, r, f)| {
                let start = Instant::now();
                let rs = positive_roots(t, r).unwrap();
                let coned = build_family(&rs, f, 1).unwrap();
                let arrangement = essential_part(&coned).unwrap().0;
                let certificate = search_additional_filtration(&arrangement, DEFAULT_BUDGET)
                    .unwrap()
                    .certificate()
                    .cloned();
                let saito = match freeness_verdict_default(&arrangement) {
                    SaitoVerdict::Free { exponents, .. } => Some(exponents),
                    _ => None,
                };
                FamilyRun {
                    name,
                    arrangement,
                    certificate,
                    saito,
                    elapsed: start.elapsed(),
                }
            })
            .collect()
    })
}

#[test]
fn shi_and_catalan_reproduction() {
    let expected = [vec![1, 3, 3], vec![1, 4, 5], vec![1, 4, 4]];
    let mut all_ok = true;
    for (run, exp) in families().iter().zip(expected) {
        let exp = Exponents::new(exp);
        let roots = exponents_from_charpoly(&char_poly(&run.arrangement).unwrap().0).ok();
        let cert_exp = run.certificate.as_ref().map(|c| c.exponents.clone());
        let ok = cert_exp.as_ref() == Some(&exp)
            && run.saito.as_ref() == Some(&exp)
            && roots.as_ref() == Some(&exp)
            && run.elapsed < FAMILY_BUDGET;
        all_ok &= ok;
        report(
            8,
            &format!("{} additional filtration", run.name),
            ok,
            format!(
                "certificate {}, Saito {}, expected {exp}, {:.2?} (< 300 s)",
                cert_exp.map_or("none".into(), |e| e.to_string()),
                run.saito.as_ref().map_or("none".into(), |e| e.to_string()),
                run.elapsed
            ),
        );
    }
    assert!(all_ok);
}

struct IdealRun {
    cases: Vec<(String, Arrangement, Option<FreenessCertificate>, bool)>,
    elapsed: Duration,
}

fn ideal_runs() -> &'static IdealRun {
    static R: OnceLock<IdealRun> = OnceLock::new();
    R.get_or_init(|| {
        let start = Instant::now();
        let mut cases = Vec::new();
        for t in [RootType::A, RootType::B] {
            let rs = positive_roots(t, 2).unwrap();
            for ideal in enumerate_lower_ideals(&rs).unwrap() {
                for sign in [IdealSign::Plus, IdealSign::Minus] {
                    let a = ideal_shi(&rs, 1, &ideal, sign).unwrap();
                    let cert = search_additional_filtration(&a, DEFAULT_BUDGET)
                        .unwrap()
                        .certificate()
                        .cloned();
                    let saito = freeness_verdict_default(&a).is_free();
                    cases.push((
                        format!("{t:?}2 {sign:?} {:?}", ideal.roots()),
                        a,
                        cert,
                        saito,
                    ));
                }
            }
        }
        IdealRun {
            cases,
            elapsed: start.elapsed(),
        }
    })
}

#[test]
fn ideal_shi_arrangements_are_additionally_free() {
    let r = ideal_runs();
    let failed: Vec<&str> = r
        .cases
        .iter()
        .filter(|(_, _, c, s)| c.is_none() || !s)
        .map(|(n, ..)| n.as_str())
        .collect();
    let ok = failed.is_empty() && r.cases.len() == 22 && r.elapsed < IDEAL_BUDGET;
    report(
        9,
        "ideal-Shi arrangements of A2 and B2 admit additional filtrations",
        ok,
        format!(
            "{} cases, failed {failed:?}, {:.2?} (< 900 s)",
            r.cases.len(),
            r.elapsed
        ),
    );
    assert!(ok);
}

#[test]
fn dh_decomposition() {
    let mut arrs: Vec<(String, Arrangement)> = (1..=3)
        .map(|l| (format!("boolean{l}"), boolean(l)))
        .collect();
    arrs.push(("braid3".into(), braid(3)));
    arrs.extend(
        standard_corpus()
            .into_iter()
            .take(20)
            .enumerate()
            .map(|(i, a)| (format!("corpus{i}"), a)),
    );
    let mut failed = Vec::new();
    let mut checks = 0;
    for (name, a) in &arrs {
        for h in 0..a.len() {
            checks += 1;
            if !dh_decomposition_check(a, h, a.len()).unwrap() {
                failed.push(format!("{name} along {h}"));
            }
        }
    }
    report(
        10,
        "D(A) = S theta_E + D_H(A) in each degree",
        failed.is_empty(),
        format!("{checks} checks, failed {failed:?}"),
    );
    assert!(failed.is_empty());
}

#[test]
fn certificates_survive_serialization() {
    let mut all: Vec<(&Arrangement, &FreenessCertificate)> = Vec::new();
    all.extend(braid_run().certificates.iter().map(|(a, c)| (a, c)));
    all.extend(
        families()
            .iter()
            .filter_map(|r| r.certificate.as_ref().map(|c| (&r.arrangement, c))),
    );
    all.extend(
        ideal_runs()
            .cases
            .iter()
            .filter_map(|(_, a, c, _)| c.as_ref().map(|c| (a, c))),
    );
    let mut bad = Vec::new();
    for (a, c) in &all {
        let text = serde_json::to_string(c).unwrap();
        let back: FreenessCertificate = serde_json::from_str(&text).unwrap();
        if &back != *c || back.verify(a).as_ref() != Ok(&c.exponents) {
            bad.push(format!("{} {}", a.digest(), c.kind.name()));
        }
    }
    let ok = bad.is_empty() && all.len() >= 25;
    report(
        11,
        "certificates replay after a JSON round trip",
        ok,
        format!("{} certificates, failed {bad:?}", all.len()),
    );
    assert!(ok);
}
