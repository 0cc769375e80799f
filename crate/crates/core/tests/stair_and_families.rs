use arrangefree::exactla::Hyperplane;
use arrangefree::freecert::{search_divisional_flag, verify_stair_certificate, StairLevel};
use arrangefree::io::{parse_arrangement_str, write_arrangement};
use arrangefree::lattice::{char_poly, essential_part, Arrangement, CharPoly};
use arrangefree::rootsys::{
    build_family, enumerate_lower_ideals, ideal_shi, positive_roots, Family, IdealSign, LowerIdeal,
    RootType,
};

fn shi_a2() -> Arrangement {
    let rs = positive_roots(RootType::A, 2).unwrap();
    essential_part(&build_family(&rs, Family::Shi, 1).unwrap())
        .unwrap()
        .0
}

#[test]
fn shi_one_step_stair() {
    let a = shi_a2();
    let h = |v: &[i64]| Hyperplane::from_i64(v).unwrap();
    let shifted = vec![h(&[1, -1, -1]), h(&[0, 1, -1]), h(&[1, 0, -1])];
    let mut outcomes = Vec::new();
    for restrict in [h(&[0, 0, 1]), h(&[1, -1, 0])] {
        let diag = verify_stair_certificate(
            &a,
            &[StairLevel {
                deletions: shifted.clone(),
                restrict: restrict.clone(),
            }],
        )
        .unwrap();
        let lvl = &diag.levels[0];
        assert_eq!(
            diag.valid,
            lvl.division_holds && lvl.deletion_steps.iter().all(|&b| b)
        );
        outcomes.push((
            lvl.deletion_steps.clone(),
            lvl.division_holds,
            diag.exponents.map(|e| e.to_string()),
        ));
    }
    assert_eq!(
        outcomes,
        vec![
            (vec![true, true, true], true, Some("{1,3,3}".to_string())),
            (vec![true, true, true], true, Some("{1,3,3}".to_string())),
        ]
    );
}

#[test]
fn empty_stair_is_a_flag_check() {
    let b3 = Arrangement::from_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
    assert!(search_divisional_flag(&b3).unwrap().is_found());
    let diag = verify_stair_certificate(
        &b3,
        &[StairLevel {
            deletions: vec![],
            restrict: Hyperplane::from_i64(&[1, 0, 0]).unwrap(),
        }],
    )
    .unwrap();
    assert!(diag.valid);
    assert_eq!(diag.exponents.unwrap().to_string(), "{1,1,1}");
}

#[test]
fn ideal_shi_extremes() {
    for (t, n) in [(RootType::A, 5), (RootType::B, 6), (RootType::G2, 8)] {
        let rs = positive_roots(t, 2).unwrap();
        let ideals = enumerate_lower_ideals(&rs).unwrap();
        let first: &LowerIdeal = &ideals[0];
        assert_eq!(ideals.len(), n, "{t:?}");
        assert!(first.roots().is_empty());
        let shi = build_family(&rs, Family::Shi, 1).unwrap();
        let cat = build_family(&rs, Family::Catalan, 1).unwrap();
        assert_eq!(
            ideal_shi(&rs, 1, first, IdealSign::Minus).unwrap().key(),
            shi.key()
        );
        assert_eq!(
            ideal_shi(&rs, 1, &LowerIdeal::all(&rs), IdealSign::Plus)
                .unwrap()
                .key(),
            cat.key()
        );
    }
}

#[test]
fn catalan_chi_and_file_round_trip() {
    let rs = positive_roots(RootType::A, 2).unwrap();
    let cat = essential_part(&build_family(&rs, Family::Catalan, 1).unwrap())
        .unwrap()
        .0;
    assert_eq!(char_poly(&cat).unwrap().0, CharPoly::from_roots([1, 4, 5]));
    let text = write_arrangement(&cat, &[]);
    assert_eq!(parse_arrangement_str(&text).unwrap().arrangement, cat);
}

#[test]
fn higher_m_shi_exponents() {
    let rs = positive_roots(RootType::A, 2).unwrap();
    let shi2 = essential_part(&build_family(&rs, Family::Shi, 2).unwrap())
        .unwrap()
        .0;
    assert_eq!(char_poly(&shi2).unwrap().0, CharPoly::from_roots([1, 6, 6]));
}
