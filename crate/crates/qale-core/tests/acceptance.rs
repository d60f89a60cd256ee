//! Acceptance suite: the contract this toolkit ships against. One test per
//! criterion, each printing its own pass line (visible with --nocapture).

use std::path::PathBuf;
use std::time::Instant;

use num::BigRational;

use qale_core::assembly::{chi_l2, cone_l2, ConeRule, ConeVariant, WeightSpec};
use qale_core::exact::{CycMatrix, CycNumber};
use qale_core::group::{close_group, conjugacy_classes, eigen_multiplicities, GroupData};
use qale_core::groupfile::parse_group_file;
use qale_core::homology::{mv_check_su3, run_ladder_suite};
use qale_core::mckay::CohomTable;
use qale_core::oracle::{hardy_check, run_cm_suite, run_hardy_suite, HardyMode, RadialGrid};
use qale_core::pipeline::{analyze, cohomology_report, Model};
use qale_core::strata::{stratification_report, SpStatus};

fn groups_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../groups")
}

fn load(name: &str) -> qale_core::groupfile::GroupFile {
    parse_group_file(&groups_dir().join(name)).expect("bundled group file parses")
}

fn zeta(m: usize, e: i64) -> CycNumber {
    CycNumber::root_of_unity(m, e).unwrap()
}

/// Deterministic pool of small SU(3) groups built from diagonal cyclic and
/// signed-permutation blocks.
fn random_su3_groups() -> Vec<GroupData> {
    let mut out = Vec::new();
    // diagonal cyclic generators diag(z^a, z^b, z^-(a+b))
    let params = [
        (2, 1, 1),
        (3, 1, 1),
        (3, 1, 2),
        (4, 1, 1),
        (4, 1, 2),
        (5, 1, 1),
        (5, 1, 3),
        (6, 1, 1),
        (6, 1, 2),
        (7, 1, 2),
        (8, 1, 3),
        (9, 1, 2),
    ];
    for &(m, a, b) in &params {
        let g = CycMatrix::diagonal(vec![zeta(m, a), zeta(m, b), zeta(m, -(a + b))]).unwrap();
        out.push(close_group(&[g], 1000).unwrap());
    }
    // the cyclic rotation (even permutation) mixed with a diagonal
    let rot = CycMatrix::from_integers(3, 3, &[0, 0, 1, 1, 0, 0, 0, 1, 0]).unwrap();
    for &(m, a, b) in &params[..4] {
        let d = CycMatrix::diagonal(vec![zeta(m, a), zeta(m, b), zeta(m, -(a + b))]).unwrap();
        if let Ok(g) = close_group(&[d, rot.clone()], 1000) {
            out.push(g);
        }
    }
    out
}

/// Deterministic pool of small Sp(2) subgroups of SU(4): symplectic diagonal
/// blocks diag(z^a, z^-a, z^b, z^-b) and the block swap; filtered to
/// isolated stratifications with a verified symplectic form.
fn random_sp2_groups() -> Vec<GroupData> {
    let swap =
        CycMatrix::from_integers(4, 4, &[0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 0, 0]).unwrap();
    let mut out = Vec::new();
    let params = [
        (2, 1, 1, false),
        (3, 1, 1, false),
        (3, 1, 2, true),
        (4, 1, 1, true),
        (4, 1, 3, false),
        (5, 1, 2, true),
        (5, 2, 3, false),
        (6, 1, 5, true),
        (2, 1, 0, true),
        (4, 1, 2, true),
        (3, 1, 0, true),
        (6, 1, 1, true),
    ];
    for &(m, a, b, with_swap) in &params {
        let d =
            CycMatrix::diagonal(vec![zeta(m, a), zeta(m, -a), zeta(m, b), zeta(m, -b)]).unwrap();
        let gens = if with_swap {
            vec![d, swap.clone()]
        } else {
            vec![d]
        };
        let Ok(g) = close_group(&gens, 1000) else {
            continue;
        };
        let Ok(report) = stratification_report(&g) else {
            continue;
        };
        if report.isolated && report.sp_status == SpStatus::Yes {
            out.push(g);
        }
    }
    out
}

#[test]
fn criterion_1_joyce_935_l2_table() {
    let start = Instant::now();
    let analysis = analyze(load("joyce-9-3-5.json"), 10_000).unwrap();
    let report = cohomology_report(&analysis, Model::Auto).unwrap();
    let t = report.l2_table.as_ref().expect("su3 table");
    assert_eq!(t.get(2), 1);
    assert_eq!(t.get(4), 1);
    assert_eq!(t.total(), 2, "all other degrees vanish");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("criterion 1 (joyce 9.3.5: dim H^2 = dim H^4 = 1, < 1 s): PASS ({elapsed:?})");
}

#[test]
fn criterion_2_z2z2_l2_table_vanishes() {
    let analysis = analyze(load("z2z2.json"), 10_000).unwrap();
    let report = cohomology_report(&analysis, Model::Auto).unwrap();
    let t = report.l2_table.as_ref().expect("su3 table");
    assert!(t.is_zero(), "no L2 harmonic forms, got {t}");
    println!("criterion 2 (joyce 9.3.6: L2 table identically 0): PASS");
}

#[test]
fn criterion_3_hilb3_l2_table() {
    let analysis = analyze(load("s3-hilb3.json"), 10_000).unwrap();
    let report = cohomology_report(&analysis, Model::Auto).unwrap();
    assert_eq!(report.model, Model::Sp2);
    let t = report.l2_table.as_ref().expect("sp2 table");
    assert_eq!(t.get(4), 1);
    assert_eq!(t.total(), 1, "only degree 4 survives, got {t}");
    println!("criterion 3 (Hilb^3(C^2): L2 table {{4: 1}}): PASS");
}

#[test]
fn criterion_4_chi_equals_alternating_sum() {
    let mut checked = 0usize;
    let mut check = |g: &GroupData| {
        let start = Instant::now();
        let classes = conjugacy_classes(g).unwrap();
        let report = stratification_report(g).unwrap();
        let chi = chi_l2(&classes);
        let table = match g.n() {
            3 => qale_core::assembly::su3_l2(&classes, &report, 3).unwrap(),
            4 => qale_core::assembly::sp2_l2(&classes, &report, 4, false).unwrap(),
            other => panic!("unexpected dimension {other}"),
        };
        let alternating: i64 = table.euler_characteristic();
        assert_eq!(
            alternating as u64,
            chi,
            "chi mismatch for a group of order {}",
            g.len()
        );
        let elapsed = start.elapsed();
        assert!(elapsed.as_secs_f64() < 5.0, "group took {elapsed:?}");
        checked += 1;
    };

    for name in ["joyce-9-3-5.json", "z2z2.json", "free-z5.json"] {
        let a = analyze(load(name), 10_000).unwrap();
        check(&a.group);
    }
    for name in ["s3-hilb3.json", "hilb2-a1.json"] {
        let a = analyze(load(name), 10_000).unwrap();
        check(&a.group);
    }
    let su3 = random_su3_groups();
    let sp2 = random_sp2_groups();
    let random_count = su3.len() + sp2.len();
    assert!(
        random_count >= 20,
        "need at least 20 randomized groups, built {random_count}"
    );
    for g in su3.iter().chain(sp2.iter()) {
        check(g);
    }
    println!(
        "criterion 4 (chi_L2 = fixed-point-free class count on {checked} groups, {random_count} randomized): PASS"
    );
}

#[test]
fn criterion_5_age_identity_everywhere() {
    let mut groups: Vec<GroupData> = Vec::new();
    for name in [
        "joyce-9-3-5.json",
        "z2z2.json",
        "free-z5.json",
        "s3-hilb3.json",
        "hilb2-a1.json",
    ] {
        groups.push(analyze(load(name), 10_000).unwrap().group);
    }
    groups.extend(random_su3_groups());
    groups.extend(random_sp2_groups());
    let mut elements = 0usize;
    for g in &groups {
        for i in 0..g.len() {
            let mult = eigen_multiplicities(g, i).unwrap();
            let total: usize = mult.values().sum();
            assert_eq!(total, g.n(), "multiplicities of element {i} sum to n");
            // reconstruct the trace exactly
            let r = g.element_order(i);
            let work = num::integer::lcm(g.order_m(), r);
            let mut recon = CycNumber::zero(work);
            for (&j, &m) in &mult {
                let w = zeta(r, j as i64).promote_to_lcm(work);
                let count = CycNumber::from_integer(work, m as i64);
                recon = &recon + &(&w * &count);
            }
            let trace = g.element(i).trace().promote_to_lcm(work);
            assert_eq!(recon, trace, "trace reconstruction for element {i}");
            // the age pairing identity
            let age = qale_core::group::age(g, i).unwrap();
            let age_inv = qale_core::group::age(g, g.inv(i)).unwrap();
            let fixed = mult.get(&0).copied().unwrap_or(0);
            assert_eq!(age + age_inv, g.n() - fixed, "age identity for element {i}");
            elements += 1;
        }
    }
    println!("criterion 5 (age identity and exact DFT spectra on {elements} elements): PASS");
}

/// Independent re-derivation of the cone decision table with plain integer
/// arithmetic: weights are fed in as multiples of 1/2 so the lexicographic
/// comparison is exact in i64.
fn cone_oracle(
    k: i64,
    d: i64,
    a2: i64, // 2a
    b2: i64, // 2b
    betti: &CohomTable,
    relative: bool,
) -> u64 {
    // compare (2k, s2) with (d + 2a, b2) lexicographically, s2 = -1 or 1
    let lhs = 2 * k;
    let rhs = d + a2;
    let s2 = if relative { 1 } else { -1 };
    let cmp = if lhs != rhs {
        lhs.cmp(&rhs)
    } else {
        s2.cmp(&b2)
    };
    if relative {
        match cmp {
            std::cmp::Ordering::Greater => 0,
            std::cmp::Ordering::Less => betti.get_signed(k - 1),
            std::cmp::Ordering::Equal => 0,
        }
    } else {
        match cmp {
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Greater => betti.get(k as usize),
            std::cmp::Ordering::Equal => 0,
        }
    }
}

#[test]
fn criterion_6_cone_decision_table() {
    let half = |n: i64| BigRational::new(n.into(), 2.into());
    let mut points = 0usize;
    let mut rules_hit = std::collections::BTreeSet::new();
    for d in [2usize, 4, 6] {
        // a palindromic link table, so the same table serves the duality check
        let mut link = CohomTable::new("V", d - 1);
        for j in 0..d {
            link.set(j, 1 + (j.min(d - 1 - j) as u64 % 3));
        }
        for k in 0..=(d + 1) {
            for a2 in [-4i64, -2, -1, 0, 1, 2, 4] {
                for b2 in [-3i64, -1, 0, 1, 3] {
                    let w = WeightSpec::new(half(a2), half(b2));
                    for relative in [false, true] {
                        let variant = if relative {
                            ConeVariant::Relative
                        } else {
                            ConeVariant::Absolute
                        };
                        let got = cone_l2(k, d, &w, &link, variant);
                        let expect = cone_oracle(k as i64, d as i64, a2, b2, &link, relative);
                        assert_eq!(
                            got.value, expect,
                            "k={k} d={d} 2a={a2} 2b={b2} relative={relative}"
                        );
                        rules_hit.insert(format!("{:?}", got.rule));
                        points += 1;
                    }
                }
            }
        }
        // duality: absolute (k, a, b) = relative (d-k, -a, -b) on a
        // palindromic link
        for k in 0..=d {
            for a2 in [-2i64, -1, 0, 1, 2] {
                for b2 in [-1i64, 0, 1] {
                    let w = WeightSpec::new(half(a2), half(b2));
                    let dual = WeightSpec::new(half(-a2), half(-b2));
                    let abs = cone_l2(k, d, &w, &link, ConeVariant::Absolute);
                    let rel = cone_l2(d - k, d, &dual, &link, ConeVariant::Relative);
                    assert_eq!(abs.value, rel.value, "duality at k={k} d={d} {a2}/{b2}");
                }
            }
        }
    }
    assert!(points >= 200, "swept only {points} points");
    for rule in ["LexBelow", "LexAbove", "EdgeProof", "EdgeDual"] {
        assert!(rules_hit.contains(rule), "branch {rule} never fired");
    }
    println!(
        "criterion 6 (cone decision table verified on {points} points, duality included): PASS"
    );
}

#[test]
fn criterion_7_thousand_ladders() {
    let start = Instant::now();
    let result = run_ladder_suite(2024, 1000, 4);
    let elapsed = start.elapsed();
    assert_eq!(result.passed, 1000, "ladder suite: {result}");
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("criterion 7 (ladder lemma 1000/1000 in {elapsed:?}): PASS");
}

#[test]
fn criterion_8_mayer_vietoris_feasibility() {
    let mut count = 0usize;
    for name in ["joyce-9-3-5.json", "z2z2.json", "free-z5.json"] {
        let a = analyze(load(name), 10_000).unwrap();
        assert_eq!(mv_check_su3(&a.group, &a.report), Ok(true), "{name}");
        count += 1;
    }
    for g in random_su3_groups() {
        let report = stratification_report(&g).unwrap();
        assert_eq!(
            mv_check_su3(&g, &report),
            Ok(true),
            "group of order {}",
            g.len()
        );
        count += 1;
    }
    println!("criterion 8 (Mayer-Vietoris feasibility on {count} SU(3) groups): PASS");
}

#[test]
fn criterion_9_hardy_and_cone_operators() {
    // closed form: rho = t^3, phi = t^-2 gives lhs = 1/2, rhs = 2
    let grid = RadialGrid::geometric(1e3, 8192);
    let rho: Vec<f64> = grid.points().iter().map(|&t| t * t * t).collect();
    let phi: Vec<f64> = grid.points().iter().map(|&t| t.powi(-2)).collect();
    let out = hardy_check(&grid, &rho, &phi, HardyMode::Finite).unwrap();
    assert!((out.lhs - 0.5).abs() < 1e-4, "lhs = {}", out.lhs);
    assert!((out.rhs - 2.0).abs() < 1e-4, "rhs = {}", out.rhs);
    assert!(out.ok);

    let hardy = run_hardy_suite(20_26, 100, 2048, 1e3);
    assert_eq!(hardy.passed, hardy.total);
    assert_eq!(hardy.total, 200, "100 randomized pairs per mode");

    let cm = run_cm_suite(1e3);
    assert_eq!(cm.total, 12);
    assert_eq!(cm.passed, 12, "cone operator norms must stay bounded");
    println!(
        "criterion 9 (hardy closed form + {} randomized pairs, cm 12/12): PASS",
        hardy.total
    );
}

#[test]
fn cone_rule_reporting_examples() {
    // the CLI-facing rule strings ride on these variants
    let w = WeightSpec::new(
        BigRational::from_integer(0.into()),
        BigRational::from_integer(0.into()),
    );
    let link = CohomTable::from_pairs("V", 3, &[(3, 1)]);
    assert_eq!(
        cone_l2(1, 4, &w, &link, ConeVariant::Absolute).rule,
        ConeRule::LexBelow
    );
    assert_eq!(
        cone_l2(3, 4, &w, &link, ConeVariant::Absolute).rule,
        ConeRule::LexAbove
    );
}
