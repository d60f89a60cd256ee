//! The L2 cohomology formulas of the rank-2 QALE setting: end and boundary
//! tables of O = X \ K, the crepant SU(3) / Sp(2) tables, the L2 Euler
//! characteristic, the weighted-cone decision table, the conical-end
//! selector, weighted extremes and the Kunneth convolution.

use num::BigRational;
use serde::Serialize;

use crate::error::{QaleError, Result};
use crate::group::ClassDatum;
use crate::mckay::{ale_invariant_betti, CohomTable};
use crate::strata::{SpStatus, StratificationReport};

/// Where an orbit's invariant table came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableSource {
    Heuristic,
    /// user-supplied table; the heuristic value is kept for the audit trail
    Override {
        heuristic: CohomTable,
    },
}

/// Per-orbit end data: the dimensions of the stratum and its transverse ALE
/// piece Y_i together with the (B_i-invariant) cohomology of Y_i.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitEnd {
    pub n_i: usize,
    pub m_i: usize,
    pub invariant_table: CohomTable,
    pub plain_table: CohomTable,
    pub source: TableSource,
}

/// The geometry at infinity: one entry per G-orbit of strata, plus the
/// ambient complex dimension. Built only from validated isolated
/// stratifications unless a caller fills the fields by hand.
#[derive(Debug, Clone, Serialize)]
pub struct EndGeometry {
    pub n: usize,
    pub isolated: bool,
    /// poset length of the underlying stratification, carried for reporting
    pub length: usize,
    pub orbits: Vec<OrbitEnd>,
}

impl EndGeometry {
    /// Assemble from a stratification, taking invariant tables from the
    /// orbit-counting heuristic with optional per-orbit overrides (degrees
    /// in the override map are cohomological degrees of Y_i).
    pub fn from_stratification(
        group: &crate::group::GroupData,
        report: &StratificationReport,
        overrides: &std::collections::BTreeMap<usize, std::collections::BTreeMap<usize, u64>>,
    ) -> Result<EndGeometry> {
        let n = group.n();
        let mut orbits = Vec::new();
        for (oi, orbit) in report.orbits.iter().enumerate() {
            let rep = &report.strata[orbit[0]];
            let tables = ale_invariant_betti(rep, group)?;
            let (invariant_table, source) = match overrides.get(&oi) {
                Some(user) => {
                    let mut t = CohomTable::new("H^*(Y_i)^B", 2 * rep.m_i);
                    for (&k, &v) in user {
                        t.set(k, v);
                    }
                    (
                        t,
                        TableSource::Override {
                            heuristic: tables.invariant.clone(),
                        },
                    )
                }
                None => (tables.invariant.clone(), TableSource::Heuristic),
            };
            orbits.push(OrbitEnd {
                n_i: rep.n_i,
                m_i: rep.m_i,
                invariant_table,
                plain_table: tables.plain,
                source,
            });
        }
        Ok(EndGeometry {
            n,
            isolated: report.isolated,
            length: report.length,
            orbits,
        })
    }

    fn require_isolated(&self) -> Result<()> {
        if !self.isolated {
            return Err(QaleError::NotIsolated {
                length: self.length,
            });
        }
        Ok(())
    }
}

/// Reduced L2 cohomology of the end O = X \ K:
/// for k in [1, 2n-2], the sum over orbits with n_i > 1 of
/// H^{k-2n_i+1}(Y_i)^{B_i} guarded by k > 2n_i - 1, and a single line in
/// degree 2n-1. Degree 0 is out of range and reported as 0.
pub fn end_l2(e: &EndGeometry) -> Result<CohomTable> {
    e.require_isolated()?;
    let top = 2 * e.n - 1;
    // degree 0 is outside the formula's range; the label records that
    let mut t = CohomTable::new(format!("L2 H^*(O), degrees 1..{top}"), top);
    for k in 1..=(2 * e.n - 2) {
        let mut acc = 0u64;
        let mut unguarded = 0u64;
        for o in &e.orbits {
            if o.n_i <= 1 {
                continue;
            }
            let shift = k as i64 - 2 * o.n_i as i64 + 1;
            // guarded form: k > 2 n_i - 1
            if shift > 0 {
                acc += o.invariant_table.get_signed(shift);
            }
            // unguarded form with the ALE L2 convention H^0 -> 0
            if shift != 0 {
                unguarded += o.invariant_table.get_signed(shift);
            }
        }
        if acc != unguarded {
            return Err(QaleError::InternalInconsistency(
                "guarded and unguarded end sums disagree".into(),
            ));
        }
        t.set(k, acc);
    }
    t.set(top, 1);
    Ok(t)
}

/// Weighted (L2_w) cohomology of the end in degrees k-1 in [0, 2n-2]:
/// sum over orbits of H^{k-2n_i}(Y_i)^{B_i} for k > 2n_i, plus the n_i = 1
/// branch H^{k-1}(Y_i)^{B_i} for k > 1.
pub fn end_l2_weighted(e: &EndGeometry) -> Result<CohomTable> {
    e.require_isolated()?;
    let top = 2 * e.n - 2;
    let mut t = CohomTable::new(format!("L2_w H^*(O), degrees 0..{top}"), top);
    for k in 1..=(2 * e.n - 1) {
        let mut acc = 0u64;
        let mut unguarded = 0u64;
        for o in &e.orbits {
            let shift = k as i64 - 2 * o.n_i as i64;
            if k > 2 * o.n_i {
                acc += o.invariant_table.get_signed(shift);
            }
            // unguarded form, with the ALE L2 convention H^0 -> 0
            if shift != 0 {
                unguarded += o.invariant_table.get_signed(shift);
            }
            if o.n_i == 1 && k > 1 {
                acc += o.invariant_table.get_signed(k as i64 - 1);
            }
            if o.n_i == 1 && k as i64 - 1 != 0 {
                unguarded += o.invariant_table.get_signed(k as i64 - 1);
            }
        }
        if acc != unguarded {
            return Err(QaleError::InternalInconsistency(
                "guarded and unguarded weighted end sums disagree".into(),
            ));
        }
        t.set(k - 1, acc);
    }
    Ok(t)
}

/// Ordinary cohomology of the boundary dK (equal to that of O):
/// for k in [1, 2n-2] the sum over orbits of H^k(Y_i)^{B_i} plus the guarded
/// H^{k-2n_i+1}(Y_i)^{B_i}; degree 0 is 1 (dK connected, an assumption the
/// report records) and degree 2n-1 is 1.
pub fn boundary_betti(e: &EndGeometry) -> Result<CohomTable> {
    e.require_isolated()?;
    let top = 2 * e.n - 1;
    let mut t = CohomTable::new("H^*(dK)", top);
    t.set(0, 1);
    for k in 1..=(2 * e.n - 2) {
        let mut acc = 0u64;
        for o in &e.orbits {
            acc += o.invariant_table.get(k);
            let shift = k as i64 - 2 * o.n_i as i64 + 1;
            if k as i64 > 2 * o.n_i as i64 - 1 {
                acc += o.invariant_table.get_signed(shift);
            }
        }
        t.set(k, acc);
    }
    t.set(top, 1);
    Ok(t)
}

/// L2 cohomology of a crepant QALE resolution of C^3/G:
/// dim in degrees 2 and 4 is the number of age-2 classes, all else zero.
pub fn su3_l2(
    classes: &[ClassDatum],
    report: &StratificationReport,
    n: usize,
) -> Result<CohomTable> {
    if n != 3 {
        return Err(QaleError::WrongDimension {
            expected: 3,
            actual: n,
        });
    }
    if !report.isolated {
        return Err(QaleError::NotIsolated {
            length: report.length,
        });
    }
    let age2 = classes.iter().filter(|c| c.age == 2).count() as u64;
    let mut t = CohomTable::new("L2 H^*(X)", 6);
    t.set(2, age2);
    t.set(4, age2);
    Ok(t)
}

/// L2 cohomology of a crepant QALE resolution of C^4/G for G in Sp(2):
/// degrees 2 and 6 count age-3 classes, degree 4 counts age-2 classes.
pub fn sp2_l2(
    classes: &[ClassDatum],
    report: &StratificationReport,
    n: usize,
    force_sp: bool,
) -> Result<CohomTable> {
    if n != 4 {
        return Err(QaleError::WrongDimension {
            expected: 4,
            actual: n,
        });
    }
    if report.sp_status != SpStatus::Yes && !force_sp {
        return Err(QaleError::NotSymplectic {
            status: report.sp_status.to_string(),
        });
    }
    if !report.isolated {
        return Err(QaleError::NotIsolated {
            length: report.length,
        });
    }
    let age3 = classes.iter().filter(|c| c.age == 3).count() as u64;
    let age2 = classes.iter().filter(|c| c.age == 2).count() as u64;
    let mut t = CohomTable::new("L2 H^*(X)", 8);
    t.set(2, age3);
    t.set(4, age2);
    t.set(6, age3);
    Ok(t)
}

/// The L2 Euler characteristic: the number of fixed-point-free conjugacy
/// classes.
pub fn chi_l2(classes: &[ClassDatum]) -> u64 {
    classes.iter().filter(|c| c.fixed_dim == 0).count() as u64
}

/// Radial weight r^{2a} (1 + log r)^{2b}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSpec {
    pub a: BigRational,
    pub b: BigRational,
}

impl WeightSpec {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        WeightSpec { a, b }
    }

    pub fn from_ints(a: (i64, i64), b: (i64, i64)) -> Self {
        WeightSpec {
            a: BigRational::new(a.0.into(), a.1.into()),
            b: BigRational::new(b.0.into(), b.1.into()),
        }
    }

    /// The unweighted measure, (a, b) = (0, 0).
    pub fn flat() -> Self {
        Self::from_ints((0, 1), (0, 1))
    }

    /// The parabolic weight r^-2, i.e. (a, b) = (-1, 0).
    pub fn parabolic() -> Self {
        Self::from_ints((-1, 1), (0, 1))
    }

    /// The log-parabolic weight r^-2 (1 + log r)^-2, i.e. (a, b) = (-1, -1).
    pub fn parabolic_log() -> Self {
        Self::from_ints((-1, 1), (-1, 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConeVariant {
    Absolute,
    Relative,
}

/// Which branch of the cone decision table fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConeRule {
    /// lexicographically below the threshold: vanishing
    LexBelow,
    /// lexicographically above: the link cohomology survives
    LexAbove,
    /// the k = d/2 + a edge with b in [-1/2, 1/2], settled by the proof
    EdgeProof,
    /// the relative edge, settled by Hodge-star duality with the absolute one
    EdgeDual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConeDecision {
    pub value: u64,
    pub rule: ConeRule,
}

/// Dimension of the reduced weighted L2 cohomology of the cone C_1(V) in
/// degree k, by the lexicographic decision table. `betti_v` is the table of
/// the compact link V; d is the real dimension of the cone.
pub fn cone_l2(
    k: usize,
    d: usize,
    w: &WeightSpec,
    betti_v: &CohomTable,
    variant: ConeVariant,
) -> ConeDecision {
    let threshold = BigRational::new((d as i64).into(), 2.into()) + &w.a;
    let k_rat = BigRational::from_integer((k as i64).into());
    let half = BigRational::new(1.into(), 2.into());
    // lexicographic order of (k, s) against (d/2 + a, b)
    let lex = |s: &BigRational| -> std::cmp::Ordering {
        match k_rat.cmp(&threshold) {
            std::cmp::Ordering::Equal => s.cmp(&w.b),
            o => o,
        }
    };
    match variant {
        ConeVariant::Absolute => {
            match lex(&(-&half)) {
                std::cmp::Ordering::Less => ConeDecision {
                    value: 0,
                    rule: ConeRule::LexBelow,
                },
                std::cmp::Ordering::Greater => ConeDecision {
                    value: betti_v.get(k),
                    rule: ConeRule::LexAbove,
                },
                std::cmp::Ordering::Equal => ConeDecision {
                    // k = d/2 + a, b = -1/2: vanishing by the proof's middle case
                    value: 0,
                    rule: ConeRule::EdgeProof,
                },
            }
        }
        ConeVariant::Relative => {
            match lex(&half) {
                std::cmp::Ordering::Greater => ConeDecision {
                    value: 0,
                    rule: ConeRule::LexAbove,
                },
                std::cmp::Ordering::Less => ConeDecision {
                    value: betti_v.get_signed(k as i64 - 1),
                    rule: ConeRule::LexBelow,
                },
                std::cmp::Ordering::Equal => ConeDecision {
                    // k = d/2 + a, b = 1/2: zero by duality with the absolute edge
                    value: 0,
                    rule: ConeRule::EdgeDual,
                },
            }
        }
    }
}

/// Weighted L2 cohomology of a manifold with one conical end, weight r^{2a}:
/// h_c below the middle degree d/2 + a, the rank of H_c^k -> H^k at it, and
/// h above it.
pub fn conical_end_l2(
    k: usize,
    d: usize,
    a: &BigRational,
    h_c: u64,
    h: u64,
    rank_nat: u64,
) -> Result<u64> {
    if rank_nat > h_c.min(h) {
        return Err(QaleError::RankBound {
            rank: rank_nat,
            bound: h_c.min(h),
        });
    }
    let threshold = BigRational::new((d as i64).into(), 2.into()) + a;
    let k_rat = BigRational::from_integer((k as i64).into());
    Ok(match k_rat.cmp(&threshold) {
        std::cmp::Ordering::Less => h_c,
        std::cmp::Ordering::Equal => rank_nat,
        std::cmp::Ordering::Greater => h,
    })
}

/// Extreme radial weights on a QALE space: a > n gives compactly supported
/// cohomology, a < -n ordinary cohomology; anything in between is refused.
pub fn weighted_extreme_l2(
    a: &BigRational,
    n: usize,
    h_c: &CohomTable,
    h: &CohomTable,
) -> Result<CohomTable> {
    let n_rat = BigRational::from_integer((n as i64).into());
    if *a > n_rat {
        Ok(h_c.clone())
    } else if *a < -&n_rat {
        Ok(h.clone())
    } else {
        Err(QaleError::InconclusiveWeight {
            a: a.to_string(),
            n,
        })
    }
}

/// Graded Kunneth convolution: `dims[k] = sum_(p+q=k) t1[p] * t2[q]`.
pub fn kunneth(t1: &CohomTable, t2: &CohomTable) -> CohomTable {
    let mut out = CohomTable::new(
        format!("({}) x ({})", t1.label, t2.label),
        t1.top_degree + t2.top_degree,
    );
    for (p, v1) in t1.iter() {
        for (q, v2) in t2.iter() {
            out.add(p + q, v1 * v2);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};
    use crate::group::conjugacy_classes;
    use crate::strata::stratification_report;
    use crate::testkit::*;

    fn ends(group: &crate::group::GroupData) -> EndGeometry {
        let report = stratification_report(group).unwrap();
        EndGeometry::from_stratification(group, &report, &Default::default()).unwrap()
    }

    fn table(top: usize, pairs: &[(usize, u64)]) -> CohomTable {
        CohomTable::from_pairs("", top, pairs)
    }

    #[test]
    fn end_tables_z4() {
        let g = joyce_935();
        let e = ends(&g);
        assert!(end_l2(&e).unwrap().same_dims(&table(5, &[(5, 1)])));
        // derived by the cohowi formula: only the n_i = 1 branch contributes,
        // H^2(Y)^B lands in degrees 2 (k = 3) and 3 (k = 4)
        assert!(end_l2_weighted(&e)
            .unwrap()
            .same_dims(&table(4, &[(2, 1), (3, 1)])));
        let b = boundary_betti(&e).unwrap();
        assert!(b.same_dims(&table(5, &[(0, 1), (2, 1), (3, 1), (5, 1)])));
        assert_eq!(b.euler_characteristic(), 0);
    }

    #[test]
    fn end_tables_z2z2() {
        let g = joyce_936();
        let e = ends(&g);
        assert!(end_l2(&e).unwrap().same_dims(&table(5, &[(5, 1)])));
        assert!(end_l2_weighted(&e)
            .unwrap()
            .same_dims(&table(4, &[(2, 3), (3, 3)])));
        let b = boundary_betti(&e).unwrap();
        assert!(b.same_dims(&table(5, &[(0, 1), (2, 3), (3, 3), (5, 1)])));
        assert_eq!(b.euler_characteristic(), 0);
    }

    #[test]
    fn end_tables_s3() {
        let g = s3_hilb3();
        let e = ends(&g);
        // single orbit with n_i = 2: H^2(Y)^B lands in degree 5 = 2 + 3
        assert!(end_l2(&e).unwrap().same_dims(&table(7, &[(5, 1), (7, 1)])));
        // k > 2 n_i = 4 strictness keeps the degree-0 entry out
        assert!(end_l2_weighted(&e).unwrap().same_dims(&table(6, &[(5, 1)])));
        let b = boundary_betti(&e).unwrap();
        assert!(b.same_dims(&table(7, &[(0, 1), (2, 1), (5, 1), (7, 1)])));
        assert_eq!(b.euler_characteristic(), 0);
    }

    #[test]
    fn end_tables_free_action() {
        let g = free_z5();
        let e = ends(&g);
        assert!(end_l2(&e).unwrap().same_dims(&table(5, &[(5, 1)])));
        assert!(end_l2_weighted(&e).unwrap().is_zero());
        assert!(boundary_betti(&e)
            .unwrap()
            .same_dims(&table(5, &[(0, 1), (5, 1)])));
    }

    #[test]
    fn end_tables_hilb2() {
        let g = hilb2_a1();
        let e = ends(&g);
        assert_eq!(e.orbits.len(), 2);
        assert!(end_l2(&e).unwrap().same_dims(&table(7, &[(5, 2), (7, 1)])));
        assert!(end_l2_weighted(&e).unwrap().same_dims(&table(6, &[(5, 2)])));
        let b = boundary_betti(&e).unwrap();
        assert!(b.same_dims(&table(7, &[(0, 1), (2, 2), (5, 2), (7, 1)])));
        assert_eq!(b.euler_characteristic(), 0);
    }

    #[test]
    fn non_isolated_is_refused() {
        let g = non_isolated_su4();
        let report = stratification_report(&g).unwrap();
        // EndGeometry cannot be built: the A-free-action hypothesis fails on
        // the shared line, which is the right refusal for this input.
        let res = EndGeometry::from_stratification(&g, &report, &Default::default());
        assert!(matches!(res, Err(QaleError::FreeActionViolated)));
        // a hand-built non-isolated geometry is refused by the formulas
        let e = EndGeometry {
            n: 4,
            isolated: false,
            length: 3,
            orbits: vec![],
        };
        assert!(matches!(end_l2(&e), Err(QaleError::NotIsolated { .. })));
        assert!(matches!(
            end_l2_weighted(&e),
            Err(QaleError::NotIsolated { .. })
        ));
        assert!(matches!(
            boundary_betti(&e),
            Err(QaleError::NotIsolated { .. })
        ));
    }

    #[test]
    fn su3_table_examples() {
        let g = joyce_935();
        let classes = conjugacy_classes(&g).unwrap();
        let report = stratification_report(&g).unwrap();
        let t = su3_l2(&classes, &report, 3).unwrap();
        assert!(t.same_dims(&table(6, &[(2, 1), (4, 1)])));
        // duality k <-> 2n - k at dimension level
        for (k, v) in t.iter() {
            assert_eq!(v, t.get(6 - k));
        }
        assert_eq!(t.euler_characteristic() as u64, chi_l2(&classes));

        let g2 = joyce_936();
        let t2 = su3_l2(
            &conjugacy_classes(&g2).unwrap(),
            &stratification_report(&g2).unwrap(),
            3,
        )
        .unwrap();
        assert!(t2.is_zero());

        let s3 = s3_hilb3();
        assert!(matches!(
            su3_l2(
                &conjugacy_classes(&s3).unwrap(),
                &stratification_report(&s3).unwrap(),
                4
            ),
            Err(QaleError::WrongDimension { .. })
        ));
    }

    #[test]
    fn sp2_table_examples() {
        let g = s3_hilb3();
        let classes = conjugacy_classes(&g).unwrap();
        let report = stratification_report(&g).unwrap();
        let t = sp2_l2(&classes, &report, 4, false).unwrap();
        assert!(t.same_dims(&table(8, &[(4, 1)])));
        assert_eq!(t.euler_characteristic() as u64, chi_l2(&classes));

        let h = hilb2_a1();
        let hc = conjugacy_classes(&h).unwrap();
        let ht = sp2_l2(&hc, &stratification_report(&h).unwrap(), 4, false).unwrap();
        // the age oracle counts both the (-1,-1) class and the swap-type
        // fixed-point-free class in degree 4
        assert!(ht.same_dims(&table(8, &[(4, 2)])));
        assert_eq!(ht.euler_characteristic() as u64, chi_l2(&hc));
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi_l2(&conjugacy_classes(&joyce_935()).unwrap()), 2);
        assert_eq!(chi_l2(&conjugacy_classes(&joyce_936()).unwrap()), 0);
        assert_eq!(chi_l2(&conjugacy_classes(&s3_hilb3()).unwrap()), 1);
        assert_eq!(chi_l2(&conjugacy_classes(&free_z5()).unwrap()), 4);
    }

    #[test]
    fn cone_decision_examples() {
        let w0 = WeightSpec::new(rat(0), rat(0));
        let betti = table(3, &[(0, 1), (3, 1)]);
        // (1, -1/2) < (2, 0): vanishing
        let d1 = cone_l2(1, 4, &w0, &betti, ConeVariant::Absolute);
        assert_eq!((d1.value, d1.rule), (0, ConeRule::LexBelow));
        // (3, -1/2) > (2, 0): link survives
        let betti3 = table(3, &[(3, 1)]);
        let d3 = cone_l2(3, 4, &w0, &betti3, ConeVariant::Absolute);
        assert_eq!((d3.value, d3.rule), (1, ConeRule::LexAbove));
        // k = d/2 + a with b in [-1/2, 1/2]: the proof's middle case
        let d2 = cone_l2(2, 4, &w0, &betti, ConeVariant::Absolute);
        assert_eq!(d2.value, 0);
        let edge = cone_l2(
            2,
            4,
            &WeightSpec::new(rat(0), ratio(-1, 2)),
            &betti,
            ConeVariant::Absolute,
        );
        assert_eq!((edge.value, edge.rule), (0, ConeRule::EdgeProof));
        // below the edge in b the link reappears
        let below = cone_l2(
            2,
            4,
            &WeightSpec::new(rat(0), rat(-1)),
            &table(3, &[(2, 5)]),
            ConeVariant::Absolute,
        );
        assert_eq!((below.value, below.rule), (5, ConeRule::LexAbove));
    }

    #[test]
    fn named_weights_shift_the_cone_threshold() {
        // with the parabolic weights the cone over a (d-1)-link vanishes up
        // to the lowered threshold d/2 - 1
        let link = table(5, &[(0, 1), (2, 1), (3, 1), (5, 1)]);
        let d = 6;
        let flat = cone_l2(3, d, &WeightSpec::flat(), &link, ConeVariant::Absolute);
        assert_eq!(flat.value, 0); // 3 = d/2, middle case
        let par = cone_l2(3, d, &WeightSpec::parabolic(), &link, ConeVariant::Absolute);
        assert_eq!(par.value, link.get(3)); // 3 > d/2 - 1
        let par_log = cone_l2(
            2,
            d,
            &WeightSpec::parabolic_log(),
            &link,
            ConeVariant::Absolute,
        );
        // (2, -1/2) > (2, -1): the link survives at the lowered threshold
        assert_eq!(
            (par_log.value, par_log.rule),
            (link.get(2), ConeRule::LexAbove)
        );
    }

    #[test]
    fn cone_duality_on_palindromic_links() {
        // b_j(V) = b_{d-1-j}(V) forced; then absolute (k, a, b) matches
        // relative (d-k, -a, -b).
        let d = 6usize;
        let betti = table(5, &[(0, 1), (1, 2), (2, 1), (3, 1), (4, 2), (5, 1)]);
        for k in 0..=d {
            for (na, nb) in [(0, 0), (1, 0), (-1, 1), (2, -1), (-3, 2), (1, 1)] {
                let w = WeightSpec::new(rat(na), rat(nb));
                let dual = WeightSpec::new(rat(-na), rat(-nb));
                let abs = cone_l2(k, d, &w, &betti, ConeVariant::Absolute);
                let rel = cone_l2(d - k, d, &dual, &betti, ConeVariant::Relative);
                assert_eq!(abs.value, rel.value, "k={k}, a={na}, b={nb}");
            }
        }
    }

    #[test]
    fn conical_end_selector() {
        let zero = rat(0);
        assert_eq!(conical_end_l2(1, 6, &zero, 5, 2, 1).unwrap(), 5);
        assert_eq!(conical_end_l2(3, 6, &zero, 5, 2, 1).unwrap(), 1);
        assert_eq!(conical_end_l2(5, 6, &zero, 5, 2, 1).unwrap(), 2);
        assert!(matches!(
            conical_end_l2(3, 6, &zero, 5, 2, 3),
            Err(QaleError::RankBound { .. })
        ));
    }

    #[test]
    fn weighted_extremes() {
        let hc = table(6, &[(2, 1), (4, 2)]);
        let h = table(6, &[(0, 1), (2, 2)]);
        assert!(weighted_extreme_l2(&rat(4), 3, &hc, &h)
            .unwrap()
            .same_dims(&hc));
        assert!(weighted_extreme_l2(&rat(-4), 3, &hc, &h)
            .unwrap()
            .same_dims(&h));
        assert!(matches!(
            weighted_extreme_l2(&rat(1), 3, &hc, &h),
            Err(QaleError::InconclusiveWeight { .. })
        ));
    }

    #[test]
    fn kunneth_convolution() {
        let unit = table(0, &[(0, 1)]);
        let t = table(4, &[(0, 1), (2, 2)]);
        assert!(kunneth(&unit, &t).same_dims(&t));
        let sq = kunneth(&table(2, &[(2, 1)]), &table(2, &[(2, 1)]));
        assert!(sq.same_dims(&table(4, &[(4, 1)])));
        let conv = kunneth(&table(2, &[(0, 1), (2, 2)]), &table(2, &[(0, 1), (2, 1)]));
        assert!(conv.same_dims(&table(4, &[(0, 1), (2, 3), (4, 2)])));
    }

    #[test]
    fn kunneth_is_commutative_associative_and_multiplicative() {
        let a = table(3, &[(0, 1), (1, 2), (3, 1)]);
        let b = table(2, &[(0, 2), (2, 3)]);
        let c = table(4, &[(1, 1), (4, 2)]);
        assert!(kunneth(&a, &b).same_dims(&kunneth(&b, &a)));
        assert!(kunneth(&kunneth(&a, &b), &c).same_dims(&kunneth(&a, &kunneth(&b, &c))));
        // Euler characteristics multiply
        assert_eq!(
            kunneth(&a, &b).euler_characteristic(),
            a.euler_characteristic() * b.euler_characteristic()
        );
        // total dimensions multiply
        assert_eq!(kunneth(&a, &c).total(), a.total() * c.total());
    }

    #[test]
    fn sp2_table_is_poincare_symmetric() {
        for g in [s3_hilb3(), hilb2_a1()] {
            let classes = conjugacy_classes(&g).unwrap();
            let report = stratification_report(&g).unwrap();
            let t = sp2_l2(&classes, &report, 4, false).unwrap();
            for (k, v) in t.iter() {
                assert_eq!(v, t.get(8 - k), "symmetry at degree {k}");
            }
            assert_eq!(t.euler_characteristic() as u64, chi_l2(&classes));
        }
    }

    #[test]
    fn override_is_recorded() {
        let g = joyce_935();
        let report = stratification_report(&g).unwrap();
        let mut overrides = std::collections::BTreeMap::new();
        overrides.insert(0usize, std::collections::BTreeMap::from([(2usize, 7u64)]));
        let e = EndGeometry::from_stratification(&g, &report, &overrides).unwrap();
        assert_eq!(e.orbits[0].invariant_table.get(2), 7);
        match &e.orbits[0].source {
            TableSource::Override { heuristic } => assert_eq!(heuristic.get(2), 1),
            TableSource::Heuristic => panic!("expected an override source"),
        }
    }
}
