//! The fixed-subspace stratification of C^n/G: the proper fixed subspaces
//! V_i, their pointwise stabilizers A_i, setwise stabilizers N(V_i), the
//! quotients B_i, the G-orbits of strata, the poset length, and the standing
//! hypotheses of the rank-2 QALE setting.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{QaleError, Result};
use crate::exact::{CycMatrix, CycNumber};
use crate::group::GroupData;

/// One proper fixed subspace V_i with its group data. The basis is the
/// canonical RREF row basis, so strata compare by equality of bases.
#[derive(Debug, Clone)]
pub struct Stratum {
    pub basis: CycMatrix,
    /// dim V_i
    pub n_i: usize,
    /// codimension, = dim of the transverse space W_i
    pub m_i: usize,
    /// pointwise stabilizer A_i = {g : g v = v for all v in V_i}
    pub a_indices: Vec<usize>,
    /// setwise stabilizer N(V_i)
    pub n_indices: Vec<usize>,
    /// one representative per A_i-coset of N(V_i); B_i = N/A
    pub b_coset_reps: Vec<usize>,
    pub orbit_id: usize,
}

/// Symplectic membership as decided by the invariant-form probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpStatus {
    Yes,
    No,
    Indeterminate,
}

impl std::fmt::Display for SpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpStatus::Yes => write!(f, "yes"),
            SpStatus::No => write!(f, "no"),
            SpStatus::Indeterminate => write!(f, "indeterminate"),
        }
    }
}

/// The assembled stratification data for one group.
#[derive(Debug, Clone)]
pub struct StratificationReport {
    pub strata: Vec<Stratum>,
    /// partition of stratum indices under the G-action; sorted by smallest
    /// member, which is also the orbit representative
    pub orbits: Vec<Vec<usize>>,
    /// poset length counted with the indices V_0 = C^n and V_infty = {0}
    /// included: 1 for free actions, 2 for isolated singularities
    pub length: usize,
    pub isolated: bool,
    pub su_ok: bool,
    pub sp_status: SpStatus,
}

/// One validation finding; `ok = false` findings carry the failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub check: String,
    pub ok: bool,
    pub detail: String,
}

/// All nonzero proper fixed subspaces: the cyclic fixed spaces Fix(g) closed
/// under pairwise intersection until fixpoint (V^H = intersection of the
/// Fix(h) over generators of H, so this reaches every V^H without
/// enumerating subgroups). Deterministic order: by (n_i, basis key).
pub fn enumerate_strata(group: &GroupData) -> Result<Vec<Stratum>> {
    let n = group.n();
    let m = group.order_m();
    let identity = CycMatrix::identity(n, m)?;
    let mut spaces: Vec<CycMatrix> = Vec::new();
    let push_unique = |s: CycMatrix, spaces: &mut Vec<CycMatrix>| {
        let s = s.promote_to_lcm(m);
        if s.rows() > 0 && s.rows() < n && !spaces.contains(&s) {
            spaces.push(s);
        }
    };
    for i in 1..group.len() {
        let fix = group.element(i).sub(&identity).nullspace();
        push_unique(fix, &mut spaces);
    }
    // close under pairwise intersection
    let mut changed = true;
    while changed {
        changed = false;
        let current = spaces.clone();
        for a in 0..current.len() {
            for b in a + 1..current.len() {
                let meet = current[a].row_space_intersection(&current[b]);
                let meet = meet.promote_to_lcm(m);
                if meet.rows() > 0 && meet.rows() < n && !spaces.contains(&meet) {
                    spaces.push(meet);
                    changed = true;
                }
            }
        }
    }
    spaces.sort_by_key(|s| (s.rows(), s.canonical_key()));

    let mut strata = Vec::with_capacity(spaces.len());
    for basis in spaces {
        let n_i = basis.rows();
        let a_indices: Vec<usize> = (0..group.len())
            .filter(|&g| fixes_pointwise(group, g, &basis))
            .collect();
        let n_indices: Vec<usize> = (0..group.len())
            .filter(|&g| preserves(group, g, &basis))
            .collect();
        let a_set: BTreeSet<usize> = a_indices.iter().copied().collect();
        let mut b_coset_reps = Vec::new();
        let mut covered: BTreeSet<usize> = BTreeSet::new();
        for &g in &n_indices {
            if covered.contains(&g) {
                continue;
            }
            b_coset_reps.push(g);
            for &a in &a_set {
                covered.insert(group.mul(g, a));
            }
        }
        if a_indices.len() * b_coset_reps.len() != n_indices.len() {
            return Err(QaleError::InternalInconsistency(
                "coset decomposition of N(V_i) by A_i failed".into(),
            ));
        }
        strata.push(Stratum {
            basis,
            n_i,
            m_i: n - n_i,
            a_indices,
            n_indices,
            b_coset_reps,
            orbit_id: usize::MAX, // assigned by stratification_report
        });
    }
    Ok(strata)
}

fn fixes_pointwise(group: &GroupData, g: usize, basis: &CycMatrix) -> bool {
    // rows are fixed vectors: basis * g^T == basis
    let moved = basis.matmul(&group.element(g).transpose());
    moved == basis.promote_to_lcm(moved.order())
}

fn preserves(group: &GroupData, g: usize, basis: &CycMatrix) -> bool {
    let moved = basis.matmul(&group.element(g).transpose());
    moved.same_row_space(basis)
}

/// Full report: orbits of the G-action on strata, poset length, isolation,
/// and the SU / Sp membership checks.
pub fn stratification_report(group: &GroupData) -> Result<StratificationReport> {
    let mut strata = enumerate_strata(group)?;

    // G-action on strata: g . V_i has basis V_i g^T.
    let find = |strata: &[Stratum], space: &CycMatrix| -> Option<usize> {
        strata.iter().position(|s| s.basis.same_row_space(space))
    };
    let count = strata.len();
    let mut orbit_of = vec![usize::MAX; count];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..count {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let mut members = BTreeSet::new();
        members.insert(i);
        for g in 0..group.len() {
            let moved = strata[i].basis.matmul(&group.element(g).transpose());
            let j = find(&strata, &moved).ok_or_else(|| {
                QaleError::InternalInconsistency("the G-action does not permute the strata".into())
            })?;
            members.insert(j);
        }
        let orbit_id = orbits.len();
        for &j in &members {
            orbit_of[j] = orbit_id;
        }
        orbits.push(members.into_iter().collect());
    }
    for (i, s) in strata.iter_mut().enumerate() {
        s.orbit_id = orbit_of[i];
    }

    // Longest chain of proper strata under strict inclusion, then add the
    // step down to {0}; with V_0 = C^n and V_infty = {0} counted, a free
    // action has length 1 and an isolated stratification length 2.
    let mut longest = vec![1usize; count];
    let mut order_idx: Vec<usize> = (0..count).collect();
    order_idx.sort_by_key(|&i| strata[i].n_i);
    for &i in &order_idx {
        for &j in &order_idx {
            if strata[j].n_i < strata[i].n_i
                && strata[j]
                    .basis
                    .row_space_intersection(&strata[i].basis)
                    .rows()
                    == strata[j].n_i
            {
                longest[i] = longest[i].max(longest[j] + 1);
            }
        }
    }
    let chain = longest.iter().copied().max().unwrap_or(0);
    let length = chain + 1;

    // Isolated iff all pairwise intersections of distinct proper strata
    // vanish; equivalent to length <= 2 by closure under intersection.
    let mut isolated = true;
    'outer: for i in 0..count {
        for j in i + 1..count {
            if strata[i]
                .basis
                .row_space_intersection(&strata[j].basis)
                .rows()
                > 0
            {
                isolated = false;
                break 'outer;
            }
        }
    }
    if isolated != (length <= 2) {
        return Err(QaleError::InternalInconsistency(format!(
            "isolation ({isolated}) disagrees with poset length ({length})"
        )));
    }

    let su_ok = (0..group.len()).all(|i| {
        let e = group.element(i);
        e.is_unitary() && e.det().is_one()
    });
    let sp_status = sp_membership(group)?;

    Ok(StratificationReport {
        strata,
        orbits,
        length,
        isolated,
        su_ok,
        sp_status,
    })
}

/// Decide G an orbit of Sp(n/2): compute the space of G-invariant alternating
/// bilinear forms (solving g^T J g = J for the generators) and search it for
/// a nondegenerate witness. n odd is always "no" (odd alternating forms are
/// singular); a nonzero space with no witness found stays "indeterminate".
fn sp_membership(group: &GroupData) -> Result<SpStatus> {
    let n = group.n();
    if n % 2 == 1 {
        return Ok(SpStatus::No);
    }
    let m = group.order_m();
    // Unknowns: J_{pq} for p < q (J antisymmetric).
    let unknowns: Vec<(usize, usize)> = (0..n)
        .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
        .collect();
    let k = unknowns.len();
    let mut rows: Vec<CycNumber> = Vec::new();
    let mut row_count = 0usize;
    for &gi in group.generator_indices() {
        let g = group.element(gi);
        // (g^T J g - J)_{rc} = sum_{p<q} J_pq (g_pr g_qc - g_qr g_pc) - J_rc
        for r in 0..n {
            for c in r + 1..n {
                let mut row = vec![CycNumber::zero(m); k];
                for (u, &(p, q)) in unknowns.iter().enumerate() {
                    let mut coeff =
                        &(g.entry(p, r) * g.entry(q, c)) - &(g.entry(q, r) * g.entry(p, c));
                    if (p, q) == (r, c) {
                        coeff = &coeff - &CycNumber::one(m);
                    }
                    row[u] = coeff;
                }
                rows.extend(row);
                row_count += 1;
            }
        }
    }
    let system = CycMatrix::new_internal(row_count, k, rows);
    let basis = system.nullspace();
    if basis.rows() == 0 {
        return Ok(SpStatus::No);
    }
    let to_form = |coeffs: &[CycNumber]| -> CycMatrix {
        let mut entries = vec![CycNumber::zero(m); n * n];
        for (u, &(p, q)) in unknowns.iter().enumerate() {
            entries[p * n + q] = coeffs[u].clone().promote_to_lcm(m);
            entries[q * n + p] = -coeffs[u].clone().promote_to_lcm(m);
        }
        CycMatrix::new_internal(n, n, entries)
    };
    // Try each basis form, then 16 deterministic small-integer combinations.
    for i in 0..basis.rows() {
        let coeffs: Vec<CycNumber> = (0..k).map(|c| basis.entry(i, c).clone()).collect();
        if !to_form(&coeffs).det().is_zero() {
            return Ok(SpStatus::Yes);
        }
    }
    for combo in 1..=16i64 {
        let mut coeffs = vec![CycNumber::zero(m); k];
        let mut weight = combo;
        for i in 0..basis.rows() {
            let w = CycNumber::from_integer(m, (weight % 5) - 2);
            weight = weight.wrapping_mul(31).wrapping_add(7);
            for (c, slot) in coeffs.iter_mut().enumerate() {
                *slot = &*slot + &(basis.entry(i, c) * &w);
            }
        }
        if !to_form(&coeffs).det().is_zero() {
            return Ok(SpStatus::Yes);
        }
    }
    Ok(SpStatus::Indeterminate)
}

/// The standing hypotheses of the rank-2 QALE formulas, as a finding list.
pub fn validate_hypotheses(group: &GroupData, report: &StratificationReport) -> Vec<Finding> {
    let mut findings = Vec::new();
    findings.push(Finding {
        check: "Isolated".into(),
        ok: report.isolated,
        detail: format!("poset length {}", report.length),
    });
    findings.push(Finding {
        check: "SU".into(),
        ok: report.su_ok,
        detail: "every element unitary with determinant 1".into(),
    });
    for (i, s) in report.strata.iter().enumerate() {
        let id = CycMatrix::identity(group.n(), group.order_m()).expect("n within guard");
        let free = s.a_indices.iter().all(|&a| {
            a == 0 || {
                let fix = group.element(a).sub(&id).nullspace();
                fix.same_row_space(&s.basis)
            }
        });
        findings.push(Finding {
            check: format!("FreeAction[{i}]"),
            ok: free,
            detail: format!("|A| = {}, dim V = {}", s.a_indices.len(), s.n_i),
        });
        findings.push(Finding {
            check: format!("MiDimension[{i}]"),
            ok: s.m_i >= 2,
            detail: format!("m_i = {}", s.m_i),
        });
    }
    findings.push(Finding {
        check: "Sp".into(),
        ok: report.sp_status != SpStatus::Indeterminate,
        detail: report.sp_status.to_string(),
    });
    findings
}
