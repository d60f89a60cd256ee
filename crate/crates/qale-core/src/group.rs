//! Finite unitary matrix groups: closure from generators, conjugacy classes,
//! exact eigenvalue multiplicities, ages and fixed-space dimensions.

use std::collections::HashMap;

use num::{Integer, Signed, ToPrimitive};

use crate::error::{QaleError, Result};
use crate::exact::{CycMatrix, CycNumber, MAX_CYCLOTOMIC_ORDER};

/// Cap on the closure size when the caller does not override it.
pub const DEFAULT_MAX_ORDER: usize = 10_000;

/// A fully enumerated finite subgroup of SU(n), with total multiplication
/// and inversion tables. `elements[0]` is always the identity and the
/// element ordering is the deterministic BFS order from the identity.
#[derive(Debug, Clone)]
pub struct GroupData {
    n: usize,
    order_m: usize,
    elements: Vec<CycMatrix>,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    generator_indices: Vec<usize>,
}

/// One conjugacy class with its exact spectral data: `eigen_mult[j]` is the
/// multiplicity of zeta_r^j among the eigenvalues of a representative of
/// order r.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDatum {
    pub rep_index: usize,
    pub member_indices: Vec<usize>,
    pub order: usize,
    pub eigen_mult: std::collections::BTreeMap<usize, usize>,
    pub age: usize,
    pub fixed_dim: usize,
}

impl GroupData {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order_m(&self) -> usize {
        self.order_m
    }

    /// Number of elements, |G|.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        // a closed group always contains the identity
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> &CycMatrix {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[CycMatrix] {
        &self.elements
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.mul[i][j]
    }

    pub fn inv(&self, i: usize) -> usize {
        self.inv[i]
    }

    pub fn generator_indices(&self) -> &[usize] {
        &self.generator_indices
    }

    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// Order of the element, found by iterating the mul table (Lagrange caps
    /// it at |G| so the loop always terminates).
    pub fn element_order(&self, i: usize) -> usize {
        let mut cur = i;
        let mut k = 1usize;
        while cur != 0 {
            cur = self.mul(cur, i);
            k += 1;
            assert!(k <= self.len(), "element order exceeds group order");
        }
        k
    }
}

/// Breadth-first closure of the group generated by the given unitary
/// determinant-1 matrices. Deterministic: elements are discovered in BFS
/// order from the identity, multiplying by generators in the order given.
pub fn close_group(generators: &[CycMatrix], max_order: usize) -> Result<GroupData> {
    if generators.is_empty() {
        return Err(QaleError::DimensionMismatch(
            "at least one generator is required".into(),
        ));
    }
    let n = generators[0].rows();
    let mut order_m = 1usize;
    for (idx, g) in generators.iter().enumerate() {
        if !g.is_square() || g.rows() != n {
            return Err(QaleError::DimensionMismatch(format!(
                "generator {idx} is {}x{}, expected {n}x{n}",
                g.rows(),
                g.cols()
            )));
        }
        if !g.is_unitary() {
            return Err(QaleError::NotUnitary { index: idx });
        }
        if !g.det().is_one() {
            return Err(QaleError::NotSpecialDeterminant { index: idx });
        }
        order_m = order_m.lcm(&g.order());
    }
    if order_m > MAX_CYCLOTOMIC_ORDER {
        return Err(QaleError::OrderTooLarge(order_m));
    }

    let gens: Vec<CycMatrix> = generators.iter().map(|g| g.promote(order_m)).collect();
    let identity = CycMatrix::identity(n, order_m)?;

    let mut elements = vec![identity.clone()];
    let mut index: HashMap<CycMatrix, usize> = HashMap::new();
    index.insert(identity, 0);
    let mut frontier = std::collections::VecDeque::from([0usize]);
    while let Some(cur) = frontier.pop_front() {
        let base = elements[cur].clone();
        for g in &gens {
            let prod = base.matmul(g);
            if let std::collections::hash_map::Entry::Vacant(slot) = index.entry(prod) {
                if elements.len() >= max_order {
                    return Err(QaleError::OrderExceeded { max_order });
                }
                let id = elements.len();
                elements.push(slot.key().clone());
                slot.insert(id);
                frontier.push_back(id);
            }
        }
    }

    let size = elements.len();
    let mut mul = vec![vec![0usize; size]; size];
    for i in 0..size {
        for j in 0..size {
            let prod = elements[i].matmul(&elements[j]);
            let k = *index.get(&prod).ok_or_else(|| {
                QaleError::InternalInconsistency("closure is not multiplication-closed".into())
            })?;
            mul[i][j] = k;
        }
    }
    let mut inv = vec![0usize; size];
    for i in 0..size {
        inv[i] = (0..size)
            .find(|&j| mul[i][j] == 0)
            .ok_or_else(|| QaleError::InternalInconsistency("element without inverse".into()))?;
    }
    let generator_indices = gens.iter().map(|g| index[g]).collect();

    Ok(GroupData {
        n,
        order_m,
        elements,
        mul,
        inv,
        generator_indices,
    })
}

/// Exact eigenvalue multiplicities of element `i` by discrete Fourier
/// inversion of the trace sequence:
/// mult_j = (1/r) sum_k tr(g^k) zeta_r^(-jk).
///
/// The result must consist of nonnegative integers summing to n and
/// reconstructing tr(g); anything else signals an arithmetic bug and is
/// reported as `InternalInconsistency`.
pub fn eigen_multiplicities(
    group: &GroupData,
    i: usize,
) -> Result<std::collections::BTreeMap<usize, usize>> {
    let r = group.element_order(i);
    let work_order = group.order_m().lcm(&r);
    if work_order > MAX_CYCLOTOMIC_ORDER {
        return Err(QaleError::OrderTooLarge(work_order));
    }
    // Trace of each power, collected by walking the mul table.
    let mut traces = Vec::with_capacity(r);
    let mut cur = 0usize; // g^0
    for _ in 0..r {
        traces.push(group.element(cur).trace().promote(work_order));
        cur = group.mul(cur, i);
    }
    let r_rat = CycNumber::from_integer(work_order, r as i64);
    let mut result = std::collections::BTreeMap::new();
    let mut total = 0usize;
    for j in 0..r {
        let mut acc = CycNumber::zero(work_order);
        for (k, t) in traces.iter().enumerate() {
            let exp = -((j * k) as i64);
            let w = CycNumber::root_of_unity(r, exp)?.promote(work_order);
            acc = &acc + &(t * &w);
        }
        let m = acc.checked_div(&r_rat)?;
        let Some(q) = m.as_rational() else {
            return Err(QaleError::InternalInconsistency(format!(
                "eigenvalue multiplicity for j={j} is not rational: {m}"
            )));
        };
        if !q.is_integer() || q.is_negative() {
            return Err(QaleError::InternalInconsistency(format!(
                "eigenvalue multiplicity for j={j} is {q}, expected a nonnegative integer"
            )));
        }
        let v = q.to_integer().to_usize().ok_or_else(|| {
            QaleError::InternalInconsistency("eigenvalue multiplicity overflow".into())
        })?;
        if v > 0 {
            result.insert(j, v);
            total += v;
        }
    }
    if total != group.n() {
        return Err(QaleError::InternalInconsistency(format!(
            "eigenvalue multiplicities sum to {total}, expected n = {}",
            group.n()
        )));
    }
    // Reconstruction check: sum_j mult_j zeta_r^j = tr(g).
    let mut recon = CycNumber::zero(work_order);
    for (&j, &mult) in &result {
        let w = CycNumber::root_of_unity(r, j as i64)?.promote(work_order);
        recon = &recon + &w.scale_usize(mult);
    }
    if recon != traces.get(1).cloned().unwrap_or_else(|| traces[0].clone()) {
        return Err(QaleError::InternalInconsistency(
            "eigenvalue multiplicities do not reconstruct the trace".into(),
        ));
    }
    Ok(result)
}

impl CycNumber {
    fn scale_usize(&self, k: usize) -> CycNumber {
        let factor = CycNumber::from_integer(self.order(), k as i64);
        self * &factor
    }
}

/// age(g) = (1/r) sum_j j * mult_j; an integer in [0, n) since det g = 1,
/// and zero exactly for the identity.
pub fn age(group: &GroupData, i: usize) -> Result<usize> {
    let mult = eigen_multiplicities(group, i)?;
    age_from_mult(group, i, &mult)
}

fn age_from_mult(
    group: &GroupData,
    i: usize,
    mult: &std::collections::BTreeMap<usize, usize>,
) -> Result<usize> {
    let r = group.element_order(i);
    let weighted: usize = mult.iter().map(|(&j, &m)| j * m).sum();
    if !weighted.is_multiple_of(r) {
        return Err(QaleError::InternalInconsistency(format!(
            "age of element {i} is {weighted}/{r}, not an integer"
        )));
    }
    let a = weighted / r;
    if a >= group.n() || (a == 0) != (i == 0) {
        return Err(QaleError::InternalInconsistency(format!(
            "age {a} of element {i} outside the allowed range"
        )));
    }
    Ok(a)
}

/// Conjugacy classes with spectral data, sorted by (age, order, rep_index).
pub fn conjugacy_classes(group: &GroupData) -> Result<Vec<ClassDatum>> {
    let size = group.len();
    let mut seen = vec![false; size];
    let mut classes = Vec::new();
    for i in 0..size {
        if seen[i] {
            continue;
        }
        let mut members: Vec<usize> = (0..size).map(|g| group.conjugate(g, i)).collect();
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            seen[m] = true;
        }
        let rep = members[0];
        let order = group.element_order(rep);
        let eigen_mult = eigen_multiplicities(group, rep)?;
        let age = age_from_mult(group, rep, &eigen_mult)?;
        let fixed_dim = eigen_mult.get(&0).copied().unwrap_or(0);
        // The spectral data is a class function; verify on every member.
        for &m in &members[1..] {
            let em = eigen_multiplicities(group, m)?;
            if em != eigen_mult {
                return Err(QaleError::InternalInconsistency(format!(
                    "eigenvalue data differs inside the class of element {rep}"
                )));
            }
        }
        // Cross-check fixed_dim against the kernel of g - Id.
        let g = group.element(rep);
        let id = CycMatrix::identity(group.n(), g.order())?;
        let kernel_dim = g.sub(&id).nullspace().rows();
        if kernel_dim != fixed_dim {
            return Err(QaleError::InternalInconsistency(format!(
                "fixed dimension mismatch for element {rep}: DFT {fixed_dim}, kernel {kernel_dim}"
            )));
        }
        classes.push(ClassDatum {
            rep_index: rep,
            member_indices: members,
            order,
            eigen_mult,
            age,
            fixed_dim,
        });
    }
    classes.sort_by_key(|c| (c.age, c.order, c.rep_index));
    let counted: usize = classes.iter().map(|c| c.member_indices.len()).sum();
    if counted != size {
        return Err(QaleError::InternalInconsistency(
            "conjugacy classes do not partition the group".into(),
        ));
    }
    Ok(classes)
}

/// Conjugacy classes of a subgroup under its own conjugation action, with
/// spectral data taken in the ambient representation. Sorted like
/// [`conjugacy_classes`].
pub fn conjugacy_classes_of_subgroup(
    group: &GroupData,
    subgroup: &[usize],
) -> Result<Vec<ClassDatum>> {
    validate_subgroup(group, subgroup)?;
    let mut seen: std::collections::BTreeSet<usize> = std::collections::BTreeSet::new();
    let mut classes = Vec::new();
    for &i in subgroup {
        if seen.contains(&i) {
            continue;
        }
        let mut members: Vec<usize> = subgroup.iter().map(|&g| group.conjugate(g, i)).collect();
        members.sort_unstable();
        members.dedup();
        seen.extend(members.iter().copied());
        let rep = members[0];
        let order = group.element_order(rep);
        let eigen_mult = eigen_multiplicities(group, rep)?;
        let age = age_from_mult(group, rep, &eigen_mult)?;
        let fixed_dim = eigen_mult.get(&0).copied().unwrap_or(0);
        classes.push(ClassDatum {
            rep_index: rep,
            member_indices: members,
            order,
            eigen_mult,
            age,
            fixed_dim,
        });
    }
    classes.sort_by_key(|c| (c.age, c.order, c.rep_index));
    Ok(classes)
}

/// Dimension and canonical basis of the fixed space of a subgroup, via the
/// averaged projector P = (1/|H|) sum_h h. The rank of P is cross-checked
/// against the character formula (1/|H|) sum_h tr(h).
pub fn fixed_space(group: &GroupData, subgroup: &[usize]) -> Result<(usize, CycMatrix)> {
    validate_subgroup(group, subgroup)?;
    let n = group.n();
    let m = group.order_m();
    let mut sum = CycMatrix::zero(n, n, m)?;
    let mut char_sum = CycNumber::zero(m);
    for &h in subgroup {
        let e = group.element(h);
        sum = sum.add(e);
        char_sum = &char_sum + &e.trace();
    }
    let card = CycNumber::from_integer(m, subgroup.len() as i64);
    let projector = sum.scale(&card.inverse()?);
    let dim = projector.rank();
    // Individual traces may be irrational; their subgroup average is the
    // fixed dimension and must come out a rational integer.
    let avg = char_sum.checked_div(&card)?;
    let Some(avg_q) = avg.as_rational() else {
        return Err(QaleError::InternalInconsistency(
            "averaged character is not rational".into(),
        ));
    };
    if !avg_q.is_integer() || avg_q.to_integer().to_usize() != Some(dim) {
        return Err(QaleError::InternalInconsistency(format!(
            "fixed-space dimension disagrees: projector rank {dim}, character average {avg_q}"
        )));
    }
    let basis = projector.column_space();
    Ok((dim, basis))
}

fn validate_subgroup(group: &GroupData, subgroup: &[usize]) -> Result<()> {
    if !subgroup.contains(&0) {
        return Err(QaleError::NotASubgroup {
            reason: "missing the identity".into(),
        });
    }
    let set: std::collections::BTreeSet<usize> = subgroup.iter().copied().collect();
    if set.len() != subgroup.len() {
        return Err(QaleError::NotASubgroup {
            reason: "duplicate element indices".into(),
        });
    }
    for &a in subgroup {
        if a >= group.len() {
            return Err(QaleError::NotASubgroup {
                reason: format!("index {a} out of range"),
            });
        }
        for &b in subgroup {
            if !set.contains(&group.mul(a, b)) {
                return Err(QaleError::NotASubgroup {
                    reason: format!("not closed: {a} * {b} escapes the set"),
                });
            }
        }
    }
    Ok(())
}
