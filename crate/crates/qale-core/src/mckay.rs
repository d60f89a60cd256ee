//! Cohomology tables of crepant resolutions from age-graded conjugacy-class
//! counts, including the B_i-invariant tables of the ALE pieces Y_i.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{QaleError, Result};
use crate::exact::CycMatrix;
use crate::group::{conjugacy_classes_of_subgroup, ClassDatum, GroupData};
use crate::strata::Stratum;

/// A graded dimension table: degree -> nonnegative dimension, zeros omitted.
/// The universal output currency of the toolkit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomTable {
    pub label: String,
    pub top_degree: usize,
    dims: BTreeMap<usize, u64>,
}

impl CohomTable {
    pub fn new(label: impl Into<String>, top_degree: usize) -> Self {
        CohomTable {
            label: label.into(),
            top_degree,
            dims: BTreeMap::new(),
        }
    }

    pub fn from_pairs(label: impl Into<String>, top_degree: usize, pairs: &[(usize, u64)]) -> Self {
        let mut t = Self::new(label, top_degree);
        for &(k, v) in pairs {
            t.set(k, v);
        }
        t
    }

    pub fn get(&self, degree: usize) -> u64 {
        self.dims.get(&degree).copied().unwrap_or(0)
    }

    /// `get` with a signed index; negative degrees are empty.
    pub fn get_signed(&self, degree: i64) -> u64 {
        if degree < 0 {
            0
        } else {
            self.get(degree as usize)
        }
    }

    pub fn set(&mut self, degree: usize, dim: u64) {
        assert!(
            degree <= self.top_degree,
            "degree {degree} beyond top degree {}",
            self.top_degree
        );
        if dim == 0 {
            self.dims.remove(&degree);
        } else {
            self.dims.insert(degree, dim);
        }
    }

    pub fn add(&mut self, degree: usize, dim: u64) {
        let v = self.get(degree) + dim;
        self.set(degree, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.dims.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.dims.values().sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.iter()
            .map(|(k, v)| if k % 2 == 0 { v as i64 } else { -(v as i64) })
            .sum()
    }

    /// Equal entries regardless of label/top bookkeeping.
    pub fn same_dims(&self, other: &CohomTable) -> bool {
        self.dims == other.dims
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

impl Serialize for CohomTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CohomTable", 3)?;
        st.serialize_field("label", &self.label)?;
        st.serialize_field("top_degree", &self.top_degree)?;
        let pairs: Vec<(usize, u64)> = self.iter().collect();
        st.serialize_field("dims", &pairs)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CohomTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            label: String,
            top_degree: usize,
            dims: Vec<(usize, u64)>,
        }
        let raw = Raw::deserialize(d)?;
        Ok(CohomTable::from_pairs(raw.label, raw.top_degree, &raw.dims))
    }
}

impl std::fmt::Display for CohomTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        write!(f, "}}")
    }
}

/// Betti numbers of a crepant resolution of C^n/G: dim H^{2k} = number of
/// conjugacy classes of age k, odd degrees zero.
pub fn crepant_betti(classes: &[ClassDatum], n: usize) -> CohomTable {
    let mut t = CohomTable::new("H^*(X)", 2 * n);
    for c in classes {
        t.add(2 * c.age, 1);
    }
    t
}

/// The invariant and plain tables of one ALE piece Y_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AleTables {
    /// dim H^{2k}(Y_i)^{B_i} modeled as the number of B_i-orbits of age-k
    /// conjugacy classes of A_i
    pub invariant: CohomTable,
    /// dim H^{2k}(Y_i): the number of age-k classes of A_i
    pub plain: CohomTable,
}

/// Cohomology of the ALE piece over a stratum: conjugacy classes of A_i with
/// ages taken in the ambient representation (A_i is trivial on V_i, so these
/// equal the ages on W_i), graded by age; B_i acts by conjugation through
/// the coset representatives and invariant dimensions count its orbits.
pub fn ale_invariant_betti(stratum: &Stratum, group: &GroupData) -> Result<AleTables> {
    // Hypothesis: A acts freely off V_i, i.e. Fix(a) = V_i for a != id.
    let id = CycMatrix::identity(group.n(), group.order_m())?;
    for &a in &stratum.a_indices {
        if a == 0 {
            continue;
        }
        let fix = group.element(a).sub(&id).nullspace();
        if !fix.same_row_space(&stratum.basis) {
            return Err(QaleError::FreeActionViolated);
        }
    }
    let classes = conjugacy_classes_of_subgroup(group, &stratum.a_indices)?;
    let top = 2 * stratum.m_i;
    let mut plain = CohomTable::new("H^*(Y_i)", top);
    for c in &classes {
        plain.add(2 * c.age, 1);
    }
    // B-action: conjugation by each coset representative permutes A-classes;
    // union-find the orbits.
    let class_of = |elem: usize| -> Result<usize> {
        classes
            .iter()
            .position(|c| c.member_indices.contains(&elem))
            .ok_or_else(|| {
                QaleError::InternalInconsistency(
                    "conjugation by N(V_i) does not preserve A_i".into(),
                )
            })
    };
    let mut parent: Vec<usize> = (0..classes.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for &b in &stratum.b_coset_reps {
        for (ci, c) in classes.iter().enumerate() {
            let moved = group.conjugate(b, c.rep_index);
            let cj = class_of(moved)?;
            let (ri, rj) = (find(&mut parent, ci), find(&mut parent, cj));
            if ri != rj {
                parent[ri] = rj;
            }
        }
    }
    let mut invariant = CohomTable::new("H^*(Y_i)^B", top);
    let mut roots = std::collections::BTreeSet::new();
    for ci in 0..classes.len() {
        roots.insert(find(&mut parent, ci));
    }
    for r in roots {
        invariant.add(2 * classes[r].age, 1);
    }
    Ok(AleTables { invariant, plain })
}

/// Poincare-Lefschetz at dimension level: `dims_c[k] = dims[real_dim - k]`.
pub fn compact_support_betti(t: &CohomTable, real_dim: usize) -> CohomTable {
    let mut out = CohomTable::new(format!("{}_c", t.label), real_dim);
    for (k, v) in t.iter() {
        out.add(real_dim - k, v);
    }
    out
}

/// L2 table of an ALE resolution: the image of H_c^k -> H^k keeps every
/// positive degree below the top and drops degree 0 (H_c^0 -> H^0 vanishes
/// on a connected noncompact space).
pub fn ale_l2_betti(t: &CohomTable) -> CohomTable {
    debug_assert!(
        t.iter().all(|(k, _)| k % 2 == 0 && k < t.top_degree.max(1)),
        "expected an even table vanishing at the top degree"
    );
    let mut out = CohomTable::new("L2 H^*(Y)", t.top_degree);
    for (k, v) in t.iter() {
        if k > 0 {
            out.add(k, v);
        }
    }
    out
}
