//! Exact-rational chain-complex utilities: betti numbers, dimension-level
//! exactness feasibility for five-term sequences, and the two-row ladder
//! lemma verified by explicit rank arithmetic on random instances.
//!
//! Linear maps are matrices acting on column vectors: a map Q^p -> Q^q is a
//! q x p matrix and composition is matrix multiplication.

use rand::Rng;

use crate::assembly::{boundary_betti, end_l2, end_l2_weighted, su3_l2, EndGeometry};
use crate::error::{QaleError, Result};
use crate::exact::{CycMatrix, Rational};
use crate::group::{conjugacy_classes, GroupData};
use crate::mckay::{crepant_betti, CohomTable};
use crate::strata::StratificationReport;

/// A cochain complex of rational vector spaces: d_k maps degree k to k+1,
/// so `maps[k]` has shape `dims[k+1] x dims[k]`.
#[derive(Debug, Clone)]
pub struct RatComplex {
    pub dims: Vec<usize>,
    pub maps: Vec<CycMatrix>,
}

impl RatComplex {
    pub fn new(dims: Vec<usize>, maps: Vec<CycMatrix>) -> Result<Self> {
        if maps.len() + 1 != dims.len() {
            return Err(QaleError::DimensionMismatch(format!(
                "{} maps do not connect {} spaces",
                maps.len(),
                dims.len()
            )));
        }
        for (k, m) in maps.iter().enumerate() {
            if m.rows() != dims[k + 1] || m.cols() != dims[k] {
                return Err(QaleError::DimensionMismatch(format!(
                    "map {k} has shape {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    dims[k + 1],
                    dims[k]
                )));
            }
        }
        let c = RatComplex { dims, maps };
        for k in 0..c.maps.len().saturating_sub(1) {
            if !c.maps[k + 1].matmul(&c.maps[k]).is_zero() {
                return Err(QaleError::NotAComplex { degree: k });
            }
        }
        Ok(c)
    }
}

/// Betti numbers: `dim H^k = dims[k] - rank d_k - rank d_(k-1)`.
pub fn betti(c: &RatComplex) -> CohomTable {
    let top = c.dims.len().saturating_sub(1);
    let mut t = CohomTable::new("H^*(complex)", top);
    for k in 0..c.dims.len() {
        let out_rank = if k < c.maps.len() {
            c.maps[k].rank()
        } else {
            0
        };
        let in_rank = if k > 0 { c.maps[k - 1].rank() } else { 0 };
        t.set(k, (c.dims[k] - out_rank - in_rank) as u64);
    }
    t
}

/// Can a sequence of spaces with these dimensions be exact at every interior
/// spot? True iff there are ranks r_i with `r_i <= min(dims[i], dims[i+1])`
/// and `r_(i-1) + r_i = dims[i]` at each interior i. The first rank determines
/// the rest, so the enumeration is a single scan per choice of r_0.
pub fn exactness_feasible(dims: &[u64]) -> bool {
    if dims.len() < 3 {
        return true;
    }
    let bound = |i: usize| -> u64 { dims[i].min(dims[i + 1]) };
    'outer: for r0 in 0..=bound(0) {
        let mut prev = r0;
        for (i, &d) in dims.iter().enumerate().take(dims.len() - 1).skip(1) {
            let Some(ri) = d.checked_sub(prev) else {
                continue 'outer;
            };
            if ri > bound(i) {
                continue 'outer;
            }
            prev = ri;
        }
        return true;
    }
    false
}

/// A 2 x 5 commutative ladder with exact rows:
///
/// ```text
/// A  --> B  --> C  --> D  --> E         (upper: 4 maps)
/// |f0    |f1    |f2    |f3    |f4       (verticals: 5 maps)
/// A' --> B' --> C' --> D' --> E'        (lower: 4 maps)
/// ```
#[derive(Debug, Clone)]
pub struct Ladder {
    pub upper: Vec<CycMatrix>,
    pub lower: Vec<CycMatrix>,
    pub verticals: Vec<CycMatrix>,
}

fn image(m: &CycMatrix) -> CycMatrix {
    m.column_space()
}

fn kernel(m: &CycMatrix) -> CycMatrix {
    m.nullspace()
}

fn subspace_eq(a: &CycMatrix, b: &CycMatrix) -> bool {
    a.same_row_space(b)
}

fn image_under(space: &CycMatrix, map: &CycMatrix) -> CycMatrix {
    // rows of `space` are vectors in the domain; their images are rows of
    // space * map^T
    space.matmul(&map.transpose()).row_basis()
}

/// Checks the hypotheses of the diagram lemma, then verifies by explicit
/// rank arithmetic that the conclusion sequence
/// A' -> B' -> im(C -> C') -> D -> E is exact. Returns `Ok(true)` when it
/// is; every hypothesis-satisfying input must produce `Ok(true)`.
pub fn verify_ladder(ladder: &Ladder) -> Result<bool> {
    let Ladder {
        upper,
        lower,
        verticals,
    } = ladder;
    if upper.len() != 4 || lower.len() != 4 || verticals.len() != 5 {
        return Err(QaleError::HypothesisViolated(
            "expected 4 upper maps, 4 lower maps and 5 verticals".into(),
        ));
    }
    for i in 0..4 {
        if upper[i].cols() != verticals[i].cols()
            || upper[i].rows() != verticals[i + 1].cols()
            || lower[i].cols() != verticals[i].rows()
            || lower[i].rows() != verticals[i + 1].rows()
        {
            return Err(QaleError::HypothesisViolated(format!(
                "shape mismatch around square {i}"
            )));
        }
        let left = verticals[i + 1].matmul(&upper[i]);
        let right = lower[i].matmul(&verticals[i]);
        if left != right.promote_to_lcm(left.order()) {
            return Err(QaleError::HypothesisViolated(format!(
                "square {i} does not commute"
            )));
        }
    }
    for (name, row) in [("upper", upper), ("lower", lower)] {
        for i in 0..3 {
            if !subspace_eq(&image(&row[i]), &kernel(&row[i + 1])) {
                return Err(QaleError::HypothesisViolated(format!(
                    "{name} row not exact at spot {}",
                    i + 1
                )));
            }
        }
    }
    if verticals[1].rank() != verticals[1].rows() {
        return Err(QaleError::HypothesisViolated(
            "second vertical is not surjective".into(),
        ));
    }
    for (idx, name) in [(3usize, "fourth"), (4usize, "fifth")] {
        if verticals[idx].rank() != verticals[idx].cols() {
            return Err(QaleError::HypothesisViolated(format!(
                "{name} vertical is not injective"
            )));
        }
    }

    // Conclusion sequence A' -> B' -> im f2 -> im f3 -> im f4, with the last
    // two spaces identified with D and E through the injective verticals.
    let im_f2 = image(&verticals[2]);
    let im_f3 = image(&verticals[3]);

    // exact at B': im(A' -> B') = ker(B' -> im f2) = ker(lower[1])
    let ok_b = subspace_eq(&image(&lower[0]), &kernel(&lower[1]));
    // exact at im f2: im(B' -> im f2) = ker(lower[2]) meet im f2
    let ok_c = subspace_eq(
        &image(&lower[1]),
        &kernel(&lower[2]).row_space_intersection(&im_f2),
    );
    // exact at im f3 ~ D: the image of im f2 under lower[2] equals
    // ker(lower[3]) meet im f3
    let ok_d = subspace_eq(
        &image_under(&im_f2, &lower[2]),
        &kernel(&lower[3]).row_space_intersection(&im_f3),
    );
    Ok(ok_b && ok_c && ok_d)
}

/// Piece library for the random ladder generator. Each elementary piece is a
/// hypothesis-satisfying ladder on its own; direct sums and base changes
/// preserve the hypotheses.
#[derive(Debug, Clone, Copy)]
enum Piece {
    // upper-row intervals with zero lower row
    UpperA,
    UpperAB,
    UpperBC,
    // lower-row intervals with zero upper row
    LowerA,
    LowerCD,
    LowerDE,
    LowerE,
    // matched intervals with identity verticals
    PairA,
    PairAB,
    PairBC,
    PairCD,
    PairDE,
    PairE,
    // upper A ~ B over lower A' only (f1 surjective onto 0)
    UpperAbOverA,
}

const PIECES: [Piece; 14] = [
    Piece::UpperA,
    Piece::UpperAB,
    Piece::UpperBC,
    Piece::LowerA,
    Piece::LowerCD,
    Piece::LowerDE,
    Piece::LowerE,
    Piece::PairA,
    Piece::PairAB,
    Piece::PairBC,
    Piece::PairCD,
    Piece::PairDE,
    Piece::PairE,
    Piece::UpperAbOverA,
];

impl Piece {
    /// (upper dims, lower dims) of the five columns for one copy.
    fn dims(self) -> ([usize; 5], [usize; 5]) {
        match self {
            Piece::UpperA => ([1, 0, 0, 0, 0], [0; 5]),
            Piece::UpperAB => ([1, 1, 0, 0, 0], [0; 5]),
            Piece::UpperBC => ([0, 1, 1, 0, 0], [0; 5]),
            Piece::LowerA => ([0; 5], [1, 0, 0, 0, 0]),
            Piece::LowerCD => ([0; 5], [0, 0, 1, 1, 0]),
            Piece::LowerDE => ([0; 5], [0, 0, 0, 1, 1]),
            Piece::LowerE => ([0; 5], [0, 0, 0, 0, 1]),
            Piece::PairA => ([1, 0, 0, 0, 0], [1, 0, 0, 0, 0]),
            Piece::PairAB => ([1, 1, 0, 0, 0], [1, 1, 0, 0, 0]),
            Piece::PairBC => ([0, 1, 1, 0, 0], [0, 1, 1, 0, 0]),
            Piece::PairCD => ([0, 0, 1, 1, 0], [0, 0, 1, 1, 0]),
            Piece::PairDE => ([0, 0, 0, 1, 1], [0, 0, 0, 1, 1]),
            Piece::PairE => ([0, 0, 0, 0, 1], [0, 0, 0, 0, 1]),
            Piece::UpperAbOverA => ([1, 1, 0, 0, 0], [1, 0, 0, 0, 0]),
        }
    }

    /// Which consecutive columns the upper / lower interval connects, and
    /// which verticals are identities.
    fn upper_edge(self) -> Option<usize> {
        match self {
            Piece::UpperAB | Piece::PairAB | Piece::UpperAbOverA => Some(0),
            Piece::UpperBC | Piece::PairBC => Some(1),
            Piece::PairCD => Some(2),
            Piece::PairDE => Some(3),
            _ => None,
        }
    }

    fn lower_edge(self) -> Option<usize> {
        match self {
            Piece::PairAB => Some(0),
            Piece::PairBC => Some(1),
            Piece::LowerCD | Piece::PairCD => Some(2),
            Piece::LowerDE | Piece::PairDE => Some(3),
            _ => None,
        }
    }

    fn identity_verticals(self) -> &'static [usize] {
        match self {
            Piece::PairA => &[0],
            Piece::PairAB => &[0, 1],
            Piece::PairBC => &[1, 2],
            Piece::PairCD => &[2, 3],
            Piece::PairDE => &[3, 4],
            Piece::PairE => &[4],
            Piece::UpperAbOverA => &[0],
            _ => &[],
        }
    }
}

/// Random invertible integer matrix built from elementary row operations.
fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> CycMatrix {
    let mut rows = vec![vec![0i64; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 1;
    }
    for _ in 0..(2 * n) {
        if n < 2 {
            break;
        }
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        match rng.gen_range(0..3) {
            0 => rows.swap(i, j),
            1 => {
                let lam: i64 = rng.gen_range(-2..=2);
                let src = rows[j].clone();
                for (cell, s) in rows[i].iter_mut().zip(src) {
                    *cell += lam * s;
                }
            }
            _ => {
                for cell in rows[i].iter_mut() {
                    *cell = -*cell;
                }
            }
        }
    }
    let flat: Vec<i64> = rows.into_iter().flatten().collect();
    CycMatrix::from_integers(n, n, &flat).expect("small unimodular matrix")
}

/// Inverse of an invertible rational matrix via RREF of [M | I].
fn inverse(m: &CycMatrix) -> CycMatrix {
    let n = m.rows();
    let id = CycMatrix::identity(n, m.order()).unwrap();
    // solve by augmenting columns: RREF of [M | I] ends as [I | M^-1]
    let mut entries = Vec::with_capacity(n * 2 * n);
    for r in 0..n {
        for c in 0..n {
            entries.push(m.entry(r, c).clone());
        }
        for c in 0..n {
            entries.push(id.entry(r, c).clone());
        }
    }
    let aug = CycMatrix::new_internal(n, 2 * n, entries);
    let red = aug.rref().matrix;
    let mut inv_entries = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            inv_entries.push(red.entry(r, n + c).clone());
        }
    }
    CycMatrix::new_internal(n, n, inv_entries)
}

/// Draw a random hypothesis-satisfying ladder with every column dimension
/// at most `max_dim`: a random direct sum of elementary pieces conjugated
/// by random unimodular base changes at all ten nodes.
pub fn random_ladder<R: Rng>(rng: &mut R, max_dim: usize) -> Ladder {
    // sample pieces while respecting the per-column bound
    let mut upper_dims = [0usize; 5];
    let mut lower_dims = [0usize; 5];
    let mut chosen = Vec::new();
    for _ in 0..(3 * max_dim) {
        let p = PIECES[rng.gen_range(0..PIECES.len())];
        let (u, l) = p.dims();
        let fits =
            (0..5).all(|i| upper_dims[i] + u[i] <= max_dim && lower_dims[i] + l[i] <= max_dim);
        if fits {
            for i in 0..5 {
                upper_dims[i] += u[i];
                lower_dims[i] += l[i];
            }
            chosen.push(p);
        }
    }

    // block offsets per piece
    let mut upper = vec![
        CycMatrix::zero(upper_dims[1], upper_dims[0], 1).unwrap(),
        CycMatrix::zero(upper_dims[2], upper_dims[1], 1).unwrap(),
        CycMatrix::zero(upper_dims[3], upper_dims[2], 1).unwrap(),
        CycMatrix::zero(upper_dims[4], upper_dims[3], 1).unwrap(),
    ];
    let mut lower = vec![
        CycMatrix::zero(lower_dims[1], lower_dims[0], 1).unwrap(),
        CycMatrix::zero(lower_dims[2], lower_dims[1], 1).unwrap(),
        CycMatrix::zero(lower_dims[3], lower_dims[2], 1).unwrap(),
        CycMatrix::zero(lower_dims[4], lower_dims[3], 1).unwrap(),
    ];
    let mut verticals = (0..5)
        .map(|i| CycMatrix::zero(lower_dims[i], upper_dims[i], 1).unwrap())
        .collect::<Vec<_>>();

    let set_one = |m: &mut CycMatrix, r: usize, c: usize| {
        let mut entries: Vec<Rational> = m
            .entries()
            .iter()
            .map(|e| e.as_rational().unwrap())
            .collect();
        entries[r * m.cols() + c] = crate::exact::rat(1);
        *m = CycMatrix::from_rationals(m.rows(), m.cols(), entries).unwrap();
    };

    let mut upper_off = [0usize; 5];
    let mut lower_off = [0usize; 5];
    for p in chosen {
        let (u, l) = p.dims();
        if let Some(e) = p.upper_edge() {
            set_one(&mut upper[e], upper_off[e + 1], upper_off[e]);
        }
        if let Some(e) = p.lower_edge() {
            set_one(&mut lower[e], lower_off[e + 1], lower_off[e]);
        }
        for &v in p.identity_verticals() {
            set_one(&mut verticals[v], lower_off[v], upper_off[v]);
        }
        for i in 0..5 {
            upper_off[i] += u[i];
            lower_off[i] += l[i];
        }
    }

    // random base change at every node: x -> P x, maps conjugate accordingly
    let up: Vec<CycMatrix> = (0..5)
        .map(|i| random_unimodular(rng, upper_dims[i]))
        .collect();
    let lp: Vec<CycMatrix> = (0..5)
        .map(|i| random_unimodular(rng, lower_dims[i]))
        .collect();
    for i in 0..4 {
        upper[i] = up[i + 1].matmul(&upper[i]).matmul(&inverse(&up[i]));
        lower[i] = lp[i + 1].matmul(&lower[i]).matmul(&inverse(&lp[i]));
    }
    for i in 0..5 {
        verticals[i] = lp[i].matmul(&verticals[i]).matmul(&inverse(&up[i]));
    }

    Ladder {
        upper,
        lower,
        verticals,
    }
}

/// Run `count` random hypothesis-satisfying ladders through the verifier.
/// The lemma says every one of them must verify.
pub fn run_ladder_suite(seed: u64, count: usize, max_dim: usize) -> crate::oracle::SuiteResult {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    for _ in 0..count {
        if verify_ladder(&random_ladder(&mut rng, max_dim)) == Ok(true) {
            passed += 1;
        }
    }
    crate::oracle::SuiteResult {
        passed,
        total: count,
    }
}

/// Assemble the Mayer-Vietoris dimension data of the SU(3) crepant sequence
/// and check exact-rank feasibility at every degree k in [0, 2n-1]:
///
///   H^{k-1}(K) + L2_w^{k-1}(O) -> H^{k-1}(dK) -> L2 H^k(X)
///     -> H^k(K) + L2 H^k(O) -> H^k(dK)
pub fn mv_check_su3(group: &GroupData, report: &StratificationReport) -> Result<bool> {
    if group.n() != 3 {
        return Err(QaleError::WrongDimension {
            expected: 3,
            actual: group.n(),
        });
    }
    let classes = conjugacy_classes(group)?;
    let ends = EndGeometry::from_stratification(group, report, &Default::default())?;
    let k_table = crepant_betti(&classes, 3);
    let x_table = su3_l2(&classes, report, 3)?;
    let end_table = end_l2(&ends)?;
    let weighted = end_l2_weighted(&ends)?;
    let boundary = boundary_betti(&ends)?;
    for k in 0..=(2 * group.n() - 1) {
        let km1 = k as i64 - 1;
        let dims = [
            k_table.get_signed(km1) + weighted.get_signed(km1),
            boundary.get_signed(km1),
            x_table.get(k),
            k_table.get(k) + end_table.get(k),
            boundary.get(k),
        ];
        if !exactness_feasible(&dims) {
            return Ok(false);
        }
    }
    Ok(true)
}
