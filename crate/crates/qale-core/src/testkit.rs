//! Shared fixtures for unit and integration tests: the worked groups from
//! the literature plus a few synthetic ones exercising nontrivial B-actions
//! and non-isolated stratifications.

use crate::exact::{CycMatrix, CycNumber};
use crate::group::{close_group, GroupData, DEFAULT_MAX_ORDER};

pub fn zeta(m: usize, e: i64) -> CycNumber {
    CycNumber::root_of_unity(m, e).unwrap()
}

/// Joyce example 9.3.5: Z4 generated by (z1,z2,z3) -> (-z1, i z2, i z3).
pub fn joyce_935() -> GroupData {
    let g =
        CycMatrix::diagonal(vec![CycNumber::from_integer(4, -1), zeta(4, 1), zeta(4, 1)]).unwrap();
    close_group(&[g], DEFAULT_MAX_ORDER).unwrap()
}

/// Joyce example 9.3.6: Z2 x Z2 of diagonal +-1 matrices in SU(3).
pub fn joyce_936() -> GroupData {
    let a = CycMatrix::from_integers(3, 3, &[1, 0, 0, 0, -1, 0, 0, 0, -1]).unwrap();
    let b = CycMatrix::from_integers(3, 3, &[-1, 0, 0, 0, 1, 0, 0, 0, -1]).unwrap();
    close_group(&[a, b], DEFAULT_MAX_ORDER).unwrap()
}

/// S3 acting on {x+y+z=0} in (C^2)^3, realized unitarily on C^4 as
/// (standard representation of S3) tensor C^2 over Q(zeta_3).
pub fn s3_hilb3() -> GroupData {
    let w = zeta(3, 1);
    let w2 = zeta(3, 2);
    let zero = CycNumber::zero(3);
    #[rustfmt::skip]
    let tau = CycMatrix::new(4, 4, vec![
        zero.clone(), zero.clone(), w2.clone(), zero.clone(),
        zero.clone(), zero.clone(), zero.clone(), w2.clone(),
        w.clone(), zero.clone(), zero.clone(), zero.clone(),
        zero.clone(), w.clone(), zero.clone(), zero.clone(),
    ]).unwrap();
    let sigma = CycMatrix::diagonal(vec![w2.clone(), w2, w.clone(), w]).unwrap();
    close_group(&[tau, sigma], DEFAULT_MAX_ORDER).unwrap()
}

/// Free-acting Z5 = <diag(z5, z5, z5^3)>; no proper strata, the ALE case.
pub fn free_z5() -> GroupData {
    let g = CycMatrix::diagonal(vec![zeta(5, 1), zeta(5, 1), zeta(5, 3)]).unwrap();
    close_group(&[g], DEFAULT_MAX_ORDER).unwrap()
}

/// Hilb^2 of the A1 ALE surface: Z2 semidirect (H x H) with H = {+-1} in
/// SU(2), acting on C^2 + C^2 with the block swap.
pub fn hilb2_a1() -> GroupData {
    let a = CycMatrix::from_integers(4, 4, &[-1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1])
        .unwrap();
    let b = CycMatrix::from_integers(4, 4, &[1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1])
        .unwrap();
    #[rustfmt::skip]
    let swap = CycMatrix::from_integers(4, 4, &[
        0, 0, 1, 0,
        0, 0, 0, 1,
        1, 0, 0, 0,
        0, 1, 0, 0,
    ]).unwrap();
    close_group(&[a, b, swap], DEFAULT_MAX_ORDER).unwrap()
}

/// Order-6 subgroup of SU(3) with a nontrivial B-action: <diag(1, w, w^2)>
/// extended by the element (x,y,z) -> (-x, z, y), which inverts the Z3 by
/// conjugation. The single-line stratum span(e1) then has A = Z3, B = Z2.
pub fn s3_in_su3() -> GroupData {
    let g = CycMatrix::diagonal(vec![CycNumber::one(3), zeta(3, 1), zeta(3, 2)]).unwrap();
    #[rustfmt::skip]
    let u = CycMatrix::from_integers(3, 3, &[
        -1, 0, 0,
        0, 0, 1,
        0, 1, 0,
    ]).unwrap();
    close_group(&[g, u], DEFAULT_MAX_ORDER).unwrap()
}

/// Z3 x Z3 in SU(4) acting with two transverse plane strata.
pub fn z3z3_su4() -> GroupData {
    let a = CycMatrix::diagonal(vec![
        zeta(3, 1),
        zeta(3, 2),
        CycNumber::one(3),
        CycNumber::one(3),
    ])
    .unwrap();
    let b = CycMatrix::diagonal(vec![
        CycNumber::one(3),
        CycNumber::one(3),
        zeta(3, 1),
        zeta(3, 2),
    ])
    .unwrap();
    close_group(&[a, b], DEFAULT_MAX_ORDER).unwrap()
}

/// Z2 x Z2 in SU(4) whose two plane strata share a line: the stratification
/// is NOT isolated (length 3).
pub fn non_isolated_su4() -> GroupData {
    let a = CycMatrix::from_integers(4, 4, &[-1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1])
        .unwrap();
    let b = CycMatrix::from_integers(4, 4, &[1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1])
        .unwrap();
    close_group(&[a, b], DEFAULT_MAX_ORDER).unwrap()
}
