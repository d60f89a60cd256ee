//! qale-core: exact singularity data of C^n/G and the combinatorics of the
//! L2 cohomology of QALE resolutions.
//!
//! Pipeline, bottom to top:
//!
//! * [`exact`] -- arithmetic in Q(zeta_m) and exact linear algebra;
//! * [`group`] -- closure of a finite unitary matrix group, classes, ages;
//! * [`strata`] -- the fixed-subspace stratification and its validation;
//! * [`mckay`] -- age-graded cohomology tables of crepant resolutions;
//! * [`assembly`] -- the end / boundary / crepant L2 tables and the
//!   cone and conical-end decision rules;
//! * [`homology`] -- exact-rational consistency oracles (betti numbers,
//!   exact-sequence feasibility, the five-column ladder lemma);
//! * [`oracle`] -- numerical quadrature checks of the Hardy inequalities
//!   and the cone integral operators;
//! * [`groupfile`] / [`pipeline`] -- file format and report assembly used
//!   by the `qale` CLI.

pub mod assembly;
pub mod error;
pub mod exact;
pub mod group;
pub mod groupfile;
pub mod homology;
pub mod mckay;
pub mod oracle;
pub mod pipeline;
pub mod strata;
pub mod testkit;

pub use error::{QaleError, Result};
