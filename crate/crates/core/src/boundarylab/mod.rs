//! Boundary diagnostics for discs on U: the Nevanlinna characteristic,
//! cluster-set and radial-limit sampling, range density near a boundary
//! point, and proper pairs (P, Q) on C² with linear Q.

mod cluster;
mod fatou;
mod nevanlinna;
mod proper;
mod range;

pub use cluster::{cluster_sample, in_stolz_angle, ClusterRecord, ClusterSummary, Scheme};
pub use fatou::{chordal, fatou_scan, DirectionRecord, FatouScan};
pub use nevanlinna::{characteristic_curve, log_plus, nevanlinna_t, Characteristic, CharacteristicCurve, ScalarFn};
pub use proper::{
    factor_lines, is_admissible, proper_pair, proper_pair_with, BiPoly, LinearForm, ProperOptions, ProperPair,
    RayEvidence,
};
pub use range::{range_density, target_grid, RangeReport};
