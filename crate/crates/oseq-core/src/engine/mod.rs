//! The exact counting engine.
//!
//! Counts are read off layered truncated generating functions: layer `p`
//! refines layer `p − 1`, and after layer `p` the count for every
//! multiplicity `d ≤ p` is a single stored coefficient. The iteration keeps
//! two layers alive (source and successor), snapshots a single layer for
//! resumption, and exposes two storage layouts with bit-identical results.
//! Independent closed-form sums over the enumeration oracle cross-check the
//! small-multiplicity counts.

mod coeff;
mod compressed;
mod layer;
mod poly;
mod run;
mod sums;
mod table;

pub use layer::{init_layer_p1, next_layer, Layer};
pub use poly::{poly_mul_trunc, TruncPoly};
pub use run::{
    run_iterative, run_iterative_detailed, CheckpointOptions, EngineOptions, EngineStats,
    LayerMode, LayerProgress, ProgressFn,
};
pub use sums::{ad_via_closed_sums, od_via_closed_sums};
pub use table::CountTable;
