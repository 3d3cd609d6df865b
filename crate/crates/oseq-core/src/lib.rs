//! Exact counting of finite O-sequences (Hilbert functions of standard graded
//! Artinian algebras) of given multiplicity.
//!
//! The crate has four layers:
//!
//! * [`combinatorics`] — definitions and brute-force oracles: the Macaulay
//!   growth bound, O-sequence validity, exhaustive enumeration, the
//!   constrained counts `O(p,n,k,d)`, and the integer partition function.
//! * [`engine`] — the production counter: truncated generating functions
//!   `F_{p,n,k}(t)` built layer by layer with exact big-integer convolution,
//!   yielding `O_d` and `A_d` for all `d ≤ D`, with checkpoint/resume.
//! * [`calibrate`] — evaluation of the explicit asymptotic bounds `up(d)` and
//!   `low(d)`, least-squares fits of `ln O_d`, affine rescaling plus max-shift
//!   calibration, discrepancy statistics, prediction curves and the
//!   prediction zone.
//! * [`properties`] — checkers for the proven structural claims
//!   (sub-Fibonacci behaviour, ratio monotonicity, the partition-function
//!   sandwich) that double as end-to-end validation of the engine.
//!
//! All counts are exact; floating point appears only in the calibration
//! layer, and every float-producing routine there is deterministic
//! (fixed-order compensated summation).

pub mod calibrate;
pub mod checkpoint;
pub mod combinatorics;
pub mod engine;
pub mod error;
pub mod io;
pub mod properties;

pub use calibrate::{
    calibrate_lower, calibrate_upper, least_squares, log_of_bigcount, low_bound, predict,
    prediction_zone, up_bound, BoundKind, CalibrationReport, DiscrepancyStats, FitLine,
    LowerShiftRange, SeriesStats, ZoneStats,
};
pub use checkpoint::{load_layer, save_layer};
pub use combinatorics::{
    binomial_expansion, count_opnkd_oracle, enumerate_o_sequences, is_o_sequence, macaulay_bound,
    partition_number, BinomialExpansion, OSequence,
};
pub use engine::{
    ad_via_closed_sums, init_layer_p1, next_layer, od_via_closed_sums, poly_mul_trunc,
    run_iterative, run_iterative_detailed, CheckpointOptions, CountTable, EngineOptions,
    EngineStats, Layer, LayerMode, LayerProgress, ProgressFn, TruncPoly,
};
pub use error::{Error, Result};
pub use io::{emit_od_csv, emit_series, ingest_reference, render_svg_chart, PlotSeries};
pub use properties::{
    check_a_subfibonacci, check_ratio_decreasing, check_sz_sandwich, is_sub_fibonacci,
    roberts_diagnostic, run_property_suite, PropertyVerdict, RobertsDiagnostic, Witness,
    WitnessKind, DEFAULT_RATIO_START,
};

/// Arbitrary-precision non-negative integer holding `O_d`, `A_d`,
/// `O(p,n,k,d)` and partition numbers. Exact at every magnitude.
pub type BigCount = num_bigint::BigUint;
