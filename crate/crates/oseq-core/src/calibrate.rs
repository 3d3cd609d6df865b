//! Asymptotic bound evaluation and empirical calibration.
//!
//! The closed-form envelopes `up(d)` and `low(d)` bound `ln O_d` from above
//! and below but with huge slack. Calibration tightens them against computed
//! data: fit least-squares lines to both `ln O_d` and the bound over the
//! data horizon, rescale the bound affinely so the two lines coincide, then
//! shift by the worst in-range violation so the curve is one-sided again.
//! The result is a two-coefficient formula (`slope_ratio`, `intercept`)
//! whose in-range discrepancy drops by orders of magnitude, plus honest
//! statistics about what it does and where it fails.
//!
//! Everything here is double precision; the only contact with exact data is
//! [`log_of_bigcount`], which loses well under `1e-12` relative.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::BigCount;

/// Upper envelope for `ln O_d`, defined for `d ≥ 1`:
/// `√(2d)·(ln d + π/√3) − ln(24d)/2`.
pub fn up_bound(d: u32) -> f64 {
    assert!(d >= 1, "the upper envelope is defined for d >= 1");
    let d = d as f64;
    (2.0 * d).sqrt() * (d.ln() + PI / 3f64.sqrt()) - (24.0 * d).ln() / 2.0
}

/// Lower envelope for `ln O_d`, defined for `d ≥ 2`:
/// `π·√(2(d−1)/3) − ln(4(d−1)√3)`.
pub fn low_bound(d: u32) -> Result<f64> {
    if d < 2 {
        return Err(Error::Domain(format!(
            "the lower envelope is defined for d >= 2, got {d}"
        )));
    }
    let dm1 = (d - 1) as f64;
    Ok(PI * (2.0 * dm1 / 3.0).sqrt() - (4.0 * dm1 * 3f64.sqrt()).ln())
}

/// Natural log of a positive big integer: the top 53 bits carry the
/// mantissa, the remaining bit length scales by `ln 2`. Relative error well
/// below `1e-12` at any magnitude, and exactly 0 for input 1.
pub fn log_of_bigcount(x: &BigCount) -> Result<f64> {
    if *x == BigCount::ZERO {
        return Err(Error::Domain("log of zero is undefined".into()));
    }
    if let Ok(v) = u64::try_from(x) {
        return Ok((v as f64).ln());
    }
    let bits = x.bits();
    let shift = bits - 53;
    let top = u64::try_from(&(x >> shift)).expect("53 bits fit in u64");
    Ok((top as f64).ln() + shift as f64 * LN_2)
}

/// Compensated (Neumaier) summation: immune to the magnitude-ordering
/// artifacts of naive accumulation, so fitted constants are reproducible to
/// the last printed digit across platforms.
pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// A least-squares line `β₀ + β₁·d` over an inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitLine {
    pub beta0: f64,
    pub beta1: f64,
    pub d_lo: u32,
    pub d_hi: u32,
}

impl FitLine {
    pub fn eval(&self, d: u32) -> f64 {
        self.beta0 + self.beta1 * d as f64
    }
}

/// Fits `f(d) ≈ β₀ + β₁·d` over `d_lo..=d_hi` (at least two points).
/// Sums are compensated; the midpoint `(d_lo + d_hi)/2` centers the normal
/// equations so no precision is lost to large `Σd²`.
pub fn least_squares<F: Fn(u32) -> f64>(d_lo: u32, d_hi: u32, f: F) -> Result<FitLine> {
    if d_hi < d_lo + 1 {
        return Err(Error::Domain(format!(
            "a line fit needs at least two points, got [{d_lo}, {d_hi}]"
        )));
    }
    let n = (d_hi - d_lo + 1) as f64;
    let center = (d_lo as f64 + d_hi as f64) / 2.0;
    let mean = neumaier_sum((d_lo..=d_hi).map(&f)) / n;
    let num = neumaier_sum((d_lo..=d_hi).map(|d| (d as f64 - center) * (f(d) - mean)));
    let den = neumaier_sum((d_lo..=d_hi).map(|d| (d as f64 - center) * (d as f64 - center)));
    let beta1 = num / den;
    if !beta1.is_finite() {
        return Err(Error::Domain("line fit produced a non-finite slope".into()));
    }
    Ok(FitLine { beta0: mean - beta1 * center, beta1, d_lo, d_hi })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Upper,
    Lower,
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundKind::Upper => "upper",
            BoundKind::Lower => "lower",
        })
    }
}

/// Which multiplicities the lower-bound shift maximizes over. The bound has
/// known small-multiplicity exceptions, so the default starts at 8; the wide
/// form starts at 2 for diagnosing those exceptions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LowerShiftRange {
    #[default]
    From8,
    From2,
}

/// Signed extrema of one discrepancy series over an inclusive range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesStats {
    pub min: f64,
    pub argmin: u32,
    pub max: f64,
    pub argmax: u32,
    pub max_abs: f64,
    pub argmax_abs: u32,
}

impl SeriesStats {
    fn compute<F: Fn(u32) -> f64>(d_lo: u32, d_hi: u32, f: F) -> Result<SeriesStats> {
        if d_hi < d_lo {
            return Err(Error::Domain(format!(
                "empty statistics range [{d_lo}, {d_hi}]"
            )));
        }
        let first = f(d_lo);
        let mut stats = SeriesStats {
            min: first,
            argmin: d_lo,
            max: first,
            argmax: d_lo,
            max_abs: first.abs(),
            argmax_abs: d_lo,
        };
        for d in d_lo + 1..=d_hi {
            let v = f(d);
            if v < stats.min {
                stats.min = v;
                stats.argmin = d;
            }
            if v > stats.max {
                stats.max = v;
                stats.argmax = d;
            }
            if v.abs() > stats.max_abs {
                stats.max_abs = v.abs();
                stats.argmax_abs = d;
            }
        }
        Ok(stats)
    }
}

/// Discrepancies between data and the bound at its three stages — raw,
/// affinely rescaled (`hat`), and shifted (`calibrated`) — oriented so the
/// raw series is positive where the bound is valid: `up − ln O` for the
/// upper bound, `ln O − low` for the lower.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyStats {
    pub d_lo: u32,
    pub d_hi: u32,
    pub raw: SeriesStats,
    pub hat: SeriesStats,
    pub calibrated: SeriesStats,
}

/// A calibrated bound: `calibrated(d) = slope_ratio · bound(d) + intercept`.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub kind: BoundKind,
    /// Data horizon the fits and shift ran over.
    pub d_horizon: u32,
    /// Least-squares line of `ln O_d`.
    pub fit_target: FitLine,
    /// Least-squares line of the bound over the same range.
    pub fit_bound: FitLine,
    /// `F = β₁(ln O) / β₁(bound)`.
    pub slope_ratio: f64,
    /// Rescale intercept before shifting: `β₀(ln O) − F·β₀(bound)`.
    pub intercept_preshift: f64,
    /// Worst in-range violation of the rescaled curve (always ≥ 0).
    pub shift: f64,
    pub shift_d_lo: u32,
    pub shift_d_hi: u32,
    /// Where the worst violation sits.
    pub shift_argmax: u32,
    /// Final constant: `intercept_preshift + shift` (upper) or `− shift`
    /// (lower), making the calibrated curve one-sided over the shift range.
    pub intercept: f64,
    /// Statistics over the standard reporting range (`[1, D]` upper,
    /// `[8, D]` lower).
    pub stats: DiscrepancyStats,
    /// Lower bound only: the same statistics with the leading exceptional
    /// multiplicities trimmed (the range starts just past the last raw
    /// violation), where the one-sided guarantee genuinely holds.
    pub stats_after_exceptions: Option<DiscrepancyStats>,
}

impl CalibrationReport {
    /// The underlying raw envelope at `d`.
    pub fn bound_at(&self, d: u32) -> f64 {
        match self.kind {
            BoundKind::Upper => up_bound(d),
            BoundKind::Lower => low_bound(d).expect("lower reports evaluate at d >= 2"),
        }
    }

    /// Affinely rescaled bound, before shifting.
    pub fn hat_at(&self, d: u32) -> f64 {
        (self.bound_at(d) - self.fit_bound.beta0) * self.slope_ratio + self.fit_target.beta0
    }

    /// The calibrated curve `slope_ratio · bound(d) + intercept`.
    pub fn calibrated_at(&self, d: u32) -> f64 {
        self.slope_ratio * self.bound_at(d) + self.intercept
    }
}

fn check_log_data(log_o: &[f64], d_horizon: u32) -> Result<()> {
    if (log_o.len() as u64) < d_horizon as u64 {
        return Err(Error::Domain(format!(
            "calibration to horizon {d_horizon} needs that many log-counts, got {}",
            log_o.len()
        )));
    }
    if let Some(i) = log_o[..d_horizon as usize].iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!(
            "log-count at multiplicity {} is not finite",
            i + 1
        )));
    }
    Ok(())
}

/// Calibrates the upper envelope against `log_o` (`log_o[i] = ln O_{i+1}`)
/// over `[1, d_horizon]`: fit both series, rescale, then shift up by the
/// worst remaining violation so the curve dominates the data everywhere in
/// range.
pub fn calibrate_upper(log_o: &[f64], d_horizon: u32) -> Result<CalibrationReport> {
    if d_horizon < 2 {
        return Err(Error::Domain("upper calibration needs a horizon of at least 2".into()));
    }
    check_log_data(log_o, d_horizon)?;
    let lno = |d: u32| log_o[(d - 1) as usize];
    let fit_target = least_squares(1, d_horizon, lno)?;
    let fit_bound = least_squares(1, d_horizon, up_bound)?;
    let slope_ratio = fit_target.beta1 / fit_bound.beta1;
    let intercept_preshift = fit_target.beta0 - slope_ratio * fit_bound.beta0;
    let hat = |d: u32| (up_bound(d) - fit_bound.beta0) * slope_ratio + fit_target.beta0;
    let violation = SeriesStats::compute(1, d_horizon, |d| lno(d) - hat(d))?;
    let shift = violation.max;
    let intercept = intercept_preshift + shift;
    let calibrated = |d: u32| slope_ratio * up_bound(d) + intercept;
    let stats = DiscrepancyStats {
        d_lo: 1,
        d_hi: d_horizon,
        raw: SeriesStats::compute(1, d_horizon, |d| up_bound(d) - lno(d))?,
        hat: SeriesStats::compute(1, d_horizon, |d| hat(d) - lno(d))?,
        calibrated: SeriesStats::compute(1, d_horizon, |d| calibrated(d) - lno(d))?,
    };
    Ok(CalibrationReport {
        kind: BoundKind::Upper,
        d_horizon,
        fit_target,
        fit_bound,
        slope_ratio,
        intercept_preshift,
        shift,
        shift_d_lo: 1,
        shift_d_hi: d_horizon,
        shift_argmax: violation.argmax,
        intercept,
        stats,
        stats_after_exceptions: None,
    })
}

/// Calibrates the lower envelope over `[2, d_horizon]` fits, shifting down
/// by the worst violation over the chosen shift range. Reported statistics
/// run over `[8, d_horizon]` (the envelope has known exceptions below
/// that), plus a trimmed variant starting just past the last raw violation.
pub fn calibrate_lower(
    log_o: &[f64],
    d_horizon: u32,
    shift_range: LowerShiftRange,
) -> Result<CalibrationReport> {
    if d_horizon < 9 {
        return Err(Error::Domain("lower calibration needs a horizon of at least 9".into()));
    }
    check_log_data(log_o, d_horizon)?;
    let lno = |d: u32| log_o[(d - 1) as usize];
    let low = |d: u32| low_bound(d).expect("d >= 2 below");
    let fit_target = least_squares(2, d_horizon, lno)?;
    let fit_bound = least_squares(2, d_horizon, low)?;
    let slope_ratio = fit_target.beta1 / fit_bound.beta1;
    let intercept_preshift = fit_target.beta0 - slope_ratio * fit_bound.beta0;
    let hat = |d: u32| (low(d) - fit_bound.beta0) * slope_ratio + fit_target.beta0;
    let shift_d_lo = match shift_range {
        LowerShiftRange::From8 => 8,
        LowerShiftRange::From2 => 2,
    };
    let violation = SeriesStats::compute(shift_d_lo, d_horizon, |d| hat(d) - lno(d))?;
    let shift = violation.max;
    let intercept = intercept_preshift - shift;
    let calibrated = |d: u32| slope_ratio * low(d) + intercept;
    let series = |d_lo: u32| -> Result<DiscrepancyStats> {
        Ok(DiscrepancyStats {
            d_lo,
            d_hi: d_horizon,
            raw: SeriesStats::compute(d_lo, d_horizon, |d| lno(d) - low(d))?,
            hat: SeriesStats::compute(d_lo, d_horizon, |d| lno(d) - hat(d))?,
            calibrated: SeriesStats::compute(d_lo, d_horizon, |d| lno(d) - calibrated(d))?,
        })
    };
    let stats = series(8)?;
    // Trim to where the raw envelope genuinely holds: start just past the
    // last multiplicity whose count dips below it.
    let last_violation = (2..=d_horizon).rev().find(|&d| lno(d) - low(d) < 0.0);
    let trimmed_lo = last_violation.map(|d| d + 1).unwrap_or(2);
    let stats_after_exceptions = if trimmed_lo < d_horizon {
        Some(series(trimmed_lo)?)
    } else {
        None
    };
    Ok(CalibrationReport {
        kind: BoundKind::Lower,
        d_horizon,
        fit_target,
        fit_bound,
        slope_ratio,
        intercept_preshift,
        shift,
        shift_d_lo,
        shift_d_hi: d_horizon,
        shift_argmax: violation.argmax,
        intercept,
        stats,
        stats_after_exceptions,
    })
}

/// Evaluates a calibrated curve on `d_from..=d_to` (extrapolation past the
/// report's horizon is the intended use).
pub fn predict(report: &CalibrationReport, d_from: u32, d_to: u32) -> Result<Vec<(u32, f64)>> {
    let min_d = match report.kind {
        BoundKind::Upper => 1,
        BoundKind::Lower => 2,
    };
    if d_from < min_d {
        return Err(Error::Domain(format!(
            "{} predictions start at d = {min_d}, got {d_from}",
            report.kind
        )));
    }
    if d_to < d_from {
        return Err(Error::Domain(format!("empty prediction range [{d_from}, {d_to}]")));
    }
    Ok((d_from..=d_to).map(|d| (d, report.calibrated_at(d))).collect())
}

/// The band between calibrated upper and lower curves over a range.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneStats {
    pub d_lo: u32,
    pub d_hi: u32,
    /// `(d, lower, upper)` per multiplicity in range.
    pub band: Vec<(u32, f64, f64)>,
    /// Widest gap `upper(d) − lower(d)` and where.
    pub max_width: f64,
    pub argmax: u32,
    /// Widest gap with the upper curve lagging one step —
    /// `upper(d−1) − lower(d)` — and where. A common artifact convention
    /// when two differently-indexed series are zipped; reported so results
    /// can be compared against material using either alignment.
    pub max_width_upper_lag: f64,
    pub argmax_upper_lag: u32,
    /// Multiplicities where the band inverts (upper below lower), if any.
    pub inverted: Vec<u32>,
}

/// Computes the prediction zone between two calibrated bounds over
/// `d_lo..=d_hi`. Both reports must share a data horizon — mixing horizons
/// silently compares curves fitted to different data.
pub fn prediction_zone(
    upper: &CalibrationReport,
    lower: &CalibrationReport,
    d_lo: u32,
    d_hi: u32,
) -> Result<ZoneStats> {
    if upper.kind != BoundKind::Upper || lower.kind != BoundKind::Lower {
        return Err(Error::Domain("the zone needs one upper and one lower report, in that order".into()));
    }
    if upper.d_horizon != lower.d_horizon {
        return Err(Error::Domain(format!(
            "mismatched data horizons: upper {} vs lower {}",
            upper.d_horizon, lower.d_horizon
        )));
    }
    if d_lo < 2 {
        return Err(Error::Domain("the zone starts at d = 2 (lower curve domain)".into()));
    }
    if d_hi < d_lo {
        return Err(Error::Domain(format!("empty zone range [{d_lo}, {d_hi}]")));
    }
    let mut band = Vec::with_capacity((d_hi - d_lo + 1) as usize);
    let mut inverted = Vec::new();
    let mut max_width = f64::NEG_INFINITY;
    let mut argmax = d_lo;
    for d in d_lo..=d_hi {
        let up_v = upper.calibrated_at(d);
        let low_v = lower.calibrated_at(d);
        if up_v - low_v > max_width {
            max_width = up_v - low_v;
            argmax = d;
        }
        if up_v < low_v {
            inverted.push(d);
        }
        band.push((d, low_v, up_v));
    }
    let mut max_width_upper_lag = f64::NEG_INFINITY;
    let mut argmax_upper_lag = d_lo;
    for d in d_lo..=d_hi {
        // d ≥ 2, and the upper curve is defined from d = 1, so the lagged
        // series is total on the range.
        let w = upper.calibrated_at(d - 1) - lower.calibrated_at(d);
        if w > max_width_upper_lag {
            max_width_upper_lag = w;
            argmax_upper_lag = d;
        }
    }
    Ok(ZoneStats {
        d_lo,
        d_hi,
        band,
        max_width,
        argmax,
        max_width_upper_lag,
        argmax_upper_lag,
        inverted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXACT: f64 = 1e-12;

    fn assert_close(got: f64, want: f64, tol: f64) {
        let scale = want.abs().max(1.0);
        assert!(
            (got - want).abs() <= tol * scale,
            "got {got}, want {want} (tol {tol})"
        );
    }

    #[test]
    fn envelope_values() {
        // up(1) = √2·π/√3 − ln(24)/2, a closed form quoted to 10 digits.
        assert_close(up_bound(1), 0.9760727451, 1e-9);
        let want_low2 = PI * (2.0f64 / 3.0).sqrt() - (4.0 * 3.0f64.sqrt()).ln();
        assert_close(low_bound(2).unwrap(), want_low2, EXACT);
        assert!(low_bound(1).is_err());
    }

    #[test]
    fn log_of_bigcount_small_and_huge() {
        assert_eq!(log_of_bigcount(&BigCount::from(1u32)).unwrap(), 0.0);
        assert!(log_of_bigcount(&BigCount::ZERO).is_err());
        assert_close(
            log_of_bigcount(&BigCount::from(12u32)).unwrap(),
            12f64.ln(),
            EXACT,
        );
        let big = BigCount::from(1u32) << 1000;
        assert_close(log_of_bigcount(&big).unwrap(), 1000.0 * LN_2, EXACT);
        // 3^500: compare against 500·ln 3 computed in doubles.
        let three_500 = BigCount::from(3u32).pow(500);
        assert_close(log_of_bigcount(&three_500).unwrap(), 500.0 * 3f64.ln(), EXACT);
    }

    #[test]
    fn compensated_summation_beats_naive() {
        let vals = [1e16, 1.0, -1e16];
        assert_eq!(neumaier_sum(vals), 1.0);
    }

    #[test]
    fn exact_line_is_recovered() {
        let fit = least_squares(3, 40, |d| 3.0 + 0.5 * d as f64).unwrap();
        assert_close(fit.beta0, 3.0, EXACT);
        assert_close(fit.beta1, 0.5, EXACT);
        assert_close(fit.eval(100), 53.0, EXACT);
        assert!(least_squares(5, 5, |_| 0.0).is_err());
    }

    /// Synthetic but realistic data: exponential-ish growth so logs are a
    /// gently convex series.
    fn synthetic_log_o(n: usize) -> Vec<f64> {
        (1..=n).map(|d| (d as f64).sqrt() * 1.7 - 0.9).collect()
    }

    #[test]
    fn upper_calibration_invariants() {
        let log_o = synthetic_log_o(120);
        let report = calibrate_upper(&log_o, 120).unwrap();
        assert_eq!(report.kind, BoundKind::Upper);
        assert!(report.shift >= 0.0);
        // Coverage: the calibrated curve dominates the data in range.
        for d in 1..=120u32 {
            assert!(
                report.calibrated_at(d) - log_o[(d - 1) as usize] >= -EXACT,
                "coverage fails at {d}"
            );
        }
        // The rescale makes the fit of the rescaled bound coincide with the
        // fit of the data — that is its defining property.
        let refit = least_squares(1, 120, |d| report.hat_at(d)).unwrap();
        assert_close(refit.beta0, report.fit_target.beta0, 1e-9);
        assert_close(refit.beta1, report.fit_target.beta1, 1e-9);
        // Collapsed and staged forms of the final curve agree.
        for d in [1u32, 7, 64, 120, 500] {
            assert_close(report.hat_at(d) + report.shift, report.calibrated_at(d), 1e-12);
        }
    }

    #[test]
    fn lower_calibration_invariants() {
        let log_o = synthetic_log_o(150);
        let report = calibrate_lower(&log_o, 150, LowerShiftRange::From8).unwrap();
        assert_eq!(report.kind, BoundKind::Lower);
        assert!(report.shift >= 0.0);
        assert_eq!((report.shift_d_lo, report.shift_d_hi), (8, 150));
        for d in 8..=150u32 {
            assert!(
                log_o[(d - 1) as usize] - report.calibrated_at(d) >= -EXACT,
                "coverage fails at {d}"
            );
        }
        let wide = calibrate_lower(&log_o, 150, LowerShiftRange::From2).unwrap();
        assert!(wide.shift >= report.shift);
        assert_eq!((wide.shift_d_lo, wide.shift_d_hi), (2, 150));
    }

    #[test]
    fn prediction_and_zone() {
        let log_o = synthetic_log_o(150);
        let upper = calibrate_upper(&log_o, 150).unwrap();
        let lower = calibrate_lower(&log_o, 150, LowerShiftRange::From8).unwrap();
        let pred = predict(&upper, 100, 300).unwrap();
        assert_eq!(pred.len(), 201);
        assert_eq!(pred[0].0, 100);
        assert_close(pred[0].1, upper.calibrated_at(100), EXACT);
        assert!(predict(&lower, 1, 10).is_err());

        let zone = prediction_zone(&upper, &lower, 2, 400).unwrap();
        assert_eq!(zone.band.len(), 399);
        let (d, low_v, up_v) = zone.band[0];
        assert_eq!(d, 2);
        assert_close(low_v, lower.calibrated_at(2), EXACT);
        assert_close(up_v, upper.calibrated_at(2), EXACT);
        // The aligned and lagged conventions may disagree; both must equal
        // a direct evaluation of their definitions.
        let direct_aligned = (2..=400u32)
            .map(|d| upper.calibrated_at(d) - lower.calibrated_at(d))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_close(zone.max_width, direct_aligned, EXACT);
        let direct_lag = (2..=400u32)
            .map(|d| upper.calibrated_at(d - 1) - lower.calibrated_at(d))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_close(zone.max_width_upper_lag, direct_lag, EXACT);
        assert!(prediction_zone(&lower, &upper, 2, 10).is_err());
    }
}
