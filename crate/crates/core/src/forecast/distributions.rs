//! Turning per-component forecasts into per-step sampler targets.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::forecast::arma::ForecastResult;
use crate::forecast::series::MaskedSeries;
use crate::netcore::LabelSet;
use crate::sampler::PropertyDistribution;

/// Ratio `sigma_target / sigma_forecast` for which two target standard
/// deviations span the central `coverage` prediction interval:
/// `z_{(1+c)/2} / 2`.
pub fn coverage_scale(coverage: f64) -> Result<f64> {
    if !(coverage > 0.0 && coverage < 1.0) {
        return Err(Error::invalid(format!("coverage must lie in (0, 1), got {coverage}")));
    }
    let z = Normal::standard().inverse_cdf(0.5 * (1.0 + coverage));
    Ok(z / 2.0)
}

/// One distribution per forecast step.
///
/// `results` holds one forecast per component in canonical order: every
/// static pair, then optionally every dynamic pair. Steps flagged in
/// `term_starts` (and every step when no dynamic forecasts are given) are
/// static-only. Variances are rescaled by [`coverage_scale`] squared and
/// floored at `variance_floor`.
pub fn build_property_distributions(
    labels: &LabelSet,
    results: &[ForecastResult],
    coverage: f64,
    term_starts: &[bool],
    variance_floor: f64,
) -> Result<Vec<PropertyDistribution>> {
    check_shapes(labels, results, term_starts)?;
    assemble(labels, results, coverage_scale(coverage)?.powi(2), term_starts, variance_floor)
}

fn check_shapes(labels: &LabelSet, results: &[ForecastResult], term_starts: &[bool]) -> Result<()> {
    let pairs = labels.pair_count();
    match results.len() {
        n if n == pairs || n == 2 * pairs => {}
        n => {
            return Err(Error::DimensionMismatch {
                expected: 2 * pairs,
                actual: n,
            })
        }
    }
    let horizon = results.first().map_or(0, |r| r.horizon);
    if results
        .iter()
        .any(|r| r.horizon != horizon || r.means.len() != horizon || r.variances.len() != horizon)
    {
        return Err(Error::invalid("component forecasts have different horizons"));
    }
    if !term_starts.is_empty() && term_starts.len() != horizon {
        return Err(Error::DimensionMismatch {
            expected: horizon,
            actual: term_starts.len(),
        });
    }
    Ok(())
}

fn assemble(
    labels: &LabelSet,
    results: &[ForecastResult],
    scale2: f64,
    term_starts: &[bool],
    variance_floor: f64,
) -> Result<Vec<PropertyDistribution>> {
    let pairs = labels.pair_count();
    let with_dynamic = results.len() == 2 * pairs;
    let horizon = results.first().map_or(0, |r| r.horizon);
    (0..horizon)
        .map(|t| {
            let dynamic = with_dynamic && !term_starts.get(t).copied().unwrap_or(false);
            let used = if dynamic { 2 * pairs } else { pairs };
            let mean = results[..used].iter().map(|r| r.means[t]).collect();
            let var = results[..used].iter().map(|r| r.variances[t] * scale2).collect();
            PropertyDistribution::new(labels.clone(), mean, var, dynamic, variance_floor)
        })
        .collect()
}

/// Seasonal-mean forecast: step `h` past the history gets the mean and
/// sample variance of the observed history values in the same phase of
/// `period`, counting phase from the start of the history.
pub fn empirical_forecast(history: &MaskedSeries, period: usize, horizon: usize) -> Result<ForecastResult> {
    if period == 0 || horizon == 0 {
        return Err(Error::invalid("period and horizon must be positive"));
    }
    if history.len() < 2 * period {
        return Err(Error::InsufficientHistory(format!(
            "{} points for period {period}; need two full periods",
            history.len()
        )));
    }
    let n = history.len();
    let mut means = Vec::with_capacity(horizon);
    let mut variances = Vec::with_capacity(horizon);
    for h in 0..horizon {
        let phase = (n + h) % period;
        let obs: Vec<f64> = (phase..n).step_by(period).filter_map(|t| history.value(t)).collect();
        if obs.is_empty() {
            return Err(Error::InsufficientHistory(format!("no observed values at phase {phase}")));
        }
        let mean = obs.iter().sum::<f64>() / obs.len() as f64;
        let var = if obs.len() > 1 {
            obs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (obs.len() - 1) as f64
        } else {
            0.0
        };
        means.push(mean);
        variances.push(var);
    }
    Ok(ForecastResult {
        horizon,
        means,
        variances,
    })
}

/// Distributions from [`empirical_forecast`] on every component, using the
/// seasonal variances directly (no coverage rescaling).
pub fn empirical_forecaster(
    labels: &LabelSet,
    histories: &[MaskedSeries],
    period: usize,
    horizon: usize,
    term_starts: &[bool],
    variance_floor: f64,
) -> Result<Vec<PropertyDistribution>> {
    let results = histories
        .iter()
        .map(|h| empirical_forecast(h, period, horizon))
        .collect::<Result<Vec<_>>>()?;
    check_shapes(labels, &results, term_starts)?;
    assemble(labels, &results, 1.0, term_starts, variance_floor)
}
