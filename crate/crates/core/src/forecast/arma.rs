//! Seasonal ARMA(p,q)(P,Q)_s without differencing.
//!
//! With `x_t = y_t - mean_offset` the model is
//! `phi(B) Phi(B^s) x_t = theta(B) Theta(B^s) w_t`, every factor written as
//! `1 - sum c_j B^j`. Expanding the products gives `a(B) = 1 - sum a_k B^k`
//! and `b(B) = 1 - sum b_k B^k`, so
//! `x_t = sum a_k x_{t-k} + w_t - sum b_k w_{t-k}`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Schur};

use crate::error::{Error, Result};
use crate::forecast::optim::{nelder_mead, NelderMeadOptions};
use crate::forecast::series::MaskedSeries;

/// Innovation variance reported for a perfect fit.
pub const MIN_SIGMA2: f64 = 1e-12;

/// Largest AR/MA/seasonal order accepted by [`fit_seasonal_arma`].
pub const MAX_ORDER: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeasonalOrder {
    pub p: usize,
    pub q: usize,
    pub seasonal_p: usize,
    pub seasonal_q: usize,
    pub period: usize,
}

impl SeasonalOrder {
    pub fn new(p: usize, q: usize, seasonal_p: usize, seasonal_q: usize, period: usize) -> Self {
        SeasonalOrder {
            p,
            q,
            seasonal_p,
            seasonal_q,
            period,
        }
    }

    pub fn with_period(self, period: usize) -> Self {
        SeasonalOrder { period, ..self }
    }

    pub fn is_seasonal(&self) -> bool {
        self.seasonal_p + self.seasonal_q > 0
    }

    /// Number of ARMA coefficients (the mean is not counted).
    pub fn coefficient_count(&self) -> usize {
        self.p + self.q + self.seasonal_p + self.seasonal_q
    }

    pub fn ar_degree(&self) -> usize {
        self.p + self.period * self.seasonal_p
    }

    pub fn ma_degree(&self) -> usize {
        self.q + self.period * self.seasonal_q
    }

    /// Terms kept when summing psi-weights for forecast variances.
    pub fn psi_truncation(&self) -> usize {
        10 * (self.period * self.seasonal_p.max(self.seasonal_q) + self.p.max(self.q))
    }

    fn validate(&self) -> Result<()> {
        let orders = [self.p, self.q, self.seasonal_p, self.seasonal_q];
        if orders.iter().any(|&o| o > MAX_ORDER) {
            return Err(Error::invalid(format!("orders above {MAX_ORDER} are not supported: {self}")));
        }
        if self.period == 0 {
            return Err(Error::invalid("season length must be at least 1"));
        }
        Ok(())
    }
}

impl fmt::Display for SeasonalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{})({},{})_{}",
            self.p, self.q, self.seasonal_p, self.seasonal_q, self.period
        )
    }
}

/// Parses `p,q,P,Q,s`.
impl FromStr for SeasonalOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::invalid(format!("order `{s}` is not p,q,P,Q,s")))?;
        match parts[..] {
            [p, q, sp, sq, period] => Ok(SeasonalOrder::new(p, q, sp, sq, period)),
            _ => Err(Error::invalid(format!("order `{s}` is not p,q,P,Q,s"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeasonalArmaModel {
    pub order: SeasonalOrder,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub seasonal_phi: Vec<f64>,
    pub seasonal_theta: Vec<f64>,
    pub sigma2: f64,
    pub mean_offset: f64,
}

/// Sparse `1 - sum c_k B^k` with `c` stored as `(lag, c_k)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct LagPoly(pub(crate) Vec<(usize, f64)>);

impl LagPoly {
    /// Expands `(1 - sum c_i B^i)(1 - sum C_j B^{js})`.
    fn product(short: &[f64], seasonal: &[f64], period: usize) -> LagPoly {
        let degree = short.len() + period * seasonal.len();
        let mut poly = vec![0.0; degree + 1];
        poly[0] = 1.0;
        for (i, c) in short.iter().enumerate() {
            poly[i + 1] -= c;
        }
        let mut out = vec![0.0; degree + 1];
        for (k, &v) in poly.iter().enumerate().filter(|(_, v)| **v != 0.0) {
            out[k] += v;
            for (j, cs) in seasonal.iter().enumerate() {
                out[k + (j + 1) * period] -= v * cs;
            }
        }
        LagPoly(
            out.iter()
                .enumerate()
                .skip(1)
                .filter(|(_, v)| **v != 0.0)
                .map(|(k, v)| (k, -v))
                .collect(),
        )
    }

    fn degree(&self) -> usize {
        self.0.last().map_or(0, |&(k, _)| k)
    }

    /// Dense coefficients `c_1..c_degree`.
    fn dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.degree()];
        for &(k, c) in &self.0 {
            out[k - 1] = c;
        }
        out
    }
}

impl SeasonalArmaModel {
    pub(crate) fn ar_poly(&self) -> LagPoly {
        LagPoly::product(&self.phi, &self.seasonal_phi, self.order.period)
    }

    pub(crate) fn ma_poly(&self) -> LagPoly {
        LagPoly::product(&self.theta, &self.seasonal_theta, self.order.period)
    }

    /// Expanded AR coefficients `a_1..a_d` of `1 - sum a_k B^k`.
    pub fn ar_coefficients(&self) -> Vec<f64> {
        self.ar_poly().dense()
    }

    /// Expanded MA coefficients `b_1..b_d` of `1 - sum b_k B^k`.
    pub fn ma_coefficients(&self) -> Vec<f64> {
        self.ma_poly().dense()
    }

    /// Spectral radius of the companion matrix of the expanded AR polynomial.
    ///
    /// The eigenvalues of the product are those of `phi` together with the
    /// `s`-th roots of those of `Phi`, so only the small factor companions
    /// are decomposed.
    pub fn ar_spectral_radius(&self) -> f64 {
        let seasonal = spectral_radius(&self.seasonal_phi).powf(1.0 / self.order.period as f64);
        spectral_radius(&self.phi).max(seasonal)
    }

    fn from_params(order: SeasonalOrder, params: &[f64]) -> Self {
        let mut it = params[1..].iter().copied();
        let mut take = |n: usize| (&mut it).take(n).collect::<Vec<f64>>();
        let phi = take(order.p);
        let theta = take(order.q);
        let seasonal_phi = take(order.seasonal_p);
        let seasonal_theta = take(order.seasonal_q);
        SeasonalArmaModel {
            order,
            phi,
            theta,
            seasonal_phi,
            seasonal_theta,
            sigma2: 1.0,
            mean_offset: params[0],
        }
    }

    /// One-step residuals over `series`; masked points are replaced by their
    /// one-step prediction and get a zero residual.
    pub fn residuals(&self, series: &MaskedSeries) -> Residuals {
        residual_pass(&self.ar_poly(), &self.ma_poly(), self.order.ar_degree(), self.mean_offset, series)
    }
}

/// Result of the CSS recursion.
#[derive(Clone, Debug)]
pub struct Residuals {
    /// Centered values with masked entries imputed.
    pub filled: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Sum of squared residuals over scored positions.
    pub sum_squares: f64,
    /// Number of scored positions: observed and at or after the AR degree.
    pub scored: usize,
}

/// Scoring starts at `start`, the structural AR degree, so that a
/// coefficient hitting zero does not change which residuals count.
fn residual_pass(ar: &LagPoly, ma: &LagPoly, start: usize, mean: f64, series: &MaskedSeries) -> Residuals {
    let n = series.len();
    let mut filled = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut ss = 0.0;
    let mut scored = 0;
    for t in 0..n {
        let observed = series.value(t).map(|y| y - mean);
        if t < start {
            // Pre-sample: residuals are zero and masked values sit at the mean.
            filled[t] = observed.unwrap_or(0.0);
            continue;
        }
        let mut pred = 0.0;
        for &(k, a) in &ar.0 {
            pred += a * filled[t - k];
        }
        for &(k, b) in &ma.0 {
            if k <= t {
                pred -= b * e[t - k];
            }
        }
        match observed {
            Some(x) => {
                filled[t] = x;
                e[t] = x - pred;
                ss += e[t] * e[t];
                scored += 1;
            }
            None => filled[t] = pred,
        }
    }
    Residuals {
        filled,
        residuals: e,
        sum_squares: ss,
        scored,
    }
}

/// CSS objective at `params = [mean, phi.., theta.., Phi.., Theta..]`.
///
/// Returns `(sum of squares, number of scored residuals)`.
pub fn css_objective(order: SeasonalOrder, params: &[f64], series: &MaskedSeries) -> (f64, usize) {
    let model = SeasonalArmaModel::from_params(order, params);
    let r = model.residuals(series);
    (r.sum_squares, r.scored)
}

/// True when every root of `1 - sum c_k z^k` lies outside the unit circle,
/// via the step-down (reflection coefficient) recursion.
pub fn is_stationary(coeffs: &[f64]) -> bool {
    let mut c = coeffs.to_vec();
    while let Some(&kappa) = c.last() {
        if !(kappa.abs() < 1.0) {
            return false;
        }
        let m = c.len();
        let denom = 1.0 - kappa * kappa;
        let next: Vec<f64> = (0..m - 1).map(|i| (c[i] + kappa * c[m - 2 - i]) / denom).collect();
        c = next;
    }
    true
}

fn spectral_radius(coeffs: &[f64]) -> f64 {
    let d = coeffs.len();
    if d == 0 {
        return 0.0;
    }
    let mut m = DMatrix::<f64>::zeros(d, d);
    for (k, c) in coeffs.iter().enumerate() {
        m[(0, k)] = *c;
    }
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    match Schur::try_new(m, f64::EPSILON, 10_000) {
        Some(schur) => schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max),
        None => f64::NAN,
    }
}

/// Fits by conditional sum of squares; masked entries are skipped in the
/// objective. `sigma2` is the mean squared residual, floored at [`MIN_SIGMA2`].
pub fn fit_seasonal_arma(series: &MaskedSeries, order: SeasonalOrder) -> Result<SeasonalArmaModel> {
    order.validate()?;
    let n = series.len();
    if order.is_seasonal() && n < 3 * order.period {
        return Err(Error::InsufficientHistory(format!(
            "{n} points for season length {}; need at least {}",
            order.period,
            3 * order.period
        )));
    }
    let (mean, var) = series.mean_variance().ok_or_else(|| {
        Error::InsufficientHistory("series has no observed values".into())
    })?;
    let k = order.coefficient_count();
    let start_scored = (order.ar_degree()..n).filter(|&t| series.value(t).is_some()).count();
    if start_scored <= k + 1 {
        return Err(Error::InsufficientHistory(format!(
            "{start_scored} usable residuals for {} parameters",
            k + 1
        )));
    }

    let split = |params: &[f64]| {
        let (short_ar, rest) = params[1..].split_at(order.p);
        let (short_ma, rest) = rest.split_at(order.q);
        let (seas_ar, seas_ma) = rest.split_at(order.seasonal_p);
        (short_ar.to_vec(), short_ma.to_vec(), seas_ar.to_vec(), seas_ma.to_vec())
    };
    let objective = |params: &[f64]| -> f64 {
        let (phi, theta, sphi, stheta) = split(params);
        if !(is_stationary(&phi) && is_stationary(&sphi) && is_stationary(&theta) && is_stationary(&stheta)) {
            return f64::INFINITY;
        }
        let (ss, count) = css_objective(order, params, series);
        ss / count as f64
    };

    let sd = var.sqrt();
    let mut x0 = vec![0.0; k + 1];
    x0[0] = mean;
    let mut step = vec![0.1; k + 1];
    step[0] = if sd > 0.0 { 0.1 * sd } else { 0.1 * mean.abs().max(1.0) };
    let opts = NelderMeadOptions::new(step);
    let best = nelder_mead(objective, &x0, &opts)?;

    let mut model = SeasonalArmaModel::from_params(order, &best.x);
    let r = model.residuals(series);
    model.sigma2 = (r.sum_squares / r.scored as f64).max(MIN_SIGMA2);
    let radius = model.ar_spectral_radius();
    if !(radius < 1.0) {
        return Err(Error::NonStationary(radius));
    }
    Ok(model)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForecastResult {
    pub horizon: usize,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

/// Point forecasts and forecast variances `horizon` steps past `history`.
pub fn forecast(model: &SeasonalArmaModel, history: &MaskedSeries, horizon: usize) -> Result<ForecastResult> {
    if horizon == 0 {
        return Err(Error::invalid("horizon must be positive"));
    }
    let ar = model.ar_poly();
    let ma = model.ma_poly();
    let need = model.order.ar_degree().max(model.order.ma_degree());
    if history.len() < need {
        return Err(Error::InsufficientHistory(format!(
            "{} points cannot seed {} lags",
            history.len(),
            need
        )));
    }
    let r = residual_pass(&ar, &ma, model.order.ar_degree(), model.mean_offset, history);
    let n = history.len();
    let mut x = r.filled;
    let mut e = r.residuals;
    x.resize(n + horizon, 0.0);
    e.resize(n + horizon, 0.0);
    for t in n..n + horizon {
        let mut pred = 0.0;
        for &(k, a) in &ar.0 {
            if k <= t {
                pred += a * x[t - k];
            }
        }
        for &(k, b) in &ma.0 {
            if k <= t {
                pred -= b * e[t - k];
            }
        }
        x[t] = pred;
    }
    let means = x[n..].iter().map(|v| v + model.mean_offset).collect();

    let psi = psi_weights(&model.ar_coefficients(), &model.ma_coefficients(), horizon);
    let limit = model.order.psi_truncation().max(1);
    let mut acc = 0.0;
    let variances = (0..horizon)
        .map(|h| {
            if h < limit {
                acc += psi[h] * psi[h];
            }
            model.sigma2 * acc
        })
        .collect();
    Ok(ForecastResult {
        horizon,
        means,
        variances,
    })
}

/// MA(infinity) weights `psi_0..psi_{count-1}` of `b(B) / a(B)`.
pub fn psi_weights(ar: &[f64], ma: &[f64], count: usize) -> Vec<f64> {
    let mut psi = Vec::with_capacity(count);
    for k in 0..count {
        let v = if k == 0 {
            1.0
        } else {
            let ar_part: f64 = (1..=k.min(ar.len())).map(|i| ar[i - 1] * psi[k - i]).sum();
            ar_part - ma.get(k - 1).copied().unwrap_or(0.0)
        };
        psi.push(v);
    }
    psi
}
