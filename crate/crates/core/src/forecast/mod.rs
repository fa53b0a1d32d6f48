//! Seasonal ARMA forecasting of property series and target construction.

pub mod arma;
pub mod distributions;
pub mod optim;
pub mod series;

pub use arma::{
    css_objective, fit_seasonal_arma, forecast, is_stationary, psi_weights, ForecastResult, Residuals,
    SeasonalArmaModel, SeasonalOrder,
};
pub use distributions::{build_property_distributions, coverage_scale, empirical_forecast, empirical_forecaster};
pub use series::MaskedSeries;
