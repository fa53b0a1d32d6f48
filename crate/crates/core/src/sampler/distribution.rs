//! Per-time-step Gaussian target over property space.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::component::Component;
use crate::error::{Error, Result};
use crate::netcore::{LabelSet, PropertyVector};

pub const DEFAULT_VARIANCE_FLOOR: f64 = 1e-8;

/// Independent Gaussians over the property components: static pairs, then
/// dynamic pairs when `has_dynamic`.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyDistribution {
    labels: LabelSet,
    mean: Vec<f64>,
    variance: Vec<f64>,
    has_dynamic: bool,
}

impl PropertyDistribution {
    /// Variances below `variance_floor` are raised to it.
    pub fn new(
        labels: LabelSet,
        mean: Vec<f64>,
        variance: Vec<f64>,
        has_dynamic: bool,
        variance_floor: f64,
    ) -> Result<Self> {
        let expected = labels.pair_count() * if has_dynamic { 2 } else { 1 };
        for len in [mean.len(), variance.len()] {
            if len != expected {
                return Err(Error::DimensionMismatch {
                    expected,
                    actual: len,
                });
            }
        }
        if !(variance_floor > 0.0) {
            return Err(Error::invalid("variance floor must be positive"));
        }
        if mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::invalid("non-finite mean"));
        }
        if variance.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("variances must be finite and non-negative"));
        }
        let variance = variance.into_iter().map(|v| v.max(variance_floor)).collect();
        Ok(PropertyDistribution {
            labels,
            mean,
            variance,
            has_dynamic,
        })
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn variance(&self) -> &[f64] {
        &self.variance
    }

    pub fn has_dynamic(&self) -> bool {
        self.has_dynamic
    }

    pub fn dimension(&self) -> usize {
        self.mean.len()
    }

    pub fn components(&self) -> Vec<Component> {
        Component::all(&self.labels, self.has_dynamic)
    }

    pub fn component_index(&self, c: Component) -> Option<usize> {
        let idx = c.index(&self.labels);
        (idx < self.dimension()).then_some(idx)
    }

    pub fn set_mean(&mut self, index: usize, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::invalid("non-finite mean"));
        }
        self.mean[index] = value;
        Ok(())
    }

    /// Variances stay strictly positive.
    pub fn set_variance(&mut self, index: usize, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::invalid("variance must be finite and positive"));
        }
        self.variance[index] = value;
        Ok(())
    }

    /// Gaussian quantile of component `index`.
    pub fn quantile(&self, index: usize, p: f64) -> f64 {
        let sd = self.variance[index].sqrt();
        Normal::new(self.mean[index], sd)
            .expect("validated at construction")
            .inverse_cdf(p)
    }

    /// Log of the product of independent Gaussian densities.
    pub fn log_density(&self, props: &PropertyVector) -> Result<f64> {
        if props.dynamic_part.is_some() != self.has_dynamic {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: props.static_part.len() + props.dynamic_part.as_ref().map_or(0, Vec::len),
            });
        }
        let x = props.to_vec();
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: x.len(),
            });
        }
        Ok(x
            .iter()
            .zip(&self.mean)
            .zip(&self.variance)
            .map(|((x, m), v)| gaussian_log_pdf(*x, *m, *v))
            .sum())
    }
}

pub fn log_density(props: &PropertyVector, dist: &PropertyDistribution) -> Result<f64> {
    dist.log_density(props)
}

pub(crate) fn gaussian_log_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    -0.5 * (d * d / var + (2.0 * std::f64::consts::PI * var).ln())
}
