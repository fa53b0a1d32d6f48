//! Time series with missing entries.

/// Regularly spaced values; `None` marks a missing entry.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MaskedSeries {
    values: Vec<Option<f64>>,
}

impl MaskedSeries {
    pub fn new(values: Vec<Option<f64>>) -> Self {
        MaskedSeries { values }
    }

    pub fn observed(values: Vec<f64>) -> Self {
        MaskedSeries {
            values: values.into_iter().map(Some).collect(),
        }
    }

    /// `mask[t] == true` marks `values[t]` missing.
    pub fn with_mask(values: &[f64], mask: &[bool]) -> Self {
        assert_eq!(values.len(), mask.len(), "values and mask differ in length");
        MaskedSeries {
            values: values
                .iter()
                .zip(mask)
                .map(|(&v, &m)| (!m).then_some(v))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, t: usize) -> Option<f64> {
        self.values[t]
    }

    pub fn is_masked(&self, t: usize) -> bool {
        self.values[t].is_none()
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn push(&mut self, value: Option<f64>) {
        self.values.push(value);
    }

    pub fn observed_count(&self) -> usize {
        self.values.iter().flatten().count()
    }

    /// Mean and population variance of the observed entries.
    pub fn mean_variance(&self) -> Option<(f64, f64)> {
        let n = self.observed_count();
        if n == 0 {
            return None;
        }
        let mean = self.values.iter().flatten().sum::<f64>() / n as f64;
        let var = self.values.iter().flatten().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        Some((mean, var))
    }
}

impl FromIterator<Option<f64>> for MaskedSeries {
    fn from_iter<I: IntoIterator<Item = Option<f64>>>(iter: I) -> Self {
        MaskedSeries::new(iter.into_iter().collect())
    }
}
