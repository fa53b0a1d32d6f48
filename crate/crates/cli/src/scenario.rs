//! Intervention scenarios: per-component edits to forecast targets.

use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use dccm::io::read_file_rows;
use dccm::{Component, LabelSet, PropertyDistribution};

pub const SCENARIO_HEADER: [&str; 3] = ["component", "operation", "value"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operation {
    ScaleMean,
    SetMean,
    ScaleVariance,
}

impl FromStr for Operation {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scale_mean" => Ok(Operation::ScaleMean),
            "set_mean" => Ok(Operation::SetMean),
            "scale_variance" => Ok(Operation::ScaleVariance),
            _ => Err(anyhow!("unknown operation `{s}`; expected scale_mean, set_mean or scale_variance")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edit {
    pub component: Component,
    pub operation: Operation,
    pub value: f64,
}

/// Edits applied in file order to every time step that carries the component.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScenarioSpec {
    pub edits: Vec<Edit>,
}

impl ScenarioSpec {
    pub fn read(path: &Path, labels: &LabelSet) -> Result<Self> {
        let (_, rows) = read_file_rows(path, &[&SCENARIO_HEADER])?;
        let mut edits = Vec::with_capacity(rows.rows.len());
        for (line, rec) in &rows.rows {
            let at = || format!("{}:{line}", path.display());
            let component = Component::parse(&rec[0], labels).with_context(at)?;
            let operation: Operation = rec[1].parse().with_context(at)?;
            let value: f64 = rec[2].parse().map_err(|_| anyhow!("invalid value `{}`", &rec[2])).with_context(at)?;
            if !value.is_finite() {
                bail!("{}: non-finite value", at());
            }
            if operation != Operation::SetMean && value < 0.0 {
                bail!("{}: scale factors must be non-negative", at());
            }
            edits.push(Edit {
                component,
                operation,
                value,
            });
        }
        Ok(ScenarioSpec { edits })
    }

    pub fn apply(&self, dist: &mut PropertyDistribution) -> Result<()> {
        for e in &self.edits {
            let Some(k) = dist.component_index(e.component) else {
                continue;
            };
            let name = e.component.name(dist.labels());
            match e.operation {
                Operation::ScaleMean => dist.set_mean(k, dist.mean()[k] * e.value),
                Operation::SetMean => dist.set_mean(k, e.value),
                Operation::ScaleVariance => dist.set_variance(k, dist.variance()[k] * e.value),
            }
            .with_context(|| format!("editing `{name}`"))?;
        }
        Ok(())
    }
}
