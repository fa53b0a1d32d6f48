//! The `dccm` command line: network statistics, forecasting, network
//! generation, epidemic studies, scenarios and covariate tables.
//!
//! Every subcommand reads CSV inputs, writes CSV outputs into `--out-dir`
//! (atomically), and is deterministic given `--seed`.

pub mod bands;
pub mod commands;
pub mod output;
pub mod scenario;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dccm::forecast::SeasonalOrder;
use dccm::SamplerConfig;

pub use bands::QuantileBand;
pub use scenario::ScenarioSpec;

#[derive(Debug, Parser)]
#[command(name = "dccm", version, about = "Congruence-class models for dynamic networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Property series and goodness-of-fit statistics of an observed dynamic network.
    Stats(StatsArgs),
    /// Fit seasonal ARMA models to a property series and emit per-step targets.
    Forecast(ForecastArgs),
    /// Sample replicate dynamic networks from per-step targets.
    Generate(GenerateArgs),
    /// Run one of the two epidemic intervention studies.
    Epidemic(EpidemicArgs),
    /// Edit per-step targets according to a scenario file.
    Scenario(ScenarioArgs),
    /// Covariate tables for replicate networks.
    Covariates(CovariatesArgs),
    /// Build monthly networks, property series and passage covariates from bill records.
    Ingest(IngestArgs),
    /// Write a synthetic two-party legislature (bills, rosters, calendar).
    Surrogate(SurrogateArgs),
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Edge list: time,node_a,node_b.
    #[arg(long)]
    pub input: PathBuf,
    /// Roster: time,node_id,group.
    #[arg(long)]
    pub roster: PathBuf,
    /// Term calendar; dynamic values are masked at term starts.
    #[arg(long)]
    pub calendar: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    /// Property series: time,component,value,mask.
    #[arg(long)]
    pub input: PathBuf,
    /// Seasonal ARMA order as p,q,P,Q,s for the static components.
    #[arg(long, default_value = "3,1,2,1,24")]
    pub order: SeasonalOrder,
    /// Seasonal ARMA order for the dynamic components.
    #[arg(long, default_value = "3,1,2,1,23")]
    pub dynamic_order: SeasonalOrder,
    /// Central prediction-interval coverage spanned by two target standard deviations.
    #[arg(long, default_value_t = 0.95)]
    pub coverage: f64,
    #[arg(long, default_value_t = 24)]
    pub horizon: usize,
    /// Term calendar; forecast steps at term starts are static-only.
    #[arg(long)]
    pub calendar: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Targets: time,component,mean,variance,has_dynamic.
    #[arg(long)]
    pub input: PathBuf,
    /// Roster: time,node_id,group. Either one entry per target time, or
    /// any roster file together with --roster-time.
    #[arg(long)]
    pub roster: PathBuf,
    /// Use the roster at this time for every step.
    #[arg(long)]
    pub roster_time: Option<String>,
    /// Observed edge list whose last step seeds the first transition.
    #[arg(long, requires = "previous_roster")]
    pub previous: Option<PathBuf>,
    #[arg(long, requires = "previous")]
    pub previous_roster: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    pub replicates: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Proposals per step in units of the dyad count.
    #[arg(long, default_value_t = SamplerConfig::DEFAULT_SWEEPS)]
    pub sweeps: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EpidemicArgs {
    /// 1: edge-count ramps; 2: persistence sweep.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub study: u8,
    /// Settings: final edge means (study 1) or persistence fractions (study 2).
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Starting (study 1) or constant (study 2) edge mean.
    #[arg(long)]
    pub edges: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub sweeps: Option<f64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Targets: time,component,mean,variance,has_dynamic.
    #[arg(long)]
    pub input: PathBuf,
    /// Edits: component,operation,value.
    #[arg(long)]
    pub scenario_file: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CovariatesArgs {
    /// Replicate edges: replicate,time,node_a,node_b.
    #[arg(long)]
    pub input: PathBuf,
    /// Roster: time,node_id,group (as written by `generate`).
    #[arg(long)]
    pub roster: PathBuf,
    #[arg(long)]
    pub calendar: Option<PathBuf>,
    /// Expected replicate count; replicates without edges are kept.
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Bills: bill_id,month,sponsor,cosponsors,passed.
    #[arg(long)]
    pub input: PathBuf,
    /// Monthly rosters: month,node_id,party.
    #[arg(long)]
    pub roster: PathBuf,
    /// Terms: term,start_month,end_month.
    #[arg(long)]
    pub calendar: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SurrogateArgs {
    #[arg(long, default_value_t = 2003)]
    pub seed: u64,
    #[arg(long)]
    pub senators: Option<usize>,
    #[arg(long)]
    pub terms: Option<usize>,
    #[arg(long)]
    pub sweeps: Option<f64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Stats(a) => commands::cmd_stats(&a),
        Command::Forecast(a) => commands::cmd_forecast(&a),
        Command::Generate(a) => commands::cmd_generate(&a),
        Command::Epidemic(a) => commands::cmd_epidemic(&a),
        Command::Scenario(a) => commands::cmd_scenario(&a),
        Command::Covariates(a) => commands::cmd_covariates(&a),
        Command::Ingest(a) => commands::cmd_ingest(&a),
        Command::Surrogate(a) => commands::cmd_surrogate(&a),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from<I, T>(args: I) -> anyhow::Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run(Cli::try_parse_from(args)?)
}
