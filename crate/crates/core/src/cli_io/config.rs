use clap::{Args, ValueEnum};
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

/// Options shared by every subcommand. Each can also come from the environment.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Decimal digits for numerical periods and L-values.
    #[arg(long, global = true, env = "MTLAB_PRECISION", default_value_t = 30)]
    pub precision: u32,
    /// Largest prime p checked p-locally; larger ones are reported as unchecked.
    #[arg(long, global = true, env = "MTLAB_PBOUND", default_value_t = crate::verifier::DEFAULT_P_BOUND)]
    pub p_bound: u64,
    /// Largest filtration index searched when computing ord_aug.
    #[arg(long, global = true, env = "MTLAB_TMAX", default_value_t = crate::verifier::DEFAULT_T_MAX)]
    pub t_max: usize,
    /// Directory for cached modular symbol spaces.
    #[arg(long, global = true, env = "MTLAB_CACHE")]
    pub cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}
