//! Experiment runner for `arakelov-core`.
//!
//! A run is described by a [`RunConfig`]: shared settings (precision, seed,
//! tolerance, quadrature budget) plus the parameters of one command. Running
//! it yields an [`Outcome`] holding a JSON report
//! `{"schema", "config", "results", "certificates"}` and, for tabular
//! experiments, a CSV table. Reports echo the canonical config text, so every
//! artifact can be replayed.
//!
//! Inequality experiments attach [`Check`]s; the command line exits with 2
//! when one fails and with 1 on operational errors.

pub mod config;
pub mod fit;
pub mod formats;
pub mod run;

pub use config::{parse_config, CommandName, ConfigError, Params, RunConfig, SCHEMA};
pub use run::{parse_report, run, Check, Outcome, ReportDoc};
