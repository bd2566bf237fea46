//! Batch experiments: TOML configuration, sweep orchestration and CSV/SVG
//! reports.

pub mod config;
pub mod csv;
pub mod runner;
pub mod svg;

pub use config::{parse_scheme_list, ChannelConfig, ExperimentConfig, OutputConfig, SchemeEntry, Sweep};
pub use csv::{emit_csv, render_csv};
pub use runner::{analytic, analyze, run_experiment, Analytic, AnalyticSummary, ResultRow, ResultTable};
pub use svg::{emit_svg, render_svg, PlotMetric};
