use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fading_stream::experiment::{self, svg, ChannelConfig, ExperimentConfig, PlotMetric, Sweep};
use fading_stream::{verify, Error, Result};

#[derive(Parser)]
#[command(version, about = "Video streaming over block-fading channels: simulation and analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the configured schemes (single point unless the config sweeps).
    Simulate(Common),
    /// Simulate over a sweep of M or SNR.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Sweep variable when the config has no sweep (default grids).
        #[arg(long, value_enum)]
        over: Option<Over>,
    },
    /// Closed-form values only, no sampling.
    Analyze(Common),
    /// Informed-transmitter bound only.
    Bound(Common),
    /// Run the reference-equivalence suites.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Over {
    Messages,
    SnrDb,
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Throughput chart; the delay chart is written alongside with a `-delay` suffix.
    #[arg(long)]
    out_svg: Option<PathBuf>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Comma-separated: mt, ets, pb[=B], wts[=B], t-wts, d-wts, it.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    #[arg(long)]
    rate: Option<f64>,
    /// Number of messages M.
    #[arg(long)]
    messages: Option<usize>,
}

const DEFAULT_SCHEMES: &str = "mt,ets,pb,t-wts,d-wts,it";

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => {
                let mut c = ExperimentConfig::new(ChannelConfig {
                    snr_db: 5.0,
                    rate: 1.0,
                    messages: 40,
                    fading: Default::default(),
                });
                let (schemes, it) = experiment::parse_scheme_list(DEFAULT_SCHEMES)?;
                c.schemes = schemes;
                c.include_it_bound = it;
                c
            }
        };
        if let Some(list) = &self.scheme {
            let (schemes, it) = experiment::parse_scheme_list(list)?;
            config.schemes = schemes;
            config.include_it_bound = it;
        }
        if let Some(t) = self.trials {
            config.trials = t;
        }
        if let Some(s) = self.seed {
            config.seed = s;
        }
        if self.threads.is_some() {
            config.threads = self.threads;
        }
        if let Some(x) = self.snr_db {
            config.channel.snr_db = x;
        }
        if let Some(r) = self.rate {
            config.channel.rate = r;
        }
        if let Some(m) = self.messages {
            config.channel.messages = m;
        }
        if self.out_csv.is_some() {
            config.output.csv = self.out_csv.clone();
        }
        if self.out_svg.is_some() {
            config.output.svg = self.out_svg.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

fn run_and_report(config: &ExperimentConfig) -> Result<()> {
    let table = experiment::run_experiment(config)?;
    let csv = experiment::render_csv(&table)?;
    match &config.output.csv {
        Some(path) => {
            experiment::emit_csv(&table, path)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    if let Some(path) = &config.output.svg {
        experiment::emit_svg(&table, PlotMetric::Throughput, path)?;
        let delay = svg::delay_chart_path(path);
        experiment::emit_svg(&table, PlotMetric::Delay, &delay)?;
        eprintln!("wrote {} and {}", path.display(), delay.display());
    }
    Ok(())
}

fn analyze(config: &ExperimentConfig) -> Result<()> {
    for i in 0..config.points() {
        let channel = config.channel_at(i);
        let params = channel.params()?;
        let s = experiment::analyze(&params, &config.schemes)?;
        println!(
            "snr_db={} rate={} M={}",
            channel.snr_db, channel.rate, channel.messages
        );
        println!("  decode success prob p      {:.9}", s.decode_success_prob);
        println!("  mean capacity (quadrature) {:.12}", s.mean_capacity);
        println!("  mean capacity (closed)     {:.12}", s.mean_capacity_closed_form);
        println!("  alpha_opt                  {:.9}", s.alpha_opt);
        for (label, b, a) in &s.rows {
            let b = b.map(|b| format!(" B={b}")).unwrap_or_default();
            println!(
                "  {label}{b}: throughput {:.9} bpcu, mean max delay in [{:.9}, {:.9}] blocks",
                a.throughput_bpcu, a.delay_lower, a.delay_upper
            );
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate(common) => run_and_report(&common.config()?)?,
        Command::Sweep { common, over } => {
            let mut config = common.config()?;
            if over.is_some() || config.sweep.is_none() {
                config.sweep = Some(match over.unwrap_or(Over::Messages) {
                    Over::Messages => Sweep::default_messages(),
                    Over::SnrDb => Sweep::default_snr(),
                });
                config.validate()?;
            }
            run_and_report(&config)?;
        }
        Command::Analyze(common) => analyze(&common.config()?)?,
        Command::Bound(common) => {
            let mut config = common.config()?;
            config.schemes.clear();
            config.include_it_bound = true;
            run_and_report(&config)?;
        }
        Command::Verify { seed } => {
            let reports = verify::run_all(seed);
            for r in &reports {
                println!("[{}] {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            return Ok(reports.iter().all(|r| r.passed));
        }
    }
    Ok(true)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::Parameter { .. } => 2,
        Error::Numeric(_) => 3,
        Error::Io { .. } => 1,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
