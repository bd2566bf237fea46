use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, FadingLaw};
use crate::error::{Error, Result};
use crate::schemes::{Objective, SchemeKind};

/// Channel section of a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub snr_db: f64,
    /// Packet rate `R` in bpcu.
    pub rate: f64,
    /// Number of packets `M`, one per block.
    pub messages: usize,
    #[serde(default)]
    pub fading: FadingLaw,
}

impl ChannelConfig {
    pub fn params(&self) -> Result<ChannelParams> {
        ChannelParams::with_fading(self.snr_db, self.rate, self.messages, self.fading).map_err(as_config("channel"))
    }
}

/// One scheme to simulate. Windowed schemes (PB, wTS) take either a fixed
/// `b` or an `optimize` objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeEntry {
    pub kind: SchemeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<Objective>,
    /// Name used in outputs; derived from kind and objective when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl SchemeEntry {
    pub fn fixed(kind: SchemeKind, b: Option<usize>) -> Self {
        Self {
            kind,
            b,
            optimize: None,
            label: None,
        }
    }

    pub fn optimized(kind: SchemeKind, objective: Objective) -> Self {
        Self {
            kind,
            b: None,
            optimize: Some(objective),
            label: None,
        }
    }

    pub fn label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match (self.kind, self.optimize) {
            (SchemeKind::Wts, Some(Objective::MaxThroughput)) => "T-wTS".into(),
            (SchemeKind::Wts, Some(Objective::MinMaxDelay)) => "D-wTS".into(),
            (kind, _) => kind.to_string(),
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        let field = format!("schemes[{index}]");
        match (self.kind.has_window(), self.b, self.optimize) {
            (true, None, None) => Err(Error::config(field, format!("{} needs `b` or `optimize`", self.kind))),
            (true, Some(_), Some(_)) => Err(Error::config(field, "`b` and `optimize` are mutually exclusive")),
            (true, Some(0), _) => Err(Error::config(field + ".b", "must be at least 1")),
            (false, Some(_), _) | (false, _, Some(_)) => {
                Err(Error::config(field, format!("{} takes no window parameter", self.kind)))
            }
            _ => Ok(()),
        }
    }
}

/// Variable swept across experiment points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variable", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Sweep {
    Messages { values: Vec<usize> },
    SnrDb { values: Vec<f64> },
}

impl Sweep {
    /// Message counts `1..=64`.
    pub fn default_messages() -> Self {
        Sweep::Messages {
            values: (1..=64).collect(),
        }
    }

    /// SNRs from −10 dB to 15 dB in 1 dB steps.
    pub fn default_snr() -> Self {
        Sweep::SnrDb {
            values: (-10..=15).map(f64::from).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Sweep::Messages { values } => values.len(),
            Sweep::SnrDb { values } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Value of point `i` as a number.
    pub fn value(&self, i: usize) -> f64 {
        match self {
            Sweep::Messages { values } => values[i] as f64,
            Sweep::SnrDb { values } => values[i],
        }
    }

    pub fn axis_label(&self) -> &'static str {
        match self {
            Sweep::Messages { .. } => "number of messages M",
            Sweep::SnrDb { .. } => "SNR (dB)",
        }
    }

    /// Channel of point `i`, starting from `base`.
    pub fn apply(&self, base: &ChannelConfig, i: usize) -> ChannelConfig {
        let mut c = base.clone();
        match self {
            Sweep::Messages { values } => c.messages = values[i],
            Sweep::SnrDb { values } => c.snr_db = values[i],
        }
        c
    }

    fn validate(&self) -> Result<()> {
        let increasing = match self {
            Sweep::Messages { values } => values.windows(2).all(|w| w[0] < w[1]) && values.first() != Some(&0),
            Sweep::SnrDb { values } => values.windows(2).all(|w| w[0] < w[1]) && values.iter().all(|v| v.is_finite()),
        };
        if self.is_empty() {
            Err(Error::config("sweep.values", "must not be empty"))
        } else if !increasing {
            Err(Error::config("sweep.values", "must be strictly increasing (and M >= 1)"))
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    /// Throughput chart; the delay chart goes next to it with a `-delay` suffix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
}

fn default_trials() -> u64 {
    10_000
}

/// A batch experiment: one channel, a list of schemes and an optional sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; all available cores when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default)]
    pub include_it_bound: bool,
    pub channel: ChannelConfig,
    #[serde(default)]
    pub schemes: Vec<SchemeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn new(channel: ChannelConfig) -> Self {
        Self {
            trials: default_trials(),
            seed: 0,
            threads: None,
            include_it_bound: false,
            channel,
            schemes: Vec::new(),
            sweep: None,
            output: OutputConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::config(error_field(&e), e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads", "must be at least 1"));
        }
        if self.schemes.is_empty() && !self.include_it_bound {
            return Err(Error::config("schemes", "nothing to simulate"));
        }
        self.channel.params()?;
        for (i, s) in self.schemes.iter().enumerate() {
            s.validate(i)?;
        }
        if let Some(sweep) = &self.sweep {
            sweep.validate()?;
            for i in 0..sweep.len() {
                sweep.apply(&self.channel, i).params()?;
            }
        }
        Ok(())
    }

    /// Number of sweep points (1 without a sweep).
    pub fn points(&self) -> usize {
        self.sweep.as_ref().map_or(1, Sweep::len)
    }

    pub fn channel_at(&self, i: usize) -> ChannelConfig {
        match &self.sweep {
            Some(s) => s.apply(&self.channel, i),
            None => self.channel.clone(),
        }
    }
}

fn error_field(e: &toml::de::Error) -> String {
    e.span().map_or_else(|| "config".to_string(), |s| format!("config bytes {}..{}", s.start, s.end))
}

fn as_config(field: &'static str) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parameter { name, reason } => Error::config(format!("{field}.{name}"), reason),
        other => other,
    }
}

/// Parses a comma-separated scheme list such as `mt,ets,pb=10,t-wts,it`.
///
/// `pb` and `wts` without `=B` optimize throughput; `t-wts` and `d-wts`
/// optimize throughput and delay; `it` adds the informed-transmitter bound.
/// Returns the entries and whether `it` was present.
pub fn parse_scheme_list(list: &str) -> Result<(Vec<SchemeEntry>, bool)> {
    let mut entries = Vec::new();
    let mut it = false;
    for raw in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let lower = raw.to_ascii_lowercase();
        let (name, b) = match lower.split_once('=') {
            Some((n, b)) => {
                let b: usize = b
                    .parse()
                    .map_err(|_| Error::config("--scheme", format!("bad window size in `{raw}`")))?;
                (n.to_string(), Some(b))
            }
            None => (lower.clone(), None),
        };
        let entry = match (name.as_str(), b) {
            ("mt", None) => SchemeEntry::fixed(SchemeKind::Mt, None),
            ("ets", None) => SchemeEntry::fixed(SchemeKind::Ets, None),
            ("pb", None) => SchemeEntry::optimized(SchemeKind::Pb, Objective::MaxThroughput),
            ("pb", b) => SchemeEntry::fixed(SchemeKind::Pb, b),
            ("wts" | "t-wts", None) => SchemeEntry::optimized(SchemeKind::Wts, Objective::MaxThroughput),
            ("d-wts", None) => SchemeEntry::optimized(SchemeKind::Wts, Objective::MinMaxDelay),
            ("wts", b) => SchemeEntry::fixed(SchemeKind::Wts, b),
            ("it", None) => {
                it = true;
                continue;
            }
            _ => return Err(Error::config("--scheme", format!("unknown scheme `{raw}`"))),
        };
        entry.validate(entries.len())?;
        entries.push(entry);
    }
    if entries.is_empty() && !it {
        return Err(Error::config("--scheme", "empty scheme list"));
    }
    Ok((entries, it))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
trials = 2000
seed = 7
include_it_bound = true

[channel]
snr_db = -5.0
rate = 1.0
messages = 40

[[schemes]]
kind = "mt"

[[schemes]]
kind = "pb"
optimize = "max-throughput"

[[schemes]]
kind = "wts"
b = 3

[sweep]
variable = "snr-db"
values = [-5.0, 0.0, 5.0]

[output]
csv = "out/results.csv"
"#;

    #[test]
    fn parses_sample() {
        let c = ExperimentConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(c.trials, 2000);
        assert_eq!(c.schemes.len(), 3);
        assert_eq!(c.schemes[1].label(), "PB");
        assert_eq!(c.channel.fading, FadingLaw::RayleighUnitMean);
        assert_eq!(c.points(), 3);
        assert_eq!(c.channel_at(2).snr_db, 5.0);
    }

    #[test]
    fn round_trip() {
        let c = ExperimentConfig::from_toml(SAMPLE).unwrap();
        let again = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn structured_errors() {
        let bad = SAMPLE.replace("trials = 2000", "trials = 0");
        match ExperimentConfig::from_toml(&bad) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "trials"),
            other => panic!("{other:?}"),
        }
        let bad = SAMPLE.replace("values = [-5.0, 0.0, 5.0]", "values = [0.0, -5.0]");
        assert!(matches!(ExperimentConfig::from_toml(&bad), Err(Error::Config { .. })));
        let bad = SAMPLE.replace("b = 3", "");
        match ExperimentConfig::from_toml(&bad) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "schemes[2]"),
            other => panic!("{other:?}"),
        }
        let bad = SAMPLE.replace("rate = 1.0", "rate = -1.0");
        match ExperimentConfig::from_toml(&bad) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "channel.rate"),
            other => panic!("{other:?}"),
        }
        assert!(ExperimentConfig::from_toml("trials = 1").is_err());
    }

    #[test]
    fn scheme_lists() {
        let (s, it) = parse_scheme_list("MT, ets,pb=12,t-wts,d-wts,wts=4,it").unwrap();
        assert!(it);
        let labels: Vec<String> = s.iter().map(SchemeEntry::label).collect();
        assert_eq!(labels, ["MT", "eTS", "PB", "T-wTS", "D-wTS", "wTS"]);
        assert_eq!(s[2].b, Some(12));
        assert!(parse_scheme_list("xyz").is_err());
        assert!(parse_scheme_list("mt=3").is_err());
        assert!(parse_scheme_list("pb=0").is_err());
        assert!(parse_scheme_list("").is_err());
    }
}
