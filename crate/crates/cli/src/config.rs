//! Run configuration documents (TOML).

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use dephasing_core::experiments::{MemoryConfig, ReadoutMode, TrainStart, TransmissionConfig};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: {location}: {message}")]
    Invalid {
        path: String,
        location: String,
        message: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Transmission,
    Memory,
    ChannelDemo,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    /// CSV data files plus the text summary.
    #[default]
    Csv,
    /// Text summary only.
    Report,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrainStartDoc {
    #[default]
    Fixed,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReadoutDoc {
    #[default]
    AtFlip,
    FixedTime,
}

fn default_j_hz() -> f64 {
    215.5
}
fn default_group_size() -> usize {
    16
}
fn default_trials() -> usize {
    10_000
}
fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmissionDoc {
    #[serde(default = "default_j_hz")]
    pub j_hz: f64,
    #[serde(default = "TransmissionDoc::default_total")]
    pub total_time_s: f64,
    #[serde(default = "TransmissionDoc::default_t1")]
    pub t1_s: f64,
    #[serde(default)]
    pub bang_bang: bool,
    #[serde(default = "TransmissionDoc::default_t_b")]
    pub t_b_s: f64,
    #[serde(default)]
    pub train_start: TrainStartDoc,
    pub pulses_per_trial: Option<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_group_size")]
    pub group_size: usize,
    #[serde(default = "default_true")]
    pub remove_trivial_phase: bool,
}

impl TransmissionDoc {
    fn default_total() -> f64 {
        10e-3
    }
    fn default_t1() -> f64 {
        1e-3
    }
    fn default_t_b() -> f64 {
        0.3e-3
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemoryDoc {
    #[serde(default = "default_j_hz")]
    pub j_hz: f64,
    #[serde(default = "MemoryDoc::default_interval")]
    pub mean_interval_s: f64,
    pub alphas: Vec<f64>,
    /// Observe at every multiple of `2Δ̄` up to this time.
    pub max_time_s: Option<f64>,
    /// Explicit observation times; takes precedence over `max_time_s`.
    pub observation_times_s: Option<Vec<f64>>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_group_size")]
    pub group_size: usize,
    #[serde(default)]
    pub bang_bang: bool,
    #[serde(default = "MemoryDoc::default_t_b")]
    pub t_b_s: f64,
    #[serde(default)]
    pub readout: ReadoutDoc,
}

impl MemoryDoc {
    fn default_interval() -> f64 {
        2e-3
    }
    fn default_t_b() -> f64 {
        0.5e-3
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDemoDoc {
    #[serde(default = "ChannelDemoDoc::default_p")]
    pub p: Vec<f64>,
}

impl ChannelDemoDoc {
    fn default_p() -> Vec<f64> {
        vec![0.0, 0.25, 0.5, 0.75, 1.0]
    }
}

impl Default for ChannelDemoDoc {
    fn default() -> Self {
        Self {
            p: Self::default_p(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyDoc {
    #[serde(default = "default_j_hz")]
    pub j_hz: f64,
    #[serde(default = "VerifyDoc::default_omega_02")]
    pub omega_02_hz: f64,
    /// Defaults to a quarter of `omega_02_hz`.
    pub omega_01_hz: Option<f64>,
    #[serde(default = "VerifyDoc::default_t")]
    pub t_s: f64,
    #[serde(default = "VerifyDoc::default_steps")]
    pub dt_s: Vec<f64>,
    /// Residual bound relative to the Frobenius norm of the lab Hamiltonian.
    #[serde(default = "VerifyDoc::default_bound")]
    pub relative_bound: f64,
}

impl VerifyDoc {
    fn default_omega_02() -> f64 {
        500.0
    }
    fn default_t() -> f64 {
        0.37e-3
    }
    fn default_steps() -> Vec<f64> {
        vec![1e-6, 5e-7, 2.5e-7, 1e-7]
    }
    fn default_bound() -> f64 {
        1e-3
    }
}

impl Default for VerifyDoc {
    fn default() -> Self {
        Self {
            j_hz: default_j_hz(),
            omega_02_hz: Self::default_omega_02(),
            omega_01_hz: None,
            t_s: Self::default_t(),
            dt_s: Self::default_steps(),
            relative_bound: Self::default_bound(),
        }
    }
}

/// The whole configuration document.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDocument {
    pub experiment: Experiment,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    pub transmission: Option<TransmissionDoc>,
    pub memory: Option<MemoryDoc>,
    pub channel_demo: Option<ChannelDemoDoc>,
    pub verify: Option<VerifyDoc>,
}

/// A validated run.
#[derive(Clone, Debug)]
pub enum Plan {
    Transmission(TransmissionConfig),
    /// One configuration per α.
    Memory(Vec<MemoryConfig>),
    ChannelDemo(Vec<f64>),
    Verify(VerifyDoc),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub plan: Plan,
    pub seed: Option<u64>,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
}

/// Overrides given on the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

pub fn load(path: &Path, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text, &path.display().to_string(), overrides)
}

/// Parses and validates a configuration document; `origin` names it in
/// error messages.
pub fn parse(text: &str, origin: &str, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let doc: RunDocument = toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: origin.to_string(),
        message: e.to_string().trim_end().to_string(),
    })?;
    let invalid = |location: &str, message: String| ConfigError::Invalid {
        path: origin.to_string(),
        location: location.to_string(),
        message,
    };
    let seed = overrides.seed.or(doc.seed);
    let needs_seed = matches!(
        doc.experiment,
        Experiment::Transmission | Experiment::Memory
    );
    if needs_seed && seed.is_none() {
        return Err(invalid(
            "seed",
            "a seed is required for Monte Carlo experiments".into(),
        ));
    }
    let seed_value = seed.unwrap_or(0);

    let plan = match doc.experiment {
        Experiment::Transmission => {
            let t = doc
                .transmission
                .ok_or_else(|| invalid("transmission", "missing [transmission] table".into()))?;
            Plan::Transmission(
                transmission_config(&t, seed_value).map_err(|(k, m)| invalid(&k, m))?,
            )
        }
        Experiment::Memory => {
            let m = doc
                .memory
                .ok_or_else(|| invalid("memory", "missing [memory] table".into()))?;
            Plan::Memory(memory_configs(&m, seed_value).map_err(|(k, m)| invalid(&k, m))?)
        }
        Experiment::ChannelDemo => {
            let c = doc.channel_demo.unwrap_or_default();
            if c.p.is_empty() {
                return Err(invalid(
                    "channel_demo.p",
                    "at least one probability is required".into(),
                ));
            }
            for (i, &p) in c.p.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid(
                        &format!("channel_demo.p[{i}]"),
                        format!("{p} is outside [0, 1]"),
                    ));
                }
            }
            Plan::ChannelDemo(c.p)
        }
        Experiment::Verify => {
            let v = doc.verify.unwrap_or_default();
            positive("verify.j_hz", v.j_hz).map_err(|(k, m)| invalid(&k, m))?;
            if !v.omega_02_hz.is_finite() {
                return Err(invalid("verify.omega_02_hz", "must be finite".into()));
            }
            if v.dt_s.is_empty() {
                return Err(invalid(
                    "verify.dt_s",
                    "at least one step is required".into(),
                ));
            }
            for (i, &dt) in v.dt_s.iter().enumerate() {
                positive(&format!("verify.dt_s[{i}]"), dt).map_err(|(k, m)| invalid(&k, m))?;
            }
            positive("verify.relative_bound", v.relative_bound).map_err(|(k, m)| invalid(&k, m))?;
            Plan::Verify(v)
        }
    };
    Ok(RunConfig {
        plan,
        seed,
        output_dir: overrides
            .output_dir
            .clone()
            .or(doc.output_dir)
            .unwrap_or_else(|| PathBuf::from(".")),
        format: doc.format,
    })
}

type FieldError = (String, String);

fn positive(key: &str, v: f64) -> Result<(), FieldError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err((key.to_string(), format!("must be positive, got {v}")))
    }
}

fn hz_to_rad(hz: f64) -> f64 {
    2.0 * PI * hz
}

fn transmission_config(t: &TransmissionDoc, seed: u64) -> Result<TransmissionConfig, FieldError> {
    positive("transmission.j_hz", t.j_hz)?;
    positive("transmission.total_time_s", t.total_time_s)?;
    positive("transmission.t1_s", t.t1_s)?;
    if t.bang_bang {
        positive("transmission.t_b_s", t.t_b_s)?;
    }
    let cfg = TransmissionConfig {
        j: hz_to_rad(t.j_hz),
        total_time: t.total_time_s,
        t1: t.t1_s,
        bang_bang: t.bang_bang,
        t_b: t.t_b_s,
        train_start: match t.train_start {
            TrainStartDoc::Fixed => TrainStart::FixedAtFlip,
            TrainStartDoc::Random => TrainStart::RandomPhase,
        },
        pulses_per_trial: t.pulses_per_trial,
        trials: t.trials,
        group_size: t.group_size,
        seed,
        remove_trivial_phase: t.remove_trivial_phase,
    };
    cfg.validate()
        .map_err(|e| ("transmission".to_string(), e.to_string()))?;
    Ok(cfg)
}

fn memory_configs(m: &MemoryDoc, seed: u64) -> Result<Vec<MemoryConfig>, FieldError> {
    positive("memory.j_hz", m.j_hz)?;
    positive("memory.mean_interval_s", m.mean_interval_s)?;
    if m.alphas.is_empty() {
        return Err((
            "memory.alphas".into(),
            "at least one alpha is required".into(),
        ));
    }
    let period = 2.0 * m.mean_interval_s;
    let times = match (&m.observation_times_s, m.max_time_s) {
        (Some(times), _) => times.clone(),
        (None, Some(max)) => {
            positive("memory.max_time_s", max)?;
            let n = (max / period + 1e-9).floor() as usize;
            (1..=n).map(|k| period * k as f64).collect()
        }
        (None, None) => {
            return Err((
                "memory".into(),
                "set either observation_times_s or max_time_s".into(),
            ))
        }
    };
    let mut out = Vec::with_capacity(m.alphas.len());
    for (i, &alpha) in m.alphas.iter().enumerate() {
        let cfg = MemoryConfig {
            j: hz_to_rad(m.j_hz),
            mean_interval: m.mean_interval_s,
            alpha,
            observation_times: times.clone(),
            trials: m.trials,
            group_size: m.group_size,
            bang_bang: m.bang_bang,
            t_b: m.t_b_s,
            seed,
            readout: match m.readout {
                ReadoutDoc::AtFlip => ReadoutMode::AtFlip,
                ReadoutDoc::FixedTime => ReadoutMode::FixedTime,
            },
        };
        cfg.validate()
            .map_err(|e| (format!("memory.alphas[{i}]"), e.to_string()))?;
        out.push(cfg);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_ok(text: &str) -> RunConfig {
        parse(text, "test.toml", &Overrides::default()).unwrap()
    }

    fn parse_err(text: &str) -> String {
        parse(text, "test.toml", &Overrides::default())
            .unwrap_err()
            .to_string()
    }

    #[test]
    fn memory_grid_and_unit_conversion() {
        let cfg = parse_ok(
            r#"
            experiment = "memory"
            seed = 4
            [memory]
            alphas = [0.1, 0.25]
            max_time_s = 0.1
            "#,
        );
        let Plan::Memory(list) = cfg.plan else {
            panic!()
        };
        assert_eq!(list.len(), 2);
        assert_eq!(list[0].observation_times.len(), 25);
        assert!((list[1].j - 2.0 * PI * 215.5).abs() < 1e-12);
        assert_eq!(cfg.output_dir, PathBuf::from("."));
    }

    #[test]
    fn seed_is_required_for_monte_carlo() {
        let msg = parse_err("experiment = \"transmission\"\n[transmission]\n");
        assert!(msg.contains("seed"), "{msg}");
        let ok = parse(
            "experiment = \"transmission\"\n[transmission]\n",
            "t",
            &Overrides {
                seed: Some(3),
                output_dir: None,
            },
        )
        .unwrap();
        assert_eq!(ok.seed, Some(3));
    }

    #[test]
    fn errors_carry_locations() {
        let msg = parse_err(
            "experiment = \"memory\"\nseed = 1\n[memory]\nalphas = [0.1, 0.4]\nmax_time_s = 0.1\n",
        );
        assert!(msg.contains("memory.alphas[1]"), "{msg}");
        let msg = parse_err("experiment = \"memory\"\nseed = 1\n[memory]\nalphas = 3\n");
        assert!(msg.contains("line 4"), "{msg}");
        let msg = parse_err("experiment = \"nonsense\"\n");
        assert!(msg.contains("line 1"), "{msg}");
        let msg = parse_err("experiment = \"channel-demo\"\n[channel_demo]\np = [0.5, 2.0]\n");
        assert!(msg.contains("channel_demo.p[1]"), "{msg}");
    }

    #[test]
    fn defaults_for_checks() {
        let cfg = parse_ok("experiment = \"verify\"\n");
        let Plan::Verify(v) = cfg.plan else { panic!() };
        assert_eq!(v.dt_s.len(), 4);
        assert!(cfg.seed.is_none());
    }
}
