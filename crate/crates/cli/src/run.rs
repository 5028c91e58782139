//! Executes a validated run and assembles the summary table.

use std::fs;
use std::path::{Path, PathBuf};

use dephasing_core::channels::{
    channel_from_environment, channels_equal_as_maps, cnot, controlled_sigma_z,
    flip_environment_state, mixed_plus_minus_state, phase_flip, ChannelError,
};
use dephasing_core::experiments::theory::{
    kappa, kappa_fixed_start, lambda_factor, r_statistic, r_theory, t2_star, t2b_star,
};
use dephasing_core::experiments::{
    run_memory, run_transmission, transmission_trial_schedule, ExperimentError, MemoryConfig,
    TrainStart, TransmissionConfig,
};
use dephasing_core::linalg::{amplitude_of, density_from_bloch, BlochVector};
use dephasing_core::pulse::{verify_rotating_frame, LabFrameParams, PulseError};
use thiserror::Error;

use crate::config::{OutputFormat, Plan, RunConfig, VerifyDoc};
use crate::output::{
    alpha_suffix, emit_curve, emit_ensemble, emit_schedule, format_value, OutputError,
};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("cannot create output directory {path}: {source}")]
    OutputDir {
        path: String,
        source: std::io::Error,
    },
    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

/// Rows of `quantity | simulated | theory | deviation`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary {
    pub title: String,
    pub rows: Vec<[String; 4]>,
    pub notes: Vec<String>,
}

impl Summary {
    fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }

    fn compare(&mut self, quantity: impl Into<String>, simulated: f64, theory: f64) {
        let deviation = if theory != 0.0 && theory.is_finite() {
            format!("{:+.2}%", 100.0 * (simulated - theory) / theory)
        } else {
            format!("{:+.5} abs", simulated - theory)
        };
        self.rows.push([
            quantity.into(),
            format!("{simulated:.6}"),
            format!("{theory:.6}"),
            deviation,
        ]);
    }

    fn value(&mut self, quantity: impl Into<String>, simulated: String, theory: String) {
        self.rows
            .push([quantity.into(), simulated, theory, "-".into()]);
    }

    pub fn render(&self) -> String {
        let header = ["quantity", "simulated", "theory", "deviation"];
        let mut widths = header.map(str::len);
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: [&str; 4]| {
            let mut s = String::new();
            for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
                let pad = w - cell.chars().count();
                if i == 0 {
                    s.push_str(cell);
                    s.push_str(&" ".repeat(pad));
                } else {
                    s.push_str("  ");
                    s.push_str(&" ".repeat(pad));
                    s.push_str(cell);
                }
            }
            s.push('\n');
            s
        };
        let mut out = format!("{}\n", self.title);
        out.push_str(&line(header));
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&line([&rule[0], &rule[1], &rule[2], &rule[3]]));
        for row in &self.rows {
            out.push_str(&line([&row[0], &row[1], &row[2], &row[3]]));
        }
        for note in &self.notes {
            out.push_str(&format!("note: {note}\n"));
        }
        out
    }
}

/// Runs the plan, writes outputs and returns the summary. Files written
/// are listed in `written`.
pub fn execute(cfg: &RunConfig) -> Result<(Summary, Vec<PathBuf>), RunError> {
    fs::create_dir_all(&cfg.output_dir).map_err(|source| RunError::OutputDir {
        path: cfg.output_dir.display().to_string(),
        source,
    })?;
    let csv = cfg.format == OutputFormat::Csv;
    let mut written = Vec::new();
    let summary = match &cfg.plan {
        Plan::Transmission(t) => transmission(t, &cfg.output_dir, csv, &mut written)?,
        Plan::Memory(list) => memory(list, &cfg.output_dir, csv, &mut written)?,
        Plan::ChannelDemo(ps) => channel_demo(ps, &cfg.output_dir, csv, &mut written)?,
        Plan::Verify(v) => verify(v)?,
    };
    let path = cfg.output_dir.join("summary.txt");
    fs::write(&path, summary.render()).map_err(|source| OutputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    written.push(path);
    Ok((summary, written))
}

fn transmission(
    cfg: &TransmissionConfig,
    dir: &Path,
    csv: bool,
    written: &mut Vec<PathBuf>,
) -> Result<Summary, RunError> {
    let result = run_transmission(cfg)?;
    let mut s = Summary::new(format!(
        "transmission line: {} trials, seed {}, bang-bang {}",
        cfg.trials,
        cfg.seed,
        if cfg.bang_bang { "on" } else { "off" }
    ));
    let magnitude = result.grand_average.norm();
    let theory = if !cfg.bang_bang {
        0.0
    } else {
        match cfg.train_start {
            TrainStart::FixedAtFlip => kappa_fixed_start(cfg.j, cfg.t_b)?,
            TrainStart::RandomPhase => kappa(cfg.j, cfg.t_b)?,
        }
    };
    s.compare("grand |avg|", magnitude, theory);
    s.value(
        "standard error",
        format!("{:.6}", result.standard_error()),
        "-".into(),
    );
    if cfg.bang_bang {
        s.value(
            "pulses per trial",
            cfg.pulse_count().to_string(),
            "-".into(),
        );
    }
    if csv {
        let amps = dir.join("transmission_amplitudes.csv");
        emit_ensemble(&result, &amps)?;
        written.push(amps);
        let sched = dir.join("transmission_schedule_example.toml");
        emit_schedule(
            &transmission_trial_schedule(cfg, 0.5 * cfg.noise_span(), 0.0)?,
            &sched,
        )?;
        written.push(sched);
    }
    Ok(s)
}

fn memory(
    list: &[MemoryConfig],
    dir: &Path,
    csv: bool,
    written: &mut Vec<PathBuf>,
) -> Result<Summary, RunError> {
    let first = &list[0];
    let mut s = Summary::new(format!(
        "quantum memory: {} trials, seed {}, bang-bang {}",
        first.trials,
        first.seed,
        if first.bang_bang { "on" } else { "off" }
    ));
    for cfg in list {
        for w in cfg.warnings() {
            s.notes.push(format!("α = {:.2}: {w}", cfg.alpha));
        }
        let result = run_memory(cfg)?;
        let a = cfg.alpha;
        let (t_end, m_end) = *result.curve.points.last().expect("validated non-empty");
        let pairs = (t_end / (2.0 * cfg.mean_interval)).round() as i32;
        let predicted_t2 = if cfg.bang_bang {
            Some(t2b_star(cfg.j, cfg.t_b, cfg.mean_interval)?)
        } else if a > 0.0 {
            Some(t2_star(cfg.j, a, cfg.mean_interval)?)
        } else {
            None
        };
        let predicted_end = if cfg.bang_bang {
            kappa(cfg.j, cfg.t_b)?.powi(pairs)
        } else {
            lambda_factor(cfg.j, cfg.mean_interval, a)?.powi(pairs)
        };
        s.compare(
            format!("α={a:.2} |avg| at {:.1} ms", t_end * 1e3),
            m_end,
            predicted_end,
        );
        let label = if cfg.bang_bang { "T2b*" } else { "T2*" };
        match (result.curve.fit, predicted_t2) {
            (Some(fit), Some(p)) => {
                s.compare(format!("α={a:.2} {label} (ms)"), fit.t2 * 1e3, p * 1e3);
                if !cfg.bang_bang {
                    let r = r_statistic((-t_end / fit.t2).exp(), 1.0, a)?;
                    s.compare(
                        format!("α={a:.2} R(α)"),
                        r,
                        r_theory(cfg.j, cfg.mean_interval, t_end),
                    );
                }
            }
            (None, p) => s.value(
                format!("α={a:.2} {label} (ms)"),
                "no decay".into(),
                p.map(|v| format!("{:.6}", v * 1e3))
                    .unwrap_or_else(|| "inf".into()),
            ),
            (Some(fit), None) => s.value(
                format!("α={a:.2} {label} (ms)"),
                format!("{:.6}", fit.t2 * 1e3),
                "inf".into(),
            ),
        }
        if csv {
            let path = dir.join(format!("memory{}.csv", alpha_suffix(a)));
            emit_curve(&result.curve, &path)?;
            written.push(path);
        }
    }
    Ok(s)
}

fn channel_demo(
    ps: &[f64],
    dir: &Path,
    csv: bool,
    written: &mut Vec<PathBuf>,
) -> Result<Summary, RunError> {
    let mut s = Summary::new("phase flip channel from two environment dilations");
    let plus = density_from_bloch(&BlochVector::new(1.0, 0.0, 0.0).expect("unit vector"));
    let mut table = String::from("p,factor_flip_dilation,factor_cnot_dilation,factor_theory\n");
    for &p in ps {
        let target = phase_flip(p)?;
        let flip = channel_from_environment(&controlled_sigma_z(), &flip_environment_state(p)?)?;
        let mixed = channel_from_environment(&cnot(), &mixed_plus_minus_state(p)?)?;
        let factor = |ch: &dephasing_core::KrausChannel| -> Result<f64, RunError> {
            Ok(amplitude_of(&ch.apply(&plus)?)
                .map_err(ChannelError::from)?
                .value()
                .re)
        };
        let (f1, f2) = (factor(&flip)?, factor(&mixed)?);
        s.compare(
            format!("p={p:.2} coherence factor (flip)"),
            f1,
            2.0 * p - 1.0,
        );
        s.compare(
            format!("p={p:.2} coherence factor (CNOT)"),
            f2,
            2.0 * p - 1.0,
        );
        let equal = channels_equal_as_maps(&flip, &target, 1e-12)
            && channels_equal_as_maps(&mixed, &target, 1e-12);
        s.value(
            format!("p={p:.2} equal as maps"),
            equal.to_string(),
            "true".into(),
        );
        table.push_str(&format!(
            "{},{},{},{}\n",
            format_value(p),
            format_value(f1),
            format_value(f2),
            format_value(2.0 * p - 1.0)
        ));
    }
    if csv {
        let path = dir.join("channel_demo.csv");
        fs::write(&path, table).map_err(|source| OutputError::Io {
            path: path.display().to_string(),
            source,
        })?;
        written.push(path);
    }
    Ok(s)
}

fn verify(v: &VerifyDoc) -> Result<Summary, RunError> {
    use std::f64::consts::PI;
    let mut s = Summary::new("verification checks");
    let mut failures = Vec::new();
    let w2 = 2.0 * PI * v.omega_02_hz;
    let params = LabFrameParams {
        omega_01: v.omega_01_hz.map(|h| 2.0 * PI * h).unwrap_or(w2 / 4.0),
        omega_02: w2,
        j: 2.0 * PI * v.j_hz,
    };
    let bound = v.relative_bound * params.hamiltonian().frobenius_norm();
    let mut prev: Option<(f64, f64)> = None;
    for &dt in &v.dt_s {
        let r = verify_rotating_frame(&params, v.t_s, dt)?;
        let ratio = prev
            .filter(|&(_, pr)| pr > 0.0 && r > 0.0)
            .map(|(pdt, pr)| format!("{:.3} (expect {:.3})", pr / r, (pdt / dt).powi(2)))
            .unwrap_or_else(|| "-".into());
        s.value(
            format!("rotating frame residual dt={dt:e}"),
            format!("{r:.3e}"),
            format!("< {bound:.3e}"),
        );
        s.value(
            "  ratio to previous step".to_string(),
            ratio,
            "(dt ratio)²".into(),
        );
        if r >= bound {
            failures.push(format!("rotating-frame residual {r:.3e} at dt = {dt:e}"));
        }
        prev = Some((dt, r));
    }
    for p in [0.0, 0.25, 0.5, 1.0] {
        let target = phase_flip(p)?;
        let flip = channel_from_environment(&controlled_sigma_z(), &flip_environment_state(p)?)?;
        let mixed = channel_from_environment(&cnot(), &mixed_plus_minus_state(p)?)?;
        let equal = channels_equal_as_maps(&flip, &target, 1e-12)
            && channels_equal_as_maps(&mixed, &target, 1e-12);
        s.value(
            format!("phase flip dilations agree, p={p:.2}"),
            equal.to_string(),
            "true".into(),
        );
        if !equal {
            failures.push(format!("channel equivalence at p = {p}"));
        }
    }
    if failures.is_empty() {
        Ok(s)
    } else {
        Err(RunError::VerifyFailed(failures.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_table_layout() {
        let mut s = Summary::new("t");
        s.compare("x", 1.02, 1.0);
        s.compare("zero", 0.001, 0.0);
        let text = s.render();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t");
        assert!(lines[1].starts_with("quantity"));
        assert!(lines[3].ends_with("+2.00%"));
        assert!(lines[4].ends_with("abs"));
    }

    #[test]
    fn verify_passes_with_defaults() {
        let s = verify(&VerifyDoc::default()).unwrap();
        assert!(s.rows.iter().any(|r| r[0].starts_with("phase flip")));
    }

    #[test]
    fn verify_reports_failure() {
        let v = VerifyDoc {
            relative_bound: 1e-12,
            ..VerifyDoc::default()
        };
        assert!(matches!(verify(&v), Err(RunError::VerifyFailed(_))));
    }
}
