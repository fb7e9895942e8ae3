//! Parameter sweeps and the CSV report format.
//!
//! Points run independently (in parallel when a rayon pool is available),
//! each with a seed derived from the base seed and its index, so a sweep's
//! CSV output is byte-identical across runs and thread counts.

use std::io::Write;

use rayon::prelude::*;

use super::config::{ExperimentConfig, RinConfig, SweepSpec};
use super::link::{run_link, LinkReport};
use super::HarnessError;
use crate::rxdsp::Scheme;
use crate::util::derive_seed;

/// The swept value of one point.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepValue {
    ReceivedPowerDbm(f64),
    RinMode(usize),
    Scheme(Scheme),
}

impl SweepValue {
    /// Value as it appears in the `sweep_value` CSV column.
    pub fn label(&self) -> String {
        match self {
            SweepValue::ReceivedPowerDbm(p) => format!("{p:.8e}"),
            SweepValue::RinMode(k) => k.to_string(),
            SweepValue::Scheme(s) => s.to_string(),
        }
    }
}

/// One executed sweep point.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: SweepValue,
    pub report: LinkReport,
}

fn point_config(cfg: &ExperimentConfig, value: &SweepValue, index: u64) -> ExperimentConfig {
    let mut point = cfg.clone();
    point.sweep = None;
    point.seed = derive_seed(cfg.seed, index);
    match value {
        SweepValue::ReceivedPowerDbm(p) => point.channel.received_power_dbm = *p,
        SweepValue::RinMode(k) => point.rin = RinConfig::preset_named(&format!("qdash-mode-{k}")),
        SweepValue::Scheme(s) => point.scheme = *s,
    }
    point
}

/// Runs one [`run_link`] per sweep value with independent derived seeds.
pub fn sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepPoint>, HarnessError> {
    cfg.validate()?;
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| HarnessError::Validation("config has no [sweep] section".into()))?
        .spec()?;

    let values: Vec<SweepValue> = match spec {
        SweepSpec::ReceivedPowerDbm(v) => {
            v.into_iter().map(SweepValue::ReceivedPowerDbm).collect()
        }
        SweepSpec::RinMode(v) => v.into_iter().map(SweepValue::RinMode).collect(),
        SweepSpec::Scheme(v) => v.into_iter().map(SweepValue::Scheme).collect(),
    };

    let configs: Vec<(SweepValue, ExperimentConfig)> = values
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), point_config(cfg, v, i as u64)))
        .collect();

    // Points are embarrassingly parallel; results are collected in input
    // order so output does not depend on scheduling.
    let reports: Result<Vec<LinkReport>, HarnessError> =
        configs.par_iter().map(|(_, c)| run_link(c)).collect();
    let reports = reports?;

    Ok(values.into_iter().zip(reports).map(|(value, report)| SweepPoint { value, report }).collect())
}

/// Writes the per-point sweep CSV with the fixed column set.
pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "sweep_value,scheme,ber,ser,bits_compared,fec_pass,avg_rin_5g,avg_rin_30g,notch_hz"
    )?;
    for p in points {
        let r = &p.report;
        writeln!(
            out,
            "{},{},{:.8e},{:.8e},{},{},{:.8e},{:.8e},{:.8e}",
            p.value.label(),
            r.scheme,
            r.errors.ber,
            r.errors.ser,
            r.errors.bits_compared,
            r.errors.fec_pass,
            r.avg_rin_5g_db,
            r.avg_rin_30g_db,
            r.notch_hz
        )?;
    }
    Ok(())
}

/// Writes one aggregate line per scheme appearing in the sweep.
pub fn write_summary_csv<W: Write>(points: &[SweepPoint], mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "scheme,points,fec_pass_count,below_resolution_count,min_ber,max_ber"
    )?;
    for scheme in Scheme::ALL {
        let mine: Vec<&SweepPoint> =
            points.iter().filter(|p| p.report.scheme == scheme).collect();
        if mine.is_empty() {
            continue;
        }
        let fec = mine.iter().filter(|p| p.report.errors.fec_pass).count();
        let unresolved = mine.iter().filter(|p| p.report.below_resolution()).count();
        let min =
            mine.iter().map(|p| p.report.errors.ber).fold(f64::INFINITY, f64::min);
        let max = mine.iter().map(|p| p.report.errors.ber).fold(0.0f64, f64::max);
        writeln!(
            out,
            "{scheme},{},{fec},{unresolved},{:.8e},{:.8e}",
            mine.len(),
            min,
            max
        )?;
    }
    Ok(())
}
