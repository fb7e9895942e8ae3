//! `pamsim` — run, sweep, calibrate and inspect simulated PAM4 links.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pamsim_core::harness::{
    calibrate_power_axis, load_config, run_link, sweep, transmit_waveform, write_summary_csv,
    write_sweep_csv, ExperimentConfig, HarnessError, LinkReport,
};
use pamsim_core::waveform::{notch_width, welch_psd, WindowKind};

#[derive(Parser)]
#[command(name = "pamsim", version, about = "PAM4 optical link simulator with DC-balanced line coding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the config file's base seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the config file's output directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one link simulation; writes report.csv (and taps.csv if enabled).
    Run { config: PathBuf },
    /// Run the configured sweep; writes sweep.csv and sweep_summary.csv.
    Sweep { config: PathBuf },
    /// Pin the thermal-noise density to a (power, BER) anchor on the
    /// uncoded curve; writes calibration.csv.
    Calibrate {
        config: PathBuf,
        /// Anchor received power in dBm.
        #[arg(long, default_value_t = -7.0)]
        power_dbm: f64,
        /// Anchor bit error rate.
        #[arg(long, default_value_t = 5e-6)]
        ber: f64,
    },
    /// Estimate the transmitted spectrum; writes psd.csv and prints the
    /// -3 dB notch width.
    Psd { config: PathBuf },
}

fn load(path: &PathBuf, cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = load_config(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &cli.out_dir {
        cfg.output_dir = dir.clone();
    }
    Ok(cfg)
}

fn out_file(cfg: &ExperimentConfig, name: &str) -> Result<BufWriter<File>, HarnessError> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    Ok(BufWriter::new(File::create(cfg.output_dir.join(name))?))
}

fn write_report_csv(report: &LinkReport, mut out: impl Write) -> std::io::Result<()> {
    writeln!(
        out,
        "scheme,received_power_dbm,ber,ser,bit_errors,bits_compared,fec_pass,resolved,\
         line_ser,avg_rin_5g,avg_rin_30g,notch_hz,eq_mse,invalid_groups,disparity_errors,\
         sync_failures,batches,seed"
    )?;
    writeln!(
        out,
        "{},{:.8e},{:.8e},{:.8e},{},{},{},{},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{},{},{},{},{}",
        report.scheme,
        report.received_power_dbm,
        report.errors.ber,
        report.errors.ser,
        report.errors.bit_errors,
        report.errors.bits_compared,
        report.errors.fec_pass,
        report.resolved,
        report.line_ser,
        report.avg_rin_5g_db,
        report.avg_rin_30g_db,
        report.notch_hz,
        report.equalizer_mse,
        report.invalid_groups,
        report.disparity_errors,
        report.sync_failures,
        report.batches,
        report.seed
    )
}

fn write_taps_csv(report: &LinkReport, mut out: impl Write) -> std::io::Result<()> {
    let n_taps = report.tap_log.first().map_or(13, |(_, t)| t.len());
    let header: Vec<String> = (0..n_taps).map(|k| format!("tap_{k}")).collect();
    writeln!(out, "symbol_index,{}", header.join(","))?;
    for (i, taps) in &report.tap_log {
        let row: Vec<String> = taps.iter().map(|t| format!("{t:.8e}")).collect();
        writeln!(out, "{i},{}", row.join(","))?;
    }
    Ok(())
}

fn cmd_run(cfg: &ExperimentConfig) -> Result<(), HarnessError> {
    let report = run_link(cfg)?;
    let mut out = out_file(cfg, "report.csv")?;
    write_report_csv(&report, &mut out)?;
    out.flush()?;
    if !report.tap_log.is_empty() {
        let mut taps = out_file(cfg, "taps.csv")?;
        write_taps_csv(&report, &mut taps)?;
        taps.flush()?;
    }
    println!(
        "{} at {:.2} dBm: BER {:.3e} ({} errors / {} bits){}, SER {:.3e}, FEC {}, \
         notch {:.1} MHz, eq MSE {:.2e}, {} batches in {:.1} s",
        report.scheme,
        report.received_power_dbm,
        report.errors.ber,
        report.errors.bit_errors,
        report.errors.bits_compared,
        if report.resolved { "" } else { " [below resolution]" },
        report.errors.ser,
        if report.errors.fec_pass { "pass" } else { "fail" },
        report.notch_hz / 1e6,
        report.equalizer_mse,
        report.batches,
        report.wall_clock_seconds
    );
    if report.sync_failures > 0 {
        println!("warning: {} batch(es) failed frame synchronization", report.sync_failures);
    }
    Ok(())
}

fn cmd_sweep(cfg: &ExperimentConfig) -> Result<(), HarnessError> {
    let points = sweep(cfg)?;
    let mut out = out_file(cfg, "sweep.csv")?;
    write_sweep_csv(&points, &mut out)?;
    out.flush()?;
    let mut out = out_file(cfg, "sweep_summary.csv")?;
    write_summary_csv(&points, &mut out)?;
    out.flush()?;
    for p in &points {
        println!(
            "{} {}: BER {:.3e} ({} errors){}",
            p.report.scheme,
            p.value.label(),
            p.report.errors.ber,
            p.report.errors.bit_errors,
            if p.report.resolved { "" } else { " [below resolution]" }
        );
    }
    println!("wrote {} points to {}", points.len(), cfg.output_dir.join("sweep.csv").display());
    Ok(())
}

fn cmd_calibrate(cfg: &ExperimentConfig, power_dbm: f64, ber: f64) -> Result<(), HarnessError> {
    let calibrated = calibrate_power_axis(cfg, power_dbm, ber)?;
    let mut out = out_file(cfg, "calibration.csv")?;
    writeln!(out, "target_power_dbm,target_ber,thermal_noise_a_per_sqrthz")?;
    writeln!(
        out,
        "{:.8e},{:.8e},{:.8e}",
        power_dbm, ber, calibrated.thermal_noise_a_per_sqrthz
    )?;
    out.flush()?;
    println!(
        "calibrated thermal noise density: {:.4e} A/sqrt(Hz) (anchor {:.2} dBm at BER {:.2e})",
        calibrated.thermal_noise_a_per_sqrthz, power_dbm, ber
    );
    Ok(())
}

fn cmd_psd(cfg: &ExperimentConfig) -> Result<(), HarnessError> {
    let tx = transmit_waveform(cfg)?;
    let segment = 4096.min((tx.len() / 8).next_power_of_two() / 2).max(256);
    let psd = welch_psd(&tx, segment, 0.5, WindowKind::Hann)?;
    let notch = notch_width(&psd, cfg.baud_hz, -3.0)?;
    let mut out = out_file(cfg, "psd.csv")?;
    psd.write_csv(&mut out)?;
    out.flush()?;
    println!(
        "{}: transmitted PSD over {} bins, -3 dB notch width {:.1} MHz",
        cfg.scheme,
        psd.len(),
        notch / 1e6
    );
    Ok(())
}

fn real_main() -> Result<(), HarnessError> {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| HarnessError::Validation(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Run { config } => cmd_run(&load(config, &cli)?),
        Command::Sweep { config } => cmd_sweep(&load(config, &cli)?),
        Command::Calibrate { config, power_dbm, ber } => {
            cmd_calibrate(&load(config, &cli)?, *power_dbm, *ber)
        }
        Command::Psd { config } => cmd_psd(&load(config, &cli)?),
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // One machine-readable line: error: <category>: <message>
            eprintln!("error: {}: {}", e.category(), e);
            ExitCode::FAILURE
        }
    }
}
