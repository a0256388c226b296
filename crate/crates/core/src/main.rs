use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use morlet_detect::harness::{
    export_coefficients, run_chirp_with, run_dc_check, run_sweep_with, timing_report, write_chirp_csv,
    write_dc_csv, write_sweep_csv, write_thresholds_csv, CalibrationReport, CoefficientFormat,
    ExperimentConfig, Pipeline,
};
use morlet_detect::wavelets::{morlet, Q14_SCALE};
use morlet_detect::{quantize, Error};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INVALID_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "morlet-detect", version, about = "Fixed-point Morlet tone detector experiments")]
struct Cli {
    /// TOML experiment configuration; defaults reproduce the reference design.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides `output_dir` from the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Wavelet center frequency in Hz; tap count rescales with it.
    #[arg(long, global = true)]
    freq: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the ADC window edges and reference, check 0x1FFF / 0x2000 / 0x0000.
    DcCheck,
    /// Full-scale tone sweep: peak response and LED level per frequency.
    Sweep {
        #[arg(long)]
        steps: Option<usize>,
        /// Tone amplitude in volts.
        #[arg(long)]
        amplitude: Option<f64>,
    },
    /// Chirp through the float and fixed paths.
    Chirp {
        /// Chirp amplitude in volts.
        #[arg(long)]
        amplitude: Option<f64>,
    },
    /// Write the quantized coefficient bank.
    Export {
        #[arg(long, value_enum, default_value_t = Format::Vh)]
        format: Format,
    },
    /// Clock divider, sample rate and Nyquist budget.
    Timing,
    /// Calibrate the detector and write its thresholds.
    Calibrate,
    /// Print the effective configuration as TOML.
    ShowConfig,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Vh,
    Csv,
}

impl From<Format> for CoefficientFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Vh => CoefficientFormat::Vh,
            Format::Csv => CoefficientFormat::Csv,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e @ (Error::Config(_) | Error::InvalidArgument(_) | Error::NyquistViolation { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(freq) = cli.freq {
        cfg = cfg.with_center_freq(freq)?;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn out_path(cfg: &ExperimentConfig, name: &str) -> PathBuf {
    cfg.output_dir.join(name)
}

fn wrote(path: &Path) {
    println!("wrote {}", path.display());
}

fn run(cli: Cli) -> Result<bool, Error> {
    let mut cfg = load_config(&cli)?;
    match cli.command {
        Command::Timing => {
            let report = timing_report(&cfg)?;
            println!("{report}");
            Ok(report.passed())
        }
        Command::ShowConfig => {
            print!("{}", cfg.to_toml());
            Ok(true)
        }
        Command::DcCheck => {
            let report = run_dc_check(&cfg)?;
            for r in &report.rows {
                println!(
                    "{:>5.2} V -> {:>6} {} (expected 0x{:04X}) frame {} {}",
                    r.volts,
                    r.code,
                    r.hex,
                    r.expected,
                    r.frame,
                    if r.pass { "PASS" } else { "FAIL" }
                );
            }
            let path = out_path(&cfg, "dc_check.csv");
            write_dc_csv(&report, &path)?;
            wrote(&path);
            Ok(report.passed())
        }
        Command::Sweep { steps, amplitude } => {
            if let Some(s) = steps {
                cfg.sweep.steps = s;
            }
            if let Some(a) = amplitude {
                cfg.sweep.amplitude = a;
            }
            let pipe = Pipeline::new(&cfg)?;
            let result = run_sweep_with(&pipe, &cfg)?;
            for r in &result.rows {
                println!(
                    "{:>8.1} Hz  level {}  {}",
                    r.frequency,
                    r.led_level.value(),
                    "#".repeat(r.led_level.value() as usize)
                );
            }
            let path = out_path(&cfg, "sweep.csv");
            write_sweep_csv(&result, &cfg, &path)?;
            wrote(&path);
            Ok(true)
        }
        Command::Chirp { amplitude } => {
            if let Some(a) = amplitude {
                cfg.chirp.amplitude = a;
            }
            let pipe = Pipeline::new(&cfg)?;
            let trace = run_chirp_with(&pipe, &cfg.chirp)?;
            if let Some(w) = &trace.warning {
                eprintln!("warning: {w}");
            }
            let peak = trace.fixed_argmax();
            println!("samples             {}", trace.rows.len());
            println!("fixed peak at       {:.5} s", trace.rows[peak].time);
            if let Some(t) = trace.crossing_time {
                println!("center crossing at  {t:.5} s");
            }
            println!("max led level       {}", trace.max_led_level().value());
            println!("fixed/float corr    {:.6}", trace.correlation());
            let path = out_path(&cfg, "chirp.csv");
            write_chirp_csv(&trace, &cfg, &path)?;
            wrote(&path);
            Ok(true)
        }
        Command::Export { format } => {
            let bank = quantize::quantize_bank(&morlet(&cfg.wavelet)?)?;
            let format = CoefficientFormat::from(format);
            std::fs::create_dir_all(&cfg.output_dir)?;
            let path = out_path(&cfg, &format!("wavelet_coeffs.{}", format.extension()));
            export_coefficients(&bank, format, &path)?;
            println!(
                "{} taps, {} coefficients (scale {})",
                bank.tap_count(),
                bank.coefficient_count(),
                Q14_SCALE
            );
            wrote(&path);
            Ok(true)
        }
        Command::Calibrate => {
            let pipe = Pipeline::new(&cfg)?;
            let report = CalibrationReport::from_pipeline(&pipe);
            let t = &report.thresholds;
            println!("max response        {}", t.max_response);
            println!("accumulator bits    {} (signed)", report.accumulator_bits);
            println!("response bits       {}", report.response_bits);
            if t.format.width_bits > 50 {
                println!(
                    "note: responses need {} bits; register widened from 50",
                    t.format.width_bits
                );
            }
            for k in 0..t.full.len() {
                println!("led {}  full {:>22}  clipped {:>6}", k + 1, t.full[k], t.clipped[k]);
            }
            let path = out_path(&cfg, "thresholds.csv");
            write_thresholds_csv(&report, &path)?;
            wrote(&path);
            Ok(report.accumulator_bits <= 33)
        }
    }
}
