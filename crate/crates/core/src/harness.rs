//! Experiment driver: configuration, DC check, frequency sweep, chirp
//! response, coefficient export and timing budget.
//!
//! Every artifact is a plain CSV (plus the `.vh` coefficient header). Output
//! depends only on the configuration, so identical configs give
//! byte-identical files.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{
    calibrate_max_response, float_calibration_max, float_response, required_accumulator_bits,
    required_response_bits, DetectorState, LedLevel, ThresholdBank, LED_COUNT,
};
use crate::error::{Error, Result};
use crate::frontend::{
    decode_frame, encode_frame, max_sample_rate, normalized_input, nyquist_limit, pulse_divider,
    sample_voltage, AdcConfig, AdcSamplePair, SamplingChain,
};
use crate::quantize::{quantize_bank, Q14CoefficientBank};
use crate::signals::{gen_chirp, gen_tone_len, ChirpSpec, ToneSpec, VoltageSequence};
use crate::wavelets::{morlet, tap_count_for, FloatCoefficientBank, WaveletSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TimingConfig {
    /// Clock feeding the sample-pulse counter.
    pub system_clock: f64,
    pub spi_clock: f64,
}

impl Default for TimingConfig {
    fn default() -> Self {
        Self {
            system_clock: 10e6,
            spi_clock: 50e6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub f_start: f64,
    pub f_end: f64,
    pub steps: usize,
    pub amplitude: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            f_start: 500.0,
            f_end: 9_500.0,
            steps: 37,
            amplitude: 1.25,
        }
    }
}

impl SweepConfig {
    /// Evenly spaced grid from `f_start` to `f_end` inclusive.
    pub fn frequencies(&self) -> Vec<f64> {
        let step = (self.f_end - self.f_start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.f_end
                } else {
                    self.f_start + step * i as f64
                }
            })
            .collect()
    }
}

fn default_chirp() -> ChirpSpec {
    ChirpSpec {
        f_start: 500.0,
        f_end: 9_500.0,
        duration: 0.5,
        amplitude: 1.25,
        dc_bias: 1.65,
    }
}

/// Everything an experiment needs. Defaults reproduce the reference design:
/// 6 kHz Morlet over 133 taps at 20 ksps, gain -1, 1.25 V full-scale stimuli.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub wavelet: WaveletSpec,
    pub adc: AdcConfig,
    pub timing: TimingConfig,
    pub sweep: SweepConfig,
    #[serde(default = "default_chirp")]
    pub chirp: ChirpSpec,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            wavelet: WaveletSpec::paper_default(),
            adc: AdcConfig::default(),
            timing: TimingConfig::default(),
            sweep: SweepConfig::default(),
            chirp: default_chirp(),
            output_dir: PathBuf::from("out"),
        }
    }
}

fn config_err(e: impl fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(config_err)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Check every sub-config. Errors are reported as [`Error::Config`].
    pub fn validate(&self) -> Result<()> {
        self.wavelet.validate().map_err(config_err)?;
        self.adc.validate().map_err(config_err)?;
        self.chirp.validate().map_err(config_err)?;
        if self.sweep.steps < 2 {
            return Err(Error::Config(format!("sweep needs >= 2 steps, got {}", self.sweep.steps)));
        }
        if !(self.sweep.f_start > 0.0 && self.sweep.f_start < self.sweep.f_end) {
            return Err(Error::Config("sweep needs 0 < f_start < f_end".into()));
        }
        if self.sweep.f_end >= self.wavelet.sample_rate / 2.0 {
            return Err(Error::Config(format!(
                "sweep end {} Hz is not below the Nyquist limit",
                self.sweep.f_end
            )));
        }
        if !(self.sweep.amplitude > 0.0 && self.sweep.amplitude <= self.adc.half_window() + 1e-12) {
            return Err(Error::Config(format!(
                "sweep amplitude must be in (0, {}] V",
                self.adc.half_window()
            )));
        }
        SamplingChain::new(
            self.adc,
            self.timing.system_clock,
            self.timing.spi_clock,
            self.wavelet.sample_rate,
        )
        .map_err(config_err)?;
        Ok(())
    }

    /// Move the wavelet to `freq`, rescaling its tap count with frequency.
    pub fn with_center_freq(mut self, freq: f64) -> Result<Self> {
        let taps = tap_count_for(freq, self.wavelet.sample_rate, &self.wavelet).map_err(config_err)?;
        self.wavelet.center_freq = freq;
        self.wavelet.tap_count = taps;
        Ok(self)
    }
}

/// Banks, sampling chain and calibration shared by the experiments.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub spec: WaveletSpec,
    pub float_bank: FloatCoefficientBank,
    pub bank: Q14CoefficientBank,
    pub chain: SamplingChain,
    pub thresholds: ThresholdBank,
    /// Largest float-path response to a full-scale center-frequency tone.
    pub float_max: f64,
}

impl Pipeline {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let spec = cfg.wavelet;
        let float_bank = morlet(&spec)?;
        let bank = quantize_bank(&float_bank)?;
        let chain = SamplingChain::new(
            cfg.adc,
            cfg.timing.system_clock,
            cfg.timing.spi_clock,
            spec.sample_rate,
        )?;
        let thresholds = calibrate_max_response(&bank, &cfg.adc)?;
        let float_max = float_calibration_max(&float_bank, &cfg.adc)?;
        Ok(Self {
            spec,
            float_bank,
            bank,
            chain,
            thresholds,
            float_max,
        })
    }

    pub fn tap_count(&self) -> usize {
        self.bank.tap_count()
    }

    /// Fixed-path responses for a stimulus, one per sample.
    pub fn fixed_trace(&self, seq: &VoltageSequence) -> Result<Vec<u128>> {
        let codes = self.chain.capture(seq)?;
        let mut det = DetectorState::new(self.bank.clone());
        Ok(codes.iter().map(|&c| det.push_sample(c).mag_sq).collect())
    }

    /// Float-path responses for the same stimulus before quantization.
    pub fn float_trace(&self, seq: &VoltageSequence) -> Vec<f64> {
        let adc = self.chain.adc();
        let signal: Vec<f64> = seq.samples.iter().map(|&v| normalized_input(v, adc)).collect();
        float_response(&self.float_bank, &signal)
    }
}

// ---------------------------------------------------------------------------
// DC check

#[derive(Debug, Clone, PartialEq)]
pub struct DcCheckRow {
    pub volts: f64,
    pub code: i16,
    /// 14-bit pattern, e.g. `0x2000`.
    pub hex: String,
    pub frame: String,
    pub expected: u16,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcCheckReport {
    pub rows: Vec<DcCheckRow>,
}

impl DcCheckReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Sample the window edges and the reference through the ADC and SPI frame.
pub fn run_dc_check(cfg: &ExperimentConfig) -> Result<DcCheckReport> {
    cfg.adc.validate().map_err(config_err)?;
    let (lo, hi) = cfg.adc.code_range();
    let probes = [
        (cfg.adc.v_min, hi as u16 & 0x3FFF),
        (cfg.adc.v_max, lo as u16 & 0x3FFF),
        (cfg.adc.v_ref, 0),
    ];
    let rows = probes
        .iter()
        .map(|&(volts, expected)| {
            let code = sample_voltage(volts, &cfg.adc)?;
            let frame = encode_frame(AdcSamplePair::mirrored(code));
            let received = decode_frame(&frame).channel_a;
            let bits = received.to_bits();
            Ok(DcCheckRow {
                volts,
                code: received.value(),
                hex: format!("0x{bits:04X}"),
                frame: frame.to_string(),
                expected,
                pass: bits == expected,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DcCheckReport { rows })
}

// ---------------------------------------------------------------------------
// Sweep

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub frequency: f64,
    /// Largest fixed-path response once the tap line is full.
    pub peak_mag_sq: u128,
    pub led_level: LedLevel,
    /// Largest float-path response over the same window.
    pub float_peak: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub thresholds: ThresholdBank,
    pub float_max: f64,
}

impl SweepResult {
    /// Fixed peak over the calibrated maximum.
    pub fn fixed_norm(&self, row: &SweepRow) -> f64 {
        row.peak_mag_sq as f64 / self.thresholds.max_response as f64
    }

    pub fn float_norm(&self, row: &SweepRow) -> f64 {
        row.float_peak / self.float_max
    }

    pub fn max_mag_sq(&self) -> u128 {
        self.rows.iter().map(|r| r.peak_mag_sq).max().unwrap_or(0)
    }

    pub fn row_at(&self, freq: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| (r.frequency - freq).abs() < 1e-9)
    }
}

/// Full-scale tone at every grid frequency, `3N` samples each.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let pipe = Pipeline::new(cfg)?;
    run_sweep_with(&pipe, cfg)
}

pub fn run_sweep_with(pipe: &Pipeline, cfg: &ExperimentConfig) -> Result<SweepResult> {
    let n = pipe.tap_count();
    let len = 3 * n;
    let fs = pipe.spec.sample_rate;
    let rows = cfg
        .sweep
        .frequencies()
        .into_par_iter()
        .map(|freq| {
            let tone = ToneSpec::new(freq, cfg.sweep.amplitude, cfg.adc.v_ref, 0.0)?;
            let seq = gen_tone_len(&tone, fs, len)?;
            let peak_mag_sq = pipe.fixed_trace(&seq)?[n - 1..].iter().copied().max().unwrap_or(0);
            let float_peak = pipe.float_trace(&seq)[n - 1..].iter().copied().fold(0.0, f64::max);
            let led_level = pipe.thresholds.level(crate::detector::Response::new(peak_mag_sq));
            Ok(SweepRow {
                frequency: freq,
                peak_mag_sq,
                led_level,
                float_peak,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        rows,
        thresholds: pipe.thresholds,
        float_max: pipe.float_max,
    })
}

// ---------------------------------------------------------------------------
// Chirp

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpRow {
    pub time: f64,
    pub float_response: f64,
    pub fixed_mag_sq: u128,
    pub led_level: LedLevel,
}

#[derive(Debug, Clone)]
pub struct ChirpTrace {
    pub rows: Vec<ChirpRow>,
    pub thresholds: ThresholdBank,
    pub float_max: f64,
    pub sample_rate: f64,
    pub tap_count: usize,
    /// When the sweep passes the wavelet center frequency.
    pub crossing_time: Option<f64>,
    pub warning: Option<String>,
}

impl ChirpTrace {
    fn argmax_by<F: Fn(&ChirpRow) -> f64>(&self, key: F) -> usize {
        let mut best = 0;
        for (i, row) in self.rows.iter().enumerate() {
            if key(row) > key(&self.rows[best]) {
                best = i;
            }
        }
        best
    }

    pub fn fixed_argmax(&self) -> usize {
        self.argmax_by(|r| r.fixed_mag_sq as f64)
    }

    pub fn float_argmax(&self) -> usize {
        self.argmax_by(|r| r.float_response)
    }

    pub fn fixed_normalized(&self) -> Vec<f64> {
        let m = self.thresholds.max_response as f64;
        self.rows.iter().map(|r| r.fixed_mag_sq as f64 / m).collect()
    }

    pub fn float_normalized(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.float_response / self.float_max).collect()
    }

    /// Pearson correlation of the normalized fixed and float traces.
    pub fn correlation(&self) -> f64 {
        pearson(&self.fixed_normalized(), &self.float_normalized())
    }

    pub fn max_led_level(&self) -> LedLevel {
        self.rows.iter().map(|r| r.led_level).max().unwrap_or_default()
    }
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len()) as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - mean_a, y - mean_b);
        cov += dx * dy;
        va += dx * dx;
        vb += dy * dy;
    }
    cov / (va.sqrt() * vb.sqrt())
}

/// Run the configured chirp through both paths.
pub fn run_chirp(cfg: &ExperimentConfig) -> Result<ChirpTrace> {
    let pipe = Pipeline::new(cfg)?;
    run_chirp_with(&pipe, &cfg.chirp)
}

pub fn run_chirp_with(pipe: &Pipeline, chirp: &ChirpSpec) -> Result<ChirpTrace> {
    let fs = pipe.spec.sample_rate;
    let center = pipe.spec.center_freq;
    let lo = chirp.f_start.min(chirp.f_end);
    let hi = chirp.f_start.max(chirp.f_end);
    let warning = (!(lo < center && center < hi)).then(|| {
        format!("chirp band {lo}-{hi} Hz does not straddle the {center} Hz wavelet center")
    });
    let seq = gen_chirp(chirp, fs)?;
    let fixed = pipe.fixed_trace(&seq)?;
    let float = pipe.float_trace(&seq);
    let rows = fixed
        .iter()
        .zip(&float)
        .enumerate()
        .map(|(i, (&m, &f))| ChirpRow {
            time: seq.time_of(i),
            float_response: f,
            fixed_mag_sq: m,
            led_level: pipe.thresholds.level(crate::detector::Response::new(m)),
        })
        .collect();
    Ok(ChirpTrace {
        rows,
        thresholds: pipe.thresholds,
        float_max: pipe.float_max,
        sample_rate: fs,
        tap_count: pipe.tap_count(),
        crossing_time: chirp.crossing_time(center),
        warning,
    })
}

// ---------------------------------------------------------------------------
// Timing

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingReport {
    pub system_clock: f64,
    pub divider: u64,
    pub achieved_fs: f64,
    pub rate_error: f64,
    pub spi_clock: f64,
    pub max_sample_rate: f64,
    /// Nyquist limit at the maximum conversion rate.
    pub max_rate_nyquist: f64,
    /// Nyquist limit at the achieved detector rate.
    pub detector_nyquist: f64,
    pub center_freq: f64,
    pub center_below_nyquist: bool,
    pub rate_within_spi_limit: bool,
}

impl TimingReport {
    pub fn passed(&self) -> bool {
        self.center_below_nyquist && self.rate_within_spi_limit
    }
}

impl fmt::Display for TimingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flag = |ok: bool| if ok { "PASS" } else { "FAIL" };
        writeln!(f, "system clock        {:.0} Hz", self.system_clock)?;
        writeln!(f, "pulse divider       {}", self.divider)?;
        writeln!(
            f,
            "achieved fs         {:.3} Hz ({:+.4}% vs target)",
            self.achieved_fs,
            self.rate_error * 100.0
        )?;
        writeln!(f, "spi clock           {:.0} Hz", self.spi_clock)?;
        writeln!(f, "max sample rate     {:.1} Hz", self.max_sample_rate)?;
        writeln!(f, "nyquist @ max rate  {:.1} Hz", self.max_rate_nyquist)?;
        writeln!(f, "nyquist @ fs        {:.3} Hz", self.detector_nyquist)?;
        writeln!(
            f,
            "fs within spi limit {}",
            flag(self.rate_within_spi_limit)
        )?;
        write!(
            f,
            "center {:.1} Hz < nyquist: {}",
            self.center_freq,
            flag(self.center_below_nyquist)
        )
    }
}

/// Rate budget for the configured clocks. Does not require a valid wavelet.
pub fn timing_report(cfg: &ExperimentConfig) -> Result<TimingReport> {
    let pulse = pulse_divider(cfg.timing.system_clock, cfg.wavelet.sample_rate).map_err(config_err)?;
    let achieved = pulse.achieved_rate();
    let max_rate = max_sample_rate(cfg.timing.spi_clock);
    let detector_nyquist = nyquist_limit(achieved);
    Ok(TimingReport {
        system_clock: cfg.timing.system_clock,
        divider: pulse.divider,
        achieved_fs: achieved,
        rate_error: pulse.rate_error(),
        spi_clock: cfg.timing.spi_clock,
        max_sample_rate: max_rate,
        max_rate_nyquist: nyquist_limit(max_rate),
        detector_nyquist,
        center_freq: cfg.wavelet.center_freq,
        center_below_nyquist: cfg.wavelet.center_freq < detector_nyquist,
        rate_within_spi_limit: achieved <= max_rate,
    })
}

// ---------------------------------------------------------------------------
// Calibration report

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationReport {
    pub thresholds: ThresholdBank,
    pub accumulator_bits: u32,
    pub response_bits: u32,
    pub float_max: f64,
}

impl CalibrationReport {
    pub fn from_pipeline(pipe: &Pipeline) -> Self {
        Self {
            thresholds: pipe.thresholds,
            accumulator_bits: required_accumulator_bits(&pipe.bank),
            response_bits: required_response_bits(&pipe.bank),
            float_max: pipe.float_max,
        }
    }
}

// ---------------------------------------------------------------------------
// CSV output

fn csv_with_preamble(path: &Path, preamble: &[String]) -> Result<csv::Writer<fs::File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut file = fs::File::create(path)?;
    for line in preamble {
        writeln!(file, "# {line}")?;
    }
    Ok(csv::Writer::from_writer(file))
}

fn threshold_headers() -> Vec<String> {
    (1..=LED_COUNT).map(|k| format!("threshold_{k}")).collect()
}

pub fn write_dc_csv(report: &DcCheckReport, path: &Path) -> Result<()> {
    let mut w = csv_with_preamble(path, &[])?;
    w.write_record(["volts", "code", "hex", "spi_frame", "expected", "pass"])?;
    for r in &report.rows {
        w.write_record([
            r.volts.to_string(),
            r.code.to_string(),
            r.hex.clone(),
            r.frame.clone(),
            format!("0x{:04X}", r.expected),
            r.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `frequency_hz,peak_mag_sq,led_level,float_peak,fixed_norm,float_norm`
pub fn write_sweep_csv(result: &SweepResult, cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    let preamble = [
        format!(
            "sweep grid {}-{} Hz in {} steps at {} V amplitude (configurable defaults)",
            cfg.sweep.f_start, cfg.sweep.f_end, cfg.sweep.steps, cfg.sweep.amplitude
        ),
        format!(
            "calibrated max response {} ({}-bit response register)",
            result.thresholds.max_response, result.thresholds.format.width_bits
        ),
    ];
    let mut w = csv_with_preamble(path, &preamble)?;
    w.write_record([
        "frequency_hz",
        "peak_mag_sq",
        "led_level",
        "float_peak",
        "fixed_norm",
        "float_norm",
    ])?;
    for r in &result.rows {
        w.write_record([
            r.frequency.to_string(),
            r.peak_mag_sq.to_string(),
            r.led_level.value().to_string(),
            r.float_peak.to_string(),
            result.fixed_norm(r).to_string(),
            result.float_norm(r).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `time_s,float_response,fixed_mag_sq,led_level,threshold_1..threshold_8`
pub fn write_chirp_csv(trace: &ChirpTrace, cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    let mut preamble = vec![format!(
        "chirp {}-{} Hz over {} s at {} V amplitude (configurable defaults)",
        cfg.chirp.f_start, cfg.chirp.f_end, cfg.chirp.duration, cfg.chirp.amplitude
    )];
    if let Some(w) = &trace.warning {
        preamble.push(format!("warning: {w}"));
    }
    let mut w = csv_with_preamble(path, &preamble)?;
    let mut header = vec![
        "time_s".to_string(),
        "float_response".into(),
        "fixed_mag_sq".into(),
        "led_level".into(),
    ];
    header.extend(threshold_headers());
    w.write_record(&header)?;
    let thresholds: Vec<String> = trace.thresholds.full.iter().map(|t| t.to_string()).collect();
    for r in &trace.rows {
        let mut rec = vec![
            r.time.to_string(),
            r.float_response.to_string(),
            r.fixed_mag_sq.to_string(),
            r.led_level.value().to_string(),
        ];
        rec.extend(thresholds.iter().cloned());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// `led,full,clipped`
pub fn write_thresholds_csv(report: &CalibrationReport, path: &Path) -> Result<()> {
    let t = &report.thresholds;
    let preamble = [
        format!("max_response {}", t.max_response),
        format!(
            "response register {} bits; compare bits {}..{} against thresholds >> {}",
            t.format.width_bits,
            t.format.width_bits - 1,
            t.format.response_shift(),
            t.format.threshold_shift()
        ),
    ];
    let mut w = csv_with_preamble(path, &preamble)?;
    w.write_record(["led", "full", "clipped"])?;
    for k in 0..LED_COUNT {
        w.write_record([(k + 1).to_string(), t.full[k].to_string(), t.clipped[k].to_string()])?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Coefficient export

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientFormat {
    Vh,
    Csv,
}

impl CoefficientFormat {
    pub fn extension(self) -> &'static str {
        match self {
            CoefficientFormat::Vh => "vh",
            CoefficientFormat::Csv => "csv",
        }
    }
}

fn verilog_literal(v: i16) -> String {
    if v < 0 {
        format!("-14'sd{}", -(v as i32))
    } else {
        format!("14'sd{v}")
    }
}

/// Render the Verilog header.
///
/// ```txt
/// // Q14 Morlet wavelet coefficients (x * 8191, truncated toward zero)
/// // taps: 133
/// // center_freq_hz: 6000
/// // sample_rate_hz: 20000
/// // width: 4.5
/// localparam integer WAVELET_TAPS = 133;
/// reg signed [13:0] coeff_real [0:132];
/// reg signed [13:0] coeff_imag [0:132];
/// initial begin
///     coeff_real[0] = 14'sd0;
///     ...
///     coeff_imag[132] = 14'sd0;
/// end
/// ```
///
/// Index `i` multiplies the tap holding `x[n - i]`. Lines end in `\n`.
pub fn render_vh(bank: &Q14CoefficientBank) -> String {
    let n = bank.tap_count();
    let mut out = String::new();
    out.push_str("// Q14 Morlet wavelet coefficients (x * 8191, truncated toward zero)\n");
    out.push_str(&format!("// taps: {n}\n"));
    match bank.source() {
        Some(spec) => {
            out.push_str(&format!("// center_freq_hz: {}\n", spec.center_freq));
            out.push_str(&format!("// sample_rate_hz: {}\n", spec.sample_rate));
            out.push_str(&format!("// width: {}\n", spec.width));
        }
        None => out.push_str("// center_freq_hz: n/a\n"),
    }
    out.push_str(&format!("localparam integer WAVELET_TAPS = {n};\n"));
    let last = n.saturating_sub(1);
    out.push_str(&format!("reg signed [13:0] coeff_real [0:{last}];\n"));
    out.push_str(&format!("reg signed [13:0] coeff_imag [0:{last}];\n"));
    out.push_str("initial begin\n");
    for (name, values) in [("coeff_real", bank.real()), ("coeff_imag", bank.imag())] {
        for (i, q) in values.iter().enumerate() {
            out.push_str(&format!("    {name}[{i}] = {};\n", verilog_literal(q.value())));
        }
    }
    out.push_str("end\n");
    out
}

/// Parse a header produced by [`render_vh`]. Comment metadata is not read back.
pub fn parse_vh(text: &str) -> Result<Q14CoefficientBank> {
    let mut real = Vec::new();
    let mut imag = Vec::new();
    for line in text.lines().map(str::trim) {
        let target = if line.starts_with("coeff_real[") {
            &mut real
        } else if line.starts_with("coeff_imag[") {
            &mut imag
        } else {
            continue;
        };
        let bad = || Error::Parse(format!("malformed coefficient line: {line}"));
        let (lhs, rhs) = line.split_once('=').ok_or_else(bad)?;
        let index: usize = lhs
            .split_once('[')
            .and_then(|(_, rest)| rest.split_once(']'))
            .and_then(|(idx, _)| idx.parse().ok())
            .ok_or_else(bad)?;
        let literal = rhs.trim().trim_end_matches(';').trim();
        let (negative, body) = match literal.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, literal),
        };
        let magnitude: i32 = body
            .strip_prefix("14'sd")
            .and_then(|d| d.parse().ok())
            .ok_or_else(bad)?;
        if index != target.len() {
            return Err(Error::Parse(format!("coefficient index {index} out of order")));
        }
        target.push(if negative { -magnitude } else { magnitude });
    }
    Q14CoefficientBank::from_codes(real, imag, None)
}

/// `index,real,imag`
pub fn render_coefficients_csv(bank: &Q14CoefficientBank) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "real", "imag"])?;
    for (i, (re, im)) in bank.real().iter().zip(bank.imag()).enumerate() {
        w.write_record([i.to_string(), re.to_string(), im.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Deserialize)]
struct CoefficientRecord {
    index: usize,
    real: i32,
    imag: i32,
}

pub fn parse_coefficients_csv(text: &str, source: Option<WaveletSpec>) -> Result<Q14CoefficientBank> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut real = Vec::new();
    let mut imag = Vec::new();
    for (expected, rec) in rdr.deserialize::<CoefficientRecord>().enumerate() {
        let rec = rec?;
        if rec.index != expected {
            return Err(Error::Parse(format!(
                "row index {} where {expected} was expected",
                rec.index
            )));
        }
        real.push(rec.real);
        imag.push(rec.imag);
    }
    Q14CoefficientBank::from_codes(real, imag, source)
}

pub fn export_coefficients(bank: &Q14CoefficientBank, format: CoefficientFormat, path: &Path) -> Result<()> {
    let text = match format {
        CoefficientFormat::Vh => render_vh(bank),
        CoefficientFormat::Csv => render_coefficients_csv(bank)?,
    };
    fs::write(path, text)?;
    Ok(())
}
