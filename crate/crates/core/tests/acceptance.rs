//! Acceptance suite. One test per criterion; each prints a single
//! `[PASS]` / `[FAIL]` line before asserting.
//!
//! Run with `cargo test --test acceptance -- --nocapture --test-threads=1`
//! to see the lines in order.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use morlet_detect::detector::{
    led_level, led_level_full, required_accumulator_bits, ResponseFormat, Response, ThresholdBank,
};
use morlet_detect::frontend::{
    decode_frame, encode_frame, max_sample_rate, nyquist_limit, pulse_divider, sample_voltage,
    AdcConfig, AdcSamplePair, SpiFrame,
};
use morlet_detect::harness::{run_chirp_with, run_sweep_with, ExperimentConfig, Pipeline};
use morlet_detect::quantize::{quantize_bank, Q14};
use morlet_detect::wavelets::{morlet, scale_tap_count, WaveletSpec, Q14_SCALE};

fn report(id: u32, what: &str, ok: bool, detail: String, elapsed: Duration, budget: Duration) -> bool {
    let in_time = elapsed < budget;
    let pass = ok && in_time;
    println!(
        "[{}] AC{id:<2} {what}: {detail} ({:.3} s, budget {:.0} s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    pass
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

#[test]
fn ac01_coefficient_counts() {
    let start = Instant::now();
    let spec = WaveletSpec::paper_default();
    let bank = quantize_bank(&morlet(&spec).unwrap()).unwrap();
    let one_k = scale_tap_count(1e3, 20e3, &spec).unwrap();
    let ok = bank.tap_count() == 133 && bank.coefficient_count() == 266 && one_k.scaled_total() == 1596;
    let detail = format!(
        "taps {}, total {}, 1 kHz scaled {} per channel -> {} total (odd bank {} taps)",
        bank.tap_count(),
        bank.coefficient_count(),
        one_k.scaled,
        one_k.scaled_total(),
        one_k.taps
    );
    assert!(report(1, "coefficient counts", ok, detail, start.elapsed(), secs(1)));
}

#[test]
fn ac02_adc_endpoint_codes() {
    let start = Instant::now();
    let cfg = AdcConfig::default();
    let hi = sample_voltage(2.9, &cfg).unwrap();
    let lo = sample_voltage(0.4, &cfg).unwrap();
    let ok = hi.value() == -8192 && hi.to_bits() == 0x2000 && lo.value() == 8191 && lo.to_bits() == 0x1FFF;
    let detail = format!(
        "2.9 V -> {} (0x{:04X}), 0.4 V -> {} (0x{:04X})",
        hi,
        hi.to_bits(),
        lo,
        lo.to_bits()
    );
    assert!(report(2, "ADC endpoint codes", ok, detail, start.elapsed(), secs(1)));
}

#[test]
fn ac03_rate_arithmetic() {
    let start = Instant::now();
    let rate = max_sample_rate(50e6);
    let nyq = nyquist_limit(rate);
    let div = pulse_divider(10e6, 20e3).unwrap().divider;
    let rate_err = (rate - 1.4706e6).abs() / 1.4706e6;
    let paper_err = (rate - 1.47e6).abs() / 1.47e6;
    let nyq_err = (nyq - 0.735e6).abs() / 0.735e6;
    let ok = rate_err <= 0.005 && paper_err <= 0.005 && nyq_err <= 0.005 && div == 500;
    let detail = format!("max rate {rate:.1} Hz, nyquist {nyq:.1} Hz, divider {div}");
    assert!(report(3, "rate arithmetic", ok, detail, start.elapsed(), secs(1)));
}

#[test]
fn ac04_spi_codec() {
    let start = Instant::now();
    let mut mismatches = 0usize;
    let mut check = |pair: AdcSamplePair| {
        let frame = encode_frame(pair);
        let via_text: SpiFrame = frame.to_string().parse().unwrap();
        if decode_frame(&frame) != pair || decode_frame(&via_text) != pair {
            mismatches += 1;
        }
    };
    for v in -8192..=8191 {
        let code = Q14::new(v).unwrap();
        check(AdcSamplePair::new(code, Q14::ZERO));
        check(AdcSamplePair::new(Q14::ZERO, code));
        check(AdcSamplePair::new(code, Q14::new(-1 - v).unwrap()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    for _ in 0..10_000 {
        let a = Q14::new(rng.random_range(-8192..=8191)).unwrap();
        let b = Q14::new(rng.random_range(-8192..=8191)).unwrap();
        check(AdcSamplePair::new(a, b));
    }
    let detail = format!("{mismatches} mismatches over 3x16384 sweep + 10000 random pairs");
    assert!(report(4, "SPI codec roundtrip", mismatches == 0, detail, start.elapsed(), secs(5)));
}

#[test]
fn ac05_overflow_sizing() {
    let start = Instant::now();
    let cfg = ExperimentConfig::default();
    let pipe = Pipeline::new(&cfg).unwrap();
    let acc_bits = required_accumulator_bits(&pipe.bank);
    let sweep = run_sweep_with(&pipe, &cfg).unwrap();
    let max = sweep.max_mag_sq().max(pipe.thresholds.max_response);
    let max_bits = 128 - max.leading_zeros();
    let acc_ok = acc_bits <= 33;
    let resp_ok = max < 1u128 << 50;
    let detail = format!(
        "accumulator bits {acc_bits} (<= 33: {acc_ok}), max mag_sq {max} = {max_bits}-bit (< 2^50: {resp_ok})"
    );
    assert!(report(5, "overflow sizing", acc_ok && resp_ok, detail, start.elapsed(), secs(10)));
}

#[test]
fn ac06_frequency_selectivity() {
    let start = Instant::now();
    let cfg = ExperimentConfig::default();
    let pipe = Pipeline::new(&cfg).unwrap();
    let sweep = run_sweep_with(&pipe, &cfg).unwrap();
    let level = |f: f64| sweep.row_at(f).map(|r| r.led_level.value());
    let center = level(6000.0);
    let low = level(500.0);
    let high = level(9500.0);
    // level must not grow with distance from the center
    let mut monotone = true;
    for a in &sweep.rows {
        for b in &sweep.rows {
            let (da, db) = ((a.frequency - 6000.0).abs(), (b.frequency - 6000.0).abs());
            if da < db && a.led_level < b.led_level {
                monotone = false;
            }
        }
    }
    let profile: String = sweep.rows.iter().map(|r| char::from(b'0' + r.led_level.value())).collect();
    let ok = center == Some(8) && low == Some(0) && high == Some(0) && monotone;
    let detail = format!("levels 500..9500 Hz = {profile}, monotone {monotone}");
    assert!(report(6, "frequency selectivity", ok, detail, start.elapsed(), secs(30)));
}

#[test]
fn ac07_float_fixed_agreement() {
    let start = Instant::now();
    let cfg = ExperimentConfig::default();
    let pipe = Pipeline::new(&cfg).unwrap();
    let sweep = run_sweep_with(&pipe, &cfg).unwrap();
    let mut worst_abs = 0.0f64;
    let mut worst_rel = 0.0f64;
    for row in &sweep.rows {
        let fixed = sweep.fixed_norm(row);
        let float = sweep.float_norm(row);
        worst_abs = worst_abs.max((fixed - float).abs());
        if float >= 1.0 / 16.0 {
            worst_rel = worst_rel.max((fixed - float).abs() / float);
        }
    }
    let corr = run_chirp_with(&pipe, &cfg.chirp).unwrap().correlation();
    let ok = worst_abs <= 0.02 && worst_rel <= 0.02 && corr >= 0.99;
    let detail = format!(
        "max |fixed - float| {worst_abs:.2e} of full scale, max in-band relative {worst_rel:.2e}, chirp corr {corr:.6}"
    );
    assert!(report(7, "float/fixed agreement", ok, detail, start.elapsed(), secs(30)));
}

#[test]
fn ac08_chirp_localization() {
    let start = Instant::now();
    let cfg = ExperimentConfig::default();
    let pipe = Pipeline::new(&cfg).unwrap();
    let trace = run_chirp_with(&pipe, &cfg.chirp).unwrap();
    let fs = trace.sample_rate;
    let n = trace.tap_count as f64;
    let crossing = trace.crossing_time.expect("default chirp crosses the center");
    let tolerance = (n - 1.0) / (2.0 * fs) + 10.0 / fs;
    let fixed_t = trace.rows[trace.fixed_argmax()].time;
    let float_t = trace.rows[trace.float_argmax()].time;
    let ok = (fixed_t - crossing).abs() <= tolerance && (float_t - crossing).abs() <= tolerance;
    let detail = format!(
        "crossing {crossing:.5} s, fixed peak {fixed_t:.5} s, float peak {float_t:.5} s, tolerance {tolerance:.5} s"
    );
    assert!(report(8, "chirp localization", ok, detail, start.elapsed(), secs(10)));
}

#[test]
fn ac09_clipping_soundness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let margin = 1u128 << 34;
    let (mut eligible, mut violations) = (0usize, 0usize);
    for _ in 0..100_000 {
        let m: u128 = rng.random_range(1u128..(1 << 50));
        let t = ThresholdBank::from_max(m, ResponseFormat::PAPER).unwrap();
        let r = Response::new(rng.random_range(0u128..(1 << 50)));
        if t.full.iter().all(|&f| r.mag_sq.abs_diff(f) >= margin) {
            eligible += 1;
            if led_level(r, &t) != led_level_full(r, &t) {
                violations += 1;
            }
        }
    }
    let detail = format!("{violations} violations over {eligible} eligible of 100000 samples");
    assert!(report(9, "clipping soundness", violations == 0 && eligible > 0, detail, start.elapsed(), secs(5)));
}

#[test]
fn ac10_wavelet_correctness() {
    let start = Instant::now();
    let bank = morlet(&WaveletSpec::paper_default()).unwrap();
    let n = bank.len();
    let mid = (n - 1) / 2;
    let center_ok = bank.real[mid] == 1.0 && bank.imag[mid] == 0.0;
    let symmetric = (0..n).all(|k| bank.real[k] == bank.real[n - 1 - k] && bank.imag[k] == -bank.imag[n - 1 - k]);
    let sum_re = bank.real.iter().sum::<f64>().abs();
    let sum_im = bank.imag.iter().sum::<f64>().abs();
    let zero_mean = sum_re < 1e-6 * n as f64 && sum_im < 1e-6 * n as f64;
    let lsb = 1.0 / Q14_SCALE;
    let edges = bank.real[0].abs() < lsb && bank.imag[0].abs() < lsb;
    let ok = center_ok && symmetric && zero_mean && edges;
    let detail = format!(
        "center ({}, {}), symmetric {symmetric}, |sum re| {sum_re:.2e}, |sum im| {sum_im:.2e}, edge ({:.2e}, {:.2e}) < {lsb:.2e}",
        bank.real[mid], bank.imag[mid], bank.real[0].abs(), bank.imag[0].abs()
    );
    assert!(report(10, "wavelet correctness", ok, detail, start.elapsed(), secs(1)));
}
