use approx::assert_relative_eq;
use proptest::prelude::*;
use vocalfeat::dsp::{
    autocorrelation_direct, autocorrelation_fft, circular_autocorrelation,
    circular_autocorrelation_direct, equidistant_sums, fit_line, lowpass, FirLowpass,
};
use vocalfeat::features::{spl, FeatureConfig};
use vocalfeat::synth::{synth_signal, SynthSpec};
use vocalfeat::{extract_features, PressureSignal, REFERENCE_PRESSURE, REFERENCE_SAMPLE_RATE};

fn sig(x: Vec<f64>) -> PressureSignal {
    PressureSignal::new(x, 8000.0).unwrap()
}

fn sine(amp: f64, f: f64, fs: f64, n: usize) -> PressureSignal {
    let x = (0..n)
        .map(|i| amp * (std::f64::consts::TAU * f * i as f64 / fs).sin())
        .collect();
    PressureSignal::new(x, fs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn acf_fft_matches_direct(x in prop::collection::vec(-10.0f64..10.0, 1..600)) {
        let a = autocorrelation_direct(&x);
        let b = autocorrelation_fft(&x);
        let scale = a[0].abs().max(1e-300);
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() <= 1e-9 * scale);
        }
        let c = circular_autocorrelation_direct(&x);
        let d = circular_autocorrelation(&x);
        for (u, v) in c.iter().zip(&d) {
            prop_assert!((u - v).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn lowpass_is_linear(
        x in prop::collection::vec(-1.0f64..1.0, 64..400),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let y: Vec<f64> = x.iter().rev().map(|v| v * 0.5 + 0.1).collect();
        let combo: Vec<f64> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
        let fx = lowpass(&sig(x.clone()), 1000.0).unwrap();
        let fy = lowpass(&sig(y), 1000.0).unwrap();
        let fc = lowpass(&sig(combo), 1000.0).unwrap();
        for i in 0..fc.len() {
            let expect = a * fx.samples()[i] + b * fy.samples()[i];
            prop_assert!((fc.samples()[i] - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn spl_shifts_by_twenty_log_alpha(
        x in prop::collection::vec(-5.0f64..5.0, 8..200),
        alpha in 1e-3f64..1e3,
    ) {
        prop_assume!(x.iter().any(|v| v.abs() > 1e-3));
        let s = sig(x);
        let shift = spl(&s.scaled(alpha)).unwrap() - spl(&s).unwrap();
        prop_assert!((shift - 20.0 * alpha.log10()).abs() < 1e-9);
    }

    #[test]
    fn regression_recovers_exact_lines(
        slope in -50.0f64..50.0,
        intercept in -50.0f64..50.0,
        n in 2usize..300,
    ) {
        let x: Vec<f64> = (0..n).map(|i| i as f64 * 0.37 - 3.0).collect();
        let y: Vec<f64> = x.iter().map(|v| slope * v + intercept).collect();
        let fit = fit_line(&x, &y).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-8);
        prop_assert!((fit.intercept - intercept).abs() < 1e-8);
    }
}

#[test]
fn closed_form_sums_match_loops() {
    for n in [1u64, 2, 4, 16, 1024, 65_537] {
        let (sx, sx2): (u128, u128) = equidistant_sums(n);
        let loop_sx: u128 = (0..n as u128).sum();
        let loop_sx2: u128 = (0..n as u128).map(|i| i * i).sum();
        assert_eq!((sx, sx2), (loop_sx, loop_sx2), "n = {n}");
    }
}

#[test]
fn sine_at_reference_rms_is_zero_db() {
    let s = sine(REFERENCE_PRESSURE * 2f64.sqrt(), 1000.0, 48_000.0, 48_000);
    assert!(spl(&s).unwrap().abs() < 1e-6);
}

#[test]
fn filter_passes_low_and_stops_high_tones() {
    let fs = REFERENCE_SAMPLE_RATE;
    let f = FirLowpass::design(2000.0, fs, 60.0).unwrap();
    // whole numbers of cycles, so the circular convolution sees no seam
    let n = 16_384;
    let bin = fs / n as f64;
    let pass = f.apply(&sine(1.0, 111.0 * bin, fs, n)).unwrap();
    let stop = f.apply(&sine(1.0, 891.0 * bin, fs, n)).unwrap();
    let rms = |s: &PressureSignal| (s.energy() / s.len() as f64).sqrt();
    assert_relative_eq!(rms(&pass), 0.5f64.sqrt(), max_relative = 1e-3);
    assert!(rms(&stop) < 1e-3 * 0.5f64.sqrt() * 1.5);
}

#[test]
fn features_of_single_and_double_precision_agree() {
    let s = synth_signal(&SynthSpec::voiced(148.0, 30, 20.0, 3)).unwrap();
    let cfg = FeatureConfig::default();
    let a = extract_features(&s, &cfg).unwrap().to_array();
    let b = extract_features(&s.cast::<f32>(), &cfg).unwrap().to_array();
    for (name, (x, y)) in vocalfeat::FEATURE_NAMES.iter().zip(a.iter().zip(&b)) {
        let y = f64::from(*y);
        assert!((x - y).abs() <= 1e-2 * x.abs().max(1.0), "{name}: {x} vs {y}");
    }
}
