use vocalfeat::dsp::{welch_psd, WelchConfig};
use vocalfeat::features::{extract_features, hnr, spectral_slope, FeatureConfig};
use vocalfeat::signal::Signal;
use vocalfeat::synth::{noise, NoiseKind, Prng};

const FS: f64 = 73529.0;

fn white(seed: u64, n: usize) -> Signal<f64> {
    Signal::new(noise(NoiseKind::White, n, FS, &mut Prng::new(seed)), FS).unwrap()
}

fn harmonic(f0: f64, n_harm: usize, scale: f64) -> Signal<f64> {
    let w = 2.0 * std::f64::consts::PI * f0 / FS;
    let x = (0..FS as usize)
        .map(|i| {
            (1..=n_harm)
                .map(|k| scale / (k * k) as f64 * (k as f64 * w * i as f64).cos())
                .sum()
        })
        .collect();
    Signal::new(x, FS).unwrap()
}

#[test]
fn white_noise_has_strongly_negative_hnr() {
    for seed in [1, 2, 3] {
        let h = hnr(&white(seed, FS as usize), &FeatureConfig::default()).unwrap();
        assert!(h < -10.0, "seed {seed}: {h}");
    }
}

#[test]
fn both_branches_agree_on_a_pure_low_sine() {
    let s = harmonic(148.0, 1, 1.0);
    let f = extract_features(&s, &FeatureConfig::default()).unwrap();
    assert!((f.hnr_2k - f.hnr_5k).abs() < 1.0, "{} vs {}", f.hnr_2k, f.hnr_5k);
}

#[test]
fn ratio_features_ignore_amplitude() {
    let cfg = FeatureConfig::default();
    let a = extract_features(&harmonic(148.0, 20, 1.0), &cfg).unwrap();
    for scale in [0.01, 7.5] {
        let b = extract_features(&harmonic(148.0, 20, scale), &cfg).unwrap();
        assert!((a.hnr_5k - b.hnr_5k).abs() < 1e-6, "{scale}");
        assert!((a.hnr_2k - b.hnr_2k).abs() < 1e-6, "{scale}");
        assert!((a.hbi_5k - b.hbi_5k).abs() < 1e-6, "{scale}");
        assert!((a.alpha_5k - b.alpha_5k).abs() < 1e-6, "{scale}");
        let dspl = b.spl_5k - a.spl_5k;
        assert!((dspl - 20.0 * scale.log10()).abs() < 1e-6, "{scale}: {dspl}");
    }
}

#[test]
fn welch_power_of_white_noise_matches_its_variance() {
    for seed in [4, 5] {
        let s = white(seed, 2 * FS as usize);
        let var = s.samples().iter().map(|v| v * v).sum::<f64>() / s.len() as f64;
        let p = welch_psd(&s, &WelchConfig::default()).unwrap().band_power();
        assert!((p / var - 1.0).abs() < 0.05, "seed {seed}: {p} vs {var}");
    }
}

#[test]
fn white_noise_spectrum_is_flat() {
    for seed in [6, 7, 8] {
        let spec = welch_psd(&white(seed, 2 * FS as usize), &WelchConfig::default()).unwrap();
        let slope = spectral_slope(&spec).unwrap();

        // ordinary least-squares standard error of the slope
        let m = spec.magnitudes();
        let f: Vec<f64> = (0..m.len()).map(|k| spec.frequency(k)).collect();
        let n = m.len() as f64;
        let (fm, mm) = (f.iter().sum::<f64>() / n, m.iter().sum::<f64>() / n);
        let sxx: f64 = f.iter().map(|v| (v - fm).powi(2)).sum();
        let b = f.iter().zip(m).map(|(x, y)| (x - fm) * (y - mm)).sum::<f64>() / sxx;
        let rss: f64 = f.iter().zip(m).map(|(x, y)| (y - mm - b * (x - fm)).powi(2)).sum();
        let se = (rss / (n - 2.0) / sxx).sqrt();

        assert!((slope - b).abs() <= 1e-9 * b.abs().max(se), "{slope} vs {b}");
        assert!(slope.abs() < 2.0 * se, "seed {seed}: {slope} with SE {se}");
    }
}
