use vocalfeat::io::{load_manifest, load_signal, SignalFormat};
use vocalfeat::stats::{correlation_map, grouped_boxplots};
use vocalfeat::synth::{synth_surrogate_dataset, write_surrogate_dataset, SurrogateConfig};
use vocalfeat::{extract_features, FeatureConfig, LabelKind, LabelVector};

#[test]
fn written_dataset_loads_back_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let records = write_surrogate_dataset(dir.path(), 17, &SurrogateConfig::default()).unwrap();
    assert_eq!(records.len(), 24);
    let loaded = load_manifest(&dir.path().join("manifest.csv")).unwrap();
    let fresh = synth_surrogate_dataset(17).unwrap();
    assert_eq!(loaded.len(), 24);
    for (rec, entry) in loaded.iter().zip(&fresh) {
        assert_eq!(rec.id, entry.record.id);
        assert_eq!(rec.label, entry.record.label);
        let s = load_signal(&rec.signal_path, SignalFormat::RawFloat64, None).unwrap();
        assert_eq!(s.samples(), entry.signal.samples());
        assert_eq!(s.sample_rate(), entry.signal.sample_rate());
    }
}

#[test]
fn factorial_covers_every_label_once() {
    let ds = synth_surrogate_dataset(0).unwrap();
    let mut labels: Vec<LabelVector> = ds.iter().map(|e| e.record.label).collect();
    let mut expected = LabelVector::factorial();
    let key = |l: &LabelVector| (l.value(LabelKind::Pressure), l.value(LabelKind::Gc), l.value(LabelKind::Symmetry));
    labels.sort_by_key(key);
    expected.sort_by_key(key);
    assert_eq!(labels, expected);
}

#[test]
fn cpp_and_gc_are_negatively_correlated() {
    let ds = synth_surrogate_dataset(2).unwrap();
    let cfg = FeatureConfig::default();
    let feats: Vec<_> = ds
        .iter()
        .map(|e| extract_features(&e.signal, &cfg).unwrap())
        .collect();
    let labels: Vec<_> = ds.iter().map(|e| e.record.label).collect();
    let map = correlation_map(&feats, &labels).unwrap();
    assert_eq!(map.len(), 12);
    for i in 0..12 {
        assert_eq!(map.matrix[i][i], 1.0);
        for j in 0..12 {
            assert_eq!(map.matrix[i][j], map.matrix[j][i]);
        }
    }
    assert!(map.get("cpp_2k", "gc_type").unwrap() < -0.5);
    assert!(map.get("spl_5k", "pressure_pa").unwrap() > 0.8);

    let boxes = grouped_boxplots(&feats, &labels, 4, LabelKind::Gc).unwrap();
    let medians: Vec<f64> = boxes.iter().map(|b| b.median).collect();
    assert!(medians.windows(2).all(|w| w[0] > w[1]), "{medians:?}");
}
