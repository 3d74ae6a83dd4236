use proptest::prelude::*;
use vocalfeat::ml::{
    cross_validate, cross_validate_with_folds, decision_grid, lda_fit, stratified_kfold,
    svm_train, Bounds, CvConfig, Embedding, Matrix, Pipeline, PipelineConfig, SvmParams,
};
use vocalfeat::stats::{boxplot_stats, pearson};
use vocalfeat::synth::Prng;

fn blobs(seed: u64, per_class: usize, d: usize, sep: f64) -> (Matrix<f64>, Vec<i64>) {
    let mut p = Prng::new(seed);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for c in 0..3 {
        for _ in 0..per_class {
            let r: Vec<f64> = (0..d)
                .map(|j| p.gaussian() + if j % 3 == c as usize { sep } else { 0.0 })
                .collect();
            rows.push(r);
            y.push(c);
        }
    }
    (Matrix::from_rows(&rows).unwrap(), y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn boxplot_ignores_order(mut v in prop::collection::vec(-1e3f64..1e3, 1..60), seed in any::<u64>()) {
        let a = boxplot_stats(&v, "g").unwrap();
        Prng::new(seed).shuffle(&mut v);
        let b = boxplot_stats(&v, "g").unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pearson_is_symmetric_and_affine_invariant(
        x in prop::collection::vec(-10.0f64..10.0, 3..50),
        s in 0.1f64..10.0,
        t in -5.0f64..5.0,
    ) {
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| v * v + i as f64).collect();
        let r = pearson(&x, &y);
        prop_assume!(r.is_ok());
        let r = r.unwrap();
        prop_assert!((r - pearson(&y, &x).unwrap()).abs() < 1e-12);
        let xs: Vec<f64> = x.iter().map(|v| s * v + t).collect();
        prop_assert!((r - pearson(&xs, &y).unwrap()).abs() < 1e-9);
        prop_assert!((-1.0..=1.0).contains(&r));
    }

    #[test]
    fn lda_ignores_feature_rescaling(seed in 0u64..1000, scales in prop::collection::vec(0.01f64..100.0, 4)) {
        let (x, y) = blobs(seed, 8, 4, 3.0);
        let xs = Matrix::from_rows(
            &x.iter_rows()
                .map(|r| r.iter().zip(&scales).map(|(v, s)| v * s).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let cfg = PipelineConfig::default();
        let za = Embedding::fit(&x, &y, &cfg).unwrap().transform(&x).unwrap();
        let zb = Embedding::fit(&xs, &y, &cfg).unwrap().transform(&xs).unwrap();
        for (a, b) in za.as_slice().iter().zip(zb.as_slice()) {
            prop_assert!((a - b).abs() < 1e-8 * (1.0 + a.abs()), "{} vs {}", a, b);
        }
        // without standardisation only the relative ridge breaks equivariance,
        // which is negligible for moderate scale ratios
        let mild: Vec<f64> = scales.iter().map(|s| 0.5 + s / 100.0).collect();
        let xm = Matrix::from_rows(
            &x.iter_rows()
                .map(|r| r.iter().zip(&mild).map(|(v, s)| v * s).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let ra = lda_fit(&x, &y, 2).unwrap().transform(&x).unwrap();
        let rb = lda_fit(&xm, &y, 2).unwrap().transform(&xm).unwrap();
        // rescaling can change which weight is largest, hence the sign
        for j in 0..ra.cols() {
            let (ca, cb) = (ra.col(j), rb.col(j));
            let same = ca.iter().zip(&cb).all(|(a, b)| (a - b).abs() < 1e-4 * (1.0 + a.abs()));
            let flipped = ca.iter().zip(&cb).all(|(a, b)| (a + b).abs() < 1e-4 * (1.0 + a.abs()));
            prop_assert!(same || flipped, "column {}", j);
        }
    }

    #[test]
    fn svm_duals_are_feasible(seed in 0u64..1000, c in 0.05f64..20.0) {
        let (x, y) = blobs(seed, 6, 3, 1.0);
        let params = SvmParams { c, ..Default::default() };
        let m = svm_train(&x, &y, &params).unwrap();
        for mach in &m.machines {
            let sum: f64 = mach.dual_coef.iter().sum();
            prop_assert!(sum.abs() < 1e-9 * c.max(1.0));
            for a in &mach.dual_coef {
                prop_assert!(a.abs() <= c * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn folds_are_stratified(labels in prop::collection::vec(0i64..4, 10..80), k in 2usize..8, seed in any::<u64>()) {
        let folds = stratified_kfold(&labels, k, seed).unwrap();
        for c in 0..4 {
            let mut per = vec![0i64; k];
            for (f, l) in folds.iter().zip(&labels) {
                if *l == c {
                    per[*f] += 1;
                }
            }
            prop_assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1);
        }
        let mut sizes = vec![0i64; k];
        folds.iter().for_each(|&f| sizes[f] += 1);
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }
}

#[test]
fn held_out_predictions_come_from_training_folds_only() {
    let (x, y) = blobs(5, 10, 6, 1.5);
    let cfg = CvConfig {
        k: 5,
        seed: 42,
        ..Default::default()
    };
    let report = cross_validate(&x, &y, &cfg).unwrap();
    for f in 0..cfg.k {
        let train: Vec<usize> = (0..y.len()).filter(|&i| report.folds[i] != f).collect();
        let test: Vec<usize> = (0..y.len()).filter(|&i| report.folds[i] == f).collect();
        let ytr: Vec<i64> = train.iter().map(|&i| y[i]).collect();
        let model = Pipeline::fit(&x.select_rows(&train), &ytr, &cfg.pipeline).unwrap();
        let pred = model.predict(&x.select_rows(&test)).unwrap();
        let from_report: Vec<i64> = test.iter().map(|&i| report.predictions[i]).collect();
        assert_eq!(pred, from_report, "fold {f}");
    }
}

#[test]
fn shared_embedding_sees_held_out_samples() {
    // with the embedding fitted on everything the fold models differ from the
    // strict protocol; this is what makes that mode optimistic
    let (x, y) = blobs(8, 8, 9, 0.6);
    let strict = cross_validate(&x, &y, &CvConfig::default()).unwrap();
    let shared = cross_validate(
        &x,
        &y,
        &CvConfig {
            shared_embedding: true,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(strict.folds, shared.folds);
    assert_ne!(strict.predictions, shared.predictions);
}

#[test]
fn corrupting_held_out_labels_leaves_their_predictions_alone() {
    let (x, y) = blobs(13, 10, 6, 1.2);
    let cfg = CvConfig {
        k: 5,
        seed: 3,
        ..Default::default()
    };
    let folds = stratified_kfold(&y, cfg.k, cfg.seed).unwrap();
    let clean = cross_validate_with_folds(&x, &y, folds.clone(), &cfg).unwrap();
    for f in 0..cfg.k {
        // rotate the labels of fold f only; classes stay present in training
        let mut bad = y.clone();
        for i in 0..bad.len() {
            if folds[i] == f {
                bad[i] = (bad[i] + 1) % 3;
            }
        }
        let r = cross_validate_with_folds(&x, &bad, folds.clone(), &cfg).unwrap();
        for i in (0..y.len()).filter(|&i| folds[i] == f) {
            assert_eq!(r.predictions[i], clean.predictions[i], "fold {f}, sample {i}");
        }
    }
}

#[test]
fn fold_labels_out_of_range_are_rejected() {
    let (x, y) = blobs(1, 4, 3, 1.0);
    let cfg = CvConfig {
        k: 2,
        ..Default::default()
    };
    let folds: Vec<usize> = (0..y.len()).map(|i| i % 3).collect();
    assert!(cross_validate_with_folds(&x, &y, folds, &cfg).is_err());
}

fn components(labels: &[i64], nx: usize, ny: usize) -> Vec<(i64, usize)> {
    let mut seen = vec![false; labels.len()];
    let mut out = Vec::new();
    for start in 0..labels.len() {
        if seen[start] {
            continue;
        }
        let lab = labels[start];
        let mut stack = vec![start];
        seen[start] = true;
        let mut size = 0;
        while let Some(c) = stack.pop() {
            size += 1;
            let (ix, iy) = (c % nx, c / nx);
            let mut nbrs = Vec::with_capacity(4);
            if ix > 0 {
                nbrs.push(c - 1);
            }
            if ix + 1 < nx {
                nbrs.push(c + 1);
            }
            if iy > 0 {
                nbrs.push(c - nx);
            }
            if iy + 1 < ny {
                nbrs.push(c + nx);
            }
            for n in nbrs {
                if !seen[n] && labels[n] == lab {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        out.push((lab, size));
    }
    out
}

#[test]
fn two_separated_blobs_give_two_connected_regions() {
    let mut p = Prng::new(21);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for (c, cx) in [(0i64, -3.0), (1, 3.0)] {
        for _ in 0..25 {
            rows.push(vec![cx + 0.5 * p.gaussian(), 0.5 * p.gaussian()]);
            y.push(c);
        }
    }
    let x = Matrix::from_rows(&rows).unwrap();
    let model = svm_train(&x, &y, &SvmParams::default()).unwrap();
    let (nx, ny) = (80, 60);
    let grid = decision_grid(&model, &Bounds::of(&x).unwrap(), nx, ny).unwrap();
    let comps = components(&grid.labels, nx, ny);
    assert_eq!(comps.len(), 2, "{comps:?}");
    assert_ne!(comps[0].0, comps[1].0);

    // every cell agrees with a direct prediction at its coordinates
    for iy in (0..ny).step_by(7) {
        for ix in (0..nx).step_by(9) {
            let direct = model.predict_one(&[grid.xs[ix], grid.ys[iy]]).unwrap();
            assert_eq!(grid.at(ix, iy), direct);
        }
    }
}
