use std::path::Path;
use std::process::{Command, Output};

fn vocalfeat(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vocalfeat"));
    cmd.args(args).env_remove("VOCALFEAT_OUT");
    if let Some(dir) = env_out {
        cmd.env("VOCALFEAT_OUT", dir);
    }
    cmd.output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth_into(dir: &Path) {
    let out = vocalfeat(&["--out", s(dir), "--seed", "3", "synth"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn empty_manifest_gives_header_only_table() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.csv");
    std::fs::write(&manifest, "id,signal_path,pressure_pa,gc_type,symmetry\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = vocalfeat(&["--manifest", s(&manifest), "--out", s(&out_dir), "extract"], None);
    assert_eq!(out.status.code(), Some(0));
    let table = std::fs::read_to_string(out_dir.join("features.csv")).unwrap();
    assert_eq!(table.lines().count(), 1);
    assert!(table.starts_with("id,pressure_pa,gc_type,symmetry,spl_5k,"));
}

#[test]
fn unreadable_signal_is_a_partial_failure() {
    let dir = tempfile::tempdir().unwrap();
    synth_into(dir.path());
    let victim = dir.path().join("signals/p0775_gc2_sym1.f64");
    std::fs::write(&victim, b"abc").unwrap();
    let out_dir = dir.path().join("out");
    let manifest = dir.path().join("manifest.csv");
    let out = vocalfeat(
        &["--manifest", s(&manifest), "--out", s(&out_dir), "--jobs", "2", "extract"],
        None,
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p0775_gc2_sym1"));
    let table = std::fs::read_to_string(out_dir.join("features.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 23);
    assert!(!table.contains("p0775_gc2_sym1"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.csv");
    std::fs::write(&manifest, "id,signal_path,pressure_pa\n").unwrap();
    let out = vocalfeat(&["--manifest", s(&manifest), "--out", s(dir.path()), "extract"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gc_type"));

    let out = vocalfeat(&["--out", s(dir.path()), "extract"], None);
    assert_eq!(out.status.code(), Some(2));

    let out = vocalfeat(&["--out", s(dir.path()), "classify", "--target", "colour"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degenerate_scatter_is_a_solver_failure() {
    let dir = tempfile::tempdir().unwrap();
    let mut table = String::from(
        "id,pressure_pa,gc_type,symmetry,spl_5k,hnr_5k,hnr_2k,cpp_5k,cpp_2k,slope_5k,slope_2k,hbi_5k,alpha_5k\n",
    );
    for (i, p) in [385, 775, 1500].iter().cycle().take(12).enumerate() {
        let v = f64::from(*p) / 100.0;
        table.push_str(&format!("c{i},{p},1,0,{v},{v},{v},{v},{v},{v},{v},{v},{v}\n"));
    }
    std::fs::write(dir.path().join("features.csv"), table).unwrap();
    let out = vocalfeat(
        &["--out", s(dir.path()), "--folds", "2", "classify", "--target", "pressure"],
        None,
    );
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn output_directory_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let env_dir = dir.path().join("from-env");
    let file_dir = dir.path().join("from-file");
    let flag_dir = dir.path().join("from-flag");

    let out = vocalfeat(&["synth"], Some(&env_dir));
    assert!(out.status.success());
    assert!(env_dir.join("manifest.csv").exists());

    let config = dir.path().join("vf.toml");
    std::fs::write(&config, format!("out = {:?}\nseed = 4\n", s(&file_dir))).unwrap();
    let out = vocalfeat(&["--config", s(&config), "synth"], Some(&env_dir));
    assert!(out.status.success());
    assert!(file_dir.join("manifest.csv").exists());

    let out = vocalfeat(&["--config", s(&config), "--out", s(&flag_dir), "synth"], Some(&env_dir));
    assert!(out.status.success());
    assert!(flag_dir.join("manifest.csv").exists());
}

#[test]
fn classify_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    synth_into(dir.path());
    let manifest = dir.path().join("manifest.csv");
    let out_dir = dir.path().join("out");
    let o = s(&out_dir);
    assert!(vocalfeat(&["--manifest", s(&manifest), "--out", o, "extract"], None).status.success());
    let out = vocalfeat(
        &[
            "--out", o, "classify", "--target", "gc", "--grid-resolution", "20", "--sweep",
            "--sweep-c", "1,10", "--sweep-gamma", "0.1",
        ],
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in [
        "cv_report_gc.json",
        "model_gc.json",
        "lda_weights_gc.csv",
        "grid_gc.csv",
        "lda_svm_gc.svg",
        "sweep_gc.csv",
    ] {
        assert!(out_dir.join(name).exists(), "{name}");
    }
    let grid = std::fs::read_to_string(out_dir.join("grid_gc.csv")).unwrap();
    assert_eq!(grid.lines().count(), 1 + 20 * 20);
    let sweep = std::fs::read_to_string(out_dir.join("sweep_gc.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 1 + 2);
    let weights = std::fs::read_to_string(out_dir.join("lda_weights_gc.csv")).unwrap();
    assert_eq!(weights.lines().next(), Some("feature,ld1,ld2"));
    let svg = std::fs::read_to_string(out_dir.join("lda_svm_gc.svg")).unwrap();
    assert!(svg.contains("<!-- vocalfeat "));
    assert!(!grid.contains('\r'));

    assert!(vocalfeat(&["--out", o, "boxplot", "--group-by", "symmetry", "--panels", "cpp_2k"], None)
        .status
        .success());
    let stats = std::fs::read_to_string(out_dir.join("boxplot_symmetry.csv")).unwrap();
    assert_eq!(stats.lines().count(), 1 + 9 * 2);
    assert!(out_dir.join("boxplot_symmetry_cpp_2k.svg").exists());
    assert!(!out_dir.join("boxplot_symmetry_spl_5k.svg").exists());
}
