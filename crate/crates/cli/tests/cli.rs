mod common;

use common::*;
use pgt_core::io::{read_boxes, read_lidar_bin, read_ply_rgb, BinLayout};

#[test]
fn missing_grid_exits_2_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.shvg");
    let views = dir.path().join("v.txt");
    std::fs::write(&views, "").unwrap();
    let o = pgt(&[
        "extract",
        "--grid",
        missing.to_str().unwrap(),
        "--views",
        views.to_str().unwrap(),
        "--out",
        dir.path().join("o.ply").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope.shvg"));
}

#[test]
fn malformed_grid_exits_2_and_bad_values_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let ds = write_dataset(dir.path(), 0);
    let bad = dir.path().join("bad.shvg");
    std::fs::write(&bad, b"NOPE").unwrap();
    let out = dir.path().join("o.ply");
    let run = |grid: &str, step: &str| {
        pgt(&[
            "extract",
            "--grid",
            grid,
            "--views",
            ds.views.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--step",
            step,
        ])
    };
    assert_eq!(run(bad.to_str().unwrap(), "0.05").status.code(), Some(2));
    assert_eq!(
        run(ds.grids[0].1.to_str().unwrap(), "-1").status.code(),
        Some(3)
    );
    assert!(!out.exists());
}

#[test]
fn extract_writes_colored_ply_and_honors_step() {
    let dir = tempfile::tempdir().unwrap();
    let ds = write_dataset(dir.path(), 0);
    let grid = ds.grids[1].1.to_str().unwrap();
    let mut counts = Vec::new();
    for (name, step) in [
        ("a.ply", None),
        ("b.ply", Some("0.05")),
        ("c.ply", Some("5")),
    ] {
        let out = dir.path().join(name);
        let mut args = vec![
            "extract",
            "--grid",
            grid,
            "--views",
            ds.views.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ];
        if let Some(s) = step {
            args.extend(["--step", s]);
        }
        assert_ok(&pgt(&args));
        let cloud = read_ply_rgb(&out).unwrap();
        assert!(cloud
            .rgb()
            .unwrap()
            .iter()
            .flatten()
            .all(|c| (0.0..=1.0).contains(c)));
        counts.push(cloud.len());
    }
    // the default step is half a voxel (0.05 m here)
    assert_eq!(counts[0], counts[1]);
    assert!(counts[2] < counts[1]);
}

#[test]
fn config_file_values_apply_below_flags() {
    let dir = tempfile::tempdir().unwrap();
    let ds = write_dataset(dir.path(), 0);
    let cfg = dir.path().join("pgt.toml");
    std::fs::write(&cfg, "[extract]\nstep = 5.0\n").unwrap();
    let grid = ds.grids[1].1.to_str().unwrap();
    let count = |extra: &[&str]| {
        let out = dir.path().join("o.ply");
        let mut args = vec!["--config", cfg.to_str().unwrap(), "extract", "--grid", grid];
        args.extend([
            "--views",
            ds.views.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        args.extend(extra);
        assert_ok(&pgt(&args));
        read_ply_rgb(&out).unwrap().len()
    };
    assert!(count(&[]) < count(&["--step", "0.05"]));
    std::fs::write(&cfg, "[extract]\nstepp = 5.0\n").unwrap();
    let o = pgt(&[
        "--config",
        cfg.to_str().unwrap(),
        "eval",
        "--a",
        "x",
        "--b",
        "y",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bank_augment_eval_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let ds = write_dataset(dir.path(), 2);
    let sources = extract_sources(&ds);
    let bank = |out: &str| {
        pgt(&[
            "build-bank",
            "--sources",
            sources.to_str().unwrap(),
            "--real",
            ds.frames.to_str().unwrap(),
            "--out",
            dir.path().join(out).to_str().unwrap(),
            "--headings",
            "-90,0,90",
            "--ranges",
            "6,10,14",
            "--seed",
            "5",
        ])
    };
    let o = bank("bank");
    assert_ok(&o);
    assert!(stdout(&o).contains("headings 3"), "{}", stdout(&o));
    assert_ok(&bank("bank2"));
    let manifest = |d: &str| std::fs::read(dir.path().join(d).join("manifest")).unwrap();
    assert_eq!(manifest("bank"), manifest("bank2"));

    let aug = dir.path().join("aug");
    let o = pgt(&[
        "--jobs",
        "2",
        "augment",
        "--frames",
        ds.frames.to_str().unwrap(),
        "--bank",
        dir.path().join("bank").to_str().unwrap(),
        "--out",
        aug.to_str().unwrap(),
        "--per-frame",
        "4",
        "--seed",
        "3",
    ]);
    assert_ok(&o);
    let report = std::fs::read_to_string(aug.join("augment_report")).unwrap();
    assert!(report.contains("map ground-only"));
    assert!(report.contains("gt_probability 0.5"));
    for name in ["000000", "000001"] {
        assert!(aug.join(format!("{name}.report")).exists());
        let boxes = read_boxes(&aug.join(format!("{name}.boxes"))).unwrap();
        assert!(boxes.len() >= 3);
        let cloud = read_lidar_bin(&aug.join(format!("{name}.bin")), BinLayout::Xyzi).unwrap();
        assert!(!cloud.is_empty());
    }

    let evald = |a: &std::path::Path, b: &std::path::Path| {
        let o = pgt(&[
            "eval",
            "--a",
            a.to_str().unwrap(),
            "--b",
            b.to_str().unwrap(),
        ]);
        assert_ok(&o);
        stdout(&o)
    };
    let same = evald(&dir.path().join("bank"), &dir.path().join("bank"));
    let rows = metric_rows(&same);
    assert!(!rows.is_empty());
    for (class, fd, _) in &rows {
        assert_eq!(fd, "0.000000", "{class}");
    }
    assert!(same.contains("mean_group_intensity 0.000000"), "{same}");
    let mixed = evald(&dir.path().join("bank"), &ds.frames);
    assert!(mixed.contains("balance b"));
}

#[test]
fn eval_reports_missing_class_as_na() {
    let dir = tempfile::tempdir().unwrap();
    let ds = write_dataset(dir.path(), 1);
    let other = dir.path().join("other");
    std::fs::create_dir_all(&other).unwrap();
    let boxes = read_boxes(&ds.frames.join("000000.boxes")).unwrap();
    std::fs::copy(ds.frames.join("000000.bin"), other.join("000000.bin")).unwrap();
    pgt_core::io::write_boxes(&boxes[..2], &other.join("000000.boxes")).unwrap();
    let o = pgt(&[
        "eval",
        "--a",
        ds.frames.to_str().unwrap(),
        "--b",
        other.to_str().unwrap(),
    ]);
    assert_ok(&o);
    let out = stdout(&o);
    assert!(out.contains("bicycle n/a n/a"), "{out}");
    assert!(out.contains("car 0.000000 0.000000"), "{out}");
    assert!(out.contains("bicycle -1"), "{out}");
}
