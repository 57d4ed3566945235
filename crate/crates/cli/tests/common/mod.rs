#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pgt_core::io::{write_boxes, write_lidar_bin, BinLayout};
use pgt_core::radiance::{CameraView, ShRecord, ShVoxelGrid, SH_C0};
use pgt_core::{Box3D, ClassLabel, PointCloud, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SENSOR_HEIGHT: f64 = 1.84;

pub struct SyntheticObject {
    pub class: ClassLabel,
    pub size: [f64; 3],
    pub color: [f64; 3],
    pub intensity: f64,
}

pub fn objects() -> Vec<SyntheticObject> {
    vec![
        SyntheticObject {
            class: ClassLabel::Car,
            size: [4.4, 1.8, 1.6],
            color: [0.8, 0.15, 0.1],
            intensity: 0.6,
        },
        SyntheticObject {
            class: ClassLabel::Pedestrian,
            size: [0.7, 0.7, 1.8],
            color: [0.2, 0.3, 0.8],
            intensity: 0.3,
        },
        SyntheticObject {
            class: ClassLabel::Bicycle,
            size: [1.8, 0.6, 1.2],
            color: [0.1, 0.7, 0.2],
            intensity: 0.45,
        },
    ]
}

pub fn pgt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pgt"))
        .args(args)
        .output()
        .expect("run pgt")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn assert_ok(o: &Output) {
    assert!(
        o.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        o.status.code(),
        stdout(o),
        String::from_utf8_lossy(&o.stderr)
    );
}

/// Solid block of voxels with DC color brightening toward the top.
pub fn object_grid(obj: &SyntheticObject, voxel: f64) -> ShVoxelGrid {
    let dims: Vec<u32> = obj
        .size
        .iter()
        .map(|s| (s / voxel).round() as u32 + 2)
        .collect();
    let dims = [dims[0], dims[1], dims[2]];
    let origin = Vec3::new(
        -(dims[0] as f64) * voxel / 2.0,
        -(dims[1] as f64) * voxel / 2.0,
        -(dims[2] as f64) * voxel / 2.0,
    );
    let mut records = Vec::new();
    for k in 1..dims[2] - 1 {
        for j in 1..dims[1] - 1 {
            for i in 1..dims[0] - 1 {
                let shade = 0.7 + 0.3 * k as f64 / dims[2] as f64;
                let coeffs = obj.color.iter().map(|c| c * shade / SH_C0).collect();
                records.push(ShRecord {
                    index: (k as u64 * dims[1] as u64 + j as u64) * dims[0] as u64 + i as u64,
                    density: 1.0,
                    coeffs,
                });
            }
        }
    }
    ShVoxelGrid::new(dims, origin, voxel, 0, records).unwrap()
}

pub fn object_views(distance: f64) -> Vec<CameraView> {
    (0..4)
        .map(|i| {
            let a = i as f64 * std::f64::consts::FRAC_PI_2 + 0.3;
            let eye = Vec3::new(distance * a.cos(), distance * a.sin(), 2.0);
            CameraView::look_at(eye, Vec3::zeros(), [30.0, 30.0, 12.0, 12.0], (24, 24)).unwrap()
        })
        .collect()
}

/// One labeled frame: a ground disk at −sensor height plus one object per
/// class with class-specific intensity.
pub fn synthetic_frame(index: usize, seed: u64) -> (PointCloud, Vec<Box3D>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index as u64);
    let f = index as f64;
    let placements = [(12.0 + 2.0 * f, 4.0), (8.0, -6.0 + f), (-10.0, 8.0 - f)];
    let boxes: Vec<Box3D> = objects()
        .iter()
        .zip(placements)
        .map(|(o, (x, y))| {
            let size = Vec3::from(o.size);
            Box3D::new(
                Vec3::new(x, y, -SENSOR_HEIGHT + size.z / 2.0),
                size,
                0.4 * f + 0.2,
                o.class,
            )
            .unwrap()
        })
        .collect();
    let mut pos = Vec::new();
    let mut inten = Vec::new();
    let step = 0.4;
    let n = (30.0 / step) as i32;
    for iy in -n..=n {
        for ix in -n..=n {
            let (x, y) = (ix as f64 * step, iy as f64 * step);
            if x.hypot(y) > 30.0 || x.hypot(y) < 2.0 {
                continue;
            }
            let p = Vec3::new(x, y, -SENSOR_HEIGHT + rng.random_range(-0.02..0.02));
            let flat = |b: &Box3D| {
                Box3D {
                    size: Vec3::new(b.size.x, b.size.y, 10.0),
                    ..b.clone()
                }
                .contains(&p, 0.0)
            };
            if boxes.iter().any(flat) {
                continue;
            }
            pos.push(p);
            inten.push(0.1 + rng.random_range(0.0..0.05));
        }
    }
    for (o, b) in objects().iter().zip(&boxes) {
        for _ in 0..400 {
            let local = Vec3::new(
                rng.random_range(-0.49..0.49) * b.size.x,
                rng.random_range(-0.49..0.49) * b.size.y,
                rng.random_range(-0.45..0.49) * b.size.z,
            );
            pos.push(b.to_parent(&local));
            let rel = local.z / b.size.z + 0.5;
            inten.push(o.intensity + 0.2 * rel + rng.random_range(-0.03..0.03));
        }
    }
    (PointCloud::new(pos).with_intensity(inten).unwrap(), boxes)
}

pub struct Dataset {
    pub root: PathBuf,
    pub grids: Vec<(ClassLabel, PathBuf)>,
    pub views: PathBuf,
    pub frames: PathBuf,
}

/// Grids, a shared view file and labeled frames under `root`.
pub fn write_dataset(root: &Path, frames: usize) -> Dataset {
    let grids_dir = root.join("grids");
    let mut grids = Vec::new();
    for o in objects() {
        let path = grids_dir.join(format!("{}.shvg", o.class));
        object_grid(&o, 0.1).write(&path).unwrap();
        grids.push((o.class, path));
    }
    let views = root.join("views.txt");
    let text: String = object_views(8.0)
        .iter()
        .map(|v| v.to_line() + "\n")
        .collect();
    std::fs::write(&views, text).unwrap();
    let frames_dir = root.join("frames");
    for i in 0..frames {
        let (cloud, boxes) = synthetic_frame(i, 7);
        write_lidar_bin(
            &cloud,
            BinLayout::Xyzi,
            &frames_dir.join(format!("{i:06}.bin")),
        )
        .unwrap();
        write_boxes(&boxes, &frames_dir.join(format!("{i:06}.boxes"))).unwrap();
    }
    Dataset {
        root: root.to_path_buf(),
        grids,
        views,
        frames: frames_dir,
    }
}

/// Runs extract for every grid and writes the source list for build-bank.
pub fn extract_sources(ds: &Dataset) -> PathBuf {
    let mut list = String::new();
    for (class, grid) in &ds.grids {
        let out = ds.root.join("objects").join(format!("{class}.ply"));
        let o = pgt(&[
            "extract",
            "--grid",
            grid.to_str().unwrap(),
            "--views",
            ds.views.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_ok(&o);
        list.push_str(&format!("{class} {class}0 1 objects/{class}.ply\n"));
    }
    let path = ds.root.join("sources.txt");
    std::fs::write(&path, list).unwrap();
    path
}

/// `(class, frechet, group_intensity)` rows of an eval report.
pub fn metric_rows(report: &str) -> Vec<(String, String, String)> {
    report
        .lines()
        .skip_while(|l| !l.starts_with("class frechet"))
        .skip(1)
        .take_while(|l| !l.starts_with("mean_group_intensity"))
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            (f[0].to_string(), f[1].to_string(), f[2].to_string())
        })
        .collect()
}
