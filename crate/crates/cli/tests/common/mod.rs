#![allow(dead_code)]

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use mwxray::Point;

pub type Row = HashMap<String, String>;

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str]) -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_mwxray"))
        .args(args)
        .output()
        .expect("failed to start mwxray");
    Outcome {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn scene_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/scenes")
        .join(format!("{name}.toml"))
}

pub fn read_csv(path: &Path) -> Vec<Row> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            header
                .iter()
                .cloned()
                .zip(r.iter().map(String::from))
                .collect()
        })
        .collect()
}

/// Length of `p + t d`, `0 <= t <= len`, inside a counter-clockwise
/// triangle (Liang–Barsky against the three edge half-planes).
pub fn segment_triangle_length(p: Point, d: Point, len: f64, tri: [Point; 3]) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, len);
    for i in 0..3 {
        let a = tri[i];
        let b = tri[(i + 1) % 3];
        let inward = Point::new(-(b - a)[1], (b - a)[0]);
        let num = inward.dot(&(p - a));
        let den = inward.dot(&d);
        if den.abs() < 1e-300 {
            if num < 0.0 {
                return 0.0;
            }
            continue;
        }
        let t = -num / den;
        if den > 0.0 {
            lo = lo.max(t);
        } else {
            hi = hi.min(t);
        }
    }
    (hi - lo).max(0.0)
}
