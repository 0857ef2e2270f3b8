#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use textkernel_core::eval::Detection;
use textkernel_core::geometry::Polygon;
use textkernel_core::io::{write_ndjson, write_pmap};
use textkernel_core::labelgen::Annotation;
use textkernel_core::loss::{MapKind, ProbMap};
use textkernel_core::raster::Grid;

pub fn textkernel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_textkernel"))
        .args(args)
        .env_remove("TEXTKERNEL_THREADS")
        .output()
        .expect("spawn textkernel")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon {
    Polygon::rect(x0, y0, x1, y1).unwrap()
}

pub fn write_plane(dir: &Path, name: &str, plane: &Grid<f64>) {
    let map = ProbMap::new(
        plane.width(),
        plane.height(),
        1,
        MapKind::Probabilities,
        plane.as_slice().to_vec(),
    )
    .unwrap();
    let mut buf = Vec::new();
    write_pmap(&mut buf, &map).unwrap();
    std::fs::write(dir.join(format!("{name}.pmap")), buf).unwrap();
}

pub fn write_items<T: serde::Serialize>(dir: &Path, name: &str, items: &[T]) {
    let mut buf = Vec::new();
    write_ndjson(&mut buf, items).unwrap();
    std::fs::write(dir.join(format!("{name}.ndjson")), buf).unwrap();
}

/// Two 10x10 blocks at probability 0.9 on a 40x24 zero map.
pub fn two_block_plane() -> Grid<f64> {
    Grid::from_fn(40, 24, |r, c| {
        let block = (2..12).contains(&r) && ((2..12).contains(&c) || (20..30).contains(&c));
        if block {
            0.9
        } else {
            0.0
        }
    })
}

pub fn det(poly: Polygon, score: f64) -> Detection {
    Detection {
        polygon: poly,
        score,
    }
}

/// Three images hand-counted to tp 4, fp 2, fn 1.
pub fn mixed_fixture() -> Vec<(&'static str, Vec<Detection>, Vec<Annotation>)> {
    vec![
        (
            "img1",
            vec![det(rect(0.0, 0.0, 20.0, 10.0), 0.9), det(rect(30.0, 0.0, 50.0, 10.0), 0.8)],
            vec![Annotation::new(rect(0.0, 0.0, 20.0, 10.0)), Annotation::new(rect(30.0, 0.0, 50.0, 10.0))],
        ),
        (
            "img2",
            vec![
                det(rect(0.0, 0.0, 20.0, 10.0), 0.95),
                det(rect(0.0, 1.0, 20.0, 10.0), 0.7),
                det(rect(62.0, 2.0, 72.0, 8.0), 0.9),
            ],
            vec![
                Annotation::new(rect(0.0, 0.0, 20.0, 10.0)),
                Annotation::new(rect(0.0, 30.0, 20.0, 40.0)),
                Annotation::ignored(rect(60.0, 0.0, 80.0, 10.0)),
            ],
        ),
        (
            "img3",
            vec![det(rect(0.0, 0.0, 20.0, 8.0), 0.6), det(rect(40.0, 40.0, 50.0, 50.0), 0.99)],
            vec![Annotation::new(rect(0.0, 0.0, 20.0, 10.0))],
        ),
    ]
}

pub fn write_mixed_fixture(dets: &Path, gts: &Path) {
    std::fs::create_dir_all(dets).unwrap();
    std::fs::create_dir_all(gts).unwrap();
    for (name, d, g) in mixed_fixture() {
        write_items(dets, name, &d);
        write_items(gts, name, &g);
    }
}
