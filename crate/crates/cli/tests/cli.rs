mod common;

use common::*;
use tempfile::tempdir;
use textkernel_core::io::{parse_pgm, read_ndjson};
use textkernel_core::eval::Detection;
use textkernel_core::labelgen::Annotation;
use textkernel_core::raster::Grid;

#[test]
fn labelgen_single_square() {
    let dir = tempdir().unwrap();
    let (annots, out) = (dir.path().join("a"), dir.path().join("o"));
    std::fs::create_dir(&annots).unwrap();
    write_items(&annots, "sq", &[Annotation::new(rect(0.0, 0.0, 10.0, 10.0))]);
    let o = textkernel(&["labelgen", "--annots", p(&annots), "--out", p(&out), "--width", "12", "--height", "12"]);
    assert_eq!(code(&o), 0, "{o:?}");
    let classes = parse_pgm(&std::fs::read(out.join("sq.classes.pgm")).unwrap()).unwrap();
    let count = |v: u8| classes.as_slice().iter().filter(|&&x| x == v).count();
    assert_eq!((count(1), count(2), count(0)), (36, 64, 44));
    let text = parse_pgm(&std::fs::read(out.join("sq.text.pgm")).unwrap()).unwrap();
    assert_eq!(text.as_slice().iter().filter(|&&x| x == 255).count(), 100);
    assert!(stdout(&o).contains("1 images, 1 instances, 0 fallbacks"));
}

#[test]
fn labelgen_unit_ratio_and_manifest() {
    let dir = tempdir().unwrap();
    let (annots, out) = (dir.path().join("a"), dir.path().join("o"));
    std::fs::create_dir(&annots).unwrap();
    write_items(&annots, "quad", &[Annotation::new(textkernel_core::geometry::Polygon::from_coords(&[(2.0, 1.0), (17.0, 3.0), (15.0, 9.0), (1.0, 8.0)]).unwrap())]);
    let manifest = dir.path().join("sizes.ndjson");
    std::fs::write(&manifest, "{\"image\":\"quad\",\"width\":20,\"height\":12}\n").unwrap();
    let o = textkernel(&[
        "labelgen", "--annots", p(&annots), "--out", p(&out), "--size-from-manifest", p(&manifest), "--shrink-ratio", "1.0",
    ]);
    assert_eq!(code(&o), 0, "{o:?}");
    let classes = parse_pgm(&std::fs::read(out.join("quad.classes.pgm")).unwrap()).unwrap();
    let text = parse_pgm(&std::fs::read(out.join("quad.text.pgm")).unwrap()).unwrap();
    assert_eq!((classes.width(), classes.height()), (20, 12));
    assert_eq!(classes.map(|&v| v == 1), text.map(|&v| v == 255));

    std::fs::write(&manifest, "{\"image\":\"other\",\"width\":20,\"height\":12}\n").unwrap();
    let o = textkernel(&["labelgen", "--annots", p(&annots), "--out", p(&out), "--size-from-manifest", p(&manifest)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn labelgen_input_errors() {
    let dir = tempdir().unwrap();
    let o = textkernel(&["labelgen", "--annots", p(dir.path()), "--out", p(&dir.path().join("o")), "--width", "8", "--height", "8"]);
    assert_eq!(code(&o), 2);
    std::fs::write(dir.path().join("bad.ndjson"), "{\"polygon\": [[0,0],[1,0]]}\n").unwrap();
    let o = textkernel(&["labelgen", "--annots", p(dir.path()), "--out", p(&dir.path().join("o")), "--width", "8", "--height", "8"]);
    assert_eq!(code(&o), 3, "{o:?}");
    let o = textkernel(&["labelgen", "--annots", p(dir.path()), "--out", p(&dir.path().join("o"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn postprocess_fixtures() {
    let dir = tempdir().unwrap();
    let (maps, out) = (dir.path().join("m"), dir.path().join("o"));
    std::fs::create_dir(&maps).unwrap();
    write_plane(&maps, "blocks", &two_block_plane());
    write_plane(&maps, "zero", &Grid::filled(16, 16, 0.0));
    let o = textkernel(&["postprocess", "--probmaps", p(&maps), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert!(stdout(&o).contains("2 images, 2 components, 2 kept"), "{}", stdout(&o));
    let dets: Vec<Detection> = read_ndjson(&std::fs::read(out.join("blocks.ndjson")).unwrap()[..]).unwrap();
    assert_eq!(dets.len(), 2);
    assert!(dets.iter().all(|d| (d.score - 0.9).abs() < 1e-7));
    assert!(std::fs::read(out.join("zero.ndjson")).unwrap().is_empty());

    let o = textkernel(&["postprocess", "--probmaps", p(&maps), "--out", p(&out), "--mode", "rect", "--bin-thr", "0.95"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0 components, 0 kept"));
}

#[test]
fn postprocess_format_errors() {
    let dir = tempdir().unwrap();
    let mut bytes = Vec::new();
    textkernel_core::io::write_pmap(
        &mut bytes,
        &textkernel_core::loss::ProbMap::new(2, 2, 1, textkernel_core::loss::MapKind::Probabilities, vec![0.0; 4]).unwrap(),
    )
    .unwrap();
    bytes[..4].copy_from_slice(b"PMAQ");
    std::fs::write(dir.path().join("x.pmap"), &bytes).unwrap();
    let o = textkernel(&["postprocess", "--probmaps", p(dir.path()), "--out", p(&dir.path().join("o"))]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("offset 0"));
}

#[test]
fn eval_fixtures() {
    let dir = tempdir().unwrap();
    let (dets, gts, report) = (dir.path().join("d"), dir.path().join("g"), dir.path().join("r.json"));
    write_mixed_fixture(&dets, &gts);
    let o = textkernel(&["eval", "--dets", p(&dets), "--gts", p(&gts), "--report", p(&report)]);
    assert_eq!(code(&o), 0, "{o:?}");
    let s = stdout(&o);
    assert!(s.contains("tp 4 fp 2 fn 1"), "{s}");
    assert!(s.contains("precision 0.6667 recall 0.8000 fmeasure 0.7273"), "{s}");
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(json["images"][1]["fp"], 1);
    assert_eq!(json["images"][1]["image"], "img2");

    // Perfect detections.
    let perfect = dir.path().join("perfect");
    std::fs::create_dir(&perfect).unwrap();
    for (name, _, g) in mixed_fixture() {
        let d: Vec<Detection> = g.iter().filter(|a| !a.ignore).map(|a| det(a.polygon.clone(), 0.9)).collect();
        write_items(&perfect, name, &d);
    }
    let o = textkernel(&["eval", "--dets", p(&perfect), "--gts", p(&gts), "--report", p(&report)]);
    assert!(stdout(&o).contains("precision 1.0000 recall 1.0000 fmeasure 1.0000"));

    // Half the ground truth missing from the detections.
    let half = dir.path().join("half");
    std::fs::create_dir(&half).unwrap();
    let gts4: Vec<Annotation> = (0..4).map(|k| Annotation::new(rect(30.0 * k as f64, 0.0, 30.0 * k as f64 + 20.0, 10.0))).collect();
    let g2 = dir.path().join("g2");
    std::fs::create_dir(&g2).unwrap();
    write_items(&g2, "a", &gts4);
    write_items(&half, "a", &gts4[..2].iter().map(|a| det(a.polygon.clone(), 0.5)).collect::<Vec<_>>());
    let o = textkernel(&["eval", "--dets", p(&half), "--gts", p(&g2), "--report", p(&report)]);
    assert!(stdout(&o).contains("recall 0.5000"));
}

#[test]
fn eval_errors() {
    let dir = tempdir().unwrap();
    let (dets, gts, report) = (dir.path().join("d"), dir.path().join("g"), dir.path().join("r.json"));
    write_mixed_fixture(&dets, &gts);
    std::fs::write(dets.join("img1.ndjson"), "{not json}\n").unwrap();
    let o = textkernel(&["eval", "--dets", p(&dets), "--gts", p(&gts), "--report", p(&report)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    write_items::<Detection>(&dets, "img1", &[]);
    write_items::<Detection>(&dets, "stray", &[]);
    let o = textkernel(&["eval", "--dets", p(&dets), "--gts", p(&gts), "--report", p(&report)]);
    assert_eq!(code(&o), 2);
    let o = textkernel(&["eval", "--dets", p(&dets), "--gts", p(&dir.path().join("missing"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn bench_reports() {
    let dir = tempdir().unwrap();
    let maps = dir.path().join("m");
    std::fs::create_dir(&maps).unwrap();
    for k in 0..3 {
        write_plane(&maps, &format!("b{k}"), &two_block_plane());
    }
    let o = textkernel(&["bench", "--probmaps", p(&maps), "--repeat", "0"]);
    assert_eq!(code(&o), 2);
    let mut reports = Vec::new();
    for run in 0..2 {
        let report = dir.path().join(format!("bench{run}.json"));
        let o = textkernel(&["bench", "--probmaps", p(&maps), "--repeat", "4", "--warmup", "1", "--report", p(&report)]);
        assert_eq!(code(&o), 0, "{o:?}");
        let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
        reports.push(json);
    }
    for r in &reports {
        assert_eq!(r["images"], 3);
        assert_eq!(r["mean_components"], 2.0);
        assert_eq!(r["mean_kept"], 2.0);
        let fps = r["fps"].as_f64().unwrap();
        let mean = r["mean_ms"].as_f64().unwrap();
        assert!((fps - 1e3 / mean).abs() / fps < 1e-9);
    }
}

#[test]
fn losscheck_outcomes() {
    let o = textkernel(&["losscheck"]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 14);
    let o = textkernel(&["losscheck", "--size", "1x1", "--seed", "9"]);
    assert_eq!(code(&o), 0, "{o:?}");
    let o = textkernel(&["losscheck", "--corrupt-gradient"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL"));
    let o = textkernel(&["losscheck", "--size", "0x3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn config_file_and_threads() {
    let dir = tempdir().unwrap();
    let maps = dir.path().join("m");
    std::fs::create_dir(&maps).unwrap();
    write_plane(&maps, "blocks", &two_block_plane());
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# strict\nbin_thr = 0.95\nthreads = 2\n").unwrap();
    let out = dir.path().join("o");
    let o = textkernel(&["postprocess", "--config", p(&cfg), "--probmaps", p(&maps), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert!(stdout(&o).contains("0 kept"));
    let o = textkernel(&["postprocess", "--config", p(&cfg), "--probmaps", p(&maps), "--out", p(&out), "--bin-thr", "0.5"]);
    assert!(stdout(&o).contains("2 kept"));
    std::fs::write(&cfg, "no_such_flag = 1\n").unwrap();
    let o = textkernel(&["postprocess", "--config", p(&cfg), "--probmaps", p(&maps), "--out", p(&out)]);
    assert_eq!(code(&o), 2);

    let bin = env!("CARGO_BIN_EXE_textkernel");
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("t{threads}"));
        let o = std::process::Command::new(bin)
            .args(["postprocess", "--probmaps", p(&maps), "--out", p(&out)])
            .env("TEXTKERNEL_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        outputs.push(std::fs::read(out.join("blocks.ndjson")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let o = std::process::Command::new(bin)
        .args(["postprocess", "--probmaps", p(&maps), "--out", p(&out)])
        .env("TEXTKERNEL_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
