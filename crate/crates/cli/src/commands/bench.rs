use std::time::Instant;

use serde::Serialize;
use textkernel_core::eval::timing_from_ms;
use textkernel_core::postprocess::detect;

use super::load_pmap;
use crate::error::{CliError, CliResult};
use crate::fsutil::{require_files, write_atomic};
use crate::BenchArgs;

#[derive(Debug, Serialize)]
struct BenchReport {
    images: usize,
    repeat: usize,
    warmup: usize,
    mean_ms: f64,
    median_ms: f64,
    fps: f64,
    mean_components: f64,
    mean_kept: f64,
}

/// Runs on the calling thread only.
pub fn run(args: &BenchArgs) -> CliResult<()> {
    if args.repeat == 0 {
        return Err(CliError::Usage("--repeat must be at least 1".into()));
    }
    let cfg = args.detect.config();
    let files = require_files(&args.probmaps, "pmap")?;
    let maps = files.iter().map(|f| load_pmap(f)).collect::<CliResult<Vec<_>>>()?;

    for _ in 0..args.warmup {
        for m in &maps {
            detect(m, &cfg)?;
        }
    }
    let mut ms = Vec::with_capacity(maps.len() * args.repeat);
    let mut first: Option<Vec<(usize, usize)>> = None;
    for _ in 0..args.repeat {
        let mut counts = Vec::with_capacity(maps.len());
        for m in &maps {
            let t0 = Instant::now();
            let res = detect(m, &cfg)?;
            ms.push(t0.elapsed().as_secs_f64() * 1e3);
            counts.push((res.component_count, res.kept_count));
        }
        match &first {
            None => first = Some(counts),
            Some(f) if *f != counts => return Err(CliError::Failed("box counts differ between repeats".into())),
            Some(_) => {}
        }
    }
    let counts = first.unwrap_or_default();
    let n = maps.len() as f64;
    let t = timing_from_ms(&ms).unwrap_or_default();
    let report = BenchReport {
        images: maps.len(),
        repeat: args.repeat,
        warmup: args.warmup,
        mean_ms: t.mean_ms,
        median_ms: t.median_ms,
        fps: t.fps,
        mean_components: counts.iter().map(|c| c.0).sum::<usize>() as f64 / n,
        mean_kept: counts.iter().map(|c| c.1).sum::<usize>() as f64 / n,
    };
    println!(
        "bench: {} images x {} repeats: mean {:.3} ms, median {:.3} ms, {:.1} fps, {:.2} components/image, {:.2} kept/image",
        report.images, report.repeat, report.mean_ms, report.median_ms, report.fps, report.mean_components, report.mean_kept
    );
    if let Some(path) = &args.report {
        let mut json = serde_json::to_vec_pretty(&report).map_err(|e| CliError::Failed(e.to_string()))?;
        json.push(b'\n');
        write_atomic(path, &json)?;
    }
    Ok(())
}
