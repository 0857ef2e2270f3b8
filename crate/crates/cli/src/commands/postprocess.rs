use std::path::Path;

use rayon::prelude::*;
use textkernel_core::eval::Detection;
use textkernel_core::io::write_ndjson;
use textkernel_core::postprocess::{detect, DetectConfig};

use super::{collect_ordered, load_pmap};
use crate::error::{CliError, CliResult};
use crate::fsutil::{ensure_dir, require_files, stem, write_atomic};
use crate::PostprocessArgs;

pub fn detections(path: &Path, cfg: &DetectConfig) -> CliResult<(Vec<Detection>, usize)> {
    let map = load_pmap(path)?;
    let res = detect(&map, cfg).map_err(|e| CliError::data(path, e))?;
    let dets = res
        .polygons
        .into_iter()
        .zip(res.scores)
        .map(|(polygon, score)| Detection { polygon, score })
        .collect();
    Ok((dets, res.component_count))
}

pub fn run(args: &PostprocessArgs, pool: &rayon::ThreadPool) -> CliResult<()> {
    let cfg = args.detect.config();
    let files = require_files(&args.probmaps, "pmap")?;
    ensure_dir(&args.out)?;
    let results = pool.install(|| {
        files
            .par_iter()
            .map(|f| {
                let (dets, components) = detections(f, &cfg)?;
                let mut buf = Vec::new();
                write_ndjson(&mut buf, &dets)?;
                write_atomic(&args.out.join(format!("{}.ndjson", stem(f))), &buf)?;
                Ok((components, dets.len()))
            })
            .collect()
    });
    let counts = collect_ordered(results)?;
    let components: usize = counts.iter().map(|c| c.0).sum();
    let kept: usize = counts.iter().map(|c| c.1).sum();
    println!("postprocess: {} images, {components} components, {kept} kept", files.len());
    Ok(())
}
