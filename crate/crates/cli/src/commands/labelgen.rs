use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;
use textkernel_core::io::write_pgm;
use textkernel_core::labelgen::{
    class_mask_from_kernels, generate_ignore_mask, generate_text_mask, instance_kernels, Annotation,
};
use textkernel_core::raster::{BinaryMask, Grid};

use super::{collect_ordered, load_ndjson};
use crate::error::{CliError, CliResult};
use crate::fsutil::{ensure_dir, require_files, stem, write_atomic};
use crate::LabelgenArgs;

#[derive(Debug, Deserialize)]
struct ManifestEntry {
    image: String,
    width: usize,
    height: usize,
}

struct Outcome {
    kernels: usize,
    fallbacks: Vec<usize>,
}

fn pgm_bytes(g: &Grid<u8>) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_pgm(&mut buf, g)?;
    Ok(buf)
}

fn binary_pgm(m: &BinaryMask) -> CliResult<Vec<u8>> {
    pgm_bytes(&m.map(|&v| if v { 255 } else { 0 }))
}

fn process(path: &Path, size: (usize, usize), ratio: f64, out: &Path) -> CliResult<Outcome> {
    let annots: Vec<Annotation> = load_ndjson(path)?;
    let (w, h) = size;
    let kernels = instance_kernels(&annots, ratio).map_err(|e| CliError::data(path, e))?;
    let classes = class_mask_from_kernels(&annots, &kernels, w, h);
    let name = stem(path);
    write_atomic(&out.join(format!("{name}.classes.pgm")), &pgm_bytes(classes.grid())?)?;
    write_atomic(&out.join(format!("{name}.text.pgm")), &binary_pgm(&generate_text_mask(&annots, w, h))?)?;
    write_atomic(&out.join(format!("{name}.ignore.pgm")), &binary_pgm(&generate_ignore_mask(&annots, w, h))?)?;
    Ok(Outcome {
        kernels: kernels.len(),
        fallbacks: kernels.iter().filter(|k| k.fallback).map(|k| k.index).collect(),
    })
}

fn image_sizes(args: &LabelgenArgs, files: &[PathBuf]) -> CliResult<Vec<(usize, usize)>> {
    if let (Some(w), Some(h)) = (args.width, args.height) {
        if w == 0 || h == 0 {
            return Err(CliError::Usage("width and height must be positive".into()));
        }
        return Ok(vec![(w, h); files.len()]);
    }
    let manifest = args
        .size_from_manifest
        .as_deref()
        .ok_or_else(|| CliError::Usage("give --width/--height or --size-from-manifest".into()))?;
    let entries: Vec<ManifestEntry> = load_ndjson(manifest)?;
    let sizes: HashMap<String, (usize, usize)> =
        entries.into_iter().map(|e| (e.image, (e.width, e.height))).collect();
    files
        .iter()
        .map(|f| {
            sizes.get(&stem(f)).copied().ok_or_else(|| {
                CliError::Usage(format!("{} has no entry in {}", stem(f), manifest.display()))
            })
        })
        .collect()
}

pub fn run(args: &LabelgenArgs, pool: &rayon::ThreadPool) -> CliResult<()> {
    if !(args.shrink_ratio > 0.0 && args.shrink_ratio <= 1.0) {
        return Err(CliError::Usage(format!("shrink ratio {} outside (0, 1]", args.shrink_ratio)));
    }
    let files = require_files(&args.annots, "ndjson")?;
    let sizes = image_sizes(args, &files)?;
    ensure_dir(&args.out)?;
    let results = pool.install(|| {
        files
            .par_iter()
            .zip(&sizes)
            .map(|(f, &size)| process(f, size, args.shrink_ratio, &args.out))
            .collect()
    });
    let outcomes = collect_ordered(results)?;
    let mut kernels = 0;
    let mut fallbacks = 0;
    for (f, o) in files.iter().zip(&outcomes) {
        for i in &o.fallbacks {
            eprintln!("{}: instance {i} collapsed under shrinking; kernel scaled about its centroid", stem(f));
        }
        kernels += o.kernels;
        fallbacks += o.fallbacks.len();
    }
    println!("labelgen: {} images, {kernels} instances, {fallbacks} fallbacks", files.len());
    Ok(())
}
