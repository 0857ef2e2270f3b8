use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use textkernel_core::eval::{aggregate, match_image, Detection, ImageStats};
use textkernel_core::labelgen::Annotation;

use super::{collect_ordered, load_ndjson};
use crate::error::{CliError, CliResult};
use crate::fsutil::{list_files, require_files, stem, write_atomic};
use crate::EvalArgs;

#[derive(Debug, Serialize)]
struct ImageRow {
    image: String,
    tp: usize,
    fp: usize,
    #[serde(rename = "fn")]
    fn_: usize,
}

#[derive(Debug, Serialize)]
struct Report {
    iou_threshold: f64,
    tp: usize,
    fp: usize,
    #[serde(rename = "fn")]
    fn_: usize,
    precision: f64,
    recall: f64,
    fmeasure: f64,
    images: Vec<ImageRow>,
}

pub fn run(args: &EvalArgs, pool: &rayon::ThreadPool) -> CliResult<()> {
    if !(args.iou > 0.0 && args.iou <= 1.0) {
        return Err(CliError::Usage(format!("IoU threshold {} outside (0, 1]", args.iou)));
    }
    let gts = require_files(&args.gts, "ndjson")?;
    let dets = list_files(&args.dets, "ndjson")?;
    let gt_names: BTreeSet<String> = gts.iter().map(|p| stem(p)).collect();
    if let Some(orphan) = dets.iter().find(|p| !gt_names.contains(&stem(p))) {
        return Err(CliError::Usage(format!("{} has no ground-truth file", orphan.display())));
    }

    let results = pool.install(|| {
        gts.par_iter()
            .map(|g| {
                let annots: Vec<Annotation> = load_ndjson(g)?;
                let det_path = args.dets.join(format!("{}.ndjson", stem(g)));
                let found: Vec<Detection> = if det_path.is_file() { load_ndjson(&det_path)? } else { Vec::new() };
                Ok(ImageStats::from(&match_image(&found, &annots, args.iou)))
            })
            .collect()
    });
    let stats = collect_ordered(results)?;
    let r = aggregate(&stats);
    let report = Report {
        iou_threshold: args.iou,
        tp: r.tp,
        fp: r.fp,
        fn_: r.fn_,
        precision: r.precision,
        recall: r.recall,
        fmeasure: r.fmeasure,
        images: gts
            .iter()
            .zip(&stats)
            .map(|(g, s)| ImageRow {
                image: stem(g),
                tp: s.tp,
                fp: s.fp,
                fn_: s.fn_,
            })
            .collect(),
    };
    let mut json = serde_json::to_vec_pretty(&report).map_err(|e| CliError::Failed(e.to_string()))?;
    json.push(b'\n');
    write_atomic(&args.report, &json)?;
    println!("tp {} fp {} fn {}", r.tp, r.fp, r.fn_);
    println!("precision {:.4} recall {:.4} fmeasure {:.4}", r.precision, r.recall, r.fmeasure);
    Ok(())
}
