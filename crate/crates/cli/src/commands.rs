use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use varroa_core::annotations::{load_dataset, mite_mask_of, DatasetIndex, IssueLevel};
use varroa_core::metrics::{aggregate, evaluate_image, EvalReport, SbmCounts};
use varroa_core::pipeline::{detect_mites, DetectionResult, PipelineConfig};
use varroa_core::synth::{export_scenes, generate_suite, Difficulty};
use varroa_core::{io, report};

use crate::{CliError, DetectArgs, EvalArgs, ReportArgs, SynthArgs};

/// Suffix pairing a prediction file with its capture id.
pub const PRED_SUFFIX: &str = ".mask.png";
pub const REGIONS_SUFFIX: &str = ".regions.txt";

fn say(out: &mut (dyn Write + Send), line: impl AsRef<str>) -> Result<(), CliError> {
    writeln!(out, "{}", line.as_ref()).map_err(|e| CliError::Data(format!("writing output: {e}")))
}

fn data_err(context: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{context}: {e}"))
}

fn load_index(root: &Path) -> Result<DatasetIndex, CliError> {
    let index = load_dataset(root).map_err(|e| data_err("loading dataset", e))?;
    for issue in &index.issues {
        match issue.level {
            IssueLevel::Warning => log::warn!("{}: {}", issue.capture_id, issue.message),
            IssueLevel::Error => log::error!("{}: {}", issue.capture_id, issue.message),
        }
    }
    Ok(index)
}

fn build_config(args: &DetectArgs) -> Result<PipelineConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("reading config {}: {e}", path.display())))?;
            PipelineConfig::parse(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?
        }
        None => PipelineConfig::default(),
    };
    cfg.apply_overrides(&args.overrides)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DetectSummary {
    /// `(capture_id, region count)` for every capture written.
    pub processed: Vec<(String, usize)>,
    /// `(capture_id, error)` for every capture that could not be processed.
    pub failures: Vec<(String, String)>,
}

fn regions_listing(r: &DetectionResult) -> String {
    let mut s = format!(
        "# capture {} regions {}\nid area x_min y_min x_max y_max\n",
        r.capture_id,
        r.regions.len()
    );
    for reg in &r.regions {
        let b = reg.bbox;
        writeln!(
            s,
            "{} {} {} {} {} {}",
            reg.id,
            reg.area(),
            b.x_min,
            b.y_min,
            b.x_max,
            b.y_max
        )
        .unwrap();
    }
    s
}

type Timed = Result<(DetectionResult, Duration), String>;

pub fn cmd_detect(args: &DetectArgs, out: &mut (dyn Write + Send)) -> Result<DetectSummary, CliError> {
    let cfg = build_config(args)?;
    let index = load_index(&args.dataset)?;
    let photos = index
        .background_photos(&args.background)
        .ok_or_else(|| CliError::Usage(format!("background capture {:?} not found in dataset", args.background)))?;
    let background = photos
        .load(&args.background)
        .map_err(|e| data_err("loading background", e))?;

    fs::create_dir_all(&args.out).map_err(|e| data_err(&args.out.display().to_string(), e))?;
    fs::write(args.out.join("config.txt"), cfg.to_config_string()).map_err(|e| data_err("writing config", e))?;

    let entries: Vec<_> = index
        .entries
        .iter()
        .filter(|e| e.capture_id != args.background)
        .collect();
    let results: Vec<(String, Timed)> = entries
        .par_iter()
        .map(|entry| {
            let start = Instant::now();
            let r = entry
                .load_capture()
                .and_then(|c| detect_mites(&c, &background, &cfg))
                .map(|r| (r, start.elapsed()))
                .map_err(|e| e.to_string());
            (entry.capture_id.clone(), r)
        })
        .collect();

    let mut summary = DetectSummary::default();
    for (id, result) in results {
        match result {
            Ok((r, elapsed)) => {
                io::write_mask(args.out.join(format!("{id}{PRED_SUFFIX}")), &r.mite_mask)?;
                let listing = args.out.join(format!("{id}{REGIONS_SUFFIX}"));
                fs::write(&listing, regions_listing(&r)).map_err(|e| data_err("writing regions", e))?;
                let areas: Vec<String> = r.regions.iter().map(|g| g.area().to_string()).collect();
                say(
                    out,
                    format!(
                        "{id}: {} regions [{}] in {:.1} ms",
                        r.regions.len(),
                        areas.join(", "),
                        elapsed.as_secs_f64() * 1e3
                    ),
                )?;
                summary.processed.push((id, r.regions.len()));
            }
            Err(e) => {
                log::error!("{id}: {e}");
                say(out, format!("{id}: FAILED {e}"))?;
                summary.failures.push((id, e));
            }
        }
    }
    let total: usize = summary.processed.iter().map(|(_, n)| n).sum();
    say(
        out,
        format!(
            "{} captures, {} regions, {} failed",
            summary.processed.len(),
            total,
            summary.failures.len()
        ),
    )?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOutcome {
    pub report: EvalReport,
    pub unpaired: Vec<String>,
    pub has_errors: bool,
}

pub fn cmd_eval(args: &EvalArgs, out: &mut (dyn Write + Send)) -> Result<EvalOutcome, CliError> {
    let index = load_index(&args.dataset)?;
    let mut preds = Vec::new();
    for entry in fs::read_dir(&args.pred).map_err(|e| data_err(&args.pred.display().to_string(), e))? {
        let entry = entry.map_err(|e| data_err("listing predictions", e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(id) = name.strip_suffix(PRED_SUFFIX) {
            preds.push((id.to_string(), entry.path()));
        }
    }
    preds.sort();

    let mut unpaired = Vec::new();
    let mut paired = Vec::new();
    for (id, path) in preds {
        match index.entry(&id) {
            Some(e) if e.mask.is_some() => paired.push((id, path, e)),
            _ => unpaired.push(id),
        }
    }
    for id in &unpaired {
        log::warn!("prediction {id} has no ground truth; excluded");
        say(out, format!("unpaired: {id}"))?;
    }
    if paired.is_empty() {
        return Err(CliError::Data("no prediction could be paired with ground truth".into()));
    }

    let scored: Vec<(String, varroa_core::Result<SbmCounts>)> = paired
        .par_iter()
        .map(|(id, path, entry)| {
            let counts = io::read_mask(path).and_then(|pred| {
                let gt = mite_mask_of(&entry.load_class_mask()?);
                evaluate_image(&pred, &gt, args.min_area)
            });
            (id.clone(), counts)
        })
        .collect();

    let mut per_image = Vec::new();
    let mut has_errors = false;
    for (id, counts) in scored {
        match counts {
            Ok(c) => per_image.push((id, c)),
            Err(e) => {
                has_errors = true;
                log::error!("{id}: {e}");
                say(out, format!("{id}: FAILED {e}"))?;
            }
        }
    }
    let report = aggregate(per_image, Some(args.min_area));
    fs::write(&args.report, report::to_kv(&report)).map_err(|e| data_err("writing report", e))?;
    say(out, report::to_table(&report))?;
    say(out, report::summary(&report))?;
    Ok(EvalOutcome {
        report,
        unpaired,
        has_errors,
    })
}

pub fn cmd_synth(args: &SynthArgs, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let difficulty: Difficulty = args
        .difficulty
        .parse()
        .map_err(|e: varroa_core::Error| CliError::Usage(e.to_string()))?;
    if args.out.exists() {
        let non_empty = fs::read_dir(&args.out)
            .map_err(|e| data_err(&args.out.display().to_string(), e))?
            .next()
            .is_some();
        if non_empty && !args.force {
            return Err(CliError::Usage(format!(
                "{} is not empty; pass --force to write into it",
                args.out.display()
            )));
        }
    }
    let scenes = generate_suite(args.n, args.seed, difficulty)?;
    fs::create_dir_all(&args.out).map_err(|e| data_err("creating output", e))?;
    export_scenes(&args.out, &scenes)?;
    let background = scenes.first().map(|s| s.background.capture_id.clone());
    say(
        out,
        format!(
            "wrote {} {difficulty} scenes to {}{}",
            scenes.len(),
            args.out.display(),
            background.map(|b| format!(" (background {b})")).unwrap_or_default()
        ),
    )
}

pub fn cmd_report(args: &ReportArgs, out: &mut (dyn Write + Send)) -> Result<EvalReport, CliError> {
    let mut merged: Option<EvalReport> = None;
    for path in &args.reports {
        let text = fs::read_to_string(path).map_err(|e| data_err(&path.display().to_string(), e))?;
        let r = report::parse_kv(&text).map_err(|e| data_err(&format!("{} schema", path.display()), e))?;
        merged = Some(match merged {
            None => r,
            Some(m) => m.merge(r).map_err(|e| data_err("merging", e))?,
        });
    }
    let merged = merged.ok_or_else(|| CliError::Usage("no reports given".into()))?;
    if let Some(path) = &args.out {
        fs::write(path, report::to_kv(&merged)).map_err(|e| data_err("writing report", e))?;
    }
    say(out, report::to_table(&merged))?;
    say(out, report::summary(&merged))?;
    Ok(merged)
}
