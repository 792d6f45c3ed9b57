//! Text renderings of an [`EvalReport`].
//!
//! The machine-readable form is line oriented:
//!
//! ```text
//! sbm-report 1
//! min_area 20
//! image scene_0000 tp=1 fp=0 fn=0 tn=0 recall=1.0000
//! total tp=1 fp=0 fn=0 tn=0 recall=1.0000
//! ```
//!
//! `min_area` is `-` when unknown and `recall` is `undefined` when
//! `tp + fn = 0`. Capture ids contain no whitespace. The `total` line must
//! equal the sum of the `image` lines.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::metrics::{aggregate, EvalReport, SbmCounts};

pub const REPORT_HEADER: &str = "sbm-report 1";

/// Recall to four decimals, or `undefined`.
pub fn format_recall(recall: Option<f64>) -> String {
    match recall {
        Some(r) => format!("{r:.4}"),
        None => "undefined".into(),
    }
}

pub fn format_percent(recall: Option<f64>) -> String {
    match recall {
        Some(r) => format!("{:.0}%", r * 100.0),
        None => "undefined".into(),
    }
}

fn counts_fields(c: &SbmCounts) -> String {
    format!(
        "tp={} fp={} fn={} tn={} recall={}",
        c.tp,
        c.fp,
        c.fn_,
        c.tn,
        format_recall(c.recall())
    )
}

pub fn to_kv(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str(REPORT_HEADER);
    out.push('\n');
    match report.min_area {
        Some(a) => writeln!(out, "min_area {a}").unwrap(),
        None => out.push_str("min_area -\n"),
    }
    for (id, c) in &report.per_image {
        writeln!(out, "image {id} {}", counts_fields(c)).unwrap();
    }
    writeln!(out, "total {}", counts_fields(&report.total)).unwrap();
    out
}

fn schema(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_counts<'a>(line: usize, fields: impl Iterator<Item = &'a str>) -> Result<SbmCounts> {
    let mut c = SbmCounts::default();
    let mut seen = [false; 4];
    for field in fields {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| schema(line, format!("expected key=value, got {field:?}")))?;
        if k == "recall" {
            continue;
        }
        let slot = match k {
            "tp" => 0,
            "fp" => 1,
            "fn" => 2,
            "tn" => 3,
            other => return Err(schema(line, format!("unknown field {other:?}"))),
        };
        let n: u64 = v.parse().map_err(|_| schema(line, format!("bad count {v:?}")))?;
        match slot {
            0 => c.tp = n,
            1 => c.fp = n,
            2 => c.fn_ = n,
            _ => c.tn = n,
        }
        seen[slot] = true;
    }
    if !seen.iter().all(|&s| s) {
        return Err(schema(line, "missing one of tp/fp/fn/tn"));
    }
    if c.tn != 0 {
        return Err(schema(line, "tn must be 0"));
    }
    Ok(c)
}

pub fn parse_kv(text: &str) -> Result<EvalReport> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, REPORT_HEADER)) => {}
        Some((n, other)) => return Err(schema(n, format!("expected {REPORT_HEADER:?}, got {other:?}"))),
        None => return Err(schema(1, "empty report")),
    }
    let min_area = match lines.next() {
        Some((n, l)) => match l.split_whitespace().collect::<Vec<_>>()[..] {
            ["min_area", "-"] => None,
            ["min_area", v] => Some(v.parse().map_err(|_| schema(n, format!("bad min_area {v:?}")))?),
            _ => return Err(schema(n, "expected min_area line")),
        },
        None => return Err(schema(2, "missing min_area line")),
    };
    let mut per_image = Vec::new();
    let mut total = None;
    for (n, l) in lines {
        if total.is_some() {
            return Err(schema(n, "content after total line"));
        }
        let mut tokens = l.split_whitespace();
        match tokens.next() {
            Some("image") => {
                let id = tokens.next().ok_or_else(|| schema(n, "image line without id"))?;
                per_image.push((id.to_string(), parse_counts(n, tokens)?));
            }
            Some("total") => total = Some((n, parse_counts(n, tokens)?)),
            _ => return Err(schema(n, format!("unexpected line {l:?}"))),
        }
    }
    let (n, total) = total.ok_or_else(|| schema(0, "missing total line"))?;
    let report = aggregate(per_image, min_area);
    if report.total != total {
        return Err(schema(n, "total does not equal the sum of image lines"));
    }
    Ok(report)
}

/// Per-image table followed by the totals row.
pub fn to_table(report: &EvalReport) -> String {
    let id_width = report
        .per_image
        .iter()
        .map(|(id, _)| id.len())
        .chain(["capture_id".len()])
        .max()
        .unwrap_or(10);
    let mut out = String::new();
    writeln!(
        out,
        "{:<id_width$}  {:>7} {:>7} {:>7} {:>7}  {:>9}",
        "capture_id", "TP", "FP", "FN", "TN", "recall"
    )
    .unwrap();
    let row = |out: &mut String, id: &str, c: &SbmCounts| {
        writeln!(
            out,
            "{:<id_width$}  {:>7} {:>7} {:>7} {:>7}  {:>9}",
            id,
            c.tp,
            c.fp,
            c.fn_,
            c.tn,
            format_recall(c.recall())
        )
        .unwrap();
    };
    for (id, c) in &report.per_image {
        row(&mut out, id, c);
    }
    writeln!(out, "{}", "-".repeat(id_width + 42)).unwrap();
    row(&mut out, "total", &report.total);
    out
}

/// 2x2 confusion matrix with ground truth on rows, predictions on columns:
///
/// ```text
/// +----+----------+----------+
/// | -  |      Predicted      |
/// +----+----------+----------+
/// | GT | TP=806   | FN=661   |
/// |    | FP=10    | TN=0     |
/// +----+----------+----------+
/// ```
pub fn confusion_matrix(c: &SbmCounts) -> String {
    let cells = [
        format!("TP={}", c.tp),
        format!("FN={}", c.fn_),
        format!("FP={}", c.fp),
        format!("TN={}", c.tn),
    ];
    let cw = cells.iter().map(String::len).max().unwrap_or(0).max(8) + 1;
    let rule = format!("+----+{}+{}+", "-".repeat(cw + 1), "-".repeat(cw + 1));
    let span = 2 * cw + 3;
    let mut out = String::new();
    writeln!(out, "{rule}").unwrap();
    writeln!(out, "| -  |{:^span$}|", "Predicted").unwrap();
    writeln!(out, "{rule}").unwrap();
    writeln!(out, "| GT | {:<cw$}| {:<cw$}|", cells[0], cells[1]).unwrap();
    writeln!(out, "|    | {:<cw$}| {:<cw$}|", cells[2], cells[3]).unwrap();
    writeln!(out, "{rule}").unwrap();
    out
}

/// Matrix plus the recall line, as printed by the CLI.
pub fn summary(report: &EvalReport) -> String {
    format!(
        "{}recall = {} ({})\n",
        confusion_matrix(&report.total),
        format_recall(report.recall),
        format_percent(report.recall)
    )
}
