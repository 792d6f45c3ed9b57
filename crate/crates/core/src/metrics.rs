//! Satisfied Bee Metric: object-level matching of predicted and
//! ground-truth mite regions.
//!
//! A predicted region is a true positive if it shares at least one pixel
//! with any ground-truth region, otherwise a false positive. A ground-truth
//! region touched by no prediction is a false negative. There is no notion
//! of a correctly rejected object, so `tn` is always zero.

use std::collections::HashSet;
use std::ops::{Add, AddAssign};

use crate::components::{connected_components, Region};
use crate::error::{Error, Result};
use crate::raster::BinaryMask;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct SbmCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl SbmCounts {
    pub fn new(tp: u64, fp: u64, fn_: u64) -> Self {
        Self { tp, fp, fn_, tn: 0 }
    }

    /// `tp / (tp + fn)`, or `None` when there is nothing to recall.
    pub fn recall(&self) -> Option<f64> {
        let denom = self.tp + self.fn_;
        (denom > 0).then(|| self.tp as f64 / denom as f64)
    }
}

impl Add for SbmCounts {
    type Output = SbmCounts;

    fn add(self, o: SbmCounts) -> SbmCounts {
        SbmCounts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            tn: self.tn + o.tn,
        }
    }
}

impl AddAssign for SbmCounts {
    fn add_assign(&mut self, o: SbmCounts) {
        *self = *self + o;
    }
}

impl std::iter::Sum for SbmCounts {
    fn sum<I: Iterator<Item = SbmCounts>>(iter: I) -> Self {
        iter.fold(SbmCounts::default(), Add::add)
    }
}

/// Keeps regions with `area >= min_area`, in order.
pub fn filter_regions(regions: Vec<Region>, min_area: usize) -> Vec<Region> {
    regions.into_iter().filter(|r| r.area() >= min_area).collect()
}

pub fn sbm_match(predicted: &[Region], ground_truth: &[Region]) -> SbmCounts {
    let gt_pixels: HashSet<(u32, u32)> = ground_truth.iter().flat_map(|r| r.pixels.iter().copied()).collect();
    let pred_pixels: HashSet<(u32, u32)> = predicted.iter().flat_map(|r| r.pixels.iter().copied()).collect();

    let mut counts = SbmCounts::default();
    for p in predicted {
        if p.pixels.iter().any(|px| gt_pixels.contains(px)) {
            counts.tp += 1;
        } else {
            counts.fp += 1;
        }
    }
    for g in ground_truth {
        if !g.pixels.iter().any(|px| pred_pixels.contains(px)) {
            counts.fn_ += 1;
        }
    }
    counts
}

/// SBM for one image. Only predictions are area-filtered.
pub fn evaluate_image(pred_mask: &BinaryMask, gt_mask: &BinaryMask, min_area: usize) -> Result<SbmCounts> {
    if pred_mask.dims() != gt_mask.dims() {
        let (a, b) = (pred_mask.dims(), gt_mask.dims());
        return Err(Error::Dimension(format!(
            "prediction is {}x{}, ground truth is {}x{}",
            a.0, a.1, b.0, b.1
        )));
    }
    let (w, _) = pred_mask.dims();
    let predicted = filter_regions(connected_components(pred_mask), min_area);
    let ground_truth = connected_components(gt_mask);

    // The masks give constant-time membership, equivalent to the pixel sets
    // used by `sbm_match`.
    let mut kept = vec![false; pred_mask.data().len()];
    for r in &predicted {
        for &(x, y) in &r.pixels {
            kept[y as usize * w + x as usize] = true;
        }
    }
    let mut counts = SbmCounts::default();
    for p in &predicted {
        if p.pixels.iter().any(|&(x, y)| gt_mask.get(x as usize, y as usize)) {
            counts.tp += 1;
        } else {
            counts.fp += 1;
        }
    }
    for g in &ground_truth {
        if !g.pixels.iter().any(|&(x, y)| kept[y as usize * w + x as usize]) {
            counts.fn_ += 1;
        }
    }
    Ok(counts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_image: Vec<(String, SbmCounts)>,
    pub total: SbmCounts,
    pub recall: Option<f64>,
    pub min_area: Option<usize>,
}

impl EvalReport {
    /// Concatenates two reports; `min_area` must agree.
    pub fn merge(mut self, other: EvalReport) -> Result<EvalReport> {
        if self.min_area != other.min_area {
            return Err(Error::Input(format!(
                "cannot merge reports with min_area {:?} and {:?}",
                self.min_area, other.min_area
            )));
        }
        self.per_image.extend(other.per_image);
        Ok(aggregate(self.per_image, self.min_area))
    }
}

pub fn aggregate(reports: Vec<(String, SbmCounts)>, min_area: Option<usize>) -> EvalReport {
    let total: SbmCounts = reports.iter().map(|(_, c)| *c).sum();
    EvalReport {
        per_image: reports,
        recall: total.recall(),
        total,
        min_area,
    }
}
