//! Conventional two-illumination mite detector.
//!
//! Per capture, against a static background capture:
//!
//! 1. `ir_diff = |gray(ir) - gray(ir_bg)|`
//! 2. `tq_mask = |gray(tq) - gray(tq_bg)| > diff_threshold_turquoise`, promoted to 0/255
//! 3. `combined = max(0, tq_mask - min(255, ir_gain * ir_diff))`
//! 4. `opened = open(combined > final_threshold)`
//! 5. keep 4-connected regions with `area >= min_mite_area`
//!
//! Bees light up in both illuminations and are cancelled in step 3. Mites
//! match the bee at 500 nm but not at 780 nm, so they survive as the
//! turquoise footprint that has no infrared change.

use std::fmt;
use std::str::FromStr;

use crate::components::{connected_components, regions_to_mask, Region};
use crate::error::{Error, Result};
use crate::metrics::filter_regions;
use crate::morphology::{gray_open, morphological_open, StructuringElement};
use crate::raster::{
    absolute, scale, subtract, subtract_saturating, threshold, to_grayscale, BinaryMask, GrayImage, RgbImage,
};

/// Native sensor frame of the capture device.
pub const NATIVE_WIDTH: usize = 1116;
pub const NATIVE_HEIGHT: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Illumination {
    White,
    /// 780 nm.
    Infrared,
    /// 500 nm.
    Turquoise,
}

impl Illumination {
    pub const ALL: [Illumination; 3] = [Illumination::White, Illumination::Infrared, Illumination::Turquoise];

    /// File stem used in the dataset layout.
    pub fn file_stem(self) -> &'static str {
        match self {
            Illumination::White => "white",
            Illumination::Infrared => "ir",
            Illumination::Turquoise => "turquoise",
        }
    }
}

/// The three co-registered photos taken on one trigger. Channels may be
/// missing when loaded from an incomplete dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaptureTriplet {
    pub capture_id: String,
    pub white: Option<RgbImage>,
    pub infrared: Option<RgbImage>,
    pub turquoise: Option<RgbImage>,
}

impl CaptureTriplet {
    pub fn new(
        capture_id: impl Into<String>,
        white: RgbImage,
        infrared: RgbImage,
        turquoise: RgbImage,
    ) -> Result<Self> {
        Self::partial(capture_id, Some(white), Some(infrared), Some(turquoise))
    }

    pub fn partial(
        capture_id: impl Into<String>,
        white: Option<RgbImage>,
        infrared: Option<RgbImage>,
        turquoise: Option<RgbImage>,
    ) -> Result<Self> {
        let t = Self {
            capture_id: capture_id.into(),
            white,
            infrared,
            turquoise,
        };
        let dims: Vec<_> = t.channels().filter_map(|(_, img)| img.map(RgbImage::dims)).collect();
        if let Some(&first) = dims.first() {
            if let Some(&other) = dims.iter().find(|&&d| d != first) {
                return Err(Error::Dimension(format!(
                    "capture {}: channels differ in size ({}x{} vs {}x{})",
                    t.capture_id, first.0, first.1, other.0, other.1
                )));
            }
        }
        Ok(t)
    }

    pub fn channel(&self, which: Illumination) -> Option<&RgbImage> {
        match which {
            Illumination::White => self.white.as_ref(),
            Illumination::Infrared => self.infrared.as_ref(),
            Illumination::Turquoise => self.turquoise.as_ref(),
        }
    }

    pub fn channels(&self) -> impl Iterator<Item = (Illumination, Option<&RgbImage>)> {
        Illumination::ALL.into_iter().map(|c| (c, self.channel(c)))
    }

    pub fn dims(&self) -> Option<(usize, usize)> {
        self.channels().find_map(|(_, img)| img.map(RgbImage::dims))
    }

    pub fn is_complete(&self) -> bool {
        self.channels().all(|(_, img)| img.is_some())
    }

    fn require(&self, which: Illumination) -> Result<&RgbImage> {
        self.channel(which).ok_or_else(|| {
            Error::Input(format!(
                "capture {} has no {} image",
                self.capture_id,
                which.file_stem()
            ))
        })
    }
}

/// Which processed channel is the minuend of the cancellation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SubtractionOrder {
    /// Thresholded turquoise minus scaled infrared difference.
    #[default]
    TurquoiseMinusInfrared,
    /// Thresholded infrared minus scaled turquoise difference.
    InfraredMinusTurquoise,
}

impl fmt::Display for SubtractionOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubtractionOrder::TurquoiseMinusInfrared => "turquoise_minus_ir",
            SubtractionOrder::InfraredMinusTurquoise => "ir_minus_turquoise",
        })
    }
}

impl FromStr for SubtractionOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "turquoise_minus_ir" => Ok(SubtractionOrder::TurquoiseMinusInfrared),
            "ir_minus_turquoise" => Ok(SubtractionOrder::InfraredMinusTurquoise),
            other => Err(Error::Config(format!("unknown subtraction_order {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Binarisation threshold for the infrared difference; only used when
    /// infrared is the minuend.
    pub diff_threshold_ir: u8,
    pub diff_threshold_turquoise: u8,
    pub ir_gain: f64,
    pub final_threshold: u8,
    pub opening_element: StructuringElement,
    pub min_mite_area: usize,
    pub open_before_threshold: bool,
    pub subtraction_order: SubtractionOrder,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            diff_threshold_ir: 25,
            diff_threshold_turquoise: 25,
            ir_gain: 2.0,
            final_threshold: 10,
            opening_element: StructuringElement::default(),
            min_mite_area: 20,
            open_before_threshold: false,
            subtraction_order: SubtractionOrder::default(),
        }
    }
}

impl PipelineConfig {
    pub const KEYS: [&'static str; 8] = [
        "diff_threshold_ir",
        "diff_threshold_turquoise",
        "ir_gain",
        "final_threshold",
        "opening_element",
        "min_mite_area",
        "open_before_threshold",
        "subtraction_order",
    ];

    pub fn validate(&self) -> Result<()> {
        if !(self.ir_gain.is_finite() && self.ir_gain >= 0.0) {
            return Err(Error::Config(format!("ir_gain must be >= 0, got {}", self.ir_gain)));
        }
        Ok(())
    }

    /// Sets one key from its textual value. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
        }
        let value = value.trim();
        match key.trim() {
            "diff_threshold_ir" => self.diff_threshold_ir = parse(key, value)?,
            "diff_threshold_turquoise" => self.diff_threshold_turquoise = parse(key, value)?,
            "ir_gain" => {
                let gain: f64 = parse(key, value)?;
                if !(gain.is_finite() && gain >= 0.0) {
                    return Err(Error::Config(format!("ir_gain must be >= 0, got {value}")));
                }
                self.ir_gain = gain;
            }
            "final_threshold" => self.final_threshold = parse(key, value)?,
            "opening_element" => {
                self.opening_element = value
                    .parse()
                    .map_err(|e: Error| Error::Config(format!("opening_element: {e}")))?
            }
            "min_mite_area" => self.min_mite_area = parse(key, value)?,
            "open_before_threshold" => self.open_before_threshold = parse(key, value)?,
            "subtraction_order" => self.subtraction_order = value.parse()?,
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Applies `key=value` overrides in order.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override {o:?} is not key=value")))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Parses the flat `key = value` format; `#` starts a comment. Keys not
    /// present keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: n + 1,
                message: format!("expected key = value, got {line:?}"),
            })?;
            cfg.set(k, v).map_err(|e| Error::Parse {
                line: n + 1,
                message: e.to_string(),
            })?;
        }
        Ok(cfg)
    }

    pub fn to_config_string(&self) -> String {
        format!(
            "diff_threshold_ir = {}\n\
             diff_threshold_turquoise = {}\n\
             ir_gain = {}\n\
             final_threshold = {}\n\
             opening_element = {}\n\
             min_mite_area = {}\n\
             open_before_threshold = {}\n\
             subtraction_order = {}\n",
            self.diff_threshold_ir,
            self.diff_threshold_turquoise,
            self.ir_gain,
            self.final_threshold,
            self.opening_element,
            self.min_mite_area,
            self.open_before_threshold,
            self.subtraction_order,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub capture_id: String,
    pub mite_mask: BinaryMask,
    /// Regions surviving the area filter, ids renumbered from 0.
    pub regions: Vec<Region>,
    pub config_used: PipelineConfig,
}

/// Every intermediate raster of one detection run.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionStages {
    pub ir_diff: GrayImage,
    pub turquoise_diff: GrayImage,
    /// Thresholded minuend channel promoted to 0/255.
    pub minuend: GrayImage,
    pub combined: GrayImage,
    pub opened: BinaryMask,
    pub result: DetectionResult,
}

fn gray_diff(photo: &RgbImage, background: &RgbImage) -> Result<GrayImage> {
    absolute(&subtract(&to_grayscale(photo)?, &to_grayscale(background)?)?)
}

/// `threshold(|gray(photo) - gray(background)|, t)`.
pub fn preprocess_channel(photo: &RgbImage, background: &RgbImage, t: u8) -> Result<BinaryMask> {
    Ok(threshold(&gray_diff(photo, background)?, t))
}

pub fn detect_mites(
    capture: &CaptureTriplet,
    background: &CaptureTriplet,
    cfg: &PipelineConfig,
) -> Result<DetectionResult> {
    detect_mites_staged(capture, background, cfg).map(|s| s.result)
}

pub fn detect_mites_staged(
    capture: &CaptureTriplet,
    background: &CaptureTriplet,
    cfg: &PipelineConfig,
) -> Result<DetectionStages> {
    cfg.validate()?;
    let ir = capture.require(Illumination::Infrared)?;
    let tq = capture.require(Illumination::Turquoise)?;
    let ir_bg = background.require(Illumination::Infrared)?;
    let tq_bg = background.require(Illumination::Turquoise)?;

    let ir_diff = gray_diff(ir, ir_bg)?;
    let turquoise_diff = gray_diff(tq, tq_bg)?;

    let (minuend, subtrahend) = match cfg.subtraction_order {
        SubtractionOrder::TurquoiseMinusInfrared => (
            threshold(&turquoise_diff, cfg.diff_threshold_turquoise).to_gray(),
            scale(&ir_diff, cfg.ir_gain)?,
        ),
        SubtractionOrder::InfraredMinusTurquoise => (
            threshold(&ir_diff, cfg.diff_threshold_ir).to_gray(),
            scale(&turquoise_diff, cfg.ir_gain)?,
        ),
    };
    let combined = subtract_saturating(&minuend, &subtrahend)?;

    let opened = if cfg.open_before_threshold {
        threshold(&gray_open(&combined, cfg.opening_element), cfg.final_threshold)
    } else {
        morphological_open(&threshold(&combined, cfg.final_threshold), cfg.opening_element)
    };

    let mut regions = filter_regions(connected_components(&opened), cfg.min_mite_area);
    for (id, r) in regions.iter_mut().enumerate() {
        r.id = id;
    }
    let (w, h) = opened.dims();
    let mite_mask = regions_to_mask(&regions, w, h);

    Ok(DetectionStages {
        ir_diff,
        turquoise_diff,
        minuend,
        combined,
        opened,
        result: DetectionResult {
            capture_id: capture.capture_id.clone(),
            mite_mask,
            regions,
            config_used: cfg.clone(),
        },
    })
}

/// Runs [`detect_mites`] on every capture. Results keep input order; on
/// failure the first failing capture's error is returned, tagged with its id.
pub fn run_batch(
    captures: &[CaptureTriplet],
    background: &CaptureTriplet,
    cfg: &PipelineConfig,
) -> Result<Vec<DetectionResult>> {
    let one = |c: &CaptureTriplet| detect_mites(c, background, cfg).map_err(|e| e.with_capture(&c.capture_id));

    #[cfg(feature = "parallel")]
    let results: Vec<Result<DetectionResult>> = {
        use rayon::prelude::*;
        captures.par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<DetectionResult>> = captures.iter().map(one).collect();

    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(w: usize, h: usize, v: u8) -> RgbImage {
        RgbImage::filled(w, h, [v, v, v]).unwrap()
    }

    fn triplet(id: &str, white: RgbImage, ir: RgbImage, tq: RgbImage) -> CaptureTriplet {
        CaptureTriplet::new(id, white, ir, tq).unwrap()
    }

    #[test]
    fn preprocess_identical_is_empty() {
        let a = flat(8, 6, 90);
        assert_eq!(preprocess_channel(&a, &a, 0).unwrap().count(), 0);
    }

    #[test]
    fn preprocess_uniform_offset() {
        let bg = flat(8, 6, 50);
        let photo = flat(8, 6, 80);
        assert_eq!(preprocess_channel(&photo, &bg, 29).unwrap().count(), 48);
        assert_eq!(preprocess_channel(&photo, &bg, 30).unwrap().count(), 0);
        assert!(matches!(
            preprocess_channel(&photo, &flat(4, 6, 50), 1),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn preprocess_blob_over_flat_background() {
        // Hand composition on 16x16: bg 40, blob rows 4..10 x cols 3..12 at
        // 120, so |diff| = 80 inside and 0 outside; t = 25 keeps exactly the blob.
        let bg = flat(16, 16, 40);
        let mut photo = bg.clone();
        for y in 4..10 {
            for x in 3..12 {
                photo.put(x, y, [120, 120, 120]);
            }
        }
        let m = preprocess_channel(&photo, &bg, 25).unwrap();
        for y in 0..16 {
            for x in 0..16 {
                assert_eq!(m.get(x, y), (4..10).contains(&y) && (3..12).contains(&x));
            }
        }
    }

    #[test]
    fn background_against_itself_is_empty() {
        let bg = triplet("bg", flat(10, 10, 60), flat(10, 10, 40), flat(10, 10, 50));
        for t in [0u8, 10, 200] {
            let cfg = PipelineConfig {
                final_threshold: t,
                diff_threshold_turquoise: 0,
                ..PipelineConfig::default()
            };
            let r = detect_mites(&bg, &bg, &cfg).unwrap();
            assert!(r.regions.is_empty());
            assert_eq!(r.mite_mask.count(), 0);
        }
    }

    #[test]
    fn missing_channel_is_input_error() {
        let bg = triplet("bg", flat(4, 4, 1), flat(4, 4, 1), flat(4, 4, 1));
        let cap = CaptureTriplet::partial("c", Some(flat(4, 4, 1)), None, Some(flat(4, 4, 1))).unwrap();
        assert!(matches!(
            detect_mites(&cap, &bg, &PipelineConfig::default()),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn triplet_dimension_mismatch() {
        assert!(matches!(
            CaptureTriplet::new("x", flat(4, 4, 0), flat(4, 5, 0), flat(4, 4, 0)),
            Err(Error::Dimension(_))
        ));
        let bg = triplet("bg", flat(4, 4, 1), flat(4, 4, 1), flat(4, 4, 1));
        let cap = triplet("c", flat(5, 4, 1), flat(5, 4, 1), flat(5, 4, 1));
        assert!(matches!(
            detect_mites(&cap, &bg, &PipelineConfig::default()),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn mite_square_survives_and_bee_cancels() {
        // Bee: tq +90, ir +160. Mite patch 6x6 on the bee: tq as bee, ir as background.
        let (w, h) = (40, 30);
        let bg = triplet("bg", flat(w, h, 60), flat(w, h, 40), flat(w, h, 50));
        let mut ir = flat(w, h, 40);
        let mut tq = flat(w, h, 50);
        for y in 5..25 {
            for x in 5..35 {
                ir.put(x, y, [200; 3]);
                tq.put(x, y, [140; 3]);
            }
        }
        for y in 10..16 {
            for x in 10..16 {
                ir.put(x, y, [45; 3]);
            }
        }
        let cap = triplet("c", flat(w, h, 60), ir, tq);
        let r = detect_mites(&cap, &bg, &PipelineConfig::default()).unwrap();
        assert_eq!(r.regions.len(), 1);
        assert_eq!(r.regions[0].area(), 36);
        assert_eq!(r.mite_mask.count(), 36);

        let strict = PipelineConfig {
            min_mite_area: 37,
            ..PipelineConfig::default()
        };
        assert!(detect_mites(&cap, &bg, &strict).unwrap().regions.is_empty());

        // Threshold and opening commute for flat elements.
        let swapped = PipelineConfig {
            open_before_threshold: true,
            ..PipelineConfig::default()
        };
        assert_eq!(detect_mites(&cap, &bg, &swapped).unwrap().mite_mask, r.mite_mask);
    }

    #[test]
    fn config_round_trips_through_text() {
        let mut cfg = PipelineConfig::default();
        cfg.apply_overrides(&[
            "ir_gain=1.5",
            "opening_element=cross:2",
            "subtraction_order=ir_minus_turquoise",
        ])
        .unwrap();
        let parsed = PipelineConfig::parse(&cfg.to_config_string()).unwrap();
        assert_eq!(parsed, cfg);
        for key in PipelineConfig::KEYS {
            assert!(cfg.to_config_string().contains(&format!("{key} = ")));
        }
    }

    #[test]
    fn config_rejects_bad_input() {
        let mut cfg = PipelineConfig::default();
        assert!(cfg.set("nope", "1").is_err());
        assert!(cfg.set("final_threshold", "256").is_err());
        assert!(cfg.set("ir_gain", "-1").is_err());
        assert!(cfg.set("opening_element", "square:0").is_err());
        assert!(cfg.apply_overrides(&["min_mite_area"]).is_err());
        let err = PipelineConfig::parse("# c\nir_gain = 2\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert_eq!(
            PipelineConfig::parse("final_threshold = 40 # tuned\n")
                .unwrap()
                .final_threshold,
            40
        );
    }

    #[test]
    fn batch_preserves_order_and_tags_errors() {
        let bg = triplet("bg", flat(6, 6, 1), flat(6, 6, 1), flat(6, 6, 1));
        let good = triplet("a", flat(6, 6, 1), flat(6, 6, 1), flat(6, 6, 1));
        assert!(run_batch(&[], &bg, &PipelineConfig::default()).unwrap().is_empty());
        let out = run_batch(&[good.clone(), good.clone()], &bg, &PipelineConfig::default()).unwrap();
        assert_eq!(out[0], out[1]);

        let bad = CaptureTriplet::partial("broken", None, None, None).unwrap();
        let worse = CaptureTriplet::partial("later", None, None, None).unwrap();
        let err = run_batch(&[good, bad, worse], &bg, &PipelineConfig::default()).unwrap_err();
        match err {
            Error::Capture { capture_id, .. } => assert_eq!(capture_id, "broken"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
