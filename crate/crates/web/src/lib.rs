//! WebAssembly bindings for the in-browser demo. The page in `www/` drives
//! three operations: generate a synthetic scene, run the detector with
//! user-chosen parameters, and sweep the minimum region area.

use wasm_bindgen::prelude::*;

use varroa_core::annotations::mite_mask_of;
use varroa_core::components::Region;
use varroa_core::morphology::ElementShape;
use varroa_core::pipeline::Illumination;
use varroa_core::synth::{generate_scene, suite_spec, Difficulty, Scene};
use varroa_core::{
    connected_components, detect_mites, evaluate_image, BinaryMask, PipelineConfig, RgbImage, SbmCounts,
    StructuringElement,
};

const TP_COLOR: [u8; 3] = [255, 220, 0];
const FP_COLOR: [u8; 3] = [255, 40, 40];
const MISSED_COLOR: [u8; 3] = [40, 140, 255];

/// Detector knobs exposed as sliders.
#[wasm_bindgen]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub diff_threshold: u8,
    pub ir_gain: f64,
    pub final_threshold: u8,
    pub opening_radius: u8,
    pub cross: bool,
    pub min_area: u32,
}

#[wasm_bindgen]
impl Params {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Params {
        let d = PipelineConfig::default();
        Params {
            diff_threshold: d.diff_threshold_turquoise,
            ir_gain: d.ir_gain,
            final_threshold: d.final_threshold,
            opening_radius: d.opening_element.radius() as u8,
            cross: d.opening_element.shape() == ElementShape::Cross,
            min_area: d.min_mite_area as u32,
        }
    }
}

impl Default for Params {
    fn default() -> Self {
        Self::new()
    }
}

impl Params {
    pub fn to_config(self) -> varroa_core::Result<PipelineConfig> {
        let shape = if self.cross {
            ElementShape::Cross
        } else {
            ElementShape::Square
        };
        let cfg = PipelineConfig {
            diff_threshold_ir: self.diff_threshold,
            diff_threshold_turquoise: self.diff_threshold,
            ir_gain: self.ir_gain,
            final_threshold: self.final_threshold,
            opening_element: StructuringElement::new(shape, self.opening_radius as usize)?,
            min_mite_area: self.min_area as usize,
            ..PipelineConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Outcome of one detector run, with an RGBA overlay ready for `ImageData`.
#[wasm_bindgen]
pub struct Detection {
    overlay: Vec<u8>,
    counts: SbmCounts,
    areas: Vec<u32>,
}

#[wasm_bindgen]
impl Detection {
    pub fn overlay(&self) -> Vec<u8> {
        self.overlay.clone()
    }
    pub fn tp(&self) -> u32 {
        self.counts.tp as u32
    }
    pub fn fp(&self) -> u32 {
        self.counts.fp as u32
    }
    #[wasm_bindgen(js_name = "fn")]
    pub fn fn_(&self) -> u32 {
        self.counts.fn_ as u32
    }
    /// NaN when the scene has no mites and nothing was predicted.
    pub fn recall(&self) -> f64 {
        self.counts.recall().unwrap_or(f64::NAN)
    }
    /// Areas of the kept regions, in region order.
    pub fn areas(&self) -> Vec<u32> {
        self.areas.clone()
    }
}

impl Detection {
    pub fn counts(&self) -> SbmCounts {
        self.counts
    }
}

#[wasm_bindgen]
pub struct Demo {
    scene: Scene,
    truth: BinaryMask,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32, difficulty: &str) -> Result<Demo, JsError> {
        Self::build(seed, difficulty, None).map_err(to_js)
    }

    /// Same as the constructor but at a custom size.
    #[wasm_bindgen(js_name = "withSize")]
    pub fn with_size(seed: u32, difficulty: &str, width: u32, height: u32) -> Result<Demo, JsError> {
        Self::build(seed, difficulty, Some((width as usize, height as usize))).map_err(to_js)
    }

    pub fn width(&self) -> u32 {
        self.scene.capture.dims().map_or(0, |d| d.0 as u32)
    }

    pub fn height(&self) -> u32 {
        self.scene.capture.dims().map_or(0, |d| d.1 as u32)
    }

    #[wasm_bindgen(js_name = "captureId")]
    pub fn capture_id(&self) -> String {
        self.scene.capture.capture_id.clone()
    }

    #[wasm_bindgen(js_name = "miteCount")]
    pub fn mite_count(&self) -> u32 {
        self.scene.spec.mites.len() as u32
    }

    /// RGBA of `white`, `ir`, `turquoise`, `background-ir`, `background-turquoise` or `truth`.
    pub fn layer(&self, name: &str) -> Result<Vec<u8>, JsError> {
        self.layer_rgba(name)
            .ok_or_else(|| JsError::new(&format!("unknown layer {name:?}")))
    }

    pub fn detect(&self, params: &Params) -> Result<Detection, JsError> {
        self.run(*params).map_err(to_js)
    }

    /// Flattened `[min_area, tp, fp, fn]` rows for `min_area = 0, step, .. <= max_area`.
    pub fn sweep(&self, params: &Params, max_area: u32, step: u32) -> Result<Vec<u32>, JsError> {
        self.sweep_rows(*params, max_area, step).map_err(to_js)
    }
}

fn to_js(e: varroa_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn rgba(img: &RgbImage) -> Vec<u8> {
    img.pixels().flat_map(|[r, g, b]| [r, g, b, 255]).collect()
}

fn paint(overlay: &mut [u8], width: usize, region: &Region, color: [u8; 3]) {
    for &(x, y) in &region.pixels {
        let i = (y as usize * width + x as usize) * 4;
        overlay[i..i + 3].copy_from_slice(&color);
    }
}

impl Demo {
    pub fn build(seed: u32, difficulty: &str, dims: Option<(usize, usize)>) -> varroa_core::Result<Demo> {
        let difficulty: Difficulty = difficulty.parse()?;
        let dims = dims.unwrap_or((
            varroa_core::pipeline::NATIVE_WIDTH,
            varroa_core::pipeline::NATIVE_HEIGHT,
        ));
        let seed = u64::from(seed);
        let scene = generate_scene(&suite_spec(seed, seed, dims, difficulty))?;
        let truth = mite_mask_of(&scene.ground_truth);
        Ok(Demo { scene, truth })
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn layer_rgba(&self, name: &str) -> Option<Vec<u8>> {
        let channel = |t: &varroa_core::CaptureTriplet, c| t.channel(c).map(rgba);
        match name {
            "white" => channel(&self.scene.capture, Illumination::White),
            "ir" => channel(&self.scene.capture, Illumination::Infrared),
            "turquoise" => channel(&self.scene.capture, Illumination::Turquoise),
            "background-ir" => channel(&self.scene.background, Illumination::Infrared),
            "background-turquoise" => channel(&self.scene.background, Illumination::Turquoise),
            "truth" => Some(rgba(&varroa_core::annotations::encode_class_mask(
                &self.scene.ground_truth,
            ))),
            _ => None,
        }
    }

    pub fn run(&self, params: Params) -> varroa_core::Result<Detection> {
        let cfg = params.to_config()?;
        let result = detect_mites(&self.scene.capture, &self.scene.background, &cfg)?;
        let counts = evaluate_image(&result.mite_mask, &self.truth, cfg.min_mite_area)?;

        let width = self.truth.width();
        let mut overlay = self.layer_rgba("white").unwrap_or_default();
        let gt = connected_components(&self.truth);
        let hit = |a: &Region, b: &Region| {
            a.pixels
                .iter()
                .any(|&(x, y)| b.bbox.contains(x, y) && b.pixels.contains(&(x, y)))
        };
        for g in gt.iter().filter(|g| !result.regions.iter().any(|p| hit(p, g))) {
            paint(&mut overlay, width, g, MISSED_COLOR);
        }
        for p in &result.regions {
            let color = if gt.iter().any(|g| hit(p, g)) {
                TP_COLOR
            } else {
                FP_COLOR
            };
            paint(&mut overlay, width, p, color);
        }
        Ok(Detection {
            overlay,
            counts,
            areas: result.regions.iter().map(|r| r.area() as u32).collect(),
        })
    }

    pub fn sweep_rows(&self, params: Params, max_area: u32, step: u32) -> varroa_core::Result<Vec<u32>> {
        let cfg = PipelineConfig {
            min_mite_area: 0,
            ..params.to_config()?
        };
        let pred = detect_mites(&self.scene.capture, &self.scene.background, &cfg)?.mite_mask;
        let mut rows = Vec::new();
        for area in (0..=max_area).step_by(step.max(1) as usize) {
            let c = evaluate_image(&pred, &self.truth, area as usize)?;
            rows.extend([area, c.tp as u32, c.fp as u32, c.fn_ as u32]);
        }
        Ok(rows)
    }
}
