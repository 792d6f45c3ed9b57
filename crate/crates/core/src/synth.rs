//! Deterministic synthetic captures with exact ground truth.
//!
//! Bees are axis-aligned ellipses, mites and debris are discs, all with flat
//! levels per illumination. Each illumination receives a static texture
//! (shared by capture and background, seeded by `background_seed`) and
//! optional per-frame sensor noise. Infrared and turquoise photos are
//! neutral gray, so their luma equals the rendered level.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`), whose output is fixed by
//! its specification, with one stream per purpose:
//!
//! | stream   | seed              | use                               |
//! |----------|-------------------|-----------------------------------|
//! | 1        | `seed`            | suite layout                      |
//! | 10 + c   | `background_seed` | static texture for illumination c |
//! | 20 + c   | `seed`            | capture sensor noise              |
//! | 30 + c   | `background_seed` | background sensor noise           |
//!
//! with `c` = 0 (white), 1 (infrared), 2 (turquoise).

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::annotations::{
    write_background, write_capture, Category, ClassLabel, ClassMask, PixelBox, Treatment, YoloBox, YoloClass,
};
use crate::error::{Error, Result};
use crate::pipeline::{CaptureTriplet, Illumination, NATIVE_HEIGHT, NATIVE_WIDTH};
use crate::raster::RgbImage;

/// Minimum infrared difference between a mite and its host bee.
pub const IR_CONTRAST_FLOOR: u8 = 60;

/// Appearance of a shape under each illumination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Levels {
    pub white: [u8; 3],
    pub infrared: u8,
    pub turquoise: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeeSpec {
    pub center: (i32, i32),
    pub radii: (u32, u32),
    pub levels: Levels,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiteSpec {
    pub center: (i32, i32),
    pub radius: u32,
    pub levels: Levels,
    pub host: Option<usize>,
}

/// Foreign matter (pollen, dirt). Rendered into the capture only, never
/// part of the ground truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DebrisSpec {
    pub center: (i32, i32),
    pub radius: u32,
    pub levels: Levels,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SceneSpec {
    pub seed: u64,
    pub background_seed: u64,
    pub dims: (usize, usize),
    pub bees: Vec<BeeSpec>,
    pub mites: Vec<MiteSpec>,
    pub debris: Vec<DebrisSpec>,
    /// Amplitude of the static texture; also bounds the mite/host turquoise gap.
    pub noise_amplitude: u8,
    /// Amplitude of independent per-frame noise.
    pub sensor_noise: u8,
    pub background_level: Levels,
}

impl SceneSpec {
    pub fn empty(seed: u64, dims: (usize, usize)) -> Self {
        Self {
            seed,
            background_seed: seed,
            dims,
            bees: Vec::new(),
            mites: Vec::new(),
            debris: Vec::new(),
            noise_amplitude: 0,
            sensor_noise: 0,
            background_level: Levels {
                white: [70, 75, 80],
                infrared: 40,
                turquoise: 50,
            },
        }
    }

    pub fn capture_id(&self) -> String {
        format!("synth_{:06}", self.seed)
    }

    pub fn background_id(&self) -> String {
        format!("background_{:06}", self.background_seed)
    }

    pub fn validate(&self) -> Result<()> {
        let (w, h) = self.dims;
        if w == 0 || h == 0 {
            return Err(Error::Spec(format!("empty scene {w}x{h}")));
        }
        let inside = |(x, y): (i32, i32)| x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h;
        for (i, b) in self.bees.iter().enumerate() {
            if !inside(b.center) || b.radii.0 == 0 || b.radii.1 == 0 {
                return Err(Error::Spec(format!(
                    "bee {i} at {:?} radii {:?} does not fit",
                    b.center, b.radii
                )));
            }
        }
        for (i, m) in self.mites.iter().enumerate() {
            if !inside(m.center) || m.radius == 0 {
                return Err(Error::Spec(format!(
                    "mite {i} at {:?} radius {} does not fit",
                    m.center, m.radius
                )));
            }
            if let Some(host) = m.host {
                let bee = self
                    .bees
                    .get(host)
                    .ok_or_else(|| Error::Spec(format!("mite {i} names missing host bee {host}")))?;
                if m.levels.turquoise.abs_diff(bee.levels.turquoise) > self.noise_amplitude {
                    return Err(Error::Spec(format!(
                        "mite {i} turquoise level {} is not within {} of its host's {}",
                        m.levels.turquoise, self.noise_amplitude, bee.levels.turquoise
                    )));
                }
                if m.levels.infrared.abs_diff(bee.levels.infrared) < IR_CONTRAST_FLOOR {
                    return Err(Error::Spec(format!(
                        "mite {i} infrared level {} is within {IR_CONTRAST_FLOOR} of its host's {}",
                        m.levels.infrared, bee.levels.infrared
                    )));
                }
            }
        }
        for (i, d) in self.debris.iter().enumerate() {
            if !inside(d.center) || d.radius == 0 {
                return Err(Error::Spec(format!("debris {i} does not fit")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scene {
    pub spec: SceneSpec,
    pub capture: CaptureTriplet,
    pub background: CaptureTriplet,
    pub ground_truth: ClassMask,
}

impl Scene {
    pub fn category(&self) -> Category {
        if self.spec.mites.is_empty() {
            Category::Bee
        } else if self.spec.bees.is_empty() {
            Category::Mite
        } else {
            Category::BeeWithMite
        }
    }

    /// Tight boxes of every bee and mite footprint, clipped to the image.
    pub fn yolo_boxes(&self) -> Vec<YoloBox> {
        let dims = self.spec.dims;
        let clip = |(cx, cy): (i32, i32), (rx, ry): (u32, u32)| {
            let (w, h) = (dims.0 as i64, dims.1 as i64);
            let (cx, cy, rx, ry) = (cx as i64, cy as i64, rx as i64, ry as i64);
            PixelBox {
                x_min: (cx - rx).clamp(0, w) as u32,
                y_min: (cy - ry).clamp(0, h) as u32,
                x_max: (cx + rx + 1).clamp(0, w) as u32,
                y_max: (cy + ry + 1).clamp(0, h) as u32,
            }
        };
        let bees = self
            .spec
            .bees
            .iter()
            .map(|b| YoloBox::from_pixels(YoloClass::Bee, clip(b.center, b.radii), dims));
        let mites = self
            .spec
            .mites
            .iter()
            .map(|m| YoloBox::from_pixels(YoloClass::Mite, clip(m.center, (m.radius, m.radius)), dims));
        bees.chain(mites).collect()
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Calls `f(x, y)` for every in-bounds pixel of the ellipse.
fn for_each_in_ellipse(
    dims: (usize, usize),
    (cx, cy): (i32, i32),
    (rx, ry): (u32, u32),
    mut f: impl FnMut(usize, usize),
) {
    let (rx, ry) = (i64::from(rx), i64::from(ry));
    let (cx, cy) = (i64::from(cx), i64::from(cy));
    let limit = rx * rx * ry * ry;
    let y0 = (cy - ry).max(0);
    let y1 = (cy + ry).min(dims.1 as i64 - 1);
    let x0 = (cx - rx).max(0);
    let x1 = (cx + rx).min(dims.0 as i64 - 1);
    for y in y0..=y1 {
        let dy = y - cy;
        for x in x0..=x1 {
            let dx = x - cx;
            if dx * dx * ry * ry + dy * dy * rx * rx <= limit {
                f(x as usize, y as usize);
            }
        }
    }
}

struct Layers {
    white: Vec<[u8; 3]>,
    infrared: Vec<u8>,
    turquoise: Vec<u8>,
}

impl Layers {
    fn new(n: usize, l: Levels) -> Self {
        Self {
            white: vec![l.white; n],
            infrared: vec![l.infrared; n],
            turquoise: vec![l.turquoise; n],
        }
    }

    fn paint(&mut self, i: usize, l: Levels) {
        self.white[i] = l.white;
        self.infrared[i] = l.infrared;
        self.turquoise[i] = l.turquoise;
    }

    fn render(self, spec: &SceneSpec, id: String, frame_seed: u64, frame_stream: u64) -> Result<CaptureTriplet> {
        let (w, h) = spec.dims;
        let n = w * h;
        let static_amp = i32::from(spec.noise_amplitude);
        let sensor_amp = i32::from(spec.sensor_noise);
        let noise = |c: u64| -> Vec<i32> {
            let mut out = vec![0i32; n];
            if static_amp > 0 {
                let mut rng = stream_rng(spec.background_seed, 10 + c);
                out.iter_mut()
                    .for_each(|v| *v += rng.gen_range(-static_amp..=static_amp));
            }
            if sensor_amp > 0 {
                let mut rng = stream_rng(frame_seed, frame_stream + c);
                out.iter_mut()
                    .for_each(|v| *v += rng.gen_range(-sensor_amp..=sensor_amp));
            }
            out
        };
        let add = |v: u8, d: i32| (i32::from(v) + d).clamp(0, 255) as u8;

        let nw = noise(0);
        let white_data = self
            .white
            .iter()
            .zip(&nw)
            .flat_map(|(rgb, &d)| rgb.map(|v| add(v, d)))
            .collect();
        let gray = |layer: &[u8], c: u64| -> Vec<u8> {
            layer
                .iter()
                .zip(noise(c))
                .flat_map(|(&v, d)| {
                    let g = add(v, d);
                    [g, g, g]
                })
                .collect()
        };
        let ir_data = gray(&self.infrared, 1);
        let tq_data = gray(&self.turquoise, 2);
        CaptureTriplet::new(
            id,
            RgbImage::new(w, h, white_data)?,
            RgbImage::new(w, h, ir_data)?,
            RgbImage::new(w, h, tq_data)?,
        )
    }
}

/// Renders the capture, its matching background and the class mask.
pub fn generate_scene(spec: &SceneSpec) -> Result<Scene> {
    spec.validate()?;
    let (w, h) = spec.dims;
    let mut layers = Layers::new(w * h, spec.background_level);
    let mut gt = ClassMask::filled(w, h, ClassLabel::Background)?;

    for bee in &spec.bees {
        for_each_in_ellipse(spec.dims, bee.center, bee.radii, |x, y| {
            layers.paint(y * w + x, bee.levels);
            gt.set(x, y, ClassLabel::Bee);
        });
    }
    for mite in &spec.mites {
        for_each_in_ellipse(spec.dims, mite.center, (mite.radius, mite.radius), |x, y| {
            layers.paint(y * w + x, mite.levels);
            gt.set(x, y, ClassLabel::Mite);
        });
    }
    for d in &spec.debris {
        for_each_in_ellipse(spec.dims, d.center, (d.radius, d.radius), |x, y| {
            layers.paint(y * w + x, d.levels);
        });
    }

    let capture = layers.render(spec, spec.capture_id(), spec.seed, 20)?;
    let background =
        Layers::new(w * h, spec.background_level).render(spec, spec.background_id(), spec.background_seed, 30)?;
    Ok(Scene {
        spec: spec.clone(),
        capture,
        background,
        ground_truth: gt,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Difficulty {
    /// Separated bees, mites of radius 3..=5, no sensor noise or debris.
    Clean,
    /// Adds sensor noise, pollen-like debris and mites down to radius 2.
    Noisy,
    /// Many possibly overlapping bees, several mites each, some without a host.
    Crowded,
}

impl std::str::FromStr for Difficulty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "clean" => Ok(Difficulty::Clean),
            "noisy" => Ok(Difficulty::Noisy),
            "crowded" => Ok(Difficulty::Crowded),
            other => Err(Error::Parameter(format!("unknown difficulty {other:?}"))),
        }
    }
}

impl std::fmt::Display for Difficulty {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Difficulty::Clean => "clean",
            Difficulty::Noisy => "noisy",
            Difficulty::Crowded => "crowded",
        })
    }
}

struct Params {
    bees: (u32, u32),
    mites_per_bee: (u32, u32),
    free_mites: (u32, u32),
    mite_radius: (u32, u32),
    debris: (u32, u32),
    sensor_noise: u8,
    separate_bees: bool,
}

impl Difficulty {
    fn params(self) -> Params {
        match self {
            Difficulty::Clean => Params {
                bees: (1, 3),
                mites_per_bee: (0, 2),
                free_mites: (0, 0),
                mite_radius: (3, 5),
                debris: (0, 0),
                sensor_noise: 0,
                separate_bees: true,
            },
            Difficulty::Noisy => Params {
                bees: (1, 3),
                mites_per_bee: (0, 2),
                free_mites: (0, 0),
                mite_radius: (2, 5),
                debris: (3, 8),
                sensor_noise: 14,
                separate_bees: true,
            },
            Difficulty::Crowded => Params {
                bees: (4, 6),
                mites_per_bee: (1, 3),
                free_mites: (0, 2),
                mite_radius: (2, 5),
                debris: (0, 2),
                sensor_noise: 6,
                separate_bees: false,
            },
        }
    }
}

/// Static texture amplitude used by generated suites.
pub const SUITE_NOISE_AMPLITUDE: u8 = 4;

fn far_enough(c: (i32, i32), r: u32, others: &[((i32, i32), u32)]) -> bool {
    others.iter().all(|&((x, y), ro)| {
        let (dx, dy) = (i64::from(c.0 - x), i64::from(c.1 - y));
        let min = i64::from(r + ro + 4);
        dx * dx + dy * dy >= min * min
    })
}

/// Builds the layout for one suite scene from its seed.
pub fn suite_spec(seed: u64, background_seed: u64, dims: (usize, usize), difficulty: Difficulty) -> SceneSpec {
    let p = difficulty.params();
    let mut rng = stream_rng(seed, 1);
    let (w, h) = (dims.0 as i32, dims.1 as i32);
    let mut spec = SceneSpec::empty(seed, dims);
    spec.background_seed = background_seed;
    spec.noise_amplitude = SUITE_NOISE_AMPLITUDE;
    spec.sensor_noise = p.sensor_noise;
    let bg = spec.background_level;
    let amp = i32::from(spec.noise_amplitude);

    let n_bees = rng.gen_range(p.bees.0..=p.bees.1);
    let max_rx = ((w / 3 / 2) - 8).clamp(4, 110) as u32;
    let max_ry = ((h / 2) - 8).clamp(4, 65) as u32;
    for i in 0..n_bees {
        let rx = rng.gen_range(max_rx * 6 / 10..=max_rx);
        let ry = rng.gen_range(max_ry * 6 / 10..=max_ry);
        let (rxi, ryi) = (rx as i32, ry as i32);
        let cx = if p.separate_bees {
            let slot = w / 3;
            let base = slot * i as i32 + slot / 2;
            let jitter = (slot / 2 - rxi - 4).max(0);
            base + rng.gen_range(-jitter..=jitter)
        } else {
            rng.gen_range(0..w)
        };
        let cy = if ryi + 5 < h - ryi - 5 {
            rng.gen_range(ryi + 5..h - ryi - 5)
        } else {
            h / 2
        };
        let levels = Levels {
            white: [
                rng.gen_range(180..=205),
                rng.gen_range(140..=160),
                rng.gen_range(50..=70),
            ],
            infrared: rng.gen_range(200..=220),
            turquoise: rng.gen_range(130..=150),
        };
        spec.bees.push(BeeSpec {
            center: (cx.clamp(0, w - 1), cy.clamp(0, h - 1)),
            radii: (rx, ry),
            levels,
        });
    }

    let mut placed: Vec<((i32, i32), u32)> = Vec::new();
    let mite_levels = |rng: &mut ChaCha8Rng, tq: u8| Levels {
        white: [rng.gen_range(100..=120), rng.gen_range(45..=60), rng.gen_range(25..=40)],
        infrared: bg.infrared + rng.gen_range(0..=15),
        turquoise: (i32::from(tq) + rng.gen_range(-amp..=amp)).clamp(0, 255) as u8,
    };
    for host in 0..spec.bees.len() {
        let bee = spec.bees[host].clone();
        let count = rng.gen_range(p.mites_per_bee.0..=p.mites_per_bee.1);
        for _ in 0..count {
            let r = rng.gen_range(p.mite_radius.0..=p.mite_radius.1);
            for _attempt in 0..50 {
                let (rx, ry) = (bee.radii.0 as i32, bee.radii.1 as i32);
                let dx = rng.gen_range(-rx..=rx);
                let dy = rng.gen_range(-ry..=ry);
                // Keep the whole disc plus a margin inside the host ellipse.
                let m = r as i32 + 2;
                let (ax, ay) = (i64::from(dx.abs() + m), i64::from(dy.abs() + m));
                let (rx2, ry2) = (i64::from(rx) * i64::from(rx), i64::from(ry) * i64::from(ry));
                if ax * ax * ry2 + ay * ay * rx2 > rx2 * ry2 {
                    continue;
                }
                let c = (bee.center.0 + dx, bee.center.1 + dy);
                if c.0 < 0 || c.1 < 0 || c.0 >= w || c.1 >= h || !far_enough(c, r, &placed) {
                    continue;
                }
                placed.push((c, r));
                let levels = mite_levels(&mut rng, bee.levels.turquoise);
                spec.mites.push(MiteSpec {
                    center: c,
                    radius: r,
                    levels,
                    host: Some(host),
                });
                break;
            }
        }
    }
    let free = rng.gen_range(p.free_mites.0..=p.free_mites.1);
    for _ in 0..free {
        let r = rng.gen_range(p.mite_radius.0..=p.mite_radius.1);
        for _attempt in 0..50 {
            let c = (rng.gen_range(8..w - 8), rng.gen_range(8..h - 8));
            if !far_enough(c, r, &placed) {
                continue;
            }
            placed.push((c, r));
            let tq = rng.gen_range(130..=150);
            let levels = mite_levels(&mut rng, tq);
            spec.mites.push(MiteSpec {
                center: c,
                radius: r,
                levels,
                host: None,
            });
            break;
        }
    }

    let n_debris = rng.gen_range(p.debris.0..=p.debris.1);
    for _ in 0..n_debris {
        let r = rng.gen_range(1..=4u32);
        for _attempt in 0..50 {
            let c = (rng.gen_range(6..w - 6), rng.gen_range(6..h - 6));
            if !far_enough(c, r, &placed) {
                continue;
            }
            placed.push((c, r));
            spec.debris.push(DebrisSpec {
                center: c,
                radius: r,
                levels: Levels {
                    white: [
                        rng.gen_range(200..=230),
                        rng.gen_range(190..=215),
                        rng.gen_range(90..=120),
                    ],
                    infrared: bg.infrared + rng.gen_range(0..=15),
                    turquoise: rng.gen_range(120..=150),
                },
            });
            break;
        }
    }
    spec
}

/// `n` native-size scenes with seeds `base_seed..base_seed + n`, all sharing
/// the background seeded by `base_seed`.
pub fn generate_suite(n: usize, base_seed: u64, difficulty: Difficulty) -> Result<Vec<Scene>> {
    generate_suite_with_dims(n, base_seed, difficulty, (NATIVE_WIDTH, NATIVE_HEIGHT))
}

pub fn generate_suite_with_dims(
    n: usize,
    base_seed: u64,
    difficulty: Difficulty,
    dims: (usize, usize),
) -> Result<Vec<Scene>> {
    if dims.0 < 64 || dims.1 < 32 {
        return Err(Error::Spec(format!(
            "suite scenes need at least 64x32, got {}x{}",
            dims.0, dims.1
        )));
    }
    (0..n as u64)
        .map(|i| generate_scene(&suite_spec(base_seed.wrapping_add(i), base_seed, dims, difficulty)))
        .collect()
}

/// Writes scenes (and each distinct background once) in the dataset layout.
pub fn export_scenes(root: &Path, scenes: &[Scene]) -> Result<()> {
    let mut written = std::collections::BTreeSet::new();
    for scene in scenes {
        if written.insert(scene.background.capture_id.clone()) {
            write_background(root, &scene.background)?;
        }
        write_capture(
            root,
            Treatment::Before,
            scene.category(),
            &scene.capture,
            Some(&scene.ground_truth),
            &scene.yolo_boxes(),
        )?;
    }
    Ok(())
}

/// Gray level of one illumination at a pixel, for tests and the demo.
pub fn level_at(triplet: &CaptureTriplet, which: Illumination, x: usize, y: usize) -> Option<u8> {
    triplet.channel(which).map(|img| crate::raster::luma(img.get(x, y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotations::mite_mask_of;
    use crate::components::connected_components;

    /// Lattice points of a radius-r disc, counted column by column.
    fn disc_area(r: u32) -> usize {
        let r = i64::from(r);
        (-r..=r)
            .map(|dx| {
                let mut k = 0;
                while (k + 1) * (k + 1) <= r * r - dx * dx {
                    k += 1;
                }
                (2 * k + 1) as usize
            })
            .sum()
    }

    fn one_bee_one_mite(seed: u64) -> SceneSpec {
        let mut spec = SceneSpec::empty(seed, (120, 60));
        spec.noise_amplitude = 4;
        spec.bees.push(BeeSpec {
            center: (60, 30),
            radii: (40, 20),
            levels: Levels {
                white: [190, 150, 60],
                infrared: 210,
                turquoise: 140,
            },
        });
        spec.mites.push(MiteSpec {
            center: (55, 28),
            radius: 4,
            levels: Levels {
                white: [110, 50, 30],
                infrared: 48,
                turquoise: 142,
            },
            host: Some(0),
        });
        spec
    }

    #[test]
    fn empty_spec_is_all_background() {
        let s = generate_scene(&SceneSpec::empty(1, (30, 20))).unwrap();
        assert_eq!(s.ground_truth.count(ClassLabel::Background), 600);
        assert_eq!(s.capture.infrared, s.background.infrared);
    }

    #[test]
    fn same_seed_same_scene() {
        let a = generate_scene(&one_bee_one_mite(7)).unwrap();
        let b = generate_scene(&one_bee_one_mite(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bee_with_mite_ground_truth() {
        let s = generate_scene(&one_bee_one_mite(3)).unwrap();
        assert_eq!(s.ground_truth.count(ClassLabel::Mite), disc_area(4));
        assert_eq!(disc_area(4), 49);
        assert_eq!(disc_area(3), 29);
        let mites = connected_components(&mite_mask_of(&s.ground_truth));
        assert_eq!(mites.len(), 1);
        // Bee plus mite form one non-background blob; the mite is a hole in the bee class.
        let bee_or_mite = crate::raster::BinaryMask::new(
            120,
            60,
            s.ground_truth
                .labels()
                .iter()
                .map(|&l| l != ClassLabel::Background)
                .collect(),
        )
        .unwrap();
        assert_eq!(connected_components(&bee_or_mite).len(), 1);
        assert_eq!(s.category(), Category::BeeWithMite);
    }

    #[test]
    fn spectral_contract_on_rendered_pixels() {
        let spec = one_bee_one_mite(11);
        let s = generate_scene(&spec).unwrap();
        let (bee, mite) = (&spec.bees[0], &spec.mites[0]);
        for y in 0..60 {
            for x in 0..120 {
                if s.ground_truth.get(x, y) != ClassLabel::Mite {
                    continue;
                }
                let d = |c| {
                    i32::from(level_at(&s.capture, c, x, y).unwrap())
                        - i32::from(level_at(&s.background, c, x, y).unwrap())
                };
                let bee_tq = i32::from(bee.levels.turquoise) - i32::from(spec.background_level.turquoise);
                assert!((d(Illumination::Turquoise) - bee_tq).abs() <= i32::from(spec.noise_amplitude));
                let bee_ir = i32::from(bee.levels.infrared) - i32::from(spec.background_level.infrared);
                assert!((d(Illumination::Infrared) - bee_ir).abs() >= i32::from(IR_CONTRAST_FLOOR));
                assert_eq!(d(Illumination::Infrared), i32::from(mite.levels.infrared) - 40);
            }
        }
    }

    #[test]
    fn spec_errors() {
        let mut spec = one_bee_one_mite(1);
        spec.mites[0].center = (500, 10);
        assert!(matches!(generate_scene(&spec), Err(Error::Spec(_))));

        let mut spec = one_bee_one_mite(1);
        spec.mites[0].levels.turquoise = 100;
        assert!(matches!(generate_scene(&spec), Err(Error::Spec(_))));

        let mut spec = one_bee_one_mite(1);
        spec.mites[0].levels.infrared = 200;
        assert!(matches!(generate_scene(&spec), Err(Error::Spec(_))));

        let mut spec = one_bee_one_mite(1);
        spec.mites[0].host = Some(4);
        assert!(generate_scene(&spec).is_err());
    }

    #[test]
    fn suites() {
        assert!(generate_suite(0, 5, Difficulty::Clean).unwrap().is_empty());
        let a = generate_suite_with_dims(3, 100, Difficulty::Noisy, (300, 100)).unwrap();
        let b = generate_suite_with_dims(3, 103, Difficulty::Noisy, (300, 100)).unwrap();
        for s in &a {
            assert!(b.iter().all(|t| t.capture != s.capture));
        }
        assert_eq!(a[0].background, a[2].background);
        let seeds: Vec<u64> = a.iter().map(|s| s.spec.seed).collect();
        assert_eq!(seeds, vec![100, 101, 102]);
    }

    #[test]
    fn suite_mites_are_separate_components() {
        for difficulty in [Difficulty::Clean, Difficulty::Noisy, Difficulty::Crowded] {
            for s in generate_suite(4, 42, difficulty).unwrap() {
                let n = connected_components(&mite_mask_of(&s.ground_truth)).len();
                assert_eq!(n, s.spec.mites.len(), "{difficulty} seed {}", s.spec.seed);
            }
        }
    }

    #[test]
    fn yolo_boxes_cover_shapes() {
        let s = generate_scene(&one_bee_one_mite(2)).unwrap();
        let boxes = s.yolo_boxes();
        assert_eq!(boxes.len(), 2);
        let mite = boxes[1].to_pixels((120, 60));
        assert_eq!((mite.x_min, mite.x_max, mite.y_min, mite.y_max), (51, 60, 24, 33));
    }
}
