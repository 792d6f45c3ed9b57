//! Ground-truth formats: RGB class masks, YOLO boxes and the on-disk
//! dataset layout.
//!
//! Canonical layout, relative to the dataset root:
//!
//! ```text
//! <treatment>/<category>/<capture_id>/white.png
//!                                    /ir.png
//!                                    /turquoise.png
//!                                    /mask.png       RGB class mask
//!                                    /boxes.txt      YOLO boxes
//! background/<capture_id>/{white,ir,turquoise}.png
//! ```
//!
//! `treatment` is `before` or `after`; `category` is `mite`, `bee` or
//! `bee_with_mite`. A `manifest.txt` at the root replaces directory
//! discovery; see [`parse_manifest`].

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::io;
use crate::pipeline::{CaptureTriplet, Illumination};
use crate::raster::{BinaryMask, RgbImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassLabel {
    Background,
    Bee,
    Mite,
}

impl ClassLabel {
    pub fn color(self) -> [u8; 3] {
        match self {
            ClassLabel::Background => [0, 0, 255],
            ClassLabel::Bee => [0, 255, 0],
            ClassLabel::Mite => [255, 0, 0],
        }
    }
}

/// Channel argmax, red = mite, green = bee, blue = background. Ties go to
/// the rarer class (mite, then bee); a black pixel is background.
pub fn classify_pixel([r, g, b]: [u8; 3]) -> ClassLabel {
    if r == 0 && g == 0 && b == 0 {
        ClassLabel::Background
    } else if r >= g && r >= b {
        ClassLabel::Mite
    } else if g >= b {
        ClassLabel::Bee
    } else {
        ClassLabel::Background
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassMask {
    width: usize,
    height: usize,
    labels: Vec<ClassLabel>,
}

impl ClassMask {
    pub fn new(width: usize, height: usize, labels: Vec<ClassLabel>) -> Result<Self> {
        if width == 0 || height == 0 || labels.len() != width * height {
            return Err(Error::Dimension(format!(
                "class mask {width}x{height} with {} labels",
                labels.len()
            )));
        }
        Ok(Self { width, height, labels })
    }

    pub fn filled(width: usize, height: usize, label: ClassLabel) -> Result<Self> {
        Self::new(width, height, vec![label; width * height])
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn get(&self, x: usize, y: usize) -> ClassLabel {
        self.labels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, label: ClassLabel) {
        self.labels[y * self.width + x] = label;
    }

    pub fn count(&self, label: ClassLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

pub fn decode_class_mask(image: &RgbImage) -> Result<ClassMask> {
    ClassMask::new(
        image.width(),
        image.height(),
        image.pixels().map(classify_pixel).collect(),
    )
}

pub fn encode_class_mask(mask: &ClassMask) -> RgbImage {
    let data = mask.labels.iter().flat_map(|l| l.color()).collect();
    RgbImage::new(mask.width, mask.height, data).expect("class mask dimensions are valid")
}

pub fn mite_mask_of(mask: &ClassMask) -> BinaryMask {
    let data = mask.labels.iter().map(|&l| l == ClassLabel::Mite).collect();
    BinaryMask::new(mask.width, mask.height, data).expect("class mask dimensions are valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum YoloClass {
    Bee = 0,
    Mite = 1,
}

/// Normalised YOLO box: centre and size as fractions of the image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YoloBox {
    pub class: YoloClass,
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

/// Half-open pixel rectangle `[x_min, x_max) x [y_min, y_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PixelBox {
    pub x_min: u32,
    pub y_min: u32,
    pub x_max: u32,
    pub y_max: u32,
}

impl PixelBox {
    pub fn width(&self) -> u32 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> u32 {
        self.y_max - self.y_min
    }
}

impl YoloBox {
    pub fn validate(&self) -> std::result::Result<(), String> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !unit(self.cx) || !unit(self.cy) {
            return Err(format!("centre ({}, {}) outside [0, 1]", self.cx, self.cy));
        }
        if !(self.w > 0.0 && self.w <= 1.0 && self.h > 0.0 && self.h <= 1.0) {
            return Err(format!("size ({}, {}) outside (0, 1]", self.w, self.h));
        }
        Ok(())
    }

    /// Rounded pixel rectangle, clamped to the image.
    pub fn to_pixels(&self, (width, height): (usize, usize)) -> PixelBox {
        let (wf, hf) = (width as f64, height as f64);
        let px = |v: f64, max: f64| (v.round().clamp(0.0, max)) as u32;
        PixelBox {
            x_min: px((self.cx - self.w / 2.0) * wf, wf),
            y_min: px((self.cy - self.h / 2.0) * hf, hf),
            x_max: px((self.cx + self.w / 2.0) * wf, wf),
            y_max: px((self.cy + self.h / 2.0) * hf, hf),
        }
    }

    pub fn from_pixels(class: YoloClass, b: PixelBox, (width, height): (usize, usize)) -> Self {
        let (wf, hf) = (width as f64, height as f64);
        YoloBox {
            class,
            cx: (b.x_min + b.x_max) as f64 / 2.0 / wf,
            cy: (b.y_min + b.y_max) as f64 / 2.0 / hf,
            w: b.width() as f64 / wf,
            h: b.height() as f64 / hf,
        }
    }
}

impl fmt::Display for YoloBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:.6} {:.6} {:.6} {:.6}",
            self.class as u8, self.cx, self.cy, self.w, self.h
        )
    }
}

/// Parses `class cx cy w h`. `line_no` is reported in errors.
pub fn parse_yolo_line(line: &str, image_dims: (usize, usize), line_no: usize) -> Result<(YoloBox, PixelBox)> {
    let err = |message: String| Error::Parse { line: line_no, message };
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 5 {
        return Err(err(format!("expected 5 fields, got {}", fields.len())));
    }
    let class = match fields[0] {
        "0" => YoloClass::Bee,
        "1" => YoloClass::Mite,
        other => return Err(err(format!("unknown class {other:?}"))),
    };
    let mut nums = [0f64; 4];
    for (slot, s) in nums.iter_mut().zip(&fields[1..]) {
        *slot = s.parse().map_err(|_| err(format!("not a number: {s:?}")))?;
    }
    let [cx, cy, w, h] = nums;
    let b = YoloBox { class, cx, cy, w, h };
    b.validate().map_err(err)?;
    Ok((b, b.to_pixels(image_dims)))
}

/// Parses a whole file; blank lines are skipped.
pub fn parse_yolo_file(text: &str, image_dims: (usize, usize)) -> Result<Vec<(YoloBox, PixelBox)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_yolo_line(l, image_dims, i + 1))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Treatment {
    Before,
    After,
}

impl Treatment {
    pub const ALL: [Treatment; 2] = [Treatment::Before, Treatment::After];

    pub fn dir_name(self) -> &'static str {
        match self {
            Treatment::Before => "before",
            Treatment::After => "after",
        }
    }
}

impl FromStr for Treatment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Treatment::ALL
            .into_iter()
            .find(|t| t.dir_name() == s)
            .ok_or_else(|| Error::Input(format!("unknown treatment {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Mite,
    Bee,
    BeeWithMite,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Mite, Category::Bee, Category::BeeWithMite];

    pub fn dir_name(self) -> &'static str {
        match self {
            Category::Mite => "mite",
            Category::Bee => "bee",
            Category::BeeWithMite => "bee_with_mite",
        }
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Category::ALL
            .into_iter()
            .find(|c| c.dir_name() == s)
            .ok_or_else(|| Error::Input(format!("unknown category {s:?}")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PhotoPaths {
    pub white: Option<PathBuf>,
    pub infrared: Option<PathBuf>,
    pub turquoise: Option<PathBuf>,
}

impl PhotoPaths {
    pub fn get(&self, which: Illumination) -> Option<&Path> {
        match which {
            Illumination::White => self.white.as_deref(),
            Illumination::Infrared => self.infrared.as_deref(),
            Illumination::Turquoise => self.turquoise.as_deref(),
        }
    }

    fn slot(&mut self, which: Illumination) -> &mut Option<PathBuf> {
        match which {
            Illumination::White => &mut self.white,
            Illumination::Infrared => &mut self.infrared,
            Illumination::Turquoise => &mut self.turquoise,
        }
    }

    pub fn is_complete(&self) -> bool {
        Illumination::ALL.iter().all(|&c| self.get(c).is_some())
    }

    /// Reads whichever photos are present.
    pub fn load(&self, capture_id: &str) -> Result<CaptureTriplet> {
        let read = |c| self.get(c).map(io::read_rgb).transpose();
        CaptureTriplet::partial(
            capture_id,
            read(Illumination::White)?,
            read(Illumination::Infrared)?,
            read(Illumination::Turquoise)?,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetEntry {
    pub capture_id: String,
    pub treatment: Treatment,
    pub category: Category,
    pub photos: PhotoPaths,
    /// One mask per capture, shared by all illuminations.
    pub mask: Option<PathBuf>,
    pub boxes: Option<PathBuf>,
}

impl DatasetEntry {
    pub fn load_capture(&self) -> Result<CaptureTriplet> {
        self.photos.load(&self.capture_id)
    }

    pub fn load_class_mask(&self) -> Result<ClassMask> {
        let path = self
            .mask
            .as_ref()
            .ok_or_else(|| Error::Input(format!("capture {} has no mask", self.capture_id)))?;
        decode_class_mask(&io::read_rgb(path)?)
    }

    pub fn load_boxes(&self, image_dims: (usize, usize)) -> Result<Vec<(YoloBox, PixelBox)>> {
        match &self.boxes {
            Some(p) => parse_yolo_file(&fs::read_to_string(p).map_err(|e| Error::io(p, e))?, image_dims),
            None => Ok(Vec::new()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackgroundEntry {
    pub capture_id: String,
    pub photos: PhotoPaths,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IssueLevel {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetIssue {
    pub capture_id: String,
    pub level: IssueLevel,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DatasetIndex {
    /// Sorted by capture id.
    pub entries: Vec<DatasetEntry>,
    pub backgrounds: Vec<BackgroundEntry>,
    pub issues: Vec<DatasetIssue>,
}

impl DatasetIndex {
    pub fn counts(&self) -> BTreeMap<(Treatment, Category), usize> {
        let mut out = BTreeMap::new();
        for t in Treatment::ALL {
            for c in Category::ALL {
                out.insert((t, c), 0);
            }
        }
        for e in &self.entries {
            *out.entry((e.treatment, e.category)).or_default() += 1;
        }
        out
    }

    pub fn entry(&self, capture_id: &str) -> Option<&DatasetEntry> {
        self.entries
            .binary_search_by(|e| e.capture_id.as_str().cmp(capture_id))
            .ok()
            .map(|i| &self.entries[i])
    }

    /// Looks up a background capture, falling back to regular entries.
    pub fn background_photos(&self, capture_id: &str) -> Option<&PhotoPaths> {
        self.backgrounds
            .iter()
            .find(|b| b.capture_id == capture_id)
            .map(|b| &b.photos)
            .or_else(|| self.entry(capture_id).map(|e| &e.photos))
    }

    pub fn errors(&self) -> impl Iterator<Item = &DatasetIssue> {
        self.issues.iter().filter(|i| i.level == IssueLevel::Error)
    }
}

pub const MANIFEST_FILE: &str = "manifest.txt";
pub const BACKGROUND_DIR: &str = "background";
pub const MASK_FILE: &str = "mask.png";
pub const BOXES_FILE: &str = "boxes.txt";

fn photo_file(c: Illumination) -> String {
    format!("{}.png", c.file_stem())
}

fn sorted_subdirs(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_dir() {
            out.push((entry.file_name().to_string_lossy().into_owned(), path));
        }
    }
    out.sort();
    Ok(out)
}

fn existing(path: PathBuf) -> Option<PathBuf> {
    path.is_file().then_some(path)
}

struct Collector {
    index: DatasetIndex,
}

impl Collector {
    fn issue(&mut self, capture_id: &str, level: IssueLevel, message: String) {
        self.index.issues.push(DatasetIssue {
            capture_id: capture_id.to_string(),
            level,
            message,
        });
    }

    fn check_photos(&mut self, capture_id: &str, photos: &mut PhotoPaths) {
        for c in Illumination::ALL {
            let slot = photos.slot(c);
            match slot.take() {
                Some(p) if p.is_file() => *slot = Some(p),
                Some(p) => self.issue(
                    capture_id,
                    IssueLevel::Warning,
                    format!("missing {} image {}", c.file_stem(), p.display()),
                ),
                None => self.issue(
                    capture_id,
                    IssueLevel::Warning,
                    format!("missing {} image", c.file_stem()),
                ),
            }
        }
    }

    fn check_mask(&mut self, capture_id: &str, mask: Option<PathBuf>) -> Option<PathBuf> {
        let path = match mask {
            Some(p) if p.is_file() => p,
            Some(p) => {
                self.issue(capture_id, IssueLevel::Warning, format!("missing mask {}", p.display()));
                return None;
            }
            None => {
                self.issue(capture_id, IssueLevel::Warning, "missing mask".into());
                return None;
            }
        };
        match io::probe(&path) {
            Ok(_) => Some(path),
            Err(e) => {
                self.issue(capture_id, IssueLevel::Error, format!("unreadable mask: {e}"));
                None
            }
        }
    }

    fn add_capture(
        &mut self,
        capture_id: String,
        treatment: Treatment,
        category: Category,
        mut photos: PhotoPaths,
        mask: Option<PathBuf>,
        boxes: Option<PathBuf>,
    ) {
        self.check_photos(&capture_id, &mut photos);
        let mask = self.check_mask(&capture_id, mask);
        let boxes = boxes.filter(|p| {
            let ok = p.is_file();
            if !ok {
                self.issue(
                    &capture_id,
                    IssueLevel::Warning,
                    format!("missing boxes {}", p.display()),
                );
            }
            ok
        });
        self.index.entries.push(DatasetEntry {
            capture_id,
            treatment,
            category,
            photos,
            mask,
            boxes,
        });
    }

    fn add_background(&mut self, capture_id: String, mut photos: PhotoPaths) {
        self.check_photos(&capture_id, &mut photos);
        self.index.backgrounds.push(BackgroundEntry { capture_id, photos });
    }

    fn finish(mut self) -> Result<DatasetIndex> {
        self.index.entries.sort_by(|a, b| a.capture_id.cmp(&b.capture_id));
        self.index.backgrounds.sort_by(|a, b| a.capture_id.cmp(&b.capture_id));
        let mut seen = HashSet::new();
        for id in self
            .index
            .entries
            .iter()
            .map(|e| &e.capture_id)
            .chain(self.index.backgrounds.iter().map(|b| &b.capture_id))
        {
            if !seen.insert(id.as_str()) {
                return Err(Error::Input(format!("duplicate capture id {id:?}")));
            }
        }
        Ok(self.index)
    }
}

fn layout_photos(dir: &Path) -> PhotoPaths {
    PhotoPaths {
        white: Some(dir.join(photo_file(Illumination::White))),
        infrared: Some(dir.join(photo_file(Illumination::Infrared))),
        turquoise: Some(dir.join(photo_file(Illumination::Turquoise))),
    }
}

/// Indexes a dataset tree, or the manifest at its root when present.
pub fn load_dataset(root: impl AsRef<Path>) -> Result<DatasetIndex> {
    let root = root.as_ref();
    if !root.is_dir() {
        return Err(Error::Input(format!("{} is not a directory", root.display())));
    }
    let mut col = Collector {
        index: DatasetIndex::default(),
    };
    let manifest = root.join(MANIFEST_FILE);
    if manifest.is_file() {
        let text = fs::read_to_string(&manifest).map_err(|e| Error::io(&manifest, e))?;
        for record in parse_manifest(&text)? {
            let resolve = |p: Option<PathBuf>| p.map(|p| root.join(p));
            let photos = PhotoPaths {
                white: resolve(record.photos.white),
                infrared: resolve(record.photos.infrared),
                turquoise: resolve(record.photos.turquoise),
            };
            match record.kind {
                ManifestKind::Capture { treatment, category } => col.add_capture(
                    record.capture_id,
                    treatment,
                    category,
                    photos,
                    resolve(record.mask),
                    resolve(record.boxes),
                ),
                ManifestKind::Background => col.add_background(record.capture_id, photos),
            }
        }
        return col.finish();
    }

    for (name, path) in sorted_subdirs(root)? {
        if name == BACKGROUND_DIR {
            for (id, dir) in sorted_subdirs(&path)? {
                col.add_background(id, layout_photos(&dir));
            }
            continue;
        }
        let Ok(treatment) = name.parse::<Treatment>() else {
            col.issue(
                "",
                IssueLevel::Warning,
                format!("ignoring directory {}", path.display()),
            );
            continue;
        };
        for (cat_name, cat_path) in sorted_subdirs(&path)? {
            let Ok(category) = cat_name.parse::<Category>() else {
                col.issue(
                    "",
                    IssueLevel::Warning,
                    format!("ignoring directory {}", cat_path.display()),
                );
                continue;
            };
            for (id, dir) in sorted_subdirs(&cat_path)? {
                let mask = Some(dir.join(MASK_FILE));
                let boxes = existing(dir.join(BOXES_FILE));
                col.add_capture(id, treatment, category, layout_photos(&dir), mask, boxes);
            }
        }
    }
    col.finish()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ManifestKind {
    Capture { treatment: Treatment, category: Category },
    Background,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestRecord {
    pub capture_id: String,
    pub kind: ManifestKind,
    pub photos: PhotoPaths,
    pub mask: Option<PathBuf>,
    pub boxes: Option<PathBuf>,
}

/// Parses manifest lines:
///
/// ```text
/// capture <id> <treatment> <category> [white=P] [ir=P] [turquoise=P] [mask=P] [boxes=P]
/// background <id> [white=P] [ir=P] [turquoise=P]
/// ```
///
/// Paths are relative to the dataset root and contain no whitespace;
/// `#` starts a comment.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestRecord>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let err = |message: String| Error::Parse { line: line_no, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let keyword = tokens.next().unwrap_or_default();
        let capture_id = tokens
            .next()
            .ok_or_else(|| err("missing capture id".into()))?
            .to_string();
        let kind = match keyword {
            "capture" => {
                let treatment = tokens
                    .next()
                    .ok_or_else(|| err("missing treatment".into()))?
                    .parse()
                    .map_err(|e: Error| err(e.to_string()))?;
                let category = tokens
                    .next()
                    .ok_or_else(|| err("missing category".into()))?
                    .parse()
                    .map_err(|e: Error| err(e.to_string()))?;
                ManifestKind::Capture { treatment, category }
            }
            "background" => ManifestKind::Background,
            other => return Err(err(format!("unknown record type {other:?}"))),
        };
        let mut record = ManifestRecord {
            capture_id,
            kind,
            photos: PhotoPaths::default(),
            mask: None,
            boxes: None,
        };
        for tok in tokens {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=path, got {tok:?}")))?;
            let value = Some(PathBuf::from(value));
            match (key, &record.kind) {
                ("white", _) => record.photos.white = value,
                ("ir", _) => record.photos.infrared = value,
                ("turquoise", _) => record.photos.turquoise = value,
                ("mask", ManifestKind::Capture { .. }) => record.mask = value,
                ("boxes", ManifestKind::Capture { .. }) => record.boxes = value,
                _ => return Err(err(format!("unexpected key {key:?}"))),
            }
        }
        out.push(record);
    }
    Ok(out)
}

fn write_photos(dir: &Path, triplet: &CaptureTriplet) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (c, img) in triplet.channels() {
        if let Some(img) = img {
            io::write_rgb(dir.join(photo_file(c)), img)?;
        }
    }
    Ok(())
}

/// Writes one capture in the canonical layout and returns its directory.
pub fn write_capture(
    root: &Path,
    treatment: Treatment,
    category: Category,
    triplet: &CaptureTriplet,
    mask: Option<&ClassMask>,
    boxes: &[YoloBox],
) -> Result<PathBuf> {
    let dir = root
        .join(treatment.dir_name())
        .join(category.dir_name())
        .join(&triplet.capture_id);
    write_photos(&dir, triplet)?;
    if let Some(mask) = mask {
        io::write_rgb(dir.join(MASK_FILE), &encode_class_mask(mask))?;
    }
    let text: String = boxes.iter().map(|b| format!("{b}\n")).collect();
    let path = dir.join(BOXES_FILE);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(dir)
}

pub fn write_background(root: &Path, triplet: &CaptureTriplet) -> Result<PathBuf> {
    let dir = root.join(BACKGROUND_DIR).join(&triplet.capture_id);
    write_photos(&dir, triplet)?;
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn channel_mapping() {
        assert_eq!(classify_pixel([0, 0, 255]), ClassLabel::Background);
        assert_eq!(classify_pixel([255, 0, 0]), ClassLabel::Mite);
        assert_eq!(classify_pixel([0, 255, 0]), ClassLabel::Bee);
        assert_eq!(classify_pixel([200, 200, 0]), ClassLabel::Mite);
        assert_eq!(classify_pixel([0, 90, 90]), ClassLabel::Bee);
        assert_eq!(classify_pixel([0, 0, 0]), ClassLabel::Background);
        assert_eq!(classify_pixel([10, 3, 250]), ClassLabel::Background);
    }

    #[test]
    fn decode_rejects_nothing_but_bad_dims() {
        assert!(ClassMask::new(0, 1, vec![]).is_err());
        let blue = RgbImage::filled(3, 2, [0, 0, 255]).unwrap();
        assert_eq!(decode_class_mask(&blue).unwrap().count(ClassLabel::Background), 6);
    }

    #[test]
    fn encode_single_mite() {
        let mut m = ClassMask::filled(4, 4, ClassLabel::Bee).unwrap();
        m.set(2, 1, ClassLabel::Mite);
        let img = encode_class_mask(&m);
        assert_eq!(img.pixels().filter(|&p| p == [255, 0, 0]).count(), 1);
        assert_eq!(img.get(2, 1), [255, 0, 0]);
        let bg = encode_class_mask(&ClassMask::filled(2, 2, ClassLabel::Background).unwrap());
        assert!(bg.pixels().all(|p| p == [0, 0, 255]));
    }

    #[test]
    fn mite_mask_checkerboard() {
        let (w, h) = (7, 5);
        let labels = (0..w * h)
            .map(|i| {
                if (i % w + i / w) % 2 == 0 {
                    ClassLabel::Mite
                } else {
                    ClassLabel::Bee
                }
            })
            .collect();
        let m = mite_mask_of(&ClassMask::new(w, h, labels).unwrap());
        for y in 0..h {
            for x in 0..w {
                assert_eq!(m.get(x, y), (x + y) % 2 == 0);
            }
        }
        assert_eq!(
            mite_mask_of(&ClassMask::filled(3, 3, ClassLabel::Bee).unwrap()).count(),
            0
        );
        assert_eq!(
            mite_mask_of(&ClassMask::filled(3, 3, ClassLabel::Mite).unwrap()).count(),
            9
        );
    }

    #[test]
    fn yolo_examples() {
        let (b, px) = parse_yolo_line("1 0.5 0.5 0.1 0.2", (1116, 300), 1).unwrap();
        assert_eq!(b.class, YoloClass::Mite);
        // x: 558 +/- 55.8 -> [502, 614); y: 150 +/- 30 -> [120, 180)
        assert_eq!(
            px,
            PixelBox {
                x_min: 502,
                y_min: 120,
                x_max: 614,
                y_max: 180
            }
        );
        assert_eq!((px.width(), px.height()), (112, 60));
        assert_eq!((px.x_min + px.x_max) / 2, 558);

        let (b, px) = parse_yolo_line("0 0.5 0.5 1.0 1.0", (1116, 300), 1).unwrap();
        assert_eq!(b.class, YoloClass::Bee);
        assert_eq!(
            px,
            PixelBox {
                x_min: 0,
                y_min: 0,
                x_max: 1116,
                y_max: 300
            }
        );
    }

    #[test]
    fn yolo_errors_carry_line_numbers() {
        for (line, bad) in [
            "2 0.5 0.5 0.1 0.1",
            "1 0.5 0.5 0.1",
            "1 0.5 x 0.1 0.1",
            "1 1.5 0.5 0.1 0.1",
            "1 0.5 0.5 0.0 0.1",
            "1 0.5 0.5 0.1 NaN",
        ]
        .iter()
        .enumerate()
        .map(|(i, l)| (i + 7, *l))
        {
            match parse_yolo_line(bad, (100, 100), line) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line),
                other => panic!("{bad:?} gave {other:?}"),
            }
        }
        let err = parse_yolo_file("0 0.5 0.5 0.2 0.2\n\n1 0.5 0.5 2 0.2\n", (10, 10)).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn pixel_yolo_round_trip() {
        let b = PixelBox {
            x_min: 10,
            y_min: 20,
            x_max: 31,
            y_max: 45,
        };
        let y = YoloBox::from_pixels(YoloClass::Mite, b, (1116, 300));
        let (_, back) = parse_yolo_line(&y.to_string(), (1116, 300), 1).unwrap();
        assert_eq!(back, b);
    }

    proptest! {
        #[test]
        fn yolo_boxes_stay_in_bounds(
            cx in 0.0f64..=1.0, cy in 0.0f64..=1.0,
            w in 0.001f64..=1.0, h in 0.001f64..=1.0,
            iw in 1usize..2000, ih in 1usize..2000,
        ) {
            let b = YoloBox { class: YoloClass::Bee, cx, cy, w, h };
            let p = b.to_pixels((iw, ih));
            prop_assert!(p.x_min <= p.x_max && p.x_max as usize <= iw);
            prop_assert!(p.y_min <= p.y_max && p.y_max as usize <= ih);
        }

        #[test]
        fn class_mask_codec_is_identity(
            (w, h, labels) in (1usize..24, 1usize..24).prop_flat_map(|(w, h)| {
                let label = prop_oneof![Just(ClassLabel::Background), Just(ClassLabel::Bee), Just(ClassLabel::Mite)];
                (Just(w), Just(h), proptest::collection::vec(label, w * h))
            })
        ) {
            let m = ClassMask::new(w, h, labels).unwrap();
            prop_assert_eq!(decode_class_mask(&encode_class_mask(&m)).unwrap(), m);
        }

        #[test]
        fn decode_is_total(r in any::<u8>(), g in any::<u8>(), b in any::<u8>()) {
            let l = classify_pixel([r, g, b]);
            let expected = if r == 0 && g == 0 && b == 0 {
                ClassLabel::Background
            } else {
                let max = r.max(g).max(b);
                if r == max { ClassLabel::Mite } else if g == max { ClassLabel::Bee } else { ClassLabel::Background }
            };
            prop_assert_eq!(l, expected);
        }
    }

    #[test]
    fn manifest_parsing() {
        let text = "# real data\n\
                    capture c1 before bee_with_mite white=a/w.png ir=a/i.png turquoise=a/t.png mask=a/m.png boxes=a/b.txt\n\
                    background bg ir=bg/i.png\n";
        let recs = parse_manifest(text).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(
            recs[0].kind,
            ManifestKind::Capture {
                treatment: Treatment::Before,
                category: Category::BeeWithMite
            }
        );
        assert_eq!(recs[1].photos.infrared.as_deref(), Some(Path::new("bg/i.png")));
        assert!(matches!(
            parse_manifest("capture c1 during bee"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_manifest("background bg mask=m.png").is_err());
        assert!(parse_manifest("frame x").is_err());
    }
}
