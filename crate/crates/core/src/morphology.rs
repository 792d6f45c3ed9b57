//! Flat morphology on binary masks and grayscale images.
//!
//! Pixels outside the image are background (`false` / 0) for both erosion
//! and dilation. Square elements are applied as a horizontal pass followed
//! by a vertical pass; cross elements combine the two passes with AND
//! (erosion) or OR (dilation).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, GrayImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementShape {
    /// `(2r+1) x (2r+1)` block.
    Square,
    /// Plus sign with arms of length `r`.
    Cross,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StructuringElement {
    radius: usize,
    shape: ElementShape,
}

impl StructuringElement {
    pub fn new(shape: ElementShape, radius: usize) -> Result<Self> {
        if radius < 1 {
            return Err(Error::Parameter("structuring element radius must be at least 1".into()));
        }
        Ok(Self { radius, shape })
    }

    pub fn square(radius: usize) -> Result<Self> {
        Self::new(ElementShape::Square, radius)
    }

    pub fn cross(radius: usize) -> Result<Self> {
        Self::new(ElementShape::Cross, radius)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn shape(&self) -> ElementShape {
        self.shape
    }

    /// Offsets `(dx, dy)` covered by the element, centre included.
    pub fn offsets(&self) -> Vec<(isize, isize)> {
        let r = self.radius as isize;
        let mut out = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                let inside = match self.shape {
                    ElementShape::Square => true,
                    ElementShape::Cross => dx == 0 || dy == 0,
                };
                if inside {
                    out.push((dx, dy));
                }
            }
        }
        out
    }
}

impl Default for StructuringElement {
    fn default() -> Self {
        Self {
            radius: 1,
            shape: ElementShape::Square,
        }
    }
}

/// Formats as `square:1` / `cross:2`, the config file syntax.
impl fmt::Display for StructuringElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.shape {
            ElementShape::Square => "square",
            ElementShape::Cross => "cross",
        };
        write!(f, "{name}:{}", self.radius)
    }
}

impl FromStr for StructuringElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, radius) = s
            .split_once(':')
            .ok_or_else(|| Error::Parameter(format!("expected <shape>:<radius>, got {s:?}")))?;
        let shape = match name.trim().to_ascii_lowercase().as_str() {
            "square" => ElementShape::Square,
            "cross" => ElementShape::Cross,
            other => return Err(Error::Parameter(format!("unknown element shape {other:?}"))),
        };
        let radius = radius
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("bad element radius in {s:?}")))?;
        Self::new(shape, radius)
    }
}

#[derive(Clone, Copy)]
enum Axis {
    Horizontal,
    Vertical,
}

/// Walks every line along `axis`, giving the closure the line's flat indices.
fn for_each_line(width: usize, height: usize, axis: Axis, mut f: impl FnMut(&[usize])) {
    let mut idx = Vec::with_capacity(width.max(height));
    match axis {
        Axis::Horizontal => {
            for y in 0..height {
                idx.clear();
                idx.extend((0..width).map(|x| y * width + x));
                f(&idx);
            }
        }
        Axis::Vertical => {
            for x in 0..width {
                idx.clear();
                idx.extend((0..height).map(|y| y * width + x));
                f(&idx);
            }
        }
    }
}

fn binary_pass(mask: &[bool], width: usize, height: usize, r: usize, axis: Axis, erode: bool) -> Vec<bool> {
    let mut out = vec![false; mask.len()];
    let mut prefix = Vec::with_capacity(width.max(height) + 1);
    for_each_line(width, height, axis, |line| {
        let n = line.len();
        prefix.clear();
        prefix.push(0usize);
        let mut acc = 0;
        for &i in line {
            acc += usize::from(mask[i]);
            prefix.push(acc);
        }
        for (pos, &i) in line.iter().enumerate() {
            out[i] = if erode {
                pos >= r && pos + r < n && prefix[pos + r + 1] - prefix[pos - r] == 2 * r + 1
            } else {
                let lo = pos.saturating_sub(r);
                let hi = (pos + r).min(n - 1);
                prefix[hi + 1] > prefix[lo]
            };
        }
    });
    out
}

fn binary_apply(mask: &BinaryMask, se: StructuringElement, erode: bool) -> BinaryMask {
    let (w, h) = mask.dims();
    let r = se.radius();
    let data = match se.shape() {
        ElementShape::Square => {
            let first = binary_pass(mask.data(), w, h, r, Axis::Horizontal, erode);
            binary_pass(&first, w, h, r, Axis::Vertical, erode)
        }
        ElementShape::Cross => {
            let a = binary_pass(mask.data(), w, h, r, Axis::Horizontal, erode);
            let b = binary_pass(mask.data(), w, h, r, Axis::Vertical, erode);
            a.iter()
                .zip(&b)
                .map(|(&p, &q)| if erode { p && q } else { p || q })
                .collect()
        }
    };
    BinaryMask::from_parts_unchecked(w, h, data)
}

pub fn erode(mask: &BinaryMask, se: StructuringElement) -> BinaryMask {
    binary_apply(mask, se, true)
}

pub fn dilate(mask: &BinaryMask, se: StructuringElement) -> BinaryMask {
    binary_apply(mask, se, false)
}

/// Erosion followed by dilation with the same element.
pub fn morphological_open(mask: &BinaryMask, se: StructuringElement) -> BinaryMask {
    dilate(&erode(mask, se), se)
}

fn gray_pass(data: &[u8], width: usize, height: usize, r: usize, axis: Axis, erode: bool) -> Vec<u8> {
    let mut out = vec![0u8; data.len()];
    for_each_line(width, height, axis, |line| {
        let n = line.len();
        for (pos, &i) in line.iter().enumerate() {
            let lo = pos.saturating_sub(r);
            let hi = (pos + r).min(n - 1);
            let window = line[lo..=hi].iter().map(|&j| data[j]);
            out[i] = if erode {
                // A window that leaves the image sees the zero border.
                if pos < r || pos + r >= n {
                    0
                } else {
                    window.min().unwrap_or(0)
                }
            } else {
                window.max().unwrap_or(0)
            };
        }
    });
    out
}

fn gray_apply(img: &GrayImage, se: StructuringElement, erode: bool) -> GrayImage {
    let (w, h) = img.dims();
    let r = se.radius();
    let data = match se.shape() {
        ElementShape::Square => {
            let first = gray_pass(img.data(), w, h, r, Axis::Horizontal, erode);
            gray_pass(&first, w, h, r, Axis::Vertical, erode)
        }
        ElementShape::Cross => {
            let a = gray_pass(img.data(), w, h, r, Axis::Horizontal, erode);
            let b = gray_pass(img.data(), w, h, r, Axis::Vertical, erode);
            a.iter()
                .zip(&b)
                .map(|(&p, &q)| if erode { p.min(q) } else { p.max(q) })
                .collect()
        }
    };
    GrayImage::new(w, h, data).expect("dimensions preserved")
}

/// Flat grayscale opening (min filter then max filter), zero outside the image.
///
/// For any threshold `t`, `threshold(gray_open(img), t)` equals
/// `morphological_open(threshold(img, t))`.
pub fn gray_open(img: &GrayImage, se: StructuringElement) -> GrayImage {
    gray_apply(&gray_apply(img, se, true), se, false)
}
