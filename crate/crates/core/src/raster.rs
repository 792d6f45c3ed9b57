//! Raster value types and the per-pixel primitives the detector composes.
//!
//! All images are row-major with the origin at the top-left corner. Every
//! operation is a pure function returning a new image.

use crate::error::{Error, Result};

fn check_dims(width: usize, height: usize, len: usize, channels: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::Dimension(format!(
            "image must be non-empty, got {width}x{height}"
        )));
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::Dimension(format!("{width}x{height} overflows")))?;
    if len != expected {
        return Err(Error::Dimension(format!(
            "{width}x{height}x{channels} image needs {expected} values, got {len}"
        )));
    }
    Ok(())
}

fn same_dims(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!(
            "dimension mismatch: {}x{} vs {}x{}",
            a.0, a.1, b.0, b.1
        )));
    }
    Ok(())
}

/// Interleaved 8-bit RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height, data.len(), 3)?;
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        let data = rgb.repeat(width.saturating_mul(height));
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn put(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = 3 * (y * self.width + x);
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn pixels(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.data.chunks_exact(3).map(|p| [p[0], p[1], p[2]])
    }
}

/// Single-channel 8-bit intensity raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height, data.len(), 1)?;
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    fn map(&self, f: impl Fn(u8) -> u8) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Signed intermediate produced by [`subtract`], wide enough for any single
/// arithmetic step on 8-bit operands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedImage {
    width: usize,
    height: usize,
    data: Vec<i16>,
}

impl SignedImage {
    pub const MIN: i16 = -255;
    pub const MAX: i16 = 510;

    pub fn new(width: usize, height: usize, data: Vec<i16>) -> Result<Self> {
        check_dims(width, height, data.len(), 1)?;
        if let Some((index, &v)) = data
            .iter()
            .enumerate()
            .find(|(_, &v)| !(Self::MIN..=Self::MAX).contains(&v))
        {
            return Err(Error::Range {
                value: v.into(),
                index,
                min: Self::MIN.into(),
                max: Self::MAX.into(),
            });
        }
        Ok(Self { width, height, data })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[i16] {
        &self.data
    }
}

/// Boolean raster; `true` is foreground.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        check_dims(width, height, data.len(), 1)?;
        Ok(Self { width, height, data })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![false; width.saturating_mul(height)])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[y * self.width + x] = value;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.dims() == other.dims() && self.data.iter().zip(&other.data).all(|(&a, &b)| !a || b)
    }

    /// Promotes the mask to intensities: `true` becomes 255, `false` becomes 0.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| if v { 255 } else { 0 }).collect(),
        }
    }

    pub(crate) fn from_parts_unchecked(width: usize, height: usize, data: Vec<bool>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self { width, height, data }
    }
}

/// BT.601 luma, `round(0.299 R + 0.587 G + 0.114 B)`, in exact integer arithmetic.
#[inline]
pub fn luma(rgb: [u8; 3]) -> u8 {
    let [r, g, b] = rgb.map(u32::from);
    // Weights sum to 1000, so the result never exceeds 255.
    ((299 * r + 587 * g + 114 * b + 500) / 1000) as u8
}

pub fn to_grayscale(image: &RgbImage) -> Result<GrayImage> {
    let data: Vec<u8> = image.pixels().map(luma).collect();
    GrayImage::new(image.width, image.height, data)
}

/// `a - b` per pixel, without clamping.
pub fn subtract(a: &GrayImage, b: &GrayImage) -> Result<SignedImage> {
    same_dims(a.dims(), b.dims())?;
    let data = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(&x, &y)| i16::from(x) - i16::from(y))
        .collect();
    Ok(SignedImage {
        width: a.width,
        height: a.height,
        data,
    })
}

/// Pixelwise absolute value. Fails if any magnitude exceeds 255.
pub fn absolute(img: &SignedImage) -> Result<GrayImage> {
    let data = img
        .data
        .iter()
        .enumerate()
        .map(|(index, &v)| {
            u8::try_from(v.unsigned_abs()).map_err(|_| Error::Range {
                value: v.into(),
                index,
                min: -255,
                max: 255,
            })
        })
        .collect::<Result<Vec<u8>>>()?;
    Ok(GrayImage {
        width: img.width,
        height: img.height,
        data,
    })
}

/// Strict threshold: a pixel is foreground iff its value is greater than `t`.
pub fn threshold(img: &GrayImage, t: u8) -> BinaryMask {
    BinaryMask {
        width: img.width,
        height: img.height,
        data: img.data.iter().map(|&v| v > t).collect(),
    }
}

/// Saturating gain: `min(255, round(k * v))`.
pub fn scale(img: &GrayImage, k: f64) -> Result<GrayImage> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::Parameter(format!(
            "gain must be finite and non-negative, got {k}"
        )));
    }
    let mut lut = [0u8; 256];
    for (v, slot) in lut.iter_mut().enumerate() {
        *slot = (k * v as f64).round().min(255.0) as u8;
    }
    Ok(img.map(|v| lut[usize::from(v)]))
}

/// `max(0, a - b)` per pixel.
pub fn subtract_saturating(a: &GrayImage, b: &GrayImage) -> Result<GrayImage> {
    same_dims(a.dims(), b.dims())?;
    let data = a.data.iter().zip(&b.data).map(|(&x, &y)| x.saturating_sub(y)).collect();
    Ok(GrayImage {
        width: a.width,
        height: a.height,
        data,
    })
}
