//! PNG encoding for the raster types.
//!
//! Gray images and masks are written as 8-bit single-channel PNGs (masks as
//! 0 / 255), photos and class masks as 8-bit RGB. On read, any non-zero mask
//! sample counts as foreground.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use png::{BitDepth, ColorType, Transformations};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, GrayImage, RgbImage};

fn png_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Png {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

struct Decoded {
    width: usize,
    height: usize,
    color: ColorType,
    data: Vec<u8>,
}

fn decode<R: Read + std::io::BufRead + std::io::Seek>(reader: R, path: &Path) -> Result<Decoded> {
    let mut decoder = png::Decoder::new(reader);
    decoder.set_transformations(Transformations::EXPAND | Transformations::STRIP_16);
    let mut reader = decoder.read_info().map_err(|e| png_err(path, e))?;
    let mut buf = vec![
        0;
        reader
            .output_buffer_size()
            .ok_or_else(|| png_err(path, "image too large"))?
    ];
    let info = reader.next_frame(&mut buf).map_err(|e| png_err(path, e))?;
    if info.bit_depth != BitDepth::Eight {
        return Err(png_err(path, format!("unsupported bit depth {:?}", info.bit_depth)));
    }
    buf.truncate(info.buffer_size());
    let (width, height) = (info.width as usize, info.height as usize);
    // Drop row padding, if any.
    let channels = info.color_type.samples();
    let row = width * channels;
    let data = if info.line_size == row {
        buf
    } else {
        buf.chunks(info.line_size).flat_map(|r| r[..row].to_vec()).collect()
    };
    Ok(Decoded {
        width,
        height,
        color: info.color_type,
        data,
    })
}

fn decode_file(path: &Path) -> Result<Decoded> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    decode(BufReader::new(file), path)
}

fn to_rgb(d: Decoded, path: &Path) -> Result<RgbImage> {
    let data = match d.color {
        ColorType::Rgb => d.data,
        ColorType::Rgba => d.data.chunks_exact(4).flat_map(|p| [p[0], p[1], p[2]]).collect(),
        ColorType::Grayscale => d.data.iter().flat_map(|&v| [v, v, v]).collect(),
        ColorType::GrayscaleAlpha => d.data.chunks_exact(2).flat_map(|p| [p[0], p[0], p[0]]).collect(),
        other => return Err(png_err(path, format!("unsupported color type {other:?}"))),
    };
    RgbImage::new(d.width, d.height, data)
}

fn to_gray(d: Decoded, path: &Path) -> Result<GrayImage> {
    match d.color {
        ColorType::Grayscale => GrayImage::new(d.width, d.height, d.data),
        other => Err(png_err(path, format!("expected 8-bit grayscale, got {other:?}"))),
    }
}

pub fn read_rgb(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    to_rgb(decode_file(path)?, path)
}

pub fn read_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    to_gray(decode_file(path)?, path)
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let gray = read_gray(path)?;
    let (w, h) = gray.dims();
    BinaryMask::new(w, h, gray.data().iter().map(|&v| v != 0).collect())
}

/// Reads only the PNG header; used to validate files without decoding them.
pub fn probe(path: impl AsRef<Path>) -> Result<(usize, usize)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = png::Decoder::new(BufReader::new(file))
        .read_info()
        .map_err(|e| png_err(path, e))?;
    let info = reader.info();
    Ok((info.width as usize, info.height as usize))
}

fn encode<W: Write>(writer: W, width: usize, height: usize, color: ColorType, data: &[u8], path: &Path) -> Result<()> {
    let mut enc = png::Encoder::new(writer, width as u32, height as u32);
    enc.set_color(color);
    enc.set_depth(BitDepth::Eight);
    let mut w = enc.write_header().map_err(|e| png_err(path, e))?;
    w.write_image_data(data).map_err(|e| png_err(path, e))?;
    w.finish().map_err(|e| png_err(path, e))
}

fn write_file(path: &Path, width: usize, height: usize, color: ColorType, data: &[u8]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    encode(&mut out, width, height, color, data, path)?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_rgb(path: impl AsRef<Path>, img: &RgbImage) -> Result<()> {
    write_file(path.as_ref(), img.width(), img.height(), ColorType::Rgb, img.data())
}

pub fn write_gray(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    write_file(
        path.as_ref(),
        img.width(),
        img.height(),
        ColorType::Grayscale,
        img.data(),
    )
}

pub fn write_mask(path: impl AsRef<Path>, mask: &BinaryMask) -> Result<()> {
    write_gray(path, &mask.to_gray())
}

/// In-memory PNG of a mask, as written by [`write_mask`].
pub fn encode_mask(mask: &BinaryMask) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let gray = mask.to_gray();
    encode(
        &mut out,
        gray.width(),
        gray.height(),
        ColorType::Grayscale,
        gray.data(),
        Path::new("<memory>"),
    )?;
    Ok(out)
}

pub fn encode_rgb(img: &RgbImage) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    encode(
        &mut out,
        img.width(),
        img.height(),
        ColorType::Rgb,
        img.data(),
        Path::new("<memory>"),
    )?;
    Ok(out)
}

pub fn decode_rgb(bytes: &[u8]) -> Result<RgbImage> {
    let path = Path::new("<memory>");
    to_rgb(decode(std::io::Cursor::new(bytes), path)?, path)
}
