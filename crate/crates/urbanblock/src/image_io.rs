//! 8-bit PNG encoding of rasters and masks.

use std::io::Cursor;
use std::path::Path;

use urbanblock_core::raster::{BitMask, Raster};

use crate::error::{Error, Result};
use crate::formats::write_bytes;

/// Encodes RGB8 with fixed settings so identical rasters give identical bytes.
pub fn encode_png(r: &Raster) -> Vec<u8> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, r.width(), r.height());
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_compression(png::Compression::Balanced);
        let mut w = enc.write_header().expect("in-memory png");
        w.write_image_data(r.as_bytes()).expect("in-memory png");
        w.finish().expect("in-memory png");
    }
    out
}

pub fn write_png(path: &Path, r: &Raster) -> Result<()> {
    write_bytes(path, &encode_png(r))
}

pub fn decode_png(bytes: &[u8], origin: &Path) -> Result<Raster> {
    let bad = |m: String| Error::Image {
        path: origin.to_path_buf(),
        message: m,
    };
    let mut dec = png::Decoder::new(Cursor::new(bytes));
    dec.set_transformations(png::Transformations::normalize_to_color8());
    let mut reader = dec.read_info().map_err(|e| bad(e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| bad("image too large".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf).map_err(|e| bad(e.to_string()))?;
    let (w, h) = (info.width, info.height);
    let px = (w * h) as usize;
    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::GrayscaleAlpha => 2,
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        other => return Err(bad(format!("unsupported color type {other:?}"))),
    };
    let mut rgb = Vec::with_capacity(px * 3);
    for y in 0..h as usize {
        let row = &buf[y * info.line_size..y * info.line_size + w as usize * channels];
        for p in row.chunks_exact(channels) {
            match channels {
                1 | 2 => rgb.extend_from_slice(&[p[0]; 3]),
                _ => rgb.extend_from_slice(&p[..3]),
            }
        }
    }
    Raster::from_raw(w, h, rgb).ok_or_else(|| bad("pixel buffer size mismatch".into()))
}

pub fn read_png(path: &Path) -> Result<Raster> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_png(&bytes, path)
}

/// Mask files: any pixel brighter than mid-gray on every channel is set.
pub fn read_mask_png(path: &Path) -> Result<BitMask> {
    let r = read_png(path)?;
    Ok(BitMask::from_fn(r.width(), r.height(), |x, y| {
        r.get(x, y).0.iter().all(|&c| c >= 128)
    }))
}

pub fn mask_to_raster(m: &BitMask) -> Raster {
    let mut r = Raster::new(m.width(), m.height(), urbanblock_core::Rgb::BLACK);
    for (x, y) in m.ones() {
        r.set(x, y, urbanblock_core::Rgb::WHITE);
    }
    r
}
