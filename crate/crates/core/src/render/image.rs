//! RGB float images and their two on-disk forms.
//!
//! PNG output is 8-bit RGB with no color-profile chunks; values are taken
//! as already display-encoded and written as `round(255·v)`. The `.rawf`
//! format keeps full float precision for metrics: the magic `SPRF`, then
//! little-endian `u32` width, height and channel count (3), then one
//! `f32` plane per channel in row-major order.

use std::io::Cursor;
use std::path::Path;

use byteorder::{ByteOrder, LittleEndian};

use super::RenderError;

const RAW_MAGIC: &[u8; 4] = b"SPRF";

/// Interleaved RGB, row-major, samples nominally in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl RgbImage {
    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&rgb);
        }
        RgbImage { width, height, data }
    }

    pub fn get(&self, x: usize, y: usize) -> [f64; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set(&mut self, x: usize, y: usize, rgb: [f64; 3]) {
        let i = 3 * (y * self.width + x);
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn same_shape(&self, other: &RgbImage) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn check_finite(&self) -> Result<(), RenderError> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(i) => Err(RenderError::NonFinite(i)),
            None => Ok(()),
        }
    }

    pub fn encode_png(&self) -> Result<Vec<u8>, RenderError> {
        let (w, h) = dims_u32(self.width, self.height)?;
        let bytes: Vec<u8> = self
            .data
            .iter()
            .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect();
        let mut out = Vec::new();
        let mut enc = png::Encoder::new(&mut out, w, h);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header()?;
        writer.write_image_data(&bytes)?;
        writer.finish()?;
        Ok(out)
    }

    pub fn decode_png(bytes: &[u8]) -> Result<Self, RenderError> {
        let mut dec = png::Decoder::new(Cursor::new(bytes));
        dec.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
        let mut reader = dec.read_info()?;
        let size = reader
            .output_buffer_size()
            .ok_or_else(|| RenderError::UnsupportedImage("image too large".into()))?;
        let mut buf = vec![0u8; size];
        let info = reader.next_frame(&mut buf)?;
        let channels = match info.color_type {
            png::ColorType::Grayscale => 1,
            png::ColorType::GrayscaleAlpha => 2,
            png::ColorType::Rgb => 3,
            png::ColorType::Rgba => 4,
            other => return Err(RenderError::UnsupportedImage(format!("color type {other:?}"))),
        };
        if info.bit_depth != png::BitDepth::Eight {
            return Err(RenderError::UnsupportedImage(format!("bit depth {:?}", info.bit_depth)));
        }
        let (width, height) = (info.width as usize, info.height as usize);
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            let row = &buf[y * info.line_size..][..width * channels];
            for px in row.chunks_exact(channels) {
                let rgb = if channels < 3 {
                    [px[0]; 3]
                } else {
                    [px[0], px[1], px[2]]
                };
                data.extend(rgb.iter().map(|&c| c as f64 / 255.0));
            }
        }
        Ok(RgbImage { width, height, data })
    }

    pub fn encode_raw(&self) -> Result<Vec<u8>, RenderError> {
        let (w, h) = dims_u32(self.width, self.height)?;
        let n = self.width * self.height;
        let mut out = vec![0u8; 16 + 12 * n];
        out[..4].copy_from_slice(RAW_MAGIC);
        LittleEndian::write_u32_into(&[w, h, 3], &mut out[4..16]);
        for c in 0..3 {
            let plane = &mut out[16 + 4 * c * n..16 + 4 * (c + 1) * n];
            for (i, chunk) in plane.chunks_exact_mut(4).enumerate() {
                LittleEndian::write_f32(chunk, self.data[3 * i + c] as f32);
            }
        }
        Ok(out)
    }

    pub fn decode_raw(bytes: &[u8]) -> Result<Self, RenderError> {
        let bad = |m: &str| Err(RenderError::MalformedRaw(m.to_string()));
        if bytes.len() < 16 || &bytes[..4] != RAW_MAGIC {
            return bad("missing SPRF header");
        }
        let width = LittleEndian::read_u32(&bytes[4..8]) as usize;
        let height = LittleEndian::read_u32(&bytes[8..12]) as usize;
        if LittleEndian::read_u32(&bytes[12..16]) != 3 {
            return bad("channel count must be 3");
        }
        let n = width.checked_mul(height);
        let expected = n.and_then(|n| n.checked_mul(12)).and_then(|b| b.checked_add(16));
        if expected != Some(bytes.len()) {
            return bad("payload size does not match the header");
        }
        let n = width * height;
        let mut data = vec![0.0; 3 * n];
        for c in 0..3 {
            let plane = &bytes[16 + 4 * c * n..16 + 4 * (c + 1) * n];
            for (i, chunk) in plane.chunks_exact(4).enumerate() {
                data[3 * i + c] = LittleEndian::read_f32(chunk) as f64;
            }
        }
        Ok(RgbImage { width, height, data })
    }

    /// Writes PNG or `.rawf` depending on the extension.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), RenderError> {
        let path = path.as_ref();
        let bytes = match ImageFormat::from_path(path)? {
            ImageFormat::Png => self.encode_png()?,
            ImageFormat::Raw => self.encode_raw()?,
        };
        std::fs::write(path, bytes).map_err(|source| RenderError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RenderError> {
        let path = path.as_ref();
        let format = ImageFormat::from_path(path)?;
        let bytes = std::fs::read(path).map_err(|source| RenderError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        match format {
            ImageFormat::Png => Self::decode_png(&bytes),
            ImageFormat::Raw => Self::decode_raw(&bytes),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    Raw,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> Result<Self, RenderError> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("png") => Ok(ImageFormat::Png),
            Some("rawf") => Ok(ImageFormat::Raw),
            _ => Err(RenderError::UnsupportedImage(format!(
                "{}: expected a .png or .rawf extension",
                path.display()
            ))),
        }
    }
}

fn dims_u32(w: usize, h: usize) -> Result<(u32, u32), RenderError> {
    match (u32::try_from(w), u32::try_from(h)) {
        (Ok(w), Ok(h)) if w > 0 && h > 0 => Ok((w, h)),
        _ => Err(RenderError::UnsupportedImage(format!("{w}x{h} cannot be stored"))),
    }
}
