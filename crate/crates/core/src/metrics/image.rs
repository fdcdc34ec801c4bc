use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::render::RgbImage;

use super::{neumaier_sum, MetricsError, SCHEMA_VERSION};

/// PSNR in dB for peak 1.0. Identical images have no finite PSNR; that
/// case serializes as the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Psnr {
    Finite(f64),
    Infinite,
}

impl Psnr {
    pub fn db(self) -> f64 {
        match self {
            Psnr::Finite(v) => v,
            Psnr::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Psnr::Infinite
    }
}

impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Finite(v) => write!(f, "{v}"),
            Psnr::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Psnr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Psnr::Finite(v) => s.serialize_f64(*v),
            Psnr::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Psnr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Psnr::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(Psnr::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

fn check_shape(a: &RgbImage, b: &RgbImage) -> Result<(), MetricsError> {
    if !a.same_shape(b) {
        return Err(MetricsError::DimensionMismatch {
            a: (a.width, a.height),
            b: (b.width, b.height),
        });
    }
    Ok(())
}

/// Mean over pixels and channels of `|a − b|`.
pub fn image_l1(a: &RgbImage, b: &RgbImage) -> Result<f64, MetricsError> {
    check_shape(a, b)?;
    let n = a.data.len();
    if n == 0 {
        return Ok(0.0);
    }
    Ok(neumaier_sum(a.data.iter().zip(&b.data).map(|(x, y)| (x - y).abs())) / n as f64)
}

pub fn image_mse(a: &RgbImage, b: &RgbImage) -> Result<f64, MetricsError> {
    check_shape(a, b)?;
    let n = a.data.len();
    if n == 0 {
        return Ok(0.0);
    }
    // Scaled by the largest difference so tiny nonzero errors do not
    // underflow to an "identical" verdict.
    let peak = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(0.0);
    }
    let scaled = neumaier_sum(a.data.iter().zip(&b.data).map(|(x, y)| ((x - y) / peak).powi(2))) / n as f64;
    Ok(scaled * peak * peak)
}

/// `10·log₁₀(1 / MSE)`.
pub fn image_psnr(a: &RgbImage, b: &RgbImage) -> Result<Psnr, MetricsError> {
    check_shape(a, b)?;
    if a.data == b.data {
        return Ok(Psnr::Infinite);
    }
    let peak = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let scaled = neumaier_sum(a.data.iter().zip(&b.data).map(|(x, y)| ((x - y) / peak).powi(2))) / a.data.len() as f64;
    // log of the scaled form stays finite even when MSE would underflow.
    Ok(Psnr::Finite(-10.0 * scaled.log10() - 20.0 * peak.log10()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImagePairReport {
    pub name: String,
    pub l1: f64,
    pub psnr: Psnr,
    pub pixel_count: usize,
}

impl ImagePairReport {
    pub fn compute(name: impl Into<String>, pred: &RgbImage, gt: &RgbImage) -> Result<Self, MetricsError> {
        Ok(ImagePairReport {
            name: name.into(),
            l1: image_l1(pred, gt)?,
            psnr: image_psnr(pred, gt)?,
            pixel_count: pred.width * pred.height,
        })
    }
}

/// Per-image values plus their plain means. The mean PSNR is infinite if
/// any image's is.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageBatchReport {
    pub schema: u32,
    pub psnr_peak: f64,
    pub value_range: String,
    pub l1_kind: String,
    pub image_count: usize,
    pub mean_l1: f64,
    pub mean_psnr: Psnr,
    pub images: Vec<ImagePairReport>,
}

impl ImageBatchReport {
    pub fn from_pairs(images: Vec<ImagePairReport>) -> Self {
        let n = images.len().max(1) as f64;
        let mean_l1 = images.iter().map(|r| r.l1).sum::<f64>() / n;
        let mean_psnr = if images.iter().any(|r| r.psnr.is_infinite()) {
            Psnr::Infinite
        } else {
            Psnr::Finite(images.iter().map(|r| r.psnr.db()).sum::<f64>() / n)
        };
        ImageBatchReport {
            schema: SCHEMA_VERSION,
            psnr_peak: 1.0,
            value_range: "0-1".into(),
            l1_kind: "per_channel_mean".into(),
            image_count: images.len(),
            mean_l1,
            mean_psnr,
            images,
        }
    }

    /// One row per image, then a `__mean__` row.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.images {
            w.serialize(r)?;
        }
        w.serialize(ImagePairReport {
            name: "__mean__".into(),
            l1: self.mean_l1,
            psnr: self.mean_psnr,
            pixel_count: self.images.iter().map(|r| r.pixel_count).sum(),
        })?;
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}
