//! Real spherical-harmonic color up to degree 3, in the convention used by
//! common splat files: `rgb = 0.5 + Σ basis·coeff`, clamped to `[0, 1]`.

use crate::cloud::Vec3;

use super::GaussianError;

pub const SH_C0: f64 = 0.282_094_791_773_878_14;
const SH_C1: f64 = 0.488_602_511_902_919_9;
const SH_C2: [f64; 5] = [
    1.092_548_430_592_079_2,
    -1.092_548_430_592_079_2,
    0.315_391_565_252_520_05,
    -1.092_548_430_592_079_2,
    0.546_274_215_296_039_6,
];
const SH_C3: [f64; 7] = [
    -0.590_043_589_926_643_5,
    2.890_611_442_640_554,
    -0.457_045_799_464_465_8,
    0.373_176_332_590_115_4,
    -0.457_045_799_464_465_8,
    1.445_305_721_320_277,
    -0.590_043_589_926_643_5,
];

/// Degree for a coefficient count of `(d+1)²` triples.
pub fn sh_degree(triples: usize) -> Result<usize, GaussianError> {
    match triples {
        1 => Ok(0),
        4 => Ok(1),
        9 => Ok(2),
        16 => Ok(3),
        n => Err(GaussianError::MalformedShCount(3 * n)),
    }
}

/// Coefficient triples from a flat list of `3·(d+1)²` values ordered
/// coefficient-major (`[c0.r, c0.g, c0.b, c1.r, ...]`).
pub fn sh_from_flat(flat: &[f64]) -> Result<Vec<[f64; 3]>, GaussianError> {
    if !flat.len().is_multiple_of(3) {
        return Err(GaussianError::MalformedShCount(flat.len()));
    }
    sh_degree(flat.len() / 3)?;
    Ok(flat.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect())
}

/// Unclamped color, offset included.
pub fn sh_eval(sh: &[[f64; 3]], dir: &Vec3) -> Result<[f64; 3], GaussianError> {
    let degree = sh_degree(sh.len())?;
    if degree > 0 {
        let n = dir.norm();
        if !((n - 1.0).abs() <= 1e-6) {
            return Err(GaussianError::NonUnitViewDirection(n));
        }
    }
    let basis = basis(degree, dir);
    let mut out = [0.5; 3];
    for (b, c) in basis.iter().zip(sh) {
        for ch in 0..3 {
            out[ch] += b * c[ch];
        }
    }
    Ok(out)
}

pub fn sh_to_color(sh: &[[f64; 3]], dir: &Vec3) -> Result<[f64; 3], GaussianError> {
    Ok(sh_eval(sh, dir)?.map(|v| v.clamp(0.0, 1.0)))
}

fn basis(degree: usize, d: &Vec3) -> Vec<f64> {
    let mut b = Vec::with_capacity((degree + 1) * (degree + 1));
    b.push(SH_C0);
    if degree == 0 {
        return b;
    }
    let (x, y, z) = (d.x, d.y, d.z);
    b.extend([-SH_C1 * y, SH_C1 * z, -SH_C1 * x]);
    if degree == 1 {
        return b;
    }
    let (xx, yy, zz) = (x * x, y * y, z * z);
    b.extend([
        SH_C2[0] * x * y,
        SH_C2[1] * y * z,
        SH_C2[2] * (2.0 * zz - xx - yy),
        SH_C2[3] * x * z,
        SH_C2[4] * (xx - yy),
    ]);
    if degree == 2 {
        return b;
    }
    b.extend([
        SH_C3[0] * y * (3.0 * xx - yy),
        SH_C3[1] * x * y * z,
        SH_C3[2] * y * (4.0 * zz - xx - yy),
        SH_C3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy),
        SH_C3[4] * x * (4.0 * zz - xx - yy),
        SH_C3[5] * z * (xx - yy),
        SH_C3[6] * x * (xx - 3.0 * yy),
    ]);
    b
}

/// Band-0 coefficient whose offset color is `rgb` (each in `[0, 1]`).
pub fn dc_from_rgb(rgb: [f64; 3]) -> [f64; 3] {
    rgb.map(|c| (c - 0.5) / SH_C0)
}

pub fn dc_from_u8(rgb: [u8; 3]) -> [f64; 3] {
    dc_from_rgb(rgb.map(|c| c as f64 / 255.0))
}
