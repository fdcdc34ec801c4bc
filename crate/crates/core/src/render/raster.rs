//! Front-to-back compositing of depth-sorted projected splats.
//!
//! Pixel `(x, y)` samples the image plane at integer coordinates, so a
//! splat projected onto `(cx, cy)` is centered on that pixel. Splats are
//! binned per row, rows are rendered in parallel, and each pixel walks its
//! row's splats front to back.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::gaussian::GaussianSplat;

use super::{project_splat, PinholeCamera, Projected2DGaussian, RenderError, RgbImage, Z_NEAR};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderOptions {
    pub background: [f64; 3],
    pub z_near: f64,
    /// Mahalanobis radius beyond which a splat is skipped; `None` disables
    /// truncation.
    pub cutoff_sigma: Option<f64>,
    /// Widens the cutoff for opaque splats until the dropped weight falls
    /// below this. At 3σ alone an opaque splat still has weight
    /// `e^{-4.5} ≈ 0.011` at the boundary.
    pub cutoff_min_weight: Option<f64>,
    /// A pixel stops accumulating once its transmittance drops below this.
    pub transmittance_floor: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            background: [0.0; 3],
            z_near: Z_NEAR,
            cutoff_sigma: Some(3.0),
            cutoff_min_weight: Some(1e-5),
            transmittance_floor: 1e-4,
        }
    }
}

impl RenderOptions {
    /// No truncation, no early exit.
    pub fn exhaustive() -> Self {
        RenderOptions {
            cutoff_sigma: None,
            cutoff_min_weight: None,
            transmittance_floor: 0.0,
            ..Default::default()
        }
    }

    fn radius(&self, opacity: f64) -> f64 {
        let Some(sigma) = self.cutoff_sigma else {
            return f64::INFINITY;
        };
        match self.cutoff_min_weight {
            Some(eps) if opacity > eps => sigma.max((2.0 * (opacity / eps).ln()).sqrt()),
            _ => sigma,
        }
    }
}

struct Footprint {
    g: Projected2DGaussian,
    radius_sq: f64,
    x0: usize,
    x1: usize,
}

/// Total order used for compositing: depth, then the projected parameters
/// so equal-depth splats order independently of input position.
fn composite_order(a: &Projected2DGaussian, b: &Projected2DGaussian) -> Ordering {
    let key = |g: &Projected2DGaussian| {
        [
            g.depth,
            g.mean.x,
            g.mean.y,
            g.opacity,
            g.color[0],
            g.color[1],
            g.color[2],
            g.cov[(0, 0)],
            g.cov[(0, 1)],
            g.cov[(1, 1)],
        ]
    };
    let (ka, kb) = (key(a), key(b));
    ka.iter()
        .zip(&kb)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

pub fn render(splats: &[GaussianSplat], cam: &PinholeCamera, opts: &RenderOptions) -> Result<RgbImage, RenderError> {
    render_with_alpha(splats, cam, opts).map(|(img, _)| img)
}

/// Also returns the per-pixel composited alpha `1 − T`.
pub fn render_with_alpha(
    splats: &[GaussianSplat],
    cam: &PinholeCamera,
    opts: &RenderOptions,
) -> Result<(RgbImage, Vec<f64>), RenderError> {
    if splats.is_empty() {
        return Err(RenderError::EmptyScene);
    }
    cam.validate()?;
    let (w, h) = (cam.width, cam.height);
    let mut projected: Vec<Projected2DGaussian> = splats
        .par_iter()
        .filter_map(|s| project_splat(s, cam, opts.z_near))
        .collect();
    projected.sort_by(composite_order);

    let mut rows: Vec<Vec<u32>> = vec![Vec::new(); h];
    let mut footprints = Vec::with_capacity(projected.len());
    for g in projected {
        let r = opts.radius(g.opacity);
        let (hx, hy) = (r * g.cov[(0, 0)].sqrt(), r * g.cov[(1, 1)].sqrt());
        let Some((x0, x1)) = pixel_span(g.mean.x - hx, g.mean.x + hx, w) else {
            continue;
        };
        let Some((y0, y1)) = pixel_span(g.mean.y - hy, g.mean.y + hy, h) else {
            continue;
        };
        let id = footprints.len() as u32;
        for row in &mut rows[y0..=y1] {
            row.push(id);
        }
        footprints.push(Footprint {
            g,
            radius_sq: r * r,
            x0,
            x1,
        });
    }

    let rendered: Vec<(Vec<f64>, Vec<f64>)> = rows
        .par_iter()
        .enumerate()
        .map(|(y, ids)| render_row(y, w, ids, &footprints, opts))
        .collect();
    let mut data = Vec::with_capacity(w * h * 3);
    let mut alpha = Vec::with_capacity(w * h);
    for (rgb, a) in rendered {
        data.extend(rgb);
        alpha.extend(a);
    }
    Ok((
        RgbImage {
            width: w,
            height: h,
            data,
        },
        alpha,
    ))
}

/// Integer pixel indices within `[lo, hi]`, clipped to `0..n`.
fn pixel_span(lo: f64, hi: f64, n: usize) -> Option<(usize, usize)> {
    let lo = lo.ceil().max(0.0);
    let hi = hi.floor().min(n as f64 - 1.0);
    if !(lo <= hi) {
        return None;
    }
    Some((lo as usize, hi as usize))
}

fn render_row(y: usize, w: usize, ids: &[u32], footprints: &[Footprint], opts: &RenderOptions) -> (Vec<f64>, Vec<f64>) {
    let mut rgb = Vec::with_capacity(3 * w);
    let mut alpha = Vec::with_capacity(w);
    let py = y as f64;
    for x in 0..w {
        let px = x as f64;
        let mut t = 1.0;
        let mut c = [0.0; 3];
        for &id in ids {
            let f = &footprints[id as usize];
            if x < f.x0 || x > f.x1 {
                continue;
            }
            let (dx, dy) = (px - f.g.mean.x, py - f.g.mean.y);
            let k = &f.g.conic;
            let maha = k[(0, 0)] * dx * dx + 2.0 * k[(0, 1)] * dx * dy + k[(1, 1)] * dy * dy;
            if maha > f.radius_sq {
                continue;
            }
            let a = f.g.opacity * (-0.5 * maha).exp();
            for (acc, col) in c.iter_mut().zip(&f.g.color) {
                *acc += col * a * t;
            }
            t *= 1.0 - a;
            if t < opts.transmittance_floor {
                break;
            }
        }
        rgb.extend(
            c.iter()
                .zip(&opts.background)
                .map(|(acc, bg)| (acc + t * bg).clamp(0.0, 1.0)),
        );
        alpha.push(1.0 - t);
    }
    (rgb, alpha)
}
