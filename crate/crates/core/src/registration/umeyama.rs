//! Closed-form least-squares similarity / rigid alignment from point pairs.

use std::path::Path;

use nalgebra::{Matrix3, Rotation3, UnitQuaternion, SVD};

use crate::cloud::Vec3;

use super::{RegistrationError, Sim3};

/// Source → target point pairs, typically picked by hand.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorrespondenceSet {
    pub source: Vec<Vec3>,
    pub target: Vec<Vec3>,
}

impl CorrespondenceSet {
    pub fn new(pairs: impl IntoIterator<Item = (Vec3, Vec3)>) -> Self {
        let (source, target) = pairs.into_iter().unzip();
        Self { source, target }
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    /// One pair per line, `sx sy sz tx ty tz`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, RegistrationError> {
        let mut set = CorrespondenceSet::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| RegistrationError::CorrespondenceSyntax {
                    line: i + 1,
                    detail: e.to_string(),
                })?;
            if vals.len() != 6 || !vals.iter().all(|v| v.is_finite()) {
                return Err(RegistrationError::CorrespondenceSyntax {
                    line: i + 1,
                    detail: format!("expected 6 finite numbers, got `{line}`"),
                });
            }
            set.source.push(Vec3::new(vals[0], vals[1], vals[2]));
            set.target.push(Vec3::new(vals[3], vals[4], vals[5]));
        }
        Ok(set)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, RegistrationError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| RegistrationError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# sx sy sz tx ty tz\n");
        for (p, q) in self.source.iter().zip(&self.target) {
            s.push_str(&format!("{} {} {} {} {} {}\n", p.x, p.y, p.z, q.x, q.y, q.z));
        }
        s
    }

    /// Maps every source point through `t`, leaving targets alone.
    pub fn with_source_transformed(&self, t: &Sim3) -> Self {
        CorrespondenceSet {
            source: self.source.iter().map(|p| t.apply(p)).collect(),
            target: self.target.clone(),
        }
    }
}

pub fn umeyama_align(corr: &CorrespondenceSet, with_scale: bool) -> Result<Sim3, RegistrationError> {
    umeyama(&corr.source, &corr.target, with_scale)
}

/// Minimizes `Σ‖s·R·pᵢ + t − qᵢ‖²` (with `s = 1` when `with_scale` is
/// false) through the SVD of the cross-covariance, flipping the weakest
/// axis when the best orthogonal fit is a reflection.
pub fn umeyama(src: &[Vec3], dst: &[Vec3], with_scale: bool) -> Result<Sim3, RegistrationError> {
    if src.len() != dst.len() {
        return Err(RegistrationError::LengthMismatch(src.len(), dst.len()));
    }
    if src.len() < 3 {
        return Err(RegistrationError::TooFewCorrespondences(src.len()));
    }
    let n = src.len() as f64;
    let mu_s = src.iter().sum::<Vec3>() / n;
    let mu_d = dst.iter().sum::<Vec3>() / n;

    let mut cov = Matrix3::zeros();
    let mut var_s = 0.0;
    for (p, q) in src.iter().zip(dst) {
        let ps = p - mu_s;
        let qd = q - mu_d;
        cov += qd * ps.transpose();
        var_s += ps.norm_squared();
    }
    cov /= n;
    var_s /= n;
    if !cov.iter().all(|c| c.is_finite()) {
        return Err(RegistrationError::NonFinite("correspondences"));
    }

    let svd = SVD::new(cov, true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(RegistrationError::Degenerate("SVD did not converge")),
    };
    let sv = svd.singular_values;
    if !(sv[0] > 0.0) || sv[1] <= sv[0] * 1e-12 {
        return Err(RegistrationError::Degenerate(
            "correspondences are collinear or coincident",
        ));
    }

    let mut d = Matrix3::identity();
    if u.determinant() * v_t.determinant() < 0.0 {
        d[(2, 2)] = -1.0;
    }
    let r = u * d * v_t;
    let scale = if with_scale {
        (sv[0] * d[(0, 0)] + sv[1] * d[(1, 1)] + sv[2] * d[(2, 2)]) / var_s
    } else {
        1.0
    };
    let rotation = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(r));
    // Translation from the rounded quaternion so that apply() is consistent
    // with the returned rotation.
    let translation = mu_d - rotation * mu_s * scale;
    let t = Sim3 {
        scale,
        rotation,
        translation,
    };
    t.validate()?;
    Ok(t)
}

/// Root-mean-square residual of `t` on the pairs.
pub fn alignment_rms(t: &Sim3, src: &[Vec3], dst: &[Vec3]) -> f64 {
    let sum: f64 = src.iter().zip(dst).map(|(p, q)| (t.apply(p) - q).norm_squared()).sum();
    (sum / src.len().max(1) as f64).sqrt()
}
