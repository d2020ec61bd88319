//! Image perturbation families and the projection of boxes between
//! perturbed and reference frames.
//!
//! Five families are supported: scale, blur, small rotation, illumination,
//! and JPEG compression, plus the identity. Fixed parameter grids span each
//! family's range; every grid contains its identity element so repeatability
//! runs always include an unperturbed column.

mod apply;
mod project;
mod resample;

pub use apply::apply_perturbation;
pub use project::{center_inside, crop_for, project_box, rotation_crop, CropRect};

use crate::error::{Error, Result};

/// Largest rotation magnitude in the suite; the shared crop is sized for it.
pub const MAX_ROTATION_DEG: f64 = 20.0;

/// JPEG re-encoding strength. Quality 100 is still lossy, so the lossless
/// sentinel is a distinct grid point meaning "no re-encode".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JpegQuality {
    Lossless,
    Quality(u8),
}

/// One image perturbation with its parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Perturbation {
    None,
    /// Resampling factor in [0.5, 2].
    Scale(f64),
    /// Gaussian sigma in pixels, [0, 8].
    Blur(f64),
    /// Angle in degrees, [-20, 20].
    Rotation(f64),
    /// Brightness percentage, [50, 150].
    Illumination(f64),
    Jpeg(JpegQuality),
}

/// Perturbation family, without a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PerturbationKind {
    None,
    Scale,
    Blur,
    Rotation,
    Illumination,
    Jpeg,
}

impl PerturbationKind {
    pub const ALL: [PerturbationKind; 6] = [
        PerturbationKind::None,
        PerturbationKind::Scale,
        PerturbationKind::Blur,
        PerturbationKind::Rotation,
        PerturbationKind::Illumination,
        PerturbationKind::Jpeg,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PerturbationKind::None => "none",
            PerturbationKind::Scale => "scale",
            PerturbationKind::Blur => "blur",
            PerturbationKind::Rotation => "rotation",
            PerturbationKind::Illumination => "illumination",
            PerturbationKind::Jpeg => "jpeg",
        }
    }
}

impl std::str::FromStr for PerturbationKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => Ok(Self::None),
            "scale" => Ok(Self::Scale),
            "blur" => Ok(Self::Blur),
            "rotation" => Ok(Self::Rotation),
            "illumination" => Ok(Self::Illumination),
            "jpeg" => Ok(Self::Jpeg),
            other => Err(format!("unknown perturbation kind '{other}'")),
        }
    }
}

impl Perturbation {
    pub fn scale(factor: f64) -> Result<Self> {
        check_range("scale factor", factor, 0.5, 2.0)?;
        Ok(Self::Scale(factor))
    }

    pub fn blur(sigma: f64) -> Result<Self> {
        check_range("blur sigma", sigma, 0.0, 8.0)?;
        Ok(Self::Blur(sigma))
    }

    pub fn rotation(degrees: f64) -> Result<Self> {
        check_range(
            "rotation angle",
            degrees,
            -MAX_ROTATION_DEG,
            MAX_ROTATION_DEG,
        )?;
        Ok(Self::Rotation(degrees))
    }

    pub fn illumination(percent: f64) -> Result<Self> {
        check_range("brightness percent", percent, 50.0, 150.0)?;
        Ok(Self::Illumination(percent))
    }

    pub fn jpeg(quality: u8) -> Result<Self> {
        check_range("jpeg quality", quality as f64, 5.0, 100.0)?;
        Ok(Self::Jpeg(JpegQuality::Quality(quality)))
    }

    pub fn jpeg_lossless() -> Self {
        Self::Jpeg(JpegQuality::Lossless)
    }

    pub fn kind(&self) -> PerturbationKind {
        match self {
            Perturbation::None => PerturbationKind::None,
            Perturbation::Scale(_) => PerturbationKind::Scale,
            Perturbation::Blur(_) => PerturbationKind::Blur,
            Perturbation::Rotation(_) => PerturbationKind::Rotation,
            Perturbation::Illumination(_) => PerturbationKind::Illumination,
            Perturbation::Jpeg(_) => PerturbationKind::Jpeg,
        }
    }

    /// Whether applying this perturbation leaves the raster unchanged.
    pub fn is_identity(&self) -> bool {
        match self {
            Perturbation::None => true,
            Perturbation::Scale(s) => *s == 1.0,
            Perturbation::Blur(sigma) => *sigma == 0.0,
            Perturbation::Rotation(deg) => *deg == 0.0,
            Perturbation::Illumination(pct) => *pct == 100.0,
            Perturbation::Jpeg(JpegQuality::Lossless) => true,
            Perturbation::Jpeg(JpegQuality::Quality(_)) => false,
        }
    }

    /// Whether the perturbed raster keeps the reference dimensions.
    pub fn is_size_preserving(&self) -> bool {
        match self {
            Perturbation::Scale(s) => *s == 1.0,
            Perturbation::Rotation(deg) => *deg == 0.0,
            _ => true,
        }
    }

    /// Stable textual parameter, used in directory names and CSV columns.
    pub fn param_label(&self) -> String {
        match self {
            Perturbation::None => "0".to_owned(),
            Perturbation::Scale(v) | Perturbation::Blur(v) | Perturbation::Rotation(v) => {
                format!("{v}")
            }
            Perturbation::Illumination(v) => format!("{v}"),
            Perturbation::Jpeg(JpegQuality::Lossless) => "lossless".to_owned(),
            Perturbation::Jpeg(JpegQuality::Quality(q)) => format!("{q}"),
        }
    }

    /// Numeric x-axis position for plots; the JPEG lossless sentinel sits
    /// just past quality 100.
    pub fn plot_position(&self) -> f64 {
        match self {
            Perturbation::None => 0.0,
            Perturbation::Scale(v)
            | Perturbation::Blur(v)
            | Perturbation::Rotation(v)
            | Perturbation::Illumination(v) => *v,
            Perturbation::Jpeg(JpegQuality::Lossless) => 101.0,
            Perturbation::Jpeg(JpegQuality::Quality(q)) => *q as f64,
        }
    }

    /// Parse the pair emitted by [`Perturbation::kind`] and
    /// [`Perturbation::param_label`].
    pub fn from_kind_and_label(kind: PerturbationKind, label: &str) -> Result<Self> {
        let bad = |message: String| Error::Parse {
            path: "<perturbation>".into(),
            line: 0,
            message,
        };
        let num = || -> Result<f64> {
            label
                .parse::<f64>()
                .map_err(|_| bad(format!("bad parameter '{label}'")))
        };
        match kind {
            PerturbationKind::None => Ok(Perturbation::None),
            PerturbationKind::Scale => Perturbation::scale(num()?),
            PerturbationKind::Blur => Perturbation::blur(num()?),
            PerturbationKind::Rotation => Perturbation::rotation(num()?),
            PerturbationKind::Illumination => Perturbation::illumination(num()?),
            PerturbationKind::Jpeg => {
                if label == "lossless" {
                    Ok(Perturbation::jpeg_lossless())
                } else {
                    let q = label
                        .parse::<u8>()
                        .map_err(|_| bad(format!("bad jpeg quality '{label}'")))?;
                    Perturbation::jpeg(q)
                }
            }
        }
    }
}

fn check_range(param: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if !value.is_finite() || value < lo || value > hi {
        return Err(Error::ParamOutOfRange {
            param,
            value,
            lo,
            hi,
        });
    }
    Ok(())
}

/// The fixed parameter grid of one perturbation family, ascending where the
/// family has a natural order.
pub fn perturbation_suite(kind: PerturbationKind) -> Vec<Perturbation> {
    match kind {
        PerturbationKind::None => vec![Perturbation::None],
        PerturbationKind::Scale => {
            // Eight factors log-uniform from one octave down to one octave
            // up, the near-identity probes, and the identity itself.
            let mut factors: Vec<f64> = (0..8)
                .map(|i| 2f64.powf(-1.0 + 2.0 * i as f64 / 7.0))
                .collect();
            factors.extend([0.9, 0.95, 0.99, 1.0, 1.01, 1.05, 1.1]);
            factors.sort_by(f64::total_cmp);
            factors.dedup();
            factors.into_iter().map(Perturbation::Scale).collect()
        }
        PerturbationKind::Blur => [0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0]
            .into_iter()
            .map(Perturbation::Blur)
            .collect(),
        PerturbationKind::Rotation => (-4..=4)
            .map(|i| Perturbation::Rotation(5.0 * i as f64))
            .collect(),
        PerturbationKind::Illumination => (0..=10)
            .map(|i| Perturbation::Illumination(50.0 + 10.0 * i as f64))
            .collect(),
        PerturbationKind::Jpeg => {
            let mut suite = vec![Perturbation::Jpeg(JpegQuality::Lossless)];
            suite.extend(
                [100u8, 90, 80, 70, 50, 30, 20, 10, 5]
                    .into_iter()
                    .map(|q| Perturbation::Jpeg(JpegQuality::Quality(q))),
            );
            suite
        }
    }
}
