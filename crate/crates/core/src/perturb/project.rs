//! Rotation crops and projection of boxes back into the reference frame.

use crate::error::{Error, Result};
use crate::geometry::{BoundingBox, Quad, Region};
use crate::perturb::{Perturbation, MAX_ROTATION_DEG};

/// The axis-aligned region of the original image rendered by the rotation
/// perturbation. One crop, sized for the most extreme angle of the suite, is
/// shared by all non-zero rotations of an image; angle zero keeps the full
/// frame so the identity grid point stays pixel-identical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CropRect {
    rect: BoundingBox,
}

impl CropRect {
    pub fn from_rect(rect: BoundingBox) -> Self {
        Self { rect }
    }

    pub fn rect(&self) -> &BoundingBox {
        &self.rect
    }

    pub fn width(&self) -> f64 {
        self.rect.width()
    }

    pub fn height(&self) -> f64 {
        self.rect.height()
    }

    pub fn center(&self) -> (f64, f64) {
        self.rect.center()
    }

    /// Raster dimensions of the rendered crop (floored, at least 1 px).
    pub fn output_size(&self) -> (u32, u32) {
        (
            (self.width().floor() as u32).max(1),
            (self.height().floor() as u32).max(1),
        )
    }
}

/// Largest centered rectangle with the image's aspect ratio that stays
/// inside the image under rotation by `max_angle_deg`. Symmetric in the
/// angle sign; angle zero returns the full frame.
pub fn rotation_crop(width: u32, height: u32, max_angle_deg: f64) -> CropRect {
    let (w, h) = (width as f64, height as f64);
    let theta = max_angle_deg.abs().to_radians();
    let (s, c) = theta.sin_cos();
    // A centered a*(W x H) rectangle rotated by theta spans
    // a*(W*c + H*s) x a*(W*s + H*c); both spans must fit.
    let a = (w / (w * c + h * s)).min(h / (w * s + h * c)).min(1.0);
    let (cw, ch) = (a * w, a * h);
    let x0 = (w - cw) / 2.0;
    let y0 = (h - ch) / 2.0;
    CropRect {
        rect: BoundingBox::new(x0, y0, x0 + cw, y0 + ch).expect("crop inside image"),
    }
}

/// The crop a perturbation renders through, if any.
pub fn crop_for(spec: &Perturbation, width: u32, height: u32) -> Option<CropRect> {
    match spec {
        Perturbation::Rotation(deg) => {
            if *deg == 0.0 {
                Some(rotation_crop(width, height, 0.0))
            } else {
                Some(rotation_crop(width, height, MAX_ROTATION_DEG))
            }
        }
        _ => None,
    }
}

/// Map a point from crop-local coordinates into the reference frame:
/// rotate by `-angle` about the crop center, then translate to the crop's
/// position. This is exactly where the rendered pixel content came from.
pub(crate) fn crop_to_reference(q: (f64, f64), angle_deg: f64, crop: &CropRect) -> (f64, f64) {
    if angle_deg == 0.0 {
        // Pure translation; evaluated directly so the zero angle stays
        // bit-exact instead of losing ulps through the rotate-about-center
        // form.
        return (q.0 + crop.rect.x0(), q.1 + crop.rect.y0());
    }
    let (s, c) = angle_deg.to_radians().sin_cos();
    let (cx, cy) = crop.center();
    let hx = crop.width() / 2.0;
    let hy = crop.height() / 2.0;
    let dx = q.0 - hx;
    let dy = q.1 - hy;
    (cx + c * dx + s * dy, cy - s * dx + c * dy)
}

/// Project a box found in a perturbed frame back into the reference frame.
/// Scale divides coordinates by the factor; rotation maps the four corners
/// through the crop and yields a quad; everything else is the identity.
pub fn project_box(
    b: &BoundingBox,
    spec: &Perturbation,
    crop: Option<&CropRect>,
) -> Result<Region> {
    match spec {
        Perturbation::None
        | Perturbation::Blur(_)
        | Perturbation::Illumination(_)
        | Perturbation::Jpeg(_) => Ok(Region::Box(*b)),
        Perturbation::Scale(s) => Ok(Region::Box(b.scaled(1.0 / s))),
        Perturbation::Rotation(deg) => {
            let crop = crop.ok_or(Error::MissingCrop)?;
            if *deg == 0.0 {
                // The zero grid point is a pure translation by the crop
                // origin; keep it on the exact box path so the identity
                // element stays bit-perfect through matching.
                let (x0, y0) = crop_to_reference((b.x0(), b.y0()), 0.0, crop);
                let (x1, y1) = crop_to_reference((b.x1(), b.y1()), 0.0, crop);
                let mut out = BoundingBox::new(x0, y0, x1, y1)?;
                out.set_score(b.score());
                return Ok(Region::Box(out));
            }
            let corners = b.corners();
            let vertices = std::array::from_fn(|i| {
                let (x, y) = crop_to_reference((corners[i][0], corners[i][1]), *deg, crop);
                [x, y]
            });
            let mut quad = Quad::new(vertices)?;
            quad.set_score(b.score());
            Ok(Region::Quad(quad))
        }
    }
}

/// Whether the projected window's center still lies inside the reference
/// image, which can only fail for rotation.
pub fn center_inside(region: &Region, width: f64, height: f64) -> bool {
    let (cx, cy) = region.centroid();
    (0.0..=width).contains(&cx) && (0.0..=height).contains(&cy)
}
