//! Geographic primitives: validated positions, great-circle distance and the
//! Miller cylindrical projection used to lay checkins out in a simulation field.


use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius in kilometers.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// A latitude/longitude pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGeoPoint")]
pub struct GeoPoint {
    lat: f64,
    lng: f64,
}

#[derive(Deserialize)]
struct RawGeoPoint {
    lat: f64,
    lng: f64,
}

impl TryFrom<RawGeoPoint> for GeoPoint {
    type Error = Error;

    fn try_from(raw: RawGeoPoint) -> Result<Self> {
        GeoPoint::new(raw.lat, raw.lng)
    }
}

impl GeoPoint {
    pub fn new(lat: f64, lng: f64) -> Result<Self> {
        if !lat.is_finite() || !lng.is_finite() {
            return Err(Error::Domain(format!(
                "non-finite coordinate ({lat}, {lng})"
            )));
        }
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::Domain(format!("latitude {lat} outside [-90, 90]")));
        }
        if !(-180.0..=180.0).contains(&lng) {
            return Err(Error::Domain(format!(
                "longitude {lng} outside [-180, 180]"
            )));
        }
        Ok(GeoPoint { lat, lng })
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lng(&self) -> f64 {
        self.lng
    }
}

/// Great-circle distance in kilometers on a sphere of radius [`EARTH_RADIUS_KM`].
///
/// Uses the `asin(sqrt(h))` haversine form; `h` is clamped to `[0, 1]` so that
/// rounding near the antipode cannot push `asin` out of its domain.
pub fn haversine_distance(a: GeoPoint, b: GeoPoint) -> f64 {
    let lat_a = a.lat.to_radians();
    let lat_b = b.lat.to_radians();
    let half_dlat = (lat_a - lat_b) * 0.5;
    let half_dlng = (a.lng - b.lng).to_radians() * 0.5;
    let h = half_dlat.sin().powi(2) + lat_a.cos() * lat_b.cos() * half_dlng.sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.clamp(0.0, 1.0).sqrt().asin()
}

/// Miller cylindrical projection on the unit sphere.
///
/// Returns `(x, y)` with `x = λ` and `y = 1.25 · ln(tan(π/4 + 0.4·φ))`, both
/// in radians-equivalent units. `y` is evaluated as `1.25 · asinh(tan(0.8·φ))`,
/// the same function written so that it is exactly odd in `φ`.
pub fn miller_project(p: GeoPoint) -> Result<(f64, f64)> {
    if p.lat.abs() >= 90.0 {
        return Err(Error::Domain(format!(
            "Miller projection undefined at the pole (lat {})",
            p.lat
        )));
    }
    let phi = p.lat.to_radians();
    let x = p.lng.to_radians();
    let y = 1.25 * (0.8 * phi).tan().asinh();
    Ok((x, y))
}

/// A point inside a `width × height` rectangular simulation field, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldPoint {
    pub x: f64,
    pub y: f64,
}

impl FieldPoint {
    pub fn new(x: f64, y: f64) -> Self {
        FieldPoint { x, y }
    }

    pub fn distance(&self, other: &FieldPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn within(&self, width: f64, height: f64) -> bool {
        (0.0..=width).contains(&self.x) && (0.0..=height).contains(&self.y)
    }
}

/// Similarity transform from Miller coordinates to field meters.
///
/// `field = (raw - raw_min) · scale + offset`, with one scale for both axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldTransform {
    pub raw_min_x: f64,
    pub raw_min_y: f64,
    pub scale: f64,
    pub offset_x: f64,
    pub offset_y: f64,
    pub width: f64,
    pub height: f64,
}

impl FieldTransform {
    pub fn apply_raw(&self, raw: (f64, f64)) -> FieldPoint {
        let x = (raw.0 - self.raw_min_x) * self.scale + self.offset_x;
        let y = (raw.1 - self.raw_min_y) * self.scale + self.offset_y;
        // rounding can leave the far edge a few ulps outside the field
        FieldPoint::new(x.clamp(0.0, self.width), y.clamp(0.0, self.height))
    }

    pub fn apply(&self, p: GeoPoint) -> Result<FieldPoint> {
        Ok(self.apply_raw(miller_project(p)?))
    }
}

/// Project `points` and fit them into a `width × height` field with a single
/// uniform scale, centering the content along the slack axis.
///
/// If all points project to the same location they are placed at the field
/// center with scale 1.
pub fn fit_to_field(
    points: &[GeoPoint],
    width: f64,
    height: f64,
) -> Result<(Vec<FieldPoint>, FieldTransform)> {
    if points.is_empty() {
        return Err(Error::Domain("fit_to_field needs at least one point".into()));
    }
    if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
        return Err(Error::Domain(format!(
            "field dimensions must be positive, got {width} x {height}"
        )));
    }
    let raw = points
        .iter()
        .map(|p| miller_project(*p))
        .collect::<Result<Vec<_>>>()?;

    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &raw {
        min_x = min_x.min(x);
        min_y = min_y.min(y);
        max_x = max_x.max(x);
        max_y = max_y.max(y);
    }
    let span_x = max_x - min_x;
    let span_y = max_y - min_y;

    let scale = match (span_x > 0.0, span_y > 0.0) {
        (false, false) => 1.0,
        (true, false) => width / span_x,
        (false, true) => height / span_y,
        (true, true) => (width / span_x).min(height / span_y),
    };
    let transform = FieldTransform {
        raw_min_x: min_x,
        raw_min_y: min_y,
        scale,
        offset_x: (width - span_x * scale) * 0.5,
        offset_y: (height - span_y * scale) * 0.5,
        width,
        height,
    };
    let fitted = raw.into_iter().map(|r| transform.apply_raw(r)).collect();
    Ok((fitted, transform))
}
