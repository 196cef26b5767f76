//! Geographic coordinates and the flat-earth projection used by a scene.
//!
//! Scenes are at most a few kilometres across, so an equirectangular
//! projection around the grid origin is accurate to well under a cell:
//! metres north scale with latitude degrees, metres east with longitude
//! degrees shrunk by cos(origin latitude).

use serde::{Deserialize, Serialize};

/// Mean Earth radius in metres.
const EARTH_RADIUS_M: f64 = 6_371_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

impl LatLon {
    pub fn new(lat: f64, lon: f64) -> Self {
        LatLon { lat, lon }
    }
}

/// Local tangent-plane projection anchored at the south-west corner of grid
/// cell (0, 0). Rows grow northward, columns eastward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Projection {
    pub origin: LatLon,
    cos_lat: f64,
}

impl Projection {
    pub fn new(origin: LatLon) -> Self {
        Projection { origin, cos_lat: origin.lat.to_radians().cos() }
    }

    /// Metres (east, north) of `point` relative to the origin.
    pub fn to_local(&self, point: LatLon) -> (f64, f64) {
        let east = (point.lon - self.origin.lon).to_radians() * EARTH_RADIUS_M * self.cos_lat;
        let north = (point.lat - self.origin.lat).to_radians() * EARTH_RADIUS_M;
        (east, north)
    }

    /// Inverse of [`to_local`].
    pub fn to_latlon(&self, east: f64, north: f64) -> LatLon {
        let lat = self.origin.lat + (north / EARTH_RADIUS_M).to_degrees();
        let lon = self.origin.lon + (east / (EARTH_RADIUS_M * self.cos_lat)).to_degrees();
        LatLon::new(lat, lon)
    }

    /// Straight-line metres between two points in this projection.
    pub fn distance_m(&self, a: LatLon, b: LatLon) -> f64 {
        let (ea, na) = self.to_local(a);
        let (eb, nb) = self.to_local(b);
        ((ea - eb).powi(2) + (na - nb).powi(2)).sqrt()
    }

    /// Compass bearing in degrees [0, 360) from `from` towards `to`
    /// (0 = north, 90 = east).
    pub fn bearing_deg(&self, from: LatLon, to: LatLon) -> f64 {
        let (ef, nf) = self.to_local(from);
        let (et, nt) = self.to_local(to);
        let deg = (et - ef).atan2(nt - nf).to_degrees();
        if deg < 0.0 {
            deg + 360.0
        } else {
            deg
        }
    }
}

/// Absolute angular difference between two bearings, folded into [0, 180].
pub(crate) fn bearing_difference_deg(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    if d > 180.0 {
        360.0 - d
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_local_frame() {
        let proj = Projection::new(LatLon::new(41.46, -90.52));
        let p = LatLon::new(41.4712, -90.5034);
        let (e, n) = proj.to_local(p);
        let back = proj.to_latlon(e, n);
        assert!((back.lat - p.lat).abs() < 1e-12);
        assert!((back.lon - p.lon).abs() < 1e-12);
    }

    #[test]
    fn one_degree_north_is_about_111_km() {
        let proj = Projection::new(LatLon::new(41.0, -90.0));
        let (_, n) = proj.to_local(LatLon::new(42.0, -90.0));
        assert!((n - 111_194.9).abs() < 1.0);
    }

    #[test]
    fn bearings_follow_compass_convention() {
        let proj = Projection::new(LatLon::new(41.0, -90.0));
        let o = LatLon::new(41.0, -90.0);
        let north = proj.to_latlon(0.0, 100.0);
        let east = proj.to_latlon(100.0, 0.0);
        let sw = proj.to_latlon(-100.0, -100.0);
        assert!((proj.bearing_deg(o, north) - 0.0).abs() < 1e-9);
        assert!((proj.bearing_deg(o, east) - 90.0).abs() < 1e-9);
        assert!((proj.bearing_deg(o, sw) - 225.0).abs() < 1e-9);
    }

    #[test]
    fn bearing_difference_folds() {
        assert_eq!(bearing_difference_deg(350.0, 10.0), 20.0);
        assert_eq!(bearing_difference_deg(10.0, 350.0), 20.0);
        assert_eq!(bearing_difference_deg(90.0, 270.0), 180.0);
        assert_eq!(bearing_difference_deg(45.0, 45.0), 0.0);
    }
}
