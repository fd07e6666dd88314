use serde::{Deserialize, Serialize};

use super::{Vec3, EARTH_FLATTENING, EARTH_RADIUS_KM};

const GEODETIC_TOLERANCE_KM: f64 = 1e-3;
const GEODETIC_MAX_ITER: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodeticPoint {
    /// degrees
    pub lat: f64,
    /// degrees
    pub lon: f64,
    /// km above the WGS-84 ellipsoid
    pub alt: f64,
}

impl GeodeticPoint {
    pub fn new(lat: f64, lon: f64, alt: f64) -> Self {
        Self { lat, lon, alt }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LookAngles {
    /// degrees, [-90, 90]
    pub elevation: f64,
    /// degrees, [0, 360)
    pub azimuth: f64,
    /// km
    pub slant_range: f64,
}

/// Rotates `v` about +Z by `-angle`, i.e. expresses an inertial vector in a
/// frame that has itself rotated by `angle`.
pub fn rotate_z(v: &Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    Vec3::new(c * v.x + s * v.y, -s * v.x + c * v.y, v.z)
}

/// ECI to Earth-fixed by a rotation of GMST about the pole.
pub fn eci_to_ecf(r_eci: &Vec3, gmst: f64) -> Vec3 {
    rotate_z(r_eci, gmst)
}

fn eccentricity_sq() -> f64 {
    EARTH_FLATTENING * (2.0 - EARTH_FLATTENING)
}

pub fn geodetic_to_ecf(p: &GeodeticPoint) -> Vec3 {
    let (slat, clat) = p.lat.to_radians().sin_cos();
    let (slon, clon) = p.lon.to_radians().sin_cos();
    let e2 = eccentricity_sq();
    let n = EARTH_RADIUS_KM / (1.0 - e2 * slat * slat).sqrt();
    Vec3::new(
        (n + p.alt) * clat * clon,
        (n + p.alt) * clat * slon,
        (n * (1.0 - e2) + p.alt) * slat,
    )
}

/// Iterative WGS-84 inversion. Returns `None` when the latitude does not settle
/// within ten iterations (only for pathological input).
pub fn ecf_to_geodetic(r: &Vec3) -> Option<GeodeticPoint> {
    let e2 = eccentricity_sq();
    let b = EARTH_RADIUS_KM * (1.0 - EARTH_FLATTENING);
    let rho = r.x.hypot(r.y);
    let lon = if rho < 1e-9 { 0.0 } else { r.y.atan2(r.x) };

    if rho < 1e-9 {
        let alt = r.z.abs() - b;
        let lat = if r.z >= 0.0 { 90.0 } else { -90.0 };
        return Some(GeodeticPoint::new(lat, 0.0, alt));
    }

    let mut lat = r.z.atan2(rho * (1.0 - e2));
    let mut alt = 0.0;
    for _ in 0..GEODETIC_MAX_ITER {
        let s = lat.sin();
        let n = EARTH_RADIUS_KM / (1.0 - e2 * s * s).sqrt();
        let next_alt = rho / lat.cos() - n;
        let next_lat = r.z.atan2(rho * (1.0 - e2 * n / (n + next_alt)));
        // latitude change expressed as arc length on the surface
        let moved = (next_lat - lat).abs() * EARTH_RADIUS_KM;
        let alt_delta = (next_alt - alt).abs();
        lat = next_lat;
        alt = next_alt;
        if moved < GEODETIC_TOLERANCE_KM && alt_delta < GEODETIC_TOLERANCE_KM {
            let s = lat.sin();
            let n = EARTH_RADIUS_KM / (1.0 - e2 * s * s).sqrt();
            let alt = rho / lat.cos() - n;
            return Some(GeodeticPoint::new(lat.to_degrees(), lon.to_degrees(), alt));
        }
    }
    None
}

/// Elevation, azimuth and range from `station` to an Earth-fixed position,
/// via the south-east-zenith topocentric frame.
pub fn look_angles(station: &GeodeticPoint, r_ecf: &Vec3) -> LookAngles {
    let origin = geodetic_to_ecf(station);
    let d = r_ecf - origin;
    let (slat, clat) = station.lat.to_radians().sin_cos();
    let (slon, clon) = station.lon.to_radians().sin_cos();

    let south = slat * clon * d.x + slat * slon * d.y - clat * d.z;
    let east = -slon * d.x + clon * d.y;
    let zenith = clat * clon * d.x + clat * slon * d.y + slat * d.z;

    let range = d.norm();
    let elevation = (zenith / range).clamp(-1.0, 1.0).asin().to_degrees();
    let mut azimuth = east.atan2(-south).to_degrees();
    if azimuth < 0.0 {
        azimuth += 360.0;
    }
    if azimuth >= 360.0 {
        azimuth -= 360.0;
    }
    LookAngles {
        elevation,
        azimuth,
        slant_range: range,
    }
}
