//! Time systems, reference frames, TLE parsing and topocentric geometry.
//!
//! Everything in here is a pure function over plain values. Angles cross the
//! public API in degrees unless a name says otherwise; distances are km.

mod frames;
mod time;
mod tle;

pub use frames::{
    ecf_to_geodetic, eci_to_ecf, geodetic_to_ecf, look_angles, rotate_z, GeodeticPoint, LookAngles,
};
pub use time::{gmst, j2000, julian_centuries_j2000, julian_date, timestamp_ms, J2000_JD};
pub use tle::{parse_tle, parse_tle_set, tle_checksum, Tle, TleError};

/// WGS-84 equatorial radius, km.
pub const EARTH_RADIUS_KM: f64 = 6378.137;
/// WGS-84 flattening.
pub const EARTH_FLATTENING: f64 = 1.0 / 298.257_223_563;
/// Earth gravitational parameter, km^3/s^2.
pub const MU_EARTH: f64 = 398600.4418;
/// Second zonal harmonic.
pub const J2: f64 = 1.082_626_68e-3;
/// Earth rotation rate, rad/s.
pub const EARTH_ROTATION_RATE: f64 = 7.292_115_146_706_979e-5;

pub type Vec3 = nalgebra::Vector3<f64>;
