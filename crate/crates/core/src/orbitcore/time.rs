//! Julian dates and Greenwich mean sidereal time.
//!
//! GMST uses the IAU-1982 polynomial
//! `67310.54841 + (876600h + 8640184.812866)T + 0.093104T² − 6.2e-6T³` seconds,
//! with `T` in Julian centuries of UT from J2000.0. UT1−UTC is ignored.

use std::f64::consts::TAU;

use chrono::{DateTime, TimeZone, Utc};

const MS_PER_DAY: f64 = 86_400_000.0;
const UNIX_EPOCH_JD: f64 = 2_440_587.5;
pub const J2000_JD: f64 = 2_451_545.0;

/// 2000-01-01T12:00:00 UTC.
pub fn j2000() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2000, 1, 1, 12, 0, 0).unwrap()
}

pub fn timestamp_ms(t: DateTime<Utc>) -> i64 {
    t.timestamp_millis()
}

pub fn julian_date(t: DateTime<Utc>) -> f64 {
    UNIX_EPOCH_JD + t.timestamp_millis() as f64 / MS_PER_DAY
}

/// Julian centuries since J2000.0, computed from the millisecond offset so
/// that the large JD integer part does not eat precision.
pub fn julian_centuries_j2000(t: DateTime<Utc>) -> f64 {
    let ms = (t - j2000()).num_milliseconds() as f64;
    ms / MS_PER_DAY / 36_525.0
}

/// Greenwich mean sidereal time in radians, normalized to [0, 2π).
pub fn gmst(t: DateTime<Utc>) -> f64 {
    let ms = (t - j2000()).num_milliseconds();
    // split whole days from the fraction so the 876600h·T term keeps precision
    let days = ms.div_euclid(86_400_000) as f64;
    let frac_sec = ms.rem_euclid(86_400_000) as f64 / 1000.0;
    let tc = (days + frac_sec / 86_400.0) / 36_525.0;

    // 876600h·T = 86400 s per day elapsed; that part is a whole number of
    // solar days and contributes only the fractional-day seconds.
    let secs = 67_310.548_41 + frac_sec + 8_640_184.812_866 * tc + 0.093_104 * tc * tc
        - 6.2e-6 * tc * tc * tc;
    let rad = (secs.rem_euclid(86_400.0) / 240.0).to_radians();
    rad.rem_euclid(TAU)
}
