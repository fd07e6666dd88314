//! Low-precision solar ephemeris and cylindrical-shadow eclipse windows.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::orbitcore::{julian_centuries_j2000, Vec3, EARTH_RADIUS_KM};
use crate::propagator::Trajectory;

pub const AU_KM: f64 = 149_597_870.7;

#[derive(Debug, Clone, PartialEq)]
pub struct SunState {
    pub t: DateTime<Utc>,
    /// km, ECI
    pub r_sun_eci: Vec3,
    /// degrees
    pub mean_anomaly: f64,
    /// degrees
    pub mean_longitude: f64,
    /// ecliptic longitude, degrees
    pub ecliptic_longitude: f64,
    /// degrees
    pub obliquity: f64,
    /// AU
    pub distance: f64,
}

fn wrap360(deg: f64) -> f64 {
    deg.rem_euclid(360.0)
}

pub fn sun_position(t: DateTime<Utc>) -> SunState {
    let tc = julian_centuries_j2000(t);
    let m = wrap360(357.5291 + 35999.0503 * tc);
    let l = wrap360(280.4664 + 36000.7698 * tc);
    let mr = m.to_radians();
    let lambda = wrap360(l + 1.9146 * mr.sin() + 0.02 * (2.0 * mr).sin());
    let eps = 23.4393 - 0.0130 * tc;
    let r_au = 1.00014 - 0.01671 * mr.cos() - 0.00014 * (2.0 * mr).cos();

    let (sl, cl) = lambda.to_radians().sin_cos();
    let (se, ce) = eps.to_radians().sin_cos();
    let r_km = r_au * AU_KM;
    SunState {
        t,
        r_sun_eci: Vec3::new(r_km * cl, r_km * sl * ce, r_km * sl * se),
        mean_anomaly: m,
        mean_longitude: l,
        ecliptic_longitude: lambda,
        obliquity: eps,
        distance: r_au,
    }
}

/// Cylindrical shadow test: behind the Earth along the sun line and within
/// one equatorial radius of that line.
pub fn is_eclipsed(r_sat: &Vec3, r_sun: &Vec3) -> bool {
    let s_hat = r_sun / r_sun.norm();
    let d = r_sat.dot(&s_hat);
    d < 0.0 && (r_sat - s_hat * d).norm() < EARTH_RADIUS_KM
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Illumination {
    Eclipse,
    Sunlit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IlluminationWindow {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    pub kind: Illumination,
    /// seconds
    pub duration: f64,
}

/// Merges per-sample states into alternating windows. A run owns the span from
/// its first sample to the first sample of the next run; the last run ends at
/// the final timestamp. A lone final sample that flips state has no span of
/// its own and is folded into the preceding window.
pub fn merge_runs(samples: &[(DateTime<Utc>, Illumination)]) -> Vec<IlluminationWindow> {
    let mut out: Vec<IlluminationWindow> = Vec::new();
    let Some(&(last_t, _)) = samples.last() else {
        return out;
    };
    let mut run_start = 0;
    for i in 1..=samples.len() {
        let boundary = i == samples.len() || samples[i].1 != samples[run_start].1;
        if !boundary {
            continue;
        }
        let start = samples[run_start].0;
        let end = if i == samples.len() {
            last_t
        } else {
            samples[i].0
        };
        if end > start {
            out.push(IlluminationWindow {
                start,
                end,
                kind: samples[run_start].1,
                duration: (end - start).num_milliseconds() as f64 / 1000.0,
            });
        }
        run_start = i;
    }
    if out.is_empty() {
        // single-sample trajectory: degenerate zero-length horizon
        out.push(IlluminationWindow {
            start: last_t,
            end: last_t,
            kind: samples[0].1,
            duration: 0.0,
        });
    }
    out
}

pub fn illumination_states(traj: &Trajectory) -> Vec<(DateTime<Utc>, Illumination)> {
    traj.samples
        .iter()
        .map(|s| {
            let sun = sun_position(s.t);
            let kind = if is_eclipsed(&s.r_eci, &sun.r_sun_eci) {
                Illumination::Eclipse
            } else {
                Illumination::Sunlit
            };
            (s.t, kind)
        })
        .collect()
}

pub fn eclipse_windows(traj: &Trajectory) -> Vec<IlluminationWindow> {
    merge_runs(&illumination_states(traj))
}
