//! Trajectory generation from mean elements.
//!
//! The built-in [`KeplerJ2`] propagator solves Kepler's equation for the
//! osculating ellipse defined by the TLE mean elements and advances RAAN,
//! argument of perigee and mean anomaly at their first-order J2 secular
//! rates. Drag and periodic terms are left out, so expect tens of km of
//! along-track drift over half a day compared with SGP4. Anything that
//! implements [`Propagator`] can replace it.

use std::f64::consts::TAU;

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orbitcore::{
    ecf_to_geodetic, eci_to_ecf, gmst, GeodeticPoint, Tle, Vec3, EARTH_RADIUS_KM, J2, MU_EARTH,
};

const MAX_EPOCH_OFFSET_S: i64 = 7 * 86_400;
const MAX_SAMPLES: u32 = 10_080;
const DECAY_ALTITUDE_KM: f64 = 100.0;
const KEPLER_TOL: f64 = 1e-10;
const KEPLER_MAX_ITER: usize = 50;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagationError {
    #[error("orbit decayed: radius {radius_km:.1} km at {t}")]
    Decayed { t: DateTime<Utc>, radius_km: f64 },
    #[error("Kepler's equation did not converge (M = {mean_anomaly}, e = {eccentricity})")]
    KeplerNonConvergence {
        mean_anomaly: f64,
        eccentricity: f64,
    },
    #[error("{t} is more than 7 days from the element epoch {epoch}")]
    OutsideValidity {
        t: DateTime<Utc>,
        epoch: DateTime<Utc>,
    },
    #[error("invalid propagation config: {0}")]
    Config(String),
    #[error("geodetic conversion did not converge")]
    Geodetic,
}

impl PropagationError {
    pub fn code(&self) -> &'static str {
        match self {
            PropagationError::Decayed { .. } => "ORBIT_DECAYED",
            PropagationError::KeplerNonConvergence { .. } => "KEPLER_NON_CONVERGENCE",
            PropagationError::OutsideValidity { .. } => "TLE_STALE",
            PropagationError::Config(_) => "PROPAGATION_CONFIG",
            PropagationError::Geodetic => "GEODETIC_NON_CONVERGENCE",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub t: DateTime<Utc>,
    /// km
    pub r_eci: Vec3,
    /// km/s
    pub v_eci: Vec3,
    /// km
    pub r_ecf: Vec3,
    pub geodetic: GeodeticPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropagationConfig {
    pub start: DateTime<Utc>,
    /// seconds
    pub horizon: u32,
    /// seconds
    pub step: u32,
}

impl PropagationConfig {
    pub fn new(start: DateTime<Utc>) -> Self {
        Self {
            start,
            horizon: 43_200,
            step: 30,
        }
    }

    pub fn validate(&self) -> Result<(), PropagationError> {
        if self.step == 0 {
            return Err(PropagationError::Config("step must be positive".into()));
        }
        if self.horizon < self.step {
            return Err(PropagationError::Config(
                "horizon shorter than one step".into(),
            ));
        }
        if self.horizon / self.step > MAX_SAMPLES {
            return Err(PropagationError::Config(format!(
                "horizon/step exceeds {MAX_SAMPLES}"
            )));
        }
        Ok(())
    }

    pub fn sample_count(&self) -> usize {
        (self.horizon / self.step) as usize + 1
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<StateVector>,
    /// seconds
    pub orbital_period: f64,
    /// seconds between samples
    pub step: u32,
}

impl Trajectory {
    pub fn start(&self) -> DateTime<Utc> {
        self.samples[0].t
    }

    pub fn end(&self) -> DateTime<Utc> {
        self.samples[self.samples.len() - 1].t
    }
}

pub trait Propagator {
    fn propagate(&self, tle: &Tle, t: DateTime<Utc>) -> Result<StateVector, PropagationError>;
}

/// Two-body motion plus J2 secular drift of the orientation angles.
#[derive(Debug, Clone, Copy, Default)]
pub struct KeplerJ2;

/// Eccentric anomaly from mean anomaly by Newton iteration.
pub fn solve_kepler(mean_anomaly: f64, e: f64) -> Result<f64, PropagationError> {
    let m = mean_anomaly.rem_euclid(TAU);
    let mut ea = if e < 0.8 { m } else { std::f64::consts::PI };
    for _ in 0..KEPLER_MAX_ITER {
        let f = ea - e * ea.sin() - m;
        let delta = f / (1.0 - e * ea.cos());
        ea -= delta;
        if delta.abs() < KEPLER_TOL {
            return Ok(ea);
        }
    }
    Err(PropagationError::KeplerNonConvergence {
        mean_anomaly: m,
        eccentricity: e,
    })
}

/// Secular rates (rad/s) of RAAN, argument of perigee and mean anomaly.
pub fn j2_secular_rates(tle: &Tle) -> (f64, f64, f64) {
    let n = mean_motion_rad_s(tle);
    let a = semi_major_axis(tle);
    let e2 = tle.eccentricity * tle.eccentricity;
    let p = a * (1.0 - e2);
    let k = 1.5 * J2 * (EARTH_RADIUS_KM / p).powi(2) * n;
    let ci = tle.inclination.to_radians().cos();
    let raan_dot = -k * ci;
    let argp_dot = 0.5 * k * (5.0 * ci * ci - 1.0);
    let m_dot = n + 0.5 * k * (1.0 - e2).sqrt() * (3.0 * ci * ci - 1.0);
    (raan_dot, argp_dot, m_dot)
}

pub fn mean_motion_rad_s(tle: &Tle) -> f64 {
    tle.mean_motion * TAU / 86_400.0
}

/// km
pub fn semi_major_axis(tle: &Tle) -> f64 {
    let n = mean_motion_rad_s(tle);
    (MU_EARTH / (n * n)).cbrt()
}

/// seconds
pub fn orbital_period(tle: &Tle) -> f64 {
    86_400.0 / tle.mean_motion
}

impl Propagator for KeplerJ2 {
    fn propagate(&self, tle: &Tle, t: DateTime<Utc>) -> Result<StateVector, PropagationError> {
        let offset_ms = (t - tle.epoch).num_milliseconds();
        if offset_ms.abs() > MAX_EPOCH_OFFSET_S * 1000 {
            return Err(PropagationError::OutsideValidity {
                t,
                epoch: tle.epoch,
            });
        }
        let dt = offset_ms as f64 / 1000.0;
        let a = semi_major_axis(tle);
        let e = tle.eccentricity;
        let (raan_dot, argp_dot, m_dot) = j2_secular_rates(tle);

        let raan = tle.raan.to_radians() + raan_dot * dt;
        let argp = tle.arg_perigee.to_radians() + argp_dot * dt;
        let m = tle.mean_anomaly.to_radians() + m_dot * dt;
        let inc = tle.inclination.to_radians();

        let ea = solve_kepler(m, e)?;
        let (se, ce) = ea.sin_cos();
        let root = (1.0 - e * e).sqrt();
        let radius = a * (1.0 - e * ce);
        let nu = (root * se).atan2(ce - e);
        let p = a * (1.0 - e * e);
        let (snu, cnu) = nu.sin_cos();
        let r_pf = Vec3::new(radius * cnu, radius * snu, 0.0);
        let vk = (MU_EARTH / p).sqrt();
        let v_pf = Vec3::new(-vk * snu, vk * (e + cnu), 0.0);

        let (so, co) = raan.sin_cos();
        let (sw, cw) = argp.sin_cos();
        let (si, ci) = inc.sin_cos();
        // columns of R3(-Ω)·R1(-i)·R3(-ω)
        let p_hat = Vec3::new(co * cw - so * sw * ci, so * cw + co * sw * ci, sw * si);
        let q_hat = Vec3::new(-co * sw - so * cw * ci, -so * sw + co * cw * ci, cw * si);
        let r_eci = p_hat * r_pf.x + q_hat * r_pf.y;
        let v_eci = p_hat * v_pf.x + q_hat * v_pf.y;

        let norm = r_eci.norm();
        if norm < EARTH_RADIUS_KM + DECAY_ALTITUDE_KM {
            return Err(PropagationError::Decayed { t, radius_km: norm });
        }
        let r_ecf = eci_to_ecf(&r_eci, gmst(t));
        let geodetic = ecf_to_geodetic(&r_ecf).ok_or(PropagationError::Geodetic)?;
        Ok(StateVector {
            t,
            r_eci,
            v_eci,
            r_ecf,
            geodetic,
        })
    }
}

pub fn propagate(tle: &Tle, t: DateTime<Utc>) -> Result<StateVector, PropagationError> {
    KeplerJ2.propagate(tle, t)
}

pub fn propagate_trajectory(
    tle: &Tle,
    cfg: &PropagationConfig,
) -> Result<Trajectory, PropagationError> {
    propagate_trajectory_with(&KeplerJ2, tle, cfg)
}

pub fn propagate_trajectory_with<P: Propagator + ?Sized>(
    propagator: &P,
    tle: &Tle,
    cfg: &PropagationConfig,
) -> Result<Trajectory, PropagationError> {
    cfg.validate()?;
    let samples = (0..cfg.sample_count())
        .map(|i| {
            let t = cfg.start + Duration::seconds(i as i64 * cfg.step as i64);
            propagator.propagate(tle, t)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Trajectory {
        samples,
        orbital_period: orbital_period(tle),
        step: cfg.step,
    })
}
