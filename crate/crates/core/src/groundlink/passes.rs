use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::link::{ber_from_margin, data_rate, link_margin, LinkParams};
use super::stations::GroundStation;
use crate::orbitcore::look_angles;
use crate::propagator::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassSample {
    pub t: DateTime<Utc>,
    /// degrees
    pub elevation: f64,
    /// degrees
    pub azimuth: f64,
    /// km
    pub slant_range: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkAnnotation {
    /// Mbps, mean over all profile samples
    pub mean_data_rate: f64,
    /// dB, minimum over the profile
    pub worst_margin: f64,
    pub ber: f64,
    /// MB
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassPrediction {
    pub id: usize,
    pub station_id: String,
    pub aos: DateTime<Utc>,
    pub los: DateTime<Utc>,
    /// degrees
    pub peak_elevation: f64,
    pub samples: Vec<PassSample>,
    pub link: Option<LinkAnnotation>,
}

impl PassPrediction {
    /// seconds
    pub fn duration(&self) -> f64 {
        (self.los - self.aos).num_milliseconds() as f64 / 1000.0
    }

    pub fn capacity(&self) -> f64 {
        self.link.map_or(0.0, |l| l.capacity)
    }

    pub fn mean_data_rate(&self) -> f64 {
        self.link.map_or(0.0, |l| l.mean_data_rate)
    }
}

/// Splits an elevation profile into passes: one per maximal run of samples at
/// or above the station's minimum elevation. Runs of a single sample have no
/// duration and are skipped.
pub fn detect_passes_from_profile(
    station: &GroundStation,
    profile: &[PassSample],
) -> Vec<PassPrediction> {
    let mut passes = Vec::new();
    let mut i = 0;
    while i < profile.len() {
        if profile[i].elevation < station.min_elevation {
            i += 1;
            continue;
        }
        let start = i;
        while i < profile.len() && profile[i].elevation >= station.min_elevation {
            i += 1;
        }
        let run = &profile[start..i];
        if run.len() < 2 {
            continue;
        }
        let peak = run
            .iter()
            .map(|s| s.elevation)
            .fold(f64::NEG_INFINITY, f64::max);
        passes.push(PassPrediction {
            id: passes.len(),
            station_id: station.id.clone(),
            aos: run[0].t,
            los: run[run.len() - 1].t,
            peak_elevation: peak,
            samples: run.to_vec(),
            link: None,
        });
    }
    passes
}

pub fn detect_passes(traj: &Trajectory, station: &GroundStation) -> Vec<PassPrediction> {
    let site = station.location();
    let profile: Vec<PassSample> = traj
        .samples
        .iter()
        .map(|s| {
            let la = look_angles(&site, &s.r_ecf);
            PassSample {
                t: s.t,
                elevation: la.elevation,
                azimuth: la.azimuth,
                slant_range: la.slant_range,
            }
        })
        .collect();
    detect_passes_from_profile(station, &profile)
}

pub fn annotate_link_budget(mut pass: PassPrediction, params: &LinkParams) -> PassPrediction {
    let n = pass.samples.len().max(1) as f64;
    let mean_data_rate = pass
        .samples
        .iter()
        .map(|s| data_rate(s.elevation))
        .sum::<f64>()
        / n;
    let worst_margin = pass
        .samples
        .iter()
        .map(|s| link_margin(params, s.slant_range))
        .fold(f64::INFINITY, f64::min);
    pass.link = Some(LinkAnnotation {
        mean_data_rate,
        worst_margin,
        ber: ber_from_margin(worst_margin, params),
        capacity: mean_data_rate * pass.duration() / 8.0,
    });
    pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groundlink::default_stations;
    use crate::propagator::{propagate_trajectory, PropagationConfig};
    use crate::test_support::{iss, sso, start};
    use chrono::Duration;

    fn sample(i: i64, elevation: f64, range: f64) -> PassSample {
        PassSample {
            t: start() + Duration::seconds(30 * i),
            elevation,
            azimuth: 0.0,
            slant_range: range,
        }
    }

    fn station() -> GroundStation {
        GroundStation::new("test", 0.0, 0.0, "none", false)
    }

    fn uniform_pass(elevation: f64, seconds: i64) -> PassPrediction {
        let samples: Vec<_> = (0..=seconds / 30)
            .map(|i| sample(i, elevation, 500.0))
            .collect();
        PassPrediction {
            id: 0,
            station_id: "test".into(),
            aos: samples[0].t,
            los: samples[samples.len() - 1].t,
            peak_elevation: elevation,
            samples,
            link: None,
        }
    }

    #[test]
    fn never_visible() {
        let profile: Vec<_> = (0..50).map(|i| sample(i, -10.0, 9000.0)).collect();
        assert!(detect_passes_from_profile(&station(), &profile).is_empty());
    }

    #[test]
    fn single_rise_and_set() {
        let elev = [0.0, 3.0, 6.0, 20.0, 45.0, 20.0, 6.0, 4.0, 1.0];
        let profile: Vec<_> = elev
            .iter()
            .enumerate()
            .map(|(i, &e)| sample(i as i64, e, 1000.0))
            .collect();
        let passes = detect_passes_from_profile(&station(), &profile);
        assert_eq!(passes.len(), 1);
        assert_eq!(passes[0].aos, profile[2].t);
        assert_eq!(passes[0].los, profile[6].t);
        assert_eq!(passes[0].peak_elevation, 45.0);
        assert_eq!(passes[0].samples.len(), 5);
    }

    #[test]
    fn capacity_at_100_mbps() {
        let p = annotate_link_budget(uniform_pass(45.0, 600), &LinkParams::default());
        assert_eq!(p.duration(), 600.0);
        assert!((p.capacity() - 7500.0).abs() < 1e-9);
        let p = annotate_link_budget(uniform_pass(30.0, 600), &LinkParams::default());
        assert!((p.capacity() - 6000.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_single_sample() {
        let mut p = uniform_pass(4.0, 0);
        p.samples.truncate(1);
        let p = annotate_link_budget(p, &LinkParams::default());
        assert_eq!(p.mean_data_rate(), 0.0);
        assert_eq!(p.capacity(), 0.0);
    }

    #[test]
    fn worst_margin_at_longest_range() {
        let elev = [6.0, 30.0, 70.0, 30.0, 5.5];
        let range = [1700.0, 800.0, 440.0, 800.0, 1800.0];
        let samples: Vec<_> = (0..5)
            .map(|i| sample(i as i64, elev[i], range[i]))
            .collect();
        let mut p = uniform_pass(6.0, 120);
        p.samples = samples;
        let params = LinkParams::default();
        let p = annotate_link_budget(p, &params);
        assert_eq!(p.link.unwrap().worst_margin, link_margin(&params, 1800.0));
    }

    fn brute_force_runs(elev: &[f64], min: f64) -> Vec<(usize, usize)> {
        let mut runs = Vec::new();
        let mut start = None;
        for (i, &e) in elev
            .iter()
            .chain(std::iter::once(&f64::NEG_INFINITY))
            .enumerate()
        {
            match (start, e >= min) {
                (None, true) => start = Some(i),
                (Some(s), false) => {
                    if i - s >= 2 {
                        runs.push((s, i - 1));
                    }
                    start = None;
                }
                _ => {}
            }
        }
        runs
    }

    #[test]
    fn real_trajectory_matches_brute_force() {
        let stations = default_stations();
        for tle in [iss(), sso()] {
            let traj = propagate_trajectory(&tle, &PropagationConfig::new(start())).unwrap();
            for st in &stations {
                let site = st.location();
                let elev: Vec<f64> = traj
                    .samples
                    .iter()
                    .map(|s| look_angles(&site, &s.r_ecf).elevation)
                    .collect();
                let expected = brute_force_runs(&elev, st.min_elevation);
                let passes = detect_passes(&traj, st);
                assert_eq!(passes.len(), expected.len(), "{}", st.id);
                for (p, (a, b)) in passes.iter().zip(expected) {
                    assert_eq!(p.aos, traj.samples[a].t);
                    assert_eq!(p.los, traj.samples[b].t);
                }
                for w in passes.windows(2) {
                    assert!(w[0].los < w[1].aos);
                }
            }
        }
    }

    #[test]
    fn svalbard_visibility_by_orbit() {
        let svalbard = default_stations()
            .into_iter()
            .find(|s| s.id == "svalbard")
            .unwrap();
        let sso_traj = propagate_trajectory(&sso(), &PropagationConfig::new(start())).unwrap();
        assert!(!detect_passes(&sso_traj, &svalbard).is_empty());
        // a 51.6° orbit never climbs high enough for a 5° mask at 78° N
        let iss_traj = propagate_trajectory(&iss(), &PropagationConfig::new(start())).unwrap();
        assert!(detect_passes(&iss_traj, &svalbard).is_empty());
    }
}
