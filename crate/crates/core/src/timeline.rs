//! Merges illumination windows and ground passes into the window timeline the
//! scheduler consumes. Each window carries one resource envelope: power,
//! thermal limit, compute share, comms rate and (for passes) the station.

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groundlink::PassPrediction;
use crate::skymodel::{Illumination, IlluminationWindow};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimelineError {
    #[error("illumination windows leave a gap at {0}")]
    Gap(DateTime<Utc>),
    #[error("illumination windows overlap at {0}")]
    Overlap(DateTime<Utc>),
    #[error("no illumination windows")]
    Empty,
    #[error("invalid envelope config: {0}")]
    Config(String),
}

impl TimelineError {
    pub fn code(&self) -> &'static str {
        match self {
            TimelineError::Gap(_) | TimelineError::Overlap(_) | TimelineError::Empty => {
                "TIMELINE_INTEGRITY"
            }
            TimelineError::Config(_) => "ENVELOPE_CONFIG",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvelopeConfig {
    /// W
    pub sunlit_power: f64,
    /// W
    pub eclipse_power: f64,
    pub sunlit_compute: f64,
    pub eclipse_compute: f64,
    /// W
    pub thermal_limit: f64,
    /// s
    pub min_orbit_window: f64,
    /// s
    pub min_pass_window: f64,
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        Self {
            sunlit_power: 80.0,
            eclipse_power: 25.0,
            sunlit_compute: 1.0,
            eclipse_compute: 0.6,
            thermal_limit: 40.0,
            min_orbit_window: 30.0,
            min_pass_window: 10.0,
        }
    }
}

impl EnvelopeConfig {
    pub fn validate(&self) -> Result<(), TimelineError> {
        let unit = 0.0..=1.0;
        if !(self.eclipse_power < self.sunlit_power) {
            return Err(TimelineError::Config(
                "eclipse power must be below sunlit power".into(),
            ));
        }
        if !unit.contains(&self.sunlit_compute) || !unit.contains(&self.eclipse_compute) {
            return Err(TimelineError::Config(
                "compute shares must lie in [0, 1]".into(),
            ));
        }
        if !(self.thermal_limit > 0.0) {
            return Err(TimelineError::Config(
                "thermal limit must be positive".into(),
            ));
        }
        Ok(())
    }

    fn envelope(&self, kind: Illumination) -> (f64, f64) {
        match kind {
            Illumination::Sunlit => (self.sunlit_power, self.sunlit_compute),
            Illumination::Eclipse => (self.eclipse_power, self.eclipse_compute),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    OrbitSunlit,
    OrbitEclipse,
    Pass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitalWindow {
    pub id: usize,
    pub t_start: DateTime<Utc>,
    pub t_end: DateTime<Utc>,
    /// W
    pub power: f64,
    /// W
    pub thermal_limit: f64,
    pub compute: f64,
    /// Mbps, zero outside passes
    pub comms_rate: f64,
    pub station: Option<String>,
    pub kind: WindowKind,
    pub illumination: Illumination,
    pub pass_ref: Option<usize>,
}

impl OrbitalWindow {
    /// seconds
    pub fn duration(&self) -> f64 {
        (self.t_end - self.t_start).num_milliseconds() as f64 / 1000.0
    }
}

fn secs(a: DateTime<Utc>, b: DateTime<Utc>) -> f64 {
    (b - a).num_milliseconds() as f64 / 1000.0
}

struct Contact<'a> {
    start: DateTime<Utc>,
    end: DateTime<Utc>,
    pass: &'a PassPrediction,
}

/// Keeps one contact at a time. Passes are taken in AOS order; a later pass
/// that overlaps an earlier one keeps only the part after it.
fn resolve_contacts<'a>(
    passes: &'a [PassPrediction],
    from: DateTime<Utc>,
    to: DateTime<Utc>,
) -> Vec<Contact<'a>> {
    let mut ordered: Vec<&PassPrediction> =
        passes.iter().filter(|p| p.mean_data_rate() > 0.0).collect();
    ordered.sort_by(|a, b| (a.aos, &a.station_id, a.id).cmp(&(b.aos, &b.station_id, b.id)));
    let mut cursor = from;
    let mut out = Vec::new();
    for p in ordered {
        let start = p.aos.max(cursor);
        let end = p.los.min(to);
        if end > start {
            out.push(Contact {
                start,
                end,
                pass: p,
            });
            cursor = end;
        }
    }
    out
}

fn check_tiling(illum: &[IlluminationWindow]) -> Result<(), TimelineError> {
    if illum.is_empty() {
        return Err(TimelineError::Empty);
    }
    for pair in illum.windows(2) {
        if pair[1].start > pair[0].end {
            return Err(TimelineError::Gap(pair[0].end));
        }
        if pair[1].start < pair[0].end {
            return Err(TimelineError::Overlap(pair[1].start));
        }
    }
    Ok(())
}

pub fn build_timeline(
    illum: &[IlluminationWindow],
    passes: &[PassPrediction],
    cfg: &EnvelopeConfig,
) -> Result<Vec<OrbitalWindow>, TimelineError> {
    cfg.validate()?;
    check_tiling(illum)?;
    let horizon_start = illum[0].start;
    let horizon_end = illum[illum.len() - 1].end;
    let contacts = resolve_contacts(passes, horizon_start, horizon_end);

    let min_orbit = Duration::milliseconds((cfg.min_orbit_window * 1000.0).round() as i64);
    let min_pass = Duration::milliseconds((cfg.min_pass_window * 1000.0).round() as i64);
    let mut out: Vec<OrbitalWindow> = Vec::new();

    for seg in illum {
        let (power, compute) = cfg.envelope(seg.kind);
        let orbit_kind = match seg.kind {
            Illumination::Sunlit => WindowKind::OrbitSunlit,
            Illumination::Eclipse => WindowKind::OrbitEclipse,
        };
        let window = |t_start, t_end, kind, contact: Option<&Contact>| OrbitalWindow {
            id: 0,
            t_start,
            t_end,
            power,
            thermal_limit: cfg.thermal_limit,
            compute,
            comms_rate: contact.map_or(0.0, |c| c.pass.mean_data_rate()),
            station: contact.map(|c| c.pass.station_id.clone()),
            kind,
            illumination: seg.kind,
            pass_ref: contact.map(|c| c.pass.id),
        };

        let mut cursor = seg.start;
        for c in &contacts {
            let start = c.start.max(seg.start);
            let end = c.end.min(seg.end);
            if end - start < min_pass {
                // too short to use; the time stays with the orbit window
                continue;
            }
            if start - cursor >= min_orbit {
                out.push(window(cursor, start, orbit_kind, None));
            }
            out.push(window(start, end, WindowKind::Pass, Some(c)));
            cursor = end;
        }
        if seg.end - cursor >= min_orbit {
            out.push(window(cursor, seg.end, orbit_kind, None));
        }
    }

    for (i, w) in out.iter_mut().enumerate() {
        w.id = i;
    }
    Ok(out)
}

/// Seconds of the horizon not covered by any window (dropped slivers).
pub fn uncovered_seconds(illum: &[IlluminationWindow], windows: &[OrbitalWindow]) -> f64 {
    let horizon = secs(illum[0].start, illum[illum.len() - 1].end);
    horizon - windows.iter().map(OrbitalWindow::duration).sum::<f64>()
}
