use serde::{Deserialize, Serialize};

use crate::orbitcore::GeodeticPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Band {
    S,
    X,
    Ka,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStation {
    pub id: String,
    /// degrees
    pub lat: f64,
    /// degrees
    pub lon: f64,
    /// km
    #[serde(default)]
    pub alt: f64,
    #[serde(default)]
    pub provider: String,
    #[serde(default = "default_bands")]
    pub bands: Vec<Band>,
    /// degrees
    #[serde(default = "default_min_elevation")]
    pub min_elevation: f64,
}

fn default_bands() -> Vec<Band> {
    vec![Band::S, Band::X]
}

fn default_min_elevation() -> f64 {
    5.0
}

impl GroundStation {
    pub fn new(id: &str, lat: f64, lon: f64, provider: &str, ka: bool) -> Self {
        let mut bands = default_bands();
        if ka {
            bands.push(Band::Ka);
        }
        Self {
            id: id.to_string(),
            lat,
            lon,
            alt: 0.0,
            provider: provider.to_string(),
            bands,
            min_elevation: default_min_elevation(),
        }
    }

    pub fn location(&self) -> GeodeticPoint {
        GeodeticPoint::new(self.lat, self.lon, self.alt)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(-90.0..=90.0).contains(&self.lat) {
            return Err(format!(
                "station {}: latitude {} out of range",
                self.id, self.lat
            ));
        }
        if !(-180.0..=180.0).contains(&self.lon) {
            return Err(format!(
                "station {}: longitude {} out of range",
                self.id, self.lon
            ));
        }
        if self.min_elevation < 0.0 {
            return Err(format!("station {}: negative min elevation", self.id));
        }
        Ok(())
    }
}

/// The built-in 12-station network. All stations carry S and X band; three
/// high-latitude sites add Ka.
pub fn default_stations() -> Vec<GroundStation> {
    vec![
        GroundStation::new("svalbard", 78.23, 15.39, "KSAT", true),
        GroundStation::new("troll", -72.01, 2.53, "KSAT", false),
        GroundStation::new("awarua", -46.53, 168.38, "KSAT", false),
        GroundStation::new("fairbanks", 64.86, -147.85, "NASA", true),
        GroundStation::new("wallops", 37.94, -75.47, "NASA", false),
        GroundStation::new("mcmurdo", -77.85, 166.67, "NASA", false),
        GroundStation::new("singapore", 1.35, 103.82, "AWS", false),
        GroundStation::new("bahrain", 26.07, 50.56, "AWS", false),
        GroundStation::new("oregon", 43.80, -120.55, "AWS", true),
        GroundStation::new("cape-town", -33.93, 18.42, "AWS", false),
        GroundStation::new("stockholm", 59.33, 18.07, "AWS", false),
        GroundStation::new("sydney", -33.87, 151.21, "AWS", false),
    ]
}
