use serde::{Deserialize, Serialize};

pub const BER_HIGH: f64 = 1e-8;
pub const BER_MID: f64 = 1e-6;
pub const BER_LOW: f64 = 1e-5;

/// X-band link budget inputs. Gains in dBi, powers in dBW, losses in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkParams {
    /// GHz
    pub frequency: f64,
    pub tx_power: f64,
    pub tx_gain: f64,
    pub rx_gain: f64,
    pub impl_loss: f64,
    pub atm_loss: f64,
    pub rain_margin: f64,
    /// Added to the margin before the BER thresholds (140/135 dB) are applied.
    /// It stands in for the receiver figure-of-merit and noise-floor terms the
    /// margin formula leaves out. Set to 0 for the bare thresholds.
    pub margin_reference_offset: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            frequency: 8.2,
            tx_power: 10.0,
            tx_gain: 6.0,
            rx_gain: 34.0,
            impl_loss: 2.0,
            atm_loss: 0.5,
            rain_margin: 3.0,
            margin_reference_offset: 260.0,
        }
    }
}

impl LinkParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.frequency <= 0.0 {
            return Err("frequency must be positive".into());
        }
        if self.impl_loss < 0.0 || self.atm_loss < 0.0 || self.rain_margin < 0.0 {
            return Err("losses must be non-negative".into());
        }
        Ok(())
    }
}

/// Free-space path loss in dB for a slant range in km and carrier in GHz.
pub fn fspl(d_km: f64, f_ghz: f64) -> f64 {
    20.0 * d_km.log10() + 20.0 * f_ghz.log10() + 92.45
}

pub fn link_margin(params: &LinkParams, d_km: f64) -> f64 {
    params.tx_power + params.tx_gain + params.rx_gain
        - fspl(d_km, params.frequency)
        - params.impl_loss
        - params.atm_loss
        - params.rain_margin
}

/// Achievable X-band rate in Mbps as a step function of elevation (degrees).
pub fn data_rate(elevation: f64) -> f64 {
    match elevation {
        e if e < 5.0 => 0.0,
        e if e < 10.0 => 25.0,
        e if e < 20.0 => 50.0,
        e if e < 40.0 => 80.0,
        e if e < 60.0 => 100.0,
        _ => 120.0,
    }
}

pub fn ber_from_margin(margin: f64, params: &LinkParams) -> f64 {
    let m = margin + params.margin_reference_offset;
    if m > 140.0 {
        BER_HIGH
    } else if m > 135.0 {
        BER_MID
    } else {
        BER_LOW
    }
}
