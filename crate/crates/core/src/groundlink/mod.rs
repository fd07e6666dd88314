//! Ground-station catalog, pass prediction and per-pass link budgets.

mod link;
mod passes;
mod stations;

pub use link::{
    ber_from_margin, data_rate, fspl, link_margin, LinkParams, BER_HIGH, BER_LOW, BER_MID,
};
pub use passes::{
    annotate_link_budget, detect_passes, detect_passes_from_profile, LinkAnnotation,
    PassPrediction, PassSample,
};
pub use stations::{default_stations, Band, GroundStation};
