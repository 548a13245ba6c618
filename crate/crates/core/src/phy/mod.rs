//! Beamforming, the cascaded link `V = F·diag(Hw)`, zero-forcing detection,
//! closed-form error probabilities and Monte-Carlo simulation.

mod link;
mod sim;
mod theory;

pub use link::{
    build_link, design_beamformer, detect, transmit, DetectionReport, LinkOptions, LinkState,
    RxObservation, SlotMap,
};
pub use sim::{simulate_abep, simulate_link, AbepEstimate, AbepSetup, ErrorCounts};
pub(crate) use sim::link_theory;
pub use theory::{abep_theoretical, asep_theoretical};
