use num_complex::Complex64;
use rayon::prelude::*;

use super::link::{build_link, decide, design_beamformer, transmit, LinkOptions, LinkState};
use super::theory::abep_theoretical;
use crate::channel::{draw_channel_pair, Dims, NoiseModel, PathLossModel, RicianParams};
use crate::error::{Error, Result};
use crate::mathcore::RandomStream;
use crate::modem::{Constellation, EncodedFrame, ThetaFrame};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ErrorCounts {
    pub bits: u64,
    pub bit_errors: u64,
    pub symbols: u64,
    pub symbol_errors: u64,
}

impl ErrorCounts {
    pub fn merge(&mut self, other: &ErrorCounts) {
        self.bits += other.bits;
        self.bit_errors += other.bit_errors;
        self.symbols += other.symbols;
        self.symbol_errors += other.symbol_errors;
    }

    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits as f64
        }
    }

    pub fn ser(&self) -> f64 {
        if self.symbols == 0 {
            0.0
        } else {
            self.symbol_errors as f64 / self.symbols as f64
        }
    }
}

/// Mean of the closed-form ABEP over the link's slots.
pub(crate) fn link_theory(link: &LinkState, m: u32) -> Result<f64> {
    let c = link.c_diag();
    let mut sum = 0.0;
    for &cl in c {
        if cl > 0.0 {
            sum += abep_theoretical(cl, m)?;
        }
    }
    Ok(sum / c.len() as f64)
}

/// Sends `frames` uniformly random frames over `link` and counts errors.
pub fn simulate_link(
    link: &LinkState,
    c: &Constellation,
    frames: usize,
    mask: Option<&[bool]>,
    stream: &mut RandomStream,
) -> Result<ErrorCounts> {
    let slots = link.slots();
    let k = c.bits_per_symbol() as u64;
    let mut counts = ErrorCounts::default();
    let order = c.order() as usize;
    for _ in 0..frames {
        let indices: Vec<usize> = (0..slots.slots()).map(|_| stream.index(order)).collect();
        let theta: Vec<Complex64> = (0..slots.elements())
            .map(|l| c.point(indices[slots.slot_of(l)]))
            .collect();
        let frame = EncodedFrame {
            indices,
            theta: ThetaFrame::new(theta)?,
        };
        let obs = transmit(link, &frame, mask, stream)?;
        let rep = decide(link.equalize(&obs.y), &obs.truth, c);
        counts.merge(&ErrorCounts {
            bits: k * slots.slots() as u64,
            bit_errors: rep.bit_errors as u64,
            symbols: slots.slots() as u64,
            symbol_errors: rep.symbol_errors as u64,
        });
    }
    Ok(counts)
}

/// Parameters of a self-contained ABEP simulation.
#[derive(Debug, Clone)]
pub struct AbepSetup {
    pub dims: Dims,
    pub rician: RicianParams,
    pub path_loss: PathLossModel,
    pub noise: NoiseModel,
    pub order: u32,
    /// Channel realizations.
    pub trials: usize,
    pub frames_per_trial: usize,
    pub tx_power_w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbepEstimate {
    pub abep_sim: f64,
    pub abep_theory: f64,
    /// Binomial standard error `√(p(1−p)/n)`.
    pub stderr: f64,
    pub bits: u64,
}

/// Monte-Carlo ABEP with the mean closed form over the same realizations.
/// Trial `t` uses the stream `seed → [t]`, so the result does not depend on
/// the number of worker threads.
pub fn simulate_abep(setup: &AbepSetup, seed: u64) -> Result<AbepEstimate> {
    if setup.trials == 0 || setup.frames_per_trial == 0 {
        return Err(Error::InvalidParameter("trials and frames must be at least 1".into()));
    }
    let c = Constellation::psk(setup.order)?;
    let root = RandomStream::new(seed);
    let per_trial: Vec<Result<(ErrorCounts, f64)>> = (0..setup.trials)
        .into_par_iter()
        .map(|t| {
            let mut s = root.derive(&[t as u64]);
            let ch = draw_channel_pair(&mut s, setup.dims, &setup.rician, &setup.path_loss)?;
            let w = design_beamformer(&ch)?;
            let opts = LinkOptions {
                tx_power_w: setup.tx_power_w,
                slots: None,
            };
            let link = build_link(&ch, &w, &setup.noise, &opts)?;
            let theory = link_theory(&link, setup.order)?;
            let counts = simulate_link(&link, &c, setup.frames_per_trial, None, &mut s)?;
            Ok((counts, theory))
        })
        .collect();
    let mut total = ErrorCounts::default();
    let mut theory = 0.0;
    for r in per_trial {
        let (counts, th) = r?;
        total.merge(&counts);
        theory += th;
    }
    let p = total.ber();
    Ok(AbepEstimate {
        abep_sim: p,
        abep_theory: theory / setup.trials as f64,
        stderr: (p * (1.0 - p) / total.bits as f64).sqrt(),
        bits: total.bits,
    })
}
