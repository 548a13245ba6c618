use rayon::prelude::*;

use super::config::{Scenario, SweepConfig};
use super::results::{Metric, ResultRow};
use super::{with_pool, CHANNEL_STREAM, DATA_STREAM};
use crate::channel::{draw_channel_pair, Dims};
use crate::error::{Error, Result};
use crate::mathcore::RandomStream;
use crate::modem::Constellation;
use crate::phy::{build_link, design_beamformer, link_theory, simulate_link, ErrorCounts, LinkOptions, LinkState, SlotMap};

/// Per sweep point and order: error counts and the summed closed form.
type PointTotals = Vec<Vec<(ErrorCounts, f64)>>;

/// One channel realization: a link per frequency group.
pub(crate) fn draw_links(
    cfg: &SweepConfig,
    stream: &RandomStream,
    tx: usize,
    kappa: f64,
    slots: Option<&SlotMap>,
) -> Result<Vec<LinkState>> {
    let groups = cfg.groups.unwrap_or(1);
    let dims = Dims::new(cfg.elements / groups, tx, cfg.rx);
    let ric = cfg.rician(kappa);
    let noise = cfg.noise_model(cfg.snr_db.first());
    let opts = LinkOptions {
        tx_power_w: cfg.tx_power_w(),
        slots: slots.cloned(),
    };
    (0..groups)
        .map(|g| {
            let mut s = stream.derive(&[g as u64]);
            let ch = draw_channel_pair(&mut s, dims, &ric, &cfg.path_loss)?;
            let w = design_beamformer(&ch)?;
            build_link(&ch, &w, &noise, &opts)
        })
        .collect()
}

/// ABEP versus SNR, transmit antennas, or Rician factor.
///
/// Channel realization `t` is shared by every point whose channel
/// parameters coincide (all SNR points), and every `(point, M, t)` draws its
/// symbols and noise from its own stream.
pub fn run_abep_sweep(cfg: &SweepConfig, threads: Option<usize>) -> Result<Vec<ResultRow>> {
    if cfg.scenario.is_qr() {
        return Err(Error::config("scenario", format!("{} is not an ABEP scenario", cfg.scenario)));
    }
    cfg.validate()?;
    let points = cfg.axis_values().to_vec();
    let orders = cfg.modulations.clone();
    let constellations: Vec<Constellation> =
        orders.iter().map(|&m| Constellation::psk(m)).collect::<std::result::Result<_, _>>()?;
    let slots = match cfg.block_count() {
        Some(b) => Some(SlotMap::blocks(cfg.irs_side().expect("validated"), b)?),
        None => None,
    };
    let symbols_per_frame = slots.as_ref().map_or(cfg.elements, |s| s.slots());

    // Channel keys: SNR points share one channel configuration.
    let shared = cfg.scenario == Scenario::AbepSnr;
    let keys: Vec<Vec<usize>> = if shared {
        vec![(0..points.len()).collect()]
    } else {
        (0..points.len()).map(|p| vec![p]).collect()
    };
    let root = RandomStream::new(cfg.seed);
    let tag = cfg.scenario.tag();

    let per_trial: Vec<Result<PointTotals>> = with_pool(threads, || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut out = vec![vec![(ErrorCounts::default(), 0.0); orders.len()]; points.len()];
                for (key, members) in keys.iter().enumerate() {
                    let x = points[members[0]];
                    let tx = if cfg.scenario == Scenario::AbepNtx { x as usize } else { cfg.tx.first() as usize };
                    let kappa = if cfg.scenario == Scenario::AbepKappa { x } else { cfg.kappa.first() };
                    let cs = root.derive(&[CHANNEL_STREAM, tag, key as u64, t as u64]);
                    let mut links = draw_links(cfg, &cs, tx, kappa, slots.as_ref())?;
                    for &p in members {
                        let snr = if shared { points[p] } else { cfg.snr_db.first() };
                        for link in &mut links {
                            link.set_noise(&cfg.noise_model(snr))?;
                        }
                        for (mi, (&m, c)) in orders.iter().zip(&constellations).enumerate() {
                            let bits_per_frame = (symbols_per_frame * c.bits_per_symbol()) as u64;
                            let denom = cfg.trials as u64 * bits_per_frame;
                            let frames = cfg.min_bits.div_ceil(denom).max(1) as usize;
                            let mut ds = root.derive(&[DATA_STREAM, tag, p as u64, u64::from(m), t as u64]);
                            let mut counts = ErrorCounts::default();
                            let mut theory = 0.0;
                            for link in &links {
                                counts.merge(&simulate_link(link, c, frames, None, &mut ds)?);
                                theory += link_theory(link, m)?;
                            }
                            out[p][mi] = (counts, theory / links.len() as f64);
                        }
                    }
                }
                Ok(out)
            })
            .collect()
    });

    let mut totals = vec![vec![(ErrorCounts::default(), 0.0); orders.len()]; points.len()];
    for trial in per_trial {
        for (p, row) in trial?.into_iter().enumerate() {
            for (mi, (counts, theory)) in row.into_iter().enumerate() {
                totals[p][mi].0.merge(&counts);
                totals[p][mi].1 += theory;
            }
        }
    }

    let mut rows = Vec::with_capacity(points.len() * orders.len() * 3);
    for (p, &x) in points.iter().enumerate() {
        for (mi, &m) in orders.iter().enumerate() {
            let (counts, theory_sum) = &totals[p][mi];
            let sim = counts.ber();
            let stderr = (sim * (1.0 - sim) / counts.bits as f64).sqrt();
            let base = ResultRow {
                scenario: cfg.scenario.name().to_string(),
                x,
                m,
                metric: Metric::AbepTheory,
                value: theory_sum / cfg.trials as f64,
                trials: cfg.trials as u64,
                seed: cfg.seed,
            };
            rows.push(base.clone());
            rows.push(ResultRow { metric: Metric::AbepSim, value: sim, trials: counts.bits, ..base.clone() });
            rows.push(ResultRow { metric: Metric::Stderr, value: stderr, trials: counts.bits, ..base });
        }
    }
    Ok(rows)
}
