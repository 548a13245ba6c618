use rayon::prelude::*;

use super::abep::draw_links;
use super::config::{Scenario, SweepConfig};
use super::results::{Metric, ResultRow};
use super::{with_pool, CHANNEL_STREAM, DATA_STREAM};
use crate::error::{Error, Result};
use crate::mathcore::RandomStream;
use crate::modem::{frames_to_modules, modules_to_frames, obstruction_mask, Constellation, EncodedFrame, MappingPlan, ModuleMatrix, ThetaFrame};
use crate::phy::{detect, transmit, LinkState, SlotMap};
use crate::qrcodec::{qr_decode, qr_encode};

/// Original and recovered module grids of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct BitmapPair {
    pub scenario: Scenario,
    pub x: f64,
    pub m: u32,
    pub original: ModuleMatrix,
    pub recovered: ModuleMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QrOutcome {
    pub rows: Vec<ResultRow>,
    pub bitmaps: Vec<BitmapPair>,
}

/// Mapping of a `grid`-wide module matrix onto the configured surface.
pub(crate) fn geometry(cfg: &SweepConfig, m: u32, grid: usize) -> Result<(MappingPlan, Constellation)> {
    let c = Constellation::psk(m)?;
    let side = cfg
        .irs_side()
        .ok_or_else(|| Error::config("elements", "QR scenarios need a square element grid"))?;
    let plan = MappingPlan::new(side, grid, &c, cfg.block_count())?;
    Ok((plan, c))
}

/// Sends one frame through every group link and returns per-slot decisions.
fn send_frame(
    links: &[LinkState],
    frame: &EncodedFrame,
    mask: Option<&[bool]>,
    c: &Constellation,
    stream: &mut RandomStream,
) -> Result<Vec<usize>> {
    if links.len() == 1 {
        let obs = transmit(&links[0], frame, mask, stream)?;
        return Ok(detect(&links[0], &obs, c)?.decided);
    }
    // Frequency groups: contiguous element ranges with one symbol each.
    let mut decided = Vec::with_capacity(frame.indices.len());
    let mut start = 0;
    for link in links {
        let n = link.elements();
        let sub = EncodedFrame {
            indices: frame.indices[start..start + n].to_vec(),
            theta: ThetaFrame::new(frame.theta.as_slice()[start..start + n].to_vec())?,
        };
        let sub_mask = mask.map(|m| &m[start..start + n]);
        let obs = transmit(link, &sub, sub_mask, stream)?;
        decided.extend(detect(link, &obs, c)?.decided);
        start += n;
    }
    Ok(decided)
}

struct TrialPoint {
    recovered: bool,
    recognized: bool,
    grid: Option<ModuleMatrix>,
}

/// Recovery and recognition probabilities of a QR symbol shown on the
/// surface, versus SNR or obstruction size.
pub fn run_qr_experiment(cfg: &SweepConfig, threads: Option<usize>) -> Result<QrOutcome> {
    if !cfg.scenario.is_qr() {
        return Err(Error::config("scenario", format!("{} is not a QR scenario", cfg.scenario)));
    }
    cfg.validate()?;
    let spec = cfg.qr.spec()?;
    let payload = cfg.qr.payload.as_bytes().to_vec();
    let original = qr_encode(&payload, &spec)?.pad_bottom_right(cfg.qr.pad);
    let points = cfg.axis_values().to_vec();
    let orders = cfg.modulations.clone();

    let setups: Vec<(MappingPlan, Constellation, Vec<Vec<EncodedFrame>>)> = orders
        .iter()
        .map(|&m| {
            let (plan, c) = geometry(cfg, m, original.side())?;
            let frames = modules_to_frames(&original, &plan, &c)?;
            Ok((plan, c, vec![frames]))
        })
        .collect::<Result<_>>()?;
    let masks: Vec<Option<Vec<bool>>> = points
        .iter()
        .map(|&x| {
            let d = if cfg.scenario == Scenario::QrObstruction { x } else { cfg.obstruction.first() } as usize;
            if d == 0 {
                return Ok(None);
            }
            Ok(Some(obstruction_mask(&setups[0].0.clone().with_obstruction(d)?)))
        })
        .collect::<Result<_>>()?;
    let slots = cfg.block_count().map(|_| SlotMap::from_plan(&setups[0].0));

    let root = RandomStream::new(cfg.seed);
    let tag = cfg.scenario.tag();
    let per_trial: Vec<Result<Vec<Vec<TrialPoint>>>> = with_pool(threads, || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let cs = root.derive(&[CHANNEL_STREAM, tag, 0, t as u64]);
                let mut links = draw_links(cfg, &cs, cfg.tx.first() as usize, cfg.kappa.first(), slots.as_ref())?;
                let mut out = Vec::with_capacity(points.len());
                for (p, &x) in points.iter().enumerate() {
                    let snr = if cfg.scenario == Scenario::QrSnr { x } else { cfg.snr_db.first() };
                    for link in &mut links {
                        link.set_noise(&cfg.noise_model(snr))?;
                    }
                    let mut row = Vec::with_capacity(orders.len());
                    for (&m, (plan, c, frames)) in orders.iter().zip(&setups) {
                        let mut ds = root.derive(&[DATA_STREAM, tag, p as u64, u64::from(m), t as u64]);
                        let decided = frames[0]
                            .iter()
                            .map(|f| send_frame(&links, f, masks[p].as_deref(), c, &mut ds))
                            .collect::<Result<Vec<_>>>()?;
                        let grid = frames_to_modules(&decided, plan, c)?;
                        let recovered = grid == original;
                        let recognized = recovered
                            || qr_decode(&grid, cfg.qr.border).is_ok_and(|d| d == payload);
                        row.push(TrialPoint {
                            recovered,
                            recognized,
                            grid: (t == 0).then_some(grid),
                        });
                    }
                    out.push(row);
                }
                Ok(out)
            })
            .collect()
    });

    let mut counts = vec![vec![(0u64, 0u64); orders.len()]; points.len()];
    let mut samples: Vec<Vec<Option<ModuleMatrix>>> = vec![vec![None; orders.len()]; points.len()];
    for trial in per_trial {
        for (p, row) in trial?.into_iter().enumerate() {
            for (mi, tp) in row.into_iter().enumerate() {
                counts[p][mi].0 += u64::from(tp.recovered);
                counts[p][mi].1 += u64::from(tp.recognized);
                if let Some(g) = tp.grid {
                    samples[p][mi] = Some(g);
                }
            }
        }
    }

    let n = cfg.trials as u64;
    let mut rows = Vec::new();
    let mut bitmaps = Vec::new();
    for (p, &x) in points.iter().enumerate() {
        for (mi, &m) in orders.iter().enumerate() {
            let (rec, recog) = counts[p][mi];
            let base = ResultRow {
                scenario: cfg.scenario.name().to_string(),
                x,
                m,
                metric: Metric::RecoveryProb,
                value: rec as f64 / n as f64,
                trials: n,
                seed: cfg.seed,
            };
            rows.push(base.clone());
            rows.push(ResultRow { metric: Metric::RecognitionProb, value: recog as f64 / n as f64, ..base });
            if let Some(g) = samples[p][mi].take() {
                bitmaps.push(BitmapPair {
                    scenario: cfg.scenario,
                    x,
                    m,
                    original: original.clone(),
                    recovered: g,
                });
            }
        }
    }
    Ok(QrOutcome { rows, bitmaps })
}
