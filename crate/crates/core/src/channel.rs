//! Rician fading channels with log-distance path loss, and receiver noise.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mathcore::{ComplexMatrix, RandomStream};

/// Boltzmann constant in J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Element, transmit-antenna and receive-antenna counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub elements: usize,
    pub tx: usize,
    pub rx: usize,
}

impl Dims {
    pub fn new(elements: usize, tx: usize, rx: usize) -> Self {
        Self { elements, tx, rx }
    }

    fn validate(&self) -> Result<()> {
        if self.elements == 0 || self.tx == 0 || self.rx == 0 {
            return Err(Error::InvalidParameter(format!(
                "dimensions must be positive, got L={} Nt={} Nr={}",
                self.elements, self.tx, self.rx
            )));
        }
        Ok(())
    }
}

/// The two hops of the cascaded link: `H` (IRS ← TX, `L × N_t`) and
/// `F` (RX ← IRS, `N_r × L`).
#[derive(Debug, Clone)]
pub struct ChannelPair {
    h: ComplexMatrix,
    f: ComplexMatrix,
}

impl ChannelPair {
    pub fn new(h: ComplexMatrix, f: ComplexMatrix) -> Result<Self> {
        if h.rows() != f.cols() || h.rows() == 0 || h.cols() == 0 || f.rows() == 0 {
            return Err(Error::InvalidParameter(format!(
                "inconsistent channel shapes: H is {}x{}, F is {}x{}",
                h.rows(),
                h.cols(),
                f.rows(),
                f.cols()
            )));
        }
        if !h.is_finite() || !f.is_finite() {
            return Err(Error::InvalidParameter("channel has non-finite entries".into()));
        }
        Ok(Self { h, f })
    }

    pub fn h(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn f(&self) -> &ComplexMatrix {
        &self.f
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.h.rows(), self.h.cols(), self.f.rows())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RicianParams {
    /// LOS-to-scattered power ratio.
    pub kappa: f64,
    pub tx_distance_m: f64,
    pub rx_distance_m: f64,
}

impl Default for RicianParams {
    fn default() -> Self {
        Self {
            kappa: 0.1,
            tx_distance_m: 50.0,
            rx_distance_m: 50.0,
        }
    }
}

/// `PL(d) = PL₀ − slope·log₁₀(d/d₀)` in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossModel {
    pub pl0_db: f64,
    pub slope: f64,
    pub d0_m: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        Self {
            pl0_db: -30.0,
            slope: 25.0,
            d0_m: 1.0,
        }
    }
}

/// Linear power gain of the path-loss model at distance `d_m`.
pub fn path_loss_linear(model: &PathLossModel, d_m: f64) -> Result<f64> {
    if !(model.d0_m > 0.0) || !(d_m >= model.d0_m) || !d_m.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "distance {d_m} m is below the reference distance {} m",
            model.d0_m
        )));
    }
    let db = model.pl0_db - model.slope * (d_m / model.d0_m).log10();
    Ok(10f64.powf(db / 10.0))
}

/// Half-wavelength uniform linear array response, unit-modulus entries.
fn steering(n: usize, angle: f64) -> Vec<Complex64> {
    let phase = PI * angle.cos();
    (0..n)
        .map(|k| Complex64::from_polar(1.0, phase * k as f64))
        .collect()
}

/// One Rician draw of size `rows × cols` scaled to per-entry mean power `gain`.
fn rician_matrix(
    stream: &mut RandomStream,
    rows: usize,
    cols: usize,
    kappa: f64,
    gain: f64,
) -> ComplexMatrix {
    let los_amp = (kappa / (1.0 + kappa)).sqrt();
    let nlos_amp = (1.0 / (1.0 + kappa)).sqrt();
    let a_rx = steering(rows, PI * stream.uniform());
    let a_tx = steering(cols, PI * stream.uniform());
    let scale = gain.sqrt();
    ComplexMatrix::from_fn(rows, cols, |r, c| {
        let los = a_rx[r] * a_tx[c].conj();
        let nlos = stream.complex_gaussian(1.0);
        (los * los_amp + nlos * nlos_amp) * scale
    })
}

/// Draws `H` and `F` independently from the Rician model.
///
/// Each matrix is `√PL(d)·(√(κ/(1+κ))·a_rx a_txᴴ + √(1/(1+κ))·A)` with random
/// array angles in `[0, π)` and `A` i.i.d. CN(0, 1).
pub fn draw_channel_pair(
    stream: &mut RandomStream,
    dims: Dims,
    ric: &RicianParams,
    pl: &PathLossModel,
) -> Result<ChannelPair> {
    dims.validate()?;
    if !(ric.kappa >= 0.0) || !ric.kappa.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Rician factor must be a finite non-negative number, got {}",
            ric.kappa
        )));
    }
    let g_tx = path_loss_linear(pl, ric.tx_distance_m)?;
    let g_rx = path_loss_linear(pl, ric.rx_distance_m)?;
    let h = rician_matrix(stream, dims.elements, dims.tx, ric.kappa, g_tx);
    let f = rician_matrix(stream, dims.rx, dims.elements, ric.kappa, g_rx);
    ChannelPair::new(h, f)
}

/// How the receiver noise power is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseModel {
    /// Thermal noise `k_B·T·B`.
    Physical { temperature_k: f64, bandwidth_hz: f64 },
    /// Calibrated per channel realization so that the mean post-equalization
    /// SNR over elements equals `gamma_db`.
    TargetSnr { gamma_db: f64 },
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::TargetSnr { gamma_db: 15.0 }
    }
}

impl NoiseModel {
    pub fn physical_default() -> Self {
        NoiseModel::Physical {
            temperature_k: 300.0,
            bandwidth_hz: 1e6,
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Noise variance σ².
///
/// In target-SNR mode `gains` must hold `[UUᴴ]_ll` for a σ-independent
/// equalizer; the result `Σ_l (1/g_l) / (γ·L)` makes the mean of `1/(σ²g_l)`
/// equal to `γ`.
pub fn noise_variance(model: &NoiseModel, gains: Option<&[f64]>) -> Result<f64> {
    match *model {
        NoiseModel::Physical {
            temperature_k,
            bandwidth_hz,
        } => {
            if !(temperature_k > 0.0 && bandwidth_hz > 0.0) {
                return Err(Error::InvalidParameter(
                    "temperature and bandwidth must be positive".into(),
                ));
            }
            Ok(BOLTZMANN * temperature_k * bandwidth_hz)
        }
        NoiseModel::TargetSnr { gamma_db } => {
            let gains = gains.ok_or_else(|| {
                Error::InvalidParameter("target-SNR noise needs equalizer gains".into())
            })?;
            if gains.is_empty() || gains.iter().any(|&g| !(g > 0.0 && g.is_finite())) {
                return Err(Error::InvalidParameter(
                    "equalizer gains must be positive and finite".into(),
                ));
            }
            if !gamma_db.is_finite() {
                return Err(Error::InvalidParameter(format!("invalid SNR {gamma_db} dB")));
            }
            let gamma = db_to_linear(gamma_db);
            let inv_sum: f64 = gains.iter().map(|g| 1.0 / g).sum();
            Ok(inv_sum / (gamma * gains.len() as f64))
        }
    }
}
