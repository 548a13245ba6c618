use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::sweep::Sweep;
use crate::channel::{NoiseModel, PathLossModel, RicianParams};
use crate::error::{Error, Result};
use crate::mathcore::check_psk_order;
use crate::qrcodec::{EcLevel, QrSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    AbepSnr,
    AbepNtx,
    AbepKappa,
    QrSnr,
    QrObstruction,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::AbepSnr,
        Scenario::AbepNtx,
        Scenario::AbepKappa,
        Scenario::QrSnr,
        Scenario::QrObstruction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::AbepSnr => "abep_snr",
            Scenario::AbepNtx => "abep_ntx",
            Scenario::AbepKappa => "abep_kappa",
            Scenario::QrSnr => "qr_snr",
            Scenario::QrObstruction => "qr_obstruction",
        }
    }

    pub fn is_qr(self) -> bool {
        matches!(self, Scenario::QrSnr | Scenario::QrObstruction)
    }

    /// Stable tag mixed into the random stream path.
    pub(crate) fn tag(self) -> u64 {
        self as u64 + 1
    }

    /// Config field holding the swept variable.
    pub fn axis(self) -> &'static str {
        match self {
            Scenario::AbepSnr | Scenario::QrSnr => "snr_db",
            Scenario::AbepNtx => "tx",
            Scenario::AbepKappa => "kappa",
            Scenario::QrObstruction => "obstruction",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
                format!("unknown scenario `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    #[default]
    TargetSnr,
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" | "json-lines" | "jsonlines" => Ok(OutputFormat::Jsonl),
            _ => Err(format!("unknown output format `{s}` (expected csv or jsonl)")),
        }
    }
}

/// QR symbol carried by the surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QrSettings {
    pub version: u8,
    pub ec: EcLevel,
    pub mask: Option<u8>,
    pub payload: String,
    /// Light modules on every side of the symbol.
    pub border: usize,
    /// Extra light modules on the bottom and right only.
    pub pad: usize,
}

impl Default for QrSettings {
    fn default() -> Self {
        Self {
            version: 5,
            ec: EcLevel::H,
            mask: None,
            payload: "IRS microwave QR".into(),
            border: 0,
            pad: 1,
        }
    }
}

impl QrSettings {
    pub fn spec(&self) -> Result<QrSpec> {
        let mut spec = QrSpec::new(self.version, self.ec)?.with_border(self.border);
        if let Some(m) = self.mask {
            spec = spec.with_mask(m)?;
        }
        Ok(spec)
    }

    /// Side of the module grid mapped onto the surface.
    pub fn grid_side(&self) -> Result<usize> {
        Ok(self.spec()?.total_side() + self.pad)
    }
}

/// Full description of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub scenario: Scenario,
    /// IRS element count `L`; a perfect square for QR scenarios.
    pub elements: usize,
    /// Transmit antennas `N_t`.
    pub tx: Sweep,
    /// Receive antennas `N_r`.
    pub rx: usize,
    pub modulations: Vec<u32>,
    pub kappa: Sweep,
    /// Average post-equalization SNR γ in dB (target-SNR noise).
    pub snr_db: Sweep,
    /// Obstruction side `D` in elements.
    pub obstruction: Sweep,
    /// Channel realizations (ABEP) or QR transmissions.
    pub trials: usize,
    /// Lower bound on simulated bits per ABEP point.
    pub min_bits: u64,
    pub seed: u64,
    pub noise: NoiseMode,
    pub temperature_k: f64,
    pub bandwidth_hz: f64,
    /// Transmit power in dBm (physical noise mode).
    pub tx_power_dbm: f64,
    pub tx_distance_m: f64,
    pub rx_distance_m: f64,
    pub path_loss: PathLossModel,
    /// Block count for block reduction; chosen as `N_r` when `N_r < L`.
    pub blocks: Option<usize>,
    /// Independent frequency groups of `L/g` elements each.
    pub groups: Option<usize>,
    pub qr: QrSettings,
    pub output: Option<String>,
    pub format: OutputFormat,
    /// Directory for original/recovered bitmap pairs.
    pub bitmaps: Option<String>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self::preset(Scenario::AbepSnr, None)
    }
}

fn sweep(s: &str) -> Sweep {
    s.parse().expect("valid preset sweep")
}

impl SweepConfig {
    /// Defaults for a scenario. For QR scenarios `modulation = 16` selects
    /// the 19×19-element 16-PSK setup, anything else the 38×38 BPSK one.
    pub fn preset(scenario: Scenario, modulation: Option<u32>) -> Self {
        let mut c = Self {
            scenario,
            elements: 64,
            tx: Sweep::single(64.0),
            rx: 64,
            modulations: vec![2, 4, 8, 16],
            kappa: Sweep::single(0.1),
            snr_db: Sweep::single(15.0),
            obstruction: Sweep::single(0.0),
            trials: 1000,
            min_bits: 1_000_000,
            seed: 1,
            noise: NoiseMode::TargetSnr,
            temperature_k: 300.0,
            bandwidth_hz: 1e6,
            tx_power_dbm: 30.0,
            tx_distance_m: 50.0,
            rx_distance_m: 50.0,
            path_loss: PathLossModel::default(),
            blocks: None,
            groups: None,
            qr: QrSettings::default(),
            output: None,
            format: OutputFormat::Csv,
            bitmaps: None,
        };
        match scenario {
            Scenario::AbepSnr => c.snr_db = sweep("0:20:5"),
            Scenario::AbepNtx => c.tx = sweep("8,16,32,64,128"),
            Scenario::AbepKappa => c.kappa = sweep("0,0.1,1,10"),
            Scenario::QrSnr | Scenario::QrObstruction => {
                c.trials = 10_000;
                if modulation == Some(16) {
                    c.modulations = vec![16];
                    c.elements = 19 * 19;
                    c.tx = Sweep::single(19.0);
                    c.rx = 19 * 19;
                    c.snr_db = Sweep::single(30.0);
                    c.obstruction = Sweep::single(5.0);
                } else {
                    c.modulations = vec![2];
                    c.elements = 38 * 38;
                    c.tx = Sweep::single(38.0);
                    c.rx = 19 * 19;
                    c.obstruction = Sweep::single(10.0);
                }
                if scenario == Scenario::QrSnr {
                    c.snr_db = sweep("0:30:5");
                    c.obstruction = Sweep::single(0.0);
                } else if modulation == Some(16) {
                    c.obstruction = sweep("0:15:5");
                } else {
                    c.obstruction = sweep("0:20:5");
                }
            }
        }
        c
    }

    /// Parses JSON over the scenario preset: fields absent from `text` keep
    /// the preset's values, and nested `qr` / `path_loss` objects merge
    /// field by field.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_json_value(value, None, None)
    }


    /// As [`SweepConfig::from_json`], with the preset chosen by explicit
    /// overrides when given.
    pub fn from_json_value(
        value: Value,
        scenario: Option<Scenario>,
        modulation: Option<u32>,
    ) -> Result<Self> {
        let Value::Object(overlay) = value else {
            return Err(Error::config("<root>", "configuration must be a JSON object"));
        };
        let scenario = match scenario {
            Some(s) => s,
            None => match overlay.get("scenario") {
                Some(v) => serde_json::from_value(v.clone()).map_err(|e| Error::config("scenario", e.to_string()))?,
                None => Scenario::AbepSnr,
            },
        };
        let modulation = modulation.or_else(|| {
            overlay
                .get("modulations")
                .and_then(Value::as_array)
                .and_then(|a| a.first())
                .and_then(Value::as_u64)
                .map(|m| m as u32)
        });
        let mut base = serde_json::to_value(Self::preset(scenario, modulation))?;
        let Value::Object(ref mut base_map) = base else {
            unreachable!("config serializes to an object")
        };
        for (k, v) in overlay {
            match (base_map.get_mut(&k), v) {
                (Some(Value::Object(inner)), Value::Object(over)) => {
                    for (ik, iv) in over {
                        inner.insert(ik, iv);
                    }
                }
                (_, v) => {
                    base_map.insert(k, v);
                }
            }
        }
        base_map.insert("scenario".into(), serde_json::to_value(scenario)?);
        let cfg: SweepConfig = serde_json::from_value(base)?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn rician(&self, kappa: f64) -> RicianParams {
        RicianParams {
            kappa,
            tx_distance_m: self.tx_distance_m,
            rx_distance_m: self.rx_distance_m,
        }
    }

    pub fn noise_model(&self, snr_db: f64) -> NoiseModel {
        match self.noise {
            NoiseMode::TargetSnr => NoiseModel::TargetSnr { gamma_db: snr_db },
            NoiseMode::Physical => NoiseModel::Physical {
                temperature_k: self.temperature_k,
                bandwidth_hz: self.bandwidth_hz,
            },
        }
    }

    /// Transmit power in watts; 1 W in target-SNR mode where it cancels.
    pub fn tx_power_w(&self) -> f64 {
        match self.noise {
            NoiseMode::TargetSnr => 1.0,
            NoiseMode::Physical => 10f64.powf((self.tx_power_dbm - 30.0) / 10.0),
        }
    }

    /// Values of the swept variable.
    pub fn axis_values(&self) -> &[f64] {
        match self.scenario {
            Scenario::AbepSnr | Scenario::QrSnr => self.snr_db.values(),
            Scenario::AbepNtx => self.tx.values(),
            Scenario::AbepKappa => self.kappa.values(),
            Scenario::QrObstruction => self.obstruction.values(),
        }
    }

    /// Number of blocks when block reduction is active.
    pub fn block_count(&self) -> Option<usize> {
        match self.blocks {
            Some(b) if b == self.elements => None,
            Some(b) => Some(b),
            None if self.groups.is_none() && self.rx < self.elements => Some(self.rx),
            None => None,
        }
    }

    pub fn irs_side(&self) -> Option<usize> {
        let s = (self.elements as f64).sqrt().round() as usize;
        (s * s == self.elements).then_some(s)
    }

    /// Checks every field; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        let axis = self.scenario.axis();
        for (name, sw) in [
            ("tx", &self.tx),
            ("kappa", &self.kappa),
            ("snr_db", &self.snr_db),
            ("obstruction", &self.obstruction),
        ] {
            if name != axis && sw.len() != 1 {
                return Err(Error::config(
                    name,
                    format!("only `{axis}` is swept in scenario {}; give a single value", self.scenario),
                ));
            }
        }
        if self.elements == 0 {
            return Err(Error::config("elements", "must be at least 1"));
        }
        if self.rx == 0 {
            return Err(Error::config("rx", "must be at least 1"));
        }
        for &t in self.tx.values() {
            if !(t >= 1.0 && t.fract() == 0.0 && t <= 1e6) {
                return Err(Error::config("tx", format!("antenna count {t} is not a positive integer")));
            }
        }
        for &k in self.kappa.values() {
            if !(k >= 0.0) {
                return Err(Error::config("kappa", format!("Rician factor {k} must be non-negative")));
            }
        }
        for &d in self.obstruction.values() {
            if !(d >= 0.0 && d.fract() == 0.0) {
                return Err(Error::config("obstruction", format!("side {d} is not a non-negative integer")));
            }
        }
        if self.modulations.is_empty() {
            return Err(Error::config("modulations", "list is empty"));
        }
        for &m in &self.modulations {
            check_psk_order(m).map_err(|e| Error::config("modulations", e.to_string()))?;
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if !(self.temperature_k > 0.0) {
            return Err(Error::config("temperature_k", "must be positive"));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::config("bandwidth_hz", "must be positive"));
        }
        if !self.tx_power_dbm.is_finite() {
            return Err(Error::config("tx_power_dbm", "must be finite"));
        }
        if !(self.tx_distance_m >= self.path_loss.d0_m) {
            return Err(Error::config("tx_distance_m", "must be at least the reference distance"));
        }
        if !(self.rx_distance_m >= self.path_loss.d0_m) {
            return Err(Error::config("rx_distance_m", "must be at least the reference distance"));
        }
        if !(self.path_loss.d0_m > 0.0) {
            return Err(Error::config("path_loss.d0_m", "must be positive"));
        }
        if self.noise == NoiseMode::Physical && matches!(self.scenario, Scenario::AbepSnr | Scenario::QrSnr) {
            return Err(Error::config("noise", "SNR sweeps need target_snr noise"));
        }
        if let Some(g) = self.groups {
            if self.blocks.is_some() {
                return Err(Error::config("groups", "frequency groups cannot be combined with block reduction"));
            }
            if g == 0 || !self.elements.is_multiple_of(g) {
                return Err(Error::config("groups", format!("{g} groups do not divide {} elements", self.elements)));
            }
            if self.rx < self.elements / g {
                return Err(Error::config(
                    "rx",
                    format!("{} receive antennas cannot separate {} elements per group", self.rx, self.elements / g),
                ));
            }
        }
        if let Some(b) = self.block_count() {
            let side = self.irs_side().ok_or_else(|| {
                Error::config("elements", "block reduction needs a square element grid")
            })?;
            let bs = (b as f64).sqrt().round() as usize;
            if b == 0 || bs * bs != b || side % bs != 0 {
                return Err(Error::config(
                    "blocks",
                    format!("{b} blocks do not tile a {side}x{side} surface with equal square blocks"),
                ));
            }
            if self.rx < b {
                return Err(Error::config("rx", format!("{} receive antennas cannot separate {b} blocks", self.rx)));
            }
        }
        if self.scenario.is_qr() {
            let side = self
                .irs_side()
                .ok_or_else(|| Error::config("elements", "QR scenarios need a square element grid"))?;
            let grid = self.qr.grid_side().map_err(|e| Error::config("qr", e.to_string()))?;
            let spec = self.qr.spec().map_err(|e| Error::config("qr", e.to_string()))?;
            let cap = spec.capacity().map_err(|e| Error::config("qr", e.to_string()))?;
            if self.qr.payload.len() > cap {
                return Err(Error::config(
                    "qr.payload",
                    format!("{} bytes exceed the capacity {cap} of version {} EC {}", self.qr.payload.len(), spec.version, spec.ec),
                ));
            }
            for &d in self.obstruction.values() {
                if d as usize > side {
                    return Err(Error::config("obstruction", format!("side {d} exceeds the {side}-element surface")));
                }
            }
            for &m in &self.modulations {
                super::qr::geometry(self, m, grid)
                    .map_err(|e| Error::config("elements", format!("{m}-PSK: {e}")))?;
            }
        }
        Ok(())
    }
}
