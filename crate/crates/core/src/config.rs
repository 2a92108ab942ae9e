//! Scenario definition: geometry, large-scale fading, RIS hardware and the
//! power budget.
//!
//! Every field is stored in linear SI units (watts, meters, ratios). Config
//! files may write scalar fields either as plain numbers or as strings with a
//! `dB`/`dBm` suffix; conversion happens once, here.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::units::{dbm_to_watts, parse_quantity};

pub type Point3 = [f64; 3];

/// Statistical model of the per-element RIS phase error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseNoiseModel {
    /// Von Mises with zero mean and the given concentration.
    VonMises {
        concentration: f64,
    },
    /// Uniform on `[-half_width, half_width]`.
    Uniform {
        half_width: f64,
    },
    None,
}

/// Family of a phase-noise model, without its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseNoiseKind {
    VonMises,
    Uniform,
    None,
}

impl PhaseNoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            PhaseNoiseKind::VonMises => "von_mises",
            PhaseNoiseKind::Uniform => "uniform",
            PhaseNoiseKind::None => "none",
        }
    }
}

impl std::str::FromStr for PhaseNoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "von_mises" | "vonmises" | "vm" => Ok(PhaseNoiseKind::VonMises),
            "uniform" | "uf" => Ok(PhaseNoiseKind::Uniform),
            "none" => Ok(PhaseNoiseKind::None),
            other => Err(Error::Parse(format!("unknown phase-noise model `{other}`"))),
        }
    }
}

impl PhaseNoiseModel {
    /// Builds a model with phase-noise power `sigma_p2` (rad^2).
    ///
    /// Uniform noise gets `half_width = sqrt(3 sigma_p2)` (exact variance);
    /// von Mises gets `concentration = 1 / sigma_p2` (small-angle variance).
    /// A zero power always yields [`PhaseNoiseModel::None`].
    pub fn from_power(kind: PhaseNoiseKind, sigma_p2: f64) -> Result<Self> {
        if !(sigma_p2 >= 0.0) || !sigma_p2.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "phase-noise power {sigma_p2} must be finite and >= 0"
            )));
        }
        if sigma_p2 == 0.0 {
            return Ok(PhaseNoiseModel::None);
        }
        let model = match kind {
            PhaseNoiseKind::VonMises => PhaseNoiseModel::VonMises {
                concentration: 1.0 / sigma_p2,
            },
            PhaseNoiseKind::Uniform => PhaseNoiseModel::Uniform {
                half_width: (3.0 * sigma_p2).sqrt(),
            },
            PhaseNoiseKind::None => PhaseNoiseModel::None,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn kind(&self) -> PhaseNoiseKind {
        match self {
            PhaseNoiseModel::VonMises { .. } => PhaseNoiseKind::VonMises,
            PhaseNoiseModel::Uniform { .. } => PhaseNoiseKind::Uniform,
            PhaseNoiseModel::None => PhaseNoiseKind::None,
        }
    }

    /// Inverse of [`PhaseNoiseModel::from_power`].
    pub fn power(&self) -> f64 {
        match *self {
            PhaseNoiseModel::VonMises { concentration } => 1.0 / concentration,
            PhaseNoiseModel::Uniform { half_width } => half_width * half_width / 3.0,
            PhaseNoiseModel::None => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PhaseNoiseModel::VonMises { concentration } => {
                if !(concentration >= 0.0) || concentration.is_nan() {
                    return Err(Error::InvalidConfig(format!(
                        "von Mises concentration {concentration} must be >= 0"
                    )));
                }
            }
            PhaseNoiseModel::Uniform { half_width } => {
                if !(half_width > 0.0 && half_width <= PI) {
                    return Err(Error::InvalidConfig(format!(
                        "uniform half width {half_width} must lie in (0, pi]"
                    )));
                }
            }
            PhaseNoiseModel::None => {}
        }
        Ok(())
    }
}

/// Amplitude gains of the RIS amplifiers: one value for every element or an
/// explicit per-element list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AmpGains {
    Uniform(f64),
    PerElement(Vec<f64>),
}

impl AmpGains {
    pub fn resolve(&self, n: usize) -> Result<Vec<f64>> {
        let gains = match self {
            AmpGains::Uniform(b) => vec![*b; n],
            AmpGains::PerElement(v) => {
                if v.len() != n {
                    return Err(Error::InvalidConfig(format!(
                        "{} amplitude gains given for {n} RIS elements",
                        v.len()
                    )));
                }
                v.clone()
            }
        };
        if let Some(b) = gains.iter().find(|b| !(**b >= 0.0) || !b.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "amplitude gain {b} must be finite and >= 0"
            )));
        }
        Ok(gains)
    }

    /// The common gain when all elements share one.
    pub fn common(&self) -> Option<f64> {
        match self {
            AmpGains::Uniform(b) => Some(*b),
            AmpGains::PerElement(v) => {
                let first = *v.first()?;
                v.iter().all(|b| *b == first).then_some(first)
            }
        }
    }
}

/// Phase basis of the RIS training patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainingBasis {
    #[default]
    Dft,
    Hadamard,
}

impl std::str::FromStr for TrainingBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dft" => Ok(TrainingBasis::Dft),
            "hadamard" => Ok(TrainingBasis::Hadamard),
            other => Err(Error::Parse(format!("unknown training basis `{other}`"))),
        }
    }
}

fn quantity<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(x) => Ok(x),
        Raw::Text(s) => parse_quantity(&s).map_err(serde::de::Error::custom),
    }
}

/// All physical parameters of one active-RIS link.
///
/// Missing keys in a config file fall back to [`default_scenario`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub tx_pos: Point3,
    pub ris_pos: Point3,
    pub rx_pos: Point3,
    /// Transmit power rho (W).
    #[serde(deserialize_with = "quantity")]
    pub transmit_power: f64,
    /// Path loss at 1 m, C0 (linear).
    #[serde(deserialize_with = "quantity")]
    pub ref_path_loss: f64,
    pub path_loss_exp_t: f64,
    pub path_loss_exp_r: f64,
    #[serde(deserialize_with = "quantity")]
    pub rician_k_t: f64,
    #[serde(deserialize_with = "quantity")]
    pub rician_k_r: f64,
    /// Elements along the horizontal axis, N_x.
    pub ris_rows: usize,
    /// Elements along the vertical axis, N_y.
    pub ris_cols: usize,
    /// (delta_x, delta_y) in meters.
    pub element_spacing: [f64; 2],
    pub wavelength: f64,
    pub amp_gains: AmpGains,
    /// RIS amplifier thermal noise variance (W).
    #[serde(deserialize_with = "quantity")]
    pub amp_noise_var: f64,
    /// Receiver noise variance (W).
    #[serde(deserialize_with = "quantity")]
    pub rx_noise_var: f64,
    pub phase_noise: PhaseNoiseModel,
    /// Number of pilot symbols T.
    pub pilot_len: usize,
    pub training_basis: TrainingBasis,
    /// Per-element phase-shift switch and control power (W).
    #[serde(deserialize_with = "quantity")]
    pub switch_power: f64,
    /// Per-element amplifier DC bias power (W).
    #[serde(deserialize_with = "quantity")]
    pub bias_power: f64,
    /// Outage threshold omega_th (linear SINR).
    #[serde(deserialize_with = "quantity")]
    pub sinr_threshold: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        default_scenario()
    }
}

/// The reference deployment: a transmitter 112 m from an 8x8 RIS that serves
/// a receiver 16 m away, with unit Rician factors and -90 dBm noise floors.
pub fn default_scenario() -> ScenarioConfig {
    let wavelength = 0.1;
    ScenarioConfig {
        tx_pos: [-100.0, 0.0, 15.0],
        ris_pos: [0.0, 50.0, 15.0],
        rx_pos: [15.0, 45.0, 15.0],
        transmit_power: dbm_to_watts(20.0),
        ref_path_loss: 1e-3,
        path_loss_exp_t: 2.2,
        path_loss_exp_r: 2.2,
        rician_k_t: 1.0,
        rician_k_r: 1.0,
        ris_rows: 8,
        ris_cols: 8,
        element_spacing: [wavelength / 2.0, wavelength / 2.0],
        wavelength,
        amp_gains: AmpGains::Uniform(1.0),
        amp_noise_var: dbm_to_watts(-90.0),
        rx_noise_var: dbm_to_watts(-90.0),
        phase_noise: PhaseNoiseModel::Uniform {
            half_width: (3.0f64 * 0.1).sqrt(),
        },
        pilot_len: 64,
        training_basis: TrainingBasis::Dft,
        switch_power: dbm_to_watts(-10.0),
        bias_power: dbm_to_watts(-5.0),
        sinr_threshold: 10.0,
    }
}

/// Large-scale fading `c0 * distance^-exponent`.
pub fn path_loss(distance: f64, exponent: f64, c0: f64) -> Result<f64> {
    if !(distance > 0.0) || !distance.is_finite() {
        return Err(Error::domain(
            "path_loss",
            format!("distance {distance} must be > 0"),
        ));
    }
    Ok(c0 * distance.powf(-exponent))
}

pub fn distance(a: Point3, b: Point3) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Average power drawn by the active RIS:
/// `(rho rho_t + sigma_a^2) sum beta_n^2 + N (P_s + P_d)`.
pub fn ris_power_cost(cfg: &ScenarioConfig) -> Result<f64> {
    let beta_sq: f64 = cfg.gains()?.iter().map(|b| b * b).sum();
    let incident = cfg.transmit_power * cfg.large_scale_t()?;
    Ok((incident + cfg.amp_noise_var) * beta_sq
        + cfg.n_elements() as f64 * (cfg.switch_power + cfg.bias_power))
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a `.json` or `.toml` file (anything not ending in `.json` is read
    /// as TOML).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_toml_str(&text),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn n_elements(&self) -> usize {
        self.ris_rows * self.ris_cols
    }

    pub fn gains(&self) -> Result<Vec<f64>> {
        self.amp_gains.resolve(self.n_elements())
    }

    pub fn dist_t(&self) -> f64 {
        distance(self.tx_pos, self.ris_pos)
    }

    pub fn dist_r(&self) -> f64 {
        distance(self.ris_pos, self.rx_pos)
    }

    /// Transmitter-RIS large-scale gain rho_t.
    pub fn large_scale_t(&self) -> Result<f64> {
        path_loss(self.dist_t(), self.path_loss_exp_t, self.ref_path_loss)
    }

    /// RIS-receiver large-scale gain rho_r (uses the receive-side exponent).
    pub fn large_scale_r(&self) -> Result<f64> {
        path_loss(self.dist_r(), self.path_loss_exp_r, self.ref_path_loss)
    }

    /// Resizes the RIS and sets `T = N`. Per-element gains must be uniform.
    pub fn resize_ris(&mut self, rows: usize, cols: usize) -> Result<()> {
        let beta = self.amp_gains.common().ok_or_else(|| {
            Error::InvalidConfig("cannot resize an RIS with per-element gains".into())
        })?;
        self.ris_rows = rows;
        self.ris_cols = cols;
        self.amp_gains = AmpGains::Uniform(beta);
        self.pilot_len = rows * cols;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        for (name, p) in [
            ("tx_pos", self.tx_pos),
            ("ris_pos", self.ris_pos),
            ("rx_pos", self.rx_pos),
        ] {
            if p.iter().any(|c| !c.is_finite()) {
                return bad(format!("{name} has a non-finite coordinate"));
            }
        }
        if !(self.dist_t() > 0.0) {
            return bad("transmitter and RIS coincide".into());
        }
        if !(self.dist_r() > 0.0) {
            return bad("RIS and receiver coincide".into());
        }
        let nonneg = [
            ("transmit_power", self.transmit_power),
            ("ref_path_loss", self.ref_path_loss),
            ("path_loss_exp_t", self.path_loss_exp_t),
            ("path_loss_exp_r", self.path_loss_exp_r),
            ("amp_noise_var", self.amp_noise_var),
            ("rx_noise_var", self.rx_noise_var),
            ("switch_power", self.switch_power),
            ("bias_power", self.bias_power),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) || !v.is_finite() {
                return bad(format!("{name} = {v} must be finite and >= 0"));
            }
        }
        for (name, k) in [
            ("rician_k_t", self.rician_k_t),
            ("rician_k_r", self.rician_k_r),
        ] {
            if !(k >= 0.0) {
                return bad(format!("{name} = {k} must be >= 0"));
            }
        }
        if self.ris_rows == 0 || self.ris_cols == 0 {
            return bad("RIS must have at least one element".into());
        }
        if !(self.wavelength > 0.0) || !self.wavelength.is_finite() {
            return bad(format!("wavelength {} must be > 0", self.wavelength));
        }
        if self
            .element_spacing
            .iter()
            .any(|d| !(*d >= 0.0) || !d.is_finite())
        {
            return bad("element spacing must be finite and >= 0".into());
        }
        if self.pilot_len < self.n_elements() {
            return bad(format!(
                "pilot length T = {} is shorter than the RIS size N = {}",
                self.pilot_len,
                self.n_elements()
            ));
        }
        if !(self.sinr_threshold > 0.0) || !self.sinr_threshold.is_finite() {
            return bad(format!(
                "sinr_threshold {} must be > 0",
                self.sinr_threshold
            ));
        }
        self.phase_noise.validate()?;
        self.gains()?;
        Ok(())
    }

    /// Applies a `key=value` override using the serialized field names.
    ///
    /// Scalars accept `dB`/`dBm` suffixes; positions are `x,y,z`; gains are a
    /// single value or a comma list; `phase_noise` is `none`,
    /// `uniform:<sigma_p2>` or `von_mises:<sigma_p2>`; `ris_size` is `RxC`
    /// and also sets `pilot_len = N`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = || parse_quantity(value);
        let int = || {
            value
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("`{value}` is not a non-negative integer")))
        };
        let list = || -> Result<Vec<f64>> { value.split(',').map(parse_quantity).collect() };
        let point = || -> Result<Point3> {
            let v = list()?;
            <[f64; 3]>::try_from(v.as_slice())
                .map_err(|_| Error::Parse(format!("`{value}` is not an x,y,z triple")))
        };
        match key.trim() {
            "tx_pos" => self.tx_pos = point()?,
            "ris_pos" => self.ris_pos = point()?,
            "rx_pos" => self.rx_pos = point()?,
            "transmit_power" => self.transmit_power = num()?,
            "ref_path_loss" => self.ref_path_loss = num()?,
            "path_loss_exp_t" => self.path_loss_exp_t = num()?,
            "path_loss_exp_r" => self.path_loss_exp_r = num()?,
            "rician_k_t" => self.rician_k_t = num()?,
            "rician_k_r" => self.rician_k_r = num()?,
            "ris_rows" => self.ris_rows = int()?,
            "ris_cols" => self.ris_cols = int()?,
            "ris_size" => {
                let (r, c) = value
                    .split_once(['x', 'X'])
                    .ok_or_else(|| Error::Parse(format!("`{value}` is not RxC")))?;
                let parse = |s: &str| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("`{value}` is not RxC")))
                };
                self.resize_ris(parse(r)?, parse(c)?)?;
            }
            "element_spacing" => {
                let v = list()?;
                self.element_spacing = match v.as_slice() {
                    [d] => [*d, *d],
                    [dx, dy] => [*dx, *dy],
                    _ => return Err(Error::Parse(format!("`{value}` is not dx[,dy]"))),
                }
            }
            "wavelength" => self.wavelength = num()?,
            "amp_gains" => {
                let v = list()?;
                self.amp_gains = match v.as_slice() {
                    [b] => AmpGains::Uniform(*b),
                    _ => AmpGains::PerElement(v),
                }
            }
            "amp_noise_var" => self.amp_noise_var = num()?,
            "rx_noise_var" => self.rx_noise_var = num()?,
            "phase_noise" => {
                let (kind, power) = match value.split_once(':') {
                    Some((k, p)) => (k.parse::<PhaseNoiseKind>()?, parse_quantity(p)?),
                    None => (value.parse::<PhaseNoiseKind>()?, 0.0),
                };
                if kind != PhaseNoiseKind::None && power == 0.0 && !value.contains(':') {
                    return Err(Error::Parse(format!(
                        "phase_noise `{value}` needs a power, e.g. uniform:0.1"
                    )));
                }
                self.phase_noise = PhaseNoiseModel::from_power(kind, power)?;
            }
            "pilot_len" => self.pilot_len = int()?,
            "training_basis" => self.training_basis = value.parse()?,
            "switch_power" => self.switch_power = num()?,
            "bias_power" => self.bias_power = num()?,
            "sinr_threshold" => self.sinr_threshold = num()?,
            other => return Err(Error::InvalidConfig(format!("unknown key `{other}`"))),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_loss_examples() {
        assert!((path_loss(1.0, 2.2, 1e-3).unwrap() - 1e-3).abs() < 1e-18);
        assert_eq!(path_loss(37.0, 0.0, 0.2).unwrap(), 0.2);
        let v = path_loss(100.0, 2.2, 1e-3).unwrap();
        assert!((v - 3.981_071_705_534_97e-8).abs() < 1e-20, "{v}");
        assert!(path_loss(0.0, 2.2, 1e-3).is_err());
        assert!(path_loss(-3.0, 2.2, 1e-3).is_err());
    }

    #[test]
    fn default_scenario_values() {
        let cfg = default_scenario();
        cfg.validate().unwrap();
        assert_eq!(cfg.n_elements(), 64);
        assert_eq!(cfg.pilot_len, 64);
        assert_eq!(cfg.path_loss_exp_t, 2.2);
        assert_eq!(cfg.path_loss_exp_r, 2.2);
        assert!((cfg.dist_t() - 111.803_398_874_989_5).abs() < 1e-9);
        assert!((cfg.dist_r() - 250f64.sqrt()).abs() < 1e-12);
        assert!((cfg.amp_noise_var - 1e-12).abs() < 1e-27);
        assert!((cfg.sinr_threshold - 10.0).abs() < 1e-12);
        assert_eq!(cfg.element_spacing, [cfg.wavelength / 2.0; 2]);
    }

    #[test]
    fn power_cost() {
        let mut cfg = default_scenario();
        cfg.ris_rows = 2;
        cfg.ris_cols = 2;
        cfg.pilot_len = 4;
        cfg.amp_noise_var = 0.0;
        cfg.switch_power = 0.0;
        cfg.bias_power = 0.0;
        cfg.transmit_power = 1.0 / cfg.large_scale_t().unwrap();
        assert!((ris_power_cost(&cfg).unwrap() - 4.0).abs() < 1e-12);

        let mut cfg = default_scenario();
        cfg.amp_gains = AmpGains::Uniform(0.0);
        let want = 64.0 * (cfg.switch_power + cfg.bias_power);
        assert!((ris_power_cost(&cfg).unwrap() - want).abs() < 1e-15);

        // beta = 2 at the defaults: (rho rho_t + sigma_a^2) * 4 * 64 + 64 (P_s + P_d)
        let mut cfg = default_scenario();
        cfg.amp_gains = AmpGains::Uniform(2.0);
        let rho_t = 1e-3 * 12_500f64.powf(-1.1);
        let want = (0.1 * rho_t + 1e-12) * 256.0 + 64.0 * (1e-4 + 10f64.powf(-3.5));
        assert!(((ris_power_cost(&cfg).unwrap() - want) / want).abs() < 1e-12);
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut cfg = default_scenario();
        cfg.pilot_len = 63;
        assert!(cfg.validate().is_err());

        let mut cfg = default_scenario();
        cfg.phase_noise = PhaseNoiseModel::Uniform { half_width: 3.5 };
        assert!(cfg.validate().is_err());

        let mut cfg = default_scenario();
        cfg.amp_noise_var = -1e-12;
        assert!(cfg.validate().is_err());

        let mut cfg = default_scenario();
        cfg.rx_pos = cfg.ris_pos;
        assert!(cfg.validate().is_err());

        let mut cfg = default_scenario();
        cfg.amp_gains = AmpGains::PerElement(vec![1.0; 3]);
        assert!(cfg.validate().is_err());

        let mut cfg = default_scenario();
        cfg.phase_noise = PhaseNoiseModel::VonMises {
            concentration: -1.0,
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn phase_noise_power_mapping() {
        let m = PhaseNoiseModel::from_power(PhaseNoiseKind::Uniform, 0.1).unwrap();
        assert!((m.power() - 0.1).abs() < 1e-15);
        let m = PhaseNoiseModel::from_power(PhaseNoiseKind::VonMises, 0.01).unwrap();
        assert_eq!(
            m,
            PhaseNoiseModel::VonMises {
                concentration: 100.0
            }
        );
        assert_eq!(
            PhaseNoiseModel::from_power(PhaseNoiseKind::Uniform, 0.0).unwrap(),
            PhaseNoiseModel::None
        );
        // sqrt(3 * 4) > pi
        assert!(PhaseNoiseModel::from_power(PhaseNoiseKind::Uniform, 4.0).is_err());
    }

    #[test]
    fn toml_with_decibel_strings() {
        let text = r#"
            transmit_power = "30 dBm"
            rx_noise_var = "-80dBm"
            rician_k_t = "10 dB"
            ris_rows = 4
            ris_cols = 4
            pilot_len = 16
            amp_gains = 2
            phase_noise = { kind = "von_mises", concentration = 10.0 }
        "#;
        let cfg = ScenarioConfig::from_toml_str(text).unwrap();
        assert!((cfg.transmit_power - 1.0).abs() < 1e-12);
        assert!((cfg.rx_noise_var - 1e-11).abs() < 1e-24);
        assert!((cfg.rician_k_t - 10.0).abs() < 1e-12);
        assert_eq!(cfg.gains().unwrap(), vec![2.0; 16]);
        assert_eq!(
            cfg.phase_noise,
            PhaseNoiseModel::VonMises {
                concentration: 10.0
            }
        );
        // untouched keys keep their defaults
        assert_eq!(cfg.path_loss_exp_t, 2.2);

        assert!(ScenarioConfig::from_toml_str("bogus_key = 1").is_err());
        assert!(ScenarioConfig::from_toml_str("ris_rows = 16").is_err());
    }

    #[test]
    fn serialization_round_trip() {
        let cfg = default_scenario();
        let back = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, back);
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ScenarioConfig::from_json_str(&json).unwrap(), cfg);
    }

    #[test]
    fn overrides() {
        let mut cfg = default_scenario();
        cfg.set("transmit_power", "40dBm").unwrap();
        assert!((cfg.transmit_power - 10.0).abs() < 1e-12);
        cfg.set("phase_noise", "von_mises:0.01").unwrap();
        assert_eq!(
            cfg.phase_noise,
            PhaseNoiseModel::VonMises {
                concentration: 100.0
            }
        );
        cfg.set("phase_noise", "none").unwrap();
        assert_eq!(cfg.phase_noise, PhaseNoiseModel::None);
        cfg.set("ris_size", "16x8").unwrap();
        assert_eq!((cfg.n_elements(), cfg.pilot_len), (128, 128));
        cfg.set("tx_pos", "1,2,3").unwrap();
        assert_eq!(cfg.tx_pos, [1.0, 2.0, 3.0]);
        cfg.set("amp_gains", "4").unwrap();
        assert_eq!(cfg.amp_gains, AmpGains::Uniform(4.0));
        assert!(cfg.set("no_such_key", "1").is_err());
        assert!(cfg.set("ris_rows", "-1").is_err());
        assert!(cfg.set("phase_noise", "uniform").is_err());
        cfg.validate().unwrap();
    }
}
