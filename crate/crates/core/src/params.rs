//! Parameter types shared by every module, plus the side-peak container.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Ratio δω/Γ above which the quasi-stationary formulas are flagged.
pub const QUASI_STATIONARY_LIMIT: f64 = 0.1;

/// Two-level system coupled to the waveguide.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Transition frequency ε/ħ.
    pub omega01: f64,
    /// Radiative relaxation rate Γ.
    pub gamma: f64,
    /// Photon speed in the waveguide.
    pub v: f64,
}

impl SystemParams {
    pub fn new(omega01: f64, gamma: f64, v: f64) -> Result<Self> {
        positive("omega01", omega01)?;
        positive("gamma", gamma)?;
        positive("v", v)?;
        Ok(Self { omega01, gamma, v })
    }

    /// Dressed transition frequency ω_ε = ε/ħ − iΓ/2.
    pub fn omega_eps(&self) -> Complex64 {
        Complex64::new(self.omega01, -0.5 * self.gamma)
    }

    /// Dressed pole momentum k_ε = ω_ε / v.
    pub fn k_eps(&self) -> Complex64 {
        self.omega_eps() / self.v
    }

    /// Momentum of a photon with the given frequency.
    pub fn momentum(&self, omega: f64) -> f64 {
        omega / self.v
    }

    /// Express every frequency in units of Γ (Γ becomes 1; lengths are kept,
    /// so v is divided by Γ as well).
    pub fn rescaled(&self, drive: &DriveConfig) -> (SystemParams, DriveConfig) {
        let g = self.gamma;
        let params = SystemParams { omega01: self.omega01 / g, gamma: 1.0, v: self.v / g };
        let drive = DriveConfig::from_parts(drive.rabi_a / g, drive.rabi_b / g, drive.delta / g, 1.0);
        (params, drive)
    }
}

/// Bichromatic drive: ω_A = ω01 + δω, ω_B = ω01 − δω.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    pub rabi_a: f64,
    pub rabi_b: f64,
    pub delta: f64,
    /// Set when δω/Γ exceeds [`QUASI_STATIONARY_LIMIT`].
    pub quasi_stationary_warning: bool,
}

impl DriveConfig {
    pub fn new(rabi_a: f64, rabi_b: f64, delta: f64, params: &SystemParams) -> Result<Self> {
        non_negative("rabi_a", rabi_a)?;
        non_negative("rabi_b", rabi_b)?;
        positive("delta", delta)?;
        Ok(Self::from_parts(rabi_a, rabi_b, delta, params.gamma))
    }

    fn from_parts(rabi_a: f64, rabi_b: f64, delta: f64, gamma: f64) -> Self {
        Self { rabi_a, rabi_b, delta, quasi_stationary_warning: delta / gamma > QUASI_STATIONARY_LIMIT }
    }

    pub fn omega_a(&self, params: &SystemParams) -> f64 {
        params.omega01 + self.delta
    }

    pub fn omega_b(&self, params: &SystemParams) -> f64 {
        params.omega01 - self.delta
    }

    /// The same drive with the roles of the two tones exchanged.
    pub fn mirrored(&self) -> Self {
        Self { rabi_a: self.rabi_b, rabi_b: self.rabi_a, ..*self }
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Validation { field, requirement: "positive" })
    }
}

fn non_negative(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::Validation { field, requirement: "non-negative" })
    }
}

/// Unvalidated configuration, as read from JSON or assembled from CLI flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega01: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rabi_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rabi_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

impl RawConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct of floats serializes")
    }

    pub fn from_validated(params: &SystemParams, drive: &DriveConfig) -> Self {
        Self {
            omega01: Some(params.omega01),
            gamma: Some(params.gamma),
            v: Some(params.v),
            rabi_a: Some(drive.rabi_a),
            rabi_b: Some(drive.rabi_b),
            delta: Some(drive.delta),
        }
    }

    /// Fill every unset field from `other`.
    pub fn or(self, other: RawConfig) -> RawConfig {
        RawConfig {
            omega01: self.omega01.or(other.omega01),
            gamma: self.gamma.or(other.gamma),
            v: self.v.or(other.v),
            rabi_a: self.rabi_a.or(other.rabi_a),
            rabi_b: self.rabi_b.or(other.rabi_b),
            delta: self.delta.or(other.delta),
        }
    }
}

pub fn validate_config(raw: &RawConfig) -> Result<(SystemParams, DriveConfig)> {
    let omega01 = raw.omega01.ok_or(Error::MissingField("omega01"))?;
    let gamma = raw.gamma.ok_or(Error::MissingField("gamma"))?;
    let rabi_a = raw.rabi_a.ok_or(Error::MissingField("rabi_a"))?;
    let rabi_b = raw.rabi_b.ok_or(Error::MissingField("rabi_b"))?;
    let delta = raw.delta.ok_or(Error::MissingField("delta"))?;
    let params = SystemParams::new(omega01, gamma, raw.v.unwrap_or(1.0))?;
    let drive = DriveConfig::new(rabi_a, rabi_b, delta, &params)?;
    Ok((params, drive))
}

/// Which side of ω01 a peak sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// ω01 + (2p+1)δω, fed by mode A.
    Right,
    /// ω01 − (2p+1)δω, fed by mode B.
    Left,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    pub fn sign(self) -> f64 {
        match self {
            Side::Right => 1.0,
            Side::Left => -1.0,
        }
    }

    pub fn mirror(self) -> Side {
        match self {
            Side::Right => Side::Left,
            Side::Left => Side::Right,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Right => "right",
            Side::Left => "left",
        }
    }

    /// Signed harmonic index n = ±(2p+1) of the peak in units of δω.
    pub fn harmonic(self, p: u32) -> i64 {
        let n = 2 * p as i64 + 1;
        match self {
            Side::Right => n,
            Side::Left => -n,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "right" | "r" => Ok(Side::Right),
            "left" | "l" => Ok(Side::Left),
            _ => Err(Error::Domain(format!("unknown side `{s}`"))),
        }
    }
}

/// One coherent peak at ω01 ± (2p+1)δω. Records with p = 0 are the two
/// principal (Rayleigh) peaks at the drive frequencies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakRecord {
    pub p: u32,
    pub side: Side,
    pub frequency: f64,
    pub amplitude: Complex64,
    pub intensity: f64,
}

impl PeakRecord {
    pub fn new(p: u32, side: Side, omega01: f64, delta: f64, amplitude: Complex64) -> Self {
        let frequency = omega01 + side.harmonic(p) as f64 * delta;
        Self { p, side, frequency, amplitude, intensity: amplitude.norm_sqr() }
    }

    pub fn is_principal(&self) -> bool {
        self.p == 0
    }
}

/// Peak records kept sorted by frequency.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PeakSpectrum {
    records: Vec<PeakRecord>,
}

impl PeakSpectrum {
    pub fn new(records: impl IntoIterator<Item = PeakRecord>) -> Self {
        let mut records: Vec<_> = records.into_iter().collect();
        records.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        Self { records }
    }

    pub fn records(&self) -> &[PeakRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn find(&self, p: u32, side: Side) -> Option<&PeakRecord> {
        self.records.iter().find(|r| r.p == p && r.side == side)
    }
}
