//! Side-peak amplitudes for coherent-state drives, obtained by summing the
//! disconnected S-matrix elements over the photon-number distributions of
//! both modes, and their classical limit.
//!
//! The double sum over (N_A, N_B) factorizes into an A-sum and a B-sum;
//! each term is evaluated in log space with ln Γ.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::diagrams::{connected_t, gamma, GammaSource};
use crate::error::{Error, Result};
use crate::multiphoton::PeakChannel;
use crate::params::{Side, SystemParams};
use crate::smatrix::single_photon_coeffs;

/// Largest photon-number cap the summation accepts.
pub const MAX_CAP: u64 = 10_000_000;

/// Largest tolerated relative rounding error of a photon-number sum.
pub const MAX_ROUNDING: f64 = 1e-8;

/// Two coherent states |α⟩|β⟩ given by their mean photon numbers and phases.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherentDrive {
    pub alpha2: f64,
    pub beta2: f64,
    pub phase_a: f64,
    pub phase_b: f64,
}

impl CoherentDrive {
    pub fn new(alpha2: f64, beta2: f64, phase_a: f64, phase_b: f64) -> Result<Self> {
        if !(alpha2 >= 0.0) || !alpha2.is_finite() {
            return Err(Error::Validation { field: "alpha2", requirement: "finite and non-negative" });
        }
        if !(beta2 >= 0.0) || !beta2.is_finite() {
            return Err(Error::Validation { field: "beta2", requirement: "finite and non-negative" });
        }
        Ok(CoherentDrive { alpha2, beta2, phase_a, phase_b })
    }

    /// Real, non-negative amplitudes.
    pub fn real(alpha2: f64, beta2: f64) -> Result<Self> {
        Self::new(alpha2, beta2, 0.0, 0.0)
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::from_polar(self.alpha2.sqrt(), self.phase_a)
    }

    pub fn beta(&self) -> Complex64 {
        Complex64::from_polar(self.beta2.sqrt(), self.phase_b)
    }
}

/// Summation caps for the photon-number sums.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    pub n_max_a: u64,
    pub n_max_b: u64,
    pub tail_bound: f64,
}

fn min_cap(mean: f64) -> u64 {
    (mean + 12.0 * mean.sqrt() + 30.0).ceil() as u64
}

impl TruncationPolicy {
    pub const DEFAULT_TAIL_BOUND: f64 = 1e-12;

    /// Smallest admissible caps for the drive.
    pub fn for_drive(drive: &CoherentDrive, tail_bound: f64) -> Self {
        TruncationPolicy { n_max_a: min_cap(drive.alpha2), n_max_b: min_cap(drive.beta2), tail_bound }
    }

    /// Caps multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        TruncationPolicy {
            n_max_a: (self.n_max_a as f64 * factor).ceil() as u64,
            n_max_b: (self.n_max_b as f64 * factor).ceil() as u64,
            tail_bound: self.tail_bound,
        }
    }

    pub fn validate(&self, drive: &CoherentDrive) -> Result<()> {
        if self.n_max_a < min_cap(drive.alpha2) {
            return Err(Error::Validation { field: "n_max_a", requirement: "at least mean + 12√mean + 30" });
        }
        if self.n_max_b < min_cap(drive.beta2) {
            return Err(Error::Validation { field: "n_max_b", requirement: "at least mean + 12√mean + 30" });
        }
        if !(self.tail_bound > 0.0) {
            return Err(Error::Validation { field: "tail_bound", requirement: "positive" });
        }
        if self.n_max_a.max(self.n_max_b) > MAX_CAP {
            return Err(Error::Capacity(format!("photon-number cap exceeds {MAX_CAP}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PmfModel {
    Poisson,
    Gaussian,
}

/// Probability of n photons for the given mean.
pub fn photon_number_pmf(mean: f64, n: u64, model: PmfModel) -> Result<f64> {
    if !(mean > 0.0) || !mean.is_finite() {
        return Err(Error::Validation { field: "mean", requirement: "positive" });
    }
    let n = n as f64;
    Ok(match model {
        PmfModel::Poisson => (n * mean.ln() - mean - ln_gamma(n + 1.0)).exp(),
        PmfModel::Gaussian => (-(n - mean).powi(2) / (2.0 * mean)).exp() / (2.0 * std::f64::consts::PI * mean).sqrt(),
    })
}

/// Pass coefficients (c_A, c_B) of the spectator photons in a channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelCoefficients {
    pub channel: PeakChannel,
    pub c_a: Complex64,
    pub c_b: Complex64,
}

impl ChannelCoefficients {
    /// Spectators pass with unit amplitude.
    pub fn unit(channel: PeakChannel) -> Self {
        ChannelCoefficients { channel, c_a: Complex64::new(1.0, 0.0), c_b: Complex64::new(1.0, 0.0) }
    }

    /// Coefficients at the drive momenta.
    pub fn at_momenta(channel: PeakChannel, k_a: f64, k_b: f64, params: &SystemParams) -> Self {
        ChannelCoefficients {
            channel,
            c_a: channel.pass_coefficient(&single_photon_coeffs(k_a, params)),
            c_b: channel.pass_coefficient(&single_photon_coeffs(k_b, params)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherentAmplitude {
    pub value: Complex64,
    /// Relative size of the discarded tails of both sums.
    pub tail_estimate: f64,
}

/// Σ_{n ≥ 0} z^n c^n w(n) e^{−|z|²/2} with w given by its logarithm.
/// Returns the sum and an estimate of the discarded tail relative to it.
fn log_space_sum(z: Complex64, c: Complex64, cap: u64, ln_weight: impl Fn(f64) -> f64) -> Result<(Complex64, f64)> {
    let mean = z.norm_sqr();
    let zc = z * c;
    if zc.norm() == 0.0 {
        // Only n = 0 survives.
        return Ok((Complex64::new((ln_weight(0.0) - 0.5 * mean).exp(), 0.0), 0.0));
    }
    let (ln_r, phase) = (zc.norm().ln(), zc.arg());
    let term = |n: f64| -> Complex64 {
        let ln_mag = n * ln_r + ln_weight(n) - 0.5 * mean;
        Complex64::from_polar(ln_mag.exp(), n * phase)
    };
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for n in 0..=cap {
        let t = term(n as f64);
        if !t.re.is_finite() || !t.im.is_finite() {
            return Err(Error::Capacity(format!("term n = {n} overflows")));
        }
        sum += t;
        abs_sum += t.norm();
    }
    // Terms past the cap decay at least geometrically; bound the tail by
    // the next few terms summed with their ratio.
    let next = term(cap as f64 + 1.0).norm();
    let after = term(cap as f64 + 2.0).norm();
    let ratio = if next > 0.0 { (after / next).min(0.999_999) } else { 0.0 };
    let tail = next / (1.0 - ratio);
    // Rotating phases can cancel the sum far below its largest terms.
    let rounding = abs_sum * f64::EPSILON * (cap as f64 + 1.0).sqrt();
    if rounding > MAX_ROUNDING * sum.norm() {
        return Err(Error::Capacity(format!(
            "photon-number sum cancels to {:.3e} against terms of total size {abs_sum:.3e}",
            sum.norm()
        )));
    }
    Ok((sum, tail / sum.norm()))
}

/// M^(2p+1): the side-peak amplitude for coherent inputs.
pub fn coherent_peak_amplitude(
    p: u32,
    drive: &CoherentDrive,
    coeffs: &ChannelCoefficients,
    params: &SystemParams,
    trunc: &TruncationPolicy,
    source: GammaSource,
) -> Result<CoherentAmplitude> {
    if p < 1 {
        return Err(Error::Domain("coherent side peaks need p ≥ 1".into()));
    }
    trunc.validate(drive)?;
    if drive.alpha2 == 0.0 {
        return Ok(CoherentAmplitude { value: Complex64::new(0.0, 0.0), tail_estimate: 0.0 });
    }
    let pf = p as f64;
    let alpha = drive.alpha();
    // Σ_{N_A ≥ p+1} α^{N_A} c_A^{N_A−p−1} / √((N_A−p−1)!), shifted to m = N_A − p − 1.
    let (sum_a, tail_a) = log_space_sum(alpha, coeffs.c_a, trunc.n_max_a.saturating_sub(p as u64 + 1), |m| {
        -0.5 * ln_gamma(m + 1.0)
    })?;
    let sum_a = sum_a * alpha.powu(p + 1);
    // Σ_{N_B ≥ 0} β^{N_B} c_B^{N_B} √((N_B+p)!) / N_B!
    let (sum_b, tail_b) = log_space_sum(drive.beta(), coeffs.c_b, trunc.n_max_b, |n| {
        0.5 * ln_gamma(n + pf + 1.0) - ln_gamma(n + 1.0)
    })?;
    let tail_estimate = tail_a + tail_b;
    if tail_estimate > trunc.tail_bound {
        return Err(Error::Truncation { estimate: tail_estimate, bound: trunc.tail_bound });
    }
    let f = (1..=p + 1).map(f64::from).product::<f64>();
    let t = connected_t(p, params, source)?;
    let value = coeffs.channel.basis_factor(p) * t / (f * f) * sum_a * sum_b;
    Ok(CoherentAmplitude { value, tail_estimate })
}

/// Classical-limit intensity J^(2p+1) for mean photon numbers n_a, n_b.
pub fn classical_limit_j(p: u32, n_a: f64, n_b: f64, side: Side, params: &SystemParams, source: GammaSource) -> Result<f64> {
    if p < 1 {
        return Err(Error::Domain("classical limit needs p ≥ 1".into()));
    }
    let t = connected_t(p, params, source)?;
    let f = (1..=p + 1).map(f64::from).product::<f64>();
    let (major, minor) = match side {
        Side::Right => (n_a, n_b),
        Side::Left => (n_b, n_a),
    };
    Ok(t * t / f.powi(4) / 4f64.powi(p as i32 + 1) * major.powi(p as i32 + 1) * minor.powi(p as i32))
}

/// L^(2p+1)/L^(1) = (|γ^(2p+1)|/(p+1))^{1/p}.
pub fn interaction_length_ratio(p: u32, source: GammaSource) -> Result<f64> {
    if p < 1 {
        return Err(Error::Domain("interaction length ratio needs p ≥ 1".into()));
    }
    let g = gamma(p, source)?;
    Ok((g.abs() / f64::from(p + 1)).powf(1.0 / f64::from(p)))
}

/// Which mean photon number is varied in a scaling fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalingMode {
    A,
    B,
}

/// Least-squares slope of ln|M|² against ln(mean) with the other mean held
/// at `fixed`, unit pass coefficients in the reflected channel.
pub fn scaling_exponent(p: u32, mode: ScalingMode, means: &[f64], fixed: f64, params: &SystemParams) -> Result<f64> {
    if means.len() < 2 {
        return Err(Error::Domain("a scaling fit needs at least two means".into()));
    }
    let coeffs = ChannelCoefficients::unit(PeakChannel::Reflected);
    let mut xs = Vec::with_capacity(means.len());
    let mut ys = Vec::with_capacity(means.len());
    for &m in means {
        let drive = match mode {
            ScalingMode::A => CoherentDrive::real(m, fixed)?,
            ScalingMode::B => CoherentDrive::real(fixed, m)?,
        };
        let trunc = TruncationPolicy::for_drive(&drive, TruncationPolicy::DEFAULT_TAIL_BOUND);
        let amp = coherent_peak_amplitude(p, &drive, &coeffs, params, &trunc, GammaSource::Published)?;
        xs.push(m.ln());
        ys.push(amp.value.norm_sqr().ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
