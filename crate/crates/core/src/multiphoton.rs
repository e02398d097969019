//! Disconnected multiphoton S-matrix elements: one connected (p+1)-photon
//! loop dressed by N_A − (p+1) and N_B photons that pass the TLS
//! elastically.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::diagrams::{connected_t, GammaSource, PrefactorMode};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::smatrix::{single_photon_coeffs, two_photon_connected, Basis, ScatterCoeffs};

/// Output channel of the side-peak signal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeakChannel {
    /// Even mode, pass coefficient t̃ and no basis factor.
    EMode,
    /// Right movers, pass coefficient t and factor 2^{−(p+1)}.
    Transmitted,
    /// Left movers, pass coefficient r and factor 2^{−(p+1)}.
    Reflected,
}

impl PeakChannel {
    pub const ALL: [PeakChannel; 3] = [PeakChannel::EMode, PeakChannel::Transmitted, PeakChannel::Reflected];

    pub fn as_str(self) -> &'static str {
        match self {
            PeakChannel::EMode => "e",
            PeakChannel::Transmitted => "t",
            PeakChannel::Reflected => "r",
        }
    }

    /// Coefficient of a photon passing without taking part in the loop.
    pub fn pass_coefficient(self, coeffs: &ScatterCoeffs) -> Complex64 {
        match self {
            PeakChannel::EMode => coeffs.t_tilde,
            PeakChannel::Transmitted => coeffs.t,
            PeakChannel::Reflected => coeffs.r,
        }
    }

    /// 1 for the e-mode, 2^{−(p+1)} after rotating to the (R, L) basis.
    pub fn basis_factor(self, p: u32) -> f64 {
        match self {
            PeakChannel::EMode => 1.0,
            _ => 0.5f64.powi(p as i32 + 1),
        }
    }
}

impl std::fmt::Display for PeakChannel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PeakChannel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "emode" | "e-mode" => Ok(PeakChannel::EMode),
            "t" | "transmitted" => Ok(PeakChannel::Transmitted),
            "r" | "reflected" => Ok(PeakChannel::Reflected),
            other => Err(Error::Domain(format!("unknown channel {other:?}"))),
        }
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// n_a!(n_b+p)!/[(p+1)!]² (symmetrized) or n_a!·n_b!/(p+1)! (not).
pub fn disconnected_prefactor(p: u32, n_a: u32, n_b: u32, mode: PrefactorMode) -> Result<BigRational> {
    if n_a < p + 1 {
        return Err(Error::InsufficientPhotons { needed: p + 1, got: n_a });
    }
    let f = factorial(p + 1);
    Ok(match mode {
        PrefactorMode::Symmetrized => BigRational::new(factorial(n_a) * factorial(n_b + p), &f * &f),
        PrefactorMode::NonSymmetrized => BigRational::new(factorial(n_a) * factorial(n_b), f),
    })
}

/// Photon counts and momenta entering one disconnected S-matrix element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Occupation {
    pub n_a: u32,
    pub n_b: u32,
    pub k_a: f64,
    pub k_b: f64,
}

/// prefactor · iT̃^(2(p+1)) · c_A^{n_a−(p+1)} · c_B^{n_b} · basis factor, with
/// the connected amplitude at its resonant value.
pub fn disconnected_s(
    p: u32,
    occupation: Occupation,
    channel: PeakChannel,
    mode: PrefactorMode,
    params: &SystemParams,
    source: GammaSource,
) -> Result<Complex64> {
    let Occupation { n_a, n_b, k_a, k_b } = occupation;
    let prefactor = disconnected_prefactor(p, n_a, n_b, mode)?;
    let prefactor = prefactor.to_f64().ok_or_else(|| Error::Capacity("prefactor overflows f64".into()))?;
    if !prefactor.is_finite() {
        return Err(Error::Capacity(format!("prefactor for n_a = {n_a}, n_b = {n_b} overflows f64")));
    }
    let t = connected_t(p, params, source)?;
    let c_a = channel.pass_coefficient(&single_photon_coeffs(k_a, params));
    let c_b = channel.pass_coefficient(&single_photon_coeffs(k_b, params));
    Ok(prefactor * channel.basis_factor(p) * t * c_a.powu(n_a - p - 1) * c_b.powu(n_b))
}

/// (n_b+p)!/(n_b!(p+1)!), the gain of the symmetrized channel.
pub fn stimulation_ratio(p: u32, n_b: u32) -> BigRational {
    BigRational::new(factorial(n_b + p), factorial(n_b) * factorial(p + 1))
}

/// Broadened momentum distribution of scattered photons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumDistribution {
    pub k_grid: Vec<f64>,
    pub intensity: Vec<f64>,
    pub linewidth: f64,
}

impl MomentumDistribution {
    /// Indices of strict interior local maxima.
    pub fn local_maxima(&self) -> Vec<usize> {
        (1..self.intensity.len().saturating_sub(1))
            .filter(|&i| self.intensity[i] > self.intensity[i - 1] && self.intensity[i] > self.intensity[i + 1])
            .collect()
    }

    /// Trapezoid integral over the grid.
    pub fn integral(&self) -> f64 {
        self.k_grid
            .windows(2)
            .zip(self.intensity.windows(2))
            .map(|(k, i)| 0.5 * (k[1] - k[0]) * (i[0] + i[1]))
            .sum()
    }
}

/// Peak-normalized Lorentzian of half width `linewidth`: 1 at x = 0.
pub fn lorentzian(x: f64, linewidth: f64) -> f64 {
    let w2 = linewidth * linewidth;
    w2 / (x * x + w2)
}

/// Uniform grid of `n` points over [k_b − margin·Δk, 2k_a − k_b + margin·Δk].
pub fn grid_222(k_a: f64, k_b: f64, linewidth: f64, margin: f64, n: usize) -> Vec<f64> {
    let (lo, hi) = span_222(k_a, k_b);
    let (lo, hi) = (lo - margin * linewidth, hi + margin * linewidth);
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect()
}

fn span_222(k_a: f64, k_b: f64) -> (f64, f64) {
    let mirror = 2.0 * k_a - k_b;
    (k_b.min(mirror), k_b.max(mirror))
}

fn check_grid(k_grid: &[f64], k_a: f64, k_b: f64, linewidth: f64) -> Result<()> {
    if k_grid.len() < 3 {
        return Err(Error::Validation { field: "k_grid", requirement: "at least three points" });
    }
    let step = (k_grid[k_grid.len() - 1] - k_grid[0]) / (k_grid.len() - 1) as f64;
    let uniform = step > 0.0 && k_grid.windows(2).all(|w| ((w[1] - w[0]) - step).abs() <= 1e-6 * step);
    if !uniform {
        return Err(Error::Validation { field: "k_grid", requirement: "ascending and uniform" });
    }
    let (lo, hi) = span_222(k_a, k_b);
    let tol = 1e-9 * (1.0 + hi.abs());
    if k_grid[0] > lo - 10.0 * linewidth + tol || k_grid[k_grid.len() - 1] < hi + 10.0 * linewidth - tol {
        return Err(Error::Domain(format!(
            "grid [{}, {}] does not cover [{}, {}]",
            k_grid[0],
            k_grid[k_grid.len() - 1],
            lo - 10.0 * linewidth,
            hi + 10.0 * linewidth
        )));
    }
    Ok(())
}

/// Reflected momentum distribution of two A photons scattered in the
/// presence (or absence) of two B photons, with each δ peak replaced by a
/// Lorentzian of half width `linewidth`.
pub fn spectrum_222(
    k_grid: &[f64],
    k_a: f64,
    k_b: f64,
    linewidth: f64,
    params: &SystemParams,
    n_b_present: bool,
) -> Result<MomentumDistribution> {
    if !(linewidth > 0.0) {
        return Err(Error::Validation { field: "linewidth", requirement: "positive" });
    }
    let separation = (k_a - k_b).abs();
    if linewidth >= separation {
        return Err(Error::Resolution { linewidth, separation });
    }
    check_grid(k_grid, k_a, k_b, linewidth)?;
    let r_b2 = single_photon_coeffs(k_b, params).r.norm_sqr();
    let mirror = 2.0 * k_a - k_b;
    let pair = |q: f64| two_photon_connected(k_a, k_a, q, 2.0 * k_a - q, params, Basis::RightLeft).coefficient.norm();
    let stimulated = pair(k_b);
    let intensity = k_grid
        .iter()
        .map(|&q| {
            let background = 2.0 * pair(q);
            let value = if n_b_present {
                let weight = lorentzian(q - k_b, linewidth) + lorentzian(q - mirror, linewidth);
                background * (1.0 - weight) + 3.0 * stimulated * weight
            } else {
                background
            };
            0.25 * value * r_b2
        })
        .collect();
    Ok(MomentumDistribution { k_grid: k_grid.to_vec(), intensity, linewidth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> SystemParams {
        SystemParams::new(10.0, 1.0, 1.0).unwrap()
    }

    fn frac(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn resonant(n_a: u32, n_b: u32) -> Occupation {
        let k = params().omega01 / params().v;
        Occupation { n_a, n_b, k_a: k, k_b: k }
    }

    #[test]
    fn symmetrized_gain_for_two_spectators() {
        let sym = disconnected_prefactor(1, 3, 2, PrefactorMode::Symmetrized).unwrap();
        let non = disconnected_prefactor(1, 3, 2, PrefactorMode::NonSymmetrized).unwrap();
        assert_eq!(sym / non, frac(3, 2));
        assert_eq!(stimulation_ratio(1, 2), frac(3, 2));
    }

    #[test]
    fn bare_connected_diagram_prefactors() {
        let s = params();
        let t = connected_t(1, &s, GammaSource::Published).unwrap();
        let sym = disconnected_s(1, resonant(2, 0), PeakChannel::EMode, PrefactorMode::Symmetrized, &s, GammaSource::Published)
            .unwrap();
        let non =
            disconnected_s(1, resonant(2, 0), PeakChannel::EMode, PrefactorMode::NonSymmetrized, &s, GammaSource::Published)
                .unwrap();
        assert!((sym - t / 2.0).norm() < 1e-14);
        assert!((non - t).norm() < 1e-14);
    }

    #[test]
    fn resonant_pass_phases() {
        let s = params();
        let t = connected_t(1, &s, GammaSource::Published).unwrap();
        for (n_a, n_b) in [(2, 1), (3, 1), (4, 2), (5, 0)] {
            let prefactor = disconnected_prefactor(1, n_a, n_b, PrefactorMode::NonSymmetrized).unwrap().to_f64().unwrap();
            let got =
                disconnected_s(1, resonant(n_a, n_b), PeakChannel::EMode, PrefactorMode::NonSymmetrized, &s, GammaSource::Published)
                    .unwrap();
            let sign = if (n_a - 2 + n_b) % 2 == 0 { 1.0 } else { -1.0 };
            assert!((got - sign * prefactor * t).norm() < 1e-12 * got.norm());
        }
    }

    #[test]
    fn too_few_photons() {
        let err = disconnected_s(2, resonant(2, 0), PeakChannel::EMode, PrefactorMode::Symmetrized, &params(), GammaSource::Published)
            .unwrap_err();
        assert!(matches!(err, Error::InsufficientPhotons { needed: 3, got: 2 }));
    }

    #[test]
    fn stimulation_examples() {
        assert_eq!(stimulation_ratio(1, 0), frac(1, 2));
        for n_b in [10u32, 100, 1000] {
            let r = stimulation_ratio(1, n_b).to_f64().unwrap() / n_b as f64;
            assert!((r - 0.5).abs() <= 0.5 / n_b as f64 + 1e-15);
        }
    }

    #[test]
    fn symmetrized_over_plain_is_the_stimulation_ratio() {
        for p in 0..=3 {
            for n_a in p + 1..=8 {
                for n_b in 0..=8 {
                    let sym = disconnected_prefactor(p, n_a, n_b, PrefactorMode::Symmetrized).unwrap();
                    let non = disconnected_prefactor(p, n_a, n_b, PrefactorMode::NonSymmetrized).unwrap();
                    assert_eq!(sym / non, stimulation_ratio(p, n_b));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn channel_factor(k_a in 9.0f64..11.0, k_b in 9.0f64..11.0, p in 0u32..3, extra in 0u32..4, n_b in 0u32..4) {
            let s = params();
            let occ = Occupation { n_a: p + 1 + extra, n_b, k_a, k_b };
            let e = disconnected_s(p, occ, PeakChannel::EMode, PrefactorMode::Symmetrized, &s, GammaSource::Published).unwrap();
            let t = disconnected_s(p, occ, PeakChannel::Transmitted, PrefactorMode::Symmetrized, &s, GammaSource::Published).unwrap();
            let ca = single_photon_coeffs(k_a, &s);
            let cb = single_photon_coeffs(k_b, &s);
            let expected = (ca.t.norm() / ca.t_tilde.norm()).powi(extra as i32)
                * (cb.t.norm() / cb.t_tilde.norm()).powi(n_b as i32)
                / 2f64.powi(p as i32 + 1);
            prop_assert!((t.norm() / e.norm() - expected).abs() <= 1e-12 * expected.max(1e-300));
        }
    }

    fn setup_222() -> (f64, f64, f64, SystemParams) {
        let s = params();
        let delta = 0.05;
        ((s.omega01 + delta) / s.v, (s.omega01 - delta) / s.v, 0.02, s)
    }

    #[test]
    fn pair_emission_is_symmetric_without_b() {
        let (k_a, k_b, w, s) = setup_222();
        let grid = grid_222(k_a, k_b, w, 10.0, 801);
        let d = spectrum_222(&grid, k_a, k_b, w, &s, false).unwrap();
        for (q, i) in grid.iter().zip(&d.intensity) {
            let m = 2.0 * k_a - q;
            let j = 0.25
                * 2.0
                * two_photon_connected(k_a, k_a, m, 2.0 * k_a - m, &s, Basis::RightLeft).coefficient.norm()
                * single_photon_coeffs(k_b, &s).r.norm_sqr();
            assert!((i - j).abs() <= 1e-12 * i);
        }
        let n = d.intensity.len();
        for i in 0..n {
            assert!((d.intensity[i] - d.intensity[n - 1 - i]).abs() <= 1e-12 * d.intensity[i]);
        }
    }

    #[test]
    fn two_stimulated_maxima() {
        let (k_a, k_b, w, s) = setup_222();
        let grid = grid_222(k_a, k_b, w, 10.0, 2001);
        let with = spectrum_222(&grid, k_a, k_b, w, &s, true).unwrap();
        let without = spectrum_222(&grid, k_a, k_b, w, &s, false).unwrap();
        let maxima = with.local_maxima();
        assert_eq!(maxima.len(), 2);
        let step = grid[1] - grid[0];
        for (&i, target) in maxima.iter().zip([k_b, 2.0 * k_a - k_b]) {
            assert!((grid[i] - target).abs() <= step);
            assert!(with.intensity[i] > without.intensity[i]);
        }
        assert!(with.integral() >= without.integral());
        assert!(with.intensity.iter().all(|i| *i >= 0.0));
    }

    #[test]
    fn stimulated_excess_vanishes_far_away() {
        let (k_a, k_b, w, s) = setup_222();
        let grid = grid_222(k_a, k_b, w, 5000.0, 20001);
        let with = spectrum_222(&grid, k_a, k_b, w, &s, true).unwrap();
        let without = spectrum_222(&grid, k_a, k_b, w, &s, false).unwrap();
        let excess: Vec<f64> = with.intensity.iter().zip(&without.intensity).map(|(a, b)| (a - b).abs()).collect();
        let peak = excess.iter().cloned().fold(0.0, f64::max);
        assert!(excess[0] <= 1e-6 * peak && excess[excess.len() - 1] <= 1e-6 * peak);
    }

    #[test]
    fn unresolved_peaks_are_rejected() {
        let (k_a, k_b, _, s) = setup_222();
        let grid = grid_222(k_a, k_b, 0.2, 10.0, 101);
        assert!(matches!(spectrum_222(&grid, k_a, k_b, 0.2, &s, true), Err(Error::Resolution { .. })));
    }

    #[test]
    fn grid_must_cover_both_peaks() {
        let (k_a, k_b, w, s) = setup_222();
        let grid = grid_222(k_a, k_b, w, 2.0, 101);
        assert!(matches!(spectrum_222(&grid, k_a, k_b, w, &s, true), Err(Error::Domain(_))));
    }
}
