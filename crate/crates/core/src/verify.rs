//! Self-check suite: every acceptance criterion plus the cross-module
//! invariants, each reported as a named pass/fail line.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::bloch::{extract_harmonics, integrate_bloch, BlochOptions};
use num_complex::Complex64;

use crate::coherent::{
    coherent_peak_amplitude, interaction_length_ratio, scaling_exponent, ChannelCoefficients, CoherentDrive,
    ScalingMode, TruncationPolicy,
};
use crate::diagrams::{
    connected_t, derivative_prefactor, extract_gamma, GammaSource, PrefactorMode, DEFAULT_DEGREE_CAP, PUBLISHED_GAMMA,
};
use crate::error::Result;
use crate::multiphoton::{grid_222, spectrum_222, stimulation_ratio, PeakChannel};
use crate::params::{DriveConfig, RawConfig, Side, SystemParams};
use crate::semiclassical::{mixing_angle, photon_number, side_peak_amplitude, sigma_minus, CoherenceForm, Regime};
use crate::smatrix::{chirality_rotate, single_photon_coeffs, two_photon_connected, Basis, Rotation};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, outcome: Result<(bool, String)>) -> Self {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        Check { name: name.into(), passed, detail }
    }

    /// One line: "PASS name: detail" or "FAIL name: detail".
    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn unit_params() -> SystemParams {
    SystemParams::new(10.0, 1.0, 1.0).expect("valid constants")
}

fn fact(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// γ table: two calibrated values and two predictions, integer equality.
pub fn gamma_table() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, published) in PUBLISHED_GAMMA.iter().enumerate() {
        let g = extract_gamma(p as u32)?;
        let hit = g.as_integer() == Some(*published);
        ok &= hit;
        parts.push(format!("p={p}: {} (published {published})", g.value));
    }
    Ok((ok, parts.join(", ")))
}

/// Interaction-length ratios 1, √2, 5^{1/3}.
pub fn interaction_lengths(source: GammaSource) -> Result<(bool, String)> {
    let expected = [1.0, 2f64.sqrt(), 5f64.powf(1.0 / 3.0)];
    let mut worst: f64 = 0.0;
    for (p, e) in (1..=3).zip(expected) {
        worst = worst.max((interaction_length_ratio(p, source)? - e).abs());
    }
    Ok((worst <= 1e-12, format!("max deviation {worst:.2e}")))
}

/// connected_T(1) against the resonant two-photon coefficient, and
/// connected_T(0) against the resonant single-photon amplitude.
pub fn cross_derivation() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for v in [0.5, 1.0, 2.0] {
        let s = SystemParams::new(10.0, 1.0, v)?;
        let k = s.omega01 / s.v;
        let t1 = connected_t(1, &s, GammaSource::Published)?;
        let c = two_photon_connected(k, k, k, k, &s, Basis::Even).coefficient;
        let hand = -16.0 * v / (PI * s.gamma);
        worst = worst.max((c.re - t1).abs().max(c.im.abs())).max((t1 - hand).abs());
        let t0 = connected_t(0, &s, GammaSource::Published)?;
        let resonant = single_photon_coeffs(k, &s).t_tilde - 1.0;
        worst = worst.max((resonant.re - t0).abs().max(resonant.im.abs())).max((t0 + 2.0).abs());
    }
    Ok((worst <= 1e-12, format!("max deviation {worst:.2e}")))
}

/// |t|² + |r|² = 1 and |t̃| = 1 at 1000 momenta; extinction at resonance.
pub fn unitarity() -> Result<(bool, String)> {
    let s = unit_params();
    let mut worst: f64 = 0.0;
    // Deterministic low-discrepancy momenta over [0, 2k_ε].
    let golden = 0.618_033_988_749_894_9;
    for i in 0..1000 {
        let k = 2.0 * s.omega01 / s.v * ((i as f64 * golden) % 1.0);
        let c = single_photon_coeffs(k, &s);
        worst = worst.max((c.t.norm_sqr() + c.r.norm_sqr() - 1.0).abs()).max((c.t_tilde.norm() - 1.0).abs());
    }
    let res = single_photon_coeffs(s.omega01 / s.v, &s);
    let extinct = res.t.norm() <= 1e-15 && (res.r + 1.0).norm() <= 1e-15;
    Ok((worst <= 1e-12 && extinct, format!("max deviation {worst:.2e}, t(res) = {}, r(res) = {}", res.t, res.r)))
}

/// Largest relative deviation of |c_{2p+1}| from |Ω^(2p+1)|/Γ, p = 0..=2.
pub fn oracle_deviation(delta: f64) -> Result<Vec<f64>> {
    let s = unit_params();
    let d = DriveConfig::new(0.5, 0.5, delta, &s)?;
    let traj = integrate_bloch(&d, &s, &BlochOptions::defaults_for(&d, &s))?;
    let c = extract_harmonics(&traj, &[1, 3, 5])?;
    Ok((0..3u32)
        .map(|p| {
            let closed = side_peak_amplitude(&d, &s, p, Side::Right, Regime::Full).norm() / s.gamma;
            (c[p as usize].norm() - closed).abs() / closed
        })
        .collect())
}

/// Bloch harmonics against the closed form at δω = 0.01Γ, plus monotone
/// improvement as δω shrinks.
pub fn oracle_equivalence() -> Result<(bool, String)> {
    let mut rows = Vec::new();
    for delta in [0.1, 0.03, 0.01] {
        rows.push(oracle_deviation(delta)?);
    }
    let within = rows[2].iter().all(|d| *d <= 0.02);
    let monotone = (0..3).all(|p| rows[0][p] > rows[1][p] && rows[1][p] > rows[2][p]);
    let detail = rows
        .iter()
        .zip([0.1, 0.03, 0.01])
        .map(|(r, d)| format!("δω={d}: [{:.2e}, {:.2e}, {:.2e}]", r[0], r[1], r[2]))
        .collect::<Vec<_>>()
        .join("; ");
    Ok((within && monotone, detail))
}

/// Fourier series at P_max = 40 against the closed form for |y| ≤ 0.5.
pub fn series_identity() -> Result<(bool, String)> {
    let s = unit_params();
    let mut worst: f64 = 0.0;
    let mut max_y: f64 = 0.0;
    for (a, b) in [(0.5, 0.5), (1.0, 1.0), (0.2, 0.9), (1.5, 0.7), (3.0, 3.0), (0.0, 1.0)] {
        let d = DriveConfig::new(a, b, 0.01, &s)?;
        let y = mixing_angle(&d, &s).y.abs();
        if y > 0.5 {
            continue;
        }
        max_y = max_y.max(y);
        let period = 2.0 * PI / d.delta;
        for i in 0..64 {
            let t = period * i as f64 / 64.0;
            let closed = sigma_minus(&d, &s, t, CoherenceForm::Closed)?;
            let series = sigma_minus(&d, &s, t, CoherenceForm::Series { p_max: 40 })?;
            worst = worst.max((closed - series).norm());
        }
    }
    Ok((worst <= 1e-10, format!("max deviation {worst:.2e} up to |y| = {max_y:.3}")))
}

/// Generating-functional prefactors against the factorial closed forms.
pub fn combinatorics() -> Result<(bool, String)> {
    let mut ok = true;
    let mut count = 0;
    for p in 0..=2u32 {
        for n_a in p + 1..=6 {
            for n_b in 0..=6u32 {
                let sym = derivative_prefactor(n_a, n_b, p, PrefactorMode::Symmetrized, DEFAULT_DEGREE_CAP)?;
                let non = derivative_prefactor(n_a, n_b, p, PrefactorMode::NonSymmetrized, DEFAULT_DEGREE_CAP)?;
                let p1 = BigInt::from(p + 1);
                ok &= sym == BigRational::new(fact(n_a) * fact(n_b + p), p1.clone());
                ok &= non == BigRational::new(fact(n_a) * fact(p + 1) * fact(n_b), p1);
                ok &= &sym / &non == stimulation_ratio(p, n_b);
                count += 1;
            }
        }
    }
    let example = derivative_prefactor(2, 2, 1, PrefactorMode::Symmetrized, DEFAULT_DEGREE_CAP)?
        / derivative_prefactor(2, 2, 1, PrefactorMode::NonSymmetrized, DEFAULT_DEGREE_CAP)?;
    let three_halves = BigRational::new(BigInt::from(3), BigInt::from(2));
    ok &= example == three_halves;
    Ok((ok, format!("{count} cases exact, p=1 n_b=2 ratio {example}")))
}

/// Weak-drive limit and the photon-number relation.
pub fn weak_drive() -> Result<(bool, String)> {
    let s = unit_params();
    let omega = 1e-3;
    let d = DriveConfig::new(omega, omega, 0.01, &s)?;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_n: f64 = 0.0;
    for p in 0..=3 {
        let full = side_peak_amplitude(&d, &s, p, Side::Right, Regime::Full);
        let weak = side_peak_amplitude(&d, &s, p, Side::Right, Regime::Weak);
        worst_ratio = worst_ratio.max((full / weak - 1.0).norm());
    }
    let d = DriveConfig::new(3e-3, 2e-3, 0.01, &s)?;
    let n_a = photon_number(d.rabi_a.into(), &s);
    let n_b = photon_number(d.rabi_b.into(), &s);
    for p in 0..=3 {
        let n = photon_number(side_peak_amplitude(&d, &s, p, Side::Right, Regime::Weak), &s);
        let expected = n_a.powi(p as i32 + 1) * n_b.powi(p as i32);
        worst_n = worst_n.max((n / expected - 1.0).abs());
    }
    Ok((
        worst_ratio <= 0.01 && worst_n <= 1e-12,
        format!("max |full/weak − 1| {worst_ratio:.2e}, max N-relation deviation {worst_n:.2e}"),
    ))
}

/// Fitted log–log exponents of |M|² over means in [50, 200].
pub fn classical_scaling() -> Result<(bool, String)> {
    let s = unit_params();
    let means: Vec<f64> = (0..7).map(|i| 50.0 * 4f64.powf(i as f64 / 6.0)).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, tol) in [(1u32, 0.05), (2, 0.10)] {
        let ea = scaling_exponent(p, ScalingMode::A, &means, 100.0, &s)?;
        let eb = scaling_exponent(p, ScalingMode::B, &means, 100.0, &s)?;
        let (ta, tb) = (f64::from(p + 1), f64::from(p));
        ok &= (ea / ta - 1.0).abs() <= tol && (eb / tb - 1.0).abs() <= tol;
        parts.push(format!("p={p}: alpha2 slope {ea:.4} (target {ta}), beta2 slope {eb:.4} (target {tb})"));
    }
    Ok((ok, parts.join("; ")))
}

/// Stimulated maxima at k_b and 2k_a − k_b with the 3/2 gain, and mirror
/// symmetry without B photons.
pub fn stimulated_spectrum() -> Result<(bool, String)> {
    let s = unit_params();
    let delta = 0.05;
    let (k_a, k_b, w) = ((s.omega01 + delta) / s.v, (s.omega01 - delta) / s.v, 0.02);
    let grid = grid_222(k_a, k_b, w, 10.0, 4001);
    let with = spectrum_222(&grid, k_a, k_b, w, &s, true)?;
    let without = spectrum_222(&grid, k_a, k_b, w, &s, false)?;
    let maxima = with.local_maxima();
    let step = grid[1] - grid[0];
    let mut ok = maxima.len() == 2;
    let mut gains = Vec::new();
    if ok {
        for (&i, target) in maxima.iter().zip([k_b, 2.0 * k_a - k_b]) {
            ok &= (grid[i] - target).abs() <= step;
            let gain = with.intensity[i] / without.intensity[i];
            gains.push(gain);
            ok &= (gain / 1.5 - 1.0).abs() <= 1e-2;
        }
    }
    let n = without.intensity.len();
    let asym = (0..n)
        .map(|i| (without.intensity[i] - without.intensity[n - 1 - i]).abs() / without.intensity[i])
        .fold(0.0, f64::max);
    ok &= asym <= 1e-12;
    Ok((ok, format!("{} maxima, gains {gains:.5?}, mirror asymmetry {asym:.2e}", maxima.len())))
}

/// Config JSON round trip and unit rescaling of dimensionless outputs.
pub fn plumbing() -> Result<(bool, String)> {
    let s = SystemParams::new(7.3, 0.9, 1.3)?;
    let d = DriveConfig::new(0.41, 0.77, 0.013, &s)?;
    let raw = RawConfig::from_validated(&s, &d);
    let (s2, d2) = crate::params::validate_config(&RawConfig::from_json(&raw.to_json())?)?;
    let round_trip = s2 == s && d2 == d;
    let (sr, dr) = s.rescaled(&d);
    let y0 = mixing_angle(&d, &s).y;
    let y1 = mixing_angle(&dr, &sr).y;
    let rescale = (y0 - y1).abs() <= 1e-12;
    let t = connected_t(2, &s, GammaSource::Published)? / connected_t(2, &sr, GammaSource::Published)?;
    let rescale = rescale && (t - 1.0).abs() <= 1e-12;
    Ok((round_trip && rescale, format!("round trip {round_trip}, rescaling {rescale}")))
}

/// Exchanging the tones mirrors the semiclassical spectrum.
pub fn semiclassical_mirror() -> Result<(bool, String)> {
    let s = unit_params();
    let mut worst: f64 = 0.0;
    for (a, b) in [(0.3, 0.8), (1.2, 0.1), (0.5, 0.5)] {
        let d = DriveConfig::new(a, b, 0.01, &s)?;
        for p in 0..=4 {
            for side in Side::BOTH {
                let x = side_peak_amplitude(&d, &s, p, side, Regime::Full);
                let y = side_peak_amplitude(&d.mirrored(), &s, p, side.mirror(), Regime::Full);
                worst = worst.max((x - y).norm());
            }
        }
    }
    Ok((worst <= 1e-15, format!("max deviation {worst:.2e}")))
}

/// The (R, L) ↔ (e, o) rotation is an involution and the e-mode phase
/// factor reproduces t and r.
pub fn basis_rotation() -> Result<(bool, String)> {
    let s = unit_params();
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let k = 5.0 + 0.05 * i as f64;
        let c = single_photon_coeffs(k, &s);
        // An incoming right mover: e and o parts pass with t̃ and 1.
        let (e, o) = chirality_rotate(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Rotation::ToEvenOdd);
        let (right, left) = chirality_rotate(c.t_tilde * e, o, Rotation::ToRightLeft);
        worst = worst.max((right - c.t).norm()).max((left - c.r).norm());
        let (x, y) = chirality_rotate(Complex64::new(0.3, -1.0), Complex64::new(2.0, 0.5), Rotation::ToEvenOdd);
        let (x, y) = chirality_rotate(x, y, Rotation::ToRightLeft);
        worst = worst.max((x - Complex64::new(0.3, -1.0)).norm()).max((y - Complex64::new(2.0, 0.5)).norm());
    }
    Ok((worst <= 1e-14, format!("max deviation {worst:.2e}")))
}

/// Coherent amplitudes do not move when the photon-number caps double.
pub fn truncation_stability() -> Result<(bool, String)> {
    let s = unit_params();
    let coeffs = ChannelCoefficients::unit(PeakChannel::Reflected);
    let mut worst: f64 = 0.0;
    for (a2, b2) in [(10.0, 5.0), (80.0, 40.0)] {
        let drive = CoherentDrive::real(a2, b2)?;
        let base = TruncationPolicy::for_drive(&drive, TruncationPolicy::DEFAULT_TAIL_BOUND);
        for p in 1..=2 {
            let x = coherent_peak_amplitude(p, &drive, &coeffs, &s, &base, GammaSource::Published)?.value;
            let y = coherent_peak_amplitude(p, &drive, &coeffs, &s, &base.scaled(2.0), GammaSource::Published)?.value;
            worst = worst.max((x - y).norm() / x.norm());
        }
    }
    Ok((worst <= 1e-10, format!("max relative change {worst:.2e}")))
}

/// The ten acceptance criteria in order.
pub fn acceptance_checks() -> Vec<Check> {
    vec![
        Check::new("1 gamma table", gamma_table()),
        Check::new("2 interaction lengths", interaction_lengths(GammaSource::Computed)),
        Check::new("3 cross-derivation identity", cross_derivation()),
        Check::new("4 single-photon unitarity", unitarity()),
        Check::new("5 Bloch oracle equivalence", oracle_equivalence()),
        Check::new("6 series identity", series_identity()),
        Check::new("7 combinatorics oracle", combinatorics()),
        Check::new("8 weak drive and N relation", weak_drive()),
        Check::new("9 classical-limit scaling", classical_scaling()),
        Check::new("10 stimulated two-photon spectrum", stimulated_spectrum()),
    ]
}

/// Acceptance criteria followed by the cross-module invariants.
pub fn run_all() -> Vec<Check> {
    let mut checks = acceptance_checks();
    checks.push(Check::new("config round trip and rescaling", plumbing()));
    checks.push(Check::new("interaction lengths from the published table", interaction_lengths(GammaSource::Published)));
    checks.push(Check::new("semiclassical mirror symmetry", semiclassical_mirror()));
    checks.push(Check::new("chirality basis rotation", basis_rotation()));
    checks.push(Check::new("coherent truncation stability", truncation_stability()));
    checks
}
