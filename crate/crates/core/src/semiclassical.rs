//! Closed-form quasi-stationary response of a TLS to two classical tones.
//!
//! Every quotient sinθ/(4Ω_AΩ_B) is evaluated in its cancelled form
//! 1/(Γ² + 2Ω_A² + 2Ω_B²), so a single-tone drive is not a special case.

use num_complex::Complex64;

use crate::params::{DriveConfig, PeakRecord, PeakSpectrum, Side, SystemParams};
use crate::{Error, Result};

/// Saturation angle θ ∈ [0, π/2] and the series ratio y = −tan(θ/2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingAngle {
    pub theta: f64,
    pub y: f64,
    /// sinθ / (4Ω_AΩ_B), finite for every drive.
    pub quotient: f64,
}

impl MixingAngle {
    pub fn sin(&self) -> f64 {
        self.theta.sin()
    }

    /// tanθ / (4Ω_AΩ_B).
    pub fn tan_quotient(&self) -> f64 {
        self.quotient / self.theta.cos()
    }

    /// tan(θ/2) = −y.
    pub fn half_tan(&self) -> f64 {
        -self.y
    }
}

pub fn mixing_angle(drive: &DriveConfig, params: &SystemParams) -> MixingAngle {
    let (a, b, g) = (drive.rabi_a, drive.rabi_b, params.gamma);
    let quotient = 1.0 / (g * g + 2.0 * a * a + 2.0 * b * b);
    let sin = 4.0 * a * b * quotient;
    // 4ab ≤ 2a² + 2b² < Γ² + 2a² + 2b²
    assert!(sin < 1.0 + 1e-15, "sinθ = {sin} exceeds one");
    let theta = sin.min(1.0).asin();
    MixingAngle { theta, y: -(0.5 * theta).tan(), quotient }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoherenceForm {
    Closed,
    /// Fourier series truncated at |p| ≤ p_max.
    Series { p_max: u32 },
}

/// ⟨σ⁻⟩(t) in the frame rotating at ω01.
pub fn sigma_minus(drive: &DriveConfig, params: &SystemParams, t: f64, form: CoherenceForm) -> Result<Complex64> {
    let angle = mixing_angle(drive, params);
    let phase = Complex64::from_polar(1.0, drive.delta * t);
    let carrier = drive.rabi_a * phase + drive.rabi_b * phase.conj();
    match form {
        CoherenceForm::Closed => {
            let denom = 1.0 + angle.sin() * (2.0 * drive.delta * t).cos();
            Ok(-params.gamma * angle.quotient * carrier / denom)
        }
        CoherenceForm::Series { p_max } => {
            if angle.y.abs() >= 1.0 {
                return Err(Error::Domain("Fourier series of <sigma-> needs |y| < 1".into()));
            }
            let beat = phase * phase;
            let mut sum = Complex64::new(1.0, 0.0);
            let (mut up, mut yp) = (Complex64::new(1.0, 0.0), 1.0);
            for _ in 1..=p_max {
                up *= beat;
                yp *= angle.y;
                sum += yp * (up + up.conj());
            }
            Ok(-params.gamma * angle.tan_quotient() * carrier * sum)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Full,
    /// Leading order in Ω/Γ.
    Weak,
}

/// Amplitude Ω^(2p+1) of the peak at ω01 ± (2p+1)δω.
///
/// The amplitude equals Γ times the Fourier coefficient of ⟨σ⁻⟩ at that
/// harmonic.
pub fn side_peak_amplitude(drive: &DriveConfig, params: &SystemParams, p: u32, side: Side, regime: Regime) -> Complex64 {
    let (major, minor) = match side {
        Side::Right => (drive.rabi_a, drive.rabi_b),
        Side::Left => (drive.rabi_b, drive.rabi_a),
    };
    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
    let g = params.gamma;
    let value = match regime {
        Regime::Full => {
            let angle = mixing_angle(drive, params);
            let t = angle.half_tan();
            sign * g * g * angle.tan_quotient() * t.powi(p as i32) * (minor * t - major)
        }
        Regime::Weak => {
            -sign * 2f64.powi(p as i32) / g.powi(2 * p as i32) * major.powi(p as i32 + 1) * minor.powi(p as i32)
        }
    };
    Complex64::new(value, 0.0)
}

/// Peaks p = 0..=p_max on both sides, sorted by frequency.
pub fn spectrum(drive: &DriveConfig, params: &SystemParams, p_max: u32, regime: Regime) -> PeakSpectrum {
    PeakSpectrum::new((0..=p_max).flat_map(|p| {
        Side::BOTH.into_iter().map(move |side| {
            let amp = side_peak_amplitude(drive, params, p, side, regime);
            PeakRecord::new(p, side, params.omega01, drive.delta, amp)
        })
    }))
}

/// Photon number N = √2|Ω|/Γ associated with a field amplitude.
pub fn photon_number(rabi: Complex64, params: &SystemParams) -> f64 {
    std::f64::consts::SQRT_2 * rabi.norm() / params.gamma
}

/// N^(2p+1) = N_A^{p+1} N_B^p on the right, mirrored on the left.
pub fn peak_photon_number(n_a: f64, n_b: f64, p: u32, side: Side) -> f64 {
    let (major, minor) = match side {
        Side::Right => (n_a, n_b),
        Side::Left => (n_b, n_a),
    };
    major.powi(p as i32 + 1) * minor.powi(p as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn setup(a: f64, b: f64, delta: f64) -> (DriveConfig, SystemParams) {
        let params = SystemParams::new(10.0, 1.0, 1.0).unwrap();
        (DriveConfig::new(a, b, delta, &params).unwrap(), params)
    }

    #[test]
    fn half_saturation_angle() {
        let (d, s) = setup(0.5, 0.5, 0.01);
        let m = mixing_angle(&d, &s);
        assert!((m.sin() - 0.5).abs() < 1e-15);
        assert!((m.theta - PI / 6.0).abs() < 1e-15);
        assert!((m.y + (PI / 12.0).tan()).abs() < 1e-15);
        assert!((m.y + 0.26795).abs() < 1e-5);
    }

    #[test]
    fn single_tone_angle_vanishes() {
        let (d, s) = setup(0.0, 0.7, 0.01);
        let m = mixing_angle(&d, &s);
        assert_eq!(m.theta, 0.0);
        assert_eq!(m.y, 0.0);
    }

    #[test]
    fn unit_rabi_angle() {
        let (d, s) = setup(1.0, 1.0, 0.01);
        let m = mixing_angle(&d, &s);
        assert!((m.sin() - 0.8).abs() < 1e-15);
        assert!((m.theta - 0.92730).abs() < 1e-5);
    }

    #[test]
    fn closed_form_at_origin() {
        let (d, s) = setup(0.5, 0.5, 0.01);
        let z = sigma_minus(&d, &s, 0.0, CoherenceForm::Closed).unwrap();
        assert!((z - Complex64::new(-1.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn closed_form_single_tone() {
        let (d, s) = setup(0.0, 0.8, 0.03);
        for &t in &[0.0, 1.7, 40.0] {
            let z = sigma_minus(&d, &s, t, CoherenceForm::Closed).unwrap();
            let expected = -0.8 * Complex64::from_polar(1.0, -0.03 * t) / (1.0 + 2.0 * 0.64);
            assert!((z - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn series_matches_closed_over_a_period() {
        let (d, s) = setup(0.5, 0.5, 0.01);
        let y = mixing_angle(&d, &s).y.abs();
        let bound = 2.0 * y.powi(41) / (1.0 - y);
        let period = 2.0 * PI / d.delta;
        let worst = (0..64)
            .map(|i| {
                let t = period * i as f64 / 64.0;
                let a = sigma_minus(&d, &s, t, CoherenceForm::Closed).unwrap();
                let b = sigma_minus(&d, &s, t, CoherenceForm::Series { p_max: 40 }).unwrap();
                (a - b).norm()
            })
            .fold(0.0, f64::max);
        assert!(worst <= bound.max(1e-14) && worst <= 1e-10, "worst = {worst}");
    }

    #[test]
    fn weak_third_order_value() {
        let (d, s) = setup(1e-2, 1e-2, 0.01);
        let z = side_peak_amplitude(&d, &s, 1, Side::Right, Regime::Weak);
        assert!((z.re - 2e-6).abs() < 1e-20);
    }

    #[test]
    fn full_principal_peak_at_half_saturation() {
        let (d, s) = setup(0.5, 0.5, 0.01);
        let z = side_peak_amplitude(&d, &s, 0, Side::Right, Regime::Full);
        let expected = 0.5 / 3f64.sqrt() * ((PI / 12.0).tan() - 1.0);
        assert!((z.re - expected).abs() < 1e-15);
        assert!((z.re + 0.21133).abs() < 1e-5);
    }

    #[test]
    fn single_tone_has_no_mixing_peaks() {
        let (d, s) = setup(0.6, 0.0, 0.01);
        for p in 1..5 {
            for side in Side::BOTH {
                assert_eq!(side_peak_amplitude(&d, &s, p, side, Regime::Full).norm(), 0.0);
            }
        }
    }

    #[test]
    fn amplitudes_are_fourier_coefficients() {
        // Rectangle rule is spectrally exact for the periodic closed form.
        let (d, s) = setup(0.7, 0.4, 0.02);
        let period = 2.0 * PI / d.delta;
        let n = 512;
        for p in 0..4u32 {
            for side in Side::BOTH {
                let h = side.harmonic(p) as f64;
                let c: Complex64 = (0..n)
                    .map(|i| {
                        let t = period * i as f64 / n as f64;
                        sigma_minus(&d, &s, t, CoherenceForm::Closed).unwrap()
                            * Complex64::from_polar(1.0, -h * d.delta * t)
                    })
                    .sum::<Complex64>()
                    / n as f64;
                let amp = side_peak_amplitude(&d, &s, p, side, Regime::Full);
                assert!((c * s.gamma - amp).norm() < 1e-13, "p={p} {side}");
            }
        }
    }

    #[test]
    fn photon_number_relation() {
        assert_eq!(peak_photon_number(4.0, 1.0, 1, Side::Right), 16.0);
        assert_eq!(peak_photon_number(4.0, 1.0, 1, Side::Left), 4.0);
        assert!((peak_photon_number(1.3, 1.3, 3, Side::Left) - 1.3f64.powi(7)).abs() < 1e-12);
    }

    #[test]
    fn photon_number_relation_in_weak_regime() {
        let (d, s) = setup(3e-3, 2e-3, 0.01);
        let n_a = photon_number(Complex64::new(d.rabi_a, 0.0), &s);
        let n_b = photon_number(Complex64::new(d.rabi_b, 0.0), &s);
        for p in 0..=4 {
            for side in Side::BOTH {
                let amp = side_peak_amplitude(&d, &s, p, side, Regime::Weak);
                let lhs = photon_number(amp, &s);
                let rhs = peak_photon_number(n_a, n_b, p, side);
                assert!((lhs / rhs - 1.0).abs() < 1e-12);
            }
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(16))]

        #[test]
        fn series_converges_geometrically(a in 0.0f64..3.0, b in 0.0f64..3.0, t in 0.0f64..700.0, p_max in 0u32..30) {
            let (d, s) = setup(a, b, 0.01);
            let m = mixing_angle(&d, &s);
            proptest::prop_assume!(m.y.abs() < 0.9);
            let closed = sigma_minus(&d, &s, t, CoherenceForm::Closed).unwrap();
            let series = sigma_minus(&d, &s, t, CoherenceForm::Series { p_max }).unwrap();
            let scale = s.gamma * m.tan_quotient() * (a + b);
            let bound = scale * 2.0 * m.y.abs().powi(p_max as i32 + 1) / (1.0 - m.y.abs());
            proptest::prop_assert!((closed - series).norm() <= bound + 1e-14);
        }

        #[test]
        fn mirror_symmetry(a in 0.0f64..3.0, b in 0.0f64..3.0, p in 0u32..6) {
            let (d, s) = setup(a, b, 0.01);
            for side in Side::BOTH {
                let x = side_peak_amplitude(&d, &s, p, side, Regime::Full).norm();
                let y = side_peak_amplitude(&d.mirrored(), &s, p, side.mirror(), Regime::Full).norm();
                proptest::prop_assert!((x - y).abs() <= 1e-12 * x.max(1e-300));
            }
        }

        #[test]
        fn weak_limit_consistency(omega in 1e-5f64..1e-2, p in 0u32..=3) {
            let (d, s) = setup(omega, omega, 0.01);
            for side in Side::BOTH {
                let full = side_peak_amplitude(&d, &s, p, side, Regime::Full).re;
                let weak = side_peak_amplitude(&d, &s, p, side, Regime::Weak).re;
                // Leading correction is −(4p+6)(Ω/Γ)².
                let bound = (4.0 * p as f64 + 6.0) * omega * omega * (1.0 + 1e-3);
                proptest::prop_assert!((full / weak - 1.0).abs() <= bound);
            }
        }

        #[test]
        fn dimensionless_outputs_survive_rescaling(a in 0.0f64..3.0, b in 0.0f64..3.0, scale in 0.1f64..10.0) {
            let (d, s) = setup(a, b, 0.01);
            let d2 = DriveConfig::new(a * scale, b * scale, 0.01 * scale, &s).unwrap();
            let s2 = SystemParams::new(10.0 * scale, scale, 1.0).unwrap();
            let (m1, m2) = (mixing_angle(&d, &s), mixing_angle(&d2, &s2));
            proptest::prop_assert!((m1.theta - m2.theta).abs() <= 1e-12);
            proptest::prop_assert!((m1.y - m2.y).abs() <= 1e-12);
        }
    }
}
