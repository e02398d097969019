//! One- and two-photon scattering on the TLS.
//!
//! Only the even (e) combination of right and left movers couples to the
//! TLS; transmission and reflection in the (R, L) basis follow from the
//! e-mode phase factor t̃ by the basis rotation.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::params::SystemParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rotation {
    /// (R, L) → (e, o)
    ToEvenOdd,
    /// (e, o) → (R, L)
    ToRightLeft,
}

/// e = (R + L)/√2, o = (R − L)/√2.
pub fn chirality_rotate(first: Complex64, second: Complex64, direction: Rotation) -> (Complex64, Complex64) {
    match direction {
        Rotation::ToEvenOdd => ((first + second) * FRAC_1_SQRT_2, (first - second) * FRAC_1_SQRT_2),
        // R = (e + o)/√2, L = (e − o)/√2: the matrix is an involution.
        Rotation::ToRightLeft => ((first + second) * FRAC_1_SQRT_2, (first - second) * FRAC_1_SQRT_2),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatterCoeffs {
    /// Transmission in the (R, L) basis.
    pub t: Complex64,
    /// Reflection in the (R, L) basis.
    pub r: Complex64,
    /// Elastic phase factor of the e-mode.
    pub t_tilde: Complex64,
}

pub fn single_photon_coeffs(k: f64, params: &SystemParams) -> ScatterCoeffs {
    let k_eps = params.k_eps();
    let t_tilde = (k - k_eps.conj()) / (k - k_eps);
    let detuning = params.v * k - params.omega01;
    let denom = Complex64::new(detuning, 0.5 * params.gamma);
    ScatterCoeffs { t: detuning / denom, r: Complex64::new(0.0, -0.5 * params.gamma) / denom, t_tilde }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// Even mode (chiral, couples to the TLS).
    Even,
    /// Right-moving photons in the original basis.
    RightLeft,
}

/// Connected part of an n-photon S matrix: an on-shell coefficient times
/// δ(Σk_in − Σk_out), the delta being kept symbolic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectedAmplitude {
    pub coefficient: Complex64,
    /// Σk_in; the amplitude is supported on Σk_out = conserved_total.
    pub conserved_total: f64,
    pub order: u32,
}

impl ConnectedAmplitude {
    /// Whether the given outgoing momenta lie on the conservation surface.
    pub fn conserves(&self, outgoing: &[f64], tol: f64) -> bool {
        (outgoing.iter().sum::<f64>() - self.conserved_total).abs() <= tol
    }
}

/// iT̃(p1, p2; k1, k2) with incoming k1, k2 and outgoing p1, p2.
pub fn two_photon_connected(k1: f64, k2: f64, p1: f64, p2: f64, params: &SystemParams, basis: Basis) -> ConnectedAmplitude {
    let k_eps = params.k_eps();
    let g = params.gamma;
    let v = params.v;
    let numerator = Complex64::new(k1 + k2, 0.0) - 2.0 * k_eps;
    let denom = (k_eps - k1) * (k_eps - k2) * (k_eps - p1) * (k_eps - p2);
    let mut coefficient = Complex64::new(0.0, g * g / (PI * v * v)) * numerator / denom;
    if basis == Basis::RightLeft {
        coefficient /= 4.0;
    }
    ConnectedAmplitude { coefficient, conserved_total: k1 + k2, order: 2 }
}
