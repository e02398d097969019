//! Diagrammatic endpoints: the bare and dressed TLS propagators, the
//! closed semion loop D^(2p+1) with its γ coefficients, the resonant
//! connected T matrix, and the generating-functional prefactor oracle.

pub mod exact;
mod loops;
mod source_poly;

use num_complex::Complex64;

pub use loops::{
    central_binomial, connected_t, enumerate_orderings, extract_gamma, gamma, loop_amplitude, loop_calibration,
    ordering_amplitude, Emission, GammaSource, GammaValue, LoopCalibration, LoopDetuning, LoopLabel, LoopOrdering,
    MAX_LOOP_ORDER, PUBLISHED_GAMMA,
};
pub use source_poly::{derivative_prefactor, PrefactorMode, Source, TruncatedSourcePolynomial, DEFAULT_DEGREE_CAP};

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Inverse temperature β of the reservoir.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InverseTemperature {
    Finite(f64),
    Infinite,
}

/// Bare semion propagator tanh(βε/2)/(iω − ε/ħ). `eps` may carry the
/// radiative shift −iΓ/2 and `omega` any analytic continuation.
pub fn semion_bubble(omega: Complex64, eps: Complex64, inverse_temperature: InverseTemperature) -> Result<Complex64> {
    let denom = Complex64::i() * omega - eps;
    if denom == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole(format!("iω = ε/ħ at ω = {omega}")));
    }
    let occupation = match inverse_temperature {
        InverseTemperature::Infinite => Complex64::new(1.0, 0.0),
        InverseTemperature::Finite(beta) => {
            if !(beta > 0.0) {
                return Err(Error::Validation { field: "inverse_temperature", requirement: "positive" });
            }
            (0.5 * beta * eps).tanh()
        }
    };
    Ok(occupation / denom)
}

/// Dressed TLS propagator 1/(ω − ε/ħ + iΓ/2).
pub fn dressed_green(omega: f64, params: &SystemParams) -> Complex64 {
    1.0 / Complex64::new(omega - params.omega01, 0.5 * params.gamma)
}
