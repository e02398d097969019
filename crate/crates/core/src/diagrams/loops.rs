//! The closed semion loop with 2(p+1) external photon lines, its residue
//! sum, and the γ coefficients extracted from it.
//!
//! Frequencies are measured from ε/ħ in units of Γ and the detuning is the
//! variable x = δω/Γ. Walking around the loop, a b-line with frequency
//! u + s·x absorbs an A photon (+x) and becomes an a-line, which emits an
//! S photon ((2p+1)x) or a B photon (−x). The a-lines carry the radiative
//! dressing ε/ħ → ε/ħ − iΓ/2. At zero temperature the frequency integral
//! picks up the residues at the b-poles u = −s·x.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::exact::{qi, qi_i, qi_int, qi_inv, qi_pow, qi_to_f64, Laurent, Qi};
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Largest p accepted by the loop enumeration.
pub const MAX_LOOP_ORDER: u32 = 6;

/// Published γ^(2p+1) for p = 0..=3.
pub const PUBLISHED_GAMMA: [i64; 4] = [1, 2, -6, -20];

/// Emitted line attached to an a-line of the loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Emission {
    /// Signal photon at ε/ħ + (2p+1)δω.
    S,
    /// Mode-B photon at ε/ħ − δω.
    B,
}

/// Full external label of a loop vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopLabel {
    AIn,
    BOut,
    SOut,
}

/// One cyclic arrangement of the emitted lines. Absorptions are identical
/// and alternate with emissions, so the arrangement is fixed by the order
/// of emissions starting after the first absorption.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LoopOrdering {
    pub p: u32,
    emissions: Vec<Emission>,
}

impl LoopOrdering {
    pub fn new(emissions: Vec<Emission>) -> Result<Self> {
        let s = emissions.iter().filter(|e| **e == Emission::S).count();
        if s != 1 || emissions.is_empty() {
            return Err(Error::Domain(format!("a loop needs exactly one S line, got {s}")));
        }
        Ok(LoopOrdering { p: emissions.len() as u32 - 1, emissions })
    }

    pub fn emissions(&self) -> &[Emission] {
        &self.emissions
    }

    /// The 2(p+1) labels around the loop, starting with an absorption.
    pub fn labels(&self) -> Vec<LoopLabel> {
        self.emissions
            .iter()
            .flat_map(|e| [LoopLabel::AIn, if *e == Emission::S { LoopLabel::SOut } else { LoopLabel::BOut }])
            .collect()
    }

    /// Lexicographically smallest rotation.
    pub fn canonical(&self) -> LoopOrdering {
        let n = self.emissions.len();
        let best = (0..n)
            .map(|r| self.emissions[r..].iter().chain(&self.emissions[..r]).copied().collect::<Vec<_>>())
            .min()
            .expect("non-empty loop");
        LoopOrdering { p: self.p, emissions: best }
    }

    /// Frequency offsets s_j of the b-lines (in units of x), starting at 0.
    fn b_offsets(&self) -> Vec<i64> {
        let p = self.p as i64;
        let mut s = 0;
        let mut out = Vec::with_capacity(self.emissions.len());
        for e in &self.emissions {
            out.push(s);
            let q = match e {
                Emission::S => 2 * p + 1,
                Emission::B => -1,
            };
            s += 1 - q;
        }
        debug_assert_eq!(s, 0, "frequency is not conserved around the loop");
        out
    }
}

/// Distinct arrangements of {S, B×p} on the loop, up to rotation, sorted.
pub fn enumerate_orderings(p: u32) -> Result<Vec<LoopOrdering>> {
    check_order(p)?;
    let n = p as usize + 1;
    let classes: BTreeSet<LoopOrdering> = (0..n)
        .map(|slot| {
            let mut e = vec![Emission::B; n];
            e[slot] = Emission::S;
            LoopOrdering { p, emissions: e }.canonical()
        })
        .collect();
    Ok(classes.into_iter().collect())
}

fn check_order(p: u32) -> Result<()> {
    if p > MAX_LOOP_ORDER {
        return Err(Error::Domain(format!("loop order p = {p} exceeds {MAX_LOOP_ORDER}")));
    }
    Ok(())
}

/// Detuning δω/Γ used in the loop.
#[derive(Clone, Debug, PartialEq)]
pub enum LoopDetuning {
    /// Formal infinitesimal; the result is the exact δω → 0 limit.
    Formal,
    /// Fixed exact rational value.
    Exact(BigRational),
}

/// Coefficient arithmetic shared by the formal and the fixed-detuning sums.
trait Coeff: Clone {
    fn constant(c: Qi) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn inv(&self) -> Result<Self>;
}

#[derive(Clone)]
struct Series {
    value: Laurent,
    order: i64,
}

impl Coeff for Series {
    fn constant(c: Qi) -> Self {
        Series { value: Laurent::constant(c), order: 0 }
    }
    fn add(&self, other: &Self) -> Self {
        Series { value: self.value.add(&other.value), order: self.order.max(other.order) }
    }
    fn mul(&self, other: &Self) -> Self {
        Series { value: self.value.mul(&other.value), order: self.order.max(other.order) }
    }
    fn inv(&self) -> Result<Self> {
        let value = self.value.inv(self.order).ok_or_else(|| Error::Pole("inverse of a vanishing series".into()))?;
        Ok(Series { value, order: self.order })
    }
}

impl Coeff for Qi {
    fn constant(c: Qi) -> Self {
        c
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Pole("coinciding poles".into()));
        }
        Ok(qi_inv(self))
    }
}

/// Truncated power series in t with coefficients of type C.
fn t_mul<C: Coeff>(a: &[C], b: &[C], len: usize) -> Vec<C> {
    let zero = C::constant(Qi::zero());
    (0..len)
        .map(|n| (0..=n).fold(zero.clone(), |acc, k| acc.add(&a[k].mul(&b[n - k]))))
        .collect()
}

/// 1/(c + t) to `len` terms: Σ (−1)^n t^n / c^{n+1}.
fn t_reciprocal<C: Coeff>(c: &C, len: usize) -> Result<Vec<C>> {
    let c_inv = c.inv()?;
    let minus = C::constant(qi_int(-1));
    let mut out = Vec::with_capacity(len);
    let mut term = c_inv.clone();
    for _ in 0..len {
        out.push(term.clone());
        term = term.mul(&c_inv).mul(&minus);
    }
    Ok(out)
}

/// Σ of residues at the b-poles of
/// Π_j 1/(u + s_j x) · Π_j 1/(u + (s_j+1) x + i/2),
/// with `offset(d)` returning d·x in the coefficient ring.
fn b_pole_residues<C: Coeff>(offsets: &[i64], offset: impl Fn(i64) -> C, merge_all: bool) -> Result<C> {
    let half_i = qi(BigRational::zero(), BigRational::new(BigInt::one(), BigInt::from(2)));
    let mut poles: BTreeMap<i64, usize> = BTreeMap::new();
    for &s in offsets {
        *poles.entry(if merge_all { 0 } else { s }).or_default() += 1;
    }
    let mut total = C::constant(Qi::zero());
    for (&s, &m) in &poles {
        // u = −s·x + t; residue = [t^{m−1}] of the remaining factors.
        let mut g = vec![C::constant(Qi::zero()); m];
        g[0] = C::constant(qi_int(1));
        if !merge_all {
            for &sk in offsets.iter().filter(|&&sk| sk != s) {
                g = t_mul(&g, &t_reciprocal(&offset(sk - s), m)?, m);
            }
        }
        for &sk in offsets {
            let d = if merge_all { 0 } else { sk + 1 - s };
            let c = offset(d).add(&C::constant(half_i.clone()));
            g = t_mul(&g, &t_reciprocal(&c, m)?, m);
        }
        total = total.add(&g[m - 1]);
    }
    Ok(total)
}

/// Loop amplitude D^(2p+1)/(2π) at zero temperature in units Γ = v = 1:
/// the b-pole residue sum, summed over orderings.
pub fn loop_amplitude(p: u32, detuning: &LoopDetuning) -> Result<Qi> {
    let orderings = enumerate_orderings(p)?;
    let mut total = Qi::zero();
    for ordering in &orderings {
        total += ordering_amplitude(ordering, detuning)?;
    }
    Ok(total)
}

/// Contribution of a single ordering to D^(2p+1)/(2π).
pub fn ordering_amplitude(ordering: &LoopOrdering, detuning: &LoopDetuning) -> Result<Qi> {
    let offsets = ordering.b_offsets();
    match detuning {
        LoopDetuning::Exact(x) => {
            let x = qi(x.clone(), BigRational::zero());
            let merge = x.is_zero();
            b_pole_residues(&offsets, |d| &x * qi_int(d), merge)
        }
        LoopDetuning::Formal => formal_limit(&offsets),
    }
}

fn formal_limit(offsets: &[i64]) -> Result<Qi> {
    let mut order = 2 * offsets.len() as i64 + 2;
    for _ in 0..6 {
        let sum = b_pole_residues(
            offsets,
            |d| Series { value: Laurent::monomial(qi_int(d), 1), order },
            false,
        )?;
        let series = sum.value;
        let principal = series.principal_part();
        if let Some((k, c)) = principal.first() {
            return Err(Error::Degeneracy(format!(
                "coalescing b-poles leave a (δω/Γ)^{k} term with coefficient {}",
                qi_to_f64(c)
            )));
        }
        if series.precision() > 0 {
            return Ok(series.coeff(0));
        }
        order *= 2;
    }
    Err(Error::Degeneracy("δω → 0 limit not resolved at the available series order".into()))
}

/// γ^(2p+1) as an exact rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaValue {
    pub p: u32,
    pub value: BigRational,
}

impl GammaValue {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }

    /// The value if it is an integer.
    pub fn as_integer(&self) -> Option<i64> {
        self.value.is_integer().then(|| self.value.to_integer().to_i64()).flatten()
    }
}

/// The raw ratio D^(2p+1)/(−i·2^{2p+1}·2π) in units Γ = v = 1.
fn raw_gamma(p: u32) -> Result<Qi> {
    let d = loop_amplitude(p, &LoopDetuning::Formal)?;
    // D/(2π) = −i·2^{2p+1}·γ_raw
    let norm = -qi_i() * qi_int(1i64 << (2 * p + 1));
    Ok(d * qi_inv(&norm))
}

/// Normalization c and orientation phase φ of the loop measure, fixed so
/// that γ^(1) = 1 and γ^(3) = 2; then γ^(2p+1) = raw_p / (c·φ^p).
#[derive(Clone, Debug, PartialEq)]
pub struct LoopCalibration {
    pub normalization: Qi,
    pub orientation: Qi,
}

pub fn loop_calibration() -> Result<LoopCalibration> {
    let normalization = raw_gamma(0)?;
    let orientation = raw_gamma(1)? * qi_inv(&(&normalization * qi_int(PUBLISHED_GAMMA[1])));
    Ok(LoopCalibration { normalization, orientation })
}

/// γ^(2p+1) from the loop sum under the calibration convention.
pub fn extract_gamma(p: u32) -> Result<GammaValue> {
    check_order(p)?;
    let cal = loop_calibration()?;
    let raw = raw_gamma(p)?;
    let value = raw * qi_inv(&(&cal.normalization * qi_pow(&cal.orientation, p)));
    if !value.im.is_zero() {
        return Err(Error::Convention(format!("γ^({}) = {} is not real", 2 * p + 1, qi_to_f64(&value))));
    }
    Ok(GammaValue { p, value: value.re })
}

/// Where γ^(2p+1) comes from for downstream amplitudes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GammaSource {
    /// The published table (p ≤ 3).
    #[default]
    Published,
    /// The calibrated loop computation.
    Computed,
}

pub fn gamma(p: u32, source: GammaSource) -> Result<f64> {
    match source {
        GammaSource::Published => PUBLISHED_GAMMA
            .get(p as usize)
            .map(|g| *g as f64)
            .ok_or_else(|| Error::Domain(format!("no published γ for p = {p}"))),
        GammaSource::Computed => extract_gamma(p).map(|g| g.to_f64()),
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Resonant connected (p+1)-photon amplitude iT̃^(2(p+1)) of the e-mode.
pub fn connected_t(p: u32, params: &SystemParams, source: GammaSource) -> Result<f64> {
    let g = gamma(p, source)?;
    let f = factorial(p + 1);
    let ratio = params.v / params.gamma;
    Ok(-(f * f / f64::from(p + 1)) * 2f64.powi(2 * p as i32 + 1) * g * ratio.powi(p as i32) / (2.0 * PI).powi(p as i32))
}

/// Central binomial coefficient C(2p, p).
pub fn central_binomial(p: u32) -> BigInt {
    let mut c = BigInt::one();
    for k in 0..p {
        c = c * BigInt::from(2 * p - k) / BigInt::from(k + 1);
    }
    c
}

