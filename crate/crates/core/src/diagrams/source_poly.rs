//! Exact multivariate polynomials in commuting photon sources, used to
//! count the disconnected-diagram prefactors by differentiating e^A.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_DEGREE_CAP: u32 = 40;

const N_SOURCES: usize = 7;

/// Source variables. `Marker` tags the loop vertex D; it is nilpotent
/// (D² is discarded) and does not count toward the degree cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Source {
    EtaA,
    EtaBarA,
    EtaB,
    EtaBarB,
    EtaBarS,
    /// Outgoing photons of the non-symmetrized channel, distinct from every
    /// spectator B momentum.
    EtaBarX,
    Marker,
}

impl Source {
    pub const ALL: [Source; N_SOURCES] =
        [Source::EtaA, Source::EtaBarA, Source::EtaB, Source::EtaBarB, Source::EtaBarS, Source::EtaBarX, Source::Marker];

    fn index(self) -> usize {
        self as usize
    }
}

type Exponents = [u32; N_SOURCES];

fn degree(e: &Exponents) -> u32 {
    e[..Source::Marker.index()].iter().sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSourcePolynomial {
    terms: BTreeMap<Exponents, BigRational>,
    degree_cap: u32,
}

impl TruncatedSourcePolynomial {
    pub fn zero(degree_cap: u32) -> Self {
        TruncatedSourcePolynomial { terms: BTreeMap::new(), degree_cap }
    }

    pub fn one(degree_cap: u32) -> Self {
        let mut p = Self::zero(degree_cap);
        p.add_term([0; N_SOURCES], BigRational::one());
        p
    }

    /// c · Π source^power.
    pub fn monomial(coeff: BigRational, powers: &[(Source, u32)], degree_cap: u32) -> Self {
        let mut e = [0; N_SOURCES];
        for &(s, k) in powers {
            e[s.index()] += k;
        }
        let mut p = Self::zero(degree_cap);
        p.add_term(e, coeff);
        p
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest total degree present.
    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(degree).max().unwrap_or(0)
    }

    fn add_term(&mut self, e: Exponents, c: BigRational) {
        if c.is_zero() || degree(&e) > self.degree_cap || e[Source::Marker.index()] > 1 {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.degree_cap = self.degree_cap.min(other.degree_cap);
        out.terms.retain(|e, _| degree(e) <= out.degree_cap);
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.degree_cap.min(other.degree_cap));
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut e = *ea;
                for (x, y) in e.iter_mut().zip(eb) {
                    *x += y;
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.degree_cap);
        for (e, a) in &self.terms {
            out.add_term(*e, a * c);
        }
        out
    }

    /// e^self as Σ self^k/k!, truncated at the cap. Requires a vanishing
    /// constant term.
    pub fn exp(&self) -> Result<Self> {
        if self.terms.contains_key(&[0; N_SOURCES]) {
            return Err(Error::Domain("exp of a polynomial with a constant term".into()));
        }
        let mut sum = Self::one(self.degree_cap);
        let mut term = Self::one(self.degree_cap);
        let mut k = 0u32;
        loop {
            k += 1;
            term = term.mul(self).scale(&BigRational::new(BigInt::one(), BigInt::from(k)));
            if term.is_empty() {
                return Ok(sum);
            }
            sum = sum.add(&term);
        }
    }

    /// Coefficient of Π source^power.
    pub fn coefficient(&self, powers: &[(Source, u32)]) -> BigRational {
        let mut e = [0; N_SOURCES];
        for &(s, k) in powers {
            e[s.index()] += k;
        }
        self.terms.get(&e).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Applies Π ∂^k/∂source^k and sets all sources to zero.
    pub fn derivative_at_zero(&self, powers: &[(Source, u32)]) -> BigRational {
        let factorials: BigInt = powers.iter().map(|&(_, k)| factorial(k)).product();
        self.coefficient(powers) * BigRational::from_integer(factorials)
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// Whether the p scattered B photons coincide with spectator momenta.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrefactorMode {
    Symmetrized,
    NonSymmetrized,
}

/// Combinatorial prefactor of the disconnected diagram with n_a incoming A
/// photons, n_b spectator B photons and one (p+1)-photon loop, obtained by
/// differentiating e^A with
/// A = η_Aη̄_A + η_Bη̄_B + D·η_A^{p+1}·(outgoing sources)/(p+1).
pub fn derivative_prefactor(n_a: u32, n_b: u32, p: u32, mode: PrefactorMode, degree_cap: u32) -> Result<BigRational> {
    if n_a < p + 1 {
        return Err(Error::InsufficientPhotons { needed: p + 1, got: n_a });
    }
    let target_degree = 2 * (n_a + n_b) + 1;
    if target_degree > degree_cap {
        return Err(Error::Capacity(format!("target degree {target_degree} exceeds the cap {degree_cap}")));
    }
    let one = BigRational::one();
    let outgoing: Vec<(Source, u32)> = match mode {
        PrefactorMode::Symmetrized => vec![(Source::EtaBarB, p), (Source::EtaBarS, 1)],
        PrefactorMode::NonSymmetrized => vec![(Source::EtaBarX, p + 1)],
    };
    let mut vertex_powers = vec![(Source::Marker, 1), (Source::EtaA, p + 1)];
    vertex_powers.extend(outgoing);
    let vertex = TruncatedSourcePolynomial::monomial(
        BigRational::new(BigInt::one(), BigInt::from(p + 1)),
        &vertex_powers,
        degree_cap,
    );
    let a = TruncatedSourcePolynomial::monomial(one.clone(), &[(Source::EtaA, 1), (Source::EtaBarA, 1)], degree_cap)
        .add(&TruncatedSourcePolynomial::monomial(one, &[(Source::EtaB, 1), (Source::EtaBarB, 1)], degree_cap))
        .add(&vertex);
    let z = a.exp()?;
    let target: Vec<(Source, u32)> = match mode {
        PrefactorMode::Symmetrized => vec![
            (Source::EtaBarS, 1),
            (Source::EtaBarB, n_b + p),
            (Source::EtaB, n_b),
            (Source::EtaBarA, n_a - p - 1),
            (Source::EtaA, n_a),
            (Source::Marker, 1),
        ],
        PrefactorMode::NonSymmetrized => vec![
            (Source::EtaBarX, p + 1),
            (Source::EtaBarB, n_b),
            (Source::EtaB, n_b),
            (Source::EtaBarA, n_a - p - 1),
            (Source::EtaA, n_a),
            (Source::Marker, 1),
        ],
    };
    Ok(z.derivative_at_zero(&target))
}
