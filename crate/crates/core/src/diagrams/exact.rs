//! Exact arithmetic over Q(i) and truncated Laurent series in one formal
//! variable with precision tracking.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Gaussian rational a + ib with a, b ∈ Q.
pub type Qi = Complex<BigRational>;

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qi(re: BigRational, im: BigRational) -> Qi {
    Complex::new(re, im)
}

pub fn qi_int(n: i64) -> Qi {
    Complex::new(rational(n), BigRational::zero())
}

pub fn qi_i() -> Qi {
    Complex::new(BigRational::zero(), BigRational::one())
}

pub fn qi_inv(z: &Qi) -> Qi {
    let norm = &z.re * &z.re + &z.im * &z.im;
    assert!(!norm.is_zero(), "inverse of zero in Q(i)");
    Complex::new(&z.re / &norm, -&z.im / &norm)
}

pub fn qi_pow(z: &Qi, mut n: u32) -> Qi {
    let mut base = z.clone();
    let mut acc = qi_int(1);
    while n > 0 {
        if n & 1 == 1 {
            acc = &acc * &base;
        }
        base = &base * &base;
        n >>= 1;
    }
    acc
}

pub fn qi_to_f64(z: &Qi) -> Complex64 {
    Complex64::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
}

/// Precision marker for series that are known exactly.
pub const EXACT: i64 = i64::MAX / 4;

/// Σ_k c_k x^k for k ≥ `start`, with every coefficient of index < `prec`
/// known and higher ones discarded.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent {
    start: i64,
    coeffs: Vec<Qi>,
    prec: i64,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent { start: 0, coeffs: Vec::new(), prec: EXACT }
    }

    /// c·x^k, exact.
    pub fn monomial(c: Qi, k: i64) -> Self {
        Laurent { start: k, coeffs: vec![c], prec: EXACT }.normalized()
    }

    pub fn constant(c: Qi) -> Self {
        Self::monomial(c, 0)
    }

    /// Terms below `prec` from the given coefficients starting at x^start.
    pub fn from_coeffs(start: i64, coeffs: Vec<Qi>, prec: i64) -> Self {
        Laurent { start, coeffs, prec }.normalized()
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// Lowest power with a nonzero coefficient, or `None` if every known
    /// coefficient vanishes.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.start)
    }

    /// Coefficient of x^k (must satisfy k < precision).
    pub fn coeff(&self, k: i64) -> Qi {
        assert!(k < self.prec, "coefficient x^{k} beyond precision {}", self.prec);
        let idx = k - self.start;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Qi::zero()
        } else {
            self.coeffs[idx as usize].clone()
        }
    }

    /// Known terms with negative powers.
    pub fn principal_part(&self) -> Vec<(i64, Qi)> {
        (self.start..self.prec.min(0)).map(|k| (k, self.coeff(k))).filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Drops terms of index ≥ `prec`.
    pub fn truncate(mut self, prec: i64) -> Self {
        self.prec = self.prec.min(prec);
        self.normalized()
    }

    fn normalized(mut self) -> Self {
        let keep = (self.prec - self.start).clamp(0, self.coeffs.len() as i64) as usize;
        self.coeffs.truncate(keep);
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(self.coeffs.len());
        self.coeffs.drain(..lead);
        self.start += lead as i64;
        if self.coeffs.is_empty() {
            self.start = 0;
        }
        self
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        let prec = self.prec.min(other.prec);
        if self.coeffs.is_empty() {
            return other.clone().truncate(prec);
        }
        if other.coeffs.is_empty() {
            return self.clone().truncate(prec);
        }
        let start = self.start.min(other.start);
        let end = (self.start + self.coeffs.len() as i64).max(other.start + other.coeffs.len() as i64).min(prec);
        let coeffs = (start..end.max(start)).map(|k| self.get(k) + other.get(k)).collect();
        Laurent { start, coeffs, prec }.normalized()
    }

    pub fn neg(&self) -> Laurent {
        Laurent { start: self.start, coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(), prec: self.prec }
    }

    pub fn scale(&self, c: &Qi) -> Laurent {
        if c.is_zero() {
            return Laurent::zero();
        }
        Laurent { start: self.start, coeffs: self.coeffs.iter().map(|a| a * c).collect(), prec: self.prec }
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let (Some(va), Some(vb)) = (self.valuation(), other.valuation()) else {
            // An unknown tail times zero known terms still has bounded precision.
            let prec = match (self.valuation(), other.valuation()) {
                (None, None) => self.prec.saturating_add(other.prec).min(EXACT),
                (None, Some(vb)) => self.prec.saturating_add(vb).min(EXACT),
                (Some(va), None) => other.prec.saturating_add(va).min(EXACT),
                _ => unreachable!(),
            };
            return Laurent { start: 0, coeffs: Vec::new(), prec };
        };
        let prec = self.prec.saturating_add(vb).min(other.prec.saturating_add(va)).min(EXACT);
        let start = va + vb;
        let len = ((prec - start).max(0) as usize).min(self.coeffs.len() + other.coeffs.len() - 1);
        let mut coeffs = vec![Qi::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        Laurent { start, coeffs, prec }.normalized()
    }

    /// Multiplicative inverse; an exact series with more than one term is
    /// expanded to `order` terms beyond its leading power.
    pub fn inv(&self, order: i64) -> Option<Laurent> {
        let v = self.valuation()?;
        let a0_inv = qi_inv(&self.coeffs[0]);
        if self.coeffs.len() == 1 && self.prec >= EXACT {
            return Some(Laurent::monomial(a0_inv, -v));
        }
        // self = a0 x^v (1 + h) with h of positive valuation.
        let r = (self.prec - v).min(order.max(1));
        let minus_h = Laurent {
            start: 1,
            coeffs: self.coeffs.iter().skip(1).map(|c| -(c * &a0_inv)).collect(),
            prec: r,
        }
        .normalized();
        let mut sum = Laurent::constant(qi_int(1)).truncate(r);
        let mut power = sum.clone();
        loop {
            power = power.mul(&minus_h).truncate(r);
            if power.valuation().is_none() {
                break;
            }
            sum = sum.add(&power);
        }
        let mut out = sum.scale(&a0_inv);
        out.start -= v;
        out.prec = r - v;
        Some(out.normalized())
    }

    fn get(&self, k: i64) -> Qi {
        let idx = k - self.start;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Qi::zero()
        } else {
            self.coeffs[idx as usize].clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(re: i64, im: i64) -> Qi {
        qi(rational(re), rational(im))
    }

    #[test]
    fn gaussian_inverse() {
        let z = q(3, 4);
        assert_eq!(&z * qi_inv(&z), qi_int(1));
        assert_eq!(qi_pow(&qi_i(), 4), qi_int(1));
        assert_eq!(qi_pow(&q(1, 1), 2), q(0, 2));
    }

    #[test]
    fn geometric_inverse() {
        // 1/(1 − x) = 1 + x + x² + … to the requested order.
        let s = Laurent::from_coeffs(0, vec![q(1, 0), q(-1, 0)], EXACT);
        let inv = s.inv(6).unwrap();
        assert_eq!(inv.precision(), 6);
        for k in 0..6 {
            assert_eq!(inv.coeff(k), q(1, 0));
        }
        let back = inv.mul(&s);
        assert_eq!(back.coeff(0), q(1, 0));
        for k in 1..6 {
            assert!(back.coeff(k).is_zero());
        }
    }

    #[test]
    fn monomial_inverse_is_exact() {
        let m = Laurent::monomial(q(0, 2), 3);
        let inv = m.inv(4).unwrap();
        assert_eq!(inv.precision(), EXACT);
        assert_eq!(inv.coeff(-3), qi_inv(&q(0, 2)));
    }

    #[test]
    fn precision_drops_under_negative_valuation() {
        let tail = Laurent::from_coeffs(0, vec![q(1, 0), q(2, 0)], 4);
        let pole = Laurent::monomial(q(1, 0), -2);
        let prod = tail.mul(&pole);
        assert_eq!(prod.precision(), 2);
        assert_eq!(prod.principal_part(), vec![(-2, q(1, 0)), (-1, q(2, 0))]);
    }

    #[test]
    fn cancellation_empties_the_series() {
        let a = Laurent::from_coeffs(-1, vec![q(1, 1), q(2, 0)], 3);
        let sum = a.add(&a.neg());
        assert_eq!(sum.valuation(), None);
        assert_eq!(sum.precision(), 3);
    }
}
