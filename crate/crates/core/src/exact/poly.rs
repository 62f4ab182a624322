use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// Dense univariate polynomial over `Q`, coefficients in ascending degree.
///
/// Canonical form: no trailing zeros, so the zero polynomial is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `s + a`.
    pub fn shifted_identity(a: Rational) -> Self {
        Self::from_coeffs(vec![a, Rational::one()])
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::from_coeffs(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Floating evaluation from coefficients rounded to `f64`.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// The antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(Rational::zero());
        for (i, c) in self.coeffs.iter().enumerate() {
            out.push(c / Rational::from_integer(BigInt::from(i + 1)));
        }
        Self::from_coeffs(out)
    }

    pub fn integrate(&self, a: &Rational, b: &Rational) -> Rational {
        let anti = self.antiderivative();
        anti.eval(b) - anti.eval(a)
    }

    /// True when every odd-degree coefficient vanishes.
    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(Zero::is_zero)
    }

    /// Euclidean division; errors on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let d_deg = divisor
            .degree()
            .ok_or_else(|| Error::InvalidInput("division by the zero polynomial".into()))?;
        let lead = divisor.coeffs[d_deg].clone();
        let mut rem = self.coeffs.clone();
        let Some(r_deg) = self.degree() else {
            return Ok((Self::zero(), Self::zero()));
        };
        if r_deg < d_deg {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); r_deg - d_deg + 1];
        for shift in (0..=r_deg - d_deg).rev() {
            let top = &rem[shift + d_deg];
            if top.is_zero() {
                continue;
            }
            let q = top / &lead;
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] -= &q * dc;
            }
            quot[shift] = q;
        }
        rem.truncate(d_deg);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    /// Same polynomial scaled to leading coefficient 1.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
        }
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("b is nonzero");
            a = b;
            // Rescaling each remainder keeps coefficient growth in check.
            b = Self::from_integers_big(r.primitive_integer_coeffs());
        }
        a.monic()
    }

    fn from_integers_big(c: Vec<BigInt>) -> Self {
        Self::from_coeffs(c.into_iter().map(Rational::from_integer).collect())
    }

    /// Positive rational multiple with coprime integer coefficients.
    pub fn primitive_integer_coeffs(&self) -> Vec<BigInt> {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if content.is_zero() || content.is_one() {
            ints
        } else {
            ints.into_iter().map(|c| c / &content).collect()
        }
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("s")?,
                (1, false) => write!(f, "({mag})s")?,
                (_, true) => write!(f, "s^{i}")?,
                (_, false) => write!(f, "({mag})s^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn add(self, rhs: Self) -> RationalPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPolynomial::from_coeffs((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn sub(self, rhs: Self) -> RationalPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPolynomial::from_coeffs((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn neg(self) -> RationalPolynomial {
        RationalPolynomial::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn mul(self, rhs: Self) -> RationalPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPolynomial::from_coeffs(out)
    }
}

/// A quotient of polynomials over `Q`.
#[derive(Debug, Clone)]
pub struct RationalFunction {
    pub numerator: RationalPolynomial,
    pub denominator: RationalPolynomial,
}

impl RationalFunction {
    pub fn new(numerator: RationalPolynomial, denominator: RationalPolynomial) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::InvalidInput(
                "rational function with zero denominator".into(),
            ));
        }
        Ok(Self {
            numerator,
            denominator,
        })
    }

    /// Cancels the common factor and makes the denominator monic.
    pub fn reduced(&self) -> Self {
        let g = self.numerator.gcd(&self.denominator);
        let (num, _) = self
            .numerator
            .div_rem(&g)
            .expect("gcd of a nonzero denominator");
        let (den, _) = self
            .denominator
            .div_rem(&g)
            .expect("gcd of a nonzero denominator");
        let lead = den.leading().expect("nonzero denominator").recip();
        Self {
            numerator: num.scale(&lead),
            denominator: den.scale(&lead),
        }
    }

    /// Equality as functions: `p1 q2 = p2 q1`.
    pub fn same_function(&self, other: &Self) -> bool {
        &self.numerator * &other.denominator == &other.numerator * &self.denominator
    }

    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.denominator.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.numerator.eval(x) / d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn p(c: &[i64]) -> RationalPolynomial {
        RationalPolynomial::from_integers(c)
    }

    #[test]
    fn canonical_form_drops_trailing_zeros() {
        assert!(p(&[0, 0]).is_zero());
        assert_eq!(p(&[1, 2, 0]).degree(), Some(1));
        assert_eq!(RationalPolynomial::zero().degree(), None);
    }

    #[test]
    fn arithmetic_and_evaluation() {
        let a = p(&[1, 1]);
        let b = p(&[-1, 1]);
        assert_eq!(&a * &b, p(&[-1, 0, 1]));
        assert_eq!(&a + &b, p(&[0, 2]));
        assert_eq!(&a - &b, p(&[2]));
        assert_eq!((&a * &b).eval(&int(3)), int(8));
        assert_eq!(p(&[0, 0, 3]).derivative(), p(&[0, 6]));
        assert_eq!(p(&[3, 0, 3]).integrate(&int(0), &int(1)), int(4));
        assert_eq!(-&a, p(&[-1, -1]));
    }

    #[test]
    fn division_and_gcd() {
        let f = &(&p(&[1, 1]) * &p(&[2, 1])) * &p(&[4, 1]);
        let g = &p(&[2, 1]) * &p(&[7, 1]);
        let (q, r) = f.div_rem(&p(&[2, 1])).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, &p(&[1, 1]) * &p(&[4, 1]));
        assert_eq!(f.gcd(&g), p(&[2, 1]));
        assert!(f.div_rem(&RationalPolynomial::zero()).is_err());
        let (q, r) = p(&[1, 0, 1]).div_rem(&p(&[0, 2])).unwrap();
        assert_eq!(q, RationalPolynomial::from_coeffs(vec![int(0), rat(1, 2)]));
        assert_eq!(r, p(&[1]));
    }

    #[test]
    fn primitive_form_is_positive_multiple() {
        let f = RationalPolynomial::from_coeffs(vec![rat(192, 23), rat(130, 23), int(1)]);
        assert_eq!(
            f.primitive_integer_coeffs(),
            vec![BigInt::from(192), BigInt::from(130), BigInt::from(23)]
        );
        let g = RationalPolynomial::from_coeffs(vec![rat(-2, 3), rat(-4, 3)]);
        assert_eq!(
            g.primitive_integer_coeffs(),
            vec![BigInt::from(-1), BigInt::from(-2)]
        );
    }

    #[test]
    fn rational_function_equality_and_reduction() {
        let a = RationalFunction::new(p(&[230, 115]), p(&[192, 130, 23])).unwrap();
        let b = RationalFunction::new(
            RationalPolynomial::from_coeffs(vec![int(10), int(5)]),
            RationalPolynomial::from_coeffs(vec![rat(192, 23), rat(130, 23), int(1)]),
        )
        .unwrap();
        assert!(a.same_function(&b));
        let c = RationalFunction::new(&p(&[3]) * &p(&[1, 1]), &p(&[2, 1]) * &p(&[1, 1])).unwrap();
        let r = c.reduced();
        assert_eq!(r.numerator, p(&[3]));
        assert_eq!(r.denominator, p(&[2, 1]));
        assert_eq!(a.eval(&int(1)), Some(int(1)));
        assert!(RationalFunction::new(p(&[1]), RationalPolynomial::zero()).is_err());
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(p(&[192, 130, 23]).to_string(), "(23)s^2 + (130)s + 192");
        assert_eq!(p(&[-1, 0, 1]).to_string(), "s^2 - 1");
        assert_eq!(RationalPolynomial::zero().to_string(), "0");
    }
}
