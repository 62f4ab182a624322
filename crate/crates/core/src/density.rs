//! Probability densities on `[0, 1]` used to draw the sup-norm radius of a
//! Gerow-Robson sample.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::SeededGenerator;

/// Allowed deviation of `∫₀¹ g` from one.
pub const NORMALIZATION_TOL: f64 = 1e-9;

const NONNEG_GRID: usize = 1024;

/// A density `g` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Density {
    /// `g(s) = coefficient * s^exponent`.
    Power { coefficient: f64, exponent: f64 },
    /// `g(s) = sum_i coeffs[i] * s^i`.
    Polynomial { coeffs: Vec<f64> },
}

impl Density {
    /// The normalized power density `(p + 1) s^p`.
    pub fn power(exponent: f64) -> Result<Self> {
        Self::power_with_coefficient(exponent + 1.0, exponent)
    }

    pub fn power_with_coefficient(coefficient: f64, exponent: f64) -> Result<Self> {
        let d = Density::Power {
            coefficient,
            exponent,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        let d = Density::Polynomial { coeffs };
        d.validate()?;
        Ok(d)
    }

    /// `g_n(s) = n s^(n-1)`, the density behind the Robson (`n = 3`) and
    /// Gerow (`n = 4`) constructions.
    pub fn natural(n: usize) -> Self {
        Density::Power {
            coefficient: n as f64,
            exponent: n as f64 - 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Density::Power {
                coefficient,
                exponent,
            } => {
                if !coefficient.is_finite() || !exponent.is_finite() || *exponent <= -1.0 {
                    return Err(Error::InvalidDensity(format!(
                        "power density needs a finite exponent > -1, got {exponent}"
                    )));
                }
                let mass = coefficient / (exponent + 1.0);
                if (mass - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(Error::InvalidDensity(format!(
                        "power density integrates to {mass}, not 1"
                    )));
                }
            }
            Density::Polynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidDensity(
                        "polynomial density needs finite coefficients".into(),
                    ));
                }
                let mass = self.cdf(1.0);
                if (mass - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(Error::InvalidDensity(format!(
                        "polynomial density integrates to {mass}, not 1"
                    )));
                }
                let negative = (0..=NONNEG_GRID)
                    .map(|i| i as f64 / NONNEG_GRID as f64)
                    .find(|&s| self.eval(s) < -1e-12);
                if let Some(s) = negative {
                    return Err(Error::InvalidDensity(format!(
                        "polynomial density is negative at s = {s}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Density::Power {
                coefficient,
                exponent,
            } => coefficient * s.powf(*exponent),
            Density::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c),
        }
    }

    /// `G(s) = ∫₀ˢ g`.
    pub fn cdf(&self, s: f64) -> f64 {
        match self {
            Density::Power {
                coefficient,
                exponent,
            } => coefficient / (exponent + 1.0) * s.powf(exponent + 1.0),
            Density::Polynomial { coeffs } => {
                coeffs
                    .iter()
                    .enumerate()
                    .rev()
                    .fold(0.0, |acc, (i, c)| acc * s + c / (i as f64 + 1.0))
                    * s
            }
        }
    }

    /// The smallest power of `s` carrying weight, which fixes the behaviour at 0.
    pub fn leading_power_at_zero(&self) -> Option<(f64, f64)> {
        match self {
            Density::Power {
                coefficient,
                exponent,
            } => Some((*exponent, *coefficient)),
            Density::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .find(|(_, c)| **c != 0.0)
                .map(|(i, c)| (i as f64, *c)),
        }
    }

    /// One draw from `g`: inverse CDF for powers, rejection for polynomials.
    pub fn sample(&self, gen: &mut SeededGenerator) -> f64 {
        match self {
            Density::Power { exponent, .. } => gen.unit().powf(1.0 / (exponent + 1.0)),
            Density::Polynomial { coeffs } => {
                let bound: f64 = coeffs.iter().map(|c| c.abs()).sum();
                loop {
                    let s = gen.unit();
                    if gen.unit() * bound < self.eval(s) {
                        return s;
                    }
                }
            }
        }
    }
}
