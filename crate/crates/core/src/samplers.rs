//! Generators of random balanced samples.
//!
//! Every construction here produces `n` coordinates, each uniform on `[-1, 1]`,
//! whose sum vanishes by algebra (telescoping), never by projection:
//!
//! * the degenerate mirror constructions (`X_{m+k} = -X_k`, plus a split last
//!   pair for odd `n`);
//! * their redistributed versions, which replace each pair `(X_k, -X_{k+1})`
//!   by a fresh uniform pair on the chord with the same sum, giving a density
//!   of full dimension `n - 1`;
//! * symmetrized versions, which permute the redistributed output uniformly so
//!   that the support becomes all of `M(n)`;
//! * the Gerow-Robson model, whose density depends only on `max |x_k|`.
//!
//! The inverse maps [`invert_even`] and [`invert_odd`] recover the uniform
//! inputs that produce a given target.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::density::Density;
use crate::error::{invalid, Error, Result};
use crate::geometry::{BalancedVector, BOUND_SLACK};
use crate::rng::{SeededGenerator, Sign};

/// Slack used when deciding whether an inverse image lies in `[-1, 1]`.
pub const INVERSE_TOL: f64 = 1e-12;

/// Replaces `(x1, x2)` by the point at parameter `t` on the chord through
/// `(S/2, S/2)` perpendicular to the diagonal, where `S = x1 + x2`.
pub fn redistribute_pair(x1: f64, x2: f64, t: f64) -> Result<(f64, f64)> {
    for (name, v) in [("x1", x1), ("x2", x2), ("t", t)] {
        if !(-1.0..=1.0).contains(&v) {
            return invalid(format!("{name} = {v} lies outside [-1, 1]"));
        }
    }
    Ok(redistribute(x1 + x2, t))
}

#[inline]
fn redistribute(s: f64, t: f64) -> (f64, f64) {
    let half = 0.5 * s;
    let reach = (1.0 - 0.5 * s.abs()) * t;
    (half + reach, half - reach)
}

fn draw_uniforms(m: usize, gen: &mut SeededGenerator) -> Vec<f64> {
    (0..m).map(|_| gen.uniform()).collect()
}

/// `(X_1, ..., X_m, -X_1, ..., -X_m)` with independent uniform `X_k`.
pub fn sample_even_degenerate(m: usize, gen: &mut SeededGenerator) -> Result<BalancedVector> {
    if m < 1 {
        return Err(Error::InvalidDimension {
            got: m,
            reason: "need at least one free coordinate",
        });
    }
    let x = draw_uniforms(m, gen);
    Ok(even_degenerate_map(&x))
}

/// Deterministic core of [`sample_even_degenerate`].
pub fn even_degenerate_map(x: &[f64]) -> BalancedVector {
    let mut y = x.to_vec();
    y.extend(x.iter().map(|v| -v));
    BalancedVector::from_construction(y)
}

/// Redistributed even construction for `n = 2m`.
///
/// With `S_k = x_k - x_{k+1}` (cyclically), coordinates `2k-1, 2k` are the
/// redistribution of `S_k` at parameter `t_k`.
pub fn redistributed_even_map(x: &[f64], t: &[f64]) -> Result<BalancedVector> {
    let m = x.len();
    if m < 2 {
        return Err(Error::InvalidDimension {
            got: m,
            reason: "the redistributed construction needs m >= 2",
        });
    }
    if t.len() != m {
        return invalid(format!(
            "expected {m} redistribution parameters, got {}",
            t.len()
        ));
    }
    check_unit_box(x, "x")?;
    check_unit_box(t, "t")?;
    let mut y = Vec::with_capacity(2 * m);
    for k in 0..m {
        let (a, b) = redistribute(x[k] - x[(k + 1) % m], t[k]);
        y.push(a);
        y.push(b);
    }
    Ok(BalancedVector::from_construction(y))
}

/// Draws `X_1..X_m` then `T_1..T_m` and applies [`redistributed_even_map`].
pub fn sample_even_redistributed(m: usize, gen: &mut SeededGenerator) -> Result<BalancedVector> {
    if m < 2 {
        return Err(Error::InvalidDimension {
            got: m,
            reason: "the redistributed construction needs m >= 2",
        });
    }
    let x = draw_uniforms(m, gen);
    let t = draw_uniforms(m, gen);
    redistributed_even_map(&x, &t)
}

/// A uniformly random permutation of `y`.
pub fn symmetrize(y: &BalancedVector, gen: &mut SeededGenerator) -> BalancedVector {
    let perm = gen.permutation(y.n());
    y.permuted(&perm)
}

/// Degenerate odd construction for `n = 2m + 1`: `X_{m+k} = -X_k` for
/// `k < m`, and the last free coordinate is balanced by the split pair
/// `-(X_m + B)/2, -(X_m - B)/2`.
pub fn sample_odd_degenerate(m: usize, gen: &mut SeededGenerator) -> Result<BalancedVector> {
    if m < 1 {
        return Err(Error::InvalidDimension {
            got: m,
            reason: "need at least one free coordinate",
        });
    }
    let x = draw_uniforms(m, gen);
    let b = gen.sign();
    Ok(odd_degenerate_map(&x, b))
}

/// Deterministic core of [`sample_odd_degenerate`].
pub fn odd_degenerate_map(x: &[f64], b: Sign) -> BalancedVector {
    let m = x.len();
    let xm = x[m - 1];
    let mut y = x.to_vec();
    y.extend(x[..m - 1].iter().map(|v| -v));
    y.push(-0.5 * (xm + b.value()));
    y.push(-0.5 * (xm - b.value()));
    BalancedVector::from_construction(y)
}

/// The pair sums `S_1..S_m` of the odd redistributed construction.
fn odd_pair_sums(x: &[f64], b: Sign) -> Vec<f64> {
    let m = x.len();
    let bv = b.value();
    let mut s: Vec<f64> = (0..m.saturating_sub(2)).map(|k| x[k] - x[k + 1]).collect();
    s.push(x[m - 2] - 0.5 * (x[m - 1] + bv));
    s.push(-0.5 * (x[m - 1] - bv) - x[0]);
    s
}

/// Redistributed odd construction for `n = 2m + 1`; the last coordinate is `x_m`.
pub fn redistributed_odd_map(x: &[f64], t: &[f64], b: Sign) -> Result<BalancedVector> {
    let m = x.len();
    if m < 2 {
        return Err(Error::InvalidDimension {
            got: m,
            reason: "the redistributed construction needs m >= 2",
        });
    }
    if t.len() != m {
        return invalid(format!(
            "expected {m} redistribution parameters, got {}",
            t.len()
        ));
    }
    check_unit_box(x, "x")?;
    check_unit_box(t, "t")?;
    let mut y = Vec::with_capacity(2 * m + 1);
    for (sk, &tk) in odd_pair_sums(x, b).into_iter().zip(t) {
        let (a, c) = redistribute(sk, tk);
        y.push(a);
        y.push(c);
    }
    y.push(x[m - 1]);
    Ok(BalancedVector::from_construction(y))
}

/// Draws `X_1..X_m`, `T_1..T_m`, then `B`, and applies [`redistributed_odd_map`].
pub fn sample_odd_redistributed(m: usize, gen: &mut SeededGenerator) -> Result<BalancedVector> {
    if m < 2 {
        return Err(Error::InvalidDimension {
            got: m,
            reason: "the redistributed construction needs m >= 2",
        });
    }
    let x = draw_uniforms(m, gen);
    let t = draw_uniforms(m, gen);
    let b = gen.sign();
    redistributed_odd_map(&x, &t, b)
}

pub fn sample_odd_symmetrized(m: usize, gen: &mut SeededGenerator) -> Result<BalancedVector> {
    let y = sample_odd_redistributed(m, gen)?;
    Ok(symmetrize(&y, gen))
}

pub fn sample_even_symmetrized(m: usize, gen: &mut SeededGenerator) -> Result<BalancedVector> {
    let y = sample_even_redistributed(m, gen)?;
    Ok(symmetrize(&y, gen))
}

fn check_unit_box(v: &[f64], name: &str) -> Result<()> {
    match v.iter().find(|c| c.is_nan() || c.abs() > 1.0 + BOUND_SLACK) {
        Some(c) => invalid(format!("{name} has entry {c} outside [-1, 1]")),
        None => Ok(()),
    }
}

/// Parameter of the chord point reproducing the pair `(a, b)`.
/// A degenerate chord (`a = b = ±1`) admits any parameter; 0 is returned.
fn chord_parameter(a: f64, b: f64) -> f64 {
    let denom = 2.0 - (a + b).abs();
    if denom <= 0.0 {
        0.0
    } else {
        ((a - b) / denom).clamp(-1.0, 1.0)
    }
}

fn check_preimage(x: &[f64]) -> Result<()> {
    match x.iter().position(|c| c.abs() > 1.0 + INVERSE_TOL) {
        Some(k) => Err(Error::NotInvertible(format!(
            "required input x_{} = {} lies outside [-1, 1]",
            k + 1,
            x[k]
        ))),
        None => Ok(()),
    }
}

/// Inputs `(x, t)` with `redistributed_even_map(x, t) = y`, taking `x_1 = 0`.
///
/// With pair sums `r_k = y_{2k-1} + y_{2k}`, `x_k = -(r_1 + ... + r_{k-1})`.
/// Every `y` whose coordinates are all below `1/n` in magnitude is reachable;
/// larger targets are accepted whenever the resulting `x` stays in `[-1, 1]`.
pub fn invert_even(y: &BalancedVector) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = y.n();
    if !n.is_multiple_of(2) || n < 4 {
        return Err(Error::NotInvertible(format!(
            "the even inverse needs even n >= 4, got {n}"
        )));
    }
    let c = y.coords();
    let m = n / 2;
    let mut x = Vec::with_capacity(m);
    let mut acc = 0.0;
    for k in 0..m {
        x.push(-acc);
        acc += c[2 * k] + c[2 * k + 1];
    }
    check_preimage(&x)?;
    let t = (0..m)
        .map(|k| chord_parameter(c[2 * k], c[2 * k + 1]))
        .collect();
    Ok((x, t))
}

/// Inputs `(x, t)` with `redistributed_odd_map(x, t, b) = y` for the given `b`.
///
/// `x_m = -(r_1 + ... + r_m)` and `x_k = (x_m + b)/2 + r_k + ... + r_{m-1}`.
/// Coordinates below `1/(2m)` in magnitude always admit both signs.
pub fn invert_odd(y: &BalancedVector, b: Sign) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = y.n();
    if n.is_multiple_of(2) || n < 5 {
        return Err(Error::NotInvertible(format!(
            "the odd inverse needs odd n >= 5, got {n}"
        )));
    }
    let c = y.coords();
    let m = (n - 1) / 2;
    let r: Vec<f64> = (0..m).map(|k| c[2 * k] + c[2 * k + 1]).collect();
    let xm = -r.iter().sum::<f64>();
    let base = 0.5 * (xm + b.value());
    let mut x = vec![0.0; m];
    x[m - 1] = xm;
    let mut tail = 0.0;
    for k in (0..m - 1).rev() {
        tail += r[k];
        x[k] = base + tail;
    }
    check_preimage(&x)?;
    let t = (0..m)
        .map(|k| chord_parameter(c[2 * k], c[2 * k + 1]))
        .collect();
    Ok((x, t))
}

/// `n - 1` values uniform on the slice `{ z in [-1,1]^(n-1) : sum z = -1 }`.
///
/// `Z_3..Z_n` are drawn uniformly and `Z_2 = -1 - (Z_3 + ... + Z_n)`; the
/// draw is repeated until `Z_2` lands in `[-1, 1]`. The expected number of
/// rounds is `1 / (2 φ_{n+1}(1))`, which grows like `sqrt(n)`.
pub fn sample_slice(n: usize, gen: &mut SeededGenerator) -> Vec<f64> {
    let mut z = vec![0.0; n - 1];
    loop {
        let mut rest = 0.0;
        for zk in z.iter_mut().skip(1) {
            *zk = gen.uniform();
            rest += *zk;
        }
        let z2 = -1.0 - rest;
        if (-1.0..=1.0).contains(&z2) {
            z[0] = z2;
            return z;
        }
    }
}

/// One draw from the Gerow-Robson model with radius density `g`.
///
/// `Y_1 ~ g`, `Y_k = Y_1 Z_k` for a slice draw `Z`, then a random overall sign
/// and a uniform random permutation.
pub fn sample_gr_model(n: usize, g: &Density, gen: &mut SeededGenerator) -> Result<BalancedVector> {
    if n < 3 {
        return Err(Error::InvalidDimension {
            got: n,
            reason: "the Gerow-Robson model needs n >= 3",
        });
    }
    Ok(gr_draw(n, g, gen))
}

fn gr_draw(n: usize, g: &Density, gen: &mut SeededGenerator) -> BalancedVector {
    let radius = g.sample(gen);
    let z = sample_slice(n, gen);
    let sign = gen.sign().value();
    let mut y = Vec::with_capacity(n);
    y.push(sign * radius);
    y.extend(z.iter().map(|zk| sign * radius * zk));
    gen.shuffle(&mut y);
    BalancedVector::from_construction(y)
}

/// Sampling method selectable from configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Auto,
    Degenerate,
    Redistributed,
    Symmetrized,
    GrModel,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Auto,
        Method::Degenerate,
        Method::Redistributed,
        Method::Symmetrized,
        Method::GrModel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Degenerate => "degenerate",
            Method::Redistributed => "redistributed",
            Method::Symmetrized => "symmetrized",
            Method::GrModel => "gr",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Method::Auto),
            "degenerate" => Ok(Method::Degenerate),
            "redistributed" => Ok(Method::Redistributed),
            "symmetrized" => Ok(Method::Symmetrized),
            "gr" | "gr_model" | "gr-model" => Ok(Method::GrModel),
            other => invalid(format!("unknown sampling method '{other}'")),
        }
    }
}

/// Reproducible description of a sampling run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub n: usize,
    pub method: Method,
    pub seed: u64,
    /// Radius density for the Gerow-Robson model; defaults to `n s^(n-1)`.
    pub g_density: Option<Density>,
}

impl SamplerConfig {
    pub fn new(n: usize, method: Method, seed: u64) -> Self {
        Self {
            n,
            method,
            seed,
            g_density: None,
        }
    }

    pub fn with_density(mut self, g: Density) -> Self {
        self.g_density = Some(g);
        self
    }

    /// The concrete method `auto` stands for: degenerate for `n = 2`, the
    /// Gerow-Robson model with `3 s^2` for `n = 3`, symmetrized otherwise.
    pub fn resolved_method(&self) -> Method {
        match (self.method, self.n) {
            (Method::Auto, 2) => Method::Degenerate,
            (Method::Auto, 3) => Method::GrModel,
            (Method::Auto, _) => Method::Symmetrized,
            (m, _) => m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let need = |min: usize, what: &'static str| {
            if n < min {
                Err(Error::InvalidDimension {
                    got: n,
                    reason: what,
                })
            } else {
                Ok(())
            }
        };
        match self.method {
            Method::Auto | Method::Degenerate => need(2, "balanced samples need n >= 2"),
            Method::Redistributed => need(4, "the redistributed method needs n >= 4"),
            Method::Symmetrized => need(4, "the symmetrized method needs n >= 4"),
            Method::GrModel => need(3, "the Gerow-Robson model needs n >= 3"),
        }
    }

    fn density(&self) -> Density {
        match (self.method, &self.g_density) {
            (Method::Auto, _) | (_, None) => Density::natural(self.n),
            (_, Some(g)) => g.clone(),
        }
    }
}

/// A stream of balanced vectors for a validated configuration.
#[derive(Debug, Clone)]
pub struct Sampler {
    n: usize,
    method: Method,
    density: Density,
    gen: SeededGenerator,
}

impl Sampler {
    pub fn new(config: &SamplerConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            n: config.n,
            method: config.resolved_method(),
            density: config.density(),
            gen: SeededGenerator::new(config.seed),
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn sample(&mut self) -> BalancedVector {
        let n = self.n;
        let g = &mut self.gen;
        let half = n / 2;
        let drawn = match (self.method, n.is_multiple_of(2)) {
            (Method::Degenerate, true) => sample_even_degenerate(half, g),
            (Method::Degenerate, false) => sample_odd_degenerate(half, g),
            (Method::Redistributed, true) => sample_even_redistributed(half, g),
            (Method::Redistributed, false) => sample_odd_redistributed(half, g),
            (Method::Symmetrized, true) => sample_even_symmetrized(half, g),
            (Method::Symmetrized, false) => sample_odd_symmetrized(half, g),
            (Method::GrModel, _) => Ok(gr_draw(n, &self.density, g)),
            (Method::Auto, _) => unreachable!("auto is resolved at construction"),
        };
        drawn.expect("configuration validated at construction")
    }
}

impl Iterator for Sampler {
    type Item = BalancedVector;

    fn next(&mut self) -> Option<BalancedVector> {
        Some(self.sample())
    }
}

/// A set of balanced vectors together with the configuration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBatch {
    pub config: SamplerConfig,
    pub vectors: Vec<BalancedVector>,
    pub count: usize,
}

impl SampleBatch {
    /// Draws `count` vectors; equal `(config, count)` give identical batches.
    pub fn generate(config: &SamplerConfig, count: usize) -> Result<Self> {
        let vectors: Vec<BalancedVector> = Sampler::new(config)?.take(count).collect();
        Ok(Self {
            config: config.clone(),
            count: vectors.len(),
            vectors,
        })
    }
}
