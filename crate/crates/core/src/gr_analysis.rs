//! Exact analysis of Gerow-Robson densities: the convolution densities
//! `φ_n`, the polynomials `P_n'`, the transfer polynomial `B_n(s)`, and the
//! existence verdicts built on its real roots.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::density::Density;
use crate::error::{Error, Result};
use crate::exact::{
    bisect_sign_change, int, rat, serde_fraction, sign_change_brackets, signum, IntegerPolynomial,
    Rational, RationalFunction, RationalPolynomial, SturmChain,
};
use crate::quadrature;

/// Absolute tolerance handed to the quadrature in the floating-point checks.
const QUADRATURE_TOL: f64 = 1e-13;

/// Bisection budget when pinning the largest root of `B_n` inside `(-3, -2)`.
const REFINE_STEPS: usize = 256;

/// Halvings of the unit grid tried before falling back to Sturm sequences.
const GRID_LEVELS: u32 = 4;

fn require_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidDimension {
            got: n,
            reason: if min == 3 {
                "needs n >= 3"
            } else {
                "needs n >= 4"
            },
        });
    }
    Ok(())
}

fn binomial_row(m: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(m + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 1..=m {
        c = c * BigInt::from(m + 1 - k) / BigInt::from(k);
        row.push(c.clone());
    }
    row
}

fn factorial(m: usize) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

fn ipow(x: &Rational, e: usize) -> Rational {
    num_traits::pow(x.clone(), e)
}

/// `α_n = ⌊(n - 3) / 2⌋`.
pub fn alpha(n: usize) -> usize {
    n.saturating_sub(3) / 2
}

/// Density of the sum of `n - 2` independent uniforms on `[-1, 1]`.
pub fn phi(n: usize, t: &Rational) -> Result<Rational> {
    require_n(n, 3)?;
    let w = int((n - 2) as i64);
    if t.abs() >= w {
        return Ok(Rational::zero());
    }
    let p = n - 3;
    let mut sum = Rational::zero();
    for (k, b) in binomial_row(n - 2).iter().enumerate() {
        let x = t + int(n as i64 - 2 - 2 * k as i64);
        if x.is_positive() {
            let term = ipow(&x, p) * Rational::from_integer(b.clone());
            if k % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
    }
    Ok(sum / Rational::from_integer(factorial(p) * pow2(n - 2)))
}

/// `∫ₐᵇ φ_n` from termwise antiderivatives of the truncated powers.
pub fn phi_integral(n: usize, a: &Rational, b: &Rational) -> Result<Rational> {
    require_n(n, 3)?;
    if a > b {
        return Err(Error::InvalidInput(format!(
            "integration bounds out of order: {a} > {b}"
        )));
    }
    let q = n - 2;
    let anti = |t: &Rational| -> Rational {
        let mut sum = Rational::zero();
        for (k, c) in binomial_row(n - 2).iter().enumerate() {
            let x = t + int(n as i64 - 2 - 2 * k as i64);
            if x.is_positive() {
                let term = ipow(&x, q) * Rational::from_integer(c.clone());
                if k % 2 == 0 {
                    sum += term;
                } else {
                    sum -= term;
                }
            }
        }
        sum
    };
    let scale = Rational::from_integer(factorial(q) * pow2(n - 2));
    Ok((anti(b) - anti(a)) / scale)
}

fn normalizer(n: usize) -> Result<Rational> {
    let phi1 = phi(n + 1, &Rational::one())?;
    Ok((Rational::from_integer(factorial(n - 3) * pow2(n - 1)) * phi1).recip())
}

/// `C_n = 1 / ((n-3)! 2^(n-1) φ_{n+1}(1))`.
pub fn big_c(n: usize) -> Result<Rational> {
    require_n(n, 4)?;
    normalizer(n)
}

/// Integer coefficients `A_i` with `P_n'(s) = C_n Σ A_i s^i` on `[0, 1]`.
///
/// On `s ∈ [0, 1]` the truncation `(c ± s)_+` with `c = n - 1 - 2k` is decided
/// by `c` alone: `c + s` counts for `c >= 0`, `c - s` for `c >= 1`.
fn pn_prime_integer_part(n: usize) -> Vec<BigInt> {
    let p = n - 3;
    let exps = binomial_row(p);
    let mut acc = vec![BigInt::zero(); p + 1];
    for (k, b) in binomial_row(n - 2).iter().enumerate() {
        let c = n as i64 - 1 - 2 * k as i64;
        if c < 0 {
            break;
        }
        let weight = if k % 2 == 0 { b.clone() } else { -b.clone() };
        // c^(p-j) for j = p, p-1, ..., 0.
        let cb = BigInt::from(c);
        let mut cpow = BigInt::one();
        for j in (0..=p).rev() {
            let base = &weight * &exps[j] * &cpow;
            acc[j] += &base;
            if c >= 1 {
                if j % 2 == 0 {
                    acc[j] += &base;
                } else {
                    acc[j] -= &base;
                }
            }
            cpow *= &cb;
        }
    }
    acc
}

/// `P_n'(s)` on `[0, 1]` as an exact even polynomial.
pub fn pn_prime_poly(n: usize) -> Result<RationalPolynomial> {
    require_n(n, 3)?;
    let cn = normalizer(n)?;
    Ok(RationalPolynomial::from_coeffs(
        pn_prime_integer_part(n)
            .into_iter()
            .map(|a| Rational::from_integer(a) * &cn)
            .collect(),
    ))
}

/// `B_n(s) = Π_{j=0}^{α}(s+2j) + (n-1) Σ_j a_j Π_{i≠j}(s+2i)` where `a_j` is
/// the coefficient of `s^{2j}` in `P_n'`.
pub fn build_b(n: usize) -> Result<RationalPolynomial> {
    require_n(n, 3)?;
    let acc = pn_prime_integer_part(n);
    if acc.iter().skip(1).step_by(2).any(|c| !c.is_zero()) {
        return Err(Error::Numeric(format!(
            "P_{n}' has a nonzero odd-degree coefficient"
        )));
    }
    let a = alpha(n);
    // Π_{j=0}^{α}(s + 2j), ascending.
    let mut full = vec![BigInt::one()];
    for j in 0..=a {
        let r = BigInt::from(2 * j);
        let mut next = vec![BigInt::zero(); full.len() + 1];
        for (i, c) in full.iter().enumerate() {
            next[i] += c * &r;
            next[i + 1] += c;
        }
        full = next;
    }
    // Σ_j A_{2j} Π_{i≠j}(s + 2i), each cofactor by synthetic division.
    let mut sum = vec![BigInt::zero(); a + 1];
    for j in 0..=a {
        let w = acc.get(2 * j).cloned().unwrap_or_default();
        if w.is_zero() {
            continue;
        }
        let r = BigInt::from(2 * j);
        let mut q = vec![BigInt::zero(); a + 1];
        q[a] = full[a + 1].clone();
        for i in (1..=a).rev() {
            q[i - 1] = &full[i] - &r * &q[i];
        }
        for (s_i, q_i) in sum.iter_mut().zip(q) {
            *s_i += &w * q_i;
        }
    }
    let k = normalizer(n)? * int(n as i64 - 1);
    let mut coeffs: Vec<Rational> = full.into_iter().map(Rational::from_integer).collect();
    for (c, s_i) in coeffs.iter_mut().zip(sum) {
        *c += &k * Rational::from_integer(s_i);
    }
    Ok(RationalPolynomial::from_coeffs(coeffs))
}

/// `L q_n(s) = n Π_{j=1}^{α}(s+2j) / B_n(s)`, reduced with monic denominator.
pub fn laplace_transfer(n: usize) -> Result<RationalFunction> {
    let b = build_b(n)?;
    let num = (1..=alpha(n)).fold(RationalPolynomial::constant(int(n as i64)), |acc, j| {
        &acc * &RationalPolynomial::shifted_identity(int(2 * j as i64))
    });
    Ok(RationalFunction::new(num, b)?.reduced())
}

/// Transform of `c e^{-p t}`, the `q` of the power density `c s^p`.
pub fn exponential_transform(c: i64, p: i64) -> RationalFunction {
    RationalFunction::new(
        RationalPolynomial::constant(int(c)),
        RationalPolynomial::shifted_identity(int(p)),
    )
    .expect("nonzero denominator")
}

/// The inverse transform of `115(s+2)/(23s^2+130s+192)`.
pub fn q5_closed_form(t: f64) -> f64 {
    let r = 191f64.sqrt();
    let w = r / 23.0;
    5.0 / 191.0 * (-65.0 / 23.0 * t).exp() * (191.0 * (w * t).cos() - 19.0 * r * (w * t).sin())
}

fn q5_transform() -> RationalFunction {
    RationalFunction::new(
        RationalPolynomial::from_integers(&[230, 115]),
        RationalPolynomial::from_integers(&[192, 130, 23]),
    )
    .expect("nonzero denominator")
}

/// Checks the closed forms for `n ∈ {3, 4, 5}` against [`laplace_transfer`].
pub fn closed_form_check(n: usize) -> Result<bool> {
    let transfer = match n {
        3..=5 => laplace_transfer(n)?,
        _ => {
            return Err(Error::InvalidInput(format!(
                "closed forms exist only for n in {{3, 4, 5}}, got {n}"
            )))
        }
    };
    Ok(match n {
        3 => transfer.same_function(&exponential_transform(3, 2)),
        4 => transfer.same_function(&exponential_transform(4, 3)),
        _ => transfer.same_function(&q5_transform()) && q5_closed_form(1.5) < 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    DensityExistsRobson,
    DensityExistsGerow,
    NoDensityProven,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::DensityExistsRobson => "density_exists_robson",
            Verdict::DensityExistsGerow => "density_exists_gerow",
            Verdict::NoDensityProven => "no_density_proven",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Existence verdict for a Gerow-Robson density on `M(n)` with its evidence.
#[derive(Debug, Clone, Serialize)]
pub struct GrReport {
    pub n: usize,
    pub degree: usize,
    pub distinct_real_root_count: usize,
    pub squarefree: bool,
    pub root_method: RootMethod,
    /// Bracket `(lo, hi]` around the largest real root of `B_n`.
    #[serde(serialize_with = "serde_fraction::interval")]
    pub a0_interval: Option<(Rational, Rational)>,
    pub sign_at_minus3: i8,
    pub sign_at_minus2: i8,
    pub verdict: Verdict,
    pub reason: String,
}

impl GrReport {
    /// The three root conditions behind a nonexistence proof for `n >= 6`.
    pub fn root_conditions_hold(&self) -> bool {
        let inside = self
            .a0_interval
            .as_ref()
            .is_some_and(|(lo, hi)| lo > &int(-3) && hi < &int(-2));
        self.distinct_real_root_count == self.degree
            && inside
            && self.sign_at_minus3 < 0
            && self.sign_at_minus2 > 0
    }
}

/// How the real roots of `B_n` were certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootMethod {
    /// `degree` sign changes of `B_n` on an exact dyadic grid.
    SignChanges,
    /// Sturm sequence counts.
    Sturm,
}

struct RootData {
    count: usize,
    squarefree: bool,
    largest: Option<(Rational, Rational)>,
    method: RootMethod,
}

fn inside_or_clear_of_window(lo: &Rational, hi: &Rational) -> bool {
    let (m3, m2) = (int(-3), int(-2));
    (lo > &m3 && hi < &m2) || hi <= &m3 || lo >= &m2
}

/// When to stop refining the bracket of the largest root. For `n <= 5` the
/// roots sit on the window edges, so a fixed width is used instead.
fn bracket_done(n: usize) -> impl Fn(&Rational, &Rational) -> bool {
    move |lo, hi| {
        if n <= 5 {
            hi - lo <= rat(1, 1024)
        } else {
            inside_or_clear_of_window(lo, hi)
        }
    }
}

fn largest_root_bracket(chain: &SturmChain, n: usize) -> Option<(Rational, Rational)> {
    if chain.count_all() == 0 {
        return None;
    }
    let mut hi = chain.root_bound();
    let mut lo = -hi.clone();
    while chain.count_between(&lo, &hi) > 1 {
        let mid = (&lo + &hi) / int(2);
        let mid = if chain.sign_at(&mid) == 0 {
            (&mid + &hi) / int(2)
        } else {
            mid
        };
        if chain.count_between(&mid, &hi) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(chain.refine(lo, hi, REFINE_STEPS, bracket_done(n)))
}

/// Real-root data of `B_n`: the cheap sign-change certificate when it
/// applies, Sturm counts otherwise.
fn root_data(b: &RationalPolynomial, n: usize) -> Result<RootData> {
    let p = IntegerPolynomial::from_rational(b);
    let radius = p.log2_root_radius_estimate().min(20.0).exp2().ceil() as i64 + 1;
    if let Some(brackets) = sign_change_brackets(&p, -radius, radius, GRID_LEVELS) {
        let (lo, hi) = brackets.last().cloned().expect("degree >= 1");
        return Ok(RootData {
            count: brackets.len(),
            squarefree: true,
            largest: Some(bisect_sign_change(
                &p,
                lo,
                hi,
                REFINE_STEPS,
                bracket_done(n),
            )),
            method: RootMethod::SignChanges,
        });
    }
    let chain = SturmChain::new(&p)?;
    Ok(RootData {
        count: chain.count_all(),
        squarefree: chain.is_squarefree(),
        largest: largest_root_bracket(&chain, n),
        method: RootMethod::Sturm,
    })
}

/// Root data of `B_n` from the Sturm sequence alone.
pub fn sturm_root_count(n: usize) -> Result<(usize, bool)> {
    let chain = SturmChain::new(&IntegerPolynomial::from_rational(&build_b(n)?))?;
    Ok((chain.count_all(), chain.is_squarefree()))
}

/// Decides existence of a Gerow-Robson density on `M(n)`.
///
/// `n = 3, 4` rest on the closed-form transforms, `n = 5` on the sign of the
/// explicit `q_5`, and `n >= 6` on exact root data of `B_n`. No existence
/// verdict is ever returned for `n >= 5`.
pub fn verify_no_gr_density(n: usize) -> Result<GrReport> {
    require_n(n, 3)?;
    let b = build_b(n)?;
    let degree = b.degree().unwrap_or(0);
    let roots = root_data(&b, n)?;
    let count = roots.count;
    let sign_at_minus3 = signum(&b.eval(&int(-3)));
    let sign_at_minus2 = signum(&b.eval(&int(-2)));
    let mut report = GrReport {
        n,
        degree,
        distinct_real_root_count: count,
        squarefree: roots.squarefree,
        root_method: roots.method,
        a0_interval: roots.largest,
        sign_at_minus3,
        sign_at_minus2,
        verdict: Verdict::Inconclusive,
        reason: String::new(),
    };
    let (verdict, reason) = match n {
        3 | 4 => {
            if closed_form_check(n)? {
                let v = if n == 3 {
                    Verdict::DensityExistsRobson
                } else {
                    Verdict::DensityExistsGerow
                };
                (
                    v,
                    format!("L q_{n} = {n}/(s+{}) so g_{n}(s) = {n}s^{}", n - 1, n - 1),
                )
            } else {
                (
                    Verdict::Inconclusive,
                    "closed-form transform mismatch".into(),
                )
            }
        }
        5 => {
            if count == 0 && closed_form_check(5)? {
                (
                    Verdict::NoDensityProven,
                    "complex roots + q_5(1.5)<0 closed form".into(),
                )
            } else {
                (Verdict::Inconclusive, "closed-form check failed".into())
            }
        }
        _ => {
            if report.root_conditions_hold() {
                (
                    Verdict::NoDensityProven,
                    "distinct real roots, -3 < a_0 < -2, B(-3) < 0 < B(-2)".into(),
                )
            } else {
                let mut failed = Vec::new();
                if count != degree {
                    failed.push(format!("{count} of {degree} roots real and distinct"));
                }
                if sign_at_minus3 >= 0 || sign_at_minus2 <= 0 {
                    failed.push(format!(
                        "sign pattern B(-3)={sign_at_minus3}, B(-2)={sign_at_minus2}"
                    ));
                }
                if failed.is_empty() {
                    failed.push("largest root not isolated inside (-3, -2)".into());
                }
                (Verdict::Inconclusive, failed.join("; "))
            }
        }
    };
    report.verdict = verdict;
    report.reason = reason;
    Ok(report)
}

fn open_unit(t: f64) -> Result<()> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidInput(format!(
            "t must lie in (0, 1), got {t}"
        )));
    }
    Ok(())
}

/// `(1/n) g(t) + (1 - 1/n) ∫_t^1 g(s) P_n'(t/s) ds/s - 1`; zero for all `t`
/// exactly when `g` yields a random balanced sample.
pub fn rbs_condition_residual(g: &Density, n: usize, t: f64) -> Result<f64> {
    require_n(n, 3)?;
    open_unit(t)?;
    let pp = pn_prime_poly(n)?.to_f64_coeffs();
    let pprime = |r: f64| pp.iter().rev().fold(0.0, |acc, c| acc * r + c);
    let integral = quadrature::integrate(|s| g.eval(s) * pprime(t / s) / s, t, 1.0, QUADRATURE_TOL)
        .map_err(|e| Error::Numeric(format!("residual at n={n}, t={t}: {e}")))?;
    let nf = n as f64;
    Ok(g.eval(t) / nf + (1.0 - 1.0 / nf) * integral - 1.0)
}

/// `P{X_1 <= t}` for the Gerow-Robson model with radius density `g`.
pub fn gr_model_marginal_cdf(g: &Density, n: usize, t: f64) -> Result<f64> {
    require_n(n, 3)?;
    if t.is_nan() {
        return Err(Error::InvalidInput("t is NaN".into()));
    }
    if t <= -1.0 {
        return Ok(0.0);
    }
    if t >= 1.0 {
        return Ok(1.0);
    }
    if t < 0.0 {
        return Ok(1.0 - gr_model_marginal_cdf(g, n, -t)?);
    }
    if t == 0.0 {
        return Ok(0.5);
    }
    let pn = pn_prime_poly(n)?.antiderivative().to_f64_coeffs();
    let cdf_z = |r: f64| pn.iter().rev().fold(0.0, |acc, c| acc * r + c);
    let integral = quadrature::integrate(|s| g.eval(s) * cdf_z(t / s), t, 1.0, QUADRATURE_TOL)
        .map_err(|e| Error::Numeric(format!("marginal CDF at n={n}, t={t}: {e}")))?;
    let nf = n as f64;
    Ok(0.5 + 0.5 * g.cdf(t) + 0.5 * (1.0 - 1.0 / nf) * integral)
}

/// `rational * sqrt(radicand)` with square-free radicand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurdValue {
    #[serde(serialize_with = "serde_fraction::serialize")]
    pub rational: Rational,
    pub radicand: u64,
}

impl SurdValue {
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.rational.to_f64().unwrap_or(f64::NAN) * (self.radicand as f64).sqrt()
    }
}

/// Volume of `M(n)`: `V_{n-1} = 2^n sqrt(n) φ_{n+2}(0)`.
pub fn polytope_volume(n: usize) -> Result<SurdValue> {
    require_n(n, 2)?;
    let mut outside = 1u64;
    let mut radicand = n as u64;
    let mut f = 2u64;
    while f * f <= radicand {
        while radicand.is_multiple_of(f * f) {
            radicand /= f * f;
            outside *= f;
        }
        f += 1;
    }
    let rational =
        phi(n + 2, &Rational::zero())? * Rational::from_integer(pow2(n) * BigInt::from(outside));
    Ok(SurdValue { rational, radicand })
}

/// Density of the Gerow-Robson form, `f(s) = g(s) / ((n-1) V_{n-1} s^{n-2})`.
pub fn gr_density_f(n: usize, g: &Density, s: f64) -> Result<f64> {
    require_n(n, 3)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidInput(format!(
            "s must lie in [0, 1], got {s}"
        )));
    }
    let scale = (n as f64 - 1.0) * polytope_volume(n)?.to_f64();
    let k = (n - 2) as f64;
    if s == 0.0 {
        return match g.leading_power_at_zero() {
            None => Ok(0.0),
            Some((p, _)) if p > k => Ok(0.0),
            Some((p, c)) if p == k => Ok(c / scale),
            Some(_) => Err(Error::Singularity(format!(
                "g(s)/s^{} is unbounded at s = 0",
                n - 2
            ))),
        };
    }
    Ok(g.eval(s) / (scale * s.powi((n - 2) as i32)))
}
