use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Rational, RationalPolynomial};
use crate::error::{Error, Result};

/// Dense polynomial over `Z`, ascending degree, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntegerPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// The primitive integer multiple of `p` with the same sign pattern.
    pub fn from_rational(p: &RationalPolynomial) -> Self {
        Self::new(p.primitive_integer_coeffs())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    fn divided_by(self, k: &BigInt) -> Self {
        if k.is_one() {
            return self;
        }
        Self::new(self.coeffs.into_iter().map(|c| c / k).collect())
    }

    fn negated(self) -> Self {
        Self::new(self.coeffs.into_iter().map(|c| -c).collect())
    }

    /// A positive multiple of `self mod divisor`.
    fn sign_preserving_remainder(&self, divisor: &Self) -> Self {
        let db = divisor.coeffs.len() - 1;
        let lead = &divisor.coeffs[db];
        let scale = lead.abs();
        let flip = lead.is_negative();
        let mut r = self.coeffs.clone();
        while r.len() > db && !r.is_empty() {
            let top = r.last().expect("nonempty").clone();
            let shift = r.len() - 1 - db;
            for c in r.iter_mut() {
                *c *= &scale;
            }
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                let t = &top * dc;
                if flip {
                    r[shift + i] += t;
                } else {
                    r[shift + i] -= t;
                }
            }
            debug_assert!(r.last().expect("nonempty").is_zero());
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Self::new(r)
    }

    /// Sign of `self(num/den)` for `den > 0`, by homogeneous integer Horner.
    fn sign_at_powers(&self, num: &BigInt, den_powers: &[BigInt]) -> i8 {
        let Some(d) = self.degree() else { return 0 };
        let mut acc = self.coeffs[d].clone();
        for i in (0..d).rev() {
            acc = acc * num + &self.coeffs[i] * &den_powers[d - i];
        }
        sign_of(&acc)
    }

    /// Sign of `self(x)`, exactly.
    pub fn sign_at(&self, x: &Rational) -> i8 {
        let d = self.degree().unwrap_or(0);
        let mut pw = Vec::with_capacity(d + 1);
        pw.push(BigInt::one());
        for i in 1..=d {
            let next = &pw[i - 1] * x.denom();
            pw.push(next);
        }
        self.sign_at_powers(x.numer(), &pw)
    }

    /// Upper estimate of `log2` of the largest root modulus (Fujiwara),
    /// from coefficient bit lengths. Not rigorous; only steers searches.
    pub fn log2_root_radius_estimate(&self) -> f64 {
        let Some(d) = self.degree() else { return 0.0 };
        let lead = self.coeffs[d].bits() as f64;
        (1..=d)
            .filter(|&k| !self.coeffs[d - k].is_zero())
            .map(|k| (self.coeffs[d - k].bits() as f64 - lead + 1.0) / k as f64)
            .fold(0.0, f64::max)
            + 1.0
    }

    fn sign_at_infinity(&self, negative: bool) -> i8 {
        match self.degree() {
            None => 0,
            Some(d) => {
                let s = sign_of(&self.coeffs[d]);
                if negative && d % 2 == 1 {
                    -s
                } else {
                    s
                }
            }
        }
    }
}

fn sign_of(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut prev = 0i8;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if prev != 0 && s != prev {
            count += 1;
        }
        prev = s;
    }
    count
}

/// The Sturm sequence `p, p', -rem(p, p'), ...` kept primitive at every step.
#[derive(Debug, Clone)]
pub struct SturmChain {
    polys: Vec<IntegerPolynomial>,
}

impl SturmChain {
    pub fn new(p: &IntegerPolynomial) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::InvalidInput(
                "Sturm chain of the zero polynomial".into(),
            ));
        }
        let mut polys = vec![p.clone()];
        let d = p.derivative();
        if !d.is_zero() {
            let c = d.content();
            polys.push(d.divided_by(&c));
        }
        loop {
            let k = polys.len();
            if k < 2 {
                break;
            }
            let r = polys[k - 2]
                .sign_preserving_remainder(&polys[k - 1])
                .negated();
            if r.is_zero() {
                break;
            }
            let c = r.content();
            polys.push(r.divided_by(&c));
        }
        Ok(Self { polys })
    }

    pub fn polynomials(&self) -> &[IntegerPolynomial] {
        &self.polys
    }

    pub fn base(&self) -> &IntegerPolynomial {
        &self.polys[0]
    }

    /// The last chain element is `gcd(p, p')` up to scale; constant means squarefree.
    pub fn is_squarefree(&self) -> bool {
        self.polys.last().and_then(IntegerPolynomial::degree) == Some(0)
    }

    fn den_powers(&self, den: &BigInt) -> Vec<BigInt> {
        let d = self.polys[0].degree().unwrap_or(0);
        let mut out = Vec::with_capacity(d + 1);
        out.push(BigInt::one());
        for i in 1..=d {
            let next = &out[i - 1] * den;
            out.push(next);
        }
        out
    }

    /// Sign of the base polynomial at `x`.
    pub fn sign_at(&self, x: &Rational) -> i8 {
        let pw = self.den_powers(x.denom());
        self.polys[0].sign_at_powers(x.numer(), &pw)
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        let pw = self.den_powers(x.denom());
        variations(self.polys.iter().map(|p| p.sign_at_powers(x.numer(), &pw)))
    }

    fn variations_at_infinity(&self, negative: bool) -> usize {
        variations(self.polys.iter().map(|p| p.sign_at_infinity(negative)))
    }

    /// Number of distinct real roots.
    pub fn count_all(&self) -> usize {
        self.variations_at_infinity(true) - self.variations_at_infinity(false)
    }

    /// Distinct roots in `(lo, hi]`; `lo < hi`.
    pub fn count_between(&self, lo: &Rational, hi: &Rational) -> usize {
        self.variations_at(lo)
            .saturating_sub(self.variations_at(hi))
    }

    /// Distinct roots in `(lo, +inf)`.
    pub fn count_above(&self, lo: &Rational) -> usize {
        self.variations_at(lo)
            .saturating_sub(self.variations_at_infinity(false))
    }

    /// A power of two strictly above every root's modulus (Cauchy bound).
    pub fn root_bound(&self) -> Rational {
        let c = self.polys[0].coeffs();
        let lead = c.last().expect("nonzero polynomial").abs();
        let max_ratio = c[..c.len() - 1]
            .iter()
            .map(|x| Rational::new(x.abs(), lead.clone()))
            .max()
            .unwrap_or_else(Rational::zero);
        let bound = max_ratio + Rational::one();
        let mut b = Rational::one();
        while b <= bound {
            b *= Rational::from_integer(BigInt::from(2));
        }
        b
    }

    /// A point strictly inside `(lo, hi)` that is not a root, near the midpoint.
    fn split_point(&self, lo: &Rational, hi: &Rational) -> Rational {
        let two = Rational::from_integer(BigInt::from(2));
        let mid = (lo + hi) / &two;
        if self.sign_at(&mid) != 0 {
            return mid;
        }
        let mut step = (hi - lo) / Rational::from_integer(BigInt::from(8));
        loop {
            for cand in [&mid + &step, &mid - &step] {
                if self.sign_at(&cand) != 0 {
                    return cand;
                }
            }
            step /= &two;
        }
    }

    /// Bisects `(lo, hi]`, holding exactly one root, until `done` accepts the
    /// interval or `max_steps` is spent.
    pub fn refine(
        &self,
        mut lo: Rational,
        mut hi: Rational,
        max_steps: usize,
        done: impl Fn(&Rational, &Rational) -> bool,
    ) -> (Rational, Rational) {
        for _ in 0..max_steps {
            if done(&lo, &hi) {
                break;
            }
            let mid = self.split_point(&lo, &hi);
            if self.count_between(&lo, &mid) == 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo, hi)
    }

    /// Disjoint intervals `(lo, hi]`, ascending, each holding exactly one root.
    /// No endpoint is a root.
    pub fn isolate(&self) -> Vec<(Rational, Rational)> {
        let b = self.root_bound();
        let lo = -b.clone();
        let total = self.count_between(&lo, &b);
        let mut stack = vec![(lo, b, total)];
        let mut out = Vec::with_capacity(total);
        while let Some((lo, hi, count)) = stack.pop() {
            match count {
                0 => {}
                1 => out.push((lo, hi)),
                _ => {
                    let mid = self.split_point(&lo, &hi);
                    let left = self.count_between(&lo, &mid);
                    stack.push((mid.clone(), hi, count - left));
                    stack.push((lo, mid, left));
                }
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }
}

/// Brackets every root of `p` by sign changes on dyadic grids over
/// `[lo, hi]`, refining the step down to `2^-max_level`.
///
/// Returns `None` unless the grid shows `degree(p)` sign changes. When it
/// does, the intermediate value theorem gives that many distinct real roots,
/// which by the degree bound are all the roots, each simple, and each
/// bracket `(a, b)` holds exactly one of them with `p(a) p(b) < 0`.
pub fn sign_change_brackets(
    p: &IntegerPolynomial,
    lo: i64,
    hi: i64,
    max_level: u32,
) -> Option<Vec<(Rational, Rational)>> {
    let d = p.degree()?;
    if d == 0 || lo >= hi {
        return None;
    }
    let mut points: Vec<(Rational, i8)> = (lo..=hi)
        .map(|k| {
            let x = Rational::from_integer(BigInt::from(k));
            let s = p.sign_at(&x);
            (x, s)
        })
        .collect();
    for level in 0..=max_level {
        if level > 0 {
            let two = Rational::from_integer(BigInt::from(2));
            let mut refined = Vec::with_capacity(2 * points.len());
            for w in points.windows(2) {
                refined.push(w[0].clone());
                let mid = (&w[0].0 + &w[1].0) / &two;
                let s = p.sign_at(&mid);
                refined.push((mid, s));
            }
            refined.push(points.last().expect("nonempty grid").clone());
            points = refined;
        }
        let nonzero: Vec<&(Rational, i8)> = points.iter().filter(|(_, s)| *s != 0).collect();
        let brackets: Vec<(Rational, Rational)> = nonzero
            .windows(2)
            .filter(|w| w[0].1 != w[1].1)
            .map(|w| (w[0].0.clone(), w[1].0.clone()))
            .collect();
        // A root sitting on a grid point is invisible to the brackets.
        let exact_roots = points.iter().filter(|(_, s)| *s == 0).count();
        if exact_roots == 0 && brackets.len() == d {
            return Some(brackets);
        }
    }
    None
}

/// Halves a sign-change bracket of `p` until `done` accepts it or
/// `max_steps` is spent. Midpoints that are roots are nudged aside.
pub fn bisect_sign_change(
    p: &IntegerPolynomial,
    mut lo: Rational,
    mut hi: Rational,
    max_steps: usize,
    done: impl Fn(&Rational, &Rational) -> bool,
) -> (Rational, Rational) {
    let two = Rational::from_integer(BigInt::from(2));
    let s_lo = p.sign_at(&lo);
    for _ in 0..max_steps {
        if done(&lo, &hi) {
            break;
        }
        let mut mid = (&lo + &hi) / &two;
        let mut s = p.sign_at(&mid);
        let mut nudge = (&hi - &lo) / Rational::from_integer(BigInt::from(8));
        while s == 0 {
            mid += &nudge;
            nudge /= &two;
            s = p.sign_at(&mid);
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Distinct real roots of a polynomial over `Q`.
#[derive(Debug, Clone)]
pub struct RootIsolation {
    pub count: usize,
    pub squarefree: bool,
    /// Ascending isolating intervals `(lo, hi]` with non-root endpoints.
    pub intervals: Vec<(Rational, Rational)>,
}

pub fn sturm_distinct_real_roots(p: &RationalPolynomial) -> Result<RootIsolation> {
    if p.is_zero() {
        return Err(Error::InvalidInput(
            "the zero polynomial has no isolated roots".into(),
        ));
    }
    let chain = SturmChain::new(&IntegerPolynomial::from_rational(p))?;
    let intervals = chain.isolate();
    Ok(RootIsolation {
        count: intervals.len(),
        squarefree: chain.is_squarefree(),
        intervals,
    })
}
