//! The balanced polytope `M(n) = { x in [-1,1]^n : sum x = 0 }`.
//!
//! Besides membership and a Euclidean model of `M(n)` in `R^(n-1)`, this module
//! hosts the cyclic difference map `L(x) = (x1 - x2, ..., xm - x1)` and the
//! coordinate orderings that let the pair-redistribution samplers reach every
//! point of the polytope once their output is permuted.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::rng::Sign;

/// Default slack for the geometric predicates.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Per-coordinate budget for the floating residual of `sum x`.
pub const BALANCE_TOL_PER_COORD: f64 = 1e-12;

/// Slack allowed above `1` for any single coordinate.
pub const BOUND_SLACK: f64 = 1e-15;

/// A point of `M(n)`: `n >= 2` coordinates in `[-1, 1]` summing to zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct BalancedVector {
    coords: Vec<f64>,
}

impl BalancedVector {
    /// Validates `coords` against the balance and box invariants.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let n = coords.len();
        if n < 2 {
            return Err(Error::InvalidDimension {
                got: n,
                reason: "a balanced vector needs at least two coordinates",
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return invalid("balanced vector has a non-finite coordinate");
        }
        let sum: f64 = coords.iter().sum();
        if sum.abs() > BALANCE_TOL_PER_COORD * n as f64 {
            return invalid(format!("coordinates sum to {sum:e}, not 0"));
        }
        if let Some(c) = coords.iter().find(|c| c.abs() > 1.0 + BOUND_SLACK) {
            return invalid(format!("coordinate {c} lies outside [-1, 1]"));
        }
        Ok(Self { coords })
    }

    /// Wraps coordinates produced by a construction that is balanced by algebra.
    pub(crate) fn from_construction(coords: Vec<f64>) -> Self {
        debug_assert!(
            Self::new(coords.clone()).is_ok(),
            "construction produced an unbalanced vector: {coords:?}"
        );
        Self { coords }
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn sum(&self) -> f64 {
        self.coords.iter().sum()
    }

    /// `max_k |x_k|`, the sup-norm that Gerow-Robson densities depend on.
    pub fn sup_norm(&self) -> f64 {
        self.coords.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// The vector `(x[perm[0]], ..., x[perm[n-1]])`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        debug_assert_eq!(perm.len(), self.n());
        Self {
            coords: perm.iter().map(|&i| self.coords[i]).collect(),
        }
    }
}

impl AsRef<[f64]> for BalancedVector {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

fn check_dimension(n: usize, min: usize, what: &'static str) -> Result<()> {
    if n < min {
        Err(Error::InvalidDimension {
            got: n,
            reason: what,
        })
    } else {
        Ok(())
    }
}

/// Membership in `M(n)` with slack `tol` on both the balance and the box.
pub fn contains(n: usize, x: &[f64], tol: f64) -> Result<bool> {
    check_dimension(n, 2, "M(n) is defined for n >= 2")?;
    if x.len() != n {
        return invalid(format!("expected {n} coordinates, got {}", x.len()));
    }
    if tol < 0.0 || tol.is_nan() {
        return invalid("tolerance must be non-negative");
    }
    let sum: f64 = x.iter().sum();
    Ok(sum.abs() <= tol && x.iter().all(|c| c.abs() <= 1.0 + tol))
}

/// `n` unit vectors in `R^(n-1)` with pairwise inner product `-1/(n-1)`.
///
/// `M(n)` is identified with `{ v : -1 <= (v, u_k) <= 1 for all k }`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeModel {
    n: usize,
    vectors: Vec<Vec<f64>>,
}

impl PolytopeModel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// The coordinates `x_k = (v, u_k)` of a point of the model.
    pub fn coordinates(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() + 1 != self.n {
            return invalid(format!(
                "point has dimension {}, model lives in R^{}",
                v.len(),
                self.n - 1
            ));
        }
        Ok(self.vectors.iter().map(|u| dot(u, v)).collect())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Builds the simplex model by Cholesky factorization of the Gram block of
/// `u_1..u_{n-1}`; the last vector is `-(u_1 + ... + u_{n-1})`.
pub fn build_simplex_model(n: usize) -> Result<PolytopeModel> {
    check_dimension(n, 2, "the simplex model needs n >= 2")?;
    let d = n - 1;
    let off = -1.0 / d as f64;
    let gram = |i: usize, j: usize| if i == j { 1.0 } else { off };

    // Rows of the lower-triangular factor are the first d vectors.
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let diag = gram(i, i) - s;
                if diag <= 0.0 {
                    return Err(Error::Numeric(format!(
                        "Gram block is not positive definite at row {i}"
                    )));
                }
                l[i][j] = diag.sqrt();
            } else {
                l[i][j] = (gram(i, j) - s) / l[j][j];
            }
        }
    }
    let mut last = vec![0.0; d];
    for row in &l {
        for (acc, c) in last.iter_mut().zip(row) {
            *acc -= c;
        }
    }
    l.push(last);
    Ok(PolytopeModel { n, vectors: l })
}

/// The unique `v` in `R^(n-1)` with `(v, u_k) = x_k` for every `k`.
///
/// Because `sum_k u_k u_k^T = n/(n-1) I`, the solution is
/// `v = (n-1)/n * sum_k x_k u_k`.
pub fn embed(model: &PolytopeModel, x: &BalancedVector) -> Result<Vec<f64>> {
    if model.n != x.n() {
        return invalid(format!(
            "model is for n = {}, vector has n = {}",
            model.n,
            x.n()
        ));
    }
    let n = model.n as f64;
    let mut v = vec![0.0; model.n - 1];
    for (u, &xk) in model.vectors.iter().zip(x.coords()) {
        for (acc, c) in v.iter_mut().zip(u) {
            *acc += xk * c;
        }
    }
    let scale = (n - 1.0) / n;
    v.iter_mut().for_each(|c| *c *= scale);
    Ok(v)
}

/// `L(x) = (x1 - x2, x2 - x3, ..., xm - x1)`.
pub fn cyclic_difference(x: &[f64]) -> Result<Vec<f64>> {
    let m = x.len();
    check_dimension(m, 2, "the cyclic difference map needs m >= 2")?;
    Ok((0..m).map(|k| x[k] - x[(k + 1) % m]).collect())
}

/// Whether `r` has a preimage under `L` inside `[-1,1]^m`.
///
/// A preimage must satisfy `x_k = x_1 - S_k` with `S_k = r_1 + ... + r_{k-1}`,
/// so one exists iff `max S - min S <= 2`.
pub fn in_cyclic_difference_image(r: &[f64], tol: f64) -> Result<bool> {
    let m = r.len();
    check_dimension(m, 2, "the cyclic difference map needs m >= 2")?;
    let sum: f64 = r.iter().sum();
    if sum.abs() > tol.max(BALANCE_TOL_PER_COORD * m as f64) {
        return invalid(format!("image vector sums to {sum:e}, not 0"));
    }
    let mut s = 0.0_f64;
    let (mut lo, mut hi) = (0.0_f64, 0.0_f64);
    for &rk in &r[..m - 1] {
        s += rk;
        lo = lo.min(s);
        hi = hi.max(s);
    }
    Ok(hi - lo <= 2.0 + tol)
}

/// Vertices of `M(m)`: every coordinate is `±1` except at most one, which is `0`.
pub fn polytope_vertices(m: usize) -> Result<Vec<Vec<f64>>> {
    check_dimension(m, 2, "M(m) is defined for m >= 2")?;
    if m > 20 {
        return invalid("vertex enumeration is limited to m <= 20");
    }
    let mut out = Vec::new();
    if m.is_multiple_of(2) {
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize == m / 2 {
                out.push((0..m).map(|k| sign_bit(mask, k)).collect());
            }
        }
        return Ok(out);
    }
    for zero in 0..m {
        for mask in 0u32..(1 << (m - 1)) {
            if mask.count_ones() as usize != (m - 1) / 2 {
                continue;
            }
            let mut v = Vec::with_capacity(m);
            let mut bit = 0;
            for k in 0..m {
                if k == zero {
                    v.push(0.0);
                } else {
                    v.push(sign_bit(mask, bit));
                    bit += 1;
                }
            }
            out.push(v);
        }
    }
    Ok(out)
}

fn sign_bit(mask: u32, k: usize) -> f64 {
    if mask & (1 << k) != 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(w[perm[0]], ..., w[perm[n-1]])`.
pub fn apply_permutation(w: &[f64], perm: &[usize]) -> Vec<f64> {
    perm.iter().map(|&i| w[i]).collect()
}

/// Prefix sums `z_1, z_1 + z_2, ..., z_1 + ... + z_n`.
pub fn prefix_sums(z: &[f64]) -> Vec<f64> {
    z.iter()
        .scan(0.0, |acc, &c| {
            *acc += c;
            Some(*acc)
        })
        .collect()
}

// Picks the unused index whose value has the requested sign and the smallest
// magnitude (lowest index on ties). Falls back to the most extreme value of
// that sign direction when floating cancellation left no exact candidate.
fn pick(w: &[f64], used: &[bool], want_nonneg: Option<bool>) -> usize {
    let unused = || (0..w.len()).filter(|&i| !used[i]);
    let candidate = unused()
        .filter(|&i| match want_nonneg {
            Some(true) => w[i] >= 0.0,
            Some(false) => w[i] <= 0.0,
            None => true,
        })
        .min_by(|&a, &b| w[a].abs().total_cmp(&w[b].abs()).then(a.cmp(&b)));
    candidate.unwrap_or_else(|| {
        let best = match want_nonneg {
            Some(true) => unused().max_by(|&a, &b| w[a].total_cmp(&w[b]).then(b.cmp(&a))),
            _ => unused().min_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b))),
        };
        best.expect("pick called with no unused index")
    })
}

/// A permutation `σ` such that every prefix sum of `σ(w)` lies in `[-1, 1]`.
///
/// Each step appends an unused coordinate whose sign opposes the running sum;
/// with a zero running sum the smallest remaining magnitude is taken.
pub fn balanced_greedy_order(w: &BalancedVector) -> Vec<usize> {
    let coords = w.coords();
    let n = coords.len();
    let mut used = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut running = 0.0_f64;
    for _ in 0..n {
        let want = if running > 0.0 {
            Some(false)
        } else if running < 0.0 {
            Some(true)
        } else {
            None
        };
        let i = pick(coords, &used, want);
        used[i] = true;
        running += coords[i];
        order.push(i);
    }
    order
}

/// The sums `z_k + ... + z_{n-3} + (z_n + b)/2` for `k = 1..n-3`.
///
/// A permuted sample `z` is reachable by the odd-size redistribution
/// construction with sign `b` when all of these lie in `[-1, 1]`.
pub fn odd_order_sums(z: &[f64], b: Sign) -> Vec<f64> {
    let n = z.len();
    if n < 4 {
        return Vec::new();
    }
    let offset = 0.5 * (z[n - 1] + b.value());
    let mut out = vec![0.0; n - 3];
    let mut tail = 0.0;
    for k in (0..n - 3).rev() {
        tail += z[k];
        out[k] = tail + offset;
    }
    out
}

/// A permutation `σ` and sign `b` such that every entry of
/// [`odd_order_sums`]`(σ(w), b)` lies in `[-1, 1]`, for odd `n >= 5`.
///
/// The last slot takes the largest coordinate (so `z_n >= 0`), `b = -1`, and
/// the slots `n-3, n-4, ..., 1` are filled backwards: while the tail sum is at
/// least `a = (1 - z_n)/2` a non-positive value is appended, otherwise a
/// non-negative one if any remains. Slots `n-2` and `n-1` take what is left.
pub fn balanced_order_odd(w: &BalancedVector) -> Result<(Vec<usize>, Sign)> {
    let coords = w.coords();
    let n = coords.len();
    if n.is_multiple_of(2) || n < 5 {
        return Err(Error::InvalidInput(format!(
            "the odd ordering needs odd n >= 5, got n = {n}"
        )));
    }
    let mut used = vec![false; n];
    let mut order = vec![usize::MAX; n];

    let last = (0..n)
        .max_by(|&a, &b| coords[a].total_cmp(&coords[b]).then(b.cmp(&a)))
        .expect("n >= 5");
    used[last] = true;
    order[n - 1] = last;
    let a = 0.5 * (1.0 - coords[last]);

    let mut tail = 0.0_f64;
    for slot in (0..n - 3).rev() {
        let want_nonneg = tail < a;
        let i = pick(coords, &used, Some(want_nonneg));
        used[i] = true;
        tail += coords[i];
        order[slot] = i;
    }
    let mut rest = (0..n).filter(|&i| !used[i]);
    order[n - 3] = rest.next().expect("two slots remain");
    order[n - 2] = rest.next().expect("two slots remain");
    Ok((order, Sign::Minus))
}
