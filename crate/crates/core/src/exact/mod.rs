//! Exact rational arithmetic: polynomials over `Q` and Sturm-sequence root
//! isolation.

mod poly;
mod sturm;

pub use poly::{RationalFunction, RationalPolynomial};
pub use sturm::{
    bisect_sign_change, sign_change_brackets, sturm_distinct_real_roots, IntegerPolynomial,
    RootIsolation, SturmChain,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

/// Arbitrary-precision rational number in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `"p/q"`, with `q = 1` spelled out.
pub fn to_fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Sign of a rational as `-1`, `0` or `1`.
pub fn signum(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// Serde adapters writing rationals as `"p/q"` strings.
pub mod serde_fraction {
    use super::{to_fraction_string, Rational};
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_fraction_string(r))
    }

    pub fn interval<S: Serializer>(
        iv: &Option<(Rational, Rational)>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        match iv {
            None => s.serialize_none(),
            Some((lo, hi)) => {
                let mut seq = s.serialize_seq(Some(2))?;
                seq.serialize_element(&to_fraction_string(lo))?;
                seq.serialize_element(&to_fraction_string(hi))?;
                seq.end()
            }
        }
    }
}
