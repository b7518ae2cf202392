//! Exact scalars and matrices.

mod integer;
pub mod json;
mod lattice;
pub mod linalg;
mod matrix;
mod snf;

pub use integer::IntegerMatrix;
pub use lattice::{solve_hom_lattice, AffineLattice};
pub use matrix::{lorentz_check, vec5, ExactMatrix, LorentzIsometry, Vec5, LORENTZ_DIAG};
pub use snf::{invariant_factors, smith_normal_form, SmithDecomposition};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn qf(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Positive generator of the additive subgroup of Q spanned by `xs`
/// (zero when all inputs vanish).
pub fn rational_gcd(xs: &[Rational]) -> Rational {
    use num_integer::Integer;
    let mut den = BigInt::one();
    for x in xs {
        den = den.lcm(x.denom());
    }
    let mut g = BigInt::zero();
    for x in xs {
        let n = x.numer() * (&den / x.denom());
        g = g.gcd(&n);
    }
    Rational::new(g, den)
}

pub fn sign(x: &Rational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}
