//! Coefficient fields.
//!
//! Everything numeric in this crate is generic over [`Scalar`]. Two fields are
//! used in practice: double precision complex numbers ([`Complex64`]) for the
//! bulk of the checks, and Gaussian rationals ([`GaussianRational`]) for small
//! cases where identities must hold with residual exactly zero. Plain
//! [`BigRational`] is also a `Scalar` and is the coefficient field of the
//! boson-space computations when no complex numbers are involved.

use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact complex numbers with rational real and imaginary parts.
pub type GaussianRational = Complex<BigRational>;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// `true` when arithmetic in this field has no rounding.
    const EXACT: bool;

    fn from_int(n: i64) -> Self;

    fn from_rational(q: &BigRational) -> Self;

    /// Absolute value, as a float, for residual reporting.
    fn modulus(&self) -> f64;

    fn to_c64(&self) -> Complex64;

    fn conj(&self) -> Self;

    /// `(-1)^k` times `self`.
    fn signed(self, negative: bool) -> Self {
        if negative {
            -self
        } else {
            self
        }
    }
}

fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn from_rational(q: &BigRational) -> Self {
        Complex64::new(rational_to_f64(q), 0.0)
    }

    fn modulus(&self) -> f64 {
        self.norm()
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn modulus(&self) -> f64 {
        rational_to_f64(&self.abs())
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }

    fn conj(&self) -> Self {
        self.clone()
    }
}

impl Scalar for GaussianRational {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        Complex::new(BigRational::from_int(n), BigRational::zero())
    }

    fn from_rational(q: &BigRational) -> Self {
        Complex::new(q.clone(), BigRational::zero())
    }

    fn modulus(&self) -> f64 {
        self.to_c64().norm()
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
}

/// Rational `num/den` as a [`BigRational`].
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Gaussian rational `(re_num + i·im_num) / den`.
pub fn gaussian(re_num: i64, im_num: i64, den: i64) -> GaussianRational {
    Complex::new(ratio(re_num, den), ratio(im_num, den))
}
