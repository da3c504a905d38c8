//! Multiprecision scalars, matrices and exact integer linear algebra.

mod complex;
mod intlin;
mod matrix;
mod rational;

pub use complex::Cx;
pub use intlin::{hnf_basis, integer_nullspace, integer_nullspace_real, lll_reduce, IntMat};
pub use matrix::{cholesky, CMatrix};
pub use rational::{rational_reconstruct, Rational};

use crate::error::{Error, Result};
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

/// Extra bits carried beyond the requested decimal precision.
pub const GUARD_BITS: u32 = 64;

/// Working precision shared by every numeric routine.
#[derive(Clone, Debug)]
pub struct PrecisionContext {
    digits: u32,
    bits: u32,
    eps: Float,
    check_eps: Float,
}

impl PrecisionContext {
    pub fn new(digits: u32) -> Result<Self> {
        if digits < 20 {
            return Err(Error::InvalidArgument(format!(
                "precision of {digits} digits is below the minimum of 20"
            )));
        }
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS;
        let eps = Float::with_val(bits, Float::i_pow_u(10, digits)).recip();
        let check_eps = Float::with_val(bits, Float::i_pow_u(10, digits - 10)).recip();
        Ok(PrecisionContext { digits, bits, eps, check_eps })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// 10^-D.
    pub fn eps(&self) -> &Float {
        &self.eps
    }

    /// 10^(-D+10), the tolerance for internal consistency checks.
    pub fn check_eps(&self) -> &Float {
        &self.check_eps
    }

    pub fn float(&self, x: f64) -> Float {
        Float::with_val(self.bits, x)
    }

    pub fn int(&self, x: i64) -> Float {
        Float::with_val(self.bits, x)
    }

    pub fn pow10(&self, e: i32) -> Float {
        let ten = Float::with_val(self.bits, 10);
        ten.pow(e)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits, Constant::Pi)
    }

    pub fn cx(&self, re: f64, im: f64) -> Cx {
        Cx::from_f64(self.bits, re, im)
    }

    pub fn zero(&self) -> Cx {
        Cx::zero(self.bits)
    }

    pub fn one(&self) -> Cx {
        Cx::one(self.bits)
    }

    /// 2*pi*i.
    pub fn two_pi_i(&self) -> Cx {
        let mut tp = self.pi();
        tp *= 2;
        Cx::new(Float::new(self.bits), tp)
    }

    pub fn parse_float(&self, s: &str) -> Result<Float> {
        let parsed = Float::parse(s.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(Float::with_val(self.bits, parsed))
    }
}

/// Decimal rendering of `x` with `digits` significant digits.
pub fn float_to_string(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits))
}

pub(crate) fn gcd_i128(a: i128, b: i128) -> i128 {
    rational::gcd(a, b)
}
