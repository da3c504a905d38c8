use crate::error::{Error, Result};
use rug::Float;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Exact rational p/q in lowest terms with q > 0.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

pub(crate) fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rational {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Rational { num: s * num / g, den: s * den / g }
    }

    pub const fn integer(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const HALF: Rational = Rational { num: 1, den: 2 };

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_float(&self, prec: u32) -> Float {
        Float::with_val(prec, self.num) / Float::with_val(prec, self.den)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p: i128 = p.trim().parse().map_err(|_| bad())?;
                let q: i128 = q.trim().parse().map_err(|_| bad())?;
                if q == 0 {
                    return Err(bad());
                }
                Ok(Rational::new(p, q))
            }
            None => Ok(Rational::integer(s.parse().map_err(|_| bad())?)),
        }
    }
}

impl std::ops::Add for Rational {
    type Output = Rational;
    fn add(self, o: Rational) -> Rational {
        Rational::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }
}

impl std::ops::Sub for Rational {
    type Output = Rational;
    fn sub(self, o: Rational) -> Rational {
        Rational::new(self.num * o.den - o.num * self.den, self.den * o.den)
    }
}

impl std::ops::Mul for Rational {
    type Output = Rational;
    fn mul(self, o: Rational) -> Rational {
        Rational::new(self.num * o.num, self.den * o.den)
    }
}

impl std::ops::Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational { num: -self.num, den: self.den }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Rational::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// First continued-fraction convergent p/q of `x` with q <= `max_den` and
/// |x - p/q| <= `tol`.
pub fn rational_reconstruct(x: &Float, max_den: u64, tol: &Float) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let prec = x.prec().max(64);
    let max_den = max_den as i128;
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut y = Float::with_val(prec, x);
    let cutoff = Float::with_val(prec, 1) >> (prec as i32 - 8);
    for _ in 0..256 {
        let a_f = Float::with_val(prec, y.floor_ref());
        let a = a_f.to_integer()?.to_i128()?;
        let p = a.checked_mul(p1)?.checked_add(p0)?;
        let q = a.checked_mul(q1)?.checked_add(q0)?;
        if q > max_den {
            return None;
        }
        let qf = Float::with_val(prec, q);
        let mut err = Float::with_val(prec, x * &qf);
        err -= Float::with_val(prec, p);
        err /= &qf;
        if err.abs() <= *tol {
            return Some(Rational::new(p, q));
        }
        (p0, q0, p1, q1) = (p1, q1, p, q);
        let frac = Float::with_val(prec, &y - &a_f);
        if frac <= cutoff {
            return None;
        }
        y = frac.recip();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rug::float::Constant;

    #[test]
    fn recognizes_minus_seven_hundred_one_fifths() {
        let x = Float::with_val(200, -701) / 5u32;
        let tol = Float::with_val(200, 1e-20);
        assert_eq!(rational_reconstruct(&x, 10, &tol), Some(Rational::new(-701, 5)));
    }

    #[test]
    fn pi_has_no_small_fraction() {
        let pi = Float::with_val(200, Constant::Pi);
        let tol = Float::with_val(200, 1e-12);
        assert_eq!(rational_reconstruct(&pi, 50, &tol), None);
        // exhaustive oracle
        let pif = pi.to_f64();
        for q in 1..=50i64 {
            let p = (pif * q as f64).round();
            assert!((pif - p / q as f64).abs() > 1e-12);
        }
    }

    #[test]
    fn half_of_sum_from_fixture() {
        let x = Float::with_val(200, 0.5) + Float::with_val(200, 1e-45);
        let tol = Float::with_val(200, 1e-30);
        assert_eq!(rational_reconstruct(&x, 1000, &tol), Some(Rational::HALF));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(Rational::parse("-6/4").unwrap().to_string(), "-3/2");
        assert_eq!(Rational::parse(" 7 ").unwrap(), Rational::integer(7));
        assert!(Rational::parse("1/0").is_err());
    }

    proptest! {
        #[test]
        fn perturbed_fraction_is_recovered(p in -100_000i64..100_000, q in 1i64..1000, s in -1.0f64..1.0) {
            let max_den = 1000u64;
            let tol = Float::with_val(256, 1e-9);
            let exact = Float::with_val(256, p) / q;
            let x = exact + Float::with_val(256, s * 0.5e-9);
            prop_assert_eq!(rational_reconstruct(&x, max_den, &tol), Some(Rational::new(p as i128, q as i128)));
        }
    }
}
