use rug::float::Constant;
use rug::ops::NegAssign;
use rug::Float;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Complex number over MPFR floats.
#[derive(Clone, Debug, PartialEq)]
pub struct Cx {
    pub re: Float,
    pub im: Float,
}

impl Cx {
    pub fn new(re: Float, im: Float) -> Self {
        Cx { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Cx { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Cx { re: Float::with_val(prec, 1), im: Float::new(prec) }
    }

    pub fn i(prec: u32) -> Self {
        Cx { re: Float::new(prec), im: Float::with_val(prec, 1) }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Cx { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Cx { re, im }
    }

    pub fn from_i64(prec: u32, re: i64) -> Self {
        Cx { re: Float::with_val(prec, re), im: Float::new(prec) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Cx { re: Float::with_val(prec, &self.re), im: Float::with_val(prec, &self.im) }
    }

    pub fn conj(&self) -> Self {
        Cx { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Float {
        let mut n = Float::with_val(self.prec(), &self.re * &self.re);
        n += &self.im * &self.im;
        n
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn mul_real(&self, r: &Float) -> Self {
        let p = self.prec();
        Cx { re: Float::with_val(p, &self.re * r), im: Float::with_val(p, &self.im * r) }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.re *= k;
        out.im *= k;
        out
    }

    /// Multiplication by i.
    pub fn mul_i(&self) -> Self {
        Cx { re: -self.im.clone(), im: self.re.clone() }
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        let p = self.prec();
        Cx { re: Float::with_val(p, &self.re / &n), im: -Float::with_val(p, &self.im / &n) }
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let e = Float::with_val(p, self.re.exp_ref());
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        Cx { re: Float::with_val(p, &e * &c), im: Float::with_val(p, &e * &s) }
    }

    /// e(z) = exp(2*pi*i*z).
    pub fn e2pi(&self) -> Self {
        let p = self.prec();
        let mut tp = Float::with_val(p, Constant::Pi);
        tp *= 2;
        Cx { re: -Float::with_val(p, &self.im * &tp), im: Float::with_val(p, &self.re * &tp) }.exp()
    }

    /// Principal natural logarithm.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        let r = self.abs();
        Cx { re: r.ln(), im: Float::with_val(p, self.im.atan2_ref(&self.re)) }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return Cx::zero(p);
        }
        let r = self.abs();
        let mut t = Float::with_val(p, &r + &self.re.clone().abs());
        t /= 2;
        let t = t.sqrt();
        let half = Float::with_val(p, &self.im / &t) / 2u32;
        if self.re >= 0 {
            Cx { re: t, im: half }
        } else if self.im >= 0 {
            Cx { re: half.abs(), im: t }
        } else {
            Cx { re: half.abs(), im: -t }
        }
    }

    pub fn to_c64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Fused `self += a * b`.
    pub fn add_mul(&mut self, a: &Cx, b: &Cx) {
        self.re += &a.re * &b.re;
        self.re -= &a.im * &b.im;
        self.im += &a.re * &b.im;
        self.im += &a.im * &b.re;
    }

    pub fn dist(&self, other: &Cx) -> Float {
        (self - other).abs()
    }
}

impl Add for &Cx {
    type Output = Cx;
    fn add(self, o: &Cx) -> Cx {
        let p = self.prec();
        Cx { re: Float::with_val(p, &self.re + &o.re), im: Float::with_val(p, &self.im + &o.im) }
    }
}

impl Sub for &Cx {
    type Output = Cx;
    fn sub(self, o: &Cx) -> Cx {
        let p = self.prec();
        Cx { re: Float::with_val(p, &self.re - &o.re), im: Float::with_val(p, &self.im - &o.im) }
    }
}

impl Mul for &Cx {
    type Output = Cx;
    fn mul(self, o: &Cx) -> Cx {
        let p = self.prec();
        let mut re = Float::with_val(p, &self.re * &o.re);
        re -= &self.im * &o.im;
        let mut im = Float::with_val(p, &self.re * &o.im);
        im += &self.im * &o.re;
        Cx { re, im }
    }
}

impl Div for &Cx {
    type Output = Cx;
    fn div(self, o: &Cx) -> Cx {
        let p = self.prec();
        let n = o.norm_sqr();
        let mut re = Float::with_val(p, &self.re * &o.re);
        re += &self.im * &o.im;
        let mut im = Float::with_val(p, &self.im * &o.re);
        im -= &self.re * &o.im;
        re /= &n;
        im /= &n;
        Cx { re, im }
    }
}

impl Neg for &Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Neg for Cx {
    type Output = Cx;
    fn neg(mut self) -> Cx {
        self.re.neg_assign();
        self.im.neg_assign();
        self
    }
}

impl AddAssign<&Cx> for Cx {
    fn add_assign(&mut self, o: &Cx) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&Cx> for Cx {
    fn sub_assign(&mut self, o: &Cx) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&Cx> for Cx {
    fn mul_assign(&mut self, o: &Cx) {
        *self = &*self * o;
    }
}

impl std::fmt::Display for Cx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let d = f.precision().unwrap_or(20);
        write!(
            f,
            "({}, {})",
            super::float_to_string(&self.re, d),
            super::float_to_string(&self.im, d)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_agrees_with_f64() {
        let a = Cx::from_f64(128, 1.5, -2.0);
        let b = Cx::from_f64(128, -0.25, 3.0);
        let (re, im) = (&a * &b).to_c64();
        assert!((re - 5.625).abs() < 1e-15 && (im - 5.0).abs() < 1e-15);
        let q = &(&a * &b) / &b;
        assert!(q.dist(&a).to_f64() < 1e-30);
        let s = a.sqrt();
        assert!((&s * &s).dist(&a).to_f64() < 1e-30);
        let l = a.ln().exp();
        assert!(l.dist(&a).to_f64() < 1e-30);
    }

    #[test]
    fn e2pi_of_quarter_is_i() {
        let z = Cx::from_f64(200, 0.25, 0.0).e2pi();
        assert!(z.dist(&Cx::i(200)).to_f64() < 1e-50);
    }

    #[test]
    fn sqrt_branch_on_negative_axis() {
        for (re, im) in [(-4.0, 0.0), (-4.0, -1e-30), (3.0, -4.0), (-3.0, 4.0)] {
            let z = Cx::from_f64(128, re, im);
            let s = z.sqrt();
            assert!(s.re >= 0);
            assert!((&s * &s).dist(&z).to_f64() < 1e-30);
        }
    }
}
