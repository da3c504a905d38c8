use crate::error::{Error, Result};
use crate::numerics::{Cx, PrecisionContext};
use rug::Float;

/// Exact integer q-series sum_{n >= n_min} c_n q^n, truncated at `n_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerSeries {
    pub n_min: i64,
    pub coeffs: Vec<i128>,
}

impl IntegerSeries {
    pub fn n_max(&self) -> i64 {
        self.n_min + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, n: i64) -> i128 {
        if n < self.n_min || n > self.n_max() {
            0
        } else {
            self.coeffs[(n - self.n_min) as usize]
        }
    }
}

/// Sparse expansion of prod_{n >= 1} (1 - q^{d n}) up to degree `max_deg`,
/// by the pentagonal number theorem.
fn euler_product_sparse(d: u64, max_deg: u64) -> Vec<(u64, i128)> {
    let mut out = vec![(0u64, 1i128)];
    for k in 1u64.. {
        let g1 = k * (3 * k - 1) / 2 * d;
        let g2 = k * (3 * k + 1) / 2 * d;
        if g1 > max_deg {
            break;
        }
        let s = if k % 2 == 1 { -1 } else { 1 };
        out.push((g1, s));
        if g2 <= max_deg {
            out.push((g2, s));
        }
    }
    out
}

/// q-expansion of prod eta(d tau)^e through q^{n_max}.
///
/// Each factor is expanded with the pentagonal number theorem; negative
/// exponents divide by the (unit constant term) Euler product.
pub fn eta_product(factors: &[(u64, i32)], n_max: i64) -> Result<IntegerSeries> {
    let weight24: i64 = factors.iter().map(|&(d, e)| d as i64 * e as i64).sum();
    if weight24 < 0 || weight24 % 24 != 0 {
        return Err(Error::NonIntegralLeadingExponent(weight24));
    }
    if factors.iter().any(|&(d, _)| d == 0) {
        return Err(Error::InvalidArgument("eta factor with d = 0".into()));
    }
    let lead = weight24 / 24;
    if n_max < lead {
        return Ok(IntegerSeries { n_min: lead, coeffs: Vec::new() });
    }
    let len = (n_max - lead + 1) as usize;
    let max_deg = (len - 1) as u64;
    let mut p = vec![0i128; len];
    p[0] = 1;
    let ovf = || Error::InvariantViolation("coefficient overflow in eta product".into());
    for &(d, e) in factors {
        let sparse = euler_product_sparse(d, max_deg);
        for _ in 0..e.unsigned_abs() {
            if e > 0 {
                for n in (0..len).rev() {
                    let mut acc = 0i128;
                    for &(k, s) in &sparse {
                        let k = k as usize;
                        if k > n {
                            break;
                        }
                        acc = acc.checked_add(s * p[n - k]).ok_or_else(ovf)?;
                    }
                    p[n] = acc;
                }
            } else {
                for n in 0..len {
                    let mut acc = p[n];
                    for &(k, s) in sparse.iter().skip(1) {
                        let k = k as usize;
                        if k > n {
                            break;
                        }
                        acc = acc.checked_sub(s.checked_mul(p[n - k]).ok_or_else(ovf)?).ok_or_else(ovf)?;
                    }
                    p[n] = acc;
                }
            }
        }
    }
    Ok(IntegerSeries { n_min: lead, coeffs: p })
}

/// Complex q-series sum_{n >= n_min} c_n q^n with a tail envelope
/// |c_n| <= C n^{3/2} calibrated on the stored coefficients.
#[derive(Clone, Debug)]
pub struct QSeries {
    n_min: i64,
    coeffs: Vec<Cx>,
    tail_c: f64,
}

impl QSeries {
    pub fn new(n_min: i64, coeffs: Vec<Cx>) -> Self {
        let mut tail_c: f64 = 0.0;
        for (k, c) in coeffs.iter().enumerate() {
            let n = n_min + k as i64;
            if n >= 1 {
                tail_c = tail_c.max(c.abs_f64() / (n as f64).powf(1.5));
            }
        }
        QSeries { n_min, coeffs, tail_c: tail_c.max(1e-300) * 2.0 }
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, n: i64) -> Option<&Cx> {
        if n < self.n_min {
            return None;
        }
        self.coeffs.get((n - self.n_min) as usize)
    }

    pub fn coeffs(&self) -> &[Cx] {
        &self.coeffs
    }

    /// Applies q d/dq, i.e. c_n -> n c_n.
    pub fn theta_operator(&self) -> QSeries {
        let coeffs =
            self.coeffs.iter().enumerate().map(|(k, c)| c.mul_i64(self.n_min + k as i64)).collect();
        QSeries::new(self.n_min, coeffs)
    }

    /// Number of terms beyond which the tail at |q| = exp(-2 pi y) is below `target`.
    pub fn terms_needed(&self, y: f64, target_log10: f64) -> usize {
        terms_for_tail(self.tail_c, y, target_log10)
    }
}

/// Smallest K with C * sum_{n > K} n^{3/2} r^n < 10^target_log10, r = exp(-2 pi y).
pub fn terms_for_tail(c: f64, y: f64, target_log10: f64) -> usize {
    if y <= 0.0 {
        return usize::MAX;
    }
    let log_r = -2.0 * std::f64::consts::PI * y;
    let target = target_log10 * std::f64::consts::LN_10 - c.ln();
    // rough start, then walk
    let mut k = ((-target) / (-log_r)).max(1.0) as usize;
    let bound = |k: usize| -> f64 {
        let kp = (k + 1) as f64;
        let ratio = log_r + 1.5 * (1.0 + 1.0 / kp).ln();
        if ratio >= 0.0 {
            return f64::INFINITY;
        }
        1.5 * kp.ln() + kp * log_r - (1.0 - ratio.exp()).ln()
    };
    while k > 1 && bound(k - 1) < target {
        k /= 2;
    }
    while bound(k) >= target {
        k = if k < 1024 { k + 1 } else { k + k / 64 };
        if k > 1 << 40 {
            return usize::MAX;
        }
    }
    k
}

/// sum_n (a_n / n) q^n for a cusp form with coefficients a_n, n >= 1.
pub fn eichler_series(f: &QSeries) -> Result<QSeries> {
    if f.n_min() < 1 {
        return Err(Error::InvalidArgument("Eichler integral needs a cusp form".into()));
    }
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let n = f.n_min() + k as i64;
            let nf = Float::with_val(c.prec(), n);
            Cx::new(Float::with_val(c.prec(), &c.re / &nf), Float::with_val(c.prec(), &c.im / &nf))
        })
        .collect();
    Ok(QSeries::new(f.n_min(), coeffs))
}

/// Sum of the series at tau (Im tau > 0) with certified truncation: the
/// discarded tail is below 10^-D.
pub fn evaluate(series: &QSeries, tau: &Cx, ctx: &PrecisionContext) -> Result<Cx> {
    let y = tau.im.to_f64();
    if !(y > 0.0) {
        return Err(Error::InvalidArgument("evaluation point must lie in the upper half plane".into()));
    }
    let k = series.terms_needed(y, -(ctx.digits() as f64) - 1.0);
    let n_top = series.n_min() + k as i64;
    if n_top > series.n_max() {
        return Err(Error::InsufficientTerms {
            needed: n_top.max(0) as usize,
            available: series.n_max().max(0) as usize,
        });
    }
    let q = tau.with_prec(ctx.bits()).e2pi();
    let upto = (n_top - series.n_min()) as usize;
    let cs = &series.coeffs()[..=upto];
    let mut acc = Cx::zero(ctx.bits());
    for c in cs.iter().rev() {
        acc = &acc * &q;
        acc += c;
    }
    if series.n_min() != 0 {
        let base = if series.n_min() > 0 { q } else { q.recip() };
        let mut pw = Cx::one(ctx.bits());
        for _ in 0..series.n_min().unsigned_abs() {
            pw = &pw * &base;
        }
        acc = &acc * &pw;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Naive product of the factors (1 - q^{dn})^e, an independent oracle.
    fn naive_eta(factors: &[(u64, i32)], n_max: usize) -> Vec<i128> {
        let mut p = vec![0i128; n_max + 1];
        p[0] = 1;
        for &(d, e) in factors {
            for _ in 0..e {
                for m in 1..=n_max {
                    let step = d as usize * m;
                    if step > n_max {
                        break;
                    }
                    for n in (step..=n_max).rev() {
                        p[n] -= p[n - step];
                    }
                }
            }
        }
        p
    }

    #[test]
    fn level27_eta_product_matches_naive_product() {
        let s = eta_product(&[(3, 2), (9, 2)], 400).unwrap();
        assert_eq!(s.n_min, 1);
        let oracle = naive_eta(&[(3, 2), (9, 2)], 399);
        for n in 1..=400 {
            assert_eq!(s.coeff(n), oracle[(n - 1) as usize], "n = {n}");
        }
        let head: Vec<i128> = (1..=19).map(|n| s.coeff(n)).collect();
        assert_eq!(head, vec![1, 0, 0, -2, 0, 0, -1, 0, 0, 0, 0, 0, 5, 0, 0, 4, 0, 0, -7]);
    }

    #[test]
    fn ramanujan_delta() {
        let s = eta_product(&[(1, 24)], 8).unwrap();
        assert_eq!(s.coeffs, vec![1, -24, 252, -1472, 4830, -6048, -16744, 84480]);
    }

    #[test]
    fn quotient_by_eta() {
        // eta(2 tau)^2 / eta(tau) = q^{1/8} ... is rejected; eta(tau)^48/eta(tau)^24 is Delta
        let s = eta_product(&[(1, 48), (1, -24)], 6).unwrap();
        assert_eq!(s.coeffs, vec![1, -24, 252, -1472, 4830, -6048]);
    }

    #[test]
    fn non_integral_exponent_is_rejected() {
        assert!(matches!(eta_product(&[(1, 1)], 10), Err(Error::NonIntegralLeadingExponent(1))));
        assert!(matches!(eta_product(&[(1, -24)], 10), Err(Error::NonIntegralLeadingExponent(-24))));
    }

    #[test]
    fn evaluate_matches_direct_sum_at_i() {
        let ctx = PrecisionContext::new(40).unwrap();
        let s = eta_product(&[(3, 2), (9, 2)], 5000).unwrap();
        let f = QSeries::new(1, s.coeffs.iter().map(|&c| Cx::from_i64(ctx.bits(), c as i64)).collect());
        let e = eichler_series(&f).unwrap();
        let tau = ctx.cx(0.0, 1.0);
        let got = evaluate(&e, &tau, &ctx).unwrap();
        // oracle: direct forward summation of all stored terms at doubled precision
        let big = PrecisionContext::new(80).unwrap();
        let q = big.cx(0.0, 1.0).e2pi();
        let mut acc = big.zero();
        let mut pw = q.clone();
        for (k, &c) in s.coeffs.iter().enumerate() {
            if c != 0 {
                let t = pw.mul_real(&Float::with_val(big.bits(), c)).mul_real(&(big.one().re / (k as u32 + 1)));
                acc += &t;
            }
            pw = &pw * &q;
        }
        assert!(got.with_prec(big.bits()).dist(&acc) < Float::with_val(big.bits(), 2) * ctx.eps());
    }

    #[test]
    fn too_close_to_real_axis() {
        let ctx = PrecisionContext::new(40).unwrap();
        let f = QSeries::new(1, vec![ctx.one(); 1000]);
        let err = evaluate(&f, &ctx.cx(0.1, 1e-6), &ctx).unwrap_err();
        assert!(matches!(err, Error::InsufficientTerms { .. }));
    }

    #[test]
    fn theta_operator_inverts_eichler() {
        let ctx = PrecisionContext::new(30).unwrap();
        let f = QSeries::new(1, (1..50).map(|n| ctx.cx(n as f64 * 0.5 - 3.0, 1.0)).collect());
        let back = eichler_series(&f).unwrap().theta_operator();
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            assert!(a.dist(b) < *ctx.check_eps());
        }
    }
}
