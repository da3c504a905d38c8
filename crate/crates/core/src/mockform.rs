//! Kleinian mock modular forms: zeta_hat composed with the Eichler integrals,
//! their meromorphic parts, Fourier coefficients and Atkin-Lehner images.

use crate::error::{Error, Result};
use crate::kleinian::{zeta_hat, KleinianContext};
use crate::newforms::{EmbeddedOrbit, NewformOrbit};
use crate::numerics::{float_to_string, rational_reconstruct, CMatrix, Cx, PrecisionContext, Rational};
use crate::par::{self, Execution};
use crate::periods::{self, compute_period_data, ext_gcd, BasisMode, HomologyFixture, PeriodData};
use crate::theta::Characteristic;
use rug::Float;
use serde_json::json;

/// Default horocycle height for coefficient extraction.
pub const DEFAULT_Y0: f64 = 0.35;
/// Offset of the second horocycle used for the consistency check.
pub const SECOND_HEIGHT_OFFSET: f64 = 0.25;

/// Everything needed to build a session; kept so that a session can be
/// rebuilt at higher precision.
#[derive(Clone, Debug)]
pub struct SessionConfig {
    pub digits: u32,
    pub basis: BasisMode,
    pub characteristic: Option<Characteristic>,
    pub fixture: Option<HomologyFixture>,
    pub execution: Execution,
}

impl SessionConfig {
    pub fn new(digits: u32) -> Self {
        SessionConfig { digits, basis: BasisMode::Fixture, characteristic: None, fixture: None, execution: Execution::default() }
    }
}

/// A newform orbit with its period lattice and Kleinian context, immutable once built.
#[derive(Clone, Debug)]
pub struct MockFormSession {
    pub source: NewformOrbit,
    pub config: SessionConfig,
    pub ctx: PrecisionContext,
    pub orbit: EmbeddedOrbit,
    pub periods: PeriodData,
    pub kctx: KleinianContext,
}

impl MockFormSession {
    pub fn build(source: &NewformOrbit, config: &SessionConfig) -> Result<Self> {
        let ctx = PrecisionContext::new(config.digits)?;
        let mut config = config.clone();
        if config.basis == BasisMode::Fixture && config.fixture.is_none() {
            config.fixture = Some(HomologyFixture::bundled(&source.label).ok_or_else(|| {
                Error::InvalidArgument(format!("no homology fixture for {}; use the auto basis", source.label))
            })?);
        }
        let orbit = source.embed(&ctx)?;
        let periods = compute_period_data(&orbit, config.basis, config.fixture.as_ref(), &ctx, config.execution)?;
        let ch = match (&config.characteristic, config.fixture.as_ref().and_then(|f| f.characteristic.clone())) {
            (Some(c), _) => c.clone(),
            (None, Some(c)) if config.basis == BasisMode::Fixture => c,
            _ if orbit.genus() == 1 => Characteristic::new(vec![Rational::HALF], vec![Rational::HALF])?,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "no default characteristic for {}; pass one explicitly",
                    source.label
                )))
            }
        };
        config.characteristic = Some(ch.clone());
        let kctx = KleinianContext::new(&periods, ch, None, &ctx)?;
        Ok(MockFormSession { source: source.clone(), config, ctx, orbit, periods, kctx })
    }

    /// The same session at a different precision.
    pub fn with_digits(&self, digits: u32) -> Result<Self> {
        let mut cfg = self.config.clone();
        cfg.digits = digits;
        Self::build(&self.source, &cfg)
    }

    pub fn label(&self) -> &str {
        &self.source.label
    }

    pub fn genus(&self) -> usize {
        self.orbit.genus()
    }

    pub fn level(&self) -> u64 {
        self.orbit.level
    }

    pub fn characteristic(&self) -> &Characteristic {
        &self.kctx.characteristic
    }

    pub fn digits(&self) -> u32 {
        self.ctx.digits()
    }
}

/// Vector of Eichler integrals at tau.
pub fn eichler_vector(tau: &Cx, s: &MockFormSession) -> Result<Vec<Cx>> {
    periods::eichler_vector(&s.orbit, tau, &s.ctx)
}

/// Harmonic Maass form zeta_hat(E(tau)), a row vector.
pub fn zhat_v(tau: &Cx, s: &MockFormSession) -> Result<Vec<Cx>> {
    zeta_hat(&eichler_vector(tau, s)?, &s.kctx, &s.ctx)
}

fn add_antiholomorphic(z: &[Cx], u: &[Cx], s: &MockFormSession) -> Vec<Cx> {
    let pi = s.ctx.pi();
    let ubar: Vec<Cx> = u.iter().map(Cx::conj).collect();
    let corr = CMatrix::vec_mul(&ubar, &s.kctx.pt_inv);
    z.iter().zip(&corr).map(|(a, b)| a + &b.mul_real(&pi)).collect()
}

/// Meromorphic part: zhat_V(tau) + pi conj(E(tau))^tr (P^tr)^{-1}.
pub fn mero_part(tau: &Cx, s: &MockFormSession) -> Result<Vec<Cx>> {
    let u = eichler_vector(tau, s)?;
    let z = zeta_hat(&u, &s.kctx, &s.ctx)?;
    Ok(add_antiholomorphic(&z, &u, s))
}

fn normalize(m: &[Cx], s: &MockFormSession) -> Vec<Cx> {
    // -mero . P^tr / (4 pi^2); P^tr = omega Im(Omega) conj(omega)^tr
    let pt = s.kctx.p_matrix.transpose();
    let mut four_pi2 = s.ctx.pi();
    four_pi2.square_mut();
    four_pi2 *= -4;
    CMatrix::vec_mul(m, &pt).iter().map(|z| z.mul_real(&Float::with_val(s.ctx.bits(), four_pi2.recip_ref()))).collect()
}

/// Components are xi_0-preimages of the individual newforms f_j.
pub fn normalized_preimages(tau: &Cx, s: &MockFormSession) -> Result<Vec<Cx>> {
    Ok(normalize(&mero_part(tau, s)?, s))
}

/// Scalar mock modular form: the sum of the meromorphic components.
pub fn scalar_zv(tau: &Cx, s: &MockFormSession) -> Result<Cx> {
    let m = mero_part(tau, s)?;
    let mut acc = Cx::zero(s.ctx.bits());
    for z in &m {
        acc += z;
    }
    Ok(acc)
}

/// Atkin-Lehner matrix W_Q = [[Q a, b], [N c, Q d]] of determinant Q.
pub fn atkin_lehner_matrix(q: u64, n: u64) -> Result<[i64; 4]> {
    if q == 0 || n % q != 0 || gcd(q, n / q) != 1 {
        return Err(Error::InvalidArgument(format!("{q} is not an exact divisor of {n}")));
    }
    let (qi, m) = (q as i64, (n / q) as i64);
    // Q x - m y = 1
    let (_, x, y) = ext_gcd(qi, m);
    let (a, b) = (x, -y);
    Ok([qi * a, b, n as i64, qi])
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn mobius(m: &[i64; 4], tau: &Cx) -> Cx {
    let p = tau.prec();
    let num = &tau.mul_i64(m[0]) + &Cx::from_i64(p, m[1]);
    let den = &tau.mul_i64(m[2]) + &Cx::from_i64(p, m[3]);
    &num / &den
}

fn al_sign(q: u64, s: &MockFormSession) -> Result<i8> {
    if q == 1 {
        return Ok(1);
    }
    s.source
        .al_sign(q)
        .ok_or_else(|| Error::InvalidArgument(format!("no Atkin-Lehner sign for Q = {q} in {}", s.label())))
}

fn l_value_at(w: &[i64; 4], lambda: i8, tau0: &Cx, s: &MockFormSession) -> Result<Vec<Cx>> {
    let winv = [w[3], -w[1], -w[2], w[0]];
    let a = eichler_vector(&mobius(&winv, tau0), s)?;
    let b = eichler_vector(tau0, s)?;
    Ok(a.iter().zip(&b).map(|(x, y)| x - &y.mul_i64(lambda as i64)).collect())
}

/// L_Q = E(W_Q^{-1} infinity), computed as E(W_Q^{-1} tau_0) - lambda_Q E(tau_0).
///
/// tau_0 = A/C + i sqrt(Q)/C balances the two imaginary parts; a second base
/// point checks the independence of tau_0.
pub fn al_l_value(q: u64, s: &MockFormSession) -> Result<Vec<Cx>> {
    if q == 1 {
        return Ok(vec![s.ctx.zero(); s.genus()]);
    }
    let w = atkin_lehner_matrix(q, s.level())?;
    let lambda = al_sign(q, s)?;
    let p = s.ctx.bits();
    let c = Float::with_val(p, w[2]);
    let re = Float::with_val(p, w[0]) / &c;
    let height = Float::with_val(p, q).sqrt() / &c;
    let tau0 = Cx::new(re.clone(), height.clone());
    let l = l_value_at(&w, lambda, &tau0, s)?;
    let tau1 = Cx::new(re, height * s.ctx.float(1.125));
    let l1 = l_value_at(&w, lambda, &tau1, s)?;
    let scale = l.iter().map(Cx::abs_f64).fold(1.0, f64::max);
    let tol = Float::with_val(p, s.ctx.eps() * (4.0 * scale));
    for (x, y) in l.iter().zip(&l1) {
        if x.dist(y) > tol {
            return Err(Error::InvariantViolation(format!(
                "L_{q} depends on the base point; is the Atkin-Lehner sign {lambda} right?"
            )));
        }
    }
    Ok(l)
}

/// Meromorphic part of zhat_V | W_Q, i.e. of tau -> zeta_hat(lambda (E(tau) - L_Q)).
fn al_mero(tau: &Cx, lambda: i8, l: &[Cx], s: &MockFormSession) -> Result<Vec<Cx>> {
    let e = eichler_vector(tau, s)?;
    let w: Vec<Cx> = e.iter().zip(l).map(|(x, y)| (x - y).mul_i64(lambda as i64)).collect();
    let z = zeta_hat(&w, &s.kctx, &s.ctx)?;
    Ok(add_antiholomorphic(&z, &w, s))
}

/// Function whose q-expansion is extracted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// The scalar form z_V.
    Scalar,
    /// Component k of the meromorphic part.
    Mero(usize),
    /// Component k of the normalized preimages.
    Normalized(usize),
    /// Component k of the meromorphic part of zhat_V | W_Q.
    AlImage { q: u64, component: usize },
    /// Component k of mero_part + (mero_part | W_Q).
    AlSum { q: u64, component: usize },
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Target::Scalar => write!(f, "scalar"),
            Target::Mero(k) => write!(f, "mero {k}"),
            Target::Normalized(k) => write!(f, "component {k}"),
            Target::AlImage { q, component } => write!(f, "al-image {q} {component}"),
            Target::AlSum { q, component } => write!(f, "al {q} {component}"),
        }
    }
}

impl Target {
    fn component(&self) -> Option<usize> {
        match *self {
            Target::Scalar => None,
            Target::Mero(k) | Target::Normalized(k) => Some(k),
            Target::AlImage { component, .. } | Target::AlSum { component, .. } => Some(component),
        }
    }

    fn al_q(&self) -> Option<u64> {
        match *self {
            Target::AlImage { q, .. } | Target::AlSum { q, .. } => Some(q),
            _ => None,
        }
    }
}

/// Evaluates a target at tau; `l` carries (lambda_Q, L_Q) for Atkin-Lehner targets.
pub fn evaluate_target(target: Target, tau: &Cx, s: &MockFormSession, al: Option<&(i8, Vec<Cx>)>) -> Result<Cx> {
    if let Some(k) = target.component() {
        if k >= s.genus() {
            return Err(Error::InvalidArgument(format!("component {k} out of range for genus {}", s.genus())));
        }
    }
    let need_al = || al.ok_or_else(|| Error::InvalidArgument("Atkin-Lehner data missing".into()));
    Ok(match target {
        Target::Scalar => scalar_zv(tau, s)?,
        Target::Mero(k) => mero_part(tau, s)?.swap_remove(k),
        Target::Normalized(k) => normalized_preimages(tau, s)?.swap_remove(k),
        Target::AlImage { component, .. } => {
            let (lam, l) = need_al()?;
            al_mero(tau, *lam, l, s)?.swap_remove(component)
        }
        Target::AlSum { component, .. } => {
            let (lam, l) = need_al()?;
            let a = mero_part(tau, s)?;
            let b = al_mero(tau, *lam, l, s)?;
            &a[component] + &b[component]
        }
    })
}

/// One recognized-or-not Fourier coefficient.
#[derive(Clone, Debug)]
pub struct CoefficientEntry {
    pub n: i64,
    pub value: Cx,
    pub rational: Option<Rational>,
}

/// Fourier coefficients c_{-1}, ..., c_{n_out} of a target.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    pub label: String,
    pub characteristic: String,
    pub basis_mode: String,
    pub target: String,
    pub y0: f64,
    pub samples: usize,
    /// Decimal digits the values are reported to.
    pub digits: u32,
    /// Largest scaled disagreement between the two horocycles.
    pub consistency: f64,
    pub entries: Vec<CoefficientEntry>,
}

impl CoefficientTable {
    pub fn get(&self, n: i64) -> Option<&CoefficientEntry> {
        self.entries.iter().find(|e| e.n == n)
    }

    pub fn value(&self, n: i64) -> Option<&Cx> {
        self.get(n).map(|e| &e.value)
    }

    pub fn recognized(&self) -> Vec<(i64, Rational)> {
        self.entries.iter().filter_map(|e| e.rational.map(|r| (e.n, r))).collect()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let d = self.digits as usize;
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|e| {
                json!({
                    "n": e.n,
                    "re": float_to_string(&e.value.re, d),
                    "im": float_to_string(&e.value.im, d),
                    "rational": e.rational.map(|r| r.to_string()),
                })
            })
            .collect();
        json!({
            "label": self.label,
            "characteristic": self.characteristic,
            "basis_mode": self.basis_mode,
            "target": self.target,
            "y0": self.y0,
            "samples": self.samples,
            "digits": self.digits,
            "consistency": self.consistency,
            "entries": entries,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("table serializes")
    }

    /// Human-readable listing, one coefficient per line.
    pub fn to_text(&self, shown_digits: usize) -> String {
        let mut out = format!(
            "# {} target={} char={} basis={} y0={} M={} consistency={:.1e}\n",
            self.label, self.target, self.characteristic, self.basis_mode, self.y0, self.samples, self.consistency
        );
        for e in &self.entries {
            let im = if e.value.im.clone().abs() < Float::with_val(53, 10f64.powi(-(shown_digits as i32))) {
                String::new()
            } else {
                format!("  {}i", float_to_string(&e.value.im, shown_digits))
            };
            let r = e.rational.map(|r| format!("  = {r}")).unwrap_or_default();
            out.push_str(&format!("{:>5}  {}{}{}\n", e.n, float_to_string(&e.value.re, shown_digits), im, r));
        }
        out
    }
}

/// Number of horocycle samples for n_out coefficients.
pub fn sample_count(n_out: usize) -> usize {
    (2 * n_out + 4).next_power_of_two().max(64)
}

/// Working digits so that e^{2 pi n y} amplification still leaves D + 10 digits.
pub fn required_digits(digits: u32, n_out: usize, y0: f64) -> u32 {
    let y = y0 + SECOND_HEIGHT_OFFSET;
    digits + (2.0 * std::f64::consts::PI * n_out as f64 * y / std::f64::consts::LN_10).ceil() as u32 + 10
}

/// DFT of samples F(k/M + i y) into c_{-1}, ..., c_{n_out}.
pub fn dft_coefficients(samples: &[Cx], n_out: usize, y: &Float, ctx: &PrecisionContext) -> Vec<Cx> {
    let m = samples.len();
    let p = ctx.bits();
    let roots: Vec<Cx> = (0..m)
        .map(|j| Cx::new(Float::with_val(p, -(j as i64)) / m as u32, Float::new(p)).e2pi())
        .collect();
    let two_pi_y = Float::with_val(p, ctx.pi() * 2u32) * y;
    (-1..=n_out as i64)
        .map(|n| {
            let mut acc = Cx::zero(p);
            for (k, f) in samples.iter().enumerate() {
                let idx = ((k as i64 * n).rem_euclid(m as i64)) as usize;
                acc.add_mul(f, &roots[idx]);
            }
            let scale = Float::with_val(p, &two_pi_y * n).exp() / m as u32;
            acc.mul_real(&scale)
        })
        .collect()
}

/// Samples of f along the horocycle at height y.
pub fn horocycle_samples<F>(f: &F, m: usize, y: &Float, ctx: &PrecisionContext, exec: Execution) -> Result<Vec<Cx>>
where
    F: Fn(&Cx) -> Result<Cx> + Sync + Send,
{
    let p = ctx.bits();
    par::try_map_range(exec, m, |k| {
        let tau = Cx::new(Float::with_val(p, k as u32) / m as u32, y.clone());
        f(&tau).map_err(|e| match e {
            Error::NearThetaDivisor(_) => Error::PoleOnHorocycle(y.to_f64()),
            other => other,
        })
    })
}

/// Coefficients of f at two heights; returns the first set and the largest
/// disagreement scaled by max(1, |c_n|).
pub fn extract_two_heights<F>(
    f: &F,
    n_out: usize,
    y0: f64,
    ctx: &PrecisionContext,
    exec: Execution,
) -> Result<(Vec<Cx>, f64, usize)>
where
    F: Fn(&Cx) -> Result<Cx> + Sync + Send,
{
    let m = sample_count(n_out);
    let ya = ctx.float(y0);
    let yb = ctx.float(y0 + SECOND_HEIGHT_OFFSET);
    let a = dft_coefficients(&horocycle_samples(f, m, &ya, ctx, exec)?, n_out, &ya, ctx);
    let b = dft_coefficients(&horocycle_samples(f, m, &yb, ctx, exec)?, n_out, &yb, ctx);
    let worst = a
        .iter()
        .zip(&b)
        .map(|(x, y)| x.dist(y).to_f64() / x.abs_f64().max(1.0))
        .fold(0.0, f64::max);
    Ok((a, worst, m))
}

fn recognize(z: &Cx, max_den: u64, tol: &Float) -> Option<Rational> {
    if z.im.clone().abs() > *tol {
        return None;
    }
    rational_reconstruct(&z.re, max_den, tol)
}

/// Fourier coefficients c_{-1..n_out} of a target, with rationals recognized,
/// reported to the precision of the session.
///
/// The session is rebuilt at the working precision when needed.
pub fn fourier_extract(s: &MockFormSession, target: Target, n_out: usize, y0: f64) -> Result<CoefficientTable> {
    fourier_extract_to(s, target, n_out, y0, s.digits())
}

/// As [`fourier_extract`], reported to `digits` digits; a session that already
/// carries the working precision is used as is.
pub fn fourier_extract_to(
    s: &MockFormSession,
    target: Target,
    n_out: usize,
    y0: f64,
    digits: u32,
) -> Result<CoefficientTable> {
    if !(y0 > 0.0) {
        return Err(Error::InvalidArgument(format!("horocycle height {y0} must be positive")));
    }
    let out_ctx = PrecisionContext::new(digits)?;
    let need = required_digits(digits, n_out, y0);
    let rebuilt;
    let w = if s.digits() >= need {
        s
    } else {
        rebuilt = s.with_digits(need)?;
        &rebuilt
    };
    let al = match target.al_q() {
        Some(q) => Some((al_sign(q, w)?, al_l_value(q, w)?)),
        None => None,
    };
    let f = |tau: &Cx| evaluate_target(target, tau, w, al.as_ref());
    let (coeffs, consistency, m) = extract_two_heights(&f, n_out, y0, &w.ctx, w.config.execution)?;
    let tol_digits = digits as i32 / 4;
    if consistency > 10f64.powi(-tol_digits) {
        return Err(Error::InconsistentExtraction(consistency));
    }
    let tol = out_ctx.pow10(-tol_digits);
    let max_den = 4 * n_out.max(1) as u64;
    let entries = coeffs
        .into_iter()
        .zip(-1i64..)
        .map(|(value, n)| {
            let rational = recognize(&value, max_den, &tol);
            CoefficientEntry { n, value: value.with_prec(out_ctx.bits()), rational }
        })
        .collect();
    Ok(CoefficientTable {
        label: s.label().to_string(),
        characteristic: s.characteristic().to_string(),
        basis_mode: s.config.basis.to_string(),
        target: target.to_string(),
        y0,
        samples: m,
        digits,
        consistency,
        entries,
    })
}

/// Per-component tables of the meromorphic part of zhat_V | W_Q.
pub fn al_expansion(q: u64, s: &MockFormSession, n_out: usize, y0: f64) -> Result<Vec<CoefficientTable>> {
    (0..s.genus()).map(|k| fourier_extract(s, Target::AlImage { q, component: k }, n_out, y0)).collect()
}
