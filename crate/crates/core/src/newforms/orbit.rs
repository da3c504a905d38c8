use super::qseries::{eichler_series, QSeries};
use crate::error::{Error, Result};
use crate::numerics::{Cx, PrecisionContext};
use rug::Float;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Galois orbit of a weight-2 newform on Gamma_0(N), with coefficients in
/// the power basis of its Hecke field.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NewformOrbit {
    pub label: String,
    pub level: u64,
    #[serde(default = "two")]
    pub weight: u32,
    pub degree: usize,
    /// Ascending coefficients of the monic defining polynomial.
    pub field_poly: Vec<i64>,
    /// Complex embeddings of the generator as decimal strings (re, im).
    pub embeddings: Vec<(String, String)>,
    /// Atkin-Lehner eigenvalues keyed by the prime-power divisor Q || N.
    #[serde(default)]
    pub al_signs: BTreeMap<u64, i8>,
    /// a_n for n = 1..=n_max in the power basis.
    pub an: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

fn two() -> u32 {
    2
}

/// Product in Z[x]/(f) for a monic f given by ascending coefficients.
pub(crate) fn field_mul(a: &[i128], b: &[i128], f: &[i64]) -> Vec<i128> {
    let d = f.len() - 1;
    let mut prod = vec![0i128; 2 * d.max(1) - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    for k in (d..prod.len()).rev() {
        let c = prod[k];
        if c != 0 {
            prod[k] = 0;
            for i in 0..d {
                prod[k - d + i] -= c * f[i] as i128;
            }
        }
    }
    prod.truncate(d);
    prod
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| n % p != 0)
}

impl NewformOrbit {
    pub fn from_json(s: &str) -> Result<Self> {
        let orbit: NewformOrbit = serde_json::from_str(s)?;
        orbit.validate()?;
        Ok(orbit)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn n_max(&self) -> usize {
        self.an.len()
    }

    pub fn al_sign(&self, q: u64) -> Option<i8> {
        self.al_signs.get(&q).copied()
    }

    fn a(&self, n: usize) -> Vec<i128> {
        self.an[n - 1].iter().map(|&x| x as i128).collect()
    }

    /// Structural and arithmetic checks.  Multiplicativity and the Hecke
    /// recursion at prime powers are checked exactly in the Hecke field.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvariantViolation(format!("{}: {m}", self.label)));
        if self.weight != 2 {
            return Err(Error::UnsupportedOrbit(format!("weight {} is not 2", self.weight)));
        }
        if self.level == 0 {
            return bad("level must be positive".into());
        }
        let d = self.degree;
        if d == 0 || self.field_poly.len() != d + 1 || self.field_poly[d] != 1 {
            return bad("field polynomial must be monic of the stated degree".into());
        }
        if self.embeddings.len() != d {
            return bad(format!("expected {d} embeddings, found {}", self.embeddings.len()));
        }
        if self.an.is_empty() || self.an.iter().any(|v| v.len() != d) {
            return bad("coefficient vectors must have length equal to the degree".into());
        }
        let mut one = vec![0i64; d];
        one[0] = 1;
        if self.an[0] != one {
            return bad("a_1 must be 1".into());
        }
        for (&q, &s) in &self.al_signs {
            if s != 1 && s != -1 {
                return bad(format!("Atkin-Lehner sign at {q} is {s}"));
            }
            if q == 0 || self.level % q != 0 || gcd(q, self.level / q) != 1 {
                return bad(format!("{q} is not an exact divisor of the level"));
            }
        }
        for (k, (re, im)) in self.embeddings.iter().enumerate() {
            let (Ok(re), Ok(im)) = (re.trim().parse::<f64>(), im.trim().parse::<f64>()) else {
                return Err(Error::Parse(format!("embedding {k} is not a decimal pair")));
            };
            let (mut pr, mut pi) = (0.0f64, 0.0f64);
            for &c in self.field_poly.iter().rev() {
                (pr, pi) = (pr * re - pi * im + c as f64, pr * im + pi * re);
            }
            let scale = self.field_poly.iter().map(|&c| (c as f64).abs()).sum::<f64>()
                * (1.0 + re.hypot(im)).powi(d as i32);
            if pr.hypot(pi) > 1e-9 * scale {
                return bad(format!("embedding {k} is not a root of the field polynomial"));
            }
        }
        let n_max = self.n_max();
        for m in 2..=n_max {
            let am = self.a(m);
            for n in m + 1..=n_max / m {
                if gcd(m as u64, n as u64) == 1 && field_mul(&am, &self.a(n), &self.field_poly) != self.a(m * n) {
                    return bad(format!("a_{m} a_{n} != a_{}", m * n));
                }
            }
        }
        for p in (2..=n_max).filter(|&p| is_prime(p as u64)) {
            let ap = self.a(p);
            let bad_prime = self.level % p as u64 == 0;
            let (mut prev, mut cur, mut pk) = (one.iter().map(|&x| x as i128).collect::<Vec<_>>(), ap.clone(), p);
            while pk * p <= n_max {
                let mut next = field_mul(&ap, &cur, &self.field_poly);
                if !bad_prime {
                    for (x, y) in next.iter_mut().zip(&prev) {
                        *x -= p as i128 * y;
                    }
                }
                pk *= p;
                if next != self.a(pk) {
                    return bad(format!("Hecke recursion fails at {pk}"));
                }
                prev = cur;
                cur = next;
            }
        }
        Ok(())
    }

    /// Roots of the field polynomial refined by Newton's method at the
    /// working precision, in the order of `embeddings`.
    pub fn embedding_roots(&self, ctx: &PrecisionContext) -> Result<Vec<Cx>> {
        let p = ctx.bits();
        let poly: Vec<Cx> = self.field_poly.iter().map(|&c| Cx::from_i64(p, c)).collect();
        let eval = |z: &Cx| {
            let mut v = Cx::zero(p);
            let mut dv = Cx::zero(p);
            for c in poly.iter().rev() {
                dv = &(&dv * z) + &v;
                v = &(&v * z) + c;
            }
            (v, dv)
        };
        let mut roots = Vec::with_capacity(self.degree);
        for (re, im) in &self.embeddings {
            let start = Cx::new(ctx.parse_float(re)?, ctx.parse_float(im)?);
            let mut z = start.clone();
            for _ in 0..(p as f64).log2() as usize + 8 {
                let (v, dv) = eval(&z);
                if dv.is_zero() {
                    break;
                }
                let step = &v / &dv;
                z -= &step;
                if step.abs() < Float::with_val(p, ctx.eps() * ctx.eps()) {
                    break;
                }
            }
            if eval(&z).0.abs() > *ctx.check_eps() || z.dist(&start).to_f64() > 1e-12 * (1.0 + start.abs_f64()) {
                return Err(Error::InvariantViolation(format!(
                    "{}: embedding {re} + {im} i does not refine to a root",
                    self.label
                )));
            }
            roots.push(z);
        }
        Ok(roots)
    }

    /// Complex coefficients of every embedded newform.
    pub fn embed(&self, ctx: &PrecisionContext) -> Result<EmbeddedOrbit> {
        let roots = self.embedding_roots(ctx)?;
        let p = ctx.bits();
        let mut forms = Vec::with_capacity(self.degree);
        for r in &roots {
            let mut powers = vec![Cx::one(p)];
            for k in 1..self.degree {
                powers.push(&powers[k - 1] * r);
            }
            let coeffs: Vec<Cx> = self
                .an
                .iter()
                .map(|v| {
                    let mut acc = Cx::zero(p);
                    for (c, pw) in v.iter().zip(&powers) {
                        if *c != 0 {
                            acc += &pw.mul_i64(*c);
                        }
                    }
                    acc
                })
                .collect();
            forms.push(QSeries::new(1, coeffs));
        }
        let eichler = forms.iter().map(eichler_series).collect::<Result<Vec<_>>>()?;
        Ok(EmbeddedOrbit { level: self.level, roots, forms, eichler })
    }
}

/// Numerical newforms f_1..f_g of an orbit and their Eichler series.
#[derive(Clone, Debug)]
pub struct EmbeddedOrbit {
    pub level: u64,
    pub roots: Vec<Cx>,
    pub forms: Vec<QSeries>,
    pub eichler: Vec<QSeries>,
}

impl EmbeddedOrbit {
    pub fn genus(&self) -> usize {
        self.forms.len()
    }

    /// a_n(f_j) for each embedding j.
    pub fn hecke_eigenvalues(&self, n: i64) -> Vec<Cx> {
        self.forms.iter().map(|f| f.coeff(n).cloned().expect("coefficient index in range")).collect()
    }
}
