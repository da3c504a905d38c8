use super::group::{schreier_generators, GroupElement};
use super::lattice::{big_period_matrix, gamma_period, generator_periods};
use super::polarization::{
    find_polarization, frobenius_normal_form, hecke_matrix, riemann_first_residual, riemann_hermitian,
};
use crate::error::{Error, Result};
use crate::newforms::EmbeddedOrbit;
use crate::numerics::{CMatrix, Cx, IntMat, PrecisionContext, Rational};
use crate::par::{self, Execution};
use crate::theta::Characteristic;
use rug::Float;
use serde::{Deserialize, Serialize};

/// How the homology basis is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisMode {
    /// Schreier generators of Gamma_0(N) reduced to a lattice basis.
    Auto,
    /// Explicit group elements from a homology fixture.
    Fixture,
}

impl std::str::FromStr for BasisMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(BasisMode::Auto),
            "fixture" => Ok(BasisMode::Fixture),
            _ => Err(Error::InvalidArgument(format!("unknown basis mode {s:?}"))),
        }
    }
}

impl std::fmt::Display for BasisMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BasisMode::Auto => "auto",
            BasisMode::Fixture => "fixture",
        })
    }
}

/// Homology basis given by elements of Gamma_0(N) (their periods are the
/// cycles), optionally with the integer change of basis to a symplectic basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomologyFixture {
    pub label: String,
    pub mode: String,
    pub elements: Vec<[i64; 4]>,
    #[serde(default)]
    pub transform: Option<IntMat>,
    #[serde(default)]
    pub characteristic: Option<Characteristic>,
    /// The lattice is scale * (lattice spanned by the element periods).
    #[serde(default)]
    pub scale: Option<Rational>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

const BUNDLED: &[(&str, &str)] = &[
    ("27.2.a.a", include_str!("../../data/homology/27.2.a.a.json")),
    ("23.2.a.a", include_str!("../../data/homology/23.2.a.a.json")),
    ("256.2.a.e", include_str!("../../data/homology/256.2.a.e.json")),
];

impl HomologyFixture {
    pub fn from_json(s: &str) -> Result<Self> {
        let f: HomologyFixture = serde_json::from_str(s)?;
        if f.mode != "gamma" {
            return Err(Error::UnsupportedOrbit(format!("homology fixture mode {:?}", f.mode)));
        }
        Ok(f)
    }

    pub fn bundled(label: &str) -> Option<Self> {
        BUNDLED.iter().find(|(l, _)| *l == label).map(|(_, s)| Self::from_json(s).expect("bundled homology fixture"))
    }

    pub fn group_elements(&self) -> Result<Vec<GroupElement>> {
        self.elements.iter().map(|&[a, b, c, d]| GroupElement::new(a, b, c, d)).collect()
    }
}

/// Everything derived from the period lattice.
#[derive(Clone, Debug)]
pub struct PeriodData {
    pub genus: usize,
    pub basis_mode: BasisMode,
    /// Lattice basis (g x 2g).
    pub m: CMatrix,
    /// Integer alternating form on the lattice basis.
    pub polarization: IntMat,
    /// Symplectic change of basis: (omega | omega') = M T.
    pub transform: IntMat,
    pub elementary_divisors: Vec<i128>,
    pub omega: CMatrix,
    pub omega_prime: CMatrix,
    /// omega^{-1} omega'.
    pub big_omega: CMatrix,
    /// Hermitian pairing matrix.
    pub p_matrix: CMatrix,
    pub generators_used: usize,
    pub generators_skipped: usize,
    /// Whether every Hecke operator is self-adjoint for the polarization.
    pub hecke_compatible: bool,
}

/// P = (1/2i)(conj(omega) omega'^tr - conj(omega') omega^tr).
pub fn pairing_matrix(omega: &CMatrix, omega_prime: &CMatrix, ctx: &PrecisionContext) -> Result<CMatrix> {
    let a = omega.conj().mul(&omega_prime.transpose());
    let b = omega_prime.conj().mul(&omega.transpose());
    let half_over_i = Cx::new(Float::new(ctx.bits()), ctx.float(-0.5));
    let p = a.sub(&b).scale(&half_over_i);
    let tol = Float::with_val(ctx.bits(), &p.max_abs() * ctx.check_eps());
    if p.hermitian_defect() > tol {
        return Err(Error::InvariantViolation("pairing matrix is not Hermitian".into()));
    }
    if !p.is_hermitian_positive_definite(ctx) {
        return Err(Error::InvariantViolation("pairing matrix is not positive definite".into()));
    }
    Ok(p)
}

fn std_form(es: &[i128]) -> IntMat {
    let g = es.len();
    let mut j = vec![vec![0i128; 2 * g]; 2 * g];
    for (k, &e) in es.iter().enumerate() {
        j[k][g + k] = e;
        j[g + k][k] = -e;
    }
    j
}

fn normalized_matrix(omega: &CMatrix, omega_prime: &CMatrix, ctx: &PrecisionContext) -> Result<Option<CMatrix>> {
    let big = omega.inverse()?.mul(omega_prime);
    let tol = Float::with_val(ctx.bits(), &big.max_abs() * ctx.check_eps());
    if big.symmetry_defect() > tol {
        return Err(Error::InvariantViolation("omega^{-1} omega' is not symmetric".into()));
    }
    let y = big.im();
    Ok(if crate::numerics::cholesky(&y, ctx).is_ok() { Some(big) } else { None })
}

/// Splits M T into (omega, omega') and derives Omega and P, fixing the
/// orientation if needed.
pub fn split_periods(
    m: &CMatrix,
    polarization: &IntMat,
    transform: &IntMat,
    ctx: &PrecisionContext,
) -> Result<(CMatrix, CMatrix, CMatrix, CMatrix)> {
    let g = m.rows();
    let pi = m.mul_int(transform);
    let mut omega = pi.column_block(0, g);
    let mut omega_prime = pi.column_block(g, 2 * g);
    let _ = polarization;
    let big = match normalized_matrix(&omega, &omega_prime, ctx)? {
        Some(b) => b,
        None => {
            let (o, op) = (omega_prime.clone(), omega.neg());
            match normalized_matrix(&o, &op, ctx)? {
                Some(b) => {
                    omega = o;
                    omega_prime = op;
                    b
                }
                None => return Err(Error::OrientationUnfixable),
            }
        }
    };
    let p = pairing_matrix(&omega, &omega_prime, ctx)?;
    Ok((omega, omega_prime, big, p))
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| n % p != 0)
}

/// Hecke eigenvalue vectors at the good primes below 30.
pub fn hecke_eigenvalue_vectors(orbit: &EmbeddedOrbit) -> Vec<Vec<Cx>> {
    (2..30u64)
        .filter(|&p| is_prime(p) && orbit.level % p != 0)
        .filter(|&p| p as i64 <= orbit.forms[0].n_max())
        .map(|p| orbit.hecke_eigenvalues(p as i64))
        .collect()
}

fn int_inverse(t: &IntMat, ctx: &PrecisionContext) -> Result<IntMat> {
    let p = ctx.bits();
    let n = t.len();
    let tm = CMatrix::from_fn(n, n, |i, k| Cx::from_real(Float::with_val(p, t[i][k])));
    let inv = tm.inverse()?;
    let mut out = vec![vec![0i128; n]; n];
    for i in 0..n {
        for k in 0..n {
            let x = &inv[(i, k)].re;
            let r = Float::with_val(p, x.round_ref());
            if Float::with_val(p, x - &r).abs() > *ctx.check_eps() {
                return Err(Error::InvalidArgument("fixture transform is not unimodular".into()));
            }
            out[i][k] = r.to_integer().and_then(|z| z.to_i128()).ok_or(Error::Singular)?;
        }
    }
    Ok(out)
}

fn int_mul(a: &IntMat, b: &IntMat) -> IntMat {
    let n = a.len();
    let m = b[0].len();
    (0..n).map(|i| (0..m).map(|k| (0..b.len()).map(|c| a[i][c] * b[c][k]).sum()).collect()).collect()
}

fn int_t(a: &IntMat) -> IntMat {
    (0..a[0].len()).map(|i| (0..a.len()).map(|k| a[k][i]).collect()).collect()
}

/// Full period computation for an embedded orbit.
pub fn compute_period_data(
    orbit: &EmbeddedOrbit,
    mode: BasisMode,
    fixture: Option<&HomologyFixture>,
    ctx: &PrecisionContext,
    exec: Execution,
) -> Result<PeriodData> {
    let g = orbit.genus();
    let eigs = hecke_eigenvalue_vectors(orbit);
    let (m, used, skipped) = match mode {
        BasisMode::Auto => {
            let gens = schreier_generators(orbit.level);
            let (periods, skipped) = generator_periods(&gens, orbit, ctx, exec)?;
            let vecs: Vec<Vec<Cx>> = periods.into_iter().map(|(_, p)| p).collect();
            let basis = big_period_matrix(&vecs, ctx)?;
            (basis.m, vecs.len(), skipped.len())
        }
        BasisMode::Fixture => {
            let fx = fixture.ok_or_else(|| Error::InvalidArgument("fixture basis requested without a fixture".into()))?;
            let elems = fx.group_elements()?;
            if elems.len() != 2 * g {
                return Err(Error::RankDeficient);
            }
            let cols = par::try_map(exec, &elems, |e| gamma_period(e, orbit, ctx))?;
            let mut m = CMatrix::from_columns(&cols);
            if let Some(r) = fx.scale {
                if r.is_zero() {
                    return Err(Error::InvalidArgument("fixture lattice scale is zero".into()));
                }
                m = m.scale(&Cx::from_real(r.to_float(ctx.bits())));
            }
            (m, elems.len(), 0)
        }
    };
    let mut hecke_compatible = true;
    let transform_fixed = fixture.and_then(|f| f.transform.clone()).filter(|_| mode == BasisMode::Fixture);
    let (polarization, transform, es) = match transform_fixed {
        Some(t) => {
            let tinv = int_inverse(&t, ctx)?;
            let e = int_mul(&int_mul(&int_t(&tinv), &std_form(&vec![1; g])), &tinv);
            // a fixture form need not be Rosati-compatible with the Hecke
            // algebra; only the Riemann relations are required
            for ev in &eigs {
                let h = hecke_matrix(&m, ev, ctx)?;
                hecke_compatible &= int_mul(&int_t(&h), &e) == int_mul(&e, &h);
            }
            if riemann_first_residual(&m, &e, ctx)? > ctx.pow10(-(ctx.digits() as i32) / 2) {
                return Err(Error::InvariantViolation("fixture basis violates the first Riemann relation".into()));
            }
            if !riemann_hermitian(&m, &e, ctx)?.is_hermitian_positive_definite(ctx) {
                return Err(Error::InvariantViolation("fixture basis violates the second Riemann relation".into()));
            }
            (e, t, vec![1; g])
        }
        None => {
            let e = find_polarization(&m, &eigs, ctx)?;
            let (t, es) = frobenius_normal_form(&e)?;
            if es.iter().any(|&x| x != es[0]) {
                return Err(Error::NoPolarizationFound(format!("polarization of type {es:?} is not principal")));
            }
            (e, t, es)
        }
    };
    let (omega, omega_prime, big_omega, p_matrix) = split_periods(&m, &polarization, &transform, ctx)?;
    Ok(PeriodData {
        genus: g,
        basis_mode: mode,
        m,
        polarization,
        transform,
        elementary_divisors: es,
        omega,
        omega_prime,
        big_omega,
        p_matrix,
        generators_used: used,
        generators_skipped: skipped,
        hecke_compatible,
    })
}

fn matrix_json(m: &CMatrix, digits: usize) -> serde_json::Value {
    let rows: Vec<Vec<[String; 2]>> = (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|z| [crate::numerics::float_to_string(&z.re, digits), crate::numerics::float_to_string(&z.im, digits)])
                .collect()
        })
        .collect();
    serde_json::json!(rows)
}

impl PeriodData {
    /// JSON with every complex entry as a [re, im] pair of decimal strings.
    pub fn to_json_value(&self, label: &str, digits: usize) -> serde_json::Value {
        serde_json::json!({
            "label": label,
            "genus": self.genus,
            "basis_mode": self.basis_mode.to_string(),
            "elementary_divisors": self.elementary_divisors,
            "transform": self.transform,
            "polarization": self.polarization,
            "hecke_compatible": self.hecke_compatible,
            "generators_used": self.generators_used,
            "generators_skipped": self.generators_skipped,
            "lattice_basis": matrix_json(&self.m, digits),
            "omega": matrix_json(&self.omega, digits),
            "omega_prime": matrix_json(&self.omega_prime, digits),
            "Omega": matrix_json(&self.big_omega, digits),
            "P": matrix_json(&self.p_matrix, digits),
        })
    }
}
