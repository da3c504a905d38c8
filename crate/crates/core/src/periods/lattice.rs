use super::group::GroupElement;
use crate::error::{Error, Result};
use crate::newforms::{evaluate, EmbeddedOrbit};
use crate::numerics::{hnf_basis, rational_reconstruct, CMatrix, Cx, IntMat, PrecisionContext};
use crate::par::{self, Execution};
use rug::Float;

/// Vector of Eichler integrals (E_1(tau), ..., E_g(tau)).
pub fn eichler_vector(orbit: &EmbeddedOrbit, tau: &Cx, ctx: &PrecisionContext) -> Result<Vec<Cx>> {
    orbit.eichler.iter().map(|s| evaluate(s, tau, ctx)).collect()
}

/// Period of gamma: E(tau_0) - E(gamma tau_0), evaluated at the balanced
/// point tau_0 = (-d + i)/c where both arguments have imaginary part 1/c.
pub fn gamma_period(gamma: &GroupElement, orbit: &EmbeddedOrbit, ctx: &PrecisionContext) -> Result<Vec<Cx>> {
    if !gamma.in_gamma0(orbit.level) {
        return Err(Error::InvalidArgument(format!("{gamma} is not in Gamma_0({})", orbit.level)));
    }
    let g = gamma.normalized();
    if g.c == 0 {
        return Ok(vec![ctx.zero(); orbit.genus()]);
    }
    let p = ctx.bits();
    let c = Float::with_val(p, g.c);
    let tau0 = Cx::new(Float::with_val(p, -g.d) / &c, Float::with_val(p, 1) / &c);
    gamma_period_at(&g, &tau0, orbit, ctx)
}

/// Period of gamma evaluated from an arbitrary base point.
pub fn gamma_period_at(gamma: &GroupElement, tau0: &Cx, orbit: &EmbeddedOrbit, ctx: &PrecisionContext) -> Result<Vec<Cx>> {
    let a = eichler_vector(orbit, tau0, ctx)?;
    let b = eichler_vector(orbit, &gamma.act(tau0), ctx)?;
    Ok(a.iter().zip(&b).map(|(x, y)| x - y).collect())
}

/// Number of q-series terms needed for a period of an element with lower-left entry c.
pub fn terms_for_c(c: i64, digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LN_10 * c.unsigned_abs() as f64 / (2.0 * std::f64::consts::PI)) as usize + 64
}

/// Period lattice basis M (g x 2g) and integer coordinates of every input period.
#[derive(Clone, Debug)]
pub struct LatticeBasis {
    pub m: CMatrix,
    pub coords: IntMat,
}

fn to_real(v: &[Cx], p: u32) -> Vec<Float> {
    let mut out: Vec<Float> = v.iter().map(|z| Float::with_val(p, &z.re)).collect();
    out.extend(v.iter().map(|z| Float::with_val(p, &z.im)));
    out
}

fn real_matrix(cols: &[Vec<Float>]) -> CMatrix {
    CMatrix::from_fn(cols[0].len(), cols.len(), |i, j| Cx::from_real(cols[j][i].clone()))
}

/// Integer coordinates of `r` in the real basis with inverse `binv`, or the
/// offending value.
fn solve_real(binv: &CMatrix, r: &[Float]) -> Vec<Float> {
    let v: Vec<Cx> = r.iter().map(|x| Cx::from_real(x.clone())).collect();
    binv.mul_vec(&v).into_iter().map(|z| z.re).collect()
}

/// Z-basis of the lattice generated by the given periods (each in C^g).
pub fn big_period_matrix(periods: &[Vec<Cx>], ctx: &PrecisionContext) -> Result<LatticeBasis> {
    let g = periods.first().map_or(0, Vec::len);
    let n = 2 * g;
    if g == 0 {
        return Err(Error::RankDeficient);
    }
    let p = ctx.bits();
    let reals: Vec<Vec<Float>> = periods.iter().map(|v| to_real(v, p)).collect();
    // greedy R-independent selection in f64
    let f64s: Vec<Vec<f64>> = reals.iter().map(|v| v.iter().map(Float::to_f64).collect()).collect();
    let scale = f64s.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0, f64::max);
    let mut chosen: Vec<usize> = Vec::new();
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    while chosen.len() < n {
        let mut best = (0.0, usize::MAX, Vec::new());
        for (k, v) in f64s.iter().enumerate() {
            if chosen.contains(&k) {
                continue;
            }
            let mut r = v.clone();
            for o in &ortho {
                let d: f64 = r.iter().zip(o).map(|(a, b)| a * b).sum();
                r.iter_mut().zip(o).for_each(|(a, b)| *a -= d * b);
            }
            let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > best.0 {
                best = (norm, k, r);
            }
        }
        if best.1 == usize::MAX || best.0 < 1e-8 * scale {
            return Err(Error::RankDeficient);
        }
        chosen.push(best.1);
        ortho.push(best.2.iter().map(|x| x / best.0).collect());
    }
    let b0 = real_matrix(&chosen.iter().map(|&k| reals[k].clone()).collect::<Vec<_>>());
    let b0inv = b0.inverse()?;
    let tol = ctx.pow10(-(ctx.digits() as i32) / 2);
    let mut int_vecs: Vec<Vec<i128>> = Vec::new();
    let mut rats = Vec::new();
    let mut lcm: i128 = 1;
    for r in &reals {
        let x = solve_real(&b0inv, r);
        let mut row = Vec::with_capacity(n);
        for xi in &x {
            let q = rational_reconstruct(xi, 1_000_000, &tol)
                .ok_or_else(|| Error::NonIntegralCoordinate(xi.to_string_radix(10, Some(20))))?;
            lcm = lcm / crate::numerics::gcd_i128(lcm, q.den()) * q.den();
            row.push(q);
        }
        rats.push(row);
    }
    for row in &rats {
        int_vecs.push(row.iter().map(|q| q.num() * (lcm / q.den())).collect());
    }
    let h = hnf_basis(&int_vecs, n)?;
    if h.len() != n {
        return Err(Error::RankDeficient);
    }
    let lcm_f = Float::with_val(p, lcm);
    let basis_real: Vec<Vec<Float>> = h
        .iter()
        .map(|col| {
            let c: Vec<Cx> = col.iter().map(|&x| Cx::from_real(Float::with_val(p, x) / &lcm_f)).collect();
            b0.mul_vec(&c).into_iter().map(|z| z.re).collect()
        })
        .collect();
    let bm = real_matrix(&basis_real);
    let bminv = bm.inverse()?;
    let mut coords = Vec::with_capacity(reals.len());
    for r in &reals {
        let x = solve_real(&bminv, r);
        let mut row = Vec::with_capacity(n);
        for xi in &x {
            let k = Float::with_val(p, xi.round_ref());
            if Float::with_val(p, xi - &k).abs() > tol {
                return Err(Error::NonIntegralCoordinate(xi.to_string_radix(10, Some(20))));
            }
            row.push(k.to_integer().and_then(|z| z.to_i128()).ok_or(Error::RankDeficient)?);
        }
        coords.push(row);
    }
    let m = CMatrix::from_fn(g, n, |i, j| Cx::new(basis_real[j][i].clone(), basis_real[j][g + i].clone()));
    Ok(LatticeBasis { m, coords })
}

/// Periods of the Schreier generators whose evaluation fits in the stored
/// coefficients; the skipped generators are returned separately.
pub fn generator_periods(
    gens: &[GroupElement],
    orbit: &EmbeddedOrbit,
    ctx: &PrecisionContext,
    exec: Execution,
) -> Result<(Vec<(GroupElement, Vec<Cx>)>, Vec<GroupElement>)> {
    let n_max = orbit.eichler[0].n_max() as usize;
    let (usable, skipped): (Vec<GroupElement>, Vec<GroupElement>) =
        gens.iter().partition(|g| terms_for_c(g.c, ctx.digits() + 2) <= n_max);
    let periods = par::try_map(exec, &usable, |g| gamma_period(g, orbit, ctx).map(|p| (*g, p)))?;
    Ok((periods, skipped))
}
