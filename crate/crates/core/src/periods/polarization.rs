use crate::error::{Error, Result};
use crate::numerics::{integer_nullspace, CMatrix, Cx, IntMat, PrecisionContext, Rational};
use rug::Float;

fn form(j: &IntMat, u: &[i128], v: &[i128]) -> i128 {
    let mut s = 0;
    for (a, row) in u.iter().zip(j) {
        if *a != 0 {
            s += a * row.iter().zip(v).map(|(x, y)| x * y).sum::<i128>();
        }
    }
    s
}

fn axpy(dst: &mut [i128], k: i128, src: &[i128]) {
    dst.iter_mut().zip(src).for_each(|(d, s)| *d += k * s);
}

/// Symplectic basis for a non-degenerate alternating integer form J:
/// T^tr J T = [[0, D], [-D, 0]] with D = diag(e_1, ..., e_g), e_1 | e_2 | ...
/// Columns of T are ordered (p_1..p_g, q_1..q_g).
pub fn frobenius_normal_form(j: &IntMat) -> Result<(IntMat, Vec<i128>)> {
    let n = j.len();
    if n % 2 != 0 || j.iter().any(|r| r.len() != n) {
        return Err(Error::DegenerateForm);
    }
    for a in 0..n {
        for b in 0..n {
            if j[a][b] != -j[b][a] {
                return Err(Error::InvalidArgument("form is not alternating".into()));
            }
        }
    }
    let mut rest: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|k| i128::from(i == k)).collect()).collect();
    let mut ps = Vec::new();
    let mut qs = Vec::new();
    let mut es = Vec::new();
    let mut guard = 0usize;
    'outer: while !rest.is_empty() {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::InvariantViolation("symplectic reduction did not terminate".into()));
        }
        let mut best: Option<(usize, usize, i128)> = None;
        for a in 0..rest.len() {
            for b in a + 1..rest.len() {
                let v = form(j, &rest[a], &rest[b]);
                if v != 0 && best.map_or(true, |(_, _, w)| v.abs() < w.abs()) {
                    best = Some((a, b, v));
                }
            }
        }
        let Some((a, b, v)) = best else { return Err(Error::DegenerateForm) };
        let mut p = rest[a].clone();
        let mut q = rest[b].clone();
        if v < 0 {
            q.iter_mut().for_each(|x| *x = -*x);
        }
        let d = v.abs();
        let others: Vec<usize> = (0..rest.len()).filter(|&k| k != a && k != b).collect();
        // clear the pair against the remaining vectors
        let mut cleared = Vec::with_capacity(others.len());
        for &k in &others {
            let mut r = rest[k].clone();
            let x = form(j, &q, &r).div_euclid(d);
            let y = -form(j, &p, &r).div_euclid(d);
            axpy(&mut r, x, &p);
            axpy(&mut r, y, &q);
            cleared.push(r);
        }
        let residual = cleared.iter().any(|r| form(j, &p, r) != 0 || form(j, &q, r) != 0);
        if residual {
            rest = vec![p, q];
            rest.extend(cleared);
            continue 'outer;
        }
        // divisibility of the remaining block by d
        for s in 0..cleared.len() {
            for t in s + 1..cleared.len() {
                if form(j, &cleared[s], &cleared[t]) % d != 0 {
                    let r = cleared[s].clone();
                    axpy(&mut p, 1, &r);
                    rest = vec![p, q];
                    rest.extend(cleared);
                    continue 'outer;
                }
            }
        }
        ps.push(p);
        qs.push(q);
        es.push(d);
        rest = cleared;
    }
    let cols: Vec<Vec<i128>> = ps.into_iter().chain(qs).collect();
    let t = (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    Ok((t, es))
}

/// Integer matrix T with diag(eigs) M = M T for a Hecke operator acting on
/// the lattice with columns M.
pub fn hecke_matrix(m: &CMatrix, eigs: &[Cx], ctx: &PrecisionContext) -> Result<IntMat> {
    let g = m.rows();
    let n = m.cols();
    let p = ctx.bits();
    let real = |a: &CMatrix| CMatrix::from_fn(2 * g, n, |i, k| Cx::from_real(if i < g { a[(i, k)].re.clone() } else { a[(i - g, k)].im.clone() }));
    let lm = CMatrix::from_fn(g, n, |i, k| &eigs[i] * &m[(i, k)]);
    let t = real(m).inverse()?.mul(&real(&lm));
    let tol = ctx.pow10(-(ctx.digits() as i32) / 2);
    let mut out = vec![vec![0i128; n]; n];
    for a in 0..n {
        for b in 0..n {
            let x = &t[(a, b)].re;
            let r = Float::with_val(p, x.round_ref());
            if Float::with_val(p, x - &r).abs() > tol {
                return Err(Error::NonIntegralCoordinate(format!("Hecke matrix entry {}", x.to_f64())));
            }
            out[a][b] = r.to_integer().and_then(|z| z.to_i128()).ok_or(Error::RankDeficient)?;
        }
    }
    Ok(out)
}

fn int_to_cmatrix(a: &IntMat, p: u32) -> CMatrix {
    CMatrix::from_fn(a.len(), a[0].len(), |i, k| Cx::from_real(Float::with_val(p, a[i][k])))
}

/// Hermitian form -i M E^{-1} M^*; positive definite for a polarization.
pub fn riemann_hermitian(m: &CMatrix, e: &IntMat, ctx: &PrecisionContext) -> Result<CMatrix> {
    let einv = int_to_cmatrix(e, ctx.bits()).inverse()?;
    let h = m.mul(&einv).mul(&m.adjoint());
    Ok(h.scale(&Cx::i(ctx.bits()).conj()))
}

/// |M E^{-1} M^tr|, zero for a form satisfying the first Riemann relation.
pub fn riemann_first_residual(m: &CMatrix, e: &IntMat, ctx: &PrecisionContext) -> Result<Float> {
    let einv = int_to_cmatrix(e, ctx.bits()).inverse()?;
    Ok(m.mul(&einv).mul(&m.transpose()).max_abs())
}

/// Hecke-compatible alternating forms: E with T^tr E = E T for every T.
pub fn compatible_forms(heckes: &[IntMat], n: usize) -> Result<Vec<IntMat>> {
    let params: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let basis_form = |k: usize| {
        let (a, b) = params[k];
        let mut e = vec![vec![0i128; n]; n];
        e[a][b] = 1;
        e[b][a] = -1;
        e
    };
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for t in heckes {
        // entries of T^tr E - E T, linear in the parameters
        let cols: Vec<Vec<i128>> = (0..params.len())
            .map(|k| {
                let e = basis_form(k);
                let mut out = Vec::with_capacity(n * n);
                for a in 0..n {
                    for b in 0..n {
                        let lhs: i128 = (0..n).map(|c| t[c][a] * e[c][b]).sum();
                        let rhs: i128 = (0..n).map(|c| e[a][c] * t[c][b]).sum();
                        out.push(lhs - rhs);
                    }
                }
                out
            })
            .collect();
        for r in 0..n * n {
            rows.push(cols.iter().map(|c| Rational::integer(c[r])).collect());
        }
    }
    if rows.is_empty() {
        rows.push(vec![Rational::ZERO; params.len()]);
    }
    let kernel = integer_nullspace(&rows)?;
    Ok(kernel
        .into_iter()
        .map(|v| {
            let mut e = vec![vec![0i128; n]; n];
            for (k, &(a, b)) in params.iter().enumerate() {
                e[a][b] = v[k];
                e[b][a] = -v[k];
            }
            e
        })
        .collect())
}

fn det_int(a: &IntMat) -> i128 {
    // Bareiss fraction-free elimination
    let n = a.len();
    let mut m = a.clone();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Principal (or minimal-Pfaffian) polarization of the lattice M compatible
/// with the given Hecke eigenvalue vectors.
pub fn find_polarization(m: &CMatrix, hecke_eigs: &[Vec<Cx>], ctx: &PrecisionContext) -> Result<IntMat> {
    let n = m.cols();
    let heckes = hecke_eigs.iter().map(|e| hecke_matrix(m, e, ctx)).collect::<Result<Vec<_>>>()?;
    let forms = compatible_forms(&heckes, n)?;
    if forms.is_empty() {
        return Err(Error::NoPolarizationFound("no Hecke-compatible alternating forms".into()));
    }
    let r = forms.len();
    let tol = ctx.pow10(-(ctx.digits() as i32) / 2);
    let mut best: Option<(i128, IntMat)> = None;
    for radius in [2i128, 4, 8] {
        let side = (2 * radius + 1) as usize;
        for code in 0..side.pow(r as u32) {
            let t: Vec<i128> = (0..r).map(|k| (code / side.pow(k as u32) % side) as i128 - radius).collect();
            if t.iter().all(|&x| x == 0) {
                continue;
            }
            let mut e = vec![vec![0i128; n]; n];
            for (tk, f) in t.iter().zip(&forms) {
                for a in 0..n {
                    for b in 0..n {
                        e[a][b] += tk * f[a][b];
                    }
                }
            }
            let g = e.iter().flatten().fold(0i128, |acc, &x| crate::numerics::gcd_i128(acc, x));
            if g != 1 {
                continue;
            }
            let det = det_int(&e);
            if det == 0 {
                continue;
            }
            let pf = (det.abs() as f64).sqrt().round() as i128;
            if best.as_ref().is_some_and(|(b, _)| *b <= pf) {
                continue;
            }
            let Ok(h) = riemann_hermitian(m, &e, ctx) else { continue };
            if !h.is_hermitian_positive_definite(ctx) {
                continue;
            }
            if riemann_first_residual(m, &e, ctx)? > tol {
                continue;
            }
            best = Some((pf, e));
        }
        if best.as_ref().is_some_and(|(pf, _)| *pf == 1) {
            break;
        }
    }
    best.map(|(_, e)| e).ok_or_else(|| Error::NoPolarizationFound("no positive compatible form in the search box".into()))
}
