use super::{Cx, PrecisionContext};
use crate::error::{Error, Result};
use rug::Float;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Cx>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        CMatrix { rows, cols, data: vec![Cx::zero(prec); rows * cols] }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = CMatrix::zeros(n, n, prec);
        for i in 0..n {
            m[(i, i)] = Cx::one(prec);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Cx>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        CMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Cx>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        CMatrix::from_fn(r, c, |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prec(&self) -> u32 {
        self.data.first().map_or(64, Cx::prec)
    }

    pub fn row(&self, i: usize) -> Vec<Cx> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Cx> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    /// Columns `start..end` as a new matrix.
    pub fn column_block(&self, start: usize, end: usize) -> CMatrix {
        CMatrix::from_fn(self.rows, end - start, |i, j| self[(i, start + j)].clone())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(Cx::conj).collect() }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn re(&self) -> CMatrix {
        let data = self.data.iter().map(|z| Cx::from_real(z.re.clone())).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn im(&self) -> CMatrix {
        let data = self.data.iter().map(|z| Cx::from_real(z.im.clone())).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, o: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, o.rows, "shape mismatch in matrix product");
        let p = self.prec();
        CMatrix::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = Cx::zero(p);
            for k in 0..self.cols {
                acc.add_mul(&self[(i, k)], &o[(k, j)]);
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[Cx]) -> Vec<Cx> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        let p = self.prec();
        (0..self.rows)
            .map(|i| {
                let mut acc = Cx::zero(p);
                for (k, vk) in v.iter().enumerate() {
                    acc.add_mul(&self[(i, k)], vk);
                }
                acc
            })
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(v: &[Cx], m: &CMatrix) -> Vec<Cx> {
        assert_eq!(v.len(), m.rows, "shape mismatch in vector-matrix product");
        let p = m.prec();
        (0..m.cols)
            .map(|j| {
                let mut acc = Cx::zero(p);
                for (k, vk) in v.iter().enumerate() {
                    acc.add_mul(vk, &m[(k, j)]);
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, o: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: &Cx) -> CMatrix {
        let data = self.data.iter().map(|a| a * s).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> CMatrix {
        let data = self.data.iter().map(|a| -a).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Product with an integer matrix on the right.
    pub fn mul_int(&self, t: &[Vec<i128>]) -> CMatrix {
        assert_eq!(self.cols, t.len());
        let p = self.prec();
        let n = t.first().map_or(0, Vec::len);
        CMatrix::from_fn(self.rows, n, |i, j| {
            let mut acc = Cx::zero(p);
            for (k, row) in t.iter().enumerate() {
                if row[j] != 0 {
                    acc += &self[(i, k)].mul_real(&Float::with_val(p, row[j]));
                }
            }
            acc
        })
    }

    pub fn max_abs(&self) -> Float {
        let mut m = Float::new(self.prec());
        for z in &self.data {
            let a = z.abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn max_abs_diff(&self, o: &CMatrix) -> Float {
        self.sub(o).max_abs()
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<CMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let p = self.prec();
        let mut a = self.clone();
        let mut inv = CMatrix::identity(n, p);
        let scale = self.max_abs();
        if scale.is_zero() {
            return Err(Error::Singular);
        }
        let tiny = Float::with_val(p, &scale >> (p as i32 - 16).max(8));
        for col in 0..n {
            let mut piv = col;
            let mut best = a[(col, col)].abs();
            for r in col + 1..n {
                let v = a[(r, col)].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best <= tiny {
                return Err(Error::Singular);
            }
            a.swap_rows(col, piv);
            inv.swap_rows(col, piv);
            let d = a[(col, col)].recip();
            for j in 0..n {
                a[(col, j)] = &a[(col, j)] * &d;
                inv[(col, j)] = &inv[(col, j)] * &d;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    let t = &f * &a[(col, j)];
                    a[(r, j)] -= &t;
                    let t = &f * &inv[(col, j)];
                    inv[(r, j)] -= &t;
                }
            }
        }
        Ok(inv)
    }

    pub fn det(&self) -> Cx {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let p = self.prec();
        let mut a = self.clone();
        let mut det = Cx::one(p);
        for col in 0..n {
            let mut piv = col;
            let mut best = a[(col, col)].abs();
            for r in col + 1..n {
                let v = a[(r, col)].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best.is_zero() {
                return Cx::zero(p);
            }
            if piv != col {
                a.swap_rows(col, piv);
                det = -det;
            }
            det = &det * &a[(col, col)];
            let d = a[(col, col)].recip();
            for r in col + 1..n {
                let f = &a[(r, col)] * &d;
                for j in col..n {
                    let t = &f * &a[(col, j)];
                    a[(r, j)] -= &t;
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// f64 copy of the real parts, row-major.
    pub fn re_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)].re.to_f64()).collect()).collect()
    }

    /// Maximum of |A - A^T|.
    pub fn symmetry_defect(&self) -> Float {
        self.sub(&self.transpose()).max_abs()
    }

    /// Maximum of |A - A^*|.
    pub fn hermitian_defect(&self) -> Float {
        self.sub(&self.adjoint()).max_abs()
    }

    /// True when the Hermitian matrix is positive definite.
    pub fn is_hermitian_positive_definite(&self, ctx: &PrecisionContext) -> bool {
        let n = self.rows;
        let real = CMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let (bi, bj) = (i / n, j / n);
            let z = &self[(i % n, j % n)];
            let v = match (bi, bj) {
                (0, 0) | (1, 1) => z.re.clone(),
                (0, 1) => -z.im.clone(),
                _ => z.im.clone(),
            };
            Cx::from_real(v)
        });
        cholesky(&real, ctx).is_ok()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Cx;
    fn index(&self, (i, j): (usize, usize)) -> &Cx {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular L with L L^T = A for a real symmetric positive definite A.
///
/// Only real parts are read; the symmetry of the real parts is checked at
/// `check_eps` relative to the largest entry.
pub fn cholesky(a: &CMatrix, ctx: &PrecisionContext) -> Result<CMatrix> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::InvalidArgument("cholesky of a non-square matrix".into()));
    }
    let p = ctx.bits();
    let scale = a.re().max_abs();
    let sym_tol = Float::with_val(p, &scale * ctx.check_eps());
    if a.re().symmetry_defect() > sym_tol {
        return Err(Error::InvalidArgument("cholesky input is not symmetric".into()));
    }
    let piv_tol = Float::with_val(p, &scale * ctx.eps());
    let mut l = vec![vec![Float::new(p); n]; n];
    for j in 0..n {
        let mut d = Float::with_val(p, &a[(j, j)].re);
        for k in 0..j {
            d -= &l[j][k] * &l[j][k];
        }
        if d <= piv_tol {
            return Err(Error::NotPositiveDefinite);
        }
        let d = d.sqrt();
        for i in j + 1..n {
            let mut s = Float::with_val(p, &a[(i, j)].re);
            for k in 0..j {
                s -= &l[i][k] * &l[j][k];
            }
            l[i][j] = Float::with_val(p, &s / &d);
        }
        l[j][j] = d;
    }
    Ok(CMatrix::from_fn(n, n, |i, j| Cx::from_real(l[i][j].clone())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    fn real(ctx: &PrecisionContext, rows: &[&[f64]]) -> CMatrix {
        CMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| ctx.cx(x, 0.0)).collect()).collect())
    }

    #[test]
    fn cholesky_of_two_one_one_two() {
        let c = ctx();
        let l = cholesky(&real(&c, &[&[2.0, 1.0], &[1.0, 2.0]]), &c).unwrap();
        let s2 = c.float(2.0).sqrt();
        let expect = [
            s2.clone(),
            Float::with_val(c.bits(), 1.0 / &s2),
            Float::with_val(c.bits(), c.float(1.5).sqrt()),
        ];
        let got = [&l[(0, 0)].re, &l[(1, 0)].re, &l[(1, 1)].re];
        for (g, e) in got.iter().zip(&expect) {
            assert!(Float::with_val(c.bits(), *g - e).abs() < *c.eps());
        }
        assert!(l[(0, 1)].is_zero());
    }

    #[test]
    fn cholesky_identity_is_identity() {
        let c = ctx();
        let l = cholesky(&CMatrix::identity(3, c.bits()), &c).unwrap();
        assert_eq!(l, CMatrix::identity(3, c.bits()));
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let c = ctx();
        let err = cholesky(&real(&c, &[&[1.0, 2.0], &[2.0, 1.0]]), &c).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite));
    }

    #[test]
    fn inverse_round_trip() {
        let c = ctx();
        let m = CMatrix::from_rows(vec![
            vec![c.cx(1.0, 2.0), c.cx(0.5, -1.0), c.cx(3.0, 0.0)],
            vec![c.cx(-2.0, 0.25), c.cx(1.0, 1.0), c.cx(0.0, -1.0)],
            vec![c.cx(0.0, 1.0), c.cx(2.0, 0.0), c.cx(1.0, 1.0)],
        ]);
        let id = m.mul(&m.inverse().unwrap());
        assert!(id.max_abs_diff(&CMatrix::identity(3, c.bits())) < *c.check_eps());
        let d = m.det();
        let d_inv = m.inverse().unwrap().det();
        assert!((&d * &d_inv).dist(&c.one()) < *c.check_eps());
    }

    #[test]
    fn singular_matrix_is_reported() {
        let c = ctx();
        let m = real(&c, &[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(m.inverse(), Err(Error::Singular)));
    }
}
