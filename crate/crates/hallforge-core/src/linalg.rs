//! Dense exact linear algebra over the cyclotomic coefficient field.
//!
//! Matrices of [`Scalar`]s back the function-space machinery: null spaces,
//! quotient bases, operator matrices, and the defining-relation checks.
//! Dimensions stay in the hundreds, so a dense representation with exact
//! Gauss elimination is both simple and fast enough.

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

/// A dense matrix over the cyclotomic field.
#[derive(Clone, PartialEq, Eq)]
pub struct ScalarMat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl std::fmt::Debug for ScalarMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ScalarMat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{}  ", self.at(r, c))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ScalarMat {
    pub fn zero(field: &Field, rows: usize, cols: usize) -> ScalarMat {
        ScalarMat {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> ScalarMat {
        let mut m = ScalarMat::zero(field, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = field.one();
        }
        m
    }

    /// Diagonal matrix with a constant scalar.
    pub fn scalar_diag(field: &Field, n: usize, s: &Scalar) -> ScalarMat {
        let mut m = ScalarMat::zero(field, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = s.clone();
        }
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<Scalar>>) -> ScalarMat {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        ScalarMat {
            field: field.clone(),
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Scalar {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn mul(&self, rhs: &ScalarMat) -> ScalarMat {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matrix product");
        let mut out = ScalarMat::zero(&self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let t = a * b;
                    *out.at_mut(i, j) += &t;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &ScalarMat) -> ScalarMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, rhs: &ScalarMat) -> ScalarMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> ScalarMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let mut out = vec![self.field.zero(); self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..self.cols {
                let a = self.at(i, j);
                if a.is_zero() || v[j].is_zero() {
                    continue;
                }
                let t = a * &v[j];
                *o += &t;
            }
        }
        out
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Result<Vec<usize>> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(sel) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            if sel != row {
                for c in 0..self.cols {
                    self.data.swap(row * self.cols + c, sel * self.cols + c);
                }
            }
            let inv = self.at(row, col).inv()?;
            for c in 0..self.cols {
                let t = self.at(row, c) * &inv;
                *self.at_mut(row, c) = t;
            }
            for r in 0..self.rows {
                if r == row || self.at(r, col).is_zero() {
                    continue;
                }
                let f = self.at(r, col).clone();
                for c in 0..self.cols {
                    let t = &f * self.at(row, c);
                    *self.at_mut(r, c) -= &t;
                }
            }
            pivots.push(col);
            row += 1;
        }
        Ok(pivots)
    }

    pub fn rref(&self) -> Result<(ScalarMat, Vec<usize>)> {
        let mut m = self.clone();
        let pivots = m.rref_in_place()?;
        Ok((m, pivots))
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.rref()?.1.len())
    }

    /// Basis of the right kernel `{v : M v = 0}`, one vector per non-pivot
    /// column, in echelon form.
    pub fn kernel_basis(&self) -> Result<Vec<Vec<Scalar>>> {
        let (red, pivots) = self.rref()?;
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut out = Vec::new();
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut vec = vec![self.field.zero(); self.cols];
            vec[free] = self.field.one();
            for (r, &c) in pivots.iter().enumerate() {
                vec[c] = -red.at(r, free);
            }
            out.push(vec);
        }
        Ok(out)
    }

    /// The inverse of a square matrix, erroring on singular input.
    pub fn inverse(&self) -> Result<ScalarMat> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = ScalarMat::zero(&self.field, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, n + r) = self.field.one();
        }
        let pivots = aug.rref_in_place()?;
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return Err(Error::Incompatible("singular matrix has no inverse".into()));
        }
        let mut out = ScalarMat::zero(&self.field, n, n);
        for r in 0..n {
            for c in 0..n {
                *out.at_mut(r, c) = aug.at(r, n + c).clone();
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field() -> Field {
        Field::new(2).unwrap()
    }

    #[test]
    fn identity_and_product() {
        let k = field();
        let id = ScalarMat::identity(&k, 3);
        let mut m = ScalarMat::zero(&k, 3, 3);
        *m.at_mut(0, 1) = k.v();
        *m.at_mut(1, 2) = k.from_ratio(1, 2);
        *m.at_mut(2, 0) = k.from_int(-3);
        assert_eq!(id.mul(&m), m);
        assert_eq!(m.mul(&id), m);
        // (m^2)m = m(m^2)
        assert_eq!(m.mul(&m).mul(&m), m.mul(&m.mul(&m)));
    }

    #[test]
    fn rref_and_rank() {
        let k = field();
        let m = ScalarMat::from_rows(
            &k,
            vec![
                vec![k.from_int(1), k.from_int(2), k.from_int(3)],
                vec![k.from_int(2), k.from_int(4), k.from_int(6)],
                vec![k.from_int(0), k.v(), k.from_int(1)],
            ],
        );
        assert_eq!(m.rank().unwrap(), 2);
        let (_, pivots) = m.rref().unwrap();
        assert_eq!(pivots, vec![0, 1]);
    }

    #[test]
    fn kernel() {
        let k = field();
        // One relation row: x0 + v*x1 = 0, kernel is 2-dimensional in 3 vars.
        let m = ScalarMat::from_rows(&k, vec![vec![k.one(), k.v(), k.zero()]]);
        let basis = m.kernel_basis().unwrap();
        assert_eq!(basis.len(), 2);
        for vec in &basis {
            let img = m.apply(vec);
            assert!(img.iter().all(Scalar::is_zero));
        }
        // Full-rank square matrix has trivial kernel.
        let id = ScalarMat::identity(&k, 4);
        assert!(id.kernel_basis().unwrap().is_empty());
    }

    #[test]
    fn inverse_round_trip() {
        let k = field();
        let m = ScalarMat::from_rows(
            &k,
            vec![
                vec![k.v(), k.one()],
                vec![k.zero(), k.from_ratio(3, 2)],
            ],
        );
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), ScalarMat::identity(&k, 2));
        let singular = ScalarMat::from_rows(
            &k,
            vec![
                vec![k.one(), k.one()],
                vec![k.one(), k.one()],
            ],
        );
        assert!(singular.inverse().is_err());
    }

    #[test]
    fn apply_matches_mul() {
        let k = field();
        let m = ScalarMat::from_rows(
            &k,
            vec![
                vec![k.one(), k.v()],
                vec![k.from_int(2), k.zero()],
                vec![k.v_pow(-1), k.from_int(1)],
            ],
        );
        let v = vec![k.from_int(3), k.v()];
        let out = m.apply(&v);
        assert_eq!(out[0], &k.from_int(3) + &k.from_int(2)); // 3 + v*v = 3 + 2
        assert_eq!(out[1], k.from_int(6));
        assert_eq!(out[2], &(&k.v_pow(-1) * &k.from_int(3)) + &k.v());
    }
}
