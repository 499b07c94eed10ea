//! Dense exact linear algebra over the prime field `F_p`.
//!
//! Matrices are small (entries fit in a byte, dimensions in the single
//! digits) but are enumerated in bulk, so the representation is a flat
//! row-major byte vector.  Everything here is exact arithmetic mod `p`;
//! the enumeration entry points enforce the hard ceilings from
//! [`crate::error::limits`].

use crate::error::{limits, Error, Result};

/// A dense matrix over `F_p`, row-major, entries reduced mod `p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GfMatrix {
    p: u8,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for GfMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GfMatrix{}x{}/{}[", self.rows, self.cols, self.p)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.at(r, c))?;
            }
        }
        write!(f, "]")
    }
}

/// Multiplicative inverse in `F_p` (for prime `p`), by Fermat.
fn inv_mod(a: u8, p: u8) -> u8 {
    debug_assert!(a % p != 0, "zero has no inverse");
    let mut out = 1u32;
    let mut base = (a % p) as u32;
    let mut e = p as u32 - 2;
    while e > 0 {
        if e & 1 == 1 {
            out = out * base % p as u32;
        }
        base = base * base % p as u32;
        e >>= 1;
    }
    out as u8
}

impl GfMatrix {
    /// Zero matrix of the given shape.
    pub fn zero(p: u8, rows: usize, cols: usize) -> GfMatrix {
        GfMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    /// Identity matrix of size `n`.
    pub fn identity(p: u8, n: usize) -> GfMatrix {
        let mut m = GfMatrix::zero(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Build from explicit rows (entries reduced mod `p`).
    pub fn from_rows(p: u8, rows: &[Vec<u8>]) -> GfMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = GfMatrix::zero(p, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    /// Build from a flat row-major entry slice (entries already `< p`).
    pub fn from_flat(p: u8, rows: usize, cols: usize, data: &[u8]) -> GfMatrix {
        assert_eq!(data.len(), rows * cols);
        debug_assert!(data.iter().all(|&x| x < p));
        GfMatrix {
            p,
            rows,
            cols,
            data: data.to_vec(),
        }
    }

    pub fn p(&self) -> u8 {
        self.p
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    /// Flat row-major entries.
    pub fn entries(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, val: u8) {
        self.data[r * self.cols + c] = val % self.p;
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &GfMatrix) -> GfMatrix {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matrix product");
        let mut out = GfMatrix::zero(self.p, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k) as u32;
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let cur = out.at(i, j) as u32;
                    out.data[i * rhs.cols + j] = ((cur + a * rhs.at(k, j) as u32) % self.p as u32) as u8;
                }
            }
        }
        out
    }

    /// Sum `self + rhs`.
    pub fn add(&self, rhs: &GfMatrix) -> GfMatrix {
        assert_eq!(self.p, rhs.p);
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| ((a as u16 + b as u16) % self.p as u16) as u8)
            .collect();
        GfMatrix {
            p: self.p,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Transpose.
    pub fn transpose(&self) -> GfMatrix {
        let mut out = GfMatrix::zero(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.at(r, c));
            }
        }
        out
    }

    /// `trace(self * other)` without forming the product; requires the
    /// shapes to be mutually transposed (`self` is `r x c`, `other` `c x r`).
    pub fn trace_mul(&self, other: &GfMatrix) -> u8 {
        assert_eq!(self.p, other.p);
        assert_eq!((self.rows, self.cols), (other.cols, other.rows));
        let mut acc = 0u64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += self.at(i, j) as u64 * other.at(j, i) as u64;
            }
        }
        (acc % self.p as u64) as u8
    }

    /// Stack `self` on top of `other` (matching column counts).
    pub fn stack_vertical(&self, other: &GfMatrix) -> GfMatrix {
        assert_eq!(self.p, other.p);
        assert_eq!(self.cols, other.cols, "column mismatch in vertical stack");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        GfMatrix {
            p: self.p,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Concatenate `self` with `other` side by side (matching row counts).
    pub fn concat_horizontal(&self, other: &GfMatrix) -> GfMatrix {
        assert_eq!(self.p, other.p);
        assert_eq!(self.rows, other.rows, "row mismatch in horizontal concat");
        let mut out = GfMatrix::zero(self.p, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.at(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.at(r, c));
            }
        }
        out
    }

    /// Copy of the column block `[lo, hi)`.
    pub fn column_block(&self, lo: usize, hi: usize) -> GfMatrix {
        assert!(lo <= hi && hi <= self.cols);
        let mut out = GfMatrix::zero(self.p, self.rows, hi - lo);
        for r in 0..self.rows {
            for c in lo..hi {
                out.set(r, c - lo, self.at(r, c));
            }
        }
        out
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let p = self.p as u32;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(sel) = (row..self.rows).find(|&r| self.at(r, col) != 0) else {
                continue;
            };
            if sel != row {
                for c in 0..self.cols {
                    let a = self.at(row, c);
                    let b = self.at(sel, c);
                    self.set(row, c, b);
                    self.set(sel, c, a);
                }
            }
            let inv = inv_mod(self.at(row, col), self.p) as u32;
            for c in 0..self.cols {
                let x = self.at(row, c) as u32;
                self.data[row * self.cols + c] = (x * inv % p) as u8;
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let f = self.at(r, col) as u32;
                if f == 0 {
                    continue;
                }
                for c in 0..self.cols {
                    let x = self.at(r, c) as u32;
                    let y = self.at(row, c) as u32;
                    self.data[r * self.cols + c] = ((x + (p - f % p) * y) % p) as u8;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Reduced row echelon form and pivot columns, without mutating `self`.
    pub fn rref(&self) -> (GfMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    /// Rank.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// True iff the matrix has full column rank.
    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<GfMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let aug = self.concat_horizontal(&GfMatrix::identity(self.p, n));
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        Some(red.column_block(n, 2 * n))
    }

    /// Solve `self * X = b`.  Returns `None` when inconsistent.  When the
    /// columns of `self` are independent the solution is unique; otherwise
    /// free variables are set to zero.
    pub fn solve(&self, b: &GfMatrix) -> Option<GfMatrix> {
        assert_eq!(self.p, b.p);
        assert_eq!(self.rows, b.rows, "rhs has wrong height");
        let aug = self.concat_horizontal(b);
        let (red, pivots) = aug.rref();
        // Pivots landing in the right block mean an inconsistent system.
        let a_pivots: Vec<usize> = pivots.iter().copied().filter(|&c| c < self.cols).collect();
        if a_pivots.len() != pivots.len() {
            return None;
        }
        let mut x = GfMatrix::zero(self.p, self.cols, b.cols);
        for (r, &c) in a_pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(c, j, red.at(r, self.cols + j));
            }
        }
        Some(x)
    }

    /// Extend the injective matrix `self` (n x k) to an invertible n x n
    /// matrix `[self | C]` by greedily appending standard basis vectors.
    pub fn complete_basis(&self) -> GfMatrix {
        assert!(self.is_injective(), "can only complete an injective matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut rank = self.cols;
        for j in 0..n {
            if rank == n {
                break;
            }
            let mut e = GfMatrix::zero(self.p, n, 1);
            e.set(j, 0, 1);
            let cand = m.concat_horizontal(&e);
            if cand.rank() > rank {
                m = cand;
                rank += 1;
            }
        }
        assert_eq!(m.cols, n);
        m
    }
}

/// `|GL(n, F_p)| = prod_(i=0)^(n-1) (p^n - p^i)`.
pub fn gl_order(p: u64, n: usize) -> u128 {
    let pn = (p as u128).pow(n as u32);
    let mut out = 1u128;
    let mut pi = 1u128;
    for _ in 0..n {
        out *= pn - pi;
        pi *= p as u128;
    }
    out
}

/// The Gaussian binomial coefficient: the number of `k`-dimensional
/// subspaces of `F_p^n`, computed exactly as
/// `prod_(i=0)^(k-1) (p^(n-i) - 1) / (p^(k-i) - 1)`.
pub fn gaussian_binomial(p: u64, n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    // Multiply/divide alternately; each prefix is an integer because the
    // Gaussian binomial recurrence keeps partial quotients integral.
    let mut num = num::BigInt::from(1u32);
    let mut den = num::BigInt::from(1u32);
    let big_p = num::BigInt::from(p);
    for i in 0..k {
        num *= num::pow::pow(big_p.clone(), n - i) - 1;
        den *= num::pow::pow(big_p.clone(), k - i) - 1;
    }
    let (q, r) = num::Integer::div_rem(&num, &den);
    assert!(num::Zero::is_zero(&r), "gaussian binomial must be integral");
    use num::ToPrimitive;
    q.to_u128().expect("gaussian binomial fits in u128")
}

/// Enumerate every `rows x cols` matrix over `F_p`, in lexicographic order
/// of the flat entry vector.  Errors when `p^(rows*cols)` exceeds the
/// enumeration ceiling.
pub fn all_matrices(p: u8, rows: usize, cols: usize) -> Result<Vec<GfMatrix>> {
    let cells = rows * cols;
    let count = checked_power(p as u128, cells, limits::MAX_MATRIX_ENUM)
        .ok_or_else(|| Error::scale("matrix enumeration", u128::MAX, limits::MAX_MATRIX_ENUM))?;
    if count > limits::MAX_MATRIX_ENUM {
        return Err(Error::scale("matrix enumeration", count, limits::MAX_MATRIX_ENUM));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut data = vec![0u8; cells];
    loop {
        out.push(GfMatrix {
            p,
            rows,
            cols,
            data: data.clone(),
        });
        // Odometer increment.
        let mut i = cells;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            data[i] += 1;
            if data[i] < p {
                break;
            }
            data[i] = 0;
        }
    }
}

/// `base^exp`, or `None` on overflow past `cap` (saturating early).
fn checked_power(base: u128, exp: usize, cap: u128) -> Option<u128> {
    let mut out = 1u128;
    for _ in 0..exp {
        out = out.checked_mul(base)?;
        if out > cap.saturating_mul(2) {
            // Far past any ceiling; the exact value no longer matters.
            return Some(out);
        }
    }
    Some(out)
}

/// Enumerate `GL(n, F_p)`.  Errors when the ambient matrix enumeration
/// exceeds the ceiling.
pub fn invertible_matrices(p: u8, n: usize) -> Result<Vec<GfMatrix>> {
    let all = all_matrices(p, n, n)?;
    let out: Vec<GfMatrix> = all.into_iter().filter(|m| m.rank() == n).collect();
    debug_assert_eq!(out.len() as u128, gl_order(p as u64, n));
    Ok(out)
}

/// Enumerate every graded injective `rows x cols` matrix (full column
/// rank).  Errors when the ambient enumeration exceeds the ceiling.
pub fn injective_matrices(p: u8, rows: usize, cols: usize) -> Result<Vec<GfMatrix>> {
    Ok(all_matrices(p, rows, cols)?
        .into_iter()
        .filter(|m| m.is_injective())
        .collect())
}

/// Canonical column-basis matrices (n x k, full column rank) for every
/// `k`-dimensional subspace of `F_p^n`, one per subspace.
///
/// Each subspace has a unique basis whose transpose is in reduced row
/// echelon form; the enumeration walks pivot-column sets and free entries.
pub fn subspace_bases(p: u8, n: usize, k: usize) -> Vec<GfMatrix> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        emit_subspaces_for_pivots(p, n, k, &pivots, &mut out);
        // Next combination of pivot columns in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                debug_assert_eq!(out.len() as u128, gaussian_binomial(p as u64, n, k));
                return out;
            }
            i -= 1;
            if pivots[i] < n - (k - i) {
                pivots[i] += 1;
                for j in i + 1..k {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn emit_subspaces_for_pivots(p: u8, n: usize, k: usize, pivots: &[usize], out: &mut Vec<GfMatrix>) {
    // Free entries of the echelon row basis: position (r, c) is free when
    // c > pivots[r] and c is not itself a pivot column.
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; n];
        for &c in pivots {
            v[c] = true;
        }
        v
    };
    let mut free: Vec<(usize, usize)> = Vec::new();
    for (r, &pc) in pivots.iter().enumerate() {
        for c in (pc + 1)..n {
            if !is_pivot[c] {
                free.push((r, c));
            }
        }
    }
    let mut vals = vec![0u8; free.len()];
    loop {
        let mut rowbasis = GfMatrix::zero(p, k, n);
        for (r, &pc) in pivots.iter().enumerate() {
            rowbasis.set(r, pc, 1);
        }
        for (idx, &(r, c)) in free.iter().enumerate() {
            rowbasis.set(r, c, vals[idx]);
        }
        out.push(rowbasis.transpose());
        let mut i = free.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            vals[i] += 1;
            if vals[i] < p {
                break;
            }
            vals[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn product_and_identity() {
        for p in [2u8, 3, 5] {
            let id = GfMatrix::identity(p, 3);
            for m in all_matrices(p, 3, 2).unwrap().iter().take(50) {
                assert_eq!(&id.mul(m), m);
            }
        }
    }

    #[test]
    fn product_associativity_sampled() {
        let mats = all_matrices(3, 2, 2).unwrap();
        for (i, a) in mats.iter().enumerate().step_by(7) {
            let b = &mats[(3 * i + 1) % mats.len()];
            let c = &mats[(5 * i + 2) % mats.len()];
            assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
        }
    }

    #[test]
    fn trace_of_product_matches_direct_computation() {
        for a in all_matrices(3, 2, 3).unwrap().iter().step_by(11) {
            for b in all_matrices(3, 3, 2).unwrap().iter().step_by(13) {
                let prod = a.mul(b);
                let direct = (0..2).map(|i| prod.at(i, i) as u64).sum::<u64>() % 3;
                assert_eq!(a.trace_mul(b) as u64, direct);
            }
        }
    }

    #[test]
    fn rank_and_rref() {
        let m = GfMatrix::from_rows(2, &[vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 1]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(GfMatrix::identity(5, 4).rank(), 4);
        assert_eq!(GfMatrix::zero(3, 2, 5).rank(), 0);
        let (r, pivots) = m.rref();
        assert_eq!(pivots, vec![0, 2]);
        assert_eq!(r.at(0, 0), 1);
        assert_eq!(r.at(0, 1), 1);
        assert_eq!(r.at(1, 2), 1);
    }

    #[test]
    fn inverses_in_gl2_f3() {
        let id = GfMatrix::identity(3, 2);
        let gl = invertible_matrices(3, 2).unwrap();
        assert_eq!(gl.len() as u128, gl_order(3, 2));
        for m in &gl {
            let inv = m.inverse().expect("invertible");
            assert_eq!(m.mul(&inv), id);
            assert_eq!(inv.mul(m), id);
        }
        let singular = GfMatrix::from_rows(3, &[vec![1, 2], vec![2, 4]]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn group_orders() {
        assert_eq!(gl_order(2, 0), 1);
        assert_eq!(gl_order(2, 1), 1);
        assert_eq!(gl_order(2, 2), 6);
        assert_eq!(gl_order(2, 3), 168);
        assert_eq!(gl_order(3, 2), 48);
        assert_eq!(gl_order(5, 2), 480);
        assert_eq!(invertible_matrices(2, 3).unwrap().len(), 168);
    }

    #[test]
    fn solve_recovers_unique_solutions() {
        // A injective 3x2 over F_5.
        let a = GfMatrix::from_rows(5, &[vec![1, 2], vec![0, 1], vec![3, 0]]);
        assert!(a.is_injective());
        for x in all_matrices(5, 2, 1).unwrap() {
            let b = a.mul(&x);
            assert_eq!(a.solve(&b), Some(x));
        }
        // A vector outside the column span must be rejected.
        let mut hit_none = false;
        for b in all_matrices(5, 3, 1).unwrap() {
            if a.solve(&b).is_none() {
                hit_none = true;
                break;
            }
        }
        assert!(hit_none);
    }

    #[test]
    fn basis_completion() {
        let s = GfMatrix::from_rows(2, &[vec![1], vec![1], vec![0]]);
        let m = s.complete_basis();
        assert_eq!(m.cols(), 3);
        assert!(m.inverse().is_some());
        assert_eq!(m.column_block(0, 1), s);
    }

    #[test]
    fn subspace_enumeration_counts() {
        for (p, n, k, expect) in [
            (2u8, 2usize, 1usize, 3u128),
            (2, 4, 2, 35),
            (3, 3, 1, 13),
            (3, 3, 2, 13),
            (2, 3, 0, 1),
            (2, 3, 3, 1),
        ] {
            let subs = subspace_bases(p, n, k);
            assert_eq!(subs.len() as u128, expect);
            assert_eq!(gaussian_binomial(p as u64, n, k), expect);
            let distinct: HashSet<Vec<u8>> = subs.iter().map(|s| s.entries().to_vec()).collect();
            assert_eq!(distinct.len(), subs.len(), "canonical forms must be distinct");
            for s in &subs {
                assert!(s.is_injective());
            }
        }
    }

    #[test]
    fn gaussian_binomial_symmetry() {
        for n in 0..6usize {
            for k in 0..=n {
                assert_eq!(gaussian_binomial(2, n, k), gaussian_binomial(2, n, n - k));
                assert_eq!(gaussian_binomial(3, n, k), gaussian_binomial(3, n, n - k));
            }
        }
    }

    #[test]
    fn enumeration_ceiling_is_enforced() {
        let err = all_matrices(2, 6, 6).unwrap_err();
        assert!(matches!(err, Error::ScaleExceeded { .. }));
    }

    #[test]
    fn injective_enumeration() {
        // Injective 3x2 over F_2: (2^3 - 1)(2^3 - 2) = 42.
        assert_eq!(injective_matrices(2, 3, 2).unwrap().len(), 42);
        // Injective n x 0 is the single empty matrix.
        assert_eq!(injective_matrices(2, 3, 0).unwrap().len(), 1);
    }
}
