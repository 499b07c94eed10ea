//! Invariant functions on representation spaces: the induction product,
//! the realization of Hall elements as functions, and the finite-field
//! Fourier transform between orientations of the same underlying graph.
//!
//! A function is stored orbit-collapsed — one scalar per isomorphism class
//! of the space it lives on — which is exactly the data of a conjugation-
//! invariant function on the finite set of representations.
//!
//! The *induction product* of `f1` on dimension vector `alpha` with `f2`
//! on `beta` is the function on `alpha + beta` given by
//!
//! ```text
//!   (f1 * f2)(x) = v^-m(alpha, beta)
//!                  sum_(W x-stable graded, dim W = beta) f1(x/W) f2(x|W),
//!   m(alpha, beta) = sum_h alpha_src(h) beta_tgt(h) + sum_v alpha_v beta_v.
//! ```
//!
//! On indicator functions it reproduces the Hall numbers:
//! `(1_alpha * 1_beta)(x) = v^-m g^gamma_(alpha, beta)` for `x` of class
//! `gamma`, and `u_alpha -> v^(dim V_alpha - dim G_alpha) 1_alpha` turns
//! the twisted Hall product into this product.
//!
//! The *Fourier transform* between two orientations replaces every matrix
//! coordinate of a flipped arrow by its dual variable:
//!
//! ```text
//!   (T f)(z, y') = v^-d sum_y psi(sum_(h flipped) s_h tr(y'_h y_h))
//!                        f(z, y),
//!   d = sum_(h flipped) nu_src(h) nu_tgt(h),
//! ```
//!
//! with `psi` the standard additive character of `F_p` and `s_h = +1` when
//! the arrow leaves its reference direction, `-1` when it returns to it.
//! The antisymmetric sign makes transforms compose: flipping onward and
//! flipping back are mutually inverse, and more generally
//! `T_(Q',Q'') T_(Q,Q') = T_(Q,Q'')`.  Transforms of invariant functions
//! are again invariant; this is asserted pointwise before the result is
//! orbit-collapsed.

use crate::error::{Error, Result};
use crate::gflin::GfMatrix;
use crate::hall::HallElt;
use crate::linalg::ScalarMat;
use crate::quiver::{self, Quiver};
use crate::repspace::{RepSpace, Session};
use crate::scalar::{Field, Scalar};

/// An invariant function on the representations of `quiver` at `dims`,
/// stored as one scalar per isomorphism class (class index order of the
/// session's orbit table).
#[derive(Clone, Debug)]
pub struct OrbitFn {
    quiver: Quiver,
    dims: Vec<usize>,
    field: Field,
    values: Vec<Scalar>,
}

impl PartialEq for OrbitFn {
    fn eq(&self, other: &Self) -> bool {
        self.quiver.hash_hex() == other.quiver.hash_hex()
            && self.dims == other.dims
            && self.values == other.values
    }
}
impl Eq for OrbitFn {}

impl OrbitFn {
    /// The zero function.
    pub fn zero(session: &Session, quiver: &Quiver, dims: &[usize]) -> Result<OrbitFn> {
        let table = session.table(quiver, dims)?;
        Ok(OrbitFn {
            quiver: quiver.clone(),
            dims: dims.to_vec(),
            field: session.field().clone(),
            values: vec![session.field().zero(); table.n_classes()],
        })
    }

    /// The constant function with the given value.
    pub fn constant(
        session: &Session,
        quiver: &Quiver,
        dims: &[usize],
        value: &Scalar,
    ) -> Result<OrbitFn> {
        let mut f = OrbitFn::zero(session, quiver, dims)?;
        for v in f.values.iter_mut() {
            *v = value.clone();
        }
        Ok(f)
    }

    /// The indicator `1_c` of a single class.
    pub fn indicator(
        session: &Session,
        quiver: &Quiver,
        class: &crate::repspace::ClassId,
    ) -> Result<OrbitFn> {
        let mut f = OrbitFn::zero(session, quiver, &class.dims)?;
        f.values[class.index as usize] = session.field().one();
        Ok(f)
    }

    /// Build from explicit per-class values.
    pub fn from_values(
        session: &Session,
        quiver: &Quiver,
        dims: &[usize],
        values: Vec<Scalar>,
    ) -> Result<OrbitFn> {
        let table = session.table(quiver, dims)?;
        if values.len() != table.n_classes() {
            return Err(Error::InvalidInput(format!(
                "{} values for {} classes",
                values.len(),
                table.n_classes()
            )));
        }
        Ok(OrbitFn {
            quiver: quiver.clone(),
            dims: dims.to_vec(),
            field: session.field().clone(),
            values,
        })
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    /// The value on the class with the given index.
    pub fn value(&self, class_index: u32) -> &Scalar {
        &self.values[class_index as usize]
    }

    /// The value at an arbitrary point of the space.
    pub fn value_at_point(&self, session: &Session, x: &[u8]) -> Result<Scalar> {
        let table = session.table(&self.quiver, &self.dims)?;
        Ok(self.values[table.classify_point(x) as usize].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Scalar::is_zero)
    }

    pub fn scale(&self, s: &Scalar) -> OrbitFn {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v = &*v * s;
        }
        out
    }

    pub fn add(&self, other: &OrbitFn) -> Result<OrbitFn> {
        self.check_same_space(other)?;
        let mut out = self.clone();
        for (v, w) in out.values.iter_mut().zip(&other.values) {
            *v = &*v + w;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &OrbitFn) -> Result<OrbitFn> {
        self.check_same_space(other)?;
        let mut out = self.clone();
        for (v, w) in out.values.iter_mut().zip(&other.values) {
            *v = &*v - w;
        }
        Ok(out)
    }

    fn check_same_space(&self, other: &OrbitFn) -> Result<()> {
        if self.quiver.hash_hex() != other.quiver.hash_hex() || self.dims != other.dims {
            return Err(Error::Incompatible(
                "functions live on different spaces".to_string(),
            ));
        }
        Ok(())
    }
}

/// The induction product `f1 * f2` (see module docs).  Both functions
/// must live on the same quiver; the result lives at the sum of their
/// dimension vectors.
pub fn fn_mul(session: &Session, f1: &OrbitFn, f2: &OrbitFn) -> Result<OrbitFn> {
    if f1.quiver.hash_hex() != f2.quiver.hash_hex() {
        return Err(Error::Incompatible(
            "induction product of functions on different quivers".to_string(),
        ));
    }
    let quiver = &f1.quiver;
    let field = session.field();
    let target_dims = quiver::dims_add(&f1.dims, &f2.dims);
    let m = quiver.m_factor(&quiver::to_i64(&f1.dims), &quiver::to_i64(&f2.dims));
    let scale = field.v_pow(-m);
    let counts = session.subquot_counts(quiver, &f1.dims, &f2.dims)?;
    let mut out = OrbitFn::zero(session, quiver, &target_dims)?;
    for (gi, per_class) in counts.iter().enumerate() {
        let mut acc = field.zero();
        for (&(qc, sc), &count) in per_class {
            let term = &f1.values[qc as usize] * &f2.values[sc as usize];
            if term.is_zero() {
                continue;
            }
            acc = &acc + &(&term * &field.from_u128(count as u128));
        }
        out.values[gi] = &acc * &scale;
    }
    Ok(out)
}

/// Realize a homogeneous Hall element as a function:
/// `u_alpha -> v^(dim V_alpha - dim G_alpha) 1_alpha` with
/// `dim V_alpha = sum alpha_v` and `dim G_alpha = sum alpha_v^2`,
/// extended linearly.  All terms must share the dimension vector `dims`
/// (which also disambiguates the zero element).
pub fn hall_to_function(
    session: &Session,
    quiver: &Quiver,
    h: &HallElt,
    dims: &[usize],
) -> Result<OrbitFn> {
    let field = session.field();
    let mut out = OrbitFn::zero(session, quiver, dims)?;
    for (cls, coeff) in h.terms() {
        if cls.dims != dims {
            return Err(Error::Incompatible(format!(
                "term {} is not homogeneous of dimension {}",
                cls.label(),
                quiver::dims_label(dims)
            )));
        }
        let dim_v: i64 = cls.dims.iter().map(|&d| d as i64).sum();
        let dim_g: i64 = cls.dims.iter().map(|&d| (d * d) as i64).sum();
        let val = &out.values[cls.index as usize] + &(coeff * &field.v_pow(dim_v - dim_g));
        out.values[cls.index as usize] = val;
    }
    Ok(out)
}

/// Transport a function on a plain quiver to the framed quiver at the
/// dimension vector padded with zero framing components.
///
/// Representations with empty framing spaces have the same matrix data,
/// the same acting group, and the same classification as the unframed
/// ones; this correspondence is asserted structurally (equal class counts
/// and equal canonical representatives) before values are copied over.
pub fn embed_into_framed(
    session: &Session,
    f: &OrbitFn,
    framed_quiver: &Quiver,
) -> Result<OrbitFn> {
    let base = &f.quiver;
    let is_framing_of_base = framed_quiver.n_acting() == base.n_vertices()
        && base.n_acting() == base.n_vertices()
        && framed_quiver.n_vertices() == 2 * base.n_vertices()
        && framed_quiver.arrows().len() == base.arrows().len() + base.n_vertices()
        && framed_quiver.arrows()[..base.arrows().len()] == *base.arrows();
    if !is_framing_of_base {
        return Err(Error::Incompatible(
            "target quiver is not a framing of the function's quiver".to_string(),
        ));
    }
    let padded = quiver::dims_pad(&f.dims, framed_quiver.n_vertices());
    let base_table = session.table(base, &f.dims)?;
    let framed_table = session.table(framed_quiver, &padded)?;
    assert_eq!(
        base_table.n_classes(),
        framed_table.n_classes(),
        "zero-framing classification must match the base classification"
    );
    for (b, fr) in base_table.classes().iter().zip(framed_table.classes()) {
        assert_eq!(b.rep, fr.rep, "zero-framing canonical points must match");
        assert_eq!(b.orbit_size, fr.orbit_size);
    }
    OrbitFn::from_values(session, framed_quiver, &padded, f.values.clone())
}

/// The change-of-orientation transform matrix from the class basis of
/// `(from, dims)` to the class basis of `(to, dims)` — the matrix of the
/// Fourier transform described in the module docs.
///
/// The construction sweeps every point of the target space; invariance of
/// the transform under the group action is asserted along the way (each
/// target point's character sums must agree with its class
/// representative's).
pub fn fourier_matrix(
    session: &Session,
    from: &Quiver,
    to: &Quiver,
    dims: &[usize],
) -> Result<ScalarMat> {
    let flip = to.flipped_against(from)?;
    let field = session.field();
    let from_table = session.table(from, dims)?;
    let to_table = session.table(to, dims)?;
    let n_from = from_table.n_classes();
    let n_to = to_table.n_classes();
    if flip.is_empty() {
        return Ok(ScalarMat::identity(field, n_from));
    }
    let p = session.p();
    let from_space = RepSpace::new(from, dims, p)?;
    let to_space = RepSpace::new(to, dims, p)?;

    // Sign per flipped arrow: +1 leaving the reference orientation,
    // -1 returning to it.
    let signs: Vec<i64> = flip
        .iter()
        .map(|&h| if from.in_reference_direction(h) { 1 } else { -1 })
        .collect();
    let d: i64 = flip
        .iter()
        .map(|&h| {
            let a = &from.arrows()[h];
            (dims[a.src] * dims[a.tgt]) as i64
        })
        .sum();
    let scale = field.v_pow(-d);

    // Flat layout of the flipped coordinates on the source side.
    let flip_shapes: Vec<(usize, usize)> = flip
        .iter()
        .map(|&h| {
            let a = &from.arrows()[h];
            (dims[a.tgt], dims[a.src])
        })
        .collect();
    let flip_entries: usize = flip_shapes.iter().map(|(r, c)| r * c).sum();

    let mut matrix = ScalarMat::zero(field, n_to, n_from);
    let mut psi_table: Vec<Scalar> = (0..p).map(|c| field.psi(c)).collect();
    // Accumulated character sums per (source class, residue).
    let mut sums = vec![vec![0u64; p as usize]; n_from];

    to_space.for_each_point(|x_to| {
        for row in sums.iter_mut() {
            row.fill(0);
        }
        // Coordinates of the unflipped arrows transfer verbatim; the
        // flipped arrows' target-side matrices pair against the source.
        let mut x_from = from_space.zero_point();
        for h in 0..from.arrows().len() {
            if !flip.contains(&h) {
                from_space.put_arrow_matrix(&mut x_from, h, &to_space.arrow_matrix(x_to, h));
            }
        }
        let dual_mats: Vec<GfMatrix> =
            flip.iter().map(|&h| to_space.arrow_matrix(x_to, h)).collect();

        let mut y = vec![0u8; flip_entries];
        loop {
            // Install the source-side flipped coordinates and accumulate
            // the character exponent.
            let mut offset = 0usize;
            let mut exponent = 0i64;
            for ((&h, &(r, c)), (sign, dual)) in flip
                .iter()
                .zip(&flip_shapes)
                .zip(signs.iter().zip(&dual_mats))
            {
                let m = GfMatrix::from_flat(p as u8, r, c, &y[offset..offset + r * c]);
                exponent += sign * dual.trace_mul(&m) as i64;
                from_space.put_arrow_matrix(&mut x_from, h, &m);
                offset += r * c;
            }
            let residue = exponent.rem_euclid(p as i64) as usize;
            let j = from_table.classify_point(&x_from) as usize;
            sums[j][residue] += 1;

            let mut i = flip_entries;
            let mut done = true;
            while i > 0 {
                i -= 1;
                y[i] += 1;
                if (y[i] as u64) < p {
                    done = false;
                    break;
                }
                y[i] = 0;
            }
            if done {
                break;
            }
        }

        let to_class = to_table.classify_point(x_to) as usize;
        let is_representative = to_table.class(to_class as u32).rep.as_slice() == x_to;
        for (j, row) in sums.iter().enumerate() {
            let mut acc = field.zero();
            for (c, &count) in row.iter().enumerate() {
                if count == 0 {
                    continue;
                }
                acc = &acc + &(&field.from_u128(count as u128) * &psi_table[c]);
            }
            let value = &acc * &scale;
            if is_representative {
                *matrix.at_mut(to_class, j) = value;
            } else {
                // Invariance: every point of the class must produce the
                // same transform values as the canonical representative.
                assert_eq!(
                    &value,
                    matrix.at(to_class, j),
                    "transform of an invariant function failed to be invariant"
                );
            }
        }
    });
    psi_table.clear();
    Ok(matrix)
}

/// The Fourier transform of `f` to the orientation of `to`.
pub fn fourier(session: &Session, f: &OrbitFn, to: &Quiver) -> Result<OrbitFn> {
    let matrix = fourier_matrix(session, &f.quiver, to, &f.dims)?;
    let values = matrix.apply(&f.values);
    OrbitFn::from_values(session, to, &f.dims, values)
}
