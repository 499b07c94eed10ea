//! The Hall algebra of a quiver over a fixed prime field, together with
//! its torus extension.
//!
//! The Hall algebra has one basis element `u_c` per isomorphism class `c`
//! of representations.  Its structure constants are the Hall numbers
//! `g^gamma_(alpha, beta)`: the number of subrepresentations of a fixed
//! representative of `gamma` isomorphic to `beta` with quotient isomorphic
//! to `alpha`.  The *twisted* product rescales each structure constant by
//! `v^<alpha, beta>` where `v = sqrt(p)` and `< , >` is the Euler form.
//!
//! The extended algebra adjoins a torus of group-like elements `K_mu`
//! (`mu` an integer vector over the vertices) to the twisted Hall algebra,
//! with the straightening rules
//!
//! ```text
//!   u+_alpha K_mu = v^-(mu, alpha) K_mu u+_alpha      (plus flavor)
//!   u-_alpha K_mu = v^+(alpha, mu) K_mu u-_alpha      (minus flavor)
//! ```
//!
//! where `( , )` is the symmetric Euler form.  The plus and minus flavors
//! share the same Hall structure constants; the flavor only switches the
//! straightening sign and selects the side of the bilinear pairing.  All
//! elements are kept in the normal form with `K`'s on the left.
//!
//! On top of the product this module implements the comultiplication
//!
//! ```text
//!   Delta(u_lam) = sum v^<a, b> (a_a a_b / a_lam) g^lam_(a, b)
//!                      (u_a K_b) (x) u_b ,
//!   Delta(K_mu)  = K_mu (x) K_mu ,
//! ```
//!
//! the counit (`eps(K_mu) = 1`, `eps(u_lam) = 0` for `lam != 0`), and the
//! bilinear pairing between the plus and minus halves
//!
//! ```text
//!   phi(K_mu u+_a, K_nu u-_b)
//!     = v^(-(mu,nu) - (a,nu) + (mu,b)) |V_a| / a_a   if a = b, else 0,
//! ```
//!
//! with `|V_a| = p^dim(a)` and `a_a` the automorphism count of the class.
//! Together these satisfy (and the tests verify on small ranges) the
//! bialgebra axioms, compatibility of the coproduct with the product, and
//! the adjunction `phi(x y, z) = phi(x (x) y, Delta(z))`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::quiver::{self, Quiver};
use crate::repspace::{ClassId, Session};
use crate::scalar::{Field, Scalar};

/// Whether a Hall product carries the Euler-form power of `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Twist {
    /// Plain structure constants `g^gamma_(alpha, beta)`.
    Plain,
    /// Structure constants `v^<alpha, beta> g^gamma_(alpha, beta)`.
    Twisted,
}

/// Which half of the extended algebra an element lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Plus,
    Minus,
}

/// The class of the zero representation (empty dimension vector support).
pub fn zero_class(n_vertices: usize) -> ClassId {
    ClassId::new(vec![0; n_vertices], 0)
}

// ---------------------------------------------------------------------------
// Plain Hall elements
// ---------------------------------------------------------------------------

/// A finitely supported linear combination of class basis elements `u_c`.
///
/// Zero coefficients are pruned, so structural equality is equality of
/// elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HallElt {
    field: Field,
    terms: BTreeMap<ClassId, Scalar>,
}

impl HallElt {
    pub fn zero(field: Field) -> HallElt {
        HallElt {
            field,
            terms: BTreeMap::new(),
        }
    }

    /// The multiplicative unit `u_0` on a quiver with `n_vertices` vertices.
    pub fn unit(field: Field, n_vertices: usize) -> HallElt {
        let one = field.one();
        HallElt::zero(field).with_term(zero_class(n_vertices), one)
    }

    /// The basis element `u_c` with coefficient one.
    pub fn basis(field: Field, class: ClassId) -> HallElt {
        let one = field.one();
        HallElt::zero(field).with_term(class, one)
    }

    fn with_term(mut self, class: ClassId, coeff: Scalar) -> HallElt {
        self.add_term(class, coeff);
        self
    }

    /// Add `coeff * u_class`, pruning zeros.
    pub fn add_term(&mut self, class: ClassId, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(class) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of `u_class` (zero if absent).
    pub fn coeff(&self, class: &ClassId) -> Scalar {
        self.terms
            .get(class)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn terms(&self) -> &BTreeMap<ClassId, Scalar> {
        &self.terms
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn scale(&self, s: &Scalar) -> HallElt {
        let mut out = HallElt::zero(self.field.clone());
        for (c, a) in &self.terms {
            out.add_term(c.clone(), a * s);
        }
        out
    }

    pub fn add(&self, other: &HallElt) -> Result<HallElt> {
        check_fields(&self.field, &other.field)?;
        let mut out = self.clone();
        for (c, a) in &other.terms {
            out.add_term(c.clone(), a.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &HallElt) -> Result<HallElt> {
        check_fields(&self.field, &other.field)?;
        let mut out = self.clone();
        for (c, a) in &other.terms {
            out.add_term(c.clone(), -a.clone());
        }
        Ok(out)
    }
}

fn check_fields(left: &Field, right: &Field) -> Result<()> {
    if left != right {
        return Err(Error::FieldMismatch {
            left: left.conductor(),
            right: right.conductor(),
        });
    }
    Ok(())
}

fn check_session(session: &Session, field: &Field) -> Result<()> {
    check_fields(session.field(), field)
}

/// The automorphism count `a_c` of a class, as a scalar.
pub fn aut_scalar(session: &Session, quiver: &Quiver, class: &ClassId) -> Result<Scalar> {
    Ok(session.field().from_u128(session.aut_order(quiver, class)?))
}

/// The Hall product of two elements.
///
/// For basis elements, `u_alpha * u_beta = t sum_gamma g^gamma_(alpha,
/// beta) u_gamma` where `t` is `v^<alpha, beta>` for [`Twist::Twisted`]
/// and `1` for [`Twist::Plain`]; the general product is bilinear.
pub fn hall_mul(
    session: &Session,
    quiver: &Quiver,
    a: &HallElt,
    b: &HallElt,
    twist: Twist,
) -> Result<HallElt> {
    check_session(session, &a.field)?;
    check_fields(&a.field, &b.field)?;
    let field = session.field();
    let mut out = HallElt::zero(field.clone());
    for (ac, ca) in &a.terms {
        for (bc, cb) in &b.terms {
            let gamma_dims = quiver::dims_add(&ac.dims, &bc.dims);
            let counts = session.subquot_counts(quiver, &ac.dims, &bc.dims)?;
            let twist_factor = match twist {
                Twist::Plain => field.one(),
                Twist::Twisted => field.v_pow(
                    quiver.euler_form(&quiver::to_i64(&ac.dims), &quiver::to_i64(&bc.dims)),
                ),
            };
            let base = &(ca * cb) * &twist_factor;
            for (gi, per_class) in counts.iter().enumerate() {
                if let Some(&g) = per_class.get(&(ac.index, bc.index)) {
                    out.add_term(
                        ClassId::new(gamma_dims.clone(), gi as u32),
                        &base * &field.from_u128(g as u128),
                    );
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Extended (torus-adjoined) elements
// ---------------------------------------------------------------------------

/// A basis label of the extended algebra: the torus exponent vector of
/// `K_mu` followed by the class of `u_c`, read as `K_mu u_c`.
pub type ExtKey = (Vec<i64>, ClassId);

/// An element of one flavor of the extended algebra, in the normal form
/// with all `K`'s on the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtElt {
    field: Field,
    flavor: Flavor,
    terms: BTreeMap<ExtKey, Scalar>,
}

impl ExtElt {
    pub fn zero(field: Field, flavor: Flavor) -> ExtElt {
        ExtElt {
            field,
            flavor,
            terms: BTreeMap::new(),
        }
    }

    /// The unit `K_0 u_0`.
    pub fn one(field: Field, flavor: Flavor, n_vertices: usize) -> ExtElt {
        ExtElt::torus(field, flavor, vec![0; n_vertices])
    }

    /// The torus element `K_mu`.
    pub fn torus(field: Field, flavor: Flavor, mu: Vec<i64>) -> ExtElt {
        let n = mu.len();
        let one = field.one();
        let mut out = ExtElt::zero(field, flavor);
        out.add_term((mu, zero_class(n)), one);
        out
    }

    /// The basis element `K_mu u_class`.
    pub fn basis(field: Field, flavor: Flavor, key: ExtKey) -> ExtElt {
        let one = field.one();
        let mut out = ExtElt::zero(field, flavor);
        out.add_term(key, one);
        out
    }

    /// The generator `u_class` (trivial torus part).
    pub fn generator(field: Field, flavor: Flavor, class: ClassId) -> ExtElt {
        let mu = vec![0; class.dims.len()];
        ExtElt::basis(field, flavor, (mu, class))
    }

    /// Embed a plain Hall element with trivial torus part.
    pub fn from_hall(h: &HallElt, flavor: Flavor, n_vertices: usize) -> ExtElt {
        let mut out = ExtElt::zero(h.field.clone(), flavor);
        for (c, a) in &h.terms {
            out.add_term((vec![0; n_vertices], c.clone()), a.clone());
        }
        out
    }

    pub fn add_term(&mut self, key: ExtKey, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &ExtKey) -> Scalar {
        self.terms
            .get(key)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn terms(&self) -> &BTreeMap<ExtKey, Scalar> {
        &self.terms
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn scale(&self, s: &Scalar) -> ExtElt {
        let mut out = ExtElt::zero(self.field.clone(), self.flavor);
        for (k, a) in &self.terms {
            out.add_term(k.clone(), a * s);
        }
        out
    }

    pub fn add(&self, other: &ExtElt) -> Result<ExtElt> {
        check_fields(&self.field, &other.field)?;
        check_flavors(self.flavor, other.flavor)?;
        let mut out = self.clone();
        for (k, a) in &other.terms {
            out.add_term(k.clone(), a.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ExtElt) -> Result<ExtElt> {
        check_fields(&self.field, &other.field)?;
        check_flavors(self.flavor, other.flavor)?;
        let mut out = self.clone();
        for (k, a) in &other.terms {
            out.add_term(k.clone(), -a.clone());
        }
        Ok(out)
    }
}

fn check_flavors(left: Flavor, right: Flavor) -> Result<()> {
    if left != right {
        return Err(Error::Incompatible(format!(
            "cannot combine {left:?}- and {right:?}-flavored extended elements"
        )));
    }
    Ok(())
}

fn check_mu(quiver: &Quiver, mu: &[i64]) -> Result<()> {
    if mu.len() != quiver.n_vertices() {
        return Err(Error::InvalidInput(format!(
            "torus exponent length {} does not match {} vertices",
            mu.len(),
            quiver.n_vertices()
        )));
    }
    Ok(())
}

/// Exponent `e` in the straightening rule `u_alpha K_nu = v^e K_nu u_alpha`
/// for the given flavor.
fn straighten_exponent(flavor: Flavor, quiver: &Quiver, nu: &[i64], alpha_dims: &[usize]) -> i64 {
    let alpha = quiver::to_i64(alpha_dims);
    match flavor {
        Flavor::Plus => -quiver.symmetric_form(nu, &alpha),
        Flavor::Minus => quiver.symmetric_form(&alpha, nu),
    }
}

/// The product in the extended algebra (the Hall part is always twisted):
///
/// ```text
///   (K_mu u_alpha)(K_nu u_beta)
///     = v^e K_(mu+nu) (u_alpha * u_beta),   e per the straightening rule.
/// ```
pub fn ext_mul(session: &Session, quiver: &Quiver, a: &ExtElt, b: &ExtElt) -> Result<ExtElt> {
    check_session(session, &a.field)?;
    check_fields(&a.field, &b.field)?;
    check_flavors(a.flavor, b.flavor)?;
    let field = session.field();
    let mut out = ExtElt::zero(field.clone(), a.flavor);
    for ((mu, ac), ca) in &a.terms {
        check_mu(quiver, mu)?;
        for ((nu, bc), cb) in &b.terms {
            check_mu(quiver, nu)?;
            let e = straighten_exponent(a.flavor, quiver, nu, &ac.dims);
            let twist =
                quiver.euler_form(&quiver::to_i64(&ac.dims), &quiver::to_i64(&bc.dims));
            let base = &(ca * cb) * &field.v_pow(e + twist);
            let knew: Vec<i64> = mu.iter().zip(nu).map(|(x, y)| x + y).collect();
            let gamma_dims = quiver::dims_add(&ac.dims, &bc.dims);
            let counts = session.subquot_counts(quiver, &ac.dims, &bc.dims)?;
            for (gi, per_class) in counts.iter().enumerate() {
                if let Some(&g) = per_class.get(&(ac.index, bc.index)) {
                    out.add_term(
                        (knew.clone(), ClassId::new(gamma_dims.clone(), gi as u32)),
                        &base * &field.from_u128(g as u128),
                    );
                }
            }
        }
    }
    Ok(out)
}

/// The counit: `eps(K_mu) = 1`, `eps(K_mu u_lam) = 0` for `lam != 0`,
/// extended linearly.
pub fn counit(elt: &ExtElt) -> Scalar {
    let mut out = elt.field.zero();
    for ((_, c), a) in &elt.terms {
        if c.dims.iter().all(|&d| d == 0) {
            out = &out + a;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Tensor squares and cubes
// ---------------------------------------------------------------------------

/// An element of the tensor square of one flavor of the extended algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor2 {
    field: Field,
    flavor: Flavor,
    terms: BTreeMap<(ExtKey, ExtKey), Scalar>,
}

/// An element of the tensor cube (used for the coassociativity check).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor3 {
    field: Field,
    flavor: Flavor,
    terms: BTreeMap<(ExtKey, ExtKey, ExtKey), Scalar>,
}

impl Tensor2 {
    pub fn zero(field: Field, flavor: Flavor) -> Tensor2 {
        Tensor2 {
            field,
            flavor,
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, key: (ExtKey, ExtKey), coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &(ExtKey, ExtKey)) -> Scalar {
        self.terms
            .get(key)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn terms(&self) -> &BTreeMap<(ExtKey, ExtKey), Scalar> {
        &self.terms
    }

    /// The outer product `a (x) b` of two extended elements.
    pub fn outer(a: &ExtElt, b: &ExtElt) -> Result<Tensor2> {
        check_fields(&a.field, &b.field)?;
        check_flavors(a.flavor, b.flavor)?;
        let mut out = Tensor2::zero(a.field.clone(), a.flavor);
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                out.add_term((ka.clone(), kb.clone()), ca * cb);
            }
        }
        Ok(out)
    }
}

impl Tensor3 {
    pub fn zero(field: Field, flavor: Flavor) -> Tensor3 {
        Tensor3 {
            field,
            flavor,
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, key: (ExtKey, ExtKey, ExtKey), coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<(ExtKey, ExtKey, ExtKey), Scalar> {
        &self.terms
    }
}

/// Componentwise product on the tensor square.  The coproduct's `K`
/// factors carry the twist, so no extra cross factor appears here.
pub fn tensor2_mul(
    session: &Session,
    quiver: &Quiver,
    s: &Tensor2,
    t: &Tensor2,
) -> Result<Tensor2> {
    check_session(session, &s.field)?;
    check_fields(&s.field, &t.field)?;
    check_flavors(s.flavor, t.flavor)?;
    let mut out = Tensor2::zero(s.field.clone(), s.flavor);
    for ((a1, a2), c) in &s.terms {
        for ((b1, b2), d) in &t.terms {
            let left = ext_mul(
                session,
                quiver,
                &ExtElt::basis(s.field.clone(), s.flavor, a1.clone()),
                &ExtElt::basis(s.field.clone(), s.flavor, b1.clone()),
            )?;
            let right = ext_mul(
                session,
                quiver,
                &ExtElt::basis(s.field.clone(), s.flavor, a2.clone()),
                &ExtElt::basis(s.field.clone(), s.flavor, b2.clone()),
            )?;
            let cd = c * d;
            for (k1, e1) in &left.terms {
                for (k2, e2) in &right.terms {
                    out.add_term((k1.clone(), k2.clone()), &(&cd * e1) * e2);
                }
            }
        }
    }
    Ok(out)
}

/// Every componentwise split `(a, b)` with `a + b = dims`.
fn for_each_split(dims: &[usize], mut f: impl FnMut(&[usize], &[usize]) -> Result<()>) -> Result<()> {
    let mut a = vec![0usize; dims.len()];
    loop {
        let b: Vec<usize> = dims.iter().zip(&a).map(|(&d, &x)| d - x).collect();
        f(&a, &b)?;
        let mut i = dims.len();
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            a[i] += 1;
            if a[i] <= dims[i] {
                break;
            }
            a[i] = 0;
        }
    }
}

/// The comultiplication, in the `K`-left normal form:
///
/// ```text
///   Delta(K_mu u_lam) = sum v^(<a, b> + e) (a_a a_b / a_lam)
///                           g^lam_(a, b)  K_(mu+b) u_a (x) K_mu u_b
/// ```
///
/// with `e` the straightening exponent moving `K_b` to the left of `u_a`
/// (flavor-dependent); both flavors use the same Hall data.
pub fn comultiply(session: &Session, quiver: &Quiver, elt: &ExtElt) -> Result<Tensor2> {
    check_session(session, &elt.field)?;
    let field = session.field();
    let mut out = Tensor2::zero(field.clone(), elt.flavor);
    for ((mu, lam), c) in &elt.terms {
        check_mu(quiver, mu)?;
        let a_lam = aut_scalar(session, quiver, lam)?;
        for_each_split(&lam.dims, |adims, bdims| {
            let counts = session.subquot_counts(quiver, adims, bdims)?;
            let per = &counts[lam.index as usize];
            if per.is_empty() {
                return Ok(());
            }
            let twist = quiver.euler_form(&quiver::to_i64(adims), &quiver::to_i64(bdims));
            let e = straighten_exponent(elt.flavor, quiver, &quiver::to_i64(bdims), adims);
            let b_i64 = quiver::to_i64(bdims);
            for (&(ai, bi), &g) in per {
                let acls = ClassId::new(adims.to_vec(), ai);
                let bcls = ClassId::new(bdims.to_vec(), bi);
                let a_a = aut_scalar(session, quiver, &acls)?;
                let a_b = aut_scalar(session, quiver, &bcls)?;
                let coeff = &(&(&(c * &field.v_pow(twist + e)) * &field.from_u128(g as u128))
                    * &(&a_a * &a_b))
                    .try_div(&a_lam)?;
                let left_mu: Vec<i64> = mu.iter().zip(&b_i64).map(|(x, y)| x + y).collect();
                out.add_term(((left_mu, acls), (mu.clone(), bcls)), coeff.clone());
            }
            Ok(())
        })?;
    }
    Ok(out)
}

/// `(Delta (x) id)` applied to a tensor square.
pub fn comultiply_left(session: &Session, quiver: &Quiver, t: &Tensor2) -> Result<Tensor3> {
    let mut out = Tensor3::zero(t.field.clone(), t.flavor);
    for ((k1, k2), c) in &t.terms {
        let inner = comultiply(
            session,
            quiver,
            &ExtElt::basis(t.field.clone(), t.flavor, k1.clone()),
        )?;
        for ((j1, j2), d) in &inner.terms {
            out.add_term((j1.clone(), j2.clone(), k2.clone()), c * d);
        }
    }
    Ok(out)
}

/// `(id (x) Delta)` applied to a tensor square.
pub fn comultiply_right(session: &Session, quiver: &Quiver, t: &Tensor2) -> Result<Tensor3> {
    let mut out = Tensor3::zero(t.field.clone(), t.flavor);
    for ((k1, k2), c) in &t.terms {
        let inner = comultiply(
            session,
            quiver,
            &ExtElt::basis(t.field.clone(), t.flavor, k2.clone()),
        )?;
        for ((j1, j2), d) in &inner.terms {
            out.add_term((k1.clone(), j1.clone(), j2.clone()), c * d);
        }
    }
    Ok(out)
}

/// `(eps (x) id)` applied to a tensor square, landing back in the algebra.
pub fn counit_left(t: &Tensor2) -> ExtElt {
    let mut out = ExtElt::zero(t.field.clone(), t.flavor);
    for (((_, c1), k2), c) in &t.terms {
        if c1.dims.iter().all(|&d| d == 0) {
            out.add_term(k2.clone(), c.clone());
        }
    }
    out
}

/// `(id (x) eps)` applied to a tensor square, landing back in the algebra.
pub fn counit_right(t: &Tensor2) -> ExtElt {
    let mut out = ExtElt::zero(t.field.clone(), t.flavor);
    for ((k1, (_, c2)), c) in &t.terms {
        if c2.dims.iter().all(|&d| d == 0) {
            out.add_term(k1.clone(), c.clone());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// The pairing between the two halves
// ---------------------------------------------------------------------------

/// The pairing of basis elements,
/// `phi(K_mu u+_a, K_nu u-_b) = v^(-(mu,nu) - (a,nu) + (mu,b)) |V_a|/a_a`
/// when `a = b` and zero otherwise.
fn pairing_basis(
    session: &Session,
    quiver: &Quiver,
    plus: &ExtKey,
    minus: &ExtKey,
) -> Result<Scalar> {
    let field = session.field();
    let (mu, a) = plus;
    let (nu, b) = minus;
    check_mu(quiver, mu)?;
    check_mu(quiver, nu)?;
    if a != b {
        return Ok(field.zero());
    }
    let a_i64 = quiver::to_i64(&a.dims);
    let b_i64 = quiver::to_i64(&b.dims);
    let exp = -quiver.symmetric_form(mu, nu) - quiver.symmetric_form(&a_i64, nu)
        + quiver.symmetric_form(mu, &b_i64);
    let points = field.p_pow(quiver::dim_total(&a.dims) as i64);
    let aut = aut_scalar(session, quiver, a)?;
    (&field.v_pow(exp) * &points).try_div(&aut)
}

/// The bilinear pairing of a plus element against a minus element.
pub fn pairing(
    session: &Session,
    quiver: &Quiver,
    plus: &ExtElt,
    minus: &ExtElt,
) -> Result<Scalar> {
    check_session(session, &plus.field)?;
    check_fields(&plus.field, &minus.field)?;
    if plus.flavor != Flavor::Plus || minus.flavor != Flavor::Minus {
        return Err(Error::Incompatible(
            "pairing takes a plus-flavored left operand and a minus-flavored right operand"
                .to_string(),
        ));
    }
    let mut out = session.field().zero();
    for (ka, ca) in &plus.terms {
        for (kb, cb) in &minus.terms {
            let phi = pairing_basis(session, quiver, ka, kb)?;
            out = &out + &(&(ca * cb) * &phi);
        }
    }
    Ok(out)
}

/// The pairing of tensor squares, `phi(a (x) b, c (x) d) = phi(a, c)
/// phi(b, d)` extended bilinearly (used for the adjunction test).
pub fn tensor_pairing(
    session: &Session,
    quiver: &Quiver,
    plus: &Tensor2,
    minus: &Tensor2,
) -> Result<Scalar> {
    check_session(session, &plus.field)?;
    check_fields(&plus.field, &minus.field)?;
    if plus.flavor != Flavor::Plus || minus.flavor != Flavor::Minus {
        return Err(Error::Incompatible(
            "tensor pairing takes a plus square against a minus square".to_string(),
        ));
    }
    let mut out = session.field().zero();
    for ((a1, a2), c) in &plus.terms {
        for ((b1, b2), d) in &minus.terms {
            let p1 = pairing_basis(session, quiver, a1, b1)?;
            if p1.is_zero() {
                continue;
            }
            let p2 = pairing_basis(session, quiver, a2, b2)?;
            out = &out + &(&(&(c * d) * &p1) * &p2);
        }
    }
    Ok(out)
}
