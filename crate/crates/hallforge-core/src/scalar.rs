//! Exact arithmetic in the cyclotomic field `Q(zeta_n)` with `n = 4p`.
//!
//! Every quantity the engine manipulates lives in the cyclotomic field
//! generated by a primitive `4p`-th root of unity `zeta`, where `p` is the
//! (prime) order of the coefficient field of the representations.  This
//! field contains everything the theory needs:
//!
//! * a primitive `p`-th root of unity `zeta_p = zeta^4`, powering the
//!   additive character `psi` of `F_p`,
//! * the imaginary unit `i = zeta^p`, and
//! * an exact square root `v` of `p`, realized by a quadratic Gauss sum,
//!   so `v * v == p` holds on the nose (asserted at field construction).
//!
//! Elements are stored in the power basis `1, zeta, ..., zeta^(phi-1)`
//! (`phi = deg Phi_n`, the degree of the `n`-th cyclotomic polynomial) as a
//! vector of integer numerators over a single positive denominator with
//! content 1.  That representation is canonical, so equality is plain
//! componentwise comparison.  All arithmetic is exact rational arithmetic
//! on big integers; no floating point appears anywhere.

use std::fmt;
use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

use crate::error::{Error, Result};

/// Trial-division primality test; the engine only ever sees small primes.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---------------------------------------------------------------------------
// Integer polynomial helpers (dense, low degree).
// ---------------------------------------------------------------------------

fn poly_mul_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Divide `a` by the monic polynomial `b`, panicking unless the division is
/// exact.  Only used while building cyclotomic polynomials, where exactness
/// is a theorem.
fn poly_div_exact_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    assert!(b[db].is_one(), "divisor must be monic");
    assert!(a.len() > db, "degree of dividend too small");
    let mut rem: Vec<BigInt> = a.to_vec();
    let mut quot = vec![BigInt::zero(); rem.len() - db];
    for k in (db..rem.len()).rev() {
        let c = rem[k].clone();
        if c.is_zero() {
            continue;
        }
        quot[k - db] = c.clone();
        for j in 0..=db {
            let t = &c * &b[j];
            rem[k - db + j] -= t;
        }
    }
    assert!(
        rem.iter().all(Zero::is_zero),
        "polynomial division left a remainder"
    );
    quot
}

/// The `n`-th cyclotomic polynomial, computed exactly as
/// `(x^n - 1) / prod_(d | n, d < n) Phi_d(x)`.
fn cyclotomic_poly(n: u64) -> Vec<BigInt> {
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    let mut den = vec![BigInt::one()];
    for d in 1..n {
        if n % d == 0 {
            den = poly_mul_int(&den, &cyclotomic_poly(d));
        }
    }
    poly_div_exact_int(&num, &den)
}

// ---------------------------------------------------------------------------
// Rational polynomial helpers (used only for the rare inversion path).
// ---------------------------------------------------------------------------

fn rp_trim(v: &mut Vec<BigRational>) {
    while v.len() > 1 && v.last().unwrap().is_zero() {
        v.pop();
    }
}

fn rp_is_zero(v: &[BigRational]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn rp_sub_mul(a: &[BigRational], q: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    // a - q*b
    let prod_len = q.len() + b.len() - 1;
    let mut out = vec![BigRational::zero(); a.len().max(prod_len)];
    for (i, c) in a.iter().enumerate() {
        out[i] = c.clone();
    }
    for (i, qi) in q.iter().enumerate() {
        if qi.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            let t = qi * bj;
            out[i + j] -= t;
        }
    }
    rp_trim(&mut out);
    out
}

fn rp_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    rp_trim(&mut rem);
    let mut bb = b.to_vec();
    rp_trim(&mut bb);
    let db = bb.len() - 1;
    let lead = bb[db].clone();
    if rem.len() <= db || rp_is_zero(&rem) {
        return (vec![BigRational::zero()], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for k in (db..rem.len()).rev() {
        if rem[k].is_zero() {
            continue;
        }
        let c = &rem[k] / &lead;
        quot[k - db] = c.clone();
        for j in 0..=db {
            let t = &c * &bb[j];
            rem[k - db + j] -= t;
        }
    }
    rp_trim(&mut rem);
    (quot, rem)
}

// ---------------------------------------------------------------------------
// Field
// ---------------------------------------------------------------------------

#[derive(Debug)]
struct FieldInner {
    /// The prime order of the representation coefficient field.
    p: u64,
    /// Conductor of the cyclotomic field: `n = 4p`.
    n: u64,
    /// Degree of the field over the rationals.
    phi: usize,
    /// Coefficients `c_0 ... c_phi` of the `n`-th cyclotomic polynomial.
    min_poly: Vec<BigInt>,
    /// `reduction[k]` expresses `zeta^(phi+k)` in the power basis,
    /// for `k = 0 ..= n-1-phi`.  All rows are integral because the minimal
    /// polynomial is monic.
    reduction: Vec<Vec<BigInt>>,
    /// Power-basis coefficients of `v = sqrt(p)` (denominator 1).
    v_coeffs: Vec<BigInt>,
}

/// A handle to the cyclotomic coefficient field `Q(zeta_(4p))`.
///
/// Cheap to clone; all scalars hold one.  Two handles are interchangeable
/// iff they have the same conductor (the internal tables are deterministic
/// functions of `p`).
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field(p={}, n={})", self.0.p, self.0.n)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.n == other.0.n
    }
}
impl Eq for Field {}

impl Field {
    /// Build the coefficient field for representations over `F_p`.
    ///
    /// Errors if `p` is not prime.  Construction computes the cyclotomic
    /// minimal polynomial, the power-basis reduction table, and the Gauss
    /// sum square root of `p`, then asserts `v * v == p`.
    pub fn new(p: u64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let n = 4 * p;
        let min_poly = cyclotomic_poly(n);
        let phi = min_poly.len() - 1;

        // Reduction rows for zeta^phi ... zeta^(n-1).
        let base: Vec<BigInt> = (0..phi).map(|j| -min_poly[j].clone()).collect();
        let mut reduction: Vec<Vec<BigInt>> = Vec::with_capacity(n as usize - phi);
        reduction.push(base.clone());
        for _ in 1..(n as usize - phi) {
            let prev = reduction.last().unwrap();
            let t = prev[phi - 1].clone();
            let mut row = vec![BigInt::zero(); phi];
            for j in 1..phi {
                row[j] = prev[j - 1].clone();
            }
            if !t.is_zero() {
                for j in 0..phi {
                    row[j] += &t * &base[j];
                }
            }
            reduction.push(row);
        }

        // Power-basis coefficients of zeta^e for any e in 0..n.
        let zeta_row = |e: u64| -> Vec<BigInt> {
            let e = e % n;
            if (e as usize) < phi {
                let mut row = vec![BigInt::zero(); phi];
                row[e as usize] = BigInt::one();
                row
            } else {
                reduction[e as usize - phi].clone()
            }
        };

        // v = sqrt(p) via the quadratic Gauss sum.
        let v_coeffs: Vec<BigInt> = if p == 2 {
            // zeta is a primitive 8th root of unity: zeta - zeta^3 squares to 2.
            let mut row = zeta_row(1);
            for (j, c) in zeta_row(3).into_iter().enumerate() {
                row[j] -= c;
            }
            row
        } else {
            // g = sum_a zeta_p^(a^2) squares to (-1)^((p-1)/2) p, with
            // zeta_p = zeta^4; multiply by zeta^(3p) = -i when p = 3 mod 4.
            let mut g = vec![BigInt::zero(); phi];
            for a in 0..p {
                let e = (4 * ((a * a) % n)) % n;
                for (j, c) in zeta_row(e).into_iter().enumerate() {
                    g[j] += c;
                }
            }
            if p % 4 == 1 {
                g
            } else {
                let mut out = vec![BigInt::zero(); phi];
                for (a, c) in g.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let e = (a as u64 + 3 * p) % n;
                    for (j, r) in zeta_row(e).into_iter().enumerate() {
                        out[j] += c * r;
                    }
                }
                out
            }
        };

        let inner = FieldInner {
            p,
            n,
            phi,
            min_poly,
            reduction,
            v_coeffs,
        };

        // v * v must equal p exactly.
        let sq = mul_reduce(&inner.v_coeffs, &inner.v_coeffs, &inner);
        let mut expect = vec![BigInt::zero(); phi];
        expect[0] = BigInt::from(p);
        assert_eq!(sq, expect, "Gauss-sum square root failed v^2 = p");

        Ok(Field(Arc::new(inner)))
    }

    /// The prime `p`.
    pub fn p(&self) -> u64 {
        self.0.p
    }

    /// The conductor `n = 4p`.
    pub fn conductor(&self) -> u64 {
        self.0.n
    }

    /// Degree of the field over the rationals.
    pub fn degree(&self) -> usize {
        self.0.phi
    }

    /// The zero scalar.
    pub fn zero(&self) -> Scalar {
        Scalar {
            field: self.clone(),
            num: vec![BigInt::zero(); self.0.phi],
            den: BigInt::one(),
        }
    }

    /// The unit scalar.
    pub fn one(&self) -> Scalar {
        self.from_int(1)
    }

    /// Embed an integer.
    pub fn from_int(&self, k: i64) -> Scalar {
        self.from_bigint(BigInt::from(k))
    }

    /// Embed a big integer.
    pub fn from_bigint(&self, k: BigInt) -> Scalar {
        let mut num = vec![BigInt::zero(); self.0.phi];
        num[0] = k;
        Scalar {
            field: self.clone(),
            num,
            den: BigInt::one(),
        }
    }

    /// Embed an unsigned 128-bit integer (e.g. a group order).
    pub fn from_u128(&self, k: u128) -> Scalar {
        self.from_bigint(BigInt::from(k))
    }

    /// Embed the rational `a / b`.  Panics if `b == 0`.
    pub fn from_ratio(&self, a: i64, b: i64) -> Scalar {
        assert!(b != 0, "zero denominator");
        let mut num = vec![BigInt::zero(); self.0.phi];
        num[0] = BigInt::from(a);
        Scalar {
            field: self.clone(),
            num,
            den: BigInt::from(b),
        }
        .normalized()
    }

    /// Embed a big rational.
    pub fn from_big_ratio(&self, r: &BigRational) -> Scalar {
        let mut num = vec![BigInt::zero(); self.0.phi];
        num[0] = r.numer().clone();
        Scalar {
            field: self.clone(),
            num,
            den: r.denom().clone(),
        }
        .normalized()
    }

    /// Build a scalar from power-basis coefficients (length at most `phi`).
    pub fn scalar_from_coeffs(&self, coeffs: &[BigRational]) -> Result<Scalar> {
        if coeffs.len() > self.0.phi {
            return Err(Error::InvalidInput(format!(
                "{} coefficients exceed field degree {}",
                coeffs.len(),
                self.0.phi
            )));
        }
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        let mut num = vec![BigInt::zero(); self.0.phi];
        for (i, c) in coeffs.iter().enumerate() {
            num[i] = c.numer() * (&den / c.denom());
        }
        Ok(Scalar {
            field: self.clone(),
            num,
            den,
        }
        .normalized())
    }

    /// The root of unity `zeta^k` (any integer exponent).
    pub fn zeta(&self, k: i64) -> Scalar {
        let n = self.0.n as i64;
        let e = k.rem_euclid(n) as u64;
        let num = if (e as usize) < self.0.phi {
            let mut row = vec![BigInt::zero(); self.0.phi];
            row[e as usize] = BigInt::one();
            row
        } else {
            self.0.reduction[e as usize - self.0.phi].clone()
        };
        Scalar {
            field: self.clone(),
            num,
            den: BigInt::one(),
        }
    }

    /// The additive character `psi(c) = zeta_p^c` of `F_p`, where
    /// `zeta_p = zeta^4`.
    pub fn psi(&self, c: u64) -> Scalar {
        self.zeta(4 * (c % self.0.p) as i64)
    }

    /// The square root `v` of `p`.
    pub fn v(&self) -> Scalar {
        Scalar {
            field: self.clone(),
            num: self.0.v_coeffs.clone(),
            den: BigInt::one(),
        }
    }

    /// `v^k` for any integer `k`; negative powers use `v^-1 = v / p`.
    pub fn v_pow(&self, k: i64) -> Scalar {
        let half = k.div_euclid(2);
        let rem = k.rem_euclid(2);
        let mut out = self.p_pow(half);
        if rem == 1 {
            out = &out * &self.v();
        }
        out
    }

    /// The rational power `p^k` for any integer `k`.
    pub fn p_pow(&self, k: i64) -> Scalar {
        let p = BigInt::from(self.0.p);
        let mag = num::pow::pow(p, k.unsigned_abs() as usize);
        if k >= 0 {
            self.from_bigint(mag)
        } else {
            let mut num = vec![BigInt::zero(); self.0.phi];
            num[0] = BigInt::one();
            Scalar {
                field: self.clone(),
                num,
                den: mag,
            }
        }
    }

    /// The balanced quantum integer
    /// `[m] = (v^m - v^-m)/(v - v^-1) = v^(m-1) + v^(m-3) + ... + v^(1-m)`.
    pub fn quantum_int(&self, m: u64) -> Scalar {
        let mut out = self.zero();
        for k in 0..m {
            out = &out + &self.v_pow(m as i64 - 1 - 2 * k as i64);
        }
        out
    }

    /// The quantum factorial `[m]! = [1][2]...[m]`.
    pub fn quantum_factorial(&self, m: u64) -> Scalar {
        let mut out = self.one();
        for k in 1..=m {
            out = &out * &self.quantum_int(k);
        }
        out
    }
}

/// Multiply two power-basis coefficient vectors and reduce modulo the
/// minimal polynomial, entirely over the integers.
fn mul_reduce(a: &[BigInt], b: &[BigInt], inner: &FieldInner) -> Vec<BigInt> {
    let phi = inner.phi;
    let mut conv = vec![BigInt::zero(); 2 * phi - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            conv[i + j] += ai * bj;
        }
    }
    let mut out: Vec<BigInt> = conv[..phi].to_vec();
    for k in phi..(2 * phi - 1) {
        if conv[k].is_zero() {
            continue;
        }
        let row = &inner.reduction[k - phi];
        for j in 0..phi {
            if !row[j].is_zero() {
                out[j] += &conv[k] * &row[j];
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Scalar
// ---------------------------------------------------------------------------

/// An element of the cyclotomic coefficient field, stored canonically as
/// integer numerators over a positive common denominator with content 1.
#[derive(Clone)]
pub struct Scalar {
    field: Field,
    num: Vec<BigInt>,
    den: BigInt,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.den == other.den && self.num == other.num
    }
}
impl Eq for Scalar {}

impl Scalar {
    /// The field this scalar belongs to.
    pub fn field(&self) -> &Field {
        &self.field
    }

    fn normalized(mut self) -> Scalar {
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
            return self;
        }
        let mut g = self.den.abs();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            for c in &mut self.num {
                *c /= &g;
            }
            self.den /= &g;
        }
        if self.den.is_negative() {
            for c in &mut self.num {
                *c = -std::mem::take(c);
            }
            self.den = -self.den;
        }
        self
    }

    /// True iff this is the zero scalar.
    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// True iff this scalar lies in the rationals.
    pub fn is_rational(&self) -> bool {
        self.num[1..].iter().all(Zero::is_zero)
    }

    /// Return the scalar as a rational if it is one.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    /// Return the scalar as an integer if it is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.is_rational() && self.den.is_one() {
            Some(self.num[0].clone())
        } else {
            None
        }
    }

    fn check_same_field(&self, other: &Scalar) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                left: self.field.conductor(),
                right: other.field.conductor(),
            })
        }
    }

    /// Checked addition; errors on a conductor mismatch.
    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        self.check_same_field(other)?;
        let mut num = Vec::with_capacity(self.num.len());
        for (a, b) in self.num.iter().zip(&other.num) {
            num.push(a * &other.den + b * &self.den);
        }
        Ok(Scalar {
            field: self.field.clone(),
            num,
            den: &self.den * &other.den,
        }
        .normalized())
    }

    /// Checked subtraction; errors on a conductor mismatch.
    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.try_add(&(-other))
    }

    /// Checked multiplication; errors on a conductor mismatch.
    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.check_same_field(other)?;
        // Fast path: scaling by a rational.
        if other.is_rational() {
            let num = self.num.iter().map(|c| c * &other.num[0]).collect();
            return Ok(Scalar {
                field: self.field.clone(),
                num,
                den: &self.den * &other.den,
            }
            .normalized());
        }
        if self.is_rational() {
            return other.try_mul(self);
        }
        let num = mul_reduce(&self.num, &other.num, &self.field.0);
        Ok(Scalar {
            field: self.field.clone(),
            num,
            den: &self.den * &other.den,
        }
        .normalized())
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(self.field.from_big_ratio(&r.recip()));
        }
        // Extended Euclid over Q[x] against the minimal polynomial: find s
        // with s*a + t*Phi = gcd = nonzero constant; then a^-1 = s / gcd.
        let a: Vec<BigRational> = self
            .num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect();
        let phi_poly: Vec<BigRational> = self
            .field
            .0
            .min_poly
            .iter()
            .map(|c| BigRational::from(c.clone()))
            .collect();
        let mut r0 = phi_poly;
        let mut s0 = vec![BigRational::zero()];
        let mut r1 = a;
        rp_trim(&mut r1);
        let mut s1 = vec![BigRational::one()];
        while !rp_is_zero(&r1) {
            let (q, r2) = rp_divmod(&r0, &r1);
            let s2 = rp_sub_mul(&s0, &q, &s1);
            r0 = r1;
            s0 = s1;
            r1 = r2;
            s1 = s2;
        }
        debug_assert!(r0.len() == 1 && !r0[0].is_zero(), "minimal polynomial is irreducible");
        let c = r0[0].clone();
        let coeffs: Vec<BigRational> = s0.iter().map(|x| x / &c).collect();
        self.field.scalar_from_coeffs(&coeffs)
    }

    /// Checked division; errors on zero divisor or conductor mismatch.
    pub fn try_div(&self, other: &Scalar) -> Result<Scalar> {
        self.try_mul(&other.inv()?)
    }

    /// Integer power; negative exponents invert (erroring on zero).
    pub fn pow(&self, e: i64) -> Result<Scalar> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut out = self.field.one();
        let mut acc = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &acc;
            }
            k >>= 1;
            if k > 0 {
                acc = &acc * &acc;
            }
        }
        Ok(out)
    }

    /// Serialize to the portable JSON form
    /// `{"n": conductor, "coeffs": ["a/b", ...]}` with one reduced rational
    /// string per power-basis coefficient.
    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: Vec<String> = self
            .num
            .iter()
            .map(|c| {
                let r = BigRational::new(c.clone(), self.den.clone());
                if r.denom().is_one() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            })
            .collect();
        serde_json::json!({ "n": self.field.conductor(), "coeffs": coeffs })
    }

    /// Parse the JSON form produced by [`Scalar::to_json`], checking that
    /// the conductor matches `field`.
    pub fn from_json(field: &Field, value: &serde_json::Value) -> Result<Scalar> {
        let n = value
            .get("n")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::InvalidInput("scalar json missing conductor".into()))?;
        if n != field.conductor() {
            return Err(Error::FieldMismatch {
                left: field.conductor(),
                right: n,
            });
        }
        let arr = value
            .get("coeffs")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::InvalidInput("scalar json missing coeffs".into()))?;
        let mut coeffs = Vec::with_capacity(arr.len());
        for c in arr {
            let s = c
                .as_str()
                .ok_or_else(|| Error::InvalidInput("scalar coefficient must be a string".into()))?;
            coeffs.push(parse_rational(s)?);
        }
        field.scalar_from_coeffs(&coeffs)
    }
}

/// Parse `"a"` or `"a/b"` into a rational.
fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("malformed rational: {s:?}"));
    match s.split_once('/') {
        None => {
            let n: BigInt = s.trim().parse().map_err(|_| bad())?;
            Ok(BigRational::from(n))
        }
        Some((a, b)) => {
            let n: BigInt = a.trim().parse().map_err(|_| bad())?;
            let d: BigInt = b.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        // Try a rational multiple of v, the most common irrational shape.
        let over_v = self * &self.field.v_pow(-1);
        if let Some(r) = over_v.as_rational() {
            if r.is_one() {
                return write!(f, "v");
            }
            return write!(f, "{r}*v");
        }
        let mut first = true;
        write!(f, "(")?;
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*z")?,
                _ => write!(f, "{c}*z^{k}")?,
            }
        }
        write!(f, ")")?;
        if !self.den.is_one() {
            write!(f, "/{}", self.den)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("scalar operation failed")
            }
        }
        impl std::ops::$trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$checked(&rhs).expect("scalar operation failed")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            field: self.field.clone(),
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::ops::AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = (&*self) + rhs;
    }
}

impl std::ops::SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = (&*self) - rhs;
    }
}

impl std::ops::MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = (&*self) * rhs;
    }
}

impl std::ops::Add<&Scalar> for Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        &self + rhs
    }
}

impl std::ops::Mul<&Scalar> for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        &self * rhs
    }
}
