//! Check-suite runner with machine-readable reports.
//!
//! A [`RunConfig`] names a base quiver, a prime, a framing weight, and
//! search bounds; [`run`] executes the selected [`Suite`]s and collects
//! one [`CheckRecord`] per executed check.  Identity failures mark the
//! check failed with a witness; enumerations that would exceed the hard
//! size ceilings mark it skipped-at-scale without failing the run.
//!
//! Reports serialize to JSON with a stable key order, so two runs over
//! the same configuration produce byte-identical documents once the
//! timing fields are stripped (see [`Report::normalized_json`]).

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fourier::{embed_into_framed, fn_mul, fourier, hall_to_function, OrbitFn};
use crate::framed::{
    act, base_dims_up_to, check_commutator_closed_form, check_descent_well_defined,
    check_lowering_diagram, check_raising_diagram, check_relation, fiber_check, generator,
    has_simple_summand, highest_weight_dims, is_source, FramedSession, Framing, GenOp,
};
use crate::gflin;
use crate::hall::{
    comultiply, comultiply_left, comultiply_right, counit, counit_left, counit_right, ext_mul,
    hall_mul, pairing, tensor2_mul, tensor_pairing, ExtElt, Flavor, HallElt, Tensor2, Twist,
};
use crate::quiver::{self, Quiver};
use crate::repspace::{ClassId, Session};
use crate::scalar::Scalar;

/// The check families a run can execute.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Suite {
    /// Orbit partitions of representation spaces: orbit sizes sum to the
    /// point count and divide the group order.
    Classes,
    /// Hall-number substrate: pinned small values, twisted associativity,
    /// and the function realization of the Hall product.
    HallNumbers,
    /// Finite-field Fourier transforms: inversion, composition, and
    /// multiplicativity for the induction product.
    Fourier,
    /// Comultiplication, counit, and pairing laws on the extended algebra.
    Hopf,
    /// The defining operator relations on the framed function spaces.
    Relations,
    /// Highest-weight structure of the function-space modules.
    Module,
    /// Fiber cardinalities of the lowering correspondence against the
    /// closed Hall-data formula.
    Fiber,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Classes,
        Suite::HallNumbers,
        Suite::Fourier,
        Suite::Hopf,
        Suite::Relations,
        Suite::Module,
        Suite::Fiber,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Classes => "classes",
            Suite::HallNumbers => "hallnum",
            Suite::Fourier => "fourier",
            Suite::Hopf => "hopf",
            Suite::Relations => "relations",
            Suite::Module => "module",
            Suite::Fiber => "fiber",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        match s {
            "classes" => Some(Suite::Classes),
            "hallnum" => Some(Suite::HallNumbers),
            "fourier" => Some(Suite::Fourier),
            "hopf" => Some(Suite::Hopf),
            "relations" => Some(Suite::Relations),
            "module" => Some(Suite::Module),
            "fiber" => Some(Suite::Fiber),
            _ => None,
        }
    }
}

/// Everything a run needs: the quiver, the prime, the framing weight,
/// and the search bounds.  [`RunConfig::new`] fills in the default
/// bounds; callers override fields directly.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub base: Quiver,
    pub p: u64,
    pub omega: Vec<usize>,
    /// Cap on the base-degree total `|β|` of the weights `ω̂ + β` swept by
    /// the relation and module suites, and on the dimension totals of the
    /// Hall-number sweeps.
    pub max_degree: usize,
    /// Lowering depth for the module suite.
    pub depth: usize,
    /// Which numbered defining relations to check (subset of 1..=6).
    pub relations: Vec<u8>,
    pub suites: Vec<Suite>,
    /// Dimension-total cap for the operator classes of the diagonal-twist
    /// and mixed-commutator relations.
    pub class_cap: usize,
    /// Cap on `|α| + |β|` for the composite-lowering relation.
    pub pair_cap: usize,
    /// Orientation of the framing arrows.
    pub towards_frame: bool,
    pub cache_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(base: Quiver, p: u64, omega: Vec<usize>) -> RunConfig {
        let pair_cap = if base.n_vertices() == 1 { 4 } else { 3 };
        RunConfig {
            base,
            p,
            omega,
            max_degree: 3,
            depth: 3,
            relations: (1..=6).collect(),
            suites: Suite::ALL.to_vec(),
            class_cap: 2,
            pair_cap,
            towards_frame: true,
            cache_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega.len() != self.base.n_vertices() {
            return Err(Error::InvalidInput(format!(
                "framing weight has {} entries but the quiver has {} vertices",
                self.omega.len(),
                self.base.n_vertices()
            )));
        }
        for &r in &self.relations {
            if !(1..=6).contains(&r) {
                return Err(Error::InvalidInput(format!(
                    "unknown relation number {r} (expected 1..=6)"
                )));
            }
        }
        if self.suites.is_empty() {
            return Err(Error::InvalidInput("no suites selected".to_string()));
        }
        Ok(())
    }
}

/// Outcome of one check.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The check was skipped because an enumeration would exceed a hard
    /// size ceiling; this does not fail the run.
    Scale,
}

/// One executed check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub suite: &'static str,
    pub name: String,
    pub params: String,
    pub status: Status,
    /// A first-mismatch witness on failure, the ceiling message on a
    /// scale skip, or a summary note on success.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub millis: u128,
}

/// The result of a [`run`]: the configuration echo, every executed check
/// exactly once, and table-cache statistics.
#[derive(Clone, Debug)]
pub struct Report {
    pub schema: u32,
    pub engine: String,
    pub config: Value,
    pub checks: Vec<CheckRecord>,
    pub tables_built: u64,
    pub tables_from_memory: u64,
    pub tables_from_disk: u64,
    pub wall_millis: u128,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    /// `(passed, failed, skipped-at-scale)` counts.
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut pass = 0;
        let mut fail = 0;
        let mut scale = 0;
        for c in &self.checks {
            match c.status {
                Status::Pass => pass += 1,
                Status::Fail => fail += 1,
                Status::Scale => scale += 1,
            }
        }
        (pass, fail, scale)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": self.schema,
            "engine": self.engine,
            "config": self.config,
            "checks": serde_json::to_value(&self.checks).expect("checks serialize"),
            "cache": {
                "tables_built": self.tables_built,
                "tables_from_memory": self.tables_from_memory,
                "tables_from_disk": self.tables_from_disk,
            },
            "wall_millis": self.wall_millis,
        })
    }

    /// The JSON document with every timing- and cache-dependent field
    /// removed; two runs over the same configuration must agree on this.
    pub fn normalized_json(&self) -> Value {
        let mut doc = self.to_json();
        let obj = doc.as_object_mut().expect("report is an object");
        obj.remove("wall_millis");
        obj.remove("cache");
        if let Some(checks) = obj.get_mut("checks").and_then(Value::as_array_mut) {
            for c in checks {
                if let Some(co) = c.as_object_mut() {
                    co.remove("millis");
                }
            }
        }
        doc
    }

    /// One human-readable line per check plus a totals trailer.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS ",
                Status::Fail => "FAIL ",
                Status::Scale => "SCALE",
            };
            out.push_str(&format!("[{tag}] {}/{} {}", c.suite, c.name, c.params));
            if let Some(w) = &c.witness {
                out.push_str(&format!(" :: {w}"));
            }
            out.push('\n');
        }
        let (pass, fail, scale) = self.counts();
        out.push_str(&format!(
            "{} checks: {pass} passed, {fail} failed, {scale} skipped at scale ({} ms)\n",
            self.checks.len(),
            self.wall_millis
        ));
        out
    }
}

/// Run one check body, translating its outcome into a record.  Scale
/// ceilings are reported per check and never abort the run.
fn record(
    checks: &mut Vec<CheckRecord>,
    suite: Suite,
    name: &str,
    params: String,
    body: impl FnOnce() -> Result<Option<String>>,
) {
    let t = Instant::now();
    let (status, witness) = match body() {
        Ok(note) => (Status::Pass, note),
        Err(e @ Error::ScaleExceeded { .. }) => (Status::Scale, Some(e.to_string())),
        Err(e) => (Status::Fail, Some(e.to_string())),
    };
    checks.push(CheckRecord {
        suite: suite.name(),
        name: name.to_string(),
        params,
        status,
        witness,
        millis: t.elapsed().as_millis(),
    });
}

fn incompatible(msg: String) -> Error {
    Error::Incompatible(msg)
}

/// A quiver with a single vertex and no arrows.
fn is_point_quiver(q: &Quiver) -> bool {
    q.n_vertices() == 1 && q.arrows().is_empty()
}

/// A quiver with two vertices joined by a single arrow `0 -> 1`.
fn is_arrow_quiver(q: &Quiver) -> bool {
    q.n_vertices() == 2
        && q.arrows().len() == 1
        && q.arrows()[0].src == 0
        && q.arrows()[0].tgt == 1
}

/// All dimension vectors `0 <= d <= caps` componentwise, in
/// lexicographic order.
fn dims_boxed(caps: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for &c in caps {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=c).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Verify `(u_a * u_b) * u_c = u_a * (u_b * u_c)` in the twisted Hall
/// algebra for every class triple whose dimension vectors sum to at most
/// `caps` componentwise.  Returns the number of triples checked.
pub fn twisted_associativity(session: &Session, quiver: &Quiver, caps: &[usize]) -> Result<usize> {
    let field = session.field().clone();
    let all_dims: Vec<Vec<usize>> = dims_boxed(caps)
        .into_iter()
        .filter(|d| d.iter().sum::<usize>() > 0)
        .collect();
    let mut count = 0usize;
    for da in &all_dims {
        for db in &all_dims {
            let Some(ab) = try_dims_add_within(da, db, caps) else {
                continue;
            };
            for dc in &all_dims {
                if try_dims_add_within(&ab, dc, caps).is_none() {
                    continue;
                }
                for a in session.class_ids(quiver, da)? {
                    for b in session.class_ids(quiver, db)? {
                        for c in session.class_ids(quiver, dc)? {
                            let ua = HallElt::basis(field.clone(), a.clone());
                            let ub = HallElt::basis(field.clone(), b.clone());
                            let uc = HallElt::basis(field.clone(), c.clone());
                            let left = hall_mul(
                                session,
                                quiver,
                                &hall_mul(session, quiver, &ua, &ub, Twist::Twisted)?,
                                &uc,
                                Twist::Twisted,
                            )?;
                            let right = hall_mul(
                                session,
                                quiver,
                                &ua,
                                &hall_mul(session, quiver, &ub, &uc, Twist::Twisted)?,
                                Twist::Twisted,
                            )?;
                            if !left.sub(&right)?.is_zero() {
                                return Err(incompatible(format!(
                                    "twisted product is not associative on ({}, {}, {})",
                                    a.label(),
                                    b.label(),
                                    c.label()
                                )));
                            }
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(count)
}

fn try_dims_add_within(a: &[usize], b: &[usize], caps: &[usize]) -> Option<Vec<usize>> {
    let sum = quiver::dims_add(a, b);
    if sum.iter().zip(caps).all(|(&s, &c)| s <= c) {
        Some(sum)
    } else {
        None
    }
}

/// Verify, for every class pair with `|α| + |β| <= cap`, that
/// (a) the induction product of indicator functions takes the value
/// `v^{-m(α,β)} g^γ_{α,β}` on each class `γ`, with the Hall number
/// recomputed independently by counting monomorphisms, and (b) the linear
/// realization `u_λ -> v^{dim V_λ - dim G_λ} 1_λ` intertwines the twisted
/// Hall product with the induction product.  Returns the pair count.
pub fn hall_function_checks(session: &Session, quiver: &Quiver, cap: usize) -> Result<usize> {
    let field = session.field().clone();
    let n = quiver.n_vertices();
    let mut count = 0usize;
    for adims in base_dims_up_to(n, cap) {
        let a_total: usize = adims.iter().sum();
        if a_total == 0 {
            continue;
        }
        for bdims in base_dims_up_to(n, cap - a_total) {
            if bdims.iter().sum::<usize>() == 0 {
                continue;
            }
            let m = quiver.m_factor(&quiver::to_i64(&adims), &quiver::to_i64(&bdims));
            let gamma_dims = quiver::dims_add(&adims, &bdims);
            let gammas = session.class_ids(quiver, &gamma_dims)?;
            for alpha in session.class_ids(quiver, &adims)? {
                for beta in session.class_ids(quiver, &bdims)? {
                    let f1 = OrbitFn::indicator(session, quiver, &alpha)?;
                    let f2 = OrbitFn::indicator(session, quiver, &beta)?;
                    let prod = fn_mul(session, &f1, &f2)?;
                    for gamma in &gammas {
                        let g = session.hall_number_via_monos(quiver, gamma, &alpha, &beta)?;
                        let expected = &field.v_pow(-m) * &field.from_u128(u128::from(g));
                        if prod.value(gamma.index) != &expected {
                            return Err(incompatible(format!(
                                "indicator product disagrees with the monomorphism count at \
                                 ({}, {}) -> {}",
                                alpha.label(),
                                beta.label(),
                                gamma.label()
                            )));
                        }
                    }
                    let ua = HallElt::basis(field.clone(), alpha.clone());
                    let ub = HallElt::basis(field.clone(), beta.clone());
                    let hall = hall_mul(session, quiver, &ua, &ub, Twist::Twisted)?;
                    let lhs = hall_to_function(session, quiver, &hall, &gamma_dims)?;
                    let fa = hall_to_function(session, quiver, &ua, &adims)?;
                    let fb = hall_to_function(session, quiver, &ub, &bdims)?;
                    let rhs = fn_mul(session, &fa, &fb)?;
                    if lhs != rhs {
                        return Err(incompatible(format!(
                            "function realization is not multiplicative on ({}, {})",
                            alpha.label(),
                            beta.label()
                        )));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Coassociativity and the counit axioms for both flavors on every class
/// of dimension total at most `cap`, with and without a torus factor.
/// Returns the instance count.
pub fn coassociativity_checks(session: &Session, quiver: &Quiver, cap: usize) -> Result<usize> {
    let field = session.field().clone();
    let n = quiver.n_vertices();
    let mut mus: Vec<Vec<i64>> = vec![vec![0; n]];
    let mut e0 = vec![0i64; n];
    e0[0] = 1;
    mus.push(e0);
    let mut count = 0usize;
    for flavor in [Flavor::Plus, Flavor::Minus] {
        for dims in base_dims_up_to(n, cap) {
            for lam in session.class_ids(quiver, &dims)? {
                for mu in &mus {
                    let x = ExtElt::basis(field.clone(), flavor, (mu.clone(), lam.clone()));
                    let dx = comultiply(session, quiver, &x)?;
                    if counit_left(&dx) != x || counit_right(&dx) != x {
                        return Err(incompatible(format!(
                            "partial counits fail to recover the element at {}",
                            lam.label()
                        )));
                    }
                    let l = comultiply_left(session, quiver, &dx)?;
                    let r = comultiply_right(session, quiver, &dx)?;
                    if l != r {
                        return Err(incompatible(format!(
                            "comultiplication is not coassociative at {}",
                            lam.label()
                        )));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Pairing laws between the two flavors: the adjunction
/// `φ(ab, c) = φ(a ⊗ b, Δc)` on simple generators, the torus pairing
/// `φ(K_μ, K_ν) = v^{-(μ,ν)}`, and vanishing across distinct classes.
/// Returns the instance count.
pub fn pairing_checks(session: &Session, quiver: &Quiver) -> Result<usize> {
    let field = session.field().clone();
    let n = quiver.n_vertices();
    let mut count = 0usize;
    for i in 0..n {
        for j in 0..n {
            let si = simple_id(session, quiver, i)?;
            let sj = simple_id(session, quiver, j)?;
            let a = ExtElt::generator(field.clone(), Flavor::Plus, si.clone());
            let b = ExtElt::generator(field.clone(), Flavor::Plus, sj.clone());
            let ab = ext_mul(session, quiver, &a, &b)?;
            let cdims = quiver::dims_add(&si.dims, &sj.dims);
            for cls in session.class_ids(quiver, &cdims)? {
                let c = ExtElt::generator(field.clone(), Flavor::Minus, cls.clone());
                let lhs = pairing(session, quiver, &ab, &c)?;
                let rhs = tensor_pairing(
                    session,
                    quiver,
                    &Tensor2::outer(&a, &b)?,
                    &comultiply(session, quiver, &c)?,
                )?;
                if lhs != rhs {
                    return Err(incompatible(format!(
                        "pairing adjunction fails on simples ({i}, {j}) against {}",
                        cls.label()
                    )));
                }
                count += 1;
            }
            // Torus pairing.
            let mut mu = vec![0i64; n];
            mu[i] = 1;
            let mut nu = vec![0i64; n];
            nu[j] = 1;
            let kp = ExtElt::torus(field.clone(), Flavor::Plus, mu.clone());
            let km = ExtElt::torus(field.clone(), Flavor::Minus, nu.clone());
            let expected = field.v_pow(-quiver.symmetric_form(&mu, &nu));
            if pairing(session, quiver, &kp, &km)? != expected {
                return Err(incompatible(format!(
                    "torus pairing disagrees with the symmetric form at ({i}, {j})"
                )));
            }
            count += 1;
            // Distinct classes pair to zero: a simple against a class of a
            // different dimension vector.
            let um = ExtElt::generator(field.clone(), Flavor::Minus, sj.clone());
            let expect_zero = if si == sj {
                None
            } else {
                Some(pairing(session, quiver, &a, &um)?)
            };
            if let Some(val) = expect_zero {
                if !val.is_zero() {
                    return Err(incompatible(format!(
                        "distinct simple classes must pair to zero ({i}, {j})"
                    )));
                }
                count += 1;
            }
        }
    }
    Ok(count)
}

/// One compatibility instance between the coproduct and the product:
/// `Δ(u_a u_b) = Δ(u_a) Δ(u_b)` with the componentwise tensor product,
/// on the simple generators at the first and last vertices.
pub fn coproduct_product_instance(session: &Session, quiver: &Quiver) -> Result<()> {
    let field = session.field().clone();
    let n = quiver.n_vertices();
    let a = ExtElt::generator(field.clone(), Flavor::Plus, simple_id(session, quiver, 0)?);
    let b = ExtElt::generator(field.clone(), Flavor::Plus, simple_id(session, quiver, n - 1)?);
    let prod = ext_mul(session, quiver, &a, &b)?;
    let left = comultiply(session, quiver, &prod)?;
    let da = comultiply(session, quiver, &a)?;
    let db = comultiply(session, quiver, &b)?;
    let right = tensor2_mul(session, quiver, &da, &db)?;
    if left != right {
        return Err(incompatible(
            "coproduct of a product disagrees with the product of coproducts".to_string(),
        ));
    }
    if left.is_zero() {
        return Err(incompatible(
            "coproduct compatibility instance is vacuous".to_string(),
        ));
    }
    Ok(())
}

fn simple_id(session: &Session, quiver: &Quiver, i: usize) -> Result<ClassId> {
    let mut dims = vec![0usize; quiver.n_vertices()];
    dims[i] = 1;
    let classes = session.class_ids(quiver, &dims)?;
    assert_eq!(classes.len(), 1, "one class at a simple dimension vector");
    Ok(classes[0].clone())
}

/// A deterministic non-constant function on every class of a space.
fn varied_fn(session: &Session, q: &Quiver, dims: &[usize]) -> Result<OrbitFn> {
    let n = session.table(q, dims)?.n_classes();
    let f = session.field();
    let values: Vec<Scalar> = (0..n)
        .map(|i| &f.from_int(1 + 2 * i as i64) * &f.v_pow(i as i64 % 3))
        .collect();
    OrbitFn::from_values(session, q, dims, values)
}

/// Round trip and two-leg composition of the transform over full and
/// partial reorientations of `q` at `dims`.
pub fn fourier_roundtrip(session: &Session, q: &Quiver, dims: &[usize]) -> Result<()> {
    let n_arrows = q.arrows().len();
    if n_arrows == 0 {
        return Ok(());
    }
    let f = varied_fn(session, q, dims)?;
    let all: Vec<usize> = (0..n_arrows).collect();
    let q_rev = q.reorient(&all);
    let there = fourier(session, &f, &q_rev)?;
    let back = fourier(session, &there, q)?;
    if back != f {
        return Err(incompatible(format!(
            "transform round trip is not the identity at {:?}",
            dims
        )));
    }
    let q1 = q.reorient(&[0]);
    let q2 = q.reorient(&all[1..]);
    let via = fourier(session, &fourier(session, &f, &q1)?, &q2)?;
    let direct = fourier(session, &f, &q2)?;
    if via != direct {
        return Err(incompatible(format!(
            "two-leg transform composition disagrees with the direct transform at {:?}",
            dims
        )));
    }
    Ok(())
}

/// `T(f1 * f2) = T(f1) * T(f2)` across a reorientation, for indicator
/// pairs on `q` with total dimension at most `cap`.  Returns the pair
/// count.
pub fn fourier_multiplicativity(session: &Session, q: &Quiver, cap: usize) -> Result<usize> {
    if q.arrows().is_empty() {
        return Ok(0);
    }
    let q_rev = q.reorient(&[0]);
    let n = q.n_vertices();
    let mut count = 0usize;
    for adims in base_dims_up_to(n, cap) {
        let a_total: usize = adims.iter().sum();
        if a_total == 0 {
            continue;
        }
        for bdims in base_dims_up_to(n, cap - a_total) {
            if bdims.iter().sum::<usize>() == 0 {
                continue;
            }
            for alpha in session.class_ids(q, &adims)? {
                for beta in session.class_ids(q, &bdims)? {
                    let f1 = OrbitFn::indicator(session, q, &alpha)?;
                    let f2 = OrbitFn::indicator(session, q, &beta)?;
                    let lhs = fourier(session, &fn_mul(session, &f1, &f2)?, &q_rev)?;
                    let rhs = fn_mul(
                        session,
                        &fourier(session, &f1, &q_rev)?,
                        &fourier(session, &f2, &q_rev)?,
                    )?;
                    if lhs != rhs {
                        return Err(incompatible(format!(
                            "transform is not multiplicative on ({}, {})",
                            alpha.label(),
                            beta.label()
                        )));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Multiplicativity across the framing embedding: a base-class indicator
/// with empty framing spaces transforms on the base quiver, and the
/// embedded transform agrees with the framed transform of the embedded
/// product.  Returns the instance count.
pub fn fourier_framed_multiplicativity(
    session: &Session,
    framing: &Framing,
    omega: &[usize],
) -> Result<usize> {
    let base = framing.base();
    let framed = framing.framed();
    if base.arrows().is_empty() {
        return Ok(0);
    }
    let base_rev = base.reorient(&[0]);
    let framed_rev = framed.reorient(&[0]);
    let n = base.n_vertices();
    let hat = framing.weight_dims(omega);
    let mut count = 0usize;
    for i in 0..n {
        let f1 = OrbitFn::indicator(session, base, &simple_id(session, base, i)?)?;
        for bprime in base_dims_up_to(n, 1) {
            let nu = quiver::dims_add(&hat, &framing.pad(&bprime));
            for beta in session.class_ids(framed, &nu)? {
                let f2 = OrbitFn::indicator(session, framed, &beta)?;
                let prod = fn_mul(session, &embed_into_framed(session, &f1, framed)?, &f2)?;
                let lhs = fourier(session, &prod, &framed_rev)?;
                let t1 = fourier(session, &f1, &base_rev)?;
                let rhs = fn_mul(
                    session,
                    &embed_into_framed(session, &t1, &framed_rev)?,
                    &fourier(session, &f2, &framed_rev)?,
                )?;
                if lhs != rhs {
                    return Err(incompatible(format!(
                        "framed transform is not multiplicative at simple {i}, weight {:?}",
                        nu
                    )));
                }
                count += 1;
            }
        }
    }
    Ok(count)
}

// ---------------------------------------------------------------------------
// The suites
// ---------------------------------------------------------------------------

fn classes_suite(
    config: &RunConfig,
    session: &Session,
    fs: &FramedSession,
    checks: &mut Vec<CheckRecord>,
) {
    let base = &config.base;
    let mut targets: Vec<(String, Quiver, Vec<usize>)> = Vec::new();
    for dims in base_dims_up_to(base.n_vertices(), config.max_degree) {
        if dims.iter().sum::<usize>() == 0 {
            continue;
        }
        targets.push(("base".to_string(), base.clone(), dims));
    }
    let framing = fs.framing();
    let hat = framing.weight_dims(&config.omega);
    for bprime in base_dims_up_to(base.n_vertices(), 1) {
        let nu = quiver::dims_add(&hat, &framing.pad(&bprime));
        targets.push(("framed".to_string(), framing.framed().clone(), nu));
    }
    for (tag, q, dims) in targets {
        record(
            checks,
            Suite::Classes,
            "orbit-partition",
            format!("{tag} dims={}", quiver::dims_label(&dims)),
            || {
                let table = session.table(&q, &dims)?;
                let points = table.space().point_count();
                let total: u128 = table.classes().iter().map(|c| c.orbit_size).sum();
                if total != points {
                    return Err(incompatible(format!(
                        "orbit sizes sum to {total} but the space has {points} points"
                    )));
                }
                let group = table.group_order();
                for (idx, cls) in table.classes().iter().enumerate() {
                    if cls.orbit_size * cls.aut_order != group {
                        return Err(incompatible(format!(
                            "orbit-stabilizer bookkeeping fails on class {idx}"
                        )));
                    }
                }
                Ok(Some(format!(
                    "classes={} points={points}",
                    table.n_classes()
                )))
            },
        );
    }
}

fn hallnum_suite(config: &RunConfig, session: &Session, checks: &mut Vec<CheckRecord>) {
    let base = &config.base;
    if is_point_quiver(base) && config.p == 2 {
        record(
            checks,
            Suite::HallNumbers,
            "pinned-point-quiver",
            "p=2".to_string(),
            || {
                let cls1 = ClassId::new(vec![1], 0);
                let cls2 = ClassId::new(vec![2], 0);
                let g = session.hall_number(base, &cls2, &cls1, &cls1)?;
                if g != 3 {
                    return Err(incompatible(format!(
                        "count of lines in the plane should be 3, got {g}"
                    )));
                }
                let aut = session.aut_order(base, &cls2)?;
                if aut != 6 {
                    return Err(incompatible(format!(
                        "automorphisms of the plane should number 6, got {aut}"
                    )));
                }
                let gl = gflin::gl_order(2, 2);
                if gl != 6 {
                    return Err(incompatible(format!("|GL_2(F_2)| should be 6, got {gl}")));
                }
                Ok(Some("g=3 aut=6 gl=6".to_string()))
            },
        );
    }
    if is_arrow_quiver(base) && config.p == 2 {
        record(
            checks,
            Suite::HallNumbers,
            "pinned-arrow-quiver",
            "p=2".to_string(),
            || {
                let classes = session.class_ids(base, &[1, 1])?;
                if classes.len() != 2 {
                    return Err(incompatible(format!(
                        "expected 2 classes at dimension (1,1), got {}",
                        classes.len()
                    )));
                }
                // Subobject isomorphic to the source simple, quotient the
                // target simple: one subobject when the arrow map is
                // zero, none when it is injective.
                let quot = ClassId::new(vec![0, 1], 0);
                let sub = ClassId::new(vec![1, 0], 0);
                let g_split = session.hall_number(base, &classes[0], &quot, &sub)?;
                let g_nonsplit = session.hall_number(base, &classes[1], &quot, &sub)?;
                if (g_split, g_nonsplit) != (1, 0) {
                    return Err(incompatible(format!(
                        "expected Hall numbers (1, 0) across the two classes, got \
                         ({g_split}, {g_nonsplit})"
                    )));
                }
                Ok(Some("g(split)=1 g(nonsplit)=0".to_string()))
            },
        );
    }
    let caps = vec![config.max_degree; base.n_vertices()];
    record(
        checks,
        Suite::HallNumbers,
        "twisted-associativity",
        format!("caps={}", quiver::dims_label(&caps)),
        || {
            let n = twisted_associativity(session, base, &caps)?;
            Ok(Some(format!("triples={n}")))
        },
    );
    record(
        checks,
        Suite::HallNumbers,
        "function-realization",
        format!("cap={}", config.max_degree),
        || {
            let n = hall_function_checks(session, base, config.max_degree)?;
            Ok(Some(format!("pairs={n}")))
        },
    );
}

fn fourier_suite(
    config: &RunConfig,
    session: &Session,
    fs: &FramedSession,
    checks: &mut Vec<CheckRecord>,
) {
    let framing = fs.framing();
    let framed = framing.framed().clone();
    let base = &config.base;
    let hat = framing.weight_dims(&config.omega);
    for bprime in base_dims_up_to(base.n_vertices(), 2.min(config.max_degree)) {
        let nu = quiver::dims_add(&hat, &framing.pad(&bprime));
        let framed_q = framed.clone();
        record(
            checks,
            Suite::Fourier,
            "roundtrip",
            format!("framed dims={}", quiver::dims_label(&nu)),
            || {
                fourier_roundtrip(session, &framed_q, &nu)?;
                Ok(None)
            },
        );
    }
    record(
        checks,
        Suite::Fourier,
        "multiplicativity",
        format!("base cap={}", config.max_degree.min(3)),
        || {
            let n = fourier_multiplicativity(session, base, config.max_degree.min(3))?;
            Ok(Some(format!("pairs={n}")))
        },
    );
    let omega = config.omega.clone();
    record(
        checks,
        Suite::Fourier,
        "framed-multiplicativity",
        format!("omega={}", quiver::dims_label(&omega)),
        || {
            let n = fourier_framed_multiplicativity(session, fs.framing(), &omega)?;
            Ok(Some(format!("instances={n}")))
        },
    );
}

fn hopf_suite(config: &RunConfig, session: &Session, checks: &mut Vec<CheckRecord>) {
    let base = &config.base;
    let cap = config.max_degree.min(3);
    record(
        checks,
        Suite::Hopf,
        "coassociativity",
        format!("cap={cap}"),
        || {
            let n = coassociativity_checks(session, base, cap)?;
            Ok(Some(format!("instances={n}")))
        },
    );
    record(
        checks,
        Suite::Hopf,
        "counit-values",
        String::new(),
        || {
            let field = session.field().clone();
            let mu = vec![1i64; base.n_vertices()];
            if counit(&ExtElt::torus(field.clone(), Flavor::Plus, mu)) != field.one() {
                return Err(incompatible("counit of a torus element must be 1".into()));
            }
            let s0 = simple_id(session, base, 0)?;
            if !counit(&ExtElt::generator(field.clone(), Flavor::Plus, s0)).is_zero() {
                return Err(incompatible("counit of a simple generator must be 0".into()));
            }
            Ok(None)
        },
    );
    record(checks, Suite::Hopf, "pairing", String::new(), || {
        let n = pairing_checks(session, base)?;
        Ok(Some(format!("instances={n}")))
    });
    if is_point_quiver(base) && config.p == 2 {
        record(
            checks,
            Suite::Hopf,
            "pinned-pairing-values",
            "p=2".to_string(),
            || {
                let field = session.field().clone();
                let cls1 = ClassId::new(vec![1], 0);
                let up = ExtElt::generator(field.clone(), Flavor::Plus, cls1.clone());
                let um = ExtElt::generator(field.clone(), Flavor::Minus, cls1);
                if pairing(session, base, &up, &um)? != field.from_int(2) {
                    return Err(incompatible("simple self-pairing should be 2".into()));
                }
                let c2 = ExtElt::generator(field.clone(), Flavor::Minus, ClassId::new(vec![2], 0));
                let lhs = pairing(session, base, &ext_mul(session, base, &up, &up)?, &c2)?;
                if lhs != &field.from_int(2) * &field.v() {
                    return Err(incompatible(
                        "square-against-plane pairing should be 2v".into(),
                    ));
                }
                Ok(Some("phi(u,u)=2 phi(uu,w)=2v".to_string()))
            },
        );
    }
    record(
        checks,
        Suite::Hopf,
        "coproduct-product",
        String::new(),
        || {
            coproduct_product_instance(session, base)?;
            Ok(None)
        },
    );
}

fn relations_suite(config: &RunConfig, fs: &FramedSession, checks: &mut Vec<CheckRecord>) {
    for &r in &config.relations {
        let cap = if r == 5 {
            config.pair_cap
        } else {
            config.class_cap
        };
        let omega = config.omega.clone();
        let max_base = config.max_degree;
        record(
            checks,
            Suite::Relations,
            &format!("relation-{r}"),
            format!(
                "omega={} max_base={max_base} cap={cap}",
                quiver::dims_label(&omega)
            ),
            || {
                let instances = check_relation(fs, r, &omega, max_base, cap)?;
                let nonvacuous = instances.iter().filter(|i| !i.vacuous).count();
                Ok(Some(format!(
                    "instances={} nonvacuous={nonvacuous}",
                    instances.len()
                )))
            },
        );
    }
    let omega = config.omega.clone();
    let max_base = config.max_degree;
    record(
        checks,
        Suite::Relations,
        "commutator-closed-form",
        format!("omega={} max_base={max_base}", quiver::dims_label(&omega)),
        || {
            let instances = check_commutator_closed_form(fs, &omega, max_base)?;
            let nonvacuous = instances.iter().filter(|i| !i.vacuous).count();
            Ok(Some(format!(
                "instances={} nonvacuous={nonvacuous}",
                instances.len()
            )))
        },
    );
    let framing = fs.framing();
    let hat = framing.weight_dims(&config.omega);
    let sources: Vec<usize> = (0..config.base.n_vertices())
        .filter(|&i| is_source(framing.framed(), i))
        .collect();
    record(
        checks,
        Suite::Relations,
        "locus-diagrams",
        format!("sources={sources:?}"),
        || {
            let mut n = 0usize;
            for &i in &sources {
                let mut e_i = vec![0usize; fs.framing().base().n_vertices()];
                e_i[i] = 1;
                let raised = quiver::dims_add(&hat, &fs.framing().pad(&e_i));
                check_raising_diagram(fs.session(), fs.framing(), i, 1, &raised)?;
                let si = simple_id(fs.session(), fs.framing().base(), i)?;
                check_lowering_diagram(fs.session(), fs.framing(), i, &si, &hat)?;
                check_lowering_diagram(fs.session(), fs.framing(), i, &si, &raised)?;
                n += 3;
            }
            Ok(Some(format!("instances={n}")))
        },
    );
    record(
        checks,
        Suite::Relations,
        "descent-well-defined",
        String::new(),
        || {
            let mut n = 0usize;
            for i in 0..fs.framing().base().n_vertices() {
                let si = simple_id(fs.session(), fs.framing().base(), i)?;
                let raised = quiver::dims_add(&hat, &fs.framing().pad(&si.dims));
                let lower = fs.eminus_full(&si, &hat)?;
                check_descent_well_defined(fs, &lower, &hat, &raised)?;
                let raise = fs.eplus_full(i, 1, &raised)?;
                check_descent_well_defined(fs, &raise, &raised, &hat)?;
                n += 2;
            }
            Ok(Some(format!("instances={n}")))
        },
    );
}

fn module_suite(config: &RunConfig, fs: &FramedSession, checks: &mut Vec<CheckRecord>) {
    let base = fs.framing().base().clone();
    let omega = config.omega.clone();
    let depth = config.depth;
    record(
        checks,
        Suite::Module,
        "weight-dimensions",
        format!("omega={} depth={depth}", quiver::dims_label(&omega)),
        || {
            let table = highest_weight_dims(fs, &omega, depth)?;
            if table
                .get(&vec![0usize; base.n_vertices()])
                .copied()
                .unwrap_or(0)
                != 1
            {
                return Err(incompatible(
                    "the highest weight space must be one-dimensional".to_string(),
                ));
            }
            // Pinned tables for the smallest quivers.
            if is_point_quiver(&base) && omega[0] <= 2 {
                for (beta, &rank) in &table {
                    let expected = usize::from(beta[0] <= omega[0]);
                    if rank != expected {
                        return Err(incompatible(format!(
                            "weight-space dimension at depth {} should be {expected}, got {rank}",
                            beta[0]
                        )));
                    }
                }
            }
            if is_arrow_quiver(&base) && omega == [1, 1] {
                for (beta, &rank) in &table {
                    let expected = match (beta[0], beta[1]) {
                        (0, 0) | (1, 0) | (0, 1) | (2, 1) | (1, 2) | (2, 2) => 1,
                        (1, 1) => 2,
                        _ => 0,
                    };
                    if rank != expected {
                        return Err(incompatible(format!(
                            "weight-space dimension at {beta:?} should be {expected}, got {rank}"
                        )));
                    }
                }
            }
            let rendered: Vec<String> = table
                .iter()
                .map(|(b, r)| format!("{}:{r}", quiver::dims_label(b)))
                .collect();
            Ok(Some(rendered.join(" ")))
        },
    );
    record(
        checks,
        Suite::Module,
        "highest-weight-vector",
        format!("omega={}", quiver::dims_label(&omega)),
        || {
            let field = fs.field().clone();
            let genf = generator(fs, &omega)?;
            for i in 0..base.n_vertices() {
                // The diagonal operator acts by v^{ω_i}.
                let acted = act(fs, &[GenOp::K { i, inverse: false }], &genf)?
                    .expect("diagonal letters never annihilate");
                let expected = genf.scale(&field.v_pow(omega[i] as i64));
                if acted != expected {
                    return Err(incompatible(format!(
                        "diagonal operator at {i} does not act by v^{}",
                        omega[i]
                    )));
                }
                // Raising annihilates the generator.
                if act(fs, &[GenOp::Raise { i, n: 1 }], &genf)?.is_some() {
                    return Err(incompatible(format!(
                        "raising at {i} must annihilate the highest weight vector"
                    )));
                }
                // Lowering by the vertex simple ω_i + 1 times reduces to
                // zero in the quotient.
                let si = simple_id(fs.session(), &base, i)?;
                let word = vec![GenOp::Lower { alpha: si }; omega[i] + 1];
                let lowered = act(fs, &word, &genf)?.expect("lowering letters never annihilate");
                let target = fs.quotient(lowered.dims())?;
                if !target.reduce(&lowered)?.iter().all(Scalar::is_zero) {
                    return Err(incompatible(format!(
                        "lowering {} times at {i} must vanish in the quotient",
                        omega[i] + 1
                    )));
                }
            }
            Ok(None)
        },
    );
}

fn fiber_suite(config: &RunConfig, fs: &FramedSession, checks: &mut Vec<CheckRecord>) {
    const MAX_INSTANCES: usize = 6;
    let session = fs.session();
    let framing = fs.framing();
    let base = framing.base().clone();
    let n = base.n_vertices();
    let hat = framing.weight_dims(&config.omega);
    let sources: Vec<usize> = (0..n)
        .filter(|&i| is_source(framing.framed(), i))
        .collect();
    let mut instances = 0usize;
    let mut first_rejected: Option<(ClassId, usize, ClassId)> = None;
    'outer: for alpha_dims in base_dims_up_to(n, 3) {
        if alpha_dims.iter().sum::<usize>() == 0 {
            continue;
        }
        let Ok(alphas) = session.class_ids(&base, &alpha_dims) else {
            continue;
        };
        for alpha in alphas {
            for &i in &sources {
                if alpha.dims[i] == 0 {
                    continue;
                }
                let mut beta_dims = alpha.dims.clone();
                beta_dims[i] -= 1;
                let Ok(betas) = session.class_ids(&base, &beta_dims) else {
                    continue;
                };
                let rejected = match has_simple_summand(session, &base, &alpha, i) {
                    Ok(r) => r,
                    Err(_) => continue,
                };
                if rejected {
                    if first_rejected.is_none() {
                        first_rejected = Some((alpha.clone(), i, betas[0].clone()));
                    }
                    continue;
                }
                for beta in betas {
                    for bprime in base_dims_up_to(n, 1) {
                        if instances >= MAX_INSTANCES {
                            break 'outer;
                        }
                        let nu = quiver::dims_add(&hat, &framing.pad(&bprime));
                        let alpha_c = alpha.clone();
                        let beta_c = beta.clone();
                        record(
                            checks,
                            Suite::Fiber,
                            "fiber-cardinality",
                            format!(
                                "nu={} i={i} alpha={} beta={}",
                                quiver::dims_label(&nu),
                                alpha_c.label(),
                                beta_c.label()
                            ),
                            || {
                                let inst = fiber_check(fs, &nu, i, &alpha_c, &beta_c)?;
                                Ok(Some(format!(
                                    "fiber={} base_points={}",
                                    inst.fiber, inst.base_points
                                )))
                            },
                        );
                        instances += 1;
                    }
                }
            }
        }
    }
    if let Some((alpha, i, beta)) = first_rejected {
        record(
            checks,
            Suite::Fiber,
            "hypothesis-guard",
            format!("alpha={} i={i}", alpha.label()),
            || {
                // The closed formula assumes the vertex simple is not a
                // direct summand; the check must refuse such classes.
                match fiber_check(fs, &hat, i, &alpha, &beta) {
                    Err(Error::InvalidInput(_)) => Ok(Some("rejected".to_string())),
                    Err(e) => Err(e),
                    Ok(_) => Err(incompatible(format!(
                        "class {} with a split summand at {i} must be rejected",
                        alpha.label()
                    ))),
                }
            },
        );
    }
}

/// Execute the configured suites and collect the report.
pub fn run(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let start = Instant::now();
    let session = match &config.cache_dir {
        Some(dir) => Session::with_cache_dir(config.p, dir)?,
        None => Session::new(config.p)?,
    };
    let framing = Framing::standard(&config.base, config.towards_frame);
    let fs = FramedSession::new(&session, framing);
    let mut checks = Vec::new();
    for suite in Suite::ALL {
        if !config.suites.contains(&suite) {
            continue;
        }
        match suite {
            Suite::Classes => classes_suite(config, &session, &fs, &mut checks),
            Suite::HallNumbers => hallnum_suite(config, &session, &mut checks),
            Suite::Fourier => fourier_suite(config, &session, &fs, &mut checks),
            Suite::Hopf => hopf_suite(config, &session, &mut checks),
            Suite::Relations => relations_suite(config, &fs, &mut checks),
            Suite::Module => module_suite(config, &fs, &mut checks),
            Suite::Fiber => fiber_suite(config, &fs, &mut checks),
        }
    }
    let stats = session.stats();
    Ok(Report {
        schema: 1,
        engine: env!("CARGO_PKG_VERSION").to_string(),
        config: config_json(config),
        checks,
        tables_built: stats.tables_built,
        tables_from_memory: stats.tables_from_memory,
        tables_from_disk: stats.tables_from_disk,
        wall_millis: start.elapsed().as_millis(),
    })
}

fn config_json(config: &RunConfig) -> Value {
    json!({
        "quiver": config.base.canonical_json(),
        "p": config.p,
        "omega": config.omega,
        "max_degree": config.max_degree,
        "depth": config.depth,
        "relations": config.relations,
        "suites": config.suites.iter().map(|s| s.name()).collect::<Vec<_>>(),
        "class_cap": config.class_cap,
        "pair_cap": config.pair_cap,
        "towards_frame": config.towards_frame,
        "cache_dir": config.cache_dir.as_ref().map(|d| d.display().to_string()),
    })
}
