//! End-to-end acceptance gate.
//!
//! Ten independent checks exercise the exact-arithmetic engine from the
//! ground up: Hall numbers and automorphism counts, associativity of the
//! twisted multiplication, its realization by convolution of class
//! functions, the finite-field Fourier transform, the coalgebra structure
//! and bialgebra pairing, the six operator relations on framed function
//! spaces, the closed-form commutator, the fiber-cardinality identity
//! behind the lowering operators, highest-weight module tables, and
//! stability of the vanishing ideal under every operator.
//!
//! One line is printed per check; the process exits nonzero if any fails.
//! Every comparison is exact — panics from internal invariant assertions
//! are caught and reported as failures.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use hallforge_core::framed::{
    act, base_dims_up_to, check_commutator_closed_form, check_relation, fiber_check, generator,
    highest_weight_dims, FramedSession, Framing, GenOp,
};
use hallforge_core::gflin::gl_order;
use hallforge_core::hall::{ext_mul, pairing, ExtElt, Flavor};
use hallforge_core::quiver::{self, Quiver};
use hallforge_core::repspace::{ClassId, Session};
use hallforge_core::scalar::Scalar;
use hallforge_core::{verify, Error, Result};

fn main() -> ExitCode {
    let criteria: Vec<(usize, &str, fn() -> Result<String>)> = vec![
        (1, "Hall numbers and automorphism orders match hand counts", c1),
        (2, "twisted multiplication is associative", c2),
        (3, "Hall products are realized by convolution of class functions", c3),
        (4, "Fourier transform: roundtrip, composition, multiplicativity", c4),
        (5, "coproduct laws and the bialgebra pairing", c5),
        (6, "operator relations (1)-(6) hold on framed function spaces", c6),
        (7, "commutator closed form; the rank-one case equals v with v*v=2", c7),
        (8, "lowering correspondences have constant fiber cardinality", c8),
        (9, "highest-weight module: weight tables, annihilation, ladder", c9),
        (10, "vanishing ideal is stable under raising and lowering", c10),
    ];
    let mut failed = 0usize;
    for (n, label, body) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(body));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(Ok(note)) => println!("[PASS] criterion {n}: {label} — {note} ({secs:.1}s)"),
            Ok(Err(e)) => {
                failed += 1;
                println!("[FAIL] criterion {n}: {label} — {e} ({secs:.1}s)");
            }
            Err(panic) => {
                failed += 1;
                let msg = panic_text(panic.as_ref());
                println!("[FAIL] criterion {n}: {label} — panic: {msg} ({secs:.1}s)");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria FAILED");
        ExitCode::FAILURE
    }
}

fn panic_text(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".to_string()
    }
}

fn fail(msg: String) -> Error {
    Error::Incompatible(msg)
}

fn ensure(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(fail(msg.to_string()))
    }
}

// ---------------------------------------------------------------------------
// 1. Hall substrate: pinned values on the point quiver and the arrow quiver.
// ---------------------------------------------------------------------------

fn c1() -> Result<String> {
    let session = Session::new(2)?;

    // Point quiver, p = 2.  One class in each dimension; the squared simple
    // has automorphism group GL_2(F_2) of order 6, and the plane contains
    // exactly three lines, so the Hall number for (line, line) -> plane is 3.
    let a1 = Quiver::a1();
    let line = ClassId::new(vec![1], 0);
    let plane = ClassId::new(vec![2], 0);
    ensure(
        session.table(&a1, &[1])?.classes().len() == 1,
        "the point quiver must have one class of lines",
    )?;
    let plane_table = session.table(&a1, &[2])?;
    ensure(
        plane_table.classes().len() == 1,
        "the point quiver must have one class of planes",
    )?;
    ensure(
        plane_table.classes()[0].aut_order == 6,
        "Aut(plane) over F_2 must have order 6",
    )?;
    ensure(gl_order(2, 2) == 6, "|GL_2(F_2)| must be 6")?;
    let g_sub = session.hall_number(&a1, &plane, &line, &line)?;
    let g_mono = session.hall_number_via_monos(&a1, &plane, &line, &line)?;
    ensure(g_sub == 3, "a plane over F_2 must contain exactly 3 lines")?;
    ensure(g_mono == 3, "the mono-count route must also give 3 lines")?;

    // Arrow quiver, p = 2, dimension vector (1,1): exactly two classes, the
    // split sum of simples (zero arrow map, listed first) and the projective
    // cover (full-rank map).  Only the split class has a subobject chain
    // S_1 <= V with quotient S_0.
    let a2 = Quiver::a2();
    let mixed_table = session.table(&a2, &[1, 1])?;
    ensure(
        mixed_table.classes().len() == 2,
        "the arrow quiver at (1,1) must have exactly two classes",
    )?;
    let split = ClassId::new(vec![1, 1], 0);
    let proj = ClassId::new(vec![1, 1], 1);
    let s0 = ClassId::new(vec![1, 0], 0);
    let s1 = ClassId::new(vec![0, 1], 0);
    let g_split = session.hall_number(&a2, &split, &s1, &s0)?;
    let g_proj = session.hall_number(&a2, &proj, &s1, &s0)?;
    ensure(
        g_split == 1,
        "the split class must admit exactly one S_0-sub with S_1-quotient",
    )?;
    ensure(
        g_proj == 0,
        "the projective class must admit no S_0-sub with S_1-quotient",
    )?;
    ensure(
        session.hall_number_via_monos(&a2, &split, &s1, &s0)? == 1
            && session.hall_number_via_monos(&a2, &proj, &s1, &s0)? == 0,
        "the mono-count route must agree on the arrow quiver",
    )?;
    Ok("point quiver g=3 aut=6 |GL_2|=6; arrow quiver (1,0) via two routes".to_string())
}

// ---------------------------------------------------------------------------
// 2. Associativity of the twisted multiplication.
// ---------------------------------------------------------------------------

fn c2() -> Result<String> {
    let session = Session::new(2)?;
    let n1 = verify::twisted_associativity(&session, &Quiver::a1(), &[4])?;
    let n2 = verify::twisted_associativity(&session, &Quiver::a2(), &[3, 3])?;
    ensure(n1 > 0 && n2 > 0, "associativity sweeps must be non-vacuous")?;
    Ok(format!("point quiver triples={n1}, arrow quiver triples={n2}"))
}

// ---------------------------------------------------------------------------
// 3. The function-space realization of the twisted multiplication.
// ---------------------------------------------------------------------------

fn c3() -> Result<String> {
    let session = Session::new(2)?;
    let n1 = verify::hall_function_checks(&session, &Quiver::a1(), 4)?;
    let n2 = verify::hall_function_checks(&session, &Quiver::a2(), 3)?;
    ensure(n1 > 0 && n2 > 0, "function-realization sweeps must be non-vacuous")?;
    Ok(format!("point quiver pairs={n1}, arrow quiver pairs={n2}"))
}

// ---------------------------------------------------------------------------
// 4. Fourier transform laws on base and framed quivers.
// ---------------------------------------------------------------------------

fn c4() -> Result<String> {
    let session = Session::new(2)?;
    let a1 = Quiver::a1();
    let a2 = Quiver::a2();
    let mut roundtrips = 0usize;
    for base in [&a1, &a2] {
        let framed = Framing::standard(base, true).framed().clone();
        for dims in base_dims_up_to(framed.n_vertices(), 4) {
            verify::fourier_roundtrip(&session, &framed, &dims)?;
            roundtrips += 1;
        }
    }
    // Multiplicativity is about reorienting a base arrow, so both sweeps are
    // empty by construction on the arrowless point quiver (asserted below);
    // its transform content is the framing-arrow roundtrip above.  The arrow
    // and Kronecker quivers give genuine sweeps, the latter reorienting one
    // arrow of a parallel pair.
    let kron = Quiver::kronecker();
    ensure(
        verify::fourier_multiplicativity(&session, &a1, 3)? == 0
            && verify::fourier_framed_multiplicativity(
                &session,
                &Framing::standard(&a1, true),
                &[1],
            )? == 0,
        "the arrowless-base sweeps must be empty",
    )?;
    let m2 = verify::fourier_multiplicativity(&session, &a2, 3)?;
    let mk = verify::fourier_multiplicativity(&session, &kron, 3)?;
    let f2 =
        verify::fourier_framed_multiplicativity(&session, &Framing::standard(&a2, true), &[1, 1])?;
    let fk =
        verify::fourier_framed_multiplicativity(&session, &Framing::standard(&kron, true), &[1, 1])?;
    ensure(
        m2 > 0 && mk > 0 && f2 > 0 && fk > 0,
        "multiplicativity sweeps must be non-vacuous",
    )?;
    Ok(format!(
        "roundtrips={roundtrips}, base products={}, framed products={}",
        m2 + mk,
        f2 + fk
    ))
}

// ---------------------------------------------------------------------------
// 5. Coproduct laws and the bialgebra pairing.
// ---------------------------------------------------------------------------

fn c5() -> Result<String> {
    let session = Session::new(2)?;
    let a1 = Quiver::a1();
    let a2 = Quiver::a2();
    let co1 = verify::coassociativity_checks(&session, &a1, 3)?;
    let co2 = verify::coassociativity_checks(&session, &a2, 2)?;
    let pr1 = verify::pairing_checks(&session, &a1)?;
    let pr2 = verify::pairing_checks(&session, &a2)?;
    verify::coproduct_product_instance(&session, &a1)?;
    verify::coproduct_product_instance(&session, &a2)?;
    ensure(co1 > 0 && co2 > 0 && pr1 > 0 && pr2 > 0, "sweeps must be non-vacuous")?;

    // Pinned pairing values on the point quiver at p = 2.
    let field = session.field().clone();
    let line = ClassId::new(vec![1], 0);
    let up = ExtElt::generator(field.clone(), Flavor::Plus, line.clone());
    let um = ExtElt::generator(field.clone(), Flavor::Minus, line);
    ensure(
        pairing(&session, &a1, &up, &um)? == field.from_int(2),
        "the simple self-pairing at p=2 must be 2",
    )?;
    let w = ExtElt::generator(field.clone(), Flavor::Minus, ClassId::new(vec![2], 0));
    let uu = ext_mul(&session, &a1, &up, &up)?;
    ensure(
        pairing(&session, &a1, &uu, &w)? == &field.from_int(2) * &field.v(),
        "the square-against-plane pairing at p=2 must be 2v",
    )?;
    let kp = ExtElt::torus(field.clone(), Flavor::Plus, vec![1]);
    let km = ExtElt::torus(field.clone(), Flavor::Minus, vec![1]);
    ensure(
        pairing(&session, &a1, &kp, &km)? == field.v_pow(-2),
        "the torus self-pairing on the point quiver must be v^-2",
    )?;
    Ok(format!(
        "coassociativity={}, pairing pairs={}, pinned 2 / 2v / v^-2",
        co1 + co2,
        pr1 + pr2
    ))
}

// ---------------------------------------------------------------------------
// 6. The six operator relations on framed function spaces.
// ---------------------------------------------------------------------------

/// The acceptance grid: point quiver with framing weight 0, 1, 2 and the
/// arrow quiver with weight (1,1), all at p = 2.
fn relation_grid() -> Vec<(Quiver, Vec<Vec<usize>>, usize)> {
    vec![
        (Quiver::a1(), vec![vec![0], vec![1], vec![2]], 4),
        (Quiver::a2(), vec![vec![1, 1]], 3),
    ]
}

fn c6() -> Result<String> {
    let mut nonvacuous: BTreeMap<u8, usize> = (1..=6).map(|r| (r, 0)).collect();
    let mut total = 0usize;
    for (base, omegas, pair_cap) in relation_grid() {
        let session = Session::new(2)?;
        let fs = FramedSession::new(&session, Framing::standard(&base, true));
        for omega in &omegas {
            for r in 1..=6u8 {
                let cap = if r == 5 { pair_cap } else { 2 };
                let instances = check_relation(&fs, r, omega, 3, cap)?;
                total += instances.len();
                *nonvacuous.get_mut(&r).unwrap() +=
                    instances.iter().filter(|i| !i.vacuous).count();
            }
        }
    }
    for (r, n) in &nonvacuous {
        ensure(
            *n > 0,
            &format!("relation {r} must be exercised non-vacuously somewhere on the grid"),
        )?;
    }
    let tally: Vec<String> = nonvacuous.iter().map(|(r, n)| format!("r{r}:{n}")).collect();
    Ok(format!("instances={total}, nonvacuous {}", tally.join(" ")))
}

// ---------------------------------------------------------------------------
// 7. The commutator closed form, including the explicit rank-one value v.
// ---------------------------------------------------------------------------

fn c7() -> Result<String> {
    let mut nonvacuous = 0usize;
    for (base, omegas, _) in relation_grid() {
        let session = Session::new(2)?;
        let fs = FramedSession::new(&session, Framing::standard(&base, true));
        for omega in &omegas {
            let instances = check_commutator_closed_form(&fs, omega, 3)?;
            nonvacuous += instances.iter().filter(|i| !i.vacuous).count();
        }
    }
    ensure(nonvacuous > 0, "the closed-form sweep must be non-vacuous")?;

    // Explicit rank-one instance: point quiver, framing weight 1, p = 2.
    // The highest-weight space is one-dimensional; raising annihilates it,
    // so the commutator reduces to -(E+ after E-), a 1x1 matrix whose sole
    // entry must be v, the square root of 2.
    let session = Session::new(2)?;
    let base = Quiver::a1();
    let fs = FramedSession::new(&session, Framing::standard(&base, true));
    let field = fs.field().clone();
    let hat = fs.framing().weight_dims(&[1]);
    let simple = ClassId::new(vec![1], 0);
    let (mid, em) = fs.eminus_quot(&simple, &hat)?;
    let (back, ep) = fs
        .eplus_quot(0, 1, &mid)?
        .ok_or_else(|| fail("raising from the lowered weight must be defined".into()))?;
    ensure(back == hat, "raising must return to the highest weight")?;
    ensure(
        fs.eplus_quot(0, 1, &hat)?.is_none(),
        "raising must annihilate the highest-weight space",
    )?;
    let updown = ep.mul(&em);
    ensure(
        updown.rows() == 1 && updown.cols() == 1,
        "the highest-weight commutator block must be 1x1",
    )?;
    let value = -updown.at(0, 0);
    ensure(
        value == field.v(),
        "the rank-one commutator value must be v",
    )?;
    ensure(
        &value * &value == field.from_int(2),
        "v must square to the field size 2",
    )?;
    Ok(format!("closed form nonvacuous={nonvacuous}; rank-one value v, v*v=2"))
}

// ---------------------------------------------------------------------------
// 8. Constant fiber cardinality of the lowering correspondences.
// ---------------------------------------------------------------------------

fn c8() -> Result<String> {
    let session = Session::new(2)?;
    let base = Quiver::a2();
    let framing = Framing::standard(&base, true);
    let fs = FramedSession::new(&session, framing);

    let proj = ClassId::new(vec![1, 1], 1); // indecomposable projective
    let s1 = ClassId::new(vec![0, 1], 0); // simple at the sink
    let proj_plus = ClassId::new(vec![1, 2], 1); // projective + simple sink
    let two_s1 = ClassId::new(vec![0, 2], 0); // simple sink squared

    // Hand-counted instances are pinned; the remaining two rely on the
    // internal check that every fiber of the projection has the same
    // cardinality, and their value is reported.
    let omega11 = fs.framing().weight_dims(&[1, 1]);
    let omega21 = fs.framing().weight_dims(&[2, 1]);
    let nu_1011 = quiver::dims_add(&[1, 0, 0, 0], &omega11);
    let nu_0111 = quiver::dims_add(&[0, 1, 0, 0], &omega11);

    let inst1 = fiber_check(&fs, &omega11, 0, &proj, &s1)?;
    ensure(inst1.fiber == 2, "fiber at weight (1,1) for (P, S_1) must be 2")?;
    let inst2 = fiber_check(&fs, &nu_1011, 0, &proj, &s1)?;
    ensure(inst2.fiber == 6, "fiber at (1,0)+(1,1) for (P, S_1) must be 6")?;
    let inst3 = fiber_check(&fs, &nu_0111, 0, &proj, &s1)?;
    let inst4 = fiber_check(&fs, &omega11, 0, &proj_plus, &two_s1)?;
    ensure(
        inst4.fiber == 36,
        "fiber at weight (1,1) for (P+S_1, 2S_1) must be 36",
    )?;
    let inst5 = fiber_check(&fs, &omega21, 0, &proj, &s1)?;
    for inst in [&inst1, &inst2, &inst3, &inst4, &inst5] {
        ensure(inst.fiber >= 1, "every fiber cardinality must be a positive integer")?;
        ensure(inst.base_points >= 1, "every instance must sweep at least one point")?;
    }
    Ok(format!(
        "pinned 2/6/36; reported {} at (0,1)+(1,1) and {} at weight (2,1); bases={}",
        inst3.fiber,
        inst5.fiber,
        inst1.base_points + inst2.base_points + inst3.base_points + inst4.base_points
            + inst5.base_points
    ))
}

// ---------------------------------------------------------------------------
// 9. Highest-weight module structure on the point quiver.
// ---------------------------------------------------------------------------

fn expected_ladder(omega: usize, depth: usize) -> BTreeMap<Vec<usize>, usize> {
    // One-dimensional weight spaces down the string of length omega, zero
    // beyond it.
    (0..=depth)
        .map(|k| (vec![k], if k <= omega { 1 } else { 0 }))
        .collect()
}

fn c9() -> Result<String> {
    let session = Session::new(2)?;
    let base = Quiver::a1();
    let simple = ClassId::new(vec![1], 0);
    let field = session.field().clone();
    let mut checked = 0usize;
    for towards in [true, false] {
        let fs = FramedSession::new(&session, Framing::standard(&base, towards));
        ensure(
            highest_weight_dims(&fs, &[1], 2)? == expected_ladder(1, 2),
            "weight-1 module dimensions must be 1,1,0",
        )?;
        ensure(
            highest_weight_dims(&fs, &[2], 3)? == expected_ladder(2, 3),
            "weight-2 module dimensions must be 1,1,1,0",
        )?;
        for omega in [1usize, 2] {
            let gen = generator(&fs, &[omega])?;
            // K acts on the generator by v^omega.
            let k_gen = act(&fs, &[GenOp::K { i: 0, inverse: false }], &gen)?
                .ok_or_else(|| fail("K must not annihilate the generator".into()))?;
            ensure(
                k_gen == gen.scale(&field.v_pow(omega as i64)),
                "K must scale the generator by v^omega",
            )?;
            // Raising annihilates the generator.
            ensure(
                act(&fs, &[GenOp::Raise { i: 0, n: 1 }], &gen)?.is_none(),
                "raising must annihilate the generator",
            )?;
            // Lowering omega+1 times lands in the vanishing ideal.
            let word = vec![GenOp::Lower { alpha: simple.clone() }; omega + 1];
            let dropped = act(&fs, &word, &gen)?
                .ok_or_else(|| fail("lowering words stay on genuine spaces".into()))?;
            let quot = fs.quotient(dropped.dims())?;
            ensure(
                quot.reduce(&dropped)?.iter().all(Scalar::is_zero),
                "the (omega+1)-fold lowering of the generator must vanish",
            )?;
            checked += 1;
        }
    }
    Ok(format!(
        "ladders 1,1,0 and 1,1,1,0 in both framing orientations; {checked} generator checks"
    ))
}

// ---------------------------------------------------------------------------
// 10. Stability of the vanishing ideal under raising and lowering.
// ---------------------------------------------------------------------------

fn c10() -> Result<String> {
    let session = Session::new(2)?;
    let base = Quiver::a2();
    let fs = FramedSession::new(&session, Framing::standard(&base, true));
    let hat = fs.framing().weight_dims(&[1, 1]);
    let mut weights = vec![hat.clone()];
    for i in 0..base.n_vertices() {
        let mut e = vec![0usize; base.n_vertices()];
        e[i] = 1;
        weights.push(quiver::dims_add(&hat, &fs.framing().pad(&e)));
    }
    let mut images = 0usize;
    let mut rows_seen = 0usize;
    for nu in &weights {
        let domain = fs.quotient(nu)?;
        let basis = domain.vanishing_basis().clone();
        // Sanity: each basis row is recognized by its own space.
        for r in 0..basis.rows() {
            ensure(
                domain.contains_in_vanishing(basis.row(r)),
                "vanishing rows must reduce to zero in their own space",
            )?;
            rows_seen += 1;
        }
        // Lowering by every base class of total dimension at most 2.
        for beta in base_dims_up_to(base.n_vertices(), 2) {
            if beta.iter().all(|&b| b == 0) {
                continue;
            }
            let to = quiver::dims_add(nu, &fs.framing().pad(&beta));
            let target = fs.quotient(&to)?;
            for gamma in session.class_ids(&base, &beta)? {
                let m = fs.eminus_full(&gamma, nu)?;
                for r in 0..basis.rows() {
                    ensure(
                        target.contains_in_vanishing(&m.apply(basis.row(r))),
                        "lowering must map the vanishing ideal into the vanishing ideal",
                    )?;
                    images += 1;
                }
            }
        }
        // Raising at every base vertex where the weight allows it.
        for i in 0..base.n_vertices() {
            if nu[i] == 0 {
                continue;
            }
            let mut to = nu.clone();
            to[i] -= 1;
            let target = fs.quotient(&to)?;
            let m = fs.eplus_full(i, 1, nu)?;
            for r in 0..basis.rows() {
                ensure(
                    target.contains_in_vanishing(&m.apply(basis.row(r))),
                    "raising must map the vanishing ideal into the vanishing ideal",
                )?;
                images += 1;
            }
        }
    }
    ensure(rows_seen > 0, "the sweep must see a nonzero vanishing ideal")?;
    ensure(images > 0, "the sweep must push at least one basis row through an operator")?;
    Ok(format!(
        "{images} operator images of {rows_seen} vanishing-basis rows stayed inside the ideal; \
         no stability assertion fired anywhere in the suite"
    ))
}
