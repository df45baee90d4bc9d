//! End-to-end acceptance suite. Each criterion prints a single pass/fail
//! line; the test fails if any criterion does.

use nckp::algebra::{
    algebra_closure, apply_j, octonion, octonion_split, quaternion, twisted_matrix, AlgElement,
};
use nckp::diffcoeff::{
    scalar_specialize, CommDiffPoly, ComponentVar, FieldSymbol, NCPoly, StructuredElement,
};
use nckp::hierarchy::{apply_flow, build_lax, flow, flows_commute_on, zs_residual};
use nckp::numeric::CMatrix;
use nckp::psido::{d_operator, equal_above, PsiDO};
use nckp::reductions::{
    component_decompose, equivariance_check, matches_kdv_modulo_scaling, nth_root,
    preservation_residual, projection_flow_k1, reduced_flow, su3_covariance_check,
    symmetry_relations, ConstraintKind, DecomposeTarget,
};
use nckp::timealg::{
    act, commutative_reduction, time_derive, ActionMode, Quat, QuatAction, TimeElement,
};
use nckp::Scalar;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn sym(k: u32) -> NCPoly {
    NCPoly::symbol(k)
}

fn c1_su3_kdv_reproduction() -> Result<(), String> {
    let l = build_lax(1, 8).map_err(|e| e.to_string())?;
    let f = flow(&l, 3).map_err(|e| e.to_string())?;
    let rhs = &f.equations[&1];
    let u = sym(1);
    let du = u.apply_d();
    let expect = u
        .apply_d_n(3)
        .add(&u.mul(&du).scale(&Scalar::from_int(3)))
        .add(&du.mul(&u).scale(&Scalar::from_int(3)));
    if rhs != &expect {
        return Err(format!("flow rhs {} != {}", rhs, expect));
    }
    let scal = scalar_specialize(rhs);
    let expect_scal = scalar_specialize(&u.apply_d_n(3).add(&u.mul(&du).scale(&Scalar::from_int(6))));
    if scal != expect_scal {
        return Err(format!("scalar specialization {} != {}", scal, expect_scal));
    }
    Ok(())
}

fn c2_twisted_matrix_fidelity() -> Result<(), String> {
    // T(a+bi+cj+dk) entrywise, checked per symbolic variable by linearity
    let display: [[(i64, usize); 4]; 4] = [
        [(1, 0), (1, 1), (1, 2), (1, 3)],
        [(1, 1), (1, 0), (-1, 3), (1, 2)],
        [(1, 2), (1, 3), (1, 0), (-1, 1)],
        [(1, 3), (-1, 2), (1, 1), (1, 0)],
    ];
    let h = quaternion();
    for b in 0..4 {
        let t = twisted_matrix(&AlgElement::basis(&h, b)).map_err(|e| e.to_string())?;
        for r in 0..4 {
            for c in 0..4 {
                let (sign, var) = display[r][c];
                let expect = if var == b {
                    Scalar::from_int(sign)
                } else {
                    Scalar::zero()
                };
                if t.rows[r][c] != expect {
                    return Err(format!("T(e{})[{}][{}] = {}", b, r, c, t.rows[r][c]));
                }
            }
        }
    }
    Ok(())
}

fn random_op(rng: &mut ChaCha8Rng, depth: i64, max_pos: i64, daggers: bool) -> PsiDO<NCPoly> {
    let mut op = PsiDO::new(depth);
    for _ in 0..rng.gen_range(1..=3) {
        let e = rng.gen_range(-3..=max_pos);
        let mut s = FieldSymbol::with_order(rng.gen_range(1..=3), rng.gen_range(0..=1));
        if daggers && rng.gen_bool(0.3) {
            s = s.daggered();
        }
        let c = NCPoly::from_word(vec![s], Scalar::ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3)));
        op.insert(e, c);
    }
    op
}

fn c3_psido_suite() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let depth = 10;
    let guard = 6;
    for _ in 0..50 {
        let p = random_op(&mut rng, depth + guard, 2, false);
        let q = random_op(&mut rng, depth + guard, 2, false);
        let r = random_op(&mut rng, depth + guard, 2, false);
        let lhs = p.compose(&q).compose(&r);
        let rhs = p.compose(&q.compose(&r));
        if !equal_above(&lhs, &rhs, depth) {
            return Err("associativity failure".into());
        }
    }
    let d = d_operator(&NCPoly::one(), 8);
    let dinv = PsiDO::term(-1, NCPoly::one(), 8);
    if d.compose(&dinv).truncate(6) != PsiDO::term(0, NCPoly::one(), 6) {
        return Err("D o D^-1 != 1".into());
    }
    for _ in 0..50 {
        let p = random_op(&mut rng, depth + guard, 2, true);
        let q = random_op(&mut rng, depth + guard, 2, true);
        let lhs = p.compose(&q).adjoint().map_err(|e| e.to_string())?;
        let rhs = q
            .adjoint()
            .map_err(|e| e.to_string())?
            .compose(&p.adjoint().map_err(|e| e.to_string())?);
        if !equal_above(&lhs, &rhs, depth) {
            return Err("(PQ)+ != Q+P+".into());
        }
        let lhs = p.plus_part().adjoint().map_err(|e| e.to_string())?;
        let rhs = p.adjoint().map_err(|e| e.to_string())?.plus_part();
        if !equal_above(&lhs, &rhs, 1) {
            return Err("(P_+)+ != (P+)_+".into());
        }
    }
    Ok(())
}

fn c4_zakharov_shabat() -> Result<(), String> {
    let l = build_lax(6, 8).map_err(|e| e.to_string())?;
    for (n, m) in [(1u32, 2u32), (1, 3), (2, 3)] {
        let r = zs_residual(&l, n, m).map_err(|e| e.to_string())?;
        if !r.is_zero() {
            return Err(format!("zs({}, {}) nonzero: {}", n, m, r));
        }
        for k in 1..=(6 + 2 - n - m) {
            if !flows_commute_on(&l, n, m, k).map_err(|e| e.to_string())? {
                return Err(format!("flows ({}, {}) disagree on U{}", n, m, k));
            }
        }
    }
    Ok(())
}

fn c5_reductions() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    for n in [2u32, 3] {
        for _ in 0..20 {
            let mut q = PsiDO::new(6);
            q.insert(n as i64, NCPoly::one());
            for e in (-2..=n as i64 - 2).rev() {
                if rng.gen_bool(0.6) {
                    q.insert(
                        e,
                        NCPoly::from_word(
                            vec![FieldSymbol::with_order(rng.gen_range(1..=2), rng.gen_range(0..=1))],
                            Scalar::from_int(rng.gen_range(-3..=3)),
                        ),
                    );
                }
            }
            let root = nth_root(&q, n).map_err(|e| e.to_string())?;
            let back = root.with_depth(6 + 2 * n as i64).power(n);
            if !equal_above(&back, &q.with_depth(6 + 2 * n as i64), 4) {
                return Err(format!("root round trip failed for n={}, q={}", n, q));
            }
        }
    }
    let f = reduced_flow(2, 3, 8).map_err(|e| e.to_string())?;
    let scal = scalar_specialize(&f.equations[&1]);
    if !matches_kdv_modulo_scaling(&scal) {
        return Err(format!("2-reduction t3 flow is not KdV-shaped: {}", scal));
    }
    let f = reduced_flow(3, 2, 8).map_err(|e| e.to_string())?;
    let flows = [f];
    let w1 = sym(1);
    let first = apply_flow(&w1, &flows, 2).map_err(|e| e.to_string())?;
    let second = apply_flow(&first, &flows, 2).map_err(|e| e.to_string())?;
    let lead = vec![FieldSymbol::with_order(1, 4)];
    if second.coeff(&lead).is_zero() {
        return Err(format!("no D^4 leading term in {}", second));
    }
    Ok(())
}

fn c6_constraint_machinery() -> Result<(), String> {
    for kind in [ConstraintKind::BType, ConstraintKind::CType] {
        let rel = symmetry_relations(kind, 4).map_err(|e| e.to_string())?;
        if rel.rules.is_empty() {
            return Err(format!("no relations solved for {}", kind));
        }
    }
    let r1 = preservation_residual(ConstraintKind::CType, 1, 4, 10).map_err(|e| e.to_string())?;
    if !r1.vanishes {
        return Err("C-type flow-1 residual does not vanish".into());
    }
    let r2 = preservation_residual(ConstraintKind::CType, 2, 4, 10).map_err(|e| e.to_string())?;
    let r3a = preservation_residual(ConstraintKind::CType, 3, 4, 10).map_err(|e| e.to_string())?;
    let r3b = preservation_residual(ConstraintKind::CType, 3, 4, 13).map_err(|e| e.to_string())?;
    if r3a.vanishes != r3b.vanishes {
        return Err("flow-3 verdict not self-consistent across depths".into());
    }
    if !r3a.vanishes {
        return Err("C-type flow-3 residual does not vanish".into());
    }
    if !r2.note.contains("even") || !r3a.note.contains("even") {
        return Err("discrepancy text missing from residual report".into());
    }
    if r2.vanishes {
        return Err("C-type flow-2 residual unexpectedly vanishes".into());
    }
    Ok(())
}

fn c7_component_decompositions() -> Result<(), String> {
    let p = projection_flow_k1();
    let d = component_decompose(&p.rhs, DecomposeTarget::Quaternion, false)
        .map_err(|e| e.to_string())?;
    // brute-force oracle: scalar part of the symmetrized quaternion product
    let mut expect =
        CommDiffPoly::from_monomial(vec![ComponentVar { id: 1, order: 3 }], Scalar::one());
    for (id, sign) in [(1u32, 6i64), (2, -6), (3, -6), (4, -6)] {
        expect = expect.add(&CommDiffPoly::from_monomial(
            vec![ComponentVar { id, order: 0 }, ComponentVar { id, order: 1 }],
            Scalar::from_int(sign),
        ));
    }
    let scalar_eq = &d
        .equations
        .iter()
        .find(|(l, _)| l == "1")
        .ok_or("missing scalar component")?
        .1;
    if *scalar_eq != expect {
        return Err(format!("scalar component {} != {}", scalar_eq, expect));
    }
    if !matches_kdv_modulo_scaling(&scalar_eq.substitute_zero(&[2, 3, 4])) {
        return Err("restriction u1=u2=u3=0 is not scalar KdV".into());
    }
    // complex-pair and real-quadruple reassembly
    let d = component_decompose(&p.rhs, DecomposeTarget::ComplexPair, false)
        .map_err(|e| e.to_string())?;
    let mut rebuilt = StructuredElement::zero(&d.alg);
    for (idx, comp) in d.rhs.components() {
        rebuilt = rebuilt.add(&StructuredElement::from_component(&d.alg, *idx, comp.clone()));
    }
    if rebuilt != d.rhs {
        return Err("complex-pair components do not reassemble".into());
    }
    let d = component_decompose(&p.rhs, DecomposeTarget::RealQuadruple, false)
        .map_err(|e| e.to_string())?;
    if d.equations.len() != 4 {
        return Err("real-quadruple emission is not four equations".into());
    }
    let comp0 = d.equations[0].1.add(&d.equations[1].1.scale(&Scalar::i()));
    let comp2 = d.equations[2].1.add(&d.equations[3].1.scale(&Scalar::i()));
    let mut rebuilt = StructuredElement::from_component(&d.alg, 0, comp0);
    rebuilt = rebuilt.add(&StructuredElement::from_component(&d.alg, 2, comp2));
    if rebuilt != d.rhs {
        return Err("real-quadruple components do not reassemble".into());
    }
    Ok(())
}

fn c8_su3_covariance() -> Result<(), String> {
    let p = projection_flow_k1();
    let rep = su3_covariance_check(&p.rhs, 50, 42, 1e-9).map_err(|e| e.to_string())?;
    if !rep.pass {
        return Err(format!("covariance deviation {}", rep.max_deviation));
    }
    let s = FieldSymbol::new(1);
    let broken = |assign: &BTreeMap<FieldSymbol, CMatrix>| -> nckp::Result<CMatrix> {
        let x = &assign[&s];
        let mut out = CMatrix::zero(3);
        for i in 0..3 {
            for j in 0..3 {
                out[(i, j)] = x[(i, j)] * x[(i, j)];
            }
        }
        Ok(out)
    };
    let rep = equivariance_check(&broken, &[s], 3, 20, 42, 1e-9).map_err(|e| e.to_string())?;
    if rep.pass || rep.max_deviation <= 1e-3 {
        return Err(format!(
            "negative control deviation too small: {}",
            rep.max_deviation
        ));
    }
    Ok(())
}

fn c9_hypercomplex_kernel() -> Result<(), String> {
    let o = octonion();
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    let rand_oct = |rng: &mut ChaCha8Rng| {
        AlgElement::from_coeffs(
            &o,
            (0..8)
                .map(|_| Scalar::ratio(rng.gen_range(-3..=3), rng.gen_range(1..=2)))
                .collect(),
        )
    };
    for _ in 0..200 {
        let x = rand_oct(&mut rng);
        let y = rand_oct(&mut rng);
        let xx = x.mul(&x).map_err(|e| e.to_string())?;
        let a1 = x.mul(&x.mul(&y).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let a2 = xx.mul(&y).map_err(|e| e.to_string())?;
        if a1 != a2 {
            return Err("left alternativity failure".into());
        }
        let b1 = y.mul(&x).map_err(|e| e.to_string())?.mul(&x).map_err(|e| e.to_string())?;
        let b2 = y.mul(&xx).map_err(|e| e.to_string())?;
        if b1 != b2 {
            return Err("right alternativity failure".into());
        }
        let nx = x.norm().map_err(|e| e.to_string())?;
        let ny = y.norm().map_err(|e| e.to_string())?;
        let nxy = x
            .mul(&y)
            .map_err(|e| e.to_string())?
            .norm()
            .map_err(|e| e.to_string())?;
        if nxy != nx * ny {
            return Err("norm multiplicativity failure".into());
        }
    }
    for b in 1..=6 {
        let e = AlgElement::basis(&o, b);
        let jj = apply_j(&apply_j(&e).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if jj != e.scale(&Scalar::from_int(-1)) {
            return Err(format!("J^2 != -Id on e{}", b));
        }
        let (_, v) = octonion_split(&e).map_err(|e| e.to_string())?;
        if v != e {
            return Err(format!("e{} not in V", b));
        }
    }
    if o.associativity_witness().is_none() {
        return Err("no associativity failure witness for octonions".into());
    }
    let h = quaternion();
    let gens: Vec<_> = (0..4)
        .map(|b| twisted_matrix(&AlgElement::basis(&h, b)).unwrap())
        .collect();
    let (basis, dim) = algebra_closure(&gens);
    let (_, dim2) = algebra_closure(&basis);
    if dim != dim2 {
        return Err(format!("twisted closure unstable: {} -> {}", dim, dim2));
    }
    Ok(())
}

fn timealg_transcript(seed: u64) -> Result<Vec<String>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut transcript = Vec::new();
    let random_quat = |rng: &mut ChaCha8Rng| {
        Quat::from_ints(
            rng.gen_range(-2..=2),
            rng.gen_range(-2..=2),
            rng.gen_range(-2..=2),
            rng.gen_range(-2..=2),
        )
    };
    let random_element = |rng: &mut ChaCha8Rng| {
        let mut e = TimeElement::zero();
        for _ in 0..rng.gen_range(1..=2) {
            let mut term = TimeElement::constant(&random_quat(rng));
            for _ in 0..rng.gen_range(0..=2) {
                term = term.mul(&TimeElement::time(rng.gen_range(1..=3)));
            }
            e = e.add(&term);
        }
        e
    };
    let u = Quat::basis(1);
    let ue = TimeElement::constant(&u);
    for _ in 0..100 {
        let x = random_element(&mut rng);
        let y = random_element(&mut rng);
        if time_derive(1, &time_derive(2, &x)) != time_derive(2, &time_derive(1, &x)) {
            return Err("derivations do not commute".into());
        }
        let q = random_quat(&mut rng);
        if q.inverse().is_ok() {
            let a = QuatAction::new(ActionMode::Adjoint, q).map_err(|e| e.to_string())?;
            let lhs = act(&a, &x.mul(&y)).map_err(|e| e.to_string())?;
            let rhs = act(&a, &x)
                .map_err(|e| e.to_string())?
                .mul(&act(&a, &y).map_err(|e| e.to_string())?);
            if lhs != rhs {
                return Err("adjoint action is not an automorphism".into());
            }
            let lhs = act(&a, &time_derive(1, &x)).map_err(|e| e.to_string())?;
            let rhs = time_derive(1, &act(&a, &x).map_err(|e| e.to_string())?);
            if lhs != rhs {
                return Err("adjoint action does not commute with derivations".into());
            }
            transcript.push(format!("{}", lhs));
        }
        let cu = |rng: &mut ChaCha8Rng| {
            TimeElement::scalar(Scalar::from_int(rng.gen_range(-2..=2)))
                .add(&ue.scale(&Scalar::from_int(rng.gen_range(-2..=2))))
                .mul(&TimeElement::time(rng.gen_range(1..=3)))
        };
        let cx = cu(&mut rng);
        let cy = cu(&mut rng);
        let lhs = commutative_reduction(&u, &cx.mul(&cy)).map_err(|e| e.to_string())?;
        let rhs = commutative_reduction(&u, &cx)
            .map_err(|e| e.to_string())?
            .mul(&commutative_reduction(&u, &cy).map_err(|e| e.to_string())?);
        if lhs != rhs {
            return Err("commutative reduction is not a homomorphism on C_u".into());
        }
        transcript.push(format!("{}", lhs));
    }
    Ok(transcript)
}

fn c10_time_algebra() -> Result<(), String> {
    let a = timealg_transcript(42)?;
    let b = timealg_transcript(42)?;
    if a != b {
        return Err("time algebra run is not deterministic under a fixed seed".into());
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, fn() -> Result<(), String>)> = vec![
        ("01 su3-kdv flow reproduction", c1_su3_kdv_reproduction),
        ("02 twisted-matrix fidelity", c2_twisted_matrix_fidelity),
        ("03 psido algebra suite", c3_psido_suite),
        ("04 zakharov-shabat and flow commutativity", c4_zakharov_shabat),
        ("05 n-reduction round trip, kdv, boussinesq", c5_reductions),
        ("06 b/c constraint machinery", c6_constraint_machinery),
        ("07 component decompositions", c7_component_decompositions),
        ("08 su(3) covariance and negative control", c8_su3_covariance),
        ("09 hypercomplex kernel", c9_hypercomplex_kernel),
        ("10 time algebra properties", c10_time_algebra),
    ];
    let mut failures = Vec::new();
    for (name, f) in criteria {
        match f() {
            Ok(()) => println!("criterion {}: PASS", name),
            Err(msg) => {
                println!("criterion {}: FAIL ({})", name, msg);
                failures.push(name);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {:?}", failures);
}
