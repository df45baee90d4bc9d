//! Lax operators and the flows of the generalized KP hierarchy.
//!
//! L = D + sum_{k=1..K} U_k D^{-k}; the n-th flow is d/dt_n L = [B_n, L]
//! with B_n = (L^n)_+. The flow equation for U_k depends only on
//! U_1..U_{k+n-1}, so a finite K gives exact equations for k <= K-n+1.

use crate::diffcoeff::{FieldSymbol, NCPoly};
use crate::error::{Error, Result};
use crate::psido::PsiDO;
use std::collections::BTreeMap;

/// D + sum U_k D^{-k} with K retained coefficients at truncation depth N.
#[derive(Clone, Debug, PartialEq)]
pub struct LaxOperator {
    pub k_max: u32,
    pub depth: i64,
    pub op: PsiDO<NCPoly>,
}

/// The evolution equations of a single flow: k -> d/dt_n U_k for k = 1..K,
/// plus tail coefficients at exponents below -K (constraints on dropped
/// coefficients, kept separate).
#[derive(Clone, Debug, PartialEq)]
pub struct FlowSystem {
    pub n: u32,
    pub k_max: u32,
    pub depth: i64,
    pub equations: BTreeMap<u32, NCPoly>,
    pub tail: BTreeMap<u32, NCPoly>,
}

impl FlowSystem {
    pub fn equation(&self, k: u32) -> Option<&NCPoly> {
        self.equations.get(&k)
    }
}

pub fn build_lax(k_max: u32, depth: i64) -> Result<LaxOperator> {
    if k_max < 1 || depth < k_max as i64 {
        return Err(Error::Config(format!(
            "lax operator needs depth >= K >= 1, got K={}, depth={}",
            k_max, depth
        )));
    }
    let mut op = PsiDO::new(depth);
    op.insert(1, NCPoly::one());
    for k in 1..=k_max {
        op.insert(-(k as i64), NCPoly::symbol(k));
    }
    Ok(LaxOperator { k_max, depth, op })
}

/// B_n = (L^n)_+, computed at a working depth that keeps all nonnegative
/// exponents exact.
pub fn bn(l: &LaxOperator, n: u32) -> PsiDO<NCPoly> {
    assert!(n >= 1);
    let work = l.op.with_depth(l.depth + n as i64 + 1);
    work.power(n).plus_part().truncate(l.depth)
}

/// Extracts the flow equations d/dt_n U_k from [B_n, L].
pub fn flow(l: &LaxOperator, n: u32) -> Result<FlowSystem> {
    assert!(n >= 1);
    let work = l.op.with_depth(l.depth + n as i64 + 1);
    let b = work.power(n).plus_part();
    let comm = b.commutator(&work).truncate(l.depth);
    if let Some(order) = comm.max_order() {
        if order >= 0 {
            return Err(Error::FlowNotNegative(order));
        }
    }
    let mut equations = BTreeMap::new();
    let mut tail = BTreeMap::new();
    for (e, c) in comm.terms() {
        let k = (-e) as u32;
        if k <= l.k_max {
            equations.insert(k, c.clone());
        } else {
            tail.insert(k, c.clone());
        }
    }
    for k in 1..=l.k_max {
        equations.entry(k).or_insert_with(NCPoly::zero);
    }
    Ok(FlowSystem {
        n,
        k_max: l.k_max,
        depth: l.depth,
        equations,
        tail,
    })
}

/// Applies d/dt_n to a polynomial in the D^m(U_k) symbols, substituting
/// d/dt_n D^m(U_k) = D^m(d/dt_n U_k). Daggered symbols evolve by the
/// daggered right-hand side.
pub fn apply_flow(expr: &NCPoly, flows: &[FlowSystem], n: u32) -> Result<NCPoly> {
    let system = flows
        .iter()
        .find(|f| f.n == n)
        .ok_or_else(|| Error::Config(format!("no flow system for n={}", n)))?;
    expr.try_derive_with(|sym: &FieldSymbol| {
        let rhs = system
            .equation(sym.field)
            .ok_or(Error::FieldOutOfRange(sym.field, system.k_max))?;
        let mut image = rhs.apply_d_n(sym.order);
        if sym.dagger {
            image = image.apply_dagger();
        }
        Ok(image)
    })
}

/// Zakharov-Shabat residual d/dt_n B_m - d/dt_m B_n - [B_n, B_m].
///
/// For K >= n+m every term is an exact differential operator, so the result
/// is exact; smaller K is refused rather than reporting spurious residuals.
pub fn zs_residual(l: &LaxOperator, n: u32, m: u32) -> Result<PsiDO<NCPoly>> {
    assert!(n >= 1 && m >= 1);
    if l.k_max < n + m {
        return Err(Error::DepthInsufficient(format!(
            "zs_residual({}, {}) needs K >= {}, got K={}",
            n,
            m,
            n + m,
            l.k_max
        )));
    }
    let bn_op = bn(l, n);
    let bm_op = bn(l, m);
    let flows = [flow(l, n)?, flow(l, m)?];
    let d_n_bm = bm_op.try_map_coeffs(|c| apply_flow(c, &flows, n))?;
    let d_m_bn = bn_op.try_map_coeffs(|c| apply_flow(c, &flows, m))?;
    Ok(d_n_bm.sub(&d_m_bn).sub(&bn_op.commutator(&bm_op)))
}

/// True when d/dt_n d/dt_m U_k = d/dt_m d/dt_n U_k exactly. Exactness of the
/// double application requires k <= K + 2 - n - m.
pub fn flows_commute_on(l: &LaxOperator, n: u32, m: u32, k: u32) -> Result<bool> {
    if k + n + m > l.k_max + 2 {
        return Err(Error::DepthInsufficient(format!(
            "double flow ({}, {}) on U_{} needs K >= {}",
            n,
            m,
            k,
            k + n + m - 2
        )));
    }
    let flows = [flow(l, n)?, flow(l, m)?];
    let u = NCPoly::symbol(k);
    let nm = apply_flow(&apply_flow(&u, &flows, n)?, &flows, m)?;
    let mn = apply_flow(&apply_flow(&u, &flows, m)?, &flows, n)?;
    Ok(nm == mn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn s(k: u32) -> NCPoly {
        NCPoly::symbol(k)
    }

    #[test]
    fn build_lax_shape_and_errors() {
        let l = build_lax(2, 6).unwrap();
        assert_eq!(l.op.coeff(1), Some(&NCPoly::one()));
        assert_eq!(l.op.coeff(0), None);
        assert_eq!(l.op.coeff(-1), Some(&s(1)));
        assert_eq!(l.op.coeff(-2), Some(&s(2)));
        assert_eq!(l.op.coeff(-3), None);
        assert!(build_lax(3, 2).is_err());
        assert!(build_lax(0, 2).is_err());
    }

    #[test]
    fn lax_rendering() {
        let l = build_lax(2, 6).unwrap();
        assert_eq!(format!("{}", l.op), "D + U1*D^-1 + U2*D^-2");
    }

    #[test]
    fn b1_is_d_and_b2_b3_hand_oracles() {
        let l = build_lax(3, 8).unwrap();
        let b1 = bn(&l, 1);
        assert_eq!(b1, PsiDO::term(1, NCPoly::one(), 8));

        // hand expansion: (D + U1 D^-1 + ...)^2 keeps D^2 and U1 + U1 = 2U1
        let b2 = bn(&l, 2);
        assert_eq!(b2.coeff(2), Some(&NCPoly::one()));
        assert_eq!(b2.coeff(1), None);
        assert_eq!(b2.coeff(0), Some(&s(1).scale(&Scalar::from_int(2))));
        assert_eq!(b2.max_order(), Some(2));

        let lk1 = build_lax(1, 8).unwrap();
        let b3 = bn(&lk1, 3);
        assert_eq!(b3.coeff(3), Some(&NCPoly::one()));
        assert_eq!(b3.coeff(2), None);
        assert_eq!(b3.coeff(1), Some(&s(1).scale(&Scalar::from_int(3))));
        assert_eq!(
            b3.coeff(0),
            Some(&s(1).apply_d().scale(&Scalar::from_int(3)))
        );
    }

    #[test]
    fn flow_1_is_d_on_every_coefficient() {
        let l = build_lax(4, 8).unwrap();
        let f = flow(&l, 1).unwrap();
        for k in 1..=4 {
            assert_eq!(f.equation(k), Some(&s(k).apply_d()));
        }
        assert!(f.tail.is_empty() || f.tail.values().all(|p| p.is_zero()));
    }

    #[test]
    fn flow_2_first_equation_hand_oracle() {
        let l = build_lax(2, 8).unwrap();
        let f = flow(&l, 2).unwrap();
        let expect = s(1)
            .apply_d_n(2)
            .add(&s(2).apply_d().scale(&Scalar::from_int(2)));
        assert_eq!(f.equation(1), Some(&expect));
    }

    #[test]
    fn flow_3_k1_reproduces_the_kdv_shape() {
        let l = build_lax(1, 8).unwrap();
        let f = flow(&l, 3).unwrap();
        let u = s(1);
        let du = u.apply_d();
        let expect = u
            .apply_d_n(3)
            .add(&u.mul(&du).scale(&Scalar::from_int(3)))
            .add(&du.mul(&u).scale(&Scalar::from_int(3)));
        assert_eq!(f.equation(1), Some(&expect));
    }

    #[test]
    fn commutator_has_strictly_negative_order() {
        for k in 4..=6 {
            let l = build_lax(k, 10).unwrap();
            for n in 1..=4 {
                // flow() errors out if any exponent >= 0 survives
                assert!(flow(&l, n).is_ok());
            }
        }
    }

    #[test]
    fn apply_flow_basics() {
        let l = build_lax(6, 10).unwrap();
        let f1 = flow(&l, 1).unwrap();
        let flows = [f1];
        assert_eq!(apply_flow(&s(1), &flows, 1).unwrap(), s(1).apply_d());
        assert_eq!(
            apply_flow(&s(1).apply_d(), &flows, 1).unwrap(),
            s(1).apply_d_n(2)
        );
        assert!(apply_flow(&s(1), &flows, 2).is_err());
        assert!(apply_flow(&s(7), &flows, 1).is_err());
    }

    #[test]
    fn apply_flow_is_a_derivation() {
        let l = build_lax(6, 10).unwrap();
        let flows = [flow(&l, 3).unwrap()];
        let u = s(1);
        let du = apply_flow(&u, &flows, 3).unwrap();
        let lhs = apply_flow(&u.mul(&u), &flows, 3).unwrap();
        assert_eq!(lhs, du.mul(&u).add(&u.mul(&du)));
    }

    #[test]
    fn apply_flow_respects_dagger() {
        let l = build_lax(6, 10).unwrap();
        let flows = [flow(&l, 2).unwrap()];
        let up = s(1).apply_dagger();
        let lhs = apply_flow(&up, &flows, 2).unwrap();
        let rhs = apply_flow(&s(1), &flows, 2).unwrap().apply_dagger();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn zs_residuals_vanish() {
        let l = build_lax(6, 8).unwrap();
        for (n, m) in [(1, 2), (1, 3), (2, 3)] {
            let r = zs_residual(&l, n, m).unwrap();
            assert!(r.is_zero(), "zs({}, {}) = {}", n, m, r);
        }
    }

    #[test]
    fn zs_antisymmetry_and_diagonal() {
        let l = build_lax(6, 8).unwrap();
        let r23 = zs_residual(&l, 2, 3).unwrap();
        let r32 = zs_residual(&l, 3, 2).unwrap();
        assert_eq!(r23, r32.neg());
        assert!(zs_residual(&l, 3, 3).unwrap().is_zero());
    }

    #[test]
    fn zs_refuses_small_k() {
        let l = build_lax(3, 8).unwrap();
        assert!(matches!(
            zs_residual(&l, 2, 3),
            Err(Error::DepthInsufficient(_))
        ));
    }

    #[test]
    fn double_flows_commute() {
        let l = build_lax(6, 10).unwrap();
        for (n, m) in [(1, 2), (1, 3), (2, 3)] {
            let kmax = 6 + 2 - n - m;
            for k in 1..=kmax {
                assert!(flows_commute_on(&l, n, m, k).unwrap(), "({},{}) U{}", n, m, k);
            }
        }
    }
}
