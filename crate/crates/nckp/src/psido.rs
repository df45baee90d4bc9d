//! Formal pseudodifferential operators: truncated Laurent series in D with
//! coefficients from a diffcoeff backend, composed via the generalized
//! Leibniz rule D a = a D + D(a).

use crate::diffcoeff::{CommDiffPoly, NCPoly, StructuredElement};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::One;
use std::collections::BTreeMap;
use std::fmt;

/// Coefficient backend for pseudodifferential operators.
pub trait Coefficient: Clone + PartialEq + fmt::Debug {
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, s: &Scalar) -> Self;
    fn derive(&self) -> Self;
    fn dagger(&self) -> Result<Self>;
    fn is_zero(&self) -> bool;
    /// The unit of the same backend instance.
    fn one_like(&self) -> Self;
}

impl Coefficient for NCPoly {
    fn add(&self, other: &Self) -> Self {
        NCPoly::add(self, other)
    }
    fn neg(&self) -> Self {
        NCPoly::neg(self)
    }
    fn mul(&self, other: &Self) -> Self {
        NCPoly::mul(self, other)
    }
    fn scale(&self, s: &Scalar) -> Self {
        NCPoly::scale(self, s)
    }
    fn derive(&self) -> Self {
        self.apply_d()
    }
    fn dagger(&self) -> Result<Self> {
        Ok(self.apply_dagger())
    }
    fn is_zero(&self) -> bool {
        NCPoly::is_zero(self)
    }
    fn one_like(&self) -> Self {
        NCPoly::one()
    }
}

impl Coefficient for StructuredElement {
    fn add(&self, other: &Self) -> Self {
        StructuredElement::add(self, other)
    }
    fn neg(&self) -> Self {
        StructuredElement::neg(self)
    }
    fn mul(&self, other: &Self) -> Self {
        StructuredElement::mul(self, other)
    }
    fn scale(&self, s: &Scalar) -> Self {
        StructuredElement::scale(self, s)
    }
    fn derive(&self) -> Self {
        self.apply_d()
    }
    fn dagger(&self) -> Result<Self> {
        self.apply_dagger()
    }
    fn is_zero(&self) -> bool {
        StructuredElement::is_zero(self)
    }
    fn one_like(&self) -> Self {
        StructuredElement::one(&self.alg)
    }
}

impl Coefficient for CommDiffPoly {
    fn add(&self, other: &Self) -> Self {
        CommDiffPoly::add(self, other)
    }
    fn neg(&self) -> Self {
        CommDiffPoly::neg(self)
    }
    fn mul(&self, other: &Self) -> Self {
        CommDiffPoly::mul(self, other)
    }
    fn scale(&self, s: &Scalar) -> Self {
        CommDiffPoly::scale(self, s)
    }
    fn derive(&self) -> Self {
        self.apply_d()
    }
    fn dagger(&self) -> Result<Self> {
        Ok(self.conj())
    }
    fn is_zero(&self) -> bool {
        CommDiffPoly::is_zero(self)
    }
    fn one_like(&self) -> Self {
        CommDiffPoly::one()
    }
}

/// Generalized binomial coefficient C(k, j) = k(k-1)...(k-j+1)/j! as an
/// exact rational, valid for negative k.
pub fn gen_binom(k: i64, j: u64) -> Scalar {
    let mut num = BigRational::one();
    for t in 0..j {
        num *= BigRational::from_integer(BigInt::from(k - t as i64));
        num /= BigRational::from_integer(BigInt::from(t + 1));
    }
    Scalar::from_rational(num)
}

/// Formal pseudodifferential operator: sparse map from integer exponents to
/// coefficients, finitely many positive exponents, truncated below at
/// exponent -depth.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiDO<C: Coefficient> {
    coeffs: BTreeMap<i64, C>,
    depth: i64,
}

impl<C: Coefficient> PsiDO<C> {
    pub fn new(depth: i64) -> Self {
        assert!(depth >= 1, "truncation depth must be at least 1");
        PsiDO {
            coeffs: BTreeMap::new(),
            depth,
        }
    }

    /// Single term c * D^e.
    pub fn term(exponent: i64, coeff: C, depth: i64) -> Self {
        let mut op = PsiDO::new(depth);
        op.insert(exponent, coeff);
        op
    }

    pub fn depth(&self) -> i64 {
        self.depth
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, exponent: i64) -> Option<&C> {
        self.coeffs.get(&exponent)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &C)> {
        self.coeffs.iter()
    }

    pub fn max_order(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn insert(&mut self, exponent: i64, coeff: C) {
        if exponent < -self.depth || coeff.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&exponent) {
            Some(c) => {
                *c = c.add(&coeff);
                if c.is_zero() {
                    self.coeffs.remove(&exponent);
                }
            }
            None => {
                self.coeffs.insert(exponent, coeff);
            }
        }
    }

    /// Re-truncates to a (usually smaller) depth.
    pub fn truncate(&self, depth: i64) -> Self {
        let mut op = PsiDO::new(depth);
        for (e, c) in &self.coeffs {
            op.insert(*e, c.clone());
        }
        op
    }

    /// Same coefficients carried at a deeper truncation floor (guard).
    pub fn with_depth(&self, depth: i64) -> Self {
        assert!(depth >= self.depth, "use truncate to shrink depth");
        PsiDO {
            coeffs: self.coeffs.clone(),
            depth,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut op = self.truncate(self.depth.min(other.depth));
        for (e, c) in &other.coeffs {
            op.insert(*e, c.clone());
        }
        op
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        PsiDO {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c.neg())).collect(),
            depth: self.depth,
        }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return PsiDO::new(self.depth);
        }
        PsiDO {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c.scale(s))).collect(),
            depth: self.depth,
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Self {
        let mut op = PsiDO::new(self.depth);
        for (e, c) in &self.coeffs {
            op.insert(*e, f(c));
        }
        op
    }

    pub fn try_map_coeffs(&self, f: impl Fn(&C) -> Result<C>) -> Result<Self> {
        let mut op = PsiDO::new(self.depth);
        for (e, c) in &self.coeffs {
            op.insert(*e, f(c)?);
        }
        Ok(op)
    }

    /// Normal form of D^k * a: sum_j C(k,j) D^j(a) D^(k-j), exact for k >= 0,
    /// truncated at the working depth for k < 0.
    pub fn leibniz_expand(k: i64, a: &C, depth: i64) -> Self {
        let mut op = PsiDO::new(depth);
        let mut d_a = a.clone();
        let mut j: i64 = 0;
        loop {
            if k >= 0 && j > k {
                break;
            }
            if k - j < -depth {
                break;
            }
            let c = gen_binom(k, j as u64);
            op.insert(k - j, d_a.scale(&c));
            d_a = d_a.derive();
            j += 1;
        }
        op
    }

    /// Composition via the generalized Leibniz rule; result truncated at the
    /// smaller of the two depths.
    pub fn compose(&self, other: &Self) -> Self {
        let depth = self.depth.min(other.depth);
        let mut op = PsiDO::new(depth);
        for (e, a) in &self.coeffs {
            for (f, b) in &other.coeffs {
                // a D^e * b D^f = a * (D^e b) D^f
                let expanded = PsiDO::leibniz_expand(*e, b, depth + f.abs() + e.abs() + 1);
                for (g, c) in &expanded.coeffs {
                    let exp = g + f;
                    if exp < -depth {
                        continue;
                    }
                    op.insert(exp, a.mul(c));
                }
            }
        }
        op
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }

    /// P^n by repeated composition; n >= 1.
    pub fn power(&self, n: u32) -> Self {
        assert!(n >= 1);
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.compose(self);
        }
        acc
    }

    /// (P_+, P_-): differential part (exponents >= 0) and integral part.
    pub fn split(&self) -> (Self, Self) {
        let mut plus = PsiDO::new(self.depth);
        let mut minus = PsiDO::new(self.depth);
        for (e, c) in &self.coeffs {
            if *e >= 0 {
                plus.insert(*e, c.clone());
            } else {
                minus.insert(*e, c.clone());
            }
        }
        (plus, minus)
    }

    pub fn plus_part(&self) -> Self {
        self.split().0
    }

    pub fn minus_part(&self) -> Self {
        self.split().1
    }

    /// Formal adjoint: sum_k (-D)^k a_k^dagger, normal-ordered.
    pub fn adjoint(&self) -> Result<Self> {
        let mut op = PsiDO::new(self.depth);
        for (k, a) in &self.coeffs {
            let ad = a.dagger()?;
            let sign = if k.rem_euclid(2) == 0 {
                Scalar::one()
            } else {
                Scalar::from_int(-1)
            };
            let expanded = Self::leibniz_expand(*k, &ad, self.depth);
            for (e, c) in &expanded.coeffs {
                op.insert(*e, c.scale(&sign));
            }
        }
        Ok(op)
    }
}

impl<C: Coefficient + fmt::Display> fmt::Display for PsiDO<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = format!("{}", c);
            let dpow = match *e {
                0 => String::new(),
                1 => "D".to_string(),
                k => format!("D^{}", k),
            };
            if dpow.is_empty() {
                write!(f, "{}", cs)?;
            } else if cs == "1" {
                write!(f, "{}", dpow)?;
            } else if cs.contains(" + ") {
                write!(f, "({})*{}", cs, dpow)?;
            } else {
                write!(f, "{}*{}", cs, dpow)?;
            }
        }
        Ok(())
    }
}

/// The bare derivation D as an operator.
pub fn d_operator<C: Coefficient>(one: &C, depth: i64) -> PsiDO<C> {
    PsiDO::term(1, one.clone(), depth)
}

/// Checks equality on all exponents >= -floor.
pub fn equal_above<C: Coefficient>(p: &PsiDO<C>, q: &PsiDO<C>, floor: i64) -> bool {
    p.truncate(floor) == q.truncate(floor)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationConfig {
    pub depth: i64,
    pub guard: i64,
}

impl TruncationConfig {
    pub fn new(depth: i64, guard: i64) -> Result<Self> {
        if depth < 1 || guard < 0 {
            return Err(Error::Config(
                "truncation depth must be >= 1 and guard >= 0".into(),
            ));
        }
        Ok(TruncationConfig { depth, guard })
    }

    pub fn working_depth(&self) -> i64 {
        self.depth + self.guard
    }
}
