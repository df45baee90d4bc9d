//! Structured coefficient backend: a finite-dimensional algebra tensor
//! commutative differential polynomials in scalar component fields.

use crate::algebra::StructAlgebra;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::ncpoly::NCPoly;

/// A scalar component field u_id differentiated `order` times.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ComponentVar {
    pub id: u32,
    pub order: u32,
}

impl ComponentVar {
    pub fn new(id: u32) -> Self {
        ComponentVar { id, order: 0 }
    }

    pub fn render(&self) -> String {
        match self.order {
            0 => format!("u{}", self.id),
            1 => format!("D(u{})", self.id),
            m => format!("D^{}(u{})", m, self.id),
        }
    }
}

/// Commutative monomial: sorted multiset of component variables.
pub type CommMonomial = Vec<ComponentVar>;

/// Commutative differential polynomial over the Gaussian rationals.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CommDiffPoly {
    terms: BTreeMap<CommMonomial, Scalar>,
}

impl CommDiffPoly {
    pub fn zero() -> Self {
        CommDiffPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        CommDiffPoly::scalar(Scalar::one())
    }

    pub fn scalar(s: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !s.is_zero() {
            terms.insert(Vec::new(), s);
        }
        CommDiffPoly { terms }
    }

    pub fn var(id: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![ComponentVar::new(id)], Scalar::one());
        CommDiffPoly { terms }
    }

    pub fn from_monomial(mut mono: CommMonomial, coeff: Scalar) -> Self {
        mono.sort();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(mono, coeff);
        }
        CommDiffPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CommMonomial, &Scalar)> {
        self.terms.iter()
    }

    fn insert(&mut self, mono: CommMonomial, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(c) => {
                *c += &coeff;
                if c.is_zero() {
                    self.terms.remove(&mono);
                }
            }
            None => {
                self.terms.insert(mono, coeff);
            }
        }
    }

    pub fn add(&self, other: &CommDiffPoly) -> CommDiffPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &CommDiffPoly) -> CommDiffPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> CommDiffPoly {
        CommDiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> CommDiffPoly {
        if s.is_zero() {
            return CommDiffPoly::zero();
        }
        CommDiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &CommDiffPoly) -> CommDiffPoly {
        let mut out = CommDiffPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m = m1.clone();
                m.extend_from_slice(m2);
                m.sort();
                out.insert(m, c1 * c2);
            }
        }
        out
    }

    /// Leibniz derivation raising one derivative order at a time.
    pub fn apply_d(&self) -> CommDiffPoly {
        let mut out = CommDiffPoly::zero();
        for (mono, c) in &self.terms {
            for pos in 0..mono.len() {
                let mut m = mono.clone();
                m[pos].order += 1;
                m.sort();
                out.insert(m, c.clone());
            }
        }
        out
    }

    pub fn apply_d_n(&self, n: u32) -> CommDiffPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.apply_d();
        }
        p
    }

    /// Complex conjugation of coefficients; component fields are treated as
    /// self-adjoint generators.
    pub fn conj(&self) -> CommDiffPoly {
        CommDiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.conj()))
                .collect(),
        }
    }

    /// Sets the listed component fields to zero.
    pub fn substitute_zero(&self, ids: &[u32]) -> CommDiffPoly {
        let mut out = CommDiffPoly::zero();
        for (m, c) in &self.terms {
            if m.iter().any(|v| ids.contains(&v.id)) {
                continue;
            }
            out.insert(m.clone(), c.clone());
        }
        out
    }

    /// Splits coefficients into (real-part poly, imaginary-part poly).
    pub fn split_re_im(&self) -> (CommDiffPoly, CommDiffPoly) {
        let mut re = CommDiffPoly::zero();
        let mut im = CommDiffPoly::zero();
        for (m, c) in &self.terms {
            re.insert(m.clone(), Scalar::from_rational(c.re.clone()));
            im.insert(m.clone(), Scalar::from_rational(c.im.clone()));
        }
        (re, im)
    }
}

impl fmt::Display for CommDiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono = m.iter().map(|v| v.render()).collect::<Vec<_>>().join("*");
            if m.is_empty() {
                write!(f, "{}", c)?;
            } else if c.is_one() {
                write!(f, "{}", mono)?;
            } else {
                write!(f, "{}*{}", c, mono)?;
            }
        }
        Ok(())
    }
}

/// Element of B (x) commutative differential polynomials: a sparse map from
/// B-basis index to a commutative differential polynomial.
#[derive(Clone, Debug)]
pub struct StructuredElement {
    pub alg: Arc<StructAlgebra>,
    comps: BTreeMap<usize, CommDiffPoly>,
}

impl PartialEq for StructuredElement {
    fn eq(&self, other: &Self) -> bool {
        self.alg.name == other.alg.name && self.comps == other.comps
    }
}

impl StructuredElement {
    pub fn zero(alg: &Arc<StructAlgebra>) -> Self {
        StructuredElement {
            alg: alg.clone(),
            comps: BTreeMap::new(),
        }
    }

    pub fn one(alg: &Arc<StructAlgebra>) -> Self {
        let mut out = StructuredElement::zero(alg);
        for (i, c) in alg.unit.iter().enumerate() {
            if !c.is_zero() {
                out.comps.insert(i, CommDiffPoly::scalar(c.clone()));
            }
        }
        out
    }

    pub fn from_component(alg: &Arc<StructAlgebra>, basis: usize, p: CommDiffPoly) -> Self {
        let mut out = StructuredElement::zero(alg);
        if !p.is_zero() {
            out.comps.insert(basis, p);
        }
        out
    }

    pub fn component(&self, basis: usize) -> CommDiffPoly {
        self.comps.get(&basis).cloned().unwrap_or_default()
    }

    pub fn components(&self) -> impl Iterator<Item = (&usize, &CommDiffPoly)> {
        self.comps.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    fn insert(&mut self, basis: usize, p: CommDiffPoly) {
        if p.is_zero() {
            return;
        }
        match self.comps.get_mut(&basis) {
            Some(q) => {
                *q = q.add(&p);
                if q.is_zero() {
                    self.comps.remove(&basis);
                }
            }
            None => {
                self.comps.insert(basis, p);
            }
        }
    }

    fn check_same(&self, other: &StructuredElement) -> Result<()> {
        if self.alg.name != other.alg.name {
            return Err(Error::AlgebraMismatch(format!(
                "{} vs {}",
                self.alg.name, other.alg.name
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &StructuredElement) -> StructuredElement {
        self.check_same(other).expect("backend mismatch");
        let mut out = self.clone();
        for (b, p) in &other.comps {
            out.insert(*b, p.clone());
        }
        out
    }

    pub fn sub(&self, other: &StructuredElement) -> StructuredElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> StructuredElement {
        StructuredElement {
            alg: self.alg.clone(),
            comps: self.comps.iter().map(|(b, p)| (*b, p.neg())).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> StructuredElement {
        if s.is_zero() {
            return StructuredElement::zero(&self.alg);
        }
        StructuredElement {
            alg: self.alg.clone(),
            comps: self.comps.iter().map(|(b, p)| (*b, p.scale(s))).collect(),
        }
    }

    pub fn mul(&self, other: &StructuredElement) -> StructuredElement {
        self.check_same(other).expect("backend mismatch");
        let mut out = StructuredElement::zero(&self.alg);
        for (i, p) in &self.comps {
            for (j, q) in &other.comps {
                let pq = p.mul(q);
                for (k, c) in self.alg.basis_product(*i, *j) {
                    out.insert(*k, pq.scale(c));
                }
            }
        }
        out
    }

    /// D acts on the polynomial factor only; structure constants are flat.
    pub fn apply_d(&self) -> StructuredElement {
        StructuredElement {
            alg: self.alg.clone(),
            comps: self
                .comps
                .iter()
                .filter_map(|(b, p)| {
                    let d = p.apply_d();
                    if d.is_zero() {
                        None
                    } else {
                        Some((*b, d))
                    }
                })
                .collect(),
        }
    }

    pub fn apply_d_n(&self, n: u32) -> StructuredElement {
        let mut e = self.clone();
        for _ in 0..n {
            e = e.apply_d();
        }
        e
    }

    /// B's involution on basis indices; complex conjugation of coefficients
    /// when the involution is conjugate-linear.
    pub fn apply_dagger(&self) -> Result<StructuredElement> {
        let inv = self
            .alg
            .involution
            .as_ref()
            .ok_or(Error::MissingInvolution)?;
        let mut out = StructuredElement::zero(&self.alg);
        for (b, p) in &self.comps {
            let p = if inv.conjugate_scalars { p.conj() } else { p.clone() };
            for (j, w) in &inv.images[*b] {
                out.insert(*j, p.scale(w));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for StructuredElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (b, p) in &self.comps {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})*{}", p, self.alg.labels[*b])?;
        }
        Ok(())
    }
}

/// The unique D- and dagger-compatible algebra homomorphism extending the
/// assignment of underived field symbols to structured elements.
pub fn specialize(
    p: &NCPoly,
    assign: &BTreeMap<u32, StructuredElement>,
    alg: &Arc<StructAlgebra>,
) -> Result<StructuredElement> {
    let mut out = StructuredElement::zero(alg);
    for (word, coeff) in p.terms() {
        let mut acc = StructuredElement::one(alg).scale(coeff);
        for sym in word {
            let base = assign
                .get(&sym.field)
                .ok_or_else(|| Error::UnassignedSymbol(format!("U{}", sym.field)))?;
            let mut e = base.apply_d_n(sym.order);
            if sym.dagger {
                e = e.apply_dagger()?;
            }
            acc = acc.mul(&e);
        }
        out = out.add(&acc);
    }
    Ok(out)
}

/// Scalar-central specialization: every field U_k becomes the commuting
/// scalar component field u_k. Intended for dagger-free inputs.
pub fn scalar_specialize(p: &NCPoly) -> CommDiffPoly {
    let mut out = CommDiffPoly::zero();
    for (word, coeff) in p.terms() {
        let mono: CommMonomial = word
            .iter()
            .map(|s| ComponentVar {
                id: s.field,
                order: s.order,
            })
            .collect();
        out = out.add(&CommDiffPoly::from_monomial(mono, coeff.clone()));
    }
    out
}
