//! Free noncommutative differential polynomials.

use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;

/// A differential field symbol D^m(U_k), optionally daggered.
///
/// The derived ordering (field, order, dagger) is the canonical total order
/// on symbols. The dagger commutes with D by construction: daggering a
/// symbol flips the flag and keeps (k, m).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FieldSymbol {
    pub field: u32,
    pub order: u32,
    pub dagger: bool,
}

impl FieldSymbol {
    pub fn new(field: u32) -> Self {
        assert!(field >= 1, "field index starts at 1");
        FieldSymbol {
            field,
            order: 0,
            dagger: false,
        }
    }

    pub fn with_order(field: u32, order: u32) -> Self {
        assert!(field >= 1, "field index starts at 1");
        FieldSymbol {
            field,
            order,
            dagger: false,
        }
    }

    pub fn daggered(mut self) -> Self {
        self.dagger = !self.dagger;
        self
    }

    pub fn derived(mut self) -> Self {
        self.order += 1;
        self
    }

    /// Canonical text: `U1`, `D(U1)`, `D^2(U3)`, dagger as trailing `+`.
    pub fn render(&self) -> String {
        let core = format!("U{}", self.field);
        let body = match self.order {
            0 => core,
            1 => format!("D({})", core),
            m => format!("D^{}({})", m, core),
        };
        if self.dagger {
            format!("{}+", body)
        } else {
            body
        }
    }

    /// Parses the canonical text form.
    pub fn parse(s: &str) -> Option<FieldSymbol> {
        let (s, dagger) = match s.strip_suffix('+') {
            Some(rest) => (rest, true),
            None => (s, false),
        };
        let (order, inner) = if let Some(rest) = s.strip_prefix("D^") {
            let (m, rest) = rest.split_once('(')?;
            (m.parse().ok()?, rest.strip_suffix(')')?)
        } else if let Some(rest) = s.strip_prefix("D(") {
            (1, rest.strip_suffix(')')?)
        } else {
            (0, s)
        };
        let field: u32 = inner.strip_prefix('U')?.parse().ok()?;
        if field == 0 {
            return None;
        }
        Some(FieldSymbol {
            field,
            order,
            dagger,
        })
    }
}

impl fmt::Display for FieldSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

pub type Word = Vec<FieldSymbol>;

/// Sparse noncommutative polynomial: words of symbols with Gaussian-rational
/// coefficients. No zero coefficients are stored; the empty word is the unit.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct NCPoly {
    terms: BTreeMap<Word, Scalar>,
}

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        NCPoly::scalar(Scalar::one())
    }

    pub fn scalar(s: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !s.is_zero() {
            terms.insert(Vec::new(), s);
        }
        NCPoly { terms }
    }

    pub fn symbol(field: u32) -> Self {
        NCPoly::from_symbol(FieldSymbol::new(field))
    }

    pub fn from_symbol(sym: FieldSymbol) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![sym], Scalar::one());
        NCPoly { terms }
    }

    pub fn from_word(word: Word, coeff: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(word, coeff);
        }
        NCPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, word: &Word) -> Scalar {
        self.terms.get(word).cloned().unwrap_or_else(Scalar::zero)
    }

    fn insert(&mut self, word: Word, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&word) {
            Some(c) => {
                *c += &coeff;
                if c.is_zero() {
                    self.terms.remove(&word);
                }
            }
            None => {
                self.terms.insert(word, coeff);
            }
        }
    }

    pub fn add(&self, other: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.insert(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.insert(w.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> NCPoly {
        NCPoly {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> NCPoly {
        if s.is_zero() {
            return NCPoly::zero();
        }
        NCPoly {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c * s)).collect(),
        }
    }

    /// Free multiplication: words concatenate, no spurious commutation.
    pub fn mul(&self, other: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.insert(w, c1 * c2);
            }
        }
        out
    }

    /// The derivation D: Leibniz over words, raising the derivative order of
    /// one letter at a time.
    pub fn apply_d(&self) -> NCPoly {
        self.derive_with(|sym| NCPoly::from_symbol(sym.derived()))
    }

    pub fn apply_d_n(&self, n: u32) -> NCPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.apply_d();
        }
        p
    }

    /// The involution: reverses words, flips dagger flags, conjugates scalar
    /// coefficients.
    pub fn apply_dagger(&self) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, c) in &self.terms {
            let word: Word = w.iter().rev().map(|s| s.daggered()).collect();
            out.insert(word, c.conj());
        }
        out
    }

    /// Extends `d` on symbols to a derivation on the whole algebra.
    pub fn derive_with(&self, d: impl Fn(&FieldSymbol) -> NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, c) in &self.terms {
            for pos in 0..w.len() {
                let image = d(&w[pos]);
                for (iw, ic) in &image.terms {
                    let mut word: Word = Vec::with_capacity(w.len() + iw.len());
                    word.extend_from_slice(&w[..pos]);
                    word.extend_from_slice(iw);
                    word.extend_from_slice(&w[pos + 1..]);
                    out.insert(word, c * ic);
                }
            }
        }
        out
    }

    /// Fallible variant of `derive_with`.
    pub fn try_derive_with<E>(
        &self,
        d: impl Fn(&FieldSymbol) -> std::result::Result<NCPoly, E>,
    ) -> std::result::Result<NCPoly, E> {
        let mut out = NCPoly::zero();
        for (w, c) in &self.terms {
            for pos in 0..w.len() {
                let image = d(&w[pos])?;
                for (iw, ic) in &image.terms {
                    let mut word: Word = Vec::with_capacity(w.len() + iw.len());
                    word.extend_from_slice(&w[..pos]);
                    word.extend_from_slice(iw);
                    word.extend_from_slice(&w[pos + 1..]);
                    out.insert(word, c * ic);
                }
            }
        }
        Ok(out)
    }

    /// Replaces letters by polynomials (multiplicative substitution); `None`
    /// keeps the letter.
    pub fn substitute(&self, f: impl Fn(&FieldSymbol) -> Option<NCPoly>) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, c) in &self.terms {
            let mut acc = NCPoly::scalar(c.clone());
            for sym in w {
                let factor = match f(sym) {
                    Some(p) => p,
                    None => NCPoly::from_symbol(*sym),
                };
                acc = acc.mul(&factor);
            }
            out = out.add(&acc);
        }
        out
    }

    /// All symbols occurring in the polynomial.
    pub fn symbols(&self) -> std::collections::BTreeSet<FieldSymbol> {
        self.terms.keys().flatten().copied().collect()
    }

    pub fn has_dagger(&self) -> bool {
        self.terms.keys().any(|w| w.iter().any(|s| s.dagger))
    }

    pub fn max_field_index(&self) -> u32 {
        self.terms
            .keys()
            .flatten()
            .map(|s| s.field)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let word = w
                .iter()
                .map(|s| s.render())
                .collect::<Vec<_>>()
                .join("*");
            if w.is_empty() {
                write!(f, "{}", c)?;
            } else if c.is_one() {
                write!(f, "{}", word)?;
            } else {
                write!(f, "{}*{}", c, word)?;
            }
        }
        Ok(())
    }
}


#[cfg(test)]
pub(crate) use tests::random_poly;
