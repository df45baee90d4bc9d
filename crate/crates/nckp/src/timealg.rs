//! The quaternionic time algebra: free words in commu-nothing time letters
//! t_1, t_2, ... with complexified-quaternion coefficients interleaved.
//!
//! Constants cannot move across time letters, so the normal form keeps one
//! basis quaternion per letter block and only merges adjacent constants;
//! central Q(i)-scalars are pulled out into the word's weight.

use crate::algebra::quat_basis_product;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;

/// A complexified quaternion: coefficients over Q(i) on the basis 1,i,j,k.
/// The involution reverses the imaginary basis and is C-linear.
#[derive(Clone, Debug, PartialEq)]
pub struct Quat(pub [Scalar; 4]);

impl Quat {
    pub fn zero() -> Self {
        Quat([Scalar::zero(), Scalar::zero(), Scalar::zero(), Scalar::zero()])
    }

    pub fn one() -> Self {
        Quat::basis(0)
    }

    pub fn basis(b: usize) -> Self {
        assert!(b < 4);
        let mut q = Quat::zero();
        q.0[b] = Scalar::one();
        q
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Quat([
            Scalar::from_int(a),
            Scalar::from_int(b),
            Scalar::from_int(c),
            Scalar::from_int(d),
        ])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, other: &Quat) -> Quat {
        let mut out = Quat::zero();
        for b in 0..4 {
            out.0[b] = &self.0[b] + &other.0[b];
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> Quat {
        let mut out = Quat::zero();
        for b in 0..4 {
            out.0[b] = &self.0[b] * s;
        }
        out
    }

    pub fn mul(&self, other: &Quat) -> Quat {
        let mut out = Quat::zero();
        for a in 0..4 {
            if self.0[a].is_zero() {
                continue;
            }
            for b in 0..4 {
                if other.0[b].is_zero() {
                    continue;
                }
                let (sign, c) = quat_basis_product(a, b);
                let term = &self.0[a] * &other.0[b];
                if sign < 0 {
                    out.0[c] = &out.0[c] - &term;
                } else {
                    out.0[c] = &out.0[c] + &term;
                }
            }
        }
        out
    }

    /// Quaternion conjugation, C-linear in the ground field.
    pub fn conj(&self) -> Quat {
        Quat([
            self.0[0].clone(),
            -&self.0[1],
            -&self.0[2],
            -&self.0[3],
        ])
    }

    /// N(q) = q conj(q) = a^2 + b^2 + c^2 + d^2; a complex number, possibly
    /// zero for nonzero q.
    pub fn norm(&self) -> Scalar {
        let mut n = Scalar::zero();
        for b in 0..4 {
            n = &n + &(&self.0[b] * &self.0[b]);
        }
        n
    }

    pub fn inverse(&self) -> Result<Quat> {
        let n = self.norm();
        let inv = n.recip().ok_or(Error::NotInvertible)?;
        Ok(self.conj().scale(&inv))
    }

    /// Checks u^2 = -1 with zero scalar part.
    pub fn is_imaginary_unit(&self) -> bool {
        if !self.0[0].is_zero() {
            return false;
        }
        let sq = self.mul(self);
        sq.0[0] == Scalar::from_int(-1)
            && sq.0[1].is_zero()
            && sq.0[2].is_zero()
            && sq.0[3].is_zero()
    }

    pub fn render(&self) -> String {
        let labels = ["", "i", "j", "k"];
        let mut parts = Vec::new();
        for b in 0..4 {
            if self.0[b].is_zero() {
                continue;
            }
            let c = format!("{}", self.0[b]);
            if b == 0 {
                parts.push(c);
            } else if c == "1" {
                parts.push(labels[b].to_string());
            } else if c == "-1" {
                parts.push(format!("-{}", labels[b]));
            } else {
                parts.push(format!("{}*{}", c, labels[b]));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+").replace("+-", "-")
        }
    }
}

impl fmt::Display for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// One letter of a time word: a time variable or an imaginary basis
/// quaternion (index 1..3; the unit never appears as a letter).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum TLetter {
    T(u32),
    Q(u8),
}

pub type TimeWord = Vec<TLetter>;

/// Element of the time algebra: Q(i)-weighted normal-form words.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TimeElement {
    terms: BTreeMap<TimeWord, Scalar>,
}

impl TimeElement {
    pub fn zero() -> Self {
        TimeElement::default()
    }

    pub fn one() -> Self {
        TimeElement::scalar(Scalar::one())
    }

    pub fn scalar(s: Scalar) -> Self {
        let mut e = TimeElement::zero();
        e.insert(Vec::new(), s);
        e
    }

    pub fn time(n: u32) -> Self {
        assert!(n >= 1, "time index starts at 1");
        let mut e = TimeElement::zero();
        e.insert(vec![TLetter::T(n)], Scalar::one());
        e
    }

    pub fn constant(q: &Quat) -> Self {
        let mut e = TimeElement::zero();
        e.insert(Vec::new(), q.0[0].clone());
        for b in 1..4u8 {
            e.insert(vec![TLetter::Q(b)], q.0[b as usize].clone());
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TimeWord, &Scalar)> {
        self.terms.iter()
    }

    fn insert(&mut self, word: TimeWord, coeff: Scalar) {
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

    /// Merges adjacent basis-quaternion letters; drops unit results.
    fn normalize(mut word: TimeWord, mut coeff: Scalar) -> (TimeWord, Scalar) {
        let mut i = 0;
        while i + 1 < word.len() {
            if let (TLetter::Q(a), TLetter::Q(b)) = (word[i], word[i + 1]) {
                let (sign, c) = quat_basis_product(a as usize, b as usize);
                if sign < 0 {
                    coeff = -&coeff;
                }
                word.remove(i + 1);
                if c == 0 {
                    word.remove(i);
                    i = i.saturating_sub(1);
                } else {
                    word[i] = TLetter::Q(c as u8);
                }
            } else {
                i += 1;
            }
        }
        (word, coeff)
    }

    pub fn add(&self, other: &TimeElement) -> TimeElement {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.insert(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TimeElement) -> TimeElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TimeElement {
        TimeElement {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> TimeElement {
        if s.is_zero() {
            return TimeElement::zero();
        }
        TimeElement {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &TimeElement) -> TimeElement {
        let mut out = TimeElement::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                let (w, c) = TimeElement::normalize(w, c1 * c2);
                out.insert(w, c);
            }
        }
        out
    }
}

impl fmt::Display for TimeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let labels = ["1", "i", "j", "k"];
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}|H)", c)?;
            for letter in w {
                match letter {
                    TLetter::T(n) => write!(f, " t{}", n)?,
                    TLetter::Q(b) => write!(f, " ({}|H)", labels[*b as usize])?,
                }
            }
        }
        Ok(())
    }
}

/// The derivation d/dt_n: Leibniz over letters, kills constants.
pub fn time_derive(n: u32, x: &TimeElement) -> TimeElement {
    let mut out = TimeElement::zero();
    for (w, c) in x.terms() {
        for pos in 0..w.len() {
            if w[pos] != TLetter::T(n) {
                continue;
            }
            let mut word: TimeWord = Vec::with_capacity(w.len() - 1);
            word.extend_from_slice(&w[..pos]);
            word.extend_from_slice(&w[pos + 1..]);
            let (word, coeff) = TimeElement::normalize(word, c.clone());
            out.insert(word, coeff);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionMode {
    Left,
    Right,
    Adjoint,
}

#[derive(Clone, Debug)]
pub struct QuatAction {
    pub mode: ActionMode,
    pub q: Quat,
}

impl QuatAction {
    pub fn new(mode: ActionMode, q: Quat) -> Result<Self> {
        if mode == ActionMode::Adjoint && q.norm().recip().is_none() {
            return Err(Error::NotInvertible);
        }
        Ok(QuatAction { mode, q })
    }
}

/// Left/right module actions by constants; adjoint is the algebra
/// automorphism t_n -> q t_n q^{-1} fixing constants.
pub fn act(action: &QuatAction, x: &TimeElement) -> Result<TimeElement> {
    let qe = TimeElement::constant(&action.q);
    match action.mode {
        ActionMode::Left => Ok(qe.mul(x)),
        ActionMode::Right => Ok(x.mul(&qe)),
        ActionMode::Adjoint => {
            let qinv = TimeElement::constant(&action.q.inverse()?);
            let mut out = TimeElement::zero();
            for (w, c) in x.terms() {
                let mut acc = TimeElement::scalar(c.clone());
                for letter in w {
                    let factor = match letter {
                        TLetter::T(n) => qe.mul(&TimeElement::time(*n)).mul(&qinv),
                        TLetter::Q(b) => {
                            TimeElement::constant(&Quat::basis(*b as usize))
                        }
                    };
                    acc = acc.mul(&factor);
                }
                out = out.add(&acc);
            }
            Ok(out)
        }
    }
}

/// Commutative polynomial over C_u = span(1, u): coefficients are pairs
/// (a, b) meaning a + b u, monomials are sorted multisets of time indices.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CommTimePoly {
    terms: BTreeMap<Vec<u32>, (Scalar, Scalar)>,
}

impl CommTimePoly {
    pub fn zero() -> Self {
        CommTimePoly::default()
    }

    pub fn one() -> Self {
        let mut p = CommTimePoly::zero();
        p.insert(Vec::new(), (Scalar::one(), Scalar::zero()));
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &(Scalar, Scalar))> {
        self.terms.iter()
    }

    fn insert(&mut self, mono: Vec<u32>, coeff: (Scalar, Scalar)) {
        if coeff.0.is_zero() && coeff.1.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(mono.clone())
            .or_insert((Scalar::zero(), Scalar::zero()));
        entry.0 += &coeff.0;
        entry.1 += &coeff.1;
        if entry.0.is_zero() && entry.1.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn add(&self, other: &CommTimePoly) -> CommTimePoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &CommTimePoly) -> CommTimePoly {
        let mut out = CommTimePoly::zero();
        for (m1, (a, b)) in &self.terms {
            for (m2, (c, d)) in &other.terms {
                let mut m = m1.clone();
                m.extend_from_slice(m2);
                m.sort_unstable();
                // (a + bu)(c + du) with u^2 = -1
                let re = &(a * c) - &(b * d);
                let im = &(a * d) + &(b * c);
                out.insert(m, (re, im));
            }
        }
        out
    }

    /// Drops the u component (the real slice of C_u).
    pub fn real_slice(&self) -> CommTimePoly {
        let mut out = CommTimePoly::zero();
        for (m, (a, _)) in &self.terms {
            out.insert(m.clone(), (a.clone(), Scalar::zero()));
        }
        out
    }
}

impl fmt::Display for CommTimePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, (a, b)) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}+({})u)", a, b)?;
            for n in m {
                write!(f, "*t{}", n)?;
            }
        }
        Ok(())
    }
}

/// Quotient onto C_u[t_1, t_2, ...]: letters commute, coefficients are
/// projected onto span(1, u) via the symmetric bilinear form on the
/// imaginary part; components orthogonal to C_u map to 0.
pub fn commutative_reduction(u: &Quat, x: &TimeElement) -> Result<CommTimePoly> {
    if !u.is_imaginary_unit() {
        return Err(Error::NotImaginaryUnit);
    }
    let mut out = CommTimePoly::zero();
    for (w, c) in x.terms() {
        let mut coeff = (c.clone(), Scalar::zero());
        let mut mono: Vec<u32> = Vec::new();
        for letter in w {
            match letter {
                TLetter::T(n) => mono.push(*n),
                TLetter::Q(b) => {
                    // e_b projects to B(e_b, u) u = u_b u
                    let ub = &u.0[*b as usize];
                    let (a, bb) = coeff;
                    coeff = (-&(&bb * ub), &a * ub);
                }
            }
        }
        mono.sort_unstable();
        out.insert(mono, coeff);
    }
    Ok(out)
}

/// The real-slice reduction: commutative_reduction with the u component
/// dropped as well.
pub fn real_reduction(u: &Quat, x: &TimeElement) -> Result<CommTimePoly> {
    Ok(commutative_reduction(u, x)?.real_slice())
}
