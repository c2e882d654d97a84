//! Sparse Laurent polynomials over the rationals in interned atoms.

use std::cmp::Ordering;
use std::borrow::Cow;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::atom::AtomId;

pub(crate) type Coef = BigRational;

/// A power product of atoms, sorted by atom id with nonzero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub(crate) struct Monomial(pub(crate) SmallVec<[(AtomId, i32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn atom(id: AtomId, exp: i32) -> Self {
        let mut m = Monomial::one();
        if exp != 0 {
            m.0.push((id, exp));
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(AtomId, i32)> {
        self.0.iter()
    }

    pub fn exp_of(&self, id: AtomId) -> i32 {
        match self.0.binary_search_by_key(&id, |&(a, _)| a) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    /// Multiplies by `other^sign`.
    fn combine(&self, other: &Monomial, sign: i32) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, sign * b[j].1));
                j += 1;
            } else {
                let e = a[i].1 + sign * b[j].1;
                if e != 0 {
                    out.push((a[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
        Monomial(out)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.combine(other, 1)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.combine(other, -1)
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|&(a, e)| (a, -e)).collect())
    }

    /// True when `self` divides `other` with nonnegative quotient exponents.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().all(|&(a, e)| other.exp_of(a) >= e)
    }

    /// Componentwise minimum of exponents (treating absent atoms as 0).
    pub fn meet(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                if a[i].1 < 0 {
                    out.push(a[i]);
                }
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                if b[j].1 < 0 {
                    out.push(b[j]);
                }
                j += 1;
            } else {
                let e = a[i].1.min(b[j].1);
                if e != 0 {
                    out.push((a[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
        Monomial(out)
    }

    pub fn has_negative(&self) -> bool {
        self.0.iter().any(|&(_, e)| e < 0)
    }
}

impl Ord for Monomial {
    /// Lexicographic order on exponent vectors, atoms taken in id order.
    /// Compatible with multiplication, also for negative exponents.
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(&(_, e)), None) => return e.cmp(&0),
                (None, Some(&(_, e))) => return 0.cmp(&e),
                (Some(&(ia, ea)), Some(&(ib, eb))) => match ia.cmp(&ib) {
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                    Ordering::Less => return ea.cmp(&0),
                    Ordering::Greater => return 0.cmp(&eb),
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Terms are kept sorted in descending monomial order; coefficients are nonzero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Poly {
    pub(crate) terms: Vec<(Monomial, Coef)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn constant(c: Coef) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(Monomial::one(), c)],
            }
        }
    }

    pub fn one() -> Poly {
        Poly::constant(Coef::one())
    }

    pub fn term(m: Monomial, c: Coef) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn from_unsorted(terms: impl IntoIterator<Item = (Monomial, Coef)>) -> Poly {
        let mut acc: HashMap<Monomial, Coef> = HashMap::new();
        for (m, c) in terms {
            match acc.get_mut(&m) {
                Some(v) => *v += c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn as_constant(&self) -> Option<Coef> {
        match self.terms.as_slice() {
            [] => Some(Coef::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<&(Monomial, Coef)> {
        self.terms.first()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() {
                out.push(b[j].clone());
                j += 1;
            } else {
                match a[i].0.cmp(&b[j].0) {
                    Ordering::Greater => {
                        out.push(a[i].clone());
                        i += 1;
                    }
                    Ordering::Less => {
                        out.push(b[j].clone());
                        j += 1;
                    }
                    Ordering::Equal => {
                        let c = &a[i].1 + &b[j].1;
                        if !c.is_zero() {
                            out.push((a[i].0.clone(), c));
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        Poly { terms: out }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Coef) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    /// Multiplication by a monomial preserves the term order.
    pub fn mul_monomial(&self, m: &Monomial, k: &Coef) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(t, c)| (t.mul(m), c * k)).collect(),
        }
    }

    /// Formal product; the result may contain monomials that still need
    /// the kernel's rewrite rules.
    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_monomial(m, c);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_monomial(m, c);
        }
        let mut acc: HashMap<Monomial, Coef> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    /// Greatest common monomial divisor (exponents may be negative).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for (m, _) in it {
            g = g.meet(m);
        }
        g
    }

    pub fn atoms(&self) -> Vec<AtomId> {
        let mut out: Vec<AtomId> = self
            .terms
            .iter()
            .flat_map(|(m, _)| m.iter().map(|&(a, _)| a))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Formal partial derivative with respect to one atom.
    pub fn formal_derivative(&self, id: AtomId) -> Poly {
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.exp_of(id);
            if e == 0 {
                return None;
            }
            let m2 = m.mul(&Monomial::atom(id, -1));
            Some((m2, c * Coef::from_integer(e.into())))
        });
        Poly::from_unsorted(terms)
    }

    /// Exact quotient `self / divisor` in the Laurent polynomial ring, if it exists.
    ///
    /// `divisor` must have nonnegative exponents and no monomial content.
    pub fn divide_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lt_m, lt_c) = divisor.leading()?;
        if self.is_zero() {
            return Some(Poly::zero());
        }
        // shift to ordinary polynomials
        let content = self.monomial_content();
        let shift = Monomial(
            content
                .iter()
                .filter(|&&(_, e)| e < 0)
                .map(|&(a, e)| (a, -e))
                .collect(),
        );
        let base = if shift.is_one() {
            Cow::Borrowed(self)
        } else {
            Cow::Owned(self.mul_monomial(&shift, &Coef::one()))
        };
        let mut rem: BTreeMap<Monomial, Coef> = base.terms.iter().cloned().collect();
        let mut quot: Vec<(Monomial, Coef)> = Vec::new();
        while let Some((m, c)) = rem.pop_last() {
            if !lt_m.divides(&m) {
                return None;
            }
            let qm = m.div(lt_m);
            let qc = &c / lt_c;
            for (dm, dc) in &divisor.terms[1..] {
                let tm = dm.mul(&qm);
                let tc = dc * &qc;
                match rem.entry(tm) {
                    Entry::Occupied(mut o) => {
                        *o.get_mut() -= tc;
                        if o.get().is_zero() {
                            o.remove();
                        }
                    }
                    Entry::Vacant(v) => {
                        v.insert(-tc);
                    }
                }
            }
            quot.push((qm, qc));
        }
        let q = Poly { terms: quot };
        Some(if shift.is_one() {
            q
        } else {
            q.mul_monomial(&shift.inverse(), &Coef::one())
        })
    }

    /// Makes the leading coefficient 1, returning the removed factor.
    pub fn make_monic(&self) -> (Coef, Poly) {
        match self.leading() {
            None => (Coef::one(), Poly::zero()),
            Some((_, c)) => {
                let c = c.clone();
                (c.clone(), self.scale(&c.recip()))
            }
        }
    }
}
