//! The expression type and its arithmetic.
//!
//! An [`Expr`] is always held in normal form: a Laurent polynomial numerator
//! over interned atoms divided by a product of monic, content-free polynomial
//! factors. The rewrite rules of the kernel are applied eagerly:
//!
//! * `cos(a)^2 -> 1 - sin(a)^2`, so cosines appear at most linearly;
//! * products of exponentials merge into one `exp` of the summed arguments;
//! * `sqrt(a)^2 -> a`, so square roots appear at most linearly;
//! * `log(exp(a)) -> a` and `exp(log(a)) -> a`.
//!
//! With these rules the numerator is zero exactly when the value is zero,
//! as long as the remaining atoms are algebraically independent.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::atom::{self, kind_of, AtomData, AtomId, AtomKind, Builtin, FuncAtom};
use crate::poly::{Coef, Monomial, Poly};
use crate::KernelError;

pub(crate) type Factor = (Arc<Poly>, u32);

#[derive(Debug, PartialEq, Eq, Hash)]
pub(crate) struct Inner {
    pub num: Poly,
    /// Sorted by polynomial, distinct, exponents positive.
    pub den: Vec<Factor>,
}

/// An exact symbolic scalar. Cheap to clone, immutable, `Send + Sync`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expr(pub(crate) Arc<Inner>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl Expr {
    pub(crate) fn from_parts(num: Poly, den: Vec<Factor>) -> Expr {
        if num.is_zero() {
            return Expr(Arc::new(Inner {
                num,
                den: Vec::new(),
            }));
        }
        Expr(Arc::new(Inner { num, den }))
    }

    pub(crate) fn num(&self) -> &Poly {
        &self.0.num
    }

    pub(crate) fn den(&self) -> &[Factor] {
        &self.0.den
    }

    pub fn zero() -> Expr {
        Expr::from_parts(Poly::zero(), Vec::new())
    }

    pub fn one() -> Expr {
        Expr::from_parts(Poly::one(), Vec::new())
    }

    pub fn int(n: i64) -> Expr {
        Expr::from_coef(Coef::from_integer(BigInt::from(n)))
    }

    /// The rational constant `n/d`. Panics when `d == 0`.
    pub fn rational(n: i64, d: i64) -> Expr {
        Expr::from_coef(Coef::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_coef(c: BigRational) -> Expr {
        Expr::from_parts(Poly::constant(c), Vec::new())
    }

    /// A coordinate or parameter symbol.
    pub fn symbol(name: &str) -> Expr {
        Expr::atom(atom::symbol_id(name))
    }

    /// An opaque smooth function of the listed coordinates, e.g. `H(u,x,y)`.
    pub fn function(name: &str, args: &[&str]) -> Result<Expr, KernelError> {
        for (i, a) in args.iter().enumerate() {
            if args[..i].contains(a) {
                return Err(KernelError::DuplicateArgument {
                    function: name.to_string(),
                    arg: a.to_string(),
                });
            }
        }
        let data = AtomData::Func(FuncAtom {
            name: name.into(),
            args: args.iter().map(|a| Arc::<str>::from(*a)).collect(),
            orders: vec![0; args.len()].into_boxed_slice(),
        });
        Ok(Expr::atom(atom::intern(data)))
    }

    pub(crate) fn atom(id: AtomId) -> Expr {
        Expr::from_parts(Poly::term(Monomial::atom(id, 1), Coef::one()), Vec::new())
    }

    pub(crate) fn atom_pow(id: AtomId, e: i32) -> Expr {
        settle(Poly::term(Monomial::atom(id, e), Coef::one()))
    }

    /// Structural zero. Exact for the kernel's expression class; see
    /// [`Expr::zero_test`] for the checked variant.
    pub fn is_zero(&self) -> bool {
        self.0.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.den.is_empty() && self.0.num.is_one()
    }

    /// The value as a rational constant, if it is one.
    pub fn as_rational(&self) -> Option<BigRational> {
        if !self.0.den.is_empty() {
            return None;
        }
        self.0.num.as_constant()
    }

    /// Sign of a rational constant; `None` for non-constants.
    pub fn constant_sign(&self) -> Option<std::cmp::Ordering> {
        self.as_rational().map(|q| q.cmp(&BigRational::zero()))
    }

    pub fn is_constant(&self) -> bool {
        self.as_rational().is_some()
    }

    /// Number of numerator terms; a rough size measure.
    pub fn term_count(&self) -> usize {
        self.0.num.len()
    }

    /// The name when this expression is a single plain symbol.
    pub fn as_symbol(&self) -> Option<String> {
        let (id, c) = self.as_single_atom()?;
        if !c.is_one() {
            return None;
        }
        atom::symbol_name(id).map(|s| s.to_string())
    }

    fn as_single_atom(&self) -> Option<(AtomId, Coef)> {
        if !self.0.den.is_empty() {
            return None;
        }
        match self.0.num.terms.as_slice() {
            [(m, c)] if m.0.len() == 1 && m.0[0].1 == 1 => Some((m.0[0].0, c.clone())),
            _ => None,
        }
    }

    pub fn scale(&self, k: &BigRational) -> Expr {
        if k.is_zero() {
            return Expr::zero();
        }
        Expr::from_parts(self.0.num.scale(k), self.0.den.clone())
    }

    pub fn pow(&self, k: i64) -> Expr {
        if k == 0 {
            return Expr::one();
        }
        if k < 0 {
            return self.inv().pow(-k);
        }
        let mut base = self.clone();
        let mut acc = Expr::one();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse. Panics on zero; see [`Expr::try_inv`].
    pub fn inv(&self) -> Expr {
        self.try_inv().expect("division by zero expression")
    }

    pub fn try_inv(&self) -> Result<Expr, KernelError> {
        if self.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        if let Some(c) = self.as_rational() {
            return Ok(Expr::from_coef(c.recip()));
        }
        let content = self.0.num.monomial_content();
        let primitive = self.0.num.mul_monomial(&content.inverse(), &Coef::one());
        let (lc, primitive) = primitive.make_monic();

        let mut laurent = Monomial::one();
        let mut exp_arg = Expr::zero();
        let mut extra_den: Vec<Factor> = Vec::new();
        let mut extra = Expr::one();
        for &(a, e) in content.iter() {
            match kind_of(a) {
                AtomKind::Exp => {
                    let (_, arg) = atom::builtin_arg(a).expect("exp atom");
                    exp_arg -= arg.scale(&Coef::from_integer(e.into()));
                }
                AtomKind::Cos => {
                    debug_assert!(e > 0);
                    extra_den.push((
                        Arc::new(Poly::term(Monomial::atom(a, 1), Coef::one())),
                        e as u32,
                    ));
                }
                AtomKind::Sqrt => {
                    // 1/sqrt(b) = sqrt(b)/b
                    let (_, arg) = atom::builtin_arg(a).expect("sqrt atom");
                    extra = &extra * &(&Expr::atom(a) * &arg.inv()).pow(e as i64);
                }
                _ => laurent = laurent.mul(&Monomial::atom(a, -e)),
            }
        }
        if !primitive.as_constant().is_some() {
            extra_den.push((Arc::new(primitive), 1));
        }
        let numer = settle(expand_factors(&self.0.den));
        let mut out = &numer * &settle(Poly::term(laurent, lc.recip()));
        if !exp_arg.is_zero() {
            out = &out * &Expr::exp(&exp_arg);
        }
        if !extra.is_one() {
            out = &out * &extra;
        }
        extra_den.sort();
        Ok(out.divide_by_factors(merge_factors(&[], &extra_den)))
    }

    /// Divides by a product of normalized factors and cancels what divides.
    pub(crate) fn divide_by_factors(&self, factors: Vec<Factor>) -> Expr {
        if factors.is_empty() {
            return self.clone();
        }
        let mut num = self.0.num.clone();
        let mut extra = factors;
        cancel_against(&mut num, &mut extra);
        let den = merge_factors(&self.0.den, &extra);
        Expr::from_parts(num, den)
    }

    pub fn sin(arg: &Expr) -> Expr {
        if arg.is_zero() {
            return Expr::zero();
        }
        if crate::print::is_negative(arg) {
            return -Expr::sin(&-arg);
        }
        Expr::atom(atom::intern(AtomData::Builtin(Builtin::Sin, arg.clone())))
    }

    pub fn cos(arg: &Expr) -> Expr {
        if arg.is_zero() {
            return Expr::one();
        }
        if crate::print::is_negative(arg) {
            return Expr::cos(&-arg);
        }
        Expr::atom(atom::intern(AtomData::Builtin(Builtin::Cos, arg.clone())))
    }

    pub fn exp(arg: &Expr) -> Expr {
        if arg.is_zero() {
            return Expr::one();
        }
        if let Some((id, c)) = arg.as_single_atom() {
            if c.is_one() && kind_of(id) == AtomKind::Log {
                return atom::builtin_arg(id).expect("log atom").1;
            }
        }
        Expr::atom(atom::intern(AtomData::Builtin(Builtin::Exp, arg.clone())))
    }

    /// Natural logarithm. `log(0)` is kept as an atom; callers work at
    /// generic points.
    pub fn log(arg: &Expr) -> Expr {
        if arg.is_one() {
            return Expr::zero();
        }
        if let Some((id, c)) = arg.as_single_atom() {
            if c.is_one() && kind_of(id) == AtomKind::Exp {
                return atom::builtin_arg(id).expect("exp atom").1;
            }
        }
        Expr::atom(atom::intern(AtomData::Builtin(Builtin::Log, arg.clone())))
    }

    /// Principal square root on the positive region: perfect-square
    /// monomial, rational and denominator parts are pulled out.
    pub fn sqrt(arg: &Expr) -> Expr {
        if arg.is_zero() || arg.is_one() {
            return arg.clone();
        }
        let mut outer = Expr::one();

        let content = arg.0.num.monomial_content();
        let mut out_m = Monomial::one();
        let mut exp_half = Expr::zero();
        for &(a, e) in content.iter() {
            match kind_of(a) {
                AtomKind::Symbol | AtomKind::Func | AtomKind::Sin | AtomKind::Log => {
                    let q = e.div_euclid(2);
                    if q != 0 {
                        out_m = out_m.mul(&Monomial::atom(a, q));
                    }
                }
                AtomKind::Exp => {
                    let (_, b) = atom::builtin_arg(a).expect("exp atom");
                    exp_half += b.scale(&Coef::new(e.into(), 2.into()));
                }
                _ => {}
            }
        }
        if !out_m.is_one() {
            outer = settle(Poly::term(out_m, Coef::one()));
        }
        if !exp_half.is_zero() {
            outer = &outer * &Expr::exp(&exp_half);
        }

        let (n, d) = coefficient_content(&arg.0.num);
        let n_root = n.sqrt();
        if &n_root * &n_root == n && !n_root.is_one() {
            outer = outer.scale(&Coef::from_integer(n_root));
        }
        let d_root = d.sqrt();
        if &d_root * &d_root == d && !d_root.is_one() {
            outer = outer.scale(&Coef::from_integer(d_root).recip());
        }

        let mut den_out = Vec::new();
        for (f, e) in arg.0.den.iter() {
            if e / 2 > 0 {
                den_out.push((f.clone(), e / 2));
            }
        }
        if !den_out.is_empty() {
            outer = outer.divide_by_factors(den_out);
        }

        if outer.is_one() {
            return Expr::atom(atom::intern(AtomData::Builtin(Builtin::Sqrt, arg.clone())));
        }
        let inner = arg * &outer.pow(2).inv();
        if inner.is_one() {
            return outer;
        }
        &outer * &Expr::atom(atom::intern(AtomData::Builtin(Builtin::Sqrt, inner)))
    }

    pub fn builtin(b: Builtin, arg: &Expr) -> Expr {
        match b {
            Builtin::Sin => Expr::sin(arg),
            Builtin::Cos => Expr::cos(arg),
            Builtin::Exp => Expr::exp(arg),
            Builtin::Log => Expr::log(arg),
            Builtin::Sqrt => Expr::sqrt(arg),
        }
    }

    /// Re-normalizes from scratch. Values produced by the kernel are already
    /// canonical, so this is idempotent and usually returns an equal value.
    pub fn simplify(&self) -> Expr {
        let num = settle(self.0.num.clone());
        let mut den = Expr::one();
        for (f, e) in &self.0.den {
            den = &den * &settle((**f).clone()).pow(*e as i64);
        }
        &num * &den.inv()
    }
}

/// `gcd` of numerators and `lcm` of denominators of the coefficients.
fn coefficient_content(p: &Poly) -> (BigInt, BigInt) {
    let mut n = BigInt::zero();
    let mut d = BigInt::one();
    for (_, c) in &p.terms {
        n = n.gcd(c.numer());
        d = d.lcm(c.denom());
    }
    (n.abs(), d)
}

pub(crate) fn expand_factors(factors: &[Factor]) -> Poly {
    let mut acc = Poly::one();
    for (f, e) in factors {
        for _ in 0..*e {
            acc = acc.mul(f);
        }
    }
    acc
}

pub(crate) fn merge_factors(a: &[Factor], b: &[Factor]) -> Vec<Factor> {
    let mut out: Vec<Factor> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j].clone());
            j += 1;
        } else {
            out.push((a[i].0.clone(), a[i].1 + b[j].1));
            i += 1;
            j += 1;
        }
    }
    out
}

fn lcm_factors(a: &[Factor], b: &[Factor]) -> Vec<Factor> {
    let mut out: Vec<Factor> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j].clone());
            j += 1;
        } else {
            out.push((a[i].0.clone(), a[i].1.max(b[j].1)));
            i += 1;
            j += 1;
        }
    }
    out
}

/// `big / small` for factor lists where `small` divides `big`.
fn cofactor(big: &[Factor], small: &[Factor]) -> Vec<Factor> {
    big.iter()
        .filter_map(|(f, e)| {
            let s = small
                .iter()
                .find(|(g, _)| g == f)
                .map(|(_, k)| *k)
                .unwrap_or(0);
            (*e > s).then(|| (f.clone(), e - s))
        })
        .collect()
}

fn cancel_against(num: &mut Poly, den: &mut Vec<Factor>) {
    if num.is_zero() {
        den.clear();
        return;
    }
    for (f, e) in den.iter_mut() {
        while *e > 0 {
            match num.divide_exact(f) {
                Some(q) => {
                    *num = q;
                    *e -= 1;
                }
                None => break,
            }
        }
    }
    den.retain(|(_, e)| *e > 0);
}

fn monomial_is_canonical(m: &Monomial) -> bool {
    let mut exps = 0;
    for &(a, e) in m.iter() {
        match kind_of(a) {
            AtomKind::Exp => {
                exps += 1;
                if e != 1 || exps > 1 {
                    return false;
                }
            }
            AtomKind::Cos | AtomKind::Sqrt => {
                if !(0..=1).contains(&e) {
                    return false;
                }
            }
            _ => {}
        }
    }
    true
}

/// Applies the rewrite rules to a formal polynomial.
pub(crate) fn settle(p: Poly) -> Expr {
    if p.terms.iter().all(|(m, _)| monomial_is_canonical(m)) {
        return Expr::from_parts(p, Vec::new());
    }
    let mut clean = Vec::with_capacity(p.terms.len());
    let mut rest = Expr::zero();
    for (m, c) in p.terms {
        if monomial_is_canonical(&m) {
            clean.push((m, c));
        } else {
            rest = &rest + &rewrite_monomial(&m, c);
        }
    }
    &Expr::from_parts(Poly { terms: clean }, Vec::new()) + &rest
}

fn rewrite_monomial(m: &Monomial, c: Coef) -> Expr {
    let mut base = Monomial::one();
    let mut exp_arg = Expr::zero();
    let mut factors: Vec<Expr> = Vec::new();
    for &(a, e) in m.iter() {
        match kind_of(a) {
            AtomKind::Exp => {
                let (_, arg) = atom::builtin_arg(a).expect("exp atom");
                exp_arg += arg.scale(&Coef::from_integer(e.into()));
            }
            AtomKind::Sqrt if !(0..=1).contains(&e) => {
                let (_, arg) = atom::builtin_arg(a).expect("sqrt atom");
                let (q, r) = (e.div_euclid(2), e.rem_euclid(2));
                factors.push(arg.pow(q as i64));
                if r == 1 {
                    base = base.mul(&Monomial::atom(a, 1));
                }
            }
            AtomKind::Cos if e > 1 => {
                let (_, arg) = atom::builtin_arg(a).expect("cos atom");
                let s = Expr::sin(&arg);
                let one_minus = &Expr::one() - &(&s * &s);
                factors.push(one_minus.pow((e / 2) as i64));
                if e % 2 == 1 {
                    base = base.mul(&Monomial::atom(a, 1));
                }
            }
            AtomKind::Cos if e < 0 => {
                factors.push(Expr::from_parts(
                    Poly::one(),
                    vec![(
                        Arc::new(Poly::term(Monomial::atom(a, 1), Coef::one())),
                        (-e) as u32,
                    )],
                ));
            }
            _ => base = base.mul(&Monomial::atom(a, e)),
        }
    }
    let mut out = Expr::from_parts(Poly::term(base, c), Vec::new());
    if !exp_arg.is_zero() {
        out = &out * &Expr::exp(&exp_arg);
    }
    for f in factors {
        out = &out * &f;
    }
    out
}

fn add_impl(a: &Expr, b: &Expr) -> Expr {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.0.den == b.0.den {
        let mut num = a.0.num.add(&b.0.num);
        let mut den = a.0.den.clone();
        if !den.is_empty() {
            cancel_against(&mut num, &mut den);
        }
        return Expr::from_parts(num, den);
    }
    let l = lcm_factors(&a.0.den, &b.0.den);
    let ca = cofactor(&l, &a.0.den);
    let cb = cofactor(&l, &b.0.den);
    let na = if ca.is_empty() {
        Expr::from_parts(a.0.num.clone(), Vec::new())
    } else {
        settle(a.0.num.mul(&expand_factors(&ca)))
    };
    let nb = if cb.is_empty() {
        Expr::from_parts(b.0.num.clone(), Vec::new())
    } else {
        settle(b.0.num.mul(&expand_factors(&cb)))
    };
    add_impl(&na, &nb).divide_by_factors(l)
}

fn mul_impl(a: &Expr, b: &Expr) -> Expr {
    if a.is_zero() || b.is_zero() {
        return Expr::zero();
    }
    if let Some(c) = a.as_rational() {
        return b.scale(&c);
    }
    if let Some(c) = b.as_rational() {
        return a.scale(&c);
    }
    let mut na = a.0.num.clone();
    let mut nb = b.0.num.clone();
    let mut da = a.0.den.clone();
    let mut db = b.0.den.clone();
    if !db.is_empty() {
        cancel_against(&mut na, &mut db);
    }
    if !da.is_empty() {
        cancel_against(&mut nb, &mut da);
    }
    let prod = settle(na.mul(&nb));
    let den = merge_factors(&da, &db);
    if den.is_empty() {
        prod
    } else {
        prod.divide_by_factors(den)
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        add_impl(self, rhs)
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        add_impl(self, &-rhs)
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        mul_impl(self, rhs)
    }
}

impl Div for &Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        mul_impl(self, &rhs.inv())
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::from_parts(self.0.num.neg(), self.0.den.clone())
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                (&self).$method(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        *self = &*self + rhs;
    }
}

impl AddAssign for Expr {
    fn add_assign(&mut self, rhs: Expr) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Expr> for Expr {
    fn sub_assign(&mut self, rhs: &Expr) {
        *self = &*self - rhs;
    }
}

impl SubAssign for Expr {
    fn sub_assign(&mut self, rhs: Expr) {
        *self = &*self - &rhs;
    }
}

impl MulAssign<&Expr> for Expr {
    fn mul_assign(&mut self, rhs: &Expr) {
        *self = &*self * rhs;
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        sum_exprs(iter)
    }
}

/// Sums many terms, grouping by denominator first so common denominators
/// are combined once.
pub fn sum_exprs(iter: impl IntoIterator<Item = Expr>) -> Expr {
    let mut groups: Vec<(Vec<Factor>, Vec<Expr>)> = Vec::new();
    for e in iter {
        if e.is_zero() {
            continue;
        }
        match groups.iter_mut().find(|(d, _)| d.as_slice() == e.den()) {
            Some((_, v)) => v.push(e),
            None => groups.push((e.den().to_vec(), vec![e])),
        }
    }
    let mut acc = Expr::zero();
    for (den, members) in groups {
        let mut num = if members.len() == 1 {
            members[0].num().clone()
        } else {
            Poly::from_unsorted(members.iter().flat_map(|e| e.num().terms.iter().cloned()))
        };
        let mut den = den;
        if !den.is_empty() {
            cancel_against(&mut num, &mut den);
        }
        acc = &acc + &Expr::from_parts(num, den);
    }
    acc
}
