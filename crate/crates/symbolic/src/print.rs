//! Canonical printing and the tree view of expressions.
//!
//! Printed output re-parses to the same expression. Terms are ordered by a
//! structural key (atom print form), never by interning order, so output is
//! deterministic across runs.

use std::cmp::Ordering;
use std::fmt::{self, Write};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::atom::{self, AtomData, AtomId, Builtin};
use crate::expr::{Expr, Factor};
use crate::poly::{Coef, Monomial, Poly};

pub(crate) fn atom_key(data: &AtomData) -> String {
    match data {
        AtomData::Symbol(s) => s.to_string(),
        AtomData::Func(f) => {
            let call = format!("{}({})", f.name, f.args.join(","));
            if f.is_underived() {
                call
            } else {
                let mut out = format!("diff({call}");
                for (arg, &k) in f.args.iter().zip(f.orders.iter()) {
                    for _ in 0..k {
                        write!(out, ",{arg}").unwrap();
                    }
                }
                out.push(')');
                out
            }
        }
        AtomData::Builtin(b, e) => format!("{}({})", b.name(), e),
    }
}

fn key_of(id: AtomId) -> Arc<str> {
    atom::entry(id).key.clone()
}

type MonoKey = (i64, Vec<(Arc<str>, i32)>);

fn mono_key(m: &Monomial) -> MonoKey {
    let mut atoms: Vec<(Arc<str>, i32)> = m.iter().map(|&(a, e)| (key_of(a), e)).collect();
    atoms.sort();
    let pos: i64 = m.iter().filter(|&&(_, e)| e > 0).map(|&(_, e)| e as i64).sum();
    (-pos, atoms)
}

fn cmp_keys(a: &MonoKey, b: &MonoKey) -> Ordering {
    a.0.cmp(&b.0).then_with(|| {
        for (x, y) in a.1.iter().zip(b.1.iter()) {
            let c = x.0.cmp(&y.0).then(y.1.cmp(&x.1));
            if c != Ordering::Equal {
                return c;
            }
        }
        a.1.len().cmp(&b.1.len()).reverse()
    })
}

fn ordered_terms(p: &Poly) -> Vec<&(Monomial, Coef)> {
    let mut keyed: Vec<(MonoKey, &(Monomial, Coef))> =
        p.terms.iter().map(|t| (mono_key(&t.0), t)).collect();
    keyed.sort_by(|a, b| cmp_keys(&a.0, &b.0));
    keyed.into_iter().map(|(_, t)| t).collect()
}

/// Sign of the structurally first term; used to normalize odd/even builtins.
pub(crate) fn is_negative(e: &Expr) -> bool {
    ordered_terms(e.num())
        .first()
        .is_some_and(|(_, c)| c.is_negative())
}

fn write_atom_pow(out: &mut String, id: AtomId, e: i32) {
    out.push_str(&key_of(id));
    if e != 1 {
        write!(out, "^{e}").unwrap();
    }
}

fn write_product(out: &mut String, parts: &[String]) {
    out.push_str(&parts.join("*"));
}

/// Writes one term without its sign.
fn write_term(out: &mut String, m: &Monomial, c: &BigRational) {
    let c = c.abs();
    let mut up: Vec<String> = Vec::new();
    let mut down: Vec<String> = Vec::new();
    let mut atoms: Vec<(Arc<str>, AtomId, i32)> =
        m.iter().map(|&(a, e)| (key_of(a), a, e)).collect();
    atoms.sort_by(|a, b| a.0.cmp(&b.0));
    for (_, a, e) in atoms {
        let mut s = String::new();
        write_atom_pow(&mut s, a, e.abs());
        if e > 0 {
            up.push(s);
        } else {
            down.push(s);
        }
    }
    let numer: &BigInt = c.numer();
    let denom: &BigInt = c.denom();
    if !numer.is_one() || up.is_empty() {
        up.insert(0, numer.to_string());
    }
    if !denom.is_one() {
        down.insert(0, denom.to_string());
    }
    write_product(out, &up);
    if !down.is_empty() {
        out.push('/');
        if down.len() > 1 {
            out.push('(');
            write_product(out, &down);
            out.push(')');
        } else {
            out.push_str(&down[0]);
        }
    }
}

fn write_poly(out: &mut String, p: &Poly) {
    if p.is_zero() {
        out.push('0');
        return;
    }
    for (i, (m, c)) in ordered_terms(p).into_iter().enumerate() {
        if i == 0 {
            if c.is_negative() {
                out.push('-');
            }
        } else if c.is_negative() {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        write_term(out, m, c);
    }
}

fn needs_parens(p: &Poly) -> bool {
    p.len() > 1 || p.terms.first().is_some_and(|(_, c)| c.is_negative())
}

fn write_factor(out: &mut String, f: &Poly, e: u32) {
    let single_atom = f.len() == 1 && f.terms[0].1.is_one() && f.terms[0].0 .0.len() == 1;
    if single_atom {
        write_poly(out, f);
    } else {
        out.push('(');
        write_poly(out, f);
        out.push(')');
    }
    if e != 1 {
        write!(out, "^{e}").unwrap();
    }
}

fn write_den(out: &mut String, den: &[Factor]) {
    let mut parts = Vec::new();
    for (f, e) in den {
        let mut s = String::new();
        write_factor(&mut s, f, *e);
        parts.push(s);
    }
    if parts.len() > 1 {
        out.push('(');
        out.push_str(&parts.join("*"));
        out.push(')');
    } else {
        out.push_str(&parts[0]);
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        if self.den().is_empty() {
            write_poly(&mut out, self.num());
        } else {
            let num = self.num();
            if num.is_one() {
                out.push('1');
            } else if needs_parens(num) || num.terms[0].0.has_negative() {
                out.push('(');
                write_poly(&mut out, num);
                out.push(')');
            } else {
                write_poly(&mut out, num);
            }
            out.push('/');
            write_den(&mut out, self.den());
        }
        f.write_str(&out)
    }
}

/// Tree view of a canonical expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(BigRational),
    Symbol(String),
    Function {
        name: String,
        args: Vec<String>,
    },
    /// Partial derivative of a function symbol; `wrt` is sorted by argument order.
    Derivative {
        name: String,
        args: Vec<String>,
        wrt: Vec<String>,
    },
    Builtin(Builtin, Expr),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Expr, i64),
}

impl Expr {
    /// The top-level node of the canonical tree.
    pub fn node(&self) -> Node {
        if !self.den().is_empty() {
            let mut factors = vec![Expr::from_parts(self.num().clone(), Vec::new())];
            for (f, e) in self.den() {
                factors.push(Expr::from_parts(Poly::one(), vec![(f.clone(), *e)]));
            }
            return Node::Product(factors);
        }
        let terms = ordered_terms(self.num());
        match terms.as_slice() {
            [] => Node::Const(BigRational::from_integer(0.into())),
            [(m, c)] => {
                if m.is_one() {
                    return Node::Const(c.clone());
                }
                let atoms: Vec<(AtomId, i32)> = m.iter().copied().collect();
                if c.is_one() && atoms.len() == 1 {
                    let (a, e) = atoms[0];
                    if e == 1 {
                        return atom_node(a);
                    }
                    return Node::Pow(Expr::atom(a), e as i64);
                }
                let mut factors = Vec::new();
                if !c.is_one() {
                    factors.push(Expr::from_coef(c.clone()));
                }
                for (a, e) in atoms {
                    factors.push(Expr::atom_pow(a, e));
                }
                Node::Product(factors)
            }
            many => Node::Sum(
                many.iter()
                    .map(|(m, c)| Expr::from_parts(Poly::term(m.clone(), c.clone()), Vec::new()))
                    .collect(),
            ),
        }
    }
}

fn atom_node(a: AtomId) -> Node {
    match &atom::entry(a).data {
        AtomData::Symbol(s) => Node::Symbol(s.to_string()),
        AtomData::Func(f) => {
            let args: Vec<String> = f.args.iter().map(|s| s.to_string()).collect();
            if f.is_underived() {
                Node::Function {
                    name: f.name.to_string(),
                    args,
                }
            } else {
                let mut wrt = Vec::new();
                for (arg, &k) in f.args.iter().zip(f.orders.iter()) {
                    for _ in 0..k {
                        wrt.push(arg.to_string());
                    }
                }
                Node::Derivative {
                    name: f.name.to_string(),
                    args,
                    wrt,
                }
            }
        }
        AtomData::Builtin(b, e) => Node::Builtin(*b, e.clone()),
    }
}
