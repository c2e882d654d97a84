//! Exact partial differentiation.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock};

use parking_lot::RwLock;

use crate::atom::{self, kind_of, AtomData, AtomId, AtomKind, Builtin, FuncAtom};
use crate::expr::{sum_exprs, Expr};
use crate::poly::Coef;

static CACHE: LazyLock<RwLock<HashMap<(AtomId, AtomId), Expr>>> = LazyLock::new(Default::default);

fn atom_derivative(a: AtomId, var: AtomId) -> Expr {
    if kind_of(a) == AtomKind::Symbol {
        return if a == var { Expr::one() } else { Expr::zero() };
    }
    if let Some(d) = CACHE.read().get(&(a, var)) {
        return d.clone();
    }
    let d = compute_atom_derivative(a, var);
    CACHE.write().insert((a, var), d.clone());
    d
}

fn compute_atom_derivative(a: AtomId, var: AtomId) -> Expr {
    let var_name = atom::symbol_name(var).expect("differentiation variable must be a symbol");
    let entry = atom::entry(a);
    match &entry.data {
        AtomData::Symbol(_) => unreachable!(),
        AtomData::Func(f) => {
            let Some(pos) = f.args.iter().position(|x| **x == *var_name) else {
                return Expr::zero();
            };
            let mut orders = f.orders.clone();
            orders[pos] += 1;
            Expr::atom(atom::intern(AtomData::Func(FuncAtom {
                name: f.name.clone(),
                args: Arc::clone(&f.args),
                orders,
            })))
        }
        AtomData::Builtin(b, arg) => {
            let inner = diff_by_id(arg, var);
            if inner.is_zero() {
                return Expr::zero();
            }
            let outer = match b {
                Builtin::Sin => Expr::cos(arg),
                Builtin::Cos => -Expr::sin(arg),
                Builtin::Exp => Expr::atom(a),
                Builtin::Log => arg.inv(),
                Builtin::Sqrt => &Expr::atom(a) / &arg.scale(&Coef::from_integer(2.into())),
            };
            &outer * &inner
        }
    }
}

pub(crate) fn diff_by_id(e: &Expr, var: AtomId) -> Expr {
    let num = e.num();
    let mut parts = Vec::new();
    for a in num.atoms() {
        let da = atom_derivative(a, var);
        if da.is_zero() {
            continue;
        }
        let partial = Expr::from_parts(num.formal_derivative(a), Vec::new());
        parts.push(&partial * &da);
    }
    let dnum = sum_exprs(parts);
    if e.den().is_empty() {
        return dnum;
    }
    let mut out = dnum.divide_by_factors(e.den().to_vec());
    let numer = Expr::from_parts(num.clone(), Vec::new());
    for (f, k) in e.den() {
        let df = diff_by_id(&Expr::from_parts((**f).clone(), Vec::new()), var);
        if df.is_zero() {
            continue;
        }
        let mut den = e.den().to_vec();
        for (g, j) in den.iter_mut() {
            if g == f {
                *j += 1;
            }
        }
        let term = (&numer * &df)
            .scale(&Coef::from_integer((*k).into()))
            .divide_by_factors(den);
        out = &out - &term;
    }
    out
}

impl Expr {
    /// Exact partial derivative with respect to the symbol `var`.
    ///
    /// Chart-aware callers validate `var` against their coordinates first;
    /// at this level any symbol is accepted and unknown ones give zero.
    pub fn diff(&self, var: &str) -> Expr {
        diff_by_id(self, atom::symbol_id(var))
    }

    /// Repeated partial derivatives, applied left to right.
    pub fn diff_many(&self, vars: &[&str]) -> Expr {
        vars.iter().fold(self.clone(), |acc, v| acc.diff(v))
    }
}
