//! Substitution and numeric evaluation.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_traits::ToPrimitive;

use crate::atom::{self, AtomData, AtomId, FuncAtom};
use crate::expr::{sum_exprs, Expr};
use crate::poly::Poly;
use crate::KernelError;

/// Simultaneous substitution of symbols and function symbols.
///
/// A function binding is an expression in the function's own argument
/// coordinates; derivative nodes are bound to the matching derivative of
/// that body.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    symbols: HashMap<String, Expr>,
    functions: HashMap<String, Expr>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn symbol(mut self, name: &str, value: Expr) -> Self {
        self.symbols.insert(name.to_string(), value);
        self
    }

    pub fn function(mut self, name: &str, body: Expr) -> Self {
        self.functions.insert(name.to_string(), body);
        self
    }

    pub fn set_symbol(&mut self, name: &str, value: Expr) {
        self.symbols.insert(name.to_string(), value);
    }

    pub fn set_function(&mut self, name: &str, body: Expr) {
        self.functions.insert(name.to_string(), body);
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty() && self.functions.is_empty()
    }
}

struct Substituter<'a> {
    bindings: &'a Bindings,
    memo: HashMap<AtomId, Expr>,
}

impl Substituter<'_> {
    fn atom_value(&mut self, a: AtomId) -> Result<Expr, KernelError> {
        if let Some(v) = self.memo.get(&a) {
            return Ok(v.clone());
        }
        let entry = atom::entry(a);
        let value = match &entry.data {
            AtomData::Symbol(s) => match self.bindings.symbols.get(&**s) {
                Some(v) => v.clone(),
                None => Expr::atom(a),
            },
            AtomData::Func(f) => self.func_value(a, f)?,
            AtomData::Builtin(b, arg) => Expr::builtin(*b, &self.expr(arg)?),
        };
        self.memo.insert(a, value.clone());
        Ok(value)
    }

    fn func_value(&mut self, a: AtomId, f: &FuncAtom) -> Result<Expr, KernelError> {
        if let Some(body) = self.bindings.functions.get(&*f.name) {
            let mut d = body.clone();
            for (arg, &k) in f.args.iter().zip(f.orders.iter()) {
                for _ in 0..k {
                    d = d.diff(arg);
                }
            }
            let mut inner = self.bindings.clone();
            inner.functions.remove(&*f.name);
            return substitute(&d, &inner);
        }
        let mut renamed = false;
        let mut args: Vec<Arc<str>> = Vec::with_capacity(f.args.len());
        for arg in f.args.iter() {
            match self.bindings.symbols.get(&**arg) {
                None => args.push(arg.clone()),
                Some(v) => match v.as_symbol() {
                    Some(name) => {
                        renamed = true;
                        args.push(name.into());
                    }
                    None => {
                        return Err(KernelError::CompositeFunctionArgument {
                            function: f.name.to_string(),
                            arg: arg.to_string(),
                        })
                    }
                },
            }
        }
        if !renamed {
            return Ok(Expr::atom(a));
        }
        for (i, x) in args.iter().enumerate() {
            if args[..i].contains(x) {
                return Err(KernelError::DuplicateArgument {
                    function: f.name.to_string(),
                    arg: x.to_string(),
                });
            }
        }
        Ok(Expr::atom(atom::intern(AtomData::Func(FuncAtom {
            name: f.name.clone(),
            args: args.into(),
            orders: f.orders.clone(),
        }))))
    }

    fn poly(&mut self, p: &Poly) -> Result<Expr, KernelError> {
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in &p.terms {
            let mut t = Expr::from_coef(c.clone());
            for &(a, e) in m.iter() {
                t = &t * &self.atom_value(a)?.pow(e as i64);
            }
            terms.push(t);
        }
        Ok(sum_exprs(terms))
    }

    fn expr(&mut self, e: &Expr) -> Result<Expr, KernelError> {
        let mut out = self.poly(e.num())?;
        for (f, k) in e.den() {
            let v = self.poly(f)?;
            out = &out * &v.try_inv()?.pow(*k as i64);
        }
        Ok(out)
    }
}

/// Capture-free simultaneous substitution followed by normalization.
pub fn substitute(e: &Expr, bindings: &Bindings) -> Result<Expr, KernelError> {
    if bindings.is_empty() {
        return Ok(e.clone());
    }
    Substituter {
        bindings,
        memo: HashMap::new(),
    }
    .expr(e)
}

fn visit_atoms(e: &Expr, f: &mut dyn FnMut(AtomId)) {
    let mut seen = Vec::new();
    collect_atoms(e, &mut seen);
    for a in seen {
        f(a);
    }
}

fn collect_atoms(e: &Expr, out: &mut Vec<AtomId>) {
    let push = |p: &Poly, out: &mut Vec<AtomId>| {
        for a in p.atoms() {
            if out.contains(&a) {
                continue;
            }
            out.push(a);
            if let AtomData::Builtin(_, arg) = &atom::entry(a).data {
                collect_atoms(arg, out);
            }
        }
    };
    push(e.num(), out);
    for (f, _) in e.den() {
        push(f, out);
    }
}

impl Expr {
    /// Names of the function symbols occurring anywhere in the expression.
    pub fn free_functions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        visit_atoms(self, &mut |a| {
            if let AtomData::Func(f) = &atom::entry(a).data {
                out.insert(f.name.to_string());
            }
        });
        out
    }

    /// Names of the plain symbols occurring anywhere, including inside
    /// builtin arguments (function argument lists are not included).
    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        visit_atoms(self, &mut |a| {
            if let AtomData::Symbol(s) = &atom::entry(a).data {
                out.insert(s.to_string());
            }
        });
        out
    }

    /// Every symbol the expression depends on, including function arguments.
    pub fn dependencies(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        visit_atoms(self, &mut |a| match &atom::entry(a).data {
            AtomData::Symbol(s) => {
                out.insert(s.to_string());
            }
            AtomData::Func(f) => {
                out.extend(f.args.iter().map(|s| s.to_string()));
            }
            _ => {}
        });
        out
    }

    /// Numeric value with every symbol bound. Function symbols must be
    /// substituted away first.
    pub fn eval_f64(&self, values: &HashMap<String, f64>) -> Result<f64, KernelError> {
        let mut unbound = BTreeSet::new();
        visit_atoms(self, &mut |a| match &atom::entry(a).data {
            AtomData::Symbol(s) if !values.contains_key(&**s) => {
                unbound.insert(s.to_string());
            }
            AtomData::Func(_) => {
                unbound.insert(atom::entry(a).key.to_string());
            }
            _ => {}
        });
        if !unbound.is_empty() {
            return Err(KernelError::Unbound(unbound.into_iter().collect()));
        }
        let mut memo = HashMap::new();
        let mut leaf = |a: AtomId| -> f64 {
            match &atom::entry(a).data {
                AtomData::Symbol(s) => values[&**s],
                _ => unreachable!("non-symbol leaf"),
            }
        };
        let v = eval_expr(self, &mut leaf, &mut memo).0;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(KernelError::Domain(self.to_string()))
        }
    }
}

/// Evaluates with `leaf` supplying values for symbols and function atoms.
/// Returns the value and the sum of absolute term magnitudes.
pub(crate) fn eval_expr(
    e: &Expr,
    leaf: &mut dyn FnMut(AtomId) -> f64,
    memo: &mut HashMap<AtomId, f64>,
) -> (f64, f64) {
    let (mut v, scale) = eval_poly(e.num(), leaf, memo);
    for (f, k) in e.den() {
        let (d, _) = eval_poly(f, leaf, memo);
        v /= d.powi(*k as i32);
    }
    (v, scale)
}

fn eval_poly(
    p: &Poly,
    leaf: &mut dyn FnMut(AtomId) -> f64,
    memo: &mut HashMap<AtomId, f64>,
) -> (f64, f64) {
    let mut total = 0.0;
    let mut scale = 0.0;
    for (m, c) in &p.terms {
        let mut t = c.to_f64().unwrap_or(f64::NAN);
        for &(a, e) in m.iter() {
            t *= eval_atom(a, leaf, memo).powi(e);
        }
        total += t;
        scale += t.abs();
    }
    (total, scale)
}

fn eval_atom(a: AtomId, leaf: &mut dyn FnMut(AtomId) -> f64, memo: &mut HashMap<AtomId, f64>) -> f64 {
    if let Some(&v) = memo.get(&a) {
        return v;
    }
    let v = match &atom::entry(a).data {
        AtomData::Builtin(b, arg) => {
            let x = eval_expr(arg, leaf, memo).0;
            use crate::atom::Builtin::*;
            match b {
                Sin => x.sin(),
                Cos => x.cos(),
                Exp => x.exp(),
                Log => x.ln(),
                Sqrt => x.sqrt(),
            }
        }
        _ => leaf(a),
    };
    memo.insert(a, v);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_substitution() {
        let (m, r) = (Expr::symbol("M"), Expr::symbol("r"));
        let e = &(&Expr::int(2) * &m) / &r;
        let b = Bindings::new().symbol("M", Expr::one()).symbol("r", Expr::int(2));
        assert_eq!(substitute(&e, &b).unwrap(), Expr::one());
    }

    #[test]
    fn function_binding_and_derivative() {
        let h = Expr::function("H", &["u", "x"]).unwrap();
        let (u, x) = (Expr::symbol("u"), Expr::symbol("x"));
        let body = &(&x * &x) * &u;
        let b = Bindings::new().function("H", body.clone());
        assert_eq!(substitute(&h, &b).unwrap(), body);
        let dh = h.diff("x");
        assert_eq!(
            substitute(&dh, &b).unwrap(),
            &(&Expr::int(2) * &x) * &u
        );
    }

    #[test]
    fn renaming_function_arguments() {
        let h = Expr::function("H", &["u", "x"]).unwrap().diff("u");
        let b = Bindings::new().symbol("u", Expr::symbol("U"));
        let got = substitute(&h, &b).unwrap();
        assert_eq!(got, Expr::function("H", &["U", "x"]).unwrap().diff("U"));
        let bad = Bindings::new().symbol("u", &Expr::symbol("U") + &Expr::one());
        assert!(matches!(
            substitute(&h, &bad),
            Err(KernelError::CompositeFunctionArgument { .. })
        ));
    }

    #[test]
    fn unbound_symbols_are_listed() {
        let e = &Expr::symbol("a") + &Expr::symbol("b");
        let mut vals = HashMap::new();
        vals.insert("a".to_string(), 1.0);
        match e.eval_f64(&vals) {
            Err(KernelError::Unbound(names)) => assert_eq!(names, vec!["b".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn free_functions_after_cancellation() {
        let a = Expr::function("A", &["u", "x"]).unwrap();
        let b = Expr::function("B", &["u"]).unwrap();
        let e = &(&a * &b) - &(&a * &b);
        assert!(e.free_functions().is_empty());
        let e = &a.diff("x") + &Expr::int(3);
        assert_eq!(e.free_functions().into_iter().collect::<Vec<_>>(), vec!["A"]);
    }
}
