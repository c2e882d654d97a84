//! Interned kernels: the indeterminates of the polynomial layer.
//!
//! Every atom gets a process-wide id. The top three bits of the id carry the
//! atom kind so the polynomial layer can check rewrite conditions without
//! touching the interner.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock};

use parking_lot::RwLock;

use crate::expr::Expr;

pub(crate) type AtomId = u32;

const KIND_SHIFT: u32 = 29;
const INDEX_MASK: u32 = (1 << KIND_SHIFT) - 1;

/// Elementary functions understood by the kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Sin => "sin",
            Builtin::Cos => "cos",
            Builtin::Exp => "exp",
            Builtin::Log => "log",
            Builtin::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        Some(match name {
            "sin" => Builtin::Sin,
            "cos" => Builtin::Cos,
            "exp" => Builtin::Exp,
            "log" => Builtin::Log,
            "sqrt" => Builtin::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum AtomKind {
    Symbol = 0,
    Func = 1,
    Sin = 2,
    Cos = 3,
    Exp = 4,
    Log = 5,
    Sqrt = 6,
}

impl AtomKind {
    fn from_bits(bits: u32) -> AtomKind {
        match bits {
            0 => AtomKind::Symbol,
            1 => AtomKind::Func,
            2 => AtomKind::Sin,
            3 => AtomKind::Cos,
            4 => AtomKind::Exp,
            5 => AtomKind::Log,
            _ => AtomKind::Sqrt,
        }
    }

    fn of_builtin(b: Builtin) -> AtomKind {
        match b {
            Builtin::Sin => AtomKind::Sin,
            Builtin::Cos => AtomKind::Cos,
            Builtin::Exp => AtomKind::Exp,
            Builtin::Log => AtomKind::Log,
            Builtin::Sqrt => AtomKind::Sqrt,
        }
    }
}

#[inline]
pub(crate) fn kind_of(id: AtomId) -> AtomKind {
    AtomKind::from_bits(id >> KIND_SHIFT)
}

/// An opaque function symbol, possibly carrying partial derivatives.
///
/// `orders[i]` is the number of derivatives taken with respect to `args[i]`;
/// partials commute so this multi-index is canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct FuncAtom {
    pub name: Arc<str>,
    pub args: Arc<[Arc<str>]>,
    pub orders: Box<[u8]>,
}

impl FuncAtom {
    pub fn is_underived(&self) -> bool {
        self.orders.iter().all(|&o| o == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum AtomData {
    Symbol(Arc<str>),
    Func(FuncAtom),
    Builtin(Builtin, Expr),
}

pub(crate) struct AtomEntry {
    pub data: AtomData,
    /// Printed form, used as the deterministic structural sort key.
    pub key: Arc<str>,
}

#[derive(Default)]
struct Interner {
    entries: Vec<Arc<AtomEntry>>,
    lookup: HashMap<AtomData, AtomId>,
}

static INTERNER: LazyLock<RwLock<Interner>> = LazyLock::new(Default::default);

pub(crate) fn intern(data: AtomData) -> AtomId {
    if let Some(&id) = INTERNER.read().lookup.get(&data) {
        return id;
    }
    // Printing may recurse into the interner, so build the key unlocked.
    let key: Arc<str> = crate::print::atom_key(&data).into();
    let kind = match &data {
        AtomData::Symbol(_) => AtomKind::Symbol,
        AtomData::Func(_) => AtomKind::Func,
        AtomData::Builtin(b, _) => AtomKind::of_builtin(*b),
    };
    let mut guard = INTERNER.write();
    if let Some(&id) = guard.lookup.get(&data) {
        return id;
    }
    let index = guard.entries.len() as u32;
    assert!(index <= INDEX_MASK, "atom table exhausted");
    let id = ((kind as u32) << KIND_SHIFT) | index;
    guard.entries.push(Arc::new(AtomEntry {
        data: data.clone(),
        key,
    }));
    guard.lookup.insert(data, id);
    id
}

pub(crate) fn entry(id: AtomId) -> Arc<AtomEntry> {
    INTERNER.read().entries[(id & INDEX_MASK) as usize].clone()
}

pub(crate) fn symbol_id(name: &str) -> AtomId {
    intern(AtomData::Symbol(name.into()))
}

/// Returns the symbol name when `id` is a plain symbol.
pub(crate) fn symbol_name(id: AtomId) -> Option<Arc<str>> {
    if kind_of(id) != AtomKind::Symbol {
        return None;
    }
    match &entry(id).data {
        AtomData::Symbol(s) => Some(s.clone()),
        _ => None,
    }
}

/// Argument of a builtin atom.
pub(crate) fn builtin_arg(id: AtomId) -> Option<(Builtin, Expr)> {
    match &entry(id).data {
        AtomData::Builtin(b, e) => Some((*b, e.clone())),
        _ => None,
    }
}
