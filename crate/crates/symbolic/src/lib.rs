//! Exact symbolic kernel: rational functions over symbols, opaque function
//! symbols with tracked partial derivatives, and the builtins
//! `sin cos exp log sqrt`.
//!
//! Every [`Expr`] is kept in a normal form: a polynomial numerator over a
//! product of monic irreducible-ish denominator factors, with
//! `cos^2 = 1 - sin^2`, merged exponentials and reduced square roots.

mod atom;
mod diff;
mod expr;
mod parse;
mod poly;
mod print;
mod subst;
mod zero;

pub use atom::Builtin;
pub use expr::{sum_exprs, Expr};
pub use parse::{parse, SymbolTable};
pub use print::Node;
pub use subst::{substitute, Bindings};
pub use zero::ZeroTest;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("function '{function}' lists argument '{arg}' twice")]
    DuplicateArgument { function: String, arg: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot decide whether {0} vanishes")]
    Undecided(String),
    #[error("unbound symbols: {}", .0.join(", "))]
    Unbound(Vec<String>),
    #[error("parse error at offset {offset}: {message}")]
    Parse { message: String, offset: usize },
    #[error("argument '{arg}' of '{function}' would become a composite expression")]
    CompositeFunctionArgument { function: String, arg: String },
    #[error("expression is not finite at the requested point: {0}")]
    Domain(String),
}

/// Decides whether `e` is identically zero, failing rather than guessing.
pub fn is_zero(e: &Expr) -> Result<bool, KernelError> {
    e.is_zero_checked()
}

/// Normal form of `e`; idempotent.
pub fn simplify(e: &Expr) -> Expr {
    e.simplify()
}
