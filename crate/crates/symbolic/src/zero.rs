//! Zero testing.
//!
//! The normal form decides rational expressions in symbols and function
//! derivatives exactly. When a nonzero numerator involving builtins
//! survives, it is evaluated at pseudo-random points with every
//! opaque atom (symbols, function and derivative nodes) assigned an
//! independent value. A clearly nonzero value proves the expression is not
//! identically zero; if every probe lands on zero the question stays open.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atom::{kind_of, AtomKind};
use crate::expr::Expr;
use crate::subst::eval_expr;
use crate::KernelError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroTest {
    Zero,
    NonZero,
    Undecided,
}

const PROBES: usize = 6;
const REL_TOL: f64 = 1e-9;

impl Expr {
    pub fn zero_test(&self) -> ZeroTest {
        if self.is_zero() {
            return ZeroTest::Zero;
        }
        // Symbols and derivative nodes are independent indeterminates, so a
        // nonzero numerator free of builtins is a nonzero function.
        if self
            .num()
            .atoms()
            .into_iter()
            .all(|a| matches!(kind_of(a), AtomKind::Symbol | AtomKind::Func))
        {
            return ZeroTest::NonZero;
        }
        let num = Expr::from_parts(self.num().clone(), Vec::new());
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_2e70);
        for _ in 0..PROBES {
            let mut leaf = |_a| rng.gen_range(0.35..1.85);
            let (v, scale) = eval_expr(&num, &mut leaf, &mut HashMap::new());
            if !v.is_finite() || !scale.is_finite() {
                continue;
            }
            if v.abs() > REL_TOL * scale {
                return ZeroTest::NonZero;
            }
        }
        ZeroTest::Undecided
    }

    /// Zero test that refuses to guess.
    pub fn is_zero_checked(&self) -> Result<bool, KernelError> {
        match self.zero_test() {
            ZeroTest::Zero => Ok(true),
            ZeroTest::NonZero => Ok(false),
            ZeroTest::Undecided => Err(KernelError::Undecided(self.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structural_and_numeric() {
        let x = Expr::symbol("x");
        assert_eq!((&x - &x).zero_test(), ZeroTest::Zero);
        assert_eq!((&x + &Expr::one()).zero_test(), ZeroTest::NonZero);
        let s = Expr::sin(&x);
        let c = Expr::cos(&x);
        let e = &(&(&s * &s) + &(&c * &c)) - &Expr::one();
        assert_eq!(e.zero_test(), ZeroTest::Zero);
    }

    #[test]
    fn unsimplified_identity_is_undecided() {
        // sin(2x) - 2 sin x cos x has no structural rewrite
        let x = Expr::symbol("x");
        let two = Expr::int(2);
        let e = &Expr::sin(&(&two * &x)) - &(&two * &(&Expr::sin(&x) * &Expr::cos(&x)));
        assert_eq!(e.zero_test(), ZeroTest::Undecided);
        assert!(matches!(e.is_zero_checked(), Err(KernelError::Undecided(_))));
    }
}
