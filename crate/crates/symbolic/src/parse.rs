//! Infix expression parser.
//!
//! Grammar: `+ - * /`, `^` (or `**`) with integer exponents or half-integers
//! in parentheses, builtins `sin cos exp log sqrt`, declared function symbols
//! written bare (`H`) or with their argument list (`H(u,x,y)`), and
//! `diff(expr, x, y, ...)`. Numbers are read exactly, decimals included.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::atom::Builtin;
use crate::expr::Expr;
use crate::KernelError;

/// Names the parser is allowed to resolve.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    symbols: BTreeSet<String>,
    functions: BTreeMap<String, Vec<String>>,
    /// Unknown identifiers become fresh symbols instead of errors.
    pub permissive: bool,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn permissive() -> Self {
        SymbolTable {
            permissive: true,
            ..Self::default()
        }
    }

    pub fn add_symbol(&mut self, name: &str) -> &mut Self {
        self.symbols.insert(name.to_string());
        self
    }

    pub fn add_function(&mut self, name: &str, args: &[&str]) -> &mut Self {
        self.functions
            .insert(name.to_string(), args.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn has_symbol(&self, name: &str) -> bool {
        self.symbols.contains(name)
    }

    pub fn function_args(&self, name: &str) -> Option<&[String]> {
        self.functions.get(name).map(|v| v.as_slice())
    }
}

pub fn parse(src: &str, table: &SymbolTable) -> Result<Expr, KernelError> {
    let mut p = Parser {
        src,
        pos: 0,
        table,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    table: &'a SymbolTable,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> KernelError {
        KernelError::Parse {
            message: msg.into(),
            offset: self.pos,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), KernelError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{s}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr, KernelError> {
        let mut acc = self.term()?;
        loop {
            if self.eat("+") {
                acc = &acc + &self.term()?;
            } else if self.eat("-") {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, KernelError> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            if self.src[self.pos..].starts_with("**") {
                return Ok(acc);
            }
            if self.eat("*") {
                acc = &acc * &self.unary()?;
            } else if self.eat("/") {
                let at = self.pos;
                let d = self.unary()?;
                acc = &acc
                    * &d.try_inv().map_err(|_| KernelError::Parse {
                        message: "division by zero".into(),
                        offset: at,
                    })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, KernelError> {
        if self.eat("-") {
            return Ok(-&self.unary()?);
        }
        if self.eat("+") {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, KernelError> {
        let base = self.primary()?;
        if !(self.eat("^") || self.eat("**")) {
            return Ok(base);
        }
        let at = self.pos;
        let k = if self.eat("(") {
            let k = self.exponent(true)?;
            self.expect(")")?;
            k
        } else {
            self.exponent(false)?
        };
        let bad = |m: &str| KernelError::Parse {
            message: m.into(),
            offset: at,
        };
        if k.is_integer() {
            let n = k.to_integer().to_i64().ok_or_else(|| bad("exponent too large"))?;
            if n < 0 && base.is_zero() {
                return Err(bad("division by zero"));
            }
            if n.unsigned_abs() > 1 << 16 {
                return Err(bad("exponent too large"));
            }
            Ok(base.pow(n))
        } else if *k.denom() == BigInt::from(2) {
            let n = k.numer().to_i64().ok_or_else(|| bad("exponent too large"))?;
            if n < 0 && base.is_zero() {
                return Err(bad("division by zero"));
            }
            Ok(Expr::sqrt(&base).pow(n))
        } else {
            Err(bad("only integer and half-integer exponents are supported"))
        }
    }

    fn exponent(&mut self, ratio: bool) -> Result<BigRational, KernelError> {
        let neg = self.eat("-");
        self.skip_ws();
        let mut k = self.number()?;
        if ratio && self.eat("/") {
            self.skip_ws();
            let d = self.number()?;
            if d.is_zero() {
                return Err(self.error("division by zero"));
            }
            k /= d;
        }
        Ok(if neg { -k } else { k })
    }

    fn number(&mut self) -> Result<BigRational, KernelError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        let int_end = self.pos;
        let mut frac = "";
        if self.peek() == Some('.') {
            self.bump();
            let fs = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
            frac = &self.src[fs..self.pos];
        }
        let int = &self.src[start..int_end];
        if int.is_empty() && frac.is_empty() {
            self.pos = start;
            return Err(self.error("expected a number"));
        }
        let digits = format!("{int}{frac}");
        let mut v = BigRational::from_integer(digits.parse::<BigInt>().unwrap_or_default())
            / BigRational::from_integer(BigInt::from(10).pow(frac.len() as u32));
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.bump();
            let neg = match self.peek() {
                Some('-') => {
                    self.bump();
                    true
                }
                Some('+') => {
                    self.bump();
                    false
                }
                _ => false,
            };
            let es = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
            match self.src[es..self.pos].parse::<u32>() {
                Ok(e) if e <= 4096 => {
                    let p = BigRational::from_integer(BigInt::from(10).pow(e));
                    v = if neg { v / p } else { v * p };
                }
                Ok(_) => return Err(self.error("exponent too large")),
                Err(_) => self.pos = save,
            }
        }
        Ok(v)
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_alphabetic() || c == '_' => {
                self.bump();
            }
            _ => return None,
        }
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_' || c == '\'') {
            self.bump();
        }
        Some(self.src[start..self.pos].to_string())
    }

    fn primary(&mut self) -> Result<Expr, KernelError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => Ok(Expr::from_coef(self.number()?)),
            Some(c) if c.is_alphabetic() || c == '_' => {
                let name = self.ident().expect("identifier start");
                self.skip_ws();
                if self.peek() == Some('(') {
                    self.call(&name, start)
                } else {
                    self.bare(&name, start)
                }
            }
            Some(c) => Err(self.error(format!("unexpected character '{c}'"))),
        }
    }

    fn bare(&mut self, name: &str, at: usize) -> Result<Expr, KernelError> {
        if let Some(args) = self.table.function_args(name) {
            let args: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
            return Expr::function(name, &args);
        }
        if self.table.has_symbol(name) || self.table.permissive {
            return Ok(Expr::symbol(name));
        }
        Err(KernelError::Parse {
            message: format!("unknown identifier '{name}'"),
            offset: at,
        })
    }

    fn ident_list(&mut self) -> Result<Vec<String>, KernelError> {
        let mut out = Vec::new();
        if self.eat(")") {
            return Ok(out);
        }
        loop {
            match self.ident() {
                Some(id) => out.push(id),
                None => return Err(self.error("expected an identifier")),
            }
            if self.eat(")") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn call(&mut self, name: &str, at: usize) -> Result<Expr, KernelError> {
        self.expect("(")?;
        if let Some(b) = Builtin::from_name(name) {
            let arg = self.expr()?;
            self.expect(")")?;
            if b == Builtin::Log && arg.is_zero() {
                return Err(KernelError::Parse {
                    message: "log of zero".into(),
                    offset: at,
                });
            }
            return Ok(Expr::builtin(b, &arg));
        }
        if name == "diff" {
            let mut e = self.expr()?;
            while self.eat(",") {
                let var = self.ident().ok_or_else(|| self.error("expected a variable"))?;
                e = e.diff(&var);
            }
            self.expect(")")?;
            return Ok(e);
        }
        let args = self.ident_list()?;
        let err = |m: String| KernelError::Parse {
            message: m,
            offset: at,
        };
        if let Some(decl) = self.table.function_args(name) {
            if decl != args.as_slice() {
                return Err(err(format!(
                    "function '{name}' is declared with arguments ({})",
                    decl.join(",")
                )));
            }
        } else if !self.table.permissive {
            return Err(err(format!("unknown function '{name}'")));
        }
        let refs: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        Expr::function(name, &refs)
    }
}
