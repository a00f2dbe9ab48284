//! Textual function expressions.
//!
//! Two forms are accepted: a named builtin such as `derham(0.70710678)` or
//! `power(0.5)`, and a fractional power-series literal
//! `powser:c0;c,b,alpha;c,b,alpha;...` where each term reads
//! c · (x + b)^{alpha}. The grammar is regular, so parsing is a single
//! left-to-right scan and every diagnostic carries the byte offset at which
//! the scan stopped.

use std::fmt;

use crate::error::{Error, Result};
use crate::func::RealFunction;
use crate::ifs;
use crate::series::{FractionalPowerSeries, SeriesSign, SeriesTerm};

/// Parsed form of a function expression.
///
/// Parsing only checks syntax and literal finiteness; parameter ranges are
/// validated when the expression is turned into a [`RealFunction`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FunctionExpr {
    /// Exact self-affine curve value `derham(a)`.
    DeRham { a: f64 },
    /// Level-n reparametrised iterate `derham_reparam(a,n)`.
    DeRhamReparam { a: f64, n: u32 },
    /// Level-n two-parameter iterate `neidinger(a,n)`.
    Neidinger { a: f64, n: u32 },
    /// `counterexample_h(alpha)`: x^{alpha-1} on x > 0, zero elsewhere.
    CounterexampleH { alpha: f64 },
    /// `power(alpha)`: x^{alpha} on x > 0, zero elsewhere.
    Power { alpha: f64 },
    /// `powser:` literal; terms are kept in source order.
    PowerSeries { c0: f64, terms: Vec<SeriesTerm> },
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn err(&self, expected: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            expected: expected.to_string(),
        }
    }

    fn eat(&mut self, byte: u8, expected: &str) -> Result<()> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(expected))
        }
    }

    /// Longest prefix matching an identifier: [a-z_]+.
    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while matches!(self.peek(), Some(b'a'..=b'z') | Some(b'_')) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }

    fn digits(&mut self) -> usize {
        let mut n = 0;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
            n += 1;
        }
        n
    }

    /// Decimal float: -?(d+(.d*)?|.d+)(e[+-]?d+)?. The scanned slice is
    /// always valid f64 syntax, so from_str cannot fail; overflow to
    /// infinity is rejected here so every stored literal is finite.
    fn number(&mut self, expected: &str) -> Result<f64> {
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        let whole = self.digits();
        let mut frac = 0;
        if self.peek() == Some(b'.') {
            self.pos += 1;
            frac = self.digits();
        }
        if whole == 0 && frac == 0 {
            self.pos = start;
            return Err(self.err(expected));
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                // "1e" is the number 1 followed by a stray identifier; back
                // off and let the caller's next expectation report it.
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value: f64 = text.parse().unwrap();
        if !value.is_finite() {
            self.pos = start;
            return Err(self.err(&format!("finite {expected}")));
        }
        Ok(value)
    }

    /// Unsigned integer for iteration counts.
    fn integer(&mut self, expected: &str) -> Result<u32> {
        let start = self.pos;
        if self.digits() == 0 {
            return Err(self.err(expected));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse().map_err(|_| Error::Parse {
            offset: start,
            expected: format!("{expected} within u32 range"),
        })
    }

    fn finish(&self) -> Result<()> {
        if self.pos == self.src.len() {
            Ok(())
        } else {
            Err(self.err("end of input"))
        }
    }
}

/// Parses a function expression.
///
/// Errors carry the byte offset where scanning stopped and the token that
/// was expected there, e.g. `powser:0;1,0,` fails at offset 13 expecting an
/// exponent.
pub fn parse_function(src: &str) -> Result<FunctionExpr> {
    let mut cur = Cursor::new(src);
    let name = cur.ident();
    if name == "powser" {
        cur.eat(b':', "':' after powser")?;
        let c0 = cur.number("constant term")?;
        let mut terms = Vec::new();
        while cur.peek() == Some(b';') {
            cur.pos += 1;
            let c = cur.number("coefficient")?;
            cur.eat(b',', "','")?;
            let b = cur.number("offset")?;
            cur.eat(b',', "','")?;
            let alpha = cur.number("exponent")?;
            terms.push(SeriesTerm { c, b, alpha });
        }
        cur.finish()?;
        return Ok(FunctionExpr::PowerSeries { c0, terms });
    }
    let expr = match name {
        "derham" => {
            cur.eat(b'(', "'('")?;
            let a = cur.number("parameter")?;
            FunctionExpr::DeRham { a }
        }
        "derham_reparam" | "neidinger" => {
            cur.eat(b'(', "'('")?;
            let a = cur.number("parameter")?;
            cur.eat(b',', "','")?;
            let n = cur.integer("iteration count")?;
            if name == "derham_reparam" {
                FunctionExpr::DeRhamReparam { a, n }
            } else {
                FunctionExpr::Neidinger { a, n }
            }
        }
        "counterexample_h" => {
            cur.eat(b'(', "'('")?;
            let alpha = cur.number("exponent")?;
            FunctionExpr::CounterexampleH { alpha }
        }
        "power" => {
            cur.eat(b'(', "'('")?;
            let alpha = cur.number("exponent")?;
            FunctionExpr::Power { alpha }
        }
        _ => {
            return Err(Error::Parse {
                offset: 0,
                expected: "function name or powser literal".to_string(),
            })
        }
    };
    cur.eat(b')', "')'")?;
    cur.finish()?;
    Ok(expr)
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionExpr::DeRham { a } => write!(f, "derham({a})"),
            FunctionExpr::DeRhamReparam { a, n } => write!(f, "derham_reparam({a},{n})"),
            FunctionExpr::Neidinger { a, n } => write!(f, "neidinger({a},{n})"),
            FunctionExpr::CounterexampleH { alpha } => write!(f, "counterexample_h({alpha})"),
            FunctionExpr::Power { alpha } => write!(f, "power({alpha})"),
            FunctionExpr::PowerSeries { c0, terms } => {
                write!(f, "powser:{c0}")?;
                for t in terms {
                    write!(f, ";{},{},{}", t.c, t.b, t.alpha)?;
                }
                Ok(())
            }
        }
    }
}

impl FunctionExpr {
    /// Builds the evaluatable function, validating parameter ranges.
    ///
    /// `max_depth` caps the iteration count of the level-n builtins;
    /// exceeding it is a [`Error::Depth`] so callers can distinguish a
    /// configuration limit from a bad parameter.
    pub fn to_real_function(&self, max_depth: u32) -> Result<RealFunction> {
        let check_depth = |n: u32| {
            if n > max_depth {
                Err(Error::Depth {
                    requested: n,
                    max: max_depth,
                })
            } else {
                Ok(())
            }
        };
        match self {
            FunctionExpr::DeRham { a } => {
                if !(a.is_finite() && *a > 0.0 && *a < 1.0) {
                    return Err(Error::Param(format!(
                        "curve parameter must lie in (0, 1), got {a}"
                    )));
                }
                let a = *a;
                Ok(RealFunction::try_from_fn(move |x| {
                    ifs::derham_eval_exact_f64(a, x)
                }))
            }
            FunctionExpr::DeRhamReparam { a, n } => {
                check_depth(*n)?;
                if !(a.is_finite() && *a > 0.0 && *a <= 1.0) {
                    return Err(Error::Param(format!(
                        "reparametrised curve parameter must lie in (0, 1], got {a}"
                    )));
                }
                let (a, n) = (*a, *n);
                Ok(RealFunction::try_from_fn(move |x| {
                    ifs::derham_reparam_iterate(a, n, x)
                }))
            }
            FunctionExpr::Neidinger { a, n } => {
                check_depth(*n)?;
                if !(a.is_finite() && *a > 0.0 && *a < 1.0) {
                    return Err(Error::Param(format!(
                        "curve parameter must lie in (0, 1), got {a}"
                    )));
                }
                let (a, n) = (*a, *n);
                Ok(RealFunction::try_from_fn(move |x| {
                    ifs::neidinger_iterate(a, n, x)
                }))
            }
            FunctionExpr::CounterexampleH { alpha } => {
                if !(alpha.is_finite() && *alpha > 0.0 && *alpha < 1.0) {
                    return Err(Error::Param(format!(
                        "counterexample exponent must lie in (0, 1), got {alpha}"
                    )));
                }
                Ok(RealFunction::counterexample_h(*alpha))
            }
            FunctionExpr::Power { alpha } => {
                if !(alpha.is_finite() && *alpha > 0.0) {
                    return Err(Error::Param(format!(
                        "power exponent must be positive, got {alpha}"
                    )));
                }
                Ok(RealFunction::power(*alpha))
            }
            FunctionExpr::PowerSeries { c0, terms } => {
                let series =
                    FractionalPowerSeries::new(*c0, terms.clone(), SeriesSign::Plus)?;
                Ok(series.to_real_function())
            }
        }
    }

    /// The series behind a `powser:` literal, merged and validated.
    pub fn as_series(&self) -> Option<Result<FractionalPowerSeries>> {
        match self {
            FunctionExpr::PowerSeries { c0, terms } => Some(FractionalPowerSeries::new(
                *c0,
                terms.clone(),
                SeriesSign::Plus,
            )),
            _ => None,
        }
    }
}

/// Convenience: parse and build in one step.
pub fn function_from_source(src: &str, max_depth: u32) -> Result<RealFunction> {
    parse_function(src)?.to_real_function(max_depth)
}
