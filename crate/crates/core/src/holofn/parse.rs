//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ('^' integer)? | '-' factor
//! atom   := number | number 'J' | 'z' | '(' expr ')' | ('exp' | 'sqrt') '(' expr ')'
//! ```

use std::fmt;

use thiserror::Error;

use super::Expr;
use crate::algebra::SplitComplex;

#[derive(Debug, Clone, PartialEq, Error)]
pub struct SyntaxError {
    /// Byte offset into the input.
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at offset {}: expected {}, found {}",
            self.offset,
            self.expected.join(" or "),
            self.found
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(x) => write!(f, "number {x}"),
            Tok::Imag(x) => write!(f, "literal {x}J"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent, only if followed by digits
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut k = i + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    i = k;
                }
            }
            let value: f64 = text[start..i].parse().map_err(|_| SyntaxError {
                offset: start,
                expected: vec!["number"],
                found: format!("`{}`", &text[start..i]),
            })?;
            let mut k = i;
            while k < bytes.len() && bytes[k].is_ascii_whitespace() {
                k += 1;
            }
            if k < bytes.len() && (bytes[k] == b'j' || bytes[k] == b'J') {
                let after = bytes.get(k + 1).copied();
                if !after.is_some_and(|b| b.is_ascii_alphanumeric()) {
                    out.push((start, Tok::Imag(value)));
                    i = k + 1;
                    continue;
                }
            }
            out.push((start, Tok::Num(value)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if b"+-*/^()".contains(&c) {
            out.push((i, Tok::Sym(c as char)));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(SyntaxError {
                offset: i,
                expected: vec!["number", "`z`", "`exp`", "`sqrt`", "operator", "`(`", "`)`"],
                found: format!("`{ch}`"),
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn error(&self, expected: Vec<&'static str>) -> SyntaxError {
        SyntaxError {
            offset: self.offset(),
            expected,
            found: self.peek().to_string(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, SyntaxError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = self.eat('-');
        match *self.peek() {
            Tok::Num(x) if x.fract() == 0.0 && x.abs() <= i32::MAX as f64 => {
                self.pos += 1;
                let n = x as i32;
                Ok(Expr::Pow(Box::new(base), if negative { -n } else { n }))
            }
            _ => Err(self.error(vec!["integer exponent"])),
        }
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let expected = vec!["number", "`z`", "`(`", "`exp`", "`sqrt`", "`-`"];
        match self.peek().clone() {
            Tok::Num(x) => {
                self.pos += 1;
                Ok(Expr::Const(SplitComplex::real(x)))
            }
            Tok::Imag(x) => {
                self.pos += 1;
                Ok(Expr::Const(SplitComplex::new(0.0, x)))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error(vec!["`)`", "operator"]));
                }
                Ok(inner)
            }
            Tok::Ident(name) if name == "z" => {
                self.pos += 1;
                Ok(Expr::Var)
            }
            Tok::Ident(name) if name == "exp" || name == "sqrt" => {
                self.pos += 1;
                if !self.eat('(') {
                    return Err(self.error(vec!["`(`"]));
                }
                let arg = Box::new(self.expr()?);
                if !self.eat(')') {
                    return Err(self.error(vec!["`)`", "operator"]));
                }
                Ok(if name == "exp" { Expr::Exp(arg) } else { Expr::Sqrt(arg) })
            }
            _ => Err(self.error(expected)),
        }
    }
}

pub(super) fn parse(text: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(vec!["operator", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holofn::HoloExpr;

    fn boxed(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn variable_and_mixed_tree() {
        assert_eq!(parse("z").unwrap(), Expr::Var);
        let tree = parse("(2J)*z^2 + exp(z)").unwrap();
        let expected = Expr::Add(
            boxed(Expr::Mul(
                boxed(Expr::Const(SplitComplex::new(0.0, 2.0))),
                boxed(Expr::Pow(boxed(Expr::Var), 2)),
            )),
            boxed(Expr::Exp(boxed(Expr::Var))),
        );
        assert_eq!(tree, expected);
    }

    #[test]
    fn trailing_operator_reports_offset() {
        let err = parse("z +").unwrap_err();
        assert_eq!(err.offset, 3);
        assert!(err.expected.contains(&"`z`"));
        assert_eq!(err.found, "end of input");
    }

    #[test]
    fn precedence() {
        // '^' binds tighter than unary minus, which binds tighter than '*'
        assert_eq!(parse("-z^2").unwrap(), Expr::Neg(boxed(Expr::Pow(boxed(Expr::Var), 2))));
        assert_eq!(parse("1 - 2 - z").unwrap().to_string(), "1 - 2 - z");
        assert_eq!(parse("1 - (2 - z)").unwrap().to_string(), "1 - (2 - z)");
        assert_eq!(parse("(z+1)^2").unwrap().to_string(), "(z + 1)^2");
        assert_eq!(parse("2*-z").unwrap().to_string(), "2*-z");
        assert_eq!(parse("z^-3").unwrap(), Expr::Pow(boxed(Expr::Var), -3));
    }

    #[test]
    fn literal_forms() {
        assert_eq!(parse("3j").unwrap(), Expr::Const(SplitComplex::new(0.0, 3.0)));
        assert_eq!(parse("1.5e-2 J").unwrap(), Expr::Const(SplitComplex::new(0.0, 0.015)));
        assert_eq!(parse(" 2e3 ").unwrap(), Expr::Const(SplitComplex::real(2000.0)));
    }

    #[test]
    fn error_cases() {
        for (text, offset) in [
            ("", 0),
            ("z^2.5", 2),
            ("exp z", 4),
            ("(z + 1", 6),
            ("2 $ z", 2),
            ("log(z)", 0),
            ("z z", 2),
            ("z^z", 2),
        ] {
            let err = parse(text).unwrap_err();
            assert_eq!(err.offset, offset, "{text}: {err}");
        }
    }

    #[test]
    fn printed_form_reparses_identically() {
        for text in [
            "z",
            "(2J)*z^2 + exp(z)",
            "-(z - 1)/(z + 1)^3*sqrt(z)",
            "1/(z^2 - 1)",
            "exp(-2*z) - -z",
            "z/(z/z)",
            "0.1 + 1e-7*z - 3.25J",
        ] {
            let first = parse(text).unwrap();
            let printed = HoloExpr::new(first.clone()).to_string();
            assert_eq!(parse(&printed).unwrap(), first, "{text} -> {printed}");
        }
    }
}
