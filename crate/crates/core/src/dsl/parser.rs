//! Precedence climbing over a byte-offset token stream.
//!
//! Binding strength, loosest first: `+ -` (left), `* /` (left), unary minus,
//! `^` (right). So `-x^2` is `-(x^2)` and `2^3^2` is `2^(3^2)`. The exponent
//! of `^` may itself carry a unary minus: `2^-1`.

use std::fmt;

use thiserror::Error;

use super::ast::{BinOp, Expr, Func};

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParseError {
    /// Byte offset into the source text.
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at byte {}: expected {}, found {}",
            self.offset,
            self.expected.join(" | "),
            self.found
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn expected(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((Tok::Op(c as char), start));
                i += 1;
            }
            b'(' => {
                out.push((Tok::LParen, start));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, start));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    expected: expected(&["number"]),
                    found: format!("`{text}`"),
                })?;
                out.push((Tok::Num(v), start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    expected: expected(&["number", "identifier", "operator", "`(`", "`)`"]),
                    found: format!("`{ch}`"),
                });
            }
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, items: &[&str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: expected(items),
            found: self.peek().describe(),
        }
    }

    fn binary(&mut self, level: u8) -> Result<Expr, ParseError> {
        let ops: &[char] = if level == 0 { &['+', '-'] } else { &['*', '/'] };
        let mut lhs = if level == 0 { self.binary(1)? } else { self.unary()? };
        while let Tok::Op(c) = *self.peek() {
            if !ops.contains(&c) {
                break;
            }
            self.bump();
            let rhs = if level == 0 { self.binary(1)? } else { self.unary()? };
            let op = match c {
                '+' => BinOp::Add,
                '-' => BinOp::Sub,
                '*' => BinOp::Mul,
                _ => BinOp::Div,
            };
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::bin(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        const START: &[&str] = &["number", "identifier", "`(`", "`-`"];
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Ident(name) => {
                let at = self.offset();
                self.bump();
                if *self.peek() != Tok::LParen {
                    return Ok(Expr::Var(name));
                }
                let func = Func::from_name(&name).ok_or_else(|| ParseError {
                    offset: at,
                    expected: Func::ALL.iter().map(|f| f.name().to_string()).collect(),
                    found: format!("identifier `{name}`"),
                })?;
                self.bump();
                let arg = self.binary(0)?;
                self.expect_rparen()?;
                Ok(Expr::call(func, arg))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.binary(0)?;
                self.expect_rparen()?;
                Ok(inner)
            }
            _ => Err(self.error(START)),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&["`)`", "operator"]))
        }
    }
}

pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    if *p.peek() == Tok::End {
        return Err(p.error(&["expression"]));
    }
    let e = p.binary(0)?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse_expression(s).unwrap()
    }

    #[test]
    fn precedence() {
        let expect = Expr::bin(
            BinOp::Add,
            Expr::bin(BinOp::Mul, Expr::num(2.0), Expr::var("x1")),
            Expr::bin(BinOp::Pow, Expr::call(Func::Sin, Expr::var("x2")), Expr::num(2.0)),
        );
        assert_eq!(p("2*x1 + sin(x2)^2"), expect);
    }

    #[test]
    fn associativity() {
        assert_eq!(p("a-b-c"), p("(a-b)-c"));
        assert_eq!(p("a/b/c"), p("(a/b)/c"));
        assert_eq!(p("a^b^c"), p("a^(b^c)"));
        assert_eq!(p("-x^2"), Expr::neg(p("x^2")));
        assert_eq!(p("2^-1"), Expr::bin(BinOp::Pow, Expr::num(2.0), Expr::neg(Expr::num(1.0))));
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(p("1e-3"), Expr::num(1e-3));
        assert_eq!(p("2.5E+2"), Expr::num(250.0));
    }

    #[test]
    fn dangling_operator_reports_end_offset() {
        let e = parse_expression("1 +").unwrap_err();
        assert_eq!(e.offset, 3);
        assert!(e.expected.iter().any(|s| s == "number"));
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(parse_expression("").unwrap_err().offset, 0);
        assert_eq!(parse_expression("(x").unwrap_err().offset, 2);
        assert_eq!(parse_expression("x y").unwrap_err().offset, 2);
        assert_eq!(parse_expression("foo(x)").unwrap_err().offset, 0);
        assert_eq!(parse_expression("x $ 1").unwrap_err().offset, 2);
    }

    #[test]
    fn printing_round_trips() {
        for s in ["2*x1 + sin(x2)^2", "-x^-2/3", "exp(t) - (1 - y)*0.1", "a^b^c - -d"] {
            let e = p(s);
            assert_eq!(p(&e.to_string()), e, "{s} -> {e}");
        }
    }
}
