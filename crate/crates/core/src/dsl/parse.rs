//! Canonical prefix syntax:
//!
//! ```text
//! expr := <real> | <var> | (<op> expr...)
//! ```
//!
//! `psi` and `delta` take a numeric literal as their first operand.

use std::fmt::{self, Write};

use super::{BinaryOp, CmpOp, Expr, UnaryOp, Var};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<(usize, Tok<'a>)> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let c = rest.chars().next()?;
        let tok = match c {
            '(' => Tok::Open,
            ')' => Tok::Close,
            _ => {
                let end = rest
                    .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
                    .unwrap_or(rest.len());
                Tok::Atom(&rest[..end])
            }
        };
        Some((self.pos, tok))
    }

    fn next(&mut self) -> Option<(usize, Tok<'a>)> {
        let (pos, tok) = self.peek()?;
        self.pos = pos
            + match tok {
                Tok::Open | Tok::Close => 1,
                Tok::Atom(s) => s.len(),
            };
        Some((pos, tok))
    }
}

fn parse_number(s: &str) -> Option<f64> {
    let first = s.chars().next()?;
    let numeric_start = first.is_ascii_digit()
        || first == '.'
        || ((first == '-' || first == '+') && s.len() > 1);
    if !numeric_start {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

enum Head {
    Unary(UnaryOp),
    Binary(BinaryOp),
    Cond(CmpOp),
    IfZero,
    Psi,
    Delta,
}

impl Head {
    fn from_symbol(s: &str) -> Option<Head> {
        Some(match s {
            "+" => Head::Binary(BinaryOp::Add),
            "-" => Head::Binary(BinaryOp::Sub),
            "*" => Head::Binary(BinaryOp::Mul),
            "/" => Head::Binary(BinaryOp::Div),
            "pow" | "^" => Head::Binary(BinaryOp::Pow),
            "min" => Head::Binary(BinaryOp::Min),
            "max" => Head::Binary(BinaryOp::Max),
            "exp" => Head::Unary(UnaryOp::Exp),
            "log" => Head::Unary(UnaryOp::Log),
            "abs" => Head::Unary(UnaryOp::Abs),
            ">" => Head::Cond(CmpOp::Gt),
            "<" => Head::Cond(CmpOp::Lt),
            "=" => Head::Cond(CmpOp::Eq),
            "=0" => Head::IfZero,
            "psi" => Head::Psi,
            "delta" => Head::Delta,
            _ => return None,
        })
    }

    fn arity(&self) -> usize {
        match self {
            Head::Unary(_) => 1,
            Head::Binary(_) => 2,
            Head::Cond(_) => 4,
            Head::IfZero | Head::Psi | Head::Delta => 3,
        }
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
}

impl<'a> Parser<'a> {
    fn end(&self) -> usize {
        self.lex.src.len()
    }

    fn expr(&mut self) -> Result<Expr> {
        match self.lex.next() {
            None => Err(Error::syntax(self.end(), "unexpected end of input")),
            Some((pos, Tok::Close)) => Err(Error::syntax(pos, "unexpected ')'")),
            Some((pos, Tok::Atom(s))) => atom(pos, s),
            Some((open, Tok::Open)) => self.form(open),
        }
    }

    fn literal(&mut self) -> Result<f64> {
        match self.lex.next() {
            None => Err(Error::syntax(self.end(), "unexpected end of input")),
            Some((pos, Tok::Atom(s))) => {
                parse_number(s).ok_or_else(|| Error::syntax(pos, format!("expected a number, found '{s}'")))
            }
            Some((pos, _)) => Err(Error::syntax(pos, "expected a numeric literal")),
        }
    }

    fn form(&mut self, open: usize) -> Result<Expr> {
        let (pos, sym) = match self.lex.next() {
            None => return Err(Error::syntax(self.end(), "unexpected end of input")),
            Some((pos, Tok::Atom(s))) => (pos, s),
            Some((pos, _)) => return Err(Error::syntax(pos, "expected an operator")),
        };
        let head = Head::from_symbol(sym).ok_or_else(|| Error::syntax(pos, format!("unknown operator '{sym}'")))?;
        let mut literal = None;
        let mut args = Vec::with_capacity(4);
        let wanted = head.arity();
        if matches!(head, Head::Psi | Head::Delta) {
            literal = Some(self.literal()?);
        }
        loop {
            match self.lex.peek() {
                None => return Err(Error::syntax(self.end(), "unexpected end of input")),
                Some((close, Tok::Close)) => {
                    self.lex.next();
                    let got = args.len() + usize::from(literal.is_some());
                    if got != wanted {
                        return Err(Error::syntax(
                            open,
                            format!("'{sym}' expects {wanted} operands, found {got}"),
                        ));
                    }
                    let _ = close;
                    break;
                }
                Some(_) => args.push(self.expr()?),
            }
        }
        let mut it = args.into_iter();
        let mut next = || it.next().expect("arity checked");
        Ok(match head {
            Head::Unary(op) => Expr::unary(op, next()),
            Head::Binary(op) => {
                let a = next();
                Expr::binary(op, a, next())
            }
            Head::Cond(op) => {
                let (a, b, t) = (next(), next(), next());
                Expr::cond(op, a, b, t, next())
            }
            Head::IfZero => {
                let (a, t) = (next(), next());
                Expr::if_zero(a, t, next())
            }
            Head::Psi => {
                let a = next();
                Expr::psi(literal.unwrap(), a, next())
            }
            Head::Delta => {
                let a = next();
                Expr::delta(literal.unwrap(), a, next())
            }
        })
    }
}

fn atom(pos: usize, s: &str) -> Result<Expr> {
    if let Some(v) = parse_number(s) {
        return Ok(Expr::Const(v));
    }
    Var::from_name(s)
        .map(Expr::Var)
        .ok_or_else(|| Error::syntax(pos, format!("unknown symbol '{s}'")))
}

pub(crate) fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser {
        lex: Lexer { src: text, pos: 0 },
    };
    let e = p.expr()?;
    if let Some((pos, _)) = p.lex.peek() {
        return Err(Error::syntax(pos, "trailing input after expression"));
    }
    Ok(e)
}

fn write_num(v: f64, f: &mut impl Write) -> fmt::Result {
    // `{:?}` is the shortest round-tripping form; drop the ".0" on integers
    let s = format!("{v:?}");
    f.write_str(s.strip_suffix(".0").unwrap_or(&s))
}

pub(crate) fn write_prefix(e: &Expr, f: &mut impl Write) -> fmt::Result {
    match e {
        Expr::Const(v) => write_num(*v, f),
        Expr::Var(v) => f.write_str(v.name()),
        _ => {
            let head = match e {
                Expr::Unary(op, _) => op.symbol(),
                Expr::Binary(op, _, _) => op.symbol(),
                Expr::Cond(op, _) => op.symbol(),
                Expr::IfZero(_) => "=0",
                Expr::Psi { .. } => "psi",
                Expr::Delta { .. } => "delta",
                Expr::Const(_) | Expr::Var(_) => unreachable!(),
            };
            write!(f, "({head}")?;
            match e {
                Expr::Psi { groups: g, .. } | Expr::Delta { threshold: g, .. } => {
                    f.write_char(' ')?;
                    write_num(*g, f)?;
                }
                _ => {}
            }
            for c in e.children() {
                f.write_char(' ')?;
                write_prefix(c, f)?;
            }
            f.write_char(')')
        }
    }
}

pub(crate) fn infix(e: &Expr) -> String {
    let mut s = String::new();
    write_infix(e, &mut s).expect("writing to a String cannot fail");
    s
}

fn write_infix(e: &Expr, f: &mut String) -> fmt::Result {
    match e {
        Expr::Const(v) => write_num(*v, f),
        Expr::Var(v) => f.write_str(v.name()),
        Expr::Unary(op, a) => {
            write!(f, "{}(", op.symbol())?;
            write_infix(a, f)?;
            f.write_char(')')
        }
        Expr::Binary(op, a, b) => match op {
            BinaryOp::Min | BinaryOp::Max => {
                write!(f, "{}(", op.symbol())?;
                write_infix(a, f)?;
                f.write_str(", ")?;
                write_infix(b, f)?;
                f.write_char(')')
            }
            _ => {
                let sym = if *op == BinaryOp::Pow { "^" } else { op.symbol() };
                f.write_char('(')?;
                write_infix(a, f)?;
                write!(f, " {sym} ")?;
                write_infix(b, f)?;
                f.write_char(')')
            }
        },
        Expr::Cond(op, xs) => {
            f.write_str("if(")?;
            write_infix(&xs[0], f)?;
            write!(f, " {} ", op.symbol())?;
            write_infix(&xs[1], f)?;
            f.write_str(", ")?;
            write_infix(&xs[2], f)?;
            f.write_str(", ")?;
            write_infix(&xs[3], f)?;
            f.write_char(')')
        }
        Expr::IfZero(xs) => {
            f.write_str("if(")?;
            write_infix(&xs[0], f)?;
            f.write_str(" = 0, ")?;
            write_infix(&xs[1], f)?;
            f.write_str(", ")?;
            write_infix(&xs[2], f)?;
            f.write_char(')')
        }
        Expr::Psi { groups, same, other } => {
            f.write_str("psi_")?;
            write_num(*groups, f)?;
            f.write_char('(')?;
            write_infix(same, f)?;
            f.write_str(", ")?;
            write_infix(other, f)?;
            f.write_char(')')
        }
        Expr::Delta {
            threshold,
            before,
            after,
        } => {
            f.write_str("delta_")?;
            write_num(*threshold, f)?;
            f.write_char('(')?;
            write_infix(before, f)?;
            f.write_str(", ")?;
            write_infix(after, f)?;
            f.write_char(')')
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::dsl::{Expr, GeneratorTree, Var};
    use crate::Error;

    fn offset_of(text: &str) -> usize {
        match GeneratorTree::parse(text) {
            Err(Error::Syntax { offset, .. }) => offset,
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn delta_form() {
        let t = GeneratorTree::parse("(delta 0.5 k (pow k k))").unwrap();
        match t.root() {
            Expr::Delta {
                threshold,
                before,
                after,
            } => {
                assert_eq!(*threshold, 0.5);
                assert_eq!(**before, Expr::Var(Var::Ki));
                assert_eq!(after.size(), 3);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(t.to_string(), "(delta 0.5 k_i (pow k_i k_i))");
    }

    #[test]
    fn unbalanced_form_fails_at_end() {
        assert_eq!(offset_of("(+ k"), 4);
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(offset_of("(+ k foo)"), 5);
        assert_eq!(offset_of("(frob 1 2)"), 1);
        assert_eq!(offset_of("(+ 1 2 3)"), 0);
        assert_eq!(offset_of("(psi d 1 2)"), 5);
        assert_eq!(offset_of("1 2"), 2);
        assert_eq!(offset_of(")"), 0);
        assert_eq!(offset_of(""), 0);
    }

    #[test]
    fn numbers_and_canonical_spelling() {
        let t = GeneratorTree::parse("  ( -   -1.5 ( ^ k 2.0 ) ) ").unwrap();
        assert_eq!(t.to_string(), "(- -1.5 (pow k_i 2))");
        assert_eq!(GeneratorTree::parse("1e-7").unwrap().to_string(), "1e-7");
        assert_eq!(GeneratorTree::parse("(=0 d 1 0.25)").unwrap().to_string(), "(=0 d 1 0.25)");
    }

    #[test]
    fn infix_rendering() {
        let t = GeneratorTree::parse("(delta 0.46 (pow k k) 6)").unwrap();
        assert_eq!(t.to_infix(), "delta_0.46((k_i ^ k_i), 6)");
    }
}
