//! Recursive-descent Pratt parser for the expression grammar
//! (see docs/grammar.ebnf in the repository root).
//!
//! Identifiers: `s`, `t`, the function symbols `a`, `b`, `r` (with
//! postfix primes for derivatives), the functions `sin`, `cos`, `exp`,
//! `log`, `abs`, and the parameters `lambda`, `mu`, `a0`, `a1`, `b0`,
//! `b1`. Numeric literals are decimal and parse to exact rationals.
//! `sin`/`cos` arguments must be `t` or `n*t` with integer `n >= 1`.

use super::expr::{FuncSym, ParamSym, SymExpr, Var};
use super::{Rat, Result, SymError};
use num::{BigInt, One, Zero};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::Eof, start));
        }
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' => {
                let mut end = self.pos;
                while end < self.src.len() && self.src[end].is_ascii_digit() {
                    end += 1;
                }
                let mut int_part: BigInt = std::str::from_utf8(&self.src[self.pos..end])
                    .unwrap()
                    .parse()
                    .unwrap();
                let mut value;
                if end < self.src.len() && self.src[end] == b'.' {
                    let fs = end + 1;
                    let mut fe = fs;
                    while fe < self.src.len() && self.src[fe].is_ascii_digit() {
                        fe += 1;
                    }
                    if fe == fs {
                        return Err(SymError::Syntax {
                            pos: end,
                            msg: "expected digits after decimal point".into(),
                        });
                    }
                    let frac: BigInt =
                        std::str::from_utf8(&self.src[fs..fe]).unwrap().parse().unwrap();
                    let mut den = BigInt::one();
                    for _ in fs..fe {
                        den *= 10;
                        int_part *= 10;
                    }
                    value = Rat::new(int_part + frac, den);
                    end = fe;
                } else {
                    value = Rat::from_integer(int_part);
                }
                if value.denom().is_zero() {
                    value = Rat::zero();
                }
                self.pos = end;
                Tok::Num(value)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                // postfix primes attach to the identifier
                while end < self.src.len() && self.src[end] == b'\'' {
                    end += 1;
                }
                let name = std::str::from_utf8(&self.src[self.pos..end]).unwrap().to_string();
                self.pos = end;
                Tok::Ident(name)
            }
            other => {
                return Err(SymError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{}`", other as char),
                })
            }
        };
        Ok((tok, start))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    cursor: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.cursor].0
    }

    fn peek_pos(&self) -> usize {
        self.toks[self.cursor].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.cursor].clone();
        if self.cursor + 1 < self.toks.len() {
            self.cursor += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<()> {
        if self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(SymError::Syntax { pos: self.peek_pos(), msg: format!("expected {what}") })
        }
    }

    fn parse_expr(&mut self, min_bp: u8) -> Result<SymExpr> {
        let mut lhs = self.parse_prefix()?;
        loop {
            let (bp, right_assoc) = match self.peek() {
                Tok::Plus | Tok::Minus => (10, false),
                Tok::Star | Tok::Slash => (20, false),
                Tok::Caret => (30, true),
                _ => break,
            };
            if bp < min_bp {
                break;
            }
            let (op, pos) = self.bump();
            let next_bp = if right_assoc { bp } else { bp + 1 };
            match op {
                Tok::Caret => {
                    let exponent = self.parse_prefix()?;
                    let n = match exponent {
                        SymExpr::Rational(q) if q.is_integer() => {
                            i64::try_from(q.numer()).map_err(|_| SymError::Syntax {
                                pos,
                                msg: "exponent out of range".into(),
                            })?
                        }
                        SymExpr::Product(fs) => {
                            // allow parenthesized negative integers: (-2)
                            match &fs[..] {
                                [SymExpr::Rational(a), SymExpr::Rational(b)] => {
                                    let q = a * b;
                                    if q.is_integer() {
                                        i64::try_from(q.numer()).map_err(|_| SymError::Syntax {
                                            pos,
                                            msg: "exponent out of range".into(),
                                        })?
                                    } else {
                                        return Err(SymError::Syntax {
                                            pos,
                                            msg: "exponent must be an integer".into(),
                                        });
                                    }
                                }
                                _ => {
                                    return Err(SymError::Syntax {
                                        pos,
                                        msg: "exponent must be an integer".into(),
                                    })
                                }
                            }
                        }
                        _ => {
                            return Err(SymError::Syntax {
                                pos,
                                msg: "exponent must be an integer".into(),
                            })
                        }
                    };
                    lhs = lhs.pow(n);
                }
                Tok::Plus => {
                    let rhs = self.parse_expr(next_bp)?;
                    lhs = flatten_sum(lhs, rhs);
                }
                Tok::Minus => {
                    let rhs = self.parse_expr(next_bp)?;
                    lhs = flatten_sum(lhs, rhs.neg());
                }
                Tok::Star => {
                    let rhs = self.parse_expr(next_bp)?;
                    lhs = flatten_product(lhs, rhs);
                }
                Tok::Slash => {
                    let rhs = self.parse_expr(next_bp)?;
                    lhs = SymExpr::div(lhs, rhs);
                }
                _ => unreachable!(),
            }
        }
        Ok(lhs)
    }

    fn parse_prefix(&mut self) -> Result<SymExpr> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Num(q) => Ok(SymExpr::Rational(q)),
            Tok::Minus => {
                let operand = self.parse_expr(25)?;
                Ok(match operand {
                    SymExpr::Rational(q) => SymExpr::Rational(-q),
                    other => other.neg(),
                })
            }
            Tok::LParen => {
                let inner = self.parse_expr(0)?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => self.parse_ident(name, pos),
            other => Err(SymError::Syntax { pos, msg: format!("unexpected token {other:?}") }),
        }
    }

    fn parse_ident(&mut self, name: String, pos: usize) -> Result<SymExpr> {
        let primes = name.chars().rev().take_while(|c| *c == '\'').count();
        let stem = &name[..name.len() - primes];
        let func = match stem {
            "a" => Some(FuncSym::A),
            "b" => Some(FuncSym::B),
            "r" => Some(FuncSym::R),
            _ => None,
        };
        if let Some(f) = func {
            return Ok(SymExpr::Func(f, primes as u32));
        }
        if primes > 0 {
            return Err(SymError::Syntax {
                pos,
                msg: format!("derivative primes are only valid on a, b, r (got `{name}`)"),
            });
        }
        match stem {
            "s" => Ok(SymExpr::Variable(Var::S)),
            "t" => Ok(SymExpr::Variable(Var::T)),
            "sin" | "cos" => {
                self.expect(&Tok::LParen, "`(` after function name")?;
                let arg = self.parse_expr(0)?;
                self.expect(&Tok::RParen, "`)`")?;
                let n = trig_multiple(&arg).ok_or_else(|| SymError::Syntax {
                    pos,
                    msg: format!("{stem} argument must be t or n*t with integer n >= 1"),
                })?;
                Ok(if stem == "sin" { SymExpr::Sin(n) } else { SymExpr::Cos(n) })
            }
            "exp" | "log" | "abs" => {
                self.expect(&Tok::LParen, "`(` after function name")?;
                let arg = self.parse_expr(0)?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(match stem {
                    "exp" => arg.exp(),
                    "log" => arg.log(),
                    _ => arg.abs(),
                })
            }
            _ => match ParamSym::from_name(stem) {
                Some(p) => Ok(SymExpr::Param(p)),
                None => Err(SymError::UnknownIdent { pos, name }),
            },
        }
    }
}

fn flatten_sum(lhs: SymExpr, rhs: SymExpr) -> SymExpr {
    let mut terms = match lhs {
        SymExpr::Sum(v) => v,
        other => vec![other],
    };
    match rhs {
        SymExpr::Sum(v) => terms.extend(v),
        other => terms.push(other),
    }
    SymExpr::Sum(terms)
}

fn flatten_product(lhs: SymExpr, rhs: SymExpr) -> SymExpr {
    let mut factors = match lhs {
        SymExpr::Product(v) => v,
        other => vec![other],
    };
    match rhs {
        SymExpr::Product(v) => factors.extend(v),
        other => factors.push(other),
    }
    SymExpr::Product(factors)
}

fn trig_multiple(arg: &SymExpr) -> Option<u32> {
    match arg {
        SymExpr::Variable(Var::T) => Some(1),
        SymExpr::Product(fs) => match &fs[..] {
            [SymExpr::Rational(q), SymExpr::Variable(Var::T)] if q.is_integer() => {
                u32::try_from(q.numer()).ok().filter(|n| *n >= 1)
            }
            _ => None,
        },
        _ => None,
    }
}

/// Parse a textual expression in the documented grammar.
pub fn parse(src: &str) -> Result<SymExpr> {
    let mut lexer = Lexer::new(src);
    let mut toks = Vec::new();
    loop {
        let (tok, pos) = lexer.next()?;
        let done = tok == Tok::Eof;
        toks.push((tok, pos));
        if done {
            break;
        }
    }
    let mut parser = Parser { toks, cursor: 0 };
    let expr = parser.parse_expr(0)?;
    if *parser.peek() != Tok::Eof {
        return Err(SymError::Syntax {
            pos: parser.peek_pos(),
            msg: "trailing input".into(),
        });
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_cases() {
        assert_eq!(parse("r^6/16").unwrap().to_string(), "r^6/16");
        assert_eq!(parse("a'' - a'^2").unwrap().to_string(), "a'' - a'^2");
        assert_eq!(
            parse("log(b + r*sin(t))").unwrap().to_string(),
            "log(b + r*sin(t))"
        );
        assert_eq!(parse("sin(2*t)").unwrap(), SymExpr::Sin(2));
        assert_eq!(parse("-1/2").unwrap(), SymExpr::ratio(-1, 2));
        assert_eq!(parse("0.25").unwrap(), SymExpr::ratio(1, 4));
        assert_eq!(parse("lambda + log(s + mu)").unwrap().to_string(), "lambda + log(s + mu)");
    }

    #[test]
    fn error_positions() {
        match parse("a + q") {
            Err(SymError::UnknownIdent { pos, name }) => {
                assert_eq!(pos, 4);
                assert_eq!(name, "q");
            }
            other => panic!("expected unknown identifier, got {other:?}"),
        }
        assert!(matches!(parse("sin(s)"), Err(SymError::Syntax { .. })));
        assert!(matches!(parse("a ^ b"), Err(SymError::Syntax { .. })));
        assert!(matches!(parse("(a + b"), Err(SymError::Syntax { .. })));
    }

    #[test]
    fn print_parse_roundtrip() {
        for src in [
            "a'' - a'^2",
            "r*cos(t)/(b + r*sin(t))",
            "1/16*r^6",
            "exp(-2*a)*(a'^2 - a'')",
            "abs(s + 1)",
            "s^(-2)",
        ] {
            let e = parse(src).unwrap();
            let printed = e.to_string();
            let reparsed = parse(&printed).unwrap();
            assert_eq!(e, reparsed, "roundtrip failed for {src} -> {printed}");
        }
    }
}
