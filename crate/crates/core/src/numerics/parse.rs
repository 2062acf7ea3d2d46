//! Prefix-notation reader for [`Expression`].
//!
//! Grammar (whitespace separated, parentheses delimit applications):
//!
//! ```text
//! expr  := number | "pi" | "t" | "x" INDEX | "(" op expr+ ")"
//! op    := "+" | "*" | "-" | "/" | "^" | "sqrt" | "sin" | "cos"
//! ```
//!
//! `(- a)` negates, `(- a b ...)` subtracts, `(/ a b)` is `a * b^-1` and
//! `(^ a k)` requires an integer literal exponent. The output of
//! `Expression`'s `Display` is always accepted.

use super::Expression;
use crate::Error;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

fn tokenize(src: &str) -> Vec<(usize, Token)> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        match c {
            '(' => {
                out.push((pos, Token::Open));
                chars.next();
            }
            ')' => {
                out.push((pos, Token::Close));
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut atom = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c == '(' || c == ')' || c.is_whitespace() {
                        break;
                    }
                    atom.push(c);
                    chars.next();
                }
                out.push((pos, Token::Atom(atom)));
            }
        }
    }
    out
}

struct Reader<'a> {
    src: &'a str,
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Reader<'_> {
    fn err(&self, at: usize, msg: impl Into<String>) -> Error {
        Error::Parse { input: self.src.to_string(), offset: at, message: msg.into() }
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map(|t| t.0).unwrap_or(self.src.len())
    }

    fn expr(&mut self) -> Result<Expression, Error> {
        let at = self.here();
        let (_, tok) = self.tokens.get(self.pos).cloned().ok_or_else(|| self.err(at, "unexpected end of input"))?;
        self.pos += 1;
        match tok {
            Token::Close => Err(self.err(at, "unexpected ')'")),
            Token::Atom(a) => self.atom(&a, at),
            Token::Open => {
                let op_at = self.here();
                let op = match self.tokens.get(self.pos) {
                    Some((_, Token::Atom(a))) => a.clone(),
                    _ => return Err(self.err(op_at, "expected operator after '('")),
                };
                self.pos += 1;
                let mut args = Vec::new();
                loop {
                    match self.tokens.get(self.pos) {
                        Some((_, Token::Close)) => {
                            self.pos += 1;
                            break;
                        }
                        None => return Err(self.err(self.src.len(), "missing ')'")),
                        _ => {
                            if op == "^" && args.len() == 1 {
                                args.push(self.exponent()?);
                            } else {
                                args.push(self.expr()?);
                            }
                        }
                    }
                }
                self.apply(&op, args, op_at)
            }
        }
    }

    fn exponent(&mut self) -> Result<Expression, Error> {
        let at = self.here();
        match self.tokens.get(self.pos).cloned() {
            Some((_, Token::Atom(a))) => {
                self.pos += 1;
                let k: i32 = a.parse().map_err(|_| self.err(at, format!("exponent '{a}' is not an integer")))?;
                Ok(Expression::constant(k as f64))
            }
            _ => Err(self.err(at, "exponent must be an integer literal")),
        }
    }

    fn atom(&self, a: &str, at: usize) -> Result<Expression, Error> {
        if a == "t" {
            return Ok(Expression::time());
        }
        if a == "pi" {
            return Ok(Expression::constant(std::f64::consts::PI));
        }
        if let Some(idx) = a.strip_prefix('x') {
            return idx
                .parse::<usize>()
                .map(Expression::coord)
                .map_err(|_| self.err(at, format!("bad coordinate '{a}'")));
        }
        a.parse::<f64>()
            .map(Expression::constant)
            .map_err(|_| self.err(at, format!("unknown atom '{a}'")))
    }

    fn apply(&self, op: &str, mut args: Vec<Expression>, at: usize) -> Result<Expression, Error> {
        let unary = |args: &mut Vec<Expression>| -> Result<Expression, Error> {
            if args.len() != 1 {
                return Err(self.err(at, format!("'{op}' takes one argument, got {}", args.len())));
            }
            Ok(args.pop().unwrap())
        };
        match op {
            "+" if !args.is_empty() => Ok(Expression::sum(args)),
            "*" if !args.is_empty() => Ok(Expression::product(args)),
            "-" if args.len() == 1 => Ok(args[0].neg()),
            "-" if args.len() > 1 => {
                let first = args.remove(0);
                Ok(Expression::sum(std::iter::once(first).chain(args.iter().map(|a| a.neg()))))
            }
            "/" if args.len() == 2 => Ok(args[0].div(&args[1])),
            "^" if args.len() == 2 => {
                let k = args[1].as_const().unwrap() as i32;
                Ok(args[0].powi(k))
            }
            "sqrt" => Ok(unary(&mut args)?.sqrt()),
            "sin" => Ok(unary(&mut args)?.sin()),
            "cos" => Ok(unary(&mut args)?.cos()),
            "+" | "*" | "-" | "/" | "^" => Err(self.err(at, format!("wrong number of arguments for '{op}'"))),
            _ => Err(self.err(at, format!("unknown operator '{op}'"))),
        }
    }
}

/// Parses a prefix-notation expression.
pub fn parse_expression(src: &str) -> Result<Expression, Error> {
    let mut r = Reader { src, tokens: tokenize(src), pos: 0 };
    let e = r.expr()?;
    if r.pos != r.tokens.len() {
        return Err(r.err(r.here(), "trailing input"));
    }
    Ok(e)
}
