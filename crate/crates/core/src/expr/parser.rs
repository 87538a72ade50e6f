//! Recursive-descent parser for the field DSL.
//!
//! ```text
//! expr     := ['-'] term (('+'|'-') term)*
//! term     := factor (('*'|'/') factor)*
//! factor   := atom ('^' integer)?
//! atom     := number | 'pi' | 'x' | fncall | '(' expr ')'
//! fncall   := ('sin'|'cos'|'exp') '(' expr ')'
//!           | 'bump' '(' 'x' ';' number ',' number ')'
//!           | 'plateau' '(' 'x' ';' number ',' number ',' number ')'
//!           | 'piecewise' '{' (interval ':' expr ';')+ '}'
//! interval := '[' number ',' number ')'
//! ```
//!
//! Numbers are decimal with an optional exponent; `pi` is the only built-in
//! constant. `#` starts a comment that runs to the end of the line.

use super::{Node, PieceArc, VectorFieldExpr};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    Comma,
    Semi,
    Colon,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_trivia(&mut self) {
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else if c == b'#' {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        self.skip_trivia();
        let at = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::Eof, at));
        }
        let c = self.src[self.pos];
        let simple = |t| Ok((t, at));
        match c {
            b'+' => {
                self.pos += 1;
                simple(Tok::Plus)
            }
            b'-' => {
                self.pos += 1;
                simple(Tok::Minus)
            }
            b'*' => {
                self.pos += 1;
                simple(Tok::Star)
            }
            b'/' => {
                self.pos += 1;
                simple(Tok::Slash)
            }
            b'^' => {
                self.pos += 1;
                simple(Tok::Caret)
            }
            b'(' => {
                self.pos += 1;
                simple(Tok::LParen)
            }
            b')' => {
                self.pos += 1;
                simple(Tok::RParen)
            }
            b'{' => {
                self.pos += 1;
                simple(Tok::LBrace)
            }
            b'}' => {
                self.pos += 1;
                simple(Tok::RBrace)
            }
            b'[' => {
                self.pos += 1;
                simple(Tok::LBracket)
            }
            b',' => {
                self.pos += 1;
                simple(Tok::Comma)
            }
            b';' => {
                self.pos += 1;
                simple(Tok::Semi)
            }
            b':' => {
                self.pos += 1;
                simple(Tok::Colon)
            }
            b'0'..=b'9' => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if self.pos < self.src.len() && self.src[self.pos] == b'.' {
                    self.pos += 1;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                }
                if self.pos < self.src.len()
                    && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E')
                {
                    // Only consume the exponent if digits follow.
                    let mut probe = self.pos + 1;
                    if probe < self.src.len()
                        && (self.src[probe] == b'+' || self.src[probe] == b'-')
                    {
                        probe += 1;
                    }
                    if probe < self.src.len() && self.src[probe].is_ascii_digit() {
                        self.pos = probe;
                        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                            self.pos += 1;
                        }
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let value: f64 = text
                    .parse()
                    .map_err(|_| Error::syntax(start, format!("bad number literal `{text}`")))?;
                Ok((Tok::Num(value), at))
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok((Tok::Ident(text.to_string()), at))
            }
            other => Err(Error::syntax(
                at,
                format!("unexpected character `{}`", other as char),
            )),
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.idx].0
    }

    fn offset(&self) -> usize {
        self.toks[self.idx].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.idx].clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<usize> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(Error::syntax(self.offset(), format!("expected {what}")))
        }
    }

    fn parse_expr(&mut self) -> Result<Node> {
        let negated = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let mut lhs = self.parse_term()?;
        if negated {
            lhs = Node::Neg(Box::new(lhs));
        }
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    lhs = Node::Add(Box::new(lhs), Box::new(rhs));
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    lhs = Node::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Node> {
        let mut lhs = self.parse_factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.parse_factor()?;
                    lhs = Node::Mul(Box::new(lhs), Box::new(rhs));
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.parse_factor()?;
                    lhs = Node::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Node> {
        let base = self.parse_atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let neg = if *self.peek() == Tok::Minus {
                self.bump();
                true
            } else {
                false
            };
            let at = self.offset();
            match self.bump().0 {
                Tok::Num(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => {
                    let n = v as i32;
                    Ok(Node::Pow(Box::new(base), if neg { -n } else { n }))
                }
                _ => Err(Error::syntax(at, "expected an integer exponent after `^`")),
            }
        } else {
            Ok(base)
        }
    }

    fn parse_atom(&mut self) -> Result<Node> {
        let at = self.offset();
        match self.bump().0 {
            Tok::Num(v) => Ok(Node::Const(v)),
            Tok::LParen => {
                let e = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => self.parse_named(at, &name),
            _ => Err(Error::syntax(
                at,
                "expected a number, `x`, `pi`, a function call, or `(`",
            )),
        }
    }

    fn parse_named(&mut self, at: usize, name: &str) -> Result<Node> {
        match name {
            "x" => Ok(Node::Var),
            "pi" => Ok(Node::Const(std::f64::consts::PI)),
            "sin" | "cos" | "exp" => {
                self.expect(Tok::LParen, "`(`")?;
                let inner = self.parse_expr()?;
                if *self.peek() == Tok::Comma {
                    return Err(Error::ArityMismatch {
                        offset: self.offset(),
                        name: name.to_string(),
                        message: "takes exactly one argument".into(),
                    });
                }
                self.expect(Tok::RParen, "`)`")?;
                let boxed = Box::new(inner);
                Ok(match name {
                    "sin" => Node::Sin(boxed),
                    "cos" => Node::Cos(boxed),
                    _ => Node::Exp(boxed),
                })
            }
            "bump" => {
                let args = self.parse_param_call(at, name, 2)?;
                Ok(Node::Bump {
                    center: args[0],
                    radius: args[1],
                })
            }
            "plateau" => {
                let args = self.parse_param_call(at, name, 3)?;
                Ok(Node::Plateau {
                    a: args[0],
                    b: args[1],
                    margin: args[2],
                })
            }
            "piecewise" => self.parse_piecewise(),
            other => Err(Error::UnknownIdentifier {
                offset: at,
                name: other.to_string(),
            }),
        }
    }

    /// `name(x; p1, p2, ...)` with exactly `count` numeric parameters.
    fn parse_param_call(&mut self, at: usize, name: &str, count: usize) -> Result<Vec<f64>> {
        self.expect(Tok::LParen, "`(`")?;
        match self.bump() {
            (Tok::Ident(v), _) if v == "x" => {}
            (_, off) => {
                return Err(Error::ArityMismatch {
                    offset: off,
                    name: name.to_string(),
                    message: "first argument must be the variable `x`".into(),
                })
            }
        }
        self.expect(Tok::Semi, "`;`")?;
        let mut args = Vec::with_capacity(count);
        for k in 0..count {
            if k > 0 {
                if *self.peek() != Tok::Comma {
                    return Err(Error::ArityMismatch {
                        offset: self.offset(),
                        name: name.to_string(),
                        message: format!("takes {count} numeric parameters"),
                    });
                }
                self.bump();
            }
            args.push(self.parse_signed_number()?);
        }
        if *self.peek() == Tok::Comma {
            return Err(Error::ArityMismatch {
                offset: self.offset(),
                name: name.to_string(),
                message: format!("takes {count} numeric parameters"),
            });
        }
        self.expect(Tok::RParen, "`)`")
            .map_err(|_| Error::ArityMismatch {
                offset: at,
                name: name.to_string(),
                message: format!("takes {count} numeric parameters"),
            })?;
        Ok(args)
    }

    fn parse_signed_number(&mut self) -> Result<f64> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let at = self.offset();
        match self.bump().0 {
            Tok::Num(v) => Ok(if neg { -v } else { v }),
            _ => Err(Error::syntax(at, "expected a number")),
        }
    }

    fn parse_piecewise(&mut self) -> Result<Node> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut pieces = Vec::new();
        loop {
            self.expect(Tok::LBracket, "`[`")?;
            let start = self.parse_signed_number()?;
            self.expect(Tok::Comma, "`,`")?;
            let end = self.parse_signed_number()?;
            self.expect(Tok::RParen, "`)` to close the half-open interval")?;
            self.expect(Tok::Colon, "`:`")?;
            let body = self.parse_expr()?;
            self.expect(Tok::Semi, "`;`")?;
            pieces.push((PieceArc { start, end }, body));
            if *self.peek() == Tok::RBrace {
                self.bump();
                break;
            }
        }
        pieces.sort_by(|(a, _), (b, _)| a.start.partial_cmp(&b.start).unwrap());
        Ok(Node::Piecewise(pieces))
    }
}

/// Parses DSL source into a validated expression tree.
///
/// ```
/// let f = phaseline::parse("sin(2*pi*x) + 0.5 * bump(x; 0.25, 0.1)").unwrap();
/// assert!((f.eval(0.25) - (1.0 + 0.5 * (-1.0f64).exp())).abs() < 1e-12);
/// assert!(phaseline::parse("sin(2*x").is_err());
/// ```
pub fn parse(source: &str) -> Result<VectorFieldExpr> {
    if source.trim().is_empty() {
        return Err(Error::syntax(0, "empty source"));
    }
    let mut lexer = Lexer::new(source);
    let mut toks = Vec::new();
    loop {
        let (tok, at) = lexer.next()?;
        let done = tok == Tok::Eof;
        toks.push((tok, at));
        if done {
            break;
        }
    }
    let mut parser = Parser { toks, idx: 0 };
    let root = parser.parse_expr()?;
    if *parser.peek() != Tok::Eof {
        return Err(Error::syntax(parser.offset(), "unexpected trailing input"));
    }
    super::validate_structure(&root)?;
    Ok(VectorFieldExpr::from_parse(root, source.to_string()))
}
