//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := ('-' | '+') unary | power
//! power    := primary ('^' exponent)?
//! exponent := sign? INT | '(' sign? INT ')'
//! primary  := NUMBER | IDENT | FUNC '(' expr ')' | '(' expr ')'
//! ```

use super::{Expr, Func};
use crate::{Error, Result};

/// Parse `text` with identifiers resolved against `coords` (slot = position).
pub fn parse(text: &str, coords: &[String]) -> Result<Expr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        coords,
    };
    p.skip_ws();
    if p.pos >= p.src.len() {
        return Err(Error::Syntax {
            offset: p.pos,
            message: "empty expression".into(),
        });
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected character `{}`", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    coords: &'a [String],
}

impl Parser<'_> {
    fn error(&self, message: String) -> Error {
        Error::Syntax {
            offset: self.pos,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::node(super::Node::Add(lhs, self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::node(super::Node::Sub(lhs, self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::node(super::Node::Mul(lhs, self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::node(super::Node::Div(lhs, self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            let inner = self.unary()?;
            return Ok(Expr::node(super::Node::Neg(inner)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let k = if self.eat(b'(') {
                let k = self.integer()?;
                self.expect(b')')?;
                k
            } else {
                self.integer()?
            };
            return Ok(Expr::node(super::Node::Pow(base, k)));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i32> {
        let negative = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer exponent".into()));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let k: i32 = digits.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: "exponent out of range".into(),
        })?;
        Ok(if negative { -k } else { k })
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input".into())),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(c) => Err(self.error(format!("unexpected character `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            digits(self);
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if exp_start == self.pos {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
        text.parse::<f64>().map(Expr::num).map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })
    }

    fn identifier(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
        if let Some(slot) = self.coords.iter().position(|c| c == name) {
            return Ok(Expr::var(slot));
        }
        if let Some(f) = Func::from_name(name) {
            if self.peek() != Some(b'(') {
                return Err(self.error(format!("expected `(` after `{name}`")));
            }
            self.pos += 1;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(Expr::node(super::Node::Call(f, arg)));
        }
        Err(Error::UnknownIdentifier {
            name: name.to_string(),
            offset: start,
        })
    }
}
