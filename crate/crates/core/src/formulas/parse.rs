//! Text grammar for polynomials and conjunctions of (in)equations.
//!
//! ```text
//! conj    := literal ('&' literal)*
//! literal := expr ('=' expr | '!=' expr)?
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := factor ('*' factor)*
//! factor  := INT | IDENT ('^' INT)? | '(' expr ')' ('^' INT)?
//! ```

use super::poly::Poly;
use super::FormulaError;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Eq,
    Neq,
    Amp,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '^' => out.push((start, Tok::Caret)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            '&' => out.push((start, Tok::Amp)),
            '=' => out.push((start, Tok::Eq)),
            '!' => {
                if chars.get(i + 1) != Some(&'=') {
                    return Err(FormulaError::Parse { pos: start, msg: "expected '=' after '!'".into() });
                }
                i += 1;
                out.push((start, Tok::Neq));
            }
            '0'..='9' => {
                let mut v: u64 = 0;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    v = v
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(chars[i] as u64 - '0' as u64))
                        .ok_or(FormulaError::Parse { pos: start, msg: "integer too large".into() })?;
                    i += 1;
                }
                out.push((start, Tok::Int(v)));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    s.push(chars[i]);
                    i += 1;
                }
                out.push((start, Tok::Ident(s)));
                continue;
            }
            other => return Err(FormulaError::Parse { pos: start, msg: format!("unexpected character {other:?}") }),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    p: u32,
    nvars: usize,
    resolve: &'a dyn Fn(&str) -> Option<usize>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Parse { pos: self.here(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Poly, FormulaError> {
        let mut acc = Poly::zero(self.p, self.nvars);
        let mut sign_pending = true;
        loop {
            let mut neg = false;
            while let Some(t) = self.peek() {
                match t {
                    Tok::Plus => {}
                    Tok::Minus => neg = !neg,
                    _ => break,
                }
                self.pos += 1;
                sign_pending = true;
            }
            if !sign_pending {
                break;
            }
            let t = self.term()?;
            acc = if neg { acc.sub(&t) } else { acc.add(&t) };
            sign_pending = matches!(self.peek(), Some(Tok::Plus | Tok::Minus));
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, FormulaError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<u32, FormulaError> {
        if self.peek() != Some(&Tok::Caret) {
            return Ok(1);
        }
        self.pos += 1;
        match self.peek() {
            Some(Tok::Int(v)) if *v <= 4096 => {
                let v = *v as u32;
                self.pos += 1;
                Ok(v)
            }
            _ => self.err("expected a small exponent after '^'"),
        }
    }

    fn factor(&mut self) -> Result<Poly, FormulaError> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(Poly::constant(self.p, self.nvars, (v % self.p as u64) as u32))
            }
            Some(Tok::Ident(name)) => {
                let Some(i) = (self.resolve)(&name) else {
                    return Err(FormulaError::UnknownVariable(name));
                };
                self.pos += 1;
                let e = self.exponent()?;
                Ok(Poly::var(self.p, self.nvars, i).pow(e))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                let e = self.exponent()?;
                Ok(inner.pow(e))
            }
            _ => self.err("expected a number, variable or '('"),
        }
    }
}

/// Parses one polynomial; `resolve` maps variable names to indices below `nvars`.
pub fn parse_poly(
    text: &str,
    p: u32,
    nvars: usize,
    resolve: &dyn Fn(&str) -> Option<usize>,
) -> Result<Poly, FormulaError> {
    let toks = tokenize(text)?;
    let mut ps = Parser { toks, pos: 0, end: text.len(), p, nvars, resolve };
    let out = ps.expr()?;
    if ps.pos != ps.toks.len() {
        return ps.err("trailing input");
    }
    Ok(out)
}

/// A parsed literal: `poly = 0` when `equation`, else `poly != 0`.
pub struct Literal {
    pub poly: Poly,
    pub equation: bool,
}

pub fn parse_literals(
    text: &str,
    p: u32,
    nvars: usize,
    resolve: &dyn Fn(&str) -> Option<usize>,
) -> Result<Vec<Literal>, FormulaError> {
    let toks = tokenize(text)?;
    let mut ps = Parser { toks, pos: 0, end: text.len(), p, nvars, resolve };
    let mut out = Vec::new();
    loop {
        let lhs = ps.expr()?;
        let lit = match ps.peek() {
            Some(Tok::Eq) => {
                ps.pos += 1;
                Literal { poly: lhs.sub(&ps.expr()?), equation: true }
            }
            Some(Tok::Neq) => {
                ps.pos += 1;
                Literal { poly: lhs.sub(&ps.expr()?), equation: false }
            }
            _ => Literal { poly: lhs, equation: true },
        };
        out.push(lit);
        match ps.peek() {
            Some(Tok::Amp) => ps.pos += 1,
            None => break,
            _ => return ps.err("expected '&' or end of input"),
        }
    }
    Ok(out)
}

/// Names of the form `x<i>` / `y<i>` (1-based) occurring in `text`.
pub fn scan_indexed_names(text: &str) -> Result<(usize, usize), FormulaError> {
    let mut nx = 0;
    let mut ny = 0;
    for (_, t) in tokenize(text)? {
        if let Tok::Ident(s) = t {
            match split_indexed(&s) {
                Some(('x', i)) => nx = nx.max(i),
                Some(('y', i)) => ny = ny.max(i),
                _ => return Err(FormulaError::UnknownVariable(s)),
            }
        }
    }
    Ok((nx, ny))
}

pub fn split_indexed(s: &str) -> Option<(char, usize)> {
    let mut cs = s.chars();
    let head = cs.next()?;
    let rest: String = cs.collect();
    if rest.is_empty() || rest.starts_with('0') || !rest.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    Some((head, rest.parse().ok()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy(s: &str) -> Option<usize> {
        match s {
            "X" | "x1" => Some(0),
            "Y" | "x2" => Some(1),
            _ => None,
        }
    }

    #[test]
    fn parses_sums_and_products() {
        let p = parse_poly("x1^2 + x2^2", 5, 2, &xy).unwrap();
        let q = parse_poly("(X+2*Y)*(X+3*Y)", 5, 2, &xy).unwrap();
        assert_eq!(p, q);
        let r = parse_poly("-X - -Y + 7", 5, 2, &xy).unwrap();
        assert_eq!(r, parse_poly("4*X + Y + 2", 5, 2, &xy).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_poly("X + Z", 2, 2, &xy), Err(FormulaError::UnknownVariable(_))));
        assert!(matches!(parse_poly("X +", 2, 2, &xy), Err(FormulaError::Parse { .. })));
        assert!(matches!(parse_poly("X Y", 2, 2, &xy), Err(FormulaError::Parse { .. })));
        assert!(matches!(parse_poly("X ! Y", 2, 2, &xy), Err(FormulaError::Parse { pos: 2, .. })));
    }

    #[test]
    fn literals_split_on_ampersand() {
        let lits = parse_literals("x1*x2 = 1 & x1 != 0 & x2", 2, 2, &xy).unwrap();
        assert_eq!(lits.len(), 3);
        assert!(lits[0].equation && !lits[1].equation && lits[2].equation);
    }

    #[test]
    fn indexed_names() {
        assert_eq!(scan_indexed_names("x1*x3 = y2").unwrap(), (3, 2));
        assert!(scan_indexed_names("z1 = 0").is_err());
        assert!(scan_indexed_names("x0 = 0").is_err());
    }
}
