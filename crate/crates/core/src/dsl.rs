//! Text front end: the space language and group notation.
//!
//! Space grammar (whitespace between tokens is ignored, integers are decimal):
//!
//! ```text
//! expr := "sum(" expr ("," expr)+ ")" | "alex(" expr ")" | atom
//! atom := base ("\" INT)?
//! base := "point" | "points(" INT ")" | "ball(" INT ")" | "euclid(" INT ")"
//!       | "sphere(" INT ")" | "spheres(" INT ("," INT)* ")"
//!       | "surface(" INT ")" | "mobius" | "klein_open" | "rp2"
//!       | "wedge(" INT ("," INT)* ")" | "chain(" INT ("," INT)* ")"
//!       | "graph(s=" INT ",v=" INT ",e=" INT ")"
//!       | "ball_minus_graph(n=" INT ",s=" INT ",v=" INT ",e=" INT ")"
//!       | "sphere_minus_sphere(" INT "," INT ")" | "ball_minus_sphere(" INT "," INT ")"
//!       | "identify_spheres(dims=[" INT ("," INT)* "],gamma=[" INT ("," INT)* "])"
//! ```
//!
//! Group notation: `0`, `Z`, `Z^r`, `Z/d` joined by `+`.

use std::fmt;

use thiserror::Error;

use crate::abelian::ConcreteGroup;
use crate::spaces::SpaceExpr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Punct(u8),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Punct(c) => write!(f, "`{}`", *c as char),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const PUNCT: &[u8] = b"(),\\=[]+^/";

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Returns the next token and its starting offset.
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let Some(&c) = self.src.get(start) else {
            return Ok((Tok::Eof, start));
        };
        if c.is_ascii_digit() {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
            return text.parse::<u64>().map(|n| (Tok::Int(n), start)).map_err(|_| ParseError {
                offset: start,
                expected: "an integer that fits in 64 bits".into(),
                found: format!("`{text}`"),
            });
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii ident");
            return Ok((Tok::Ident(text.to_string()), start));
        }
        if PUNCT.contains(&c) {
            self.pos += 1;
            return Ok((Tok::Punct(c), start));
        }
        Err(ParseError { offset: start, expected: "a token".into(), found: describe_byte(&self.src[start..]) })
    }
}

fn describe_byte(rest: &[u8]) -> String {
    let end = rest.len().min(4);
    match std::str::from_utf8(&rest[..end]).ok().or_else(|| {
        // the first complete UTF-8 scalar, if any
        (1..end).rev().find_map(|n| std::str::from_utf8(&rest[..n]).ok())
    }) {
        Some(s) if !s.is_empty() => format!("{:?}", s.chars().next().unwrap()),
        _ => format!("byte 0x{:02x}", rest[0]),
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    at: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a [u8]) -> Result<Self, ParseError> {
        let mut lexer = Lexer { src, pos: 0 };
        let (tok, at) = lexer.next()?;
        Ok(Parser { lexer, tok, at })
    }

    fn bump(&mut self) -> Result<Tok, ParseError> {
        let (next, at) = self.lexer.next()?;
        self.at = at;
        Ok(std::mem::replace(&mut self.tok, next))
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        ParseError { offset: self.at, expected: expected.into(), found: self.tok.to_string() }
    }

    fn eat(&mut self, c: u8) -> Result<bool, ParseError> {
        if self.tok == Tok::Punct(c) {
            self.bump()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c)? {
            Ok(())
        } else {
            Err(self.error(format!("`{}`", c as char)))
        }
    }

    fn int(&mut self) -> Result<u64, ParseError> {
        match self.tok {
            Tok::Int(n) => {
                self.bump()?;
                Ok(n)
            }
            _ => Err(self.error("an integer")),
        }
    }

    fn keyword(&mut self, name: &str) -> Result<(), ParseError> {
        match &self.tok {
            Tok::Ident(s) if s == name => {
                self.bump()?;
                Ok(())
            }
            _ => Err(self.error(format!("`{name}`"))),
        }
    }

    /// `name = INT`
    fn named_int(&mut self, name: &str) -> Result<u64, ParseError> {
        self.keyword(name)?;
        self.expect(b'=')?;
        self.int()
    }

    /// `INT ("," INT)*` up to (not including) `close`.
    fn int_list(&mut self, close: u8) -> Result<Vec<u64>, ParseError> {
        let mut out = vec![self.int()?];
        while self.eat(b',')? {
            out.push(self.int()?);
        }
        if self.tok != Tok::Punct(close) {
            return Err(self.error(format!("`,` or `{}`", close as char)));
        }
        Ok(out)
    }

    fn paren_int(&mut self) -> Result<u64, ParseError> {
        self.expect(b'(')?;
        let n = self.int()?;
        self.expect(b')')?;
        Ok(n)
    }

    fn paren_list(&mut self) -> Result<Vec<u64>, ParseError> {
        self.expect(b'(')?;
        let v = self.int_list(b')')?;
        self.expect(b')')?;
        Ok(v)
    }

    fn expr(&mut self) -> Result<SpaceExpr, ParseError> {
        let name = match &self.tok {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.error("a space constructor")),
        };
        match name.as_str() {
            "sum" => {
                self.bump()?;
                self.expect(b'(')?;
                let mut children = vec![self.expr()?];
                self.expect(b',')?;
                children.push(self.expr()?);
                while self.eat(b',')? {
                    children.push(self.expr()?);
                }
                if self.tok != Tok::Punct(b')') {
                    return Err(self.error("`,` or `)`"));
                }
                self.bump()?;
                Ok(SpaceExpr::Sum(children))
            }
            "alex" => {
                self.bump()?;
                self.expect(b'(')?;
                let child = self.expr()?;
                self.expect(b')')?;
                Ok(SpaceExpr::alexandroff(child))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<SpaceExpr, ParseError> {
        let base = self.base()?;
        if self.eat(b'\\')? {
            let k = self.int()?;
            return Ok(SpaceExpr::minus_points(base, k));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<SpaceExpr, ParseError> {
        let name = match &self.tok {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.error("a space constructor")),
        };
        let x = match name.as_str() {
            "point" => {
                self.bump()?;
                SpaceExpr::Point
            }
            "mobius" => {
                self.bump()?;
                SpaceExpr::Mobius
            }
            "klein_open" => {
                self.bump()?;
                SpaceExpr::KleinOpen
            }
            "rp2" => {
                self.bump()?;
                SpaceExpr::Projective2
            }
            "points" => {
                self.bump()?;
                SpaceExpr::FiniteSet(self.paren_int()?)
            }
            "ball" => {
                self.bump()?;
                SpaceExpr::Ball(self.paren_int()?)
            }
            "euclid" => {
                self.bump()?;
                SpaceExpr::Euclid(self.paren_int()?)
            }
            "sphere" => {
                self.bump()?;
                SpaceExpr::Sphere(self.paren_int()?)
            }
            "surface" => {
                self.bump()?;
                SpaceExpr::Surface(self.paren_int()?)
            }
            "spheres" => {
                self.bump()?;
                SpaceExpr::ProductOfSpheres(self.paren_list()?)
            }
            "wedge" => {
                self.bump()?;
                SpaceExpr::WedgeOfSpheres(self.paren_list()?)
            }
            "chain" => {
                self.bump()?;
                SpaceExpr::ChainOfSpheres(self.paren_list()?)
            }
            "graph" => {
                self.bump()?;
                self.expect(b'(')?;
                let s = self.named_int("s")?;
                self.expect(b',')?;
                let vertices = self.named_int("v")?;
                self.expect(b',')?;
                let chords = self.named_int("e")?;
                self.expect(b')')?;
                SpaceExpr::Graph { s, vertices, chords }
            }
            "ball_minus_graph" => {
                self.bump()?;
                self.expect(b'(')?;
                let n = self.named_int("n")?;
                self.expect(b',')?;
                let s = self.named_int("s")?;
                self.expect(b',')?;
                let vertices = self.named_int("v")?;
                self.expect(b',')?;
                let chords = self.named_int("e")?;
                self.expect(b')')?;
                SpaceExpr::BallMinusGraph { n, s, vertices, chords }
            }
            "sphere_minus_sphere" | "ball_minus_sphere" => {
                self.bump()?;
                self.expect(b'(')?;
                let n = self.int()?;
                self.expect(b',')?;
                let m = self.int()?;
                self.expect(b')')?;
                if name == "sphere_minus_sphere" {
                    SpaceExpr::SphereMinusSphere { n, m }
                } else {
                    SpaceExpr::BallMinusSphere { n, m }
                }
            }
            "identify_spheres" => {
                self.bump()?;
                self.expect(b'(')?;
                self.keyword("dims")?;
                self.expect(b'=')?;
                self.expect(b'[')?;
                let dims = self.int_list(b']')?;
                self.expect(b']')?;
                self.expect(b',')?;
                self.keyword("gamma")?;
                self.expect(b'=')?;
                self.expect(b'[')?;
                let gammas = self.int_list(b']')?;
                self.expect(b']')?;
                self.expect(b')')?;
                SpaceExpr::IdentifiedSpheres { dims, gammas }
            }
            _ => return Err(self.error("a space constructor")),
        };
        Ok(x)
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.tok == Tok::Eof {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    fn group(&mut self) -> Result<ConcreteGroup, ParseError> {
        let mut rank = 0u64;
        let mut torsion = Vec::new();
        loop {
            match &self.tok {
                Tok::Int(0) => {
                    self.bump()?;
                }
                Tok::Ident(s) if s == "Z" => {
                    self.bump()?;
                    if self.eat(b'^')? {
                        let at = self.at;
                        let r = self.int()?;
                        rank = rank.checked_add(r).ok_or_else(|| ParseError {
                            offset: at,
                            expected: "a smaller rank".into(),
                            found: format!("`{r}`"),
                        })?;
                    } else if self.eat(b'/')? {
                        let at = self.at;
                        let d = self.int()?;
                        if d < 2 {
                            return Err(ParseError {
                                offset: at,
                                expected: "a cyclic order ≥ 2".into(),
                                found: format!("`{d}`"),
                            });
                        }
                        torsion.push(d);
                    } else {
                        rank = rank.checked_add(1).ok_or_else(|| self.error("a smaller rank"))?;
                    }
                }
                _ => return Err(self.error("`0`, `Z`, `Z^r` or `Z/d`")),
            }
            if !self.eat(b'+')? {
                break;
            }
        }
        self.finish()?;
        ConcreteGroup::new(rank, &torsion).map_err(|e| ParseError {
            offset: 0,
            expected: "a representable group".into(),
            found: e.to_string(),
        })
    }
}

/// Parses a space description. Validation is separate ([`crate::spaces::validate`]).
pub fn parse(text: &str) -> Result<SpaceExpr, ParseError> {
    parse_bytes(text.as_bytes())
}

/// As [`parse`], over arbitrary bytes; non-ASCII input is a positioned error.
pub fn parse_bytes(src: &[u8]) -> Result<SpaceExpr, ParseError> {
    let mut p = Parser::new(src)?;
    let x = p.expr()?;
    p.finish()?;
    Ok(x)
}

/// Parses group notation into normalized invariant-factor form.
pub fn parse_group(text: &str) -> Result<ConcreteGroup, ParseError> {
    Parser::new(text.as_bytes())?.group()
}
