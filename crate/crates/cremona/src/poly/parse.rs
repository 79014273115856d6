//! Recursive-descent parser and canonical formatter for the ASCII
//! polynomial grammar: integer or `a/b` rational coefficients, variables
//! `z0..zn`, operators `+ - * ^` and parentheses. Whitespace is
//! insignificant.
//!
//! [`parse_fraction`] additionally accepts `/` between arbitrary
//! subexpressions and returns a reduced numerator/denominator pair; that is
//! the entry point for affine-chart map components such as
//! `(z0+1)/(z0-1)`.

use super::{MultiPoly, PolyError};
use crate::field::{FieldDescriptor, FieldElem};
use crate::poly::HomPoly;
use num::bigint::BigInt;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { bytes: text.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<(Tok, usize), PolyError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.bytes.len() {
            return Ok((Tok::End, start));
        }
        let c = self.bytes[self.pos];
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let mut end = self.pos;
                while end < self.bytes.len() && self.bytes[end].is_ascii_digit() {
                    end += 1;
                }
                let digits = std::str::from_utf8(&self.bytes[self.pos..end]).unwrap();
                let v: BigInt = digits.parse().expect("digit run parses");
                self.pos = end;
                return Ok((Tok::Int(v), start));
            }
            b'z' => {
                let mut end = self.pos + 1;
                while end < self.bytes.len() && self.bytes[end].is_ascii_digit() {
                    end += 1;
                }
                if end == self.pos + 1 {
                    return Err(PolyError::Parse {
                        pos: start,
                        msg: "variable name needs an index, e.g. z0".into(),
                    });
                }
                let digits = std::str::from_utf8(&self.bytes[self.pos + 1..end]).unwrap();
                let idx: usize = digits.parse().map_err(|_| PolyError::Parse {
                    pos: start,
                    msg: "variable index out of range".into(),
                })?;
                self.pos = end;
                return Ok((Tok::Var(idx), start));
            }
            other => {
                return Err(PolyError::Parse {
                    pos: start,
                    msg: format!("unexpected character {:?}", other as char),
                });
            }
        };
        self.pos += 1;
        Ok((tok, start))
    }
}

/// A rational expression: numerator and denominator polynomials.
#[derive(Clone)]
struct Frac {
    num: MultiPoly,
    den: MultiPoly,
}

impl Frac {
    fn poly(p: MultiPoly) -> Self {
        let den = MultiPoly::one(p.nvars(), p.field());
        Frac { num: p, den }
    }

    fn add(&self, other: &Frac) -> Frac {
        Frac {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
    }

    fn sub(&self, other: &Frac) -> Frac {
        Frac {
            num: self.num.mul(&other.den).sub(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
    }

    fn mul(&self, other: &Frac) -> Frac {
        Frac { num: self.num.mul(&other.num), den: self.den.mul(&other.den) }
    }

    fn div(&self, other: &Frac, pos: usize) -> Result<Frac, PolyError> {
        if other.num.is_zero() {
            return Err(PolyError::Parse { pos, msg: "division by zero".into() });
        }
        Ok(Frac { num: self.num.mul(&other.den), den: self.den.mul(&other.num) })
    }

    fn neg(&self) -> Frac {
        Frac { num: self.num.neg(), den: self.den.clone() }
    }

    fn pow(&self, e: u32) -> Frac {
        Frac { num: self.num.pow(e), den: self.den.pow(e) }
    }

    fn reduced(self) -> Frac {
        if self.num.is_zero() {
            let den = MultiPoly::one(self.den.nvars(), self.den.field());
            return Frac { num: self.num, den };
        }
        let g = self.num.gcd(&self.den);
        let num = self.num.div_exact(&g).expect("gcd divides");
        let den = self.den.div_exact(&g).expect("gcd divides");
        // normalize so the denominator is graded-lex monic
        let lc = den.leading().expect("nonzero denominator").1.clone();
        let inv = lc.inv().expect("nonzero leading coefficient");
        Frac { num: num.scale(&inv), den: den.scale(&inv) }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    look: (Tok, usize),
    nvars: usize,
    field: FieldDescriptor,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, nvars: usize, field: FieldDescriptor) -> Result<Self, PolyError> {
        let mut lexer = Lexer::new(text);
        let look = lexer.next()?;
        Ok(Parser { lexer, look, nvars, field })
    }

    fn advance(&mut self) -> Result<(Tok, usize), PolyError> {
        let next = self.lexer.next()?;
        Ok(std::mem::replace(&mut self.look, next))
    }

    fn expr(&mut self) -> Result<Frac, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.look.0 {
                Tok::Plus => {
                    self.advance()?;
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.advance()?;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Frac, PolyError> {
        let mut acc = self.unary()?;
        loop {
            match self.look.0 {
                Tok::Star => {
                    self.advance()?;
                    acc = acc.mul(&self.unary()?);
                }
                Tok::Slash => {
                    let (_, pos) = self.advance()?;
                    acc = acc.div(&self.unary()?, pos)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Frac, PolyError> {
        if self.look.0 == Tok::Minus {
            self.advance()?;
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Frac, PolyError> {
        let base = self.atom()?;
        if self.look.0 == Tok::Caret {
            let (_, pos) = self.advance()?;
            match self.advance()? {
                (Tok::Int(e), _) => {
                    let e: u32 = e.try_into().map_err(|_| PolyError::Parse {
                        pos,
                        msg: "exponent too large".into(),
                    })?;
                    // allow chained ^ (right-associative)
                    let mut result = base.pow(e);
                    while self.look.0 == Tok::Caret {
                        let (_, pos2) = self.advance()?;
                        match self.advance()? {
                            (Tok::Int(e2), _) => {
                                let e2: u32 = e2.try_into().map_err(|_| PolyError::Parse {
                                    pos: pos2,
                                    msg: "exponent too large".into(),
                                })?;
                                result = result.pow(e2);
                            }
                            (_, p) => {
                                return Err(PolyError::Parse {
                                    pos: p,
                                    msg: "expected integer exponent after ^".into(),
                                })
                            }
                        }
                    }
                    return Ok(result);
                }
                (_, p) => {
                    return Err(PolyError::Parse {
                        pos: p,
                        msg: "expected integer exponent after ^".into(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Frac, PolyError> {
        match self.advance()? {
            (Tok::Int(v), _) => {
                let c = FieldElem::from_rational(self.field, &num::BigRational::from(v))?;
                Ok(Frac::poly(MultiPoly::constant(self.nvars, c)))
            }
            (Tok::Var(idx), pos) => {
                if idx >= self.nvars {
                    return Err(PolyError::UnknownVariable {
                        index: idx,
                        pos,
                        max: self.nvars - 1,
                    });
                }
                Ok(Frac::poly(MultiPoly::variable(self.nvars, self.field, idx)))
            }
            (Tok::LParen, pos) => {
                let inner = self.expr()?;
                match self.advance()? {
                    (Tok::RParen, _) => Ok(inner),
                    _ => Err(PolyError::Parse { pos, msg: "unclosed parenthesis".into() }),
                }
            }
            (tok, pos) => Err(PolyError::Parse {
                pos,
                msg: format!("unexpected token {tok:?}"),
            }),
        }
    }
}

/// Parses an expression into a reduced numerator/denominator pair.
pub fn parse_fraction(
    text: &str,
    nvars: usize,
    field: FieldDescriptor,
) -> Result<(MultiPoly, MultiPoly), PolyError> {
    let mut p = Parser::new(text, nvars, field)?;
    let frac = p.expr()?;
    match p.advance()? {
        (Tok::End, _) => {}
        (tok, pos) => {
            return Err(PolyError::Parse {
                pos,
                msg: format!("trailing input {tok:?}"),
            })
        }
    }
    let r = frac.reduced();
    Ok((r.num, r.den))
}

/// Parses a homogeneous polynomial; inhomogeneous input and non-constant
/// denominators are rejected.
pub fn parse_poly(
    text: &str,
    nvars: usize,
    field: FieldDescriptor,
) -> Result<HomPoly, PolyError> {
    let (num, den) = parse_fraction(text, nvars, field)?;
    if den.total_degree() != Some(0) {
        return Err(PolyError::Parse {
            pos: 0,
            msg: "polynomial context cannot divide by a non-constant".into(),
        });
    }
    let inv = den
        .leading()
        .expect("nonzero denominator")
        .1
        .inv()
        .expect("nonzero constant");
    HomPoly::from_multi(num.scale(&inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample_nonzero;
    use crate::poly::Monomial;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const Q: FieldDescriptor = FieldDescriptor::Rationals;

    #[test]
    fn quadratic_parses() {
        let p = parse_poly("z0^2 - 2*z1*z2", 3, Q).unwrap();
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.format(), "z0^2 - 2*z1*z2");
    }

    #[test]
    fn inhomogeneous_rejected() {
        assert!(matches!(
            parse_poly("z0 + z1^2", 2, Q),
            Err(PolyError::Inhomogeneous(_, _))
        ));
    }

    #[test]
    fn rational_coefficient() {
        let p = parse_poly("3/2*z0*z1", 2, Q).unwrap();
        let m = Monomial::new(vec![1, 1]);
        assert_eq!(
            p.as_multi().coefficient(&m),
            Some(&FieldElem::from_fraction(Q, 3, 2).unwrap())
        );
    }

    #[test]
    fn unknown_variable_with_position() {
        match parse_poly("z0 + z5", 2, Q) {
            Err(PolyError::UnknownVariable { index: 5, pos: 5, max: 1 }) => {}
            other => panic!("expected unknown-variable error, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_position() {
        match parse_poly("z0 + ", 2, Q) {
            Err(PolyError::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn fraction_components() {
        let (num, den) = parse_fraction("(z0+1)/(z0-1)", 1, Q).unwrap();
        assert_eq!(num.format(), "z0 + 1");
        assert_eq!(den.format(), "z0 - 1");
        // reduction happens
        let (num, den) = parse_fraction("(z0*z1)/(z1*z1)", 2, Q).unwrap();
        assert_eq!(num.format(), "z0");
        assert_eq!(den.format(), "z1");
    }

    #[test]
    fn leading_minus_and_parens() {
        let p = parse_poly("-z0 + (z1 - -z2)", 3, Q).unwrap();
        assert_eq!(p.format(), "-z0 + z1 + z2");
    }

    #[test]
    fn format_parse_round_trip_random() {
        let gf = FieldDescriptor::prime_field(11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for field in [Q, gf] {
            for _ in 0..50 {
                let deg = rng.gen_range(1..=4u32);
                let mut p = MultiPoly::zero(3, field);
                for _ in 0..rng.gen_range(1..=5) {
                    let mut exps = vec![0u32; 3];
                    let mut left = deg;
                    for e in exps.iter_mut() {
                        *e = rng.gen_range(0..=left);
                        left -= *e;
                    }
                    exps[2] += left;
                    p.add_term(Monomial::new(exps), sample_nonzero(field, &mut rng));
                }
                let hom = HomPoly::from_multi(p).unwrap();
                let text = hom.format();
                let back = parse_poly(&text, 3, field).unwrap();
                assert_eq!(back, hom, "round trip through {text:?}");
            }
        }
    }
}
