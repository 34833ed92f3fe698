//! Recursive-descent parser for rational-function text such as `"(z^2 - 1)/(z - 1/2*i)"`.

use num_traits::Zero;

use super::{GaussRat, RatFunc};
use crate::error::Error;

/// Parse `text` as a rational function in the variable `var` (e.g. `"z"` or `"u"`).
///
/// Accepted syntax: integers, `i`, the variable, `+ - * /`, `^` with an integer
/// exponent, and parentheses. Errors report a 1-based column.
pub fn parse_ratfunc(text: &str, var: &str) -> Result<RatFunc, Error> {
    let mut p = Parser { src: text, pos: 0, var };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    var: &'a str,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        let found = self.src[self.pos..].chars().next().map_or("end of input".to_string(), |c| format!("{c:?}"));
        Error::Parse {
            location: format!("column {}", self.pos + 1),
            message: format!("{msg} (found {found}) in {:?}", self.src),
        }
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().unwrap().len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RatFunc, Error> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc, Error> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let at = self.pos;
                let d = self.unary()?;
                if d.is_zero() {
                    self.pos = at;
                    return Err(self.error("division by zero"));
                }
                acc = &acc / &d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc, Error> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc, Error> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            self.skip_ws();
            let start = self.pos;
            let digits = self.src[start..].chars().take_while(|c| c.is_ascii_digit()).count();
            if digits == 0 {
                return Err(self.error("expected integer exponent"));
            }
            let e: i64 = self.src[start..start + digits].parse().map_err(|_| self.error("exponent too large"))?;
            self.pos += digits;
            let e = if neg { -e } else { e };
            return base.powi(e).map_err(|_| self.error("zero raised to a negative power"));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc, Error> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let digits = self.src[start..].chars().take_while(|c| c.is_ascii_digit()).count();
                self.pos += digits;
                let n: num_bigint::BigInt = self.src[start..self.pos].parse().expect("digits");
                Ok(RatFunc::constant(GaussRat::from(num_rational::BigRational::from_integer(n))))
            }
            Some(c) if c.is_alphabetic() => {
                let start = self.pos;
                let len: usize = self.src[start..].chars().take_while(|c| c.is_alphanumeric() || *c == '_').map(char::len_utf8).sum();
                let ident = &self.src[start..start + len];
                if ident == self.var {
                    self.pos += len;
                    Ok(RatFunc::var())
                } else if ident == "i" {
                    self.pos += len;
                    Ok(RatFunc::constant(GaussRat::i()))
                } else {
                    Err(self.error(&format!("unknown identifier (expected {:?} or \"i\")", self.var)))
                }
            }
            _ => Err(self.error("expected a number, variable or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Poly;

    #[test]
    fn parses_rational_functions() {
        let f = parse_ratfunc("(z^2 - 1)/(z - 1)", "z").unwrap();
        assert_eq!(f, parse_ratfunc("z + 1", "z").unwrap());
        let g = parse_ratfunc("1/u - 3/4*i*u^-2", "u").unwrap();
        assert_eq!(g.valuation(), Some(-2));
        assert_eq!(parse_ratfunc("-1/2", "z").unwrap(), RatFunc::constant(GaussRat::ratio(-1, 2)));
        assert_eq!(parse_ratfunc("2*z+2", "z").unwrap().num(), &Poly::new(vec![GaussRat::from_int(2); 2]));
    }

    #[test]
    fn malformed_input_has_location() {
        match parse_ratfunc("3//4", "z") {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "column 3"),
            other => panic!("{other:?}"),
        }
        assert!(parse_ratfunc("z + w", "z").is_err());
        assert!(parse_ratfunc("1/(z-z)", "z").is_err());
        assert!(parse_ratfunc("(z", "z").is_err());
    }

    #[test]
    fn display_roundtrip() {
        for s in ["(z^2 + (1+i)*z - 3/2)/(z^3 - 2*i)", "-z/(z - 1)", "3/(z + 1)", "i*z^4"] {
            let f = parse_ratfunc(s, "z").unwrap();
            assert_eq!(parse_ratfunc(&f.display_in("z"), "z").unwrap(), f, "{s}");
        }
    }
}
