//! Integer polynomials: `+ - * ^`, parentheses, integer literals and single-letter
//! variables. Juxtaposition is rejected, so `2x` must be written `2*x`.

use std::collections::BTreeMap;

use crate::families::genus4::cubic_monomials;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at position {position}: {message}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

/// Exponent vector to coefficient, zero terms removed.
pub type Sparse = BTreeMap<Vec<u32>, i64>;

const MAX_EXPONENT: u32 = 64;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [char],
}

fn err(position: usize, message: impl Into<String>) -> ParseError {
    ParseError { position, message: message.into() }
}

fn add(a: &Sparse, b: &Sparse, pos: usize) -> Result<Sparse, ParseError> {
    let mut out = a.clone();
    for (m, &c) in b {
        let e = out.entry(m.clone()).or_insert(0);
        *e = e.checked_add(c).ok_or_else(|| err(pos, "coefficient overflow"))?;
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

fn mul(a: &Sparse, b: &Sparse, pos: usize) -> Result<Sparse, ParseError> {
    let mut out = Sparse::new();
    for (ma, &ca) in a {
        for (mb, &cb) in b {
            let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            if m.iter().any(|&e| e > MAX_EXPONENT) {
                return Err(err(pos, format!("degree above {MAX_EXPONENT}")));
            }
            let c = ca.checked_mul(cb).ok_or_else(|| err(pos, "coefficient overflow"))?;
            let e = out.entry(m).or_insert(0);
            *e = e.checked_add(c).ok_or_else(|| err(pos, "coefficient overflow"))?;
        }
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

fn neg(a: &Sparse, pos: usize) -> Result<Sparse, ParseError> {
    a.iter()
        .map(|(m, &c)| c.checked_neg().map(|c| (m.clone(), c)).ok_or_else(|| err(pos, "coefficient overflow")))
        .collect()
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn constant(&self, c: i64) -> Sparse {
        let mut s = Sparse::new();
        if c != 0 {
            s.insert(vec![0; self.vars.len()], c);
        }
        s
    }

    fn expr(&mut self) -> Result<Sparse, ParseError> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let t = self.term()?;
            acc = if op == b'+' { add(&acc, &t, at)? } else { add(&acc, &neg(&t, at)?, at)? };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Sparse, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            let at = self.pos;
            self.pos += 1;
            let f = self.factor()?;
            acc = mul(&acc, &f, at)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Sparse, ParseError> {
        match self.peek() {
            Some(b'-') => {
                let at = self.pos;
                self.pos += 1;
                let f = self.factor()?;
                neg(&f, at)
            }
            Some(b'+') => {
                self.pos += 1;
                self.factor()
            }
            _ => {
                let b = self.base()?;
                if self.peek() == Some(b'^') {
                    let at = self.pos;
                    self.pos += 1;
                    let e = self.uint()?;
                    if e > MAX_EXPONENT as u64 {
                        return Err(err(at + 1, format!("exponent above {MAX_EXPONENT}")));
                    }
                    let mut acc = self.constant(1);
                    for _ in 0..e {
                        acc = mul(&acc, &b, at)?;
                    }
                    Ok(acc)
                } else {
                    Ok(b)
                }
            }
        }
    }

    fn uint(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(err(start, "expected a non-negative integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| err(start, "integer too large"))
    }

    fn base(&mut self) -> Result<Sparse, ParseError> {
        let at = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(err(self.pos, "expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.uint()?;
                let v = i64::try_from(v).map_err(|_| err(at, "integer too large"))?;
                Ok(self.constant(v))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let Some(i) = self.vars.iter().position(|&v| v as u8 == c) else {
                    let allowed: String = self.vars.iter().collect();
                    return Err(err(self.pos, format!("unknown variable '{}', expected one of {allowed}", c as char)));
                };
                self.pos += 1;
                let mut m = vec![0; self.vars.len()];
                m[i] = 1;
                Ok(Sparse::from([(m, 1)]))
            }
            Some(c) => Err(err(self.pos, format!("unexpected '{}'", c as char))),
            None => Err(err(self.pos, "unexpected end of input")),
        }
    }
}

/// Parses a polynomial in the given variables.
pub fn parse_polynomial(src: &str, vars: &[char]) -> Result<Sparse, ParseError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, vars };
    let out = p.expr()?;
    if let Some(c) = p.peek() {
        let msg = if c.is_ascii_alphanumeric() || c == b'(' {
            format!("unexpected '{}': write products with '*'", c as char)
        } else {
            format!("unexpected '{}'", c as char)
        };
        return Err(err(p.pos, msg));
    }
    Ok(out)
}

/// A polynomial in `x`, coefficients low to high.
pub fn parse_univariate(src: &str) -> Result<Vec<i64>, ParseError> {
    let s = parse_polynomial(src, &['x'])?;
    let deg = s.keys().map(|m| m[0]).max().unwrap_or(0) as usize;
    let mut out = vec![0i64; deg + 1];
    for (m, c) in s {
        out[m[0] as usize] = c;
    }
    Ok(out)
}

/// A homogeneous cubic in `X, Y, Z, W`, as 20 coefficients in monomial order.
pub fn parse_cubic_form(src: &str) -> Result<Vec<i64>, ParseError> {
    let s = parse_polynomial(src, &['X', 'Y', 'Z', 'W'])?;
    if let Some(m) = s.keys().find(|m| m.iter().sum::<u32>() != 3) {
        return Err(err(0, format!("not a homogeneous cubic: term of degree {}", m.iter().sum::<u32>())));
    }
    Ok(cubic_monomials().iter().map(|m| s.get(&m.to_vec()).copied().unwrap_or(0)).collect())
}

/// Renders integer coefficients (low to high) in the input grammar.
pub fn format_univariate(c: &[i64]) -> String {
    let mut out = String::new();
    for (i, &a) in c.iter().enumerate().rev() {
        if a == 0 {
            continue;
        }
        let sign = if a < 0 { "-" } else { "+" };
        if out.is_empty() {
            if a < 0 {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let m = a.unsigned_abs();
        let mono = match i {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        };
        match (m, i) {
            (_, 0) => out.push_str(&m.to_string()),
            (1, _) => out.push_str(&mono),
            _ => out.push_str(&format!("{m}*{mono}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
