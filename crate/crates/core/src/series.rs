//! Truncated power series in `b` with explicit precision.

use std::fmt;

use crate::error::{AbError, Result};
use crate::scalar::Scalar;

/// b-adic order of a truncated series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(usize),
    /// Every stored coefficient vanishes: the valuation is at least this.
    AtLeast(usize),
}

impl Valuation {
    /// The finite value, or the lower bound for `AtLeast`.
    pub fn bound(self) -> usize {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, "≥{v}"),
        }
    }
}

/// `Σ coeffs[k]·b^k + O(b^W)` with `W = coeffs.len()`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Series {
    coeffs: Vec<Scalar>,
}

impl Series {
    pub fn zero(prec: usize) -> Self {
        Series { coeffs: vec![Scalar::zero(); prec] }
    }

    pub fn one(prec: usize) -> Self {
        Series::constant(Scalar::one(), prec)
    }

    pub fn constant(c: Scalar, prec: usize) -> Self {
        let mut s = Series::zero(prec);
        if prec > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    /// `c·b^k + O(b^prec)`.
    pub fn monomial(c: Scalar, k: usize, prec: usize) -> Self {
        let mut s = Series::zero(prec);
        if k < prec {
            s.coeffs[k] = c;
        }
        s
    }

    /// Build from a coefficient list, truncating or zero-padding to `prec`.
    pub fn from_coeffs(mut coeffs: Vec<Scalar>, prec: usize) -> Self {
        coeffs.resize(prec, Scalar::zero());
        Series { coeffs }
    }

    pub fn from_ints(coeffs: &[i64], prec: usize) -> Self {
        Series::from_coeffs(coeffs.iter().map(|&c| Scalar::from_int(c)).collect(), prec)
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.coeffs
    }

    /// Coefficient of `b^k`; zero beyond the stored range is *not* implied,
    /// so callers must stay below the precision.
    pub fn coeff(&self, k: usize) -> &Scalar {
        &self.coeffs[k]
    }

    pub fn coeff_mut(&mut self, k: usize) -> &mut Scalar {
        &mut self.coeffs[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn valuation(&self) -> Valuation {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(v) => Valuation::Finite(v),
            None => Valuation::AtLeast(self.coeffs.len()),
        }
    }

    /// Lower the precision to `prec` (no-op if already lower).
    pub fn truncate(&self, prec: usize) -> Self {
        let n = prec.min(self.coeffs.len());
        Series { coeffs: self.coeffs[..n].to_vec() }
    }

    pub fn truncate_in_place(&mut self, prec: usize) {
        self.coeffs.truncate(prec);
    }

    /// Re-declare the precision, padding with zeros. Only valid when the
    /// series is known to be an exact polynomial.
    pub fn with_precision(&self, prec: usize) -> Self {
        Series::from_coeffs(self.coeffs.clone(), prec)
    }

    pub fn add(&self, o: &Series) -> Series {
        let n = self.precision().min(o.precision());
        Series { coeffs: (0..n).map(|k| &self.coeffs[k] + &o.coeffs[k]).collect() }
    }

    pub fn sub(&self, o: &Series) -> Series {
        let n = self.precision().min(o.precision());
        Series { coeffs: (0..n).map(|k| &self.coeffs[k] - &o.coeffs[k]).collect() }
    }

    pub fn neg(&self) -> Series {
        Series { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// In-place `self += o`, result precision is the minimum.
    pub fn add_assign(&mut self, o: &Series) {
        self.coeffs.truncate(o.precision());
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a += b;
        }
    }

    pub fn sub_assign(&mut self, o: &Series) {
        self.coeffs.truncate(o.precision());
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a -= b;
        }
    }

    /// Cauchy product at precision `min(prec(s), prec(t))`.
    pub fn mul(&self, o: &Series) -> Series {
        let n = self.precision().min(o.precision());
        let mut out = vec![Scalar::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n - i) {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        Series { coeffs: out }
    }

    pub fn scale(&self, c: &Scalar) -> Series {
        if c.is_one() {
            return self.clone();
        }
        Series { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Multiply by `b^k`; the precision grows by `k`.
    pub fn shift_up(&self, k: usize) -> Series {
        let mut coeffs = vec![Scalar::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Series { coeffs }
    }

    /// Divide by `b^k`, provided the first `k` coefficients vanish.
    pub fn shift_down(&self, k: usize) -> Option<Series> {
        if k > self.coeffs.len() || !self.coeffs[..k].iter().all(Scalar::is_zero) {
            return None;
        }
        Some(Series { coeffs: self.coeffs[k..].to_vec() })
    }

    /// Multiplicative inverse; fails with `NotAUnit` when `s(0) = 0`.
    pub fn invert(&self) -> Result<Series> {
        let n = self.precision();
        if n == 0 {
            return Ok(Series::zero(0));
        }
        let c0inv = self.coeffs[0].inv().ok_or(AbError::NotAUnit)?;
        let mut out: Vec<Scalar> = Vec::with_capacity(n);
        out.push(c0inv.clone());
        for k in 1..n {
            let mut acc = Scalar::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() && !out[k - j].is_zero() {
                    acc += &(&self.coeffs[j] * &out[k - j]);
                }
            }
            out.push(-(&acc * &c0inv));
        }
        Ok(Series { coeffs: out })
    }

    /// Formal `d/db`; the precision drops by one.
    pub fn derivative(&self) -> Series {
        let n = self.precision();
        if n == 0 {
            return Series::zero(0);
        }
        Series {
            coeffs: (1..n).map(|k| self.coeffs[k].scale_int(k as i64)).collect(),
        }
    }

    /// `b·s′(b)` at the original precision (exact: the lost order is restored
    /// by the factor `b`).
    pub fn b_derivative(&self) -> Series {
        Series {
            coeffs: self.coeffs.iter().enumerate().map(|(k, c)| c.scale_int(k as i64)).collect(),
        }
    }

    /// `s(−b)`.
    pub fn negate_variable(&self) -> Series {
        Series {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }

    /// Render in the series grammar, e.g. `(1/2)*b + (3+2*i)*b^2`.
    pub fn to_expr(&self) -> String {
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (neg, mag) = if c.is_real() && c.re() < &num_rational::BigRational::from_integer(0.into()) {
                (true, -c)
            } else {
                (false, c.clone())
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let txt = mag.to_string();
            let body = match k {
                0 => txt,
                _ => {
                    let mono = if k == 1 { "b".to_string() } else { format!("b^{k}") };
                    if mag.is_one() {
                        mono
                    } else if mag.is_real() && !mag.is_integer() {
                        format!("({txt})*{mono}")
                    } else {
                        format!("{txt}*{mono}")
                    }
                }
            };
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(b^{})", self.to_expr(), self.precision())
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parse an expression of the series grammar into a series of precision `prec`.
///
/// Accepted: sums and differences of products of rational numbers `p` or
/// `p/q`, the unit `i`, powers `b` / `b^k`, and parenthesised subexpressions.
/// Errors carry a 1-based column on line 1; callers remap the line.
pub fn parse_series(text: &str, prec: usize) -> Result<Series> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos < p.s.len() {
        return Err(p.err("unexpected character"));
    }
    Ok(Series::from_coeffs(poly, prec))
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

type Poly = Vec<Scalar>;

fn poly_add(a: &Poly, b: &Poly, sign: bool) -> Poly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| {
            let x = a.get(k).cloned().unwrap_or_default();
            match b.get(k) {
                Some(y) if sign => x - y,
                Some(y) => x + y,
                None => x,
            }
        })
        .collect()
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Scalar::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += &(x * y);
        }
    }
    out
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> AbError {
        AbError::ParseError { line: 1, col: self.pos + 1, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut negate_first = false;
        match self.peek() {
            Some(b'-') => {
                negate_first = true;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?;
        if negate_first {
            acc = acc.iter().map(|c| -c).collect();
        }
        loop {
            match self.peek() {
                Some(op @ (b'+' | b'-')) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = poly_add(&acc, &t, op == b'-');
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = poly_mul(&acc, &f);
        }
        Ok(acc)
    }

    fn number(&mut self) -> Result<num_bigint::BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        Ok(txt.parse().expect("digit string"))
    }

    fn factor(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.number()?;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let den = self.number()?;
                    if den == 0.into() {
                        return Err(self.err("zero denominator"));
                    }
                    let r = num_rational::BigRational::new(num, den);
                    Ok(vec![Scalar::from_real(r)])
                } else {
                    Ok(vec![Scalar::from_real(num_rational::BigRational::from_integer(num))])
                }
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(vec![Scalar::i()])
            }
            Some(b'b') => {
                self.pos += 1;
                let mut k = 1usize;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let n = self.number()?;
                    k = n
                        .try_into()
                        .ok()
                        .filter(|&k: &usize| k <= 1 << 16)
                        .ok_or_else(|| self.err("exponent too large"))?;
                }
                let mut p = vec![Scalar::zero(); k + 1];
                p[k] = Scalar::one();
                Ok(p)
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                let f = self.factor()?;
                Ok(f.iter().map(|c| -c).collect())
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
