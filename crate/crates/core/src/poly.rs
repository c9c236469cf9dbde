//! Sparse bivariate polynomials in `X`, `Y`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Field;
use crate::series::TruncatedSeries;

#[derive(Clone, PartialEq, Debug)]
pub struct BivariatePoly<S> {
    // (a, b) -> coefficient of X^a Y^b; never stores zeros
    terms: BTreeMap<(u32, u32), S>,
}

impl<S: Field> Default for BivariatePoly<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Field> BivariatePoly<S> {
    pub fn zero() -> Self {
        BivariatePoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: S) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    pub fn x() -> Self {
        Self::monomial(S::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(S::one(), 0, 1)
    }

    pub fn monomial(c: S, a: u32, b: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), S)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for ((a, b), c) in terms {
            p.add_term(a, b, c);
        }
        p
    }

    fn add_term(&mut self, a: u32, b: u32, c: S) {
        if c.is_zero() {
            return;
        }
        let key = (a, b);
        let sum = match self.terms.remove(&key) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &S)> + '_ {
        self.terms.iter().map(|(&(a, b), c)| (a, b, c))
    }

    pub fn coeff(&self, a: u32, b: u32) -> S {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(S::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(a, b)| a + b).max()
    }

    /// Lowest total degree of a monomial (the multiplicity at the origin).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|&(a, b)| a + b).min()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (&(a, b), c) in &other.terms {
            p.add_term(a, b, c.clone());
        }
        p
    }

    pub fn neg(&self) -> Self {
        BivariatePoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| (*k, s.mul_ref(c))))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (&(a, b), c) in &self.terms {
            for (&(a2, b2), c2) in &other.terms {
                p.add_term(a + a2, b + b2, c.mul_ref(c2));
            }
        }
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn product<'a, I: IntoIterator<Item = &'a Self>>(factors: I) -> Self
    where
        S: 'a,
    {
        factors.into_iter().fold(Self::one(), |acc, f| acc.mul(f))
    }

    pub fn partial_x(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(&(a, _), _)| a > 0)
                .map(|(&(a, b), c)| ((a - 1, b), S::from_int(a as i64) * c.clone())),
        )
    }

    pub fn partial_y(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(&(_, b), _)| b > 0)
                .map(|(&(a, b), c)| ((a, b - 1), S::from_int(b as i64) * c.clone())),
        )
    }

    /// Drops every monomial of total degree `>= d`.
    pub fn truncate_degree(&self, d: u32) -> Self {
        BivariatePoly {
            terms: self
                .terms
                .iter()
                .filter(|(&(a, b), _)| a + b < d)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Substitutes `X = x`, `Y = y` using Horner's scheme in both variables.
    pub fn eval(&self, x: &TruncatedSeries<S>, y: &TruncatedSeries<S>) -> TruncatedSeries<S> {
        let Some(max_b) = self.terms.keys().map(|&(_, b)| b).max() else {
            return TruncatedSeries::exact_zero();
        };
        let mut acc = TruncatedSeries::exact_zero();
        for b in (0..=max_b).rev() {
            let row: Vec<(u32, &S)> = self
                .terms
                .range((0, b)..)
                .filter(|(&(_, bb), _)| bb == b)
                .map(|(&(a, _), c)| (a, c))
                .collect();
            let mut inner = TruncatedSeries::exact_zero();
            if let Some(max_a) = row.iter().map(|(a, _)| *a).max() {
                for a in (0..=max_a).rev() {
                    inner = inner.mul(x);
                    if let Some((_, c)) = row.iter().find(|(aa, _)| *aa == a) {
                        inner = inner.add(&TruncatedSeries::constant((*c).clone(), None));
                    }
                }
            }
            acc = acc.mul(y).add(&inner);
        }
        acc
    }

    /// Exact division test in `Q[X,Y]`.
    ///
    /// A single polynomial is a Groebner basis of the ideal it generates, so
    /// `other` divides `self` iff lex reduction leaves no remainder.
    pub fn is_multiple_of(&self, other: &Self) -> bool {
        let Some((&lead_key, lead_c)) = other.terms.iter().next_back() else {
            return self.is_zero();
        };
        let lead_inv = lead_c.inv();
        let mut rest = self.clone();
        while let Some((&(a, b), c)) = rest.terms.iter().next_back() {
            if a < lead_key.0 || b < lead_key.1 {
                return false;
            }
            let q = Self::monomial(c.mul_ref(&lead_inv), a - lead_key.0, b - lead_key.1);
            rest = rest.sub(&q.mul(other));
        }
        true
    }
}

impl<S: Field> BivariatePoly<S> {
    /// Parses the sparse-monomial grammar, e.g. `Y^2 - 3/2*X^3 + X*Y`.
    ///
    /// A term is an optional rational coefficient followed by factors `X`,
    /// `Y`, `X^k`, `Y^k`, separated by `*` or juxtaposed.
    pub fn parse(src: &str) -> Result<Self> {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
        .poly()
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse {
            line: 1,
            column: self.pos + 1,
            message: msg.to_string(),
        })
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

    fn digits(&mut self) -> Option<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn poly<S: Field>(&mut self) -> Result<BivariatePoly<S>> {
        let mut p = BivariatePoly::zero();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                None if first => return self.err("empty polynomial"),
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    S::one()
                }
                Some(b'-') => {
                    self.pos += 1;
                    -S::one()
                }
                Some(_) if first => S::one(),
                Some(_) => return self.err("expected '+' or '-'"),
            };
            first = false;
            let (a, b, c) = self.term::<S>()?;
            p.add_term(a, b, sign * c);
        }
        Ok(p)
    }

    fn term<S: Field>(&mut self) -> Result<(u32, u32, S)> {
        let mut coeff = S::one();
        let mut saw_any = false;
        if let Some(num) = self.digits() {
            let num = num.to_string();
            let mut text = num;
            if self.peek() == Some(b'/') {
                self.pos += 1;
                match self.digits() {
                    Some(den) if den.bytes().any(|d| d != b'0') => {
                        text = format!("{text}/{den}");
                    }
                    _ => return self.err("expected nonzero denominator"),
                }
            }
            coeff = match text.parse::<S>() {
                Ok(c) => c,
                Err(_) => return self.err("invalid coefficient"),
            };
            saw_any = true;
        }
        let (mut a, mut b) = (0u32, 0u32);
        loop {
            let star = self.peek() == Some(b'*');
            if star {
                self.pos += 1;
            }
            match self.peek() {
                Some(v @ (b'X' | b'Y' | b'x' | b'y')) => {
                    self.pos += 1;
                    let mut e = 1u32;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        e = match self.digits().map(str::parse::<u32>) {
                            Some(Ok(e)) => e,
                            _ => return self.err("expected exponent after '^'"),
                        };
                    }
                    if v.eq_ignore_ascii_case(&b'X') {
                        a += e;
                    } else {
                        b += e;
                    }
                    saw_any = true;
                }
                _ => {
                    if star {
                        return self.err("expected 'X' or 'Y' after '*'");
                    }
                    break;
                }
            }
        }
        if !saw_any {
            return self.err("expected a coefficient or a variable");
        }
        Ok((a, b, coeff))
    }
}

impl<S: Field + PartialOrd + fmt::Display> fmt::Display for BivariatePoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest total degree first, X-heavy first within a degree
        let mut keys: Vec<&(u32, u32)> = self.terms.keys().collect();
        keys.sort_by(|p, q| (q.0 + q.1, q.0).cmp(&(p.0 + p.1, p.0)));
        for (i, key) in keys.into_iter().enumerate() {
            let c = &self.terms[key];
            let neg = *c < S::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors = Vec::new();
            match key.0 {
                0 => {}
                1 => factors.push("X".to_string()),
                a => factors.push(format!("X^{a}")),
            }
            match key.1 {
                0 => {}
                1 => factors.push("Y".to_string()),
                b => factors.push(format!("Y^{b}")),
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == S::one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}
