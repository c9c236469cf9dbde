//! Truncated Laurent series over an exact field.
//!
//! A [`TruncatedSeries`] stores the coefficients of `t^offset .. t^(trunc-1)`.
//! Everything at or above `trunc` is unknown. A series without a truncation
//! is exact: it is a Laurent polynomial and every coefficient past the stored
//! ones is known to vanish.
//!
//! Truncation is propagated conservatively: a result never claims knowledge
//! of a coefficient that depends on an unknown input coefficient.

use std::fmt;

use crate::scalar::{axpy_neg, Field};

/// `a + b` over `Z ∪ {∞}` where `None` is `∞`.
pub(crate) fn add_ext(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    Some(a? + b?)
}

/// `min` over `Z ∪ {∞}` where `None` is `∞`.
pub(crate) fn min_ext(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

/// Order of a series as far as the tracked coefficients can tell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeriesOrder {
    /// The first nonzero coefficient sits at this exponent.
    Finite(i64),
    /// All tracked coefficients vanish; the true order is at least the truncation.
    ZeroToPrecision(i64),
    /// The series is exactly zero.
    Zero,
}

impl SeriesOrder {
    pub fn finite(self) -> Option<i64> {
        match self {
            SeriesOrder::Finite(n) => Some(n),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct TruncatedSeries<S> {
    offset: i64,
    // coeffs[k] is the coefficient of t^(offset + k); first and last entries nonzero
    coeffs: Vec<S>,
    trunc: Option<i64>,
}

impl<S: Field> TruncatedSeries<S> {
    /// Builds `sum coeffs[k] t^(offset+k)` known below `trunc` (`None` = exact).
    /// Coefficients at or above the truncation are discarded.
    pub fn new(offset: i64, coeffs: Vec<S>, trunc: Option<i64>) -> Self {
        let mut s = TruncatedSeries {
            offset,
            coeffs,
            trunc,
        };
        s.normalize();
        s
    }

    pub fn zero(trunc: Option<i64>) -> Self {
        Self::new(0, Vec::new(), trunc)
    }

    pub fn exact_zero() -> Self {
        Self::zero(None)
    }

    pub fn constant(c: S, trunc: Option<i64>) -> Self {
        Self::new(0, vec![c], trunc)
    }

    pub fn one() -> Self {
        Self::constant(S::one(), None)
    }

    pub fn monomial(c: S, exp: i64, trunc: Option<i64>) -> Self {
        Self::new(exp, vec![c], trunc)
    }

    /// Builds a series from `(exponent, coefficient)` terms. Repeated exponents add up.
    pub fn from_terms<I>(terms: I, trunc: Option<i64>) -> Self
    where
        I: IntoIterator<Item = (i64, S)>,
    {
        let terms: Vec<(i64, S)> = terms.into_iter().collect();
        let Some(lo) = terms.iter().map(|(e, _)| *e).min() else {
            return Self::zero(trunc);
        };
        let hi = terms.iter().map(|(e, _)| *e).max().unwrap_or(lo);
        let mut coeffs = vec![S::zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            let slot = &mut coeffs[(e - lo) as usize];
            *slot = std::mem::replace(slot, S::zero()) + c;
        }
        Self::new(lo, coeffs, trunc)
    }

    fn normalize(&mut self) {
        if let Some(t) = self.trunc {
            let keep = (t - self.offset).clamp(0, self.coeffs.len() as i64) as usize;
            self.coeffs.truncate(keep);
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.offset += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.offset = 0;
        }
    }

    pub fn trunc(&self) -> Option<i64> {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    pub fn order(&self) -> SeriesOrder {
        if !self.coeffs.is_empty() {
            SeriesOrder::Finite(self.offset)
        } else {
            match self.trunc {
                Some(t) => SeriesOrder::ZeroToPrecision(t),
                None => SeriesOrder::Zero,
            }
        }
    }

    /// Lower bound on the true order; `None` for an exact zero.
    pub fn low(&self) -> Option<i64> {
        match self.order() {
            SeriesOrder::Finite(n) | SeriesOrder::ZeroToPrecision(n) => Some(n),
            SeriesOrder::Zero => None,
        }
    }

    /// Coefficient of `t^exp`.
    ///
    /// Panics if `exp` is at or past the truncation.
    pub fn coeff(&self, exp: i64) -> S {
        if let Some(t) = self.trunc {
            assert!(exp < t, "coefficient t^{exp} is beyond truncation {t}");
        }
        let k = exp - self.offset;
        if k < 0 || k >= self.coeffs.len() as i64 {
            S::zero()
        } else {
            self.coeffs[k as usize].clone()
        }
    }

    pub fn leading_coeff(&self) -> Option<&S> {
        self.coeffs.first()
    }

    /// Stored `(exponent, coefficient)` pairs with nonzero coefficient.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &S)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.offset + k as i64, c))
    }

    /// Forgets everything at or above `trunc` (never raises an existing truncation).
    pub fn truncated(&self, trunc: i64) -> Self {
        let t = min_ext(self.trunc, Some(trunc));
        Self::new(self.offset, self.coeffs.clone(), t)
    }

    pub fn add(&self, other: &Self) -> Self {
        let trunc = min_ext(self.trunc, other.trunc);
        if self.coeffs.is_empty() {
            return other.truncated_opt(trunc);
        }
        if other.coeffs.is_empty() {
            return self.truncated_opt(trunc);
        }
        let lo = self.offset.min(other.offset);
        let hi = (self.offset + self.coeffs.len() as i64).max(other.offset + other.coeffs.len() as i64);
        let mut coeffs = vec![S::zero(); (hi - lo) as usize];
        for (e, c) in self.terms().chain(other.terms()) {
            let slot = &mut coeffs[(e - lo) as usize];
            *slot = std::mem::replace(slot, S::zero()) + c.clone();
        }
        Self::new(lo, coeffs, trunc)
    }

    fn truncated_opt(&self, trunc: Option<i64>) -> Self {
        Self::new(self.offset, self.coeffs.clone(), min_ext(self.trunc, trunc))
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            offset: self.offset,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
            trunc: self.trunc,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        // 0 * s is exactly zero however well s is known
        if c.is_zero() {
            return Self::exact_zero();
        }
        TruncatedSeries {
            offset: self.offset,
            coeffs: self.coeffs.iter().map(|x| c.mul_ref(x)).collect(),
            trunc: self.trunc,
        }
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        TruncatedSeries {
            offset: if self.coeffs.is_empty() { 0 } else { self.offset + k },
            coeffs: self.coeffs.clone(),
            trunc: self.trunc.map(|t| t + k),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        // s = s_known + O(t^Ts), u = u_known + O(t^Tu)
        let trunc = min_ext(add_ext(self.low(), other.trunc), add_ext(self.trunc, other.low()));
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero(trunc);
        }
        let n = match trunc {
            Some(t) => ((t - self.offset - other.offset).max(0) as usize)
                .min(self.coeffs.len() + other.coeffs.len() - 1),
            None => self.coeffs.len() + other.coeffs.len() - 1,
        };
        let mut coeffs = vec![S::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= n || a.is_zero() {
                continue;
            }
            let row = &mut coeffs[i..];
            let m = row.len().min(other.coeffs.len());
            axpy_neg(&mut row[..m], &(-a.clone()), &other.coeffs[..m]);
        }
        Self::new(self.offset + other.offset, coeffs, trunc)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Formal derivative `d/dt`.
    pub fn derivative(&self) -> Self {
        let terms: Vec<(i64, S)> = self
            .terms()
            .filter(|(e, _)| *e != 0)
            .map(|(e, c)| (e - 1, S::from_int(e) * c.clone()))
            .collect();
        Self::from_terms(terms, self.trunc.map(|t| t - 1))
    }

    /// gcd of the exponents carrying nonzero coefficients (0 for the zero series).
    pub fn exponent_gcd(&self) -> i64 {
        self.terms().fold(0, |g, (e, _)| gcd(g, e.abs()))
    }
}

pub(crate) fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a.abs()
}

impl<S: Field + fmt::Display> fmt::Display for TruncatedSeries<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*t")?,
                _ => write!(f, "{c}*t^{e}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        match self.trunc {
            Some(t) => write!(f, " + O(t^{t})"),
            None => Ok(()),
        }
    }
}

impl<S: Field> fmt::Debug for TruncatedSeries<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncatedSeries")
            .field("offset", &self.offset)
            .field("coeffs", &self.coeffs)
            .field("trunc", &self.trunc)
            .finish()
    }
}
