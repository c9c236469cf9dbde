//! Curve input documents.

use curvetau_core::{Branch, BivariatePoly, Curve, Rational, Settings, TruncatedSeries};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `[exponent, numerator, denominator]`.
pub type Term = [i64; 3];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Trunc {
    At(i64),
    Exact(ExactTag),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExactTag {
    Exact,
}

impl Trunc {
    fn get(&self) -> Option<i64> {
        match self {
            Trunc::At(t) => Some(*t),
            Trunc::Exact(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchRecord {
    pub poly: String,
    pub param_x: Vec<Term>,
    pub param_y: Vec<Term>,
    pub trunc: Trunc,
    /// Per-coordinate overrides of `trunc`, e.g. an exact `x` with a truncated `y`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc_x: Option<Trunc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc_y: Option<Trunc>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_cap: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_cap: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_multiplier: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDocument {
    pub branches: Vec<BranchRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settings: Option<SettingsRecord>,
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> CliError {
    CliError::Engine(curvetau_core::Error::Parse {
        line,
        column,
        message: message.into(),
    })
}

fn series(terms: &[Term], trunc: Option<i64>, branch: usize, which: &str) -> Result<TruncatedSeries<Rational>, CliError> {
    let mut out = Vec::with_capacity(terms.len());
    for &[e, n, d] in terms {
        if d == 0 {
            return Err(parse_error(0, 0, format!("branch {}: zero denominator in {which}", branch + 1)));
        }
        if e < 0 {
            return Err(parse_error(0, 0, format!("branch {}: negative exponent in {which}", branch + 1)));
        }
        out.push((e, Rational::new(n.into(), d.into())));
    }
    Ok(TruncatedSeries::from_terms(out, trunc))
}

fn terms_of(s: &TruncatedSeries<Rational>) -> Result<Vec<Term>, CliError> {
    s.terms()
        .map(|(e, c)| {
            let n = i64::try_from(c.numer()).ok();
            let d = i64::try_from(c.denom()).ok();
            match (n, d) {
                (Some(n), Some(d)) => Ok([e, n, d]),
                _ => Err(CliError::Usage(format!("coefficient {c} does not fit the document format"))),
            }
        })
        .collect()
}

impl CurveDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| parse_error(e.line(), e.column(), e.to_string()))
    }

    pub fn curve(&self) -> Result<Curve<Rational>, CliError> {
        let mut branches = Vec::with_capacity(self.branches.len());
        for (i, b) in self.branches.iter().enumerate() {
            let poly = BivariatePoly::parse(&b.poly).map_err(|e| match e {
                curvetau_core::Error::Parse { column, message, .. } => {
                    parse_error(0, column, format!("branch {} polynomial: {message}", i + 1))
                }
                other => CliError::Engine(other),
            })?;
            let tx = b.trunc_x.as_ref().unwrap_or(&b.trunc).get();
            let ty = b.trunc_y.as_ref().unwrap_or(&b.trunc).get();
            let x = series(&b.param_x, tx, i, "param_x")?;
            let y = series(&b.param_y, ty, i, "param_y")?;
            branches.push(Branch::new(i, poly, x, y));
        }
        Ok(Curve::new(branches)?)
    }

    /// Document settings over the defaults, then `CURVETAU_PRECISION_CAP`.
    pub fn settings(&self) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        if let Some(r) = &self.settings {
            if let Some(v) = r.precision_cap {
                s.precision_cap = v;
            }
            if let Some(v) = r.degree_cap {
                s.degree_cap = v;
            }
            if let Some(v) = r.bound_multiplier {
                s.bound_multiplier = v;
            }
        }
        if let Ok(v) = std::env::var("CURVETAU_PRECISION_CAP") {
            s.precision_cap = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("CURVETAU_PRECISION_CAP={v} is not an integer")))?;
        }
        if s.precision_cap < 1 || s.degree_cap < 1 || s.bound_multiplier < 1 {
            return Err(CliError::Usage("settings must be positive".into()));
        }
        Ok(s)
    }

    /// Same curve with polynomials re-rendered and coefficients reduced and sorted.
    pub fn canonical(&self) -> Result<Self, CliError> {
        let curve = self.curve()?;
        let branches = curve
            .branches()
            .iter()
            .zip(&self.branches)
            .map(|(b, rec)| {
                Ok(BranchRecord {
                    poly: b.poly.to_string(),
                    param_x: terms_of(&b.x)?,
                    param_y: terms_of(&b.y)?,
                    trunc: rec.trunc.clone(),
                    trunc_x: rec.trunc_x.clone(),
                    trunc_y: rec.trunc_y.clone(),
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(CurveDocument {
            branches,
            settings: self.settings.clone(),
        })
    }

    /// Document for an already built curve.
    pub fn from_curve(curve: &Curve<Rational>, settings: Option<SettingsRecord>) -> Result<Self, CliError> {
        let tag = |t: Option<i64>| t.map_or(Trunc::Exact(ExactTag::Exact), Trunc::At);
        let branches = curve
            .branches()
            .iter()
            .map(|b| {
                let (tx, ty) = (b.x.trunc(), b.y.trunc());
                Ok(BranchRecord {
                    poly: b.poly.to_string(),
                    param_x: terms_of(&b.x)?,
                    param_y: terms_of(&b.y)?,
                    trunc: tag(ty),
                    trunc_x: (tx != ty).then(|| tag(tx)),
                    trunc_y: None,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(CurveDocument { branches, settings })
    }
}
