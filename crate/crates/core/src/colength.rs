//! Lengths of quotients of fractional ideals, from value sets and from linear algebra.

use crate::curve::Valuation;
use crate::error::{Error, Result};
use crate::poly::BivariatePoly;
use crate::scalar::Field;
use crate::span::{GeneratingFamily, Settings, SpanSpace, Window};
use crate::valueset::{value_set, ConductorBound, ValueSetBox};

/// Fractional ideals `inner ⊆ outer` with certified conductor bounds.
#[derive(Clone, Debug)]
pub struct IdealPair<S: Field> {
    pub inner: GeneratingFamily<S>,
    pub inner_bound: Vec<i64>,
    pub outer: GeneratingFamily<S>,
    pub outer_bound: Vec<i64>,
    inclusion_certified: bool,
}

fn shared_window<S: Field>(
    inner: &GeneratingFamily<S>,
    outer: &GeneratingFamily<S>,
    top: &[i64],
    settings: &Settings,
) -> Result<Window> {
    let a = inner.lows(settings)?;
    let b = outer.lows(settings)?;
    let lo: Vec<i64> = a.iter().zip(&b).map(|(x, y)| *x.min(y)).collect();
    let hi = top.iter().zip(&lo).map(|(t, l)| (t + 1).max(*l)).collect();
    Ok(Window::new(lo, hi))
}

impl<S: Field> IdealPair<S> {
    /// Checks that the inner products lie in the span of the outer ones
    /// below the larger of the two bounds.
    pub fn new(
        inner: GeneratingFamily<S>,
        inner_bound: Vec<i64>,
        outer: GeneratingFamily<S>,
        outer_bound: Vec<i64>,
        settings: &Settings,
    ) -> Result<Self> {
        let top: Vec<i64> = inner_bound.iter().zip(&outer_bound).map(|(a, b)| *a.max(b)).collect();
        let window = shared_window(&inner, &outer, &top, settings)?;
        let outer_span = SpanSpace::build(&outer, window.clone(), settings)?;
        let inner_span = SpanSpace::build(&inner, window, settings)?;
        if !outer_span.contains_span(&inner_span) {
            return Err(Error::InclusionNotCertified(
                "an inner product is not in the span of the outer products".into(),
            ));
        }
        Ok(IdealPair {
            inner,
            inner_bound,
            outer,
            outer_bound,
            inclusion_certified: true,
        })
    }

    pub fn is_certified(&self) -> bool {
        self.inclusion_certified
    }
}

/// `l(I/I(gamma)) = sum_i (gamma_i - min_i - #gaps(E_i) - Theta_i(E))` for `gamma >= c(E)`.
pub fn colength_truncation(e: &ValueSetBox, gamma: &[i64]) -> Result<i64> {
    if gamma.iter().zip(e.conductor()).any(|(g, c)| g < c) {
        return Err(Error::InvalidArgument(format!(
            "truncation point {gamma:?} is below the conductor {:?}",
            e.conductor()
        )));
    }
    let theta = e.theta_via_fiber().values;
    Ok((0..e.r())
        .map(|i| gamma[i] - e.min()[i] - e.gap_count(i) as i64 - theta[i] as i64)
        .sum())
}

/// `dim I/I(gamma)` directly: the span of `I` cut at `gamma`.
pub fn truncation_oracle<S: Field>(
    fam: &GeneratingFamily<S>,
    gamma: &[i64],
    settings: &Settings,
) -> Result<usize> {
    let lo = fam.lows(settings)?;
    let hi = gamma.iter().zip(&lo).map(|(g, l)| *g.max(l)).collect();
    Ok(SpanSpace::build(fam, Window::new(lo, hi), settings)?.dim())
}

/// The three value-set expressions for `l(outer/inner)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColengthForms {
    /// Per-branch lengths plus the `N`-set corrections.
    pub dimensionf: i64,
    /// Per-branch lengths plus `Theta(D) - Theta(E)`, with Theta from relative maximals.
    pub codim: i64,
    /// `sum_i l_i(pi_i N_[1,i)(outer) / pi_i N_[1,i)(inner))`.
    pub quotient: i64,
}

impl ColengthForms {
    pub fn agree(&self) -> bool {
        self.dimensionf == self.codim && self.codim == self.quotient
    }
}

pub fn colength_pair<S: Field>(pair: &IdealPair<S>, settings: &Settings) -> Result<ColengthForms> {
    if !pair.is_certified() {
        return Err(Error::InclusionNotCertified("pair was not certified".into()));
    }
    let d = value_set(&pair.inner, &ConductorBound::Certified(pair.inner_bound.clone()), settings)?;
    let e = value_set(&pair.outer, &ConductorBound::Certified(pair.outer_bound.clone()), settings)?;
    Ok(colength_from_sets(&d.value_set, &e.value_set))
}

/// Value-set side of [`colength_pair`] for already computed `D ⊆ E`.
pub fn colength_from_sets(d: &ValueSetBox, e: &ValueSetBox) -> ColengthForms {
    let r = e.r();
    let theta_d = d.theta_via_rm().values;
    let theta_e = e.theta_via_rm().values;
    let mut forms = ColengthForms {
        dimensionf: 0,
        codim: 0,
        quotient: 0,
    };
    for i in 0..r {
        let prefix: Vec<usize> = (0..i).collect();
        let di = d.project(&[i]);
        let ei = e.project(&[i]);
        let nd = d.nu_partial_n(i, &prefix);
        let ne = e.nu_partial_n(i, &prefix);
        let local = ei.count_not_in(&di) as i64;
        forms.dimensionf += local + di.count_not_in(&nd) as i64 - ei.count_not_in(&ne) as i64;
        forms.codim += local + theta_d[i] as i64 - theta_e[i] as i64;
        forms.quotient += ne.count_not_in(&nd) as i64;
    }
    forms
}

/// `dim span(outer) - dim span(inner)` on a shared window above `c(inner)`,
/// repeated on a doubled window as a stability check.
pub fn colength_oracle<S: Field>(pair: &IdealPair<S>, settings: &Settings) -> Result<usize> {
    let at = |scale: i64| -> Result<usize> {
        let lows = pair.inner.lows(settings)?;
        let top: Vec<i64> = pair
            .inner_bound
            .iter()
            .zip(&lows)
            .map(|(b, l)| l + scale * settings.bound_multiplier.max(1) * (b - l).max(0))
            .collect();
        let window = shared_window(&pair.inner, &pair.outer, &top, settings)?;
        let outer = SpanSpace::build(&pair.outer, window.clone(), settings)?;
        let inner = SpanSpace::build(&pair.inner, window, settings)?;
        Ok(outer.dim() - inner.dim())
    };
    let once = at(1)?;
    let twice = at(2)?;
    if once != twice {
        return Err(Error::ConductorNotStabilized(format!(
            "colength oracle changed from {once} to {twice} when the window doubled"
        )));
    }
    Ok(once)
}

/// Both sides of `l(M / hL) = nu(h) + l(M / L)` on a single branch.
pub fn lemma_tec_check<S: Field>(
    h: &BivariatePoly<S>,
    outer: &GeneratingFamily<S>,
    outer_bound: &[i64],
    inner: &GeneratingFamily<S>,
    inner_bound: &[i64],
    settings: &Settings,
) -> Result<(i64, i64)> {
    if inner.curve.r() != 1 {
        return Err(Error::InvalidArgument("the identity is stated for one branch".into()));
    }
    let nu_h = match inner.curve.nu_poly(h)[0] {
        Valuation::Finite(v) => v,
        other => {
            return Err(Error::InvalidArgument(format!("h must be regular on the branch, got {other:?}")))
        }
    };
    let scaled = IdealPair::new(
        inner.scaled(h),
        vec![inner_bound[0] + nu_h],
        outer.clone(),
        outer_bound.to_vec(),
        settings,
    )?;
    let lhs = colength_oracle(&scaled, settings)? as i64;
    let plain = IdealPair::new(
        inner.clone(),
        inner_bound.to_vec(),
        outer.clone(),
        outer_bound.to_vec(),
        settings,
    )?;
    let rhs = nu_h + colength_pair(&plain, settings)?.dimensionf;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{Branch, Curve};
    use crate::series::TruncatedSeries;
    use num_rational::BigRational;

    type Q = BigRational;

    fn exact(terms: &[(i64, i64)]) -> TruncatedSeries<Q> {
        TruncatedSeries::from_terms(terms.iter().map(|&(e, c)| (e, Q::from_int(c))), None)
    }

    fn node() -> Curve<Q> {
        Curve::new(vec![
            Branch::new(0, BivariatePoly::x(), exact(&[]), exact(&[(1, 1)])),
            Branch::new(1, BivariatePoly::y(), exact(&[(1, 1)]), exact(&[])),
        ])
        .unwrap()
    }

    fn cusp() -> Curve<Q> {
        Curve::new(vec![Branch::new(
            0,
            BivariatePoly::parse("Y^2 - X^3").unwrap(),
            exact(&[(2, 1)]),
            exact(&[(3, 1)]),
        )])
        .unwrap()
    }

    #[test]
    fn node_truncation_formula() {
        let s = Settings::default();
        let fam = GeneratingFamily::local_ring(&node());
        let g = value_set(&fam, &ConductorBound::Certified(vec![1, 1]), &s).unwrap();
        assert_eq!(colength_truncation(&g.value_set, &[1, 1]).unwrap(), 1);
        assert_eq!(truncation_oracle(&fam, &[1, 1], &s).unwrap(), 1);
        assert_eq!(colength_truncation(&g.value_set, &[2, 3]).unwrap(), 4);
        assert_eq!(truncation_oracle(&fam, &[2, 3], &s).unwrap(), 4);
        assert!(colength_truncation(&g.value_set, &[0, 3]).is_err());
    }

    #[test]
    fn node_pairs() {
        let s = Settings::default();
        let c = node();
        let o = GeneratingFamily::local_ring(&c);
        let jac = GeneratingFamily::jacobian(&c);
        let pair = IdealPair::new(jac, vec![1, 1], o.clone(), vec![1, 1], &s).unwrap();
        let forms = colength_pair(&pair, &s).unwrap();
        assert!(forms.agree());
        assert_eq!(forms.dimensionf, 1);
        assert_eq!(colength_oracle(&pair, &s).unwrap(), 1);

        let prod = GeneratingFamily::normalization_of_components(&c);
        let pair = IdealPair::new(o.clone(), vec![1, 1], prod, vec![0, 0], &s).unwrap();
        assert_eq!(colength_pair(&pair, &s).unwrap().dimensionf, 1);
        assert_eq!(colength_oracle(&pair, &s).unwrap(), 1);

        let same = IdealPair::new(o.clone(), vec![1, 1], o, vec![1, 1], &s).unwrap();
        assert_eq!(colength_pair(&same, &s).unwrap().dimensionf, 0);
    }

    #[test]
    fn inclusion_is_checked() {
        let s = Settings::default();
        let c = node();
        let o = GeneratingFamily::local_ring(&c);
        let jac = GeneratingFamily::jacobian(&c);
        assert!(matches!(
            IdealPair::new(o, vec![1, 1], jac, vec![1, 1], &s),
            Err(Error::InclusionNotCertified(_))
        ));
    }

    #[test]
    fn tec_on_cusp() {
        let s = Settings::default();
        let o = GeneratingFamily::local_ring(&cusp());
        for (h, expected) in [("X", 2), ("Y", 3), ("1", 0)] {
            let h = BivariatePoly::parse(h).unwrap();
            let (lhs, rhs) = lemma_tec_check(&h, &o, &[2], &o, &[2], &s).unwrap();
            assert_eq!((lhs, rhs), (expected, expected));
        }
    }
}
