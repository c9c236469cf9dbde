//! Branches, curves, and elements of the total ring of fractions.

use crate::error::{Error, Result};
use crate::poly::BivariatePoly;
use crate::scalar::Field;
use crate::series::{min_ext, SeriesOrder, TruncatedSeries};

/// One irreducible component: its defining factor and a parametrization.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch<S: Field> {
    pub label: usize,
    pub poly: BivariatePoly<S>,
    pub x: TruncatedSeries<S>,
    pub y: TruncatedSeries<S>,
}

/// Valuation of an element on one branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    /// Vanishes to the tracked precision; the true value is at least this.
    AtLeast(i64),
    /// Certified zero on the branch.
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            _ => None,
        }
    }
}

/// An element of `K = prod_i Q((t_i))`, one series per branch.
#[derive(Clone, Debug, PartialEq)]
pub struct KElement<S: Field> {
    pub components: Vec<TruncatedSeries<S>>,
}

impl<S: Field> KElement<S> {
    pub fn new(components: Vec<TruncatedSeries<S>>) -> Self {
        KElement { components }
    }

    pub fn one(r: usize) -> Self {
        KElement::new(vec![TruncatedSeries::one(); r])
    }

    /// The idempotent that is one on branch `i` and zero elsewhere.
    pub fn idempotent(r: usize, i: usize) -> Self {
        KElement::new(
            (0..r)
                .map(|j| {
                    if i == j {
                        TruncatedSeries::one()
                    } else {
                        TruncatedSeries::exact_zero()
                    }
                })
                .collect(),
        )
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn mul(&self, other: &Self) -> Self {
        KElement::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.mul(b))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        KElement::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        )
    }

    pub fn orders(&self) -> Vec<SeriesOrder> {
        self.components.iter().map(|c| c.order()).collect()
    }

    /// Regular means no component vanishes (to the tracked precision).
    pub fn is_regular(&self) -> bool {
        self.components
            .iter()
            .all(|c| matches!(c.order(), SeriesOrder::Finite(_)))
    }
}

impl<S: Field> Branch<S> {
    pub fn new(
        label: usize,
        poly: BivariatePoly<S>,
        x: TruncatedSeries<S>,
        y: TruncatedSeries<S>,
    ) -> Self {
        Branch { label, poly, x, y }
    }

    /// Smallest tracked truncation of the two parametrizing series.
    pub fn precision(&self) -> Option<i64> {
        min_ext(self.x.trunc(), self.y.trunc())
    }

    /// `min(ord x, ord y)`: the valuation of the maximal ideal on this branch.
    pub fn multiplicity(&self) -> Option<i64> {
        let ox = self.x.order().finite();
        let oy = self.y.order().finite();
        match (ox, oy) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn eval(&self, p: &BivariatePoly<S>) -> TruncatedSeries<S> {
        p.eval(&self.x, &self.y)
    }

    /// Checks the branch-local invariants.
    pub fn check(&self) -> Result<()> {
        let invalid = |message: String| Error::InvalidBranch {
            branch: self.label,
            message,
        };
        for (name, s) in [("x", &self.x), ("y", &self.y)] {
            match s.order() {
                SeriesOrder::Finite(o) if o < 1 => {
                    return Err(invalid(format!(
                        "parametrization {name} has order {o}, expected at least 1"
                    )))
                }
                SeriesOrder::ZeroToPrecision(_) => {
                    return Err(invalid(format!(
                        "parametrization {name} vanishes to precision; give it exactly or with a nonzero term"
                    )))
                }
                _ => {}
            }
        }
        if self.multiplicity().is_none() {
            return Err(invalid("both parametrizing series are zero".into()));
        }
        if let SeriesOrder::Finite(order) = self.eval(&self.poly).order() {
            return Err(Error::BranchNotOnCurve {
                branch: self.label,
                order,
            })
        }
        let g = crate::series::gcd(self.x.exponent_gcd(), self.y.exponent_gcd());
        if g != 1 {
            return Err(Error::NonPrimitive {
                branch: self.label,
                gcd: g,
            });
        }
        // an irreducible factor has order equal to the branch multiplicity;
        // an extra non-unit factor would raise it
        let ord = self.poly.order().map(i64::from);
        if ord != self.multiplicity() {
            return Err(invalid(format!(
                "defining polynomial has order {:?} but the parametrization has multiplicity {:?}",
                ord,
                self.multiplicity()
            )));
        }
        Ok(())
    }

    /// Extends the parametrization to precision `target`.
    ///
    /// One coordinate must be exact; the other is continued coefficient by
    /// coefficient from `f(x, y) = 0`, which is linear in each new
    /// coefficient once the known part exceeds the order of the
    /// corresponding partial derivative along the branch.
    pub fn lifted(&self, target: i64) -> Result<Self> {
        if self.precision().is_none_or(|p| p >= target) {
            return Ok(self.clone());
        }
        let exhausted = |needed: i64| Error::PrecisionExhausted {
            context: format!("branch {} parametrization", self.label),
            needed,
            cap: self.precision().unwrap_or(i64::MAX),
        };
        let (fixed, moving, partial, swap) = if self.x.is_exact() {
            (&self.x, &self.y, self.poly.partial_y(), false)
        } else if self.y.is_exact() {
            (&self.y, &self.x, self.poly.partial_x(), true)
        } else {
            return Err(exhausted(target));
        };
        let eval = |f: &BivariatePoly<S>, fixed: &TruncatedSeries<S>, moving: &TruncatedSeries<S>| {
            if swap {
                f.eval(moving, fixed)
            } else {
                f.eval(fixed, moving)
            }
        };
        let known = moving.trunc().expect("moving coordinate is truncated");
        let mut approx = TruncatedSeries::from_terms(
            moving.terms().map(|(e, c)| (e, c.clone())),
            None,
        );
        let deriv = eval(&partial, fixed, &approx);
        let Some(s) = deriv.order().finite() else {
            return Err(exhausted(target));
        };
        if known <= s {
            return Err(exhausted(target));
        }
        let lead = deriv.leading_coeff().expect("finite order").clone();
        let residual = eval(&self.poly, fixed, &approx);
        if residual.low().is_some_and(|o| o < known + s) {
            return Err(Error::BranchNotOnCurve {
                branch: self.label,
                order: residual.low().unwrap(),
            });
        }
        for k in known..target {
            let r = eval(&self.poly, fixed, &approx);
            let c = -(r.coeff(k + s) / lead.clone());
            if !c.is_zero() {
                approx = approx.add(&TruncatedSeries::monomial(c, k, None));
            }
        }
        let moving = approx.truncated(target);
        let mut out = self.clone();
        if swap {
            out.x = moving;
        } else {
            out.y = moving;
        }
        Ok(out)
    }
}

/// Per-pair orders reported by [`Curve::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub branch_count: usize,
    pub precision: Vec<Option<i64>>,
    pub multiplicities: Vec<i64>,
    /// `orders[i][j]`: order of `f_j` along branch `i` (diagonal unused, 0).
    pub orders: Vec<Vec<i64>>,
}

/// A reduced plane curve germ, stored as its branches.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve<S: Field> {
    branches: Vec<Branch<S>>,
}

impl<S: Field> Curve<S> {
    pub fn new(branches: Vec<Branch<S>>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidArgument("a curve needs at least one branch".into()));
        }
        Ok(Curve { branches })
    }

    pub fn branches(&self) -> &[Branch<S>] {
        &self.branches
    }

    pub fn branch(&self, i: usize) -> &Branch<S> {
        &self.branches[i]
    }

    pub fn r(&self) -> usize {
        self.branches.len()
    }

    /// Curve made of the branches at `indices`, in that order and relabelled `0..`.
    pub fn subcurve(&self, indices: &[usize]) -> Result<Self> {
        let mut branches = Vec::with_capacity(indices.len());
        for (k, &i) in indices.iter().enumerate() {
            let mut b = self
                .branches
                .get(i)
                .ok_or_else(|| Error::InvalidArgument(format!("no branch {i}")))?
                .clone();
            b.label = k;
            branches.push(b);
        }
        Curve::new(branches)
    }

    /// `f = prod f_i`.
    pub fn equation(&self) -> BivariatePoly<S> {
        BivariatePoly::product(self.branches.iter().map(|b| &b.poly))
    }

    /// Product of the defining factors over `indices`.
    pub fn partial_product(&self, indices: &[usize]) -> BivariatePoly<S> {
        BivariatePoly::product(indices.iter().map(|&i| &self.branches[i].poly))
    }

    pub fn precision(&self) -> Option<i64> {
        self.branches
            .iter()
            .fold(None, |acc, b| min_ext(acc, b.precision()))
    }

    pub fn multiplicities(&self) -> Vec<i64> {
        self.branches
            .iter()
            .map(|b| b.multiplicity().unwrap_or(1))
            .collect()
    }

    /// Lifts every inexact parametrization to at least `needed`, refusing to go past `cap`.
    pub fn with_precision(&self, needed: i64, cap: i64) -> Result<Self> {
        if self.precision().is_none_or(|p| p >= needed) {
            return Ok(self.clone());
        }
        if needed > cap {
            return Err(Error::PrecisionExhausted {
                context: "curve parametrizations".into(),
                needed,
                cap,
            });
        }
        let branches = self
            .branches
            .iter()
            .map(|b| {
                b.lifted(needed).map_err(|e| match e {
                    Error::PrecisionExhausted { context, needed, .. } => {
                        Error::PrecisionExhausted { context, needed, cap }
                    }
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Curve::new(branches)
    }

    pub fn validate(&self) -> Result<ValidationReport> {
        for b in &self.branches {
            b.check()?;
        }
        let r = self.r();
        let mut orders = vec![vec![0i64; r]; r];
        for i in 0..r {
            for j in 0..r {
                if i == j {
                    continue;
                }
                match self.branches[i].eval(&self.branches[j].poly).order() {
                    SeriesOrder::Finite(o) => orders[i][j] = o,
                    SeriesOrder::ZeroToPrecision(p) => {
                        return Err(Error::NonReduced {
                            first: i.min(j),
                            second: i.max(j),
                            precision: p,
                        })
                    }
                    SeriesOrder::Zero => {
                        return Err(Error::NonReduced {
                            first: i.min(j),
                            second: i.max(j),
                            precision: i64::MAX,
                        })
                    }
                }
            }
        }
        Ok(ValidationReport {
            branch_count: r,
            precision: self.branches.iter().map(|b| b.precision()).collect(),
            multiplicities: self.multiplicities(),
            orders,
        })
    }

    pub fn lift(&self, p: &BivariatePoly<S>) -> KElement<S> {
        KElement::new(self.branches.iter().map(|b| b.eval(p)).collect())
    }

    /// Componentwise orders; a vanishing component is only ever `AtLeast`.
    pub fn nu(&self, z: &KElement<S>) -> Vec<Valuation> {
        z.components
            .iter()
            .map(|c| match c.order() {
                SeriesOrder::Finite(o) => Valuation::Finite(o),
                SeriesOrder::ZeroToPrecision(t) => Valuation::AtLeast(t),
                SeriesOrder::Zero => Valuation::Infinite,
            })
            .collect()
    }

    /// Valuations of a polynomial. Vanishing is certified as infinite when the
    /// substitution is exact or the branch factor divides `p`.
    pub fn nu_poly(&self, p: &BivariatePoly<S>) -> Vec<Valuation> {
        self.branches
            .iter()
            .map(|b| match b.eval(p).order() {
                SeriesOrder::Finite(o) => Valuation::Finite(o),
                SeriesOrder::Zero => Valuation::Infinite,
                SeriesOrder::ZeroToPrecision(t) => {
                    if p.is_multiple_of(&b.poly) {
                        Valuation::Infinite
                    } else {
                        Valuation::AtLeast(t)
                    }
                }
            })
            .collect()
    }

    /// `I(f_i, f_j)` as the order of `f_j` along branch `i`, checked against the reverse order.
    pub fn intersection_multiplicity(&self, i: usize, j: usize) -> Result<i64> {
        if i == j || i >= self.r() || j >= self.r() {
            return Err(Error::InvalidArgument(format!(
                "intersection multiplicity needs two distinct branches, got {i} and {j}"
            )));
        }
        let along = |a: usize, b: usize| -> Result<i64> {
            match self.branches[a].eval(&self.branches[b].poly).order() {
                SeriesOrder::Finite(o) => Ok(o),
                SeriesOrder::ZeroToPrecision(t) => Err(Error::PrecisionExhausted {
                    context: format!("order of f_{b} along branch {a}"),
                    needed: t + 1,
                    cap: t,
                }),
                SeriesOrder::Zero => Err(Error::NonReduced {
                    first: a.min(b),
                    second: a.max(b),
                    precision: i64::MAX,
                }),
            }
        };
        let ij = along(i, j)?;
        let ji = along(j, i)?;
        if ij != ji {
            return Err(Error::OracleMismatch {
                what: format!("intersection multiplicity symmetry ({i},{j})"),
                formula: ij,
                oracle: ji,
            });
        }
        Ok(ij)
    }

    pub fn intersection_matrix(&self) -> Result<Vec<Vec<i64>>> {
        let r = self.r();
        let mut m = vec![vec![0; r]; r];
        for i in 0..r {
            for j in i + 1..r {
                let v = self.intersection_multiplicity(i, j)?;
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    fn exact(terms: &[(i64, i64)]) -> TruncatedSeries<Q> {
        TruncatedSeries::from_terms(terms.iter().map(|&(e, c)| (e, q(c))), None)
    }

    fn branch(label: usize, f: &str, x: &[(i64, i64)], y: &[(i64, i64)]) -> Branch<Q> {
        Branch::new(label, BivariatePoly::parse(f).unwrap(), exact(x), exact(y))
    }

    fn node() -> Curve<Q> {
        Curve::new(vec![branch(0, "X", &[], &[(1, 1)]), branch(1, "Y", &[(1, 1)], &[])]).unwrap()
    }

    #[test]
    fn node_validates() {
        let rep = node().validate().unwrap();
        assert_eq!(rep.orders[0][1], 1);
        assert_eq!(node().intersection_multiplicity(0, 1).unwrap(), 1);
    }

    #[test]
    fn cusp_validates_and_bad_param_is_rejected() {
        let cusp = Curve::new(vec![branch(0, "Y^2 - X^3", &[(2, 1)], &[(3, 1)])]).unwrap();
        assert!(cusp.validate().is_ok());
        let bad = Curve::new(vec![branch(0, "Y^2 - X^3", &[(2, 1)], &[(4, 1)])]).unwrap();
        assert!(matches!(bad.validate(), Err(Error::BranchNotOnCurve { .. })));
        let nonprim = Curve::new(vec![branch(0, "Y^2 - X^3", &[(4, 1)], &[(6, 1)])]).unwrap();
        assert!(matches!(nonprim.validate(), Err(Error::NonPrimitive { gcd: 2, .. })));
        let dup = Curve::new(vec![
            branch(0, "Y^2 - X^3", &[(2, 1)], &[(3, 1)]),
            branch(1, "Y^2 - X^3", &[(2, 1)], &[(3, 1)]),
        ])
        .unwrap();
        assert!(matches!(dup.validate(), Err(Error::NonReduced { .. })));
        let reducible = Curve::new(vec![branch(0, "X*Y^2 - X^4", &[(2, 1)], &[(3, 1)])]).unwrap();
        assert!(matches!(reducible.validate(), Err(Error::InvalidBranch { .. })));
    }

    #[test]
    fn lift_and_nu_on_node() {
        let c = node();
        let z = c.lift(&BivariatePoly::parse("X + Y").unwrap());
        assert_eq!(c.nu(&z), vec![Valuation::Finite(1), Valuation::Finite(1)]);
        assert_eq!(
            c.nu_poly(&BivariatePoly::x()),
            vec![Valuation::Infinite, Valuation::Finite(1)]
        );
        let zero = c.lift(&BivariatePoly::zero());
        assert!(zero.components.iter().all(|s| s.order() == SeriesOrder::Zero));
    }

    #[test]
    fn nu_certifies_by_division_when_inexact() {
        let b = Branch::new(
            0,
            BivariatePoly::parse("Y^2 - X^3").unwrap(),
            TruncatedSeries::from_terms([(2, q(1))], Some(12)),
            TruncatedSeries::from_terms([(3, q(1))], Some(12)),
        );
        let c = Curve::new(vec![b]).unwrap();
        let f = BivariatePoly::parse("Y^2 - X^3").unwrap();
        assert_eq!(c.nu_poly(&f.mul(&BivariatePoly::x())), vec![Valuation::Infinite]);
        assert!(matches!(
            c.nu_poly(&BivariatePoly::parse("Y^2 - X^3 + X^8").unwrap())[0],
            Valuation::AtLeast(_)
        ));
    }

    #[test]
    fn saito_pair_intersection() {
        let c = Curve::new(vec![
            branch(0, "Y^2 - X^3", &[(2, 1)], &[(3, 1)]),
            branch(1, "Y^2 - 2*X^3", &[(2, 2)], &[(3, 4)]),
        ])
        .unwrap();
        c.validate().unwrap();
        assert_eq!(c.intersection_multiplicity(0, 1).unwrap(), 6);
        let cusp_line = Curve::new(vec![
            branch(0, "Y^2 - X^3", &[(2, 1)], &[(3, 1)]),
            branch(1, "Y", &[(1, 1)], &[]),
        ])
        .unwrap();
        assert_eq!(cusp_line.intersection_multiplicity(0, 1).unwrap(), 3);
    }

    #[test]
    fn lifting_square_root_branch() {
        // Y^2 = X^3 + X^4 with x = t^2, y = t^3 sqrt(1 + t^2)
        let b = Branch::new(
            0,
            BivariatePoly::parse("Y^2 - X^3 - X^4").unwrap(),
            exact(&[(2, 1)]),
            TruncatedSeries::from_terms(
                [(3, q(1)), (5, Q::new(1.into(), 2.into()))],
                Some(7),
            ),
        );
        let lifted = b.lifted(30).unwrap();
        assert_eq!(lifted.y.trunc(), Some(30));
        assert_eq!(lifted.y.coeff(7), Q::new((-1).into(), 8.into()));
        assert!(matches!(
            lifted.eval(&lifted.poly).order(),
            SeriesOrder::ZeroToPrecision(t) if t >= 30
        ));
    }

    #[test]
    fn lifting_rejects_inconsistent_data() {
        let b = Branch::new(
            0,
            BivariatePoly::parse("Y^2 - X^3 - X^4").unwrap(),
            exact(&[(2, 1)]),
            TruncatedSeries::from_terms([(3, q(1)), (5, q(1))], Some(7)),
        );
        assert!(b.lifted(20).is_err());
    }
}
