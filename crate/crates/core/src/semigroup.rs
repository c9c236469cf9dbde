//! Value semigroups of branches and of the whole curve.

use std::collections::BTreeSet;

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::scalar::Field;
use crate::span::{GeneratingFamily, Settings, SpanSpace, Window};
use crate::valueset::{value_set, ConductorBound, ValueSetBox, ValueSetComputation};

/// `Gamma_i = nu_i(O_i)` as a rank-one set.
///
/// With multiplicity `e = min(Gamma_i \ {0})`, the first run of `e`
/// consecutive values starts exactly at the conductor: adding multiples of
/// `e` fills everything above, and the integer before the conductor is a gap.
pub fn branch_semigroup<S: Field>(curve: &Curve<S>, i: usize, settings: &Settings) -> Result<ValueSetBox> {
    let sub = curve.subcurve(&[i])?;
    let e = sub.multiplicities()[0];
    let fam = GeneratingFamily::local_ring(&sub);
    let mut hi = 4 * e + 4;
    loop {
        let span = SpanSpace::build(&fam, Window::new(vec![0], vec![hi]), settings)?;
        let raw = span.raw_values();
        let values: BTreeSet<i64> = (0..hi).filter(|&v| raw.get(&[v]) == Some(true)).collect();
        let run_start = (0..=hi - e).find(|&s| (s..s + e).all(|v| values.contains(&v)));
        if let Some(s) = run_start {
            let set = ValueSetBox::rank_one(&values, hi - 1)?;
            if set.conductor()[0] != s {
                return Err(Error::OracleMismatch {
                    what: format!("conductor of branch {i} semigroup vs first run"),
                    formula: s,
                    oracle: set.conductor()[0],
                });
            }
            return Ok(set);
        }
        if 2 * hi > settings.precision_cap {
            return Err(Error::PrecisionExhausted {
                context: format!("semigroup of branch {i}"),
                needed: 2 * hi,
                cap: settings.precision_cap,
            });
        }
        hi *= 2;
    }
}

/// Semigroup data of a curve: branch semigroups, their conductors `mu_i`,
/// intersection multiplicities, and `Gamma = nu(O)`.
#[derive(Clone, Debug)]
pub struct SemigroupData<S: Field> {
    pub branches: Vec<ValueSetBox>,
    pub mu: Vec<i64>,
    pub intersections: Vec<Vec<i64>>,
    pub gamma: ValueSetComputation<S>,
}

impl<S: Field> SemigroupData<S> {
    /// `c(Gamma)_i = sum_{j != i} I(f_i, f_j) + mu_i`.
    pub fn conductor_formula(mu: &[i64], intersections: &[Vec<i64>]) -> Vec<i64> {
        mu.iter()
            .enumerate()
            .map(|(i, m)| m + intersections[i].iter().sum::<i64>())
            .collect()
    }
}

pub fn semigroup<S: Field>(curve: &Curve<S>, settings: &Settings) -> Result<SemigroupData<S>> {
    let branches = (0..curve.r())
        .map(|i| branch_semigroup(curve, i, settings))
        .collect::<Result<Vec<_>>>()?;
    let mu: Vec<i64> = branches.iter().map(|b| b.conductor()[0]).collect();
    let intersections = curve.intersection_matrix()?;
    let bound = SemigroupData::<S>::conductor_formula(&mu, &intersections);
    let gamma = value_set(
        &GeneratingFamily::local_ring(curve),
        &ConductorBound::Certified(bound.clone()),
        settings,
    )?;
    let c = gamma.value_set.conductor();
    if c != bound.as_slice() {
        let i = (0..c.len()).find(|&i| c[i] != bound[i]).unwrap_or(0);
        return Err(Error::OracleMismatch {
            what: format!("semigroup conductor coordinate {i}"),
            formula: bound[i],
            oracle: c[i],
        });
    }
    Ok(SemigroupData {
        branches,
        mu,
        intersections,
        gamma,
    })
}
