//! Tjurina and Milnor numbers, their decomposition along the branches, and
//! the bound on `tau(C) - tau(C_J) - tau(C_K)`.

use crate::curve::{Curve, Valuation};
use crate::error::{Error, Result};
use crate::macaulay::{milnor_oracle, tjurina_oracle, Colength};
use crate::poly::BivariatePoly;
use crate::scalar::Field;
use crate::semigroup::{branch_semigroup, semigroup, SemigroupData};
use crate::span::{GeneratingFamily, Settings};
use crate::valueset::{value_set, ConductorBound, ValueSetBox, ValueSetComputation};

fn mismatch(what: impl Into<String>, formula: i64, oracle: i64) -> Error {
    Error::OracleMismatch {
        what: what.into(),
        formula,
        oracle,
    }
}

fn ensure(what: impl Into<String>, formula: i64, oracle: i64) -> Result<()> {
    if formula == oracle {
        Ok(())
    } else {
        Err(mismatch(what, formula, oracle))
    }
}

/// Linear forms `X`, `Y`, `X + cY` tried for the conductor bound.
fn linear_forms<S: Field>(count: i64) -> Vec<BivariatePoly<S>> {
    let mut out = vec![BivariatePoly::x(), BivariatePoly::y()];
    for c in 1..=count {
        for s in [c, -c] {
            out.push(BivariatePoly::x().add(&BivariatePoly::y().scale(&S::from_int(s))));
        }
    }
    out
}

/// A bound on `c(nu(J(f)))` from `m^k ⊆ <f, f_X, f_Y>`: for a non-zero-divisor
/// `l` of degree one, `l^k O ⊆ J(f)`, so `c(J(f)) <= k nu(l) + c(Gamma)`.
pub fn jacobian_conductor_bound<S: Field>(
    curve: &Curve<S>,
    gamma_conductor: &[i64],
    power_in_ideal: u32,
) -> Result<Vec<i64>> {
    let mut best: Option<Vec<i64>> = None;
    for l in linear_forms::<S>(curve.r() as i64 + 1) {
        let vals: Option<Vec<i64>> = curve.nu_poly(&l).into_iter().map(Valuation::finite).collect();
        let Some(vals) = vals else { continue };
        let u: Vec<i64> = vals
            .iter()
            .zip(gamma_conductor)
            .map(|(v, c)| power_in_ideal as i64 * v + c)
            .collect();
        best = Some(match best {
            None => u,
            Some(b) => b.iter().zip(&u).map(|(a, b)| *a.min(b)).collect(),
        });
    }
    best.ok_or_else(|| Error::InvalidArgument("no regular linear form among the candidates".into()))
}

/// `J(f)` on the curve, with its value set `Delta`.
#[derive(Clone, Debug)]
pub struct JacobianIdeal<S: Field> {
    pub gens: GeneratingFamily<S>,
    pub bound: Vec<i64>,
    pub delta: ValueSetComputation<S>,
    pub tjurina: Colength,
}

impl<S: Field> JacobianIdeal<S> {
    pub fn value_set(&self) -> &ValueSetBox {
        &self.delta.value_set
    }

    /// `Delta_i`, the projection on branch `i`.
    pub fn delta_i(&self, i: usize) -> ValueSetBox {
        self.delta.value_set.project(&[i])
    }
}

pub fn jacobian<S: Field>(
    curve: &Curve<S>,
    gamma_conductor: &[i64],
    settings: &Settings,
) -> Result<JacobianIdeal<S>> {
    let tjurina = tjurina_oracle(&curve.equation(), settings.degree_cap)?;
    let bound = jacobian_conductor_bound(curve, gamma_conductor, tjurina.power_in_ideal)?;
    let gens = GeneratingFamily::jacobian(curve);
    let delta = value_set(&gens, &ConductorBound::Certified(bound.clone()), settings)?;
    Ok(JacobianIdeal {
        gens,
        bound,
        delta,
        tjurina,
    })
}

/// Everything the decomposition formulas read: semigroups, intersection
/// numbers, `Delta`, and the Macaulay oracles.
#[derive(Clone, Debug)]
pub struct Analysis<S: Field> {
    pub curve: Curve<S>,
    pub settings: Settings,
    pub semigroup: SemigroupData<S>,
    pub jacobian: JacobianIdeal<S>,
    /// `J(f_i)` on the branch alone.
    pub branch_jacobians: Vec<JacobianIdeal<S>>,
    pub milnor_oracle: usize,
}

impl<S: Field> Analysis<S> {
    pub fn new(curve: &Curve<S>, settings: &Settings) -> Result<Self> {
        let semigroup = semigroup(curve, settings)?;
        let jac = jacobian(curve, semigroup.gamma.value_set.conductor(), settings)?;
        let branch_jacobians = (0..curve.r())
            .map(|i| jacobian(&curve.subcurve(&[i])?, &[semigroup.mu[i]], settings))
            .collect::<Result<Vec<_>>>()?;
        let milnor_oracle = milnor_oracle(&curve.equation(), settings.degree_cap)?.colength;
        let analysis = Analysis {
            curve: curve.clone(),
            settings: settings.clone(),
            semigroup,
            jacobian: jac,
            branch_jacobians,
            milnor_oracle,
        };
        analysis.check_branch_projections()?;
        Ok(analysis)
    }

    pub fn r(&self) -> usize {
        self.curve.r()
    }

    pub fn intersections(&self) -> &[Vec<i64>] {
        &self.semigroup.intersections
    }

    /// `nu_i(prod_{j in set} f_j)`.
    pub fn nu_product(&self, i: usize, set: &[usize]) -> i64 {
        set.iter().filter(|&&j| j != i).map(|&j| self.intersections()[i][j]).sum()
    }

    /// `Delta_i = nu_i(prod_{j != i} f_j) + nu_i(J(f_i))`.
    fn check_branch_projections(&self) -> Result<()> {
        let all: Vec<usize> = (0..self.r()).collect();
        for i in 0..self.r() {
            let shift = self.nu_product(i, &all);
            let expected = self.branch_jacobians[i].value_set().translate(&[shift]);
            let got = self.jacobian.delta_i(i);
            ensure(format!("min of Delta_{i}"), expected.min()[0], got.min()[0])?;
            ensure(format!("conductor of Delta_{i}"), expected.conductor()[0], got.conductor()[0])?;
            if expected != got {
                return Err(mismatch(format!("Delta_{i} vs shifted branch Jacobian"), 0, 1));
            }
        }
        Ok(())
    }

    pub fn tau_oracle(&self) -> i64 {
        self.jacobian.tjurina.colength as i64
    }

    /// `tau(C_i) = #(Gamma_i \ nu(J(f_i)))`, checked against the branch oracle.
    pub fn branch_tau(&self, i: usize) -> Result<i64> {
        let value = self.semigroup.branches[i].count_not_in(self.branch_jacobians[i].value_set()) as i64;
        ensure(
            format!("tau of branch {i}"),
            value,
            self.branch_jacobians[i].tjurina.colength as i64,
        )?;
        Ok(value)
    }

    /// `#(Delta_i \ nu_i(N_[0,i)))` on `J(f)`.
    pub fn correction(&self, i: usize) -> i64 {
        let prefix: Vec<usize> = (0..i).collect();
        let d = &self.jacobian.delta.value_set;
        d.project(&[i]).count_not_in(&d.nu_partial_n(i, &prefix)) as i64
    }

    /// Milnor numbers of the branches: the conductors of their semigroups.
    pub fn branch_mu(&self) -> &[i64] {
        &self.semigroup.mu
    }

    /// `sum mu_i + 2 sum_{i<j} I_ij - r + 1`.
    pub fn milnor_formula(&self) -> i64 {
        let r = self.r();
        let pairs: i64 = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).map(|(i, j)| self.intersections()[i][j]).sum();
        self.branch_mu().iter().sum::<i64>() + 2 * pairs - r as i64 + 1
    }
}

/// Terms of `tau(C) = sum tau(C_i) + sum I + sum corrections`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TjurinaReport {
    pub tau: i64,
    pub tau_oracle: i64,
    pub branch_tau: Vec<i64>,
    pub intersections: Vec<Vec<i64>>,
    /// `#(Delta_i \ nu_i(N_[0,i)))`; the first entry is always zero.
    pub corrections: Vec<i64>,
    pub milnor: (i64, i64),
    pub branch_mu: Vec<i64>,
}

pub fn tjurina_formula<S: Field>(a: &Analysis<S>) -> Result<TjurinaReport> {
    let r = a.r();
    let branch_tau = (0..r).map(|i| a.branch_tau(i)).collect::<Result<Vec<_>>>()?;
    let corrections: Vec<i64> = (0..r).map(|i| a.correction(i)).collect();
    let pairs: i64 = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).map(|(i, j)| a.intersections()[i][j]).sum();
    let tau = branch_tau.iter().sum::<i64>() + pairs + corrections.iter().sum::<i64>();
    ensure("tau: decomposition vs colength", tau, a.tau_oracle())?;
    let milnor = milnor(a)?;
    Ok(TjurinaReport {
        tau,
        tau_oracle: a.tau_oracle(),
        branch_tau,
        intersections: a.intersections().to_vec(),
        corrections,
        milnor,
        branch_mu: a.branch_mu().to_vec(),
    })
}

/// `(oracle, formula)` for the Milnor number; errors when they differ.
pub fn milnor<S: Field>(a: &Analysis<S>) -> Result<(i64, i64)> {
    let oracle = a.milnor_oracle as i64;
    let formula = a.milnor_formula();
    ensure("Milnor number", formula, oracle)?;
    Ok((oracle, formula))
}

/// Terms of `tau(C) = tau(C_J) + tau(C_K) + I(C_J, C_K) + cross terms`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionReport {
    /// Branch indices of `J` and `K` in the input curve.
    pub j: Vec<usize>,
    pub k: Vec<usize>,
    pub tau: i64,
    pub tau_j: i64,
    pub tau_k: i64,
    pub intersection: i64,
    /// One per branch of `K`, in order; the first is `#(Delta_k \ nu_k(N_J))`.
    pub cross_terms: Vec<i64>,
    /// `nu_k(f^J) = I(f_k, f^J)` for each branch of `K`.
    pub nu_fj: Vec<i64>,
    pub total: i64,
}

fn check_partition(r: usize, j: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut js = j.to_vec();
    js.sort_unstable();
    js.dedup();
    if js.is_empty() || js.len() >= r || js.iter().any(|&x| x >= r) {
        return Err(Error::InvalidArgument(format!(
            "{j:?} is not a proper nonempty subset of the {r} branches"
        )));
    }
    let ks = (0..r).filter(|x| !js.contains(x)).collect();
    Ok((js, ks))
}

/// Checks `Delta_i = nu_i(f^K) + Delta^J_i` and the same shift on `nu_i(N_{J \ i})`.
fn check_equal_lemma<S: Field>(whole: &Analysis<S>, part: &Analysis<S>, j: usize) -> Result<()> {
    let rest: Vec<usize> = (j..whole.r()).collect();
    let d = whole.jacobian.value_set();
    let dj = part.jacobian.value_set();
    for i in 0..j {
        let shift = [whole.nu_product(i, &rest)];
        if d.project(&[i]) != dj.project(&[i]).translate(&shift) {
            return Err(mismatch(format!("Delta_{i} vs Delta^J_{i} + nu_{i}(f^K)"), 0, 1));
        }
        let others: Vec<usize> = (0..j).filter(|&l| l != i).collect();
        if d.nu_partial_n(i, &others) != dj.nu_partial_n(i, &others).translate(&shift) {
            return Err(mismatch(format!("nu_{i}(N_(J-{i})) vs the J-side set + nu_{i}(f^K)"), 0, 1));
        }
    }
    Ok(())
}

/// Analysis of the permuted curve with `J` first, and of `C_J`, `C_K`.
pub struct PartitionAnalyses<S: Field> {
    pub whole: Analysis<S>,
    pub part_j: Analysis<S>,
    pub part_k: Analysis<S>,
    pub j: Vec<usize>,
    pub k: Vec<usize>,
}

impl<S: Field> PartitionAnalyses<S> {
    pub fn new(curve: &Curve<S>, j: &[usize], settings: &Settings) -> Result<Self> {
        let (js, ks) = check_partition(curve.r(), j)?;
        let order: Vec<usize> = js.iter().chain(&ks).copied().collect();
        let permuted = curve.subcurve(&order)?;
        let n = js.len();
        let whole = Analysis::new(&permuted, settings)?;
        let part_j = Analysis::new(&permuted.subcurve(&(0..n).collect::<Vec<_>>())?, settings)?;
        let part_k = Analysis::new(&permuted.subcurve(&(n..permuted.r()).collect::<Vec<_>>())?, settings)?;
        Ok(PartitionAnalyses {
            whole,
            part_j,
            part_k,
            j: js,
            k: ks,
        })
    }
}

pub fn tjurina_partition<S: Field>(p: &PartitionAnalyses<S>) -> Result<PartitionReport> {
    let a = &p.whole;
    let n = p.j.len();
    let r = a.r();
    check_equal_lemma(a, &p.part_j, n)?;
    let tau_j = tjurina_formula(&p.part_j)?.tau;
    let tau_k = tjurina_formula(&p.part_k)?.tau;
    let first: Vec<usize> = (0..n).collect();
    let nu_fj: Vec<i64> = (n..r).map(|k| a.nu_product(k, &first)).collect();
    let intersection = nu_fj.iter().sum();
    let d = a.jacobian.value_set();
    let cross_terms: Vec<i64> = (n..r)
        .map(|k| {
            let all: Vec<usize> = (0..k).collect();
            let tail: Vec<usize> = (n..k).collect();
            d.nu_partial_n(k, &tail).count_not_in(&d.nu_partial_n(k, &all)) as i64
        })
        .collect();
    let total = tau_j + tau_k + intersection + cross_terms.iter().sum::<i64>();
    ensure(format!("tau via the split {:?} | {:?}", p.j, p.k), total, a.tau_oracle())?;
    Ok(PartitionReport {
        j: p.j.clone(),
        k: p.k.clone(),
        tau: a.tau_oracle(),
        tau_j,
        tau_k,
        intersection,
        cross_terms,
        nu_fj,
        total,
    })
}

/// `tau(C) - tau(C_J) - tau(C_K) <= 2 I(C_J, C_K) - 1` and its certificates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimcaVerdict {
    pub lhs: i64,
    pub rhs: i64,
    pub slack: i64,
    /// `(term, I(f_k, f^J) - 1)` for the first branch of `K`.
    pub estimate: (i64, i64),
    /// `(term, I(f_k, f^J))` for the remaining branches of `K`.
    pub later_terms: Vec<(i64, i64)>,
    /// `(tau - sum tau_i, mu - sum mu_i)`.
    pub corollary: (i64, i64),
}

impl DimcaVerdict {
    pub fn holds(&self) -> bool {
        self.slack >= 0
            && self.estimate.0 <= self.estimate.1
            && self.later_terms.iter().all(|(t, b)| t <= b)
            && self.corollary.0 <= self.corollary.1
    }
}

pub fn dimca_check<S: Field>(p: &PartitionAnalyses<S>) -> Result<(PartitionReport, DimcaVerdict)> {
    let report = tjurina_partition(p)?;
    let lhs = report.tau - report.tau_j - report.tau_k;
    let rhs = 2 * report.intersection - 1;
    let estimate = (report.cross_terms[0], report.nu_fj[0] - 1);
    let later_terms = report.cross_terms[1..]
        .iter()
        .zip(&report.nu_fj[1..])
        .map(|(&t, &b)| (t, b))
        .collect();
    let whole = tjurina_formula(&p.whole)?;
    let corollary = (
        whole.tau - whole.branch_tau.iter().sum::<i64>(),
        whole.milnor.0 - whole.branch_mu.iter().sum::<i64>(),
    );
    Ok((
        report,
        DimcaVerdict {
            lhs,
            rhs,
            slack: rhs - lhs,
            estimate,
            later_terms,
            corollary,
        },
    ))
}

/// Both sides of `nu_i(h_Y (f_i)_X - h_X (f_i)_Y) = nu_i(h) + mu_i - 1`.
pub fn delorme_check<S: Field>(
    curve: &Curve<S>,
    i: usize,
    h: &BivariatePoly<S>,
    settings: &Settings,
) -> Result<(i64, i64)> {
    if h.is_zero() || !h.coeff(0, 0).is_zero() {
        return Err(Error::InvalidArgument("h must be a nonzero element of the maximal ideal".into()));
    }
    let sub = curve.subcurve(&[i])?;
    let fi = &sub.branch(0).poly;
    let w = h.partial_y().mul(&fi.partial_x()).sub(&h.partial_x().mul(&fi.partial_y()));
    let finite = |v: Valuation, what: &str| -> Result<i64> {
        match v {
            Valuation::Finite(o) => Ok(o),
            Valuation::AtLeast(t) => Err(Error::PrecisionExhausted {
                context: format!("{what} on branch {i}"),
                needed: t + 1,
                cap: t,
            }),
            Valuation::Infinite => Err(Error::InvalidArgument(format!("{what} vanishes on branch {i}"))),
        }
    };
    let lhs = finite(sub.nu_poly(&w)[0], "the Jacobian determinant")?;
    let mu = branch_semigroup(&sub, 0, settings)?.conductor()[0];
    let rhs = finite(sub.nu_poly(h)[0], "h")? + mu - 1;
    Ok((lhs, rhs))
}

/// `Lambda = Delta - c(Gamma) + (1, ..., 1)`.
pub fn lambda_shift(delta: &ValueSetBox, gamma: &ValueSetBox) -> ValueSetBox {
    let shift: Vec<i64> = gamma.conductor().iter().map(|c| 1 - c).collect();
    delta.translate(&shift)
}

/// All proper subsets containing branch 0, so that each unordered split is listed once.
pub fn all_partitions(r: usize) -> Vec<Vec<usize>> {
    if r < 2 {
        return Vec::new();
    }
    (0..(1usize << (r - 1)) - 1)
        .map(|mask| {
            std::iter::once(0)
                .chain((1..r).filter(|&b| mask >> (b - 1) & 1 == 1))
                .collect()
        })
        .collect()
}
