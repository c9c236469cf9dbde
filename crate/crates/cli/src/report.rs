//! Report documents. Everything under `canonical` depends only on the input.

use curvetau_core::{
    lambda_shift, tjurina_formula, Analysis, DimcaVerdict, PartitionReport, Rational, ValueSetBox,
};
use serde::Serialize;
use serde_json::Value;

use crate::document::CurveDocument;
use crate::CliError;

/// A value set as its box `[min, conductor]` and run-length encoded bits
/// (row-major, last coordinate fastest, first run is members).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxRecord {
    pub min: Vec<i64>,
    pub conductor: Vec<i64>,
    pub dims: Vec<usize>,
    pub rle: Vec<usize>,
}

impl From<&ValueSetBox> for BoxRecord {
    fn from(b: &ValueSetBox) -> Self {
        BoxRecord {
            min: b.min().to_vec(),
            conductor: b.conductor().to_vec(),
            dims: b.dims().to_vec(),
            rle: b.bits_rle(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValueSetRecord {
    #[serde(rename = "box")]
    pub bx: BoxRecord,
    pub theta_rm: Vec<usize>,
    pub theta_fiber: Vec<usize>,
}

impl From<&ValueSetBox> for ValueSetRecord {
    fn from(b: &ValueSetBox) -> Self {
        ValueSetRecord {
            bx: b.into(),
            theta_rm: b.theta_via_rm().values,
            theta_fiber: b.theta_via_fiber().values,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchSummary {
    pub multiplicity: i64,
    pub semigroup: BoxRecord,
    pub mu: i64,
    pub tau: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pair {
    pub formula: i64,
    pub oracle: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TauRecord {
    pub formula: i64,
    pub oracle: i64,
    pub branch_terms: Vec<i64>,
    pub intersection_sum: i64,
    pub corrections: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Invariants {
    pub branches: Vec<BranchSummary>,
    pub intersections: Vec<Vec<i64>>,
    pub gamma: ValueSetRecord,
    pub delta: ValueSetRecord,
    pub jacobian_bound: Vec<i64>,
    pub lambda: BoxRecord,
    pub tau: TauRecord,
    pub milnor: Pair,
}

pub fn invariants(a: &Analysis<Rational>) -> Result<Invariants, CliError> {
    let t = tjurina_formula(a)?;
    let gamma = &a.semigroup.gamma.value_set;
    let delta = a.jacobian.value_set();
    let r = a.r();
    let branches = (0..r)
        .map(|i| BranchSummary {
            multiplicity: a.curve.multiplicities()[i],
            semigroup: (&a.semigroup.branches[i]).into(),
            mu: a.semigroup.mu[i],
            tau: t.branch_tau[i],
        })
        .collect();
    let intersection_sum = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).map(|(i, j)| t.intersections[i][j]).sum();
    Ok(Invariants {
        branches,
        intersections: t.intersections.clone(),
        gamma: gamma.into(),
        delta: delta.into(),
        jacobian_bound: a.jacobian.bound.clone(),
        lambda: (&lambda_shift(delta, gamma)).into(),
        tau: TauRecord {
            formula: t.tau,
            oracle: t.tau_oracle,
            branch_terms: t.branch_tau,
            intersection_sum,
            corrections: t.corrections,
        },
        milnor: Pair {
            formula: t.milnor.1,
            oracle: t.milnor.0,
        },
    })
}

/// One split, with branches numbered from 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionRecord {
    pub j: Vec<usize>,
    pub k: Vec<usize>,
    pub tau: i64,
    pub tau_j: i64,
    pub tau_k: i64,
    pub intersection: i64,
    pub cross_terms: Vec<i64>,
    pub lhs: i64,
    pub rhs: i64,
    pub slack: i64,
    /// `[term, I(f_k, f^J) - 1]` for the first branch of `K`.
    pub estimate: [i64; 2],
    /// `[term, I(f_k, f^J)]` for the others.
    pub later_terms: Vec<[i64; 2]>,
    pub certificates_hold: bool,
}

impl PartitionRecord {
    pub fn new(p: &PartitionReport, v: &DimcaVerdict) -> Self {
        let one_based = |s: &[usize]| s.iter().map(|i| i + 1).collect();
        PartitionRecord {
            j: one_based(&p.j),
            k: one_based(&p.k),
            tau: p.tau,
            tau_j: p.tau_j,
            tau_k: p.tau_k,
            intersection: p.intersection,
            cross_terms: p.cross_terms.clone(),
            lhs: v.lhs,
            rhs: v.rhs,
            slack: v.slack,
            estimate: [v.estimate.0, v.estimate.1],
            later_terms: v.later_terms.iter().map(|&(a, b)| [a, b]).collect(),
            certificates_hold: v.holds(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimcaRecord {
    pub partitions: Vec<PartitionRecord>,
    /// `[tau - sum tau_i, mu - sum mu_i]`.
    pub corollary: [i64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub total_ms: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub input: CurveDocument,
    pub canonical: T,
    pub timings: Timings,
}

/// Pretty JSON with arrays of scalars (and arrays of those) kept on one line.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("report types serialize");
    let mut out = String::new();
    render(&value, 0, &mut out);
    out
}

fn flat(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(items) => items.iter().all(|x| !x.is_object() && !x.is_array() || flat_scalar_array(x)),
        _ => true,
    }
}

fn flat_scalar_array(v: &Value) -> bool {
    v.as_array().is_some_and(|a| a.iter().all(|x| !x.is_object() && !x.is_array()))
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                render(item, indent + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        Value::Array(items) if !flat(v) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                render(item, indent + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                render(item, indent, out);
            }
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}
