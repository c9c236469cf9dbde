//! Colengths of ideals of `Q[[X,Y]]` by Macaulay-matrix truncation.
//!
//! `Q_d = dim R/(I + m^d)` is the number of monomials of degree `< d` minus
//! the rank of the products `X^a Y^b g` cut at degree `d`. The sequence is
//! nondecreasing, and `Q_d = Q_{d+1}` means `m^d ⊆ I + m^{d+1}`, hence
//! `m^d ⊆ I` by Nakayama; at that point `Q_d` is the colength of `I`.

use crate::error::{Error, Result};
use crate::linalg::EchelonBasis;
use crate::poly::BivariatePoly;
use crate::scalar::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Colength {
    pub colength: usize,
    /// A degree `k` with `m^k` contained in the ideal.
    pub power_in_ideal: u32,
}

fn column(a: u32, b: u32) -> usize {
    let s = (a + b) as usize;
    s * (s + 1) / 2 + b as usize
}

/// `dim R/(I + m^d)`.
fn truncated_colength<S: Field>(gens: &[BivariatePoly<S>], d: u32) -> usize {
    let monomials = (d as usize) * (d as usize + 1) / 2;
    let mut basis = EchelonBasis::new(monomials);
    for g in gens {
        let Some(ord) = g.order() else { continue };
        for s in 0..d.saturating_sub(ord) {
            for a in 0..=s {
                let prod = BivariatePoly::monomial(S::one(), a, s - a).mul(g).truncate_degree(d);
                let mut v = vec![S::zero(); monomials];
                for (x, y, c) in prod.terms() {
                    v[column(x, y)] = c.clone();
                }
                basis.insert(v);
            }
        }
    }
    monomials - basis.rank()
}

/// Colength of `<gens>` in the power series ring, if it is finite below `degree_cap`.
pub fn local_colength<S: Field>(gens: &[BivariatePoly<S>], degree_cap: u32) -> Result<Colength> {
    let mut previous = truncated_colength(gens, 0);
    for d in 1..=degree_cap {
        let q = truncated_colength(gens, d);
        if q == previous {
            return Ok(Colength {
                colength: q,
                power_in_ideal: d - 1,
            });
        }
        previous = q;
    }
    Err(Error::NonIsolated { degree_cap })
}

/// `dim Q[[X,Y]]/<f, f_X, f_Y>`.
pub fn tjurina_oracle<S: Field>(f: &BivariatePoly<S>, degree_cap: u32) -> Result<Colength> {
    local_colength(&[f.clone(), f.partial_x(), f.partial_y()], degree_cap)
}

/// `dim Q[[X,Y]]/<f_X, f_Y>`.
pub fn milnor_oracle<S: Field>(f: &BivariatePoly<S>, degree_cap: u32) -> Result<Colength> {
    local_colength(&[f.partial_x(), f.partial_y()], degree_cap)
}
