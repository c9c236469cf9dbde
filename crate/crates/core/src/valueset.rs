//! Value sets `E = nu(I)` as finite boxes, and their combinatorics.
//!
//! A value set is stored on the box `[min(E), c(E)]`. Membership beyond the
//! box follows from the clamp rule `alpha in E <=> inf(alpha, c(E)) in E`:
//! once a coordinate reaches the conductor it can be moved freely above it,
//! because elements of value at least `c(E)` all lie in the ideal.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::scalar::Field;
use crate::span::{GeneratingFamily, Grid, RawWindow, Settings, SpanSpace, Window};

pub type ValueVector = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueSetBox {
    min: ValueVector,
    conductor: ValueVector,
    grid: Grid,
    bits: Vec<bool>,
}

/// Which construction produced a [`ThetaVector`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaMethod {
    RelativeMaximals,
    Fibers,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaVector {
    pub values: Vec<usize>,
    pub method: ThetaMethod,
}

impl ValueSetBox {
    /// Builds the box of the set whose membership on `prod [lo_i, top_i]` is
    /// `member`, where `top` is at or above the conductor (so membership
    /// beyond `top` is given by clamping to `top`).
    pub fn from_membership(
        lo: ValueVector,
        top: ValueVector,
        member: impl Fn(&[i64]) -> bool,
    ) -> Result<Self> {
        let r = lo.len();
        let grid = Grid::new((0..r).map(|i| (top[i] - lo[i] + 1).max(0) as usize).collect());
        let point = |idx: &[usize]| -> ValueVector {
            idx.iter().zip(&lo).map(|(&a, l)| l + a as i64).collect()
        };
        let bits: Vec<bool> = (0..grid.size()).map(|f| member(&point(&grid.coords(f)))).collect();
        if !bits.iter().any(|&b| b) {
            return Err(Error::ConductorNotStabilized("no values in the window".into()));
        }
        // full[f]: every point above f (within the window) is a member
        let mut full = bits.clone();
        for f in (0..grid.size()).rev() {
            if !full[f] {
                continue;
            }
            let idx = grid.coords(f);
            full[f] = (0..r).all(|i| idx[i] + 1 == grid.dims[i] || full[f + grid.strides[i]]);
        }
        let min_idx = componentwise_min(&grid, &bits);
        let c_idx = componentwise_min(&grid, &full)
            .ok_or_else(|| Error::ConductorNotStabilized("window has no saturated corner".into()))?;
        let min_idx = min_idx.expect("nonempty");
        if !bits[grid.flat(&min_idx)] {
            return Err(Error::ConductorNotStabilized(
                "componentwise minimum is not a value".into(),
            ));
        }
        if !full[grid.flat(&c_idx)] {
            return Err(Error::ConductorNotStabilized(
                "saturated points do not form an orthant".into(),
            ));
        }
        let min = point(&min_idx);
        let conductor = point(&c_idx);
        let sub = Grid::new((0..r).map(|i| c_idx[i] + 1 - min_idx[i]).collect());
        let sub_bits = (0..sub.size())
            .map(|f| {
                let idx: Vec<usize> = sub.coords(f).iter().zip(&min_idx).map(|(a, m)| a + m).collect();
                bits[grid.flat(&idx)]
            })
            .collect();
        Ok(ValueSetBox {
            min,
            conductor,
            grid: sub,
            bits: sub_bits,
        })
    }

    /// A rank-one set from its members below `top`, which must be at or above the conductor.
    pub fn rank_one(values: &BTreeSet<i64>, top: i64) -> Result<Self> {
        let lo = *values
            .iter()
            .next()
            .ok_or_else(|| Error::ConductorNotStabilized("empty value set".into()))?;
        Self::from_membership(vec![lo], vec![top], |a| values.contains(&a[0]))
    }

    pub fn r(&self) -> usize {
        self.min.len()
    }

    pub fn min(&self) -> &[i64] {
        &self.min
    }

    pub fn conductor(&self) -> &[i64] {
        &self.conductor
    }

    /// Box extents `c_i - min_i + 1`.
    pub fn dims(&self) -> &[usize] {
        &self.grid.dims
    }

    /// Membership bits over the box in row-major order, last coordinate fastest.
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    fn index(&self, alpha: &[i64]) -> Option<Vec<usize>> {
        alpha
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                (a >= self.min[i]).then(|| (a.min(self.conductor[i]) - self.min[i]) as usize)
            })
            .collect()
    }

    pub fn contains(&self, alpha: &[i64]) -> bool {
        assert_eq!(alpha.len(), self.r());
        self.index(alpha).is_some_and(|idx| self.bits[self.grid.flat(&idx)])
    }

    fn point(&self, flat: usize) -> ValueVector {
        self.grid
            .coords(flat)
            .iter()
            .zip(&self.min)
            .map(|(&a, m)| m + a as i64)
            .collect()
    }

    /// Members inside the box, in row-major order.
    pub fn members(&self) -> impl Iterator<Item = ValueVector> + '_ {
        (0..self.bits.len()).filter(|&f| self.bits[f]).map(|f| self.point(f))
    }

    /// All box points, members or not.
    pub fn box_points(&self) -> impl Iterator<Item = ValueVector> + '_ {
        (0..self.bits.len()).map(|f| self.point(f))
    }

    /// `pr_J(E)` for strictly increasing indices `j`.
    pub fn project(&self, j: &[usize]) -> ValueSetBox {
        assert!(!j.is_empty() && j.windows(2).all(|w| w[0] < w[1]));
        if j.len() == self.r() {
            return self.clone();
        }
        let lo: Vec<i64> = j.iter().map(|&k| self.min[k]).collect();
        let top: Vec<i64> = j.iter().map(|&k| self.conductor[k]).collect();
        let grid = Grid::new(j.iter().map(|&k| self.grid.dims[k]).collect());
        let mut hit = vec![false; grid.size()];
        for f in (0..self.bits.len()).filter(|&f| self.bits[f]) {
            let idx = self.grid.coords(f);
            let sub: Vec<usize> = j.iter().map(|&k| idx[k]).collect();
            hit[grid.flat(&sub)] = true;
        }
        Self::from_membership(lo.clone(), top, |a| {
            let idx: Vec<usize> = a.iter().zip(&lo).map(|(x, l)| (x - l) as usize).collect();
            hit[grid.flat(&idx)]
        })
        .expect("projection of a value set is a value set")
    }

    /// Orthant-OR tables for every index mask; see [`FiberTables::nonempty`].
    pub fn fiber_tables(&self) -> FiberTables<'_> {
        let r = self.r();
        let tables = (0..1usize << r)
            .map(|mask| {
                let mut t = self.bits.clone();
                for k in (0..r).filter(|k| mask & (1 << k) == 0) {
                    for f in (0..t.len()).rev() {
                        let idx = self.grid.coords(f);
                        if idx[k] + 1 < self.grid.dims[k] && t[f + self.grid.strides[k]] {
                            t[f] = true;
                        }
                    }
                }
                t
            })
            .collect();
        FiberTables { set: self, tables }
    }

    pub fn closed_fiber_nonempty(&self, i: usize, alpha: &[i64]) -> bool {
        self.fiber_tables().nonempty(1 << i, alpha, false)
    }

    /// Points whose single-index fibers are all empty.
    pub fn maximal_points(&self) -> Vec<ValueVector> {
        let tables = self.fiber_tables();
        self.members()
            .filter(|a| tables.is_maximal(a))
            .collect()
    }

    /// Maximal points whose fibers over every index set of size at least two are nonempty.
    pub fn relative_maximals(&self) -> Vec<ValueVector> {
        let tables = self.fiber_tables();
        let r = self.r();
        self.members()
            .filter(|a| {
                tables.is_maximal(a)
                    && (0..1usize << r)
                        .filter(|m| m.count_ones() >= 2)
                        .all(|m| tables.nonempty(m, a, true))
            })
            .collect()
    }

    /// `Theta_i` as the number of last coordinates of relative maximals of
    /// the projections `E_J` with `i` the largest index of `J`.
    pub fn theta_via_rm(&self) -> ThetaVector {
        let r = self.r();
        let mut values = vec![0; r];
        for (i, value) in values.iter_mut().enumerate().skip(1) {
            let mut lasts = BTreeSet::new();
            for mask in 1usize..(1 << i) {
                let j: Vec<usize> = (0..i).filter(|k| mask & (1 << k) != 0).chain([i]).collect();
                for a in self.project(&j).relative_maximals() {
                    lasts.insert(*a.last().expect("nonempty point"));
                }
            }
            *value = lasts.len();
        }
        ThetaVector {
            values,
            method: ThetaMethod::RelativeMaximals,
        }
    }

    /// `Theta_i = #{z in E_i : the closed i-fiber of (c_1..c_{i-1}, z) in E_{1..i} is empty}`.
    pub fn theta_via_fiber(&self) -> ThetaVector {
        let r = self.r();
        let mut values = vec![0; r];
        for (i, value) in values.iter_mut().enumerate().skip(1) {
            let prefix: Vec<usize> = (0..=i).collect();
            let p = self.project(&prefix);
            let ei = self.project(&[i]);
            let tables = p.fiber_tables();
            let mut alpha: Vec<i64> = self.conductor[..i].to_vec();
            alpha.push(0);
            *value = (ei.min[0]..self.conductor[i])
                .filter(|&z| {
                    alpha[i] = z;
                    ei.contains(&[z]) && !tables.nonempty(1 << i, &alpha, false)
                })
                .count();
        }
        ThetaVector {
            values,
            method: ThetaMethod::Fibers,
        }
    }

    /// `nu_i(N_L)`: values on branch `i` of elements vanishing on the branches in `l`.
    pub fn nu_partial_n(&self, i: usize, l: &[usize]) -> ValueSetBox {
        assert!(!l.contains(&i));
        if l.is_empty() {
            return self.project(&[i]);
        }
        let mut j: Vec<usize> = l.iter().copied().chain([i]).collect();
        j.sort_unstable();
        j.dedup();
        let pos = j.iter().position(|&k| k == i).expect("i in J");
        let p = self.project(&j);
        let tables = p.fiber_tables();
        let mut alpha = p.conductor.clone();
        let values: BTreeSet<i64> = (p.min[pos]..=p.conductor[pos])
            .filter(|&z| {
                alpha[pos] = z;
                tables.nonempty(1 << pos, &alpha, false)
            })
            .collect();
        ValueSetBox::rank_one(&values, p.conductor[pos]).expect("contains the conductor")
    }

    /// `N_i = nu_i(N_{I \ {i}})`.
    pub fn n_set(&self, i: usize) -> ValueSetBox {
        let others: Vec<usize> = (0..self.r()).filter(|&k| k != i).collect();
        self.nu_partial_n(i, &others)
    }

    /// Number of gaps of `E_i`: integers at or above `min(E_i)` missing from `E_i`.
    pub fn gap_count(&self, i: usize) -> usize {
        let ei = self.project(&[i]);
        (ei.min[0]..ei.conductor[0]).filter(|&z| !ei.contains(&[z])).count()
    }

    /// `#(self \ other)` for rank-one sets.
    pub fn count_not_in(&self, other: &ValueSetBox) -> usize {
        assert!(self.r() == 1 && other.r() == 1);
        let top = self.conductor[0].max(other.conductor[0]);
        (self.min[0]..top)
            .filter(|&z| self.contains(&[z]) && !other.contains(&[z]))
            .count()
    }

    /// `E + shift`.
    pub fn translate(&self, shift: &[i64]) -> ValueSetBox {
        let add = |v: &[i64]| v.iter().zip(shift).map(|(a, b)| a + b).collect();
        ValueSetBox {
            min: add(&self.min),
            conductor: add(&self.conductor),
            grid: self.grid.clone(),
            bits: self.bits.clone(),
        }
    }

    /// Run-length encoding of the box bits, starting with a run of members
    /// (possibly of length zero).
    pub fn bits_rle(&self) -> Vec<usize> {
        let mut runs = Vec::new();
        let mut current = true;
        let mut len = 0;
        for &b in &self.bits {
            if b == current {
                len += 1;
            } else {
                runs.push(len);
                current = b;
                len = 1;
            }
        }
        runs.push(len);
        runs
    }
}

fn componentwise_min(grid: &Grid, set: &[bool]) -> Option<Vec<usize>> {
    let mut out: Option<Vec<usize>> = None;
    for f in (0..set.len()).filter(|&f| set[f]) {
        let idx = grid.coords(f);
        out = Some(match out {
            None => idx,
            Some(m) => m.iter().zip(&idx).map(|(a, b)| *a.min(b)).collect(),
        });
    }
    out
}

/// For each index mask `J`, `T_J(gamma)` tells whether some member agrees with
/// `gamma` on `J` and dominates it elsewhere.
pub struct FiberTables<'a> {
    set: &'a ValueSetBox,
    tables: Vec<Vec<bool>>,
}

impl FiberTables<'_> {
    /// Whether the fiber `F_J(E, alpha)` (strict off `J` when `open`) is nonempty.
    pub fn nonempty(&self, mask: usize, alpha: &[i64], open: bool) -> bool {
        let s = self.set;
        let mut idx = Vec::with_capacity(alpha.len());
        for (k, &a) in alpha.iter().enumerate() {
            if mask & (1 << k) != 0 {
                if a < s.min[k] {
                    return false;
                }
                idx.push((a.min(s.conductor[k]) - s.min[k]) as usize);
            } else {
                let want = if open { a + 1 } else { a };
                idx.push((want.clamp(s.min[k], s.conductor[k]) - s.min[k]) as usize);
            }
        }
        self.tables[mask][s.grid.flat(&idx)]
    }

    fn is_maximal(&self, alpha: &[i64]) -> bool {
        (0..self.set.r()).all(|i| !self.nonempty(1 << i, alpha, true))
    }
}

/// How the value window above the conductor is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConductorBound {
    /// A proven upper bound for the conductor.
    Certified(ValueVector),
    /// A starting guess, doubled until two consecutive windows agree.
    Search(ValueVector),
}

/// A value set together with the linear algebra it was read from.
#[derive(Clone, Debug)]
pub struct ValueSetComputation<S: Field> {
    pub bound: ValueVector,
    span: SpanSpace<S>,
    raw: RawWindow,
    pub value_set: ValueSetBox,
}

fn window_for(lows: &[i64], bound: &[i64], multiplier: i64) -> Window {
    let hi = lows
        .iter()
        .zip(bound)
        .map(|(&l, &u)| l + multiplier.max(1) * (u - l).max(0) + 1)
        .collect();
    Window::new(lows.to_vec(), hi)
}

fn compute_at<S: Field>(
    fam: &GeneratingFamily<S>,
    lows: &[i64],
    bound: &[i64],
    settings: &Settings,
) -> Result<ValueSetComputation<S>> {
    let window = window_for(lows, bound, settings.bound_multiplier);
    let span = SpanSpace::build(fam, window.clone(), settings)?;
    let raw = span.raw_values();
    let top: Vec<i64> = window.hi.iter().map(|h| h - 1).collect();
    let value_set = ValueSetBox::from_membership(window.lo.clone(), top, |a| {
        raw.get(a).expect("inside the window")
    })?;
    Ok(ValueSetComputation {
        bound: bound.to_vec(),
        span,
        raw,
        value_set,
    })
}

/// Computes `nu(I)` for the ideal generated by `fam`.
pub fn value_set<S: Field>(
    fam: &GeneratingFamily<S>,
    bound: &ConductorBound,
    settings: &Settings,
) -> Result<ValueSetComputation<S>> {
    let lows = fam.lows(settings)?;
    match bound {
        ConductorBound::Certified(u) => {
            let comp = compute_at(fam, &lows, u, settings)?;
            let c = comp.value_set.conductor();
            if c.iter().zip(u).any(|(a, b)| a > b) {
                return Err(Error::ConductorNotStabilized(format!(
                    "conductor {c:?} exceeds the certified bound {u:?}"
                )));
            }
            Ok(comp)
        }
        ConductorBound::Search(start) => {
            let mut u: Vec<i64> = start.iter().zip(&lows).map(|(a, l)| (*a).max(*l)).collect();
            let mut previous: Option<ValueSetComputation<S>> = None;
            loop {
                if let Ok(comp) = compute_at(fam, &lows, &u, settings) {
                    if let Some(prev) = &previous {
                        if prev.value_set == comp.value_set {
                            return Ok(comp);
                        }
                    }
                    previous = Some(comp);
                }
                let next: Vec<i64> = u.iter().zip(&lows).map(|(x, l)| l + 2 * (x - l).max(1)).collect();
                if next.iter().any(|&x| x >= settings.precision_cap) {
                    return Err(Error::ConductorNotStabilized(format!(
                        "no stable value set below the precision cap {}",
                        settings.precision_cap
                    )));
                }
                u = next;
            }
        }
    }
}

/// Outcome of the structural cross-checks on a computed value set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    /// `c(N_i)` from the linear-algebra route, one per branch.
    pub n_set_conductors: ValueVector,
    /// Number of `(i, delta)` pairs on which the four box-out conditions were compared.
    pub box_out_points: usize,
    /// Number of box points on which the sandwich inclusions were checked.
    pub sandwich_points: usize,
}

impl<S: Field> ValueSetComputation<S> {
    pub fn window(&self) -> &Window {
        self.raw.window()
    }

    /// Membership read directly from the rank table, without clamping.
    pub fn raw_contains(&self, alpha: &[i64]) -> Option<bool> {
        self.raw.get(alpha)
    }

    /// `nu_i(N_L)` from the subspace of the span vanishing on the branches in `l`.
    pub fn n_set_la(&self, i: usize, l: &[usize]) -> Result<ValueSetBox> {
        let values: BTreeSet<i64> = self.span.values_vanishing_on(l, i).into_iter().collect();
        ValueSetBox::rank_one(&values, self.window().hi[i] - 1)
    }

    /// Cross-checks the conductor against the `N_i` conductors, the four
    /// equivalent conditions on the boundary of the conductor box, and
    /// `prod N_i ⊆ E ⊆ prod E_i`.
    pub fn check_structure(&self) -> Result<StructureReport> {
        let e = &self.value_set;
        let r = e.r();
        let window = self.window();
        let mismatch = |what: String, formula: i64, oracle: i64| Error::OracleMismatch {
            what,
            formula,
            oracle,
        };
        let mut la = Vec::with_capacity(r);
        for i in 0..r {
            let others: Vec<usize> = (0..r).filter(|&k| k != i).collect();
            let n_la = self.n_set_la(i, &others)?;
            let n_box = e.n_set(i);
            if n_la != n_box {
                return Err(mismatch(format!("N_{i}: linear algebra vs box fibers"), 0, 1));
            }
            if n_la.conductor()[0] != e.conductor()[i] {
                return Err(mismatch(
                    format!("conductor coordinate {i} vs c(N_{i})"),
                    n_la.conductor()[0],
                    e.conductor()[i],
                ));
            }
            la.push(n_la);
        }
        let rho: Vec<i64> = la.iter().map(|n| n.conductor()[0]).collect();

        let mut box_out_points = 0;
        for i in 0..r {
            let others: Vec<usize> = (0..r).filter(|&k| k != i).collect();
            let ext = Grid::new(others.iter().map(|&j| (window.hi[j] - rho[j]) as usize).collect());
            for delta in e.min()[i]..=e.conductor()[i] {
                let mut alpha = rho.clone();
                alpha[i] = delta;
                let c1 = la[i].contains(&[delta]);
                let mut all = true;
                let mut any = false;
                for f in 0..ext.size() {
                    let idx = ext.coords(f);
                    let mut beta = alpha.clone();
                    for (k, &j) in others.iter().enumerate() {
                        beta[j] = rho[j] + idx[k] as i64;
                    }
                    let m = self.raw.get(&beta).expect("inside the window");
                    all &= m;
                    any |= m;
                }
                let c4 = self.raw.get(&alpha).expect("inside the window");
                if !(c1 == all && all == any && any == c4) {
                    return Err(Error::OracleMismatch {
                        what: format!("box-out conditions at branch {i}, delta {delta}: {c1} {all} {any} {c4}"),
                        formula: c1 as i64,
                        oracle: c4 as i64,
                    });
                }
                box_out_points += 1;
            }
        }

        let projections: Vec<ValueSetBox> = (0..r).map(|i| e.project(&[i])).collect();
        let mut sandwich_points = 0;
        for alpha in e.box_points() {
            let member = e.contains(&alpha);
            let in_n = (0..r).all(|i| la[i].contains(&[alpha[i]]));
            let in_proj = (0..r).all(|i| projections[i].contains(&[alpha[i]]));
            if (in_n && !member) || (member && !in_proj) {
                return Err(Error::OracleMismatch {
                    what: format!("sandwich inclusions at {alpha:?}"),
                    formula: member as i64,
                    oracle: in_n as i64,
                });
            }
            sandwich_points += 1;
        }
        Ok(StructureReport {
            n_set_conductors: rho,
            box_out_points,
            sandwich_points,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_points(lo: Vec<i64>, top: Vec<i64>, pts: &[&[i64]]) -> ValueSetBox {
        ValueSetBox::from_membership(lo, top, |a| pts.contains(&a)).unwrap()
    }

    /// Node semigroup on `[0,2]^2`: `(0,0)` and everything `>= (1,1)`.
    fn node_gamma() -> ValueSetBox {
        ValueSetBox::from_membership(vec![0, 0], vec![2, 2], |a| a == [0, 0] || (a[0] >= 1 && a[1] >= 1))
            .unwrap()
    }

    #[test]
    fn node_box_basics() {
        let g = node_gamma();
        assert_eq!(g.min(), &[0, 0]);
        assert_eq!(g.conductor(), &[1, 1]);
        assert!(g.contains(&[7, 3]));
        assert!(!g.contains(&[0, 5]));
        assert_eq!(g.project(&[0]).conductor(), &[0]);
        assert_eq!(g.maximal_points(), vec![vec![0, 0]]);
        assert_eq!(g.relative_maximals(), vec![vec![0, 0]]);
        assert!(!g.closed_fiber_nonempty(1, &[1, 0]));
        assert!(g.closed_fiber_nonempty(0, &[1, 1]));
    }

    #[test]
    fn theta_on_node_and_rank_one() {
        let g = node_gamma();
        assert_eq!(g.theta_via_rm().values, vec![0, 1]);
        assert_eq!(g.theta_via_fiber().values, vec![0, 1]);
        let cusp = ValueSetBox::rank_one(&[0, 2, 3, 4, 5].into_iter().collect(), 5).unwrap();
        assert_eq!(cusp.conductor(), &[2]);
        assert_eq!(cusp.theta_via_rm().values, vec![0]);
        assert_eq!(cusp.gap_count(0), 1);
    }

    #[test]
    fn full_lattice_has_no_maximal_points() {
        let e = ValueSetBox::from_membership(vec![0, 0], vec![3, 3], |_| true).unwrap();
        assert_eq!(e.conductor(), &[0, 0]);
        assert!(e.maximal_points().is_empty());
    }

    #[test]
    fn n_sets_of_node() {
        let g = node_gamma();
        let n2 = g.n_set(1);
        assert_eq!(n2.min(), &[1]);
        assert_eq!(n2.conductor(), &[1]);
        assert_eq!(g.nu_partial_n(1, &[]), g.project(&[1]));
    }

    #[test]
    fn rle_round_trip_shape() {
        let e = from_points(vec![0], vec![3], &[&[0], &[2], &[3]]);
        assert_eq!(e.conductor(), &[2]);
        assert_eq!(e.bits_rle(), vec![1, 1, 1]);
        let t = e.translate(&[5]);
        assert_eq!(t.min(), &[5]);
        assert!(t.contains(&[8]) && !t.contains(&[6]));
    }
}
