//! Finite truncations of fractional ideals and exact value detection.
//!
//! A fractional ideal `I` is given by polynomial generators over the local
//! ring. Below a value window `[lo, hi)` per branch, `I` is represented by the
//! `Q`-span `W` of the truncated products `X^a Y^b g`. Whether `alpha` is the
//! value of some element is decided from dimensions alone: `alpha` is a value
//! iff `dim W_{>=alpha} > dim W_{>=alpha+e_i}` for every `i`, since a vector
//! space over an infinite field is not a finite union of proper subspaces.

use std::collections::BTreeMap;

use crate::curve::{Curve, Valuation};
use crate::error::{Error, Result};
use crate::linalg::{echelon_on_columns, EchelonBasis};
use crate::poly::BivariatePoly;
use crate::scalar::{axpy_neg, Field};
use crate::series::TruncatedSeries;

/// Engine limits shared by all computations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    /// Largest parametrization precision the engine may lift to.
    pub precision_cap: i64,
    /// Largest total degree for the Macaulay-matrix oracles.
    pub degree_cap: u32,
    /// Scales the value windows above the certified conductor bounds.
    pub bound_multiplier: i64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            precision_cap: 512,
            degree_cap: 64,
            bound_multiplier: 1,
        }
    }
}

/// A generator: a polynomial, optionally restricted to some branches
/// (multiplied by the sum of their idempotents).
#[derive(Clone, Debug, PartialEq)]
pub struct Generator<S: Field> {
    pub poly: BivariatePoly<S>,
    pub support: Option<Vec<usize>>,
}

impl<S: Field> Generator<S> {
    pub fn poly(poly: BivariatePoly<S>) -> Self {
        Generator { poly, support: None }
    }

    fn on(&self, i: usize) -> bool {
        self.support.as_ref().is_none_or(|s| s.contains(&i))
    }
}

/// Module generators of a fractional ideal over the local ring of `curve`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratingFamily<S: Field> {
    pub curve: Curve<S>,
    pub generators: Vec<Generator<S>>,
}

impl<S: Field> GeneratingFamily<S> {
    pub fn new(curve: Curve<S>, generators: Vec<Generator<S>>) -> Self {
        GeneratingFamily { curve, generators }
    }

    pub fn from_polys(curve: Curve<S>, polys: impl IntoIterator<Item = BivariatePoly<S>>) -> Self {
        Self::new(curve, polys.into_iter().map(Generator::poly).collect())
    }

    /// The local ring itself.
    pub fn local_ring(curve: &Curve<S>) -> Self {
        Self::from_polys(curve.clone(), [BivariatePoly::one()])
    }

    /// `prod_i O_i`, generated by the idempotents.
    pub fn normalization_of_components(curve: &Curve<S>) -> Self {
        let generators = (0..curve.r())
            .map(|i| Generator {
                poly: BivariatePoly::one(),
                support: Some(vec![i]),
            })
            .collect();
        Self::new(curve.clone(), generators)
    }

    /// `h O`.
    pub fn principal(curve: &Curve<S>, h: BivariatePoly<S>) -> Self {
        Self::from_polys(curve.clone(), [h])
    }

    /// Jacobian ideal `<f_X, f_Y> O` of the product equation.
    pub fn jacobian(curve: &Curve<S>) -> Self {
        let f = curve.equation();
        Self::from_polys(curve.clone(), [f.partial_x(), f.partial_y()])
    }

    /// Every generator multiplied by `h`.
    pub fn scaled(&self, h: &BivariatePoly<S>) -> Self {
        let generators = self
            .generators
            .iter()
            .map(|g| Generator {
                poly: g.poly.mul(h),
                support: g.support.clone(),
            })
            .collect();
        Self::new(self.curve.clone(), generators)
    }

    /// Per-branch minimum generator value: a lower bound for the value set.
    pub fn lows(&self, settings: &Settings) -> Result<Vec<i64>> {
        let mut curve = self.curve.clone();
        loop {
            let mut lows: Vec<Option<i64>> = vec![None; curve.r()];
            let mut unsure = false;
            for g in &self.generators {
                for (i, v) in curve.nu_poly(&g.poly).into_iter().enumerate() {
                    if !g.on(i) {
                        continue;
                    }
                    let v = match v {
                        Valuation::Finite(v) => v,
                        Valuation::AtLeast(_) => {
                            unsure = true;
                            continue;
                        }
                        Valuation::Infinite => continue,
                    };
                    lows[i] = Some(lows[i].map_or(v, |l: i64| l.min(v)));
                }
            }
            if !unsure {
                return lows
                    .into_iter()
                    .enumerate()
                    .map(|(i, l)| {
                        l.ok_or_else(|| {
                            Error::InvalidArgument(format!(
                                "family has no element that is nonzero on branch {i}"
                            ))
                        })
                    })
                    .collect();
            }
            let p = curve.precision().unwrap_or(0);
            curve = curve.with_precision((2 * p).max(8), settings.precision_cap)?;
        }
    }
}

/// Per-branch half-open value windows `[lo_i, hi_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl Window {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(l, h)| l <= h));
        Window { lo, hi }
    }

    pub fn r(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self, i: usize) -> usize {
        (self.hi[i] - self.lo[i]) as usize
    }

    pub fn lens(&self) -> Vec<usize> {
        (0..self.r()).map(|i| self.len(i)).collect()
    }

    fn offset(&self, i: usize) -> usize {
        (0..i).map(|j| self.len(j)).sum()
    }

    fn width(&self) -> usize {
        self.offset(self.r())
    }

    fn columns(&self, i: usize) -> std::ops::Range<usize> {
        self.offset(i)..self.offset(i) + self.len(i)
    }
}

/// Row-major multi-index helper, last coordinate fastest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Grid {
    pub dims: Vec<usize>,
    pub strides: Vec<usize>,
}

impl Grid {
    pub fn new(dims: Vec<usize>) -> Self {
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        Grid { dims, strides }
    }

    pub fn size(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn coords(&self, mut flat: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|s| {
                let c = flat / s;
                flat %= s;
                c
            })
            .collect()
    }
}

/// A basis of the truncated span `W`.
#[derive(Clone, Debug)]
pub struct SpanSpace<S: Field> {
    window: Window,
    basis: EchelonBasis<S>,
}

impl<S: Field> SpanSpace<S> {
    /// Spans `X^a Y^b g` for all generators, with `a + b` large enough that
    /// every omitted product lies beyond the window on every branch.
    pub fn build(fam: &GeneratingFamily<S>, window: Window, settings: &Settings) -> Result<Self> {
        let curve = &fam.curve;
        let r = curve.r();
        let need = window.hi.iter().copied().max().unwrap_or(0);
        let curve = curve.with_precision(need, settings.precision_cap)?;
        let mult = curve.multiplicities();
        let degree = (0..r)
            .map(|i| {
                let span = (window.hi[i] - window.lo[i]).max(0);
                (span + mult[i] - 1) / mult[i]
            })
            .max()
            .unwrap_or(0) as usize;

        // gens[g][i]: generator g on branch i, None when outside its support
        let gens: Vec<Vec<Option<TruncatedSeries<S>>>> = fam
            .generators
            .iter()
            .map(|g| {
                (0..r)
                    .map(|i| g.on(i).then(|| curve.branch(i).eval(&g.poly)))
                    .collect()
            })
            .collect();
        let cut: Vec<i64> = (0..r).map(|i| window.hi[i] - window.lo[i].min(0)).collect();
        let powers = |s: &TruncatedSeries<S>, i: usize| {
            let mut out = vec![TruncatedSeries::one()];
            for k in 1..degree {
                let next = out[k - 1].mul(s).truncated(cut[i]);
                out.push(next);
            }
            out
        };
        let xs: Vec<_> = (0..r).map(|i| powers(&curve.branch(i).x, i)).collect();
        let ys: Vec<_> = (0..r).map(|i| powers(&curve.branch(i).y, i)).collect();

        let mut basis = EchelonBasis::new(window.width());
        for total in 0..degree {
            for a in 0..=total {
                let b = total - a;
                let monos: Vec<_> = (0..r).map(|i| xs[i][a].mul(&ys[i][b])).collect();
                for g in &gens {
                    let mut v = vec![S::zero(); window.width()];
                    let mut nonzero = false;
                    for i in 0..r {
                        let Some(gi) = &g[i] else { continue };
                        let prod = monos[i].mul(gi);
                        if prod.trunc().is_some_and(|t| t < window.hi[i]) {
                            return Err(Error::PrecisionExhausted {
                                context: format!("span products on branch {i}"),
                                needed: window.hi[i],
                                cap: settings.precision_cap,
                            });
                        }
                        let off = window.offset(i);
                        for (e, c) in prod.terms() {
                            if e >= window.lo[i] && e < window.hi[i] {
                                v[off + (e - window.lo[i]) as usize] = c.clone();
                                nonzero = true;
                            }
                        }
                    }
                    if nonzero {
                        basis.insert(v);
                    }
                }
            }
        }
        Ok(SpanSpace { window, basis })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn dim(&self) -> usize {
        self.basis.rank()
    }

    /// True when every vector of `other` lies in this span (same window).
    pub fn contains_span(&self, other: &SpanSpace<S>) -> bool {
        assert_eq!(self.window, other.window);
        other.basis.rows().all(|v| self.basis.contains(v.clone()))
    }

    /// `D(alpha) = dim W_{>=alpha}` on `prod [lo_i, hi_i]`, indexed by `alpha - lo`.
    fn rank_table(&self) -> (Grid, Vec<usize>) {
        let lens = self.window.lens();
        let grid = Grid::new(lens.iter().map(|l| l + 1).collect());
        let mut out = vec![0; grid.size()];
        let vecs: Vec<Vec<S>> = self.basis.rows().cloned().collect();
        fill(&lens, &grid.strides, 0, vecs, 0, &mut out);
        (grid, out)
    }

    /// Membership of every `alpha` in the window, by the rank-drop criterion.
    pub fn raw_values(&self) -> RawWindow {
        let (table_grid, d) = self.rank_table();
        let grid = Grid::new(self.window.lens());
        let r = self.window.r();
        let mut bits = vec![false; grid.size()];
        for (flat, bit) in bits.iter_mut().enumerate() {
            let idx = grid.coords(flat);
            let t = table_grid.flat(&idx);
            *bit = (0..r).all(|i| d[t] > d[t + table_grid.strides[i]]);
        }
        RawWindow {
            window: self.window.clone(),
            grid,
            bits,
        }
    }

    /// Orders on branch `i` of the elements of `W` that vanish on the branches in `vanish`.
    pub fn values_vanishing_on(&self, vanish: &[usize], i: usize) -> Vec<i64> {
        let killed: Vec<usize> = vanish.iter().flat_map(|&l| self.window.columns(l)).collect();
        let target = self.window.columns(i);
        let vecs: Vec<Vec<S>> = self
            .basis
            .rows()
            .map(|v| {
                killed
                    .iter()
                    .chain(target.clone().collect::<Vec<_>>().iter())
                    .map(|&c| v[c].clone())
                    .collect()
            })
            .collect();
        let mut tail = EchelonBasis::new(target.len());
        for (lead, v) in echelon_on_columns(vecs, 0..killed.len()) {
            if lead.is_none() {
                tail.insert(v[killed.len()..].to_vec());
            }
        }
        tail.pivots().map(|p| self.window.lo[i] + p as i64).collect()
    }
}

/// Membership bits over a whole window, before any clamping.
#[derive(Clone, Debug)]
pub struct RawWindow {
    window: Window,
    grid: Grid,
    bits: Vec<bool>,
}

impl RawWindow {
    pub fn window(&self) -> &Window {
        &self.window
    }

    /// `None` outside the window.
    pub fn get(&self, alpha: &[i64]) -> Option<bool> {
        let mut idx = Vec::with_capacity(alpha.len());
        for (i, &a) in alpha.iter().enumerate() {
            if a < self.window.lo[i] || a >= self.window.hi[i] {
                return None;
            }
            idx.push((a - self.window.lo[i]) as usize);
        }
        Some(self.bits[self.grid.flat(&idx)])
    }
}

/// Echelon rows keyed by their leading column within the first `width`
/// columns, plus the residues that vanish there (tails only).
struct TwoLevel<S> {
    width: usize,
    rows: BTreeMap<usize, Vec<S>>,
    vanishing: Vec<Vec<S>>,
}

impl<S: Field> TwoLevel<S> {
    fn new(width: usize) -> Self {
        TwoLevel {
            width,
            rows: BTreeMap::new(),
            vanishing: Vec::new(),
        }
    }

    fn add(&mut self, mut v: Vec<S>) {
        let mut at = 0;
        while let Some(p) = (at..self.width).find(|&k| !v[k].is_zero()) {
            match self.rows.get(&p) {
                Some(row) => {
                    let factor = v[p].clone() / row[p].clone();
                    axpy_neg(&mut v[p..], &factor, &row[p..]);
                    at = p + 1;
                }
                None => {
                    self.rows.insert(p, v);
                    return;
                }
            }
        }
        self.vanishing.push(v.split_off(self.width));
    }

    /// Fills `D` for every threshold of the two levels.
    fn sweep(&self, tail_len: usize, stride1: usize, stride2: usize, base: usize, out: &mut [usize]) {
        let mut basis = EchelonBasis::new(tail_len);
        let mut kernel = 0;
        for t in &self.vanishing {
            if !basis.insert(t.clone()) {
                kernel += 1;
            }
        }
        write_counts(&basis, kernel, tail_len, stride2, base + self.width * stride1, out);
        for a in (0..self.width).rev() {
            if let Some(row) = self.rows.get(&a) {
                if !basis.insert(row[self.width..].to_vec()) {
                    kernel += 1;
                }
            }
            write_counts(&basis, kernel, tail_len, stride2, base + a * stride1, out);
        }
    }
}

fn write_counts<S: Field>(
    basis: &EchelonBasis<S>,
    kernel: usize,
    len: usize,
    stride: usize,
    base: usize,
    out: &mut [usize],
) {
    let mut at_least = vec![0usize; len + 1];
    for p in basis.pivots() {
        at_least[p] += 1;
    }
    let mut acc = 0;
    for b in (0..=len).rev() {
        acc += at_least[b];
        out[base + b * stride] = kernel + acc;
    }
}

/// Recursive fill of `D` over branches `k..`, for the vectors `vecs` whose
/// columns are the windows of those branches. Every step is an invertible
/// operation on the list, so list length minus rank counts the kernel.
fn fill<S: Field>(
    lens: &[usize],
    strides: &[usize],
    k: usize,
    vecs: Vec<Vec<S>>,
    base: usize,
    out: &mut [usize],
) {
    match lens.len() - k {
        0 => out[base] = vecs.len(),
        1 => {
            let mut basis = EchelonBasis::new(lens[k]);
            let kernel = vecs.into_iter().filter(|v| !basis.insert(v.clone())).count();
            write_counts(&basis, kernel, lens[k], strides[k], base, out);
        }
        2 => {
            let mut two = TwoLevel::new(lens[k]);
            for v in vecs {
                two.add(v);
            }
            two.sweep(lens[k + 1], strides[k], strides[k + 1], base, out);
        }
        rest => {
            let width = lens[k];
            let mut buckets: Vec<Vec<Vec<S>>> = vec![Vec::new(); width + 1];
            for (lead, v) in echelon_on_columns(vecs, 0..width) {
                buckets[lead.unwrap_or(width)].push(v[width..].to_vec());
            }
            if rest == 3 {
                let mut two = TwoLevel::new(lens[k + 1]);
                for a in (0..=width).rev() {
                    for v in buckets[a].drain(..) {
                        two.add(v);
                    }
                    two.sweep(lens[k + 2], strides[k + 1], strides[k + 2], base + a * strides[k], out);
                }
            } else {
                let mut acc = Vec::new();
                for a in (0..=width).rev() {
                    acc.append(&mut buckets[a]);
                    fill(lens, strides, k + 1, acc.clone(), base + a * strides[k], out);
                }
            }
        }
    }
}
