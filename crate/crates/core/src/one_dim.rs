//! Exact projections on the real line.
//!
//! For finitely supported measures every object here is piecewise constant or
//! piecewise linear on the merged grid of cumulative weights, so the projections
//! are computed exactly up to floating-point rounding.

use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, MERGE_TOL};

/// Grid points closer than this are identified.
const GRID_TOL: f64 = 8.0 * f64::EPSILON;
/// Slack of the integrated-quantile convex-order test, relative to `1 + max |x|`.
pub const CX_TOL: f64 = 1e-9;

/// Left-continuous quantile function `u ↦ inf{x : F(x) ≥ u}` of a discrete measure.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantileFunction {
    /// `0 = u₀ < u₁ < … < u_k = 1`.
    breakpoints: Vec<f64>,
    /// Value on `(u_{j−1}, u_j]`.
    values: Vec<f64>,
}

impl QuantileFunction {
    /// Assembles from pieces, merging adjacent pieces whose values agree within
    /// the atom-merging tolerance.
    pub fn from_pieces(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::DimensionMismatch {
                expected: values.len() + 1,
                got: breakpoints.len(),
            });
        }
        let mut bp = vec![0.0];
        let mut vals: Vec<f64> = Vec::with_capacity(values.len());
        for (j, &v) in values.iter().enumerate() {
            let hi = breakpoints[j + 1];
            let width = hi - breakpoints[j];
            if width <= 0.0 {
                continue;
            }
            match vals.last_mut() {
                Some(last) if (v - *last).abs() <= MERGE_TOL => {
                    // width-weighted average keeps the mean
                    let lo = bp[bp.len() - 2];
                    let prev = *bp.last().unwrap() - lo;
                    *last = (*last * prev + v * width) / (prev + width);
                    *bp.last_mut().unwrap() = hi;
                }
                _ => {
                    vals.push(v);
                    bp.push(hi);
                }
            }
        }
        *bp.last_mut().unwrap() = 1.0;
        Ok(Self {
            breakpoints: bp,
            values: vals,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn pieces(&self) -> usize {
        self.values.len()
    }

    /// Index of the piece containing `u` (left-continuous).
    fn piece_at(&self, u: f64) -> usize {
        let k = self.breakpoints[1..].partition_point(|&b| b < u);
        k.min(self.values.len() - 1)
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.values[self.piece_at(u)]
    }

    /// `∫₀ᵘ F⁻¹`.
    pub fn integral_to(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for (j, &v) in self.values.iter().enumerate() {
            let (lo, hi) = (self.breakpoints[j], self.breakpoints[j + 1]);
            if u <= lo {
                break;
            }
            acc += v * (hi.min(u) - lo);
        }
        acc
    }

    pub fn mean(&self) -> f64 {
        self.integral_to(1.0)
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    /// The measure whose quantile function this is.
    pub fn to_measure(&self) -> Result<DiscreteMeasure> {
        let weights: Vec<f64> = self.breakpoints.windows(2).map(|w| w[1] - w[0]).collect();
        DiscreteMeasure::from_1d(&self.values, &weights)
    }
}

pub fn quantile_of(measure: &DiscreteMeasure) -> Result<QuantileFunction> {
    let xs = measure.values_1d()?;
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut breakpoints = Vec::with_capacity(xs.len() + 1);
    breakpoints.push(0.0);
    let mut cum = 0.0;
    for &i in &order {
        cum += measure.weights()[i];
        breakpoints.push(cum);
    }
    let values = order.iter().map(|&i| xs[i]).collect();
    QuantileFunction::from_pieces(breakpoints, values)
}

/// Continuous piecewise-linear function on `[0, 1]` given by its nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct GFunction {
    breakpoints: Vec<f64>,
    nodes: Vec<f64>,
}

impl GFunction {
    pub fn new(breakpoints: Vec<f64>, nodes: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != nodes.len() || breakpoints.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: breakpoints.len().max(2),
                got: nodes.len(),
            });
        }
        Ok(Self { breakpoints, nodes })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn slopes(&self) -> Vec<f64> {
        (0..self.nodes.len() - 1)
            .map(|j| {
                (self.nodes[j + 1] - self.nodes[j]) / (self.breakpoints[j + 1] - self.breakpoints[j])
            })
            .collect()
    }

    pub fn eval(&self, u: f64) -> f64 {
        let bp = &self.breakpoints;
        let j = bp[1..].partition_point(|&b| b < u).min(bp.len() - 2);
        let t = (u - bp[j]) / (bp[j + 1] - bp[j]);
        self.nodes[j] + t * (self.nodes[j + 1] - self.nodes[j])
    }

    /// Left derivative `∂₋G(u)`: slope of the piece ending at `u`.
    pub fn left_derivative(&self, u: f64) -> f64 {
        let bp = &self.breakpoints;
        let j = bp[1..].partition_point(|&b| b < u).min(bp.len() - 2);
        (self.nodes[j + 1] - self.nodes[j]) / (bp[j + 1] - bp[j])
    }

    pub fn is_convex(&self, tol: f64) -> bool {
        self.slopes().windows(2).all(|w| w[0] <= w[1] + tol)
    }
}

/// Sorted union of two breakpoint sets with near-duplicates removed.
fn merge_grids(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for u in all {
        match out.last() {
            Some(&last) if u - last <= GRID_TOL => {}
            _ => out.push(u),
        }
    }
    *out.last_mut().unwrap() = 1.0;
    out
}

/// Values of two quantile functions on each interval of their common grid.
struct CommonGrid {
    breakpoints: Vec<f64>,
    first: Vec<f64>,
    second: Vec<f64>,
}

impl CommonGrid {
    fn new(a: &QuantileFunction, b: &QuantileFunction) -> Self {
        let breakpoints = merge_grids(a.breakpoints(), b.breakpoints());
        let mid = |j: usize| 0.5 * (breakpoints[j] + breakpoints[j + 1]);
        let n = breakpoints.len() - 1;
        let first = (0..n).map(|j| a.eval(mid(j))).collect();
        let second = (0..n).map(|j| b.eval(mid(j))).collect();
        Self {
            breakpoints,
            first,
            second,
        }
    }

    fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.breakpoints.windows(2).map(|w| w[1] - w[0])
    }
}

/// `G(u) = ∫₀ᵘ (F_μ⁻¹ − F_ν⁻¹)`.
pub fn g_function(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<GFunction> {
    let grid = CommonGrid::new(&quantile_of(mu)?, &quantile_of(nu)?);
    Ok(g_on_grid(&grid))
}

fn g_on_grid(grid: &CommonGrid) -> GFunction {
    let mut nodes = Vec::with_capacity(grid.breakpoints.len());
    nodes.push(0.0);
    let mut acc = 0.0;
    for (j, w) in grid.widths().enumerate() {
        acc += w * (grid.first[j] - grid.second[j]);
        nodes.push(acc);
    }
    GFunction {
        breakpoints: grid.breakpoints.clone(),
        nodes,
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Greatest convex minorant, by the monotone-chain lower hull of the nodes.
pub fn lower_convex_hull(g: &GFunction) -> GFunction {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(g.nodes.len());
    for p in g.breakpoints.iter().copied().zip(g.nodes.iter().copied()) {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let (breakpoints, nodes) = hull.into_iter().unzip();
    GFunction { breakpoints, nodes }
}

/// Everything computed on the way to the 1-d projections.
#[derive(Clone, Debug)]
pub struct Projection1d {
    pub quantile_mu: QuantileFunction,
    pub quantile_nu: QuantileFunction,
    pub g: GFunction,
    pub hull: GFunction,
    /// Quantile function of `I(μ, ν) ≤cx ν`.
    pub quantile_i: QuantileFunction,
    /// Quantile function of `J(ν, μ) ≥cx μ`.
    pub quantile_j: QuantileFunction,
    pub i: DiscreteMeasure,
    pub j: DiscreteMeasure,
    /// `∫₀¹ (∂₋G − ∂₋co G)²`.
    pub hull_gap: f64,
}

pub fn project_1d(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<(DiscreteMeasure, DiscreteMeasure)> {
    let p = project_1d_detailed(mu, nu)?;
    Ok((p.i, p.j))
}

pub fn project_1d_detailed(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Projection1d> {
    let quantile_mu = quantile_of(mu)?;
    let quantile_nu = quantile_of(nu)?;
    let grid = CommonGrid::new(&quantile_mu, &quantile_nu);
    let g = g_on_grid(&grid);
    let hull = lower_convex_hull(&g);
    let hull_slopes = hull.slopes();

    let n = grid.first.len();
    let mut i_vals = Vec::with_capacity(n);
    let mut j_vals = Vec::with_capacity(n);
    let mut hull_gap = 0.0;
    let mut seg = 0;
    for k in 0..n {
        // the hull segment containing grid interval k
        let hi = grid.breakpoints[k + 1];
        while hull.breakpoints[seg + 1] < hi - GRID_TOL {
            seg += 1;
        }
        let s = hull_slopes[seg];
        let diff = grid.first[k] - grid.second[k];
        hull_gap += (grid.breakpoints[k + 1] - grid.breakpoints[k]) * (diff - s) * (diff - s);
        i_vals.push(grid.first[k] - s);
        j_vals.push(grid.second[k] + s);
    }
    let quantile_i = QuantileFunction::from_pieces(grid.breakpoints.clone(), i_vals)?;
    let quantile_j = QuantileFunction::from_pieces(grid.breakpoints.clone(), j_vals)?;
    let i = quantile_i.to_measure()?;
    let j = quantile_j.to_measure()?;
    Ok(Projection1d {
        quantile_mu,
        quantile_nu,
        g,
        hull,
        quantile_i,
        quantile_j,
        i,
        j,
        hull_gap,
    })
}

/// `W₂²` between two quantile functions via the monotone coupling.
pub fn quantile_w2_squared(a: &QuantileFunction, b: &QuantileFunction) -> f64 {
    let grid = CommonGrid::new(a, b);
    grid.widths()
        .enumerate()
        .map(|(j, w)| w * (grid.first[j] - grid.second[j]).powi(2))
        .sum()
}

/// `W₂²` between two 1-d discrete measures.
pub fn w2_squared_1d(a: &DiscreteMeasure, b: &DiscreteMeasure) -> Result<f64> {
    Ok(quantile_w2_squared(&quantile_of(a)?, &quantile_of(b)?))
}

/// `η ≤cx ν` via `∫₀ᵘ F_η⁻¹ ≥ ∫₀ᵘ F_ν⁻¹` on the common grid, with equality at `u = 1`.
pub fn convex_order_leq_1d(eta: &DiscreteMeasure, nu: &DiscreteMeasure, tol: f64) -> Result<bool> {
    let grid = CommonGrid::new(&quantile_of(eta)?, &quantile_of(nu)?);
    let g = g_on_grid(&grid);
    let last = *g.nodes.last().unwrap();
    Ok(last.abs() <= tol && g.nodes.iter().all(|&v| v >= -tol))
}

/// Default slack for [`convex_order_leq_1d`] scaled to the supports.
pub fn default_cx_tol(eta: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let scale = eta
        .points()
        .iter()
        .chain(nu.points().iter())
        .fold(0.0_f64, |m, x| m.max(x.abs()));
    CX_TOL * (1.0 + scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(points: &[f64], weights: &[f64]) -> DiscreteMeasure {
        DiscreteMeasure::from_1d(points, weights).unwrap()
    }

    #[test]
    fn quantile_examples() {
        let q = quantile_of(&m(&[0.0], &[1.0])).unwrap();
        assert_eq!(q.values(), &[0.0]);
        let q = quantile_of(&m(&[1.0, -1.0], &[0.5, 0.5])).unwrap();
        assert_eq!(q.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_eq!(q.values(), &[-1.0, 1.0]);
        assert_eq!(q.eval(0.5), -1.0);
        assert_eq!(q.eval(0.50001), 1.0);
        let q = quantile_of(&m(&[0.0, 2.0], &[0.25, 0.75])).unwrap();
        assert_eq!(q.breakpoints(), &[0.0, 0.25, 1.0]);
        assert_eq!(q.values(), &[0.0, 2.0]);
    }

    #[test]
    fn g_and_hull_of_v_and_tent() {
        let sym = m(&[-1.0, 1.0], &[0.5, 0.5]);
        let zero = m(&[0.0], &[1.0]);
        let v = g_function(&sym, &zero).unwrap();
        assert_eq!(v.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_eq!(v.nodes(), &[0.0, -0.5, 0.0]);
        assert_eq!(lower_convex_hull(&v), v);

        let tent = g_function(&zero, &sym).unwrap();
        assert_eq!(tent.nodes(), &[0.0, 0.5, 0.0]);
        let hull = lower_convex_hull(&tent);
        assert_eq!(hull.breakpoints(), &[0.0, 1.0]);
        assert_eq!(hull.nodes(), &[0.0, 0.0]);
    }

    #[test]
    fn projections_of_simple_pairs() {
        let sym = m(&[-1.0, 1.0], &[0.5, 0.5]);
        let zero = m(&[0.0], &[1.0]);
        let (i, j) = project_1d(&sym, &zero).unwrap();
        assert_eq!(i, zero);
        assert_eq!(j, sym);
        let (i, j) = project_1d(&zero, &sym).unwrap();
        assert_eq!(i, zero);
        assert_eq!(j, sym);

        let two = m(&[0.0, 2.0], &[0.5, 0.5]);
        let p = project_1d_detailed(&two, &zero).unwrap();
        // G = 2(u − ½)₊ is already convex
        assert_eq!(p.hull, p.g);
        assert_eq!(p.i, zero);
        assert_eq!(p.j, two);
        assert_eq!(w2_squared_1d(&two, &p.i).unwrap(), 2.0);
        assert_eq!(w2_squared_1d(&zero, &p.j).unwrap(), 2.0);
        assert_eq!(p.hull_gap, 0.0);
    }

    #[test]
    fn convex_order_examples() {
        let sym = m(&[-1.0, 1.0], &[0.5, 0.5]);
        let zero = m(&[0.0], &[1.0]);
        assert!(convex_order_leq_1d(&zero, &sym, 1e-12).unwrap());
        assert!(!convex_order_leq_1d(&sym, &zero, 1e-12).unwrap());
        assert!(convex_order_leq_1d(&sym, &sym, 1e-12).unwrap());
    }

    #[test]
    fn rejects_multivariate() {
        let p = DiscreteMeasure::from_rows(&[vec![0.0, 1.0]], vec![1.0]).unwrap();
        assert!(matches!(quantile_of(&p), Err(Error::WrongMeasureDim { .. })));
    }
}
