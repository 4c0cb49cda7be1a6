//! Exact transportation LP by the primal simplex on spanning-tree bases.
//!
//! A basis is a spanning tree of the bipartite row/column graph with `n + m − 1`
//! cells. The start is the northwest-corner rule; potentials `uᵢ + vⱼ = cᵢⱼ` price
//! the non-basic cells and the entering cell pivots around its tree cycle.
//! Dantzig pricing is used until a run of degenerate pivots, then Bland's rule
//! until the next improving pivot.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

const DEGENERATE_RUN: usize = 50;

#[derive(Clone, Debug)]
pub struct TransportSimplex {
    rows: Vec<f64>,
    cols: Vec<f64>,
    /// Basic cells with their flows.
    basis: Vec<(usize, usize, f64)>,
    /// Total pivots performed over the lifetime of the solver.
    pivots: usize,
}

impl TransportSimplex {
    /// Starts from the northwest-corner vertex of `Π(rows, cols)`.
    pub fn new(rows: &[f64], cols: &[f64]) -> Result<Self> {
        let (n, m) = (rows.len(), cols.len());
        if n == 0 || m == 0 {
            return Err(Error::EmptyMeasure);
        }
        let (sa, sb): (f64, f64) = (rows.iter().sum(), cols.iter().sum());
        if rows.iter().chain(cols).any(|x| !(x.is_finite() && *x >= 0.0)) || (sa - sb).abs() > 1e-9 * sa.max(sb) {
            return Err(Error::LpInfeasible(format!("marginal totals {sa} and {sb} differ")));
        }
        let mut basis = Vec::with_capacity(n + m - 1);
        let (mut i, mut j) = (0, 0);
        let (mut ra, mut rb) = (rows[0], cols[0]);
        loop {
            let x = ra.min(rb).max(0.0);
            if i == n - 1 && j == m - 1 {
                basis.push((i, j, x.max(ra).max(rb)));
                break;
            }
            basis.push((i, j, x));
            ra -= x;
            rb -= x;
            if j == m - 1 || (i < n - 1 && ra <= rb) {
                i += 1;
                ra = rows[i];
            } else {
                j += 1;
                rb = cols[j];
            }
        }
        Ok(Self {
            rows: rows.to_vec(),
            cols: cols.to_vec(),
            basis,
            pivots: 0,
        })
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    /// Current vertex as a sparse list of basic cells.
    pub fn vertex(&self) -> &[(usize, usize, f64)] {
        &self.basis
    }

    pub fn dense(&self) -> Matrix {
        let mut pi = Matrix::zeros(self.rows.len(), self.cols.len());
        for &(i, j, x) in &self.basis {
            pi[(i, j)] += x;
        }
        pi
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let n = self.rows.len();
        let mut adj = vec![Vec::new(); n + self.cols.len()];
        for (k, &(i, j, _)) in self.basis.iter().enumerate() {
            adj[i].push((n + j, k));
            adj[n + j].push((i, k));
        }
        adj
    }

    fn potentials(&self, cost: &Matrix, adj: &[Vec<(usize, usize)>]) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.rows.len();
        let mut pot = vec![f64::NAN; adj.len()];
        pot[0] = 0.0;
        let mut queue = VecDeque::from([0]);
        while let Some(node) = queue.pop_front() {
            for &(next, k) in &adj[node] {
                if pot[next].is_nan() {
                    let (i, j, _) = self.basis[k];
                    pot[next] = cost[(i, j)] - pot[node];
                    queue.push_back(next);
                }
            }
        }
        if pot.iter().any(|p| p.is_nan()) {
            return Err(Error::LpInfeasible("basis is not a spanning tree".into()));
        }
        let v = pot.split_off(n);
        Ok((pot, v))
    }

    /// Basis cells on the tree path from row `i` to column `j`, in order.
    fn tree_path(&self, adj: &[Vec<(usize, usize)>], i: usize, j: usize) -> Result<Vec<usize>> {
        let n = self.rows.len();
        let target = n + j;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; adj.len()];
        let mut seen = vec![false; adj.len()];
        seen[i] = true;
        let mut queue = VecDeque::from([i]);
        while let Some(node) = queue.pop_front() {
            if node == target {
                break;
            }
            for &(next, k) in &adj[node] {
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some((node, k));
                    queue.push_back(next);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = target;
        while node != i {
            let (prev, k) = parent[node].ok_or_else(|| Error::LpInfeasible("disconnected basis".into()))?;
            path.push(k);
            node = prev;
        }
        path.reverse();
        Ok(path)
    }

    /// Pivots to an optimal vertex for `cost` and returns it densely.
    pub fn solve(&mut self, cost: &Matrix) -> Result<Matrix> {
        let (n, m) = (self.rows.len(), self.cols.len());
        if cost.nrows() != n || cost.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: n * m,
                got: cost.nrows() * cost.ncols(),
            });
        }
        if cost.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = cost.iter().fold(0.0_f64, |a, c| a.max(c.abs()));
        let tol = 1e-14 * (1.0 + scale);
        let max_pivots = 50 * (n + m) * (n + m) + 1000;
        let mut degenerate = 0;
        let mut is_basic = vec![false; n * m];
        for &(i, j, _) in &self.basis {
            is_basic[i * m + j] = true;
        }

        for _ in 0..max_pivots {
            let adj = self.adjacency();
            let (u, v) = self.potentials(cost, &adj)?;
            let bland = degenerate >= DEGENERATE_RUN;
            let mut entering: Option<(usize, usize)> = None;
            let mut best = -tol;
            'scan: for i in 0..n {
                for j in 0..m {
                    if is_basic[i * m + j] {
                        continue;
                    }
                    let r = cost[(i, j)] - u[i] - v[j];
                    if r < best {
                        entering = Some((i, j));
                        if bland {
                            break 'scan;
                        }
                        best = r;
                    }
                }
            }
            let Some((ei, ej)) = entering else {
                return Ok(self.dense());
            };

            let path = self.tree_path(&adj, ei, ej)?;
            // cells at even positions of the path lose flow
            let mut leave = path[0];
            for &k in path.iter().step_by(2) {
                if self.basis[k].2 < self.basis[leave].2 {
                    leave = k;
                }
            }
            let theta = self.basis[leave].2;
            for (pos, &k) in path.iter().enumerate() {
                if pos % 2 == 0 {
                    self.basis[k].2 = (self.basis[k].2 - theta).max(0.0);
                } else {
                    self.basis[k].2 += theta;
                }
            }
            let (li, lj, _) = self.basis[leave];
            is_basic[li * m + lj] = false;
            is_basic[ei * m + ej] = true;
            self.basis[leave] = (ei, ej, theta);
            self.pivots += 1;
            degenerate = if theta > 0.0 { 0 } else { degenerate + 1 };
        }
        Err(Error::LpInfeasible(format!("no optimal vertex after {max_pivots} pivots")))
    }
}

/// Optimal vertex of `min ⟨cost, π⟩` over couplings of `rows` and `cols`, from a
/// cold northwest-corner start.
pub fn solve_transport(cost: &Matrix, rows: &[f64], cols: &[f64]) -> Result<Matrix> {
    TransportSimplex::new(rows, cols)?.solve(cost)
}
