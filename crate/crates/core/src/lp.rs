//! Dense revised simplex for `min c·x  s.t.  A x = b, x >= 0`.
//!
//! Columns are read through [`ColumnSource`], so large catalogs are never
//! copied into a matrix. Redundant equality rows are removed up front by a
//! pivoted Cholesky factorization of `A Aᵀ`; the basis inverse is kept
//! explicitly and refactored periodically. Pricing is Dantzig with a switch
//! to Bland's rule after a run of degenerate pivots.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Read access to the constraint columns, their costs and the right-hand side.
pub trait ColumnSource: Sync {
    fn rows(&self) -> usize;
    fn rhs(&self) -> &[f64];
    fn len(&self) -> usize;
    fn cost(&self, j: usize) -> f64;
    /// `y · a_j`.
    fn dot(&self, j: usize, y: &[f64]) -> f64;
    /// Writes `a_j` into `out` (length [`rows`](Self::rows)).
    fn write(&self, j: usize, out: &mut [f64]);

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// An explicit LP; stored column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    m: usize,
    objective: Vec<f64>,
    cols: Vec<f64>,
    rhs: Vec<f64>,
}

impl LinearProgram {
    /// `rows[i][j]` is the coefficient of `x_j` in equation `i`.
    pub fn new(objective: Vec<f64>, rows: &[Vec<f64>], rhs: Vec<f64>) -> Result<Self> {
        let m = rows.len();
        let n = objective.len();
        if rhs.len() != m {
            return Err(Error::DimensionMismatch(rhs.len(), m));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(r.len(), n));
        }
        let finite = objective.iter().chain(&rhs).chain(rows.iter().flatten()).all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("linear program has non-finite entries"));
        }
        let mut cols = vec![0.0; m * n];
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                cols[j * m + i] = *v;
            }
        }
        Ok(LinearProgram { m, objective, cols, rhs })
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }
}

impl ColumnSource for LinearProgram {
    fn rows(&self) -> usize {
        self.m
    }

    fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    fn len(&self) -> usize {
        self.objective.len()
    }

    fn cost(&self, j: usize) -> f64 {
        self.objective[j]
    }

    fn dot(&self, j: usize, y: &[f64]) -> f64 {
        self.cols[j * self.m..(j + 1) * self.m].iter().zip(y).map(|(a, b)| a * b).sum()
    }

    fn write(&self, j: usize, out: &mut [f64]) {
        out.copy_from_slice(&self.cols[j * self.m..(j + 1) * self.m]);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpOptions {
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub pivot_tol: f64,
    pub max_iterations: usize,
    pub refactor_every: usize,
    /// Degenerate pivots in a row before Bland's rule takes over.
    pub stall_limit: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            feasibility_tol: 1e-9,
            optimality_tol: 1e-10,
            pivot_tol: 1e-9,
            max_iterations: 200_000,
            refactor_every: 50,
            stall_limit: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Dual vector over the original rows; zero on rows dropped as redundant.
    pub dual: Vec<f64>,
    pub dual_objective: f64,
    pub duality_gap: f64,
    /// `max |A x - b|`.
    pub primal_residual: f64,
    /// Smallest reduced cost `c_j - y·a_j`; `>= -tol` certifies optimality.
    pub min_reduced_cost: f64,
    pub iterations: usize,
}

/// Solves with default options.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    solve(lp, &LpOptions::default())
}

/// Minimizes over any column source.
pub fn solve<S: ColumnSource>(src: &S, opts: &LpOptions) -> Result<LpSolution> {
    Simplex::new(src, opts)?.run(true)
}

/// Returns any feasible point (phase 1 only).
pub fn find_feasible<S: ColumnSource>(src: &S, opts: &LpOptions) -> Result<LpSolution> {
    Simplex::new(src, opts)?.run(false)
}

const GRAM_CHUNK: usize = 1024;

/// `A Aᵀ`, summed chunkwise in a fixed order.
fn gram<S: ColumnSource>(src: &S) -> Vec<f64> {
    let m = src.rows();
    let chunks: Vec<Vec<f64>> = (0..src.len().div_ceil(GRAM_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut g = vec![0.0; m * m];
            let mut col = vec![0.0; m];
            for j in c * GRAM_CHUNK..((c + 1) * GRAM_CHUNK).min(src.len()) {
                src.write(j, &mut col);
                for (i, a) in col.iter().enumerate() {
                    if *a != 0.0 {
                        for (k, b) in col.iter().enumerate().skip(i) {
                            g[i * m + k] += a * b;
                        }
                    }
                }
            }
            g
        })
        .collect();
    let mut g = vec![0.0; m * m];
    for part in chunks {
        for (a, b) in g.iter_mut().zip(part) {
            *a += b;
        }
    }
    for i in 0..m {
        for k in 0..i {
            g[i * m + k] = g[k * m + i];
        }
    }
    g
}

/// Indices of a maximal independent row subset, via pivoted Cholesky.
fn independent_rows(g: &[f64], m: usize) -> Vec<usize> {
    let scale = (0..m).map(|i| g[i * m + i]).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut l = vec![0.0; m * m];
    let mut diag: Vec<f64> = (0..m).map(|i| g[i * m + i]).collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut free = vec![true; m];
    loop {
        let Some(p) = (0..m).filter(|&i| free[i]).max_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(b.cmp(&a))) else {
            break;
        };
        if diag[p] <= 1e-11 * scale {
            break;
        }
        let k = chosen.len();
        let piv = diag[p].sqrt();
        free[p] = false;
        for i in (0..m).filter(|&i| free[i]) {
            let mut v = g[i * m + p];
            for t in 0..k {
                v -= l[i * m + t] * l[p * m + t];
            }
            l[i * m + k] = v / piv;
            diag[i] -= l[i * m + k] * l[i * m + k];
        }
        l[p * m + k] = piv;
        chosen.push(p);
    }
    chosen.sort_unstable();
    chosen
}

struct Simplex<'a, S: ColumnSource> {
    src: &'a S,
    opts: &'a LpOptions,
    ncols: usize,
    m0: usize,
    kept: Vec<usize>,
    sign: Vec<f64>,
    m: usize,
    b: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
    buf: Vec<f64>,
}

impl<'a, S: ColumnSource> Simplex<'a, S> {
    fn new(src: &'a S, opts: &'a LpOptions) -> Result<Self> {
        let m0 = src.rows();
        let ncols = src.len();
        let rhs = src.rhs();
        if rhs.len() != m0 {
            return Err(Error::DimensionMismatch(rhs.len(), m0));
        }
        let g = gram(src);
        let kept = independent_rows(&g, m0);
        let bscale = rhs.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        if kept.len() < m0 {
            let r = kept.len();
            let gss = DMatrix::from_fn(r, r, |i, k| g[kept[i] * m0 + kept[k]]);
            let lu = gss.lu();
            for k in (0..m0).filter(|k| kept.binary_search(k).is_err()) {
                // A zero matrix keeps no rows; every dependent row must then have zero rhs.
                let predicted: f64 = if r == 0 {
                    0.0
                } else {
                    let rhs_k = DMatrix::from_fn(r, 1, |i, _| g[kept[i] * m0 + k]);
                    let lambda = lu.solve(&rhs_k).ok_or_else(|| Error::invalid("singular row basis"))?;
                    (0..r).map(|i| lambda[i] * rhs[kept[i]]).sum()
                };
                if (predicted - rhs[k]).abs() > 1e-8 * bscale {
                    return Err(Error::Infeasible);
                }
            }
        }
        let m = kept.len();
        let sign: Vec<f64> = kept.iter().map(|&i| if rhs[i] < 0.0 { -1.0 } else { 1.0 }).collect();
        let b: Vec<f64> = kept.iter().zip(&sign).map(|(&i, s)| rhs[i] * s).collect();
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        Ok(Simplex {
            src,
            opts,
            ncols,
            m0,
            kept,
            sign,
            m,
            xb: b.clone(),
            b,
            basis: (0..m).map(|i| ncols + i).collect(),
            in_basis: vec![false; ncols],
            binv,
            iterations: 0,
            since_refactor: 0,
            buf: vec![0.0; m0],
        })
    }

    fn is_artificial(&self, id: usize) -> bool {
        id >= self.ncols
    }

    fn column(&mut self, j: usize) -> Vec<f64> {
        if self.is_artificial(j) {
            let mut e = vec![0.0; self.m];
            e[j - self.ncols] = 1.0;
            return e;
        }
        self.src.write(j, &mut self.buf);
        self.kept.iter().zip(&self.sign).map(|(&i, s)| self.buf[i] * s).collect()
    }

    fn cost(&self, id: usize, phase_one: bool) -> f64 {
        match (phase_one, self.is_artificial(id)) {
            (true, true) => 1.0,
            (true, false) | (false, true) => 0.0,
            (false, false) => self.src.cost(id),
        }
    }

    /// `y` on reduced rows, and scattered onto the original rows.
    fn duals(&self, phase_one: bool) -> (Vec<f64>, Vec<f64>) {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &id) in self.basis.iter().enumerate() {
            let c = self.cost(id, phase_one);
            if c != 0.0 {
                for k in 0..m {
                    y[k] += c * self.binv[i * m + k];
                }
            }
        }
        let mut full = vec![0.0; self.m0];
        for (k, &i) in self.kept.iter().enumerate() {
            full[i] = y[k] * self.sign[k];
        }
        (y, full)
    }

    fn reduced_cost(&self, j: usize, full: &[f64], phase_one: bool) -> f64 {
        let c = if phase_one { 0.0 } else { self.src.cost(j) };
        c - self.src.dot(j, full)
    }

    fn price(&self, full: &[f64], phase_one: bool, bland: bool, rejected: &[usize]) -> Option<usize> {
        let tol = self.opts.optimality_tol;
        let cand = |j: usize| -> Option<(f64, usize)> {
            if self.in_basis[j] || rejected.contains(&j) {
                return None;
            }
            let d = self.reduced_cost(j, full, phase_one);
            (d < -tol).then_some((d, j))
        };
        if bland {
            (0..self.ncols).into_par_iter().find_map_first(cand).map(|(_, j)| j)
        } else {
            (0..self.ncols)
                .into_par_iter()
                .filter_map(cand)
                .reduce_with(|a, b| if a.0 < b.0 || (a.0 == b.0 && a.1 < b.1) { a } else { b })
                .map(|(_, j)| j)
        }
    }

    fn ftran(&self, a: &[f64]) -> Vec<f64> {
        let m = self.m;
        (0..m).map(|i| (0..m).map(|k| self.binv[i * m + k] * a[k]).sum()).collect()
    }

    fn pivot(&mut self, r: usize, entering: usize, u: &[f64], theta: f64) {
        let m = self.m;
        let ur = u[r];
        for k in 0..m {
            self.binv[r * m + k] /= ur;
        }
        for i in 0..m {
            if i != r && u[i] != 0.0 {
                let f = u[i];
                for k in 0..m {
                    self.binv[i * m + k] -= f * self.binv[r * m + k];
                }
            }
        }
        for i in 0..m {
            if i != r {
                self.xb[i] -= theta * u[i];
                if self.xb[i].abs() < 1e-13 {
                    self.xb[i] = 0.0;
                }
            }
        }
        self.xb[r] = theta;
        let leaving = self.basis[r];
        if !self.is_artificial(leaving) {
            self.in_basis[leaving] = false;
        }
        self.basis[r] = entering;
        self.in_basis[entering] = true;
        self.iterations += 1;
        self.since_refactor += 1;
        if self.since_refactor >= self.opts.refactor_every {
            self.refactor();
        }
    }

    fn refactor(&mut self) {
        let m = self.m;
        self.since_refactor = 0;
        if m == 0 {
            return;
        }
        let cols: Vec<Vec<f64>> = self.basis.clone().into_iter().map(|id| self.column(id)).collect();
        let bmat = DMatrix::from_fn(m, m, |i, k| cols[k][i]);
        if let Some(inv) = bmat.try_inverse() {
            for i in 0..m {
                for k in 0..m {
                    self.binv[i * m + k] = inv[(i, k)];
                }
            }
            let xb = self.ftran(&self.b);
            self.xb = xb.into_iter().map(|v| if v.abs() < 1e-13 { 0.0 } else { v }).collect();
        }
    }

    /// Primal simplex on the current phase; returns false if unbounded.
    fn iterate(&mut self, phase_one: bool) -> Result<bool> {
        let mut stalled = 0;
        // Columns whose pivot elements are all below tolerance; they are
        // priced again once the basis changes.
        let mut rejected: Vec<usize> = Vec::new();
        loop {
            if self.iterations >= self.opts.max_iterations {
                return Err(Error::IterationCap(self.iterations));
            }
            let (_, full) = self.duals(phase_one);
            let bland = stalled >= self.opts.stall_limit;
            let Some(q) = self.price(&full, phase_one, bland, &rejected) else {
                return Ok(true);
            };
            let a = self.column(q);
            let u = self.ftran(&a);
            let tol = self.opts.pivot_tol;
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let blocked_artificial = !phase_one && self.is_artificial(self.basis[i]) && u[i].abs() > tol;
                if !(u[i] > tol || blocked_artificial) {
                    continue;
                }
                let theta = if blocked_artificial { 0.0 } else { self.xb[i].max(0.0) / u[i] };
                best = match best {
                    None => Some((i, theta)),
                    Some((r, t)) => {
                        let better = if theta < t - 1e-12 {
                            true
                        } else if theta <= t + 1e-12 {
                            if bland {
                                self.basis[i] < self.basis[r]
                            } else {
                                u[i].abs() > u[r].abs()
                            }
                        } else {
                            false
                        };
                        Some(if better { (i, theta) } else { (r, t) })
                    }
                };
            }
            let Some((r, theta)) = best else {
                if phase_one || u.iter().any(|v| *v > 1e-14) {
                    rejected.push(q);
                    continue;
                }
                return Ok(false);
            };
            rejected.clear();
            stalled = if theta <= 1e-12 { stalled + 1 } else { 0 };
            self.pivot(r, q, &u, theta);
        }
    }

    /// Pivots zero-level artificials out of the basis where possible.
    fn expel_artificials(&mut self) {
        let m = self.m;
        for r in 0..m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let mut row = vec![0.0; self.m0];
            for (k, &i) in self.kept.iter().enumerate() {
                row[i] = self.binv[r * m + k] * self.sign[k];
            }
            let pick = (0..self.ncols)
                .into_par_iter()
                .filter(|&j| !self.in_basis[j])
                .map(|j| (self.src.dot(j, &row).abs(), j))
                .reduce_with(|a, b| if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) { a } else { b });
            if let Some((v, j)) = pick {
                if v > 1e-7 {
                    let a = self.column(j);
                    let u = self.ftran(&a);
                    let theta = self.xb[r] / u[r];
                    self.pivot(r, j, &u, theta);
                }
            }
        }
    }

    fn run(mut self, optimize: bool) -> Result<LpSolution> {
        self.iterate(true)?;
        self.refactor();
        let infeas: f64 = self.basis.iter().zip(&self.xb).filter(|(id, _)| self.is_artificial(**id)).map(|(_, v)| v.abs()).sum();
        let bscale = self.b.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        if infeas > self.opts.feasibility_tol.max(1e-9) * bscale * (1.0 + self.m as f64).sqrt() {
            return Err(Error::Infeasible);
        }
        self.expel_artificials();
        if optimize {
            if !self.iterate(false)? {
                return Err(Error::Unbounded);
            }
            self.refactor();
        }
        Ok(self.finish(optimize))
    }

    fn finish(&mut self, optimize: bool) -> LpSolution {
        let mut x = vec![0.0; self.ncols];
        for (&id, &v) in self.basis.iter().zip(&self.xb) {
            if !self.is_artificial(id) {
                x[id] = v.max(0.0);
            }
        }
        let (_, dual) = self.duals(!optimize);
        let rhs = self.src.rhs();
        let mut ax = vec![0.0; self.m0];
        for (j, v) in x.iter().enumerate().filter(|(_, v)| **v != 0.0) {
            self.src.write(j, &mut self.buf);
            for (acc, a) in ax.iter_mut().zip(&self.buf) {
                *acc += v * a;
            }
        }
        let primal_residual = ax.iter().zip(rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let objective = if optimize { x.iter().enumerate().map(|(j, v)| v * self.src.cost(j)).sum() } else { 0.0 };
        let dual = if optimize { dual } else { vec![0.0; self.m0] };
        let dual_objective: f64 = dual.iter().zip(rhs).map(|(y, b)| y * b).sum();
        let min_reduced_cost = if optimize {
            (0..self.ncols)
                .into_par_iter()
                .map(|j| self.reduced_cost(j, &dual, false))
                .reduce(|| f64::INFINITY, f64::min)
        } else {
            0.0
        };
        LpSolution {
            x,
            objective,
            dual_objective,
            duality_gap: (objective - dual_objective).abs(),
            dual,
            primal_residual,
            min_reduced_cost,
            iterations: self.iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lp(c: &[f64], rows: &[&[f64]], b: &[f64]) -> LinearProgram {
        LinearProgram::new(c.to_vec(), &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), b.to_vec()).unwrap()
    }

    #[test]
    fn single_variable() {
        let s = solve_lp(&lp(&[1.0], &[&[1.0]], &[1.0])).unwrap();
        assert_eq!(s.x, vec![1.0]);
        assert!((s.objective - 1.0).abs() < 1e-12);
        assert!(s.duality_gap < 1e-12);
    }

    #[test]
    fn textbook_optimum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), value 36.
        let s = solve_lp(&lp(
            &[-3.0, -5.0, 0.0, 0.0, 0.0],
            &[&[1.0, 0.0, 1.0, 0.0, 0.0], &[0.0, 2.0, 0.0, 1.0, 0.0], &[3.0, 2.0, 0.0, 0.0, 1.0]],
            &[4.0, 12.0, 18.0],
        ))
        .unwrap();
        assert!((s.objective + 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
        assert!(s.duality_gap < 1e-9 && s.min_reduced_cost > -1e-9);
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let s = solve_lp(&lp(
            &[1.0, 2.0, 0.0],
            &[&[1.0, 1.0, 1.0], &[2.0, 2.0, 2.0], &[1.0, -1.0, 0.0], &[3.0, 1.0, 2.0]],
            &[2.0, 4.0, 0.0, 4.0],
        ))
        .unwrap();
        assert!(s.primal_residual < 1e-9);
        assert!((s.objective - 0.0).abs() < 1e-9, "{}", s.objective);
        let bad = solve_lp(&lp(&[1.0, 1.0], &[&[1.0, 1.0], &[2.0, 2.0]], &[1.0, 3.0]));
        assert!(matches!(bad, Err(Error::Infeasible)));
    }

    #[test]
    fn infeasible_and_unbounded() {
        assert!(matches!(solve_lp(&lp(&[1.0, 1.0], &[&[1.0, 1.0]], &[-1.0])), Err(Error::Infeasible)));
        assert!(matches!(solve_lp(&lp(&[-1.0, 0.0], &[&[1.0, -1.0]], &[1.0])), Err(Error::Unbounded)));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example, which cycles under plain Dantzig pricing.
        let s = solve_lp(&lp(
            &[-0.75, 150.0, -0.02, 6.0, 0.0, 0.0, 0.0],
            &[
                &[0.25, -60.0, -0.04, 9.0, 1.0, 0.0, 0.0],
                &[0.5, -90.0, -0.02, 3.0, 0.0, 1.0, 0.0],
                &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
            ],
            &[0.0, 0.0, 1.0],
        ))
        .unwrap();
        assert!((s.objective + 0.05).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn random_feasible_programs_certify(
            m in 1usize..6,
            extra in 1usize..8,
            seed in prop::collection::vec(-3i32..4, 200),
        ) {
            let n = m + extra;
            let a: Vec<Vec<f64>> = (0..m).map(|i| (0..n).map(|j| seed[(i * n + j) % 200] as f64).collect()).collect();
            let x0: Vec<f64> = (0..n).map(|j| (seed[(j * 7 + 3) % 200].rem_euclid(3)) as f64).collect();
            let b: Vec<f64> = a.iter().map(|r| r.iter().zip(&x0).map(|(p, q)| p * q).sum()).collect();
            let c: Vec<f64> = (0..n).map(|j| (seed[(j * 11 + 5) % 200].rem_euclid(5)) as f64).collect();
            let s = solve_lp(&LinearProgram::new(c.clone(), &a, b).unwrap()).unwrap();
            let bound: f64 = c.iter().zip(&x0).map(|(p, q)| p * q).sum();
            prop_assert!(s.primal_residual < 1e-9);
            prop_assert!(s.x.iter().all(|v| *v >= 0.0));
            prop_assert!(s.objective <= bound + 1e-9);
            prop_assert!(s.duality_gap < 1e-7);
            prop_assert!(s.min_reduced_cost > -1e-7);
        }
    }
}
