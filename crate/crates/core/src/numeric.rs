//! Thin adapters over the LP and conic solvers used throughout the crate.
//!
//! Linear programs go to `microlp` (simplex, vertex-exact). Euclidean norm
//! minimization is posed as a second-order cone program for `clarabel` and
//! then polished by re-solving the equality-constrained least-squares system
//! on the detected active set, which recovers the exact optimum whenever the
//! active set is identified correctly.

use crate::error::{Error, Result};
use crate::geometry::NormChoice;
use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use microlp::{ComparisonOp, OptimizationDirection, Problem};
use std::time::Duration;

const LP_TIME_LIMIT: Duration = Duration::from_secs(10);
use nalgebra::{DMatrix, DVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Rel {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub(crate) fn optimal(&self) -> Option<(&[f64], f64)> {
        match self {
            LpOutcome::Optimal { x, value } => Some((x.as_slice(), *value)),
            _ => None,
        }
    }
}

/// Dense LP in "minimize ⟨c,x⟩" form. Variables are free unless bounded.
#[derive(Clone, Debug)]
pub(crate) struct Lp {
    n: usize,
    obj: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    rows: Vec<(Vec<f64>, Rel, f64)>,
}

impl Lp {
    pub(crate) fn new(n: usize) -> Self {
        Lp {
            n,
            obj: vec![0.0; n],
            lo: vec![f64::NEG_INFINITY; n],
            hi: vec![f64::INFINITY; n],
            rows: Vec::new(),
        }
    }

    pub(crate) fn set_objective(&mut self, c: &[f64]) {
        debug_assert_eq!(c.len(), self.n);
        self.obj.copy_from_slice(c);
    }

    pub(crate) fn bound(&mut self, i: usize, lo: f64, hi: f64) {
        self.lo[i] = lo;
        self.hi[i] = hi;
    }

    pub(crate) fn nonneg(&mut self, i: usize) {
        self.lo[i] = 0.0;
    }

    pub(crate) fn row(&mut self, coeffs: Vec<f64>, rel: Rel, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.n);
        self.rows.push((coeffs, rel, rhs));
    }

    pub(crate) fn minimize(&self) -> Result<LpOutcome> {
        self.solve(OptimizationDirection::Minimize)
    }

    pub(crate) fn maximize(&self) -> Result<LpOutcome> {
        self.solve(OptimizationDirection::Maximize)
    }

    pub(crate) fn feasible_point(&self) -> Result<Option<Vec<f64>>> {
        let mut probe = self.clone();
        probe.obj = vec![0.0; self.n];
        Ok(match probe.minimize()? {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        })
    }

    fn solve(&self, dir: OptimizationDirection) -> Result<LpOutcome> {
        let mut p = Problem::new(dir);
        p.set_time_limit(LP_TIME_LIMIT);
        // microlp stalls on degenerate problems with free variables, so every
        // variable is rewritten over nonnegative parts: x = lo + s, x = hi − s
        // or x = s⁺ − s⁻. Unused free variables are pinned at a feasible value.
        let mut used = vec![false; self.n];
        for (coeffs, _, _) in &self.rows {
            for (u, c) in used.iter_mut().zip(coeffs) {
                *u |= *c != 0.0;
            }
        }
        let mut parts: Vec<Vec<(microlp::Variable, f64)>> = Vec::with_capacity(self.n);
        let mut shift = vec![0.0; self.n];
        for i in 0..self.n {
            let (lo, hi, c) = (self.lo[i], self.hi[i], self.obj[i]);
            if !used[i] && c == 0.0 {
                shift[i] = 0.0f64.clamp(lo, hi);
                parts.push(Vec::new());
            } else if lo.is_finite() {
                shift[i] = lo;
                parts.push(vec![(p.add_var(c, (0.0, hi - lo)), 1.0)]);
            } else if hi.is_finite() {
                shift[i] = hi;
                parts.push(vec![(p.add_var(-c, (0.0, f64::INFINITY)), -1.0)]);
            } else {
                let plus = p.add_var(c, (0.0, f64::INFINITY));
                let minus = p.add_var(-c, (0.0, f64::INFINITY));
                parts.push(vec![(plus, 1.0), (minus, -1.0)]);
            }
        }
        for (coeffs, rel, rhs) in &self.rows {
            let mut terms = Vec::new();
            let mut rhs = *rhs;
            for (i, c) in coeffs.iter().enumerate().filter(|(_, c)| **c != 0.0) {
                rhs -= c * shift[i];
                terms.extend(parts[i].iter().map(|(v, s)| (*v, c * s)));
            }
            if terms.is_empty() {
                let ok = match rel {
                    Rel::Le => 0.0 <= rhs + 1e-12,
                    Rel::Ge => 0.0 >= rhs - 1e-12,
                    Rel::Eq => rhs.abs() <= 1e-12,
                };
                if !ok {
                    return Ok(LpOutcome::Infeasible);
                }
                continue;
            }
            let op = match rel {
                Rel::Le => ComparisonOp::Le,
                Rel::Ge => ComparisonOp::Ge,
                Rel::Eq => ComparisonOp::Eq,
            };
            p.add_constraint(terms.as_slice(), op, rhs);
        }
        match p.solve() {
            Ok(outcome) => match outcome.into_solution() {
                Ok(sol) => {
                    let x: Vec<f64> = (0..self.n)
                        .map(|i| shift[i] + parts[i].iter().map(|(v, s)| s * sol.var_value(*v)).sum::<f64>())
                        .collect();
                    let value = dot(&self.obj, &x);
                    Ok(LpOutcome::Optimal { x, value })
                }
                Err(_) => Err(Error::numerical("LP solve exceeded its time limit")),
            },
            Err(microlp::Error::Infeasible) => Ok(LpOutcome::Infeasible),
            Err(microlp::Error::Unbounded) => Ok(LpOutcome::Unbounded),
            Err(e) => Err(Error::numerical(format!("LP failure: {e:?}"))),
        }
    }
}

/// min ‖M z − q‖ subject to `eq` rows (a·z = b) and `le` rows (a·z ≤ b).
///
/// Returns `None` when the constraints are infeasible.
pub(crate) struct NormMin<'a> {
    pub n: usize,
    pub m: &'a [Vec<f64>],
    pub q: &'a [f64],
    pub eq: &'a [(Vec<f64>, f64)],
    pub le: &'a [(Vec<f64>, f64)],
}

impl NormMin<'_> {
    pub(crate) fn solve(&self, norm: NormChoice) -> Result<Option<(Vec<f64>, f64)>> {
        if self.m.is_empty() {
            let mut lp = Lp::new(self.n);
            self.push_constraints(&mut lp, self.n);
            return Ok(lp.feasible_point()?.map(|z| (z, 0.0)));
        }
        match norm {
            NormChoice::Euclidean => self.solve_euclidean(),
            NormChoice::Max => self.solve_lp(true),
            NormChoice::Sum => self.solve_lp(false),
        }
    }

    fn push_constraints(&self, lp: &mut Lp, width: usize) {
        for (a, b) in self.eq {
            let mut row = a.clone();
            row.resize(width, 0.0);
            lp.row(row, Rel::Eq, *b);
        }
        for (a, b) in self.le {
            let mut row = a.clone();
            row.resize(width, 0.0);
            lp.row(row, Rel::Le, *b);
        }
    }

    fn residual(&self, z: &[f64]) -> Vec<f64> {
        self.m
            .iter()
            .zip(self.q)
            .map(|(row, qi)| dot(row, z) - qi)
            .collect()
    }

    fn solve_lp(&self, max_norm: bool) -> Result<Option<(Vec<f64>, f64)>> {
        let p = self.m.len();
        let width = if max_norm { self.n + 1 } else { self.n + p };
        let mut lp = Lp::new(width);
        let mut c = vec![0.0; width];
        for ci in c.iter_mut().skip(self.n) {
            *ci = 1.0;
        }
        lp.set_objective(&c);
        for j in self.n..width {
            lp.nonneg(j);
        }
        self.push_constraints(&mut lp, width);
        for (i, (row, qi)) in self.m.iter().zip(self.q).enumerate() {
            let aux = if max_norm { self.n } else { self.n + i };
            let mut up = row.clone();
            up.resize(width, 0.0);
            up[aux] = -1.0;
            lp.row(up, Rel::Le, *qi);
            let mut dn: Vec<f64> = row.iter().map(|v| -v).collect();
            dn.resize(width, 0.0);
            dn[aux] = -1.0;
            lp.row(dn, Rel::Le, -qi);
        }
        match lp.minimize()? {
            LpOutcome::Optimal { x, .. } => {
                let z = x[..self.n].to_vec();
                let r = self.residual(&z);
                let v = if max_norm {
                    r.iter().fold(0.0f64, |a, b| a.max(b.abs()))
                } else {
                    r.iter().map(|v| v.abs()).sum()
                };
                Ok(Some((z, v)))
            }
            LpOutcome::Infeasible => Ok(None),
            LpOutcome::Unbounded => Err(Error::numerical("norm LP reported unbounded")),
        }
    }

    fn solve_euclidean(&self) -> Result<Option<(Vec<f64>, f64)>> {
        if self.le.is_empty() {
            if let Some(z) = self.kkt(&[])? {
                if self.eq_ok(&z, 1e-9) {
                    let v = norm2(&self.residual(&z));
                    return Ok(Some((z, v)));
                }
                return Ok(None);
            }
        }
        let n = self.n;
        let p = self.m.len();
        let width = n + 1;
        let mut a_rows: Vec<Vec<f64>> = Vec::new();
        let mut b = Vec::new();
        for (a, rhs) in self.eq {
            let mut row = a.clone();
            row.push(0.0);
            a_rows.push(row);
            b.push(*rhs);
        }
        for (a, rhs) in self.le {
            let mut row = a.clone();
            row.push(0.0);
            a_rows.push(row);
            b.push(*rhs);
        }
        let mut t_row = vec![0.0; width];
        t_row[n] = -1.0;
        a_rows.push(t_row);
        b.push(0.0);
        for (row, qi) in self.m.iter().zip(self.q) {
            let mut r: Vec<f64> = row.iter().map(|v| -v).collect();
            r.push(0.0);
            a_rows.push(r);
            b.push(-qi);
        }
        let a = CscMatrix::from(a_rows.iter().map(|r| r.iter()));
        let pmat = CscMatrix::<f64>::zeros((width, width));
        let mut c = vec![0.0; width];
        c[n] = 1.0;
        let mut cones = Vec::new();
        if !self.eq.is_empty() {
            cones.push(SupportedConeT::ZeroConeT(self.eq.len()));
        }
        if !self.le.is_empty() {
            cones.push(SupportedConeT::NonnegativeConeT(self.le.len()));
        }
        cones.push(SupportedConeT::SecondOrderConeT(p + 1));
        let settings = DefaultSettingsBuilder::default()
            .verbose(false)
            .tol_gap_abs(1e-11)
            .tol_gap_rel(1e-11)
            .tol_feas(1e-11)
            .max_iter(200)
            .build()
            .map_err(|e| Error::numerical(format!("solver settings: {e:?}")))?;
        let mut solver = DefaultSolver::new(&pmat, &c, &a, &b, &cones, settings)
            .map_err(|e| Error::numerical(format!("conic setup: {e:?}")))?;
        solver.solve();
        let status = solver.solution.status;
        let z: Vec<f64> = match status {
            SolverStatus::Solved
            | SolverStatus::AlmostSolved
            | SolverStatus::MaxIterations
            | SolverStatus::InsufficientProgress => solver.solution.x[..n].to_vec(),
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                return self.confirm_infeasible();
            }
            other => return Err(Error::numerical(format!("conic solver status {other:?}"))),
        };
        if !self.feasible(&z, 1e-6) {
            if matches!(
                status,
                SolverStatus::MaxIterations | SolverStatus::InsufficientProgress
            ) {
                return self.confirm_infeasible();
            }
            return Err(Error::numerical("conic solution violates constraints"));
        }
        let ipm_val = norm2(&self.residual(&z));
        let active: Vec<usize> = self
            .le
            .iter()
            .enumerate()
            .filter(|(_, (a, rhs))| rhs - dot(a, &z) <= 1e-7 * (1.0 + rhs.abs()))
            .map(|(i, _)| i)
            .collect();
        if let Some(zp) = self.kkt(&active)? {
            if self.feasible(&zp, 1e-11) {
                let v = norm2(&self.residual(&zp));
                if v <= ipm_val + 1e-7 {
                    return Ok(Some((zp, v)));
                }
            }
        }
        Ok(Some((z, ipm_val)))
    }

    fn confirm_infeasible(&self) -> Result<Option<(Vec<f64>, f64)>> {
        let mut lp = Lp::new(self.n);
        self.push_constraints(&mut lp, self.n);
        match lp.feasible_point()? {
            None => Ok(None),
            Some(_) => Err(Error::numerical(
                "conic solver disagreed with LP feasibility",
            )),
        }
    }

    fn eq_ok(&self, z: &[f64], tol: f64) -> bool {
        self.eq
            .iter()
            .all(|(a, b)| (dot(a, z) - b).abs() <= tol * (1.0 + b.abs()))
    }

    fn feasible(&self, z: &[f64], tol: f64) -> bool {
        self.eq_ok(z, tol)
            && self
                .le
                .iter()
                .all(|(a, b)| dot(a, z) <= b + tol * (1.0 + b.abs()))
    }

    /// Least squares restricted to eq rows plus the chosen `le` rows as equalities.
    fn kkt(&self, active: &[usize]) -> Result<Option<Vec<f64>>> {
        let n = self.n;
        let cons: Vec<(&Vec<f64>, f64)> = self
            .eq
            .iter()
            .map(|(a, b)| (a, *b))
            .chain(active.iter().map(|&i| (&self.le[i].0, self.le[i].1)))
            .collect();
        let k = cons.len();
        let size = n + k;
        let mut kkt = DMatrix::<f64>::zeros(size, size);
        let mut rhs = DVector::<f64>::zeros(size);
        for (row, qi) in self.m.iter().zip(self.q) {
            for i in 0..n {
                if row[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    kkt[(i, j)] += row[i] * row[j];
                }
                rhs[i] += row[i] * qi;
            }
        }
        for (r, (a, b)) in cons.iter().enumerate() {
            for j in 0..n {
                kkt[(n + r, j)] = a[j];
                kkt[(j, n + r)] = a[j];
            }
            rhs[n + r] = *b;
        }
        let svd = kkt.svd(true, true);
        let sol = svd
            .solve(&rhs, 1e-12)
            .map_err(|e| Error::numerical(format!("KKT solve: {e}")))?;
        let z: Vec<f64> = sol.iter().take(n).copied().collect();
        if z.iter().any(|v| !v.is_finite()) {
            return Ok(None);
        }
        Ok(Some(z))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Null space basis of the rows of `a` (each row of length `n`).
pub(crate) fn null_space(rows: &[Vec<f64>], n: usize, tol: f64) -> Vec<Vec<f64>> {
    if rows.is_empty() {
        return (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
    }
    let m = rows.len();
    let mut mat = DMatrix::<f64>::zeros(m.max(n), n);
    for (i, r) in rows.iter().enumerate() {
        for j in 0..n {
            mat[(i, j)] = r[j];
        }
    }
    let svd = mat.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let sv = &svd.singular_values;
    let scale = sv.iter().fold(0.0f64, |a, b| a.max(*b)).max(1.0);
    let mut out = Vec::new();
    for (i, s) in sv.iter().enumerate() {
        if *s <= tol * scale {
            out.push(vt.row(i).iter().copied().collect());
        }
    }
    out
}

pub(crate) fn rank(rows: &[Vec<f64>], n: usize, tol: f64) -> usize {
    n - null_space(rows, n, tol).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_basic() {
        let mut lp = Lp::new(2);
        lp.set_objective(&[-1.0, -2.0]);
        lp.nonneg(0);
        lp.nonneg(1);
        lp.row(vec![1.0, 1.0], Rel::Le, 4.0);
        lp.row(vec![1.0, 0.0], Rel::Le, 3.0);
        lp.row(vec![0.0, 1.0], Rel::Le, 3.0);
        let (x, v) = lp.minimize().unwrap().optimal().map(|(x, v)| (x.to_vec(), v)).unwrap();
        assert!((v + 7.0).abs() < 1e-9);
        assert!((x[0] - 1.0).abs() < 1e-9 && (x[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn lp_infeasible_and_unbounded() {
        let mut lp = Lp::new(1);
        lp.row(vec![1.0], Rel::Ge, 2.0);
        lp.row(vec![1.0], Rel::Le, 1.0);
        assert!(matches!(lp.minimize().unwrap(), LpOutcome::Infeasible));
        let mut lp = Lp::new(1);
        lp.set_objective(&[1.0]);
        assert!(matches!(lp.minimize().unwrap(), LpOutcome::Unbounded));
    }

    #[test]
    fn projection_onto_halfspace() {
        // project (0,0) onto x1 >= 1
        let m = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let q = vec![0.0, 0.0];
        let le = vec![(vec![-1.0, 0.0], -1.0)];
        let prob = NormMin { n: 2, m: &m, q: &q, eq: &[], le: &le };
        for norm in [NormChoice::Euclidean, NormChoice::Max, NormChoice::Sum] {
            let (z, v) = prob.solve(norm).unwrap().unwrap();
            assert!((v - 1.0).abs() < 1e-10, "{norm:?} {v}");
            assert!((z[0] - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn projection_onto_simplex_corner() {
        // distance from (2,2) to triangle x,y >= 0, x + y <= 1 is |(1.5,1.5)| = 1.5 sqrt 2
        let m = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let q = vec![2.0, 2.0];
        let le = vec![
            (vec![-1.0, 0.0], 0.0),
            (vec![0.0, -1.0], 0.0),
            (vec![1.0, 1.0], 1.0),
        ];
        let prob = NormMin { n: 2, m: &m, q: &q, eq: &[], le: &le };
        let (_, v) = prob.solve(NormChoice::Euclidean).unwrap().unwrap();
        assert!((v - 1.5 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn norm_min_infeasible() {
        let m = vec![vec![1.0]];
        let q = vec![0.0];
        let le = vec![(vec![1.0], -1.0), (vec![-1.0], -1.0)];
        let prob = NormMin { n: 1, m: &m, q: &q, eq: &[], le: &le };
        assert!(prob.solve(NormChoice::Euclidean).unwrap().is_none());
        assert!(prob.solve(NormChoice::Max).unwrap().is_none());
    }

    #[test]
    fn null_space_dims() {
        let ns = null_space(&[vec![1.0, 1.0, 0.0]], 3, 1e-10);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(dot(&v, &[1.0, 1.0, 0.0]).abs() < 1e-12);
        }
        assert_eq!(rank(&[vec![1.0, 2.0], vec![2.0, 4.0]], 2, 1e-10), 1);
    }
}
