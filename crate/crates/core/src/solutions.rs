//! Problem instances and brute-force certifiers for the solution concepts.
//!
//! On finite graphs every graph point in the open ball is enumerated. On
//! polyhedral graphs each (graph piece, cone cell) pair yields a convex
//! "violating set"; the candidate is refuted iff one of these sets comes
//! closer than ε to x̄, which a norm-minimization decides exactly.

use crate::error::{check_dim, Error, Result};
use crate::geometry::{Direction, NormChoice, Point, PolyCone, Polyhedron, TAU};
use crate::graph::GraphMap;
use crate::numeric::NormMin;
use crate::vds::ConeField;
use crate::Evidence;
use serde::{Deserialize, Serialize};

/// Which domination structure an instance carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VdsKind {
    /// K: X ⇉ Y, cone depends on the argument.
    K,
    /// Q: Y ⇉ Y, cone depends on the value.
    Q,
}

/// Ω as a polyhedron, optionally intersected with a listed grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Omega {
    pub region: Polyhedron,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<Point>>,
}

impl Omega {
    pub fn whole(dim: usize) -> Self {
        Omega {
            region: Polyhedron::whole(dim),
            grid: None,
        }
    }

    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        self.region.contains(x, tol)
            && self
                .grid
                .as_ref()
                .is_none_or(|g| g.iter().any(|p| p.approx_eq(x, 1e-12)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Membership tolerance τ.
    pub tau: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { tau: TAU }
    }
}

/// A candidate (x̄, ȳ) ∈ Gr F.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Candidate {
    pub x: Point,
    pub y: Point,
}

/// Full problem datum: minimize F(x) over Ω with respect to K or Q.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub x_dim: usize,
    pub y_dim: usize,
    pub norm: NormChoice,
    pub omega: Omega,
    pub objective: GraphMap,
    pub vds_kind: VdsKind,
    pub cone_field: ConeField,
    pub k: Direction,
    /// Ball radius; `f64::INFINITY` allowed.
    pub epsilon: f64,
    pub delta: f64,
    pub tolerances: Tolerances,
    pub candidate: Option<Candidate>,
    /// When set, ball distances only use the first `n` coordinates; the
    /// remaining ones are unrestricted (the (ε, +∞) balls of lifted problems).
    pub ball_coords: Option<usize>,
}

impl Instance {
    pub fn validate(&self) -> Result<()> {
        self.objective.validate()?;
        check_dim(self.x_dim, self.objective.x_dim())?;
        check_dim(self.y_dim, self.objective.y_dim())?;
        check_dim(self.x_dim, self.omega.region.dim)?;
        if let Some(g) = &self.omega.grid {
            for p in g {
                check_dim(self.x_dim, p.dim())?;
            }
        }
        check_dim(self.y_dim, self.k.dim())?;
        check_dim(self.y_dim, self.cone_field.cone_dim())?;
        let dom = match self.vds_kind {
            VdsKind::K => self.x_dim,
            VdsKind::Q => self.y_dim,
        };
        check_dim(dom, self.cone_field.domain_dim())?;
        if (self.k.norm(self.norm) - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("k must be a unit vector of the configured norm"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid("epsilon must be positive"));
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::invalid("delta must be a nonnegative real"));
        }
        if let Some(n) = self.ball_coords {
            if n > self.x_dim {
                return Err(Error::invalid("ball_coords exceeds the dimension of X"));
            }
        }
        if let Some(c) = &self.candidate {
            check_dim(self.x_dim, c.x.dim())?;
            check_dim(self.y_dim, c.y.dim())?;
        }
        Ok(())
    }

    pub fn tau(&self) -> f64 {
        self.tolerances.tau
    }

    /// Distance used for the ε-ball (respects `ball_coords`).
    pub fn ball_dist(&self, x: &Point, center: &Point) -> f64 {
        match self.ball_coords {
            Some(n) => self.norm.of(&(x - center).coords()[..n]),
            None => x.dist(center, self.norm),
        }
    }

    /// x ∈ B(x̄, ε) realized as ‖x − x̄‖ < ε − τ.
    pub fn in_open_ball(&self, x: &Point, center: &Point) -> bool {
        self.epsilon.is_infinite() || self.ball_dist(x, center) < self.epsilon - self.tau()
    }

    /// Grid points of Ω (finite graphs list their own domain).
    pub fn domain_points(&self) -> Result<Vec<Point>> {
        let tau = self.tau();
        match self.objective.as_finite() {
            Some(g) => Ok(g
                .entries
                .iter()
                .map(|e| e.x.clone())
                .filter(|x| self.omega.contains(x, tau))
                .collect()),
            None => match &self.omega.grid {
                Some(grid) => Ok(grid
                    .iter()
                    .filter(|x| self.omega.region.contains(x, tau))
                    .cloned()
                    .collect()),
                None => Err(Error::invalid("instance has no grid for Ω")),
            },
        }
    }

    pub fn check_candidate(&self, xb: &Point, yb: &Point) -> Result<()> {
        check_dim(self.x_dim, xb.dim())?;
        check_dim(self.y_dim, yb.dim())?;
        if !self.omega.contains(xb, self.tau()) {
            return Err(Error::Precondition(format!("{xb} is not in Ω")));
        }
        if !self.objective.graph_contains(xb, yb, self.tau()) {
            return Err(Error::Precondition(format!("({xb}, {yb}) is not in the graph of F")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Certified,
    Refuted,
}

/// A graph point violating the defining inclusion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Point,
    pub y: Point,
    /// The offending cone element (−v for K-type, q for Q-type checks).
    pub cone_element: Point,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub checked_count: usize,
    pub evidence: Evidence,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

/// Which solution concept is being checked.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Concept<'a> {
    /// (F(x) − ȳ + δk) ∩ (−K(x)) ⊆ {0}.
    NondominatedK,
    /// ȳ − δk ∉ y + (Q(y)∖{0}) for y ∈ F(x)∖{ȳ}; `exclude_zero = false`
    /// gives the variant without removing 0.
    NondominatedQ { exclude_zero: bool },
    /// As `NondominatedK` with the fixed cone.
    FixedCone(&'a PolyCone),
}

pub fn certify_nondominated_k(inst: &Instance, xb: &Point, yb: &Point) -> Result<Certificate> {
    expect_kind(inst, VdsKind::K)?;
    certify(inst, xb, yb, Concept::NondominatedK)
}

pub fn certify_nondominated_q(inst: &Instance, xb: &Point, yb: &Point) -> Result<Certificate> {
    expect_kind(inst, VdsKind::Q)?;
    certify(inst, xb, yb, Concept::NondominatedQ { exclude_zero: true })
}

/// Q-variant that keeps 0 in Q(y) (as written for the exact concept).
pub fn certify_nondominated_q_with_zero(inst: &Instance, xb: &Point, yb: &Point) -> Result<Certificate> {
    expect_kind(inst, VdsKind::Q)?;
    certify(inst, xb, yb, Concept::NondominatedQ { exclude_zero: false })
}

/// Efficiency with the frozen cone K(x̄) (kind K) or Q(ȳ) (kind Q).
pub fn certify_efficient(inst: &Instance, xb: &Point, yb: &Point) -> Result<Certificate> {
    let at = match inst.vds_kind {
        VdsKind::K => xb,
        VdsKind::Q => yb,
    };
    let cone = inst.cone_field.cone_at(at)?.clone();
    certify(inst, xb, yb, Concept::FixedCone(&cone))
}

/// Pareto minimality with respect to a fixed cone C on the ε-ball.
pub fn certify_pareto(inst: &Instance, cone: &PolyCone, xb: &Point, yb: &Point) -> Result<Certificate> {
    check_dim(inst.y_dim, cone.dim())?;
    certify(inst, xb, yb, Concept::FixedCone(cone))
}

fn expect_kind(inst: &Instance, kind: VdsKind) -> Result<()> {
    if inst.vds_kind != kind {
        return Err(Error::invalid(format!("instance carries {:?}, expected {kind:?}", inst.vds_kind)));
    }
    Ok(())
}

/// Core certifier shared by every concept.
pub fn certify(inst: &Instance, xb: &Point, yb: &Point, concept: Concept<'_>) -> Result<Certificate> {
    inst.validate()?;
    inst.check_candidate(xb, yb)?;
    if inst.objective.as_finite().is_some() {
        certify_finite(inst, xb, yb, concept)
    } else {
        certify_poly(inst, xb, yb, concept)
    }
}

/// Re-checks a witness by direct arithmetic.
pub fn recheck_witness(
    inst: &Instance,
    xb: &Point,
    yb: &Point,
    concept: Concept<'_>,
    w: &Witness,
) -> Result<bool> {
    let tau = inst.tau();
    if !inst.omega.contains(&w.x, tau) || !inst.in_open_ball(&w.x, xb) {
        return Ok(false);
    }
    if !inst.objective.graph_contains(&w.x, &w.y, 1e-7) {
        return Ok(false);
    }
    let dk = inst.k.scale(inst.delta);
    Ok(match concept {
        Concept::NondominatedK | Concept::FixedCone(_) => {
            let cone = match concept {
                Concept::FixedCone(c) => c,
                _ => inst.cone_field.cone_at(&w.x)?,
            };
            let v = &(&w.y - yb) + &dk;
            !v.is_zero(tau) && cone.contains_fast(&v.scale(-1.0), 1e-7)
        }
        Concept::NondominatedQ { exclude_zero } => {
            let q = &(yb - &dk) - &w.y;
            !w.y.approx_eq(yb, tau)
                && (!exclude_zero || !q.is_zero(tau))
                && inst.cone_field.cone_at(&w.y)?.contains_fast(&q, 1e-7)
        }
    })
}

fn violation(
    inst: &Instance,
    yb: &Point,
    x: &Point,
    y: &Point,
    concept: Concept<'_>,
) -> Result<Option<Point>> {
    let tau = inst.tau();
    let dk = inst.k.scale(inst.delta);
    match concept {
        Concept::NondominatedK | Concept::FixedCone(_) => {
            let cone = match concept {
                Concept::FixedCone(c) => c,
                _ => inst.cone_field.cone_at(x)?,
            };
            let v = &(y - yb) + &dk;
            let m = v.scale(-1.0);
            Ok((!v.is_zero(tau) && cone.contains_fast(&m, tau)).then_some(m))
        }
        Concept::NondominatedQ { exclude_zero } => {
            if y.approx_eq(yb, tau) {
                return Ok(None);
            }
            let q = &(yb - &dk) - y;
            if exclude_zero && q.is_zero(tau) {
                return Ok(None);
            }
            let cone = inst.cone_field.cone_at(y)?;
            Ok(cone.contains_fast(&q, tau).then_some(q))
        }
    }
}

fn certify_finite(inst: &Instance, xb: &Point, yb: &Point, concept: Concept<'_>) -> Result<Certificate> {
    let g = inst.objective.as_finite().expect("finite graph");
    let tau = inst.tau();
    let mut checked = 0;
    let mut best: Option<Witness> = None;
    for e in &g.entries {
        if !inst.omega.contains(&e.x, tau) || !inst.in_open_ball(&e.x, xb) {
            continue;
        }
        for y in &e.values {
            checked += 1;
            if let Some(c) = violation(inst, yb, &e.x, y, concept)? {
                let w = Witness {
                    x: e.x.clone(),
                    y: y.clone(),
                    cone_element: c,
                };
                let smaller = best.as_ref().is_none_or(|b| {
                    w.x.lex_cmp(&b.x).then_with(|| w.y.lex_cmp(&b.y)).is_lt()
                });
                if smaller {
                    best = Some(w);
                }
            }
        }
    }
    Ok(Certificate {
        verdict: if best.is_some() {
            Verdict::Refuted
        } else {
            Verdict::Certified
        },
        witness: best,
        checked_count: checked,
        evidence: Evidence::Exact,
    })
}

/// Cones as (region in the indexing space, cone) pairs.
fn cone_cells<'a>(inst: &'a Instance, concept: Concept<'a>) -> Result<Vec<(Polyhedron, &'a PolyCone)>> {
    if let Concept::FixedCone(c) = concept {
        let dim = inst.x_dim;
        return Ok(vec![(Polyhedron::whole(dim), c)]);
    }
    if inst.cone_field.default_cone().is_some() {
        return Err(Error::invalid(
            "exact certification on polyhedral graphs needs a cone field without default",
        ));
    }
    Ok(inst
        .cone_field
        .cells()
        .iter()
        .map(|c| (c.region.clone(), &c.cone))
        .collect())
}

fn certify_poly(inst: &Instance, xb: &Point, yb: &Point, concept: Concept<'_>) -> Result<Certificate> {
    let graph = inst.objective.to_poly_graph();
    let (n, m) = (inst.x_dim, inst.y_dim);
    let width = n + m;
    let tau = inst.tau();
    let dk = inst.k.scale(inst.delta);
    let cells = cone_cells(inst, concept)?;
    let q_kind = matches!(concept, Concept::NondominatedQ { .. });
    let ball_n = inst.ball_coords.unwrap_or(n);
    let mrows: Vec<Vec<f64>> = (0..ball_n)
        .map(|i| {
            let mut r = vec![0.0; width];
            r[i] = 1.0;
            r
        })
        .collect();
    let target: Vec<f64> = xb.coords()[..ball_n].to_vec();
    let mut checked = 0;
    let mut best: Option<(f64, Witness)> = None;

    for piece in &graph.pieces {
        for (region, cone) in &cells {
            checked += 1;
            let mut le = piece.le_rows(0, width);
            le.extend(inst.omega.region.le_rows(0, width));
            // region of the cone cell lives in X (K, fixed) or in Y (Q)
            le.extend(region.le_rows(if q_kind { n } else { 0 }, width));
            // u = cone element as an affine function of (x, y)
            //   K: u = −(y − ȳ + δk) = −y + ȳ − δk
            //   Q: u = ȳ − δk − y
            // both read u = c0 − y with c0 = ȳ − δk
            let c0 = yb - &dk;
            for d in cone.dual_gens() {
                // ⟨d, c0 − y⟩ ≥ 0  ⇔  ⟨d, y⟩ ≤ ⟨d, c0⟩
                let mut row = vec![0.0; width];
                row[n..].copy_from_slice(d.coords());
                le.push((row, d.dot(&c0)));
            }
            let e = interior_dual(cone);
            let mut bases: Vec<Vec<(Vec<f64>, f64)>> = Vec::new();
            let zero_excluded = !matches!(concept, Concept::NondominatedQ { exclude_zero: false });
            if zero_excluded {
                // ⟨e, c0 − y⟩ ≥ 2τ‖e‖₁ forces ‖c0 − y‖∞ ≥ 2τ
                let mut row = vec![0.0; width];
                row[n..].copy_from_slice(e.coords());
                let mut rows = le.clone();
                rows.push((row, e.dot(&c0) - 2.0 * tau * e.norm(NormChoice::Sum)));
                bases.push(rows);
            } else {
                bases.push(le.clone());
            }
            for base in bases {
                let found = nearest(inst, &mrows, &target, &base, width)?;
                let Some((z, dist)) = found else { continue };
                if dist >= inst.epsilon - tau {
                    continue;
                }
                let (x, y) = Point::new(z.clone()).split(n);
                if q_kind && y.approx_eq(yb, tau) {
                    // y = ȳ is excluded: search the parts with y_i ≠ ȳ_i
                    for i in 0..m {
                        for s in [1.0, -1.0] {
                            let mut rows = base.clone();
                            let mut row = vec![0.0; width];
                            row[n + i] = -s;
                            rows.push((row, -s * yb[i] - 2.0 * tau));
                            if let Some((z2, d2)) = nearest(inst, &mrows, &target, &rows, width)? {
                                if d2 < inst.epsilon - tau {
                                    let (x2, y2) = Point::new(z2).split(n);
                                    consider(&mut best, d2, x2, y2, &c0);
                                }
                            }
                        }
                    }
                    continue;
                }
                consider(&mut best, dist, x, y, &c0);
            }
        }
    }
    let witness = best.map(|(_, w)| w);
    Ok(Certificate {
        verdict: if witness.is_some() {
            Verdict::Refuted
        } else {
            Verdict::Certified
        },
        witness,
        checked_count: checked,
        evidence: Evidence::Exact,
    })
}

fn consider(best: &mut Option<(f64, Witness)>, dist: f64, x: Point, y: Point, c0: &Point) {
    let w = Witness {
        cone_element: c0 - &y,
        x,
        y,
    };
    let better = best.as_ref().is_none_or(|(d, b)| {
        dist < d - 1e-12
            || ((dist - d).abs() <= 1e-12 && w.x.lex_cmp(&b.x).then_with(|| w.y.lex_cmp(&b.y)).is_lt())
    });
    if better {
        *best = Some((dist, w));
    }
}

fn nearest(
    inst: &Instance,
    mrows: &[Vec<f64>],
    target: &[f64],
    le: &[(Vec<f64>, f64)],
    width: usize,
) -> Result<Option<(Vec<f64>, f64)>> {
    NormMin {
        n: width,
        m: mrows,
        q: target,
        eq: &[],
        le,
    }
    .solve(inst.norm)
}

/// A point of int C⁺ (sum of the normalized dual generators) for pointed C.
pub(crate) fn interior_dual(c: &PolyCone) -> Point {
    let mut e = Point::zeros(c.dim());
    for d in c.dual_gens() {
        let n = d.norm2();
        if n > 0.0 {
            e = e.axpy(1.0 / n, d);
        }
    }
    e
}
