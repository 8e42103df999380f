//! Normal cones, coderivatives and subdifferentials for polyhedral data.
//!
//! Near a base point p a finite union of polyhedra coincides with the union
//! of the tangent cones T_j = {d : ⟨a, d⟩ ≤ 0, a active in piece j}. Limiting
//! objects are unions over the cells of the central arrangement of all
//! active normals: a direction d picks the pieces with d ∈ T_j and, inside
//! each, the normals with ⟨a, d⟩ = 0. For piecewise-affine functions the
//! same cells give
//!
//! ∂̂g(p + sd) = ∩_{j : d ∈ T_j} (∇_j + cone{a active in j : ⟨a, d⟩ = 0})
//!
//! and the limiting subdifferential is the union of these over all cells.

use crate::error::{check_dim, Error, Result};
use crate::geometry::dd::max_normalize;
use crate::geometry::{Halfspace, NormChoice, Point, PolyCone, Polyhedron, TAU};
use crate::evp::VdsEvpReport;
use crate::graph::{FiniteGraph, GraphMap, PaMap, PolyGraph};
use crate::solutions::Instance;
use crate::numeric::{Lp, NormMin, Rel};
use crate::vds::ConeField;
use crate::Evidence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Cap on arrangement cells and branch combinations.
pub const BRANCH_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeKind {
    Frechet,
    Limiting,
}

/// Normal cone at a point, in the dual space.
#[derive(Clone, Debug)]
pub struct NormalConeResult {
    pub cone: PolyCone,
    pub basepoint: Point,
    pub kind: ConeKind,
}

fn active_normals(p: &Polyhedron, x: &Point, tol: f64) -> Vec<Point> {
    p.active_set(x, tol)
        .into_iter()
        .map(|i| p.halfspaces[i].normal.clone())
        .collect()
}

fn pieces_containing<'a>(pieces: &'a [Polyhedron], x: &Point, tol: f64) -> Vec<&'a Polyhedron> {
    pieces.iter().filter(|p| p.contains(x, tol)).collect()
}

fn cone_of(dim: usize, gens: Vec<Point>) -> Result<PolyCone> {
    if gens.is_empty() {
        return Ok(PolyCone::zero(dim));
    }
    PolyCone::from_generators(dim, gens)
}

fn intersect_all(dim: usize, cones: Vec<PolyCone>) -> Result<PolyCone> {
    let mut it = cones.into_iter();
    let mut acc = it.next().unwrap_or_else(|| PolyCone::whole(dim));
    for c in it {
        acc = acc.intersection(&c)?;
    }
    Ok(acc)
}

/// N̂(S, p) for S a finite union of polyhedra: the intersection over pieces
/// containing p of the cones of their active normals.
pub fn frechet_normal_cone(pieces: &[Polyhedron], p: &Point) -> Result<NormalConeResult> {
    let dim = p.dim();
    let here = pieces_containing(pieces, p, TAU);
    if here.is_empty() {
        return Err(Error::Precondition(format!("{p} is not in the set")));
    }
    let mut cones = Vec::new();
    for q in here {
        check_dim(dim, q.dim)?;
        cones.push(cone_of(dim, active_normals(q, p, TAU))?);
    }
    Ok(NormalConeResult {
        cone: intersect_all(dim, cones)?,
        basepoint: p.clone(),
        kind: ConeKind::Frechet,
    })
}

/// Normals active at the base point, per local piece.
struct Local {
    dim: usize,
    hyperplanes: Vec<Point>,
    /// piece → indices into `hyperplanes`
    pieces: Vec<Vec<usize>>,
}

impl Local {
    fn new(dim: usize, normal_sets: Vec<Vec<Point>>) -> Self {
        let mut hyperplanes: Vec<Point> = Vec::new();
        let mut pieces = Vec::new();
        for set in normal_sets {
            let mut idx = Vec::new();
            for a in set {
                let mut v = a.into_coords();
                if !max_normalize(&mut v) {
                    continue;
                }
                let a = Point::new(v);
                let pos = match hyperplanes.iter().position(|h| h.approx_eq(&a, 1e-9)) {
                    Some(i) => i,
                    None => {
                        hyperplanes.push(a);
                        hyperplanes.len() - 1
                    }
                };
                if !idx.contains(&pos) {
                    idx.push(pos);
                }
            }
            pieces.push(idx);
        }
        Local {
            dim,
            hyperplanes,
            pieces,
        }
    }

    /// Realizable sign vectors of the arrangement of all hyperplanes,
    /// using each distinct hyperplane once (opposite normals share a sign).
    fn cells(&self) -> Result<Vec<Vec<i8>>> {
        // group ±a into one line
        let mut lines: Vec<Point> = Vec::new();
        let mut line_of = Vec::new();
        for h in &self.hyperplanes {
            let neg = h.scale(-1.0);
            match lines
                .iter()
                .position(|l| l.approx_eq(h, 1e-9) || l.approx_eq(&neg, 1e-9))
            {
                Some(i) => line_of.push((i, if lines[i].approx_eq(h, 1e-9) { 1 } else { -1 })),
                None => {
                    lines.push(h.clone());
                    line_of.push((lines.len() - 1, 1));
                }
            }
        }
        let mut out = Vec::new();
        let mut signs = Vec::with_capacity(lines.len());
        self.dfs(&lines, &mut signs, &mut out)?;
        Ok(out
            .into_iter()
            .map(|ls: Vec<i8>| line_of.iter().map(|&(i, s)| ls[i] * s).collect())
            .collect())
    }

    fn dfs(&self, lines: &[Point], signs: &mut Vec<i8>, out: &mut Vec<Vec<i8>>) -> Result<()> {
        if signs.len() == lines.len() {
            out.push(signs.clone());
            if out.len() > BRANCH_CAP {
                return Err(Error::CapExceeded {
                    what: "arrangement cells",
                    count: out.len(),
                    cap: BRANCH_CAP,
                });
            }
            return Ok(());
        }
        for s in [0i8, 1, -1] {
            signs.push(s);
            if sign_feasible(lines, signs, self.dim)? {
                self.dfs(lines, signs, out)?;
            }
            signs.pop();
        }
        Ok(())
    }

    /// For a cell: per piece, `Some(zero normals)` when the cell lies in T_j.
    fn branch(&self, signs: &[i8]) -> Vec<Option<Vec<Point>>> {
        self.pieces
            .iter()
            .map(|idx| {
                if idx.iter().any(|&i| signs[i] > 0) {
                    None
                } else {
                    Some(
                        idx.iter()
                            .filter(|&&i| signs[i] == 0)
                            .map(|&i| self.hyperplanes[i].clone())
                            .collect(),
                    )
                }
            })
            .collect()
    }
}

fn sign_feasible(lines: &[Point], signs: &[i8], dim: usize) -> Result<bool> {
    let mut lp = Lp::new(dim);
    for (l, &s) in lines.iter().zip(signs) {
        let row = l.coords().to_vec();
        match s {
            0 => lp.row(row, Rel::Eq, 0.0),
            1 => lp.row(row, Rel::Ge, 1.0),
            _ => lp.row(row, Rel::Le, -1.0),
        }
    }
    Ok(lp.feasible_point()?.is_some())
}

fn dedup_cones(cones: Vec<PolyCone>) -> Vec<PolyCone> {
    let mut out: Vec<PolyCone> = Vec::new();
    for c in cones {
        if out.iter().any(|o| o.contains_cone(&c, 1e-9)) {
            continue;
        }
        out.retain(|o| !c.contains_cone(o, 1e-9));
        out.push(c);
    }
    out
}

/// N(S, p) as a finite union of cones.
pub fn limiting_normal_cone(pieces: &[Polyhedron], p: &Point) -> Result<Vec<PolyCone>> {
    let dim = p.dim();
    let here = pieces_containing(pieces, p, TAU);
    if here.is_empty() {
        return Err(Error::Precondition(format!("{p} is not in the set")));
    }
    let local = Local::new(dim, here.iter().map(|q| active_normals(q, p, TAU)).collect());
    let mut cones = Vec::new();
    for signs in local.cells()? {
        let branch = local.branch(&signs);
        let parts: Vec<Vec<Point>> = branch.into_iter().flatten().collect();
        if parts.is_empty() {
            continue;
        }
        let cs = parts
            .into_iter()
            .map(|g| cone_of(dim, g))
            .collect::<Result<Vec<_>>>()?;
        cones.push(intersect_all(dim, cs)?);
    }
    Ok(dedup_cones(cones))
}

/// Normal cone of either kind as a union (a single cone for Fréchet).
pub fn normal_cone(pieces: &[Polyhedron], p: &Point, kind: ConeKind) -> Result<Vec<PolyCone>> {
    match kind {
        ConeKind::Frechet => Ok(vec![frechet_normal_cone(pieces, p)?.cone]),
        ConeKind::Limiting => limiting_normal_cone(pieces, p),
    }
}

/// A coderivative evaluation D*F(x, y)(y*).
#[derive(Clone, Debug)]
pub struct CoderivativeQuery<'a> {
    pub map: &'a PolyGraph,
    pub x: Point,
    pub y: Point,
    pub y_star: Point,
    pub kind: ConeKind,
}

/// {x* : (x*, −y*) ∈ N(Gr F, (x, y))} as a union of polyhedra (empty
/// union = empty set).
pub fn coderivative(q: &CoderivativeQuery<'_>) -> Result<Vec<Polyhedron>> {
    let (n, m) = (q.map.x_dim, q.map.y_dim);
    check_dim(n, q.x.dim())?;
    check_dim(m, q.y.dim())?;
    check_dim(m, q.y_star.dim())?;
    let z = q.x.concat(&q.y);
    if !q.map.pieces.iter().any(|p| p.contains(&z, TAU)) {
        return Err(Error::Precondition(format!("({}, {}) is off the graph", q.x, q.y)));
    }
    let cones = normal_cone(&q.map.pieces, &z, q.kind)?;
    let mut out = Vec::new();
    for c in &cones {
        if let Some(s) = slice(c, n, &q.y_star)? {
            out.push(s);
        }
    }
    Ok(out)
}

/// {x* : (x*, −y*) ∈ C}, or `None` when empty.
fn slice(c: &PolyCone, n: usize, y_star: &Point) -> Result<Option<Polyhedron>> {
    let mut hs = Vec::new();
    for d in c.dual_gens() {
        let (dx, dy) = d.split(n);
        // ⟨dx, x*⟩ − ⟨dy, y*⟩ ≥ 0
        let rhs = -dy.dot(y_star);
        if dx.is_zero(1e-14) {
            if rhs < -1e-12 {
                return Ok(None);
            }
            continue;
        }
        hs.push(Halfspace::new(dx.scale(-1.0), rhs));
    }
    let p = Polyhedron::new(n, hs)?;
    Ok(if p.is_empty()? { None } else { Some(p) })
}

/// Whether a polyhedral cone (given as a polyhedron through 0) is {0}.
pub fn is_zero_cone(p: &Polyhedron) -> Result<bool> {
    for i in 0..p.dim {
        for s in [1.0, -1.0] {
            let mut lp = Lp::new(p.dim);
            let mut c = vec![0.0; p.dim];
            c[i] = s;
            lp.set_objective(&c);
            p.push_rows(&mut lp, 0, p.dim);
            for j in 0..p.dim {
                lp.bound(j, -1.0, 1.0);
            }
            if let Some((_, v)) = lp.maximize()?.optimal() {
                if v > 1e-9 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// D*G(x, y)(0) = {0}, the Aubin criterion for closed graphs.
pub fn aubin_check(g: &PolyGraph, x: &Point, y: &Point) -> Result<bool> {
    let q = CoderivativeQuery {
        map: g,
        x: x.clone(),
        y: y.clone(),
        y_star: Point::zeros(g.y_dim),
        kind: ConeKind::Limiting,
    };
    for s in coderivative(&q)? {
        if !is_zero_cone(&s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A nonzero element of D*G(x, y)(0), if any.
pub fn aubin_witness(g: &PolyGraph, x: &Point, y: &Point) -> Result<Option<Point>> {
    let q = CoderivativeQuery {
        map: g,
        x: x.clone(),
        y: y.clone(),
        y_star: Point::zeros(g.y_dim),
        kind: ConeKind::Limiting,
    };
    for s in coderivative(&q)? {
        if let Some(w) = nonzero_element(&s)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Some nonzero point of a cone given as a polyhedron through 0.
pub(crate) fn nonzero_element(p: &Polyhedron) -> Result<Option<Point>> {
    for i in 0..p.dim {
        for s in [1.0, -1.0] {
            let mut lp = Lp::new(p.dim);
            let mut c = vec![0.0; p.dim];
            c[i] = s;
            lp.set_objective(&c);
            p.push_rows(&mut lp, 0, p.dim);
            for j in 0..p.dim {
                lp.bound(j, -1.0, 1.0);
            }
            if let Some((x, v)) = lp.maximize()?.optimal() {
                if v > 1e-9 {
                    return Ok(Some(Point::new(x.to_vec())));
                }
            }
        }
    }
    Ok(None)
}

/// One affine piece g(x) = ⟨grad, x⟩ + c on a region.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AffineFn {
    pub region: Polyhedron,
    pub grad: Point,
    pub c: f64,
}

/// A continuous piecewise-affine function ℝⁿ → ℝ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PaFunction {
    pub dim: usize,
    pub pieces: Vec<AffineFn>,
}

impl PaFunction {
    pub fn new(dim: usize, pieces: Vec<AffineFn>) -> Result<Self> {
        for p in &pieces {
            check_dim(dim, p.region.dim)?;
            check_dim(dim, p.grad.dim())?;
        }
        Ok(PaFunction { dim, pieces })
    }

    /// max_i ⟨g_i, x⟩ + c_i with the argmax regions made explicit.
    pub fn max_affine(dim: usize, terms: &[(Point, f64)]) -> Result<Self> {
        let mut pieces = Vec::new();
        for (i, (g, c)) in terms.iter().enumerate() {
            check_dim(dim, g.dim())?;
            let mut hs = Vec::new();
            for (j, (h, d)) in terms.iter().enumerate() {
                if i != j {
                    // ⟨h − g, x⟩ ≤ c − d
                    hs.push(Halfspace::new(h - g, c - d));
                }
            }
            let region = Polyhedron::new(dim, hs)?;
            if !region.is_empty()? {
                pieces.push(AffineFn {
                    region,
                    grad: g.clone(),
                    c: *c,
                });
            }
        }
        Self::new(dim, pieces)
    }

    /// Scalar piecewise-affine map as a function.
    pub fn from_pa_map(f: &PaMap) -> Result<Self> {
        if f.y_dim != 1 {
            return Err(Error::invalid("expected a scalar map"));
        }
        Self::new(
            f.x_dim,
            f.pieces
                .iter()
                .map(|p| AffineFn {
                    region: p.region.clone(),
                    grad: p.gradient(0),
                    c: p.offset[0],
                })
                .collect(),
        )
    }

    pub fn active(&self, x: &Point, tol: f64) -> Vec<usize> {
        (0..self.pieces.len())
            .filter(|&i| self.pieces[i].region.contains(x, tol))
            .collect()
    }

    pub fn eval(&self, x: &Point) -> Result<f64> {
        check_dim(self.dim, x.dim())?;
        self.pieces
            .iter()
            .find(|p| p.region.contains(x, TAU))
            .map(|p| p.grad.dot(x) + p.c)
            .ok_or_else(|| Error::invalid(format!("{x} outside the domain")))
    }

    fn local(&self, x: &Point) -> Result<(Vec<usize>, Local)> {
        check_dim(self.dim, x.dim())?;
        let act = self.active(x, TAU);
        if act.is_empty() {
            return Err(Error::Precondition(format!("{x} outside the domain")));
        }
        let local = Local::new(
            self.dim,
            act.iter().map(|&j| active_normals(&self.pieces[j].region, x, TAU)).collect(),
        );
        Ok((act, local))
    }

    fn branch_set(&self, act: &[usize], parts: &[Option<Vec<Point>>]) -> Result<Option<Polyhedron>> {
        let mut hs = Vec::new();
        for (j, part) in act.iter().zip(parts) {
            let Some(normals) = part else { continue };
            let grad = &self.pieces[*j].grad;
            let cone = cone_of(self.dim, normals.clone())?;
            for d in cone.dual_gens() {
                // ⟨d, x* − ∇⟩ ≥ 0
                hs.push(Halfspace::new(d.scale(-1.0), -d.dot(grad)));
            }
        }
        if parts.iter().all(|p| p.is_none()) {
            return Ok(None);
        }
        let p = Polyhedron::new(self.dim, hs)?;
        Ok(if p.is_empty()? { None } else { Some(p) })
    }

    /// ∂̂g(x) = ∩_{j active} (∇_j + N(R_j, x)); `None` when empty.
    pub fn frechet_subdiff(&self, x: &Point) -> Result<Option<Polyhedron>> {
        let (act, local) = self.local(x)?;
        let zero = vec![0i8; local.hyperplanes.len()];
        self.branch_set(&act, &local.branch(&zero))
    }

    /// ∂g(x) as a union over arrangement cells around x.
    pub fn limiting_subdiff(&self, x: &Point) -> Result<Vec<Polyhedron>> {
        let (act, local) = self.local(x)?;
        let mut out: Vec<Polyhedron> = Vec::new();
        for signs in local.cells()? {
            if let Some(p) = self.branch_set(&act, &local.branch(&signs))? {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        Ok(out)
    }

    /// Midpoint convexity on seeded pairs from `samples`.
    pub fn midpoint_convex(&self, samples: &[Point], pairs: usize, seed: u64, tau: f64) -> Result<ConvexityReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if samples.is_empty() {
            return Err(Error::EmptySet("convexity samples".into()));
        }
        for _ in 0..pairs {
            let x1 = &samples[rng.gen_range(0..samples.len())];
            let x2 = &samples[rng.gen_range(0..samples.len())];
            let alpha = [0.25, 0.5, 0.75][rng.gen_range(0..3)];
            let xm = x1.scale(alpha).axpy(1.0 - alpha, x2);
            let lhs = self.eval(&xm)?;
            let rhs = alpha * self.eval(x1)? + (1.0 - alpha) * self.eval(x2)?;
            if lhs > rhs + tau * (1.0 + rhs.abs()) {
                return Ok(ConvexityReport {
                    holds: false,
                    checked: pairs,
                    evidence: Evidence::Sampled,
                    witness: Some((x1.clone(), x2.clone(), alpha)),
                });
            }
        }
        Ok(ConvexityReport {
            holds: true,
            checked: pairs,
            evidence: Evidence::Sampled,
            witness: None,
        })
    }
}

/// Subdifferential of a piecewise-affine function at a point.
#[derive(Clone, Debug)]
pub struct Subdiff {
    /// Fréchet subdifferential (for convex g, the convex hull of active gradients).
    pub frechet: Option<Polyhedron>,
    /// Limiting subdifferential as a union.
    pub limiting: Vec<Polyhedron>,
    pub evidence: Evidence,
}

pub fn subdiff_pa(g: &PaFunction, x: &Point) -> Result<Subdiff> {
    Ok(Subdiff {
        frechet: g.frechet_subdiff(x)?,
        limiting: g.limiting_subdiff(x)?,
        evidence: Evidence::Exact,
    })
}

/// min ‖p + Σ μ_i g_i‖ over p ∈ P, μ ≥ 0, in the given norm.
pub fn dist_to_sum(norm: NormChoice, p: &Polyhedron, gens: &[Point]) -> Result<Option<f64>> {
    let n = p.dim;
    let w = n + gens.len();
    let m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r = vec![0.0; w];
            r[i] = 1.0;
            for (j, g) in gens.iter().enumerate() {
                r[n + j] = g[i];
            }
            r
        })
        .collect();
    let mut le = p.le_rows(0, w);
    for j in 0..gens.len() {
        let mut r = vec![0.0; w];
        r[n + j] = -1.0;
        le.push((r, 0.0));
    }
    let q = vec![0.0; n];
    Ok(NormMin {
        n: w,
        m: &m,
        q: &q,
        eq: &[],
        le: &le,
    }
    .solve(norm)?
    .map(|(_, v)| v))
}

/// s^f_{k,a−K} as an explicit piecewise-affine function for piecewise-affine
/// f and a field without default; needs ⟨d, k⟩ > 0 for all dual generators.
pub fn scalarization_pa(f: &PaMap, field: &ConeField, a: &Point, k: &Point) -> Result<PaFunction> {
    check_dim(f.x_dim, field.domain_dim())?;
    check_dim(f.y_dim, field.cone_dim())?;
    if field.default_cone().is_some() {
        return Err(Error::invalid("cone field with a default cone is not piecewise constant on polyhedra"));
    }
    let n = f.x_dim;
    let mut pieces = Vec::new();
    for fp in &f.pieces {
        for cell in field.cells() {
            let base = fp.region.intersect(&cell.region)?;
            if base.is_empty()? {
                continue;
            }
            let duals = cell.cone.dual_gens();
            // term_d(x) = ⟨d, A x + b − a⟩ / ⟨d, k⟩
            let mut terms = Vec::new();
            for d in duals {
                let dk = d.dot(k);
                if dk <= 1e-12 {
                    return Err(Error::Hypothesis("k is not interior to K(x) on a cell".into()));
                }
                let grad = fp.adjoint(d).scale(1.0 / dk);
                let c = d.dot(&(&fp.offset - a)) / dk;
                terms.push((grad, c));
            }
            for (i, (g, c)) in terms.iter().enumerate() {
                let mut hs = base.halfspaces.clone();
                for (j, (h, e)) in terms.iter().enumerate() {
                    if i != j {
                        hs.push(Halfspace::new(h - g, c - e));
                    }
                }
                let region = Polyhedron::new(n, hs)?;
                if !region.is_empty()? {
                    pieces.push(AffineFn {
                        region,
                        grad: g.clone(),
                        c: *c,
                    });
                }
            }
        }
    }
    PaFunction::new(n, pieces)
}

/// y* ∈ P⁺ with ⟨y*, k⟩ = 1 and x* ∈ ∂(y* ∘ f)(x̄).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    pub y_star: Point,
    /// Per active piece of f, the normal-cone element x* − A_jᵀ y*.
    pub normal_parts: Vec<Point>,
}

/// Decomposes x* ∈ ∂s(x̄) through a functional of the base of P⁺.
///
/// For convex data ∂(y* ∘ f)(x̄) = ∩_j (A_jᵀ y* + N(R_j, x̄)), linear in y*,
/// so the search is one LP over the base.
pub fn decompose_subdiff(f: &PaMap, p: &PolyCone, k: &Point, xb: &Point, x_star: &Point) -> Result<Option<Decomposition>> {
    let (n, m) = (f.x_dim, f.y_dim);
    check_dim(m, p.dim())?;
    check_dim(m, k.dim())?;
    check_dim(n, xb.dim())?;
    check_dim(n, x_star.dim())?;
    let act = f.pieces_at(xb, TAU);
    if act.is_empty() {
        return Err(Error::Precondition(format!("{xb} outside the domain of f")));
    }
    let normals: Vec<Vec<Point>> = act
        .iter()
        .map(|&j| active_normals(&f.pieces[j].region, xb, TAU))
        .collect();
    let total: usize = normals.iter().map(|v| v.len()).sum();
    let w = m + total;
    let mut lp = Lp::new(w);
    for g in p.primal_gens() {
        let mut r = vec![0.0; w];
        r[..m].copy_from_slice(g.coords());
        lp.row(r, Rel::Ge, 0.0);
    }
    let mut r = vec![0.0; w];
    r[..m].copy_from_slice(k.coords());
    lp.row(r, Rel::Eq, 1.0);
    let mut off = m;
    for (jj, &j) in act.iter().enumerate() {
        let piece = &f.pieces[j];
        for i in 0..n {
            // (A_jᵀ y*)_i + Σ μ a_i = x*_i
            let mut r = vec![0.0; w];
            for (l, row) in piece.matrix.iter().enumerate() {
                r[l] = row[i];
            }
            for (t, a) in normals[jj].iter().enumerate() {
                r[off + t] = a[i];
            }
            lp.row(r, Rel::Eq, x_star[i]);
        }
        for t in 0..normals[jj].len() {
            lp.nonneg(off + t);
        }
        off += normals[jj].len();
    }
    let Some(sol) = lp.feasible_point()? else {
        return Ok(None);
    };
    let y_star = Point::new(sol[..m].to_vec());
    let normal_parts = act
        .iter()
        .map(|&j| x_star - &f.pieces[j].adjoint(&y_star))
        .collect();
    Ok(Some(Decomposition { y_star, normal_parts }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub holds: bool,
    pub checked: usize,
    pub evidence: Evidence,
    /// (x₁, x₂, α) violating the inclusion
    pub witness: Option<(Point, Point, f64)>,
}

const ALPHAS: [f64; 3] = [0.25, 0.5, 0.75];

/// αf(x₁) + (1−α)f(x₂) ∈ f(αx₁ + (1−α)x₂) + R on sampled triples; exact
/// (always true) for a single affine piece on the whole space.
pub fn convexity_wrt_map(f: &PaMap, r: &PolyCone, samples: &[Point], triples: usize, seed: u64) -> Result<ConvexityReport> {
    check_dim(f.y_dim, r.dim())?;
    if let [p] = f.pieces.as_slice() {
        if p.region.halfspaces.is_empty() {
            return Ok(ConvexityReport {
                holds: true,
                checked: 0,
                evidence: Evidence::Exact,
                witness: None,
            });
        }
    }
    if samples.is_empty() {
        return Err(Error::EmptySet("convexity samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..triples {
        let x1 = &samples[rng.gen_range(0..samples.len())];
        let x2 = &samples[rng.gen_range(0..samples.len())];
        let alpha = ALPHAS[rng.gen_range(0..3)];
        let xm = x1.scale(alpha).axpy(1.0 - alpha, x2);
        let comb = f.eval(x1)?.scale(alpha).axpy(1.0 - alpha, &f.eval(x2)?);
        let diff = &comb - &f.eval(&xm)?;
        if !r.contains_fast(&diff, TAU * (1.0 + comb.norm2())) {
            return Ok(ConvexityReport {
                holds: false,
                checked: triples,
                evidence: Evidence::Sampled,
                witness: Some((x1.clone(), x2.clone(), alpha)),
            });
        }
    }
    Ok(ConvexityReport {
        holds: true,
        checked: triples,
        evidence: Evidence::Sampled,
        witness: None,
    })
}

/// Same inclusion for a finite graph, over triples whose combination is a
/// grid point; all such triples are checked when there are at most
/// `triples` of them, otherwise a seeded sample.
pub fn convexity_wrt_graph(g: &FiniteGraph, r: &PolyCone, triples: usize, seed: u64) -> Result<ConvexityReport> {
    check_dim(g.y_dim, r.dim())?;
    let mut valid = Vec::new();
    for (i, e1) in g.entries.iter().enumerate() {
        for (j, e2) in g.entries.iter().enumerate() {
            if i == j {
                continue;
            }
            for alpha in ALPHAS {
                let xm = e1.x.scale(alpha).axpy(1.0 - alpha, &e2.x);
                if let Some(m) = g.entries.iter().position(|e| e.x.approx_eq(&xm, 1e-9)) {
                    valid.push((i, j, alpha, m));
                }
            }
        }
    }
    let (chosen, evidence) = if valid.len() <= triples {
        (valid, Evidence::Exact)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ((0..triples).map(|_| valid[rng.gen_range(0..valid.len())]).collect(), Evidence::Sampled)
    };
    let checked = chosen.len();
    for (i, j, alpha, m) in chosen {
        let (e1, e2, em) = (&g.entries[i], &g.entries[j], &g.entries[m]);
        for y1 in &e1.values {
            for y2 in &e2.values {
                let comb = y1.scale(alpha).axpy(1.0 - alpha, y2);
                let ok = em
                    .values
                    .iter()
                    .any(|y| r.contains_fast(&(&comb - y), TAU * (1.0 + comb.norm2())));
                if !ok {
                    return Ok(ConvexityReport {
                        holds: false,
                        checked,
                        evidence: Evidence::Exact,
                        witness: Some((e1.x.clone(), e2.x.clone(), alpha)),
                    });
                }
            }
        }
    }
    Ok(ConvexityReport {
        holds: true,
        checked,
        evidence,
        witness: None,
    })
}

/// Fréchet subdifferential of x ↦ T_u(x, A) at x̄ ∉ A for a polyhedron A:
/// conv{g_i} + cone{n_j}, with g_i = a_i/(−⟨a_i,u⟩) over rows active at
/// a = x̄ + T u that block the motion, and n_j the active normals of the
/// domain A − cone{u}.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TminSubdiff {
    pub t: f64,
    pub a: Point,
    pub hull: Vec<Point>,
    pub rays: Vec<Point>,
}

pub fn t_min_subdiff(u: &Point, x: &Point, a_set: &Polyhedron) -> Result<TminSubdiff> {
    check_dim(a_set.dim, u.dim())?;
    check_dim(a_set.dim, x.dim())?;
    if a_set.contains(x, TAU) {
        return Err(Error::Precondition("base point lies in A".into()));
    }
    let t = crate::scalarize::t_min(u, x, crate::scalarize::Target::Polyhedron(a_set))?;
    let Some(t) = t.finite() else {
        return Err(Error::Precondition("base point is outside A − cone{u}".into()));
    };
    let a = x.axpy(t, u);
    let tol = 1e-9;
    let mut hull = Vec::new();
    let (mut plus, mut minus, mut zero) = (Vec::new(), Vec::new(), Vec::new());
    for h in &a_set.halfspaces {
        let au = h.normal.dot(u);
        if au < -1e-12 {
            minus.push((h, au));
            if (h.normal.dot(&a) - h.offset).abs() <= tol * (1.0 + h.offset.abs()) {
                hull.push(h.normal.scale(-1.0 / au));
            }
        } else if au > 1e-12 {
            plus.push((h, au));
        } else {
            zero.push(h);
        }
    }
    // rows of A − cone{u} by eliminating t
    let mut rows: Vec<(Point, f64)> = zero.iter().map(|h| (h.normal.clone(), h.offset)).collect();
    for (hp, ap) in &plus {
        rows.push((hp.normal.clone(), hp.offset));
        for (hm, am) in &minus {
            rows.push((
                hp.normal.scale(1.0 / ap).axpy(-1.0 / am, &hm.normal),
                hp.offset / ap - hm.offset / am,
            ));
        }
    }
    let rays = rows
        .into_iter()
        .filter(|(nv, b)| !nv.is_zero(1e-12) && (nv.dot(x) - b).abs() <= tol * (1.0 + b.abs()))
        .map(|(nv, _)| nv)
        .collect();
    Ok(TminSubdiff { t, a, hull, rays })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NcCase {
    /// √δ ≥ ε: the extra cone{x̄ − x̃} term is present
    I,
    /// √δ < ε
    Ii,
}

/// dist(0, ∂s(x̄) + N(Ω, x̄) [+ cone{x̄ − x̃}]) against the bound √δ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalarizedNcReport {
    pub case: NcCase,
    pub x_bar: Point,
    pub residual: f64,
    pub bound: f64,
    pub holds: bool,
    pub branches_checked: usize,
}

/// Necessary-condition check at the Ekeland point of [`crate::evp::evp_vds`].
///
/// Needs a piecewise-affine objective, a cone field without default and a
/// polyhedral Ω. Case (i) is reported but experimental.
pub fn check_scalarized_nc(inst: &Instance, x_tilde: &Point, evp: &VdsEvpReport) -> Result<ScalarizedNcReport> {
    let GraphMap::PiecewiseAffine(f) = &inst.objective else {
        return Err(Error::invalid("the necessary-condition check needs a piecewise-affine objective"));
    };
    let xb = &evp.evp.x_bar;
    let a = f.eval(x_tilde)?;
    let s = scalarization_pa(f, &inst.cone_field, &a, inst.k.point())?;
    let branches = s.limiting_subdiff(xb)?;
    if branches.is_empty() {
        return Err(Error::numerical("empty limiting subdifferential"));
    }
    let omega = &inst.omega.region;
    let n_omega = frechet_normal_cone(std::slice::from_ref(omega), xb)?.cone;
    let mut gens: Vec<Point> = n_omega.primal_gens().to_vec();
    let bound = inst.delta.sqrt();
    let case = if bound < inst.epsilon { NcCase::Ii } else { NcCase::I };
    if case == NcCase::I {
        let v = xb - x_tilde;
        if v.norm2() > 1e-12 {
            if n_omega.contains_fast(&-&v, 1e-12) {
                return Err(Error::Hypothesis("x̄ − x̃ lies in −N(Ω, x̄)".into()));
            }
            gens.push(v);
        }
    }
    let dual = inst.norm.dual();
    let mut residual = f64::INFINITY;
    for b in &branches {
        if let Some(d) = dist_to_sum(dual, b, &gens)? {
            residual = residual.min(d);
        }
    }
    let tol = inst.tau().max(1e-8);
    Ok(ScalarizedNcReport {
        case,
        x_bar: xb.clone(),
        residual,
        bound,
        holds: residual <= bound + tol,
        branches_checked: branches.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AffinePiece;

    fn p2(a: f64, b: f64) -> Point {
        Point::from([a, b])
    }

    #[test]
    fn halfspace_normal_cones() {
        let s = vec![Polyhedron::halfspace([1.0, 0.0], 0.0)];
        let c = frechet_normal_cone(&s, &p2(0.0, 0.5)).unwrap().cone;
        assert!(c.same_set(&PolyCone::from_generators(2, vec![p2(1.0, 0.0)]).unwrap(), 1e-9));
        let c = frechet_normal_cone(&s, &p2(-1.0, 0.0)).unwrap().cone;
        assert!(c.is_zero());
        let l = limiting_normal_cone(&s, &p2(0.0, 0.0)).unwrap();
        assert_eq!(l.len(), 1);
        assert!(l[0].same_set(&PolyCone::from_generators(2, vec![p2(1.0, 0.0)]).unwrap(), 1e-9));
        assert!(frechet_normal_cone(&s, &p2(1.0, 0.0)).is_err());
    }

    #[test]
    fn union_of_halfplanes_is_everything() {
        let s = vec![
            Polyhedron::halfspace([0.0, -1.0], 0.0),
            Polyhedron::halfspace([0.0, 1.0], 0.0),
        ];
        assert!(frechet_normal_cone(&s, &p2(0.0, 0.0)).unwrap().cone.is_zero());
        // dense sampling of the limsup quotient
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs = p2(0.3, -0.7);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..2000 {
            let u = p2(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)).scale(1e-3);
            worst = worst.max(xs.dot(&u) / u.norm2());
        }
        assert!(worst > 0.5);
    }

    #[test]
    fn axes_limiting_cone() {
        let x_axis = Polyhedron::new(2, vec![Halfspace::new(p2(0.0, 1.0), 0.0), Halfspace::new(p2(0.0, -1.0), 0.0)]).unwrap();
        let y_axis = Polyhedron::new(2, vec![Halfspace::new(p2(1.0, 0.0), 0.0), Halfspace::new(p2(-1.0, 0.0), 0.0)]).unwrap();
        let l = limiting_normal_cone(&[x_axis.clone(), y_axis.clone()], &p2(0.0, 0.0)).unwrap();
        let span_y = PolyCone::from_generators(2, vec![p2(0.0, 1.0), p2(0.0, -1.0)]).unwrap();
        let span_x = PolyCone::from_generators(2, vec![p2(1.0, 0.0), p2(-1.0, 0.0)]).unwrap();
        // the union also contains the whole space at the origin's own cell
        assert!(l.iter().any(|c| c.contains_cone(&span_y, 1e-9)));
        assert!(l.iter().any(|c| c.contains_cone(&span_x, 1e-9)));
        let f = frechet_normal_cone(&[x_axis, y_axis], &p2(0.0, 0.0)).unwrap().cone;
        assert!(l.iter().any(|c| c.contains_cone(&f, 1e-9)));
    }

    fn affine_graph(a: Vec<Vec<f64>>) -> PolyGraph {
        PaMap::affine(a.clone(), Point::zeros(a.len())).unwrap().to_poly_graph()
    }

    #[test]
    fn affine_coderivative_is_adjoint() {
        let g = affine_graph(vec![vec![2.0, 0.0], vec![0.0, 3.0]]);
        let q = CoderivativeQuery {
            map: &g,
            x: p2(0.5, 1.0),
            y: p2(1.0, 3.0),
            y_star: p2(1.0, 1.0),
            kind: ConeKind::Limiting,
        };
        let s = coderivative(&q).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s[0].contains(&p2(2.0, 3.0), 1e-9));
        assert!(!s[0].contains(&p2(2.0, 3.1), 1e-9));
        assert!(aubin_check(&g, &p2(0.0, 0.0), &p2(0.0, 0.0)).unwrap());
    }

    #[test]
    fn constant_cone_map_coderivative() {
        // F ≡ ℝ²₊ on X = ℝ: graph ℝ × ℝ²₊
        let g = PolyGraph::new(
            1,
            2,
            vec![Polyhedron::new(3, vec![Halfspace::new([0.0, -1.0, 0.0], 0.0), Halfspace::new([0.0, 0.0, -1.0], 0.0)]).unwrap()],
        )
        .unwrap();
        let at = |ys: Point| {
            coderivative(&CoderivativeQuery {
                map: &g,
                x: Point::from([0.3]),
                y: Point::zeros(2),
                y_star: ys,
                kind: ConeKind::Frechet,
            })
            .unwrap()
        };
        // −y* ∈ N(ℝ²₊, 0) = −ℝ²₊ ⇔ y* ∈ ℝ²₊
        let s = at(p2(1.0, 2.0));
        assert_eq!(s.len(), 1);
        assert!(is_zero_cone(&s[0]).unwrap());
        assert!(at(p2(-1.0, 2.0)).is_empty());
        assert!(aubin_check(&g, &Point::from([0.3]), &Point::zeros(2)).unwrap());
    }

    #[test]
    fn inverse_of_constant_fails_aubin() {
        let g = affine_graph(vec![vec![0.0]]).inverse();
        assert!(!aubin_check(&g, &Point::from([0.0]), &Point::from([0.0])).unwrap());
        assert!(aubin_witness(&g, &Point::from([0.0]), &Point::from([0.0])).unwrap().is_some());
    }

    #[test]
    fn abs_subdifferential() {
        let g = PaFunction::max_affine(1, &[(Point::from([1.0]), 0.0), (Point::from([-1.0]), 0.0)]).unwrap();
        let s = subdiff_pa(&g, &Point::from([0.0])).unwrap();
        let f = s.frechet.unwrap();
        assert!(f.contains(&Point::from([-1.0]), 1e-12) && f.contains(&Point::from([1.0]), 1e-12));
        assert!(!f.contains(&Point::from([1.01]), 1e-12));
        let smooth = subdiff_pa(&g, &Point::from([2.0])).unwrap().frechet.unwrap();
        assert!(smooth.contains(&Point::from([1.0]), 1e-12));
        assert!(!smooth.contains(&Point::from([0.9]), 1e-9));
    }

    #[test]
    fn minus_abs_has_empty_frechet_and_two_limiting() {
        let g = PaFunction::new(
            1,
            vec![
                AffineFn { region: Polyhedron::halfspace([1.0], 0.0), grad: Point::from([1.0]), c: 0.0 },
                AffineFn { region: Polyhedron::halfspace([-1.0], 0.0), grad: Point::from([-1.0]), c: 0.0 },
            ],
        )
        .unwrap();
        let s = subdiff_pa(&g, &Point::from([0.0])).unwrap();
        assert!(s.frechet.is_none());
        assert_eq!(s.limiting.len(), 2);
    }

    #[test]
    fn max_of_affine_composed() {
        // max(y₁, y₂) with y = (x₁ + x₂, x₁ − x₂): active hull at x₂ = 0
        let g = PaFunction::max_affine(2, &[(p2(1.0, 1.0), 0.0), (p2(1.0, -1.0), 0.0)]).unwrap();
        let f = subdiff_pa(&g, &p2(0.4, 0.0)).unwrap().frechet.unwrap();
        assert!(f.contains(&p2(1.0, 0.0), 1e-12));
        assert!(f.contains(&p2(1.0, 1.0), 1e-12) && f.contains(&p2(1.0, -1.0), 1e-12));
        assert!(!f.contains(&p2(0.9, 0.0), 1e-9));
        // finite-difference oracle for directional derivative along (0, 1)
        let h = 1e-6;
        let dd = (g.eval(&p2(0.4, h)).unwrap() - g.eval(&p2(0.4, 0.0)).unwrap()) / h;
        assert!((dd - 1.0).abs() < 1e-6);
    }

    #[test]
    fn decomposition_examples() {
        let f = PaMap::affine(vec![vec![1.0]], Point::zeros(1)).unwrap();
        let d = decompose_subdiff(&f, &PolyCone::orthant(1), &Point::from([1.0]), &Point::from([0.0]), &Point::from([1.0]))
            .unwrap()
            .unwrap();
        assert!((d.y_star[0] - 1.0).abs() < 1e-12);
        let f = PaMap::affine(vec![vec![1.0, 0.0], vec![0.0, 1.0]], Point::zeros(2)).unwrap();
        let s = 0.5f64.sqrt();
        let k = p2(s, s);
        let d = decompose_subdiff(&f, &PolyCone::orthant(2), &k, &p2(0.0, 0.0), &p2(0.3 / s, 0.7 / s)).unwrap().unwrap();
        assert!((d.y_star.dot(&k) - 1.0).abs() < 1e-9);
        assert!(decompose_subdiff(&f, &PolyCone::orthant(2), &k, &p2(0.0, 0.0), &p2(-1.0, 0.0)).unwrap().is_none());
    }

    #[test]
    fn convexity_examples() {
        let grid: Vec<Point> = (-4..=4).map(|i| Point::from([i as f64 * 0.25])).collect();
        let sq = FiniteGraph::tabulate(&grid, 1, |x| Point::from([x[0] * x[0]])).unwrap();
        let r = PolyCone::orthant(1);
        assert!(convexity_wrt_graph(&sq, &r, 1000, 1).unwrap().holds);
        let neg = FiniteGraph::tabulate(&grid, 1, |x| Point::from([-x[0] * x[0]])).unwrap();
        let rep = convexity_wrt_graph(&neg, &r, 1000, 1).unwrap();
        assert!(!rep.holds && rep.witness.is_some());
        let aff = PaMap::affine(vec![vec![2.0]], Point::from([1.0])).unwrap();
        assert!(convexity_wrt_map(&aff, &r, &[], 10, 0).unwrap().holds);
    }

    #[test]
    fn t_min_subdiff_properties() {
        // A = unit box [1,2]², u = (1, 0.5)
        let a = Polyhedron::boxed(&p2(1.0, 1.0), &p2(2.0, 2.0));
        let u = p2(1.0, 0.5);
        let x = p2(0.0, 0.6);
        let s = t_min_subdiff(&u, &x, &a).unwrap();
        assert!((s.t - 1.0).abs() < 1e-9);
        for g in &s.hull {
            assert!((g.dot(&u) + 1.0).abs() < 1e-12);
        }
        for r in &s.rays {
            assert!(r.dot(&u).abs() < 1e-12);
        }
        assert!(!s.hull.is_empty());
    }

    #[test]
    fn scalarization_of_line() {
        let f = PaMap::new(
            1,
            1,
            vec![AffinePiece { region: Polyhedron::whole(1), matrix: vec![vec![1.0]], offset: Point::zeros(1) }],
        )
        .unwrap();
        let field = ConeField::constant(1, PolyCone::orthant(1)).unwrap();
        let s = scalarization_pa(&f, &field, &Point::from([0.3]), &Point::from([1.0])).unwrap();
        assert!((s.eval(&Point::from([0.5])).unwrap() - 0.2).abs() < 1e-12);
        let d = dist_to_sum(NormChoice::Euclidean, &s.frechet_subdiff(&Point::from([0.0])).unwrap().unwrap(), &[]).unwrap().unwrap();
        assert!((d - 1.0).abs() < 1e-9);
        let d = dist_to_sum(NormChoice::Euclidean, &s.frechet_subdiff(&Point::from([0.0])).unwrap().unwrap(), &[Point::from([-1.0])]).unwrap().unwrap();
        assert!(d < 1e-9);
    }

    fn abs_instance() -> Instance {
        use crate::geometry::Direction;
        use crate::solutions::{Omega, Tolerances, VdsKind};
        let pieces = vec![
            AffinePiece { region: Polyhedron::halfspace([-1.0], 0.0), matrix: vec![vec![1.0]], offset: Point::zeros(1) },
            AffinePiece { region: Polyhedron::halfspace([1.0], 0.0), matrix: vec![vec![-1.0]], offset: Point::zeros(1) },
        ];
        let grid = (-100..=100).map(|i| Point::from([i as f64 / 100.0])).collect();
        Instance {
            x_dim: 1,
            y_dim: 1,
            norm: NormChoice::Euclidean,
            omega: Omega { region: Polyhedron::boxed(&Point::from([-1.0]), &Point::from([1.0])), grid: Some(grid) },
            objective: GraphMap::PiecewiseAffine(PaMap::new(1, 1, pieces).unwrap()),
            vds_kind: VdsKind::K,
            cone_field: ConeField::constant(1, PolyCone::orthant(1)).unwrap(),
            k: Direction::new(Point::from([1.0])).unwrap(),
            epsilon: 1.0,
            delta: 0.04,
            tolerances: Tolerances::default(),
            candidate: None,
            ball_coords: None,
        }
    }

    #[test]
    fn nc32_at_kink() {
        let inst = abs_instance();
        let xt = Point::from([0.03]);
        let rep = crate::evp::evp_vds(&inst, &xt, 0.5).unwrap();
        assert!(rep.evp.x_bar.coords()[0].abs() < 1e-12);
        let nc = check_scalarized_nc(&inst, &xt, &rep).unwrap();
        assert_eq!(nc.case, NcCase::Ii);
        assert!(nc.holds && nc.residual < 1e-9);
    }

    #[test]
    fn nc32_at_boundary_of_omega() {
        let mut inst = abs_instance();
        inst.omega.region = Polyhedron::boxed(&Point::from([0.0]), &Point::from([1.0]));
        let grid = (0..=100).map(|i| Point::from([i as f64 / 100.0])).collect();
        inst.omega.grid = Some(grid);
        let xt = Point::from([0.0]);
        let rep = crate::evp::evp_vds(&inst, &xt, 0.5).unwrap();
        let nc = check_scalarized_nc(&inst, &xt, &rep).unwrap();
        // ∂s(0) ∋ 1 and N(Ω, 0) = −ℝ₊ cancel
        assert!(nc.holds && nc.residual < 1e-9);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn halfspaces2() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -0.5f64..0.5), 1..4)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn frechet_inside_limiting(rows in halfspaces2(), rows2 in halfspaces2()) {
                // two polyhedra through the origin so that 0 is a common point
                let mk = |rows: &[(f64, f64, f64)]| {
                    Polyhedron::new(2, rows.iter().map(|&(a, b, c)| Halfspace::new([a, b], c.abs())).collect()).unwrap()
                };
                let s = vec![mk(&rows), mk(&rows2)];
                let p = Point::zeros(2);
                let f = frechet_normal_cone(&s, &p).unwrap().cone;
                let l = limiting_normal_cone(&s, &p).unwrap();
                for g in f.primal_gens() {
                    prop_assert!(l.iter().any(|c| c.contains_fast(g, 1e-7)));
                }
            }

            #[test]
            fn t_min_subdiff_on_normal_cone(
                lo in (-1.0f64..1.0, -1.0f64..1.0),
                w in (0.2f64..2.0, 0.2f64..2.0),
                u in (0.1f64..1.0, -1.0f64..1.0),
                back in 0.5f64..3.0,
                off in -0.1f64..0.1,
            ) {
                let lo = p2(lo.0, lo.1);
                let hi = p2(lo[0] + w.0, lo[1] + w.1);
                let a = Polyhedron::boxed(&lo, &hi);
                let u = p2(u.0, u.1);
                let mid = lo.axpy(0.5, &(&hi - &lo)).axpy(off, &p2(0.0, 1.0));
                let x = mid.axpy(-back - 2.0 * (w.0 + w.1) / u.norm2(), &u);
                prop_assume!(!a.contains(&x, 1e-6));
                let s = t_min_subdiff(&u, &x, &a).unwrap();
                let n = frechet_normal_cone(std::slice::from_ref(&a), &s.a).unwrap().cone;
                for g in &s.hull {
                    prop_assert!((g.dot(&u) + 1.0).abs() < 1e-8);
                    prop_assert!(n.contains_fast(g, 1e-8));
                }
            }
        }
    }
}
