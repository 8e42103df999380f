use super::dd::{h_to_v, max_normalize};
use super::{NormChoice, Point, TAU};
use crate::error::{check_dim, Error, Result};
use crate::numeric::{Lp, LpOutcome, NormMin, Rel};
use serde::{Deserialize, Serialize};

/// ⟨normal, x⟩ ≤ offset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Halfspace {
    pub normal: Point,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: impl Into<Point>, offset: f64) -> Self {
        Halfspace {
            normal: normal.into(),
            offset,
        }
    }

    pub fn slack(&self, x: &Point) -> f64 {
        self.offset - self.normal.dot(x)
    }
}

/// A convex polyhedron {x : ⟨a_i, x⟩ ≤ b_i}. No halfspaces means the whole space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Polyhedron {
    pub dim: usize,
    pub halfspaces: Vec<Halfspace>,
}

/// Vertex/ray description: P = conv(points) + cone(rays) + span(lineality).
#[derive(Clone, Debug, Default)]
pub struct VRep {
    pub points: Vec<Point>,
    pub rays: Vec<Point>,
    pub lineality: Vec<Point>,
}

impl VRep {
    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }
}

impl Polyhedron {
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        for h in &halfspaces {
            check_dim(dim, h.normal.dim())?;
            if !h.offset.is_finite() || !h.normal.is_finite() {
                return Err(Error::invalid("non-finite halfspace data"));
            }
        }
        Ok(Polyhedron { dim, halfspaces })
    }

    pub fn whole(dim: usize) -> Self {
        Polyhedron {
            dim,
            halfspaces: Vec::new(),
        }
    }

    pub fn halfspace(normal: impl Into<Point>, offset: f64) -> Self {
        let normal = normal.into();
        Polyhedron {
            dim: normal.dim(),
            halfspaces: vec![Halfspace { normal, offset }],
        }
    }

    /// Axis-aligned box [lo, hi].
    pub fn boxed(lo: &Point, hi: &Point) -> Self {
        let n = lo.dim();
        let mut hs = Vec::with_capacity(2 * n);
        for i in 0..n {
            hs.push(Halfspace::new(Point::unit(n, i), hi[i]));
            hs.push(Halfspace::new(Point::unit(n, i).scale(-1.0), -lo[i]));
        }
        Polyhedron { dim: n, halfspaces: hs }
    }

    /// Closed max-norm ball.
    pub fn cube(center: &Point, radius: f64) -> Self {
        let r = Point::new(vec![radius; center.dim()]);
        Self::boxed(&(center - &r), &(center + &r))
    }

    /// Closed sum-norm ball.
    pub fn cross_polytope(center: &Point, radius: f64) -> Self {
        let n = center.dim();
        let mut hs = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            let a: Vec<f64> = (0..n)
                .map(|i| if mask & (1 << i) != 0 { -1.0 } else { 1.0 })
                .collect();
            let a = Point::new(a);
            let off = radius + a.dot(center);
            hs.push(Halfspace { normal: a, offset: off });
        }
        Polyhedron { dim: n, halfspaces: hs }
    }

    pub fn singleton(p: &Point) -> Self {
        Self::boxed(p, p)
    }

    pub fn intersect(&self, other: &Polyhedron) -> Result<Polyhedron> {
        check_dim(self.dim, other.dim)?;
        let mut hs = self.halfspaces.clone();
        hs.extend(other.halfspaces.iter().cloned());
        Ok(Polyhedron { dim: self.dim, halfspaces: hs })
    }

    /// self × other as a polyhedron of the product space.
    pub fn product(&self, other: &Polyhedron) -> Polyhedron {
        let n = self.dim + other.dim;
        let mut hs = Vec::new();
        for h in &self.halfspaces {
            hs.push(Halfspace {
                normal: h.normal.concat(&Point::zeros(other.dim)),
                offset: h.offset,
            });
        }
        for h in &other.halfspaces {
            hs.push(Halfspace {
                normal: Point::zeros(self.dim).concat(&h.normal),
                offset: h.offset,
            });
        }
        Polyhedron { dim: n, halfspaces: hs }
    }

    /// {x : x + t ∈ self}
    pub fn translate(&self, t: &Point) -> Polyhedron {
        Polyhedron {
            dim: self.dim,
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| Halfspace {
                    normal: h.normal.clone(),
                    offset: h.offset + h.normal.dot(t),
                })
                .collect(),
        }
    }

    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        x.dim() == self.dim && self.halfspaces.iter().all(|h| h.slack(x) >= -tol)
    }

    /// Indices of the halfspaces tight at `x`.
    pub fn active_set(&self, x: &Point, tol: f64) -> Vec<usize> {
        self.halfspaces
            .iter()
            .enumerate()
            .filter(|(_, h)| h.slack(x).abs() <= tol)
            .map(|(i, _)| i)
            .collect()
    }

    pub(crate) fn push_rows(&self, lp: &mut Lp, offset: usize, width: usize) {
        for h in &self.halfspaces {
            let mut row = vec![0.0; width];
            row[offset..offset + self.dim].copy_from_slice(h.normal.coords());
            lp.row(row, Rel::Le, h.offset);
        }
    }

    pub(crate) fn le_rows(&self, offset: usize, width: usize) -> Vec<(Vec<f64>, f64)> {
        self.halfspaces
            .iter()
            .map(|h| {
                let mut row = vec![0.0; width];
                row[offset..offset + self.dim].copy_from_slice(h.normal.coords());
                (row, h.offset)
            })
            .collect()
    }

    /// Some point of the polyhedron, or `None` if it is empty.
    pub fn feasible_point(&self) -> Result<Option<Point>> {
        let mut lp = Lp::new(self.dim);
        self.push_rows(&mut lp, 0, self.dim);
        Ok(lp.feasible_point()?.map(Point::new))
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.feasible_point()?.is_none())
    }

    /// Largest r such that a max-norm box of radius r around some point fits inside.
    pub fn has_interior(&self) -> Result<bool> {
        let n = self.dim;
        let mut lp = Lp::new(n + 1);
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        lp.set_objective(&c);
        lp.bound(n, 0.0, 1.0);
        for h in &self.halfspaces {
            let mut row = h.normal.coords().to_vec();
            row.push(NormChoice::Sum.of(h.normal.coords()));
            lp.row(row, Rel::Le, h.offset);
        }
        Ok(match lp.maximize()? {
            LpOutcome::Optimal { value, .. } => value > 1e-9,
            _ => false,
        })
    }

    /// Smallest t ≥ 0 with x + t u ∈ P, or +∞.
    pub fn ray_hit(&self, x: &Point, u: &Point, tol: f64) -> Result<f64> {
        check_dim(self.dim, x.dim())?;
        check_dim(self.dim, u.dim())?;
        let mut lo = 0.0f64;
        let mut hi = f64::INFINITY;
        for h in &self.halfspaces {
            let au = h.normal.dot(u);
            let s = h.slack(x);
            if au.abs() <= 1e-14 {
                if s < -tol {
                    return Ok(f64::INFINITY);
                }
                continue;
            }
            let t = s / au;
            if au > 0.0 {
                hi = hi.min(t);
            } else {
                lo = lo.max(t);
            }
        }
        // feasibility of the interval, measured in constraint slack
        if lo <= hi {
            return Ok(lo);
        }
        let x_lo = x.axpy(lo, u);
        if self.contains(&x_lo, tol) {
            Ok(lo)
        } else {
            Ok(f64::INFINITY)
        }
    }

    /// Distance from `y` in the given norm (exact LP for max/sum, SOCP + polish for euclidean).
    pub fn distance(&self, y: &Point, norm: NormChoice) -> Result<f64> {
        Ok(self.project(y, norm)?.1)
    }

    /// A nearest point and the distance.
    pub fn project(&self, y: &Point, norm: NormChoice) -> Result<(Point, f64)> {
        check_dim(self.dim, y.dim())?;
        if self.contains(y, 0.0) {
            return Ok((y.clone(), 0.0));
        }
        let n = self.dim;
        let m: Vec<Vec<f64>> = (0..n).map(|i| Point::unit(n, i).into_coords()).collect();
        let le = self.le_rows(0, n);
        let prob = NormMin {
            n,
            m: &m,
            q: y.coords(),
            eq: &[],
            le: &le,
        };
        match prob.solve(norm)? {
            Some((z, v)) => Ok((Point::new(z), v)),
            None => Err(Error::EmptySet("polyhedron".into())),
        }
    }

    /// Vertex/ray enumeration by double description on the homogenized cone.
    pub fn vrep(&self) -> VRep {
        let n = self.dim;
        let mut rows: Vec<Vec<f64>> = self
            .halfspaces
            .iter()
            .map(|h| {
                let mut r: Vec<f64> = h.normal.coords().iter().map(|v| -v).collect();
                r.push(h.offset);
                r
            })
            .collect();
        let mut t = vec![0.0; n + 1];
        t[n] = 1.0;
        rows.push(t);
        let g = h_to_v(&rows, n + 1);
        let mut out = VRep::default();
        for r in g.rays {
            let tv = r[n];
            if tv > 1e-12 {
                out.points
                    .push(Point::new(r[..n].iter().map(|v| v / tv).collect()));
            } else {
                let mut d = r[..n].to_vec();
                if max_normalize(&mut d) {
                    out.rays.push(Point::new(d));
                }
            }
        }
        for l in g.lineality {
            let mut d = l[..n].to_vec();
            if max_normalize(&mut d) {
                out.lineality.push(Point::new(d));
            }
        }
        out.points.sort_by(|a, b| a.lex_cmp(b));
        out
    }

    /// Vertices of a bounded polyhedron.
    pub fn vertices(&self) -> Result<Vec<Point>> {
        let v = self.vrep();
        if !v.is_bounded() {
            return Err(Error::invalid("polyhedron is unbounded"));
        }
        Ok(v.points)
    }

    /// Max of ⟨c, x⟩ over P; `None` when empty, +∞ when unbounded.
    pub fn support(&self, c: &Point) -> Result<Option<f64>> {
        let mut lp = Lp::new(self.dim);
        lp.set_objective(c.coords());
        self.push_rows(&mut lp, 0, self.dim);
        Ok(match lp.maximize()? {
            LpOutcome::Optimal { value, .. } => Some(value),
            LpOutcome::Unbounded => Some(f64::INFINITY),
            LpOutcome::Infeasible => None,
        })
    }

    /// Does P meet the closed ball B̄(c, r)?
    pub fn meets_ball(&self, c: &Point, r: f64, norm: NormChoice) -> Result<bool> {
        if self.contains(c, TAU) {
            return Ok(true);
        }
        if self.is_empty()? {
            return Ok(false);
        }
        Ok(self.distance(c, norm)? <= r + TAU)
    }

    /// Checks an explicit point list is inside P.
    pub fn contains_all(&self, pts: &[Point], tol: f64) -> bool {
        pts.iter().all(|p| self.contains(p, tol))
    }
}
