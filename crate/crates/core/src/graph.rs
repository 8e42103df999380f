//! Set-valued maps given by finite graphs, polyhedral graphs or piecewise-affine data.

use crate::error::{check_dim, Error, Result};
use crate::geometry::{Halfspace, Point, Polyhedron, TAU};
use crate::numeric::{Lp, LpOutcome};
use serde::{Deserialize, Serialize};

/// Finitely many x, each with a finite nonempty value set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteGraph {
    pub x_dim: usize,
    pub y_dim: usize,
    pub entries: Vec<FiniteEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteEntry {
    pub x: Point,
    pub values: Vec<Point>,
}

/// Gr F as a finite union of convex polyhedra in X × Y.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyGraph {
    pub x_dim: usize,
    pub y_dim: usize,
    pub pieces: Vec<Polyhedron>,
}

/// y = A x + b on a polyhedral region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffinePiece {
    pub region: Polyhedron,
    /// Row-major, `y_dim` rows of length `x_dim`.
    pub matrix: Vec<Vec<f64>>,
    pub offset: Point,
}

impl AffinePiece {
    pub fn eval(&self, x: &Point) -> Point {
        Point::new(
            self.matrix
                .iter()
                .zip(self.offset.coords())
                .map(|(row, b)| row.iter().zip(x.coords()).map(|(a, v)| a * v).sum::<f64>() + b)
                .collect(),
        )
    }

    /// Jacobian row i as a point of X*.
    pub fn gradient(&self, i: usize) -> Point {
        Point::new(self.matrix[i].clone())
    }

    /// Aᵀ y*
    pub fn adjoint(&self, y_star: &Point) -> Point {
        let n = self.region.dim;
        let mut out = vec![0.0; n];
        for (row, w) in self.matrix.iter().zip(y_star.coords()) {
            for j in 0..n {
                out[j] += row[j] * w;
            }
        }
        Point::new(out)
    }

    fn graph_piece(&self, y_dim: usize) -> Polyhedron {
        let x_dim = self.region.dim;
        let mut g = self.region.product(&Polyhedron::whole(y_dim));
        for (i, row) in self.matrix.iter().enumerate() {
            // y_i − row·x = b_i as two inequalities
            let mut a: Vec<f64> = row.iter().map(|v| -v).collect();
            a.extend((0..y_dim).map(|j| if j == i { 1.0 } else { 0.0 }));
            let a = Point::new(a);
            g.halfspaces.push(Halfspace {
                normal: a.clone(),
                offset: self.offset[i],
            });
            g.halfspaces.push(Halfspace {
                normal: a.scale(-1.0),
                offset: -self.offset[i],
            });
        }
        debug_assert_eq!(g.dim, x_dim + y_dim);
        g
    }
}

/// Single-valued piecewise-affine map; pieces must agree where regions meet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaMap {
    pub x_dim: usize,
    pub y_dim: usize,
    pub pieces: Vec<AffinePiece>,
}

impl PaMap {
    pub fn new(x_dim: usize, y_dim: usize, pieces: Vec<AffinePiece>) -> Result<Self> {
        for p in &pieces {
            check_dim(x_dim, p.region.dim)?;
            check_dim(y_dim, p.offset.dim())?;
            check_dim(y_dim, p.matrix.len())?;
            for r in &p.matrix {
                check_dim(x_dim, r.len())?;
            }
        }
        let map = PaMap { x_dim, y_dim, pieces };
        map.check_consistency()?;
        Ok(map)
    }

    /// f(x) = A x + b everywhere.
    pub fn affine(matrix: Vec<Vec<f64>>, offset: Point) -> Result<Self> {
        let y_dim = offset.dim();
        let x_dim = matrix.first().map(|r| r.len()).unwrap_or(0);
        Self::new(
            x_dim,
            y_dim,
            vec![AffinePiece {
                region: Polyhedron::whole(x_dim),
                matrix,
                offset,
            }],
        )
    }

    fn check_consistency(&self) -> Result<()> {
        for i in 0..self.pieces.len() {
            for j in i + 1..self.pieces.len() {
                let (p, q) = (&self.pieces[i], &self.pieces[j]);
                let meet = p.region.intersect(&q.region)?;
                for r in 0..self.y_dim {
                    let c: Vec<f64> = p.matrix[r]
                        .iter()
                        .zip(&q.matrix[r])
                        .map(|(a, b)| a - b)
                        .collect();
                    let b = p.offset[r] - q.offset[r];
                    for sign in [1.0, -1.0] {
                        let mut lp = Lp::new(self.x_dim);
                        let cs: Vec<f64> = c.iter().map(|v| sign * v).collect();
                        lp.set_objective(&cs);
                        meet.push_rows(&mut lp, 0, self.x_dim);
                        match lp.maximize()? {
                            LpOutcome::Infeasible => break,
                            LpOutcome::Unbounded => {
                                return Err(Error::invalid(format!(
                                    "affine pieces {i} and {j} disagree on their common region"
                                )))
                            }
                            LpOutcome::Optimal { value, .. } => {
                                if value + sign * b > 1e-9 {
                                    return Err(Error::invalid(format!(
                                        "affine pieces {i} and {j} disagree on their common region"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn pieces_at(&self, x: &Point, tol: f64) -> Vec<usize> {
        self.pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| p.region.contains(x, tol))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn eval(&self, x: &Point) -> Result<Point> {
        check_dim(self.x_dim, x.dim())?;
        self.pieces
            .iter()
            .find(|p| p.region.contains(x, TAU))
            .map(|p| p.eval(x))
            .ok_or_else(|| Error::invalid(format!("{x} outside the domain of the map")))
    }

    pub fn to_poly_graph(&self) -> PolyGraph {
        PolyGraph {
            x_dim: self.x_dim,
            y_dim: self.y_dim,
            pieces: self.pieces.iter().map(|p| p.graph_piece(self.y_dim)).collect(),
        }
    }
}

impl FiniteGraph {
    pub fn new(x_dim: usize, y_dim: usize, entries: Vec<FiniteEntry>) -> Result<Self> {
        for e in &entries {
            check_dim(x_dim, e.x.dim())?;
            if e.values.is_empty() {
                return Err(Error::invalid(format!("empty value set at {}", e.x)));
            }
            for v in &e.values {
                check_dim(y_dim, v.dim())?;
            }
        }
        Ok(FiniteGraph { x_dim, y_dim, entries })
    }

    /// Tabulates a single-valued function on a grid.
    pub fn tabulate(grid: &[Point], y_dim: usize, f: impl Fn(&Point) -> Point) -> Result<Self> {
        let x_dim = grid.first().map(|p| p.dim()).unwrap_or(0);
        let entries = grid
            .iter()
            .map(|x| FiniteEntry {
                x: x.clone(),
                values: vec![f(x)],
            })
            .collect();
        Self::new(x_dim, y_dim, entries)
    }

    pub fn values(&self, x: &Point) -> Option<&[Point]> {
        self.entries
            .iter()
            .find(|e| e.x.approx_eq(x, 1e-12))
            .map(|e| e.values.as_slice())
    }

    pub fn is_single_valued(&self) -> bool {
        self.entries.iter().all(|e| e.values.len() == 1)
    }

    pub fn graph_size(&self) -> usize {
        self.entries.iter().map(|e| e.values.len()).sum()
    }

    pub fn to_poly_graph(&self) -> PolyGraph {
        let pieces = self
            .entries
            .iter()
            .flat_map(|e| e.values.iter().map(move |v| Polyhedron::singleton(&e.x.concat(v))))
            .collect();
        PolyGraph {
            x_dim: self.x_dim,
            y_dim: self.y_dim,
            pieces,
        }
    }
}

impl PolyGraph {
    pub fn new(x_dim: usize, y_dim: usize, pieces: Vec<Polyhedron>) -> Result<Self> {
        for p in &pieces {
            check_dim(x_dim + y_dim, p.dim)?;
        }
        Ok(PolyGraph { x_dim, y_dim, pieces })
    }

    pub fn dim(&self) -> usize {
        self.x_dim + self.y_dim
    }

    pub fn contains(&self, x: &Point, y: &Point, tol: f64) -> bool {
        let p = x.concat(y);
        self.pieces.iter().any(|q| q.contains(&p, tol))
    }

    pub fn pieces_at(&self, x: &Point, y: &Point, tol: f64) -> Vec<usize> {
        let p = x.concat(y);
        self.pieces
            .iter()
            .enumerate()
            .filter(|(_, q)| q.contains(&p, tol))
            .map(|(i, _)| i)
            .collect()
    }

    /// The graph of the inverse map.
    pub fn inverse(&self) -> PolyGraph {
        let (n, m) = (self.x_dim, self.y_dim);
        let pieces = self
            .pieces
            .iter()
            .map(|p| Polyhedron {
                dim: n + m,
                halfspaces: p
                    .halfspaces
                    .iter()
                    .map(|h| {
                        let (a, b) = h.normal.split(n);
                        Halfspace {
                            normal: b.concat(&a),
                            offset: h.offset,
                        }
                    })
                    .collect(),
            })
            .collect();
        PolyGraph {
            x_dim: m,
            y_dim: n,
            pieces,
        }
    }
}

/// A set-valued map F: X ⇉ Y.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphMap {
    FiniteGraph(FiniteGraph),
    /// A finite graph whose value sets are singletons.
    SingleValued(FiniteGraph),
    PolyGraph(PolyGraph),
    PiecewiseAffine(PaMap),
}

impl GraphMap {
    pub fn x_dim(&self) -> usize {
        match self {
            GraphMap::FiniteGraph(g) | GraphMap::SingleValued(g) => g.x_dim,
            GraphMap::PolyGraph(g) => g.x_dim,
            GraphMap::PiecewiseAffine(g) => g.x_dim,
        }
    }

    pub fn y_dim(&self) -> usize {
        match self {
            GraphMap::FiniteGraph(g) | GraphMap::SingleValued(g) => g.y_dim,
            GraphMap::PolyGraph(g) => g.y_dim,
            GraphMap::PiecewiseAffine(g) => g.y_dim,
        }
    }

    pub fn to_poly_graph(&self) -> PolyGraph {
        match self {
            GraphMap::FiniteGraph(g) | GraphMap::SingleValued(g) => g.to_poly_graph(),
            GraphMap::PolyGraph(g) => g.clone(),
            GraphMap::PiecewiseAffine(g) => g.to_poly_graph(),
        }
    }

    pub fn graph_contains(&self, x: &Point, y: &Point, tol: f64) -> bool {
        match self {
            GraphMap::FiniteGraph(g) | GraphMap::SingleValued(g) => g
                .values(x)
                .is_some_and(|vs| vs.iter().any(|v| v.approx_eq(y, tol))),
            GraphMap::PolyGraph(g) => g.contains(x, y, tol),
            GraphMap::PiecewiseAffine(g) => g
                .pieces_at(x, tol)
                .iter()
                .any(|&i| g.pieces[i].eval(x).approx_eq(y, tol.max(1e-12))),
        }
    }

    /// f(x) for single-valued maps.
    pub fn eval(&self, x: &Point) -> Result<Point> {
        match self {
            GraphMap::FiniteGraph(g) | GraphMap::SingleValued(g) => match g.values(x) {
                Some([v]) => Ok(v.clone()),
                Some(_) => Err(Error::invalid("map is not single-valued")),
                None => Err(Error::invalid(format!("{x} outside the domain of the map"))),
            },
            GraphMap::PiecewiseAffine(g) => g.eval(x),
            GraphMap::PolyGraph(_) => Err(Error::invalid("polyhedral graph has no pointwise evaluation")),
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteGraph> {
        match self {
            GraphMap::FiniteGraph(g) | GraphMap::SingleValued(g) => Some(g),
            _ => None,
        }
    }

    /// Re-runs the constructor checks (used after deserialization).
    pub fn validate(&self) -> Result<()> {
        match self {
            GraphMap::FiniteGraph(g) => FiniteGraph::new(g.x_dim, g.y_dim, g.entries.clone()).map(|_| ()),
            GraphMap::SingleValued(g) => {
                FiniteGraph::new(g.x_dim, g.y_dim, g.entries.clone())?;
                if !g.is_single_valued() {
                    return Err(Error::invalid("single_valued map lists several values at one point"));
                }
                Ok(())
            }
            GraphMap::PolyGraph(g) => PolyGraph::new(g.x_dim, g.y_dim, g.pieces.clone()).map(|_| ()),
            GraphMap::PiecewiseAffine(g) => PaMap::new(g.x_dim, g.y_dim, g.pieces.clone()).map(|_| ()),
        }
    }
}
