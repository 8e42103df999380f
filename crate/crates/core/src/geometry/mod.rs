//! Points, norms, convex polyhedra and polyhedral cones.

mod cone;
pub(crate) mod dd;
mod polyhedron;

pub use cone::{PolyCone, DD_MAX_DIM};
pub use polyhedron::{Halfspace, Polyhedron, VRep};

use crate::error::{check_dim, Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

/// Default absolute membership tolerance.
pub const TAU: f64 = 1e-9;
/// Unit-norm tolerance for directions.
pub const TAU_UNIT: f64 = 1e-12;

/// A dense vector of ℝⁿ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Point(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self, norm: NormChoice) -> f64 {
        norm.of(&self.0)
    }

    pub fn norm2(&self) -> f64 {
        NormChoice::Euclidean.of(&self.0)
    }

    pub fn dist(&self, other: &Point, norm: NormChoice) -> f64 {
        (self - other).norm(norm)
    }

    pub fn scale(&self, s: f64) -> Point {
        Point(self.0.iter().map(|v| v * s).collect())
    }

    /// `self + s * other`
    pub fn axpy(&self, s: f64, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.0.iter().all(|v| v.abs() <= tol)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Coordinates of the product point (self, other).
    pub fn concat(&self, other: &Point) -> Point {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Point(v)
    }

    pub fn split(&self, at: usize) -> (Point, Point) {
        (Point(self.0[..at].to_vec()), Point(self.0[at..].to_vec()))
    }

    /// Lexicographic order with `f64::total_cmp` per coordinate.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.0.len().cmp(&other.0.len())
    }

    pub fn approx_eq(&self, other: &Point, tol: f64) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| (a - b).abs() <= tol)
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        check_dim(dim, self.dim())
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Self {
        Point(v.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point(v.to_vec())
    }
}

impl Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Point {
    type Output = Point;
    fn add(self, rhs: &Point) -> Point {
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Point {
    type Output = Point;
    fn sub(self, rhs: &Point) -> Point {
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        &self + &rhs
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        &self - &rhs
    }
}

impl Mul<f64> for &Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        self.scale(s)
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        self.scale(-1.0)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Which norm a space carries. Dual norms follow the usual pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NormChoice {
    #[default]
    Euclidean,
    Max,
    Sum,
}

impl NormChoice {
    pub fn of(self, v: &[f64]) -> f64 {
        match self {
            NormChoice::Euclidean => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormChoice::Max => v.iter().fold(0.0f64, |a, x| a.max(x.abs())),
            NormChoice::Sum => v.iter().map(|x| x.abs()).sum(),
        }
    }

    pub fn dual(self) -> NormChoice {
        match self {
            NormChoice::Euclidean => NormChoice::Euclidean,
            NormChoice::Max => NormChoice::Sum,
            NormChoice::Sum => NormChoice::Max,
        }
    }

    /// The closed ball as a polyhedron; `None` for the euclidean norm.
    pub fn ball(self, center: &Point, radius: f64) -> Option<Polyhedron> {
        match self {
            NormChoice::Euclidean => None,
            NormChoice::Max => Some(Polyhedron::cube(center, radius)),
            NormChoice::Sum => Some(Polyhedron::cross_polytope(center, radius)),
        }
    }
}

/// A point of the unit sphere of a chosen norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Point", into = "Point")]
pub struct Direction(Point);

impl Direction {
    /// Accepts `p` only if its euclidean norm is one within [`TAU_UNIT`].
    pub fn new(p: Point) -> Result<Self> {
        Self::new_in(p, NormChoice::Euclidean)
    }

    pub fn new_in(p: Point, norm: NormChoice) -> Result<Self> {
        let n = p.norm(norm);
        if (n - 1.0).abs() > TAU_UNIT {
            return Err(Error::invalid(format!("direction {p} has norm {n}, expected 1")));
        }
        Ok(Direction(p))
    }

    /// Rescales a nonzero vector onto the unit sphere of `norm`.
    pub fn normalize(p: &Point, norm: NormChoice) -> Result<Self> {
        let n = p.norm(norm);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid("cannot normalize the zero vector"));
        }
        Ok(Direction(p.scale(1.0 / n)))
    }

    pub fn point(&self) -> &Point {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

impl std::ops::Deref for Direction {
    type Target = Point;
    fn deref(&self) -> &Point {
        &self.0
    }
}

impl TryFrom<Point> for Direction {
    type Error = Error;
    fn try_from(p: Point) -> Result<Self> {
        // Serialized directions may carry any of the supported norms.
        for norm in [NormChoice::Euclidean, NormChoice::Max, NormChoice::Sum] {
            if (p.norm(norm) - 1.0).abs() <= TAU_UNIT {
                return Ok(Direction(p));
            }
        }
        Err(Error::invalid(format!("direction {p} is not a unit vector")))
    }
}

impl From<Direction> for Point {
    fn from(d: Direction) -> Point {
        d.0
    }
}

/// Minimum distance from `y` to a finite set.
pub fn distance_to_points(y: &Point, set: &[Point], norm: NormChoice) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet("finite point set".into()));
    }
    let mut best = f64::INFINITY;
    for s in set {
        s.check_dim(y.dim())?;
        best = best.min(y.dist(s, norm));
    }
    Ok(best)
}
