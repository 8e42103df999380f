//! Gerstewitz scalarization, its cone-field extension and the minimal-time function.

use crate::error::{check_dim, Error, Result};
use crate::geometry::{Point, PolyCone, Polyhedron, TAU};
use crate::graph::GraphMap;
use crate::vds::ConeField;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

/// ℝ ∪ {±∞}, with inf ∅ = +∞.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn from_f64(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtReal::PosInf
        } else if v == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(v)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self.to_f64() <= other.to_f64() {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "+inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::PosInf => s.serialize_str("+inf"),
            ExtReal::NegInf => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ExtReal::Finite(v)),
            Raw::Str(s) => match s.as_str() {
                "+inf" | "inf" => Ok(ExtReal::PosInf),
                "-inf" => Ok(ExtReal::NegInf),
                other => Err(serde::de::Error::custom(format!("not an extended real: {other}"))),
            },
        }
    }
}

/// The set R in s_{k,R}.
#[derive(Clone, Copy, Debug)]
pub enum RSet<'a> {
    Cone(&'a PolyCone),
    Polyhedron(&'a Polyhedron),
}

/// Bisection settings for the generic path.
#[derive(Clone, Copy, Debug)]
pub struct Bisection {
    pub tol: f64,
    pub max_iter: usize,
    pub t_max: f64,
    /// Membership tolerance.
    pub tau: f64,
}

impl Default for Bisection {
    fn default() -> Self {
        Bisection {
            tol: 1e-10,
            max_iter: 200,
            t_max: 1e6,
            tau: TAU,
        }
    }
}

fn member(r: RSet<'_>, v: &Point, tau: f64) -> bool {
    match r {
        RSet::Cone(c) => c.contains_fast(v, tau),
        RSet::Polyhedron(p) => p.contains(v, tau),
    }
}

/// k ∈ 0⁺R.
pub fn recession_holds(r: RSet<'_>, k: &Point) -> bool {
    match r {
        RSet::Cone(c) => c.contains_fast(k, TAU),
        RSet::Polyhedron(p) => p.halfspaces.iter().all(|h| h.normal.dot(k) <= TAU),
    }
}

fn dim_of(r: RSet<'_>) -> usize {
    match r {
        RSet::Cone(c) => c.dim(),
        RSet::Polyhedron(p) => p.dim,
    }
}

/// s_{k,R}(y) = inf{t : y ∈ t k − R}.
///
/// Cones with ⟨d,k⟩ ≥ 0 for all dual generators and > 0 for some use the
/// closed form max ⟨d,y⟩/⟨d,k⟩; everything else goes through bisection.
pub fn gerstewitz(k: &Point, r: RSet<'_>, y: &Point) -> Result<ExtReal> {
    check_dim(dim_of(r), k.dim())?;
    check_dim(dim_of(r), y.dim())?;
    if let RSet::Cone(c) = r {
        if let Some(v) = gerstewitz_closed_form(k, c, y, TAU) {
            return Ok(v);
        }
    }
    gerstewitz_bisect(k, r, y, Bisection::default())
}

/// Closed form for cones; `None` when its precondition fails.
pub fn gerstewitz_closed_form(k: &Point, c: &PolyCone, y: &Point, tau: f64) -> Option<ExtReal> {
    let mut best = f64::NEG_INFINITY;
    let mut any_pos = false;
    let mut blocked = false;
    for d in c.dual_gens() {
        let dk = d.dot(k);
        let dy = d.dot(y);
        if dk < -1e-14 {
            return None;
        }
        if dk <= 1e-14 {
            if dy > tau {
                blocked = true;
            }
            continue;
        }
        any_pos = true;
        best = best.max(dy / dk);
    }
    if !any_pos {
        return None;
    }
    Some(if blocked {
        ExtReal::PosInf
    } else {
        ExtReal::Finite(best)
    })
}

/// Bracket doubling from [−1, 1] up to `t_max`, then bisection on membership.
pub fn gerstewitz_bisect(k: &Point, r: RSet<'_>, y: &Point, cfg: Bisection) -> Result<ExtReal> {
    check_dim(dim_of(r), k.dim())?;
    check_dim(dim_of(r), y.dim())?;
    let feasible = |t: f64| member(r, &(&k.scale(t) - y), cfg.tau);
    let mut t = 1.0;
    let (mut lo, mut hi);
    loop {
        if feasible(-t) {
            if t >= cfg.t_max {
                return Ok(ExtReal::NegInf);
            }
            let next = (2.0 * t).min(cfg.t_max);
            if !feasible(-next) {
                lo = -next;
                hi = -t;
                break;
            }
            t = next;
            continue;
        }
        if feasible(t) {
            lo = -t;
            hi = t;
            // tighten with the previous bracket level
            if t > 1.0 && !feasible(t / 2.0) {
                lo = t / 2.0;
            }
            break;
        }
        if t >= cfg.t_max {
            return if recession_holds(r, k) {
                Ok(ExtReal::PosInf)
            } else {
                Err(Error::BracketExhausted)
            };
        }
        t = (2.0 * t).min(cfg.t_max);
    }
    for _ in 0..cfg.max_iter {
        if hi - lo <= cfg.tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ExtReal::Finite(hi))
}

/// Single-valued objectives that can be evaluated pointwise.
pub trait SingleValued {
    fn value_at(&self, x: &Point) -> Result<Point>;
}

impl SingleValued for GraphMap {
    fn value_at(&self, x: &Point) -> Result<Point> {
        self.eval(x)
    }
}

impl SingleValued for crate::graph::PaMap {
    fn value_at(&self, x: &Point) -> Result<Point> {
        self.eval(x)
    }
}

/// s^f_{k,a−K}(x) = inf{t : f(x) ∈ a + t k − K(x)}.
pub fn s_vds(
    f: &impl SingleValued,
    field: &ConeField,
    a: &Point,
    k: &Point,
    x: &Point,
) -> Result<ExtReal> {
    let fx = f.value_at(x)?;
    let cone = field.cone_at(x)?;
    gerstewitz(k, RSet::Cone(cone), &(&fx - a))
}

/// Target of the minimal-time function.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    Points(&'a [Point]),
    Polyhedron(&'a Polyhedron),
}

/// Parallelism tolerance for finite targets.
pub const PARALLEL_TOL: f64 = 1e-9;

/// T_u(x, A) = inf{t ≥ 0 : x + t u ∈ A}.
pub fn t_min(u: &Point, x: &Point, a: Target<'_>) -> Result<ExtReal> {
    check_dim(u.dim(), x.dim())?;
    match a {
        Target::Points(pts) => {
            if pts.is_empty() {
                return Err(Error::EmptySet("minimal-time target".into()));
            }
            let uu = u.dot(u);
            let mut best = f64::INFINITY;
            for p in pts {
                check_dim(x.dim(), p.dim())?;
                let w = p - x;
                let t = w.dot(u) / uu;
                if t < -PARALLEL_TOL {
                    continue;
                }
                if w.axpy(-t, u).norm2() <= PARALLEL_TOL {
                    best = best.min(t.max(0.0));
                }
            }
            Ok(ExtReal::from_f64(best))
        }
        Target::Polyhedron(p) => {
            if p.is_empty()? {
                return Err(Error::EmptySet("minimal-time target".into()));
            }
            Ok(ExtReal::from_f64(p.ray_hit(x, u, TAU)?))
        }
    }
}
