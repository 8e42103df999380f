//! Seeded generators and small oracles shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vdsopt::geometry::{Direction, Halfspace, NormChoice, Point, PolyCone, Polyhedron};
use vdsopt::graph::{AffinePiece, GraphMap, PaMap};
use vdsopt::solutions::{Candidate, Instance, Omega, Tolerances, VdsKind};
use vdsopt::vds::{interiority, ConeField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A multiple of 0.25 in [lo, hi].
pub fn quarter(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let (a, b) = ((lo * 4.0).ceil() as i64, (hi * 4.0).floor() as i64);
    rng.gen_range(a..=b) as f64 * 0.25
}

pub fn lattice_point(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> Point {
    Point::new((0..dim).map(|_| quarter(rng, -r, r)).collect())
}

pub fn uniform_point(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> Point {
    Point::new((0..dim).map(|_| rng.gen_range(-r..r)).collect())
}

/// A nonzero integer vector with entries in [−2, 2].
pub fn int_direction(rng: &mut ChaCha8Rng, dim: usize) -> Point {
    loop {
        let u = Point::new((0..dim).map(|_| rng.gen_range(-2..=2) as f64).collect());
        if !u.is_zero(0.0) {
            return u;
        }
    }
}

/// A pointed full-dimensional cone with `dim` to `dim + 2` generators
/// clustered around a random axis, and a unit k strictly inside it.
pub fn pointed_cone(rng: &mut ChaCha8Rng, dim: usize) -> (PolyCone, Point) {
    loop {
        let axis = uniform_point(rng, dim, 1.0);
        if axis.norm2() < 0.3 {
            continue;
        }
        let axis = axis.scale(1.0 / axis.norm2());
        let spread = rng.gen_range(0.2..0.9) / (dim as f64).sqrt();
        let count = rng.gen_range(dim..=dim + 2);
        let gens: Vec<Point> = (0..count).map(|_| axis.axpy(spread, &uniform_point(rng, dim, 1.0))).collect();
        let Ok(cone) = PolyCone::from_generators(dim, gens.clone()) else { continue };
        if !cone.is_pointed() || !cone.is_full_dimensional() {
            continue;
        }
        let sum = gens.iter().fold(Point::zeros(dim), |acc, g| &acc + g);
        let k = sum.scale(1.0 / sum.norm2());
        if interiority(&k, &cone).map(|i| i.holds && i.margin > 1e-3).unwrap_or(false) {
            return (cone, k);
        }
    }
}

/// A bounded polytope containing a ball of radius ≥ 0.3 around a random center.
pub fn polytope(rng: &mut ChaCha8Rng, dim: usize) -> (Polyhedron, Point) {
    let center = uniform_point(rng, dim, 1.0);
    let mut hs = Vec::new();
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let n = Point::unit(dim, i).scale(s);
            hs.push(Halfspace::new(n.clone(), n.dot(&center) + rng.gen_range(0.5..2.0)));
        }
    }
    for _ in 0..rng.gen_range(1..=4) {
        let n = uniform_point(rng, dim, 1.0);
        if n.norm2() < 0.2 {
            continue;
        }
        let n = n.scale(1.0 / n.norm2());
        hs.push(Halfspace::new(n.clone(), n.dot(&center) + rng.gen_range(0.3..1.5)));
    }
    (Polyhedron::new(dim, hs).expect("polytope"), center)
}

/// Euclidean distance from x to a finite set.
pub fn dist_to_set(x: &Point, set: &[Point]) -> f64 {
    set.iter().map(|a| (a - x).norm2()).fold(f64::INFINITY, f64::min)
}

/// Smallest s ≥ 0 with a − x = s u over a ∈ A, by coordinatewise ratios.
pub fn ray_oracle(u: &Point, x: &Point, set: &[Point]) -> f64 {
    let i = (0..u.dim()).max_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs())).expect("dim ≥ 1");
    let mut best = f64::INFINITY;
    for a in set {
        let s = (a[i] - x[i]) / u[i];
        if s < 0.0 {
            continue;
        }
        if (0..u.dim()).all(|j| (a[j] - x[j] - s * u[j]).abs() <= 1e-12) {
            best = best.min(s);
        }
    }
    best
}

/// {s : x + s u ∈ P} as an interval, from the halfspace rows.
pub fn ray_interval(p: &Polyhedron, x: &Point, u: &Point) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for h in &p.halfspaces {
        let au = h.normal.dot(u);
        let slack = h.offset - h.normal.dot(x);
        if au > 1e-15 {
            hi = hi.min(slack / au);
        } else if au < -1e-15 {
            lo = lo.max(slack / au);
        } else if slack < -1e-12 {
            return (1.0, 0.0);
        }
    }
    (lo, hi)
}

/// T_u(x, P) from [`ray_interval`].
pub fn t_min_oracle(p: &Polyhedron, x: &Point, u: &Point) -> f64 {
    let (lo, hi) = ray_interval(p, x, u);
    let t = lo.max(0.0);
    if t <= hi + 1e-12 {
        t
    } else {
        f64::INFINITY
    }
}

/// Continuous two-piece map on ℝ split at x = 0 into ℝ², as slopes and an offset.
pub fn kinked_map(left: [f64; 2], right: [f64; 2], offset: [f64; 2]) -> PaMap {
    let l = Polyhedron::new(1, vec![Halfspace::new(vec![1.0], 0.0)]).unwrap();
    let r = Polyhedron::new(1, vec![Halfspace::new(vec![-1.0], 0.0)]).unwrap();
    PaMap::new(
        1,
        2,
        vec![
            AffinePiece { region: l, matrix: vec![vec![left[0]], vec![left[1]]], offset: Point::from(offset) },
            AffinePiece { region: r, matrix: vec![vec![right[0]], vec![right[1]]], offset: Point::from(offset) },
        ],
    )
    .unwrap()
}

/// K-type instance on Ω = ℝⁿ with a constant cone and the given candidate.
pub fn pa_instance(map: PaMap, cone: PolyCone, k: Point, norm: NormChoice, xb: Point) -> Instance {
    let (n, m) = (map.x_dim, map.y_dim);
    let yb = map.eval(&xb).unwrap();
    Instance {
        x_dim: n,
        y_dim: m,
        norm,
        omega: Omega::whole(n),
        objective: GraphMap::PiecewiseAffine(map),
        vds_kind: VdsKind::K,
        cone_field: ConeField::constant(n, cone).unwrap(),
        k: Direction::normalize(&k, norm).unwrap(),
        epsilon: 1.0,
        delta: 0.1,
        tolerances: Tolerances::default(),
        candidate: Some(Candidate { x: xb, y: yb }),
        ball_coords: None,
    }
}
