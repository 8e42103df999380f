//! Builds the worked instances, writes them as instance files and
//! reads them back; also shows a seeded generator round trip.
//!
//! cargo run --example instance_files -- [OUT_DIR]

use vdsopt::geometry::{Direction, NormChoice, Point, PolyCone, Polyhedron};
use vdsopt::graph::{FiniteGraph, GraphMap, PaMap};
use vdsopt::instances_io::{generate_file, load, save, Profile};
use vdsopt::solutions::{Candidate, Instance, Omega, Tolerances, VdsKind};
use vdsopt::vds::ConeField;

fn p1(v: f64) -> Point {
    Point::from([v])
}

/// F ≡ (0, 0) on {−1, 0, 1}, K ≡ ℝ²₊.
fn constant() -> Instance {
    let grid: Vec<Point> = [-1.0, 0.0, 1.0].iter().map(|v| p1(*v)).collect();
    let s = 0.5f64.sqrt();
    Instance {
        x_dim: 1,
        y_dim: 2,
        norm: NormChoice::Euclidean,
        omega: Omega::whole(1),
        objective: GraphMap::SingleValued(FiniteGraph::tabulate(&grid, 2, |_| Point::zeros(2)).unwrap()),
        vds_kind: VdsKind::K,
        cone_field: ConeField::constant(1, PolyCone::orthant(2)).unwrap(),
        k: Direction::new(Point::from([s, s])).unwrap(),
        epsilon: 1.0,
        delta: 0.1,
        tolerances: Tolerances::default(),
        candidate: Some(Candidate { x: p1(0.0), y: Point::zeros(2) }),
        ball_coords: None,
    }
}

/// f(x) = x on {0, 0.1, …, 1}, K ≡ ℝ₊, k = 1, δ = 0.3, ε = 1.
fn grid1d() -> Instance {
    let grid: Vec<Point> = (0..=10).map(|i| p1(i as f64 / 10.0)).collect();
    Instance {
        x_dim: 1,
        y_dim: 1,
        norm: NormChoice::Euclidean,
        omega: Omega { region: Polyhedron::whole(1), grid: Some(grid.clone()) },
        objective: GraphMap::SingleValued(FiniteGraph::tabulate(&grid, 1, |x| x.clone()).unwrap()),
        vds_kind: VdsKind::K,
        cone_field: ConeField::constant(1, PolyCone::orthant(1)).unwrap(),
        k: Direction::new(p1(1.0)).unwrap(),
        epsilon: 1.0,
        delta: 0.3,
        tolerances: Tolerances::default(),
        candidate: Some(Candidate { x: p1(0.3), y: p1(0.3) }),
        ball_coords: None,
    }
}

/// f(x) = x on Ω = [0, 1], K ≡ ℝ₊, k = 1, ε = 0.5, δ = 0.1.
fn line() -> Instance {
    Instance {
        x_dim: 1,
        y_dim: 1,
        norm: NormChoice::Euclidean,
        omega: Omega { region: Polyhedron::boxed(&p1(0.0), &p1(1.0)), grid: None },
        objective: GraphMap::PiecewiseAffine(PaMap::affine(vec![vec![1.0]], Point::zeros(1)).unwrap()),
        vds_kind: VdsKind::K,
        cone_field: ConeField::constant(1, PolyCone::orthant(1)).unwrap(),
        k: Direction::new(p1(1.0)).unwrap(),
        epsilon: 0.5,
        delta: 0.1,
        tolerances: Tolerances::default(),
        candidate: Some(Candidate { x: p1(0.0), y: p1(0.0) }),
        ball_coords: None,
    }
}

/// f(x) = x on Ω = ℝ², K ≡ ℝ²₊, k = (1, 1)/√2: the openness example.
fn identity() -> Instance {
    let s = 0.5f64.sqrt();
    Instance {
        x_dim: 2,
        y_dim: 2,
        norm: NormChoice::Euclidean,
        omega: Omega::whole(2),
        objective: GraphMap::PiecewiseAffine(PaMap::affine(vec![vec![1.0, 0.0], vec![0.0, 1.0]], Point::zeros(2)).unwrap()),
        vds_kind: VdsKind::K,
        cone_field: ConeField::constant(2, PolyCone::orthant(2)).unwrap(),
        k: Direction::new(Point::from([s, s])).unwrap(),
        epsilon: 1.0,
        delta: 0.1,
        tolerances: Tolerances::default(),
        candidate: Some(Candidate { x: Point::zeros(2), y: Point::zeros(2) }),
        ball_coords: None,
    }
}

/// The line instance with the cone attached to images: Q ≡ ℝ₊.
fn line_q() -> Instance {
    Instance { vds_kind: VdsKind::Q, ..line() }
}

fn main() -> vdsopt::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("vdsopt-instances"));
    std::fs::create_dir_all(&dir).map_err(|e| vdsopt::Error::Io(e.to_string()))?;
    for (name, inst) in [
        ("constant", constant()),
        ("grid1d", grid1d()),
        ("line", line()),
        ("line_q", line_q()),
        ("identity", identity()),
    ] {
        let path = dir.join(format!("{name}.json"));
        save(&inst, &path)?;
        let back = load(&path)?;
        assert_eq!(back, inst);
        println!("{name:<9} -> {} (x_dim {}, y_dim {}, round trip ok)", path.display(), back.x_dim, back.y_dim);
    }
    let a = generate_file(42, Profile::Grid2d)?;
    let b = generate_file(42, Profile::Grid2d)?;
    println!("grid2d seed 42: {} bytes, byte-identical regeneration: {}", a.len(), a == b);
    Ok(())
}
