//! The Gerstewitz functional, its variable-cone form along a piecewise
//! affine map and the minimal-time function.
//!
//! cargo run --example scalarization

use vdsopt::geometry::{Halfspace, Point, PolyCone, Polyhedron};
use vdsopt::graph::{AffinePiece, PaMap};
use vdsopt::nonsmooth::{convexity_wrt_map, scalarization_pa};
use vdsopt::scalarize::{gerstewitz, gerstewitz_bisect, s_vds, t_min, Bisection, RSet, Target};
use vdsopt::vds::ConeField;

fn main() -> vdsopt::Result<()> {
    let cone = PolyCone::orthant(2);
    let k = Point::from([1.0, 1.0]);
    for y in [Point::from([1.0, -2.0]), Point::from([-3.0, -1.0]), Point::from([0.5, 0.5])] {
        let closed = gerstewitz(&k, RSet::Cone(&cone), &y)?;
        let bisect = gerstewitz_bisect(&k, RSet::Cone(&cone), &y, Bisection::default())?;
        println!("s_k,C({y}) = {closed:?} (bisection {bisect:?})");
    }

    // f(x) = (|x|, −x) split at 0, K ≡ ℝ²₊
    let left = Polyhedron::new(1, vec![Halfspace::new(vec![1.0], 0.0)])?;
    let right = Polyhedron::new(1, vec![Halfspace::new(vec![-1.0], 0.0)])?;
    let f = PaMap::new(
        1,
        2,
        vec![
            AffinePiece { region: left, matrix: vec![vec![-1.0], vec![-1.0]], offset: Point::zeros(2) },
            AffinePiece { region: right, matrix: vec![vec![1.0], vec![-1.0]], offset: Point::zeros(2) },
        ],
    )?;
    let field = ConeField::constant(1, cone.clone())?;
    let a = f.eval(&Point::from([0.0]))?;
    println!("\nscalarization g(x) = s(f(x) − f(0)) along f:");
    for x in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let g = s_vds(&f, &field, &a, &k, &Point::from([x]))?;
        println!("  g({x:+.1}) = {g:?}");
    }
    let g = scalarization_pa(&f, &field, &a, &k)?;
    println!("g has {} affine pieces", g.pieces.len());
    let samples: Vec<Point> = (-8..=8).map(|i| Point::from([i as f64 / 4.0])).collect();
    let conv = convexity_wrt_map(&f, &cone, &samples, 500, 1)?;
    println!("f is ℝ²₊-convex on the samples: {} ({} triples)", conv.holds, conv.checked);

    let u = Point::from([1.0, 0.0]);
    let x = Point::zeros(2);
    let pts = [Point::from([2.0, 0.0]), Point::from([3.0, 0.0]), Point::from([1.0, 1.0])];
    println!("\nT_u(0, finite set) = {:?}", t_min(&u, &x, Target::Points(&pts))?);
    let square = Polyhedron::cube(&Point::from([4.0, 0.5]), 1.0);
    println!("T_u(0, square) = {:?}", t_min(&u, &x, Target::Polyhedron(&square))?);
    println!("T_−u(0, square) = {:?}", t_min(&u.scale(-1.0), &x, Target::Polyhedron(&square))?);
    Ok(())
}
