//! Fréchet and limiting normal cones of polyhedral unions, coderivatives,
//! the Aubin criterion and the subdifferential of the minimal-time function.
//!
//! cargo run --example normal_cones

use vdsopt::geometry::{Halfspace, Point, Polyhedron};
use vdsopt::graph::PolyGraph;
use vdsopt::nonsmooth::{aubin_check, coderivative, frechet_normal_cone, limiting_normal_cone, t_min_subdiff, CoderivativeQuery, ConeKind};

/// The interval {x* : (x*) ∈ P} of a 1-D polyhedron.
fn interval(p: &Polyhedron) -> vdsopt::Result<(f64, f64)> {
    let hi = p.support(&Point::from([1.0]))?.unwrap_or(f64::INFINITY);
    let lo = p.support(&Point::from([-1.0]))?.map_or(f64::NEG_INFINITY, |v| -v);
    Ok((lo, hi))
}

fn main() -> vdsopt::Result<()> {
    // L-shaped union of two quadrants: {x ≤ 0, y ≥ 0} ∪ {x ≥ 0, y ≤ 0}
    let a = Polyhedron::new(2, vec![Halfspace::new(vec![1.0, 0.0], 0.0), Halfspace::new(vec![0.0, -1.0], 0.0)])?;
    let b = Polyhedron::new(2, vec![Halfspace::new(vec![-1.0, 0.0], 0.0), Halfspace::new(vec![0.0, 1.0], 0.0)])?;
    let pieces = [a, b];
    let o = Point::zeros(2);
    let fr = frechet_normal_cone(&pieces, &o)?.cone;
    println!("Fréchet normal cone at 0: {:?} (zero cone: {})", fr.primal_gens(), fr.is_zero());
    for (i, c) in limiting_normal_cone(&pieces, &o)?.iter().enumerate() {
        println!("limiting branch {i}: {:?}", c.primal_gens());
    }

    // graph of y = |x| and of the set-valued y ≥ |x|
    let hs = |v: [f64; 2], c: f64| Halfspace::new(v.to_vec(), c);
    let abs = PolyGraph::new(
        1,
        1,
        vec![
            Polyhedron::new(2, vec![hs([-1.0, 0.0], 0.0), hs([1.0, -1.0], 0.0), hs([-1.0, 1.0], 0.0)])?,
            Polyhedron::new(2, vec![hs([1.0, 0.0], 0.0), hs([1.0, 1.0], 0.0), hs([-1.0, -1.0], 0.0)])?,
        ],
    )?;
    let epi = PolyGraph::new(1, 1, vec![Polyhedron::new(2, vec![hs([1.0, -1.0], 0.0), hs([-1.0, -1.0], 0.0)])?])?;
    for (name, g) in [("y = |x|", &abs), ("y ≥ |x|", &epi)] {
        println!("\n{name} at the origin:");
        for ys in [1.0, -1.0] {
            for kind in [ConeKind::Frechet, ConeKind::Limiting] {
                let q = CoderivativeQuery { map: g, x: Point::from([0.0]), y: Point::from([0.0]), y_star: Point::from([ys]), kind };
                let parts: Vec<_> = coderivative(&q)?.iter().map(interval).collect::<vdsopt::Result<_>>()?;
                println!("  D*F(0,0)({ys:+}) {kind:?}: {parts:?}");
            }
        }
        println!("  Aubin property: {}", aubin_check(g, &Point::from([0.0]), &Point::from([0.0]))?);
    }

    let square = Polyhedron::cube(&Point::from([3.0, 0.0]), 1.0);
    let s = t_min_subdiff(&Point::from([1.0, 0.0]), &Point::from([0.0, 0.5]), &square)?;
    println!("\nT_u at (0, 0.5) for a square: t = {}, hit point {}, hull {:?}, rays {:?}", s.t, s.a, s.hull, s.rays);
    Ok(())
}
