//! Polyhedral cones and polyhedra: duals, membership, distances in the three
//! norms, projections and ray hitting times.
//!
//! cargo run --example cone_geometry

use vdsopt::geometry::{Halfspace, NormChoice, Point, PolyCone, Polyhedron};

fn main() -> vdsopt::Result<()> {
    // a wedge in ℝ² spanned by (1, 0) and (1, 1)
    let wedge = PolyCone::from_generators(2, vec![Point::from([1.0, 0.0]), Point::from([1.0, 1.0])])?;
    println!("wedge generators {:?}", wedge.primal_gens());
    println!("dual generators  {:?}", wedge.dual_gens());
    println!("pointed {}, full-dimensional {}", wedge.is_pointed(), wedge.is_full_dimensional());
    println!("dual of dual equals the wedge: {}", wedge.dual().dual().same_set(&wedge, 1e-9));

    let y = Point::from([-1.0, 2.0]);
    println!("\n{y} in wedge: {}", wedge.contains(&y, 1e-9)?);
    for norm in [NormChoice::Euclidean, NormChoice::Max, NormChoice::Sum] {
        println!("  distance to wedge, {norm:?}: {:.6}", wedge.distance(&y, norm)?);
    }

    let orthant = PolyCone::orthant(2);
    let meet = wedge.intersection(&orthant.negate())?;
    println!("\nwedge ∩ (−ℝ²₊) is {{0}}: {}", meet.is_zero());
    println!("wedge + ℝ²₊ generators {:?}", wedge.sum(&orthant)?.primal_gens());

    // unit square cut by x + y ≤ 1.5
    let mut hs = Polyhedron::boxed(&Point::zeros(2), &Point::from([1.0, 1.0])).halfspaces;
    hs.push(Halfspace::new(vec![1.0, 1.0], 1.5));
    let p = Polyhedron::new(2, hs)?;
    println!("\nvertices {:?}", p.vertices()?);
    let z = Point::from([2.0, 2.0]);
    for norm in [NormChoice::Euclidean, NormChoice::Max, NormChoice::Sum] {
        let (proj, d) = p.project(&z, norm)?;
        println!("  projection of {z}, {norm:?}: {proj} at distance {d:.6}");
    }
    let x = Point::from([-1.0, 0.5]);
    let u = Point::from([1.0, 0.0]);
    println!("ray from {x} along {u} enters after t = {}", p.ray_hit(&x, &u, 1e-9)?);
    println!("ray from {x} along −u enters after t = {}", p.ray_hit(&x, &u.scale(-1.0), 1e-9)?);
    Ok(())
}
