//! The finite variational principle and its use to localize an approximate
//! nondominated point, followed by the scalarized necessary condition.
//!
//! cargo run --example ekeland_localization

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vdsopt::evp::{evp_finite, evp_vds, FiniteMetricSpace};
use vdsopt::geometry::{NormChoice, Point};
use vdsopt::instances_io::{generate, load, Profile};
use vdsopt::nonsmooth::check_scalarized_nc;

fn main() -> vdsopt::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let points: Vec<Point> = (0..300).map(|_| Point::from([rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)])).collect();
    let f: Vec<f64> = points.iter().map(|p| p.dot(p) + 0.3 * rng.gen_range(-1.0..1.0)).collect();
    let fmin = f.iter().cloned().fold(f64::INFINITY, f64::min);
    // the worst ε-minimizer as the starting point
    let x_tilde = (0..f.len()).filter(|&i| f[i] <= fmin + 0.5).max_by(|&i, &j| f[i].total_cmp(&f[j])).unwrap_or(0);
    let m = FiniteMetricSpace::new(points, NormChoice::Euclidean);
    let r = evp_finite(&m, &f, x_tilde, 0.5, 0.1)?;
    println!("finite EVP from {} (f = {:.4}): x̄ = {} (f = {:.4}) after {} moves", m.points[x_tilde], f[x_tilde], r.x_bar, f[r.index], r.iterations);
    println!("  decrease {}, locality {}, strict minimum {} (margin {:.4})", r.decrease_ok, r.locality_ok, r.strict_min_ok, r.strict_margin);

    let inst = load(format!("{}/tests/fixtures/grid1d.json", env!("CARGO_MANIFEST_DIR")))?;
    let xt = Point::from([0.3]);
    let rep = evp_vds(&inst, &xt, 0.5)?;
    println!("\nlocalization on grid1d from x̃ = {xt}: x̄ = {}, λ = √δ = {:.4}", rep.evp.x_bar, rep.lambda);
    println!("  g(x̃) = {}, min g = {:.4}, g ≥ −δ: {}", rep.g_at_tilde, rep.g_min, rep.lower_bound_ok);
    println!("  residuals {:.1e} {:.1e} {:.1e}", rep.residual_i, rep.residual_ii, rep.residual_iii);

    let inst = generate(5, Profile::Polyhedral2d(vdsopt::constants::Regime::BI))?;
    let xt = inst.candidate.clone().expect("generated candidate").x;
    let rep = evp_vds(&inst, &xt, 0.5 * inst.epsilon.min(1.0))?;
    let nc = check_scalarized_nc(&inst, &xt, &rep)?;
    println!("\ngenerated polyhedral instance, x̃ = {xt}: x̄ = {}", nc.x_bar);
    println!("  case {:?}: residual {:.4} ≤ √δ = {:.4}: {} ({} branches)", nc.case, nc.residual, nc.bound, nc.holds, nc.branches_checked);
    Ok(())
}
