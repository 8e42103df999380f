//! Directional openness of the sum map: hypotheses, injectivity constant,
//! the per-radius coverage harness and the incompatibility check.
//!
//! cargo run --example directional_openness

use vdsopt::instances_io::load;
use vdsopt::openness::{directional_openness_harness, incompatibility_check, openness_hypotheses};

fn main() -> vdsopt::Result<()> {
    let inst = load(format!("{}/tests/fixtures/identity.json", env!("CARGO_MANIFEST_DIR")))?;
    let cand = inst.candidate.clone().expect("fixture candidate");
    let h = openness_hypotheses(&inst, &cand.x, &cand.y)?;
    println!("transversality: cone {}, constraints {} ({})", h.transversality.cone_condition, h.transversality.constraint_condition, h.transversality.alliedness);
    println!(
        "injectivity constant c = {:.4} ({:?}, {} iterations, {} branch combinations)",
        h.injectivity.c, h.injectivity.method, h.injectivity.iterations, h.injectivity.branch_combinations
    );
    println!("locality radius r = {:.4}, common cone generators {:?}", h.r, h.p.primal_gens());

    let a = 0.5 * h.injectivity.c;
    let rep = directional_openness_harness(&inst, &cand.x, &cand.y, a, 4)?;
    println!("\nharness with a = {a:.4}, θ = {:.4}:", rep.theta);
    for run in &rep.runs {
        println!("  ρ = {:.4}: {:?}", run.rho, run.verdict);
    }
    println!("all radii certified: {}", rep.all_certified());

    let inc = incompatibility_check(&inst, &cand.x, &cand.y)?;
    println!("\nnondominated: {:?}", inc.nondominated);
    for c in &inc.checks {
        println!("  coverage at δ′ = {:.4}: {:?}", c.delta_prime, c.coverage);
    }
    println!("contradiction found: {}", inc.contradiction);
    Ok(())
}
