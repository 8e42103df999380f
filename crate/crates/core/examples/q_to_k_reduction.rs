//! Lifting a Q-type problem to an equivalent K-type problem on Ω × Y and
//! comparing verdicts and coderivative identities.
//!
//! cargo run --example q_to_k_reduction

use vdsopt::instances_io::{generate, load, Profile};
use vdsopt::reduction::{lift, lift_point, verdict_equivalence};

fn main() -> vdsopt::Result<()> {
    let inst = load(format!("{}/tests/fixtures/line_q.json", env!("CARGO_MANIFEST_DIR")))?;
    let cand = inst.candidate.clone().expect("fixture candidate");
    let lifted = lift(&inst)?;
    println!("original: X = ℝ^{}, Y = ℝ^{}, kind {:?}", inst.x_dim, inst.y_dim, inst.vds_kind);
    println!("lifted:   X = ℝ^{}, Y = ℝ^{}, kind {:?}", lifted.instance.x_dim, lifted.instance.y_dim, lifted.instance.vds_kind);
    let (lx, ly) = lift_point(&cand.x, &cand.y);
    println!("candidate ({}, {}) lifts to ({lx}, {ly})", cand.x, cand.y);
    let eq = verdict_equivalence(&inst, &cand.x, &cand.y)?;
    println!("verdicts: original {:?}, lifted {:?}", eq.original.verdict, eq.lifted.verdict);

    for seed in 0..5 {
        let inst = generate(seed, Profile::Lifted)?;
        let c = inst.candidate.clone().expect("generated candidate");
        let eq = verdict_equivalence(&inst, &c.x, &c.y)?;
        println!("seed {seed}: original {:?}, lifted {:?}", eq.original.verdict, eq.lifted.verdict);
    }
    Ok(())
}
