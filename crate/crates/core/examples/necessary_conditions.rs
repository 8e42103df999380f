//! Coderivative necessary conditions for K- and Q-type nondominated points:
//! searching for a multiplier bundle and re-validating it.
//!
//! cargo run --example necessary_conditions

use vdsopt::instances_io::load;
use vdsopt::openness::{necessary_cond_k, necessary_cond_q, validate_nc_k, validate_nc_q, NcBundle};

fn show(b: &NcBundle) {
    let h = &b.hypotheses;
    println!("  hypotheses: Aubin F {}, Aubin K {}, regime {:?}, interiority margin {:.4}, nondominated {}", h.aubin_objective, h.aubin_cone, h.regime, h.interiority_margin, h.nondominated);
    println!("  radius {:.4}, y* = {}, z* = {}", b.radius, b.y_star, b.z_star);
    println!("  x1* = {}, x3* = {}, x2* = {:?}", b.x1_star, b.x3_star, b.x2_star.as_ref().map(|p| p.to_string()));
    println!("  residual {:.2e} over {} combinations", b.residual, b.combinations_checked);
}

fn main() -> vdsopt::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    let inst = load(format!("{dir}/line.json"))?;
    let c = inst.candidate.clone().expect("fixture candidate");
    let b = necessary_cond_k(&inst, &c.x, &c.y)?;
    println!("K-type condition on line.json:");
    show(&b);
    println!("  re-validated: {}", validate_nc_k(&inst, &c.x, &c.y, &b)?);

    let inst = load(format!("{dir}/line_q.json"))?;
    let c = inst.candidate.clone().expect("fixture candidate");
    let b = necessary_cond_q(&inst, &c.x, &c.y)?;
    println!("\nQ-type condition on line_q.json:");
    show(&b);
    println!("  y1* = {:?}, y2* = {:?}", b.y1_star.as_ref().map(|p| p.to_string()), b.y2_star.as_ref().map(|p| p.to_string()));
    println!("  re-validated: {}", validate_nc_q(&inst, &c.x, &c.y, &b)?);

    // the condition refuses instances of the wrong kind
    let inst = load(format!("{dir}/line.json"))?;
    if let Err(e) = necessary_cond_q(&inst, &c.x, &c.y) {
        println!("\nQ-type search on a K instance: {e}");
    }
    Ok(())
}
