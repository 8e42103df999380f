//! Certifying approximate nondominated, efficient and Pareto solutions on
//! the bundled instance files, with witness re-checks on refutation.
//!
//! cargo run --example certify_solutions

use vdsopt::geometry::{Point, PolyCone};
use vdsopt::instances_io::load;
use vdsopt::solutions::{certify, certify_efficient, certify_pareto, recheck_witness, Certificate, Concept, VdsKind};

fn fixture(name: &str) -> vdsopt::Result<vdsopt::solutions::Instance> {
    load(format!("{}/tests/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR")))
}

fn show(label: &str, c: &Certificate) {
    println!("  {label}: {:?} after {} checks ({:?})", c.verdict, c.checked_count, c.evidence);
    if let Some(w) = &c.witness {
        println!("    witness x = {}, y = {}, cone element {}", w.x, w.y, w.cone_element);
    }
}

fn main() -> vdsopt::Result<()> {
    for name in ["constant", "grid1d", "line", "line_q"] {
        let inst = fixture(name)?;
        let concept = match inst.vds_kind {
            VdsKind::K => Concept::NondominatedK,
            VdsKind::Q => Concept::NondominatedQ { exclude_zero: true },
        };
        let cand = inst.candidate.clone().expect("fixtures carry a candidate");
        println!("{name}: candidate x̄ = {}, ȳ = {}, ε = {}, δ = {}", cand.x, cand.y, inst.epsilon, inst.delta);
        show("nondominated", &certify(&inst, &cand.x, &cand.y, concept)?);
        show("efficient", &certify_efficient(&inst, &cand.x, &cand.y)?);
        let orthant = PolyCone::orthant(inst.y_dim);
        show("Pareto for the orthant", &certify_pareto(&inst, &orthant, &cand.x, &cand.y)?);
    }

    // moving the candidate up the line of grid1d breaks nondominatedness
    let inst = fixture("grid1d")?;
    let (x, y) = (Point::from([1.0]), Point::from([1.0]));
    let c = certify(&inst, &x, &y, Concept::NondominatedK)?;
    println!("\ngrid1d at x̄ = 1:");
    show("nondominated", &c);
    if let Some(w) = &c.witness {
        println!("  witness re-checks: {}", recheck_witness(&inst, &x, &y, Concept::NondominatedK, w)?);
    }
    Ok(())
}
