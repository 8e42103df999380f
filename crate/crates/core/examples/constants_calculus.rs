//! The auxiliary functions and the constants system linking ε, δ and the
//! injectivity constant c.
//!
//! cargo run --example constants_calculus

use vdsopt::constants::{a_bar, m_a_bar, phi, phi_inv, psi, regime, solve_constants_system, theta_bound};

fn main() -> vdsopt::Result<()> {
    println!("   x      φ(x)      ψ(x)   φ⁻¹(φ(x))");
    for x in [0.05, 0.1, 0.25, 0.5, 1.0, 2.0] {
        let p = phi(x)?;
        println!("{x:5.2} {p:9.5} {:9.5} {:9.5}", psi(x)?, phi_inv(p)?);
    }
    println!("\n   c      ā(c)    m(ā)");
    for c in [0.1, 0.25, 0.5, 0.9] {
        println!("{c:5.2} {:8.5} {:8.5}", a_bar(c)?, m_a_bar(c)?);
    }
    println!();
    for (eps, delta) in [(0.2, 0.1), (1.0, 0.05), (0.5, 0.4), (0.01, 0.5)] {
        let reg = regime(eps, delta);
        let sol = solve_constants_system(eps, delta)?;
        let iv: Vec<String> = sol.intervals.iter().map(|i| format!("[{:.4}, {:.4}]", i.lo, i.hi)).collect();
        println!("ε = {eps}, δ = {delta}: regime {:?}, admissible c {}", reg.regime, if iv.is_empty() { "none".into() } else { iv.join(" ∪ ") });
    }
    let t = theta_bound(0.5, 0.4, 0.2)?;
    println!("\nθ bound for r = 0.5, c = 0.4, a = 0.2: {:.5} (b = {:.5}, conditions at θ/2 {:?})", t.bound, t.b, t.bullets_at_half);
    Ok(())
}
