//! Scalar constants behind the openness radii: φ, ψ, φ⁻¹, ā, m_a, θ and
//! the solution set of the δ/ε inequality system.
//!
//! With s = √(1 + x) everything is rational in u = 1/s:
//! φ(x) = ¼(1 − u)², ψ(x) = ¼(u − u²), which gives exact inverses.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

fn check_nonneg(x: f64) -> Result<()> {
    if !(x >= 0.0) {
        return Err(Error::invalid(format!("expected a nonnegative argument, got {x}")));
    }
    Ok(())
}

/// x with 1/√(1+x) = u, computed as (1 − u)(1 + u)/u².
fn x_of(u: f64) -> f64 {
    (1.0 - u) * (1.0 + u) / (u * u)
}

/// φ(x) = ¼(√(1+x) − 1)(1/√(x+1) − 1/(x+1)); increasing bijection [0,∞) → [0,¼).
pub fn phi(x: f64) -> Result<f64> {
    check_nonneg(x)?;
    if x.is_infinite() {
        return Ok(0.25);
    }
    // 1 − u = x / (s (s + 1)) avoids cancellation near 0
    let s = (1.0 + x).sqrt();
    let w = x / (s * (s + 1.0));
    Ok(0.25 * w * w)
}

/// ψ(x) = ¼(1/√(x+1) − 1/(x+1)); peak 1/16 at x = 3.
pub fn psi(x: f64) -> Result<f64> {
    check_nonneg(x)?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    let s = (1.0 + x).sqrt();
    let w = x / (s * (s + 1.0));
    Ok(0.25 * w / s)
}

/// φ⁻¹ on [0, ¼).
pub fn phi_inv(d: f64) -> Result<f64> {
    if !(0.0..0.25).contains(&d) {
        return Err(Error::invalid(format!("φ⁻¹ is defined on [0, 1/4), got {d}")));
    }
    // 1 − u = 2√d
    let w = 2.0 * d.sqrt();
    let u = 1.0 - w;
    // x = (1 − u)(1 + u)/u²
    Ok(w * (1.0 + u) / (u * u))
}

/// ā = √(1+c) − 1, the maximizer of a ↦ a(c/(c+1) − a/(a+1)) on (0, c).
pub fn a_bar(c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::invalid("c must be positive"));
    }
    Ok(c / ((1.0 + c).sqrt() + 1.0))
}

/// m_a = min{c, ¼(c/(c+1) − a/(a+1)), (c/2a)(c/(c+1) + a/(a+1))}.
pub fn m_a(c: f64, a: f64) -> Result<f64> {
    if !(a > 0.0 && a < c) {
        return Err(Error::invalid(format!("need 0 < a < c, got a = {a}, c = {c}")));
    }
    let (pc, pa) = (c / (c + 1.0), a / (a + 1.0));
    Ok(c.min(0.25 * (pc - pa)).min(c / (2.0 * a) * (pc + pa)))
}

/// m_ā in closed form, ¼(1/√(c+1) − 1/(c+1)) = ψ(c).
pub fn m_a_bar(c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::invalid("c must be positive"));
    }
    psi(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// ε > 1/16 and δ ∈ (0, ¼)
    #[serde(rename = "b_i")]
    BI,
    /// ε ≤ 1/16, δ < ε and √δ − δ < ε
    #[serde(rename = "b_ii")]
    BII,
    #[serde(rename = "infeasible")]
    Infeasible,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstantsRegime {
    /// `f64::INFINITY` allowed
    pub epsilon: f64,
    pub delta: f64,
    pub regime: Regime,
}

pub fn regime(epsilon: f64, delta: f64) -> ConstantsRegime {
    let r = if !(delta > 0.0) || !(epsilon > 0.0) {
        Regime::Infeasible
    } else if epsilon > 1.0 / 16.0 && delta < 0.25 {
        Regime::BI
    } else if epsilon <= 1.0 / 16.0 && delta < epsilon && delta.sqrt() - delta < epsilon {
        Regime::BII
    } else {
        Regime::Infeasible
    };
    ConstantsRegime {
        epsilon,
        delta,
        regime: r,
    }
}

/// An open interval of c (upper end may be +∞); the stored endpoints lie
/// on the feasible side, so every c in [lo, hi] satisfies both inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CInterval {
    pub lo: f64,
    pub hi: f64,
}

impl CInterval {
    /// An interior representative.
    pub fn sample(&self) -> f64 {
        if self.hi.is_infinite() {
            (2.0 * self.lo).max(self.lo + 1.0)
        } else {
            0.5 * (self.lo + self.hi)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsSolution {
    pub epsilon: f64,
    pub delta: f64,
    pub intervals: Vec<CInterval>,
    pub regime: Regime,
}

impl ConstantsSolution {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, c: f64) -> bool {
        self.intervals.iter().any(|i| c >= i.lo && c <= i.hi)
    }
}

/// Does c satisfy δ < φ(c) and ψ(c) < ε?
pub fn satisfies_system(epsilon: f64, delta: f64, c: f64) -> bool {
    c > 0.0 && phi(c).is_ok_and(|p| delta < p) && psi(c).is_ok_and(|q| q < epsilon)
}

/// {c > 0 : δ < φ(c), ψ(c) < ε} as a union of intervals.
///
/// In u = 1/√(1+c) ∈ (0, 1) the system reads u < 1 − 2√δ and
/// u − u² < 4ε, so the set is (0, 1 − 2√δ) minus [u₋, u₊] with
/// u± = (1 ± √(1 − 16ε))/2 when ε ≤ 1/16.
pub fn solve_constants_system(epsilon: f64, delta: f64) -> Result<ConstantsSolution> {
    if !(epsilon > 0.0) || !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::invalid("need ε > 0 and finite δ > 0"));
    }
    let reg = regime(epsilon, delta).regime;
    let mut u_ranges: Vec<(f64, f64)> = Vec::new();
    if delta < 0.25 {
        let u_max = 1.0 - 2.0 * delta.sqrt();
        if 16.0 * epsilon > 1.0 {
            u_ranges.push((0.0, u_max));
        } else {
            let r = (1.0 - 16.0 * epsilon).max(0.0).sqrt();
            let (um, up) = (0.5 * (1.0 - r), 0.5 * (1.0 + r));
            u_ranges.push((0.0, um.min(u_max)));
            u_ranges.push((up, u_max));
        }
    }
    let mut intervals = Vec::new();
    // u decreasing in c: u ∈ (a, b) ⇔ c ∈ (x(b), x(a))
    for (a, b) in u_ranges {
        if !(b > a) {
            continue;
        }
        let lo = x_of(b);
        let hi = if a == 0.0 { f64::INFINITY } else { x_of(a) };
        if let Some(iv) = inset(epsilon, delta, lo, hi) {
            intervals.push(iv);
        }
    }
    intervals.sort_by(|p, q| p.lo.total_cmp(&q.lo));
    Ok(ConstantsSolution {
        epsilon,
        delta,
        intervals,
        regime: reg,
    })
}

/// Moves analytic endpoints inward until they satisfy the strict inequalities.
fn inset(epsilon: f64, delta: f64, lo: f64, hi: f64) -> Option<CInterval> {
    let mut l = lo;
    let mut h = hi;
    let mut step = 1e-12 * (1.0 + lo.abs());
    while !satisfies_system(epsilon, delta, l) {
        l = lo + step;
        step *= 4.0;
        if l >= h || step > 1e-6 * (1.0 + lo.abs()) {
            return None;
        }
    }
    if h.is_finite() {
        let mut step = 1e-12 * (1.0 + hi.abs());
        while !satisfies_system(epsilon, delta, h) {
            h = hi - step;
            step *= 4.0;
            if h <= l || step > 1e-6 * (1.0 + hi.abs()) {
                return None;
            }
        }
    }
    (h > l).then_some(CInterval { lo: l, hi: h })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThetaBound {
    /// min{r, ¼(c/(c+1) − a/(a+1)), (r/2a)(c/(c+1) + a/(a+1))}
    pub bound: f64,
    /// b = ½(c/(c+1) + a/(a+1))
    pub b: f64,
    /// The three inequalities at θ = bound/2.
    pub bullets_at_half: [bool; 3],
}

pub fn theta_bound(r: f64, c: f64, a: f64) -> Result<ThetaBound> {
    if !(r > 0.0) || !(a > 0.0 && a < c) {
        return Err(Error::invalid(format!("need r > 0 and 0 < a < c, got r = {r}, c = {c}, a = {a}")));
    }
    let (pc, pa) = (c / (c + 1.0), a / (a + 1.0));
    let bound = r.min(0.25 * (pc - pa)).min(r / (2.0 * a) * (pc + pa));
    let b = 0.5 * (pc + pa);
    let bullets_at_half = theta_bullets(r, c, a, bound / 2.0);
    if bullets_at_half.iter().any(|ok| !ok) {
        return Err(Error::numerical("θ bound self-check failed"));
    }
    Ok(ThetaBound {
        bound,
        b,
        bullets_at_half,
    })
}

/// b⁻¹aθ < r;  θ < r;  a/(a+1) < b + 2θ < c/(c+1).
pub fn theta_bullets(r: f64, c: f64, a: f64, theta: f64) -> [bool; 3] {
    let (pc, pa) = (c / (c + 1.0), a / (a + 1.0));
    let b = 0.5 * (pc + pa);
    [
        a * theta / b < r,
        theta < r,
        pa < b + 2.0 * theta && b + 2.0 * theta < pc,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn phi_direct(x: f64) -> f64 {
        0.25 * ((1.0 + x).sqrt() - 1.0) * (1.0 / (x + 1.0).sqrt() - 1.0 / (x + 1.0))
    }

    fn psi_direct(x: f64) -> f64 {
        0.25 * (1.0 / (x + 1.0).sqrt() - 1.0 / (x + 1.0))
    }

    #[test]
    fn anchor_values() {
        assert_eq!(phi(0.0).unwrap(), 0.0);
        assert!((phi(3.0).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        assert!(phi(1e6).unwrap() < 0.25);
        assert_eq!(psi(0.0).unwrap(), 0.0);
        assert!((psi(3.0).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        assert!(psi(1e8).unwrap() < 1e-4);
        assert!(phi(-1.0).is_err() && psi(-0.5).is_err());
    }

    #[test]
    fn inverse_anchors() {
        assert_eq!(phi_inv(0.0).unwrap(), 0.0);
        assert!((phi_inv(1.0 / 16.0).unwrap() - 3.0).abs() < 1e-12);
        assert!(phi_inv(0.25).is_err());
    }

    #[test]
    fn a_bar_and_m_a() {
        assert!((a_bar(3.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((m_a(3.0, 1.0).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        assert!(m_a(3.0, 3.0).is_err() && m_a(3.0, 0.0).is_err());
    }

    #[test]
    fn theta_anchor() {
        let t = theta_bound(3.0, 3.0, 1.0).unwrap();
        assert!((t.bound - 1.0 / 16.0).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for e in 1..12 {
            let a = 3.0 - 10f64.powi(-e);
            let b = theta_bound(3.0, 3.0, a).unwrap().bound;
            assert!(b < prev);
            prev = b;
        }
        assert!(prev < 1e-12);
    }

    #[test]
    fn system_examples() {
        let s = solve_constants_system(0.2, 0.1).unwrap();
        assert_eq!(s.regime, Regime::BI);
        assert!(!s.is_empty());
        assert!(solve_constants_system(0.3, 0.25).unwrap().is_empty());
        assert!(solve_constants_system(f64::INFINITY, 0.3).unwrap().is_empty());
    }

    #[test]
    fn small_epsilon_still_solvable_for_large_c() {
        // √δ − δ = 0.16 > ε, yet c = 100 satisfies both inequalities
        assert!(satisfies_system(0.05, 0.04, 100.0));
        let s = solve_constants_system(0.05, 0.04).unwrap();
        assert_eq!(s.regime, Regime::Infeasible);
        assert!(s.contains(100.0));
        // dense scan oracle over (0, 10⁶)
        let mut c = 1e-3;
        while c < 1e6 {
            assert_eq!(s.contains(c), satisfies_system(0.05, 0.04, c), "c = {c}");
            c *= 1.01;
        }
    }

    proptest! {
        #[test]
        fn phi_matches_formula(x in 0.0f64..1e4) {
            let d = phi_direct(x);
            prop_assert!((phi(x).unwrap() - d).abs() <= 1e-13 * (1.0 + d));
            prop_assert!((psi(x).unwrap() - psi_direct(x)).abs() <= 1e-13);
        }

        #[test]
        fn phi_inv_round_trip(d in 0.0f64..0.2499) {
            let x = phi_inv(d).unwrap();
            prop_assert!((phi(x).unwrap() - d).abs() <= 1e-12);
        }

        #[test]
        fn m_a_bar_is_psi(c in 1e-3f64..1e3) {
            let a = a_bar(c).unwrap();
            prop_assert!((m_a(c, a).unwrap() - psi(c).unwrap()).abs() <= 1e-12);
            prop_assert_eq!(m_a_bar(c).unwrap(), psi(c).unwrap());
        }

        #[test]
        fn a_bar_maximizes_product(c in 1e-2f64..1e3, t in 0.001f64..0.999) {
            let a = t * c;
            let ab = a_bar(c).unwrap();
            let h = |a: f64| a * (c / (c + 1.0) - a / (a + 1.0));
            prop_assert!(h(ab) >= h(a) - 1e-12);
            prop_assert!(ab * m_a(c, ab).unwrap() >= a * m_a(c, a).unwrap() - 1e-12);
        }

        #[test]
        fn bullets_below_bound(r in 1e-3f64..10.0, c in 1e-2f64..10.0, t in 0.01f64..0.99) {
            let a = t * c;
            let tb = theta_bound(r, c, a).unwrap();
            prop_assert!(theta_bullets(r, c, a, tb.bound * 0.999).iter().all(|b| *b));
        }

        #[test]
        fn solution_points_validate(eps in 1e-4f64..0.5, delta in 1e-4f64..0.3) {
            let s = solve_constants_system(eps, delta).unwrap();
            prop_assert_eq!(s.is_empty(), delta >= 0.25);
            for iv in &s.intervals {
                prop_assert!(satisfies_system(eps, delta, iv.lo));
                prop_assert!(satisfies_system(eps, delta, iv.sample()));
                if iv.hi.is_finite() {
                    prop_assert!(satisfies_system(eps, delta, iv.hi));
                }
            }
            if s.regime != Regime::Infeasible {
                prop_assert!(!s.is_empty());
            }
        }

        #[test]
        fn phi_inv_continuous_decreasing(d in 0.001f64..0.24) {
            let mut prev = phi_inv(d + 0.005).unwrap();
            for n in 1..20 {
                let v = phi_inv(d + 0.005 / n as f64).unwrap();
                prop_assert!(v <= prev);
                prev = v;
            }
            prop_assert!((prev - phi_inv(d).unwrap()).abs() < 0.1 * (1.0 + prev));
        }
    }
}
