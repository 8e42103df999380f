//! Ekeland's variational principle on finite metric spaces, and the
//! localization pipeline for scalarized vds problems.

use crate::error::{Error, Result};
use crate::geometry::{NormChoice, Point};
use crate::scalarize::{s_vds, ExtReal};
use crate::solutions::{certify_nondominated_k, Instance, VdsKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::cmp::Ordering;

/// A finite point set with a (possibly scaled) norm metric.
#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    pub points: Vec<Point>,
    pub norm: NormChoice,
    pub scale: f64,
    /// Restricts the metric to the first coordinates.
    pub coords: Option<usize>,
}

impl FiniteMetricSpace {
    pub fn new(points: Vec<Point>, norm: NormChoice) -> Self {
        FiniteMetricSpace {
            points,
            norm,
            scale: 1.0,
            coords: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        let diff = &self.points[i] - &self.points[j];
        let c = diff.coords();
        let c = match self.coords {
            Some(n) => &c[..n],
            None => c,
        };
        self.scale * self.norm.of(c)
    }

    pub fn index_of(&self, x: &Point) -> Option<usize> {
        self.points.iter().position(|p| p.approx_eq(x, 1e-12))
    }

    /// Symmetry and triangle inequality on seeded random triples.
    pub fn spot_check(&self, samples: usize, seed: u64) -> Result<()> {
        if self.is_empty() {
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.len();
        for _ in 0..samples {
            let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            let (dij, dji) = (self.d(i, j), self.d(j, i));
            if (dij - dji).abs() > 1e-12 * (1.0 + dij) {
                return Err(Error::invalid("metric is not symmetric"));
            }
            if dij > self.d(i, k) + self.d(k, j) + 1e-12 * (1.0 + dij) {
                return Err(Error::invalid("metric violates the triangle inequality"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvpResult {
    pub x_bar: Point,
    pub index: usize,
    pub iterations: usize,
    /// f(x̄) + λ d(x̄, x̃) ≤ f(x̃)
    pub decrease_ok: bool,
    pub decrease_residual: f64,
    /// d(x̄, x̃) ≤ ε / λ
    pub locality_ok: bool,
    pub locality_residual: f64,
    /// f(x) + λ d(x, x̄) > f(x̄) for x ≠ x̄
    pub strict_min_ok: bool,
    pub strict_min_residual: f64,
    /// min over x ≠ x̄ of f(x) + λ d(x, x̄) − f(x̄) (+∞ for a single point)
    pub strict_margin: f64,
}

impl EvpResult {
    pub fn all_ok(&self) -> bool {
        self.decrease_ok && self.locality_ok && self.strict_min_ok
    }

    pub fn max_residual(&self) -> f64 {
        self.decrease_residual
            .max(self.locality_residual)
            .max(self.strict_min_residual)
    }
}

const EVP_TOL: f64 = 1e-9;

/// Constructive EVP: from x̃ repeatedly move to the minimizer of
/// f + λ d(·, x_j) among the other points of the sublevel set
/// {f + λ d(·, x_j) ≤ f(x_j)}; stop when that set is {x_j}.
///
/// `f` may contain `+∞` entries.
pub fn evp_finite(m: &FiniteMetricSpace, f: &[f64], x_tilde: usize, eps: f64, lambda: f64) -> Result<EvpResult> {
    if m.is_empty() {
        return Err(Error::EmptySet("metric space".into()));
    }
    if f.len() != m.len() {
        return Err(Error::DimensionMismatch {
            expected: m.len(),
            found: f.len(),
        });
    }
    if x_tilde >= m.len() {
        return Err(Error::invalid("x̃ is not a point of the space"));
    }
    if !(lambda > 0.0) || !(eps >= 0.0) {
        return Err(Error::invalid("need λ > 0 and ε ≥ 0"));
    }
    if f.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
        return Err(Error::invalid("f must be real or +∞"));
    }
    let ft = f[x_tilde];
    if !ft.is_finite() {
        return Err(Error::Precondition("f is not finite at x̃".into()));
    }
    let fmin = f.iter().cloned().fold(f64::INFINITY, f64::min);
    if ft > fmin + eps + EVP_TOL * (1.0 + ft.abs()) {
        return Err(Error::Precondition(format!(
            "x̃ is not an ε-minimizer: f(x̃) = {ft}, inf f = {fmin}, ε = {eps}"
        )));
    }

    let mut cur = x_tilde;
    let mut iterations = 0;
    loop {
        let level = f[cur];
        let mut next: Option<(usize, f64)> = None;
        for i in 0..m.len() {
            if i == cur || !f[i].is_finite() {
                continue;
            }
            let val = f[i] + lambda * m.d(i, cur);
            if val > level {
                continue;
            }
            let better = match next {
                None => true,
                Some((j, v)) => match val.partial_cmp(&v).unwrap_or(Ordering::Equal) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => m.points[i].lex_cmp(&m.points[j]).is_lt(),
                },
            };
            if better {
                next = Some((i, val));
            }
        }
        match next {
            Some((i, _)) => {
                cur = i;
                iterations += 1;
            }
            None => break,
        }
    }

    let xb = cur;
    let dist = m.d(xb, x_tilde);
    let decrease_residual = (f[xb] + lambda * dist - ft).max(0.0);
    let locality_residual = (dist - eps / lambda).max(0.0);
    let mut margin = f64::INFINITY;
    for i in 0..m.len() {
        if i != xb {
            margin = margin.min(f[i] + lambda * m.d(i, xb) - f[xb]);
        }
    }
    let strict_min_residual = if margin > 0.0 { 0.0 } else { -margin };
    Ok(EvpResult {
        x_bar: m.points[xb].clone(),
        index: xb,
        iterations,
        decrease_ok: decrease_residual <= EVP_TOL,
        decrease_residual,
        locality_ok: locality_residual <= EVP_TOL,
        locality_residual,
        strict_min_ok: margin > 0.0,
        strict_min_residual,
        strict_margin: margin,
    })
}

/// Outcome of the localization pipeline.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VdsEvpReport {
    pub evp: EvpResult,
    /// The scalarization g = s^f_{k, f(x̃) − K} on the grid M.
    pub trace: Vec<(Point, ExtReal)>,
    pub g_at_tilde: f64,
    pub g_min: f64,
    /// g ≥ −δ on M
    pub lower_bound_ok: bool,
    /// g(x̄) + √δ ‖x̄ − x̃‖ − g(x̃), clipped at 0
    pub residual_i: f64,
    /// ‖x̄ − x̃‖ − min{√δ, ε′}, clipped at 0
    pub residual_ii: f64,
    /// violation of strict minimality of g + √δ ‖· − x̄‖ on M
    pub residual_iii: f64,
    pub lambda: f64,
}

impl VdsEvpReport {
    pub fn max_residual(&self) -> f64 {
        self.residual_i.max(self.residual_ii).max(self.residual_iii)
    }
}

/// Ekeland localization of an approximate nondominated point x̃.
///
/// Checks the hypotheses (certified nondominatedness of (x̃, f(x̃)) and the
/// scalarization condition on the ε-ball), then runs [`evp_finite`] on
/// M = B̄(x̃, ε′) ∩ Ω with g = s^f_{k,f(x̃)−K}, ε := δ and λ := √δ.
pub fn evp_vds(inst: &Instance, x_tilde: &Point, eps_prime: f64) -> Result<VdsEvpReport> {
    inst.validate()?;
    if inst.vds_kind != VdsKind::K {
        return Err(Error::invalid("the localization pipeline needs a K-type instance"));
    }
    if !(eps_prime > 0.0 && eps_prime < inst.epsilon) {
        return Err(Error::Precondition("need 0 < ε′ < ε".into()));
    }
    if !(inst.delta > 0.0) {
        return Err(Error::Precondition("need δ > 0".into()));
    }
    let a = inst.objective.eval(x_tilde)?;
    let cert = certify_nondominated_k(inst, x_tilde, &a)?;
    if !cert.is_certified() {
        return Err(Error::Hypothesis(format!(
            "({x_tilde}, {a}) is not (ε, δ, k)-nondominated"
        )));
    }
    let radius = inst.epsilon.min(1e9);
    let sc = inst
        .cone_field
        .scalarization_condition(x_tilde, radius, inst.k.point(), inst.norm)?;
    if !sc.holds {
        return Err(Error::Hypothesis("scalarization condition fails on the ε-ball".into()));
    }

    let tau = inst.tau();
    let points: Vec<Point> = inst
        .domain_points()?
        .into_iter()
        .filter(|x| inst.ball_dist(x, x_tilde) <= eps_prime + tau)
        .collect();
    let mut space = FiniteMetricSpace::new(points, inst.norm);
    space.coords = inst.ball_coords;
    let Some(ti) = space.index_of(x_tilde) else {
        return Err(Error::Precondition(format!("{x_tilde} is not a grid point of Ω")));
    };

    let mut trace = Vec::with_capacity(space.len());
    let mut g = Vec::with_capacity(space.len());
    for x in &space.points {
        let v = s_vds(&inst.objective, &inst.cone_field, &a, inst.k.point(), x)?;
        if v == ExtReal::NegInf {
            return Err(Error::Hypothesis(format!("scalarization is −∞ at {x}")));
        }
        g.push(v.to_f64());
        trace.push((x.clone(), v));
    }
    let g_min = g.iter().cloned().fold(f64::INFINITY, f64::min);
    let lower_bound_ok = g_min >= -inst.delta - tau;
    if !lower_bound_ok {
        return Err(Error::Hypothesis(format!(
            "scalarization drops to {g_min} < −δ; the nondominatedness certificate or the scalarization condition is wrong"
        )));
    }
    let g_at_tilde = g[ti];
    if g_at_tilde.abs() > tau {
        return Err(Error::Hypothesis(format!("g(x̃) = {g_at_tilde} ≠ 0")));
    }

    let lambda = inst.delta.sqrt();
    let evp = evp_finite(&space, &g, ti, inst.delta, lambda)?;
    let dist = space.d(evp.index, ti);
    let residual_i = (g[evp.index] + lambda * dist - g_at_tilde).max(0.0);
    let residual_ii = (dist - lambda.min(eps_prime)).max(0.0);
    let residual_iii = evp.strict_min_residual;
    Ok(VdsEvpReport {
        evp,
        trace,
        g_at_tilde,
        g_min,
        lower_bound_ok,
        residual_i,
        residual_ii,
        residual_iii,
        lambda,
    })
}
