//! Directional openness of sums of set-valued maps, the incompatibility
//! between openness and approximate optimality, and the coderivative
//! conditions (transversality, injectivity, Aubin) feeding the necessary
//! optimality conditions.
//!
//! Local quantifiers over graph points near a base point are handled through
//! the limiting normal cone branches at the base point: for polyhedral data
//! the Fréchet normal cone at p + s·d (s small) is the branch of the cell
//! containing d, so the branches enumerate every Fréchet cone met inside the
//! locality radius returned by [`locality_radius`].

use crate::constants::{phi_inv, regime, theta_bound, Regime};
use crate::error::{check_dim, Error, Result};
use crate::geometry::{Halfspace, NormChoice, Point, PolyCone, Polyhedron, TAU};
use crate::graph::{GraphMap, PolyGraph};
use crate::nonsmooth::{aubin_witness, coderivative, limiting_normal_cone, normal_cone, CoderivativeQuery, ConeKind, BRANCH_CAP};
use crate::numeric::NormMin;
use crate::solutions::{certify_nondominated_k, certify_nondominated_q, Instance, VdsKind, Verdict};
use crate::vds::{interiority, ConeField};
use crate::Evidence;
use serde::Serialize;

/// Interior probes per radius; the endpoints t = 0 and t ≈ aρ are added.
pub const T_GRID: usize = 64;
/// Cap on probe points per inclusion.
pub const PROBE_CAP: usize = 1000;

/// H(x) = Σ parts(x), empty when any part is empty.
///
/// All parts share X; each part is a polyhedral graph in X × Y.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumMap {
    pub x_dim: usize,
    pub y_dim: usize,
    pub parts: Vec<PolyGraph>,
}

impl SumMap {
    pub fn new(x_dim: usize, y_dim: usize, parts: Vec<PolyGraph>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::invalid("a sum needs at least one part"));
        }
        for p in &parts {
            check_dim(x_dim, p.x_dim)?;
            check_dim(y_dim, p.y_dim)?;
        }
        Ok(SumMap { x_dim, y_dim, parts })
    }

    /// Δ_Ω: x ↦ {0} on Ω, ∅ elsewhere.
    pub fn indicator(omega: &Polyhedron, y_dim: usize) -> PolyGraph {
        let zero = Polyhedron::singleton(&Point::zeros(y_dim));
        PolyGraph {
            x_dim: omega.dim,
            y_dim,
            pieces: vec![omega.product(&zero)],
        }
    }

    /// K + F + Δ_Ω for an instance with a K-type field (the cone part first).
    ///
    /// On a lifted instance this is H(x, y) = {y} + Q(y) for y ∈ F(x), x ∈ Ω.
    pub fn for_instance(inst: &Instance) -> Result<Self> {
        if inst.vds_kind != VdsKind::K {
            return Err(Error::invalid("sum maps are built from K-type instances; lift Q-type instances first"));
        }
        let k = PolyGraph::new(inst.x_dim, inst.y_dim, inst.cone_field.graph_pieces()?)?;
        let f = inst.objective.to_poly_graph();
        let d = Self::indicator(&inst.omega.region, inst.y_dim);
        Self::new(inst.x_dim, inst.y_dim, vec![k, f, d])
    }

    /// Whether y ∈ H(x).
    pub fn contains(&self, x: &Point, y: &Point) -> Result<bool> {
        let near = self.cover(x, y, 1.0, NormChoice::Max, None)?;
        Ok(near.is_some_and(|(_, d)| d <= 1e-8))
    }

    /// Smallest ‖x′ − x̄‖ (on the first `coords` entries) over x′ with
    /// y ∈ H(x′) and x′ within `radius`, or `None`.
    fn cover(&self, xb: &Point, y: &Point, radius: f64, norm: NormChoice, coords: Option<usize>) -> Result<Option<(Point, f64)>> {
        let usable = self.pieces_near(xb, radius, norm, coords)?;
        self.cover_with(&usable, xb, y, radius, norm, coords)
    }

    fn pieces_near(&self, xb: &Point, radius: f64, norm: NormChoice, coords: Option<usize>) -> Result<Vec<Vec<usize>>> {
        let (n, m) = (self.x_dim, self.y_dim);
        let nb = coords.unwrap_or(n);
        let mut out = Vec::new();
        for part in &self.parts {
            let mut keep = Vec::new();
            for (j, piece) in part.pieces.iter().enumerate() {
                if radius.is_infinite() {
                    if !piece.is_empty()? {
                        keep.push(j);
                    }
                    continue;
                }
                let sel: Vec<Vec<f64>> = (0..nb)
                    .map(|i| {
                        let mut r = vec![0.0; n + m];
                        r[i] = 1.0;
                        r
                    })
                    .collect();
                let le = piece.le_rows(0, n + m);
                let sol = NormMin { n: n + m, m: &sel, q: &xb.coords()[..nb], eq: &[], le: &le }.solve(norm)?;
                if let Some((_, d)) = sol {
                    if d < radius {
                        keep.push(j);
                    }
                }
            }
            out.push(keep);
        }
        Ok(out)
    }

    fn cover_with(
        &self,
        usable: &[Vec<usize>],
        xb: &Point,
        y: &Point,
        radius: f64,
        norm: NormChoice,
        coords: Option<usize>,
    ) -> Result<Option<(Point, f64)>> {
        let (n, m, p) = (self.x_dim, self.y_dim, self.parts.len());
        let nb = coords.unwrap_or(n);
        let w = n + p * m;
        let counts: Vec<usize> = usable.iter().map(|v| v.len()).collect();
        let mut best: Option<(Point, f64)> = None;
        for combo in combinations(&counts, BRANCH_CAP, "piece combinations")? {
            let mut le = Vec::new();
            for (i, &c) in combo.iter().enumerate() {
                let piece = &self.parts[i].pieces[usable[i][c]];
                for h in &piece.halfspaces {
                    let mut r = vec![0.0; w];
                    r[..n].copy_from_slice(&h.normal.coords()[..n]);
                    r[n + i * m..n + (i + 1) * m].copy_from_slice(&h.normal.coords()[n..]);
                    le.push((r, h.offset));
                }
            }
            let eq: Vec<(Vec<f64>, f64)> = (0..m)
                .map(|l| {
                    let mut r = vec![0.0; w];
                    for i in 0..p {
                        r[n + i * m + l] = 1.0;
                    }
                    (r, y[l])
                })
                .collect();
            let sel: Vec<Vec<f64>> = if radius.is_infinite() {
                Vec::new()
            } else {
                (0..nb)
                    .map(|i| {
                        let mut r = vec![0.0; w];
                        r[i] = 1.0;
                        r
                    })
                    .collect()
            };
            let sol = NormMin { n: w, m: &sel, q: &xb.coords()[..nb], eq: &eq, le: &le }.solve(norm)?;
            if let Some((z, d)) = sol {
                if d < radius && best.as_ref().map_or(true, |(_, b)| d < *b) {
                    best = Some((Point::new(z[..n].to_vec()), d));
                    if radius.is_infinite() {
                        break;
                    }
                }
            }
        }
        Ok(best)
    }
}

/// All index tuples with the given ranges, in lexicographic order.
pub(crate) fn combinations(counts: &[usize], cap: usize, what: &'static str) -> Result<Vec<Vec<usize>>> {
    let total = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c)).unwrap_or(usize::MAX);
    if total > cap {
        return Err(Error::CapExceeded { what, count: total, cap });
    }
    let mut out = Vec::with_capacity(total);
    if total == 0 {
        return Ok(out);
    }
    let mut cur = vec![0usize; counts.len()];
    loop {
        out.push(cur.clone());
        let mut i = counts.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < counts[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// B(ȳ, aρ) ∩ [ȳ − cone{u}] ⊆ H(B(x̄, ρ)) for each ρ in `radii`.
#[derive(Clone, Debug)]
pub struct OpennessQuery {
    pub map: SumMap,
    pub x_bar: Point,
    pub y_bar: Point,
    pub u: Point,
    pub a: f64,
    pub radii: Vec<f64>,
    pub t_points: usize,
    pub norm: NormChoice,
    /// Measure the x-ball on the first coordinates only.
    pub ball_coords: Option<usize>,
}

impl OpennessQuery {
    pub fn new(map: SumMap, x_bar: Point, y_bar: Point, u: Point, a: f64, radii: Vec<f64>, norm: NormChoice) -> Self {
        OpennessQuery {
            map,
            x_bar,
            y_bar,
            u,
            a,
            radii,
            t_points: T_GRID,
            norm,
            ball_coords: None,
        }
    }

    fn validate(&self) -> Result<()> {
        check_dim(self.map.x_dim, self.x_bar.dim())?;
        check_dim(self.map.y_dim, self.y_bar.dim())?;
        check_dim(self.map.y_dim, self.u.dim())?;
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::invalid("the modulus must be positive"));
        }
        if (self.u.norm(self.norm) - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("the direction must be a unit vector"));
        }
        if self.radii.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::invalid("radii must be positive"));
        }
        if self.t_points + 2 > PROBE_CAP {
            return Err(Error::CapExceeded { what: "probe points", count: self.t_points + 2, cap: PROBE_CAP });
        }
        if !self.map.contains(&self.x_bar, &self.y_bar)? {
            return Err(Error::Precondition(format!("{} ∉ H({})", self.y_bar, self.x_bar)));
        }
        Ok(())
    }
}

/// Segment parameters t with 0 ≤ t < t_max probed for one radius.
pub fn probe_times(t_max: f64, interior: usize) -> Vec<f64> {
    let mut ts = vec![0.0];
    ts.extend((1..=interior).map(|i| t_max * i as f64 / (interior + 1) as f64));
    ts.push(t_max * (1.0 - 1e-9));
    ts
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusResult {
    pub rho: f64,
    pub covered: bool,
    pub probes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UncoveredProbe {
    pub rho: f64,
    pub t: f64,
    pub probe: Point,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpennessCertificate {
    pub verdict: Verdict,
    pub per_radius: Vec<RadiusResult>,
    pub witness: Option<UncoveredProbe>,
    pub probes_checked: usize,
    /// Refutations are exact; certification covers the probe grid.
    pub evidence: Evidence,
}

impl OpennessCertificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

/// Probes ȳ − t·u for t on the grid and checks each by exact LP coverage.
pub fn check_directional_openness(q: &OpennessQuery) -> Result<OpennessCertificate> {
    q.validate()?;
    let mut per_radius = Vec::new();
    let mut checked = 0;
    let mut witness = None;
    for &rho in &q.radii {
        let usable = q.map.pieces_near(&q.x_bar, rho, q.norm, q.ball_coords)?;
        let ts = probe_times(q.a * rho, q.t_points);
        let mut covered = true;
        for &t in &ts {
            let probe = q.y_bar.axpy(-t, &q.u);
            checked += 1;
            if q.map.cover_with(&usable, &q.x_bar, &probe, rho, q.norm, q.ball_coords)?.is_none() {
                covered = false;
                if witness.is_none() {
                    witness = Some(UncoveredProbe { rho, t, probe });
                }
                break;
            }
        }
        per_radius.push(RadiusResult { rho, covered, probes: ts.len() });
    }
    let ok = witness.is_none();
    Ok(OpennessCertificate {
        verdict: if ok { Verdict::Certified } else { Verdict::Refuted },
        per_radius,
        witness,
        probes_checked: checked,
        evidence: if ok { Evidence::Sampled } else { Evidence::Exact },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageCheck {
    pub delta_prime: f64,
    pub coverage: Verdict,
    pub witness: Option<UncoveredProbe>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncompatibilityReport {
    pub nondominated: Verdict,
    pub checks: Vec<CoverageCheck>,
    /// Nondominated and covered at some δ′ > δ at once.
    pub contradiction: bool,
}

pub const DELTA_FACTORS: [f64; 3] = [1.01, 1.5, 2.0];

/// Coverage of B(ȳ, δ′) ∩ [ȳ − cone{k}] by (F + K + Δ_Ω)(B(x̄, ε)).
pub fn coverage_at(inst: &Instance, sum: &SumMap, xb: &Point, yb: &Point, delta_prime: f64) -> Result<OpennessCertificate> {
    let eps = inst.epsilon;
    let mut q = OpennessQuery::new(sum.clone(), xb.clone(), yb.clone(), inst.k.point().clone(), 1.0, vec![eps], inst.norm);
    q.ball_coords = inst.ball_coords;
    if eps.is_infinite() {
        // the segment length is fixed independently of the ball
        q.validate()?;
        let usable = sum.pieces_near(xb, eps, inst.norm, inst.ball_coords)?;
        let ts = probe_times(delta_prime, T_GRID);
        for &t in &ts {
            let probe = yb.axpy(-t, inst.k.point());
            if sum.cover_with(&usable, xb, &probe, eps, inst.norm, inst.ball_coords)?.is_none() {
                return Ok(OpennessCertificate {
                    verdict: Verdict::Refuted,
                    per_radius: vec![RadiusResult { rho: eps, covered: false, probes: ts.len() }],
                    witness: Some(UncoveredProbe { rho: eps, t, probe }),
                    probes_checked: ts.len(),
                    evidence: Evidence::Exact,
                });
            }
        }
        return Ok(OpennessCertificate {
            verdict: Verdict::Certified,
            per_radius: vec![RadiusResult { rho: eps, covered: true, probes: ts.len() }],
            witness: None,
            probes_checked: ts.len(),
            evidence: Evidence::Sampled,
        });
    }
    q.a = delta_prime / eps;
    check_directional_openness(&q)
}

/// Openness/optimality incompatibility at (x̄, ȳ) for a K-type instance.
pub fn incompatibility_check(inst: &Instance, xb: &Point, yb: &Point) -> Result<IncompatibilityReport> {
    inst.validate()?;
    if inst.vds_kind != VdsKind::K {
        return Err(Error::invalid("the incompatibility check needs a K-type instance"));
    }
    if !(inst.delta > 0.0) {
        return Err(Error::Precondition("need δ > 0".into()));
    }
    let common = inst.cone_field.common_cone(xb, inst.epsilon.min(1e9), inst.norm)?;
    if !common.cone.contains_fast(inst.k.point(), TAU) {
        return Err(Error::Hypothesis("k is not in every K(x) over the ε-ball".into()));
    }
    let cert = certify_nondominated_k(inst, xb, yb)?;
    let sum = SumMap::for_instance(inst)?;
    let mut checks = Vec::new();
    for f in DELTA_FACTORS {
        let dp = f * inst.delta;
        let c = coverage_at(inst, &sum, xb, yb, dp)?;
        checks.push(CoverageCheck { delta_prime: dp, coverage: c.verdict, witness: c.witness });
    }
    let contradiction = cert.is_certified() && checks.iter().any(|c| c.coverage == Verdict::Certified);
    Ok(IncompatibilityReport { nondominated: cert.verdict, checks, contradiction })
}

/// Rows of a dual-norm ball of the given radius around 0 for `dim`
/// variables at `off`; `inner` picks an inscribed polytope for the
/// euclidean norm, otherwise a circumscribed one. Polyhedral norms are exact.
pub(crate) fn dual_ball_rows(primal: NormChoice, off: usize, dim: usize, width: usize, radius: f64, inner: bool) -> Vec<(Vec<f64>, f64)> {
    let mut rows = Vec::new();
    let boxed = |h: f64, rows: &mut Vec<(Vec<f64>, f64)>| {
        for i in 0..dim {
            for s in [1.0, -1.0] {
                let mut r = vec![0.0; width];
                r[off + i] = s;
                rows.push((r, h));
            }
        }
    };
    match primal.dual() {
        NormChoice::Max => boxed(radius, &mut rows),
        NormChoice::Euclidean => boxed(if inner { radius / (dim as f64).sqrt() } else { radius }, &mut rows),
        NormChoice::Sum => {
            for mask in 0..(1usize << dim) {
                let mut r = vec![0.0; width];
                for i in 0..dim {
                    r[off + i] = if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
                }
                rows.push((r, radius));
            }
        }
    }
    rows
}

/// (x*, −w) ∈ C as rows a·z ≤ b, where x* sits at `xo` and w = Σ sign·z[off].
fn cone_rows(c: &PolyCone, n: usize, xo: usize, w_terms: &[(usize, f64)], width: usize, rows: &mut Vec<(Vec<f64>, f64)>) {
    for d in c.dual_gens() {
        // ⟨dx, x*⟩ − ⟨dy, w⟩ ≥ 0
        let mut r = vec![0.0; width];
        for i in 0..n {
            r[xo + i] = -d[i];
        }
        for &(off, s) in w_terms {
            for l in 0..d.dim() - n {
                r[off + l] += s * d[n + l];
            }
        }
        rows.push((r, 0.0));
    }
}

fn sum_selector(n: usize, offsets: &[usize], width: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut r = vec![0.0; width];
            for &o in offsets {
                r[o + i] = 1.0;
            }
            r
        })
        .collect()
}

fn base_rows(m: usize, width: usize, u: &Point, p_plus: Option<&PolyCone>) -> (Vec<(Vec<f64>, f64)>, Vec<(Vec<f64>, f64)>) {
    let mut eq = Vec::new();
    let mut r = vec![0.0; width];
    r[..m].copy_from_slice(u.coords());
    eq.push((r, 1.0));
    let mut le = Vec::new();
    if let Some(p) = p_plus {
        for g in p.primal_gens() {
            let mut r = vec![0.0; width];
            for l in 0..m {
                r[l] = -g[l];
            }
            le.push((r, 0.0));
        }
    }
    (eq, le)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InjectivityReport {
    /// Largest c found with c ≤ inf ‖Σ x_i*‖ under the 2c coupling.
    pub c: f64,
    pub iterations: usize,
    pub converged: bool,
    pub method: FixedPointMethod,
    pub branch_combinations: usize,
    pub history: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedPointMethod {
    Damped,
    /// Used when the damped iteration stalls.
    Bisection,
}

const INJ_ITER: usize = 100;
const INJ_TOL: f64 = 1e-6;
const INJ_DAMPING: f64 = 0.5;

/// inf ‖x₁* + … + x_p*‖ over ⟨y*, u⟩ = 1 (and y* ∈ P⁺ when given),
/// z_i* ∈ 2c·B and x_i* ∈ D̂*F_i(y* − z_i*) (no shift on the first part),
/// at graph points near (x̄, ȳ_i).
fn injectivity_value(
    sum: &SumMap,
    branches: &[Vec<PolyCone>],
    combos: &[Vec<usize>],
    u: &Point,
    p_plus: Option<&PolyCone>,
    c: f64,
    norm: NormChoice,
) -> Result<f64> {
    let (n, m, p) = (sum.x_dim, sum.y_dim, sum.parts.len());
    // y* | x_1* .. x_p* | z_2* .. z_p*
    let xo = |i: usize| m + i * n;
    let zo = |i: usize| m + p * n + (i - 1) * m;
    let width = m + p * n + (p - 1) * m;
    let (eq, base_le) = base_rows(m, width, u, p_plus);
    let sel = sum_selector(n, &(0..p).map(xo).collect::<Vec<_>>(), width);
    let mut best = f64::INFINITY;
    for combo in combos {
        let mut le = base_le.clone();
        for i in 0..p {
            let w_terms: Vec<(usize, f64)> = if i == 0 { vec![(0, 1.0)] } else { vec![(0, 1.0), (zo(i), -1.0)] };
            cone_rows(&branches[i][combo[i]], n, xo(i), &w_terms, width, &mut le);
            if i > 0 {
                le.extend(dual_ball_rows(norm, zo(i), m, width, 2.0 * c, false));
            }
        }
        let q = vec![0.0; n];
        if let Some((_, v)) = (NormMin { n: width, m: &sel, q: &q, eq: &eq, le: &le }).solve(norm.dual())? {
            best = best.min(v);
        }
    }
    Ok(best)
}

/// Injectivity constant of a sum at (x̄, ȳ₁, …, ȳ_p) with respect to u,
/// by damped fixed-point iteration on the 2c coupling from `c_cap`.
pub fn injectivity_constant(
    sum: &SumMap,
    xb: &Point,
    ys: &[Point],
    u: &Point,
    p_plus: Option<&PolyCone>,
    c_cap: f64,
    norm: NormChoice,
) -> Result<InjectivityReport> {
    check_dim(sum.parts.len(), ys.len())?;
    check_dim(sum.y_dim, u.dim())?;
    if !(c_cap > 0.0 && c_cap.is_finite()) {
        return Err(Error::invalid("c_cap must be positive and finite"));
    }
    let mut branches = Vec::new();
    for (g, y) in sum.parts.iter().zip(ys) {
        branches.push(limiting_normal_cone(&g.pieces, &xb.concat(y))?);
    }
    let counts: Vec<usize> = branches.iter().map(|b| b.len()).collect();
    let combos = combinations(&counts, BRANCH_CAP, "normal-cone branch combinations")?;
    let mut c = c_cap;
    let mut history = vec![c];
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..INJ_ITER {
        iterations += 1;
        let v = injectivity_value(sum, &branches, &combos, u, p_plus, c, norm)?.min(c_cap);
        let next = INJ_DAMPING * c + (1.0 - INJ_DAMPING) * v;
        history.push(next);
        let done = (next - c).abs() < INJ_TOL;
        c = next;
        if done {
            converged = true;
            break;
        }
    }
    let mut method = FixedPointMethod::Damped;
    if !converged {
        // v is nonincreasing in c, so c = v(c) has a unique root to bracket
        method = FixedPointMethod::Bisection;
        let (mut lo, mut hi) = (0.0, c_cap);
        while hi - lo > INJ_TOL * 1e-3 {
            let mid = 0.5 * (lo + hi);
            let v = injectivity_value(sum, &branches, &combos, u, p_plus, mid, norm)?.min(c_cap);
            if v >= mid {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
        }
        c = lo;
        converged = true;
    }
    let v = injectivity_value(sum, &branches, &combos, u, p_plus, c, norm)?.min(c_cap);
    Ok(InjectivityReport {
        c: c.min(v).max(0.0),
        iterations,
        converged,
        method,
        branch_combinations: combos.len(),
        history,
    })
}

/// Largest r such that the max-norm box of radius r around each part's
/// base point meets only pieces through it and no inactive facet.
pub fn locality_radius(sum: &SumMap, xb: &Point, ys: &[Point]) -> Result<f64> {
    check_dim(sum.parts.len(), ys.len())?;
    let mut r = f64::INFINITY;
    for (g, y) in sum.parts.iter().zip(ys) {
        let z = xb.concat(y);
        for piece in &g.pieces {
            if piece.contains(&z, TAU) {
                for h in &piece.halfspaces {
                    let slack = h.offset - h.normal.dot(&z);
                    if slack > TAU {
                        r = r.min(slack / h.normal.norm(NormChoice::Sum));
                    }
                }
            } else {
                r = r.min(piece.distance(&z, NormChoice::Max)?);
            }
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransversalityReport {
    /// D*K(x̄, 0)(0) = {0}
    pub cone_condition: bool,
    /// D*F(x̄, ȳ)(0) ∩ (−N(Ω, x̄)) = {0}
    pub constraint_condition: bool,
    pub witness: Option<Point>,
    /// Alliedness of the product sets follows from the two conditions and
    /// is not checked on its own.
    pub alliedness: &'static str,
}

impl TransversalityReport {
    pub fn holds(&self) -> bool {
        self.cone_condition && self.constraint_condition
    }
}

/// Both transversality conditions, exactly, for polyhedral data. `cone` is
/// the graph of K (or Q) and `cone_point` its base point (x̄, 0) or (ȳ, 0).
pub fn transversality_check(
    f: &PolyGraph,
    cone: &PolyGraph,
    omega: &Polyhedron,
    xb: &Point,
    yb: &Point,
    cone_point: (&Point, &Point),
) -> Result<TransversalityReport> {
    let cw = aubin_witness(cone, cone_point.0, cone_point.1)?;
    let q = CoderivativeQuery {
        map: f,
        x: xb.clone(),
        y: yb.clone(),
        y_star: Point::zeros(f.y_dim),
        kind: ConeKind::Limiting,
    };
    let n_omega = crate::nonsmooth::frechet_normal_cone(std::slice::from_ref(omega), xb)?.cone;
    // −N(Ω, x̄) = {x* : ⟨d, x*⟩ ≤ 0 for dual generators d of N}
    let minus_n: Vec<Halfspace> = n_omega.dual_gens().iter().map(|d| Halfspace::new(d.clone(), 0.0)).collect();
    let mut fw = None;
    for s in coderivative(&q)? {
        let mut hs = s.halfspaces.clone();
        hs.extend(minus_n.iter().cloned());
        let p = Polyhedron::new(f.x_dim, hs)?;
        if let Some(w) = crate::nonsmooth::nonzero_element(&p)? {
            fw = Some(w);
            break;
        }
    }
    Ok(TransversalityReport {
        cone_condition: cw.is_none(),
        constraint_condition: fw.is_none(),
        witness: cw.or(fw),
        alliedness: "derived",
    })
}

/// D̂*K(x, y)(y*) ≠ ∅ ⇒ y* ∈ K(x)⁺. Returns `None` when the coderivative
/// is empty, otherwise whether y* ∈ K(x)⁺.
pub fn coderivative_positivity(field: &ConeField, x: &Point, y: &Point, y_star: &Point) -> Result<Option<bool>> {
    let g = PolyGraph::new(field.domain_dim(), field.cone_dim(), field.graph_pieces()?)?;
    let q = CoderivativeQuery {
        map: &g,
        x: x.clone(),
        y: y.clone(),
        y_star: y_star.clone(),
        kind: ConeKind::Frechet,
    };
    if coderivative(&q)?.is_empty() {
        return Ok(None);
    }
    let k = field.cone_at(x)?;
    Ok(Some(k.primal_gens().iter().all(|g| g.dot(y_star) >= -1e-12)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpennessRun {
    pub a: f64,
    pub rho: f64,
    pub verdict: Verdict,
    pub witness: Option<UncoveredProbe>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnessReport {
    pub transversality: TransversalityReport,
    pub injectivity: InjectivityReport,
    pub r: f64,
    pub theta: f64,
    pub runs: Vec<OpennessRun>,
}

impl HarnessReport {
    pub fn all_certified(&self) -> bool {
        self.runs.iter().all(|r| r.verdict == Verdict::Certified)
    }
}

/// Injectivity constants at or below this are treated as zero.
pub const INJ_ZERO: f64 = 1e-9;

/// Hypotheses of the directional openness result for F + K + Δ_Ω at (x̄, ȳ).
#[derive(Clone, Debug)]
pub struct OpennessHypotheses {
    pub sum: SumMap,
    pub ys: Vec<Point>,
    pub p: PolyCone,
    pub transversality: TransversalityReport,
    pub injectivity: InjectivityReport,
    pub r: f64,
}

/// Checks transversality and computes the injectivity constant and radius.
pub fn openness_hypotheses(inst: &Instance, xb: &Point, yb: &Point) -> Result<OpennessHypotheses> {
    inst.validate()?;
    let sum = SumMap::for_instance(inst)?;
    let zero = Point::zeros(inst.y_dim);
    let ys = vec![zero.clone(), yb.clone(), zero.clone()];
    let t = transversality_check(&sum.parts[1], &sum.parts[0], &inst.omega.region, xb, yb, (xb, &zero))?;
    if !t.holds() {
        return Err(Error::Hypothesis("transversality conditions fail".into()));
    }
    let eta = inst.epsilon.min(1e9);
    let p = inst.cone_field.common_cone(xb, eta, inst.norm)?.cone;
    if !p.contains_fast(inst.k.point(), TAU) {
        return Err(Error::Hypothesis("k is not in the common cone P".into()));
    }
    let inj = injectivity_constant(&sum, xb, &ys, inst.k.point(), Some(&p), 1e3, inst.norm)?;
    if !inj.converged {
        return Err(Error::Hypothesis("injectivity iteration did not converge".into()));
    }
    if !(inj.c > INJ_ZERO) {
        return Err(Error::Hypothesis("injectivity constant is zero".into()));
    }
    let r = 0.99 * locality_radius(&sum, xb, &ys)?.min(eta);
    Ok(OpennessHypotheses { sum, ys, p, transversality: t, injectivity: inj, r })
}

/// Directional openness of F + K + Δ_Ω with modulus `a` at every ρ of an
/// interior grid of (0, θ).
pub fn directional_openness_harness(inst: &Instance, xb: &Point, yb: &Point, a: f64, rho_count: usize) -> Result<HarnessReport> {
    let h = openness_hypotheses(inst, xb, yb)?;
    openness_harness(h, inst.k.point(), xb, yb, a, rho_count, inst.norm, inst.ball_coords)
}

pub(crate) fn openness_harness(
    h: OpennessHypotheses,
    u: &Point,
    xb: &Point,
    yb: &Point,
    a: f64,
    rho_count: usize,
    norm: NormChoice,
    ball_coords: Option<usize>,
) -> Result<HarnessReport> {
    let c = h.injectivity.c;
    if !(a > 0.0 && a < c) {
        return Err(Error::Precondition(format!("need 0 < a < c = {c}")));
    }
    let r = if h.r.is_finite() { h.r } else { 1e3 };
    let theta = theta_bound(r, c, a)?.bound;
    let rhos: Vec<f64> = (1..=rho_count).map(|j| theta * j as f64 / (rho_count + 1) as f64).collect();
    let y_sum = h.ys.iter().fold(Point::zeros(yb.dim()), |acc, y| &acc + y);
    let mut runs = Vec::new();
    for &rho in &rhos {
        let mut q = OpennessQuery::new(h.sum.clone(), xb.clone(), y_sum.clone(), u.clone(), a, vec![rho], norm);
        q.ball_coords = ball_coords;
        let cert = check_directional_openness(&q)?;
        runs.push(OpennessRun { a, rho, verdict: cert.verdict, witness: cert.witness });
    }
    Ok(HarnessReport {
        transversality: h.transversality,
        injectivity: h.injectivity,
        r,
        theta,
        runs,
    })
}

/// Which hypothesis groups of the necessary conditions were verified.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NcHypotheses {
    pub aubin_objective: bool,
    pub aubin_cone: bool,
    pub regime: Regime,
    pub interiority_margin: f64,
    pub nondominated: bool,
}

/// Multipliers of the necessary condition at the base point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NcBundle {
    pub radius: f64,
    pub y_star: Point,
    pub z_star: Point,
    /// x₁* ∈ D*F(x₁, y₁)(·)
    pub x1_star: Point,
    /// x₂* ∈ D*K(x₂, y₂)(y*) (K form only)
    pub x2_star: Option<Point>,
    /// x₃* ∈ N(Ω, x₃)
    pub x3_star: Point,
    /// y₁* and y₂* ∈ D̂*Q(y₂, z₂)(y*) (Q form only)
    pub y1_star: Option<Point>,
    pub y2_star: Option<Point>,
    pub residual: f64,
    pub combinations_checked: usize,
    pub hypotheses: NcHypotheses,
}

fn check_regime(inst: &Instance) -> Result<Regime> {
    let reg = regime(inst.epsilon, inst.delta).regime;
    if reg == Regime::Infeasible {
        return Err(Error::Hypothesis("constants conditions fail".into()));
    }
    Ok(reg)
}

fn objective_graph(inst: &Instance) -> Result<PolyGraph> {
    match &inst.objective {
        GraphMap::FiniteGraph(_) | GraphMap::SingleValued(_) => {
            Err(Error::Hypothesis("finite graphs never have the Aubin property at isolated points".into()))
        }
        g => Ok(g.to_poly_graph()),
    }
}

const NC_TOL: f64 = 1e-7;

/// Witness search for the necessary condition for (ε, δ, k)-nondominated
/// points with respect to K, after verifying all four hypothesis groups.
pub fn necessary_cond_k(inst: &Instance, xb: &Point, yb: &Point) -> Result<NcBundle> {
    inst.validate()?;
    if inst.vds_kind != VdsKind::K {
        return Err(Error::invalid("expected a K-type instance"));
    }
    inst.check_candidate(xb, yb)?;
    let (n, m) = (inst.x_dim, inst.y_dim);
    let f = objective_graph(inst)?;
    let kg = PolyGraph::new(n, m, inst.cone_field.graph_pieces()?)?;
    let zero = Point::zeros(m);
    let aubin_f = aubin_witness(&f, xb, yb)?.is_none();
    let aubin_k = aubin_witness(&kg, xb, &zero)?.is_none();
    if !(aubin_f && aubin_k) {
        return Err(Error::Hypothesis("Aubin conditions fail".into()));
    }
    let reg = check_regime(inst)?;
    let p = inst.cone_field.common_cone(xb, inst.epsilon.min(1e9), inst.norm)?.cone;
    let int = interiority(inst.k.point(), &p)?;
    if !int.holds {
        return Err(Error::Hypothesis("k is not interior to P".into()));
    }
    if !certify_nondominated_k(inst, xb, yb)?.is_certified() {
        return Err(Error::Hypothesis("(x̄, ȳ) is not (ε, δ, k)-nondominated".into()));
    }
    let hyp = NcHypotheses {
        aubin_objective: true,
        aubin_cone: true,
        regime: reg,
        interiority_margin: int.margin,
        nondominated: true,
    };
    let r = phi_inv(inst.delta)?;

    let bf = limiting_normal_cone(&f.pieces, &xb.concat(yb))?;
    let bk = limiting_normal_cone(&kg.pieces, &xb.concat(&zero))?;
    let no = normal_cone(std::slice::from_ref(&inst.omega.region), xb, ConeKind::Limiting)?;
    let combos = combinations(&[bf.len(), bk.len(), no.len()], BRANCH_CAP, "normal-cone branch combinations")?;
    // y* | z* | x1* | x2* | x3*
    let (zo, x1, x2, x3) = (m, 2 * m, 2 * m + n, 2 * m + 2 * n);
    let width = 2 * m + 3 * n;
    let (eq, base_le) = base_rows(m, width, inst.k.point(), Some(&p));
    let sel = sum_selector(n, &[x1, x2, x3], width);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for combo in &combos {
        let mut le = base_le.clone();
        le.extend(dual_ball_rows(inst.norm, zo, m, width, 2.0 * r, true));
        cone_rows(&bf[combo[0]], n, x1, &[(0, 1.0), (zo, -1.0)], width, &mut le);
        cone_rows(&bk[combo[1]], n, x2, &[(0, 1.0)], width, &mut le);
        omega_rows(&no[combo[2]], x3, width, &mut le);
        let q = vec![0.0; n];
        if let Some((z, v)) = (NormMin { n: width, m: &sel, q: &q, eq: &eq, le: &le }).solve(inst.norm.dual())? {
            if best.as_ref().map_or(true, |(_, b)| v < *b) {
                best = Some((z, v));
            }
            if v <= r {
                break;
            }
        }
    }
    let Some((z, v)) = best else {
        return Err(Error::numerical("no feasible multiplier branch"));
    };
    let get = |o: usize, d: usize| Point::new(z[o..o + d].to_vec());
    Ok(NcBundle {
        radius: r,
        y_star: get(0, m),
        z_star: get(zo, m),
        x1_star: get(x1, n),
        x2_star: Some(get(x2, n)),
        x3_star: get(x3, n),
        y1_star: None,
        y2_star: None,
        residual: v,
        combinations_checked: combos.len(),
        hypotheses: hyp,
    })
}

fn omega_rows(c: &PolyCone, off: usize, width: usize, rows: &mut Vec<(Vec<f64>, f64)>) {
    for d in c.dual_gens() {
        let mut r = vec![0.0; width];
        for i in 0..d.dim() {
            r[off + i] = -d[i];
        }
        rows.push((r, 0.0));
    }
}

fn in_some(cones: &[PolyCone], v: &Point) -> bool {
    cones.iter().any(|c| c.contains_fast(v, NC_TOL * (1.0 + v.norm2())))
}

/// Re-validates a K-form bundle by direct membership arithmetic.
pub fn validate_nc_k(inst: &Instance, xb: &Point, yb: &Point, b: &NcBundle) -> Result<bool> {
    let m = inst.y_dim;
    let f = objective_graph(inst)?;
    let kg = PolyGraph::new(inst.x_dim, m, inst.cone_field.graph_pieces()?)?;
    let zero = Point::zeros(m);
    let p = inst.cone_field.common_cone(xb, inst.epsilon.min(1e9), inst.norm)?.cone;
    let Some(x2) = &b.x2_star else { return Ok(false) };
    let ok_base = (b.y_star.dot(inst.k.point()) - 1.0).abs() <= NC_TOL
        && p.primal_gens().iter().all(|g| g.dot(&b.y_star) >= -NC_TOL);
    let ok_z = b.z_star.norm(inst.norm.dual()) <= 2.0 * b.radius * (1.0 + NC_TOL);
    let w = &b.y_star - &b.z_star;
    let ok_f = in_some(&limiting_normal_cone(&f.pieces, &xb.concat(yb))?, &b.x1_star.concat(&-&w));
    let ok_k = in_some(&limiting_normal_cone(&kg.pieces, &xb.concat(&zero))?, &x2.concat(&-&b.y_star));
    let ok_o = in_some(&normal_cone(std::slice::from_ref(&inst.omega.region), xb, ConeKind::Limiting)?, &b.x3_star);
    let total = &(&b.x1_star + x2) + &b.x3_star;
    let ok_r = total.norm(inst.norm.dual()) <= b.radius + NC_TOL;
    Ok(ok_base && ok_z && ok_f && ok_k && ok_o && ok_r)
}

/// Witness search for the necessary condition with respect to Q.
pub fn necessary_cond_q(inst: &Instance, xb: &Point, yb: &Point) -> Result<NcBundle> {
    inst.validate()?;
    if inst.vds_kind != VdsKind::Q {
        return Err(Error::invalid("expected a Q-type instance"));
    }
    inst.check_candidate(xb, yb)?;
    let (n, m) = (inst.x_dim, inst.y_dim);
    let f = objective_graph(inst)?;
    let qg = PolyGraph::new(m, m, inst.cone_field.graph_pieces()?)?;
    let zero = Point::zeros(m);
    let aubin_f = aubin_witness(&f, xb, yb)?.is_none();
    let aubin_q = aubin_witness(&qg, yb, &zero)?.is_none();
    if !(aubin_f && aubin_q) {
        return Err(Error::Hypothesis("Aubin conditions fail".into()));
    }
    let reg = check_regime(inst)?;
    let p = inst.cone_field.common_cone(yb, inst.epsilon.min(1e9), inst.norm)?.cone;
    let int = interiority(inst.k.point(), &p)?;
    if !int.holds {
        return Err(Error::Hypothesis("q is not interior to P".into()));
    }
    if !certify_nondominated_q(inst, xb, yb)?.is_certified() {
        return Err(Error::Hypothesis("(x̄, ȳ) is not (ε, δ, q)-nondominated".into()));
    }
    let hyp = NcHypotheses {
        aubin_objective: true,
        aubin_cone: true,
        regime: reg,
        interiority_margin: int.margin,
        nondominated: true,
    };
    let r = phi_inv(inst.delta)?;

    let bf = limiting_normal_cone(&f.pieces, &xb.concat(yb))?;
    let bq = limiting_normal_cone(&qg.pieces, &yb.concat(&zero))?;
    let no = normal_cone(std::slice::from_ref(&inst.omega.region), xb, ConeKind::Limiting)?;
    let combos = combinations(&[bf.len(), bq.len(), no.len()], BRANCH_CAP, "normal-cone branch combinations")?;
    // y* | z* | y1* | y2* | x1* | x3* | e = y1* − y2*
    let (zo, y1, y2, x1, x3, eo) = (m, 2 * m, 3 * m, 4 * m, 4 * m + n, 4 * m + 2 * n);
    let width = 5 * m + 2 * n;
    let (mut eq, base_le) = base_rows(m, width, inst.k.point(), Some(&p));
    for l in 0..m {
        let mut row = vec![0.0; width];
        row[eo + l] = 1.0;
        row[y1 + l] = -1.0;
        row[y2 + l] = 1.0;
        eq.push((row, 0.0));
    }
    let sel = sum_selector(n, &[x1, x3], width);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for combo in &combos {
        let mut le = base_le.clone();
        le.extend(dual_ball_rows(inst.norm, zo, m, width, 2.0 * r, true));
        le.extend(dual_ball_rows(inst.norm, eo, m, width, r, true));
        // (y2*, −y*) ∈ N(Gr Q): the "x" block of Q's graph is Y
        cone_rows(&bq[combo[1]], m, y2, &[(0, 1.0)], width, &mut le);
        cone_rows(&bf[combo[0]], n, x1, &[(0, 1.0), (y1, 1.0), (zo, 1.0)], width, &mut le);
        omega_rows(&no[combo[2]], x3, width, &mut le);
        let q = vec![0.0; n];
        if let Some((z, v)) = (NormMin { n: width, m: &sel, q: &q, eq: &eq, le: &le }).solve(inst.norm.dual())? {
            if best.as_ref().map_or(true, |(_, b)| v < *b) {
                best = Some((z, v));
            }
            if v <= r {
                break;
            }
        }
    }
    let Some((z, v)) = best else {
        return Err(Error::numerical("no feasible multiplier branch"));
    };
    let get = |o: usize, d: usize| Point::new(z[o..o + d].to_vec());
    Ok(NcBundle {
        radius: r,
        y_star: get(0, m),
        z_star: get(zo, m),
        x1_star: get(x1, n),
        x2_star: None,
        x3_star: get(x3, n),
        y1_star: Some(get(y1, m)),
        y2_star: Some(get(y2, m)),
        residual: v,
        combinations_checked: combos.len(),
        hypotheses: hyp,
    })
}

/// Re-validates a Q-form bundle by direct membership arithmetic.
pub fn validate_nc_q(inst: &Instance, xb: &Point, yb: &Point, b: &NcBundle) -> Result<bool> {
    let m = inst.y_dim;
    let f = objective_graph(inst)?;
    let qg = PolyGraph::new(m, m, inst.cone_field.graph_pieces()?)?;
    let zero = Point::zeros(m);
    let p = inst.cone_field.common_cone(yb, inst.epsilon.min(1e9), inst.norm)?.cone;
    let (Some(y1), Some(y2)) = (&b.y1_star, &b.y2_star) else { return Ok(false) };
    let dual = inst.norm.dual();
    let ok_base = (b.y_star.dot(inst.k.point()) - 1.0).abs() <= NC_TOL
        && p.primal_gens().iter().all(|g| g.dot(&b.y_star) >= -NC_TOL);
    let ok_z = b.z_star.norm(dual) <= 2.0 * b.radius * (1.0 + NC_TOL);
    let ok_y = (y1 - y2).norm(dual) <= b.radius * (1.0 + NC_TOL);
    let ok_q = in_some(&limiting_normal_cone(&qg.pieces, &yb.concat(&zero))?, &y2.concat(&-&b.y_star));
    let w = &(&b.y_star + y1) + &b.z_star;
    let ok_f = in_some(&limiting_normal_cone(&f.pieces, &xb.concat(yb))?, &b.x1_star.concat(&-&w));
    let ok_o = in_some(&normal_cone(std::slice::from_ref(&inst.omega.region), xb, ConeKind::Limiting)?, &b.x3_star);
    let ok_r = (&b.x1_star + &b.x3_star).norm(dual) <= b.radius + NC_TOL;
    Ok(ok_base && ok_z && ok_y && ok_q && ok_f && ok_o && ok_r)
}
