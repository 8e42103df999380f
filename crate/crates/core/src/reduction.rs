//! Lifting value-dependent structures Q: Y ⇉ Y to argument-dependent ones.
//!
//! F̃(x, y) = {y} when y ∈ F(x) and K̃(x, y) = Q(y), on X × Y. A point (x̄, ȳ)
//! is (ε, δ, k)-nondominated wrt Q exactly when ((x̄, ȳ), ȳ) is nondominated
//! wrt K̃ for balls of radius ε in X and unrestricted in Y.

use crate::error::{check_dim, Error, Result};
use crate::geometry::{Halfspace, Point, Polyhedron};
use crate::graph::{FiniteEntry, FiniteGraph, GraphMap, PolyGraph};
use crate::nonsmooth::{aubin_witness, coderivative, nonzero_element, CoderivativeQuery, ConeKind};
use crate::openness::{
    openness_harness, openness_hypotheses, transversality_check, HarnessReport, TransversalityReport,
};
use crate::solutions::{certify_nondominated_k, certify_nondominated_q, Candidate, Certificate, Instance, Omega, VdsKind};
use crate::vds::{Cell, ConeField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// A K-type instance on X × Y built from a Q-type one.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedInstance {
    pub instance: Instance,
    /// Dimension of the original X.
    pub x_dim: usize,
    /// Box standing in for Y in Ω × Y (finite graphs only).
    pub truncation: Option<Polyhedron>,
}

impl LiftedInstance {
    pub fn f_tilde(&self) -> &GraphMap {
        &self.instance.objective
    }

    pub fn k_tilde(&self) -> &ConeField {
        &self.instance.cone_field
    }

    pub fn omega_lifted(&self) -> &Omega {
        &self.instance.omega
    }
}

/// (x, y) ↦ the lifted argument; the lifted value is y itself.
pub fn lift_point(x: &Point, y: &Point) -> (Point, Point) {
    (x.concat(y), y.clone())
}

/// Gr F̃ = {((x, y), y) : (x, y) ∈ Gr F}.
pub fn lift_graph(f: &PolyGraph) -> PolyGraph {
    let (n, m) = (f.x_dim, f.y_dim);
    let pieces = f
        .pieces
        .iter()
        .map(|p| {
            let mut hs = p.product(&Polyhedron::whole(m)).halfspaces;
            for i in 0..m {
                let mut e = vec![0.0; n + 2 * m];
                e[n + i] = 1.0;
                e[n + m + i] = -1.0;
                hs.push(Halfspace::new(e.clone(), 0.0));
                hs.push(Halfspace::new(e.iter().map(|v| -v).collect::<Vec<_>>(), 0.0));
            }
            Polyhedron { dim: n + 2 * m, halfspaces: hs }
        })
        .collect();
    PolyGraph {
        x_dim: n + m,
        y_dim: m,
        pieces,
    }
}

/// Gr K̃ = {((x, y), z) : (y, z) ∈ Gr Q}.
pub fn lift_cone_graph(q: &PolyGraph, x_dim: usize) -> PolyGraph {
    PolyGraph {
        x_dim: x_dim + q.x_dim,
        y_dim: q.y_dim,
        pieces: q.pieces.iter().map(|p| Polyhedron::whole(x_dim).product(p)).collect(),
    }
}

/// K̃(x, y) = Q(y) as a cone field on X × Y.
pub fn lift_field(q: &ConeField, x_dim: usize) -> Result<ConeField> {
    let cells = q
        .cells()
        .iter()
        .map(|c| Cell {
            region: Polyhedron::whole(x_dim).product(&c.region),
            cone: c.cone.clone(),
        })
        .collect();
    ConeField::new(x_dim + q.domain_dim(), q.cone_dim(), cells, q.default_cone().cloned())
}

/// Y-box holding every listed value with margin 2 × (data diameter).
fn truncation_box(values: &[&Point], m: usize) -> Polyhedron {
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for v in values {
        for i in 0..m {
            lo[i] = lo[i].min(v[i]);
            hi[i] = hi[i].max(v[i]);
        }
    }
    let diam = (0..m).map(|i| hi[i] - lo[i]).fold(0.0, f64::max).max(1.0);
    let margin = 2.0 * diam;
    Polyhedron::boxed(
        &Point::new(lo.iter().map(|v| v - margin).collect()),
        &Point::new(hi.iter().map(|v| v + margin).collect()),
    )
}

/// Lifts a Q-type instance. Finite graphs get Ω × (box); polyhedral ones Ω × Y.
pub fn lift(inst: &Instance) -> Result<LiftedInstance> {
    inst.validate()?;
    if inst.vds_kind != VdsKind::Q {
        return Err(Error::invalid("only Q-type instances are lifted"));
    }
    let (n, m) = (inst.x_dim, inst.y_dim);
    let (objective, truncation) = match inst.objective.as_finite() {
        Some(g) => {
            let mut entries = Vec::new();
            for e in &g.entries {
                for y in &e.values {
                    entries.push(FiniteEntry {
                        x: e.x.concat(y),
                        values: vec![y.clone()],
                    });
                }
            }
            let mut vals: Vec<&Point> = g.entries.iter().flat_map(|e| e.values.iter()).collect();
            if let Some(c) = &inst.candidate {
                vals.push(&c.y);
            }
            let bx = truncation_box(&vals, m);
            (GraphMap::SingleValued(FiniteGraph::new(n + m, m, entries)?), Some(bx))
        }
        None => (GraphMap::PolyGraph(lift_graph(&inst.objective.to_poly_graph())), None),
    };
    let y_part = truncation.clone().unwrap_or_else(|| Polyhedron::whole(m));
    let grid = inst.omega.grid.as_ref().map(|_| {
        objective
            .as_finite()
            .map(|g| {
                g.entries
                    .iter()
                    .filter(|e| inst.omega.contains(&Point::new(e.x.coords()[..n].to_vec()), inst.tau()))
                    .map(|e| e.x.clone())
                    .collect()
            })
            .unwrap_or_default()
    });
    if grid.is_some() && objective.as_finite().is_none() {
        return Err(Error::invalid("gridded Ω needs a finite graph to lift"));
    }
    let omega = Omega {
        region: inst.omega.region.product(&y_part),
        grid,
    };
    let instance = Instance {
        x_dim: n + m,
        y_dim: m,
        norm: inst.norm,
        omega,
        objective,
        vds_kind: VdsKind::K,
        cone_field: lift_field(&inst.cone_field, n)?,
        k: inst.k.clone(),
        epsilon: inst.epsilon,
        delta: inst.delta,
        tolerances: inst.tolerances,
        candidate: inst.candidate.as_ref().map(|c| {
            let (x, y) = lift_point(&c.x, &c.y);
            Candidate { x, y }
        }),
        ball_coords: Some(inst.ball_coords.unwrap_or(n)),
    };
    instance.validate()?;
    Ok(LiftedInstance {
        instance,
        x_dim: n,
        truncation,
    })
}

/// Errors if a lifted witness touches the truncation boundary.
pub fn check_truncation(lifted: &LiftedInstance, cert: &Certificate) -> Result<()> {
    let (Some(bx), Some(w)) = (&lifted.truncation, &cert.witness) else {
        return Ok(());
    };
    let y = Point::new(w.x.coords()[lifted.x_dim..].to_vec());
    let slack = bx.halfspaces.iter().map(|h| h.offset - h.normal.dot(&y)).fold(f64::INFINITY, f64::min);
    if slack <= lifted.instance.tau() {
        return Err(Error::Precondition(format!("witness {y} lies on the truncation boundary; enlarge the box")));
    }
    Ok(())
}

/// Both verdicts for the same candidate, before and after lifting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub original: Certificate,
    pub lifted: Certificate,
}

impl EquivalenceReport {
    pub fn agree(&self) -> bool {
        self.original.verdict == self.lifted.verdict
    }
}

/// Certifies (x̄, ȳ) wrt Q and ((x̄, ȳ), ȳ) wrt K̃ on the lifted instance.
pub fn verdict_equivalence(inst: &Instance, xb: &Point, yb: &Point) -> Result<EquivalenceReport> {
    let lifted = lift(inst)?;
    let original = certify_nondominated_q(inst, xb, yb)?;
    let (lx, ly) = lift_point(xb, yb);
    let lc = certify_nondominated_k(&lifted.instance, &lx, &ly)?;
    check_truncation(&lifted, &lc)?;
    Ok(EquivalenceReport { original, lifted: lc })
}

/// One dual probe (x*, y*, z*).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualProbe {
    pub x_star: Point,
    pub y_star: Point,
    pub z_star: Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LiftedMap {
    Objective,
    Cone,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityMismatch {
    pub probe: usize,
    pub map: LiftedMap,
    pub kind: ConeKind,
    pub lifted_side: bool,
    pub original_side: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub probes_checked: usize,
    /// Probes that lie in the lifted coderivatives (per map and kind).
    pub members: usize,
    pub mismatches: Vec<IdentityMismatch>,
}

impl IdentityReport {
    pub fn agree(&self) -> bool {
        self.mismatches.is_empty()
    }
}

const MEMBER_TOL: f64 = 1e-9;

fn in_union(sets: &[Polyhedron], p: &Point) -> bool {
    sets.iter().any(|s| s.contains(p, MEMBER_TOL))
}

/// Compares membership in the coderivatives of F̃ and K̃, computed from the
/// lifted graphs, with the characterizations
/// (x*, y*) ∈ D*F̃((x, y), y)(z*) ⇔ x* ∈ D*F(x, y)(z* − y*) and
/// (x*, y*) ∈ D*K̃((x, y), z)(z*) ⇔ x* = 0, y* ∈ D*Q(y, z)(z*),
/// for both Fréchet and limiting coderivatives.
pub fn coderivative_identities_check(
    f: &PolyGraph,
    q: &PolyGraph,
    f_point: (&Point, &Point),
    q_point: (&Point, &Point),
    probes: &[DualProbe],
) -> Result<IdentityReport> {
    let (n, m) = (f.x_dim, f.y_dim);
    check_dim(m, q.x_dim)?;
    check_dim(m, q.y_dim)?;
    let ft = lift_graph(f);
    let kt = lift_cone_graph(q, n);
    let (x, y) = f_point;
    let (qy, qz) = q_point;
    let mut report = IdentityReport {
        probes_checked: 0,
        members: 0,
        mismatches: Vec::new(),
    };
    for (i, pr) in probes.iter().enumerate() {
        check_dim(n, pr.x_star.dim())?;
        check_dim(m, pr.y_star.dim())?;
        check_dim(m, pr.z_star.dim())?;
        let xy_star = pr.x_star.concat(&pr.y_star);
        for kind in [ConeKind::Frechet, ConeKind::Limiting] {
            let lhs = in_union(
                &coderivative(&CoderivativeQuery {
                    map: &ft,
                    x: x.concat(y),
                    y: y.clone(),
                    y_star: pr.z_star.clone(),
                    kind,
                })?,
                &xy_star,
            );
            let rhs = in_union(
                &coderivative(&CoderivativeQuery {
                    map: f,
                    x: x.clone(),
                    y: y.clone(),
                    y_star: &pr.z_star - &pr.y_star,
                    kind,
                })?,
                &pr.x_star,
            );
            report.record(i, LiftedMap::Objective, kind, lhs, rhs);

            let lhs = in_union(
                &coderivative(&CoderivativeQuery {
                    map: &kt,
                    x: x.concat(qy),
                    y: qz.clone(),
                    y_star: pr.z_star.clone(),
                    kind,
                })?,
                &xy_star,
            );
            let rhs = pr.x_star.is_zero(MEMBER_TOL)
                && in_union(
                    &coderivative(&CoderivativeQuery {
                        map: q,
                        x: qy.clone(),
                        y: qz.clone(),
                        y_star: pr.z_star.clone(),
                        kind,
                    })?,
                    &pr.y_star,
                );
            report.record(i, LiftedMap::Cone, kind, lhs, rhs);
        }
        report.probes_checked += 1;
    }
    Ok(report)
}

impl IdentityReport {
    fn record(&mut self, probe: usize, map: LiftedMap, kind: ConeKind, lifted_side: bool, original_side: bool) {
        if lifted_side {
            self.members += 1;
        }
        if lifted_side != original_side {
            self.mismatches.push(IdentityMismatch {
                probe,
                map,
                kind,
                lifted_side,
                original_side,
            });
        }
    }
}

fn small_int_point(rng: &mut ChaCha8Rng, dim: usize) -> Point {
    Point::new((0..dim).map(|_| rng.gen_range(-2i32..=2) as f64).collect())
}

/// Seeded probes: a third random integer vectors, a third built from
/// elements of D*F(x, y)(z* − y*), a third from x* = 0, y* ∈ D*Q(y, z)(z*).
pub fn sample_probes(
    f: &PolyGraph,
    q: &PolyGraph,
    f_point: (&Point, &Point),
    q_point: (&Point, &Point),
    count: usize,
    seed: u64,
) -> Result<Vec<DualProbe>> {
    let (n, m) = (f.x_dim, f.y_dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let y_star = small_int_point(&mut rng, m);
        let z_star = small_int_point(&mut rng, m);
        let random = DualProbe {
            x_star: small_int_point(&mut rng, n),
            y_star: y_star.clone(),
            z_star: z_star.clone(),
        };
        let probe = match i % 3 {
            1 => {
                let sets = coderivative(&CoderivativeQuery {
                    map: f,
                    x: f_point.0.clone(),
                    y: f_point.1.clone(),
                    y_star: &z_star - &y_star,
                    kind: ConeKind::Limiting,
                })?;
                match pick(&sets, &mut rng)? {
                    Some(x_star) => DualProbe { x_star, y_star, z_star },
                    None => random,
                }
            }
            2 => {
                let sets = coderivative(&CoderivativeQuery {
                    map: q,
                    x: q_point.0.clone(),
                    y: q_point.1.clone(),
                    y_star: z_star.clone(),
                    kind: ConeKind::Limiting,
                })?;
                match pick(&sets, &mut rng)? {
                    Some(y_star) => DualProbe {
                        x_star: Point::zeros(n),
                        y_star,
                        z_star,
                    },
                    None => random,
                }
            }
            _ => random,
        };
        out.push(probe);
    }
    Ok(out)
}

fn pick(sets: &[Polyhedron], rng: &mut ChaCha8Rng) -> Result<Option<Point>> {
    if sets.is_empty() {
        return Ok(None);
    }
    let s = &sets[rng.gen_range(0..sets.len())];
    if rng.gen_bool(0.5) {
        if let Some(p) = nonzero_element(s)? {
            return Ok(Some(p));
        }
    }
    s.feasible_point()
}

/// The two transversality conditions for the lifted sets:
/// D*Q(ȳ, 0)(0) = {0} and D*F(x̄, ȳ)(0) ∩ (−N(Ω, x̄)) = {0}. When both hold
/// the lifted sets are allied (recorded as derived).
pub fn lifted_sets_alliedness_bridge(
    f: &PolyGraph,
    q: &PolyGraph,
    omega: &Polyhedron,
    xb: &Point,
    yb: &Point,
) -> Result<TransversalityReport> {
    let zero = Point::zeros(q.y_dim);
    transversality_check(f, q, omega, xb, yb, (yb, &zero))
}

/// A nonzero (x*, y*) ∈ D*F̃((x̄, ȳ), ȳ)(0), i.e. a certificate that F̃ lacks
/// the Aubin property there, or `None` if the coderivative test passes.
pub fn lifted_f_aubin_witness(lifted: &LiftedInstance, xb: &Point, yb: &Point) -> Result<Option<Point>> {
    let g = lifted.instance.objective.to_poly_graph();
    let (lx, ly) = lift_point(xb, yb);
    aubin_witness(&g, &lx, &ly)
}

/// Directional openness of H(x, y) = {y} + Q(y) (y ∈ F(x), x ∈ Ω) at
/// ((x̄, ȳ), ȳ) in direction k, over the full ball of X × Y.
pub fn lifted_openness_harness(inst: &Instance, xb: &Point, yb: &Point, a: f64, rho_count: usize) -> Result<HarnessReport> {
    if inst.objective.as_finite().is_some() {
        return Err(Error::Hypothesis("lifted finite graphs have no transversality".into()));
    }
    let mut lifted = lift(inst)?.instance;
    lifted.ball_coords = None;
    let (lx, ly) = lift_point(xb, yb);
    let h = openness_hypotheses(&lifted, &lx, &ly)?;
    openness_harness(h, inst.k.point(), &lx, &ly, a, rho_count, inst.norm, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Direction, NormChoice, PolyCone};
    use crate::openness::SumMap;
    use crate::solutions::Tolerances;
    use proptest::prelude::{prop_assert, proptest, ProptestConfig};

    fn p1(v: f64) -> Point {
        Point::from([v])
    }

    fn q_instance(objective: GraphMap, field: ConeField, eps: f64, delta: f64) -> Instance {
        let s = 0.5f64.sqrt();
        let x_dim = objective.x_dim();
        Instance {
            x_dim,
            y_dim: 2,
            norm: NormChoice::Euclidean,
            omega: Omega::whole(x_dim),
            objective,
            vds_kind: VdsKind::Q,
            cone_field: field,
            k: Direction::new(Point::from([s, s])).unwrap(),
            epsilon: eps,
            delta,
            tolerances: Tolerances::default(),
            candidate: None,
            ball_coords: None,
        }
    }

    fn finite(entries: &[(f64, [f64; 2])]) -> GraphMap {
        GraphMap::FiniteGraph(
            FiniteGraph::new(
                1,
                2,
                entries
                    .iter()
                    .map(|(x, y)| FiniteEntry { x: p1(*x), values: vec![Point::from(*y)] })
                    .collect(),
            )
            .unwrap(),
        )
    }

    fn orthant_q() -> ConeField {
        ConeField::constant(2, PolyCone::orthant(2)).unwrap()
    }

    /// Q(y) = ℝ²₊ for y₁ ≤ 0.1, the wider cone cone{(1,0),(−1,1)} for y₁ ≥ 0.2.
    fn two_cell_q() -> ConeField {
        let wide = PolyCone::from_generators(2, vec![Point::from([1.0, 0.0]), Point::from([-1.0, 1.0])]).unwrap();
        ConeField::new(
            2,
            2,
            vec![
                Cell { region: Polyhedron::new(2, vec![Halfspace::new(vec![1.0, 0.0], 0.1)]).unwrap(), cone: PolyCone::orthant(2) },
                Cell { region: Polyhedron::new(2, vec![Halfspace::new(vec![-1.0, 0.0], -0.2)]).unwrap(), cone: wide },
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn lift_is_a_graph_bijection() {
        let g = GraphMap::FiniteGraph(
            FiniteGraph::new(
                1,
                2,
                vec![
                    FiniteEntry { x: p1(0.0), values: vec![Point::from([0.0, 0.0]), Point::from([1.0, -1.0])] },
                    FiniteEntry { x: p1(1.0), values: vec![Point::from([2.0, 0.5])] },
                ],
            )
            .unwrap(),
        );
        let l = lift(&q_instance(g, orthant_q(), 1.0, 0.1)).unwrap();
        let fg = l.f_tilde().as_finite().unwrap();
        assert_eq!(fg.entries.len(), 3);
        for e in &fg.entries {
            assert_eq!(e.values.len(), 1);
            assert!(Point::new(e.x.coords()[1..].to_vec()).approx_eq(&e.values[0], 0.0));
        }
        let bx = l.truncation.as_ref().unwrap();
        assert!(bx.contains(&Point::from([2.0, 0.5]), 0.0));
        assert_eq!(l.instance.ball_coords, Some(1));
    }

    #[test]
    fn single_point_lifts_to_single_point() {
        let inst = q_instance(finite(&[(0.0, [1.0, 1.0])]), orthant_q(), 1.0, 0.1);
        let l = lift(&inst).unwrap();
        assert_eq!(l.f_tilde().as_finite().unwrap().entries.len(), 1);
        let r = verdict_equivalence(&inst, &p1(0.0), &Point::from([1.0, 1.0])).unwrap();
        assert!(r.agree() && r.original.is_certified());
    }

    #[test]
    fn lifted_field_reads_the_value() {
        let k = lift_field(&two_cell_q(), 1).unwrap();
        let c = k.cone_at(&Point::from([7.0, 0.5, 0.0])).unwrap();
        assert!(c.contains_fast(&Point::from([-1.0, 1.0]), 1e-12));
        let c = k.cone_at(&Point::from([7.0, -0.5, 0.0])).unwrap();
        assert!(!c.contains_fast(&Point::from([-1.0, 1.0]), 1e-12));
    }

    #[test]
    fn constructed_refutation_survives_the_lift() {
        let s = 0.5f64.sqrt();
        let yb = [0.2 + 0.1 * s, 0.3 + 0.1 * s];
        let inst = q_instance(finite(&[(0.0, yb), (0.5, [0.0, 0.0])]), orthant_q(), 1.0, 0.1);
        let r = verdict_equivalence(&inst, &p1(0.0), &Point::from(yb)).unwrap();
        assert!(r.agree());
        assert!(!r.original.is_certified());
        let w = r.lifted.witness.unwrap();
        assert!(w.x.approx_eq(&Point::from([0.5, 0.0, 0.0]), 1e-12));
    }

    fn random_q_instance(seed: u64) -> (Instance, Point, Point) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<(f64, [f64; 2])> = (0..5)
            .map(|i| (i as f64 * 0.25, [rng.gen_range(-4..=4) as f64 * 0.25, rng.gen_range(-4..=4) as f64 * 0.25]))
            .collect();
        let field = if rng.gen_bool(0.5) { orthant_q() } else { two_cell_q() };
        let inst = q_instance(finite(&entries), field, rng.gen_range(0.3..1.2), rng.gen_range(0.0..0.3));
        let j = rng.gen_range(0..5);
        (inst, p1(entries[j].0), Point::from(entries[j].1))
    }

    #[test]
    fn five_point_instances_agree() {
        for seed in 0..40 {
            let (inst, xb, yb) = random_q_instance(seed);
            assert!(verdict_equivalence(&inst, &xb, &yb).unwrap().agree(), "seed {seed}");
        }
    }

    fn affine_f() -> PolyGraph {
        // F(x) = (x, −x) on ℝ
        crate::graph::PaMap::affine(vec![vec![1.0], vec![-1.0]], Point::zeros(2)).unwrap().to_poly_graph()
    }

    fn orthant_graph() -> PolyGraph {
        PolyGraph::new(2, 2, orthant_q().graph_pieces().unwrap()).unwrap()
    }

    #[test]
    fn identities_for_affine_f_and_constant_q() {
        let f = affine_f();
        let q = orthant_graph();
        let (x, y) = (p1(0.3), Point::from([0.3, -0.3]));
        let (qy, qz) = (Point::from([0.0, 0.0]), Point::from([0.0, 0.0]));
        // D*F(w) = {w₁ − w₂}; D*Q(0,0)(z*) = {y*: y* = 0 and z* ∈ ... } slices
        let probes = vec![
            DualProbe { x_star: p1(2.0), y_star: Point::from([0.0, 1.0]), z_star: Point::from([1.0, 0.0]) },
            DualProbe { x_star: p1(0.0), y_star: Point::from([0.0, 0.0]), z_star: Point::from([0.0, 0.0]) },
            DualProbe { x_star: p1(1.0), y_star: Point::from([0.0, 0.0]), z_star: Point::from([1.0, 0.0]) },
            DualProbe { x_star: p1(0.5), y_star: Point::from([1.0, 0.0]), z_star: Point::from([1.0, 0.0]) },
        ];
        let r = coderivative_identities_check(&f, &q, (&x, &y), (&qy, &qz), &probes).unwrap();
        assert!(r.agree(), "{:?}", r.mismatches);
        assert_eq!(r.probes_checked, 4);
        // probe 0: z* − y* = (1, −1), D*F = {2}: member of the objective identity
        assert!(r.members >= 2);
    }

    #[test]
    fn zero_probe_reduces_to_zero_slices() {
        let f = affine_f();
        let q = orthant_graph();
        let z = Point::zeros(2);
        let probes = vec![DualProbe { x_star: p1(0.0), y_star: z.clone(), z_star: z.clone() }];
        let r = coderivative_identities_check(&f, &q, (&p1(0.0), &z), (&z, &z), &probes).unwrap();
        assert!(r.agree());
        // 0 lies in every coderivative at 0: both maps, both kinds
        assert_eq!(r.members, 4);
    }

    #[test]
    fn sampled_probes_agree_on_kinked_graphs() {
        // F(x) = {(|x|, 0)} around the kink
        let up = Polyhedron::new(3, vec![
            Halfspace::new(vec![-1.0, 0.0, 0.0], 0.0),
            Halfspace::new(vec![-1.0, 1.0, 0.0], 0.0),
            Halfspace::new(vec![1.0, -1.0, 0.0], 0.0),
            Halfspace::new(vec![0.0, 0.0, 1.0], 0.0),
            Halfspace::new(vec![0.0, 0.0, -1.0], 0.0),
        ])
        .unwrap();
        let down = Polyhedron::new(3, vec![
            Halfspace::new(vec![1.0, 0.0, 0.0], 0.0),
            Halfspace::new(vec![1.0, 1.0, 0.0], 0.0),
            Halfspace::new(vec![-1.0, -1.0, 0.0], 0.0),
            Halfspace::new(vec![0.0, 0.0, 1.0], 0.0),
            Halfspace::new(vec![0.0, 0.0, -1.0], 0.0),
        ])
        .unwrap();
        let f = PolyGraph::new(1, 2, vec![up, down]).unwrap();
        let q = PolyGraph::new(2, 2, two_cell_q().graph_pieces().unwrap()).unwrap();
        let z = Point::zeros(2);
        let probes = sample_probes(&f, &q, (&p1(0.0), &z), (&z, &z), 30, 7).unwrap();
        let r = coderivative_identities_check(&f, &q, (&p1(0.0), &z), (&z, &z), &probes).unwrap();
        assert!(r.agree(), "{:?}", r.mismatches);
        assert!(r.members > 10);
    }

    #[test]
    fn alliedness_bridge_cases() {
        let f = affine_f();
        let q = orthant_graph();
        let z = Point::zeros(2);
        let r = lifted_sets_alliedness_bridge(&f, &q, &Polyhedron::whole(1), &p1(0.0), &z).unwrap();
        assert!(r.holds());
        assert_eq!(r.alliedness, "derived");

        // Q(y) = {0} for y₂ < 0 glued to ℝ²₊ on y₂ ≥ 0: not closed at 0 as a
        // field, so build the graph directly with a vertical piece.
        let vertical = PolyGraph::new(
            2,
            2,
            vec![Polyhedron::new(4, vec![
                Halfspace::new(vec![1.0, 0.0, 0.0, 0.0], 0.0),
                Halfspace::new(vec![-1.0, 0.0, 0.0, 0.0], 0.0),
                Halfspace::new(vec![0.0, 0.0, -1.0, 0.0], 0.0),
                Halfspace::new(vec![0.0, 0.0, 0.0, -1.0], 0.0),
            ])
            .unwrap()],
        )
        .unwrap();
        let r = lifted_sets_alliedness_bridge(&f, &vertical, &Polyhedron::whole(1), &p1(0.0), &z).unwrap();
        assert!(!r.cone_condition);
        assert!(r.witness.is_some());
    }

    #[test]
    fn alliedness_fails_on_vertical_f_against_halfspace() {
        // Gr F = {0} × ℝ × {0}: D*F(0) = ℝ, Ω = ℝ₊ with N(Ω, 0) = −ℝ₊
        let f = PolyGraph::new(1, 2, vec![Polyhedron::new(3, vec![
            Halfspace::new(vec![1.0, 0.0, 0.0], 0.0),
            Halfspace::new(vec![-1.0, 0.0, 0.0], 0.0),
            Halfspace::new(vec![0.0, 0.0, 1.0], 0.0),
            Halfspace::new(vec![0.0, 0.0, -1.0], 0.0),
        ])
        .unwrap()])
        .unwrap();
        let omega = Polyhedron::new(1, vec![Halfspace::new(vec![-1.0], 0.0)]).unwrap();
        let z = Point::zeros(2);
        let r = lifted_sets_alliedness_bridge(&f, &orthant_graph(), &omega, &p1(0.0), &z).unwrap();
        assert!(r.cone_condition);
        assert!(!r.constraint_condition);
    }

    #[test]
    fn lifted_objective_never_has_aubin() {
        for seed in 0..10 {
            let (inst, xb, yb) = random_q_instance(seed);
            let l = lift(&inst).unwrap();
            assert!(lifted_f_aubin_witness(&l, &xb, &yb).unwrap().is_some());
        }
        let mut inst = q_instance(GraphMap::PolyGraph(affine_f()), orthant_q(), 1.0, 0.1);
        inst.omega = Omega::whole(1);
        let l = lift(&inst).unwrap();
        assert!(l.truncation.is_none());
        let w = lifted_f_aubin_witness(&l, &p1(0.0), &Point::zeros(2)).unwrap().unwrap();
        // (x*, y*) with x* = −Aᵀy*
        assert!((w[0] + (w[1] - w[2])).abs() < 1e-9);
    }

    #[test]
    fn sum_map_on_lift_is_y_plus_q() {
        let mut inst = q_instance(GraphMap::PolyGraph(affine_f()), orthant_q(), 1.0, 0.1);
        inst.omega = Omega { region: Polyhedron::boxed(&p1(-1.0), &p1(1.0)), grid: None };
        let l = lift(&inst).unwrap();
        let h = SumMap::for_instance(&l.instance).unwrap();
        let xy = Point::from([0.5, 0.5, -0.5]);
        assert!(h.contains(&xy, &Point::from([0.7, -0.5])).unwrap());
        assert!(!h.contains(&xy, &Point::from([0.4, -0.5])).unwrap());
        // y ∉ F(x)
        assert!(!h.contains(&Point::from([0.5, 0.4, -0.5]), &Point::from([1.0, 0.0])).unwrap());
        // x ∉ Ω
        assert!(!h.contains(&Point::from([2.0, 2.0, -2.0]), &Point::from([3.0, -2.0])).unwrap());
    }

    #[test]
    fn lifted_harness_detects_a_degenerate_direction() {
        // F(x) = (x, −x) never reaches ȳ − t(1, 1)/√2 + ℝ²₊
        let inst = q_instance(GraphMap::PolyGraph(affine_f()), orthant_q(), 1.0, 0.1);
        let e = lifted_openness_harness(&inst, &p1(0.0), &Point::zeros(2), 0.1, 3).unwrap_err();
        assert!(e.is_hypothesis_failure());
    }

    #[test]
    fn lifted_harness_certifies_openness() {
        let diag = crate::graph::PaMap::affine(vec![vec![1.0], vec![1.0]], Point::zeros(2)).unwrap().to_poly_graph();
        let mut inst = q_instance(GraphMap::PolyGraph(diag), orthant_q(), 1.0, 0.1);
        inst.omega = Omega::whole(1);
        let rep = lifted_openness_harness(&inst, &p1(0.0), &Point::zeros(2), 0.1, 3).unwrap();
        assert!(rep.injectivity.c > 0.1);
        assert!(rep.all_certified());
    }

    #[test]
    fn finite_objectives_are_rejected_by_the_harness() {
        let inst = q_instance(finite(&[(0.0, [0.0, 0.0])]), orthant_q(), 1.0, 0.1);
        let e = lifted_openness_harness(&inst, &p1(0.0), &Point::zeros(2), 0.1, 3).unwrap_err();
        assert!(e.is_hypothesis_failure());
    }

    #[test]
    fn k_instances_are_not_lifted() {
        let mut inst = q_instance(finite(&[(0.0, [0.0, 0.0])]), ConeField::constant(1, PolyCone::orthant(2)).unwrap(), 1.0, 0.1);
        inst.vds_kind = VdsKind::K;
        assert!(lift(&inst).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn lift_preserves_verdicts(seed in 0u64..10_000) {
            let (inst, xb, yb) = random_q_instance(seed);
            prop_assert!(verdict_equivalence(&inst, &xb, &yb).unwrap().agree());
        }

        #[test]
        fn sampled_identities_hold(seed in 0u64..10_000) {
            let f = affine_f();
            let q = PolyGraph::new(2, 2, two_cell_q().graph_pieces().unwrap()).unwrap();
            let z = Point::zeros(2);
            let (x, y) = (p1(0.25), Point::from([0.25, -0.25]));
            let probes = sample_probes(&f, &q, (&x, &y), (&z, &z), 6, seed).unwrap();
            let r = coderivative_identities_check(&f, &q, (&x, &y), (&z, &z), &probes).unwrap();
            prop_assert!(r.agree());
        }
    }
}
