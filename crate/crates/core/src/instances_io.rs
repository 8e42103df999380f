//! Instance files and seeded instance generators.
//!
//! Files are JSON with an explicit `schema_version`; unknown fields are
//! rejected and `epsilon` may be the string `"inf"`.

use crate::error::{Error, Result};
use crate::geometry::{Direction, Halfspace, NormChoice, Point, PolyCone, Polyhedron};
use crate::graph::{AffinePiece, FiniteEntry, FiniteGraph, GraphMap, PaMap};
use crate::constants::{regime, Regime};
use crate::solutions::{certify_nondominated_k, Candidate, Instance, Omega, Tolerances, VdsKind};
use crate::vds::{Cell, ConeField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

pub const SCHEMA_VERSION: u32 = 1;

/// Rejection-sampling budget of the generators.
pub const MAX_ATTEMPTS: usize = 1000;

/// A real number or `"inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum ExtNumber {
    Finite(f64),
    Word(String),
}

impl ExtNumber {
    fn from_f64(v: f64) -> ExtNumber {
        if v == f64::INFINITY {
            ExtNumber::Word("inf".into())
        } else {
            ExtNumber::Finite(v)
        }
    }

    fn to_f64(&self) -> Result<f64> {
        match self {
            ExtNumber::Finite(v) => Ok(*v),
            ExtNumber::Word(w) if w == "inf" || w == "+inf" => Ok(f64::INFINITY),
            ExtNumber::Word(w) => Err(Error::Schema(format!("expected a number or \"inf\", found {w:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VdsSpec {
    pub kind: VdsKind,
    pub field: ConeField,
}

/// Where a generated instance came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub seed: u64,
    pub profile: String,
}

/// The on-disk layout of an [`Instance`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub x_dim: usize,
    pub y_dim: usize,
    pub norm: NormChoice,
    pub omega: Omega,
    pub objective: GraphMap,
    pub vds: VdsSpec,
    pub k: Point,
    epsilon: ExtNumber,
    pub delta: f64,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<Candidate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball_coords: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance, provenance: Option<Provenance>) -> Self {
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            x_dim: inst.x_dim,
            y_dim: inst.y_dim,
            norm: inst.norm,
            omega: inst.omega.clone(),
            objective: inst.objective.clone(),
            vds: VdsSpec {
                kind: inst.vds_kind,
                field: inst.cone_field.clone(),
            },
            k: inst.k.point().clone(),
            epsilon: ExtNumber::from_f64(inst.epsilon),
            delta: inst.delta,
            tolerances: inst.tolerances,
            candidate: inst.candidate.clone(),
            ball_coords: inst.ball_coords,
            provenance,
        }
    }

    pub fn into_instance(self) -> Result<Instance> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let k = Direction::new_in(self.k, self.norm).map_err(|e| Error::Schema(format!("k: {e}")))?;
        let inst = Instance {
            x_dim: self.x_dim,
            y_dim: self.y_dim,
            norm: self.norm,
            omega: self.omega,
            objective: self.objective,
            vds_kind: self.vds.kind,
            cone_field: self.vds.field,
            k,
            epsilon: self.epsilon.to_f64()?,
            delta: self.delta,
            tolerances: self.tolerances,
            candidate: self.candidate,
            ball_coords: self.ball_coords,
        };
        inst.validate().map_err(|e| Error::Schema(e.to_string()))?;
        Ok(inst)
    }
}

/// Parses and validates an instance from JSON text.
pub fn from_json(text: &str) -> Result<(Instance, Option<Provenance>)> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let prov = file.provenance.clone();
    Ok((file.into_instance()?, prov))
}

/// Pretty JSON with a trailing newline.
pub fn to_json(inst: &Instance, provenance: Option<Provenance>) -> Result<String> {
    let file = InstanceFile::from_instance(inst, provenance);
    let mut s = serde_json::to_string_pretty(&file).map_err(|e| Error::Schema(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn load(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    from_json(&text)
        .map(|(i, _)| i)
        .map_err(|e| match e {
            Error::Schema(m) => Error::Schema(format!("{}: {m}", path.display())),
            e => e,
        })
}

pub fn save(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    save_with(inst, None, path)
}

pub fn save_with(inst: &Instance, provenance: Option<Provenance>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_json(inst, provenance)?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Generator families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// Single-valued map on a 1-D grid, piecewise-constant K, candidate
    /// certified nondominated; the scalarization condition always holds.
    Grid1d,
    /// As `Grid1d` on a 2-D grid.
    Grid2d,
    /// Continuous two-piece affine map on a box of ℝ², constant K, candidate
    /// certified nondominated, constants regime as requested.
    Polyhedral2d(Regime),
    /// Q-type finite instance for the lifting device.
    Lifted,
}

impl FromStr for Profile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid1d" => Ok(Profile::Grid1d),
            "grid2d" => Ok(Profile::Grid2d),
            "polyhedral2d" | "polyhedral2d-bi" => Ok(Profile::Polyhedral2d(Regime::BI)),
            "polyhedral2d-bii" => Ok(Profile::Polyhedral2d(Regime::BII)),
            "lifted" => Ok(Profile::Lifted),
            _ => Err(Error::invalid(format!(
                "unknown profile {s:?} (grid1d, grid2d, polyhedral2d, polyhedral2d-bii, lifted)"
            ))),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Grid1d => "grid1d",
            Profile::Grid2d => "grid2d",
            Profile::Polyhedral2d(Regime::BII) => "polyhedral2d-bii",
            Profile::Polyhedral2d(_) => "polyhedral2d",
            Profile::Lifted => "lifted",
        })
    }
}

/// Deterministic instance for `(seed, profile)`.
pub fn generate(seed: u64, profile: Profile) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let attempt = match profile {
            Profile::Grid1d => grid_instance(&mut rng, 1)?,
            Profile::Grid2d => grid_instance(&mut rng, 2)?,
            Profile::Polyhedral2d(r) => polyhedral_instance(&mut rng, r)?,
            Profile::Lifted => lifted_instance(&mut rng)?,
        };
        if let Some(inst) = attempt {
            return Ok(inst);
        }
    }
    Err(Error::Precondition(format!(
        "profile {profile} found no admissible instance in {MAX_ATTEMPTS} attempts"
    )))
}

/// A generated instance together with its file provenance.
pub fn generate_file(seed: u64, profile: Profile) -> Result<String> {
    let inst = generate(seed, profile)?;
    to_json(&inst, Some(Provenance { seed, profile: profile.to_string() }))
}

fn round(v: f64, q: f64) -> f64 {
    (v / q).round() * q
}

/// Unit k with a two-decimal direction.
fn random_k(rng: &mut ChaCha8Rng, dim: usize) -> Direction {
    let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.3..1.0)).collect();
    let n = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    let p = Point::new(raw.iter().map(|v| v / n).collect());
    Direction::new(p).expect("normalized")
}

/// Orthonormal basis of k⊥ (dimensions 2 and 3).
fn complement(k: &Point) -> Vec<Point> {
    let d = k.dim();
    let mut basis: Vec<Point> = Vec::new();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        let e = Point::new(e);
        let mut v = e.axpy(-k.dot(&e), k);
        for b in &basis {
            v = v.axpy(-b.dot(&v), b);
        }
        let n = v.norm2();
        if n > 1e-6 {
            basis.push(v.scale(1.0 / n));
        }
        if basis.len() + 1 == d {
            break;
        }
    }
    basis
}

/// A pointed cone with k in its interior: generators k + s·w around k.
fn cone_around(rng: &mut ChaCha8Rng, k: &Point) -> Result<PolyCone> {
    let d = k.dim();
    let perp = complement(k);
    let mut gens = Vec::new();
    if d == 1 {
        gens.push(k.clone());
    } else if d == 2 {
        for sign in [1.0, -1.0] {
            let s = rng.gen_range(0.3..1.5);
            gens.push(k.axpy(sign * s, &perp[0]));
        }
    } else {
        let q = rng.gen_range(3..=4);
        let start = rng.gen_range(0.0..std::f64::consts::TAU);
        for i in 0..q {
            let th = start + std::f64::consts::TAU * i as f64 / q as f64 + rng.gen_range(-0.3..0.3);
            let s = rng.gen_range(0.3..1.2);
            let w = perp[0].scale(th.cos()).axpy(th.sin(), &perp[1]);
            gens.push(k.axpy(s, &w));
        }
    }
    PolyCone::from_generators(d, gens)
}

fn grid_points(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Point> {
    if dim == 1 {
        let n = rng.gen_range(8..=60);
        (0..n).map(|i| Point::from([-1.0 + 2.0 * i as f64 / (n - 1) as f64])).collect()
    } else {
        let n = rng.gen_range(4..=12);
        let t = |i: usize| -1.0 + 2.0 * i as f64 / (n - 1) as f64;
        (0..n).flat_map(|i| (0..n).map(move |j| Point::from([t(i), t(j)]))).collect()
    }
}

/// Cells split along the first coordinate, strictly between grid columns.
fn field_on_grid(rng: &mut ChaCha8Rng, grid: &[Point], k: &Point) -> Result<ConeField> {
    let dim = grid[0].dim();
    let mut cols: Vec<f64> = grid.iter().map(|p| p[0]).collect();
    cols.sort_by(f64::total_cmp);
    cols.dedup();
    let cuts = rng.gen_range(0..=2).min(cols.len() - 1);
    let mut at: Vec<usize> = (0..cuts).map(|_| rng.gen_range(0..cols.len() - 1)).collect();
    at.sort();
    at.dedup();
    let mut cells = Vec::new();
    let mut lo: Option<f64> = None;
    for &i in at.iter().chain(std::iter::once(&usize::MAX)) {
        let mut hs = Vec::new();
        let mut e = vec![0.0; dim];
        if let Some(l) = lo {
            e[0] = -1.0;
            hs.push(Halfspace::new(e.clone(), -l));
        }
        if i != usize::MAX {
            let gap = cols[i + 1] - cols[i];
            e[0] = 1.0;
            hs.push(Halfspace::new(e.clone(), cols[i] + 0.25 * gap));
            lo = Some(cols[i + 1] - 0.25 * gap);
        }
        cells.push(Cell {
            region: Polyhedron::new(dim, hs)?,
            cone: cone_around(rng, k)?,
        });
    }
    // the gaps between cells carry a default cone of the same kind
    let gap = cone_around(rng, k)?;
    ConeField::new(dim, k.dim(), cells, Some(gap))
}

fn smooth_map(rng: &mut ChaCha8Rng, x_dim: usize, y_dim: usize) -> impl Fn(&Point) -> Point {
    let coef: Vec<(Vec<f64>, f64, f64, f64)> = (0..y_dim)
        .map(|_| {
            let lin: Vec<f64> = (0..x_dim).map(|_| round(rng.gen_range(-2.0..2.0), 0.01)).collect();
            (
                lin,
                round(rng.gen_range(-1.5..1.5), 0.01),
                round(rng.gen_range(-0.5..0.5), 0.01),
                round(rng.gen_range(1.0..6.0), 0.01),
            )
        })
        .collect();
    move |x: &Point| {
        let r2: f64 = x.coords().iter().map(|v| v * v).sum();
        Point::new(
            coef.iter()
                .map(|(lin, q, a, w)| {
                    let l: f64 = lin.iter().zip(x.coords()).map(|(c, v)| c * v).sum();
                    l + q * r2 + a * (w * x[0]).sin()
                })
                .collect(),
        )
    }
}

fn random_eps_delta(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let eps = if rng.gen_bool(0.1) {
        f64::INFINITY
    } else {
        round(rng.gen_range(0.1..1.5), 0.01)
    };
    (eps, round(rng.gen_range(0.01..0.5), 0.01))
}

fn grid_instance(rng: &mut ChaCha8Rng, x_dim: usize) -> Result<Option<Instance>> {
    let y_dim = rng.gen_range(2..=3);
    let grid = grid_points(rng, x_dim);
    let k = random_k(rng, y_dim);
    let field = field_on_grid(rng, &grid, k.point())?;
    let f = smooth_map(rng, x_dim, y_dim);
    let g = FiniteGraph::tabulate(&grid, y_dim, f)?;
    let (epsilon, delta) = random_eps_delta(rng);
    let mut inst = Instance {
        x_dim,
        y_dim,
        norm: NormChoice::Euclidean,
        omega: Omega::whole(x_dim),
        objective: GraphMap::SingleValued(g),
        vds_kind: VdsKind::K,
        cone_field: field,
        k,
        epsilon,
        delta,
        tolerances: Tolerances::default(),
        candidate: None,
        ball_coords: None,
    };
    pick_certified(rng, &mut inst, &grid)
}

/// Sets a random certified grid point as candidate, or rejects.
fn pick_certified(rng: &mut ChaCha8Rng, inst: &mut Instance, grid: &[Point]) -> Result<Option<Instance>> {
    let start = rng.gen_range(0..grid.len());
    for i in 0..grid.len() {
        let x = &grid[(start + i) % grid.len()];
        let y = inst.objective.eval(x)?;
        if certify_nondominated_k(inst, x, &y)?.is_certified() {
            inst.candidate = Some(Candidate { x: x.clone(), y });
            return Ok(Some(inst.clone()));
        }
    }
    Ok(None)
}

/// Square lattice [lo, hi]² with the given step.
fn lattice_2d(lo: f64, hi: f64, step: f64) -> Vec<Point> {
    let n = ((hi - lo) / step).round() as usize;
    let ticks: Vec<f64> = (0..=n).map(|i| lo + step * i as f64).collect();
    ticks.iter().flat_map(|&a| ticks.iter().map(move |&b| Point::from([a, b]))).collect()
}

fn polyhedral_instance(rng: &mut ChaCha8Rng, want: Regime) -> Result<Option<Instance>> {
    let k = random_k(rng, 2);
    let cone = cone_around(rng, k.point())?;
    let mat = |rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
        (0..2)
            .map(|_| (0..2).map(|_| round(rng.gen_range(-2.0..2.0), 0.25)).collect())
            .collect()
    };
    let a1 = mat(rng);
    let kink: Vec<f64> = (0..2).map(|_| round(rng.gen_range(-1.0..1.0), 0.25)).collect();
    let mut a2 = a1.clone();
    for r in 0..2 {
        a2[r][0] += kink[r];
    }
    let offset = Point::new((0..2).map(|_| round(rng.gen_range(-1.0..1.0), 0.25)).collect());
    let left = Polyhedron::new(2, vec![Halfspace::new(vec![1.0, 0.0], 0.0)])?;
    let right = Polyhedron::new(2, vec![Halfspace::new(vec![-1.0, 0.0], 0.0)])?;
    let map = PaMap::new(
        2,
        2,
        vec![
            AffinePiece { region: left, matrix: a1, offset: offset.clone() },
            AffinePiece { region: right, matrix: a2, offset },
        ],
    )?;
    let (epsilon, delta) = match want {
        Regime::BII => {
            let eps = round(rng.gen_range(0.02..0.0625), 0.001);
            let delta = round(rng.gen_range(0.0005..0.9 * eps), 0.0001);
            (eps, delta)
        }
        _ => (round(rng.gen_range(0.07..1.5), 0.01), round(rng.gen_range(0.01..0.24), 0.01)),
    };
    if regime(epsilon, delta).regime != want {
        return Ok(None);
    }
    let omega = Omega {
        region: Polyhedron::boxed(&Point::from([-1.0, -1.0]), &Point::from([1.0, 1.0])),
        grid: Some(lattice_2d(-1.0, 1.0, 0.25)),
    };
    let objective = GraphMap::PiecewiseAffine(map);
    // minimize ⟨λ, f⟩ over the vertices of the two box halves
    let lam = cone.dual_gens().iter().fold(Point::zeros(2), |acc, g| &acc + g);
    let mut best: Option<(Point, f64)> = None;
    for v in [[-1.0, -1.0], [-1.0, 1.0], [0.0, -1.0], [0.0, 1.0], [1.0, -1.0], [1.0, 1.0]] {
        let x = Point::from(v);
        let val = lam.dot(&objective.eval(&x)?);
        if best.as_ref().is_none_or(|(_, b)| val < *b - 1e-12) {
            best = Some((x, val));
        }
    }
    let xb = best.expect("vertices").0;
    let yb = objective.eval(&xb)?;
    let inst = Instance {
        x_dim: 2,
        y_dim: 2,
        norm: NormChoice::Euclidean,
        omega,
        objective,
        vds_kind: VdsKind::K,
        cone_field: ConeField::constant(2, cone)?,
        k,
        epsilon,
        delta,
        tolerances: Tolerances::default(),
        candidate: Some(Candidate { x: xb.clone(), y: yb.clone() }),
        ball_coords: None,
    };
    if !certify_nondominated_k(&inst, &xb, &yb)?.is_certified() {
        return Ok(None);
    }
    Ok(Some(inst))
}

fn lifted_instance(rng: &mut ChaCha8Rng) -> Result<Option<Instance>> {
    let k = random_k(rng, 2);
    let n = rng.gen_range(3..=12);
    let q = 0.25;
    let entries: Vec<FiniteEntry> = (0..n)
        .map(|i| {
            let count = if rng.gen_bool(0.2) { 2 } else { 1 };
            FiniteEntry {
                x: Point::from([i as f64 * 0.25]),
                values: (0..count)
                    .map(|_| Point::from([rng.gen_range(-6..=6) as f64 * q, rng.gen_range(-6..=6) as f64 * q]))
                    .collect(),
            }
        })
        .collect();
    // Q changes across y₁ = c in a gap that avoids the value lattice
    let c = (rng.gen_range(-4..4) as f64 + 0.5) * q;
    let cells = vec![
        Cell {
            region: Polyhedron::new(2, vec![Halfspace::new(vec![1.0, 0.0], c - 0.05)])?,
            cone: cone_around(rng, k.point())?,
        },
        Cell {
            region: Polyhedron::new(2, vec![Halfspace::new(vec![-1.0, 0.0], -(c + 0.05))])?,
            cone: cone_around(rng, k.point())?,
        },
    ];
    let j = rng.gen_range(0..entries.len());
    let candidate = Candidate {
        x: entries[j].x.clone(),
        y: entries[j].values[0].clone(),
    };
    let (epsilon, delta) = random_eps_delta(rng);
    let inst = Instance {
        x_dim: 1,
        y_dim: 2,
        norm: NormChoice::Euclidean,
        omega: Omega::whole(1),
        objective: GraphMap::FiniteGraph(FiniteGraph::new(1, 2, entries)?),
        vds_kind: VdsKind::Q,
        cone_field: ConeField::new(2, 2, cells, None)?,
        k,
        epsilon,
        delta,
        tolerances: Tolerances::default(),
        candidate: Some(candidate),
        ball_coords: None,
    };
    Ok(Some(inst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solutions::certify_nondominated_q;

    #[test]
    fn same_seed_gives_identical_files() {
        for p in [Profile::Grid1d, Profile::Grid2d, Profile::Polyhedral2d(Regime::BI), Profile::Lifted] {
            assert_eq!(generate_file(11, p).unwrap(), generate_file(11, p).unwrap());
        }
        assert_ne!(generate_file(1, Profile::Grid1d).unwrap(), generate_file(2, Profile::Grid1d).unwrap());
    }

    #[test]
    fn round_trip_is_exact() {
        for seed in 0..20 {
            for p in [Profile::Grid1d, Profile::Grid2d, Profile::Polyhedral2d(Regime::BII), Profile::Lifted] {
                let inst = generate(seed, p).unwrap();
                let text = to_json(&inst, None).unwrap();
                let (back, _) = from_json(&text).unwrap();
                assert_eq!(back, inst);
                assert_eq!(to_json(&back, None).unwrap(), text);
            }
        }
    }

    #[test]
    fn grid_profiles_meet_their_hypotheses() {
        for seed in 0..30 {
            for p in [Profile::Grid1d, Profile::Grid2d] {
                let inst = generate(seed, p).unwrap();
                let c = inst.candidate.clone().unwrap();
                let sc = inst
                    .cone_field
                    .scalarization_condition(&c.x, inst.epsilon.min(1e9), inst.k.point(), inst.norm)
                    .unwrap();
                assert!(sc.holds && sc.sufficient_test);
                assert!(certify_nondominated_k(&inst, &c.x, &c.y).unwrap().is_certified());
            }
        }
    }

    #[test]
    fn polyhedral_regimes() {
        for seed in 0..20 {
            let i = generate(seed, Profile::Polyhedral2d(Regime::BI)).unwrap();
            assert!(i.epsilon > 1.0 / 16.0 && i.delta < 0.25);
            let i = generate(seed, Profile::Polyhedral2d(Regime::BII)).unwrap();
            assert_eq!(regime(i.epsilon, i.delta).regime, Regime::BII);
        }
    }

    #[test]
    fn lifted_profile_is_certifiable() {
        for seed in 0..20 {
            let inst = generate(seed, Profile::Lifted).unwrap();
            let c = inst.candidate.clone().unwrap();
            certify_nondominated_q(&inst, &c.x, &c.y).unwrap();
        }
    }

    #[test]
    fn infinite_epsilon_is_written_as_inf() {
        let mut inst = generate(0, Profile::Grid1d).unwrap();
        inst.epsilon = f64::INFINITY;
        let text = to_json(&inst, None).unwrap();
        assert!(text.contains("\"epsilon\": \"inf\""));
        assert_eq!(from_json(&text).unwrap().0.epsilon, f64::INFINITY);
    }

    fn edit(f: impl Fn(&mut serde_json::Value)) -> Result<(Instance, Option<Provenance>)> {
        let inst = generate(3, Profile::Grid1d).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&to_json(&inst, None).unwrap()).unwrap();
        f(&mut v);
        from_json(&serde_json::to_string_pretty(&v).unwrap())
    }

    #[test]
    fn schema_violations_are_rejected() {
        let e = edit(|v| {
            v.as_object_mut().unwrap().remove("vds");
        })
        .unwrap_err();
        assert!(matches!(e, Error::Schema(ref m) if m.contains("vds") && m.contains("line")), "{e}");
        let e = edit(|v| v["k"] = serde_json::json!([1.0])).unwrap_err();
        assert!(matches!(e, Error::Schema(_)), "{e}");
        let e = edit(|v| v["surprise"] = serde_json::json!(1)).unwrap_err();
        assert!(matches!(e, Error::Schema(ref m) if m.contains("surprise")));
        let e = edit(|v| v["schema_version"] = serde_json::json!(9)).unwrap_err();
        assert!(matches!(e, Error::Schema(_)));
        let e = edit(|v| v["epsilon"] = serde_json::json!("huge")).unwrap_err();
        assert!(matches!(e, Error::Schema(_)));
    }

    #[test]
    fn files_round_trip_on_disk() {
        let inst = generate(5, Profile::Lifted).unwrap();
        let dir = std::env::temp_dir().join(format!("vdsopt-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("lifted.json");
        save(&inst, &path).unwrap();
        assert_eq!(load(&path).unwrap(), inst);
        assert!(matches!(load(dir.join("missing.json")), Err(Error::Io(_))));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
