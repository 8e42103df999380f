//! Variable domination structures: piecewise-constant cone fields.

use crate::error::{check_dim, Error, Result};
use crate::geometry::{Halfspace, NormChoice, Point, PolyCone, Polyhedron, TAU};
use crate::Evidence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One closed polyhedral region carrying a constant cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cell {
    pub region: Polyhedron,
    pub cone: PolyCone,
}

/// A cone-valued map realized as finitely many (region, cone) cells.
///
/// Used both for K: X ⇉ Y (regions in X) and Q: Y ⇉ Y (regions in Y).
/// Regions are closed; two regions may only meet if their cones coincide.
/// The optional default applies off the cells and is only usable for
/// pointwise evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldData", into = "FieldData")]
pub struct ConeField {
    domain_dim: usize,
    cone_dim: usize,
    cells: Vec<Cell>,
    default_cone: Option<PolyCone>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldData {
    domain_dim: usize,
    cone_dim: usize,
    cells: Vec<Cell>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    default_cone: Option<PolyCone>,
}

impl TryFrom<FieldData> for ConeField {
    type Error = Error;
    fn try_from(d: FieldData) -> Result<Self> {
        ConeField::new(d.domain_dim, d.cone_dim, d.cells, d.default_cone)
    }
}

impl From<ConeField> for FieldData {
    fn from(f: ConeField) -> Self {
        FieldData {
            domain_dim: f.domain_dim,
            cone_dim: f.cone_dim,
            cells: f.cells,
            default_cone: f.default_cone,
        }
    }
}

/// The intersection P of the cones met by a ball.
#[derive(Clone, Debug)]
pub struct CommonCone {
    pub cone: PolyCone,
    /// Indices of contributing cells; `None` marks the default cone.
    pub contributors: Vec<Option<usize>>,
    /// Set when P = {0}; interiority checks then fail.
    pub is_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalarizationReport {
    pub holds: bool,
    /// k ∈ C∖{0} for every cone met (exact).
    pub sufficient_test: bool,
    /// Generator probes g + t k ∈ C∖{0}, t ∈ {1e-3, 1, 1e3} (sampled).
    pub probe_test: bool,
    pub evidence: Evidence,
    pub cones_checked: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Interiority {
    pub holds: bool,
    /// min over dual generators d of ⟨d, k⟩.
    pub margin: f64,
    pub zero_cone: bool,
}

/// Strictness margin required by [`interiority`].
pub const SIGMA: f64 = 1e-9;

impl ConeField {
    pub fn new(
        domain_dim: usize,
        cone_dim: usize,
        cells: Vec<Cell>,
        default_cone: Option<PolyCone>,
    ) -> Result<Self> {
        for c in &cells {
            check_dim(domain_dim, c.region.dim)?;
            check_dim(cone_dim, c.cone.dim())?;
            c.cone.check_domination_cone()?;
        }
        if let Some(d) = &default_cone {
            check_dim(cone_dim, d.dim())?;
            d.check_domination_cone()?;
        }
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                if cells[i].cone.same_set(&cells[j].cone, 1e-10) {
                    continue;
                }
                let meet = cells[i].region.intersect(&cells[j].region)?;
                if !meet.is_empty()? {
                    return Err(Error::OverlappingCells { first: i, second: j });
                }
            }
        }
        Ok(ConeField {
            domain_dim,
            cone_dim,
            cells,
            default_cone,
        })
    }

    /// K(x) ≡ C on the whole domain.
    pub fn constant(domain_dim: usize, cone: PolyCone) -> Result<Self> {
        let cone_dim = cone.dim();
        Self::new(
            domain_dim,
            cone_dim,
            vec![Cell {
                region: Polyhedron::whole(domain_dim),
                cone,
            }],
            None,
        )
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn cone_dim(&self) -> usize {
        self.cone_dim
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn default_cone(&self) -> Option<&PolyCone> {
        self.default_cone.as_ref()
    }

    /// A single cell covering everything, i.e. a constant field.
    pub fn as_constant(&self) -> Option<&PolyCone> {
        match self.cells.as_slice() {
            [c] if c.region.halfspaces.is_empty() => Some(&c.cone),
            _ if self.cells.is_empty() => self.default_cone.as_ref(),
            _ => None,
        }
    }

    pub fn cone_at(&self, p: &Point) -> Result<&PolyCone> {
        check_dim(self.domain_dim, p.dim())?;
        self.cells
            .iter()
            .find(|c| c.region.contains(p, TAU))
            .map(|c| &c.cone)
            .or(self.default_cone.as_ref())
            .ok_or_else(|| Error::Uncovered(p.to_string()))
    }

    fn covered(&self, p: &Point) -> bool {
        self.cells.iter().any(|c| c.region.contains(p, TAU))
    }

    /// Cells whose region meets the closed ball, plus the default when
    /// some probe point of the ball is not covered.
    pub fn cones_meeting_ball(
        &self,
        center: &Point,
        radius: f64,
        norm: NormChoice,
    ) -> Result<Vec<(Option<usize>, &PolyCone)>> {
        check_dim(self.domain_dim, center.dim())?;
        let mut out = Vec::new();
        for (i, c) in self.cells.iter().enumerate() {
            if c.region.meets_ball(center, radius, norm)? {
                out.push((Some(i), &c.cone));
            }
        }
        let probes = ball_probes(center, radius, norm, 256);
        if probes.iter().any(|p| !self.covered(p)) {
            match &self.default_cone {
                Some(d) => out.push((None, d)),
                None => return Err(Error::Uncovered(format!("ball around {center}"))),
            }
        }
        Ok(out)
    }

    /// P = ∩ K(x) over the ball, from concatenated dual generators.
    pub fn common_cone(&self, center: &Point, radius: f64, norm: NormChoice) -> Result<CommonCone> {
        let met = self.cones_meeting_ball(center, radius, norm)?;
        if met.is_empty() {
            return Err(Error::Uncovered(format!("ball around {center}")));
        }
        let mut duals = Vec::new();
        for (_, c) in &met {
            duals.extend(c.dual_gens().iter().cloned());
        }
        let cone = PolyCone::from_dual(self.cone_dim, duals)?;
        let is_zero = cone.is_zero();
        Ok(CommonCone {
            cone,
            contributors: met.iter().map(|(i, _)| *i).collect(),
            is_zero,
        })
    }

    /// K(x) + (0, ∞) k ⊆ K(x)∖{0} for every cone met by the ball.
    pub fn scalarization_condition(
        &self,
        center: &Point,
        radius: f64,
        k: &Point,
        norm: NormChoice,
    ) -> Result<ScalarizationReport> {
        check_dim(self.cone_dim, k.dim())?;
        let met = self.cones_meeting_ball(center, radius, norm)?;
        let mut sufficient = !k.is_zero(TAU);
        let mut probe = true;
        for (_, c) in &met {
            sufficient &= c.contains_fast(k, TAU);
            for g in c.primal_gens().iter().chain(std::iter::once(&Point::zeros(self.cone_dim))) {
                for t in [1e-3, 1.0, 1e3] {
                    let v = g.axpy(t, k);
                    if !c.contains_fast(&v, TAU) || v.is_zero(TAU) {
                        probe = false;
                    }
                }
            }
        }
        let evidence = if sufficient {
            Evidence::Exact
        } else {
            Evidence::Sampled
        };
        Ok(ScalarizationReport {
            holds: sufficient || probe,
            sufficient_test: sufficient,
            probe_test: probe,
            evidence,
            cones_checked: met.len(),
        })
    }

    /// Gr K as a union of polyhedra region × cone in the product space.
    pub fn graph_pieces(&self) -> Result<Vec<Polyhedron>> {
        if self.default_cone.is_some() {
            return Err(Error::invalid(
                "graph of a field with a default cone is not a finite polyhedral union",
            ));
        }
        Ok(self
            .cells
            .iter()
            .map(|c| c.region.product(&cone_polyhedron(&c.cone)))
            .collect())
    }
}

/// A cone as the polyhedron {y : ⟨−d, y⟩ ≤ 0}.
pub fn cone_polyhedron(c: &PolyCone) -> Polyhedron {
    Polyhedron {
        dim: c.dim(),
        halfspaces: c
            .dual_gens()
            .iter()
            .map(|d| Halfspace {
                normal: d.scale(-1.0),
                offset: 0.0,
            })
            .collect(),
    }
}

/// ⟨d, k⟩ ≥ σ for every dual generator d of P.
pub fn interiority(k: &Point, p: &PolyCone) -> Result<Interiority> {
    check_dim(p.dim(), k.dim())?;
    let margin = p.dual_margin(k);
    let zero_cone = p.is_zero();
    Ok(Interiority {
        holds: !zero_cone && margin >= SIGMA,
        margin,
        zero_cone,
    })
}

/// Deterministic probe points of a closed ball: center, axis extremes and seeded samples.
pub(crate) fn ball_probes(center: &Point, radius: f64, norm: NormChoice, count: usize) -> Vec<Point> {
    let n = center.dim();
    let mut out = vec![center.clone()];
    for i in 0..n {
        for s in [-1.0, 1.0] {
            out.push(center.axpy(s * radius, &Point::unit(n, i)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xba11);
    while out.len() < count {
        let v = Point::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let nv = v.norm(norm);
        if nv == 0.0 {
            continue;
        }
        let r = radius * rng.gen_range(0.0f64..1.0).powf(1.0 / n as f64);
        out.push(center.axpy(r / nv, &v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> PolyCone {
        PolyCone::from_generators(2, vec![Point::from([1.0, 0.0]), Point::from([1.0, 1.0])]).unwrap()
    }

    fn two_cells(gap: f64) -> Result<ConeField> {
        ConeField::new(
            2,
            2,
            vec![
                Cell {
                    region: Polyhedron::halfspace([1.0, 0.0], 0.0),
                    cone: PolyCone::orthant(2),
                },
                Cell {
                    region: Polyhedron::halfspace([-1.0, 0.0], -gap),
                    cone: c2(),
                },
            ],
            None,
        )
    }

    #[test]
    fn cone_at_examples() {
        let k = ConeField::constant(2, PolyCone::orthant(2)).unwrap();
        assert!(k.cone_at(&Point::from([5.0, -3.0])).unwrap().same_set(&PolyCone::orthant(2), 0.0));
        let f = two_cells(0.5).unwrap();
        assert!(f.cone_at(&Point::from([-1.0, 0.0])).unwrap().same_set(&PolyCone::orthant(2), 0.0));
        assert!(f.cone_at(&Point::from([1.0, 0.0])).unwrap().same_set(&c2(), 1e-12));
        assert!(matches!(f.cone_at(&Point::from([0.25, 0.0])), Err(Error::Uncovered(_))));
        assert!(matches!(two_cells(0.0), Err(Error::OverlappingCells { .. })));
    }

    #[test]
    fn common_cone_examples() {
        let k = ConeField::constant(2, PolyCone::orthant(2)).unwrap();
        let p = k.common_cone(&Point::zeros(2), 1.0, NormChoice::Euclidean).unwrap();
        assert!(p.cone.same_set(&PolyCone::orthant(2), 1e-12));
        let f = two_cells(0.5).unwrap();
        let p = f.common_cone(&Point::from([0.25, 0.0]), 1.0, NormChoice::Euclidean);
        // the strip between the cells is uncovered and there is no default
        assert!(p.is_err());
        let f = ConeField::new(
            2,
            2,
            f.cells().to_vec(),
            Some(PolyCone::orthant(2)),
        )
        .unwrap();
        let p = f.common_cone(&Point::from([0.25, 0.0]), 1.0, NormChoice::Euclidean).unwrap();
        assert!(p.cone.same_set(&c2(), 1e-12));
        let ray = |v: [f64; 2]| PolyCone::from_generators(2, vec![Point::from(v)]).unwrap();
        let rays = ConeField::new(
            1,
            2,
            vec![
                Cell {
                    region: Polyhedron::halfspace([1.0], 0.0),
                    cone: ray([1.0, 0.0]),
                },
                Cell {
                    region: Polyhedron::halfspace([-1.0], -1.0),
                    cone: ray([0.0, 1.0]),
                },
            ],
            Some(PolyCone::orthant(2)),
        )
        .unwrap();
        let p = rays.common_cone(&Point::from([0.5]), 2.0, NormChoice::Euclidean).unwrap();
        assert!(p.is_zero);
        assert_eq!(p.contributors, vec![Some(0), Some(1), None]);
    }

    #[test]
    fn scalarization_examples() {
        let s = 0.5f64.sqrt();
        let k = ConeField::constant(2, PolyCone::orthant(2)).unwrap();
        let r = k
            .scalarization_condition(&Point::zeros(2), 1.0, &Point::from([s, s]), NormChoice::Euclidean)
            .unwrap();
        assert!(r.holds && r.sufficient_test && r.evidence == Evidence::Exact);
        let r = k
            .scalarization_condition(&Point::zeros(2), 1.0, &Point::from([-1.0, 0.0]), NormChoice::Euclidean)
            .unwrap();
        assert!(!r.holds);
        let k = ConeField::constant(2, c2()).unwrap();
        let r = k
            .scalarization_condition(&Point::zeros(2), 1.0, &Point::from([1.0, 0.0]), NormChoice::Euclidean)
            .unwrap();
        assert!(r.holds && r.probe_test);
    }

    #[test]
    fn interiority_examples() {
        let s = 0.5f64.sqrt();
        let i = interiority(&Point::from([s, s]), &PolyCone::orthant(2)).unwrap();
        assert!(i.holds);
        assert!((i.margin - s).abs() < 1e-15);
        assert!(!interiority(&Point::from([1.0, 0.0]), &PolyCone::orthant(2)).unwrap().holds);
        let r5 = 5f64.sqrt();
        let i = interiority(&Point::from([2.0 / r5, 1.0 / r5]), &c2()).unwrap();
        assert!(i.holds);
        assert!((i.margin - 1.0 / r5).abs() < 1e-15);
        let z = interiority(&Point::from([1.0, 0.0]), &PolyCone::zero(2)).unwrap();
        assert!(!z.holds && z.zero_cone);
    }
}
