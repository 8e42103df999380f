use super::dd::{h_to_v, max_normalize};
use super::{NormChoice, Point, TAU};
use crate::error::{check_dim, Error, Result};
use crate::numeric::{rank, NormMin};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Largest dimension for which duals are computed internally.
pub const DD_MAX_DIM: usize = 6;

/// A polyhedral convex cone carried in both representations.
///
/// `primal_gens` generate the cone; `dual_gens` generate its positive dual
/// C⁺ = {d : ⟨d, y⟩ ≥ 0 ∀ y ∈ C}, so C = {y : ⟨d, y⟩ ≥ 0 ∀ d ∈ dual_gens}.
/// Internally computed generators are scaled to unit max-norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConeData", into = "ConeData")]
pub struct PolyCone {
    dim: usize,
    primal: Vec<Point>,
    dual: Vec<Point>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConeData {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    primal_gens: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dual_gens: Option<Vec<Point>>,
}

impl TryFrom<ConeData> for PolyCone {
    type Error = Error;
    fn try_from(c: ConeData) -> Result<Self> {
        match (c.primal_gens, c.dual_gens) {
            (Some(p), Some(d)) => PolyCone::with_dual(c.dim, p, d),
            (Some(p), None) => PolyCone::from_generators(c.dim, p),
            (None, Some(d)) => PolyCone::from_dual(c.dim, d),
            (None, None) => Err(Error::invalid("cone needs primal_gens or dual_gens")),
        }
    }
}

impl From<PolyCone> for ConeData {
    fn from(c: PolyCone) -> Self {
        ConeData {
            dim: c.dim,
            primal_gens: Some(c.primal),
            dual_gens: Some(c.dual),
        }
    }
}

fn normalized(v: &[Point]) -> Vec<Point> {
    v.iter()
        .filter_map(|p| {
            let mut c = p.coords().to_vec();
            max_normalize(&mut c).then(|| Point::new(c))
        })
        .collect()
}

fn to_rows(v: &[Point]) -> Vec<Vec<f64>> {
    v.iter().map(|p| p.coords().to_vec()).collect()
}

fn to_points(v: Vec<Vec<f64>>) -> Vec<Point> {
    v.into_iter().map(Point::new).collect()
}

impl PolyCone {
    fn check_gens(dim: usize, gens: &[Point]) -> Result<()> {
        for g in gens {
            check_dim(dim, g.dim())?;
            if !g.is_finite() {
                return Err(Error::invalid("non-finite cone generator"));
            }
        }
        Ok(())
    }

    /// Cone generated by `gens`; the dual is computed by double description.
    pub fn from_generators(dim: usize, gens: Vec<Point>) -> Result<Self> {
        Self::check_gens(dim, &gens)?;
        if dim > DD_MAX_DIM {
            return Err(Error::DimensionTooHigh { dim, max: DD_MAX_DIM });
        }
        let dual = h_to_v(&to_rows(&gens), dim).generators();
        let primal = h_to_v(&dual, dim).generators();
        Ok(PolyCone {
            dim,
            primal: to_points(primal),
            dual: to_points(dual),
        })
    }

    /// Cone {y : ⟨d, y⟩ ≥ 0 ∀ d ∈ duals}.
    pub fn from_dual(dim: usize, duals: Vec<Point>) -> Result<Self> {
        Self::check_gens(dim, &duals)?;
        if dim > DD_MAX_DIM {
            return Err(Error::DimensionTooHigh { dim, max: DD_MAX_DIM });
        }
        let primal = h_to_v(&to_rows(&duals), dim).generators();
        let dual = h_to_v(&primal, dim).generators();
        Ok(PolyCone {
            dim,
            primal: to_points(primal),
            dual: to_points(dual),
        })
    }

    /// Both representations supplied; they are validated, not recomputed.
    pub fn with_dual(dim: usize, primal: Vec<Point>, dual: Vec<Point>) -> Result<Self> {
        Self::check_gens(dim, &primal)?;
        Self::check_gens(dim, &dual)?;
        let cone = PolyCone {
            dim,
            primal: normalized(&primal),
            dual: normalized(&dual),
        };
        cone.validate_duality()?;
        Ok(cone)
    }

    pub fn orthant(dim: usize) -> Self {
        let e: Vec<Point> = (0..dim).map(|i| Point::unit(dim, i)).collect();
        PolyCone {
            dim,
            primal: e.clone(),
            dual: e,
        }
    }

    pub fn zero(dim: usize) -> Self {
        let mut dual = Vec::new();
        for i in 0..dim {
            dual.push(Point::unit(dim, i));
            dual.push(Point::unit(dim, i).scale(-1.0));
        }
        PolyCone {
            dim,
            primal: Vec::new(),
            dual,
        }
    }

    pub fn whole(dim: usize) -> Self {
        let z = Self::zero(dim);
        PolyCone {
            dim,
            primal: z.dual,
            dual: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn primal_gens(&self) -> &[Point] {
        &self.primal
    }

    pub fn dual_gens(&self) -> &[Point] {
        &self.dual
    }

    pub fn is_zero(&self) -> bool {
        self.primal.iter().all(|g| g.is_zero(0.0))
    }

    pub fn is_whole(&self) -> bool {
        self.dual.iter().all(|d| d.is_zero(0.0))
    }

    /// The positive dual cone C⁺.
    pub fn dual(&self) -> PolyCone {
        PolyCone {
            dim: self.dim,
            primal: self.dual.clone(),
            dual: self.primal.clone(),
        }
    }

    /// −C
    pub fn negate(&self) -> PolyCone {
        PolyCone {
            dim: self.dim,
            primal: self.primal.iter().map(|g| g.scale(-1.0)).collect(),
            dual: self.dual.iter().map(|d| d.scale(-1.0)).collect(),
        }
    }

    pub fn intersection(&self, other: &PolyCone) -> Result<PolyCone> {
        check_dim(self.dim, other.dim)?;
        let mut d = self.dual.clone();
        d.extend(other.dual.iter().cloned());
        PolyCone::from_dual(self.dim, d)
    }

    pub fn sum(&self, other: &PolyCone) -> Result<PolyCone> {
        check_dim(self.dim, other.dim)?;
        let mut g = self.primal.clone();
        g.extend(other.primal.iter().cloned());
        PolyCone::from_generators(self.dim, g)
    }

    /// min over dual generators of ⟨d, y⟩; +∞ for the whole space.
    pub fn dual_margin(&self, y: &Point) -> f64 {
        self.dual
            .iter()
            .map(|d| d.dot(y))
            .fold(f64::INFINITY, f64::min)
    }

    /// Dual-generator membership test only.
    pub fn contains_fast(&self, y: &Point, tau: f64) -> bool {
        self.dual_margin(y) >= -tau
    }

    /// Distance from `y` to the cone via nonnegative least squares on primal generators.
    pub fn distance(&self, y: &Point, norm: NormChoice) -> Result<f64> {
        check_dim(self.dim, y.dim())?;
        if self.primal.is_empty() {
            return Ok(y.norm(norm));
        }
        let k = self.primal.len();
        let m: Vec<Vec<f64>> = (0..self.dim)
            .map(|i| self.primal.iter().map(|g| g[i]).collect())
            .collect();
        let le: Vec<(Vec<f64>, f64)> = (0..k)
            .map(|j| {
                let mut r = vec![0.0; k];
                r[j] = -1.0;
                (r, 0.0)
            })
            .collect();
        let prob = NormMin {
            n: k,
            m: &m,
            q: y.coords(),
            eq: &[],
            le: &le,
        };
        Ok(prob
            .solve(norm)?
            .map(|(_, v)| v)
            .ok_or_else(|| Error::numerical("cone projection infeasible"))?)
    }

    /// Membership with both representations; a gross disagreement is an error.
    pub fn contains(&self, y: &Point, tau: f64) -> Result<bool> {
        check_dim(self.dim, y.dim())?;
        let margin = self.dual_margin(y);
        let dual_in = margin >= -tau;
        let dist = self.distance(y, NormChoice::Euclidean)?;
        let scale = 1.0 + y.norm2();
        let slack = 1e3 * tau.max(1e-9) * scale;
        if dual_in && dist > slack {
            return Err(Error::InconsistentCone(format!(
                "{y} passes the dual test but lies {dist:e} from the generated cone"
            )));
        }
        if margin < -slack && dist <= tau {
            return Err(Error::InconsistentCone(format!(
                "{y} is generated but fails the dual test by {margin:e}"
            )));
        }
        Ok(dual_in)
    }

    /// Does `self` contain every generator of `other`?
    pub fn contains_cone(&self, other: &PolyCone, tau: f64) -> bool {
        other.primal.iter().all(|g| self.contains_fast(g, tau))
    }

    pub fn same_set(&self, other: &PolyCone, tau: f64) -> bool {
        self.dim == other.dim && self.contains_cone(other, tau) && other.contains_cone(self, tau)
    }

    /// No line through the origin lies in the cone.
    pub fn is_pointed(&self) -> bool {
        self.is_zero() || rank(&to_rows(&self.dual), self.dim, 1e-10) == self.dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        rank(&to_rows(&self.primal), self.dim, 1e-10) == self.dim
    }

    /// Closed, convex, proper and pointed: the standing assumptions on domination cones.
    pub fn check_domination_cone(&self) -> Result<()> {
        if self.is_zero() {
            return Err(Error::invalid("domination cone is {0}"));
        }
        if self.is_whole() {
            return Err(Error::invalid("domination cone is the whole space"));
        }
        if !self.is_pointed() {
            return Err(Error::invalid("domination cone is not pointed"));
        }
        Ok(())
    }

    /// Checks ⟨d, g⟩ ≥ −τ pairwise and that each side generates the dual of the other.
    pub fn validate_duality(&self) -> Result<()> {
        for d in &self.dual {
            for g in &self.primal {
                if d.dot(g) < -TAU {
                    return Err(Error::InconsistentCone(format!(
                        "dual generator {d} is negative on generator {g}"
                    )));
                }
            }
        }
        if self.dim <= DD_MAX_DIM {
            let from_dual = PolyCone::from_dual(self.dim, self.dual.clone())?;
            let from_primal = PolyCone::from_generators(self.dim, self.primal.clone())?;
            if !from_dual.same_set(&from_primal, 1e-8) {
                return Err(Error::InconsistentCone(
                    "primal and dual generators describe different cones".into(),
                ));
            }
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..1000 {
            let y = Point::new((0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect());
            self.contains(&y, TAU)?;
        }
        Ok(())
    }
}
