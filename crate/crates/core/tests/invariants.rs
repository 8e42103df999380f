//! Property tests for structural invariants of the geometry, cone fields,
//! scalarization, certifiers and the finite variational principle.

mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use vdsopt::evp::{evp_finite, FiniteMetricSpace};
use vdsopt::geometry::{Direction, Halfspace, NormChoice, Point, PolyCone, Polyhedron};
use vdsopt::graph::{FiniteGraph, GraphMap};
use vdsopt::scalarize::{gerstewitz, s_vds, ExtReal, RSet};
use vdsopt::solutions::{
    certify, certify_efficient, certify_nondominated_k, certify_nondominated_q, certify_pareto, recheck_witness,
    Candidate, Concept, Instance, Omega, Tolerances, VdsKind,
};
use vdsopt::vds::{interiority, Cell, ConeField};

fn norm_of(i: u8) -> NormChoice {
    [NormChoice::Euclidean, NormChoice::Max, NormChoice::Sum][i as usize % 3]
}

/// A 1 → 2 single-valued finite graph on a lattice of [−2, 2].
fn finite_instance(seed: u64, kind: VdsKind, cone: PolyCone, k: &Point, epsilon: f64, cand: usize) -> Instance {
    let mut r = rng(seed);
    let grid: Vec<Point> = (0..=16).map(|i| Point::new(vec![-2.0 + 0.25 * i as f64])).collect();
    let values: Vec<Point> = grid.iter().map(|_| lattice_point(&mut r, 2, 2.0)).collect();
    let g = FiniteGraph::tabulate(&grid, 2, |x| values[((x[0] + 2.0) * 4.0).round() as usize].clone()).unwrap();
    let xb = grid[cand % grid.len()].clone();
    let yb = values[cand % grid.len()].clone();
    let field_dim = if kind == VdsKind::K { 1 } else { 2 };
    Instance {
        x_dim: 1,
        y_dim: 2,
        norm: NormChoice::Euclidean,
        omega: Omega::whole(1),
        objective: GraphMap::SingleValued(g),
        vds_kind: kind,
        cone_field: ConeField::constant(field_dim, cone).unwrap(),
        k: Direction::normalize(k, NormChoice::Euclidean).unwrap(),
        epsilon,
        delta: 0.1,
        tolerances: Tolerances::default(),
        candidate: Some(Candidate { x: xb, y: yb }),
        ball_coords: None,
    }
}

fn candidate(inst: &Instance) -> (Point, Point) {
    let c = inst.candidate.as_ref().unwrap();
    (c.x.clone(), c.y.clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cone_membership_is_homogeneous(seed in any::<u64>(), dim in 2usize..=3, t in 0.01f64..100.0) {
        let mut r = rng(seed);
        let (cone, _) = pointed_cone(&mut r, dim);
        let y = uniform_point(&mut r, dim, 1.0);
        prop_assert_eq!(cone.dual_margin(&y) >= 0.0, cone.dual_margin(&y.scale(t)) >= 0.0);
        for g in cone.primal_gens() {
            prop_assert!(cone.contains_fast(&g.scale(t), 1e-9 * (1.0 + t)));
        }
    }

    #[test]
    fn dual_of_dual_is_the_cone(seed in any::<u64>(), dim in 2usize..=3) {
        let (cone, _) = pointed_cone(&mut rng(seed), dim);
        prop_assert!(cone.dual().dual().same_set(&cone, 1e-7));
    }

    #[test]
    fn cone_distance_vanishes_exactly_on_members(seed in any::<u64>(), dim in 2usize..=3, n in 0u8..3) {
        let mut r = rng(seed);
        let (cone, _) = pointed_cone(&mut r, dim);
        let y = uniform_point(&mut r, dim, 2.0);
        let d = cone.distance(&y, norm_of(n)).unwrap();
        let inside = cone.contains(&y, 1e-9).unwrap();
        prop_assert_eq!(d <= 1e-7, inside, "distance {} membership {}", d, inside);
    }

    #[test]
    fn ray_hit_zero_iff_member(seed in any::<u64>(), dim in 2usize..=3) {
        let mut r = rng(seed);
        let (p, center) = polytope(&mut r, dim);
        let x = center.axpy(1.0, &uniform_point(&mut r, dim, 2.0));
        let u = int_direction(&mut r, dim);
        let t = p.ray_hit(&x, &u, 1e-9).unwrap();
        prop_assert_eq!(t == 0.0, p.contains(&x, 1e-9));
        prop_assert!((t - t_min_oracle(&p, &x, &u)).abs() <= 1e-7 || (t.is_infinite() && t_min_oracle(&p, &x, &u).is_infinite()));
    }

    #[test]
    fn polyhedron_distance_vanishes_exactly_on_members(seed in any::<u64>(), dim in 2usize..=3, n in 0u8..3) {
        let mut r = rng(seed);
        let (p, center) = polytope(&mut r, dim);
        let y = center.axpy(1.0, &uniform_point(&mut r, dim, 2.5));
        let d = p.distance(&y, norm_of(n)).unwrap();
        prop_assert_eq!(d <= 1e-7, p.contains(&y, 1e-9), "distance {}", d);
    }

    #[test]
    fn common_cone_lies_in_every_contributor(seed in any::<u64>(), cx in -1.0f64..1.0, radius in 0.05f64..1.0, n in 0u8..3) {
        let mut r = rng(seed);
        let cells = vec![
            Cell { region: Polyhedron::new(2, vec![Halfspace::new(vec![1.0, 0.0], -0.25)]).unwrap(), cone: pointed_cone(&mut r, 2).0 },
            Cell { region: Polyhedron::new(2, vec![Halfspace::new(vec![-1.0, 0.0], -0.25)]).unwrap(), cone: pointed_cone(&mut r, 2).0 },
        ];
        let field = ConeField::new(2, 2, cells, Some(pointed_cone(&mut r, 2).0)).unwrap();
        let center = Point::new(vec![cx, r.gen_range(-1.0..1.0)]);
        let norm = norm_of(n);
        let common = field.common_cone(&center, radius, norm).unwrap();
        let met = field.cones_meeting_ball(&center, radius, norm).unwrap();
        prop_assert_eq!(met.len(), common.contributors.len());
        for (_, c) in &met {
            prop_assert!(c.contains_cone(&common.cone, 1e-7));
        }
        let k = uniform_point(&mut r, 2, 1.0);
        if !k.is_zero(1e-9) && interiority(&k, &common.cone).unwrap().holds {
            prop_assert!(field.scalarization_condition(&center, radius, &k, norm).unwrap().holds);
        }
    }

    #[test]
    fn scalarization_translates_along_k(seed in any::<u64>(), dim in 2usize..=3, t in -5.0f64..5.0) {
        let mut r = rng(seed);
        let (cone, k) = pointed_cone(&mut r, dim);
        let y = uniform_point(&mut r, dim, 2.0);
        let s0 = gerstewitz(&k, RSet::Cone(&cone), &y).unwrap().to_f64();
        let s1 = gerstewitz(&k, RSet::Cone(&cone), &y.axpy(t, &k)).unwrap().to_f64();
        prop_assert!((s1 - s0 - t).abs() <= 1e-9 * (1.0 + s0.abs() + t.abs()), "{} {} {}", s0, s1, t);
    }

    #[test]
    fn scalarization_vanishes_at_the_reference_point(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (cone, k) = pointed_cone(&mut r, 2);
        let map = kinked_map([quarter(&mut r, -2.0, 2.0), quarter(&mut r, -2.0, 2.0)], [quarter(&mut r, -2.0, 2.0), quarter(&mut r, -2.0, 2.0)], [0.0, 0.0]);
        let field = ConeField::constant(1, cone).unwrap();
        let xt = uniform_point(&mut r, 1, 2.0);
        let a = map.eval(&xt).unwrap();
        prop_assert_eq!(s_vds(&map, &field, &a, &k, &xt).unwrap(), ExtReal::Finite(0.0));
    }

    #[test]
    fn certification_is_monotone_in_epsilon(seed in any::<u64>(), cand in 0usize..17, e in 0.3f64..3.0, shrink in 0.1f64..1.0) {
        let (cone, k) = pointed_cone(&mut rng(seed ^ 0xc0), 2);
        let big = finite_instance(seed, VdsKind::K, cone.clone(), &k, e, cand);
        let small = Instance { epsilon: e * shrink, ..big.clone() };
        let (xb, yb) = candidate(&big);
        if certify_nondominated_k(&big, &xb, &yb).unwrap().is_certified() {
            prop_assert!(certify_nondominated_k(&small, &xb, &yb).unwrap().is_certified());
        }
    }

    #[test]
    fn certification_is_monotone_in_the_cone(seed in any::<u64>(), cand in 0usize..17) {
        let mut r = rng(seed ^ 0xc1);
        let (cone, k) = pointed_cone(&mut r, 2);
        let (other, _) = pointed_cone(&mut r, 2);
        let inst = finite_instance(seed, VdsKind::K, cone.clone(), &k, 1.0, cand);
        let (xb, yb) = candidate(&inst);
        let smaller = cone.intersection(&other).unwrap();
        if certify_pareto(&inst, &cone, &xb, &yb).unwrap().is_certified() {
            prop_assert!(certify_pareto(&inst, &smaller, &xb, &yb).unwrap().is_certified());
        }
    }

    #[test]
    fn constant_fields_collapse_the_concepts(seed in any::<u64>(), cand in 0usize..17, e in 0.3f64..3.0) {
        let (cone, k) = pointed_cone(&mut rng(seed ^ 0xc2), 2);
        let ik = finite_instance(seed, VdsKind::K, cone.clone(), &k, e, cand);
        let iq = finite_instance(seed, VdsKind::Q, cone.clone(), &k, e, cand);
        let (xb, yb) = candidate(&ik);
        let nk = certify_nondominated_k(&ik, &xb, &yb).unwrap().verdict;
        prop_assert_eq!(nk, certify_nondominated_q(&iq, &xb, &yb).unwrap().verdict);
        prop_assert_eq!(nk, certify_efficient(&ik, &xb, &yb).unwrap().verdict);
        prop_assert_eq!(nk, certify_pareto(&ik, &cone, &xb, &yb).unwrap().verdict);
    }

    #[test]
    fn witnesses_recheck(seed in any::<u64>(), cand in 0usize..17, q in any::<bool>()) {
        let (cone, k) = pointed_cone(&mut rng(seed ^ 0xc3), 2);
        let kind = if q { VdsKind::Q } else { VdsKind::K };
        let inst = finite_instance(seed, kind, cone, &k, 2.0, cand);
        let (xb, yb) = candidate(&inst);
        let concept = if q { Concept::NondominatedQ { exclude_zero: true } } else { Concept::NondominatedK };
        let cert = certify(&inst, &xb, &yb, concept).unwrap();
        prop_assert_eq!(cert.is_certified(), cert.witness.is_none());
        if let Some(w) = &cert.witness {
            prop_assert!(recheck_witness(&inst, &xb, &yb, concept, w).unwrap());
        }
    }

    #[test]
    fn finite_evp_meets_its_three_conclusions(seed in any::<u64>(), size in 2usize..30, lambda in 0.05f64..5.0, n in 0u8..3) {
        let mut r = rng(seed);
        let points: Vec<Point> = (0..size).map(|_| uniform_point(&mut r, 2, 3.0)).collect();
        let f: Vec<f64> = (0..size).map(|_| r.gen_range(-2.0..2.0)).collect();
        let fmin = f.iter().cloned().fold(f64::INFINITY, f64::min);
        let eps = r.gen_range(0.0..1.0);
        let starts: Vec<usize> = (0..size).filter(|&i| f[i] <= fmin + eps).collect();
        let x_tilde = starts[r.gen_range(0..starts.len())];
        let m = FiniteMetricSpace::new(points, norm_of(n));
        let res = evp_finite(&m, &f, x_tilde, eps, lambda).unwrap();
        prop_assert!(res.all_ok(), "{:?}", res);
        prop_assert!(f[res.index] <= f[x_tilde]);
    }
}
