mod common;

use kflat_core::distance::{dist_body_body, dist_body_flat, nearest_in_intersection, IntersectionOutcome};
use kflat_core::helly::{colorful_bound, helly_bound, kflat_bound, minimax_center, CenterMode};
use kflat_core::kflat::reduce_and_lift;
use kflat_core::{AffineFlat, ConvexBody, Direction, Family, SolverConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{body_flat_distance, gaussian, point_distance, random_body};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn body_distance_is_symmetric(seed in any::<u64>(), d in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_body(&mut rng, d, false, 5);
        let b = random_body(&mut rng, d, false, 5);
        let cfg = SolverConfig::default();
        let ab = dist_body_body(&a, &b, &cfg).unwrap();
        let ba = dist_body_body(&b, &a, &cfg).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - ba).abs() <= 1e-7 * (1.0 + ab));
    }

    #[test]
    fn flat_distance_matches_reference(seed in any::<u64>(), d in 2usize..5, k in 0usize..2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let body = random_body(&mut rng, d, false, 5);
        let base = gaussian(&mut rng, d);
        let spanning: Vec<_> = (0..k).map(|_| gaussian(&mut rng, d)).collect();
        let flat = AffineFlat::new(base.clone(), &spanning).unwrap();
        let got = dist_body_flat(&body, &flat).unwrap();
        let want = body_flat_distance(&body, &base, &spanning);
        prop_assert!((got - want).abs() <= 1e-7 * (1.0 + want), "{got} vs {want}");
        prop_assert!(got <= point_distance(&body, &base) + 1e-9);
    }

    #[test]
    fn projection_preserves_flat_distance(seed in any::<u64>(), d in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let body = random_body(&mut rng, d, false, 5);
        let u = Direction::new(gaussian(&mut rng, d)).unwrap();
        let flat = AffineFlat::new(gaussian(&mut rng, d), &[u.as_vector().clone()]).unwrap();
        let along = AffineFlat::through_origin(&[u]).unwrap();
        let projected = body.project(&along).unwrap();
        let point = along.complement_coords(flat.base()).unwrap();
        let lifted = dist_body_flat(&body, &flat).unwrap();
        let reduced = projected.distance_to_point(&point).unwrap();
        prop_assert!((lifted - reduced).abs() <= 1e-7 * (1.0 + lifted));
    }

    #[test]
    fn bounds_are_ordered(n in 3usize..40, r in 2usize..8, k in 0usize..7) {
        prop_assume!(r <= n && k < r);
        let single = helly_bound(n, r).unwrap();
        let colorful = colorful_bound(r).unwrap();
        prop_assert!(single <= colorful + 1e-15);
        prop_assert!(colorful <= kflat_bound(r, k).unwrap() + 1e-15);
        prop_assert_eq!(kflat_bound(r, 0).unwrap(), colorful);
    }

    #[test]
    fn intersection_point_lies_in_every_body(seed in any::<u64>(), d in 1usize..5, m in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let common_point = gaussian(&mut rng, d) * 0.3;
        let bodies: Vec<ConvexBody> = (0..m)
            .map(|_| {
                let g = gaussian(&mut rng, d);
                let offset = &g * (0.9 / g.norm().max(1.0));
                ConvexBody::ball(&common_point + offset, 1.0).unwrap()
            })
            .collect();
        let b = gaussian(&mut rng, d) * 3.0;
        match nearest_in_intersection(&bodies, &b, &SolverConfig::default()).unwrap() {
            IntersectionOutcome::Nearest { point, distance } => {
                for body in &bodies {
                    prop_assert!(point_distance(body, &point) <= 1e-6);
                }
                prop_assert!(distance <= (&b - &common_point).norm() + 1e-6);
            }
            IntersectionOutcome::Infeasible { .. } => prop_assert!(false, "balls share a point"),
        }
    }

    #[test]
    fn colorful_certificate_beats_bound(seed in any::<u64>(), d in 1usize..4, r in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let center = gaussian(&mut rng, d);
        let families: Vec<Family> = (0..r)
            .map(|i| {
                let bodies = (0..2)
                    .map(|_| ConvexBody::ball(&center + gaussian(&mut rng, d) * 0.2, 0.5).unwrap())
                    .collect();
                Family::new(format!("F{i}"), bodies).unwrap()
            })
            .collect();
        let cert = minimax_center(&families, CenterMode::Colorful, &SolverConfig::default()).unwrap();
        let best = cert.family_values.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!((cert.max_distance - best).abs() <= 1e-9);
        let flat = reduce_and_lift(&families, &[], &SolverConfig::default()).unwrap();
        prop_assert!((flat.max_distance - flat.projected_value).abs() <= 1e-7);
    }
}
