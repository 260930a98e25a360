//! Claim reports for the compactness and elevated-region constructions.

use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::aronov::{
    aronov_elevated_family, aronov_max_profile, aronov_min_max, aronov_polygons, default_heights, side_threshold,
    AronovParams,
};
use super::compactness::{compactness_family, continuum_objective, family_objective, piercing_line, TANGENT_RADIUS};
use super::Claim;
use crate::bodies::ConvexBody;
use crate::distance::dist_body_flat;
use crate::error::{domain, Result};
use crate::geom::{vector, AffineFlat, Direction};
use crate::kflat::{estimate_lds, is_k_unbounded, DEFAULT_CLUSTER_RADIUS};
use crate::oracle::{best_line_r2, best_plane_through_origin_r3_with, GridSpec};

#[derive(Debug, Clone)]
pub struct CompactnessReportConfig {
    pub subsets: usize,
    pub subset_size: usize,
    pub seed: u64,
    pub grid: GridSpec,
    pub tol: f64,
}

impl CompactnessReportConfig {
    pub fn new(resolution: usize, rounds: usize, seed: u64) -> Result<Self> {
        Ok(CompactnessReportConfig {
            subsets: 1000,
            subset_size: 5,
            seed,
            grid: GridSpec::new(resolution, resolution, 4.0 * TANGENT_RADIUS, rounds)?,
            tol: 1e-9,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactnessReport {
    pub m: usize,
    pub claims: Vec<Claim>,
    pub subsets_checked: usize,
    pub worst_subset_distance: f64,
    pub oracle_value: f64,
    pub oracle_round_values: Vec<f64>,
    pub oracle_line_point: Vec<f64>,
    pub oracle_line_direction: Vec<f64>,
    /// Line-grid minimum of the max distance over the `m` listed half-planes.
    pub finite_family_value: f64,
}

impl CompactnessReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }
}

/// Random subsets of the tangent half-planes are pierced by lines through
/// the origin, while no line comes within distance 2 of every tangent
/// half-plane of the circle.
pub fn compactness_claims_report(m: usize, cfg: &CompactnessReportConfig) -> Result<CompactnessReport> {
    let family = compactness_family(m)?;
    if cfg.subset_size == 0 || cfg.subset_size > m {
        return Err(domain("subset size must be between 1 and m"));
    }
    let normals: Vec<Direction> = family
        .bodies
        .iter()
        .map(|b| match b {
            ConvexBody::HalfSpace { normal, .. } => normal.clone(),
            _ => unreachable!("compactness family holds half-planes"),
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let picks: Vec<Vec<usize>> = (0..cfg.subsets)
        .map(|_| sample(&mut rng, m, cfg.subset_size).into_vec())
        .collect();
    let worst = picks
        .par_iter()
        .map(|pick| -> Result<f64> {
            let sub: Vec<Direction> = pick.iter().map(|&i| normals[i].clone()).collect();
            let line = piercing_line(&sub)?;
            let mut w: f64 = line.base().norm();
            for &i in pick {
                w = w.max(dist_body_flat(&family.bodies[i], &line)?);
            }
            Ok(w)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let mut claims = vec![Claim::new(
        "subsets_pierced_through_origin",
        worst <= cfg.tol,
        worst,
        0.0,
        cfg.tol,
        format!("{} random {}-subsets", cfg.subsets, cfg.subset_size),
    )];
    let res = best_line_r2(
        |l: &AffineFlat| continuum_objective(l).unwrap_or(f64::INFINITY),
        &cfg.grid,
    )?;
    claims.push(Claim::new(
        "no_line_near_all_tangents",
        res.value >= 1.9,
        res.value,
        TANGENT_RADIUS,
        0.1,
        "line-grid min over lines of sup distance to the tangent half-planes",
    ));
    let finite = best_line_r2(
        |l: &AffineFlat| family_objective(&family, l).unwrap_or(f64::INFINITY),
        &cfg.grid,
    )?;
    Ok(CompactnessReport {
        m,
        claims,
        subsets_checked: cfg.subsets,
        worst_subset_distance: worst,
        oracle_value: res.value,
        oracle_round_values: res.round_values,
        oracle_line_point: res.flat.base().iter().copied().collect(),
        oracle_line_direction: res.flat.basis()[0].iter().copied().collect(),
        finite_family_value: finite.value,
    })
}

#[derive(Debug, Clone)]
pub struct AronovReportConfig {
    pub theta_grid: usize,
    pub plane_resolution: usize,
    pub plane_rounds: usize,
    pub truncation: usize,
    pub profile_samples: usize,
    pub triples: usize,
    pub probes: Vec<usize>,
    pub seed: u64,
    pub oracle_tol: f64,
}

impl Default for AronovReportConfig {
    fn default() -> Self {
        AronovReportConfig {
            theta_grid: 10_000,
            plane_resolution: 128,
            plane_rounds: 3,
            truncation: 24,
            profile_samples: 64,
            triples: 20,
            probes: vec![10, 100, 1000],
            seed: 0,
            oracle_tol: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AronovReport {
    pub side_lengths: [f64; 4],
    pub threshold: f64,
    pub claims: Vec<Claim>,
    pub min_max_theta: f64,
    pub min_max_value: f64,
    pub plane_oracle_value: f64,
    pub plane_oracle_round_values: Vec<f64>,
    pub lds_direction: Vec<Vec<f64>>,
}

impl AronovReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }
}

/// Profiles, min-max value, 3-D plane oracle on the elevated family, and its
/// limiting directions.
pub fn aronov_claims_report(params: &AronovParams, cfg: &AronovReportConfig) -> Result<AronovReport> {
    let [l1, ..] = params.side_lengths;
    let threshold = side_threshold();
    let (theta, value) = aronov_min_max(params, cfg.theta_grid)?;
    let lower = l1 / 2f64.sqrt() * (PI / 8.0).sin();
    let mut claims = vec![Claim::new(
        "min_max_lower_bound",
        value >= lower - 1e-12,
        value,
        lower,
        1e-12,
        "θ-grid min of the largest profile against (ℓ₁/√2)·sin(π/8)",
    )];
    if l1 > threshold {
        claims.push(Claim::new(
            "no_plane_within_unit_distance",
            value > 1.0,
            value,
            1.0,
            0.0,
            format!("ℓ₁ = {l1} exceeds √2/sin(π/8) = {threshold:.6}"),
        ));
    }

    let family = aronov_elevated_family(aronov_polygons(params), default_heights)?;
    let bodies = family.truncate(cfg.truncation)?.bodies;
    let max_dist = |plane: &AffineFlat| -> f64 {
        bodies
            .iter()
            .map(|b| dist_body_flat(b, plane).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    };

    let mut worst_profile: f64 = 0.0;
    for s in 0..cfg.profile_samples {
        let th = PI * (s as f64 + 0.5) / cfg.profile_samples as f64;
        let plane = AffineFlat::hyperplane(&Direction::new(vector(&[-th.sin(), th.cos(), 0.0]))?, 0.0);
        worst_profile = worst_profile.max((max_dist(&plane) - aronov_max_profile(th, params)?).abs());
    }
    claims.push(Claim::new(
        "vertical_planes_match_profiles",
        worst_profile <= 1e-9,
        worst_profile,
        0.0,
        1e-9,
        format!(
            "{} trace angles, elevated family truncated at {}",
            cfg.profile_samples, cfg.truncation
        ),
    ));

    let res = best_plane_through_origin_r3_with(max_dist, cfg.plane_resolution, cfg.plane_rounds)?;
    claims.push(Claim::new(
        "plane_oracle_matches_min_max",
        (res.value - value).abs() <= cfg.oracle_tol,
        res.value,
        value,
        cfg.oracle_tol,
        "min over planes through the origin of max distance to the elevated family",
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst_triple: f64 = 0.0;
    for _ in 0..cfg.triples {
        let pick = sample(&mut rng, bodies.len(), 3).into_vec();
        let three: Vec<ConvexBody> = pick.iter().map(|&i| bodies[i].clone()).collect();
        let obj = |plane: &AffineFlat| {
            three
                .iter()
                .map(|b| dist_body_flat(b, plane).unwrap_or(f64::INFINITY))
                .fold(0.0, f64::max)
        };
        let r = best_plane_through_origin_r3_with(obj, 64, 3)?;
        worst_triple = worst_triple.max(r.value);
    }
    claims.push(Claim::new(
        "triples_pierced_by_planes_through_origin",
        worst_triple <= 1e-6,
        worst_triple,
        0.0,
        1e-6,
        format!("{} random triples", cfg.triples),
    ));

    let est = estimate_lds(&family, &cfg.probes, DEFAULT_CLUSTER_RADIUS)?;
    let ez = Direction::axis(3, 2);
    let angle = est
        .directions
        .iter()
        .map(|u| u.angle_to(&ez).min(u.angle_to(&-&ez)))
        .fold(f64::INFINITY, f64::min);
    claims.push(Claim::new(
        "limiting_direction_vertical",
        est.directions.len() == 1 && angle <= 1e-3,
        angle,
        0.0,
        1e-3,
        "angle between the estimated limiting direction and ±e₃",
    ));
    let one = is_k_unbounded(std::slice::from_ref(&est), 1, 1e-6)?;
    let two = is_k_unbounded(std::slice::from_ref(&est), 2, 1e-6)?;
    claims.push(Claim::new(
        "one_unbounded_not_two",
        one && !two,
        if one && !two { 1.0 } else { 0.0 },
        1.0,
        0.0,
        format!("1-unbounded: {one}, 2-unbounded: {two}"),
    ));

    Ok(AronovReport {
        side_lengths: params.side_lengths,
        threshold,
        claims,
        min_max_theta: theta,
        min_max_value: value,
        plane_oracle_value: res.value,
        plane_oracle_round_values: res.round_values,
        lds_direction: est
            .directions
            .iter()
            .map(|u| u.as_vector().iter().copied().collect())
            .collect(),
    })
}
