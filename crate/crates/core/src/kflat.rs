//! Limiting-direction estimation, k-unboundedness, and the projection
//! reduction that turns a colorful point certificate in `K⊥` into a k-flat.

use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::{AnyFamily, ConvexBody, Family, GeneratedFamily};
use crate::distance::{dist_body_flat, SolverConfig};
use crate::error::{domain, Result};
use crate::geom::{central_projection, numerical_rank, AffineFlat, Direction, Vector, DEFLATION_TOL};
use crate::helly::{kflat_bound, minimax_center, CenterMode};

/// Probe indices used when a family's limiting directions are estimated.
pub const DEFAULT_PROBES: [usize; 4] = [10, 100, 1000, 10_000];

/// Default angular clustering radius for [`estimate_lds`].
pub const DEFAULT_CLUSTER_RADIUS: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionSource {
    Estimated,
    Declared,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionDiagnostic {
    pub source: DirectionSource,
    /// Probe indices whose representative points formed the cluster.
    pub indices: Vec<usize>,
    /// Angle between the last two normalized members.
    pub residual: f64,
    /// Norms of the representative points, in probe order.
    pub norms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LdsEstimate {
    pub directions: Vec<Direction>,
    pub diagnostics: Vec<DirectionDiagnostic>,
    pub note: Option<String>,
}

impl LdsEstimate {
    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

struct Cluster {
    indices: Vec<usize>,
    units: Vec<Direction>,
    norms: Vec<f64>,
}

/// Estimates the limiting directions of a generated family from the
/// representative points of the probed bodies.
///
/// Normalized points are clustered greedily (a point joins a cluster when it
/// is within angle `tol` of the cluster's latest member). A cluster is
/// reported when it has at least two members with strictly increasing norms;
/// its direction is the latest member. Declared directions are appended.
pub fn estimate_lds(family: &GeneratedFamily, probe_indices: &[usize], tol: f64) -> Result<LdsEstimate> {
    if probe_indices.len() < 2 {
        return Err(domain("estimate_lds needs at least two probe indices"));
    }
    if probe_indices.windows(2).any(|w| w[0] >= w[1]) || probe_indices[0] == 0 {
        return Err(domain("probe indices must be positive and strictly increasing"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(domain("estimate_lds needs tol > 0"));
    }
    let mut clusters: Vec<Cluster> = Vec::new();
    for &n in probe_indices {
        let s = family.body_at(n)?.representative_point();
        let norm = s.norm();
        let Ok(u) = central_projection(&s) else {
            continue;
        };
        match clusters
            .iter_mut()
            .find(|c| c.units.last().is_some_and(|last| last.angle_to(&u) < tol))
        {
            Some(c) => {
                c.indices.push(n);
                c.units.push(u);
                c.norms.push(norm);
            }
            None => clusters.push(Cluster {
                indices: vec![n],
                units: vec![u],
                norms: vec![norm],
            }),
        }
    }
    let mut directions = Vec::new();
    let mut diagnostics = Vec::new();
    for c in clusters {
        let diverging = c.units.len() >= 2 && c.norms.windows(2).all(|w| w[1] > w[0]);
        if !diverging {
            continue;
        }
        let m = c.units.len();
        diagnostics.push(DirectionDiagnostic {
            source: DirectionSource::Estimated,
            indices: c.indices,
            residual: c.units[m - 2].angle_to(&c.units[m - 1]),
            norms: c.norms,
        });
        directions.push(c.units[m - 1].clone());
    }
    let note = directions
        .is_empty()
        .then(|| "representative points do not diverge along any probed cluster".to_string());
    for d in &family.declared_limiting_directions {
        if directions.iter().any(|e: &Direction| e.angle_to(d) < 1e-12) {
            continue;
        }
        diagnostics.push(DirectionDiagnostic {
            source: DirectionSource::Declared,
            indices: Vec::new(),
            residual: 0.0,
            norms: Vec::new(),
        });
        directions.push(d.clone());
    }
    Ok(LdsEstimate {
        directions,
        diagnostics,
        note,
    })
}

/// Whether the pooled directions of `estimates` span at least `k` dimensions.
pub fn is_k_unbounded(estimates: &[LdsEstimate], k: usize, tol: f64) -> Result<bool> {
    let pooled: Vec<Vector> = estimates
        .iter()
        .flat_map(|e| e.directions.iter().map(|d| d.as_vector().clone()))
        .collect();
    Ok(numerical_rank(&pooled, tol)? >= k)
}

/// Rank of the pooled directions of `estimates`.
pub fn lds_rank(estimates: &[LdsEstimate], tol: f64) -> Result<usize> {
    let pooled: Vec<Vector> = estimates
        .iter()
        .flat_map(|e| e.directions.iter().map(|d| d.as_vector().clone()))
        .collect();
    numerical_rank(&pooled, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatCertificate {
    pub flat: AffineFlat,
    /// Family index `j` (0-based).
    pub family_index: usize,
    pub max_distance: f64,
    pub bound: f64,
    /// Minimax point in the `K⊥` coordinates of the direction space.
    pub witness: Vector,
    /// Minimax value in `K⊥`; equals `max_distance` by the lifting identity.
    pub projected_value: f64,
    /// Body of family `j` (0-based) achieving `max_distance`.
    pub argmax: Option<usize>,
    pub r: usize,
    pub k: usize,
    pub converged: bool,
}

impl FlatCertificate {
    pub fn margin(&self) -> f64 {
        self.bound - self.max_distance
    }
}

fn max_flat_distance(bodies: &[ConvexBody], flat: &AffineFlat) -> Result<(f64, Option<usize>)> {
    let ds = bodies
        .par_iter()
        .map(|b| dist_body_flat(b, flat))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ds.iter().enumerate().fold((0.0, None), |acc, (i, d)| {
        if acc.1.is_none() || *d > acc.0 {
            (*d, Some(i))
        } else {
            acc
        }
    }))
}

/// Projects families `k..r` into the orthogonal complement of
/// `span(directions)`, solves the colorful point problem there, and lifts the
/// winning point to the k-flat `K′ = q′ + span(directions)`.
pub fn reduce_and_lift(families: &[Family], directions: &[Direction], cfg: &SolverConfig) -> Result<FlatCertificate> {
    let r = families.len();
    let k = directions.len();
    let bound = kflat_bound(r, k)?;
    let d = families
        .iter()
        .find_map(|f| f.dim())
        .ok_or_else(|| domain("reduce_and_lift on empty families"))?;
    let base = if k == 0 {
        AffineFlat::point(Vector::zeros(d))
    } else {
        let vs: Vec<Vector> = directions.iter().map(|u| u.as_vector().clone()).collect();
        let rank = numerical_rank(&vs, DEFLATION_TOL)?;
        if rank != k {
            return Err(domain(format!("directions have rank {rank}, expected {k}")));
        }
        AffineFlat::through_origin(directions)?
    };
    let projected = families[k..]
        .iter()
        .map(|f| f.project(&base))
        .collect::<Result<Vec<_>>>()?;
    let point = minimax_center(&projected, CenterMode::Colorful, cfg)?;
    let j = k + point.family_index.unwrap_or(0);
    let lifted = base.lift(&point.q)?;
    let flat = base.translated_to(lifted)?;
    let (max_distance, argmax) = max_flat_distance(&families[j].bodies, &flat)?;
    Ok(FlatCertificate {
        flat,
        family_index: j,
        max_distance,
        bound,
        witness: point.q,
        projected_value: point.max_distance,
        argmax,
        r,
        k,
        converged: point.converged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KflatReport {
    pub family_index: usize,
    pub bodies_checked: usize,
    pub max_distance: f64,
    pub argmax: Option<usize>,
    pub bound: f64,
    pub margin: f64,
    pub passed: bool,
}

/// Recomputes the distance from the certificate flat to every body of
/// family `j` (generated families truncated) and compares with the bound.
pub fn verify_kflat_bound(
    cert: &FlatCertificate,
    families: &[AnyFamily],
    truncation: usize,
    tol: f64,
) -> Result<KflatReport> {
    let family = families
        .get(cert.family_index)
        .ok_or_else(|| domain(format!("no family with index {}", cert.family_index)))?
        .materialize(truncation)?;
    let (max_distance, argmax) = max_flat_distance(&family.bodies, &cert.flat)?;
    let margin = cert.bound - max_distance;
    Ok(KflatReport {
        family_index: cert.family_index,
        bodies_checked: family.len(),
        max_distance,
        argmax,
        bound: cert.bound,
        margin,
        passed: margin >= -tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessCheck {
    pub max_body_distance: f64,
    pub origin_distance: f64,
    pub passed: bool,
}

/// Checks that `flat` meets every body (within `tol`) and passes within
/// `1 + tol` of the origin.
pub fn check_witness_flat(bodies: &[ConvexBody], flat: &AffineFlat, tol: f64) -> Result<WitnessCheck> {
    let mut max_body_distance: f64 = 0.0;
    for b in bodies {
        max_body_distance = max_body_distance.max(dist_body_flat(b, flat)?);
    }
    let origin_distance = flat.base().norm();
    Ok(WitnessCheck {
        max_body_distance,
        origin_distance,
        passed: max_body_distance <= tol && origin_distance <= 1.0 + tol,
    })
}
