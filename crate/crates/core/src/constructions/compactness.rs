//! Half-planes beyond the tangents of the circle of radius 2: every finite
//! subfamily is pierced by a line through the origin, yet every line stays
//! at distance at least 2 from some tangent half-plane.

use std::f64::consts::{PI, TAU};

use crate::bodies::{ConvexBody, Family};
use crate::distance::dist_flat_halfspace;
use crate::error::{domain, Result};
use crate::geom::{vector, AffineFlat, Direction};

/// Radius of the circle the half-planes are tangent to.
pub const TANGENT_RADIUS: f64 = 2.0;

/// The `m` half-planes `{x : ⟨n_i, x⟩ ≥ 2}` with `n_i` at angle `2πi/m`.
pub fn compactness_family(m: usize) -> Result<Family> {
    if m < 3 {
        return Err(domain(format!("compactness family needs m ≥ 3, got {m}")));
    }
    let bodies = (0..m)
        .map(|i| {
            let a = TAU * i as f64 / m as f64;
            ConvexBody::halfspace(vector(&[a.cos(), a.sin()]), TANGENT_RADIUS)
        })
        .collect::<Result<Vec<_>>>()?;
    Family::new(format!("compactness-{m}"), bodies)
}

/// A line through the origin entering every given half-plane: its direction
/// bisects the largest angular gap between the directions it must avoid
/// (those orthogonal to a normal).
pub fn piercing_line(normals: &[Direction]) -> Result<AffineFlat> {
    if normals.is_empty() {
        return AffineFlat::line(vector(&[0.0, 0.0]), &vector(&[1.0, 0.0]));
    }
    let mut forbidden: Vec<f64> = normals
        .iter()
        .map(|n| {
            let v = n.as_vector();
            if v.len() != 2 {
                return Err(domain("piercing_line works in the plane"));
            }
            Ok((v[1].atan2(v[0]) + PI / 2.0).rem_euclid(PI))
        })
        .collect::<Result<_>>()?;
    forbidden.sort_by(f64::total_cmp);
    let mut best = (
        forbidden[forbidden.len() - 1],
        forbidden[0] + PI - forbidden[forbidden.len() - 1],
    );
    for w in forbidden.windows(2) {
        if w[1] - w[0] > best.1 {
            best = (w[0], w[1] - w[0]);
        }
    }
    let theta = best.0 + best.1 / 2.0;
    AffineFlat::line(vector(&[0.0, 0.0]), &vector(&[theta.cos(), theta.sin()]))
}

/// Supremum of the line–half-plane distance over the full continuum of
/// tangent half-planes. Only the two half-planes parallel to the line are at
/// positive distance, so the value is `2 + |t|` for a line at distance `t`
/// from the origin.
pub fn continuum_objective(line: &AffineFlat) -> Result<f64> {
    if line.ambient_dim() != 2 || line.k() != 1 {
        return Err(domain("continuum objective takes a line in the plane"));
    }
    let v = &line.basis()[0];
    let n = Direction::new(vector(&[-v[1], v[0]]))?;
    let a = dist_flat_halfspace(line, &n, TANGENT_RADIUS)?;
    let b = dist_flat_halfspace(line, &(-&n), TANGENT_RADIUS)?;
    Ok(a.max(b))
}

/// `max_C d(line, C)` over a finite family of half-planes.
pub fn family_objective(family: &Family, line: &AffineFlat) -> Result<f64> {
    let mut best: f64 = 0.0;
    for b in &family.bodies {
        best = best.max(crate::distance::dist_body_flat(b, line)?);
    }
    Ok(best)
}
