//! Point–body, body–body, body–flat and intersection distances.

use nalgebra::{DMatrix, DVector};

use crate::bodies::{ConvexBody, ALIGN_TOL};
use crate::error::{check_dim, domain, Error, Result};
use crate::geom::{AffineFlat, Direction, Vector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Seed for randomized restarts.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-9,
            max_iter: 10_000,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 || self.max_iter == 0 {
            return Err(domain("solver config needs tol > 0 and max_iter ≥ 1"));
        }
        Ok(())
    }
}

/// Result of a min-norm-point solve over the convex hull of a vertex list.
#[derive(Debug, Clone)]
pub struct MinNorm {
    pub point: Vector,
    pub distance: f64,
    pub weights: Vec<f64>,
    /// Final duality gap; bounds `⟨q−p, x−p⟩` for every hull point `x`.
    pub gap: f64,
    pub iterations: usize,
}

const MIN_NORM_REL: f64 = 1e-12;
const MIN_NORM_FLOOR: f64 = 1e-15;
const MIN_NORM_MAX_ITER: usize = 10_000;

/// Nearest point to `q` in the convex hull of `vertices`, by Wolfe's
/// min-norm-point algorithm: a corral of affinely independent vertices is
/// grown by the Frank–Wolfe vertex and shrunk whenever the affine minimizer
/// leaves its hull.
pub fn min_norm_point(vertices: &[Vector], q: &Vector) -> MinNorm {
    let n = vertices.len();
    let p: Vec<Vector> = vertices.iter().map(|v| v - q).collect();
    let scale = p.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let start = (0..n)
        .min_by(|&a, &b| p[a].norm_squared().total_cmp(&p[b].norm_squared()))
        .unwrap_or(0);
    let mut corral = vec![start];
    let mut lambda = vec![1.0];
    let mut x = p[start].clone();
    let mut gap = 0.0;
    let mut iterations = 0;
    while scale > 0.0 && iterations < MIN_NORM_MAX_ITER {
        iterations += 1;
        let dist = x.norm();
        if dist <= MIN_NORM_FLOOR * scale {
            gap = 0.0;
            break;
        }
        let (j, pj) = (0..n)
            .map(|i| (i, p[i].dot(&x)))
            .fold((0, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc });
        gap = x.norm_squared() - pj;
        if gap <= MIN_NORM_REL * scale * dist + MIN_NORM_FLOOR * scale * scale || corral.contains(&j) {
            break;
        }
        if corral.len() > q.len() {
            break;
        }
        corral.push(j);
        lambda.push(0.0);
        loop {
            let Some(alpha) = affine_min_norm(&p, &corral) else {
                corral.pop();
                lambda.pop();
                break;
            };
            if alpha.iter().all(|a| *a > 0.0) {
                lambda = alpha;
                break;
            }
            let theta = lambda
                .iter()
                .zip(&alpha)
                .filter(|(_, a)| **a <= 0.0)
                .map(|(l, a)| l / (l - a))
                .fold(1.0, f64::min);
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = theta * a + (1.0 - theta) * *l;
            }
            let drop = (0..lambda.len())
                .min_by(|&a, &b| lambda[a].total_cmp(&lambda[b]))
                .expect("nonempty corral");
            let keep: Vec<usize> = (0..lambda.len()).filter(|&i| i != drop && lambda[i] > 0.0).collect();
            corral = keep.iter().map(|&i| corral[i]).collect();
            lambda = keep.iter().map(|&i| lambda[i]).collect();
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
        }
        x = combine(&p, &corral, &lambda);
    }
    let mut weights = vec![0.0; n];
    for (&i, l) in corral.iter().zip(&lambda) {
        weights[i] = *l;
    }
    let distance = x.norm();
    MinNorm {
        point: x + q,
        distance,
        weights,
        gap: gap.max(0.0),
        iterations,
    }
}

/// Weights of the point of `aff{p_i : i ∈ corral}` nearest to the origin.
fn affine_min_norm(p: &[Vector], corral: &[usize]) -> Option<Vec<f64>> {
    let m = corral.len();
    let mut a = DMatrix::zeros(m + 1, m + 1);
    let mut rhs = DVector::zeros(m + 1);
    for i in 0..m {
        for j in 0..=i {
            let g = p[corral[i]].dot(&p[corral[j]]);
            a[(i, j)] = g;
            a[(j, i)] = g;
        }
        a[(i, m)] = 1.0;
        a[(m, i)] = 1.0;
    }
    rhs[m] = 1.0;
    let sol = a.lu().solve(&rhs)?;
    let alpha: Vec<f64> = (0..m).map(|i| sol[i]).collect();
    alpha.iter().all(|a| a.is_finite()).then_some(alpha)
}

fn combine(p: &[Vector], corral: &[usize], lambda: &[f64]) -> Vector {
    let mut x = Vector::zeros(p[0].len());
    for (&i, l) in corral.iter().zip(lambda) {
        x.axpy(*l, &p[i], 1.0);
    }
    x
}

/// Distance between a flat and a half-space: zero as soon as the flat has a
/// direction leaving the boundary hyperplane.
pub fn dist_flat_halfspace(flat: &AffineFlat, normal: &Direction, offset: f64) -> Result<f64> {
    check_dim(flat.ambient_dim(), normal.dim())?;
    let n = normal.as_vector();
    if flat.along_component(n) > ALIGN_TOL {
        return Ok(0.0);
    }
    Ok((offset - n.dot(flat.base())).max(0.0))
}

/// `inf { ‖x − y‖ : x ∈ C, y ∈ K }`, computed by projecting `C` into `K⊥`.
pub fn dist_body_flat(body: &ConvexBody, flat: &AffineFlat) -> Result<f64> {
    check_dim(flat.ambient_dim(), body.dim())?;
    if let ConvexBody::HalfSpace { normal, offset } = body {
        return dist_flat_halfspace(flat, normal, *offset);
    }
    if flat.k() == flat.ambient_dim() {
        return Ok(0.0);
    }
    let projected = body.project(flat)?;
    let origin = Vector::zeros(projected.dim());
    Ok(projected.nearest_unchecked(&origin).1.max(0.0))
}

/// `inf { ‖x − y‖ : x ∈ C1, y ∈ C2 }` by alternating projections with a
/// support-function lower bound as stopping certificate.
pub fn dist_body_body(c1: &ConvexBody, c2: &ConvexBody, cfg: &SolverConfig) -> Result<f64> {
    check_dim(c1.dim(), c2.dim())?;
    cfg.validate()?;
    if let ConvexBody::HalfSpace { normal, offset } = c2 {
        return Ok((offset - c1.support_vec(normal.as_vector())).max(0.0));
    }
    if let ConvexBody::HalfSpace { normal, offset } = c1 {
        return Ok((offset - c2.support_vec(normal.as_vector())).max(0.0));
    }
    let mut x = c1.representative_point();
    let mut y = c2.nearest_unchecked(&x).0;
    let mut best = f64::INFINITY;
    let mut gap = f64::INFINITY;
    for _ in 0..cfg.max_iter {
        x = c1.nearest_unchecked(&y).0;
        y = c2.nearest_unchecked(&x).0;
        let diff = &y - &x;
        let upper = diff.norm();
        best = best.min(upper);
        if upper <= cfg.tol {
            return Ok(upper);
        }
        let u = diff / upper;
        let lower = -c2.support_vec(&(-&u)) - c1.support_vec(&u);
        gap = upper - lower.max(0.0);
        if gap <= cfg.tol {
            return Ok(upper);
        }
    }
    Err(Error::IterationLimit {
        iterations: cfg.max_iter,
        best,
        gap,
    })
}

/// Outcome of [`nearest_in_intersection`].
#[derive(Debug, Clone, PartialEq)]
pub enum IntersectionOutcome {
    Nearest { point: Vector, distance: f64 },
    Infeasible { residual: f64, cycles: usize },
}

impl IntersectionOutcome {
    /// Distance to the intersection, `+∞` when infeasible.
    pub fn distance(&self) -> f64 {
        match self {
            IntersectionOutcome::Nearest { distance, .. } => *distance,
            IntersectionOutcome::Infeasible { .. } => f64::INFINITY,
        }
    }
}

const INFEASIBLE_WINDOW: usize = 100;

/// Nearest point of `∩ bodies` to `b` by Dykstra's cyclic projections.
///
/// Emptiness is declared when the residual `max_i d(x, C_i)` stays above
/// `10·tol` for `100` consecutive cycles, stops decreasing, and the
/// correction terms keep growing.
pub fn nearest_in_intersection(bodies: &[ConvexBody], b: &Vector, cfg: &SolverConfig) -> Result<IntersectionOutcome> {
    cfg.validate()?;
    let first = bodies.first().ok_or_else(|| domain("intersection of an empty list"))?;
    for c in bodies {
        check_dim(first.dim(), c.dim())?;
    }
    check_dim(first.dim(), b.len())?;
    if bodies.len() == 1 {
        let (point, distance) = first.nearest_unchecked(b);
        return Ok(IntersectionOutcome::Nearest { point, distance });
    }
    let m = bodies.len();
    let mut x = b.clone();
    let mut corrections = vec![Vector::zeros(b.len()); m];
    let mut residuals: Vec<f64> = Vec::new();
    let mut correction_norms: Vec<f64> = Vec::new();
    let mut streak = 0usize;
    let mut residual = f64::INFINITY;
    let mut displacement = f64::INFINITY;
    for cycle in 1..=cfg.max_iter {
        let start = x.clone();
        for (c, p) in bodies.iter().zip(corrections.iter_mut()) {
            let shifted = &x + &*p;
            let y = c.nearest_unchecked(&shifted).0;
            *p = shifted - &y;
            x = y;
        }
        displacement = (&x - &start).norm();
        residual = bodies.iter().map(|c| c.nearest_unchecked(&x).1).fold(0.0, f64::max);
        if residual <= cfg.tol && displacement <= cfg.tol {
            let distance = (&x - b).norm();
            return Ok(IntersectionOutcome::Nearest { point: x, distance });
        }
        let correction_norm = corrections.iter().map(|p| p.norm()).sum::<f64>();
        residuals.push(residual);
        correction_norms.push(correction_norm);
        streak = if residual >= 10.0 * cfg.tol { streak + 1 } else { 0 };
        if streak >= INFEASIBLE_WINDOW && cycle > INFEASIBLE_WINDOW {
            let past = cycle - 1 - INFEASIBLE_WINDOW;
            let stalled = residual >= 0.99 * residuals[past];
            let growing = correction_norm - correction_norms[past] >= 10.0 * residual;
            if stalled && growing && separated(bodies, &corrections) {
                return Ok(IntersectionOutcome::Infeasible {
                    residual,
                    cycles: cycle,
                });
            }
        }
    }
    Err(Error::Indeterminate {
        cycles: cfg.max_iter,
        residual,
        displacement,
    })
}

/// Certificate of an empty intersection: vectors `u_i` summing to zero with
/// `Σ h_i(u_i) < 0`, built from the Dykstra corrections.
fn separated(bodies: &[ConvexBody], corrections: &[Vector]) -> bool {
    let total: Vector = corrections
        .iter()
        .fold(Vector::zeros(corrections[0].len()), |acc, p| acc + p);
    let mut best = f64::INFINITY;
    for j in 0..bodies.len() {
        if bodies[j].is_halfspace() {
            continue;
        }
        let mut sum = 0.0;
        let mut scale = 0.0;
        for (i, (c, p)) in bodies.iter().zip(corrections).enumerate() {
            let u = if i == j { p - &total } else { p.clone() };
            let h = c.support_vec(&u);
            sum += h;
            scale += h.abs() + u.norm();
        }
        if sum.is_finite() && scale > 0.0 {
            best = best.min(sum / scale);
        }
    }
    best < -1e-9
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::vector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn cube_edge_against_vertical_axis() {
        let s = FRAC_1_SQRT_2;
        let ab = ConvexBody::segment(vector(&[-s, -s, s]), vector(&[s, -s, s])).unwrap();
        let z = AffineFlat::through_origin(&[Direction::axis(3, 2)]).unwrap();
        assert!((dist_body_flat(&ab, &z).unwrap() - s).abs() < 1e-15);
    }

    #[test]
    fn intersecting_body_has_zero_flat_distance() {
        let ball = ConvexBody::ball(vector(&[0.5, 0.0, 0.0]), 1.0).unwrap();
        let z = AffineFlat::through_origin(&[Direction::axis(3, 2)]).unwrap();
        assert_eq!(dist_body_flat(&ball, &z).unwrap(), 0.0);
    }

    #[test]
    fn flat_halfspace_cases() {
        let n = Direction::axis(2, 1);
        let tilted = AffineFlat::line(vector(&[0.0, 0.0]), &vector(&[1.0, 1.0])).unwrap();
        assert_eq!(dist_flat_halfspace(&tilted, &n, 2.0).unwrap(), 0.0);
        let parallel = AffineFlat::line(vector(&[0.0, 0.0]), &vector(&[1.0, 0.0])).unwrap();
        assert_eq!(dist_flat_halfspace(&parallel, &n, 2.0).unwrap(), 2.0);
        for t in [-1.5, -0.3, 0.0, 0.7, 1.9] {
            let line = AffineFlat::line(vector(&[0.0, t]), &vector(&[1.0, 0.0])).unwrap();
            let up = dist_flat_halfspace(&line, &n, 2.0).unwrap();
            let down = dist_flat_halfspace(&line, &(-&n), 2.0).unwrap();
            assert!((up.max(down) - (2.0 + t.abs())).abs() < 1e-15);
        }
    }

    #[test]
    fn ball_ball_distances() {
        let a = ConvexBody::ball(vector(&[0.0, 0.0]), 1.0).unwrap();
        let b = ConvexBody::ball(vector(&[4.0, 0.0]), 1.0).unwrap();
        assert!((dist_body_body(&a, &b, &cfg()).unwrap() - 2.0).abs() < 1e-9);
        let c = ConvexBody::ball(vector(&[1.5, 0.0]), 1.0).unwrap();
        assert!(dist_body_body(&a, &c, &cfg()).unwrap() < 1e-9);
    }

    fn segment_segment_closed_form(p0: &Vector, p1: &Vector, q0: &Vector, q1: &Vector) -> f64 {
        let d1 = p1 - p0;
        let d2 = q1 - q0;
        let r = p0 - q0;
        let a = d1.dot(&d1);
        let e = d2.dot(&d2);
        let f = d2.dot(&r);
        let c = d1.dot(&r);
        let b = d1.dot(&d2);
        let denom = a * e - b * b;
        let mut s = if denom > 1e-14 {
            ((b * f - c * e) / denom).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let mut t = (b * s + f) / e;
        if t < 0.0 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else if t > 1.0 {
            t = 1.0;
            s = ((b - c) / a).clamp(0.0, 1.0);
        }
        ((p0 + d1 * s) - (q0 + d2 * t)).norm()
    }

    #[test]
    fn skew_segments_match_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let pts: Vec<Vector> = (0..4)
                .map(|_| Vector::from_fn(3, |_, _| rng.gen_range(-2.0..2.0)))
                .collect();
            let s1 = ConvexBody::segment(pts[0].clone(), pts[1].clone()).unwrap();
            let s2 = ConvexBody::segment(pts[2].clone(), pts[3].clone()).unwrap();
            let got = dist_body_body(&s1, &s2, &cfg()).unwrap();
            let want = segment_segment_closed_form(&pts[0], &pts[1], &pts[2], &pts[3]);
            assert!((got - want).abs() < 1e-7, "{got} vs {want}");
        }
    }

    #[test]
    fn lens_tip_is_nearest() {
        let bodies = [
            ConvexBody::ball(vector(&[0.0, 0.0]), 1.0).unwrap(),
            ConvexBody::ball(vector(&[1.0, 0.0]), 1.0).unwrap(),
        ];
        match nearest_in_intersection(&bodies, &vector(&[3.0, 0.0]), &cfg()).unwrap() {
            IntersectionOutcome::Nearest { point, distance } => {
                assert!((point - vector(&[1.0, 0.0])).norm() < 1e-9);
                assert!((distance - 2.0).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn singleton_intersection_is_nearest_point() {
        let c = ConvexBody::segment(vector(&[0.0, 1.0]), vector(&[1.0, 1.0])).unwrap();
        let b = vector(&[3.0, 0.0]);
        let got = nearest_in_intersection(std::slice::from_ref(&c), &b, &cfg()).unwrap();
        let (p, d) = c.nearest_point(&b).unwrap();
        assert_eq!(got, IntersectionOutcome::Nearest { point: p, distance: d });
    }

    #[test]
    fn disjoint_balls_are_infeasible() {
        let bodies = [
            ConvexBody::ball(vector(&[10.0, 0.0]), 1.0).unwrap(),
            ConvexBody::ball(vector(&[-10.0, 0.0]), 1.0).unwrap(),
        ];
        let out = nearest_in_intersection(&bodies, &vector(&[0.0, 0.0]), &cfg()).unwrap();
        assert!(matches!(out, IntersectionOutcome::Infeasible { .. }));
    }

    fn halfplane_oracle(planes: &[(Vector, f64)], b: &Vector) -> f64 {
        let feasible = |x: &Vector| planes.iter().all(|(n, o)| n.dot(x) >= o - 1e-12);
        let mut candidates = vec![b.clone()];
        for (n, o) in planes {
            candidates.push(b + n * (o - n.dot(b)));
        }
        for i in 0..planes.len() {
            for j in i + 1..planes.len() {
                let (n1, o1) = &planes[i];
                let (n2, o2) = &planes[j];
                let det = n1[0] * n2[1] - n1[1] * n2[0];
                if det.abs() > 1e-12 {
                    candidates.push(vector(&[
                        (o1 * n2[1] - o2 * n1[1]) / det,
                        (n1[0] * o2 - n2[0] * o1) / det,
                    ]));
                }
            }
        }
        candidates
            .iter()
            .filter(|x| feasible(x))
            .map(|x| (x - b).norm())
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn halfplanes_with_common_point_match_candidate_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let common = Vector::from_fn(2, |_, _| rng.gen_range(-1.0..1.0));
            let planes: Vec<(Vector, f64)> = (0..3)
                .map(|_| {
                    let ang: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    let n = vector(&[ang.cos(), ang.sin()]);
                    let off = n.dot(&common) - rng.gen_range(0.0..0.5);
                    (n, off)
                })
                .collect();
            let bodies: Vec<ConvexBody> = planes
                .iter()
                .map(|(n, o)| ConvexBody::halfspace(n.clone(), *o).unwrap())
                .collect();
            let b = Vector::from_fn(2, |_, _| rng.gen_range(-3.0..3.0));
            let got = nearest_in_intersection(&bodies, &b, &cfg()).unwrap().distance();
            let want = halfplane_oracle(&planes, &b);
            assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        }
    }

    #[test]
    fn min_norm_handles_interior_and_duplicates() {
        let vs = vec![
            vector(&[-1.0, -1.0]),
            vector(&[1.0, -1.0]),
            vector(&[0.0, 1.0]),
            vector(&[0.0, 1.0]),
        ];
        let r = min_norm_point(&vs, &vector(&[0.0, 0.0]));
        assert!(r.distance < 1e-11);
        let w: f64 = r.weights.iter().sum();
        assert!((w - 1.0).abs() < 1e-12);
    }
}
