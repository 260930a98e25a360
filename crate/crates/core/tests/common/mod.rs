//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use itertools::Itertools;
use kflat_core::{ConvexBody, Vector};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> Vector {
    Vector::from_fn(d, |_, _| rng.sample(StandardNormal))
}

/// Minimum norm over the affine hull of `pts`, if the minimizer lies in
/// their convex hull.
fn affine_min_norm(pts: &[&Vector]) -> Option<f64> {
    let m = pts.len();
    let mut a = DMatrix::zeros(m + 1, m + 1);
    let mut rhs = DVector::zeros(m + 1);
    for i in 0..m {
        for j in 0..m {
            a[(i, j)] = pts[i].dot(pts[j]);
        }
        a[(i, m)] = 1.0;
        a[(m, i)] = 1.0;
    }
    rhs[m] = 1.0;
    let sol = a.lu().solve(&rhs)?;
    if (0..m).any(|i| sol[i] < -1e-12 || !sol[i].is_finite()) {
        return None;
    }
    let p = pts
        .iter()
        .enumerate()
        .fold(Vector::zeros(pts[0].len()), |acc, (i, v)| acc + *v * sol[i]);
    Some(p.norm())
}

/// Distance from the origin to `conv(pts)` by enumerating every face
/// spanned by at most `dim + 1` points.
pub fn hull_distance(pts: &[Vector]) -> f64 {
    let dim = pts[0].len();
    let mut best = f64::INFINITY;
    for size in 1..=(dim + 1).min(pts.len()) {
        for subset in pts.iter().combinations(size) {
            if let Some(v) = affine_min_norm(&subset) {
                best = best.min(v);
            }
        }
    }
    best
}

/// Component of `x − base` orthogonal to `span(spanning)`, through the
/// normal equations of the raw spanning vectors.
pub fn residual(x: &Vector, base: &Vector, spanning: &[Vector]) -> Vector {
    let y = x - base;
    if spanning.is_empty() {
        return y;
    }
    let b = DMatrix::from_columns(spanning);
    let gram = b.transpose() * &b;
    let coef = gram
        .lu()
        .solve(&(b.transpose() * &y))
        .expect("independent spanning set");
    y - b * coef
}

/// Exact distance from a body to the flat `base + span(spanning)`.
pub fn body_flat_distance(body: &ConvexBody, base: &Vector, spanning: &[Vector]) -> f64 {
    match body {
        ConvexBody::Ball { center, radius } => (residual(center, base, spanning).norm() - radius).max(0.0),
        ConvexBody::Segment { a, b } => hull_distance(&[residual(a, base, spanning), residual(b, base, spanning)]),
        ConvexBody::VPolytope { vertices } => {
            let pts: Vec<Vector> = vertices.iter().map(|v| residual(v, base, spanning)).collect();
            hull_distance(&pts)
        }
        ConvexBody::HalfSpace { normal, offset } => {
            let n = normal.as_vector();
            let parallel = spanning.iter().all(|s| n.dot(s).abs() <= 1e-12 * s.norm());
            if parallel {
                (offset - n.dot(base)).max(0.0)
            } else {
                0.0
            }
        }
    }
}

fn points(body: &ConvexBody) -> Vec<Vector> {
    match body {
        ConvexBody::Segment { a, b } => vec![a.clone(), b.clone()],
        ConvexBody::VPolytope { vertices } => vertices.clone(),
        _ => unreachable!("polytope expected"),
    }
}

/// Exact distance between two bodies, neither a half-space unless the
/// other is bounded.
pub fn body_body_distance(c1: &ConvexBody, c2: &ConvexBody) -> f64 {
    match (c1, c2) {
        (ConvexBody::Ball { center: a, radius: r }, ConvexBody::Ball { center: b, radius: s }) => {
            ((a - b).norm() - r - s).max(0.0)
        }
        (ConvexBody::Ball { center, radius }, other) | (other, ConvexBody::Ball { center, radius }) => {
            (point_distance(other, center) - radius).max(0.0)
        }
        (ConvexBody::HalfSpace { normal, offset }, other) | (other, ConvexBody::HalfSpace { normal, offset }) => {
            let n = normal.as_vector();
            points(other)
                .iter()
                .map(|v| (offset - n.dot(v)).max(0.0))
                .fold(f64::INFINITY, f64::min)
        }
        (p, q) => {
            let diffs: Vec<Vector> = points(p)
                .iter()
                .flat_map(|a| points(q).into_iter().map(move |b| a - b))
                .collect();
            hull_distance(&diffs)
        }
    }
}

/// Exact distance from `x` to a body.
pub fn point_distance(body: &ConvexBody, x: &Vector) -> f64 {
    match body {
        ConvexBody::Ball { center, radius } => ((x - center).norm() - radius).max(0.0),
        ConvexBody::HalfSpace { normal, offset } => (offset - normal.as_vector().dot(x)).max(0.0),
        other => {
            let pts: Vec<Vector> = points(other).iter().map(|v| v - x).collect();
            hull_distance(&pts)
        }
    }
}

/// Checks that `p` is the nearest point of `body` to `q`: `p` lies in the
/// body and `⟨q − p, x − p⟩ ≤ 0` for every `x` in it.
pub fn variational_inequality(body: &ConvexBody, q: &Vector, p: &Vector, tol: f64) -> bool {
    let g = q - p;
    match body {
        ConvexBody::Ball { center, radius } => {
            (p - center).norm() <= radius + tol && g.dot(&(center - p)) + radius * g.norm() <= tol
        }
        ConvexBody::HalfSpace { normal, offset } => {
            let n = normal.as_vector();
            let along = g.dot(n);
            let ortho = (&g - n * along).norm();
            n.dot(p) >= offset - tol
                && along <= tol
                && ortho <= tol
                && (g.norm() <= tol || (n.dot(p) - offset).abs() <= tol)
        }
        other => {
            let pts = points(other);
            let inside = hull_distance(&pts.iter().map(|v| v - p).collect::<Vec<_>>()) <= tol;
            inside && pts.iter().all(|v| g.dot(&(v - p)) <= tol)
        }
    }
}

pub fn random_body(rng: &mut ChaCha8Rng, d: usize, allow_halfspace: bool, max_vertices: usize) -> ConvexBody {
    let kinds = if allow_halfspace { 4 } else { 3 };
    let shift = gaussian(rng, d) * 2.0;
    match rng.gen_range(0..kinds) {
        0 => ConvexBody::ball(shift, rng.gen_range(0.1..1.5)).unwrap(),
        1 => ConvexBody::segment(&shift + gaussian(rng, d), &shift + gaussian(rng, d)).unwrap(),
        2 => {
            let n = rng.gen_range(3..=max_vertices);
            ConvexBody::vpolytope((0..n).map(|_| &shift + gaussian(rng, d)).collect()).unwrap()
        }
        _ => ConvexBody::halfspace(gaussian(rng, d), rng.gen_range(-1.0..3.0)).unwrap(),
    }
}
