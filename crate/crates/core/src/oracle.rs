//! Brute-force grid searches over line and plane space with local
//! refinement. These are the ground truth the analytic modules are checked
//! against; values returned are upper bounds on the true infimum up to grid
//! resolution.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::bodies::ConvexBody;
use crate::error::{domain, Result};
use crate::geom::{vector, AffineFlat, Direction, Vector};

const SUBGRID_HALF: i32 = 8;
const REFINE_FACTOR: f64 = 8.0;
const TOP_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub direction_resolution: usize,
    pub offset_resolution: usize,
    pub offset_window: f64,
    pub refinement_rounds: usize,
}

impl GridSpec {
    pub fn new(
        direction_resolution: usize,
        offset_resolution: usize,
        offset_window: f64,
        refinement_rounds: usize,
    ) -> Result<Self> {
        let spec = GridSpec {
            direction_resolution,
            offset_resolution,
            offset_window,
            refinement_rounds,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Offset window set to four times the circumradius (about the origin)
    /// of the bounded bodies.
    pub fn for_bodies(
        bodies: &[ConvexBody],
        direction_resolution: usize,
        offset_resolution: usize,
        refinement_rounds: usize,
    ) -> Result<Self> {
        Self::new(
            direction_resolution,
            offset_resolution,
            4.0 * circumradius(bodies).max(1e-3),
            refinement_rounds,
        )
    }

    fn validate(&self) -> Result<()> {
        if self.direction_resolution < 2 || self.offset_resolution < 2 {
            return Err(domain("grid resolutions must be at least 2"));
        }
        if !(self.offset_window > 0.0 && self.offset_window.is_finite()) {
            return Err(domain("offset window must be positive"));
        }
        Ok(())
    }
}

/// Largest distance from the origin to a point of a bounded body; half-spaces
/// contribute the distance of their boundary.
pub fn circumradius(bodies: &[ConvexBody]) -> f64 {
    bodies
        .iter()
        .map(|b| match b {
            ConvexBody::Ball { center, radius } => center.norm() + radius,
            ConvexBody::HalfSpace { offset, .. } => offset.abs(),
            other => other.generators().iter().map(|v| v.norm()).fold(0.0, f64::max),
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub flat: AffineFlat,
    pub value: f64,
    /// Best value after the coarse grid and after each refinement round.
    pub round_values: Vec<f64>,
    pub evaluations: usize,
}

type Vec3 = [f64; 3];
type Vec2 = [f64; 2];

fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Orthonormal frame `(e1, e2)` of the plane orthogonal to unit `u`.
fn frame(u: &Vec3) -> (Vec3, Vec3) {
    let i = (0..3).min_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs())).unwrap_or(0);
    let mut axis = [0.0; 3];
    axis[i] = 1.0;
    let c = dot3(&axis, u);
    let mut e1 = [axis[0] - c * u[0], axis[1] - c * u[1], axis[2] - c * u[2]];
    let n = dot3(&e1, &e1).sqrt();
    e1.iter_mut().for_each(|x| *x /= n);
    let e2 = cross3(u, &e1);
    (e1, e2)
}

fn hemisphere_direction(z: f64, phi: f64) -> Vec3 {
    let rho = (1.0 - z * z).max(0.0).sqrt();
    [rho * phi.cos(), rho * phi.sin(), z]
}

/// A line objective that can be specialized once per direction, so the
/// inner offset loop runs on cheap 2-D data.
pub trait LineObjective: Sync {
    /// Returns the objective restricted to lines with direction `u`, as a
    /// function of the offset `(a, b)` in the frame `(e1, e2)`.
    fn prepare<'a>(&'a self, u: &Vec3, e1: &Vec3, e2: &Vec3) -> Box<dyn Fn(f64, f64) -> f64 + 'a>;
}

/// `line ↦ max_i d(line, C_i)` for bodies in `ℝ³`.
#[derive(Debug, Clone)]
pub struct MaxDistanceToBodies {
    bodies: Vec<ConvexBody>,
}

impl MaxDistanceToBodies {
    /// Duplicate bodies are dropped; the objective is unchanged.
    pub fn new(bodies: &[ConvexBody]) -> Result<Self> {
        let mut unique: Vec<ConvexBody> = Vec::new();
        for b in bodies {
            if b.dim() != 3 {
                return Err(domain("line oracle bodies must live in R^3"));
            }
            if !unique.contains(b) {
                unique.push(b.clone());
            }
        }
        Ok(MaxDistanceToBodies { bodies: unique })
    }

    pub fn bodies(&self) -> &[ConvexBody] {
        &self.bodies
    }
}

/// `line ↦ d(line, p)`.
#[derive(Debug, Clone)]
pub struct DistanceToPoint(pub Vec3);

/// Any `Fn(&AffineFlat) -> f64`, evaluated by building each line.
pub struct FlatFn<F>(pub F);

enum Body2 {
    Segment(Vec2, Vec2),
    Disk(Vec2, f64),
    Polygon(Vec<Vec2>),
    HalfPlane(Vec2, f64),
    Everything,
}

fn to2(x: &Vector, e1: &Vec3, e2: &Vec3) -> Vec2 {
    [
        x[0] * e1[0] + x[1] * e1[1] + x[2] * e1[2],
        x[0] * e2[0] + x[1] * e2[1] + x[2] * e2[2],
    ]
}

fn cross2(o: &Vec2, a: &Vec2, b: &Vec2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull, counter-clockwise, by the monotone chain.
fn hull2(mut pts: Vec<Vec2>) -> Vec<Vec2> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Vec2> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross2(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<Vec2> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross2(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn seg_dist2(p: &Vec2, a: &Vec2, b: &Vec2) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let dx = ap[0] - t * ab[0];
    let dy = ap[1] - t * ab[1];
    (dx * dx + dy * dy).sqrt()
}

impl Body2 {
    fn from_body(body: &ConvexBody, u: &Vec3, e1: &Vec3, e2: &Vec3) -> Body2 {
        match body {
            ConvexBody::Segment { a, b } => Body2::Segment(to2(a, e1, e2), to2(b, e1, e2)),
            ConvexBody::Ball { center, radius } => Body2::Disk(to2(center, e1, e2), *radius),
            ConvexBody::VPolytope { vertices } => {
                let pts = hull2(vertices.iter().map(|v| to2(v, e1, e2)).collect());
                match pts.len() {
                    1 => Body2::Segment(pts[0], pts[0]),
                    2 => Body2::Segment(pts[0], pts[1]),
                    _ => Body2::Polygon(pts),
                }
            }
            ConvexBody::HalfSpace { normal, offset } => {
                let n = normal.as_vector();
                let n3 = [n[0], n[1], n[2]];
                if dot3(&n3, u).abs() > crate::bodies::ALIGN_TOL {
                    Body2::Everything
                } else {
                    let n2 = [dot3(&n3, e1), dot3(&n3, e2)];
                    let len = (n2[0] * n2[0] + n2[1] * n2[1]).sqrt();
                    Body2::HalfPlane([n2[0] / len, n2[1] / len], *offset)
                }
            }
        }
    }

    fn distance(&self, p: &Vec2) -> f64 {
        match self {
            Body2::Segment(a, b) => seg_dist2(p, a, b),
            Body2::Disk(c, r) => ((p[0] - c[0]).hypot(p[1] - c[1]) - r).max(0.0),
            Body2::Polygon(pts) => {
                let n = pts.len();
                let inside = (0..n).all(|i| cross2(&pts[i], &pts[(i + 1) % n], p) >= 0.0);
                if inside {
                    0.0
                } else {
                    (0..n)
                        .map(|i| seg_dist2(p, &pts[i], &pts[(i + 1) % n]))
                        .fold(f64::INFINITY, f64::min)
                }
            }
            Body2::HalfPlane(n, offset) => (offset - n[0] * p[0] - n[1] * p[1]).max(0.0),
            Body2::Everything => 0.0,
        }
    }
}

impl LineObjective for MaxDistanceToBodies {
    fn prepare<'a>(&'a self, u: &Vec3, e1: &Vec3, e2: &Vec3) -> Box<dyn Fn(f64, f64) -> f64 + 'a> {
        let shapes: Vec<Body2> = self.bodies.iter().map(|b| Body2::from_body(b, u, e1, e2)).collect();
        Box::new(move |a, b| {
            let p = [a, b];
            shapes.iter().map(|s| s.distance(&p)).fold(0.0, f64::max)
        })
    }
}

impl LineObjective for DistanceToPoint {
    fn prepare<'a>(&'a self, _u: &Vec3, e1: &Vec3, e2: &Vec3) -> Box<dyn Fn(f64, f64) -> f64 + 'a> {
        let p = [dot3(&self.0, e1), dot3(&self.0, e2)];
        Box::new(move |a, b| (a - p[0]).hypot(b - p[1]))
    }
}

impl<F: Fn(&AffineFlat) -> f64 + Sync> LineObjective for FlatFn<F> {
    fn prepare<'a>(&'a self, u: &Vec3, e1: &Vec3, e2: &Vec3) -> Box<dyn Fn(f64, f64) -> f64 + 'a> {
        let (u, e1, e2) = (*u, *e1, *e2);
        Box::new(move |a, b| {
            let p = vector(&[a * e1[0] + b * e2[0], a * e1[1] + b * e2[1], a * e1[2] + b * e2[2]]);
            match AffineFlat::line(p, &vector(&u)) {
                Ok(line) => (self.0)(&line),
                Err(_) => f64::INFINITY,
            }
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct LineCandidate {
    z: f64,
    phi: f64,
    point: Vec3,
    value: f64,
}

fn offsets(n: usize, window: f64) -> Vec<f64> {
    (0..n)
        .map(|k| -window + 2.0 * window * k as f64 / (n - 1) as f64)
        .collect()
}

fn top_indices(values: &[f64]) -> Vec<usize> {
    let keep = ((values.len() as f64 * TOP_FRACTION).ceil() as usize).max(1);
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx.truncate(keep);
    idx
}

fn best_of<T: Copy>(items: &[T], value: impl Fn(&T) -> f64) -> Option<T> {
    items.iter().copied().fold(None, |acc: Option<T>, c| match acc {
        Some(a) if value(&a) <= value(&c) => Some(a),
        _ => Some(c),
    })
}

fn refine_line<O: LineObjective + ?Sized>(
    objective: &O,
    seed: LineCandidate,
    hz: f64,
    hphi: f64,
    hoff: f64,
) -> LineCandidate {
    let mut best = seed;
    for dz in -SUBGRID_HALF..=SUBGRID_HALF {
        let mut z = seed.z + dz as f64 * hz;
        let mut phi0 = seed.phi;
        if z < 0.0 {
            z = -z;
            phi0 += PI;
        }
        if z > 1.0 {
            continue;
        }
        for dphi in -SUBGRID_HALF..=SUBGRID_HALF {
            let phi = phi0 + dphi as f64 * hphi;
            let u = hemisphere_direction(z, phi);
            let (e1, e2) = frame(&u);
            let a0 = dot3(&seed.point, &e1);
            let b0 = dot3(&seed.point, &e2);
            let f = objective.prepare(&u, &e1, &e2);
            for da in -SUBGRID_HALF..=SUBGRID_HALF {
                let a = a0 + da as f64 * hoff;
                for db in -SUBGRID_HALF..=SUBGRID_HALF {
                    let b = b0 + db as f64 * hoff;
                    let v = f(a, b);
                    if v < best.value {
                        best = LineCandidate {
                            z,
                            phi,
                            point: [a * e1[0] + b * e2[0], a * e1[1] + b * e2[1], a * e1[2] + b * e2[2]],
                            value: v,
                        };
                    }
                }
            }
        }
    }
    best
}

/// Minimizes a line objective over lines of `ℝ³`: directions on the upper
/// hemisphere (`z ∈ [0,1]` × `φ ∈ [0,2π)`) and offsets in the orthogonal
/// plane, followed by refinement of the best 1% of direction cells.
pub fn best_line_r3<O: LineObjective + ?Sized>(objective: &O, spec: &GridSpec) -> Result<OracleResult> {
    spec.validate()?;
    let r = spec.direction_resolution;
    let m = spec.offset_resolution;
    let offs = offsets(m, spec.offset_window);
    let cells: Vec<LineCandidate> = (0..r * r)
        .into_par_iter()
        .map(|idx| {
            let (j, i) = (idx / r, idx % r);
            let z = j as f64 / (r - 1) as f64;
            let phi = TAU * i as f64 / r as f64;
            let u = hemisphere_direction(z, phi);
            let (e1, e2) = frame(&u);
            let f = objective.prepare(&u, &e1, &e2);
            let mut best = (f64::INFINITY, 0.0, 0.0);
            for &a in &offs {
                for &b in &offs {
                    let v = f(a, b);
                    if v < best.0 {
                        best = (v, a, b);
                    }
                }
            }
            LineCandidate {
                z,
                phi,
                point: [
                    best.1 * e1[0] + best.2 * e2[0],
                    best.1 * e1[1] + best.2 * e2[1],
                    best.1 * e1[2] + best.2 * e2[2],
                ],
                value: best.0,
            }
        })
        .collect();
    let mut evaluations = r * r * m * m;
    let mut incumbent = best_of(&cells, |c| c.value).expect("nonempty grid");
    let mut round_values = vec![incumbent.value];
    let values: Vec<f64> = cells.iter().map(|c| c.value).collect();
    let mut seeds: Vec<LineCandidate> = top_indices(&values).into_iter().map(|i| cells[i]).collect();
    let (mut hz, mut hphi, mut hoff) = (
        1.0 / (r - 1) as f64,
        TAU / r as f64,
        2.0 * spec.offset_window / (m - 1) as f64,
    );
    let sub = (2 * SUBGRID_HALF + 1) as usize;
    for _ in 0..spec.refinement_rounds {
        hz /= REFINE_FACTOR;
        hphi /= REFINE_FACTOR;
        hoff /= REFINE_FACTOR;
        seeds = seeds
            .par_iter()
            .map(|s| refine_line(objective, *s, hz, hphi, hoff))
            .collect();
        evaluations += seeds.len() * sub.pow(4);
        if let Some(b) = best_of(&seeds, |c| c.value) {
            if b.value < incumbent.value {
                incumbent = b;
            }
        }
        round_values.push(incumbent.value);
    }
    let u = hemisphere_direction(incumbent.z, incumbent.phi);
    let flat = AffineFlat::line(vector(&incumbent.point), &vector(&u))?;
    Ok(OracleResult {
        flat,
        value: incumbent.value,
        round_values,
        evaluations,
    })
}

/// Axis of a two-parameter grid.
#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    n: usize,
    /// Periodic axes sample `[lo, hi)`; others `[lo, hi]` with clamping.
    periodic: bool,
}

impl Axis {
    fn step(&self) -> f64 {
        if self.periodic {
            (self.hi - self.lo) / self.n as f64
        } else {
            (self.hi - self.lo) / (self.n - 1) as f64
        }
    }

    fn at(&self, k: usize) -> f64 {
        self.lo + self.step() * k as f64
    }

    fn admit(&self, x: f64) -> Option<f64> {
        if self.periodic {
            let p = self.hi - self.lo;
            Some(self.lo + (x - self.lo).rem_euclid(p))
        } else if x < self.lo - 1e-15 || x > self.hi + 1e-15 {
            None
        } else {
            Some(x.clamp(self.lo, self.hi))
        }
    }
}

fn grid_search_2d(
    eval: &(dyn Fn(f64, f64) -> f64 + Sync),
    ax: Axis,
    ay: Axis,
    rounds: usize,
) -> (f64, f64, f64, Vec<f64>, usize) {
    let cells: Vec<(f64, f64, f64)> = (0..ax.n * ay.n)
        .into_par_iter()
        .map(|idx| {
            let (x, y) = (ax.at(idx / ay.n), ay.at(idx % ay.n));
            (x, y, eval(x, y))
        })
        .collect();
    let mut evaluations = cells.len();
    let mut incumbent = best_of(&cells, |c| c.2).expect("nonempty grid");
    let mut round_values = vec![incumbent.2];
    let values: Vec<f64> = cells.iter().map(|c| c.2).collect();
    let mut seeds: Vec<(f64, f64, f64)> = top_indices(&values).into_iter().map(|i| cells[i]).collect();
    let (mut hx, mut hy) = (ax.step(), ay.step());
    for _ in 0..rounds {
        hx /= REFINE_FACTOR;
        hy /= REFINE_FACTOR;
        seeds = seeds
            .par_iter()
            .map(|&seed| {
                let mut best = seed;
                for dx in -SUBGRID_HALF..=SUBGRID_HALF {
                    let Some(x) = ax.admit(seed.0 + dx as f64 * hx) else {
                        continue;
                    };
                    for dy in -SUBGRID_HALF..=SUBGRID_HALF {
                        let Some(y) = ay.admit(seed.1 + dy as f64 * hy) else {
                            continue;
                        };
                        let v = eval(x, y);
                        if v < best.2 {
                            best = (x, y, v);
                        }
                    }
                }
                best
            })
            .collect();
        evaluations += seeds.len() * ((2 * SUBGRID_HALF + 1) as usize).pow(2);
        if let Some(b) = best_of(&seeds, |c| c.2) {
            if b.2 < incumbent.2 {
                incumbent = b;
            }
        }
        round_values.push(incumbent.2);
    }
    (incumbent.0, incumbent.1, incumbent.2, round_values, evaluations)
}

/// The line of `ℝ²` with direction angle `theta` and signed offset `t`
/// along the normal `(−sin θ, cos θ)`.
pub fn line_r2(theta: f64, t: f64) -> AffineFlat {
    let (s, c) = theta.sin_cos();
    AffineFlat::line(vector(&[-s * t, c * t]), &vector(&[c, s])).expect("unit direction")
}

/// Minimizes a line objective over lines of `ℝ²`: angle `θ ∈ [0, π)` times
/// offset `t ∈ [−W, W]`.
pub fn best_line_r2<F>(objective: F, spec: &GridSpec) -> Result<OracleResult>
where
    F: Fn(&AffineFlat) -> f64 + Sync,
{
    spec.validate()?;
    let ax = Axis {
        lo: 0.0,
        hi: PI,
        n: spec.direction_resolution,
        periodic: true,
    };
    let ay = Axis {
        lo: -spec.offset_window,
        hi: spec.offset_window,
        n: spec.offset_resolution,
        periodic: false,
    };
    let eval = |theta: f64, t: f64| objective(&line_r2(theta, t));
    let (theta, t, value, round_values, evaluations) = grid_search_2d(&eval, ax, ay, spec.refinement_rounds);
    Ok(OracleResult {
        flat: line_r2(theta, t),
        value,
        round_values,
        evaluations,
    })
}

/// Unit normal `(cos ψ cos φ, cos ψ sin φ, sin ψ)`.
pub fn plane_normal(phi: f64, psi: f64) -> Direction {
    let (sp, cp) = psi.sin_cos();
    Direction::new(vector(&[cp * phi.cos(), cp * phi.sin(), sp])).expect("unit normal")
}

/// Default number of refinement rounds for plane searches.
pub const PLANE_ROUNDS: usize = 3;

/// Minimizes an objective over planes through the origin of `ℝ³`, with the
/// default number of refinement rounds.
pub fn best_plane_through_origin_r3<F>(objective: F, resolution: usize) -> Result<OracleResult>
where
    F: Fn(&AffineFlat) -> f64 + Sync,
{
    best_plane_through_origin_r3_with(objective, resolution, PLANE_ROUNDS)
}

/// Plane search over normals `φ ∈ [0, π)` × `ψ ∈ [−π/2, π/2]`.
pub fn best_plane_through_origin_r3_with<F>(objective: F, resolution: usize, rounds: usize) -> Result<OracleResult>
where
    F: Fn(&AffineFlat) -> f64 + Sync,
{
    if resolution < 2 {
        return Err(domain("plane resolution must be at least 2"));
    }
    let ax = Axis {
        lo: 0.0,
        hi: PI,
        n: resolution,
        periodic: true,
    };
    let ay = Axis {
        lo: -PI / 2.0,
        hi: PI / 2.0,
        n: resolution | 1,
        periodic: false,
    };
    let eval = |phi: f64, psi: f64| objective(&AffineFlat::hyperplane(&plane_normal(phi, psi), 0.0));
    let (phi, psi, value, round_values, evaluations) = grid_search_2d(&eval, ax, ay, rounds);
    Ok(OracleResult {
        flat: AffineFlat::hyperplane(&plane_normal(phi, psi), 0.0),
        value,
        round_values,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::dist_body_flat;

    #[test]
    fn line_through_fixed_point() {
        let spec = GridSpec::new(16, 16, 3.0, 2).unwrap();
        let res = best_line_r3(&DistanceToPoint([0.3, -0.7, 1.1]), &spec).unwrap();
        assert!(res.value < 1e-3, "{}", res.value);
        let p = vector(&[0.3, -0.7, 1.1]);
        assert!(res.flat.distance_to_point(&p).unwrap() < 1e-3);
    }

    #[test]
    fn prepared_objective_matches_flat_distance() {
        let bodies = vec![
            ConvexBody::segment(vector(&[1.0, 0.0, 0.0]), vector(&[0.0, 2.0, 1.0])).unwrap(),
            ConvexBody::ball(vector(&[-1.0, 1.0, 0.5]), 0.3).unwrap(),
            ConvexBody::vpolytope(vec![
                vector(&[0.0, 0.0, 2.0]),
                vector(&[1.0, 0.0, 2.5]),
                vector(&[0.0, 1.0, 3.0]),
                vector(&[0.5, 0.5, 1.0]),
            ])
            .unwrap(),
        ];
        let obj = MaxDistanceToBodies::new(&bodies).unwrap();
        for (z, phi, a, b) in [(0.2, 0.3, 0.1, -0.4), (0.9, 4.0, 1.5, 0.2), (0.0, 1.0, -2.0, 2.0)] {
            let u = hemisphere_direction(z, phi);
            let (e1, e2) = frame(&u);
            let fast = obj.prepare(&u, &e1, &e2)(a, b);
            let p = vector(&[a * e1[0] + b * e2[0], a * e1[1] + b * e2[1], a * e1[2] + b * e2[2]]);
            let line = AffineFlat::line(p, &vector(&u)).unwrap();
            let slow = bodies
                .iter()
                .map(|c| dist_body_flat(c, &line).unwrap())
                .fold(0.0, f64::max);
            assert!((fast - slow).abs() < 1e-9, "{fast} vs {slow}");
        }
    }

    #[test]
    fn refinement_is_monotone_and_deterministic() {
        let bodies: Vec<ConvexBody> = [[1.0, 0.0, 0.0], [-0.5, 0.8, 0.3], [0.2, -0.9, -0.6]]
            .iter()
            .map(|c| ConvexBody::ball(vector(c), 0.2).unwrap())
            .collect();
        let obj = MaxDistanceToBodies::new(&bodies).unwrap();
        let spec = GridSpec::for_bodies(&bodies, 12, 12, 3).unwrap();
        let a = best_line_r3(&obj, &spec).unwrap();
        let b = best_line_r3(&obj, &spec).unwrap();
        assert_eq!(a, b);
        assert!(a.round_values.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn single_halfplane_is_reached() {
        let h = ConvexBody::halfspace(vector(&[0.0, 1.0]), 2.0).unwrap();
        let spec = GridSpec::new(36, 21, 4.0, 1).unwrap();
        let res = best_line_r2(|l: &AffineFlat| dist_body_flat(&h, l).unwrap(), &spec).unwrap();
        assert_eq!(res.value, 0.0);
    }

    #[test]
    fn ball_at_origin_is_hit_by_every_plane() {
        let ball = ConvexBody::ball(vector(&[0.0, 0.0, 0.0]), 0.5).unwrap();
        let res = best_plane_through_origin_r3(|p: &AffineFlat| dist_body_flat(&ball, p).unwrap(), 10).unwrap();
        assert_eq!(res.value, 0.0);
    }

    #[test]
    fn hull_of_square_with_interior_point() {
        let h = hull2(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]]);
        assert_eq!(h.len(), 4);
    }
}
