//! Convex bodies with exact nearest-point and support primitives, and the
//! finite and generated families built from them.

use std::fmt;
use std::sync::Arc;

use crate::distance::min_norm_point;
use crate::error::{check_dim, domain, Error, Result};
use crate::geom::{check_finite, AffineFlat, Direction, Vector};

/// Alignment threshold used to decide whether a half-space normal has a
/// component along a flat or a direction.
pub const ALIGN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody {
    Ball {
        center: Vector,
        radius: f64,
    },
    Segment {
        a: Vector,
        b: Vector,
    },
    VPolytope {
        vertices: Vec<Vector>,
    },
    /// `{x : ⟨normal, x⟩ ≥ offset}`
    HalfSpace {
        normal: Direction,
        offset: f64,
    },
}

impl ConvexBody {
    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        check_finite(&center)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(domain(format!("ball radius must be positive, got {radius}")));
        }
        Ok(ConvexBody::Ball { center, radius })
    }

    pub fn segment(a: Vector, b: Vector) -> Result<Self> {
        check_dim(a.len(), b.len())?;
        check_finite(&a)?;
        check_finite(&b)?;
        Ok(ConvexBody::Segment { a, b })
    }

    pub fn vpolytope(vertices: Vec<Vector>) -> Result<Self> {
        let first = vertices
            .first()
            .ok_or_else(|| domain("polytope needs at least one vertex"))?;
        let d = first.len();
        for v in &vertices {
            check_dim(d, v.len())?;
            check_finite(v)?;
        }
        Ok(ConvexBody::VPolytope { vertices })
    }

    pub fn halfspace(normal: Vector, offset: f64) -> Result<Self> {
        if !offset.is_finite() {
            return Err(Error::Input("non-finite half-space offset".into()));
        }
        Ok(ConvexBody::HalfSpace {
            normal: Direction::new(normal)?,
            offset,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Ball { center, .. } => center.len(),
            ConvexBody::Segment { a, .. } => a.len(),
            ConvexBody::VPolytope { vertices } => vertices[0].len(),
            ConvexBody::HalfSpace { normal, .. } => normal.dim(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConvexBody::Ball { .. } => "ball",
            ConvexBody::Segment { .. } => "segment",
            ConvexBody::VPolytope { .. } => "vpolytope",
            ConvexBody::HalfSpace { .. } => "halfspace",
        }
    }

    pub fn is_halfspace(&self) -> bool {
        matches!(self, ConvexBody::HalfSpace { .. })
    }

    /// Nearest point of the body to `q` and its distance.
    pub fn nearest_point(&self, q: &Vector) -> Result<(Vector, f64)> {
        check_dim(self.dim(), q.len())?;
        Ok(self.nearest_unchecked(q))
    }

    pub(crate) fn nearest_unchecked(&self, q: &Vector) -> (Vector, f64) {
        match self {
            ConvexBody::Ball { center, radius } => {
                let diff = q - center;
                let n = diff.norm();
                if n <= *radius {
                    (q.clone(), 0.0)
                } else {
                    (center + diff * (*radius / n), n - radius)
                }
            }
            ConvexBody::Segment { a, b } => {
                let p = clamp_to_segment(a, b, q);
                let d = (q - &p).norm();
                (p, d)
            }
            ConvexBody::VPolytope { vertices } => {
                if vertices.len() == 1 {
                    let d = (q - &vertices[0]).norm();
                    return (vertices[0].clone(), d);
                }
                if q.len() == 1 {
                    let lo = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
                    let hi = vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
                    let p = q[0].clamp(lo, hi);
                    return (Vector::from_element(1, p), (q[0] - p).abs());
                }
                let r = min_norm_point(vertices, q);
                (r.point, r.distance)
            }
            ConvexBody::HalfSpace { normal, offset } => {
                let n = normal.as_vector();
                let slack = offset - n.dot(q);
                if slack <= 0.0 {
                    (q.clone(), 0.0)
                } else {
                    (q + n * slack, slack)
                }
            }
        }
    }

    /// Distance from `q` to the body.
    pub fn distance_to_point(&self, q: &Vector) -> Result<f64> {
        Ok(self.nearest_point(q)?.1)
    }

    /// Support function `sup_{x∈C} ⟨u, x⟩`; `+∞` when unbounded along `u`.
    pub fn support(&self, u: &Direction) -> Result<f64> {
        check_dim(self.dim(), u.dim())?;
        Ok(self.support_vec(u.as_vector()))
    }

    /// Support function for an arbitrary (not necessarily unit) vector.
    pub(crate) fn support_vec(&self, u: &Vector) -> f64 {
        match self {
            ConvexBody::Ball { center, radius } => u.dot(center) + radius * u.norm(),
            ConvexBody::Segment { a, b } => u.dot(a).max(u.dot(b)),
            ConvexBody::VPolytope { vertices } => vertices.iter().map(|v| u.dot(v)).fold(f64::NEG_INFINITY, f64::max),
            ConvexBody::HalfSpace { normal, offset } => {
                let n = normal.as_vector();
                let un = u.norm();
                if un == 0.0 {
                    return 0.0;
                }
                // finite only when u is a nonpositive multiple of the normal
                if u.dot(n) <= -(1.0 - ALIGN_TOL) * un {
                    -un * offset
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Orthogonal projection of the body into the `K⊥` coordinates of `flat`.
    pub fn project(&self, flat: &AffineFlat) -> Result<ConvexBody> {
        check_dim(flat.ambient_dim(), self.dim())?;
        Ok(match self {
            ConvexBody::Ball { center, radius } => ConvexBody::Ball {
                center: flat.complement_coords_unchecked(center),
                radius: *radius,
            },
            ConvexBody::Segment { a, b } => ConvexBody::Segment {
                a: flat.complement_coords_unchecked(a),
                b: flat.complement_coords_unchecked(b),
            },
            ConvexBody::VPolytope { vertices } => ConvexBody::VPolytope {
                vertices: vertices.iter().map(|v| flat.complement_coords_unchecked(v)).collect(),
            },
            ConvexBody::HalfSpace { normal, offset } => {
                let n = normal.as_vector();
                if flat.along_component(n) > ALIGN_TOL {
                    return Err(Error::UnsupportedProjection(
                        "half-space normal has a component along the flat".into(),
                    ));
                }
                ConvexBody::HalfSpace {
                    normal: Direction::new(flat.complement_linear(n))?,
                    offset: offset - n.dot(flat.base()),
                }
            }
        })
    }

    /// Diameter; `+∞` for half-spaces.
    pub fn diameter(&self) -> f64 {
        match self {
            ConvexBody::Ball { radius, .. } => 2.0 * radius,
            ConvexBody::Segment { a, b } => (a - b).norm(),
            ConvexBody::VPolytope { vertices } => {
                let mut best: f64 = 0.0;
                for (i, u) in vertices.iter().enumerate() {
                    for v in &vertices[i + 1..] {
                        best = best.max((u - v).norm());
                    }
                }
                best
            }
            ConvexBody::HalfSpace { .. } => f64::INFINITY,
        }
    }

    /// A canonical interior point: center, midpoint, or vertex centroid.
    /// Half-spaces return the boundary point nearest the origin.
    pub fn representative_point(&self) -> Vector {
        match self {
            ConvexBody::Ball { center, .. } => center.clone(),
            ConvexBody::Segment { a, b } => (a + b) * 0.5,
            ConvexBody::VPolytope { vertices } => {
                let mut c = Vector::zeros(vertices[0].len());
                for v in vertices {
                    c += v;
                }
                c / vertices.len() as f64
            }
            ConvexBody::HalfSpace { normal, offset } => normal.as_vector() * *offset,
        }
    }

    /// The body moved by `shift`.
    pub fn translated(&self, shift: &Vector) -> Result<ConvexBody> {
        check_dim(self.dim(), shift.len())?;
        Ok(match self {
            ConvexBody::Ball { center, radius } => ConvexBody::Ball {
                center: center + shift,
                radius: *radius,
            },
            ConvexBody::Segment { a, b } => ConvexBody::Segment {
                a: a + shift,
                b: b + shift,
            },
            ConvexBody::VPolytope { vertices } => ConvexBody::VPolytope {
                vertices: vertices.iter().map(|v| v + shift).collect(),
            },
            ConvexBody::HalfSpace { normal, offset } => ConvexBody::HalfSpace {
                normal: normal.clone(),
                offset: offset + normal.as_vector().dot(shift),
            },
        })
    }

    /// Points spanning the body (center, endpoints, vertices). Empty for
    /// half-spaces.
    pub fn generators(&self) -> Vec<Vector> {
        match self {
            ConvexBody::Ball { center, .. } => vec![center.clone()],
            ConvexBody::Segment { a, b } => vec![a.clone(), b.clone()],
            ConvexBody::VPolytope { vertices } => vertices.clone(),
            ConvexBody::HalfSpace { .. } => Vec::new(),
        }
    }
}

pub(crate) fn clamp_to_segment(a: &Vector, b: &Vector, q: &Vector) -> Vector {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return a.clone();
    }
    let t = ((q - a).dot(&ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

/// `nearest_point(body, q)`.
pub fn nearest_point(body: &ConvexBody, q: &Vector) -> Result<(Vector, f64)> {
    body.nearest_point(q)
}

/// `support(body, u)`.
pub fn support(body: &ConvexBody, u: &Direction) -> Result<f64> {
    body.support(u)
}

/// `project_body(body, K)`.
pub fn project_body(body: &ConvexBody, flat: &AffineFlat) -> Result<ConvexBody> {
    body.project(flat)
}

/// A finite family of convex bodies.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub name: String,
    pub bodies: Vec<ConvexBody>,
    pub diameter_bound: Option<f64>,
    pub declared_limiting_directions: Vec<Direction>,
}

impl Family {
    pub fn new(name: impl Into<String>, bodies: Vec<ConvexBody>) -> Result<Self> {
        if let Some(first) = bodies.first() {
            let d = first.dim();
            for b in &bodies {
                check_dim(d, b.dim())?;
            }
        }
        Ok(Family {
            name: name.into(),
            bodies,
            diameter_bound: None,
            declared_limiting_directions: Vec::new(),
        })
    }

    /// Attaches a diameter bound, checking every body against it.
    pub fn with_diameter_bound(mut self, bound: f64) -> Result<Self> {
        for (i, b) in self.bodies.iter().enumerate() {
            if b.is_halfspace() {
                return Err(domain(format!(
                    "body {i} is a half-space; not allowed in a diameter-bounded family"
                )));
            }
            if b.diameter() > bound {
                return Err(domain(format!(
                    "body {i} has diameter {} above bound {bound}",
                    b.diameter()
                )));
            }
        }
        self.diameter_bound = Some(bound);
        Ok(self)
    }

    pub fn with_directions(mut self, directions: Vec<Direction>) -> Self {
        self.declared_limiting_directions = directions;
        self
    }

    pub fn dim(&self) -> Option<usize> {
        self.bodies.first().map(|b| b.dim())
    }

    pub fn len(&self) -> usize {
        self.bodies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bodies.is_empty()
    }

    /// Every body projected into the `K⊥` coordinates of `flat`.
    pub fn project(&self, flat: &AffineFlat) -> Result<Family> {
        let bodies = self
            .bodies
            .iter()
            .map(|b| b.project(flat))
            .collect::<Result<Vec<_>>>()?;
        Ok(Family {
            name: self.name.clone(),
            bodies,
            diameter_bound: self.diameter_bound,
            declared_limiting_directions: Vec::new(),
        })
    }
}

pub type BodyRule = Arc<dyn Fn(usize) -> ConvexBody + Send + Sync>;

/// An infinite family given by a deterministic rule `n ↦ body`, `n ≥ 1`.
#[derive(Clone)]
pub struct GeneratedFamily {
    pub name: String,
    dim: usize,
    rule: BodyRule,
    pub diameter_bound: Option<f64>,
    pub declared_limiting_directions: Vec<Direction>,
}

impl fmt::Debug for GeneratedFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratedFamily")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("diameter_bound", &self.diameter_bound)
            .field("declared_limiting_directions", &self.declared_limiting_directions)
            .finish_non_exhaustive()
    }
}

impl GeneratedFamily {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        rule: impl Fn(usize) -> ConvexBody + Send + Sync + 'static,
    ) -> Self {
        GeneratedFamily {
            name: name.into(),
            dim,
            rule: Arc::new(rule),
            diameter_bound: None,
            declared_limiting_directions: Vec::new(),
        }
    }

    pub fn with_diameter_bound(mut self, bound: f64) -> Self {
        self.diameter_bound = Some(bound);
        self
    }

    pub fn with_directions(mut self, directions: Vec<Direction>) -> Self {
        self.declared_limiting_directions = directions;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The `n`-th body, `n ≥ 1`.
    pub fn body_at(&self, n: usize) -> Result<ConvexBody> {
        if n == 0 {
            return Err(domain("generated families are indexed from 1"));
        }
        let body = (self.rule)(n);
        check_dim(self.dim, body.dim())?;
        Ok(body)
    }

    /// The finite family of bodies `1..=n`.
    pub fn truncate(&self, n: usize) -> Result<Family> {
        let bodies = (1..=n).map(|i| self.body_at(i)).collect::<Result<Vec<_>>>()?;
        let mut fam = Family::new(self.name.clone(), bodies)?;
        fam.diameter_bound = self.diameter_bound;
        fam.declared_limiting_directions = self.declared_limiting_directions.clone();
        Ok(fam)
    }
}

/// Either kind of family.
#[derive(Debug, Clone)]
pub enum AnyFamily {
    Finite(Family),
    Generated(GeneratedFamily),
}

impl AnyFamily {
    pub fn name(&self) -> &str {
        match self {
            AnyFamily::Finite(f) => &f.name,
            AnyFamily::Generated(g) => &g.name,
        }
    }

    /// Finite families as they are; generated ones truncated at `truncation`.
    pub fn materialize(&self, truncation: usize) -> Result<Family> {
        match self {
            AnyFamily::Finite(f) => Ok(f.clone()),
            AnyFamily::Generated(g) => g.truncate(truncation),
        }
    }

    pub fn declared_limiting_directions(&self) -> &[Direction] {
        match self {
            AnyFamily::Finite(f) => &f.declared_limiting_directions,
            AnyFamily::Generated(g) => &g.declared_limiting_directions,
        }
    }
}

impl From<Family> for AnyFamily {
    fn from(f: Family) -> Self {
        AnyFamily::Finite(f)
    }
}

impl From<GeneratedFamily> for AnyFamily {
    fn from(g: GeneratedFamily) -> Self {
        AnyFamily::Generated(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::vector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::SQRT_2;

    fn random_polytope(rng: &mut impl Rng, d: usize, n: usize) -> ConvexBody {
        let vs = (0..n)
            .map(|_| Vector::from_fn(d, |_, _| rng.gen_range(-2.0..2.0)))
            .collect();
        ConvexBody::vpolytope(vs).unwrap()
    }

    fn sample_point(rng: &mut impl Rng, body: &ConvexBody) -> Vector {
        match body {
            ConvexBody::Ball { center, radius } => loop {
                let v = Vector::from_fn(center.len(), |_, _| rng.gen_range(-1.0..1.0));
                if v.norm() <= 1.0 {
                    return center + v * *radius;
                }
            },
            ConvexBody::Segment { a, b } => {
                let t: f64 = rng.gen();
                a + (b - a) * t
            }
            ConvexBody::VPolytope { vertices } => {
                let w: Vec<f64> = vertices.iter().map(|_| rng.gen::<f64>().powi(3)).collect();
                let s: f64 = w.iter().sum();
                let mut x = Vector::zeros(vertices[0].len());
                for (v, wi) in vertices.iter().zip(&w) {
                    x += v * (wi / s);
                }
                x
            }
            ConvexBody::HalfSpace { .. } => unreachable!(),
        }
    }

    #[test]
    fn nearest_point_examples() {
        let ball = ConvexBody::ball(vector(&[0.0, 0.0]), 1.0).unwrap();
        let (p, d) = ball.nearest_point(&vector(&[3.0, 0.0])).unwrap();
        assert_eq!(p, vector(&[1.0, 0.0]));
        assert_eq!(d, 2.0);

        let seg = ConvexBody::segment(vector(&[0.0, 0.0, 0.0]), vector(&[1.0, 0.0, 0.0])).unwrap();
        let (p, d) = seg.nearest_point(&vector(&[2.0, 1.0, 0.0])).unwrap();
        assert_eq!(p, vector(&[1.0, 0.0, 0.0]));
        assert!((d - SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn triangle_nearest_matches_barycentric_grid() {
        let vs = [vector(&[1.0, 1.0]), vector(&[2.0, 1.0]), vector(&[1.0, 2.0])];
        let tri = ConvexBody::vpolytope(vs.to_vec()).unwrap();
        let q = vector(&[0.0, 0.0]);
        let (p, d) = tri.nearest_point(&q).unwrap();
        let steps = 400;
        let mut best = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=(steps - i) {
                let a = i as f64 / steps as f64;
                let b = j as f64 / steps as f64;
                let x = &vs[0] * (1.0 - a - b) + &vs[1] * a + &vs[2] * b;
                best = best.min(x.norm());
            }
        }
        assert!((p - vector(&[1.0, 1.0])).norm() < 1e-9);
        assert!((d - best).abs() < 1e-9);
        assert!((d - SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn support_examples() {
        let ball = ConvexBody::ball(vector(&[0.0, 0.0]), 1.0).unwrap();
        assert_eq!(ball.support(&Direction::axis(2, 0)).unwrap(), 1.0);
        let poly = ConvexBody::vpolytope(vec![vector(&[0.0, 0.0]), vector(&[2.0, 3.0])]).unwrap();
        assert_eq!(poly.support(&Direction::axis(2, 1)).unwrap(), 3.0);
        let h = ConvexBody::halfspace(vector(&[1.0, 0.0]), 2.0).unwrap();
        assert_eq!(h.support(&Direction::axis(2, 1)).unwrap(), f64::INFINITY);
        let back = Direction::new(vector(&[-1.0, 0.0])).unwrap();
        assert_eq!(h.support(&back).unwrap(), -2.0);
    }

    #[test]
    fn projection_examples() {
        let k = AffineFlat::through_origin(&[Direction::axis(3, 2)]).unwrap();
        let ball = ConvexBody::ball(vector(&[1.0, 2.0, 5.0]), 0.3).unwrap();
        assert_eq!(
            ball.project(&k).unwrap(),
            ConvexBody::Ball {
                center: vector(&[1.0, 2.0]),
                radius: 0.3
            }
        );
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ab = ConvexBody::segment(vector(&[-s, -s, s]), vector(&[s, -s, s])).unwrap();
        assert_eq!(
            ab.project(&k).unwrap(),
            ConvexBody::Segment {
                a: vector(&[-s, -s]),
                b: vector(&[s, -s])
            }
        );
    }

    #[test]
    fn halfspace_projection_requires_normal_in_complement() {
        let k = AffineFlat::through_origin(&[Direction::axis(3, 2)]).unwrap();
        let tilted = ConvexBody::halfspace(vector(&[1.0, 0.0, 1.0]), 1.0).unwrap();
        assert!(matches!(tilted.project(&k), Err(Error::UnsupportedProjection(_))));
        let flat_normal = ConvexBody::halfspace(vector(&[0.0, 1.0, 0.0]), 1.0).unwrap();
        let shifted = k.translated_to(vector(&[0.0, 3.0, 0.0])).unwrap();
        match flat_normal.project(&shifted).unwrap() {
            ConvexBody::HalfSpace { offset, .. } => assert!((offset + 2.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn projected_hull_equals_hull_of_projections() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let body = random_polytope(&mut rng, 4, 7);
            let span: Vec<Vector> = (0..2)
                .map(|_| Vector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0)))
                .collect();
            let k = AffineFlat::new(Vector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0)), &span).unwrap();
            let projected = body.project(&k).unwrap();
            for _ in 0..50 {
                let x = sample_point(&mut rng, &body);
                let px = k.complement_coords(&x).unwrap();
                assert!(projected.distance_to_point(&px).unwrap() < 1e-9);
            }
            for v in projected.generators() {
                assert!(v.iter().all(|c| c.is_finite()));
            }
            assert!(projected.diameter() <= body.diameter() + 1e-12);
        }
    }

    #[test]
    fn variational_inequality_on_random_bodies() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let d = rng.gen_range(2..5);
            let body = match rng.gen_range(0..3) {
                0 => ConvexBody::ball(Vector::from_fn(d, |_, _| rng.gen_range(-2.0..2.0)), 0.7).unwrap(),
                1 => random_polytope(&mut rng, d, 2),
                _ => {
                    let n = rng.gen_range(3..9);
                    random_polytope(&mut rng, d, n)
                }
            };
            let q = Vector::from_fn(d, |_, _| rng.gen_range(-5.0..5.0));
            let (p, _) = body.nearest_point(&q).unwrap();
            for _ in 0..100 {
                let x = sample_point(&mut rng, &body);
                assert!((&q - &p).dot(&(x - &p)) <= 1e-8);
            }
        }
    }

    #[test]
    fn diameters() {
        let poly = ConvexBody::vpolytope(vec![vector(&[0.0, 0.0]), vector(&[3.0, 0.0]), vector(&[0.0, 4.0])]).unwrap();
        assert_eq!(poly.diameter(), 5.0);
        let point = ConvexBody::vpolytope(vec![vector(&[1.0, 1.0]); 3]).unwrap();
        assert_eq!(point.diameter(), 0.0);
        assert_eq!(point.nearest_point(&vector(&[1.0, 2.0])).unwrap().1, 1.0);
    }

    #[test]
    fn family_diameter_bound_rejects_halfspaces_and_large_bodies() {
        let h = ConvexBody::halfspace(vector(&[1.0, 0.0]), 1.0).unwrap();
        assert!(Family::new("h", vec![h]).unwrap().with_diameter_bound(10.0).is_err());
        let b = ConvexBody::ball(vector(&[0.0, 0.0]), 2.0).unwrap();
        assert!(Family::new("b", vec![b.clone()])
            .unwrap()
            .with_diameter_bound(3.0)
            .is_err());
        assert!(Family::new("b", vec![b]).unwrap().with_diameter_bound(4.0).is_ok());
    }

    #[test]
    fn generated_family_is_deterministic() {
        let g = GeneratedFamily::new("line", 2, |n| ConvexBody::ball(vector(&[n as f64, 0.0]), 1.0).unwrap());
        assert_eq!(g.body_at(3).unwrap(), g.body_at(3).unwrap());
        assert!(g.body_at(0).is_err());
        assert_eq!(g.truncate(4).unwrap().len(), 4);
    }
}
