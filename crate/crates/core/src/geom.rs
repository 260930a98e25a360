//! Dense linear algebra on points, directions and affine flats.
//!
//! An [`AffineFlat`] stores an orthonormal basis of its direction space
//! together with a fixed orthonormal completion of that basis. The
//! completion spans the orthogonal complement `K⊥` and is the coordinate
//! system used for every projection in the crate, so projections of
//! different bodies onto the same flat are always expressed consistently.

use nalgebra::DVector;

use crate::error::{check_dim, domain, Error, Result};

/// A point or vector of `ℝᵈ`.
pub type Vector = DVector<f64>;

/// Residual norm below which a vector is treated as numerically dependent.
pub const DEFLATION_TOL: f64 = 1e-10;

/// Builds a vector from a slice of coordinates.
pub fn vector(coords: &[f64]) -> Vector {
    Vector::from_column_slice(coords)
}

pub(crate) fn check_finite(v: &Vector) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Input("non-finite coordinate".into()))
    }
}

/// A unit vector of `𝕊^{d−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(Vector);

impl Direction {
    /// Normalizes `v`; fails on the zero vector.
    pub fn new(v: Vector) -> Result<Self> {
        central_projection(&v)
    }

    /// The `i`-th standard basis vector of `ℝᵈ`.
    pub fn axis(dim: usize, i: usize) -> Self {
        let mut v = Vector::zeros(dim);
        v[i] = 1.0;
        Direction(v)
    }

    pub fn as_vector(&self) -> &Vector {
        &self.0
    }

    pub fn into_vector(self) -> Vector {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Angle in radians between two directions.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        // atan2 form stays accurate for nearly parallel directions
        let cross = (&self.0 * other.0.dot(&self.0) - &other.0).norm();
        let dot = self.0.dot(&other.0);
        cross.atan2(dot)
    }
}

impl std::ops::Neg for &Direction {
    type Output = Direction;

    fn neg(self) -> Direction {
        Direction(-&self.0)
    }
}

/// The central projection map `x ↦ x/‖x‖`.
pub fn central_projection(x: &Vector) -> Result<Direction> {
    check_finite(x)?;
    let n = x.norm();
    if n == 0.0 {
        return Err(domain("central projection of the zero vector"));
    }
    Ok(Direction(x / n))
}

fn shared_dim(vectors: &[Vector]) -> Result<usize> {
    let dim = vectors
        .first()
        .map(|v| v.len())
        .ok_or_else(|| domain("empty vector list"))?;
    for v in vectors {
        check_dim(dim, v.len())?;
    }
    Ok(dim)
}

fn deflate(v: &Vector, basis: &[Vector]) -> Vector {
    let mut w = v.clone();
    // second pass restores orthogonality lost to cancellation
    for _ in 0..2 {
        for q in basis {
            let c = w.dot(q);
            w.axpy(-c, q, 1.0);
        }
    }
    w
}

/// Orthonormal basis of the span of `vectors` by modified Gram–Schmidt with
/// re-orthogonalization. Vectors whose residual after deflation is below
/// `tol` are dropped.
pub fn orthonormalize(vectors: &[Vector], tol: f64) -> Result<Vec<Vector>> {
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    shared_dim(vectors)?;
    let mut basis: Vec<Vector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        check_finite(v)?;
        let w = deflate(v, &basis);
        let n = w.norm();
        if n >= tol {
            basis.push(w / n);
        }
    }
    Ok(basis)
}

/// Number of numerically independent vectors (size of the orthonormalized set).
pub fn numerical_rank(vectors: &[Vector], tol: f64) -> Result<usize> {
    if vectors.is_empty() {
        return Ok(0);
    }
    Ok(orthonormalize(vectors, tol)?.len())
}

/// Completes an orthonormal set to an orthonormal basis of `ℝᵈ`, returning
/// only the added vectors. Candidates are the standard basis in order, so the
/// result is deterministic.
pub fn orthonormal_complement(basis: &[Vector], dim: usize) -> Vec<Vector> {
    let mut all: Vec<Vector> = basis.to_vec();
    let mut extra = Vec::with_capacity(dim - basis.len());
    for i in 0..dim {
        if all.len() == dim {
            break;
        }
        let mut e = Vector::zeros(dim);
        e[i] = 1.0;
        let w = deflate(&e, &all);
        let n = w.norm();
        // any accepted candidate has residual at least 1/sqrt(d)
        if n > 1e-6 {
            let q = w / n;
            all.push(q.clone());
            extra.push(q);
        }
    }
    extra
}

/// A k-dimensional affine subspace of `ℝᵈ`.
///
/// The base point is canonical: the orthogonal projection of the origin
/// onto the flat.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFlat {
    base: Vector,
    basis: Vec<Vector>,
    complement: Vec<Vector>,
}

impl AffineFlat {
    /// The flat through `point` spanned by `spanning`. Fails when the
    /// spanning vectors are numerically dependent.
    pub fn new(point: Vector, spanning: &[Vector]) -> Result<Self> {
        check_finite(&point)?;
        let dim = point.len();
        let basis = if spanning.is_empty() {
            Vec::new()
        } else {
            check_dim(dim, shared_dim(spanning)?)?;
            orthonormalize(spanning, DEFLATION_TOL)?
        };
        if basis.len() != spanning.len() {
            return Err(domain(format!(
                "spanning vectors have rank {} < {}",
                basis.len(),
                spanning.len()
            )));
        }
        Ok(Self::from_orthonormal(point, basis))
    }

    fn from_orthonormal(point: Vector, basis: Vec<Vector>) -> Self {
        let dim = point.len();
        let base = deflate(&point, &basis);
        let complement = orthonormal_complement(&basis, dim);
        AffineFlat {
            base,
            basis,
            complement,
        }
    }

    /// The linear subspace spanned by `directions`.
    pub fn through_origin(directions: &[Direction]) -> Result<Self> {
        let dim = directions
            .first()
            .map(|d| d.dim())
            .ok_or_else(|| domain("no directions given"))?;
        let vs: Vec<Vector> = directions.iter().map(|d| d.as_vector().clone()).collect();
        Self::new(Vector::zeros(dim), &vs)
    }

    /// A 0-flat.
    pub fn point(p: Vector) -> Self {
        Self::from_orthonormal(p, Vec::new())
    }

    /// A line through `point` with direction `dir`.
    pub fn line(point: Vector, dir: &Vector) -> Result<Self> {
        Self::new(point, std::slice::from_ref(dir))
    }

    /// The hyperplane `{x : ⟨normal, x⟩ = offset}`.
    pub fn hyperplane(normal: &Direction, offset: f64) -> Self {
        let n = normal.as_vector();
        let basis = orthonormal_complement(std::slice::from_ref(n), n.len());
        Self::from_orthonormal(n * offset, basis)
    }

    /// Translate of this flat through `point`; the complement basis is kept.
    pub fn translated_to(&self, point: Vector) -> Result<Self> {
        check_dim(self.ambient_dim(), point.len())?;
        check_finite(&point)?;
        Ok(AffineFlat {
            base: deflate(&point, &self.basis),
            basis: self.basis.clone(),
            complement: self.complement.clone(),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    /// Dimension `k` of the flat.
    pub fn k(&self) -> usize {
        self.basis.len()
    }

    pub fn base(&self) -> &Vector {
        &self.base
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Orthonormal basis of `K⊥`.
    pub fn complement(&self) -> &[Vector] {
        &self.complement
    }

    /// Orthogonal projection of `x` onto the flat.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.ambient_dim(), x.len())?;
        let diff = x - &self.base;
        let mut out = self.base.clone();
        for b in &self.basis {
            out.axpy(diff.dot(b), b, 1.0);
        }
        Ok(out)
    }

    /// Coordinates of `x − base` in the complement basis.
    pub fn complement_coords(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.ambient_dim(), x.len())?;
        Ok(self.complement_coords_unchecked(x))
    }

    pub(crate) fn complement_coords_unchecked(&self, x: &Vector) -> Vector {
        let diff = x - &self.base;
        Vector::from_iterator(self.complement.len(), self.complement.iter().map(|c| diff.dot(c)))
    }

    /// Linear part of the complement map (no anchoring at the base).
    pub(crate) fn complement_linear(&self, v: &Vector) -> Vector {
        Vector::from_iterator(self.complement.len(), self.complement.iter().map(|c| v.dot(c)))
    }

    /// Inverse of [`complement_coords`](Self::complement_coords) with zero
    /// component along the flat: `base + Σ yⱼ cⱼ`.
    pub fn lift(&self, coords: &Vector) -> Result<Vector> {
        check_dim(self.complement.len(), coords.len())?;
        let mut out = self.base.clone();
        for (c, y) in self.complement.iter().zip(coords.iter()) {
            out.axpy(*y, c, 1.0);
        }
        Ok(out)
    }

    /// Euclidean distance from a point to the flat.
    pub fn distance_to_point(&self, x: &Vector) -> Result<f64> {
        Ok(self.complement_coords(x)?.norm())
    }

    /// Norm of the component of `v` lying in the direction space.
    pub fn along_component(&self, v: &Vector) -> f64 {
        self.basis.iter().map(|b| b.dot(v).powi(2)).sum::<f64>().sqrt()
    }
}

/// `project_onto_flat`: orthogonal projection onto `flat`.
pub fn project_onto_flat(x: &Vector, flat: &AffineFlat) -> Result<Vector> {
    flat.project(x)
}

/// `project_onto_complement`: the map `π` into `K⊥` coordinates.
pub fn project_onto_complement(x: &Vector, flat: &AffineFlat) -> Result<Vector> {
    flat.complement_coords(x)
}
