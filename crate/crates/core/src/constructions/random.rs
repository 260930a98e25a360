//! Random instances whose premises hold by construction: every checked
//! tuple shares a witness point (or flat) inside the unit ball.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bodies::{ConvexBody, Family};
use crate::error::{domain, Result};
use crate::geom::{orthonormalize, AffineFlat, Direction, Vector, DEFLATION_TOL};

fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> Vector {
    Vector::from_fn(d, |_, _| rng.sample(StandardNormal))
}

/// Uniform point of the closed ball of radius `radius`.
pub fn sample_ball(rng: &mut ChaCha8Rng, d: usize, radius: f64) -> Vector {
    let g = gaussian(rng, d);
    let n = g.norm().max(1e-300);
    let u: f64 = rng.gen();
    g * (radius * u.powf(1.0 / d as f64) / n)
}

/// Radius of the simplex placed around each witness point.
pub const WITNESS_SPREAD: f64 = 0.1;

/// A small full-dimensional simplex around a random point, inside the unit
/// ball: `w + ε e_i` and `w − ε (1,…,1)/√d`.
fn witness_simplex(rng: &mut ChaCha8Rng, d: usize) -> Vec<Vector> {
    let w = sample_ball(rng, d, 1.0 - WITNESS_SPREAD);
    let mut pts: Vec<Vector> = (0..d)
        .map(|i| {
            let mut p = w.clone();
            p[i] += WITNESS_SPREAD;
            p
        })
        .collect();
    pts.push(w.add_scalar(-WITNESS_SPREAD / (d as f64).sqrt()));
    pts
}

fn extra_vertex(rng: &mut ChaCha8Rng, d: usize) -> Vector {
    let g = gaussian(rng, d);
    let n = g.norm().max(1e-300);
    g * (rng.gen_range(1.0..2.0) / n)
}

/// `n` polytopes in `ℝᵈ` such that every `r` of them share a small simplex
/// inside the unit ball.
pub fn random_helly_instance(d: usize, n: usize, r: usize, seed: u64) -> Result<Family> {
    if d == 0 || r == 0 || r > n {
        return Err(domain("random Helly instance needs d ≥ 1 and 1 ≤ r ≤ n"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut verts: Vec<Vec<Vector>> = vec![Vec::new(); n];
    for subset in (0..n).combinations(r) {
        let w = witness_simplex(&mut rng, d);
        for i in subset {
            verts[i].extend(w.iter().cloned());
        }
    }
    let bodies = verts
        .into_iter()
        .map(|mut v| {
            v.push(extra_vertex(&mut rng, d));
            ConvexBody::vpolytope(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Family::new("random", bodies)
}

/// `r` families of `m` polytopes each such that every colorful tuple shares
/// a small simplex inside the unit ball.
pub fn random_colorful_instance(d: usize, r: usize, m: usize, seed: u64) -> Result<Vec<Family>> {
    if d == 0 || r == 0 || m == 0 {
        return Err(domain("random colorful instance needs d, r, m ≥ 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut verts: Vec<Vec<Vec<Vector>>> = vec![vec![Vec::new(); m]; r];
    for tuple in (0..r).map(|_| 0..m).multi_cartesian_product() {
        let w = witness_simplex(&mut rng, d);
        for (i, &j) in tuple.iter().enumerate() {
            verts[i][j].extend(w.iter().cloned());
        }
    }
    verts
        .into_iter()
        .enumerate()
        .map(|(i, fam)| {
            let bodies = fam
                .into_iter()
                .map(|mut v| {
                    v.push(extra_vertex(&mut rng, d));
                    ConvexBody::vpolytope(v)
                })
                .collect::<Result<Vec<_>>>()?;
            Family::new(format!("F{}", i + 1), bodies)
        })
        .collect()
}

/// Colorful families together with the `k`-flat witnessing each tuple.
#[derive(Debug, Clone)]
pub struct KflatInstance {
    pub families: Vec<Family>,
    /// Orthonormal directions spanning the witness flats.
    pub directions: Vec<Direction>,
    /// For each tuple (body index per family), a flat meeting every body.
    pub witnesses: Vec<(Vec<usize>, AffineFlat)>,
}

/// `r` families of `m` polytopes in `ℝᵈ`. Every colorful tuple meets a
/// translate of a common random `k`-dimensional subspace `Y` through a point
/// of the unit ball, and for `i < k` the bodies of family `i` escape to
/// infinity along `y_i` (declared as their limiting direction).
pub fn random_kflat_instance(d: usize, r: usize, k: usize, m: usize, seed: u64) -> Result<KflatInstance> {
    if k >= d || r <= k || m == 0 {
        return Err(domain("random k-flat instance needs k < d, k < r and m ≥ 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y = loop {
        let g: Vec<Vector> = (0..k).map(|_| gaussian(&mut rng, d)).collect();
        let o = orthonormalize(&g, DEFLATION_TOL)?;
        if o.len() == k {
            break o;
        }
    };
    let along = AffineFlat::new(Vector::zeros(d), &y)?;
    let mut verts: Vec<Vec<Vec<Vector>>> = vec![vec![Vec::new(); m]; r];
    let mut witnesses = Vec::new();
    for tuple in (0..r).map(|_| 0..m).multi_cartesian_product() {
        let p = sample_ball(&mut rng, d, 1.0);
        let w = &p - along.project(&p)?;
        for (i, &j) in tuple.iter().enumerate() {
            let mut v = w.clone();
            for yj in &y {
                v += yj * rng.gen_range(-0.5..0.5);
            }
            verts[i][j].push(v);
        }
        witnesses.push((tuple, AffineFlat::new(w, &y)?));
    }
    let mut families = Vec::with_capacity(r);
    for (i, fam) in verts.into_iter().enumerate() {
        let mut bodies = Vec::with_capacity(m);
        for (j, mut v) in fam.into_iter().enumerate() {
            v.push(extra_vertex(&mut rng, d));
            let mut body = ConvexBody::vpolytope(v)?;
            if i < k {
                body = body.translated(&(&y[i] * (10.0 * (j + 1) as f64)))?;
            }
            bodies.push(body);
        }
        let mut fam = Family::new(format!("F{}", i + 1), bodies)?;
        if i < k {
            fam = fam.with_directions(vec![Direction::new(y[i].clone())?]);
        }
        families.push(fam);
    }
    // shifting body j of family i along y_i keeps it on the same witness flats
    Ok(KflatInstance {
        families,
        directions: y.into_iter().map(Direction::new).collect::<Result<_>>()?,
        witnesses,
    })
}
