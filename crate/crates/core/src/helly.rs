//! Point-Helly layer: bound formulas, premise checks and the minimax center
//! solver used to test those bounds.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::{ConvexBody, Family};
use crate::distance::{nearest_in_intersection, IntersectionOutcome, SolverConfig};
use crate::error::{check_dim, domain, Error, Result};
use crate::geom::Vector;
use crate::qp::simplex_qp;

/// `√((n−r)/(r(n−1)))`: the distance bound for `n` bodies whose `r`-wise
/// intersections meet the unit ball.
pub fn helly_bound(n: usize, r: usize) -> Result<f64> {
    if r == 0 || r > n {
        return Err(domain(format!("helly_bound needs 1 ≤ r ≤ n, got n={n}, r={r}")));
    }
    if n == r {
        return Ok(0.0);
    }
    let (n, r) = (n as f64, r as f64);
    Ok(((n - r) / (r * (n - 1.0))).sqrt())
}

/// `1/√r`.
pub fn colorful_bound(r: usize) -> Result<f64> {
    if r == 0 {
        return Err(domain("colorful_bound needs r ≥ 1"));
    }
    Ok(1.0 / (r as f64).sqrt())
}

/// `√(1/(r−k))`.
pub fn kflat_bound(r: usize, k: usize) -> Result<f64> {
    if k >= r {
        return Err(domain(format!("kflat_bound needs k < r, got r={r}, k={k}")));
    }
    Ok(1.0 / ((r - k) as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PremiseMode {
    /// One family; every `r`-subset is checked.
    Subsets { r: usize },
    /// One body from each family; the full cross product is checked.
    Colorful,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PremiseViolation {
    /// Body indices (0-based) of the offending tuple.
    pub indices: Vec<usize>,
    /// Distance from `b` to the intersection, `None` when the intersection is empty.
    pub distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PremiseReport {
    pub tuples_checked: usize,
    pub violations: Vec<PremiseViolation>,
    pub indeterminate: Vec<Vec<usize>>,
}

impl PremiseReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.indeterminate.is_empty()
    }
}

enum TupleResult {
    Ok,
    Violation(Option<f64>),
    Indeterminate,
}

/// Checks that the intersection of every tuple meets `B(b, 1)`, up to `tol`.
pub fn check_premise(families: &[Family], mode: PremiseMode, b: &Vector, cfg: &SolverConfig) -> Result<PremiseReport> {
    cfg.validate()?;
    for f in families {
        if let Some(d) = f.dim() {
            check_dim(b.len(), d)?;
        }
    }
    let tuples: Vec<Vec<usize>> = match mode {
        PremiseMode::Subsets { r } => {
            let [family] = families else {
                return Err(domain("subset mode takes exactly one family"));
            };
            if r == 0 || r > family.len() {
                return Err(domain(format!(
                    "subset size {r} invalid for a family of {}",
                    family.len()
                )));
            }
            (0..family.len()).combinations(r).collect()
        }
        PremiseMode::Colorful => {
            if families.is_empty() {
                return Err(domain("colorful mode needs at least one family"));
            }
            families.iter().map(|f| 0..f.len()).multi_cartesian_product().collect()
        }
    };
    let body_of = |slot: usize, idx: usize| -> &ConvexBody {
        match mode {
            PremiseMode::Subsets { .. } => &families[0].bodies[idx],
            PremiseMode::Colorful => &families[slot].bodies[idx],
        }
    };
    let results: Vec<TupleResult> = tuples
        .par_iter()
        .map(|t| {
            let bodies: Vec<ConvexBody> = t
                .iter()
                .enumerate()
                .map(|(slot, &i)| body_of(slot, i).clone())
                .collect();
            match nearest_in_intersection(&bodies, b, cfg) {
                Ok(IntersectionOutcome::Nearest { distance, .. }) => {
                    if distance <= 1.0 + cfg.tol {
                        TupleResult::Ok
                    } else {
                        TupleResult::Violation(Some(distance))
                    }
                }
                Ok(IntersectionOutcome::Infeasible { .. }) => TupleResult::Violation(None),
                Err(_) => TupleResult::Indeterminate,
            }
        })
        .collect();
    let mut report = PremiseReport {
        tuples_checked: tuples.len(),
        violations: Vec::new(),
        indeterminate: Vec::new(),
    };
    for (t, r) in tuples.into_iter().zip(results) {
        match r {
            TupleResult::Ok => {}
            TupleResult::Violation(distance) => report.violations.push(PremiseViolation { indices: t, distance }),
            TupleResult::Indeterminate => report.indeterminate.push(t),
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterMode {
    /// One family whose `r`-subsets satisfy the premise; compared against
    /// `helly_bound(n, r)`.
    Single { r: usize },
    /// `r` families; compared against `colorful_bound(r)`.
    Colorful,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCertificate {
    pub q: Vector,
    pub max_distance: f64,
    pub bound: f64,
    /// Winning family (0-based) in colorful mode.
    pub family_index: Option<usize>,
    /// Minimax value reached for each family.
    pub family_values: Vec<f64>,
    pub converged: bool,
}

impl PointCertificate {
    pub fn margin(&self) -> f64 {
        self.bound - self.max_distance
    }
}

/// `q ↦ max_{C∈family} d(q, C)`, together with the index of a farthest body.
pub fn minimax_objective(bodies: &[ConvexBody], q: &Vector) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, c) in bodies.iter().enumerate() {
        let d = c.nearest_unchecked(q).1;
        if d > best.0 {
            best = (d, i);
        }
    }
    best
}

const RESTARTS: usize = 5;
const START_RADIUS: f64 = 2.0;
const POLYAK_ITERS: usize = 200;
const PROX_ITERS: usize = 400;

struct LocalSolve {
    q: Vector,
    value: f64,
    converged: bool,
}

fn random_start(rng: &mut ChaCha8Rng, d: usize) -> Vector {
    let g = Vector::from_fn(d, |_, _| StandardNormal.sample(rng));
    let u: f64 = Uniform::new(0.0, 1.0).sample(rng);
    let n = g.norm();
    if n == 0.0 {
        return g;
    }
    g * (START_RADIUS * u.powf(1.0 / d as f64) / n)
}

fn polyak(bodies: &[ConvexBody], start: Vector, tol: f64) -> (Vector, f64) {
    let mut q = start;
    let (mut f, _) = minimax_objective(bodies, &q);
    let mut best_q = q.clone();
    let mut best_f = f;
    let mut delta = 0.5 * f.max(tol);
    let mut stall = 0;
    for _ in 0..POLYAK_ITERS {
        if best_f <= tol {
            break;
        }
        let (_, i) = minimax_objective(bodies, &q);
        let (p, d) = bodies[i].nearest_unchecked(&q);
        if d <= 0.0 {
            break;
        }
        let g = (&q - p) / d;
        let target = best_f - delta;
        let step = (f - target).max(0.0);
        q -= g * step;
        f = minimax_objective(bodies, &q).0;
        if f < best_f - 1e-3 * delta {
            best_f = f;
            best_q = q.clone();
            stall = 0;
        } else {
            stall += 1;
            if stall >= 10 {
                delta *= 0.5;
                q = best_q.clone();
                f = best_f;
                stall = 0;
            }
        }
    }
    (best_q, best_f)
}

fn prox_linear(bodies: &[ConvexBody], start: Vector, start_f: f64, tol: f64) -> LocalSolve {
    let m = bodies.len();
    let mut q = start;
    let mut f = start_f;
    let mut t = 1.0;
    let stop = (tol * 1e-2).max(1e-15);
    for _ in 0..PROX_ITERS {
        if f <= tol * 1e-3 {
            return LocalSolve {
                q,
                value: f,
                converged: true,
            };
        }
        let mut c = DVector::zeros(m + 1);
        let mut grads: Vec<Vector> = Vec::with_capacity(m + 1);
        for (i, body) in bodies.iter().enumerate() {
            let (p, d) = body.nearest_unchecked(&q);
            c[i] = d;
            grads.push(if d > 0.0 { (&q - p) / d } else { Vector::zeros(q.len()) });
        }
        grads.push(Vector::zeros(q.len()));
        let gram = DMatrix::from_fn(m + 1, m + 1, |i, j| grads[i].dot(&grads[j]));
        loop {
            let (lambda, _) = simplex_qp(&(&gram * t), &(-&c), 1e-15 * (1.0 + f), 5_000);
            let mut step = Vector::zeros(q.len());
            for (g, l) in grads.iter().zip(lambda.iter()) {
                if *l != 0.0 {
                    step.axpy(-t * l, g, 1.0);
                }
            }
            let model = (0..=m)
                .map(|i| c[i] + grads[i].dot(&step))
                .fold(f64::NEG_INFINITY, f64::max);
            let pred = f - model;
            if pred <= stop * f.max(1.0) || step.norm() <= 1e-15 * (1.0 + q.norm()) {
                return LocalSolve {
                    q,
                    value: f,
                    converged: true,
                };
            }
            let trial = &q + &step;
            let ft = minimax_objective(bodies, &trial).0;
            if ft <= f - 0.1 * pred {
                q = trial;
                f = ft;
                t *= 2.0;
                break;
            }
            t *= 0.25;
            if t < 1e-14 {
                return LocalSolve {
                    q,
                    value: f,
                    converged: false,
                };
            }
        }
    }
    LocalSolve {
        q,
        value: f,
        converged: false,
    }
}

fn solve_family(bodies: &[ConvexBody], cfg: &SolverConfig, seed: u64) -> LocalSolve {
    let d = bodies[0].dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Vector> = (0..RESTARTS).map(|_| random_start(&mut rng, d)).collect();
    let mut best: Option<LocalSolve> = None;
    for s in starts {
        let (q, f) = polyak(bodies, s, cfg.tol);
        let local = prox_linear(bodies, q, f, cfg.tol);
        let better = match &best {
            None => true,
            Some(b) => local.value < b.value,
        };
        if better {
            best = Some(local);
        }
    }
    best.expect("at least one restart")
}

/// Minimax center of one family (`Single`) or the best of several
/// (`Colorful`), with the certificate compared against the matching bound.
pub fn minimax_center(families: &[Family], mode: CenterMode, cfg: &SolverConfig) -> Result<PointCertificate> {
    cfg.validate()?;
    if families.is_empty() {
        return Err(domain("minimax_center needs at least one family"));
    }
    let d = families[0]
        .dim()
        .ok_or_else(|| domain("minimax_center on an empty family"))?;
    for f in families {
        let fd = f.dim().ok_or_else(|| domain("minimax_center on an empty family"))?;
        check_dim(d, fd)?;
    }
    let bound = match mode {
        CenterMode::Single { r } => {
            if families.len() != 1 {
                return Err(domain("single mode takes exactly one family"));
            }
            helly_bound(families[0].len(), r)?
        }
        CenterMode::Colorful => colorful_bound(families.len())?,
    };
    let solves: Vec<LocalSolve> = families
        .par_iter()
        .enumerate()
        .map(|(i, f)| solve_family(&f.bodies, cfg, cfg.seed.wrapping_add(i as u64)))
        .collect();
    let family_values: Vec<f64> = solves.iter().map(|s| s.value).collect();
    let mut win = 0;
    for (i, v) in family_values.iter().enumerate().skip(1) {
        let w = family_values[win];
        if *v < w - 1e-9 * w.max(1.0) {
            win = i;
        }
    }
    let LocalSolve { q, value, converged } = solves
        .into_iter()
        .nth(win)
        .ok_or_else(|| Error::Domain("no family solved".into()))?;
    Ok(PointCertificate {
        q,
        max_distance: value.max(0.0),
        bound,
        family_index: match mode {
            CenterMode::Colorful => Some(win),
            CenterMode::Single { .. } => None,
        },
        family_values,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::vector;
    use proptest::prelude::*;

    #[test]
    #[allow(clippy::approx_constant)]
    fn bound_examples() {
        assert_eq!(helly_bound(5, 5).unwrap(), 0.0);
        assert_eq!(helly_bound(1, 1).unwrap(), 0.0);
        assert!((helly_bound(3, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((helly_bound(1_000_000, 4).unwrap() - 0.5).abs() < 1e-3);
        assert!(helly_bound(2, 3).is_err());
        assert_eq!(colorful_bound(4).unwrap(), 0.5);
        assert!((kflat_bound(3, 1).unwrap() - 0.70711).abs() < 1e-5);
        assert!(kflat_bound(2, 2).is_err());
        for r in 1..10 {
            assert_eq!(kflat_bound(r, 0).unwrap(), colorful_bound(r).unwrap());
        }
    }

    #[test]
    fn helly_bound_monotone_on_grid() {
        for n in 2..60 {
            for r in 1..n {
                let here = helly_bound(n, r).unwrap();
                assert!(helly_bound(n, r + 1).unwrap() < here);
                assert!(helly_bound(n + 1, r).unwrap() >= here);
            }
        }
    }

    fn unit_ball(c: &[f64]) -> ConvexBody {
        ConvexBody::ball(vector(c), 1.0).unwrap()
    }

    #[test]
    fn symmetric_balls_center_at_origin() {
        let s3 = 3f64.sqrt();
        let fam = Family::new(
            "tri",
            vec![unit_ball(&[2.0, 0.0]), unit_ball(&[-1.0, s3]), unit_ball(&[-1.0, -s3])],
        )
        .unwrap();
        let cert = minimax_center(&[fam], CenterMode::Single { r: 2 }, &SolverConfig::default()).unwrap();
        assert!(cert.q.norm() < 1e-7, "{}", cert.q);
        assert!((cert.max_distance - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_body_has_zero_value() {
        let fam = Family::new(
            "one",
            vec![ConvexBody::segment(vector(&[3.0, 1.0]), vector(&[4.0, -1.0])).unwrap()],
        )
        .unwrap();
        let cert = minimax_center(std::slice::from_ref(&fam), CenterMode::Single { r: 1 }, &SolverConfig::default()).unwrap();
        assert!(cert.max_distance < 1e-9);
        assert!(fam.bodies[0].distance_to_point(&cert.q).unwrap() < 1e-9);
    }

    #[test]
    fn premise_examples() {
        let cfg = SolverConfig::default();
        let b = vector(&[0.0, 0.0]);
        let around = Family::new(
            "around",
            vec![unit_ball(&[0.5, 0.0]), unit_ball(&[0.0, 0.5]), unit_ball(&[-0.3, -0.3])],
        )
        .unwrap();
        let ok = check_premise(&[around], PremiseMode::Subsets { r: 2 }, &b, &cfg).unwrap();
        assert!(ok.passed());
        assert_eq!(ok.tuples_checked, 3);

        let far = Family::new("far", vec![unit_ball(&[10.0, 0.0]), unit_ball(&[-10.0, 0.0])]).unwrap();
        let bad = check_premise(&[far], PremiseMode::Subsets { r: 2 }, &b, &cfg).unwrap();
        assert_eq!(bad.violations.len(), 1);
        assert_eq!(bad.violations[0].indices, vec![0, 1]);
        assert_eq!(bad.violations[0].distance, None);
    }

    #[test]
    fn colorful_picks_lowest_index_on_tie() {
        let f = Family::new("a", vec![unit_ball(&[3.0, 0.0]), unit_ball(&[-3.0, 0.0])]).unwrap();
        let g = Family::new("b", vec![unit_ball(&[0.0, 3.0]), unit_ball(&[0.0, -3.0])]).unwrap();
        let cert = minimax_center(&[f, g], CenterMode::Colorful, &SolverConfig::default()).unwrap();
        assert_eq!(cert.family_index, Some(0));
        assert!((cert.max_distance - 2.0).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn objective_is_convex_along_segments(
            centers in prop::collection::vec(prop::array::uniform3(-3.0f64..3.0), 1..5),
            x in prop::array::uniform3(-4.0f64..4.0),
            y in prop::array::uniform3(-4.0f64..4.0),
        ) {
            let bodies: Vec<ConvexBody> = centers
                .iter()
                .map(|c| ConvexBody::ball(vector(c), 0.5).unwrap())
                .collect();
            let (x, y) = (vector(&x), vector(&y));
            let mid = (&x + &y) * 0.5;
            let fm = minimax_objective(&bodies, &mid).0;
            let avg = 0.5 * (minimax_objective(&bodies, &x).0 + minimax_objective(&bodies, &y).0);
            prop_assert!(fm <= avg + 1e-9);
        }
    }
}
