//! Eight planar regions `a_1, …, a_8` around the origin, paired so that
//! `a_{i+1} = −a_i`, whose distances to a line through the origin are given
//! by piecewise sine profiles. Raised to increasing heights along `x₃` they
//! form a 1-unbounded family that no plane approaches within distance 1
//! once the squares are large enough.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use crate::bodies::{ConvexBody, GeneratedFamily};
use crate::error::{domain, Result};
use crate::geom::{vector, Vector};

/// Side lengths `(ℓ₁, ℓ₃, ℓ₅, ℓ₇)` of the four squares, nondecreasing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AronovParams {
    pub side_lengths: [f64; 4],
}

impl AronovParams {
    pub fn new(side_lengths: [f64; 4]) -> Result<Self> {
        if side_lengths.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(domain("side lengths must be positive"));
        }
        if side_lengths.windows(2).any(|w| w[0] > w[1]) {
            return Err(domain("side lengths must be nondecreasing"));
        }
        Ok(AronovParams { side_lengths })
    }

    /// Every side length multiplied by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.side_lengths.map(|l| l * lambda))
    }

    fn side(&self, i: usize) -> f64 {
        self.side_lengths[(i - 1) / 2]
    }
}

/// Threshold on `ℓ₁` above which no plane comes within distance 1:
/// `√2 / sin(π/8)`.
pub fn side_threshold() -> f64 {
    SQRT_2 / (PI / 8.0).sin()
}

/// Distance from `a_i` to the line through the origin at angle `θ`.
/// Even `i` shares the profile of `i − 1`.
pub fn aronov_profile(i: usize, theta: f64, params: &AronovParams) -> Result<f64> {
    if !(1..=8).contains(&i) {
        return Err(domain(format!("region index must be in 1..=8, got {i}")));
    }
    if !(0.0..PI).contains(&theta) {
        return Err(domain(format!("angle must lie in [0, π), got {theta}")));
    }
    let i = if i.is_multiple_of(2) { i - 1 } else { i };
    let s = params.side(i) / SQRT_2;
    let t = theta;
    let v = match i {
        1 => {
            if t <= FRAC_PI_4 {
                s * (FRAC_PI_4 - t).sin()
            } else if t >= 3.0 * FRAC_PI_4 {
                s * (t - 3.0 * FRAC_PI_4).sin()
            } else {
                0.0
            }
        }
        3 => {
            if t <= FRAC_PI_4 {
                s * t.sin()
            } else if t <= FRAC_PI_2 {
                s * (FRAC_PI_2 - t).sin()
            } else {
                0.0
            }
        }
        5 => {
            if (FRAC_PI_4..=FRAC_PI_2).contains(&t) {
                s * (t - FRAC_PI_4).sin()
            } else if (FRAC_PI_2..=3.0 * FRAC_PI_4).contains(&t) {
                s * (3.0 * FRAC_PI_4 - t).sin()
            } else {
                0.0
            }
        }
        _ => {
            if (FRAC_PI_2..=3.0 * FRAC_PI_4).contains(&t) {
                s * (t - FRAC_PI_2).sin()
            } else if t >= 3.0 * FRAC_PI_4 {
                s * (PI - t).sin()
            } else {
                0.0
            }
        }
    };
    Ok(v.max(0.0))
}

/// `max_i` of the profiles at angle `θ`.
pub fn aronov_max_profile(theta: f64, params: &AronovParams) -> Result<f64> {
    let mut best: f64 = 0.0;
    for i in [1, 3, 5, 7] {
        best = best.max(aronov_profile(i, theta, params)?);
    }
    Ok(best)
}

/// Minimizes the largest profile over the grid `θ_j = jπ/grid`; returns the
/// minimizing angle and value.
pub fn aronov_min_max(params: &AronovParams, grid: usize) -> Result<(f64, f64)> {
    if grid < 100 {
        return Err(domain(format!("grid must be at least 100, got {grid}")));
    }
    let mut best = (0.0, f64::INFINITY);
    for j in 0..grid {
        let theta = PI * j as f64 / grid as f64;
        let v = aronov_max_profile(theta, params)?;
        if v < best.1 {
            best = (theta, v);
        }
    }
    Ok(best)
}

/// Scale applied to the outer edge of each trapezoid.
pub const OUTER_SCALE: f64 = 1.25;

fn inner_corners(i: usize, l: f64) -> [[f64; 2]; 2] {
    let h = l / 2.0;
    let s = l / SQRT_2;
    match i {
        1 => [[h, h], [-h, h]],
        3 => [[0.0, s], [-s, 0.0]],
        5 => [[-h, h], [-h, -h]],
        _ => [[s, 0.0], [0.0, s]],
    }
}

/// Planar trapezoids in `x₃ = 0` realizing the profiles exactly: region
/// `a_i` is the hull of its two inner corners and their scalings by
/// [`OUTER_SCALE`]; `a_{i+1} = −a_i`.
pub fn aronov_polygons(params: &AronovParams) -> Vec<ConvexBody> {
    let mut out = Vec::with_capacity(8);
    for i in [1, 3, 5, 7] {
        let [c1, c2] = inner_corners(i, params.side(i));
        let corners = [c1, c2, c2.map(|x| x * OUTER_SCALE), c1.map(|x| x * OUTER_SCALE)];
        for sign in [1.0, -1.0] {
            let vs: Vec<Vector> = corners
                .iter()
                .map(|c| vector(&[sign * c[0], sign * c[1], 0.0]))
                .collect();
            out.push(ConvexBody::VPolytope { vertices: vs });
        }
    }
    out
}

/// The `n`-th body is `base[(n − 1) mod 8]` raised to height `heights(n)`.
pub fn aronov_elevated_family(
    base: Vec<ConvexBody>,
    heights: impl Fn(usize) -> f64 + Send + Sync + 'static,
) -> Result<GeneratedFamily> {
    if base.len() != 8 {
        return Err(domain(format!("expected 8 base bodies, got {}", base.len())));
    }
    for b in &base {
        if b.dim() != 3 || b.is_halfspace() {
            return Err(domain("base bodies must be bounded bodies in R^3"));
        }
        if b.generators().iter().any(|v| v[2] != 0.0) {
            return Err(domain("base bodies must lie in the plane x3 = 0"));
        }
    }
    let diameter = base.iter().map(|b| b.diameter()).fold(0.0, f64::max);
    Ok(GeneratedFamily::new("aronov-elevated", 3, move |n| {
        base[(n - 1) % 8]
            .translated(&vector(&[0.0, 0.0, heights(n)]))
            .expect("3-d shift")
    })
    .with_diameter_bound(diameter))
}

/// Default rapidly increasing heights `n²`.
pub fn default_heights(n: usize) -> f64 {
    (n * n) as f64
}
