//! The cube family: three families of cube edges, two of them escaping to
//! infinity along `±x₃`, for which every line stays at distance `1/√2` from
//! some family while colorful tuples admit transversals near the unit ball.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use serde::Serialize;

use super::Claim;
use crate::bodies::{ConvexBody, Family, GeneratedFamily};
use crate::distance::dist_body_flat;
use crate::error::{domain, Result};
use crate::geom::{vector, AffineFlat, Direction, Vector};
use crate::oracle::{best_line_r3, circumradius, GridSpec, MaxDistanceToBodies};

const S: f64 = FRAC_1_SQRT_2;

/// Vertex of the cube with side `√2` centred at the origin. `ABCD` is the
/// top face (`x₃ = 1/√2`); `E, F, G, H` lie below `B, A, D, C`.
pub fn cube_vertex(name: char) -> Result<Vector> {
    let c = match name {
        'A' => [-S, -S, S],
        'B' => [S, -S, S],
        'C' => [S, S, S],
        'D' => [-S, S, S],
        'E' => [S, -S, -S],
        'F' => [-S, -S, -S],
        'G' => [-S, S, -S],
        'H' => [S, S, -S],
        _ => return Err(domain(format!("no cube vertex named {name}"))),
    };
    Ok(vector(&c))
}

fn edge(p: char, q: char) -> ConvexBody {
    ConvexBody::Segment {
        a: cube_vertex(p).expect("vertex"),
        b: cube_vertex(q).expect("vertex"),
    }
}

fn at_height(body: ConvexBody, z: f64) -> ConvexBody {
    match body {
        ConvexBody::Segment { mut a, mut b } => {
            a[2] = z;
            b[2] = z;
            ConvexBody::Segment { a, b }
        }
        other => other,
    }
}

#[derive(Debug, Clone)]
pub struct CubeInstance {
    pub vertices: Vec<(char, Vector)>,
    pub families: [GeneratedFamily; 3],
}

/// `𝓕₁ = AB, CD, CD raised to x₃ = n, …`; `𝓕₂ = GH, EF, EF lowered to
/// x₃ = −n, …`; `𝓕₃` cycles `BC, DA, FG, HE`.
pub fn cube_instance() -> CubeInstance {
    let diam = 2.0 * S;
    let f1 = GeneratedFamily::new("F1", 3, |n| match n {
        1 => edge('A', 'B'),
        2 => edge('C', 'D'),
        _ => at_height(edge('C', 'D'), n as f64),
    })
    .with_diameter_bound(diam);
    let f2 = GeneratedFamily::new("F2", 3, |n| match n {
        1 => edge('G', 'H'),
        2 => edge('E', 'F'),
        _ => at_height(edge('E', 'F'), -(n as f64)),
    })
    .with_diameter_bound(diam);
    let f3 = GeneratedFamily::new("F3", 3, |n| match (n - 1) % 4 {
        0 => edge('B', 'C'),
        1 => edge('D', 'A'),
        2 => edge('F', 'G'),
        _ => edge('H', 'E'),
    })
    .with_diameter_bound(diam);
    CubeInstance {
        vertices: "ABCDEFGH"
            .chars()
            .map(|c| (c, cube_vertex(c).expect("vertex")))
            .collect(),
        families: [f1, f2, f3],
    }
}

impl CubeInstance {
    pub fn truncated(&self, n: usize) -> Result<Vec<Family>> {
        self.families.iter().map(|f| f.truncate(n)).collect()
    }
}

fn seg(body: &ConvexBody) -> Result<(Vector, Vector)> {
    match body {
        ConvexBody::Segment { a, b } => Ok((a.clone(), b.clone())),
        _ => Err(domain("cube witnesses are built from segments")),
    }
}

fn cross(a: &Vector, b: &Vector) -> Vector {
    vector(&[
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

/// Closed arc `[start, start + len]` of line directions, angles mod `π`.
#[derive(Debug, Clone, Copy)]
struct Arc {
    start: f64,
    len: f64,
}

const ANG_TOL: f64 = 1e-12;

fn arc_contains(arc: &Arc, phi: f64) -> bool {
    let d = (phi - arc.start).rem_euclid(PI);
    d <= arc.len + ANG_TOL || d >= PI - ANG_TOL
}

fn intersect_arcs(a: &Arc, b: &Arc) -> Vec<Arc> {
    let mut out = Vec::new();
    let d = (b.start - a.start).rem_euclid(PI);
    if d <= a.len + ANG_TOL {
        out.push(Arc {
            start: b.start,
            len: b.len.min((a.len - d).max(0.0)),
        });
    }
    let d = (a.start - b.start).rem_euclid(PI);
    if d <= b.len + ANG_TOL && d > ANG_TOL {
        out.push(Arc {
            start: a.start,
            len: a.len.min((b.len - d).max(0.0)),
        });
    }
    out
}

/// Directions of lines through the plane origin meeting segment `[p, q]`.
fn segment_arc(p: [f64; 2], q: [f64; 2]) -> Arc {
    let crs = p[0] * q[1] - p[1] * q[0];
    let dt = p[0] * q[0] + p[1] * q[1];
    let scale = (p[0].hypot(p[1]) * q[0].hypot(q[1])).max(1e-300);
    if crs.abs() <= 1e-14 * scale {
        if dt <= 0.0 {
            return Arc { start: 0.0, len: PI };
        }
        let a = p[1].atan2(p[0]).rem_euclid(PI);
        return Arc { start: a, len: 0.0 };
    }
    let alpha = p[1].atan2(p[0]).rem_euclid(PI);
    let sweep = crs.atan2(dt);
    if sweep >= 0.0 {
        Arc {
            start: alpha,
            len: sweep,
        }
    } else {
        Arc {
            start: (alpha + sweep).rem_euclid(PI),
            len: -sweep,
        }
    }
}

/// The transversal closest to the origin of three segments, the first two
/// coplanar: every transversal lies in their common plane and passes
/// through the point where the third segment crosses it, so the search
/// reduces to a pencil of lines through that point.
pub fn witness_line(s1: &ConvexBody, s2: &ConvexBody, s3: &ConvexBody) -> Result<Option<AffineFlat>> {
    let (a1, b1) = seg(s1)?;
    let (a2, b2) = seg(s2)?;
    let (a3, b3) = seg(s3)?;
    let d1 = &b1 - &a1;
    let d2 = &b2 - &a2;
    let mut n = cross(&d1, &d2);
    if n.norm() <= 1e-12 * d1.norm() * d2.norm() {
        n = cross(&d1, &(&a2 - &a1));
    }
    if n.norm() <= 1e-14 {
        return Ok(None);
    }
    let n = n.normalize();
    if (&a2 - &a1).dot(&n).abs() > 1e-12 || (&b2 - &a1).dot(&n).abs() > 1e-12 {
        return Ok(None);
    }
    let d3 = &b3 - &a3;
    let denom = d3.dot(&n);
    if denom.abs() <= 1e-14 {
        return Ok(None);
    }
    let t = (&a1 - &a3).dot(&n) / denom;
    if !(-1e-12..=1.0 + 1e-12).contains(&t) {
        return Ok(None);
    }
    let x = &a3 + &d3 * t.clamp(0.0, 1.0);
    let e1 = d1.normalize();
    let e2 = cross(&n, &e1);
    let coords = |p: &Vector| {
        let v = p - &x;
        [v.dot(&e1), v.dot(&e2)]
    };
    let arcs = intersect_arcs(
        &segment_arc(coords(&a1), coords(&b1)),
        &segment_arc(coords(&a2), coords(&b2)),
    );
    let o = coords(&Vector::zeros(3));
    let r = o[0].hypot(o[1]);
    let target = o[1].atan2(o[0]).rem_euclid(PI);
    let mut best: Option<(f64, f64)> = None;
    for arc in arcs {
        let phi = if r == 0.0 || arc_contains(&arc, target) {
            if r == 0.0 {
                arc.start
            } else {
                target
            }
        } else {
            let lo = arc.start;
            let hi = arc.start + arc.len;
            if (lo - target).sin().abs() <= (hi - target).sin().abs() {
                lo
            } else {
                hi
            }
        };
        let dist = r * (phi - target).sin().abs();
        if best.is_none_or(|(_, d)| dist < d) {
            best = Some((phi, dist));
        }
    }
    let Some((phi, _)) = best else { return Ok(None) };
    let dir = &e1 * phi.cos() + &e2 * phi.sin();
    Ok(Some(AffineFlat::line(x, &dir)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSummary {
    pub family: String,
    pub value: f64,
    pub round_values: Vec<f64>,
    pub evaluations: usize,
    pub line_point: Vec<f64>,
    pub line_direction: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubeReport {
    pub truncation: usize,
    pub claims: Vec<Claim>,
    pub tuples_checked: usize,
    pub witness_max_origin_distance: f64,
    pub witness_max_body_distance: f64,
    /// `d(l_n, 𝓞)` for the tuples `(S_{1,n}, S_{2,1}, S_{3,1})`, `n = 1, 2, …`.
    pub witness_sequence: Vec<f64>,
    pub z_axis_sup: Vec<f64>,
    pub oracle: Vec<OracleSummary>,
}

impl CubeReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }
}

/// Options for [`cube_claims_report`].
#[derive(Debug, Clone)]
pub struct CubeReportConfig {
    pub grid: GridSpec,
    /// Families (0-based) searched by the line oracle.
    pub oracle_families: Vec<usize>,
    pub tol: f64,
    pub oracle_tol: f64,
    pub sequence_length: usize,
}

impl CubeReportConfig {
    /// Direction grid `dir²`, offset grid `off²`, window four times the cube
    /// circumradius, oracle on `𝓕₃` only.
    pub fn new(dir: usize, off: usize, rounds: usize) -> Result<Self> {
        let cube: Vec<ConvexBody> = "ABCDEFGH"
            .chars()
            .map(|c| ConvexBody::Segment {
                a: cube_vertex(c).expect("vertex"),
                b: cube_vertex(c).expect("vertex"),
            })
            .collect();
        Ok(CubeReportConfig {
            grid: GridSpec::new(dir, off, 4.0 * circumradius(&cube), rounds)?,
            oracle_families: vec![2],
            tol: 1e-9,
            oracle_tol: 0.02,
            sequence_length: 50,
        })
    }
}

/// Checks every claim about the cube family at truncation `n`.
pub fn cube_claims_report(inst: &CubeInstance, n: usize, cfg: &CubeReportConfig) -> Result<CubeReport> {
    if n < 4 {
        return Err(domain("cube report needs truncation N ≥ 4"));
    }
    let fams = inst.truncated(n)?;
    let tol = cfg.tol;
    let mut claims = Vec::new();

    let worst_diam = fams
        .iter()
        .flat_map(|f| f.bodies.iter())
        .map(|b| (b.diameter() - SQRT_2).abs())
        .fold(0.0, f64::max);
    claims.push(Claim::new(
        "diameters",
        worst_diam <= 1e-12,
        worst_diam,
        0.0,
        1e-12,
        "largest |diam(S) − √2| over truncated families",
    ));

    let z = AffineFlat::through_origin(&[Direction::axis(3, 2)])?;
    let mut z_axis_sup = Vec::new();
    for f in &fams {
        let mut m: f64 = 0.0;
        for b in &f.bodies {
            m = m.max(dist_body_flat(b, &z)?);
        }
        z_axis_sup.push(m);
        claims.push(Claim::new(
            format!("z_axis_sup_{}", f.name),
            (m - FRAC_1_SQRT_2).abs() <= tol,
            m,
            FRAC_1_SQRT_2,
            tol,
            "sup over the family of d(C, x3-axis)",
        ));
    }

    let mut tuples = 0;
    let mut max_origin: f64 = 0.0;
    let mut max_body: f64 = 0.0;
    let mut missing = 0;
    for s1 in &fams[0].bodies {
        for s2 in &fams[1].bodies {
            for s3 in &fams[2].bodies[..4.min(n)] {
                tuples += 1;
                match witness_line(s1, s2, s3)? {
                    Some(line) => {
                        max_origin = max_origin.max(line.base().norm());
                        for s in [s1, s2, s3] {
                            max_body = max_body.max(dist_body_flat(s, &line)?);
                        }
                    }
                    None => missing += 1,
                }
            }
        }
    }
    claims.push(Claim::new(
        "tuple_witnesses",
        missing == 0 && max_origin <= 1.0 + tol && max_body <= tol,
        max_origin,
        1.0,
        tol,
        format!("{tuples} tuples, {missing} without witness, max body distance {max_body:.3e}"),
    ));

    let len = cfg.sequence_length.max(n);
    let mut witness_sequence = Vec::with_capacity(len);
    let s21 = inst.families[1].body_at(1)?;
    let s31 = inst.families[2].body_at(1)?;
    for k in 1..=len {
        let s1k = inst.families[0].body_at(k)?;
        let d = witness_line(&s1k, &s21, &s31)?
            .map(|l| l.base().norm())
            .unwrap_or(f64::INFINITY);
        witness_sequence.push(d);
    }
    let monotone = witness_sequence.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let last = *witness_sequence.last().unwrap_or(&f64::INFINITY);
    let at50 = witness_sequence.get(49).copied().unwrap_or(last);
    claims.push(Claim::new(
        "witness_sequence",
        monotone && at50 >= 0.95 && witness_sequence.iter().all(|d| *d <= 1.0 + tol),
        at50,
        1.0,
        0.05,
        "d(l_n, O) nondecreasing, at most 1, and at least 0.95 by n = 50",
    ));

    let mut oracle = Vec::new();
    for &j in &cfg.oracle_families {
        let f = fams.get(j).ok_or_else(|| domain(format!("no cube family {j}")))?;
        let obj = MaxDistanceToBodies::new(&f.bodies)?;
        let res = best_line_r3(&obj, &cfg.grid)?;
        let passed = if j == 2 {
            (res.value - FRAC_1_SQRT_2).abs() <= cfg.oracle_tol
        } else {
            res.value >= FRAC_1_SQRT_2 - cfg.oracle_tol
        };
        claims.push(Claim::new(
            format!("oracle_min_max_{}", f.name),
            passed,
            res.value,
            FRAC_1_SQRT_2,
            cfg.oracle_tol,
            "grid search over lines of max distance to the family",
        ));
        oracle.push(OracleSummary {
            family: f.name.clone(),
            value: res.value,
            round_values: res.round_values,
            evaluations: res.evaluations,
            line_point: res.flat.base().iter().copied().collect(),
            line_direction: res.flat.basis()[0].iter().copied().collect(),
        });
    }

    Ok(CubeReport {
        truncation: n,
        claims,
        tuples_checked: tuples,
        witness_max_origin_distance: max_origin,
        witness_max_body_distance: max_body,
        witness_sequence,
        z_axis_sup,
        oracle,
    })
}
