use serde::Serialize;
use serde_json::{json, Value};

use super::instance::{Instance, InstanceFile, WitnessSource};
use super::report::{render, to_value, Format};
use super::{Command, Common, Construction, FlatKind, Outcome, PremiseKind};
use crate::bodies::{AnyFamily, ConvexBody, Family};
use crate::constructions::aronov::AronovParams;
use crate::constructions::cube::witness_line;
use crate::constructions::{
    aronov_claims_report, compactness_claims_report, cube_claims_report, cube_instance, AronovReportConfig,
    CompactnessReportConfig, CubeReportConfig,
};
use crate::distance::{dist_body_flat, SolverConfig};
use crate::error::{Error, Result};
use crate::geom::{AffineFlat, Direction, Vector};
use crate::helly::{check_premise, colorful_bound, helly_bound, kflat_bound, PremiseMode, PremiseViolation};
use crate::kflat::{
    check_witness_flat, estimate_lds, reduce_and_lift, verify_kflat_bound, DEFAULT_CLUSTER_RADIUS, DEFAULT_PROBES,
};
use crate::oracle::{
    best_line_r2, best_line_r3, best_plane_through_origin_r3_with, circumradius, GridSpec, MaxDistanceToBodies,
};

fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| input(format!("bad {what}: {s:?}"))))
        .collect()
}

fn grid3(s: Option<&str>, default: [usize; 3]) -> Result<[usize; 3]> {
    match s {
        None => Ok(default),
        Some(s) => parse_list::<usize>(s, "grid")?
            .try_into()
            .map_err(|_| input(format!("grid needs three numbers DIR,OFF,ROUNDS, got {s:?}"))),
    }
}

fn grid2(s: Option<&str>, default: [usize; 2]) -> Result<[usize; 2]> {
    match s {
        None => Ok(default),
        Some(s) => parse_list::<usize>(s, "grid")?
            .try_into()
            .map_err(|_| input(format!("grid needs two numbers RES,ROUNDS, got {s:?}"))),
    }
}

fn solver(common: &Common) -> Result<SolverConfig> {
    let cfg = SolverConfig {
        tol: common.tol,
        seed: common.seed,
        ..SolverConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn coords(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

#[derive(Serialize)]
struct FlatJson {
    point: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

impl From<&AffineFlat> for FlatJson {
    fn from(f: &AffineFlat) -> Self {
        FlatJson {
            point: coords(f.base()),
            basis: f.basis().iter().map(coords).collect(),
        }
    }
}

fn finish<T: Serialize>(report: &T, passed: bool, format: Format) -> Result<Outcome> {
    Ok(Outcome {
        output: render(&to_value(report)?, format)?,
        passed,
    })
}

pub(super) fn dispatch(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Bound { n, r, k, format } => bound(*n, *r, *k, *format),
        Command::Solve {
            instance,
            truncation,
            common,
        } => solve(&InstanceFile::read(instance)?.load()?, *truncation, common),
        Command::Verify {
            construction,
            grid,
            ell,
            m,
            truncation,
            common,
        } => verify(*construction, grid.as_deref(), ell, *m, *truncation, common),
        Command::Oracle {
            instance,
            grid,
            flat,
            truncation,
            common,
        } => oracle(
            &InstanceFile::read(instance)?.load()?,
            grid.as_deref(),
            *flat,
            *truncation,
            common,
        ),
        Command::Premise {
            instance,
            mode,
            r,
            truncation,
            common,
        } => premise(&InstanceFile::read(instance)?.load()?, *mode, *r, *truncation, common),
    }
}

fn bound(n: Option<usize>, r: usize, k: Option<usize>, format: Format) -> Result<Outcome> {
    let (kind, value) = match (n, k) {
        (_, Some(k)) => ("kflat", kflat_bound(r, k)?),
        (Some(n), None) => ("helly", helly_bound(n, r)?),
        (None, None) => ("colorful", colorful_bound(r)?),
    };
    let report = json!({ "bound": kind, "n": n, "r": r, "k": k, "value": value });
    finish(&report, true, format)
}

#[derive(Serialize)]
struct DirectionJson {
    family: String,
    source: &'static str,
    direction: Vec<f64>,
}

fn flat_directions(inst: &Instance) -> Result<(Vec<Direction>, Vec<DirectionJson>)> {
    let mut dirs = Vec::new();
    let mut out = Vec::new();
    for fam in &inst.families[..inst.k] {
        let (u, source) = if let Some(u) = fam.declared_limiting_directions().first() {
            (u.clone(), "declared")
        } else if let AnyFamily::Generated(g) = fam {
            let est = estimate_lds(g, &DEFAULT_PROBES, DEFAULT_CLUSTER_RADIUS)?;
            let u = est
                .directions
                .first()
                .cloned()
                .ok_or_else(|| input(format!("family {} shows no limiting direction", g.name)))?;
            (u, "estimated")
        } else {
            return Err(input(format!(
                "family {} is finite and declares no limiting direction",
                fam.name()
            )));
        };
        out.push(DirectionJson {
            family: fam.name().to_string(),
            source,
            direction: coords(u.as_vector()),
        });
        dirs.push(u);
    }
    Ok((dirs, out))
}

#[derive(Serialize)]
struct PremiseJson {
    method: &'static str,
    tuples_checked: usize,
    violations: Vec<PremiseViolation>,
    indeterminate: Vec<Vec<usize>>,
    passed: Option<bool>,
}

fn colorful_tuples(fams: &[Family]) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    fams.iter().map(|f| 0..f.len()).multi_cartesian_product().collect()
}

fn check_flat_premise(inst: &Instance, fams: &[Family], tol: f64, cfg: &SolverConfig) -> Result<PremiseJson> {
    match &inst.witnesses {
        WitnessSource::Cube => {
            let mut violations = Vec::new();
            let tuples = colorful_tuples(fams);
            for t in &tuples {
                let bodies: Vec<&ConvexBody> = t.iter().zip(fams).map(|(&i, f)| &f.bodies[i]).collect();
                match witness_line(bodies[0], bodies[1], bodies[2])? {
                    Some(line) => {
                        let owned: Vec<ConvexBody> = bodies.into_iter().cloned().collect();
                        let w = check_witness_flat(&owned, &line, tol)?;
                        if !w.passed {
                            violations.push(PremiseViolation {
                                indices: t.clone(),
                                distance: Some(w.origin_distance),
                            });
                        }
                    }
                    None => violations.push(PremiseViolation {
                        indices: t.clone(),
                        distance: None,
                    }),
                }
            }
            let passed = violations.is_empty();
            Ok(PremiseJson {
                method: "cube_witness_lines",
                tuples_checked: tuples.len(),
                violations,
                indeterminate: Vec::new(),
                passed: Some(passed),
            })
        }
        WitnessSource::Flats(ws) => {
            let mut violations = Vec::new();
            for (t, flat) in ws {
                let bodies: Vec<ConvexBody> = t.iter().zip(fams).map(|(&i, f)| f.bodies[i].clone()).collect();
                let w = check_witness_flat(&bodies, flat, tol)?;
                if !w.passed {
                    violations.push(PremiseViolation {
                        indices: t.clone(),
                        distance: Some(w.origin_distance.max(w.max_body_distance)),
                    });
                }
            }
            let passed = violations.is_empty();
            Ok(PremiseJson {
                method: "witness_flats",
                tuples_checked: ws.len(),
                violations,
                indeterminate: Vec::new(),
                passed: Some(passed),
            })
        }
        WitnessSource::Generic if inst.k == 0 => {
            let rep = check_premise(fams, PremiseMode::Colorful, &Vector::zeros(inst.dim), cfg)?;
            let passed = rep.passed();
            Ok(PremiseJson {
                method: "colorful_points",
                tuples_checked: rep.tuples_checked,
                violations: rep.violations,
                indeterminate: rep.indeterminate,
                passed: Some(passed),
            })
        }
        WitnessSource::Generic => Ok(PremiseJson {
            method: "unchecked",
            tuples_checked: 0,
            violations: Vec::new(),
            indeterminate: Vec::new(),
            passed: None,
        }),
    }
}

#[derive(Serialize)]
struct CertificateJson {
    j: usize,
    family: String,
    flat: FlatJson,
    max_distance: f64,
    bound: f64,
    margin: f64,
    projected_value: f64,
    witness: Vec<f64>,
    argmax: Option<usize>,
    converged: bool,
}

#[derive(Serialize)]
struct SolveJson {
    dim: usize,
    r: usize,
    k: usize,
    truncations: Vec<usize>,
    directions: Vec<DirectionJson>,
    premise: PremiseJson,
    certificate: CertificateJson,
    verification: crate::kflat::KflatReport,
    passed: bool,
}

pub(super) fn solve(inst: &Instance, truncation: Option<usize>, common: &Common) -> Result<Outcome> {
    let cfg = solver(common)?;
    let fams = inst.materialize(truncation)?;
    let truncations: Vec<usize> = fams.iter().map(Family::len).collect();
    let premise = check_flat_premise(inst, &fams, common.tol, &cfg)?;
    let (dirs, dir_json) = flat_directions(inst)?;
    let cert = reduce_and_lift(&fams, &dirs, &cfg)?;
    let check_trunc = truncation.unwrap_or(inst.truncations[cert.family_index]);
    let verification = verify_kflat_bound(&cert, &inst.families, check_trunc, common.tol)?;
    let passed = verification.passed && premise.passed != Some(false);
    let report = SolveJson {
        dim: inst.dim,
        r: inst.r,
        k: inst.k,
        truncations,
        directions: dir_json,
        premise,
        certificate: CertificateJson {
            j: cert.family_index + 1,
            family: fams[cert.family_index].name.clone(),
            flat: FlatJson::from(&cert.flat),
            max_distance: cert.max_distance,
            bound: cert.bound,
            margin: cert.margin(),
            projected_value: cert.projected_value,
            witness: coords(&cert.witness),
            argmax: cert.argmax,
            converged: cert.converged,
        },
        verification,
        passed,
    };
    finish(&report, passed, common.format)
}

fn verify(
    construction: Construction,
    grid: Option<&str>,
    ell: &str,
    m: usize,
    truncation: Option<usize>,
    common: &Common,
) -> Result<Outcome> {
    match construction {
        Construction::Cube => {
            let [dir, off, rounds] = grid3(grid, [128, 64, 3])?;
            let mut cfg = CubeReportConfig::new(dir, off, rounds)?;
            cfg.oracle_families = vec![0, 1, 2];
            cfg.tol = common.tol;
            let rep = cube_claims_report(&cube_instance(), truncation.unwrap_or(20), &cfg)?;
            finish(&rep, rep.passed(), common.format)
        }
        Construction::Aronov => {
            let [res, rounds] = grid2(grid, [128, 3])?;
            let ls: [f64; 4] = parse_list::<f64>(ell, "side lengths")?
                .try_into()
                .map_err(|_| input("--ell takes four side lengths"))?;
            let params = AronovParams::new(ls)?;
            let cfg = AronovReportConfig {
                plane_resolution: res,
                plane_rounds: rounds,
                truncation: truncation.unwrap_or(24),
                seed: common.seed,
                ..AronovReportConfig::default()
            };
            let rep = aronov_claims_report(&params, &cfg)?;
            finish(&rep, rep.passed(), common.format)
        }
        Construction::Compactness => {
            let [res, rounds] = grid2(grid, [256, 3])?;
            let mut cfg = CompactnessReportConfig::new(res, rounds, common.seed)?;
            cfg.tol = common.tol;
            let rep = compactness_claims_report(m, &cfg)?;
            finish(&rep, rep.passed(), common.format)
        }
    }
}

#[derive(Serialize)]
struct OracleFamilyJson {
    family: String,
    bodies: usize,
    value: f64,
    round_values: Vec<f64>,
    evaluations: usize,
    flat: FlatJson,
}

fn oracle(
    inst: &Instance,
    grid: Option<&str>,
    flat: FlatKind,
    truncation: Option<usize>,
    common: &Common,
) -> Result<Outcome> {
    let fams = inst.materialize(truncation)?;
    let mut out = Vec::new();
    for f in &fams {
        let res = match (inst.dim, flat) {
            (3, FlatKind::Line) => {
                let [dir, off, rounds] = grid3(grid, [64, 32, 3])?;
                let spec = GridSpec::for_bodies(&f.bodies, dir, off, rounds)?;
                best_line_r3(&MaxDistanceToBodies::new(&f.bodies)?, &spec)?
            }
            (3, FlatKind::Plane) => {
                let [res, rounds] = grid2(grid, [128, 3])?;
                let obj = |p: &AffineFlat| max_distance(&f.bodies, p);
                best_plane_through_origin_r3_with(obj, res, rounds)?
            }
            (2, FlatKind::Line) => {
                let [dir, off, rounds] = grid3(grid, [256, 256, 3])?;
                let spec = GridSpec::new(dir, off, 4.0 * circumradius(&f.bodies).max(1e-3), rounds)?;
                best_line_r2(|l: &AffineFlat| max_distance(&f.bodies, l), &spec)?
            }
            (d, _) => return Err(input(format!(
                "the oracle searches lines in dimension 2 or 3 and planes in dimension 3, instance has dimension {d}"
            ))),
        };
        out.push(OracleFamilyJson {
            family: f.name.clone(),
            bodies: f.len(),
            value: res.value,
            round_values: res.round_values,
            evaluations: res.evaluations,
            flat: FlatJson::from(&res.flat),
        });
    }
    let best = out.iter().map(|o| o.value).fold(f64::INFINITY, f64::min);
    let report = json!({
        "dim": inst.dim,
        "flat": match flat { FlatKind::Line => "line", FlatKind::Plane => "plane" },
        "families": to_value(&out)?,
        "min_over_families": best,
    });
    finish(&report, true, common.format)
}

fn max_distance(bodies: &[ConvexBody], flat: &AffineFlat) -> f64 {
    bodies
        .iter()
        .map(|b| dist_body_flat(b, flat).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
}

fn premise(
    inst: &Instance,
    mode: Option<PremiseKind>,
    r: Option<usize>,
    truncation: Option<usize>,
    common: &Common,
) -> Result<Outcome> {
    let cfg = solver(common)?;
    let fams = inst.materialize(truncation)?;
    let rep: PremiseJson = match mode {
        Some(PremiseKind::Subsets) => {
            let [fam] = fams.as_slice() else {
                return Err(input("subsets mode takes an instance with one family"));
            };
            let r = r.unwrap_or(inst.r);
            let rep = check_premise(
                std::slice::from_ref(fam),
                PremiseMode::Subsets { r },
                &Vector::zeros(inst.dim),
                &cfg,
            )?;
            let passed = rep.passed();
            PremiseJson {
                method: "subset_points",
                tuples_checked: rep.tuples_checked,
                violations: rep.violations,
                indeterminate: rep.indeterminate,
                passed: Some(passed),
            }
        }
        Some(PremiseKind::Colorful) | None => check_flat_premise(inst, &fams, common.tol, &cfg)?,
    };
    let passed = rep.passed != Some(false);
    let value: Value = to_value(&rep)?;
    finish(&value, passed, common.format)
}
