//! Instance files: JSON schema, generator descriptors and loading.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bodies::{AnyFamily, ConvexBody, Family, GeneratedFamily};
use crate::constructions::aronov::{aronov_elevated_family, aronov_polygons, default_heights, AronovParams};
use crate::constructions::{compactness_family, cube_instance, random_kflat_instance};
use crate::error::{Error, Result};
use crate::geom::{vector, AffineFlat, Direction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BodySpec {
    Ball { center: Vec<f64>, radius: f64 },
    Segment { a: Vec<f64>, b: Vec<f64> },
    Vpolytope { vertices: Vec<Vec<f64>> },
    Halfspace { normal: Vec<f64>, offset: f64 },
}

impl BodySpec {
    pub fn to_body(&self) -> Result<ConvexBody> {
        match self {
            BodySpec::Ball { center, radius } => ConvexBody::ball(vector(center), *radius),
            BodySpec::Segment { a, b } => ConvexBody::segment(vector(a), vector(b)),
            BodySpec::Vpolytope { vertices } => ConvexBody::vpolytope(vertices.iter().map(|v| vector(v)).collect()),
            BodySpec::Halfspace { normal, offset } => ConvexBody::halfspace(vector(normal), *offset),
        }
    }
}

impl From<&ConvexBody> for BodySpec {
    fn from(b: &ConvexBody) -> Self {
        let v = |x: &crate::geom::Vector| x.iter().copied().collect::<Vec<f64>>();
        match b {
            ConvexBody::Ball { center, radius } => BodySpec::Ball {
                center: v(center),
                radius: *radius,
            },
            ConvexBody::Segment { a, b } => BodySpec::Segment { a: v(a), b: v(b) },
            ConvexBody::VPolytope { vertices } => BodySpec::Vpolytope {
                vertices: vertices.iter().map(v).collect(),
            },
            ConvexBody::HalfSpace { normal, offset } => BodySpec::Halfspace {
                normal: v(normal.as_vector()),
                offset: *offset,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: String,
    #[serde(default)]
    pub params: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    #[serde(default)]
    pub bodies: Vec<BodySpec>,
    #[serde(default)]
    pub limiting_directions: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diameter_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub dim: usize,
    pub families: Vec<FamilySpec>,
    pub r: usize,
    #[serde(default)]
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CubeParams {
    family: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct AronovGenParams {
    #[serde(default = "default_ell")]
    ell: [f64; 4],
}

fn default_ell() -> [f64; 4] {
    [4.0, 5.0, 6.0, 7.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RaisedParams {
    body: BodySpec,
    direction: Vec<f64>,
    #[serde(default = "one")]
    step: f64,
    #[serde(default = "one")]
    power: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomKflatParams {
    r: usize,
    k: usize,
    m: usize,
    seed: u64,
    family: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompactnessParams {
    m: usize,
}

/// Default truncation of generated families.
pub const DEFAULT_TRUNCATION: usize = 20;

/// How the premise of a loaded instance can be checked.
#[derive(Debug, Clone)]
pub enum WitnessSource {
    /// Cube families: witness lines from the two-segment pencil.
    Cube,
    /// One witness flat per colorful tuple, indices 0-based.
    Flats(Vec<(Vec<usize>, AffineFlat)>),
    /// Colorful point premise (k = 0) or nothing known.
    Generic,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub dim: usize,
    pub r: usize,
    pub k: usize,
    pub seed: u64,
    pub families: Vec<AnyFamily>,
    pub truncations: Vec<usize>,
    pub witnesses: WitnessSource,
}

impl Instance {
    /// Finite families, generated ones truncated (an explicit `truncation`
    /// overrides the per-family value).
    pub fn materialize(&self, truncation: Option<usize>) -> Result<Vec<Family>> {
        self.families
            .iter()
            .zip(&self.truncations)
            .map(|(f, t)| f.materialize(truncation.unwrap_or(*t)))
            .collect()
    }
}

fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}

fn params<T: for<'de> Deserialize<'de>>(kind: &str, v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| input(format!("{kind} generator params: {e}")))
}

fn need_dim(kind: &str, want: usize, dim: usize) -> Result<()> {
    if want == dim {
        Ok(())
    } else {
        Err(input(format!(
            "{kind} generator lives in dimension {want}, instance has {dim}"
        )))
    }
}

fn build_generated(spec: &FamilySpec, g: &GeneratorSpec, dim: usize) -> Result<AnyFamily> {
    let mut fam: AnyFamily = match g.kind.as_str() {
        "cube" => {
            need_dim("cube", 3, dim)?;
            let p: CubeParams = params("cube", &g.params)?;
            if !(1..=3).contains(&p.family) {
                return Err(input("cube family must be 1, 2 or 3"));
            }
            let [f1, f2, f3] = cube_instance().families;
            AnyFamily::Generated([f1, f2, f3][p.family - 1].clone())
        }
        "aronov" => {
            need_dim("aronov", 3, dim)?;
            let p: AronovGenParams = params("aronov", &g.params)?;
            let ps = AronovParams::new(p.ell)?;
            AnyFamily::Generated(aronov_elevated_family(aronov_polygons(&ps), default_heights)?)
        }
        "raised" => {
            let p: RaisedParams = params("raised", &g.params)?;
            let body = p.body.to_body()?;
            need_dim("raised", body.dim(), dim)?;
            let u = Direction::new(vector(&p.direction))?;
            need_dim("raised", u.dim(), dim)?;
            if !(p.step > 0.0 && p.power > 0.0) {
                return Err(input("raised generator needs positive step and power"));
            }
            let shift = u.as_vector().clone();
            let diam = body.diameter();
            let rule = move |n: usize| {
                body.translated(&(&shift * (p.step * (n as f64).powf(p.power))))
                    .expect("dimension checked")
            };
            AnyFamily::Generated(
                GeneratedFamily::new(spec.name.clone(), dim, rule)
                    .with_diameter_bound(diam)
                    .with_directions(vec![u]),
            )
        }
        "random_kflat" => {
            let p: RandomKflatParams = params("random_kflat", &g.params)?;
            if p.family == 0 || p.family > p.r {
                return Err(input("random_kflat family must be in 1..=r"));
            }
            let inst = random_kflat_instance(dim, p.r, p.k, p.m, p.seed)?;
            AnyFamily::Finite(inst.families[p.family - 1].clone())
        }
        "compactness" => {
            need_dim("compactness", 2, dim)?;
            let p: CompactnessParams = params("compactness", &g.params)?;
            AnyFamily::Finite(compactness_family(p.m)?)
        }
        other => return Err(input(format!("unknown generator kind {other:?}"))),
    };
    match &mut fam {
        AnyFamily::Finite(f) => f.name = spec.name.clone(),
        AnyFamily::Generated(f) => f.name = spec.name.clone(),
    }
    Ok(fam)
}

fn directions(spec: &FamilySpec, dim: usize) -> Result<Vec<Direction>> {
    spec.limiting_directions
        .iter()
        .map(|d| {
            if d.len() != dim {
                return Err(input(format!("family {}: direction of length {}", spec.name, d.len())));
            }
            Direction::new(vector(d))
        })
        .collect()
}

fn witness_source(file: &InstanceFile) -> Result<WitnessSource> {
    let gens: Vec<Option<&GeneratorSpec>> = file.families.iter().map(|f| f.generator.as_ref()).collect();
    if gens.len() == 3
        && gens.iter().enumerate().all(|(i, g)| {
            g.is_some_and(|g| {
                g.kind == "cube" && params::<CubeParams>("cube", &g.params).is_ok_and(|p| p.family == i + 1)
            })
        })
    {
        return Ok(WitnessSource::Cube);
    }
    let rk: Vec<RandomKflatParams> = gens
        .iter()
        .filter_map(|g| g.filter(|g| g.kind == "random_kflat"))
        .filter_map(|g| params("random_kflat", &g.params).ok())
        .collect();
    if rk.len() == file.families.len()
        && rk
            .iter()
            .enumerate()
            .all(|(i, p)| p.family == i + 1 && (p.r, p.k, p.m, p.seed) == (rk[0].r, rk[0].k, rk[0].m, rk[0].seed))
    {
        let p = &rk[0];
        let inst = random_kflat_instance(file.dim, p.r, p.k, p.m, p.seed)?;
        return Ok(WitnessSource::Flats(inst.witnesses));
    }
    Ok(WitnessSource::Generic)
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| input(format!("instance schema: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn load(&self) -> Result<Instance> {
        if self.dim == 0 {
            return Err(input("dim must be positive"));
        }
        if self.r != self.families.len() {
            return Err(input(format!(
                "r = {} but {} families given",
                self.r,
                self.families.len()
            )));
        }
        if self.k >= self.r {
            return Err(input(format!("k = {} must be smaller than r = {}", self.k, self.r)));
        }
        let mut families = Vec::with_capacity(self.families.len());
        let mut truncations = Vec::with_capacity(self.families.len());
        for spec in &self.families {
            let declared = directions(spec, self.dim)?;
            let mut fam = match &spec.generator {
                Some(g) => {
                    if !spec.bodies.is_empty() {
                        return Err(input(format!(
                            "family {}: bodies and generator are exclusive",
                            spec.name
                        )));
                    }
                    truncations.push(g.truncation.unwrap_or(DEFAULT_TRUNCATION));
                    build_generated(spec, g, self.dim)?
                }
                None => {
                    if spec.bodies.is_empty() {
                        return Err(input(format!("family {} has no bodies", spec.name)));
                    }
                    let bodies = spec.bodies.iter().map(BodySpec::to_body).collect::<Result<Vec<_>>>()?;
                    if let Some(b) = bodies.iter().find(|b| b.dim() != self.dim) {
                        return Err(Error::Dimension {
                            expected: self.dim,
                            got: b.dim(),
                        });
                    }
                    truncations.push(bodies.len());
                    AnyFamily::Finite(Family::new(spec.name.clone(), bodies)?)
                }
            };
            if !declared.is_empty() {
                fam = match fam {
                    AnyFamily::Finite(f) => AnyFamily::Finite(f.with_directions(declared)),
                    AnyFamily::Generated(g) => AnyFamily::Generated(g.with_directions(declared)),
                };
            }
            if let Some(bound) = spec.diameter_bound {
                fam = match fam {
                    AnyFamily::Finite(f) => AnyFamily::Finite(f.with_diameter_bound(bound)?),
                    AnyFamily::Generated(g) => AnyFamily::Generated(g.with_diameter_bound(bound)),
                };
            }
            families.push(fam);
        }
        Ok(Instance {
            dim: self.dim,
            r: self.r,
            k: self.k,
            seed: self.seed,
            families,
            truncations,
            witnesses: witness_source(self)?,
        })
    }

    /// The cube instance with `r = 3`, `k = 1`.
    pub fn cube(truncation: usize) -> Self {
        let families = (1..=3)
            .map(|i| FamilySpec {
                name: format!("F{i}"),
                bodies: Vec::new(),
                limiting_directions: Vec::new(),
                generator: Some(GeneratorSpec {
                    kind: "cube".into(),
                    params: serde_json::json!({ "family": i }),
                    truncation: Some(truncation),
                }),
                diameter_bound: None,
            })
            .collect();
        InstanceFile {
            dim: 3,
            families,
            r: 3,
            k: 1,
            seed: 0,
        }
    }

    /// A seeded random instance whose colorful tuples are pierced by
    /// translates of a common `k`-dimensional subspace.
    pub fn random_kflat(dim: usize, r: usize, k: usize, m: usize, seed: u64) -> Self {
        let families = (1..=r)
            .map(|i| FamilySpec {
                name: format!("F{i}"),
                bodies: Vec::new(),
                limiting_directions: Vec::new(),
                generator: Some(GeneratorSpec {
                    kind: "random_kflat".into(),
                    params: serde_json::json!({ "r": r, "k": k, "m": m, "seed": seed, "family": i }),
                    truncation: None,
                }),
                diameter_bound: None,
            })
            .collect();
        InstanceFile {
            dim,
            families,
            r,
            k,
            seed,
        }
    }

    /// Expanded form with every family written out body by body.
    pub fn from_families(families: &[Family], k: usize, seed: u64) -> Result<Self> {
        let dim = families
            .iter()
            .find_map(|f| f.dim())
            .ok_or_else(|| input("no bodies to write"))?;
        Ok(InstanceFile {
            dim,
            families: families
                .iter()
                .map(|f| FamilySpec {
                    name: f.name.clone(),
                    bodies: f.bodies.iter().map(BodySpec::from).collect(),
                    limiting_directions: f
                        .declared_limiting_directions
                        .iter()
                        .map(|u| u.as_vector().iter().copied().collect())
                        .collect(),
                    generator: None,
                    diameter_bound: f.diameter_bound,
                })
                .collect(),
            r: families.len(),
            k,
            seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn body_json_uses_type_tags() {
        let b: BodySpec = serde_json::from_str(r#"{"type":"ball","center":[0,1],"radius":2}"#).unwrap();
        assert_eq!(
            b.to_body().unwrap(),
            ConvexBody::ball(vector(&[0.0, 1.0]), 2.0).unwrap()
        );
        let h: BodySpec = serde_json::from_str(r#"{"type":"halfspace","normal":[0,3],"offset":1}"#).unwrap();
        let back = BodySpec::from(&h.to_body().unwrap());
        assert_eq!(
            back,
            BodySpec::Halfspace {
                normal: vec![0.0, 1.0],
                offset: 1.0
            }
        );
    }

    #[test]
    fn cube_file_round_trips_and_loads() {
        let f = InstanceFile::cube(12);
        let text = serde_json::to_string(&f).unwrap();
        let g = InstanceFile::from_json(&text).unwrap();
        assert_eq!(f, g);
        let inst = g.load().unwrap();
        assert!(matches!(inst.witnesses, WitnessSource::Cube));
        assert_eq!(inst.materialize(None).unwrap()[0].len(), 12);
    }

    #[test]
    fn k_at_least_r_is_rejected() {
        let mut f = InstanceFile::cube(5);
        f.k = 3;
        assert!(matches!(f.load(), Err(Error::Input(_))));
    }

    #[test]
    fn random_kflat_file_carries_witness_flats() {
        let inst = InstanceFile::random_kflat(4, 3, 1, 2, 7).load().unwrap();
        match inst.witnesses {
            WitnessSource::Flats(w) => assert_eq!(w.len(), 8),
            _ => panic!("expected witness flats"),
        }
        assert_eq!(inst.families[0].declared_limiting_directions().len(), 1);
    }

    #[test]
    fn expanded_families_round_trip() {
        let fams = InstanceFile::random_kflat(3, 2, 0, 2, 1)
            .load()
            .unwrap()
            .materialize(None)
            .unwrap();
        let file = InstanceFile::from_families(&fams, 0, 1).unwrap();
        let again = InstanceFile::from_json(&serde_json::to_string(&file).unwrap())
            .unwrap()
            .load()
            .unwrap()
            .materialize(None)
            .unwrap();
        assert_eq!(fams[1].bodies, again[1].bodies);
    }
}
