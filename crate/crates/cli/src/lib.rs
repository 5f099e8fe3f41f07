//! Script runner behind the `cgarig` binary.
//!
//! A run loads a rig, validates the whole script against it, then executes
//! the actions in order on a single current model. Every run writes
//! `metrics.json` into the output directory, including failed runs.

pub mod script;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use cgarig::algebra::Plane;
use cgarig::anim::{compare_backends, generate_keyframe, global_pose_at, skin, Backend, Pose};
use cgarig::cut::{cut_with, PLANE_EPSILON};
use cgarig::exec::Exec;
use cgarig::rig::{export_obj, fixtures, load_rig_file, to_json, Mesh, RiggedModel};
use cgarig::tear::{self, default_opening, open_tear, scalpel_hit_linear, Accel, FaceBvh, ScalpelState, TearOptions};

pub use script::{parse_script, validate, Action, Script, SCRIPT_VERSION};

pub const METRICS_VERSION: u32 = 1;
pub const DEFAULT_RIG: &str = "builtin:cylinders";

/// Loads `builtin:<name>` fixtures or a rig JSON file.
pub fn load_model(spec: &str) -> Result<RiggedModel> {
    match spec.strip_prefix("builtin:") {
        Some("cylinders") => Ok(fixtures::cylinders()),
        Some("arm") => Ok(fixtures::arm()),
        Some(other) => bail!("unknown builtin rig '{other}' (expected cylinders or arm)"),
        None => load_rig_file(spec).with_context(|| format!("loading rig {spec}")),
    }
}

/// Bundled scalpel script for a builtin rig.
pub fn builtin_scalpel(spec: &str) -> Option<Vec<ScalpelState>> {
    match spec {
        "builtin:cylinders" => Some(tear::scripts::cylinders()),
        "builtin:arm" => Some(tear::scripts::arm()),
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub rig: Option<String>,
    pub out: PathBuf,
    pub seed: u64,
    pub backend: Backend,
    pub accel: Accel,
    pub exec: Exec,
}

impl RunOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Self {
            rig: None,
            out: out.into(),
            seed: 0,
            backend: Backend::Cga,
            accel: Accel::Bvh,
            exec: Exec::Parallel,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionMetrics {
    pub index: usize,
    #[serde(rename = "type")]
    pub kind: String,
    pub wall_ms: f64,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(flatten)]
    pub values: Map<String, Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Metrics {
    pub metrics_version: u32,
    pub rig: String,
    pub backend: String,
    pub accel: String,
    pub seed: u64,
    pub parallel: bool,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub vertices: usize,
    pub faces: usize,
    pub bones: usize,
    pub actions: Vec<ActionMetrics>,
    pub outputs: Vec<String>,
}

impl Metrics {
    pub fn succeeded(&self) -> bool {
        self.status == "ok"
    }
}

fn accel_name(a: Accel) -> &'static str {
    match a {
        Accel::Linear => "off",
        Accel::Bvh => "on",
    }
}

struct Engine<'a> {
    opts: &'a RunOptions,
    rig: String,
    model: RiggedModel,
    frame: usize,
    outputs: Vec<String>,
}

/// Runs a script and always writes `metrics.json`. The returned metrics
/// carry the failure, if any; `Err` is reserved for failing to write them.
pub fn run_script(script: &Script, opts: &RunOptions) -> Result<Metrics> {
    std::fs::create_dir_all(&opts.out).with_context(|| format!("creating {}", opts.out.display()))?;
    let rig = opts
        .rig
        .clone()
        .or_else(|| script.rig.clone())
        .unwrap_or_else(|| DEFAULT_RIG.to_string());
    let mut metrics = Metrics {
        metrics_version: METRICS_VERSION,
        rig: rig.clone(),
        backend: opts.backend.name().to_string(),
        accel: accel_name(opts.accel).to_string(),
        seed: opts.seed,
        parallel: opts.exec == Exec::Parallel && Exec::parallel_available(),
        status: "ok".into(),
        error: None,
        vertices: 0,
        faces: 0,
        bones: 0,
        actions: Vec::new(),
        outputs: Vec::new(),
    };

    let prepared = load_model(&rig).and_then(|model| {
        validate(script, &model)?;
        for action in &script.actions {
            if let Action::Tear { scalpel: None, .. } = action {
                if builtin_scalpel(&rig).is_none() {
                    bail!("tear without a scalpel script needs a builtin rig");
                }
            }
        }
        Ok(model)
    });
    let model = match prepared {
        Ok(m) => m,
        Err(e) => {
            metrics.status = "error".into();
            metrics.error = Some(format!("{e:#}"));
            write_metrics(&metrics, &opts.out)?;
            return Ok(metrics);
        }
    };
    metrics.vertices = model.mesh.vertex_count();
    metrics.faces = model.mesh.face_count();
    metrics.bones = model.skeleton.len();

    let mut engine = Engine {
        opts,
        rig,
        model,
        frame: 0,
        outputs: Vec::new(),
    };
    if script.actions.is_empty() {
        let started = Instant::now();
        let result = engine.sample_pose(&Pose::bind(&engine.model.skeleton));
        metrics.actions.push(finish(0, "sample", started, result.map(|v| {
            let mut m = Map::new();
            m.insert("frames".into(), json!([v]));
            m
        })));
    }
    for (i, action) in script.actions.iter().enumerate() {
        let started = Instant::now();
        let result = engine.execute(action);
        metrics.actions.push(finish(i, action.kind(), started, result));
        if metrics.actions.last().is_some_and(|a| a.error.is_some()) {
            break;
        }
    }
    if let Some(failed) = metrics.actions.iter().find(|a| a.error.is_some()) {
        metrics.status = "error".into();
        metrics.error = Some(format!("action {} ({}): {}", failed.index, failed.kind, failed.error.as_deref().unwrap_or("")));
    }
    metrics.outputs = engine.outputs;
    write_metrics(&metrics, &opts.out)?;
    Ok(metrics)
}

fn finish(index: usize, kind: &str, started: Instant, result: Result<Map<String, Value>>) -> ActionMetrics {
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    let (status, error, values) = match result {
        Ok(values) => ("ok", None, values),
        Err(e) => ("error", Some(format!("{e:#}")), Map::new()),
    };
    ActionMetrics {
        index,
        kind: kind.to_string(),
        wall_ms,
        status: status.to_string(),
        error,
        values,
    }
}

fn write_metrics(metrics: &Metrics, dir: &Path) -> Result<()> {
    let path = dir.join("metrics.json");
    let text = serde_json::to_string_pretty(metrics)?;
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn obj(map: Value) -> Map<String, Value> {
    match map {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn error_norms(r: &cgarig::anim::ErrorReport) -> Value {
    json!({
        "linf_rel": r.linf,
        "mean_rel": r.mean,
        "linf_abs": r.linf_abs,
        "worst_vertex": r.worst_vertex,
    })
}

impl Engine<'_> {
    fn write_mesh(&mut self, mesh: &Mesh, name: &str) -> Result<String> {
        let path = self.opts.out.join(name);
        export_obj(mesh, &path).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(name.to_string());
        Ok(name.to_string())
    }

    fn sample_pose(&mut self, pose: &Pose) -> Result<String> {
        let frame = skin(&self.model, pose, self.opts.backend, self.opts.exec)?;
        let mesh = Mesh::new(frame.positions, self.model.mesh.faces.clone());
        let name = format!("frame_{:04}.obj", self.frame);
        self.frame += 1;
        self.write_mesh(&mesh, &name)
    }

    fn execute(&mut self, action: &Action) -> Result<Map<String, Value>> {
        match action {
            Action::SetKeyframe { clip, bone, time, delta, trs } => {
                let bind = self.model.skeleton.bone(*bone).ok_or_else(|| anyhow!("unknown bone {bone}"))?.bind;
                let key = match trs {
                    Some(trs) => trs.to_trs()?,
                    None => bind.compose(&delta.to_trs()?),
                };
                let inserted = generate_keyframe(&mut self.model, clip, *bone, key, *time)?;
                Ok(obj(json!({ "overwritten": inserted == cgarig::anim::KeyInsert::Overwritten })))
            }
            Action::Sample { clip, times } => {
                let c = self
                    .model
                    .clips
                    .get(clip)
                    .cloned()
                    .ok_or_else(|| anyhow!("unknown clip '{clip}'"))?;
                let mut frames = Vec::new();
                for &t in times {
                    let pose = global_pose_at(&self.model, &c, t);
                    frames.push(self.sample_pose(&pose)?);
                }
                Ok(obj(json!({ "frames": frames })))
            }
            Action::Cut { plane } => {
                let plane = plane.to_plane()?;
                let result = cut_with(&self.model, &plane, self.opts.exec)?;
                let m1 = self.write_mesh(&result.m1.mesh, "cut_M1.obj")?;
                let m2 = self.write_mesh(&result.m2.mesh, "cut_M2.obj")?;
                let values = json!({
                    "cut_points": result.cut_points.len(),
                    "cut_faces": result.cut_faces,
                    "polylines": result.polylines.len(),
                    "closed_polylines": result.polylines.iter().filter(|p| p.closed).count(),
                    "m1_side": format!("{:?}", result.m1_side),
                    "m1": { "vertices": result.m1.mesh.vertex_count(), "faces": result.m1.mesh.face_count(), "file": m1 },
                    "m2": { "vertices": result.m2.mesh.vertex_count(), "faces": result.m2.mesh.face_count(), "file": m2 },
                });
                self.model = result.m1;
                Ok(obj(values))
            }
            Action::Tear { scalpel, delta } => {
                let states: Vec<ScalpelState> = match scalpel {
                    Some(s) => s.iter().map(ScalpelState::from).collect(),
                    None => builtin_scalpel(&self.rig).ok_or_else(|| anyhow!("no bundled scalpel script for {}", self.rig))?,
                };
                let before = self.model.mesh.edge_faces().boundary_edge_count();
                let torn = tear::tear(
                    &self.model,
                    &states,
                    TearOptions {
                        accel: self.opts.accel,
                        exec: self.opts.exec,
                    },
                )?;
                let delta = delta.unwrap_or_else(|| default_opening(&self.model));
                let opened = open_tear(&torn, delta)?;
                let file = self.write_mesh(&opened.mesh, "torn.obj")?;
                let values = json!({
                    "intersection_points": torn.intersection_points(),
                    "per_step": torn.paths.iter().map(|p| p.intermediates.len()).collect::<Vec<_>>(),
                    "duplicates": torn.duplicates.len(),
                    "anchor_splits": torn.anchor_splits.len(),
                    "boundary_edges_before": before,
                    "boundary_edges_after": opened.mesh.edge_faces().boundary_edge_count(),
                    "vertices": opened.mesh.vertex_count(),
                    "faces": opened.mesh.face_count(),
                    "delta": delta,
                    "file": file,
                });
                self.model = opened;
                Ok(obj(values))
            }
            Action::Compare { reference, test, pose } => {
                let reference: Backend = reference.parse().map_err(|e: String| anyhow!(e))?;
                let test: Backend = test.parse().map_err(|e: String| anyhow!(e))?;
                let deltas = pose
                    .iter()
                    .map(|bd| Ok((bd.bone, bd.delta.to_trs()?)))
                    .collect::<Result<Vec<_>>>()?;
                let pose = Pose::articulated(&self.model.skeleton, &deltas);
                let report = compare_backends(&self.model, &pose, reference, test, self.opts.exec)?;
                Ok(obj(json!({
                    "reference": reference.name(),
                    "test": test.name(),
                    "bbox_diagonal": self.model.mesh.bbox_diagonal(),
                    "norms": error_norms(&report),
                })))
            }
            Action::Export { name, dir } => {
                let prefix = match dir {
                    Some(d) => {
                        std::fs::create_dir_all(self.opts.out.join(d))?;
                        format!("{d}/")
                    }
                    None => String::new(),
                };
                let file = self.write_mesh(&self.model.mesh.clone(), &format!("{prefix}{name}.obj"))?;
                let rig_file = format!("{prefix}{name}.rig.json");
                std::fs::write(self.opts.out.join(&rig_file), to_json(&self.model))?;
                self.outputs.push(rig_file.clone());
                Ok(obj(json!({ "file": file, "rig": rig_file })))
            }
            Action::Bench { repeats } => self.bench(*repeats),
        }
    }

    fn bench(&self, repeats: usize) -> Result<Map<String, Value>> {
        fn time<T>(repeats: usize, mut f: impl FnMut() -> Result<T>) -> Result<f64> {
            let mut best = f64::INFINITY;
            for _ in 0..repeats {
                let t = Instant::now();
                f()?;
                best = best.min(t.elapsed().as_secs_f64() * 1e3);
            }
            Ok(best)
        }
        let model = &self.model;
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed);
        let deltas: Vec<_> = model
            .skeleton
            .bones()
            .iter()
            .filter(|b| b.parent.is_some())
            .map(|b| {
                let axis = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), 1.0);
                (b.id, cgarig::rig::Trs::from_axis_angle(axis, rng.random_range(-1.0..1.0)))
            })
            .collect();
        let pose = Pose::articulated(&model.skeleton, &deltas);

        let mut skinning = Map::new();
        for backend in Backend::ALL {
            let seq = time(repeats, || Ok(skin(model, &pose, backend, Exec::Sequential)?))?;
            let par = time(repeats, || Ok(skin(model, &pose, backend, Exec::Parallel)?))?;
            skinning.insert(
                backend.name().into(),
                json!({ "sequential_ms": seq, "parallel_ms": par, "speedup": seq / par }),
            );
        }

        let (lo, hi) = model.mesh.bounds().ok_or_else(|| anyhow!("empty mesh"))?;
        let centre = (lo + hi) / 2.0;
        let plane = Plane::through_point(Vector3::new(1.0, 0.2, 0.1), &centre)?;
        let cut_seq = time(repeats, || Ok(cut_with(model, &plane, Exec::Sequential)?))?;
        let cut_par = time(repeats, || Ok(cut_with(model, &plane, Exec::Parallel)?))?;

        let h = 1e-3 * model.mesh.bbox_diagonal();
        let queries: Vec<ScalpelState> = (0..64)
            .map(|_| {
                let f = rng.random_range(0..model.mesh.face_count());
                let [a, b, c] = model.mesh.triangle(f);
                let (mut u, mut v): (f64, f64) = (rng.random(), rng.random());
                if u + v > 1.0 {
                    (u, v) = (1.0 - u, 1.0 - v);
                }
                let p = a + (b - a) * u + (c - a) * v;
                let n = (b - a).cross(&(c - a)).normalize();
                ScalpelState {
                    time: 0.0,
                    tip: p - n * h,
                    tail: p + n * h,
                }
            })
            .collect();
        let eps = PLANE_EPSILON * model.mesh.bbox_diagonal();
        let hit_linear = time(repeats, || {
            Ok(queries
                .iter()
                .filter(|q| scalpel_hit_linear(&model.mesh, q, eps, Exec::Sequential).is_ok())
                .count())
        })?;
        let bvh_build = time(repeats, || Ok(FaceBvh::build(&model.mesh)))?;
        let bvh = FaceBvh::build(&model.mesh);
        let hit_bvh = time(repeats, || {
            Ok(queries.iter().filter(|q| bvh.scalpel_hit(&model.mesh, q, eps).is_ok()).count())
        })?;
        let resolved = queries.iter().filter(|q| bvh.scalpel_hit(&model.mesh, q, eps).is_ok()).count();

        let tear_metrics = match builtin_scalpel(&self.rig) {
            Some(states) if model.mesh.vertex_count() == load_model(&self.rig)?.mesh.vertex_count() => {
                let mut points = 0;
                let run = |accel| {
                    time(repeats, || {
                        Ok(tear::tear(model, &states, TearOptions { accel, exec: Exec::Sequential })?.intersection_points())
                    })
                };
                let linear = run(Accel::Linear)?;
                let bvh = run(Accel::Bvh)?;
                if let Ok(t) = tear::tear(model, &states, TearOptions::default()) {
                    points = t.intersection_points();
                }
                json!({ "linear_ms": linear, "bvh_ms": bvh, "intersection_points": points })
            }
            _ => Value::Null,
        };

        Ok(obj(json!({
            "repeats": repeats,
            "parallel_available": Exec::parallel_available(),
            "threads": std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            "skinning": skinning,
            "cut": { "sequential_ms": cut_seq, "parallel_ms": cut_par },
            "scalpel_hit": {
                "queries": queries.len(),
                "resolved": resolved,
                "linear_ms": hit_linear,
                "bvh_build_ms": bvh_build,
                "bvh_ms": hit_bvh,
            },
            "tear": tear_metrics,
        })))
    }
}
