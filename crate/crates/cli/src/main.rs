use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cgarig::anim::Backend;
use cgarig::exec::Exec;
use cgarig::rig::{fixtures, to_json, BoneId};
use cgarig::tear::Accel;
use cgarig_cli::script::{BoneDelta, Delta, PlaneSpec, ScalpelSpec};
use cgarig_cli::{load_model, parse_script, run_script, Action, RunOptions, Script, SCRIPT_VERSION};

#[derive(Parser)]
#[command(name = "cgarig", version, about = "Animate, cut and tear rigged meshes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Rig JSON path, or builtin:cylinders / builtin:arm.
    #[arg(long, global = true)]
    rig: Option<String>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = BackendArg::Cga)]
    backend: BackendArg,
    /// Bounding-volume hierarchy for scalpel hits.
    #[arg(long, global = true, value_enum, default_value_t = Switch::On)]
    accel: Switch,
    /// Run every kernel on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

/// Parses `x,y,z`.
fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<_, _>>()?;
    parts.try_into().map_err(|_| format!("expected three comma-separated numbers, got '{s}'"))
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Cga,
    Lbs,
    Dq,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Args, Clone)]
struct DeltaArgs {
    /// Bone the delta applies to.
    #[arg(long, default_value_t = fixtures::ELBOW)]
    bone: BoneId,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    axis: Option<[f64; 3]>,
    /// Rotation angle in radians.
    #[arg(long, allow_hyphen_values = true)]
    angle: Option<f64>,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    translate: Option<[f64; 3]>,
    #[arg(long)]
    scale: Option<f64>,
}

impl DeltaArgs {
    fn delta(&self) -> Delta {
        Delta {
            translation: self.translate,
            axis: self.axis.or(self.angle.map(|_| [0.0, 0.0, 1.0])),
            angle: self.angle,
            rotation_quat: None,
            scale: self.scale,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON script.
    Run {
        #[arg(long)]
        script: PathBuf,
    },
    /// Key a bone from bind to a delta and sample the clip.
    Animate {
        #[command(flatten)]
        delta: DeltaArgs,
        #[arg(long, default_value_t = 5)]
        frames: usize,
    },
    /// Cut the rig with a plane.
    Cut {
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true, default_value = "1,0,0")]
        normal: [f64; 3],
        #[arg(long, allow_hyphen_values = true)]
        offset: f64,
    },
    /// Tear the rig along a scalpel script (bundled for builtin rigs).
    Tear {
        /// JSON array of {"t", "tip", "tail"} states.
        #[arg(long)]
        scalpel: Option<PathBuf>,
        /// Opening displacement; 1% of the bounding-box diagonal by default.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Compare two skinning backends on one articulated pose.
    Compare {
        #[command(flatten)]
        delta: DeltaArgs,
        #[arg(long, default_value = "dq")]
        reference: String,
        #[arg(long, default_value = "cga")]
        test: String,
    },
    /// Time sequential against parallel kernels and linear against BVH hits.
    Bench {
        #[arg(long, default_value_t = 5)]
        repeats: usize,
    },
    /// Print vertex, face and bone counts.
    Info,
    /// Write a builtin fixture as rig JSON.
    Fixture {
        #[arg(value_parser = ["cylinders", "arm"])]
        name: String,
        #[arg(long)]
        output: PathBuf,
    },
}

fn script(actions: Vec<Action>) -> Script {
    Script {
        script_version: SCRIPT_VERSION,
        rig: None,
        actions,
    }
}

fn build_script(command: &Command) -> Result<Script> {
    Ok(match command {
        Command::Run { script } => {
            let text = std::fs::read_to_string(script).with_context(|| format!("reading {}", script.display()))?;
            parse_script(&text)?
        }
        Command::Animate { delta, frames } => {
            let n = (*frames).max(1);
            let times = (0..n).map(|i| if n == 1 { 1.0 } else { i as f64 / (n - 1) as f64 }).collect();
            script(vec![
                Action::SetKeyframe { clip: "main".into(), bone: delta.bone, time: 0.0, delta: Delta::default(), trs: None },
                Action::SetKeyframe { clip: "main".into(), bone: delta.bone, time: 1.0, delta: delta.delta(), trs: None },
                Action::Sample { clip: "main".into(), times },
            ])
        }
        Command::Cut { normal, offset } => script(vec![Action::Cut {
            plane: PlaneSpec { normal: *normal, offset: *offset },
        }]),
        Command::Tear { scalpel, delta } => {
            let scalpel = match scalpel {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    Some(serde_json::from_str::<Vec<ScalpelSpec>>(&text).context("malformed scalpel script")?)
                }
                None => None,
            };
            script(vec![Action::Tear { scalpel, delta: *delta }])
        }
        Command::Compare { delta, reference, test } => script(vec![Action::Compare {
            reference: reference.clone(),
            test: test.clone(),
            pose: vec![BoneDelta { bone: delta.bone, delta: delta.delta() }],
        }]),
        Command::Bench { repeats } => script(vec![Action::Bench { repeats: *repeats }]),
        Command::Info | Command::Fixture { .. } => unreachable!(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main(cli: Cli) -> Result<ExitCode> {
    let g = &cli.global;
    match &cli.command {
        Command::Info => {
            let rig = g.rig.clone().unwrap_or_else(|| cgarig_cli::DEFAULT_RIG.into());
            let m = load_model(&rig)?;
            println!(
                "{} vertices, {} faces, {} bones",
                m.mesh.vertex_count(),
                m.mesh.face_count(),
                m.skeleton.len()
            );
            return Ok(ExitCode::SUCCESS);
        }
        Command::Fixture { name, output } => {
            let m = load_model(&format!("builtin:{name}"))?;
            std::fs::write(output, to_json(&m)).with_context(|| format!("writing {}", output.display()))?;
            return Ok(ExitCode::SUCCESS);
        }
        _ => {}
    }
    let script = build_script(&cli.command)?;
    let opts = RunOptions {
        rig: g.rig.clone(),
        out: g.out.clone(),
        seed: g.seed,
        backend: match g.backend {
            BackendArg::Cga => Backend::Cga,
            BackendArg::Lbs => Backend::Lbs,
            BackendArg::Dq => Backend::Dq,
        },
        accel: match g.accel {
            Switch::On => Accel::Bvh,
            Switch::Off => Accel::Linear,
        },
        exec: if g.sequential { Exec::Sequential } else { Exec::Parallel },
    };
    let metrics = run_script(&script, &opts)?;
    for a in &metrics.actions {
        println!("{:>3} {:<12} {:>10.3} ms  {}", a.index, a.kind, a.wall_ms, a.status);
    }
    if let Some(err) = &metrics.error {
        eprintln!("error: {err}");
        return Ok(ExitCode::FAILURE);
    }
    println!("wrote {} files to {}", metrics.outputs.len() + 1, g.out.display());
    Ok(ExitCode::SUCCESS)
}
