//! Command-line surface: `simulate`, `stability`, `sweep`, and `verify`.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 verification
//! failure, 3 collision abort during integration.

use crate::builders::{RingConfig, RingFamily};
use crate::dynamics::{integrate, write_trajectory_csv, Method};
use crate::stability::{analyze, StabilityVerdict};
use crate::suites;
use crate::sweep::{sweep_plane, write_diagram_csv, DiagramMeta, Grid, SweepFamily};
use crate::system::{Model, PlanePoint, Points, SpherePoint, VortexSystem, Vorticity};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "vortexlab",
    version,
    about = "Point-vortex dynamics and ring stability"
)]
pub struct RunSpec {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a configuration and write the trajectory as CSV.
    Simulate(SimulateArgs),
    /// Classify the stability of a ring relative equilibrium.
    Stability(StabilityArgs),
    /// Scan a parameter plane and write a stability diagram.
    Sweep(SweepArgs),
    /// Run a verification suite; exits 2 if any assertion fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON configuration (explicit vortices or builder shorthand).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 0.05)]
    pub dt: f64,
    /// Integrator: rk4 or rk45-adaptive.
    #[arg(long, default_value = "rk45-adaptive")]
    pub method: String,
    /// Output frame: inertial or rotating (subtract Ω t from longitudes).
    #[arg(long, default_value = "inertial")]
    pub frame: String,
    /// Trajectory CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Where to write the final state as a reloadable config
    /// (defaults to <out>.final.json).
    #[arg(long)]
    pub final_state: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    pub format: String,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    /// JSON configuration instead of builder flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Builder family: planar-ring, planar-ring-center, geostrophic-ring,
    /// geostrophic-ring-center, sphere-ring, sphere-ring-polar.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub theta0: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub omega: f64,
    #[arg(long, default_value = "json")]
    pub format: String,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub n: usize,
    /// κ grid as lo:hi:step.
    #[arg(long, default_value = "0:5:0.025", allow_hyphen_values = true)]
    pub kappa: String,
    /// λ grid as lo:hi:step.
    #[arg(long, default_value = "-2:10:0.05", allow_hyphen_values = true)]
    pub lambda: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite: specfun, appendix-a, persistence, trig, conservation, cabral,
    /// spectra, sphere-thresholds, frontiers, rotating-plane,
    /// planar-persistence, normalization, or all.
    #[arg(long)]
    pub suite: String,
    /// Rotation rate for the persistence suite.
    #[arg(long, default_value_t = 0.3)]
    pub omega: f64,
    /// Seed for the randomized suites; fixed seeds reproduce bit-for-bit.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "text")]
    pub format: String,
    /// Optional CSV output path for the specfun table.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// JSON configuration schema
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct VortexJson {
    lambda: f64,
    #[serde(default)]
    theta: Option<f64>,
    #[serde(default)]
    phi: Option<f64>,
    #[serde(default)]
    x: Option<f64>,
    #[serde(default)]
    y: Option<f64>,
}

/// On-disk configuration: either explicit vortices or builder shorthand.
#[derive(Debug, Serialize, Deserialize)]
pub struct ConfigJson {
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default)]
    pub kappa: Option<f64>,
    /// "rad" (default) or "deg".
    #[serde(default)]
    pub unit: Option<String>,
    #[serde(default)]
    vortices: Option<Vec<VortexJson>>,
    // builder shorthand
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub theta0: Option<f64>,
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub theta1: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub lambda_p: Option<f64>,
    #[serde(default)]
    pub k_p: Option<usize>,
}

impl ConfigJson {
    pub fn into_system(self) -> Result<VortexSystem> {
        let to_rad = match self.unit.as_deref() {
            None | Some("rad") => 1.0,
            Some("deg") => std::f64::consts::PI / 180.0,
            Some(other) => return Err(Error::Config(format!("unknown unit '{other}'"))),
        };
        if let Some(family) = &self.family {
            if self.vortices.is_some() {
                return Err(Error::Config(
                    "config sets both a builder family and explicit vortices".into(),
                ));
            }
            let family = RingFamily::parse(family)?;
            let config = RingConfig {
                family,
                n: self
                    .n
                    .ok_or_else(|| Error::Config("builder config needs n".into()))?,
                radius_or_theta0: match (self.theta0, self.radius) {
                    (Some(t), None) => t * to_rad,
                    (None, Some(r)) => r,
                    (None, None) if family == RingFamily::D2NhRe => 0.0,
                    _ => {
                        return Err(Error::Config(
                            "builder config needs exactly one of theta0 or radius".into(),
                        ))
                    }
                },
                epsilon: self.epsilon.unwrap_or(0.0) * to_rad,
                lambda_pole_or_center: self.lambda_p,
                theta1: self.theta1.map(|t| t * to_rad),
                k_p: self.k_p.unwrap_or(usize::from(self.lambda_p.is_some())),
            };
            let sys = config.build()?;
            let model = Model::parse(
                self.model.as_deref().unwrap_or(if family.on_sphere() {
                    "sphere"
                } else {
                    "planar"
                }),
                self.omega.unwrap_or(0.0),
                self.kappa.unwrap_or(0.0),
            )?;
            return sys.with_model(model);
        }
        let model = Model::parse(
            self.model
                .as_deref()
                .ok_or_else(|| Error::Config("config needs a model".into()))?,
            self.omega.unwrap_or(0.0),
            self.kappa.unwrap_or(0.0),
        )?;
        let vortices = self
            .vortices
            .ok_or_else(|| Error::Config("config has no vortices".into()))?;
        let mut strengths = Vec::with_capacity(vortices.len());
        let (points, sphere) = if model.is_sphere() {
            let mut pts = Vec::with_capacity(vortices.len());
            for v in &vortices {
                let (Some(theta), Some(phi)) = (v.theta, v.phi) else {
                    return Err(Error::Config("sphere vortices need theta and phi".into()));
                };
                pts.push(SpherePoint::new(theta * to_rad, phi * to_rad)?);
                strengths.push(Vorticity::new(v.lambda)?);
            }
            (Points::Sphere(pts), true)
        } else {
            let mut pts = Vec::with_capacity(vortices.len());
            for v in &vortices {
                let (Some(x), Some(y)) = (v.x, v.y) else {
                    return Err(Error::Config("plane vortices need x and y".into()));
                };
                pts.push(PlanePoint::new(x, y)?);
                strengths.push(Vorticity::new(v.lambda)?);
            }
            (Points::Plane(pts), false)
        };
        let _ = sphere;
        VortexSystem::new(model, points, strengths)
    }

    pub fn from_system(sys: &VortexSystem) -> Self {
        let model = sys.model();
        let vortices = match sys.points() {
            Points::Sphere(pts) => pts
                .iter()
                .enumerate()
                .map(|(i, p)| VortexJson {
                    lambda: sys.strength(i),
                    theta: Some(p.theta()),
                    phi: Some(p.phi()),
                    x: None,
                    y: None,
                })
                .collect(),
            Points::Plane(pts) => pts
                .iter()
                .enumerate()
                .map(|(i, p)| VortexJson {
                    lambda: sys.strength(i),
                    theta: None,
                    phi: None,
                    x: Some(p.x),
                    y: Some(p.y),
                })
                .collect(),
        };
        ConfigJson {
            model: Some(model.label().to_string()),
            omega: Some(model.omega()),
            kappa: Some(model.kappa()),
            unit: Some("rad".into()),
            vortices: Some(vortices),
            family: None,
            n: None,
            theta0: None,
            radius: None,
            theta1: None,
            epsilon: None,
            lambda_p: None,
            k_p: None,
        }
    }
}

pub fn load_config(path: &Path) -> Result<VortexSystem> {
    let text = std::fs::read_to_string(path)?;
    let config: ConfigJson = serde_json::from_str(&text)?;
    config.into_system()
}

// ---------------------------------------------------------------------------
// command execution
// ---------------------------------------------------------------------------

/// Run a parsed command line; returns the process exit code.
pub fn run(spec: RunSpec) -> i32 {
    init_thread_pool();
    let result = match spec.command {
        Command::Simulate(args) => run_simulate(args),
        Command::Stability(args) => run_stability(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Verify(args) => run_verify(args),
    };
    match result {
        Ok(code) => code,
        Err(Error::Collision { .. }) => {
            let e = result.unwrap_err();
            eprintln!("error: {e}");
            3
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Cap rayon's parallelism via VORTEXLAB_THREADS.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("VORTEXLAB_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> Result<i32> {
    let sys = load_config(&args.config)?;
    let method = Method::parse(&args.method)?;
    let rotating = match args.frame.as_str() {
        "inertial" => false,
        "rotating" => true,
        other => return Err(Error::Config(format!("unknown frame '{other}'"))),
    };
    let traj = integrate(&sys, args.t_end, args.dt, method)?;
    ensure_parent(&args.out)?;
    let file = std::fs::File::create(&args.out)?;
    write_trajectory_csv(&traj, rotating, std::io::BufWriter::new(file))?;
    let final_path = args
        .final_state
        .unwrap_or_else(|| args.out.with_extension("final.json"));
    ensure_parent(&final_path)?;
    let last = traj.states.last().expect("trajectory has samples");
    std::fs::write(
        &final_path,
        serde_json::to_string_pretty(&ConfigJson::from_system(last))?,
    )?;
    if args.format == "json" {
        let summary = serde_json::json!({
            "model": sys.model().label(),
            "n_vortices": sys.n(),
            "samples": traj.times.len(),
            "t_end": args.t_end,
            "h_drift": traj.drift().0,
            "j_drift": traj.drift().1,
            "out": args.out,
            "final_state": final_path,
        });
        println!("{summary}");
    } else {
        println!(
            "integrated {} vortices to t = {} ({} samples) -> {}",
            sys.n(),
            args.t_end,
            traj.times.len(),
            args.out.display()
        );
    }
    Ok(0)
}

fn stability_system(args: &StabilityArgs) -> Result<VortexSystem> {
    if let Some(path) = &args.config {
        return load_config(path);
    }
    let family = args
        .family
        .as_deref()
        .ok_or_else(|| Error::Config("stability needs --config or --family".into()))?;
    let n = args
        .n
        .ok_or_else(|| Error::Config("builder families need --n".into()))?;
    let sys = match family {
        "planar-ring" => crate::builders::build_planar_ring(n, 1.0, None)?,
        "planar-ring-center" => crate::builders::build_planar_ring(
            n,
            1.0,
            Some(
                args.lambda
                    .ok_or_else(|| Error::Config("need --lambda".into()))?,
            ),
        )?,
        "geostrophic-ring" => crate::builders::build_planar_ring(n, 1.0, None)?
            .with_model(Model::Geostrophic { kappa: args.kappa })?,
        "geostrophic-ring-center" => crate::builders::build_planar_ring(
            n,
            1.0,
            Some(
                args.lambda
                    .ok_or_else(|| Error::Config("need --lambda".into()))?,
            ),
        )?
        .with_model(Model::Geostrophic { kappa: args.kappa })?,
        "sphere-ring" => crate::builders::build_sphere_ring(
            n,
            args.theta0
                .ok_or_else(|| Error::Config("need --theta0".into()))?,
            None,
            args.omega,
        )?,
        "sphere-ring-polar" => crate::builders::build_sphere_ring(
            n,
            args.theta0
                .ok_or_else(|| Error::Config("need --theta0".into()))?,
            Some(
                args.lambda
                    .ok_or_else(|| Error::Config("need --lambda".into()))?,
            ),
            args.omega,
        )?,
        other => return Err(Error::Config(format!("unknown stability family '{other}'"))),
    };
    Ok(sys)
}

#[derive(Serialize)]
struct StabilityJson<'a> {
    verdict: char,
    kind: &'a str,
    xi: f64,
    hessian_eigs: &'a [f64],
    linearization_eigs: &'a [(f64, f64)],
    tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: &'a Option<String>,
}

fn print_verdict(v: &StabilityVerdict, format: &str) -> Result<()> {
    if format == "json" {
        let out = StabilityJson {
            verdict: v.kind.code(),
            kind: match v.kind.code() {
                'S' => "lyapunov-stable",
                'E' => "elliptic",
                'U' => "linearly-unstable",
                _ => "degenerate",
            },
            xi: v.xi,
            hessian_eigs: &v.hessian_eigs,
            linearization_eigs: &v.linearization_eigs,
            tolerance: v.tolerance_used,
            note: &v.note,
        };
        println!("{}", serde_json::to_string(&out)?);
    } else {
        println!("verdict: {} (xi = {:.6})", v.kind.code(), v.xi);
        if let Some(n) = &v.note {
            println!("note: {n}");
        }
    }
    Ok(())
}

fn run_stability(args: StabilityArgs) -> Result<i32> {
    let sys = stability_system(&args)?;
    let report = analyze(&sys)?;
    print_verdict(&report.verdict, &args.format)?;
    Ok(0)
}

fn run_sweep(args: SweepArgs) -> Result<i32> {
    let family = SweepFamily::parse(&args.family)?;
    let kappa = Grid::parse(&args.kappa)?;
    let lambda = Grid::parse(&args.lambda)?;
    let cells = sweep_plane(family, args.n, kappa, lambda)?;
    ensure_parent(&args.out)?;
    let file = std::fs::File::create(&args.out)?;
    write_diagram_csv(&cells, std::io::BufWriter::new(file))?;
    let meta = DiagramMeta {
        family: family.name(),
        n: args.n,
        kappa,
        lambda,
        tool_version: env!("CARGO_PKG_VERSION"),
    };
    let meta_path = args.out.with_extension("meta.json");
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)?)?;
    println!("wrote {} cells -> {}", cells.len(), args.out.display());
    Ok(0)
}

fn run_verify(args: VerifyArgs) -> Result<i32> {
    let reports = match args.suite.as_str() {
        "specfun" => {
            let write_table = |mut w: Box<dyn Write>| -> crate::Result<()> {
                let (s0, s1) = crate::specfun::seam_residual();
                writeln!(w, "x,k0,k1,seam_residual")?;
                for (x, k0, k1) in suites::specfun_table()? {
                    writeln!(w, "{x:.9e},{k0:.16e},{k1:.16e},{:.3e}", s0.max(s1))?;
                }
                Ok(())
            };
            if let Some(path) = &args.out {
                ensure_parent(path)?;
                write_table(Box::new(std::io::BufWriter::new(std::fs::File::create(
                    path,
                )?)))?;
            } else if args.format == "csv" {
                write_table(Box::new(std::io::stdout()))?;
            }
            vec![suites::specfun_suite()?]
        }
        "appendix-a" => vec![suites::appendix_a_suite(args.seed)?],
        "persistence" => {
            // run the standard families at the requested Ω as well
            let mut rep = suites::persistence_suite()?;
            if (args.omega - 0.3).abs() > 1e-12 && (args.omega - 0.1).abs() > 1e-12 {
                let extra = crate::dynamics::verify_persistence(
                    &RingConfig {
                        family: RingFamily::CNvR,
                        n: 4,
                        radius_or_theta0: std::f64::consts::PI / 6.0,
                        epsilon: 0.0,
                        lambda_pole_or_center: None,
                        theta1: None,
                        k_p: 0,
                    },
                    args.omega,
                )?;
                rep.pass &= extra.pass;
                rep.lines.push(format!(
                    "[{}] CNvR(n=4) Ω={}: Δξ-Ω = {:+.2e}",
                    if extra.pass { "ok" } else { "FAIL" },
                    args.omega,
                    extra.delta_xi - args.omega
                ));
            }
            vec![rep]
        }
        "trig" => vec![suites::trig_suite()?],
        "conservation" => vec![suites::conservation_suite(args.seed)?],
        "cabral" => vec![suites::cabral_suite()?],
        "spectra" => vec![suites::spectra_suite()?],
        "sphere-thresholds" => vec![suites::sphere_threshold_suite()?],
        "frontiers" => vec![suites::geostrophic_frontier_suite()?],
        "rotating-plane" => vec![suites::rotating_plane_suite()?],
        "planar-persistence" => vec![suites::planar_persistence_suite()?],
        "normalization" => vec![suites::normalization_suite()?],
        "all" => suites::run_all(args.seed)?,
        other => return Err(Error::Config(format!("unknown suite '{other}'"))),
    };
    let mut all_pass = true;
    for rep in &reports {
        all_pass &= rep.pass;
        if args.format == "json" {
            let out = serde_json::json!({
                "suite": rep.name,
                "pass": rep.pass,
                "checks": rep.lines,
            });
            println!("{out}");
        } else {
            print!("{}", rep.render());
        }
    }
    Ok(if all_pass { 0 } else { 2 })
}
