use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Map, Value};

use polyball::atlas::{
    raster_inequality_region, raster_strong_be_plane, scan_gammastar_curve, scan_homologous_threshold,
    scan_static_region, threshold_ordering_violations, Axis, GridSpec, InequalityPredicate, RasterModel, RegionMap,
    StaticScanOptions,
};
use polyball::constitutive::{
    baker_ericksen, cbs_spread, check_hyperelastic_exactness, check_scale_invariance, coeff_a, energy_nonnegative,
    evaluate, linearization, linearization_fd, stored_energy, strong_be_predicate, w_pf, BeMode, StrainBox, Svk,
};
use polyball::homologous::{
    assemble_solution, integrate_profile, profile_options, solve_omega, HomologousParams, OmegaOptions,
};
use polyball::lagrangian::{boundary_condition_residual, euler_to_lagrange, lagrange_to_euler};
use polyball::output::{self, fmt_f64, fmt_opt, Manifest};
use polyball::phase::{fixed_points, gamma2_shear_profile, track_gamma, y_p};
use polyball::static_ball::{integrate_static, CenterData, StaticOptions};
use polyball::{Material, StrainState};

use crate::config;
use crate::{
    CheckArgs, Cli, Command, EvalArgs, HomologousArgs, MaterialArgs, ModelKind, OutArgs, PhaseArgs, PredicateKind,
    ScanCommand, ScanGammaStarArgs, ScanHomologousArgs, ScanRasterArgs, ScanStaticArgs, SolverArgs, StaticArgs,
    WorkerArgs,
};

const EXIT_INVALID: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_TIMEOUT: u8 = 4;

/// Invalid user input; exits with code 2.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Usage>().is_some() || e.downcast_ref::<serde_json::Error>().is_some() {
        return EXIT_INVALID;
    }
    match e.downcast_ref::<polyball::Error>() {
        Some(polyball::Error::Domain { .. })
        | Some(polyball::Error::Inadmissible(_))
        | Some(polyball::Error::Invalid(_))
        | Some(polyball::Error::Unsupported(_)) => EXIT_INVALID,
        Some(polyball::Error::Io(_)) | Some(polyball::Error::Json(_)) | Some(polyball::Error::Csv(_)) => 1,
        Some(_) => EXIT_SOLVER,
        None => 1,
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn required<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| usage(format!("missing required option --{flag}")))
}

fn resolve<T: Serialize + serde::de::DeserializeOwned>(a: &T, cfg: Option<&Map<String, Value>>) -> Result<T> {
    config::merge(a, cfg).map_err(|e| usage(format!("{e:#}")))
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = match &cli.config {
        Some(p) => Some(config::load(p).map_err(|e| usage(format!("{e:#}")))?),
        None => None,
    };
    let cfg = cfg.as_ref();
    match cli.command {
        Command::Eval(a) => cmd_eval(resolve(&a, cfg)?),
        Command::Check(a) => cmd_check(resolve(&a, cfg)?),
        Command::Static(a) => cmd_static(resolve(&a, cfg)?),
        Command::Homologous(a) => cmd_homologous(resolve(&a, cfg)?),
        Command::Phase(a) => cmd_phase(resolve(&a, cfg)?),
        Command::Scan(ScanCommand::Static(a)) => cmd_scan_static(resolve(&a, cfg)?),
        Command::Scan(ScanCommand::Gammastar(a)) => cmd_scan_gammastar(resolve(&a, cfg)?),
        Command::Scan(ScanCommand::Homologous(a)) => cmd_scan_homologous(resolve(&a, cfg)?),
        Command::Scan(ScanCommand::Raster(a)) => cmd_scan_raster(resolve(&a, cfg)?),
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

impl MaterialArgs {
    fn fill(&mut self) {
        self.nu.get_or_insert(0.25);
        self.kappa.get_or_insert(1.0);
        self.theta.get_or_insert(1.0);
    }

    fn build(&self) -> Result<Material> {
        let gamma = required(self.gamma, "gamma")?;
        let beta = required(self.beta, "beta")?;
        Ok(Material::new(self.kappa.unwrap_or(1.0), self.nu.unwrap_or(0.25), gamma, beta, self.theta.unwrap_or(1.0))?)
    }
}

impl SolverArgs {
    fn fill(&mut self, d: &StaticOptions) {
        self.rtol.get_or_insert(d.rtol);
        self.atol.get_or_insert(d.atol);
        self.r_max.get_or_insert(d.r_max);
        self.classify_r_max.get_or_insert(d.classify_r_max);
    }

    fn options(&self, d: StaticOptions) -> Result<StaticOptions> {
        let mut o = d;
        o.rtol = self.rtol.unwrap_or(d.rtol);
        o.atol = self.atol.unwrap_or(d.atol);
        o.r_max = self.r_max.unwrap_or(d.r_max);
        o.classify_r_max = self.classify_r_max.unwrap_or(d.classify_r_max);
        o.timeout_s = self.timeout;
        for (name, v) in [("rtol", o.rtol), ("atol", o.atol), ("r-max", o.r_max), ("classify-r-max", o.classify_r_max)]
        {
            if !(v > 0.0 && v.is_finite()) {
                return Err(usage(format!("--{name} must be positive, got {v}")));
            }
        }
        if let Some(t) = o.timeout_s {
            if !(t > 0.0) {
                return Err(usage(format!("--timeout must be positive, got {t}")));
            }
        }
        Ok(o)
    }
}

impl OutArgs {
    fn fill(&mut self) {
        self.out.get_or_insert_with(|| PathBuf::from("polyball-out"));
    }

    fn dir(&self) -> Result<PathBuf> {
        let d = self.out.clone().unwrap_or_else(|| PathBuf::from("polyball-out"));
        std::fs::create_dir_all(&d).with_context(|| format!("creating {}", d.display()))?;
        Ok(d)
    }
}

impl WorkerArgs {
    fn fill(&mut self) -> Result<()> {
        if self.workers.is_none() {
            let env = match std::env::var("POLYBALL_WORKERS") {
                Ok(s) => Some(
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| usage(format!("POLYBALL_WORKERS must be a positive integer, got {s:?}")))?,
                ),
                Err(_) => None,
            };
            let auto = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
            self.workers = Some(env.unwrap_or(auto));
        }
        if self.workers == Some(0) {
            return Err(usage("--workers must be at least 1"));
        }
        Ok(())
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let p = dir.join(name);
    Ok(BufWriter::new(File::create(&p).with_context(|| format!("creating {}", p.display()))?))
}

fn finish<C: Serialize>(dir: &Path, command: &str, config: &C, outputs: Vec<String>, summary: Value) -> Result<()> {
    let m = Manifest {
        tool: "polyball".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        build: option_env!("POLYBALL_BUILD").map(str::to_string),
        command: command.into(),
        config: serde_json::to_value(config)?,
        outputs,
        summary: summary.clone(),
    };
    output::write_json(&dir.join(format!("{command}.manifest.json")), &m)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn axis(lo: f64, hi: f64, n: usize, what: &str) -> Result<Axis> {
    Axis::new(lo, hi, n).map_err(|e| usage(format!("{what}: {e}")))
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_eval(mut a: EvalArgs) -> Result<ExitCode> {
    a.material.fill();
    let mat = a.material.build()?;
    let st = StrainState::new(required(a.delta, "delta")?, required(a.eta, "eta")?)?;
    let ev = evaluate(&mat, st);
    let rows = [
        ("p_rad", ev.p_rad),
        ("p_tan", ev.p_tan),
        ("a", ev.a),
        ("b_times", ev.b_times),
        ("w", ev.w),
        ("Q", ev.q),
        ("y_b", mat.y_b()),
        ("theta", mat.theta()),
    ];
    if a.json.unwrap_or(false) {
        let obj: Map<String, Value> = rows.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
        println!("{}", serde_json::to_string_pretty(&obj)?);
    } else {
        for (k, v) in rows {
            println!("{k:<8} {}", fmt_f64(v));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(mut a: CheckArgs) -> Result<ExitCode> {
    a.material.fill();
    a.out.fill();
    let seed = *a.seed.get_or_insert(0);
    let n = *a.samples.get_or_insert(1000);
    let mat = a.material.build()?;
    let dir = a.out.dir()?;

    let hyper = check_hyperelastic_exactness(&mat, StrainBox::square(0.5, 2.0), 21, 1e-4);
    let samples = StrainBox::square(0.05, 20.0).sample(n, seed);
    let scale = check_scale_invariance(&mat, &samples, 8.0);
    let etas: Vec<f64> = samples.iter().map(|s| s.eta).collect();
    let cbs = cbs_spread(&mat, &etas);
    let (lin, lin_fd) = (linearization(&mat), linearization_fd(&mat, 1e-3));
    let lin_err = lin.iter().zip(&lin_fd).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let weak = baker_ericksen(&mat, BeMode::Weak);
    let strong = baker_ericksen(&mat, BeMode::Strong);
    let bx = StrainBox::square(1e-2, 1e2);
    let (e_weak, e_weak_min, _) = energy_nonnegative(&mat, BeMode::Weak, bx, 101);
    let (e_strong, e_strong_min, _) = energy_nonnegative(&mat, BeMode::Strong, bx, 101);
    let a_min = bx.grid(101).into_iter().map(|s| coeff_a(&mat, s)).fold(f64::INFINITY, f64::min);
    let wpf = samples
        .iter()
        .map(|s| {
            let st = StrainState { delta: s.delta, eta: s.delta };
            (stored_energy(&mat, st) - w_pf(&mat, s.delta)).abs() / w_pf(&mat, s.delta).abs().max(1.0)
        })
        .fold(0.0, f64::max);
    let summary = json!({
        "hyperelastic_residual": hyper,
        "scale_invariance": scale,
        "cbs_spread": cbs,
        "linearization": lin,
        "linearization_fd_error": lin_err,
        "baker_ericksen_weak": weak,
        "baker_ericksen_strong": strong,
        "strong_be_predicate": strong_be_predicate(mat.nu(), mat.gamma(), mat.beta()),
        "energy_nonnegative_weak": { "pass": e_weak, "min_w": e_weak_min },
        "energy_nonnegative_strong": { "pass": e_strong, "min_w": e_strong_min },
        "hyperbolic": { "pass": a_min > 0.0, "min_a": a_min },
        "fluid_energy_error": wpf,
    });
    output::write_json(&dir.join("check.json"), &summary)?;
    finish(&dir, "check", &a, vec!["check.json".into()], summary)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_static(mut a: StaticArgs) -> Result<ExitCode> {
    a.material.fill();
    a.out.fill();
    let defaults = StaticOptions::default();
    a.solver.fill(&defaults);
    let dc = *a.delta_c.get_or_insert(1.0);
    let lagr = *a.lagrangian.get_or_insert(false);
    let mat = a.material.build()?;
    let opts = a.solver.options(defaults)?;
    let dir = a.out.dir()?;

    let profile = integrate_static(CenterData::new(dc)?, &mat, &opts)?;
    output::write_profile_csv(&profile, create(&dir, "static.csv")?)?;
    let mut outputs = vec!["static.csv".to_string()];
    let mut summary = json!({
        "exists": profile.radius.is_some(),
        "radius": profile.radius,
        "ball_type": profile.ball_type.to_string(),
        "mass": profile.samples.last().map(|s| s.mass),
        "y_b": mat.y_b(),
        "r_max_hint": profile.r_max_hint,
        "stop": profile.stop,
        "warning": profile.warning,
        "steps": profile.stats,
    });
    if lagr && profile.radius.is_some() {
        let map = euler_to_lagrange(&profile)?;
        let back = lagrange_to_euler(&map)?;
        let interior: Vec<_> = profile.samples.iter().filter(|s| s.delta > 0.0).collect();
        let round_trip = interior
            .iter()
            .zip(&back)
            .map(|(s, (_, d, e))| ((d - s.delta).abs() / s.delta).max((e - s.eta).abs() / s.eta))
            .fold(0.0, f64::max);
        output::write_deformation_csv(&map, create(&dir, "static.deformation.csv")?)?;
        outputs.push("static.deformation.csv".into());
        summary["lagrangian"] = json!({
            "z_boundary": map.z_boundary,
            "center_slope": map.center_slope(),
            "round_trip_error": round_trip,
            "bc_residual": boundary_condition_residual(&map, &mat),
        });
    }
    finish(&dir, "static", &a, outputs, summary)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_homologous(mut a: HomologousArgs) -> Result<ExitCode> {
    a.material.fill();
    a.material.gamma.get_or_insert(4.0 / 3.0);
    a.out.fill();
    let defaults = profile_options();
    a.solver.fill(&defaults);
    let dc = *a.delta0_c.get_or_insert(1.0);
    let t_end = *a.t_end.get_or_insert(10.0);
    let alpha = required(a.alpha, "alpha")?;
    let mat = a.material.build()?;
    let opts = a.solver.options(defaults)?;
    if !(t_end > 0.0) {
        return Err(usage(format!("--t-end must be positive, got {t_end}")));
    }
    let dir = a.out.dir()?;

    let p = HomologousParams::new(mat, alpha, dc)?;
    let traj = solve_omega(&p, t_end, &OmegaOptions::default())?;
    let prof = integrate_profile(&p, &opts)?;
    output::write_omega_csv(&traj, create(&dir, "homologous.omega.csv")?)?;
    output::write_self_similar_csv(&prof, create(&dir, "homologous.profile.csv")?)?;
    let mut summary = json!({
        "c_omega": p.c_omega(),
        "collapse_time": traj.collapse_time,
        "energy_drift": traj.energy_drift,
        "trajectory_warning": traj.warning,
        "boundary_z": prof.boundary(),
        "z_max_hint": prof.z_max_hint(),
        "profile_stop": prof.profile.stop,
        "profile_warning": prof.profile.warning,
    });
    if prof.boundary().is_some() {
        let ball = assemble_solution(traj, prof)?;
        summary["total_mass"] = json!(ball.total_mass());
    }
    finish(&dir, "homologous", &a, vec!["homologous.omega.csv".into(), "homologous.profile.csv".into()], summary)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_phase(mut a: PhaseArgs) -> Result<ExitCode> {
    a.material.fill();
    a.out.fill();
    let c = *a.c.get_or_insert(1.0);
    let xi_end = *a.xi_end.get_or_insert(40.0);
    let mat = a.material.build()?;
    let dir = a.out.dir()?;

    if (mat.gamma() - 2.0).abs() < 1e-12 {
        let prof = gamma2_shear_profile(&mat, xi_end.exp())?;
        output::write_records(
            create(&dir, "phase.gamma2.csv")?,
            &["r", "y"],
            prof.iter().map(|&(r, y)| vec![fmt_f64(r), fmt_f64(y)]),
        )?;
        let summary = json!({ "gamma2": true, "final": prof.last() });
        finish(&dir, "phase", &a, vec!["phase.gamma2.csv".into()], summary)?;
        return Ok(ExitCode::SUCCESS);
    }
    let fps = fixed_points(&mat)?;
    let orbit = track_gamma(&mat, c, xi_end)?;
    output::write_orbit_csv(&orbit, create(&dir, "phase.orbit.csv")?)?;
    output::write_json(&dir.join("phase.fixed_points.json"), &fps)?;
    let last = orbit.samples.last().copied();
    let yp = y_p(mat.gamma());
    let summary = json!({
        "y_p": (yp > 0.0 && yp < 1.0).then_some(yp),
        "final": last,
        "distance_to_p": orbit.distance_to_p,
        "exit": orbit.exit,
        "invariance_violated": orbit.invariance_violated,
        "fixed_points": fps.iter().map(|f| json!({ "name": f.name, "y": f.y, "v": f.v, "kind": f.kind })).collect::<Vec<_>>(),
    });
    finish(&dir, "phase", &a, vec!["phase.orbit.csv".into(), "phase.fixed_points.json".into()], summary)?;
    Ok(ExitCode::SUCCESS)
}

fn write_region(dir: &Path, stem: &str, map: &RegionMap, pgm: bool) -> Result<Vec<String>> {
    let mut outs = vec![format!("{stem}.csv")];
    map.write_csv(create(dir, &outs[0])?)?;
    if pgm {
        outs.push(format!("{stem}.pgm"));
        map.write_pgm(create(dir, &outs[1])?)?;
    }
    Ok(outs)
}

fn region_summary(map: &RegionMap) -> Value {
    use polyball::atlas::Verdict::*;
    let counts: Map<String, Value> = [ExistsA, ExistsB, None, Inadmissible, Timeout, Pass, Fail]
        .iter()
        .map(|v| (v.to_string(), json!(map.count(*v))))
        .filter(|(_, n)| n != &json!(0))
        .collect();
    json!({
        "counts": counts,
        "violations": map.violations,
        "gamma_star": map.gamma_star,
    })
}

fn region_exit(map: &RegionMap) -> ExitCode {
    if !map.violations.is_empty() {
        ExitCode::from(EXIT_SOLVER)
    } else if map.has_timeouts() {
        ExitCode::from(EXIT_TIMEOUT)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_scan_static(mut a: ScanStaticArgs) -> Result<ExitCode> {
    let nu = *a.nu.get_or_insert(0.25);
    let gx =
        axis(*a.gamma_min.get_or_insert(0.05), *a.gamma_max.get_or_insert(3.0), *a.nx.get_or_insert(100), "γ axis")?;
    let gy = axis(*a.beta_min.get_or_insert(-2.0), *a.beta_max.get_or_insert(4.0), *a.ny.get_or_insert(100), "β axis")?;
    let dc = *a.delta_c.get_or_insert(1.0);
    let timeout = *a.cell_timeout.get_or_insert(10.0);
    let pgm = *a.pgm.get_or_insert(false);
    a.workers.fill()?;
    a.out.fill();
    if !(gx.lo > 0.0) {
        return Err(usage("--gamma-min must be positive"));
    }
    let dir = a.out.dir()?;
    let mut grid = GridSpec::new(gx, gy)?;
    grid.cell_timeout_s = Some(timeout);
    let opts = StaticScanOptions { delta_c: dc, ..Default::default() };
    let map = scan_static_region(nu, &grid, &opts, a.workers.workers.unwrap_or(1))?;
    let outs = write_region(&dir, "scan_static", &map, pgm)?;
    finish(&dir, "scan_static", &a, outs, region_summary(&map))?;
    Ok(region_exit(&map))
}

fn cmd_scan_gammastar(mut a: ScanGammaStarArgs) -> Result<ExitCode> {
    let nu_lo = *a.nu_min.get_or_insert(-0.9);
    let nu_hi = *a.nu_max.get_or_insert(0.499);
    let n = *a.n.get_or_insert(20);
    let g = (*a.gamma_min.get_or_insert(0.01), *a.gamma_max.get_or_insert(2.0));
    let samples = *a.samples.get_or_insert(100);
    a.workers.fill()?;
    a.out.fill();
    axis(nu_lo, nu_hi, n, "ν range")?;
    axis(g.0, g.1, 2, "γ range")?;
    if !(g.0 > 0.0) {
        return Err(usage("--gamma-min must be positive"));
    }
    let dir = a.out.dir()?;
    let opts = StaticScanOptions { gamma_star_samples: samples, ..Default::default() };
    let curve = scan_gammastar_curve((nu_lo, nu_hi), n, g, &opts, a.workers.workers.unwrap_or(1))?;
    output::write_records(
        create(&dir, "gammastar.csv")?,
        &["nu", "gamma_star", "lo", "hi", "note"],
        curve.iter().map(|c| {
            vec![fmt_f64(c.nu), fmt_opt(c.gamma_star), fmt_f64(c.lo), fmt_f64(c.hi), c.note.clone().unwrap_or_default()]
        }),
    )?;
    let breaks = polyball::atlas::gammastar_monotonicity_breaks(&curve, 0.0);
    let failures = curve.iter().filter(|c| c.gamma_star.is_none()).count();
    let summary = json!({ "samples": curve.len(), "failures": failures, "monotonicity_breaks": breaks });
    finish(&dir, "gammastar", &a, vec!["gammastar.csv".into()], summary)?;
    Ok(if failures > 0 { ExitCode::from(EXIT_SOLVER) } else { ExitCode::SUCCESS })
}

fn cmd_scan_homologous(mut a: ScanHomologousArgs) -> Result<ExitCode> {
    let nus = a.nus.get_or_insert_with(|| vec![0.0, 0.25, 0.45]).clone();
    let lo = *a.alpha_min.get_or_insert(-4.0);
    let hi = *a.alpha_max.get_or_insert(-0.25);
    let n = *a.n.get_or_insert(5);
    a.workers.fill()?;
    a.out.fill();
    if nus.is_empty() {
        return Err(usage("--nus must list at least one Poisson ratio"));
    }
    let dir = a.out.dir()?;
    let samples = scan_homologous_threshold(&nus, (lo, hi), n, &profile_options(), a.workers.workers.unwrap_or(1))?;
    output::write_records(
        create(&dir, "thresholds.csv")?,
        &["nu", "alpha", "delta_star", "lo", "hi", "error"],
        samples.iter().map(|s| {
            let t = s.threshold.as_ref();
            vec![
                fmt_f64(s.nu),
                fmt_f64(s.alpha),
                fmt_opt(t.map(|t| t.delta_star)),
                fmt_opt(t.map(|t| t.lo)),
                fmt_opt(t.map(|t| t.hi)),
                s.error.clone().unwrap_or_default(),
            ]
        }),
    )?;
    let violations = threshold_ordering_violations(&samples);
    let failures = samples.iter().filter(|s| s.threshold.is_none()).count();
    let summary = json!({ "samples": samples.len(), "failures": failures, "ordering_violations": violations });
    finish(&dir, "thresholds", &a, vec!["thresholds.csv".into()], summary)?;
    Ok(if failures > 0 { ExitCode::from(EXIT_SOLVER) } else { ExitCode::SUCCESS })
}

fn cmd_scan_raster(mut a: ScanRasterArgs) -> Result<ExitCode> {
    let model = *a.model.get_or_insert(ModelKind::Svk);
    let pred = *a.predicate.get_or_insert(PredicateKind::Hyperbolicity);
    a.material.fill();
    let plane = pred == PredicateKind::StrongBePlane;
    let (dx, dy) = if plane { ((0.05, 3.0), (-3.0, 6.0)) } else { ((0.1, 3.0), (0.1, 3.0)) };
    let gx = axis(*a.x_min.get_or_insert(dx.0), *a.x_max.get_or_insert(dx.1), *a.nx.get_or_insert(200), "x axis")?;
    let gy = axis(*a.y_min.get_or_insert(dy.0), *a.y_max.get_or_insert(dy.1), *a.ny.get_or_insert(200), "y axis")?;
    let pgm = *a.pgm.get_or_insert(false);
    a.workers.fill()?;
    a.out.fill();
    let dir = a.out.dir()?;
    let grid = GridSpec::new(gx, gy)?;
    let nu = a.material.nu.unwrap_or(0.25);
    let map = if plane {
        raster_strong_be_plane(nu, &grid, a.workers.workers.unwrap_or(1))?
    } else {
        let m = match model {
            ModelKind::Svk => RasterModel::Svk(Svk::new(a.material.kappa.unwrap_or(1.0), nu)?),
            ModelKind::Polytropic => RasterModel::Polytropic(a.material.build()?),
        };
        let p = match pred {
            PredicateKind::Hyperbolicity => InequalityPredicate::Hyperbolicity,
            _ => InequalityPredicate::BakerEricksen,
        };
        raster_inequality_region(m, p, &grid)?
    };
    let outs = write_region(&dir, "raster", &map, pgm)?;
    finish(&dir, "raster", &a, outs, region_summary(&map))?;
    Ok(region_exit(&map))
}
