//! Acceptance criteria 1–8. Runs without the libtest harness so every
//! criterion prints one line; the process fails if any criterion fails.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use polyball::atlas::{
    estimate_gamma_star, in_v_a, in_v_b, raster_strong_be_plane, scan_homologous_threshold, scan_static_region,
    threshold_ordering_violations, Axis, GridSpec, StaticScanOptions,
};
use polyball::constitutive::{
    cbs_spread, check_hyperelastic_exactness, check_scale_invariance, linearization_fd, stored_energy, w_pf, StrainBox,
};
use polyball::homologous::{
    integrate_profile, profile_options, solve_omega, HomologousParams, OmegaOptions, GAMMA_HOMOLOGOUS,
};
use polyball::lagrangian::{boundary_condition_residual, euler_to_lagrange, lagrange_to_euler};
use polyball::phase::{eigen2, fixed_points, track_gamma_at, vector_field, y_p, PhaseOptions, PhaseState};
use polyball::static_ball::{integrate_static, BallType, CenterData, StaticOptions};
use polyball::{Material, StrainState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Criterion 1
const LANE_EMDEN_TOL: f64 = 1e-6;
const LANE_EMDEN_MAX_S: f64 = 1.0;
// Criterion 2
const GAMMA_STAR_TOL: f64 = 0.05;
const GAMMA_STAR_REF: [(f64, f64); 4] = [(-0.5, 0.50), (0.0, 0.92), (0.25, 1.08), (0.48, 1.19)];
const REGION_SCAN_MAX_S: f64 = 600.0;
const REGION_SCAN_WORKERS: usize = 8;
// Criterion 3
const THEOREM_SAMPLES: usize = 20;
const SINK_TOL: f64 = 1e-3;
// Criterion 4
const HOMOLOGOUS_SAMPLES: usize = 10;
// Criterion 5
const FIXED_POINT_SAMPLES: usize = 10;
const EIGEN_TOL: f64 = 1e-8;
const ANGLE_TOL: f64 = 1e-8;
/// Unstable direction at O: (−5, 1) in (v, y) order, so 1 − y ≈ v/5.
const O_UNSTABLE_YV: [f64; 2] = [-1.0, 5.0];
const GAMMA_ORBIT_TOL: f64 = 1e-4;
const IMAGE_TOL: f64 = 10.0 * 1e-10;
// Criterion 6
const HYPERELASTIC_TOL: f64 = 1e-6;
const SCALE_TOL: f64 = 1e-10;
const CBS_TOL: f64 = 1e-12;
const LINEARIZATION_TOL: f64 = 1e-8;
const BE_GRID: usize = 50;
const FLUID_ENERGY_TOL: f64 = 1e-12;
const FLUID_ENERGY_SAMPLES: usize = 1000;
// Criterion 7
const ENERGY_DRIFT_TOL: f64 = 1e-8;
const COLLAPSE_TOL: f64 = 1e-6;
const THRESHOLD_ALPHAS: usize = 5;
// Criterion 8
const ROUND_TRIP_TOL: f64 = 1e-8;
const BC_TOL: f64 = 1e-6;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn mat(nu: f64, g: f64, b: f64) -> Material {
    Material::nondimensional(nu, g, b).unwrap()
}

/// Lane-Emden n = 1: θ'' + (2/ξ)θ' + θ = 0 by classical RK4 on a uniform
/// grid, started from the series θ = 1 − ξ²/6 + ξ⁴/120.
struct LaneEmden {
    h: f64,
    nodes: Vec<(f64, f64)>,
}

impl LaneEmden {
    fn solve(xi_end: f64, h: f64) -> Self {
        let rhs = |x: f64, s: [f64; 2]| [s[1], -s[0] - 2.0 * s[1] / x];
        let x0 = h;
        let mut s = [1.0 - x0 * x0 / 6.0 + x0.powi(4) / 120.0, -x0 / 3.0 + x0.powi(3) / 30.0];
        let mut nodes = vec![(1.0, 0.0), (s[0], s[1])];
        let mut x = x0;
        while x < xi_end {
            let k1 = rhs(x, s);
            let k2 = rhs(x + h / 2.0, [s[0] + h / 2.0 * k1[0], s[1] + h / 2.0 * k1[1]]);
            let k3 = rhs(x + h / 2.0, [s[0] + h / 2.0 * k2[0], s[1] + h / 2.0 * k2[1]]);
            let k4 = rhs(x + h, [s[0] + h * k3[0], s[1] + h * k3[1]]);
            for i in 0..2 {
                s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            x += h;
            nodes.push((s[0], s[1]));
        }
        Self { h, nodes }
    }

    /// Cubic Hermite interpolation between RK4 nodes.
    fn at(&self, xi: f64) -> f64 {
        let i = ((xi / self.h) as usize).min(self.nodes.len() - 2);
        let (x0, x1) = (i as f64 * self.h, (i + 1) as f64 * self.h);
        let (a, b) = (self.nodes[i], self.nodes[i + 1]);
        let s = (xi - x0) / (x1 - x0);
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * a.0
            + (s3 - 2.0 * s2 + s) * self.h * a.1
            + (-2.0 * s3 + 3.0 * s2) * b.0
            + (s3 - s2) * self.h * b.1
    }
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let m = Material::new(1.0, 0.5, 2.0, 2.0, 1.0).unwrap();
    let p =
        integrate_static(CenterData::new(1.0).unwrap(), &m, &StaticOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = t0.elapsed().as_secs_f64();
    let le = LaneEmden::solve(3.3, 1e-3);
    // Radial rescaling: ξ = r·√(3θδ_c^{2−γ}) with θ = δ_c = 1.
    let k = 3f64.sqrt();
    let (mut err_rk, mut err_exact) = (0.0f64, 0.0f64);
    for s in &p.samples {
        let xi = k * s.r;
        let exact = if xi == 0.0 { 1.0 } else { xi.sin() / xi };
        err_rk = err_rk.max((s.delta - le.at(xi).max(0.0)).abs());
        err_exact = err_exact.max((s.delta - exact.max(0.0)).abs());
    }
    let last = p.samples.last().unwrap();
    let ok = p.ball_type == BallType::A
        && last.delta.abs() < LANE_EMDEN_TOL
        && err_rk <= LANE_EMDEN_TOL
        && err_exact <= LANE_EMDEN_TOL
        && elapsed < LANE_EMDEN_MAX_S;
    check(
        ok,
        format!(
            "type {} R={:.10} δ(R)={:.1e} err_rk4={err_rk:.2e} err_exact={err_exact:.2e} t={elapsed:.3}s",
            p.ball_type,
            p.radius.unwrap_or(f64::NAN),
            last.delta
        ),
    )
}

fn criterion_2() -> Outcome {
    let opts = StaticScanOptions::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for (nu, want) in GAMMA_STAR_REF {
        let est = estimate_gamma_star(nu, (0.05, 3.0), &opts);
        let g = est.gamma_star.unwrap_or(f64::NAN);
        ok &= (g - want).abs() <= GAMMA_STAR_TOL;
        parts.push(format!("ν={nu}: {g:.4} (ref {want})"));
    }
    let grid = GridSpec::new(Axis::new(0.05, 3.0, 100).unwrap(), Axis::new(-2.0, 4.0, 100).unwrap()).unwrap();
    let t0 = Instant::now();
    let map = scan_static_region(0.25, &grid, &opts, REGION_SCAN_WORKERS).map_err(|e| e.to_string())?;
    let elapsed = t0.elapsed().as_secs_f64();
    ok &= elapsed < REGION_SCAN_MAX_S && map.violations.is_empty() && !map.has_timeouts();
    parts.push(format!(
        "100×100 scan {elapsed:.1}s, {} violations, cores={}",
        map.violations.len(),
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    ));
    check(ok, parts.join("; "))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let opts = StaticOptions::default();
    let c = CenterData::new(1.0).unwrap();
    let mut failures = Vec::new();
    let mut worst_sink: f64 = 0.0;

    let mut n = 0;
    while n < THEOREM_SAMPLES {
        let (nu, g) = (rng.gen_range(-0.9..0.45), rng.gen_range(2.0..5.0));
        let b = rng.gen_range(1.0..g);
        if !in_v_a(g, b) || !Material::is_admissible(nu, g, b) {
            continue;
        }
        n += 1;
        let p = integrate_static(c, &mat(nu, g, b), &opts).map_err(|e| e.to_string())?;
        let shear_ok = p.samples.iter().all(|s| s.f_tan >= s.f_rad);
        if !p.exists() || p.ball_type != BallType::A || !shear_ok {
            failures.push(format!("A({nu:.3},{g:.3},{b:.3})→{}", p.ball_type));
        }
    }

    let mut n = 0;
    while n < THEOREM_SAMPLES {
        let (nu, g, b) = (rng.gen_range(-0.9..0.45), rng.gen_range(0.05..1.0), rng.gen_range(-2.0..1.0));
        if !in_v_b(nu, g, b) || !Material::is_admissible(nu, g, b) {
            continue;
        }
        n += 1;
        let p = integrate_static(c, &mat(nu, g, b), &opts).map_err(|e| e.to_string())?;
        let shear_ok = p.samples.iter().all(|s| s.f_tan >= s.f_rad);
        let d = (p.end_y - y_p(g)).abs();
        worst_sink = worst_sink.max(d);
        if !p.exists() || p.ball_type != BallType::B || d > SINK_TOL || !shear_ok {
            failures.push(format!("B({nu:.3},{g:.3},{b:.3})→{} |y−y_P|={d:.1e}", p.ball_type));
        }
    }
    check(
        failures.is_empty(),
        format!(
            "{} V_A + {} V_B samples, max |y−y_P|={worst_sink:.1e}, failures: [{}]",
            THEOREM_SAMPLES,
            THEOREM_SAMPLES,
            failures.join(", ")
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = Vec::new();
    for _ in 0..HOMOLOGOUS_SAMPLES {
        let nu = rng.gen_range(-0.9..0.49);
        let dc = 10f64.powf(rng.gen_range(-1.0..1.0));
        let alpha = rng.gen_range(0.05..5.0);
        let beta = rng.gen_range(1.0..=GAMMA_HOMOLOGOUS);
        if beta == 1.0 {
            continue;
        }
        let m = mat(nu, GAMMA_HOMOLOGOUS, beta);
        let p = HomologousParams::new(m, alpha, dc).map_err(|e| e.to_string())?;
        let prof = integrate_profile(&p, &profile_options()).map_err(|e| e.to_string())?;
        let zmax_ok = prof.z_max_hint().is_some_and(f64::is_finite);
        let shear_ok = prof.samples().iter().all(|s| s.f_tan >= s.f_rad);
        if prof.boundary().is_none() || !zmax_ok || !shear_ok {
            failures.push(format!("(ν={nu:.3}, β={beta:.3}, α={alpha:.3}, δ₀ᶜ={dc:.3})"));
        }
    }
    check(failures.is_empty(), format!("{HOMOLOGOUS_SAMPLES} samples, failures: [{}]", failures.join(", ")))
}

fn central_jacobian(m: &Material, s: PhaseState, h: f64) -> [[f64; 2]; 2] {
    let f = |y: f64, v: f64| {
        let (a, b) = vector_field(m, PhaseState { y, v });
        [a, b]
    };
    let (yp, ym) = (f(s.y + h, s.v), f(s.y - h, s.v));
    let (vp, vm) = (f(s.y, s.v + h), f(s.y, s.v - h));
    let mut j = [[0.0; 2]; 2];
    for i in 0..2 {
        j[i][0] = (yp[i] - ym[i]) / (2.0 * h);
        j[i][1] = (vp[i] - vm[i]) / (2.0 * h);
    }
    j
}

fn unstable_direction(j: [[f64; 2]; 2]) -> ([f64; 2], f64) {
    let (vals, vecs) = eigen2(j);
    let k = if (vals[0].0 - 2.0).abs() < (vals[1].0 - 2.0).abs() { 0 } else { 1 };
    (vecs.map(|v| v[k]).unwrap_or([f64::NAN; 2]), vals[k].0)
}

fn angle_to(v: [f64; 2], w: [f64; 2]) -> f64 {
    let cross = v[0] * w[1] - v[1] * w[0];
    let dot = v[0] * w[0] + v[1] * w[1];
    cross.abs().atan2(dot.abs())
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    let (mut worst_eig, mut worst_fd, mut worst_angle) = (0.0f64, 0.0f64, 0.0f64);
    let mut n = 0;
    while n < FIXED_POINT_SAMPLES {
        let (nu, g, b) = (rng.gen_range(-0.9..0.45), rng.gen_range(0.1..1.95), rng.gen_range(-2.0..3.0));
        if !Material::is_admissible(nu, g, b) {
            continue;
        }
        n += 1;
        let m = mat(nu, g, b);
        let fps = fixed_points(&m).map_err(|e| e.to_string())?;
        let o = fps.iter().find(|f| f.name == "O").unwrap();
        let lam = o.eigenvalues.iter().map(|e| (e.0 - 2.0).abs()).fold(f64::INFINITY, f64::min);
        let vec_a = o.eigenvectors.map(|v| v[o.eigenvalues.iter().position(|e| e.0 == 2.0).unwrap_or(0)]);
        let (vec_fd, lam_fd) = unstable_direction(central_jacobian(&m, PhaseState { y: 1.0, v: 0.0 }, 1e-5));
        let ang = angle_to(vec_a.unwrap_or([f64::NAN; 2]), O_UNSTABLE_YV).max(angle_to(vec_fd, O_UNSTABLE_YV));
        worst_eig = worst_eig.max(lam);
        worst_fd = worst_fd.max((lam_fd - 2.0).abs());
        worst_angle = worst_angle.max(ang);
        if lam != 0.0 || (lam_fd - 2.0).abs() > EIGEN_TOL || ang.is_nan() || ang > ANGLE_TOL {
            failures.push(format!("({nu:.3},{g:.3},{b:.3})"));
        }
    }

    let mut worst_orbit: f64 = 0.0;
    for (nu, g, b) in [(0.0, 1.0, 0.5), (0.25, 0.8, 0.3), (-0.5, 0.6, -1.0)] {
        let m = mat(nu, g, b);
        let (orbit, _) = track_gamma_at(&m, 1.0, 40.0, &[], &PhaseOptions::default()).map_err(|e| e.to_string())?;
        let d = orbit.distance_to_p.unwrap_or(f64::INFINITY);
        worst_orbit = worst_orbit.max(d);
        if orbit.exit.is_some() || d >= GAMMA_ORBIT_TOL {
            failures.push(format!("Γ({nu},{g},{b}) d={d:.1e}"));
        }
    }

    // Phase image of static balls, compared with Γ at the same ξ.
    let mut worst_image: f64 = 0.0;
    for (nu, g, b, dc) in [(0.25, 1.5, 1.2, 1.0), (0.0, 0.8, 0.5, 2.0), (0.3, 3.0, 2.0, 0.5)] {
        let m = mat(nu, g, b);
        let p =
            integrate_static(CenterData::new(dc).unwrap(), &m, &StaticOptions::default()).map_err(|e| e.to_string())?;
        let r_end = p.radius.unwrap_or(p.end_r);
        let pts: Vec<(f64, f64, f64)> = p
            .samples
            .iter()
            .filter(|s| s.r > 0.0 && s.r <= r_end && s.delta > 0.0)
            .map(|s| {
                let y = s.delta / s.eta;
                let v = m.theta() * s.r * s.r * s.eta.powf(2.0 - g) * y.powf(1.0 - b);
                (s.r.ln(), y, v)
            })
            .collect();
        let xis: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let c = m.theta() * dc.powf(2.0 - g);
        let xi_end = xis.last().copied().unwrap_or(0.0) + 1e-9;
        let (_, on_gamma) = track_gamma_at(&m, c, xi_end, &xis, &PhaseOptions::default()).map_err(|e| e.to_string())?;
        for (&(_, y, v), q) in pts.iter().zip(&on_gamma) {
            let e = (y - q.y).abs().max((v - q.v).abs() / v.max(1.0));
            worst_image = worst_image.max(e);
        }
    }
    if worst_image.is_nan() || worst_image > IMAGE_TOL {
        failures.push(format!("static image off Γ by {worst_image:.1e}"));
    }

    check(
        failures.is_empty(),
        format!(
            "|λ−2| analytic={worst_eig:.0e} fd={worst_fd:.1e}, angle={worst_angle:.1e}, Γ→P {worst_orbit:.1e}, \
             image {worst_image:.1e}; failures: [{}]",
            failures.join(", ")
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut hyper, mut scale, mut cbs, mut lin, mut wpf) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut n = 0;
    while n < 20 {
        let (nu, g, b) = (rng.gen_range(-0.9..0.5), rng.gen_range(0.2..4.0), rng.gen_range(-3.0..6.0));
        if !Material::is_admissible(nu, g, b) {
            continue;
        }
        n += 1;
        let m = mat(nu, g, b);
        hyper = hyper.max(check_hyperelastic_exactness(&m, StrainBox::square(0.5, 2.0), 21, 1e-4));
        let samples = StrainBox::square(0.05, 20.0).sample(FLUID_ENERGY_SAMPLES, n as u64);
        let s = check_scale_invariance(&m, &samples, 8.0);
        scale = scale.max(s.a).max(s.b);
        let etas: Vec<f64> = samples.iter().map(|s| s.eta).collect();
        cbs = cbs.max(cbs_spread(&m, &etas));
        // Independent closed form of the linearized partials at (1, 1).
        let k = m.kappa();
        let q = (1.0 - 2.0 * nu) / (1.0 + nu);
        let want = [3.0 * m.c() * k, -2.0 * q * k, 3.0 * nu / (1.0 + nu) * k, q * k];
        let got = linearization_fd(&m, 1e-3);
        lin = lin.max(want.iter().zip(&got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        for s in &samples {
            let d = s.delta;
            let e = stored_energy(&m, StrainState { delta: d, eta: d });
            let f = w_pf(&m, d);
            wpf = wpf.max((e - f).abs() / f.abs().max(1.0));
        }
    }
    let mut be_mismatch = 0;
    for nu in [-0.5, 0.0, 0.25, 0.45] {
        let grid =
            GridSpec::new(Axis::new(0.05, 3.0, BE_GRID).unwrap(), Axis::new(-3.0, 6.0, BE_GRID).unwrap()).unwrap();
        be_mismatch += raster_strong_be_plane(nu, &grid, 1).map_err(|e| e.to_string())?.violations.len();
    }
    let ok = hyper <= HYPERELASTIC_TOL
        && scale <= SCALE_TOL
        && cbs <= CBS_TOL
        && lin <= LINEARIZATION_TOL
        && be_mismatch == 0
        && wpf <= FLUID_ENERGY_TOL;
    check(
        ok,
        format!(
            "hyperelastic={hyper:.1e} scale={scale:.1e} cbs={cbs:.1e} lin={lin:.1e} \
             strong-BE mismatches={be_mismatch} ŵ(δ,δ)−ŵ_pf={wpf:.1e}"
        ),
    )
}

/// Collapse time of ω²ω̈ = −k from ω = 1 at rest, by composite Simpson on
/// T = (2k)^{−1/2} ∫₀¹ √(ω/(1−ω)) dω with ω = sin²φ.
fn collapse_time_quadrature(k: f64) -> f64 {
    let n = 2000;
    let h = FRAC_PI_2 / n as f64;
    let f = |phi: f64| 2.0 * phi.sin().powi(2);
    let mut s = f(0.0) + f(FRAC_PI_2);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    s * h / 3.0 / (2.0 * k).sqrt()
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut drift, mut t_err) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let nu = rng.gen_range(-0.9..0.49);
        let alpha = rng.gen_range(-5.0..5.0);
        let m = mat(nu, GAMMA_HOMOLOGOUS, rng.gen_range(1.01..1.3));
        let p = HomologousParams::new(m, alpha, 1.0).map_err(|e| e.to_string())?;
        let tr = solve_omega(&p, 50.0, &OmegaOptions::default()).map_err(|e| e.to_string())?;
        drift = drift.max(tr.energy_drift);
        if alpha < 0.0 {
            let want = collapse_time_quadrature(-p.c_omega() * alpha);
            let got = tr.collapse_time.unwrap_or(f64::NAN);
            t_err = t_err.max(((got - want) / want).abs());
        }
    }
    let samples =
        scan_homologous_threshold(&[0.0, 0.25, 0.45], (-4.0, -0.25), THRESHOLD_ALPHAS, &StaticOptions::default(), 8)
            .map_err(|e| e.to_string())?;
    let missing = samples.iter().filter(|s| s.threshold.is_none()).count();
    let violations = threshold_ordering_violations(&samples);
    let ok = drift <= ENERGY_DRIFT_TOL && t_err <= COLLAPSE_TOL && missing == 0 && violations.is_empty();
    check(
        ok,
        format!(
            "drift={drift:.1e} collapse-time rel err={t_err:.1e}; thresholds at {THRESHOLD_ALPHAS} α: {} missing, \
             {} ordering violations",
            missing,
            violations.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut round_trip: f64 = 0.0;
    let mut bc: f64 = 0.0;
    let mut n_bc = 0;
    let cases = [
        (0.5, 2.0, 2.0, 1.0),
        (0.25, 3.0, 2.0, 1.0),
        (0.3, 2.5, 1.5, 0.7),
        (0.0, 0.8, 0.5, 1.0),
        (-0.5, 1.5, 1.2, 3.0),
    ];
    for (nu, g, b, dc) in cases {
        let m = mat(nu, g, b);
        let p =
            integrate_static(CenterData::new(dc).unwrap(), &m, &StaticOptions::default()).map_err(|e| e.to_string())?;
        if !p.exists() {
            return Err(format!("no ball for ({nu},{g},{b})"));
        }
        let map = euler_to_lagrange(&p).map_err(|e| e.to_string())?;
        let back = lagrange_to_euler(&map).map_err(|e| e.to_string())?;
        let r_b = p.radius.unwrap();
        let orig = p.samples.iter().filter(|s| s.r <= r_b && s.delta > 0.0);
        for (s, &(r, d, e)) in orig.zip(&back) {
            let err = ((s.r - r).abs()).max((s.delta - d).abs() / dc).max((s.eta - e).abs() / dc);
            round_trip = round_trip.max(err);
        }
        if let Some(res) = boundary_condition_residual(&map, &m) {
            n_bc += 1;
            bc = bc.max(res.abs() / map.outer_radius());
        }
    }
    let ok = round_trip <= ROUND_TRIP_TOL && bc <= BC_TOL && n_bc > 0;
    check(
        ok,
        format!(
            "{} balls, round trip={round_trip:.1e}, BC residual/R={bc:.1e} over {n_bc} balls with y_b>0",
            cases.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("fluid-limit Lane-Emden oracle", criterion_1),
        ("γ⋆ regression and full-grid scan", criterion_2),
        ("type-A / type-B existence sets", criterion_3),
        ("expanding homologous balls", criterion_4),
        ("fixed points and Γ", criterion_5),
        ("constitutive identities", criterion_6),
        ("ω dynamics and collapse thresholds", criterion_7),
        ("Lagrangian round trip", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {}: {tag} [{name}] {detail} ({:.2}s)", i + 1, t0.elapsed().as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
