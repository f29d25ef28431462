//! Static self-gravitating balls: shooting from a strongly regular center,
//! boundary detection at y = y_b, and type A/B classification.
//!
//! The same driver integrates the self-similar profile of homologous balls,
//! whose equations differ only by the gravity factor (1 + α/η).

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::constitutive::{b_over_y, eos_f_sheared};
use crate::error::{ensure_positive, Error, Result};
use crate::material::{Material, StrainState};
use crate::ode::{Dopri5, OdeSystem, SolverStats, StepOptions};
use crate::phase::{upsilon_raw, y_p};

/// Central density δ(0) = η(0).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterData {
    pub delta_c: f64,
}

impl CenterData {
    pub fn new(delta_c: f64) -> Result<Self> {
        ensure_positive("delta_c", delta_c)?;
        Ok(Self { delta_c })
    }
}

/// Solver options. Radii `r_max` and `classify_r_max` are in rescaled units
/// r̃ = r·(θδ_c^{2−γ})^{1/2}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaticOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Bisection tolerance on |y − y_b|.
    pub boundary_tol: f64,
    /// Existence horizon.
    pub r_max: f64,
    /// Horizon for the type A/B classification run beyond the boundary.
    pub classify_r_max: f64,
    /// y below this counts as δ → 0.
    pub y_floor: f64,
    /// Distance to the sink P at which convergence is declared.
    pub convergence_tol: f64,
    /// Series start radius in rescaled units.
    pub r0_factor: f64,
    /// Continue past the boundary to classify the ball.
    pub classify: bool,
    pub max_steps: usize,
    /// Wall-clock budget in seconds.
    pub timeout_s: Option<f64>,
}

impl Default for StaticOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            boundary_tol: 1e-10,
            r_max: 1e3,
            classify_r_max: 1e12,
            y_floor: 1e-12,
            convergence_tol: 1e-4,
            r0_factor: 1e-4,
            classify: true,
            max_steps: 2_000_000,
            timeout_s: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BallType {
    A,
    B,
    None,
}

impl std::fmt::Display for BallType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BallType::A => "A",
            BallType::B => "B",
            BallType::None => "none",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub r: f64,
    pub delta: f64,
    pub eta: f64,
    pub y: f64,
    pub f_rad: f64,
    pub f_tan: f64,
    pub mass: f64,
    /// dδ/dr and dη/dr.
    pub ddelta: f64,
    pub deta: f64,
}

/// Why the integration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Density vanished (zero boundary shear, or classification found type A).
    DensityZero,
    /// Converged to the sink P.
    Converged,
    /// A horizon was reached.
    Horizon,
    /// The shear stalled above y_b.
    Stalled,
    /// The shear grew without bound.
    Runaway,
    /// Stopped at the boundary without classification.
    Boundary,
    /// The integrator could not continue (finite-radius blow-up).
    Singular,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallProfile {
    pub material: Material,
    pub delta_c: f64,
    /// Gravity shift α; zero for static balls.
    pub alpha: f64,
    /// Samples from the center to the boundary (or horizon).
    pub samples: Vec<ProfileSample>,
    pub radius: Option<f64>,
    pub ball_type: BallType,
    /// End of the maximal interval when it was found to be finite.
    pub r_max_hint: Option<f64>,
    /// Physical existence horizon used.
    pub horizon: f64,
    /// Radius and shear where the integration stopped.
    pub end_r: f64,
    pub end_y: f64,
    pub stop: StopReason,
    pub warning: Option<String>,
    pub stats: SolverStats,
}

impl BallProfile {
    pub fn exists(&self) -> bool {
        self.radius.is_some()
    }
}

/// State variables: q = ln η and either ln δ or δ^{β−1}.
#[derive(Clone, Copy, Debug)]
enum Chart {
    LogDelta,
    Power { k: f64 },
}

pub(crate) struct ShootSystem {
    chart: Chart,
    beta: f64,
    gamma: f64,
    theta: f64,
    alpha: f64,
    coeff: f64,
}

impl ShootSystem {
    fn new(mat: &Material, alpha: f64) -> Self {
        let beta = mat.beta();
        let chart = if beta > 1.05 { Chart::Power { k: beta - 1.0 } } else { Chart::LogDelta };
        Self { chart, beta, gamma: mat.gamma(), theta: mat.theta(), alpha, coeff: 3.0 * (beta - mat.gamma()) }
    }

    fn encode(&self, delta: f64, eta: f64) -> [f64; 2] {
        match self.chart {
            Chart::LogDelta => [delta.ln(), eta.ln()],
            Chart::Power { k } => [delta.powf(k), eta.ln()],
        }
    }

    /// (δ, η, y).
    fn decode(&self, x: &[f64; 2]) -> (f64, f64, f64) {
        let eta = x[1].exp();
        match self.chart {
            Chart::LogDelta => (x[0].exp(), eta, (x[0] - x[1]).exp()),
            Chart::Power { k } => {
                let d = x[0].max(0.0).powf(1.0 / k);
                (d, eta, d / eta)
            }
        }
    }

    /// (dδ/dr, dη/dr) from the state and its derivative.
    fn physical_derivs(&self, x: &[f64; 2], dx: &[f64; 2]) -> (f64, f64) {
        let (d, e, _) = self.decode(x);
        let dd = match self.chart {
            Chart::LogDelta => d * dx[0],
            Chart::Power { k } => {
                if x[0] > 0.0 {
                    d * dx[0] / (k * x[0])
                } else {
                    f64::NEG_INFINITY
                }
            }
        };
        (dd, e * dx[1])
    }

    /// d ln y/dr.
    fn dlny(&self, x: &[f64; 2], dx: &[f64; 2]) -> f64 {
        match self.chart {
            Chart::LogDelta => dx[0] - dx[1],
            Chart::Power { k } => dx[0] / (k * x[0]) - dx[1],
        }
    }

    fn density_vanished(&self, x: &[f64; 2], y_floor: f64) -> bool {
        match self.chart {
            Chart::LogDelta => x[0] - x[1] <= y_floor.ln(),
            Chart::Power { .. } => x[0] <= 0.0 || self.decode(x).2 <= y_floor,
        }
    }
}

impl OdeSystem<2> for ShootSystem {
    fn rhs(&self, r: f64, x: &[f64; 2]) -> [f64; 2] {
        let eta = x[1].exp();
        let grav = self.theta * r * (1.0 + self.alpha / eta);
        match self.chart {
            Chart::LogDelta => {
                let ly = x[0] - x[1];
                let y = ly.exp();
                let w = ((1.0 - self.beta) * ly).exp();
                let bq = b_over_y(self.beta, y);
                let s = w * (self.coeff * bq / r - grav * eta.powf(2.0 - self.gamma));
                [s, -3.0 * (1.0 - y) / r]
            }
            Chart::Power { k } => {
                let s = x[0].max(0.0);
                let y = s.powf(1.0 / k) / eta;
                let bq = b_over_y(self.beta, y);
                let ek = eta.powf(k);
                let ds = k * ek * (self.coeff * bq / r - grav * eta.powf(2.0 - self.gamma));
                [ds, -3.0 * (1.0 - y) / r]
            }
        }
    }
}

/// Taylor start at r0: δ = δ_c + ½D r0², η = δ_c + (3/10)D r0² with
/// D = −θδ_c^{3−γ}(1 + α/δ_c).
pub fn series_start_shifted(mat: &Material, c: CenterData, alpha: f64, r0: f64) -> Result<StrainState> {
    ensure_positive("r0", r0)?;
    let dc = c.delta_c;
    let d2 = -mat.theta() * dc.powf(3.0 - mat.gamma()) * (1.0 + alpha / dc);
    StrainState::new(dc + 0.5 * d2 * r0 * r0, dc + 0.3 * d2 * r0 * r0)
}

/// Taylor start of the static system.
pub fn series_start(c: CenterData, mat: &Material, r0: f64) -> Result<StrainState> {
    series_start_shifted(mat, c, 0.0, r0)
}

/// Radial length unit (θδ_c^{2−γ})^{−1/2}.
pub fn length_scale(mat: &Material, delta_c: f64) -> f64 {
    (mat.theta() * delta_c.powf(2.0 - mat.gamma())).powf(-0.5)
}

fn make_sample(mat: &Material, r: f64, delta: f64, eta: f64, y: f64, dd: f64, de: f64) -> ProfileSample {
    let (f_rad, f_tan) = eos_f_sheared(mat, y, eta);
    ProfileSample {
        r,
        delta,
        eta,
        y,
        f_rad,
        f_tan,
        mass: 4.0 * std::f64::consts::PI / 3.0 * eta * r * r * r,
        ddelta: dd,
        deta: de,
    }
}

/// Integrate the static system from a strongly regular center.
pub fn integrate_static(c: CenterData, mat: &Material, opts: &StaticOptions) -> Result<BallProfile> {
    shoot(mat, c.delta_c, 0.0, opts, None)
}

/// Shared driver. `stall_slope`: declare nonexistence when |dy/dr| drops
/// below this value while y > y_b.
pub(crate) fn shoot(
    mat: &Material,
    delta_c: f64,
    alpha: f64,
    opts: &StaticOptions,
    stall_slope: Option<f64>,
) -> Result<BallProfile> {
    ensure_positive("delta_c", delta_c)?;
    let sys = ShootSystem::new(mat, alpha);
    let lscale = length_scale(mat, delta_c);
    let shift = (1.0 + alpha / delta_c).abs().max(1.0);
    let r0 = opts.r0_factor * lscale / shift.sqrt();
    let start = series_start_shifted(mat, CenterData { delta_c }, alpha, r0)?;
    let x0 = sys.encode(start.delta, start.eta);
    let r_exist = opts.r_max * lscale;
    let r_class = (opts.classify_r_max * lscale).max(r_exist);
    let yb = mat.y_b();

    let mut sopts = StepOptions::new(opts.rtol, opts.atol);
    if let Chart::Power { k } = sys.chart {
        sopts.atol[0] = opts.atol * delta_c.powf(k);
    }
    sopts.max_steps = opts.max_steps;
    sopts.deadline = opts.timeout_s.map(|s| Instant::now() + std::time::Duration::from_secs_f64(s));
    sopts.h_init = Some(r0 * 0.1);

    let mut stepper = Dopri5::new(&sys, r0, x0, r_class, sopts);
    let mut samples = vec![make_sample(mat, 0.0, delta_c, delta_c, 1.0, 0.0, 0.0)];
    {
        let dx = stepper.rhs_now();
        let (dd, de) = sys.physical_derivs(&x0, &dx);
        samples.push(make_sample(mat, r0, start.delta, start.eta, start.y(), dd, de));
    }

    let mut radius = None;
    let mut ball_type = BallType::None;
    let mut warning = None;
    let stop;
    let push = |samples: &mut Vec<ProfileSample>, r: f64, x: &[f64; 2]| {
        let (d, e, y) = sys.decode(x);
        let dx = sys.rhs(r, x);
        let (dd, de) = sys.physical_derivs(x, &dx);
        samples.push(make_sample(mat, r, d, e, y, dd, de));
    };

    // Inside the ball.
    loop {
        stepper.step(r_exist)?;
        let (_, _, y) = sys.decode(&stepper.x);
        if yb > 0.0 && y <= yb {
            let (rb, xb) = stepper.locate(|_, x| sys.decode(x).2 - yb, opts.boundary_tol);
            push(&mut samples, rb, &xb);
            radius = Some(rb);
            stepper.reset(rb, xb);
            break;
        }
        if sys.density_vanished(&stepper.x, opts.y_floor) {
            // Zero boundary shear: the boundary is where δ vanishes.
            let rz = match sys.chart {
                Chart::Power { .. } => stepper.locate(|_, x| x[0], 0.0).0,
                Chart::LogDelta => {
                    let (d, _, _) = sys.decode(&stepper.x);
                    let dx = stepper.rhs_now();
                    let (dd, _) = sys.physical_derivs(&stepper.x, &dx);
                    if dd < 0.0 {
                        stepper.t - d / dd
                    } else {
                        stepper.t
                    }
                }
            };
            let (_, e, _) = sys.decode(&stepper.x);
            samples.push(make_sample(mat, rz, 0.0, e, 0.0, f64::NEG_INFINITY, 0.0));
            if yb == 0.0 {
                radius = Some(rz);
                ball_type = BallType::A;
            }
            stop = StopReason::DensityZero;
            return Ok(finish(
                mat,
                delta_c,
                alpha,
                samples,
                radius,
                ball_type,
                Some(rz),
                r_exist,
                rz,
                0.0,
                stop,
                warning,
                stepper.stats,
            ));
        }
        push(&mut samples, stepper.t, &stepper.x);
        if y > 1e8 {
            stop = StopReason::Runaway;
            return Ok(finish(
                mat,
                delta_c,
                alpha,
                samples,
                None,
                BallType::None,
                None,
                r_exist,
                stepper.t,
                y,
                stop,
                warning,
                stepper.stats,
            ));
        }
        if let Some(slope) = stall_slope {
            let dx = stepper.rhs_now();
            let dy = y * sys.dlny(&stepper.x, &dx);
            if stepper.t > 100.0 * r0 && dy.abs() < slope {
                stop = StopReason::Stalled;
                return Ok(finish(
                    mat,
                    delta_c,
                    alpha,
                    samples,
                    None,
                    BallType::None,
                    None,
                    r_exist,
                    stepper.t,
                    y,
                    stop,
                    warning,
                    stepper.stats,
                ));
            }
        }
        if stepper.t >= r_exist {
            stop = StopReason::Horizon;
            return Ok(finish(
                mat,
                delta_c,
                alpha,
                samples,
                None,
                BallType::None,
                None,
                r_exist,
                stepper.t,
                y,
                stop,
                warning,
                stepper.stats,
            ));
        }
    }

    if !opts.classify {
        let rb = radius.unwrap_or(stepper.t);
        return Ok(finish(
            mat,
            delta_c,
            alpha,
            samples,
            radius,
            BallType::None,
            None,
            r_exist,
            rb,
            yb,
            StopReason::Boundary,
            warning,
            stepper.stats,
        ));
    }

    // Beyond the boundary: decide whether the maximal interval is finite.
    let sink = if alpha == 0.0 && mat.gamma() < 2.0 {
        let yp = y_p(mat.gamma());
        (yp > 0.0 && yp < 1.0).then(|| (yp, upsilon_raw(mat, yp)))
    } else {
        None
    };
    let theta = mat.theta();
    let mut near_count = 0usize;
    let result = loop {
        match stepper.step(r_class) {
            Ok(()) => {}
            Err(Error::StepUnderflow { at, .. }) => {
                warning = Some(format!("integration became singular at r = {at:e}"));
                break (BallType::A, Some(at), StopReason::Singular);
            }
            Err(Error::TooManySteps { at, .. }) => {
                warning = Some(format!("step budget exhausted at r = {at:e} during classification"));
                break (BallType::B, None, StopReason::Horizon);
            }
            Err(e) => return Err(e),
        }
        if sys.density_vanished(&stepper.x, opts.y_floor) {
            let rz = match sys.chart {
                Chart::Power { .. } => stepper.locate(|_, x| x[0], 0.0).0,
                Chart::LogDelta => stepper.t,
            };
            break (BallType::A, Some(rz), StopReason::DensityZero);
        }
        let (_, eta, y) = sys.decode(&stepper.x);
        if let Some((yp, vp)) = sink {
            let r = stepper.t;
            let v = theta * r * r * eta.powf(2.0 - mat.gamma()) * y.powf(1.0 - mat.beta());
            let tol = opts.convergence_tol;
            if (y - yp).abs() < tol && (v - vp).abs() < tol * vp.max(1.0) {
                near_count += 1;
                // Require a few consecutive steps inside the target ball.
                if near_count >= 8 {
                    break (BallType::B, None, StopReason::Converged);
                }
            } else {
                near_count = 0;
            }
        }
        if stepper.t >= r_class {
            warning = Some(format!("horizon reached without convergence of y (y = {y:.6e})"));
            break (BallType::B, None, StopReason::Horizon);
        }
    };
    let (t, hint, stop) = result;
    let end_y = sys.decode(&stepper.x).2;
    Ok(finish(mat, delta_c, alpha, samples, radius, t, hint, r_exist, stepper.t, end_y, stop, warning, stepper.stats))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    mat: &Material,
    delta_c: f64,
    alpha: f64,
    samples: Vec<ProfileSample>,
    radius: Option<f64>,
    ball_type: BallType,
    r_max_hint: Option<f64>,
    horizon: f64,
    end_r: f64,
    end_y: f64,
    stop: StopReason,
    warning: Option<String>,
    stats: SolverStats,
) -> BallProfile {
    BallProfile {
        material: *mat,
        delta_c,
        alpha,
        samples,
        radius,
        ball_type,
        r_max_hint,
        horizon,
        end_r,
        end_y,
        stop,
        warning,
        stats,
    }
}

/// Type of a ball that has a boundary.
pub fn classify_type(profile: &BallProfile) -> Result<BallType> {
    if profile.radius.is_none() {
        return Err(Error::Invalid("profile has no boundary".into()));
    }
    Ok(profile.ball_type)
}
