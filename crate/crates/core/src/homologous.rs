//! Homologous motion for γ = 4/3: the scale factor ω(t), the self-similar
//! profile (δ₀, η₀), and the time-dependent ball they assemble into.

use serde::{Deserialize, Serialize};

use crate::constitutive::eos_f_sheared;
use crate::error::{ensure_positive, Error, Result};
use crate::material::Material;
use crate::ode::{Dopri5, StepOptions};
use crate::static_ball::{shoot, BallProfile, ProfileSample, StaticOptions};

pub const GAMMA_HOMOLOGOUS: f64 = 4.0 / 3.0;

/// Threshold below which |dy₀/dz| counts as a stall.
pub const STALL_SLOPE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomologousParams {
    pub mat: Material,
    pub alpha: f64,
    pub delta0_c: f64,
}

impl HomologousParams {
    pub fn new(mat: Material, alpha: f64, delta0_c: f64) -> Result<Self> {
        if (mat.gamma() - GAMMA_HOMOLOGOUS).abs() > 1e-12 {
            return Err(Error::Unsupported(format!("homologous motion requires γ = 4/3, got {}", mat.gamma())));
        }
        if alpha == 0.0 || !alpha.is_finite() {
            return Err(Error::Invalid("α must be finite and nonzero".into()));
        }
        ensure_positive("delta0_c", delta0_c)?;
        Ok(Self { mat, alpha, delta0_c })
    }

    /// Coefficient of ω²ω̈ = c_ω α, equal to 3θ(1−ν)/(1+ν).
    pub fn c_omega(&self) -> f64 {
        3.0 * self.mat.theta() * self.mat.c()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaSample {
    pub t: f64,
    pub omega: f64,
    pub omegadot: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaTrajectory {
    pub alpha: f64,
    pub c_omega: f64,
    pub samples: Vec<OmegaSample>,
    pub collapse_time: Option<f64>,
    /// Largest energy-integral deviation relative to the magnitude of its terms.
    pub energy_drift: f64,
    pub warning: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaOptions {
    pub rtol: f64,
    pub atol: f64,
    /// ω at which the collapse event fires.
    pub omega_eps: f64,
}

impl Default for OmegaOptions {
    fn default() -> Self {
        Self { rtol: 1e-13, atol: 1e-16, omega_eps: 1e-8 }
    }
}

impl OmegaTrajectory {
    fn energy_dev(&self, s: &OmegaSample) -> f64 {
        let ca = self.c_omega * self.alpha;
        let kin = 0.5 * s.omegadot * s.omegadot;
        let pot = ca / s.omega;
        let scale = kin.abs().max(pot.abs()).max(ca.abs());
        (kin + pot - ca).abs() / scale
    }

    /// (ω, ω̇) at time t by cubic Hermite interpolation, using ω̈ = c_ω α/ω².
    pub fn at(&self, t: f64) -> Option<(f64, f64)> {
        let s = &self.samples;
        if t < s[0].t || t > s[s.len() - 1].t {
            return None;
        }
        let i = match s.binary_search_by(|p| p.t.partial_cmp(&t).unwrap()) {
            Ok(i) => return Some((s[i].omega, s[i].omegadot)),
            Err(i) => i - 1,
        };
        let (a, b) = (&s[i], &s[i + 1]);
        let ca = self.c_omega * self.alpha;
        let w = hermite(a.t, b.t, a.omega, b.omega, a.omegadot, b.omegadot, t);
        let wd = hermite(a.t, b.t, a.omegadot, b.omegadot, ca / (a.omega * a.omega), ca / (b.omega * b.omega), t);
        Some((w, wd))
    }
}

/// Cubic Hermite interpolant on [t0, t1].
pub(crate) fn hermite(t0: f64, t1: f64, y0: f64, y1: f64, d0: f64, d1: f64, t: f64) -> f64 {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * d0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * h * d1
}

/// Integrate ω²ω̈ = c_ω α from ω(0) = 1, ω̇(0) = 0 up to `t_end`, or to the
/// collapse for α < 0.
pub fn solve_omega(p: &HomologousParams, t_end: f64, opts: &OmegaOptions) -> Result<OmegaTrajectory> {
    ensure_positive("t_end", t_end)?;
    let ca = p.c_omega() * p.alpha;
    let f = move |_t: f64, x: &[f64; 2]| [x[1], ca / (x[0] * x[0])];
    let mut so = StepOptions::new(opts.rtol, opts.atol);
    so.h_init = Some(1e-4 / ca.abs().sqrt());
    let mut st = Dopri5::new(&f, 0.0, [1.0, 0.0], t_end, so);
    let mut samples = vec![OmegaSample { t: 0.0, omega: 1.0, omegadot: 0.0 }];
    let mut collapse_time = None;
    let mut warning = None;
    while st.t < t_end {
        st.step(t_end)?;
        if st.x[0] <= opts.omega_eps {
            let (te, xe) = st.locate(|_, x| x[0] - opts.omega_eps, 1e-6 * opts.omega_eps);
            samples.push(OmegaSample { t: te, omega: xe[0], omegadot: xe[1] });
            // Near the collapse ω ≈ K(T−t)^{2/3} with K³ = (9/2)c_ω|α|.
            let k = (4.5 * ca.abs()).cbrt();
            collapse_time = Some(te + (xe[0] / k).powf(1.5));
            break;
        }
        samples.push(OmegaSample { t: st.t, omega: st.x[0], omegadot: st.x[1] });
    }
    if p.alpha < 0.0 && collapse_time.is_none() {
        warning = Some(format!("no collapse before t_end = {t_end}"));
    }
    let mut traj =
        OmegaTrajectory { alpha: p.alpha, c_omega: p.c_omega(), samples, collapse_time, energy_drift: 0.0, warning };
    traj.energy_drift = traj.samples.iter().map(|s| traj.energy_dev(s)).fold(0.0, f64::max);
    Ok(traj)
}

/// Self-similar profile (δ₀, η₀) over z = r/ω.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfSimilarProfile {
    pub alpha: f64,
    /// Samples with `r` standing for z.
    pub profile: BallProfile,
}

impl SelfSimilarProfile {
    /// Boundary Z.
    pub fn boundary(&self) -> Option<f64> {
        self.profile.radius
    }

    /// End of the maximal interval when finite.
    pub fn z_max_hint(&self) -> Option<f64> {
        self.profile.r_max_hint
    }

    pub fn samples(&self) -> &[ProfileSample] {
        &self.profile.samples
    }

    /// (δ₀, η₀) at z ∈ [0, Z] by Hermite interpolation.
    pub fn at(&self, z: f64) -> Option<(f64, f64)> {
        let zb = self.boundary()?;
        if !(0.0..=zb).contains(&z) {
            return None;
        }
        let s = &self.profile.samples;
        let i = s.partition_point(|p| p.r <= z);
        if i == 0 {
            return Some((s[0].delta, s[0].eta));
        }
        if i >= s.len() {
            let l = &s[s.len() - 1];
            return Some((l.delta, l.eta));
        }
        let (a, b) = (&s[i - 1], &s[i]);
        Some((
            hermite(a.r, b.r, a.delta, b.delta, a.ddelta, b.ddelta, z),
            hermite(a.r, b.r, a.eta, b.eta, a.deta, b.deta, z),
        ))
    }
}

/// Default profile options: existence horizon z_max = 10³ (rescaled).
pub fn profile_options() -> StaticOptions {
    StaticOptions::default()
}

/// Integrate the self-similar profile from δ₀(0) = η₀(0) = δ₀ᶜ.
pub fn integrate_profile(p: &HomologousParams, opts: &StaticOptions) -> Result<SelfSimilarProfile> {
    let profile = shoot(&p.mat, p.delta0_c, p.alpha, opts, Some(STALL_SLOPE))?;
    Ok(SelfSimilarProfile { alpha: p.alpha, profile })
}

/// Time-parametrized homologous ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomologousBall {
    pub trajectory: OmegaTrajectory,
    pub profile: SelfSimilarProfile,
}

pub fn assemble_solution(traj: OmegaTrajectory, prof: SelfSimilarProfile) -> Result<HomologousBall> {
    if prof.boundary().is_none() {
        return Err(Error::Invalid("profile has no boundary".into()));
    }
    if traj.alpha != prof.alpha {
        return Err(Error::Invalid("trajectory and profile use different α".into()));
    }
    Ok(HomologousBall { trajectory: traj, profile: prof })
}

impl HomologousBall {
    fn omega(&self, t: f64) -> Option<(f64, f64)> {
        self.trajectory.at(t)
    }

    /// R(t) = Zω(t).
    pub fn radius(&self, t: f64) -> Option<f64> {
        Some(self.profile.boundary()? * self.omega(t)?.0)
    }

    /// Ṙ(t) = Zω̇(t).
    pub fn radius_rate(&self, t: f64) -> Option<f64> {
        Some(self.profile.boundary()? * self.omega(t)?.1)
    }

    /// ρ/𝒦 = ω⁻³δ₀(r/ω); zero outside the ball.
    pub fn density(&self, t: f64, r: f64) -> Option<f64> {
        let (w, _) = self.omega(t)?;
        Some(match self.profile.at(r / w) {
            Some((d, _)) => d / (w * w * w),
            None => 0.0,
        })
    }

    /// u = (ω̇/ω)r inside the ball, zero outside.
    pub fn velocity(&self, t: f64, r: f64) -> Option<f64> {
        let (w, wd) = self.omega(t)?;
        Some(if r <= self.radius(t)? { wd / w * r } else { 0.0 })
    }

    /// (F_rad, F_tan) = ω⁻⁴F(δ₀, η₀); zero outside.
    pub fn eos(&self, t: f64, r: f64) -> Option<(f64, f64)> {
        let (w, _) = self.omega(t)?;
        Some(match self.profile.at(r / w) {
            Some((d, e)) => {
                let (fr, ft) = eos_f_sheared(&self.profile.profile.material, d / e, e);
                let w4 = w * w * w * w;
                (fr / w4, ft / w4)
            }
            None => (0.0, 0.0),
        })
    }

    /// Total mass (4π/3)η₀(Z)Z³, independent of t.
    pub fn total_mass(&self) -> f64 {
        let last = self.profile.samples().last().unwrap();
        4.0 * std::f64::consts::PI / 3.0 * last.eta * last.r.powi(3)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub alpha: f64,
    pub nu: f64,
    pub delta_star: f64,
    /// Final bracket: no ball at `lo`, ball at `hi`.
    pub lo: f64,
    pub hi: f64,
}

/// Existence of a zero-boundary-shear homologous ball.
pub fn exists_zero_shear(mat: &Material, alpha: f64, delta0_c: f64, opts: &StaticOptions) -> Result<bool> {
    let mut o = *opts;
    o.classify = false;
    let p = HomologousParams::new(*mat, alpha, delta0_c)?;
    Ok(integrate_profile(&p, &o)?.boundary().is_some())
}

/// Bisect δ₀ᶜ (geometrically, to relative width 10⁻³) on existence of a
/// zero-boundary-shear ball. The default bracket is [|α|, 10⁴|α|].
pub fn find_threshold(alpha: f64, nu: f64, bracket: Option<(f64, f64)>, opts: &StaticOptions) -> Result<Threshold> {
    if alpha >= 0.0 {
        return Err(Error::Invalid("threshold search requires α < 0".into()));
    }
    let mat = Material::zero_shear(nu, GAMMA_HOMOLOGOUS)?;
    let (mut lo, mut hi) = bracket.unwrap_or((alpha.abs(), 1e4 * alpha.abs()));
    let at_lo = exists_zero_shear(&mat, alpha, lo, opts)?;
    let at_hi = exists_zero_shear(&mat, alpha, hi, opts)?;
    if at_lo || !at_hi {
        return Err(Error::NoBracket { lo, hi });
    }
    while hi / lo - 1.0 > 1e-3 {
        let mid = (lo * hi).sqrt();
        if exists_zero_shear(&mat, alpha, mid, opts)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Threshold { alpha, nu, delta_star: (lo * hi).sqrt(), lo, hi })
}
