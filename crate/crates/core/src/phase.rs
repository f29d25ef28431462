//! Autonomous phase-plane form of the static system in (y, v, ξ), with
//! y = δ/η, v = θr²η^{2−γ}y^{1−β}, ξ = ln r.

use serde::{Deserialize, Serialize};

use crate::constitutive::b_over_y;
use crate::error::{ensure_positive, Error, Result};
use crate::material::Material;
use crate::ode::{Dopri5, OdeSystem, StepOptions};

/// Amplitude Ce^{2ξ₀} of the seed of Γ.
/// Seed truncation error grows like amp², rounding in 1 − y like 1/amp.
pub const SEED_AMPLITUDE: f64 = 1e-5;

/// Shear at the sink P, (4−3γ)/(3(2−γ)).
pub fn y_p(gamma: f64) -> f64 {
    (4.0 - 3.0 * gamma) / (3.0 * (2.0 - gamma))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub y: f64,
    pub v: f64,
}

/// Υ(y) = 3(1−y) + 3(β−γ)B(y)y^{−β}.
pub fn upsilon(mat: &Material, y: f64) -> Result<f64> {
    ensure_positive("y", y)?;
    Ok(upsilon_raw(mat, y))
}

pub(crate) fn upsilon_raw(mat: &Material, y: f64) -> f64 {
    let (b, g) = (mat.beta(), mat.gamma());
    if y == 0.0 && b < 1.0 {
        return 3.0 * (1.0 - g) / (1.0 - b);
    }
    3.0 * (1.0 - y) + 3.0 * (b - g) * b_over_y(b, y) * y.powf(1.0 - b)
}

/// Υ′(y) = −3 + 3(β−γ)[(1−β)B(y)y^{−β−1} + 1 − 1/y].
pub fn upsilon_prime(mat: &Material, y: f64) -> f64 {
    let (b, g) = (mat.beta(), mat.gamma());
    -3.0 + 3.0 * (b - g) * ((1.0 - b) * b_over_y(b, y) * y.powf(-b) + 1.0 - 1.0 / y)
}

/// (dy/dξ, dv/dξ).
pub fn vector_field(mat: &Material, s: PhaseState) -> (f64, f64) {
    let u = upsilon_raw(mat, s.y);
    let (b, g) = (mat.beta(), mat.gamma());
    ((u - s.v) * s.y, ((1.0 - b) * (u - s.v) + 2.0 - 3.0 * (2.0 - g) * (1.0 - s.y)) * s.v)
}

/// Analytic Jacobian ∂(ẏ, v̇)/∂(y, v), rows in (y, v) order.
pub fn jacobian(mat: &Material, s: PhaseState) -> [[f64; 2]; 2] {
    let (b, g) = (mat.beta(), mat.gamma());
    let (y, v) = (s.y, s.v);
    let u = upsilon_raw(mat, y);
    // At y = 0 (fixed point Q, β < 1) the terms y·Υ′ and v·Υ′ vanish.
    let (yup, up) = if y == 0.0 { (0.0, 0.0) } else { (y * upsilon_prime(mat, y), upsilon_prime(mat, y)) };
    let vup = if v == 0.0 { 0.0 } else { v * up };
    [
        [yup + u - v, -y],
        [
            (1.0 - b) * vup + 3.0 * (2.0 - g) * v,
            (1.0 - b) * (u - v) + 2.0 - 3.0 * (2.0 - g) * (1.0 - y) - (1.0 - b) * v,
        ],
    ]
}

/// Central-difference Jacobian (one-sided at y = 0 or v = 0).
pub fn jacobian_fd(mat: &Material, s: PhaseState, h: f64) -> [[f64; 2]; 2] {
    let f = |y: f64, v: f64| {
        let (a, b) = vector_field(mat, PhaseState { y, v });
        [a, b]
    };
    let mut j = [[0.0; 2]; 2];
    let hy = h * s.y.abs().max(1.0);
    let hv = h * s.v.abs().max(1.0);
    let (fyp, fym, dy) =
        if s.y > hy { (f(s.y + hy, s.v), f(s.y - hy, s.v), 2.0 * hy) } else { (f(s.y + hy, s.v), f(s.y, s.v), hy) };
    let (fvp, fvm, dv) =
        if s.v > hv { (f(s.y, s.v + hv), f(s.y, s.v - hv), 2.0 * hv) } else { (f(s.y, s.v + hv), f(s.y, s.v), hv) };
    for i in 0..2 {
        j[i][0] = (fyp[i] - fym[i]) / dy;
        j[i][1] = (fvp[i] - fvm[i]) / dv;
    }
    j
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixedPointKind {
    Saddle,
    Sink,
    Source,
    CenterLike,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointRecord {
    pub name: String,
    pub y: f64,
    pub v: f64,
    /// Eigenvalues as (re, im); a complex pair when im ≠ 0.
    pub eigenvalues: [(f64, f64); 2],
    /// Unit eigenvectors in (y, v) order, present for real eigenvalues.
    pub eigenvectors: Option<[[f64; 2]; 2]>,
    pub kind: FixedPointKind,
    /// |F| at the location.
    pub residual: f64,
    /// Max entry difference between analytic and finite-difference Jacobians.
    pub jacobian_mismatch: f64,
}

/// Eigenvalues as (re, im) and, when real, unit eigenvectors.
pub type Eigen2 = ([(f64, f64); 2], Option<[[f64; 2]; 2]>);

/// Eigen-decomposition of a real 2×2 matrix.
pub fn eigen2(j: [[f64; 2]; 2]) -> Eigen2 {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = 0.25 * tr * tr - det;
    if disc < 0.0 {
        let im = (-disc).sqrt();
        return ([(0.5 * tr, im), (0.5 * tr, -im)], None);
    }
    let sq = disc.sqrt();
    // Stable pair: the larger-magnitude root first, the other from det.
    let l1 = if tr >= 0.0 { 0.5 * tr + sq } else { 0.5 * tr - sq };
    let l2 = if l1 != 0.0 { det / l1 } else { 0.5 * tr - sq };
    let (lmax, lmin) = if l1 >= l2 { (l1, l2) } else { (l2, l1) };
    let vec = |l: f64| {
        let a = [j[0][1], l - j[0][0]];
        let b = [l - j[1][1], j[1][0]];
        let na = a[0].hypot(a[1]);
        let nb = b[0].hypot(b[1]);
        let (w, n) = if na >= nb { (a, na) } else { (b, nb) };
        if n == 0.0 {
            [1.0, 0.0]
        } else {
            [w[0] / n, w[1] / n]
        }
    };
    let mut v1 = vec(lmax);
    let mut v2 = vec(lmin);
    if v1 == v2 {
        // Diagonal matrix with distinct eigenvalues.
        if j[0][1] == 0.0 && j[1][0] == 0.0 {
            if (j[0][0] - lmax).abs() <= (j[1][1] - lmax).abs() {
                v1 = [1.0, 0.0];
                v2 = [0.0, 1.0];
            } else {
                v1 = [0.0, 1.0];
                v2 = [1.0, 0.0];
            }
        }
    }
    ([(lmax, 0.0), (lmin, 0.0)], Some([v1, v2]))
}

fn classify(eig: &[(f64, f64); 2]) -> FixedPointKind {
    let (a, b) = (eig[0].0, eig[1].0);
    if eig[0].1 != 0.0 {
        return if a < 0.0 {
            FixedPointKind::Sink
        } else if a > 0.0 {
            FixedPointKind::Source
        } else {
            FixedPointKind::CenterLike
        };
    }
    if a * b < 0.0 {
        FixedPointKind::Saddle
    } else if a < 0.0 && b < 0.0 {
        FixedPointKind::Sink
    } else if a > 0.0 && b > 0.0 {
        FixedPointKind::Source
    } else {
        FixedPointKind::CenterLike
    }
}

fn record(mat: &Material, name: &str, s: PhaseState) -> FixedPointRecord {
    let j = jacobian(mat, s);
    let jf = jacobian_fd(mat, s, 1e-6);
    let mut mismatch: f64 = 0.0;
    for i in 0..2 {
        for k in 0..2 {
            mismatch = mismatch.max((j[i][k] - jf[i][k]).abs());
        }
    }
    let (eigenvalues, eigenvectors) = eigen2(j);
    let f = vector_field(mat, s);
    FixedPointRecord {
        name: name.to_string(),
        y: s.y,
        v: s.v,
        eigenvalues,
        eigenvectors,
        kind: classify(&eigenvalues),
        residual: f.0.hypot(f.1),
        jacobian_mismatch: mismatch,
    }
}

/// Fixed points O = (1, 0), Q = (0, 0) for β < 1, and P = (y_P, Υ(y_P)) when
/// y_P ∈ (0, 1).
pub fn fixed_points(mat: &Material) -> Result<Vec<FixedPointRecord>> {
    if (mat.gamma() - 2.0).abs() < 1e-12 {
        return Err(Error::Unsupported("γ = 2 degenerates the (y, v) chart; use gamma2_shear_profile".into()));
    }
    let mut out = vec![record(mat, "O", PhaseState { y: 1.0, v: 0.0 })];
    if mat.beta() < 1.0 {
        out.push(record(mat, "Q", PhaseState { y: 0.0, v: 0.0 }));
    }
    let yp = y_p(mat.gamma());
    if yp > 0.0 && yp < 1.0 {
        let vp = upsilon_raw(mat, yp);
        out.push(record(mat, "P", PhaseState { y: yp, v: vp }));
    }
    Ok(out)
}

/// ∇·(φF) with the Dulac function φ = v⁻¹y^{β−2}, in closed form.
pub fn dulac_divergence(mat: &Material, s: PhaseState) -> f64 {
    let phi = s.y.powf(mat.beta() - 2.0) / s.v;
    -3.0 * phi * (1.0 - mat.gamma() * (1.0 - s.y))
}

struct PhaseSystem<'a> {
    mat: &'a Material,
}

impl OdeSystem<2> for PhaseSystem<'_> {
    fn rhs(&self, _xi: f64, x: &[f64; 2]) -> [f64; 2] {
        let (a, b) = vector_field(self.mat, PhaseState { y: x[0], v: x[1] });
        [a, b]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitSample {
    pub xi: f64,
    pub y: f64,
    pub v: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseOrbit {
    pub c: f64,
    pub samples: Vec<OrbitSample>,
    /// Where the orbit left 𝒰 = {v > 0, y < 1} or the integrator broke down.
    pub exit: Option<OrbitSample>,
    /// Final distance to P, when P exists.
    pub distance_to_p: Option<f64>,
    /// Set if an accepted step produced y ≥ 1 with v > 0.
    pub invariance_violated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseOptions {
    pub rtol: f64,
    pub atol: f64,
    pub seed_amplitude: f64,
}

impl Default for PhaseOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, seed_amplitude: SEED_AMPLITUDE }
    }
}

/// Point of Γ at Ce^{2ξ} = `amp`, to second order: with s = Ce^{2ξ},
/// v = s + (A/2)s² and 1 − y = v/5 + kv², where A = −(2(1−β) + 3(2−γ))/5
/// and k = (2(1−β) + 3(2−γ) − Υ″(1)/2 − 2)/175.
pub fn gamma_seed(mat: &Material, amp: f64) -> [f64; 2] {
    let (b, g) = (mat.beta(), mat.gamma());
    let h = 1e-4;
    let half_upp = (upsilon_prime(mat, 1.0 + h) - upsilon_prime(mat, 1.0 - h)) / (4.0 * h);
    let lin = 2.0 * (1.0 - b) + 3.0 * (2.0 - g);
    let k = (lin - half_upp - 2.0) / 175.0;
    let v = amp - 0.1 * lin * amp * amp;
    [1.0 - (v / 5.0 + k * v * v), v]
}

/// Track Γ from the seed [`gamma_seed`], 1 − y ∼ (C/5)e^{2ξ}, v ∼ Ce^{2ξ}.
pub fn track_gamma(mat: &Material, c: f64, xi_end: f64) -> Result<PhaseOrbit> {
    Ok(track_gamma_at(mat, c, xi_end, &[], &PhaseOptions::default())?.0)
}

/// As [`track_gamma`], also returning (y, v) at the sorted `queries` in ξ
/// via the integrator's continuous extension, or the seed expansion before
/// the seed point (NaN past an exit).
pub fn track_gamma_at(
    mat: &Material,
    c: f64,
    xi_end: f64,
    queries: &[f64],
    opts: &PhaseOptions,
) -> Result<(PhaseOrbit, Vec<PhaseState>)> {
    ensure_positive("C", c)?;
    if (mat.gamma() - 2.0).abs() < 1e-12 {
        return Err(Error::Unsupported("γ = 2: use gamma2_shear_profile".into()));
    }
    let amp = opts.seed_amplitude;
    let xi0 = 0.5 * (amp / c).ln();
    let x0 = gamma_seed(mat, amp);
    let sys = PhaseSystem { mat };
    let mut so = StepOptions::new(opts.rtol, opts.atol);
    so.h_init = Some(0.01);
    let mut st = Dopri5::new(&sys, xi0, x0, xi_end, so);
    let mut samples = vec![OrbitSample { xi: xi0, y: x0[0], v: x0[1] }];
    let mut out = Vec::with_capacity(queries.len());
    let mut qi = 0;
    while qi < queries.len() && queries[qi] < xi0 {
        let [y, v] = gamma_seed(mat, c * (2.0 * queries[qi]).exp());
        out.push(PhaseState { y, v });
        qi += 1;
    }
    let mut exit = None;
    let mut violated = false;
    while st.t < xi_end {
        if st.step(xi_end).is_err() {
            exit = Some(OrbitSample { xi: st.t, y: st.x[0], v: st.x[1] });
            break;
        }
        while qi < queries.len() && queries[qi] <= st.t {
            let d = st.dense(queries[qi]);
            out.push(PhaseState { y: d[0], v: d[1] });
            qi += 1;
        }
        let (y, v) = (st.x[0], st.x[1]);
        samples.push(OrbitSample { xi: st.t, y, v });
        if y >= 1.0 && v > 0.0 {
            violated = true;
        }
        if y <= 0.0 || v <= 0.0 || violated {
            exit = Some(OrbitSample { xi: st.t, y, v });
            break;
        }
    }
    while out.len() < queries.len() {
        out.push(PhaseState { y: f64::NAN, v: f64::NAN });
    }
    let yp = y_p(mat.gamma());
    let distance_to_p = (yp > 0.0 && yp < 1.0).then(|| {
        let last = samples.last().unwrap();
        (last.y - yp).abs()
    });
    Ok((PhaseOrbit { c, samples, exit, distance_to_p, invariance_violated: violated }, out))
}

/// γ = 2: the shear obeys the decoupled equation y′ = (Υ(y)/r − θry^{1−β})y,
/// started from y = 1 − (θ/5)r² near the center. Returns (r, y) samples up to
/// `r_end` or until y leaves (0, 1).
pub fn gamma2_shear_profile(mat: &Material, r_end: f64) -> Result<Vec<(f64, f64)>> {
    if (mat.gamma() - 2.0).abs() > 1e-12 {
        return Err(Error::Invalid("gamma2_shear_profile requires γ = 2".into()));
    }
    ensure_positive("r_end", r_end)?;
    let theta = mat.theta();
    let beta = mat.beta();
    let f = |r: f64, x: &[f64; 1]| {
        let y = x[0].max(0.0);
        [(upsilon_raw(mat, y) / r - theta * r * y.powf(1.0 - beta)) * y]
    };
    let r0 = 1e-4 / theta.sqrt();
    let y0 = 1.0 - theta * r0 * r0 / 5.0;
    let mut so = StepOptions::new(1e-10, 1e-12);
    so.h_init = Some(0.1 * r0);
    let mut st = Dopri5::new(&f, r0, [y0], r_end, so);
    let mut out = vec![(0.0, 1.0), (r0, y0)];
    while st.t < r_end {
        if st.step(r_end).is_err() {
            break;
        }
        out.push((st.t, st.x[0]));
        if st.x[0] <= 0.0 || st.x[0] >= 1.0 {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(nu: f64, g: f64, b: f64) -> Material {
        Material::nondimensional(nu, g, b).unwrap()
    }

    #[test]
    fn upsilon_values() {
        let m = mat(0.0, 1.0, 0.5);
        assert_eq!(upsilon(&m, 1.0).unwrap(), 0.0);
        let small = upsilon(&m, 1e-12).unwrap();
        assert!((small - 0.0).abs() < 1e-5, "{small}");
        let m = mat(0.0, 0.5, 0.25);
        let lim = 3.0 * 0.5 / 0.75;
        assert!((upsilon(&m, 1e-14).unwrap() - lim).abs() < 1e-8);
        let m = mat(0.1, 1.3, 1.3);
        assert!((upsilon(&m, 0.3).unwrap() - 2.1).abs() < 1e-14);
    }

    #[test]
    fn field_examples() {
        let m = mat(0.0, 1.0, 0.5);
        assert_eq!(vector_field(&m, PhaseState { y: 1.0, v: 0.0 }), (0.0, 0.0));
        let (dy, _) = vector_field(&m, PhaseState { y: 1.0, v: 1.0 });
        assert_eq!(dy, -1.0);
        let yp = y_p(1.0);
        assert!((yp - 1.0 / 3.0).abs() < 1e-16);
        let (a, b) = vector_field(&m, PhaseState { y: yp, v: upsilon_raw(&m, yp) });
        assert!(a.abs() < 1e-14 && b.abs() < 1e-14);
    }

    #[test]
    fn origin_is_saddle_with_eigenvalue_two() {
        let m = mat(0.2, 1.5, 0.7);
        let fps = fixed_points(&m).unwrap();
        let o = &fps[0];
        assert_eq!(o.kind, FixedPointKind::Saddle);
        assert_eq!(o.eigenvalues[0], (2.0, 0.0));
        let v = o.eigenvectors.unwrap()[0];
        assert!((v[1] / v[0] + 5.0).abs() < 1e-14);
        assert!(o.jacobian_mismatch < 1e-6);
        assert!(fixed_points(&mat(0.2, 2.0, 0.7)).is_err());
    }

    #[test]
    fn region_b_sink_and_saddle() {
        let m = mat(0.0, 0.8, 0.5);
        let fps = fixed_points(&m).unwrap();
        let q = fps.iter().find(|f| f.name == "Q").unwrap();
        assert_eq!(q.kind, FixedPointKind::Saddle);
        let p = fps.iter().find(|f| f.name == "P").unwrap();
        assert_eq!(p.kind, FixedPointKind::Sink);
        assert!(p.residual < 1e-12);
        assert!(p.jacobian_mismatch < 1e-6);
    }

    #[test]
    fn gamma_orbit_converges_to_p() {
        let m = mat(0.0, 1.0, 0.5);
        let orbit = track_gamma(&m, 1.0, 30.0).unwrap();
        assert!(orbit.exit.is_none());
        let fps = fixed_points(&m).unwrap();
        let d = orbit.distance_to_p.unwrap();
        assert!(d < 1e-4, "{d} {:?} {:?}", fps, orbit.samples.last());
    }

    #[test]
    fn halving_the_seed_does_not_move_the_orbit() {
        for m in [mat(0.25, 1.5, 1.2), mat(0.0, 0.8, 0.5), mat(-0.5, 0.6, -1.0)] {
            let q = [-1.0, 0.0, 0.5];
            let run = |amp: f64| {
                let o = PhaseOptions { seed_amplitude: amp, ..PhaseOptions::default() };
                track_gamma_at(&m, 1.0, 1.0, &q, &o).unwrap().1
            };
            let d = run(SEED_AMPLITUDE)
                .iter()
                .zip(&run(0.5 * SEED_AMPLITUDE))
                .map(|(a, b)| (a.y - b.y).abs().max((a.v - b.v).abs()))
                .fold(0.0, f64::max);
            assert!(d < 1e-8, "{d}");
        }
    }

    #[test]
    fn dulac_closed_form_matches_differences() {
        let m = mat(0.0, 0.8, 0.4);
        let phi_f = |y: f64, v: f64| {
            let (a, b) = vector_field(&m, PhaseState { y, v });
            let phi = y.powf(m.beta() - 2.0) / v;
            (phi * a, phi * b)
        };
        for (y, v) in [(0.3, 0.7), (0.8, 2.0), (0.5, 0.1)] {
            let h = 1e-6;
            let num = (phi_f(y + h, v).0 - phi_f(y - h, v).0) / (2.0 * h)
                + (phi_f(y, v + h).1 - phi_f(y, v - h).1) / (2.0 * h);
            let cf = dulac_divergence(&m, PhaseState { y, v });
            assert!((num - cf).abs() < 1e-6 * cf.abs().max(1.0));
            assert!(cf < 0.0);
        }
    }

    #[test]
    fn gamma_two_decoupled_shear_decreases() {
        let m = mat(0.25, 2.0, 1.5);
        let p = gamma2_shear_profile(&m, 3.0).unwrap();
        assert!(p.windows(2).all(|w| w[1].1 <= w[0].1));
    }
}
