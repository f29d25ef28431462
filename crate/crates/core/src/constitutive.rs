//! Closed-form evaluation of the polytropic elastic family, the
//! Saint Venant–Kirchhoff comparison model, and the constitutive
//! inequality checkers.
//!
//! All pressures are returned in the units of κ; the strain variables are
//! δ = ρ/𝒦 and η, the normalized mean density, with shear y = δ/η.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Result};
use crate::material::{Material, StrainState, EPS_BRANCH, INEQUALITY_TOL, Y_ISOTROPIC_EPS};

// ---------------------------------------------------------------------------
// Numerical kernels
// ---------------------------------------------------------------------------

/// ln y, accurate near y = 1.
#[inline]
pub(crate) fn ln_acc(y: f64) -> f64 {
    if (y - 1.0).abs() < 0.5 {
        (y - 1.0).ln_1p()
    } else {
        y.ln()
    }
}

/// (y^p − 1)/p given L = ln y, with the p → 0 limit L.
#[inline]
pub(crate) fn lnp(p: f64, l: f64) -> f64 {
    if p.abs() < EPS_BRANCH {
        l * (1.0 + 0.5 * p * l)
    } else {
        (p * l).exp_m1() / p
    }
}

/// B(y)/y = lnp(β, y) − lnp(β−1, y).
///
/// Near y = 1 the difference cancels to O(L²), so a power series in L is used.
/// At y = 0 the value is the limit 1/(β(β−1)), finite for β > 1.
pub(crate) fn b_over_y(beta: f64, y: f64) -> f64 {
    if y == 0.0 {
        return if beta > 1.0 { 1.0 / (beta * (beta - 1.0)) } else { f64::INFINITY };
    }
    let l = ln_acc(y);
    let bm1 = beta - 1.0;
    let m = beta.abs().max(bm1.abs()).max(1.0);
    if (l * m).abs() < 0.5 {
        // Σ_{k≥2} (β^{k−1} − (β−1)^{k−1}) L^k / k!
        let mut sum = 0.0;
        let mut pb = beta;
        let mut pbm1 = bm1;
        let mut lk = l;
        let mut fact = 1.0;
        for k in 2..60 {
            lk *= l;
            fact *= k as f64;
            let term = (pb - pbm1) * lk / fact;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            pb *= beta;
            pbm1 *= bm1;
        }
        sum
    } else {
        lnp(beta, l) - lnp(bm1, l)
    }
}

/// (y^β − 1)/(y − 1), with the limit β at y = 1.
fn pow_ratio(beta: f64, y: f64) -> f64 {
    let d = y - 1.0;
    if d.abs() < Y_ISOTROPIC_EPS {
        return beta * (1.0 + 0.5 * (beta - 1.0) * d);
    }
    (beta * ln_acc(y)).exp_m1() / d
}

// ---------------------------------------------------------------------------
// Shear functions
// ---------------------------------------------------------------------------

/// A shear function S with S(1) = S′(1) = 0 and S″(1) = (1−ν)/(1+ν).
pub trait ShearFunction {
    fn value(&self, y: f64) -> f64;
    fn derivative(&self, y: f64) -> f64;
}

/// The canonical single-parameter shear function of the polytropic family.
#[derive(Clone, Copy, Debug)]
pub struct CanonicalShear {
    c: f64,
    beta: f64,
}

impl CanonicalShear {
    pub fn new(mat: &Material) -> Self {
        Self { c: mat.c(), beta: mat.beta() }
    }
}

impl ShearFunction for CanonicalShear {
    fn value(&self, y: f64) -> f64 {
        // c[(y^{β−1} − 1)/(β(β−1)) + (y^{−1} − 1)/β], with the β = 1 limit
        // c(ln y + 1/y − 1) reached continuously through lnp.
        let l = ln_acc(y);
        self.c * (lnp(self.beta - 1.0, l) + (-l).exp_m1()) / self.beta
    }

    fn derivative(&self, y: f64) -> f64 {
        self.c * lnp(self.beta, ln_acc(y)) / (y * y)
    }
}

/// Shear function S(y) of the canonical instance.
pub fn shear_s(mat: &Material, y: f64) -> Result<f64> {
    ensure_positive("y", y)?;
    Ok(CanonicalShear::new(mat).value(y))
}

/// f_rad(y) = (1−ν)/(1+ν) · (y^β − 1)/β.
pub fn f_rad(mat: &Material, y: f64) -> Result<f64> {
    ensure_positive("y", y)?;
    Ok(mat.c() * lnp(mat.beta(), ln_acc(y)))
}

/// f_tan = f_rad + 3(1−γ)·y·S(y) for an arbitrary shear function, with
/// f_rad = y²S′(y).
pub fn f_tan_from_s<S: ShearFunction + ?Sized>(mat: &Material, s: &S, y: f64) -> Result<f64> {
    ensure_positive("y", y)?;
    Ok(y * y * s.derivative(y) + 3.0 * (1.0 - mat.gamma()) * y * s.value(y))
}

/// Pressures of the generic hyperelastic scale-invariant family built from
/// a shear function `s`.
pub fn p_hat_from_shear<S: ShearFunction + ?Sized>(mat: &Material, s: &S, st: StrainState) -> Result<(f64, f64)> {
    let y = st.y();
    let fr = y * y * s.derivative(y);
    let ft = f_tan_from_s(mat, s, y)?;
    let eg = st.eta.powf(mat.gamma());
    let g = lnp(mat.gamma(), ln_acc(st.eta));
    let k = mat.kappa();
    let p_rad = k * (3.0 * fr * eg + g);
    let p_tan = k * (-1.5 * (ft + 1.0 - y) * eg + g);
    Ok((p_rad, p_tan))
}

// ---------------------------------------------------------------------------
// Polytropic family
// ---------------------------------------------------------------------------

/// B(y) ≥ 0, vanishing only at y = 1.
pub fn b_func(mat: &Material, y: f64) -> Result<f64> {
    ensure_positive("y", y)?;
    Ok(y * b_over_y(mat.beta(), y))
}

/// Q(y); p_tan − p_rad = 3κ(1−y)Q(y)η^γ.
pub fn q_func(mat: &Material, y: f64) -> Result<f64> {
    ensure_positive("y", y)?;
    Ok(q_raw(mat, y))
}

pub(crate) fn q_raw(mat: &Material, y: f64) -> f64 {
    if (y - 1.0).abs() < Y_ISOTROPIC_EPS {
        return mat.q_iso();
    }
    let (b, g, c) = (mat.beta(), mat.gamma(), mat.c());
    if (b - 1.0).abs() < EPS_BRANCH {
        let ylny_over = -y * ln_acc(y) / (y - 1.0);
        1.5 * (g - 1.0) * c * ylny_over + 1.5 * g * c - 0.5
    } else {
        1.5 * (b - g) * c / (b * (b - 1.0)) * pow_ratio(b, y) + 1.5 * (g - 1.0) * c / (b - 1.0) - 0.5
    }
}

/// Pressures (p_rad, p_tan) at (δ, η).
pub fn p_hat(mat: &Material, st: StrainState) -> (f64, f64) {
    p_hat_sheared(mat, st.y(), st.eta)
}

/// Pressures in shear coordinates (y, η). On the ray y = y_b this returns
/// exactly −κ/γ for every η.
pub fn p_hat_sheared(mat: &Material, y: f64, eta: f64) -> (f64, f64) {
    let (b, g, k) = (mat.beta(), mat.gamma(), mat.kappa());
    let eg = eta.powf(g);
    let yb = mat.y_b();
    let shear = if y == yb { 0.0 } else { (y.powf(b) - mat.y_b_pow_beta()) / b };
    let p_rad = k * (3.0 * mat.c() * shear * eg - 1.0 / g);
    let p_tan = p_rad + 3.0 * k * (1.0 - y) * q_raw(mat, y) * eg;
    (p_rad, p_tan)
}

/// Ball equation of state F = κ/γ + p.
pub fn eos_f(mat: &Material, st: StrainState) -> (f64, f64) {
    eos_f_sheared(mat, st.y(), st.eta)
}

pub fn eos_f_sheared(mat: &Material, y: f64, eta: f64) -> (f64, f64) {
    let (b, k) = (mat.beta(), mat.kappa());
    let eg = eta.powf(mat.gamma());
    // κ/γ + p_rad = 3κc·y_b^β·((y/y_b)^β − 1)/β·η^γ, or 3κc·y^β/β·η^γ if y_b = 0.
    let f_rad = if mat.y_b() > 0.0 {
        let l = ln_acc(y / mat.y_b());
        3.0 * k * mat.c() * mat.y_b_pow_beta() * lnp(b, l) * eg
    } else {
        3.0 * k * mat.c() * y.powf(b) / b * eg
    };
    let f_tan = f_rad + 3.0 * k * (1.0 - y) * q_raw(mat, y) * eg;
    (f_rad, f_tan)
}

/// â = ∂_δ p_rad = 3κc·y^{β−1}η^{γ−1} > 0.
pub fn coeff_a(mat: &Material, st: StrainState) -> f64 {
    3.0 * mat.kappa() * mat.c() * st.y().powf(mat.beta() - 1.0) * st.eta.powf(mat.gamma() - 1.0)
}

/// The nonsingular product b̂·(η−δ) = 9κc(β−γ)B(y)η^γ.
pub fn coeff_b_times(mat: &Material, st: StrainState) -> f64 {
    let y = st.y();
    9.0 * mat.kappa() * mat.c() * (mat.beta() - mat.gamma()) * y * b_over_y(mat.beta(), y) * st.eta.powf(mat.gamma())
}

/// Stored energy ŵ(δ, η), evaluated branch by branch in (γ, β).
pub fn stored_energy(mat: &Material, st: StrainState) -> f64 {
    let (d, e) = (st.delta, st.eta);
    let y = d / e;
    let (b, g) = (mat.beta(), mat.gamma());
    let c3 = 3.0 * mat.c();
    let gamma_one = (g - 1.0).abs() < EPS_BRANCH;
    let beta_one = (b - 1.0).abs() < EPS_BRANCH;
    let w = match (gamma_one, beta_one) {
        (false, false) => {
            e.powf(g - 1.0)
                * (c3 / (b * (b - 1.0)) * y.powf(b - 1.0) + (c3 / b - 1.0 / g) / y + 1.0 / (g - 1.0) - c3 / (b - 1.0))
                + 1.0 / (g * d)
                - 1.0 / (g - 1.0)
        }
        (true, false) => {
            c3 / (b * (b - 1.0)) * y.powf(b - 1.0) + (c3 / b - 1.0) / y - c3 / (b - 1.0) - y.ln() + 1.0 / d + d.ln()
        }
        (false, true) => {
            e.powf(g - 1.0) * ((c3 - 1.0 / g) / y + c3 * (y.ln() - 1.0) + 1.0 / (g - 1.0)) + 1.0 / (g * d)
                - 1.0 / (g - 1.0)
        }
        (true, true) => 2.0 * mat.q_iso() * (1.0 / y + y.ln()) - c3 + 1.0 / d + d.ln(),
    };
    mat.kappa() * w
}

/// Polytropic fluid stored energy (κ/γ)((δ^{γ−1} − 1)/(γ−1) + 1/δ − 1).
pub fn w_pf(mat: &Material, delta: f64) -> f64 {
    let g = mat.gamma();
    mat.p_ref() * (lnp(g - 1.0, ln_acc(delta)) + 1.0 / delta - 1.0)
}

/// Every constitutive quantity at one strain state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstitutiveEval {
    pub p_rad: f64,
    pub p_tan: f64,
    pub a: f64,
    pub b_times: f64,
    pub w: f64,
    pub q: f64,
    pub b: f64,
}

pub fn evaluate(mat: &Material, st: StrainState) -> ConstitutiveEval {
    let y = st.y();
    let (p_rad, p_tan) = p_hat(mat, st);
    ConstitutiveEval {
        p_rad,
        p_tan,
        a: coeff_a(mat, st),
        b_times: coeff_b_times(mat, st),
        w: stored_energy(mat, st),
        q: q_raw(mat, y),
        b: y * b_over_y(mat.beta(), y),
    }
}

// ---------------------------------------------------------------------------
// Saint Venant–Kirchhoff
// ---------------------------------------------------------------------------

/// Saint Venant–Kirchhoff model in the radial reduction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Svk {
    pub kappa: f64,
    pub nu: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvkEval {
    pub w: f64,
    pub p_rad: f64,
    pub p_tan: f64,
    pub a: f64,
}

impl Svk {
    pub fn new(kappa: f64, nu: f64) -> Result<Self> {
        ensure_positive("kappa", kappa)?;
        if !(nu > -1.0 && nu <= 0.5) {
            return Err(crate::error::Error::Inadmissible(format!("Poisson ratio must lie in (-1, 1/2], got {nu}")));
        }
        Ok(Self { kappa, nu })
    }

    fn coeffs(&self) -> (f64, f64, f64) {
        let n = self.nu;
        (3.0 * (1.0 - n) / (8.0 * (1.0 + n)), 3.0 * n / (2.0 * (1.0 + n)), 3.0 / (4.0 * (1.0 + n)))
    }

    pub fn eval(&self, st: StrainState) -> SvkEval {
        let (a1, a2, a3) = self.coeffs();
        let (d, e) = (st.delta, st.eta);
        let e13 = e.cbrt();
        let e23 = e13 * e13;
        let e43 = e * e13;
        let e83 = e43 * e43;
        let (d1, d2) = (1.0 / d, 1.0 / (d * d));
        let d3 = d1 * d2;
        let d4 = d2 * d2;
        let w = a1 * e83 * d4 + a2 * e23 * d2 + a3 / e43 - 0.75 * e43 * d2 - 1.5 / e23 + 1.125;
        let p_rad = -4.0 * a1 * e83 * d3 - 2.0 * a2 * e23 * d1 + 1.5 * e43 * d1;
        let tan_shift = 4.0 * a1 * e83 * d3 + a2 * e23 * d1 - 2.0 * a3 * d / e43 - 1.5 * e43 * d1 + 1.5 * d / e23;
        let a = 12.0 * a1 * e83 * d4 + 2.0 * a2 * e23 * d2 - 1.5 * e43 * d2;
        let k = self.kappa;
        SvkEval { w: k * w, p_rad: k * p_rad, p_tan: k * (p_rad + tan_shift), a: k * a }
    }
}

// ---------------------------------------------------------------------------
// Pressure models and checkers
// ---------------------------------------------------------------------------

/// Anything that maps (δ, η) to (p_rad, p_tan).
pub trait PressureModel {
    fn pressures(&self, delta: f64, eta: f64) -> (f64, f64);
}

impl PressureModel for Material {
    fn pressures(&self, delta: f64, eta: f64) -> (f64, f64) {
        p_hat_sheared(self, delta / eta, eta)
    }
}

impl PressureModel for Svk {
    fn pressures(&self, delta: f64, eta: f64) -> (f64, f64) {
        let e = self.eval(StrainState { delta, eta });
        (e.p_rad, e.p_tan)
    }
}

/// Adapter turning a closure into a [`PressureModel`].
pub struct FnModel<F>(pub F);

impl<F: Fn(f64, f64) -> (f64, f64)> PressureModel for FnModel<F> {
    fn pressures(&self, delta: f64, eta: f64) -> (f64, f64) {
        (self.0)(delta, eta)
    }
}

/// Closed rectangle in the (δ, η) plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrainBox {
    pub delta: (f64, f64),
    pub eta: (f64, f64),
}

impl StrainBox {
    pub fn square(lo: f64, hi: f64) -> Self {
        Self { delta: (lo, hi), eta: (lo, hi) }
    }

    /// `n × n` tensor grid, geometrically spaced.
    pub fn grid(&self, n: usize) -> Vec<StrainState> {
        let axis = |(lo, hi): (f64, f64)| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    let t = if n == 1 { 0.5 } else { i as f64 / (n - 1) as f64 };
                    lo * (hi / lo).powf(t)
                })
                .collect()
        };
        let (ds, es) = (axis(self.delta), axis(self.eta));
        ds.iter().flat_map(|&delta| es.iter().map(move |&eta| StrainState { delta, eta })).collect()
    }
}

impl StrainBox {
    /// `n` states drawn log-uniformly from the box with a seeded generator.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<StrainState> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |(lo, hi): (f64, f64)| lo * (hi / lo).powf(rng.gen::<f64>());
        (0..n)
            .map(|_| {
                let delta = draw(self.delta);
                let eta = draw(self.eta);
                StrainState { delta, eta }
            })
            .collect()
    }
}

/// max − min of p̂_rad on the boundary shear y = y_b over the given η.
pub fn cbs_spread(mat: &Material, etas: &[f64]) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &e in etas {
        let p = p_hat_sheared(mat, mat.y_b(), e).0;
        lo = lo.min(p);
        hi = hi.max(p);
    }
    hi - lo
}

/// Partials (∂_δp_rad, ∂_ηp_rad, ∂_δp_tan, ∂_ηp_tan) at (1, 1) in closed form.
pub fn linearization(mat: &Material) -> [f64; 4] {
    let (k, nu) = (mat.kappa(), mat.nu());
    [3.0 * k * mat.c(), -2.0 * k * mat.q_iso(), 3.0 * k * nu / (1.0 + nu), k * mat.q_iso()]
}

/// The same partials by fourth-order central differences with step `h`.
pub fn linearization_fd(mat: &Material, h: f64) -> [f64; 4] {
    let p = |d: f64, e: f64| p_hat(mat, StrainState { delta: d, eta: e });
    [d4(|x| p(x, 1.0).0, 1.0, h), d4(|x| p(1.0, x).0, 1.0, h), d4(|x| p(x, 1.0).1, 1.0, h), d4(|x| p(1.0, x).1, 1.0, h)]
}

/// Fourth-order central difference.
fn d4(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// max |∂_η h₁ − ∂_δ h₂| over an `n × n` grid of `bx`, where
/// h₁ = δ⁻²p_rad and h₂ = (2/3)(δη)⁻¹(p_tan − p_rad), by fourth-order
/// central differences with relative step `h`.
pub fn check_hyperelastic_exactness<M: PressureModel + ?Sized>(model: &M, bx: StrainBox, n: usize, h: f64) -> f64 {
    let h1 = |d: f64, e: f64| model.pressures(d, e).0 / (d * d);
    let h2 = |d: f64, e: f64| {
        let (pr, pt) = model.pressures(d, e);
        2.0 * (pt - pr) / (3.0 * d * e)
    };
    bx.grid(n)
        .into_iter()
        .map(|s| {
            let (d, e) = (s.delta, s.eta);
            let (hd, he) = (h * d, h * e);
            let dh1 = d4(|x| h1(d, x), e, he);
            let dh2 = d4(|x| h2(x, e), d, hd);
            (dh1 - dh2).abs()
        })
        .fold(0.0, f64::max)
}

/// Relative scale-invariance residuals of â and b̂·(η−δ).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleResidual {
    pub a: f64,
    pub b: f64,
}

pub fn check_scale_invariance(mat: &Material, samples: &[StrainState], eps: f64) -> ScaleResidual {
    let g = mat.gamma();
    let mut res = ScaleResidual { a: 0.0, b: 0.0 };
    for &s in samples {
        let scaled = StrainState { delta: eps * s.delta, eta: eps * s.eta };
        let a0 = coeff_a(mat, s);
        let a1 = eps.powf(1.0 - g) * coeff_a(mat, scaled);
        res.a = res.a.max((a1 - a0).abs() / a0);
        let b0 = coeff_b_times(mat, s);
        let b1 = eps.powf(-g) * coeff_b_times(mat, scaled);
        // b̂·(η−δ) shares the units of â·η, which also guards the zero at y = 1.
        let scale = b0.abs().max(a0 * s.eta);
        res.b = res.b.max((b1 - b0).abs() / scale);
    }
    res
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeMode {
    Weak,
    Strong,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeVerdict {
    pub pass: bool,
    /// Smallest sampled value of Q.
    pub min_q: f64,
    /// Shear at which Q < −tol, when the check fails.
    pub witness: Option<f64>,
}

/// Samples per mode in [`baker_ericksen`].
pub const BE_SAMPLES: usize = 4001;

/// Sampled Baker–Ericksen check, Q(y) ≥ −tol.
///
/// Weak mode samples y ∈ [10⁻³, 1]. Strong mode samples [10⁻³, 10³] and
/// additionally the log range |ln y| ≤ 600/max(1, |β|, |β−1|): for β close to
/// γ or to 1 the sign of Q is only decided at extreme shear.
pub fn baker_ericksen(mat: &Material, mode: BeMode) -> BeVerdict {
    let mut ls: Vec<f64> = Vec::with_capacity(3 * BE_SAMPLES);
    let l3 = 1e3f64.ln();
    let push_range = |ls: &mut Vec<f64>, lo: f64, hi: f64| {
        for i in 0..BE_SAMPLES {
            ls.push(lo + (hi - lo) * i as f64 / (BE_SAMPLES - 1) as f64);
        }
    };
    match mode {
        BeMode::Weak => push_range(&mut ls, -l3, 0.0),
        BeMode::Strong => {
            push_range(&mut ls, -l3, l3);
            let m = mat.beta().abs().max((mat.beta() - 1.0).abs()).max(1.0);
            let lmax = 600.0 / m;
            push_range(&mut ls, -lmax, lmax);
        }
    }
    let mut min_q = f64::INFINITY;
    let mut arg = 1.0;
    for l in ls {
        let y = l.exp();
        let q = q_raw(mat, y);
        if q.is_finite() && q < min_q {
            min_q = q;
            arg = y;
        }
    }
    let pass = min_q >= -INEQUALITY_TOL;
    BeVerdict { pass, min_q, witness: (!pass).then_some(arg) }
}

/// Analytic strong Baker–Ericksen / non-negative energy predicate
/// β ≥ min(γ, 3cγ − 2(1−2ν)/(1+ν)).
pub fn strong_be_predicate(nu: f64, gamma: f64, beta: f64) -> bool {
    let c = (1.0 - nu) / (1.0 + nu);
    let q = (1.0 - 2.0 * nu) / (1.0 + nu);
    beta >= gamma.min(3.0 * c * gamma - 2.0 * q)
}

/// Sampled non-negativity of the stored energy: weak mode on η ≥ δ, strong
/// mode on the whole box. Returns (pass, min w, argmin).
pub fn energy_nonnegative(mat: &Material, mode: BeMode, bx: StrainBox, n: usize) -> (bool, f64, StrainState) {
    let mut min_w = f64::INFINITY;
    let mut arg = StrainState { delta: 1.0, eta: 1.0 };
    for s in bx.grid(n) {
        if mode == BeMode::Weak && s.eta < s.delta {
            continue;
        }
        let w = stored_energy(mat, s) / mat.kappa();
        if w < min_w {
            min_w = w;
            arg = s;
        }
    }
    (min_w >= -INEQUALITY_TOL, min_w, arg)
}
