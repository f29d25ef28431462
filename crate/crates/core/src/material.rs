//! Material parameters and the strain state they act on.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// Width of the window around β = 1 and γ = 1 in which the logarithmic
/// branches replace the generic closed forms.
pub const EPS_BRANCH: f64 = 1e-7;

/// Tolerance used by the inequality checkers on κ-normalized quantities.
pub const INEQUALITY_TOL: f64 = 1e-10;

/// Half-width of the window around y = 1 in which `Q` returns its limit.
pub const Y_ISOTROPIC_EPS: f64 = 1e-8;

/// Raw parameter record, used for (de)serialization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    #[serde(default = "one")]
    pub kappa: f64,
    pub nu: f64,
    pub gamma: f64,
    pub beta: f64,
    #[serde(default = "one")]
    pub theta: f64,
}

fn one() -> f64 {
    1.0
}

/// An admissible member of the polytropic elastic family.
///
/// `theta` is the nondimensional gravitational coupling; it is irrelevant to
/// the constitutive evaluators and only enters the ball solvers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MaterialParams", into = "MaterialParams")]
pub struct Material {
    kappa: f64,
    nu: f64,
    gamma: f64,
    beta: f64,
    theta: f64,
    c: f64,
    yb_pow_beta: f64,
    yb: f64,
}

impl Material {
    pub fn new(kappa: f64, nu: f64, gamma: f64, beta: f64, theta: f64) -> Result<Self> {
        ensure_positive("kappa", kappa)?;
        ensure_positive("gamma", gamma)?;
        ensure_positive("theta", theta)?;
        if !(nu > -1.0 && nu <= 0.5) {
            return Err(Error::Inadmissible(format!("Poisson ratio must lie in (-1, 1/2], got {nu}")));
        }
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::Inadmissible(format!("shear exponent must be finite with β ≠ 0, got {beta}")));
        }
        let c = (1.0 - nu) / (1.0 + nu);
        let bmax = 3.0 * gamma * c;
        if beta > bmax * (1.0 + 4.0 * f64::EPSILON) {
            return Err(Error::Inadmissible(format!("β = {beta} exceeds the bound β ≤ 3γ(1−ν)/(1+ν) = {bmax}")));
        }
        let yb_pow_beta = (1.0 - beta / bmax).max(0.0);
        let yb = if yb_pow_beta == 0.0 { 0.0 } else { yb_pow_beta.powf(1.0 / beta) };
        Ok(Self { kappa, nu, gamma, beta, theta, c, yb_pow_beta, yb })
    }

    /// Nondimensional material: κ = 1, θ = 1.
    pub fn nondimensional(nu: f64, gamma: f64, beta: f64) -> Result<Self> {
        Self::new(1.0, nu, gamma, beta, 1.0)
    }

    /// The zero boundary shear member β = 3γ(1−ν)/(1+ν).
    pub fn zero_shear(nu: f64, gamma: f64) -> Result<Self> {
        Self::nondimensional(nu, gamma, Self::max_beta(nu, gamma))
    }

    pub fn with_theta(self, theta: f64) -> Result<Self> {
        Self::new(self.kappa, self.nu, self.gamma, self.beta, theta)
    }

    pub fn with_kappa(self, kappa: f64) -> Result<Self> {
        Self::new(kappa, self.nu, self.gamma, self.beta, self.theta)
    }

    /// Upper admissible bound 3γ(1−ν)/(1+ν) on β.
    pub fn max_beta(nu: f64, gamma: f64) -> f64 {
        3.0 * gamma * (1.0 - nu) / (1.0 + nu)
    }

    pub fn is_admissible(nu: f64, gamma: f64, beta: f64) -> bool {
        Self::nondimensional(nu, gamma, beta).is_ok()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// (1−ν)/(1+ν).
    pub fn c(&self) -> f64 {
        self.c
    }

    /// (1−2ν)/(1+ν), the isotropic value of `Q`.
    pub fn q_iso(&self) -> f64 {
        (1.0 - 2.0 * self.nu) / (1.0 + self.nu)
    }

    /// Boundary shear y_b.
    pub fn y_b(&self) -> f64 {
        self.yb
    }

    /// y_b^β, kept separately so the CBS ray is evaluated without rounding.
    pub fn y_b_pow_beta(&self) -> f64 {
        self.yb_pow_beta
    }

    /// Reference pressure κ/γ.
    pub fn p_ref(&self) -> f64 {
        self.kappa / self.gamma
    }

    pub fn params(&self) -> MaterialParams {
        MaterialParams { kappa: self.kappa, nu: self.nu, gamma: self.gamma, beta: self.beta, theta: self.theta }
    }
}

impl TryFrom<MaterialParams> for Material {
    type Error = Error;
    fn try_from(p: MaterialParams) -> Result<Self> {
        Material::new(p.kappa, p.nu, p.gamma, p.beta, p.theta)
    }
}

impl From<Material> for MaterialParams {
    fn from(m: Material) -> Self {
        m.params()
    }
}

/// A point (δ, η) of the Eulerian strain plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrainState {
    pub delta: f64,
    pub eta: f64,
}

impl StrainState {
    pub fn new(delta: f64, eta: f64) -> Result<Self> {
        ensure_positive("delta", delta)?;
        ensure_positive("eta", eta)?;
        Ok(Self { delta, eta })
    }

    pub fn y(&self) -> f64 {
        self.delta / self.eta
    }
}
