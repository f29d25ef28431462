//! Eulerian ↔ Lagrangian conversion for radial profiles.
//!
//! The Lagrangian radius of a shell is z = φ(r) = rη^{1/3}, so that
//! (4π/3)z³ is the enclosed mass (𝒦 = 1). The deformation ψ = φ⁻¹ has
//! ψ′ = η^{2/3}/δ = λ₁ and ψ/z = η^{−1/3} = λ₂.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::material::Material;
use crate::static_ball::BallProfile;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformationMap {
    /// Lagrangian radius of the boundary.
    pub z_boundary: f64,
    pub z: Vec<f64>,
    pub psi: Vec<f64>,
    pub dpsi: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StretchPair {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl DeformationMap {
    /// Build from nodes; `z` must start at 0 and increase strictly, and ψ′ > 0.
    pub fn from_samples(z: Vec<f64>, psi: Vec<f64>, dpsi: Vec<f64>) -> Result<Self> {
        if z.len() < 2 || psi.len() != z.len() || dpsi.len() != z.len() {
            return Err(Error::Invalid("deformation map needs ≥ 2 matching nodes".into()));
        }
        if z[0] != 0.0 || psi[0] != 0.0 {
            return Err(Error::Invalid("deformation map must start at the center".into()));
        }
        if let Some(i) = z.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NotMonotone(format!("z decreases at node {}", i + 1)));
        }
        if let Some(i) = psi.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NotMonotone(format!("ψ decreases at node {}", i + 1)));
        }
        if let Some(i) = dpsi.iter().position(|&d| !(d > 0.0)) {
            return Err(Error::NotMonotone(format!("ψ′ ≤ 0 at node {i}")));
        }
        Ok(Self { z_boundary: *z.last().unwrap(), z, psi, dpsi })
    }

    /// ψ(Z).
    pub fn outer_radius(&self) -> f64 {
        *self.psi.last().unwrap()
    }

    /// ψ′(0).
    pub fn center_slope(&self) -> f64 {
        self.dpsi[0]
    }

    /// Monotone interpolant of ψ between nodes.
    pub fn interpolant(&self) -> Result<Pchip> {
        Pchip::new(self.z.clone(), self.psi.clone())
    }

    pub fn stretches(&self) -> Vec<StretchPair> {
        self.z
            .iter()
            .zip(&self.psi)
            .zip(&self.dpsi)
            .map(|((&z, &p), &d)| StretchPair { lambda1: d, lambda2: if z == 0.0 { d } else { p / z } })
            .collect()
    }
}

/// Map a ball profile (center to boundary) to its deformation.
pub fn euler_to_lagrange(profile: &BallProfile) -> Result<DeformationMap> {
    let r_b = profile.radius.ok_or_else(|| Error::Invalid("profile has no boundary".into()))?;
    let mut z = Vec::with_capacity(profile.samples.len());
    let mut psi = Vec::with_capacity(profile.samples.len());
    let mut dpsi = Vec::with_capacity(profile.samples.len());
    for s in &profile.samples {
        if s.r > r_b || s.delta <= 0.0 {
            // A vanishing density at the boundary has no finite stretch.
            continue;
        }
        z.push(s.r * s.eta.cbrt());
        psi.push(s.r);
        dpsi.push(s.eta.cbrt().powi(2) / s.delta);
    }
    DeformationMap::from_samples(z, psi, dpsi)
}

/// Node values (r, δ, η) of the Eulerian profile encoded by a deformation.
pub fn lagrange_to_euler(map: &DeformationMap) -> Result<Vec<(f64, f64, f64)>> {
    map.z
        .iter()
        .zip(&map.psi)
        .zip(&map.dpsi)
        .map(|((&z, &p), &d)| {
            if !(d > 0.0) {
                return Err(Error::NotMonotone("ψ′ ≤ 0".into()));
            }
            if z == 0.0 {
                let c = 1.0 / (d * d * d);
                return Ok((0.0, c, c));
            }
            let q = z / p;
            Ok((p, q * q / d, q * q * q))
        })
        .collect()
}

/// ψ(Z) − y_b·Z·ψ′(Z); `None` when y_b = 0, where the condition degenerates.
pub fn boundary_condition_residual(map: &DeformationMap, mat: &Material) -> Option<f64> {
    let yb = mat.y_b();
    if yb == 0.0 {
        return None;
    }
    let n = map.z.len() - 1;
    Some(map.psi[n] - yb * map.z[n] * map.dpsi[n])
}

/// ∂_tψ for homologous motion ψ_t(z) = ω(t)ψ₀(z).
pub fn homologous_psi_rate(omegadot: f64, psi0: f64) -> f64 {
    omegadot * psi0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(c: f64) -> DeformationMap {
        let s = c.powf(-1.0 / 3.0);
        let z: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let psi = z.iter().map(|z| s * z).collect();
        DeformationMap::from_samples(z, psi, vec![s; 11]).unwrap()
    }

    #[test]
    fn uniform_density_maps() {
        for c in [1.0, 8.0, 0.3] {
            let m = uniform(c);
            for (_, d, e) in lagrange_to_euler(&m).unwrap() {
                assert!((d - c).abs() < 1e-13 * c && (e - c).abs() < 1e-13 * c);
            }
        }
        let id = uniform(1.0);
        assert!(id.z.iter().zip(&id.psi).all(|(a, b)| a == b));
    }

    #[test]
    fn rejects_non_monotone() {
        assert!(DeformationMap::from_samples(vec![0.0, 1.0, 0.5], vec![0.0, 1.0, 2.0], vec![1.0; 3]).is_err());
        assert!(DeformationMap::from_samples(vec![0.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn boundary_residual_negative_control() {
        let m = Material::nondimensional(0.25, 3.0, 2.0).unwrap();
        let map = uniform(1.0);
        let r = boundary_condition_residual(&map, &m).unwrap();
        assert!((r - (1.0 - m.y_b())).abs() < 1e-14);
        let fluid = Material::nondimensional(0.5, 2.0, 2.0).unwrap();
        assert!(boundary_condition_residual(&map, &fluid).is_none());
    }
}
