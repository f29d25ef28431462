//! Parameter-plane scanners and constitutive-inequality rasters.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constitutive::{baker_ericksen, evaluate, strong_be_predicate, BeMode, Svk};
use crate::error::{Error, Result};
use crate::homologous::{find_threshold, Threshold};
use crate::material::{Material, StrainState, INEQUALITY_TOL};
use crate::phase::y_p;
use crate::static_ball::{integrate_static, shoot, BallType, CenterData, StaticOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let a = Self { lo, hi, n };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Invalid(format!("axis resolution must be ≥ 2, got {}", self.n)));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::Invalid(format!("axis range [{}, {}] is not a finite interval", self.lo, self.hi)));
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            return self.hi;
        }
        self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.value(i)).collect()
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }
}

/// Two-dimensional grid with a per-cell wall-clock budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x: Axis,
    pub y: Axis,
    pub cell_timeout_s: Option<f64>,
}

impl GridSpec {
    pub fn new(x: Axis, y: Axis) -> Result<Self> {
        x.validate()?;
        y.validate()?;
        Ok(Self { x, y, cell_timeout_s: None })
    }

    /// Cell centers in row-major order (y outer, x inner).
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut v = Vec::with_capacity(self.x.n * self.y.n);
        for j in 0..self.y.n {
            for i in 0..self.x.n {
                v.push((self.x.value(i), self.y.value(j)));
            }
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "exists-A")]
    ExistsA,
    #[serde(rename = "exists-B")]
    ExistsB,
    #[serde(rename = "none")]
    None,
    #[serde(rename = "inadmissible")]
    Inadmissible,
    #[serde(rename = "timeout")]
    Timeout,
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ExistsA => "exists-A",
            Verdict::ExistsB => "exists-B",
            Verdict::None => "none",
            Verdict::Inadmissible => "inadmissible",
            Verdict::Timeout => "timeout",
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }

    pub fn exists(&self) -> bool {
        matches!(self, Verdict::ExistsA | Verdict::ExistsB)
    }

    fn gray(&self) -> u8 {
        match self {
            Verdict::ExistsA => 255,
            Verdict::ExistsB => 170,
            Verdict::Pass => 255,
            Verdict::None | Verdict::Fail => 0,
            Verdict::Inadmissible => 85,
            Verdict::Timeout => 40,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub x: f64,
    pub y: f64,
    pub verdict: Verdict,
    /// Ball radius when a boundary was found, else the horizon searched.
    pub radius: Option<f64>,
    pub horizon: Option<f64>,
    /// Scalar attached to raster cells (e.g. â or (p̂_tan − p̂_rad)(η − δ)).
    pub value: Option<f64>,
    pub wall_s: f64,
    pub note: Option<String>,
}

impl Cell {
    fn simple(x: f64, y: f64, verdict: Verdict) -> Self {
        Self { x, y, verdict, radius: None, horizon: None, value: None, wall_s: 0.0, note: None }
    }
}

/// A cell contradicting a theorem-guaranteed verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub x: f64,
    pub y: f64,
    pub expected: Verdict,
    pub got: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaStarEstimate {
    pub nu: f64,
    pub gamma_star: Option<f64>,
    /// Final bracket: no ball at `lo`, ball at `hi`.
    pub lo: f64,
    pub hi: f64,
    pub note: Option<String>,
}

impl GammaStarEstimate {
    pub fn uncertainty(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionMap {
    pub x_label: String,
    pub y_label: String,
    pub grid: GridSpec,
    /// Row-major, y outer.
    pub cells: Vec<Cell>,
    pub violations: Vec<Violation>,
    pub gamma_star: Option<GammaStarEstimate>,
}

impl RegionMap {
    pub fn cell(&self, i: usize, j: usize) -> &Cell {
        &self.cells[j * self.grid.x.n + i]
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.cells.iter().filter(|c| c.verdict == v).count()
    }

    pub fn has_timeouts(&self) -> bool {
        self.count(Verdict::Timeout) > 0
    }

    /// Verdicts and radii, the parts that must be reproducible.
    pub fn fingerprint(&self) -> Vec<(Verdict, Option<u64>)> {
        self.cells.iter().map(|c| (c.verdict, c.radius.map(f64::to_bits))).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["x", "y", "verdict", "radius", "horizon", "value", "wall_s", "note"])?;
        let opt = |v: Option<f64>| v.map(crate::output::fmt_f64).unwrap_or_default();
        for c in &self.cells {
            wr.write_record([
                crate::output::fmt_f64(c.x),
                crate::output::fmt_f64(c.y),
                c.verdict.to_string(),
                opt(c.radius),
                opt(c.horizon),
                opt(c.value),
                format!("{:.6}", c.wall_s),
                c.note.clone().unwrap_or_default(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Binary PGM, top row = largest y.
    pub fn write_pgm<W: Write>(&self, mut w: W) -> Result<()> {
        let (nx, ny) = (self.grid.x.n, self.grid.y.n);
        write!(w, "P5\n{nx} {ny}\n255\n")?;
        let mut buf = Vec::with_capacity(nx * ny);
        for j in (0..ny).rev() {
            for i in 0..nx {
                buf.push(self.cell(i, j).verdict.gray());
            }
        }
        w.write_all(&buf)?;
        Ok(())
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Invalid(format!("worker pool: {e}")))
}

/// Cells guaranteed to hold type-A balls: γ > 2, 1 < β ≤ γ.
pub fn in_v_a(gamma: f64, beta: f64) -> bool {
    gamma > 2.0 && beta > 1.0 && beta <= gamma
}

/// Cells guaranteed to hold type-B balls: (0 < γ ≤ β < 1 or β < γ ≤ 1) with
/// y_P below the boundary shear.
pub fn in_v_b(nu: f64, gamma: f64, beta: f64) -> bool {
    let shape = (gamma > 0.0 && gamma <= beta && beta < 1.0) || (beta < gamma && gamma <= 1.0);
    if !shape {
        return false;
    }
    match Material::nondimensional(nu, gamma, beta) {
        Ok(m) => y_p(gamma) < m.y_b(),
        Err(_) => false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaticScanOptions {
    pub solver: StaticOptions,
    pub delta_c: f64,
    /// Samples along the zero-shear line for γ⋆ before bisection.
    pub gamma_star_samples: usize,
    /// Bisection stops when the γ bracket is narrower than this.
    pub gamma_star_tol: f64,
}

impl Default for StaticScanOptions {
    fn default() -> Self {
        Self { solver: StaticOptions::default(), delta_c: 1.0, gamma_star_samples: 100, gamma_star_tol: 1e-3 }
    }
}

fn static_cell(nu: f64, gamma: f64, beta: f64, opts: &StaticScanOptions, timeout: Option<f64>) -> Cell {
    let mat = match Material::nondimensional(nu, gamma, beta) {
        Ok(m) => m,
        Err(_) => return Cell::simple(gamma, beta, Verdict::Inadmissible),
    };
    let mut so = opts.solver;
    so.timeout_s = timeout;
    so.classify = true;
    let t0 = Instant::now();
    let res = CenterData::new(opts.delta_c).and_then(|c| integrate_static(c, &mat, &so));
    let wall_s = t0.elapsed().as_secs_f64();
    let mut cell = Cell::simple(gamma, beta, Verdict::None);
    cell.wall_s = wall_s;
    match res {
        Ok(p) => {
            cell.horizon = Some(p.horizon);
            cell.note = p.warning.clone();
            if let Some(r) = p.radius {
                cell.radius = Some(r);
                cell.verdict = match p.ball_type {
                    BallType::A => Verdict::ExistsA,
                    BallType::B => Verdict::ExistsB,
                    BallType::None => {
                        cell.note = Some("boundary found but type undetermined".into());
                        Verdict::None
                    }
                };
            }
        }
        Err(Error::Timeout { .. }) => cell.verdict = Verdict::Timeout,
        Err(e) => cell.note = Some(format!("solver: {e}")),
    }
    cell
}

/// Existence of a ball with zero boundary shear at β = 3γ(1−ν)/(1+ν).
pub fn zero_shear_exists(nu: f64, gamma: f64, opts: &StaticScanOptions) -> Result<bool> {
    let mat = Material::zero_shear(nu, gamma)?;
    let mut so = opts.solver;
    so.classify = false;
    Ok(shoot(&mat, opts.delta_c, 0.0, &so, None)?.radius.is_some())
}

/// γ⋆(ν): the smallest γ in `range` where the zero-shear line enters the
/// existence region, sampled then refined by bisection.
pub fn estimate_gamma_star(nu: f64, range: (f64, f64), opts: &StaticScanOptions) -> GammaStarEstimate {
    let n = opts.gamma_star_samples.max(2);
    let axis = Axis { lo: range.0, hi: range.1, n };
    let fail = |lo, hi, note: String| GammaStarEstimate { nu, gamma_star: None, lo, hi, note: Some(note) };
    let mut prev: Option<f64> = None;
    for i in 0..n {
        let g = axis.value(i);
        match zero_shear_exists(nu, g, opts) {
            Ok(true) => {
                let Some(mut lo) = prev else {
                    return fail(g, g, "ball exists at the lower end of the range".into());
                };
                let mut hi = g;
                while hi - lo > opts.gamma_star_tol {
                    let mid = 0.5 * (lo + hi);
                    match zero_shear_exists(nu, mid, opts) {
                        Ok(true) => hi = mid,
                        Ok(false) => lo = mid,
                        Err(e) => return fail(lo, hi, format!("bisection: {e}")),
                    }
                }
                return GammaStarEstimate { nu, gamma_star: Some(0.5 * (lo + hi)), lo, hi, note: None };
            }
            Ok(false) => prev = Some(g),
            Err(e) => return fail(g, g, format!("γ = {g}: {e}")),
        }
    }
    fail(range.0, range.1, "no zero-shear ball in range".into())
}

/// Scan the (γ, β) plane at fixed ν. Cells in 𝒱_A / 𝒱_B that disagree with
/// their guaranteed type are recorded as violations.
pub fn scan_static_region(nu: f64, grid: &GridSpec, opts: &StaticScanOptions, workers: usize) -> Result<RegionMap> {
    if !(nu > -1.0 && nu <= 0.5) {
        return Err(Error::Domain { what: "nu", value: nu });
    }
    grid.x.validate()?;
    grid.y.validate()?;
    let pts = grid.points();
    let cells: Vec<Cell> = pool(workers)?
        .install(|| pts.par_iter().map(|&(g, b)| static_cell(nu, g, b, opts, grid.cell_timeout_s)).collect());
    let mut violations = Vec::new();
    for c in &cells {
        if c.verdict == Verdict::Timeout {
            continue;
        }
        let expected = if in_v_a(c.x, c.y) {
            Some(Verdict::ExistsA)
        } else if in_v_b(nu, c.x, c.y) {
            Some(Verdict::ExistsB)
        } else {
            None
        };
        if let Some(e) = expected {
            if c.verdict != e {
                violations.push(Violation { x: c.x, y: c.y, expected: e, got: c.verdict });
            }
        }
    }
    let lo = grid.x.lo.max(1e-3);
    let gamma_star = (lo < grid.x.hi).then(|| estimate_gamma_star(nu, (lo, grid.x.hi), opts));
    Ok(RegionMap { x_label: "gamma".into(), y_label: "beta".into(), grid: *grid, cells, violations, gamma_star })
}

/// γ⋆ at `n` equally spaced ν in `nu_range`.
pub fn scan_gammastar_curve(
    nu_range: (f64, f64),
    n: usize,
    gamma_range: (f64, f64),
    opts: &StaticScanOptions,
    workers: usize,
) -> Result<Vec<GammaStarEstimate>> {
    let axis = Axis::new(nu_range.0, nu_range.1, n)?;
    if !(axis.lo > -1.0 && axis.hi < 0.5) {
        return Err(Error::Invalid("ν range must lie in (−1, 1/2)".into()));
    }
    let nus = axis.values();
    Ok(pool(workers)?.install(|| nus.par_iter().map(|&nu| estimate_gamma_star(nu, gamma_range, opts)).collect()))
}

/// Indices i where γ⋆ fails to increase from sample i to i+1 by more than `slack`.
pub fn gammastar_monotonicity_breaks(curve: &[GammaStarEstimate], slack: f64) -> Vec<usize> {
    curve
        .windows(2)
        .enumerate()
        .filter_map(|(i, w)| match (w[0].gamma_star, w[1].gamma_star) {
            (Some(a), Some(b)) if b < a - slack => Some(i),
            _ => None,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSample {
    pub nu: f64,
    pub alpha: f64,
    pub threshold: Option<Threshold>,
    pub error: Option<String>,
}

/// δ⋆(α, ν) for each ν in `nus` and `n` equally spaced α in `alpha_range` (α < 0).
pub fn scan_homologous_threshold(
    nus: &[f64],
    alpha_range: (f64, f64),
    n: usize,
    opts: &StaticOptions,
    workers: usize,
) -> Result<Vec<ThresholdSample>> {
    let axis = Axis::new(alpha_range.0, alpha_range.1, n)?;
    if axis.hi >= 0.0 {
        return Err(Error::Invalid("α range must be negative".into()));
    }
    let mut jobs = Vec::new();
    for &nu in nus {
        for a in axis.values() {
            jobs.push((nu, a));
        }
    }
    Ok(pool(workers)?.install(|| {
        jobs.par_iter()
            .map(|&(nu, alpha)| match find_threshold(alpha, nu, None, opts) {
                Ok(t) => ThresholdSample { nu, alpha, threshold: Some(t), error: None },
                Err(e) => ThresholdSample { nu, alpha, threshold: None, error: Some(e.to_string()) },
            })
            .collect()
    }))
}

/// (α, ν_i, ν_j) where δ⋆ fails to increase with ν at equal α.
pub fn threshold_ordering_violations(samples: &[ThresholdSample]) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for a in samples {
        for b in samples {
            if a.alpha != b.alpha || a.nu >= b.nu {
                continue;
            }
            if let (Some(ta), Some(tb)) = (&a.threshold, &b.threshold) {
                // Brackets must be ordered, not merely the midpoints.
                if ta.lo >= tb.hi {
                    out.push((a.alpha, a.nu, b.nu));
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RasterModel {
    Polytropic(Material),
    Svk(Svk),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityPredicate {
    Hyperbolicity,
    BakerEricksen,
}

fn raster_value(model: &RasterModel, pred: InequalityPredicate, d: f64, e: f64) -> f64 {
    let st = StrainState { delta: d, eta: e };
    match (model, pred) {
        (RasterModel::Polytropic(m), InequalityPredicate::Hyperbolicity) => evaluate(m, st).a,
        (RasterModel::Polytropic(m), InequalityPredicate::BakerEricksen) => {
            let ev = evaluate(m, st);
            (ev.p_tan - ev.p_rad) * (e - d)
        }
        (RasterModel::Svk(s), InequalityPredicate::Hyperbolicity) => s.eval(st).a,
        (RasterModel::Svk(s), InequalityPredicate::BakerEricksen) => {
            let ev = s.eval(st);
            (ev.p_tan - ev.p_rad) * (e - d)
        }
    }
}

/// Evaluate a constitutive inequality on a (δ, η) window. Hyperbolicity
/// requires â > 0; Baker–Ericksen (p̂_tan − p̂_rad)(η − δ) ≥ 0.
pub fn raster_inequality_region(model: RasterModel, pred: InequalityPredicate, grid: &GridSpec) -> Result<RegionMap> {
    grid.x.validate()?;
    grid.y.validate()?;
    if grid.x.lo <= 0.0 || grid.y.lo <= 0.0 {
        return Err(Error::Invalid("strain window must lie in (0, ∞)²".into()));
    }
    let cells = grid
        .points()
        .into_iter()
        .map(|(d, e)| {
            let v = raster_value(&model, pred, d, e);
            let pass = match pred {
                InequalityPredicate::Hyperbolicity => v > 0.0,
                InequalityPredicate::BakerEricksen => v >= -INEQUALITY_TOL,
            };
            let mut c = Cell::simple(d, e, if pass { Verdict::Pass } else { Verdict::Fail });
            c.value = Some(v);
            c
        })
        .collect();
    Ok(RegionMap {
        x_label: "delta".into(),
        y_label: "eta".into(),
        grid: *grid,
        cells,
        violations: Vec::new(),
        gamma_star: None,
    })
}

/// Sampled strong Baker–Ericksen verdict on the (γ, β) plane, with cells
/// disagreeing with the closed-form predicate recorded as violations.
pub fn raster_strong_be_plane(nu: f64, grid: &GridSpec, workers: usize) -> Result<RegionMap> {
    let pts = grid.points();
    let cells: Vec<Cell> = pool(workers)?.install(|| {
        pts.par_iter()
            .map(|&(g, b)| match Material::nondimensional(nu, g, b) {
                Err(_) => Cell::simple(g, b, Verdict::Inadmissible),
                Ok(m) => {
                    let v = baker_ericksen(&m, BeMode::Strong);
                    let mut c = Cell::simple(g, b, if v.pass { Verdict::Pass } else { Verdict::Fail });
                    c.value = Some(v.min_q);
                    c
                }
            })
            .collect()
    });
    let violations = cells
        .iter()
        .filter(|c| c.verdict != Verdict::Inadmissible)
        .filter_map(|c| {
            let expected = if strong_be_predicate(nu, c.x, c.y) { Verdict::Pass } else { Verdict::Fail };
            (expected != c.verdict).then_some(Violation { x: c.x, y: c.y, expected, got: c.verdict })
        })
        .collect();
    Ok(RegionMap { x_label: "gamma".into(), y_label: "beta".into(), grid: *grid, cells, violations, gamma_star: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_values_hit_endpoints() {
        let a = Axis::new(0.1, 3.0, 30).unwrap();
        let v = a.values();
        assert_eq!(v[0], 0.1);
        assert_eq!(v[29], 3.0);
        assert!(Axis::new(0.0, 1.0, 1).is_err());
        assert!(Axis::new(1.0, f64::INFINITY, 4).is_err());
    }

    #[test]
    fn region_sets() {
        assert!(in_v_a(3.0, 2.0));
        assert!(!in_v_a(2.0, 1.5));
        assert!(in_v_b(0.0, 1.0, 0.5));
        assert!(!in_v_b(0.0, 1.5, 0.5));
    }

    #[test]
    fn svk_raster_mixed_with_pass_at_reference() {
        let g = GridSpec::new(Axis::new(0.1, 3.0, 30).unwrap(), Axis::new(0.1, 3.0, 30).unwrap()).unwrap();
        let svk = RasterModel::Svk(Svk::new(1.0, 0.25).unwrap());
        for pred in [InequalityPredicate::Hyperbolicity, InequalityPredicate::BakerEricksen] {
            let m = raster_inequality_region(svk, pred, &g).unwrap();
            assert!(m.count(Verdict::Pass) > 0 && m.count(Verdict::Fail) > 0);
            let one = raster_inequality_region(
                svk,
                pred,
                &GridSpec::new(Axis::new(0.9, 1.1, 3).unwrap(), Axis::new(0.9, 1.1, 3).unwrap()).unwrap(),
            )
            .unwrap();
            assert_eq!(one.count(Verdict::Pass), 9, "{pred:?}");
        }
    }

    #[test]
    fn polytropic_hyperbolicity_all_pass() {
        let g = GridSpec::new(Axis::new(0.05, 5.0, 25).unwrap(), Axis::new(0.05, 5.0, 25).unwrap()).unwrap();
        let m = Material::nondimensional(0.25, 4.0 / 3.0, 2.0).unwrap();
        let r = raster_inequality_region(RasterModel::Polytropic(m), InequalityPredicate::Hyperbolicity, &g).unwrap();
        assert_eq!(r.count(Verdict::Pass), 625);
    }

    #[test]
    fn pgm_and_csv_shapes() {
        let g = GridSpec::new(Axis::new(0.5, 1.5, 3).unwrap(), Axis::new(0.5, 1.5, 2).unwrap()).unwrap();
        let m = Material::nondimensional(0.25, 2.0, 2.0).unwrap();
        let r = raster_inequality_region(RasterModel::Polytropic(m), InequalityPredicate::BakerEricksen, &g).unwrap();
        let mut pgm = Vec::new();
        r.write_pgm(&mut pgm).unwrap();
        assert!(pgm.starts_with(b"P5\n3 2\n255\n"));
        assert_eq!(pgm.len(), 11 + 6);
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("x,y,verdict,"));
        assert_eq!(text.lines().count(), 7);
    }
}
