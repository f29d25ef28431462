//! Dormand–Prince 5(4) with PI step control, continuous extension and
//! event refinement by exact re-stepping.

// Stage loops index several parallel arrays at once.
#![allow(clippy::needless_range_loop)]

use std::time::Instant;

use crate::error::{Error, Result};

/// Right-hand side of an autonomous-or-not system of dimension `N`.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, x: &[f64; N]) -> [f64; N];
}

impl<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]> OdeSystem<N> for F {
    fn rhs(&self, t: f64, x: &[f64; N]) -> [f64; N] {
        self(t, x)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct StepOptions<const N: usize> {
    pub rtol: f64,
    pub atol: [f64; N],
    pub max_steps: usize,
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub deadline: Option<Instant>,
}

impl<const N: usize> StepOptions<N> {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol: [atol; N], max_steps: 2_000_000, h_init: None, h_max: f64::INFINITY, deadline: None }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[inline]
fn comb<const N: usize>(x: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *x;
    for i in 0..N {
        let mut acc = 0.0;
        for (a, k) in terms {
            acc += a * k[i];
        }
        out[i] += h * acc;
    }
    out
}

/// Stages of one step: returns (x1, k7, error estimate, k2..k6).
struct Stages<const N: usize> {
    x1: [f64; N],
    k: [[f64; N]; 7],
    err: [f64; N],
}

fn stages<const N: usize, S: OdeSystem<N> + ?Sized>(sys: &S, t: f64, x: &[f64; N], k1: &[f64; N], h: f64) -> Stages<N> {
    let k2 = sys.rhs(t + C2 * h, &comb(x, h, &[(A21, k1)]));
    let k3 = sys.rhs(t + C3 * h, &comb(x, h, &[(A31, k1), (A32, &k2)]));
    let k4 = sys.rhs(t + C4 * h, &comb(x, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = sys.rhs(t + C5 * h, &comb(x, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = sys.rhs(t + h, &comb(x, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
    let x1 = comb(x, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = sys.rhs(t + h, &x1);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    Stages { x1, k: [*k1, k2, k3, k4, k5, k6, k7], err }
}

/// Counters reported alongside solutions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SolverStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// Stateful stepper. Each call to [`Dopri5::step`] advances by one accepted step.
pub struct Dopri5<'a, S: OdeSystem<N> + ?Sized, const N: usize> {
    sys: &'a S,
    opts: StepOptions<N>,
    pub t: f64,
    pub x: [f64; N],
    k1: [f64; N],
    h: f64,
    err_prev: f64,
    // data of the last accepted step
    pub t_prev: f64,
    pub x_prev: [f64; N],
    k1_prev: [f64; N],
    cont: [[f64; N]; 5],
    pub stats: SolverStats,
}

impl<'a, S: OdeSystem<N> + ?Sized, const N: usize> Dopri5<'a, S, N> {
    pub fn new(sys: &'a S, t0: f64, x0: [f64; N], dir_end: f64, opts: StepOptions<N>) -> Self {
        let k1 = sys.rhs(t0, &x0);
        let mut me = Self {
            sys,
            opts,
            t: t0,
            x: x0,
            k1,
            h: 0.0,
            err_prev: 1e-4,
            t_prev: t0,
            x_prev: x0,
            k1_prev: k1,
            cont: [[0.0; N]; 5],
            stats: SolverStats { rhs_evals: 1, ..Default::default() },
        };
        let dir = (dir_end - t0).signum();
        me.h = match opts.h_init {
            Some(h) => h.abs() * dir,
            None => me.initial_step(dir),
        };
        me
    }

    fn scale(&self, i: usize, a: f64, b: f64) -> f64 {
        self.opts.atol[i] + self.opts.rtol * a.abs().max(b.abs())
    }

    fn initial_step(&mut self, dir: f64) -> f64 {
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..N {
            let sk = self.scale(i, self.x[i], self.x[i]);
            d0 += (self.x[i] / sk).powi(2);
            d1 += (self.k1[i] / sk).powi(2);
        }
        let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(self.opts.h_max);
        let x1 = comb(&self.x, h0 * dir, &[(1.0, &self.k1)]);
        let k2 = self.sys.rhs(self.t + h0 * dir, &x1);
        self.stats.rhs_evals += 1;
        let mut d2 = 0.0;
        for i in 0..N {
            let sk = self.scale(i, self.x[i], self.x[i]);
            d2 += ((k2[i] - self.k1[i]) / sk).powi(2);
        }
        let d2 = (d2 / N as f64).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
        (100.0 * h0).min(h1).min(self.opts.h_max) * dir
    }

    pub fn rhs_now(&self) -> [f64; N] {
        self.k1
    }

    /// One accepted step, never passing `t_end`.
    pub fn step(&mut self, t_end: f64) -> Result<()> {
        let dir = self.h.signum();
        if let Some(dl) = self.opts.deadline {
            if self.stats.accepted.is_multiple_of(32) && Instant::now() > dl {
                return Err(Error::Timeout { at: self.t });
            }
        }
        loop {
            if self.stats.accepted + self.stats.rejected >= self.opts.max_steps {
                return Err(Error::TooManySteps { at: self.t, steps: self.opts.max_steps });
            }
            let mut h = self.h;
            if (self.t + h - t_end) * dir > 0.0 {
                h = t_end - self.t;
            }
            if h.abs() <= 1e-15 * self.t.abs().max(1e-300) || h == 0.0 {
                return Err(Error::StepUnderflow { at: self.t, state: self.x.to_vec() });
            }
            let st = stages(self.sys, self.t, &self.x, &self.k1, h);
            self.stats.rhs_evals += 6;
            let mut e2 = 0.0;
            let mut finite = true;
            for i in 0..N {
                if !st.x1[i].is_finite() || !st.k[6][i].is_finite() {
                    finite = false;
                }
                let sk = self.scale(i, self.x[i], st.x1[i]);
                e2 += (st.err[i] / sk).powi(2);
            }
            let err = (e2 / N as f64).sqrt();
            if !finite || !err.is_finite() {
                self.stats.rejected += 1;
                self.h = h * 0.25;
                continue;
            }
            if err <= 1.0 {
                // PI controller (Gustafsson).
                let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * self.err_prev.powf(0.4 / 5.0);
                let fac = fac.clamp(0.2, 10.0);
                self.err_prev = err.max(1e-4);
                self.t_prev = self.t;
                self.x_prev = self.x;
                self.k1_prev = self.k1;
                let k = &st.k;
                for i in 0..N {
                    let dx = st.x1[i] - self.x[i];
                    let bspl = h * k[0][i] - dx;
                    self.cont[0][i] = self.x[i];
                    self.cont[1][i] = dx;
                    self.cont[2][i] = bspl;
                    self.cont[3][i] = dx - h * k[6][i] - bspl;
                    self.cont[4][i] =
                        h * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * k[6][i]);
                }
                self.t += h;
                self.x = st.x1;
                self.k1 = st.k[6];
                self.stats.accepted += 1;
                let hn = (h * fac).abs().min(self.opts.h_max);
                self.h = hn * dir;
                return Ok(());
            }
            self.stats.rejected += 1;
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            self.h = h * fac;
        }
    }

    /// Continuous extension inside the last accepted step.
    pub fn dense(&self, t: f64) -> [f64; N] {
        let h = self.t - self.t_prev;
        if h == 0.0 {
            return self.x;
        }
        let s = (t - self.t_prev) / h;
        let s1 = 1.0 - s;
        let c = &self.cont;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i])));
        }
        out
    }

    /// Exact single step of length `t − t_prev` from the start of the last step.
    pub fn restep(&self, t: f64) -> [f64; N] {
        stages(self.sys, self.t_prev, &self.x_prev, &self.k1_prev, t - self.t_prev).x1
    }

    /// Locate a sign change of `g` inside the last step by bisection on exact
    /// re-steps. Stops when `|g| ≤ gtol` or the bracket is at machine width.
    pub fn locate<G: Fn(f64, &[f64; N]) -> f64>(&self, g: G, gtol: f64) -> (f64, [f64; N]) {
        let (mut a, mut b) = (self.t_prev, self.t);
        let ga = g(a, &self.x_prev);
        let mut best = (b, self.x);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            let xm = self.restep(m);
            let gm = g(m, &xm);
            best = (m, xm);
            if gm.abs() <= gtol {
                break;
            }
            if (gm > 0.0) == (ga > 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        best
    }

    /// Restart the integration from (t, x), e.g. after an event.
    pub fn reset(&mut self, t: f64, x: [f64; N]) {
        self.t = t;
        self.x = x;
        self.k1 = self.sys.rhs(t, &x);
        self.stats.rhs_evals += 1;
        self.t_prev = t;
        self.x_prev = x;
        self.k1_prev = self.k1;
    }
}
