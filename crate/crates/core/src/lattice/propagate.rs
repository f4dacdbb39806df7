use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::{Grid, WaveField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// One Strang step per `dt`; second order.
    Strang,
    /// Triple-jump composition of three Strang steps; fourth order.
    #[default]
    TripleJump,
}

impl Scheme {
    fn weights(self) -> &'static [f64] {
        const W1: f64 = 1.351_207_191_959_657_8; // 1 / (2 - 2^{1/3})
        const W0: f64 = -1.702_414_383_919_315_3; // 1 - 2 W1
        match self {
            Scheme::Strang => &[1.0],
            Scheme::TripleJump => &[W1, W0, W1],
        }
    }
}

/// Split-operator propagator for `K + W` with `K = -d^2/dx^2` and `W = v + g |psi|^2`.
///
/// The Strang factor is `e^{-i W h/2} e^{-i K h} e^{-i W h/2}`. The kinetic
/// factor is exact in the sine basis of the box, applied through an FFT of the
/// odd extension of length `2(n + 1)`. The nonlinear phase leaves `|psi|`
/// unchanged, so each potential half step is exact and every scheme is
/// time-symmetric.
pub struct SplitStep {
    grid: Grid,
    potential: Vec<f64>,
    g: f64,
    dt: f64,
    scheme: Scheme,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// `q_m^2` for each FFT bin.
    q2: Vec<f64>,
    /// Kinetic phases for each sub-step weight of the scheme.
    kinetic_phase: Vec<Vec<Complex64>>,
    /// Linear potential half-step phases for each sub-step weight.
    potential_phase: Vec<Vec<Complex64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl SplitStep {
    pub fn new(grid: Grid, potential: Vec<f64>, g: f64, dt: f64) -> Result<Self> {
        Self::with_scheme(grid, potential, g, dt, Scheme::default())
    }

    pub fn with_scheme(grid: Grid, potential: Vec<f64>, g: f64, dt: f64, scheme: Scheme) -> Result<Self> {
        if potential.len() != grid.n {
            return Err(Error::DimensionMismatch {
                expected: grid.n,
                found: potential.len(),
            });
        }
        if !(dt.is_finite() && dt > 0.0) || !g.is_finite() || potential.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!("bad propagator inputs (dt = {dt}, g = {g})")));
        }
        let m = 2 * (grid.n + 1);
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        let length = grid.length();
        let q2: Vec<f64> = (0..m)
            .map(|k| {
                let q = PI * k.min(m - k) as f64 / length;
                q * q
            })
            .collect();
        let mut s = Self {
            grid,
            potential,
            g,
            dt,
            scheme,
            forward,
            inverse,
            q2,
            kinetic_phase: Vec::new(),
            potential_phase: Vec::new(),
            buf: vec![Complex64::default(); m],
            scratch: vec![Complex64::default(); scratch_len],
        };
        s.set_dt(dt);
        Ok(s)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    fn set_dt(&mut self, dt: f64) {
        self.dt = dt;
        self.kinetic_phase = self
            .scheme
            .weights()
            .iter()
            .map(|w| self.q2.iter().map(|&q2| Complex64::from_polar(1.0, -q2 * w * dt)).collect())
            .collect();
        self.potential_phase = self
            .scheme
            .weights()
            .iter()
            .map(|w| self.potential.iter().map(|&v| Complex64::from_polar(1.0, -0.5 * v * w * dt)).collect())
            .collect();
    }

    fn load_odd(&mut self, psi: &[Complex64]) {
        let n = self.grid.n;
        let m = self.buf.len();
        self.buf[0] = Complex64::default();
        self.buf[n + 1] = Complex64::default();
        for (k, &z) in psi.iter().enumerate() {
            self.buf[k + 1] = z;
            self.buf[m - k - 1] = -z;
        }
    }

    fn kinetic(&mut self, psi: &mut [Complex64], sub: usize) {
        self.load_odd(psi);
        self.forward.process_with_scratch(&mut self.buf, &mut self.scratch);
        for (z, p) in self.buf.iter_mut().zip(&self.kinetic_phase[sub]) {
            *z *= p;
        }
        self.inverse.process_with_scratch(&mut self.buf, &mut self.scratch);
        let scale = 1.0 / self.buf.len() as f64;
        for (k, z) in psi.iter_mut().enumerate() {
            *z = self.buf[k + 1] * scale;
        }
    }

    fn half_potential(&self, psi: &mut [Complex64], sub: usize, h: f64) {
        let table = &self.potential_phase[sub];
        if self.g == 0.0 {
            for (z, p) in psi.iter_mut().zip(table) {
                *z *= p;
            }
        } else {
            for (z, p) in psi.iter_mut().zip(table) {
                *z *= p * Complex64::from_polar(1.0, -self.g * z.norm_sqr() * h);
            }
        }
    }

    pub fn step(&mut self, psi: &mut [Complex64]) {
        for (sub, &w) in self.scheme.weights().iter().enumerate() {
            let h = 0.5 * w * self.dt;
            self.half_potential(psi, sub, h);
            self.kinetic(psi, sub);
            self.half_potential(psi, sub, h);
        }
    }

    /// Mean-field energy `<K> + <v> + (g/2) integral |psi|^4`, in `E_R`.
    pub fn energy(&mut self, psi: &WaveField) -> f64 {
        let n = self.grid.n;
        self.load_odd(&psi.values);
        self.forward.process_with_scratch(&mut self.buf, &mut self.scratch);
        // The odd extension transforms to -2i times the sine coefficients.
        let dx = self.grid.dx;
        let kinetic: f64 = (1..=n).map(|k| self.q2[k] * self.buf[k].norm_sqr()).sum::<f64>() * dx * dx
            / (2.0 * self.grid.length());
        let (pot, quartic) = psi
            .values
            .iter()
            .zip(&self.potential)
            .fold((0.0, 0.0), |(p, q), (z, &v)| {
                let r = z.norm_sqr();
                (p + v * r, q + r * r)
            });
        kinetic + (pot + 0.5 * self.g * quartic) * dx
    }

    /// Advances `psi` by `round(t_end / dt)` steps.
    ///
    /// `observer` sees the state at `t = 0`, after every `every` steps and at the
    /// end. A non-finite norm at an observation point aborts the run.
    pub fn propagate(
        &mut self,
        psi: &mut WaveField,
        t_end: f64,
        every: usize,
        mut observer: impl FnMut(f64, &WaveField),
    ) -> Result<()> {
        if psi.grid != self.grid {
            return Err(Error::DimensionMismatch {
                expected: self.grid.n,
                found: psi.grid.n,
            });
        }
        if !(t_end.is_finite() && t_end >= 0.0) {
            return Err(Error::InvalidConfig(format!("bad end time {t_end}")));
        }
        let every = every.max(1);
        let steps = (t_end / self.dt).round() as usize;
        observer(0.0, psi);
        for k in 1..=steps {
            self.step(&mut psi.values);
            if k % every == 0 || k == steps {
                let t = k as f64 * self.dt;
                let norm = psi.norm();
                if !norm.is_finite() {
                    return Err(Error::NumericalBreakdown(format!(
                        "non-finite norm {norm} at t = {t} (step {k})"
                    )));
                }
                observer(t, psi);
            }
        }
        Ok(())
    }
}
