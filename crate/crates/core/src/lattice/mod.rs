//! One-dimensional optical lattice with a position-dependent depth.
//!
//! Dimensionless units: lengths in `1/k` (`x = k * x_phys`, one well spans
//! `pi`), energies in the recoil energy `E_R = hbar^2 k^2 / 2m`, times in
//! `hbar / E_R`. The governing equation is
//! `i dpsi/dt = [-d^2/dx^2 + s(j) cos^2(x) + g |psi|^2] psi` with hard walls at
//! `x = 0` and `x = V * pi`.

mod experiment;
mod grid;
mod propagate;

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use experiment::{
    convergence_gate, damping_time, find_hitting_peak, run_transfer_experiment, HittingPeak, TracePoint,
    TransferReport, CONVERGENCE_LIMIT,
};
pub use grid::{build_potential, initial_packet, mirror_fidelity, Grid, WaveField};
pub use propagate::{Scheme, SplitStep};

/// Depth below which the tight-binding formulas are not trusted.
pub const TIGHT_BINDING_MIN_DEPTH: f64 = 5.0;
/// Coarsest accepted spatial resolution.
pub const MIN_POINTS_PER_WELL: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// `s = s0 + a j^2`.
    Quadratic,
    /// `s = s0 + a w^2 (1 - exp(-j^2 / w^2))`, same curvature as the quadratic at the center.
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    /// Number of wells `V`.
    pub sites: usize,
    pub s0: f64,
    /// Depth curvature per site squared.
    pub a: f64,
    pub profile: Profile,
    /// Gaussian width `w` in sites; defaults to `(V - 1) / 2`.
    pub profile_width: Option<f64>,
    /// Effective 1D interaction strength.
    pub g: f64,
    pub points_per_well: usize,
    pub dt: f64,
    /// Packet center, in wells relative to the lattice center.
    pub j0: f64,
    /// Gaussian envelope width in wells.
    pub packet_width: f64,
    /// Propagation window for the hitting time, in multiples of the theory time.
    pub window: f64,
    /// Continue to this many theory times to fit the damping of revivals.
    pub damping_until: Option<f64>,
    /// Fidelity samples per `hbar / E_R`.
    pub samples_per_unit: f64,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            sites: 101,
            s0: 5.0,
            a: 1e-3,
            profile: Profile::Quadratic,
            profile_width: None,
            g: 0.0,
            points_per_well: 16,
            dt: 0.0125,
            j0: 10.0,
            packet_width: 3.0,
            window: 1.5,
            damping_until: None,
            samples_per_unit: 2.0,
        }
    }
}

fn positive(what: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what,
            value: x.to_string(),
            range: "(0, inf)",
        })
    }
}

impl LatticeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 sites, got {}", self.sites)));
        }
        if self.points_per_well < MIN_POINTS_PER_WELL {
            return Err(Error::InvalidConfig(format!(
                "grid too coarse: {} points per well, need at least {MIN_POINTS_PER_WELL}",
                self.points_per_well
            )));
        }
        positive("s0", self.s0)?;
        positive("dt", self.dt)?;
        positive("packet_width", self.packet_width)?;
        positive("window", self.window)?;
        positive("samples_per_unit", self.samples_per_unit)?;
        if let Some(w) = self.profile_width {
            positive("profile_width", w)?;
        }
        if let Some(d) = self.damping_until {
            positive("damping_until", d)?;
        }
        if !self.a.is_finite() || !self.g.is_finite() || !self.j0.is_finite() {
            return Err(Error::InvalidConfig("a, g and j0 must be finite".into()));
        }
        let (lo, _) = self.depth_range();
        if lo <= 0.0 {
            return Err(Error::InvalidConfig(format!("lattice depth drops to {lo} inside the lattice")));
        }
        let reach = self.j0.abs() + 3.0 * self.packet_width;
        if reach > self.half_span() {
            return Err(Error::InvalidConfig(format!(
                "packet at j0 = {} with width {} overlaps the hard wall (reach {reach}, half span {})",
                self.j0,
                self.packet_width,
                self.half_span()
            )));
        }
        Ok(())
    }

    /// Non-fatal advisories: shallow wells and strong interactions.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let (lo, _) = self.depth_range();
        if lo < TIGHT_BINDING_MIN_DEPTH {
            out.push(format!("minimum depth {lo:.3} is below {TIGHT_BINDING_MIN_DEPTH}; tight-binding estimates are unreliable"));
        }
        if self.g.abs() > 1.0 {
            out.push(format!("g = {} exceeds 1; mean-field description is suspect", self.g));
        }
        out
    }

    /// Distance in wells from the center to the outermost well.
    pub fn half_span(&self) -> f64 {
        (self.sites as f64 - 1.0) / 2.0
    }

    pub fn gaussian_width(&self) -> f64 {
        self.profile_width.unwrap_or_else(|| self.half_span().max(1.0))
    }

    /// Lattice depth at well coordinate `j` (continuous, relative to the center).
    pub fn depth(&self, j: f64) -> f64 {
        match self.profile {
            Profile::Quadratic => self.s0 + self.a * j * j,
            Profile::Gaussian => {
                let w = self.gaussian_width();
                self.s0 + self.a * w * w * (1.0 - (-(j * j) / (w * w)).exp())
            }
        }
    }

    /// Smallest and largest depth over the lattice.
    pub fn depth_range(&self) -> (f64, f64) {
        // Both profiles are monotone in |j|.
        let (c, e) = (self.depth(0.0), self.depth(self.sites as f64 / 2.0));
        (c.min(e), c.max(e))
    }

    pub fn theory_time(&self) -> Result<f64> {
        theoretical_hitting_time(self.sites, self.s0)
    }
}

/// Tight-binding tunneling `tau(s) = sqrt((16/pi) s^{3/2} e^{-4 sqrt(s)})` in `E_R`.
pub fn tunneling_amplitude(s: f64) -> Result<f64> {
    positive("s", s)?;
    Ok((16.0 / PI * s.powf(1.5) * (-4.0 * s.sqrt()).exp()).sqrt())
}

/// Closed-form transfer time `(V+1)(pi^{3/2}/16) s^{-3/4} e^{2 sqrt(s)}` in `hbar / E_R`.
pub fn theoretical_hitting_time(sites: usize, s: f64) -> Result<f64> {
    if sites < 2 {
        return Err(Error::OutOfRange {
            what: "sites",
            value: sites.to_string(),
            range: "[2, inf)",
        });
    }
    positive("s", s)?;
    let v1 = sites as f64 + 1.0;
    let t = v1 * PI.powf(1.5) / 16.0 * s.powf(-0.75) * (2.0 * s.sqrt()).exp();
    let via_tau = PI / (2.0 * tunneling_amplitude(s)?) * v1 / 2.0;
    if ((t - via_tau) / t).abs() > 1e-12 {
        return Err(Error::NumericalBreakdown(format!(
            "hitting-time identity violated: {t} vs {via_tau}"
        )));
    }
    Ok(t)
}

/// Exact lowest-band tunneling of a uniform `s cos^2(x)` lattice, from the band width.
///
/// Plane waves `e^{i(2l+q)x}` with `|l| <= 15`; the band spans `q` in `[0, 1]`
/// and equals `4J` wide.
pub fn band_tunneling(s: f64) -> Result<f64> {
    positive("s", s)?;
    let lowest = |q: f64| {
        let n = 31;
        let h = DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                let k = 2.0 * (r as f64 - 15.0) + q;
                k * k + s / 2.0
            } else if r.abs_diff(c) == 1 {
                s / 4.0
            } else {
                0.0
            }
        });
        SymmetricEigen::new(h).eigenvalues.min()
    };
    Ok((lowest(1.0) - lowest(0.0)) / 4.0)
}

/// Linear fit `ln tau_b^2 = c0 + c1 * j_b^2` over the bond midpoints `j_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `sqrt(-1/slope)`: the `j` where `tau^2 ~ W^2 - j^2` would vanish, to first order.
    pub implied_half_width: Option<f64>,
}

/// Tight-binding couplings of neighbouring wells, using the depth at each bond midpoint.
pub fn effective_couplings(config: &LatticeConfig) -> Result<Vec<(f64, f64)>> {
    let h = config.half_span();
    (1..config.sites)
        .map(|b| {
            let j = b as f64 - 0.5 - h;
            Ok((j, tunneling_amplitude(config.depth(j))?))
        })
        .collect()
}

/// Regression of `ln tau^2` against `j^2` for bonds with `|j| <= max_j`.
pub fn coupling_regression(config: &LatticeConfig, max_j: f64) -> Result<CouplingFit> {
    let pts: Vec<(f64, f64)> = effective_couplings(config)?
        .into_iter()
        .filter(|(j, _)| j.abs() <= max_j)
        .map(|(j, t)| (j * j, (t * t).ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InvalidConfig(format!("only {} bonds within |j| <= {max_j}", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(CouplingFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        implied_half_width: (slope < 0.0).then(|| (-1.0 / slope).sqrt()),
    })
}

/// Conversion from the dimensionless units to SI for a given atom and laser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalUnits {
    pub mass_kg: f64,
    pub wavelength_m: f64,
}

const HBAR: f64 = 1.054_571_817e-34;
const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

impl PhysicalUnits {
    /// Rubidium-87 in an 800 nm lattice.
    pub fn rb87_800nm() -> Self {
        Self {
            mass_kg: 86.909_180_527 * ATOMIC_MASS_UNIT,
            wavelength_m: 800e-9,
        }
    }

    pub fn recoil_energy_joule(&self) -> f64 {
        let k = 2.0 * PI / self.wavelength_m;
        HBAR * HBAR * k * k / (2.0 * self.mass_kg)
    }

    /// Seconds per `hbar / E_R`.
    pub fn time_unit_seconds(&self) -> f64 {
        HBAR / self.recoil_energy_joule()
    }

    pub fn to_milliseconds(&self, t: f64) -> f64 {
        t * self.time_unit_seconds() * 1e3
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tunneling_regression_value() {
        let t5 = tunneling_amplitude(5.0).unwrap();
        let direct = ((16.0 / PI) * 5f64.powf(1.5) * (-4.0 * 5f64.sqrt()).exp()).sqrt();
        assert_eq!(t5, direct);
        assert_relative_eq!(t5, 0.086_196_293_379_157_95, max_relative = 1e-14);
        assert!(tunneling_amplitude(0.0).is_err());
        assert!(tunneling_amplitude(-1.0).is_err());
    }

    #[test]
    fn tunneling_monotone_and_ratio() {
        let mut prev = f64::INFINITY;
        for k in 0..200 {
            let t = tunneling_amplitude(1.0 + 0.25 * k as f64).unwrap();
            assert!(t < prev);
            prev = t;
        }
        let r = tunneling_amplitude(5.0).unwrap().powi(2) / tunneling_amplitude(6.0).unwrap().powi(2);
        let formula = (5f64 / 6.0).powf(1.5) * (4.0 * (6f64.sqrt() - 5f64.sqrt())).exp();
        assert_relative_eq!(r, formula, max_relative = 1e-13);
    }

    #[test]
    fn hitting_time_formula() {
        let t = theoretical_hitting_time(101, 5.0).unwrap();
        let tau = tunneling_amplitude(5.0).unwrap();
        assert_relative_eq!(t, PI / (2.0 * tau) * 51.0, max_relative = 1e-12);
        assert_relative_eq!(theoretical_hitting_time(2, 5.0).unwrap(), 3.0 * PI / (4.0 * tau), max_relative = 1e-12);
        let ts: Vec<f64> = (2..50).map(|v| theoretical_hitting_time(v, 5.0).unwrap()).collect();
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
        assert!(theoretical_hitting_time(1, 5.0).is_err());
    }

    #[test]
    fn rubidium_conversion() {
        let u = PhysicalUnits::rb87_800nm();
        // hbar / E_R = 2m / (hbar k^2).
        let k = 2.0 * PI / 800e-9;
        assert_relative_eq!(u.time_unit_seconds(), 2.0 * u.mass_kg / (HBAR * k * k), max_relative = 1e-12);
        let ms = u.to_milliseconds(theoretical_hitting_time(101, 5.0).unwrap());
        assert!((ms - 40.0).abs() < 0.15 * 40.0, "{ms}");
    }

    #[test]
    fn depth_profiles() {
        let mut c = LatticeConfig { a: 0.0, ..Default::default() };
        assert!((-50..=50).all(|j| c.depth(j as f64) == 5.0));
        c.a = 1e-3;
        assert_relative_eq!(c.depth(50.0), 7.5, max_relative = 1e-15);
        let g = LatticeConfig { profile: Profile::Gaussian, ..c.clone() };
        for j in -10..=10 {
            let (q, gs) = (c.depth(j as f64), g.depth(j as f64));
            assert!((q - gs).abs() / q < 0.01);
        }
    }

    #[test]
    fn validation() {
        assert!(LatticeConfig::default().validate().is_ok());
        let bad = [
            LatticeConfig { points_per_well: 8, ..Default::default() },
            LatticeConfig { j0: 45.0, ..Default::default() },
            LatticeConfig { sites: 1, ..Default::default() },
            LatticeConfig { dt: 0.0, ..Default::default() },
            LatticeConfig { a: -1.0, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
        assert!(LatticeConfig::default().warnings().is_empty());
        let w = LatticeConfig { s0: 3.0, g: 2.0, ..Default::default() }.warnings();
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn band_tunneling_against_formula() {
        // Deep lattices approach the asymptotic formula.
        let ratio = |s: f64| band_tunneling(s).unwrap() / tunneling_amplitude(s).unwrap();
        assert_relative_eq!(band_tunneling(5.0).unwrap(), 0.066_052_813_807, max_relative = 1e-9);
        assert!(ratio(5.0) < ratio(10.0) && ratio(10.0) < ratio(20.0));
        assert!((ratio(30.0) - 1.0).abs() < 0.15);
    }

    #[test]
    fn edge_tunneling_is_suppressed() {
        let c = LatticeConfig::default();
        let fit = coupling_regression(&c, 20.0).unwrap();
        assert!(fit.slope < 0.0);
        assert!(fit.r_squared > 0.999);
        let w = fit.implied_half_width.unwrap();
        assert!(w > 30.0 && w < 60.0, "{w}");
        let flat = coupling_regression(&LatticeConfig { a: 0.0, ..c }, 20.0).unwrap();
        assert_eq!(flat.slope, 0.0);
        assert!(flat.implied_half_width.is_none());
    }
}
