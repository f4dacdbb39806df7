use std::f64::consts::PI;

use num_complex::Complex64;

use super::LatticeConfig;
use crate::error::{Error, Result};

/// Interior points `x_i = (i + 1) dx`, `i < n`, of the box `[0, (n + 1) dx]`.
///
/// The wavefunction vanishes at both walls, which are not stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub dx: f64,
}

impl Grid {
    pub fn new(n: usize, dx: f64) -> Result<Self> {
        if n == 0 || !(dx.is_finite() && dx > 0.0) {
            return Err(Error::InvalidConfig(format!("bad grid: n = {n}, dx = {dx}")));
        }
        Ok(Self { n, dx })
    }

    pub fn length(&self) -> f64 {
        (self.n + 1) as f64 * self.dx
    }

    pub fn x(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.dx
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.x(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl WaveField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::DimensionMismatch {
                expected: grid.n,
                found: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    /// `integral |psi|^2 dx`.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm });
        }
        let s = norm.sqrt().recip();
        self.values.iter_mut().for_each(|z| *z *= s);
        Ok(())
    }

    /// `<phi|psi> = integral conj(phi) psi dx`.
    pub fn overlap(&self, other: &WaveField) -> Result<Complex64> {
        self.check_grid(other)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.dx)
    }

    pub fn mean_position(&self) -> f64 {
        let num: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, z)| self.grid.x(i) * z.norm_sqr())
            .sum();
        num * self.grid.dx / self.norm()
    }

    pub fn position_spread(&self) -> f64 {
        let m = self.mean_position();
        let var: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, z)| (self.grid.x(i) - m).powi(2) * z.norm_sqr())
            .sum();
        (var * self.grid.dx / self.norm()).sqrt()
    }

    /// Probability in each well `[m pi, (m + 1) pi)`; points on a boundary are split evenly.
    pub fn site_populations(&self) -> Vec<f64> {
        let wells = (self.grid.length() / PI).round() as usize;
        let mut pops = vec![0.0; wells.max(1)];
        let last = pops.len() - 1;
        for (i, z) in self.values.iter().enumerate() {
            let p = z.norm_sqr() * self.grid.dx;
            let u = self.grid.x(i) / PI;
            let r = u.round();
            if (u - r).abs() < 1e-9 && r >= 1.0 && (r as usize) <= last {
                pops[r as usize - 1] += 0.5 * p;
                pops[r as usize] += 0.5 * p;
            } else {
                pops[(u.floor() as usize).min(last)] += p;
            }
        }
        pops
    }

    /// Spatial reflection about the box center.
    pub fn reflected(&self) -> WaveField {
        let mut values = self.values.clone();
        values.reverse();
        WaveField { grid: self.grid, values }
    }

    fn check_grid(&self, other: &WaveField) -> Result<()> {
        if self.grid.n != other.grid.n {
            return Err(Error::DimensionMismatch {
                expected: self.grid.n,
                found: other.grid.n,
            });
        }
        if self.grid.dx != other.grid.dx {
            return Err(Error::InvalidConfig(format!(
                "grid spacing mismatch: {} vs {}",
                self.grid.dx, other.grid.dx
            )));
        }
        Ok(())
    }
}

/// `|<reflect(psi0)|psi>|^2`.
pub fn mirror_fidelity(psi: &WaveField, psi0: &WaveField) -> Result<f64> {
    Ok(psi0.reflected().overlap(psi)?.norm_sqr())
}

/// Grid and potential `s(j(x)) cos^2(x)`, with `j(x) = x/pi - V/2`.
///
/// The walls sit on the barrier maxima at `x = 0` and `x = V pi`.
pub fn build_potential(config: &LatticeConfig) -> Result<(Grid, Vec<f64>)> {
    config.validate()?;
    let grid = Grid::new(config.sites * config.points_per_well - 1, PI / config.points_per_well as f64)?;
    let half = config.sites as f64 / 2.0;
    let v = grid
        .points()
        .map(|x| config.depth(x / PI - half) * x.cos().powi(2))
        .collect();
    Ok((grid, v))
}

/// Gaussian envelope over wells times a harmonic ground state of width `s^{-1/4}` in each well.
pub fn initial_packet(config: &LatticeConfig, grid: Grid) -> Result<WaveField> {
    config.validate()?;
    let half = config.sites as f64 / 2.0;
    let w = config.packet_width;
    let mut values = vec![Complex64::new(0.0, 0.0); grid.n];
    for m in 0..config.sites {
        let c = m as f64 - config.half_span();
        let env = (-(c - config.j0).powi(2) / (2.0 * w * w)).exp();
        if env < 1e-300 {
            continue;
        }
        let sigma = config.depth(c).powf(-0.25);
        let xc = (c + half) * PI;
        for (i, z) in values.iter_mut().enumerate() {
            let d = grid.x(i) - xc;
            z.re += env * (-d * d / (2.0 * sigma * sigma)).exp();
        }
    }
    let mut psi = WaveField::new(grid, values)?;
    psi.normalize()?;
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(j0: f64, packet_width: f64) -> LatticeConfig {
        LatticeConfig {
            sites: 41,
            j0,
            packet_width,
            ..Default::default()
        }
    }

    #[test]
    fn potential_layout() {
        let c = LatticeConfig::default();
        let (grid, v) = build_potential(&c).unwrap();
        assert_eq!(grid.n, 101 * 16 - 1);
        assert!((grid.length() - 101.0 * PI).abs() < 1e-12);
        // Central well minimum at the box center; barrier tops carry the full depth.
        let mid = grid.n / 2;
        assert!((grid.x(mid) - grid.length() / 2.0).abs() < 1e-12);
        assert!(v[mid].abs() < 1e-20);
        assert!((v[3] - c.depth(4.0 / 16.0 - 50.5) * (4.0 * PI / 16.0).cos().powi(2)).abs() < 1e-14);
        let edge = v[15];
        assert!((edge - c.depth(1.0 - 50.5)).abs() < 1e-9);
        assert!(build_potential(&LatticeConfig { points_per_well: 15, ..c }).is_err());
    }

    #[test]
    fn packet_shape() {
        for (j0, w) in [(0.0, 3.0), (10.0, 3.0), (-7.0, 1.5)] {
            let c = small(j0, w);
            let (grid, _) = build_potential(&c).unwrap();
            let psi = initial_packet(&c, grid).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            let j = psi.mean_position() / PI - c.sites as f64 / 2.0;
            assert!((j - j0).abs() < 0.1, "{j} vs {j0}");
            let pops = psi.site_populations();
            assert!((pops.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let c = small(0.0, 3.0);
        let (grid, _) = build_potential(&c).unwrap();
        let psi = initial_packet(&c, grid).unwrap();
        assert!((mirror_fidelity(&psi, &psi).unwrap() - 1.0).abs() < 1e-12);
        assert!(initial_packet(&small(12.0, 3.0), grid).is_err());
    }

    #[test]
    fn distant_packets_do_not_overlap() {
        let c = LatticeConfig::default();
        let (grid, _) = build_potential(&c).unwrap();
        let psi = initial_packet(&c, grid).unwrap();
        // Envelopes 20 wells apart with width 3: exp(-20^2 / (4 * 9)) ~ 1.5e-5 in amplitude.
        let f = mirror_fidelity(&psi, &psi).unwrap();
        assert!(f < 1e-6, "{f}");
        let other = WaveField::new(Grid::new(10, 0.1).unwrap(), vec![Complex64::new(1.0, 0.0); 10]).unwrap();
        assert!(mirror_fidelity(&other, &psi).is_err());
    }
}
