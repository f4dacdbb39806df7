//! Continuous-time quantum walks through dense Hermitian eigendecomposition.
//!
//! `U(t) = exp(-i H t) = Q exp(-i Lambda t) Q^dagger`, with `hbar = 1`, weights in
//! units of the tunneling amplitude and times in inverse units.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::HermitianWeightedGraph;

/// Transfer counts as perfect when the peak probability is at least `1 - PST_EPSILON`.
pub const PST_EPSILON: f64 = 1e-9;
pub const DEFAULT_DENSE_CAP: usize = 4000;
pub const DEFAULT_SAMPLES: usize = 10_000;
pub const MIN_SAMPLES: usize = 100;
/// Peaks closer than this to the best one are treated as ties; the earliest wins.
const PEAK_TIE_TOLERANCE: f64 = 1e-9;
const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    eigenvectors: DMatrix<Complex64>,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `max |H - Q Lambda Q^dagger|` entrywise.
    pub fn reconstruction_error(&self, h: &DMatrix<Complex64>) -> f64 {
        let q = &self.eigenvectors;
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim(),
            self.eigenvalues.iter().map(|&l| Complex64::new(l, 0.0)),
        ));
        (h - q * lambda * q.adjoint()).camax()
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.dim() {
            return Err(Error::OutOfRange {
                what: "vertex index",
                value: v.to_string(),
                range: "0..vertex_count",
            });
        }
        Ok(())
    }

    /// Coefficients `c_k = Q[out,k] conj(Q[in,k])`, so that `<out|U(t)|in> = sum_k c_k e^{-i lambda_k t}`.
    fn channel(&self, input: usize, output: usize) -> Result<Channel<'_>> {
        self.check_vertex(input)?;
        self.check_vertex(output)?;
        let q = &self.eigenvectors;
        Ok(Channel {
            lambdas: &self.eigenvalues,
            weights: (0..self.dim())
                .map(|k| q[(output, k)] * q[(input, k)].conj())
                .collect(),
        })
    }
}

struct Channel<'a> {
    lambdas: &'a [f64],
    weights: Vec<Complex64>,
}

impl Channel<'_> {
    fn amplitude(&self, t: f64) -> Complex64 {
        self.lambdas
            .iter()
            .zip(&self.weights)
            .map(|(&l, &c)| c * Complex64::from_polar(1.0, -l * t))
            .sum()
    }

    fn probability(&self, t: f64) -> f64 {
        self.amplitude(t).norm_sqr()
    }

    /// `dp/dt = 2 Re(conj(A) dA/dt)`.
    fn probability_slope(&self, t: f64) -> f64 {
        let mut a = Complex64::new(0.0, 0.0);
        let mut da = Complex64::new(0.0, 0.0);
        for (&l, &c) in self.lambdas.iter().zip(&self.weights) {
            let term = c * Complex64::from_polar(1.0, -l * t);
            a += term;
            da += term * Complex64::new(0.0, -l);
        }
        2.0 * (a.conj() * da).re
    }
}

pub fn eigendecompose(g: &HermitianWeightedGraph) -> Result<SpectralDecomposition> {
    eigendecompose_with_cap(g, DEFAULT_DENSE_CAP)
}

pub fn eigendecompose_with_cap(
    g: &HermitianWeightedGraph,
    cap: usize,
) -> Result<SpectralDecomposition> {
    let n = g.vertex_count();
    if n > cap {
        return Err(Error::CapExceeded {
            required: n as u128,
            cap,
        });
    }
    let h = g.to_dense();
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, 10_000 * n.max(1)).ok_or(
        Error::NoConvergence {
            residual: f64::INFINITY,
        },
    )?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    let spec = SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    };
    // The O(n^3) residual check is only affordable at small sizes.
    if n <= 512 {
        let scale = spec
            .eigenvalues
            .iter()
            .fold(1.0f64, |m, l| m.max(l.abs()));
        let residual = spec.reconstruction_error(&h);
        if residual > 1e-10 * scale {
            return Err(Error::NoConvergence { residual });
        }
    }
    Ok(spec)
}

fn norm(psi: &[Complex64]) -> f64 {
    psi.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// `exp(-i H t) psi0`. The input must be normalized.
pub fn evolve(spec: &SpectralDecomposition, psi0: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    if psi0.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: psi0.len(),
        });
    }
    let nrm = norm(psi0);
    if (nrm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm: nrm });
    }
    if t == 0.0 {
        return Ok(psi0.to_vec());
    }
    let q = &spec.eigenvectors;
    let psi = nalgebra::DVector::from_column_slice(psi0);
    let mut coeffs = q.adjoint() * psi;
    for (c, &l) in coeffs.iter_mut().zip(&spec.eigenvalues) {
        *c *= Complex64::from_polar(1.0, -l * t);
    }
    Ok((q * coeffs).iter().copied().collect())
}

/// `<out|U(t)|in>`.
pub fn transfer_amplitude(
    spec: &SpectralDecomposition,
    input: usize,
    output: usize,
    t: f64,
) -> Result<Complex64> {
    Ok(spec.channel(input, output)?.amplitude(t))
}

pub fn transfer_amplitudes(
    spec: &SpectralDecomposition,
    input: usize,
    output: usize,
    times: &[f64],
) -> Result<Vec<Complex64>> {
    let ch = spec.channel(input, output)?;
    Ok(times.iter().map(|&t| ch.amplitude(t)).collect())
}

/// `|<out|U(t)|in>|^2` at each time.
pub fn transfer_probability(
    spec: &SpectralDecomposition,
    input: usize,
    output: usize,
    times: &[f64],
) -> Result<Vec<f64>> {
    let ch = spec.channel(input, output)?;
    Ok(times.iter().map(|&t| ch.probability(t).min(1.0)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PstCertificate {
    pub in_vertex: usize,
    pub out_vertex: usize,
    /// Units of inverse tunneling amplitude.
    pub hitting_time: f64,
    pub peak_probability: f64,
    /// Argument of `<out|U(t_h)|in>`.
    pub transfer_phase: f64,
    /// `peak_probability >= 1 - PST_EPSILON`.
    pub certified: bool,
}

impl PstCertificate {
    fn at(ch: &Channel<'_>, input: usize, output: usize, t: f64) -> Self {
        let amp = ch.amplitude(t);
        let p = amp.norm_sqr().min(1.0);
        Self {
            in_vertex: input,
            out_vertex: output,
            hitting_time: t,
            peak_probability: p,
            transfer_phase: amp.arg(),
            certified: p >= 1.0 - PST_EPSILON,
        }
    }
}

/// Scans `samples` equally spaced times in `[0, t_max]`, refines every promising
/// local maximum, and returns the earliest time whose refined probability ties the
/// global best.
pub fn find_hitting_time(
    spec: &SpectralDecomposition,
    input: usize,
    output: usize,
    t_max: f64,
    samples: usize,
) -> Result<PstCertificate> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::OutOfRange {
            what: "t_max",
            value: t_max.to_string(),
            range: "> 0",
        });
    }
    if samples < MIN_SAMPLES {
        return Err(Error::OutOfRange {
            what: "samples",
            value: samples.to_string(),
            range: ">= 100",
        });
    }
    let ch = spec.channel(input, output)?;
    let dt = t_max / (samples - 1) as f64;
    let grid: Vec<f64> = (0..samples).map(|k| ch.probability(k as f64 * dt)).collect();
    let best_sample = grid.iter().copied().fold(0.0, f64::max);

    let mut candidates: Vec<usize> = (0..samples)
        .filter(|&k| {
            let left = if k == 0 { f64::MIN } else { grid[k - 1] };
            let right = if k + 1 == samples { f64::MIN } else { grid[k + 1] };
            grid[k] >= left && grid[k] >= right && grid[k] >= best_sample - 0.1
        })
        .collect();
    if candidates.len() > 256 {
        candidates.sort_by(|&a, &b| grid[b].total_cmp(&grid[a]));
        candidates.truncate(256);
        candidates.sort_unstable();
    }

    let refined: Vec<(f64, f64)> = candidates
        .iter()
        .map(|&k| {
            let lo = if k == 0 { 0.0 } else { (k - 1) as f64 * dt };
            let hi = ((k + 1) as f64 * dt).min(t_max);
            let t = refine_peak(&ch, lo, hi, k as f64 * dt);
            (t, ch.probability(t))
        })
        .collect();
    let best = refined.iter().map(|r| r.1).fold(0.0, f64::max);
    let (t_h, _) = refined
        .iter()
        .copied()
        .filter(|r| r.1 >= best - PEAK_TIE_TOLERANCE)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one candidate");
    Ok(PstCertificate::at(&ch, input, output, t_h))
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section search on `[lo, hi]`, polished by bisection on the analytic slope
/// once the bracket is small. The probability is flat at a maximum, so it alone
/// cannot locate the peak time to better than about `sqrt(eps)`.
fn refine_peak(ch: &Channel<'_>, lo: f64, hi: f64, start: f64) -> f64 {
    let tol = |t: f64| 1e-10 * t.abs().max(1.0);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut f2) = (ch.probability(x1), ch.probability(x2));
    for _ in 0..24 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = ch.probability(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = ch.probability(x1);
        }
    }
    let t0 = 0.5 * (a + b);
    let bisect = |mut a: f64, mut b: f64| {
        while b - a > tol(a) {
            let m = 0.5 * (a + b);
            if ch.probability_slope(m) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    let brackets = |a: f64, b: f64| ch.probability_slope(a) > 0.0 && ch.probability_slope(b) < 0.0;
    let delta = 1e-6 * t0.abs().max(1.0);
    let (na, nb) = ((t0 - delta).max(lo), (t0 + delta).min(hi));
    let mut t = if brackets(na, nb) {
        bisect(na, nb)
    } else if brackets(lo, hi) {
        bisect(lo, hi)
    } else {
        t0
    };
    // Endpoint maxima (e.g. t = 0 when in == out) or a failed polish.
    for cand in [lo, hi, start] {
        if ch.probability(cand) > ch.probability(t) {
            t = cand;
        }
    }
    t
}

/// `4 pi V` in units where the heaviest edge has unit weight.
pub fn default_t_max(g: &HermitianWeightedGraph) -> f64 {
    let scale = g.max_weight().unwrap_or(1.0);
    4.0 * PI * g.vertex_count() as f64 / scale
}

/// Certifies transfer `input -> output`. With `expected_t` the probability is
/// evaluated at exactly that time; otherwise the hitting time is searched over
/// `[0, default_t_max(g)]`.
pub fn certify_pst(
    g: &HermitianWeightedGraph,
    input: usize,
    output: usize,
    expected_t: Option<f64>,
) -> Result<PstCertificate> {
    let spec = eigendecompose(g)?;
    certify_with_spectrum(&spec, g, input, output, expected_t)
}

pub fn certify_with_spectrum(
    spec: &SpectralDecomposition,
    g: &HermitianWeightedGraph,
    input: usize,
    output: usize,
    expected_t: Option<f64>,
) -> Result<PstCertificate> {
    match expected_t {
        Some(t) => {
            let ch = spec.channel(input, output)?;
            Ok(PstCertificate::at(&ch, input, output, t))
        }
        None => find_hitting_time(spec, input, output, default_t_max(g), DEFAULT_SAMPLES),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub symmetric_about_zero: bool,
    pub commensurate: bool,
    /// Largest common divisor of the gaps between distinct eigenvalues.
    pub base_frequency: Option<f64>,
}

pub const COMMENSURATE_TOLERANCE: f64 = 1e-8;
pub const MAX_DENOMINATOR: i64 = 64;

/// Necessary spectral conditions for perfect transfer.
///
/// The spectrum is symmetric when it equals its own negation within `tol`. It is
/// commensurate when every gap `lambda_k - lambda_min` between distinct levels is
/// a rational multiple (denominator at most 64) of the smallest gap.
pub fn spectrum_checks(spec: &SpectralDecomposition, tol: f64) -> SpectrumReport {
    let ev = &spec.eigenvalues;
    let n = ev.len();
    let scale = ev.iter().fold(1.0f64, |m, l| m.max(l.abs()));
    let symmetric_about_zero = (0..n).all(|k| (ev[k] + ev[n - 1 - k]).abs() <= tol * scale);

    let mut levels: Vec<f64> = Vec::new();
    for &l in ev {
        if levels.last().is_none_or(|&last| l - last > tol * scale) {
            levels.push(l);
        }
    }
    let gaps: Vec<f64> = levels.iter().skip(1).map(|l| l - levels[0]).collect();
    let Some(&unit) = gaps.first() else {
        return SpectrumReport {
            symmetric_about_zero,
            commensurate: true,
            base_frequency: None,
        };
    };
    let mut fractions = Vec::with_capacity(gaps.len());
    for g in &gaps {
        match rational_approximation(g / unit, MAX_DENOMINATOR, tol) {
            Some(f) => fractions.push(f),
            None => {
                return SpectrumReport {
                    symmetric_about_zero,
                    commensurate: false,
                    base_frequency: None,
                }
            }
        }
    }
    let lcm = fractions.iter().fold(1i64, |acc, &(_, q)| acc / gcd(acc, q) * q);
    let common = fractions
        .iter()
        .fold(0i64, |acc, &(p, q)| gcd(acc, p * (lcm / q)));
    SpectrumReport {
        symmetric_about_zero,
        commensurate: true,
        base_frequency: Some(unit * common as f64 / lcm as f64),
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Continued-fraction convergent `p/q` of `x` with `q <= max_den` and
/// `|x - p/q| <= tol * max(1, |x|)`.
pub fn rational_approximation(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    let limit = tol * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            return None;
        }
        if (x - h2 as f64 / k2 as f64).abs() <= limit {
            return Some((h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a as f64;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyWalk {
    pub visited: Vec<usize>,
    /// First step at which each vertex was visited.
    pub reached: BTreeMap<usize, usize>,
}

/// Deterministic classical baseline: always take the heaviest incident edge,
/// ties to the smallest neighbour index, never stepping straight back unless
/// that is the only way out.
pub fn greedy_classical_walk(
    g: &HermitianWeightedGraph,
    input: usize,
    max_steps: usize,
) -> Result<GreedyWalk> {
    if input >= g.vertex_count() {
        return Err(Error::OutOfRange {
            what: "vertex index",
            value: input.to_string(),
            range: "0..vertex_count",
        });
    }
    if max_steps == 0 {
        return Err(Error::OutOfRange {
            what: "max_steps",
            value: "0".into(),
            range: ">= 1",
        });
    }
    let mut visited = vec![input];
    let mut reached = BTreeMap::from([(input, 0)]);
    let mut prev: Option<usize> = None;
    let mut cur = input;
    for step in 1..=max_steps {
        let nbrs = g.neighbors(cur);
        let forward: Vec<_> = nbrs.iter().filter(|(u, _)| Some(*u) != prev).copied().collect();
        let options = if forward.is_empty() { nbrs } else { forward };
        let mut choice: Option<(usize, f64)> = None;
        for (u, w) in options {
            let m = w.norm();
            match choice {
                Some((_, best)) if m <= best * (1.0 + 1e-12) => {}
                _ => choice = Some((u, m)),
            }
        }
        let Some((next, _)) = choice else { break };
        prev = Some(cur);
        cur = next;
        visited.push(cur);
        reached.entry(cur).or_insert(step);
    }
    Ok(GreedyWalk { visited, reached })
}
