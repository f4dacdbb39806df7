use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::grid::{build_potential, initial_packet, mirror_fidelity, WaveField};
use super::propagate::SplitStep;
use super::{tunneling_amplitude, LatticeConfig, PhysicalUnits};
use crate::error::{Error, Result};

/// Largest change of the final mirror fidelity allowed when `dt` is halved.
pub const CONVERGENCE_LIMIT: f64 = 1e-4;
/// A transfer counts only once the mirror fidelity exceeds this.
pub const HIT_THRESHOLD: f64 = 0.5;
/// An excursion above [`HIT_THRESHOLD`] ends only when the fidelity falls below this.
pub const HIT_RELEASE: f64 = 0.25;
/// Minimum number of revivals for a damping fit.
pub const MIN_DAMPING_PEAKS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    /// `hbar / E_R`.
    pub t: f64,
    pub fidelity: f64,
    pub norm: f64,
    /// `<x>` in units of `1/k`.
    pub mean_x: f64,
    /// Population of the wells within two packet widths of the mirror site.
    pub window_population: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HittingPeak {
    pub time: f64,
    pub fidelity: f64,
    /// Sample closest to the refined peak.
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    /// `hbar / E_R`.
    pub theory_time: f64,
    /// `theory_time * tau(s0)`, i.e. in units of `1/tau`.
    pub theory_time_tau: f64,
    pub hitting_time: f64,
    pub hitting_time_tau: f64,
    /// `(hitting_time - theory_time) / theory_time`.
    pub relative_deviation: f64,
    pub peak_mirror_fidelity: f64,
    /// Site-window population at the hitting time.
    pub window_population: f64,
    /// No excursion of the mirror fidelity above one half in the search window.
    pub periphery_trapped: bool,
    /// `(t / theory_time, fidelity)` at odd multiples of the hitting time.
    pub revival_peaks: Vec<(f64, f64)>,
    /// 1/e time of the revival envelope, in units of `theory_time`.
    pub damping_time: Option<f64>,
    pub damping_note: Option<String>,
    pub max_norm_drift: f64,
    pub relative_energy_drift: f64,
    pub theory_time_ms: f64,
    pub hitting_time_ms: f64,
    pub warnings: Vec<String>,
}

/// Peak of the first excursion above [`HIT_THRESHOLD`] after the fidelity has
/// been below it, refined by a parabola through the neighbouring samples.
///
/// The excursion lasts until the fidelity drops under [`HIT_RELEASE`], so fast
/// intra-well breathing around the threshold does not split one transfer peak.
///
/// `samples` must be uniformly spaced in time.
pub fn find_hitting_peak(samples: &[(f64, f64)]) -> Option<HittingPeak> {
    let below = samples.iter().position(|s| s.1 < HIT_THRESHOLD)?;
    let start = below + samples[below..].iter().position(|s| s.1 > HIT_THRESHOLD)?;
    let end = start + samples[start..].iter().take_while(|s| s.1 >= HIT_RELEASE).count();
    let k = (start..end).max_by(|&a, &b| samples[a].1.total_cmp(&samples[b].1))?;
    let (mut time, mut fidelity) = samples[k];
    if k > 0 && k + 1 < samples.len() {
        let (f0, f1, f2) = (samples[k - 1].1, samples[k].1, samples[k + 1].1);
        let curv = f0 - 2.0 * f1 + f2;
        if curv < 0.0 {
            let h = samples[k + 1].0 - samples[k].0;
            let delta = 0.5 * (f0 - f2) / curv;
            time += delta * h;
            fidelity = (f1 - 0.25 * (f0 - f2) * delta).min(1.0);
        }
    }
    Some(HittingPeak { time, fidelity, index: k })
}

/// Least-squares fit `ln f = c - t / T` to revival peaks `(t, f)`; returns `T`
/// in the units of `t`, or `None` when the peaks do not decay.
pub fn damping_time(peaks: &[(f64, f64)]) -> Result<Option<f64>> {
    if peaks.len() < MIN_DAMPING_PEAKS {
        return Err(Error::TooFewPeaks {
            found: peaks.len(),
            required: MIN_DAMPING_PEAKS,
        });
    }
    let pts: Vec<(f64, f64)> = peaks.iter().map(|&(t, f)| (t, f.max(f64::MIN_POSITIVE).ln())).collect();
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if stt == 0.0 {
        return Err(Error::InvalidConfig("revival peaks share one time".into()));
    }
    let slope = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum::<f64>() / stt;
    Ok((slope < 0.0).then(|| -1.0 / slope))
}

struct Setup {
    stepper: SplitStep,
    psi0: WaveField,
    mirror: WaveField,
    window: (usize, usize),
}

fn setup(config: &LatticeConfig, dt: f64) -> Result<Setup> {
    let (grid, v) = build_potential(config)?;
    let psi0 = initial_packet(config, grid)?;
    let mirror = psi0.reflected();
    // Wells within two packet widths of the mirror site, as grid index bounds.
    let center = -config.j0 + config.sites as f64 / 2.0;
    let reach = 2.0 * config.packet_width + 0.5;
    let lo = ((center - reach).max(0.0) * PI / grid.dx).ceil() as usize;
    let hi = (((center + reach) * PI / grid.dx).floor() as usize).min(grid.n);
    Ok(Setup {
        stepper: SplitStep::new(grid, v, config.g, dt)?,
        psi0,
        mirror,
        window: (lo.saturating_sub(1), hi.saturating_sub(1).max(lo.saturating_sub(1))),
    })
}

fn sample_stride(config: &LatticeConfig, dt: f64) -> usize {
    ((1.0 / (config.samples_per_unit * dt)).round() as usize).max(1)
}

/// Propagates to `window * theory_time` (or `damping_until * theory_time`),
/// locates the first transfer peak and fits the decay of later revivals.
pub fn run_transfer_experiment(config: &LatticeConfig) -> Result<(TransferReport, Vec<TracePoint>)> {
    config.validate()?;
    let warnings = config.warnings();
    for w in &warnings {
        log::warn!("{w}");
    }
    let theory = config.theory_time()?;
    let tau = tunneling_amplitude(config.s0)?;
    let Setup {
        mut stepper,
        psi0,
        mirror,
        window,
    } = setup(config, config.dt)?;
    let e0 = stepper.energy(&psi0);
    let mut psi = psi0.clone();
    let mut trace = Vec::new();
    let dx = psi0.grid.dx;
    let stride = sample_stride(config, config.dt);
    let observe = |t: f64, w: &WaveField, trace: &mut Vec<TracePoint>| {
        let amp: num_complex::Complex64 = mirror.values.iter().zip(&w.values).map(|(a, b)| a.conj() * b).sum();
        let win: f64 = w.values[window.0..=window.1].iter().map(|z| z.norm_sqr()).sum();
        trace.push(TracePoint {
            t,
            fidelity: (amp * dx).norm_sqr(),
            norm: w.norm(),
            mean_x: w.mean_position(),
            window_population: win * dx,
        });
    };
    let search_end = stride as f64 * config.dt * (theory * config.window / (stride as f64 * config.dt)).ceil();
    stepper.propagate(&mut psi, search_end, stride, |t, w| observe(t, w, &mut trace))?;

    let search: Vec<(f64, f64)> = trace.iter().map(|p| (p.t, p.fidelity)).collect();
    let (peak, trapped) = match find_hitting_peak(&search) {
        Some(p) => (p, false),
        None => {
            let k = (0..search.len())
                .max_by(|&a, &b| search[a].1.total_cmp(&search[b].1))
                .expect("trace has samples");
            (HittingPeak { time: search[k].0, fidelity: search[k].1, index: k }, true)
        }
    };

    // Revivals are only followed after a transfer.
    if let (Some(until), false) = (config.damping_until, trapped) {
        let extra = theory * until - search_end;
        if extra > 0.0 {
            stepper.propagate(&mut psi, extra, stride, |t, w| {
                if t > 0.0 {
                    observe(search_end + t, w, &mut trace)
                }
            })?;
        }
    }
    let e1 = stepper.energy(&psi);

    let mut revival_peaks = Vec::new();
    let (mut damping, mut note) = (None, None);
    if config.damping_until.is_some() {
        if trapped {
            note = Some("no transfer peak; damping not defined".to_string());
        } else {
            let th = peak.time;
            let t_last = trace.last().map_or(0.0, |p| p.t);
            let mut m = 1.0;
            while (m + 0.5) * th <= t_last {
                let best = trace
                    .iter()
                    .filter(|p| p.t >= (m - 0.5) * th && p.t < (m + 0.5) * th)
                    .max_by(|a, b| a.fidelity.total_cmp(&b.fidelity));
                if let Some(b) = best {
                    revival_peaks.push((b.t / theory, b.fidelity));
                }
                m += 2.0;
            }
            match damping_time(&revival_peaks) {
                Ok(Some(d)) => damping = Some(d),
                Ok(None) => note = Some("revival peaks do not decay".to_string()),
                Err(e) => note = Some(e.to_string()),
            }
        }
    }

    let units = PhysicalUnits::rb87_800nm();
    let report = TransferReport {
        theory_time: theory,
        theory_time_tau: theory * tau,
        hitting_time: peak.time,
        hitting_time_tau: peak.time * tau,
        relative_deviation: (peak.time - theory) / theory,
        peak_mirror_fidelity: peak.fidelity.clamp(0.0, 1.0),
        window_population: trace[peak.index].window_population,
        periphery_trapped: trapped,
        revival_peaks,
        damping_time: damping,
        damping_note: note,
        max_norm_drift: trace.iter().map(|p| (p.norm - 1.0).abs()).fold(0.0, f64::max),
        relative_energy_drift: ((e1 - e0) / e0).abs(),
        theory_time_ms: units.to_milliseconds(theory),
        hitting_time_ms: units.to_milliseconds(peak.time),
        warnings,
    };
    Ok((report, trace))
}

/// Runs to `t_end` with `dt` and `dt / 2` and compares the final mirror fidelity.
///
/// Returns the absolute difference, or [`Error::ConvergenceGate`] above [`CONVERGENCE_LIMIT`].
pub fn convergence_gate(config: &LatticeConfig, t_end: f64) -> Result<f64> {
    config.validate()?;
    let mut finals = [0.0; 2];
    for (slot, dt) in finals.iter_mut().zip([config.dt, config.dt / 2.0]) {
        let mut s = setup(config, dt)?;
        let mut psi = s.psi0.clone();
        let steps = (t_end / config.dt).round() as usize;
        s.stepper.propagate(&mut psi, steps as f64 * config.dt, usize::MAX, |_, _| {})?;
        *slot = mirror_fidelity(&psi, &s.psi0)?;
    }
    let diff = (finals[0] - finals[1]).abs();
    if diff >= CONVERGENCE_LIMIT {
        return Err(Error::ConvergenceGate {
            infidelity: diff,
            limit: CONVERGENCE_LIMIT,
        });
    }
    Ok(diff)
}
