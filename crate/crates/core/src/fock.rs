//! Bosonic Fock bases and the dual (secondary) graphs they induce.
//!
//! Moving one boson from site `i` to site `j` along a primary edge with hop
//! amplitude `w` connects `|.., n_i, .., n_j, ..>` to `|.., n_i - 1, .., n_j + 1, ..>`
//! with amplitude `w * sqrt(n_i (n_j + 1))`. The resulting Fock-space Hamiltonian
//! is itself a weighted graph, so an N-boson walk is a one-particle walk on it.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{cartesian_product, check_permutation, occupation_label, HermitianWeightedGraph};

pub const DEFAULT_BASIS_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState {
    occupations: Vec<u32>,
}

impl FockState {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self { occupations }
    }

    pub fn occupations(&self) -> &[u32] {
        &self.occupations
    }

    pub fn sites(&self) -> usize {
        self.occupations.len()
    }

    pub fn bosons(&self) -> u32 {
        self.occupations.iter().sum()
    }

    pub fn label(&self) -> String {
        occupation_label(&self.occupations)
    }
}

/// All occupation vectors of `bosons` particles on `sites` sites, in
/// reverse-lexicographic order: `(N,0,..)` first, `(..,0,N)` last.
#[derive(Debug, Clone)]
pub struct FockBasis {
    sites: usize,
    bosons: u32,
    states: Vec<FockState>,
    index: HashMap<Vec<u32>, usize>,
}

impl FockBasis {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn bosons(&self) -> u32 {
        self.bosons
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn index_of(&self, occupations: &[u32]) -> Option<usize> {
        self.index.get(occupations).copied()
    }
}

/// `C(n + v - 1, v - 1)`, saturating at `u128::MAX`.
pub fn basis_size(sites: usize, bosons: u32) -> u128 {
    if sites == 0 {
        return 0;
    }
    let k = (sites as u128 - 1).min(u128::from(bosons));
    let top = sites as u128 - 1 + u128::from(bosons);
    let mut r: u128 = 1;
    for i in 0..k {
        r = match r.checked_mul(top - i) {
            Some(x) => x / (i + 1),
            None => return u128::MAX,
        };
    }
    r
}

pub fn enumerate_fock_basis(sites: usize, bosons: u32) -> Result<FockBasis> {
    enumerate_fock_basis_with_cap(sites, bosons, DEFAULT_BASIS_CAP)
}

pub fn enumerate_fock_basis_with_cap(sites: usize, bosons: u32, cap: usize) -> Result<FockBasis> {
    if sites == 0 {
        return Err(Error::OutOfRange {
            what: "site count",
            value: "0".into(),
            range: ">= 1",
        });
    }
    let required = basis_size(sites, bosons);
    if required > cap as u128 {
        return Err(Error::CapExceeded { required, cap });
    }
    let mut states = Vec::with_capacity(required as usize);
    let mut current = vec![0u32; sites];
    fill(&mut current, 0, bosons, &mut states);
    let index = states
        .iter()
        .enumerate()
        .map(|(k, s)| (s.occupations.clone(), k))
        .collect();
    Ok(FockBasis {
        sites,
        bosons,
        states,
        index,
    })
}

fn fill(current: &mut [u32], site: usize, remaining: u32, out: &mut Vec<FockState>) {
    if site + 1 == current.len() {
        current[site] = remaining;
        out.push(FockState::new(current.to_vec()));
        return;
    }
    for n in (0..=remaining).rev() {
        current[site] = n;
        fill(current, site + 1, remaining - n, out);
    }
    current[site] = 0;
}

/// The N-boson dual of `g`; vertices are Fock states labelled like `"2,0,1"`.
pub fn dual_graph(g: &HermitianWeightedGraph, bosons: u32) -> Result<HermitianWeightedGraph> {
    dual_graph_with_cap(g, bosons, DEFAULT_BASIS_CAP)
}

pub fn dual_graph_with_cap(
    g: &HermitianWeightedGraph,
    bosons: u32,
    cap: usize,
) -> Result<HermitianWeightedGraph> {
    if bosons == 0 {
        return Err(Error::OutOfRange {
            what: "boson count",
            value: "0".into(),
            range: ">= 1",
        });
    }
    let basis = enumerate_fock_basis_with_cap(g.vertex_count(), bosons, cap)?;
    let mut edges = Vec::new();
    let mut target = vec![0u32; basis.sites];
    for (a, state) in basis.states.iter().enumerate() {
        let occ = state.occupations();
        for e in g.edges() {
            // Both hop directions along the primary edge.
            for (from, to, w) in [(e.i, e.j, e.w), (e.j, e.i, e.w.conj())] {
                if occ[from] == 0 {
                    continue;
                }
                target.copy_from_slice(occ);
                target[from] -= 1;
                target[to] += 1;
                let b = basis.index[&target];
                // Each undirected dual edge is emitted from its lower-index end.
                if a < b {
                    let factor = (u64::from(occ[from]) * u64::from(occ[to] + 1)) as f64;
                    edges.push((a, b, w * factor.sqrt()));
                }
            }
        }
    }
    let labels = basis.states.iter().map(FockState::label).collect();
    HermitianWeightedGraph::new(basis.len(), edges, Some(labels))
}

/// Dual for a fixed spin composition: the Cartesian product of the per-sector
/// duals, skipping empty sectors. The hopping Hamiltonian conserves every `N_sigma`.
pub fn multi_spin_dual(
    g: &HermitianWeightedGraph,
    sector_counts: &[u32],
) -> Result<HermitianWeightedGraph> {
    multi_spin_dual_with_cap(g, sector_counts, DEFAULT_BASIS_CAP)
}

pub fn multi_spin_dual_with_cap(
    g: &HermitianWeightedGraph,
    sector_counts: &[u32],
    cap: usize,
) -> Result<HermitianWeightedGraph> {
    let occupied: Vec<u32> = sector_counts.iter().copied().filter(|&n| n > 0).collect();
    if occupied.is_empty() {
        return Err(Error::OutOfRange {
            what: "spin composition",
            value: format!("{sector_counts:?}"),
            range: "at least one positive sector",
        });
    }
    let required = occupied
        .iter()
        .map(|&n| basis_size(g.vertex_count(), n))
        .fold(1u128, |acc, x| acc.saturating_mul(x));
    if required > cap as u128 {
        return Err(Error::CapExceeded { required, cap });
    }
    let mut out: Option<HermitianWeightedGraph> = None;
    for n in occupied {
        let d = dual_graph_with_cap(g, n, cap)?;
        out = Some(match out {
            None => d,
            Some(acc) => cartesian_product(&acc, &d),
        });
    }
    Ok(out.expect("at least one sector"))
}

/// A partition of N into per-spin boson counts, with how many distinct
/// assignments of spin labels realise it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorPattern {
    /// Non-increasing positive part sizes.
    pub parts: Vec<u32>,
    pub multiplicity: u128,
}

/// Decomposes the N-boson, S-component walk into independent fixed-composition
/// walks. A pattern with `k` parts, where sizes repeat `m_1, m_2, ..` times, occurs
/// `S! / (S-k)! / (m_1! m_2! ..)` times.
pub fn spin_sector_decomposition(bosons: u32, spins: u32) -> Vec<SectorPattern> {
    let mut out = Vec::new();
    let mut parts = Vec::new();
    partitions(bosons, bosons, spins as usize, &mut parts, &mut |p| {
        out.push(SectorPattern {
            parts: p.to_vec(),
            multiplicity: pattern_multiplicity(p, spins),
        })
    });
    out
}

fn partitions(
    remaining: u32,
    max_part: u32,
    max_len: usize,
    parts: &mut Vec<u32>,
    emit: &mut dyn FnMut(&[u32]),
) {
    if remaining == 0 {
        if !parts.is_empty() {
            emit(parts);
        }
        return;
    }
    if parts.len() == max_len {
        return;
    }
    for p in (1..=remaining.min(max_part)).rev() {
        parts.push(p);
        partitions(remaining - p, p, max_len, parts, emit);
        parts.pop();
    }
}

fn factorial(n: u32) -> u128 {
    (1..=u128::from(n)).product()
}

fn pattern_multiplicity(parts: &[u32], spins: u32) -> u128 {
    let k = parts.len() as u32;
    if k > spins {
        return 0;
    }
    let falling: u128 = (spins - k + 1..=spins).map(u128::from).product();
    let mut repeats = 1u128;
    let mut i = 0;
    while i < parts.len() {
        let run = parts[i..].iter().take_while(|&&p| p == parts[i]).count();
        repeats *= factorial(run as u32);
        i += run;
    }
    falling / repeats
}

/// Weight of each spin composition `(N_1, .., N_S)` in the product state
/// `|psi>^{(x)N}` where spin component `sigma` has probability `probabilities[sigma]`:
/// the multinomial `N! / prod N_sigma! * prod p_sigma^{N_sigma}`.
pub fn composition_weights(probabilities: &[f64], bosons: u32) -> Result<Vec<(Vec<u32>, f64)>> {
    if probabilities.is_empty() {
        return Err(Error::OutOfRange {
            what: "spin component count",
            value: "0".into(),
            range: ">= 1",
        });
    }
    let total: f64 = probabilities.iter().sum();
    if probabilities.iter().any(|&p| p < 0.0) || (total - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm: total });
    }
    let basis = enumerate_fock_basis(probabilities.len(), bosons)?;
    let ln_fact = |n: u32| (1..=n).map(|k| f64::from(k).ln()).sum::<f64>();
    Ok(basis
        .states
        .into_iter()
        .map(|s| {
            let counts = s.occupations;
            let mut ln_w = ln_fact(bosons);
            let mut zero = false;
            for (&n, &p) in counts.iter().zip(probabilities) {
                ln_w -= ln_fact(n);
                if n > 0 {
                    if p == 0.0 {
                        zero = true;
                    } else {
                        ln_w += f64::from(n) * p.ln();
                    }
                }
            }
            (counts, if zero { 0.0 } else { ln_w.exp() })
        })
        .collect())
}

/// Image of a Fock state when every boson on site `i` moves to site `perm[i]`.
pub fn partner_state(state: &FockState, perm: &[usize]) -> Result<FockState> {
    check_permutation(perm, state.sites())?;
    let mut out = vec![0u32; state.sites()];
    for (i, &n) in state.occupations.iter().enumerate() {
        out[perm[i]] = n;
    }
    Ok(FockState::new(out))
}

/// Lifts a primary-graph vertex permutation to a permutation of the dual graph's vertices.
pub fn lift_permutation(basis: &FockBasis, perm: &[usize]) -> Result<Vec<usize>> {
    basis
        .states
        .iter()
        .map(|s| {
            let p = partner_state(s, perm)?;
            Ok(basis.index[p.occupations()])
        })
        .collect()
}
