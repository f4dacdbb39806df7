//! Oracles shared by the integration tests. None of them call into the code
//! they check except for graph construction and accessors.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use bosewalk::graph::HermitianWeightedGraph;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Connected-ish random graph: a random spanning path plus extra edges, magnitudes in [0.2, 2).
pub fn random_graph(rng: &mut impl Rng, vertices: usize) -> HermitianWeightedGraph {
    let mut edges = Vec::new();
    let weight = |rng: &mut dyn rand::RngCore| Complex64::from_polar(rng.gen_range(0.2..2.0), rng.gen_range(-PI..PI));
    for v in 1..vertices {
        edges.push((v - 1, v, weight(rng)));
    }
    for i in 0..vertices {
        for j in i + 2..vertices {
            if rng.gen_bool(0.5) {
                edges.push((i, j, weight(rng)));
            }
        }
    }
    HermitianWeightedGraph::new(vertices, edges, None).unwrap()
}

pub fn random_state(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// `exp(-i H t)` by scaling and squaring a truncated Taylor series.
pub fn expm(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let n = h.nrows();
    let a = h.map(|z| z * c(0.0, -t));
    let norm: f64 = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * n as f64;
    let squarings = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let a = a / Complex64::from(2f64.powi(squarings));
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &a / Complex64::from(k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn apply(m: &DMatrix<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    (m * nalgebra::DVector::from_column_slice(v)).iter().copied().collect()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn occupation(seq: &[usize], sites: usize) -> Vec<u32> {
    let mut occ = vec![0; sites];
    for &s in seq {
        occ[s] += 1;
    }
    occ
}

/// First-quantized `N`-particle Hamiltonian `sum_k H^(k)` on `V^N` sequences,
/// restricted to the symmetric subspace. Rows and columns are keyed by the
/// occupation label `"n_0,n_1,..."`.
pub fn symmetric_subspace_hamiltonian(g: &HermitianWeightedGraph, bosons: usize) -> BTreeMap<(String, String), Complex64> {
    let v = g.vertex_count();
    let h = g.to_dense();
    let total = v.pow(bosons as u32);
    let seq_of = |mut idx: usize| {
        let mut s = vec![0; bosons];
        for slot in s.iter_mut().rev() {
            *slot = idx % v;
            idx /= v;
        }
        s
    };
    let label = |occ: &[u32]| occ.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    let mut counts: BTreeMap<String, f64> = BTreeMap::new();
    for idx in 0..total {
        *counts.entry(label(&occupation(&seq_of(idx), v))).or_default() += 1.0;
    }
    // <S_m|H|S_n> = sum over sequences x in n, y in m of <y|H|x>, over sqrt(|n| |m|).
    let mut out: BTreeMap<(String, String), Complex64> = BTreeMap::new();
    for idx in 0..total {
        let x = seq_of(idx);
        let from = label(&occupation(&x, v));
        for k in 0..bosons {
            for site in 0..v {
                let amp = h[(site, x[k])];
                if amp == Complex64::default() {
                    continue;
                }
                let mut y = x.clone();
                y[k] = site;
                let to = label(&occupation(&y, v));
                *out.entry((to, from.clone())).or_default() += amp;
            }
        }
    }
    for ((to, from), z) in out.iter_mut() {
        *z /= (counts[to] * counts[from]).sqrt();
    }
    out
}
