//! Hermitian weighted graphs, i.e. single-particle hopping Hamiltonians.
//!
//! An edge `(i, j, w)` with `i < j` stores the directed hop amplitude
//! `i -> j`, which is the matrix element `<j|H|i> = H[j][i] = w`. The reverse
//! hop `j -> i` is `conj(w)`. Every cycle flux and every chirality statement in
//! this crate follows that orientation. Weights are in units of the bare
//! tunneling amplitude, so eigenvalues are in the same units and times are in
//! inverse units.

mod io;

use std::collections::HashSet;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use io::{export_dot, parse_graph, serialize_graph, GraphDocument};

/// Largest hypercube dimension accepted by [`build_hypercube`].
pub const MAX_HYPERCUBE_DIM: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    /// Directed hop amplitude `i -> j`.
    pub w: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianWeightedGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    labels: Option<Vec<String>>,
}

impl HermitianWeightedGraph {
    /// Builds a graph from `(i, j, w)` triples.
    ///
    /// A triple with `i > j` is flipped to `(j, i, conj(w))`, which describes the
    /// same Hamiltonian. Exactly-zero weights are dropped. Edges end up sorted by
    /// `(i, j)`.
    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, Complex64)>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if let Some(labels) = &labels {
            if labels.len() != vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "{} labels for {} vertices",
                    labels.len(),
                    vertex_count
                )));
            }
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (i, j, w) in edges {
            if i >= vertex_count || j >= vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) references a vertex outside 0..{vertex_count}"
                )));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {i}")));
            }
            if !w.re.is_finite() || !w.im.is_finite() {
                return Err(Error::InvalidGraph(format!("edge ({i}, {j}) has a non-finite weight")));
            }
            let (i, j, w) = if i < j { (i, j, w) } else { (j, i, w.conj()) };
            if !seen.insert((i, j)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({i}, {j})")));
            }
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            out.push(Edge { i, j, w });
        }
        out.sort_by_key(|e| (e.i, e.j));
        Ok(Self {
            vertex_count,
            edges: out,
            labels,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[v].as_str())
    }

    pub fn with_labels(mut self, labels: Option<Vec<String>>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != self.vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "{} labels for {} vertices",
                    l.len(),
                    self.vertex_count
                )));
            }
        }
        self.labels = labels;
        Ok(self)
    }

    /// Index of the vertex carrying `label`, if labels are present.
    pub fn find_label(&self, label: &str) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }

    /// Directed hop amplitude `from -> to`, i.e. `<to|H|from>`; zero when not adjacent.
    pub fn hop(&self, from: usize, to: usize) -> Complex64 {
        let (i, j) = if from < to { (from, to) } else { (to, from) };
        match self.edges.binary_search_by_key(&(i, j), |e| (e.i, e.j)) {
            Ok(k) if from < to => self.edges[k].w,
            Ok(k) => self.edges[k].w.conj(),
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        self.edges
            .binary_search_by_key(&(i, j), |e| (e.i, e.j))
            .is_ok()
    }

    /// Neighbours of `v` with the directed amplitude `v -> neighbour`, in ascending index order.
    pub fn neighbors(&self, v: usize) -> Vec<(usize, Complex64)> {
        let mut out: Vec<_> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.i == v {
                    Some((e.j, e.w))
                } else if e.j == v {
                    Some((e.i, e.w.conj()))
                } else {
                    None
                }
            })
            .collect();
        out.sort_by_key(|&(u, _)| u);
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.i == v || e.j == v).count()
    }

    pub fn max_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w.norm()).reduce(f64::max)
    }

    /// Dense Hamiltonian with `H[j][i] = w` and `H[i][j] = conj(w)`.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.vertex_count;
        let mut h = DMatrix::zeros(n, n);
        for e in &self.edges {
            h[(e.j, e.i)] = e.w;
            h[(e.i, e.j)] = e.w.conj();
        }
        h
    }

    /// Applies the gauge transformation `|v> -> e^{i phase_v} |v>`.
    ///
    /// The hop `i -> j` becomes `e^{i phase_j} w e^{-i phase_i}`; spectra and cycle
    /// fluxes are unchanged.
    pub fn gauge_transform(&self, phases: &[f64]) -> Result<Self> {
        if phases.len() != self.vertex_count {
            return Err(Error::DimensionMismatch {
                expected: self.vertex_count,
                found: phases.len(),
            });
        }
        let edges = self
            .edges
            .iter()
            .map(|e| (e.i, e.j, e.w * Complex64::from_polar(1.0, phases[e.j] - phases[e.i])));
        Self::new(self.vertex_count, edges, self.labels.clone())
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.vertex_count)?;
        let edges = self.edges.iter().map(|e| (perm[e.i], perm[e.j], e.w));
        let labels = self.labels.as_ref().map(|l| {
            let mut out = vec![String::new(); l.len()];
            for (v, s) in l.iter().enumerate() {
                out[perm[v]] = s.clone();
            }
            out
        });
        Self::new(self.vertex_count, edges, labels)
    }

    /// Checks that `v -> perm[v]` maps the weighted graph onto itself.
    ///
    /// With `conjugate` set, mapped hop amplitudes must equal the complex conjugate
    /// of the originals, which is the relevant notion for reflections of graphs
    /// whose hops carry a handedness.
    pub fn is_automorphism(&self, perm: &[usize], conjugate: bool, tol: f64) -> bool {
        if check_permutation(perm, self.vertex_count).is_err() {
            return false;
        }
        self.edges.iter().all(|e| {
            let mapped = self.hop(perm[e.i], perm[e.j]);
            let want = if conjugate { e.w.conj() } else { e.w };
            (mapped - want).norm() <= tol
        })
    }

    /// Spectrum-free isomorphism check through an explicit vertex map `v -> map[v]`.
    pub fn is_isomorphism_to(&self, other: &Self, map: &[usize], tol: f64) -> bool {
        if self.vertex_count != other.vertex_count
            || self.edge_count() != other.edge_count()
            || check_permutation(map, self.vertex_count).is_err()
        {
            return false;
        }
        self.edges
            .iter()
            .all(|e| (other.hop(map[e.i], map[e.j]) - e.w).norm() <= tol)
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "length {} for {} vertices",
            perm.len(),
            n
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a bijection")));
        }
    }
    Ok(())
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Path on `weights.len() + 1` vertices; edge `(k, k+1)` carries `weights[k]`.
pub fn build_weighted_chain(weights: &[Complex64]) -> Result<HermitianWeightedGraph> {
    if weights.is_empty() {
        return Err(Error::InvalidGraph("weight list is empty".into()));
    }
    if let Some(index) = weights.iter().position(|w| w.norm() == 0.0) {
        return Err(Error::ZeroWeight { index });
    }
    HermitianWeightedGraph::new(
        weights.len() + 1,
        weights.iter().enumerate().map(|(k, &w)| (k, k + 1, w)),
        None,
    )
}

/// The two-vertex chain.
pub fn build_two_site() -> HermitianWeightedGraph {
    build_weighted_chain(&[c(1.0)]).expect("unit chain is valid")
}

/// Occupation label used for Fock-state vertices, e.g. `"2,0,1"`.
pub(crate) fn occupation_label(occ: &[u32]) -> String {
    occ.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

/// The quantum wire `G_N`: `N + 1` vertices, edge `(n, n+1)` weighted `sqrt((n+1)(N-n))`.
///
/// Vertex `n` is the Fock state with `N - n` bosons on the left site and `n` on the right.
pub fn build_g_line(n: u32) -> Result<HermitianWeightedGraph> {
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "N",
            value: n.to_string(),
            range: ">= 1",
        });
    }
    let n64 = u64::from(n);
    let weights: Vec<_> = (0..n64)
        .map(|k| c((((k + 1) * (n64 - k)) as f64).sqrt()))
        .collect();
    let labels = (0..=n).map(|k| occupation_label(&[n - k, k])).collect();
    build_weighted_chain(&weights)?.with_labels(Some(labels))
}

/// The `d`-dimensional unit hypercube. Vertex index bits, most significant first,
/// are the bitstring label.
pub fn build_hypercube(d: u32) -> Result<HermitianWeightedGraph> {
    if !(1..=MAX_HYPERCUBE_DIM).contains(&d) {
        return Err(Error::OutOfRange {
            what: "hypercube dimension",
            value: d.to_string(),
            range: "1..=16",
        });
    }
    let n = 1usize << d;
    let mut edges = Vec::with_capacity(n * d as usize / 2);
    for v in 0..n {
        for b in 0..d {
            let u = v ^ (1 << b);
            if v < u {
                edges.push((v, u, c(1.0)));
            }
        }
    }
    let labels = (0..n)
        .map(|v| format!("{:0width$b}", v, width = d as usize))
        .collect();
    HermitianWeightedGraph::new(n, edges, Some(labels))
}

/// Triangle whose directed hops `0 -> 2 -> 1 -> 0` all equal `i/sqrt(3)`.
///
/// Vertices are numbered clockwise. A walker follows the `+i` hops, so it
/// advances to the counterclockwise neighbour (`0 -> 2 -> 1`) every `2*pi/3`.
pub fn build_triangle_complex() -> HermitianWeightedGraph {
    let a = Complex64::new(0.0, 1.0 / 3f64.sqrt());
    // Stored weights are the increasing-index hops, the conjugates of the +i ones.
    HermitianWeightedGraph::new(3, [(0, 1, a.conj()), (1, 2, a.conj()), (0, 2, a)], None)
        .expect("triangle is valid")
}

/// Square 0-1-2-3-0 with stored weights `1, e^{i alpha}, e^{i beta}, e^{i gamma}`
/// on edges (0,1), (1,2), (2,3), (0,3). The flux around `0 -> 1 -> 2 -> 3 -> 0`
/// is `alpha + beta - gamma`.
pub fn build_phased_square(alpha: f64, beta: f64, gamma: f64) -> HermitianWeightedGraph {
    HermitianWeightedGraph::new(
        4,
        [
            (0, 1, c(1.0)),
            (1, 2, Complex64::from_polar(1.0, alpha)),
            (2, 3, Complex64::from_polar(1.0, beta)),
            (0, 3, Complex64::from_polar(1.0, gamma)),
        ],
        None,
    )
    .expect("square is valid")
}

/// Complete graph on four vertices: weight `a` on the cycle edges
/// (0,1), (1,2), (2,3), (0,3) and `b` on the diagonals (0,2), (1,3).
pub fn build_complete4(a: Complex64, b: Complex64) -> Result<HermitianWeightedGraph> {
    if a.norm() == 0.0 {
        return Err(Error::ZeroWeight { index: 0 });
    }
    if b.norm() == 0.0 {
        return Err(Error::ZeroWeight { index: 4 });
    }
    HermitianWeightedGraph::new(
        4,
        [(0, 1, a), (1, 2, a), (2, 3, a), (0, 3, a), (0, 2, b), (1, 3, b)],
        None,
    )
}

/// The K4 weights that give spectrum `{-2, 0, 0, 2}` without perfect transfer.
pub fn build_complete4_counterexample() -> HermitianWeightedGraph {
    build_complete4(Complex64::new(0.0, FRAC_1_SQRT_2), Complex64::new(0.0, 1.0))
        .expect("nonzero weights")
}

/// Graph Cartesian product: Hamiltonian `H_A (x) I + I (x) H_B`.
///
/// Vertex `(u, v)` has index `u * |B| + v`. Labels are joined with `|` when both
/// factors are labelled.
pub fn cartesian_product(
    a: &HermitianWeightedGraph,
    b: &HermitianWeightedGraph,
) -> HermitianWeightedGraph {
    let nb = b.vertex_count;
    let n = a.vertex_count * nb;
    let mut edges = Vec::with_capacity(a.edge_count() * nb + b.edge_count() * a.vertex_count);
    for u in 0..a.vertex_count {
        for e in &b.edges {
            edges.push((u * nb + e.i, u * nb + e.j, e.w));
        }
    }
    for e in &a.edges {
        for v in 0..nb {
            edges.push((e.i * nb + v, e.j * nb + v, e.w));
        }
    }
    let labels = match (&a.labels, &b.labels) {
        (Some(la), Some(lb)) => Some(
            la.iter()
                .flat_map(|x| lb.iter().map(move |y| format!("{x}|{y}")))
                .collect(),
        ),
        _ => None,
    };
    HermitianWeightedGraph::new(n, edges, labels).expect("product of valid graphs is valid")
}

/// `k`-fold Cartesian power; `k = 0` gives the single-vertex identity graph.
pub fn cartesian_power(g: &HermitianWeightedGraph, k: u32) -> HermitianWeightedGraph {
    let mut out = HermitianWeightedGraph::new(1, [], g.labels.as_ref().map(|_| vec![String::new()]))
        .expect("single vertex");
    for m in 0..k {
        out = if m == 0 {
            g.clone()
        } else {
            cartesian_product(&out, g)
        };
    }
    out
}

/// Divides every weight by the largest weight magnitude and returns that scale.
///
/// Hitting times of the rescaled graph are `scale` times those of the original.
pub fn rescale_to_max_weight(
    g: &HermitianWeightedGraph,
) -> Result<(HermitianWeightedGraph, f64)> {
    let scale = g
        .max_weight()
        .ok_or_else(|| Error::InvalidGraph("cannot rescale an edgeless graph".into()))?;
    let edges = g.edges.iter().map(|e| (e.i, e.j, e.w / scale));
    Ok((
        HermitianWeightedGraph::new(g.vertex_count, edges, g.labels.clone())?,
        scale,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleFlux {
    pub cycle: Vec<usize>,
    /// Argument of the product of directed hops along `cycle`, in `(-pi, pi]`.
    pub flux: f64,
}

/// Flux through a closed walk. The closing vertex may be repeated at the end or omitted.
pub fn cycle_flux(g: &HermitianWeightedGraph, cycle: &[usize]) -> Result<CycleFlux> {
    let mut cycle = cycle.to_vec();
    if cycle.len() > 1 && cycle.first() == cycle.last() {
        cycle.pop();
    }
    if cycle.len() < 3 {
        return Err(Error::InvalidGraph("a cycle needs at least three vertices".into()));
    }
    let mut product = Complex64::new(1.0, 0.0);
    for (k, &from) in cycle.iter().enumerate() {
        let to = cycle[(k + 1) % cycle.len()];
        if from >= g.vertex_count || to >= g.vertex_count || !g.is_adjacent(from, to) {
            return Err(Error::InvalidGraph(format!("({from}, {to}) is not an edge")));
        }
        product *= g.hop(from, to);
    }
    Ok(CycleFlux {
        cycle,
        flux: wrap_phase(product.arg()),
    })
}

/// Maps an angle into `(-pi, pi]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let mut x = phi.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn weights(g: &HermitianWeightedGraph) -> Vec<Complex64> {
        g.edges().iter().map(|e| e.w).collect()
    }

    #[test]
    fn chain_rejects_bad_input() {
        assert!(build_weighted_chain(&[]).is_err());
        assert!(matches!(
            build_weighted_chain(&[c(1.0), c(0.0)]),
            Err(Error::ZeroWeight { index: 1 })
        ));
    }

    #[test]
    fn chain_examples() {
        let p = build_weighted_chain(&[c(1.0)]).unwrap();
        assert_eq!(p.vertex_count(), 2);
        assert_eq!(weights(&p), vec![c(1.0)]);

        let g3 = build_weighted_chain(&[c(3f64.sqrt()), c(2.0), c(3f64.sqrt())]).unwrap();
        assert_eq!(weights(&g3), weights(&build_g_line(3).unwrap()));
    }

    #[test]
    fn g_line_weights() {
        assert!(build_g_line(0).is_err());
        assert_eq!(weights(&build_g_line(1).unwrap()), vec![c(1.0)]);
        let s2 = 2f64.sqrt();
        assert_eq!(weights(&build_g_line(2).unwrap()), vec![c(s2), c(s2)]);
        let s6 = 6f64.sqrt();
        assert_eq!(
            weights(&build_g_line(4).unwrap()),
            vec![c(2.0), c(s6), c(s6), c(2.0)]
        );
        let g = build_g_line(3).unwrap();
        assert_eq!(g.labels().unwrap(), ["3,0", "2,1", "1,2", "0,3"]);
    }

    #[test]
    fn hypercube_shape() {
        assert!(build_hypercube(0).is_err());
        assert!(build_hypercube(17).is_err());
        let h1 = build_hypercube(1).unwrap();
        assert_eq!(h1.to_dense(), build_two_site().to_dense());
        let h3 = build_hypercube(3).unwrap();
        assert_eq!(h3.edge_count(), 12);
        assert!((0..8).all(|v| h3.degree(v) == 3));
        let h2 = build_hypercube(2).unwrap();
        assert_eq!(
            h2.to_dense(),
            cartesian_product(&build_two_site(), &build_two_site()).to_dense()
        );
    }

    #[test]
    fn triangle_is_purely_imaginary() {
        let t = build_triangle_complex();
        let h = t.to_dense();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h[(i, j)].re, 0.0);
                assert_relative_eq!(h[(i, j)].im, -h[(j, i)].im);
            }
        }
        let third = 1.0 / 3f64.sqrt();
        for (a, b) in [(0, 2), (2, 1), (1, 0)] {
            assert_relative_eq!(t.hop(a, b).im, third);
        }
        let f = cycle_flux(&t, &[0, 1, 2, 0]).unwrap();
        assert_relative_eq!(f.flux, PI / 2.0, epsilon = 1e-15);
        let f = cycle_flux(&t, &[0, 2, 1]).unwrap();
        assert_relative_eq!(f.flux, -PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn square_flux_is_alpha_plus_beta_minus_gamma() {
        let sq = build_phased_square(0.3, 0.7, 1.4);
        let f = cycle_flux(&sq, &[0, 1, 2, 3]).unwrap();
        assert_relative_eq!(f.flux, 0.3 + 0.7 - 1.4, epsilon = 1e-14);
        let sq = build_phased_square(0.3, 0.7, 1.0);
        assert!(cycle_flux(&sq, &[0, 1, 2, 3]).unwrap().flux.abs() < 1e-14);
        let unweighted = build_phased_square(0.0, 0.0, 0.0);
        assert_eq!(
            unweighted.to_dense(),
            cartesian_product(&build_two_site(), &build_two_site()).permute(&[0, 1, 3, 2]).unwrap().to_dense()
        );
    }

    #[test]
    fn flux_rejects_non_cycles() {
        let g = build_g_line(3).unwrap();
        assert!(cycle_flux(&g, &[0, 1, 2]).is_err());
        assert!(cycle_flux(&g, &[0, 1]).is_err());
        let sq = build_phased_square(0.0, 0.0, 0.0);
        assert_eq!(cycle_flux(&sq, &[0, 1, 2, 3]).unwrap().flux, 0.0);
    }

    #[test]
    fn complete4_rejects_zero() {
        assert!(build_complete4(c(0.0), c(1.0)).is_err());
        assert!(build_complete4(c(1.0), c(0.0)).is_err());
        let k4 = build_complete4(c(1.0), c(1.0)).unwrap();
        assert_eq!(k4.edge_count(), 6);
    }

    #[test]
    fn constructor_validation() {
        let one = c(1.0);
        assert!(HermitianWeightedGraph::new(0, [], None).is_err());
        assert!(HermitianWeightedGraph::new(2, [(0, 0, one)], None).is_err());
        assert!(HermitianWeightedGraph::new(2, [(0, 2, one)], None).is_err());
        assert!(HermitianWeightedGraph::new(2, [(0, 1, one), (1, 0, one)], None).is_err());
        assert!(HermitianWeightedGraph::new(2, [], Some(vec!["a".into()])).is_err());
        let g = HermitianWeightedGraph::new(2, [(0, 1, c(0.0))], None).unwrap();
        assert_eq!(g.edge_count(), 0);
        // (1, 0, w) is the same Hamiltonian as (0, 1, conj w).
        let w = Complex64::new(0.5, 0.25);
        let g = HermitianWeightedGraph::new(2, [(1, 0, w)], None).unwrap();
        assert_eq!(g.edges()[0].w, w.conj());
        assert_eq!(g.hop(1, 0), w);
    }

    #[test]
    fn product_with_single_edge_doubles_graph() {
        let a = build_g_line(3).unwrap();
        let prod = cartesian_product(&build_g_line(1).unwrap(), &a);
        assert_eq!(prod.vertex_count(), 8);
        assert_eq!(prod.edge_count(), 2 * a.edge_count() + 4);
        for v in 0..4 {
            assert_eq!(prod.hop(v, 4 + v), c(1.0));
        }
        assert_eq!(prod.label(5), Some("0,1|2,1"));
    }

    #[test]
    fn rescale_examples() {
        let (g, s) = rescale_to_max_weight(&build_g_line(2).unwrap()).unwrap();
        assert_eq!(s, 2f64.sqrt());
        assert!(g.edges().iter().all(|e| (e.w - c(1.0)).norm() < 1e-15));
        let (p, s) = rescale_to_max_weight(&build_two_site()).unwrap();
        assert_eq!(s, 1.0);
        assert_eq!(p, build_two_site());
        let (_, s) = rescale_to_max_weight(&build_g_line(4).unwrap()).unwrap();
        assert_eq!(s, 6f64.sqrt());
        let lone = HermitianWeightedGraph::new(1, [], None).unwrap();
        assert!(rescale_to_max_weight(&lone).is_err());
    }

    #[test]
    fn automorphisms() {
        let g = build_g_line(4).unwrap();
        assert!(g.is_automorphism(&[4, 3, 2, 1, 0], false, 0.0));
        assert!(!g.is_automorphism(&[1, 0, 2, 3, 4], false, 0.0));
        assert!(!g.is_automorphism(&[0, 0, 2, 3, 4], false, 0.0));
        let t = build_triangle_complex();
        assert!(t.is_automorphism(&[1, 2, 0], false, 1e-15));
        // Reflection reverses the handedness of the hops.
        assert!(!t.is_automorphism(&[0, 2, 1], false, 1e-15));
        assert!(t.is_automorphism(&[0, 2, 1], true, 1e-15));
    }

    #[test]
    fn power_of_edge_is_hypercube() {
        let p = build_two_site();
        assert_eq!(cartesian_power(&p, 0).vertex_count(), 1);
        let cube = cartesian_power(&p, 3);
        let ident: Vec<usize> = (0..8).collect();
        assert!(cube.is_isomorphism_to(&build_hypercube(3).unwrap(), &ident, 0.0));
    }

    #[test]
    fn wrap_phase_range() {
        assert_relative_eq!(wrap_phase(3.0 * PI / 2.0), -PI / 2.0);
        assert_relative_eq!(wrap_phase(-PI), PI);
        assert_relative_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(0.0), 0.0);
    }
}
