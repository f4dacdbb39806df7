mod common;

use std::f64::consts::PI;

use bosewalk::ctqw::{self, eigendecompose};
use bosewalk::fock::{dual_graph, enumerate_fock_basis, lift_permutation, multi_spin_dual};
use bosewalk::graph::{
    build_g_line, build_hypercube, build_two_site, cartesian_product, cycle_flux, parse_graph,
    rescale_to_max_weight, serialize_graph, wrap_phase, HermitianWeightedGraph,
};
use bosewalk::lattice::{build_potential, initial_packet, LatticeConfig, SplitStep};
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_b05e;

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

fn sorted_spectrum(g: &HermitianWeightedGraph) -> Vec<f64> {
    eigendecompose(g).unwrap().eigenvalues().to_vec()
}

#[test]
fn product_spectrum_is_pairwise_sums() {
    let mut r = rng(1);
    for _ in 0..20 {
        let (va, vb) = (r.gen_range(2..5), r.gen_range(2..5));
        let (a, b) = (random_graph(&mut r, va), random_graph(&mut r, vb));
        let mut want: Vec<f64> = sorted_spectrum(&a)
            .iter()
            .flat_map(|x| sorted_spectrum(&b).into_iter().map(move |y| x + y))
            .collect();
        want.sort_by(f64::total_cmp);
        let got = sorted_spectrum(&cartesian_product(&a, &b));
        for (x, y) in got.iter().zip(&want) {
            assert!((x - y).abs() < 1e-10, "{got:?} vs {want:?}");
        }
    }
}

#[test]
fn gauge_transform_preserves_flux_and_spectrum() {
    let mut r = rng(2);
    for _ in 0..20 {
        let v = r.gen_range(3..6);
        let g = random_graph(&mut r, v);
        let phases: Vec<f64> = (0..v).map(|_| r.gen_range(-PI..PI)).collect();
        let h = g.gauge_transform(&phases).unwrap();
        for cycle in [vec![0, 1, 2], (0..v).collect::<Vec<_>>()] {
            if cycle.windows(2).all(|w| g.is_adjacent(w[0], w[1])) && g.is_adjacent(*cycle.last().unwrap(), cycle[0]) {
                let (f, fh) = (cycle_flux(&g, &cycle).unwrap().flux, cycle_flux(&h, &cycle).unwrap().flux);
                assert!(wrap_phase(f - fh).abs() < 1e-12);
            }
        }
        for (x, y) in sorted_spectrum(&g).iter().zip(sorted_spectrum(&h)) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn rescaling_round_trip_and_time_law() {
    let mut r = rng(3);
    for _ in 0..20 {
        let v = r.gen_range(2..6);
        let g = random_graph(&mut r, v);
        let (unit, scale) = rescale_to_max_weight(&g).unwrap();
        assert!((unit.max_weight().unwrap() - 1.0).abs() < 1e-15);
        for (e, u) in g.edges().iter().zip(unit.edges()) {
            assert!((u.w * scale - e.w).norm() <= 1e-14 * e.w.norm());
        }
    }
    // Hitting time scales inversely with the couplings.
    for n in 1..=6 {
        let g = build_g_line(n).unwrap();
        let (unit, scale) = rescale_to_max_weight(&g).unwrap();
        let t = ctqw::certify_pst(&g, 0, n as usize, None).unwrap();
        let tu = ctqw::certify_pst(&unit, 0, n as usize, None).unwrap();
        assert!(t.certified && tu.certified);
        assert!((tu.hitting_time - scale * t.hitting_time).abs() < 1e-9 * scale, "n = {n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha, ..ProptestConfig::default() })]

    #[test]
    fn serialization_is_bit_exact(
        v in 2usize..7,
        raw in prop::collection::vec((any::<f64>(), any::<f64>()), 1..10),
    ) {
        let edges: Vec<(usize, usize, Complex64)> = raw
            .iter()
            .enumerate()
            .filter(|(_, (re, im))| re.is_finite() && im.is_finite() && (*re != 0.0 || *im != 0.0))
            .map(|(k, &(re, im))| (k % (v - 1), k % (v - 1) + 1 + k / (v - 1) % (v - 1 - k % (v - 1)), Complex64::new(re, im)))
            .collect();
        if let Ok(g) = HermitianWeightedGraph::new(v, edges, None) {
            let back = parse_graph(&serialize_graph(&g)).unwrap();
            prop_assert_eq!(back.edges().len(), g.edges().len());
            for (a, b) in g.edges().iter().zip(back.edges()) {
                prop_assert_eq!((a.i, a.j), (b.i, b.j));
                prop_assert_eq!(a.w.re.to_bits(), b.w.re.to_bits());
                prop_assert_eq!(a.w.im.to_bits(), b.w.im.to_bits());
            }
        }
    }

    #[test]
    fn wrapped_phase_is_in_half_open_interval(x in -1e3f64..1e3) {
        let w = wrap_phase(x);
        prop_assert!(w > -PI && w <= PI);
        prop_assert!(((x - w) / (2.0 * PI)).fract().abs() < 1e-9 || ((x - w) / (2.0 * PI)).fract().abs() > 1.0 - 1e-9);
    }
}

#[test]
fn evolution_is_unitary_and_composes() {
    let mut r = rng(4);
    for _ in 0..20 {
        let v = r.gen_range(2..7);
        let g = random_graph(&mut r, v);
        let spec = eigendecompose(&g).unwrap();
        let psi = random_state(&mut r, v);
        let (t1, t2) = (r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0));
        let a = ctqw::evolve(&spec, &psi, t1).unwrap();
        let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>();
        assert!((norm - 1.0).abs() < 1e-12);
        let ab = ctqw::evolve(&spec, &a, t2).unwrap();
        assert!(max_diff(&ab, &ctqw::evolve(&spec, &psi, t1 + t2).unwrap()) < 1e-11);
        // Exact oracle.
        let want = apply(&expm(&g.to_dense(), t1), &psi);
        assert!(max_diff(&a, &want) < 1e-10);
        // Backwards evolution undoes forwards evolution.
        assert!(max_diff(&ctqw::evolve(&spec, &a, -t1).unwrap(), &psi) < 1e-11);
    }
}

#[test]
fn spectral_reconstruction() {
    let mut r = rng(5);
    for _ in 0..20 {
        let v = r.gen_range(2..9);
        let g = random_graph(&mut r, v);
        let spec = eigendecompose(&g).unwrap();
        let scale = spec.eigenvalues().iter().fold(0f64, |m, l| m.max(l.abs()));
        assert!(spec.reconstruction_error(&g.to_dense()) <= 1e-10 * scale);
        let q = spec.eigenvectors();
        let id = q.adjoint() * q;
        for i in 0..spec.dim() {
            for j in 0..spec.dim() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - Complex64::from(want)).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn transfer_is_symmetric_on_g_lines() {
    for n in 1..=8u32 {
        let g = build_g_line(n).unwrap();
        let spec = eigendecompose(&g).unwrap();
        let fwd = ctqw::find_hitting_time(&spec, 0, n as usize, 4.0 * PI, 10_000).unwrap();
        let back = ctqw::find_hitting_time(&spec, n as usize, 0, 4.0 * PI, 10_000).unwrap();
        assert!((fwd.hitting_time - back.hitting_time).abs() < 1e-9);
        assert!((fwd.peak_probability - back.peak_probability).abs() < 1e-12);
    }
}

#[test]
fn dual_matches_first_quantized_oracle_on_random_graphs() {
    let mut r = rng(6);
    for _ in 0..12 {
        let v = r.gen_range(2..5);
        let g = random_graph(&mut r, v);
        for n in 1..=3 {
            let d = dual_graph(&g, n).unwrap();
            let dense = d.to_dense();
            let oracle = symmetric_subspace_hamiltonian(&g, n as usize);
            let idx = |label: &str| d.find_label(label).unwrap();
            let mut checked = 0;
            for ((to, from), z) in &oracle {
                assert!((dense[(idx(to), idx(from))] - z).norm() < 1e-12);
                checked += 1;
            }
            // Every nonzero dual entry is accounted for by the oracle.
            let nonzero = dense.iter().filter(|z| z.norm() > 1e-14).count();
            let oracle_nonzero = oracle.values().filter(|z| z.norm() > 1e-14).count();
            assert_eq!(nonzero, oracle_nonzero);
            assert!(checked > 0);
        }
    }
}

#[test]
fn dual_degree_bound_and_variation() {
    let mut r = rng(7);
    for _ in 0..10 {
        let v = r.gen_range(3..5);
        let g = random_graph(&mut r, v);
        for n in 2..=3u32 {
            let d = dual_graph(&g, n).unwrap();
            let degrees: Vec<usize> = (0..d.vertex_count()).map(|x| d.degree(x)).collect();
            assert!(degrees.iter().all(|&k| k <= g.edge_count() * n as usize));
            assert!(degrees.iter().min() < degrees.iter().max());
        }
    }
}

#[test]
fn hypercube_from_single_boson_sectors() {
    for n in 1..=6usize {
        let q = multi_spin_dual(&build_two_site(), &vec![1; n]).unwrap();
        let cube = build_hypercube(n as u32).unwrap();
        let identity: Vec<usize> = (0..1 << n).collect();
        assert!(q.is_isomorphism_to(&cube, &identity, 1e-14), "n = {n}");
    }
}

#[test]
fn lifted_automorphisms_preserve_random_symmetric_duals() {
    // Mirror-symmetric random chains with real weights are invariant under reversal.
    let mut r = rng(8);
    for _ in 0..10 {
        let v = r.gen_range(2..6);
        let half: Vec<f64> = (0..v / 2).map(|_| r.gen_range(0.3..2.0)).collect();
        let weights: Vec<Complex64> = (0..v - 1)
            .map(|k| Complex64::from(half[k.min(v - 2 - k)]))
            .collect();
        let g = bosewalk::graph::build_weighted_chain(&weights).unwrap();
        let perm: Vec<usize> = (0..v).rev().collect();
        assert!(g.is_automorphism(&perm, false, 1e-14));
        for n in 1..=3 {
            let d = dual_graph(&g, n).unwrap();
            let lifted = lift_permutation(&enumerate_fock_basis(v, n).unwrap(), &perm).unwrap();
            assert!(d.is_automorphism(&lifted, false, 1e-12));
        }
    }
}

#[test]
fn lattice_propagation_invariants_on_random_packets() {
    let mut r = rng(9);
    for _ in 0..4 {
        let config = LatticeConfig {
            sites: 21,
            s0: r.gen_range(4.0..8.0),
            a: r.gen_range(0.0..5e-3),
            j0: r.gen_range(-5.0..5.0),
            packet_width: r.gen_range(0.5..2.0),
            ..LatticeConfig::default()
        };
        let (grid, v) = build_potential(&config).unwrap();
        let psi0 = initial_packet(&config, grid).unwrap();
        let mut s = SplitStep::new(grid, v, 0.0, config.dt).unwrap();
        let e0 = s.energy(&psi0);
        let mut psi = psi0.clone();
        let mut worst = 0f64;
        s.propagate(&mut psi, 40.0, 50, |_, w| worst = worst.max((w.norm() - 1.0).abs())).unwrap();
        assert!(worst < 1e-8);
        let drift = ((s.energy(&psi) - e0) / e0).abs();
        assert!(drift < 1e-6, "{config:?}: {drift:e}");
        psi.values.iter_mut().for_each(|z| *z = z.conj());
        s.propagate(&mut psi, 40.0, usize::MAX, |_, _| {}).unwrap();
        let back: Complex64 = psi0.values.iter().zip(&psi.values).map(|(a, b)| a * b).sum::<Complex64>() * grid.dx;
        assert!(back.norm_sqr() >= 1.0 - 1e-6);
    }
}
