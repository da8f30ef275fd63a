mod common;

use nalgebra::{DMatrix, DVector};
use pathhodge::complex::{build_boundary_n, build_d_n, chain_homology, Cochain, PathComplex};
use pathhodge::digraph::{enumerate_allowed, graph_distance, is_allowed, Digraph, ElementaryPath};
use pathhodge::heat::{evolve, heat_operator};
use pathhodge::hodge::LaplacianBundle;
use pathhodge::oracle::{compare, exact_dims, float_dims};
use pathhodge::walk::{self, SignedNeighborTable};
use proptest::prelude::*;

fn digraph_strategy(max_n: usize) -> impl Strategy<Value = Digraph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let edges = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| a != b && bits[a * n + b]);
            Digraph::new(n, edges.collect::<Vec<_>>()).unwrap()
        })
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn coords(len: usize) -> impl Strategy<Value = DVector<f64>> {
    proptest::collection::vec(-1.0f64..1.0, len).prop_map(DVector::from_vec)
}

fn psd_defect(m: &DMatrix<f64>) -> f64 {
    pathhodge::linalg::sym_eigen(m).values.iter().fold(0.0f64, |a, &l| a.max(-l))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_squared_vanishes(n in 1usize..=4, p in 0usize..=2) {
        let dd = build_d_n(n, p + 1).matrix.matmul(&build_d_n(n, p).matrix);
        prop_assert!(dd.is_zero());
    }

    #[test]
    fn boundary_squared_vanishes(n in 1usize..=4, p in 2usize..=4) {
        let bb = build_boundary_n(n, p - 1).matrix.matmul(&build_boundary_n(n, p).matrix);
        prop_assert!(bb.is_zero());
    }

    #[test]
    fn boundary_is_adjoint_of_d(n in 1usize..=4, p in 0usize..=2, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let d = build_d_n(n, p);
        let b = build_boundary_n(n, p + 1);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f: Vec<f64> = (0..d.matrix.cols()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..d.matrix.rows()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lhs: f64 = d.apply(&f).iter().zip(&g).map(|(a, b)| a * b).sum();
        let rhs: f64 = f.iter().zip(b.apply(&g)).map(|(a, b)| a * b).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn cohomology_is_relabel_invariant((g, perm) in digraph_strategy(5).prop_flat_map(|g| {
        let n = g.n_vertices();
        (Just(g), permutation(n))
    })) {
        let h = g.relabeled(&perm).unwrap();
        prop_assert_eq!(PathComplex::new(&g, 2).cohomology_dims(), PathComplex::new(&h, 2).cohomology_dims());
        prop_assert_eq!(chain_homology(&g, 2).betti, chain_homology(&h, 2).betti);
    }

    #[test]
    fn distance_is_a_metric(g in digraph_strategy(7)) {
        let dist = graph_distance(&g);
        let n = g.n_vertices();
        for x in 0..n {
            prop_assert_eq!(dist.get(x, x), Some(0));
            for y in 0..n {
                prop_assert_eq!(dist.get(x, y), dist.get(y, x));
                for z in 0..n {
                    if let (Some(a), Some(b)) = (dist.get(x, y), dist.get(y, z)) {
                        prop_assert!(dist.get(x, z).is_some_and(|c| c <= a + b));
                    }
                }
            }
        }
    }

    #[test]
    fn allowed_enumeration_matches_predicate(g in digraph_strategy(4), p in 0usize..=3) {
        let listed = enumerate_allowed(&g, p);
        let n = g.n_vertices();
        let mut count = 0;
        for code in 0..n.pow(p as u32 + 1) {
            let path = ElementaryPath::new(pathhodge::complex::decode(code, n, p + 1));
            if is_allowed(&g, &path).unwrap() {
                count += 1;
                prop_assert!(listed.contains(&path));
            }
        }
        prop_assert_eq!(count, listed.len());
    }

    #[test]
    fn float_dims_match_exact(g in digraph_strategy(4)) {
        let exact = exact_dims(&g, 2).unwrap();
        for c in compare(&exact, &float_dims(&g, 2)) {
            prop_assert!(c.matches(), "{:?}", c);
        }
    }

    #[test]
    fn laplacian_invariants(g in digraph_strategy(5), p in 0usize..=2, seed in any::<u64>()) {
        use rand::SeedableRng;
        let cx = PathComplex::new(&g, p + 1);
        let b = LaplacianBundle::new(&cx, p);
        let scale = b.spectral.lambda_max().max(1.0);
        prop_assert!((&b.delta - b.delta.transpose()).amax() <= 1e-12 * scale);
        prop_assert!(psd_defect(&b.delta) <= 1e-9 * scale);
        prop_assert_eq!(b.spectral.kernel_dim(), cx.cohomology_dim(p));

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = b.cochain(&common::random_vector(&mut rng, b.dim()));
        prop_assert!(b.energy_identity_residual(&f).unwrap() <= 1e-9 * scale);

        let parts = b.hodge_decompose(&f).unwrap();
        prop_assert!(parts.reconstruction_residual() <= 1e-10);
        prop_assert!(parts.max_pairwise_inner() <= 1e-10);

        // Harmonic forms are closed and co-closed.
        let h = b.harmonic_basis();
        for j in 0..h.dim() {
            let c = Cochain::new(h.ambient.clone(), h.frame.column(j).into_owned()).unwrap();
            prop_assert!(b.apply(&c).unwrap().norm() <= 1e-9 * scale);
        }

        // G commutes with Δ and inverts it off the kernel.
        let gm = b.green_matrix();
        let hp = b.harmonic_projector();
        let id = DMatrix::identity(b.dim(), b.dim());
        prop_assert!((&b.delta * &gm - &id + &hp).amax() <= 1e-9);
        prop_assert!((&gm * &b.delta - &b.delta * &gm).amax() <= 1e-9);
        prop_assert!((&gm * &hp).amax() <= 1e-10);
    }

    #[test]
    fn planted_harmonic_is_recovered(g in digraph_strategy(5), p in 0usize..=2, c in coords(8)) {
        let cx = PathComplex::new(&g, p + 1);
        let b = LaplacianBundle::new(&cx, p);
        let h = b.spectral.kernel_frame();
        let e = &b.exact_frame;
        let hc = DVector::from_fn(h.ncols(), |i, _| c[i % c.len()]);
        let ec = DVector::from_fn(e.ncols(), |i, _| c[(i + 3) % c.len()]);
        let planted = &h * &hc;
        let f = b.cochain(&(&planted + e * &ec));
        let rep = b.harmonic_representative(&f).unwrap();
        prop_assert!((b.coords(&rep).unwrap() - &planted).norm() <= 1e-9);
    }

    #[test]
    fn heat_semigroup_and_contraction(g in digraph_strategy(5), p in 0usize..=1, s in 0.0f64..3.0, t in 0.0f64..3.0, seed in any::<u64>()) {
        use rand::SeedableRng;
        let cx = PathComplex::new(&g, p + 1);
        let b = LaplacianBundle::new(&cx, p);
        let ts = heat_operator(&b, t).unwrap().matrix;
        let tt = heat_operator(&b, s).unwrap().matrix;
        let tst = heat_operator(&b, s + t).unwrap().matrix;
        prop_assert!((&ts * &tt - &tst).amax() <= 1e-10);
        prop_assert!((&ts - ts.transpose()).amax() <= 1e-12);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = b.cochain(&common::random_vector(&mut rng, b.dim()));
        let traj = evolve(&b, &f, &[0.0, s.min(t), s.max(t), s + t]).unwrap();
        prop_assert!(traj.max_norm_increase() <= 1e-12);
        for w in traj.dist_to_harmonic.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn walk_kernel_is_stochastic(g in digraph_strategy(5), d in 1usize..=2, lazy in 0.0f64..=1.0) {
        let Ok(table) = SignedNeighborTable::build(&g, d) else { return Ok(()) };
        prop_assume!(table.validate().is_ok());
        prop_assert!(table.is_symmetric());
        let op = walk::transition_matrix(&table, lazy).unwrap();
        prop_assert!(op.row_sum_deviation() <= 1e-12);
        prop_assert!(op.induced_residual() <= 1e-12);
        prop_assert!(walk::self_adjointness_residual(&table, &walk::upper_laplacian(&table)) <= 1e-12);
        if table.is_regular() {
            let explicit = walk::upper_laplacian(&table);
            let composed = walk::upper_laplacian_composed(&table);
            prop_assert!((explicit - composed).amax() <= 1e-12);
        }
    }
}

#[test]
fn zero_time_heat_is_identity() {
    for (_, g) in common::instances() {
        let b = LaplacianBundle::new(&PathComplex::new(&g, 1), 0);
        let t0 = heat_operator(&b, 0.0).unwrap().matrix;
        assert!((t0 - DMatrix::identity(b.dim(), b.dim())).amax() <= 1e-12);
    }
}
