use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use commoninfo::aux::AuxDecomposition;
use commoninfo::csv::fmt_sig;
use commoninfo::gaussian::{gaussian_joint_rd, gaussian_lossy_wyner_ci, gaussian_slb, GaussianSource};
use commoninfo::gk::{ergodic_decomposition, gk_common_information};
use commoninfo::gw::{lossless_point, lossy_point, vkg_point};
use commoninfo::lossy::{
    joint_rd, lossy_gk_ci, markov_witness, slb_joint, DistortionSpec, LossyDecomposition, RdConfig,
};
use commoninfo::aux::SolverConfig;
use commoninfo::verify::random_block_source;
use commoninfo::{Axis, JointPMF, NDDist};

fn pmf_strategy(max: usize) -> impl Strategy<Value = JointPMF> {
    (1..=max, 1..=max)
        .prop_flat_map(|(nx, ny)| prop::collection::vec(prop_oneof![Just(0.0), 0.01f64..1.0], nx * ny).prop_map(move |v| (nx, ny, v)))
        .prop_filter("some mass", |(_, _, v)| v.iter().any(|&x| x > 0.0))
        .prop_map(|(_, ny, v)| {
            let rows: Vec<Vec<f64>> = v.chunks(ny).map(<[f64]>::to_vec).collect();
            JointPMF::from_rows(&rows).unwrap()
        })
}

fn full_support_pmf(n: usize) -> impl Strategy<Value = JointPMF> {
    prop::collection::vec(0.05f64..1.0, n * n).prop_map(move |v| {
        let rows: Vec<Vec<f64>> = v.chunks(n).map(<[f64]>::to_vec).collect();
        JointPMF::from_rows(&rows).unwrap()
    })
}

fn kernel(rows: usize, k: usize, raw: &[f64]) -> Vec<f64> {
    raw.chunks(k)
        .take(rows)
        .flat_map(|r| {
            let s: f64 = r.iter().sum();
            r.iter().map(move |v| v / s).collect::<Vec<_>>()
        })
        .collect()
}

fn perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_chain_rule_and_mi_bounds(pmf in pmf_strategy(4)) {
        let nd = pmf.to_nd();
        let hx = nd.entropy(&["X"]).unwrap();
        let hy = nd.entropy(&["Y"]).unwrap();
        let hxy = nd.entropy(&["X", "Y"]).unwrap();
        let hy_x = nd.conditional_entropy(&["Y"], &["X"]).unwrap();
        prop_assert!((hxy - hx - hy_x).abs() < 1e-12);
        let i = pmf.mutual_information();
        prop_assert!(i >= 0.0 && i <= hx.min(hy) + 1e-12);
        prop_assert!((i - (hx + hy - hxy)).abs() < 1e-12);
    }

    #[test]
    fn gk_is_bounded_and_label_invariant(
        (pmf, px, py) in pmf_strategy(4).prop_flat_map(|p| {
            let (nx, ny) = (p.nx(), p.ny());
            (Just(p), perm(nx), perm(ny))
        })
    ) {
        let gk = gk_common_information(&pmf);
        prop_assert!(gk >= 0.0 && gk <= pmf.mutual_information() + 1e-12);
        let q = pmf.permuted(&px, &py).unwrap();
        prop_assert!((gk_common_information(&q) - gk).abs() < 1e-12);
        let dec = ergodic_decomposition(&pmf);
        prop_assert!((dec.j_pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn block_sources_decompose_into_their_blocks(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (pmf, masses) = random_block_source(&mut rng);
        let dec = ergodic_decomposition(&pmf);
        prop_assert_eq!(dec.len(), masses.len());
        let h: f64 = masses.iter().map(|m| -m * m.log2()).sum();
        prop_assert!((gk_common_information(&pmf) - h).abs() < 1e-12);
    }

    #[test]
    fn lossless_points_respect_cut_set_bounds(
        pmf in pmf_strategy(3),
        k in 1usize..=4,
        raw in prop::collection::vec(0.01f64..1.0, 36),
    ) {
        let cells = pmf.nx() * pmf.ny();
        let aux = AuxDecomposition::new(&pmf, kernel(cells, k, &raw), k).unwrap();
        let p = lossless_point(&pmf, &aux).unwrap();
        prop_assert!(p.r0 + p.r1 >= pmf.entropy_x() - 1e-9);
        prop_assert!(p.r0 + p.r2 >= pmf.entropy_y() - 1e-9);
        prop_assert!(p.sum() >= pmf.entropy_xy() - 1e-9);
        prop_assert!(p.r0 <= pmf.entropy_xy() + 1e-9);
    }

    #[test]
    fn kernel_extension_preserves_the_source(
        pmf in pmf_strategy(3),
        raw in prop::collection::vec(0.01f64..1.0, 27),
    ) {
        let cells = pmf.nx() * pmf.ny();
        let nd = pmf.to_nd().extend(Axis::indexed("U", 3), &kernel(cells, 3, &raw)).unwrap();
        let back = nd.marginal(&["X", "Y"]).unwrap();
        prop_assert!(back.max_abs_diff(&pmf.to_nd()).unwrap() < 1e-12);
        let a = nd.conditional_mutual_information(&["X"], &["Y"], &["U"]).unwrap();
        let b = nd.conditional_mutual_information(&["Y"], &["X"], &["U"]).unwrap();
        prop_assert!(a >= 0.0 && (a - b).abs() < 1e-12);
    }

    #[test]
    fn vkg_corner_dominates_on_markov_joints(raw in prop::collection::vec(0.01f64..1.0, 2 + 4 + 4 + 8 + 8)) {
        // U first, then X̂ and Ŷ independently given U, then X from (X̂,U)
        // and Y from (Ŷ,U)
        let pu = kernel(1, 2, &raw[0..2]);
        let pxh = kernel(2, 2, &raw[2..6]);
        let pyh = kernel(2, 2, &raw[6..10]);
        let px = kernel(4, 2, &raw[10..18]);
        let py = kernel(4, 2, &raw[18..26]);
        let mut p = vec![0.0; 32];
        for x in 0..2 { for y in 0..2 { for a in 0..2 { for b in 0..2 { for u in 0..2 {
            let v = pu[u] * pxh[u * 2 + a] * pyh[u * 2 + b] * px[(a * 2 + u) * 2 + x] * py[(b * 2 + u) * 2 + y];
            p[(((x * 2 + y) * 2 + a) * 2 + b) * 2 + u] = v;
        }}}}}
        let axes = ["X", "Y", "Xh", "Yh", "U"].iter().map(|n| Axis::indexed(*n, 2)).collect();
        let joint = NDDist::new(axes, p).unwrap();
        let spec = DistortionSpec::hamming(2, 2);
        let (lp, _, _) = lossy_point(&joint, &spec).unwrap();
        let v = vkg_point(&joint, &spec).unwrap();
        prop_assert!(v.corner.r0 >= lp.r0 - 1e-9);
        prop_assert!(v.corner.r1 >= lp.r1 - 1e-9);
        prop_assert!(v.corner.r2 >= lp.r2 - 1e-9);
        prop_assert!(v.admits(&v.corner, 1e-9));
    }

    #[test]
    fn fmt_sig_keeps_nine_digits(v in prop_oneof![-1e12f64..1e12, -1e-3f64..1e-3]) {
        let back: f64 = fmt_sig(v).parse().unwrap();
        prop_assert!((back - v).abs() <= 5e-9 * v.abs() + 1e-300);
    }

    #[test]
    fn gaussian_orderings(rho in 0.0f64..0.99, d1 in 1e-3f64..0.999, d2 in 1e-3f64..0.999) {
        let src = GaussianSource::new(rho).unwrap();
        let rd = gaussian_joint_rd(&src, d1, d2).unwrap();
        let ci = gaussian_lossy_wyner_ci(&src, d1, d2).unwrap();
        let (slb, _) = gaussian_slb(&src, d1, d2).unwrap();
        prop_assert!(ci >= 0.0 && ci <= rd + 1e-12);
        prop_assert!(slb <= rd + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn slb_never_exceeds_joint_rd(pmf in full_support_pmf(2), d1 in 0.0f64..0.4, d2 in 0.0f64..0.4) {
        let spec = DistortionSpec::hamming(2, 2);
        let rd = joint_rd(&pmf, &spec, d1, d2, &RdConfig::default()).unwrap();
        prop_assert!(slb_joint(&pmf, &spec, d1, d2).unwrap() <= rd.rate + 1e-5);
        prop_assert!(rd.lower_bound <= rd.rate + 1e-12);
        prop_assert!(rd.d1_achieved <= d1 + 1e-5 && rd.d2_achieved <= d2 + 1e-5);
    }

    #[test]
    fn markov_witness_is_exact(pmf in full_support_pmf(2), d in 0.01f64..0.2, raw in prop::collection::vec(0.01f64..1.0, 8)) {
        let spec = DistortionSpec::hamming(2, 2);
        let rd = joint_rd(&pmf, &spec, d, d, &RdConfig::default()).unwrap();
        let q = kernel(4, 2, &raw);
        let w = markov_witness(&pmf, &rd, &q, 2).unwrap();
        prop_assert!(w.reconstruction_markov() < 1e-10);
        let orig = LossyDecomposition::new(&pmf, &rd, q, 2).unwrap();
        let a = w.joint.marginal(&["X", "Y", "Xh", "Yh"]).unwrap();
        let b = orig.joint.marginal(&["X", "Y", "Xh", "Yh"]).unwrap();
        prop_assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
    }

    #[test]
    fn lossy_gk_below_lossless_gk(seed in any::<u64>(), d1 in 0.0f64..0.3, d2 in 0.0f64..0.3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (pmf, _) = random_block_source(&mut rng);
        let spec = DistortionSpec::hamming(pmf.nx(), pmf.ny());
        let cfg = SolverConfig { restarts: 2, ..SolverConfig::default() };
        let v = lossy_gk_ci(&pmf, &spec, d1, d2, &cfg).unwrap().value;
        prop_assert!(v >= 0.0 && v <= gk_common_information(&pmf) + 1e-9);
    }
}
