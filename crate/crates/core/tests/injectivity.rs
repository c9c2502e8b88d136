use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use num_traits::Zero;
use superds::field::{Fp, Fq, Scalar};
use superds::injectivity::*;
use superds::linalg::{Matrix, Parity, SuperDim};
use superds::{F3, F9};

/// Graph module: even g_i, odd w_i, `z_k g_i = Σ_j A_k[i][j] w_j`.
fn graph<const P: u32>(blocks: &[Vec<Vec<i64>>]) -> OddModule<Fp<P>> {
    let s = blocks[0].len();
    let parity = (0..2 * s).map(|k| if k < s { Parity::Even } else { Parity::Odd }).collect();
    let mats = blocks
        .iter()
        .map(|a| Matrix::from_fn(2 * s, 2 * s, |r, c| if c < s && r >= s { Fp::<P>::new(a[c][r - s]) } else { Fp::<P>::new(0) }))
        .collect();
    OddModule::new(parity, mats).unwrap()
}

fn equivalence_run<const P: u32>(seed: u64, count: usize) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut free, mut witnessed) = (0, 0);
    for k in 0..count {
        let r = 1 + k % 3;
        let m: OddModule<Fp<P>> = random_module(&mut rng, r, 12);
        assert!(m.dim() <= 12);
        let dec = free_decompose(&m).unwrap();
        assert_eq!(dec.free_basis.len(), (1 << r) * m.top_product().rank(), "seed {seed} instance {k}");
        assert!(dec.complement.top_product().is_zero());
        match find_witness::<P>(&m, None).unwrap() {
            WitnessOutcome::Free => {
                assert!(is_injective(&m), "seed {seed} instance {k}: free verdict on non-free module");
                free += 1;
            }
            WitnessOutcome::Witness(w) => {
                assert!(!is_injective(&m), "seed {seed} instance {k}: witness on a free module");
                let dims = certify_witness::<P>(&m, &w).unwrap();
                assert_eq!(dims, w.ds);
                assert!(dims.even + dims.odd > 0);
                witnessed += 1;
            }
            WitnessOutcome::Inconclusive { max_degree } => {
                panic!("seed {seed} instance {k}: no witness up to degree {max_degree} for a non-free module")
            }
        }
    }
    (free, witnessed)
}

#[test]
fn injective_iff_no_witness() {
    let (f3, w3) = equivalence_run::<3>(11, 60);
    let (f5, w5) = equivalence_run::<5>(12, 60);
    assert!(f3 + f5 >= 10 && w3 + w5 >= 10, "free {} / witnessed {}", f3 + f5, w3 + w5);
}

fn free_modules_vanish_at<const P: u32, const K: usize>(seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = OddModule::<Fp<P>>::regular(2, Parity::Even);
    let modules = [
        base.clone(),
        base.direct_sum(&OddModule::regular(2, Parity::Odd)).unwrap(),
        OddModule::<Fp<P>>::regular(3, Parity::Odd),
        OddModule::<Fp<P>>::regular(1, Parity::Even).direct_sum(&OddModule::regular(1, Parity::Even)).unwrap(),
    ];
    for m in &modules {
        assert!(is_injective(m));
        let mut sampled = 0;
        while sampled < 50 {
            let z: Vec<Fq<P, K>> = (0..m.rank()).map(|_| Fq::random(&mut rng)).collect();
            if z.iter().all(|c| c.is_zero()) {
                continue;
            }
            assert_eq!(ds_at_extension::<P, K>(m, &z).unwrap(), SuperDim { even: 0, odd: 0 });
            sampled += 1;
        }
    }
}

#[test]
fn free_modules_have_no_ds() {
    free_modules_vanish_at::<3, 1>(1);
    free_modules_vanish_at::<3, 2>(2);
    free_modules_vanish_at::<3, 3>(3);
    free_modules_vanish_at::<5, 1>(4);
    free_modules_vanish_at::<5, 2>(5);
    free_modules_vanish_at::<5, 3>(6);
}

#[test]
fn conjugated_free_modules_have_no_ds() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for r in 1..=3 {
        let m: OddModule<F3> = OddModule::regular(r, Parity::Even).direct_sum(&OddModule::regular(r, Parity::Odd)).unwrap();
        let n = m.dim();
        let g = loop {
            let mut g = Matrix::<F3>::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    if m.parity()[i] == m.parity()[j] {
                        g[(i, j)] = F3::random(&mut rng);
                    }
                }
            }
            if g.inverse().is_some() {
                break g;
            }
        };
        let m = m.conjugate(&g).unwrap();
        assert_eq!(find_witness::<3>(&m, None).unwrap(), WitnessOutcome::Free);
        for _ in 0..50 {
            let z: Vec<F9> = (0..r).map(|_| F9::random(&mut rng)).collect();
            if z.iter().any(|c| !c.is_zero()) {
                assert_eq!(ds_at_extension::<3, 2>(&m, &z).unwrap(), SuperDim { even: 0, odd: 0 });
            }
        }
    }
}

#[test]
fn truncations_yield_witnesses() {
    for len in [1, 2, 4] {
        let m = truncated_counterexample::<F3>(len);
        assert!(!is_injective(&m));
        let WitnessOutcome::Witness(w) = find_witness::<3>(&m, None).unwrap() else { panic!("no witness at length {len}") };
        assert!(w.degree <= 2);
        assert_eq!(certify_witness::<3>(&m, &w).unwrap(), w.ds);
        assert!(w.ds.even + w.ds.odd > 0);
    }
    let m = truncated_counterexample::<F3>(1);
    let WitnessOutcome::Witness(w) = find_witness::<3>(&m, None).unwrap() else { unreachable!() };
    assert_eq!((w.degree, w.coefficients.clone()), (1, vec![vec![1], vec![2]]));
    for p5 in [1, 2, 4] {
        assert!(matches!(find_witness::<5>(&truncated_counterexample(p5), None).unwrap(), WitnessOutcome::Witness(_)));
    }
}

#[test]
fn scalar_block_witness() {
    // z1 g = w, z2 g = 2w over F_5: witness 2 z1 - z2.
    let m = graph::<5>(&[vec![vec![1]], vec![vec![2]]]);
    let WitnessOutcome::Witness(w) = find_witness::<5>(&m, None).unwrap() else { panic!() };
    assert_eq!((w.degree, w.coefficients), (1, vec![vec![2], vec![4]]));
    assert_eq!(ds_at(&m, &[Fp::<5>::new(1), Fp::<5>::new(0)]).unwrap(), SuperDim { even: 0, odd: 0 });
}

#[test]
fn irreducible_block_needs_extension() {
    // Companion matrix of t^2 + 1 over F_3.
    let m = graph::<3>(&[vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![2, 0]]]);
    assert!(!is_injective(&m));
    assert_eq!(find_witness::<3>(&m, Some(1)).unwrap(), WitnessOutcome::Inconclusive { max_degree: 1 });
    let WitnessOutcome::Witness(w) = find_witness::<3>(&m, None).unwrap() else { panic!() };
    assert_eq!(w.degree, 2);
    assert_eq!(certify_witness::<3>(&m, &w).unwrap(), SuperDim { even: 1, odd: 1 });
    // Every F_3-rational combination acts without cohomology.
    for a in 0..3 {
        for b in 0..3 {
            if (a, b) != (0, 0) {
                assert_eq!(ds_at(&m, &[F3::new(a), F3::new(b)]).unwrap(), SuperDim { even: 0, odd: 0 });
            }
        }
    }
}

#[test]
fn decomposition_reassembles() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..30 {
        let r = 1 + k % 3;
        let m: OddModule<F3> = random_module(&mut rng, r, 12);
        let dec = free_decompose(&m).unwrap();
        let b = &dec.base_change;
        let b_inv = b.inverse().expect("base change is invertible");
        let k_free = dec.free_basis.len();
        let n = m.dim();
        for i in 0..r {
            let local = &(&b_inv * m.matrix(i)) * b;
            let reg = OddModule::<F3>::regular(r, Parity::Even);
            let block = 1 << r;
            for row in 0..n {
                for col in 0..n {
                    let expected = match (row < k_free, col < k_free) {
                        (true, true) if row / block == col / block => reg.matrix(i)[(row % block, col % block)],
                        (false, false) => dec.complement.matrix(i)[(row - k_free, col - k_free)],
                        _ => F3::new(0),
                    };
                    assert_eq!(local[(row, col)], expected, "instance {k} z{} entry ({row}, {col})", i + 1);
                }
            }
        }
    }
}

#[test]
fn json_round_trip() {
    let m = truncated_counterexample::<F3>(2);
    let json = serde_json::to_string(&OddModuleJson::from_module(&m)).unwrap();
    let back: OddModuleJson = serde_json::from_str(&json).unwrap();
    let m2 = back.module::<3>().unwrap();
    assert_eq!(m2.matrix(1), m.matrix(1));
    let bad = OddModuleJson { p: 3, parity: vec![Parity::Even, Parity::Odd], actions: vec![vec![vec![0, 0], vec![1, 0]], vec![vec![0, 1], vec![0, 0]]] };
    assert!(matches!(bad.module::<3>(), Err(InjectivityError::AxiomsViolated(_))));
}
