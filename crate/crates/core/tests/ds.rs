use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use superds::ds::*;
use superds::field::{Fp, Scalar};
use superds::linalg::{Matrix, Parity, SuperDim};

/// Shape of a module: free pairs on even and odd generators, then trivial even and odd lines.
#[derive(Clone, Copy, Debug)]
struct Shape {
    free_even: usize,
    free_odd: usize,
    triv_even: usize,
    triv_odd: usize,
}

impl Shape {
    fn expected_ds(&self) -> SuperDim {
        SuperDim { even: self.triv_even, odd: self.triv_odd }
    }
}

fn shape() -> impl Strategy<Value = Shape> {
    (0usize..=3, 0usize..=3, 0usize..=3, 0usize..=3)
        .prop_filter("dims at most (6|6)", |&(a, b, c, d)| a + b + c <= 6 && a + b + d <= 6 && a + b + c + d > 0)
        .prop_map(|(free_even, free_odd, triv_even, triv_odd)| Shape { free_even, free_odd, triv_even, triv_odd })
}

/// Canonical operator of the given shape conjugated by a random even invertible matrix.
fn operator<const P: u32>(s: Shape, seed: u64) -> SquareZeroOddOperator<Fp<P>> {
    let mut parity = Vec::new();
    let mut edges = Vec::new();
    for (count, gen) in [(s.free_even, Parity::Even), (s.free_odd, Parity::Odd)] {
        for _ in 0..count {
            edges.push((parity.len(), parity.len() + 1));
            parity.push(gen);
            parity.push(gen + Parity::Odd);
        }
    }
    parity.extend(std::iter::repeat(Parity::Even).take(s.triv_even));
    parity.extend(std::iter::repeat(Parity::Odd).take(s.triv_odd));
    let n = parity.len();
    let mut m = Matrix::<Fp<P>>::zeros(n, n);
    for (src, dst) in edges {
        m[(dst, src)] = Fp::new(1);
    }
    let x = SquareZeroOddOperator::new(m, parity.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut g = Matrix::<Fp<P>>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if parity[i] == parity[j] {
                    g[(i, j)] = Fp::random(&mut rng);
                }
            }
        }
        if let Some(g_inv) = g.inverse() {
            return x.conjugate(&g, &g_inv).unwrap();
        }
    }
}

fn tensor_sdim(a: SuperDim, b: SuperDim) -> SuperDim {
    SuperDim { even: a.even * b.even + a.odd * b.odd, odd: a.even * b.odd + a.odd * b.even }
}

fn add_sdim(a: SuperDim, b: SuperDim) -> SuperDim {
    SuperDim { even: a.even + b.even, odd: a.odd + b.odd }
}

fn laws<const P: u32>(s: Shape, t: Shape, seed: u64) -> Result<(), TestCaseError> {
    let x = operator::<P>(s, seed);
    let y = operator::<P>(t, seed.wrapping_add(1));
    let (dx, dy) = (ds(&x), ds(&y));
    prop_assert_eq!(dx.sdim(), s.expected_ds());
    prop_assert_eq!(dx.dim(), x.dim() - 2 * x.rank());
    prop_assert_eq!(dy.dim(), y.dim() - 2 * y.rank());
    let sum = direct_sum_operator(&x, &y);
    prop_assert_eq!(ds(&sum).sdim(), add_sdim(dx.sdim(), dy.sdim()));
    prop_assert_eq!(ds(&sum).dim(), sum.dim() - 2 * sum.rank());
    let tensor = tensor_operator(&x, &y);
    prop_assert_eq!(ds(&tensor).sdim(), tensor_sdim(dx.sdim(), dy.sdim()));
    prop_assert_eq!(ds(&tensor).dim(), tensor.dim() - 2 * tensor.rank());
    let dual = dual_operator(&x);
    prop_assert_eq!(ds(&dual).sdim(), dx.sdim());
    prop_assert!(pairing_descends_and_is_perfect(&x));
    for v in dx.kernel().basis() {
        prop_assert!(dx.is_cocycle(v));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ds_laws_p3(s in shape(), t in shape(), seed in any::<u64>()) {
        laws::<3>(s, t, seed)?;
    }

    #[test]
    fn ds_laws_p5(s in shape(), t in shape(), seed in any::<u64>()) {
        laws::<5>(s, t, seed)?;
    }
}

#[test]
fn trivial_module_is_its_own_ds() {
    let x = SquareZeroOddOperator::<Fp<3>>::zero(vec![Parity::Even, Parity::Odd, Parity::Odd]);
    assert_eq!(ds(&x).sdim(), SuperDim { even: 1, odd: 2 });
}

#[test]
fn induced_map_of_identity_is_identity() {
    let s = Shape { free_even: 1, free_odd: 1, triv_even: 2, triv_odd: 1 };
    let x = operator::<5>(s, 3);
    let d = ds(&x);
    let id = superds::linalg::GradedLinearMap::new(Matrix::identity(x.dim()), x.parity().to_vec(), x.parity().to_vec(), Parity::Even).unwrap();
    let f = induced_map(&id, &x, &x, &d, &d).unwrap();
    assert_eq!(f.matrix, Matrix::identity(d.dim()));
}
