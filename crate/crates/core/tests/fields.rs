use num_traits::{One, Zero};
use proptest::prelude::*;
use superds::field::{modulus, Fp, Fq, Scalar, MAX_EXT_DEGREE, TABULATED_PRIMES};
use superds::linalg::{eigenvalue_over_extension, Matrix};

// Plain Vec<u64> polynomial arithmetic mod p, lowest coefficient first.

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = (1..p).find(|&x| x * m[dm] % p == 1).unwrap();
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = r[r.len() - 1] * lead_inv % p;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p * p - c * mi % p) % p;
        }
        r = trim(r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_rem(&out, m, p)
}

fn t_pow_mod(e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut base = poly_rem(&[0, 1], m, p);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mulmod(&result, &base, m, p);
        }
        base = poly_mulmod(&base, &base, m, p);
        e >>= 1;
    }
    result
}

fn full_modulus(p: u32, k: usize) -> Vec<u64> {
    let mut m: Vec<u64> = modulus(p, k).unwrap().iter().map(|&c| c as u64).collect();
    m.push(1);
    m
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn has_factor_of_degree(m: &[u64], d: usize, p: u64) -> bool {
    let count = p.pow(d as u32);
    (0..count).any(|idx| {
        let mut g: Vec<u64> = (0..d).map(|i| idx / p.pow(i as u32) % p).collect();
        g.push(1);
        poly_rem(m, &g, p).is_empty()
    })
}

#[test]
fn tabulated_moduli_are_irreducible_and_primitive() {
    for &p in TABULATED_PRIMES {
        for k in 1..=MAX_EXT_DEGREE {
            let m = full_modulus(p, k);
            let p64 = p as u64;
            for d in 1..=k / 2 {
                assert!(
                    !has_factor_of_degree(&m, d, p64),
                    "p={p} k={k}: factor of degree {d}"
                );
            }
            let order = p64.pow(k as u32) - 1;
            assert_eq!(
                t_pow_mod(order, &m, p64),
                vec![1],
                "p={p} k={k}: t^(q-1) != 1"
            );
            for r in prime_factors(order) {
                assert_ne!(
                    t_pow_mod(order / r, &m, p64),
                    vec![1],
                    "p={p} k={k}: t not primitive (r={r})"
                );
            }
        }
    }
}

#[test]
fn generator_has_full_order_in_f27() {
    let g = Fq::<3, 3>::generator();
    let orders: Vec<u64> = (1..=26).filter(|&e| g.pow(e) == Fq::one()).collect();
    assert_eq!(orders, vec![26]);
}

#[test]
fn eigen_of_zero_and_identity() {
    let z = Matrix::<Fp<3>>::zeros(1, 1);
    let e = eigenvalue_over_extension(&z).unwrap();
    assert_eq!(
        (e.degree, e.lambda.clone(), e.vector.clone()),
        (1, vec![0], vec![vec![1]])
    );
    let id = Matrix::<Fp<3>>::identity(2);
    let e = eigenvalue_over_extension(&id).unwrap();
    assert_eq!(e.lambda, vec![1]);
}

fn cofactor_det<F: Scalar>(m: &[Vec<F>]) -> F {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n).fold(F::zero(), |acc, j| {
        let minor: Vec<Vec<F>> = m[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect();
        let term = m[0][j] * cofactor_det(&minor);
        if j % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    })
}

fn check_eigen<const K: usize>(a: &Matrix<Fp<5>>, e: &superds::linalg::ExtEigen<5>) {
    let l = e.lambda_in::<K>().unwrap();
    let v = e.vector_in::<K>().unwrap();
    let n = a.rows();
    assert!(v.iter().any(|c| !c.is_zero()));
    let shifted: Vec<Vec<Fq<5, K>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Fq::from_base(a[(i, j)]) - if i == j { l } else { Fq::zero() })
                .collect()
        })
        .collect();
    assert!(cofactor_det(&shifted).is_zero());
    for row in &shifted {
        let s = row
            .iter()
            .zip(&v)
            .fold(Fq::<5, K>::zero(), |acc, (&x, &y)| acc + x * y);
        assert!(s.is_zero());
    }
}

proptest! {
    #[test]
    fn eigenpairs_are_certified(n in 1usize..=4, entries in proptest::collection::vec(0i64..5, 16)) {
        let a = Matrix::from_fn(n, n, |i, j| Fp::<5>::new(entries[i * 4 + j]));
        let e = eigenvalue_over_extension(&a).unwrap();
        prop_assert!(e.degree <= n);
        match e.degree {
            1 => check_eigen::<1>(&a, &e),
            2 => check_eigen::<2>(&a, &e),
            3 => check_eigen::<3>(&a, &e),
            4 => check_eigen::<4>(&a, &e),
            _ => unreachable!(),
        }
    }

    #[test]
    fn charpoly_matches_cofactor_determinant(n in 1usize..=4, entries in proptest::collection::vec(0i64..3, 16), t in 0i64..3) {
        let a = Matrix::from_fn(n, n, |i, j| Fp::<3>::new(entries[i * 4 + j]));
        let cp = a.charpoly();
        let tv = Fp::<3>::new(t);
        let at_t = cp.iter().rev().fold(Fp::<3>::zero(), |acc, &c| acc * tv + c);
        let rows: Vec<Vec<Fp<3>>> = (0..n).map(|i| (0..n).map(|j| if i == j { tv - a[(i, j)] } else { -a[(i, j)] }).collect()).collect();
        prop_assert_eq!(at_t, cofactor_det(&rows));
    }

    #[test]
    fn f25_field_axioms(a in 0u64..25, b in 0u64..25, c in 0u64..25) {
        let (a, b, c) = (Fq::<5, 2>::from_index(a), Fq::<5, 2>::from_index(b), Fq::<5, 2>::from_index(c));
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!((a * b) * c, a * (b * c));
        if !a.is_zero() {
            prop_assert_eq!(a * a.inv().unwrap(), Fq::one());
        }
    }
}
