use superds::complexes::*;
use superds::ds::{complex_as_operator, ds};
use superds::field::{Fp, Scalar};
use superds::linalg::{Matrix, Parity};

type F3 = Fp<3>;
type F5 = Fp<5>;

fn binomials(s: usize) -> Vec<usize> {
    let mut row = vec![1usize];
    for _ in 0..s {
        let mut next = vec![1usize; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row
}

fn restricted_range<F: Scalar>() {
    for s in 1..=4 {
        let r = p_restricted_de_rham::<F>(s);
        let p = F::characteristic() as usize;
        assert!(r.is_complex());
        assert_eq!(r.total_dim(), p.pow(s as u32) * (1 << s));
        assert_eq!(r.cohomology_dims(), binomials(s), "s={s}");
        let rp = r_prime_subcomplex::<F>(s);
        assert_eq!(rp.total_dim(), p.pow(s as u32) * (1 << s) - (1 << s));
        assert!(rp.cohomology_dims().iter().all(|&h| h == 0));
        for rep in lambda_class_check::<F>(s) {
            assert!(rep.cocycles);
            assert_eq!(rep.independent_rank, rep.forms);
            assert_eq!(rep.forms, rep.cohomology_dim);
        }
    }
}

#[test]
fn p_restricted_de_rham_has_exterior_cohomology() {
    restricted_range::<F3>();
    restricted_range::<F5>();
}

#[test]
fn restricted_dims_small_cases() {
    assert_eq!(p_restricted_de_rham::<F3>(1).total_dim(), 6);
    assert_eq!(p_restricted_de_rham::<F3>(2).total_dim(), 36);
    assert_eq!(
        p_restricted_de_rham::<F3>(3).cohomology_dims(),
        vec![1, 3, 3, 1]
    );
    assert_eq!(r_prime_subcomplex::<F3>(1).total_dim(), 4);
    assert_eq!(r_prime_subcomplex::<F3>(2).total_dim(), 32);
}

#[test]
fn cartier_images_span_cohomology() {
    for s in 1..=3 {
        for e in 0..=2 {
            let rep = cartier_check::<F3>(s, e);
            assert!(rep.all_cocycles);
            assert_eq!(rep.independent_rank, rep.images);
            assert_eq!(rep.images, rep.target_cohomology);
        }
        assert_eq!(cartier_check::<F3>(s, 1).lambda_counts[1], s);
    }
    // y dy -> y^3 y^(2) dy = 2 y^5 dy over F_3
    let m = superds::poly::Monomial::from_exponents(vec![1, 1]);
    let img = cartier_image::<F3>(1, &m);
    assert_eq!(
        img,
        superds::poly::Poly::term(
            superds::poly::Monomial::from_exponents(vec![5, 1]),
            F3::new(2)
        )
    );
}

#[test]
fn koszul_strands_are_exact() {
    for t in 1..=3 {
        assert_eq!(
            koszul_strand::<F3>(t, 0)
                .cohomology_dims()
                .iter()
                .sum::<usize>(),
            1
        );
        for d in 1..=6 {
            assert!(koszul_strand::<F3>(t, d).is_acyclic(), "t={t} d={d}");
        }
    }
    let k = koszul_strand::<F3>(1, 2);
    assert_eq!(k.total_dim(), 2);
}

#[test]
fn collapsed_complex_matches_cohomology() {
    let k = p_restricted_de_rham::<F3>(2).to_complex();
    let (_, op) = complex_as_operator(&k).unwrap();
    let r = ds(&op);
    let h = k.cohomology_dims();
    let even: usize = h.iter().step_by(2).sum();
    let odd: usize = h.iter().skip(1).step_by(2).sum();
    assert_eq!((r.sdim().even, r.sdim().odd), (even, odd));
}

#[test]
fn sym_ds_free_pair() {
    // V = span{y, xy}
    let x = Matrix::from_rows(vec![
        vec![F3::new(0), F3::new(0)],
        vec![F3::new(1), F3::new(0)],
    ])
    .unwrap();
    let rep = sym_ds_graded_dims(&[Parity::Even, Parity::Odd], &x, 6).unwrap();
    assert!(rep.matches(), "{rep:?}");
    assert!(matches!(
        sym_ds_graded_dims(&[Parity::Even, Parity::Odd], &x, 2),
        Err(ComplexError::CutoffTooSmall { .. })
    ));
    let x7 = x.map(|v| Fp::<7>::new(v.value() as i64));
    let rat = sym_ds_rational(&[Parity::Even, Parity::Odd], &x7, 6).unwrap();
    assert!(rat.matches());
    assert!(rat.computed.iter().skip(1).all(|&d| d == (0, 0)));
}
