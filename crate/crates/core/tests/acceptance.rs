//! One test per acceptance criterion; each prints a single PASS/FAIL line
//! (`cargo test --test acceptance -- --nocapture --test-threads 1` shows them in order).

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use superds::complexes::*;
use superds::ds::*;
use superds::field::{Fp, Fq, Scalar};
use superds::golden::{CheckRecord, Verdict};
use superds::gtilde::*;
use superds::injectivity::*;
use superds::lie::{index_deletion_matches, lie_centralizer_and_bracket};
use superds::linalg::{Matrix, Parity, SuperDim};
use superds::supergroups::*;
use superds::weights::*;
use superds::F3;

fn verdict(n: u32, name: &str, failures: Vec<String>) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {n:>2} {status}: {name}");
    assert!(failures.is_empty(), "criterion {n} ({name}):\n{}", failures.join("\n"));
}

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

fn golden_failures(records: &[CheckRecord], label: &str) -> Vec<String> {
    records.iter().filter(|r| r.verdict != Verdict::Pass).map(|r| format!("{label} {}:{}[{}]: expected {} got {}", r.kind, r.id, r.instance, r.expected, r.computed)).collect()
}

fn gl_rank_one_cases() -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for (m, n) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
        for i in 1..=m {
            for j in m + 1..=m + n {
                out.push((m, n, i, j));
            }
        }
    }
    out
}

fn de_rham_range<F: Scalar>(fails: &mut Vec<String>) {
    let p = F::characteristic() as usize;
    for s in 1..=4 {
        let r = p_restricted_de_rham::<F>(s);
        if r.cohomology_dims() != binomials(s) {
            fails.push(format!("p={p} s={s}: dims {:?}", r.cohomology_dims()));
        }
        for rep in lambda_class_check::<F>(s) {
            if !(rep.cocycles && rep.independent_rank == rep.forms && rep.forms == rep.cohomology_dim) {
                fails.push(format!("p={p} s={s}: {rep:?}"));
            }
        }
    }
}

#[test]
fn criterion_01_de_rham_cohomology() {
    let mut fails = Vec::new();
    de_rham_range::<Fp<3>>(&mut fails);
    de_rham_range::<Fp<5>>(&mut fails);
    verdict(1, "restricted de Rham cohomology is exterior with divided-power basis", fails);
}

fn cartier_range<F: Scalar>(fails: &mut Vec<String>) {
    let p = F::characteristic();
    for s in 1..=4 {
        for e in 0..=s as u32 {
            let rep = cartier_check::<F>(s, e);
            let ok = rep.all_cocycles && rep.independent_rank == rep.images && rep.images == rep.target_cohomology && rep.lambda_counts[e as usize] == binomials(s)[e as usize];
            if !ok {
                fails.push(format!("p={p} s={s} e={e}: {rep:?}"));
            }
        }
    }
}

#[test]
fn criterion_02_cartier_map() {
    let mut fails = Vec::new();
    cartier_range::<Fp<3>>(&mut fails);
    cartier_range::<Fp<5>>(&mut fails);
    verdict(2, "Cartier images are independent cocycle classes", fails);
}

fn r_prime_range<F: Scalar>(fails: &mut Vec<String>) {
    for s in 1..=4 {
        let h = r_prime_subcomplex::<F>(s).cohomology_dims();
        if h.iter().any(|&d| d != 0) {
            fails.push(format!("p={} s={s}: {h:?}", F::characteristic()));
        }
    }
}

#[test]
fn criterion_03_r_prime_acyclic() {
    let mut fails = Vec::new();
    r_prime_range::<Fp<3>>(&mut fails);
    r_prime_range::<Fp<5>>(&mut fails);
    verdict(3, "complementary subcomplex is acyclic", fails);
}

#[test]
fn criterion_04_koszul_exactness() {
    let mut fails = Vec::new();
    for t in 1..=3 {
        for d in 0..=6 {
            let h: usize = koszul_strand::<F3>(t, d).cohomology_dims().iter().sum();
            if h != usize::from(d == 0) {
                fails.push(format!("t={t} d={d}: total cohomology {h}"));
            }
        }
    }
    verdict(4, "Koszul strands are exact except in degree 0", fails);
}

#[test]
fn criterion_05_sym_ds_structure() {
    let mut fails = Vec::new();
    for (m, n) in [(1, 1), (2, 1)] {
        for i in 1..=m {
            for j in m + 1..=m + n {
                let g = Supergroup::<F3>::gl(m, n).unwrap();
                let d = conjugation_derivation(&g, &g.rank_one_element(i, j).unwrap()).unwrap();
                let xm = generator_matrix(g.ring(), &d).unwrap();
                let rep = sym_ds_graded_dims(g.ring().parities(), &xm, 6).unwrap();
                if !rep.matches() {
                    fails.push(format!("GL({m}|{n}) e{i}{j}: {rep:?}"));
                }
            }
        }
    }
    verdict(5, "Sym(V)_x matches Sym(V_x) ⊗ Sym(U0^p) ⊗ Λ up to degree 2p", fails);
}

/// Free pairs on even and odd generators plus trivial lines, conjugated by a random even matrix.
fn random_operator<const P: u32>(rng: &mut ChaCha8Rng) -> (SquareZeroOddOperator<Fp<P>>, SuperDim) {
    loop {
        let (a, b, c, d) = (rng.gen_range(0..=3), rng.gen_range(0..=3), rng.gen_range(0..=3), rng.gen_range(0..=3));
        if a + b + c > 6 || a + b + d > 6 || a + b + c + d == 0 {
            continue;
        }
        let mut parity = Vec::new();
        let mut edges = Vec::new();
        for (count, gen) in [(a, Parity::Even), (b, Parity::Odd)] {
            for _ in 0..count {
                edges.push(parity.len());
                parity.push(gen);
                parity.push(gen + Parity::Odd);
            }
        }
        parity.extend(std::iter::repeat(Parity::Even).take(c));
        parity.extend(std::iter::repeat(Parity::Odd).take(d));
        let n = parity.len();
        let mut m = Matrix::<Fp<P>>::zeros(n, n);
        for k in edges {
            m[(k + 1, k)] = Fp::new(1);
        }
        let x = SquareZeroOddOperator::new(m, parity.clone()).unwrap();
        let g = loop {
            let mut g = Matrix::<Fp<P>>::zeros(n, n);
            for r in 0..n {
                for s in 0..n {
                    if parity[r] == parity[s] {
                        g[(r, s)] = Fp::random(rng);
                    }
                }
            }
            if g.inverse().is_some() {
                break g;
            }
        };
        let g_inv = g.inverse().unwrap();
        return (x.conjugate(&g, &g_inv).unwrap(), SuperDim { even: c, odd: d });
    }
}

fn ds_laws<const P: u32>(seed: u64, count: usize, fails: &mut Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..count {
        let (x, ex) = random_operator::<P>(&mut rng);
        let (y, ey) = random_operator::<P>(&mut rng);
        let (dx, dy) = (ds(&x).sdim(), ds(&y).sdim());
        let sum = ds(&direct_sum_operator(&x, &y)).sdim();
        let tensor_op = tensor_operator(&x, &y);
        let tensor = ds(&tensor_op).sdim();
        let dual = ds(&dual_operator(&x)).sdim();
        let ok = dx == ex
            && dy == ey
            && sum == SuperDim { even: dx.even + dy.even, odd: dx.odd + dy.odd }
            && tensor == SuperDim { even: dx.even * dy.even + dx.odd * dy.odd, odd: dx.even * dy.odd + dx.odd * dy.even }
            && dual == dx
            && dx.even + dx.odd == x.dim() - 2 * x.rank()
            && tensor.even + tensor.odd == tensor_op.dim() - 2 * tensor_op.rank()
            && pairing_descends_and_is_perfect(&x);
        if !ok {
            fails.push(format!("p={P} instance {k}: ds {dx:?} {dy:?} sum {sum:?} tensor {tensor:?} dual {dual:?}"));
        }
    }
}

#[test]
fn criterion_06_ds_functor_laws() {
    let mut fails = Vec::new();
    ds_laws::<3>(61, 100, &mut fails);
    ds_laws::<5>(62, 100, &mut fails);
    verdict(6, "DS sum/tensor/dual laws and rank formula on 200 instances", fails);
}

#[test]
fn criterion_07_gl_rank_one() {
    let lines = load_golden("gl_rank_one.golden").unwrap();
    let mut fails = Vec::new();
    for (m, n, i, j) in gl_rank_one_cases() {
        let label = format!("GL({m}|{n}) e{i}{j}");
        let g = Supergroup::<F3>::gl(m, n).unwrap();
        let x = g.rank_one_element(i, j).unwrap();
        let d = conjugation_derivation(&g, &x).unwrap();
        let order = g.preferred_order(i);
        for c in verify_coproduct_proposition(&g, &d, &order).unwrap() {
            if !(c.power_matches && c.odd_matches) {
                fails.push(format!("{label} coproduct {c:?}"));
            }
        }
        for (name, ok, detail) in verify_vx_subcoalgebra(&g, &d, &order).unwrap() {
            if !ok {
                fails.push(format!("{label} {name}: {detail}"));
            }
        }
        let records = gl_rank_one_suite::<F3>(m, n, i, j).unwrap().run(&lines).unwrap();
        fails.extend(golden_failures(&records, &label));
    }
    verdict(7, "GL(m|n) rank-one splits, coproducts and R/S presentations", fails);
}

#[test]
fn criterion_08_gl_max_rank() {
    let lines = load_golden("gl_max_rank.golden").unwrap();
    let mut fails = Vec::new();
    for n in [1, 2] {
        let suite = gl_max_rank_suite::<F3>(n).unwrap();
        fails.extend(golden_failures(&suite.run(&lines).unwrap(), &format!("GL({n}|{n})")));
        for c in gl_max_rank_intertwining(&suite, n).unwrap() {
            if !c.pass {
                fails.push(format!("GL({n}|{n}) intertwining {c:?}"));
            }
        }
    }
    verdict(8, "GL(n|n) maximal rank congruences, coproducts and intertwining", fails);
}

#[test]
fn criterion_09_queer() {
    let lines = load_golden("queer.golden").unwrap();
    let mut fails = Vec::new();
    for n in [2, 3] {
        for i in 1..=n {
            for j in (1..=n).filter(|&j| j != i) {
                let records = q_suite::<F3>(n, i, j).unwrap().run(&lines).unwrap();
                fails.extend(golden_failures(&records, &format!("Q({n}) e'{i}{j}")));
            }
        }
    }
    verdict(9, "Q(n) coproducts, determinant congruence and M-presentation", fails);
}

#[test]
fn criterion_10_lie_level_ds() {
    let mut fails = Vec::new();
    for (m, n, i, j) in gl_rank_one_cases() {
        let g = Supergroup::<F3>::gl(m, n).unwrap();
        let x = g.rank_one_element(i, j).unwrap();
        let d = conjugation_derivation(&g, &x).unwrap();
        let split = split_generator_space(g.ring(), &d, &g.preferred_order(i)).unwrap();
        let q = lie_centralizer_and_bracket(&g.lie, &x).unwrap();
        let k = m + n - 2;
        let ok = q.bracket_image.dim() == split.u.len() && q.dim() == split.vx.len() && q.dim() == k * k && index_deletion_matches::<F3>(m, n, i, j).unwrap();
        if !ok {
            fails.push(format!("gl({m}|{n}) e{i}{j}: [g,x] {} U {} g_x {} V_x {}", q.bracket_image.dim(), split.u.len(), q.dim(), split.vx.len()));
        }
    }
    for n in 1..=3 {
        let g = Supergroup::<F3>::gl(n, n).unwrap();
        let q = lie_centralizer_and_bracket(&g.lie, &g.max_rank_element().unwrap()).unwrap();
        if q.dim() != 0 || q.centralizer != q.bracket_image {
            fails.push(format!("gl({n}|{n}) maximal rank: g_x has dimension {}", q.dim()));
        }
    }
    verdict(10, "Lie-level DS quotients", fails);
}

#[test]
fn criterion_11_faithful_coefficients() {
    let lines = load_golden("faithful.golden").unwrap();
    let mut fails = Vec::new();
    for (m, n, i, j) in [(1, 1, 1, 2), (2, 1, 1, 3), (2, 1, 2, 3)] {
        let label = format!("GL({m}|{n}) e{i}{j}");
        let suite = faithful_suite::<F3>(m, n, i, j).unwrap();
        fails.extend(golden_failures(&suite.run(&lines).unwrap(), &label));
        for s in module_slice_ds(&suite, 3).unwrap() {
            if s.ds.even + s.ds.odd != s.predicted {
                fails.push(format!("{label} {s:?}"));
            }
        }
        let gen = faithful_generation(&suite, 5).unwrap();
        for (t, ok) in gen.targets.iter().zip(&gen.generated) {
            if !ok {
                fails.push(format!("{label}: {t} not generated"));
            }
        }
    }
    verdict(11, "coactions on Sym(ΠW), Sym(W*) generate the DS Hopf algebra", fails);
}

fn injectivity_run<const P: u32>(seed: u64, count: usize, fails: &mut Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..count {
        let r = 1 + k % 3;
        let m: OddModule<Fp<P>> = random_module(&mut rng, r, 12);
        let outcome = find_witness::<P>(&m, None).unwrap();
        let consistent = match &outcome {
            WitnessOutcome::Free => is_injective(&m),
            WitnessOutcome::Witness(w) => !is_injective(&m) && certify_witness::<P>(&m, w).unwrap() == w.ds && w.ds.even + w.ds.odd > 0,
            WitnessOutcome::Inconclusive { .. } => false,
        };
        if !consistent {
            fails.push(format!("p={P} instance {k} (r={r}, dim {}): {outcome:?}", m.dim()));
        }
    }
}

fn free_vanishing<const P: u32, const K: usize>(rng: &mut ChaCha8Rng, fails: &mut Vec<String>) {
    for r in 1..=3 {
        let m = OddModule::<Fp<P>>::regular(r, Parity::Even).direct_sum(&OddModule::regular(r, Parity::Odd)).unwrap();
        let mut sampled = 0;
        while sampled < 50 {
            let z: Vec<Fq<P, K>> = (0..r).map(|_| Fq::random(rng)).collect();
            if z.iter().all(|c| *c == Fq::from_base(Fp::new(0))) {
                continue;
            }
            let dims = ds_at_extension::<P, K>(&m, &z).unwrap();
            if dims != (SuperDim { even: 0, odd: 0 }) {
                fails.push(format!("free module r={r} over F_{P}^{K}: M_z = {dims:?}"));
            }
            sampled += 1;
        }
    }
}

#[test]
fn criterion_12_odd_injectivity() {
    let mut fails = Vec::new();
    injectivity_run::<3>(121, 60, &mut fails);
    injectivity_run::<5>(122, 60, &mut fails);
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    free_vanishing::<3, 1>(&mut rng, &mut fails);
    free_vanishing::<3, 2>(&mut rng, &mut fails);
    free_vanishing::<3, 3>(&mut rng, &mut fails);
    free_vanishing::<5, 1>(&mut rng, &mut fails);
    free_vanishing::<5, 2>(&mut rng, &mut fails);
    free_vanishing::<5, 3>(&mut rng, &mut fails);
    for len in [1, 2, 4] {
        let m = truncated_counterexample::<F3>(len);
        match find_witness::<3>(&m, None).unwrap() {
            WitnessOutcome::Witness(w) if certify_witness::<3>(&m, &w).unwrap() == w.ds => {}
            other => fails.push(format!("truncation N={len}: {other:?}")),
        }
    }
    verdict(12, "purely odd injectivity: free ⟺ no witness", fails);
}

/// `Z≥0Δ⁺` by search over all positive roots, graded by `φ(v) = −Σ i·v_i`, with odd-root counts.
fn semigroup(n: usize, cap: i64) -> HashMap<Vec<i64>, i64> {
    let phi = |v: &[i64]| -v.iter().enumerate().map(|(i, a)| (i as i64 + 1) * a).sum::<i64>();
    let roots = PRootData::new(n).unwrap();
    let gens: Vec<(Vec<i64>, i64)> = roots.positive_even.iter().map(|r| (r.0.clone(), 0)).chain(roots.positive_odd.iter().map(|r| (r.0.clone(), 1))).collect();
    let mut reached = HashMap::from([(vec![0; n], 0)]);
    let mut stack = vec![vec![0; n]];
    while let Some(v) = stack.pop() {
        let odd = reached[&v];
        for (g, o) in &gens {
            let next: Vec<i64> = v.iter().zip(g).map(|(a, b)| a + b).collect();
            if phi(&next) <= cap && !reached.contains_key(&next) {
                reached.insert(next.clone(), odd + o);
                stack.push(next);
            }
        }
    }
    reached
}

#[test]
fn criterion_13_weight_poset() {
    let mut fails = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(131);
    for n in 2..=4 {
        let oracle = semigroup(n, 10 * (n * (n + 1) / 2) as i64);
        let mut comparable = Vec::new();
        for _ in 0..1000 {
            let mu = Weight((0..n).map(|_| rng.gen_range(-5..=5)).collect());
            let lambda = Weight((0..n).map(|_| rng.gen_range(-5..=5)).collect());
            let t: Vec<i64> = lambda.0.iter().zip(&mu.0).map(|(a, b)| a - b).collect();
            let expected = oracle.get(&t).copied();
            let got = leq(&mu, &lambda).unwrap();
            if got != expected.is_some() {
                fails.push(format!("leq({mu}, {lambda}) = {got}"));
            }
            if let Some(odd) = expected {
                if ell(&mu, &lambda).unwrap() != odd || 2 * odd != mu.norm() - lambda.norm() {
                    fails.push(format!("ell({mu}, {lambda}) disagrees with the odd-root count {odd}"));
                }
                comparable.push((mu, lambda));
            }
        }
        for (mu, lambda) in comparable.iter().take(15) {
            let items = interval(mu, lambda, false).unwrap();
            let bounds = prefix_box(mu, lambda).unwrap();
            let l = ell(mu, lambda).unwrap();
            for pi in &items {
                let mut s = 0;
                let boxed = pi.0.iter().enumerate().all(|(k, b)| {
                    s += b;
                    bounds[k].0 <= s && s <= bounds[k].1
                });
                if !boxed || ell(mu, pi).unwrap() + ell(pi, lambda).unwrap() != l {
                    fails.push(format!("[{mu}, {lambda}] contains {pi} outside the box or breaking additivity"));
                }
                for rho in items.iter().filter(|rho| leq(pi, rho).unwrap()) {
                    if ell(mu, pi).unwrap() + ell(pi, rho).unwrap() + ell(rho, lambda).unwrap() != l {
                        fails.push(format!("chain {mu} ≤ {pi} ≤ {rho} ≤ {lambda} breaks additivity"));
                    }
                }
            }
            if mu.is_dominant() && lambda.is_dominant() {
                for pi in interval(mu, lambda, true).unwrap() {
                    let lp = ell(&pi, lambda).unwrap();
                    if !(lambda.0[0] + l >= lambda.0[0] + lp && lambda.0[0] + lp >= pi.0[0] && pi.0[n - 1] >= lambda.0[n - 1]) {
                        fails.push(format!("dominant {pi} in [{mu}, {lambda}] breaks the chain bound"));
                    }
                }
            }
        }
        if comparable.len() < 20 {
            fails.push(format!("n={n}: only {} comparable samples", comparable.len()));
        }
    }
    verdict(13, "periplectic weight order, odd-root count and finite intervals", fails);
}
