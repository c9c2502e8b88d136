use std::collections::HashMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use superds::weights::*;

/// Elements of `Z≥0Δ⁺` found by breadth-first search over all positive roots, graded by
/// `φ(v) = −Σ i·v_i` (positive on every root), with the odd-root counts of every path reaching them.
struct Oracle {
    cap: i64,
    reached: HashMap<Vec<i64>, i64>,
}

fn phi(v: &[i64]) -> i64 {
    -v.iter().enumerate().map(|(i, a)| (i as i64 + 1) * a).sum::<i64>()
}

impl Oracle {
    fn new(n: usize, cap: i64) -> Self {
        let roots = PRootData::new(n).unwrap();
        let gens: Vec<(Vec<i64>, i64)> = roots
            .positive_even
            .iter()
            .map(|r| (r.0.clone(), 0))
            .chain(roots.positive_odd.iter().map(|r| (r.0.clone(), 1)))
            .collect();
        let mut reached = HashMap::from([(vec![0; n], 0)]);
        let mut frontier = vec![vec![0; n]];
        while let Some(v) = frontier.pop() {
            let odd = reached[&v];
            for (g, o) in &gens {
                let next: Vec<i64> = v.iter().zip(g).map(|(a, b)| a + b).collect();
                if phi(&next) > cap {
                    continue;
                }
                match reached.get(&next) {
                    Some(&prev) => assert_eq!(prev, odd + o, "two decompositions of {next:?} with different odd counts"),
                    None => {
                        reached.insert(next.clone(), odd + o);
                        frontier.push(next);
                    }
                }
            }
        }
        Oracle { cap, reached }
    }

    fn member(&self, t: &[i64]) -> bool {
        assert!(phi(t) <= self.cap, "{t:?} beyond the search cap");
        self.reached.contains_key(t)
    }
}

fn sub(a: &Weight, b: &Weight) -> Vec<i64> {
    a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect()
}

fn random_weight(rng: &mut ChaCha8Rng, n: usize, r: i64) -> Weight {
    Weight((0..n).map(|_| rng.gen_range(-r..=r)).collect())
}

#[test]
fn leq_matches_search_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 2..=4 {
        let oracle = Oracle::new(n, 10 * (n * (n + 1) / 2) as i64);
        let mut positives = 0;
        for _ in 0..1000 {
            let (mu, lambda) = (random_weight(&mut rng, n, 5), random_weight(&mut rng, n, 5));
            let t = sub(&lambda, &mu);
            let expected = phi(&t) >= 0 && oracle.member(&t);
            assert_eq!(leq(&mu, &lambda).unwrap(), expected, "{mu} vs {lambda}");
            if expected {
                positives += 1;
                assert_eq!(ell(&mu, &lambda).unwrap(), oracle.reached[&t]);
            }
        }
        assert!(positives >= 20, "n = {n}: only {positives} comparable pairs");
    }
}

#[test]
fn roots_lie_in_generated_semigroup() {
    for n in 2..=5 {
        let data = PRootData::new(n).unwrap();
        let zero = Weight(vec![0; n]);
        for r in data.positive_even.iter().chain(&data.positive_odd).chain(&data.generators) {
            let neg = Weight(r.0.iter().map(|a| -a).collect());
            assert!(leq(&neg, &zero).unwrap(), "{r} not in the semigroup");
        }
        assert_eq!(data.positive_odd.len(), n * (n - 1) / 2);
    }
    assert_eq!(PRootData::new(1), Err(WeightError::RankTooSmall(1)));
}

/// Random `(μ, λ)` with `μ ≤ λ`, `λ − μ` a sum of at most `steps` positive roots.
fn comparable_pair(rng: &mut ChaCha8Rng, n: usize, steps: usize, dominant: bool) -> (Weight, Weight) {
    let data = PRootData::new(n).unwrap();
    let roots: Vec<&Weight> = data.positive_even.iter().chain(&data.positive_odd).collect();
    loop {
        let lambda = random_weight(rng, n, 3);
        let mut mu = lambda.0.clone();
        for _ in 0..rng.gen_range(0..=steps) {
            let r = roots[rng.gen_range(0..roots.len())];
            for (a, b) in mu.iter_mut().zip(&r.0) {
                *a -= b;
            }
        }
        let mu = Weight(mu);
        if !dominant || (mu.is_dominant() && lambda.is_dominant()) {
            return (mu, lambda);
        }
    }
}

#[test]
fn intervals_match_oracle_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 2..=4 {
        let oracle = Oracle::new(n, 40);
        for _ in 0..40 {
            let (mu, lambda) = comparable_pair(&mut rng, n, 3, false);
            let total = sub(&lambda, &mu);
            if phi(&total) > oracle.cap {
                continue;
            }
            let mut expected: Vec<Weight> = oracle
                .reached
                .keys()
                .filter(|s| phi(s) <= phi(&total))
                .filter(|s| oracle.reached.contains_key(&sub(&Weight(total.clone()), &Weight(s.to_vec()))))
                .map(|s| Weight(mu.0.iter().zip(s.iter()).map(|(a, b)| a + b).collect()))
                .collect();
            expected.sort();
            let got = interval(&mu, &lambda, false).unwrap();
            assert_eq!(got, expected, "[{mu}, {lambda}]");
            let bounds = prefix_box(&mu, &lambda).unwrap();
            let l = ell(&mu, &lambda).unwrap();
            for pi in &got {
                let mut s = 0;
                for (k, b) in pi.0.iter().enumerate() {
                    s += b;
                    assert!(bounds[k].0 <= s && s <= bounds[k].1);
                }
                assert_eq!(ell(&mu, pi).unwrap() + ell(pi, &lambda).unwrap(), l);
                for rho in &got {
                    if leq(pi, rho).unwrap() {
                        assert_eq!(ell(&mu, pi).unwrap() + ell(pi, rho).unwrap() + ell(rho, &lambda).unwrap(), l);
                    }
                }
            }
        }
    }
}

#[test]
fn dominant_intervals_obey_chain_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut nontrivial = 0;
    for n in 2..=4 {
        for _ in 0..40 {
            let (mu, lambda) = comparable_pair(&mut rng, n, 4, true);
            let all = interval(&mu, &lambda, false).unwrap();
            let dom = interval(&mu, &lambda, true).unwrap();
            let filtered: Vec<Weight> = all.into_iter().filter(Weight::is_dominant).collect();
            assert_eq!(dom, filtered, "[{mu}, {lambda}]");
            let (a1, an) = (lambda.0[0], lambda.0[n - 1]);
            let l = ell(&mu, &lambda).unwrap();
            for pi in &dom {
                let lp = ell(pi, &lambda).unwrap();
                assert!(a1 + l >= a1 + lp && a1 + lp >= pi.0[0] && pi.0[n - 1] >= an);
            }
            if dom.len() > 2 {
                nontrivial += 1;
            }
        }
    }
    assert!(nontrivial > 0);
}

fn small_weight(n: usize) -> impl Strategy<Value = Weight> {
    prop::collection::vec(-3i64..=3, n).prop_map(Weight)
}

proptest! {
    #[test]
    fn order_is_antisymmetric_and_transitive((a, b, c) in (2usize..=4).prop_flat_map(|n| (small_weight(n), small_weight(n), small_weight(n)))) {
        prop_assert!(leq(&a, &a).unwrap());
        if leq(&a, &b).unwrap() && leq(&b, &a).unwrap() {
            prop_assert_eq!(&a, &b);
        }
        if leq(&a, &b).unwrap() && leq(&b, &c).unwrap() {
            prop_assert!(leq(&a, &c).unwrap());
            prop_assert_eq!(ell(&a, &b).unwrap() + ell(&b, &c).unwrap(), ell(&a, &c).unwrap());
        }
    }
}
