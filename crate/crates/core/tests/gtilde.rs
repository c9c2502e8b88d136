use superds::golden::{CheckRecord, Verdict};
use superds::gtilde::{gl_rank_one_suite, load_golden};
use superds::F3;

fn failures(records: &[CheckRecord]) -> Vec<&CheckRecord> {
    records
        .iter()
        .filter(|r| r.verdict != Verdict::Pass)
        .collect()
}

#[test]
fn gl_rank_one_golden() {
    let lines = load_golden("gl_rank_one.golden").unwrap();
    for (m, n) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
        for i in 1..=m {
            for j in m + 1..=m + n {
                let suite = gl_rank_one_suite::<F3>(m, n, i, j).unwrap();
                let records = suite.run(&lines).unwrap();
                let bad = failures(&records);
                assert!(bad.is_empty(), "GL({m}|{n}) x=e{i}{j}: {bad:#?}");
                assert!(records.len() > 10);
            }
        }
    }
}

#[test]
fn gl_runner_rejects_wrong_displays() {
    let wrong = "\
cop/S | bad-vr | k=2..m | t[i,nth(k-1,1,m,i)]^(p-1)*t[j,nth(k-1,1,m,i)] | t[i,nth(k-1,1,m,i)]^(p-1)*t[j,nth(k-1,1,m,i)] ⊗ 1 + 1 ⊗ t[i,nth(k-1,1,m,i)]^(p-1)*t[j,nth(k-1,1,m,i)]
cop | bad-sign | | t[i,i]^(p-1)*t[j,i] | t[i,i]^p ⊗ t[i,i]^(p-1)*t[j,i] - t[i,i]^(p-1)*t[j,i] ⊗ t[i,i]^p
conj | bad-conj | | t[i,i] | -t[j,i]
span:U | bad-span | | | each{l=1..size}(t[i,l])
cop | not-cocycle | | t[i,i] | t[i,i] ⊗ t[i,i]
";
    let lines = superds::golden::parse_golden(wrong).unwrap();
    let suite = gl_rank_one_suite::<F3>(2, 1, 1, 3).unwrap();
    let records = suite.run(&lines).unwrap();
    assert_eq!(records.len(), 5);
    for r in &records {
        assert_eq!(r.verdict, Verdict::Fail, "{r:#?}");
    }
}

#[test]
fn gl_max_rank_golden_and_intertwining() {
    let lines = load_golden("gl_max_rank.golden").unwrap();
    for n in [1, 2] {
        let suite = superds::gtilde::gl_max_rank_suite::<F3>(n).unwrap();
        let records = suite.run(&lines).unwrap();
        let bad = failures(&records);
        assert!(bad.is_empty(), "GL({n}|{n}): {bad:#?}");
        assert_eq!(
            records.iter().filter(|r| r.id == "odd-block").count(),
            n * n
        );
        let checks = superds::gtilde::gl_max_rank_intertwining(&suite, n).unwrap();
        assert_eq!(checks.len(), 2 * n * n);
        assert!(checks.iter().all(|c| c.pass), "{checks:#?}");
    }
}

#[test]
fn queer_golden() {
    let lines = load_golden("queer.golden").unwrap();
    for n in [2, 3] {
        for i in 1..=n {
            for j in (1..=n).filter(|&j| j != i) {
                let suite = superds::gtilde::q_suite::<F3>(n, i, j).unwrap();
                let records = suite.run(&lines).unwrap();
                let bad = failures(&records);
                assert!(bad.is_empty(), "Q({n}) x=e'{i}{j}: {bad:#?}");
            }
        }
    }
}

/// The last odd generator's coproduct checked by direct elimination in `C ⊗ C`, independent of
/// the cohomology projector.
#[test]
fn queer_corner_coproduct_by_elimination() {
    use superds::golden::parse_expr;
    use superds::supergroups::congruent_by_elimination;
    for (n, i, j) in [(2, 1, 2), (3, 1, 2), (3, 3, 1)] {
        let suite = superds::gtilde::q_suite::<F3>(n, i, j).unwrap();
        let aliases = Default::default();
        let eval = |s: &str| {
            suite
                .pair
                .eval(&parse_expr(s).unwrap(), &suite.env, &aliases)
                .unwrap()
                .num
        };
        let z = suite
            .single
            .eval(
                &parse_expr("s[i,j]^(p-1)*(s'[j,j] + s'[i,i])").unwrap(),
                &suite.env,
                &aliases,
            )
            .unwrap()
            .num;
        let lhs = suite.group.bialgebra.coproduct_of(&z);
        let displayed = eval("sum{t=1..n; t!=j}(s[i,t]^(p-1)*s'[j,t] ⊗ s[t,j]^p) + s[i,j]^(p-1)*(s'[j,j] + s'[i,i]) ⊗ s[i,i]^p + s[i,i]^p ⊗ s[i,j]^(p-1)*(s'[j,j] + s'[i,i])");
        let extra = eval("s[i,j]^p ⊗ s[i,i]^(p-1)*s'[j,i] + sum{t=1..n; t!=i; t!=j}(s[i,t]^p ⊗ s[t,j]^(p-1)*s'[t,i])");
        let ring = suite.group.ring();
        assert!(!congruent_by_elimination(ring, &suite.x, &lhs, &displayed, &[3, 3]).unwrap());
        assert!(
            congruent_by_elimination(ring, &suite.x, &lhs, &displayed.add(&extra), &[3, 3])
                .unwrap()
        );
    }
}

#[test]
fn faithful_golden() {
    let lines = load_golden("faithful.golden").unwrap();
    for (m, n) in [(1, 1), (2, 1)] {
        for i in 1..=m {
            for j in m + 1..=m + n {
                let suite = superds::gtilde::faithful_suite::<F3>(m, n, i, j).unwrap();
                let records = suite.run(&lines).unwrap();
                let bad = failures(&records);
                assert!(bad.is_empty(), "GL({m}|{n}) x=e{i}{j}: {bad:#?}");
            }
        }
    }
}

#[test]
fn faithful_coefficients_generate() {
    use superds::gtilde::{faithful_generation, faithful_suite, module_slice_ds};
    for (m, n, i, j) in [(1, 1, 1, 2), (2, 1, 1, 3), (2, 1, 2, 3)] {
        let mut suite = faithful_suite::<F3>(m, n, i, j).unwrap();
        for s in module_slice_ds(&suite, 3).unwrap() {
            assert_eq!(s.ds.even + s.ds.odd, s.predicted, "{s:?}");
        }
        let report = faithful_generation(&suite, 5).unwrap();
        assert!(report.all_generated(), "GL({m}|{n}) e{i}{j}: {report:#?}");
        if m == 2 {
            suite.modules.remove("Wstar");
            assert!(!faithful_generation(&suite, 5).unwrap().all_generated());
        }
    }
}
