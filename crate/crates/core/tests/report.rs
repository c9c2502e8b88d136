use superds::golden::Verdict;
use superds::report::*;

fn params(p: u32) -> Params {
    Params { p: Some(p), ..Params::default() }
}

#[test]
fn derham_report_has_binomial_dims() {
    let r = run_suite("derham", &Params { s: Some(2), ..params(3) }, 0).unwrap();
    assert!(r.passed(), "{}", r.to_markdown());
    let dims = r.checks.iter().find(|c| c.id == "derham:cohomology-dims").unwrap();
    assert_eq!(dims.computed, "[1, 2, 1]");
}

#[test]
fn gl_report_passes_and_is_deterministic() {
    let p = Params { m: Some(1), n: Some(1), i: Some(1), j: Some(2), ..params(3) };
    let a = run_suite("gl", &p, 7).unwrap();
    assert!(a.passed(), "{}", a.to_markdown());
    assert!(a.checks.iter().any(|c| c.source == Source::Golden));
    assert!(a.checks.iter().any(|c| c.source == Source::Derived));
    assert_eq!(a.to_json(), run_suite("gl", &p, 7).unwrap().to_json());
}

#[test]
fn small_suites_pass() {
    for (name, p) in [
        ("koszul", Params { t: Some(2), dmax: Some(4), ..params(5) }),
        ("hopf", Params { m: Some(1), n: Some(1), ..params(3) }),
        ("gl-maxrank", Params { n: Some(1), ..params(3) }),
        ("q", Params { n: Some(2), i: Some(2), j: Some(1), ..params(3) }),
    ] {
        let r = run_suite(name, &p, 0).unwrap();
        assert!(r.passed(), "{}", r.to_markdown());
        assert!(r.checks.iter().all(|c| c.verdict == Verdict::Pass));
    }
}

#[test]
fn usage_errors() {
    assert!(matches!(run_suite("nope", &Params::default(), 0), Err(ReportError::UnknownSuite(_))));
    assert!(matches!(run_suite("gl", &params(3), 0), Err(ReportError::BadParams(_))));
    assert!(matches!(run_suite("derham", &params(4), 0), Err(ReportError::BadParams(_))));
    assert!(matches!(run_suite("gl", &Params { m: Some(1), n: Some(1), i: Some(2), ..params(3) }, 0), Err(ReportError::Supergroup(_))));
}
