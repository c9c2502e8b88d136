//! Verification suites over the library, collected into deterministic reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::complexes::{cartier_check, koszul_strand, lambda_class_check, p_restricted_de_rham, r_prime_subcomplex, sym_ds_graded_dims, ComplexError};
use crate::field::{Fp, Scalar};
use crate::golden::{GoldenError, Verdict};
use crate::gtilde::{faithful_generation, faithful_suite, gl_max_rank_intertwining, gl_max_rank_suite, gl_rank_one_suite, load_golden, module_slice_ds, q_suite, GoldenSuite};
use crate::lie::{index_deletion_matches, lie_centralizer_and_bracket, LieError};
use crate::supergroups::{conjugation_derivation, generator_matrix, gl_hopf, ideal_annihilates_centralizer, q_bialgebra, split_generator_space, verify_coproduct_proposition, verify_vx_subcoalgebra, Supergroup, SupergroupError};
use crate::with_prime;

pub const SUITES: [&str; 6] = ["derham", "koszul", "hopf", "gl", "gl-maxrank", "q"];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("unknown suite {0:?}; expected one of derham, koszul, hopf, gl, gl-maxrank, q")]
    UnknownSuite(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Supergroup(#[from] SupergroupError),
    #[error(transparent)]
    Golden(#[from] GoldenError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Golden,
    Derived,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub id: String,
    pub source: Source,
    pub expected: String,
    pub computed: String,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub parameters: BTreeMap<String, i64>,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict == Verdict::Pass)
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let count = |v: Verdict| self.checks.iter().filter(|c| c.verdict == v).count();
        (count(Verdict::Pass), count(Verdict::Fail), count(Verdict::Inconclusive))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("# {}\n\n", self.suite);
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let (pass, fail, inc) = self.counts();
        let _ = writeln!(out, "parameters: {} | seed: {}\n", params.join(", "), self.seed);
        let _ = writeln!(out, "{pass} pass, {fail} fail, {inc} inconclusive\n");
        out.push_str("| check | source | expected | computed | verdict |\n|---|---|---|---|---|\n");
        for c in &self.checks {
            let cell = |s: &str| s.replace('|', "\\|").replace('\n', " ");
            let _ = writeln!(out, "| {} | {} | {} | {} | {} |", cell(&c.id), label(&c.source), cell(&c.expected), cell(&c.computed), label(&c.verdict));
        }
        out
    }
}

/// The serialized name of a unit enum variant.
fn label<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

/// Suite parameters; unset values take per-suite defaults.
#[derive(Clone, Debug, Default)]
pub struct Params {
    pub p: Option<u32>,
    pub s: Option<usize>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub i: Option<usize>,
    pub j: Option<usize>,
    pub t: Option<usize>,
    pub dmax: Option<u32>,
}

struct Builder {
    checks: Vec<Check>,
}

impl Builder {
    fn derived(&mut self, id: impl Into<String>, expected: impl ToString, computed: impl ToString) {
        let (expected, computed) = (expected.to_string(), computed.to_string());
        let verdict = if expected == computed { Verdict::Pass } else { Verdict::Fail };
        self.checks.push(Check { id: id.into(), source: Source::Derived, expected, computed, verdict });
    }

    fn golden<F: Scalar>(&mut self, suite: &GoldenSuite<F>, file: &str) -> Result<(), ReportError> {
        for r in suite.run(&load_golden(file)?)? {
            let id = if r.instance.is_empty() { format!("{}:{}", r.kind, r.id) } else { format!("{}:{}[{}]", r.kind, r.id, r.instance) };
            let computed = match &r.note {
                Some(note) => format!("{} ({note})", r.computed),
                None => r.computed,
            };
            self.checks.push(Check { id, source: Source::Golden, expected: r.expected, computed, verdict: r.verdict });
        }
        Ok(())
    }
}

fn binomials(s: usize) -> Vec<usize> {
    (0..=s).scan(1usize, |c, q| {
        let out = *c;
        *c = *c * (s - q) / (q + 1);
        Some(out)
    })
    .collect()
}

fn require(name: &str, v: Option<usize>, default: Option<usize>) -> Result<usize, ReportError> {
    v.or(default).ok_or_else(|| ReportError::BadParams(format!("--{name} is required")))
}

fn derham<F: Scalar>(b: &mut Builder, s: usize) {
    let r = p_restricted_de_rham::<F>(s);
    b.derived("derham:cohomology-dims", format!("{:?}", binomials(s)), format!("{:?}", r.cohomology_dims()));
    b.derived("derham:r-prime-acyclic", format!("{:?}", vec![0; s + 1]), format!("{:?}", r_prime_subcomplex::<F>(s).cohomology_dims()));
    for rep in lambda_class_check::<F>(s) {
        b.derived(format!("derham:divided-power-classes[q={}]", rep.form_degree), format!("cocycles, rank {}", rep.cohomology_dim), format!("{}, rank {}", if rep.cocycles { "cocycles" } else { "not cocycles" }, rep.independent_rank));
    }
    for e in 0..=s as u32 {
        let rep = cartier_check::<F>(s, e);
        b.derived(
            format!("cartier:degree-{e}"),
            format!("cocycles, rank {}, forms {}", rep.target_cohomology, binomials(s)[e as usize]),
            format!("{}, rank {}, forms {}", if rep.all_cocycles { "cocycles" } else { "not cocycles" }, rep.independent_rank, rep.lambda_counts[e as usize]),
        );
    }
}

fn koszul<F: Scalar>(b: &mut Builder, t: usize, dmax: u32) {
    for d in 0..=dmax {
        let expected = if d == 0 { 1 } else { 0 };
        let h: usize = koszul_strand::<F>(t, d).cohomology_dims().iter().sum();
        b.derived(format!("koszul:strand-{d}"), format!("total cohomology {expected}"), format!("total cohomology {h}"));
    }
}

fn hopf<F: Scalar>(b: &mut Builder, m: usize, n: usize) -> Result<(), ReportError> {
    let laws = |f: Vec<crate::poly::LawFailure>| if f.is_empty() { "all laws hold".to_string() } else { format!("{} failures, first {}/{}", f.len(), f[0].law, f[0].generator) };
    b.derived(format!("hopf:gl({m}|{n})"), "all laws hold", laws(gl_hopf::<F>(m, n)?.check_laws()));
    b.derived(format!("hopf:q({n})"), "all laws hold", laws(q_bialgebra::<F>(n)?.check_laws()));
    Ok(())
}

fn gl_rank_one<F: Scalar>(b: &mut Builder, m: usize, n: usize, i: usize, j: usize) -> Result<(), ReportError> {
    let g = Supergroup::<F>::gl(m, n)?;
    let x = g.rank_one_element(i, j)?;
    let d = conjugation_derivation(&g, &x)?;
    let order = g.preferred_order(i);
    for c in verify_coproduct_proposition(&g, &d, &order)? {
        let power = if c.power_matches { &c.expected_power } else { &c.computed_power };
        b.derived(format!("coproduct:{}:power", c.generator), &c.expected_power, power);
        let odd = if c.odd_matches { &c.expected_odd } else { &c.computed_odd };
        b.derived(format!("coproduct:{}:odd", c.generator), &c.expected_odd, odd);
    }
    for (name, ok, detail) in verify_vx_subcoalgebra(&g, &d, &order)? {
        b.derived(format!("vx-subcoalgebra:{name}"), "true", format!("{ok}{}", if ok { String::new() } else { format!(" ({detail})") }));
    }
    b.derived("ideal-annihilates-centralizer", true, ideal_annihilates_centralizer(&g, &x, &d)?);
    let split = split_generator_space(g.ring(), &d, &order)?;
    let q = lie_centralizer_and_bracket(&g.lie, &x)?;
    let k = m + n - 2;
    b.derived("lie:dim-bracket-image", split.u.len(), q.bracket_image.dim());
    b.derived("lie:dim-g_x", split.vx.len(), q.dim());
    b.derived("lie:dim-g_x-formula", k * k, q.dim());
    b.derived("lie:index-deletion", true, index_deletion_matches::<F>(m, n, i, j)?);
    let p = F::characteristic();
    let rep = sym_ds_graded_dims(g.ring().parities(), &generator_matrix(g.ring(), &d)?, 2 * p)?;
    b.derived("sym-ds:graded-dims", format!("{:?}", rep.predicted), format!("{:?}", rep.computed));
    b.golden(&gl_rank_one_suite::<F>(m, n, i, j)?, "gl_rank_one.golden")?;
    let suite = faithful_suite::<F>(m, n, i, j)?;
    b.golden(&suite, "faithful.golden")?;
    for s in module_slice_ds(&suite, 3)? {
        b.derived(format!("faithful:{}-degree-{}-ds", s.module, s.degree), s.predicted, s.ds.even + s.ds.odd);
    }
    let mut gen = faithful_generation(&suite, 5)?;
    if !gen.all_generated() {
        gen = faithful_generation(&suite, 8)?;
    }
    for (t, ok) in gen.targets.iter().zip(&gen.generated) {
        b.derived(format!("faithful:generates:{t}"), true, ok);
    }
    Ok(())
}

fn gl_max_rank<F: Scalar>(b: &mut Builder, n: usize) -> Result<(), ReportError> {
    let suite = gl_max_rank_suite::<F>(n)?;
    b.golden(&suite, "gl_max_rank.golden")?;
    for c in gl_max_rank_intertwining(&suite, n)? {
        let computed = if c.pass { c.expected.clone() } else { c.computed.clone() };
        b.derived(format!("intertwining:{}", c.generator), &c.expected, computed);
    }
    let x = suite.group.max_rank_element()?;
    let q = lie_centralizer_and_bracket(&suite.group.lie, &x)?;
    b.derived("lie:dim-g_x", 0, q.dim());
    b.derived("lie:centralizer-equals-bracket", 2 * n * n, q.bracket_image.dim());
    Ok(())
}

/// Runs a registered suite. Suites are deterministic; `seed` is recorded for the report only.
pub fn run_suite(name: &str, params: &Params, seed: u64) -> Result<VerificationReport, ReportError> {
    if !SUITES.contains(&name) {
        return Err(ReportError::UnknownSuite(name.into()));
    }
    let p = params.p.unwrap_or(3);
    let mut b = Builder { checks: Vec::new() };
    let mut recorded = BTreeMap::from([("p".to_string(), p as i64)]);
    let mut record = |k: &str, v: usize| {
        recorded.insert(k.to_string(), v as i64);
    };
    let outcome: Result<Result<(), ReportError>, u32> = match name {
        "derham" => {
            let s = require("s", params.s, Some(2))?;
            record("s", s);
            with_prime!(p, P => { derham::<Fp<P>>(&mut b, s); Ok(()) })
        }
        "koszul" => {
            let t = require("t", params.t, Some(2))?;
            let dmax = params.dmax.unwrap_or(6);
            record("t", t);
            record("dmax", dmax as usize);
            with_prime!(p, P => { koszul::<Fp<P>>(&mut b, t, dmax); Ok(()) })
        }
        "hopf" => {
            let (m, n) = (require("m", params.m, Some(1))?, require("n", params.n, Some(1))?);
            record("m", m);
            record("n", n);
            with_prime!(p, P => hopf::<Fp<P>>(&mut b, m, n))
        }
        "gl" => {
            let (m, n) = (require("m", params.m, None)?, require("n", params.n, None)?);
            let (i, j) = (require("i", params.i, Some(1))?, require("j", params.j, Some(m + 1))?);
            for (k, v) in [("m", m), ("n", n), ("i", i), ("j", j)] {
                record(k, v);
            }
            with_prime!(p, P => gl_rank_one::<Fp<P>>(&mut b, m, n, i, j))
        }
        "gl-maxrank" => {
            let n = require("n", params.n, None)?;
            record("n", n);
            with_prime!(p, P => gl_max_rank::<Fp<P>>(&mut b, n))
        }
        "q" => {
            let n = require("n", params.n, None)?;
            let (i, j) = (require("i", params.i, Some(1))?, require("j", params.j, Some(2))?);
            for (k, v) in [("n", n), ("i", i), ("j", j)] {
                record(k, v);
            }
            with_prime!(p, P => q_suite::<Fp<P>>(n, i, j).map_err(ReportError::from).and_then(|s| b.golden(&s, "queer.golden")))
        }
        _ => unreachable!("suite names are checked above"),
    };
    outcome.map_err(|p| ReportError::BadParams(format!("unsupported prime {p}; use 3, 5, 7, 11 or 13")))??;
    Ok(VerificationReport { suite: name.into(), parameters: recorded, seed, checks: b.checks })
}
