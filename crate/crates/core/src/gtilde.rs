//! Case runners for the symmetry supergroup of GL(m|n) and Q(n): build the projector, the
//! quotient maps and the module coactions, then check golden lines against them.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::ds::{ds, SquareZeroOddOperator};
use crate::field::Scalar;
use crate::golden::{
    Aliases, AntipodeData, Body, CheckRecord, Env, Evaluator, Expr, GoldenError, GoldenLine, Kind,
    Leg, ListItem, Val, Verdict,
};
use crate::linalg::{Parity, Subspace, SuperDim};
use crate::poly::{degree_slice_matrix, Derivation, Localized, Poly, Ring};
use crate::sparse::SparseEchelon;
use crate::supergroups::{
    centralizer_ideal_generators, conjugation_derivation, family_generator, gl_antipode,
    linear_coords, ClassProjector, Family, Supergroup, SupergroupError,
};

/// A module `Sym(M)` with its coaction, checked in the ring `Sym(M) ⊗ k[G]`.
pub struct ModuleSetup<F> {
    pub ring: Arc<Ring>,
    pub x: Derivation<F>,
    /// Single-leg evaluator on `Sym(M)`.
    pub single: Evaluator<F>,
    /// Two legs: `Sym(M)` then the coordinate ring.
    pub pair: Evaluator<F>,
    /// Coaction of each generator of `Sym(M)` in `pair.combined`.
    pub coaction: Vec<Val<F>>,
    pub pair_x: Derivation<F>,
    pub projector: ClassProjector<F>,
}

impl<F: Scalar> ModuleSetup<F> {
    pub fn coact(&self, f: &Poly<F>) -> Val<F> {
        let ev = &self.pair;
        let mut acc = ev.plain(ev.combined.zero());
        for (m, &c) in f.terms() {
            let mut term = ev.plain(ev.combined.constant(c));
            for (g, &k) in m.exponents().iter().enumerate() {
                for _ in 0..k {
                    term = ev.mul(&term, &self.coaction[g]);
                }
            }
            acc = ev.add(&acc, &term);
        }
        acc
    }
}

pub struct GoldenSuite<F> {
    pub env: Env,
    pub group: Supergroup<F>,
    pub x: Derivation<F>,
    pub projector: ClassProjector<F>,
    pub single: Evaluator<F>,
    pub pair: Evaluator<F>,
    pub spans: BTreeMap<String, Vec<Vec<F>>>,
    /// Images of the cohomology generators under each named quotient.
    pub quotients: BTreeMap<String, Vec<Poly<F>>>,
    pub modules: BTreeMap<String, ModuleSetup<F>>,
}

fn coordinate_leg(family: Family, ring: &Arc<Ring>) -> Leg {
    Leg {
        ring: ring.clone(),
        resolve: Box::new(move |name, idx| family_generator(family, name, idx)),
    }
}

fn letter_leg(ring: &Arc<Ring>, letter: &'static str) -> Leg {
    let n = ring.nvars() as i64;
    Leg {
        ring: ring.clone(),
        resolve: Box::new(move |name, idx| {
            if name == letter && idx.len() == 1 && (1..=n).contains(&idx[0]) {
                Some(idx[0] as usize - 1)
            } else {
                None
            }
        }),
    }
}

/// The derivation acting by each leg's derivation on that leg's variables.
fn concat_derivation<F: Scalar>(ev: &Evaluator<F>, parts: &[&Derivation<F>]) -> Derivation<F> {
    let mut images = Vec::new();
    for (leg, d) in parts.iter().enumerate() {
        for g in 0..ev.legs[leg].ring.nvars() {
            images.push(ev.embed(d.image(g).expect("total derivation"), leg));
        }
    }
    Derivation::new(Parity::Odd, images)
}

fn render_instance(env: &Env, vars: &[String]) -> String {
    vars.iter()
        .filter_map(|v| env.get(v).map(|x| format!("{v}={x}")))
        .collect::<Vec<_>>()
        .join(", ")
}

struct Comparison {
    equal: bool,
    expected: String,
    computed: String,
    note: Option<String>,
}

fn round_up(v: u32, p: u32) -> u32 {
    v.div_ceil(p) * p
}

impl<F: Scalar> GoldenSuite<F> {
    fn new(
        group: Supergroup<F>,
        x: Derivation<F>,
        order: &[usize],
        env: Env,
    ) -> Result<Self, SupergroupError> {
        let ring = group.ring().clone();
        let projector = ClassProjector::new(&ring, &x, order)?;
        let single = Evaluator::new(vec![coordinate_leg(group.family, &ring)], Vec::new(), None);
        let pair = Evaluator::new(
            vec![
                coordinate_leg(group.family, &ring),
                coordinate_leg(group.family, &ring),
            ],
            Vec::new(),
            None,
        );
        let mut spans = BTreeMap::new();
        spans.insert("U".to_string(), projector.split.u.clone());
        spans.insert("xU".to_string(), projector.split.xu.clone());
        spans.insert("Vx".to_string(), projector.split.vx.clone());
        spans.insert(
            "ideal".to_string(),
            centralizer_ideal_generators(&ring, &x)?
                .iter()
                .map(linear_coords)
                .collect(),
        );
        Ok(GoldenSuite {
            env,
            group,
            x,
            projector,
            single,
            pair,
            spans,
            quotients: BTreeMap::new(),
            modules: BTreeMap::new(),
        })
    }

    /// Quotient of the cohomology ring sending the `V_x` generators to their counits and the
    /// listed generators' `p`-th power classes to 1.
    fn add_quotient(&mut self, name: &str, unit_generators: &[usize]) {
        let h = &self.projector.h;
        let nvx = self.projector.nvx();
        let counit = &self.group.bialgebra.counit;
        let mut images: Vec<Poly<F>> = (0..h.nvars()).map(|k| h.gen(k)).collect();
        for (k, v) in self.projector.split.vx.iter().enumerate() {
            let c = v
                .iter()
                .zip(counit)
                .fold(F::zero(), |acc, (a, b)| acc + *a * *b);
            images[k] = h.constant(c);
        }
        debug_assert!(nvx == self.projector.split.vx.len());
        for &g in unit_generators {
            if let Some(y) = self.projector.y_of_generator(g) {
                images[y] = h.one();
            }
        }
        self.quotients.insert(name.to_string(), images);
    }

    fn compare(
        &self,
        ev: &Evaluator<F>,
        proj: &ClassProjector<F>,
        x: &Derivation<F>,
        legs: usize,
        a: &Val<F>,
        b: &Val<F>,
        quotient: Option<&[Poly<F>]>,
        differs_by: Option<&Val<F>>,
    ) -> Comparison {
        let p = F::characteristic();
        let mut dens: Vec<u32> = a
            .dens
            .iter()
            .zip(&b.dens)
            .map(|(x, y)| round_up(*x.max(y), p))
            .collect();
        if let Some(d) = differs_by {
            dens = dens
                .iter()
                .zip(&d.dens)
                .map(|(x, y)| round_up(*x.max(y), p))
                .collect();
        }
        let (na, nb) = (ev.over(a, &dens), ev.over(b, &dens));
        let h = &proj.h;
        let big = h.tensor_power(legs);
        let render = |c: &Poly<F>| {
            if legs == 1 {
                h.render(c)
            } else {
                h.render_tensor(c, legs)
            }
        };
        let class = |f: &Poly<F>| -> Result<Poly<F>, String> {
            if !x
                .apply(&ev.combined, f)
                .map_err(|e| e.to_string())?
                .is_zero()
            {
                return Err(format!("not a cocycle: {}", ev.combined.render(f)));
            }
            let c = proj.project(f, legs);
            Ok(match quotient {
                None => c,
                Some(q) => {
                    let images: Vec<Poly<F>> = (0..legs)
                        .flat_map(|k| q.iter().map(move |im| h.embed(im, k, legs)))
                        .collect();
                    big.substitute(&c, &images, &big)
                }
            })
        };
        let (ca, cb) = match (class(&na), class(&nb)) {
            (Ok(ca), Ok(cb)) => (ca, cb),
            (ra, rb) => {
                return Comparison {
                    equal: false,
                    expected: rb.map_or_else(|e| e, |c| render(&c)),
                    computed: ra.map_or_else(|e| e, |c| render(&c)),
                    note: Some("cocycle check failed".into()),
                }
            }
        };
        let denominators = dens
            .iter()
            .any(|&d| d > 0)
            .then(|| format!("compared after clearing denominators {dens:?}"));
        match differs_by {
            None => Comparison {
                equal: ca == cb,
                expected: render(&cb),
                computed: render(&ca),
                note: denominators,
            },
            Some(d) => {
                let nd = ev.over(d, &dens);
                match class(&nd) {
                    Ok(cd) => Comparison {
                        equal: ca == cb.add(&cd) && !cd.is_zero(),
                        expected: render(&cb),
                        computed: render(&ca),
                        note: Some(format!(
                            "display differs from the computed class by {}",
                            render(&cd)
                        )),
                    },
                    Err(e) => Comparison {
                        equal: false,
                        expected: render(&cb),
                        computed: render(&ca),
                        note: Some(e),
                    },
                }
            }
        }
    }

    fn eval(
        &self,
        ev: &Evaluator<F>,
        e: &Expr,
        env: &Env,
        aliases: &Aliases,
    ) -> Result<Val<F>, GoldenError> {
        ev.eval(e, env, aliases)
    }

    /// Instantiate and check every line; alias lines extend the scope of later lines.
    pub fn run(&self, lines: &[GoldenLine]) -> Result<Vec<CheckRecord>, GoldenError> {
        let mut aliases = Aliases::new();
        let mut out = Vec::new();
        for line in lines {
            let vars = line.binders.variables();
            let instances = line.binders.instances(&self.env)?;
            match (&line.kind, &line.body) {
                (Kind::Alias, Body::Pair(lhs, rhs)) => {
                    let Expr::Name(name, idx) = lhs else {
                        return Err(GoldenError::Syntax {
                            line: line.line,
                            msg: "alias needs a name on the left".into(),
                        });
                    };
                    let params: Vec<String> = idx
                        .iter()
                        .map(|a| match a {
                            crate::golden::Arith::Var(v) => Ok(v.clone()),
                            _ => Err(GoldenError::Syntax {
                                line: line.line,
                                msg: "alias parameters must be variables".into(),
                            }),
                        })
                        .collect::<Result<_, _>>()?;
                    aliases.insert(name.clone(), (params, rhs.clone()));
                    for env in &instances {
                        self.eval(&self.single, rhs, env, &aliases)?;
                    }
                }
                (Kind::Span(which), Body::List(items)) => {
                    let computed = self
                        .spans
                        .get(which)
                        .ok_or_else(|| GoldenError::Eval(format!("unknown span {which}")))?;
                    let n = self.group.ring().nvars();
                    let mut listed = Vec::new();
                    for env in &instances {
                        for item in items {
                            let (b, e) = match item {
                                ListItem::Single(e) => (None, e),
                                ListItem::Each(b, e) => (Some(b), e),
                            };
                            let envs = match b {
                                None => vec![env.clone()],
                                Some(b) => b.instances(env)?,
                            };
                            for env2 in envs {
                                let v = self.eval(&self.single, e, &env2, &aliases)?;
                                if v.num.homogeneous_degree().is_some_and(|d| d != 1) {
                                    return Err(GoldenError::Eval(format!(
                                        "line {}: span element is not linear",
                                        line.line
                                    )));
                                }
                                listed.push(linear_coords(&v.num));
                            }
                        }
                    }
                    let (sa, sb) = (Subspace::span(n, computed), Subspace::span(n, &listed));
                    let ring = self.group.ring();
                    let show = |s: &Subspace<F>| {
                        s.basis()
                            .iter()
                            .map(|v| ring.render(&crate::supergroups::from_linear(v)))
                            .collect::<Vec<_>>()
                            .join(", ")
                    };
                    out.push(CheckRecord {
                        id: line.id.clone(),
                        kind: line.kind.to_string(),
                        instance: String::new(),
                        expected: format!("span{{{}}}", show(&sb)),
                        computed: format!("span{{{}}}", show(&sa)),
                        verdict: if sa == sb {
                            Verdict::Pass
                        } else {
                            Verdict::Fail
                        },
                        note: None,
                    });
                }
                (kind, Body::Pair(lhs, rhs)) => {
                    for env in &instances {
                        let record = self.check_pair(line, kind, lhs, rhs, env, &aliases)?;
                        out.push(CheckRecord {
                            instance: render_instance(env, &vars),
                            ..record
                        });
                    }
                }
                _ => {
                    return Err(GoldenError::Syntax {
                        line: line.line,
                        msg: "malformed line body".into(),
                    })
                }
            }
        }
        Ok(out)
    }

    fn check_pair(
        &self,
        line: &GoldenLine,
        kind: &Kind,
        lhs: &Expr,
        rhs: &Expr,
        env: &Env,
        aliases: &Aliases,
    ) -> Result<CheckRecord, GoldenError> {
        let base = |c: Comparison| CheckRecord {
            id: line.id.clone(),
            kind: kind.to_string(),
            instance: String::new(),
            expected: c.expected,
            computed: c.computed,
            verdict: if c.equal {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            note: c.note,
        };
        let ring = self.group.ring();
        Ok(match kind {
            Kind::Conj => {
                let a = self.eval(&self.single, lhs, env, aliases)?;
                let b = self.eval(&self.single, rhs, env, aliases)?;
                let xa = self
                    .x
                    .apply(ring, &a.num)
                    .map_err(|e| GoldenError::Eval(e.to_string()))?;
                base(Comparison {
                    equal: xa == b.num,
                    expected: ring.render(&b.num),
                    computed: ring.render(&xa),
                    note: None,
                })
            }
            Kind::Class => {
                let a = self.eval(&self.single, lhs, env, aliases)?;
                let b = self.eval(&self.single, rhs, env, aliases)?;
                let d = line
                    .differs_by
                    .as_ref()
                    .map(|e| self.eval(&self.single, e, env, aliases))
                    .transpose()?;
                base(self.compare(
                    &self.single,
                    &self.projector,
                    &self.x,
                    1,
                    &a,
                    &b,
                    None,
                    d.as_ref(),
                ))
            }
            Kind::Coproduct(q) => {
                let a = self.eval(&self.single, lhs, env, aliases)?;
                let delta = self.pair.plain(self.group.bialgebra.coproduct_of(&a.num));
                let b = self.eval(&self.pair, rhs, env, aliases)?;
                let quotient = match q {
                    None => None,
                    Some(name) => Some(
                        self.quotients
                            .get(name)
                            .ok_or_else(|| GoldenError::Eval(format!("unknown quotient {name}")))?
                            .as_slice(),
                    ),
                };
                let d = line
                    .differs_by
                    .as_ref()
                    .map(|e| self.eval(&self.pair, e, env, aliases))
                    .transpose()?;
                let x2 = self.x.on_tensor_power(ring, 2);
                base(self.compare(
                    &self.pair,
                    &self.projector,
                    &x2,
                    2,
                    &delta,
                    &b,
                    quotient,
                    d.as_ref(),
                ))
            }
            Kind::Coaction(name) => {
                let module = self
                    .modules
                    .get(name)
                    .ok_or_else(|| GoldenError::Eval(format!("unknown module {name}")))?;
                let a = self.eval(&module.single, lhs, env, aliases)?;
                let tau = module.coact(&a.num);
                let b = self.eval(&module.pair, rhs, env, aliases)?;
                let d = line
                    .differs_by
                    .as_ref()
                    .map(|e| self.eval(&module.pair, e, env, aliases))
                    .transpose()?;
                base(self.compare(
                    &module.pair,
                    &module.projector,
                    &module.pair_x,
                    1,
                    &tau,
                    &b,
                    None,
                    d.as_ref(),
                ))
            }
            Kind::Alias | Kind::Span(_) => unreachable!("handled by the caller"),
        })
    }
}

fn case_env<F: Scalar>(pairs: &[(&str, i64)]) -> Env {
    let mut env: Env = pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    env.insert("p".into(), F::characteristic() as i64);
    env
}

/// GL(m|n) with `x = e_ij`, `1 ≤ i ≤ m < j ≤ m+n`; quotients `R` and `S`.
pub fn gl_rank_one_suite<F: Scalar>(
    m: usize,
    n: usize,
    i: usize,
    j: usize,
) -> Result<GoldenSuite<F>, SupergroupError> {
    let group = Supergroup::gl(m, n)?;
    let xv = group.rank_one_element(i, j)?;
    let x = conjugation_derivation(&group, &xv)?;
    let order = group.preferred_order(i);
    let env = case_env::<F>(&[
        ("m", m as i64),
        ("n", n as i64),
        ("i", i as i64),
        ("j", j as i64),
        ("size", (m + n) as i64),
    ]);
    let tii = group
        .generator("t", &[i as i64, i as i64])
        .expect("index in range");
    let mut suite = GoldenSuite::new(group, x, &order, env)?;
    suite.add_quotient("R", &[]);
    suite.add_quotient("S", &[tii]);
    Ok(suite)
}

/// GL(n|n) with `x = Σ_k e_{k,n+k}`.
pub fn gl_max_rank_suite<F: Scalar>(n: usize) -> Result<GoldenSuite<F>, SupergroupError> {
    let group = Supergroup::gl(n, n)?;
    let xv = group.max_rank_element()?;
    let x = conjugation_derivation(&group, &xv)?;
    let order: Vec<usize> = (0..group.ring().nvars()).collect();
    let env = case_env::<F>(&[("n", n as i64), ("m", n as i64), ("size", 2 * n as i64)]);
    GoldenSuite::new(group, x, &order, env)
}

/// Q(n) with `x = e'_ij`; quotients `R` and `M`.
pub fn q_suite<F: Scalar>(n: usize, i: usize, j: usize) -> Result<GoldenSuite<F>, SupergroupError> {
    let group = Supergroup::q(n)?;
    let xv = group.rank_one_element(i, j)?;
    let x = conjugation_derivation(&group, &xv)?;
    let order = group.preferred_order(i);
    let env = case_env::<F>(&[
        ("n", n as i64),
        ("i", i as i64),
        ("j", j as i64),
        ("size", n as i64),
    ]);
    let sii = group
        .generator("s", &[i as i64, i as i64])
        .expect("index in range");
    let mut suite = GoldenSuite::new(group, x, &order, env)?;
    suite.add_quotient("R", &[]);
    suite.add_quotient("M", &[sii]);
    Ok(suite)
}

/// Which sign of `x` on the module makes the coaction intertwine `x`.
fn intertwining_sign<F: Scalar>(
    pair: &Evaluator<F>,
    coaction: &[Val<F>],
    module_images: &[Poly<F>],
    coord_x: &Derivation<F>,
) -> Option<F> {
    'sign: for sign in [F::one(), -F::one()] {
        let xm = Derivation::new(
            Parity::Odd,
            module_images.iter().map(|f| f.scale(sign)).collect(),
        );
        let total = concat_derivation(pair, &[&xm, coord_x]);
        for (g, tau) in coaction.iter().enumerate() {
            // coaction values carry denominators that are p-th powers, so x passes through them
            let lhs_num = {
                let xg = xm.image(g).expect("total");
                let mut acc = pair.plain(pair.combined.zero());
                for (mono, &c) in xg.terms() {
                    let mut term = pair.plain(pair.combined.constant(c));
                    for (h, &k) in mono.exponents().iter().enumerate() {
                        for _ in 0..k {
                            term = pair.mul(&term, &coaction[h]);
                        }
                    }
                    acc = pair.add(&acc, &term);
                }
                acc
            };
            let rhs = Val {
                num: total.apply(&pair.combined, &tau.num).ok()?,
                dens: tau.dens.clone(),
            };
            let dens: Vec<u32> = lhs_num
                .dens
                .iter()
                .zip(&rhs.dens)
                .map(|(a, b)| *a.max(b))
                .collect();
            if pair.over(&lhs_num, &dens) != pair.over(&rhs, &dens) {
                continue 'sign;
            }
        }
        return Some(sign);
    }
    None
}

fn module_ring(size: usize, m: usize, letter: &str, shift: bool) -> Arc<Ring> {
    let names = (1..=size).map(|k| format!("{letter}{k}")).collect();
    let parity = (0..size)
        .map(|k| Parity::from_bit(u64::from(k >= m) ^ u64::from(shift)))
        .collect();
    Ring::new(names, parity)
}

/// Adds the modules `PiW` (`Sym(ΠW)`, generators `e[k]`) and `Wstar` (`Sym(W*)`, generators `f[k]`).
pub fn add_faithful_modules<F: Scalar>(
    suite: &mut GoldenSuite<F>,
    m: usize,
    n: usize,
    i: usize,
    j: usize,
) -> Result<(), SupergroupError> {
    let size = m + n;
    let p = F::characteristic();
    let cring = suite.group.ring().clone();
    let family = suite.group.family;
    let d = suite.group.localizing_element();
    let tii =
        cring.gen(family_generator(family, "t", &[i as i64, i as i64]).expect("index in range"));
    let s_raw = gl_antipode::<F>(&cring, m, n);
    let e = s_raw.iter().map(|l| l.power).max().unwrap_or(0);
    let target = round_up(e.max(1), p);
    let s_vals: Vec<Localized<F>> = s_raw
        .iter()
        .map(|l| Localized {
            num: cring.mul(&l.num, &cring.pow(&d, target - l.power)),
            power: target,
        })
        .collect();
    for (name, letter, shift) in [("PiW", "e", true), ("Wstar", "f", false)] {
        let mring = module_ring(size, m, letter, shift);
        let legs = vec![
            letter_leg(&mring, if shift { "e" } else { "f" }),
            coordinate_leg(family, &cring),
        ];
        let mut pair = Evaluator::new(legs, Vec::new(), None);
        pair.units = vec![pair.embed(&d, 1), pair.embed(&tii, 1)];
        pair.antipode = Some(AntipodeData {
            ring: cring.clone(),
            values: s_vals.clone(),
            unit_in_leg: vec![None, Some(0)],
        });
        let single = Evaluator::new(
            vec![letter_leg(&mring, if shift { "e" } else { "f" })],
            Vec::new(),
            None,
        );
        let var = |leg: usize, g: usize| pair.embed(&pair.legs[leg].ring.gen(g), leg);
        let par = |k: usize| u64::from(k >= m);
        let mut coaction = Vec::new();
        let mut images = Vec::new();
        for k in 0..size {
            if shift {
                // τ(e_k) = Σ_s e_s ⊗ t_sk
                let mut acc = pair.combined.zero();
                for s in 0..size {
                    acc = acc.add(&pair.combined.mul(&var(0, s), &var(1, s * size + k)));
                }
                coaction.push(pair.plain(acc));
                images.push(if k + 1 == j {
                    mring.gen(i - 1)
                } else {
                    mring.zero()
                });
            } else {
                // τ(f_l) = Σ_k (−1)^{|k|(|k|+|l|)} f_k ⊗ S(t_lk)
                let l = k;
                let mut acc = pair.plain(pair.combined.zero());
                for kk in 0..size {
                    let sign = if (par(kk) * (par(kk) + par(l))) % 2 == 1 {
                        -F::one()
                    } else {
                        F::one()
                    };
                    let sv = &s_vals[l * size + kk];
                    let mut term = pair.plain(
                        pair.combined
                            .mul(&var(0, kk), &pair.embed(&sv.num, 1))
                            .scale(sign),
                    );
                    term.dens[0] = sv.power;
                    acc = pair.add(&acc, &term);
                }
                coaction.push(acc);
                images.push(if l + 1 == i {
                    mring.gen(j - 1)
                } else {
                    mring.zero()
                });
            }
        }
        let sign = intertwining_sign(&pair, &coaction, &images, &suite.x).ok_or_else(|| {
            SupergroupError::BadShape(format!("no sign of x on {name} intertwines the coaction"))
        })?;
        let x = Derivation::new(Parity::Odd, images.iter().map(|f| f.scale(sign)).collect());
        let pair_x = concat_derivation(&pair, &[&x, &suite.x]);
        let mut order: Vec<usize> = (0..mring.nvars()).collect();
        order.extend(
            suite
                .group
                .preferred_order(i)
                .iter()
                .map(|g| g + mring.nvars()),
        );
        let projector = ClassProjector::new(&pair.combined, &pair_x, &order)?;
        suite.modules.insert(
            name.to_string(),
            ModuleSetup {
                ring: mring,
                x,
                single,
                pair,
                coaction,
                pair_x,
                projector,
            },
        );
    }
    Ok(())
}

pub fn faithful_suite<F: Scalar>(
    m: usize,
    n: usize,
    i: usize,
    j: usize,
) -> Result<GoldenSuite<F>, SupergroupError> {
    let mut suite = gl_rank_one_suite(m, n, i, j)?;
    add_faithful_modules(&mut suite, m, n, i, j)?;
    Ok(suite)
}

/// DS of one degree of a module's symmetric algebra.
#[derive(Clone, Debug, Serialize)]
pub struct SliceDs {
    pub module: String,
    pub degree: u32,
    pub dim: usize,
    pub ds: SuperDim,
    /// Count predicted by `Sym(M_x) ⊗ Sym(y^p) ⊗ Λ(y^{p−1}·x y)`.
    pub predicted: usize,
}

pub fn module_slice_ds<F: Scalar>(
    suite: &GoldenSuite<F>,
    max_degree: u32,
) -> Result<Vec<SliceDs>, SupergroupError> {
    let mut out = Vec::new();
    for (name, module) in &suite.modules {
        let proj = ClassProjector::new(
            &module.ring,
            &module.x,
            &(0..module.ring.nvars()).collect::<Vec<_>>(),
        )?;
        for t in 0..=max_degree {
            let (comp, map) = degree_slice_matrix(&module.ring, &module.x, t)?;
            let op = SquareZeroOddOperator::new(map.matrix, comp.parities(&module.ring))
                .map_err(|e| SupergroupError::BadShape(e.to_string()))?;
            let res = ds(&op);
            let predicted = predicted_count(&proj, t);
            out.push(SliceDs {
                module: name.clone(),
                degree: t,
                dim: comp.dim(),
                ds: res.sdim(),
                predicted,
            });
        }
    }
    Ok(out)
}

/// Number of cohomology monomials of old-ring degree `t`.
fn predicted_count<F: Scalar>(proj: &ClassProjector<F>, t: u32) -> usize {
    let p = F::characteristic();
    let h = &proj.h;
    let degs: Vec<u32> = (0..h.nvars())
        .map(|k| if k < proj.nvx() { 1 } else { p })
        .collect();
    let mut count = 0;
    let mut stack = vec![(0usize, 0u32)];
    while let Some((k, deg)) = stack.pop() {
        if k == h.nvars() {
            count += usize::from(deg == t);
            continue;
        }
        let cap = if h.parity(k).is_odd() { 1 } else { u32::MAX };
        let mut e = 0;
        while e <= cap && deg + e * degs[k] <= t {
            stack.push((k + 1, deg + e * degs[k]));
            e += 1;
        }
    }
    count
}

/// A fraction `num / ∏ units[u]^dens[u]` in a ring with designated units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fraction<F> {
    pub num: Poly<F>,
    pub dens: Vec<u32>,
}

/// Whether each target is a linear combination of products of at most `max_len` of `gens`
/// (the empty product included). Fractions are compared after scaling everything to a common
/// denominator.
pub fn generated_by_fractions<F: Scalar>(ring: &Ring, units: &[Poly<F>], gens: &[Fraction<F>], targets: &[Fraction<F>], max_len: usize) -> Vec<bool> {
    let nu = units.len();
    let mut products = vec![Fraction { num: ring.one(), dens: vec![0; nu] }];
    let mut layer: Vec<(usize, Fraction<F>)> = vec![(0, products[0].clone())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (start, f) in &layer {
            for (k, g) in gens.iter().enumerate().skip(*start) {
                let num = ring.mul(&f.num, &g.num);
                if !num.is_zero() {
                    next.push((k, Fraction { num, dens: f.dens.iter().zip(&g.dens).map(|(a, b)| a + b).collect() }));
                }
            }
        }
        products.extend(next.iter().map(|(_, f)| f.clone()));
        layer = next;
    }
    let common: Vec<u32> = (0..nu).map(|u| products.iter().chain(targets).map(|f| f.dens[u]).max().unwrap_or(0)).collect();
    let scale = |f: &Fraction<F>| {
        let mut out = f.num.clone();
        for u in 0..nu {
            out = ring.mul(&out, &ring.pow(&units[u], common[u] - f.dens[u]));
        }
        out
    };
    let mut index: BTreeMap<Vec<u16>, usize> = BTreeMap::new();
    let mut sparse = |f: &Poly<F>| -> Vec<(usize, F)> {
        let mut v: Vec<(usize, F)> = f
            .terms()
            .map(|(m, &c)| {
                let len = index.len();
                (*index.entry(m.exponents().to_vec()).or_insert(len), c)
            })
            .collect();
        v.sort_by_key(|&(k, _)| k);
        v
    };
    let mut ech = SparseEchelon::new();
    for f in &products {
        let v = sparse(&scale(f));
        ech.insert(&v, false);
    }
    targets.iter().map(|t| ech.reduce(&sparse(&scale(t))).is_empty()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GenerationReport {
    pub coefficients: Vec<String>,
    pub targets: Vec<String>,
    pub generated: Vec<bool>,
}

impl GenerationReport {
    pub fn all_generated(&self) -> bool {
        self.generated.iter().all(|&g| g)
    }
}

/// Coefficients of the coactions on the cohomology generators of every module, as fractions in
/// the cohomology of `Sym(M) ⊗ C`, split off the module part. Targets are the cohomology
/// generators coming from the coordinate ring together with the inverses of the units.
pub fn faithful_generation<F: Scalar>(suite: &GoldenSuite<F>, max_len: usize) -> Result<GenerationReport, SupergroupError> {
    let p = F::characteristic();
    let mut coefficients: Vec<Fraction<F>> = Vec::new();
    let mut shown = Vec::new();
    let mut frame: Option<(Arc<Ring>, Vec<Poly<F>>, Vec<usize>)> = None;
    for module in suite.modules.values() {
        let nm = module.ring.nvars();
        let own = ClassProjector::new(&module.ring, &module.x, &(0..nm).collect::<Vec<_>>())?;
        let proj = &module.projector;
        let h = &proj.h;
        let reps = proj.h_representatives();
        let module_var: Vec<bool> = reps.iter().map(|r| r.terms().all(|(m, _)| m.exponents()[nm..].iter().all(|&e| e == 0))).collect();
        let ev = &module.pair;
        let units: Vec<Poly<F>> = ev.units.iter().map(|u| proj.project(&ev.combined.pow(u, p), 1)).collect();
        if frame.is_none() {
            let targets = (0..h.nvars()).filter(|&k| !module_var[k]).collect();
            frame = Some((h.clone(), units.clone(), targets));
        }
        for rep in own.h_representatives() {
            let tau = module.coact(&rep);
            let dens: Vec<u32> = tau.dens.iter().map(|&d| round_up(d, p)).collect();
            let num = ev.over(&tau, &dens);
            if !module.pair_x.apply(&ev.combined, &num).map_err(crate::poly::PolyError::from)?.is_zero() {
                return Err(SupergroupError::NotACocycle(ev.combined.render(&num)));
            }
            let class = proj.project(&num, 1);
            let mut split: BTreeMap<Vec<u16>, Poly<F>> = BTreeMap::new();
            for (m, &c) in class.terms() {
                let e = m.exponents();
                let key: Vec<u16> = e.iter().enumerate().map(|(k, &x)| if module_var[k] { x } else { 0 }).collect();
                let rest: Vec<u16> = e.iter().enumerate().map(|(k, &x)| if module_var[k] { 0 } else { x }).collect();
                let entry = split.entry(key).or_insert_with(|| h.zero());
                entry.add_term(crate::poly::Monomial::from_exponents(rest), c);
            }
            for c in split.into_values() {
                let frac = Fraction { num: c.clone(), dens: dens.iter().map(|d| d / p).collect() };
                if coefficients.contains(&frac) {
                    continue;
                }
                shown.push(format!("{} / units^{:?}", h.render(&c), dens.iter().map(|d| d / p).collect::<Vec<_>>()));
                coefficients.push(frac);
            }
        }
    }
    let (h, units, target_vars) = frame.ok_or_else(|| SupergroupError::BadShape("no modules".into()))?;
    let mut targets: Vec<Fraction<F>> = target_vars.iter().map(|&k| Fraction { num: h.gen(k), dens: vec![0; units.len()] }).collect();
    let mut names: Vec<String> = target_vars.iter().map(|&k| h.name(k).to_string()).collect();
    for (u, unit) in units.iter().enumerate() {
        let mut dens = vec![0; units.len()];
        dens[u] = 1;
        targets.push(Fraction { num: h.one(), dens });
        names.push(format!("1/({})", h.render(unit)));
    }
    let generated = generated_by_fractions(&h, &units, &coefficients, &targets, max_len);
    Ok(GenerationReport { coefficients: shown, targets: names, generated })
}

/// Directory holding the golden files, overridable with `SUPERDS_GOLDEN_DIR`.
pub fn golden_dir() -> std::path::PathBuf {
    std::env::var_os("SUPERDS_GOLDEN_DIR").map_or_else(
        || std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("golden"),
        Into::into,
    )
}

pub fn load_golden(name: &str) -> Result<Vec<GoldenLine>, GoldenError> {
    let path = golden_dir().join(name);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| GoldenError::Eval(format!("{}: {e}", path.display())))?;
    crate::golden::parse_golden(&text)
}

/// One generator of the centralizer's coordinate ring, pushed through the generator map.
#[derive(Clone, Debug, Serialize)]
pub struct IntertwiningCheck {
    pub generator: String,
    pub image: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

/// Coordinate ring of the centralizer of `Σ e_{k,n+k}` in GL(n|n): matrices `[[A, B], [0, A]]`
/// with even coordinates `a[k,l]` and odd `b[k,l]`. Returns the ring and the coproducts.
pub fn max_rank_centralizer<F: Scalar>(n: usize) -> (Arc<Ring>, Vec<Poly<F>>) {
    let names = (0..2 * n * n)
        .map(|g| {
            format!(
                "{}{}{}",
                if g < n * n { 'a' } else { 'b' },
                (g % (n * n)) / n + 1,
                g % n + 1
            )
        })
        .collect();
    let parity = (0..2 * n * n)
        .map(|g| if g < n * n { Parity::Even } else { Parity::Odd })
        .collect();
    let ring = Ring::new(names, parity);
    let two = ring.tensor_power(2);
    let v = |g: usize, leg: usize| ring.embed(&ring.gen::<F>(g), leg, 2);
    let (a, b) = (
        |k: usize, l: usize| k * n + l,
        |k: usize, l: usize| n * n + k * n + l,
    );
    let mut cop = Vec::new();
    for k in 0..n {
        for l in 0..n {
            let mut acc = Poly::zero(two.nvars());
            for s in 0..n {
                acc = acc.add(&two.mul(&v(a(k, s), 0), &v(a(s, l), 1)));
            }
            cop.push(acc);
        }
    }
    for k in 0..n {
        for l in 0..n {
            let mut acc = Poly::zero(two.nvars());
            for s in 0..n {
                acc = acc.add(&two.mul(&v(a(k, s), 0), &v(b(s, l), 1)));
                acc = acc.add(&two.mul(&v(b(k, s), 0), &v(a(s, l), 1)));
            }
            cop.push(acc);
        }
    }
    (ring, cop)
}

/// Checks that `a[k,l] ↦ t_kl^p`, `b[k,l] ↦ t_kl^{p−1} t_{k+n,l}` sends generators to distinct
/// cohomology generators and intertwines the coproducts.
pub fn gl_max_rank_intertwining<F: Scalar>(
    suite: &GoldenSuite<F>,
    n: usize,
) -> Result<Vec<IntertwiningCheck>, SupergroupError> {
    let ring = suite.group.ring();
    let p = F::characteristic();
    let t = |k: usize, l: usize| {
        ring.gen::<F>(
            family_generator(suite.group.family, "t", &[k as i64, l as i64])
                .expect("index in range"),
        )
    };
    let mut images = Vec::new();
    for k in 1..=n {
        for l in 1..=n {
            images.push(ring.pow(&t(k, l), p));
        }
    }
    for k in 1..=n {
        for l in 1..=n {
            images.push(ring.mul(&ring.pow(&t(k, l), p - 1), &t(k + n, l)));
        }
    }
    let (cent, cop) = max_rank_centralizer::<F>(n);
    let two = ring.tensor_power(2);
    let images2: Vec<Poly<F>> = (0..2)
        .flat_map(|leg| images.iter().map(move |f| ring.embed(f, leg, 2)))
        .collect();
    let proj = &suite.projector;
    let h = &proj.h;
    let mut hit = vec![false; h.nvars()];
    let mut out = Vec::new();
    for (g, img) in images.iter().enumerate() {
        let class = proj.project(img, 1);
        let single = class.terms().count() == 1
            && class.terms().all(|(m, _)| {
                let e = m.exponents();
                e.iter().sum::<u16>() == 1 && {
                    let k = e.iter().position(|&x| x == 1).expect("one variable");
                    !std::mem::replace(&mut hit[k], true)
                }
            });
        let computed = proj.project(&suite.group.bialgebra.coproduct_of(img), 2);
        let expected = proj.project(&cent.tensor_power(2).substitute(&cop[g], &images2, &two), 2);
        out.push(IntertwiningCheck {
            generator: cent.name(g).to_string(),
            image: h.render(&class),
            pass: single && expected == computed,
            expected: h.render_tensor(&expected, 2),
            computed: h.render_tensor(&computed, 2),
        });
    }
    Ok(out)
}
