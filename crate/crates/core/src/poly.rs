//! Free super-commutative polynomial algebras, super-derivations and bialgebra presentations.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{factorial_inverse, Fp, Scalar};
use crate::linalg::{GradedLinearMap, Matrix, Parity};
use crate::sparse::{SparseEchelon, SparseVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomials belong to rings with {0} and {1} generators")]
    RingMismatch(usize, usize),
    #[error("derivation is undefined on generator {0}")]
    UndefinedOnGenerator(String),
    #[error("divided power exponent {exp} is not below p = {p}")]
    ExponentTooLarge { exp: u32, p: u32 },
    #[error("derivation does not preserve degree on generator {0}")]
    NotDegreePreserving(String),
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("malformed presentation: {0}")]
    Malformed(String),
}

/// Exponent vector; odd generators have exponent at most 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(e: Vec<u16>) -> Self {
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Generator names and parities of a free super-commutative algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ring {
    names: Vec<String>,
    parity: Vec<Parity>,
}

impl Ring {
    pub fn new(names: Vec<String>, parity: Vec<Parity>) -> Arc<Self> {
        assert_eq!(names.len(), parity.len(), "one parity per generator");
        Arc::new(Ring { names, parity })
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.parity[i]
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parity
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn monomial_parity(&self, m: &Monomial) -> Parity {
        let odd: u32 =
            m.0.iter()
                .zip(&self.parity)
                .filter(|(_, p)| p.is_odd())
                .map(|(&e, _)| e as u32)
                .sum();
        Parity::from_bit(odd as u64)
    }

    /// Product of monomials with its Koszul sign, or `None` if an odd generator repeats.
    pub fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
        let mut swaps = 0u32;
        let mut odd_in_a_after = 0u32;
        // count pairs (odd g in a, odd h in b) with h < g
        for i in (0..a.0.len()).rev() {
            if self.parity[i].is_odd() {
                if a.0[i] > 0 && b.0[i] > 0 {
                    return None;
                }
                if b.0[i] > 0 {
                    swaps += odd_in_a_after;
                }
                if a.0[i] > 0 {
                    odd_in_a_after += 1;
                }
            }
        }
        let e = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
        Some((Monomial(e), swaps % 2 == 1))
    }

    /// `legs`-fold tensor power; generator `g` of leg `k` has index `k * n + g`.
    pub fn tensor_power(&self, legs: usize) -> Arc<Ring> {
        let mut names = Vec::new();
        let mut parity = Vec::new();
        for k in 0..legs {
            for (n, &p) in self.names.iter().zip(&self.parity) {
                names.push(format!("{n}#{k}"));
                parity.push(p);
            }
        }
        Ring::new(names, parity)
    }

    /// All monomials of total degree `d`, in ascending monomial order.
    pub fn monomials_of_degree(&self, d: u32) -> Vec<Monomial> {
        let n = self.nvars();
        let mut out = Vec::new();
        let mut cur = vec![0u16; n];
        fn rec(ring: &Ring, i: usize, left: u32, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
            if i == ring.nvars() {
                if left == 0 {
                    out.push(Monomial(cur.clone()));
                }
                return;
            }
            let max = if ring.parity[i].is_odd() {
                left.min(1)
            } else {
                left
            };
            for e in 0..=max {
                cur[i] = e as u16;
                rec(ring, i + 1, left - e, cur, out);
            }
            cur[i] = 0;
        }
        rec(self, 0, d, &mut cur, &mut out);
        let _ = n;
        out.sort();
        out
    }
}

/// Sparse polynomial: monomial -> nonzero coefficient.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly<F> {
    nvars: usize,
    terms: BTreeMap<Monomial, F>,
}

impl<F: Scalar> Poly<F> {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: F) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, F::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::term(Monomial::var(nvars, i), F::one())
    }

    pub fn term(m: Monomial, c: F) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &F)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> F {
        self.terms.get(m).copied().unwrap_or_else(F::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: F) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.nvars(), self.nvars);
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Poly<F>, c: F) {
        if c.is_zero() {
            return;
        }
        for (m, &v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn scale(&self, c: F) -> Self {
        let mut out = Poly::zero(self.nvars);
        out.add_scaled(self, c);
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(-F::one())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, F::one());
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, -F::one());
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::RingMismatch(self.nvars, other.nvars));
        }
        Ok(self.add(other))
    }

    /// Constant term if the polynomial is a scalar.
    pub fn as_constant(&self) -> Option<F> {
        match self.terms.len() {
            0 => Some(F::zero()),
            1 => {
                let (m, &c) = self.terms.iter().next().unwrap();
                m.is_one().then_some(c)
            }
            _ => None,
        }
    }

    pub fn constant_term(&self) -> F {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// Common total degree of all terms, if homogeneous (zero counts as any degree).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.degree());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Component of total degree `d`.
    pub fn degree_part(&self, d: u32) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, &c)| (m.clone(), c))
                .collect(),
        }
    }

    pub fn map_coeffs<G: Scalar>(&self, f: impl Fn(F) -> G) -> Poly<G> {
        let mut out = Poly::zero(self.nvars);
        for (m, &c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Rename variables: variable `i` goes to index `map[i]` in a ring with `nvars` generators.
    /// Only valid when the relative order of odd variables is preserved.
    pub fn relabel(&self, nvars: usize, map: &[usize]) -> Self {
        let mut out = Poly::zero(nvars);
        for (m, &c) in &self.terms {
            let mut e = vec![0u16; nvars];
            for (i, &x) in m.0.iter().enumerate() {
                e[map[i]] += x;
            }
            out.add_term(Monomial(e), c);
        }
        out
    }
}

impl<F: fmt::Debug> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| format!("{c:?}*{m:?}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Arithmetic in a fixed ring.
impl Ring {
    pub fn zero<F: Scalar>(&self) -> Poly<F> {
        Poly::zero(self.nvars())
    }

    pub fn one<F: Scalar>(&self) -> Poly<F> {
        Poly::one(self.nvars())
    }

    pub fn constant<F: Scalar>(&self, c: F) -> Poly<F> {
        Poly::constant(self.nvars(), c)
    }

    pub fn gen<F: Scalar>(&self, i: usize) -> Poly<F> {
        Poly::var(self.nvars(), i)
    }

    pub fn gen_named<F: Scalar>(&self, name: &str) -> Result<Poly<F>, PolyError> {
        self.index_of(name)
            .map(|i| self.gen(i))
            .ok_or_else(|| PolyError::UnknownGenerator(name.into()))
    }

    pub fn try_mul<F: Scalar>(&self, a: &Poly<F>, b: &Poly<F>) -> Result<Poly<F>, PolyError> {
        if a.nvars != self.nvars() || b.nvars != self.nvars() {
            let bad = if a.nvars != self.nvars() {
                a.nvars
            } else {
                b.nvars
            };
            return Err(PolyError::RingMismatch(self.nvars(), bad));
        }
        Ok(self.mul(a, b))
    }

    pub fn mul<F: Scalar>(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        let mut out = Poly::zero(self.nvars());
        for (ma, &ca) in &a.terms {
            for (mb, &cb) in &b.terms {
                if let Some((m, neg)) = self.mul_monomials(ma, mb) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }

    pub fn mul_all<'a, F: Scalar + 'a>(
        &self,
        fs: impl IntoIterator<Item = &'a Poly<F>>,
    ) -> Poly<F> {
        fs.into_iter().fold(self.one(), |acc, f| self.mul(&acc, f))
    }

    pub fn pow<F: Scalar>(&self, a: &Poly<F>, e: u32) -> Poly<F> {
        let mut result = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    /// Parity of a homogeneous polynomial (zero is even).
    pub fn parity_of<F: Scalar>(&self, f: &Poly<F>) -> Option<Parity> {
        let mut it = f.terms.keys().map(|m| self.monomial_parity(m));
        let first = it.next().unwrap_or(Parity::Even);
        it.all(|p| p == first).then_some(first)
    }

    /// The ring homomorphism sending generator `i` to `images[i]` (all in ring `target`).
    pub fn substitute<F: Scalar>(&self, f: &Poly<F>, images: &[Poly<F>], target: &Ring) -> Poly<F> {
        assert_eq!(images.len(), self.nvars(), "one image per generator");
        let mut cache: HashMap<(usize, u16), Poly<F>> = HashMap::new();
        let mut out = target.zero();
        for (m, &c) in &f.terms {
            let mut acc = target.constant(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = cache
                    .entry((i, e))
                    .or_insert_with(|| target.pow(&images[i], e as u32));
                acc = target.mul(&acc, pw);
                if acc.is_zero() {
                    break;
                }
            }
            out.add_scaled(&acc, F::one());
        }
        out
    }

    /// Embed `f` into leg `leg` of `tensor_power(legs)`.
    pub fn embed<F: Scalar>(&self, f: &Poly<F>, leg: usize, legs: usize) -> Poly<F> {
        let n = self.nvars();
        let map: Vec<usize> = (0..n).map(|i| leg * n + i).collect();
        f.relabel(n * legs, &map)
    }

    /// `a ⊗ b` in the tensor square.
    pub fn tensor<F: Scalar>(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        let sq = self.tensor_power(2);
        sq.mul(&self.embed(a, 0, 2), &self.embed(b, 1, 2))
    }

    /// Split a monomial of `tensor_power(legs)` into its leg monomials (in order).
    pub fn split_monomial(&self, m: &Monomial, legs: usize) -> Vec<Monomial> {
        let n = self.nvars();
        (0..legs)
            .map(|k| Monomial(m.0[k * n..(k + 1) * n].to_vec()))
            .collect()
    }

    /// Render with generator names; tensor powers are written leg by leg with `⊗`.
    pub fn render<F: Scalar>(&self, f: &Poly<F>) -> String {
        render_with(f, |m| self.render_monomial(m))
    }

    pub fn render_monomial(&self, m: &Monomial) -> String {
        let parts: Vec<String> =
            m.0.iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.names[i].clone()
                    } else {
                        format!("{}^{}", self.names[i], e)
                    }
                })
                .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn render_tensor<F: Scalar>(&self, f: &Poly<F>, legs: usize) -> String {
        render_with(f, |m| {
            self.split_monomial(m, legs)
                .iter()
                .map(|x| self.render_monomial(x))
                .collect::<Vec<_>>()
                .join(" ⊗ ")
        })
    }
}

fn render_with<F: Scalar>(f: &Poly<F>, mono: impl Fn(&Monomial) -> String) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let parts: Vec<String> = f
        .terms
        .iter()
        .rev()
        .map(|(m, c)| {
            let body = mono(m);
            if *c == F::one() {
                body
            } else if body == "1" {
                format!("{c}")
            } else {
                format!("{c}*{body}")
            }
        })
        .collect();
    parts.join(" + ")
}

/// Divided power monomial `∏ y_i^{(k_i)} = ∏ y_i^{k_i} / k_i!`, all `k_i < p`.
pub fn divided_power_monomial<const P: u32>(
    ring: &Ring,
    exps: &[u32],
) -> Result<Poly<Fp<P>>, PolyError> {
    let mut coeff = Fp::<P>::new(1);
    let mut e = vec![0u16; ring.nvars()];
    for (i, &k) in exps.iter().enumerate() {
        if k >= P {
            return Err(PolyError::ExponentTooLarge { exp: k, p: P });
        }
        coeff *= factorial_inverse::<Fp<P>>(k).expect("k < p");
        e[i] = k as u16;
    }
    Ok(Poly::term(Monomial(e), coeff))
}

/// Homogeneous super-derivation given by its values on generators.
#[derive(Clone, Debug)]
pub struct Derivation<F> {
    pub parity: Parity,
    pub images: Vec<Option<Poly<F>>>,
}

impl<F: Scalar> Derivation<F> {
    pub fn new(parity: Parity, images: Vec<Poly<F>>) -> Self {
        Derivation {
            parity,
            images: images.into_iter().map(Some).collect(),
        }
    }

    pub fn partial(parity: Parity, images: Vec<Option<Poly<F>>>) -> Self {
        Derivation { parity, images }
    }

    pub fn image(&self, i: usize) -> Option<&Poly<F>> {
        self.images.get(i).and_then(|x| x.as_ref())
    }

    /// Super-Leibniz extension to `f`.
    pub fn apply(&self, ring: &Ring, f: &Poly<F>) -> Result<Poly<F>, PolyError> {
        let mut out = ring.zero();
        for (m, &c) in f.terms() {
            let t = self.apply_monomial(ring, m)?;
            out.add_scaled(&t, c);
        }
        Ok(out)
    }

    pub fn apply_monomial(&self, ring: &Ring, m: &Monomial) -> Result<Poly<F>, PolyError> {
        let n = ring.nvars();
        let mut out = ring.zero();
        let mut prefix_odd = false;
        for i in 0..n {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let xi = self
                .image(i)
                .ok_or_else(|| PolyError::UndefinedOnGenerator(ring.name(i).into()))?;
            if !xi.is_zero() {
                let mut pre = m.0.clone();
                for v in pre[i..].iter_mut() {
                    *v = 0;
                }
                let mut post = m.0.clone();
                for v in post[..i].iter_mut() {
                    *v = 0;
                }
                post[i] -= 1;
                let term = ring.mul(
                    &ring.mul(&Poly::term(Monomial(pre), F::one()), xi),
                    &Poly::term(Monomial(post), F::one()),
                );
                let mut c = F::from_int(e as i64);
                if self.parity.is_odd() && prefix_odd {
                    c = -c;
                }
                out.add_scaled(&term, c);
            }
            if ring.parity(i).is_odd() && e % 2 == 1 {
                prefix_odd = !prefix_odd;
            }
        }
        Ok(out)
    }

    /// `x ⊗ 1 + σ ⊗ x` on the `legs`-fold tensor power, as a derivation there.
    pub fn on_tensor_power(&self, ring: &Ring, legs: usize) -> Derivation<F> {
        let mut images = Vec::new();
        for k in 0..legs {
            for i in 0..ring.nvars() {
                images.push(self.image(i).map(|p| ring.embed(p, k, legs)));
            }
        }
        Derivation {
            parity: self.parity,
            images,
        }
    }

    fn check_degree_preserving(&self, ring: &Ring) -> Result<(), PolyError> {
        for i in 0..ring.nvars() {
            let img = self
                .image(i)
                .ok_or_else(|| PolyError::UndefinedOnGenerator(ring.name(i).into()))?;
            if !img.is_zero() && img.homogeneous_degree() != Some(1) {
                return Err(PolyError::NotDegreePreserving(ring.name(i).into()));
            }
        }
        Ok(())
    }
}

/// Monomial basis of one degree slice with a lookup table.
#[derive(Clone, Debug)]
pub struct GradedComponent {
    pub degree: u32,
    pub basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl GradedComponent {
    pub fn new(ring: &Ring, degree: u32) -> Self {
        let basis = ring.monomials_of_degree(degree);
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        GradedComponent {
            degree,
            basis,
            index,
        }
    }

    /// Component with an explicit monomial basis, such as a bidegree slice of a tensor square.
    pub fn from_basis(degree: u32, basis: Vec<Monomial>) -> Self {
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        GradedComponent {
            degree,
            basis,
            index,
        }
    }

    /// Monomials of `ring^{⊗degrees.len()}` with the given degree in each leg.
    pub fn multidegree(ring: &Ring, degrees: &[u32]) -> Self {
        let mut basis = vec![Vec::new()];
        for &d in degrees {
            let leg = ring.monomials_of_degree(d);
            basis = basis
                .iter()
                .flat_map(|pre: &Vec<u16>| {
                    leg.iter()
                        .map(move |m| [pre.as_slice(), m.exponents()].concat())
                })
                .collect();
        }
        GradedComponent::from_basis(
            degrees.iter().sum(),
            basis.into_iter().map(Monomial).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn to_sparse<F: Scalar>(&self, f: &Poly<F>) -> Result<SparseVec<F>, PolyError> {
        let mut v: SparseVec<F> = f
            .terms()
            .map(|(m, &c)| {
                self.index_of(m)
                    .map(|i| (i, c))
                    .ok_or(PolyError::NotHomogeneous)
            })
            .collect::<Result<_, _>>()?;
        v.sort_by_key(|&(i, _)| i);
        Ok(v)
    }

    pub fn from_sparse<F: Scalar>(&self, nvars: usize, v: &[(usize, F)]) -> Poly<F> {
        let mut out = Poly::zero(nvars);
        for &(i, c) in v {
            out.add_term(self.basis[i].clone(), c);
        }
        out
    }

    pub fn parities(&self, ring: &Ring) -> Vec<Parity> {
        self.basis.iter().map(|m| ring.monomial_parity(m)).collect()
    }
}

/// Sparse images of the slice basis under `x`, as vectors in the same slice.
pub fn slice_images<F: Scalar>(
    ring: &Ring,
    x: &Derivation<F>,
    comp: &GradedComponent,
) -> Result<Vec<SparseVec<F>>, PolyError> {
    x.check_degree_preserving(ring)?;
    comp.basis
        .iter()
        .map(|m| comp.to_sparse(&x.apply_monomial(ring, m)?))
        .collect()
}

/// Matrix of a degree-preserving odd derivation on the degree-`d` slice.
pub fn degree_slice_matrix<F: Scalar>(
    ring: &Ring,
    x: &Derivation<F>,
    d: u32,
) -> Result<(GradedComponent, GradedLinearMap<F>), PolyError> {
    let comp = GradedComponent::new(ring, d);
    let images = slice_images(ring, x, &comp)?;
    let n = comp.dim();
    let mut m = Matrix::zeros(n, n);
    for (c, img) in images.iter().enumerate() {
        for &(r, v) in img {
            m[(r, c)] = v;
        }
    }
    let par = comp.parities(ring);
    let map = GradedLinearMap::new(m, par.clone(), par, x.parity)
        .map_err(|e| PolyError::Malformed(e.to_string()))?;
    Ok((comp, map))
}

/// Echelon form of `Im(x)` inside one degree slice.
#[derive(Clone, Debug)]
pub struct ImageReducer<F> {
    pub component: GradedComponent,
    pub echelon: SparseEchelon<F>,
    nvars: usize,
}

impl<F: Scalar> ImageReducer<F> {
    pub fn new(ring: &Ring, x: &Derivation<F>, d: u32) -> Result<Self, PolyError> {
        Self::on_component(ring, x, GradedComponent::new(ring, d))
    }

    /// Image of `x` restricted to a component that `x` preserves.
    pub fn on_component(
        ring: &Ring,
        x: &Derivation<F>,
        component: GradedComponent,
    ) -> Result<Self, PolyError> {
        let images = slice_images(ring, x, &component)?;
        let mut echelon = SparseEchelon::new();
        echelon.extend(&images, false);
        Ok(ImageReducer {
            component,
            echelon,
            nvars: ring.nvars(),
        })
    }

    pub fn reduce(&self, f: &Poly<F>) -> Result<Poly<F>, PolyError> {
        if f.is_zero() {
            return Ok(f.clone());
        }
        let v = self.component.to_sparse(f)?;
        Ok(self
            .component
            .from_sparse(self.nvars, &self.echelon.reduce(&v)))
    }
}

/// Canonical representative of `f` modulo `Im(x)` in degree `d`.
pub fn reduce_mod_image<F: Scalar>(
    ring: &Ring,
    f: &Poly<F>,
    x: &Derivation<F>,
    d: u32,
) -> Result<Poly<F>, PolyError> {
    ImageReducer::new(ring, x, d)?.reduce(f)
}

/// Fraction `num / d^power` for the presentation's designated denominator `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Localized<F> {
    pub num: Poly<F>,
    pub power: u32,
}

/// Generators, coproduct and counit (and optionally antipode) of a super-bialgebra.
#[derive(Clone, Debug)]
pub struct BialgebraPresentation<F> {
    pub ring: Arc<Ring>,
    /// `Δ(g)` in `ring.tensor_power(2)`.
    pub coproduct: Vec<Poly<F>>,
    pub counit: Vec<F>,
    /// `S(g) = num / d^power` with `d = denominator`.
    pub antipode: Option<Vec<Localized<F>>>,
    /// The element inverted in the Hopf algebra; it need not be group-like itself.
    pub denominator: Option<Poly<F>>,
    pub group_likes: Vec<Poly<F>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawFailure {
    pub law: String,
    pub generator: String,
}

impl<F: Scalar> BialgebraPresentation<F> {
    pub fn coproduct_of(&self, f: &Poly<F>) -> Poly<F> {
        let sq = self.ring.tensor_power(2);
        self.ring.substitute(f, &self.coproduct, &sq)
    }

    pub fn counit_of(&self, f: &Poly<F>) -> F {
        let zero = Ring::new(Vec::new(), Vec::new());
        let images: Vec<Poly<F>> = self.counit.iter().map(|&c| Poly::constant(0, c)).collect();
        self.ring.substitute(f, &images, &zero).constant_term()
    }

    fn check_counit(&self, i: usize) -> bool {
        let n = self.ring.nvars();
        let sq = self.ring.tensor_power(2);
        let left: Vec<Poly<F>> = (0..2 * n)
            .map(|k| {
                if k < n {
                    Poly::constant(n, self.counit[k])
                } else {
                    Poly::var(n, k - n)
                }
            })
            .collect();
        let right: Vec<Poly<F>> = (0..2 * n)
            .map(|k| {
                if k < n {
                    Poly::var(n, k)
                } else {
                    Poly::constant(n, self.counit[k - n])
                }
            })
            .collect();
        let g = self.ring.gen(i);
        let base = Ring::new(self.ring.names().to_vec(), self.ring.parities().to_vec());
        sq.substitute(&self.coproduct[i], &left, &base) == g
            && sq.substitute(&self.coproduct[i], &right, &base) == g
    }

    fn check_coassociative(&self, i: usize) -> bool {
        let n = self.ring.nvars();
        let sq = self.ring.tensor_power(2);
        let tri = self.ring.tensor_power(3);
        let d01: Vec<Poly<F>> = self
            .coproduct
            .iter()
            .map(|c| c.relabel(3 * n, &(0..2 * n).collect::<Vec<_>>()))
            .collect();
        let d12: Vec<Poly<F>> = self
            .coproduct
            .iter()
            .map(|c| c.relabel(3 * n, &(n..3 * n).collect::<Vec<_>>()))
            .collect();
        let left_images: Vec<Poly<F>> = (0..2 * n)
            .map(|k| {
                if k < n {
                    d01[k].clone()
                } else {
                    Poly::var(3 * n, k + n)
                }
            })
            .collect();
        let right_images: Vec<Poly<F>> = (0..2 * n)
            .map(|k| {
                if k < n {
                    Poly::var(3 * n, k)
                } else {
                    d12[k - n].clone()
                }
            })
            .collect();
        sq.substitute(&self.coproduct[i], &left_images, &tri)
            == sq.substitute(&self.coproduct[i], &right_images, &tri)
    }

    /// `m ∘ (S ⊗ id) ∘ Δ = ε` and `m ∘ (id ⊗ S) ∘ Δ = ε` on generator `i`, cleared of denominators.
    fn check_antipode(&self, i: usize, s: &[Localized<F>]) -> bool {
        let ring = &self.ring;
        let one = ring.one();
        let d = self.denominator.as_ref().unwrap_or(&one);
        let mut ok = true;
        for side in 0..2 {
            let mut total = ring.zero();
            let mut max_e = 0;
            let mut parts = Vec::new();
            for (m, &c) in self.coproduct[i].terms() {
                let legs = ring.split_monomial(m, 2);
                let (sm, other) = if side == 0 {
                    (&legs[0], &legs[1])
                } else {
                    (&legs[1], &legs[0])
                };
                let mut num = ring.one();
                let mut e = 0;
                for (g, &k) in sm.exponents().iter().enumerate() {
                    for _ in 0..k {
                        num = ring.mul(&num, &s[g].num);
                        e += s[g].power;
                    }
                }
                let o = Poly::term(other.clone(), c);
                let prod = if side == 0 {
                    ring.mul(&num, &o)
                } else {
                    ring.mul(&o, &num)
                };
                max_e = max_e.max(e);
                parts.push((prod, e));
            }
            for (prod, e) in parts {
                total.add_scaled(&ring.mul(&prod, &ring.pow(d, max_e - e)), F::one());
            }
            let rhs = ring.pow(d, max_e).scale(self.counit[i]);
            ok &= total == rhs;
        }
        ok
    }

    /// All bialgebra laws on generators; returns the failures.
    pub fn check_laws(&self) -> Vec<LawFailure> {
        let mut out = Vec::new();
        let fail = |law: &str, g: &str| LawFailure {
            law: law.into(),
            generator: g.into(),
        };
        for i in 0..self.ring.nvars() {
            let name = self.ring.name(i);
            if !self.check_counit(i) {
                out.push(fail("counit", name));
            }
            if !self.check_coassociative(i) {
                out.push(fail("coassociativity", name));
            }
            if let Some(s) = &self.antipode {
                if !self.check_antipode(i, s) {
                    out.push(fail("antipode", name));
                }
            }
        }
        for (k, g) in self.group_likes.iter().enumerate() {
            let sq = self.ring.tensor_power(2);
            let gg = sq.mul(&self.ring.embed(g, 0, 2), &self.ring.embed(g, 1, 2));
            if self.coproduct_of(g) != gg || self.counit_of(g) != F::one() {
                out.push(fail("group-like", &format!("group_likes[{k}]")));
            }
        }
        out
    }
}

/// JSON presentation: generators, coproduct as doubled-monomial coefficient lists, counit, antipode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationJson {
    pub p: u32,
    pub generators: Vec<GeneratorJson>,
    /// One entry per generator: list of `[coefficient, exponents of the doubled ring]`.
    pub coproduct: Vec<Vec<TermJson>>,
    pub counit: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antipode: Option<Vec<FractionJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub denominator: Option<Vec<TermJson>>,
    #[serde(default)]
    pub group_likes: Vec<Vec<TermJson>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub name: String,
    pub parity: Parity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: u64,
    pub exps: Vec<u16>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FractionJson {
    pub num: Vec<TermJson>,
    pub den_power: u32,
}

fn poly_to_json<const P: u32>(f: &Poly<Fp<P>>) -> Vec<TermJson> {
    f.terms()
        .map(|(m, c)| TermJson {
            coeff: c.value() as u64,
            exps: m.exponents().to_vec(),
        })
        .collect()
}

fn poly_from_json<const P: u32>(nvars: usize, ts: &[TermJson]) -> Result<Poly<Fp<P>>, PolyError> {
    let mut out = Poly::zero(nvars);
    for t in ts {
        if t.exps.len() != nvars {
            return Err(PolyError::RingMismatch(nvars, t.exps.len()));
        }
        out.add_term(Monomial(t.exps.clone()), Fp::new(t.coeff as i64));
    }
    Ok(out)
}

impl PresentationJson {
    pub fn from_presentation<const P: u32>(b: &BialgebraPresentation<Fp<P>>) -> Self {
        PresentationJson {
            p: P,
            generators: (0..b.ring.nvars())
                .map(|i| GeneratorJson {
                    name: b.ring.name(i).into(),
                    parity: b.ring.parity(i),
                })
                .collect(),
            coproduct: b.coproduct.iter().map(poly_to_json).collect(),
            counit: b.counit.iter().map(|c| c.value() as u64).collect(),
            antipode: b.antipode.as_ref().map(|s| {
                s.iter()
                    .map(|l| FractionJson {
                        num: poly_to_json(&l.num),
                        den_power: l.power,
                    })
                    .collect()
            }),
            denominator: b.denominator.as_ref().map(poly_to_json),
            group_likes: b.group_likes.iter().map(poly_to_json).collect(),
        }
    }

    pub fn presentation<const P: u32>(&self) -> Result<BialgebraPresentation<Fp<P>>, PolyError> {
        if self.p != P {
            return Err(PolyError::Malformed(format!(
                "presentation is over p = {}, expected {P}",
                self.p
            )));
        }
        let n = self.generators.len();
        if self.coproduct.len() != n || self.counit.len() != n {
            return Err(PolyError::Malformed(
                "need one coproduct and counit entry per generator".into(),
            ));
        }
        let ring = Ring::new(
            self.generators.iter().map(|g| g.name.clone()).collect(),
            self.generators.iter().map(|g| g.parity).collect(),
        );
        let coproduct = self
            .coproduct
            .iter()
            .map(|ts| poly_from_json::<P>(2 * n, ts))
            .collect::<Result<_, _>>()?;
        let antipode = match &self.antipode {
            None => None,
            Some(s) => Some(
                s.iter()
                    .map(|f| {
                        Ok(Localized {
                            num: poly_from_json::<P>(n, &f.num)?,
                            power: f.den_power,
                        })
                    })
                    .collect::<Result<Vec<_>, PolyError>>()?,
            ),
        };
        let group_likes: Vec<Poly<Fp<P>>> = self
            .group_likes
            .iter()
            .map(|ts| poly_from_json::<P>(n, ts))
            .collect::<Result<_, _>>()?;
        let denominator = self
            .denominator
            .as_ref()
            .map(|ts| poly_from_json::<P>(n, ts))
            .transpose()?;
        Ok(BialgebraPresentation {
            ring,
            coproduct,
            counit: self.counit.iter().map(|&c| Fp::new(c as i64)).collect(),
            antipode,
            denominator,
            group_likes,
        })
    }
}
