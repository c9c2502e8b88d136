//! Finite cochain complexes: Koszul strands, de Rham and p-restricted de Rham complexes.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::ds::{ds, SquareZeroOddOperator};
use crate::field::{factorial_inverse, Scalar};
use crate::linalg::{Matrix, Parity, Subspace};
use crate::poly::{slice_images, Derivation, GradedComponent, ImageReducer, Monomial, Poly, Ring};
use crate::sparse::{sparse_rank, SparseVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("differentials compose to a nonzero map at degree {0}")]
    NotAComplex(usize),
    #[error("differential {degree} has shape {rows}x{cols}, expected {exp_rows}x{exp_cols}")]
    Shape {
        degree: usize,
        rows: usize,
        cols: usize,
        exp_rows: usize,
        exp_cols: usize,
    },
    #[error("degree cutoff {cutoff} is below p = {p}; nothing to verify")]
    CutoffTooSmall { cutoff: usize, p: u32 },
    #[error("rational mode needs p > cutoff, got p = {p} and cutoff {cutoff}")]
    PrimeTooSmall { cutoff: usize, p: u32 },
}

/// Cochain complex `C^0 -> C^1 -> ... -> C^N` of finite-dimensional spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteComplex<F> {
    dims: Vec<usize>,
    diffs: Vec<Matrix<F>>,
}

impl<F: Scalar> FiniteComplex<F> {
    /// `diffs[q]` maps degree `q` to degree `q + 1`.
    pub fn new(dims: Vec<usize>, diffs: Vec<Matrix<F>>) -> Result<Self, ComplexError> {
        let k = FiniteComplex::unchecked(dims, diffs)?;
        match k.first_non_complex_degree() {
            Some(q) => Err(ComplexError::NotAComplex(q)),
            None => Ok(k),
        }
    }

    /// Shape-checked but not required to square to zero.
    pub fn unchecked(dims: Vec<usize>, diffs: Vec<Matrix<F>>) -> Result<Self, ComplexError> {
        let expected = dims.len().saturating_sub(1);
        let mut diffs = diffs;
        while diffs.len() < expected {
            let q = diffs.len();
            diffs.push(Matrix::zeros(dims[q + 1], dims[q]));
        }
        for (q, d) in diffs.iter().enumerate() {
            if d.rows() != dims[q + 1] || d.cols() != dims[q] {
                return Err(ComplexError::Shape {
                    degree: q,
                    rows: d.rows(),
                    cols: d.cols(),
                    exp_rows: dims[q + 1],
                    exp_cols: dims[q],
                });
            }
        }
        Ok(FiniteComplex { dims, diffs })
    }

    pub fn concentrated(dim: usize) -> Self {
        FiniteComplex {
            dims: vec![dim],
            diffs: Vec::new(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn differentials(&self) -> &[Matrix<F>] {
        &self.diffs
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn offsets(&self) -> Vec<usize> {
        let mut out = vec![0];
        for &d in &self.dims {
            out.push(out.last().unwrap() + d);
        }
        out
    }

    pub fn first_non_complex_degree(&self) -> Option<usize> {
        self.diffs
            .windows(2)
            .position(|w| !(&w[1] * &w[0]).is_zero())
    }

    fn rank_of(&self, q: usize) -> usize {
        self.diffs.get(q).map_or(0, |d| d.rank())
    }

    /// `dim H^q` for every degree.
    pub fn cohomology_dims(&self) -> Vec<usize> {
        (0..self.dims.len())
            .map(|q| {
                let incoming = if q == 0 { 0 } else { self.rank_of(q - 1) };
                self.dims[q] - self.rank_of(q) - incoming
            })
            .collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.cohomology_dims().iter().all(|&h| h == 0)
    }

    /// Echelon-complement representatives of `H^q`.
    pub fn cohomology_representatives(&self, q: usize) -> Vec<Vec<F>> {
        let n = self.dims[q];
        let z = match self.diffs.get(q) {
            Some(d) => Subspace::span(n, &d.kernel()),
            None => Subspace::full(n),
        };
        let b = if q == 0 {
            Subspace::zero(n)
        } else {
            Subspace::span(n, &self.diffs[q - 1].transpose().to_rows())
        };
        crate::linalg::quotient_with_section(&z, &b)
            .expect("coboundaries are cocycles")
            .representatives()
            .to_vec()
    }

    /// Koszul-signed tensor product, degree-`q` basis ordered by `(a, b)` with `a + b = q`.
    pub fn tensor(&self, other: &FiniteComplex<F>) -> FiniteComplex<F> {
        let top = self.dims.len() + other.dims.len() - 1;
        let pairs: Vec<Vec<(usize, usize)>> = (0..top)
            .map(|q| {
                (0..self.dims.len())
                    .filter(|&a| q >= a && q - a < other.dims.len())
                    .map(|a| (a, q - a))
                    .collect()
            })
            .collect();
        let offset = |q: usize, a: usize| -> usize {
            pairs[q]
                .iter()
                .take_while(|&&(a2, _)| a2 < a)
                .map(|&(a2, b2)| self.dims[a2] * other.dims[b2])
                .sum()
        };
        let dims: Vec<usize> = pairs
            .iter()
            .map(|ps| ps.iter().map(|&(a, b)| self.dims[a] * other.dims[b]).sum())
            .collect();
        let mut diffs = Vec::new();
        for q in 0..top.saturating_sub(1) {
            let mut m = Matrix::zeros(dims[q + 1], dims[q]);
            for &(a, b) in &pairs[q] {
                let src = offset(q, a);
                let (da, db) = (self.dims[a], other.dims[b]);
                if let Some(dk) = self.diffs.get(a) {
                    let tgt = offset(q + 1, a + 1);
                    for i in 0..da {
                        for j in 0..db {
                            for i2 in 0..dk.rows() {
                                let c = dk[(i2, i)];
                                if !c.is_zero() {
                                    m[(tgt + i2 * db + j, src + i * db + j)] += c;
                                }
                            }
                        }
                    }
                }
                if let Some(dl) = other.diffs.get(b) {
                    let tgt = offset(q + 1, a);
                    let sign = if a % 2 == 0 { F::one() } else { -F::one() };
                    for i in 0..da {
                        for j in 0..db {
                            for j2 in 0..dl.rows() {
                                let c = dl[(j2, j)];
                                if !c.is_zero() {
                                    m[(tgt + i * dl.rows() + j2, src + i * db + j)] += sign * c;
                                }
                            }
                        }
                    }
                }
            }
            diffs.push(m);
        }
        FiniteComplex { dims, diffs }
    }
}

/// Direct sum of independent complexes, e.g. the multidegree blocks of a monomial complex.
#[derive(Clone, Debug)]
pub struct BlockComplex<F> {
    pub blocks: Vec<(Vec<u32>, FiniteComplex<F>)>,
    pub top_degree: usize,
}

impl<F: Scalar> BlockComplex<F> {
    fn pad(&self, v: &[usize]) -> Vec<usize> {
        let mut out = vec![0; self.top_degree + 1];
        for (q, &d) in v.iter().enumerate() {
            out[q] += d;
        }
        out
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .fold(vec![0; self.top_degree + 1], |acc, (_, k)| {
                acc.iter()
                    .zip(self.pad(k.dims()))
                    .map(|(a, b)| a + b)
                    .collect()
            })
    }

    pub fn total_dim(&self) -> usize {
        self.dims().iter().sum()
    }

    pub fn cohomology_dims(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .fold(vec![0; self.top_degree + 1], |acc, (_, k)| {
                acc.iter()
                    .zip(self.pad(&k.cohomology_dims()))
                    .map(|(a, b)| a + b)
                    .collect()
            })
    }

    pub fn is_complex(&self) -> bool {
        self.blocks
            .iter()
            .all(|(_, k)| k.first_non_complex_degree().is_none())
    }

    /// Assemble into one complex (block-diagonal differentials).
    pub fn to_complex(&self) -> FiniteComplex<F> {
        let dims = self.dims();
        let mut diffs: Vec<Matrix<F>> = (0..self.top_degree)
            .map(|q| Matrix::zeros(dims[q + 1], dims[q]))
            .collect();
        let mut offs = vec![0usize; self.top_degree + 1];
        for (_, k) in &self.blocks {
            let kd = self.pad(k.dims());
            for (q, d) in k.differentials().iter().enumerate() {
                for r in 0..d.rows() {
                    for c in 0..d.cols() {
                        diffs[q][(offs[q + 1] + r, offs[q] + c)] = d[(r, c)];
                    }
                }
            }
            for q in 0..=self.top_degree {
                offs[q] += kd[q];
            }
        }
        FiniteComplex { dims, diffs }
    }
}

/// Complex spanned by monomials of a super-polynomial ring, graded by `degree_of`, with differential `x`.
pub fn monomial_complex<F: Scalar>(
    ring: &Ring,
    x: &Derivation<F>,
    pieces: &[Vec<Monomial>],
) -> FiniteComplex<F> {
    let index: Vec<HashMap<&Monomial, usize>> = pieces
        .iter()
        .map(|p| p.iter().enumerate().map(|(i, m)| (m, i)).collect())
        .collect();
    let dims: Vec<usize> = pieces.iter().map(|p| p.len()).collect();
    let mut diffs = Vec::new();
    for q in 0..pieces.len().saturating_sub(1) {
        let mut m = Matrix::zeros(dims[q + 1], dims[q]);
        for (c, mono) in pieces[q].iter().enumerate() {
            let img = x
                .apply_monomial(ring, mono)
                .expect("derivation defined on all generators");
            for (tm, &v) in img.terms() {
                let r = *index[q + 1]
                    .get(tm)
                    .expect("differential image lies in the next piece");
                m[(r, c)] = v;
            }
        }
        diffs.push(m);
    }
    FiniteComplex { dims, diffs }
}

/// Ring `k[y_1..y_s, dy_1..dy_s]` with `y` even, `dy` odd, and `x(y_i) = dy_i`.
pub fn de_rham_ring<F: Scalar>(s: usize) -> (Arc<Ring>, Derivation<F>) {
    let names = (1..=s)
        .map(|i| format!("y{i}"))
        .chain((1..=s).map(|i| format!("dy{i}")))
        .collect();
    let parity = std::iter::repeat(Parity::Even)
        .take(s)
        .chain(std::iter::repeat(Parity::Odd).take(s))
        .collect();
    let ring = Ring::new(names, parity);
    let images = (0..2 * s)
        .map(|g| if g < s { ring.gen(s + g) } else { ring.zero() })
        .collect();
    (ring, Derivation::new(Parity::Odd, images))
}

/// Ring `k[u_1..u_t, w_1..w_t]` with `u` odd, `w` even, and `x(u_i) = w_i`.
pub fn koszul_ring<F: Scalar>(t: usize) -> (Arc<Ring>, Derivation<F>) {
    let names = (1..=t)
        .map(|i| format!("u{i}"))
        .chain((1..=t).map(|i| format!("w{i}")))
        .collect();
    let parity = std::iter::repeat(Parity::Odd)
        .take(t)
        .chain(std::iter::repeat(Parity::Even).take(t))
        .collect();
    let ring = Ring::new(names, parity);
    let images = (0..2 * t)
        .map(|g| if g < t { ring.gen(t + g) } else { ring.zero() })
        .collect();
    (ring, Derivation::new(Parity::Odd, images))
}

/// Total-degree-`d` strand of `Sym(w) ⊗ Λ(u)`, graded by the number of `w` factors.
pub fn koszul_strand<F: Scalar>(t: usize, d: u32) -> FiniteComplex<F> {
    let (ring, x) = koszul_ring::<F>(t);
    let all = ring.monomials_of_degree(d);
    let pieces: Vec<Vec<Monomial>> = (0..=d)
        .map(|s| {
            all.iter()
                .filter(|m| m.exponents()[t..].iter().map(|&e| e as u32).sum::<u32>() == s)
                .cloned()
                .collect()
        })
        .collect();
    monomial_complex(&ring, &x, &pieces)
}

fn de_rham_block<F: Scalar>(
    ring: &Ring,
    x: &Derivation<F>,
    s: usize,
    multideg: &[u32],
    restricted_below: Option<u32>,
) -> FiniteComplex<F> {
    // y_i^{a_i} or y_i^{a_i - 1} dy_i for each i
    let mut pieces: Vec<Vec<Monomial>> = vec![Vec::new(); s + 1];
    for mask in 0u32..(1 << s) {
        let mut e = vec![0u16; 2 * s];
        let mut ok = true;
        for i in 0..s {
            let with_d = mask >> i & 1 == 1;
            if with_d && multideg[i] == 0 {
                ok = false;
                break;
            }
            let k = multideg[i] - with_d as u32;
            if restricted_below.is_some_and(|p| k >= p) {
                ok = false;
                break;
            }
            e[i] = k as u16;
            e[s + i] = with_d as u16;
        }
        if ok {
            pieces[mask.count_ones() as usize].push(Monomial::from_exponents(e));
        }
    }
    for piece in &mut pieces {
        piece.sort();
    }
    monomial_complex(ring, x, &pieces)
}

fn multidegrees(s: usize, bound: impl Fn(&[u32]) -> bool, max_each: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; s];
    loop {
        if bound(&cur) {
            out.push(cur.clone());
        }
        let mut i = 0;
        loop {
            if i == s {
                return out;
            }
            cur[i] += 1;
            if cur[i] <= max_each {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// `R_(p)(U_0) = Sym_(p)(y) ⊗ Λ(dy)` (exponents below `p`), split into multidegree blocks.
pub fn p_restricted_de_rham<F: Scalar>(s: usize) -> BlockComplex<F> {
    let p = F::characteristic();
    let (ring, x) = de_rham_ring::<F>(s);
    let blocks = multidegrees(s, |_| true, p).into_iter().map(|a| {
        let k = de_rham_block(&ring, &x, s, &a, Some(p));
        (a, k)
    });
    BlockComplex {
        blocks: blocks.filter(|(_, k)| k.total_dim() > 0).collect(),
        top_degree: s,
    }
}

/// The full de Rham complex `Sym(y) ⊗ Λ(dy)` in total polynomial degree `d` (y and dy of degree 1).
pub fn de_rham_strand<F: Scalar>(s: usize, d: u32) -> BlockComplex<F> {
    let (ring, x) = de_rham_ring::<F>(s);
    let blocks = multidegrees(s, |a| a.iter().sum::<u32>() == d, d)
        .into_iter()
        .map(|a| {
            let k = de_rham_block(&ring, &x, s, &a, None);
            (a, k)
        });
    BlockComplex {
        blocks: blocks.collect(),
        top_degree: s,
    }
}

/// `R'_(p)`: the p-restricted complex without the monomials `∏_{i∈I} y_i^{p-1} dy_i`.
pub fn r_prime_subcomplex<F: Scalar>(s: usize) -> BlockComplex<F> {
    let p = F::characteristic();
    let mut r = p_restricted_de_rham::<F>(s);
    r.blocks
        .retain(|(a, _)| !a.iter().all(|&ai| ai == 0 || ai == p));
    r
}

/// `∏_{i∈I} y_i^{(p-1)} dy_i` in the de Rham ring with `s` variables.
pub fn lambda_form<F: Scalar>(s: usize, subset: &[usize]) -> Poly<F> {
    let p = F::characteristic();
    let mut e = vec![0u16; 2 * s];
    for &i in subset {
        e[i] = (p - 1) as u16;
        e[s + i] = 1;
    }
    let c = factorial_inverse::<F>(p - 1)
        .expect("(p-1)! is a unit")
        .pow(subset.len() as u64);
    Poly::term(Monomial::from_exponents(e), c)
}

/// Cartier rule `y^k dy_I -> y^{pk} ∏_{i∈I} y_i^{(p-1)} dy_I` on a basis monomial of the de Rham ring.
pub fn cartier_image<F: Scalar>(s: usize, m: &Monomial) -> Poly<F> {
    let p = F::characteristic();
    let e = m.exponents();
    let mut out = vec![0u16; 2 * s];
    let mut count = 0;
    for i in 0..s {
        out[i] = e[i] * p as u16;
        if e[s + i] == 1 {
            out[i] += (p - 1) as u16;
            out[s + i] = 1;
            count += 1;
        }
    }
    let c = factorial_inverse::<F>(p - 1)
        .expect("(p-1)! is a unit")
        .pow(count);
    Poly::term(Monomial::from_exponents(out), c)
}

/// Classes of the divided-power forms `∏ y_i^{(p-1)} dy_i` in `H(R_(p))`, per form degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaClassReport {
    pub form_degree: usize,
    pub forms: usize,
    pub cocycles: bool,
    pub independent_rank: usize,
    pub cohomology_dim: usize,
}

fn subsets(s: usize, q: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << s))
        .filter(|m| m.count_ones() as usize == q)
        .map(|m| (0..s).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

/// Check that the divided-power forms are cocycles whose classes form a basis of `H(R_(p))`.
pub fn lambda_class_check<F: Scalar>(s: usize) -> Vec<LambdaClassReport> {
    let (ring, x) = de_rham_ring::<F>(s);
    let r = p_restricted_de_rham::<F>(s);
    let h = r.cohomology_dims();
    (0..=s)
        .map(|q| {
            let forms: Vec<Poly<F>> = subsets(s, q)
                .iter()
                .map(|i| lambda_form::<F>(s, i))
                .collect();
            let cocycles = forms
                .iter()
                .all(|f| x.apply(&ring, f).map(|g| g.is_zero()).unwrap_or(false));
            let independent_rank = independent_classes(&ring, &x, &forms);
            LambdaClassReport {
                form_degree: q,
                forms: forms.len(),
                cocycles,
                independent_rank,
                cohomology_dim: h[q],
            }
        })
        .collect()
}

/// Rank of the classes of homogeneous cocycles modulo the image of `x`, computed slice by slice.
pub fn independent_classes<F: Scalar>(
    ring: &Ring,
    x: &Derivation<F>,
    cocycles: &[Poly<F>],
) -> usize {
    let mut by_degree: BTreeMap<u32, Vec<&Poly<F>>> = BTreeMap::new();
    for f in cocycles.iter().filter(|f| !f.is_zero()) {
        by_degree
            .entry(f.homogeneous_degree().expect("homogeneous cocycle"))
            .or_default()
            .push(f);
    }
    by_degree
        .into_iter()
        .map(|(d, fs)| {
            let red = ImageReducer::new(ring, x, d).expect("degree-preserving derivation");
            let mut ech = red.echelon.clone();
            fs.iter()
                .filter(|f| {
                    ech.insert(&red.component.to_sparse(f).expect("homogeneous"), true)
                        .is_some()
                })
                .count()
        })
        .sum()
}

/// Cartier check on one de Rham strand of source degree `e`: images are cocycles, and their
/// classes are independent and exhaust `H` of the target strand of degree `p e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CartierReport {
    pub source_degree: u32,
    pub images: usize,
    pub all_cocycles: bool,
    pub independent_rank: usize,
    pub target_cohomology: usize,
    /// Classes coming from `dy_I` alone, by form degree.
    pub lambda_counts: Vec<usize>,
}

pub fn cartier_check<F: Scalar>(s: usize, e: u32) -> CartierReport {
    let p = F::characteristic();
    let (ring, x) = de_rham_ring::<F>(s);
    let sources = ring.monomials_of_degree(e);
    let images: Vec<Poly<F>> = sources.iter().map(|m| cartier_image::<F>(s, m)).collect();
    let all_cocycles = images
        .iter()
        .all(|f| x.apply(&ring, f).map(|g| g.is_zero()).unwrap_or(false));
    let independent_rank = independent_classes(&ring, &x, &images);
    let target_cohomology = de_rham_strand::<F>(s, p * e).cohomology_dims().iter().sum();
    let mut lambda_counts = vec![0; s + 1];
    let lambda_images: Vec<(usize, Poly<F>)> = sources
        .iter()
        .zip(&images)
        .filter(|(m, _)| m.exponents()[..s].iter().all(|&k| k == 0))
        .map(|(m, f)| {
            (
                m.exponents()[s..].iter().map(|&k| k as usize).sum(),
                f.clone(),
            )
        })
        .collect();
    for (q, count) in lambda_counts.iter_mut().enumerate() {
        let fs: Vec<Poly<F>> = lambda_images
            .iter()
            .filter(|(k, _)| *k == q)
            .map(|(_, f)| f.clone())
            .collect();
        *count = independent_classes(&ring, &x, &fs);
    }
    CartierReport {
        source_degree: e,
        images: images.len(),
        all_cocycles,
        independent_rank,
        target_cohomology,
        lambda_counts,
    }
}

/// Per-degree, per-parity dims of `Sym(V)_x` computed two ways.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymDsReport {
    pub p: u32,
    pub cutoff: u32,
    /// `[degree] -> (even, odd)` from ranks of `x` on `Sym(V)`.
    pub computed: Vec<(usize, usize)>,
    /// `[degree] -> (even, odd)` from `Sym(V_x) ⊗ Sym(U_0^p) ⊗ Λ(y^{p-1} x y)`.
    pub predicted: Vec<(usize, usize)>,
    pub vx_dim: (usize, usize),
    pub u0_dim: usize,
}

impl SymDsReport {
    pub fn matches(&self) -> bool {
        self.computed == self.predicted
    }
}

fn series_mul(a: &[[usize; 2]], b: &[[usize; 2]], cutoff: usize) -> Vec<[usize; 2]> {
    let mut out = vec![[0usize; 2]; cutoff + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j > cutoff {
                continue;
            }
            for pa in 0..2 {
                for pb in 0..2 {
                    out[i + j][pa ^ pb] += x[pa] * y[pb];
                }
            }
        }
    }
    out
}

/// Hilbert series factor of one free generator of the given degree and parity.
fn generator_series(deg: usize, odd: bool, cutoff: usize) -> Vec<[usize; 2]> {
    let mut s = vec![[0usize; 2]; cutoff + 1];
    s[0][0] = 1;
    if odd {
        if deg <= cutoff {
            s[deg][1] = 1;
        }
    } else {
        let mut k = deg;
        while k <= cutoff && deg > 0 {
            s[k][0] = 1;
            k += deg;
        }
    }
    s
}

fn sym_ds_core<F: Scalar>(parity: &[Parity], x: &Matrix<F>, cutoff: u32) -> SymDsReport {
    let p = F::characteristic();
    let n = parity.len();
    let names = (0..n).map(|i| format!("v{i}")).collect();
    let ring = Ring::new(names, parity.to_vec());
    let images = (0..n)
        .map(|j| {
            let mut f = ring.zero();
            for i in 0..n {
                f.add_scaled(&ring.gen(i), x[(i, j)]);
            }
            f
        })
        .collect();
    let der = Derivation::new(Parity::Odd, images);
    let mut computed = Vec::new();
    for d in 0..=cutoff {
        let comp = GradedComponent::new(&ring, d);
        let par = comp.parities(&ring);
        let imgs = slice_images(&ring, &der, &comp).expect("linear derivation preserves degree");
        let rank_from = |src: Parity| {
            let vs: Vec<SparseVec<F>> = imgs
                .iter()
                .zip(&par)
                .filter(|(_, &pp)| pp == src)
                .map(|(v, _)| v.clone())
                .collect();
            sparse_rank(&vs)
        };
        let (r_even, r_odd) = (rank_from(Parity::Even), rank_from(Parity::Odd));
        let dim_even = par.iter().filter(|pp| !pp.is_odd()).count();
        let dim_odd = par.len() - dim_even;
        // x maps even -> odd and odd -> even
        computed.push((dim_even - r_even - r_odd, dim_odd - r_odd - r_even));
    }
    // split of V: V_x = ker/im, U_0 = even part of a complement of ker
    let op =
        SquareZeroOddOperator::new(x.clone(), parity.to_vec()).expect("x is square-zero odd on V");
    let vx = ds(&op).sdim();
    let u0 = op.rank() - free_pairs_with_odd_generator(&op);
    let cut = cutoff as usize;
    let mut series = generator_series(0, false, cut);
    for _ in 0..vx.even {
        series = series_mul(&series, &generator_series(1, false, cut), cut);
    }
    for _ in 0..vx.odd {
        series = series_mul(&series, &generator_series(1, true, cut), cut);
    }
    for _ in 0..u0 {
        series = series_mul(&series, &generator_series(p as usize, false, cut), cut);
        series = series_mul(&series, &generator_series(p as usize, true, cut), cut);
    }
    let predicted = series.iter().map(|s| (s[0], s[1])).collect();
    SymDsReport {
        p,
        cutoff,
        computed,
        predicted,
        vx_dim: (vx.even, vx.odd),
        u0_dim: u0,
    }
}

fn free_pairs_with_odd_generator<F: Scalar>(op: &SquareZeroOddOperator<F>) -> usize {
    // number of free pairs (u, xu) with u odd
    let r = ds(op);
    let space = op.space();
    r.free_part
        .iter()
        .filter(|(u, _)| space.parity_of(u) == Some(Parity::Odd))
        .count()
}

/// Compare `Sym(V)_x` with the tensor-product prediction up to degree `cutoff >= p`.
pub fn sym_ds_graded_dims<F: Scalar>(
    parity: &[Parity],
    x: &Matrix<F>,
    cutoff: u32,
) -> Result<SymDsReport, ComplexError> {
    let p = F::characteristic();
    if cutoff < p {
        return Err(ComplexError::CutoffTooSmall {
            cutoff: cutoff as usize,
            p,
        });
    }
    Ok(sym_ds_core(parity, x, cutoff))
}

/// Rational mode: run over a prime larger than the cutoff, where the prediction is `Sym(V_x)`.
pub fn sym_ds_rational<F: Scalar>(
    parity: &[Parity],
    x: &Matrix<F>,
    cutoff: u32,
) -> Result<SymDsReport, ComplexError> {
    let p = F::characteristic();
    if p <= cutoff {
        return Err(ComplexError::PrimeTooSmall {
            cutoff: cutoff as usize,
            p,
        });
    }
    Ok(sym_ds_core(parity, x, cutoff))
}
