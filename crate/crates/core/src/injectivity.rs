//! Finite-dimensional supermodules over `Λ(z_1, ..., z_r)` with odd generators: freeness, the
//! maximal free summand, DS at odd combinations over extension fields, and non-freeness witnesses.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ds::{ds, matrix_from_rows, matrix_to_rows, DsError, SquareZeroOddOperator};
use crate::field::{Fp, Fq, Scalar, MAX_EXT_DEGREE};
use crate::linalg::{LinalgError, Matrix, Parity, Subspace, SuperDim, SuperVectorSpace};

#[derive(Debug, Error)]
pub enum InjectivityError {
    #[error("module axioms violated: {0}")]
    AxiomsViolated(String),
    #[error("inconsistent decomposition: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Ds(#[from] DsError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A module over the exterior algebra on `r` odd generators acting by `actions`.
#[derive(Clone, Debug)]
pub struct OddModule<F> {
    pub space: SuperVectorSpace,
    pub actions: Vec<SquareZeroOddOperator<F>>,
}

fn combine<F: Scalar>(n: usize, mats: &[&Matrix<F>], coeffs: &[F]) -> Matrix<F> {
    let mut out = Matrix::zeros(n, n);
    for (m, &c) in mats.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if !v.is_zero() {
                    out[(i, j)] += c * v;
                }
            }
        }
    }
    out
}

/// Left multiplication by `z_i` on `Λ` in the basis `z_S` (bitmask order, `z_S = z_{s1}⋯z_{sk}`).
fn regular_action<F: Scalar>(r: usize, i: usize) -> Matrix<F> {
    let n = 1 << r;
    let mut m = Matrix::zeros(n, n);
    for s in 0..n {
        if s & (1 << i) == 0 {
            let below = (s & ((1 << i) - 1)).count_ones();
            m[(s | (1 << i), s)] = if below % 2 == 0 { F::one() } else { -F::one() };
        }
    }
    m
}

impl<F: Scalar> OddModule<F> {
    pub fn new(parity: Vec<Parity>, matrices: Vec<Matrix<F>>) -> Result<Self, InjectivityError> {
        let n = parity.len();
        let mut actions = Vec::with_capacity(matrices.len());
        for (k, m) in matrices.into_iter().enumerate() {
            if m.rows() != n || m.cols() != n {
                return Err(InjectivityError::AxiomsViolated(format!("z{} is {}x{}, expected {n}x{n}", k + 1, m.rows(), m.cols())));
            }
            let op = SquareZeroOddOperator::new(m, parity.clone()).map_err(|e| InjectivityError::AxiomsViolated(format!("z{}: {e}", k + 1)))?;
            actions.push(op);
        }
        for a in 0..actions.len() {
            for b in a + 1..actions.len() {
                let (x, y) = (actions[a].matrix(), actions[b].matrix());
                if !(&(x * y) + &(y * x)).is_zero() {
                    return Err(InjectivityError::AxiomsViolated(format!("z{} and z{} do not anticommute", a + 1, b + 1)));
                }
            }
        }
        Ok(OddModule { space: SuperVectorSpace::from_parities(parity), actions })
    }

    pub fn parity(&self) -> &[Parity] {
        &self.space.parity
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn sdim(&self) -> SuperDim {
        SuperDim::of(self.parity())
    }

    /// Number of odd generators `r`.
    pub fn rank(&self) -> usize {
        self.actions.len()
    }

    pub fn matrix(&self, i: usize) -> &Matrix<F> {
        self.actions[i].matrix()
    }

    pub fn combination(&self, coeffs: &[F]) -> Matrix<F> {
        let mats: Vec<&Matrix<F>> = (0..self.rank()).map(|i| self.matrix(i)).collect();
        combine(self.dim(), &mats, coeffs)
    }

    /// The regular module `Λ`, generated in parity `generator`.
    pub fn regular(r: usize, generator: Parity) -> Self {
        let parity = (0..1usize << r).map(|s| generator + Parity::from_bit(u64::from(s.count_ones()))).collect();
        Self::new(parity, (0..r).map(|i| regular_action(r, i)).collect()).expect("regular module satisfies the axioms")
    }

    pub fn trivial(r: usize, parity: Vec<Parity>) -> Self {
        let n = parity.len();
        Self::new(parity, vec![Matrix::zeros(n, n); r]).expect("zero actions satisfy the axioms")
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self, InjectivityError> {
        if self.rank() != other.rank() {
            return Err(InjectivityError::AxiomsViolated("summands have different numbers of generators".into()));
        }
        let (a, b) = (self.dim(), other.dim());
        let parity = self.parity().iter().chain(other.parity()).copied().collect();
        let mats = (0..self.rank())
            .map(|i| {
                Matrix::from_fn(a + b, a + b, |r, c| match (r < a, c < a) {
                    (true, true) => self.matrix(i)[(r, c)],
                    (false, false) => other.matrix(i)[(r - a, c - a)],
                    _ => F::zero(),
                })
            })
            .collect();
        Self::new(parity, mats)
    }

    /// Dual module: `(z f)(m) = (−1)^{|f|} f(z m)`.
    pub fn dual(&self) -> Self {
        let n = self.dim();
        let parity = self.parity().to_vec();
        let mats = (0..self.rank())
            .map(|i| {
                let z = self.matrix(i);
                Matrix::from_fn(n, n, |a, b| if parity[b].is_odd() { -z[(b, a)] } else { z[(b, a)] })
            })
            .collect();
        Self::new(parity.clone(), mats).expect("dual of a module is a module")
    }

    /// `g^{-1} z g` for an even invertible `g`.
    pub fn conjugate(&self, g: &Matrix<F>) -> Result<Self, InjectivityError> {
        let g_inv = g.inverse().ok_or_else(|| InjectivityError::AxiomsViolated("base change is not invertible".into()))?;
        let mats = (0..self.rank()).map(|i| &(&g_inv * self.matrix(i)) * g).collect();
        Self::new(self.parity().to_vec(), mats)
    }

    pub fn base_change<G: Scalar>(&self, f: impl Fn(F) -> G + Copy) -> OddModule<G> {
        OddModule::new(self.parity().to_vec(), (0..self.rank()).map(|i| self.matrix(i).map(f)).collect()).expect("base change preserves the axioms")
    }

    /// The submodule spanned by homogeneous `basis` vectors, acted on by the operators `which`.
    fn restrict(&self, basis: &[Vec<F>], which: &[Matrix<F>]) -> Result<Self, InjectivityError> {
        let n = self.dim();
        let d = basis.len();
        let parity: Vec<Parity> = basis.iter().map(|v| homogeneous_parity(self.parity(), v)).collect::<Option<_>>().ok_or_else(|| InjectivityError::Inconsistent("basis vector is not homogeneous".into()))?;
        let cols = Matrix::from_fn(n, d, |i, j| basis[j][i]);
        let mats = which
            .iter()
            .map(|z| {
                let mut m = Matrix::zeros(d, d);
                for (j, b) in basis.iter().enumerate() {
                    let img = z.mul_vec(b);
                    let c = cols.solve(&img).ok_or_else(|| InjectivityError::Inconsistent("span is not stable".into()))?;
                    for (i, v) in c.into_iter().enumerate() {
                        m[(i, j)] = v;
                    }
                }
                Ok(m)
            })
            .collect::<Result<_, InjectivityError>>()?;
        Self::new(parity, mats)
    }

    /// `z_1 ⋯ z_r`.
    pub fn top_product(&self) -> Matrix<F> {
        (0..self.rank()).fold(Matrix::identity(self.dim()), |acc, i| &acc * self.matrix(i))
    }

    pub fn is_free(&self) -> bool {
        self.dim() == (1 << self.rank()) * self.top_product().rank()
    }

    /// Homogeneous basis of the image of `m`, one parity component at a time.
    fn homogeneous_image(&self, m: &Matrix<F>) -> Vec<Vec<F>> {
        let mut out = Vec::new();
        for par in [Parity::Even, Parity::Odd] {
            let cols: Vec<Vec<F>> = (0..self.dim()).filter(|&k| self.parity()[k] == par).map(|k| m.column(k)).collect();
            out.extend(Subspace::span(self.dim(), &cols).basis().iter().cloned());
        }
        out
    }
}

fn homogeneous_parity<F: Scalar>(parity: &[Parity], v: &[F]) -> Option<Parity> {
    let mut seen = None;
    for (p, c) in parity.iter().zip(v) {
        if !c.is_zero() {
            match seen {
                None => seen = Some(*p),
                Some(q) if q != *p => return None,
                _ => {}
            }
        }
    }
    Some(seen.unwrap_or(Parity::Even))
}

/// `M = F ⊕ G` with `F` free on `generators` and `(z_1⋯z_r) G = 0`.
#[derive(Clone, Debug)]
pub struct FreeDecomposition<F> {
    pub generators: Vec<Vec<F>>,
    /// `z_S m_i` for each generator, subsets in bitmask order.
    pub free_basis: Vec<Vec<F>>,
    pub complement_basis: Vec<Vec<F>>,
    pub complement: OddModule<F>,
    /// Columns: `free_basis` then `complement_basis`.
    pub base_change: Matrix<F>,
}

impl<F: Scalar> FreeDecomposition<F> {
    pub fn free_rank(&self) -> usize {
        self.generators.len()
    }
}

pub fn free_decompose<F: Scalar>(m: &OddModule<F>) -> Result<FreeDecomposition<F>, InjectivityError> {
    let n = m.dim();
    let r = m.rank();
    let top = m.top_product();
    let mut images: Vec<Vec<F>> = Vec::new();
    let mut generators = Vec::new();
    for k in 0..n {
        let img = top.column(k);
        let mut trial = images.clone();
        trial.push(img.clone());
        if Subspace::span(n, &trial).dim() > images.len() {
            images.push(img);
            let mut e = vec![F::zero(); n];
            e[k] = F::one();
            generators.push(e);
        }
    }
    let block = 1usize << r;
    let mut free_basis = Vec::new();
    for g in &generators {
        for s in 0..block {
            let mut v = g.clone();
            for i in (0..r).rev() {
                if s & (1 << i) != 0 {
                    v = m.matrix(i).mul_vec(&v);
                }
            }
            free_basis.push(v);
        }
    }
    let kdim = free_basis.len();
    let free_parity: Vec<Parity> = generators
        .iter()
        .flat_map(|g| {
            let p = homogeneous_parity(m.parity(), g).expect("standard basis vector");
            (0..block).map(move |s| p + Parity::from_bit(u64::from((s as u32).count_ones())))
        })
        .collect();
    // Retraction π: M → Λ^k, unknowns π[a][b] at index a*n + b.
    let unknowns = kdim * n;
    let mut rows: Vec<Vec<F>> = Vec::new();
    let mut rhs: Vec<F> = Vec::new();
    let reg: Vec<Matrix<F>> = (0..r).map(|i| regular_action(r, i)).collect();
    for i in 0..r {
        let z = m.matrix(i);
        for a in 0..kdim {
            for b in 0..n {
                let mut row = vec![F::zero(); unknowns];
                for c in 0..n {
                    row[a * n + c] += z[(c, b)];
                }
                let (blk, loc) = (a / block, a % block);
                for c in 0..block {
                    row[(blk * block + c) * n + b] -= reg[i][(loc, c)];
                }
                rows.push(row);
                rhs.push(F::zero());
            }
        }
    }
    for a in 0..kdim {
        for b in 0..kdim {
            let mut row = vec![F::zero(); unknowns];
            for c in 0..n {
                row[a * n + c] = free_basis[b][c];
            }
            rows.push(row);
            rhs.push(if a == b { F::one() } else { F::zero() });
        }
    }
    for a in 0..kdim {
        for b in 0..n {
            if free_parity[a] != m.parity()[b] {
                let mut row = vec![F::zero(); unknowns];
                row[a * n + b] = F::one();
                rows.push(row);
                rhs.push(F::zero());
            }
        }
    }
    let pi = if kdim == 0 {
        Matrix::zeros(0, n)
    } else {
        let sys = Matrix::from_rows(rows)?;
        let x = sys.solve(&rhs).ok_or_else(|| InjectivityError::Inconsistent("free summand has no module retraction".into()))?;
        Matrix::from_fn(kdim, n, |a, b| x[a * n + b])
    };
    let mut complement_basis = Vec::new();
    for par in [Parity::Even, Parity::Odd] {
        let idx: Vec<usize> = (0..n).filter(|&k| m.parity()[k] == par).collect();
        if idx.is_empty() {
            continue;
        }
        let sub = Matrix::from_fn(kdim, idx.len(), |a, j| pi[(a, idx[j])]);
        for v in sub.kernel() {
            let mut full = vec![F::zero(); n];
            for (j, c) in v.into_iter().enumerate() {
                full[idx[j]] = c;
            }
            complement_basis.push(full);
        }
    }
    if kdim + complement_basis.len() != n {
        return Err(InjectivityError::Inconsistent(format!("free part {kdim} plus complement {} is not {n}", complement_basis.len())));
    }
    let mats: Vec<Matrix<F>> = (0..r).map(|i| m.matrix(i).clone()).collect();
    let complement = m.restrict(&complement_basis, &mats)?;
    let base_change = Matrix::from_fn(n, n, |i, j| if j < kdim { free_basis[j][i] } else { complement_basis[j - kdim][i] });
    Ok(FreeDecomposition { generators, free_basis, complement_basis, complement, base_change })
}

pub fn is_injective<F: Scalar>(m: &OddModule<F>) -> bool {
    m.is_free()
}

/// Graded dimensions of `M_z` for `z = Σ c_i z_i`.
pub fn ds_at<F: Scalar>(m: &OddModule<F>, coeffs: &[F]) -> Result<SuperDim, InjectivityError> {
    if coeffs.len() != m.rank() {
        return Err(InjectivityError::AxiomsViolated(format!("{} coefficients for {} generators", coeffs.len(), m.rank())));
    }
    let op = SquareZeroOddOperator::new(m.combination(coeffs), m.parity().to_vec())?;
    Ok(ds(&op).sdim())
}

/// `ds_at` for a prime-field module and a combination with coefficients in `F_{p^K}`.
pub fn ds_at_extension<const P: u32, const K: usize>(m: &OddModule<Fp<P>>, coeffs: &[Fq<P, K>]) -> Result<SuperDim, InjectivityError> {
    ds_at(&m.base_change(Fq::<P, K>::from_base), coeffs)
}

/// A combination `z` over `F_{p^degree}` and a class with `M_z ≠ 0`; field elements are
/// coordinates in `1, t, ..., t^{degree-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub degree: usize,
    pub coefficients: Vec<Vec<u32>>,
    pub class: Vec<Vec<u32>>,
    pub ds: SuperDim,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum WitnessOutcome {
    Free,
    Witness(Witness),
    /// Not free, but no witness up to the extension cap.
    Inconclusive { max_degree: usize },
}

enum Search<F> {
    Free,
    Found { coeffs: Vec<F>, class: Vec<F> },
    NeedsExtension,
}

fn nonzero_class<F: Scalar>(op: &SquareZeroOddOperator<F>) -> Option<Vec<F>> {
    let res = ds(op);
    res.kernel().basis().iter().find(|v| res.project(v).iter().any(|c| !c.is_zero())).cloned()
}

/// The recursion on `z_1·M` with the eigenvalue step on the pair `(z_1, z')`, inside `F`.
fn search<F: Scalar>(m: &OddModule<F>) -> Result<Search<F>, InjectivityError> {
    if m.is_free() {
        return Ok(Search::Free);
    }
    let r = m.rank();
    let n = m.dim();
    let mut e1 = vec![F::zero(); r];
    e1[0] = F::one();
    if let Some(class) = nonzero_class(&m.actions[0]) {
        return Ok(Search::Found { coeffs: e1, class });
    }
    let z1 = m.matrix(0).clone();
    let image = m.homogeneous_image(&z1);
    let rest: Vec<Matrix<F>> = (1..r).map(|i| m.matrix(i).clone()).collect();
    let sub = m.restrict(&image, &rest)?;
    let inner = match search(&sub)? {
        Search::Free => return Err(InjectivityError::Inconsistent("z1 acts freely and z1·M is free, yet M is not".into())),
        Search::NeedsExtension => return Ok(Search::NeedsExtension),
        Search::Found { coeffs, .. } => coeffs,
    };
    let mut c = vec![F::zero()];
    c.extend(inner);
    let zp = m.combination(&c);
    let op = SquareZeroOddOperator::new(zp.clone(), m.parity().to_vec())?;
    if let Some(class) = nonzero_class(&op) {
        return Ok(Search::Found { coeffs: c, class });
    }
    let pair = OddModule::new(m.parity().to_vec(), vec![z1.clone(), zp.clone()])?;
    let dec = free_decompose(&pair)?;
    let g = &dec.complement;
    if g.dim() == 0 {
        return Err(InjectivityError::Inconsistent("pair acts freely although z1·M is not free over z'".into()));
    }
    let gd = g.dim();
    let (gz1, gzp) = (g.matrix(0), g.matrix(1));
    let mut gens: Vec<Vec<F>> = Vec::new();
    let mut imgs: Vec<Vec<F>> = Vec::new();
    for k in 0..gd {
        let img = gz1.column(k);
        let mut trial = imgs.clone();
        trial.push(img.clone());
        if Subspace::span(gd, &trial).dim() > imgs.len() {
            imgs.push(img);
            let mut e = vec![F::zero(); gd];
            e[k] = F::one();
            gens.push(e);
        }
    }
    let s = gens.len();
    let w = Matrix::from_fn(gd, s, |i, j| imgs[j][i]);
    let mut at = Matrix::zeros(s, s);
    for (i, gi) in gens.iter().enumerate() {
        let alpha = w.solve(&gzp.mul_vec(gi)).ok_or_else(|| InjectivityError::Inconsistent("z'·G is not inside z1·G".into()))?;
        for (j, a) in alpha.into_iter().enumerate() {
            at[(j, i)] = a;
        }
    }
    let cp = at.charpoly();
    let eval = |x: F| cp.iter().rev().fold(F::zero(), |acc, &c| acc * x + c);
    let Some(lambda) = (0..F::order()).map(F::from_index).find(|&x| eval(x).is_zero()) else {
        return Ok(Search::NeedsExtension);
    };
    let shifted = Matrix::from_fn(s, s, |i, j| if i == j { at[(i, j)] - lambda } else { at[(i, j)] });
    let a = shifted.kernel().into_iter().next().ok_or_else(|| InjectivityError::Inconsistent("eigenvalue without eigenvector".into()))?;
    let mut g_local = vec![F::zero(); gd];
    for (ai, gi) in a.iter().zip(&gens) {
        for (x, y) in g_local.iter_mut().zip(gi) {
            *x += *ai * *y;
        }
    }
    let mut class = vec![F::zero(); n];
    for (coef, b) in g_local.iter().zip(&dec.complement_basis) {
        for (x, y) in class.iter_mut().zip(b) {
            *x += *coef * *y;
        }
    }
    let coeffs: Vec<F> = c.iter().enumerate().map(|(i, &ci)| if i == 0 { lambda } else { -ci }).collect();
    Ok(Search::Found { coeffs, class })
}

fn coords<const P: u32, const K: usize>(v: &[Fq<P, K>]) -> Vec<Vec<u32>> {
    v.iter().map(|x| x.coeffs().to_vec()).collect()
}

fn witness_in<const P: u32, const K: usize>(m: &OddModule<Fp<P>>) -> Result<Option<Witness>, InjectivityError> {
    let ext = m.base_change(Fq::<P, K>::from_base);
    match search(&ext)? {
        Search::Found { coeffs, class } => {
            let dims = ds_at_extension::<P, K>(m, &coeffs)?;
            if dims.even + dims.odd == 0 {
                return Err(InjectivityError::Inconsistent("witness does not certify".into()));
            }
            Ok(Some(Witness { degree: K, coefficients: coords(&coeffs), class: coords(&class), ds: dims }))
        }
        _ => Ok(None),
    }
}

/// Searches `F_{p^k}` for `k = 1, 2, ...` up to `min(dim M, max_ext, 6)`.
pub fn find_witness<const P: u32>(m: &OddModule<Fp<P>>, max_ext: Option<usize>) -> Result<WitnessOutcome, InjectivityError> {
    if m.is_free() {
        return Ok(WitnessOutcome::Free);
    }
    let cap = max_ext.unwrap_or(usize::MAX).min(m.dim()).min(MAX_EXT_DEGREE).max(1);
    for k in 1..=cap {
        if let Some(w) = crate::with_degree!(k, K => witness_in::<P, K>(m)).transpose()?.flatten() {
            return Ok(WitnessOutcome::Witness(w));
        }
    }
    Ok(WitnessOutcome::Inconclusive { max_degree: cap })
}

/// Recomputes `M_z` for a reported witness from its coordinates.
pub fn certify_witness<const P: u32>(m: &OddModule<Fp<P>>, w: &Witness) -> Result<SuperDim, InjectivityError> {
    fn lift<const P: u32, const K: usize>(c: &[Vec<u32>]) -> Vec<Fq<P, K>> {
        c.iter()
            .map(|v| {
                let mut a = [0i64; K];
                for (x, &y) in a.iter_mut().zip(v) {
                    *x = y as i64;
                }
                Fq::from_coeffs(a)
            })
            .collect()
    }
    crate::with_degree!(w.degree, K => ds_at_extension::<P, K>(m, &lift::<P, K>(&w.coefficients)))
        .ok_or_else(|| InjectivityError::AxiomsViolated(format!("unsupported extension degree {}", w.degree)))?
}

/// Basis `v_1..v_N` (even), `w_1..w_N` (odd) with `z_1 v_i = w_i`, `z_2 v_i = w_i + w_{i+1}`,
/// `w_{N+1} = 0`.
pub fn truncated_counterexample<F: Scalar>(len: usize) -> OddModule<F> {
    let n = 2 * len;
    let parity = (0..n).map(|k| if k < len { Parity::Even } else { Parity::Odd }).collect();
    let z1 = Matrix::from_fn(n, n, |r, c| if c < len && r == len + c { F::one() } else { F::zero() });
    let z2 = Matrix::from_fn(n, n, |r, c| if c < len && (r == len + c || r == len + c + 1) { F::one() } else { F::zero() });
    OddModule::new(parity, vec![z1, z2]).expect("truncation satisfies the axioms")
}

/// `{"p":3,"parity":[0,1,...],"actions":[[[...]],...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OddModuleJson {
    pub p: u32,
    pub parity: Vec<Parity>,
    pub actions: Vec<Vec<Vec<u64>>>,
}

impl OddModuleJson {
    pub fn module<const P: u32>(&self) -> Result<OddModule<Fp<P>>, InjectivityError> {
        let mats = self.actions.iter().map(|rows| matrix_from_rows::<P>(self.p, rows)).collect::<Result<_, _>>()?;
        OddModule::new(self.parity.clone(), mats)
    }

    pub fn from_module<const P: u32>(m: &OddModule<Fp<P>>) -> Self {
        OddModuleJson { p: P, parity: m.parity().to_vec(), actions: (0..m.rank()).map(|i| matrix_to_rows(m.matrix(i))).collect() }
    }
}

fn random_even_invertible<F: Scalar, R: Rng + ?Sized>(rng: &mut R, parity: &[Parity]) -> Matrix<F> {
    let n = parity.len();
    loop {
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if parity[i] == parity[j] {
                    g[(i, j)] = F::random(rng);
                }
            }
        }
        if g.inverse().is_some() {
            return g;
        }
    }
}

/// `Λ·a` for a random homogeneous `a` in the regular module.
fn random_cyclic<F: Scalar, R: Rng + ?Sized>(rng: &mut R, r: usize) -> OddModule<F> {
    let reg = OddModule::<F>::regular(r, if rng.gen() { Parity::Odd } else { Parity::Even });
    let n = reg.dim();
    let par = if rng.gen() { Parity::Odd } else { Parity::Even };
    let a: Vec<F> = (0..n).map(|k| if reg.parity()[k] == par { F::random(rng) } else { F::zero() }).collect();
    let mut span: Vec<Vec<F>> = Vec::new();
    for s in 0..1usize << r {
        let mut v = a.clone();
        for i in (0..r).rev() {
            if s & (1 << i) != 0 {
                v = reg.matrix(i).mul_vec(&v);
            }
        }
        let mut trial = span.clone();
        trial.push(v.clone());
        if Subspace::span(n, &trial).dim() > span.len() {
            span.push(v);
        }
    }
    let mats: Vec<Matrix<F>> = (0..r).map(|i| reg.matrix(i).clone()).collect();
    reg.restrict(&span, &mats).expect("cyclic submodule")
}

/// Even `g_1..g_s`, odd `w_1..w_s`, `z_k g_i = Σ_j A_k[i][j] w_j`, `z_k w = 0`.
fn random_graph<F: Scalar, R: Rng + ?Sized>(rng: &mut R, r: usize, s: usize) -> OddModule<F> {
    let n = 2 * s;
    let parity = (0..n).map(|k| if k < s { Parity::Even } else { Parity::Odd }).collect();
    let mats = (0..r)
        .map(|_| {
            let a: Vec<Vec<F>> = (0..s).map(|_| (0..s).map(|_| F::random(rng)).collect()).collect();
            Matrix::from_fn(n, n, |row, col| if col < s && row >= s { a[col][row - s] } else { F::zero() })
        })
        .collect();
    OddModule::new(parity, mats).expect("all products vanish")
}

/// Random module of dimension at most `max_dim` over `r` generators: a direct sum of regular,
/// trivial, cyclic, dual cyclic and square-zero "graph" pieces, conjugated by a random even
/// base change. With probability 1/4 only regular pieces are used.
pub fn random_module<F: Scalar, R: Rng + ?Sized>(rng: &mut R, r: usize, max_dim: usize) -> OddModule<F> {
    let free_only = rng.gen_ratio(1, 4) && (1 << r) <= max_dim;
    let mut m: Option<OddModule<F>> = None;
    let mut budget = max_dim;
    let kinds = [0u8, 1, 2, 3, 4];
    for _ in 0..4 {
        let kind = if free_only { 0 } else { *kinds.choose(rng).expect("non-empty") };
        let piece = match kind {
            0 if (1 << r) <= budget => OddModule::regular(r, if rng.gen() { Parity::Odd } else { Parity::Even }),
            1 if budget >= 1 => OddModule::trivial(r, vec![if rng.gen() { Parity::Odd } else { Parity::Even }]),
            2 | 3 if (1 << r) <= budget => {
                let c = random_cyclic(rng, r);
                if kind == 3 {
                    c.dual()
                } else {
                    c
                }
            }
            4 if budget >= 2 => {
                let s = rng.gen_range(1..=(budget / 2).min(4));
                random_graph(rng, r, s)
            }
            _ => continue,
        };
        if piece.dim() == 0 || piece.dim() > budget {
            continue;
        }
        budget -= piece.dim();
        m = Some(match m {
            None => piece,
            Some(acc) => acc.direct_sum(&piece).expect("same number of generators"),
        });
    }
    let m = m.unwrap_or_else(|| OddModule::trivial(r, vec![Parity::Even]));
    let g = random_even_invertible(rng, m.parity());
    m.conjugate(&g).expect("invertible base change")
}
