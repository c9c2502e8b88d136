//! Dense exact linear algebra and Z/2-graded maps.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Fp, Fq, Scalar, MAX_EXT_DEGREE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("entry ({row}, {col}) violates the parity block structure")]
    ParityViolation { row: usize, col: usize },
    #[error("the subspace is not contained in the ambient subspace")]
    NotASubspace,
    #[error("no eigenvalue found in extensions of degree <= {0}")]
    UnsupportedExtension(usize),
}

/// Z/2 degree of a homogeneous vector or map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(b: u64) -> Self {
        if b % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// `(-1)^{|a||b|}` as a boolean "negate".
    pub fn sign_with(self, other: Parity) -> bool {
        self.is_odd() && other.is_odd()
    }

    /// `(-1)^{self}` applied to a scalar.
    pub fn sign<F: Scalar>(self) -> F {
        if self.is_odd() {
            -F::one()
        } else {
            F::one()
        }
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, o: Parity) -> Parity {
        Parity::from_bit((self.bit() ^ o.bit()) as u64)
    }
}

impl From<Parity> for u8 {
    fn from(p: Parity) -> u8 {
        p.bit()
    }
}

impl TryFrom<u8> for Parity {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            0 => Ok(Parity::Even),
            1 => Ok(Parity::Odd),
            _ => Err(format!("parity must be 0 or 1, got {v}")),
        }
    }
}

/// Super dimension `(d_0 | d_1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SuperDim {
    pub even: usize,
    pub odd: usize,
}

impl SuperDim {
    pub fn new(even: usize, odd: usize) -> Self {
        SuperDim { even, odd }
    }

    pub fn total(self) -> usize {
        self.even + self.odd
    }

    pub fn of(parities: &[Parity]) -> Self {
        let odd = parities.iter().filter(|p| p.is_odd()).count();
        SuperDim::new(parities.len() - odd, odd)
    }

    /// Graded dimension of a super tensor product.
    pub fn tensor(self, o: SuperDim) -> SuperDim {
        SuperDim::new(
            self.even * o.even + self.odd * o.odd,
            self.even * o.odd + self.odd * o.even,
        )
    }

    pub fn shift(self) -> SuperDim {
        SuperDim::new(self.odd, self.even)
    }
}

impl Add for SuperDim {
    type Output = SuperDim;
    fn add(self, o: SuperDim) -> SuperDim {
        SuperDim::new(self.even + o.even, self.odd + o.odd)
    }
}

impl fmt::Display for SuperDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}|{})", self.even, self.odd)
    }
}

/// Finite-dimensional superspace with a labeled homogeneous basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperVectorSpace {
    pub labels: Vec<String>,
    pub parity: Vec<Parity>,
}

impl SuperVectorSpace {
    pub fn new(labels: Vec<String>, parity: Vec<Parity>) -> Result<Self, LinalgError> {
        if labels.len() != parity.len() {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} labels but {} parities",
                labels.len(),
                parity.len()
            )));
        }
        Ok(SuperVectorSpace { labels, parity })
    }

    /// Basis `e0, e1, ...` with the given parities.
    pub fn from_parities(parity: Vec<Parity>) -> Self {
        let labels = (0..parity.len()).map(|i| format!("e{i}")).collect();
        SuperVectorSpace { labels, parity }
    }

    pub fn dim(&self) -> usize {
        self.parity.len()
    }

    pub fn sdim(&self) -> SuperDim {
        SuperDim::of(&self.parity)
    }

    /// Parity shift functor.
    pub fn pi(&self) -> Self {
        SuperVectorSpace {
            labels: self.labels.iter().map(|l| format!("Π{l}")).collect(),
            parity: self.parity.iter().map(|&p| p + Parity::Odd).collect(),
        }
    }

    /// Parity of a vector if it is homogeneous (zero vectors report `Even`).
    pub fn parity_of<F: Scalar>(&self, v: &[F]) -> Option<Parity> {
        let mut seen = None;
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match seen {
                None => seen = Some(self.parity[i]),
                Some(p) if p != self.parity[i] => return None,
                _ => {}
            }
        }
        Some(seen.unwrap_or(Parity::Even))
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: fmt::Debug> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl<F: Scalar> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, cols: &[Vec<F>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, c: F) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * c).collect(),
        }
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(F) -> G) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(F::zero(), |acc, (&a, &b)| {
                    if b.is_zero() {
                        acc
                    } else {
                        acc + a * b
                    }
                })
            })
            .collect()
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, LinalgError> {
        if self.cols != o.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o[(k, j)];
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product.
    pub fn kron(&self, o: &Self) -> Self {
        Self::from_fn(self.rows * o.rows, self.cols * o.cols, |i, j| {
            self[(i / o.rows, j / o.cols)] * o[(i % o.rows, j % o.cols)]
        })
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, o: &Self) -> Self {
        let mut m = Self::zeros(self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                m[(self.rows + i, self.cols + j)] = o[(i, j)];
            }
        }
        m
    }

    /// Reduced row echelon form.
    pub fn rref(&self) -> Rref<F> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, piv);
            let inv = m[(r, c)].inv().expect("nonzero pivot");
            for j in c..m.cols {
                m[(r, j)] *= inv;
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m[(i, c)];
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m[(r, j)];
                    if !v.is_zero() {
                        m.data[i * m.cols + j] -= f * v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { reduced: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Standard kernel basis read off the reduced echelon form: one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let rref = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &rref.pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![F::zero(); self.cols];
                v[free] = F::one();
                for (r, &pc) in rref.pivots.iter().enumerate() {
                    v[pc] = -rref.reduced[(r, free)];
                }
                v
            })
            .collect()
    }

    /// Some solution of `self * x = b`.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        let aug = Self::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                b[i]
            }
        });
        let rref = aug.rref();
        if rref.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (r, &c) in rref.pivots.iter().enumerate() {
            x[c] = rref.reduced[(r, self.cols)];
        }
        Some(x)
    }

    pub fn determinant(&self) -> F {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = F::one();
        for c in 0..n {
            let Some(piv) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return F::zero();
            };
            if piv != c {
                m.swap_rows(piv, c);
                det = -det;
            }
            let d = m[(c, c)];
            det *= d;
            let inv = d.inv().expect("nonzero pivot");
            for i in c + 1..n {
                let f = m[(i, c)] * inv;
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m[(c, j)];
                    m.data[i * n + j] -= f * v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)]
            } else if j - n == i {
                F::one()
            } else {
                F::zero()
            }
        });
        let rref = aug.rref();
        if rref.pivots.len() < n || rref.pivots[n - 1] >= n {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| rref.reduced[(i, n + j)]))
    }

    /// Characteristic polynomial `det(tI - A)`, lowest coefficient first (monic).
    pub fn charpoly(&self) -> Vec<F> {
        assert!(
            self.is_square(),
            "characteristic polynomial of a non-square matrix"
        );
        let n = self.rows;
        let h = self.hessenberg();
        // p_k = (t - h_kk) p_{k-1} - sum_{i<k} h_{ik} (prod_{j=i+1}^{k} h_{j,j-1}) p_{i-1}
        let mut polys: Vec<Vec<F>> = vec![vec![F::one()]];
        for k in 0..n {
            let prev = &polys[k];
            let mut next = vec![F::zero(); k + 2];
            for (d, &c) in prev.iter().enumerate() {
                next[d + 1] += c;
                next[d] -= h[(k, k)] * c;
            }
            let mut prod = F::one();
            for i in (0..k).rev() {
                prod *= h[(i + 1, i)];
                if prod.is_zero() {
                    break;
                }
                let coef = h[(i, k)] * prod;
                for (d, &c) in polys[i].iter().enumerate() {
                    next[d] -= coef * c;
                }
            }
            polys.push(next);
        }
        polys.pop().expect("at least the constant polynomial")
    }

    /// Upper Hessenberg matrix similar to `self`.
    fn hessenberg(&self) -> Self {
        let n = self.rows;
        let mut h = self.clone();
        for m in 1..n.saturating_sub(1) {
            let Some(i) = (m..n).find(|&i| !h[(i, m - 1)].is_zero()) else {
                continue;
            };
            if i != m {
                h.swap_rows(i, m);
                for r in 0..n {
                    h.data.swap(r * n + i, r * n + m);
                }
            }
            let inv = h[(m, m - 1)].inv().expect("nonzero pivot");
            for i in m + 1..n {
                let u = h[(i, m - 1)] * inv;
                if u.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = h[(m, j)];
                    h.data[i * n + j] -= u * v;
                }
                for r in 0..n {
                    let v = h[(r, i)];
                    h.data[r * n + m] += u * v;
                }
            }
        }
        h
    }
}

impl<F: Scalar> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F: Scalar> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

impl<F: Scalar> Mul for &Matrix<F> {
    type Output = Matrix<F>;
    fn mul(self, o: &Matrix<F>) -> Matrix<F> {
        self.try_mul(o).expect("matrix product dimension mismatch")
    }
}

impl<F: Scalar> Add for &Matrix<F> {
    type Output = Matrix<F>;
    fn add(self, o: &Matrix<F>) -> Matrix<F> {
        assert_eq!(
            (self.rows, self.cols),
            (o.rows, o.cols),
            "matrix sum dimension mismatch"
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<F: Scalar> Sub for &Matrix<F> {
    type Output = Matrix<F>;
    fn sub(self, o: &Matrix<F>) -> Matrix<F> {
        assert_eq!(
            (self.rows, self.cols),
            (o.rows, o.cols),
            "matrix difference dimension mismatch"
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

/// Reduced row echelon form with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref<F> {
    pub reduced: Matrix<F>,
    pub pivots: Vec<usize>,
}

/// Subspace of `F^n` stored by its reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace<F> {
    ambient: usize,
    basis: Vec<Vec<F>>,
    pivots: Vec<usize>,
}

impl<F: Scalar> Subspace<F> {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span(ambient, &Matrix::<F>::identity(ambient).to_rows())
    }

    pub fn span(ambient: usize, vectors: &[Vec<F>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let m = Matrix::from_rows(vectors.to_vec()).expect("vectors of equal length");
        assert_eq!(
            m.cols(),
            ambient,
            "vector length differs from ambient dimension"
        );
        let rref = m.rref();
        let basis = (0..rref.pivots.len())
            .map(|i| rref.reduced.row(i).to_vec())
            .collect();
        Subspace {
            ambient,
            basis,
            pivots: rref.pivots,
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of `v` after clearing all pivot coordinates; zero iff `v` lies in the subspace.
    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        let mut w = v.to_vec();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = w[pc];
            if c.is_zero() {
                continue;
            }
            for (x, &r) in w.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= c * r;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.reduce(v).iter().all(|c| c.is_zero())
    }

    /// Coordinates in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[F]) -> Option<Vec<F>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&pc| v[pc]).collect())
    }

    pub fn is_subspace_of(&self, other: &Subspace<F>) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace<F>) -> Subspace<F> {
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, &vs)
    }
}

/// Quotient `W/U` with echelon-complement representatives.
#[derive(Clone, Debug)]
pub struct Quotient<F> {
    sub: Subspace<F>,
    representatives: Vec<Vec<F>>,
    rep_pivots: Vec<usize>,
}

impl<F: Scalar> Quotient<F> {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    pub fn representatives(&self) -> &[Vec<F>] {
        &self.representatives
    }

    /// Coordinates of the class of `w` (assumed to lie in `W`).
    pub fn project(&self, w: &[F]) -> Vec<F> {
        let r = self.sub.reduce(w);
        self.rep_pivots.iter().map(|&pc| r[pc]).collect()
    }

    pub fn projection_matrix(&self) -> Matrix<F> {
        let n = self.sub.ambient;
        let cols: Vec<Vec<F>> = (0..n)
            .map(|c| {
                let mut e = vec![F::zero(); n];
                e[c] = F::one();
                self.project(&e)
            })
            .collect();
        Matrix::from_columns(self.dim(), &cols)
    }
}

/// Quotient of `w` by `u`, with representatives in the reduced echelon complement.
pub fn quotient_with_section<F: Scalar>(
    w: &Subspace<F>,
    u: &Subspace<F>,
) -> Result<Quotient<F>, LinalgError> {
    if !u.is_subspace_of(w) {
        return Err(LinalgError::NotASubspace);
    }
    let reduced: Vec<Vec<F>> = w
        .basis()
        .iter()
        .map(|v| u.reduce(v))
        .filter(|v| v.iter().any(|c| !c.is_zero()))
        .collect();
    let comp = Subspace::span(w.ambient(), &reduced);
    Ok(Quotient {
        sub: u.clone(),
        representatives: comp.basis.clone(),
        rep_pivots: comp.pivots.clone(),
    })
}

/// Homogeneous linear map between superspaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedLinearMap<F> {
    pub matrix: Matrix<F>,
    pub domain: Vec<Parity>,
    pub codomain: Vec<Parity>,
    pub parity: Parity,
}

impl<F: Scalar> GradedLinearMap<F> {
    pub fn new(
        matrix: Matrix<F>,
        domain: Vec<Parity>,
        codomain: Vec<Parity>,
        parity: Parity,
    ) -> Result<Self, LinalgError> {
        if matrix.rows() != codomain.len() || matrix.cols() != domain.len() {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} matrix for a map ({})->({})",
                matrix.rows(),
                matrix.cols(),
                domain.len(),
                codomain.len()
            )));
        }
        for r in 0..matrix.rows() {
            for c in 0..matrix.cols() {
                if !matrix[(r, c)].is_zero() && codomain[r] != domain[c] + parity {
                    return Err(LinalgError::ParityViolation { row: r, col: c });
                }
            }
        }
        Ok(GradedLinearMap {
            matrix,
            domain,
            codomain,
            parity,
        })
    }

    pub fn endomorphism(
        matrix: Matrix<F>,
        parity_of_space: Vec<Parity>,
        parity: Parity,
    ) -> Result<Self, LinalgError> {
        Self::new(matrix, parity_of_space.clone(), parity_of_space, parity)
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        self.matrix.mul_vec(v)
    }
}

/// Rank, kernel and image of a graded map.
#[derive(Clone, Debug)]
pub struct RankKernelImage<F> {
    pub rank: usize,
    pub kernel: Subspace<F>,
    pub image: Subspace<F>,
}

pub fn rank_kernel_image<F: Scalar>(f: &GradedLinearMap<F>) -> RankKernelImage<F> {
    let m = &f.matrix;
    let kernel = Subspace::span(m.cols(), &m.kernel());
    let image = Subspace::span(m.rows(), &m.transpose().to_rows());
    RankKernelImage {
        rank: image.dim(),
        kernel,
        image,
    }
}

/// Eigenpair over an extension `F_{p^k}` stored as coefficient vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtEigen<const P: u32> {
    pub degree: usize,
    /// Coordinates of lambda in `1, t, ..., t^{k-1}`.
    pub lambda: Vec<u32>,
    pub vector: Vec<Vec<u32>>,
}

impl<const P: u32> ExtEigen<P> {
    pub fn lambda_in<const K: usize>(&self) -> Option<Fq<P, K>> {
        lift_coeffs::<P, K>(&self.lambda)
    }

    pub fn vector_in<const K: usize>(&self) -> Option<Vec<Fq<P, K>>> {
        self.vector.iter().map(|c| lift_coeffs::<P, K>(c)).collect()
    }
}

fn lift_coeffs<const P: u32, const K: usize>(c: &[u32]) -> Option<Fq<P, K>> {
    if c.len() > K {
        return None;
    }
    let mut arr = [0i64; K];
    for (a, &v) in arr.iter_mut().zip(c) {
        *a = v as i64;
    }
    Some(Fq::from_coeffs(arr))
}

/// Evaluate a polynomial with prime-field coefficients at an extension element.
pub fn eval_poly<const P: u32, const K: usize>(poly: &[Fp<P>], x: Fq<P, K>) -> Fq<P, K> {
    poly.iter()
        .rev()
        .fold(Fq::zero(), |acc, &c| acc * x + Fq::from_base(c))
}

/// Eigenpair in a fixed extension degree, if the characteristic polynomial has a root there.
pub fn eigen_in<const P: u32, const K: usize>(
    a: &Matrix<Fp<P>>,
) -> Option<(Fq<P, K>, Vec<Fq<P, K>>)> {
    let cp = a.charpoly();
    let lambda = Fq::<P, K>::elements().find(|&x| eval_poly(&cp, x).is_zero())?;
    let n = a.rows();
    let shifted = Matrix::from_fn(n, n, |i, j| {
        let v = Fq::from_base(a[(i, j)]);
        if i == j {
            v - lambda
        } else {
            v
        }
    });
    let v = shifted.kernel().into_iter().next()?;
    Some((lambda, v))
}

/// An eigenvalue of `a` in the smallest extension `F_{p^k}` containing one, with an eigenvector.
pub fn eigenvalue_over_extension<const P: u32>(
    a: &Matrix<Fp<P>>,
) -> Result<ExtEigen<P>, LinalgError> {
    if !a.is_square() || a.rows() == 0 {
        return Err(LinalgError::DimensionMismatch(
            "eigenvalues need a non-empty square matrix".into(),
        ));
    }
    let max_k = a.rows().min(MAX_EXT_DEGREE);
    for k in 1..=max_k {
        let found = crate::with_degree!(k, K => eigen_in::<P, K>(a).map(|(l, v)| ExtEigen {
            degree: K,
            lambda: l.coeffs().to_vec(),
            vector: v.iter().map(|x| x.coeffs().to_vec()).collect(),
        }))
        .flatten();
        if let Some(e) = found {
            return Ok(e);
        }
    }
    Err(LinalgError::UnsupportedExtension(max_k))
}

pub fn is_zero_vec<F: Scalar>(v: &[F]) -> bool {
    v.iter().all(|c| c.is_zero())
}

pub fn unit_vector<F: Scalar>(n: usize, i: usize) -> Vec<F> {
    let mut e = vec![F::zero(); n];
    e[i] = F::one();
    e
}

pub fn axpy<F: Scalar>(y: &mut [F], a: F, x: &[F]) {
    if a.is_zero() {
        return;
    }
    for (yi, &xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi += a * xi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    type F3 = Fp<3>;

    fn f3(rows: &[&[i64]]) -> Matrix<F3> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| F3::new(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn odd_map_rank_and_kernel() {
        // (2|1) -> (0|1): e1 -> f1, e2 -> f1
        let m = f3(&[&[1, 1, 0]]);
        let f = GradedLinearMap::new(
            m,
            vec![Parity::Odd, Parity::Odd, Parity::Even],
            vec![Parity::Even],
            Parity::Odd,
        )
        .unwrap();
        let rki = rank_kernel_image(&f);
        assert_eq!(rki.rank, 1);
        assert_eq!(rki.kernel.dim(), 2);
        assert!(rki.kernel.contains(&[F3::new(1), F3::new(-1), F3::new(0)]));
    }

    #[test]
    fn parity_violation_rejected() {
        let m = f3(&[&[1]]);
        let err = GradedLinearMap::new(m, vec![Parity::Even], vec![Parity::Even], Parity::Odd)
            .unwrap_err();
        assert_eq!(err, LinalgError::ParityViolation { row: 0, col: 0 });
    }

    #[test]
    fn quotient_by_diagonal() {
        let w = Subspace::<F3>::full(3);
        let u = Subspace::span(3, &[vec![F3::new(1), F3::new(1), F3::new(0)]]);
        let q = quotient_with_section(&w, &u).unwrap();
        assert_eq!(q.dim(), 2);
        for (i, r) in q.representatives().iter().enumerate() {
            assert_eq!(q.project(r), unit_vector::<F3>(2, i));
        }
        assert!(matches!(
            quotient_with_section(&u, &w),
            Err(LinalgError::NotASubspace)
        ));
    }

    #[test]
    fn companion_of_t2_plus_1() {
        let a = f3(&[&[0, -1], &[1, 0]]);
        let e = eigenvalue_over_extension(&a).unwrap();
        assert_eq!(e.degree, 2);
        let l = e.lambda_in::<2>().unwrap();
        assert_eq!(l * l, -Fq::<3, 2>::one());
    }

    #[test]
    fn charpoly_of_companion() {
        // companion of t^3 + 2t + 1 over F_3
        let a = f3(&[&[0, 0, -1], &[1, 0, -2], &[0, 1, 0]]);
        assert_eq!(
            a.charpoly(),
            vec![F3::new(1), F3::new(2), F3::new(0), F3::new(1)]
        );
    }
}
