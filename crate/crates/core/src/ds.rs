//! The DS functor `M -> M_x = ker x / im x` on finite-dimensional supermodules.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexes::FiniteComplex;
use crate::field::{Fp, Scalar};
use crate::linalg::{
    quotient_with_section, GradedLinearMap, LinalgError, Matrix, Parity, Quotient, Subspace,
    SuperDim, SuperVectorSpace,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DsError {
    #[error("operator does not square to zero")]
    NotSquareZero,
    #[error("operator is not odd")]
    NotOdd,
    #[error("map does not graded-commute with x")]
    DoesNotCommute,
    #[error("operands live over different fields (p = {0} vs p = {1})")]
    FieldMismatch(u32, u32),
    #[error("differential does not square to zero at degree {0}")]
    NotSquareZeroDifferential(usize),
    #[error("malformed module data: {0}")]
    Malformed(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Odd endomorphism with `x^2 = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareZeroOddOperator<F> {
    map: GradedLinearMap<F>,
}

impl<F: Scalar> SquareZeroOddOperator<F> {
    pub fn new(matrix: Matrix<F>, parity: Vec<Parity>) -> Result<Self, DsError> {
        let map =
            GradedLinearMap::endomorphism(matrix, parity, Parity::Odd).map_err(|e| match e {
                LinalgError::ParityViolation { .. } => DsError::NotOdd,
                other => DsError::Linalg(other),
            })?;
        if !(&map.matrix * &map.matrix).is_zero() {
            return Err(DsError::NotSquareZero);
        }
        Ok(SquareZeroOddOperator { map })
    }

    pub fn zero(parity: Vec<Parity>) -> Self {
        let n = parity.len();
        SquareZeroOddOperator {
            map: GradedLinearMap {
                matrix: Matrix::zeros(n, n),
                domain: parity.clone(),
                codomain: parity,
                parity: Parity::Odd,
            },
        }
    }

    /// `k` copies of the free rank-one module `(u, xu)` with `u` of the given parity.
    pub fn free(copies: usize, generator: Parity) -> Self {
        let mut parity = Vec::new();
        let mut m = Matrix::zeros(2 * copies, 2 * copies);
        for c in 0..copies {
            parity.push(generator);
            parity.push(generator + Parity::Odd);
            m[(2 * c + 1, 2 * c)] = F::one();
        }
        Self::new(m, parity).expect("free module operator is valid")
    }

    pub fn matrix(&self) -> &Matrix<F> {
        &self.map.matrix
    }

    pub fn parity(&self) -> &[Parity] {
        &self.map.domain
    }

    pub fn space(&self) -> SuperVectorSpace {
        SuperVectorSpace::from_parities(self.map.domain.clone())
    }

    pub fn dim(&self) -> usize {
        self.map.domain.len()
    }

    pub fn sdim(&self) -> SuperDim {
        SuperDim::of(&self.map.domain)
    }

    pub fn as_map(&self) -> &GradedLinearMap<F> {
        &self.map
    }

    pub fn rank(&self) -> usize {
        self.map.matrix.rank()
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        self.map.matrix.mul_vec(v)
    }

    /// Conjugate by an even invertible change of basis: `g x g^{-1}`.
    pub fn conjugate(&self, g: &Matrix<F>, g_inv: &Matrix<F>) -> Result<Self, DsError> {
        let m = &(g * &self.map.matrix) * g_inv;
        Self::new(m, self.map.domain.clone())
    }
}

/// `M_x` with a chosen section and free part.
#[derive(Clone, Debug)]
pub struct DSResult<F> {
    pub cohomology: SuperVectorSpace,
    /// Representatives in `ker x` of a basis of `M_x`.
    pub section: Vec<Vec<F>>,
    /// Pairs `(u_i, x u_i)` spanning a maximal free summand.
    pub free_part: Vec<(Vec<F>, Vec<F>)>,
    quotient: Quotient<F>,
    kernel: Subspace<F>,
}

impl<F: Scalar> DSResult<F> {
    pub fn sdim(&self) -> SuperDim {
        self.cohomology.sdim()
    }

    pub fn dim(&self) -> usize {
        self.section.len()
    }

    /// Class coordinates of a cocycle.
    pub fn project(&self, v: &[F]) -> Vec<F> {
        self.quotient.project(v)
    }

    pub fn kernel(&self) -> &Subspace<F> {
        &self.kernel
    }

    pub fn is_cocycle(&self, v: &[F]) -> bool {
        self.kernel.contains(v)
    }
}

fn homogeneous_part<F: Scalar>(v: &[F], parity: &[Parity], keep: Parity) -> Vec<F> {
    v.iter()
        .zip(parity)
        .map(|(&c, &p)| if p == keep { c } else { F::zero() })
        .collect()
}

pub fn ds<F: Scalar>(x: &SquareZeroOddOperator<F>) -> DSResult<F> {
    let m = x.matrix();
    let parity = x.parity();
    let n = x.dim();
    let kernel = Subspace::span(n, &m.kernel());
    let image = Subspace::span(n, &m.transpose().to_rows());
    let quotient = quotient_with_section(&kernel, &image)
        .expect("image of a square-zero map lies in its kernel");
    let section: Vec<Vec<F>> = quotient.representatives().to_vec();
    let space = SuperVectorSpace::from_parities(parity.to_vec());
    let coh_parity: Vec<Parity> = section
        .iter()
        .map(|v| {
            space
                .parity_of(v)
                .expect("echelon representatives are homogeneous")
        })
        .collect();
    let labels = (0..section.len()).map(|i| format!("[c{i}]")).collect();
    let free_part = image
        .basis()
        .iter()
        .map(|b| {
            let pb = space
                .parity_of(b)
                .expect("echelon image basis is homogeneous");
            let u = m.solve(b).expect("image vector has a preimage");
            (homogeneous_part(&u, parity, pb + Parity::Odd), b.clone())
        })
        .collect();
    DSResult {
        cohomology: SuperVectorSpace::new(labels, coh_parity).expect("labels match parities"),
        section,
        free_part,
        quotient,
        kernel,
    }
}

/// `f_x : M_x -> N_x` for `f` with `f x_M = (-1)^{|f|} x_N f`.
pub fn induced_map<F: Scalar>(
    f: &GradedLinearMap<F>,
    x_m: &SquareZeroOddOperator<F>,
    x_n: &SquareZeroOddOperator<F>,
    ds_m: &DSResult<F>,
    ds_n: &DSResult<F>,
) -> Result<GradedLinearMap<F>, DsError> {
    if f.domain != x_m.parity() || f.codomain != x_n.parity() {
        return Err(DsError::Malformed(
            "map does not match the module parities".into(),
        ));
    }
    let lhs = &f.matrix * x_m.matrix();
    let rhs = (x_n.matrix() * &f.matrix).scale(f.parity.sign());
    if lhs != rhs {
        return Err(DsError::DoesNotCommute);
    }
    let cols: Vec<Vec<F>> = ds_m
        .section
        .iter()
        .map(|s| ds_n.project(&f.apply(s)))
        .collect();
    let matrix = Matrix::from_columns(ds_n.dim(), &cols);
    Ok(GradedLinearMap::new(
        matrix,
        ds_m.cohomology.parity.clone(),
        ds_n.cohomology.parity.clone(),
        f.parity,
    )?)
}

/// `x(m ⊗ n) = xm ⊗ n + (-1)^{|m|} m ⊗ xn`, basis `(a, b) -> a * dim N + b`.
pub fn tensor_operator<F: Scalar>(
    x_m: &SquareZeroOddOperator<F>,
    x_n: &SquareZeroOddOperator<F>,
) -> SquareZeroOddOperator<F> {
    let (dm, dn) = (x_m.dim(), x_n.dim());
    let (pm, pn) = (x_m.parity(), x_n.parity());
    let mut m = Matrix::zeros(dm * dn, dm * dn);
    for a in 0..dm {
        for b in 0..dn {
            let col = a * dn + b;
            for a2 in 0..dm {
                let c = x_m.matrix()[(a2, a)];
                if !c.is_zero() {
                    m[(a2 * dn + b, col)] += c;
                }
            }
            let sign: F = pm[a].sign();
            for b2 in 0..dn {
                let c = x_n.matrix()[(b2, b)];
                if !c.is_zero() {
                    m[(a * dn + b2, col)] += sign * c;
                }
            }
        }
    }
    let parity = pm
        .iter()
        .flat_map(|&a| pn.iter().map(move |&b| a + b))
        .collect();
    SquareZeroOddOperator::new(m, parity)
        .expect("tensor of square-zero odd operators is square-zero odd")
}

pub fn direct_sum_operator<F: Scalar>(
    x_m: &SquareZeroOddOperator<F>,
    x_n: &SquareZeroOddOperator<F>,
) -> SquareZeroOddOperator<F> {
    let mut parity = x_m.parity().to_vec();
    parity.extend_from_slice(x_n.parity());
    SquareZeroOddOperator::new(x_m.matrix().direct_sum(x_n.matrix()), parity)
        .expect("direct sum is square-zero odd")
}

/// Operator on `M*` in the dual basis: `(x φ)(m) = (-1)^{|φ|} φ(x m)`.
pub fn dual_operator<F: Scalar>(x_m: &SquareZeroOddOperator<F>) -> SquareZeroOddOperator<F> {
    let n = x_m.dim();
    let parity = x_m.parity();
    let m = Matrix::from_fn(n, n, |a, b| parity[b].sign::<F>() * x_m.matrix()[(b, a)]);
    SquareZeroOddOperator::new(m, parity.to_vec())
        .expect("dual of a square-zero odd operator is square-zero odd")
}

/// Gram matrix of the evaluation pairing between section representatives of `(M*)_x` and `M_x`.
pub fn dual_pairing_matrix<F: Scalar>(ds_dual: &DSResult<F>, ds_m: &DSResult<F>) -> Matrix<F> {
    Matrix::from_fn(ds_dual.dim(), ds_m.dim(), |i, j| {
        ds_dual.section[i]
            .iter()
            .zip(&ds_m.section[j])
            .fold(F::zero(), |acc, (&a, &b)| acc + a * b)
    })
}

/// The evaluation pairing on cocycles kills coboundaries on both sides and is nondegenerate on classes.
pub fn pairing_descends_and_is_perfect<F: Scalar>(x_m: &SquareZeroOddOperator<F>) -> bool {
    let x_d = dual_operator(x_m);
    let (dm, dd) = (ds(x_m), ds(&x_d));
    let pair = |a: &[F], b: &[F]| a.iter().zip(b).fold(F::zero(), |acc, (&u, &v)| acc + u * v);
    let kills_images = dd
        .kernel()
        .basis()
        .iter()
        .all(|phi| dm.free_part.iter().all(|(_, xu)| pair(phi, xu).is_zero()))
        && dm
            .kernel()
            .basis()
            .iter()
            .all(|m| dd.free_part.iter().all(|(_, xu)| pair(xu, m).is_zero()));
    let g = dual_pairing_matrix(&dd, &dm);
    kills_images && g.is_square() && g.rank() == dm.dim()
}

/// Collapse a finite complex to one superspace with parity = degree mod 2.
pub fn complex_as_operator<F: Scalar>(
    k: &FiniteComplex<F>,
) -> Result<(SuperVectorSpace, SquareZeroOddOperator<F>), DsError> {
    if let Some(q) = k.first_non_complex_degree() {
        return Err(DsError::NotSquareZeroDifferential(q));
    }
    let offsets = k.offsets();
    let total = k.total_dim();
    let mut parity = Vec::with_capacity(total);
    for (q, &d) in k.dims().iter().enumerate() {
        parity.extend(std::iter::repeat(Parity::from_bit(q as u64)).take(d));
    }
    let mut m = Matrix::zeros(total, total);
    for (q, dq) in k.differentials().iter().enumerate() {
        for r in 0..dq.rows() {
            for c in 0..dq.cols() {
                m[(offsets[q + 1] + r, offsets[q] + c)] = dq[(r, c)];
            }
        }
    }
    let op = SquareZeroOddOperator::new(m, parity.clone())?;
    Ok((SuperVectorSpace::from_parities(parity), op))
}

/// `{"p":3,"parity":[...],"x":[[...],...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub p: u32,
    pub parity: Vec<Parity>,
    pub x: Vec<Vec<u64>>,
}

/// `{"p":3,"parity":[0,0,1],"rows":[[...],...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub p: u32,
    pub parity: Vec<Parity>,
    pub rows: Vec<Vec<u64>>,
}

pub fn matrix_from_rows<const P: u32>(p: u32, rows: &[Vec<u64>]) -> Result<Matrix<Fp<P>>, DsError> {
    if p != P {
        return Err(DsError::FieldMismatch(p, P));
    }
    if let Some(&bad) = rows.iter().flatten().find(|&&v| v >= P as u64) {
        return Err(DsError::Malformed(format!("entry {bad} outside [0, {P})")));
    }
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|&v| Fp::<P>::new(v as i64)).collect())
        .collect();
    Ok(Matrix::from_rows(rows)?)
}

pub fn matrix_to_rows<const P: u32>(m: &Matrix<Fp<P>>) -> Vec<Vec<u64>> {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|v| v.value() as u64).collect())
        .collect()
}

impl ModuleJson {
    pub fn operator<const P: u32>(&self) -> Result<SquareZeroOddOperator<Fp<P>>, DsError> {
        let m = matrix_from_rows::<P>(self.p, &self.x)?;
        if m.rows() != self.parity.len() || m.cols() != self.parity.len() {
            return Err(DsError::Malformed(format!(
                "x is {}x{} but there are {} parities",
                m.rows(),
                m.cols(),
                self.parity.len()
            )));
        }
        SquareZeroOddOperator::new(m, self.parity.clone())
    }

    pub fn from_operator<const P: u32>(x: &SquareZeroOddOperator<Fp<P>>) -> Self {
        ModuleJson {
            p: P,
            parity: x.parity().to_vec(),
            x: matrix_to_rows(x.matrix()),
        }
    }
}

impl MatrixJson {
    pub fn from_matrix<const P: u32>(m: &Matrix<Fp<P>>, parity: Vec<Parity>) -> Self {
        MatrixJson {
            p: P,
            parity,
            rows: matrix_to_rows(m),
        }
    }

    pub fn matrix<const P: u32>(&self) -> Result<Matrix<Fp<P>>, DsError> {
        matrix_from_rows::<P>(self.p, &self.rows)
    }
}

/// Tensor two JSON modules after checking they share the characteristic.
pub fn tensor_json<const P: u32>(
    a: &ModuleJson,
    b: &ModuleJson,
) -> Result<SquareZeroOddOperator<Fp<P>>, DsError> {
    if a.p != b.p {
        return Err(DsError::FieldMismatch(a.p, b.p));
    }
    Ok(tensor_operator(&a.operator::<P>()?, &b.operator::<P>()?))
}
