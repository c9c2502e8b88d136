//! Lie superalgebras from faithful matrix realizations: gl(m|n), q(n), centralizers and DS quotients.

use thiserror::Error;

use crate::field::Scalar;
use crate::linalg::{
    is_zero_vec, quotient_with_section, LinalgError, Matrix, Parity, Quotient, Subspace,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LieError {
    #[error("element is not square-zero odd")]
    NotSquareZero,
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("unknown basis label {0}")]
    UnknownLabel(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Homogeneous basis with structure constants `[b_a, b_b] = Σ_c c[a][b][c] b_c`.
#[derive(Clone, Debug)]
pub struct LieSuperAlgebra<F> {
    labels: Vec<String>,
    parity: Vec<Parity>,
    matrices: Vec<Matrix<F>>,
    structure: Vec<Vec<Vec<F>>>,
}

fn super_commutator<F: Scalar>(a: &Matrix<F>, pa: Parity, b: &Matrix<F>, pb: Parity) -> Matrix<F> {
    let ab = a * b;
    let ba = b * a;
    if pa.is_odd() && pb.is_odd() {
        &ab + &ba
    } else {
        &ab - &ba
    }
}

fn flatten<F: Scalar>(m: &Matrix<F>) -> Vec<F> {
    m.to_rows().into_iter().flatten().collect()
}

impl<F: Scalar> LieSuperAlgebra<F> {
    /// Structure constants from the supercommutator of the given linearly independent matrices.
    pub fn from_matrices(
        labels: Vec<String>,
        parity: Vec<Parity>,
        matrices: Vec<Matrix<F>>,
    ) -> Result<Self, LieError> {
        let n = matrices.len();
        if labels.len() != n || parity.len() != n {
            return Err(LieError::BadShape(
                "labels, parities and matrices differ in number".into(),
            ));
        }
        let cols: Vec<Vec<F>> = matrices.iter().map(flatten).collect();
        let len = cols.first().map_or(0, Vec::len);
        let embed = Matrix::from_columns(len, &cols);
        if embed.rank() != n {
            return Err(LieError::BadShape(
                "basis matrices are linearly dependent".into(),
            ));
        }
        let mut structure = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for b in 0..n {
                let br = super_commutator(&matrices[a], parity[a], &matrices[b], parity[b]);
                structure[a][b] = embed.solve(&flatten(&br)).ok_or_else(|| {
                    LieError::BadShape(format!("[{}, {}] leaves the span", labels[a], labels[b]))
                })?;
            }
        }
        Ok(LieSuperAlgebra {
            labels,
            parity,
            matrices,
            structure,
        })
    }

    /// gl(m|n) in the basis `e_ab = (−1)^{(|a|+|b|)|a|} E_ab`, row-major, labelled `e{a},{b}`.
    pub fn gl(m: usize, n: usize) -> Self {
        let size = m + n;
        let par = |a: usize| Parity::from_bit((a >= m) as u64);
        let mut labels = Vec::new();
        let mut parity = Vec::new();
        let mut matrices = Vec::new();
        for a in 0..size {
            for b in 0..size {
                let pab = par(a) + par(b);
                let sign = if pab.is_odd() && par(a).is_odd() {
                    -F::one()
                } else {
                    F::one()
                };
                let mut e = Matrix::zeros(size, size);
                e[(a, b)] = sign;
                labels.push(format!("e{},{}", a + 1, b + 1));
                parity.push(pab);
                matrices.push(e);
            }
        }
        Self::from_matrices(labels, parity, matrices).expect("gl basis is valid")
    }

    /// q(n) inside gl(n|n): `e_kl = E_kl + E_{k+n,l+n}`, `e'_kl = E_{k+n,l} + E_{k,l+n}`.
    pub fn q(n: usize) -> Self {
        let mut labels = Vec::new();
        let mut parity = Vec::new();
        let mut matrices = Vec::new();
        for odd in [false, true] {
            for k in 0..n {
                for l in 0..n {
                    let mut e = Matrix::zeros(2 * n, 2 * n);
                    if odd {
                        e[(k + n, l)] = F::one();
                        e[(k, l + n)] = F::one();
                        labels.push(format!("e'{},{}", k + 1, l + 1));
                        parity.push(Parity::Odd);
                    } else {
                        e[(k, l)] = F::one();
                        e[(k + n, l + n)] = F::one();
                        labels.push(format!("e{},{}", k + 1, l + 1));
                        parity.push(Parity::Even);
                    }
                    matrices.push(e);
                }
            }
        }
        Self::from_matrices(labels, parity, matrices).expect("q basis is valid")
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn parity(&self) -> &[Parity] {
        &self.parity
    }

    pub fn matrices(&self) -> &[Matrix<F>] {
        &self.matrices
    }

    pub fn structure(&self) -> &[Vec<Vec<F>>] {
        &self.structure
    }

    /// Basis index for a label; `e13` is accepted as shorthand for `e1,3`.
    pub fn index_of(&self, label: &str) -> Result<usize, LieError> {
        if let Some(i) = self.labels.iter().position(|l| l == label) {
            return Ok(i);
        }
        let head = label.trim_end_matches(|c: char| c.is_ascii_digit());
        let digits = &label[head.len()..];
        if digits.len() == 2 {
            let alt = format!("{head}{},{}", &digits[..1], &digits[1..]);
            if let Some(i) = self.labels.iter().position(|l| *l == alt) {
                return Ok(i);
            }
        }
        Err(LieError::UnknownLabel(label.into()))
    }

    pub fn basis_vector(&self, a: usize) -> Vec<F> {
        let mut v = vec![F::zero(); self.dim()];
        v[a] = F::one();
        v
    }

    /// Bracket of coordinate vectors, each assumed homogeneous.
    pub fn bracket(&self, a: &[F], b: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.dim()];
        for (i, &ca) in a.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (j, &cb) in b.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                for (o, &s) in out.iter_mut().zip(&self.structure[i][j]) {
                    *o += ca * cb * s;
                }
            }
        }
        out
    }

    /// Parity of a coordinate vector, `None` if inhomogeneous or zero.
    pub fn parity_of(&self, v: &[F]) -> Option<Parity> {
        let mut found = None;
        for (c, &p) in v.iter().zip(&self.parity) {
            if !c.is_zero() {
                match found {
                    None => found = Some(p),
                    Some(q) if q != p => return None,
                    _ => {}
                }
            }
        }
        found
    }

    /// Matrix of `ad_x = [x, ·]`.
    pub fn ad(&self, x: &[F]) -> Matrix<F> {
        let cols: Vec<Vec<F>> = (0..self.dim())
            .map(|b| self.bracket(x, &self.basis_vector(b)))
            .collect();
        Matrix::from_columns(self.dim(), &cols)
    }

    pub fn check_antisymmetry(&self) -> bool {
        let n = self.dim();
        (0..n).all(|a| {
            (0..n).all(|b| {
                let sign = if self.parity[a].is_odd() && self.parity[b].is_odd() {
                    F::one()
                } else {
                    -F::one()
                };
                self.structure[a][b]
                    .iter()
                    .zip(&self.structure[b][a])
                    .all(|(&x, &y)| x == sign * y)
            })
        })
    }

    /// `[a,[b,c]] = [[a,b],c] + (−1)^{|a||b|}[b,[a,c]]` on all basis triples.
    pub fn check_jacobi(&self) -> bool {
        let n = self.dim();
        for a in 0..n {
            let ea = self.basis_vector(a);
            for b in 0..n {
                let eb = self.basis_vector(b);
                let ab = self.bracket(&ea, &eb);
                let sign = if self.parity[a].is_odd() && self.parity[b].is_odd() {
                    -F::one()
                } else {
                    F::one()
                };
                for c in 0..n {
                    let ec = self.basis_vector(c);
                    let lhs = self.bracket(&ea, &self.bracket(&eb, &ec));
                    let r1 = self.bracket(&ab, &ec);
                    let r2 = self.bracket(&eb, &self.bracket(&ea, &ec));
                    if lhs
                        .iter()
                        .zip(r1.iter().zip(&r2))
                        .any(|(&l, (&x, &y))| l != x + sign * y)
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_square_zero_odd(&self, x: &[F]) -> bool {
        !is_zero_vec(x)
            && self.parity_of(x) == Some(Parity::Odd)
            && is_zero_vec(&self.bracket(x, x))
    }
}

/// `Cent_g(x)`, `[g,x]` and the quotient `g_x` with its structure constants.
#[derive(Clone, Debug)]
pub struct DsQuotient<F> {
    pub centralizer: Subspace<F>,
    pub bracket_image: Subspace<F>,
    pub quotient: Quotient<F>,
    pub parity: Vec<Parity>,
    /// `[r_a, r_b]` projected to `g_x`, in quotient coordinates.
    pub structure: Vec<Vec<Vec<F>>>,
}

impl<F: Scalar> DsQuotient<F> {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    pub fn sdim(&self) -> crate::SuperDim {
        crate::SuperDim::of(&self.parity)
    }
}

pub fn lie_centralizer_and_bracket<F: Scalar>(
    g: &LieSuperAlgebra<F>,
    x: &[F],
) -> Result<DsQuotient<F>, LieError> {
    if !g.is_square_zero_odd(x) {
        return Err(LieError::NotSquareZero);
    }
    let ad = g.ad(x);
    let n = g.dim();
    let centralizer = Subspace::span(n, &ad.kernel());
    let bracket_image = Subspace::span(n, &ad.transpose().to_rows());
    let quotient = quotient_with_section(&centralizer, &bracket_image)?;
    let reps = quotient.representatives();
    let parity = reps
        .iter()
        .map(|r| {
            g.parity_of(r)
                .expect("echelon representatives are homogeneous")
        })
        .collect();
    let structure = reps
        .iter()
        .map(|a| {
            reps.iter()
                .map(|b| quotient.project(&g.bracket(a, b)))
                .collect()
        })
        .collect();
    Ok(DsQuotient {
        centralizer,
        bracket_image,
        quotient,
        parity,
        structure,
    })
}

/// Bracket in `g_x` computed from arbitrary cocycle representatives; used to test well-definedness.
pub fn quotient_bracket<F: Scalar>(
    g: &LieSuperAlgebra<F>,
    q: &DsQuotient<F>,
    a: &[F],
    b: &[F],
) -> Vec<F> {
    q.quotient.project(&g.bracket(a, b))
}

/// Rank-one `gl(m|n)` comparison: the image of `gl(m−1|n−1)` under index deletion of `i, j`
/// projects isomorphically onto `g_x` and preserves brackets.
pub fn index_deletion_matches<F: Scalar>(
    m: usize,
    n: usize,
    i: usize,
    j: usize,
) -> Result<bool, LieError> {
    if !(1 <= i && i <= m && m < j && j <= m + n) {
        return Err(LieError::BadShape(format!(
            "need 1 <= i <= m < j <= m+n, got i={i}, j={j}"
        )));
    }
    let g = LieSuperAlgebra::<F>::gl(m, n);
    let x = g.basis_vector(g.index_of(&format!("e{i},{j}"))?);
    let q = lie_centralizer_and_bracket(&g, &x)?;
    let small = LieSuperAlgebra::<F>::gl(m - 1, n - 1);
    let keep: Vec<usize> = (1..=m + n).filter(|&k| k != i && k != j).collect();
    let size = m + n - 2;
    let embed = |a: usize| -> Vec<F> {
        let (r, c) = (a / size, a % size);
        g.basis_vector((keep[r] - 1) * (m + n) + keep[c] - 1)
    };
    let images: Vec<Vec<F>> = (0..small.dim()).map(embed).collect();
    if images.iter().any(|v| !q.centralizer.contains(v)) {
        return Ok(false);
    }
    let proj: Vec<Vec<F>> = images.iter().map(|v| q.quotient.project(v)).collect();
    if proj.len() != q.dim() || (q.dim() > 0 && Matrix::from_rows(proj.clone())?.rank() != q.dim())
    {
        return Ok(false);
    }
    for a in 0..small.dim() {
        for b in 0..small.dim() {
            let lhs = q.quotient.project(&g.bracket(&images[a], &images[b]));
            let mut rhs = vec![F::zero(); g.dim()];
            for (c, &s) in small.structure()[a][b].iter().enumerate() {
                for (r, &e) in rhs.iter_mut().zip(&images[c]) {
                    *r += s * e;
                }
            }
            if lhs != q.quotient.project(&rhs) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `x = Σ_k e_{k,n+k}` in gl(n|n).
pub fn max_rank_element<F: Scalar>(g: &LieSuperAlgebra<F>, n: usize) -> Vec<F> {
    let mut x = vec![F::zero(); g.dim()];
    for k in 0..n {
        x[k * 2 * n + n + k] = F::one();
    }
    x
}
