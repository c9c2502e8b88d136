//! Index-sparse semi-echelon forms for large polynomial degree slices.

use std::collections::{BTreeMap, HashMap};

use crate::field::Scalar;

/// Sparse vector as sorted `(index, nonzero coefficient)` pairs.
pub type SparseVec<F> = Vec<(usize, F)>;

pub fn to_sparse<F: Scalar>(dense: &[F]) -> SparseVec<F> {
    dense
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, &c)| (i, c))
        .collect()
}

pub fn to_dense<F: Scalar>(v: &[(usize, F)], dim: usize) -> Vec<F> {
    let mut out = vec![F::zero(); dim];
    for &(i, c) in v {
        out[i] += c;
    }
    out
}

/// Rows with distinct leading indices, each normalized to leading coefficient 1.
///
/// Reduction clears every pivot coordinate, so the normal form of a vector lies in the
/// coordinate complement spanned by the non-pivot indices.
#[derive(Clone, Debug, Default)]
pub struct SparseEchelon<F> {
    rows: Vec<SparseVec<F>>,
    tags: Vec<bool>,
    by_pivot: HashMap<usize, usize>,
}

/// Outcome of reducing a vector: the normal form plus the multiples of tagged rows subtracted.
#[derive(Clone, Debug)]
pub struct Reduction<F> {
    pub remainder: SparseVec<F>,
    pub tagged: Vec<(usize, F)>,
}

impl<F: Scalar> SparseEchelon<F> {
    pub fn new() -> Self {
        SparseEchelon {
            rows: Vec::new(),
            tags: Vec::new(),
            by_pivot: HashMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec<F>] {
        &self.rows
    }

    pub fn pivot(&self, row: usize) -> usize {
        self.rows[row][0].0
    }

    pub fn is_pivot(&self, idx: usize) -> bool {
        self.by_pivot.contains_key(&idx)
    }

    pub fn is_tagged(&self, row: usize) -> bool {
        self.tags[row]
    }

    /// Reduce and record coefficients of tagged rows.
    pub fn reduce_full(&self, v: &[(usize, F)]) -> Reduction<F> {
        let mut work: BTreeMap<usize, F> = BTreeMap::new();
        for &(i, c) in v {
            let e = work.entry(i).or_insert_with(F::zero);
            *e += c;
        }
        work.retain(|_, c| !c.is_zero());
        let mut remainder = Vec::new();
        let mut tagged = Vec::new();
        while let Some((idx, c)) = work.pop_first() {
            match self.by_pivot.get(&idx) {
                None => remainder.push((idx, c)),
                Some(&r) => {
                    if self.tags[r] {
                        tagged.push((r, c));
                    }
                    for &(j, rc) in &self.rows[r][1..] {
                        let e = work.entry(j).or_insert_with(F::zero);
                        *e -= c * rc;
                        if e.is_zero() {
                            work.remove(&j);
                        }
                    }
                }
            }
        }
        Reduction { remainder, tagged }
    }

    pub fn reduce(&self, v: &[(usize, F)]) -> SparseVec<F> {
        self.reduce_full(v).remainder
    }

    pub fn contains(&self, v: &[(usize, F)]) -> bool {
        self.reduce(v).is_empty()
    }

    /// Insert the normal form of `v`; returns the new row index if it was independent.
    pub fn insert(&mut self, v: &[(usize, F)], tag: bool) -> Option<usize> {
        let r = self.reduce(v);
        let (lead, c) = *r.first()?;
        let inv = c.inv().expect("nonzero leading coefficient");
        let row: SparseVec<F> = r.into_iter().map(|(i, x)| (i, x * inv)).collect();
        let id = self.rows.len();
        self.rows.push(row);
        self.tags.push(tag);
        self.by_pivot.insert(lead, id);
        Some(id)
    }

    pub fn extend<'a>(&mut self, vs: impl IntoIterator<Item = &'a SparseVec<F>>, tag: bool) -> usize
    where
        F: 'a,
    {
        vs.into_iter()
            .filter(|v| self.insert(v, tag).is_some())
            .count()
    }
}

/// Rank of a family of sparse vectors.
pub fn sparse_rank<F: Scalar>(vs: &[SparseVec<F>]) -> usize {
    let mut e = SparseEchelon::new();
    e.extend(vs, false)
}
