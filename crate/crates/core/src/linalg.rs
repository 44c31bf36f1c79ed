//! Dense linear algebra over GF(q).

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement};

/// Row-major matrix over a shared field.
#[derive(Clone, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
    field: Arc<Field>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.field.q() == other.field.q()
            && self.field.modulus() == other.field.modulus()
            && self.data == other.data
    }
}

impl Eq for Matrix {}

/// Output of [`Matrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// `dst += factor * src`
#[inline]
fn axpy(field: &Field, dst: &mut [FieldElement], src: &[FieldElement], factor: FieldElement) {
    if factor.is_zero() {
        return;
    }
    for (d, &s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d = field.add(*d, field.mul(factor, s));
        }
    }
}

impl Matrix {
    pub fn new(field: Arc<Field>, rows: usize, cols: usize, data: Vec<FieldElement>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| x.index() >= field.q()) {
            return Err(Error::ElementOutOfRange(bad.index()));
        }
        Ok(Matrix {
            rows,
            cols,
            data,
            field,
        })
    }

    pub fn zeros(field: Arc<Field>, rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
            field,
        }
    }

    pub fn identity(field: Arc<Field>, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = FieldElement::ONE;
        }
        m
    }

    pub fn from_rows(field: Arc<Field>, cols: usize, rows: &[Vec<FieldElement>]) -> Result<Matrix> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row of length {} (expected {cols})",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Matrix::new(field, rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field.clone(), self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    /// `M v`
    pub fn mul_vec(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r).iter().zip(v).fold(FieldElement::ZERO, |acc, (&a, &b)| {
                    self.field.add(acc, self.field.mul(a, b))
                })
            })
            .collect()
    }

    /// `v^t M`
    pub fn vec_mul(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![FieldElement::ZERO; self.cols];
        for (r, &coef) in v.iter().enumerate() {
            axpy(&self.field, &mut out, self.row(r), coef);
        }
        out
    }

    fn check_rowset(&self, rowset: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.rows];
        for &i in rowset {
            if i >= self.rows {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    bound: self.rows,
                });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::DuplicateIndex(i));
            }
        }
        Ok(())
    }

    /// Submatrix on the given rows, in the given order.
    pub fn select_rows(&self, rowset: &[usize]) -> Result<Matrix> {
        if let Some(&bad) = rowset.iter().find(|&&i| i >= self.rows) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                bound: self.rows,
            });
        }
        let mut data = Vec::with_capacity(rowset.len() * self.cols);
        for &i in rowset {
            data.extend_from_slice(self.row(i));
        }
        Ok(Matrix {
            rows: rowset.len(),
            cols: self.cols,
            data,
            field: self.field.clone(),
        })
    }

    /// Reduced row echelon form by Gauss-Jordan elimination, taking the first
    /// nonzero entry of each column as pivot.
    pub fn rref(&self) -> Rref {
        let field = &*self.field;
        let mut m = self.clone();
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..cols {
            if rank == m.rows {
                break;
            }
            let Some(pr) = (rank..m.rows).find(|&r| !m.data[r * cols + c].is_zero()) else {
                continue;
            };
            if pr != rank {
                for k in 0..cols {
                    m.data.swap(pr * cols + k, rank * cols + k);
                }
            }
            let inv = field.inv(m.data[rank * cols + c]).unwrap();
            for k in 0..cols {
                let x = m.data[rank * cols + k];
                m.data[rank * cols + k] = field.mul(x, inv);
            }
            let pivot_row: Vec<FieldElement> = m.row(rank).to_vec();
            for r in 0..m.rows {
                if r == rank {
                    continue;
                }
                let f = m.data[r * cols + c];
                if !f.is_zero() {
                    axpy(field, &mut m.data[r * cols..(r + 1) * cols], &pivot_row, field.neg(f));
                }
            }
            pivots.push(c);
            rank += 1;
        }
        Rref {
            matrix: m,
            rank,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        let mut basis = EchelonBasis::new(&self.field, self.cols);
        for r in 0..self.rows {
            basis.insert(self.row(r));
            if basis.rank() == self.cols {
                break;
            }
        }
        basis.rank()
    }

    /// Basis of the right null space: one vector per free column, with that
    /// free variable set to 1 and the others to 0.
    pub fn kernel(&self) -> Vec<Vec<FieldElement>> {
        let Rref { matrix: r, pivots, .. } = self.rref();
        let field = &*self.field;
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![FieldElement::ZERO; self.cols];
                v[free] = FieldElement::ONE;
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = field.neg(r.get(i, free));
                }
                v
            })
            .collect()
    }

    /// Basis of the left null space `{ y : y^t M = 0 }`.
    pub fn left_kernel(&self) -> Vec<Vec<FieldElement>> {
        self.transpose().kernel()
    }

    /// Rank of the submatrix on `rowset`.
    pub fn rank_of_subset(&self, rowset: &[usize]) -> Result<usize> {
        self.check_rowset(rowset)?;
        let mut basis = EchelonBasis::new(&self.field, self.cols);
        for &i in rowset {
            basis.insert(self.row(i));
        }
        Ok(basis.rank())
    }

    /// CSV export: a header line `p=..,e=..,rows=..,cols=..`, then one row
    /// per line with canonical element indices.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "p={},e={},rows={},cols={}\n",
            self.field.p(),
            self.field.e(),
            self.rows,
            self.cols
        );
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|x| x.index().to_string()).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    /// Parses the format written by [`Matrix::to_csv`].
    pub fn from_csv(text: &str) -> Result<Matrix> {
        let bad = |msg: &str| Error::InvalidArgument(format!("matrix csv: {msg}"));
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty input"))?;
        let mut vals = [0u64; 4];
        for (slot, (part, key)) in vals.iter_mut().zip(header.split(',').zip(["p", "e", "rows", "cols"])) {
            let (k, v) = part.split_once('=').ok_or_else(|| bad("malformed header"))?;
            if k.trim() != key {
                return Err(bad("malformed header"));
            }
            *slot = v.trim().parse().map_err(|_| bad("malformed header"))?;
        }
        let field = Arc::new(Field::new(vals[0] as u32, vals[1] as u32)?);
        let (rows, cols) = (vals[2] as usize, vals[3] as usize);
        let mut data = Vec::with_capacity(rows * cols);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            for tok in line.split(',') {
                let idx: u32 = tok.trim().parse().map_err(|_| bad("bad entry"))?;
                data.push(field.element(idx)?);
            }
        }
        Matrix::new(field, rows, cols, data)
    }
}

/// Incrementally built row-echelon basis, used for span membership tests.
///
/// Each stored row has a leading 1 at its pivot and zeros at the pivots of
/// all rows stored before it.
#[derive(Clone, Debug)]
pub struct EchelonBasis<'a> {
    field: &'a Field,
    cols: usize,
    rows: Vec<Vec<FieldElement>>,
    pivots: Vec<usize>,
}

impl<'a> EchelonBasis<'a> {
    pub fn new(field: &'a Field, cols: usize) -> Self {
        EchelonBasis {
            field,
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &mut [FieldElement]) {
        debug_assert_eq!(v.len(), self.cols);
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = v[p];
            if !f.is_zero() {
                axpy(self.field, v, row, self.field.neg(f));
            }
        }
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| x.is_zero())
    }

    /// Adds `v` if it is independent of the current rows; returns whether it was.
    pub fn insert(&mut self, v: &[FieldElement]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = self.field.inv(w[p]).unwrap();
        for x in w.iter_mut() {
            *x = self.field.mul(*x, inv);
        }
        self.rows.push(w);
        self.pivots.push(p);
        true
    }

    /// Drops rows added after the first `n`.
    pub fn truncate(&mut self, n: usize) {
        self.rows.truncate(n);
        self.pivots.truncate(n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(q: u64) -> Arc<Field> {
        Arc::new(Field::with_order(q).unwrap())
    }

    fn matrix(f: &Arc<Field>, rows: usize, cols: usize, vals: &[u32]) -> Matrix {
        let data = vals.iter().map(|&v| f.element(v).unwrap()).collect();
        Matrix::new(f.clone(), rows, cols, data).unwrap()
    }

    fn vandermonde_gf7() -> Matrix {
        let f = gf(7);
        let mut vals = Vec::new();
        for t in [1u32, 3, 2, 6] {
            vals.extend([1, t, t * t % 7]);
        }
        matrix(&f, 4, 3, &vals)
    }

    #[test]
    fn identity_and_zero() {
        let f = gf(7);
        let id = Matrix::identity(f.clone(), 3).rref();
        assert_eq!(id.rank, 3);
        assert_eq!(id.pivots, vec![0, 1, 2]);
        let z = Matrix::zeros(f, 2, 5).rref();
        assert_eq!(z.rank, 0);
        assert!(z.pivots.is_empty());
    }

    #[test]
    fn vandermonde_rank() {
        let v = vandermonde_gf7();
        assert_eq!(v.rref().rank, 3);
        assert_eq!(v.rank_of_subset(&[]).unwrap(), 0);
        for skip in 0..4 {
            let rows: Vec<usize> = (0..4).filter(|&r| r != skip).collect();
            assert_eq!(v.rank_of_subset(&rows).unwrap(), 3);
        }
        assert_eq!(v.rank_of_subset(&[0, 1, 2, 3]).unwrap(), 3);
    }

    #[test]
    fn rank_of_subset_errors() {
        let v = vandermonde_gf7();
        assert_eq!(
            v.rank_of_subset(&[0, 4]),
            Err(Error::IndexOutOfRange { index: 4, bound: 4 })
        );
        assert_eq!(v.rank_of_subset(&[1, 1]), Err(Error::DuplicateIndex(1)));
    }

    #[test]
    fn kernels() {
        let f = gf(7);
        assert!(Matrix::identity(f, 3).kernel().is_empty());
        let f5 = gf(5);
        assert_eq!(Matrix::zeros(f5, 2, 3).kernel().len(), 3);
        let f3 = gf(3);
        let m = matrix(&f3, 1, 2, &[1, 1]);
        let k = m.kernel();
        assert_eq!(k, vec![vec![f3.element(2).unwrap(), FieldElement::ONE]]);
    }

    #[test]
    fn rank_transpose_exhaustive_small() {
        for q in [2u64, 3] {
            let f = gf(q);
            let total = q.pow(9);
            for n in 0..total {
                let mut vals = [0u32; 9];
                let mut rest = n;
                for v in vals.iter_mut() {
                    *v = (rest % q) as u32;
                    rest /= q;
                }
                let m = matrix(&f, 3, 3, &vals);
                let r = m.rref().rank;
                assert_eq!(r, m.transpose().rref().rank);
                assert_eq!(r, m.rank());
            }
        }
    }

    #[test]
    fn csv_header() {
        let v = vandermonde_gf7();
        let csv = v.to_csv();
        assert!(csv.starts_with("p=7,e=1,rows=4,cols=3\n1,1,1\n"));
    }

    fn arb_matrix() -> impl Strategy<Value = Matrix> {
        (prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9]), 1usize..7, 1usize..7).prop_flat_map(|(q, r, c)| {
            prop::collection::vec(0..q as u32, r * c).prop_map(move |vals| {
                let f = gf(q);
                matrix(&f, r, c, &vals)
            })
        })
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_null(m in arb_matrix()) {
            let rr = m.rref();
            let k = m.kernel();
            prop_assert_eq!(rr.rank + k.len(), m.cols());
            for v in &k {
                prop_assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
            }
            // kernel basis is independent
            let kbasis = Matrix::from_rows(m.field().clone(), m.cols(), &k).unwrap();
            prop_assert_eq!(kbasis.rank(), k.len());
        }

        #[test]
        fn rref_idempotent_and_sorted(m in arb_matrix()) {
            let rr = m.rref();
            prop_assert!(rr.pivots.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(rr.pivots.len(), rr.rank);
            let again = rr.matrix.rref();
            prop_assert_eq!(&again.matrix, &rr.matrix);
            prop_assert_eq!(rr.rank, m.transpose().rank());
        }

        #[test]
        fn csv_round_trip(m in arb_matrix()) {
            prop_assert_eq!(Matrix::from_csv(&m.to_csv()).unwrap(), m);
        }
    }
}
