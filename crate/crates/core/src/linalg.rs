//! Exact linear algebra over ℚ(i): dense matrices, subspaces and a sparse
//! row reducer for the large systems arising from isomorphism problems.

use std::collections::HashMap;
use std::fmt;

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn scalar_identity(n: usize, c: &Scalar) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect())
    }

    pub fn from_columns(cols: &[Vec<Scalar>], rows: usize) -> Self {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        self.map(|x| x * c)
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add_assign(&mut self, o: &Matrix) {
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            *a += b;
        }
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self) -> Scalar {
        let mut t = Scalar::zero();
        for i in 0..self.rows.min(self.cols) {
            t += &self[(i, i)];
        }
        t
    }

    /// Sub-matrix with the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv().expect("nonzero pivot");
            for j in c..m.cols {
                if !m[(r, j)].is_zero() {
                    m[(r, j)] = &m[(r, j)] * &inv;
                }
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if !m[(r, j)].is_zero() {
                        let d = &f * &m[(r, j)];
                        m[(i, j)] -= &d;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
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
        self.rref().1.len()
    }

    /// Basis of the right kernel `{x : A x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Scalar::zero(); self.cols];
            v[f] = Scalar::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -&r[(row, f)];
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of `A x = rhs`, or `None` when inconsistent.
    pub fn solve(&self, rhs: &[Scalar]) -> Option<Vec<Scalar>> {
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = rhs[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    pub fn det(&self) -> Scalar {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else { return Scalar::zero() };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = &det * &piv;
            let inv = piv.inv().expect("nonzero pivot");
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] * &inv;
                for j in c..n {
                    if !m[(c, j)].is_zero() {
                        let d = &f * &m[(c, j)];
                        m[(i, j)] -= &d;
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Scalar::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let idx: Vec<usize> = (0..n).collect();
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(r.select(&idx, &cols))
    }

    /// Characteristic polynomial `det(x·I − A)` by Berkowitz's division-free
    /// recursion. Coefficients are returned in ascending degree, monic.
    pub fn charpoly(&self) -> Vec<Scalar> {
        assert!(self.is_square());
        let n = self.rows;
        // p holds descending coefficients of the charpoly of the leading r×r block.
        let mut p = vec![Scalar::one()];
        for r in 1..=n {
            let a_rr = &self[(r - 1, r - 1)];
            let idx: Vec<usize> = (0..r - 1).collect();
            let row_r: Vec<Scalar> = idx.iter().map(|&j| self[(r - 1, j)].clone()).collect();
            let mut col: Vec<Scalar> = idx.iter().map(|&i| self[(i, r - 1)].clone()).collect();
            let sub = self.select(&idx, &idx);
            // t = [1, -a_rr, -R C, -R A C, ..., -R A^{r-2} C]
            let mut t = vec![Scalar::one(), -a_rr];
            for _ in 0..r.saturating_sub(1) {
                let mut dot = Scalar::zero();
                for (x, y) in row_r.iter().zip(&col) {
                    if !x.is_zero() && !y.is_zero() {
                        dot += &(x * y);
                    }
                }
                t.push(-dot);
                col = sub.mul_vec(&col);
            }
            let mut q = vec![Scalar::zero(); r + 1];
            for (i, qi) in q.iter_mut().enumerate() {
                for (j, pj) in p.iter().enumerate() {
                    if i >= j && !pj.is_zero() && !t[i - j].is_zero() {
                        *qi += &(&t[i - j] * pj);
                    }
                }
            }
            p = q;
        }
        p.reverse();
        p
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// A linear subspace of `K^n`, stored as reduced row echelon basis rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    n: usize,
    basis: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace { n, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Subspace::span(n, (0..n).map(|i| unit(n, i)).collect())
    }

    pub fn span(n: usize, vectors: Vec<Vec<Scalar>>) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(n);
        }
        let (r, pivots) = Matrix::from_rows(vectors).rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { n, basis, pivots }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (x, y) in w.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &(&f * y);
                }
            }
        }
        w.iter().all(Scalar::is_zero)
    }

    pub fn contains_space(&self, o: &Subspace) -> bool {
        o.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, o: &Subspace) -> Subspace {
        let mut v = self.basis.clone();
        v.extend(o.basis.iter().cloned());
        Subspace::span(self.n, v)
    }

    pub fn intersect(&self, o: &Subspace) -> Subspace {
        // x = Σ a_i u_i = Σ c_j w_j  ⇔  [U | -W] (a, c) = 0
        let k1 = self.dim();
        let k2 = o.dim();
        if k1 == 0 || k2 == 0 {
            return Subspace::zero(self.n);
        }
        let mut m = Matrix::zeros(self.n, k1 + k2);
        for (j, u) in self.basis.iter().enumerate() {
            for i in 0..self.n {
                m[(i, j)] = u[i].clone();
            }
        }
        for (j, w) in o.basis.iter().enumerate() {
            for i in 0..self.n {
                m[(i, k1 + j)] = -&w[i];
            }
        }
        let vecs = m
            .kernel()
            .into_iter()
            .map(|coef| {
                let mut x = vec![Scalar::zero(); self.n];
                for (a, u) in coef[..k1].iter().zip(&self.basis) {
                    if !a.is_zero() {
                        for (xi, ui) in x.iter_mut().zip(u) {
                            *xi += &(a * ui);
                        }
                    }
                }
                x
            })
            .collect();
        Subspace::span(self.n, vecs)
    }

    /// `{x ∈ self : A x ∈ target}`.
    pub fn preimage_within(&self, a: &Matrix, target: &Subspace) -> Subspace {
        if self.dim() == 0 {
            return self.clone();
        }
        // Coordinates c with A(Σ c_i u_i) ∈ target: project A u_i onto a complement of target.
        let images: Vec<Vec<Scalar>> = self.basis.iter().map(|u| a.mul_vec(u)).collect();
        let reduced: Vec<Vec<Scalar>> = images.iter().map(|v| target.reduce(v)).collect();
        let m = Matrix::from_columns(&reduced, a.rows());
        let vecs = m
            .kernel()
            .into_iter()
            .map(|coef| {
                let mut x = vec![Scalar::zero(); self.n];
                for (c, u) in coef.iter().zip(&self.basis) {
                    if !c.is_zero() {
                        for (xi, ui) in x.iter_mut().zip(u) {
                            *xi += &(c * ui);
                        }
                    }
                }
                x
            })
            .collect();
        Subspace::span(self.n, vecs)
    }

    /// Canonical remainder of `v` modulo the subspace.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (x, y) in w.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &(&f * y);
                }
            }
        }
        w
    }

    pub fn image(&self, a: &Matrix) -> Subspace {
        Subspace::span(a.rows(), self.basis.iter().map(|u| a.mul_vec(u)).collect())
    }
}

pub fn unit(n: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); n];
    v[i] = Scalar::one();
    v
}

/// Column-space of a matrix as a subspace.
pub fn column_space(a: &Matrix) -> Subspace {
    Subspace::span(a.rows(), (0..a.cols()).map(|j| a.column(j)).collect())
}

/// A sparse row `(column, value)` sorted by column.
pub type SparseRow = Vec<(usize, Scalar)>;

/// Incremental sparse Gaussian elimination. Rows are reduced against the
/// existing pivots on their leading entry only; every stored row starts with
/// a 1 in its pivot column.
#[derive(Clone, Debug, Default)]
pub struct SparseEchelon {
    ncols: usize,
    rows: Vec<SparseRow>,
    pivot_row: HashMap<usize, usize>,
}

fn axpy(target: &SparseRow, f: &Scalar, src: &SparseRow) -> SparseRow {
    // target - f * src
    let mut out = Vec::with_capacity(target.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < src.len() {
        match (target.get(i), src.get(j)) {
            (Some((ci, vi)), Some((cj, vj))) if ci == cj => {
                let v = vi - &(f * vj);
                if !v.is_zero() {
                    out.push((*ci, v));
                }
                i += 1;
                j += 1;
            }
            (Some((ci, vi)), Some((cj, _))) if ci < cj => {
                out.push((*ci, vi.clone()));
                i += 1;
            }
            (Some((ci, vi)), None) => {
                out.push((*ci, vi.clone()));
                i += 1;
            }
            (_, Some((cj, vj))) => {
                out.push((*cj, -(f * vj)));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

impl SparseEchelon {
    pub fn new(ncols: usize) -> Self {
        SparseEchelon { ncols, rows: Vec::new(), pivot_row: HashMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.pivot_row.contains_key(&c)
    }

    /// Add a row; returns `true` if it increased the rank.
    pub fn add_row(&mut self, mut row: SparseRow) -> bool {
        row.retain(|(_, v)| !v.is_zero());
        row.sort_by_key(|(c, _)| *c);
        loop {
            let Some((lead, val)) = row.first().cloned() else { return false };
            match self.pivot_row.get(&lead) {
                Some(&r) => {
                    row = axpy(&row, &val, &self.rows[r]);
                }
                None => {
                    let inv = val.inv().expect("nonzero lead");
                    for (_, v) in row.iter_mut() {
                        *v = &*v * &inv;
                    }
                    self.pivot_row.insert(lead, self.rows.len());
                    self.rows.push(row);
                    return true;
                }
            }
        }
    }

    /// Value of the pivot variables given values for all others, solving
    /// from the largest pivot column downwards.
    fn back_substitute(&self, x: &mut [Scalar]) {
        let mut order: Vec<(usize, usize)> = self.pivot_row.iter().map(|(&c, &r)| (c, r)).collect();
        order.sort_unstable_by_key(|o| std::cmp::Reverse(o.0));
        for (c, r) in order {
            let mut acc = Scalar::zero();
            for (cc, v) in self.rows[r].iter().skip(1) {
                if !x[*cc].is_zero() {
                    acc += &(v * &x[*cc]);
                }
            }
            x[c] = -acc;
        }
    }

    /// Kernel basis of the row system restricted to the first `n` columns.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let n = self.ncols;
        (0..n)
            .filter(|c| !self.is_pivot(*c))
            .map(|f| {
                let mut x = vec![Scalar::zero(); n];
                x[f] = Scalar::one();
                self.back_substitute(&mut x);
                x
            })
            .collect()
    }

    /// Kernel of the system projected onto the columns `from..ncols`:
    /// the values there that extend to a full solution.
    pub fn tail_kernel(&self, from: usize) -> Vec<Vec<Scalar>> {
        let n = self.ncols;
        let mut order: Vec<(usize, usize)> =
            self.pivot_row.iter().filter(|(&c, _)| c >= from).map(|(&c, &r)| (c, r)).collect();
        order.sort_unstable_by_key(|o| std::cmp::Reverse(o.0));
        (from..n)
            .filter(|c| !self.is_pivot(*c))
            .map(|f| {
                let mut x = vec![Scalar::zero(); n - from];
                x[f - from] = Scalar::one();
                for &(c, r) in &order {
                    let mut acc = Scalar::zero();
                    for (cc, v) in self.rows[r].iter().skip(1) {
                        let t = &x[*cc - from];
                        if !t.is_zero() {
                            acc += &(v * t);
                        }
                    }
                    x[c - from] = -acc;
                }
                x
            })
            .collect()
    }

    /// A full solution whose columns `from..ncols` equal `tail` (which must
    /// lie in `tail_kernel(from)`), with the other free columns zero.
    pub fn extend_tail(&self, from: usize, tail: &[Scalar]) -> Vec<Scalar> {
        let mut x = vec![Scalar::zero(); self.ncols];
        x[from..].clone_from_slice(tail);
        self.back_substitute(&mut x);
        x
    }

    pub fn kernel_dim(&self) -> usize {
        self.ncols - self.rank()
    }

    /// Treat column `ncols - 1` as the negated right-hand side: returns
    /// `x` (of length `ncols - 1`) with `Σ row[c] x_c + row[last] = 0`,
    /// i.e. a particular solution with free variables zero, or `None`.
    pub fn particular_with_rhs_column(&self) -> Option<Vec<Scalar>> {
        let last = self.ncols - 1;
        if self.is_pivot(last) {
            return None;
        }
        let mut x = vec![Scalar::zero(); self.ncols];
        x[last] = Scalar::one();
        self.back_substitute(&mut x);
        x.pop();
        Some(x)
    }

    /// Kernel basis restricted to the unknowns `0..ncols-1` when the last
    /// column is a right-hand side.
    pub fn homogeneous_kernel_with_rhs_column(&self) -> Vec<Vec<Scalar>> {
        let last = self.ncols - 1;
        (0..last)
            .filter(|c| !self.is_pivot(*c))
            .map(|f| {
                let mut x = vec![Scalar::zero(); self.ncols];
                x[f] = Scalar::one();
                self.back_substitute(&mut x);
                x.pop();
                x
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn rank_kernel_solve() {
        let a = Matrix::from_int_rows(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        assert!(a.mul_vec(&k[0]).iter().all(Scalar::is_zero));
        let x = a.solve(&[q(6), q(12), q(2)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![q(6), q(12), q(2)]);
        assert!(a.solve(&[q(1), q(0), q(0)]).is_none());
    }

    #[test]
    fn det_inverse_charpoly() {
        let a = Matrix::from_int_rows(&[&[2, 1], &[1, 3]]);
        assert_eq!(a.det(), q(5));
        assert_eq!(a.mul(&a.inverse().unwrap()), Matrix::identity(2));
        // x^2 - 5x + 5
        assert_eq!(a.charpoly(), vec![q(5), q(-5), q(1)]);
        let b = Matrix::from_int_rows(&[&[0, 1, 0], &[0, 0, 1], &[6, -11, 6]]);
        assert_eq!(b.charpoly(), vec![q(-6), q(11), q(-6), q(1)]);
    }

    #[test]
    fn sparse_matches_dense_kernel() {
        let a = Matrix::from_int_rows(&[&[1, 2, 0, -1], &[0, 1, 1, 1], &[1, 3, 1, 0]]);
        let mut s = SparseEchelon::new(4);
        for i in 0..3 {
            s.add_row(a.row(i).iter().cloned().enumerate().collect());
        }
        assert_eq!(s.rank(), a.rank());
        for v in s.kernel() {
            assert!(a.mul_vec(&v).iter().all(Scalar::is_zero));
        }
        assert_eq!(s.kernel().len(), a.kernel().len());
    }

    #[test]
    fn subspace_operations() {
        let u = Subspace::span(3, vec![vec![q(1), q(0), q(0)], vec![q(0), q(1), q(0)]]);
        let w = Subspace::span(3, vec![vec![q(0), q(1), q(1)], vec![q(1), q(0), q(0)]]);
        assert_eq!(u.intersect(&w).dim(), 1);
        assert!(u.intersect(&w).contains(&[q(1), q(0), q(0)]));
        assert_eq!(u.sum(&w).dim(), 3);
    }
}
