//! Structure matrices, (a,b)-modules and the action of `a` and `b`.

use std::fmt;

use crate::error::{AbError, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::series::{Series, Valuation};

/// A matrix of power series stored by order: `Σ_k C_k b^k + O(b^W)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    coeffs: Vec<Matrix>,
}

impl SeriesMatrix {
    pub fn zeros(rows: usize, cols: usize, prec: usize) -> Self {
        SeriesMatrix { rows, cols, coeffs: vec![Matrix::zeros(rows, cols); prec] }
    }

    pub fn identity(n: usize, prec: usize) -> Self {
        SeriesMatrix::constant(Matrix::identity(n), prec)
    }

    pub fn constant(m: Matrix, prec: usize) -> Self {
        let mut s = SeriesMatrix::zeros(m.rows(), m.cols(), prec);
        if prec > 0 {
            s.coeffs[0] = m;
        }
        s
    }

    /// From coefficient matrices, truncated or zero padded to `prec`.
    pub fn from_coeffs(rows: usize, cols: usize, mut coeffs: Vec<Matrix>, prec: usize) -> Self {
        coeffs.resize(prec, Matrix::zeros(rows, cols));
        SeriesMatrix { rows, cols, coeffs }
    }

    /// From a grid of series; the precision is the minimum over entries.
    pub fn from_entries(entries: &[Vec<Series>]) -> Self {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        let prec = entries.iter().flatten().map(Series::precision).min().unwrap_or(0);
        let mut s = SeriesMatrix::zeros(rows, cols, prec);
        for (i, row) in entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                for k in 0..prec {
                    s.coeffs[k][(i, j)] = e.coeff(k).clone();
                }
            }
        }
        s
    }

    /// Columns given as coordinate vectors.
    pub fn from_columns(columns: &[Vec<Series>], rows: usize) -> Self {
        let prec = columns.iter().flatten().map(Series::precision).min().unwrap_or(0);
        let mut s = SeriesMatrix::zeros(rows, columns.len(), prec);
        for (j, col) in columns.iter().enumerate() {
            for (i, e) in col.iter().enumerate() {
                for k in 0..prec {
                    s.coeffs[k][(i, j)] = e.coeff(k).clone();
                }
            }
        }
        s
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: usize) -> &Matrix {
        &self.coeffs[k]
    }

    pub fn coeff_mut(&mut self, k: usize) -> &mut Matrix {
        &mut self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Matrix] {
        &self.coeffs
    }

    pub fn entry(&self, i: usize, j: usize) -> Series {
        Series::from_coeffs(self.coeffs.iter().map(|c| c[(i, j)].clone()).collect(), self.precision())
    }

    pub fn set_entry(&mut self, i: usize, j: usize, s: &Series) {
        for k in 0..self.precision() {
            self.coeffs[k][(i, j)] = if k < s.precision() { s.coeff(k).clone() } else { Scalar::zero() };
        }
    }

    pub fn column(&self, j: usize) -> Vec<Series> {
        (0..self.rows).map(|i| self.entry(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Series>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn truncate(&self, prec: usize) -> Self {
        let n = prec.min(self.precision());
        SeriesMatrix { rows: self.rows, cols: self.cols, coeffs: self.coeffs[..n].to_vec() }
    }

    /// Pad with zero coefficients; only meaningful for exact polynomials.
    pub fn with_precision(&self, prec: usize) -> Self {
        SeriesMatrix::from_coeffs(self.rows, self.cols, self.coeffs.clone(), prec)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Matrix::is_zero)
    }

    /// Minimal valuation over all entries.
    pub fn valuation(&self) -> Valuation {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(v) => Valuation::Finite(v),
            None => Valuation::AtLeast(self.precision()),
        }
    }

    pub fn add(&self, o: &SeriesMatrix) -> SeriesMatrix {
        let n = self.precision().min(o.precision());
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            coeffs: (0..n).map(|k| self.coeffs[k].add(&o.coeffs[k])).collect(),
        }
    }

    pub fn sub(&self, o: &SeriesMatrix) -> SeriesMatrix {
        let n = self.precision().min(o.precision());
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            coeffs: (0..n).map(|k| self.coeffs[k].sub(&o.coeffs[k])).collect(),
        }
    }

    pub fn neg(&self) -> SeriesMatrix {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> SeriesMatrix {
        SeriesMatrix { rows: self.rows, cols: self.cols, coeffs: self.coeffs.iter().map(|m| m.scale(c)).collect() }
    }

    /// Product at precision `min` of the two precisions.
    pub fn mul(&self, o: &SeriesMatrix) -> SeriesMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let n = self.precision().min(o.precision());
        let mut out = SeriesMatrix::zeros(self.rows, o.cols, n);
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if !o.coeffs[j].is_zero() {
                    let p = self.coeffs[i].mul(&o.coeffs[j]);
                    out.coeffs[i + j].add_assign(&p);
                }
            }
        }
        out
    }

    /// Apply to a column of series.
    pub fn apply(&self, v: &[Series]) -> Vec<Series> {
        let col = SeriesMatrix::from_columns(&[v.to_vec()], self.cols);
        self.mul(&col).column(0)
    }

    /// Multiply by `b^k`; precision grows by `k`.
    pub fn shift_up(&self, k: usize) -> SeriesMatrix {
        let mut coeffs = vec![Matrix::zeros(self.rows, self.cols); k];
        coeffs.extend(self.coeffs.iter().cloned());
        SeriesMatrix { rows: self.rows, cols: self.cols, coeffs }
    }

    /// Divide by `b^k` when the first `k` coefficients vanish.
    pub fn shift_down(&self, k: usize) -> Option<SeriesMatrix> {
        if k > self.precision() || !self.coeffs[..k].iter().all(Matrix::is_zero) {
            return None;
        }
        Some(SeriesMatrix { rows: self.rows, cols: self.cols, coeffs: self.coeffs[k..].to_vec() })
    }

    /// Formal derivative; precision drops by one.
    pub fn derivative(&self) -> SeriesMatrix {
        let coeffs = (1..self.precision()).map(|k| self.coeffs[k].scale(&Scalar::from_int(k as i64))).collect();
        SeriesMatrix { rows: self.rows, cols: self.cols, coeffs }
    }

    /// `b·X′`, exact at the same precision.
    pub fn b_derivative(&self) -> SeriesMatrix {
        let coeffs =
            self.coeffs.iter().enumerate().map(|(k, c)| c.scale(&Scalar::from_int(k as i64))).collect();
        SeriesMatrix { rows: self.rows, cols: self.cols, coeffs }
    }

    /// `b²·X′`, known to precision `W + 1`.
    pub fn b2_derivative(&self) -> SeriesMatrix {
        self.b_derivative().shift_up(1)
    }

    pub fn transpose(&self) -> SeriesMatrix {
        SeriesMatrix { rows: self.cols, cols: self.rows, coeffs: self.coeffs.iter().map(Matrix::transpose).collect() }
    }

    /// Substitute `b → −b`.
    pub fn negate_variable(&self) -> SeriesMatrix {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 1 { c.scale(&Scalar::from_int(-1)) } else { c.clone() })
            .collect();
        SeriesMatrix { rows: self.rows, cols: self.cols, coeffs }
    }

    /// Inverse of a square matrix with invertible constant term.
    pub fn inverse(&self) -> Result<SeriesMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.precision();
        if n == 0 {
            return Ok(self.clone());
        }
        let q0 = self.coeffs[0].inverse().ok_or(AbError::NotAUnit)?;
        let mut q = vec![q0.clone()];
        for k in 1..n {
            let mut acc = Matrix::zeros(self.rows, self.rows);
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc.add_assign(&self.coeffs[j].mul(&q[k - j]));
                }
            }
            q.push(q0.mul(&acc).scale(&Scalar::from_int(-1)));
        }
        Ok(SeriesMatrix { rows: self.rows, cols: self.cols, coeffs: q })
    }

    /// Block diagonal sum.
    pub fn block_diag(&self, o: &SeriesMatrix) -> SeriesMatrix {
        let n = self.precision().min(o.precision());
        let mut out = SeriesMatrix::zeros(self.rows + o.rows, self.cols + o.cols, n);
        for k in 0..n {
            for i in 0..self.rows {
                for j in 0..self.cols {
                    out.coeffs[k][(i, j)] = self.coeffs[k][(i, j)].clone();
                }
            }
            for i in 0..o.rows {
                for j in 0..o.cols {
                    out.coeffs[k][(self.rows + i, self.cols + j)] = o.coeffs[k][(i, j)].clone();
                }
            }
        }
        out
    }
}

impl fmt::Debug for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|j| self.entry(i, j).to_expr()).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "] + O(b^{})", self.precision())
    }
}

/// A free module with basis `e_1..e_p` and `a·e_j = Σ_i M_ij(b) e_i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AbModule {
    m: SeriesMatrix,
}

impl AbModule {
    pub fn new(m: SeriesMatrix) -> Result<Self> {
        if m.rows() != m.cols() || m.rows() == 0 {
            return Err(AbError::BadParameter("structure matrix must be square and nonempty".into()));
        }
        if m.precision() == 0 {
            return Err(AbError::BadParameter("precision must be at least 1".into()));
        }
        Ok(AbModule { m })
    }

    pub fn from_entries(entries: &[Vec<Series>]) -> Result<Self> {
        AbModule::new(SeriesMatrix::from_entries(entries))
    }

    pub fn rank(&self) -> usize {
        self.m.rows()
    }

    pub fn precision(&self) -> usize {
        self.m.precision()
    }

    pub fn matrix(&self) -> &SeriesMatrix {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Series {
        self.m.entry(i, j)
    }

    /// Same module known to a lower precision.
    pub fn truncate(&self, prec: usize) -> AbModule {
        AbModule { m: self.m.truncate(prec.max(1)) }
    }

    /// Zero-pad the structure matrix; valid when it is an exact polynomial.
    pub fn with_precision(&self, prec: usize) -> AbModule {
        AbModule { m: self.m.with_precision(prec) }
    }

    pub fn is_simple_pole(&self) -> bool {
        self.m.coeff(0).is_zero()
    }

    /// Coefficient of `b` in `M`, the matrix of `b^{-1}a` on `E/bE`.
    pub fn residue(&self) -> Result<Matrix> {
        if !self.is_simple_pole() {
            return Err(AbError::NotSimplePole);
        }
        if self.precision() < 2 {
            return Err(AbError::PrecisionExhausted("residue needs precision 2".into()));
        }
        Ok(self.m.coeff(1).clone())
    }

    /// `M X + b² X′ − K b X` for coordinates `X` in frame `K`: the
    /// coordinates of `a(b^{-K} X)` in the same frame.
    pub fn a_on_coords(&self, x: &SeriesMatrix, shift: usize) -> SeriesMatrix {
        let mut y = self.m.mul(x);
        y = y.add(&x.b2_derivative());
        if shift > 0 {
            y = y.sub(&x.shift_up(1).scale(&Scalar::from_int(shift as i64)));
        }
        y
    }

    pub fn apply_a(&self, x: &Element) -> Result<Element> {
        let cols = SeriesMatrix::from_columns(std::slice::from_ref(&x.coords), self.rank());
        let y = self.a_on_coords(&cols, x.shift);
        if y.precision() == 0 {
            return Err(AbError::PrecisionExhausted("a-action lost all precision".into()));
        }
        Ok(Element { coords: y.column(0), shift: x.shift })
    }

    pub fn apply_b(&self, x: &Element) -> Element {
        x.mul_b()
    }

    /// Module in the basis `e′ = e·P`: `M′ = P^{-1}(M P + b² P′)`.
    pub fn base_change(&self, p: &SeriesMatrix) -> Result<AbModule> {
        let w = self.precision().min(p.precision());
        let p = p.truncate(w);
        let pinv = p.inverse()?;
        let mp = self.m.mul(&p).add(&p.b2_derivative());
        AbModule::new(pinv.mul(&mp))
    }

    /// `P M_E − M_F P − b² P′`, zero iff `P` is a morphism `E → F` at the
    /// common precision (columns of `P` are images of the basis of `E`).
    pub fn intertwining_defect(e: &AbModule, f: &AbModule, p: &SeriesMatrix) -> SeriesMatrix {
        p.mul(&e.m).sub(&f.m.mul(p)).sub(&p.b2_derivative())
    }

    pub fn direct_sum(&self, o: &AbModule) -> AbModule {
        AbModule { m: self.m.block_diag(&o.m) }
    }

    pub fn basis_element(&self, i: usize) -> Element {
        let coords = (0..self.rank())
            .map(|k| if k == i { Series::one(self.precision()) } else { Series::zero(self.precision()) })
            .collect();
        Element { coords, shift: 0 }
    }
}

impl fmt::Debug for AbModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AbModule(rank {}, {:?})", self.rank(), self.m)
    }
}

/// The vector `b^{-shift}·coords` of `E[b^{-1}]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Element {
    pub coords: Vec<Series>,
    pub shift: usize,
}

impl Element {
    pub fn new(coords: Vec<Series>, shift: usize) -> Self {
        Element { coords, shift }.canonical()
    }

    pub fn precision(&self) -> usize {
        self.coords.iter().map(Series::precision).min().unwrap_or(0)
    }

    /// Lower the shift while every coordinate is divisible by `b`.
    pub fn canonical(mut self) -> Self {
        while self.shift > 0 {
            let all_div = self.coords.iter().all(|c| c.valuation().bound() >= 1 && c.precision() >= 1);
            if !all_div || self.coords.iter().all(Series::is_zero) {
                break;
            }
            self.coords = self.coords.iter().map(|c| c.shift_down(1).expect("divisible")).collect();
            self.shift -= 1;
        }
        self
    }

    pub fn mul_b(&self) -> Element {
        if self.shift > 0 {
            Element { coords: self.coords.clone(), shift: self.shift - 1 }
        } else {
            Element { coords: self.coords.iter().map(|c| c.shift_up(1).truncate(c.precision())).collect(), shift: 0 }
        }
    }

    /// Coordinates expressed in frame `k ≥ shift` (multiplying by `b^{k-shift}`).
    pub fn in_frame(&self, k: usize) -> Vec<Series> {
        assert!(k >= self.shift);
        self.coords.iter().map(|c| c.shift_up(k - self.shift)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Series::is_zero)
    }
}
