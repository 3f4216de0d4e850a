//! Sub-ℂ[[b]]-modules of `E[b^{-1}]` in column Hermite form.
//!
//! A lattice is stored in a frame `K`: a coordinate column `X` stands for
//! `b^{-K}X`. Coordinates are known modulo `b^W`, so all computations take
//! place in `(ℂ[b]/b^W)^p`.

use crate::error::{AbError, Result};
use crate::module::{AbModule, Element, SeriesMatrix};
use crate::scalar::Scalar;
use crate::series::{Series, Valuation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    ambient: usize,
    shift: usize,
    prec: usize,
    /// Generator columns; column `c` has pivot `b^{vals[c]}` in row `rows[c]`.
    gens: Vec<Vec<Series>>,
    rows: Vec<usize>,
    vals: Vec<usize>,
    certified: bool,
}

fn pad(s: &Series, w: usize) -> Series {
    if s.precision() >= w {
        s.truncate(w)
    } else {
        s.with_precision(w)
    }
}

/// `col -= q·src`, all at precision `w`.
fn sub_multiple(col: &mut [Series], q: &Series, src: &[Series], w: usize) {
    if q.is_zero() {
        return;
    }
    for (c, s) in col.iter_mut().zip(src) {
        let t = q.mul(&pad(s, w));
        *c = pad(c, w).sub(&t);
    }
}

impl Lattice {
    /// Hermite form of the span of `raw` (columns of length `ambient`) in
    /// frame `shift`, all coordinates taken modulo `b^prec`.
    pub fn normalize(ambient: usize, shift: usize, prec: usize, raw: &[Vec<Series>]) -> Result<Lattice> {
        if raw.iter().flatten().any(|s| s.precision() < prec) {
            return Err(AbError::PrecisionExhausted("generator known below lattice precision".into()));
        }
        let w = prec;
        let mut rest: Vec<Vec<Series>> = raw.iter().map(|c| c.iter().map(|s| s.truncate(w)).collect()).collect();
        let mut done: Vec<Vec<Series>> = Vec::new();
        let mut rows = Vec::new();
        let mut vals = Vec::new();
        for i in 0..ambient {
            let mut best: Option<(usize, usize)> = None;
            for (c, col) in rest.iter().enumerate() {
                if let Valuation::Finite(v) = col[i].valuation() {
                    if best.is_none_or(|(_, bv)| v < bv) {
                        best = Some((c, v));
                    }
                }
            }
            let Some((c, v)) = best else { continue };
            if v + 1 >= w {
                return Err(AbError::PrecisionExhausted(format!(
                    "pivot valuation {v} too close to precision {w}"
                )));
            }
            let mut piv = rest.remove(c);
            let unit = piv[i].shift_down(v).expect("valuation").with_precision(w);
            let uinv = unit.invert()?;
            for s in piv.iter_mut() {
                *s = s.mul(&uinv);
            }
            piv[i] = Series::monomial(Scalar::one(), v, w);
            for col in rest.iter_mut() {
                let q = col[i].shift_down(v).expect("minimal valuation").with_precision(w);
                sub_multiple(col, &q, &piv, w);
                col[i] = Series::zero(w);
            }
            for col in done.iter_mut() {
                let mut hi = col[i].clone();
                for k in 0..v {
                    *hi.coeff_mut(k) = Scalar::zero();
                }
                let q = hi.shift_down(v).expect("cleared").with_precision(w);
                sub_multiple(col, &q, &piv, w);
            }
            done.push(piv);
            rows.push(i);
            vals.push(v);
        }
        let full = rows.len() == ambient;
        let mut lat = Lattice { ambient, shift, prec: w, gens: done, rows, vals, certified: false };
        if full {
            lat.certified = (0..ambient).all(|i| {
                let mut x = vec![Series::zero(w); ambient];
                x[i] = Series::monomial(Scalar::one(), w - 1, w);
                lat.reduce(&x).map(|r| r.iter().all(Series::is_zero)).unwrap_or(false)
            });
        }
        let residual = !rest.is_empty();
        if residual && !lat.certified {
            return Err(AbError::PrecisionExhausted("cannot decide whether generators are redundant".into()));
        }
        Ok(lat)
    }

    /// The lattice `E` itself (frame 0).
    pub fn whole(ambient: usize, prec: usize) -> Lattice {
        let cols: Vec<Vec<Series>> = (0..ambient)
            .map(|j| (0..ambient).map(|i| if i == j { Series::one(prec) } else { Series::zero(prec) }).collect())
            .collect();
        Lattice::normalize(ambient, 0, prec, &cols).expect("identity lattice")
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.ambient
    }

    /// Full rank and equal to the preimage of its reduction, so that the
    /// generators are exact polynomials.
    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub fn pivot_rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn pivot_valuations(&self) -> &[usize] {
        &self.vals
    }

    pub fn generators(&self) -> &[Vec<Series>] {
        &self.gens
    }

    pub fn generator_elements(&self) -> Vec<Element> {
        self.gens.iter().map(|c| Element::new(c.clone(), self.shift)).collect()
    }

    /// Generators as a matrix of columns.
    pub fn matrix(&self) -> SeriesMatrix {
        SeriesMatrix::from_columns(&self.gens, self.ambient)
    }

    /// Minimal valuation over all generator entries.
    pub fn min_entry_valuation(&self) -> usize {
        self.gens
            .iter()
            .flatten()
            .filter_map(|s| match s.valuation() {
                Valuation::Finite(v) => Some(v),
                Valuation::AtLeast(_) => None,
            })
            .min()
            .unwrap_or(self.prec)
    }

    /// Same lattice described in frame `k ≥ shift`.
    pub fn in_frame(&self, k: usize) -> Lattice {
        assert!(k >= self.shift);
        let d = k - self.shift;
        if d == 0 {
            return self.clone();
        }
        Lattice {
            ambient: self.ambient,
            shift: k,
            prec: self.prec + d,
            gens: self.gens.iter().map(|c| c.iter().map(|s| s.shift_up(d)).collect()).collect(),
            rows: self.rows.clone(),
            vals: self.vals.iter().map(|v| v + d).collect(),
            certified: self.certified,
        }
    }

    /// Reduce at a lower precision (re-normalizing).
    pub fn truncate(&self, prec: usize) -> Result<Lattice> {
        if prec >= self.prec {
            return Ok(self.clone());
        }
        Lattice::normalize(self.ambient, self.shift, prec, &self.gens)
    }

    /// Residual of `x` (coordinates in this frame) after reduction by the
    /// pivots, at the common precision.
    fn reduce(&self, x: &[Series]) -> Result<Vec<Series>> {
        let w = x.iter().map(Series::precision).min().unwrap_or(self.prec).min(self.prec);
        let mut r: Vec<Series> = x.iter().map(|s| s.truncate(w)).collect();
        for (c, (&row, &v)) in self.rows.iter().zip(&self.vals).enumerate() {
            match r[row].valuation() {
                Valuation::Finite(u) if u < v => return Ok(r),
                Valuation::Finite(_) => {}
                Valuation::AtLeast(_) => continue,
            }
            let q = r[row].shift_down(v).expect("valuation checked").with_precision(w);
            sub_multiple(&mut r, &q, &self.gens[c], w);
        }
        Ok(r)
    }

    /// Membership of `b^{-shift}·x` given by coordinates in frame `shift`.
    pub fn contains_coords(&self, x: &[Series], shift: usize) -> Result<bool> {
        let k = self.shift.max(shift);
        let lat = self.in_frame(k);
        let xs: Vec<Series> = x.iter().map(|s| s.shift_up(k - shift)).collect();
        Ok(lat.reduce(&xs)?.iter().all(Series::is_zero))
    }

    pub fn contains(&self, x: &Element) -> Result<bool> {
        self.contains_coords(&x.coords, x.shift)
    }

    pub fn contains_lattice(&self, o: &Lattice) -> Result<bool> {
        for g in &o.gens {
            if !self.contains_coords(g, o.shift)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `L1 + L2`, in the larger frame and the smaller common precision.
    pub fn sum(&self, o: &Lattice) -> Result<Lattice> {
        let k = self.shift.max(o.shift);
        let a = self.in_frame(k);
        let b = o.in_frame(k);
        let w = a.prec.min(b.prec);
        let mut gens: Vec<Vec<Series>> = a.gens.iter().map(|c| c.iter().map(|s| s.truncate(w)).collect()).collect();
        gens.extend(b.gens.iter().map(|c| c.iter().map(|s| s.truncate(w)).collect::<Vec<_>>()));
        Lattice::normalize(self.ambient, k, w, &gens)
    }

    pub fn equals(&self, o: &Lattice) -> Result<bool> {
        Ok(self.contains_lattice(o)? && o.contains_lattice(self)?)
    }

    /// `dim_ℂ(self / small)` for nested full-rank lattices.
    pub fn quotient_dim(&self, small: &Lattice) -> Result<usize> {
        if !self.is_full_rank() || !small.is_full_rank() {
            return Err(AbError::BadParameter("quotient dimension needs full-rank lattices".into()));
        }
        if !self.contains_lattice(small)? {
            return Err(AbError::NotContained);
        }
        let k = self.shift.max(small.shift);
        let big: usize = self.in_frame(k).vals.iter().sum();
        let sm: usize = small.in_frame(k).vals.iter().sum();
        Ok(sm - big)
    }

    /// Least `m ≥ 0` with `self ⊆ b^{-m} E`.
    pub fn index_over_whole(&self) -> usize {
        self.shift.saturating_sub(self.min_entry_valuation())
    }
}

/// The structure matrix of `a` in the Hermite basis of a full-rank,
/// `a`-stable lattice.
pub fn module_on_lattice(e: &AbModule, l: &Lattice) -> Result<AbModule> {
    if !l.is_certified() {
        return Err(AbError::PrecisionExhausted("lattice not determined at this precision".into()));
    }
    let p = e.rank();
    let w = e.precision().max(l.precision());
    // Hermite columns are exact polynomials, lower triangular with pivot b^{v_i} at (i, i).
    let g = SeriesMatrix::from_columns(
        &l.generators().iter().map(|c| c.iter().map(|s| s.with_precision(w)).collect()).collect::<Vec<_>>(),
        p,
    );
    let y = e.a_on_coords(&g, l.shift());
    let mut n: Vec<Vec<Series>> = vec![Vec::new(); p];
    for i in 0..p {
        let v = l.pivot_valuations()[i];
        let mut row = Vec::with_capacity(p);
        for k in 0..p {
            let mut acc = y.entry(i, k);
            for (j, nj) in n.iter().enumerate().take(i) {
                let gij = g.entry(i, j);
                if !gij.is_zero() {
                    acc = acc.sub(&gij.mul(&nj[k]));
                }
            }
            if acc.precision() <= v {
                return Err(AbError::PrecisionExhausted("lattice basis change consumed the precision".into()));
            }
            match acc.shift_down(v) {
                Some(q) => row.push(q),
                None => return Err(AbError::NotAStable),
            }
        }
        n[i] = row;
    }
    let prec = n.iter().flatten().map(Series::precision).min().unwrap_or(0);
    if prec == 0 {
        return Err(AbError::PrecisionExhausted("no precision left".into()));
    }
    let rows: Vec<Vec<Series>> = n.into_iter().map(|r| r.into_iter().map(|s| s.truncate(prec)).collect()).collect();
    AbModule::from_entries(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(c: &[i64], w: usize) -> Series {
        Series::from_ints(c, w)
    }

    fn col(entries: &[&[i64]], w: usize) -> Vec<Series> {
        entries.iter().map(|c| ints(c, w)).collect()
    }

    #[test]
    fn normalize_examples() {
        let w = 6;
        let l = Lattice::normalize(1, 0, w, &[col(&[&[0, 1]], w), col(&[&[1]], w)]).unwrap();
        assert_eq!(l.pivot_valuations(), &[0]);
        let l = Lattice::normalize(2, 0, w, &[col(&[&[1], &[0, 1]], w), col(&[&[0], &[0, 1]], w)]).unwrap();
        assert_eq!(l.pivot_rows(), &[0, 1]);
        assert_eq!(l.pivot_valuations(), &[0, 1]);
        let err = Lattice::normalize(1, 0, 2, &[col(&[&[0, 0, 0, 1]], 2)]);
        assert!(matches!(err, Err(AbError::PrecisionExhausted(_))));
    }

    #[test]
    fn containment_and_equality() {
        let w = 6;
        let l = Lattice::normalize(1, 0, w, &[col(&[&[0, 1]], w)]).unwrap();
        assert!(l.contains_coords(&col(&[&[0, 0, 1]], w), 0).unwrap());
        assert!(!l.contains_coords(&col(&[&[1]], w), 0).unwrap());
        let a = Lattice::normalize(2, 0, w, &[col(&[&[1], &[2, 1]], w), col(&[&[0, 1], &[0]], w)]).unwrap();
        let b = Lattice::normalize(2, 0, w, &[col(&[&[0, 1], &[0]], w), col(&[&[1], &[2, 1]], w)]).unwrap();
        assert_eq!(a, b);
        assert!(a.equals(&b).unwrap());
        let whole = Lattice::whole(1, w);
        assert!(!whole.equals(&l).unwrap());
        assert_eq!(whole.quotient_dim(&Lattice::normalize(1, 0, w, &[col(&[&[0, 0, 1]], w)]).unwrap()).unwrap(), 2);
    }

    #[test]
    fn sums_of_lattices() {
        let w = 6;
        let l1 = Lattice::normalize(2, 0, w, &[col(&[&[0, 1], &[0]], w)]).unwrap();
        let l2 = Lattice::normalize(2, 0, w, &[col(&[&[0], &[0, 1]], w)]).unwrap();
        let s = l1.sum(&l2).unwrap();
        assert_eq!(s.pivot_valuations(), &[1, 1]);
        assert_eq!(s.sum(&s).unwrap(), s);
    }

    #[test]
    fn lattice_b_times_e_gives_twist() {
        let w = 6;
        let e = AbModule::from_entries(&[vec![ints(&[0, 3], w)]]).unwrap();
        let l = Lattice::normalize(1, 0, w, &[col(&[&[0, 1]], w)]).unwrap();
        let m = module_on_lattice(&e, &l).unwrap();
        assert_eq!(m.entry(0, 0).coeff(1), &Scalar::from_int(4));
    }
}
