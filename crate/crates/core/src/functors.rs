//! Duality, twists, internal Hom, Ext dimensions, eigen-elements,
//! Jordan–Hölder sequences and the rank-2 classification.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog;
use crate::error::{AbError, Result};
use crate::invariants::{biggest_simple_pole, n_lambda, saturate, spectrum};
use crate::lattice::Lattice;
use crate::linalg::{Matrix, SparseEchelon};
use crate::module::{AbModule, Element, SeriesMatrix};
use crate::scalar::Scalar;
use crate::series::Series;
use crate::truncation::{module_iso, truncate};

/// `E*` on the dual basis: structure matrix `ᵗM(−b)`.
pub fn dual(e: &AbModule) -> AbModule {
    AbModule::new(e.matrix().transpose().negate_variable()).expect("square")
}

/// `b^m E`: structure matrix `M + m·b·Id`.
pub fn twist(e: &AbModule, m: &Scalar) -> AbModule {
    let p = e.rank();
    let mut mat = e.matrix().clone();
    if mat.precision() > 1 {
        mat.coeff_mut(1).add_assign(&Matrix::scalar_identity(p, m));
    }
    AbModule::new(mat).expect("square")
}

/// Index of the elementary matrix `E_ij` (row `i` in `F`, column `j` in `E`).
pub fn hom_index(p_e: usize, i: usize, j: usize) -> usize {
    i * p_e + j
}

/// `Hom_{a,b}(E, F)`: maps `Φ` (a `p_F × p_E` matrix) with `a` acting by
/// `Λ(Φ) = Φ M_E − M_F Φ − b² Φ′` and `b` acting by `−b`.
pub fn hom_ab(e: &AbModule, f: &AbModule) -> AbModule {
    let pe = e.rank();
    let pf = f.rank();
    let w = e.precision().min(f.precision());
    let n = pe * pf;
    let me = e.matrix();
    let mf = f.matrix();
    let coeffs = (0..w)
        .map(|m| {
            let sign = if m % 2 == 1 { Scalar::from_int(-1) } else { Scalar::one() };
            let ce = me.coeff(m);
            let cf = mf.coeff(m);
            let mut d = Matrix::zeros(n, n);
            for i in 0..pf {
                for j in 0..pe {
                    let col = hom_index(pe, i, j);
                    // E_ij M_E: row i gets row j of M_E.
                    for l in 0..pe {
                        if !ce[(j, l)].is_zero() {
                            d[(hom_index(pe, i, l), col)] += &(&ce[(j, l)] * &sign);
                        }
                    }
                    // −M_F E_ij: column j gets −column i of M_F.
                    for k in 0..pf {
                        if !cf[(k, i)].is_zero() {
                            d[(hom_index(pe, k, j), col)] -= &(&cf[(k, i)] * &sign);
                        }
                    }
                }
            }
            d
        })
        .collect();
    AbModule::new(SeriesMatrix::from_coeffs(n, n, coeffs, w)).expect("square")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtDims {
    pub d0: usize,
    pub d1: usize,
    /// Truncation levels at which both values were observed to agree.
    pub levels: Vec<usize>,
}

/// Rank of `A` on a truncation, computed sparsely.
fn truncated_rank(a: &Matrix) -> SparseEchelon {
    let mut ech = SparseEchelon::new(a.cols());
    for i in 0..a.rows() {
        let row: Vec<(usize, Scalar)> =
            a.row(i).iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(c, v)| (c, v.clone())).collect();
        ech.add_row(row);
    }
    ech
}

/// `(dim ker a, dim coker a)` on a module `H` at truncation level `w`;
/// kernel elements are read modulo `b^w` from the kernel modulo `b^{2w}`.
fn ker_coker_at(h: &AbModule, w: usize) -> Result<(usize, usize)> {
    let q1 = truncate(h, w)?;
    let coker = q1.dim - truncated_rank(&q1.a).rank();
    let q2 = truncate(h, 2 * w)?;
    let ker = truncated_rank(&q2.a).kernel();
    let proj: Vec<Vec<Scalar>> = ker.into_iter().map(|v| v[..q1.dim].to_vec()).collect();
    let d0 = if proj.is_empty() { 0 } else { Matrix::from_rows(proj).rank() };
    Ok((d0, coker))
}

/// Dimensions of `Hom` and `Ext¹` over the algebra, from the kernel and
/// cokernel of `a` on `Hom_{a,b}(E, F)`.
pub fn ext_dims(e: &AbModule, f: &AbModule) -> Result<ExtDims> {
    let h = hom_ab(e, f);
    let n = n_lambda(&h, &Scalar::zero())?;
    let w0 = n + 2;
    let levels = vec![w0, w0 + 1, w0 + 2];
    let mut seen = Vec::new();
    for &w in &levels {
        seen.push(ker_coker_at(&h, w)?);
    }
    if seen.iter().any(|x| *x != seen[0]) {
        return Err(AbError::PrecisionExhausted(format!("Ext dimensions not stable: {seen:?}")));
    }
    Ok(ExtDims { d0: seen[0].0, d1: seen[0].1, levels })
}

/// Exact solution of `(a − λb) ỹ = 0` with `ỹ ≡ y mod b^{κ+1}`, for a
/// simple-pole module and `λ − κ` at most the smallest exponent of its class.
pub fn eigen_lift(e: &AbModule, lambda: &Scalar, y: &Element, kappa: usize) -> Result<Element> {
    if y.shift != 0 {
        return Err(AbError::BadParameter("eigen_lift expects an element of E".into()));
    }
    let r = e.residue()?;
    let spec = spectrum(e)?;
    if let Some(min) = spec
        .iter()
        .filter(|z| z.class_rep() == lambda.class_rep())
        .min_by(|a, b| a.re().cmp(b.re()))
    {
        let gap = lambda - &Scalar::from_int(kappa as i64) - min;
        if gap.re() > &num_rational::BigRational::from_integer(0.into()) {
            return Err(AbError::HypothesisViolated(format!(
                "λ − κ exceeds the smallest exponent {min} of its class"
            )));
        }
    }
    let w = e.precision().min(y.precision());
    let p = e.rank();
    let yv = SeriesMatrix::from_columns(&[y.coords.iter().map(|s| s.truncate(w)).collect()], p);
    let res = e.truncate(w).a_on_coords(&yv, 0).sub(&yv.shift_up(1).truncate(w).scale(lambda));
    let Some(rr) = res.shift_down(kappa + 2) else {
        return Err(AbError::HypothesisViolated("(a − λb)·y is not divisible by b^(κ+2)".into()));
    };
    // (R + n − μ) z_n = −r_n − Σ_{j<n} M_{n−j+1} z_j, μ = λ − κ − 1.
    let mu = lambda - &Scalar::from_int(kappa as i64 + 1);
    let m = e.matrix();
    let count = rr.precision().min(w.saturating_sub(kappa + 1));
    let mut z: Vec<Vec<Scalar>> = Vec::with_capacity(count);
    for n in 0..count {
        let mut rhs: Vec<Scalar> = rr.coeff(n).column(0).iter().map(|c| -c).collect();
        for (j, zj) in z.iter().enumerate() {
            let order = n - j + 1;
            if order < m.precision() {
                let t = m.coeff(order).mul_vec(zj);
                for (a, b) in rhs.iter_mut().zip(t) {
                    *a -= &b;
                }
            }
        }
        let shift = &Scalar::from_int(n as i64) - &mu;
        let op = r.add(&Matrix::scalar_identity(p, &shift));
        let zn = op.solve(&rhs).ok_or_else(|| AbError::HypothesisViolated("singular correction step".into()))?;
        z.push(zn);
    }
    let prec = kappa + 1 + count;
    let coords: Vec<Series> = (0..p)
        .map(|i| {
            let mut s = y.coords[i].truncate(prec.min(w));
            s = s.with_precision(prec);
            for (n, zn) in z.iter().enumerate() {
                *s.coeff_mut(kappa + 1 + n) += &zn[i];
            }
            s
        })
        .collect();
    let out = Element { coords, shift: 0 };
    let check = e.truncate(prec).apply_a(&out)?;
    let ok = check.coords.iter().zip(&out.coords).all(|(ax, x)| ax.sub(&x.shift_up(1).truncate(prec).scale(lambda)).is_zero());
    if !ok {
        return Err(AbError::HypothesisViolated("lifted element is not an eigen-element".into()));
    }
    Ok(out)
}

/// Exponent `λ` with `a·x = λ·b·x`, for a primitive eigen-element `x`.
pub fn eigen_exponent(e: &AbModule, x: &Element) -> Result<(Scalar, usize)> {
    if x.shift != 0 {
        return Err(AbError::NotPrimitive);
    }
    let i0 = x.coords.iter().position(|s| !s.coeff(0).is_zero()).ok_or(AbError::NotPrimitive)?;
    let ax = e.apply_a(x)?;
    let w = ax.precision().min(x.precision());
    if w < 2 || !ax.coords[i0].coeff(0).is_zero() {
        return Err(AbError::NotEigen);
    }
    let lambda = ax.coords[i0].coeff(1) / x.coords[i0].coeff(0);
    for (a, c) in ax.coords.iter().zip(&x.coords) {
        let d = a.truncate(w).sub(&c.shift_up(1).truncate(w).scale(&lambda));
        if !d.is_zero() {
            return Err(AbError::NotEigen);
        }
    }
    Ok((lambda, i0))
}

/// Quotient module with the base change that produced it.
#[derive(Clone, Debug)]
pub struct RankOneQuotient {
    pub module: AbModule,
    pub lambda: Scalar,
    pub pivot: usize,
    /// Basis change `e′ = e·T`; the quotient basis is `e′` without `pivot`.
    pub t: SeriesMatrix,
}

pub fn quotient_by_rank1(e: &AbModule, x: &Element) -> Result<AbModule> {
    Ok(quotient_by_rank1_detailed(e, x)?.module)
}

pub fn quotient_by_rank1_detailed(e: &AbModule, x: &Element) -> Result<RankOneQuotient> {
    let p = e.rank();
    if p < 2 {
        return Err(AbError::BadParameter("quotient of a rank-1 module".into()));
    }
    let (lambda, i0) = eigen_exponent(e, x)?;
    let w = e.precision().min(x.precision());
    let mut t = SeriesMatrix::identity(p, w);
    for (i, s) in x.coords.iter().enumerate() {
        t.set_entry(i, i0, &s.truncate(w));
    }
    let n = e.truncate(w).base_change(&t)?;
    let keep: Vec<usize> = (0..p).filter(|&i| i != i0).collect();
    let coeffs = n.matrix().coeffs().iter().map(|c| c.select(&keep, &keep)).collect();
    let module = AbModule::new(SeriesMatrix::from_coeffs(p - 1, p - 1, coeffs, n.precision()))?;
    Ok(RankOneQuotient { module, lambda, pivot: i0, t })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassPolicy {
    /// Smallest class representative in (re, im) order.
    Smallest,
    Largest,
    Random(u64),
}

#[derive(Clone, Debug)]
pub struct JHSequence {
    pub exponents: Vec<Scalar>,
    /// `E¹ ⊂ … ⊂ E^k = E` as lattices of `E`.
    pub filtration: Vec<Lattice>,
}

impl JHSequence {
    pub fn sum(&self) -> Scalar {
        self.exponents.iter().fold(Scalar::zero(), |a, b| &a + b)
    }
}

/// A primitive eigen-element whose exponent is minimal in a class of the
/// spectrum of `E^b` chosen by `pick`, together with that exponent.
fn minimal_eigen_element(
    f: &AbModule,
    pick: &mut dyn FnMut(&[Scalar]) -> usize,
) -> Result<(Element, Scalar)> {
    let (eb, lat) = biggest_simple_pole(f)?;
    let spec = spectrum(&eb)?;
    let mut classes: Vec<Scalar> = spec.iter().map(Scalar::class_rep).collect();
    classes.sort_by(Scalar::lex_cmp);
    classes.dedup();
    let class = classes[pick(&classes)].clone();
    let lambda = spec
        .iter()
        .filter(|z| z.class_rep() == class)
        .min_by(|a, b| a.re().cmp(b.re()))
        .cloned()
        .expect("class present");
    let r = eb.residue()?;
    let v = r
        .sub(&Matrix::scalar_identity(eb.rank(), &lambda))
        .kernel()
        .into_iter()
        .next()
        .ok_or_else(|| AbError::HypothesisViolated("no residue eigenvector".into()))?;
    let w = eb.precision();
    let y = Element { coords: v.iter().map(|c| Series::constant(c.clone(), w)).collect(), shift: 0 };
    let lifted = eigen_lift(&eb, &lambda, &y, 0)?;
    // Into the coordinates of f.
    let g = SeriesMatrix::from_columns(
        &lat.generators().iter().map(|c| c.iter().map(|s| s.with_precision(lifted.precision())).collect()).collect::<Vec<_>>(),
        f.rank(),
    );
    let x = g.apply(&lifted.coords);
    let k = x.iter().map(|s| s.valuation().bound()).min().unwrap_or(0);
    let prec = x.iter().map(Series::precision).min().unwrap_or(0);
    if k + 1 >= prec {
        return Err(AbError::PrecisionExhausted("eigen-element vanishes at working precision".into()));
    }
    let stripped: Vec<Series> = x.iter().map(|s| s.shift_down(k).expect("valuation")).collect();
    let exponent = &lambda - &Scalar::from_int(k as i64);
    Ok((Element { coords: stripped, shift: 0 }, exponent))
}

/// A primitive eigen-element realizing `λ̃_min` of the class chosen by
/// `policy`, with its exponent.
pub fn min_eigen_element(e: &AbModule, policy: &ClassPolicy) -> Result<(Element, Scalar)> {
    let mut rng = match policy {
        ClassPolicy::Random(s) => Some(ChaCha8Rng::seed_from_u64(*s)),
        _ => None,
    };
    let mut pick = |classes: &[Scalar]| -> usize {
        match policy {
            ClassPolicy::Smallest => 0,
            ClassPolicy::Largest => classes.len() - 1,
            ClassPolicy::Random(_) => rng.as_mut().expect("rng").gen_range(0..classes.len()),
        }
    };
    minimal_eigen_element(e, &mut pick)
}

/// A Jordan–Hölder sequence built from minimal eigen-elements.
pub fn jordan_holder(e: &AbModule, policy: &ClassPolicy) -> Result<JHSequence> {
    let mut rng = match policy {
        ClassPolicy::Random(s) => Some(ChaCha8Rng::seed_from_u64(*s)),
        _ => None,
    };
    let mut pick = |classes: &[Scalar]| -> usize {
        match policy {
            ClassPolicy::Smallest => 0,
            ClassPolicy::Largest => classes.len() - 1,
            ClassPolicy::Random(_) => rng.as_mut().expect("rng").gen_range(0..classes.len()),
        }
    };
    let p = e.rank();
    let mut current = e.clone();
    // Columns: lifts to E of the current basis.
    let mut lifts = SeriesMatrix::identity(p, e.precision());
    let mut taken: Vec<Vec<Series>> = Vec::new();
    let mut exponents = Vec::new();
    let mut filtration = Vec::new();
    while current.rank() > 1 {
        let (x, lambda) = minimal_eigen_element(&current, &mut pick)?;
        let q = quotient_by_rank1_detailed(&current, &x)?;
        if q.lambda != lambda {
            return Err(AbError::HypothesisViolated("eigen exponent mismatch".into()));
        }
        let w = lifts.precision().min(q.t.precision());
        let new_lifts = lifts.truncate(w).mul(&q.t.truncate(w));
        taken.push(new_lifts.column(q.pivot));
        let keep: Vec<Vec<Series>> =
            (0..current.rank()).filter(|&i| i != q.pivot).map(|i| new_lifts.column(i)).collect();
        lifts = SeriesMatrix::from_columns(&keep, p);
        exponents.push(lambda);
        filtration.push(filtration_lattice(p, &taken)?);
        current = q.module;
    }
    let last = current.residue_like_exponent()?;
    exponents.push(last);
    filtration.push(Lattice::whole(p, e.precision()));
    Ok(JHSequence { exponents, filtration })
}

fn filtration_lattice(p: usize, cols: &[Vec<Series>]) -> Result<Lattice> {
    let w = cols.iter().flatten().map(Series::precision).min().unwrap_or(1);
    Lattice::normalize(p, 0, w, cols)
}

impl AbModule {
    /// The exponent `λ` of a rank-1 module, which is isomorphic to `E_λ`
    /// with `λ` the coefficient of `b` once the constant term vanishes.
    pub fn residue_like_exponent(&self) -> Result<Scalar> {
        if self.rank() != 1 {
            return Err(AbError::BadParameter("rank-1 module expected".into()));
        }
        let s = self.entry(0, 0);
        if !s.coeff(0).is_zero() {
            return Err(AbError::NotRegular("rank-1 module without a simple pole".into()));
        }
        if s.precision() < 2 {
            return Err(AbError::PrecisionExhausted("rank-1 exponent".into()));
        }
        Ok(s.coeff(1).clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rank2NormalForm {
    DirectSum(Scalar, Scalar),
    SimplePoleJordan(Scalar, usize),
    NonSplit(Scalar, Scalar),
    NonSplitAlpha(Scalar, usize, Scalar),
}

impl std::fmt::Display for Rank2NormalForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rank2NormalForm::DirectSum(l, m) => write!(f, "direct_sum({l}, {m})"),
            Rank2NormalForm::SimplePoleJordan(l, n) => write!(f, "jordan({l}, {n})"),
            Rank2NormalForm::NonSplit(l, m) => write!(f, "non_split({l}, {m})"),
            Rank2NormalForm::NonSplitAlpha(l, n, a) => write!(f, "non_split_alpha({l}, {n}, {a})"),
        }
    }
}

fn sorted_pair(a: Scalar, b: Scalar) -> (Scalar, Scalar) {
    if a.lex_cmp(&b) == std::cmp::Ordering::Greater {
        (b, a)
    } else {
        (a, b)
    }
}

impl Rank2NormalForm {
    /// The module of the normal form at precision `w`.
    pub fn build(&self, w: usize) -> Result<AbModule> {
        match self {
            Rank2NormalForm::DirectSum(l, m) => {
                Ok(catalog::make_e_lambda(l, w).direct_sum(&catalog::make_e_lambda(m, w)))
            }
            Rank2NormalForm::SimplePoleJordan(l, n) => catalog::make_e_lambda_n(l, *n, w),
            Rank2NormalForm::NonSplit(l, m) => Ok(catalog::make_e_lambda_mu(l, m, w)),
            Rank2NormalForm::NonSplitAlpha(l, n, a) => catalog::make_e_lambda_mu_alpha(l, *n, a, w),
        }
    }
}

/// Solve `(a − (λ−1)b)t = c·y + d·b^n·y` for `(t, c, d)` and return `d/c`.
fn read_alpha(e: &AbModule, y: &Element, lambda: &Scalar, n: usize) -> Result<Scalar> {
    let w = y.precision().min(e.precision());
    let q = truncate(e, w)?;
    let p = e.rank();
    let op = q.a.sub(&q.b.scale(&(lambda - &Scalar::one())));
    let yv: Vec<Scalar> = (0..w).flat_map(|j| (0..p).map(move |i| (j, i))).map(|(j, i)| y.coords[i].coeff(j).clone()).collect();
    let mut bn = yv.clone();
    for _ in 0..n {
        bn = q.b.mul_vec(&bn);
    }
    // Unknowns: t (dim entries), c, d.
    let dim = q.dim;
    let mut ech = SparseEchelon::new(dim + 2);
    for r in 0..dim {
        let mut row: Vec<(usize, Scalar)> =
            op.row(r).iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(c, v)| (c + 2, v.clone())).collect();
        if !yv[r].is_zero() {
            row.push((0, -&yv[r]));
        }
        if !bn[r].is_zero() {
            row.push((1, -&bn[r]));
        }
        ech.add_row(row);
    }
    // Unknown order (c, d, t…): project the solution space onto (c, d).
    let sols = ech.kernel();
    let cd: Vec<Vec<Scalar>> = sols.iter().map(|v| vec![v[0].clone(), v[1].clone()]).collect();
    let span = crate::linalg::Subspace::span(2, cd);
    if span.dim() != 1 {
        return Err(AbError::HypothesisViolated("α is not determined".into()));
    }
    let v = &span.basis()[0];
    if v[0].is_zero() {
        return Err(AbError::HypothesisViolated("α is not determined".into()));
    }
    Ok(&v[1] / &v[0])
}

/// Normal form of a rank-2 regular module.
pub fn classify_rank2(e: &AbModule) -> Result<Rank2NormalForm> {
    if e.rank() != 2 {
        return Err(AbError::BadParameter("classify_rank2 needs rank 2".into()));
    }
    let tag = if e.is_simple_pole() {
        classify_simple_pole(e)?
    } else {
        let sat = saturate(e)?;
        match classify_simple_pole(&sat.saturated)? {
            Rank2NormalForm::DirectSum(s1, s2) => {
                let (a, b) = sorted_pair(&s1 + &Scalar::one(), &s2 + &Scalar::one());
                Rank2NormalForm::NonSplit(a, b)
            }
            Rank2NormalForm::SimplePoleJordan(s, 0) => {
                let l = &s + &Scalar::one();
                Rank2NormalForm::NonSplit(l.clone(), l)
            }
            Rank2NormalForm::SimplePoleJordan(s, n) => {
                let lambda = &s + &Scalar::from_int(n as i64 + 1);
                let mut pick = |_: &[Scalar]| 0usize;
                let (y, ex) = minimal_eigen_element(e, &mut pick)?;
                let expect = &lambda - &Scalar::from_int(n as i64);
                if ex != expect {
                    return Err(AbError::HypothesisViolated(format!(
                        "minimal eigen-element has exponent {ex}, expected {expect}"
                    )));
                }
                let alpha = read_alpha(e, &y, &lambda, n)?;
                Rank2NormalForm::NonSplitAlpha(lambda, n, alpha)
            }
            other => {
                return Err(AbError::HypothesisViolated(format!("unexpected saturation type {other}")));
            }
        }
    };
    let w = verify_level(&tag).min(e.precision());
    let normal = tag.build(w)?;
    if module_iso(&e.truncate(w), &normal, w)?.is_none() {
        return Err(AbError::HypothesisViolated(format!("module is not isomorphic to {tag}")));
    }
    Ok(tag)
}

/// Truncation level at which isomorphism with the normal form is decisive.
fn verify_level(tag: &Rank2NormalForm) -> usize {
    match tag {
        Rank2NormalForm::DirectSum(l, m) => match l.integer_difference(m) {
            Some(d) => usize::try_from(d.magnitude().clone()).unwrap_or(0) + 3,
            None => 3,
        },
        Rank2NormalForm::SimplePoleJordan(_, n) => n + 3,
        Rank2NormalForm::NonSplit(l, m) => match l.integer_difference(m) {
            Some(d) => usize::try_from(d.magnitude().clone()).unwrap_or(0) + 4,
            None => 4,
        },
        Rank2NormalForm::NonSplitAlpha(_, n, _) => 2 * n + 4,
    }
}

fn classify_simple_pole(e: &AbModule) -> Result<Rank2NormalForm> {
    let s = spectrum(e)?;
    let (s1, s2) = (s[0].clone(), s[1].clone());
    let Some(d) = s1.integer_difference(&s2) else {
        let (a, b) = sorted_pair(s1, s2);
        return Ok(Rank2NormalForm::DirectSum(a, b));
    };
    let (lo, n) = if d.sign() == num_bigint::Sign::Minus {
        (s1, usize::try_from(-d).expect("small"))
    } else {
        (s2, usize::try_from(d).expect("small"))
    };
    let hi = &lo + &Scalar::from_int(n as i64);
    let w = (n + 3).min(e.precision());
    let split = catalog::make_e_lambda(&lo, w).direct_sum(&catalog::make_e_lambda(&hi, w));
    if module_iso(&e.truncate(w), &split, w)?.is_some() {
        let (a, b) = sorted_pair(lo, hi);
        Ok(Rank2NormalForm::DirectSum(a, b))
    } else {
        Ok(Rank2NormalForm::SimplePoleJordan(lo, n))
    }
}
